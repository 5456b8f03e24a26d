//! Numerical reference for normal-cone projections.
//!
//! Minimizes `|τ - η|` over an explicit parameterization of the normal cone by
//! projected gradient descent. It shares nothing with the closed forms in
//! [`crate::cone`] beyond the cone generators themselves, and exists to check
//! them.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::tensor::{outer, spectral_with_tol, sym_outer, Multiplicity, SymTensor3, Vec3};
use crate::yield_surface::{tresca_gradient, YieldDomain};

pub const MAX_ITER: usize = 100_000;
pub const STEP_TOL: f64 = 1e-12;
/// Number of deterministic starting points for the edge-cone problem.
pub const STARTS: u64 = 8;

/// Projection onto the cone `{Σ a_i g_i : a_i ≥ 0}`.
pub fn nonnegative_combination(generators: &[SymTensor3], tau: SymTensor3) -> Result<SymTensor3> {
    let n = generators.len();
    if n == 0 {
        return Ok(SymTensor3::ZERO);
    }
    let gram: Vec<Vec<f64>> = generators
        .iter()
        .map(|a| generators.iter().map(|b| a.dot(*b)).collect())
        .collect();
    // Gershgorin bound on the largest Gram eigenvalue.
    let lipschitz = gram
        .iter()
        .map(|row| row.iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max);
    if lipschitz <= 0.0 {
        return Err(Error::DegenerateGradient);
    }
    let rhs: Vec<f64> = generators.iter().map(|g| g.dot(tau)).collect();
    let scale = tau.norm().max(1.0);
    let mut coef = vec![0.0; n];
    for _ in 0..MAX_ITER {
        let mut step = SymTensor3::ZERO;
        let mut next = coef.clone();
        for i in 0..n {
            let grad: f64 = (0..n).map(|j| gram[i][j] * coef[j]).sum::<f64>() - rhs[i];
            next[i] = (coef[i] - grad / lipschitz).max(0.0);
            step += generators[i] * (next[i] - coef[i]);
        }
        coef = next;
        if step.norm() < STEP_TOL * scale {
            return Ok(generators
                .iter()
                .zip(&coef)
                .fold(SymTensor3::ZERO, |acc, (g, a)| acc + *g * *a));
        }
    }
    Err(Error::OracleFailure {
        iterations: MAX_ITER,
    })
}

/// Projects a 2x2 symmetric matrix `[[x, c/√2], [c/√2, y]]` onto the
/// positive semidefinite cone. Coordinates are orthonormal for the
/// Frobenius product.
fn clip_psd(p: [f64; 3]) -> [f64; 3] {
    let [x, y, c] = p;
    let off = c / std::f64::consts::SQRT_2;
    let mean = 0.5 * (x + y);
    let radius = (0.5 * (x - y)).hypot(off);
    let (l1, l2) = (mean + radius, mean - radius);
    if l2 >= 0.0 {
        return p;
    }
    if l1 <= 0.0 {
        return [0.0; 3];
    }
    // Keep only the top eigenpair: l1 u u^T with u the leading eigenvector.
    let angle = 0.5 * (2.0 * off).atan2(x - y);
    let (cs, sn) = (angle.cos(), angle.sin());
    [
        l1 * cs * cs,
        l1 * sn * sn,
        std::f64::consts::SQRT_2 * l1 * cs * sn,
    ]
}

/// Projection onto `{s (κ - tr(κ) v ⊗ v) : κ ⪰ 0, κ v = 0}`, with `κ` written
/// in the orthonormal plane basis `{a, b}` of `v^⊥`.
pub fn edge_cone(
    isolated: Vec3,
    plane: [Vec3; 2],
    sign: f64,
    tau: SymTensor3,
    seed: u64,
) -> Result<SymTensor3> {
    let [a, b] = plane;
    let gens = [
        outer(a) - outer(isolated),
        outer(b) - outer(isolated),
        sym_outer(a, b) * std::f64::consts::SQRT_2,
    ]
    .map(|g| g * sign);
    let eval = |p: [f64; 3]| gens[0] * p[0] + gens[1] * p[1] + gens[2] * p[2];
    let objective = |p: [f64; 3]| (tau - eval(p)).norm_squared();
    // |A|² ≤ 3 for this map.
    let step_size = 1.0 / 3.0;
    let scale = tau.norm().max(1.0);

    let mut best: Option<([f64; 3], f64)> = None;
    for start in 0..STARTS {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(start));
        let mut p = clip_psd([
            rng.gen_range(-1.0..1.0) * scale,
            rng.gen_range(-1.0..1.0) * scale,
            rng.gen_range(-1.0..1.0) * scale,
        ]);
        let mut converged = false;
        for _ in 0..MAX_ITER {
            let r = tau - eval(p);
            let grad = gens.map(|g| -r.dot(g));
            let next = clip_psd([
                p[0] - step_size * grad[0],
                p[1] - step_size * grad[1],
                p[2] - step_size * grad[2],
            ]);
            let moved = eval([next[0] - p[0], next[1] - p[1], next[2] - p[2]]).norm();
            p = next;
            if moved < STEP_TOL * scale {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::OracleFailure {
                iterations: MAX_ITER,
            });
        }
        let value = objective(p);
        if best.is_none_or(|(_, v)| value < v) {
            best = Some((p, value));
        }
    }
    Ok(eval(best.expect("at least one start").0))
}

/// Reference normal-cone projection at a boundary stress of `domain`.
pub fn oracle_normal_projection(
    domain: &YieldDomain,
    sigma: SymTensor3,
    tau: SymTensor3,
) -> Result<SymTensor3> {
    let sat = domain.saturation(sigma)?;
    if sat.is_empty() {
        return Ok(SymTensor3::ZERO);
    }
    let functions = domain.functions();
    let eig_tol = domain.eig_tol();
    if sat.indices.iter().any(|&i| functions[i].is_tresca()) {
        if sat.len() > 1 {
            return Err(Error::UnsupportedSaturation { count: sat.len() });
        }
        let d = spectral_with_tol(sigma, eig_tol);
        let v = d.eigenvectors;
        return match d.multiplicity {
            Multiplicity::Distinct => {
                nonnegative_combination(&[tresca_gradient(sigma, eig_tol)?], tau)
            }
            Multiplicity::UpperPair => edge_cone(v[2], [v[0], v[1]], 1.0, tau, 0),
            Multiplicity::LowerPair => edge_cone(v[0], [v[1], v[2]], -1.0, tau, 0),
            Multiplicity::Triple => Err(Error::TripleEigenvalue),
        };
    }
    let grads = sat
        .indices
        .iter()
        .map(|&i| functions[i].gradient(sigma, eig_tol))
        .collect::<Result<Vec<_>>>()?;
    nonnegative_combination(&grads, tau)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clip_psd_keeps_psd_and_zeroes_nsd() {
        assert_eq!(clip_psd([1.0, 2.0, 0.1]), [1.0, 2.0, 0.1]);
        assert_eq!(clip_psd([-1.0, -2.0, 0.1]), [0.0; 3]);
        let p = clip_psd([1.0, -1.0, 0.0]);
        assert!((p[0] - 1.0).abs() < 1e-15 && p[1].abs() < 1e-15 && p[2].abs() < 1e-15);
    }

    #[test]
    fn nnls_single_generator() {
        let g = SymTensor3::new(0.0, 0.0, 0.0, 1.0, 0.0, 0.0);
        let tau = SymTensor3::new(0.2, 0.0, 0.0, 0.5, 0.0, 0.0);
        let n = nonnegative_combination(&[g], tau).unwrap();
        assert!((n - g * 0.5).norm() < 1e-10);
        let n = nonnegative_combination(&[g], -tau).unwrap();
        assert!(n.norm() < 1e-10);
    }

    #[test]
    fn edge_cone_contains_its_members() {
        let v = [0.0, 0.0, 1.0];
        let tau = SymTensor3::diag(1.0, 1.0, -2.0) * 0.4;
        let n = edge_cone(v, [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]], 1.0, tau, 3).unwrap();
        assert!((n - tau).norm() < 1e-9);
    }
}
