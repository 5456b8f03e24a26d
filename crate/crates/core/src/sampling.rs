//! Random stresses on yield surfaces, for property tests and the `check` suite.

use rand::Rng;

use crate::tensor::{SymTensor3, Vec3};
use crate::yield_surface::{linear, von_mises, YieldDomain};

/// Entries uniform in `[-scale, scale]`.
pub fn random_tensor<R: Rng + ?Sized>(rng: &mut R, scale: f64) -> SymTensor3 {
    SymTensor3::from_array(std::array::from_fn(|_| rng.gen_range(-1.0..=1.0) * scale))
}

/// Uniformly distributed rotation (Shoemake's quaternion construction).
pub fn random_rotation<R: Rng + ?Sized>(rng: &mut R) -> [Vec3; 3] {
    use std::f64::consts::TAU;
    let (u1, u2, u3): (f64, f64, f64) = (rng.gen(), rng.gen(), rng.gen());
    let (a, b) = ((1.0 - u1).sqrt(), u1.sqrt());
    let (w, x, y, z) = (
        a * (TAU * u2).sin(),
        a * (TAU * u2).cos(),
        b * (TAU * u3).sin(),
        b * (TAU * u3).cos(),
    );
    [
        [
            1.0 - 2.0 * (y * y + z * z),
            2.0 * (x * y - z * w),
            2.0 * (x * z + y * w),
        ],
        [
            2.0 * (x * y + z * w),
            1.0 - 2.0 * (x * x + z * z),
            2.0 * (y * z - x * w),
        ],
        [
            2.0 * (x * z - y * w),
            2.0 * (y * z + x * w),
            1.0 - 2.0 * (x * x + y * y),
        ],
    ]
}

/// `R diag(e) Rᵀ`.
pub fn rotate_diagonal(rotation: &[Vec3; 3], eigenvalues: [f64; 3]) -> SymTensor3 {
    let r = rotation;
    let m: [[f64; 3]; 3] = std::array::from_fn(|i| {
        std::array::from_fn(|j| (0..3).map(|k| r[i][k] * eigenvalues[k] * r[j][k]).sum())
    });
    SymTensor3::from_matrix(m)
}

fn hydrostatic<R: Rng + ?Sized>(rng: &mut R, k: f64) -> f64 {
    rng.gen_range(-2.0..=2.0) * k
}

/// Stress with `sqrt(J2) = k` and a random mean stress.
pub fn von_mises_surface<R: Rng + ?Sized>(rng: &mut R, k: f64) -> SymTensor3 {
    loop {
        let dev = random_tensor(rng, 1.0).deviator();
        let n = dev.norm();
        if n > 1e-3 {
            // |dev|² = 2 J2
            return dev * (k * std::f64::consts::SQRT_2 / n)
                + SymTensor3::hydrostatic(hydrostatic(rng, k));
        }
    }
}

/// Stress with `(λ1 - λ3)/2 = k` whose middle eigenvalue is at least `gap`
/// away from both others.
pub fn tresca_smooth_surface<R: Rng + ?Sized>(rng: &mut R, k: f64, gap: f64) -> SymTensor3 {
    let span = 2.0 * k;
    let lo = (gap / span).min(0.5);
    let u = rng.gen_range(lo..=1.0 - lo);
    let p = hydrostatic(rng, k);
    let e = [p + k, p - k + span * u, p - k];
    rotate_diagonal(&random_rotation(rng), e)
}

/// Tresca edge stress with isolated eigenvalue index `m` (1 or 3).
pub fn tresca_degenerate_surface<R: Rng + ?Sized>(rng: &mut R, k: f64, m: usize) -> SymTensor3 {
    let p = hydrostatic(rng, k);
    let e = match m {
        1 => [p + k, p - k, p - k],
        3 => [p + k, p + k, p - k],
        _ => panic!("isolated index must be 1 or 3, got {m}"),
    };
    rotate_diagonal(&random_rotation(rng), e)
}

/// Von Mises domain cut by a random half-space, together with a stress at
/// which both constraints are saturated. The gradients make an angle whose
/// cosine magnitude stays below 0.95.
pub fn two_function_instance<R: Rng + ?Sized>(rng: &mut R, k: f64) -> (YieldDomain, SymTensor3) {
    loop {
        let sigma = von_mises_surface(rng, k);
        let s = sigma.deviator();
        let dir = random_tensor(rng, 1.0).deviator();
        let level = sigma.dot(dir);
        let cosine = s.dot(dir) / (s.norm() * dir.norm());
        if dir.norm() < 1e-3 || level <= 1e-3 * k * dir.norm() || cosine.abs() > 0.95 {
            continue;
        }
        let functions = vec![
            von_mises(k).expect("positive k"),
            linear(dir, level).expect("nonzero direction"),
        ];
        if let Ok(domain) = YieldDomain::new(functions) {
            return (domain, sigma);
        }
    }
}

/// Random stress inside `domain` (scaled deviator of a random tensor).
pub fn inside<R: Rng + ?Sized>(rng: &mut R, domain: &YieldDomain, scale: f64) -> SymTensor3 {
    let s = domain.return_to_surface(random_tensor(rng, scale));
    let mean = SymTensor3::hydrostatic(s.trace() / 3.0);
    mean + s.deviator() * rng.gen_range(0.0..=1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::{j2, spectral, Multiplicity};
    use crate::yield_surface::tresca_value;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn rotations_are_orthogonal() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            let r = random_rotation(&mut rng);
            for i in 0..3 {
                for j in 0..3 {
                    let d: f64 = (0..3).map(|k| r[i][k] * r[j][k]).sum();
                    assert!((d - if i == j { 1.0 } else { 0.0 }).abs() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn samples_lie_on_their_surfaces() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let k = 1.7;
        for _ in 0..100 {
            assert!((j2(von_mises_surface(&mut rng, k)).sqrt() - k).abs() < 1e-12);
            let t = tresca_smooth_surface(&mut rng, k, 1e-2);
            assert!((tresca_value(t) - k).abs() < 1e-12);
            assert_eq!(spectral(t).multiplicity, Multiplicity::Distinct);
            let e = tresca_degenerate_surface(&mut rng, k, 3);
            assert_eq!(spectral(e).multiplicity, Multiplicity::UpperPair);
            let e = tresca_degenerate_surface(&mut rng, k, 1);
            assert_eq!(spectral(e).multiplicity, Multiplicity::LowerPair);
            let (d, s) = two_function_instance(&mut rng, k);
            assert_eq!(d.saturation(s).unwrap().len(), 2);
            let i = inside(&mut rng, &d, 3.0);
            assert!(d.membership(i) <= 1e-12);
        }
    }
}
