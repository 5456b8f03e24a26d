//! Orthogonal projections onto the tangent and normal cones of a yield domain.
//!
//! Every routine returns the pair `(P_T τ, P_N τ)`; the tangent part is always
//! formed as `τ - P_N τ`, which is exact for a cone and its polar.

use crate::error::{Error, Result};
use crate::tensor::{outer, spectral_with_tol, sym_outer, vec_dot, Multiplicity, SymTensor3, Vec3};
use crate::yield_surface::{YieldDomain, YieldFunction};

/// Gradients whose cosine satisfies `1 - |cos| < COLLINEARITY_TOL` are rejected.
pub const COLLINEARITY_TOL: f64 = 1e-10;

/// Gradient norms at or below this are treated as zero.
pub const GRADIENT_FLOOR: f64 = 1e-14;

/// Moreau pair of a tensor relative to a tangent cone and its polar.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConeSplit {
    pub tangent: SymTensor3,
    pub normal: SymTensor3,
}

impl ConeSplit {
    pub fn from_normal(tau: SymTensor3, normal: SymTensor3) -> Self {
        Self {
            tangent: tau - normal,
            normal,
        }
    }
}

/// Which closed form produced a split.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Branch {
    Interior,
    One,
    Two,
    TrescaSmooth,
    TrescaDegenerateM1,
    TrescaDegenerateM3,
}

impl Branch {
    pub fn as_str(self) -> &'static str {
        match self {
            Branch::Interior => "interior",
            Branch::One => "one",
            Branch::Two => "two",
            Branch::TrescaSmooth => "tresca_smooth",
            Branch::TrescaDegenerateM1 => "tresca_degenerate_m1",
            Branch::TrescaDegenerateM3 => "tresca_degenerate_m3",
        }
    }
}

impl std::fmt::Display for Branch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Interior point: the tangent cone is the whole space.
pub fn split_interior(tau: SymTensor3) -> ConeSplit {
    ConeSplit {
        tangent: tau,
        normal: SymTensor3::ZERO,
    }
}

/// Single saturated constraint with gradient `g1`.
pub fn split_one(g1: SymTensor3, tau: SymTensor3) -> Result<ConeSplit> {
    let n2 = g1.norm_squared();
    if n2.sqrt() <= GRADIENT_FLOOR {
        return Err(Error::DegenerateGradient);
    }
    let c = tau.dot(g1).max(0.0) / n2;
    Ok(ConeSplit::from_normal(tau, g1 * c))
}

pub fn split_two(g1: SymTensor3, g2: SymTensor3, tau: SymTensor3) -> Result<ConeSplit> {
    split_two_with_tol(g1, g2, tau, COLLINEARITY_TOL)
}

/// Two saturated constraints with non-collinear gradients.
pub fn split_two_with_tol(
    g1: SymTensor3,
    g2: SymTensor3,
    tau: SymTensor3,
    collinearity_tol: f64,
) -> Result<ConeSplit> {
    let (n1, n2) = (g1.norm(), g2.norm());
    if n1 <= GRADIENT_FLOOR || n2 <= GRADIENT_FLOOR {
        return Err(Error::DegenerateGradient);
    }
    let (u1, u2) = (g1 / n1, g2 / n2);
    let delta = u1.dot(u2);
    if 1.0 - delta.abs() < collinearity_tol {
        return Err(Error::CollinearGradients { cosine: delta });
    }
    let (a1, a2) = (tau.dot(u1), tau.dot(u2));
    let det = 1.0 - delta * delta;
    let eta1 = (a1 - delta * a2) / det;
    let eta2 = (a2 - delta * a1) / det;
    let normal = if eta1 >= 0.0 && eta2 >= 0.0 {
        u1 * eta1 + u2 * eta2
    } else if a1 >= a2 {
        // On the tie a1 == a2 both single-gradient branches are admissible;
        // the first one is taken.
        u1 * a1.max(0.0)
    } else {
        u2 * a2.max(0.0)
    };
    Ok(ConeSplit::from_normal(tau, normal))
}

/// Orthogonal projection of `τ` onto `span{g1, g2}`.
pub fn gradient_span_projection(g1: SymTensor3, g2: SymTensor3, tau: SymTensor3) -> SymTensor3 {
    let (n1, n2) = (g1.norm(), g2.norm());
    let (u1, u2) = (g1 / n1, g2 / n2);
    let delta = u1.dot(u2);
    let (b1, b2) = (tau.dot(u1), tau.dot(u2));
    let det = 1.0 - delta * delta;
    u1 * ((b1 - delta * b2) / det) + u2 * ((b2 - delta * b1) / det)
}

/// Tresca point with three distinct principal stresses.
pub fn split_tresca_smooth(sigma: SymTensor3, tau: SymTensor3, eig_tol: f64) -> Result<ConeSplit> {
    let grad = crate::yield_surface::tresca_gradient(sigma, eig_tol)?;
    split_one(grad, tau)
}

/// Plastic multiplier `q = max(0, τ : (v1⊗v1 - v3⊗v3)) / 2`; the smooth
/// Tresca normal part is `q (v1⊗v1 - v3⊗v3)`.
pub fn tresca_smooth_multiplier(
    sigma: SymTensor3,
    tau: SymTensor3,
    eig_tol: f64,
) -> Result<(f64, SymTensor3)> {
    let d = spectral_with_tol(sigma, eig_tol);
    if d.multiplicity != Multiplicity::Distinct {
        return Err(Error::NotDifferentiable);
    }
    let dir = outer(d.eigenvectors[0]) - outer(d.eigenvectors[2]);
    Ok((0.5 * tau.dot(dir).max(0.0), dir))
}

/// Orthonormal basis of `G_m = {κ : κ v_m = 0}` at a Tresca edge point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DegenerateWorkspace {
    /// Index (1 or 3) of the isolated eigenvalue.
    pub m: usize,
    /// Eigenvector of the isolated eigenvalue.
    pub isolated: Vec3,
    /// The two eigenvectors spanning the repeated eigenspace, in index order.
    pub plane: [Vec3; 2],
    /// `W_{m,1}, W_{m,2}, W_{m,3}`.
    pub basis: [SymTensor3; 3],
    pub eigenvalues: [f64; 3],
}

/// A deviator restricted to `G_m` together with its spectrum.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReducedDeviator {
    pub projected: SymTensor3,
    /// In-plane eigenvalues `(μ1, μ2)`, `μ1 ≥ μ2`.
    pub mu: (f64, f64),
    /// Ordered eigenvalues of `projected`, one of which is zero.
    pub eigenvalues: [f64; 3],
    /// In-plane eigenvectors matching `mu`.
    pub plane_vectors: [Vec3; 2],
}

impl DegenerateWorkspace {
    pub fn build(sigma: SymTensor3, eig_tol: f64) -> Result<Self> {
        let d = spectral_with_tol(sigma, eig_tol);
        let m = match d.multiplicity {
            Multiplicity::UpperPair => 3,
            Multiplicity::LowerPair => 1,
            Multiplicity::Triple => return Err(Error::TripleEigenvalue),
            Multiplicity::Distinct => return Err(Error::NotDegenerate),
        };
        let ell = 4 - m;
        let v = d.eigenvectors;
        let mixed = sym_outer(v[1], v[ell - 1]) * std::f64::consts::SQRT_2;
        let basis = std::array::from_fn(|i| if i + 1 == m { mixed } else { outer(v[i]) });
        let plane = if m == 3 { [v[0], v[1]] } else { [v[1], v[2]] };
        Ok(Self {
            m,
            isolated: v[m - 1],
            plane,
            basis,
            eigenvalues: d.eigenvalues,
        })
    }

    /// `Σ (τ : W_i) W_i`.
    pub fn project(&self, tau: SymTensor3) -> SymTensor3 {
        self.basis
            .iter()
            .fold(SymTensor3::ZERO, |acc, w| acc + *w * tau.dot(*w))
    }

    pub fn coordinates(&self, tau: SymTensor3) -> [f64; 3] {
        self.basis.map(|w| tau.dot(w))
    }

    /// Projects the deviator of `τ` onto `G_m` and diagonalizes it in-plane.
    pub fn reduce(&self, tau: SymTensor3) -> ReducedDeviator {
        let projected = self.project(tau.deviator());
        let [a, b] = self.plane;
        let paa = projected.dot(outer(a));
        let pbb = projected.dot(outer(b));
        let pab = projected.dot(sym_outer(a, b));
        let mean = 0.5 * (paa + pbb);
        let half = 0.5 * (paa - pbb);
        let radius = half.hypot(pab);
        let mu = (mean + radius, mean - radius);

        // Rotation angle diagonalizing [[paa, pab], [pab, pbb]].
        let angle = 0.5 * (2.0 * pab).atan2(paa - pbb);
        let (c, s) = (angle.cos(), angle.sin());
        let w1 = [
            c * a[0] + s * b[0],
            c * a[1] + s * b[1],
            c * a[2] + s * b[2],
        ];
        let w2 = [
            -s * a[0] + c * b[0],
            -s * a[1] + c * b[1],
            -s * a[2] + c * b[2],
        ];

        let mut eigenvalues = [mu.0, mu.1, 0.0];
        eigenvalues.sort_by(|x, y| y.total_cmp(x));
        ReducedDeviator {
            projected,
            mu,
            eigenvalues,
            plane_vectors: [w1, w2],
        }
    }

    /// Normal-cone projection evaluated literally for this workspace's `m`:
    /// `ρ_m [S_m - tr(S_m) v_m ⊗ v_m]` with `S_m = P - λ_m(P) I`.
    pub fn normal_direct(&self, tau: SymTensor3) -> SymTensor3 {
        let r = self.reduce(tau);
        let total: f64 = r.eigenvalues.iter().sum();
        let total_abs: f64 = r.eigenvalues.iter().map(|x| x.abs()).sum();
        if total_abs == 0.0 {
            return SymTensor3::ZERO;
        }
        let sign = if self.m == 3 { 1.0 } else { -1.0 };
        let rho = (0.25 + sign * 0.75 * total / total_abs).max(0.0);
        if rho == 0.0 {
            return SymTensor3::ZERO;
        }
        let lambda_m = r.eigenvalues[self.m - 1];
        let s = r.projected - SymTensor3::hydrostatic(lambda_m);
        (s - outer(self.isolated) * s.trace()) * rho
    }
}

/// Active set of the two-variable quadratic program
/// `min (x+y-μ1-μ2)² + (x-μ1)² + (y-μ2)²` over `x, y ≥ 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum KktBranch {
    Interior,
    Zero,
    FirstOnly,
    SecondOnly,
}

pub fn kkt_pair(mu1: f64, mu2: f64) -> (f64, f64, f64) {
    kkt_pair_branch(mu1, mu2).0
}

pub fn kkt_pair_branch(mu1: f64, mu2: f64) -> ((f64, f64, f64), KktBranch) {
    if mu1 >= 0.0 && mu2 >= 0.0 {
        ((mu1, mu2, 0.0), KktBranch::Interior)
    } else if mu1 + 0.5 * mu2 <= 0.0 && mu2 + 0.5 * mu1 <= 0.0 {
        ((0.0, 0.0, 0.0), KktBranch::Zero)
    } else if mu2 < 0.0 && mu1 + 0.5 * mu2 > 0.0 {
        ((mu1 + 0.5 * mu2, 0.0, 0.0), KktBranch::FirstOnly)
    } else {
        ((0.0, mu2 + 0.5 * mu1, 0.0), KktBranch::SecondOnly)
    }
}

/// Tresca edge point (exactly two coincident principal stresses).
///
/// The `λ1 > λ2 = λ3` edge is reduced to the other one through
/// `P_N(σ)(τ) = -P_N(-σ)(-τ)`.
pub fn split_tresca_degenerate(
    sigma: SymTensor3,
    tau: SymTensor3,
    eig_tol: f64,
) -> Result<(ConeSplit, Branch)> {
    let ws = DegenerateWorkspace::build(sigma, eig_tol)?;
    if ws.m == 3 {
        Ok((
            ConeSplit::from_normal(tau, ws.normal_direct(tau)),
            Branch::TrescaDegenerateM3,
        ))
    } else {
        let flipped = DegenerateWorkspace::build(-sigma, eig_tol)?;
        debug_assert_eq!(flipped.m, 3);
        let normal = -flipped.normal_direct(-tau);
        Ok((
            ConeSplit::from_normal(tau, normal),
            Branch::TrescaDegenerateM1,
        ))
    }
}

/// KKT active set reached by the degenerate Tresca projection of `τ`.
pub fn tresca_degenerate_kkt_branch(
    sigma: SymTensor3,
    tau: SymTensor3,
    eig_tol: f64,
) -> Result<KktBranch> {
    let ws = DegenerateWorkspace::build(sigma, eig_tol)?;
    let (ws, tau) = if ws.m == 3 {
        (ws, tau)
    } else {
        (DegenerateWorkspace::build(-sigma, eig_tol)?, -tau)
    };
    let r = ws.reduce(tau);
    // The pair is unordered in the quadratic program; label each eigenvalue
    // by the plane axis its eigenvector is closest to.
    let a = ws.plane[0];
    let (mu1, mu2) = if vec_dot(r.plane_vectors[0], a).abs() >= vec_dot(r.plane_vectors[1], a).abs()
    {
        r.mu
    } else {
        (r.mu.1, r.mu.0)
    };
    Ok(kkt_pair_branch(mu1, mu2).1)
}

/// A split together with the formula that produced it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Projection {
    pub split: ConeSplit,
    pub branch: Branch,
}

/// Projects `τ` onto the cones of `domain` at `σ`, dispatching on the
/// saturated constraints and, for Tresca, on eigenvalue coincidence.
pub fn project(domain: &YieldDomain, sigma: SymTensor3, tau: SymTensor3) -> Result<Projection> {
    project_allowing(domain, sigma, tau, 0.0)
}

/// As [`project`], accepting stresses up to `allowance` outside the domain.
pub fn project_allowing(
    domain: &YieldDomain,
    sigma: SymTensor3,
    tau: SymTensor3,
    allowance: f64,
) -> Result<Projection> {
    let sat = domain.saturation_allowing(sigma, allowance)?;
    let eig_tol = domain.eig_tol();
    let functions = domain.functions();
    if sat.is_empty() {
        return Ok(Projection {
            split: split_interior(tau),
            branch: Branch::Interior,
        });
    }
    if sat.indices.iter().any(|&i| functions[i].is_tresca()) {
        if sat.len() > 1 {
            return Err(Error::UnsupportedSaturation { count: sat.len() });
        }
        return match spectral_with_tol(sigma, eig_tol).multiplicity {
            Multiplicity::Distinct => Ok(Projection {
                split: split_tresca_smooth(sigma, tau, eig_tol)?,
                branch: Branch::TrescaSmooth,
            }),
            Multiplicity::Triple => Err(Error::TripleEigenvalue),
            _ => {
                let (split, branch) = split_tresca_degenerate(sigma, tau, eig_tol)?;
                Ok(Projection { split, branch })
            }
        };
    }
    let grads = sat
        .indices
        .iter()
        .map(|&i| functions[i].gradient(sigma, eig_tol))
        .collect::<Result<Vec<_>>>()?;
    match grads.as_slice() {
        [g1] => Ok(Projection {
            split: split_one(*g1, tau)?,
            branch: Branch::One,
        }),
        [g1, g2] => Ok(Projection {
            split: split_two(*g1, *g2, tau)?,
            branch: Branch::Two,
        }),
        _ => Err(Error::UnsupportedSaturation { count: grads.len() }),
    }
}

/// Gradients of the saturated smooth constraints, for callers that want the
/// normal cone generators directly.
pub fn saturated_gradients(domain: &YieldDomain, sigma: SymTensor3) -> Result<Vec<SymTensor3>> {
    let sat = domain.saturation(sigma)?;
    sat.indices
        .iter()
        .map(|&i| {
            let f: &YieldFunction = &domain.functions()[i];
            f.gradient(sigma, domain.eig_tol())
        })
        .collect()
}
