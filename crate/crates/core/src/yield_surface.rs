//! Yield functions and yield domains.
//!
//! A yield domain is the set `{σ : f_i(σ) ≤ k_i for all i}` of convex,
//! pressure-insensitive constraints. Von Mises is carried internally in the
//! squared form `J2 ≤ k²` so that its gradient is exactly the deviator; the
//! `sqrt(J2)` form is only used for reporting.

use crate::error::{Error, Result};
use crate::tensor::{
    self, grad_j2, grad_j3, invariants, outer, spectral_with_tol, Multiplicity, SymTensor3,
    DEFAULT_EIG_TOL,
};

/// Default relative tolerance for declaring a constraint saturated.
pub const DEFAULT_SATURATION_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Smoothness {
    Everywhere,
    /// Differentiable except where eigenvalues coincide.
    OffDegenerateSet,
}

/// One monomial `coeff * J2^j2_power * J3^j3_power`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PolyTerm {
    pub coeff: f64,
    pub j2_power: u32,
    pub j3_power: u32,
}

#[derive(Clone, Debug, PartialEq)]
pub enum YieldFunction {
    /// `sqrt(J2) ≤ k`, evaluated as `J2 ≤ k²`.
    VonMises { k: f64 },
    /// `(λ1 - λ3) / 2 ≤ k`.
    Tresca { k: f64 },
    /// `Σ c J2^p J3^q ≤ level`. Convexity is the caller's responsibility.
    InvariantPolynomial { terms: Vec<PolyTerm>, level: f64 },
    /// Half-space `σ : A ≤ level` with a traceless normal `A`.
    Linear { direction: SymTensor3, level: f64 },
}

fn check_level(field: &'static str, k: f64) -> Result<()> {
    if k.is_finite() && k > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(
            field,
            format!("must be positive and finite, got {k}"),
        ))
    }
}

pub fn von_mises(k: f64) -> Result<YieldFunction> {
    check_level("k", k)?;
    Ok(YieldFunction::VonMises { k })
}

pub fn tresca(k: f64) -> Result<YieldFunction> {
    check_level("k", k)?;
    Ok(YieldFunction::Tresca { k })
}

pub fn invariant_polynomial(terms: Vec<PolyTerm>, level: f64) -> Result<YieldFunction> {
    if terms.is_empty() {
        return Err(Error::invalid("terms", "at least one term is required"));
    }
    if terms.iter().any(|t| !t.coeff.is_finite()) || !level.is_finite() {
        return Err(Error::invalid(
            "terms",
            "coefficients and level must be finite",
        ));
    }
    Ok(YieldFunction::InvariantPolynomial { terms, level })
}

/// Half-space constraint; the direction is replaced by its deviator.
pub fn linear(direction: SymTensor3, level: f64) -> Result<YieldFunction> {
    let direction = direction.deviator();
    if !direction.is_finite() || direction.norm() <= 1e-14 {
        return Err(Error::invalid(
            "direction",
            "deviatoric part must be nonzero",
        ));
    }
    if !level.is_finite() {
        return Err(Error::invalid("k", "must be finite"));
    }
    Ok(YieldFunction::Linear { direction, level })
}

fn powi(x: f64, n: u32) -> f64 {
    x.powi(n as i32)
}

/// `(λ1 - λ3) / 2`.
pub fn tresca_value(s: SymTensor3) -> f64 {
    let d = spectral_with_tol(s, DEFAULT_EIG_TOL);
    0.5 * (d.eigenvalues[0] - d.eigenvalues[2])
}

/// `(v1 ⊗ v1 - v3 ⊗ v3) / 2`, defined only for distinct eigenvalues.
pub fn tresca_gradient(s: SymTensor3, eig_tol: f64) -> Result<SymTensor3> {
    let d = spectral_with_tol(s, eig_tol);
    if d.multiplicity != Multiplicity::Distinct {
        return Err(Error::NotDifferentiable);
    }
    Ok((outer(d.eigenvectors[0]) - outer(d.eigenvectors[2])) * 0.5)
}

/// Sextic polynomial surrogate that vanishes on the Tresca surface but also
/// elsewhere. Diagnostic only; never used to define a domain.
pub fn tresca_polynomial_surrogate(s: SymTensor3, k: f64) -> f64 {
    let inv = invariants(s);
    let (j2, j3) = (inv.j2, inv.j3);
    let k2 = k * k;
    4.0 * j2.powi(3) - 27.0 * j3 * j3 - 36.0 * k2 * j2 * j2 + 96.0 * k2 * k2 * j2
        - 64.0 * k2.powi(3)
}

impl YieldFunction {
    /// Value in the internal form compared against [`level`](Self::level).
    pub fn value(&self, s: SymTensor3) -> f64 {
        match self {
            YieldFunction::VonMises { .. } => tensor::j2(s),
            YieldFunction::Tresca { .. } => tresca_value(s),
            YieldFunction::InvariantPolynomial { terms, .. } => {
                let inv = invariants(s);
                terms
                    .iter()
                    .map(|t| t.coeff * powi(inv.j2, t.j2_power) * powi(inv.j3, t.j3_power))
                    .sum()
            }
            YieldFunction::Linear { direction, .. } => s.dot(*direction),
        }
    }

    pub fn level(&self) -> f64 {
        match self {
            YieldFunction::VonMises { k } => k * k,
            YieldFunction::Tresca { k } => *k,
            YieldFunction::InvariantPolynomial { level, .. } => *level,
            YieldFunction::Linear { level, .. } => *level,
        }
    }

    /// Value in stress units (`sqrt(J2)` for Von Mises).
    pub fn reporting_value(&self, s: SymTensor3) -> f64 {
        match self {
            YieldFunction::VonMises { .. } => tensor::j2(s).sqrt(),
            _ => self.value(s),
        }
    }

    pub fn reporting_level(&self) -> f64 {
        match self {
            YieldFunction::VonMises { k } => *k,
            _ => self.level(),
        }
    }

    /// `reporting_value - reporting_level`; positive means outside.
    pub fn violation(&self, s: SymTensor3) -> f64 {
        self.reporting_value(s) - self.reporting_level()
    }

    pub fn smoothness(&self) -> Smoothness {
        match self {
            YieldFunction::Tresca { .. } => Smoothness::OffDegenerateSet,
            _ => Smoothness::Everywhere,
        }
    }

    pub fn is_tresca(&self) -> bool {
        matches!(self, YieldFunction::Tresca { .. })
    }

    /// Gradient of the internal form.
    pub fn gradient(&self, s: SymTensor3, eig_tol: f64) -> Result<SymTensor3> {
        match self {
            YieldFunction::VonMises { .. } => Ok(grad_j2(s)),
            YieldFunction::Tresca { .. } => tresca_gradient(s, eig_tol),
            YieldFunction::InvariantPolynomial { terms, .. } => {
                let inv = invariants(s);
                let (mut d_j2, mut d_j3) = (0.0, 0.0);
                for t in terms {
                    if t.j2_power > 0 {
                        d_j2 += t.coeff
                            * f64::from(t.j2_power)
                            * powi(inv.j2, t.j2_power - 1)
                            * powi(inv.j3, t.j3_power);
                    }
                    if t.j3_power > 0 {
                        d_j3 += t.coeff
                            * f64::from(t.j3_power)
                            * powi(inv.j2, t.j2_power)
                            * powi(inv.j3, t.j3_power - 1);
                    }
                }
                Ok(grad_j2(s) * d_j2 + grad_j3(s) * d_j3)
            }
            YieldFunction::Linear { direction, .. } => Ok(*direction),
        }
    }
}

/// Indices (zero-based) of the constraints active at a stress.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SaturationSet {
    pub indices: Vec<usize>,
}

impl SaturationSet {
    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.indices.contains(&i)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct YieldDomain {
    functions: Vec<YieldFunction>,
    saturation_tol: f64,
    eig_tol: f64,
}

impl YieldDomain {
    /// Builds a domain and checks that the hydrostatic axis is strictly inside.
    pub fn new(functions: Vec<YieldFunction>) -> Result<Self> {
        if functions.is_empty() {
            return Err(Error::invalid(
                "functions",
                "at least one yield function is required",
            ));
        }
        for (index, f) in functions.iter().enumerate() {
            if f.value(SymTensor3::ZERO) >= f.level() {
                return Err(Error::SlaterViolation { index });
            }
        }
        Ok(Self {
            functions,
            saturation_tol: DEFAULT_SATURATION_TOL,
            eig_tol: DEFAULT_EIG_TOL,
        })
    }

    pub fn von_mises(k: f64) -> Result<Self> {
        Self::new(vec![von_mises(k)?])
    }

    pub fn tresca(k: f64) -> Result<Self> {
        Self::new(vec![tresca(k)?])
    }

    pub fn with_saturation_tol(mut self, tol: f64) -> Self {
        self.saturation_tol = tol;
        self
    }

    pub fn with_eig_tol(mut self, tol: f64) -> Self {
        self.eig_tol = tol;
        self
    }

    pub fn functions(&self) -> &[YieldFunction] {
        &self.functions
    }

    pub fn saturation_tol(&self) -> f64 {
        self.saturation_tol
    }

    pub fn eig_tol(&self) -> f64 {
        self.eig_tol
    }

    /// `max_i (f_i(σ) - k_i)` in stress units; non-positive inside.
    pub fn membership(&self, s: SymTensor3) -> f64 {
        self.functions
            .iter()
            .map(|f| f.violation(s))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Saturated constraints; errors if `σ` lies outside beyond tolerance.
    pub fn saturation(&self, s: SymTensor3) -> Result<SaturationSet> {
        self.saturation_allowing(s, 0.0)
    }

    /// Like [`saturation`](Self::saturation) but accepts stresses up to
    /// `allowance` (stress units) outside, counting them as saturated.
    pub fn saturation_allowing(&self, s: SymTensor3, allowance: f64) -> Result<SaturationSet> {
        let mut indices = Vec::new();
        let mut worst: Option<f64> = None;
        for (i, f) in self.functions.iter().enumerate() {
            let level = f.level();
            let band = self.saturation_tol * level.abs().max(1.0);
            let gap = f.value(s) - level;
            if gap > band {
                let v = f.violation(s);
                if v > allowance {
                    worst = Some(worst.map_or(v, |w: f64| w.max(v)));
                    continue;
                }
                indices.push(i);
            } else if gap >= -band {
                indices.push(i);
            }
        }
        match worst {
            Some(violation) => Err(Error::MembershipViolation { violation }),
            None => Ok(SaturationSet { indices }),
        }
    }

    /// Pulls an outside stress back onto the surface by scaling its deviator
    /// towards the hydrostatic axis. Inside stresses are returned unchanged.
    pub fn return_to_surface(&self, s: SymTensor3) -> SymTensor3 {
        if self.membership(s) <= 0.0 {
            return s;
        }
        let mean = SymTensor3::hydrostatic(s.trace() / 3.0);
        let dev = s.deviator();
        if let [single] = self.functions.as_slice() {
            let factor = match single {
                YieldFunction::VonMises { k } => Some(k / tensor::j2(s).sqrt()),
                YieldFunction::Tresca { k } => Some(k / tresca_value(s)),
                YieldFunction::Linear { level, direction } if *level > 0.0 => {
                    Some(level / s.dot(*direction))
                }
                _ => None,
            };
            if let Some(factor) = factor {
                return mean + dev * factor;
            }
        }
        // Membership along the ray is convex with a negative value at the
        // axis, so the crossing is unique.
        let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.membership(mean + dev * mid) <= 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= f64::EPSILON * hi {
                break;
            }
        }
        mean + dev * lo
    }
}
