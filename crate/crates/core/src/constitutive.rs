//! Rate-form elastic perfectly plastic law and a material-point driver.
//!
//! At a stress `σ` in the yield domain, a strain rate splits as
//! `ε̇ = P_T(ε̇) + P_N(ε̇)` into elastic and plastic parts, and the stress rate is
//! `𝓗(σ, ε̇) = H(ε̇) - 2μ P_N(ε̇)`, which coincides with `P_T(H(ε̇))`.

use crate::cone::{project, project_allowing, Branch};
use crate::elasticity::ElasticModuli;
use crate::error::{Error, Result};
use crate::tensor::SymTensor3;
use crate::yield_surface::{YieldDomain, DEFAULT_SATURATION_TOL};

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct MaterialState {
    pub sigma: SymTensor3,
    pub eps_e: SymTensor3,
    pub eps_p: SymTensor3,
    pub t: f64,
}

impl MaterialState {
    /// State at rest with elastic strain consistent with `sigma`.
    pub fn from_stress(moduli: &ElasticModuli, sigma: SymTensor3, t: f64) -> Self {
        Self {
            sigma,
            eps_e: moduli.hooke_inverse(sigma),
            eps_p: SymTensor3::ZERO,
            t,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct RateSplit {
    pub eps_e_rate: SymTensor3,
    pub eps_p_rate: SymTensor3,
    pub sigma_rate: SymTensor3,
}

impl RateSplit {
    /// `ε̇p : σ̇`, zero for an exact split.
    pub fn consistency(&self) -> f64 {
        self.eps_p_rate.dot(self.sigma_rate)
    }
}

pub fn rate_split(
    domain: &YieldDomain,
    moduli: &ElasticModuli,
    sigma: SymTensor3,
    eps_rate: SymTensor3,
) -> Result<RateSplit> {
    Ok(rate_split_allowing(domain, moduli, sigma, eps_rate, 0.0)?.0)
}

/// Rate split at a stress up to `allowance` outside the domain; also reports
/// the projection branch used.
pub fn rate_split_allowing(
    domain: &YieldDomain,
    moduli: &ElasticModuli,
    sigma: SymTensor3,
    eps_rate: SymTensor3,
    allowance: f64,
) -> Result<(RateSplit, Branch)> {
    let p = project_allowing(domain, sigma, eps_rate, allowance)?;
    let split = RateSplit {
        eps_e_rate: p.split.tangent,
        eps_p_rate: p.split.normal,
        sigma_rate: moduli.hooke(eps_rate) - p.split.normal * (2.0 * moduli.mu()),
    };
    Ok((split, p.branch))
}

/// `𝓗(σ, ε̇) = H(ε̇) - 2μ P_N(ε̇)`.
pub fn script_h(
    domain: &YieldDomain,
    moduli: &ElasticModuli,
    sigma: SymTensor3,
    eps_rate: SymTensor3,
) -> Result<SymTensor3> {
    Ok(rate_split(domain, moduli, sigma, eps_rate)?.sigma_rate)
}

/// Stress rate as the tangent-cone projection of the elastic trial rate,
/// `P_T(H(ε̇))`.
pub fn stress_rate_tangent_form(
    domain: &YieldDomain,
    moduli: &ElasticModuli,
    sigma: SymTensor3,
    eps_rate: SymTensor3,
) -> Result<SymTensor3> {
    Ok(project(domain, sigma, moduli.hooke(eps_rate))?
        .split
        .tangent)
}

/// `χ(t) = 1` for `t ≥ 0`, else 0.
pub fn heaviside(t: f64) -> f64 {
    if t >= 0.0 {
        1.0
    } else {
        0.0
    }
}

/// Von Mises closed form
/// `λ tr(ε̇) I + 2μ ε̇ - (μ/k²) max(0, ε̇ : s) χ(|s|² - 2k²) s`, `s = dev σ`.
///
/// The switch argument is shifted by the saturation band so that stresses the
/// domain classifies as saturated also switch on here.
pub fn von_mises_script_h(
    moduli: &ElasticModuli,
    k: f64,
    sigma: SymTensor3,
    eps_rate: SymTensor3,
) -> SymTensor3 {
    let dev = sigma.deviator();
    let k2 = k * k;
    let band = 2.0 * DEFAULT_SATURATION_TOL * k2.max(1.0);
    let switch = heaviside(dev.norm_squared() - 2.0 * k2 + band);
    moduli.hooke(eps_rate) - dev * (moduli.mu() / k2 * eps_rate.dot(dev).max(0.0) * switch)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Interpolation {
    PiecewiseConstant,
    PiecewiseLinear,
}

/// Strain-rate history given by knots `(t_i, ε̇_i)` with increasing times.
#[derive(Clone, Debug, PartialEq)]
pub struct StrainPath {
    knots: Vec<(f64, SymTensor3)>,
    interpolation: Interpolation,
}

impl StrainPath {
    pub fn new(knots: Vec<(f64, SymTensor3)>, interpolation: Interpolation) -> Result<Self> {
        if knots.len() < 2 {
            return Err(Error::invalid("knots", "at least two knots are required"));
        }
        if knots
            .windows(2)
            .any(|w| w[1].0.partial_cmp(&w[0].0) != Some(std::cmp::Ordering::Greater))
        {
            return Err(Error::invalid("knots", "times must be strictly increasing"));
        }
        if knots.iter().any(|(t, r)| !t.is_finite() || !r.is_finite()) {
            return Err(Error::invalid("knots", "times and rates must be finite"));
        }
        Ok(Self {
            knots,
            interpolation,
        })
    }

    /// Constant rate over `[0, t_end]`.
    pub fn constant(rate: SymTensor3, t_end: f64) -> Result<Self> {
        Self::new(
            vec![(0.0, rate), (t_end, rate)],
            Interpolation::PiecewiseConstant,
        )
    }

    pub fn start(&self) -> f64 {
        self.knots[0].0
    }

    pub fn end(&self) -> f64 {
        self.knots[self.knots.len() - 1].0
    }

    pub fn knots(&self) -> &[(f64, SymTensor3)] {
        &self.knots
    }

    /// Rate at time `t`. Piecewise-constant paths hold `ε̇_i` on `[t_i, t_{i+1})`;
    /// outside the knot range the nearest end value is used.
    pub fn rate_at(&self, t: f64) -> SymTensor3 {
        let k = &self.knots;
        if t <= k[0].0 {
            return k[0].1;
        }
        if t >= self.end() {
            return k[k.len() - 1].1;
        }
        let i = k.partition_point(|(ti, _)| *ti <= t) - 1;
        let (t0, r0) = k[i];
        let (t1, r1) = k[i + 1];
        match self.interpolation {
            Interpolation::PiecewiseConstant => r0,
            Interpolation::PiecewiseLinear => r0 + (r1 - r0) * ((t - t0) / (t1 - t0)),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DriftPolicy {
    None,
    /// Scale the deviator back onto the yield surface after each step.
    RadialReturn,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DriverConfig {
    pub dt: f64,
    pub drift: DriftPolicy,
    /// Admissible membership after correction, in stress units.
    pub drift_tol: f64,
}

impl DriverConfig {
    pub fn new(dt: f64, drift: DriftPolicy) -> Self {
        Self {
            dt,
            drift,
            drift_tol: 1e-9,
        }
    }

    /// Membership beyond which integration aborts.
    pub fn hard_limit(&self) -> f64 {
        100.0 * self.drift_tol
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepRecord {
    /// State after the step.
    pub state: MaterialState,
    /// Split evaluated at the start of the step.
    pub split: RateSplit,
    pub branch: Branch,
    /// Most critical yield-function value (stress units) after the step.
    pub f_value: f64,
    /// `ε̇p : σ̇` of the split.
    pub consistency_residual: f64,
    /// Membership of the explicit update before any drift correction.
    pub trial_violation: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub initial: MaterialState,
    pub steps: Vec<StepRecord>,
}

impl Trajectory {
    pub fn final_state(&self) -> MaterialState {
        self.steps.last().map_or(self.initial, |s| s.state)
    }

    /// Largest pre-correction violation over the run.
    pub fn peak_trial_violation(&self) -> f64 {
        self.steps
            .iter()
            .map(|s| s.trial_violation)
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Reporting value of the constraint closest to (or furthest beyond) its level.
pub fn critical_yield_value(domain: &YieldDomain, sigma: SymTensor3) -> f64 {
    domain
        .functions()
        .iter()
        .max_by(|a, b| a.violation(sigma).total_cmp(&b.violation(sigma)))
        .map_or(0.0, |f| f.reporting_value(sigma))
}

/// One explicit step `σ ← σ + dt 𝓗(σ, ε̇)` followed by drift correction.
pub fn advance(
    domain: &YieldDomain,
    moduli: &ElasticModuli,
    state: &MaterialState,
    eps_rate: SymTensor3,
    config: &DriverConfig,
) -> Result<(MaterialState, RateSplit, Branch, f64)> {
    let dt = config.dt;
    let (split, branch) =
        rate_split_allowing(domain, moduli, state.sigma, eps_rate, config.hard_limit())?;
    let mut next = MaterialState {
        sigma: state.sigma + split.sigma_rate * dt,
        eps_e: state.eps_e + split.eps_e_rate * dt,
        eps_p: state.eps_p + split.eps_p_rate * dt,
        t: state.t + dt,
    };
    let trial_violation = domain.membership(next.sigma);
    if config.drift == DriftPolicy::RadialReturn && trial_violation > 0.0 {
        let corrected = domain.return_to_surface(next.sigma);
        // The removed stress is converted into plastic strain so that the
        // total strain is unchanged.
        let shift = moduli.hooke_inverse(corrected - next.sigma);
        next.sigma = corrected;
        next.eps_e += shift;
        next.eps_p -= shift;
    }
    Ok((next, split, branch, trial_violation))
}

pub fn integrate_path(
    domain: &YieldDomain,
    moduli: &ElasticModuli,
    initial: MaterialState,
    path: &StrainPath,
    config: &DriverConfig,
) -> Result<Trajectory> {
    if !(config.dt > 0.0 && config.dt.is_finite()) {
        return Err(Error::invalid("dt", "must be positive"));
    }
    let start_violation = domain.membership(initial.sigma);
    if start_violation > config.drift_tol {
        return Err(Error::MembershipViolation {
            violation: start_violation,
        });
    }
    let span = path.end() - initial.t;
    if span < 0.0 {
        return Err(Error::invalid(
            "t",
            "initial time lies after the end of the path",
        ));
    }
    let n_steps = (span / config.dt).round() as usize;
    let mut steps = Vec::with_capacity(n_steps);
    let mut state = initial;
    for step in 0..n_steps {
        let t = initial.t + step as f64 * config.dt;
        let rate = path.rate_at(t);
        let (mut next, split, branch, trial_violation) =
            advance(domain, moduli, &state, rate, config).map_err(|e| match e {
                Error::MembershipViolation { violation } => Error::IntegrationFailure {
                    step,
                    reason: format!("stress drifted {violation:e} outside the yield domain"),
                },
                other => other,
            })?;
        next.t = initial.t + (step + 1) as f64 * config.dt;
        let after = domain.membership(next.sigma);
        if after > config.hard_limit() {
            return Err(Error::IntegrationFailure {
                step,
                reason: format!(
                    "membership {after:e} exceeds hard limit {:e}",
                    config.hard_limit()
                ),
            });
        }
        steps.push(StepRecord {
            state: next,
            split,
            branch,
            f_value: critical_yield_value(domain, next.sigma),
            consistency_residual: split.consistency(),
            trial_violation,
        });
        state = next;
    }
    Ok(Trajectory { initial, steps })
}
