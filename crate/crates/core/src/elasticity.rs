//! Isotropic linear elasticity.

use crate::error::{Error, Result};
use crate::tensor::SymTensor3;

/// Isotropic moduli, stored in both the Lamé and the Young/Poisson form.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ElasticModuli {
    lambda: f64,
    mu: f64,
    young: f64,
    poisson: f64,
    density: f64,
}

fn positive(field: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(
            field,
            format!("must be positive and finite, got {value}"),
        ))
    }
}

impl ElasticModuli {
    pub fn from_lame(lambda: f64, mu: f64, density: f64) -> Result<Self> {
        positive("lambda", lambda)?;
        positive("mu", mu)?;
        positive("rho", density)?;
        Ok(Self {
            lambda,
            mu,
            young: mu * (3.0 * lambda + 2.0 * mu) / (lambda + mu),
            poisson: lambda / (2.0 * (lambda + mu)),
            density,
        })
    }

    pub fn from_young(young: f64, poisson: f64, density: f64) -> Result<Self> {
        positive("young", young)?;
        if !(poisson > 0.0 && poisson < 0.5) {
            return Err(Error::invalid(
                "poisson",
                format!("must lie in (0, 0.5), got {poisson}"),
            ));
        }
        positive("rho", density)?;
        Ok(Self {
            lambda: young * poisson / ((1.0 + poisson) * (1.0 - 2.0 * poisson)),
            mu: young / (2.0 * (1.0 + poisson)),
            young,
            poisson,
            density,
        })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn young(&self) -> f64 {
        self.young
    }

    pub fn poisson(&self) -> f64 {
        self.poisson
    }

    pub fn density(&self) -> f64 {
        self.density
    }

    /// Longitudinal (P-wave) speed `sqrt((λ + 2μ) / ρ)`.
    pub fn p_wave_speed(&self) -> f64 {
        ((self.lambda + 2.0 * self.mu) / self.density).sqrt()
    }

    pub fn hooke(&self, strain: SymTensor3) -> SymTensor3 {
        hooke(self, strain)
    }

    pub fn hooke_inverse(&self, stress: SymTensor3) -> SymTensor3 {
        hooke_inverse(self, stress)
    }
}

/// `2μ τ + λ tr(τ) I`.
pub fn hooke(m: &ElasticModuli, strain: SymTensor3) -> SymTensor3 {
    strain * (2.0 * m.mu) + SymTensor3::hydrostatic(m.lambda * strain.trace())
}

/// Compliance in Lamé form.
pub fn hooke_inverse(m: &ElasticModuli, stress: SymTensor3) -> SymTensor3 {
    let (l, mu) = (m.lambda, m.mu);
    let c = -l / (2.0 * mu * (3.0 * l + 2.0 * mu));
    SymTensor3::hydrostatic(c * stress.trace()) + stress / (2.0 * mu)
}

/// Compliance in Young/Poisson form.
pub fn hooke_inverse_young(m: &ElasticModuli, stress: SymTensor3) -> SymTensor3 {
    SymTensor3::hydrostatic(-m.poisson / m.young * stress.trace())
        + stress * ((1.0 + m.poisson) / m.young)
}
