//! Model parameters and the map from physical material constants to the
//! dimensionless set used everywhere else in the crate.
//!
//! With `L = (tau_eps^(2/alpha) * density / modulus)^(1/(1+beta))` and
//! `T = tau_eps^(1/alpha)`, the dimensionless variables are `x/L`, `t/T`,
//! `u/L` and `sigma / (modulus * L^(1-beta))`.

use serde::{Deserialize, Serialize};

use crate::error::ValidationError;

/// Dimensionless parameter set `(alpha, beta, tau, epsilon)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Order of the time-fractional Caputo operator, in `[0, 1)`.
    pub alpha: f64,
    /// Order of the symmetrized space derivative, in `[0, 1]`.
    pub beta: f64,
    /// Ratio of relaxation times `tau_sigma / tau_eps`, in `(0, 1)`.
    pub tau: f64,
    /// Width of the Gaussian regularization, in `(0, 1]`.
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
}

fn default_epsilon() -> f64 {
    ModelParams::DEFAULT_EPSILON
}

impl ModelParams {
    pub const DEFAULT_EPSILON: f64 = 0.01;

    pub fn new(alpha: f64, beta: f64, tau: f64, epsilon: f64) -> Result<Self, ValidationError> {
        validate_model(ModelParams {
            alpha,
            beta,
            tau,
            epsilon,
        })
    }

    /// The spatial symbol `rho^(1+beta) * sin(beta*pi/2)` at this `beta`.
    pub fn theta(&self, rho: f64) -> f64 {
        crate::charfun::theta_of_rho(rho, self.beta)
    }
}

/// Checks every range invariant of [`ModelParams`] and returns the input
/// unchanged when they hold.
pub fn validate_model(p: ModelParams) -> Result<ModelParams, ValidationError> {
    if !(p.alpha >= 0.0 && p.alpha < 1.0) {
        return Err(ValidationError::out_of_range("alpha", p.alpha, "[0, 1)"));
    }
    if !(p.beta >= 0.0 && p.beta <= 1.0) {
        return Err(ValidationError::out_of_range("beta", p.beta, "[0, 1]"));
    }
    if !(p.tau > 0.0 && p.tau < 1.0) {
        return Err(ValidationError::out_of_range("tau", p.tau, "(0, 1)"));
    }
    if !(p.epsilon > 0.0 && p.epsilon <= 1.0) {
        return Err(ValidationError::out_of_range("epsilon", p.epsilon, "(0, 1]"));
    }
    Ok(p)
}

/// Material constants in SI-consistent units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParams {
    /// Mass density.
    pub density: f64,
    /// Generalized Young modulus, Pa m^(beta - 1).
    pub modulus: f64,
    /// Relaxation time of the stress, s^alpha.
    pub tau_sigma: f64,
    /// Relaxation time of the strain, s^alpha.
    pub tau_eps: f64,
    pub alpha: f64,
    pub beta: f64,
}

impl PhysicalParams {
    pub fn validate(&self) -> Result<(), ValidationError> {
        let positive = [
            ("density", self.density),
            ("modulus", self.modulus),
            ("tau_sigma", self.tau_sigma),
            ("tau_eps", self.tau_eps),
        ];
        for (field, value) in positive {
            if !(value > 0.0 && value.is_finite()) {
                return Err(ValidationError::out_of_range(field, value, "(0, inf)"));
            }
        }
        if self.tau_sigma >= self.tau_eps {
            return Err(ValidationError::RelaxationOrder {
                tau_sigma: self.tau_sigma,
                tau_eps: self.tau_eps,
            });
        }
        if !(self.alpha >= 0.0 && self.alpha < 1.0) {
            return Err(ValidationError::out_of_range("alpha", self.alpha, "[0, 1)"));
        }
        if !(self.beta >= 0.0 && self.beta <= 1.0) {
            return Err(ValidationError::out_of_range("beta", self.beta, "[0, 1]"));
        }
        Ok(())
    }
}

/// Reference magnitudes: a physical quantity equals its dimensionless
/// counterpart times the matching scale.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scales {
    pub length_scale: f64,
    pub time_scale: f64,
    pub displacement_scale: f64,
    pub stress_scale: f64,
}

impl Scales {
    pub fn x_to_physical(&self, x: f64) -> f64 {
        x * self.length_scale
    }

    pub fn x_to_dimensionless(&self, x: f64) -> f64 {
        x / self.length_scale
    }

    pub fn t_to_physical(&self, t: f64) -> f64 {
        t * self.time_scale
    }

    pub fn t_to_dimensionless(&self, t: f64) -> f64 {
        t / self.time_scale
    }

    pub fn u_to_physical(&self, u: f64) -> f64 {
        u * self.displacement_scale
    }

    pub fn stress_to_physical(&self, sigma: f64) -> f64 {
        sigma * self.stress_scale
    }

    /// Scale of the initial velocity `v0`.
    pub fn velocity_scale(&self) -> f64 {
        self.displacement_scale / self.time_scale
    }
}

/// Maps material constants to `(ModelParams, Scales)`.
pub fn nondimensionalize(
    p: &PhysicalParams,
    epsilon: f64,
) -> Result<(ModelParams, Scales), ValidationError> {
    p.validate()?;
    if p.alpha == 0.0 {
        return Err(ValidationError::TimeScaleUndefined);
    }
    let model = validate_model(ModelParams {
        alpha: p.alpha,
        beta: p.beta,
        tau: p.tau_sigma / p.tau_eps,
        epsilon,
    })?;

    // work in logs so extreme tau_eps^(2/alpha) does not overflow
    let ln_base = (2.0 / p.alpha) * p.tau_eps.ln() + p.density.ln() - p.modulus.ln();
    let length_scale = (ln_base / (1.0 + p.beta)).exp();
    let time_scale = (p.tau_eps.ln() / p.alpha).exp();
    let stress_scale = p.modulus * (ln_base * (1.0 - p.beta) / (1.0 + p.beta)).exp();
    Ok((
        model,
        Scales {
            length_scale,
            time_scale,
            displacement_scale: length_scale,
            stress_scale,
        },
    ))
}
