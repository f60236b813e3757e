//! Independent inverse Laplace transform of `s K~(rho, s)` along a Bromwich
//! line, used to certify the residue-plus-branch-cut assembly.
//!
//! The slowly decaying `1/s` part is inverted analytically (unit step); only
//! `Q(s) = 1/s - s K~ = Z theta / (s (s^2 + Z theta))`, which decays like
//! `|s|^-3`, is integrated numerically by the trapezoid rule on
//! `s = s0 + i p`, `|p| <= p_max`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::charfun::{theta_of_rho, zener_ratio_unchecked};
use crate::error::{Error, Result};
use crate::params::{validate_model, ModelParams};

/// Smallest time the oracle accepts; below it the `e^{s0 t}`-weighted
/// truncation error of the line integral is no longer controlled.
pub const MIN_TIME: f64 = 1e-3;
const MAX_DOUBLINGS: usize = 6;
const CHUNK: usize = 4096;

/// Line abscissa, truncation and initial number of nodes per half-line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BromwichConfig {
    pub s0: f64,
    pub p_max: f64,
    pub n_nodes: usize,
    /// Accepted difference between consecutive node doublings.
    pub rel_tol: f64,
    /// Accepted truncation-tail estimate.
    pub abs_tol: f64,
}

impl Default for BromwichConfig {
    fn default() -> Self {
        BromwichConfig {
            s0: 1.0,
            p_max: 1e4,
            n_nodes: 200_000,
            rel_tol: 1e-7,
            abs_tol: 1e-8,
        }
    }
}

impl BromwichConfig {
    pub fn validate(&self, t: f64) -> Result<()> {
        if !(self.s0 > 0.0 && self.s0.is_finite()) {
            return Err(Error::invalid(format!("s0 must be positive, got {}", self.s0)));
        }
        let needed = 100.0 * (1.0f64).max(1.0 / t);
        if !(self.p_max >= needed && self.p_max.is_finite()) {
            return Err(Error::invalid(format!(
                "p_max {} below 100 max(1, 1/t) = {needed}",
                self.p_max
            )));
        }
        if self.n_nodes < 16 {
            return Err(Error::invalid(format!("n_nodes {} below 16", self.n_nodes)));
        }
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0) {
            return Err(Error::invalid("oracle tolerances must be positive"));
        }
        Ok(())
    }
}

/// Oracle value with its diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BromwichEstimate {
    /// Richardson-extrapolated `S(rho, t)`.
    pub value: f64,
    /// Imaginary part of the line integral relative to `max(1, |value|)`.
    pub imag_relative: f64,
    /// Difference between the last two node doublings.
    pub refinement_delta: f64,
    /// Estimated contribution of `|p| > p_max`.
    pub tail_estimate: f64,
    /// Nodes per half-line of the finest rule.
    pub nodes: usize,
}

/// `S(rho, t)` by numerical Laplace inversion.
pub fn bromwich_invert(rho: f64, t: f64, p: &ModelParams, c: &BromwichConfig) -> Result<f64> {
    Ok(bromwich_invert_detailed(rho, t, p, c)?.value)
}

/// [`bromwich_invert`] with diagnostics.
pub fn bromwich_invert_detailed(rho: f64, t: f64, p: &ModelParams, c: &BromwichConfig) -> Result<BromwichEstimate> {
    let p = validate_model(*p)?;
    if !(rho >= 0.0 && rho.is_finite()) {
        return Err(Error::Domain(format!("rho must be finite and >= 0, got {rho}")));
    }
    if !(t >= MIN_TIME && t.is_finite()) {
        return Err(Error::Domain(format!("oracle needs t >= {MIN_TIME}, got {t}")));
    }
    c.validate(t)?;
    let theta = theta_of_rho(rho, p.beta);
    if theta == 0.0 {
        // s K~ = 1/s exactly
        return Ok(BromwichEstimate {
            value: 1.0,
            imag_relative: 0.0,
            refinement_delta: 0.0,
            tail_estimate: 0.0,
            nodes: 0,
        });
    }
    let q_hat = move |s: Complex64| {
        let zt = zener_ratio_unchecked(s, p.alpha, p.tau) * theta;
        zt / (s * (s * s + zt))
    };

    let scale = (c.s0 * t).exp() / (2.0 * std::f64::consts::PI);
    let tail_estimate = 2.0 * scale * q_hat(Complex64::new(c.s0, c.p_max)).norm() * 2.0 / t;
    if tail_estimate > c.abs_tol {
        return Err(Error::NonConvergence {
            what: "Bromwich truncation tail",
            estimate: tail_estimate,
        });
    }

    let line = |n: usize| -> Complex64 {
        let h = c.p_max / n as f64;
        let term = |k: i64| {
            let pk = k as f64 * h;
            let w = if k.unsigned_abs() as usize == n { 0.5 } else { 1.0 };
            q_hat(Complex64::new(c.s0, pk)) * Complex64::new(0.0, pk * t).exp() * w
        };
        let ks: Vec<i64> = (-(n as i64)..=n as i64).collect();
        let partial: Vec<Complex64> = ks
            .par_chunks(CHUNK)
            .map(|chunk| chunk.iter().map(|&k| term(k)).sum())
            .collect();
        partial.iter().sum::<Complex64>() * h * scale
    };

    let mut n = c.n_nodes;
    let mut coarse = line(n);
    for _ in 0..MAX_DOUBLINGS {
        let fine = line(2 * n);
        n *= 2;
        let delta = (fine - coarse).norm();
        let value = fine.re + (fine.re - coarse.re) / 3.0;
        let size = 1.0f64.max((1.0 - value).abs());
        if delta <= c.rel_tol * size {
            let imag_relative = fine.im.abs() / size;
            if imag_relative > 1e-6 {
                return Err(Error::NonConvergence {
                    what: "Bromwich imaginary residue",
                    estimate: imag_relative,
                });
            }
            return Ok(BromwichEstimate {
                value: 1.0 - value,
                imag_relative,
                refinement_delta: delta,
                tail_estimate,
                nodes: n,
            });
        }
        coarse = fine;
    }
    Err(Error::NonConvergence {
        what: "Bromwich node doubling",
        estimate: (coarse.re).abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig() -> ModelParams {
        ModelParams::new(0.25, 0.45, 0.1, 0.01).unwrap()
    }

    #[test]
    fn unit_step_cases() {
        let c = BromwichConfig::default();
        assert_eq!(bromwich_invert(0.0, 1.0, &fig(), &c).unwrap(), 1.0);
        let flat = ModelParams::new(0.25, 0.0, 0.1, 0.01).unwrap();
        assert_eq!(bromwich_invert(3.0, 2.0, &flat, &c).unwrap(), 1.0);
    }

    #[test]
    fn matches_extended_precision_fixture() {
        let c = BromwichConfig::default();
        for (rho, t, expected) in [
            (1.0, 1.0, 0.4272906166288872),
            (2.0, 2.0, -0.6567373763482165),
            (0.5, 0.5, 0.9365180005856535),
        ] {
            let e = bromwich_invert_detailed(rho, t, &fig(), &c).unwrap();
            assert!((e.value - expected).abs() < 1e-7, "{rho} {t}: {}", e.value);
            assert!(e.imag_relative < 1e-10);
        }
    }

    #[test]
    fn abscissa_independence() {
        let values: Vec<f64> = [0.5, 1.0, 2.0]
            .iter()
            .map(|&s0| {
                let c = BromwichConfig { s0, ..Default::default() };
                bromwich_invert(1.0, 1.0, &fig(), &c).unwrap()
            })
            .collect();
        for v in &values {
            assert!((v - values[0]).abs() < 1e-7 * values[0].abs());
        }
    }

    #[test]
    fn guards() {
        let c = BromwichConfig::default();
        assert!(matches!(bromwich_invert(1.0, 1e-4, &fig(), &c), Err(Error::Domain(_))));
        let short = BromwichConfig { p_max: 50.0, ..c };
        assert!(bromwich_invert(1.0, 1.0, &fig(), &short).is_err());
    }
}
