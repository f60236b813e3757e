//! The characteristic function `Psi(s) = s^2 + theta (1 + s^a) / (1 + tau s^a)`
//! and its ingredients.
//!
//! `s^a` is always the principal branch, so every function here is analytic
//! in the plane cut along `(-inf, 0]`. Values on the two banks of the cut are
//! provided separately by [`branch_values`].

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, ValidationError};

/// Parameters of `Psi`: the time order, the relaxation ratio and the value
/// of the spatial symbol.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CharParams {
    pub alpha: f64,
    pub tau: f64,
    pub theta: f64,
}

impl CharParams {
    pub fn new(alpha: f64, tau: f64, theta: f64) -> Result<Self> {
        let p = CharParams { alpha, tau, theta };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha >= 0.0 && self.alpha < 1.0) {
            return Err(ValidationError::out_of_range("alpha", self.alpha, "[0, 1)").into());
        }
        if !(self.tau > 0.0 && self.tau < 1.0) {
            return Err(ValidationError::out_of_range("tau", self.tau, "(0, 1)").into());
        }
        if !(self.theta > 0.0 && self.theta.is_finite()) {
            return Err(ValidationError::out_of_range("theta", self.theta, "(0, inf)").into());
        }
        Ok(())
    }

    /// `Psi(s)`.
    pub fn psi(&self, s: Complex64) -> Result<Complex64> {
        check_off_cut(s)?;
        Ok(self.psi_unchecked(s))
    }

    /// `Psi'(s) = 2s + theta a (1 - tau) s^(a-1) / (1 + tau s^a)^2`.
    pub fn psi_prime(&self, s: Complex64) -> Result<Complex64> {
        check_off_cut(s)?;
        Ok(self.psi_prime_unchecked(s))
    }

    pub(crate) fn psi_unchecked(&self, s: Complex64) -> Complex64 {
        s * s + zener_ratio_unchecked(s, self.alpha, self.tau) * self.theta
    }

    pub(crate) fn psi_prime_unchecked(&self, s: Complex64) -> Complex64 {
        if self.alpha == 0.0 {
            return 2.0 * s;
        }
        let sa = s.powf(self.alpha);
        let d = 1.0 + self.tau * sa;
        2.0 * s + sa / s * (self.alpha * (1.0 - self.tau) * self.theta) / (d * d)
    }
}

/// Rejects points on the closed negative real axis, where the principal
/// power is discontinuous.
pub(crate) fn check_off_cut(s: Complex64) -> Result<()> {
    if !(s.re.is_finite() && s.im.is_finite()) {
        return Err(Error::Domain(format!("non-finite argument {s}")));
    }
    if s.im == 0.0 && s.re <= 0.0 {
        return Err(Error::BranchCut(s));
    }
    Ok(())
}

/// `(1 + s^a) / (1 + tau s^a)` off the cut.
pub fn zener_ratio(s: Complex64, alpha: f64, tau: f64) -> Result<Complex64> {
    check_off_cut(s)?;
    Ok(zener_ratio_unchecked(s, alpha, tau))
}

pub(crate) fn zener_ratio_unchecked(s: Complex64, alpha: f64, tau: f64) -> Complex64 {
    if alpha == 0.0 {
        return Complex64::new(2.0 / (1.0 + tau), 0.0);
    }
    let sa = s.powf(alpha);
    (1.0 + sa) / (1.0 + tau * sa)
}

/// Limits of [`zener_ratio`] on the upper and lower banks of the cut at
/// `s = -q`: `(1 + q^a e^{+-i a pi}) / (1 + tau q^a e^{+-i a pi})`.
pub fn branch_values(q: f64, alpha: f64, tau: f64) -> Result<(Complex64, Complex64)> {
    if !(q > 0.0 && q.is_finite()) {
        return Err(Error::Domain(format!("branch_values needs q > 0, got {q}")));
    }
    let upper = branch_upper(q, alpha, tau);
    Ok((upper, upper.conj()))
}

#[inline]
pub(crate) fn branch_upper(q: f64, alpha: f64, tau: f64) -> Complex64 {
    let w = Complex64::from_polar(q.powf(alpha), alpha * PI);
    (1.0 + w) / (1.0 + tau * w)
}

/// Spatial symbol `rho^(1+beta) sin(beta pi / 2)`.
pub fn theta_of_rho(rho: f64, beta: f64) -> f64 {
    if rho == 0.0 || beta == 0.0 {
        return 0.0;
    }
    rho.powf(1.0 + beta) * (beta * PI / 2.0).sin()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn ratio_at_one_and_alpha_zero() {
        let v = zener_ratio(c(1.0, 0.0), 0.37, 0.2).unwrap();
        assert!((v - c(2.0 / 1.2, 0.0)).norm() < 1e-15);
        let v = zener_ratio(c(-3.0, 2.0), 0.0, 0.2).unwrap();
        assert!((v - c(2.0 / 1.2, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn ratio_at_i_matches_fixture() {
        // 50-digit polar evaluation
        let v = zener_ratio(c(0.0, 1.0), 0.25, 0.1).unwrap();
        assert!((v.re - 1.771267293092520241).abs() < 1e-15);
        assert!((v.im - 0.28826752134370235019).abs() < 1e-15);
    }

    #[test]
    fn cut_is_rejected() {
        assert!(matches!(zener_ratio(c(-1.0, 0.0), 0.5, 0.1), Err(Error::BranchCut(_))));
        assert!(matches!(zener_ratio(c(0.0, 0.0), 0.5, 0.1), Err(Error::BranchCut(_))));
        let p = CharParams::new(0.5, 0.1, 1.0).unwrap();
        assert!(p.psi(c(-2.0, 0.0)).is_err());
        assert!(p.psi_prime(c(-2.0, 0.0)).is_err());
        assert!(branch_values(0.0, 0.5, 0.1).is_err());
    }

    #[test]
    fn psi_zero_at_alpha_zero() {
        let (tau, theta) = (0.1, 1.0);
        let p = CharParams::new(0.0, tau, theta).unwrap();
        let s = c(0.0, (2.0 * theta / (1.0 + tau)).sqrt());
        assert!(p.psi(s).unwrap().norm() < 1e-15);
    }

    #[test]
    fn pure_quadratic_limit() {
        let p = CharParams {
            alpha: 0.4,
            tau: 0.3,
            theta: 0.0,
        };
        assert_eq!(p.psi_unchecked(c(1.0, 0.0)), c(1.0, 0.0));
        assert_eq!(p.psi_prime_unchecked(c(1.0, 0.0)), c(2.0, 0.0));
    }

    #[test]
    fn derivative_matches_central_difference() {
        let p = CharParams::new(0.25, 0.1, 1.0).unwrap();
        let s = c(-0.3, 0.9);
        let h = 1e-6;
        let fd = (p.psi(s + h).unwrap() - p.psi(s - h).unwrap()) / (2.0 * h);
        let d = p.psi_prime(s).unwrap();
        assert!((fd - d).norm() <= 1e-6 * d.norm());
    }

    #[test]
    fn branch_limits() {
        let (tau, alpha) = (0.1, 0.4);
        let (up, lo) = branch_values(1e-14, alpha, tau).unwrap();
        assert!((up - 1.0).norm() < 1e-5 && (lo - 1.0).norm() < 1e-5);
        let (up, lo) = branch_values(1e14, alpha, tau).unwrap();
        assert!((up - 1.0 / tau).norm() < 1e-3 && (lo - 1.0 / tau).norm() < 1e-3);
        let (up, lo) = branch_values(2.5, 0.0, tau).unwrap();
        assert_eq!(up, c(2.0 / 1.1, 0.0));
        assert_eq!(lo, up);
    }

    #[test]
    fn branch_values_are_limits_of_ratio() {
        let (q, alpha, tau) = (0.7, 0.6, 0.2);
        let (up, lo) = branch_values(q, alpha, tau).unwrap();
        let above = zener_ratio(c(-q, 1e-13), alpha, tau).unwrap();
        let below = zener_ratio(c(-q, -1e-13), alpha, tau).unwrap();
        assert!((up - above).norm() < 1e-12);
        assert!((lo - below).norm() < 1e-12);
    }

    #[test]
    fn theta_values() {
        assert!((theta_of_rho(1.0, 1.0) - 1.0).abs() < 1e-16);
        assert_eq!(theta_of_rho(2.0, 0.0), 0.0);
        let v = theta_of_rho(2.0, 0.45);
        assert!((v - 2f64.powf(1.45) * (0.225 * PI).sin()).abs() < 1e-15);
        assert_eq!(theta_of_rho(0.0, 0.7), 0.0);
    }

    fn polar_psi(s: Complex64, p: &CharParams) -> (f64, f64) {
        let (r, phi) = s.to_polar();
        let ra = r.powf(p.alpha);
        let cos_a = (p.alpha * phi).cos();
        let den = 1.0 + 2.0 * p.tau * ra * cos_a + p.tau * p.tau * ra * ra;
        let re = r * r * (2.0 * phi).cos()
            + p.theta * (1.0 + (1.0 + p.tau) * ra * cos_a + p.tau * ra * ra) / den;
        let im = r * r * (2.0 * phi).sin()
            + p.theta * (1.0 - p.tau) * ra * (p.alpha * phi).sin() / den;
        (re, im)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn conjugate_symmetry(
            r in 1e-3f64..1e3, phi in -3.14f64..3.14,
            alpha in 0.0f64..0.99, tau in 0.01f64..0.99, theta in 1e-3f64..1e3,
        ) {
            let s = Complex64::from_polar(r, phi);
            prop_assume!(s.im != 0.0);
            let p = CharParams { alpha, tau, theta };
            let f = p.psi(s).unwrap();
            let g = p.psi(s.conj()).unwrap();
            prop_assert!((g - f.conj()).norm() <= 1e-13 * f.norm());
            let z = zener_ratio(s, alpha, tau).unwrap();
            let zc = zener_ratio(s.conj(), alpha, tau).unwrap();
            prop_assert!((zc - z.conj()).norm() <= 1e-13 * z.norm());
            let (up, lo) = branch_values(r, alpha, tau).unwrap();
            prop_assert!((lo - up.conj()).norm() <= 1e-13 * up.norm());
        }

        #[test]
        fn cartesian_matches_polar(
            r in 1e-2f64..1e2, phi in -3.1f64..3.1,
            alpha in 0.0f64..0.99, tau in 0.01f64..0.99, theta in 1e-2f64..1e2,
        ) {
            let s = Complex64::from_polar(r, phi);
            prop_assume!(s.im != 0.0);
            let p = CharParams { alpha, tau, theta };
            let f = p.psi(s).unwrap();
            let (re, im) = polar_psi(s, &p);
            let scale = r * r + theta * (1.0 + 1.0 / tau);
            prop_assert!((f.re - re).abs() <= 1e-12 * scale);
            prop_assert!((f.im - im).abs() <= 1e-12 * scale);
        }
    }

    #[test]
    fn derivative_matches_finite_differences_on_random_points() {
        use proptest::strategy::ValueTree;
        use proptest::test_runner::TestRunner;
        let mut runner = TestRunner::deterministic();
        let strat = (0.1f64..3.0, -3.0f64..3.0, 0.0f64..0.95, 0.05f64..0.95, 0.01f64..100.0);
        for _ in 0..100 {
            let (r, phi, alpha, tau, theta) = strat.new_tree(&mut runner).unwrap().current();
            let s = Complex64::from_polar(r, phi);
            if s.im.abs() < 1e-4 {
                continue;
            }
            let p = CharParams { alpha, tau, theta };
            let h = 1e-6 * r.max(1.0);
            let fd = (p.psi(s + h).unwrap() - p.psi(s - h).unwrap()) / (2.0 * h);
            let d = p.psi_prime(s).unwrap();
            assert!((fd - d).norm() <= 1e-6 * d.norm().max(1.0), "{s} {fd} {d}");
        }
    }
}
