//! Mittag-Leffler functions and the fractional relaxation function
//! `e_alpha(t) = E_alpha(-t^alpha / tau)`.
//!
//! `E_{a,b}(z) = sum_k z^k / Gamma(a k + b)` is evaluated by one of three
//! routes, tried in order:
//!
//! 1. the power series (compensated summation) for `|z| <= switch_radius`,
//!    accepted when its rounding estimate meets the tolerance;
//! 2. the algebraic asymptotic expansion `-sum_k z^-k / Gamma(b - a k)` for
//!    `|arg z| > a*pi`, accepted when the first omitted term is small enough;
//! 3. the Laplace-type integral representation valid for `|arg z| > a*pi`,
//!    `b < 1 + a`; larger `b` is brought into range with the recurrence
//!    `E_{a,b}(z) = (E_{a,b-a}(z) - 1/Gamma(b-a)) / z`.
//!
//! Arguments with `|arg z| <= a*pi` outside the series disk are rejected.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quadrature::{integrate, Adaptive};

/// Parameters of a two-parameter Mittag-Leffler evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MLParams {
    pub ml_alpha: f64,
    pub ml_beta: f64,
    /// Relative tolerance; must lie in `(0, 1e-6]`.
    pub series_tol: f64,
    /// Radius of the disk served by the power series; must exceed 1.
    pub switch_radius: f64,
}

impl MLParams {
    pub const DEFAULT_TOL: f64 = 1e-10;
    pub const DEFAULT_SWITCH_RADIUS: f64 = 5.0;

    pub fn new(ml_alpha: f64, ml_beta: f64) -> Result<Self> {
        let p = MLParams {
            ml_alpha,
            ml_beta,
            series_tol: Self::DEFAULT_TOL,
            switch_radius: Self::DEFAULT_SWITCH_RADIUS,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        use crate::error::ValidationError as V;
        if !(self.ml_alpha > 0.0 && self.ml_alpha <= 1.0) {
            return Err(V::out_of_range("ml_alpha", self.ml_alpha, "(0, 1]").into());
        }
        if !(self.ml_beta > 0.0 && self.ml_beta.is_finite()) {
            return Err(V::out_of_range("ml_beta", self.ml_beta, "(0, inf)").into());
        }
        if !(self.series_tol > 0.0 && self.series_tol <= 1e-6) {
            return Err(V::out_of_range("series_tol", self.series_tol, "(0, 1e-6]").into());
        }
        if !(self.switch_radius > 1.0) {
            return Err(V::out_of_range("switch_radius", self.switch_radius, "(1, inf)").into());
        }
        Ok(())
    }

    /// Evaluates `E_{ml_alpha, ml_beta}(z)`.
    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        self.validate()?;
        if !(z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::Domain(format!("non-finite Mittag-Leffler argument {z}")));
        }
        let (a, b) = (self.ml_alpha, self.ml_beta);
        if z == Complex64::new(0.0, 0.0) {
            return Ok(Complex64::new(rgamma(b), 0.0));
        }
        if a == 1.0 && b == 1.0 {
            return Ok(z.exp());
        }

        let mut best_estimate = f64::INFINITY;
        if z.norm() <= self.switch_radius {
            let (sum, err) = series(a, b, z);
            if err.is_finite() && err <= self.series_tol * sum.norm() {
                return Ok(sum);
            }
            best_estimate = err / sum.norm();
        }

        let in_sector = a < 1.0 && z.arg().abs() > a * PI;
        if in_sector {
            let (sum, err) = asymptotic(a, b, z);
            if err.is_finite() && err <= self.series_tol * sum.norm() {
                return Ok(sum);
            }
            let (value, err) = integral_route(a, b, z, self.series_tol)?;
            if err.is_finite() && err <= self.series_tol * value.norm().max(f64::MIN_POSITIVE) {
                return Ok(value);
            }
            best_estimate = best_estimate.min(err / value.norm());
        }
        Err(Error::NonConvergence {
            what: "Mittag-Leffler evaluation",
            estimate: best_estimate,
        })
    }
}

/// `E_{ml_alpha, ml_beta}(z)` at the default tolerance.
pub fn mittag_leffler(ml_alpha: f64, ml_beta: f64, z: Complex64) -> Result<Complex64> {
    MLParams::new(ml_alpha, ml_beta)?.eval(z)
}

/// Real-argument convenience wrapper around [`mittag_leffler`].
pub fn mittag_leffler_real(ml_alpha: f64, ml_beta: f64, x: f64) -> Result<f64> {
    Ok(mittag_leffler(ml_alpha, ml_beta, Complex64::new(x, 0.0))?.re)
}

/// `1 / Gamma(x)`, exactly zero at the poles.
pub(crate) fn rgamma(x: f64) -> f64 {
    if x <= 0.0 && x == x.floor() {
        return 0.0;
    }
    if x > 171.0 {
        return (-libm::lgamma(x)).exp();
    }
    1.0 / libm::tgamma(x)
}

struct Kahan {
    sum: Complex64,
    comp: Complex64,
}

impl Kahan {
    fn new() -> Self {
        Kahan {
            sum: Complex64::new(0.0, 0.0),
            comp: Complex64::new(0.0, 0.0),
        }
    }

    fn add(&mut self, x: Complex64) {
        let y = x - self.comp;
        let t = self.sum + y;
        self.comp = (t - self.sum) - y;
        self.sum = t;
    }
}

/// Power series with a rounding-plus-truncation error estimate.
fn series(a: f64, b: f64, z: Complex64) -> (Complex64, f64) {
    let mut acc = Kahan::new();
    let mut zk = Complex64::new(1.0, 0.0);
    let mut rounding = 0.0;
    let mut quiet = 0;
    let mut last = f64::INFINITY;
    for k in 0..2000usize {
        let arg = a * k as f64 + b;
        if arg > 171.0 {
            break;
        }
        let term = zk * rgamma(arg);
        if !(term.re.is_finite() && term.im.is_finite()) {
            // z^k overflowed long before the terms decay: hopeless cancellation
            return (acc.sum, f64::INFINITY);
        }
        acc.add(term);
        let mag = term.norm();
        // error of z^k by repeated products grows like k ulps
        rounding += (k as f64 + 4.0) * f64::EPSILON * mag;
        last = mag;
        if arg > 2.0 && mag <= 1e-17 * acc.sum.norm() {
            quiet += 1;
            if quiet >= 3 {
                break;
            }
        } else {
            quiet = 0;
        }
        zk *= z;
    }
    (acc.sum, rounding + last)
}

/// Algebraic asymptotic expansion; the error estimate is the first omitted
/// nonzero term.
fn asymptotic(a: f64, b: f64, z: Complex64) -> (Complex64, f64) {
    let zinv = 1.0 / z;
    let mut zk = Complex64::new(1.0, 0.0);
    let mut acc = Kahan::new();
    let mut prev = f64::INFINITY;
    for k in 1..400usize {
        zk *= zinv;
        let term = -zk * rgamma(b - a * k as f64);
        let mag = term.norm();
        if mag == 0.0 {
            continue;
        }
        if mag > prev {
            // divergent tail starts: the omitted term is at least `prev`
            return (acc.sum, prev);
        }
        if mag <= 1e-17 * acc.sum.norm() {
            return (acc.sum, mag);
        }
        acc.add(term);
        prev = mag;
    }
    (acc.sum, prev)
}

fn integral_route(a: f64, b: f64, z: Complex64, tol: f64) -> Result<(Complex64, f64)> {
    if b > 1.0 {
        // E_{a,b} = (E_{a,b-a} - 1/Gamma(b-a)) / z keeps the base order <= 1,
        // where the kernel below has no singularity at the origin
        let (inner, err) = integral_route(a, b - a, z, tol)?;
        let zn = z.norm();
        return Ok(((inner - rgamma(b - a)) / z, err / zn));
    }
    let (value, err) = integral_representation(a, b, z, tol)?;
    Ok((value, err))
}

/// `E_{a,b}(z) = int_0^inf K(chi) dchi` with
/// `K = chi^((1-b)/a) exp(-chi^(1/a)) [chi sin(pi(1-b)) - z sin(pi(1-b+a))]
///      / (a pi (chi^2 - 2 chi z cos(a pi) + z^2))`,
/// valid for `0 < a < 1`, `b < 1 + a`, `|arg z| > a pi`.
fn integral_representation(a: f64, b: f64, z: Complex64, tol: f64) -> Result<(Complex64, f64)> {
    let s1 = (PI * (1.0 - b)).sin();
    let s2 = (PI * (1.0 - b + a)).sin();
    let c = (a * PI).cos();
    let p = (1.0 - b) / a;
    let inv_a = 1.0 / a;
    let kernel = |chi: f64| -> Complex64 {
        if chi == 0.0 {
            return if p == 0.0 {
                -z * s2 / (a * PI * z * z)
            } else {
                Complex64::new(0.0, 0.0)
            };
        }
        let w = chi.powf(p) * (-chi.powf(inv_a)).exp();
        let num = chi * s1 - z * s2;
        let den = chi * chi - 2.0 * chi * z * c + z * z;
        num / den * (w / (a * PI))
    };
    // exp(-chi^(1/a)) < 1e-26 beyond chi_max
    let chi_max = 60f64.powf(a);
    let mut breaks = vec![0.0];
    // near-poles of the kernel at chi = z e^{+-i a pi}
    for sign in [1.0, -1.0] {
        let pole = z * Complex64::from_polar(1.0, sign * a * PI);
        if pole.re > 0.0 && pole.re < chi_max {
            let width = pole.im.abs().max(1e-12);
            for x in [pole.re - width, pole.re, pole.re + width] {
                if x > 0.0 && x < chi_max {
                    breaks.push(x);
                }
            }
        }
    }
    breaks.push(chi_max.min(1.0));
    breaks.push(chi_max);
    breaks.sort_by(|x, y| x.total_cmp(y));
    breaks.dedup();
    // a coarse pass sizes the absolute target relative to the value itself;
    // cancellation in the kernel can leave a value far below its mass
    let coarse = integrate(
        kernel,
        &breaks,
        Adaptive::new(0.0, 1e-4).with_max_panels(4000),
        "Mittag-Leffler integral representation",
    )?;
    let est = integrate(
        kernel,
        &breaks,
        Adaptive::new(0.1 * tol * coarse.value.norm(), (tol * 0.1).max(5e-14)).with_max_panels(4000),
        "Mittag-Leffler integral representation",
    )?;
    Ok((est.value, est.error))
}

fn check_alpha_tau(alpha: f64, tau: f64) -> Result<()> {
    use crate::error::ValidationError as V;
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(V::out_of_range("alpha", alpha, "(0, 1)").into());
    }
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(V::out_of_range("tau", tau, "(0, inf)").into());
    }
    Ok(())
}

/// Fractional relaxation function `E_alpha(-t^alpha / tau)`.
pub fn e_alpha(t: f64, alpha: f64, tau: f64) -> Result<f64> {
    check_alpha_tau(alpha, tau)?;
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::Domain(format!("e_alpha needs t >= 0, got {t}")));
    }
    if t == 0.0 {
        return Ok(1.0);
    }
    mittag_leffler_real(alpha, 1.0, -t.powf(alpha) / tau)
}

/// Derivative of [`e_alpha`], `-(t^(alpha-1)/tau) E_{alpha,alpha}(-t^alpha/tau)`.
pub fn e_alpha_prime(t: f64, alpha: f64, tau: f64) -> Result<f64> {
    check_alpha_tau(alpha, tau)?;
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::Domain(format!("e_alpha_prime needs t > 0, got {t}")));
    }
    let e = mittag_leffler_real(alpha, alpha, -t.powf(alpha) / tau)?;
    Ok(-t.powf(alpha - 1.0) / tau * e)
}

/// `int_0^t e_alpha(v) dv = t E_{alpha,2}(-t^alpha / tau)`.
pub fn e_alpha_integral(t: f64, alpha: f64, tau: f64) -> Result<f64> {
    check_alpha_tau(alpha, tau)?;
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::Domain(format!("e_alpha_integral needs t >= 0, got {t}")));
    }
    if t == 0.0 {
        return Ok(0.0);
    }
    Ok(t * mittag_leffler_real(alpha, 2.0, -t.powf(alpha) / tau)?)
}
