//! Discrete fractional operators on sampled signals: the Caputo time
//! derivative (L1 scheme), the symmetrized space derivative (spectral), and
//! the constitutive operator `L_t^alpha = (1/tau) delta + (1/tau - 1) e'_alpha *`.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::specfun::{e_alpha, e_alpha_integral, rgamma};

/// Relative spacing deviation below which a grid counts as uniform.
pub const UNIFORM_TOL: f64 = 1e-10;
/// Relative boundary magnitude above which the spectral derivative refuses
/// to run (the periodic extension would wrap the signal around).
pub const BOUNDARY_TOL: f64 = 1e-12;

/// Samples of a real function on a strictly increasing grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledSignal {
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub uniform: bool,
}

impl SampledSignal {
    pub fn new(grid: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if grid.len() != values.len() {
            return Err(Error::invalid(format!(
                "grid has {} points but {} values",
                grid.len(),
                values.len()
            )));
        }
        if grid.len() < 2 {
            return Err(Error::invalid("a signal needs at least two samples"));
        }
        if grid.iter().chain(&values).any(|v| !v.is_finite()) {
            return Err(Error::invalid("signal contains non-finite samples"));
        }
        if grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid("grid must be strictly increasing"));
        }
        let h = (grid[grid.len() - 1] - grid[0]) / (grid.len() - 1) as f64;
        let uniform = grid.windows(2).all(|w| ((w[1] - w[0]) - h).abs() <= UNIFORM_TOL * h);
        Ok(SampledSignal { grid, values, uniform })
    }

    /// `n` samples of `f` on the uniform grid `start + k * step`.
    pub fn from_fn(start: f64, step: f64, n: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        let grid: Vec<f64> = (0..n).map(|k| start + k as f64 * step).collect();
        let values = grid.iter().map(|&x| f(x)).collect();
        Self::new(grid, values)
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    fn step(&self) -> f64 {
        (self.grid[self.len() - 1] - self.grid[0]) / (self.len() - 1) as f64
    }

    fn with_values(&self, values: Vec<f64>) -> SampledSignal {
        SampledSignal {
            grid: self.grid.clone(),
            values,
            uniform: self.uniform,
        }
    }

    fn require_uniform(&self, op: &str) -> Result<()> {
        if self.uniform {
            Ok(())
        } else {
            Err(Error::invalid(format!("{op} needs a uniform grid")))
        }
    }

    fn require_causal(&self, op: &str) -> Result<()> {
        self.require_uniform(op)?;
        if self.len() < 3 {
            return Err(Error::invalid(format!("{op} needs at least three samples")));
        }
        if self.grid[0].abs() > UNIFORM_TOL * self.step() {
            return Err(Error::invalid(format!("{op} needs a grid starting at t = 0")));
        }
        Ok(())
    }
}

/// Left Caputo derivative `0^C D_t^alpha f` by the L1 scheme.
///
/// The piecewise-linear interpolant of `f` is differentiated exactly, so
/// linear signals are reproduced to rounding. `alpha = 0` returns `f`.
pub fn caputo_derivative(f: &SampledSignal, alpha: f64) -> Result<SampledSignal> {
    if !(0.0..1.0).contains(&alpha) {
        return Err(Error::invalid(format!("Caputo order {alpha} outside [0, 1)")));
    }
    f.require_causal("caputo_derivative")?;
    if alpha == 0.0 {
        return Ok(f.clone());
    }
    let n = f.len();
    let h = f.step();
    let scale = h.powf(-alpha) * rgamma(2.0 - alpha);
    let b: Vec<f64> = (0..n)
        .map(|k| {
            let k = k as f64;
            (k + 1.0).powf(1.0 - alpha) - k.powf(1.0 - alpha)
        })
        .collect();
    let v = &f.values;
    let out = (0..n)
        .map(|m| {
            let sum: f64 = (0..m).map(|k| b[k] * (v[m - k] - v[m - k - 1])).sum();
            scale * sum
        })
        .collect();
    Ok(f.with_values(out))
}

/// Symmetrized space derivative `E_x^beta f`, computed with the Fourier
/// symbol `i xi |xi|^(beta - 1) sin(beta pi / 2)`.
///
/// The signal must have decayed at both grid ends; the Nyquist mode of an
/// even-length grid is dropped.
pub fn symmetrized_derivative(f: &SampledSignal, beta: f64) -> Result<SampledSignal> {
    if !(0.0..=1.0).contains(&beta) {
        return Err(Error::invalid(format!("space order {beta} outside [0, 1]")));
    }
    f.require_uniform("symmetrized_derivative")?;
    let n = f.len();
    if beta == 0.0 {
        return Ok(f.with_values(vec![0.0; n]));
    }
    let peak = f.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let edge = f.values[0].abs().max(f.values[n - 1].abs());
    if edge > BOUNDARY_TOL * peak {
        return Err(Error::Domain(format!(
            "signal not decayed at the grid ends ({edge:.3e} vs peak {peak:.3e})"
        )));
    }

    let mut planner = FftPlanner::<f64>::new();
    let forward = planner.plan_fft_forward(n);
    let inverse = planner.plan_fft_inverse(n);
    let mut buf: Vec<Complex64> = f.values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    forward.process(&mut buf);

    let length = n as f64 * f.step();
    let amplitude = (beta * FRAC_PI_2).sin();
    for (k, c) in buf.iter_mut().enumerate() {
        let signed = if 2 * k < n { k as f64 } else { k as f64 - n as f64 };
        if k == 0 || 2 * k == n {
            *c = Complex64::new(0.0, 0.0);
            continue;
        }
        let xi = 2.0 * std::f64::consts::PI * signed / length;
        let symbol = Complex64::new(0.0, xi * xi.abs().powf(beta - 1.0) * amplitude);
        *c *= symbol;
    }
    inverse.process(&mut buf);
    let out = buf.iter().map(|c| c.re / n as f64).collect();
    Ok(f.with_values(out))
}

/// Constitutive operator `L_t^alpha f = f / tau + (1/tau - 1) int_0^t e'_alpha(t - s) f(s) ds`.
///
/// The weakly singular convolution is integrated exactly against the
/// piecewise-linear interpolant of `f`, through the integrated relaxation
/// function `int_0^u e_alpha`. `alpha = 0` uses `L = 2 / (1 + tau)`.
pub fn l_operator_apply(f: &SampledSignal, alpha: f64, tau: f64) -> Result<SampledSignal> {
    if !(0.0..1.0).contains(&alpha) {
        return Err(Error::invalid(format!("time order {alpha} outside [0, 1)")));
    }
    if !(tau > 0.0 && tau < 1.0) {
        return Err(Error::invalid(format!("relaxation ratio {tau} outside (0, 1)")));
    }
    f.require_causal("l_operator_apply")?;
    if alpha == 0.0 {
        let c = 2.0 / (1.0 + tau);
        return Ok(f.with_values(f.values.iter().map(|v| c * v).collect()));
    }
    let n = f.len();
    let h = f.step();
    let big_e: Vec<f64> = (0..n)
        .map(|k| e_alpha_integral(k as f64 * h, alpha, tau))
        .collect::<Result<_>>()?;
    // moments of e_alpha over one cell: int_{(k-1)h}^{kh} e_alpha
    let cell: Vec<f64> = (0..n).map(|k| if k == 0 { 0.0 } else { big_e[k] - big_e[k - 1] }).collect();
    let v = &f.values;
    let slopes: Vec<f64> = v.windows(2).map(|w| (w[1] - w[0]) / h).collect();
    let f0 = v[0];
    let c = 1.0 / tau - 1.0;
    let out = (0..n)
        .map(|m| {
            let t = m as f64 * h;
            // (e * f')(t_m) with f' constant on each cell
            let smooth: f64 = (0..m).map(|j| slopes[j] * cell[m - j]).sum();
            let e_t = if f0 == 0.0 { 0.0 } else { e_alpha(t, alpha, tau)? };
            Ok(v[m] / tau + c * (smooth + e_t * f0 - v[m]))
        })
        .collect::<Result<_>>()?;
    Ok(f.with_values(out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::rgamma;
    use proptest::prelude::*;

    fn ramp(n: usize, t_end: f64, f: impl Fn(f64) -> f64) -> SampledSignal {
        SampledSignal::from_fn(0.0, t_end / (n - 1) as f64, n, f).unwrap()
    }

    #[test]
    fn signal_validation() {
        assert!(SampledSignal::new(vec![0.0, 1.0], vec![1.0]).is_err());
        assert!(SampledSignal::new(vec![0.0, 0.0, 1.0], vec![1.0; 3]).is_err());
        assert!(!SampledSignal::new(vec![0.0, 1.0, 3.0], vec![1.0; 3]).unwrap().uniform);
        assert!(SampledSignal::new(vec![0.0, 0.5, 1.0], vec![1.0; 3]).unwrap().uniform);
    }

    #[test]
    fn caputo_of_linear_ramp() {
        let f = ramp(1001, 1.0, |t| t);
        let d = caputo_derivative(&f, 0.5).unwrap();
        let err = f
            .grid
            .iter()
            .zip(&d.values)
            .map(|(t, v)| (v - t.sqrt() * rgamma(1.5)).abs())
            .fold(0.0, f64::max);
        assert!(err < 1e-3, "{err}");
    }

    #[test]
    fn caputo_of_constant_and_order_zero() {
        let f = ramp(50, 2.0, |_| 3.0);
        assert!(caputo_derivative(&f, 0.7).unwrap().values.iter().all(|v| *v == 0.0));
        let g = ramp(50, 2.0, |t| t.sin());
        assert_eq!(caputo_derivative(&g, 0.0).unwrap(), g);
        assert!(caputo_derivative(&g, 1.0).is_err());
    }

    #[test]
    fn caputo_of_square_against_closed_form() {
        let f = ramp(2001, 2.0, |t| t * t);
        let d = caputo_derivative(&f, 0.25).unwrap();
        for (t, v) in f.grid.iter().zip(&d.values).step_by(100) {
            let exact = 2.0 * t.powf(1.75) * rgamma(2.75);
            assert!((v - exact).abs() < 2e-4, "t={t} {v} {exact}");
        }
    }

    #[test]
    fn caputo_near_one_is_close_to_first_derivative() {
        // f'(0) = 0, so there is no start-up layer at t = 0
        let f = ramp(2001, 6.0, |t| 1.0 - t.cos());
        let d = caputo_derivative(&f, 0.99).unwrap();
        let err = f
            .grid
            .iter()
            .zip(&d.values)
            .map(|(t, v)| (v - t.sin()).abs())
            .fold(0.0, f64::max);
        assert!(err < 0.05, "{err}");
    }

    #[test]
    fn caputo_rejects_non_uniform_or_offset_grid() {
        let f = SampledSignal::new(vec![0.0, 1.0, 3.0], vec![0.0; 3]).unwrap();
        assert!(caputo_derivative(&f, 0.5).is_err());
        let g = SampledSignal::from_fn(1.0, 0.1, 10, |t| t).unwrap();
        assert!(caputo_derivative(&g, 0.5).is_err());
    }

    fn gaussian_signal() -> SampledSignal {
        let n = 1 << 14;
        let h = 128.0 / n as f64;
        SampledSignal::from_fn(-64.0, h, n, |x| (-x * x).exp()).unwrap()
    }

    #[test]
    fn symmetrized_endpoints_in_order() {
        let g = gaussian_signal();
        assert!(symmetrized_derivative(&g, 0.0).unwrap().values.iter().all(|v| *v == 0.0));
        let d = symmetrized_derivative(&g, 1.0).unwrap();
        let err = g
            .grid
            .iter()
            .zip(&d.values)
            .map(|(x, v)| (v + 2.0 * x * (-x * x).exp()).abs())
            .fold(0.0, f64::max);
        assert!(err < 1e-8, "{err}");
    }

    #[test]
    fn symmetrized_half_order_matches_fixture() {
        // extended-precision quadrature of the defining singular integral
        let fixtures = [
            (0.5, -0.41595506206341545975),
            (1.0, -0.45871482605441861315),
            (2.0, -0.14310100266180140078),
        ];
        let g = gaussian_signal();
        let d = symmetrized_derivative(&g, 0.5).unwrap();
        let n0 = g.grid.iter().position(|&x| x == 0.0).unwrap();
        assert!(d.values[n0].abs() < 1e-4);
        for (x, expected) in fixtures {
            let k = g.grid.iter().position(|&g| (g - x).abs() < 1e-12).unwrap();
            assert!((d.values[k] - expected).abs() < 1e-4, "x={x} {} {expected}", d.values[k]);
            // odd in x
            let km = g.grid.iter().position(|&g| (g + x).abs() < 1e-12).unwrap();
            assert!((d.values[km] + d.values[k]).abs() < 1e-10);
        }
    }

    #[test]
    fn symmetrized_rejects_truncated_signal() {
        let f = SampledSignal::from_fn(-1.0, 0.01, 201, |x| (-x * x).exp()).unwrap();
        assert!(matches!(symmetrized_derivative(&f, 0.5), Err(Error::Domain(_))));
    }

    #[test]
    fn l_operator_on_ramp_matches_fixture() {
        // L[t](t) = t + (1/tau - 1) int_0^t e_alpha, exact for linear signals
        let f = ramp(401, 1.0, |t| t);
        let l = l_operator_apply(&f, 0.25, 0.1).unwrap();
        for (t, expected) in [
            (0.25, 0.55165870538065221),
            (0.5, 1.0179912521596284207),
            (1.0, 1.8868025790729227304),
        ] {
            let k = (t * 400.0) as usize;
            assert!((l.values[k] - expected).abs() < 1e-9, "t={t} {}", l.values[k]);
        }
    }

    #[test]
    fn l_operator_basic_cases() {
        let zero = ramp(20, 1.0, |_| 0.0);
        assert!(l_operator_apply(&zero, 0.5, 0.5).unwrap().values.iter().all(|v| *v == 0.0));
        let f = ramp(20, 1.0, |t| t.sin());
        let l0 = l_operator_apply(&f, 0.0, 0.5).unwrap();
        for (a, b) in l0.values.iter().zip(&f.values) {
            assert!((a - b * 2.0 / 1.5).abs() < 1e-15);
        }
        assert!(l_operator_apply(&f, 0.5, 1.0).is_err());
        assert!(l_operator_apply(&f, 1.0, 0.5).is_err());
    }

    #[test]
    fn l_operator_step_response_limits() {
        // unit step: L1(t) = 1/tau + (1/tau - 1)(e_alpha(t) - 1)
        let f = ramp(2001, 200.0, |_| 1.0);
        let l = l_operator_apply(&f, 0.9, 0.5).unwrap();
        assert!((l.values[0] - 2.0).abs() < 1e-12);
        assert!((l.values[2000] - 1.0).abs() < 0.01, "{}", l.values[2000]);
    }

    #[test]
    fn constitutive_consistency() {
        // sigma + tau D sigma = eps + D eps for sigma = L eps
        let (alpha, tau) = (0.5, 0.3);
        let eps = ramp(2001, 5.0, |t| t * t * (-t).exp());
        let sigma = l_operator_apply(&eps, alpha, tau).unwrap();
        let ds = caputo_derivative(&sigma, alpha).unwrap();
        let de = caputo_derivative(&eps, alpha).unwrap();
        let err = (0..eps.len())
            .map(|k| (sigma.values[k] + tau * ds.values[k] - eps.values[k] - de.values[k]).abs())
            .fold(0.0, f64::max);
        assert!(err < 1e-2, "{err}");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn operators_are_linear(
            f in prop::collection::vec(-1.0f64..1.0, 40),
            g in prop::collection::vec(-1.0f64..1.0, 40),
            a in -2.0f64..2.0,
            b in -2.0f64..2.0,
            alpha in 0.05f64..0.95,
        ) {
            let grid: Vec<f64> = (0..40).map(|k| k as f64 * 0.05).collect();
            let mix: Vec<f64> = f.iter().zip(&g).map(|(x, y)| a * x + b * y).collect();
            let sf = SampledSignal::new(grid.clone(), f).unwrap();
            let sg = SampledSignal::new(grid.clone(), g).unwrap();
            let sm = SampledSignal::new(grid.clone(), mix).unwrap();
            let check = |of: Vec<f64>, og: Vec<f64>, om: Vec<f64>| {
                let peak = of.iter().chain(&og).fold(1.0f64, |m, v| m.max(v.abs()));
                let scale = (1.0 + a.abs() + b.abs()) * peak;
                for k in 0..om.len() {
                    let expected = a * of[k] + b * og[k];
                    assert!((om[k] - expected).abs() <= 1e-10 * scale, "k={k} {} {expected} {scale}", om[k]);
                }
            };
            check(
                caputo_derivative(&sf, alpha).unwrap().values,
                caputo_derivative(&sg, alpha).unwrap().values,
                caputo_derivative(&sm, alpha).unwrap().values,
            );
            check(
                l_operator_apply(&sf, alpha, 0.4).unwrap().values,
                l_operator_apply(&sg, alpha, 0.4).unwrap().values,
                l_operator_apply(&sm, alpha, 0.4).unwrap().values,
            );
        }
    }
}
