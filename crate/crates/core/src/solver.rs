//! Displacement fields `u = u0 * K_eps + v0 * int_0^t K_eps` for initial
//! displacement `u0` and velocity `v0`, plus peak extraction.
//!
//! On the spectral routes the spatial convolution is carried out in the
//! Fourier variable: with `U(rho) = int u0(y) e^{-i rho y} dy`,
//! `(u0 * K_eps)(x) = (1/pi) int_0^inf S e^{-(eps rho)^2/4} Re[U e^{i rho x}] drho`.
//! Analytic data have closed-form transforms; sampled data are transformed
//! by a direct trapezoid sum.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fracops::SampledSignal;
use crate::kernel::{
    cosine_sum, delta_eps, kernel_eps, rho_rule, route_for, spectral_table, time_fractional_rows, Field, FieldMeta,
    KernelRoute, QuadratureConfig,
};
use crate::params::{validate_model, ModelParams};

/// Sampled data must vanish at the ends of their grid to this fraction of
/// their peak; the data are treated as zero outside the grid.
pub const SAMPLED_EDGE_TOL: f64 = 1e-6;
/// Secondary maxima below this fraction of the global maximum are ripple.
pub const PEAK_SUPPRESSION: f64 = 1e-3;
/// `delta_eps` is below `e^-64` relative to its peak beyond this many `eps`.
const DELTA_REACH: f64 = 8.0;

/// Initial displacement or velocity.
///
/// Gaussians are `height exp(-((x - center)/width)^2)`; boxes are `height`
/// on `|x - center| <= width/2`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialData {
    #[default]
    Zero,
    Dirac {
        #[serde(default)]
        center: f64,
        #[serde(default = "one")]
        height: f64,
    },
    Gaussian {
        #[serde(default)]
        center: f64,
        width: f64,
        #[serde(default = "one")]
        height: f64,
    },
    Box {
        #[serde(default)]
        center: f64,
        width: f64,
        #[serde(default = "one")]
        height: f64,
    },
    Sampled { samples: SampledSignal },
}

fn one() -> f64 {
    1.0
}

impl InitialData {
    /// Unit point source at the origin.
    pub fn unit_dirac() -> Self {
        InitialData::Dirac {
            center: 0.0,
            height: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = |name: &str, v: f64| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(Error::invalid(format!("initial data {name} must be finite, got {v}")))
            }
        };
        match self {
            InitialData::Zero => Ok(()),
            InitialData::Dirac { center, height } => {
                finite("center", *center)?;
                finite("height", *height)
            }
            InitialData::Gaussian { center, width, height } | InitialData::Box { center, width, height } => {
                finite("center", *center)?;
                finite("height", *height)?;
                if *width > 0.0 && width.is_finite() {
                    Ok(())
                } else {
                    Err(Error::invalid(format!("initial data width must be > 0, got {width}")))
                }
            }
            InitialData::Sampled { samples } => {
                // re-run the constructor checks on deserialized data
                let s = SampledSignal::new(samples.grid.clone(), samples.values.clone())?;
                if s.len() < 2 {
                    return Err(Error::invalid("sampled data need at least 2 points"));
                }
                let mass = trapezoid_weights(&s.grid)
                    .iter()
                    .zip(&s.values)
                    .map(|(w, v)| w * v.abs())
                    .sum::<f64>();
                if !mass.is_finite() {
                    return Err(Error::invalid("sampled data are not integrable"));
                }
                let peak = s.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
                let edge = s.values[0].abs().max(s.values[s.len() - 1].abs());
                if edge > SAMPLED_EDGE_TOL * peak {
                    return Err(Error::invalid(format!(
                        "sampled data grid [{}, {}] does not cover their support (edge value {edge:.3e})",
                        s.grid[0],
                        s.grid[s.len() - 1]
                    )));
                }
                Ok(())
            }
        }
    }

    fn is_zero(&self) -> bool {
        match self {
            InitialData::Zero => true,
            InitialData::Dirac { height, .. }
            | InitialData::Gaussian { height, .. }
            | InitialData::Box { height, .. } => *height == 0.0,
            InitialData::Sampled { samples } => samples.values.iter().all(|v| *v == 0.0),
        }
    }

    /// Largest `|y|` at which the data are non-negligible.
    fn reach(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        match self {
            InitialData::Zero => 0.0,
            InitialData::Dirac { center, .. } => center.abs(),
            InitialData::Gaussian { center, width, .. } => center.abs() + DELTA_REACH * width,
            InitialData::Box { center, width, .. } => center.abs() + 0.5 * width,
            InitialData::Sampled { samples } => samples.grid[0].abs().max(samples.grid[samples.len() - 1].abs()),
        }
    }

    /// Fourier transform `int u(y) e^{-i rho y} dy`.
    fn transform(&self, rho: f64) -> Complex64 {
        let shift = |c: f64| Complex64::new(0.0, -rho * c).exp();
        match self {
            InitialData::Zero => Complex64::new(0.0, 0.0),
            InitialData::Dirac { center, height } => shift(*center) * height,
            InitialData::Gaussian { center, width, height } => {
                shift(*center) * (height * width * PI.sqrt() * (-(rho * width).powi(2) / 4.0).exp())
            }
            InitialData::Box { center, width, height } => {
                let half = 0.5 * width;
                let sinc = if rho * half == 0.0 {
                    *width
                } else {
                    2.0 * (rho * half).sin() / rho
                };
                shift(*center) * (height * sinc)
            }
            InitialData::Sampled { samples } => (0..samples.len())
                .map(|k| shift(samples.grid[k]) * (trapezoid_weight(&samples.grid, k) * samples.values[k]))
                .sum(),
        }
    }

    /// Pointwise value; a Dirac is replaced by `height delta_eps(x - center)`
    /// and sampled data are interpolated linearly (zero outside the grid).
    pub fn value(&self, x: f64, epsilon: f64) -> f64 {
        match self {
            InitialData::Zero => 0.0,
            InitialData::Dirac { center, height } => height * delta_eps(x - center, epsilon),
            InitialData::Gaussian { center, width, height } => height * (-((x - center) / width).powi(2)).exp(),
            InitialData::Box { center, width, height } => {
                if (x - center).abs() <= 0.5 * width {
                    *height
                } else {
                    0.0
                }
            }
            InitialData::Sampled { samples } => interpolate(samples, x),
        }
    }

    /// `(u * delta_eps)(x)`.
    pub fn smoothed(&self, x: f64, epsilon: f64) -> f64 {
        match self {
            InitialData::Zero => 0.0,
            InitialData::Dirac { center, height } => height * delta_eps(x - center, epsilon),
            InitialData::Gaussian { center, width, height } => {
                let w2 = width * width + epsilon * epsilon;
                height * width / w2.sqrt() * (-(x - center).powi(2) / w2).exp()
            }
            InitialData::Box { center, width, height } => {
                let z = x - center;
                0.5 * height * (libm::erf((z + 0.5 * width) / epsilon) - libm::erf((z - 0.5 * width) / epsilon))
            }
            InitialData::Sampled { samples } => {
                let lo = samples.grid.partition_point(|&y| y < x - DELTA_REACH * epsilon);
                let hi = samples.grid.partition_point(|&y| y <= x + DELTA_REACH * epsilon);
                (lo..hi)
                    .map(|k| {
                        trapezoid_weight(&samples.grid, k) * samples.values[k] * delta_eps(x - samples.grid[k], epsilon)
                    })
                    .sum()
            }
        }
    }
}

fn trapezoid_weight(grid: &[f64], k: usize) -> f64 {
    let left = if k > 0 { grid[k] - grid[k - 1] } else { 0.0 };
    let right = if k + 1 < grid.len() { grid[k + 1] - grid[k] } else { 0.0 };
    0.5 * (left + right)
}

fn trapezoid_weights(grid: &[f64]) -> Vec<f64> {
    (0..grid.len()).map(|k| trapezoid_weight(grid, k)).collect()
}

fn interpolate(s: &SampledSignal, x: f64) -> f64 {
    let n = s.len();
    if n == 0 || x < s.grid[0] || x > s.grid[n - 1] {
        return 0.0;
    }
    let k = s.grid.partition_point(|&y| y <= x);
    if k >= n {
        return s.values[n - 1];
    }
    let (x0, x1) = (s.grid[k - 1], s.grid[k]);
    let (v0, v1) = (s.values[k - 1], s.values[k]);
    v0 + (v1 - v0) * (x - x0) / (x1 - x0)
}

fn check_inputs(x_grid: &[f64], t_list: &[f64]) -> Result<()> {
    if x_grid.is_empty() || x_grid.iter().any(|x| !x.is_finite()) || x_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid("x grid must be non-empty, finite and strictly increasing"));
    }
    if t_list.is_empty() || t_list.iter().any(|t| !(*t > 0.0 && t.is_finite())) {
        return Err(Error::invalid("times must be finite and > 0"));
    }
    Ok(())
}

/// Displacement field for initial displacement `u0` and velocity `v0`.
///
/// A unit Dirac at the origin with zero velocity returns [`kernel_eps`]
/// unchanged.
pub fn solve_field(
    u0: &InitialData,
    v0: &InitialData,
    x_grid: &[f64],
    t_list: &[f64],
    p: &ModelParams,
    q: &QuadratureConfig,
) -> Result<Field> {
    let p = validate_model(*p)?;
    q.validate(p.epsilon)?;
    u0.validate()?;
    v0.validate()?;
    check_inputs(x_grid, t_list)?;
    if *u0 == InitialData::unit_dirac() && v0.is_zero() {
        return kernel_eps(x_grid, t_list, &p, q);
    }
    let route = route_for(&p);
    let meta = FieldMeta {
        model: p,
        quadrature: *q,
        route,
    };
    let zero_rows = || vec![vec![0.0; x_grid.len()]; t_list.len()];
    let values = match route {
        KernelRoute::NonPropagating => t_list
            .iter()
            .map(|&t| {
                x_grid
                    .par_iter()
                    .map(|&x| u0.smoothed(x, p.epsilon) + t * v0.smoothed(x, p.epsilon))
                    .collect()
            })
            .collect(),
        KernelRoute::TimeFractional => {
            let mut rows = zero_rows();
            for (data, integrated) in [(u0, false), (v0, true)] {
                if data.is_zero() {
                    continue;
                }
                let g = |x: f64| data.smoothed(x, p.epsilon);
                let part = time_fractional_rows(x_grid, t_list, p.alpha, p.tau, p.epsilon, q, integrated, &g)?;
                add_rows(&mut rows, &part);
            }
            rows
        }
        _ => {
            let extent = x_grid.iter().fold(0.0f64, |m, x| m.max(x.abs())) + u0.reach().max(v0.reach());
            let rule = rho_rule(extent, p.epsilon, q)?;
            let mut rows = zero_rows();
            for (data, integrated) in [(u0, false), (v0, true)] {
                if data.is_zero() {
                    continue;
                }
                let table = spectral_table(&rule, t_list, &p, q, integrated, false)?;
                let part: Vec<Vec<f64>> = match data {
                    InitialData::Dirac { center, height } if *center == 0.0 => {
                        table.iter().map(|s| scaled(cosine_sum(&rule, s, x_grid), *height)).collect()
                    }
                    _ => {
                        let hat: Vec<Complex64> = rule.nodes.par_iter().map(|&rho| data.transform(rho)).collect();
                        table.iter().map(|s| fourier_sum(&rule.nodes, &rule.weights, s, &hat, x_grid)).collect()
                    }
                };
                add_rows(&mut rows, &part);
            }
            rows
        }
    };
    Ok(Field {
        x_grid: x_grid.to_vec(),
        t_list: t_list.to_vec(),
        values,
        meta,
    })
}

fn scaled(mut row: Vec<f64>, factor: f64) -> Vec<f64> {
    row.iter_mut().for_each(|v| *v *= factor);
    row
}

fn add_rows(acc: &mut [Vec<f64>], part: &[Vec<f64>]) {
    for (a, b) in acc.iter_mut().zip(part) {
        for (x, y) in a.iter_mut().zip(b) {
            *x += y;
        }
    }
}

/// `sum_j w_j S_j Re[U_j e^{i rho_j x}]`, each sum in node order.
fn fourier_sum(nodes: &[f64], weights: &[f64], s: &[f64], hat: &[Complex64], x_grid: &[f64]) -> Vec<f64> {
    let coeff: Vec<Complex64> = weights.iter().zip(s).zip(hat).map(|((w, s), h)| h * (w * s)).collect();
    x_grid
        .par_iter()
        .map(|&x| {
            nodes
                .iter()
                .zip(&coeff)
                .map(|(rho, c)| {
                    let (sin, cos) = (rho * x).sin_cos();
                    c.re * cos - c.im * sin
                })
                .sum()
        })
        .collect()
}

/// Closed-form non-propagating solution `u0(x) + v0(x) t` (no smoothing
/// except for Dirac data, which become `delta_eps`). Only meaningful for
/// `beta = 0`; `p` supplies `eps` and the metadata.
pub fn nonprop_solution(
    u0: &InitialData,
    v0: &InitialData,
    x_grid: &[f64],
    t_list: &[f64],
    p: &ModelParams,
) -> Result<Field> {
    let p = validate_model(*p)?;
    u0.validate()?;
    v0.validate()?;
    check_inputs(x_grid, t_list)?;
    let values = t_list
        .iter()
        .map(|&t| {
            x_grid
                .iter()
                .map(|&x| u0.value(x, p.epsilon) + t * v0.value(x, p.epsilon))
                .collect()
        })
        .collect();
    Ok(Field {
        x_grid: x_grid.to_vec(),
        t_list: t_list.to_vec(),
        values,
        meta: FieldMeta {
            model: p,
            quadrature: QuadratureConfig::default(),
            route: KernelRoute::NonPropagating,
        },
    })
}

/// A local maximum of a field row.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Peak {
    pub location: f64,
    pub height: f64,
}

/// Strict local maxima of row `t_index` at `x >= 0`, highest first (ties:
/// smaller location first). Maxima below [`PEAK_SUPPRESSION`] times the
/// largest value at `x >= 0` are dropped.
pub fn peak_metrics(f: &Field, t_index: usize) -> Result<Vec<Peak>> {
    if f.x_grid.len() < 3 {
        return Err(Error::invalid("peak extraction needs at least 3 grid points"));
    }
    if t_index >= f.t_list.len() {
        return Err(Error::invalid(format!(
            "time index {t_index} out of range for {} times",
            f.t_list.len()
        )));
    }
    let row = f.row(t_index);
    let x = &f.x_grid;
    let global = x
        .iter()
        .zip(row)
        .filter(|(xi, _)| **xi >= 0.0)
        .fold(f64::NEG_INFINITY, |m, (_, v)| m.max(*v));
    let mut peaks: Vec<Peak> = (1..x.len() - 1)
        .filter(|&i| x[i] >= 0.0 && row[i] > row[i - 1] && row[i] > row[i + 1])
        .map(|i| Peak {
            location: x[i],
            height: row[i],
        })
        .filter(|pk| pk.height >= PEAK_SUPPRESSION * global)
        .collect();
    peaks.sort_by(|a, b| b.height.total_cmp(&a.height).then(a.location.total_cmp(&b.location)));
    Ok(peaks)
}
