//! Solution kernels.
//!
//! The spectral kernel `S(rho, t)` is the inverse Laplace transform of
//! `s / (s^2 + Z(s) theta(rho))`, assembled from the residues at the zero
//! pair of `Psi` and an integral along the branch cut. The physical kernel
//! `K_eps(x, t)` is its Gaussian-regularized cosine transform. The limiting
//! cases `beta = 0`, `alpha = 0` and `beta = 1` have their own closed forms
//! or representations and are routed to them.

use std::f64::consts::{FRAC_1_PI, PI};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::charfun::{branch_upper, check_off_cut, theta_of_rho, zener_ratio_unchecked, CharParams};
use crate::error::{Error, Result};
use crate::params::{validate_model, ModelParams};
use crate::quadrature::{gauss_legendre, integrate, integrate_to_infinity, Adaptive};
use crate::rootfinder::{find_zero_pair, refine_zero};

/// Gauss–Legendre order of each rho-panel.
pub const RHO_PANEL_ORDER: usize = 10;
/// Upper bound on the number of rho-nodes of one kernel evaluation.
pub const RHO_NODE_BUDGET: usize = 4_000_000;
// rho-nodes handled sequentially (warm-started root tracking) per task
const ROOT_CHUNK: usize = 256;
// fine-grid spacing of the time-fractional convolution, in units of epsilon
const FINE_STEPS_PER_EPS: f64 = 8.0;
// the branch-cut form of the time-fractional kernel is used while its
// integrand grows by at most e^GROWTH_LIMIT
const GROWTH_LIMIT: f64 = 3.0;

/// `S(rho, t)` split into its two contributions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectralKernel {
    pub rho: f64,
    pub t: f64,
    pub branch_part: f64,
    pub residue_part: f64,
    pub total: f64,
    /// Imaginary part left over by the complex assembly; zero up to rounding.
    pub imag_residual: f64,
}

/// Truncation and tolerance settings shared by all kernel evaluations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuadratureConfig {
    /// Branch-integral truncation; `None` picks `50 / t`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q_max: Option<f64>,
    /// Fourier truncation; `None` picks `(2/eps) sqrt(ln(1/abs_tol))`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho_max: Option<f64>,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub panels_per_period: usize,
    pub bromwich_s0: f64,
    pub bromwich_p_max: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            q_max: None,
            rho_max: None,
            rel_tol: 1e-6,
            abs_tol: 1e-8,
            panels_per_period: 8,
            bromwich_s0: 1.0,
            bromwich_p_max: 1e4,
        }
    }
}

impl QuadratureConfig {
    /// Checks the settings; `epsilon` is needed for the Gaussian tail bound.
    pub fn validate(&self, epsilon: f64) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::invalid(format!("{name} must be positive and finite, got {v}")))
            }
        };
        positive("rel_tol", self.rel_tol)?;
        positive("abs_tol", self.abs_tol)?;
        positive("bromwich_s0", self.bromwich_s0)?;
        positive("bromwich_p_max", self.bromwich_p_max)?;
        if self.rel_tol < 1e-12 {
            return Err(Error::invalid(format!("rel_tol {} below 1e-12", self.rel_tol)));
        }
        if self.abs_tol >= 1.0 {
            return Err(Error::invalid(format!("abs_tol {} must be below 1", self.abs_tol)));
        }
        if self.panels_per_period < 4 {
            return Err(Error::invalid(format!(
                "panels_per_period {} below 4",
                self.panels_per_period
            )));
        }
        if let Some(q) = self.q_max {
            positive("q_max", q)?;
        }
        if let Some(r) = self.rho_max {
            positive("rho_max", r)?;
            let tail = (-(epsilon * r).powi(2) / 4.0).exp();
            if tail > self.abs_tol {
                return Err(Error::invalid(format!(
                    "rho_max {r} leaves a Gaussian tail {tail:.2e} above abs_tol {}",
                    self.abs_tol
                )));
            }
        }
        Ok(())
    }

    /// Fourier truncation for regularization width `epsilon`.
    pub fn rho_max_for(&self, epsilon: f64) -> f64 {
        self.rho_max
            .unwrap_or_else(|| 2.0 / epsilon * (1.0 / self.abs_tol).ln().sqrt())
    }
}

/// Which representation produced a field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelRoute {
    /// `beta = 0`: `S = 1`, the kernel is `delta_eps` for all `t`.
    NonPropagating,
    /// `alpha = 0`: `S = cos(t sqrt(2 theta / (1 + tau)))`.
    Alpha0,
    /// `beta = 1`: evaluated in `x` and convolved with `delta_eps`.
    TimeFractional,
    /// Closed-form classical wave kernel.
    Classical,
    /// Residues plus branch cut.
    General,
}

/// Settings snapshot attached to every field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FieldMeta {
    pub model: ModelParams,
    pub quadrature: QuadratureConfig,
    pub route: KernelRoute,
}

/// Values on an `x`-grid for a list of times, one row per time.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Field {
    pub x_grid: Vec<f64>,
    pub t_list: Vec<f64>,
    pub values: Vec<Vec<f64>>,
    pub meta: FieldMeta,
}

impl Field {
    pub fn row(&self, t_index: usize) -> &[f64] {
        &self.values[t_index]
    }

    /// Largest `|u(x) - u(-x)|` over mirrored grid pairs; `None` when the
    /// grid is not symmetric.
    pub fn symmetry_defect(&self) -> Option<f64> {
        let n = self.x_grid.len();
        let symmetric = (0..n).all(|i| self.x_grid[i] == -self.x_grid[n - 1 - i]);
        symmetric.then(|| {
            self.values
                .iter()
                .flat_map(|row| (0..n).map(move |i| (row[i] - row[n - 1 - i]).abs()))
                .fold(0.0, f64::max)
        })
    }
}

/// Gaussian delta net `exp(-x^2/eps^2) / (eps sqrt(pi))`.
pub fn delta_eps(x: f64, epsilon: f64) -> f64 {
    (-(x / epsilon).powi(2)).exp() / (epsilon * PI.sqrt())
}

/// `n` equispaced points from `x_min` to `x_max`; a grid with
/// `x_min = -x_max` is mirror-symmetric bit for bit.
pub fn uniform_grid(x_min: f64, x_max: f64, n: usize) -> Result<Vec<f64>> {
    if n < 2 || !(x_min < x_max) || !x_min.is_finite() || !x_max.is_finite() {
        return Err(Error::invalid(format!("bad grid [{x_min}, {x_max}] with {n} points")));
    }
    let m = (n - 1) as f64;
    Ok((0..n)
        .map(|i| (x_min * (n - 1 - i) as f64 + x_max * i as f64) / m)
        .collect())
}

/// Laplace-domain kernel `s K~ = s / (s^2 + Z(s) theta(rho))`.
pub fn laplace_kernel_hat(rho: f64, s: Complex64, p: &ModelParams) -> Result<Complex64> {
    let p = validate_model(*p)?;
    if !(rho >= 0.0 && rho.is_finite()) {
        return Err(Error::Domain(format!("rho must be finite and >= 0, got {rho}")));
    }
    check_off_cut(s)?;
    let theta = theta_of_rho(rho, p.beta);
    Ok(s / (s * s + zener_ratio_unchecked(s, p.alpha, p.tau) * theta))
}

/// `S(rho, t)` for `alpha = 0`: `cos(t sqrt(2 theta / (1 + tau)))`.
pub fn spectral_kernel_alpha0(rho: f64, t: f64, beta: f64, tau: f64) -> f64 {
    (t * alpha0_frequency(rho, beta, tau)).cos()
}

/// `int_0^t S(rho, t') dt'` for `alpha = 0`.
pub fn spectral_kernel_alpha0_integrated(rho: f64, t: f64, beta: f64, tau: f64) -> f64 {
    let w = alpha0_frequency(rho, beta, tau);
    if w == 0.0 {
        t
    } else {
        (w * t).sin() / w
    }
}

fn alpha0_frequency(rho: f64, beta: f64, tau: f64) -> f64 {
    (2.0 / (1.0 + tau) * theta_of_rho(rho, beta)).sqrt()
}

fn check_rho_t(rho: f64, t: f64) -> Result<()> {
    if !(rho >= 0.0 && rho.is_finite()) {
        return Err(Error::Domain(format!("rho must be finite and >= 0, got {rho}")));
    }
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::Domain(format!("t must be finite and > 0, got {t}")));
    }
    Ok(())
}

/// `S(rho, t)` by residues plus branch cut (closed forms when `theta = 0`
/// or `alpha = 0`).
pub fn spectral_kernel(rho: f64, t: f64, p: &ModelParams, q: &QuadratureConfig) -> Result<SpectralKernel> {
    spectral_kernel_impl(rho, t, p, q, false)
}

/// `int_0^t S(rho, t') dt'`, the spectral kernel of the initial-velocity
/// term; residues gain `(e^{st} - 1)/s` and the branch integrand
/// `(1 - e^{-qt})/q`.
pub fn spectral_kernel_integrated(rho: f64, t: f64, p: &ModelParams, q: &QuadratureConfig) -> Result<SpectralKernel> {
    spectral_kernel_impl(rho, t, p, q, true)
}

fn spectral_kernel_impl(
    rho: f64,
    t: f64,
    p: &ModelParams,
    q: &QuadratureConfig,
    integrated: bool,
) -> Result<SpectralKernel> {
    let p = validate_model(*p)?;
    q.validate(p.epsilon)?;
    check_rho_t(rho, t)?;
    let theta = theta_of_rho(rho, p.beta);
    let closed = |residue_part: f64| SpectralKernel {
        rho,
        t,
        branch_part: 0.0,
        residue_part,
        total: residue_part,
        imag_residual: 0.0,
    };
    if theta == 0.0 {
        return Ok(closed(if integrated { t } else { 1.0 }));
    }
    if p.alpha == 0.0 {
        return Ok(closed(if integrated {
            spectral_kernel_alpha0_integrated(rho, t, p.beta, p.tau)
        } else {
            spectral_kernel_alpha0(rho, t, p.beta, p.tau)
        }));
    }
    let cp = CharParams::new(p.alpha, p.tau, theta)?;
    let zero = find_zero_pair(&cp)?;

    // complex assembly: both residues and both banks of the cut separately
    let residue = |s: Complex64| {
        let d = cp.psi_prime_unchecked(s);
        let e = (s * t).exp();
        if integrated {
            (e - 1.0) / d
        } else {
            s * e / d
        }
    };
    let residues = residue(zero.s_z) + residue(zero.s_z.conj());
    let lower = |qq: f64| {
        let w = Complex64::from_polar(qq.powf(p.alpha), -p.alpha * PI);
        (1.0 + w) / (1.0 + p.tau * w)
    };
    let bank = move |qq: f64| -> Complex64 {
        let gp = 1.0 / (qq * qq + branch_upper(qq, p.alpha, p.tau) * theta);
        let gm = 1.0 / (qq * qq + lower(qq) * theta);
        let weight = if integrated { -(-qq * t).exp_m1() } else { qq * (-qq * t).exp() };
        (gp - gm) * weight / Complex64::new(0.0, 2.0 * PI)
    };
    let branch = branch_integral_with(bank, theta, t, p.tau, q, integrated)?;
    let total = residues + branch;
    let scale = 1.0 + total.re.abs();
    if total.im.abs() > 1e-10 * scale {
        return Err(Error::NonConvergence {
            what: "real spectral kernel assembly",
            estimate: total.im.abs(),
        });
    }
    Ok(SpectralKernel {
        rho,
        t,
        branch_part: branch.re,
        residue_part: residues.re,
        total: branch.re + residues.re,
        imag_residual: total.im,
    })
}

fn branch_breaks(theta: f64, t: f64, tau: f64, q_end: f64) -> Vec<f64> {
    let qc = theta.sqrt();
    let mut breaks = vec![0.0];
    for b in [
        0.25 * qc,
        qc,
        qc / tau.sqrt(),
        4.0 * qc / tau.sqrt(),
        1.0 / t,
        5.0 / t,
        20.0 / t,
    ] {
        if b > 0.0 && b < q_end {
            breaks.push(b);
        }
    }
    breaks.push(q_end);
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    breaks
}

/// Integrates a branch-cut integrand over `(0, inf)`: panels up to the
/// truncation point and, for the time-integrated kernel whose integrand has
/// no exponential factor, an algebraic tail beyond it.
fn branch_integral_with<T, F>(f: F, theta: f64, t: f64, tau: f64, q: &QuadratureConfig, integrated: bool) -> Result<T>
where
    T: crate::quadrature::QuadValue,
    F: Fn(f64) -> T + Copy,
{
    let q_end = q.q_max.unwrap_or(50.0 / t);
    let cfg = Adaptive::new(0.1 * q.abs_tol, 0.1 * q.rel_tol).with_max_panels(4000);
    let head = integrate(f, &branch_breaks(theta, t, tau, q_end), cfg, "branch-cut integral")?;
    if !integrated {
        return Ok(head.value);
    }
    let tail = integrate_to_infinity(f, q_end, cfg, "branch-cut integral tail")?;
    Ok(head.value + tail.value)
}

/// Real-only assembly used for bulk evaluation.
fn general_s(theta: f64, t: f64, alpha: f64, tau: f64, s_z: Complex64, q: &QuadratureConfig, integrated: bool) -> Result<f64> {
    let cp = CharParams { alpha, tau, theta };
    let d = cp.psi_prime_unchecked(s_z);
    let e = (s_z * t).exp();
    let residue = if integrated { (e - 1.0) / d } else { s_z * e / d };
    let f = move |qq: f64| -> f64 {
        let g = 1.0 / (qq * qq + branch_upper(qq, alpha, tau) * theta);
        let weight = if integrated { -(-qq * t).exp_m1() } else { qq * (-qq * t).exp() };
        FRAC_1_PI * g.im * weight
    };
    let branch = branch_integral_with(f, theta, t, tau, q, integrated)?;
    Ok(2.0 * residue.re + branch)
}

/// Gauss–Legendre panel rule for `(1/pi) int_0^rho_max (.) e^{-(eps rho)^2/4} drho`.
#[derive(Debug, Clone)]
pub(crate) struct RhoRule {
    pub nodes: Vec<f64>,
    /// Quadrature weight times `(1/pi) e^{-(eps rho)^2/4}`.
    pub weights: Vec<f64>,
}

/// Panels resolve `panels_per_period` panels per period of `cos(rho x)` for
/// `|x| <= extent`.
pub(crate) fn rho_rule(extent: f64, epsilon: f64, q: &QuadratureConfig) -> Result<RhoRule> {
    let rho_max = q.rho_max_for(epsilon);
    let width = if extent > 0.0 {
        (2.0 * PI / (q.panels_per_period as f64 * extent)).min(0.5)
    } else {
        0.5
    };
    let panels = (rho_max / width).ceil() as usize;
    if panels.saturating_mul(RHO_PANEL_ORDER) > RHO_NODE_BUDGET {
        return Err(Error::NonConvergence {
            what: "rho quadrature node budget",
            estimate: (panels * RHO_PANEL_ORDER) as f64,
        });
    }
    let h = rho_max / panels as f64;
    let (gx, gw) = gauss_legendre(RHO_PANEL_ORDER);
    let mut nodes = Vec::with_capacity(panels * RHO_PANEL_ORDER);
    let mut weights = Vec::with_capacity(panels * RHO_PANEL_ORDER);
    for k in 0..panels {
        let a = k as f64 * h;
        for (x, w) in gx.iter().zip(&gw) {
            let rho = a + 0.5 * h * (x + 1.0);
            nodes.push(rho);
            weights.push(FRAC_1_PI * 0.5 * h * w * (-(epsilon * rho).powi(2) / 4.0).exp());
        }
    }
    Ok(RhoRule { nodes, weights })
}

/// Zeros of `Psi` at every rho-node, warm-started along each chunk.
fn node_roots(rule: &RhoRule, p: &ModelParams) -> Result<Vec<Complex64>> {
    let chunks: Vec<Vec<Complex64>> = rule
        .nodes
        .par_chunks(ROOT_CHUNK)
        .map(|chunk| {
            let mut guess = None;
            chunk
                .iter()
                .map(|&rho| {
                    let theta = theta_of_rho(rho, p.beta);
                    if theta == 0.0 {
                        return Ok(Complex64::new(0.0, 0.0));
                    }
                    let cp = CharParams::new(p.alpha, p.tau, theta)?;
                    let z = refine_zero(&cp, guess)?;
                    guess = Some(z.s_z);
                    Ok(z.s_z)
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    Ok(chunks.concat())
}

/// `S` (or its time integral) at every node of `rule` for every `t`.
pub(crate) fn spectral_table(
    rule: &RhoRule,
    t_list: &[f64],
    p: &ModelParams,
    q: &QuadratureConfig,
    integrated: bool,
    force_general: bool,
) -> Result<Vec<Vec<f64>>> {
    if p.beta == 0.0 && !force_general {
        return Ok(t_list
            .iter()
            .map(|&t| vec![if integrated { t } else { 1.0 }; rule.nodes.len()])
            .collect());
    }
    if p.alpha == 0.0 && !force_general {
        return Ok(t_list
            .iter()
            .map(|&t| {
                rule.nodes
                    .iter()
                    .map(|&rho| {
                        if integrated {
                            spectral_kernel_alpha0_integrated(rho, t, p.beta, p.tau)
                        } else {
                            spectral_kernel_alpha0(rho, t, p.beta, p.tau)
                        }
                    })
                    .collect()
            })
            .collect());
    }
    let roots = node_roots(rule, p)?;
    t_list
        .iter()
        .map(|&t| {
            rule.nodes
                .par_iter()
                .zip(roots.par_iter())
                .map(|(&rho, &s_z)| {
                    let theta = theta_of_rho(rho, p.beta);
                    if theta == 0.0 {
                        Ok(if integrated { t } else { 1.0 })
                    } else {
                        general_s(theta, t, p.alpha, p.tau, s_z, q, integrated)
                    }
                })
                .collect::<Result<Vec<f64>>>()
        })
        .collect()
}

/// `sum_j w_j S_j cos(rho_j |x|)` at every `x`; each sum runs in node order.
pub(crate) fn cosine_sum(rule: &RhoRule, s_values: &[f64], x_grid: &[f64]) -> Vec<f64> {
    let coeff: Vec<f64> = rule.weights.iter().zip(s_values).map(|(w, s)| w * s).collect();
    x_grid
        .par_iter()
        .map(|&x| {
            let ax = x.abs();
            rule.nodes.iter().zip(&coeff).map(|(rho, c)| c * (rho * ax).cos()).sum()
        })
        .collect()
}

fn check_grid_and_times(x_grid: &[f64], t_list: &[f64]) -> Result<()> {
    if x_grid.is_empty() || x_grid.iter().any(|x| !x.is_finite()) {
        return Err(Error::invalid("x grid must be non-empty and finite"));
    }
    if x_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid("x grid must be strictly increasing"));
    }
    if t_list.is_empty() || t_list.iter().any(|t| !(*t > 0.0 && t.is_finite())) {
        return Err(Error::invalid("times must be finite and > 0"));
    }
    Ok(())
}

pub(crate) fn route_for(p: &ModelParams) -> KernelRoute {
    if p.beta == 0.0 {
        KernelRoute::NonPropagating
    } else if p.alpha == 0.0 {
        KernelRoute::Alpha0
    } else if p.beta == 1.0 {
        KernelRoute::TimeFractional
    } else {
        KernelRoute::General
    }
}

/// Regularized kernel `K_eps(x, t) = (1/pi) int_0^inf S cos(rho x) e^{-(eps rho)^2/4} drho`.
pub fn kernel_eps(x_grid: &[f64], t_list: &[f64], p: &ModelParams, q: &QuadratureConfig) -> Result<Field> {
    kernel_eps_impl(x_grid, t_list, p, q, false)
}

/// `int_0^t K_eps(x, t') dt'`, the kernel applied to the initial velocity.
pub fn kernel_eps_integrated(x_grid: &[f64], t_list: &[f64], p: &ModelParams, q: &QuadratureConfig) -> Result<Field> {
    kernel_eps_impl(x_grid, t_list, p, q, true)
}

fn kernel_eps_impl(x_grid: &[f64], t_list: &[f64], p: &ModelParams, q: &QuadratureConfig, integrated: bool) -> Result<Field> {
    let p = validate_model(*p)?;
    q.validate(p.epsilon)?;
    check_grid_and_times(x_grid, t_list)?;
    let route = route_for(&p);
    let meta = FieldMeta {
        model: p,
        quadrature: *q,
        route,
    };
    let values = match route {
        KernelRoute::NonPropagating => t_list
            .iter()
            .map(|&t| {
                let scale = if integrated { t } else { 1.0 };
                x_grid.iter().map(|&x| scale * delta_eps(x, p.epsilon)).collect()
            })
            .collect(),
        KernelRoute::TimeFractional => {
            let smooth = |x: f64| delta_eps(x, p.epsilon);
            return Ok(Field {
                x_grid: x_grid.to_vec(),
                t_list: t_list.to_vec(),
                values: time_fractional_rows(x_grid, t_list, p.alpha, p.tau, p.epsilon, q, integrated, &smooth)?,
                meta,
            });
        }
        _ => {
            let extent = x_grid.iter().fold(0.0f64, |m, x| m.max(x.abs()));
            let rule = rho_rule(extent, p.epsilon, q)?;
            let table = spectral_table(&rule, t_list, &p, q, integrated, false)?;
            table.iter().map(|s| cosine_sum(&rule, s, x_grid)).collect()
        }
    };
    Ok(Field {
        x_grid: x_grid.to_vec(),
        t_list: t_list.to_vec(),
        values,
        meta,
    })
}

/// `K_eps` through the residue-plus-branch-cut assembly for any admissible
/// parameters, bypassing the limiting-case routing of [`kernel_eps`]. Used
/// to compare the general assembly with the limiting representations.
pub fn kernel_eps_spectral(x_grid: &[f64], t_list: &[f64], p: &ModelParams, q: &QuadratureConfig) -> Result<Field> {
    let p = validate_model(*p)?;
    q.validate(p.epsilon)?;
    check_grid_and_times(x_grid, t_list)?;
    let extent = x_grid.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let rule = rho_rule(extent, p.epsilon, q)?;
    let table = spectral_table(&rule, t_list, &p, q, false, true)?;
    Ok(Field {
        x_grid: x_grid.to_vec(),
        t_list: t_list.to_vec(),
        values: table.iter().map(|s| cosine_sum(&rule, s, x_grid)).collect(),
        meta: FieldMeta {
            model: p,
            quadrature: *q,
            route: KernelRoute::General,
        },
    })
}

/// Classical wave kernel `(delta_eps(x + c t) + delta_eps(x - c t)) / 2`,
/// `c = sqrt(2 / (1 + tau))`. `tau` is not range-checked so the unit-speed
/// case `tau = 1` is reachable.
pub fn kernel_classical(x_grid: &[f64], t_list: &[f64], tau: f64, epsilon: f64) -> Field {
    let c = (2.0 / (1.0 + tau)).sqrt();
    let values = t_list
        .iter()
        .map(|&t| {
            x_grid
                .iter()
                .map(|&x| 0.5 * (delta_eps(x + c * t, epsilon) + delta_eps(x - c * t, epsilon)))
                .collect()
        })
        .collect();
    Field {
        x_grid: x_grid.to_vec(),
        t_list: t_list.to_vec(),
        values,
        meta: FieldMeta {
            model: ModelParams {
                alpha: 0.0,
                beta: 1.0,
                tau,
                epsilon,
            },
            quadrature: QuadratureConfig::default(),
            route: KernelRoute::Classical,
        },
    }
}

/// Time-fractional (`beta = 1`) kernel regularized by `delta_eps`.
pub fn kernel_time_fractional(
    x_grid: &[f64],
    t_list: &[f64],
    alpha: f64,
    tau: f64,
    epsilon: f64,
    q: &QuadratureConfig,
) -> Result<Field> {
    let p = validate_model(ModelParams {
        alpha,
        beta: 1.0,
        tau,
        epsilon,
    })?;
    if alpha == 0.0 {
        return Err(Error::invalid("the time-fractional kernel needs alpha in (0, 1)"));
    }
    q.validate(epsilon)?;
    check_grid_and_times(x_grid, t_list)?;
    let smooth = |x: f64| delta_eps(x, epsilon);
    Ok(Field {
        x_grid: x_grid.to_vec(),
        t_list: t_list.to_vec(),
        values: time_fractional_rows(x_grid, t_list, alpha, tau, epsilon, q, false, &smooth)?,
        meta: FieldMeta {
            model: p,
            quadrature: *q,
            route: KernelRoute::TimeFractional,
        },
    })
}

/// Rows of `(K * g)(x, t)` for the unregularized time-fractional kernel `K`
/// and a smooth function `g` (already containing `delta_eps`).
#[allow(clippy::too_many_arguments)]
pub(crate) fn time_fractional_rows(
    x_grid: &[f64],
    t_list: &[f64],
    alpha: f64,
    tau: f64,
    epsilon: f64,
    q: &QuadratureConfig,
    integrated: bool,
    g: &(dyn Fn(f64) -> f64 + Sync),
) -> Result<Vec<Vec<f64>>> {
    let h = epsilon / FINE_STEPS_PER_EPS;
    t_list
        .iter()
        .map(|&t| {
            let front = t / tau.sqrt();
            let n = (front / h).ceil() as usize + 1;
            let k_values = (0..=n)
                .into_par_iter()
                .map(|k| time_fractional_point(k as f64 * h, t, alpha, tau, integrated, q))
                .collect::<Result<Vec<f64>>>()?;
            Ok(x_grid
                .par_iter()
                .map(|&x| {
                    let mut sum = k_values[0] * g(x);
                    for (k, kv) in k_values.iter().enumerate().skip(1) {
                        let y = k as f64 * h;
                        sum += kv * (g(x - y) + g(x + y));
                    }
                    h * sum
                })
                .collect())
        })
        .collect()
}

fn f_upper(qq: f64, alpha: f64, tau: f64) -> Complex64 {
    // sqrt of the reciprocal Zener ratio on the upper bank of the cut
    (1.0 / branch_upper(qq, alpha, tau)).sqrt()
}

fn f_of_s(s: Complex64, alpha: f64, tau: f64) -> Complex64 {
    (1.0 / zener_ratio_unchecked(s, alpha, tau)).sqrt()
}

/// Unregularized time-fractional kernel `K(y, t)` (or its time integral).
///
/// Zero outside the cone `|y| sqrt(tau) >= t`. Inside it the branch-cut
/// representation `-(1/2pi) int Im[f+ e^{q(|y| f+ - t)}] dq` is used unless
/// its integrand grows on the way (near the front when `alpha < 1/2`), in
/// which case the Bromwich line integral of `(f/2) e^{-|y| s f}` is used.
pub fn time_fractional_point(y: f64, t: f64, alpha: f64, tau: f64, integrated: bool, q: &QuadratureConfig) -> Result<f64> {
    let y = y.abs();
    if y * tau.sqrt() >= t {
        return Ok(0.0);
    }
    // scan the exponent Re q (y f+ - t) on a logarithmic q-grid
    let exponent = |qq: f64| qq * (y * f_upper(qq, alpha, tau).re - t);
    let scan: Vec<(f64, f64)> = (0..=220)
        .map(|k| {
            let qq = 10f64.powf(-3.0 + k as f64 * 0.05);
            (qq, exponent(qq))
        })
        .collect();
    let growth = scan.iter().fold(f64::NEG_INFINITY, |m, &(_, e)| m.max(e));
    if growth <= GROWTH_LIMIT {
        let q_end = scan
            .iter()
            .rev()
            .find(|(_, e)| *e > -60.0)
            .map_or(1e-3, |&(qq, _)| qq)
            * 2.0;
        tf_branch(y, t, alpha, tau, integrated, q, q_end)
    } else {
        tf_bromwich(y, t, alpha, tau, integrated, q)
    }
}

fn tf_branch(y: f64, t: f64, alpha: f64, tau: f64, integrated: bool, q: &QuadratureConfig, q_end: f64) -> Result<f64> {
    let f = move |qq: f64| -> f64 {
        if qq == 0.0 {
            return 0.0;
        }
        let fp = f_upper(qq, alpha, tau);
        let v = 0.5 * fp * (qq * (y * fp - t)).exp();
        if integrated {
            FRAC_1_PI * v.im / qq
        } else {
            -FRAC_1_PI * v.im
        }
    };
    let mut breaks = vec![0.0];
    for b in [1e-2 / t, 0.1 / t, 1.0 / t, 5.0 / t, 20.0 / t] {
        if b < q_end {
            breaks.push(b);
        }
    }
    breaks.push(q_end);
    let cfg = Adaptive::new(0.1 * q.abs_tol, 0.1 * q.rel_tol).with_max_panels(4000);
    let est = integrate(f, &breaks, cfg, "time-fractional branch integral")?;
    // the small circle around the origin contributes K~(y, 0) = 1/2
    Ok(if integrated { 0.5 + est.value } else { est.value })
}

fn tf_bromwich(y: f64, t: f64, alpha: f64, tau: f64, integrated: bool, q: &QuadratureConfig) -> Result<f64> {
    let s0 = 1.0 / t;
    let g = move |p: f64| -> f64 {
        let s = Complex64::new(s0, p);
        let f = f_of_s(s, alpha, tau);
        let mut v = 0.5 * f * (s * t - y * s * f).exp();
        if integrated {
            v /= s;
        }
        FRAC_1_PI * v.re
    };
    // integrate panel by panel until the integrand envelope is negligible
    let width = PI / t;
    let cfg = Adaptive::new(0.01 * q.abs_tol, 0.1 * q.rel_tol).with_max_panels(400);
    let mut total = 0.0;
    let mut quiet = 0;
    let max_panels = 200_000;
    for k in 0..max_panels {
        let (a, b) = (k as f64 * width, (k + 1) as f64 * width);
        let est = integrate(g, &[a, b], cfg, "time-fractional Bromwich integral")?;
        total += est.value;
        let s = Complex64::new(s0, b);
        let mut envelope = (0.5 * f_of_s(s, alpha, tau) * (s * t - y * s * f_of_s(s, alpha, tau)).exp()).norm();
        if integrated {
            envelope /= s.norm();
        }
        if envelope * width < 1e-3 * q.abs_tol {
            quiet += 1;
            if quiet >= 3 {
                return Ok(total);
            }
        } else {
            quiet = 0;
        }
    }
    Err(Error::NonConvergence {
        what: "time-fractional Bromwich integral",
        estimate: total,
    })
}
