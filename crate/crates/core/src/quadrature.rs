//! Quadrature building blocks: Gauss–Legendre rules and a globally adaptive
//! 21-point Gauss–Kronrod integrator for real or complex integrands.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Values an adaptive rule can accumulate.
pub trait QuadValue: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {
    fn zero() -> Self;
    fn norm(self) -> f64;
}

impl QuadValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn norm(self) -> f64 {
        self.abs()
    }
}

impl QuadValue for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn norm(self) -> f64 {
        Complex64::norm(self)
    }
}

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`,
/// nodes in increasing order.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

// Kronrod abscissae and weights of the 21-point rule, Gauss weights of the
// embedded 10-point rule (values from QUADPACK qk21).
const XGK: [f64; 11] = [
    0.995657163025808080735527280689003,
    0.973906528517171720077964012084452,
    0.930157491355708226001207180059508,
    0.865063366688984510732096688423493,
    0.780817726586416897063717578345042,
    0.679409568299024406234327365114874,
    0.562757134668604683339000099272694,
    0.433395394129247190799265943165784,
    0.294392862701460198131126603103866,
    0.148874338981631210884826001129720,
    0.0,
];
const WGK: [f64; 11] = [
    0.011694638867371874278064396062192,
    0.032558162307964727478818972459390,
    0.054755896574351996031381300244580,
    0.075039674810919952767043140916190,
    0.093125454583697605535065465083366,
    0.109387158802297641899210590325805,
    0.123491976262065851077600525634777,
    0.134709217311473325928054001771707,
    0.142775938577060080797094273138717,
    0.147739104901338491374841515972068,
    0.149445554002916905664936468389821,
];
const WG: [f64; 5] = [
    0.066671344308688137593568809893332,
    0.149451349150580593145776339657697,
    0.219086362515982043995534934228163,
    0.269266719309996355091226921569469,
    0.295524224714752870173892994651338,
];

struct Panel<T> {
    a: f64,
    b: f64,
    value: T,
    error: f64,
}

fn kronrod21<T: QuadValue, F: FnMut(f64) -> T>(f: &mut F, a: f64, b: f64) -> Panel<T> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut resk = fc * WGK[10];
    let mut resg = T::zero();
    let mut resabs = fc.norm() * WGK[10];
    let mut fv1 = [T::zero(); 10];
    let mut fv2 = [T::zero(); 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        resk = resk + (f1 + f2) * WGK[j];
        resabs += WGK[j] * (f1.norm() + f2.norm());
        if j % 2 == 1 {
            resg = resg + (f1 + f2) * WG[j / 2];
        }
    }
    let mean = resk * 0.5;
    let mut resasc = WGK[10] * (fc - mean).norm();
    for j in 0..10 {
        resasc += WGK[j] * ((fv1[j] - mean).norm() + (fv2[j] - mean).norm());
    }
    let value = resk * half;
    let resabs = resabs * half.abs();
    let resasc = resasc * half.abs();
    let mut error = ((resk - resg) * half).norm();
    if resasc != 0.0 && error != 0.0 {
        error = resasc * (200.0 * error / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * resabs);
    }
    Panel { a, b, value, error }
}

/// Outcome of an adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct Estimate<T> {
    pub value: T,
    pub error: f64,
    pub evaluations: usize,
}

/// Tolerances and budget for [`integrate`].
#[derive(Debug, Clone, Copy)]
pub struct Adaptive {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_panels: usize,
}

impl Adaptive {
    pub fn new(abs_tol: f64, rel_tol: f64) -> Self {
        Adaptive {
            abs_tol,
            rel_tol,
            max_panels: 2000,
        }
    }

    pub fn with_max_panels(mut self, max_panels: usize) -> Self {
        self.max_panels = max_panels;
        self
    }
}

/// Integrates `f` over the polyline `breaks[0] < breaks[1] < ...` by
/// bisecting the panel with the largest error estimate until the total
/// estimate meets `max(abs_tol, rel_tol * |I|)`.
///
/// The panel sequence depends only on the integrand values, so repeated
/// calls are bit-identical.
pub fn integrate<T, F>(mut f: F, breaks: &[f64], cfg: Adaptive, what: &'static str) -> Result<Estimate<T>>
where
    T: QuadValue,
    F: FnMut(f64) -> T,
{
    assert!(breaks.len() >= 2, "need at least one panel");
    let mut panels: Vec<Panel<T>> = breaks
        .windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| kronrod21(&mut f, w[0], w[1]))
        .collect();
    let mut evaluations = 21 * panels.len();
    // panels too narrow to split keep their error here
    let mut frozen_error = 0.0;
    let mut frozen_value = T::zero();

    loop {
        let total = panels.iter().fold(frozen_value, |acc, p| acc + p.value);
        let err: f64 = frozen_error + panels.iter().map(|p| p.error).sum::<f64>();
        let target = cfg.abs_tol.max(cfg.rel_tol * total.norm());
        if err <= target || panels.is_empty() {
            return Ok(Estimate {
                value: total,
                error: err,
                evaluations,
            });
        }
        if panels.len() >= cfg.max_panels {
            return Err(Error::NonConvergence { what, estimate: err });
        }
        let (worst, _) = panels
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |(bi, be), (i, p)| {
                if p.error > be {
                    (i, p.error)
                } else {
                    (bi, be)
                }
            });
        let p = panels.swap_remove(worst);
        let mid = 0.5 * (p.a + p.b);
        let scale = p.a.abs().max(p.b.abs()).max(f64::MIN_POSITIVE);
        if (p.b - p.a) <= 64.0 * f64::EPSILON * scale {
            frozen_error += p.error;
            frozen_value = frozen_value + p.value;
            continue;
        }
        panels.push(kronrod21(&mut f, p.a, mid));
        panels.push(kronrod21(&mut f, mid, p.b));
        evaluations += 42;
    }
}

/// Integrates `f` over `[a, inf)` through the map `x = a + (1 - u) / u`.
pub fn integrate_to_infinity<T, F>(mut f: F, a: f64, cfg: Adaptive, what: &'static str) -> Result<Estimate<T>>
where
    T: QuadValue,
    F: FnMut(f64) -> T,
{
    let g = |u: f64| {
        let x = a + (1.0 - u) / u;
        f(x) * (1.0 / (u * u))
    };
    integrate(g, &[0.0, 0.5, 1.0], cfg, what)
}
