//! Location and certification of the zero pair of `Psi`.
//!
//! `Psi` has exactly one zero in the open upper half-plane (plus its
//! conjugate). It is located by damped Newton iteration started from the
//! `alpha = 0` zero `i sqrt(2 theta / (1 + tau))`, with bisection on winding
//! numbers as the fallback, and certified by the argument principle.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use serde::Serialize;

use crate::charfun::CharParams;
use crate::error::{Error, Result};

/// Distance by which contours are kept off the branch cut.
pub const CUT_INDENT: f64 = 1e-9;
/// Maximum number of `Psi` evaluations spent on one winding number.
pub const NODE_BUDGET: usize = 200_000;
/// Half-width multiplier of the certification window.
pub const WINDOW_FACTOR: f64 = 4.0;

const NEWTON_MAX_ITER: usize = 100;
const NEWTON_STEP_TOL: f64 = 1e-13;
const BISECTION_DEPTH: usize = 60;
// a sample closer than this (Newton distance) to a zero rejects the contour
const CONTOUR_CLEARANCE: f64 = 1e-8;

/// Axis-aligned closed rectangle in the complex plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Rect {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl Rect {
    pub fn new(re_min: f64, re_max: f64, im_min: f64, im_max: f64) -> Result<Self> {
        let r = Rect {
            re_min,
            re_max,
            im_min,
            im_max,
        };
        let finite = [re_min, re_max, im_min, im_max].iter().all(|v| v.is_finite());
        if !finite || re_min >= re_max || im_min >= im_max {
            return Err(Error::invalid(format!("degenerate rectangle {r:?}")));
        }
        Ok(r)
    }

    fn width(&self) -> f64 {
        self.re_max - self.re_min
    }

    fn height(&self) -> f64 {
        self.im_max - self.im_min
    }

    fn touches_cut(&self) -> bool {
        self.re_min <= 0.0 && self.im_min <= 0.0 && self.im_max >= 0.0
    }

    fn grown(&self, by: f64) -> Rect {
        Rect {
            re_min: self.re_min - by,
            re_max: self.re_max + by,
            im_min: self.im_min - by,
            im_max: self.im_max + by,
        }
    }

    /// Pieces of the rectangle that stay `CUT_INDENT` away from `(-inf, 0]`.
    fn off_cut_pieces(&self) -> Vec<Rect> {
        if !self.touches_cut() {
            return vec![*self];
        }
        let d = CUT_INDENT;
        let mut pieces = Vec::new();
        if self.im_max > d {
            pieces.push(Rect {
                im_min: self.im_min.max(d),
                ..*self
            });
        }
        if self.im_min < -d {
            pieces.push(Rect {
                im_max: self.im_max.min(-d),
                ..*self
            });
        }
        if self.re_max > d {
            pieces.push(Rect {
                re_min: self.re_min.max(d),
                im_min: self.im_min.max(-d),
                im_max: self.im_max.min(d),
                ..*self
            });
        }
        pieces.retain(|r| r.re_min < r.re_max && r.im_min < r.im_max);
        pieces
    }

    fn contains(&self, s: Complex64) -> bool {
        s.re >= self.re_min && s.re <= self.re_max && s.im >= self.im_min && s.im <= self.im_max
    }
}

/// The zero of `Psi` in the upper half-plane; its conjugate is implied.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ZeroPair {
    pub s_z: Complex64,
    /// `|Psi(s_z)|`.
    pub residual: f64,
    /// True when the argument principle confirmed a simple, unique zero.
    pub winding_checked: bool,
    pub iterations: usize,
    /// Set when `alpha > 0` but `|Re s_z| < 1e-9`.
    pub near_imaginary_axis: bool,
}

impl ZeroPair {
    pub fn conjugate(&self) -> Complex64 {
        self.s_z.conj()
    }
}

/// Certification window `[-c M, 1e-6 M] x [d, c M]`,
/// `M = max(1, 2 sqrt(theta / tau))`.
///
/// The small overhang past the imaginary axis keeps the purely imaginary
/// `alpha = 0` zero strictly inside.
pub fn search_window(p: &CharParams) -> Rect {
    let m = (2.0 * (p.theta / p.tau).sqrt()).max(1.0);
    Rect {
        re_min: -WINDOW_FACTOR * m,
        re_max: 1e-6 * m,
        im_min: CUT_INDENT,
        im_max: WINDOW_FACTOR * m,
    }
}

/// Right half-plane companion of [`search_window`], `[1e-6 M, c M] x [-c M, c M]`.
pub fn right_half_window(p: &CharParams) -> Rect {
    let w = search_window(p);
    Rect {
        re_min: w.re_max,
        re_max: w.im_max,
        im_min: -w.im_max,
        im_max: w.im_max,
    }
}

/// Number of zeros of `Psi` inside `rect`, counted with multiplicity.
///
/// Portions of the rectangle within `CUT_INDENT` of the cut are excluded.
/// A contour passing too close to a zero is pushed outward a few times
/// before giving up.
pub fn winding_number(rect: &Rect, p: &CharParams) -> Result<i64> {
    p.validate()?;
    let mut total = 0;
    for piece in rect.off_cut_pieces() {
        total += piece_winding(&piece, p)?;
    }
    Ok(total)
}

fn piece_winding(rect: &Rect, p: &CharParams) -> Result<i64> {
    let size = rect.width().max(rect.height());
    for attempt in 0..6 {
        let trial = if attempt == 0 {
            *rect
        } else {
            let g = rect.grown(size * 1e-7 * 10f64.powi(attempt));
            // never grow across the cut
            if g.touches_cut() && !rect.touches_cut() {
                return Err(Error::ZeroNearContour);
            }
            g
        };
        match contour_winding(&trial, p) {
            Ok(w) => return Ok(w),
            Err(Error::ZeroNearContour) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::ZeroNearContour)
}

fn contour_winding(rect: &Rect, p: &CharParams) -> Result<i64> {
    let corners = [
        Complex64::new(rect.re_min, rect.im_min),
        Complex64::new(rect.re_max, rect.im_min),
        Complex64::new(rect.re_max, rect.im_max),
        Complex64::new(rect.re_min, rect.im_max),
    ];
    let mut budget = NODE_BUDGET;
    let mut change = 0.0;
    for k in 0..4 {
        change += edge_arg_change(p, corners[k], corners[(k + 1) % 4], &mut budget)?;
    }
    let turns = change / (2.0 * PI);
    let rounded = turns.round();
    if (turns - rounded).abs() > 0.1 {
        return Err(Error::ZeroNearContour);
    }
    Ok(rounded as i64)
}

fn sample(p: &CharParams, s: Complex64, budget: &mut usize) -> Result<Complex64> {
    if *budget == 0 {
        return Err(Error::ZeroNearContour);
    }
    *budget -= 1;
    let f = p.psi_unchecked(s);
    let d = p.psi_prime_unchecked(s);
    // Newton distance |Psi / Psi'| approximates the distance to a simple zero
    if f.norm() <= CONTOUR_CLEARANCE * d.norm() {
        return Err(Error::ZeroNearContour);
    }
    Ok(f)
}

/// Total change of `arg Psi` along the segment `a -> b`, refined until
/// consecutive samples differ in argument by less than `pi/2`.
fn edge_arg_change(p: &CharParams, a: Complex64, b: Complex64, budget: &mut usize) -> Result<f64> {
    const INITIAL: usize = 32;
    let at = |t: f64| a + (b - a) * t;
    let mut change = 0.0;
    let mut t0 = 0.0;
    let mut f0 = sample(p, a, budget)?;
    for k in 1..=INITIAL {
        let t1 = k as f64 / INITIAL as f64;
        let f1 = sample(p, at(t1), budget)?;
        // depth-first refinement of [t0, t1]
        let mut stack = vec![(t1, f1)];
        while let Some(&(tr, fr)) = stack.last() {
            let d = (fr * f0.conj()).arg();
            if d.abs() < FRAC_PI_2 {
                change += d;
                t0 = tr;
                f0 = fr;
                stack.pop();
            } else {
                let tm = 0.5 * (t0 + tr);
                if tm <= t0 || tm >= tr {
                    return Err(Error::ZeroNearContour);
                }
                let fm = sample(p, at(tm), budget)?;
                stack.push((tm, fm));
            }
        }
    }
    Ok(change)
}

fn alpha_zero_root(p: &CharParams) -> Complex64 {
    Complex64::new(0.0, (2.0 * p.theta / (1.0 + p.tau)).sqrt())
}

/// Keeps an iterate in the closed upper half-plane, off the cut.
fn fold_upper(s: Complex64) -> Complex64 {
    let s = if s.im < 0.0 { s.conj() } else { s };
    if s.im == 0.0 && s.re <= 0.0 {
        Complex64::new(s.re, CUT_INDENT)
    } else {
        s
    }
}

struct NewtonOutcome {
    s: Complex64,
    iterations: usize,
}

/// Damped Newton iteration; `None` when it fails to converge.
fn newton(p: &CharParams, start: Complex64) -> Option<NewtonOutcome> {
    let mut s = fold_upper(start);
    let mut f = p.psi_unchecked(s);
    for it in 1..=NEWTON_MAX_ITER {
        let d = p.psi_prime_unchecked(s);
        if d.norm() == 0.0 || !f.norm().is_finite() {
            return None;
        }
        let step = -f / d;
        let mut lambda = 1.0;
        let mut accepted = None;
        for _ in 0..=20 {
            let trial = fold_upper(s + step * lambda);
            let ft = p.psi_unchecked(trial);
            if ft.norm() < f.norm() || ft.norm() == 0.0 {
                accepted = Some((trial, ft));
                break;
            }
            lambda *= 0.5;
        }
        let (next, fnext) = match accepted {
            Some(v) => v,
            // no decrease possible: either converged to rounding level or stuck
            None => {
                let tol = NEWTON_STEP_TOL * s.norm().max(1.0);
                return (step.norm() <= tol * 10.0).then_some(NewtonOutcome { s, iterations: it });
            }
        };
        // judge convergence by the full Newton step: a heavily damped
        // move can be tiny far away from the zero
        let full_step = step.norm();
        s = next;
        f = fnext;
        if lambda == 1.0 && full_step <= NEWTON_STEP_TOL * s.norm().max(1.0) {
            return Some(NewtonOutcome { s, iterations: it });
        }
    }
    None
}

fn bisect_on_winding(p: &CharParams) -> Result<(Complex64, usize)> {
    let mut rect = search_window(p);
    if winding_number(&rect, p)? != 1 {
        return Err(Error::NonConvergence {
            what: "zero bracketing",
            estimate: rect.width().max(rect.height()),
        });
    }
    for depth in 0..BISECTION_DEPTH {
        let (first, second) = if depth % 2 == 0 {
            let mid = 0.5 * (rect.re_min + rect.re_max);
            (Rect { re_max: mid, ..rect }, Rect { re_min: mid, ..rect })
        } else {
            let mid = 0.5 * (rect.im_min + rect.im_max);
            (Rect { im_max: mid, ..rect }, Rect { im_min: mid, ..rect })
        };
        rect = if matches!(winding_number(&first, p), Ok(1)) {
            first
        } else if matches!(winding_number(&second, p), Ok(1)) {
            second
        } else {
            break;
        };
        let center = Complex64::new(0.5 * (rect.re_min + rect.re_max), 0.5 * (rect.im_min + rect.im_max));
        if let Some(out) = newton(p, center) {
            if rect.grown(rect.width().max(rect.height())).contains(out.s) {
                return Ok((out.s, out.iterations + depth));
            }
        }
    }
    Err(Error::NonConvergence {
        what: "winding bisection",
        estimate: rect.width().max(rect.height()),
    })
}

/// Small rectangle around `s`, kept above the cut.
fn certification_box(s: Complex64) -> Rect {
    let h = (1e-3 * s.norm()).max(1e-6).min(0.5 * s.im.max(2.0 * CUT_INDENT));
    Rect {
        re_min: s.re - h,
        re_max: s.re + h,
        im_min: (s.im - h).max(CUT_INDENT),
        im_max: s.im + h,
    }
}

fn finish(p: &CharParams, s: Complex64, iterations: usize, certify: bool) -> Result<ZeroPair> {
    let residual = p.psi_unchecked(s).norm();
    let bound = 1e-10 * s.norm_sqr().max(1.0);
    if !(residual <= bound) {
        return Err(Error::NonConvergence {
            what: "zero refinement",
            estimate: residual,
        });
    }
    let winding_checked = if certify {
        let local = winding_number(&certification_box(s), p)?;
        let global = winding_number(&search_window(p), p)?;
        if local != 1 || global != 1 {
            return Err(Error::NonConvergence {
                what: "zero certification",
                estimate: residual,
            });
        }
        true
    } else {
        false
    };
    Ok(ZeroPair {
        s_z: s,
        residual,
        winding_checked,
        iterations,
        near_imaginary_axis: p.alpha > 0.0 && s.re.abs() < 1e-9,
    })
}

/// Locates and certifies the upper zero of `Psi`.
pub fn find_zero_pair(p: &CharParams) -> Result<ZeroPair> {
    p.validate()?;
    if p.alpha == 0.0 {
        return finish(p, alpha_zero_root(p), 0, true);
    }
    if let Some(out) = newton(p, alpha_zero_root(p)) {
        if let Ok(z) = finish(p, out.s, out.iterations, true) {
            return Ok(z);
        }
    }
    let (s, iterations) = bisect_on_winding(p)?;
    finish(p, s, iterations, true)
}

/// Newton refinement from `guess` without the winding certification.
///
/// Any converged point in the upper half-plane is the unique zero there, so
/// the result is only left uncertified, not less accurate. Falls back to
/// [`find_zero_pair`] when Newton fails.
pub fn refine_zero(p: &CharParams, guess: Option<Complex64>) -> Result<ZeroPair> {
    p.validate()?;
    if p.alpha == 0.0 {
        return finish(p, alpha_zero_root(p), 0, false);
    }
    let start = guess.unwrap_or_else(|| alpha_zero_root(p));
    match newton(p, start) {
        Some(out) => match finish(p, out.s, out.iterations, false) {
            Ok(z) => Ok(z),
            Err(_) => find_zero_pair(p),
        },
        None => find_zero_pair(p),
    }
}
