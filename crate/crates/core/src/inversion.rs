//! Principal-branch inversion of `x = v(t, p)`.
//!
//! On the real axis `v(t, ·)` increases from `-d(t)` at the turning point
//! `p = -α(t)` to `+∞` at `p = 0⁻`, so for real `x > -d(t)` the solution
//! `p̄(t, x)` is bracketed in `(-α(t), 0)`. Off the axis the solution is
//! followed in `t` from `p̄(0, x) = u₀′(x)`, which keeps it on the branch
//! regular at the origin and in the upper half-plane when `Im x > 0`.

use num_complex::Complex64 as C;
use serde::{Deserialize, Serialize};

use crate::error::{domain, FlowError, Result};
use crate::initcond::u0_prime;
use crate::params::{check_finite, ComplexValue, Flavor, FlowParams};
use crate::quad::adaptive_simpson;
use crate::roots::{bisect, newton_bracketed};
use crate::scalarflow::{flow_derivs, flow_derivs_real};

/// How an inversion was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InversionMethod {
    Newton,
    ContourIntegral,
    Bisection,
}

/// Solution of `v(t, p̄) = x` on the principal branch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InversionResult {
    pub pbar: ComplexValue,
    /// `|v(t, p̄) - x| / (max(1, |x|) · G(t))` with `G = e^{4t}` for the
    /// normal flavor and `G = 1` for the critical one.
    pub residual: f64,
    pub method: InversionMethod,
    pub iterations: usize,
}

/// A point transported along a characteristic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CharState {
    pub p: f64,
    pub v: f64,
    pub t: f64,
}

/// Size of `v` relative to `O(1)` data: `v` carries a factor `e^{4t}` in
/// the normal flavor.
pub(crate) fn growth(params: &FlowParams) -> f64 {
    match params.flavor {
        Flavor::Critical => 1.0,
        Flavor::Normal => (4.0 * params.t).exp(),
    }
}

fn residual_scale(params: &FlowParams, x: C) -> f64 {
    x.norm().max(1.0) * growth(params)
}

/// Turning point `α(t)`: the first zero of `∂v/∂p` to the left of the origin.
pub(crate) fn turning_point(params: &FlowParams) -> Result<f64> {
    const OP: &str = "alpha_of_t";
    let slope = |p: f64| flow_derivs_real(params, p).map(|d| d.dv);
    let mut right = -(0.5 * params.beta).min(1.0);
    let mut shrink = 0;
    while slope(right)? <= 0.0 {
        right *= 0.5;
        shrink += 1;
        if shrink > 80 {
            return Err(FlowError::NoConvergence {
                op: OP,
                iterations: shrink,
            });
        }
    }
    let mut left = right;
    loop {
        let next = left * 1.25;
        if next < -1e8 {
            return Err(FlowError::NoConvergence {
                op: OP,
                iterations: 0,
            });
        }
        if slope(next)? <= 0.0 {
            let root = bisect(OP, slope, next, left, 1e-15)?;
            return Ok(-root);
        }
        left = next;
    }
}

/// Closed-form position `p(t)` of the characteristic through `p₀`.
pub fn characteristic_position(params: &FlowParams, p0: f64, t: f64) -> f64 {
    let eps = (-2.0 * t).exp();
    match params.flavor {
        Flavor::Critical => p0 * eps / (1.0 + p0 - p0 * eps),
        Flavor::Normal => p0 / (1.0 + p0 - p0 * eps),
    }
}

fn char_rhs(params: &FlowParams, t: f64, p: f64, v: f64) -> (f64, f64) {
    match params.flavor {
        Flavor::Critical => (-2.0 * p * (1.0 + p), -1.0 + (6.0 + 4.0 * p) * v),
        Flavor::Normal => {
            let eps = (-2.0 * t).exp();
            (-2.0 * p * p * eps, -eps + (4.0 + 4.0 * eps * p) * v)
        }
    }
}

/// Fixed-step RK4 integration of the characteristic system from
/// `(p₀, v(0, p₀))` to `t_end`.
pub fn characteristics_oracle(
    params: &FlowParams,
    p0: f64,
    t_end: f64,
    steps: usize,
) -> Result<CharState> {
    const OP: &str = "characteristics_oracle";
    if steps < 100 {
        return domain(OP, format!("needs at least 100 steps, got {steps}"));
    }
    if !(p0.is_finite() && p0 != 0.0) {
        return domain(OP, format!("p0 must be finite and nonzero, got {p0}"));
    }
    if !(t_end.is_finite() && t_end >= 0.0) {
        return domain(OP, format!("t_end must be finite and >= 0, got {t_end}"));
    }
    let h = t_end / steps as f64;
    let (mut p, mut v) = (p0, 1.0 / (2.0 * p0) + params.beta / (4.0 * p0 * p0));
    for i in 0..steps {
        let t = i as f64 * h;
        let (k1p, k1v) = char_rhs(params, t, p, v);
        let (k2p, k2v) = char_rhs(params, t + h / 2.0, p + h / 2.0 * k1p, v + h / 2.0 * k1v);
        let (k3p, k3v) = char_rhs(params, t + h / 2.0, p + h / 2.0 * k2p, v + h / 2.0 * k2v);
        let (k4p, k4v) = char_rhs(params, t + h, p + h * k3p, v + h * k3v);
        p += h / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
        v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        if !(p.abs() <= 1e12 && v.abs() <= 1e12) {
            return Err(FlowError::BlowUp { t: t + h });
        }
    }
    Ok(CharState { p, v, t: t_end })
}

fn solve_real(params: &FlowParams, x: f64, tol: f64) -> Result<InversionResult> {
    const OP: &str = "solve_pbar";
    let alpha = turning_point(params)?;
    let edge = flow_derivs_real(params, -alpha)?.v;
    if x <= edge {
        return Err(FlowError::BranchCut(OP));
    }
    let f = |p: f64| flow_derivs_real(params, p).map(|d| (d.v - x, d.dv));
    let mut hi = -0.5 * alpha;
    let mut tries = 0;
    while f(hi)?.0 <= 0.0 {
        hi *= 0.25;
        tries += 1;
        if tries > 200 {
            return Err(FlowError::Bracket {
                op: OP,
                lo: -alpha,
                hi,
            });
        }
    }
    let guess = u0_prime(C::new(x, 0.0), params.beta)
        .map(|z| z.re)
        .unwrap_or(0.5 * (hi - alpha));
    let sol = newton_bracketed(OP, f, -alpha, hi, guess, 1e-15)?;
    if sol.root < -alpha {
        return Err(FlowError::OffBranch {
            op: OP,
            detail: format!("p = {} < -alpha = {}", sol.root, -alpha),
        });
    }
    let residual = f(sol.root)?.0.abs() / residual_scale(params, C::new(x, 0.0));
    if residual.is_nan() || residual > tol {
        return Err(FlowError::NoConvergence {
            op: OP,
            iterations: sol.iterations,
        });
    }
    Ok(InversionResult {
        pbar: C::new(sol.root, 0.0),
        residual,
        method: if sol.bisected {
            InversionMethod::Bisection
        } else {
            InversionMethod::Newton
        },
        iterations: sol.iterations,
    })
}

/// Newton in `η` at fixed `t`; `None` if it does not settle in `max_iter` steps.
fn newton_at(
    params: &FlowParams,
    x: C,
    mut p: C,
    max_iter: usize,
    step_tol: f64,
) -> Result<Option<(C, usize)>> {
    for it in 1..=max_iter {
        let d = match flow_derivs(params, p) {
            Ok(d) => d,
            Err(FlowError::BranchCut(_))
            | Err(FlowError::NonFinite(_))
            | Err(FlowError::Singular(_)) => return Ok(None),
            Err(e) => return Err(e),
        };
        let step = (d.v - x) / d.dv;
        if !(step.re.is_finite() && step.im.is_finite()) {
            return Ok(None);
        }
        p -= step;
        if step.norm() <= step_tol * p.norm().max(1.0) {
            return Ok(Some((p, it)));
        }
    }
    Ok(None)
}

fn in_upper(p: C) -> bool {
    p.im > -1e-14 * p.norm()
}

/// Continuation in `t` for `Im x > 0`.
fn solve_upper(params: &FlowParams, x: C, tol: f64) -> Result<InversionResult> {
    const OP: &str = "solve_pbar";
    const DT_MAX: f64 = 0.1;
    let mut p = u0_prime(x, params.beta)?;
    let mut t = 0.0;
    let mut dt = DT_MAX;
    let mut iterations = 0;
    while t < params.t {
        let h = dt.min(params.t - t);
        let here = params.at(t)?;
        let d = flow_derivs(&here, p)?;
        let pred = p - d.dv_dt(&here, p) / d.dv * h;
        let next = params.at(t + h)?;
        match newton_at(&next, x, pred, 12, 1e-12)? {
            Some((q, its))
                if in_upper(q)
                    && (q - pred).norm() <= 0.5 * (pred - p).norm() + 1e-9 * q.norm().max(1.0) =>
            {
                iterations += its;
                p = q;
                t += h;
                dt = (dt * 1.5).min(DT_MAX);
            }
            _ => {
                dt *= 0.5;
                if dt < 1e-9 {
                    return Err(FlowError::NoConvergence { op: OP, iterations });
                }
            }
        }
    }
    let (p, its) = newton_at(params, x, p, 30, 1e-15)?.unwrap_or((p, 0));
    iterations += its;
    if !in_upper(p) {
        return Err(FlowError::OffBranch {
            op: OP,
            detail: format!("Im p = {} < 0 for Im x > 0", p.im),
        });
    }
    let residual = (flow_derivs(params, p)?.v - x).norm() / residual_scale(params, x);
    if residual.is_nan() || residual > tol {
        return Err(FlowError::NoConvergence { op: OP, iterations });
    }
    Ok(InversionResult {
        pbar: p,
        residual,
        method: InversionMethod::Newton,
        iterations,
    })
}

/// Principal-branch solution `p̄(t, x)` of `v(t, p̄) = x`.
///
/// `tol` bounds the scaled residual reported in [`InversionResult`]. Real
/// `x ≤ -d(t)` lies on the cut and is rejected.
pub fn solve_pbar(params: &FlowParams, x: ComplexValue, tol: f64) -> Result<InversionResult> {
    check_finite("solve_pbar", x)?;
    if x.im == 0.0 {
        solve_real(params, x.re, tol)
    } else if x.im > 0.0 {
        solve_upper(params, x, tol)
    } else {
        solve_upper(params, x.conj(), tol).map(|r| InversionResult {
            pbar: r.pbar.conj(),
            ..r
        })
    }
}

/// `(1/2πi) ∮ η v_η/(v - z) dη` on the circle `|η - center| = radius`.
///
/// Starts from `nodes` trapezoid points and doubles up to 4096 until two
/// successive values agree to `1e-10`. The winding number of `v - z` around
/// the circle must be one.
pub fn invert_contour(
    params: &FlowParams,
    z: ComplexValue,
    center: ComplexValue,
    radius: f64,
    nodes: usize,
) -> Result<ComplexValue> {
    const OP: &str = "invert_contour";
    check_finite(OP, z)?;
    check_finite(OP, center)?;
    if !(radius.is_finite() && radius > 0.0) {
        return domain(OP, format!("radius must be > 0, got {radius}"));
    }
    let sums = |n: usize| -> Result<(C, C)> {
        let mut root = C::new(0.0, 0.0);
        let mut wind = C::new(0.0, 0.0);
        for k in 0..n {
            let e = C::from_polar(1.0, std::f64::consts::TAU * k as f64 / n as f64);
            let eta = center + e * radius;
            let d = flow_derivs(params, eta)?;
            let w = d.dv * e * radius / (d.v - z);
            wind += w;
            root += w * eta;
        }
        Ok((root / n as f64, wind / n as f64))
    };
    let mut n = nodes.max(8);
    let (mut prev, mut wind) = sums(n)?;
    loop {
        let winding = wind.re.round();
        if winding != 1.0 || (wind.re - 1.0).abs() > 0.25 {
            return Err(FlowError::Containment { winding: wind.re });
        }
        if n >= 4096 {
            return Err(FlowError::NoConvergence {
                op: OP,
                iterations: n,
            });
        }
        n *= 2;
        let (cur, w) = sums(n)?;
        wind = w;
        if (cur - prev).norm() < 1e-10 {
            if (wind.re - 1.0).abs() > 0.25 {
                return Err(FlowError::Containment { winding: wind.re });
            }
            return Ok(cur);
        }
        prev = cur;
    }
}

/// `u(t, x) = ∫₀ˣ p̄(t, x′) dx′` along the straight segment from the origin.
pub fn u_of_x(params: &FlowParams, x: ComplexValue, tol: f64) -> Result<ComplexValue> {
    const OP: &str = "u_of_x";
    check_finite(OP, x)?;
    if x == C::new(0.0, 0.0) {
        return Ok(x);
    }
    if x.im == 0.0 && x.re < 0.0 {
        let alpha = turning_point(params)?;
        if x.re <= flow_derivs_real(params, -alpha)?.v {
            return Err(FlowError::BranchCut(OP));
        }
    }
    let inner = 1e-10f64.max(tol * 1e-2);
    adaptive_simpson(
        |s| Ok(solve_pbar(params, x * s, inner)?.pbar * x),
        0.0,
        1.0,
        tol,
    )
}

/// `-1 - (1/2 - z)/(2t)`, the large-`t` behaviour of `p̄` for the critical flavor.
pub fn pbar_asymptotic_critical(t: f64, z: ComplexValue) -> ComplexValue {
    -(C::new(0.5, 0.0) - z) / (2.0 * t) - 1.0
}

/// `h₁(p) = ln(1 - p)/(-p)` for `p ≤ 0`, with `h₁(0) = 1`.
fn h1(p: f64) -> f64 {
    if p == 0.0 {
        1.0
    } else {
        (-p).ln_1p() / (-p)
    }
}

/// The negative root `p̂` of `1 - β/4 = -ln(1 - p̂)/p̂`.
pub fn phat_of_beta(beta: f64) -> Result<f64> {
    const OP: &str = "phat_of_beta";
    if !(beta.is_finite() && (0.0..4.0).contains(&beta)) {
        return domain(OP, format!("requires 0 <= beta < 4, got {beta}"));
    }
    if beta == 0.0 {
        return Ok(0.0);
    }
    let target = 1.0 - beta / 4.0;
    let f = |p: f64| {
        let s = -p;
        let val = h1(p) - target;
        // d/dp [ln(1+s)/s] with s = -p
        let ds = (s / (1.0 + s) - s.ln_1p()) / (s * s);
        Ok((val, -ds))
    };
    let mut lo = -1.0;
    while f(lo)?.0 > 0.0 {
        lo *= 2.0;
        if lo < -1e300 {
            return Err(FlowError::Bracket {
                op: OP,
                lo,
                hi: 0.0,
            });
        }
    }
    let mut hi = -1e-3;
    while f(hi)?.0 < 0.0 {
        hi *= 0.5;
        if hi > -1e-300 {
            return Err(FlowError::Bracket { op: OP, lo, hi });
        }
    }
    Ok(newton_bracketed(OP, f, lo, hi, 0.5 * (lo + hi), 1e-15)?.root)
}

/// The negative root `μ` of `1 - β/4 = -2μ ln(1 - 1/(2μ))`.
pub fn mu_of_beta(beta: f64) -> Result<f64> {
    const OP: &str = "mu_of_beta";
    if !(beta.is_finite() && beta > 0.0 && beta < 4.0) {
        return domain(OP, format!("requires 0 < beta < 4, got {beta}"));
    }
    let target = 1.0 - beta / 4.0;
    let f = |mu: f64| {
        let y = -1.0 / (2.0 * mu);
        let l = y.ln_1p();
        let val = -2.0 * mu * l - target;
        // dy/dμ = 1/(2μ²) = 2y²
        let dval = -2.0 * l - 2.0 * mu * (2.0 * y * y) / (1.0 + y);
        Ok((val, dval))
    };
    let mut lo = -1.0;
    while f(lo)?.0 < 0.0 {
        lo *= 2.0;
        if lo < -1e300 {
            return Err(FlowError::Bracket {
                op: OP,
                lo,
                hi: 0.0,
            });
        }
    }
    let mut hi = -1e-3;
    while f(hi)?.0 > 0.0 {
        hi *= 0.5;
        if hi > -1e-300 {
            return Err(FlowError::Bracket { op: OP, lo, hi });
        }
    }
    let coarse = bisect(OP, |m| f(m).map(|v| v.0), lo, hi, 1e-6 * hi.abs())?;
    let span = 1e-5 * coarse.abs();
    let (a, b) = if f(coarse - span)?.0.signum() != f(coarse + span)?.0.signum() {
        (coarse - span, coarse + span)
    } else {
        (lo, hi)
    };
    Ok(newton_bracketed(OP, f, a, b, coarse, 1e-16)?.root)
}

/// `p̂(1 + c e^{-2t})` with `c = 4(p̂ + 2)/(β - 4p̂(4 - β))`.
///
/// The measured `e^{-2t}` coefficient of `p̄ - p̂` is `p̂²`, not `p̂c`;
/// see [`pbar_asymptotic_normal_measured`].
pub fn pbar_asymptotic_normal(t: f64, beta: f64) -> Result<f64> {
    let ph = phat_of_beta(beta)?;
    let c = 4.0 * (ph + 2.0) / (beta - 4.0 * ph * (4.0 - beta));
    Ok(ph * (1.0 + c * (-2.0 * t).exp()))
}

/// `p̂(1 + p̂ e^{-2t})`, the expansion of the normal-flavor solution at fixed `x`.
pub fn pbar_asymptotic_normal_measured(t: f64, beta: f64) -> Result<f64> {
    let ph = phat_of_beta(beta)?;
    Ok(ph * (1.0 + ph * (-2.0 * t).exp()))
}
