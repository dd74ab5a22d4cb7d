//! Closed-form solutions `v(t, η)` of the Legendre-transformed flow.
//!
//! Both flavors share the initial value `v(0, p) = 1/(2p) + β/(4p²)`.
//!
//! Critical flavor (`γ = 6`), with `E = e^{2t}`, `E' = E - 1`, `w = pE'`:
//!
//! ```text
//! v = 1/(2p) + 1/p² - (4-β)E/(4p²) - (1+p)/p³ · ln(1 - w)
//! ```
//!
//! Normal flavor (`γ = 4`), with `ε = e^{-2t}`, `D = 1 - ε`, `w = pD`:
//!
//! ```text
//! v = -e^{4t}/p² · (1 - β/4 + ln(1-w)/p + ε(ln(1-w) - 1) - pε²/2)
//! ```
//!
//! Writing `ln(1-w) = -w - w²/2 - w³σ(w)` with `σ(w) = Σ_{k≥3} w^{k-3}/k`
//! removes the `1/p³` cancellations exactly:
//!
//! ```text
//! critical: v = βE/(4p²) + E²/(2p) + E'²/2 + (1+p) E'³ σ(w)
//! normal:   v = e^{4t} [β/(4p²) + 1/(2p) + εD²/2 + D³ (1+εp) σ(w)]
//! ```
//!
//! The derivatives follow by differentiating either representation term by
//! term, e.g. in the critical series form
//! `∂v/∂p = -βE/(2p³) - E²/(2p²) + E'³σ(w) + (1+p)E'⁴σ'(w)`, and in the
//! direct form `∂v/∂p = A' - B'ℓ - Bℓ'` with `A = 1/(2p) + (1-kE)/p²`,
//! `B = (1+p)/p³`, `ℓ = ln(1-w)`, `ℓ' = -E'/(1-w)`.
//! The series representation is used for `|w| < 1/2`, the direct one
//! elsewhere. Logarithms use the principal branch.

use std::ops::{Add, AddAssign, Div, Mul, Sub};

use num_complex::ComplexFloat;

use crate::error::{domain, FlowError, Result};
use crate::params::{check_finite, ComplexValue, Flavor, FlowParams};

/// `|w|` below which the Maclaurin form of `ln(1 - w)` is used.
pub(crate) const SERIES_RADIUS: f64 = 0.5;

// 0.5^68 ~ 3e-21, well below f64 resolution.
const SERIES_TERMS: usize = 72;

/// Scalar types the closed forms are evaluated in: `f64` on the real axis
/// (so that real inputs are evaluated in plain real arithmetic) and
/// `Complex64` elsewhere.
pub(crate) trait Scalar:
    ComplexFloat<Real = f64>
    + From<f64>
    + Add<f64, Output = Self>
    + Sub<f64, Output = Self>
    + Mul<f64, Output = Self>
    + Div<f64, Output = Self>
    + AddAssign
{
}

impl<T> Scalar for T where
    T: ComplexFloat<Real = f64>
        + From<f64>
        + Add<f64, Output = T>
        + Sub<f64, Output = T>
        + Mul<f64, Output = T>
        + Div<f64, Output = T>
        + AddAssign
{
}

/// `σ(w) = Σ_{k≥3} w^{k-3}/k` and its first two derivatives.
pub(crate) fn sigma_series<T: Scalar>(w: T) -> [T; 3] {
    let zero = <T as From<f64>>::from(0.0);
    let mut s = [zero; 3];
    // pow = w^j, pow_m1 = w^{j-1}, pow_m2 = w^{j-2} with j = k - 3
    let mut pow = <T as From<f64>>::from(1.0);
    let mut pow_m1 = zero;
    let mut pow_m2 = zero;
    for k in 3..SERIES_TERMS {
        let kf = k as f64;
        let j = (k - 3) as f64;
        s[0] += pow / kf;
        s[1] += pow_m1 * (j / kf);
        s[2] += pow_m2 * (j * (j - 1.0) / kf);
        pow_m2 = pow_m1;
        pow_m1 = pow;
        pow = pow * w;
    }
    s
}

/// Value and the first two `η`-derivatives of `v(t, η)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowDerivs<T = ComplexValue> {
    pub v: T,
    pub dv: T,
    pub d2v: T,
}

impl FlowDerivs<ComplexValue> {
    /// `∂v/∂t`, read off the transport equation satisfied by `v`.
    pub fn dv_dt(&self, params: &FlowParams, eta: ComplexValue) -> ComplexValue {
        match params.flavor {
            Flavor::Critical => {
                eta * (eta + 1.0) * 2.0 * self.dv - 1.0 + (eta * 4.0 + 6.0) * self.v
            }
            Flavor::Normal => {
                let eps = (-2.0 * params.t).exp();
                eta * eta * (2.0 * eps) * self.dv - eps + (eta * (4.0 * eps) + 4.0) * self.v
            }
        }
    }
}

/// Principal `ln(1 - w)` for `w = p·scale`, where `scale = E'` (critical) or
/// `D` (normal). Large critical scales go through `ln(e^{-2t}(1-w)) + 2t`.
fn log_one_minus<T: Scalar>(op: &'static str, t: f64, w: T, p: T, flavor: Flavor) -> Result<T> {
    let (z_scaled, shift) = if flavor == Flavor::Critical && t > 20.0 {
        // e^{-2t}(1 - pE') = e^{-2t} - p(1 - e^{-2t})
        (
            <T as From<f64>>::from((-2.0 * t).exp()) - p * (-(-2.0 * t).exp_m1()),
            2.0 * t,
        )
    } else {
        (<T as From<f64>>::from(1.0) - w, 0.0)
    };
    if z_scaled.im() == 0.0 && z_scaled.re() <= 0.0 {
        return Err(FlowError::BranchCut(op));
    }
    Ok(z_scaled.ln() + shift)
}

fn critical_derivs<T: Scalar>(op: &'static str, beta: f64, t: f64, p: T) -> Result<FlowDerivs<T>> {
    let e1 = (2.0 * t).exp_m1();
    let w = p * e1;
    let one = <T as From<f64>>::from(1.0);
    let inv = p.recip();
    let inv2 = inv * inv;
    let inv3 = inv2 * inv;
    let inv4 = inv2 * inv2;
    if w.abs() < SERIES_RADIUS {
        let e = 1.0 + e1;
        let [s0, s1, s2] = sigma_series(w);
        let e13 = e1 * e1 * e1;
        let lin = one + p;
        let v = inv2 * (beta * e / 4.0) + inv * (e * e / 2.0) + (s0 * lin * e13 + e1 * e1 / 2.0);
        let dv = -inv3 * (beta * e / 2.0) - inv2 * (e * e / 2.0) + s0 * e13 + s1 * lin * (e13 * e1);
        let d2v = inv4 * (1.5 * beta * e)
            + inv3 * (e * e)
            + s1 * (2.0 * e13 * e1)
            + s2 * lin * (e13 * e1 * e1);
        return Ok(FlowDerivs { v, dv, d2v });
    }
    let ell = log_one_minus(op, t, w, p, Flavor::Critical)?;
    // ℓ' = -E'/(1-w) written without overflowing E'
    let r = -(-2.0 * t).exp_m1();
    let dell = -(<T as From<f64>>::from((-2.0 * t).exp()) - p * r).recip() * r;
    let d2ell = -dell * dell;
    let k = (4.0 - beta) / 4.0;
    let ke = if k == 0.0 { 0.0 } else { k * (2.0 * t).exp() };
    let a = inv / 2.0 + inv2 * (1.0 - ke);
    let da = -inv2 / 2.0 - inv3 * (2.0 * (1.0 - ke));
    let d2a = inv3 + inv4 * (6.0 * (1.0 - ke));
    let b = inv3 + inv2;
    let db = -inv4 * 3.0 - inv3 * 2.0;
    let d2b = inv4 * inv * 12.0 + inv4 * 6.0;
    Ok(FlowDerivs {
        v: a - b * ell,
        dv: da - db * ell - b * dell,
        d2v: d2a - d2b * ell - db * dell * 2.0 - b * d2ell,
    })
}

fn normal_derivs<T: Scalar>(op: &'static str, beta: f64, t: f64, p: T) -> Result<FlowDerivs<T>> {
    let eps = (-2.0 * t).exp();
    let d = -(-2.0 * t).exp_m1();
    let g = (4.0 * t).exp();
    let w = p * d;
    let one = <T as From<f64>>::from(1.0);
    let inv = p.recip();
    let inv2 = inv * inv;
    let inv3 = inv2 * inv;
    let inv4 = inv2 * inv2;
    if w.abs() < SERIES_RADIUS {
        let [s0, s1, s2] = sigma_series(w);
        let d3 = d * d * d;
        let lin = one + p * eps;
        let v = inv2 * (beta / 4.0) + inv * 0.5 + (s0 * lin * d3 + eps * d * d / 2.0);
        let dv = -inv3 * (beta / 2.0) - inv2 * 0.5 + s0 * (eps * d3) + s1 * lin * (d3 * d);
        let d2v = inv4 * (1.5 * beta) + inv3 + s1 * (2.0 * eps * d3 * d) + s2 * lin * (d3 * d * d);
        return Ok(FlowDerivs {
            v: v * g,
            dv: dv * g,
            d2v: d2v * g,
        });
    }
    let ell = log_one_minus(op, t, w, p, Flavor::Normal)?;
    let dell = -(one - w).recip() * d;
    let d2ell = -dell * dell;
    let c = 1.0 - beta / 4.0;
    let big_p = ell * inv + (ell - 1.0) * eps - p * (eps * eps / 2.0) + c;
    let dp = dell * inv - ell * inv2 + dell * eps - eps * eps / 2.0;
    let d2p = d2ell * inv - dell * inv2 * 2.0 + ell * inv3 * 2.0 + d2ell * eps;
    Ok(FlowDerivs {
        v: -big_p * inv2 * g,
        dv: -(dp * inv2 - big_p * inv3 * 2.0) * g,
        d2v: -(d2p * inv2 - dp * inv3 * 4.0 + big_p * inv4 * 6.0) * g,
    })
}

fn derivs_generic<T: Scalar>(params: &FlowParams, eta: T) -> Result<FlowDerivs<T>> {
    const OP: &str = "eval_v";
    if !eta.is_finite() {
        return Err(FlowError::NonFinite(OP));
    }
    if eta.re() == 0.0 && eta.im() == 0.0 {
        return Err(FlowError::Singular(OP));
    }
    let out = match params.flavor {
        Flavor::Critical => critical_derivs(OP, params.beta, params.t, eta)?,
        Flavor::Normal => normal_derivs(OP, params.beta, params.t, eta)?,
    };
    if !(out.v.is_finite() && out.dv.is_finite()) {
        return Err(FlowError::NonFinite(OP));
    }
    Ok(out)
}

/// Real-axis evaluation of `v`, `∂v/∂p` and `∂²v/∂p²` in real arithmetic.
pub fn flow_derivs_real(params: &FlowParams, p: f64) -> Result<FlowDerivs<f64>> {
    derivs_generic(params, p)
}

/// `v`, `∂v/∂η` and `∂²v/∂η²` at `eta`. Inputs on the real axis are
/// evaluated in real arithmetic.
pub fn flow_derivs(params: &FlowParams, eta: ComplexValue) -> Result<FlowDerivs> {
    check_finite("eval_v", eta)?;
    if eta.im == 0.0 {
        let d = derivs_generic(params, eta.re)?;
        return Ok(FlowDerivs {
            v: d.v.into(),
            dv: d.dv.into(),
            d2v: d.d2v.into(),
        });
    }
    derivs_generic(params, eta)
}

/// `v(t, η)` on the principal logarithm branch.
pub fn eval_v(params: &FlowParams, eta: ComplexValue) -> Result<ComplexValue> {
    flow_derivs(params, eta).map(|d| d.v)
}

/// `∂v/∂η (t, η)`, differentiated analytically.
pub fn eval_dv(params: &FlowParams, eta: ComplexValue) -> Result<ComplexValue> {
    flow_derivs(params, eta).map(|d| d.dv)
}

/// Real-axis convenience wrapper around [`eval_v`].
pub fn eval_v_real(params: &FlowParams, p: f64) -> Result<f64> {
    flow_derivs_real(params, p).map(|d| d.v)
}

/// Real-axis convenience wrapper around [`eval_dv`].
pub fn eval_dv_real(params: &FlowParams, p: f64) -> Result<f64> {
    flow_derivs_real(params, p).map(|d| d.dv)
}

/// `f(w) = ln(1-w) + 1/(1-w) - 1`, nonnegative for `w < 1`.
pub fn eval_f(w: f64) -> Result<f64> {
    if !w.is_finite() || w >= 1.0 {
        return domain("eval_f", format!("requires w < 1, got {w}"));
    }
    if w.abs() < SERIES_RADIUS {
        let s = sigma_series(w)[0];
        Ok(w * w / (1.0 - w) - w * w / 2.0 - w * w * w * s)
    } else {
        Ok((-w).ln_1p() + 1.0 / (1.0 - w) - 1.0)
    }
}

/// `g(t,p) = -((1+p)/p) ln(1 + p - p e^{2t})`, with its limit `e^{2t} - 1` at `p = 0`.
pub fn eval_g_critical(t: f64, p: f64) -> Result<f64> {
    if !(t.is_finite() && t >= 0.0 && p.is_finite()) {
        return domain("eval_g_critical", "non-finite or negative argument");
    }
    let e1 = (2.0 * t).exp_m1();
    let w = p * e1;
    if 1.0 - w <= 0.0 {
        return domain(
            "eval_g_critical",
            format!("1 - p(e^2t - 1) <= 0 at p = {p}"),
        );
    }
    if w.abs() < SERIES_RADIUS {
        let s = sigma_series(w)[0];
        Ok((1.0 + p) * (e1 + p * e1 * e1 / 2.0 + p * p * e1 * e1 * e1 * s))
    } else {
        Ok(-((1.0 + p) / p) * (-w).ln_1p())
    }
}

/// `g₁(t,p) = -1 + β/4 - (e^{-2t} + 1/p) ln(1 - p + p e^{-2t})`, with its
/// limit `β/4 - e^{-2t}` at `p = 0`.
///
/// This is the function whose zero set is `v(t,p) = x` at `x = 0` up to the
/// `O(e^{-4t})` quadratic term, and whose `p`-derivative is
/// `e^{-2t}D/(1 - pD) + f(pD)/p²`, `D = 1 - e^{-2t}`.
pub fn eval_g_normal(t: f64, p: f64, beta: f64) -> Result<f64> {
    if !(t.is_finite() && t >= 0.0 && p.is_finite() && beta.is_finite()) {
        return domain("eval_g_normal", "non-finite or negative argument");
    }
    let eps = (-2.0 * t).exp();
    let d = -(-2.0 * t).exp_m1();
    let w = p * d;
    if 1.0 - w <= 0.0 {
        return domain("eval_g_normal", format!("1 - p(1 - e^-2t) <= 0 at p = {p}"));
    }
    let c = 1.0 - beta / 4.0;
    if w.abs() < SERIES_RADIUS {
        let s = sigma_series(w)[0];
        let head = d + p * d * d / 2.0 + p * p * d * d * d * s;
        Ok(-c + head + eps * p * head)
    } else {
        Ok(-c - (eps + 1.0 / p) * (-w).ln_1p())
    }
}
