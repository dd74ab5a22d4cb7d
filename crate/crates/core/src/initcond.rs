//! Spherical-model initial data.
//!
//! The finite-`N` cumulant derivative is a ratio of Bessel functions,
//! `x ϑ_N′(x) = φ_{N/2}(i√(βx) N) / (2N)` with `φ_ν(ξ) = ξ J_ν(ξ)/J_{ν-1}(ξ)`,
//! and `φ_ν` has the Gauss continued fraction
//!
//! ```text
//! φ_ν(ξ) = b₀ / (1 - b₁/(1 - b₂/(1 - ⋯))),
//! b₀ = ξ²/(2ν),   b_k = ξ²/(4(ν+k-1)(ν+k))  (k ≥ 1).
//! ```
//!
//! As `N → ∞` the fraction becomes periodic and
//! `u₀′(ζ) = -β/(1 + √(1 + 4βζ))`, the Stieltjes transform of a positive
//! measure supported on `(-∞, -1/(4β)]`.

use std::f64::consts::PI;

use num_complex::Complex64 as C;
use serde::{Deserialize, Serialize};

use crate::error::{domain, FlowError, Result};
use crate::params::{check_finite, ComplexValue};
use crate::quad::adaptive_simpson;

/// One point of a sampled Lee–Yang density.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensitySample {
    pub lambda: f64,
    pub rho: f64,
}

/// Continued-fraction value together with convergence diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CfValue {
    pub value: ComplexValue,
    pub iterations: usize,
    /// `|ξ|² ≤ ν(ν+1)`: every partial numerator satisfies `|b_k| ≤ 1/4`
    /// and convergence is guaranteed. Outside, the value is unverified.
    pub in_worpitzky_domain: bool,
}

const TINY: f64 = 1e-300;

/// Denominator `1 - b₁/(1 - b₂/(1 - ⋯))` by the modified Lentz recurrence.
fn cf_denominator(nu: f64, xi_sq: C, tol: f64) -> Result<(C, usize)> {
    let cap = (10.0 * (xi_sq.norm() + nu)).ceil().max(50.0) as usize;
    let one = C::new(1.0, 0.0);
    let mut f = one;
    let mut c = one;
    let mut d = C::new(0.0, 0.0);
    for k in 1..=cap {
        let kf = k as f64;
        let a = -xi_sq / (4.0 * (nu + kf - 1.0) * (nu + kf));
        d = one + a * d;
        if d.norm() < TINY {
            d = C::new(TINY, 0.0);
        }
        c = one + a / c;
        if c.norm() < TINY {
            c = C::new(TINY, 0.0);
        }
        d = d.inv();
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).norm() < tol {
            return Ok((f, k));
        }
    }
    Err(FlowError::NoConvergence {
        op: "bessel_ratio_cf",
        iterations: cap,
    })
}

/// `φ_ν(ξ) = ξ J_ν(ξ)/J_{ν-1}(ξ)` with diagnostics.
pub fn bessel_ratio_cf_detailed(nu: f64, xi: ComplexValue, tol: f64) -> Result<CfValue> {
    check_finite("bessel_ratio_cf", xi)?;
    if !(nu >= 1.0 && nu.is_finite()) {
        return domain("bessel_ratio_cf", format!("requires nu >= 1, got {nu}"));
    }
    let xi_sq = xi * xi;
    let in_worpitzky_domain = xi_sq.norm() <= nu * (nu + 1.0);
    if xi_sq.norm() == 0.0 {
        return Ok(CfValue {
            value: C::new(0.0, 0.0),
            iterations: 0,
            in_worpitzky_domain,
        });
    }
    let (den, iterations) = cf_denominator(nu, xi_sq, tol)?;
    Ok(CfValue {
        value: xi_sq / (2.0 * nu) / den,
        iterations,
        in_worpitzky_domain,
    })
}

/// `φ_ν(ξ) = ξ J_ν(ξ)/J_{ν-1}(ξ)`, evaluated with relative tolerance `tol`.
pub fn bessel_ratio_cf(nu: f64, xi: ComplexValue, tol: f64) -> Result<ComplexValue> {
    bessel_ratio_cf_detailed(nu, xi, tol).map(|v| v.value)
}

/// Finite-`N` derivative `ϑ_N′(x)` of the initial cumulant generator.
///
/// With `ν = N/2` and `ξ² = -βxN²` the ratio `φ_ν(ξ)/(2Nx)` collapses to
/// `-β / (2 (1 - b₁/(1 - ⋯)))`, which is regular at `x = 0` where it equals
/// `-β/2`.
pub fn theta_prime_n(n: u32, x: ComplexValue, beta: f64) -> Result<ComplexValue> {
    check_finite("theta_prime_n", x)?;
    if n == 0 {
        return domain("theta_prime_n", "N must be positive");
    }
    let nf = n as f64;
    let xi_sq = -x * beta * nf * nf;
    let (den, _) = cf_denominator(nf / 2.0, xi_sq, 1e-15)?;
    Ok(-beta / 2.0 / den)
}

fn check_beta(op: &'static str, beta: f64) -> Result<()> {
    if beta.is_finite() && beta > 0.0 {
        Ok(())
    } else {
        domain(op, format!("beta must be > 0, got {beta}"))
    }
}

fn on_cut(zeta: C, beta: f64) -> bool {
    let arg = zeta * (4.0 * beta) + 1.0;
    arg.im == 0.0 && arg.re < 0.0
}

/// `u₀′(ζ) = -β/(1 + √(1 + 4βζ))` on the principal square-root branch.
///
/// Points of the cut `(-∞, -1/(4β))` are rejected; use
/// [`u0_prime_boundary`] for the `λ + i0` limit.
pub fn u0_prime(zeta: ComplexValue, beta: f64) -> Result<ComplexValue> {
    check_finite("u0_prime", zeta)?;
    check_beta("u0_prime", beta)?;
    if on_cut(zeta, beta) {
        return Err(FlowError::BranchCut("u0_prime"));
    }
    let s = (zeta * (4.0 * beta) + 1.0).sqrt();
    Ok(-beta / (s + 1.0))
}

/// Boundary value `u₀′(λ + i0)` for real `λ`, with `Im √(negative + i0) > 0`.
pub fn u0_prime_boundary(lambda: f64, beta: f64) -> Result<ComplexValue> {
    check_beta("u0_prime_boundary", beta)?;
    if !lambda.is_finite() {
        return Err(FlowError::NonFinite("u0_prime_boundary"));
    }
    let arg = 1.0 + 4.0 * beta * lambda;
    let s = if arg >= 0.0 {
        C::new(arg.sqrt(), 0.0)
    } else {
        C::new(0.0, (-arg).sqrt())
    };
    Ok(-beta / (s + 1.0))
}

/// `u₀(ζ) = ∫₀^ζ u₀′(s) ds = (1 - S)/2 + ln((1 + S)/2)/2`, `S = √(1 + 4βζ)`.
pub fn u0_eval(zeta: ComplexValue, beta: f64) -> Result<ComplexValue> {
    check_finite("u0_eval", zeta)?;
    check_beta("u0_eval", beta)?;
    if on_cut(zeta, beta) {
        return Err(FlowError::BranchCut("u0_eval"));
    }
    let s = (zeta * (4.0 * beta) + 1.0).sqrt();
    Ok((-s + 1.0) / 2.0 + ((s + 1.0) / 2.0).ln() / 2.0)
}

/// Unit-`β` density `ρ₀(λ) = √(-4λ - 1) / (4π(-λ))` on `λ < -1/4`.
fn rho_unit(lambda: f64) -> f64 {
    if lambda < -0.25 {
        (-4.0 * lambda - 1.0).sqrt() / (4.0 * PI * (-lambda))
    } else {
        0.0
    }
}

/// Density `β ρ₀(βλ)` of the measure representing `u₀′`; zero off the support.
pub fn rho_initial(lambda: f64, beta: f64) -> f64 {
    beta * rho_unit(beta * lambda)
}

/// `f₀(ζ) = ∫ ρ₀(λ)/(λ - ζ) dλ` by adaptive quadrature.
///
/// The support is mapped onto `θ ∈ [0, π]` by `λ = 1/p`,
/// `p = -2(1 + cos θ)`, which turns the measure into
/// `sin²θ/π · dθ / p²` and leaves the smooth integrand
/// `-(1 - cos θ) / (2π (1 - ζ p))`.
pub fn f0_stieltjes(zeta: ComplexValue, quad_tol: f64) -> Result<ComplexValue> {
    check_finite("f0_stieltjes", zeta)?;
    if zeta.im == 0.0 && zeta.re <= -0.25 {
        return domain(
            "f0_stieltjes",
            format!("zeta = {} lies on the support", zeta.re),
        );
    }
    adaptive_simpson(
        |theta| {
            let p = -2.0 * (1.0 + theta.cos());
            Ok(-(1.0 - theta.cos()) / (2.0 * PI) / (-zeta * p + 1.0))
        },
        0.0,
        PI,
        quad_tol,
    )
}
