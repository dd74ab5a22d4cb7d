//! Image domains of the upper half-plane under `p̄(t, ·)`, the Lee–Yang
//! density at scale `t`, and the fixed points of `v(t, ·)` (critical flavor,
//! `β = 4`).
//!
//! `Ω_t` is bounded by the segment `[-α(t), 0]` and the arc `q = h(t, p)`,
//! the zero set of `Im v(t, p + iq)` in `0 < q ≤ 2.5`. Along the arc `v` is
//! real and sweeps the support `(-∞, -d(t))` of the zero density, whose
//! value there is `h/π`.

use num_complex::Complex64 as C;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, FlowError, Result};
use crate::initcond::DensitySample;
use crate::inversion::turning_point;
use crate::params::{check_finite, ComplexValue, FlowParams};
use crate::roots::{bisect, newton_complex};
use crate::scalarflow::{flow_derivs, flow_derivs_real};

/// Upper end of the arc search; `Ω_t` lies in the radius-2 semi-disc.
const Q_MAX: f64 = 2.5;
const Q_MIN: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryPoint {
    pub p: f64,
    pub q: f64,
}

/// Sampled boundary of `Ω_t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DomainBoundary {
    pub t: f64,
    pub alpha: f64,
    /// `(p, h(t, p))` on a uniform grid over `[-α, 0]`, endpoints pinned to 0.
    pub arc: Vec<BoundaryPoint>,
    /// Grid abscissae where no sign change of `Im v` was found.
    pub failed: Vec<f64>,
}

/// Lee–Yang zero density sampled along the boundary arc.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroMeasure {
    pub t: f64,
    /// `d(t)`; the support is `(-∞, -d(t))`.
    pub edge: f64,
    /// Ordered by increasing `λ`; the last sample is the edge `(-d, 0)`.
    pub samples: Vec<DensitySample>,
    /// Arc points dropped because `Im v` was not small enough there.
    pub dropped: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    ConjugatePair,
    RealPair,
}

/// The two fixed points of `v(t, ·)` that collide at `t*`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FixedPointSet {
    pub t: f64,
    /// Upper member of the pair, or the right real root.
    pub zeta: ComplexValue,
    /// Its conjugate, or the left (more negative) real root.
    pub zeta_star: ComplexValue,
    pub regime: Regime,
}

fn critical(t: f64) -> Result<FlowParams> {
    FlowParams::critical(t)
}

/// Turning point `α(t)`, the zero of `∂v/∂p` in `[3/2, 4]`.
pub fn alpha_of_t(t: f64) -> Result<f64> {
    turning_point(&critical(t)?)
}

/// `d(t) = -v(t, -α(t))`, the distance of the zero support from the origin.
pub fn edge_of_t(t: f64) -> Result<f64> {
    let params = critical(t)?;
    let alpha = turning_point(&params)?;
    Ok(-flow_derivs_real(&params, -alpha)?.v)
}

fn im_v(params: &FlowParams, p: f64, q: f64) -> Result<f64> {
    flow_derivs(params, C::new(p, q)).map(|d| d.v.im)
}

/// `h(t, p)` for `p` strictly inside `(-α, 0)`; `None` without a sign change.
fn arc_height(params: &FlowParams, p: f64) -> Result<Option<f64>> {
    let lo = im_v(params, p, Q_MIN)?;
    let hi = im_v(params, p, Q_MAX)?;
    if !(lo > 0.0 && hi < 0.0) {
        return Ok(None);
    }
    bisect(
        "boundary_curve",
        |q| im_v(params, p, q),
        Q_MIN,
        Q_MAX,
        1e-14,
    )
    .map(Some)
}

/// Height `h(t, p)` of the boundary arc above `p`, zero outside `(-α, 0)`.
pub fn boundary_height(t: f64, p: f64) -> Result<f64> {
    let params = critical(t)?;
    let alpha = turning_point(&params)?;
    if !(p > -alpha && p < 0.0) {
        return Ok(0.0);
    }
    arc_height(&params, p)?.ok_or(FlowError::Bracket {
        op: "boundary_curve",
        lo: Q_MIN,
        hi: Q_MAX,
    })
}

/// Boundary of `Ω_t` on `n_points` equally spaced abscissae in `[-α, 0]`.
pub fn boundary_curve(t: f64, n_points: usize) -> Result<DomainBoundary> {
    if n_points < 16 {
        return domain(
            "boundary_curve",
            format!("needs at least 16 points, got {n_points}"),
        );
    }
    let params = critical(t)?;
    let alpha = turning_point(&params)?;
    let last = n_points - 1;
    let heights: Vec<Result<(f64, Option<f64>)>> = (0..n_points)
        .into_par_iter()
        .map(|k| {
            let p = -alpha + alpha * k as f64 / last as f64;
            if k == 0 || k == last {
                return Ok((if k == last { 0.0 } else { p }, Some(0.0)));
            }
            Ok((p, arc_height(&params, p)?))
        })
        .collect();
    let mut arc = Vec::with_capacity(n_points);
    let mut failed = Vec::new();
    for h in heights {
        match h? {
            (p, Some(q)) => arc.push(BoundaryPoint { p, q }),
            (p, None) => failed.push(p),
        }
    }
    Ok(DomainBoundary {
        t,
        alpha,
        arc,
        failed,
    })
}

/// `η ∈ Ω_t`: `-α < Re η < 0` and `0 < Im η < h(t, Re η)`.
pub fn domain_contains(t: f64, eta: ComplexValue) -> Result<bool> {
    check_finite("domain_contains", eta)?;
    let params = critical(t)?;
    let alpha = turning_point(&params)?;
    if !(eta.re > -alpha && eta.re < 0.0 && eta.im > 0.0 && eta.im < Q_MAX) {
        return Ok(false);
    }
    match arc_height(&params, eta.re)? {
        Some(h) => Ok(eta.im < h),
        None => Err(FlowError::Bracket {
            op: "domain_contains",
            lo: Q_MIN,
            hi: Q_MAX,
        }),
    }
}

/// Zero density `ρ(t, λ)` parametrised by the boundary arc:
/// `λ = v(t, p + ih)`, `ρ = h/π`.
///
/// Samples where `|Im v| > 1e-8 · max(1, |v|)` are dropped.
pub fn zero_density(t: f64, n_points: usize) -> Result<ZeroMeasure> {
    let boundary = boundary_curve(t, n_points)?;
    let params = critical(t)?;
    let edge = -flow_derivs_real(&params, -boundary.alpha)?.v;
    let interior: Vec<BoundaryPoint> = boundary.arc.iter().copied().filter(|b| b.q > 0.0).collect();
    let values: Vec<Result<C>> = interior
        .par_iter()
        .map(|b| flow_derivs(&params, C::new(b.p, b.q)).map(|d| d.v))
        .collect();
    let mut samples = Vec::with_capacity(interior.len() + 1);
    let mut dropped = 0;
    for (b, v) in interior.iter().zip(values) {
        let v = v?;
        if v.im.abs() <= 1e-8 * v.norm().max(1.0) && v.re < -edge {
            samples.push(DensitySample {
                lambda: v.re,
                rho: b.q / std::f64::consts::PI,
            });
        } else {
            dropped += 1;
        }
    }
    samples.push(DensitySample {
        lambda: -edge,
        rho: 0.0,
    });
    samples.sort_by(|a, b| a.lambda.total_cmp(&b.lambda));
    Ok(ZeroMeasure {
        t,
        edge,
        samples,
        dropped,
    })
}

/// `g(p) = v(t, p) - p` on the negative axis.
fn gap(params: &FlowParams, p: f64) -> Result<f64> {
    Ok(flow_derivs_real(params, p)?.v - p)
}

/// Minimum of `v(t, p) - p` over `p < -1`, located by a geometric scan and
/// golden-section refinement. Returns `(p_min, g_min, p_left)` with
/// `g(p_left) > 0` to the left of the minimum.
fn real_gap_minimum(params: &FlowParams) -> Result<(f64, f64, f64)> {
    let mut scan = vec![(-1.0, gap(params, -1.0)?)];
    let mut imin = 0;
    loop {
        let p = scan[scan.len() - 1].0 * 1.02;
        let g = gap(params, p)?;
        scan.push((p, g));
        if g < scan[imin].1 {
            imin = scan.len() - 1;
        }
        if (g > 0.0 && g > scan[imin].1 + 1.0) || p < -1e4 {
            break;
        }
    }
    let left = scan[scan.len() - 1].0;
    let mut a = scan[(imin + 1).min(scan.len() - 1)].0;
    let mut b = scan[imin.saturating_sub(1)].0;
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (gap(params, c)?, gap(params, d)?);
    while (b - a).abs() > 1e-12 * a.abs() {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = gap(params, c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = gap(params, d)?;
        }
    }
    let pm = 0.5 * (a + b);
    Ok((pm, gap(params, pm)?, left))
}

fn regime_of(params: &FlowParams) -> Result<(Regime, f64, f64, f64)> {
    let (pm, gm, left) = real_gap_minimum(params)?;
    let regime = if gm < 0.0 {
        Regime::RealPair
    } else {
        Regime::ConjugatePair
    };
    Ok((regime, pm, gm, left))
}

/// Complex root `ζ₀` of `2ζ³ - ζ - 2` in the upper half-plane.
fn zeta_initial() -> Result<C> {
    newton_complex(
        "fixed_points",
        |z| Ok((z * z * z * 2.0 - z - 2.0, z * z * 6.0 - 1.0)),
        C::new(-0.58, 0.72),
        1e-15,
        50,
    )
    .map(|r| r.0)
}

fn fixed_newton(params: &FlowParams, mut z: C, step_tol: f64) -> Result<Option<C>> {
    for _ in 0..40 {
        let d = match flow_derivs(params, z) {
            Ok(d) => d,
            Err(FlowError::BranchCut(_)) | Err(FlowError::NonFinite(_)) => return Ok(None),
            Err(e) => return Err(e),
        };
        let step = (d.v - z) / (d.dv - 1.0);
        if !(step.re.is_finite() && step.im.is_finite()) {
            return Ok(None);
        }
        z -= step;
        if step.norm() <= step_tol * z.norm().max(1.0) {
            return Ok(Some(z));
        }
    }
    Ok(None)
}

/// Complex continuation of the upper fixed point from `ζ₀`.
fn follow_upper(t_end: f64) -> Result<C> {
    const DT_MAX: f64 = 0.05;
    let mut z = zeta_initial()?;
    let (mut t, mut dt) = (0.0, DT_MAX);
    while t < t_end {
        let h = dt.min(t_end - t);
        let here = critical(t)?;
        let d = flow_derivs(&here, z)?;
        let pred = z - d.dv_dt(&here, z) / (d.dv - 1.0) * h;
        match fixed_newton(&critical(t + h)?, pred, 1e-13)? {
            Some(w) if w.im > 0.0 && (w - pred).norm() <= 0.5 * (pred - z).norm() + 1e-9 => {
                z = w;
                t += h;
                dt = (dt * 1.5).min(DT_MAX);
            }
            _ => {
                dt *= 0.5;
                if dt < 1e-10 {
                    return Err(FlowError::NoConvergence {
                        op: "fixed_points",
                        iterations: 0,
                    });
                }
            }
        }
    }
    let polished = fixed_newton(&critical(t_end)?, z, 1e-15)?.unwrap_or(z);
    Ok(polished)
}

/// Fixed points `ζ_t`, `ζ*_t` of `v(t, ·)`.
///
/// The regime is read off the sign of `min_{p<-1} (v(t,p) - p)`. In the
/// conjugate regime `ζ_t` is followed from `ζ₀` by Newton continuation in
/// steps of at most `0.05`; in the real regime both roots are bracketed.
pub fn fixed_points(t: f64) -> Result<FixedPointSet> {
    let params = critical(t)?;
    let (regime, pm, _, left) = regime_of(&params)?;
    match regime {
        Regime::ConjugatePair => {
            let z = follow_upper(t)?;
            Ok(FixedPointSet {
                t,
                zeta: z,
                zeta_star: z.conj(),
                regime,
            })
        }
        Regime::RealPair => {
            let g = |p: f64| gap(&params, p);
            let right = bisect("fixed_points", g, pm, -1.0, 1e-15)?;
            let left = bisect("fixed_points", g, left, pm, 1e-15)?;
            Ok(FixedPointSet {
                t,
                zeta: C::new(right, 0.0),
                zeta_star: C::new(left, 0.0),
                regime,
            })
        }
    }
}

fn min_gap(t: f64) -> Result<f64> {
    Ok(real_gap_minimum(&critical(t)?)?.1)
}

/// Collision scale `t*` of the conjugate fixed-point pair, by bisection on
/// the regime.
pub fn t_star(tol: f64) -> Result<f64> {
    if tol.is_nan() || tol < 1e-8 {
        return domain("t_star", format!("tol must be >= 1e-8, got {tol}"));
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    while min_gap(hi)? >= 0.0 {
        lo = hi;
        hi *= 2.0;
        if hi > 1e3 {
            return Err(FlowError::Bracket {
                op: "t_star",
                lo,
                hi,
            });
        }
    }
    while hi - lo > tol * 1e-3 {
        let m = 0.5 * (lo + hi);
        if min_gap(m)? < 0.0 {
            hi = m;
        } else {
            lo = m;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// `ζ*_t + α(t)` on the real-pair regime.
pub fn crossover_residual(t: f64) -> Result<f64> {
    let fp = fixed_points(t)?;
    if fp.regime != Regime::RealPair {
        return domain(
            "t_crossover",
            format!("t = {t} precedes the collision scale"),
        );
    }
    Ok(fp.zeta_star.re + alpha_of_t(t)?)
}

/// Crossover scale `t_co > t*` where `ζ*_t = -α(t)`.
pub fn t_crossover(tol: f64) -> Result<f64> {
    if tol.is_nan() || tol < 1e-6 {
        return domain("t_crossover", format!("tol must be >= 1e-6, got {tol}"));
    }
    let ts = t_star(1e-8)?;
    let lo = ts + 1e-6;
    let mut hi = ts + 0.25;
    while crossover_residual(hi)? > 0.0 {
        hi += 0.25;
        if hi > ts + 50.0 {
            return Err(FlowError::Bracket {
                op: "t_crossover",
                lo,
                hi,
            });
        }
    }
    if crossover_residual(lo)? <= 0.0 {
        return Err(FlowError::Bracket {
            op: "t_crossover",
            lo,
            hi,
        });
    }
    bisect("t_crossover", crossover_residual, lo, hi, tol * 1e-2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn alpha_and_edge_at_origin() {
        assert_relative_eq!(alpha_of_t(0.0).unwrap(), 4.0, epsilon = 1e-10);
        assert_relative_eq!(edge_of_t(0.0).unwrap(), 1.0 / 16.0, epsilon = 1e-12);
    }

    #[test]
    fn alpha_decreases_edge_increases() {
        let mut last = (f64::INFINITY, 0.0);
        for k in 0..=10 {
            let t = 0.5 * k as f64;
            let (a, d) = (alpha_of_t(t).unwrap(), edge_of_t(t).unwrap());
            assert!(a < last.0 && a > 1.5);
            assert!(d > last.1);
            last = (a, d);
        }
    }

    #[test]
    fn semicircle_at_origin() {
        let b = boundary_curve(0.0, 101).unwrap();
        assert!(b.failed.is_empty());
        for pt in &b.arc {
            let exact = (4.0 - (pt.p + 2.0).powi(2)).max(0.0).sqrt();
            assert!((pt.q - exact).abs() < 1e-8, "{pt:?}");
        }
    }

    #[test]
    fn membership() {
        assert!(domain_contains(0.0, C::new(-2.0, 0.5)).unwrap());
        assert!(!domain_contains(0.0, C::new(-2.0, 2.1)).unwrap());
        assert!(!domain_contains(0.0, C::new(0.5, 0.5)).unwrap());
    }

    #[test]
    fn initial_fixed_point() {
        let fp = fixed_points(0.0).unwrap();
        assert_eq!(fp.regime, Regime::ConjugatePair);
        let z = fp.zeta;
        assert!((z - C::new(-0.582687, 0.720119)).norm() < 1e-5);
        assert!((z * z * z * 2.0 - z - 2.0).norm() < 1e-12);
    }

    #[test]
    fn real_pair_after_collision() {
        let fp = fixed_points(6.0).unwrap();
        assert_eq!(fp.regime, Regime::RealPair);
        assert!(fp.zeta_star.re < fp.zeta.re);
        let p = critical(6.0).unwrap();
        for z in [fp.zeta, fp.zeta_star] {
            assert!((flow_derivs(&p, z).unwrap().v - z).norm() < 1e-12);
        }
    }

    #[test]
    fn continuation_stays_a_fixed_point() {
        let fp = fixed_points(4.0).unwrap();
        let p = critical(4.0).unwrap();
        assert!(fp.zeta.im > 0.0);
        assert!((flow_derivs(&p, fp.zeta).unwrap().v - fp.zeta).norm() < 1e-10);
    }

    #[test]
    fn zero_density_initial() {
        let z = zero_density(0.0, 64).unwrap();
        assert_relative_eq!(z.edge, 1.0 / 16.0, epsilon = 1e-12);
        for s in &z.samples {
            assert!((s.rho - crate::initcond::rho_initial(s.lambda, 4.0)).abs() < 1e-6);
        }
    }
}
