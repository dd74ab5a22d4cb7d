//! Scalar root finding: bisection, safeguarded Newton and a damped complex
//! Newton iteration.

use num_complex::Complex64 as C;

use crate::error::{FlowError, Result};

/// Plain bisection on `[lo, hi]`; `f(lo)` and `f(hi)` must differ in sign.
///
/// Stops when the bracket is narrower than `xtol` (absolute, plus a few ulps
/// of the endpoints) or after 400 halvings.
pub fn bisect<F>(op: &'static str, mut f: F, lo: f64, hi: f64, xtol: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let (mut a, mut b) = if lo < hi { (lo, hi) } else { (hi, lo) };
    let mut fa = f(a)?;
    let fb = f(b)?;
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(FlowError::Bracket { op, lo: a, hi: b });
    }
    for _ in 0..400 {
        let m = 0.5 * (a + b);
        if b - a <= xtol + 4.0 * f64::EPSILON * m.abs() || m <= a || m >= b {
            return Ok(m);
        }
        let fm = f(m)?;
        if fm == 0.0 {
            return Ok(m);
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}

/// Result of a bracketed Newton solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bracketed {
    pub root: f64,
    pub iterations: usize,
    /// True if at least one step fell back to bisection.
    pub bisected: bool,
}

/// Newton iteration kept inside a sign-change bracket. `fdf` returns the
/// function value and its derivative.
pub fn newton_bracketed<F>(
    op: &'static str,
    mut fdf: F,
    lo: f64,
    hi: f64,
    guess: f64,
    xtol: f64,
) -> Result<Bracketed>
where
    F: FnMut(f64) -> Result<(f64, f64)>,
{
    let (mut a, mut b) = if lo < hi { (lo, hi) } else { (hi, lo) };
    let (fa, _) = fdf(a)?;
    let (fb, _) = fdf(b)?;
    if fa == 0.0 {
        return Ok(Bracketed {
            root: a,
            iterations: 0,
            bisected: false,
        });
    }
    if fb == 0.0 {
        return Ok(Bracketed {
            root: b,
            iterations: 0,
            bisected: false,
        });
    }
    if fa.signum() == fb.signum() {
        return Err(FlowError::Bracket { op, lo: a, hi: b });
    }
    let sa = fa.signum();
    let mut x = if guess > a && guess < b {
        guess
    } else {
        0.5 * (a + b)
    };
    let mut bisected = false;
    for it in 1..=500 {
        let (fx, dfx) = fdf(x)?;
        if fx == 0.0 {
            return Ok(Bracketed {
                root: x,
                iterations: it,
                bisected,
            });
        }
        if fx.signum() == sa {
            a = x;
        } else {
            b = x;
        }
        let mut next = x - fx / dfx;
        if !(next.is_finite() && next > a && next < b) {
            next = 0.5 * (a + b);
            bisected = true;
        }
        let step = (next - x).abs();
        x = next;
        if step <= xtol + 4.0 * f64::EPSILON * x.abs() || b - a <= xtol {
            return Ok(Bracketed {
                root: x,
                iterations: it,
                bisected,
            });
        }
    }
    Err(FlowError::NoConvergence {
        op,
        iterations: 500,
    })
}

/// Undamped complex Newton from `z0`; converges when the step drops below
/// `tol · max(1, |z|)`. Returns the root and the iteration count.
pub fn newton_complex<F>(
    op: &'static str,
    mut fdf: F,
    z0: C,
    tol: f64,
    max_iter: usize,
) -> Result<(C, usize)>
where
    F: FnMut(C) -> Result<(C, C)>,
{
    let mut z = z0;
    for it in 1..=max_iter {
        let (f, df) = fdf(z)?;
        let step = f / df;
        if !(step.re.is_finite() && step.im.is_finite()) {
            return Err(FlowError::NoConvergence { op, iterations: it });
        }
        z -= step;
        if step.norm() <= tol * z.norm().max(1.0) {
            return Ok((z, it));
        }
    }
    Err(FlowError::NoConvergence {
        op,
        iterations: max_iter,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bisect_sqrt2() {
        let r = bisect("t", |x| Ok(x * x - 2.0), 0.0, 2.0, 1e-15).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn bisect_requires_sign_change() {
        assert!(matches!(
            bisect("t", |x| Ok(x * x + 1.0), -1.0, 2.0, 1e-12),
            Err(FlowError::Bracket { .. })
        ));
    }

    #[test]
    fn newton_bracketed_survives_bad_derivative() {
        // derivative vanishes at the guess; the bracket must rescue it
        let r = newton_bracketed(
            "t",
            |x| Ok((x * x * x - x - 2.0, 3.0 * x * x - 1.0)),
            1.0,
            2.0,
            1.0 / 3f64.sqrt(),
            1e-14,
        )
        .unwrap();
        assert!((r.root.powi(3) - r.root - 2.0).abs() < 1e-12);
    }

    #[test]
    fn newton_complex_cube_root() {
        let (z, _) = newton_complex(
            "t",
            |z| Ok((z * z * z * 2.0 - z - 2.0, z * z * 6.0 - 1.0)),
            C::new(-0.5, 0.7),
            1e-15,
            50,
        )
        .unwrap();
        assert!((z * z * z * 2.0 - z - 2.0).norm() < 1e-13);
        assert!((z.re + 0.582687).abs() < 1e-6 && (z.im - 0.720119).abs() < 1e-6);
    }
}
