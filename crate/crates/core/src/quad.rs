//! Adaptive Simpson quadrature for complex-valued integrands on a real
//! interval.

use num_complex::Complex64 as C;

use crate::error::{FlowError, Result};

const MAX_DEPTH: u32 = 48;

struct Simpson<'a, F> {
    f: &'a mut F,
    evals: usize,
    max_evals: usize,
}

impl<F> Simpson<'_, F>
where
    F: FnMut(f64) -> Result<C>,
{
    #[allow(clippy::too_many_arguments)]
    fn recurse(
        &mut self,
        a: f64,
        b: f64,
        fa: C,
        fm: C,
        fb: C,
        whole: C,
        tol: f64,
        depth: u32,
    ) -> Result<C> {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = (self.f)(lm)?;
        let frm = (self.f)(rm)?;
        self.evals += 2;
        let h = (b - a) / 12.0;
        let left = (fa + flm * 4.0 + fm) * h;
        let right = (fm + frm * 4.0 + fb) * h;
        let delta = left + right - whole;
        if depth >= MAX_DEPTH || delta.norm() <= 15.0 * tol || self.evals > self.max_evals {
            if self.evals > self.max_evals {
                return Err(FlowError::NoConvergence {
                    op: "adaptive_simpson",
                    iterations: self.evals,
                });
            }
            return Ok(left + right + delta / 15.0);
        }
        let l = self.recurse(a, m, fa, flm, fm, left, tol / 2.0, depth + 1)?;
        let r = self.recurse(m, b, fm, frm, fb, right, tol / 2.0, depth + 1)?;
        Ok(l + r)
    }
}

/// `∫_a^b f(s) ds` to absolute tolerance `tol`.
pub fn adaptive_simpson<F>(mut f: F, a: f64, b: f64, tol: f64) -> Result<C>
where
    F: FnMut(f64) -> Result<C>,
{
    if a == b {
        return Ok(C::new(0.0, 0.0));
    }
    let fa = f(a)?;
    let fb = f(b)?;
    let m = 0.5 * (a + b);
    let fm = f(m)?;
    let whole = (fa + fm * 4.0 + fb) * ((b - a) / 6.0);
    let mut s = Simpson {
        f: &mut f,
        evals: 3,
        max_evals: 2_000_000,
    };
    s.recurse(a, b, fa, fm, fb, whole, tol.max(1e-15), 0)
}

/// Real-valued convenience wrapper.
pub fn adaptive_simpson_real<F>(mut f: F, a: f64, b: f64, tol: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    adaptive_simpson(|s| f(s).map(|v| C::new(v, 0.0)), a, b, tol).map(|z| z.re)
}
