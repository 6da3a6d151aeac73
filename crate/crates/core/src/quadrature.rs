//! Adaptive Simpson quadrature for fallible integrands.

use crate::error::{DimerError, Result};

pub const DEFAULT_ABS_TOL: f64 = 1e-10;
pub const DEFAULT_MAX_DEPTH: u32 = 40;

#[derive(Copy, Clone, Debug)]
pub struct Simpson {
    pub abs_tol: f64,
    pub max_depth: u32,
}

impl Default for Simpson {
    fn default() -> Self {
        Self { abs_tol: DEFAULT_ABS_TOL, max_depth: DEFAULT_MAX_DEPTH }
    }
}

impl Simpson {
    /// ∫ₐᵇ f. Returns `QuadratureFailure` if the bisection cap is hit before the
    /// local error estimate falls below its share of `abs_tol`.
    pub fn integrate<F>(&self, f: F, a: f64, b: f64) -> Result<f64>
    where
        F: Fn(f64) -> Result<f64>,
    {
        if a == b {
            return Ok(0.0);
        }
        let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
        let fa = f(lo)?;
        let fb = f(hi)?;
        let m = 0.5 * (lo + hi);
        let fm = f(m)?;
        let whole = (hi - lo) / 6.0 * (fa + 4.0 * fm + fb);
        let seg = Segment { a: lo, b: hi, fa, fm, fb, whole };
        let v = self.recurse(&f, seg, self.abs_tol, self.max_depth)?;
        Ok(sign * v)
    }

    fn recurse<F>(&self, f: &F, s: Segment, tol: f64, depth: u32) -> Result<f64>
    where
        F: Fn(f64) -> Result<f64>,
    {
        let m = 0.5 * (s.a + s.b);
        let lm = 0.5 * (s.a + m);
        let rm = 0.5 * (m + s.b);
        let flm = f(lm)?;
        let frm = f(rm)?;
        let left = (m - s.a) / 6.0 * (s.fa + 4.0 * flm + s.fm);
        let right = (s.b - m) / 6.0 * (s.fm + 4.0 * frm + s.fb);
        let delta = left + right - s.whole;
        if delta.abs() <= 15.0 * tol {
            return Ok(left + right + delta / 15.0);
        }
        if depth == 0 || !delta.is_finite() {
            return Err(DimerError::QuadratureFailure { a: s.a, b: s.b, tol });
        }
        let l = Segment { a: s.a, b: m, fa: s.fa, fm: flm, fb: s.fm, whole: left };
        let r = Segment { a: m, b: s.b, fa: s.fm, fm: frm, fb: s.fb, whole: right };
        Ok(self.recurse(f, l, 0.5 * tol, depth - 1)? + self.recurse(f, r, 0.5 * tol, depth - 1)?)
    }
}

#[derive(Copy, Clone)]
struct Segment {
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
}
