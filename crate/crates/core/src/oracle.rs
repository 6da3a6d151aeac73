//! Brute-force integration of iℏ ∂ₜY = H(t) Y.
//!
//! Classic fourth-order Runge-Kutta with step doubling: every accepted step
//! is compared against two half steps, and the difference both controls the
//! step size and is used for local extrapolation. Y is either a state
//! (N × 1) or a propagator (N × N). Nothing here knows about the closed
//! forms; it is the reference they are checked against.

use nalgebra::{SMatrix, SVector};
use num_complex::Complex64 as C64;

use crate::algebra::{hermiticity_defect, HERMITIAN_TOL};
use crate::error::{DimerError, Result};

/// Interior points, besides both endpoints, at which H(t) is checked for
/// Hermiticity.
pub const HERMITICITY_PROBES: usize = 8;

#[derive(Copy, Clone, Debug, PartialEq)]
pub struct IntegrationConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub initial_step: f64,
    pub max_steps: usize,
}

impl Default for IntegrationConfig {
    fn default() -> Self {
        Self { abs_tol: 1e-10, rel_tol: 1e-9, initial_step: 1e-3, max_steps: 20_000_000 }
    }
}

impl IntegrationConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0 && self.initial_step > 0.0) {
            return Err(DimerError::InvalidParameter("tolerances and initial step must be positive".into()));
        }
        if self.max_steps == 0 {
            return Err(DimerError::InvalidParameter("max_steps must be positive".into()));
        }
        Ok(())
    }
}

/// Result of one integration.
#[derive(Clone, Debug, PartialEq)]
pub struct Solution<const N: usize, const M: usize> {
    pub value: SMatrix<C64, N, M>,
    pub t: f64,
    pub steps: usize,
    pub rejected: usize,
    /// |‖Y(t)‖_F − ‖Y(0)‖_F|; zero for exact unitary evolution.
    pub norm_drift: f64,
    /// Step size the controller would try next.
    pub next_step: f64,
}

fn check_hermitian<const N: usize, F>(h: &F, t0: f64, t1: f64) -> Result<()>
where
    F: Fn(f64) -> SMatrix<C64, N, N>,
{
    let n = HERMITICITY_PROBES + 1;
    for k in 0..=n {
        let t = t0 + (t1 - t0) * k as f64 / n as f64;
        let deviation = hermiticity_defect(&h(t));
        if deviation > HERMITIAN_TOL || !deviation.is_finite() {
            return Err(DimerError::NonHermitian { deviation });
        }
    }
    Ok(())
}

#[inline]
fn rhs<const N: usize, const M: usize>(
    h: &SMatrix<C64, N, N>,
    y: &SMatrix<C64, N, M>,
    scale: C64,
) -> SMatrix<C64, N, M> {
    (h * y) * scale
}

/// One RK4 step given H at the start, midpoint and end.
#[inline]
fn rk4<const N: usize, const M: usize>(
    hs: [&SMatrix<C64, N, N>; 3],
    y: &SMatrix<C64, N, M>,
    k1: &SMatrix<C64, N, M>,
    dt: f64,
    scale: C64,
) -> SMatrix<C64, N, M> {
    let half = C64::new(0.5 * dt, 0.0);
    let full = C64::new(dt, 0.0);
    let k2 = rhs(hs[1], &(y + k1 * half), scale);
    let k3 = rhs(hs[1], &(y + k2 * half), scale);
    let k4 = rhs(hs[2], &(y + k3 * full), scale);
    y + (k1 + (k2 + k3) * C64::new(2.0, 0.0) + k4) * C64::new(dt / 6.0, 0.0)
}

/// Adaptive integration of Y from `t0` to `t_end`.
pub fn integrate<const N: usize, const M: usize, F>(
    h: F,
    hbar: f64,
    y0: &SMatrix<C64, N, M>,
    t0: f64,
    t_end: f64,
    cfg: &IntegrationConfig,
) -> Result<Solution<N, M>>
where
    F: Fn(f64) -> SMatrix<C64, N, N>,
{
    cfg.validate()?;
    if !(hbar > 0.0) {
        return Err(DimerError::InvalidParameter(format!("ℏ must be positive, got {hbar}")));
    }
    if !(t_end >= t0) || !t_end.is_finite() {
        return Err(DimerError::InvalidParameter(format!("need t_end ≥ t0, got [{t0}, {t_end}]")));
    }
    check_hermitian(&h, t0, t_end)?;
    advance(&h, hbar, *y0, t0, t_end, cfg.initial_step, cfg)
}

fn advance<const N: usize, const M: usize, F>(
    h: &F,
    hbar: f64,
    y0: SMatrix<C64, N, M>,
    t0: f64,
    t_end: f64,
    first_step: f64,
    cfg: &IntegrationConfig,
) -> Result<Solution<N, M>>
where
    F: Fn(f64) -> SMatrix<C64, N, N>,
{
    let scale = C64::new(0.0, -1.0 / hbar);
    let norm0 = y0.norm();
    let mut y = y0;
    let mut t = t0;
    let mut dt = first_step;
    let mut steps = 0usize;
    let mut rejected = 0usize;

    while t < t_end {
        if steps + rejected >= cfg.max_steps {
            return Err(DimerError::StepLimitExceeded { max_steps: cfg.max_steps, t_end });
        }
        let remaining = t_end - t;
        let last = dt >= remaining;
        let step = if last { remaining } else { dt };
        if step <= 1e-14 * t.abs().max(1.0) && !last {
            return Err(DimerError::ToleranceUnreachable { t });
        }

        let h0 = h(t);
        let h1 = h(t + 0.25 * step);
        let h2 = h(t + 0.5 * step);
        let h3 = h(t + 0.75 * step);
        let h4 = h(t + step);
        let k1 = rhs(&h0, &y, scale);
        let coarse = rk4([&h0, &h2, &h4], &y, &k1, step, scale);
        let mid = rk4([&h0, &h1, &h2], &y, &k1, 0.5 * step, scale);
        let k1m = rhs(&h2, &mid, scale);
        let fine = rk4([&h2, &h3, &h4], &mid, &k1m, 0.5 * step, scale);

        let diff = fine - coarse;
        let mut err: f64 = 0.0;
        for (d, f) in diff.iter().zip(fine.iter()) {
            let sc = cfg.abs_tol + cfg.rel_tol * f.norm();
            err = err.max(d.norm() / sc);
        }
        if !err.is_finite() {
            return Err(DimerError::ToleranceUnreachable { t });
        }

        if err <= 1.0 {
            y = fine + diff * C64::new(1.0 / 15.0, 0.0);
            t = if last { t_end } else { t + step };
            steps += 1;
        } else {
            rejected += 1;
        }
        let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        // a shortened final step says nothing about the natural step size
        if !(last && err <= 1.0) {
            dt = step * factor;
        }
        if dt <= 1e-14 * t.abs().max(1.0) {
            return Err(DimerError::ToleranceUnreachable { t });
        }
    }

    Ok(Solution { value: y, t: t_end, steps, rejected, norm_drift: (y.norm() - norm0).abs(), next_step: dt })
}

/// |ψ(t_end)⟩ from |ψ(0)⟩.
pub fn integrate_state<const N: usize, F>(
    h: F,
    hbar: f64,
    state0: &SVector<C64, N>,
    t_end: f64,
    cfg: &IntegrationConfig,
) -> Result<Solution<N, 1>>
where
    F: Fn(f64) -> SMatrix<C64, N, N>,
{
    integrate(h, hbar, state0, 0.0, t_end, cfg)
}

/// 𝒰(t_end) with 𝒰(0) = I.
pub fn integrate_propagator<const N: usize, F>(
    h: F,
    hbar: f64,
    t_end: f64,
    cfg: &IntegrationConfig,
) -> Result<Solution<N, N>>
where
    F: Fn(f64) -> SMatrix<C64, N, N>,
{
    integrate(h, hbar, &SMatrix::<C64, N, N>::identity(), 0.0, t_end, cfg)
}

/// Values of Y at each of the ascending `times` (all ≥ 0), integrating from
/// Y(0) = `y0` and carrying the step size across checkpoints.
pub fn integrate_checkpoints<const N: usize, const M: usize, F>(
    h: F,
    hbar: f64,
    y0: &SMatrix<C64, N, M>,
    times: &[f64],
    cfg: &IntegrationConfig,
) -> Result<Vec<SMatrix<C64, N, M>>>
where
    F: Fn(f64) -> SMatrix<C64, N, N>,
{
    cfg.validate()?;
    if times.windows(2).any(|w| w[1] < w[0]) || times.first().is_some_and(|&t| t < 0.0) {
        return Err(DimerError::InvalidParameter("checkpoint times must be ascending and ≥ 0".into()));
    }
    let Some(&t_last) = times.last() else {
        return Ok(Vec::new());
    };
    check_hermitian(&h, 0.0, t_last)?;
    let mut out = Vec::with_capacity(times.len());
    let mut y = *y0;
    let mut t = 0.0;
    let mut dt = cfg.initial_step;
    let mut budget = *cfg;
    for &target in times {
        if target > t {
            let sol = advance(&h, hbar, y, t, target, dt, &budget)?;
            y = sol.value;
            dt = sol.next_step;
            budget.max_steps = budget.max_steps.saturating_sub(sol.steps + sol.rejected).max(1);
            t = target;
        }
        out.push(y);
    }
    Ok(out)
}

/// Plain RK4 with `n_steps` equal steps; used for convergence-order checks.
pub fn integrate_fixed_step<const N: usize, const M: usize, F>(
    h: F,
    hbar: f64,
    y0: &SMatrix<C64, N, M>,
    t_end: f64,
    n_steps: usize,
) -> Result<SMatrix<C64, N, M>>
where
    F: Fn(f64) -> SMatrix<C64, N, N>,
{
    if n_steps == 0 {
        return Err(DimerError::InvalidParameter("n_steps must be positive".into()));
    }
    let scale = C64::new(0.0, -1.0 / hbar);
    let dt = t_end / n_steps as f64;
    let mut y = *y0;
    for i in 0..n_steps {
        let t = i as f64 * dt;
        let h0 = h(t);
        let h1 = h(t + 0.5 * dt);
        let h2 = h(t + dt);
        let k1 = rhs(&h0, &y, scale);
        y = rk4([&h0, &h1, &h2], &y, &k1, dt, scale);
    }
    Ok(y)
}
