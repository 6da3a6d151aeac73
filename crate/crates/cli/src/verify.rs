//! The verification suite: closed forms against the integrator, plus the
//! structural invariants, with per-check maximum errors.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use num_complex::Complex64 as C64;
use spin_dimer::algebra::{cr, expectation, kron, max_abs_diff, parity, CMat2, CMat4, StateVec4};
use spin_dimer::dimer::{
    assemble_propagator, sector_block, sector_gamma, sector_zz_phase, symmetry_u, DimerCouplings, Propagator4, Sector,
};
use spin_dimer::observables::{concurrence, covariances};
use spin_dimer::oracle::{integrate_checkpoints, integrate_propagator, IntegrationConfig};
use spin_dimer::schedules::{full_schedule, FieldSchedule, OmegaFn};
use spin_dimer::single_spin::{static_sector_propagator, Propagator2, Scenario, SectorParams};
use spin_dimer::Result;

pub const SEED_ENV: &str = "SPIN_DIMER_SEED";
pub const DEFAULT_SEED: u64 = 0x5eed_d1e4;

pub const ORACLE_TOL: f64 = 1e-6;
pub const INVARIANT_TOL: f64 = 1e-10;
pub const ASSEMBLY_TOL: f64 = 1e-13;

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Level {
    Fast,
    Full,
}

impl std::str::FromStr for Level {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "fast" => Ok(Level::Fast),
            "full" => Ok(Level::Full),
            other => Err(format!("unknown level '{other}' (fast or full)")),
        }
    }
}

/// The closed forms under test. The default methods are the library's; a
/// test can override one to check that the suite notices.
pub trait ClosedForms: Sync {
    fn sector_propagator(&self, scenario: Scenario, t: f64, p: &SectorParams) -> Result<Propagator2> {
        scenario.propagator(t, p)
    }

    fn full_propagator(&self, c: &DimerCouplings, plus: Scenario, minus: Scenario, t: f64) -> Result<Propagator4> {
        let pp = self.sector_propagator(plus, t, &c.sector_params(Sector::Plus))?;
        let pm = self.sector_propagator(minus, t, &c.sector_params(Sector::Minus))?;
        assemble_propagator(&pp, &pm, c, t)
    }
}

pub struct Library;

impl ClosedForms for Library {}

#[derive(Clone, Debug)]
pub struct CheckResult {
    pub name: &'static str,
    pub max_error: f64,
    pub tol: f64,
    pub error: Option<String>,
}

impl CheckResult {
    pub fn passed(&self) -> bool {
        self.error.is_none() && self.max_error <= self.tol
    }
}

impl fmt::Display for CheckResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.passed() { "PASS" } else { "FAIL" };
        write!(f, "{tag} {:<24} max_err={:.3e} tol={:.1e}", self.name, self.max_error, self.tol)?;
        if let Some(e) = &self.error {
            write!(f, " error: {e}")?;
        }
        Ok(())
    }
}

fn check(name: &'static str, tol: f64, body: impl FnOnce() -> Result<f64>) -> CheckResult {
    match body() {
        Ok(max_error) => CheckResult { name, max_error, tol, error: None },
        Err(e) => CheckResult { name, max_error: f64::NAN, tol, error: Some(e.to_string()) },
    }
}

fn max_of(errs: impl ParallelIterator<Item = Result<f64>>) -> Result<f64> {
    errs.try_reduce(|| 0.0, |a, b| Ok(a.max(b)))
}

fn grid(t_max: f64, n: usize) -> Vec<f64> {
    (0..=n).map(|k| t_max * k as f64 / n as f64).collect()
}

pub fn seed_from_env() -> u64 {
    std::env::var(SEED_ENV).ok().and_then(|s| s.trim().parse().ok()).unwrap_or(DEFAULT_SEED)
}

struct Plan {
    draws: usize,
    points: usize,
    gzz: &'static [f64],
}

impl Plan {
    fn of(level: Level) -> Self {
        match level {
            Level::Fast => Plan { draws: 3, points: 20, gzz: &[0.37] },
            Level::Full => Plan { draws: 20, points: 40, gzz: &[0.0, 0.37] },
        }
    }
}

/// Random |Γ| ∈ [0.1, 5], phase of Γ and ℏ ∈ [0.5, 2] against integration
/// over γt ∈ [0, 10].
fn sector_oracle(forms: &dyn ClosedForms, plan: &Plan, rng: &mut ChaCha8Rng) -> Result<f64> {
    let mut cases = Vec::new();
    for scenario in [Scenario::S1, Scenario::S2] {
        for _ in 0..plan.draws {
            let p =
                SectorParams::new(rng.random_range(0.1..5.0), rng.random_range(-PI..PI), rng.random_range(0.5..2.0))?;
            cases.push((scenario, p));
        }
    }
    let cfg = IntegrationConfig::default();
    max_of(cases.par_iter().map(|(scenario, p)| {
        let times = grid(10.0 / scenario.rate(p), plan.points);
        let h = |t: f64| p.hamiltonian(scenario.field(t, p));
        let us = integrate_checkpoints(h, p.hbar, &CMat2::identity(), &times, &cfg)?;
        let mut worst: f64 = 0.0;
        for (u, &t) in us.iter().zip(&times) {
            worst = worst.max(max_abs_diff(u, &forms.sector_propagator(*scenario, t, p)?.matrix()));
        }
        Ok(worst)
    }))
}

/// The four schedules with γxx = γyy = 1, γxy = γyx = ½ over γ₊t ∈ [0, 10].
fn full_oracle(forms: &dyn ClosedForms, plan: &Plan) -> Result<f64> {
    let mut cases = Vec::new();
    for &gzz in plan.gzz {
        for plus in [Scenario::S1, Scenario::S2] {
            for minus in [Scenario::S1, Scenario::S2] {
                cases.push((DimerCouplings::special(1.0, gzz)?, plus, minus));
            }
        }
    }
    let cfg = IntegrationConfig::default();
    max_of(cases.par_iter().map(|(c, plus, minus)| {
        let s = full_schedule(c, *plus, *minus)?;
        let gamma_plus = 2.0 * sector_gamma(c, Sector::Plus).norm() / c.hbar;
        let times = grid(10.0 / gamma_plus, plan.points);
        let us = integrate_checkpoints(|t| s.hamiltonian(t), c.hbar, &CMat4::identity(), &times, &cfg)?;
        let mut worst: f64 = 0.0;
        for (u, &t) in us.iter().zip(&times) {
            worst = worst.max(max_abs_diff(u, &forms.full_propagator(c, *plus, *minus, t)?.matrix));
        }
        Ok(worst)
    }))
}

/// With ω₁ = ω₂ = ω(t) the minus block is the static propagator for any ω.
fn static_block() -> Result<f64> {
    let c = DimerCouplings::new(0.8, 0.3, 0.45, -0.2, 0.6, 1.0)?;
    let gm = sector_gamma(&c, Sector::Minus);
    let drives: Vec<OmegaFn> = vec![
        Arc::new(|t: f64| 1.5 * t.sin()),
        Arc::new(|t: f64| 0.3 + t * t / 4.0),
        Arc::new(|t: f64| 2.0 / (1.0 + t).cosh()),
    ];
    let cfg = IntegrationConfig::default();
    max_of(drives.into_par_iter().map(|w| {
        let s = FieldSchedule::equal_omega(c, w);
        let mut worst: f64 = 0.0;
        for t in [0.5, 2.0, 4.0] {
            let u = integrate_propagator(|t| s.hamiltonian(t), c.hbar, t, &cfg)?.value;
            worst = worst
                .max(max_abs_diff(&sector_block(&u, Sector::Minus), &static_sector_propagator(t, gm, c.gzz, c.hbar)));
        }
        Ok(worst)
    }))
}

fn random_couplings(rng: &mut ChaCha8Rng) -> Result<DimerCouplings> {
    loop {
        let mut g = || rng.random_range(-2.0..2.0);
        let c = DimerCouplings::new(g(), g(), g(), g(), g(), rng.random_range(0.5..2.0))?;
        if Sector::BOTH.iter().all(|&s| c.sector_params(s).gamma_abs > 0.05) {
            return Ok(c);
        }
    }
}

fn random_state(rng: &mut ChaCha8Rng) -> StateVec4 {
    let mut amp = || C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
    let psi = StateVec4::new(amp(), amp(), amp(), amp());
    psi / cr(psi.norm())
}

/// assemble_propagator against 𝕌(𝒰̃₊ ⊗ |↑⟩⟨↑| + 𝒰̃₋ ⊗ |↓⟩⟨↓|)𝕌 on random sector propagators.
fn assembly(rng: &mut ChaCha8Rng) -> Result<f64> {
    let mut worst: f64 = 0.0;
    let s = symmetry_u();
    let up = CMat2::new(cr(1.0), cr(0.0), cr(0.0), cr(0.0));
    let down = CMat2::new(cr(0.0), cr(0.0), cr(0.0), cr(1.0));
    for _ in 0..100 {
        let c = random_couplings(rng)?;
        let t = rng.random_range(0.0..5.0);
        let mut draw = || {
            let angle: f64 = rng.random_range(0.0..PI / 2.0);
            Propagator2 {
                t,
                a_abs: angle.cos(),
                b_abs: angle.sin(),
                phi_a: rng.random_range(-6.0..6.0),
                phi_b: rng.random_range(-6.0..6.0),
                transverse_phase: rng.random_range(-PI..PI),
            }
        };
        let (pp, pm) = (draw(), draw());
        let u = assemble_propagator(&pp, &pm, &c, t)?;
        let bp = pp.matrix() * sector_zz_phase(&c, Sector::Plus, t);
        let bm = pm.matrix() * sector_zz_phase(&c, Sector::Minus, t);
        let brute = s * (kron(&bp, &up) + kron(&bm, &down)) * s;
        worst = worst.max(max_abs_diff(&u.matrix, &brute));
    }
    Ok(worst)
}

struct Trajectory {
    c: DimerCouplings,
    plus: Scenario,
    minus: Scenario,
    psi: StateVec4,
    x: f64,
}

fn random_trajectories(rng: &mut ChaCha8Rng, n: usize) -> Result<Vec<Trajectory>> {
    let pick = |rng: &mut ChaCha8Rng| if rng.random_bool(0.5) { Scenario::S1 } else { Scenario::S2 };
    (0..n)
        .map(|_| {
            Ok(Trajectory {
                c: random_couplings(rng)?,
                plus: pick(rng),
                minus: pick(rng),
                psi: random_state(rng),
                x: rng.random_range(0.0..10.0),
            })
        })
        .collect()
}

/// Unitarity defect and parity drift along random closed-form trajectories.
fn unitarity_and_parity(forms: &dyn ClosedForms, trajectories: &[Trajectory]) -> Result<f64> {
    max_of(trajectories.par_iter().map(|tr| {
        let t = tr.x * tr.c.hbar / (2.0 * tr.c.sector_params(Sector::Plus).gamma_abs);
        let u = forms.full_propagator(&tr.c, tr.plus, tr.minus, t)?;
        let out = u.matrix * tr.psi;
        let drift = (expectation(&out, &parity())? - expectation(&tr.psi, &parity())?).abs();
        Ok(u.unitarity_defect().max(drift))
    }))
}

/// C = √(Cxx² + Cxy²) on parity-definite trajectories.
fn concurrence_covariance(forms: &dyn ClosedForms, trajectories: &[Trajectory]) -> Result<f64> {
    max_of(trajectories.par_iter().map(|tr| {
        let t = tr.x * tr.c.hbar / (2.0 * tr.c.sector_params(Sector::Plus).gamma_abs);
        let u = forms.full_propagator(&tr.c, tr.plus, tr.minus, t)?;
        let mut worst: f64 = 0.0;
        for sector in Sector::BOTH {
            let (i, j) = sector.slots();
            let mut psi = StateVec4::zeros();
            psi[i] = tr.psi[i];
            psi[j] = tr.psi[j];
            if psi.norm() < 1e-3 {
                continue;
            }
            let out = u.matrix * (psi / cr(psi.norm()));
            let cov = covariances(&out)?;
            worst = worst.max((concurrence(&out) - cov.cxx.hypot(cov.cxy)).abs());
        }
        Ok(worst)
    }))
}

pub fn run(level: Level, seed: u64, forms: &dyn ClosedForms) -> Vec<CheckResult> {
    let plan = Plan::of(level);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut results = vec![
        check("sector_oracle", ORACLE_TOL, || sector_oracle(forms, &plan, &mut rng)),
        check("full_oracle", ORACLE_TOL, || full_oracle(forms, &plan)),
        check("static_block", ORACLE_TOL, static_block),
        check("assembly_brute_force", ASSEMBLY_TOL, || assembly(&mut rng)),
    ];
    match random_trajectories(&mut rng, 100) {
        Ok(tr) => {
            results.push(check("unitarity_parity", INVARIANT_TOL, || unitarity_and_parity(forms, &tr)));
            results.push(check("concurrence_covariance", INVARIANT_TOL, || concurrence_covariance(forms, &tr)));
        }
        Err(e) => results.push(CheckResult {
            name: "random_trajectories",
            max_error: f64::NAN,
            tol: 0.0,
            error: Some(e.to_string()),
        }),
    }
    results
}
