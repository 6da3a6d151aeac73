//! Observables of two-spin pure states, and their closed forms along the
//! engineered trajectories.
//!
//! The state-derived functions work on any `StateVec4` through explicit
//! operators. The `analytic_*` functions evaluate closed forms written out
//! from the scenario amplitudes and phases, deliberately without going
//! through [`crate::single_spin`], so that comparing the two is a real test.
//! Closed forms accept complex transverse couplings: arg Γ enters as the
//! phase χ in the off-diagonal entries of the sector propagator and reduces
//! to the familiar real-coupling forms when χ = 0.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4, PI};

use num_complex::Complex64 as C64;

use crate::algebra::{
    collective_spin, expectation, pauli, pauli_pair, spin_squared, Axis, NamedState, Site, StateVec4,
};
use crate::dimer::{sector_gamma, DimerCouplings, Sector};
use crate::error::{DimerError, Result};
use crate::single_spin::{Scenario, SectorParams};

/// C = 2|c₊₊c₋₋ − c₊₋c₋₊|
pub fn concurrence(state: &StateVec4) -> f64 {
    2.0 * (state[0] * state[3] - state[1] * state[2]).norm()
}

/// Spin-spin covariances C_ab = ⟨σ₁ᵃσ₂ᵇ⟩ − ⟨σ₁ᵃ⟩⟨σ₂ᵇ⟩.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct Covariances {
    pub cxx: f64,
    pub cyy: f64,
    /// Covariance of σ₁ˣ and σ₂ʸ.
    pub cxy: f64,
}

fn covariance(state: &StateVec4, a: Axis, b: Axis) -> Result<f64> {
    let joint = expectation(state, &pauli_pair(a, b))?;
    let first = expectation(state, &pauli(a, Site::One))?;
    let second = expectation(state, &pauli(b, Site::Two))?;
    Ok(joint - first * second)
}

pub fn covariances(state: &StateVec4) -> Result<Covariances> {
    Ok(Covariances {
        cxx: covariance(state, Axis::X, Axis::X)?,
        cyy: covariance(state, Axis::Y, Axis::Y)?,
        cxy: covariance(state, Axis::X, Axis::Y)?,
    })
}

pub fn sz(state: &StateVec4, hbar: f64) -> Result<f64> {
    expectation(state, &collective_spin(Axis::Z, hbar))
}

pub fn sx(state: &StateVec4, hbar: f64) -> Result<f64> {
    expectation(state, &collective_spin(Axis::X, hbar))
}

pub fn s2(state: &StateVec4, hbar: f64) -> Result<f64> {
    expectation(state, &spin_squared(hbar))
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum Bell {
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
}

impl Bell {
    pub const ALL: [Bell; 4] = [Bell::PhiPlus, Bell::PhiMinus, Bell::PsiPlus, Bell::PsiMinus];

    pub fn vector(self) -> StateVec4 {
        match self {
            Bell::PhiPlus => NamedState::PhiPlus.vector(),
            Bell::PhiMinus => NamedState::PhiMinus.vector(),
            Bell::PsiPlus => NamedState::PsiPlus.vector(),
            Bell::PsiMinus => NamedState::PsiMinus.vector(),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Bell::PhiPlus => "phi_plus",
            Bell::PhiMinus => "phi_minus",
            Bell::PsiPlus => "psi_plus",
            Bell::PsiMinus => "psi_minus",
        }
    }
}

/// |⟨Bell|ψ⟩|²
pub fn bell_fidelity(state: &StateVec4, which: Bell) -> f64 {
    which.vector().dotc(state).norm_sqr()
}

/// |⟨ψ₀|ψ(t)⟩|²
pub fn survival_probability(state_t: &StateVec4, state_0: &StateVec4) -> f64 {
    state_0.dotc(state_t).norm_sqr()
}

/// Everything the figures and the CLI report at one instant.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct ObservableSample {
    pub t: f64,
    pub sz: f64,
    pub s2: f64,
    pub sx: f64,
    pub concurrence: f64,
    pub cxx: f64,
    pub cyy: f64,
    pub cxy: f64,
}

impl ObservableSample {
    pub fn from_state(t: f64, state: &StateVec4, hbar: f64) -> Result<Self> {
        let cov = covariances(state)?;
        Ok(Self {
            t,
            sz: sz(state, hbar)?,
            s2: s2(state, hbar)?,
            sx: sx(state, hbar)?,
            concurrence: concurrence(state),
            cxx: cov.cxx,
            cyy: cov.cyy,
            cxy: cov.cxy,
        })
    }
}

/// Which initial state of a parity sector a closed form starts from: α is the
/// sector's first basis state (|++⟩ or |+−⟩), β the second (|−−⟩ or |−+⟩).
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum Branch {
    Alpha,
    Beta,
}

impl Branch {
    fn sign(self) -> f64 {
        match self {
            Branch::Alpha => 1.0,
            Branch::Beta => -1.0,
        }
    }
}

/// Dimensionless argument, moduli and phases of a scenario propagator,
/// written out independently of the engine.
#[derive(Copy, Clone, Debug)]
struct Closed {
    /// 2|a||b|
    two_ab: f64,
    a: f64,
    b: f64,
    phi_a: f64,
    phi_b: f64,
    /// φ_b − φ_a + π/2
    beat: f64,
    /// sin Θ, cos Θ
    sin_theta: f64,
    cos_theta: f64,
}

fn closed(scenario: Scenario, t: f64, p: &SectorParams) -> Result<Closed> {
    if p.gamma_abs <= 0.0 {
        return Err(DimerError::DegenerateCoupling("closed forms need a non-zero transverse coupling"));
    }
    let g = p.gamma_abs / p.hbar;
    let (x, a, b, r) = match scenario {
        Scenario::S1 => {
            let x = 2.0 * g * t;
            let s = if x.abs() > 700.0 { 0.0 } else { 1.0 / x.cosh() };
            (x, (0.5 * (1.0 + s)).sqrt(), (0.5 * (1.0 - s)).sqrt(), 0.5 * x)
        }
        Scenario::S2 => {
            let x = g * t;
            let s = if x.abs() > 700.0 { 0.0 } else { 1.0 / x.cosh() };
            (x, s, x.tanh(), 0.5 * x.sinh())
        }
    };
    let half_theta = (0.5 * x).tanh().atan();
    Ok(Closed {
        two_ab: 2.0 * a * b,
        a,
        b,
        phi_a: -(half_theta + r),
        phi_b: -half_theta + r - FRAC_PI_2,
        beat: 2.0 * r,
        sin_theta: x.tanh(),
        cos_theta: if x.abs() > 700.0 { 0.0 } else { 1.0 / x.cosh() },
    })
}

/// ⟨Ŝᶻ⟩ starting from |++⟩ (α) or |−−⟩ (β) under a parity-+ scenario:
/// ±ℏ sech(2|Γ₊|t/ℏ) for S1 and ±ℏ(2 sech²(|Γ₊|t/ℏ) − 1) for S2.
pub fn analytic_sz_parity_plus(t: f64, scenario: Scenario, branch: Branch, p: &SectorParams) -> Result<f64> {
    let k = closed(scenario, t, p)?;
    Ok(branch.sign() * p.hbar * (k.a * k.a - k.b * k.b))
}

/// Parity-minus driving for [`analytic_s2_parity_minus`].
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum MinusDrive {
    Engineered(Scenario),
    Static,
}

/// ⟨Ŝ²⟩ starting from |+−⟩ (α) or |−+⟩ (β).
///
/// Engineered: ℏ²[1 ± 2|a||b| sin(Θ − χ)], i.e. ℏ²[1 ± tanh²] (S1) and
/// ℏ²[1 ± 2tanh²/cosh] (S2) for real Γ₋. Static: ℏ²[1 ∓ sin(2|Γ₋|t/ℏ) cos Φ].
pub fn analytic_s2_parity_minus(
    t: f64,
    drive: MinusDrive,
    branch: Branch,
    p: &SectorParams,
    static_phi: f64,
) -> Result<f64> {
    let h2 = p.hbar * p.hbar;
    match drive {
        MinusDrive::Engineered(s) => {
            let k = closed(s, t, p)?;
            let chi = p.gamma_phase;
            let sin_theta_minus_chi = k.sin_theta * chi.cos() - k.cos_theta * chi.sin();
            Ok(h2 * (1.0 + branch.sign() * k.two_ab * sin_theta_minus_chi))
        }
        MinusDrive::Static => {
            let x = 2.0 * p.gamma_abs * t / p.hbar;
            Ok(h2 * (1.0 - branch.sign() * x.sin() * static_phi.cos()))
        }
    }
}

/// Initial states of [`analytic_concurrence`], relative to the sector.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum ConcurrenceSource {
    /// |++⟩ (or |+−⟩ for the minus sector)
    FromBasis,
    /// (|++⟩ + |−−⟩)/√2 (or (|+−⟩ + |−+⟩)/√2)
    FromBell,
}

/// Concurrence along a single-sector trajectory. For the minus sector pass
/// the minus-sector parameters; the forms are otherwise identical.
pub fn analytic_concurrence(t: f64, source: ConcurrenceSource, scenario: Scenario, p: &SectorParams) -> Result<f64> {
    let k = closed(scenario, t, p)?;
    Ok(match source {
        ConcurrenceSource::FromBasis => k.two_ab,
        ConcurrenceSource::FromBell => {
            let s = (k.beat + p.gamma_phase).sin();
            (1.0 - k.two_ab * k.two_ab * s * s).max(0.0).sqrt()
        }
    })
}

/// (|c₊₊|, |c₋₋|) starting from (|++⟩ + |−−⟩)/√2; equal to 1/√2 exactly
/// where the concurrence reaches 1.
pub fn analytic_bell_moduli(t: f64, scenario: Scenario, p: &SectorParams) -> Result<(f64, f64)> {
    let k = closed(scenario, t, p)?;
    let d = k.two_ab * (k.beat + p.gamma_phase).sin();
    Ok(((0.5 * (1.0 + d)).max(0.0).sqrt(), (0.5 * (1.0 - d)).max(0.0).sqrt()))
}

/// Sum of the two components of 𝓔(½, ½)ᵀ, up to the sector phase.
fn sector_sum(k: &Closed, chi: f64) -> C64 {
    C64::new(k.a * k.phi_a.cos(), k.b * (k.phi_b + chi).sin())
}

fn sx_from_sums(plus: C64, minus: C64, c: &DimerCouplings, t: f64) -> f64 {
    let z = c.gzz * t / c.hbar;
    c.hbar * (C64::from_polar(1.0, 2.0 * z) * plus.conj() * minus).re
}

/// ⟨Ŝˣ⟩ starting from c₊₊ = c₊₋ = c₋₊ = c₋₋ = ½ under a full schedule.
pub fn analytic_sx(t: f64, c: &DimerCouplings, plus: Scenario, minus: Scenario) -> Result<f64> {
    let pp = c.sector_params(Sector::Plus);
    let pm = c.sector_params(Sector::Minus);
    let kp = closed(plus, t, &pp)?;
    let km = closed(minus, t, &pm)?;
    Ok(sx_from_sums(sector_sum(&kp, pp.gamma_phase), sector_sum(&km, pm.gamma_phase), c, t))
}

/// Long-time form of [`analytic_sx`] for the (S1, S1) schedule, with both
/// sectors at |a| = |b| = 1/√2. For real Γ± this is
/// (ℏ/2) cos[(−γzz/|Γ₊| + |Γ₋|/(2|Γ₊|) − ½) τ₊], τ₊ = 2|Γ₊|t/ℏ.
pub fn analytic_sx_asymptotic(t: f64, c: &DimerCouplings) -> Result<f64> {
    let asym = |sector: Sector| -> Result<C64> {
        let p = c.sector_params(sector);
        if p.gamma_abs <= 0.0 {
            return Err(DimerError::DegenerateCoupling("asymptotic ⟨Ŝˣ⟩ needs both sectors driven"));
        }
        let r = p.gamma_abs * t / p.hbar;
        let k = Closed {
            two_ab: 1.0,
            a: FRAC_1_SQRT_2,
            b: FRAC_1_SQRT_2,
            phi_a: -FRAC_PI_4 - r,
            phi_b: -3.0 * FRAC_PI_4 + r,
            beat: 2.0 * r,
            sin_theta: 1.0,
            cos_theta: 0.0,
        };
        Ok(sector_sum(&k, p.gamma_phase))
    };
    Ok(sx_from_sums(asym(Sector::Plus)?, asym(Sector::Minus)?, c, t))
}

/// The single-cosine asymptote with the γzz term entering as +γzz/|Γ₊|, as
/// it is usually quoted. It agrees with [`analytic_sx_asymptotic`] only for
/// γzz = 0 and real Γ±.
pub fn quoted_sx_asymptote(t: f64, c: &DimerCouplings) -> f64 {
    let gp = sector_gamma(c, Sector::Plus).norm();
    let gm = sector_gamma(c, Sector::Minus).norm();
    let tau = 2.0 * gp * t / c.hbar;
    0.5 * c.hbar * ((c.gzz / gp + gm / (2.0 * gp) - 0.5) * tau).cos()
}

/// One of the instants (τ′₊)ₙ = arcsinh(nπ) at which the (S2, from Bell)
/// trajectory is maximally entangled.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct EntanglementInstant {
    pub n: u32,
    /// arcsinh(nπ)
    pub tau: f64,
    /// √((√(1+(nπ)²) − 1)/(√(1+(nπ)²) + 1)) = tanh(τₙ/2)
    pub phi: f64,
    /// arctan((−1)ⁿ⁺¹ nπ)
    pub theta: f64,
    /// φₐ⁺ evaluated directly from the scenario phase at τₙ:
    /// −(arctan tanh(τₙ/2) + nπ/2).
    pub phi_a_literal: f64,
}

pub fn entanglement_instants(n: u32) -> EntanglementInstant {
    let npi = n as f64 * PI;
    let root = (1.0 + npi * npi).sqrt();
    let tau = npi.asinh();
    let sign = if n.is_multiple_of(2) { -1.0 } else { 1.0 };
    EntanglementInstant {
        n,
        tau,
        phi: ((root - 1.0) / (root + 1.0)).sqrt(),
        theta: (sign * npi).atan(),
        phi_a_literal: -((0.5 * tau).tanh().atan() + 0.5 * npi),
    }
}
