//! Field engineering: the ω₁(t), ω₂(t) pairs that make the dimer exactly
//! solvable, and the conversion to laboratory fields.
//!
//! The two sector drives are Ω± = ℏ(ω₁ ± ω₂). Fixing both (a full schedule)
//! solves the whole dynamics; fixing one (a subspace schedule) solves one
//! parity sector and leaves the orthogonal combination free. A free
//! combination of zero means ω₁ = ω₂ (or ω₁ = −ω₂), which makes the other
//! sector time independent and therefore solvable too.

use std::fmt;
use std::sync::Arc;

use crate::algebra::{CMat4, StateVec4};
use crate::dimer::{
    assemble_propagator, build_hamiltonian, sector_weight, static_full_propagator, DimerCouplings, Propagator4, Sector,
};
use crate::error::{DimerError, Result};
use crate::single_spin::{static_propagator, Propagator2, Scenario, SectorParams};

/// Bohr magneton in J/T (CODATA 2018).
pub const BOHR_MAGNETON: f64 = 9.2740100783e-24;
/// Reduced Planck constant in J·s.
pub const HBAR_SI: f64 = 1.054571817e-34;

/// Weight in an unsolved sector below which a state is treated as lying
/// entirely in the solved one.
pub const UNSOLVED_WEIGHT_TOL: f64 = 1e-12;

pub type OmegaFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// How the dynamics of one parity sector is known in closed form.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum SectorSolution {
    Engineered(Scenario),
    /// The sector drive vanishes identically.
    Static,
    Unsolved,
}

impl SectorSolution {
    pub fn label(self) -> &'static str {
        match self {
            SectorSolution::Engineered(Scenario::S1) => "S1",
            SectorSolution::Engineered(Scenario::S2) => "S2",
            SectorSolution::Static => "static",
            SectorSolution::Unsolved => "none",
        }
    }
}

/// The combination of ω₁, ω₂ left open by a subspace schedule, in rad per
/// unit time: ω₁ − ω₂ for sector +, ω₁ + ω₂ for sector −.
#[derive(Clone, Default)]
pub enum Free {
    #[default]
    Zero,
    Function(OmegaFn),
}

impl Free {
    pub fn constant(value: f64) -> Self {
        Free::Function(Arc::new(move |_| value))
    }

    fn eval(&self, t: f64) -> f64 {
        match self {
            Free::Zero => 0.0,
            Free::Function(f) => f(t),
        }
    }
}

#[derive(Clone)]
pub struct FieldSchedule {
    pub couplings: DimerCouplings,
    omega1: OmegaFn,
    omega2: OmegaFn,
    pub plus: SectorSolution,
    pub minus: SectorSolution,
}

impl fmt::Debug for FieldSchedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldSchedule")
            .field("couplings", &self.couplings)
            .field("plus", &self.plus)
            .field("minus", &self.minus)
            .finish_non_exhaustive()
    }
}

impl FieldSchedule {
    /// An arbitrary schedule; neither sector is assumed solvable.
    pub fn custom(couplings: DimerCouplings, omega1: OmegaFn, omega2: OmegaFn) -> Self {
        Self { couplings, omega1, omega2, plus: SectorSolution::Unsolved, minus: SectorSolution::Unsolved }
    }

    /// ω₁ = ω₂ = ω(t): the parity-minus sector is static whatever ω is.
    pub fn equal_omega(couplings: DimerCouplings, omega: OmegaFn) -> Self {
        Self {
            couplings,
            omega1: omega.clone(),
            omega2: omega,
            plus: SectorSolution::Unsolved,
            minus: SectorSolution::Static,
        }
    }

    pub fn omega1(&self, t: f64) -> f64 {
        (self.omega1)(t)
    }

    pub fn omega2(&self, t: f64) -> f64 {
        (self.omega2)(t)
    }

    pub fn solution(&self, sector: Sector) -> SectorSolution {
        match sector {
            Sector::Plus => self.plus,
            Sector::Minus => self.minus,
        }
    }

    /// Ω± = ℏ(ω₁ ± ω₂)
    pub fn sector_drive(&self, t: f64, sector: Sector) -> f64 {
        self.couplings.hbar * (self.omega1(t) + sector.sign() * self.omega2(t))
    }

    pub fn hamiltonian(&self, t: f64) -> CMat4 {
        build_hamiltonian(&self.couplings, self.omega1(t), self.omega2(t))
    }

    pub fn is_fully_solved(&self) -> bool {
        self.plus != SectorSolution::Unsolved && self.minus != SectorSolution::Unsolved
    }

    /// Closed-form single-spin propagator of one sector, without its γzz phase.
    pub fn sector_propagator(&self, sector: Sector, t: f64) -> Result<Propagator2> {
        let p = self.couplings.sector_params(sector);
        match self.solution(sector) {
            SectorSolution::Engineered(s) => s.propagator(t, &p),
            SectorSolution::Static => Ok(static_propagator(t, &p)),
            SectorSolution::Unsolved => Err(DimerError::UnsolvedSector { sector: sector.label(), weight: 1.0 }),
        }
    }

    pub fn propagator(&self, t: f64) -> Result<Propagator4> {
        let pp = self.sector_propagator(Sector::Plus, t)?;
        let u = if self.minus == SectorSolution::Static {
            static_full_propagator(&self.couplings, &pp, t)?
        } else {
            let pm = self.sector_propagator(Sector::Minus, t)?;
            assemble_propagator(&pp, &pm, &self.couplings, t)?
        };
        Ok(u.with_labels(self.plus.label(), self.minus.label()))
    }

    /// |ψ(t)⟩ from the closed forms. A sector without a closed form is
    /// allowed only if the state has no weight in it.
    pub fn evolve(&self, state0: &StateVec4, t: f64) -> Result<StateVec4> {
        if self.is_fully_solved() {
            return Ok(self.propagator(t)?.matrix * state0);
        }
        let mut blocks = [Propagator2::identity(0.0); 2];
        for (k, sector) in Sector::BOTH.into_iter().enumerate() {
            if self.solution(sector) == SectorSolution::Unsolved {
                let weight = sector_weight(state0, sector);
                if weight > UNSOLVED_WEIGHT_TOL {
                    return Err(DimerError::UnsolvedSector { sector: sector.label(), weight });
                }
                blocks[k].t = t;
            } else {
                blocks[k] = self.sector_propagator(sector, t)?;
            }
        }
        let u = assemble_propagator(&blocks[0], &blocks[1], &self.couplings, t)?;
        Ok(u.matrix * state0)
    }
}

fn driven_params(c: &DimerCouplings, sector: Sector) -> Result<SectorParams> {
    let p = c.sector_params(sector);
    if p.gamma_abs > 0.0 {
        Ok(p)
    } else {
        Err(DimerError::DegenerateCoupling(match sector {
            Sector::Plus => "|Γ₊| = 0 cannot carry a driven scenario",
            Sector::Minus => "|Γ₋| = 0 cannot carry a driven scenario",
        }))
    }
}

/// Both sectors driven: ω₁ = (Ω₊ + Ω₋)/2ℏ, ω₂ = (Ω₊ − Ω₋)/2ℏ.
pub fn full_schedule(c: &DimerCouplings, plus: Scenario, minus: Scenario) -> Result<FieldSchedule> {
    c.validate()?;
    let pp = driven_params(c, Sector::Plus)?;
    let pm = driven_params(c, Sector::Minus)?;
    let hbar = c.hbar;
    let omega1: OmegaFn = Arc::new(move |t| (plus.field(t, &pp) + minus.field(t, &pm)) / (2.0 * hbar));
    let omega2: OmegaFn = Arc::new(move |t| (plus.field(t, &pp) - minus.field(t, &pm)) / (2.0 * hbar));
    Ok(FieldSchedule {
        couplings: *c,
        omega1,
        omega2,
        plus: SectorSolution::Engineered(plus),
        minus: SectorSolution::Engineered(minus),
    })
}

/// One sector driven by `scenario`; the orthogonal combination is `free`.
pub fn subspace_schedule(c: &DimerCouplings, sector: Sector, scenario: Scenario, free: Free) -> Result<FieldSchedule> {
    c.validate()?;
    let p = driven_params(c, sector)?;
    let hbar = c.hbar;
    let other = match free {
        Free::Zero => SectorSolution::Static,
        Free::Function(_) => SectorSolution::Unsolved,
    };
    let f1 = free.clone();
    let f2 = free;
    let (omega1, omega2): (OmegaFn, OmegaFn) = match sector {
        Sector::Plus => (
            Arc::new(move |t| 0.5 * (scenario.field(t, &p) / hbar + f1.eval(t))),
            Arc::new(move |t| 0.5 * (scenario.field(t, &p) / hbar - f2.eval(t))),
        ),
        Sector::Minus => (
            Arc::new(move |t| 0.5 * (f1.eval(t) + scenario.field(t, &p) / hbar)),
            Arc::new(move |t| 0.5 * (f2.eval(t) - scenario.field(t, &p) / hbar)),
        ),
    };
    let (plus, minus) = match sector {
        Sector::Plus => (SectorSolution::Engineered(scenario), other),
        Sector::Minus => (other, SectorSolution::Engineered(scenario)),
    };
    let s = FieldSchedule { couplings: *c, omega1, omega2, plus, minus };
    if sector == Sector::Minus && omegas_coincide(&s) {
        return Err(DimerError::InvalidEqualOmega);
    }
    Ok(s)
}

/// True if ω₁ = ω₂ at every probe time on a coarse grid.
fn omegas_coincide(s: &FieldSchedule) -> bool {
    let scale = s.couplings.sector_params(Sector::Minus).gamma_abs / s.couplings.hbar;
    (0..=32).all(|k| {
        let t = k as f64 / (8.0 * scale.max(f64::MIN_POSITIVE));
        (s.omega1(t) - s.omega2(t)).abs() <= 1e-15 * s.omega1(t).abs().max(1.0)
    })
}

/// Unit conventions for ωᵢ = μ_B gᵢᶻᶻ Bᵢᶻ / (2ℏ). With `hbar = 1` this is the
/// bare relation ωᵢ = μ_B gᵢᶻᶻ Bᵢᶻ / 2.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct FieldUnits {
    pub mu_b: f64,
    pub hbar: f64,
}

impl Default for FieldUnits {
    fn default() -> Self {
        Self { mu_b: BOHR_MAGNETON, hbar: 1.0 }
    }
}

impl FieldUnits {
    /// SI fields for a model whose energies are measured in `energy_unit`
    /// joules and whose ℏ is `model_hbar`.
    pub fn si(energy_unit: f64, model_hbar: f64) -> Self {
        Self { mu_b: BOHR_MAGNETON / energy_unit, hbar: model_hbar }
    }
}

#[derive(Clone)]
pub struct LabField {
    b1z: OmegaFn,
    b2z: OmegaFn,
    pub g1zz: f64,
    pub g2zz: f64,
    pub units: FieldUnits,
}

impl fmt::Debug for LabField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LabField")
            .field("g1zz", &self.g1zz)
            .field("g2zz", &self.g2zz)
            .field("units", &self.units)
            .finish_non_exhaustive()
    }
}

impl LabField {
    pub fn new(b1z: OmegaFn, b2z: OmegaFn, g1zz: f64, g2zz: f64, units: FieldUnits) -> Result<Self> {
        if g1zz == 0.0 || g2zz == 0.0 {
            return Err(DimerError::ZeroGFactor);
        }
        Ok(Self { b1z, b2z, g1zz, g2zz, units })
    }

    pub fn b1z(&self, t: f64) -> f64 {
        (self.b1z)(t)
    }

    pub fn b2z(&self, t: f64) -> f64 {
        (self.b2z)(t)
    }

    pub fn omega1(&self, t: f64) -> f64 {
        self.units.mu_b * self.g1zz * self.b1z(t) / (2.0 * self.units.hbar)
    }

    pub fn omega2(&self, t: f64) -> f64 {
        self.units.mu_b * self.g2zz * self.b2z(t) / (2.0 * self.units.hbar)
    }

    /// The schedule these fields produce for the given couplings.
    pub fn to_schedule(&self, couplings: DimerCouplings) -> FieldSchedule {
        let (a, b) = (self.clone(), self.clone());
        FieldSchedule::custom(couplings, Arc::new(move |t| a.omega1(t)), Arc::new(move |t| b.omega2(t)))
    }
}

/// Bᵢᶻ(t) = 2ℏωᵢ(t)/(μ_B gᵢᶻᶻ)
pub fn omega_to_field(s: &FieldSchedule, g1zz: f64, g2zz: f64, units: FieldUnits) -> Result<LabField> {
    if g1zz == 0.0 || g2zz == 0.0 {
        return Err(DimerError::ZeroGFactor);
    }
    let (s1, s2) = (s.clone(), s.clone());
    let k1 = 2.0 * units.hbar / (units.mu_b * g1zz);
    let k2 = 2.0 * units.hbar / (units.mu_b * g2zz);
    LabField::new(Arc::new(move |t| k1 * s1.omega1(t)), Arc::new(move |t| k2 * s2.omega2(t)), g1zz, g2zz, units)
}

/// True iff g₁ᶻᶻB₁ᶻ(t) = g₂ᶻᶻB₂ᶻ(t) within 1e-10 at every sampled time, the
/// condition for ω₁ = ω₂.
pub fn equal_omega_check(f: &LabField, times: &[f64]) -> bool {
    times.iter().all(|&t| {
        let (l, r) = (f.g1zz * f.b1z(t), f.g2zz * f.b2z(t));
        (l - r).abs() <= 1e-10 * l.abs().max(r.abs()).max(1.0)
    })
}

/// Whether one homogeneous field B₁ᶻ = B₂ᶻ can realize the requested sector
/// drives. With ωᵢ ∝ gᵢ B, the two drives are locked to
/// Ω₋/Ω₊ = (g₁ − g₂)/(g₁ + g₂) at every instant.
pub fn homogeneous_feasibility(
    c: &DimerCouplings,
    g1zz: f64,
    g2zz: f64,
    plus: Option<Scenario>,
    minus: Option<Scenario>,
    times: &[f64],
) -> Result<()> {
    if g1zz == 0.0 || g2zz == 0.0 {
        return Err(DimerError::ZeroGFactor);
    }
    let (Some(sp), Some(sm)) = (plus, minus) else {
        // a single constraint fixes B(t) up to the g-factor sum or difference
        let denom = if plus.is_some() { g1zz + g2zz } else { g1zz - g2zz };
        if denom == 0.0 {
            return Err(DimerError::Infeasible(format!(
                "a homogeneous field cannot drive this sector when g₁ᶻᶻ = {g1zz} and g₂ᶻᶻ = {g2zz}"
            )));
        }
        return Ok(());
    };
    let pp = driven_params(c, Sector::Plus)?;
    let pm = driven_params(c, Sector::Minus)?;
    let ratio = (g1zz - g2zz) / (g1zz + g2zz);
    for &t in times {
        let wp = sp.field(t, &pp);
        let wm = sm.field(t, &pm);
        if (wm - ratio * wp).abs() > 1e-9 * wp.abs().max(wm.abs()).max(f64::MIN_POSITIVE) {
            return Err(DimerError::Infeasible(format!(
                "a homogeneous field locks Ω₋/Ω₊ to {ratio}, but the schedule needs {} at t = {t}",
                wm / wp
            )));
        }
    }
    Ok(())
}
