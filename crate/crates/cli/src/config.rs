//! Run configuration: an INI file plus `section.key=value` overrides.
//! Comments must sit on their own lines.
//!
//! ```ini
//! [couplings]
//! ; special | real_special | none
//! preset = special
//! c = 1.0
//! ; any of gxx gyy gzz gxy gyx hbar overrides the preset
//! gzz = 0.0
//!
//! [schedule]
//! ; full | subspace | static
//! kind = full
//! plus = S1
//! minus = S1
//!
//! [state]
//! initial = pp
//!
//! [time]
//! ; in units of ℏ/|Γ₊|
//! t_max = 10
//! samples = 101
//! ```

use std::path::{Path, PathBuf};

use ini::Ini;
use num_complex::Complex64 as C64;
use spin_dimer::algebra::{NamedState, StateVec4};
use spin_dimer::dimer::{DimerCouplings, Sector};
use spin_dimer::schedules::{full_schedule, subspace_schedule, FieldSchedule, FieldUnits, Free, BOHR_MAGNETON};
use spin_dimer::single_spin::Scenario;

use crate::error::{CliError, CliResult};

/// Initial states must be normalized to this accuracy.
pub const NORM_TOL: f64 = 1e-9;

const KNOWN: &[(&str, &[&str])] = &[
    ("couplings", &["preset", "c", "gxx", "gyy", "gzz", "gxy", "gyx", "hbar"]),
    ("schedule", &["kind", "plus", "minus", "sector", "scenario", "free"]),
    ("state", &["initial"]),
    ("time", &["t_max", "samples"]),
    ("output", &["path", "columns"]),
    ("si", &["energy_unit_j", "g1zz", "g2zz"]),
];

#[derive(Copy, Clone, Debug, PartialEq)]
pub enum ScheduleSpec {
    Full {
        plus: Scenario,
        minus: Scenario,
    },
    /// One sector engineered; `free` is the constant value of the other
    /// combination of ω₁, ω₂ (zero leaves that sector static).
    Subspace {
        sector: Sector,
        scenario: Scenario,
        free: f64,
    },
    /// ω₁ = ω₂ with the plus sector engineered.
    Static {
        scenario: Scenario,
    },
}

impl ScheduleSpec {
    pub fn build(&self, c: &DimerCouplings) -> CliResult<FieldSchedule> {
        Ok(match *self {
            ScheduleSpec::Full { plus, minus } => full_schedule(c, plus, minus)?,
            ScheduleSpec::Subspace { sector, scenario, free } => {
                let free = if free == 0.0 { Free::Zero } else { Free::constant(free) };
                subspace_schedule(c, sector, scenario, free)?
            }
            ScheduleSpec::Static { scenario } => subspace_schedule(c, Sector::Plus, scenario, Free::Zero)?,
        })
    }
}

#[derive(Copy, Clone, Debug, PartialEq)]
pub struct SiSpec {
    /// Joules per model energy unit.
    pub energy_unit_j: f64,
    pub g1zz: f64,
    pub g2zz: f64,
}

impl Default for SiSpec {
    fn default() -> Self {
        // one model energy unit = μ_B × 1 T
        Self { energy_unit_j: BOHR_MAGNETON, g1zz: 2.0, g2zz: 2.0 }
    }
}

impl SiSpec {
    pub fn units(&self, model_hbar: f64) -> FieldUnits {
        FieldUnits::si(self.energy_unit_j, model_hbar)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub couplings: DimerCouplings,
    pub schedule: ScheduleSpec,
    pub initial: StateVec4,
    /// Horizon in units of ℏ/|Γ₊| (ℏ/|Γ₋| when Γ₊ = 0).
    pub t_max: f64,
    pub samples: usize,
    pub output: Option<PathBuf>,
    pub columns: Option<String>,
    pub si: SiSpec,
}

impl RunConfig {
    pub fn from_file(path: Option<&Path>, overrides: &[String]) -> CliResult<Self> {
        let mut ini = match path {
            Some(p) => Ini::load_from_file(p).map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?,
            None => Ini::new(),
        };
        apply_overrides(&mut ini, overrides)?;
        Self::from_ini(&ini)
    }

    pub fn from_str(text: &str, overrides: &[String]) -> CliResult<Self> {
        let mut ini = Ini::load_from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        apply_overrides(&mut ini, overrides)?;
        Self::from_ini(&ini)
    }

    pub fn from_ini(ini: &Ini) -> CliResult<Self> {
        check_keys(ini)?;
        let get = |s: &str, k: &str| ini.section(Some(s)).and_then(|sec| sec.get(k)).map(str::trim);

        let couplings = parse_couplings(&get)?;
        let schedule = parse_schedule(&get)?;
        let initial = parse_state(get("state", "initial").unwrap_or("pp"))?;
        let t_max = num(get("time", "t_max"), "time.t_max", 10.0)?;
        if !(t_max >= 0.0 && t_max.is_finite()) {
            return Err(CliError::Config(format!("time.t_max must be finite and non-negative, got {t_max}")));
        }
        let samples = match get("time", "samples") {
            None => 101,
            Some(v) => v.parse::<usize>().map_err(|_| CliError::Config(format!("time.samples: bad count '{v}'")))?,
        };
        if samples < 2 {
            return Err(CliError::Config("time.samples must be at least 2".into()));
        }
        let si = SiSpec {
            energy_unit_j: num(get("si", "energy_unit_j"), "si.energy_unit_j", SiSpec::default().energy_unit_j)?,
            g1zz: num(get("si", "g1zz"), "si.g1zz", 2.0)?,
            g2zz: num(get("si", "g2zz"), "si.g2zz", 2.0)?,
        };
        if !(si.energy_unit_j > 0.0) {
            return Err(CliError::Config("si.energy_unit_j must be positive".into()));
        }
        Ok(Self {
            couplings,
            schedule,
            initial,
            t_max,
            samples,
            output: get("output", "path").filter(|p| !p.is_empty() && *p != "-").map(PathBuf::from),
            columns: get("output", "columns").map(str::to_owned),
            si,
        })
    }

    /// The model-time unit ℏ/|Γ₊|, falling back to ℏ/|Γ₋|.
    pub fn time_unit(&self) -> CliResult<f64> {
        let c = &self.couplings;
        let g = [Sector::Plus, Sector::Minus]
            .into_iter()
            .map(|s| c.sector_params(s).gamma_abs)
            .find(|&g| g > 0.0)
            .ok_or(CliError::Infeasible(spin_dimer::DimerError::DegenerateCoupling("both Γ₊ and Γ₋ vanish")))?;
        Ok(c.hbar / g)
    }

    /// Sample times in model units, endpoints included.
    pub fn times(&self) -> CliResult<Vec<f64>> {
        let unit = self.time_unit()?;
        let n = self.samples - 1;
        Ok((0..=n).map(|k| self.t_max * unit * k as f64 / n as f64).collect())
    }
}

fn apply_overrides(ini: &mut Ini, overrides: &[String]) -> CliResult<()> {
    for o in overrides {
        let (key, value) =
            o.split_once('=').ok_or_else(|| CliError::Config(format!("override '{o}' is not section.key=value")))?;
        let (section, key) = key
            .trim()
            .split_once('.')
            .ok_or_else(|| CliError::Config(format!("override key '{key}' is not section.key")))?;
        ini.with_section(Some(section.trim())).set(key.trim(), value.trim());
    }
    Ok(())
}

fn check_keys(ini: &Ini) -> CliResult<()> {
    for (name, props) in ini.iter() {
        let Some(name) = name else {
            if let Some((k, _)) = props.iter().next() {
                return Err(CliError::Config(format!("key '{k}' outside any section")));
            }
            continue;
        };
        let allowed = KNOWN
            .iter()
            .find(|(s, _)| *s == name)
            .ok_or_else(|| CliError::Config(format!("unknown section [{name}]")))?
            .1;
        if let Some((k, _)) = props.iter().find(|(k, _)| !allowed.contains(k)) {
            return Err(CliError::Config(format!("unknown key '{k}' in [{name}]")));
        }
    }
    Ok(())
}

fn num(v: Option<&str>, what: &str, default: f64) -> CliResult<f64> {
    match v {
        None => Ok(default),
        Some(s) => s.parse::<f64>().map_err(|_| CliError::Config(format!("{what}: not a number '{s}'"))),
    }
}

fn parse_couplings<'a>(get: &impl Fn(&str, &str) -> Option<&'a str>) -> CliResult<DimerCouplings> {
    let c = num(get("couplings", "c"), "couplings.c", 1.0)?;
    let base = match get("couplings", "preset").unwrap_or("special") {
        "special" => [c, c, 0.0, 0.5 * c, 0.5 * c, 1.0],
        "real_special" => [1.5 * c, 0.5 * c, 0.0, 0.0, 0.0, 1.0],
        "none" => [0.0, 0.0, 0.0, 0.0, 0.0, 1.0],
        other => return Err(CliError::Config(format!("couplings.preset: unknown preset '{other}'"))),
    };
    let mut v = base;
    for (slot, key) in ["gxx", "gyy", "gzz", "gxy", "gyx", "hbar"].iter().enumerate() {
        v[slot] = num(get("couplings", key), &format!("couplings.{key}"), base[slot])?;
    }
    DimerCouplings::new(v[0], v[1], v[2], v[3], v[4], v[5]).map_err(|e| CliError::Config(e.to_string()))
}

fn scenario(v: Option<&str>, what: &str) -> CliResult<Scenario> {
    v.unwrap_or("S1").parse().map_err(|e| CliError::Config(format!("{what}: {e}")))
}

fn parse_schedule<'a>(get: &impl Fn(&str, &str) -> Option<&'a str>) -> CliResult<ScheduleSpec> {
    match get("schedule", "kind").unwrap_or("full") {
        "full" => Ok(ScheduleSpec::Full {
            plus: scenario(get("schedule", "plus"), "schedule.plus")?,
            minus: scenario(get("schedule", "minus"), "schedule.minus")?,
        }),
        "subspace" => {
            let sector = match get("schedule", "sector").unwrap_or("plus") {
                "plus" | "+" | "+1" => Sector::Plus,
                "minus" | "-" | "-1" => Sector::Minus,
                other => {
                    return Err(CliError::Config(format!("schedule.sector: expected plus or minus, got '{other}'")))
                }
            };
            Ok(ScheduleSpec::Subspace {
                sector,
                scenario: scenario(get("schedule", "scenario"), "schedule.scenario")?,
                free: num(get("schedule", "free"), "schedule.free", 0.0)?,
            })
        }
        "static" => Ok(ScheduleSpec::Static { scenario: scenario(get("schedule", "scenario"), "schedule.scenario")? }),
        other => Err(CliError::Config(format!("schedule.kind: unknown kind '{other}'"))),
    }
}

/// A named state or eight numbers re,im for c₊₊, c₊₋, c₋₊, c₋₋.
pub fn parse_state(s: &str) -> CliResult<StateVec4> {
    let named = match s {
        "pp" => Some(NamedState::PlusPlus),
        "pm" => Some(NamedState::PlusMinus),
        "mp" => Some(NamedState::MinusPlus),
        "mm" => Some(NamedState::MinusMinus),
        "bell_phi_plus" => Some(NamedState::PhiPlus),
        "bell_phi_minus" => Some(NamedState::PhiMinus),
        "bell_psi_plus" => Some(NamedState::PsiPlus),
        "bell_psi_minus" => Some(NamedState::PsiMinus),
        "sx_max" => Some(NamedState::SxMax),
        _ => None,
    };
    if let Some(n) = named {
        return Ok(n.vector());
    }
    let v: Vec<f64> = s
        .split(|ch: char| ch == ',' || ch.is_whitespace())
        .filter(|p| !p.is_empty())
        .map(|p| p.parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| CliError::Config(format!("state.initial: unknown state '{s}'")))?;
    if v.len() != 8 {
        return Err(CliError::Config(format!("state.initial: expected 8 numbers, got {}", v.len())));
    }
    let psi = StateVec4::new(C64::new(v[0], v[1]), C64::new(v[2], v[3]), C64::new(v[4], v[5]), C64::new(v[6], v[7]));
    let norm = psi.norm();
    if (norm - 1.0).abs() > NORM_TOL {
        return Err(CliError::Config(format!("state.initial: amplitudes have norm {norm}, not 1")));
    }
    Ok(psi)
}
