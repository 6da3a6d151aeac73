use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::Path;

use rayon::prelude::*;
use spin_dimer::algebra::StateVec4;
use spin_dimer::observables::{bell_fidelity, concurrence, covariances, s2, sx, sz, Bell};
use spin_dimer::schedules::{omega_to_field, FieldSchedule, LabField, HBAR_SI};

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};

pub const PROPAGATE_HEADER: &str = "t,re_cpp,im_cpp,re_cpm,im_cpm,re_cmp,im_cmp,re_cmm,im_cmm,norm";

/// 17 significant digits, so every value round-trips.
pub fn fmt_num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn push_row(out: &mut String, values: &[f64]) {
    for (i, v) in values.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        out.push_str(&fmt_num(*v));
    }
    out.push('\n');
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Column {
    Sz,
    S2,
    Sx,
    Concurrence,
    Cxx,
    Cyy,
    Cxy,
    Fidelities,
}

impl Column {
    pub const ALL: [Column; 8] = [
        Column::Sz,
        Column::S2,
        Column::Sx,
        Column::Concurrence,
        Column::Cxx,
        Column::Cyy,
        Column::Cxy,
        Column::Fidelities,
    ];

    fn parse(s: &str) -> CliResult<Self> {
        Ok(match s.trim() {
            "sz" => Column::Sz,
            "s2" => Column::S2,
            "sx" => Column::Sx,
            "concurrence" => Column::Concurrence,
            "cxx" => Column::Cxx,
            "cyy" => Column::Cyy,
            "cxy" => Column::Cxy,
            "fidelities" => Column::Fidelities,
            other => return Err(CliError::Config(format!("unknown observable '{other}'"))),
        })
    }

    pub fn parse_list(s: &str) -> CliResult<Vec<Self>> {
        let cols = s.split(',').filter(|p| !p.trim().is_empty()).map(Self::parse).collect::<CliResult<Vec<_>>>()?;
        if cols.is_empty() {
            return Err(CliError::Config("empty observable list".into()));
        }
        Ok(cols)
    }

    fn headers(self) -> &'static [&'static str] {
        match self {
            Column::Sz => &["sz"],
            Column::S2 => &["s2"],
            Column::Sx => &["sx"],
            Column::Concurrence => &["concurrence"],
            Column::Cxx => &["cxx"],
            Column::Cyy => &["cyy"],
            Column::Cxy => &["cxy"],
            Column::Fidelities => &["fid_phi_plus", "fid_phi_minus", "fid_psi_plus", "fid_psi_minus"],
        }
    }

    fn values(self, psi: &StateVec4, hbar: f64, out: &mut Vec<f64>) -> CliResult<()> {
        match self {
            Column::Sz => out.push(sz(psi, hbar)?),
            Column::S2 => out.push(s2(psi, hbar)?),
            Column::Sx => out.push(sx(psi, hbar)?),
            Column::Concurrence => out.push(concurrence(psi)),
            Column::Cxx => out.push(covariances(psi)?.cxx),
            Column::Cyy => out.push(covariances(psi)?.cyy),
            Column::Cxy => out.push(covariances(psi)?.cxy),
            Column::Fidelities => out.extend(Bell::ALL.iter().map(|&b| bell_fidelity(psi, b))),
        }
        Ok(())
    }
}

/// Seconds and tesla appended to every row when SI output is requested.
struct SiColumns {
    seconds_per_unit: f64,
    field: LabField,
}

impl SiColumns {
    fn new(cfg: &RunConfig, schedule: &FieldSchedule) -> CliResult<Self> {
        let hbar = cfg.couplings.hbar;
        let field = omega_to_field(schedule, cfg.si.g1zz, cfg.si.g2zz, cfg.si.units(hbar))?;
        Ok(Self { seconds_per_unit: HBAR_SI / (cfg.si.energy_unit_j * hbar), field })
    }

    fn push(&self, t: f64, row: &mut Vec<f64>) {
        row.extend([t * self.seconds_per_unit, self.field.b1z(t), self.field.b2z(t)]);
    }
}

const SI_HEADER: &str = ",t_s,b1z_t,b2z_t";

fn states(cfg: &RunConfig, schedule: &FieldSchedule) -> CliResult<Vec<(f64, StateVec4)>> {
    let times = cfg.times()?;
    times.par_iter().map(|&t| Ok((t, schedule.evolve(&cfg.initial, t)?))).collect()
}

/// Amplitude trajectory of the configured initial state.
pub fn propagate_csv(cfg: &RunConfig, si: bool) -> CliResult<String> {
    let schedule = cfg.schedule.build(&cfg.couplings)?;
    let si = si.then(|| SiColumns::new(cfg, &schedule)).transpose()?;
    let mut out = String::from(PROPAGATE_HEADER);
    if si.is_some() {
        out.push_str(SI_HEADER);
    }
    out.push('\n');
    for (t, psi) in states(cfg, &schedule)? {
        let mut row = vec![t];
        for c in psi.iter() {
            row.extend([c.re, c.im]);
        }
        row.push(psi.norm());
        if let Some(si) = &si {
            si.push(t, &mut row);
        }
        push_row(&mut out, &row);
    }
    Ok(out)
}

/// Observables computed from the propagated state at each sample.
pub fn observables_csv(cfg: &RunConfig, columns: &[Column], si: bool) -> CliResult<String> {
    let schedule = cfg.schedule.build(&cfg.couplings)?;
    let si = si.then(|| SiColumns::new(cfg, &schedule)).transpose()?;
    let mut out = String::from("t");
    for c in columns {
        for h in c.headers() {
            let _ = write!(out, ",{h}");
        }
    }
    if si.is_some() {
        out.push_str(SI_HEADER);
    }
    out.push('\n');
    for (t, psi) in states(cfg, &schedule)? {
        let mut row = vec![t];
        for c in columns {
            c.values(&psi, cfg.couplings.hbar, &mut row)?;
        }
        if let Some(si) = &si {
            si.push(t, &mut row);
        }
        push_row(&mut out, &row);
    }
    Ok(out)
}

/// Writes to `path`, or to stdout when no path is given.
pub fn emit(text: &str, path: Option<&Path>) -> CliResult<()> {
    match path {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir)?;
            }
            fs::write(p, text)?;
        }
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_carry_seventeen_significant_digits() {
        assert_eq!(fmt_num(2.0), "2.0000000000000000e0");
        assert_eq!(fmt_num(0.1).parse::<f64>().unwrap(), 0.1);
        assert_eq!(fmt_num(1f64.tanh()).parse::<f64>().unwrap(), 1f64.tanh());
    }

    #[test]
    fn first_row_is_the_initial_state() {
        let cfg = RunConfig::from_str("[time]\nsamples=3\n", &[]).unwrap();
        let csv = propagate_csv(&cfg, false).unwrap();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some(PROPAGATE_HEADER));
        let row: Vec<f64> = lines.next().unwrap().split(',').map(|v| v.parse().unwrap()).collect();
        assert_eq!(row, [0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0]);
    }

    #[test]
    fn column_lists_parse() {
        assert_eq!(Column::parse_list("sz, cyy").unwrap(), vec![Column::Sz, Column::Cyy]);
        assert!(Column::parse_list("sz,energy").is_err());
        assert!(Column::parse_list("").is_err());
    }
}
