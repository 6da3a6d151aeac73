//! Figure data: each curve is evaluated from its closed form on a fixed
//! dimensionless grid, without integrating anything.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fs;
use std::path::{Path, PathBuf};

use spin_dimer::dimer::DimerCouplings;
use spin_dimer::observables::{analytic_bell_moduli, analytic_sx};
use spin_dimer::schedules::full_schedule;
use spin_dimer::single_spin::{sech, Scenario, SectorParams};

use crate::commands::push_row;
use crate::error::{CliError, CliResult};

pub const SAMPLES: usize = 1000;
pub const FIGURES: std::ops::RangeInclusive<u8> = 1..=13;

type Curve = Box<dyn Fn(f64) -> f64>;

pub struct Figure {
    pub n: u8,
    /// Name of the dimensionless abscissa.
    pub abscissa: &'static str,
    /// The grid is x_k = domain · k / SAMPLES for k < SAMPLES.
    pub domain: f64,
    pub curves: Vec<(&'static str, Curve)>,
}

impl Figure {
    pub fn grid(&self) -> impl Iterator<Item = f64> + '_ {
        (0..SAMPLES).map(move |k| self.domain * k as f64 / SAMPLES as f64)
    }

    pub fn csv(&self) -> String {
        let mut out = String::from(self.abscissa);
        for (name, _) in &self.curves {
            out.push(',');
            out.push_str(name);
        }
        out.push('\n');
        let mut row = Vec::with_capacity(self.curves.len() + 1);
        for x in self.grid() {
            row.clear();
            row.push(x);
            row.extend(self.curves.iter().map(|(_, f)| f(x)));
            push_row(&mut out, &row);
        }
        out
    }
}

fn curve(f: impl Fn(f64) -> f64 + 'static) -> Curve {
    Box::new(f)
}

fn unit_sector() -> SectorParams {
    SectorParams::new(1.0, 0.0, 1.0).expect("unit sector parameters")
}

pub fn figure(n: u8) -> CliResult<Figure> {
    let fig = |abscissa, domain, curves| Figure { n, abscissa, domain, curves };
    Ok(match n {
        // Ω/|Γ| for S1 against τ₁ = 2|Γ|t/ℏ
        1 => fig("tau_1", 6.0, vec![("omega_over_gamma", curve(|x| 2.0 * sech(x)))]),
        // Ω/|Γ| for S2 against τ₂ = |Γ|t/ℏ
        2 => fig("tau_2", 3.0, vec![("omega_over_gamma", curve(|x| 0.5 * (3.0 * sech(x) - x.cosh())))]),
        3 => {
            // both sectors S1 with γxx = γyy = c, γxy = γyx = c/2 at c = ℏ = 1
            let c = DimerCouplings::special(1.0, 0.0)?;
            let s = full_schedule(&c, Scenario::S1, Scenario::S1)?;
            let s2 = s.clone();
            fig(
                "tau_c",
                6.0,
                vec![
                    ("hbar_omega1_over_c", curve(move |x| s.omega1(x))),
                    ("hbar_omega2_over_c", curve(move |x| s2.omega2(x))),
                ],
            )
        }
        4 => {
            fig("tau_plus", 6.0, vec![("sz_alpha_over_hbar", curve(sech)), ("sz_beta_over_hbar", curve(|x| -sech(x)))])
        }
        5 => fig(
            "tau_prime_plus",
            5.0,
            vec![
                ("sz_alpha_over_hbar", curve(|x| 2.0 * sech(x).powi(2) - 1.0)),
                ("sz_beta_over_hbar", curve(|x| 1.0 - 2.0 * sech(x).powi(2))),
            ],
        ),
        6 => fig(
            "tau_minus",
            5.0,
            vec![
                ("s2_alpha_over_hbar2", curve(|x| 1.0 + x.tanh().powi(2))),
                ("s2_beta_over_hbar2", curve(|x| 1.0 - x.tanh().powi(2))),
            ],
        ),
        7 => fig(
            "tau_prime_minus",
            10.0,
            vec![
                ("s2_alpha_over_hbar2", curve(|x| 1.0 + 2.0 * x.tanh().powi(2) * sech(x))),
                ("s2_beta_over_hbar2", curve(|x| 1.0 - 2.0 * x.tanh().powi(2) * sech(x))),
            ],
        ),
        8 => {
            // |Γ₊| = 1, |Γ₋| = 2 with real couplings and γzz = 0
            let c = DimerCouplings::real_special(1.0, 0.0)?;
            fig(
                "tau_plus",
                40.0,
                vec![
                    (
                        "sx_over_hbar",
                        curve(move |x| analytic_sx(0.5 * x, &c, Scenario::S1, Scenario::S1).unwrap_or(f64::NAN)),
                    ),
                    ("upper", curve(|_| 0.5)),
                    ("lower", curve(|_| -0.5)),
                ],
            )
        }
        9 => fig("tau_plus", 5.0, vec![("concurrence", curve(f64::tanh))]),
        10 => fig("tau_plus", 20.0, vec![("concurrence", curve(|x| (1.0 - (x.tanh() * x.sin()).powi(2)).sqrt()))]),
        11 => fig("tau_prime_plus", 5.0, vec![("concurrence", curve(|x| 2.0 * x.tanh() * sech(x)))]),
        12 => fig("tau_prime_plus", 4.0, vec![("concurrence", curve(bell_s2_concurrence))]),
        13 => {
            let p = unit_sector();
            let moduli = move |x: f64| analytic_bell_moduli(x, Scenario::S2, &p).unwrap_or((f64::NAN, f64::NAN));
            fig(
                "tau_prime_plus",
                4.0,
                vec![
                    ("abs_cpp", curve(move |x| moduli(x).0)),
                    ("abs_cmm", curve(move |x| moduli(x).1)),
                    ("concurrence", curve(bell_s2_concurrence)),
                    ("level_one", curve(|_| 1.0)),
                    ("level_inv_sqrt2", curve(|_| FRAC_1_SQRT_2)),
                ],
            )
        }
        other => return Err(CliError::Config(format!("figure number must be 1..=13, got {other}"))),
    })
}

fn bell_s2_concurrence(x: f64) -> f64 {
    let k = 2.0 * x.tanh() * sech(x);
    (1.0 - (k * x.sinh().sin()).powi(2)).max(0.0).sqrt()
}

pub fn figure_path(dir: &Path, n: u8) -> PathBuf {
    dir.join(format!("figure_{n}.csv"))
}

pub fn write_figure(n: u8, dir: &Path) -> CliResult<PathBuf> {
    let fig = figure(n)?;
    fs::create_dir_all(dir)?;
    let path = figure_path(dir, n);
    fs::write(&path, fig.csv())?;
    Ok(path)
}
