//! Exactly solvable single spin-1/2 dynamics under an engineered longitudinal
//! field.
//!
//! A sector of the dimer reduces to a fictitious spin with Hamiltonian
//! `H' = [[Ω(t), Γ], [Γ*, −Ω(t)]]`. Choosing an angle function Θ(t) with
//! Θ(0) = 0 fixes both the field Ω(t) that must be applied and the closed-form
//! propagator
//!
//! ```text
//! 𝓔 = [[ |a| e^{iφ_a},        |b| e^{i(φ_b + χ)} ],
//!      [ −|b| e^{−i(φ_b + χ)},  |a| e^{−iφ_a}      ]]
//! ```
//!
//! with χ = arg Γ. The two engineered scenarios share the same Θ family,
//! Θ = 2 arctan tanh(γt/2), and differ in the rate γ and in the factor in
//! front of arcsin tanh(γt): ½ for [`Scenario::S1`] (equal superposition
//! reached asymptotically) and 1 for [`Scenario::S2`] (complete inversion).

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_complex::Complex64 as C64;

use crate::algebra::{cr, expi, CMat2};
use crate::error::{DimerError, Result};
use crate::quadrature::Simpson;

/// Above this |γt| the hyperbolic secant is returned as its asymptotic value 0.
pub const SECH_GUARD: f64 = 700.0;
/// Distance from a non-zero multiple of π at which the engineered field is
/// considered divergent.
pub const COT_SINGULARITY_TOL: f64 = 1e-9;

pub type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[inline]
pub fn sech(x: f64) -> f64 {
    if x.abs() > SECH_GUARD {
        0.0
    } else {
        1.0 / x.cosh()
    }
}

/// Transverse coupling of one sector plus the ℏ convention.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct SectorParams {
    pub gamma_abs: f64,
    pub gamma_phase: f64,
    pub hbar: f64,
}

impl SectorParams {
    pub fn new(gamma_abs: f64, gamma_phase: f64, hbar: f64) -> Result<Self> {
        if !(gamma_abs >= 0.0 && gamma_abs.is_finite()) {
            return Err(DimerError::InvalidParameter(format!("|Γ| must be finite and ≥ 0, got {gamma_abs}")));
        }
        if !(hbar > 0.0 && hbar.is_finite()) {
            return Err(DimerError::InvalidParameter(format!("ℏ must be positive, got {hbar}")));
        }
        if !gamma_phase.is_finite() {
            return Err(DimerError::InvalidParameter("arg Γ must be finite".into()));
        }
        Ok(Self { gamma_abs, gamma_phase, hbar })
    }

    pub fn from_complex(gamma: C64, hbar: f64) -> Result<Self> {
        let phase = if gamma.norm() == 0.0 { 0.0 } else { gamma.arg() };
        Self::new(gamma.norm(), phase, hbar)
    }

    pub fn gamma(&self) -> C64 {
        C64::from_polar(self.gamma_abs, self.gamma_phase)
    }

    fn require_driven(&self, what: &'static str) -> Result<()> {
        if self.gamma_abs > 0.0 {
            Ok(())
        } else {
            Err(DimerError::DegenerateCoupling(what))
        }
    }

    /// `[[Ω, Γ], [Γ*, −Ω]]`
    pub fn hamiltonian(&self, omega: f64) -> CMat2 {
        let g = self.gamma();
        CMat2::new(cr(omega), g, g.conj(), cr(-omega))
    }
}

/// Closed-form single-spin propagator in modulus/phase form.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct Propagator2 {
    pub t: f64,
    pub a_abs: f64,
    pub b_abs: f64,
    pub phi_a: f64,
    pub phi_b: f64,
    /// arg Γ; rotates the off-diagonal entries.
    pub transverse_phase: f64,
}

impl Propagator2 {
    /// Builds the propagator from signed amplitudes, folding negative signs
    /// into the phases so that `a_abs`, `b_abs` stay non-negative.
    pub fn from_signed(t: f64, a: f64, b: f64, phi_a: f64, phi_b: f64, transverse_phase: f64) -> Self {
        let (a_abs, phi_a) = if a < 0.0 { (-a, phi_a + PI) } else { (a, phi_a) };
        let (b_abs, phi_b) = if b < 0.0 { (-b, phi_b + PI) } else { (b, phi_b) };
        Self { t, a_abs, b_abs, phi_a, phi_b, transverse_phase }
    }

    pub fn identity(transverse_phase: f64) -> Self {
        Self { t: 0.0, a_abs: 1.0, b_abs: 0.0, phi_a: 0.0, phi_b: -FRAC_PI_2, transverse_phase }
    }

    pub fn matrix(&self) -> CMat2 {
        let off = self.phi_b + self.transverse_phase;
        CMat2::new(
            expi(self.phi_a) * self.a_abs,
            expi(off) * self.b_abs,
            -expi(-off) * self.b_abs,
            expi(-self.phi_a) * self.a_abs,
        )
    }

    pub fn normalization_defect(&self) -> f64 {
        (self.a_abs * self.a_abs + self.b_abs * self.b_abs - 1.0).abs()
    }
}

/// The two engineered, exactly solvable single-spin scenarios.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum Scenario {
    /// γ = 2|Γ|/ℏ, |a| → 1/√2: the spin ends in an equal superposition.
    S1,
    /// γ = |Γ|/ℏ, |a| → 0: complete spin inversion.
    S2,
}

impl Scenario {
    /// Characteristic rate γ of the scenario.
    pub fn rate(self, p: &SectorParams) -> f64 {
        match self {
            Scenario::S1 => 2.0 * p.gamma_abs / p.hbar,
            Scenario::S2 => p.gamma_abs / p.hbar,
        }
    }

    /// Factor in front of arcsin tanh(γt) in (|Γ|/ℏ)∫cosΘ.
    pub fn arcsin_factor(self) -> f64 {
        match self {
            Scenario::S1 => 0.5,
            Scenario::S2 => 1.0,
        }
    }

    /// Θ(t) = 2 arctan tanh(γt/2); common to both scenarios.
    pub fn theta(self, t: f64, p: &SectorParams) -> f64 {
        2.0 * (0.5 * self.rate(p) * t).tanh().atan()
    }

    pub fn theta_dot(self, t: f64, p: &SectorParams) -> f64 {
        let g = self.rate(p);
        g * sech(g * t)
    }

    /// The phase integral ℛ(t).
    pub fn phase_integral(self, t: f64, p: &SectorParams) -> f64 {
        let x = self.rate(p) * t;
        match self {
            Scenario::S1 => 0.5 * x,
            Scenario::S2 => 0.5 * x.sinh(),
        }
    }

    /// (|a|, |b|) at time t.
    pub fn amplitudes(self, t: f64, p: &SectorParams) -> Result<(f64, f64)> {
        p.require_driven("engineered scenario amplitudes")?;
        let x = self.rate(p) * t;
        Ok(match self {
            Scenario::S1 => {
                let s = sech(x);
                let a = (0.5 * (1.0 + s)).sqrt();
                let b = if x.abs() > SECH_GUARD {
                    FRAC_1_SQRT_2
                } else {
                    // (cosh x − 1)/(2 cosh x) = sinh²(x/2)/cosh x
                    (0.5 * x).sinh().abs() / x.cosh().sqrt()
                };
                (a, b)
            }
            Scenario::S2 => (sech(x), x.tanh().abs()),
        })
    }

    /// (φ_a, φ_b) at time t.
    pub fn phases(self, t: f64, p: &SectorParams) -> Result<(f64, f64)> {
        p.require_driven("engineered scenario phases")?;
        let half_theta = 0.5 * self.theta(t, p);
        let r = self.phase_integral(t, p);
        Ok((-(half_theta + r), -half_theta + r - FRAC_PI_2))
    }

    /// Longitudinal field Ω(t) that realizes the scenario.
    pub fn omega(self, t: f64, p: &SectorParams) -> Result<f64> {
        p.require_driven("engineered scenario field")?;
        Ok(self.field(t, p))
    }

    /// Ω(t) without the coupling check; identically zero when |Γ| = 0.
    pub fn field(self, t: f64, p: &SectorParams) -> f64 {
        let x = self.rate(p) * t;
        match self {
            Scenario::S1 => 2.0 * p.gamma_abs * sech(x),
            Scenario::S2 => 0.5 * p.gamma_abs * (3.0 * sech(x) - x.cosh()),
        }
    }

    pub fn propagator(self, t: f64, p: &SectorParams) -> Result<Propagator2> {
        let (a_abs, b_abs) = self.amplitudes(t, p)?;
        let (phi_a, phi_b) = self.phases(t, p)?;
        Ok(Propagator2 { t, a_abs, b_abs, phi_a, phi_b, transverse_phase: p.gamma_phase })
    }

    /// The scenario's Θ family as a generic drive, for the quadrature route.
    pub fn theta_drive(self, p: &SectorParams, t_max: f64) -> Result<ThetaDrive> {
        let g = self.rate(p);
        ThetaDrive::new(
            Arc::new(move |t: f64| 2.0 * (0.5 * g * t).tanh().atan()),
            Arc::new(move |t: f64| g * sech(g * t)),
            t_max,
        )
    }

    pub fn label(self) -> &'static str {
        match self {
            Scenario::S1 => "S1",
            Scenario::S2 => "S2",
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Scenario {
    type Err = DimerError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "S1" | "1" => Ok(Scenario::S1),
            "S2" | "2" => Ok(Scenario::S2),
            other => Err(DimerError::InvalidParameter(format!("unknown scenario '{other}'"))),
        }
    }
}

pub fn scenario1_amplitudes(t: f64, p: &SectorParams) -> Result<(f64, f64)> {
    Scenario::S1.amplitudes(t, p)
}

pub fn scenario1_phases(t: f64, p: &SectorParams) -> Result<(f64, f64)> {
    Scenario::S1.phases(t, p)
}

pub fn scenario1_omega(t: f64, p: &SectorParams) -> Result<f64> {
    Scenario::S1.omega(t, p)
}

pub fn scenario2_amplitudes(t: f64, p: &SectorParams) -> Result<(f64, f64)> {
    Scenario::S2.amplitudes(t, p)
}

pub fn scenario2_phases(t: f64, p: &SectorParams) -> Result<(f64, f64)> {
    Scenario::S2.phases(t, p)
}

pub fn scenario2_omega(t: f64, p: &SectorParams) -> Result<f64> {
    Scenario::S2.omega(t, p)
}

/// A user-supplied angle function Θ(t) with Θ(0) = 0 and its derivative.
#[derive(Clone)]
pub struct ThetaDrive {
    theta: RealFn,
    theta_dot: RealFn,
    t_max: f64,
}

impl fmt::Debug for ThetaDrive {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ThetaDrive").field("t_max", &self.t_max).finish_non_exhaustive()
    }
}

impl ThetaDrive {
    pub fn new(theta: RealFn, theta_dot: RealFn, t_max: f64) -> Result<Self> {
        let theta0 = theta(0.0);
        if theta0 != 0.0 {
            return Err(DimerError::InvalidParameter(format!("Θ(0) must be exactly 0, got {theta0}")));
        }
        if !(t_max > 0.0 && t_max.is_finite()) {
            return Err(DimerError::InvalidParameter(format!("t_max must be positive, got {t_max}")));
        }
        Ok(Self { theta, theta_dot, t_max })
    }

    pub fn theta(&self, t: f64) -> f64 {
        (self.theta)(t)
    }

    pub fn theta_dot(&self, t: f64) -> f64 {
        (self.theta_dot)(t)
    }

    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    fn check_time(&self, t: f64) -> Result<()> {
        if t < 0.0 || t > self.t_max || !t.is_finite() {
            return Err(DimerError::InvalidParameter(format!("t = {t} outside [0, {}]", self.t_max)));
        }
        Ok(())
    }
}

/// Quadrature-based route from an arbitrary Θ(t) to the field and propagator.
#[derive(Copy, Clone, Debug, Default)]
pub struct ThetaEngine {
    pub quadrature: Simpson,
}

impl ThetaEngine {
    /// ∫₀ᵗ cos Θ
    fn cos_integral(&self, d: &ThetaDrive, t: f64) -> Result<f64> {
        self.quadrature.integrate(|s| Ok(d.theta(s).cos()), 0.0, t)
    }

    /// Rejects arguments that sit on a non-zero multiple of π.
    fn check_cot_argument(x: f64, t: f64) -> Result<()> {
        let k = (x / PI).round();
        if k != 0.0 && (x - k * PI).abs() < COT_SINGULARITY_TOL {
            return Err(DimerError::CotangentSingularity { t });
        }
        Ok(())
    }

    /// Ω = (ℏ/2)Θ̇ + |Γ| sinΘ cot[(2|Γ|/ℏ)∫₀ᵗ cosΘ].
    pub fn omega(&self, d: &ThetaDrive, t: f64, p: &SectorParams) -> Result<f64> {
        p.require_driven("engineered field from Θ")?;
        d.check_time(t)?;
        let k = 2.0 * p.gamma_abs / p.hbar;
        if t == 0.0 {
            // sinΘ cot(k∫cosΘ) → Θ̇(0)/(k cosΘ(0)) as t → 0
            return Ok(0.5 * p.hbar * d.theta_dot(0.0) * (1.0 + 1.0 / d.theta(0.0).cos()));
        }
        let x = k * self.cos_integral(d, t)?;
        Self::check_cot_argument(x, t)?;
        Ok(0.5 * p.hbar * d.theta_dot(t) + p.gamma_abs * d.theta(t).sin() / x.tan())
    }

    /// Integrand of ℛ: sinΘ(s) / sin[(2|Γ|/ℏ)∫₀ˢ cosΘ], with its removable
    /// singularity at s = 0 replaced by Θ̇(0)ℏ/(2|Γ| cosΘ(0)).
    fn phase_integrand(&self, d: &ThetaDrive, s: f64, p: &SectorParams) -> Result<f64> {
        let k = 2.0 * p.gamma_abs / p.hbar;
        if s == 0.0 {
            return Ok(d.theta_dot(0.0) / (k * d.theta(0.0).cos()));
        }
        let x = k * self.cos_integral(d, s)?;
        Self::check_cot_argument(x, s)?;
        Ok(d.theta(s).sin() / x.sin())
    }

    pub fn propagator(&self, d: &ThetaDrive, t: f64, p: &SectorParams) -> Result<Propagator2> {
        p.require_driven("propagator from Θ")?;
        d.check_time(t)?;
        let angle = p.gamma_abs / p.hbar * self.cos_integral(d, t)?;
        let r = p.gamma_abs / p.hbar * self.quadrature.integrate(|s| self.phase_integrand(d, s, p), 0.0, t)?;
        let half_theta = 0.5 * d.theta(t);
        Ok(Propagator2::from_signed(
            t,
            angle.cos(),
            angle.sin(),
            -(half_theta + r),
            -half_theta + r - FRAC_PI_2,
            p.gamma_phase,
        ))
    }
}

pub fn omega_from_theta(d: &ThetaDrive, t: f64, p: &SectorParams) -> Result<f64> {
    ThetaEngine::default().omega(d, t, p)
}

pub fn propagator_from_theta(d: &ThetaDrive, t: f64, p: &SectorParams) -> Result<Propagator2> {
    ThetaEngine::default().propagator(d, t, p)
}

/// Propagator of a sector with Ω ≡ 0, in modulus/phase form, excluding the
/// γzz sector shift.
pub fn static_propagator(t: f64, p: &SectorParams) -> Propagator2 {
    let x = p.gamma_abs * t / p.hbar;
    Propagator2::from_signed(t, x.cos(), x.sin(), 0.0, -FRAC_PI_2, p.gamma_phase)
}

/// Parity-minus propagator when ω₁ = ω₂, including its γzz phase:
///
/// ```text
/// e^{iγzz t/ℏ} [[ cos(|Γ₋|t/ℏ),          e^{iΦ} sin(|Γ₋|t/ℏ) ],
///               [ −e^{−iΦ} sin(|Γ₋|t/ℏ),  cos(|Γ₋|t/ℏ)        ]]
/// ```
///
/// with Φ = arg Γ₋ − π/2.
pub fn static_sector_propagator(t: f64, gamma_minus: C64, gamma_zz: f64, hbar: f64) -> CMat2 {
    let x = gamma_minus.norm() * t / hbar;
    let phi = static_phase(gamma_minus);
    let (s, co) = x.sin_cos();
    let m = CMat2::new(cr(co), expi(phi) * s, -expi(-phi) * s, cr(co));
    m * expi(gamma_zz * t / hbar)
}

/// Φ = arg Γ₋ − π/2 (zero coupling maps to −π/2).
pub fn static_phase(gamma_minus: C64) -> f64 {
    let arg = if gamma_minus.norm() == 0.0 { 0.0 } else { gamma_minus.arg() };
    arg - FRAC_PI_2
}
