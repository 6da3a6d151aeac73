//! The two-spin layer: Hamiltonian, parity sectors and propagator assembly.
//!
//! H commutes with σ₁ᶻσ₂ᶻ, so it splits into two 2×2 blocks. The parity +1
//! block lives on basis slots {0, 3} = {|++⟩, |−−⟩} and the parity −1 block
//! on slots {1, 2} = {|+−⟩, |−+⟩}. Each block is a fictitious spin
//!
//! ```text
//! H̃± = ±γzz 1 + [[Ω±, Γ±], [Γ±*, −Ω±]],   Ω± = ℏ(ω₁ ± ω₂),
//! Γ± = (γxx ∓ γyy) − i(±γxy + γyx)
//! ```
//!
//! so the full propagator is assembled from two single-spin propagators, each
//! multiplied by its sector phase e^{∓iγzz t/ℏ}.

use std::fmt;

use num_complex::Complex64 as C64;

use crate::algebra::{cr, expi, kron, pauli, pauli_pair, sigma, unitarity_defect, Axis, CMat2, CMat4, Site, StateVec4};
use crate::error::{DimerError, Result};
use crate::single_spin::{static_phase, static_sector_propagator, Propagator2, SectorParams};

/// Tolerance on the normalization of sector propagators accepted by the
/// assembly routines.
pub const ASSEMBLY_TOL: f64 = 1e-10;

#[derive(Copy, Clone, Debug, PartialEq)]
pub struct DimerCouplings {
    pub gxx: f64,
    pub gyy: f64,
    pub gzz: f64,
    pub gxy: f64,
    pub gyx: f64,
    pub hbar: f64,
}

impl DimerCouplings {
    pub fn new(gxx: f64, gyy: f64, gzz: f64, gxy: f64, gyx: f64, hbar: f64) -> Result<Self> {
        let s = Self { gxx, gyy, gzz, gxy, gyx, hbar };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        let all = [self.gxx, self.gyy, self.gzz, self.gxy, self.gyx, self.hbar];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(DimerError::InvalidParameter("couplings and ℏ must be finite".into()));
        }
        if self.hbar <= 0.0 {
            return Err(DimerError::InvalidParameter(format!("ℏ must be positive, got {}", self.hbar)));
        }
        Ok(())
    }

    /// γxx = γyy = c, γxy = γyx = c/2: |Γ₊| = c, |Γ₋| = 2c, with Γ₊ = −ic.
    pub fn special(c: f64, gzz: f64) -> Result<Self> {
        Self::new(c, c, gzz, 0.5 * c, 0.5 * c, 1.0)
    }

    /// γxx = 3c/2, γyy = c/2: the same moduli |Γ₊| = c, |Γ₋| = 2c with both
    /// couplings real and positive.
    pub fn real_special(c: f64, gzz: f64) -> Result<Self> {
        Self::new(1.5 * c, 0.5 * c, gzz, 0.0, 0.0, 1.0)
    }

    pub fn with_hbar(self, hbar: f64) -> Result<Self> {
        Self::new(self.gxx, self.gyy, self.gzz, self.gxy, self.gyx, hbar)
    }

    pub fn sector_params(&self, sector: Sector) -> SectorParams {
        let g = sector_gamma(self, sector);
        SectorParams { gamma_abs: g.norm(), gamma_phase: if g.norm() == 0.0 { 0.0 } else { g.arg() }, hbar: self.hbar }
    }
}

/// Parity sector, labelled by the eigenvalue of σ₁ᶻσ₂ᶻ.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum Sector {
    Plus,
    Minus,
}

impl Sector {
    pub const BOTH: [Sector; 2] = [Sector::Plus, Sector::Minus];

    pub fn sign(self) -> f64 {
        match self {
            Sector::Plus => 1.0,
            Sector::Minus => -1.0,
        }
    }

    /// Basis slots (first, second) of the fictitious spin's |↑⟩, |↓⟩.
    pub fn slots(self) -> (usize, usize) {
        match self {
            Sector::Plus => (0, 3),
            Sector::Minus => (1, 2),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Sector::Plus => "plus",
            Sector::Minus => "minus",
        }
    }

    pub fn from_sign(sign: i32) -> Result<Self> {
        match sign {
            1 => Ok(Sector::Plus),
            -1 => Ok(Sector::Minus),
            other => Err(DimerError::InvalidParameter(format!("sector must be ±1, got {other}"))),
        }
    }
}

impl fmt::Display for Sector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

pub fn build_hamiltonian(c: &DimerCouplings, omega1: f64, omega2: f64) -> CMat4 {
    use Axis::*;
    pauli(Z, Site::One) * cr(c.hbar * omega1)
        + pauli(Z, Site::Two) * cr(c.hbar * omega2)
        + pauli_pair(X, X) * cr(c.gxx)
        + pauli_pair(Y, Y) * cr(c.gyy)
        + pauli_pair(Z, Z) * cr(c.gzz)
        + pauli_pair(X, Y) * cr(c.gxy)
        + pauli_pair(Y, X) * cr(c.gyx)
}

/// 𝕌 = ½[1 + σ₁ᶻ + σ₂ˣ − σ₁ᶻσ₂ˣ]: maps σ₁ᶻσ₂ᶻ onto σ₂ᶻ.
pub fn symmetry_u() -> CMat4 {
    let id = CMat4::identity();
    (id + pauli(Axis::Z, Site::One) + pauli(Axis::X, Site::Two) - kron(&sigma(Axis::Z), &sigma(Axis::X))) * cr(0.5)
}

pub fn sector_gamma(c: &DimerCouplings, sector: Sector) -> C64 {
    let s = sector.sign();
    C64::new(c.gxx - s * c.gyy, -(s * c.gxy + c.gyx))
}

/// Ω± = ℏ(ω₁ ± ω₂)
pub fn sector_omega(hbar: f64, omega1: f64, omega2: f64, sector: Sector) -> f64 {
    hbar * (omega1 + sector.sign() * omega2)
}

pub fn sector_hamiltonian(c: &DimerCouplings, omega1: f64, omega2: f64, sector: Sector) -> CMat2 {
    let w = sector_omega(c.hbar, omega1, omega2, sector);
    let g = sector_gamma(c, sector);
    CMat2::identity() * cr(sector.sign() * c.gzz) + CMat2::new(cr(w), g, g.conj(), cr(-w))
}

/// Extracts the 2×2 block of a parity-conserving 4×4 operator.
pub fn sector_block(m: &CMat4, sector: Sector) -> CMat2 {
    let (i, j) = sector.slots();
    CMat2::new(m[(i, i)], m[(i, j)], m[(j, i)], m[(j, j)])
}

/// Where a [`Propagator4`] came from.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Provenance {
    /// Closed form; labels name the construction used in each sector.
    ClosedForm {
        plus: &'static str,
        minus: &'static str,
    },
    Oracle,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Propagator4 {
    pub matrix: CMat4,
    pub t: f64,
    pub provenance: Provenance,
}

impl Propagator4 {
    pub fn with_labels(mut self, plus: &'static str, minus: &'static str) -> Self {
        self.provenance = Provenance::ClosedForm { plus, minus };
        self
    }

    pub fn unitarity_defect(&self) -> f64 {
        unitarity_defect(&self.matrix)
    }
}

fn same_time(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0)
}

fn place(m: &mut CMat4, block: &CMat2, sector: Sector) {
    let (i, j) = sector.slots();
    m[(i, i)] = block[(0, 0)];
    m[(i, j)] = block[(0, 1)];
    m[(j, i)] = block[(1, 0)];
    m[(j, j)] = block[(1, 1)];
}

/// The sector phase factor e^{∓iγzz t/ℏ}.
pub fn sector_zz_phase(c: &DimerCouplings, sector: Sector, t: f64) -> C64 {
    expi(-sector.sign() * c.gzz * t / c.hbar)
}

/// Composite phases (Φ_a, Φ′_a, Φ_b, Φ′_b) of the assembled operator, so that
/// the sector block reads `[[|a|e^{iΦ_a}, |b|e^{iΦ_b}], [−|b|e^{−iΦ′_b}, |a|e^{−iΦ′_a}]]`.
/// The off-diagonal phases include arg Γ.
pub fn composite_phases(p: &Propagator2, c: &DimerCouplings, sector: Sector) -> [f64; 4] {
    let z = sector.sign() * c.gzz * p.t / c.hbar;
    let b = p.phi_b + p.transverse_phase;
    [p.phi_a - z, p.phi_a + z, b - z, b + z]
}

fn check_sector(p: &Propagator2, sector: Sector) -> Result<()> {
    let d = p.normalization_defect();
    if d > ASSEMBLY_TOL || !d.is_finite() {
        return Err(DimerError::InvalidParameter(format!(
            "{sector} sector propagator is not normalized (|a|²+|b|²−1 = {d:e})"
        )));
    }
    Ok(())
}

pub fn assemble_propagator(
    p_plus: &Propagator2,
    p_minus: &Propagator2,
    c: &DimerCouplings,
    t: f64,
) -> Result<Propagator4> {
    if !same_time(p_plus.t, p_minus.t) {
        return Err(DimerError::TimeMismatch { plus: p_plus.t, minus: p_minus.t });
    }
    if !same_time(p_plus.t, t) {
        return Err(DimerError::TimeMismatch { plus: p_plus.t, minus: t });
    }
    check_sector(p_plus, Sector::Plus)?;
    check_sector(p_minus, Sector::Minus)?;
    let mut m = CMat4::zeros();
    place(&mut m, &(p_plus.matrix() * sector_zz_phase(c, Sector::Plus, t)), Sector::Plus);
    place(&mut m, &(p_minus.matrix() * sector_zz_phase(c, Sector::Minus, t)), Sector::Minus);
    Ok(Propagator4 { matrix: m, t, provenance: Provenance::ClosedForm { plus: "closed", minus: "closed" } })
}

/// Full propagator when ω₁(t) = ω₂(t): the parity-minus block is time
/// independent and does not depend on ω(t) at all.
pub fn static_full_propagator(c: &DimerCouplings, p_plus: &Propagator2, t: f64) -> Result<Propagator4> {
    if !same_time(p_plus.t, t) {
        return Err(DimerError::TimeMismatch { plus: p_plus.t, minus: t });
    }
    check_sector(p_plus, Sector::Plus)?;
    let mut m = CMat4::zeros();
    place(&mut m, &(p_plus.matrix() * sector_zz_phase(c, Sector::Plus, t)), Sector::Plus);
    let inner = static_sector_propagator(t, sector_gamma(c, Sector::Minus), c.gzz, c.hbar);
    place(&mut m, &inner, Sector::Minus);
    Ok(Propagator4 { matrix: m, t, provenance: Provenance::ClosedForm { plus: "closed", minus: "static" } })
}

/// Φ of the static parity-minus block: arg Γ₋ − π/2, i.e.
/// atan2(−(γxx+γyy), γxy−γyx).
pub fn static_phi(c: &DimerCouplings) -> f64 {
    static_phase(sector_gamma(c, Sector::Minus))
}

/// u · ψ₀, without renormalization.
pub fn evolve(state0: &StateVec4, u: &Propagator4) -> StateVec4 {
    u.matrix * state0
}

/// Norm of the projection of `state` onto a parity sector.
pub fn sector_weight(state: &StateVec4, sector: Sector) -> f64 {
    let (i, j) = sector.slots();
    (state[i].norm_sqr() + state[j].norm_sqr()).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{basis_state, c, max_abs, max_abs_diff, parity};
    use crate::single_spin::Scenario;
    use std::f64::consts::FRAC_PI_2;

    fn couplings() -> DimerCouplings {
        DimerCouplings::new(0.7, -0.3, 0.45, 0.2, -0.55, 1.0).unwrap()
    }

    #[test]
    fn hamiltonian_examples() {
        let zero = DimerCouplings::new(0.0, 0.0, 0.0, 0.0, 0.0, 1.0).unwrap();
        assert_eq!(build_hamiltonian(&zero, 0.0, 0.0), CMat4::zeros());
        let zz = DimerCouplings::new(0.0, 0.0, 1.5, 0.0, 0.0, 1.0).unwrap();
        let h = build_hamiltonian(&zz, 0.0, 0.0);
        let diag: Vec<f64> = (0..4).map(|i| h[(i, i)].re).collect();
        assert_eq!(diag, vec![1.5, -1.5, -1.5, 1.5]);
        let h = build_hamiltonian(&couplings(), 0.3, -1.1);
        assert!(max_abs_diff(&h, &h.adjoint()) < 1e-14);
        let p = parity();
        assert!(max_abs(&(h * p - p * h)) < 1e-14);
    }

    #[test]
    fn invalid_couplings() {
        assert!(DimerCouplings::new(f64::NAN, 0.0, 0.0, 0.0, 0.0, 1.0).is_err());
        assert!(DimerCouplings::new(0.0, 0.0, 0.0, 0.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn symmetry_u_properties() {
        let u = symmetry_u();
        assert!(max_abs_diff(&(u * u), &CMat4::identity()) < 1e-15);
        assert!(max_abs_diff(&u, &u.adjoint()) < 1e-15);
        let expected = CMat4::from_fn(|i, j| {
            let perm = [0, 1, 3, 2];
            if perm[i] == j {
                cr(1.0)
            } else {
                cr(0.0)
            }
        });
        assert!(max_abs_diff(&u, &expected) < 1e-15);
        assert!(max_abs_diff(&(u * parity() * u), &pauli(Axis::Z, Site::Two)) < 1e-15);
    }

    #[test]
    fn sector_gamma_examples() {
        let s = DimerCouplings::special(1.0, 0.0).unwrap();
        assert!((sector_gamma(&s, Sector::Plus).norm() - 1.0).abs() < 1e-15);
        assert!((sector_gamma(&s, Sector::Minus).norm() - 2.0).abs() < 1e-15);
        let xy = DimerCouplings::new(0.8, 0.8, 0.0, 0.0, 0.0, 1.0).unwrap();
        assert_eq!(sector_gamma(&xy, Sector::Plus), c(0.0, 0.0));
        assert_eq!(sector_gamma(&xy, Sector::Minus), c(1.6, 0.0));
        let dm = DimerCouplings::new(0.0, 0.0, 0.0, 0.4, -0.4, 1.0).unwrap();
        assert_eq!(sector_gamma(&dm, Sector::Plus), c(0.0, 0.0));
        assert_eq!(sector_gamma(&dm, Sector::Minus), c(0.0, 0.8));
        let r = DimerCouplings::real_special(1.0, 0.0).unwrap();
        assert_eq!(sector_gamma(&r, Sector::Plus), c(1.0, 0.0));
        assert_eq!(sector_gamma(&r, Sector::Minus), c(2.0, 0.0));
    }

    #[test]
    fn sector_hamiltonian_matches_conjugated_blocks() {
        let cp = couplings();
        let (w1, w2) = (0.37, -0.81);
        let h = build_hamiltonian(&cp, w1, w2);
        let u = symmetry_u();
        let conj = u * h * u;
        // in the conjugated frame σ₂ᶻ = +1 is indices {0, 2}, σ₂ᶻ = −1 is {1, 3}
        let frame = |i: usize, j: usize| CMat2::new(conj[(i, i)], conj[(i, j)], conj[(j, i)], conj[(j, j)]);
        for (sector, (i, j)) in [(Sector::Plus, (0, 2)), (Sector::Minus, (1, 3))] {
            let expect = sector_hamiltonian(&cp, w1, w2, sector);
            assert!(max_abs_diff(&frame(i, j), &expect) < 1e-13);
            assert!(max_abs_diff(&sector_block(&h, sector), &expect) < 1e-13);
        }
        assert!(max_abs(&CMat2::new(conj[(0, 1)], conj[(0, 3)], conj[(2, 1)], conj[(2, 3)])) < 1e-15);
    }

    #[test]
    fn equal_omega_zeroes_minus_drive() {
        let h = sector_hamiltonian(&couplings(), 0.6, 0.6, Sector::Minus);
        assert!((h[(0, 0)] - h[(1, 1)] - cr(0.0)).norm() < 1e-15);
    }

    #[test]
    fn identity_assembly() {
        let cp = couplings();
        let id = Propagator2::identity(0.0);
        let u = assemble_propagator(&id, &id, &cp, 0.0).unwrap();
        assert!(max_abs_diff(&u.matrix, &CMat4::identity()) < 1e-15);
    }

    #[test]
    fn time_mismatch() {
        let cp = couplings();
        let p = Propagator2::identity(0.0);
        let mut q = p;
        q.t = 1.0;
        assert!(matches!(assemble_propagator(&p, &q, &cp, 0.0), Err(DimerError::TimeMismatch { .. })));
    }

    #[test]
    fn assembly_matches_conjugation_formula() {
        let cp = couplings();
        let t = 1.37;
        let pp = Scenario::S1.propagator(t, &cp.sector_params(Sector::Plus)).unwrap();
        let pm = Scenario::S2.propagator(t, &cp.sector_params(Sector::Minus)).unwrap();
        let u = assemble_propagator(&pp, &pm, &cp, t).unwrap();
        let up = pp.matrix() * sector_zz_phase(&cp, Sector::Plus, t);
        let um = pm.matrix() * sector_zz_phase(&cp, Sector::Minus, t);
        let proj_p = CMat2::new(cr(1.0), cr(0.0), cr(0.0), cr(0.0));
        let proj_m = CMat2::new(cr(0.0), cr(0.0), cr(0.0), cr(1.0));
        let s = symmetry_u();
        let brute = s * (kron(&up, &proj_p) + kron(&um, &proj_m)) * s;
        assert!(max_abs_diff(&u.matrix, &brute) < 1e-13);
        assert!(u.unitarity_defect() < 1e-12);
        for (i, j) in [(0, 1), (0, 2), (1, 0), (1, 3), (2, 0), (2, 3), (3, 1), (3, 2)] {
            assert_eq!(u.matrix[(i, j)], cr(0.0));
        }
    }

    #[test]
    fn evolve_plus_plus_and_minus_plus() {
        let cp = couplings();
        let t = 0.9;
        let pp = Scenario::S1.propagator(t, &cp.sector_params(Sector::Plus)).unwrap();
        let pm = Scenario::S1.propagator(t, &cp.sector_params(Sector::Minus)).unwrap();
        let u = assemble_propagator(&pp, &pm, &cp, t).unwrap();
        let [fa, _, _, fbp] = composite_phases(&pp, &cp, Sector::Plus);
        let psi = evolve(&basis_state(0), &u);
        assert!((psi[0] - expi(fa) * pp.a_abs).norm() < 1e-14);
        assert!((psi[3] + expi(-fbp) * pp.b_abs).norm() < 1e-14);
        assert!(psi[1].norm() == 0.0 && psi[2].norm() == 0.0);

        let [_, fap, fb, _] = composite_phases(&pm, &cp, Sector::Minus);
        let psi = evolve(&basis_state(2), &u);
        assert!((psi[1] - expi(fb) * pm.b_abs).norm() < 1e-14);
        assert!((psi[2] - expi(-fap) * pm.a_abs).norm() < 1e-14);
        assert!((psi.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn static_propagator_identity_and_independence() {
        let cp = couplings();
        let pp0 = Propagator2::identity(0.0);
        let u0 = static_full_propagator(&cp, &pp0, 0.0).unwrap();
        assert!(max_abs_diff(&u0.matrix, &CMat4::identity()) < 1e-15);
        let t = 2.2;
        let a = Scenario::S1.propagator(t, &cp.sector_params(Sector::Plus)).unwrap();
        let b = Scenario::S2.propagator(t, &cp.sector_params(Sector::Plus)).unwrap();
        let ua = static_full_propagator(&cp, &a, t).unwrap();
        let ub = static_full_propagator(&cp, &b, t).unwrap();
        assert_eq!(sector_block(&ua.matrix, Sector::Minus), sector_block(&ub.matrix, Sector::Minus));
    }

    #[test]
    fn static_phi_branch() {
        let cp = couplings();
        let phi = static_phi(&cp);
        let expect = (-(cp.gxx + cp.gyy)).atan2(cp.gxy - cp.gyx);
        assert!((phi - expect).abs() < 1e-14 || ((phi - expect).abs() - 2.0 * std::f64::consts::PI).abs() < 1e-14);
        let sym = DimerCouplings::new(1.0, 0.0, 0.0, 0.3, 0.3, 1.0).unwrap();
        assert!((static_phi(&sym) + FRAC_PI_2).abs() < 1e-15);
    }
}
