//! Dense complex linear algebra in dimension 2 and 4.
//!
//! All two-spin objects use the ordered product basis
//!
//! ```text
//! index 0: |++⟩   index 1: |+−⟩   index 2: |−+⟩   index 3: |−−⟩
//! ```
//!
//! where the first symbol is spin 1 and `+` is the σᶻ = +1 eigenstate. Every
//! other module relies on this ordering; [`kron`] produces it from single-spin
//! factors (`kron(a, b)` acts with `a` on spin 1 and `b` on spin 2).

use nalgebra::{Matrix2, Matrix4, SMatrix, SVector, Vector2, Vector4};
use num_complex::Complex64 as C64;

use crate::error::{DimerError, Result};

pub type CMat2 = Matrix2<C64>;
pub type CMat4 = Matrix4<C64>;
pub type StateVec2 = Vector2<C64>;
pub type StateVec4 = Vector4<C64>;

/// Tolerance used when an operator is required to be Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Largest imaginary part tolerated in an expectation value.
pub const EXPECTATION_IM_TOL: f64 = 1e-10;

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[inline]
pub fn cr(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// `e^{iθ}`
#[inline]
pub fn expi(theta: f64) -> C64 {
    C64::from_polar(1.0, theta)
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Y,
    Z,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum Site {
    One,
    Two,
}

/// Single-spin Pauli matrix.
pub fn sigma(axis: Axis) -> CMat2 {
    let z = cr(0.0);
    match axis {
        Axis::X => CMat2::new(z, cr(1.0), cr(1.0), z),
        Axis::Y => CMat2::new(z, c(0.0, -1.0), c(0.0, 1.0), z),
        Axis::Z => CMat2::new(cr(1.0), z, z, cr(-1.0)),
    }
}

pub fn kron(a: &CMat2, b: &CMat2) -> CMat4 {
    a.kronecker(b)
}

/// σᵃ acting on `site`, identity on the other spin.
pub fn pauli(axis: Axis, site: Site) -> CMat4 {
    let id = CMat2::identity();
    match site {
        Site::One => kron(&sigma(axis), &id),
        Site::Two => kron(&id, &sigma(axis)),
    }
}

/// σ₁ᵃ σ₂ᵇ
pub fn pauli_pair(a: Axis, b: Axis) -> CMat4 {
    kron(&sigma(a), &sigma(b))
}

/// The parity operator σ₁ᶻσ₂ᶻ.
pub fn parity() -> CMat4 {
    pauli_pair(Axis::Z, Axis::Z)
}

/// Collective spin component Ŝᵃ = (ℏ/2)(σ₁ᵃ + σ₂ᵃ).
pub fn collective_spin(axis: Axis, hbar: f64) -> CMat4 {
    (pauli(axis, Site::One) + pauli(axis, Site::Two)) * cr(hbar / 2.0)
}

/// Ŝ² = (Ŝ₁ + Ŝ₂)², assembled from the collective components.
pub fn spin_squared(hbar: f64) -> CMat4 {
    [Axis::X, Axis::Y, Axis::Z]
        .iter()
        .map(|&a| {
            let s = collective_spin(a, hbar);
            s * s
        })
        .fold(CMat4::zeros(), |acc, m| acc + m)
}

pub fn max_abs_diff<const R: usize, const C: usize>(a: &SMatrix<C64, R, C>, b: &SMatrix<C64, R, C>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

pub fn max_abs<const R: usize, const C: usize>(a: &SMatrix<C64, R, C>) -> f64 {
    a.iter().map(|x| x.norm()).fold(0.0, f64::max)
}

/// True iff `max |m†m − I| ≤ tol`.
pub fn is_unitary<const N: usize>(m: &SMatrix<C64, N, N>, tol: f64) -> bool {
    unitarity_defect(m) <= tol
}

pub fn unitarity_defect<const N: usize>(m: &SMatrix<C64, N, N>) -> f64 {
    max_abs_diff(&(m.adjoint() * m), &SMatrix::<C64, N, N>::identity())
}

pub fn hermiticity_defect<const N: usize>(m: &SMatrix<C64, N, N>) -> f64 {
    max_abs_diff(m, &m.adjoint())
}

pub fn is_finite<const R: usize, const C: usize>(m: &SMatrix<C64, R, C>) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// ⟨ψ|O|ψ⟩ for a Hermitian `obs`.
pub fn expectation<const N: usize>(state: &SVector<C64, N>, obs: &SMatrix<C64, N, N>) -> Result<f64> {
    let deviation = hermiticity_defect(obs);
    if deviation > HERMITIAN_TOL {
        return Err(DimerError::NonHermitian { deviation });
    }
    let value = state.dotc(&(obs * state));
    debug_assert!(
        value.im.abs() <= EXPECTATION_IM_TOL * (1.0 + max_abs(obs)),
        "expectation has imaginary part {}",
        value.im
    );
    Ok(value.re)
}

/// Computational basis vector `|index⟩` in ordering ℬ.
pub fn basis_state(index: usize) -> StateVec4 {
    let mut v = StateVec4::zeros();
    v[index] = cr(1.0);
    v
}

/// The named two-spin states used throughout the crate.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum NamedState {
    PlusPlus,
    PlusMinus,
    MinusPlus,
    MinusMinus,
    /// (|++⟩ + |−−⟩)/√2
    PhiPlus,
    /// (|++⟩ − |−−⟩)/√2
    PhiMinus,
    /// (|+−⟩ + |−+⟩)/√2
    PsiPlus,
    /// (|+−⟩ − |−+⟩)/√2
    PsiMinus,
    /// All four amplitudes equal to 1/2: the Ŝˣ, Ŝ² maximal eigenstate.
    SxMax,
}

impl NamedState {
    pub fn vector(self) -> StateVec4 {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let v = |a: f64, b: f64, c_: f64, d: f64| StateVec4::new(cr(a), cr(b), cr(c_), cr(d));
        match self {
            NamedState::PlusPlus => basis_state(0),
            NamedState::PlusMinus => basis_state(1),
            NamedState::MinusPlus => basis_state(2),
            NamedState::MinusMinus => basis_state(3),
            NamedState::PhiPlus => v(h, 0.0, 0.0, h),
            NamedState::PhiMinus => v(h, 0.0, 0.0, -h),
            NamedState::PsiPlus => v(0.0, h, h, 0.0),
            NamedState::PsiMinus => v(0.0, h, -h, 0.0),
            NamedState::SxMax => v(0.5, 0.5, 0.5, 0.5),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const EPS: f64 = 1e-14;

    #[test]
    fn pauli_involution() {
        for axis in [Axis::X, Axis::Y, Axis::Z] {
            for site in [Site::One, Site::Two] {
                let p = pauli(axis, site);
                assert!(max_abs_diff(&(p * p), &CMat4::identity()) < EPS);
            }
        }
    }

    #[test]
    fn sigma_z_on_spin_one_follows_basis_order() {
        let p = pauli(Axis::Z, Site::One);
        let diag: Vec<f64> = (0..4).map(|i| p[(i, i)].re).collect();
        assert_eq!(diag, vec![1.0, 1.0, -1.0, -1.0]);
        assert!(max_abs_diff(&p, &CMat4::from_diagonal(&p.diagonal())) < EPS);
    }

    #[test]
    fn su2_commutator() {
        let x = pauli(Axis::X, Site::One);
        let y = pauli(Axis::Y, Site::One);
        let z = pauli(Axis::Z, Site::One);
        let comm = x * y - y * x;
        assert!(max_abs_diff(&comm, &(z * c(0.0, 2.0))) < EPS);
    }

    #[test]
    fn kron_examples() {
        let id = CMat2::identity();
        assert!(max_abs_diff(&kron(&id, &id), &CMat4::identity()) < EPS);
        assert!(max_abs_diff(&kron(&sigma(Axis::Z), &id), &pauli(Axis::Z, Site::One)) < EPS);
        let zz = kron(&sigma(Axis::Z), &sigma(Axis::Z));
        let diag: Vec<f64> = (0..4).map(|i| zz[(i, i)].re).collect();
        assert_eq!(diag, vec![1.0, -1.0, -1.0, 1.0]);
    }

    #[test]
    fn different_sites_commute_exactly() {
        for a in [Axis::X, Axis::Y, Axis::Z] {
            for b in [Axis::X, Axis::Y, Axis::Z] {
                let p = pauli(a, Site::One);
                let q = pauli(b, Site::Two);
                assert_eq!(p * q, q * p);
            }
        }
    }

    #[test]
    fn unitarity_check() {
        assert!(is_unitary(&CMat4::identity(), 1e-12));
        assert!(!is_unitary(&(CMat4::identity() * cr(2.0)), 1e-12));
    }

    #[test]
    fn expectation_examples() {
        let hbar = 1.0;
        let sz = collective_spin(Axis::Z, hbar);
        let s2 = spin_squared(hbar);
        let pp = NamedState::PlusPlus.vector();
        assert!((expectation(&pp, &sz).unwrap() - hbar).abs() < EPS);
        let pm = NamedState::PlusMinus.vector();
        assert!((expectation(&pm, &s2).unwrap() - hbar * hbar).abs() < EPS);
        let bell = NamedState::PhiPlus.vector();
        assert!(expectation(&bell, &sz).unwrap().abs() < EPS);
    }

    #[test]
    fn expectation_rejects_non_hermitian() {
        let mut m = CMat4::identity();
        m[(0, 1)] = cr(1.0);
        let err = expectation(&NamedState::PlusPlus.vector(), &m).unwrap_err();
        assert!(matches!(err, DimerError::NonHermitian { .. }));
    }

    #[test]
    fn spin_squared_spectrum_on_triplet_and_singlet() {
        let hbar = 0.7;
        let s2 = spin_squared(hbar);
        let triplet = NamedState::PsiPlus.vector();
        let singlet = NamedState::PsiMinus.vector();
        assert!(max_abs_diff(&(s2 * triplet), &(triplet * cr(2.0 * hbar * hbar))) < EPS);
        assert!(max_abs(&(s2 * singlet)) < EPS);
    }

    #[test]
    fn named_states_are_normalized() {
        use NamedState::*;
        for s in [PlusPlus, PlusMinus, MinusPlus, MinusMinus, PhiPlus, PhiMinus, PsiPlus, PsiMinus, SxMax] {
            assert!((s.vector().norm() - 1.0).abs() < 1e-15);
        }
    }
}
