use std::f64::consts::FRAC_PI_2;

use proptest::prelude::*;

use num_complex::Complex64 as C64;
use spin_dimer::algebra::{
    cr, expectation, kron, max_abs_diff, parity, unitarity_defect, CMat2, CMat4, NamedState, StateVec4,
};
use spin_dimer::dimer::{
    assemble_propagator, build_hamiltonian, sector_block, sector_hamiltonian, sector_zz_phase, symmetry_u,
    DimerCouplings, Sector,
};
use spin_dimer::observables::{analytic_concurrence, concurrence, covariances, s2, sz, ConcurrenceSource};
use spin_dimer::schedules::full_schedule;
use spin_dimer::single_spin::{Propagator2, Scenario, SectorParams};

fn couplings() -> impl Strategy<Value = DimerCouplings> {
    (-2.0..2.0f64, -2.0..2.0f64, -2.0..2.0f64, -2.0..2.0f64, -2.0..2.0f64, 0.3..3.0f64)
        .prop_map(|(a, b, c, d, e, h)| DimerCouplings::new(a, b, c, d, e, h).unwrap())
}

fn driven_couplings() -> impl Strategy<Value = DimerCouplings> {
    couplings().prop_filter("both sectors driven", |c| {
        c.sector_params(Sector::Plus).gamma_abs > 0.05 && c.sector_params(Sector::Minus).gamma_abs > 0.05
    })
}

fn state() -> impl Strategy<Value = StateVec4> {
    prop::array::uniform8(-1.0..1.0f64)
        .prop_filter("non-zero", |v| v.iter().map(|x| x * x).sum::<f64>() > 1e-3)
        .prop_map(|v| {
            let s =
                StateVec4::new(C64::new(v[0], v[1]), C64::new(v[2], v[3]), C64::new(v[4], v[5]), C64::new(v[6], v[7]));
            s / cr(s.norm())
        })
}

fn sector_state(sector: Sector) -> impl Strategy<Value = StateVec4> {
    state().prop_filter_map("needs weight in the sector", move |s| {
        let (i, j) = sector.slots();
        let mut out = StateVec4::zeros();
        out[i] = s[i];
        out[j] = s[j];
        let n = out.norm();
        (n > 1e-2).then(|| out / cr(n))
    })
}

fn scenario() -> impl Strategy<Value = Scenario> {
    prop_oneof![Just(Scenario::S1), Just(Scenario::S2)]
}

fn propagator2(t: f64) -> impl Strategy<Value = Propagator2> {
    (0.0..FRAC_PI_2, -6.0..6.0f64, -6.0..6.0f64, -3.0..3.0f64).prop_map(move |(angle, pa, pb, chi)| Propagator2 {
        t,
        a_abs: angle.cos(),
        b_abs: angle.sin(),
        phi_a: pa,
        phi_b: pb,
        transverse_phase: chi,
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn hamiltonian_conserves_parity(c in couplings(), w1 in -3.0..3.0f64, w2 in -3.0..3.0f64) {
        let h = build_hamiltonian(&c, w1, w2);
        let p = parity();
        prop_assert!(max_abs_diff(&(h * p), &(p * h)) < 1e-13);
        prop_assert!(max_abs_diff(&h, &h.adjoint()) < 1e-14);
    }

    #[test]
    fn sector_blocks_match_conjugation(c in couplings(), w1 in -3.0..3.0f64, w2 in -3.0..3.0f64) {
        let h = build_hamiltonian(&c, w1, w2);
        let u = symmetry_u();
        let conj = u * h * u;
        for (sector, (i, j)) in [(Sector::Plus, (0, 2)), (Sector::Minus, (1, 3))] {
            let block = CMat2::new(conj[(i, i)], conj[(i, j)], conj[(j, i)], conj[(j, j)]);
            prop_assert!(max_abs_diff(&block, &sector_hamiltonian(&c, w1, w2, sector)) <= 1e-13);
            prop_assert!(max_abs_diff(&sector_block(&h, sector), &block) <= 1e-13);
        }
    }

    #[test]
    fn assembly_equals_conjugated_direct_sum(
        c in couplings(),
        t in 0.0..5.0f64,
        seeds in (propagator2(0.0), propagator2(0.0)),
    ) {
        let (mut pp, mut pm) = seeds;
        pp.t = t;
        pm.t = t;
        let u = assemble_propagator(&pp, &pm, &c, t).unwrap();
        let up = pp.matrix() * sector_zz_phase(&c, Sector::Plus, t);
        let um = pm.matrix() * sector_zz_phase(&c, Sector::Minus, t);
        let proj_up = CMat2::new(cr(1.0), cr(0.0), cr(0.0), cr(0.0));
        let proj_down = CMat2::new(cr(0.0), cr(0.0), cr(0.0), cr(1.0));
        let s = symmetry_u();
        let brute = s * (kron(&up, &proj_up) + kron(&um, &proj_down)) * s;
        prop_assert!(max_abs_diff(&u.matrix, &brute) <= 1e-13);
        prop_assert!(u.unitarity_defect() <= 1e-12);
        for (i, j) in [(0, 1), (0, 2), (1, 0), (1, 3), (2, 0), (2, 3), (3, 1), (3, 2)] {
            prop_assert_eq!(u.matrix[(i, j)], cr(0.0));
        }
        prop_assert!(max_abs_diff(&(u.matrix * parity()), &(parity() * u.matrix)) <= 1e-12);
    }

    #[test]
    fn scenario_propagators_are_normalized(
        s in scenario(),
        g in 0.1..5.0f64,
        chi in -3.0..3.0f64,
        hbar in 0.5..2.0f64,
        x in 0.0..30.0f64,
    ) {
        let p = SectorParams::new(g, chi, hbar).unwrap();
        let t = x / s.rate(&p);
        let u = s.propagator(t, &p).unwrap();
        prop_assert!(u.normalization_defect() <= 1e-12);
        prop_assert!(unitarity_defect(&u.matrix()) <= 1e-12);
        let (pa, pb) = s.phases(t, &p).unwrap();
        // ℛ cancels in the sum, so rounding scales with its size
        let tol = 1e-12 * (1.0 + s.phase_integral(t, &p).abs());
        prop_assert!((pa + pb + s.theta(t, &p) + FRAC_PI_2).abs() <= tol);
    }

    #[test]
    fn amplitudes_decay_monotonically(s in scenario(), g in 0.1..5.0f64, x0 in 0.0..20.0f64, dx in 1e-6..2.0f64) {
        let p = SectorParams::new(g, 0.0, 1.0).unwrap();
        let t0 = x0 / s.rate(&p);
        let t1 = (x0 + dx) / s.rate(&p);
        let (a0, _) = s.amplitudes(t0, &p).unwrap();
        let (a1, _) = s.amplitudes(t1, &p).unwrap();
        prop_assert!(a1 <= a0);
        if s == Scenario::S2 && x0 + dx < 30.0 {
            prop_assert!(a1 < a0);
        }
    }

    #[test]
    fn closed_form_trajectories_conserve_parity_and_norm(
        c in driven_couplings(),
        plus in scenario(),
        minus in scenario(),
        psi in state(),
        x in 0.0..10.0f64,
    ) {
        let s = full_schedule(&c, plus, minus).unwrap();
        let t = x * c.hbar / (2.0 * c.sector_params(Sector::Plus).gamma_abs);
        let u = s.propagator(t).unwrap();
        prop_assert!(u.unitarity_defect() <= 1e-10);
        let out = u.matrix * psi;
        prop_assert!((out.norm() - 1.0).abs() <= 1e-12);
        let before = expectation(&psi, &parity()).unwrap();
        let after = expectation(&out, &parity()).unwrap();
        prop_assert!((before - after).abs() <= 1e-10);
    }

    #[test]
    fn observable_ranges(psi in state(), hbar in 0.3..3.0f64) {
        let c = concurrence(&psi);
        prop_assert!((-1e-12..=1.0 + 1e-12).contains(&c));
        let z = sz(&psi, hbar).unwrap();
        prop_assert!(z.abs() <= hbar + 1e-10);
        let q = s2(&psi, hbar).unwrap();
        prop_assert!(q >= -1e-10 && q <= 2.0 * hbar * hbar + 1e-10);
    }

    #[test]
    fn magnetization_has_no_interference_terms(psi in state(), hbar in 0.3..3.0f64) {
        let direct = sz(&psi, hbar).unwrap();
        let populations = hbar * (psi[0].norm_sqr() - psi[3].norm_sqr());
        prop_assert!((direct - populations).abs() <= 1e-12);
    }

    #[test]
    fn concurrence_equals_xx_xy_covariance_norm_in_a_parity_sector(
        psi in prop_oneof![sector_state(Sector::Plus), sector_state(Sector::Minus)]
    ) {
        let cov = covariances(&psi).unwrap();
        let c = concurrence(&psi);
        prop_assert!((c - cov.cxx.hypot(cov.cxy)).abs() <= 1e-10);
    }

    #[test]
    fn bell_trajectory_never_fully_disentangles(g in 0.1..5.0f64, x in 0.0..40.0f64) {
        let p = SectorParams::new(g, 0.0, 1.0).unwrap();
        let t = x / (2.0 * g);
        let c = analytic_concurrence(t, ConcurrenceSource::FromBell, Scenario::S1, &p).unwrap();
        prop_assert!(c > 0.0);
    }
}

#[test]
fn xx_yy_covariance_norm_overshoots_for_a_bell_state() {
    // ⟨σ₁ʸσ₂ʸ⟩ = −⟨σ₁ˣσ₂ˣ⟩ within the parity-+ sector, so √(Cxx² + Cyy²) is √2 C
    let psi = NamedState::PhiPlus.vector();
    let cov = covariances(&psi).unwrap();
    assert!((cov.cxx.hypot(cov.cyy) - 2f64.sqrt()).abs() < 1e-14);
    assert!((concurrence(&psi) - 1.0).abs() < 1e-15);
}

#[test]
fn symmetry_u_is_a_basis_permutation() {
    let u = symmetry_u();
    let id = CMat4::identity();
    let mut perm = id;
    perm.swap_rows(2, 3);
    assert_eq!(u, perm);
}
