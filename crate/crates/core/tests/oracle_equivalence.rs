//! Closed forms against brute-force integration of the Schrödinger equation.

use std::f64::consts::PI;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use spin_dimer::algebra::{max_abs_diff, CMat2, CMat4, NamedState, StateVec4};
use spin_dimer::dimer::{sector_block, sector_gamma, DimerCouplings, Sector};
use spin_dimer::observables::{
    analytic_concurrence, analytic_s2_parity_minus, analytic_sx, analytic_sz_parity_plus, concurrence,
    entanglement_instants, s2, sx, sz, Branch, ConcurrenceSource, MinusDrive,
};
use spin_dimer::oracle::{integrate_checkpoints, integrate_propagator, IntegrationConfig};
use spin_dimer::schedules::{full_schedule, subspace_schedule, FieldSchedule, Free};
use spin_dimer::single_spin::{
    omega_from_theta, propagator_from_theta, static_sector_propagator, Scenario, SectorParams, ThetaDrive,
};

const ORACLE_TOL: f64 = 1e-6;

fn grid(t_max: f64, n: usize) -> Vec<f64> {
    (0..=n).map(|k| t_max * k as f64 / n as f64).collect()
}

#[test]
fn sector_closed_forms_match_integration() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0001);
    let cfg = IntegrationConfig::default();
    for scenario in [Scenario::S1, Scenario::S2] {
        for _ in 0..20 {
            let p =
                SectorParams::new(rng.random_range(0.1..5.0), rng.random_range(-PI..PI), rng.random_range(0.5..2.0))
                    .unwrap();
            let times = grid(10.0 / scenario.rate(&p), 40);
            let h = |t: f64| p.hamiltonian(scenario.omega(t, &p).unwrap());
            let us = integrate_checkpoints(h, p.hbar, &CMat2::identity(), &times, &cfg).unwrap();
            for (u, &t) in us.iter().zip(&times) {
                let closed = scenario.propagator(t, &p).unwrap().matrix();
                let err = max_abs_diff(u, &closed);
                assert!(err <= ORACLE_TOL, "{scenario} {p:?} t={t}: {err:e}");
            }
        }
    }
}

#[test]
fn full_schedules_match_integration() {
    let cfg = IntegrationConfig::default();
    for gzz in [0.0, 0.37] {
        let c = DimerCouplings::special(1.0, gzz).unwrap();
        let gamma_plus = 2.0 * sector_gamma(&c, Sector::Plus).norm() / c.hbar;
        let times = grid(10.0 / gamma_plus, 50);
        for plus in [Scenario::S1, Scenario::S2] {
            for minus in [Scenario::S1, Scenario::S2] {
                let s = full_schedule(&c, plus, minus).unwrap();
                let us = integrate_checkpoints(|t| s.hamiltonian(t), c.hbar, &CMat4::identity(), &times, &cfg).unwrap();
                for (u, &t) in us.iter().zip(&times) {
                    let closed = s.propagator(t).unwrap();
                    let err = max_abs_diff(u, &closed.matrix);
                    assert!(err <= ORACLE_TOL, "({plus},{minus}) γzz={gzz} t={t}: {err:e}");
                }
            }
        }
    }
}

#[test]
fn theta_route_matches_integration_for_smooth_drives() {
    let p = SectorParams::new(0.9, 0.6, 1.0).unwrap();
    let cfg = IntegrationConfig::default();
    // smooth angle functions with Θ(0) = 0 that keep the field regular on [0, 1.5]
    let drives: Vec<ThetaDrive> = vec![
        ThetaDrive::new(Arc::new(|t| 0.8 * t.sin()), Arc::new(|t| 0.8 * t.cos()), 1.5).unwrap(),
        ThetaDrive::new(Arc::new(|t| 0.5 * t * t), Arc::new(|t| t), 1.5).unwrap(),
        ThetaDrive::new(
            Arc::new(|t: f64| 1.2 * (0.7 * t).tanh()),
            Arc::new(|t: f64| 0.84 / (0.7 * t).cosh().powi(2)),
            1.5,
        )
        .unwrap(),
    ];
    for d in &drives {
        let h = |t: f64| {
            let w = omega_from_theta(d, t, &p).unwrap();
            p.hamiltonian(w)
        };
        for &t in &[0.4, 0.9, 1.5] {
            let u = integrate_propagator(h, p.hbar, t, &cfg).unwrap().value;
            let closed = propagator_from_theta(d, t, &p).unwrap().matrix();
            let err = max_abs_diff(&u, &closed);
            assert!(err <= ORACLE_TOL, "t={t}: {err:e}");
        }
    }
}

#[test]
fn static_block_is_independent_of_common_drive() {
    let cfg = IntegrationConfig::default();
    let c = DimerCouplings::new(0.8, 0.3, 0.45, -0.2, 0.6, 1.0).unwrap();
    let gm = sector_gamma(&c, Sector::Minus);
    let drives: Vec<Arc<dyn Fn(f64) -> f64 + Send + Sync>> = vec![
        Arc::new(|t: f64| 1.5 * t.sin()),
        Arc::new(|t: f64| 0.3 + t * t / 4.0),
        Arc::new(|t: f64| 2.0 / (1.0 + t).cosh()),
    ];
    for w in drives {
        let s = FieldSchedule::equal_omega(c, w);
        for &t in &[0.5, 2.0, 4.0] {
            let u = integrate_propagator(|t| s.hamiltonian(t), c.hbar, t, &cfg).unwrap().value;
            let want = static_sector_propagator(t, gm, c.gzz, c.hbar);
            let err = max_abs_diff(&sector_block(&u, Sector::Minus), &want);
            assert!(err <= 1e-8, "t={t}: {err:e}");
        }
    }
}

fn oracle_states(s: &FieldSchedule, psi0: &StateVec4, times: &[f64]) -> Vec<StateVec4> {
    integrate_checkpoints(|t| s.hamiltonian(t), s.couplings.hbar, psi0, times, &IntegrationConfig::default()).unwrap()
}

#[test]
fn observables_follow_closed_forms_with_complex_couplings() {
    // complex Γ₊ and γzz ≠ 0 exercise every phase in the closed forms
    let c = DimerCouplings::special(1.0, 0.37).unwrap();
    let pp = c.sector_params(Sector::Plus);
    let pm = c.sector_params(Sector::Minus);
    let times = grid(4.0, 40);
    for scenario in [Scenario::S1, Scenario::S2] {
        let s = subspace_schedule(&c, Sector::Plus, scenario, Free::Zero).unwrap();
        for (branch, start) in [(Branch::Alpha, NamedState::PlusPlus), (Branch::Beta, NamedState::MinusMinus)] {
            let states = oracle_states(&s, &start.vector(), &times);
            for (psi, &t) in states.iter().zip(&times) {
                let want = analytic_sz_parity_plus(t, scenario, branch, &pp).unwrap();
                assert!((sz(psi, c.hbar).unwrap() - want).abs() < ORACLE_TOL);
                let closed = s.evolve(&start.vector(), t).unwrap();
                assert!((sz(&closed, c.hbar).unwrap() - want).abs() < 1e-12);
            }
        }
        let bell = NamedState::PhiPlus.vector();
        let states = oracle_states(&s, &bell, &times);
        for (psi, &t) in states.iter().zip(&times) {
            let want = analytic_concurrence(t, ConcurrenceSource::FromBell, scenario, &pp).unwrap();
            assert!((concurrence(psi) - want).abs() < ORACLE_TOL, "{scenario} t={t}");
            let closed = concurrence(&s.evolve(&bell, t).unwrap());
            assert!((closed - want).abs() < 1e-12, "{scenario} t={t}");
        }

        let s = subspace_schedule(&c, Sector::Minus, scenario, Free::Zero).unwrap();
        for (branch, start) in [(Branch::Alpha, NamedState::PlusMinus), (Branch::Beta, NamedState::MinusPlus)] {
            let states = oracle_states(&s, &start.vector(), &times);
            for (psi, &t) in states.iter().zip(&times) {
                let want = analytic_s2_parity_minus(t, MinusDrive::Engineered(scenario), branch, &pm, 0.0).unwrap();
                assert!((s2(psi, c.hbar).unwrap() - want).abs() < ORACLE_TOL, "{scenario} {branch:?} t={t}");
                let closed = s2(&s.evolve(&start.vector(), t).unwrap(), c.hbar).unwrap();
                assert!((closed - want).abs() < 1e-12, "{scenario} {branch:?} t={t}");
            }
        }
    }
}

#[test]
fn sx_exact_form_matches_integration() {
    let sx_max = NamedState::SxMax.vector();
    for c in [DimerCouplings::special(1.0, 0.37).unwrap(), DimerCouplings::real_special(1.0, -0.2).unwrap()] {
        let s = full_schedule(&c, Scenario::S1, Scenario::S1).unwrap();
        let times = grid(5.0, 50);
        let states = oracle_states(&s, &sx_max, &times);
        for (psi, &t) in states.iter().zip(&times) {
            let want = analytic_sx(t, &c, Scenario::S1, Scenario::S1).unwrap();
            assert!((sx(psi, c.hbar).unwrap() - want).abs() < ORACLE_TOL, "t={t}");
            let closed = sx(&s.evolve(&sx_max, t).unwrap(), c.hbar).unwrap();
            assert!((closed - want).abs() < 1e-12, "t={t}");
        }
    }
}

#[test]
fn relative_phase_at_entanglement_instants_follows_the_scenario_phase() {
    // starting from (|++⟩+|−−⟩)/√2 under S2 with real Γ₊ and γzz = 0, the state
    // at τₙ is (|++⟩ + e^{iδ}|−−⟩)/√2 up to a global phase
    let c = DimerCouplings::real_special(1.0, 0.0).unwrap();
    let s = subspace_schedule(&c, Sector::Plus, Scenario::S2, Free::Zero).unwrap();
    let bell = NamedState::PhiPlus.vector();
    let wrap = |x: f64| (x + PI).rem_euclid(2.0 * PI) - PI;
    for n in 1..=6 {
        let e = entanglement_instants(n);
        let t = e.tau * c.hbar / sector_gamma(&c, Sector::Plus).norm();
        let psi = s.evolve(&bell, t).unwrap();
        assert!((concurrence(&psi) - 1.0).abs() < 1e-9);
        let delta = (psi[3] / psi[0]).arg();
        assert!(wrap(delta + 2.0 * e.phi_a_literal).abs() < 1e-9, "n={n}");
        // the compact formula for φₙ gives a different phase
        assert!(wrap(delta + 2.0 * e.phi).abs() > 1e-3, "n={n}");
    }
}
