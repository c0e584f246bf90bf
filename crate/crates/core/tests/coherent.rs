use approx::assert_abs_diff_eq;
use cqed_pairs_core::analysis::{fidelity, manifold_populations};
use cqed_pairs_core::coherent::*;
use cqed_pairs_core::pulses::*;
use cqed_pairs_core::statespace::{excitation_number, SystemParams};
use cqed_pairs_core::*;
use proptest::prelude::*;
use std::f64::consts::{PI, SQRT_2};

fn stirap_params(tau: f64, delay: f64) -> SystemParams {
    let s = stirap_schedule(1.0, tau, delay, 0.0).unwrap();
    SystemParams::new(s.cavity_one, s.cavity_two)
}

fn run(p: SystemParams, points: usize) -> (CavitySystem, CoherentTrajectory) {
    let sys = CavitySystem::new(p).unwrap();
    let tr = evolve(&sys, &sys.initial_state(), &Timeline::covering(&p, points)).unwrap();
    (sys, tr)
}

/// Independent reference: the `|I>, |B>, |E+>` chain with couplings
/// `sqrt 2 g1(t)` and `g2(t)`, integrated by classical RK4 on three complex
/// amplitudes.
fn chain_final_e_plus(p: &SystemParams, steps: usize) -> f64 {
    let (t0, t1) = (p.schedule2.support().0, p.schedule1.support().1);
    let h = (t1 - t0) / steps as f64;
    type V = [C64; 3];
    let f = |t: f64, c: &V| -> V {
        let (g1, g2) = p.couplings_at(t);
        let mi = C64::new(0.0, -1.0);
        [mi * SQRT_2 * g1 * c[1], mi * (SQRT_2 * g1 * c[0] + g2 * c[2]), mi * g2 * c[1]]
    };
    let add = |a: &V, b: &V, s: f64| -> V { [a[0] + b[0] * s, a[1] + b[1] * s, a[2] + b[2] * s] };
    let mut c: V = [C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0)];
    for k in 0..steps {
        let t = t0 + k as f64 * h;
        let k1 = f(t, &c);
        let k2 = f(t + h / 2.0, &add(&c, &k1, h / 2.0));
        let k3 = f(t + h / 2.0, &add(&c, &k2, h / 2.0));
        let k4 = f(t + h, &add(&c, &k3, h));
        for i in 0..3 {
            c[i] += (k1[i] + k2[i] * 2.0 + k3[i] * 2.0 + k4[i]) * (h / 6.0);
        }
    }
    c[2].norm_sqr()
}

fn rabi_check(ratio: f64) {
    let g1 = 0.8;
    let delta = ratio * g1;
    let omega = generalized_rabi_frequency(g1, delta);
    let t_end = 4.0 * PI / omega;
    let p = SystemParams::new(PulseSchedule::square(g1, 0.0, 10.0 * t_end), PulseSchedule::off())
        .with_detunings(delta, delta);
    let sys = CavitySystem::new(p).unwrap();
    let tl = Timeline::new(0.0, t_end, 801).with_dt_max(1.0 / (200.0 * omega));
    let tr = evolve(&sys, &sys.initial_state(), &tl).unwrap();
    let mut worst: f64 = 0.0;
    for (t, pop) in tr.times.iter().zip(&tr.populations) {
        let want = rabi_oracle(g1, delta, *t);
        worst = worst.max((pop.bright - want.bright).abs()).max((pop.initial - want.initial).abs());
    }
    assert!(worst < 1e-8, "Delta/g1 = {ratio}: max error {worst:e}");
}

#[test]
fn rabi_oracle_resonant() {
    rabi_check(0.0);
}

#[test]
fn rabi_oracle_detuned_by_g1() {
    rabi_check(1.0);
}

#[test]
fn rabi_oracle_half_transfer() {
    rabi_check(2.0 * SQRT_2);
}

#[test]
fn rabi_oracle_far_detuned() {
    rabi_check(5.0);
}

#[test]
fn square_pi_pulse_reaches_bright_state() {
    let first = calibrate_pi(&PulseSchedule::square(1.0, 0.0, 0.7), CAVITY_ONE_RABI_FACTOR).unwrap();
    let p = SystemParams::new(first, PulseSchedule::off());
    let sys = CavitySystem::new(p).unwrap();
    let tl = Timeline::covering(&p, 2).with_dt_max(1e-3);
    let tr = evolve(&sys, &sys.initial_state(), &tl).unwrap();
    assert_abs_diff_eq!(tr.populations[1].bright, 1.0, epsilon = 1e-8);
}

#[test]
fn lossless_sequential_pulses_give_unit_fidelity() {
    for shape in [PulseShape::Square, PulseShape::Gaussian] {
        let (a, b) = sequential_pi_schedule(shape, 0.6, 0.0, 0.0).unwrap();
        let (_, tr) = run(SystemParams::new(a, b), 1000);
        let f = fidelity(&tr.times, &tr.e_plus()).unwrap();
        assert_abs_diff_eq!(f.value, 1.0, epsilon = 1e-6);
        let last = tr.populations.last().unwrap();
        assert_abs_diff_eq!(last.e_plus, 1.0, epsilon = 1e-6);
    }
}

#[test]
fn default_stirap_is_adiabatic() {
    let p = stirap_params(20.0, 20.0);
    let (_, tr) = run(p, 1000);
    let report = adiabaticity_report(&tr);
    assert!(report.max_bright < 0.01, "{report:?}");
    assert!(report.max_dark < 1e-10);
    // Frozen terminal value, reproduced by the three-state chain below.
    assert_abs_diff_eq!(report.final_e_plus, 0.998_562, epsilon = 2e-6);
    assert_abs_diff_eq!(report.final_e_plus, chain_final_e_plus(&p, 400_000), epsilon = 1e-7);
    assert!(fidelity(&tr.times, &tr.e_plus()).unwrap().value >= 0.999);
}

#[test]
fn intuitive_ordering_fails_to_transfer() {
    let (_, tr) = run(stirap_params(20.0, -20.0), 500);
    let report = adiabaticity_report(&tr);
    assert!(report.final_e_plus < 0.5, "{report:?}");
}

#[test]
fn empty_second_cavity_never_reaches_target() {
    let p = SystemParams::new(PulseSchedule::gaussian(1.0, 0.0, 3.0), PulseSchedule::off());
    let (_, tr) = run(p, 300);
    assert_eq!(adiabaticity_report(&tr).final_e_plus, 0.0);
}

#[test]
fn stirap_improves_with_interaction_time() {
    let mut last = f64::INFINITY;
    for tau in [5.0, 10.0, 20.0, 40.0] {
        let (_, tr) = run(stirap_params(tau, 1.25 * tau), 200);
        let miss = 1.0 - tr.populations.last().unwrap().e_plus;
        assert!(miss < last, "tau g = {tau}: {miss} after {last}");
        last = miss;
    }
}

#[test]
fn dark_state_follows_mixing_angle() {
    let p = stirap_params(40.0, 50.0);
    let sys = CavitySystem::new(p).unwrap();
    let tr = evolve(&sys, &sys.initial_state(), &Timeline::covering(&p, 201)).unwrap();
    for (t, psi) in tr.times.iter().zip(&tr.states) {
        let theta = mixing_angle_at(&p.schedule1, &p.schedule2, *t);
        let overlap = dark_state(theta, sys.manifold()).overlap_sqr(psi);
        assert!(overlap > 0.995, "t = {t}: {overlap}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn resonant_runs_stay_in_the_chain(
        g1 in 0.2..1.5f64, g2 in 0.2..1.5f64, delta in -2.0..2.0f64,
        tau in 0.5..3.0f64, delay in -2.0..2.0f64
    ) {
        let p = SystemParams::new(PulseSchedule::gaussian(g1, 0.0, tau), PulseSchedule::gaussian(g2, -delay, tau))
            .with_detunings(delta, delta);
        let (sys, tr) = run(p, 120);
        let n_op = excitation_number(sys.basis());
        for (psi, pop) in tr.states.iter().zip(&tr.populations) {
            prop_assert!(pop.dark + pop.e_minus < 1e-10);
            prop_assert!((psi.norm_sqr() - 1.0).abs() < 1e-8);
            prop_assert!((n_op.expectation(psi).re - 2.0).abs() < 1e-8);
            let direct = manifold_populations(psi, sys.manifold());
            prop_assert!((direct.total() - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn detuned_runs_conserve_norm_and_excitation(
        g1 in 0.2..1.5f64, g2 in 0.2..1.5f64, dp in -2.0..2.0f64, dm in -2.0..2.0f64, tau in 0.5..3.0f64
    ) {
        let p = SystemParams::new(PulseSchedule::gaussian(g1, 0.0, tau), PulseSchedule::gaussian(g2, -tau, tau))
            .with_detunings(dp, dm);
        let (sys, tr) = run(p, 60);
        let n_op = excitation_number(sys.basis());
        for psi in &tr.states {
            prop_assert!((psi.norm_sqr() - 1.0).abs() < 1e-8);
            prop_assert!((n_op.expectation(psi).re - 2.0).abs() < 1e-8);
        }
    }
}
