use approx::assert_abs_diff_eq;
use cqed_pairs_core::pulses::*;
use proptest::prelude::*;
use std::f64::consts::{E, FRAC_PI_2, PI, SQRT_2};

#[test]
fn evaluate_examples() {
    let g = PulseSchedule::gaussian(1.7, 2.0, 0.5);
    assert_eq!(g.evaluate(2.0), 1.7);
    assert_abs_diff_eq!(g.evaluate(2.5), 1.7 / E, epsilon = 1e-15);
    let s = PulseSchedule::square(0.9, 0.0, 1.0);
    assert_eq!(s.evaluate(1.0001), 0.0);
    assert_eq!(s.evaluate(-1.0001), 0.0);
    assert_eq!(s.evaluate(0.3), 0.9);
}

#[test]
fn area_examples() {
    // Square: g_peak * 2 tau = pi / (2 sqrt 2) with factor 2 sqrt 2.
    let tau = 0.8;
    let s = PulseSchedule::square(PI / (2.0 * SQRT_2) / (2.0 * tau), 0.0, tau);
    assert_abs_diff_eq!(pulse_area(&s, CAVITY_ONE_RABI_FACTOR), PI, epsilon = 1e-14);
    // Gaussian: g_peak tau sqrt(pi) = pi / 2 with factor 2. The truncation at
    // four widths removes erfc(4) of the area.
    let tau = 1.3;
    let g = PulseSchedule::gaussian(FRAC_PI_2 / (tau * PI.sqrt()), 0.0, tau);
    assert_abs_diff_eq!(pulse_area(&g, CAVITY_TWO_RABI_FACTOR), PI, epsilon = 1e-7);
    let wide = g.with_cutoff(30.0);
    assert_abs_diff_eq!(pulse_area(&wide, CAVITY_TWO_RABI_FACTOR), PI, epsilon = 1e-14);
    assert_eq!(pulse_area(&PulseSchedule::off(), 2.0), 0.0);
}

#[test]
fn area_matches_quadrature() {
    let g = calibrate_pi(&PulseSchedule::gaussian(1.0, 0.3, 0.7), CAVITY_ONE_RABI_FACTOR).unwrap();
    let (lo, hi) = g.support();
    let n = 200_000;
    let h = (hi - lo) / n as f64;
    // Composite Simpson.
    let mut acc = g.evaluate(lo) + g.evaluate(hi);
    for k in 1..n {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * g.evaluate(lo + k as f64 * h);
    }
    let area = CAVITY_ONE_RABI_FACTOR * acc * h / 3.0;
    assert_abs_diff_eq!(area, PI, epsilon = 1e-10);
}

#[test]
fn doubling_width_doubles_area() {
    for shape in [PulseSchedule::square(1.0, 0.0, 0.4), PulseSchedule::gaussian(1.0, 0.0, 0.4)] {
        let cal = calibrate_pi(&shape, 2.0).unwrap();
        let wider = PulseSchedule { tau: 2.0 * cal.tau, ..cal };
        assert_abs_diff_eq!(pulse_area(&wider, 2.0), 2.0 * PI, epsilon = 1e-12);
    }
}

#[test]
fn calibration_rejects_degenerate_width() {
    assert!(calibrate_pi(&PulseSchedule { tau: 0.0, ..PulseSchedule::square(1.0, 0.0, 1.0) }, 2.0).is_err());
    assert!(calibrate_pi(&PulseSchedule { tau: -1.0, ..PulseSchedule::gaussian(1.0, 0.0, 1.0) }, 2.0).is_err());
}

#[test]
fn stirap_limits() {
    let s = stirap_schedule(1.0, 2.0, 2.0, 0.0).unwrap();
    assert_eq!(s.ordering, PulseOrdering::Counterintuitive);
    let (c1, c2) = (s.cavity_one, s.cavity_two);
    assert!(mixing_angle_at(&c1, &c2, -9.0) < 1e-3);
    assert!((mixing_angle_at(&c1, &c2, 7.0) - FRAC_PI_2).abs() < 1e-3);
    // Beyond both supports the angle holds its end values.
    assert_eq!(mixing_angle_at(&c1, &c2, -100.0), 0.0);
    assert!((mixing_angle_at(&c1, &c2, 100.0) - FINAL_MIXING_ANGLE).abs() < 1e-3);
    let mid = mixing_angle_at(&c1, &c2, -1.0);
    assert_abs_diff_eq!(mid.to_degrees(), 54.735_610_317_245_35, epsilon = 1e-9);
    let intuitive = stirap_schedule(1.0, 2.0, -1.0, 0.0).unwrap();
    assert_eq!(intuitive.ordering, PulseOrdering::Intuitive);
}

#[test]
fn sequential_pulses_do_not_overlap() {
    for shape in [PulseShape::Square, PulseShape::Gaussian] {
        let (a, b) = sequential_pi_schedule(shape, 0.6, 0.0, 0.0).unwrap();
        assert!(a.support().1 <= b.support().0 + 1e-12);
        assert_abs_diff_eq!(pulse_area(&a, CAVITY_ONE_RABI_FACTOR), PI, epsilon = 1e-12);
        assert_abs_diff_eq!(pulse_area(&b, CAVITY_TWO_RABI_FACTOR), PI, epsilon = 1e-12);
    }
}

#[test]
fn square_jumps_only_at_edges() {
    let s = PulseSchedule::square(1.0, 0.0, 1.0);
    let n = 4000;
    for k in 0..n {
        let t = -2.0 + 4.0 * k as f64 / n as f64;
        let step = (s.evaluate(t + 1e-3) - s.evaluate(t)).abs();
        if step > 0.0 {
            assert!((t + 1.0).abs() < 2e-3 || (t - 1.0).abs() < 2e-3, "jump at {t}");
        }
    }
}

proptest! {
    #[test]
    fn calibrated_area_is_pi(tau in 1e-3..50.0f64, center in -10.0..10.0f64, gaussian in any::<bool>(), one in any::<bool>()) {
        let shape = if gaussian { PulseSchedule::gaussian(1.0, center, tau) } else { PulseSchedule::square(1.0, center, tau) };
        let factor = if one { CAVITY_ONE_RABI_FACTOR } else { CAVITY_TWO_RABI_FACTOR };
        let cal = calibrate_pi(&shape, factor).unwrap();
        prop_assert!((pulse_area(&cal, factor) - PI).abs() < 1e-12);
        prop_assert!(cal.evaluate(center) >= 0.0);
    }

    #[test]
    fn mixing_angle_is_monotone(tau in 0.2..20.0f64, ratio in 0.05..3.0f64, g in 0.1..3.0f64) {
        let s = stirap_schedule(g, tau, ratio * tau, 0.0).unwrap();
        let (lo, hi) = (s.cavity_two.support().0 - tau, s.cavity_one.support().1 + tau);
        let mut last = 0.0;
        for k in 0..=2000 {
            let t = lo + (hi - lo) * k as f64 / 2000.0;
            let theta = mixing_angle_at(&s.cavity_one, &s.cavity_two, t);
            prop_assert!(theta >= last - 1e-12, "t = {}", t);
            prop_assert!((0.0..=FRAC_PI_2 + 1e-15).contains(&theta));
            last = theta;
        }
    }

    #[test]
    fn gaussian_is_continuous(tau in 0.1..5.0f64, t in -15.0..15.0f64) {
        let g = PulseSchedule::gaussian(1.0, 0.0, tau).with_cutoff(f64::INFINITY);
        let h = 1e-9;
        prop_assert!((g.evaluate(t + h) - g.evaluate(t)).abs() < 2.0 * h / tau);
    }
}
