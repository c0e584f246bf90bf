//! Closed-system propagation and closed-form references.

use alloc::vec::Vec;
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use crate::analysis::{manifold_populations, ManifoldPopulations};
use crate::integrate::Rk4;
use crate::statespace::ManifoldBasis;
use crate::system::PureFlow;
use crate::{CavitySystem, Error, Result, StateVector, Timeline, C64};

/// Snapshots of a pure-state evolution on an output grid.
///
/// `states` are not renormalized. For the no-jump evolution under the
/// non-hermitian Hamiltonian their squared norm is the no-jump probability
/// and the populations are the unconditional two-excitation populations.
#[derive(Debug, Clone, PartialEq)]
pub struct CoherentTrajectory {
    pub times: Vec<f64>,
    pub states: Vec<StateVector>,
    pub populations: Vec<ManifoldPopulations>,
    pub norms: Vec<f64>,
}

impl CoherentTrajectory {
    pub fn final_state(&self) -> &StateVector {
        self.states.last().expect("a trajectory has at least two samples")
    }

    pub fn e_plus(&self) -> Vec<f64> {
        self.populations.iter().map(|p| p.e_plus).collect()
    }
}

/// Solves `i d psi/dt = H(t) psi` from `timeline.start`.
pub fn evolve(system: &CavitySystem, psi0: &StateVector, timeline: &Timeline) -> Result<CoherentTrajectory> {
    propagate(system, psi0, timeline, false)
}

/// Solves `i d psi/dt = H'(t) psi`, the evolution conditioned on no jump.
pub fn evolve_no_jump(system: &CavitySystem, psi0: &StateVector, timeline: &Timeline) -> Result<CoherentTrajectory> {
    propagate(system, psi0, timeline, true)
}

fn propagate(
    system: &CavitySystem,
    psi0: &StateVector,
    timeline: &Timeline,
    damped: bool,
) -> Result<CoherentTrajectory> {
    system.check_state(psi0)?;
    timeline.validate()?;
    let dt = system.step_for(timeline);
    let mut rk = Rk4::new(system.dim());
    let flow = PureFlow::new(system, damped);
    let mut y: Vec<C64> = psi0.amplitudes().to_vec();
    let mut out = CoherentTrajectory {
        times: timeline.grid(),
        states: Vec::with_capacity(timeline.points),
        populations: Vec::with_capacity(timeline.points),
        norms: Vec::with_capacity(timeline.points),
    };
    for k in 0..timeline.points {
        if k > 0 {
            let (t0, t1) = (timeline.time(k - 1), timeline.time(k));
            rk.advance_through(&flow, t0, t1, dt, system.breakpoints(), &mut y);
        }
        let psi = StateVector::from_amplitudes(y.clone());
        let norm = psi.norm_sqr();
        if !norm.is_finite() {
            return Err(Error::Numerical { time: timeline.time(k), reason: "state norm is not finite" });
        }
        out.populations.push(manifold_populations(&psi, system.manifold()));
        out.norms.push(norm);
        out.states.push(psi);
    }
    Ok(out)
}

/// Closed-form `|c_B|^2` and `|c_I|^2` for constant `g1`, `g2 = 0` and
/// `Delta+ = Delta- = Delta`, starting in `|I>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RabiPopulations {
    pub bright: f64,
    pub initial: f64,
}

/// Generalized Rabi frequency `sqrt(8 g1^2 + Delta^2)`.
pub fn generalized_rabi_frequency(g1: f64, delta: f64) -> f64 {
    (8.0 * g1 * g1 + delta * delta).sqrt()
}

pub fn rabi_oracle(g1: f64, delta: f64, t: f64) -> RabiPopulations {
    let omega = generalized_rabi_frequency(g1, delta);
    if omega == 0.0 {
        return RabiPopulations { bright: 0.0, initial: 1.0 };
    }
    let s = (0.5 * omega * t).sin();
    let bright = 8.0 * g1 * g1 / (omega * omega) * s * s;
    RabiPopulations { bright, initial: 1.0 - bright }
}

/// `cos(theta) |I> - sin(theta) |E+>`.
pub fn dark_state(theta: f64, manifold: &ManifoldBasis) -> StateVector {
    let mut v = manifold.initial.clone();
    v.scale(C64::new(theta.cos(), 0.0));
    v.add_scaled(C64::new(-theta.sin(), 0.0), &manifold.e_plus);
    v.normalized()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdiabaticityReport {
    pub max_bright: f64,
    pub max_dark: f64,
    pub final_e_plus: f64,
}

pub fn adiabaticity_report(trajectory: &CoherentTrajectory) -> AdiabaticityReport {
    let max_of = |f: fn(&ManifoldPopulations) -> f64| trajectory.populations.iter().map(f).fold(0.0, f64::max);
    AdiabaticityReport {
        max_bright: max_of(|p| p.bright),
        max_dark: max_of(|p| p.dark),
        final_e_plus: trajectory.populations.last().map_or(0.0, |p| p.e_plus),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pulses::PulseSchedule;
    use crate::statespace::SystemParams;
    use approx::assert_abs_diff_eq;
    use core::f64::consts::{FRAC_PI_2, FRAC_PI_4, SQRT_2};

    #[test]
    fn rabi_oracle_limits() {
        let g1 = 0.8;
        let full = rabi_oracle(g1, 0.0, core::f64::consts::PI / (2.0 * SQRT_2 * g1));
        assert_abs_diff_eq!(full.bright, 1.0, epsilon = 1e-15);
        assert_eq!(rabi_oracle(g1, 0.3, 0.0).initial, 1.0);
        // Delta = 2 sqrt 2 g1: the peak transfer is one half.
        let delta = 2.0 * SQRT_2 * g1;
        let omega = generalized_rabi_frequency(g1, delta);
        let peak = rabi_oracle(g1, delta, core::f64::consts::PI / omega);
        assert_abs_diff_eq!(peak.bright, 0.5, epsilon = 1e-15);
    }

    #[test]
    fn dark_state_angles() {
        let sys = CavitySystem::new(SystemParams::new(PulseSchedule::off(), PulseSchedule::off())).unwrap();
        let m = sys.manifold();
        assert_eq!(dark_state(0.0, m), m.initial);
        let end = dark_state(FRAC_PI_2, m);
        assert_abs_diff_eq!(end.inner(&m.e_plus).re, -1.0, epsilon = 1e-15);
        let p = manifold_populations(&dark_state(FRAC_PI_4, m), m);
        assert_abs_diff_eq!(p.initial, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(p.e_plus, 0.5, epsilon = 1e-15);
    }

    #[test]
    fn null_hamiltonian_leaves_state_fixed() {
        let sys = CavitySystem::new(SystemParams::new(PulseSchedule::off(), PulseSchedule::off())).unwrap();
        let psi0 = sys.initial_state();
        let tr = evolve(&sys, &psi0, &Timeline::new(0.0, 5.0, 11)).unwrap();
        for s in &tr.states {
            assert_eq!(s, &psi0);
        }
    }
}
