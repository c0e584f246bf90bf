//! Analytic-oracle self-tests behind `cqed-pairs check`.

use std::f64::consts::SQRT_2;

use cqed_pairs_core::analysis::{chsh_fixed, fidelity, AnalyzerAngles, PolarizationState};
use cqed_pairs_core::coherent::{adiabaticity_report, evolve, generalized_rabi_frequency, rabi_oracle};
use cqed_pairs_core::dissipative::run_ensemble;
use cqed_pairs_core::pulses::{sequential_pi_schedule, stirap_schedule, PulseSchedule, PulseShape};
use cqed_pairs_core::statespace::{
    excitation_number, hamiltonian, manifold_basis, Atom, Basis, BasisState, CouplingModel, SystemParams,
};
use cqed_pairs_core::{CavitySystem, StateVector, Timeline};

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &'static str, passed: bool, detail: String) -> Self {
        Self { name, passed, detail }
    }

    fn failed(name: &'static str, e: impl std::fmt::Display) -> Self {
        Self::new(name, false, format!("error: {e}"))
    }
}

/// Largest deviation of the integrated `P_I`, `P_B` from the closed-form
/// two-level solution over `[0, 4 pi / Omega]`.
pub fn rabi_error(ratio: f64) -> Result<f64, cqed_pairs_core::Error> {
    let g1 = 0.8;
    let delta = ratio * g1;
    let omega = generalized_rabi_frequency(g1, delta);
    let t_end = 4.0 * std::f64::consts::PI / omega;
    let p = SystemParams::new(PulseSchedule::square(g1, 0.0, 10.0 * t_end), PulseSchedule::off())
        .with_detunings(delta, delta);
    let sys = CavitySystem::new(p)?;
    let tl = Timeline::new(0.0, t_end, 801).with_dt_max(1.0 / (200.0 * omega));
    let tr = evolve(&sys, &sys.initial_state(), &tl)?;
    let mut worst: f64 = 0.0;
    for (t, pop) in tr.times.iter().zip(&tr.populations) {
        let want = rabi_oracle(g1, delta, *t);
        worst = worst.max((pop.bright - want.bright).abs()).max((pop.initial - want.initial).abs());
    }
    Ok(worst)
}

pub fn rabi_oracle_check() -> Check {
    let name = "Rabi oracle, Delta/g1 in {0, 1, 2 sqrt 2, 5}";
    let mut worst: f64 = 0.0;
    for ratio in [0.0, 1.0, 2.0 * SQRT_2, 5.0] {
        match rabi_error(ratio) {
            Ok(e) => worst = worst.max(e),
            Err(e) => return Check::failed(name, e),
        }
    }
    Check::new(name, worst < 1e-8, format!("max error {worst:.3e} (bound 1e-8)"))
}

pub fn chsh_anchor_check() -> Check {
    let bell = chsh_fixed(&PolarizationState::psi_plus(), AnalyzerAngles::STANDARD);
    let mix = chsh_fixed(&PolarizationState::anticorrelated_mixture(), AnalyzerAngles::STANDARD);
    let name = "CHSH anchors";
    match (bell, mix) {
        (Ok(b), Ok(m)) => {
            let (db, dm) = ((b - 2.0 * SQRT_2).abs(), (m - SQRT_2).abs());
            Check::new(name, db <= 1e-9 && dm <= 1e-9, format!("S(Psi+) = {b:.12}, S(mixture) = {m:.12}"))
        }
        (Err(e), _) | (_, Err(e)) => Check::failed(name, e),
    }
}

/// Hermiticity, excitation conservation, chain structure and manifold
/// orthonormality over a fixed parameter grid; returns the largest defect.
pub fn structural_defect() -> Result<f64, cqed_pairs_core::Error> {
    let mut worst: f64 = 0.0;
    let b = Basis::build(2);
    let m = manifold_basis(&b)?;
    let n_op = excitation_number(&b);
    let overlaps = m.overlap_matrix();
    for (i, row) in overlaps.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            let want = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((v.re - want).abs()).max(v.im.abs());
        }
    }
    let levels = [-1.1, 0.0, 0.6];
    let allowed = [(0, 1), (1, 3), (2, 4)];
    for model in [CouplingModel::Confined, CouplingModel::Full] {
        for g1 in [0.0, 0.37, 1.3] {
            for g2 in [0.0, 0.8, 1.7] {
                for dp in levels {
                    for dm in levels {
                        let p =
                            SystemParams::new(PulseSchedule::square(g1, 0.0, 1.0), PulseSchedule::square(g2, 0.0, 1.0))
                                .with_detunings(dp, dm)
                                .with_coupling(model);
                        let h = hamiltonian(&b, &p, 0.0);
                        worst = worst.max(h.hermiticity_defect());
                        worst = worst.max(h.commutator(&n_op)?.max_abs());
                        if dp != dm {
                            continue;
                        }
                        let v = m.vectors();
                        for i in 0..5 {
                            for j in 0..5 {
                                if i != j && !allowed.contains(&(i, j)) && !allowed.contains(&(j, i)) {
                                    worst = worst.max(h.matrix_element(v[i], v[j]).norm());
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(worst)
}

pub fn structural_check() -> Check {
    let name = "Structural identities";
    match structural_defect() {
        Ok(d) => Check::new(name, d < 1e-12, format!("max defect {d:.3e} (bound 1e-12)")),
        Err(e) => Check::failed(name, e),
    }
}

pub fn lossless_ro_check() -> Check {
    let name = "Lossless RO sequence";
    let run = || -> Result<(f64, f64), cqed_pairs_core::Error> {
        let mut worst_f: f64 = 0.0;
        let mut worst_final: f64 = 0.0;
        for shape in [PulseShape::Square, PulseShape::Gaussian] {
            let (a, b) = sequential_pi_schedule(shape, 0.6, 0.0, 0.0)?;
            let p = SystemParams::new(a, b);
            let sys = CavitySystem::new(p)?;
            let tr = evolve(&sys, &sys.initial_state(), &Timeline::covering(&p, 1000))?;
            let f = fidelity(&tr.times, &tr.e_plus())?;
            let last = tr.populations.last().expect("grid has samples");
            worst_f = worst_f.max((1.0 - f.value).abs());
            worst_final = worst_final.max((1.0 - last.e_plus).abs());
        }
        Ok((worst_f, worst_final))
    };
    match run() {
        Ok((df, dl)) => {
            Check::new(name, df <= 1e-6 && dl <= 1e-6, format!("|1 - F| = {df:.3e}, |1 - P_E+(t_end)| = {dl:.3e}"))
        }
        Err(e) => Check::failed(name, e),
    }
}

pub fn lossless_stirap_check() -> Check {
    let name = "Lossless STIRAP, tau g = 20, delay = tau";
    let run = || -> Result<(f64, f64), cqed_pairs_core::Error> {
        let s = stirap_schedule(1.0, 20.0, 20.0, 0.0)?;
        let p = SystemParams::new(s.cavity_one, s.cavity_two);
        let sys = CavitySystem::new(p)?;
        let tr = evolve(&sys, &sys.initial_state(), &Timeline::covering(&p, 1000))?;
        let f = fidelity(&tr.times, &tr.e_plus())?;
        Ok((f.value, adiabaticity_report(&tr).max_bright))
    };
    match run() {
        Ok((f, b)) => Check::new(name, f >= 0.999 && b <= 0.01, format!("F = {f:.6}, max P_B = {b:.3e}")),
        Err(e) => Check::failed(name, e),
    }
}

/// Largest `P_D + P_E-` over closed runs at two-photon resonance.
pub fn decoupling_leak() -> Result<f64, cqed_pairs_core::Error> {
    let mut worst: f64 = 0.0;
    let (ra, rb) = sequential_pi_schedule(PulseShape::Gaussian, 0.6, 0.0, 0.0)?;
    let (sa, sb) = sequential_pi_schedule(PulseShape::Square, 0.9, 0.5, 0.0)?;
    let st = stirap_schedule(1.0, 3.0, 3.0, 0.0)?;
    let st2 = stirap_schedule(0.7, 6.0, 4.0, 0.0)?;
    let pairs = [(ra, rb), (sa, sb), (st.cavity_one, st.cavity_two), (st2.cavity_one, st2.cavity_two)];
    for (a, b) in pairs {
        for delta in [0.0, 0.35, -0.8] {
            for model in [CouplingModel::Confined, CouplingModel::Full] {
                let p = SystemParams::new(a, b).with_detunings(delta, delta).with_coupling(model);
                let sys = CavitySystem::new(p)?;
                let tr = evolve(&sys, &sys.initial_state(), &Timeline::covering(&p, 300))?;
                for pop in &tr.populations {
                    worst = worst.max(pop.dark + pop.e_minus);
                }
            }
        }
    }
    Ok(worst)
}

pub fn decoupling_check() -> Check {
    let name = "Dark and E- decoupling";
    match decoupling_leak() {
        Ok(w) => Check::new(name, w < 1e-10, format!("max P_D + P_E- = {w:.3e} (bound 1e-10)")),
        Err(e) => Check::failed(name, e),
    }
}

/// Worst deviation of the empirical jump-time CDF of a lone cavity photon
/// from `1 - exp(-kappa t)`, in units of the binomial sigma.
pub fn jump_cdf_sigmas(n_traj: usize, seed: u64) -> Result<f64, cqed_pairs_core::Error> {
    let kappa = 0.8;
    let p = SystemParams::new(PulseSchedule::off(), PulseSchedule::off()).with_decay(0.0, kappa);
    let sys = CavitySystem::new(p)?;
    let idx = sys.basis().index_of(&BasisState::new(Atom::C, [0, 0, 1, 0])).expect("state in basis");
    let photon = StateVector::basis(sys.dim(), idx);
    let tl = Timeline::new(0.0, 5.0 / kappa, 101);
    let ens = run_ensemble(&sys, &photon, &tl, n_traj, seed)?;
    let times: Vec<f64> = ens.trajectories.iter().filter_map(|t| t.jumps.first().map(|j| j.time)).collect();
    let n = n_traj as f64;
    let mut worst: f64 = 0.0;
    for k in 1..=40 {
        let t = tl.end * k as f64 / 40.0;
        let p = 1.0 - (-kappa * t).exp();
        let empirical = times.iter().filter(|&&x| x <= t).count() as f64 / n;
        let sigma = (p * (1.0 - p) / n).sqrt();
        worst = worst.max((empirical - p).abs() / sigma);
    }
    Ok(worst)
}

pub fn jump_statistics_check() -> Check {
    let name = "Exponential jump-time CDF, 10^4 trajectories";
    match jump_cdf_sigmas(10_000, 2024) {
        Ok(s) => Check::new(name, s <= 3.0, format!("worst deviation {s:.2} sigma (bound 3)")),
        Err(e) => Check::failed(name, e),
    }
}

pub fn all() -> Vec<Check> {
    vec![
        rabi_oracle_check(),
        chsh_anchor_check(),
        structural_check(),
        lossless_ro_check(),
        lossless_stirap_check(),
        decoupling_check(),
        jump_statistics_check(),
    ]
}
