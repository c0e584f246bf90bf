use approx::assert_abs_diff_eq;
use cqed_pairs_core::coherent::evolve;
use cqed_pairs_core::dissipative::*;
use cqed_pairs_core::pulses::*;
use cqed_pairs_core::statespace::*;
use cqed_pairs_core::*;

fn fig3b() -> SystemParams {
    let s = stirap_schedule(1.0, 3.0, 3.0, 0.0).unwrap();
    SystemParams::new(s.cavity_one, s.cavity_two).with_decay(0.05, 0.005)
}

/// Idle couplings, decay only.
fn idle(gamma: f64, kappa: f64) -> SystemParams {
    SystemParams::new(PulseSchedule::off(), PulseSchedule::off()).with_decay(gamma, kappa)
}

fn ket(sys: &CavitySystem, atom: Atom, occ: [u32; 4]) -> StateVector {
    let b = sys.basis();
    StateVector::basis(b.dim(), b.index_of(&BasisState::new(atom, occ)).unwrap())
}

fn photon_number(sys: &CavitySystem, rho: &DensityMatrix) -> f64 {
    rho.diagonal().iter().enumerate().map(|(i, p)| p * f64::from(sys.basis().state(i).photons())).sum()
}

#[test]
fn effective_hamiltonian_damping() {
    let (gamma, kappa) = (0.3, 0.07);
    let p = fig3b().with_decay(gamma, kappa);
    let b = Basis::build(2);
    let m = manifold_basis(&b).unwrap();
    let h = effective_hamiltonian(&b, &p, 0.4);
    assert_abs_diff_eq!(h.matrix_element(&m.bright, &m.bright).im, -(gamma + kappa) / 2.0, epsilon = 1e-15);
    assert_abs_diff_eq!(h.matrix_element(&m.initial, &m.initial).im, -kappa, epsilon = 1e-15);
    let vac = StateVector::basis(b.dim(), 0);
    assert_eq!(h.matrix_element(&vac, &vac), C64::new(0.0, 0.0));
    // The hermitian part is the Hamiltonian itself.
    let herm = hamiltonian(&b, &p, 0.4);
    for (r, c, v) in h.entries() {
        assert_abs_diff_eq!(v.re, herm.get(r, c).re, epsilon = 1e-15);
    }
}

#[test]
fn closed_system_trajectory_matches_coherent() {
    let p = fig3b().with_decay(0.0, 0.0);
    let sys = CavitySystem::new(p).unwrap();
    let tl = Timeline::covering(&p, 150);
    let tr = run_trajectory(&sys, &sys.initial_state(), &tl, 99).unwrap();
    assert!(tr.jumps.is_empty());
    let co = evolve(&sys, &sys.initial_state(), &tl).unwrap();
    for (a, b) in tr.populations.iter().zip(&co.populations) {
        for (x, y) in a.as_array().iter().zip(b.as_array()) {
            assert!((x - y).abs() < 1e-8);
        }
    }
    let ens = run_ensemble(&sys, &sys.initial_state(), &tl, 40, 3).unwrap();
    assert_eq!(ens.jump_free_fraction(), 1.0);
    for (a, b) in ens.populations.iter().zip(&co.populations) {
        for (x, y) in a.as_array().iter().zip(b.as_array()) {
            assert!((x - y).abs() < 1e-8);
        }
    }
}

#[test]
fn vacuum_never_jumps() {
    let sys = CavitySystem::new(idle(0.4, 0.9)).unwrap();
    let vac = StateVector::basis(sys.dim(), 0);
    let tl = Timeline::new(0.0, 10.0, 50);
    for seed in 0..20 {
        let tr = run_trajectory(&sys, &vac, &tl, seed).unwrap();
        assert!(tr.jumps.is_empty());
        assert_eq!(tr.final_state, vac);
        assert!(tr.norms.iter().all(|&n| n == 1.0));
    }
}

#[test]
fn single_photon_jump_times_are_exponential() {
    let kappa = 0.8;
    let sys = CavitySystem::new(idle(0.0, kappa)).unwrap();
    let photon = ket(&sys, Atom::C, [0, 0, 1, 0]);
    let tl = Timeline::new(0.0, 5.0 / kappa, 101);
    let n = 10_000;
    let ens = run_ensemble(&sys, &photon, &tl, n, 2024).unwrap();
    let mut times: Vec<f64> = Vec::new();
    for tr in &ens.trajectories {
        assert!(tr.jumps.len() <= 1);
        if let Some(j) = tr.jumps.first() {
            assert_eq!(j.channel, JumpChannel::CavityTwoPlus);
            times.push(j.time);
        }
    }
    for k in 1..=40 {
        let t = tl.end * k as f64 / 40.0;
        let p = 1.0 - (-kappa * t).exp();
        let empirical = times.iter().filter(|&&x| x <= t).count() as f64 / n as f64;
        let sigma = (p * (1.0 - p) / n as f64).sqrt();
        assert!((empirical - p).abs() <= 3.0 * sigma, "t = {t}: {empirical} vs {p} (3 sigma = {})", 3.0 * sigma);
    }
}

#[test]
fn one_trajectory_ensemble_is_the_trajectory() {
    let p = fig3b();
    let sys = CavitySystem::new(p).unwrap();
    let tl = Timeline::covering(&p, 80);
    for master in [0u64, 17, u64::MAX] {
        let ens = run_ensemble(&sys, &sys.initial_state(), &tl, 1, master).unwrap();
        let tr = run_trajectory(&sys, &sys.initial_state(), &tl, trajectory_seed(master, 0)).unwrap();
        assert_eq!(ens.seeds(), vec![tr.seed]);
        assert_eq!(ens.populations, tr.populations);
        assert_eq!(ens.trajectories[0].jumps, tr.jumps);
    }
}

#[test]
fn zero_trajectories_is_an_error() {
    let p = fig3b();
    let sys = CavitySystem::new(p).unwrap();
    assert!(run_ensemble(&sys, &sys.initial_state(), &Timeline::covering(&p, 10), 0, 1).is_err());
}

#[test]
fn chunk_order_does_not_matter() {
    let p = fig3b().with_decay(0.3, 0.1);
    let sys = CavitySystem::new(p).unwrap();
    let tl = Timeline::covering(&p, 60);
    let psi0 = sys.initial_state();
    let n = 300;
    let reference = run_ensemble(&sys, &psi0, &tl, n, 5).unwrap();
    let path = NoJumpPath::new(&sys, &psi0, &tl).unwrap();
    let mut chunks: Vec<_> = chunk_ranges(n).into_iter().map(|r| run_chunk(&path, 5, r).unwrap()).collect();
    chunks.reverse();
    chunks.swap(0, 2);
    let shuffled = assemble_ensemble(chunks, &tl, 5).unwrap();
    assert_eq!(reference, shuffled);
    assert_eq!(reference, run_ensemble(&sys, &psi0, &tl, n, 5).unwrap());
    assert_ne!(reference.populations, run_ensemble(&sys, &psi0, &tl, n, 6).unwrap().populations);
}

#[test]
fn missing_chunk_is_rejected() {
    let p = fig3b();
    let sys = CavitySystem::new(p).unwrap();
    let tl = Timeline::covering(&p, 20);
    let path = NoJumpPath::new(&sys, &sys.initial_state(), &tl).unwrap();
    let chunks = vec![run_chunk(&path, 1, 0..64).unwrap(), run_chunk(&path, 1, 128..130).unwrap()];
    assert!(assemble_ensemble(chunks, &tl, 1).is_err());
}

#[test]
fn jump_records_are_consistent() {
    let p = fig3b().with_decay(0.4, 0.3);
    let sys = CavitySystem::new(p).unwrap();
    let tl = Timeline::covering(&p, 100);
    for seed in 0..200 {
        let tr = run_trajectory(&sys, &sys.initial_state(), &tl, seed).unwrap();
        assert!(tr.jumps.len() <= 2);
        assert!(tr.jumps.windows(2).all(|w| w[0].time < w[1].time));
        let mut last = f64::INFINITY;
        let mut next_jump = 0;
        for (t, n) in tr.times.iter().zip(&tr.norms) {
            if next_jump < tr.jumps.len() && tr.jumps[next_jump].time <= *t {
                last = f64::INFINITY;
                next_jump += 1;
                while next_jump < tr.jumps.len() && tr.jumps[next_jump].time <= *t {
                    next_jump += 1;
                }
            }
            assert!(*n <= last * (1.0 + 1e-10));
            last = *n;
        }
    }
}

#[test]
fn lindblad_closed_limit_matches_coherent() {
    let p = fig3b().with_decay(0.0, 0.0);
    let sys = CavitySystem::new(p).unwrap();
    let tl = Timeline::covering(&p, 60);
    let lin = lindblad_evolve(&sys, &DensityMatrix::from_pure(&sys.initial_state()), &tl).unwrap();
    let co = evolve(&sys, &sys.initial_state(), &tl).unwrap();
    for (a, b) in lin.populations.iter().zip(&co.populations) {
        for (x, y) in a.as_array().iter().zip(b.as_array()) {
            assert!((x - y).abs() < 1e-8);
        }
    }
}

#[test]
fn lindblad_photon_decay() {
    let kappa = 0.6;
    let sys = CavitySystem::new(idle(0.2, kappa)).unwrap();
    let rho0 = DensityMatrix::from_pure(&ket(&sys, Atom::C, [0, 1, 0, 0]));
    let tl = Timeline::new(0.0, 6.0, 61);
    let lin = lindblad_evolve(&sys, &rho0, &tl).unwrap();
    for (t, rho) in lin.times.iter().zip(&lin.states) {
        assert_abs_diff_eq!(photon_number(&sys, rho), (-kappa * t).exp(), epsilon = 1e-8);
        assert_abs_diff_eq!(rho.trace(), 1.0, epsilon = 1e-8);
    }
}

#[test]
fn lindblad_keeps_a_valid_density_matrix() {
    let p = fig3b().with_decay(0.3, 0.2).with_detunings(0.2, -0.1);
    let sys = CavitySystem::new(p).unwrap();
    let lin =
        lindblad_evolve(&sys, &DensityMatrix::from_pure(&sys.initial_state()), &Timeline::covering(&p, 40)).unwrap();
    for rho in &lin.states {
        assert!((rho.trace() - 1.0).abs() < 1e-8);
        assert!(rho.hermiticity_defect() < 1e-10);
        assert!(rho.eigenvalues().iter().all(|&e| e >= -1e-8));
    }
}

#[test]
fn ensemble_matches_master_equation() {
    let p = fig3b();
    let sys = CavitySystem::new(p).unwrap();
    let tl = Timeline::covering(&p, 200);
    let n = 10_000;
    let ens = run_ensemble(&sys, &sys.initial_state(), &tl, n, 11).unwrap();
    let lin = lindblad_evolve(&sys, &DensityMatrix::from_pure(&sys.initial_state()), &tl).unwrap();
    let tol = 0.02f64.max(4.0 / (n as f64).sqrt());
    for (a, b) in ens.populations.iter().zip(&lin.populations) {
        for (x, y) in a.as_array().iter().zip(b.as_array()) {
            assert!((x - y).abs() <= tol);
            assert!((0.0..=1.0).contains(x));
        }
        assert!(a.total() <= 1.0 + tol);
    }
}

#[test]
fn atomic_jump_count_follows_excited_population() {
    // Expected number of spontaneous emissions: Gamma times the time
    // integral of the excited-state population of the master equation.
    let p = fig3b().with_decay(0.2, 0.05);
    let sys = CavitySystem::new(p).unwrap();
    let tl = Timeline::covering(&p, 400);
    let lin = lindblad_evolve(&sys, &DensityMatrix::from_pure(&sys.initial_state()), &tl).unwrap();
    let excited: Vec<f64> = lin
        .states
        .iter()
        .map(|rho| {
            rho.diagonal()
                .iter()
                .enumerate()
                .filter(|(i, _)| sys.basis().state(*i).atom != Atom::C)
                .map(|(_, p)| p)
                .sum()
        })
        .collect();
    let h = tl.interval();
    let integral: f64 = excited.windows(2).map(|w| 0.5 * (w[0] + w[1]) * h).sum();
    let expected = p.gamma * integral;

    let n = 10_000;
    let ens = run_ensemble(&sys, &sys.initial_state(), &tl, n, 77).unwrap();
    let counts: Vec<f64> =
        ens.trajectories.iter().map(|t| t.jumps.iter().filter(|j| j.channel.is_atomic()).count() as f64).collect();
    let mean = counts.iter().sum::<f64>() / n as f64;
    let var = counts.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    let sigma = (var / n as f64).sqrt();
    assert!((mean - expected).abs() <= 3.0 * sigma, "{mean} vs {expected} (sigma {sigma})");
}
