use alloc::vec::Vec;

use crate::dissipative::EnsembleResult;
use crate::linalg::hermitian_eigenvalues;
use crate::statespace::{Atom, Basis, BasisState};
use crate::{CavitySystem, DensityMatrix, Error, Result, StateVector, C64};

/// 4x4 matrix on cavity-1 polarization (x) cavity-2 polarization, basis order
/// `(++, +-, -+, --)`.
pub type TwoQubit = [[C64; 4]; 4];

/// Both couplings must be below this fraction of `g` at the read-out time.
pub const COUPLING_OFF_TOLERANCE: f64 = 1e-6;

const ZERO: C64 = C64::new(0.0, 0.0);

/// Post-selected two-photon polarization state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarizationState {
    pub rho: TwoQubit,
    /// Probability of a coincidence, including the detector efficiency.
    pub p_coinc: f64,
}

impl PolarizationState {
    /// Normalizes `rho` to unit trace; `p_coinc` is set to one.
    pub fn from_matrix(rho: TwoQubit) -> Result<Self> {
        let tr: f64 = (0..4).map(|i| rho[i][i].re).sum();
        if !(tr > 0.0) {
            return Err(Error::InvalidDensityMatrix("trace is not positive"));
        }
        let mut out = rho;
        for row in &mut out {
            for z in row.iter_mut() {
                *z /= tr;
            }
        }
        Ok(Self { rho: out, p_coinc: 1.0 })
    }

    pub fn pure(amplitudes: [C64; 4]) -> Result<Self> {
        Self::from_matrix(outer(&amplitudes))
    }

    /// `(|+-> + |-+>) / sqrt 2`, the image of `|E+>`.
    pub fn psi_plus() -> Self {
        let h = C64::new(core::f64::consts::FRAC_1_SQRT_2, 0.0);
        Self::pure([ZERO, h, h, ZERO]).expect("unit vector")
    }

    /// Equal mixture of `|+->` and `|-+>`.
    pub fn anticorrelated_mixture() -> Self {
        let mut rho = [[ZERO; 4]; 4];
        rho[1][1] = C64::new(0.5, 0.0);
        rho[2][2] = C64::new(0.5, 0.0);
        Self { rho, p_coinc: 1.0 }
    }

    pub fn maximally_mixed() -> Self {
        let mut rho = [[ZERO; 4]; 4];
        for (i, row) in rho.iter_mut().enumerate() {
            row[i] = C64::new(0.25, 0.0);
        }
        Self { rho, p_coinc: 1.0 }
    }

    pub fn trace(&self) -> f64 {
        (0..4).map(|i| self.rho[i][i].re).sum()
    }

    /// Hermitian to 1e-10, unit trace to 1e-8, eigenvalues above -1e-8.
    pub fn validate(&self) -> Result<()> {
        for i in 0..4 {
            for j in 0..4 {
                if (self.rho[i][j] - self.rho[j][i].conj()).norm() > 1e-10 {
                    return Err(Error::InvalidDensityMatrix("not hermitian"));
                }
            }
        }
        if (self.trace() - 1.0).abs() > 1e-8 {
            return Err(Error::InvalidDensityMatrix("trace is not one"));
        }
        if self.eigenvalues().last().is_some_and(|&e| e < -1e-8) {
            return Err(Error::InvalidDensityMatrix("negative eigenvalue"));
        }
        Ok(())
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        let flat: Vec<C64> = self.rho.iter().flatten().copied().collect();
        hermitian_eigenvalues(4, &flat)
    }

    /// `<Psi+|rho|Psi+>`.
    pub fn bell_fidelity(&self) -> f64 {
        0.5 * (self.rho[1][1] + self.rho[2][2] + self.rho[1][2] + self.rho[2][1]).re
    }

    /// Population outside `span{|+->, |-+>}`.
    pub fn correlated_weight(&self) -> f64 {
        self.rho[0][0].re + self.rho[3][3].re
    }
}

fn outer(v: &[C64; 4]) -> TwoQubit {
    let mut m = [[ZERO; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            m[i][j] = v[i] * v[j].conj();
        }
    }
    m
}

/// Basis positions of `|c; one photon in each cavity>` in `(++, +-, -+, --)` order.
fn pair_indices(basis: &Basis) -> [usize; 4] {
    let state = |p1: bool, p2: bool| {
        let mut occ = [0; 4];
        occ[if p1 { 0 } else { 1 }] = 1;
        occ[if p2 { 2 } else { 3 }] = 1;
        basis.index_of(&BasisState::new(Atom::C, occ)).expect("two-excitation basis")
    };
    [state(true, true), state(true, false), state(false, true), state(false, false)]
}

fn check_read_out_time(system: &CavitySystem, t_f: f64) -> Result<()> {
    let (g1, g2) = system.params().couplings_at(t_f);
    let limit = COUPLING_OFF_TOLERANCE * system.params().g;
    if g1 > limit || g2 > limit {
        return Err(Error::CouplingsActive { time: t_f, g1, g2 });
    }
    Ok(())
}

fn finish(acc: TwoQubit, weight: f64, eta: f64) -> Result<PolarizationState> {
    if !(weight >= 1e-12) {
        return Err(Error::NoCoincidenceSupport { weight });
    }
    let mut rho = acc;
    for row in &mut rho {
        for z in row.iter_mut() {
            *z /= weight;
        }
    }
    Ok(PolarizationState { rho, p_coinc: eta * eta * weight })
}

fn project(system: &CavitySystem, psi: &StateVector) -> [C64; 4] {
    pair_indices(system.basis()).map(|k| psi.amplitudes()[k])
}

/// Projection of a single (unnormalized) state at `t_f` onto one photon per
/// cavity; the weight is the squared norm of the projection.
pub fn postselect_state(system: &CavitySystem, psi: &StateVector, t_f: f64) -> Result<PolarizationState> {
    check_read_out_time(system, t_f)?;
    let v = project(system, psi);
    let weight = v.iter().map(|z| z.norm_sqr()).sum();
    finish(outer(&v), weight, system.params().eta)
}

/// `P rho P` restricted to the one-photon-per-cavity subspace. Jumps lower
/// the excitation number, so this block only holds jump-free histories.
pub fn postselect_density(system: &CavitySystem, rho: &DensityMatrix, t_f: f64) -> Result<PolarizationState> {
    check_read_out_time(system, t_f)?;
    let idx = pair_indices(system.basis());
    let mut acc = [[ZERO; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            acc[i][j] = rho.get(idx[i], idx[j]);
        }
    }
    let weight = (0..4).map(|i| acc[i][i].re).sum();
    finish(acc, weight, system.params().eta)
}

/// Coincidence post-selection over an ensemble read out at its last grid
/// time: trajectories with any jump are discarded, the others contribute
/// their projected final states.
pub fn postselect_ensemble(system: &CavitySystem, ensemble: &EnsembleResult) -> Result<PolarizationState> {
    let t_f = *ensemble.times.last().ok_or(Error::EmptyGrid)?;
    check_read_out_time(system, t_f)?;
    let mut acc = [[ZERO; 4]; 4];
    let mut weight = 0.0;
    for tr in ensemble.trajectories.iter().filter(|t| t.jumps.is_empty()) {
        let v = project(system, &tr.final_state);
        let o = outer(&v);
        for i in 0..4 {
            for j in 0..4 {
                acc[i][j] += o[i][j];
            }
        }
        weight += v.iter().map(|z| z.norm_sqr()).sum::<f64>();
    }
    let n = ensemble.n_traj as f64;
    for row in &mut acc {
        for z in row.iter_mut() {
            *z /= n;
        }
    }
    finish(acc, weight / n, system.params().eta)
}
