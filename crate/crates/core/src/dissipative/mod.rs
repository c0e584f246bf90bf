//! Open-system dynamics: the non-hermitian effective Hamiltonian, quantum
//! jump trajectories, ensembles and a master-equation integrator.

mod ensemble;
mod lindblad;
mod trajectory;

use alloc::vec::Vec;
use core::fmt;

pub use ensemble::{
    assemble_ensemble, chunk_ranges, run_chunk, run_ensemble, trajectory_seed, EnsembleChunk, EnsembleResult,
    TrajectorySummary, ENSEMBLE_CHUNK,
};
pub use lindblad::{lindblad_evolve, LindbladSeries};
pub use trajectory::{run_trajectory, NoJumpPath, TrajectoryResult};

use crate::statespace::{hamiltonian, Atom, Basis, Branch, Mode, SparseOperator, SystemParams};
use crate::C64;

/// One of the six decay channels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum JumpChannel {
    /// Spontaneous emission `a -> c`.
    AtomPlus,
    /// Spontaneous emission `b -> c`.
    AtomMinus,
    CavityOnePlus,
    CavityOneMinus,
    CavityTwoPlus,
    CavityTwoMinus,
}

impl JumpChannel {
    pub const ALL: [JumpChannel; 6] = [
        JumpChannel::AtomPlus,
        JumpChannel::AtomMinus,
        JumpChannel::CavityOnePlus,
        JumpChannel::CavityOneMinus,
        JumpChannel::CavityTwoPlus,
        JumpChannel::CavityTwoMinus,
    ];

    /// The cavity mode that leaks, or `None` for spontaneous emission.
    pub fn mode(self) -> Option<Mode> {
        match self {
            JumpChannel::AtomPlus | JumpChannel::AtomMinus => None,
            JumpChannel::CavityOnePlus => Some(Mode::OnePlus),
            JumpChannel::CavityOneMinus => Some(Mode::OneMinus),
            JumpChannel::CavityTwoPlus => Some(Mode::TwoPlus),
            JumpChannel::CavityTwoMinus => Some(Mode::TwoMinus),
        }
    }

    pub fn branch(self) -> Branch {
        match self {
            JumpChannel::AtomPlus => Branch::Plus,
            JumpChannel::AtomMinus => Branch::Minus,
            other => other.mode().expect("cavity channel").branch(),
        }
    }

    pub fn is_atomic(self) -> bool {
        self.mode().is_none()
    }
}

impl fmt::Display for JumpChannel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.mode() {
            None => write!(f, "gamma{}", if self.branch() == Branch::Plus { '+' } else { '-' }),
            Some(mode) => write!(f, "kappa{mode}"),
        }
    }
}

/// A quantum jump at `time` through `channel`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JumpRecord {
    pub time: f64,
    pub channel: JumpChannel,
}

/// `H'(t) = H(t) - i (Gamma/2)(P_a + P_b) - i (kappa/2) sum of a^dag a`.
pub fn effective_hamiltonian(basis: &Basis, params: &SystemParams, t: f64) -> SparseOperator {
    let damping: Vec<C64> = basis
        .states()
        .iter()
        .map(|s| {
            let atomic = if s.atom == Atom::C { 0.0 } else { params.gamma };
            C64::new(0.0, -0.5 * (atomic + params.kappa * f64::from(s.photons())))
        })
        .collect();
    hamiltonian(basis, params, t).add(&SparseOperator::diagonal(&damping)).expect("same dimension")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pulses::PulseSchedule;
    use crate::statespace::manifold_basis;
    use crate::StateVector;
    use approx::assert_abs_diff_eq;

    #[test]
    fn damping_matrix_elements() {
        let b = Basis::build(2);
        let m = manifold_basis(&b).unwrap();
        let p = SystemParams::new(PulseSchedule::gaussian(1.0, 0.0, 1.0), PulseSchedule::off()).with_decay(0.05, 0.005);
        let h = effective_hamiltonian(&b, &p, 0.3);
        assert_abs_diff_eq!(h.matrix_element(&m.bright, &m.bright).im, -(0.05 + 0.005) / 2.0, epsilon = 1e-16);
        assert_abs_diff_eq!(h.matrix_element(&m.initial, &m.initial).im, -0.005, epsilon = 1e-16);
        let vac = StateVector::basis(b.dim(), 0);
        assert_eq!(h.matrix_element(&vac, &vac), C64::new(0.0, 0.0));
    }

    #[test]
    fn channel_labels() {
        assert_eq!(alloc::format!("{}", JumpChannel::AtomMinus), "gamma-");
        assert_eq!(alloc::format!("{}", JumpChannel::CavityTwoPlus), "kappa2+");
        assert!(JumpChannel::AtomPlus.is_atomic());
        assert_eq!(JumpChannel::CavityOneMinus.branch(), Branch::Minus);
    }
}
