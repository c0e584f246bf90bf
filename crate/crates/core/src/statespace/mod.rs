//! Truncated Hilbert space, operators, the rotating-frame Hamiltonian and the
//! two-photon manifold basis.

mod basis;
mod hamiltonian;
mod manifold;
mod operator;

pub use basis::{Atom, Basis, BasisState, Branch, Cavity, Mode};
pub use hamiltonian::{
    atomic_lowering, atomic_projector, cavity_coupling, detuning_term, excitation_number, hamiltonian,
    mode_annihilator, photon_number, CouplingModel, SystemParams,
};
pub use manifold::{manifold_basis, ManifoldBasis, ManifoldState};
pub use operator::SparseOperator;

/// Default truncation: two excitations, enough for the initial two-photon
/// state and everything reachable from it.
pub const DEFAULT_N_MAX: u32 = 2;
