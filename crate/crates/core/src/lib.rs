//! Simulation core for a cavity-QED source of polarization-entangled photon
//! pairs.
//!
//! A V-type three-level atom (ground `c`, excited `a` and `b`) crosses two
//! optical cavities, each supporting a degenerate pair of circularly
//! polarized modes. Starting from two photons stored in cavity 1, the atom
//! either performs two truncated Rabi oscillations (one per cavity) or a
//! counterintuitive adiabatic passage, leaving one photon in each cavity in
//! the polarization Bell state `|E+>`.
//!
//! The crate is `no_std` (with `alloc`). It provides:
//!
//! * [`statespace`]: truncated Fock basis, sparse operators, the rotating-frame
//!   Hamiltonian and the bright/dark/Bell manifold basis.
//! * [`pulses`]: square and Gaussian coupling profiles, pulse-area calibration,
//!   adiabatic-passage schedules and the mixing angle.
//! * [`coherent`]: closed-system propagation plus closed-form Rabi and dark-state
//!   references.
//! * [`dissipative`]: non-hermitian effective Hamiltonian, Monte-Carlo
//!   wave-function trajectories, deterministic ensembles and a Lindblad
//!   master-equation integrator.
//! * [`analysis`]: fidelity, manifold populations, coincidence post-selection
//!   and CHSH figures.
//!
//! Time is measured in units of `1/g` throughout when the peak vacuum Rabi
//! frequency `g` is set to one; nothing in the crate depends on that choice.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod analysis;
pub mod coherent;
pub mod dissipative;
mod error;
pub mod integrate;
pub mod linalg;
pub mod pulses;
mod state;
pub mod statespace;
mod system;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
pub use state::{DensityMatrix, StateVector};
pub use system::{CavitySystem, Timeline};
