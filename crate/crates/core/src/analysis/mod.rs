//! Readouts: manifold populations, fidelity, coincidence post-selection and
//! CHSH figures.

mod chsh;
mod polarization;

pub use chsh::{
    chsh_fixed, chsh_optimal, chsh_optimal_search, correlation, correlation_matrix, AnalyzerAngles, ChshResult,
};
pub use polarization::{
    postselect_density, postselect_ensemble, postselect_state, PolarizationState, TwoQubit, COUPLING_OFF_TOLERANCE,
};

use crate::statespace::{ManifoldBasis, ManifoldState};
use crate::{DensityMatrix, Error, Result, StateVector};

/// `(P_I, P_B, P_D, P_E+, P_E-)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ManifoldPopulations {
    pub initial: f64,
    pub bright: f64,
    pub dark: f64,
    pub e_plus: f64,
    pub e_minus: f64,
}

impl ManifoldPopulations {
    pub fn as_array(&self) -> [f64; 5] {
        [self.initial, self.bright, self.dark, self.e_plus, self.e_minus]
    }

    pub fn from_array(a: [f64; 5]) -> Self {
        Self { initial: a[0], bright: a[1], dark: a[2], e_plus: a[3], e_minus: a[4] }
    }

    pub fn get(&self, which: ManifoldState) -> f64 {
        self.as_array()[which as usize]
    }

    pub fn total(&self) -> f64 {
        self.as_array().iter().sum()
    }
}

/// `|<m|psi>|^2` for each manifold vector; `psi` is not renormalized.
pub fn manifold_populations(psi: &StateVector, manifold: &ManifoldBasis) -> ManifoldPopulations {
    ManifoldPopulations::from_array(manifold.vectors().map(|m| m.overlap_sqr(psi)))
}

/// `<m|rho|m>` for each manifold vector.
pub fn manifold_populations_mixed(rho: &DensityMatrix, manifold: &ManifoldBasis) -> ManifoldPopulations {
    ManifoldPopulations::from_array(manifold.vectors().map(|m| rho.expectation_in(m)))
}

/// `F = max_t P_E+(t)` and the first time it is attained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Fidelity {
    pub value: f64,
    pub time: f64,
}

pub fn fidelity(times: &[f64], e_plus: &[f64]) -> Result<Fidelity> {
    if times.is_empty() || times.len() != e_plus.len() {
        return Err(Error::EmptyGrid);
    }
    let mut best = Fidelity { value: e_plus[0], time: times[0] };
    for (&t, &p) in times.iter().zip(e_plus).skip(1) {
        if p > best.value {
            best = Fidelity { value: p, time: t };
        }
    }
    Ok(best)
}
