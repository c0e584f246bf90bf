use core::f64::consts::FRAC_1_SQRT_2;

use super::basis::{Atom, Basis, BasisState};
use crate::{Error, Result, StateVector, C64};

/// Labels of the five two-excitation states reached from `|I>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ManifoldState {
    Initial,
    Bright,
    Dark,
    EPlus,
    EMinus,
}

impl ManifoldState {
    pub const ALL: [ManifoldState; 5] = [
        ManifoldState::Initial,
        ManifoldState::Bright,
        ManifoldState::Dark,
        ManifoldState::EPlus,
        ManifoldState::EMinus,
    ];

    /// Column label used in output files.
    pub fn label(self) -> &'static str {
        match self {
            ManifoldState::Initial => "P_I",
            ManifoldState::Bright => "P_B",
            ManifoldState::Dark => "P_D",
            ManifoldState::EPlus => "P_E+",
            ManifoldState::EMinus => "P_E-",
        }
    }
}

/// `|I>`, `|B>`, `|D>`, `|E+>`, `|E->` expressed over a [`Basis`].
///
/// * `|I>  = |c;1,1,0,0>`
/// * `|B>  = (|a;0,1,0,0> + |b;1,0,0,0>) / sqrt 2`
/// * `|D>  = (|a;0,1,0,0> - |b;1,0,0,0>) / sqrt 2`
/// * `|E+> = (|c;0,1,1,0> + |c;1,0,0,1>) / sqrt 2`
/// * `|E-> = (|c;0,1,1,0> - |c;1,0,0,1>) / sqrt 2`
#[derive(Debug, Clone, PartialEq)]
pub struct ManifoldBasis {
    pub initial: StateVector,
    pub bright: StateVector,
    pub dark: StateVector,
    pub e_plus: StateVector,
    pub e_minus: StateVector,
}

impl ManifoldBasis {
    pub fn get(&self, which: ManifoldState) -> &StateVector {
        match which {
            ManifoldState::Initial => &self.initial,
            ManifoldState::Bright => &self.bright,
            ManifoldState::Dark => &self.dark,
            ManifoldState::EPlus => &self.e_plus,
            ManifoldState::EMinus => &self.e_minus,
        }
    }

    /// Vectors in [`ManifoldState::ALL`] order.
    pub fn vectors(&self) -> [&StateVector; 5] {
        ManifoldState::ALL.map(|m| self.get(m))
    }

    /// Gram matrix `<m_i|m_j>`.
    pub fn overlap_matrix(&self) -> [[C64; 5]; 5] {
        let v = self.vectors();
        let mut out = [[C64::new(0.0, 0.0); 5]; 5];
        for i in 0..5 {
            for j in 0..5 {
                out[i][j] = v[i].inner(v[j]);
            }
        }
        out
    }
}

/// Requires `n_max >= 2`.
pub fn manifold_basis(basis: &Basis) -> Result<ManifoldBasis> {
    if basis.n_max() < 2 {
        return Err(Error::TruncationTooSmall { n_max: basis.n_max(), required: 2 });
    }
    let pair = |first: BasisState, second: BasisState, sign: f64| {
        let mut v = StateVector::zeros(basis.dim());
        let a = v.amplitudes_mut();
        a[basis.index_of(&first).expect("within truncation")] += C64::new(FRAC_1_SQRT_2, 0.0);
        a[basis.index_of(&second).expect("within truncation")] += C64::new(sign * FRAC_1_SQRT_2, 0.0);
        v
    };
    let excited_a = BasisState::new(Atom::A, [0, 1, 0, 0]);
    let excited_b = BasisState::new(Atom::B, [1, 0, 0, 0]);
    let split_1 = BasisState::new(Atom::C, [0, 1, 1, 0]);
    let split_2 = BasisState::new(Atom::C, [1, 0, 0, 1]);
    let initial = BasisState::new(Atom::C, [1, 1, 0, 0]);
    Ok(ManifoldBasis {
        initial: StateVector::basis(basis.dim(), basis.index_of(&initial).expect("within truncation")),
        bright: pair(excited_a, excited_b, 1.0),
        dark: pair(excited_a, excited_b, -1.0),
        e_plus: pair(split_1, split_2, 1.0),
        e_minus: pair(split_1, split_2, -1.0),
    })
}
