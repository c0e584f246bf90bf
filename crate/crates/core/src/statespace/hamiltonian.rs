use alloc::vec::Vec;
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use super::basis::{Atom, Basis, Branch, Cavity, Mode};
use super::operator::SparseOperator;
use crate::pulses::PulseSchedule;
use crate::{Error, Result, C64};

/// Which cavity-1 matrix elements enter the Hamiltonian.
///
/// `Full` keeps every Jaynes-Cummings term. `Confined` drops the cavity-1
/// couplings between states that already hold a photon in cavity 2, so the
/// atom cannot transfer a second photon into cavity 2 once the pair has
/// split. This only changes the two-excitation sector and leaves the
/// `|I>, |B>, |D>, |E+>, |E->` chain closed under the dynamics, which is the
/// behaviour the sequential and adiabatic schemes rely on. With the full
/// model and overlapping pulses the adiabatic dark state continues past
/// `|E+>` towards both photons in cavity 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CouplingModel {
    #[default]
    Confined,
    Full,
}

/// Every physical parameter of one run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    /// Peak vacuum Rabi frequency, the frequency unit of the run.
    pub g: f64,
    pub schedule1: PulseSchedule,
    pub schedule2: PulseSchedule,
    pub delta_plus: f64,
    pub delta_minus: f64,
    /// Atomic decay rate, common to both excited levels.
    pub gamma: f64,
    /// Cavity field decay rate, common to all four modes.
    pub kappa: f64,
    /// Detector efficiency. Does not enter the dynamics.
    pub eta: f64,
    pub coupling: CouplingModel,
}

impl SystemParams {
    /// Lossless, resonant parameters; `g` is the larger of the two peaks.
    pub fn new(schedule1: PulseSchedule, schedule2: PulseSchedule) -> Self {
        Self {
            g: schedule1.g_peak.max(schedule2.g_peak),
            schedule1,
            schedule2,
            delta_plus: 0.0,
            delta_minus: 0.0,
            gamma: 0.0,
            kappa: 0.0,
            eta: 1.0,
            coupling: CouplingModel::default(),
        }
    }

    pub fn with_decay(mut self, gamma: f64, kappa: f64) -> Self {
        self.gamma = gamma;
        self.kappa = kappa;
        self
    }

    pub fn with_detunings(mut self, delta_plus: f64, delta_minus: f64) -> Self {
        self.delta_plus = delta_plus;
        self.delta_minus = delta_minus;
        self
    }

    pub fn with_coupling(mut self, coupling: CouplingModel) -> Self {
        self.coupling = coupling;
        self
    }

    pub fn couplings_at(&self, t: f64) -> (f64, f64) {
        (self.schedule1.evaluate(t), self.schedule2.evaluate(t))
    }

    pub fn validate(&self) -> Result<()> {
        fn check(name: &'static str, value: f64, ok: bool, what: &str) -> Result<()> {
            if ok {
                Ok(())
            } else {
                Err(Error::InvalidParameter { name, reason: alloc::format!("{what}, got {value}") })
            }
        }
        check("g", self.g, self.g >= 0.0 && self.g.is_finite(), "must be finite and non-negative")?;
        check("gamma", self.gamma, self.gamma >= 0.0 && self.gamma.is_finite(), "must be finite and non-negative")?;
        check("kappa", self.kappa, self.kappa >= 0.0 && self.kappa.is_finite(), "must be finite and non-negative")?;
        check("eta", self.eta, (0.0..=1.0).contains(&self.eta), "must lie in [0, 1]")?;
        check("delta_plus", self.delta_plus, self.delta_plus.is_finite(), "must be finite")?;
        check("delta_minus", self.delta_minus, self.delta_minus.is_finite(), "must be finite")?;
        self.schedule1.validate()?;
        self.schedule2.validate()
    }
}

/// `a_mode`, with `<.., n-1, ..| a |.., n, ..> = sqrt(n)`.
pub fn mode_annihilator(basis: &Basis, mode: Mode) -> SparseOperator {
    let triplets = basis.iter().filter_map(|(k, s)| {
        let n = s.occupation(mode);
        let target = s.lowered(mode)?;
        let row = basis.index_of(&target).expect("lowering stays inside the truncation");
        Some((row, k, C64::new(f64::from(n).sqrt(), 0.0)))
    });
    SparseOperator::from_triplets(basis.dim(), triplets).expect("indices come from the basis")
}

/// `S+ = |c><a|` or `S- = |c><b|`, identity on the photons.
pub fn atomic_lowering(basis: &Basis, branch: Branch) -> SparseOperator {
    let excited = branch.excited_level();
    let triplets = basis.iter().filter(|(_, s)| s.atom == excited).map(|(k, s)| {
        let row = basis.index_of(&s.with_atom(Atom::C)).expect("decay stays inside the truncation");
        (row, k, C64::new(1.0, 0.0))
    });
    SparseOperator::from_triplets(basis.dim(), triplets).expect("indices come from the basis")
}

/// Projector onto one atomic level.
pub fn atomic_projector(basis: &Basis, level: Atom) -> SparseOperator {
    let diag: Vec<C64> =
        basis.states().iter().map(|s| C64::new(if s.atom == level { 1.0 } else { 0.0 }, 0.0)).collect();
    SparseOperator::diagonal(&diag)
}

/// Total photon number over all four modes.
pub fn photon_number(basis: &Basis) -> SparseOperator {
    let diag: Vec<C64> = basis.states().iter().map(|s| C64::new(f64::from(s.photons()), 0.0)).collect();
    SparseOperator::diagonal(&diag)
}

/// Total excitation number (photons plus atomic excitation).
pub fn excitation_number(basis: &Basis) -> SparseOperator {
    let diag: Vec<C64> = basis.states().iter().map(|s| C64::new(f64::from(s.excitation()), 0.0)).collect();
    SparseOperator::diagonal(&diag)
}

/// The operator multiplying `g_i(t)`:
/// `sum over branches of (a_{i,b}^dag S_b + S_b^dag a_{i,b})`.
///
/// Entries are generated from basis transitions (photon absorbed, atom
/// excited) so no intermediate state ever leaves the truncation.
pub fn cavity_coupling(basis: &Basis, cavity: Cavity, model: CouplingModel) -> SparseOperator {
    let mut triplets = Vec::new();
    for (k, s) in basis.iter() {
        if s.atom != Atom::C {
            continue;
        }
        if model == CouplingModel::Confined && cavity == Cavity::One && s.photons_in(Cavity::Two) > 0 {
            continue;
        }
        for branch in Branch::ALL {
            let mode = Mode::new(cavity, branch);
            let n = s.occupation(mode);
            let Some(lowered) = s.lowered(mode) else { continue };
            let excited = lowered.with_atom(branch.excited_level());
            let j = basis.index_of(&excited).expect("absorption conserves excitation");
            let amp = C64::new(f64::from(n).sqrt(), 0.0);
            triplets.push((j, k, amp));
            triplets.push((k, j, amp));
        }
    }
    SparseOperator::from_triplets(basis.dim(), triplets).expect("indices come from the basis")
}

/// `-Delta+ |a><a| - Delta- |b><b|`.
pub fn detuning_term(basis: &Basis, delta_plus: f64, delta_minus: f64) -> SparseOperator {
    let diag: Vec<C64> = basis
        .states()
        .iter()
        .map(|s| match s.atom {
            Atom::C => C64::new(0.0, 0.0),
            Atom::A => C64::new(-delta_plus, 0.0),
            Atom::B => C64::new(-delta_minus, 0.0),
        })
        .collect();
    SparseOperator::diagonal(&diag)
}

/// Rotating-frame Hamiltonian at time `t`:
/// `-Delta+ |a><a| - Delta- |b><b| + g1(t) V1 + g2(t) V2`.
pub fn hamiltonian(basis: &Basis, params: &SystemParams, t: f64) -> SparseOperator {
    let (g1, g2) = params.couplings_at(t);
    let v1 = cavity_coupling(basis, Cavity::One, params.coupling).scaled(C64::new(g1, 0.0));
    let v2 = cavity_coupling(basis, Cavity::Two, params.coupling).scaled(C64::new(g2, 0.0));
    detuning_term(basis, params.delta_plus, params.delta_minus)
        .add(&v1)
        .and_then(|h| h.add(&v2))
        .expect("operators share the basis dimension")
}
