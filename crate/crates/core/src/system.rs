use alloc::vec::Vec;
use core::cell::Cell;
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use crate::dissipative::JumpChannel;
use crate::integrate::Flow;
use crate::statespace::{
    atomic_lowering, cavity_coupling, detuning_term, manifold_basis, mode_annihilator, Atom, Basis, Cavity,
    ManifoldBasis, SparseOperator, SystemParams, DEFAULT_N_MAX,
};
use crate::{Error, Result, StateVector, C64};

/// Basis, manifold and the precomputed operators of one parameter set.
///
/// Immutable after construction; share it freely between workers.
#[derive(Debug, Clone)]
pub struct CavitySystem {
    basis: Basis,
    manifold: ManifoldBasis,
    params: SystemParams,
    detuning: SparseOperator,
    coupling1: SparseOperator,
    coupling2: SparseOperator,
    /// Diagonal of `(Gamma/2)(P_a + P_b) + (kappa/2) N_photons`.
    damping: Vec<f64>,
    collapse: Vec<(JumpChannel, SparseOperator)>,
    kernel: Kernel,
    /// Sorted support edges of the active pulses.
    breakpoints: Vec<f64>,
}

/// `-i H` and `-i H'` in a form cheap enough for the inner stepping loop:
/// the couplings are real, so each entry is one real scale of `-i y`.
#[derive(Debug, Clone)]
struct Kernel {
    /// `-i (detuning)` per basis state.
    diag_hermitian: Vec<C64>,
    /// `-i (detuning - i damping)` per basis state.
    diag_damped: Vec<C64>,
    coupling1: Vec<(usize, usize, f64)>,
    coupling2: Vec<(usize, usize, f64)>,
}

impl Kernel {
    fn new(detuning: &SparseOperator, c1: &SparseOperator, c2: &SparseOperator, damping: &[f64]) -> Self {
        let dim = damping.len();
        let minus_i = C64::new(0.0, -1.0);
        let diag_hermitian: Vec<C64> = (0..dim).map(|i| minus_i * detuning.get(i, i)).collect();
        let diag_damped = diag_hermitian.iter().zip(damping).map(|(d, g)| d - g).collect();
        let real = |op: &SparseOperator| op.entries().map(|(r, c, v)| (r, c, v.re)).collect();
        Self { diag_hermitian, diag_damped, coupling1: real(c1), coupling2: real(c2) }
    }
}

impl CavitySystem {
    pub fn new(params: SystemParams) -> Result<Self> {
        Self::with_truncation(params, DEFAULT_N_MAX)
    }

    pub fn with_truncation(params: SystemParams, n_max: u32) -> Result<Self> {
        params.validate()?;
        let basis = Basis::build(n_max);
        let manifold = manifold_basis(&basis)?;
        let detuning = detuning_term(&basis, params.delta_plus, params.delta_minus);
        let coupling1 = cavity_coupling(&basis, Cavity::One, params.coupling);
        let coupling2 = cavity_coupling(&basis, Cavity::Two, params.coupling);
        let damping: Vec<f64> = basis
            .states()
            .iter()
            .map(|s| {
                let atomic = if s.atom == Atom::C { 0.0 } else { params.gamma };
                0.5 * (atomic + params.kappa * f64::from(s.photons()))
            })
            .collect();
        let collapse = JumpChannel::ALL
            .iter()
            .map(|&ch| {
                let (op, rate) = match ch.mode() {
                    Some(mode) => (mode_annihilator(&basis, mode), params.kappa),
                    None => (atomic_lowering(&basis, ch.branch()), params.gamma),
                };
                (ch, op.scaled(C64::new(rate.sqrt(), 0.0)))
            })
            .collect();
        let kernel = Kernel::new(&detuning, &coupling1, &coupling2, &damping);
        let mut breakpoints: Vec<f64> = [params.schedule1, params.schedule2]
            .iter()
            .filter(|s| s.g_peak > 0.0)
            .flat_map(|s| {
                let (a, b) = s.support();
                [a, b]
            })
            .filter(|t| t.is_finite())
            .collect();
        breakpoints.sort_by(f64::total_cmp);
        breakpoints.dedup();
        Ok(Self { basis, manifold, params, detuning, coupling1, coupling2, damping, collapse, kernel, breakpoints })
    }

    pub fn basis(&self) -> &Basis {
        &self.basis
    }

    pub fn manifold(&self) -> &ManifoldBasis {
        &self.manifold
    }

    pub fn params(&self) -> &SystemParams {
        &self.params
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    /// Times where a coupling switches on or off. Integration steps never
    /// straddle them.
    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    /// `|I>`, the two stored cavity-1 photons.
    pub fn initial_state(&self) -> StateVector {
        self.manifold.initial.clone()
    }

    /// Collapse operators `sqrt(rate) C_k` in [`JumpChannel::ALL`] order.
    pub fn collapse_operators(&self) -> &[(JumpChannel, SparseOperator)] {
        &self.collapse
    }

    /// Rotating-frame Hamiltonian at `t`.
    pub fn hamiltonian(&self, t: f64) -> SparseOperator {
        let (g1, g2) = self.params.couplings_at(t);
        self.detuning
            .add(&self.coupling1.scaled(C64::new(g1, 0.0)))
            .and_then(|h| h.add(&self.coupling2.scaled(C64::new(g2, 0.0))))
            .expect("operators share the basis dimension")
    }

    /// `H - i (Gamma/2)(P_a + P_b) - i (kappa/2) N`.
    pub fn effective_hamiltonian(&self, t: f64) -> SparseOperator {
        let damping: Vec<C64> = self.damping.iter().map(|&d| C64::new(0.0, -d)).collect();
        self.hamiltonian(t).add(&SparseOperator::diagonal(&damping)).expect("same dimension")
    }

    /// `out = H(t) x`.
    pub fn apply_hamiltonian(&self, t: f64, x: &[C64], out: &mut [C64]) {
        let (g1, g2) = self.params.couplings_at(t);
        self.detuning.apply_into(x, out);
        if g1 != 0.0 {
            self.coupling1.apply_add(C64::new(g1, 0.0), x, out);
        }
        if g2 != 0.0 {
            self.coupling2.apply_add(C64::new(g2, 0.0), x, out);
        }
    }

    /// `out = H'(t) x` with the non-hermitian damping included.
    pub fn apply_effective(&self, t: f64, x: &[C64], out: &mut [C64]) {
        self.apply_hamiltonian(t, x, out);
        for ((o, &v), &d) in out.iter_mut().zip(x).zip(&self.damping) {
            *o -= C64::new(0.0, d) * v;
        }
    }

    /// `dy = -i H y`, or `-i H' y` when `damped`, at couplings `g1`, `g2`.
    pub(crate) fn derivative_with(&self, g1: f64, g2: f64, y: &[C64], dy: &mut [C64], damped: bool) {
        let k = &self.kernel;
        let diag = if damped { &k.diag_damped } else { &k.diag_hermitian };
        for ((d, &a), &b) in dy.iter_mut().zip(diag).zip(y) {
            *d = a * b;
        }
        for (entries, g) in [(&k.coupling1, g1), (&k.coupling2, g2)] {
            if g == 0.0 {
                continue;
            }
            for &(r, c, v) in entries {
                let f = g * v;
                let x = y[c];
                dy[r] += C64::new(f * x.im, -f * x.re);
            }
        }
    }

    /// Largest characteristic frequency: the generalized Rabi frequencies of
    /// both cavities, the detunings and the decay rates.
    pub fn max_frequency(&self) -> f64 {
        let p = &self.params;
        let delta = p.delta_plus.abs().max(p.delta_minus.abs());
        let omega1 = (8.0 * p.schedule1.g_peak.powi(2) + delta * delta).sqrt();
        let omega2 = (4.0 * p.schedule2.g_peak.powi(2) + delta * delta).sqrt();
        omega1.max(omega2).max(p.gamma).max(p.kappa)
    }

    /// Step bound `1 / (50 omega_max)`, or `None` if nothing evolves.
    pub fn max_step(&self) -> Option<f64> {
        let w = self.max_frequency();
        if w > 0.0 {
            Some(1.0 / (50.0 * w))
        } else {
            None
        }
    }

    /// Integration step for a timeline: the frequency rule, tightened by the
    /// timeline's own `dt_max` and never longer than one output interval.
    pub fn step_for(&self, timeline: &Timeline) -> f64 {
        let interval = timeline.interval();
        let mut dt = self.max_step().unwrap_or(interval);
        if let Some(user) = timeline.dt_max {
            dt = dt.min(user);
        }
        dt.min(interval)
    }

    /// Detuning, cavity-1 coupling, cavity-2 coupling and damping diagonal.
    pub(crate) fn generator_parts(&self) -> (&SparseOperator, &SparseOperator, &SparseOperator, &[f64]) {
        (&self.detuning, &self.coupling1, &self.coupling2, &self.damping)
    }

    pub(crate) fn check_state(&self, psi: &StateVector) -> Result<()> {
        if psi.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: psi.dim() });
        }
        Ok(())
    }
}

/// Output grid `[start, end]` with `points` evenly spaced samples (both ends
/// included), and an optional cap on the integration step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Timeline {
    pub start: f64,
    pub end: f64,
    pub points: usize,
    pub dt_max: Option<f64>,
}

impl Timeline {
    pub const DEFAULT_POINTS: usize = 1000;

    pub fn new(start: f64, end: f64, points: usize) -> Self {
        Self { start, end, points, dt_max: None }
    }

    pub fn with_dt_max(mut self, dt_max: f64) -> Self {
        self.dt_max = Some(dt_max);
        self
    }

    /// Span from the first pulse's support start to the last pulse's end.
    /// Switched-off schedules are ignored unless both are off.
    pub fn covering(params: &SystemParams, points: usize) -> Self {
        let schedules = [params.schedule1, params.schedule2];
        let active: Vec<_> = schedules.iter().filter(|s| s.g_peak > 0.0).collect();
        let chosen = if active.is_empty() { schedules.iter().collect() } else { active };
        let start = chosen.iter().map(|s| s.support().0).fold(f64::INFINITY, f64::min);
        let end = chosen.iter().map(|s| s.support().1).fold(f64::NEG_INFINITY, f64::max);
        Self::new(start, end, points)
    }

    pub fn validate(&self) -> Result<()> {
        if self.points < 2 {
            return Err(Error::EmptyGrid);
        }
        if !(self.end > self.start) || !self.start.is_finite() || !self.end.is_finite() {
            return Err(Error::InvalidParameter {
                name: "t_span",
                reason: alloc::format!("need start < end, got [{}, {}]", self.start, self.end),
            });
        }
        if let Some(dt) = self.dt_max {
            if !(dt > 0.0) {
                return Err(Error::InvalidParameter {
                    name: "dt_max",
                    reason: alloc::format!("must be positive, got {dt}"),
                });
            }
        }
        Ok(())
    }

    pub fn interval(&self) -> f64 {
        (self.end - self.start) / (self.points - 1) as f64
    }

    pub fn time(&self, k: usize) -> f64 {
        if k + 1 == self.points {
            self.end
        } else {
            self.start + k as f64 * self.interval()
        }
    }

    pub fn grid(&self) -> Vec<f64> {
        (0..self.points).map(|k| self.time(k)).collect()
    }
}

/// `d psi/dt = -i H(t) psi` (or `-i H'(t) psi` when `damped`).
///
/// Runge-Kutta evaluates each midpoint twice and each step end again at the
/// next step start, so the last coupling evaluation is cached.
pub(crate) struct PureFlow<'a> {
    system: &'a CavitySystem,
    damped: bool,
    last: Cell<(f64, f64, f64)>,
}

impl<'a> PureFlow<'a> {
    pub(crate) fn new(system: &'a CavitySystem, damped: bool) -> Self {
        Self { system, damped, last: Cell::new((f64::NAN, 0.0, 0.0)) }
    }
}

impl Flow for PureFlow<'_> {
    fn dim(&self) -> usize {
        self.system.dim()
    }
    fn derivative(&self, t: f64, y: &[C64], dy: &mut [C64]) {
        let (t_last, g1, g2) = self.last.get();
        let (g1, g2) = if t_last == t {
            (g1, g2)
        } else {
            let g = self.system.params.couplings_at(t);
            self.last.set((t, g.0, g.1));
            g
        };
        self.system.derivative_with(g1, g2, y, dy, self.damped);
    }
}
