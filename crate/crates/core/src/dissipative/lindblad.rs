use alloc::vec::Vec;

use crate::analysis::{manifold_populations_mixed, ManifoldPopulations};
use crate::integrate::{Flow, Rk4};
use crate::{CavitySystem, DensityMatrix, Error, Result, Timeline, C64};

/// Density-matrix snapshots on an output grid.
#[derive(Debug, Clone, PartialEq)]
pub struct LindbladSeries {
    pub times: Vec<f64>,
    pub states: Vec<DensityMatrix>,
    pub populations: Vec<ManifoldPopulations>,
}

impl LindbladSeries {
    pub fn final_state(&self) -> &DensityMatrix {
        self.states.last().expect("a series has at least two samples")
    }

    pub fn e_plus(&self) -> Vec<f64> {
        self.populations.iter().map(|p| p.e_plus).collect()
    }
}

type Entries = Vec<(usize, usize, C64)>;

/// `d rho/dt = -i (H' rho - rho H'^dag) + sum_k C_k rho C_k^dag` on the
/// row-major vectorized density matrix.
struct MasterEquation<'a> {
    system: &'a CavitySystem,
    dim: usize,
    /// Detuning minus i times the damping, per basis state.
    diagonal: Vec<C64>,
    coupling1: Entries,
    coupling2: Entries,
    collapse: Vec<Entries>,
}

impl<'a> MasterEquation<'a> {
    fn new(system: &'a CavitySystem) -> Self {
        let (detuning, c1, c2, damping) = system.generator_parts();
        let dim = system.dim();
        let diagonal = (0..dim).map(|i| detuning.get(i, i) - C64::new(0.0, damping[i])).collect();
        let collapse = system.collapse_operators().iter().map(|(_, op)| op.entries().collect()).collect();
        Self { system, dim, diagonal, coupling1: c1.entries().collect(), coupling2: c2.entries().collect(), collapse }
    }
}

impl Flow for MasterEquation<'_> {
    fn dim(&self) -> usize {
        self.dim * self.dim
    }

    fn derivative(&self, t: f64, rho: &[C64], d: &mut [C64]) {
        let n = self.dim;
        let (g1, g2) = self.system.params().couplings_at(t);
        // d <- X = H' rho.
        for i in 0..n {
            let di = self.diagonal[i];
            for j in 0..n {
                d[i * n + j] = di * rho[i * n + j];
            }
        }
        for (entries, g) in [(&self.coupling1, g1), (&self.coupling2, g2)] {
            if g == 0.0 {
                continue;
            }
            for &(r, c, v) in entries {
                let f = v * g;
                for j in 0..n {
                    d[r * n + j] += f * rho[c * n + j];
                }
            }
        }
        // d <- -i (X - X^dag), using rho = rho^dag.
        for i in 0..n {
            for j in i..n {
                let x_ij = d[i * n + j];
                let x_ji = d[j * n + i];
                let diff = x_ij - x_ji.conj();
                let v = C64::new(diff.im, -diff.re);
                d[i * n + j] = v;
                d[j * n + i] = v.conj();
            }
        }
        for entries in &self.collapse {
            for &(r1, c1, v1) in entries {
                for &(r2, c2, v2) in entries {
                    d[r1 * n + r2] += v1 * v2.conj() * rho[c1 * n + c2];
                }
            }
        }
    }
}

/// Integrates the master equation with the six collapse operators of
/// `system`, on the same stepper and step rule as the pure-state solvers.
pub fn lindblad_evolve(system: &CavitySystem, rho0: &DensityMatrix, timeline: &Timeline) -> Result<LindbladSeries> {
    if rho0.dim() != system.dim() {
        return Err(Error::DimensionMismatch { expected: system.dim(), found: rho0.dim() });
    }
    rho0.validate()?;
    timeline.validate()?;
    let dt = system.step_for(timeline);
    let eq = MasterEquation::new(system);
    let mut rk = Rk4::new(eq.dim());
    let mut y: Vec<C64> = rho0.as_slice().to_vec();
    let mut out = LindbladSeries {
        times: timeline.grid(),
        states: Vec::with_capacity(timeline.points),
        populations: Vec::with_capacity(timeline.points),
    };
    for k in 0..timeline.points {
        if k > 0 {
            rk.advance_through(&eq, timeline.time(k - 1), timeline.time(k), dt, system.breakpoints(), &mut y);
        }
        let rho = DensityMatrix::from_raw(system.dim(), y.clone())?;
        if !rho.trace().is_finite() {
            return Err(Error::Numerical { time: timeline.time(k), reason: "density matrix is not finite" });
        }
        out.populations.push(manifold_populations_mixed(&rho, system.manifold()));
        out.states.push(rho);
    }
    Ok(out)
}
