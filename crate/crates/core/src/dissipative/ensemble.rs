use alloc::vec::Vec;
use core::ops::Range;

use super::trajectory::NoJumpPath;
use super::JumpRecord;
use crate::analysis::ManifoldPopulations;
use crate::{CavitySystem, Error, Result, StateVector, Timeline};

/// Trajectories are reduced in fixed blocks of this size, in index order, so
/// the floating-point summation order never depends on how blocks are
/// scheduled.
pub const ENSEMBLE_CHUNK: usize = 64;

/// Seed of trajectory `index`: output number `index + 1` of a SplitMix64
/// generator whose state starts at `master_seed`.
pub fn trajectory_seed(master_seed: u64, index: u64) -> u64 {
    let mut z = master_seed.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// What the ensemble keeps from each trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectorySummary {
    pub seed: u64,
    pub jumps: Vec<JumpRecord>,
    pub final_state: StateVector,
}

/// Partial sums over a contiguous block of trajectory indices.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleChunk {
    pub range: Range<usize>,
    sums: Vec<[f64; 5]>,
    pub trajectories: Vec<TrajectorySummary>,
}

/// Index blocks of [`ENSEMBLE_CHUNK`] trajectories covering `0..n_traj`.
pub fn chunk_ranges(n_traj: usize) -> Vec<Range<usize>> {
    (0..n_traj).step_by(ENSEMBLE_CHUNK).map(|s| s..(s + ENSEMBLE_CHUNK).min(n_traj)).collect()
}

/// Runs the trajectories with indices in `range`.
pub fn run_chunk(path: &NoJumpPath<'_>, master_seed: u64, range: Range<usize>) -> Result<EnsembleChunk> {
    let timeline = path.timeline();
    let mut sums = alloc::vec![[0.0; 5]; timeline.points];
    let mut trajectories = Vec::with_capacity(range.len());
    for index in range.clone() {
        let seed = trajectory_seed(master_seed, index as u64);
        let tr = path.run(seed)?;
        for (acc, p) in sums.iter_mut().zip(&tr.populations) {
            for (a, v) in acc.iter_mut().zip(p.as_array()) {
                *a += v;
            }
        }
        trajectories.push(TrajectorySummary { seed, jumps: tr.jumps, final_state: tr.final_state });
    }
    Ok(EnsembleChunk { range, sums, trajectories })
}

/// Averages over many trajectories.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleResult {
    pub n_traj: usize,
    pub master_seed: u64,
    pub times: Vec<f64>,
    pub populations: Vec<ManifoldPopulations>,
    /// In trajectory-index order.
    pub trajectories: Vec<TrajectorySummary>,
}

impl EnsembleResult {
    pub fn seeds(&self) -> Vec<u64> {
        self.trajectories.iter().map(|t| t.seed).collect()
    }

    pub fn e_plus(&self) -> Vec<f64> {
        self.populations.iter().map(|p| p.e_plus).collect()
    }

    /// Fraction of trajectories without any jump.
    pub fn jump_free_fraction(&self) -> f64 {
        let n = self.trajectories.iter().filter(|t| t.jumps.is_empty()).count();
        n as f64 / self.n_traj as f64
    }
}

/// Combines chunks covering `0..n_traj` (in any order) into the mean.
pub fn assemble_ensemble(
    mut chunks: Vec<EnsembleChunk>,
    timeline: &Timeline,
    master_seed: u64,
) -> Result<EnsembleResult> {
    chunks.sort_by_key(|c| c.range.start);
    let mut expected = 0;
    for c in &chunks {
        if c.range.start != expected || c.sums.len() != timeline.points {
            return Err(Error::InvalidParameter {
                name: "chunks",
                reason: alloc::format!("chunks must tile the trajectory range, gap at {expected}"),
            });
        }
        expected = c.range.end;
    }
    let n_traj = expected;
    if n_traj == 0 {
        return Err(Error::InvalidParameter { name: "n_traj", reason: "must be at least 1".into() });
    }
    let mut total = alloc::vec![[0.0; 5]; timeline.points];
    let mut trajectories = Vec::with_capacity(n_traj);
    for c in chunks {
        for (acc, s) in total.iter_mut().zip(&c.sums) {
            for (a, v) in acc.iter_mut().zip(s) {
                *a += v;
            }
        }
        trajectories.extend(c.trajectories);
    }
    let inv = 1.0 / n_traj as f64;
    let populations = total.iter().map(|s| ManifoldPopulations::from_array(s.map(|v| v * inv))).collect();
    Ok(EnsembleResult { n_traj, master_seed, times: timeline.grid(), populations, trajectories })
}

/// Sequential ensemble; bit-identical to any parallel evaluation of the same
/// [`chunk_ranges`] followed by [`assemble_ensemble`].
pub fn run_ensemble(
    system: &CavitySystem,
    psi0: &StateVector,
    timeline: &Timeline,
    n_traj: usize,
    master_seed: u64,
) -> Result<EnsembleResult> {
    if n_traj == 0 {
        return Err(Error::InvalidParameter { name: "n_traj", reason: "must be at least 1".into() });
    }
    let path = NoJumpPath::new(system, psi0, timeline)?;
    let chunks =
        chunk_ranges(n_traj).into_iter().map(|r| run_chunk(&path, master_seed, r)).collect::<Result<Vec<_>>>()?;
    assemble_ensemble(chunks, timeline, master_seed)
}
