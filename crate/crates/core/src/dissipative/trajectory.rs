use alloc::vec::Vec;
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{JumpChannel, JumpRecord};
use crate::analysis::{manifold_populations, ManifoldPopulations};
use crate::integrate::{segments, substeps, Rk4};
use crate::system::PureFlow;
use crate::{CavitySystem, Error, Result, StateVector, Timeline, C64};

/// Jump times are located to this fraction of the integration step.
const BISECTION_TOLERANCE: f64 = 1e-6;

/// One quantum-jump trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryResult {
    pub seed: u64,
    pub times: Vec<f64>,
    /// Populations of the normalized conditional state.
    pub populations: Vec<ManifoldPopulations>,
    /// Squared norm of the unnormalized state since the last jump.
    pub norms: Vec<f64>,
    pub jumps: Vec<JumpRecord>,
    /// Normalized conditional state at the end of the grid.
    pub final_state: StateVector,
}

/// Waiting-time Monte-Carlo wave-function trajectory.
///
/// A threshold `r` is drawn uniformly in `(0, 1)`, the state evolves under
/// `H'` until its squared norm falls to `r`, a channel is picked with weight
/// `||C_k psi||^2`, the jump is applied and the state renormalized. The
/// random stream is ChaCha8 seeded with `seed`.
pub fn run_trajectory(
    system: &CavitySystem,
    psi0: &StateVector,
    timeline: &Timeline,
    seed: u64,
) -> Result<TrajectoryResult> {
    system.check_state(psi0)?;
    timeline.validate()?;
    let mut w = Walker::new(system, timeline, seed);
    let mut y: Vec<C64> = psi0.amplitudes().to_vec();
    w.record(&y);
    for k in 1..timeline.points {
        w.interval_from(k, timeline.time(k - 1), &mut y)?;
        w.record(&y);
    }
    Ok(w.finish(y))
}

/// The jump-free evolution from one initial state, stored step by step.
///
/// Every trajectory follows this path up to its first jump, so an ensemble
/// only has to integrate what comes after. The stored steps are exactly the
/// ones [`run_trajectory`] takes and [`NoJumpPath::run`] gives bit-identical
/// results.
#[derive(Debug, Clone)]
pub struct NoJumpPath<'a> {
    system: &'a CavitySystem,
    timeline: Timeline,
    steps: Vec<PathStep>,
    /// Pre-step states, `dim` amplitudes per step.
    states: Vec<C64>,
    populations: Vec<ManifoldPopulations>,
    norms: Vec<f64>,
    final_y: Vec<C64>,
}

#[derive(Debug, Clone, Copy)]
struct PathStep {
    interval: usize,
    t: f64,
    h: f64,
    norm_after: f64,
}

impl<'a> NoJumpPath<'a> {
    pub fn new(system: &'a CavitySystem, psi0: &StateVector, timeline: &Timeline) -> Result<Self> {
        system.check_state(psi0)?;
        timeline.validate()?;
        let mut w = Walker::new(system, timeline, 0);
        let mut y: Vec<C64> = psi0.amplitudes().to_vec();
        let mut steps = Vec::new();
        let mut states = Vec::new();
        w.record(&y);
        for k in 1..timeline.points {
            let (t_start, t_end) = (timeline.time(k - 1), timeline.time(k));
            for (a, b) in segments(t_start, t_end, system.breakpoints()) {
                let h_nominal = w.nominal_step(a, b);
                let mut t = a;
                while b - t > 1e-12 * h_nominal {
                    let h = h_nominal.min(b - t);
                    states.extend_from_slice(&y);
                    let norm_after = w.plain_step(t, h, &mut y)?;
                    steps.push(PathStep { interval: k, t, h, norm_after });
                    t += h;
                }
            }
            w.record(&y);
        }
        Ok(Self { system, timeline: *timeline, steps, states, populations: w.populations, norms: w.norms, final_y: y })
    }

    pub fn system(&self) -> &'a CavitySystem {
        self.system
    }

    pub fn timeline(&self) -> &Timeline {
        &self.timeline
    }

    /// Squared norm at the end of the grid, the probability of no jump.
    pub fn survival(&self) -> f64 {
        norm_sqr(&self.final_y)
    }

    /// Same as [`run_trajectory`] from the path's initial state.
    pub fn run(&self, seed: u64) -> Result<TrajectoryResult> {
        let dim = self.system.dim();
        let mut w = Walker::new(self.system, &self.timeline, seed);
        let Some(j) = self.steps.iter().position(|s| s.norm_after <= w.threshold) else {
            w.populations = self.populations.clone();
            w.norms = self.norms.clone();
            return Ok(w.finish(self.final_y.clone()));
        };
        let step = self.steps[j];
        let k = step.interval;
        w.populations.extend_from_slice(&self.populations[..k]);
        w.norms.extend_from_slice(&self.norms[..k]);
        let mut y = self.states[j * dim..(j + 1) * dim].to_vec();
        w.saved.copy_from_slice(&y);
        let t = w.jump_within(step.t, step.h, &mut y)?;
        w.interval_from(k, t, &mut y)?;
        w.record(&y);
        for k in (k + 1)..self.timeline.points {
            w.interval_from(k, self.timeline.time(k - 1), &mut y)?;
            w.record(&y);
        }
        Ok(w.finish(y))
    }
}

struct Walker<'a> {
    system: &'a CavitySystem,
    timeline: Timeline,
    dt: f64,
    flow: PureFlow<'a>,
    rk: Rk4,
    rng: ChaCha8Rng,
    seed: u64,
    threshold: f64,
    saved: Vec<C64>,
    jumps: Vec<JumpRecord>,
    populations: Vec<ManifoldPopulations>,
    norms: Vec<f64>,
}

impl<'a> Walker<'a> {
    fn new(system: &'a CavitySystem, timeline: &Timeline, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let threshold = draw_open_unit(&mut rng);
        Self {
            system,
            timeline: *timeline,
            dt: system.step_for(timeline),
            flow: PureFlow::new(system, true),
            rk: Rk4::new(system.dim()),
            rng,
            seed,
            threshold,
            saved: alloc::vec![C64::new(0.0, 0.0); system.dim()],
            jumps: Vec::new(),
            populations: Vec::with_capacity(timeline.points),
            norms: Vec::with_capacity(timeline.points),
        }
    }

    fn record(&mut self, y: &[C64]) {
        let psi = StateVector::from_amplitudes(y.to_vec());
        self.norms.push(psi.norm_sqr());
        self.populations.push(manifold_populations(&psi.normalized(), self.system.manifold()));
    }

    fn nominal_step(&self, t_start: f64, t_end: f64) -> f64 {
        (t_end - t_start) / substeps(t_end - t_start, self.dt) as f64
    }

    /// One step without the threshold test; returns the new squared norm.
    fn plain_step(&mut self, t: f64, h: f64, y: &mut [C64]) -> Result<f64> {
        self.saved.copy_from_slice(y);
        let before = norm_sqr(y);
        self.rk.step(&self.flow, t, h, y);
        let after = norm_sqr(y);
        if !after.is_finite() {
            return Err(Error::Numerical { time: t, reason: "state norm is not finite" });
        }
        if after > before * (1.0 + 1e-10) {
            return Err(Error::Numerical { time: t, reason: "conditional norm increased between jumps" });
        }
        Ok(after)
    }

    /// Integrates grid interval `k` from `t` to its end, jumping whenever
    /// the squared norm reaches the threshold.
    fn interval_from(&mut self, k: usize, mut t: f64, y: &mut [C64]) -> Result<()> {
        let (t_start, t_end) = (self.timeline.time(k - 1), self.timeline.time(k));
        let system = self.system;
        for (a, b) in segments(t_start, t_end, system.breakpoints()) {
            if b <= t {
                continue;
            }
            let h_nominal = self.nominal_step(a, b);
            t = t.max(a);
            while b - t > 1e-12 * h_nominal {
                let h = h_nominal.min(b - t);
                if self.plain_step(t, h, y)? > self.threshold {
                    t += h;
                } else {
                    t = self.jump_within(t, h, y)?;
                }
            }
        }
        Ok(())
    }

    /// Bisects `[t, t + h]` from `self.saved` for the threshold crossing,
    /// jumps there and draws a new threshold. Returns the jump time.
    fn jump_within(&mut self, t: f64, h: f64, y: &mut [C64]) -> Result<f64> {
        let (mut lo, mut hi) = (0.0, h);
        while hi - lo > BISECTION_TOLERANCE * h {
            let mid = 0.5 * (lo + hi);
            y.copy_from_slice(&self.saved);
            self.rk.step(&self.flow, t, mid, y);
            if norm_sqr(y) > self.threshold {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        y.copy_from_slice(&self.saved);
        self.rk.step(&self.flow, t, hi, y);
        let time = t + hi;
        let channel = apply_jump(self.system, y, &mut self.rng, time)?;
        self.jumps.push(JumpRecord { time, channel });
        self.threshold = draw_open_unit(&mut self.rng);
        Ok(time)
    }

    fn finish(self, y: Vec<C64>) -> TrajectoryResult {
        TrajectoryResult {
            seed: self.seed,
            times: self.timeline.grid(),
            populations: self.populations,
            norms: self.norms,
            jumps: self.jumps,
            final_state: StateVector::from_amplitudes(y).normalized(),
        }
    }
}

fn norm_sqr(y: &[C64]) -> f64 {
    y.iter().map(|z| z.norm_sqr()).sum()
}

fn draw_open_unit(rng: &mut ChaCha8Rng) -> f64 {
    loop {
        let u: f64 = rng.random();
        if u > 0.0 {
            return u;
        }
    }
}

/// Picks a channel with probability proportional to `||C_k psi||^2`, applies
/// it and renormalizes.
fn apply_jump(system: &CavitySystem, y: &mut [C64], rng: &mut ChaCha8Rng, time: f64) -> Result<JumpChannel> {
    let ops = system.collapse_operators();
    let mut candidates: Vec<(JumpChannel, Vec<C64>, f64)> = Vec::with_capacity(ops.len());
    let mut total = 0.0;
    for (channel, op) in ops {
        let mut out = alloc::vec![C64::new(0.0, 0.0); y.len()];
        op.apply_into(y, &mut out);
        let w = norm_sqr(&out);
        total += w;
        candidates.push((*channel, out, w));
    }
    if !(total > 0.0) {
        return Err(Error::DegenerateJump { time, norm: norm_sqr(y) });
    }
    let pick = rng.random::<f64>() * total;
    let mut acc = 0.0;
    let mut chosen = None;
    for (k, c) in candidates.iter().enumerate() {
        if c.2 == 0.0 {
            continue;
        }
        acc += c.2;
        chosen = Some(k);
        if pick < acc {
            break;
        }
    }
    let (channel, out, w) = &candidates[chosen.expect("total weight is positive")];
    let scale = 1.0 / w.sqrt();
    for (dst, src) in y.iter_mut().zip(out) {
        *dst = src * scale;
    }
    Ok(*channel)
}
