//! Single experiments: evolution, read-out and result files.

use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};

use cqed_pairs_core::analysis::{
    fidelity, postselect_density, postselect_ensemble, postselect_state, AnalyzerAngles, ChshResult,
    ManifoldPopulations, PolarizationState,
};
use cqed_pairs_core::coherent::evolve_no_jump;
use cqed_pairs_core::dissipative::{assemble_ensemble, chunk_ranges, lindblad_evolve, run_chunk, NoJumpPath};
use cqed_pairs_core::{CavitySystem, DensityMatrix};
use rayon::prelude::*;

use crate::config::{ConfigError, ExperimentConfig, Method, Scheme};
use crate::format::num;
use crate::svg;

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),

    #[error("simulation failed: {0}")]
    Numerical(#[from] cqed_pairs_core::Error),

    #[error("cannot write {path}: {source}")]
    Io { path: String, source: std::io::Error },
}

impl RunError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        RunError::Io { path: path.display().to_string(), source }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesRow {
    pub t: f64,
    pub populations: ManifoldPopulations,
    /// Probability that no jump has happened yet (trace of rho for the
    /// master equation).
    pub norm: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary {
    pub f: f64,
    pub t_star: f64,
    pub s_fixed: f64,
    pub s_optimal: f64,
    pub p_coinc: f64,
    pub n_traj: usize,
    pub seed: u64,
    /// Overlap of the post-selected polarization state with Psi+.
    pub f_post: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub scheme: Scheme,
    pub method: Method,
    pub series: Vec<SeriesRow>,
    pub summary: Summary,
    pub post_selected: Option<PolarizationState>,
}

/// Runs one experiment. Ensemble chunks are spread over the current rayon
/// pool; the result does not depend on its size.
pub fn run_experiment(cfg: &ExperimentConfig, scheme: Scheme) -> Result<RunResult, RunError> {
    let params = cfg.system_params(scheme)?;
    let timeline = cfg.timeline(&params);
    let system = CavitySystem::new(params)?;
    let psi0 = system.initial_state();
    let t_f = timeline.end;
    let (times, pops, norms, post, n_traj) = match cfg.method {
        Method::NoJump => {
            let tr = evolve_no_jump(&system, &psi0, &timeline)?;
            let post = postselect_state(&system, tr.final_state(), t_f);
            (tr.times, tr.populations, tr.norms, post, 0)
        }
        Method::Lindblad => {
            let series = lindblad_evolve(&system, &DensityMatrix::from_pure(&psi0), &timeline)?;
            let post = postselect_density(&system, series.final_state(), t_f);
            let norms = series.states.iter().map(|r| r.trace()).collect();
            (series.times, series.populations, norms, post, 0)
        }
        Method::Mcwf => {
            let path = NoJumpPath::new(&system, &psi0, &timeline)?;
            let chunks = chunk_ranges(cfg.n_traj)
                .into_par_iter()
                .map(|r| run_chunk(&path, cfg.seed, r))
                .collect::<Result<Vec<_>, _>>()?;
            let ens = assemble_ensemble(chunks, &timeline, cfg.seed)?;
            let mut first: Vec<f64> =
                ens.trajectories.iter().map(|t| t.jumps.first().map_or(f64::INFINITY, |j| j.time)).collect();
            first.sort_by(f64::total_cmp);
            let n = first.len() as f64;
            let norms =
                ens.times.iter().map(|&t| (first.len() - first.partition_point(|&x| x <= t)) as f64 / n).collect();
            let post = postselect_ensemble(&system, &ens);
            (ens.times, ens.populations, norms, post, cfg.n_traj)
        }
    };
    let e_plus: Vec<f64> = pops.iter().map(|p| p.e_plus).collect();
    let fid = fidelity(&times, &e_plus)?;
    let (chsh, post_selected) = match post {
        Ok(state) => (Some(ChshResult::evaluate(&state, AnalyzerAngles::STANDARD)?), Some(state)),
        Err(e) => {
            log::warn!("{scheme}: no post-selected polarization state ({e})");
            (None, None)
        }
    };
    let summary = Summary {
        f: fid.value,
        t_star: fid.time,
        s_fixed: chsh.map_or(f64::NAN, |c| c.s_fixed),
        s_optimal: chsh.map_or(f64::NAN, |c| c.s_optimal),
        p_coinc: post_selected.as_ref().map_or(0.0, |s| s.p_coinc),
        n_traj,
        seed: cfg.seed,
        f_post: post_selected.as_ref().map_or(f64::NAN, |s| s.bell_fidelity()),
    };
    let series = times
        .iter()
        .zip(&pops)
        .zip(&norms)
        .map(|((&t, &populations), &norm)| SeriesRow { t, populations, norm })
        .collect();
    Ok(RunResult { scheme, method: cfg.method, series, summary, post_selected })
}

pub const SERIES_HEADER: [&str; 7] = ["t", "P_I", "P_B", "P_D", "P_E+", "P_E-", "norm"];
pub const SUMMARY_HEADER: [&str; 8] = ["F", "t*", "S_fixed", "S_optimal", "p_coinc", "n_traj", "seed", "F_post"];

fn csv_writer(path: &Path) -> Result<csv::Writer<File>, RunError> {
    let file = File::create(path).map_err(|e| RunError::io(path, e))?;
    Ok(csv::Writer::from_writer(file))
}

fn csv_err(path: &Path, e: csv::Error) -> RunError {
    RunError::io(path, e.into())
}

pub fn write_series(path: &Path, rows: &[SeriesRow]) -> Result<(), RunError> {
    let mut w = csv_writer(path)?;
    w.write_record(SERIES_HEADER).map_err(|e| csv_err(path, e))?;
    for r in rows {
        let p = r.populations.as_array();
        let rec = [num(r.t), num(p[0]), num(p[1]), num(p[2]), num(p[3]), num(p[4]), num(r.norm)];
        w.write_record(&rec).map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| RunError::io(path, e))
}

pub fn write_summary(path: &Path, s: &Summary) -> Result<(), RunError> {
    let mut w = csv_writer(path)?;
    w.write_record(SUMMARY_HEADER).map_err(|e| csv_err(path, e))?;
    let rec = [
        num(s.f),
        num(s.t_star),
        num(s.s_fixed),
        num(s.s_optimal),
        num(s.p_coinc),
        s.n_traj.to_string(),
        s.seed.to_string(),
        num(s.f_post),
    ];
    w.write_record(&rec).map_err(|e| csv_err(path, e))?;
    w.flush().map_err(|e| RunError::io(path, e))
}

/// Writes the series and summary CSVs (and the SVG plot if asked) under
/// `dir`; returns the written paths.
pub fn write_run(
    dir: &Path,
    cfg: &ExperimentConfig,
    result: &RunResult,
    with_svg: bool,
) -> Result<Vec<PathBuf>, RunError> {
    std::fs::create_dir_all(dir).map_err(|e| RunError::io(dir, e))?;
    let series = dir.join(&cfg.output.series);
    let summary = dir.join(&cfg.output.summary);
    write_series(&series, &result.series)?;
    write_summary(&summary, &result.summary)?;
    let mut written = vec![series, summary];
    if with_svg {
        let path = dir.join(&cfg.output.series_svg);
        let title = format!("{} ({}), F = {}", result.scheme, result.method.name(), num(result.summary.f));
        let doc = svg::population_plot(&title, &result.series);
        File::create(&path).and_then(|mut f| f.write_all(doc.as_bytes())).map_err(|e| RunError::io(&path, e))?;
        written.push(path);
    }
    Ok(written)
}
