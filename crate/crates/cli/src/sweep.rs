//! One- and two-parameter grids of independent experiments.

use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::config::{ConfigError, ExperimentConfig, Scheme};
use crate::experiment::{run_experiment, RunError};
use crate::format::num;
use crate::svg;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub scheme: Scheme,
    pub x: f64,
    pub y: Option<f64>,
    pub f: f64,
    pub s_fixed: f64,
    pub s_optimal: f64,
    pub p_coinc: f64,
    pub f_post: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub x_param: &'static str,
    pub y_param: Option<&'static str>,
    pub x_values: Vec<f64>,
    pub y_values: Vec<f64>,
    /// Scheme-major, then `x`, then `y`.
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    pub fn rows_for(&self, scheme: Scheme) -> impl Iterator<Item = &SweepRow> {
        self.rows.iter().filter(move |r| r.scheme == scheme)
    }

    pub fn header(&self) -> Vec<&'static str> {
        let mut h = vec!["scheme", self.x_param];
        h.extend(self.y_param);
        h.extend(["F", "S_fixed", "S_optimal", "p_coinc", "F_post"]);
        h
    }
}

/// Runs every grid point of the `sweep.*` keys in `cfg` on the current rayon
/// pool. Row order is fixed by the grid, not by completion order.
pub fn run_sweep(cfg: &ExperimentConfig) -> Result<SweepResult, RunError> {
    let x = cfg.sweep_x.ok_or_else(|| ConfigError::Inconsistent("a sweep needs `sweep.x`".into()))?;
    let schemes = cfg.schemes()?;
    cfg.validate()?;
    let x_values = x.values();
    let y_values = cfg.sweep_y.map(|a| a.values()).unwrap_or_default();
    let mut points = Vec::new();
    for &scheme in &schemes {
        for &xv in &x_values {
            if cfg.sweep_y.is_some() {
                points.extend(y_values.iter().map(|&yv| (scheme, xv, Some(yv))));
            } else {
                points.push((scheme, xv, None));
            }
        }
    }
    let rows = points
        .into_par_iter()
        .map(|(scheme, xv, yv)| {
            let mut c = cfg.clone();
            c.set(x.param, xv)?;
            if let (Some(ax), Some(v)) = (cfg.sweep_y, yv) {
                c.set(ax.param, v)?;
            }
            let r = run_experiment(&c, scheme)?;
            let s = r.summary;
            Ok(SweepRow {
                scheme,
                x: xv,
                y: yv,
                f: s.f,
                s_fixed: s.s_fixed,
                s_optimal: s.s_optimal,
                p_coinc: s.p_coinc,
                f_post: s.f_post,
            })
        })
        .collect::<Result<Vec<_>, RunError>>()?;
    Ok(SweepResult { x_param: x.param, y_param: cfg.sweep_y.map(|a| a.param), x_values, y_values, rows })
}

pub fn write_grid(path: &Path, result: &SweepResult) -> Result<(), RunError> {
    let err = |e: csv::Error| RunError::io(path, e.into());
    let file = File::create(path).map_err(|e| RunError::io(path, e))?;
    let mut w = csv::Writer::from_writer(file);
    w.write_record(result.header()).map_err(err)?;
    for r in &result.rows {
        let mut rec = vec![r.scheme.name().to_string(), num(r.x)];
        rec.extend(r.y.map(num));
        rec.extend([num(r.f), num(r.s_fixed), num(r.s_optimal), num(r.p_coinc), num(r.f_post)]);
        w.write_record(&rec).map_err(err)?;
    }
    w.flush().map_err(|e| RunError::io(path, e))
}

pub fn write_sweep(
    dir: &Path,
    cfg: &ExperimentConfig,
    result: &SweepResult,
    with_svg: bool,
) -> Result<Vec<PathBuf>, RunError> {
    std::fs::create_dir_all(dir).map_err(|e| RunError::io(dir, e))?;
    let grid = dir.join(&cfg.output.grid);
    write_grid(&grid, result)?;
    let mut written = vec![grid];
    if with_svg {
        let path = dir.join(&cfg.output.grid_svg);
        let doc = if result.y_param.is_some() { svg::heatmaps(result) } else { svg::sweep_lines(result) };
        File::create(&path).and_then(|mut f| f.write_all(doc.as_bytes())).map_err(|e| RunError::io(&path, e))?;
        written.push(path);
    }
    Ok(written)
}
