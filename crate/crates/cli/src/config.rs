//! Flat `key = value` experiment configuration.
//!
//! One key per line, dotted names, `#` starts a comment. Times are in units
//! of `1/g` and rates in units of `g`, where `g` is the peak vacuum Rabi
//! frequency. See the README for the full key list.

use std::collections::HashSet;
use std::fmt;
use std::path::Path;

use cqed_pairs_core::pulses::{
    calibrate_pi, sequential_pi_schedule, stirap_schedule, PulseShape, CAVITY_ONE_RABI_FACTOR, CAVITY_TWO_RABI_FACTOR,
    GAUSSIAN_CUTOFF,
};
use cqed_pairs_core::statespace::{CouplingModel, SystemParams};
use cqed_pairs_core::Timeline;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },

    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },

    #[error("line {line}: duplicate key `{key}`")]
    DuplicateKey { line: usize, key: String },

    #[error("line {line}: invalid value for `{key}`: {message}")]
    InvalidValue { line: usize, key: String, message: String },

    #[error("missing required key `{key}` for scheme {scheme}")]
    Missing { key: &'static str, scheme: Scheme },

    #[error("invalid configuration: {0}")]
    Inconsistent(String),

    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    Ro,
    Stirap,
}

impl Scheme {
    pub fn name(self) -> &'static str {
        match self {
            Scheme::Ro => "ro",
            Scheme::Stirap => "stirap",
        }
    }

    fn parse(s: &str) -> Result<Self, String> {
        match s {
            "ro" => Ok(Scheme::Ro),
            "stirap" => Ok(Scheme::Stirap),
            _ => Err(format!("expected `ro` or `stirap`, got `{s}`")),
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Deterministic evolution under `H'`; exact ensemble populations in the
    /// two-excitation manifold.
    NoJump,
    Mcwf,
    Lindblad,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::NoJump => "nojump",
            Method::Mcwf => "mcwf",
            Method::Lindblad => "lindblad",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoSpec {
    pub shape: PulseShape,
    pub tau: Option<f64>,
    pub gap: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StirapSpec {
    pub tau: Option<f64>,
    /// Defaults to `tau`.
    pub delay: Option<f64>,
    pub g_peak: f64,
}

/// Per-cavity overrides applied on top of the scheme's schedule.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PulseOverride {
    pub shape: Option<PulseShape>,
    pub g_peak: Option<f64>,
    pub center: Option<f64>,
    pub tau: Option<f64>,
    pub cutoff: Option<f64>,
}

impl PulseOverride {
    fn is_empty(&self) -> bool {
        *self == Self::default()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub param: &'static str,
    pub min: Option<f64>,
    pub max: Option<f64>,
    pub steps: Option<usize>,
}

impl Axis {
    pub fn values(&self) -> Vec<f64> {
        let (a, b, n) = (self.min.unwrap_or(0.0), self.max.unwrap_or(0.0), self.steps.unwrap_or(2));
        (0..n).map(|k| if k + 1 == n { b } else { a + (b - a) * k as f64 / (n - 1) as f64 }).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputPaths {
    pub series: String,
    pub summary: String,
    pub series_svg: String,
    pub grid: String,
    pub grid_svg: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub scheme: Option<Scheme>,
    pub method: Method,
    pub ro: RoSpec,
    pub stirap: StirapSpec,
    /// Midpoint of the pulse sequence.
    pub center: f64,
    pub pulse: [PulseOverride; 2],
    pub delta_plus: f64,
    pub delta_minus: f64,
    pub gamma: f64,
    pub kappa: f64,
    pub eta: f64,
    pub coupling: CouplingModel,
    pub n_traj: usize,
    pub seed: u64,
    pub t_start: Option<f64>,
    pub t_end: Option<f64>,
    pub points: usize,
    pub dt_max: Option<f64>,
    pub output: OutputPaths,
    pub sweep_schemes: Option<Vec<Scheme>>,
    pub sweep_x: Option<Axis>,
    pub sweep_y: Option<Axis>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            scheme: None,
            method: Method::Mcwf,
            ro: RoSpec { shape: PulseShape::Gaussian, tau: None, gap: 0.0 },
            stirap: StirapSpec { tau: None, delay: None, g_peak: 1.0 },
            center: 0.0,
            pulse: [PulseOverride::default(); 2],
            delta_plus: 0.0,
            delta_minus: 0.0,
            gamma: 0.0,
            kappa: 0.0,
            eta: 1.0,
            coupling: CouplingModel::Confined,
            n_traj: 1000,
            seed: 0,
            t_start: None,
            t_end: None,
            points: 1000,
            dt_max: None,
            output: OutputPaths {
                series: "series.csv".into(),
                summary: "summary.csv".into(),
                series_svg: "series.svg".into(),
                grid: "grid.csv".into(),
                grid_svg: "grid.svg".into(),
            },
            sweep_schemes: None,
            sweep_x: None,
            sweep_y: None,
        }
    }
}

/// Numeric keys a sweep may vary. `detuning.mean` and `detuning.diff` set
/// `(Delta+ + Delta-)/2` and `(Delta+ - Delta-)/2` while keeping the other.
pub const SWEEPABLE: &[&str] = &[
    "gamma",
    "kappa",
    "delta_plus",
    "delta_minus",
    "detuning.mean",
    "detuning.diff",
    "eta",
    "center",
    "ro.tau",
    "ro.gap",
    "stirap.tau",
    "stirap.delay",
    "stirap.g_peak",
    "pulse1.g_peak",
    "pulse1.center",
    "pulse1.tau",
    "pulse2.g_peak",
    "pulse2.center",
    "pulse2.tau",
];

enum KeyError {
    Unknown,
    Value(String),
}

impl From<String> for KeyError {
    fn from(s: String) -> Self {
        KeyError::Value(s)
    }
}

fn number(v: &str) -> Result<f64, String> {
    let x: f64 = v.parse().map_err(|_| format!("expected a number, got `{v}`"))?;
    if x.is_finite() {
        Ok(x)
    } else {
        Err(format!("must be finite, got `{v}`"))
    }
}

fn non_negative(v: &str) -> Result<f64, String> {
    let x = number(v)?;
    if x >= 0.0 {
        Ok(x)
    } else {
        Err(format!("must be >= 0, got {x}"))
    }
}

fn positive(v: &str) -> Result<f64, String> {
    let x = number(v)?;
    if x > 0.0 {
        Ok(x)
    } else {
        Err(format!("must be > 0, got {x}"))
    }
}

fn count(v: &str, min: usize) -> Result<usize, String> {
    let n: usize = v.parse().map_err(|_| format!("expected a non-negative integer, got `{v}`"))?;
    if n >= min {
        Ok(n)
    } else {
        Err(format!("must be at least {min}, got {n}"))
    }
}

fn shape(v: &str) -> Result<PulseShape, String> {
    match v {
        "gaussian" => Ok(PulseShape::Gaussian),
        "square" => Ok(PulseShape::Square),
        _ => Err(format!("expected `gaussian` or `square`, got `{v}`")),
    }
}

fn sweep_param(v: &str) -> Result<&'static str, String> {
    SWEEPABLE
        .iter()
        .copied()
        .find(|k| *k == v)
        .ok_or_else(|| format!("`{v}` is not a sweepable parameter (one of {})", SWEEPABLE.join(", ")))
}

fn axis(slot: &mut Option<Axis>) -> &mut Axis {
    slot.get_or_insert(Axis { param: "", min: None, max: None, steps: None })
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = Self::default();
        let mut seen = HashSet::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let Some((key, value)) = content.split_once('=') else {
                return Err(ConfigError::Syntax { line, message: format!("expected `key = value`, got `{content}`") });
            };
            let (key, value) = (key.trim(), value.trim());
            if key.is_empty() || key.contains(char::is_whitespace) {
                return Err(ConfigError::Syntax { line, message: format!("malformed key `{key}`") });
            }
            if value.is_empty() {
                return Err(ConfigError::InvalidValue { line, key: key.into(), message: "empty value".into() });
            }
            if !seen.insert(key.to_string()) {
                return Err(ConfigError::DuplicateKey { line, key: key.into() });
            }
            cfg.apply(key, value).map_err(|e| match e {
                KeyError::Unknown => ConfigError::UnknownKey { line, key: key.into() },
                KeyError::Value(message) => ConfigError::InvalidValue { line, key: key.into(), message },
            })?;
        }
        cfg.check()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| ConfigError::Io { path: path.display().to_string(), source })?;
        Self::parse(&text)
    }

    fn apply(&mut self, key: &str, v: &str) -> Result<(), KeyError> {
        match key {
            "scheme" => self.scheme = Some(Scheme::parse(v)?),
            "method" => {
                self.method = match v {
                    "nojump" => Method::NoJump,
                    "mcwf" => Method::Mcwf,
                    "lindblad" => Method::Lindblad,
                    _ => return Err(format!("expected `nojump`, `mcwf` or `lindblad`, got `{v}`").into()),
                }
            }
            "coupling" => {
                self.coupling = match v {
                    "confined" => CouplingModel::Confined,
                    "full" => CouplingModel::Full,
                    _ => return Err(format!("expected `confined` or `full`, got `{v}`").into()),
                }
            }
            "ro.shape" => self.ro.shape = shape(v)?,
            "ro.tau" => self.ro.tau = Some(positive(v)?),
            "ro.gap" => self.ro.gap = non_negative(v)?,
            "stirap.tau" => self.stirap.tau = Some(positive(v)?),
            "stirap.delay" => self.stirap.delay = Some(number(v)?),
            "stirap.g_peak" => self.stirap.g_peak = positive(v)?,
            "center" => self.center = number(v)?,
            "delta_plus" => self.delta_plus = number(v)?,
            "delta_minus" => self.delta_minus = number(v)?,
            "detuning.mean" => {
                let (m, d) = (number(v)?, (self.delta_plus - self.delta_minus) / 2.0);
                (self.delta_plus, self.delta_minus) = (m + d, m - d);
            }
            "detuning.diff" => {
                let (m, d) = ((self.delta_plus + self.delta_minus) / 2.0, number(v)?);
                (self.delta_plus, self.delta_minus) = (m + d, m - d);
            }
            "gamma" => self.gamma = non_negative(v)?,
            "kappa" => self.kappa = non_negative(v)?,
            "eta" => {
                let x = number(v)?;
                if !(0.0..=1.0).contains(&x) {
                    return Err(format!("must lie in [0, 1], got {x}").into());
                }
                self.eta = x;
            }
            "n_traj" => self.n_traj = count(v, 1)?,
            "seed" => self.seed = v.parse().map_err(|_| format!("expected an unsigned 64-bit integer, got `{v}`"))?,
            "t_start" => self.t_start = Some(number(v)?),
            "t_end" => self.t_end = Some(number(v)?),
            "points" => self.points = count(v, 2)?,
            "dt_max" => self.dt_max = Some(positive(v)?),
            "output.series" => self.output.series = v.into(),
            "output.summary" => self.output.summary = v.into(),
            "output.series_svg" => self.output.series_svg = v.into(),
            "output.grid" => self.output.grid = v.into(),
            "output.grid_svg" => self.output.grid_svg = v.into(),
            "sweep.schemes" => {
                let list = v.split(',').map(|s| Scheme::parse(s.trim())).collect::<Result<Vec<_>, _>>()?;
                self.sweep_schemes = Some(list);
            }
            _ => return self.apply_nested(key, v),
        }
        Ok(())
    }

    fn apply_nested(&mut self, key: &str, v: &str) -> Result<(), KeyError> {
        if let Some(rest) = key.strip_prefix("sweep.") {
            let (name, field) = rest.split_once('.').unwrap_or((rest, ""));
            let slot = match name {
                "x" => &mut self.sweep_x,
                "y" => &mut self.sweep_y,
                _ => return Err(KeyError::Unknown),
            };
            match field {
                "" => axis(slot).param = sweep_param(v)?,
                "min" => axis(slot).min = Some(number(v)?),
                "max" => axis(slot).max = Some(number(v)?),
                "steps" => axis(slot).steps = Some(count(v, 2)?),
                _ => return Err(KeyError::Unknown),
            }
            return Ok(());
        }
        let (which, field) = match key.split_once('.') {
            Some(("pulse1", f)) => (0, f),
            Some(("pulse2", f)) => (1, f),
            _ => return Err(KeyError::Unknown),
        };
        let p = &mut self.pulse[which];
        match field {
            "shape" => p.shape = Some(shape(v)?),
            "g_peak" => p.g_peak = Some(non_negative(v)?),
            "center" => p.center = Some(number(v)?),
            "tau" => p.tau = Some(positive(v)?),
            "cutoff" => p.cutoff = Some(positive(v)?),
            _ => return Err(KeyError::Unknown),
        }
        Ok(())
    }

    /// Sets a sweepable parameter, with the same validation as the file.
    pub fn set(&mut self, key: &str, value: f64) -> Result<(), ConfigError> {
        if !SWEEPABLE.contains(&key) {
            return Err(ConfigError::Inconsistent(format!("`{key}` is not a sweepable parameter")));
        }
        self.apply(key, &value.to_string()).map_err(|e| match e {
            KeyError::Unknown => ConfigError::Inconsistent(format!("unknown key `{key}`")),
            KeyError::Value(message) => ConfigError::Inconsistent(format!("`{key}` = {value}: {message}")),
        })
    }

    fn check(&self) -> Result<(), ConfigError> {
        if let (Some(a), Some(b)) = (self.t_start, self.t_end) {
            if !(b > a) {
                return Err(ConfigError::Inconsistent(format!("t_end ({b}) must exceed t_start ({a})")));
            }
        }
        for (name, slot) in [("sweep.x", &self.sweep_x), ("sweep.y", &self.sweep_y)] {
            if let Some(ax) = slot {
                if ax.param.is_empty() {
                    return Err(ConfigError::Inconsistent(format!("`{name}` must name the swept parameter")));
                }
                if ax.min.is_none() || ax.max.is_none() || ax.steps.is_none() {
                    return Err(ConfigError::Inconsistent(format!("`{name}` needs .min, .max and .steps")));
                }
            }
        }
        if self.sweep_y.is_some() && self.sweep_x.is_none() {
            return Err(ConfigError::Inconsistent("`sweep.y` given without `sweep.x`".into()));
        }
        Ok(())
    }

    /// Schemes a run or sweep covers.
    pub fn schemes(&self) -> Result<Vec<Scheme>, ConfigError> {
        match (&self.sweep_schemes, self.scheme) {
            (Some(list), _) => Ok(list.clone()),
            (None, Some(s)) => Ok(vec![s]),
            (None, None) => Err(ConfigError::Inconsistent("missing required key `scheme`".into())),
        }
    }

    /// Physical parameters of the run for `scheme`.
    pub fn system_params(&self, scheme: Scheme) -> Result<SystemParams, ConfigError> {
        let (mut first, mut second) = match scheme {
            Scheme::Ro => {
                let tau = self.ro.tau.ok_or(ConfigError::Missing { key: "ro.tau", scheme })?;
                sequential_pi_schedule(self.ro.shape, tau, self.ro.gap, 0.0)
                    .map(|(a, b)| {
                        // Center the pair on `center`.
                        let mid = (a.support().0 + b.support().1) / 2.0;
                        (a.with_center(a.center - mid + self.center), b.with_center(b.center - mid + self.center))
                    })
                    .map_err(|e| ConfigError::Inconsistent(e.to_string()))?
            }
            Scheme::Stirap => {
                let tau = self.stirap.tau.ok_or(ConfigError::Missing { key: "stirap.tau", scheme })?;
                let delay = self.stirap.delay.unwrap_or(tau);
                let s = stirap_schedule(self.stirap.g_peak, tau, delay, self.center + delay / 2.0)
                    .map_err(|e| ConfigError::Inconsistent(e.to_string()))?;
                (s.cavity_one, s.cavity_two)
            }
        };
        for ((sched, ov), factor) in
            [&mut first, &mut second].into_iter().zip(&self.pulse).zip([CAVITY_ONE_RABI_FACTOR, CAVITY_TWO_RABI_FACTOR])
        {
            if ov.is_empty() {
                continue;
            }
            if let Some(s) = ov.shape {
                sched.shape = s;
                sched.cutoff = match s {
                    PulseShape::Gaussian => GAUSSIAN_CUTOFF,
                    PulseShape::Square => 1.0,
                };
            }
            sched.center = ov.center.unwrap_or(sched.center);
            sched.tau = ov.tau.unwrap_or(sched.tau);
            sched.cutoff = ov.cutoff.unwrap_or(sched.cutoff);
            match ov.g_peak {
                Some(g) => sched.g_peak = g,
                // Sequential pulses keep their pi area.
                None if scheme == Scheme::Ro => {
                    *sched = calibrate_pi(sched, factor).map_err(|e| ConfigError::Inconsistent(e.to_string()))?
                }
                None => {}
            }
            sched.validate().map_err(|e| ConfigError::Inconsistent(e.to_string()))?;
        }
        let params = SystemParams::new(first, second)
            .with_decay(self.gamma, self.kappa)
            .with_detunings(self.delta_plus, self.delta_minus)
            .with_coupling(self.coupling);
        let params = SystemParams { eta: self.eta, ..params };
        params.validate().map_err(|e| ConfigError::Inconsistent(e.to_string()))?;
        Ok(params)
    }

    pub fn timeline(&self, params: &SystemParams) -> Timeline {
        let cover = Timeline::covering(params, self.points);
        let mut tl = Timeline::new(self.t_start.unwrap_or(cover.start), self.t_end.unwrap_or(cover.end), self.points);
        tl.dt_max = self.dt_max;
        tl
    }

    /// Full validation, including the scheme-specific keys.
    pub fn validate(&self) -> Result<(), ConfigError> {
        for scheme in self.schemes()? {
            let p = self.system_params(scheme)?;
            self.timeline(&p).validate().map_err(|e| ConfigError::Inconsistent(e.to_string()))?;
        }
        Ok(())
    }
}

/// Parses and fully validates a configuration.
pub fn validate_config(text: &str) -> Result<ExperimentConfig, ConfigError> {
    let cfg = ExperimentConfig::parse(text)?;
    cfg.validate()?;
    Ok(cfg)
}
