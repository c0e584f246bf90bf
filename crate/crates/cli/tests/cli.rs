use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use cqed_pairs::config::{validate_config, ExperimentConfig, Scheme};
use cqed_pairs::experiment::{run_experiment, write_run};
use cqed_pairs::sweep::run_sweep;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cqed-pairs"))
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn write_config(dir: &Path, text: &str) -> PathBuf {
    let path = dir.join("exp.conf");
    std::fs::write(&path, text).unwrap();
    path
}

fn run_cli(args: &[&str], config: &Path, out: &Path) -> Output {
    bin().args(args).arg("--config").arg(config).arg("--out").arg(out).output().unwrap()
}

const SMALL_RO: &str = "scheme = ro\nro.tau = 0.6\ngamma = 0.05\nkappa = 0.005\nn_traj = 300\nseed = 5\npoints = 120\n";

#[test]
fn lossless_ro_config_has_unit_fidelity() {
    for method in ["nojump", "mcwf", "lindblad"] {
        let cfg = validate_config(&format!("scheme = ro\nro.tau = 0.6\nmethod = {method}\nn_traj = 10\n")).unwrap();
        let r = run_experiment(&cfg, Scheme::Ro).unwrap();
        assert!((r.summary.f - 1.0).abs() < 1e-6, "{method}: {}", r.summary.f);
    }
}

#[test]
fn all_figure_configs_validate() {
    for name in ["fig3a", "fig3b", "fig3c", "fig4ab", "fig4cd", "fig5"] {
        let cfg = ExperimentConfig::load(&configs().join(format!("{name}.conf"))).unwrap();
        cfg.validate().unwrap_or_else(|e| panic!("{name}: {e}"));
    }
}

#[test]
fn summary_fidelity_is_the_series_maximum() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = validate_config(SMALL_RO).unwrap();
    let r = run_experiment(&cfg, Scheme::Ro).unwrap();
    write_run(dir.path(), &cfg, &r, false).unwrap();
    let mut series = csv::Reader::from_path(dir.path().join("series.csv")).unwrap();
    assert_eq!(series.headers().unwrap(), vec!["t", "P_I", "P_B", "P_D", "P_E+", "P_E-", "norm"]);
    let column: Vec<f64> = series.records().map(|r| r.unwrap()[4].parse().unwrap()).collect();
    assert_eq!(column.len(), 120);
    let max = column.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut summary = csv::Reader::from_path(dir.path().join("summary.csv")).unwrap();
    assert_eq!(
        summary.headers().unwrap(),
        vec!["F", "t*", "S_fixed", "S_optimal", "p_coinc", "n_traj", "seed", "F_post"]
    );
    let row = summary.records().next().unwrap().unwrap();
    assert_eq!(row[0].parse::<f64>().unwrap(), max);
    assert_eq!((&row[5], &row[6]), ("300", "5"));
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), SMALL_RO);
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert!(run_cli(&["run", "--svg"], &config, &a).status.success());
    assert!(run_cli(&["run", "--svg", "--workers", "3"], &config, &b).status.success());
    for f in ["series.csv", "summary.csv", "series.svg"] {
        assert_eq!(std::fs::read(a.join(f)).unwrap(), std::fs::read(b.join(f)).unwrap(), "{f}");
    }
    // A different seed changes the sample.
    let c = dir.path().join("c");
    assert!(run_cli(&["run", "--seed", "6"], &config, &c).status.success());
    assert_ne!(std::fs::read(a.join("series.csv")).unwrap(), std::fs::read(c.join("series.csv")).unwrap());
}

#[test]
fn sweep_covers_every_grid_point_in_row_major_order() {
    let text = "sweep.schemes = ro, stirap\nmethod = nojump\nro.tau = 0.6\nstirap.tau = 3\npoints = 60\n\
                sweep.x = gamma\nsweep.x.min = 0\nsweep.x.max = 0.1\nsweep.x.steps = 3\n\
                sweep.y = kappa\nsweep.y.min = 0\nsweep.y.max = 0.05\nsweep.y.steps = 4\n";
    let cfg = validate_config(text).unwrap();
    let r = run_sweep(&cfg).unwrap();
    assert_eq!(r.rows.len(), 2 * 3 * 4);
    let keys: Vec<_> = r.rows.iter().map(|row| (row.scheme, row.x, row.y.unwrap())).collect();
    assert_eq!(keys[0], (Scheme::Ro, 0.0, 0.0));
    assert_eq!(keys[1], (Scheme::Ro, 0.0, 0.05 / 3.0));
    assert_eq!(keys[4], (Scheme::Ro, 0.05, 0.0));
    assert_eq!(keys[12], (Scheme::Stirap, 0.0, 0.0));
    assert_eq!(r.header(), vec!["scheme", "gamma", "kappa", "F", "S_fixed", "S_optimal", "p_coinc", "F_post"]);
    // F falls with both rates.
    for scheme in [Scheme::Ro, Scheme::Stirap] {
        let f: Vec<f64> = r.rows_for(scheme).map(|row| row.f).collect();
        for i in 0..3 {
            for j in 0..4 {
                if i + 1 < 3 {
                    assert!(f[(i + 1) * 4 + j] < f[i * 4 + j]);
                }
                if j + 1 < 4 {
                    assert!(f[i * 4 + j + 1] < f[i * 4 + j]);
                }
            }
        }
    }
}

#[test]
fn sweep_cli_writes_grid_and_contour() {
    let dir = tempfile::tempdir().unwrap();
    let text = "scheme = stirap\nmethod = nojump\nstirap.tau = 3\npoints = 60\n\
                sweep.x = detuning.diff\nsweep.x.min = -0.2\nsweep.x.max = 0.2\nsweep.x.steps = 3\n\
                sweep.y = detuning.mean\nsweep.y.min = 0\nsweep.y.max = 0.2\nsweep.y.steps = 2\n";
    let config = write_config(dir.path(), text);
    let out = run_cli(&["sweep", "--svg"], &config, dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let grid = std::fs::read_to_string(dir.path().join("grid.csv")).unwrap();
    assert_eq!(grid.lines().count(), 1 + 6);
    assert!(grid.starts_with("scheme,detuning.diff,detuning.mean,F,S_fixed"));
    let svg = std::fs::read_to_string(dir.path().join("grid.svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
}

#[test]
fn config_errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    for (text, needle) in [
        ("scheme = ro\nro.tau = 0.6\ngamme = 0.1\n", "gamme"),
        ("scheme = ro\nro.tau = 0.6\nkappa = -1\n", "kappa"),
        ("scheme = ro\nro.tau = 0.6\nn_traj = 0\n", "n_traj"),
        ("scheme = ro\n", "ro.tau"),
    ] {
        let config = write_config(dir.path(), text);
        let out = run_cli(&["run"], &config, dir.path());
        assert_eq!(out.status.code(), Some(1), "{text}");
        assert!(String::from_utf8_lossy(&out.stderr).contains(needle), "{text}");
    }
    let out = run_cli(&["run"], &dir.path().join("missing.conf"), dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(bin().args(["run", "--bogus"]).output().unwrap().status.code(), Some(1));
    assert_eq!(bin().arg("--help").output().unwrap().status.code(), Some(0));
}

#[test]
fn unwritable_output_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "scheme = ro\nro.tau = 0.6\nmethod = nojump\npoints = 20\n");
    // A regular file where the output directory should be.
    let blocker = dir.path().join("blocker");
    std::fs::write(&blocker, "").unwrap();
    let out = run_cli(&["run"], &config, &blocker.join("sub"));
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("cannot write"));
}

#[test]
fn check_subcommand_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin().args(["check", "--traj", "2000", "--out"]).arg(dir.path()).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    let report = std::fs::read_to_string(dir.path().join("check.csv")).unwrap();
    assert_eq!(report.lines().count(), 1 + 7);
    assert!(!report.contains(",false,"));
}
