//! Command-line front end. Exit codes: 0 success, 1 invalid input,
//! 2 verification failure.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::analysis::{
    reproduce, sweep, threads_from_env, verify, FigureId, Reproduction, SweepRange, SweepResult,
    SweepSpec, SweepVariable, Tolerances, DEFAULT_MU_LIST, REPRODUCE_RAYS,
};
use crate::config::{SceneConfig, SceneModel};
use crate::report::{analyze, analyze_csv, num, sweep_csv, verify_csv};
use crate::svg::{line_plot, Series};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_VERIFY_FAILED: i32 = 2;

const DEFAULT_VERIFY_RAYS: usize = 20_000;
const DEFAULT_HEAD_MU_DEG: f64 = 45.7;

#[derive(Parser, Debug)]
#[command(name = "pillar-sight", version, about = "B-pillar blind-spot geometry: analysis, sweeps, verification")]
struct Cli {
    /// Scene config (JSON). Defaults to the bundled Odyssey scene.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file (directory for `reproduce`). Defaults to stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Also write an SVG plot (sweeps).
    #[arg(long, global = true)]
    plot: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Rays per eye for fan traces.
    #[arg(long, global = true)]
    rays: Option<usize>,
    #[arg(long, global = true, default_value_t = 100)]
    trials: usize,
    /// Sweep grid START:STOP:STEP.
    #[arg(long, global = true)]
    range: Option<SweepRange>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum SweepKind {
    Width,
    Head,
    Shift,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Closed-form quantities for one scene.
    Analyze,
    /// Parameter sweep over pillar width or head position.
    Sweep {
        #[arg(value_enum)]
        kind: SweepKind,
        /// Deflection angles in degrees, comma separated (head: first value only).
        #[arg(long, value_delimiter = ',')]
        mu: Option<Vec<f64>>,
    },
    /// Randomized comparison of closed forms against the oracles.
    Verify {
        /// Angle tolerance, degrees.
        #[arg(long)]
        angle_tol: Option<f64>,
        /// Shift tolerance, cm.
        #[arg(long)]
        shift_tol: Option<f64>,
        /// Mirror-angle tolerance, radians.
        #[arg(long)]
        kappa_tol: Option<f64>,
    },
    /// Rebuild one published figure or the in-car experiment.
    Reproduce {
        #[arg(value_parser = parse_figure)]
        figure: FigureId,
    },
}

fn parse_figure(s: &str) -> Result<FigureId, String> {
    s.parse()
}

struct Failure {
    code: i32,
    message: String,
}

fn invalid(message: impl ToString) -> Failure {
    Failure {
        code: EXIT_INVALID,
        message: message.to_string(),
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = stdout.write_all(text.as_bytes());
                    EXIT_OK
                }
                _ => {
                    let _ = stderr.write_all(text.as_bytes());
                    EXIT_INVALID
                }
            };
        }
    };
    match execute(&cli, stdout) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message);
            f.code
        }
    }
}

fn load(cli: &Cli) -> Result<SceneModel, Failure> {
    let config = match &cli.config {
        Some(p) => SceneConfig::from_path(p).map_err(invalid)?,
        None => SceneConfig::odyssey(),
    };
    config.to_model().map_err(invalid)
}

fn emit(out: Option<&Path>, text: &str, stdout: &mut dyn Write) -> Result<(), Failure> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| invalid(format!("cannot write {}: {e}", p.display()))),
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|e| invalid(format!("cannot write output: {e}"))),
    }
}

fn json<T: serde::Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("plain data serializes");
    s.push('\n');
    s
}

fn execute(cli: &Cli, stdout: &mut dyn Write) -> Result<i32, Failure> {
    let threads = threads_from_env();
    match &cli.command {
        Command::Analyze => {
            let model = load(cli)?;
            let report = analyze(&model);
            let text = match cli.format.unwrap_or(Format::Json) {
                Format::Json => json(&report),
                Format::Csv => analyze_csv(&report),
            };
            emit(cli.out.as_deref(), &text, stdout)?;
            Ok(EXIT_OK)
        }
        Command::Sweep { kind, mu } => {
            let model = load(cli)?;
            let spec = sweep_spec(*kind, mu.as_deref(), &model)?;
            let spec = match cli.range {
                Some(r) => spec.with_range(r),
                None => spec,
            }
            .with_threads(threads);
            let result = sweep(&model.geom, &model.driver, &spec).map_err(invalid)?;
            let text = match cli.format.unwrap_or(Format::Csv) {
                Format::Json => json(&result),
                Format::Csv => sweep_csv(&result),
            };
            emit(cli.out.as_deref(), &text, stdout)?;
            if let Some(p) = &cli.plot {
                emit(Some(p), &sweep_plot(&result), stdout)?;
            }
            Ok(EXIT_OK)
        }
        Command::Verify {
            angle_tol,
            shift_tol,
            kappa_tol,
        } => {
            let defaults = Tolerances::default();
            let tolerances = Tolerances {
                angle_deg: angle_tol.unwrap_or(defaults.angle_deg),
                shift_cm: shift_tol.unwrap_or(defaults.shift_cm),
                kappa_rad: kappa_tol.unwrap_or(defaults.kappa_rad),
            };
            let rays = cli.rays.unwrap_or(DEFAULT_VERIFY_RAYS);
            let report = verify(cli.trials, rays, cli.seed, &tolerances, threads).map_err(invalid)?;
            let text = match cli.format.unwrap_or(Format::Json) {
                Format::Json => json(&report),
                Format::Csv => verify_csv(&report),
            };
            emit(cli.out.as_deref(), &text, stdout)?;
            if report.passed {
                Ok(EXIT_OK)
            } else {
                let failing: Vec<&str> = report
                    .metrics
                    .iter()
                    .filter(|m| m.failures > 0)
                    .map(|m| m.metric.name())
                    .collect();
                Err(Failure {
                    code: EXIT_VERIFY_FAILED,
                    message: format!(
                        "verification failed for: {}{}",
                        failing.join(", "),
                        if report.scene_errors.is_empty() { "" } else { " (plus scene errors)" }
                    ),
                })
            }
        }
        Command::Reproduce { figure } => {
            let model = load(cli)?;
            let rays = cli.rays.unwrap_or(REPRODUCE_RAYS);
            if rays < crate::oracle::MIN_RAYS {
                return Err(invalid(format!("--rays {rays}: must be at least {}", crate::oracle::MIN_RAYS)));
            }
            let bundle =
                reproduce(*figure, &model.geom, &model.driver, rays, cli.seed, threads).map_err(invalid)?;
            let dir = cli.out.clone().unwrap_or_else(|| PathBuf::from(figure.name()));
            write_bundle(&dir, &bundle, &model, stdout)?;
            Ok(EXIT_OK)
        }
    }
}

fn sweep_spec(kind: SweepKind, mu: Option<&[f64]>, model: &SceneModel) -> Result<SweepSpec, Failure> {
    let config_mu = model.bse.map(|b| b.deflection.degrees());
    match kind {
        SweepKind::Width => Ok(SweepSpec::width_default()),
        SweepKind::Head => {
            let m = mu
                .and_then(|m| m.first().copied())
                .or(config_mu)
                .unwrap_or(DEFAULT_HEAD_MU_DEG);
            SweepSpec::head_default(m).map_err(invalid)
        }
        SweepKind::Shift => SweepSpec::shift_default(mu.unwrap_or(&DEFAULT_MU_LIST)).map_err(invalid),
    }
}

fn sweep_plot(r: &SweepResult) -> String {
    let xs: Vec<f64> = r.rows.iter().map(|row| row.x).collect();
    let series: Vec<Series> = r
        .columns
        .iter()
        .enumerate()
        .filter(|(_, c)| c.plotted)
        .map(|(i, c)| Series::from_optional(r.scenarios[c.scenario].label.clone(), &xs, &r.series(i)))
        .collect();
    let (title, x_label, y_label) = match r.variable {
        SweepVariable::PillarWidth => (
            "Binocular obstruction against pillar width",
            "pillar width W (cm)",
            "obstruction angle (deg)",
        ),
        SweepVariable::HeadPosition => (
            "Forward-facing obstruction against head position",
            "head position H0 (cm)",
            "obstruction angle (deg)",
        ),
        SweepVariable::HeadPositionShift => (
            "Head movement needed to clear the blind spot",
            "head position H0 (cm)",
            "head movement (cm)",
        ),
    };
    line_plot(title, x_label, y_label, &series)
}

fn write_bundle(dir: &Path, b: &Reproduction, model: &SceneModel, stdout: &mut dyn Write) -> Result<(), Failure> {
    std::fs::create_dir_all(dir).map_err(|e| invalid(format!("cannot create {}: {e}", dir.display())))?;
    let name = b.figure.name();
    let (csv, svg) = match (&b.sweep, &b.experiment) {
        (Some(s), _) => (sweep_csv(s), sweep_plot(s)),
        (None, Some(e)) => {
            let mut csv = String::from("quantity,value,unit\n");
            let rows = [
                ("sheet_angle", e.sheet_angle_deg, "deg"),
                ("unaided_intercept", e.unaided_intercept_cm, "cm"),
                ("aided_intercept", e.aided_intercept_cm, "cm"),
                ("inferred_mu", e.inferred_mu_deg, "deg"),
                ("ab_distance", e.ab_distance_cm, "cm"),
                ("point_a_x", e.point_a[0], "cm"),
                ("point_a_y", e.point_a[1], "cm"),
                ("point_b_x", e.point_b[0], "cm"),
                ("point_b_y", e.point_b[1], "cm"),
                ("sheet_reference_x", e.sheet_reference[0], "cm"),
                ("sheet_reference_y", e.sheet_reference[1], "cm"),
                ("computed_kappa", e.computed_kappa_deg, "deg"),
            ];
            for (q, v, u) in rows {
                csv.push_str(&format!("{q},{},{u}\n", num(v)));
            }
            let mu_alt = e.inferred_mu_at_computed_kappa_deg.map(num).unwrap_or_default();
            csv.push_str(&format!("inferred_mu_at_computed_kappa,{mu_alt},deg\n"));
            (csv, experiment_plot(e, model))
        }
        (None, None) => (String::new(), line_plot(name, "x", "y", &[])),
    };
    let files = [
        (format!("{name}.csv"), csv),
        (format!("{name}.svg"), svg),
        (format!("{name}_discrepancies.md"), b.markdown_table()),
        (format!("{name}.json"), json(b)),
    ];
    for (file, text) in files {
        let path = dir.join(&file);
        emit(Some(&path), &text, stdout)?;
        let _ = writeln!(stdout, "wrote {}", path.display());
    }
    let flagged = b
        .discrepancies
        .iter()
        .filter(|d| d.status == crate::analysis::Status::Flagged)
        .count();
    let _ = writeln!(
        stdout,
        "{name}: {} rows, {flagged} flagged",
        b.discrepancies.len()
    );
    Ok(())
}

fn experiment_plot(e: &crate::analysis::ExperimentSummary, model: &SceneModel) -> String {
    let g = &model.geom;
    let eye = model.driver.forward_left_eye();
    let tip = g.mirror_tip();
    let base = g.mirror_base();
    let p = |a: [f64; 2]| (a[0], a[1]);
    let series = vec![
        Series {
            label: "pillar".into(),
            points: vec![(0.0, g.pillar_offset), (g.pillar_width, g.pillar_offset)],
        },
        Series {
            label: "mirror".into(),
            points: vec![(base.x, base.y), (tip.x, tip.y)],
        },
        Series {
            label: "sheet".into(),
            points: vec![(tip.x, tip.y), p(e.sheet_reference), p(e.point_a), p(e.point_b)],
        },
        Series {
            label: "unaided".into(),
            points: vec![(eye.x, eye.y), p(e.deflection_point), p(e.point_a)],
        },
        Series {
            label: "aided".into(),
            points: vec![(eye.x, eye.y), p(e.deflection_point), p(e.point_b)],
        },
    ];
    line_plot("In-car measurement, plan view", "x (cm)", "y (cm)", &series)
}
