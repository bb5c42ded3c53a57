//! Command-line front end.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use quadric_contact_core::{
    classify, smallness_check, EllipsoidParams, ParaboloidParams, SmallnessReport, Vector3,
};
use serde::Serialize;
use serde_json::json;

use crate::oracle::{agreement_test, DEFAULT_SAMPLES};
use crate::report::{fmt_num, round_sig, smallness_text, text, Report};
use crate::scene::SceneFile;
use crate::sweep::{sweep, SweepConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_SMALLNESS: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "quadric-contact", version, about = "Relative position of an ellipsoid and an elliptic paraboloid")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classify the scene.
    Classify(SceneArgs),
    /// Check the smallness condition.
    Check(SceneArgs),
    /// Report position changes while the ellipsoid moves along a segment.
    Sweep(SweepArgs),
    /// Compare the classifier with the sampling oracle.
    #[command(subcommand)]
    Oracle(OracleCommand),
}

#[derive(Debug, Args)]
pub struct SceneArgs {
    #[arg(long)]
    pub scene: PathBuf,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub scene: SceneArgs,
    /// Start of the centre path, as X,Y,Z.
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    pub from: Vector3<f64>,
    /// End of the centre path, as X,Y,Z.
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    pub to: Vector3<f64>,
    #[arg(long, default_value_t = 100)]
    pub steps: usize,
    /// Bracket width in the path parameter.
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
}

#[derive(Debug, Subcommand)]
pub enum OracleCommand {
    /// Agreement rate on random scenes, or on repeated trials of one scene.
    Agree(AgreeArgs),
}

#[derive(Debug, Args)]
pub struct AgreeArgs {
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    pub samples: usize,
    /// Use this scene in every trial instead of random ones.
    #[arg(long)]
    pub scene: Option<PathBuf>,
    #[arg(long)]
    pub json: bool,
}

pub fn parse_point(s: &str) -> Result<Vector3<f64>, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(format!("expected X,Y,Z, got `{s}`"));
    }
    let mut v = [0.0f64; 3];
    for (slot, part) in v.iter_mut().zip(&parts) {
        *slot = part.parse().map_err(|_| format!("`{part}` is not a number"))?;
        if !slot.is_finite() {
            return Err(format!("`{part}` is not finite"));
        }
    }
    Ok(Vector3::from(v))
}

#[derive(Serialize)]
struct SmallnessJson {
    satisfied: bool,
    margin: f64,
    ellipsoid_min_curvature: f64,
    paraboloid_max_curvature: f64,
}

impl From<&SmallnessReport> for SmallnessJson {
    fn from(s: &SmallnessReport) -> Self {
        SmallnessJson {
            satisfied: s.satisfied,
            margin: round_sig(s.margin),
            ellipsoid_min_curvature: round_sig(s.ellipsoid_min_curvature),
            paraboloid_max_curvature: round_sig(s.paraboloid_max_curvature),
        }
    }
}

fn load(path: &PathBuf, err: &mut dyn Write) -> Result<(EllipsoidParams, ParaboloidParams), i32> {
    SceneFile::load(path).and_then(|s| s.params()).map_err(|e| {
        let _ = writeln!(err, "error: {e}");
        EXIT_INPUT
    })
}

fn smallness_exit(s: &SmallnessReport, err: &mut dyn Write) -> i32 {
    if s.satisfied {
        EXIT_OK
    } else {
        let _ = writeln!(err, "warning: smallness condition violated; the position tables may not apply");
        EXIT_SMALLNESS
    }
}

fn cmd_classify(args: &SceneArgs, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let (e, p) = match load(&args.scene, err) {
        Ok(v) => v,
        Err(code) => return code,
    };
    match classify(&e, &p) {
        Ok(c) => {
            if args.json {
                let _ = writeln!(out, "{}", Report::new(&c).to_json());
            } else {
                let _ = write!(out, "{}", text(&c));
            }
            if !c.consistent() {
                let _ = writeln!(err, "warning: coefficient test disagrees: {:?}", c.coefficient_position);
            }
            smallness_exit(&c.smallness, err)
        }
        Err(x) => {
            let _ = writeln!(err, "error: {x}");
            let s = smallness_check(&e, &p);
            if s.satisfied {
                EXIT_FAILURE
            } else {
                smallness_exit(&s, err)
            }
        }
    }
}

fn cmd_check(args: &SceneArgs, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let (e, p) = match load(&args.scene, err) {
        Ok(v) => v,
        Err(code) => return code,
    };
    let s = smallness_check(&e, &p);
    if args.json {
        let _ = writeln!(out, "{}", serde_json::to_string_pretty(&SmallnessJson::from(&s)).expect("serializes"));
    } else {
        let _ = writeln!(out, "{}", smallness_text(&s));
    }
    if s.satisfied {
        EXIT_OK
    } else {
        EXIT_SMALLNESS
    }
}

fn cmd_sweep(args: &SweepArgs, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let (e, p) = match load(&args.scene.scene, err) {
        Ok(v) => v,
        Err(code) => return code,
    };
    let cfg = SweepConfig { from: args.from, to: args.to, steps: args.steps, tol: args.tol };
    if cfg.steps < 2 || !(cfg.tol > 0.0) {
        let _ = writeln!(err, "error: --steps must be at least 2 and --tol positive");
        return EXIT_INPUT;
    }
    let result = match sweep(&e, &p, &cfg) {
        Ok(r) => r,
        Err(x) => {
            let _ = writeln!(err, "error: {x}");
            return EXIT_FAILURE;
        }
    };
    for w in &result.warnings {
        let _ = writeln!(err, "warning: {w}");
    }
    if args.scene.json {
        let doc = json!({
            "events": result.events.iter().map(|ev| json!({
                "t": round_sig(ev.t),
                "from": ev.from.code(),
                "to": ev.to.code(),
                "bracket_width": round_sig(ev.bracket_width()),
            })).collect::<Vec<_>>(),
            "smallness": SmallnessJson::from(&result.smallness),
        });
        let _ = writeln!(out, "{}", serde_json::to_string_pretty(&doc).expect("serializes"));
    } else if result.events.is_empty() {
        let _ = writeln!(out, "no events");
    } else {
        for ev in &result.events {
            let _ = writeln!(
                out,
                "t={} {} -> {} (bracket {})",
                fmt_num(ev.t),
                ev.from,
                ev.to,
                fmt_num(ev.bracket_width())
            );
        }
    }
    smallness_exit(&result.smallness, err)
}

fn cmd_agree(args: &AgreeArgs, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    if args.trials == 0 {
        let _ = writeln!(err, "error: --trials must be at least 1");
        return EXIT_INPUT;
    }
    let fixed = match &args.scene {
        Some(path) => match load(path, err) {
            Ok(v) => Some(v),
            Err(code) => return code,
        },
        None => None,
    };
    let report = agreement_test(args.seed, args.trials, args.samples, fixed);
    if args.json {
        let _ = writeln!(out, "{}", serde_json::to_string_pretty(&report).expect("serializes"));
    } else {
        let _ = writeln!(
            out,
            "seed {} trials {} samples {}: compared {}, agreed {}, excluded {} (near tangency), agreement {:.4}%",
            report.seed,
            report.trials,
            report.samples,
            report.compared,
            report.agreed,
            report.excluded,
            100.0 * report.agreement_rate()
        );
        for d in &report.disagreements {
            let _ = writeln!(
                out,
                "trial {}: classifier {}, oracle {} [{}, {}]{}\n{}",
                d.trial,
                d.classifier,
                d.oracle.position_estimate,
                d.oracle.min_value,
                d.oracle.max_value,
                if d.band_edge { " (band edge)" } else { "" },
                d.scene.to_json()
            );
        }
    }
    if report.disagreements.is_empty() {
        EXIT_OK
    } else {
        EXIT_FAILURE
    }
}

/// Runs the tool on `args` (program name first) and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() { write!(err, "{rendered}") } else { write!(out, "{rendered}") };
            return code;
        }
    };
    match &cli.command {
        Command::Classify(a) => cmd_classify(a, out, err),
        Command::Check(a) => cmd_check(a, out, err),
        Command::Sweep(a) => cmd_sweep(a, out, err),
        Command::Oracle(OracleCommand::Agree(a)) => cmd_agree(a, out, err),
    }
}
