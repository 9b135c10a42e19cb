//! Command-line driver: argument parsing, config assembly, subcommand
//! dispatch and report output. `main` only forwards to [`run_from`].

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::config::{Config, ConfigError, ControlSpec, MayLeonardSpec, MethodChoice, Model, SetSpec, WindowSpec};
use crate::error::Error;
use crate::feedback::{close_loop, synthesize_ramp_feedback, RampFeedback, DEFAULT_BAND_WIDTH, DEFAULT_NOMINAL};
use crate::field::VectorField;
use crate::glv::{interior_equilibrium_stable, may_leonard_equilibria, MayLeonardParams};
use crate::ode::{self, SimOptions, TrajectoryStatus, VertexRun, CONTAINMENT_TOL};
use crate::report::{self, ContainmentSidecar};
use crate::sets::RectangularSet;
use crate::sizos::{
    may_leonard_sizos_condition, minimax_margin_rect, sizos_rect_glv_with_floor, ControlThresholds, ForcedGlv,
    MinimaxOutcome,
};
use crate::sos::{
    find_outward_witness, may_leonard_sos_condition_with_floors, sos_rect_glv_with_floor, sos_rect_sampled, Verdict,
};
use crate::sweep::{
    sweep_competition_coeffs, sweep_population_bounds, trapezoid_lines, triangle_vertices, BoundsWindow, CoeffWindow,
    Floors, SweepResult, TrapezoidLines, UpperRange,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NEGATIVE: i32 = 3;
pub const EXIT_NUMERICAL: i32 = 4;

pub const DEFAULT_RESOLUTION: usize = 41;
pub const DEFAULT_CONTROL_RESOLUTION: usize = 11;
pub const DEFAULT_T_END: f64 = 100.0;

#[derive(Debug, Parser)]
#[command(name = "sos-glv", version, about = "Invariance and feedback sustainability checks for Lotka-Volterra models")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide positive invariance of the state set.
    CheckSos,
    /// Decide whether some admissible feedback keeps the state in the set.
    CheckSizos,
    /// Build the saturating ramp feedback for the configured control box.
    Synthesize,
    /// Simulate from every vertex of the set (closed loop if controls are given).
    Simulate,
    /// Classify a grid of May-Leonard bounds or coefficients.
    Sweep {
        #[arg(value_enum)]
        kind: SweepKind,
    },
    /// Reproduce one of the built-in May-Leonard case studies.
    CaseStudy {
        #[arg(value_enum)]
        case: Case,
        /// Print the embedded configuration and exit.
        #[arg(long)]
        show_config: bool,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepKind {
    /// (nl, nu) plane for fixed alpha, beta.
    Bounds,
    /// (alpha, beta) plane for fixed nl, nu.
    Coeffs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Case {
    #[value(name = "1a")]
    C1a,
    #[value(name = "1b")]
    C1b,
    #[value(name = "2")]
    C2,
    #[value(name = "3")]
    C3,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, Default, Args)]
pub struct Common {
    /// JSON configuration file; flags below override its keys.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Directory for CSV and sidecar files.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Exit with status 3 when the decision is negative.
    #[arg(long, global = true)]
    pub strict: bool,
    #[arg(long, global = true)]
    pub resolution: Option<usize>,
    #[arg(long, global = true)]
    pub control_resolution: Option<usize>,
    #[arg(long = "t-end", global = true)]
    pub t_end: Option<f64>,
    #[arg(long, global = true, value_enum)]
    pub method: Option<MethodChoice>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub alpha: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub beta: Option<f64>,
    #[arg(long, global = true)]
    pub nl: Option<f64>,
    #[arg(long, global = true)]
    pub nu: Option<f64>,
    #[arg(long, global = true)]
    pub al: Option<f64>,
    #[arg(long, global = true)]
    pub au: Option<f64>,
    #[arg(long, global = true)]
    pub band_width: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Debug)]
enum Failure {
    Config(ConfigError),
    Numerical(String),
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e)
    }
}

/// Maps a library error raised while evaluating the config entry `key`.
fn lib(key: &'static str) -> impl Fn(Error) -> Failure {
    move |e| match e {
        Error::Numerical(m) | Error::InsufficientSamples(m) => Failure::Numerical(m),
        other => Failure::Config(ConfigError::new(key, other.to_string())),
    }
}

struct Done {
    stdout: String,
    negative: bool,
}

pub fn run_from<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(&cli),
        Err(e) => {
            let text = e.render().to_string();
            if e.use_stderr() {
                Outcome { code: EXIT_CONFIG, stdout: String::new(), stderr: text }
            } else {
                Outcome { code: EXIT_OK, stdout: text, stderr: String::new() }
            }
        }
    }
}

pub fn run(cli: &Cli) -> Outcome {
    match dispatch(cli) {
        Ok(done) => Outcome {
            code: if done.negative && cli.common.strict { EXIT_NEGATIVE } else { EXIT_OK },
            stdout: done.stdout,
            stderr: String::new(),
        },
        Err(Failure::Config(e)) => Outcome {
            code: EXIT_CONFIG,
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        },
        Err(Failure::Numerical(m)) => Outcome {
            code: EXIT_NUMERICAL,
            stdout: String::new(),
            stderr: format!("numerical failure: {m}\n"),
        },
    }
}

/// The config file (if any) with command-line overrides applied.
pub fn load_config(common: &Common) -> Result<Config, ConfigError> {
    let mut cfg = match &common.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| ConfigError::new("--config", format!("cannot read {}: {e}", path.display())))?;
            Config::from_json(&text)?
        }
        None => Config::default(),
    };
    apply_overrides(&mut cfg, common)?;
    Ok(cfg)
}

fn apply_overrides(cfg: &mut Config, c: &Common) -> Result<(), ConfigError> {
    match (c.alpha, c.beta) {
        (Some(alpha), Some(beta)) => {
            cfg.may_leonard = Some(MayLeonardSpec { alpha, beta });
            cfg.r = None;
            cfg.alpha = None;
            cfg.n = None;
        }
        (None, None) => {}
        (Some(_), None) => return Err(ConfigError::new("--beta", "--alpha needs --beta")),
        (None, Some(_)) => return Err(ConfigError::new("--alpha", "--beta needs --alpha")),
    }
    match (c.nl, c.nu) {
        (Some(nl), Some(nu)) => {
            cfg.set = Some(SetSpec { nl: Some(nl), nu: Some(nu), ..Default::default() });
        }
        (None, None) => {}
        (Some(_), None) => return Err(ConfigError::new("--nu", "--nl needs --nu")),
        (None, Some(_)) => return Err(ConfigError::new("--nl", "--nu needs --nl")),
    }
    match (c.al, c.au) {
        (Some(al), Some(au)) => {
            cfg.controls = Some(ControlSpec { al: Some(al), au: Some(au), ..Default::default() });
        }
        (None, None) => {}
        (Some(_), None) => return Err(ConfigError::new("--au", "--al needs --au")),
        (None, Some(_)) => return Err(ConfigError::new("--al", "--au needs --al")),
    }
    if c.resolution.is_some() {
        cfg.resolution = c.resolution;
    }
    if c.control_resolution.is_some() {
        cfg.control_resolution = c.control_resolution;
    }
    if c.t_end.is_some() {
        cfg.t_end = c.t_end;
    }
    if c.method.is_some() {
        cfg.method = c.method;
    }
    if c.band_width.is_some() {
        cfg.band_width = c.band_width;
    }
    Ok(())
}

fn dispatch(cli: &Cli) -> Result<Done, Failure> {
    let c = &cli.common;
    match &cli.command {
        Command::CaseStudy { case, show_config } => {
            let mut cfg = case_config(*case);
            if *show_config {
                return Ok(Done { stdout: json(&cfg)?, negative: false });
            }
            for (set, key) in [(c.config.is_some(), "--config"), (c.alpha.is_some() || c.beta.is_some(), "--alpha")] {
                if set {
                    return Err(ConfigError::new(key, "case studies use their embedded model; see --show-config").into());
                }
            }
            if c.nl.is_some() || c.nu.is_some() || c.al.is_some() || c.au.is_some() {
                return Err(ConfigError::new("--nl", "case studies use their embedded set and controls").into());
            }
            apply_overrides(&mut cfg, c)?;
            case_study(*case, &cfg, c)
        }
        command => {
            let cfg = load_config(c)?;
            match command {
                Command::CheckSos => check_sos(&cfg, c),
                Command::CheckSizos => check_sizos(&cfg, c),
                Command::Synthesize => synthesize(&cfg, c),
                Command::Simulate => simulate(&cfg, c),
                Command::Sweep { kind } => sweep(*kind, &cfg, c),
                Command::CaseStudy { .. } => unreachable!(),
            }
        }
    }
}

fn json<T: Serialize + ?Sized>(value: &T) -> Result<String, Failure> {
    report::to_json(value).map_err(|e| Failure::Numerical(format!("cannot serialize report: {e}")))
}

fn write_out(dir: &Path, name: &str, contents: &str) -> Result<(), Failure> {
    fs::create_dir_all(dir)
        .and_then(|_| fs::write(dir.join(name), contents))
        .map_err(|e| ConfigError::new("--out", format!("cannot write {}: {e}", dir.join(name).display())).into())
}

// ---------------------------------------------------------------------------
// check-sos

#[derive(Debug, Clone, Serialize)]
pub struct SosReport {
    pub command: &'static str,
    pub config: Config,
    #[serde(flatten)]
    pub verdict: Verdict,
    /// Second method when `method = both`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle: Option<Verdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub agree: Option<bool>,
    /// Two-inequality form for the May-Leonard cube.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub may_leonard: Option<Verdict>,
}

fn sos_report(cfg: &Config) -> Result<SosReport, Failure> {
    let model = cfg.model()?;
    let params = model.params();
    let rect = cfg.rect(model.n())?;
    let res = cfg.resolution.unwrap_or(DEFAULT_RESOLUTION);
    let method = cfg.method.unwrap_or(MethodChoice::ClosedForm);
    let closed = || sos_rect_glv_with_floor(&params, &rect, cfg.eps2()).map_err(lib("r"));
    let sampled = || sos_rect_sampled(&params, &rect, res).map_err(lib("resolution"));
    let (mut verdict, oracle) = match method {
        MethodChoice::ClosedForm => (closed()?, None),
        MethodChoice::Sampled => (sampled()?, None),
        MethodChoice::Both => (closed()?, Some(sampled()?)),
        MethodChoice::Minimax => {
            return Err(ConfigError::new("method", "check-sos takes closed_form, sampled or both").into());
        }
    };
    if !verdict.decision && verdict.witness.is_none() {
        verdict.witness = find_outward_witness(&params, &rect, res).map_err(lib("resolution"))?;
    }
    let may_leonard = match (&model, cfg.cube_bounds()) {
        (Model::MayLeonard(ml), Some((nl, nu))) => Some(
            may_leonard_sos_condition_with_floors(ml.alpha, ml.beta, nl, nu, cfg.eps1(), cfg.eps2())
                .map_err(lib("set"))?,
        ),
        _ => None,
    };
    Ok(SosReport {
        command: "check-sos",
        config: cfg.clone(),
        agree: oracle.as_ref().map(|o| o.decision == verdict.decision),
        verdict,
        oracle,
        may_leonard,
    })
}

fn check_sos(cfg: &Config, c: &Common) -> Result<Done, Failure> {
    let rep = sos_report(cfg)?;
    let stdout = match c.format {
        Format::Json => json(&rep)?,
        Format::Csv => margins_table(&rep.verdict, rep.oracle.as_ref()),
    };
    if let Some(dir) = &c.out {
        write_out(dir, "check_sos.json", &json(&rep)?)?;
    }
    Ok(Done { stdout, negative: !rep.verdict.decision })
}

fn method_name(v: &Verdict) -> String {
    serde_json::to_value(v.method).ok().and_then(|m| m.as_str().map(String::from)).unwrap_or_default()
}

fn margins_table(primary: &Verdict, second: Option<&Verdict>) -> String {
    let names: Vec<(String, &Verdict)> = std::iter::once(primary).chain(second).map(|v| (method_name(v), v)).collect();
    report::margins_csv(names.iter().flat_map(|(n, v)| v.margins.iter().map(move |m| (n.as_str(), m))))
}

// ---------------------------------------------------------------------------
// check-sizos

#[derive(Debug, Clone, Serialize)]
pub struct SizosReport {
    pub command: &'static str,
    pub config: Config,
    #[serde(flatten)]
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub minimax: Option<MinimaxOutcome>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub agree: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub thresholds: Option<ControlThresholds>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub may_leonard: Option<Verdict>,
}

fn forced_model(cfg: &Config) -> Result<(Model, ForcedGlv, RectangularSet), Failure> {
    let model = cfg.model()?;
    let rect = cfg.rect(model.n())?;
    let controls = cfg.controls(model.n())?;
    let forced = ForcedGlv::new(model.params(), controls).map_err(lib("controls"))?;
    Ok((model, forced, rect))
}

fn sizos_report(cfg: &Config) -> Result<SizosReport, Failure> {
    let (model, forced, rect) = forced_model(cfg)?;
    let method = cfg.method.unwrap_or(MethodChoice::ClosedForm);
    let closed = sizos_rect_glv_with_floor(&forced, &rect, cfg.eps2()).map_err(lib("controls"))?;
    let minimax = match method {
        MethodChoice::ClosedForm => None,
        MethodChoice::Sampled | MethodChoice::Minimax | MethodChoice::Both => Some(
            minimax_margin_rect(
                &forced,
                &rect,
                forced.controls(),
                cfg.resolution.unwrap_or(DEFAULT_RESOLUTION),
                cfg.control_resolution.unwrap_or(DEFAULT_CONTROL_RESOLUTION),
            )
            .map_err(lib("resolution"))?,
        ),
    };
    let (verdict, minimax, agree) = match (method, minimax) {
        (MethodChoice::Sampled | MethodChoice::Minimax, Some(m)) => (m.to_verdict(), Some(m), None),
        (_, Some(m)) => {
            let agree = m.decision() == closed.decision;
            (closed, Some(m), Some(agree))
        }
        (_, None) => (closed, None, None),
    };
    let (mut thresholds, mut may_leonard) = (None, None);
    if let (Model::MayLeonard(ml), Some((nl, nu)), Some((al, au))) = (&model, cfg.cube_bounds(), cfg.uniform_controls()) {
        let (v, t) = may_leonard_sizos_condition(ml.alpha, ml.beta, nl, nu, al, au).map_err(lib("controls"))?;
        thresholds = Some(t);
        may_leonard = Some(v);
    }
    Ok(SizosReport {
        command: "check-sizos",
        config: cfg.clone(),
        verdict,
        minimax,
        agree,
        thresholds,
        may_leonard,
    })
}

fn check_sizos(cfg: &Config, c: &Common) -> Result<Done, Failure> {
    let rep = sizos_report(cfg)?;
    let stdout = match c.format {
        Format::Json => json(&rep)?,
        Format::Csv => margins_table(&rep.verdict, rep.may_leonard.as_ref()),
    };
    if let Some(dir) = &c.out {
        write_out(dir, "check_sizos.json", &json(&rep)?)?;
    }
    Ok(Done { stdout, negative: !rep.verdict.decision })
}

// ---------------------------------------------------------------------------
// synthesize

#[derive(Debug, Clone, Serialize)]
pub struct SynthesisReport {
    pub command: &'static str,
    pub config: Config,
    pub decision: bool,
    pub verdict: Verdict,
    /// Absent when the controllability conditions fail.
    pub feedback: Option<Vec<RampFeedback>>,
}

fn synthesis(cfg: &Config) -> Result<(ForcedGlv, RectangularSet, SynthesisReport), Failure> {
    let (_, forced, rect) = forced_model(cfg)?;
    let verdict = sizos_rect_glv_with_floor(&forced, &rect, cfg.eps2()).map_err(lib("controls"))?;
    let feedback = if verdict.decision {
        Some(
            synthesize_ramp_feedback(
                &forced,
                &rect,
                cfg.nominal.unwrap_or(DEFAULT_NOMINAL),
                cfg.band_width.unwrap_or(DEFAULT_BAND_WIDTH),
            )
            .map_err(lib("band_width"))?,
        )
    } else {
        None
    };
    let rep = SynthesisReport {
        command: "synthesize",
        config: cfg.clone(),
        decision: verdict.decision,
        verdict,
        feedback,
    };
    Ok((forced, rect, rep))
}

fn synthesize(cfg: &Config, c: &Common) -> Result<Done, Failure> {
    let (_, _, rep) = synthesis(cfg)?;
    let table = rep.feedback.as_deref().map(report::feedback_csv);
    let stdout = match (c.format, &table) {
        (Format::Csv, Some(t)) => t.clone(),
        _ => json(&rep)?,
    };
    if let Some(dir) = &c.out {
        write_out(dir, "synthesize.json", &json(&rep)?)?;
        if let Some(t) = &table {
            write_out(dir, "feedback.csv", t)?;
        }
    }
    Ok(Done { stdout, negative: !rep.decision })
}

// ---------------------------------------------------------------------------
// simulate

#[derive(Debug, Clone, Serialize)]
pub struct VertexSummary {
    pub vertex: Vec<f64>,
    pub status: TrajectoryStatus,
    pub final_time: f64,
    pub final_state: Vec<f64>,
    #[serde(flatten)]
    pub containment: ContainmentSidecar,
    /// Sup-norm distance to the coexistence point at the end of the run.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub final_distance: Option<f64>,
    /// Smallest sup-norm distance to the coexistence point over the last
    /// fifth of the run.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub late_window_distance: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SimulationReport {
    pub t_end: f64,
    pub closed_loop: bool,
    pub all_contained: bool,
    pub max_excursion: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coexistence: Option<Vec<f64>>,
    pub window_start: f64,
    pub vertices: Vec<VertexSummary>,
}

fn sup_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn run_vertices(
    field: &dyn VectorField,
    rect: &RectangularSet,
    cfg: &Config,
    t_end: f64,
    closed_loop: bool,
    coexistence: Option<Vec<f64>>,
) -> Result<(SimulationReport, Vec<VertexRun>), Failure> {
    if !(t_end > 0.0 && t_end.is_finite()) {
        return Err(ConfigError::new("t_end", format!("must be positive and finite, got {t_end}")).into());
    }
    let opts = SimOptions {
        samples: cfg.samples.unwrap_or(SimOptions::default().samples),
        ..SimOptions::default()
    };
    let runs = ode::vertex_suite(field, rect, t_end, &opts, CONTAINMENT_TOL).map_err(lib("t_end"))?;
    if let Some(r) = runs.iter().find(|r| r.trajectory.status == TrajectoryStatus::StepFailure) {
        return Err(Failure::Numerical(format!(
            "step size underflow from vertex {:?} at t = {}",
            r.vertex,
            r.trajectory.last_time()
        )));
    }
    let window_start = 0.8 * t_end;
    let vertices = runs
        .iter()
        .map(|r| {
            let traj = &r.trajectory;
            let (final_distance, late_window_distance) = match &coexistence {
                Some(c) => (
                    Some(sup_dist(traj.last_state(), c)),
                    traj.times
                        .iter()
                        .zip(&traj.states)
                        .filter(|(t, _)| **t >= window_start)
                        .map(|(_, x)| sup_dist(x, c))
                        .reduce(f64::min),
                ),
                None => (None, None),
            };
            VertexSummary {
                vertex: r.vertex.clone(),
                status: traj.status,
                final_time: traj.last_time(),
                final_state: traj.last_state().to_vec(),
                containment: ContainmentSidecar::from(&r.report),
                final_distance,
                late_window_distance,
            }
        })
        .collect::<Vec<_>>();
    let rep = SimulationReport {
        t_end,
        closed_loop,
        all_contained: runs.iter().all(|r| r.report.contained),
        max_excursion: runs.iter().map(|r| r.report.max_excursion).fold(f64::NEG_INFINITY, f64::max),
        coexistence,
        window_start,
        vertices,
    };
    Ok((rep, runs))
}

fn write_trajectories(dir: &Path, runs: &[VertexRun], summary: &SimulationReport, samples: usize) -> Result<(), Failure> {
    for (k, (r, s)) in runs.iter().zip(&summary.vertices).enumerate() {
        let traj = ode::resample_uniform(&r.trajectory, samples);
        write_out(dir, &format!("vertex_{k}.csv"), &report::trajectory_csv(&traj))?;
        write_out(dir, &format!("vertex_{k}.json"), &json(&s.containment)?)?;
    }
    Ok(())
}

fn coexistence_point(model: &Model) -> Option<Vec<f64>> {
    match model {
        Model::MayLeonard(ml) => may_leonard_equilibria(ml.alpha, ml.beta).ok().and_then(|e| e.points.last().map(|p| p.to_vec())),
        Model::General(_) => None,
    }
}

#[derive(Debug, Clone, Serialize)]
struct SimulateCommandReport {
    command: &'static str,
    config: Config,
    #[serde(skip_serializing_if = "Option::is_none")]
    feedback: Option<Vec<RampFeedback>>,
    simulation: SimulationReport,
}

fn simulate(cfg: &Config, c: &Common) -> Result<Done, Failure> {
    let model = cfg.model()?;
    let t_end = cfg.t_end.unwrap_or(DEFAULT_T_END);
    let coexistence = coexistence_point(&model);
    let (sim, runs, feedback) = if cfg.controls.is_some() {
        let (forced, rect, syn) = synthesis(cfg)?;
        let Some(laws) = syn.feedback else {
            return Err(ConfigError::new("controls", "controllability conditions fail; no feedback to simulate").into());
        };
        let closed = close_loop(&forced, laws.clone()).map_err(lib("controls"))?;
        let (sim, runs) = run_vertices(&closed, &rect, cfg, t_end, true, coexistence)?;
        (sim, runs, Some(laws))
    } else {
        let rect = cfg.rect(model.n())?;
        let params = model.params();
        params.require_nonzero_rates().map_err(lib("r"))?;
        let (sim, runs) = run_vertices(&params, &rect, cfg, t_end, false, coexistence)?;
        (sim, runs, None)
    };
    if let Some(dir) = &c.out {
        write_trajectories(dir, &runs, &sim, cfg.samples.unwrap_or(SimOptions::default().samples))?;
        if let Some(laws) = &feedback {
            write_out(dir, "feedback.csv", &report::feedback_csv(laws))?;
        }
    }
    let negative = !sim.all_contained;
    let rep = SimulateCommandReport {
        command: "simulate",
        config: cfg.clone(),
        feedback,
        simulation: sim,
    };
    Ok(Done { stdout: json(&rep)?, negative })
}

// ---------------------------------------------------------------------------
// sweep

#[derive(Debug, Clone, Serialize)]
pub struct SweepReport {
    pub command: &'static str,
    pub kind: SweepKind,
    pub config: Config,
    /// Triangle corners `(nl, nu)`; `None` when the region is empty.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub vertices: Option<Option<[(f64, f64); 3]>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lines: Option<TrapezoidLines>,
    pub empty: bool,
    pub cells: usize,
    pub true_cells: usize,
    pub segments: Vec<crate::sweep::Segment>,
    pub notes: Vec<String>,
}

pub fn bounds_window(cfg: &Config) -> BoundsWindow {
    let d = BoundsWindow::default();
    let w = cfg.window.unwrap_or_default();
    let nu = match (w.y_min, w.y_max) {
        (Some(min), max) => UpperRange::Fixed { min, max: max.unwrap_or(4.0) },
        (None, Some(max)) => UpperRange::AboveLower { max },
        (None, None) => d.nu,
    };
    BoundsWindow {
        nl_min: w.x_min.unwrap_or(d.nl_min),
        nl_max: w.x_max.unwrap_or(d.nl_max),
        nu,
        resolution: cfg.resolution.unwrap_or(d.resolution),
    }
}

pub fn coeff_window(cfg: &Config) -> CoeffWindow {
    let d = CoeffWindow::default();
    let w: WindowSpec = cfg.window.unwrap_or_default();
    CoeffWindow {
        alpha_min: w.x_min.unwrap_or(cfg.eps1()),
        alpha_max: w.x_max.unwrap_or(d.alpha_max),
        beta_min: w.y_min.unwrap_or(cfg.eps1()),
        beta_max: w.y_max.unwrap_or(d.beta_max),
        resolution: cfg.resolution.unwrap_or(d.resolution),
    }
}

fn sweep_result(kind: SweepKind, cfg: &Config) -> Result<(SweepReport, SweepResult), Failure> {
    let floors = Floors { coeff: cfg.eps1(), population: cfg.eps2() };
    let (res, vertices, lines) = match kind {
        SweepKind::Bounds => {
            let ml = cfg
                .may_leonard
                .ok_or_else(|| ConfigError::new("may_leonard", "bounds sweep needs the May-Leonard coefficients"))?;
            MayLeonardParams::with_floor(ml.alpha, ml.beta, cfg.eps1()).map_err(lib("may_leonard"))?;
            let res = sweep_population_bounds(ml.alpha, ml.beta, &bounds_window(cfg), floors).map_err(lib("window"))?;
            (res, Some(triangle_vertices(ml.alpha, ml.beta)), None)
        }
        SweepKind::Coeffs => {
            let (nl, nu) = cfg
                .cube_bounds()
                .ok_or_else(|| ConfigError::new("set", "coefficient sweep needs a cube set `{nl, nu}`"))?;
            let res = sweep_competition_coeffs(nl, nu, &coeff_window(cfg), floors).map_err(lib("window"))?;
            (res, None, Some(trapezoid_lines(nl, nu, cfg.eps1())))
        }
    };
    let rep = SweepReport {
        command: "sweep",
        kind,
        config: cfg.clone(),
        vertices,
        lines,
        empty: res.empty,
        cells: res.cells.len(),
        true_cells: res.true_count(),
        segments: res.segments.clone(),
        notes: res.notes.clone(),
    };
    Ok((rep, res))
}

fn sweep(kind: SweepKind, cfg: &Config, c: &Common) -> Result<Done, Failure> {
    let (rep, res) = sweep_result(kind, cfg)?;
    if let Some(dir) = &c.out {
        write_out(dir, "mask.csv", &report::mask_csv(&res.cells))?;
        write_out(dir, "polylines.csv", &report::polyline_csv(&res.segments))?;
        write_out(dir, "sweep.json", &json(&rep)?)?;
    }
    let stdout = match c.format {
        Format::Json => json(&rep)?,
        Format::Csv => report::mask_csv(&res.cells),
    };
    Ok(Done { stdout, negative: rep.empty })
}

// ---------------------------------------------------------------------------
// case studies

pub fn case_config(case: Case) -> Config {
    let (ml, (nl, nu), controls, t_end) = match case {
        Case::C1a => ((0.2, 0.05), (0.5, 2.0), None, 100.0),
        Case::C1b => ((0.2, 0.05), (0.75, 3.25), None, 50.0),
        Case::C2 => ((0.8, 1.3), (0.25, 0.38), Some((1.0, 1.0)), 200.0),
        Case::C3 => ((0.8, 1.3), (0.25, 0.38), Some((0.808, 1.25)), 500.0),
    };
    Config {
        may_leonard: Some(MayLeonardSpec { alpha: ml.0, beta: ml.1 }),
        set: Some(SetSpec { nl: Some(nl), nu: Some(nu), ..Default::default() }),
        controls: controls.map(|(al, au)| ControlSpec { al: Some(al), au: Some(au), ..Default::default() }),
        method: Some(MethodChoice::Both),
        resolution: Some(DEFAULT_RESOLUTION),
        control_resolution: controls.map(|_| DEFAULT_CONTROL_RESOLUTION),
        t_end: Some(t_end),
        band_width: controls.map(|_| DEFAULT_BAND_WIDTH),
        nominal: controls.map(|_| DEFAULT_NOMINAL),
        ..Default::default()
    }
}

#[derive(Debug, Clone, Serialize)]
struct CaseReport {
    command: &'static str,
    case: &'static str,
    config: Config,
    coexistence_stable: bool,
    /// Invariance of the set under the uncontrolled model.
    sos: SosReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    sizos: Option<SizosReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    feedback: Option<Vec<RampFeedback>>,
    /// Invariant cells in the default bounds sweep.
    #[serde(skip_serializing_if = "Option::is_none")]
    sweep_true_cells: Option<usize>,
    simulation: SimulationReport,
}

fn case_study(case: Case, cfg: &Config, c: &Common) -> Result<Done, Failure> {
    let name = match case {
        Case::C1a => "1a",
        Case::C1b => "1b",
        Case::C2 => "2",
        Case::C3 => "3",
    };
    let model = cfg.model()?;
    let ml = cfg.may_leonard.expect("case configs are May-Leonard");
    let t_end = cfg.t_end.unwrap_or(DEFAULT_T_END);
    let coexistence = coexistence_point(&model);

    let sos_cfg = Config { controls: None, ..cfg.clone() };
    let sos = sos_report(&sos_cfg)?;
    let mut sizos = None;
    let mut feedback = None;
    let mut sweep_true_cells = None;
    let (sim, runs) = match case {
        Case::C1a | Case::C1b => {
            let rect = cfg.rect(3)?;
            run_vertices(&model.params(), &rect, cfg, t_end, false, coexistence)?
        }
        Case::C2 => {
            sizos = Some(sizos_report(cfg)?);
            let sweep_cfg = Config { resolution: None, window: None, ..cfg.clone() };
            sweep_true_cells = Some(sweep_result(SweepKind::Bounds, &sweep_cfg)?.0.true_cells);
            let rect = cfg.rect(3)?;
            run_vertices(&model.params(), &rect, cfg, t_end, false, coexistence)?
        }
        Case::C3 => {
            sizos = Some(sizos_report(cfg)?);
            let (forced, rect, syn) = synthesis(cfg)?;
            let laws = syn
                .feedback
                .ok_or_else(|| ConfigError::new("controls", "controllability conditions fail for the case-study box"))?;
            let closed = close_loop(&forced, laws.clone()).map_err(lib("controls"))?;
            feedback = Some(laws);
            run_vertices(&closed, &rect, cfg, t_end, true, coexistence)?
        }
    };
    if let Some(dir) = &c.out {
        write_trajectories(dir, &runs, &sim, cfg.samples.unwrap_or(SimOptions::default().samples))?;
        if let Some(laws) = &feedback {
            write_out(dir, "feedback.csv", &report::feedback_csv(laws))?;
        }
    }
    let negative = match &sizos {
        Some(s) => !s.verdict.decision,
        None => !sos.verdict.decision,
    };
    let rep = CaseReport {
        command: "case-study",
        case: name,
        config: cfg.clone(),
        coexistence_stable: interior_equilibrium_stable(ml.alpha, ml.beta),
        sos,
        sizos,
        feedback,
        sweep_true_cells,
        simulation: sim,
    };
    let text = json(&rep)?;
    if let Some(dir) = &c.out {
        write_out(dir, "report.json", &text)?;
    }
    Ok(Done { stdout: text, negative })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> Outcome {
        run_from(std::iter::once("sos-glv").chain(args.iter().copied()))
    }

    #[test]
    fn flags_build_a_config() {
        let out = run_args(&["check-sos", "--alpha", "0.2", "--beta", "0.05", "--nl", "0.5", "--nu", "2"]);
        assert_eq!(out.code, 0, "{}", out.stderr);
        let v: serde_json::Value = serde_json::from_str(&out.stdout).unwrap();
        assert_eq!(v["decision"], true);
        assert_eq!(v["method"], "closed_form");
    }

    #[test]
    fn missing_set_is_a_config_error() {
        let out = run_args(&["check-sos", "--alpha", "0.2", "--beta", "0.05"]);
        assert_eq!(out.code, EXIT_CONFIG);
        assert!(out.stderr.contains("`set`"), "{}", out.stderr);
        let out = run_args(&["check-sos", "--alpha", "0.2"]);
        assert_eq!(out.code, EXIT_CONFIG);
        assert!(out.stderr.contains("--beta"));
    }

    #[test]
    fn strict_maps_negative_to_three() {
        let args = ["check-sos", "--alpha", "0.2", "--beta", "0.05", "--nl", "0.75", "--nu", "3.25"];
        assert_eq!(run_args(&args).code, 0);
        let mut strict = args.to_vec();
        strict.push("--strict");
        assert_eq!(run_args(&strict).code, EXIT_NEGATIVE);
    }

    #[test]
    fn case_configs_are_exact() {
        let c = case_config(Case::C3);
        assert_eq!(c.may_leonard, Some(MayLeonardSpec { alpha: 0.8, beta: 1.3 }));
        assert_eq!(c.cube_bounds(), Some((0.25, 0.38)));
        assert_eq!(c.uniform_controls(), Some((0.808, 1.25)));
        assert_eq!(case_config(Case::C2).uniform_controls(), Some((1.0, 1.0)));
        assert_eq!(case_config(Case::C1b).cube_bounds(), Some((0.75, 3.25)));
        assert_eq!(case_config(Case::C1a).may_leonard, Some(MayLeonardSpec { alpha: 0.2, beta: 0.05 }));
    }
}
