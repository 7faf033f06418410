use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use wshift::classify::{bounded_orbit_witness, fhc_check};
use wshift::conjugacy::{conjugate_forward_with, conjugate_inverse_with, ConjugacyOptions};
use wshift::io::{
    declared_field, parse_json, perturbation_from_json, trajectory_from_json, vector_from_json, weights_from_json,
    ToJson,
};
use wshift::shadowing::forward_unilateral_pseudotrajectory;
use wshift::{
    adversarial_pseudotrajectory, classify_shadowing_with, conjugacy_residual, epsilon_budget, oracle_best_shadow,
    random_pseudotrajectory, shadow_bilateral, shadow_positive, AdversarialKind, AdversarialParams, Complex64,
    Direction, Error, PseudoTrajectory, Rational, Real, Scalar, ScalarField, SeqVector, ShadowingClass, SpaceSpec,
    UnilateralShift, WeightSequence,
};

const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser, Debug)]
#[command(name = "wshift", version, about = "Shadowing, expansivity and conjugacy of weighted shifts")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Weight spec (JSON).
    #[arg(long)]
    weights: Option<PathBuf>,
    /// `c0` or `lp:P`.
    #[arg(long, default_value = "c0")]
    space: SpaceSpec,
    /// Tolerance for near-one comparisons, or for fixed points in `conjugate`.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Exact rational arithmetic (decimals in the spec are read exactly).
    #[arg(long)]
    exact: bool,
    /// Write the report here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
struct TrajectorySource {
    /// Trajectory file (JSON with `n0`, `delta`, `points`).
    #[arg(long, conflicts_with = "pseudo")]
    traj: Option<PathBuf>,
    /// Generate a trajectory: `random` or an adversarial kind.
    #[arg(long, visible_alias = "kind")]
    pseudo: Option<String>,
    #[arg(long)]
    delta: Option<String>,
    /// Time window `A:B` for random trajectories.
    #[arg(long, allow_hyphen_values = true, default_value = "-40:40")]
    window: String,
    /// `t=..,m=..,r=..` (r is the kick support radius).
    #[arg(long, default_value = "")]
    params: String,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Shadowing class, tail rates, hyperbolicity and uniform expansivity.
    Classify {
        #[command(flatten)]
        common: Common,
        /// Classify every `*.json` file in a directory.
        #[arg(long, conflicts_with = "weights")]
        batch: Option<PathBuf>,
    },
    /// Uniform expansivity class and a bounded-orbit witness search.
    Expansivity {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 60)]
        horizon: i64,
        #[arg(long, default_value = "4")]
        bound: String,
    },
    /// Generate a pseudotrajectory.
    Pseudo {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        source: TrajectorySource,
    },
    /// Shadow a pseudotrajectory by a genuine orbit.
    Shadow {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        source: TrajectorySource,
        /// Use the positive-time series (requires n0 >= 0).
        #[arg(long)]
        positive: bool,
    },
    /// Best shadowing error over candidates supported in a window.
    Oracle {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        source: TrajectorySource,
        #[arg(long, allow_hyphen_values = true, default_value = "-60:60")]
        support: String,
        /// `bilateral`, or `forward` for the unilateral forward shift.
        #[arg(long)]
        operator: Option<String>,
    },
    /// Evaluate the conjugacy with a Lipschitz perturbation at a point.
    Conjugate {
        #[command(flatten)]
        common: Common,
        /// Perturbation spec (JSON).
        #[arg(long)]
        alpha: PathBuf,
        /// Query point (JSON vector); random when absent.
        #[arg(long)]
        point: Option<PathBuf>,
        /// Evaluate the inverse conjugacy instead.
        #[arg(long)]
        inverse: bool,
        /// Index whose coordinate of the correction is pinned to zero.
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        normalization: i64,
    },
    /// Frequent hypercyclicity criterion series at a vector.
    Fhc {
        #[command(flatten)]
        common: Common,
        /// Vector file (JSON); defaults to the basis vector `--basis`.
        #[arg(long)]
        vector: Option<PathBuf>,
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        basis: i64,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Classify { .. } => "classify",
            Command::Expansivity { .. } => "expansivity",
            Command::Pseudo { .. } => "pseudo",
            Command::Shadow { .. } => "shadow",
            Command::Oracle { .. } => "oracle",
            Command::Conjugate { .. } => "conjugate",
            Command::Fhc { .. } => "fhc",
        }
    }

    fn common(&self) -> &Common {
        match self {
            Command::Classify { common, .. }
            | Command::Expansivity { common, .. }
            | Command::Pseudo { common, .. }
            | Command::Shadow { common, .. }
            | Command::Oracle { common, .. }
            | Command::Conjugate { common, .. }
            | Command::Fhc { common, .. } => common,
        }
    }
}

/// Failures with their exit status.
#[derive(Debug)]
enum Failure {
    Usage(String),
    Lib(Error),
}

impl Failure {
    fn status(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Lib(e) => match e {
                Error::Boundary(_) => 1,
                Error::Parse(_)
                | Error::ZeroWeight(_)
                | Error::EmptyTail(_)
                | Error::InvalidRange(_)
                | Error::TooShort(_)
                | Error::InvalidParams(_)
                | Error::BadWindow(_)
                | Error::Unsupported(_) => 2,
                Error::NotClassC(_) | Error::NoSplitting(_) | Error::BudgetExceeded { .. } | Error::NonConvergence(_) => 3,
            },
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            Failure::Usage(_) => "usage",
            Failure::Lib(Error::Boundary(_)) => "boundary",
            Failure::Lib(_) if self.status() == 2 => "input",
            Failure::Lib(_) => "numeric",
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Usage(m) => m.clone(),
            Failure::Lib(e) => e.to_string(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

type CliResult<T> = Result<T, Failure>;

struct Report {
    result: Value,
    status: u8,
    summary: String,
    mode: Option<(&'static str, &'static str)>,
}

impl Report {
    fn ok<S: Scalar>(result: Value, summary: String) -> Self {
        Report {
            result,
            status: 0,
            summary,
            mode: Some((S::mode().as_str(), S::FIELD.as_str())),
        }
    }
}

fn read_json(path: &Path) -> CliResult<Value> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
    Ok(parse_json(&text)?)
}

fn parse_range(text: &str, what: &str) -> CliResult<(i64, i64)> {
    let bad = || Failure::Usage(format!("{what} must look like A:B, got {text:?}"));
    let (a, b) = text.split_once(':').ok_or_else(bad)?;
    let a = a.trim().parse().map_err(|_| bad())?;
    let b = b.trim().parse().map_err(|_| bad())?;
    if a > b {
        return Err(Failure::Usage(format!("{what} {a}:{b} is empty")));
    }
    Ok((a, b))
}

struct Params {
    t: Option<i64>,
    m: Option<i64>,
    r: i64,
}

fn parse_params(text: &str) -> CliResult<Params> {
    let mut p = Params { t: None, m: None, r: 4 };
    for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (k, v) = item
            .split_once('=')
            .ok_or_else(|| Failure::Usage(format!("parameter {item:?} must be key=value")))?;
        let v: i64 = v
            .trim()
            .parse()
            .map_err(|_| Failure::Usage(format!("parameter {k} must be an integer")))?;
        match k.trim() {
            "t" => p.t = Some(v),
            "m" => p.m = Some(v),
            "r" => p.r = v,
            other => return Err(Failure::Usage(format!("unknown parameter {other:?}"))),
        }
    }
    Ok(p)
}

fn parse_real<R: Real>(text: &str, what: &str) -> CliResult<R> {
    R::from_json(&Value::String(text.to_string())).map_err(|e| Failure::Usage(format!("{what}: {e}")))
}

fn float_tol<S: Scalar>(common: &Common) -> f64 {
    common.tol.unwrap_or_else(S::Real::default_tolerance)
}

fn trajectory<S: Scalar>(
    w: &WeightSequence<S>,
    space: SpaceSpec,
    source: &TrajectorySource,
    seed: u64,
) -> CliResult<PseudoTrajectory<S>> {
    if let Some(path) = &source.traj {
        return Ok(trajectory_from_json(&read_json(path)?)?);
    }
    let kind = source
        .pseudo
        .as_deref()
        .ok_or_else(|| Failure::Usage("give --traj FILE or --pseudo KIND".into()))?;
    let delta: S::Real = parse_real(
        source
            .delta
            .as_deref()
            .ok_or_else(|| Failure::Usage("--delta is required to generate a trajectory".into()))?,
        "--delta",
    )?;
    let params = parse_params(&source.params)?;
    if kind == "random" {
        let window = parse_range(&source.window, "--window")?;
        return Ok(random_pseudotrajectory(w, space, &delta, window, seed, params.r)?);
    }
    let kind: AdversarialKind = kind.parse()?;
    Ok(adversarial_pseudotrajectory(
        w,
        space,
        kind,
        &delta,
        AdversarialParams { t: params.t, m: params.m },
    )?)
}

fn random_point<S: Scalar>(seed: u64) -> SeqVector<S> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    SeqVector::new(-3, (0..7).map(|_| S::from_f64_parts(rng.gen_range(-1.0..1.0), 0.0)).collect())
}

/// Runs a command once the scalar type is fixed.
trait Job {
    fn run<S: Scalar>(&self, w: WeightSequence<S>) -> CliResult<Report>;
}

/// Like [`Job`] for commands that need real scalars.
trait RealJob {
    fn run<R: Real>(&self, w: WeightSequence<R>) -> CliResult<Report>;
}

fn dispatch<J: Job>(job: &J, doc: &Value, exact: bool) -> CliResult<Report> {
    match (declared_field(doc)?, exact) {
        (ScalarField::Real, true) => job.run(weights_from_json::<Rational>(doc)?),
        (ScalarField::Real, false) => job.run(weights_from_json::<f64>(doc)?),
        (ScalarField::Complex, false) => job.run(weights_from_json::<Complex64>(doc)?),
        (ScalarField::Complex, true) => Err(Failure::Usage("--exact needs real weights".into())),
    }
}

fn dispatch_real<J: RealJob>(job: &J, doc: &Value, exact: bool) -> CliResult<Report> {
    match (declared_field(doc)?, exact) {
        (ScalarField::Real, true) => job.run(weights_from_json::<Rational>(doc)?),
        (ScalarField::Real, false) => job.run(weights_from_json::<f64>(doc)?),
        (ScalarField::Complex, _) => Err(Failure::Usage("this command needs real weights".into())),
    }
}

fn classify_report<S: Scalar>(w: &WeightSequence<S>, tol: f64) -> Report {
    let r = classify_shadowing_with(w, tol);
    let summary = format!(
        "class {} (g_left {:.6}, g_right {:.6}), uniform expansivity {}",
        r.shadowing_class.as_str(),
        r.rates.g_left.to_f64(),
        r.rates.g_right.to_f64(),
        r.uniform_expansivity.as_str()
    );
    let status = if r.shadowing_class == ShadowingClass::Boundary { 1 } else { 0 };
    Report {
        status,
        ..Report::ok::<S>(r.to_json(), summary)
    }
}

struct Single<'a>(&'a Command);

impl Job for Single<'_> {
    fn run<S: Scalar>(&self, w: WeightSequence<S>) -> CliResult<Report> {
        let common = self.0.common();
        let space = common.space;
        match self.0 {
            Command::Classify { .. } => Ok(classify_report(&w, float_tol::<S>(common))),
            Command::Expansivity { horizon, bound, .. } => {
                let r = classify_shadowing_with(&w, float_tol::<S>(common));
                let bound: S::Real = parse_real(bound, "--bound")?;
                let witness = if r.shadowing_class == ShadowingClass::C {
                    bounded_orbit_witness(&w, space, *horizon, &bound)
                } else {
                    None
                };
                let summary = format!(
                    "uniform expansivity {}, bounded orbit witness {}",
                    r.uniform_expansivity.as_str(),
                    if witness.is_some() { "found" } else { "none" }
                );
                let status = if r.uniform_expansivity == wshift::ExpansivityClass::Boundary { 1 } else { 0 };
                let result = json!({
                    "uniform_expansivity": r.uniform_expansivity.as_str(),
                    "shadowing_class": r.shadowing_class.as_str(),
                    "bounded_orbit_witness": witness.map(|x| x.to_json()),
                    "horizon": horizon,
                    "bound": bound.to_json(),
                });
                Ok(Report {
                    status,
                    ..Report::ok::<S>(result, summary)
                })
            }
            Command::Pseudo { source, .. } => {
                let traj = trajectory(&w, space, source, common.seed)?;
                let measured = wshift::shadowing::defect(&w, space, &traj);
                let summary = format!("{} points from time {}", traj.points.len(), traj.n0);
                let mut result = traj.to_json();
                if let Ok(d) = measured {
                    result["measured_defect"] = d.to_json();
                }
                Ok(Report::ok::<S>(result, summary))
            }
            Command::Shadow { source, positive, .. } => {
                let traj = trajectory(&w, space, source, common.seed)?;
                let r = if *positive {
                    shadow_positive(&w, space, &traj)?
                } else {
                    shadow_bilateral(&w, space, &traj)?
                };
                let summary = format!(
                    "max error {:.6e} within bound {:.6e}",
                    r.max_error.to_f64(),
                    r.error_bound.to_f64()
                );
                Ok(Report::ok::<S>(r.to_json(), summary))
            }
            Command::Conjugate {
                alpha,
                point,
                inverse,
                normalization,
                ..
            } => {
                if S::Real::EXACT {
                    return Err(Failure::Usage("conjugacy is evaluated in floating point; drop --exact".into()));
                }
                let tol = S::Real::from_f64(common.tol.unwrap_or(1e-10));
                let alpha = perturbation_from_json::<S>(&read_json(alpha)?, space)?;
                let x = match point {
                    Some(p) => vector_from_json(&read_json(p)?)?,
                    None => random_point(common.seed),
                };
                let options = ConjugacyOptions {
                    normalization: *normalization,
                    ..ConjugacyOptions::default()
                };
                let budget = epsilon_budget(&w, space)?;
                let r = if *inverse {
                    conjugate_inverse_with(&w, space, &alpha, &x, &tol, &options)?
                } else {
                    conjugate_forward_with(&w, space, &alpha, &x, &tol, &options)?
                };
                let mut result = r.to_json();
                result["direction"] = Value::from(if *inverse { "inverse" } else { "forward" });
                result["epsilon_budget"] = budget.to_json();
                result["perturbation"] = json!({
                    "kind": alpha.kind.as_str(),
                    "sup_bound": alpha.sup_bound.as_ref().map(|s| s.to_json()),
                    "lip_bound": alpha.lip_bound.to_json(),
                    "output_window": [alpha.output_window.0, alpha.output_window.1],
                });
                if !*inverse && *normalization == 0 {
                    result["conjugacy_residual"] = conjugacy_residual(&w, space, &alpha, &x, &tol)?.to_json();
                }
                let summary = format!(
                    "{} iterations, residual {:.3e}, tail bound {:.3e}",
                    r.fixed_point_iterations,
                    r.residual.to_f64(),
                    r.series_tail_bound.to_f64()
                );
                Ok(Report::ok::<S>(result, summary))
            }
            Command::Fhc { vector, basis, .. } => {
                let y = match vector {
                    Some(p) => vector_from_json(&read_json(p)?)?,
                    None => SeqVector::basis(*basis),
                };
                let r = fhc_check(&w, space, &y);
                let summary = format!(
                    "forward {:.6}, backward {:.6}, {}",
                    r.forward_sum.to_f64(),
                    r.backward_sum.to_f64(),
                    if r.converges { "converges" } else { "no certified convergence" }
                );
                Ok(Report::ok::<S>(r.to_json(), summary))
            }
            Command::Oracle { .. } => unreachable!("oracle runs through dispatch_real"),
        }
    }
}

impl RealJob for Single<'_> {
    fn run<R: Real>(&self, w: WeightSequence<R>) -> CliResult<Report> {
        let Command::Oracle {
            common,
            source,
            support,
            operator,
        } = self.0
        else {
            unreachable!("only oracle needs real scalars")
        };
        let space = common.space;
        let support = parse_range(support, "--support")?;
        let forward_kind = source.pseudo.as_deref() == Some(AdversarialKind::ForwardUnilateral.as_str());
        let operator = operator.as_deref().unwrap_or(if forward_kind { "forward" } else { "bilateral" });
        let (traj, r) = match operator {
            "bilateral" => {
                let traj = trajectory(&w, space, source, common.seed)?;
                let r = oracle_best_shadow(&w, space, &traj, support)?;
                (traj, r)
            }
            "forward" => {
                let uw = w.restrict_positive();
                let traj = if forward_kind {
                    let params = parse_params(&source.params)?;
                    let t = params.t.ok_or_else(|| Failure::Usage("forward_unilateral needs t".into()))?;
                    let delta: R = parse_real(source.delta.as_deref().unwrap_or(""), "--delta")?;
                    forward_unilateral_pseudotrajectory(&uw, &delta, t)?
                } else {
                    trajectory(&w, space, source, common.seed)?
                };
                let op = UnilateralShift::new(uw, Direction::Forward);
                let r = oracle_best_shadow(&op, space, &traj, support)?;
                (traj, r)
            }
            other => return Err(Failure::Usage(format!("unknown operator {other:?}"))),
        };
        let summary = format!(
            "best error {:.6} ({}) over support {}:{}",
            r.best_error.to_f64(),
            if r.exact { "exact" } else { "upper bound" },
            support.0,
            support.1
        );
        let mut result = r.to_json();
        result["operator"] = Value::from(operator);
        result["support"] = json!([support.0, support.1]);
        result["trajectory"] = json!({ "n0": traj.n0, "n1": traj.n1(), "delta": traj.delta.to_json() });
        Ok(Report::ok::<R>(result, summary))
    }
}

fn batch_classify(dir: &Path, common: &Common) -> CliResult<Report> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", dir.display())))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    let entries: Vec<(Value, u8)> = files
        .par_iter()
        .map(|path| {
            let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
            let outcome = read_json(path).and_then(|doc| {
                struct ClassifyJob<'a>(&'a Common);
                impl Job for ClassifyJob<'_> {
                    fn run<S: Scalar>(&self, w: WeightSequence<S>) -> CliResult<Report> {
                        Ok(classify_report(&w, float_tol::<S>(self.0)))
                    }
                }
                dispatch(&ClassifyJob(common), &doc, common.exact)
            });
            match outcome {
                Ok(r) => (json!({ "file": name, "report": r.result }), r.status),
                Err(f) => (
                    json!({ "file": name, "error": { "kind": f.kind(), "message": f.message() } }),
                    f.status(),
                ),
            }
        })
        .collect();
    let status = entries.iter().map(|(_, s)| *s).max().unwrap_or(0);
    let count = entries.len();
    let result = json!({ "reports": entries.into_iter().map(|(v, _)| v).collect::<Vec<_>>() });
    Ok(Report {
        result,
        status,
        summary: format!("{count} weight specs classified"),
        mode: Some((
            if common.exact { "exact" } else { "float" },
            "mixed",
        )),
    })
}

fn execute(cmd: &Command) -> CliResult<Report> {
    let common = cmd.common();
    if let Command::Classify { batch: Some(dir), .. } = cmd {
        return batch_classify(dir, common);
    }
    if common.tol.is_some_and(|t| !(t > 0.0)) {
        return Err(Failure::Usage("--tol must be positive".into()));
    }
    let path = common
        .weights
        .as_ref()
        .ok_or_else(|| Failure::Usage("--weights FILE is required".into()))?;
    let doc = read_json(path)?;
    match cmd {
        Command::Oracle { .. } => dispatch_real(&Single(cmd), &doc, common.exact),
        _ => dispatch(&Single(cmd), &doc, common.exact),
    }
}

fn emit(doc: &Value, out: Option<&Path>) -> Result<(), String> {
    let text = serde_json::to_string_pretty(doc).expect("serializable");
    match out {
        Some(path) => fs::write(path, text + "\n").map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            writeln!(stdout, "{text}").map_err(|e| format!("cannot write output: {e}"))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cmd = &cli.command;
    let common = cmd.common();
    let mut doc = json!({
        "tool": "wshift",
        "version": VERSION,
        "command": cmd.name(),
        "space": common.space.to_string(),
    });
    let status = match execute(cmd) {
        Ok(report) => {
            if let Some((mode, field)) = report.mode {
                doc["arithmetic_mode"] = Value::from(mode);
                doc["scalar_field"] = Value::from(field);
            }
            doc["seed"] = Value::from(common.seed);
            doc["result"] = report.result;
            let tag = if report.status == 1 { "warning" } else { "ok" };
            eprintln!("wshift {}: {tag}: {}", cmd.name(), report.summary);
            report.status
        }
        Err(f) => {
            doc["arithmetic_mode"] = Value::from(if common.exact { "exact" } else { "float" });
            doc["error"] = json!({ "kind": f.kind(), "message": f.message() });
            eprintln!("wshift {}: {}: {}", cmd.name(), f.kind(), f.message());
            f.status()
        }
    };
    if let Err(e) = emit(&doc, common.out.as_deref()) {
        eprintln!("wshift: {e}");
        return ExitCode::from(2);
    }
    ExitCode::from(status)
}
