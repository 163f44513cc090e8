//! The `quatsub` command line: loads a builtin fixture or a TOML manifest,
//! runs the requested checks and emits a canonical JSON report.

use std::ffi::OsString;
use std::io::Write as _;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, Subcommand};
use nalgebra::DVector;
use serde::Serialize;

use crate::classify::{classify_at, dimension_obstruction, ClassificationVerdict, ObstructionReport};
use crate::error::{Error, Result};
use crate::fixtures::{builtin, list_fixtures, Fixture, FixtureInfo};
use crate::lab::{FoliationFlags, Lab, ProductType, TheoremId, TheoremReport, Verdict};
use crate::manifest::load_fixture;
use crate::quaternionic::{validate_structure, StructureValidation};
use crate::report::{sha256_hex, to_canonical_json};
use crate::sampling::SamplePlan;
use crate::submersion::{validate_at, PointGeometry, SubmersionValidation, DEFAULT_TOLERANCE};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_INVALID: i32 = 2;

/// Environment variable capping the worker pool size.
pub const THREADS_ENV: &str = "QUATSUB_THREADS";

#[derive(Debug, Parser)]
#[command(name = "quatsub", version, about = "Checks Riemannian submersions from hyperkähler manifolds")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// TOML manifest describing the submersion.
    #[arg(long, global = true, conflicts_with = "fixture")]
    pub manifest: Option<PathBuf>,
    /// Builtin fixture name (see `quatsub list`).
    #[arg(long, global = true)]
    pub fixture: Option<String>,
    /// Comma-separated point; replaces the sample plan for non-tensor commands.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub point: Option<String>,
    /// Tolerance for theorem and foliation verdicts.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Number of sample points.
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    /// Seed of the low-discrepancy sampler.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Write the JSON report here (`-` for stdout).
    #[arg(long, global = true)]
    pub json: Option<PathBuf>,
}

#[derive(Clone, Debug, Subcommand)]
pub enum Command {
    /// Validate the submersion and the structure triple.
    Check,
    /// Classify the map against I, J, K.
    Classify,
    /// O'Neill tensors, mean curvature and tension at `--point`.
    Tensors,
    /// Run one theorem check.
    Theorem { id: String },
    /// Validation, classification, foliation flags and product type;
    /// `--all` adds every theorem check.
    Report {
        #[arg(long)]
        all: bool,
    },
    /// List builtin fixtures.
    List,
}

impl Command {
    fn name(&self) -> String {
        match self {
            Command::Check => "check".into(),
            Command::Classify => "classify".into(),
            Command::Tensors => "tensors".into(),
            Command::Theorem { id } => format!("theorem {id}"),
            Command::Report { all: true } => "report --all".into(),
            Command::Report { all: false } => "report".into(),
            Command::List => "list".into(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Source {
    /// `builtin` or `manifest`.
    pub kind: String,
    pub name: String,
    /// SHA-256 of the manifest bytes, or of `builtin:<name>`.
    pub digest: String,
}

type Bilinear<'a> = &'a dyn Fn(&DVector<f64>, &DVector<f64>) -> DVector<f64>;

#[derive(Clone, Debug, Serialize)]
pub struct TensorEntry {
    pub left: String,
    pub right: String,
    pub value: Vec<f64>,
}

/// Pointwise tensors over the split frame; `e_i` are vertical and `h_j`
/// horizontal frame vectors.
#[derive(Clone, Debug, Serialize)]
pub struct TensorReport {
    pub point: Vec<f64>,
    pub image: Vec<f64>,
    pub vertical_basis: Vec<Vec<f64>>,
    pub horizontal_basis: Vec<Vec<f64>>,
    pub t: Vec<TensorEntry>,
    pub a: Vec<TensorEntry>,
    pub second_fundamental_form: Vec<TensorEntry>,
    pub mean_curvature: Vec<f64>,
    pub horizontal_mean_curvature: Vec<f64>,
    pub tension: Vec<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct FoliationSummary {
    pub horizontal: FoliationFlags,
    pub vertical: FoliationFlags,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub source: Option<Source>,
    pub tolerance: f64,
    pub samples: Option<SamplePlan>,
    pub validation: Option<SubmersionValidation>,
    pub structure: Option<StructureValidation>,
    pub obstruction: Option<ObstructionReport>,
    pub classification: Option<ClassificationVerdict>,
    pub theorems: Vec<TheoremReport>,
    pub foliation: Option<FoliationSummary>,
    pub product_type: Option<ProductType>,
    pub product_label: Option<String>,
    pub tensors: Option<TensorReport>,
    pub fixtures: Option<Vec<FixtureInfo>>,
    pub failures: Vec<String>,
    pub exit_code: i32,
}

impl RunReport {
    fn new(command: &Command, tolerance: f64) -> Self {
        RunReport {
            tool: "quatsub".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.name(),
            source: None,
            tolerance,
            samples: None,
            validation: None,
            structure: None,
            obstruction: None,
            classification: None,
            theorems: Vec::new(),
            foliation: None,
            product_type: None,
            product_label: None,
            tensors: None,
            fixtures: None,
            failures: Vec::new(),
            exit_code: EXIT_OK,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        to_canonical_json(self)
    }
}

/// Exit code for an error: broken invariants count as failed verdicts,
/// everything else is invalid input.
pub fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::Inconsistency(_) => EXIT_FAILED,
        _ => EXIT_INVALID,
    }
}

pub fn parse_point(csv: &str) -> Result<Vec<f64>> {
    csv.split(',')
        .map(|s| {
            let s = s.trim();
            s.parse::<f64>()
                .map_err(|_| Error::Manifest(format!("--point: `{s}` is not a number")))
        })
        .collect()
}

fn load(cli: &Cli) -> Result<(Fixture, Source)> {
    let (mut fixture, source) = match (&cli.manifest, &cli.fixture) {
        (Some(path), _) => {
            let (f, bytes) = load_fixture(path)?;
            let source = Source {
                kind: "manifest".into(),
                name: f.name.clone(),
                digest: sha256_hex(&bytes),
            };
            (f, source)
        }
        (None, Some(name)) => {
            let f = builtin(name)?;
            let source = Source {
                kind: "builtin".into(),
                name: name.clone(),
                digest: sha256_hex(format!("builtin:{name}").as_bytes()),
            };
            (f, source)
        }
        (None, None) => return Err(Error::Manifest("give --manifest PATH or --fixture NAME".into())),
    };
    let mut plan = fixture.submersion.samples.clone();
    if let Some(n) = cli.samples {
        if n == 0 {
            return Err(Error::Manifest("--samples must be positive".into()));
        }
        plan = plan.with_count(n);
    }
    if let Some(s) = cli.seed {
        plan = plan.with_seed(s);
    }
    if let (Some(p), false) = (&cli.point, matches!(cli.command, Command::Tensors)) {
        plan = SamplePlan::explicit(vec![parse_point(p)?]);
    }
    fixture.submersion.samples = plan;
    Ok((fixture, source))
}

fn tensors_at(fixture: &Fixture, p: &[f64]) -> Result<TensorReport> {
    if p.len() != fixture.submersion.dim() {
        return Err(Error::DimensionMismatch(format!(
            "--point has {} coordinates, expected {}",
            p.len(),
            fixture.submersion.dim()
        )));
    }
    let geo = PointGeometry::at(&fixture.submersion, &DVector::from_column_slice(p))?;
    let vs: Vec<DVector<f64>> = geo.frame.vertical_basis.column_iter().map(|c| c.into_owned()).collect();
    let hs: Vec<DVector<f64>> = geo.frame.horizontal_basis.column_iter().map(|c| c.into_owned()).collect();
    let labelled: Vec<(String, &DVector<f64>)> = vs
        .iter()
        .enumerate()
        .map(|(i, v)| (format!("e{i}"), v))
        .chain(hs.iter().enumerate().map(|(j, h)| (format!("h{j}"), h)))
        .collect();
    let table = |f: Bilinear<'_>| -> Vec<TensorEntry> {
        let mut out = Vec::new();
        for (ln, l) in &labelled {
            for (rn, r) in &labelled {
                out.push(TensorEntry {
                    left: ln.clone(),
                    right: rn.clone(),
                    value: f(l, r).iter().cloned().collect(),
                });
            }
        }
        out
    };
    let vec = |v: DVector<f64>| v.iter().cloned().collect::<Vec<f64>>();
    Ok(TensorReport {
        point: p.to_vec(),
        image: vec(geo.image.clone()),
        vertical_basis: vs.iter().map(|v| vec(v.clone())).collect(),
        horizontal_basis: hs.iter().map(|v| vec(v.clone())).collect(),
        t: table(&|a, b| geo.oneill_t(a, b)),
        a: table(&|a, b| geo.oneill_a(a, b)),
        second_fundamental_form: table(&|a, b| geo.second_fundamental_form(a, b)),
        mean_curvature: vec(geo.mean_curvature()),
        horizontal_mean_curvature: vec(geo.horizontal_mean_curvature()),
        tension: vec(geo.tension()),
    })
}

fn check(fixture: &Fixture, points: &[DVector<f64>], report: &mut RunReport) -> Result<()> {
    let v = validate_at(&fixture.submersion, points)?;
    if !v.is_submersion {
        report.failures.push("map is not a submersion at every sample".into());
    } else if !v.is_riemannian {
        report
            .failures
            .push(format!("horizontal isometry residual {:e}", v.worst_residual));
    }
    report.validation = Some(v);
    if let Some(t) = &fixture.structure {
        let s = validate_structure(t, &fixture.submersion.total, points)?;
        if !s.valid {
            report
                .failures
                .extend(s.failures.iter().map(|f| format!("structure: {f}")));
        }
        report.structure = Some(s);
    }
    report.obstruction = Some(dimension_obstruction(&fixture.submersion));
    Ok(())
}

fn classify_into(fixture: &Fixture, points: &[DVector<f64>], report: &mut RunReport) -> Result<()> {
    let t = fixture
        .structure
        .as_ref()
        .ok_or_else(|| Error::Manifest(format!("fixture `{}` declares no structure", fixture.name)))?;
    report.obstruction = Some(dimension_obstruction(&fixture.submersion));
    report.classification = Some(classify_at(&fixture.submersion, t, points)?);
    Ok(())
}

fn push_theorem(report: &mut RunReport, r: TheoremReport) {
    if r.verdict == Verdict::Fail {
        report.failures.push(format!("theorem {}: fail", r.id));
    }
    report.theorems.push(r);
}

/// Runs one command without printing anything.
pub fn execute(cli: &Cli) -> Result<RunReport> {
    let tol = cli.tol.unwrap_or(DEFAULT_TOLERANCE);
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::Manifest("--tol must be a positive number".into()));
    }
    let mut report = RunReport::new(&cli.command, tol);
    if let Command::List = cli.command {
        report.fixtures = Some(list_fixtures());
        return Ok(report);
    }
    let theorem = match &cli.command {
        Command::Theorem { id } => Some(id.parse::<TheoremId>()?),
        _ => None,
    };
    let (fixture, source) = load(cli)?;
    report.source = Some(source);

    if let Command::Tensors = cli.command {
        let p = cli
            .point
            .as_deref()
            .ok_or_else(|| Error::Manifest("tensors needs --point".into()))?;
        report.tensors = Some(tensors_at(&fixture, &parse_point(p)?)?);
        return Ok(report);
    }

    report.samples = Some(fixture.submersion.samples.clone());
    let points = fixture.submersion.sample_points()?;
    match &cli.command {
        Command::Check => check(&fixture, &points, &mut report)?,
        Command::Classify => classify_into(&fixture, &points, &mut report)?,
        Command::Theorem { .. } => {
            let lab = Lab::new(&fixture.submersion, fixture.structure.as_ref(), &points, tol)?;
            push_theorem(&mut report, lab.run(theorem.expect("parsed above"))?);
        }
        Command::Report { all } => {
            check(&fixture, &points, &mut report)?;
            if fixture.structure.is_some() {
                classify_into(&fixture, &points, &mut report)?;
            }
            let lab = Lab::new(&fixture.submersion, fixture.structure.as_ref(), &points, tol)?;
            if *all {
                for id in TheoremId::ALL {
                    push_theorem(&mut report, lab.run(id)?);
                }
            }
            let product = lab.product()?;
            report.product_type = Some(product.product_type);
            report.product_label = Some(product.label);
            report.foliation = Some(FoliationSummary {
                horizontal: product.horizontal,
                vertical: product.vertical,
            });
        }
        Command::Tensors | Command::List => unreachable!("handled above"),
    }
    if !report.failures.is_empty() {
        report.exit_code = EXIT_FAILED;
    }
    Ok(report)
}

fn summary(report: &RunReport) -> String {
    let mut out = String::new();
    let mut line = |s: String| {
        out.push_str(&s);
        out.push('\n');
    };
    if let Some(fs) = &report.fixtures {
        for f in fs {
            line(format!("{:<20} {}", f.name, f.description));
        }
        return out;
    }
    if let Some(s) = &report.source {
        line(format!("{} {} ({})", report.command, s.name, s.kind));
    }
    if let Some(v) = &report.validation {
        line(format!(
            "submersion: {} (worst isometry residual {:.3e})",
            if v.is_riemannian {
                "riemannian"
            } else if v.is_submersion {
                "not riemannian"
            } else {
                "not a submersion"
            },
            v.worst_residual
        ));
    }
    if let Some(s) = &report.structure {
        line(format!("structure: {}", if s.valid { "valid" } else { "invalid" }));
    }
    if let Some(c) = &report.classification {
        line(format!("classification: {}", c.overall));
    }
    for o in report.obstruction.iter().flat_map(|o| &o.notes) {
        line(format!("obstruction: {o}"));
    }
    if let Some(t) = &report.tensors {
        line(format!("mean curvature H = {:?}", t.mean_curvature));
        line(format!("tension = {:?}", t.tension));
    }
    for t in &report.theorems {
        line(format!(
            "theorem {}: {} ({}/{} applicable, direct {:.3e}, condition {:.3e}{})",
            t.id,
            t.verdict,
            t.applicable_points,
            t.total_points,
            t.worst_direct_residual,
            t.worst_condition_residual,
            if t.equivalence_ok { "" } else { ", conditions disagree" }
        ));
    }
    if let Some(l) = &report.product_label {
        line(format!("product: {l}"));
    }
    for f in &report.failures {
        line(format!("failed: {f}"));
    }
    out
}

fn configure_threads() -> Result<()> {
    let Ok(v) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| Error::Manifest(format!("{THREADS_ENV} must be a positive integer, got `{v}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Error::Manifest(format!("{THREADS_ENV}: {e}")))
}

fn emit(cli: &Cli, report: &RunReport) -> Result<()> {
    match &cli.json {
        Some(p) if p.as_os_str() == "-" => {
            std::io::stdout().write_all(report.to_json()?.as_bytes())?;
        }
        Some(p) => {
            std::fs::write(p, report.to_json()?)?;
            print!("{}", summary(report));
        }
        None => print!("{}", summary(report)),
    }
    Ok(())
}

/// Parses arguments, runs, prints, and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
        }
    };
    let start = Instant::now();
    let result = configure_threads().and_then(|_| execute(&cli));
    let code = match result.and_then(|r| emit(&cli, &r).map(|_| r.exit_code)) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code_for(&e)
        }
    };
    eprintln!("elapsed {:.3} s", start.elapsed().as_secs_f64());
    code
}
