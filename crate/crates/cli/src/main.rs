//! `slope-design`: closed-form c-optimal designs for the slope of a
//! polynomial regression without intercept, their optimality certificates,
//! and numerical cross-checks.
//!
//! Exit codes: 0 success, 2 target not covered, 64 usage, 65 bad input data,
//! 70 internal numerical failure.

mod output;

use std::io::{Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};
use slope_design::elfving::{certify_with, extremal_polynomial, variance_with};
use slope_design::oracle::compare_with;
use slope_design::{CertifyOptions, Design64, Error, GridSpec, Problem64, Tolerances, Verdict};

use output::{csv, intervals, num, nums, Envelope};

const EXIT_NOT_COVERED: u8 = 2;
const EXIT_USAGE: u8 = 64;
const EXIT_DATA: u8 = 65;
const EXIT_INTERNAL: u8 = 70;

#[derive(Parser)]
#[command(name = "slope-design", version, about = "c-optimal designs for estimating a polynomial slope")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form optimal design at z, with its certificate.
    Design {
        #[command(flatten)]
        model: Model,
        #[command(flatten)]
        target: Target,
        #[command(flatten)]
        tol: TolFlags,
    },
    /// Admissible region and the roots bounding it.
    Region {
        #[command(flatten)]
        model: Model,
        #[command(flatten)]
        tol: TolFlags,
    },
    /// Check an arbitrary design against the optimality conditions.
    Check {
        /// JSON file with {points, weights} or a `design` envelope; `-` reads stdin.
        #[arg(long = "design-file", value_name = "PATH")]
        design_file: PathBuf,
        #[command(flatten)]
        model: Model,
        #[command(flatten)]
        target: Target,
        #[command(flatten)]
        tol: TolFlags,
    },
    /// Compare the closed form with the grid LP and the fixed-support solve.
    Oracle {
        #[command(flatten)]
        model: Model,
        #[command(flatten)]
        target: Target,
        #[command(flatten)]
        tol: TolFlags,
    },
    /// CSV curves: the extremal polynomial or the weight-function derivatives.
    Plotdata {
        #[command(flatten)]
        model: Model,
        #[arg(long, value_enum)]
        what: Curve,
        #[arg(long, default_value_t = 500)]
        samples: usize,
    },
}

#[derive(Args)]
struct Model {
    /// Degree of the regression polynomial.
    #[arg(long)]
    n: usize,
    /// Right end of the design space [0, a].
    #[arg(long)]
    a: f64,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct Target {
    /// Point at which the slope is estimated.
    #[arg(long, allow_negative_numbers = true)]
    z: Option<f64>,
    /// Comma-separated targets; results keep the input order.
    #[arg(long = "z-list", value_delimiter = ',', allow_negative_numbers = true)]
    z_list: Option<Vec<f64>>,
}

#[derive(Args)]
struct TolFlags {
    #[arg(long = "tol-root", default_value_t = 1e-12)]
    tol_root: f64,
    #[arg(long = "tol-cert", default_value_t = 1e-8)]
    tol_cert: f64,
    /// Grid size for the LP oracle and the certificate's sup-norm check.
    #[arg(long, default_value_t = 2001)]
    grid: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum Curve {
    Extremal,
    Weightderivs,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Data(String),
    Internal(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => EXIT_USAGE,
            Failure::Data(_) => EXIT_DATA,
            Failure::Internal(_) => EXIT_INTERNAL,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Data(m) | Failure::Internal(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidProblem(_) => Failure::Usage(e.to_string()),
            Error::InvalidDesign(_) => Failure::Data(e.to_string()),
            _ => Failure::Internal(e.to_string()),
        }
    }
}

/// Text for stdout plus the exit code.
struct Outcome {
    text: String,
    code: u8,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    match run(cli.command) {
        Ok(out) => {
            let mut stdout = std::io::stdout().lock();
            if stdout.write_all(out.text.as_bytes()).and_then(|_| stdout.flush()).is_err() {
                return ExitCode::from(EXIT_INTERNAL);
            }
            ExitCode::from(out.code)
        }
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}

fn run(command: Command) -> Result<Outcome, Failure> {
    match command {
        Command::Design { model, target, tol } => cmd_design(&model, &target, &tol),
        Command::Region { model, tol } => cmd_region(&model, &tol),
        Command::Check { design_file, model, target, tol } => cmd_check(&design_file, &model, &target, &tol),
        Command::Oracle { model, target, tol } => cmd_oracle(&model, &target, &tol),
        Command::Plotdata { model, what, samples } => cmd_plotdata(&model, what, samples),
    }
}

fn problem(model: &Model) -> Result<Problem64, Failure> {
    if model.n == 0 {
        return Err(Failure::Usage("--n must be at least 1".into()));
    }
    if !(model.a.is_finite() && model.a > 0.0) {
        return Err(Failure::Usage(format!("--a must be positive and finite, got {}", model.a)));
    }
    Ok(Problem64::new(model.n, model.a)?)
}

fn tolerances(flags: &TolFlags) -> Result<(Tolerances, CertifyOptions), Failure> {
    for (name, v) in [("--tol-root", flags.tol_root), ("--tol-cert", flags.tol_cert)] {
        if !(v.is_finite() && v > 0.0) {
            return Err(Failure::Usage(format!("{name} must be positive, got {v}")));
        }
    }
    if flags.grid < 2 {
        return Err(Failure::Usage("--grid needs at least 2 points".into()));
    }
    let tol = Tolerances { root: flags.tol_root, cert: flags.tol_cert, ..Tolerances::default() };
    Ok((tol, CertifyOptions { grid: flags.grid, tol }))
}

/// Targets in input order, and whether they came from `--z-list`.
fn targets(target: &Target) -> Result<(Vec<f64>, bool), Failure> {
    let (zs, batch) = match (&target.z, &target.z_list) {
        (Some(z), None) => (vec![*z], false),
        (None, Some(list)) if !list.is_empty() => (list.clone(), true),
        _ => return Err(Failure::Usage("give exactly one of --z or --z-list".into())),
    };
    if let Some(z) = zs.iter().find(|z| !z.is_finite()) {
        return Err(Failure::Usage(format!("target must be finite, got {z}")));
    }
    Ok((zs, batch))
}

fn model_inputs(model: &Model, target: Option<(&[f64], bool)>, tol: Option<&TolFlags>) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("n".into(), json!(model.n));
    m.insert("a".into(), num(model.a));
    match target {
        Some((zs, true)) => {
            m.insert("z_list".into(), nums(zs));
        }
        Some((zs, false)) => {
            m.insert("z".into(), num(zs[0]));
        }
        None => {}
    }
    if let Some(t) = tol {
        m.insert("tol_root".into(), num(t.tol_root));
        m.insert("tol_cert".into(), num(t.tol_cert));
        m.insert("grid".into(), json!(t.grid));
    }
    m
}

fn warnings_for(n: usize) -> Vec<String> {
    if n > 10 {
        vec![format!("degree {n} is beyond the validated range n <= 10; expect reduced accuracy")]
    } else {
        Vec::new()
    }
}

/// One result per target, or the single result unwrapped.
fn collect(results: Vec<Value>, batch: bool) -> Value {
    if batch {
        Value::Array(results)
    } else {
        results.into_iter().next().expect("one target")
    }
}

fn certificate_json(cert: &slope_design::Certificate64) -> Value {
    json!({
        "p": nums(&cert.p),
        "h": num(cert.h),
        "condition1_margin": num(cert.condition1_margin),
        "condition2_residuals": nums(&cert.condition2_residuals),
        "condition3_residual": num(cert.condition3_residual),
        "interval": cert.interval,
        "verdict": cert.verdict.as_str(),
    })
}

fn cmd_design(model: &Model, target: &Target, flags: &TolFlags) -> Result<Outcome, Failure> {
    let pr = problem(model)?;
    let (tol, opts) = tolerances(flags)?;
    let (zs, batch) = targets(target)?;
    let mut warnings = warnings_for(model.n);
    let mut uncovered = false;
    let mut results = Vec::new();
    for &z in &zs {
        match pr.optimal_design_with(z, &tol) {
            Ok(design) => {
                let cert = certify_with(&pr, z, &design, &opts)?;
                if !cert.verifies() {
                    warnings.push(format!("z = {z}: certificate did not verify at --tol-cert {}", flags.tol_cert));
                }
                results.push(json!({
                    "z": num(z),
                    "covered": true,
                    "points": nums(design.points()),
                    "weights": nums(design.weights()),
                    "variance": num(cert.h * cert.h),
                    "certificate": certificate_json(&cert),
                }));
            }
            Err(Error::NotCovered { region, .. }) => {
                uncovered = true;
                results.push(json!({ "z": num(z), "covered": false, "region": intervals(&region) }));
            }
            Err(Error::BoundaryPoint { endpoint, .. }) => {
                uncovered = true;
                warnings.push(format!("z = {z} lies on the region boundary {endpoint}"));
                let region = pr.admissible_region_with(&tol)?.to_f64_pairs();
                results.push(json!({
                    "z": num(z),
                    "covered": false,
                    "boundary": num(endpoint),
                    "region": intervals(&region),
                }));
            }
            Err(e) => return Err(e.into()),
        }
    }
    let inputs = model_inputs(model, Some((&zs, batch)), Some(flags));
    let env = Envelope::new("design", Value::Object(inputs), collect(results, batch), warnings);
    Ok(Outcome { text: env.render(), code: if uncovered { EXIT_NOT_COVERED } else { 0 } })
}

fn cmd_region(model: &Model, flags: &TolFlags) -> Result<Outcome, Failure> {
    let pr = problem(model)?;
    let (tol, _) = tolerances(flags)?;
    let region = pr.admissible_region_with(&tol)?;
    let roots: Map<String, Value> = region
        .boundary_roots()
        .iter()
        .enumerate()
        .map(|(i, r)| ((i + 1).to_string(), nums(r)))
        .collect();
    let result = json!({
        "intervals": intervals(&region.to_f64_pairs()),
        "roots": Value::Object(roots),
        "support": nums(&pr.support_points()),
    });
    let inputs = model_inputs(model, None, Some(flags));
    let env = Envelope::new("region", Value::Object(inputs), result, warnings_for(model.n));
    Ok(Outcome { text: env.render(), code: 0 })
}

fn read_design(path: &PathBuf) -> Result<Design64, Failure> {
    let text = if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| Failure::Data(format!("reading stdin: {e}")))?;
        s
    } else {
        std::fs::read_to_string(path).map_err(|e| Failure::Data(format!("{}: {e}", path.display())))?
    };
    let value: Value = serde_json::from_str(&text).map_err(|e| Failure::Data(format!("malformed JSON: {e}")))?;
    // accept the output of `design` as well as a bare {points, weights}
    let body = match value.get("result") {
        Some(r) if value.get("schema_version").is_some() => r,
        _ => &value,
    };
    if body.get("covered") == Some(&Value::Bool(false)) {
        return Err(Failure::Data("the design envelope holds no design (z was not covered)".into()));
    }
    let field = |name: &str| -> Result<Vec<f64>, Failure> {
        let arr = body
            .get(name)
            .and_then(Value::as_array)
            .ok_or_else(|| Failure::Data(format!("missing array `{name}`")))?;
        arr.iter()
            .map(|v| v.as_f64().ok_or_else(|| Failure::Data(format!("`{name}` holds a non-number: {v}"))))
            .collect()
    };
    Ok(Design64::new(field("points")?, field("weights")?)?)
}

fn cmd_check(path: &PathBuf, model: &Model, target: &Target, flags: &TolFlags) -> Result<Outcome, Failure> {
    let pr = problem(model)?;
    let (tol, opts) = tolerances(flags)?;
    let (zs, batch) = targets(target)?;
    let design = read_design(path)?;
    design.check_support(&pr)?;
    let mut outside = false;
    let mut results = Vec::new();
    for &z in &zs {
        let variance = variance_with(&design, &pr.slope_vector(z), &tol);
        let mut entry = match certify_with(&pr, z, &design, &opts) {
            Ok(cert) => certificate_json(&cert),
            Err(Error::ZOutsideRegion { .. }) => {
                outside = true;
                json!({ "verdict": Verdict::ZOutsideRegion.as_str() })
            }
            Err(e) => return Err(e.into()),
        };
        let obj = entry.as_object_mut().expect("object");
        obj.insert("z".into(), num(z));
        obj.insert("variance".into(), num(variance));
        results.push(entry);
    }
    let mut inputs = model_inputs(model, Some((&zs, batch)), Some(flags));
    inputs.insert("design_file".into(), json!(path.display().to_string()));
    inputs.insert("points".into(), nums(design.points()));
    inputs.insert("weights".into(), nums(design.weights()));
    let env = Envelope::new("check", Value::Object(inputs), collect(results, batch), warnings_for(model.n));
    Ok(Outcome { text: env.render(), code: if outside { EXIT_NOT_COVERED } else { 0 } })
}

fn cmd_oracle(model: &Model, target: &Target, flags: &TolFlags) -> Result<Outcome, Failure> {
    let pr = problem(model)?;
    let (tol, _) = tolerances(flags)?;
    let (zs, batch) = targets(target)?;
    if flags.grid < model.n + 1 {
        return Err(Failure::Usage(format!("--grid {} is too coarse for degree {}", flags.grid, model.n)));
    }
    let grid = GridSpec::new(flags.grid);
    let mut warnings = warnings_for(model.n);
    let mut results = Vec::new();
    for &z in &zs {
        let r = compare_with(&pr, z, &grid, &tol)?;
        if r.covered && !r.agrees {
            warnings.push(format!("z = {z}: oracles disagree with the closed form"));
        }
        results.push(json!({
            "z": num(r.z),
            "covered": r.covered,
            "agrees": r.agrees,
            "closed_form_variance": r.closed_form_variance.map_or(Value::Null, num),
            "lp_variance": num(r.lp_variance),
            "restricted_variance": num(r.restricted_variance),
            "restricted_minus_lp": num(r.restricted_minus_lp),
            "outside_region_margin": num(r.outside_region_margin),
            "max_weight_discrepancy": num(r.max_weight_discrepancy),
            "lp_design": {
                "points": nums(r.lp_design.points()),
                "weights": nums(r.lp_design.weights()),
            },
            "support": nums(&pr.support_points()),
            "restricted_weights": nums(&r.restricted_weights),
        }));
    }
    let inputs = model_inputs(model, Some((&zs, batch)), Some(flags));
    let env = Envelope::new("oracle", Value::Object(inputs), collect(results, batch), warnings);
    Ok(Outcome { text: env.render(), code: 0 })
}

fn samples_on(lo: f64, hi: f64, samples: usize) -> impl Iterator<Item = f64> {
    (0..samples).map(move |k| {
        if k + 1 == samples {
            hi
        } else {
            lo + (hi - lo) * k as f64 / (samples - 1) as f64
        }
    })
}

fn cmd_plotdata(model: &Model, what: Curve, samples: usize) -> Result<Outcome, Failure> {
    let pr = problem(model)?;
    if samples < 2 {
        return Err(Failure::Usage("--samples must be at least 2".into()));
    }
    let (header, rows): (Vec<String>, Vec<Vec<f64>>) = match what {
        Curve::Extremal => {
            let s = extremal_polynomial(&pr);
            let rows = samples_on(0.0, model.a, samples).map(|x| vec![x, s.eval_compensated(x)]).collect();
            (vec!["x".into(), "S_n".into()], rows)
        }
        Curve::Weightderivs => {
            let region = pr.admissible_region()?;
            // every root, and the design space itself, with 10% padding
            let (lo, hi) = region
                .boundary_roots()
                .iter()
                .flatten()
                .fold((0.0f64, model.a), |(lo, hi), &r| (lo.min(r), hi.max(r)));
            let pad = 0.1 * (hi - lo);
            let derivs = pr.weight_functions();
            let rows = samples_on(lo - pad, hi + pad, samples)
                .map(|z| std::iter::once(z).chain(derivs.iter().map(|d| d.eval_compensated(z))).collect())
                .collect();
            let header = std::iter::once("z".to_string())
                .chain((1..=model.n).map(|i| format!("L{i}p")))
                .collect();
            (header, rows)
        }
    };
    Ok(Outcome { text: csv(&header, &rows), code: 0 })
}
