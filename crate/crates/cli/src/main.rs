//! `curvop`: spectra, cone checks, threshold tables, verification suites and
//! optimization oracles for the curvature operator of the second kind.
//!
//! Exit codes: 0 success, 1 a mathematical check failed, 2 usage or input
//! error.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use curvop::bochner::f_simplex;
use curvop::cone_analysis::{
    alpha_max, in_cone, lambda1_bound, theta_auto, threshold_report, ConeParams, ThresholdReport,
};
use curvop::io::{read_tensor, tensor_to_json, SpectrumFile};
use curvop::model_spaces::ModelSpec;
use curvop::oracle_opt::{f_minimizers, lp_min_lambda1, minimize_f};
use curvop::second_kind::spectrum_of;
use curvop::tensor_algebra::traceless_dim;
use curvop::verify::{self, Grid, SuiteSelection, VerifyConfig};
use curvop::{AlgCurvature, Error, Spectrum};
use serde::Serialize;

#[derive(Parser)]
#[command(name = "curvop", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Second-kind spectrum of a tensor file or model.
    Spectrum {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Membership of a spectrum in C(alpha, theta).
    CheckCone {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        alpha: f64,
        #[arg(long, default_value = "auto", allow_hyphen_values = true)]
        theta: ThetaArg,
        /// Extra tolerance on the slack.
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
    },
    /// Table of thresholds: n,N,alpha,theta,alpha_max,regime.
    Thresholds {
        /// Single dimension; all of 4..=12 when omitted.
        #[arg(long)]
        n: Option<usize>,
        /// Single alpha instead of a grid.
        #[arg(long)]
        alpha: Option<f64>,
        /// Number of alpha points from 1 to alpha_max.
        #[arg(long, default_value_t = 11)]
        count: usize,
        /// CSV, or JSON when the path ends in .json; stdout when omitted.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Run invariant suites.
    Verify {
        #[arg(long, default_value = "all")]
        suite: String,
        /// Restrict to one dimension.
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "default")]
        grid: String,
        /// Relative error injected into the sum-of-norms constant.
        #[arg(long, default_value_t = 0.0)]
        perturb: f64,
        #[arg(long, default_value_t = 8)]
        restarts: usize,
        /// Full per-sample report as JSON.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Minimize F over the simplex and lambda_1 over the cone.
    Minimize {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        alpha: f64,
        #[arg(long, default_value = "auto", allow_hyphen_values = true)]
        theta: ThetaArg,
        #[arg(long, default_value_t = 8)]
        restarts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Accepted negative part of min F.
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Write a model tensor as JSON.
    Model {
        #[command(flatten)]
        model: ModelArgs,
        /// ModelSpec JSON file, instead of --model.
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Clone, Copy)]
enum ThetaArg {
    Auto,
    Value(f64),
}

impl std::str::FromStr for ThetaArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "auto" {
            return Ok(ThetaArg::Auto);
        }
        s.parse()
            .map(ThetaArg::Value)
            .map_err(|_| format!("expected a number or \"auto\", got '{s}'"))
    }
}

#[derive(Args)]
struct ModelArgs {
    /// constant, flat, fubini_study, sphere_product or random_einstein.
    #[arg(long)]
    model: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    p: Option<usize>,
    #[arg(long)]
    q: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    kappa: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    kappa1: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    kappa2: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    scal: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct Source {
    /// Tensor JSON, or spectrum JSON where accepted.
    #[arg(long)]
    input: Option<PathBuf>,
    #[command(flatten)]
    model: ModelArgs,
}

/// Failure with an exit code.
struct Fail {
    code: u8,
    message: String,
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail {
            code: 2,
            message: e.to_string(),
        }
    }
}

fn usage(message: impl Into<String>) -> Fail {
    Fail {
        code: 2,
        message: message.into(),
    }
}

type CmdResult = Result<u8, Fail>;

fn need<T>(value: Option<T>, flag: &str, kind: &str) -> Result<T, Fail> {
    value.ok_or_else(|| usage(format!("--model {kind} needs --{flag}")))
}

impl ModelArgs {
    fn spec(&self) -> Result<Option<ModelSpec>, Fail> {
        let Some(kind) = self.model.as_deref() else {
            return Ok(None);
        };
        let spec = match kind {
            "constant" => ModelSpec::Constant {
                n: need(self.n, "n", kind)?,
                kappa: self.kappa.unwrap_or(1.0),
            },
            "flat" => ModelSpec::Flat {
                n: need(self.n, "n", kind)?,
            },
            "fubini_study" | "fubini-study" => ModelSpec::FubiniStudy {
                m: need(self.m, "m", kind)?,
            },
            "sphere_product" | "sphere-product" => ModelSpec::SphereProduct {
                p: need(self.p, "p", kind)?,
                kappa1: self.kappa1.unwrap_or(1.0),
                q: need(self.q, "q", kind)?,
                kappa2: self.kappa2.unwrap_or(1.0),
            },
            "random_einstein" | "random-einstein" => ModelSpec::RandomEinstein {
                n: need(self.n, "n", kind)?,
                scal: self.scal.unwrap_or(0.0),
                seed: self.seed,
            },
            other => {
                return Err(usage(format!(
                    "unknown model '{other}', expected constant, flat, fubini_study, sphere_product or random_einstein"
                )))
            }
        };
        Ok(Some(spec))
    }
}

enum Loaded {
    Tensor(AlgCurvature),
    Spectrum { n: usize, spec: Spectrum },
}

fn read_text(path: &Path) -> Result<String, Fail> {
    fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))
}

fn load(source: &Source, allow_spectrum: bool) -> Result<Loaded, Fail> {
    match (&source.input, source.model.spec()?) {
        (Some(_), Some(_)) => Err(usage("give either --input or --model, not both")),
        (None, None) => Err(usage("an --input file or a --model is required")),
        (None, Some(spec)) => Ok(Loaded::Tensor(spec.build()?)),
        (Some(path), None) => {
            let text = read_text(path)?;
            let value: serde_json::Value = serde_json::from_str(&text)
                .map_err(|e| usage(format!("{}: {e}", path.display())))?;
            if value.get("eigenvalues").is_some() {
                if !allow_spectrum {
                    return Err(usage("this command needs a tensor, not a spectrum file"));
                }
                let file = SpectrumFile::from_json(&text)?;
                Ok(Loaded::Spectrum {
                    n: file.n,
                    spec: file.spectrum()?,
                })
            } else {
                Ok(Loaded::Tensor(read_tensor(path)?))
            }
        }
    }
}

fn write_out(path: &Path, text: &str) -> Result<(), Fail> {
    fs::write(path, text).map_err(|e| usage(format!("cannot write {}: {e}", path.display())))
}

fn to_json<T: Serialize>(value: &T) -> Result<String, Fail> {
    serde_json::to_string_pretty(value).map_err(|e| usage(e.to_string()))
}

fn cmd_spectrum(source: &Source, output: Option<&Path>) -> CmdResult {
    let Loaded::Tensor(r) = load(source, false)? else {
        unreachable!("spectrum files are rejected by load");
    };
    let spec = spectrum_of(&r)?;
    let scal = r.scalar();
    let values = spec.values();
    println!("n = {}", r.n());
    println!("N = {}", spec.len());
    println!("lambda_1 = {:.12e}", values[0]);
    println!("lambda_N = {:.12e}", values[values.len() - 1]);
    println!("mean = {:.12e}", spec.mean());
    println!("Scal = {:.12e}", scal);
    if let Some(path) = output {
        write_out(path, &SpectrumFile::new(r.n(), &spec, scal).to_json())?;
    }
    Ok(0)
}

fn resolve_theta(theta: ThetaArg, n: usize, alpha: f64) -> Result<(f64, &'static str), Fail> {
    match theta {
        ThetaArg::Value(t) => Ok((t, "given")),
        ThetaArg::Auto => Ok((theta_auto(n, alpha)?, "auto")),
    }
}

fn cmd_check_cone(source: &Source, alpha: f64, theta: ThetaArg, tol: f64) -> CmdResult {
    let (n, spec) = match load(source, true)? {
        Loaded::Tensor(r) => (r.n(), spectrum_of(&r)?),
        Loaded::Spectrum { n, spec } => (n, spec),
    };
    let (theta, how) = resolve_theta(theta, n, alpha)?;
    let params = ConeParams::new(alpha, theta)?;
    params.check_against(spec.len())?;
    let check = in_cone(&spec, &params)?;
    let member = check.slack >= -tol;
    println!("n = {n}, N = {}", spec.len());
    println!("alpha = {alpha}");
    println!("theta = {theta} ({how})");
    println!("cone_value = {:.12e}", check.cone_value);
    println!("slack = {:.12e}", check.slack);
    println!("member = {member}");
    Ok(if member { 0 } else { 1 })
}

fn threshold_rows(
    n: Option<usize>,
    alpha: Option<f64>,
    count: usize,
) -> Result<Vec<ThresholdReport>, Fail> {
    let dims: Vec<usize> = match n {
        Some(n) => vec![n],
        None => (4..=12).collect(),
    };
    let mut rows = Vec::new();
    for n in dims {
        let alphas = match alpha {
            Some(a) => vec![a],
            None => {
                if count == 0 {
                    return Err(usage("--count must be at least 1"));
                }
                verify::linspace(1.0, alpha_max(n)?, count)
            }
        };
        for a in alphas {
            rows.push(threshold_report(n, a)?);
        }
    }
    Ok(rows)
}

fn cmd_thresholds(
    n: Option<usize>,
    alpha: Option<f64>,
    count: usize,
    output: Option<&Path>,
) -> CmdResult {
    let rows = threshold_rows(n, alpha, count)?;
    let json = output.is_some_and(|p| p.extension().is_some_and(|e| e == "json"));
    let text = if json {
        to_json(&rows)?
    } else {
        let mut s = String::from("n,N,alpha,theta,alpha_max,regime\n");
        for r in &rows {
            s.push_str(&format!(
                "{},{},{:.17},{:.17},{:.17},{}\n",
                r.n,
                r.big_n,
                r.alpha,
                r.theta,
                r.alpha_max,
                r.regime.as_str()
            ));
        }
        s
    };
    match output {
        Some(path) => write_out(path, &text)?,
        None => print!("{text}"),
    }
    Ok(0)
}

#[allow(clippy::too_many_arguments)]
fn cmd_verify(
    suite: &str,
    n: Option<usize>,
    count: usize,
    seed: u64,
    grid: &str,
    perturb: f64,
    restarts: usize,
    output: Option<&Path>,
) -> CmdResult {
    let selection: SuiteSelection = suite.parse()?;
    let mut cfg = VerifyConfig {
        count,
        seed,
        perturb,
        grid: grid.parse::<Grid>()?,
        restarts,
        ..VerifyConfig::default()
    };
    if let Some(n) = n {
        cfg.dims = vec![n];
    }
    let reports = verify::run(&selection, &cfg)?;
    let mut violations = 0;
    for rep in &reports {
        let s = rep.summary;
        violations += s.violations;
        println!(
            "{}: samples={} violations={} worst_slack={:.3e}",
            rep.suite, s.samples, s.violations, s.worst_slack
        );
        for bad in rep.reports.iter().filter(|r| !r.pass).take(5) {
            let names: Vec<&str> = bad.failing_checks().map(|c| c.name).collect();
            match &bad.error {
                Some(e) => println!("  FAIL {}: {e}", bad.label),
                None => println!("  FAIL {}: {}", bad.label, names.join(", ")),
            }
        }
    }
    if let Some(path) = output {
        write_out(path, &to_json(&reports)?)?;
    }
    Ok(if violations == 0 { 0 } else { 1 })
}

#[derive(Serialize)]
struct MinimizeOutput {
    n: usize,
    #[serde(rename = "N")]
    big_n: usize,
    alpha: f64,
    theta: f64,
    a: f64,
    min_value: f64,
    argmin: Vec<f64>,
    pattern: curvop::oracle_opt::Pattern,
    restarts_converged: usize,
    enumeration_min: f64,
    gradient_min: f64,
    minimizer_values: [f64; 2],
    lp_min_lambda1: f64,
    closed_form_min_lambda1: f64,
}

#[allow(clippy::too_many_arguments)]
fn cmd_minimize(
    n: usize,
    alpha: f64,
    theta: ThetaArg,
    restarts: usize,
    seed: u64,
    tol: f64,
    output: Option<&Path>,
) -> CmdResult {
    let (theta, how) = resolve_theta(theta, n, alpha)?;
    let big_n = traceless_dim(n);
    let params = ConeParams::new(alpha, theta)?;
    let a = lambda1_bound(big_n, &params)?;
    let res = minimize_f(big_n, a, restarts, seed)?;
    let lp = lp_min_lambda1(big_n, &params)?;
    let at_minimizers = f_minimizers(big_n, a).map(|x| f_simplex(&x, a, big_n));
    println!("n = {n}, N = {big_n}, alpha = {alpha}, theta = {theta} ({how}), A = {a:.12e}");
    println!("min F = {:.6e}", res.min_value);
    println!(
        "pattern: {} zeros, levels {:?}",
        res.pattern.zeros, res.pattern.levels
    );
    println!(
        "enumeration min = {:.6e}, gradient min = {:.6e}, restarts converged = {}/{}",
        res.enumeration_min, res.gradient_min, res.restarts_converged, res.restarts
    );
    println!(
        "F at constant = {:.3e}, F at one-zero = {:.3e}",
        at_minimizers[0], at_minimizers[1]
    );
    println!(
        "LP min lambda_1 = {:.12e}, closed form = {:.12e}",
        lp.min_lambda1, -a
    );
    if let Some(path) = output {
        let out = MinimizeOutput {
            n,
            big_n,
            alpha,
            theta,
            a,
            min_value: res.min_value,
            argmin: res.argmin.clone(),
            pattern: res.pattern.clone(),
            restarts_converged: res.restarts_converged,
            enumeration_min: res.enumeration_min,
            gradient_min: res.gradient_min,
            minimizer_values: at_minimizers,
            lp_min_lambda1: lp.min_lambda1,
            closed_form_min_lambda1: -a,
        };
        write_out(path, &to_json(&out)?)?;
    }
    let ok = res.min_value >= -tol && (lp.min_lambda1 + a).abs() <= 1e-9;
    Ok(if ok { 0 } else { 1 })
}

fn cmd_model(model: &ModelArgs, input: Option<&Path>, output: Option<&Path>) -> CmdResult {
    let spec = match (input, model.spec()?) {
        (Some(_), Some(_)) => return Err(usage("give either --input or --model, not both")),
        (None, None) => return Err(usage("a --model or an --input ModelSpec file is required")),
        (None, Some(spec)) => spec,
        (Some(path), None) => serde_json::from_str(&read_text(path)?)
            .map_err(|e| usage(format!("{}: {e}", path.display())))?,
    };
    let text = tensor_to_json(&spec.build()?);
    match output {
        Some(path) => write_out(path, &text)?,
        None => print!("{text}"),
    }
    Ok(0)
}

fn run(cli: Cli) -> CmdResult {
    match cli.command {
        Command::Spectrum { source, output } => cmd_spectrum(&source, output.as_deref()),
        Command::CheckCone {
            source,
            alpha,
            theta,
            tol,
        } => cmd_check_cone(&source, alpha, theta, tol),
        Command::Thresholds {
            n,
            alpha,
            count,
            output,
        } => cmd_thresholds(n, alpha, count, output.as_deref()),
        Command::Verify {
            suite,
            n,
            count,
            seed,
            grid,
            perturb,
            restarts,
            output,
        } => cmd_verify(
            &suite,
            n,
            count,
            seed,
            &grid,
            perturb,
            restarts,
            output.as_deref(),
        ),
        Command::Minimize {
            n,
            alpha,
            theta,
            restarts,
            seed,
            tol,
            output,
        } => cmd_minimize(n, alpha, theta, restarts, seed, tol, output.as_deref()),
        Command::Model {
            model,
            input,
            output,
        } => cmd_model(&model, input.as_deref(), output.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
