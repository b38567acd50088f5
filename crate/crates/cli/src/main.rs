//! `jbmeans` command-line front end.
//!
//! Exit codes: 0 ok, 1 verification failure, 2 usage or config error, 3 I/O
//! error, 4 domain error (including non-convergent quadrature).

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use jbmeans::harness::{run_suite, ReportFormat};
use jbmeans::means::{arithmetic_mean, geometric_mean, harmonic_mean};
use jbmeans::quadrature::{
    geometric_mean_integral, log_integral, power_integral, uniformity_probe, FunctionFamily,
    ProbeRecord,
};
use jbmeans::spectral::{spectral_decompose, DEFAULT_CLUSTER_TOL};
use jbmeans::{AlgebraDescriptor, AlgebraElement, Error, QuadratureConfig, Scheme, SuiteConfig};
use serde_json::{json, Value};

const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_IO: u8 = 3;
const EXIT_DOMAIN: u8 = 4;

#[derive(Parser)]
#[command(name = "jbmeans", version, about = "Operator means in JB-algebras")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the randomized verification suite and write its report.
    Verify(VerifyArgs),
    /// Compute a weighted mean of two elements.
    Mean(MeanArgs),
    /// Print the eigenvalues and multiplicities of an element.
    Spectrum {
        #[arg(long = "a", value_name = "FILE")]
        a: PathBuf,
    },
    /// Evaluate a scalar integral representation.
    Integral(IntegralArgs),
    /// Run the uniform-integrability probe.
    Probe(ProbeArgs),
}

#[derive(clap::Args)]
struct VerifyArgs {
    /// JSON suite configuration; flags override its fields.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    trials: Option<usize>,
    /// Comma separated, e.g. `sym:3,herm:3,spin:4,albert`.
    #[arg(long, value_delimiter = ',')]
    kinds: Option<Vec<String>>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long = "lambda-grid", value_delimiter = ',')]
    lambda_grid: Option<Vec<f64>>,
    /// Comma separated check ids; default is the full suite.
    #[arg(long, value_delimiter = ',')]
    checks: Option<Vec<String>>,
    /// Draw independent pairs for the upper Kubo–Ando check.
    #[arg(long)]
    unconstrained: bool,
    /// Report path; stdout when absent.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

impl From<Format> for ReportFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Json => ReportFormat::Json,
            Format::Csv => ReportFormat::Csv,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum MeanChoice {
    Harmonic,
    Geometric,
    Arithmetic,
}

#[derive(Clone, Copy, ValueEnum)]
enum Via {
    Direct,
    Integral,
}

#[derive(clap::Args)]
struct QuadratureArgs {
    #[arg(long = "rel-tol")]
    rel_tol: Option<f64>,
    #[arg(long = "max-levels")]
    max_levels: Option<usize>,
    #[arg(long, value_enum)]
    scheme: Option<SchemeChoice>,
}

#[derive(Clone, Copy, ValueEnum)]
enum SchemeChoice {
    TanhSinh,
    GaussLegendre,
}

impl QuadratureArgs {
    fn apply(&self, mut cfg: QuadratureConfig) -> QuadratureConfig {
        if let Some(t) = self.rel_tol {
            cfg.rel_tol = t;
        }
        if let Some(l) = self.max_levels {
            cfg.max_refinement_levels = l;
        }
        if let Some(s) = self.scheme {
            cfg.scheme = match s {
                SchemeChoice::TanhSinh => Scheme::TanhSinh,
                SchemeChoice::GaussLegendre => Scheme::GaussLegendreComposite,
            };
        }
        cfg
    }
}

#[derive(clap::Args)]
struct MeanArgs {
    #[arg(long, value_enum)]
    kind: MeanChoice,
    #[arg(long)]
    lambda: f64,
    #[arg(long = "a", value_name = "FILE")]
    a: PathBuf,
    #[arg(long = "b", value_name = "FILE")]
    b: PathBuf,
    #[arg(long, value_enum, default_value = "direct")]
    via: Via,
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
    #[command(flatten)]
    quadrature: QuadratureArgs,
}

#[derive(Clone, Copy, ValueEnum)]
enum Rep {
    Power,
    Log,
}

#[derive(clap::Args)]
struct IntegralArgs {
    #[arg(long, value_enum)]
    rep: Rep,
    #[arg(long)]
    x: f64,
    #[arg(long, default_value_t = 0.5)]
    lambda: f64,
    #[command(flatten)]
    quadrature: QuadratureArgs,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyChoice {
    Power,
    Log,
}

#[derive(Clone, Copy, ValueEnum)]
enum ProbeFormat {
    Table,
    Json,
}

#[derive(clap::Args)]
struct ProbeArgs {
    #[arg(long, value_enum)]
    family: FamilyChoice,
    #[arg(long = "M", value_name = "M")]
    m: f64,
    /// Exponent of the power kernel.
    #[arg(long, default_value_t = 0.5)]
    lambda: f64,
    #[arg(long = "tail-growth")]
    tail_growth: Option<f64>,
    #[arg(long, value_enum, default_value = "table")]
    format: ProbeFormat,
    #[command(flatten)]
    quadrature: QuadratureArgs,
}

/// An error together with the exit code it maps to.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Io(_) => EXIT_IO,
            _ => EXIT_DOMAIN,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

type CmdResult = Result<u8, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Verify(args) => cmd_verify(&args),
        Command::Mean(args) => cmd_mean(&args),
        Command::Spectrum { a } => cmd_spectrum(&a),
        Command::Integral(args) => cmd_integral(&args),
        Command::Probe(args) => cmd_probe(&args),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn write_output(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure {
            code: EXIT_IO,
            message: format!("cannot write {}: {e}", p.display()),
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Suite settings plus the output options a config file may carry.
struct VerifyPlan {
    suite: SuiteConfig,
    out: Option<PathBuf>,
    format: ReportFormat,
}

fn load_verify_config(path: &Path) -> Result<VerifyPlan, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::usage(format!("cannot read config {}: {e}", path.display())))?;
    let mut doc: Value = serde_json::from_str(&text)
        .map_err(|e| Failure::usage(format!("invalid config {}: {e}", path.display())))?;
    let obj = doc
        .as_object_mut()
        .ok_or_else(|| Failure::usage("config must be a JSON object"))?;
    let out = match obj.remove("out") {
        Some(Value::String(s)) => Some(PathBuf::from(s)),
        Some(Value::Null) | None => None,
        Some(_) => return Err(Failure::usage("config field `out` must be a string")),
    };
    let format = match obj.remove("format") {
        Some(v) => serde_json::from_value(v)
            .map_err(|e| Failure::usage(format!("config field `format`: {e}")))?,
        None => ReportFormat::Json,
    };
    let suite: SuiteConfig =
        serde_json::from_value(doc).map_err(|e| Failure::usage(format!("invalid config: {e}")))?;
    Ok(VerifyPlan { suite, out, format })
}

fn cmd_verify(args: &VerifyArgs) -> CmdResult {
    let mut plan = match &args.config {
        Some(p) => load_verify_config(p)?,
        None => VerifyPlan {
            suite: SuiteConfig::default(),
            out: None,
            format: ReportFormat::Json,
        },
    };
    let cfg = &mut plan.suite;
    if let Some(t) = args.tol {
        cfg.tol = t;
    }
    if let Some(n) = args.trials {
        cfg.trials_per_check = n;
    }
    if let Some(kinds) = &args.kinds {
        cfg.kinds = kinds
            .iter()
            .map(|k| k.parse::<AlgebraDescriptor>())
            .collect::<Result<_, _>>()
            .map_err(|e| Failure::usage(e.to_string()))?;
    }
    if let Some(s) = args.seed {
        cfg.base_seed = s;
    }
    if let Some(g) = &args.lambda_grid {
        cfg.lambda_grid = g.clone();
    }
    if let Some(c) = &args.checks {
        cfg.checks = c.clone();
    }
    if args.unconstrained {
        cfg.constrained = false;
    }
    if let Some(o) = &args.out {
        plan.out = Some(o.clone());
    }
    if let Some(f) = args.format {
        plan.format = f.into();
    }
    plan.suite
        .validate()
        .map_err(|e| Failure::usage(e.to_string()))?;

    let report = run_suite(&plan.suite)?;
    write_output(plan.out.as_deref(), &report.render(plan.format))?;
    eprintln!(
        "{} cells: {} pass, {} fail, {} skipped",
        report.checks.len(),
        report.total_pass(),
        report.total_fail(),
        report.total_skip()
    );
    Ok(if report.total_fail() > 0 {
        EXIT_FAIL
    } else {
        0
    })
}

fn read_element(path: &Path) -> Result<AlgebraElement, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure {
        code: EXIT_IO,
        message: format!("cannot read {}: {e}", path.display()),
    })?;
    serde_json::from_str(&text)
        .map_err(|e| Failure::usage(format!("invalid element file {}: {e}", path.display())))
}

fn cmd_mean(args: &MeanArgs) -> CmdResult {
    let a = read_element(&args.a)?;
    let b = read_element(&args.b)?;
    let l = args.lambda;
    let out = match (args.kind, args.via) {
        (MeanChoice::Geometric, Via::Integral) => {
            // the integral form needs 0 < lambda < 1; the endpoints are exact
            if l == 0.0 || l == 1.0 {
                geometric_mean(&a, &b, l)?
            } else {
                let q = args.quadrature.apply(QuadratureConfig::element());
                geometric_mean_integral(&a, &b, l, &q)?
            }
        }
        (MeanChoice::Geometric, Via::Direct) => geometric_mean(&a, &b, l)?,
        (MeanChoice::Harmonic, _) => harmonic_mean(&a, &b, l)?,
        (MeanChoice::Arithmetic, _) => arithmetic_mean(&a, &b, l)?,
    };
    let text = serde_json::to_string(&out).expect("element serializes") + "\n";
    write_output(args.out.as_deref(), &text)?;
    Ok(0)
}

fn cmd_spectrum(path: &Path) -> CmdResult {
    let a = read_element(path)?;
    let dec = spectral_decompose(&a, DEFAULT_CLUSTER_TOL);
    let doc = json!({
        "descriptor": a.descriptor().to_string(),
        "eigenvalues": dec.eigenvalues,
        "multiplicities": dec.multiplicity_clusters,
    });
    println!("{}", serde_json::to_string_pretty(&doc).expect("json"));
    Ok(0)
}

fn cmd_integral(args: &IntegralArgs) -> CmdResult {
    let q = args.quadrature.apply(QuadratureConfig::scalar());
    let doc = match args.rep {
        Rep::Power => {
            let e = power_integral(args.x, args.lambda, &q)?;
            json!({
                "rep": "power",
                "x": args.x,
                "lambda": args.lambda,
                "value": e.value,
                "error_bound": e.error_bound,
                "levels": e.levels,
                "closed_form": args.x.powf(args.lambda),
            })
        }
        Rep::Log => {
            let e = log_integral(args.x, &q)?;
            json!({
                "rep": "log",
                "x": args.x,
                "value": e.value,
                "error_bound": e.error_bound,
                "levels": e.levels,
                "closed_form": args.x.ln(),
            })
        }
    };
    println!("{}", serde_json::to_string_pretty(&doc).expect("json"));
    Ok(0)
}

fn probe_table(rec: &ProbeRecord) -> String {
    let mut s = format!(
        "family {}  M = {}  grid points {}\n",
        rec.family,
        rec.m,
        rec.grid.len()
    );
    s.push_str(&format!(
        "{:>5} {:>10} {:>10} {:>8} {:>12} {:>12} {:>12}\n",
        "level", "delta", "N", "panels", "head", "tail", "mesh"
    ));
    for (i, lv) in rec.levels.iter().enumerate() {
        s.push_str(&format!(
            "{:>5} {:>10.1e} {:>10.1e} {:>8} {:>12.3e} {:>12.3e} {:>12.3e}\n",
            i,
            lv.delta,
            lv.n_cutoff,
            lv.mesh_panels,
            rec.head[i],
            rec.tail[i],
            rec.mesh_discrepancy[i]
        ));
    }
    s.push_str(if rec.decays() {
        "all residual columns decrease\n"
    } else {
        "residual columns do not all decrease\n"
    });
    s
}

fn cmd_probe(args: &ProbeArgs) -> CmdResult {
    let family = match args.family {
        FamilyChoice::Power => FunctionFamily::PowerKernel {
            lambda: args.lambda,
        },
        FamilyChoice::Log => FunctionFamily::LogKernel,
    };
    let mut q = args.quadrature.apply(QuadratureConfig::scalar());
    if let Some(g) = args.tail_growth {
        q.tail_cutoff_growth = g;
    }
    let rec = uniformity_probe(family, args.m, &q)?;
    match args.format {
        ProbeFormat::Table => print!("{}", probe_table(&rec)),
        ProbeFormat::Json => {
            println!("{}", serde_json::to_string_pretty(&rec).expect("json"))
        }
    }
    Ok(0)
}
