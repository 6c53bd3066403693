use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use sle_coset::affine::{admissible_pq, sugawara_check, AffineModule};
use sle_coset::coset::{
    branching_check, commutant_check, coset_bracket_check, coset_central_charge, omega_com_check,
};
use sle_coset::internal::{internal_consistency, InternalScheme};
use sle_coset::loewner::{sle_ensemble, sle_trajectory};
use sle_coset::martingale::{corollary_projection_check, critical_parameters, theorem2_drift_check, vacuum_drift_check};
use sle_coset::montecarlo::{mc_simulate, McConfig, McTarget};
use sle_coset::report::{params, SubCheck, VerificationReport};
use sle_coset::sl2::Spin;
use sle_coset::virasoro::{minimal_table, singular_vector_check};
use sle_coset::{format_rational, parse_rational, Error, Rational, Status, SCHEMA_VERSION};

#[derive(Parser, Debug)]
#[command(name = "sle-coset", version, about = "Exact coset/Virasoro checks and SLE martingale simulation")]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the result here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Central charges and Kac weights of the minimal models up to (p, q).
    MinimalTable(TableArgs),
    /// Run an exact verification; exit code 0 iff verified.
    Verify {
        #[command(subcommand)]
        which: Verify,
    },
    /// Monte Carlo test of the martingale property of V_t|v>.
    Simulate(SimulateArgs),
    /// Graded dimensions of L_k(j) against the universal module.
    Dims(DimsArgs),
    /// Series SLE: one trajectory, or ensemble statistics with --samples.
    Sle(SleArgs),
    /// Compare the direct and matrix integrations of the internal process.
    Internal(InternalArgs),
}

fn rational(s: &str) -> Result<Rational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

fn spin(s: &str) -> Result<Spin, String> {
    Spin::parse(s).map_err(|e| e.to_string())
}

#[derive(Args, Debug, Serialize)]
struct TableArgs {
    /// Largest p.
    #[arg(long)]
    p: i64,
    /// Largest q.
    #[arg(long)]
    q: i64,
}

#[derive(Args, Debug, Serialize)]
struct LevelArgs {
    /// Level k as an exact rational, e.g. 1 or -1/2.
    #[arg(long, value_parser = rational, allow_hyphen_values = true)]
    #[serde(with = "sle_coset::scalar::serde_rational")]
    k: Rational,
    /// SLE parameter; defaults to 4(k+2)/(k+3).
    #[arg(long, value_parser = rational, allow_hyphen_values = true)]
    #[serde(with = "sle_coset::scalar::serde_rational_opt")]
    kappa: Option<Rational>,
    /// Noise strength; defaults to 2/(k+3).
    #[arg(long, value_parser = rational, allow_hyphen_values = true)]
    #[serde(with = "sle_coset::scalar::serde_rational_opt")]
    tau: Option<Rational>,
}

#[derive(Subcommand, Debug)]
enum Verify {
    /// Level-2 singular vector of L(c_{p,q}, h_{2,1}) with kappa = 4p/q.
    Singular {
        #[arg(long)]
        p: i64,
        #[arg(long)]
        q: i64,
        /// Also check that kappa + perturb breaks the singularity.
        #[arg(long, value_parser = rational, allow_hyphen_values = true)]
        perturb: Option<Rational>,
    },
    /// Sugawara Virasoro relations and c = 3k/(k+2).
    Sugawara {
        #[arg(long, value_parser = rational, allow_hyphen_values = true)]
        k: Rational,
        #[arg(long, value_parser = spin, default_value = "0")]
        j: Spin,
        #[arg(long, default_value_t = 4)]
        grade: usize,
    },
    /// Coset central charge, omega^Com, and commutation with the diagonal currents.
    Coset {
        #[arg(long, value_parser = rational, allow_hyphen_values = true)]
        k: Rational,
        #[arg(long, value_parser = spin, default_value = "1/2")]
        j: Spin,
        #[arg(long, value_parser = spin, default_value = "1/2")]
        eps: Spin,
        #[arg(long, default_value_t = 3)]
        grade: usize,
    },
    /// Refined character identity of the coset branching.
    Branching {
        #[arg(long, value_parser = rational, allow_hyphen_values = true)]
        k: Rational,
        #[arg(long, value_parser = spin, default_value = "1/2")]
        j: Spin,
        #[arg(long, value_parser = spin, default_value = "1/2")]
        eps: Spin,
        #[arg(long, default_value_t = 3)]
        grade: usize,
    },
    /// Generator drift on the level-(k+1) vacuum.
    VacuumDrift(LevelArgs),
    /// Generator drift on |s> in L_k(1/2) (x) L_1(1/2).
    Thm2 {
        #[command(flatten)]
        level: LevelArgs,
        #[arg(long, default_value_t = 2)]
        grade: usize,
    },
    /// Projections of the drift on |s> to L_k(1/2).
    Corollary(LevelArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum TargetKind {
    Tensor,
    Virasoro,
    Affine,
}

#[derive(Args, Debug, Serialize)]
struct SimulateArgs {
    #[arg(long, value_enum, default_value_t = TargetKind::Tensor)]
    target: TargetKind,
    #[arg(long, value_parser = rational, allow_hyphen_values = true, default_value = "1")]
    #[serde(with = "sle_coset::scalar::serde_rational")]
    k: Rational,
    /// Highest weight spin for the affine target.
    #[arg(long, value_parser = spin, default_value = "1/2")]
    j: Spin,
    /// Defaults to 4(k+2)/(k+3).
    #[arg(long, value_parser = rational, allow_hyphen_values = true)]
    #[serde(with = "sle_coset::scalar::serde_rational_opt")]
    kappa: Option<Rational>,
    /// Defaults to 2/(k+3).
    #[arg(long, value_parser = rational, allow_hyphen_values = true)]
    #[serde(with = "sle_coset::scalar::serde_rational_opt")]
    tau: Option<Rational>,
    #[arg(long, default_value_t = 10_000)]
    samples: usize,
    #[arg(long = "T", default_value_t = 0.5)]
    t_end: f64,
    #[arg(long, default_value_t = 1e-3)]
    dt: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Grade cap of the truncated module.
    #[arg(long, default_value_t = 3)]
    grade: usize,
    #[arg(long, default_value_t = 5)]
    checkpoints: usize,
    /// Pass threshold in standard errors.
    #[arg(long, default_value_t = 4.0)]
    z: f64,
}

#[derive(Args, Debug, Serialize)]
struct DimsArgs {
    #[arg(long, value_parser = rational, allow_hyphen_values = true)]
    #[serde(with = "sle_coset::scalar::serde_rational")]
    k: Rational,
    #[arg(long, value_parser = spin, default_value = "0")]
    j: Spin,
    #[arg(long, default_value_t = 3)]
    cutoff: usize,
}

#[derive(Args, Debug, Serialize)]
struct SleArgs {
    #[arg(long)]
    kappa: f64,
    #[arg(long, default_value_t = 1e-3)]
    dt: f64,
    #[arg(long = "T", default_value_t = 1.0)]
    t_end: f64,
    /// Number of coefficients a_{-1}, ..., a_{-N} kept.
    #[arg(long, default_value_t = 8)]
    cutoff: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Ensemble size; without it a single trajectory is written.
    #[arg(long)]
    samples: Option<usize>,
    /// Trajectory row stride in steps.
    #[arg(long, default_value_t = 1)]
    every: usize,
}

#[derive(Args, Debug, Serialize)]
struct InternalArgs {
    #[arg(long, default_value_t = 3.0)]
    kappa: f64,
    #[arg(long, default_value_t = 0.5)]
    tau: f64,
    #[arg(long = "T", default_value_t = 0.2)]
    t_end: f64,
    /// Coarsest step; it is halved `levels - 1` times.
    #[arg(long, default_value_t = 4e-4)]
    dt: f64,
    #[arg(long, default_value_t = 3)]
    levels: usize,
    #[arg(long, default_value_t = 6)]
    cutoff: usize,
    #[arg(long, default_value_t = 32)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

/// How a command finished.
enum Outcome {
    Verified,
    Violated,
    Informational,
}

enum Failure {
    Usage(String),
    Internal(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::TruncationOverflow(_) | Error::NonFinite(_) => Failure::Internal(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Internal(e.to_string())
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Internal(e.to_string())
    }
}

fn outcome(status: Status) -> Outcome {
    if status.is_verified() {
        Outcome::Verified
    } else {
        Outcome::Violated
    }
}

struct Output<'a> {
    format: Format,
    path: Option<&'a Path>,
}

impl Output<'_> {
    fn sink(&self) -> Result<Box<dyn Write>, Failure> {
        Ok(match self.path {
            Some(p) => Box::new(
                File::create(p).map_err(|e| Failure::Internal(format!("cannot write {}: {e}", p.display())))?,
            ),
            None => Box::new(io::stdout().lock()),
        })
    }

    fn json(&self, command: &str, config: Value, result: &impl Serialize) -> Result<(), Failure> {
        let doc = json!({
            "schema_version": SCHEMA_VERSION,
            "command": command,
            "config": config,
            "result": result,
        });
        let mut w = self.sink()?;
        serde_json::to_writer_pretty(&mut w, &doc).map_err(|e| Failure::Internal(e.to_string()))?;
        writeln!(w)?;
        Ok(())
    }

    /// CSV with the configuration echoed as a leading `#` line.
    fn csv<R: Serialize>(&self, command: &str, config: &Value, header: &[&str], rows: &[R]) -> Result<(), Failure> {
        let mut w = self.sink()?;
        writeln!(
            w,
            "# {}",
            json!({"schema_version": SCHEMA_VERSION, "command": command, "config": config})
        )?;
        let mut writer = csv::WriterBuilder::new().has_headers(false).from_writer(w);
        writer.write_record(header)?;
        for r in rows {
            writer.serialize(r)?;
        }
        writer.flush()?;
        Ok(())
    }

    fn require_json(&self, command: &str) -> Result<(), Failure> {
        match self.format {
            Format::Json => Ok(()),
            Format::Csv => Err(Failure::Usage(format!("{command} only produces JSON"))),
        }
    }
}

fn config_of(args: &impl Serialize, format: Format) -> Value {
    let mut v = serde_json::to_value(args).unwrap_or(Value::Null);
    if let Value::Object(m) = &mut v {
        m.insert("format".into(), json!(format));
    }
    v
}

fn level_defaults(args: &LevelArgs) -> Result<(Rational, Rational), Failure> {
    let (kappa0, tau0) = critical_parameters(&args.k)?;
    Ok((args.kappa.clone().unwrap_or(kappa0), args.tau.clone().unwrap_or(tau0)))
}

fn resolved(mut config: Value, kappa: &Rational, tau: &Rational) -> Value {
    if let Value::Object(m) = &mut config {
        m.insert("kappa".into(), json!(format_rational(kappa)));
        m.insert("tau".into(), json!(format_rational(tau)));
    }
    config
}

fn table(args: &TableArgs, out: &Output) -> Result<Outcome, Failure> {
    if args.p < 2 || args.q < 2 {
        return Err(Failure::Usage("minimal-table needs --p >= 2 and --q >= 2".into()));
    }
    let rows = minimal_table(args.p, args.q);
    let config = config_of(args, out.format);
    match out.format {
        Format::Json => out.json("minimal-table", config, &rows)?,
        Format::Csv => {
            let flat: Vec<_> = rows
                .iter()
                .map(|r| (r.p, r.q, r.r, r.s, r.c.clone(), r.h.clone(), r.duplicate_of.clone().unwrap_or_default()))
                .collect();
            out.csv("minimal-table", &config, &["p", "q", "r", "s", "c", "h", "duplicate_of"], &flat)?
        }
    }
    Ok(Outcome::Informational)
}

fn spin_json(s: Spin) -> Value {
    json!(s.to_string())
}

fn verify(which: &Verify, out: &Output) -> Result<Outcome, Failure> {
    out.require_json("verify")?;
    match which {
        Verify::Singular { p, q, perturb } => {
            let r = singular_vector_check(*p, *q, perturb.as_ref())?;
            let config = json!({"p": p, "q": q, "perturb": perturb.as_ref().map(format_rational)});
            out.json("verify singular", config, &r)?;
            Ok(outcome(r.status))
        }
        Verify::Sugawara { k, j, grade } => {
            let r = sugawara_check(k, *j, *grade, *grade as i32)?;
            let config = json!({"k": format_rational(k), "j": spin_json(*j), "grade": grade});
            out.json("verify sugawara", config, &r)?;
            Ok(outcome(r.status))
        }
        Verify::Coset { k, j, eps, grade } => {
            let (p, q) = admissible_pq(k)?;
            let c = coset_central_charge(k)?;
            let expected = sle_coset::virasoro::minimal_central_charge(p, p + q);
            let omega = omega_com_check(k)?;
            let commutant = commutant_check(k, *j, *eps, *grade, *grade as i32)?;
            let bracket = coset_bracket_check(k, *j, *eps, *grade, *grade as i32)?;
            let parts = [&omega, &commutant, &bracket];
            let mut checks = vec![SubCheck::new(
                "c^Com = c_{p,p+q}",
                c == expected,
                Some(sle_coset::Witness::new("c^Com", &c)),
            )];
            checks.extend(parts.iter().map(|r| SubCheck::new(r.check.clone(), r.status.is_verified(), r.witness.clone())));
            let r = VerificationReport::from_checks(
                "coset",
                params([
                    ("k", format_rational(k)),
                    ("j", j.to_string()),
                    ("eps", eps.to_string()),
                    ("grade", grade.to_string()),
                    ("central_charge", format_rational(&c)),
                ]),
                checks,
            );
            let config = json!({"k": format_rational(k), "j": spin_json(*j), "eps": spin_json(*eps), "grade": grade});
            out.json("verify coset", config, &json!({"summary": r, "details": parts}))?;
            Ok(outcome(r.status))
        }
        Verify::Branching { k, j, eps, grade } => {
            let r = branching_check(k, *j, *eps, *grade)?;
            let config = json!({"k": format_rational(k), "j": spin_json(*j), "eps": spin_json(*eps), "grade": grade});
            out.json("verify branching", config, &r)?;
            Ok(outcome(r.status))
        }
        Verify::VacuumDrift(args) => {
            let (kappa, tau) = level_defaults(args)?;
            let r = vacuum_drift_check(&args.k, &kappa, &tau)?;
            out.json("verify vacuum-drift", resolved(config_of(args, out.format), &kappa, &tau), &r)?;
            Ok(outcome(r.status))
        }
        Verify::Thm2 { level, grade } => {
            let (kappa, tau) = level_defaults(level)?;
            let r = theorem2_drift_check(&level.k, &kappa, &tau, *grade)?;
            let mut config = resolved(config_of(level, out.format), &kappa, &tau);
            config["grade"] = json!(grade);
            out.json("verify thm2", config, &r)?;
            Ok(outcome(r.status))
        }
        Verify::Corollary(args) => {
            let (kappa, tau) = level_defaults(args)?;
            let r = corollary_projection_check(&args.k, &kappa, &tau)?;
            out.json("verify corollary", resolved(config_of(args, out.format), &kappa, &tau), &r)?;
            Ok(outcome(r.status))
        }
    }
}

fn simulate(args: &SimulateArgs, out: &Output) -> Result<Outcome, Failure> {
    let (kappa, tau) = match args.target {
        TargetKind::Virasoro => (
            args.kappa.clone().ok_or_else(|| Failure::Usage("--kappa is required for the virasoro target".into()))?,
            args.tau.clone().unwrap_or_default(),
        ),
        _ => {
            let (k0, t0) = critical_parameters(&args.k)?;
            (args.kappa.clone().unwrap_or(k0), args.tau.clone().unwrap_or(t0))
        }
    };
    let target = match args.target {
        TargetKind::Tensor => McTarget::Tensor { k: args.k.clone() },
        TargetKind::Virasoro => McTarget::Virasoro,
        TargetKind::Affine => McTarget::Affine { k: args.k.clone(), j: args.j },
    };
    let mut cfg = McConfig::new(target, kappa.clone(), tau.clone());
    cfg.samples = args.samples;
    cfg.t_end = args.t_end;
    cfg.dt = args.dt;
    cfg.seed = args.seed;
    cfg.grade_cap = args.grade;
    cfg.checkpoints = args.checkpoints;
    cfg.z_pass = args.z;
    let stats = mc_simulate(&cfg)?;
    let config = resolved(config_of(args, out.format), &kappa, &tau);
    let summary = json!({
        "status": stats.status,
        "max_abs_z": stats.max_abs_z,
        "worst_component": stats.worst_component,
        "drift_detected": stats.drift_detected,
        "components": stats.components.len(),
        "words": stats.words,
        "steps": stats.steps,
        "target": stats.target_description,
    });
    match out.format {
        Format::Json => out.json("simulate", config, &stats)?,
        Format::Csv => {
            out.csv(
                "simulate",
                &config,
                &["t", "component_id", "mean", "stderr", "initial_value", "z_score"],
                &stats.csv_rows(),
            )?;
            eprintln!("{summary}");
        }
    }
    Ok(outcome(stats.status))
}

fn dims(args: &DimsArgs, out: &Output) -> Result<Outcome, Failure> {
    let module = AffineModule::irreducible(args.k.clone(), args.j, args.cutoff);
    let rows = module.dim_rows();
    let config = config_of(args, out.format);
    match out.format {
        Format::Json => out.json("dims", config, &json!({"rows": rows, "graded_dims": module.graded_dims()}))?,
        Format::Csv => out.csv("dims", &config, &["grade", "weight", "dim_universal", "dim_irreducible"], &rows)?,
    }
    Ok(Outcome::Informational)
}

fn sle(args: &SleArgs, out: &Output) -> Result<Outcome, Failure> {
    let config = config_of(args, out.format);
    match args.samples {
        Some(n) => {
            out.require_json("sle --samples")?;
            let e = sle_ensemble(args.kappa, args.dt, args.t_end, args.cutoff, n, args.seed)?;
            out.json("sle", config, &e)?;
        }
        None => {
            let rows = sle_trajectory(args.kappa, args.dt, args.t_end, args.cutoff, args.seed, args.every)?;
            let mut header = vec!["t".to_string(), "B_t".to_string(), "a0".to_string()];
            header.extend((1..=args.cutoff).map(|i| format!("a_-{i}")));
            match out.format {
                Format::Json => out.json("sle", config, &json!({"columns": header, "rows": rows}))?,
                Format::Csv => {
                    let h: Vec<&str> = header.iter().map(String::as_str).collect();
                    out.csv("sle", &config, &h, &rows)?
                }
            }
        }
    }
    Ok(Outcome::Informational)
}

fn internal(args: &InternalArgs, out: &Output) -> Result<Outcome, Failure> {
    out.require_json("internal")?;
    if args.levels < 2 {
        return Err(Failure::Usage("--levels must be at least 2".into()));
    }
    let dts: Vec<f64> = (0..args.levels).map(|i| args.dt / f64::powi(2.0, i as i32)).collect();
    let r = internal_consistency(
        args.kappa,
        args.tau,
        args.t_end,
        &dts,
        args.cutoff,
        args.samples,
        args.seed,
        InternalScheme::Milstein,
    )?;
    out.json("internal", config_of(args, out.format), &r)?;
    Ok(outcome(r.status))
}

fn run(cli: &Cli) -> Result<Outcome, Failure> {
    let out = Output {
        format: cli.format,
        path: cli.out.as_deref(),
    };
    match &cli.command {
        Command::MinimalTable(a) => table(a, &out),
        Command::Verify { which } => verify(which, &out),
        Command::Simulate(a) => simulate(a, &out),
        Command::Dims(a) => dims(a, &out),
        Command::Sle(a) => sle(a, &out),
        Command::Internal(a) => internal(a, &out),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(Outcome::Verified | Outcome::Informational) => ExitCode::SUCCESS,
        Ok(Outcome::Violated) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Internal(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}
