//! Command-line driver: instance generation, suite verification, system
//! transforms, regulator evaluation, and the cyclotomic instantiation.
//!
//! Exit codes: 0 all checks passed, 1 a verification failed, 2 usage or
//! input error. All randomness flows from the single `--seed` value, so
//! identical invocations produce identical reports and files (the report's
//! wall-time field aside).

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use kolysys::cyclo::{self, CycloConfig, Rational};
use kolysys::instance::{random_instance, InstanceParams, SevenTuple};
use kolysys::json as kjson;
use kolysys::ksystems::{SystemCollection, SystemKind};
use kolysys::report::Report;
use kolysys::unitsys::{build_unit_systems, Chain, RegulatorFlavor};
use kolysys::verify;

#[derive(Parser)]
#[command(
    name = "kolysys",
    about = "Exact verification engine for the algebra of Kolyvagin systems",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random seven-tuple instance and write it as JSON.
    Gen(GenArgs),
    /// Run a verification suite and emit a JSON report.
    Verify(VerifyArgs),
    /// Apply a transform between system flavors to a system file.
    Transform(TransformArgs),
    /// Build unit systems for an instance and write a regulator collection.
    Regulator(RegulatorArgs),
    /// Build the cyclotomic instance for a configuration.
    Cyclo(CycloArgs),
}

#[derive(Args)]
struct GenArgs {
    /// Modulus m of the coefficient ring Z/m.
    #[arg(long)]
    m: u64,
    /// Number of sites.
    #[arg(long)]
    sites: usize,
    /// Comma-separated per-site orders t_q; length must match --sites.
    #[arg(long, value_delimiter = ',')]
    t: Vec<u64>,
    /// Rank of the free module H.
    #[arg(long)]
    rank: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Suite {
    Axioms,
    Diagram,
    Identities,
    Regulator,
    Cyclo,
    All,
}

#[derive(Args)]
struct VerifyArgs {
    /// Which property suite to run.
    #[arg(long, value_enum)]
    suite: Suite,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of random trials (instances or cases, depending on suite).
    #[arg(long, default_value_t = 100)]
    trials: usize,
    /// Restrict the instance grid to one modulus.
    #[arg(long)]
    m: Option<u64>,
    /// Restrict the instance grid to one site count.
    #[arg(long)]
    sites: Option<usize>,
    /// Fix the per-site orders (implies the site count).
    #[arg(long, value_delimiter = ',')]
    t: Option<Vec<u64>>,
    /// Restrict the grid to one H rank.
    #[arg(long)]
    rank: Option<usize>,
    /// Restrict the grid to one system rank r.
    #[arg(long)]
    r: Option<usize>,
    /// Check the axioms of this system file instead of random instances
    /// (axioms suite only); requires --instance.
    #[arg(long, value_name = "FILE")]
    r#in: Option<PathBuf>,
    /// Instance file accompanying --in.
    #[arg(long, value_name = "FILE")]
    instance: Option<PathBuf>,
    /// Report path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Report format (json only).
    #[arg(long, default_value = "json")]
    format: String,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum MapName {
    Pt,
    Pk,
    Tk,
    Td,
    Dk,
    Gpk,
    Gtd,
    Gtk,
}

#[derive(Args)]
struct TransformArgs {
    /// Input system file.
    #[arg(long, value_name = "FILE")]
    r#in: PathBuf,
    /// Instance file the system lives over.
    #[arg(long, value_name = "FILE")]
    instance: PathBuf,
    /// Which transform to apply.
    #[arg(long, value_enum)]
    map: MapName,
    /// Output path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RegulatorArgs {
    /// Instance file.
    #[arg(long, value_name = "FILE")]
    instance: PathBuf,
    /// System rank r.
    #[arg(long, default_value_t = 1)]
    r: usize,
    /// Regulator flavor: P, T, or K.
    #[arg(long, default_value = "P")]
    flavor: String,
    /// Which generator of the unit-system module to evaluate.
    #[arg(long, default_value_t = 0)]
    gen_index: usize,
    /// Also write the chosen unit system to this path.
    #[arg(long, value_name = "FILE")]
    unit_out: Option<PathBuf>,
    /// Output path for the regulator collection; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CycloArgs {
    /// Configuration file; flags below are ignored when given.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    #[arg(long, default_value_t = 3)]
    p: u64,
    #[arg(long, default_value_t = 1)]
    k: u32,
    /// Sieve bound for the sigma primes (used when --sigma is omitted).
    #[arg(long)]
    bound: Option<u64>,
    /// Explicit sigma primes.
    #[arg(long, value_delimiter = ',')]
    sigma: Option<Vec<u64>>,
    /// Generator rationals, comma separated (e.g. "2,5" or "2,1/5").
    #[arg(long, value_delimiter = ',', default_values_t = vec!["2".to_string(), "5".to_string()])]
    generators: Vec<String>,
    /// Primitive roots as prime=root pairs (e.g. "7=3,13=2"); found by
    /// search when omitted.
    #[arg(long, value_delimiter = ',')]
    roots: Option<Vec<String>>,
    /// Where to write the instance JSON; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the resolved configuration here.
    #[arg(long, value_name = "FILE")]
    emit_config: Option<PathBuf>,
}

/// Input or usage problem: exit code 2.
struct UsageError(String);

impl<E: std::fmt::Display> From<E> for UsageError {
    fn from(e: E) -> Self {
        UsageError(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Gen(args) => cmd_gen(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Transform(args) => cmd_transform(args),
        Command::Regulator(args) => cmd_regulator(args),
        Command::Cyclo(args) => cmd_cyclo(args),
    };
    match outcome {
        Ok(code) => code,
        Err(UsageError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn emit(out: &Option<PathBuf>, value: &Value) -> Result<(), UsageError> {
    let text = kjson::to_canonical_string(value);
    match out {
        Some(path) => fs::write(path, text).map_err(|e| UsageError(e.to_string())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn read_json(path: &Path) -> Result<Value, UsageError> {
    let text =
        fs::read_to_string(path).map_err(|e| UsageError(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| UsageError(format!("{}: {e}", path.display())))
}

fn read_instance(path: &Path) -> Result<Arc<SevenTuple>, UsageError> {
    Ok(Arc::new(kjson::instance_from_json(&read_json(path)?)?))
}

fn cmd_gen(args: GenArgs) -> Result<ExitCode, UsageError> {
    if args.t.len() != args.sites {
        return Err(UsageError(format!(
            "expected {} t-values, got {}",
            args.sites,
            args.t.len()
        )));
    }
    let params = InstanceParams::new(args.m, args.t.clone(), args.rank);
    let instance = random_instance(args.seed, &params)?;
    emit(&args.out, &kjson::instance_to_json(&instance)?)?;
    Ok(ExitCode::SUCCESS)
}

fn report_to_json(
    command: &str,
    seed: u64,
    parameters: Value,
    report: &Report,
    started: Instant,
) -> Value {
    let checks: Vec<Value> = report
        .checks
        .iter()
        .map(|c| {
            let mut obj = serde_json::Map::new();
            obj.insert("name".into(), json!(c.name));
            if let Some(n) = &c.subset {
                obj.insert("n".into(), json!(n));
            }
            if let Some(q) = &c.site {
                obj.insert("q".into(), json!(q));
            }
            obj.insert("pass".into(), json!(c.pass));
            if let Some(d) = &c.detail {
                obj.insert("counterexample".into(), json!(d));
            }
            Value::Object(obj)
        })
        .collect();
    json!({
        "command": command,
        "seed": seed,
        "parameters": parameters,
        "checks": checks,
        "pass": report.passed(),
        "wall_time_ms": started.elapsed().as_millis() as u64,
    })
}

fn grid_from(args: &VerifyArgs) -> verify::Grid {
    let mut grid = verify::Grid::default();
    if let Some(m) = args.m {
        grid.moduli = vec![m];
    }
    if let Some(s) = args.sites {
        grid.site_counts = vec![s];
    }
    if let Some(ts) = &args.t {
        grid.site_counts = vec![ts.len()];
        let lo = ts.iter().copied().min().unwrap_or(1);
        let hi = ts.iter().copied().max().unwrap_or(12);
        grid.t_range = (lo, hi);
    }
    if let Some(h) = args.rank {
        grid.h_ranks = vec![h];
    }
    if let Some(r) = args.r {
        grid.ranks = vec![r];
    }
    grid
}

fn cmd_verify(args: VerifyArgs) -> Result<ExitCode, UsageError> {
    if args.format != "json" {
        return Err(UsageError(format!("unsupported format {}", args.format)));
    }
    let started = Instant::now();
    let grid = grid_from(&args);

    let report = match (&args.r#in, args.suite) {
        (Some(path), Suite::Axioms) => {
            let instance_path = args
                .instance
                .as_ref()
                .ok_or_else(|| UsageError("--in requires --instance".into()))?;
            let instance = read_instance(instance_path)?;
            let system = kjson::system_from_json(&read_json(path)?, &instance)?;
            if system.kind() == SystemKind::Raw {
                return Err(UsageError("RAW collections have no axioms to check".into()));
            }
            system.check_axioms()
        }
        (Some(_), _) => {
            return Err(UsageError(
                "--in is only meaningful with --suite axioms".into(),
            ))
        }
        (None, Suite::Axioms) => verify::axioms_suite(args.seed, args.trials, &grid),
        (None, Suite::Diagram) => verify::diagram_suite(args.seed, args.trials, &grid),
        (None, Suite::Identities) => {
            let mut r = verify::exterior_determinant_suite(args.seed, args.trials);
            r.merge(verify::graded_lemma_suite(args.seed, args.trials));
            r.merge(verify::partition_identity_suite(args.seed, args.trials));
            r.merge(verify::linalg_oracle_suite(args.seed, args.trials));
            r
        }
        (None, Suite::Regulator) => verify::regulator_suite(args.seed, args.trials, &grid),
        (None, Suite::Cyclo) => verify::cyclo_suite(args.seed),
        (None, Suite::All) => verify::all_suites(args.seed, args.trials, &grid),
    };

    let parameters = json!({
        "suite": match args.suite {
            Suite::Axioms => "axioms",
            Suite::Diagram => "diagram",
            Suite::Identities => "identities",
            Suite::Regulator => "regulator",
            Suite::Cyclo => "cyclo",
            Suite::All => "all",
        },
        "trials": args.trials,
        "moduli": grid.moduli,
        "site_counts": grid.site_counts,
        "h_ranks": grid.h_ranks,
        "ranks": grid.ranks,
        "in": args.r#in.as_ref().map(|p| p.display().to_string()),
    });
    let passed = report.passed();
    let out = report_to_json("verify", args.seed, parameters, &report, started);
    emit(&args.out, &out)?;
    Ok(if passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn cmd_transform(args: TransformArgs) -> Result<ExitCode, UsageError> {
    let instance = read_instance(&args.instance)?;
    let system = kjson::system_from_json(&read_json(&args.r#in)?, &instance)?;
    let kind = system.kind();
    let compatible = |wanted: SystemKind| kind == wanted || kind == SystemKind::Raw;
    let transformed: SystemCollection = match args.map {
        MapName::Pt if compatible(SystemKind::Pks) => system.f_pt(),
        MapName::Pk if compatible(SystemKind::Pks) => system.f_pk(),
        MapName::Tk if compatible(SystemKind::Tks) => system.f_tk(),
        MapName::Td if compatible(SystemKind::Tks) => system.f_td(),
        MapName::Dk if compatible(SystemKind::Dks) => system.f_dk(),
        MapName::Gpk if compatible(SystemKind::Ks) => system.g_pk(),
        MapName::Gtd if compatible(SystemKind::Dks) => system.g_td(),
        MapName::Gtk if compatible(SystemKind::Ks) => system.g_tk(),
        _ => {
            return Err(UsageError(format!(
                "input kind {kind} is incompatible with this map"
            )))
        }
    };
    emit(&args.out, &kjson::system_to_json(&transformed)?)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_regulator(args: RegulatorArgs) -> Result<ExitCode, UsageError> {
    let instance = read_instance(&args.instance)?;
    let flavor = RegulatorFlavor::parse(&args.flavor)
        .ok_or_else(|| UsageError(format!("unknown flavor {}", args.flavor)))?;
    let chain = Chain::full_prefix(instance.sites().len());
    let systems = build_unit_systems(&instance, &chain, args.r);
    let system = systems.get(args.gen_index).ok_or_else(|| {
        UsageError(format!(
            "generator index {} out of range; the module has {} generators",
            args.gen_index,
            systems.len()
        ))
    })?;
    if let Some(path) = &args.unit_out {
        emit(&Some(path.clone()), &kjson::unit_system_to_json(system)?)?;
    }
    let collection = system.regulator_collection(flavor);
    emit(&args.out, &kjson::system_to_json(&collection)?)?;
    Ok(ExitCode::SUCCESS)
}

fn parse_roots(pairs: &[String]) -> Result<BTreeMap<u64, u64>, UsageError> {
    let mut out = BTreeMap::new();
    for pair in pairs {
        let (ell, g) = pair
            .split_once('=')
            .ok_or_else(|| UsageError(format!("expected prime=root, got {pair}")))?;
        out.insert(ell.trim().parse::<u64>()?, g.trim().parse::<u64>()?);
    }
    Ok(out)
}

fn find_primitive_root(ell: u64) -> Option<u64> {
    (2..ell).find(|&g| cyclo::is_primitive_root(g, ell))
}

fn cmd_cyclo(args: CycloArgs) -> Result<ExitCode, UsageError> {
    let cfg: CycloConfig = match &args.config {
        Some(path) => kjson::cyclo_config_from_json(&read_json(path)?)?,
        None => {
            let sigma = match (&args.sigma, args.bound) {
                (Some(s), _) => s.clone(),
                (None, Some(bound)) => cyclo::sigma_primes(args.p, args.k, bound),
                (None, None) => {
                    return Err(UsageError("either --sigma or --bound is required".into()))
                }
            };
            let roots = match &args.roots {
                Some(pairs) => parse_roots(pairs)?,
                None => sigma
                    .iter()
                    .map(|&ell| {
                        find_primitive_root(ell)
                            .map(|g| (ell, g))
                            .ok_or_else(|| UsageError(format!("no primitive root mod {ell}")))
                    })
                    .collect::<Result<_, _>>()?,
            };
            let generators = args
                .generators
                .iter()
                .map(|s| Rational::parse(s))
                .collect::<Result<Vec<_>, _>>()?;
            CycloConfig {
                p: args.p,
                k: args.k,
                sigma,
                roots,
                generators,
            }
        }
    };
    let instance = cfg.build_instance()?;
    if let Some(path) = &args.emit_config {
        emit(&Some(path.clone()), &kjson::cyclo_config_to_json(&cfg))?;
    }
    emit(&args.out, &kjson::instance_to_json(&instance)?)?;
    Ok(ExitCode::SUCCESS)
}
