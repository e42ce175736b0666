//! Command-line front end: instance generation, SPSA sweeps,
//! aggregation, scheme comparison, landscape scans, and the
//! trainability diagnostics. All heavy lifting lives in the library;
//! this binary only parses arguments and moves bytes.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use qacoa::diagnostics::{
    control_noise_moment, cost_landscape_lle_samples, eta_sweep, NOISE_DELTA,
};
use qacoa::runner::{
    aggregate, aggregate_to_csv, alpha_preset, alpha_rows_to_csv, alpha_sweep, compare,
    compare_to_csv, preset, read_records, run, write_records, AlphaSweepConfig, RunConfig,
    SchemeSelector, ALPHA_PRESETS, PRESETS,
};
use qacoa::sat::{random_instance, read_dimacs, write_dimacs, CostDiagonal, KPolicy, SatInstance};
use qacoa::schemes::SchemeSpec;
use qacoa::simulator::landscape_scan;
use qacoa::{Error, Result};

#[derive(Parser)]
#[command(name = "qacoa", version, about = "QAOA with chaotic parameter schedules for MAX K-SAT")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate random MAX K-SAT instances as DIMACS CNF files.
    Generate(GenerateArgs),
    /// Execute a full sweep from a config file or preset.
    Run(RunArgs),
    /// Recompute the aggregate table from persisted run records.
    Aggregate(AggregateArgs),
    /// Mean-AR differences between two scheme slices of a record set.
    Compare(CompareArgs),
    /// Expectation values on a 2D grid over a two-parameter scheme.
    ScanLandscape(ScanArgs),
    /// Cost-landscape Lyapunov spectrum at random points.
    DiagnoseLle(LleArgs),
    /// Linearizability-window medians against circuit depth.
    DiagnoseEta(EtaArgs),
    /// Control-noise second moments against circuit depth.
    DiagnoseNoise(NoiseArgs),
    /// Performance across the clause-density grid.
    AlphaSweep(AlphaArgs),
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long, default_value_t = 5)]
    n_vars: usize,
    #[arg(long, default_value_t = 3)]
    k: usize,
    /// Clause density; the clause count is round(alpha * n_vars).
    #[arg(long, default_value_t = 4.2)]
    alpha: f64,
    #[arg(long, default_value_t = 5)]
    count: usize,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[arg(long, default_value = "instances")]
    out_dir: PathBuf,
}

#[derive(Args)]
struct RunArgs {
    /// TOML run configuration; exclusive with --preset.
    #[arg(long, conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Named reproduction preset.
    #[arg(long)]
    preset: Option<String>,
    #[arg(long, default_value = "run-out")]
    out_dir: PathBuf,
    /// Worker threads; the QACOA_THREADS env var still wins.
    #[arg(long)]
    threads: Option<usize>,
    /// Shrink the SPSA probe scale by the ergodic contraction factor.
    #[arg(long)]
    ergodic_gain_rescale: bool,
}

#[derive(Args)]
struct AggregateArgs {
    #[arg(long)]
    records: PathBuf,
    /// Output CSV; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CompareArgs {
    #[arg(long)]
    records: PathBuf,
    /// Baseline selector, e.g. "standard" or "pure-chaotic:c=1".
    #[arg(long)]
    baseline: String,
    /// Other selector; differences are other minus baseline.
    #[arg(long)]
    other: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// One instance, either loaded from DIMACS or drawn by seed.
#[derive(Args)]
struct InstanceArgs {
    /// DIMACS CNF path; when omitted an instance is generated.
    #[arg(long)]
    dimacs: Option<PathBuf>,
    /// Accept mixed clause widths in DIMACS input (K = max width).
    #[arg(long)]
    allow_mixed_k: bool,
    #[arg(long, default_value_t = 5)]
    n_vars: usize,
    #[arg(long, default_value_t = 3)]
    k: usize,
    #[arg(long, default_value_t = 4.2)]
    alpha: f64,
    #[arg(long, default_value_t = 7)]
    instance_seed: u64,
}

impl InstanceArgs {
    fn load(&self) -> Result<SatInstance> {
        match &self.dimacs {
            Some(path) => {
                let policy = if self.allow_mixed_k {
                    KPolicy::AllowMixed
                } else {
                    KPolicy::Strict
                };
                read_dimacs(path, policy)
            }
            None => {
                let mut rng = ChaCha8Rng::seed_from_u64(self.instance_seed);
                random_instance(self.n_vars, self.k, self.alpha, &mut rng)
            }
        }
    }
}

#[derive(Args)]
struct ScanArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    /// Scheme kind: standard, pure-chaotic, delayed-hybrid, iterated-hybrid.
    #[arg(long, default_value = "pure-chaotic")]
    scheme: String,
    #[arg(long, default_value_t = 4)]
    p: usize,
    #[arg(long, default_value_t = 100)]
    c: u64,
    /// Transition depth for delayed-hybrid.
    #[arg(long)]
    transition: Option<usize>,
    /// Block length for iterated-hybrid.
    #[arg(long)]
    block: Option<usize>,
    /// Grid points per axis.
    #[arg(long, default_value_t = 64)]
    grid: usize,
    /// Output CSV path (a .meta.json sidecar is written next to it);
    /// stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl ScanArgs {
    fn spec(&self) -> Result<SchemeSpec> {
        let spec = match self.scheme.as_str() {
            "standard" => SchemeSpec::Standard { p: self.p },
            "pure-chaotic" => SchemeSpec::PureChaotic { p: self.p, c: self.c },
            "delayed-hybrid" => SchemeSpec::DelayedHybrid {
                p: self.p,
                p_t: self.transition.ok_or_else(|| {
                    Error::InvalidArgument("delayed-hybrid needs --transition".into())
                })?,
                c: self.c,
            },
            "iterated-hybrid" => SchemeSpec::IteratedHybrid {
                p: self.p,
                t: self.block.ok_or_else(|| {
                    Error::InvalidArgument("iterated-hybrid needs --block".into())
                })?,
                c: self.c,
            },
            other => {
                return Err(Error::InvalidArgument(format!("unknown scheme {other:?}")));
            }
        };
        spec.validate()?;
        Ok(spec)
    }
}

#[derive(Args)]
struct LleArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    #[arg(long, default_value_t = 100)]
    c: u64,
    #[arg(long, default_value_t = 8)]
    p_max: usize,
    /// Random theta pairs to sample.
    #[arg(long, default_value_t = 20)]
    samples: usize,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Output CSV path (a .meta.json sidecar is written next to it);
    /// stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EtaArgs {
    #[arg(long, default_value_t = 10)]
    c: u64,
    /// Circuit depths, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "2,3,4,5,6,7,8")]
    depths: Vec<usize>,
    #[arg(long, default_value_t = 10_000)]
    samples: usize,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Output CSV path (a .meta.json sidecar is written next to it);
    /// stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct NoiseArgs {
    #[arg(long, default_value_t = 1)]
    c: u64,
    #[arg(long, value_delimiter = ',', default_value = "1,2,3,4,5,6,7,8,9,10,11,12")]
    depths: Vec<usize>,
    /// Perturbation size applied to each theta component.
    #[arg(long, default_value_t = NOISE_DELTA)]
    delta: f64,
    #[arg(long, default_value_t = 2000)]
    samples: usize,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Output CSV path (a .meta.json sidecar is written next to it);
    /// stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct AlphaArgs {
    #[arg(long, conflicts_with = "preset")]
    config: Option<PathBuf>,
    #[arg(long)]
    preset: Option<String>,
    #[arg(long, default_value = "alpha-out")]
    out_dir: PathBuf,
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
        }
    }
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => write_text(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cmd_generate(args: &GenerateArgs) -> Result<()> {
    fs::create_dir_all(&args.out_dir).map_err(|e| Error::io(&args.out_dir, e))?;
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let mut hashes = Vec::new();
    for i in 0..args.count {
        let inst = random_instance(args.n_vars, args.k, args.alpha, &mut rng)?;
        let hash = inst.content_hash();
        let path = args.out_dir.join(format!("gen-{i:02}-{}.cnf", &hash[..8]));
        write_dimacs(&inst, &path)?;
        println!("{}", path.display());
        hashes.push(hash);
    }
    let meta = json!({
        "command": "generate",
        "n_vars": args.n_vars,
        "k": args.k,
        "alpha": args.alpha,
        "count": args.count,
        "seed": args.seed,
        "content_hashes": hashes,
    });
    write_text(
        &args.out_dir.join("meta.json"),
        &serde_json::to_string_pretty(&meta)?,
    )
}

fn load_run_config(config: &Option<PathBuf>, name: &Option<String>) -> Result<RunConfig> {
    match (config, name) {
        (Some(path), None) => {
            let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
            RunConfig::from_toml(&text)
        }
        (None, Some(name)) => preset(name),
        _ => Err(Error::Config(format!(
            "provide exactly one of --config or --preset; presets: {PRESETS:?}"
        ))),
    }
}

/// Exit code 2 signals partial failure: the sweep finished but some
/// cells recorded errors.
fn cmd_run(args: &RunArgs) -> Result<bool> {
    let mut cfg = load_run_config(&args.config, &args.preset)?;
    if let Some(n) = args.threads {
        cfg.parallelism = Some(n);
    }
    if args.ergodic_gain_rescale {
        cfg.spsa.ergodic_gain_rescale = true;
    }
    let out = run(&cfg)?;
    fs::create_dir_all(&args.out_dir).map_err(|e| Error::io(&args.out_dir, e))?;
    write_text(&args.out_dir.join("config.toml"), &cfg.to_toml()?)?;
    write_records(&args.out_dir.join("records.jsonl"), &out.records)?;
    write_text(
        &args.out_dir.join("aggregate.csv"),
        &aggregate_to_csv(&out.aggregate)?,
    )?;
    let meta = json!({
        "command": "run",
        "config_hash": out.config_hash,
        "n_cells": out.records.len(),
        "n_failed": out.n_failed,
        "checkpoints": cfg.checkpoint_set(),
    });
    write_text(
        &args.out_dir.join("meta.json"),
        &serde_json::to_string_pretty(&meta)?,
    )?;
    println!(
        "{} cells, {} failed, results in {}",
        out.records.len(),
        out.n_failed,
        args.out_dir.display()
    );
    Ok(out.n_failed > 0)
}

fn cmd_aggregate(args: &AggregateArgs) -> Result<()> {
    let records = read_records(&args.records)?;
    let rows = aggregate(&records)?;
    emit(&args.out, &aggregate_to_csv(&rows)?)
}

fn cmd_compare(args: &CompareArgs) -> Result<()> {
    let records = read_records(&args.records)?;
    let baseline = SchemeSelector::parse(&args.baseline)?;
    let other = SchemeSelector::parse(&args.other)?;
    let rows = compare(&records, &baseline, &other)?;
    emit(&args.out, &compare_to_csv(&rows)?)
}

fn cmd_scan(args: &ScanArgs) -> Result<()> {
    let inst = args.instance.load()?;
    let diag = CostDiagonal::build(&inst)?;
    let spec = args.spec()?;
    let scan = landscape_scan(&spec, &diag, args.grid)?;
    let mut wtr = csv::Writer::from_writer(Vec::new());
    wtr.write_record(["theta1", "theta2", "f"])
        .map_err(|e| Error::Config(e.to_string()))?;
    for (i, row) in scan.values.iter().enumerate() {
        for (j, &f) in row.iter().enumerate() {
            wtr.write_record(&[
                format!("{}", scan.grid[i]),
                format!("{}", scan.grid[j]),
                format!("{f}"),
            ])
            .map_err(|e| Error::Config(e.to_string()))?;
        }
    }
    let bytes = wtr.into_inner().map_err(|e| Error::Config(e.to_string()))?;
    emit(&args.out, &String::from_utf8(bytes).map_err(|e| Error::Config(e.to_string()))?)?;
    if let Some(path) = &args.out {
        let meta = json!({
            "command": "scan-landscape",
            "instance_hash": inst.content_hash(),
            "scheme": spec.label(),
            "p": spec.depth(),
            "grid": args.grid,
            "c_min": diag.c_min,
            "c_max": diag.c_max,
        });
        write_text(
            &path.with_extension("meta.json"),
            &serde_json::to_string_pretty(&meta)?,
        )?;
    }
    Ok(())
}

fn cmd_lle(args: &LleArgs) -> Result<()> {
    let inst = args.instance.load()?;
    let diag = CostDiagonal::build(&inst)?;
    let reports = cost_landscape_lle_samples(&diag, args.c, args.p_max, args.samples, args.seed)?;
    let mut wtr = csv::Writer::from_writer(Vec::new());
    wtr.write_record([
        "sample",
        "theta1",
        "theta2",
        "p",
        "component",
        "cost_lle",
        "phase_lle",
        "gle",
    ])
    .map_err(|e| Error::Config(e.to_string()))?;
    for (s, report) in reports.iter().enumerate() {
        for (k, &p) in report.depths.iter().enumerate() {
            for comp in 0..2 {
                wtr.write_record(&[
                    format!("{s}"),
                    format!("{}", report.theta[0]),
                    format!("{}", report.theta[1]),
                    format!("{p}"),
                    format!("{comp}"),
                    format!("{}", report.cost_lle[k][comp]),
                    format!("{}", report.phase_lle[k][comp]),
                    format!("{}", report.gle),
                ])
                .map_err(|e| Error::Config(e.to_string()))?;
            }
        }
    }
    let bytes = wtr.into_inner().map_err(|e| Error::Config(e.to_string()))?;
    emit(&args.out, &String::from_utf8(bytes).map_err(|e| Error::Config(e.to_string()))?)?;
    if let Some(path) = &args.out {
        let meta = json!({
            "command": "diagnose-lle",
            "instance_hash": inst.content_hash(),
            "c": args.c,
            "p_max": args.p_max,
            "samples": args.samples,
            "seed": args.seed,
        });
        write_text(
            &path.with_extension("meta.json"),
            &serde_json::to_string_pretty(&meta)?,
        )?;
    }
    Ok(())
}

fn cmd_eta(args: &EtaArgs) -> Result<()> {
    let sweep = eta_sweep(args.c, &args.depths, args.samples, args.seed)?;
    let mut wtr = csv::Writer::from_writer(Vec::new());
    wtr.write_record(["p", "median", "q1", "q3", "ln_median", "n_infinite"])
        .map_err(|e| Error::Config(e.to_string()))?;
    for (k, &p) in sweep.depths.iter().enumerate() {
        wtr.write_record(&[
            format!("{p}"),
            format!("{}", sweep.median[k]),
            format!("{}", sweep.q1[k]),
            format!("{}", sweep.q3[k]),
            format!("{}", sweep.ln_median[k]),
            format!("{}", sweep.n_infinite[k]),
        ])
        .map_err(|e| Error::Config(e.to_string()))?;
    }
    let bytes = wtr.into_inner().map_err(|e| Error::Config(e.to_string()))?;
    emit(&args.out, &String::from_utf8(bytes).map_err(|e| Error::Config(e.to_string()))?)?;
    if let Some(path) = &args.out {
        let meta = json!({
            "command": "diagnose-eta",
            "c": args.c,
            "samples": args.samples,
            "seed": args.seed,
            "slope": sweep.slope,
            "expected_slope": sweep.expected_slope,
        });
        write_text(
            &path.with_extension("meta.json"),
            &serde_json::to_string_pretty(&meta)?,
        )?;
    }
    Ok(())
}

fn cmd_noise(args: &NoiseArgs) -> Result<()> {
    let nm = control_noise_moment(args.c, &args.depths, args.delta, args.samples, args.seed)?;
    let mut wtr = csv::Writer::from_writer(Vec::new());
    wtr.write_record(["p", "component", "mean", "std", "mean_normalized", "all_zero"])
        .map_err(|e| Error::Config(e.to_string()))?;
    for (k, &p) in nm.depths.iter().enumerate() {
        for comp in 0..2 {
            wtr.write_record(&[
                format!("{p}"),
                format!("{comp}"),
                format!("{:e}", nm.mean[k][comp]),
                format!("{:e}", nm.std[k][comp]),
                format!("{:e}", nm.mean_normalized[k][comp]),
                format!("{}", nm.all_zero[k]),
            ])
            .map_err(|e| Error::Config(e.to_string()))?;
        }
    }
    let bytes = wtr.into_inner().map_err(|e| Error::Config(e.to_string()))?;
    emit(&args.out, &String::from_utf8(bytes).map_err(|e| Error::Config(e.to_string()))?)?;
    if let Some(path) = &args.out {
        let meta = json!({
            "command": "diagnose-noise",
            "c": args.c,
            "delta": args.delta,
            "samples": args.samples,
            "seed": args.seed,
        });
        write_text(
            &path.with_extension("meta.json"),
            &serde_json::to_string_pretty(&meta)?,
        )?;
    }
    Ok(())
}

fn cmd_alpha(args: &AlphaArgs) -> Result<bool> {
    let cfg: AlphaSweepConfig = match (&args.config, &args.preset) {
        (Some(path), None) => {
            let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
            AlphaSweepConfig::from_toml(&text)?
        }
        (None, Some(name)) => alpha_preset(name)?,
        _ => {
            return Err(Error::Config(format!(
                "provide exactly one of --config or --preset; presets: {ALPHA_PRESETS:?}"
            )));
        }
    };
    let out = alpha_sweep(&cfg)?;
    fs::create_dir_all(&args.out_dir).map_err(|e| Error::io(&args.out_dir, e))?;
    write_records(&args.out_dir.join("records.jsonl"), &out.records)?;
    write_text(&args.out_dir.join("alpha.csv"), &alpha_rows_to_csv(&out.rows)?)?;
    let n_failed = out.records.iter().filter(|r| r.error.is_some()).count();
    let meta = json!({
        "command": "alpha-sweep",
        "n_vars": cfg.n_vars,
        "k": cfg.k,
        "alpha_multiples": cfg.alpha_multiples,
        "n_cells": out.records.len(),
        "n_failed": n_failed,
    });
    write_text(
        &args.out_dir.join("meta.json"),
        &serde_json::to_string_pretty(&meta)?,
    )?;
    println!(
        "{} cells, {} failed, results in {}",
        out.records.len(),
        n_failed,
        args.out_dir.display()
    );
    Ok(n_failed > 0)
}

fn dispatch(cli: &Cli) -> Result<bool> {
    match &cli.command {
        Command::Generate(args) => cmd_generate(args).map(|_| false),
        Command::Run(args) => cmd_run(args),
        Command::Aggregate(args) => cmd_aggregate(args).map(|_| false),
        Command::Compare(args) => cmd_compare(args).map(|_| false),
        Command::ScanLandscape(args) => cmd_scan(args).map(|_| false),
        Command::DiagnoseLle(args) => cmd_lle(args).map(|_| false),
        Command::DiagnoseEta(args) => cmd_eta(args).map(|_| false),
        Command::DiagnoseNoise(args) => cmd_noise(args).map(|_| false),
        Command::AlphaSweep(args) => cmd_alpha(args),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(false) => ExitCode::SUCCESS,
        Ok(true) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
