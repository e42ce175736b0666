//! Experiment runner: fans a configuration out into independent
//! (instance, scheme, p, c, restart) cells, optimizes each cell with
//! SPSA, and aggregates approximation-ratio statistics per checkpoint.
//!
//! Determinism contract: every cell derives its own RNG seed from a
//! hash of the configuration seed and the cell coordinates, cells are
//! pure, and results are collected in planning order, so outputs are
//! byte-identical across reruns regardless of thread count.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs;
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::diagnostics::{cost_landscape_lle, mean_std, quantile, LleReport};
use crate::sat::{random_instance, read_dimacs, CostDiagonal, KPolicy, SatInstance};
use crate::schemes::SchemeSpec;
use crate::spsa::{optimize, SpsaConfig, SpsaTrace};
use crate::{Error, Result};

/// Iteration checkpoints mirroring the depths at which training curves
/// are usually read off; intersected with [1, j_max] and always joined
/// by j_max itself.
pub const DEFAULT_CHECKPOINTS: [usize; 6] = [50, 150, 400, 1000, 2000, 5000];

/// Environment variable overriding the worker thread count.
pub const THREADS_ENV: &str = "QACOA_THREADS";

// ---------------------------------------------------------------------------
// configuration
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum InstanceSource {
    /// Draw fresh random instances; the optional seed defaults to the
    /// top-level configuration seed.
    Generate {
        n_vars: usize,
        k: usize,
        alpha: f64,
        count: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
    },
    /// Load fixed instances from DIMACS CNF files.
    Dimacs {
        paths: Vec<PathBuf>,
        #[serde(default)]
        allow_mixed_k: bool,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SchemeKind {
    Standard,
    PureChaotic,
    DelayedHybrid { transition: usize },
    IteratedHybrid { block: usize },
}

impl SchemeKind {
    pub fn spec(&self, p: usize, c: u64) -> SchemeSpec {
        match *self {
            SchemeKind::Standard => SchemeSpec::Standard { p },
            SchemeKind::PureChaotic => SchemeSpec::PureChaotic { p, c },
            SchemeKind::DelayedHybrid { transition } => SchemeSpec::DelayedHybrid {
                p,
                p_t: transition,
                c,
            },
            SchemeKind::IteratedHybrid { block } => SchemeSpec::IteratedHybrid { p, t: block, c },
        }
    }

    /// Standard schedules ignore the map entirely, so the c axis
    /// collapses to a single cell for them.
    fn uses_map_speed(&self) -> bool {
        !matches!(self, SchemeKind::Standard)
    }
}

/// SPSA knobs as they appear in config files; the per-cell seed is
/// injected by the runner.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpsaSettings {
    pub j_max: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    pub c0: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub big_a: Option<f64>,
    pub alpha: f64,
    pub gamma: f64,
    pub delta_theta_min: f64,
    pub ergodic_gain_rescale: bool,
}

impl Default for SpsaSettings {
    fn default() -> Self {
        let base = SpsaConfig::new(1000, 0);
        SpsaSettings {
            j_max: base.j_max,
            a: base.a,
            c0: base.c0,
            big_a: base.big_a,
            alpha: base.alpha,
            gamma: base.gamma,
            delta_theta_min: base.delta_theta_min,
            ergodic_gain_rescale: base.ergodic_gain_rescale,
        }
    }
}

impl SpsaSettings {
    fn config(&self, seed: u64) -> SpsaConfig {
        SpsaConfig {
            j_max: self.j_max,
            seed,
            a: self.a,
            c0: self.c0,
            big_a: self.big_a,
            alpha: self.alpha,
            gamma: self.gamma,
            delta_theta_min: self.delta_theta_min,
            ergodic_gain_rescale: self.ergodic_gain_rescale,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    pub source: InstanceSource,
    pub schemes: Vec<SchemeKind>,
    pub p: Vec<usize>,
    pub c: Vec<u64>,
    pub restarts: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub checkpoints: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub parallelism: Option<usize>,
    /// Attach a cost-landscape Lyapunov report at the optimized point
    /// of every pure chaotic cell.
    pub attach_lle: bool,
    pub spsa: SpsaSettings,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 7,
            source: InstanceSource::Generate {
                n_vars: 5,
                k: 3,
                alpha: 4.2,
                count: 5,
                seed: None,
            },
            schemes: vec![SchemeKind::Standard, SchemeKind::PureChaotic],
            p: vec![4],
            c: vec![1, 5, 100],
            restarts: 5,
            checkpoints: None,
            parallelism: None,
            attach_lle: false,
            spsa: SpsaSettings::default(),
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<RunConfig> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    /// Hash of the canonical serialized form, stamped into records.
    /// The worker count is excluded: it never affects results.
    pub fn content_hash(&self) -> Result<String> {
        let mut canon = self.clone();
        canon.parallelism = None;
        let digest = Sha256::digest(canon.to_toml()?.as_bytes());
        let mut hex = String::new();
        for b in &digest[..8] {
            hex.push_str(&format!("{b:02x}"));
        }
        Ok(hex)
    }

    pub fn validate(&self) -> Result<()> {
        if self.schemes.is_empty() || self.p.is_empty() || self.c.is_empty() {
            return Err(Error::Config(
                "schemes, p, and c lists must be nonempty".into(),
            ));
        }
        if self.restarts == 0 {
            return Err(Error::Config("restarts must be >= 1".into()));
        }
        if self.p.iter().any(|&p| p == 0) || self.c.iter().any(|&c| c == 0) {
            return Err(Error::Config("p and c values must be >= 1".into()));
        }
        if self.spsa.j_max == 0 {
            return Err(Error::Config("spsa.j_max must be >= 1".into()));
        }
        if !(self.spsa.c0 > 0.0) || !(self.spsa.delta_theta_min > 0.0) {
            return Err(Error::Config(
                "spsa.c0 and spsa.delta_theta_min must be positive".into(),
            ));
        }
        if let Some(cps) = &self.checkpoints {
            if cps.is_empty() || cps.windows(2).any(|w| w[0] >= w[1]) || cps[0] == 0 {
                return Err(Error::Config(
                    "checkpoints must be strictly increasing and >= 1".into(),
                ));
            }
        }
        match &self.source {
            InstanceSource::Generate { count, .. } if *count == 0 => {
                Err(Error::Config("instance count must be >= 1".into()))
            }
            InstanceSource::Dimacs { paths, .. } if paths.is_empty() => {
                Err(Error::Config("dimacs source needs at least one path".into()))
            }
            _ => Ok(()),
        }
    }

    /// Checkpoint iterations for this run: the configured (or default)
    /// list clipped to [1, j_max], with j_max always included.
    pub fn checkpoint_set(&self) -> Vec<usize> {
        let base: Vec<usize> = match &self.checkpoints {
            Some(cps) => cps.clone(),
            None => DEFAULT_CHECKPOINTS.to_vec(),
        };
        let mut out: Vec<usize> = base
            .into_iter()
            .filter(|&j| j >= 1 && j <= self.spsa.j_max)
            .collect();
        out.push(self.spsa.j_max);
        out.sort_unstable();
        out.dedup();
        out
    }
}

// ---------------------------------------------------------------------------
// planning
// ---------------------------------------------------------------------------

fn hash_seed(parts: &str) -> u64 {
    let digest = Sha256::digest(parts.as_bytes());
    u64::from_le_bytes(digest[..8].try_into().expect("digest is 32 bytes"))
}

/// One unit of work: a scheme on an instance with a restart index and
/// a derived seed.
#[derive(Debug, Clone)]
pub struct Cell {
    pub instance_idx: usize,
    pub spec: SchemeSpec,
    pub restart: usize,
    pub seed: u64,
}

/// Loads or generates the instance list. Instance ids embed a content
/// hash prefix so per-cell seeds depend on the actual formula.
pub fn load_instances(cfg: &RunConfig) -> Result<Vec<(String, SatInstance)>> {
    match &cfg.source {
        InstanceSource::Generate {
            n_vars,
            k,
            alpha,
            count,
            seed,
        } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.unwrap_or(cfg.seed));
            let mut out = Vec::with_capacity(*count);
            for i in 0..*count {
                let inst = random_instance(*n_vars, *k, *alpha, &mut rng)?;
                let id = format!("gen-{i:02}-{}", &inst.content_hash()[..8]);
                out.push((id, inst));
            }
            Ok(out)
        }
        InstanceSource::Dimacs {
            paths,
            allow_mixed_k,
        } => {
            let policy = if *allow_mixed_k {
                KPolicy::AllowMixed
            } else {
                KPolicy::Strict
            };
            let mut out = Vec::with_capacity(paths.len());
            for path in paths {
                let inst = read_dimacs(path, policy)?;
                let stem = path
                    .file_stem()
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_else(|| "cnf".into());
                let id = format!("{stem}-{}", &inst.content_hash()[..8]);
                out.push((id, inst));
            }
            Ok(out)
        }
    }
}

/// Expands the configuration into cells in deterministic order and
/// derives collision-checked per-cell seeds.
pub fn plan_cells(cfg: &RunConfig, instances: &[(String, SatInstance)]) -> Result<Vec<Cell>> {
    let mut cells = Vec::new();
    let mut seen: HashMap<u64, String> = HashMap::new();
    for (idx, (id, _)) in instances.iter().enumerate() {
        for kind in &cfg.schemes {
            for &p in &cfg.p {
                let speeds: &[u64] = if kind.uses_map_speed() { &cfg.c } else { &[1] };
                for &c in speeds {
                    let spec = kind.spec(p, c);
                    spec.validate()?;
                    for restart in 0..cfg.restarts {
                        let key = format!(
                            "{}|{id}|{}|{p}|{c}|{restart}",
                            cfg.seed,
                            spec.kind_label()
                        );
                        let seed = hash_seed(&key);
                        if let Some(prev) = seen.insert(seed, key.clone()) {
                            return Err(Error::SeedCollision { a: prev, b: key });
                        }
                        cells.push(Cell {
                            instance_idx: idx,
                            spec: spec.clone(),
                            restart,
                            seed,
                        });
                    }
                }
            }
        }
    }
    Ok(cells)
}

// ---------------------------------------------------------------------------
// records
// ---------------------------------------------------------------------------

/// Training-curve snapshot at one checkpoint iteration: the clean
/// evaluation at iteration j plus the running best up to j.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Checkpoint {
    pub j: usize,
    pub f: f64,
    pub ar: f64,
    pub misassignment: f64,
    pub best_f: f64,
    pub best_ar: f64,
    pub best_misassignment: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunRecord {
    pub config_hash: String,
    pub instance_id: String,
    pub n_vars: usize,
    pub k: usize,
    pub m: usize,
    pub alpha: f64,
    pub scheme: String,
    pub p: usize,
    pub c: u64,
    pub restart: usize,
    pub seed: u64,
    pub n_theta: usize,
    /// Times the SPSA calibration probe landed on an exactly flat pair
    /// of clipped points and the cell was restarted with a derived
    /// seed. The derivation is part of the seed chain, so retried cells
    /// stay reproducible.
    #[serde(default, skip_serializing_if = "u32_is_zero")]
    pub calibration_retries: u32,
    pub checkpoints: Vec<Checkpoint>,
    pub n_evaluations: usize,
    pub a_used: f64,
    pub c0_used: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lle: Option<LleReport>,
    /// Populated instead of results when the cell failed; failed cells
    /// never abort the sweep and are excluded from aggregates.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

fn u32_is_zero(v: &u32) -> bool {
    *v == 0
}

/// Upper bound on calibration retries per cell. Each retry needs an
/// independent uniform draw to land both probe points on degenerate
/// boundary orbits, so even two in a row is already ~1e-5.
const MAX_CALIBRATION_RETRIES: u32 = 8;

/// Runs SPSA for one cell, retrying with a chained seed when the
/// calibration probe is exactly flat (both clipped probe points can
/// degenerate to the uniform-state objective). Any other error is
/// passed through.
fn optimize_with_retries(
    spec: &SchemeSpec,
    diag: &CostDiagonal,
    settings: &SpsaSettings,
    cell_seed: u64,
) -> (Result<SpsaTrace>, u32) {
    let mut seed = cell_seed;
    let mut retries = 0;
    loop {
        match optimize(spec, diag, &settings.config(seed)) {
            Err(Error::CalibrationZeroGradient) if retries < MAX_CALIBRATION_RETRIES => {
                retries += 1;
                seed = hash_seed(&format!("{cell_seed}|retry|{retries}"));
            }
            result => return (result, retries),
        }
    }
}

fn extract_checkpoints(trace: &SpsaTrace, js: &[usize]) -> Vec<Checkpoint> {
    let mut out = Vec::with_capacity(js.len());
    let mut best_f = f64::INFINITY;
    let mut best_ar = 0.0;
    let mut best_mis = f64::INFINITY;
    let mut next = js.iter().peekable();
    for rec in &trace.records {
        if rec.f < best_f {
            best_f = rec.f;
            best_ar = rec.ar;
            best_mis = rec.misassignment;
        }
        if next.peek() == Some(&&rec.j) {
            next.next();
            out.push(Checkpoint {
                j: rec.j,
                f: rec.f,
                ar: rec.ar,
                misassignment: rec.misassignment,
                best_f,
                best_ar,
                best_misassignment: best_mis,
            });
        }
    }
    out
}

fn run_cell(
    cfg: &RunConfig,
    config_hash: &str,
    checkpoints: &[usize],
    id: &str,
    inst: &SatInstance,
    diag: &CostDiagonal,
    cell: &Cell,
) -> RunRecord {
    let mut record = RunRecord {
        config_hash: config_hash.to_string(),
        instance_id: id.to_string(),
        n_vars: inst.n_vars,
        k: inst.k,
        m: inst.m(),
        alpha: inst.alpha(),
        scheme: cell.spec.kind_label(),
        p: cell.spec.depth(),
        c: cell.spec.map_speed(),
        restart: cell.restart,
        seed: cell.seed,
        n_theta: cell.spec.n_theta(),
        calibration_retries: 0,
        checkpoints: Vec::new(),
        n_evaluations: 0,
        a_used: f64::NAN,
        c0_used: f64::NAN,
        lle: None,
        error: None,
    };
    let (result, retries) = optimize_with_retries(&cell.spec, diag, &cfg.spsa, cell.seed);
    record.calibration_retries = retries;
    match result {
        Ok(trace) => {
            let expected = 3 * cfg.spsa.j_max + if cfg.spsa.a.is_none() { 2 } else { 0 };
            if trace.n_evaluations != expected {
                record.error = Some(format!(
                    "evaluation accounting mismatch: {} vs expected {expected}",
                    trace.n_evaluations
                ));
                return record;
            }
            record.checkpoints = extract_checkpoints(&trace, checkpoints);
            record.n_evaluations = trace.n_evaluations;
            record.a_used = trace.a_used;
            record.c0_used = trace.c0_used;
            if cfg.attach_lle {
                if let SchemeSpec::PureChaotic { p, c } = cell.spec {
                    if p >= 2 {
                        let theta = [trace.best_theta[0], trace.best_theta[1]];
                        match cost_landscape_lle(diag, c, theta, p) {
                            Ok(report) => record.lle = Some(report),
                            Err(e) => record.error = Some(e.to_string()),
                        }
                    }
                }
            }
        }
        Err(e) => record.error = Some(e.to_string()),
    }
    record
}

// ---------------------------------------------------------------------------
// execution
// ---------------------------------------------------------------------------

/// Worker count: the environment variable wins, then the config value;
/// None leaves the global pool untouched.
pub fn resolve_parallelism(config_value: Option<usize>, env_value: Option<&str>) -> Result<Option<usize>> {
    if let Some(text) = env_value {
        let n: usize = text
            .trim()
            .parse()
            .map_err(|_| Error::Config(format!("{THREADS_ENV} must be a positive integer, got {text:?}")))?;
        if n == 0 {
            return Err(Error::Config(format!("{THREADS_ENV} must be >= 1")));
        }
        return Ok(Some(n));
    }
    Ok(config_value)
}

#[derive(Debug)]
pub struct RunOutput {
    pub config_hash: String,
    pub records: Vec<RunRecord>,
    pub aggregate: Vec<AggregateRow>,
    pub n_failed: usize,
}

/// Executes every cell exactly once and aggregates the survivors.
/// Output is deterministic for a fixed config, independent of the
/// worker count and completion order.
pub fn run(cfg: &RunConfig) -> Result<RunOutput> {
    cfg.validate()?;
    let config_hash = cfg.content_hash()?;
    let instances = load_instances(cfg)?;
    let diagonals: Vec<CostDiagonal> = instances
        .iter()
        .map(|(_, inst)| CostDiagonal::build(inst))
        .collect::<Result<_>>()?;
    let cells = plan_cells(cfg, &instances)?;
    let checkpoints = cfg.checkpoint_set();

    let env = std::env::var(THREADS_ENV).ok();
    let threads = resolve_parallelism(cfg.parallelism, env.as_deref())?;
    let work = || -> Vec<RunRecord> {
        cells
            .par_iter()
            .map(|cell| {
                let (id, inst) = &instances[cell.instance_idx];
                let diag = &diagonals[cell.instance_idx];
                run_cell(cfg, &config_hash, &checkpoints, id, inst, diag, cell)
            })
            .collect()
    };
    let records = match threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?
            .install(work),
        None => work(),
    };
    let n_failed = records.iter().filter(|r| r.error.is_some()).count();
    let aggregate = aggregate(&records)?;
    Ok(RunOutput {
        config_hash,
        records,
        aggregate,
        n_failed,
    })
}

// ---------------------------------------------------------------------------
// aggregation
// ---------------------------------------------------------------------------

/// Pooled statistics over instances and restarts for one
/// (scheme, p, c, checkpoint) group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateRow {
    pub scheme: String,
    pub p: usize,
    pub c: u64,
    pub j: usize,
    pub n: usize,
    pub ar_median: f64,
    pub ar_q1: f64,
    pub ar_q3: f64,
    pub ar_mean: f64,
    pub ar_stderr: f64,
    pub ar_ci68_lo: f64,
    pub ar_ci68_hi: f64,
    pub mis_mean: f64,
}

/// Recomputable from persisted records alone; failed cells are skipped.
pub fn aggregate(records: &[RunRecord]) -> Result<Vec<AggregateRow>> {
    let mut groups: BTreeMap<(String, usize, u64, usize), Vec<(f64, f64)>> = BTreeMap::new();
    for rec in records.iter().filter(|r| r.error.is_none()) {
        for cp in &rec.checkpoints {
            // achieved-by-j semantics: the AR reported for iteration j
            // belongs to the best iterate found so far, not the current
            // SPSA position (which never settles on rough landscapes)
            groups
                .entry((rec.scheme.clone(), rec.p, rec.c, cp.j))
                .or_default()
                .push((cp.best_ar, cp.best_misassignment));
        }
    }
    let mut rows = Vec::with_capacity(groups.len());
    for ((scheme, p, c, j), data) in groups {
        let mut ars: Vec<f64> = data.iter().map(|&(ar, _)| ar).collect();
        ars.sort_unstable_by(|a, b| a.partial_cmp(b).expect("finite AR"));
        let (mean, std) = mean_std(&ars);
        let stderr = std / (ars.len() as f64).sqrt();
        let mis_mean = data.iter().map(|&(_, m)| m).sum::<f64>() / data.len() as f64;
        rows.push(AggregateRow {
            scheme,
            p,
            c,
            j,
            n: ars.len(),
            ar_median: quantile(&ars, 0.5)?,
            ar_q1: quantile(&ars, 0.25)?,
            ar_q3: quantile(&ars, 0.75)?,
            ar_mean: mean,
            ar_stderr: stderr,
            ar_ci68_lo: mean - stderr,
            ar_ci68_hi: mean + stderr,
            mis_mean,
        });
    }
    Ok(rows)
}

pub fn aggregate_to_csv(rows: &[AggregateRow]) -> Result<String> {
    let mut wtr = csv::Writer::from_writer(Vec::new());
    for row in rows {
        wtr.serialize(row).map_err(|e| Error::Config(e.to_string()))?;
    }
    let bytes = wtr
        .into_inner()
        .map_err(|e| Error::Config(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Config(e.to_string()))
}

// ---------------------------------------------------------------------------
// persistence
// ---------------------------------------------------------------------------

/// Line-delimited JSON, one record per line, in cell planning order.
pub fn write_records(path: &Path, records: &[RunRecord]) -> Result<()> {
    let mut out = String::new();
    for rec in records {
        out.push_str(&serde_json::to_string(rec)?);
        out.push('\n');
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

pub fn read_records(path: &Path) -> Result<Vec<RunRecord>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut out = Vec::new();
    for line in text.lines() {
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(line)?);
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// comparison
// ---------------------------------------------------------------------------

/// Picks one scheme slice out of a record set. The map speed may be
/// omitted only when it is unambiguous.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemeSelector {
    pub scheme: String,
    pub c: Option<u64>,
}

impl SchemeSelector {
    /// Parses "standard", "pure-chaotic:c=100",
    /// "delayed-hybrid(pt=4):c=5", ...
    pub fn parse(text: &str) -> Result<SchemeSelector> {
        match text.rsplit_once(":c=") {
            Some((scheme, c)) => {
                let c: u64 = c.parse().map_err(|_| {
                    Error::InvalidArgument(format!("bad map speed in selector {text:?}"))
                })?;
                Ok(SchemeSelector {
                    scheme: scheme.to_string(),
                    c: Some(c),
                })
            }
            None => Ok(SchemeSelector {
                scheme: text.to_string(),
                c: None,
            }),
        }
    }

    fn matches(&self, rec: &RunRecord) -> bool {
        rec.scheme == self.scheme && self.c.map_or(true, |c| rec.c == c)
    }
}

impl std::fmt::Display for SchemeSelector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.c {
            Some(c) => write!(f, "{}:c={c}", self.scheme),
            None => write!(f, "{}", self.scheme),
        }
    }
}

/// Mean-AR difference (other minus baseline) per matched
/// (instance, p, j) cell, with the standard errors added in quadrature.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CompareRow {
    pub instance_id: String,
    pub p: usize,
    pub j: usize,
    pub n_baseline: usize,
    pub n_other: usize,
    pub baseline_mean_ar: f64,
    pub other_mean_ar: f64,
    pub diff_ar: f64,
    pub stderr: f64,
}

fn selector_cells(
    records: &[RunRecord],
    sel: &SchemeSelector,
) -> Result<BTreeMap<(String, usize, usize), Vec<f64>>> {
    let matched: Vec<&RunRecord> = records
        .iter()
        .filter(|r| r.error.is_none() && sel.matches(r))
        .collect();
    if matched.is_empty() {
        return Err(Error::InvalidArgument(format!(
            "selector {sel} matches no records"
        )));
    }
    let speeds: BTreeSet<u64> = matched.iter().map(|r| r.c).collect();
    if sel.c.is_none() && speeds.len() > 1 {
        return Err(Error::InvalidArgument(format!(
            "selector {sel} is ambiguous over map speeds {speeds:?}; add :c=<speed>"
        )));
    }
    let mut cells: BTreeMap<(String, usize, usize), Vec<f64>> = BTreeMap::new();
    for rec in matched {
        for cp in &rec.checkpoints {
            cells
                .entry((rec.instance_id.clone(), rec.p, cp.j))
                .or_default()
                .push(cp.best_ar);
        }
    }
    Ok(cells)
}

/// Requires identical (instance, p, j) grids on both sides; mismatches
/// are reported cell by cell rather than silently dropped.
pub fn compare(
    records: &[RunRecord],
    baseline: &SchemeSelector,
    other: &SchemeSelector,
) -> Result<Vec<CompareRow>> {
    let base_cells = selector_cells(records, baseline)?;
    let other_cells = selector_cells(records, other)?;
    let base_keys: BTreeSet<_> = base_cells.keys().cloned().collect();
    let other_keys: BTreeSet<_> = other_cells.keys().cloned().collect();
    if base_keys != other_keys {
        let mut missing: Vec<String> = Vec::new();
        for key in base_keys.symmetric_difference(&other_keys) {
            let side = if base_keys.contains(key) { other } else { baseline };
            missing.push(format!("{side} lacks instance={} p={} j={}", key.0, key.1, key.2));
        }
        missing.sort();
        missing.truncate(20);
        return Err(Error::GridMismatch { missing });
    }
    let mut rows = Vec::with_capacity(base_cells.len());
    for (key, base_ars) in &base_cells {
        let other_ars = &other_cells[key];
        let (bm, bs) = mean_std(base_ars);
        let (om, os) = mean_std(other_ars);
        let b_se = bs / (base_ars.len() as f64).sqrt();
        let o_se = os / (other_ars.len() as f64).sqrt();
        rows.push(CompareRow {
            instance_id: key.0.clone(),
            p: key.1,
            j: key.2,
            n_baseline: base_ars.len(),
            n_other: other_ars.len(),
            baseline_mean_ar: bm,
            other_mean_ar: om,
            diff_ar: om - bm,
            stderr: (b_se * b_se + o_se * o_se).sqrt(),
        });
    }
    Ok(rows)
}

pub fn compare_to_csv(rows: &[CompareRow]) -> Result<String> {
    let mut wtr = csv::Writer::from_writer(Vec::new());
    for row in rows {
        wtr.serialize(row).map_err(|e| Error::Config(e.to_string()))?;
    }
    let bytes = wtr
        .into_inner()
        .map_err(|e| Error::Config(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Config(e.to_string()))
}

// ---------------------------------------------------------------------------
// alpha sweep
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AlphaSweepConfig {
    pub seed: u64,
    pub n_vars: usize,
    pub k: usize,
    /// Clause-density grid as integer multiples of 1/n_vars.
    pub alpha_multiples: Vec<usize>,
    pub instances_per_alpha: usize,
    pub restarts: usize,
    pub p: usize,
    pub c: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub checkpoints: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub parallelism: Option<usize>,
    pub spsa: SpsaSettings,
}

impl Default for AlphaSweepConfig {
    fn default() -> Self {
        AlphaSweepConfig {
            seed: 7,
            n_vars: 5,
            k: 3,
            alpha_multiples: vec![5, 10, 20, 30, 40],
            instances_per_alpha: 5,
            restarts: 5,
            p: 8,
            c: 100,
            checkpoints: None,
            parallelism: None,
            spsa: SpsaSettings {
                j_max: 5000,
                ..SpsaSettings::default()
            },
        }
    }
}

impl AlphaSweepConfig {
    pub fn from_toml(text: &str) -> Result<AlphaSweepConfig> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }
}

/// Largest admissible multiple of 1/n_vars: densities run up to 4 for
/// K = 2 and 8 for K = 3.
pub fn alpha_cap_multiple(n_vars: usize, k: usize) -> Result<usize> {
    match k {
        2 => Ok(4 * n_vars),
        3 => Ok(8 * n_vars),
        other => Err(Error::InvalidArgument(format!(
            "alpha sweep is defined for K in {{2, 3}}, got {other}"
        ))),
    }
}

/// The full density grid 1/N, 2/N, ... up to the K-dependent cap.
pub fn full_alpha_grid(n_vars: usize, k: usize) -> Result<Vec<usize>> {
    Ok((1..=alpha_cap_multiple(n_vars, k)?).collect())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AlphaRow {
    pub alpha: f64,
    pub j: usize,
    pub n: usize,
    pub ar_mean: f64,
    pub ar_stderr: f64,
    pub ar_median: f64,
    pub mis_mean: f64,
}

#[derive(Debug)]
pub struct AlphaSweepOutput {
    pub records: Vec<RunRecord>,
    pub rows: Vec<AlphaRow>,
}

/// Runs a pure chaotic scheme across the density grid; a single-entry
/// grid degenerates to a plain run.
pub fn alpha_sweep(cfg: &AlphaSweepConfig) -> Result<AlphaSweepOutput> {
    if cfg.alpha_multiples.is_empty() {
        return Err(Error::Config("alpha grid must be nonempty".into()));
    }
    if cfg.alpha_multiples.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Config("alpha grid must be strictly increasing".into()));
    }
    let cap = alpha_cap_multiple(cfg.n_vars, cfg.k)?;
    if cfg.alpha_multiples[0] == 0 || *cfg.alpha_multiples.last().unwrap() > cap {
        return Err(Error::Config(format!(
            "alpha multiples must lie in [1, {cap}] for N = {}, K = {}",
            cfg.n_vars, cfg.k
        )));
    }
    let mut records = Vec::new();
    for &mult in &cfg.alpha_multiples {
        let alpha = mult as f64 / cfg.n_vars as f64;
        let sub = RunConfig {
            seed: cfg.seed,
            source: InstanceSource::Generate {
                n_vars: cfg.n_vars,
                k: cfg.k,
                alpha,
                count: cfg.instances_per_alpha,
                seed: Some(hash_seed(&format!("{}|alpha|{mult}", cfg.seed))),
            },
            schemes: vec![SchemeKind::PureChaotic],
            p: vec![cfg.p],
            c: vec![cfg.c],
            restarts: cfg.restarts,
            checkpoints: cfg.checkpoints.clone(),
            parallelism: cfg.parallelism,
            attach_lle: false,
            spsa: cfg.spsa.clone(),
        };
        records.extend(run(&sub)?.records);
    }

    let mut groups: BTreeMap<(u64, usize), Vec<(f64, f64)>> = BTreeMap::new();
    for rec in records.iter().filter(|r| r.error.is_none()) {
        // group by the exact generated density, bit-stable as u64
        for cp in &rec.checkpoints {
            groups
                .entry((rec.alpha.to_bits(), cp.j))
                .or_default()
                .push((cp.best_ar, cp.best_misassignment));
        }
    }
    let mut rows = Vec::with_capacity(groups.len());
    for ((alpha_bits, j), data) in groups {
        let mut ars: Vec<f64> = data.iter().map(|&(ar, _)| ar).collect();
        ars.sort_unstable_by(|a, b| a.partial_cmp(b).expect("finite AR"));
        let (mean, std) = mean_std(&ars);
        rows.push(AlphaRow {
            alpha: f64::from_bits(alpha_bits),
            j,
            n: ars.len(),
            ar_mean: mean,
            ar_stderr: std / (ars.len() as f64).sqrt(),
            ar_median: quantile(&ars, 0.5)?,
            mis_mean: data.iter().map(|&(_, m)| m).sum::<f64>() / data.len() as f64,
        });
    }
    rows.sort_by(|a, b| (a.alpha, a.j).partial_cmp(&(b.alpha, b.j)).expect("finite alpha"));
    Ok(AlphaSweepOutput { records, rows })
}

pub fn alpha_rows_to_csv(rows: &[AlphaRow]) -> Result<String> {
    let mut wtr = csv::Writer::from_writer(Vec::new());
    for row in rows {
        wtr.serialize(row).map_err(|e| Error::Config(e.to_string()))?;
    }
    let bytes = wtr
        .into_inner()
        .map_err(|e| Error::Config(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Config(e.to_string()))
}

// ---------------------------------------------------------------------------
// presets
// ---------------------------------------------------------------------------

pub const PRESETS: [&str; 2] = ["fig2-small", "hybrid-small"];
pub const ALPHA_PRESETS: [&str; 1] = ["alpha-b-small"];

/// Named reproduction configurations, scaled to finish on a laptop.
pub fn preset(name: &str) -> Result<RunConfig> {
    match name {
        // map-speed comparison on hard 3-SAT: standard vs pure chaotic
        // at c in {1, 5, 100} across shallow to deep circuits
        "fig2-small" => Ok(RunConfig {
            seed: 7,
            source: InstanceSource::Generate {
                n_vars: 5,
                k: 3,
                alpha: 4.2,
                count: 5,
                seed: None,
            },
            schemes: vec![SchemeKind::Standard, SchemeKind::PureChaotic],
            p: vec![4, 12, 20],
            c: vec![1, 5, 100],
            restarts: 20,
            checkpoints: None,
            parallelism: None,
            attach_lle: false,
            spsa: SpsaSettings::default(),
        }),
        // hybrid schedules against standard at depth beyond the
        // trainability crossover
        "hybrid-small" => Ok(RunConfig {
            seed: 11,
            source: InstanceSource::Generate {
                n_vars: 5,
                k: 3,
                alpha: 4.2,
                count: 5,
                seed: None,
            },
            schemes: vec![
                SchemeKind::Standard,
                SchemeKind::PureChaotic,
                SchemeKind::DelayedHybrid { transition: 4 },
                SchemeKind::IteratedHybrid { block: 4 },
            ],
            p: vec![12],
            c: vec![100],
            restarts: 5,
            checkpoints: None,
            parallelism: None,
            attach_lle: false,
            spsa: SpsaSettings::default(),
        }),
        other => Err(Error::Config(format!(
            "unknown preset {other:?}; available: {PRESETS:?}"
        ))),
    }
}

pub fn alpha_preset(name: &str) -> Result<AlphaSweepConfig> {
    match name {
        "alpha-b-small" => Ok(AlphaSweepConfig::default()),
        other => Err(Error::Config(format!(
            "unknown alpha preset {other:?}; available: {ALPHA_PRESETS:?}"
        ))),
    }
}
