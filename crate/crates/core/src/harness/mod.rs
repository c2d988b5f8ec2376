//! Experiment runner: configuration, seeded repetitions, CSV persistence and
//! regret-regime statistics.
//!
//! Randomness: the instance is generated from the master seed; run `r` draws
//! from the ChaCha8 stream `r + 1` of the same seed. Within a step the draw
//! order is fixed: context, algorithm randomization, reward noise. Runs are
//! independent, so serial and parallel execution produce identical output.

mod stats;

pub use stats::{fit_regime, loglog_slope, GroundTruth, RegimeStats, RunStats, TAIL_WINDOW};

use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::algos::{AlgoConfig, AlgoError, AlgoKind, BaseLearner};
use crate::env::{self, BanditInstance, EnvError, GeneratorConfig};
use crate::srl::{BoundaryRecord, LeaderController, SrlConfig, SrlController, SrlError};

/// Column order of the results CSV.
pub const CSV_HEADER: [&str; 8] = [
    "run_id",
    "t",
    "cum_regret",
    "phase",
    "rep_id",
    "glrt_triggered",
    "n_active_reps",
    "subopt_pulls",
];

/// `rep_id` written for the Leader baseline, which has no single active rep.
pub const LEADER_REP_ID: &str = "leader";

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid run config: {0}")]
    Config(String),
    #[error(transparent)]
    Env(#[from] EnvError),
    #[error(transparent)]
    Algo(#[from] AlgoError),
    #[error(transparent)]
    Srl(#[from] SrlError),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("config json: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("thread pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

pub type Result<T> = std::result::Result<T, HarnessError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Benchmark {
    VaryingDim,
    VaryingDimRealizableOnly,
    VaryingDimNoHls,
    WeakHls,
    Mixing,
    SingleRepHls,
    SingleRepNoHls,
}

impl Benchmark {
    pub const ALL: [Benchmark; 7] = [
        Benchmark::VaryingDim,
        Benchmark::VaryingDimRealizableOnly,
        Benchmark::VaryingDimNoHls,
        Benchmark::WeakHls,
        Benchmark::Mixing,
        Benchmark::SingleRepHls,
        Benchmark::SingleRepNoHls,
    ];

    pub fn build(self, seed: u64, sigma: f64, cfg: &GeneratorConfig) -> env::Result<BanditInstance> {
        match self {
            Benchmark::VaryingDim => env::make_varying_dimension(seed, sigma, cfg),
            Benchmark::VaryingDimRealizableOnly => {
                env::make_varying_dimension_realizable_only(seed, sigma, cfg)
            }
            Benchmark::VaryingDimNoHls => env::make_varying_dimension_no_hls(seed, sigma, cfg),
            Benchmark::WeakHls => env::make_weak_hls(seed, sigma, cfg),
            Benchmark::Mixing => env::make_mixing(seed, sigma, cfg),
            Benchmark::SingleRepHls => env::make_single_rep(seed, sigma, true, cfg),
            Benchmark::SingleRepNoHls => env::make_single_rep(seed, sigma, false, cfg),
        }
    }
}

impl std::str::FromStr for Benchmark {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        serde_json::from_value(serde_json::Value::String(s.to_string()))
            .map_err(|_| format!("unknown benchmark {s:?}"))
    }
}

/// One experiment: a benchmark, a learner and the simulation budget.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub benchmark: Benchmark,
    #[serde(default)]
    pub algo: AlgoConfig,
    /// `None` (written `"disabled"` or `null`) runs the bare base algorithm
    /// on the first representation.
    #[serde(
        default = "default_srl",
        serialize_with = "ser_srl",
        deserialize_with = "de_srl"
    )]
    pub srl: Option<SrlConfig>,
    #[serde(default = "default_horizon")]
    pub horizon: u64,
    #[serde(default = "default_runs")]
    pub n_runs: u32,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_log_every")]
    pub log_every: u64,
    #[serde(default)]
    pub out_path: String,
}

fn default_srl() -> Option<SrlConfig> {
    Some(SrlConfig::default())
}
fn default_horizon() -> u64 {
    30_000
}
fn default_runs() -> u32 {
    10
}
fn default_log_every() -> u64 {
    100
}

fn ser_srl<S: Serializer>(v: &Option<SrlConfig>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(cfg) => cfg.serialize(s),
        None => s.serialize_str("disabled"),
    }
}

fn de_srl<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Option<SrlConfig>, D::Error> {
    use serde::de::Error;
    match serde_json::Value::deserialize(d)? {
        serde_json::Value::Null => Ok(None),
        serde_json::Value::String(s) if s == "disabled" => Ok(None),
        v @ serde_json::Value::Object(_) => serde_json::from_value(v).map(Some).map_err(D::Error::custom),
        other => Err(D::Error::custom(format!("srl must be an object or \"disabled\", got {other}"))),
    }
}

impl RunConfig {
    pub fn new(benchmark: Benchmark, algo: AlgoConfig, srl: Option<SrlConfig>) -> Self {
        Self {
            benchmark,
            algo,
            srl,
            horizon: default_horizon(),
            n_runs: default_runs(),
            seed: 0,
            log_every: default_log_every(),
            out_path: String::new(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.horizon == 0 {
            return Err(HarnessError::Config("horizon must be positive".into()));
        }
        if self.n_runs == 0 {
            return Err(HarnessError::Config("n_runs must be positive".into()));
        }
        if self.log_every == 0 {
            return Err(HarnessError::Config("log_every must be positive".into()));
        }
        self.algo.validate()?;
        if let Some(s) = &self.srl {
            s.validate()?;
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    /// The benchmark instance for this config's seed.
    pub fn instance(&self) -> Result<BanditInstance> {
        Ok(self
            .benchmark
            .build(self.seed, self.algo.sigma, &GeneratorConfig::default())?)
    }

    /// `t` at which the tail-growth reference point is taken.
    pub fn tail_start(&self) -> u64 {
        (4 * self.horizon / 5).max(1)
    }

    fn logs_step(&self, t: u64) -> bool {
        t == 1
            || t % self.log_every == 0
            || t == self.horizon
            || t == self.tail_start()
            || t + TAIL_WINDOW > self.horizon
    }
}

/// One CSV row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub run_id: u32,
    pub t: u64,
    pub cum_regret: f64,
    pub phase: u32,
    pub rep_id: String,
    pub glrt_triggered: bool,
    pub n_active_reps: usize,
    pub subopt_pulls: u64,
}

/// Everything one simulated run produced.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub run_id: u32,
    pub records: Vec<StepRecord>,
    pub boundaries: Vec<BoundaryRecord>,
    /// Steps where the test triggered while the active rep was realizable.
    pub glrt_realizable_steps: u64,
    /// ...and of those, steps where the played action was suboptimal.
    pub glrt_realizable_errors: u64,
    /// `(context, action)` per step, when requested.
    pub trace: Option<Vec<(u32, u32)>>,
}

/// Knobs that change what is recorded, not what is simulated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunOptions {
    /// Worker threads; runs are merged by `run_id` regardless.
    pub workers: usize,
    /// Record the full `(context, action)` trace of every run.
    pub full_trace: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            workers: 1,
            full_trace: false,
        }
    }
}

/// Result of [`run_experiment`].
#[derive(Debug, Clone)]
pub struct Experiment {
    pub instance: BanditInstance,
    pub runs: Vec<RunOutcome>,
    pub stats: RegimeStats,
}

impl Experiment {
    pub fn records(&self) -> impl Iterator<Item = &StepRecord> {
        self.runs.iter().flat_map(|r| r.records.iter())
    }
}

enum Policy {
    Srl(SrlController),
    Leader(LeaderController),
    Bare(BaseLearner),
}

impl Policy {
    fn new(instance: &BanditInstance, cfg: &RunConfig) -> Result<Self> {
        if cfg.algo.kind == AlgoKind::Leader {
            let srl = cfg.srl.clone().unwrap_or_default();
            return Ok(Policy::Leader(LeaderController::new(instance, &cfg.algo, &srl)?));
        }
        Ok(match &cfg.srl {
            Some(srl) => Policy::Srl(SrlController::new(instance, &cfg.algo, srl)?),
            None => Policy::Bare(BaseLearner::new(&cfg.algo, instance.rep(0).dim(), cfg.algo.delta)?),
        })
    }

    fn active_rep(&self) -> Option<usize> {
        match self {
            Policy::Srl(c) => Some(c.active_rep()),
            Policy::Leader(_) => None,
            Policy::Bare(_) => Some(0),
        }
    }

    fn phase(&self) -> u32 {
        match self {
            Policy::Srl(c) => c.phase(),
            Policy::Leader(c) => c.phase(),
            Policy::Bare(_) => 0,
        }
    }

    fn n_active(&self) -> usize {
        match self {
            Policy::Srl(c) => c.active_set().len(),
            Policy::Leader(c) => c.active_set().len(),
            Policy::Bare(_) => 1,
        }
    }
}

/// Per-run random stream.
pub fn run_rng(seed: u64, run_id: u32) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(run_id as u64 + 1);
    rng
}

/// Simulates one run on a prepared instance.
pub fn run_single(
    cfg: &RunConfig,
    instance: &BanditInstance,
    run_id: u32,
    full_trace: bool,
) -> Result<RunOutcome> {
    let mut rng = run_rng(cfg.seed, run_id);
    let mut policy = Policy::new(instance, cfg)?;
    let mut records = Vec::new();
    let mut boundaries = Vec::new();
    let mut trace = full_trace.then(|| Vec::with_capacity(cfg.horizon as usize));
    let mut cum_regret = 0.0;
    let mut subopt = 0u64;
    let mut glrt_steps = 0u64;
    let mut glrt_errors = 0u64;

    for t in 1..=cfg.horizon {
        let x = instance.sample_context(&mut rng);
        let acting = policy.active_rep();
        let (a, triggered) = match &policy {
            Policy::Srl(c) => {
                let d = c.decide(instance, x, &mut rng)?;
                (d.action, d.glrt_triggered)
            }
            Policy::Leader(c) => (c.decide(instance, x), false),
            Policy::Bare(b) => (b.choose(x, instance.rep(0), &mut rng)?, false),
        };
        let y = instance.step(x, a, &mut rng);
        let boundary = match &mut policy {
            Policy::Srl(c) => c.observe(instance, x, a, y, triggered)?,
            Policy::Leader(c) => c.observe(instance, x, a, y)?,
            Policy::Bare(b) => {
                b.feed(instance.rep(0).feature(x, a), y)?;
                None
            }
        };

        cum_regret += instance.gap(x, a);
        let suboptimal = a != instance.opt_action(x);
        subopt += suboptimal as u64;
        if triggered && acting.is_some_and(|k| instance.is_realizable(k)) {
            glrt_steps += 1;
            glrt_errors += suboptimal as u64;
        }
        if let Some(tr) = trace.as_mut() {
            tr.push((x as u32, a as u32));
        }
        let at_boundary = boundary.is_some();
        if let Some(b) = boundary {
            boundaries.push(b);
        }
        if at_boundary || cfg.logs_step(t) {
            records.push(StepRecord {
                run_id,
                t,
                cum_regret,
                phase: policy.phase(),
                rep_id: match policy.active_rep() {
                    Some(k) => instance.rep(k).id().to_string(),
                    None => LEADER_REP_ID.to_string(),
                },
                glrt_triggered: triggered,
                n_active_reps: policy.n_active(),
                subopt_pulls: subopt,
            });
        }
    }
    Ok(RunOutcome {
        run_id,
        records,
        boundaries,
        glrt_realizable_steps: glrt_steps,
        glrt_realizable_errors: glrt_errors,
        trace,
    })
}

/// Runs all repetitions of `cfg`, writes the CSV when `out_path` is set, and
/// aggregates the regime statistics.
pub fn run_experiment(cfg: &RunConfig, opts: RunOptions) -> Result<Experiment> {
    cfg.validate()?;
    let instance = cfg.instance()?;
    let runs = simulate_runs(cfg, &instance, opts)?;
    let truth = GroundTruth::from_instance(&instance);
    let records: Vec<StepRecord> = runs.iter().flat_map(|r| r.records.iter().cloned()).collect();
    let stats = fit_regime(&records, cfg.horizon, cfg.log_every, &truth);
    if !cfg.out_path.is_empty() {
        write_csv(Path::new(&cfg.out_path), &records)?;
    }
    Ok(Experiment {
        instance,
        runs,
        stats,
    })
}

/// Simulates every run of `cfg` on `instance`, in `run_id` order.
pub fn simulate_runs(cfg: &RunConfig, instance: &BanditInstance, opts: RunOptions) -> Result<Vec<RunOutcome>> {
    let ids: Vec<u32> = (0..cfg.n_runs).collect();
    if opts.workers <= 1 {
        return ids
            .iter()
            .map(|&r| run_single(cfg, instance, r, opts.full_trace))
            .collect();
    }
    let pool = rayon::ThreadPoolBuilder::new().num_threads(opts.workers).build()?;
    pool.install(|| {
        ids.par_iter()
            .map(|&r| run_single(cfg, instance, r, opts.full_trace))
            .collect()
    })
}

pub fn write_csv(path: &Path, records: &[StepRecord]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Renders records as CSV text (header included).
pub fn csv_string(records: &[StepRecord]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in records {
        w.serialize(r)?;
    }
    let bytes = w.into_inner().map_err(|e| HarnessError::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn read_csv(path: &Path) -> Result<Vec<StepRecord>> {
    let mut r = csv::Reader::from_path(path)?;
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if header != CSV_HEADER {
        return Err(HarnessError::Config(format!("unexpected CSV header {header:?}")));
    }
    Ok(r.deserialize().collect::<std::result::Result<Vec<StepRecord>, _>>()?)
}
