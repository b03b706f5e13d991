//! Seeded experiments over the algorithms and theories, with CSV/JSON
//! output that is byte-stable for a fixed configuration.
//!
//! Every trial draws its randomness from `trial_seed(seed, size, index)`,
//! so trials are independent of each other and of execution order. Trials
//! run on a rayon pool and are collected by index before emission.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algorithms::gi::MAX_GI_VERTICES;
use crate::algorithms::{
    build_with_plan, distinguish_collision, dqp_search, generate_boundary_instance,
    generate_collision, generate_instance, gi_to_sd, prepare_pair, random_graph_pair,
    solve_sd_general, solve_sd_one_to_one, CollisionParams, CollisionVerdict, InstanceFamily,
    JugglePlan, SdLayout, SdParams, SearchInstance, SearchParams, Verdict,
};
use crate::error::{Error, Result};
use crate::history::{sample_history, HistoryQuery, SamplerOptions};
use crate::qsim::Register;
use crate::rng::{substream, substream_seed};
use crate::theories::{
    check_indifference, check_marginalization, dense_kernel, probe_robustness, product_witness,
    random_block_unitary, random_state, row_stochasticity_defect, Granularity, KernelOptions,
    TheoryKind,
};

/// Largest simulated register for the SD and GI experiments.
pub const MAX_SIMULATED_QUBITS: usize = 22;

/// Marginalization residual accepted by the axiom suite.
pub const MARGINALIZATION_TOL: f64 = 1e-7;

/// The DQP acceptance bound on per-size success rates.
pub const DQP_BOUND: f64 = 2.0 / 3.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    Axioms,
    Juggle,
    Sd,
    Collision,
    Gi,
    Search,
    Scaling,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 7] = [
        ExperimentKind::Axioms,
        ExperimentKind::Juggle,
        ExperimentKind::Sd,
        ExperimentKind::Collision,
        ExperimentKind::Gi,
        ExperimentKind::Search,
        ExperimentKind::Scaling,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ExperimentKind::Axioms => "axioms",
            ExperimentKind::Juggle => "juggle",
            ExperimentKind::Sd => "sd",
            ExperimentKind::Collision => "collision",
            ExperimentKind::Gi => "gi",
            ExperimentKind::Search => "search",
            ExperimentKind::Scaling => "scaling",
        }
    }

    /// Sizes run when none are given: qubits `l` for axioms and juggling,
    /// input width `n` for SD, collision and search, vertices for GI.
    pub fn default_sizes(self) -> Vec<usize> {
        match self {
            ExperimentKind::Axioms => vec![1, 2, 3, 4],
            ExperimentKind::Juggle => (2..=8).collect(),
            ExperimentKind::Sd => vec![2, 3, 4],
            ExperimentKind::Collision => vec![2, 4, 6, 8],
            ExperimentKind::Gi => vec![4],
            ExperimentKind::Search | ExperimentKind::Scaling => vec![3, 6, 9],
        }
    }

    pub fn default_trials(self) -> usize {
        match self {
            ExperimentKind::Axioms => 200,
            ExperimentKind::Juggle => 10_000,
            ExperimentKind::Sd | ExperimentKind::Collision => 50,
            ExperimentKind::Gi => 10,
            ExperimentKind::Search | ExperimentKind::Scaling => 200,
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ExperimentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ExperimentKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s.trim().to_ascii_lowercase())
            .ok_or_else(|| Error::Config(format!("unknown experiment `{s}`")))
    }
}

/// Which SD instance families a run covers.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyChoice {
    OneToOne,
    ManyToOne,
    #[default]
    Both,
}

impl FromStr for FamilyChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "one_to_one" | "1to1" => Ok(FamilyChoice::OneToOne),
            "many_to_one" | "2to1" => Ok(FamilyChoice::ManyToOne),
            "both" => Ok(FamilyChoice::Both),
            other => Err(Error::Config(format!("unknown family `{other}`"))),
        }
    }
}

/// Tunable constants; `None` keeps the algorithm's default.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Overrides {
    /// Batches (`R`) of the SD and collision solvers.
    pub batches: Option<usize>,
    /// Juggle attempts per batch.
    pub attempts: Option<usize>,
    /// Search batch constant `C`.
    pub c: Option<usize>,
    /// Index padding of the GI reduction.
    pub lambda: Option<usize>,
    pub sinkhorn_tol: Option<f64>,
    pub marginalization_tol: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub theory: TheoryKind,
    pub sizes: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub strict: bool,
    /// Record wall time per trial; off by default so outputs stay byte-stable.
    pub timing: bool,
    pub family: FamilyChoice,
    /// Use boundary SD instances (distance `2^-n` or `1 - 2^-n`).
    pub boundary: bool,
    pub granularity: Granularity,
    pub overrides: Overrides,
}

impl ExperimentConfig {
    pub fn new(experiment: ExperimentKind) -> Self {
        ExperimentConfig {
            experiment,
            theory: TheoryKind::Flow,
            sizes: experiment.default_sizes(),
            trials: experiment.default_trials(),
            seed: 0,
            out: None,
            strict: false,
            timing: false,
            family: FamilyChoice::Both,
            boundary: false,
            granularity: Granularity::Gate,
            overrides: Overrides::default(),
        }
    }

    /// Parses a flat `key = value` file; `#` starts a comment. The
    /// `experiment` key is required unless `base` is given.
    pub fn parse(text: &str, base: Option<ExperimentKind>) -> Result<Self> {
        let mut pairs = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", i + 1)))?;
            pairs.push((k.trim().to_string(), v.trim().to_string()));
        }
        let kind = match pairs.iter().find(|(k, _)| k == "experiment") {
            Some((_, v)) => v.parse()?,
            None => base.ok_or_else(|| Error::Config("no experiment given".into()))?,
        };
        let mut config = ExperimentConfig::new(kind);
        for (k, v) in &pairs {
            if k != "experiment" {
                config.set(k, v)?;
            }
        }
        Ok(config)
    }

    /// Sets one key; shared by config files and command-line overrides.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        fn num<T: FromStr>(key: &str, value: &str) -> Result<T> {
            value
                .trim()
                .parse()
                .map_err(|_| Error::Config(format!("bad value `{value}` for `{key}`")))
        }
        fn flag(key: &str, value: &str) -> Result<bool> {
            match value.trim() {
                "true" | "1" | "yes" => Ok(true),
                "false" | "0" | "no" => Ok(false),
                _ => Err(Error::Config(format!("bad value `{value}` for `{key}`"))),
            }
        }
        match key.trim() {
            "experiment" => {
                let kind: ExperimentKind = value.parse()?;
                if kind != self.experiment {
                    let keep = self.clone();
                    *self = ExperimentConfig::new(kind);
                    self.theory = keep.theory;
                    self.seed = keep.seed;
                    self.out = keep.out;
                    self.strict = keep.strict;
                    self.timing = keep.timing;
                    self.overrides = keep.overrides;
                }
            }
            "theory" => {
                self.theory = value
                    .parse()
                    .map_err(|_| Error::Config(format!("unknown theory `{value}`")))?
            }
            "sizes" | "n" | "l" | "size" => {
                self.sizes = value
                    .split(',')
                    .filter(|s| !s.trim().is_empty())
                    .map(|s| num(key, s))
                    .collect::<Result<_>>()?
            }
            "trials" => self.trials = num(key, value)?,
            "seed" => self.seed = num(key, value)?,
            "out" => self.out = Some(PathBuf::from(value.trim())),
            "strict" => self.strict = flag(key, value)?,
            "timing" => self.timing = flag(key, value)?,
            "family" => self.family = value.parse()?,
            "boundary" => self.boundary = flag(key, value)?,
            "granularity" => {
                self.granularity = value
                    .parse()
                    .map_err(|_| Error::Config(format!("unknown granularity `{value}`")))?
            }
            "batches" | "r" | "R" => self.overrides.batches = Some(num(key, value)?),
            "attempts" => self.overrides.attempts = Some(num(key, value)?),
            "c" | "C" => self.overrides.c = Some(num(key, value)?),
            "lambda" => self.overrides.lambda = Some(num(key, value)?),
            "sinkhorn_tol" => self.overrides.sinkhorn_tol = Some(num(key, value)?),
            "marginalization_tol" => self.overrides.marginalization_tol = Some(num(key, value)?),
            other => return Err(Error::Config(format!("unknown key `{other}`"))),
        }
        Ok(())
    }

    /// Checks trials and per-experiment size caps.
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if self.sizes.is_empty() {
            return Err(Error::Config("no sizes given".into()));
        }
        if self.overrides.batches == Some(0) || self.overrides.c == Some(0) {
            return Err(Error::Config("batch constants must be positive".into()));
        }
        for &s in &self.sizes {
            let ok = match self.experiment {
                ExperimentKind::Axioms => (1..=4).contains(&s),
                ExperimentKind::Juggle => (2..=12).contains(&s),
                ExperimentKind::Sd => {
                    (1..=8).contains(&s) && {
                        let hashed = self.family != FamilyChoice::OneToOne;
                        SdLayout::new(s, s + 1, hashed).qubits <= MAX_SIMULATED_QUBITS
                    }
                }
                ExperimentKind::Collision => (2..=10).contains(&s),
                // below 4 vertices every edge count has a single isomorphism class
                ExperimentKind::Gi => {
                    (4..=MAX_GI_VERTICES).contains(&s)
                        && gi_qubits(s, self.lambda()) <= MAX_SIMULATED_QUBITS
                }
                ExperimentKind::Search | ExperimentKind::Scaling => s > 0 && s % 3 == 0 && s <= 12,
            };
            if !ok {
                return Err(Error::Config(format!(
                    "size {s} outside the caps of `{}`",
                    self.experiment
                )));
            }
        }
        if self.experiment == ExperimentKind::Scaling && self.sizes.len() < 2 {
            return Err(Error::Config("scaling needs at least two sizes".into()));
        }
        Ok(())
    }

    fn sampler_options(&self) -> SamplerOptions {
        let mut kernel = KernelOptions {
            granularity: self.granularity,
            ..KernelOptions::default()
        };
        if let Some(tol) = self.overrides.sinkhorn_tol {
            kernel.sinkhorn_tol = tol;
        }
        SamplerOptions { kernel }
    }

    /// GI index padding; 0 unless overridden, since any useful padding
    /// exceeds what the dense simulator can hold.
    fn lambda(&self) -> usize {
        self.overrides.lambda.unwrap_or(0)
    }
}

fn gi_qubits(m: usize, lambda: usize) -> usize {
    let n = crate::algorithms::gi::index_bits(m) + lambda;
    SdLayout::new(n, m * (m - 1) / 2, true).qubits
}

/// Seed of trial `index` at `size`.
pub fn trial_seed(seed: u64, size: usize, index: usize) -> u64 {
    substream_seed(substream_seed(seed, size as u64), index as u64)
}

/// One CSV row.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub experiment: String,
    pub size: usize,
    pub seed: u64,
    pub verdict: String,
    pub success: bool,
    pub queries: u64,
    pub batches: usize,
    pub ms: u64,
}

/// Least-squares fit of `ln Q = slope ln N + intercept`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Fit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
}

/// Ordinary least squares of `y` on `x`; needs two distinct `x`.
pub fn least_squares(points: &[(f64, f64)]) -> Option<Fit> {
    let n = points.len() as f64;
    if points.len() < 2 {
        return None;
    }
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = points.iter().map(|p| (p.1 - my).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 {
        1.0
    } else {
        sxy * sxy / (sxx * syy)
    };
    Some(Fit {
        slope,
        intercept: my - slope * mx,
        r2,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SizeSummary {
    pub size: usize,
    pub trials: usize,
    pub success_rate: f64,
    pub mean_queries: f64,
    pub metrics: BTreeMap<String, f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub experiment: ExperimentKind,
    pub theory: TheoryKind,
    pub seed: u64,
    pub trials: usize,
    pub success_rate: f64,
    pub mean_queries: f64,
    pub sizes: Vec<SizeSummary>,
    pub metrics: BTreeMap<String, f64>,
    pub fit: Option<Fit>,
    /// Whether the experiment met its acceptance threshold.
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentResult {
    pub records: Vec<TrialRecord>,
    pub summary: Summary,
}

/// What one trial reports beyond its record.
#[derive(Clone, Debug, Default)]
struct TrialOutput {
    verdict: String,
    success: bool,
    queries: u64,
    batches: usize,
    metrics: Vec<(&'static str, f64)>,
}

/// Runs `config.experiment` for every size and trial.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentResult> {
    config.validate()?;
    let mut records = Vec::new();
    let mut sizes = Vec::new();
    for &size in &config.sizes {
        let outputs: Vec<(TrialOutput, u64, u64)> = (0..config.trials)
            .into_par_iter()
            .map(|i| {
                let seed = trial_seed(config.seed, size, i);
                let start = Instant::now();
                let out = run_trial(config, size, i, seed)?;
                let ms = if config.timing {
                    start.elapsed().as_millis() as u64
                } else {
                    0
                };
                Ok((out, seed, ms))
            })
            .collect::<Result<_>>()?;
        let mut metrics: BTreeMap<String, Vec<f64>> = BTreeMap::new();
        for (out, seed, ms) in &outputs {
            for &(k, v) in &out.metrics {
                metrics.entry(k.to_string()).or_default().push(v);
            }
            records.push(TrialRecord {
                experiment: config.experiment.to_string(),
                size,
                seed: *seed,
                verdict: out.verdict.clone(),
                success: out.success,
                queries: out.queries,
                batches: out.batches,
                ms: *ms,
            });
        }
        let n = outputs.len() as f64;
        let mut size_metrics = reduce_metrics(&metrics);
        if config.experiment == ExperimentKind::Juggle {
            add_juggle_bound(size, &outputs, &mut size_metrics);
        }
        sizes.push(SizeSummary {
            size,
            trials: outputs.len(),
            success_rate: outputs.iter().filter(|o| o.0.success).count() as f64 / n,
            mean_queries: outputs.iter().map(|o| o.0.queries as f64).sum::<f64>() / n,
            metrics: size_metrics,
        });
    }
    let mut metrics = BTreeMap::new();
    if config.experiment == ExperimentKind::Axioms {
        let (state, u) = product_witness::<f64>();
        let k = dense_kernel(config.theory, &state, &u, &KernelOptions::default())?;
        metrics.insert(
            "witness_indifference_violations".into(),
            check_indifference(&k, &u).len() as f64,
        );
    }
    let fit = match config.experiment {
        ExperimentKind::Search | ExperimentKind::Scaling => {
            let pts: Vec<(f64, f64)> = sizes
                .iter()
                .map(|s| {
                    (
                        (s.size as f64) * std::f64::consts::LN_2,
                        s.mean_queries.ln(),
                    )
                })
                .collect();
            least_squares(&pts)
        }
        _ => None,
    };
    let total = records.len() as f64;
    let mut summary = Summary {
        experiment: config.experiment,
        theory: config.theory,
        seed: config.seed,
        trials: config.trials,
        success_rate: records.iter().filter(|r| r.success).count() as f64 / total,
        mean_queries: records.iter().map(|r| r.queries as f64).sum::<f64>() / total,
        sizes,
        metrics,
        fit,
        passed: false,
    };
    summary.passed = passes(config, &summary);
    Ok(ExperimentResult { records, summary })
}

/// Sums counts, keeps the maximum of `max_*` keys and averages the rest.
fn reduce_metrics(metrics: &BTreeMap<String, Vec<f64>>) -> BTreeMap<String, f64> {
    metrics
        .iter()
        .map(|(k, v)| {
            let r = if k.starts_with("max_") {
                v.iter().copied().fold(0.0, f64::max)
            } else if k.ends_with("_count") || k.ends_with("violations") || k.ends_with("queries") {
                v.iter().sum()
            } else {
                v.iter().sum::<f64>() / v.len() as f64
            };
            (k.clone(), r)
        })
        .collect()
}

fn add_juggle_bound(l: usize, outputs: &[(TrialOutput, u64, u64)], m: &mut BTreeMap<String, f64>) {
    let trials = outputs.len() as f64;
    let bound = (1.0 - 1.0 / (2.0 * l as f64)).powi((2 * l * l) as i32);
    let failures = outputs.iter().filter(|o| !o.0.success).count() as f64;
    m.insert("failure_rate".into(), failures / trials);
    m.insert("failure_bound".into(), bound);
    m.insert("sigma".into(), (bound * (1.0 - bound) / trials).sqrt());
    let flips = m.get("flip_count").copied().unwrap_or(0.0);
    let chances = m.get("differing_attempt_count").copied().unwrap_or(0.0);
    if chances > 0.0 {
        m.insert("flip_rate".into(), flips / chances);
    }
}

fn passes(config: &ExperimentConfig, s: &Summary) -> bool {
    let every_size = |f: &dyn Fn(&SizeSummary) -> bool| s.sizes.iter().all(f);
    match config.experiment {
        ExperimentKind::Axioms => {
            let tol = config
                .overrides
                .marginalization_tol
                .unwrap_or(MARGINALIZATION_TOL);
            let marg = every_size(&|z| z.metrics["max_marginalization_residual"] <= tol);
            if config.theory.is_indifferent() {
                marg && every_size(&|z| z.metrics["indifference_violations"] == 0.0)
            } else {
                marg && s.metrics["witness_indifference_violations"] >= 1.0
            }
        }
        ExperimentKind::Juggle => every_size(&|z| {
            let m = &z.metrics;
            m["failure_rate"] <= m["failure_bound"] + 3.0 * m["sigma"]
                && m.get("flip_rate").is_none_or(|r| (r - 0.5).abs() <= 0.02)
        }),
        ExperimentKind::Sd | ExperimentKind::Collision | ExperimentKind::Gi => {
            every_size(&|z| z.success_rate >= DQP_BOUND)
        }
        ExperimentKind::Search | ExperimentKind::Scaling => {
            every_size(&|z| z.success_rate >= DQP_BOUND && z.metrics["juggle_queries"] == 0.0)
                && s.fit.is_none_or(|f| (0.2..=0.5).contains(&f.slope))
        }
    }
}

fn run_trial(
    config: &ExperimentConfig,
    size: usize,
    index: usize,
    seed: u64,
) -> Result<TrialOutput> {
    let opts = config.sampler_options();
    let theory = config.theory;
    match config.experiment {
        ExperimentKind::Axioms => axiom_trial(config, size, seed),
        ExperimentKind::Juggle => juggle_trial(config, size, seed, &opts),
        ExperimentKind::Sd => {
            let truth = if index % 2 == 0 {
                Verdict::Near
            } else {
                Verdict::Far
            };
            let family = match config.family {
                FamilyChoice::OneToOne => InstanceFamily::OneToOne,
                FamilyChoice::ManyToOne => InstanceFamily::ManyToOne,
                FamilyChoice::Both if index % 4 < 2 => InstanceFamily::OneToOne,
                FamilyChoice::Both => InstanceFamily::ManyToOne,
            };
            let inst = if config.boundary {
                generate_boundary_instance(family, truth, size, seed)?
            } else {
                generate_instance(family, truth, size, seed)?
            };
            let out = match family {
                InstanceFamily::OneToOne => {
                    let params = sd_params(SdParams::one_to_one(), &config.overrides);
                    solve_sd_one_to_one(&inst, theory, seed, &params, &opts)?
                }
                InstanceFamily::ManyToOne => {
                    let params = sd_params(SdParams::general(), &config.overrides);
                    solve_sd_general(&inst, theory, seed, &params, &opts)?
                }
            };
            Ok(TrialOutput {
                verdict: out.verdict.to_string(),
                success: out.verdict == truth,
                queries: out.queries,
                batches: out.batches_used,
                metrics: vec![],
            })
        }
        ExperimentKind::Collision => {
            let truth = if index % 2 == 0 {
                CollisionVerdict::OneToOne
            } else {
                CollisionVerdict::TwoToOne
            };
            let inst = generate_collision(truth, size, seed)?;
            let mut params = CollisionParams::default();
            if let Some(b) = config.overrides.batches {
                params.batches = b;
            }
            params.attempts = config.overrides.attempts.or(params.attempts);
            let out = distinguish_collision(&inst, theory, seed, &params, &opts)?;
            Ok(TrialOutput {
                verdict: out.verdict.to_string(),
                success: out.verdict == truth,
                queries: out.queries,
                batches: out.batches_used,
                metrics: vec![],
            })
        }
        ExperimentKind::Gi => {
            let iso = index % 2 == 0;
            let pair = random_graph_pair(size, iso, seed)?;
            let inst = gi_to_sd(&pair, config.lambda())?;
            let params = sd_params(SdParams::general(), &config.overrides);
            let out = solve_sd_general(&inst, theory, seed, &params, &opts)?;
            Ok(TrialOutput {
                verdict: out.verdict.to_string(),
                success: out.verdict == inst.truth,
                queries: out.queries,
                batches: out.batches_used,
                metrics: vec![("max_variation_distance_error", {
                    let tv = inst.variation_distance();
                    if iso {
                        tv
                    } else {
                        1.0 - tv
                    }
                })],
            })
        }
        ExperimentKind::Search | ExperimentKind::Scaling => {
            let inst = SearchInstance::random(size, seed)?;
            let mut params = SearchParams::default();
            if let Some(c) = config.overrides.c {
                params.c = c;
            }
            if let Some(a) = config.overrides.attempts {
                params.attempts_per_batch = a;
            }
            let out = dqp_search(&inst, theory, seed, &params, &opts)?;
            Ok(TrialOutput {
                verdict: if out.success { "found" } else { "missed" }.into(),
                success: out.success,
                queries: out.queries,
                batches: out.batches,
                metrics: vec![
                    ("grover_queries", out.grover_queries as f64),
                    ("juggle_queries", out.juggle_queries as f64),
                    ("verification_queries", out.verification_queries as f64),
                ],
            })
        }
    }
}

fn sd_params(mut params: SdParams, o: &Overrides) -> SdParams {
    if let Some(b) = o.batches {
        params.batches = b;
    }
    params.attempts = o.attempts.or(params.attempts);
    params
}

/// One random `(state, block unitary)` pair on `l` qubits.
fn axiom_trial(config: &ExperimentConfig, l: usize, seed: u64) -> Result<TrialOutput> {
    let mut rng = substream(seed, 0);
    let state = random_state::<f64, _>(l, &mut rng)?;
    let dim = 1usize << l;
    let u = random_block_unitary::<f64, _>(l, (dim / 2).max(1), &mut rng);
    let opts = config.sampler_options().kernel;
    let k = dense_kernel(config.theory, &state, &u, &opts)?;
    let after = u.apply(&state)?;
    let residual = check_marginalization(&k, &state, &after)?;
    let violations = check_indifference(&k, &u).len();
    let robustness = probe_robustness(
        config.theory,
        &state,
        &u,
        1e-6,
        1,
        substream_seed(seed, 1),
        &opts,
    )?;
    let tol = config
        .overrides
        .marginalization_tol
        .unwrap_or(MARGINALIZATION_TOL);
    let success = residual <= tol && (violations == 0 || !config.theory.is_indifferent());
    Ok(TrialOutput {
        verdict: if success { "pass" } else { "fail" }.into(),
        success,
        queries: 0,
        batches: 0,
        metrics: vec![
            ("max_marginalization_residual", residual),
            ("max_row_defect", row_stochasticity_defect(&k)),
            ("indifference_violations", violations as f64),
            ("max_robustness_ratio", robustness.ratio().unwrap_or(0.0)),
        ],
    })
}

/// One juggle history on `l` qubits from a random pair with `2 l^2`
/// attempts (or the override). Success means both values were seen.
fn juggle_trial(
    config: &ExperimentConfig,
    l: usize,
    seed: u64,
    opts: &SamplerOptions,
) -> Result<TrialOutput> {
    let mut rng = substream(seed, 0);
    let a = rng.random_range(0..1u64 << l);
    let b = loop {
        let b = rng.random_range(0..1u64 << l);
        if b != a {
            break b;
        }
    };
    let register = Register::range(0, l);
    let attempts = config.overrides.attempts.unwrap_or(2 * l * l);
    let plan = JugglePlan::random(register.clone(), attempts, &mut rng)?;
    let program = build_with_plan(l, prepare_pair(l, a, b, rng.random_bool(0.5))?, &plan)?;
    let queries = program.query_count();
    let history = sample_history(
        &HistoryQuery::new(program, config.theory, substream_seed(seed, 1)),
        opts,
    )?;
    let seen: Vec<u64> = history
        .checkpoint_values()
        .iter()
        .map(|(_, v)| register.extract(v.0))
        .collect();
    let (mut flips, mut chances) = (0, 0);
    for (k, &choice) in plan.choices().iter().enumerate() {
        let bit = register.qubits()[choice];
        if (a ^ b) >> bit & 1 == 1 {
            chances += 1;
            flips += (seen[k] != seen[k + 1]) as usize;
        }
    }
    let learned = seen.contains(&a) && seen.contains(&b);
    Ok(TrialOutput {
        verdict: if learned { "learned" } else { "missed" }.into(),
        success: learned,
        queries,
        batches: 1,
        metrics: vec![
            ("flip_count", flips as f64),
            ("differing_attempt_count", chances as f64),
        ],
    })
}

/// CSV of `records` with the fixed header, in record order.
pub fn records_to_csv(records: &[TrialRecord]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    if records.is_empty() {
        w.write_record([
            "experiment",
            "size",
            "seed",
            "verdict",
            "success",
            "queries",
            "batches",
            "ms",
        ])?;
    }
    for r in records {
        w.serialize(r)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn summary_to_json(summary: &Summary) -> Result<String> {
    Ok(serde_json::to_string_pretty(summary)? + "\n")
}

/// Writes `<experiment>.csv` and `<experiment>.json` under `dir` and
/// returns their paths.
pub fn emit_results(
    records: &[TrialRecord],
    summary: &Summary,
    dir: &Path,
) -> Result<(PathBuf, PathBuf)> {
    fs::create_dir_all(dir)?;
    let csv_path = dir.join(format!("{}.csv", summary.experiment));
    let json_path = dir.join(format!("{}.json", summary.experiment));
    fs::write(&csv_path, records_to_csv(records)?)?;
    fs::write(&json_path, summary_to_json(summary)?)?;
    Ok((csv_path, json_path))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fit_recovers_a_line() {
        let f = least_squares(&[(0.0, 1.0), (1.0, 3.0), (2.0, 5.0)]).unwrap();
        assert!((f.slope - 2.0).abs() < 1e-12 && (f.intercept - 1.0).abs() < 1e-12);
        assert!((f.r2 - 1.0).abs() < 1e-12);
        // (0,0), (1,1), (2,1): slope 1/2, intercept 1/6, r2 3/4
        let g = least_squares(&[(0.0, 0.0), (1.0, 1.0), (2.0, 1.0)]).unwrap();
        assert!((g.slope - 0.5).abs() < 1e-12);
        assert!((g.intercept - 1.0 / 6.0).abs() < 1e-12);
        assert!((g.r2 - 0.75).abs() < 1e-12);
        assert!(least_squares(&[(1.0, 1.0)]).is_none());
    }

    #[test]
    fn config_file_round_trip() {
        let text = "# comment\nexperiment = search\ntheory = sinkhorn\nsizes = 3, 6\ntrials = 7\nseed = 9\nc = 2\n";
        let c = ExperimentConfig::parse(text, None).unwrap();
        assert_eq!(c.experiment, ExperimentKind::Search);
        assert_eq!(c.theory, TheoryKind::Sinkhorn);
        assert_eq!(c.sizes, vec![3, 6]);
        assert_eq!((c.trials, c.seed, c.overrides.c), (7, 9, Some(2)));
        assert!(ExperimentConfig::parse("bogus = 1", Some(ExperimentKind::Sd)).is_err());
        assert!(ExperimentConfig::parse("trials = 1", None).is_err());
    }

    #[test]
    fn caps_are_enforced() {
        let mut c = ExperimentConfig::new(ExperimentKind::Search);
        c.sizes = vec![4];
        assert!(c.validate().is_err());
        c.sizes = vec![3];
        c.trials = 0;
        assert!(c.validate().is_err());
        let mut g = ExperimentConfig::new(ExperimentKind::Gi);
        g.sizes = vec![5];
        assert!(g.validate().is_err());
    }

    #[test]
    fn empty_csv_is_header_only() {
        assert_eq!(
            records_to_csv(&[]).unwrap(),
            "experiment,size,seed,verdict,success,queries,batches,ms\n"
        );
    }
}
