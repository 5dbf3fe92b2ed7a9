//! Seeded Monte-Carlo execution.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::config::{AlgorithmSpec, ExperimentConfig};
use crate::array_model::{self, Scenario, Snapshot};
use crate::baselines::{mvdr_weights, BaselineState, ConstrainedCg, ConstrainedRls, FrostSg};
use crate::bounds::BoundPolicy;
use crate::error::{Error, Result};
use crate::linalg::{self, inner, ComplexVector};
use crate::metrics::{self, ComplexityAlgorithm, ComplexityParams, OperationCount, RunTrace, SinrEvaluator, TraceRecord};
use crate::smcg::{Lambda1Clamp, SmCgState};

/// A configured beamformer driven one snapshot at a time.
#[derive(Debug, Clone)]
pub enum Beamformer {
    SmCg {
        state: SmCgState,
        bound: BoundPolicy,
        noise_power: f64,
    },
    Baseline(BaselineState),
    /// Exact MVDR weights of each epoch.
    Mvdr {
        per_epoch: Vec<ComplexVector>,
        current: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepOutcome {
    pub y: Complex64,
    pub delta: f64,
    pub updated: bool,
    pub lambda1: Option<f64>,
    pub degenerate: bool,
}

impl Beamformer {
    pub fn build(spec: &AlgorithmSpec, scenario: &Scenario) -> Result<Self> {
        let a0 = scenario.desired_steering();
        let gamma = scenario.gamma();
        Ok(match spec {
            AlgorithmSpec::SmCg {
                eta,
                lambda_min,
                lambda_max,
                r_hat_init,
                bound,
                ..
            } => {
                let clamp = Lambda1Clamp::new(*lambda_min, *lambda_max)?;
                let state = SmCgState::initialize(a0, gamma, *eta, clamp, *r_hat_init)?;
                let bound = bound.build(state.weights(), scenario.noise_power())?;
                Beamformer::SmCg {
                    state,
                    bound,
                    noise_power: scenario.noise_power(),
                }
            }
            AlgorithmSpec::FrostSg { step, normalized, .. } => {
                Beamformer::Baseline(BaselineState::FrostSg(FrostSg::new(a0, gamma, *step, *normalized)?))
            }
            AlgorithmSpec::Rls {
                forgetting,
                init_loading,
                ..
            } => Beamformer::Baseline(BaselineState::Rls(ConstrainedRls::new(
                a0,
                gamma,
                *forgetting,
                *init_loading,
            )?)),
            AlgorithmSpec::Cg {
                eta,
                forgetting,
                r_hat_init,
                ..
            } => Beamformer::Baseline(BaselineState::Cg(ConstrainedCg::new(
                a0,
                gamma,
                *eta,
                *forgetting,
                *r_hat_init,
            )?)),
            AlgorithmSpec::Mvdr { .. } => {
                let per_epoch = scenario
                    .epochs()
                    .iter()
                    .map(|e| mvdr_weights(&array_model::total_covariance(scenario, e.start())?, a0, gamma))
                    .collect::<Result<Vec<_>>>()?;
                Beamformer::Mvdr { per_epoch, current: 0 }
            }
        })
    }

    pub fn weights(&self) -> &ComplexVector {
        match self {
            Beamformer::SmCg { state, .. } => state.weights(),
            Beamformer::Baseline(b) => b.weights(),
            Beamformer::Mvdr { per_epoch, current } => &per_epoch[*current],
        }
    }

    pub fn process(&mut self, scenario: &Scenario, snapshot: &Snapshot) -> Result<StepOutcome> {
        let r = &snapshot.r;
        match self {
            Beamformer::SmCg {
                state,
                bound,
                noise_power,
            } => {
                let y = state.output(r)?;
                let delta = bound.refresh(state.steering(), r, y, state.weights(), *noise_power)?;
                let res = state.step(r, delta)?;
                Ok(StepOutcome {
                    y: res.y,
                    delta,
                    updated: res.updated,
                    lambda1: res.lambda1,
                    degenerate: res.degenerate,
                })
            }
            Beamformer::Baseline(b) => {
                let y = b.step(r)?;
                Ok(StepOutcome {
                    y,
                    delta: 0.0,
                    updated: true,
                    lambda1: None,
                    degenerate: false,
                })
            }
            Beamformer::Mvdr { per_epoch, current } => {
                *current = scenario.epoch_index(snapshot.index)?;
                Ok(StepOutcome {
                    y: inner(&per_epoch[*current], r),
                    delta: 0.0,
                    updated: false,
                    lambda1: None,
                    degenerate: false,
                })
            }
        }
    }
}

/// One algorithm over one run.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgorithmRun {
    pub trace: RunTrace,
    /// Largest `|wᴴa₀ − γ|` over all snapshots.
    pub max_constraint_error: f64,
    pub degenerate_updates: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub run: usize,
    pub seed: u64,
    pub interferer_doas: Vec<f64>,
    /// One entry per configured algorithm, in configuration order.
    pub algorithms: Vec<std::result::Result<AlgorithmRun, String>>,
}

/// Simulates run `k` of `config` at the configured SNR. All algorithms see the
/// same snapshots. A failing algorithm is stopped and reported; the others
/// continue.
pub fn run_single(config: &ExperimentConfig, k: usize) -> Result<RunOutput> {
    let seed = config.run_seed(k);
    let scenario = config.scenario.build(seed)?;
    let evaluator = SinrEvaluator::new(&scenario)?;
    let n = scenario.total_snapshots();
    let a0 = scenario.desired_steering().clone();
    let gamma = scenario.gamma();

    struct Slot {
        beamformer: Beamformer,
        run: AlgorithmRun,
        failure: Option<String>,
    }

    let mut slots = Vec::with_capacity(config.algorithms.len());
    for spec in &config.algorithms {
        let beamformer = Beamformer::build(spec, &scenario)?;
        slots.push(Slot {
            beamformer,
            run: AlgorithmRun {
                trace: RunTrace::with_capacity(n),
                max_constraint_error: 0.0,
                degenerate_updates: 0,
            },
            failure: None,
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 1..=n {
        let snapshot = array_model::generate_snapshot(&scenario, i, &mut rng)?;
        for slot in slots.iter_mut().filter(|s| s.failure.is_none()) {
            match record_step(&mut slot.beamformer, &scenario, &evaluator, &snapshot, &a0, gamma) {
                Ok((record, constraint_error, degenerate)) => {
                    slot.run.trace.push(record);
                    slot.run.max_constraint_error = slot.run.max_constraint_error.max(constraint_error);
                    slot.run.degenerate_updates += degenerate as usize;
                }
                Err(e) => slot.failure = Some(format!("snapshot {i}: {e}")),
            }
        }
    }

    Ok(RunOutput {
        run: k,
        seed,
        interferer_doas: config.scenario.draw_interferer_doas(seed),
        algorithms: slots
            .into_iter()
            .map(|s| match s.failure {
                Some(msg) => Err(msg),
                None => Ok(s.run),
            })
            .collect(),
    })
}

fn record_step(
    beamformer: &mut Beamformer,
    scenario: &Scenario,
    evaluator: &SinrEvaluator<'_>,
    snapshot: &Snapshot,
    a0: &ComplexVector,
    gamma: f64,
) -> Result<(TraceRecord, f64, bool)> {
    let out = beamformer.process(scenario, snapshot)?;
    let w = beamformer.weights();
    if !linalg::is_finite(w) || !out.delta.is_finite() || !out.y.re.is_finite() || !out.y.im.is_finite() {
        return Err(Error::NonFinite("beamformer output".into()));
    }
    let sinr_db = evaluator.db(w, snapshot.index)?;
    if !sinr_db.is_finite() {
        return Err(Error::NonFinite("output SINR".into()));
    }
    let constraint_error = (inner(w, a0) - Complex64::new(gamma, 0.0)).norm();
    Ok((
        TraceRecord {
            index: snapshot.index,
            sinr_db,
            output_power: out.y.norm_sqr(),
            delta: out.delta,
            lambda1: out.lambda1,
            updated: out.updated,
        },
        constraint_error,
        out.degenerate,
    ))
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunFailure {
    pub run: usize,
    pub algorithm: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlgorithmAggregate {
    pub label: String,
    /// Per snapshot, SINR averaged in linear power across runs.
    pub mean_sinr_db: Vec<f64>,
    pub mean_delta: Vec<f64>,
    /// Per snapshot, mean over runs of the update fraction so far.
    pub update_rate_cum: Vec<f64>,
    pub run_update_rates: Vec<f64>,
    pub mean_update_rate: f64,
    pub max_constraint_error: f64,
    pub degenerate_updates: usize,
    pub successful_runs: usize,
    /// Arithmetic cost at the measured update rate, where a cost model exists.
    pub complexity: Option<OperationCount>,
}

impl AlgorithmAggregate {
    /// Mean of the linear SINR over snapshots `from..=to` (1-based), in dB.
    pub fn window_sinr_db(&self, from: usize, to: usize) -> f64 {
        let slice = &self.mean_sinr_db[from - 1..to];
        let lin: f64 = slice.iter().map(|db| 10f64.powf(db / 10.0)).sum::<f64>() / slice.len() as f64;
        10.0 * lin.log10()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AggregateResult {
    pub name: String,
    pub config_hash: String,
    pub master_seed: u64,
    pub runs: usize,
    pub snapshots: usize,
    pub snr_db: f64,
    pub algorithms: Vec<AlgorithmAggregate>,
    pub failures: Vec<RunFailure>,
}

impl AggregateResult {
    pub fn algorithm(&self, label: &str) -> Option<&AlgorithmAggregate> {
        self.algorithms.iter().find(|a| a.label == label)
    }
}

fn complexity_tag(spec: &AlgorithmSpec) -> Option<ComplexityAlgorithm> {
    match spec {
        AlgorithmSpec::SmCg { .. } => Some(ComplexityAlgorithm::SmCg),
        AlgorithmSpec::FrostSg { .. } => Some(ComplexityAlgorithm::Sg),
        AlgorithmSpec::Rls { .. } => Some(ComplexityAlgorithm::Rls),
        AlgorithmSpec::Cg { .. } => Some(ComplexityAlgorithm::Cg),
        AlgorithmSpec::Mvdr { .. } => None,
    }
}

/// Runs every Monte-Carlo trial (in parallel) and aggregates in run order.
pub fn run_experiment(config: &ExperimentConfig) -> Result<AggregateResult> {
    config.validate()?;
    let outputs = (0..config.runs)
        .into_par_iter()
        .map(|k| run_single(config, k))
        .collect::<Vec<_>>()
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    aggregate(config, &outputs)
}

/// Aggregates run outputs; the result does not depend on the order of `outputs`.
pub fn aggregate(config: &ExperimentConfig, outputs: &[RunOutput]) -> Result<AggregateResult> {
    let mut sorted: Vec<&RunOutput> = outputs.iter().collect();
    sorted.sort_by_key(|o| o.run);
    let n = config.scenario.snapshots;
    let mut failures = Vec::new();
    let mut algorithms = Vec::with_capacity(config.algorithms.len());

    for (a, spec) in config.algorithms.iter().enumerate() {
        let mut sinr = vec![0.0; n];
        let mut delta = vec![0.0; n];
        let mut rate_cum = vec![0.0; n];
        let mut run_rates = Vec::new();
        let mut max_err = 0.0f64;
        let mut degenerate = 0;
        for out in &sorted {
            match &out.algorithms[a] {
                Ok(run) => {
                    let mut updates = 0usize;
                    for (i, rec) in run.trace.records.iter().enumerate() {
                        sinr[i] += 10f64.powf(rec.sinr_db / 10.0);
                        delta[i] += rec.delta;
                        updates += rec.updated as usize;
                        rate_cum[i] += updates as f64 / (i + 1) as f64;
                    }
                    run_rates.push(metrics::update_rate(&run.trace));
                    max_err = max_err.max(run.max_constraint_error);
                    degenerate += run.degenerate_updates;
                }
                Err(msg) => failures.push(RunFailure {
                    run: out.run,
                    algorithm: spec.label().to_string(),
                    message: msg.clone(),
                }),
            }
        }
        let ok = run_rates.len();
        let scale = 1.0 / ok as f64;
        let mean_update_rate = run_rates.iter().sum::<f64>() * scale;
        let complexity = match complexity_tag(spec) {
            Some(tag) if ok > 0 => {
                let tau = if tag.is_data_selective() { mean_update_rate.max(1.0 / n as f64) } else { 1.0 };
                Some(metrics::complexity_counts(
                    tag,
                    &ComplexityParams::new(config.scenario.sensors as u64, n as u64, tau.min(1.0), 3)?,
                ))
            }
            _ => None,
        };
        algorithms.push(AlgorithmAggregate {
            label: spec.label().to_string(),
            mean_sinr_db: sinr.iter().map(|s| 10.0 * (s * scale).log10()).collect(),
            mean_delta: delta.iter().map(|d| d * scale).collect(),
            update_rate_cum: rate_cum.iter().map(|r| r * scale).collect(),
            run_update_rates: run_rates,
            mean_update_rate,
            max_constraint_error: max_err,
            degenerate_updates: degenerate,
            successful_runs: ok,
            complexity,
        });
    }

    Ok(AggregateResult {
        name: config.name.clone(),
        config_hash: config.hash()?,
        master_seed: config.master_seed,
        runs: config.runs,
        snapshots: n,
        snr_db: config.scenario.snr_db,
        algorithms,
        failures,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub snr_db: f64,
    pub result: AggregateResult,
}

/// Runs the experiment once per SNR listed in `config.sweep`.
pub fn run_sweep(config: &ExperimentConfig) -> Result<Vec<SweepPoint>> {
    config.validate()?;
    let sweep = config
        .sweep
        .as_ref()
        .ok_or_else(|| Error::Config(format!("`{}` has no sweep section", config.name)))?;
    sweep
        .snr_db
        .iter()
        .map(|&snr| {
            let mut point = config.clone();
            point.scenario.snr_db = snr;
            point.sweep = None;
            Ok(SweepPoint {
                snr_db: snr,
                result: run_experiment(&point)?,
            })
        })
        .collect()
}
