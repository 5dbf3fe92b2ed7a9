//! Experiment configuration, stored as TOML.
//!
//! Any key can be overridden with a dotted path, e.g.
//! `scenario.snr_db=5` or `algorithms.0.bound.varsigma=19`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::array_model::{ArrayGeometry, Scenario, Source};
use crate::bounds::BoundPolicy;
use crate::error::{Error, Result};
use crate::linalg::ComplexVector;
use crate::smcg::Lambda1Clamp;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    #[serde(default = "default_runs")]
    pub runs: usize,
    #[serde(default)]
    pub master_seed: u64,
    pub scenario: ScenarioSpec,
    pub algorithms: Vec<AlgorithmSpec>,
    /// Repeats the experiment for each listed SNR.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSpec>,
}

fn default_runs() -> usize {
    50
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub snr_db: Vec<f64>,
    /// Fraction of trailing snapshots averaged into the per-point SINR.
    #[serde(default = "default_tail")]
    pub tail_fraction: f64,
}

fn default_tail() -> f64 {
    0.1
}

/// Array and source layout. Powers are relative to a unit-power desired
/// user: `σ² = 10^(−SNR/10)` and each interferer has power `σ²·10^(INR/10)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSpec {
    pub sensors: usize,
    #[serde(default = "default_spacing")]
    pub spacing: f64,
    #[serde(default = "default_gamma")]
    pub gamma: f64,
    pub snr_db: f64,
    pub inr_db: f64,
    /// Users at the start, the desired one included.
    pub users: usize,
    pub snapshots: usize,
    #[serde(default = "default_desired_doa")]
    pub desired_doa: f64,
    #[serde(default)]
    pub interferer_doas: DoaPolicy,
    /// Interferers that join mid-run.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub arrivals: Vec<Arrival>,
}

fn default_spacing() -> f64 {
    0.5
}

fn default_gamma() -> f64 {
    1.0
}

fn default_desired_doa() -> f64 {
    90.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Arrival {
    pub at: usize,
    pub interferers: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "policy", rename_all = "kebab-case", deny_unknown_fields)]
pub enum DoaPolicy {
    /// Uniform in `[min, max]`, rejecting angles within `guard` of the desired DOA.
    Random { min: f64, max: f64, guard: f64 },
    /// Explicit interferer DOAs, consumed in arrival order.
    Fixed { doas: Vec<f64> },
}

impl Default for DoaPolicy {
    fn default() -> Self {
        DoaPolicy::Random {
            min: 20.0,
            max: 160.0,
            guard: 5.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum AlgorithmSpec {
    SmCg {
        label: String,
        #[serde(default = "default_eta")]
        eta: f64,
        #[serde(default = "default_lambda_min")]
        lambda_min: f64,
        #[serde(default = "default_lambda_max")]
        lambda_max: f64,
        #[serde(default = "default_loading")]
        r_hat_init: f64,
        bound: BoundSpec,
    },
    FrostSg {
        label: String,
        #[serde(default = "default_sg_step")]
        step: f64,
        #[serde(default = "default_true")]
        normalized: bool,
    },
    Rls {
        label: String,
        #[serde(default = "default_forgetting")]
        forgetting: f64,
        #[serde(default = "default_loading")]
        init_loading: f64,
    },
    Cg {
        label: String,
        #[serde(default = "default_eta")]
        eta: f64,
        #[serde(default = "default_forgetting")]
        forgetting: f64,
        #[serde(default = "default_loading")]
        r_hat_init: f64,
    },
    Mvdr {
        label: String,
    },
}

fn default_eta() -> f64 {
    0.5
}
fn default_lambda_min() -> f64 {
    0.1
}
fn default_lambda_max() -> f64 {
    0.999
}
fn default_loading() -> f64 {
    1e-2
}
fn default_sg_step() -> f64 {
    0.005
}
fn default_true() -> bool {
    true
}
fn default_forgetting() -> f64 {
    0.998
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum BoundSpec {
    Fixed { delta: f64 },
    /// `δ = √(factor · σ²)`.
    NoiseScaled { factor: f64 },
    Pdb { rho: f64, varsigma: f64 },
    Pidb { varrho: f64, varsigma: f64, epsilon: f64 },
}

impl BoundSpec {
    pub fn build(&self, w0: &ComplexVector, noise_power: f64) -> Result<BoundPolicy> {
        match *self {
            BoundSpec::Fixed { delta } => BoundPolicy::fixed(delta),
            BoundSpec::NoiseScaled { factor } => {
                if factor.is_nan() || factor < 0.0 {
                    return Err(Error::invalid("bound.factor", "must be non-negative"));
                }
                BoundPolicy::fixed((factor * noise_power).sqrt())
            }
            BoundSpec::Pdb { rho, varsigma } => BoundPolicy::pdb(rho, varsigma, w0, noise_power),
            BoundSpec::Pidb {
                varrho,
                varsigma,
                epsilon,
            } => BoundPolicy::pidb(varrho, varsigma, epsilon, w0, noise_power),
        }
    }
}

impl AlgorithmSpec {
    pub fn label(&self) -> &str {
        match self {
            AlgorithmSpec::SmCg { label, .. }
            | AlgorithmSpec::FrostSg { label, .. }
            | AlgorithmSpec::Rls { label, .. }
            | AlgorithmSpec::Cg { label, .. }
            | AlgorithmSpec::Mvdr { label } => label,
        }
    }

    fn validate(&self, index: usize) -> Result<()> {
        let field = |name: &str| format!("algorithms.{index}.{name}");
        if self.label().is_empty() || self.label().contains(',') {
            return Err(Error::invalid(field("label"), "must be non-empty and comma-free"));
        }
        match self {
            AlgorithmSpec::SmCg {
                eta,
                lambda_min,
                lambda_max,
                r_hat_init,
                bound,
                ..
            } => {
                check_unit(&field("eta"), *eta)?;
                Lambda1Clamp::new(*lambda_min, *lambda_max)
                    .map_err(|e| Error::invalid(field("lambda_min"), e.to_string()))?;
                check_positive(&field("r_hat_init"), *r_hat_init)?;
                let probe = ComplexVector::from_element(1, crate::Complex64::new(1.0, 0.0));
                bound
                    .build(&probe, 1.0)
                    .map_err(|e| Error::invalid(field("bound"), e.to_string()))?;
            }
            AlgorithmSpec::FrostSg { step, .. } => {
                if !(*step >= 0.0 && step.is_finite()) {
                    return Err(Error::invalid(field("step"), "must be non-negative"));
                }
            }
            AlgorithmSpec::Rls {
                forgetting,
                init_loading,
                ..
            } => {
                check_forgetting(&field("forgetting"), *forgetting)?;
                check_positive(&field("init_loading"), *init_loading)?;
            }
            AlgorithmSpec::Cg {
                eta,
                forgetting,
                r_hat_init,
                ..
            } => {
                check_unit(&field("eta"), *eta)?;
                check_forgetting(&field("forgetting"), *forgetting)?;
                check_positive(&field("r_hat_init"), *r_hat_init)?;
            }
            AlgorithmSpec::Mvdr { .. } => {}
        }
        Ok(())
    }
}

fn check_unit(field: &str, x: f64) -> Result<()> {
    if (0.0..=1.0).contains(&x) {
        Ok(())
    } else {
        Err(Error::invalid(field, format!("{x} outside [0, 1]")))
    }
}

fn check_forgetting(field: &str, x: f64) -> Result<()> {
    if x > 0.0 && x <= 1.0 {
        Ok(())
    } else {
        Err(Error::invalid(field, format!("{x} outside (0, 1]")))
    }
}

fn check_positive(field: &str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(field, format!("{x} must be positive")))
    }
}

impl ScenarioSpec {
    pub fn noise_power(&self) -> f64 {
        10f64.powf(-self.snr_db / 10.0)
    }

    pub fn interferer_power(&self) -> f64 {
        self.noise_power() * 10f64.powf(self.inr_db / 10.0)
    }

    fn total_interferers(&self) -> usize {
        self.users.saturating_sub(1) + self.arrivals.iter().map(|a| a.interferers).sum::<usize>()
    }

    fn validate(&self) -> Result<()> {
        if self.sensors == 0 {
            return Err(Error::invalid("scenario.sensors", "must be at least 1"));
        }
        if self.snapshots == 0 {
            return Err(Error::invalid("scenario.snapshots", "must be at least 1"));
        }
        if self.users == 0 {
            return Err(Error::invalid("scenario.users", "the desired user is required"));
        }
        if !self.snr_db.is_finite() || !self.inr_db.is_finite() {
            return Err(Error::invalid("scenario.snr_db", "SNR and INR must be finite"));
        }
        if !(0.0..=180.0).contains(&self.desired_doa) {
            return Err(Error::invalid("scenario.desired_doa", "outside [0, 180]"));
        }
        let mut last = 1;
        for (k, a) in self.arrivals.iter().enumerate() {
            if a.at <= last || a.at > self.snapshots {
                return Err(Error::invalid(
                    format!("scenario.arrivals.{k}.at"),
                    "arrivals must be strictly increasing within (1, snapshots]",
                ));
            }
            last = a.at;
        }
        let peak = 1 + self.total_interferers();
        if peak > self.sensors {
            return Err(Error::invalid(
                "scenario.users",
                format!("{peak} users exceed {} sensors", self.sensors),
            ));
        }
        match &self.interferer_doas {
            DoaPolicy::Random { min, max, guard } => {
                if !(0.0 <= *min && min < max && *max <= 180.0 && *guard >= 0.0) {
                    return Err(Error::invalid("scenario.interferer_doas", "need 0 ≤ min < max ≤ 180, guard ≥ 0"));
                }
                let free = (max - min) - ((self.desired_doa + guard).min(*max) - (self.desired_doa - guard).max(*min)).max(0.0);
                if free <= 0.0 {
                    return Err(Error::invalid("scenario.interferer_doas", "guard covers the whole range"));
                }
            }
            DoaPolicy::Fixed { doas } => {
                if doas.len() < self.total_interferers() {
                    return Err(Error::invalid(
                        "scenario.interferer_doas.doas",
                        format!("{} listed, {} needed", doas.len(), self.total_interferers()),
                    ));
                }
                if doas.iter().any(|d| !(0.0..=180.0).contains(d)) {
                    return Err(Error::invalid("scenario.interferer_doas.doas", "outside [0, 180]"));
                }
            }
        }
        Ok(())
    }

    /// Interferer DOAs for a run, in arrival order.
    pub fn draw_interferer_doas(&self, run_seed: u64) -> Vec<f64> {
        let count = self.total_interferers();
        match &self.interferer_doas {
            DoaPolicy::Fixed { doas } => doas[..count].to_vec(),
            DoaPolicy::Random { min, max, guard } => {
                let mut rng = ChaCha8Rng::seed_from_u64(run_seed);
                rng.set_stream(1);
                let mut out = Vec::with_capacity(count);
                while out.len() < count {
                    let t = rng.random_range(*min..=*max);
                    if (t - self.desired_doa).abs() > *guard {
                        out.push(t);
                    }
                }
                out
            }
        }
    }

    /// The scenario for a run: geometry, epochs and powers.
    pub fn build(&self, run_seed: u64) -> Result<Scenario> {
        self.validate()?;
        let geometry = ArrayGeometry::new(self.sensors, self.spacing)?;
        let noise = self.noise_power();
        let p_int = self.interferer_power();
        let doas = self.draw_interferer_doas(run_seed);
        let mut sources = vec![Source::desired(self.desired_doa, 1.0)];
        let mut next = doas.iter();
        for _ in 1..self.users {
            sources.push(Source::interferer(*next.next().expect("validated"), p_int));
        }
        let mut epochs = vec![(1, sources.clone())];
        for a in &self.arrivals {
            for _ in 0..a.interferers {
                sources.push(Source::interferer(*next.next().expect("validated"), p_int));
            }
            epochs.push((a.at, sources.clone()));
        }
        Scenario::new(geometry, epochs, noise, self.snapshots, self.gamma)
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.name.is_empty() {
            return Err(Error::invalid("name", "must be non-empty"));
        }
        if self.runs == 0 {
            return Err(Error::invalid("runs", "must be at least 1"));
        }
        if self.algorithms.is_empty() {
            return Err(Error::invalid("algorithms", "at least one algorithm is required"));
        }
        self.scenario.validate()?;
        for (k, a) in self.algorithms.iter().enumerate() {
            a.validate(k)?;
            if self.algorithms[..k].iter().any(|b| b.label() == a.label()) {
                return Err(Error::invalid(format!("algorithms.{k}.label"), "duplicate label"));
            }
        }
        if let Some(s) = &self.sweep {
            if s.snr_db.is_empty() || s.snr_db.iter().any(|x| !x.is_finite()) {
                return Err(Error::invalid("sweep.snr_db", "need at least one finite SNR"));
            }
            if !(s.tail_fraction > 0.0 && s.tail_fraction <= 1.0) {
                return Err(Error::invalid("sweep.tail_fraction", "outside (0, 1]"));
            }
        }
        Ok(())
    }

    /// Seed of run `k`.
    pub fn run_seed(&self, k: usize) -> u64 {
        self.master_seed ^ k as u64
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    /// SHA-256 of the canonical TOML form, hex encoded.
    pub fn hash(&self) -> Result<String> {
        Ok(hex::encode(Sha256::digest(self.to_toml()?.as_bytes())))
    }

    /// Applies a `path=value` override. The value is parsed as a TOML literal
    /// and falls back to a bare string.
    pub fn set(&mut self, assignment: &str) -> Result<()> {
        let (path, raw) = assignment
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("override `{assignment}` is not key=value")))?;
        let value = parse_literal(raw.trim());
        let mut tree = toml::Value::try_from(&*self).map_err(|e| Error::Config(e.to_string()))?;
        let mut slot = &mut tree;
        for part in path.trim().split('.') {
            slot = match slot {
                toml::Value::Table(t) => t.entry(part.to_string()).or_insert(toml::Value::Boolean(false)),
                toml::Value::Array(a) => {
                    let idx: usize = part
                        .parse()
                        .map_err(|_| Error::Config(format!("`{part}` in `{path}` is not an index")))?;
                    let len = a.len();
                    a.get_mut(idx)
                        .ok_or_else(|| Error::Config(format!("index {idx} in `{path}` out of range ({len})")))?
                }
                _ => return Err(Error::Config(format!("`{path}` descends into a scalar"))),
            };
        }
        *slot = value;
        let updated: ExperimentConfig = tree
            .try_into()
            .map_err(|e: toml::de::Error| Error::Config(format!("`{path}`: {e}")))?;
        updated.validate()?;
        *self = updated;
        Ok(())
    }
}

fn parse_literal(raw: &str) -> toml::Value {
    toml::from_str::<toml::Table>(&format!("v = {raw}"))
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()))
}
