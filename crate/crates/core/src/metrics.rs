//! Output SINR, update-rate bookkeeping and arithmetic-complexity counts.

use std::fmt;
use std::str::FromStr;

use crate::array_model::{self, Scenario};
use crate::error::{Error, Result};
use crate::linalg::{inner, ComplexVector, HermitianMatrix};

/// Returned when the desired-signal output power is zero.
pub const SINR_FLOOR_DB: f64 = -200.0;

fn ratio_db(signal: f64, interference: f64) -> f64 {
    if signal <= 0.0 {
        return SINR_FLOOR_DB;
    }
    let db = 10.0 * (signal / interference).log10();
    db.max(SINR_FLOOR_DB)
}

/// `10 log₁₀(wᴴR_s w / wᴴR_{i+n} w)` with the exact covariances of the epoch
/// containing snapshot `i`.
pub fn output_sinr(w: &ComplexVector, scenario: &Scenario, i: usize) -> Result<f64> {
    let rs = array_model::desired_covariance(scenario, i)?;
    let rin = array_model::interference_covariance(scenario, i)?;
    Ok(ratio_db(rs.quad_form(w), rin.quad_form(w)))
}

/// Per-epoch cache of the interference-plus-noise covariance.
#[derive(Debug, Clone)]
pub struct SinrEvaluator<'a> {
    scenario: &'a Scenario,
    interference: Vec<HermitianMatrix>,
}

impl<'a> SinrEvaluator<'a> {
    pub fn new(scenario: &'a Scenario) -> Result<Self> {
        let interference = scenario
            .epochs()
            .iter()
            .map(|e| array_model::interference_covariance(scenario, e.start()))
            .collect::<Result<Vec<_>>>()?;
        Ok(SinrEvaluator {
            scenario,
            interference,
        })
    }

    /// Linear SINR at snapshot `i`.
    pub fn linear(&self, w: &ComplexVector, i: usize) -> Result<f64> {
        let k = self.scenario.epoch_index(i)?;
        let signal = self.scenario.desired_power() * inner(w, self.scenario.desired_steering()).norm_sqr();
        let noise = self.interference[k].quad_form(w);
        Ok(signal / noise)
    }

    pub fn db(&self, w: &ComplexVector, i: usize) -> Result<f64> {
        let k = self.scenario.epoch_index(i)?;
        let signal = self.scenario.desired_power() * inner(w, self.scenario.desired_steering()).norm_sqr();
        Ok(ratio_db(signal, self.interference[k].quad_form(w)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRecord {
    pub index: usize,
    pub sinr_db: f64,
    pub output_power: f64,
    pub delta: f64,
    pub lambda1: Option<f64>,
    pub updated: bool,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunTrace {
    pub records: Vec<TraceRecord>,
}

impl RunTrace {
    pub fn with_capacity(n: usize) -> Self {
        RunTrace {
            records: Vec::with_capacity(n),
        }
    }

    pub fn push(&mut self, record: TraceRecord) {
        self.records.push(record);
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn update_count(&self) -> usize {
        self.records.iter().filter(|r| r.updated).count()
    }

    pub fn final_sinr_db(&self) -> Option<f64> {
        self.records.last().map(|r| r.sinr_db)
    }
}

/// Fraction of snapshots that triggered an update; 0 for an empty trace.
pub fn update_rate(trace: &RunTrace) -> f64 {
    if trace.is_empty() {
        0.0
    } else {
        trace.update_count() as f64 / trace.len() as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ComplexityAlgorithm {
    Sg,
    SmSg,
    Rls,
    SmRls,
    SmAp,
    Cg,
    DsCg,
    SmCg,
}

impl ComplexityAlgorithm {
    pub const ALL: [ComplexityAlgorithm; 8] = [
        ComplexityAlgorithm::Sg,
        ComplexityAlgorithm::SmSg,
        ComplexityAlgorithm::Rls,
        ComplexityAlgorithm::SmRls,
        ComplexityAlgorithm::SmAp,
        ComplexityAlgorithm::Cg,
        ComplexityAlgorithm::DsCg,
        ComplexityAlgorithm::SmCg,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ComplexityAlgorithm::Sg => "SG",
            ComplexityAlgorithm::SmSg => "SM-SG",
            ComplexityAlgorithm::Rls => "RLS",
            ComplexityAlgorithm::SmRls => "SM-RLS",
            ComplexityAlgorithm::SmAp => "SM-AP",
            ComplexityAlgorithm::Cg => "CG",
            ComplexityAlgorithm::DsCg => "DS-CG",
            ComplexityAlgorithm::SmCg => "SM-CG",
        }
    }

    /// Whether the row depends on the update rate.
    pub fn is_data_selective(&self) -> bool {
        !matches!(self, ComplexityAlgorithm::Sg | ComplexityAlgorithm::Rls | ComplexityAlgorithm::Cg)
    }
}

impl fmt::Display for ComplexityAlgorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ComplexityAlgorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_uppercase().replace('_', "-");
        ComplexityAlgorithm::ALL
            .into_iter()
            .find(|a| a.name() == key)
            .ok_or_else(|| Error::UnknownAlgorithm(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexityParams {
    pub m: u64,
    pub n: u64,
    pub tau: f64,
    pub l: u64,
}

impl ComplexityParams {
    pub fn new(m: u64, n: u64, tau: f64, l: u64) -> Result<Self> {
        if m == 0 || n == 0 || l == 0 {
            return Err(Error::invalid("complexity", "m, N and L must be positive"));
        }
        if !(tau > 0.0 && tau <= 1.0) {
            return Err(Error::invalid("tau", format!("{tau} outside (0, 1]")));
        }
        Ok(ComplexityParams { m, n, tau, l })
    }

    /// Number of updating snapshots, `round(τN)`.
    pub fn updates(&self) -> u64 {
        (self.tau * self.n as f64).round() as u64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OperationCount {
    pub additions: u64,
    pub multiplications: u64,
}

/// Complex additions and multiplications for `N` snapshots. The update-rate
/// terms are evaluated with `round(τN)` updates so counts stay integral.
pub fn complexity_counts(algorithm: ComplexityAlgorithm, p: &ComplexityParams) -> OperationCount {
    let (m, n, l, u) = (p.m, p.n, p.l, p.updates());
    let m2 = m * m;
    let (additions, multiplications) = match algorithm {
        ComplexityAlgorithm::Sg => (n * (3 * m - 1), n * (4 * m + 1)),
        ComplexityAlgorithm::SmSg => (2 * n * m + 3 * u * m, n * (2 * m + 5) + u * (4 * m + 3)),
        ComplexityAlgorithm::Rls => (n * (4 * m2 - m - 1), n * (5 * m2 + 5 * m - 1)),
        ComplexityAlgorithm::SmRls => (
            2 * n * m + u * (4 * m2 - 1),
            n * (2 * m + 5) + u * (5 * m2 + 6 * m + 2),
        ),
        ComplexityAlgorithm::SmAp => (
            n * (2 * m + 1) + u * ((m - 1) * l * l + m * l + 1),
            n * (2 * m + 5) + u * (l * l * l + m * l * l + (m + 1) * l + m + 2),
        ),
        ComplexityAlgorithm::Cg => (n * (2 * m2 + 7 * m + 1), n * (2 * m2 + 11 * m + 5)),
        ComplexityAlgorithm::DsCg => (
            u * (2 * m2 + 8 * m - 2) + l * n * (m - 1),
            u * (2 * m2 + 9 * m + 3) + l * n * m,
        ),
        ComplexityAlgorithm::SmCg => (
            2 * n * m + u * (2 * m2 + 8 * m + 6),
            n * (2 * m + 5) + u * (2 * m2 + 9 * m + 22),
        ),
    };
    OperationCount {
        additions,
        multiplications,
    }
}
