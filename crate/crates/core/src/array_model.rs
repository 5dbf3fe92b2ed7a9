//! Narrowband far-field signal model for a uniform linear array.
//!
//! A snapshot is `r = Σ_k √P_k s_k a(θ_k) + n`, with equiprobable BPSK symbols
//! `s_k` and circular complex Gaussian noise of per-element variance `σ_n²`.
//! Scenarios are split into epochs so that users can enter mid-run.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::{ComplexVector, HermitianMatrix};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArrayGeometry {
    num_sensors: usize,
    spacing: f64,
}

impl ArrayGeometry {
    /// `spacing` is the inter-element distance in wavelengths.
    pub fn new(num_sensors: usize, spacing: f64) -> Result<Self> {
        if num_sensors == 0 {
            return Err(Error::invalid("num_sensors", "must be at least 1"));
        }
        if !(spacing > 0.0 && spacing.is_finite()) {
            return Err(Error::invalid("element_spacing", "must be positive"));
        }
        Ok(ArrayGeometry {
            num_sensors,
            spacing,
        })
    }

    /// Half-wavelength spacing.
    pub fn half_wavelength(num_sensors: usize) -> Result<Self> {
        Self::new(num_sensors, 0.5)
    }

    pub fn num_sensors(&self) -> usize {
        self.num_sensors
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }
}

/// `a(θ) = [1, e^{−2πj(d/λ)cosθ}, …, e^{−2πj(m−1)(d/λ)cosθ}]ᵀ`.
pub fn steering_vector(geometry: &ArrayGeometry, theta_deg: f64) -> Result<ComplexVector> {
    if !(0.0..=180.0).contains(&theta_deg) {
        return Err(Error::invalid(
            "theta",
            format!("{theta_deg}° outside [0°, 180°]"),
        ));
    }
    let phase_step = -2.0 * PI * geometry.spacing * theta_deg.to_radians().cos();
    Ok(ComplexVector::from_fn(geometry.num_sensors, |k, _| {
        Complex64::from_polar(1.0, phase_step * k as f64)
    }))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Source {
    pub doa_deg: f64,
    pub power: f64,
    pub is_desired: bool,
}

impl Source {
    pub fn desired(doa_deg: f64, power: f64) -> Self {
        Source {
            doa_deg,
            power,
            is_desired: true,
        }
    }

    pub fn interferer(doa_deg: f64, power: f64) -> Self {
        Source {
            doa_deg,
            power,
            is_desired: false,
        }
    }
}

/// A set of active sources starting at a given (1-based) snapshot index.
#[derive(Debug, Clone)]
pub struct Epoch {
    start: usize,
    sources: Vec<Source>,
    steering: Vec<ComplexVector>,
    desired: usize,
}

impl Epoch {
    pub fn start(&self) -> usize {
        self.start
    }

    pub fn sources(&self) -> &[Source] {
        &self.sources
    }

    pub fn desired_index(&self) -> usize {
        self.desired
    }
}

#[derive(Debug, Clone)]
pub struct Scenario {
    geometry: ArrayGeometry,
    epochs: Vec<Epoch>,
    noise_power: f64,
    total_snapshots: usize,
    gamma: f64,
    desired_steering: ComplexVector,
}

impl Scenario {
    /// `epochs` are `(start, sources)` pairs; the first must start at snapshot 1.
    pub fn new(
        geometry: ArrayGeometry,
        epochs: Vec<(usize, Vec<Source>)>,
        noise_power: f64,
        total_snapshots: usize,
        gamma: f64,
    ) -> Result<Self> {
        if !(noise_power >= 0.0 && noise_power.is_finite()) {
            return Err(Error::invalid("noise_power", "must be non-negative"));
        }
        if total_snapshots == 0 {
            return Err(Error::invalid("total_snapshots", "must be at least 1"));
        }
        if !gamma.is_finite() || gamma == 0.0 {
            return Err(Error::invalid("gamma", "must be finite and non-zero"));
        }
        if epochs.is_empty() || epochs[0].0 != 1 {
            return Err(Error::invalid("epochs", "first epoch must start at snapshot 1"));
        }
        if epochs.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(Error::invalid("epochs", "start indices must be strictly increasing"));
        }

        let m = geometry.num_sensors();
        let mut desired_doa = None;
        let mut built = Vec::with_capacity(epochs.len());
        for (start, sources) in epochs {
            if sources.len() > m {
                return Err(Error::invalid(
                    "epochs",
                    format!("{} sources exceed {m} sensors", sources.len()),
                ));
            }
            let desired: Vec<usize> = sources
                .iter()
                .enumerate()
                .filter(|(_, s)| s.is_desired)
                .map(|(k, _)| k)
                .collect();
            if desired.len() != 1 {
                return Err(Error::invalid(
                    "epochs",
                    format!("epoch at {start} has {} desired sources", desired.len()),
                ));
            }
            let doa = sources[desired[0]].doa_deg;
            match desired_doa {
                None => desired_doa = Some(doa),
                Some(d) if d != doa => {
                    return Err(Error::invalid("epochs", "desired DOA changes between epochs"))
                }
                _ => {}
            }
            if let Some(s) = sources.iter().find(|s| !(s.power > 0.0 && s.power.is_finite())) {
                return Err(Error::invalid("power", format!("{} is not positive", s.power)));
            }
            let steering = sources
                .iter()
                .map(|s| steering_vector(&geometry, s.doa_deg))
                .collect::<Result<Vec<_>>>()?;
            built.push(Epoch {
                start,
                sources,
                steering,
                desired: desired[0],
            });
        }
        let desired_steering = built[0].steering[built[0].desired].clone();
        Ok(Scenario {
            geometry,
            epochs: built,
            noise_power,
            total_snapshots,
            gamma,
            desired_steering,
        })
    }

    pub fn geometry(&self) -> &ArrayGeometry {
        &self.geometry
    }

    pub fn epochs(&self) -> &[Epoch] {
        &self.epochs
    }

    pub fn noise_power(&self) -> f64 {
        self.noise_power
    }

    pub fn total_snapshots(&self) -> usize {
        self.total_snapshots
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// `a(θ₀)`.
    pub fn desired_steering(&self) -> &ComplexVector {
        &self.desired_steering
    }

    pub fn desired_power(&self) -> f64 {
        let e = &self.epochs[0];
        e.sources[e.desired].power
    }

    fn check_index(&self, i: usize) -> Result<()> {
        if i == 0 || i > self.total_snapshots {
            Err(Error::SnapshotIndex {
                index: i,
                total: self.total_snapshots,
            })
        } else {
            Ok(())
        }
    }

    /// Position of the epoch containing snapshot `i`.
    pub fn epoch_index(&self, i: usize) -> Result<usize> {
        self.check_index(i)?;
        Ok(self.epochs.partition_point(|e| e.start <= i) - 1)
    }

    pub fn epoch_at(&self, i: usize) -> Result<&Epoch> {
        Ok(&self.epochs[self.epoch_index(i)?])
    }
}

/// Sources active at snapshot `i`: the last epoch whose start is `≤ i`.
pub fn active_sources(scenario: &Scenario, i: usize) -> Result<&[Source]> {
    Ok(scenario.epoch_at(i)?.sources())
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub index: usize,
    pub r: ComplexVector,
    pub desired_symbol: Complex64,
}

/// Draws snapshot `i`. Per source one BPSK symbol is taken from `rng` in source
/// order, followed by `(re, im)` noise pairs per element.
pub fn generate_snapshot<R: Rng + ?Sized>(
    scenario: &Scenario,
    i: usize,
    rng: &mut R,
) -> Result<Snapshot> {
    let epoch = scenario.epoch_at(i)?;
    let m = scenario.geometry.num_sensors();
    let mut r = ComplexVector::zeros(m);
    let mut desired_symbol = Complex64::new(0.0, 0.0);
    for (k, (source, a)) in epoch.sources.iter().zip(&epoch.steering).enumerate() {
        let s = if rng.random::<bool>() { 1.0 } else { -1.0 };
        if k == epoch.desired {
            desired_symbol = Complex64::new(s, 0.0);
        }
        r.axpy(Complex64::new(source.power.sqrt() * s, 0.0), a, Complex64::new(1.0, 0.0));
    }
    let sigma = (scenario.noise_power / 2.0).sqrt();
    for x in r.iter_mut() {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        *x += Complex64::new(sigma * re, sigma * im);
    }
    Ok(Snapshot {
        index: i,
        r,
        desired_symbol,
    })
}

/// Exact `Σ_{k≠0} P_k a_k a_kᴴ + σ_n² I` for the epoch containing `i`.
pub fn interference_covariance(scenario: &Scenario, i: usize) -> Result<HermitianMatrix> {
    let epoch = scenario.epoch_at(i)?;
    let mut cov = HermitianMatrix::scaled_identity(scenario.geometry.num_sensors(), scenario.noise_power);
    for (k, (source, a)) in epoch.sources.iter().zip(&epoch.steering).enumerate() {
        if k != epoch.desired {
            cov.rank_one_update(source.power, a);
        }
    }
    Ok(cov)
}

/// Exact `P₀ a₀ a₀ᴴ`.
pub fn desired_covariance(scenario: &Scenario, i: usize) -> Result<HermitianMatrix> {
    let epoch = scenario.epoch_at(i)?;
    Ok(HermitianMatrix::outer(
        &epoch.steering[epoch.desired],
        epoch.sources[epoch.desired].power,
    ))
}

/// `R = E[r rᴴ]` for the epoch containing `i`.
pub fn total_covariance(scenario: &Scenario, i: usize) -> Result<HermitianMatrix> {
    Ok(interference_covariance(scenario, i)?.add(&desired_covariance(scenario, i)?))
}
