//! Error-bound policies for the data-selective gate.
//!
//! A policy owns the current bound `δ` and is refreshed once per snapshot,
//! before the gate test, from the pre-update weights and output.

use num_complex::Complex64;

use crate::error::{check_len, Error, Result};
use crate::linalg::{self, inner, ComplexVector};

#[derive(Debug, Clone, PartialEq)]
pub enum BoundPolicy {
    Fixed {
        delta: f64,
    },
    /// Parameter-dependent bound, driven by the weight norm and noise power.
    Pdb {
        rho: f64,
        varsigma: f64,
        delta: f64,
    },
    /// Parameter- and interference-dependent bound. `nu` tracks the power of
    /// the matched-filter error `aᴴr − y`.
    Pidb {
        varrho: f64,
        varsigma: f64,
        epsilon: f64,
        delta: f64,
        nu: f64,
    },
}

fn check_forgetting(field: &'static str, x: f64) -> Result<()> {
    if x > 0.0 && x < 1.0 {
        Ok(())
    } else {
        Err(Error::invalid(field, format!("{x} outside (0, 1)")))
    }
}

fn check_varsigma(x: f64) -> Result<()> {
    if x > 1.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid("varsigma", format!("{x} must exceed 1")))
    }
}

/// `√(ς‖w‖²σ²)`.
fn parameter_term(varsigma: f64, w: &ComplexVector, noise_power: f64) -> f64 {
    (varsigma * linalg::norm_sqr(w) * noise_power).sqrt()
}

impl BoundPolicy {
    pub fn fixed(delta: f64) -> Result<Self> {
        if !(delta >= 0.0 && delta.is_finite()) {
            return Err(Error::invalid("delta", format!("{delta} must be finite and non-negative")));
        }
        Ok(BoundPolicy::Fixed { delta })
    }

    /// PDB started at its fixed point for the initial weights `w0`.
    pub fn pdb(rho: f64, varsigma: f64, w0: &ComplexVector, noise_power: f64) -> Result<Self> {
        check_forgetting("rho", rho)?;
        check_varsigma(varsigma)?;
        check_noise(noise_power)?;
        Ok(BoundPolicy::Pdb {
            rho,
            varsigma,
            delta: parameter_term(varsigma, w0, noise_power),
        })
    }

    /// PIDB started at the PDB fixed point with an empty interference estimate.
    pub fn pidb(
        varrho: f64,
        varsigma: f64,
        epsilon: f64,
        w0: &ComplexVector,
        noise_power: f64,
    ) -> Result<Self> {
        check_forgetting("varrho", varrho)?;
        check_varsigma(varsigma)?;
        check_noise(noise_power)?;
        if !(epsilon >= 0.0 && epsilon.is_finite()) {
            return Err(Error::invalid("epsilon", format!("{epsilon} must be non-negative")));
        }
        Ok(BoundPolicy::Pidb {
            varrho,
            varsigma,
            epsilon,
            delta: parameter_term(varsigma, w0, noise_power),
            nu: 0.0,
        })
    }

    pub fn current_bound(&self) -> f64 {
        match *self {
            BoundPolicy::Fixed { delta } | BoundPolicy::Pdb { delta, .. } | BoundPolicy::Pidb { delta, .. } => delta,
        }
    }

    /// Interference-plus-noise power estimate, PIDB only.
    pub fn interference_estimate(&self) -> Option<f64> {
        match *self {
            BoundPolicy::Pidb { nu, .. } => Some(nu),
            _ => None,
        }
    }

    /// `δ ← ρδ + (1−ρ)√(ς‖w‖²σ²)`. No-op for other variants.
    pub fn pdb_update(&mut self, w: &ComplexVector, noise_power: f64) {
        if let BoundPolicy::Pdb { rho, varsigma, delta } = self {
            *delta = *rho * *delta + (1.0 - *rho) * parameter_term(*varsigma, w, noise_power);
        }
    }

    /// `e₀ = aᴴr − y`, `ν ← ϱν + (1−ϱ)|e₀|²`,
    /// `δ ← ϱδ + (1−ϱ)[√(εν) + √(ς‖w‖²σ²)]`. No-op for other variants.
    pub fn pidb_update(
        &mut self,
        a0: &ComplexVector,
        r: &ComplexVector,
        y: Complex64,
        w: &ComplexVector,
        noise_power: f64,
    ) -> Result<()> {
        if let BoundPolicy::Pidb {
            varrho,
            varsigma,
            epsilon,
            delta,
            nu,
        } = self
        {
            let e0 = desired_direction_output(a0, r)? - y;
            *nu = *varrho * *nu + (1.0 - *varrho) * e0.norm_sqr();
            let interference = (*epsilon * *nu).sqrt();
            let parameter = parameter_term(*varsigma, w, noise_power);
            *delta = *varrho * *delta + (1.0 - *varrho) * (interference + parameter);
        }
        Ok(())
    }

    /// Per-snapshot refresh dispatching on the variant; returns the new bound.
    pub fn refresh(
        &mut self,
        a0: &ComplexVector,
        r: &ComplexVector,
        y: Complex64,
        w: &ComplexVector,
        noise_power: f64,
    ) -> Result<f64> {
        match self {
            BoundPolicy::Fixed { .. } => {}
            BoundPolicy::Pdb { .. } => self.pdb_update(w, noise_power),
            BoundPolicy::Pidb { .. } => self.pidb_update(a0, r, y, w, noise_power)?,
        }
        Ok(self.current_bound())
    }
}

fn check_noise(noise_power: f64) -> Result<()> {
    if noise_power >= 0.0 && noise_power.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid("noise_power", format!("{noise_power} must be non-negative")))
    }
}

/// Matched-filter output `y₀ = aᴴ(θ₀) r`.
pub fn desired_direction_output(a0: &ComplexVector, r: &ComplexVector) -> Result<Complex64> {
    check_len(a0.len(), r.len())?;
    Ok(inner(a0, r))
}
