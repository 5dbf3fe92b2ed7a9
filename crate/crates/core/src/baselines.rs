//! Reference beamformers: the closed-form MVDR solution and three full-rate
//! constrained adaptive recursions.

use num_complex::Complex64;

use crate::error::{check_len, Error, Result};
use crate::linalg::{self, inner, ComplexVector, HermitianMatrix};
use crate::smcg::{Lambda1Clamp, SmCgState};

/// `w = γR⁻¹a / (aᴴR⁻¹a)`.
pub fn mvdr_weights(r: &HermitianMatrix, a0: &ComplexVector, gamma: f64) -> Result<ComplexVector> {
    let u = r.solve(a0)?;
    linalg::constrain(&u, a0, gamma).ok_or(Error::NotPositiveDefinite)
}

/// Frost's constrained stochastic gradient with a power-normalised step:
/// `w ← P(w − μ̃ y* r / ‖r‖²) + γa/‖a‖²`, `P = I − aaᴴ/‖a‖²`.
#[derive(Debug, Clone, PartialEq)]
pub struct FrostSg {
    w: ComplexVector,
    a0: ComplexVector,
    a_norm: f64,
    gamma: f64,
    step: f64,
    normalized: bool,
}

impl FrostSg {
    pub fn new(a0: &ComplexVector, gamma: f64, step: f64, normalized: bool) -> Result<Self> {
        let a_norm = linalg::norm_sqr(a0);
        if a_norm == 0.0 {
            return Err(Error::invalid("a0", "steering vector must be non-zero"));
        }
        if !(step >= 0.0 && step.is_finite()) {
            return Err(Error::invalid("step", format!("{step} must be non-negative")));
        }
        Ok(FrostSg {
            w: a0 * Complex64::new(gamma / a_norm, 0.0),
            a0: a0.clone(),
            a_norm,
            gamma,
            step,
            normalized,
        })
    }

    pub fn weights(&self) -> &ComplexVector {
        &self.w
    }

    pub fn step(&mut self, r: &ComplexVector) -> Result<Complex64> {
        check_len(self.w.len(), r.len())?;
        let y = inner(&self.w, r);
        let mu = if self.normalized {
            let power = linalg::norm_sqr(r);
            if power > 0.0 {
                self.step / power
            } else {
                0.0
            }
        } else {
            self.step
        };
        let u = &self.w - r * (y.conj() * mu);
        // Project onto the constraint plane: u − a(aᴴu − γ)/‖a‖².
        let excess = inner(&self.a0, &u) - self.gamma;
        let w = u - &self.a0 * (excess / self.a_norm);
        if !linalg::is_finite(&w) {
            return Err(Error::NonFinite("Frost SG weights".into()));
        }
        self.w = w;
        Ok(y)
    }
}

/// Exponentially weighted RLS on the inverse covariance, with
/// `w = γPa / (aᴴPa)` after each snapshot.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstrainedRls {
    inverse: HermitianMatrix,
    w: ComplexVector,
    a0: ComplexVector,
    gamma: f64,
    forgetting: f64,
}

impl ConstrainedRls {
    /// `P(0) = I/init_loading`.
    pub fn new(a0: &ComplexVector, gamma: f64, forgetting: f64, init_loading: f64) -> Result<Self> {
        let a_norm = linalg::norm_sqr(a0);
        if a_norm == 0.0 {
            return Err(Error::invalid("a0", "steering vector must be non-zero"));
        }
        if !(forgetting > 0.0 && forgetting <= 1.0) {
            return Err(Error::invalid("forgetting", format!("{forgetting} outside (0, 1]")));
        }
        if !(init_loading > 0.0 && init_loading.is_finite()) {
            return Err(Error::invalid("init_loading", "must be positive"));
        }
        Ok(ConstrainedRls {
            inverse: HermitianMatrix::scaled_identity(a0.len(), 1.0 / init_loading),
            w: a0 * Complex64::new(gamma / a_norm, 0.0),
            a0: a0.clone(),
            gamma,
            forgetting,
        })
    }

    pub fn weights(&self) -> &ComplexVector {
        &self.w
    }

    pub fn inverse_covariance(&self) -> &HermitianMatrix {
        &self.inverse
    }

    pub fn step(&mut self, r: &ComplexVector) -> Result<Complex64> {
        check_len(self.w.len(), r.len())?;
        let y = inner(&self.w, r);
        let pr = self.inverse.mul_vec(r);
        let denom = self.forgetting + inner(r, &pr).re;
        if !(denom > 0.0 && denom.is_finite()) {
            return Err(Error::NonFinite("RLS gain denominator".into()));
        }
        // P ← (P − Pr rᴴP / (λ + rᴴPr)) / λ
        let mut inverse = self.inverse.clone();
        inverse.rank_one_update(-1.0 / denom, &pr);
        inverse.scale(1.0 / self.forgetting);
        if !inverse.is_finite() {
            return Err(Error::NonFinite("RLS inverse covariance".into()));
        }
        let pa = inverse.mul_vec(&self.a0);
        let w = linalg::constrain(&pa, &self.a0, self.gamma)
            .ok_or_else(|| Error::NonFinite("RLS constraint normalisation".into()))?;
        self.inverse = inverse;
        self.w = w;
        Ok(y)
    }
}

/// Full-rate constrained CG: the SM-CG recursion with the gate held open and
/// a constant forgetting factor.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstrainedCg {
    inner: SmCgState,
}

impl ConstrainedCg {
    pub fn new(a0: &ComplexVector, gamma: f64, eta: f64, forgetting: f64, r_hat_init: f64) -> Result<Self> {
        let clamp = Lambda1Clamp::constant(forgetting)?;
        Ok(ConstrainedCg {
            inner: SmCgState::initialize(a0, gamma, eta, clamp, r_hat_init)?,
        })
    }

    pub fn weights(&self) -> &ComplexVector {
        self.inner.weights()
    }

    pub fn state(&self) -> &SmCgState {
        &self.inner
    }

    pub fn step(&mut self, r: &ComplexVector) -> Result<Complex64> {
        Ok(self.inner.step_open(r)?.y)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum BaselineState {
    FrostSg(FrostSg),
    Rls(ConstrainedRls),
    Cg(ConstrainedCg),
}

impl BaselineState {
    pub fn weights(&self) -> &ComplexVector {
        match self {
            BaselineState::FrostSg(s) => s.weights(),
            BaselineState::Rls(s) => s.weights(),
            BaselineState::Cg(s) => s.weights(),
        }
    }

    /// One full update; returns the pre-update output.
    pub fn step(&mut self, r: &ComplexVector) -> Result<Complex64> {
        match self {
            BaselineState::FrostSg(s) => s.step(r),
            BaselineState::Rls(s) => s.step(r),
            BaselineState::Cg(s) => s.step(r),
        }
    }
}
