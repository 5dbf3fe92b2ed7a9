//! Set-membership conjugate-gradient LCMV beamformer.
//!
//! The beamformer tracks an auxiliary vector `v ≈ R̂⁻¹a(θ₀)` with one CG
//! iteration per *update*, and maps it onto the constraint `wᴴa(θ₀) = γ` through
//! `w = γv / (aᴴ(θ₀)v)`. Updates only happen when the array output violates the
//! bound, `|y|² > δ²`. On an update the forgetting factor `λ₁` is chosen so that
//! the refreshed auxiliary vector satisfies `|vᴴr|² = δ²|vᴴa₀|²`.
//!
//! The recursion order inside an update is fixed:
//! `λ₁ → R̂ → α → v → g → β → p → w`.
//!
//! Conventions:
//! - Quadratic forms inside the `λ₁` closed form use the covariance estimate
//!   *before* the rank-one refresh.
//! - The step `α` is real (real parts of the inner products), `β` is complex so
//!   that successive directions are exactly `R̂`-conjugate.

use num_complex::Complex64;

use crate::error::{check_len, Error, Result};
use crate::linalg::{self, conj_phase, inner, ComplexVector, HermitianMatrix};

/// Closed interval the forgetting factor is clamped to.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lambda1Clamp {
    min: f64,
    max: f64,
}

impl Default for Lambda1Clamp {
    fn default() -> Self {
        Lambda1Clamp {
            min: 0.1,
            max: 0.999,
        }
    }
}

impl Lambda1Clamp {
    pub fn new(min: f64, max: f64) -> Result<Self> {
        if !(min > 0.0 && min <= max && max <= 1.0) {
            return Err(Error::invalid(
                "lambda1_clamp",
                format!("[{min}, {max}] is not a sub-interval of (0, 1]"),
            ));
        }
        Ok(Lambda1Clamp { min, max })
    }

    /// A degenerate interval that pins `λ₁` to `value`.
    pub fn constant(value: f64) -> Result<Self> {
        Self::new(value, value)
    }

    pub fn min(&self) -> f64 {
        self.min
    }

    pub fn max(&self) -> f64 {
        self.max
    }

    pub fn apply(&self, x: f64) -> f64 {
        x.clamp(self.min, self.max)
    }

    fn is_constant(&self) -> bool {
        self.min == self.max
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SmCgState {
    v: ComplexVector,
    g: ComplexVector,
    p: ComplexVector,
    r_hat: HermitianMatrix,
    w: ComplexVector,
    a0: ComplexVector,
    gamma: f64,
    eta: f64,
    clamp: Lambda1Clamp,
    update_count: u64,
    step_count: u64,
    degenerate_count: u64,
}

/// Outcome of one snapshot.
#[derive(Debug, Clone, PartialEq)]
pub struct StepResult {
    pub y: Complex64,
    pub delta_used: f64,
    pub updated: bool,
    pub lambda1: Option<f64>,
    pub alpha: Option<f64>,
    pub beta: Option<Complex64>,
    pub w_after: ComplexVector,
    /// `aᴴv` vanished after the update and the previous weights were kept.
    pub degenerate: bool,
}

impl SmCgState {
    /// Starts from `v = 0`, `g = p = a₀`, `R̂ = r_hat_init·I` and
    /// `w = γa₀/‖a₀‖²`.
    pub fn initialize(
        a0: &ComplexVector,
        gamma: f64,
        eta: f64,
        clamp: Lambda1Clamp,
        r_hat_init: f64,
    ) -> Result<Self> {
        let a_norm = linalg::norm_sqr(a0);
        if a0.is_empty() || a_norm == 0.0 || !a_norm.is_finite() {
            return Err(Error::invalid("a0", "steering vector must be non-zero and finite"));
        }
        if !(0.0..=1.0).contains(&eta) {
            return Err(Error::invalid("eta", format!("{eta} outside [0, 1]")));
        }
        if !(r_hat_init > 0.0 && r_hat_init.is_finite()) {
            return Err(Error::invalid("r_hat_init", "diagonal loading must be positive"));
        }
        if !gamma.is_finite() || gamma == 0.0 {
            return Err(Error::invalid("gamma", "must be finite and non-zero"));
        }
        let m = a0.len();
        Ok(SmCgState {
            v: ComplexVector::zeros(m),
            g: a0.clone(),
            p: a0.clone(),
            r_hat: HermitianMatrix::scaled_identity(m, r_hat_init),
            w: a0 * Complex64::new(gamma / a_norm, 0.0),
            a0: a0.clone(),
            gamma,
            eta,
            clamp,
            update_count: 0,
            step_count: 0,
            degenerate_count: 0,
        })
    }

    /// Builds a state from explicit recursion variables. `w` is derived from
    /// `v` when `aᴴv ≠ 0` and from `a₀` otherwise.
    #[allow(clippy::too_many_arguments)]
    pub fn from_parts(
        a0: ComplexVector,
        v: ComplexVector,
        g: ComplexVector,
        p: ComplexVector,
        r_hat: HermitianMatrix,
        gamma: f64,
        eta: f64,
        clamp: Lambda1Clamp,
    ) -> Result<Self> {
        let m = a0.len();
        for x in [&v, &g, &p] {
            check_len(m, x.len())?;
        }
        check_len(m, r_hat.dim())?;
        let w = linalg::constrain(&v, &a0, gamma)
            .unwrap_or_else(|| &a0 * Complex64::new(gamma / linalg::norm_sqr(&a0), 0.0));
        Ok(SmCgState {
            v,
            g,
            p,
            r_hat,
            w,
            a0,
            gamma,
            eta,
            clamp,
            update_count: 0,
            step_count: 0,
            degenerate_count: 0,
        })
    }

    pub fn weights(&self) -> &ComplexVector {
        &self.w
    }

    pub fn auxiliary(&self) -> &ComplexVector {
        &self.v
    }

    pub fn gradient(&self) -> &ComplexVector {
        &self.g
    }

    pub fn direction(&self) -> &ComplexVector {
        &self.p
    }

    pub fn covariance(&self) -> &HermitianMatrix {
        &self.r_hat
    }

    pub fn steering(&self) -> &ComplexVector {
        &self.a0
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn clamp(&self) -> Lambda1Clamp {
        self.clamp
    }

    pub fn update_count(&self) -> u64 {
        self.update_count
    }

    pub fn step_count(&self) -> u64 {
        self.step_count
    }

    pub fn degenerate_count(&self) -> u64 {
        self.degenerate_count
    }

    /// `y = wᴴr` with the current weights.
    pub fn output(&self, r: &ComplexVector) -> Result<Complex64> {
        check_len(self.w.len(), r.len())?;
        Ok(inner(&self.w, r))
    }

    /// The four scalar terms of the forgetting-factor closed form for snapshot
    /// `r` and bound `delta`.
    pub fn lambda1_terms(&self, r: &ComplexVector, delta: f64) -> Result<Lambda1Terms> {
        check_len(self.a0.len(), r.len())?;
        let d = self.r_hat.quad_form(&self.p);
        if d.is_nan() || d <= 0.0 {
            return Err(Error::NonPositiveCurvature(d));
        }
        let c = (1.0 - self.eta) * inner(&self.p, &self.g).re;
        let vr = inner(&self.v, r);
        let pr = inner(&self.p, r);
        let va = inner(&self.v, &self.a0);
        let pa = inner(&self.p, &self.a0);
        // Re{pᴴr rᴴv}
        let b = (pr * vr.conj()).re;
        Ok(Lambda1Terms {
            tau1: (va * d + pa * c) * delta,
            tau2: pa * (b * delta),
            tau3: vr * d + pr * c,
            tau4: pr * b,
        })
    }

    /// Forgetting factor for an update, clamped to the configured interval.
    pub fn compute_lambda1(&self, r: &ComplexVector, delta: f64) -> Result<f64> {
        if self.clamp.is_constant() {
            return Ok(self.clamp.min);
        }
        let raw = self.lambda1_terms(r, delta)?.solve()?;
        Ok(self.clamp.apply(raw))
    }

    /// Inexact line-search step `α` with `R̂(i) = R̂(i−1) + λ₁ r rᴴ` in the
    /// denominator.
    pub fn compute_alpha(&self, r: &ComplexVector, lambda1: f64) -> Result<f64> {
        check_len(self.a0.len(), r.len())?;
        let pr = inner(&self.p, r);
        let d = self.r_hat.quad_form(&self.p) + lambda1 * pr.norm_sqr();
        self.alpha_with_curvature(r, lambda1, d)
    }

    fn alpha_with_curvature(&self, r: &ComplexVector, lambda1: f64, curvature: f64) -> Result<f64> {
        if curvature.is_nan() || curvature <= 0.0 {
            return Err(Error::NonPositiveCurvature(curvature));
        }
        let pg = inner(&self.p, &self.g).re;
        let cross = (inner(&self.p, r) * inner(r, &self.v)).re;
        Ok(((1.0 - self.eta) * pg - lambda1 * cross) / curvature)
    }

    /// Processes one snapshot: gate on `|y|² > δ²`, update if violated.
    /// The state is only mutated once every intermediate quantity succeeded.
    pub fn step(&mut self, r: &ComplexVector, delta: f64) -> Result<StepResult> {
        if !(delta >= 0.0 && delta.is_finite()) {
            return Err(Error::invalid("delta", format!("{delta} is not a valid bound")));
        }
        let y = self.output(r)?;
        if y.norm_sqr() > delta * delta {
            self.update(r, y, delta)
        } else {
            self.step_count += 1;
            Ok(StepResult {
                y,
                delta_used: delta,
                updated: false,
                lambda1: None,
                alpha: None,
                beta: None,
                w_after: self.w.clone(),
                degenerate: false,
            })
        }
    }

    /// Processes one snapshot with the gate held open.
    pub fn step_open(&mut self, r: &ComplexVector) -> Result<StepResult> {
        let y = self.output(r)?;
        self.update(r, y, 0.0)
    }

    fn update(&mut self, r: &ComplexVector, y: Complex64, delta: f64) -> Result<StepResult> {
        let lambda1 = match self.compute_lambda1(r, delta) {
            Ok(l) => l,
            Err(Error::DegenerateLambda) => self.clamp.max,
            Err(e) => return Err(e),
        };

        let mut r_hat = self.r_hat.clone();
        r_hat.rank_one_update(lambda1, r);
        let rp = r_hat.mul_vec(&self.p);
        let curvature = inner(&self.p, &rp).re;
        let alpha = self.alpha_with_curvature(r, lambda1, curvature)?;

        let rv_old = inner(r, &self.v);
        let v = &self.v + &self.p * Complex64::new(alpha, 0.0);
        let g = &self.g - &rp * Complex64::new(alpha, 0.0) - r * (rv_old * lambda1);
        let beta = -inner(&rp, &g) / curvature;
        let p = &g + &self.p * beta;

        if !(linalg::is_finite(&v) && linalg::is_finite(&g) && linalg::is_finite(&p)) {
            return Err(Error::NonFinite("SM-CG update".into()));
        }

        let (w, degenerate) = match linalg::constrain(&v, &self.a0, self.gamma) {
            Some(w) => (w, false),
            None => (self.w.clone(), true),
        };

        self.r_hat = r_hat;
        self.v = v;
        self.g = g;
        self.p = p;
        self.w = w;
        self.update_count += 1;
        self.step_count += 1;
        if degenerate {
            self.degenerate_count += 1;
        }
        Ok(StepResult {
            y,
            delta_used: delta,
            updated: true,
            lambda1: Some(lambda1),
            alpha: Some(alpha),
            beta: Some(beta),
            w_after: self.w.clone(),
            degenerate,
        })
    }
}

/// Scalar terms of the forgetting-factor equation.
///
/// With `D = pᴴR̂p`, the refreshed auxiliary vector `v(λ) = v + α(λ)p`
/// satisfies
///
/// ```text
/// D · v(λ)ᴴr     = τ₃ − λτ₄
/// D · δ v(λ)ᴴa₀  = τ₁ − λτ₂
/// ```
///
/// so the bounded constraint `|v(λ)ᴴr| = δ|v(λ)ᴴa₀|` reads
/// `|τ₃ − λτ₄| = |τ₁ − λτ₂|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lambda1Terms {
    pub tau1: Complex64,
    pub tau2: Complex64,
    pub tau3: Complex64,
    pub tau4: Complex64,
}

impl Lambda1Terms {
    fn scale(&self) -> f64 {
        [self.tau1, self.tau2, self.tau3, self.tau4]
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// Sign-weighted ratio `(λ₁₁ − λ₁₂)/(λ₁₃ − λ₁₄)` with the phase factors
    /// taken at `λ = 1`. Exact when all terms share a common phase (real data).
    pub fn sign_weighted_ratio(&self) -> Result<f64> {
        let s1 = conj_phase(self.tau1 - self.tau2);
        let s3 = conj_phase(self.tau3 - self.tau4);
        let num = self.tau1 * s1 - self.tau3 * s3;
        let den = self.tau2 * s1 - self.tau4 * s3;
        if den.norm() <= 1e-12 * self.scale() || self.scale() == 0.0 {
            return Err(Error::DegenerateLambda);
        }
        let ratio = (num / den).re;
        if ratio.is_finite() {
            Ok(ratio)
        } else {
            Err(Error::DegenerateLambda)
        }
    }

    /// Real roots of `|τ₃ − λτ₄|² − |τ₁ − λτ₂|² = 0`, ascending.
    pub fn constraint_roots(&self) -> Vec<f64> {
        let qa = self.tau4.norm_sqr() - self.tau2.norm_sqr();
        let qb = -2.0 * ((self.tau3 * self.tau4.conj()).re - (self.tau1 * self.tau2.conj()).re);
        let qc = self.tau3.norm_sqr() - self.tau1.norm_sqr();
        let scale = qa.abs().max(qb.abs()).max(qc.abs());
        if scale == 0.0 || !scale.is_finite() {
            return Vec::new();
        }
        let (qa, qb, qc) = (qa / scale, qb / scale, qc / scale);
        let mut roots = if qa.abs() < 1e-13 {
            if qb.abs() < 1e-13 {
                Vec::new()
            } else {
                vec![-qc / qb]
            }
        } else {
            let disc = qb * qb - 4.0 * qa * qc;
            if disc < 0.0 {
                Vec::new()
            } else {
                let q = -0.5 * (qb + qb.signum() * disc.sqrt());
                if q == 0.0 {
                    vec![0.0]
                } else {
                    vec![q / qa, qc / q]
                }
            }
        };
        roots.retain(|x| x.is_finite());
        roots.sort_by(f64::total_cmp);
        roots
    }

    /// Unclamped forgetting factor.
    ///
    /// The sign-weighted ratio linearises the magnitude constraint around
    /// `λ = 1`; the returned value is the exact constraint root it points at.
    /// Roots in `(0, 1]` are preferred, ties broken by distance to the ratio.
    /// Without a real root the ratio itself is returned.
    pub fn solve(&self) -> Result<f64> {
        let linear = self.sign_weighted_ratio()?;
        let roots = self.constraint_roots();
        let admissible: Vec<f64> = roots.iter().copied().filter(|x| *x > 0.0 && *x <= 1.0).collect();
        let pool = if admissible.is_empty() { roots } else { admissible };
        Ok(pool
            .into_iter()
            .min_by(|a, b| (a - linear).abs().total_cmp(&(b - linear).abs()))
            .unwrap_or(linear))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn ones(m: usize) -> ComplexVector {
        ComplexVector::from_element(m, c(1.0, 0.0))
    }

    fn rand_vec(rng: &mut ChaCha8Rng, m: usize) -> ComplexVector {
        ComplexVector::from_fn(m, |_, _| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
    }

    fn rand_pd(rng: &mut ChaCha8Rng, m: usize) -> HermitianMatrix {
        let b = DMatrix::from_fn(m, m, |_, _| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
        let mut h = HermitianMatrix::from_matrix(&b * b.adjoint(), 1e-9).unwrap();
        h.add_identity(0.1);
        h
    }

    fn random_state(rng: &mut ChaCha8Rng, m: usize) -> SmCgState {
        let a0 = ComplexVector::from_fn(m, |_, _| Complex64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU)));
        SmCgState::from_parts(
            a0,
            rand_vec(rng, m),
            rand_vec(rng, m),
            rand_vec(rng, m),
            rand_pd(rng, m),
            1.0,
            rng.random_range(0.0..0.5),
            Lambda1Clamp::default(),
        )
        .unwrap()
    }

    #[test]
    fn initial_weights_are_normalised_steering() {
        let s = SmCgState::initialize(&ones(4), 1.0, 0.5, Lambda1Clamp::default(), 1e-2).unwrap();
        for z in s.weights().iter() {
            assert!((z - c(0.25, 0.0)).norm() < 1e-15);
        }
        assert_eq!(s.gradient(), &ones(4));
        assert_eq!(s.direction(), &ones(4));
        assert!(s.auxiliary().iter().all(|z| *z == c(0.0, 0.0)));
        assert!((inner(s.weights(), &ones(4)) - c(1.0, 0.0)).norm() < 1e-15);
        assert_eq!(s.update_count(), 0);
    }

    #[test]
    fn initialize_rejects_zero_steering() {
        let z = ComplexVector::zeros(3);
        assert!(SmCgState::initialize(&z, 1.0, 0.5, Lambda1Clamp::default(), 1e-2).is_err());
        assert!(Lambda1Clamp::new(0.0, 0.5).is_err());
        assert!(Lambda1Clamp::new(0.6, 0.5).is_err());
        assert!(Lambda1Clamp::new(0.1, 1.1).is_err());
    }

    #[test]
    fn output_matches_elementwise_sum() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            let s = random_state(&mut rng, 5);
            let r = rand_vec(&mut rng, 5);
            let brute: Complex64 = s.weights().iter().zip(r.iter()).map(|(w, x)| w.conj() * x).sum();
            assert!((s.output(&r).unwrap() - brute).norm() < 1e-12);
        }
        let s = SmCgState::initialize(&ones(4), 1.0, 0.5, Lambda1Clamp::default(), 1e-2).unwrap();
        assert!((s.output(&ones(4)).unwrap() - c(1.0, 0.0)).norm() < 1e-15);
        assert!(matches!(s.output(&ones(3)), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn canonical_weight_picks_first_element() {
        let mut e1 = ComplexVector::zeros(3);
        e1[0] = c(1.0, 0.0);
        let s = SmCgState::from_parts(
            e1.clone(),
            e1.clone(),
            e1.clone(),
            e1.clone(),
            HermitianMatrix::scaled_identity(3, 1.0),
            1.0,
            0.5,
            Lambda1Clamp::default(),
        )
        .unwrap();
        let r = ComplexVector::from_vec(vec![c(0.3, -0.8), c(5.0, 1.0), c(2.0, 2.0)]);
        assert_eq!(s.output(&r).unwrap(), c(0.3, -0.8));
    }

    #[test]
    fn alpha_identity_system_is_steepest_descent() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let m = 4;
        let s = SmCgState::from_parts(
            ones(m),
            ComplexVector::zeros(m),
            rand_vec(&mut rng, m),
            rand_vec(&mut rng, m),
            HermitianMatrix::scaled_identity(m, 1.0),
            1.0,
            0.0,
            Lambda1Clamp::default(),
        )
        .unwrap();
        let r = rand_vec(&mut rng, m);
        let expected = inner(s.direction(), s.gradient()).re / linalg::norm_sqr(s.direction());
        let alpha = s.compute_alpha(&r, 1e-14).unwrap();
        assert!((alpha - expected).abs() < 1e-12 * expected.abs().max(1.0));
    }

    #[test]
    fn alpha_with_eta_one_drops_gradient_term() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let mut s = random_state(&mut rng, 3);
        s.eta = 1.0;
        let r = rand_vec(&mut rng, 3);
        assert!(s.compute_alpha(&r, 1e-15).unwrap().abs() < 1e-12);
    }

    #[test]
    fn alpha_sandwich_on_random_instances() {
        // Direct evaluation of the descent bound on the post-update gradient.
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut checked = 0;
        for _ in 0..500 {
            let mut s = random_state(&mut rng, 4);
            let r = rand_vec(&mut rng, 4);
            let before = inner(s.direction(), s.gradient()).re;
            if before < 0.0 {
                continue;
            }
            let p = s.direction().clone();
            let res = s.step_open(&r).unwrap();
            assert!(res.updated);
            let after = inner(&p, s.gradient()).re;
            assert!(after >= -1e-8 && after <= 0.5 * before + 1e-8, "{after} vs {before}");
            checked += 1;
        }
        assert!(checked > 100);
    }

    #[test]
    fn sign_weighted_ratio_is_exact_for_real_terms() {
        let t = Lambda1Terms {
            tau1: c(2.0, 0.0),
            tau2: c(0.5, 0.0),
            tau3: c(1.0, 0.0),
            tau4: c(1.5, 0.0),
        };
        // |1 − 1.5λ| = |2 − 0.5λ| has roots −1 and 1.5.
        let ratio = t.sign_weighted_ratio().unwrap();
        assert!((ratio - 1.5).abs() < 1e-12);
        let roots = t.constraint_roots();
        assert!(roots.iter().any(|x| (x - ratio).abs() < 1e-12), "{ratio} {roots:?}");
    }

    #[test]
    fn degenerate_lambda_at_zero_auxiliary() {
        let s = SmCgState::initialize(&ones(4), 1.0, 0.5, Lambda1Clamp::default(), 1e-2).unwrap();
        let r = ComplexVector::from_vec(vec![c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0), c(0.5, 0.5)]);
        let terms = s.lambda1_terms(&r, 1.0).unwrap();
        assert!(matches!(terms.solve(), Err(Error::DegenerateLambda)));
    }

    #[test]
    fn first_update_falls_back_to_upper_clamp() {
        let mut s = SmCgState::initialize(&ones(4), 1.0, 0.5, Lambda1Clamp::default(), 1e-2).unwrap();
        let r = ComplexVector::from_vec(vec![c(3.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0), c(0.5, 0.5)]);
        let res = s.step(&r, 0.1).unwrap();
        assert!(res.updated);
        assert_eq!(res.lambda1, Some(0.999));
        assert!(!res.degenerate);
    }

    #[test]
    fn gate_closed_step_is_pure() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut s = random_state(&mut rng, 4);
        let r = rand_vec(&mut rng, 4);
        let y = s.output(&r).unwrap();
        let before = s.clone();
        let res = s.step(&r, y.norm() * (1.0 + 1e-12)).unwrap();
        assert!(!res.updated);
        assert_eq!(res.w_after, *before.weights());
        assert!(res.lambda1.is_none() && res.alpha.is_none() && res.beta.is_none());
        assert_eq!(s.step_count(), before.step_count() + 1);
        let mut restored = s.clone();
        restored.step_count = before.step_count;
        assert_eq!(restored, before);
    }

    #[test]
    fn step_rejects_invalid_bound() {
        let mut s = SmCgState::initialize(&ones(2), 1.0, 0.5, Lambda1Clamp::default(), 1e-2).unwrap();
        assert!(s.step(&ones(2), -1.0).is_err());
        assert!(s.step(&ones(2), f64::NAN).is_err());
        assert_eq!(s.step_count(), 0);
    }

    #[test]
    fn clamp_engages_above_upper_limit() {
        // Choose δ so that the exact root sits above 1 and the upper clamp engages.
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let mut found = 0;
        for _ in 0..2000 {
            let s = random_state(&mut rng, 3);
            let r = rand_vec(&mut rng, 3);
            let delta = rng.random_range(0.05..3.0);
            let Ok(terms) = s.lambda1_terms(&r, delta) else { continue };
            let Ok(raw) = terms.solve() else { continue };
            if raw > 1.0 && terms.constraint_roots().iter().all(|x| *x > 1.0) {
                assert_eq!(s.compute_lambda1(&r, delta).unwrap(), 0.999);
                found += 1;
            }
        }
        assert!(found > 0);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn lambda1_stays_in_clamp(seed in any::<u64>(), m in 2usize..6, delta in 0.01f64..5.0) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let s = random_state(&mut rng, m);
            let r = rand_vec(&mut rng, m);
            match s.compute_lambda1(&r, delta) {
                Ok(l) => prop_assert!((0.1..=0.999).contains(&l)),
                Err(e) => prop_assert!(matches!(e, Error::DegenerateLambda)),
            }
        }

        #[test]
        fn update_preserves_invariants(seed in any::<u64>(), m in 2usize..6) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a0 = ComplexVector::from_fn(m, |_, _| Complex64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU)));
            let mut s = SmCgState::initialize(&a0, 1.0, 0.5, Lambda1Clamp::default(), 1e-2).unwrap();
            for _ in 0..30 {
                let r = rand_vec(&mut rng, m);
                let p_old = s.direction().clone();
                let res = s.step(&r, 0.05).unwrap();
                if res.updated {
                    prop_assert!((inner(&res.w_after, &a0) - c(1.0, 0.0)).norm() < 1e-8);
                    let rp = s.covariance().mul_vec(s.direction());
                    let conj = inner(&p_old, &rp).norm();
                    let scale = p_old.norm() * s.direction().norm() * s.covariance().frobenius_norm();
                    prop_assert!(conj <= 1e-8 * scale);
                }
                prop_assert!(s.covariance().hermitian_defect() < 1e-12);
                // g tracks a₀ − R̂v exactly.
                let resid = &a0 - s.covariance().mul_vec(s.auxiliary()) - s.gradient();
                prop_assert!(resid.norm() < 1e-8 * (1.0 + s.covariance().frobenius_norm() * s.auxiliary().norm()));
            }
            prop_assert!(s.covariance().min_eigenvalue() > 0.0);
            prop_assert!(s.update_count() <= s.step_count());
        }
    }
}
