//! Complex linear-algebra carriers.
//!
//! Vectors are plain `nalgebra` column vectors. [`HermitianMatrix`] wraps a
//! dense square matrix and only exposes operations that keep it Hermitian.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{check_len, Error, Result};

pub type ComplexVector = DVector<Complex64>;

/// `aᴴb`.
#[inline]
pub fn inner(a: &ComplexVector, b: &ComplexVector) -> Complex64 {
    a.dotc(b)
}

#[inline]
pub fn norm_sqr(a: &ComplexVector) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum()
}

pub fn is_finite(a: &ComplexVector) -> bool {
    a.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// Phase factor that rotates `z` onto the positive real axis: `z * phase(z) = |z|`.
///
/// `phase(0)` is 1.
pub fn conj_phase(z: Complex64) -> Complex64 {
    let r = z.norm();
    if r == 0.0 {
        Complex64::new(1.0, 0.0)
    } else {
        z.conj() / r
    }
}

/// Maps an arbitrary direction `u` onto the constraint surface `wᴴa = γ`,
/// returning `γu / (aᴴu)`. `None` when `aᴴu` vanishes.
pub fn constrain(u: &ComplexVector, a0: &ComplexVector, gamma: f64) -> Option<ComplexVector> {
    let au = inner(a0, u);
    if au.norm() == 0.0 || !au.re.is_finite() || !au.im.is_finite() {
        return None;
    }
    Some(u * (Complex64::new(gamma, 0.0) / au))
}

#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix(DMatrix<Complex64>);

impl HermitianMatrix {
    pub fn zeros(n: usize) -> Self {
        HermitianMatrix(DMatrix::zeros(n, n))
    }

    pub fn scaled_identity(n: usize, c: f64) -> Self {
        HermitianMatrix(DMatrix::from_diagonal_element(n, n, Complex64::new(c, 0.0)))
    }

    /// Accepts `m` if it is square and Hermitian to within `tol` (absolute,
    /// entrywise). The stored matrix is the exact Hermitian part.
    pub fn from_matrix(m: DMatrix<Complex64>, tol: f64) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::invalid("matrix", "not square"));
        }
        let n = m.nrows();
        for j in 0..n {
            for i in 0..=j {
                if (m[(i, j)] - m[(j, i)].conj()).norm() > tol {
                    return Err(Error::invalid("matrix", "not Hermitian"));
                }
            }
        }
        let h = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
        Ok(HermitianMatrix(h))
    }

    /// `weight · x xᴴ`.
    pub fn outer(x: &ComplexVector, weight: f64) -> Self {
        let mut h = Self::zeros(x.len());
        h.rank_one_update(weight, x);
        h
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_matrix(&self) -> &DMatrix<Complex64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.0
    }

    /// `A ← A + weight · x xᴴ`. Entry `(i, j)` and `(j, i)` are produced from the
    /// same product so the result stays exactly Hermitian.
    pub fn rank_one_update(&mut self, weight: f64, x: &ComplexVector) {
        let n = self.dim();
        debug_assert_eq!(x.len(), n);
        for j in 0..n {
            let xj = x[j].conj() * weight;
            for i in 0..j {
                let v = x[i] * xj;
                self.0[(i, j)] += v;
                self.0[(j, i)] += v.conj();
            }
            self.0[(j, j)].re += weight * x[j].norm_sqr();
        }
    }

    pub fn add(&self, other: &HermitianMatrix) -> HermitianMatrix {
        HermitianMatrix(&self.0 + &other.0)
    }

    pub fn scale(&mut self, c: f64) {
        self.0 *= Complex64::new(c, 0.0);
    }

    pub fn add_identity(&mut self, c: f64) {
        for i in 0..self.dim() {
            self.0[(i, i)].re += c;
        }
    }

    pub fn mul_vec(&self, x: &ComplexVector) -> ComplexVector {
        &self.0 * x
    }

    /// `xᴴAx`, real for Hermitian `A`.
    pub fn quad_form(&self, x: &ComplexVector) -> f64 {
        inner(x, &self.mul_vec(x)).re
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.0[(i, i)].re).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest `|A_ij − conj(A_ji)|`.
    pub fn hermitian_defect(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0f64;
        for j in 0..n {
            for i in 0..=j {
                worst = worst.max((self.0[(i, j)] - self.0[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.0
            .clone()
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    /// Solves `A x = b` by Cholesky factorisation.
    pub fn solve(&self, b: &ComplexVector) -> Result<ComplexVector> {
        check_len(self.dim(), b.len())?;
        let chol = self.0.clone().cholesky().ok_or(Error::NotPositiveDefinite)?;
        // The complex factorisation accepts some indefinite inputs; a valid
        // factor has a strictly positive real diagonal.
        let l = chol.l_dirty();
        if (0..self.dim()).any(|i| l[(i, i)].re.is_nan() || l[(i, i)].re <= 0.0 || l[(i, i)].im.abs() > 1e-12 * l[(i, i)].re) {
            return Err(Error::NotPositiveDefinite);
        }
        let x = chol.solve(b);
        if !is_finite(&x) {
            return Err(Error::NotPositiveDefinite);
        }
        Ok(x)
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn inner_conjugates_left_argument() {
        let a = ComplexVector::from_vec(vec![c(1.0, 2.0), c(0.0, -1.0)]);
        let b = ComplexVector::from_vec(vec![c(3.0, 0.5), c(2.0, 2.0)]);
        let brute: Complex64 = a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum();
        assert!((inner(&a, &b) - brute).norm() < 1e-15);
    }

    #[test]
    fn rank_one_update_is_exactly_hermitian() {
        let x = ComplexVector::from_vec(vec![c(0.3, -1.7), c(2.1, 0.4), c(-0.9, 0.9)]);
        let mut h = HermitianMatrix::scaled_identity(3, 0.5);
        h.rank_one_update(0.731, &x);
        h.rank_one_update(1.3, &x.map(|z| z * c(0.2, 1.1)));
        assert_eq!(h.hermitian_defect(), 0.0);
        let expected = 0.5 + 0.731 * x[1].norm_sqr() + 1.3 * (x[1] * c(0.2, 1.1)).norm_sqr();
        assert!((h.as_matrix()[(1, 1)].re - expected).abs() < 1e-12);
    }

    #[test]
    fn solve_recovers_rhs() {
        let x = ComplexVector::from_vec(vec![c(1.0, 1.0), c(-2.0, 0.5)]);
        let mut h = HermitianMatrix::scaled_identity(2, 2.0);
        h.rank_one_update(1.0, &x);
        let b = ComplexVector::from_vec(vec![c(0.5, 0.0), c(0.0, 1.0)]);
        let sol = h.solve(&b).unwrap();
        assert!((h.mul_vec(&sol) - b).norm() < 1e-12);
    }

    #[test]
    fn solve_rejects_indefinite() {
        let h = HermitianMatrix::scaled_identity(2, -1.0);
        let b = ComplexVector::from_element(2, c(1.0, 0.0));
        assert!(matches!(h.solve(&b), Err(Error::NotPositiveDefinite)));
    }

    #[test]
    fn constrain_meets_constraint() {
        let a = ComplexVector::from_vec(vec![c(1.0, 0.0), c(0.0, -1.0), c(-1.0, 0.0)]);
        let u = ComplexVector::from_vec(vec![c(0.2, 0.7), c(1.5, -0.3), c(0.1, 0.1)]);
        let w = constrain(&u, &a, 1.0).unwrap();
        assert!((inner(&w, &a) - c(1.0, 0.0)).norm() < 1e-14);
        assert!(constrain(&ComplexVector::zeros(3), &a, 1.0).is_none());
    }

    #[test]
    fn conj_phase_rotates_to_modulus() {
        for z in [c(3.0, -4.0), c(-1.0, 0.0), c(0.0, 2.0)] {
            let rotated = z * conj_phase(z);
            assert!((rotated - c(z.norm(), 0.0)).norm() < 1e-15);
        }
        assert_eq!(conj_phase(c(0.0, 0.0)), c(1.0, 0.0));
    }

    #[test]
    fn from_matrix_rejects_non_hermitian() {
        let m = DMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(1.0, 1.0), c(1.0, 1.0), c(2.0, 0.0)]);
        assert!(HermitianMatrix::from_matrix(m, 1e-12).is_err());
    }
}
