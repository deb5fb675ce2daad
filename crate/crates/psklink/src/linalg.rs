//! Small dense complex matrices sized for antenna arrays.
//!
//! Dimensions here are single digits (users by antennas), so everything is
//! written directly against row-major `Vec<Complex64>` storage: products,
//! Gram matrices, a Cholesky factorization for Hermitian positive definite
//! systems, and the right pseudo-inverse used by zero-forcing precoders.

use num_complex::Complex64;

use crate::Error;

/// Relative pivot threshold below which a Cholesky factorization declares
/// the matrix singular.
const PIVOT_RTOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![Complex64::new(0.0, 0.0); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Complex64::new(1.0, 0.0));
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<Complex64>>) -> Result<Self, Error> {
        if rows.is_empty() {
            return Err(Error::InvalidConfig("matrix needs at least one row".into()));
        }
        let cols = rows[0].len();
        if cols == 0 || rows.iter().any(|r| r.len() != cols) {
            return Err(Error::InvalidConfig("matrix rows must share a nonzero length".into()));
        }
        let data: Vec<Complex64> = rows.into_iter().flatten().collect();
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Domain("matrix entries must be finite".into()));
        }
        Ok(Self { rows: data.len() / cols, cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: Complex64) {
        self.data[r * self.cols + c] = v;
    }

    #[inline]
    pub fn row(&self, r: usize) -> &[Complex64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn conj_transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self.get(c, r).conj())
    }

    pub fn mul(&self, other: &Self) -> Result<Self, Error> {
        if self.cols != other.rows {
            return Err(Error::InvalidConfig(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                for c in 0..other.cols {
                    let v = out.get(r, c) + a * other.get(k, c);
                    out.set(r, c, v);
                }
            }
        }
        Ok(out)
    }

    /// Matrix-vector product `A v`.
    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.cols, "vector length must match matrix columns");
        (0..self.rows)
            .map(|r| self.row(r).iter().zip(v).map(|(a, x)| a * x).sum())
            .collect()
    }

    /// Gram matrix `A A^H` (users by users for a channel matrix).
    pub fn gram(&self) -> Self {
        let mut g = Self::zeros(self.rows, self.rows);
        for r in 0..self.rows {
            for c in 0..=r {
                let v: Complex64 =
                    self.row(r).iter().zip(self.row(c)).map(|(a, b)| a * b.conj()).sum();
                g.set(r, c, v);
                g.set(c, r, v.conj());
            }
        }
        g
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Cholesky factorization `A = L L^H` of a Hermitian positive definite
    /// matrix. Pivots at or below `1e-12 * ||A||_F` report [`Error::SingularMatrix`].
    pub fn cholesky(&self) -> Result<CholeskyFactor, Error> {
        if self.rows != self.cols {
            return Err(Error::InvalidConfig("cholesky needs a square matrix".into()));
        }
        let n = self.rows;
        let tol = PIVOT_RTOL * self.frobenius_norm();
        let mut l = Self::zeros(n, n);
        for j in 0..n {
            let mut d = self.get(j, j).re;
            for k in 0..j {
                d -= l.get(j, k).norm_sqr();
            }
            if !(d.is_finite()) || d <= tol {
                return Err(Error::SingularMatrix);
            }
            let dj = d.sqrt();
            l.set(j, j, Complex64::new(dj, 0.0));
            for i in j + 1..n {
                let mut v = self.get(i, j);
                for k in 0..j {
                    v -= l.get(i, k) * l.get(j, k).conj();
                }
                l.set(i, j, v / dj);
            }
        }
        Ok(CholeskyFactor { l })
    }

    /// Solves `A x = b` for Hermitian positive definite `A`.
    pub fn hermitian_solve(&self, b: &[Complex64]) -> Result<Vec<Complex64>, Error> {
        Ok(self.cholesky()?.solve(b))
    }

    /// Inverse of a Hermitian positive definite matrix via Cholesky.
    pub fn hermitian_inverse(&self) -> Result<Self, Error> {
        let chol = self.cholesky()?;
        let n = self.rows;
        let mut inv = Self::zeros(n, n);
        let mut e = vec![Complex64::new(0.0, 0.0); n];
        for c in 0..n {
            e[c] = Complex64::new(1.0, 0.0);
            let col = chol.solve(&e);
            e[c] = Complex64::new(0.0, 0.0);
            for r in 0..n {
                inv.set(r, c, col[r]);
            }
        }
        Ok(inv)
    }

    /// Right pseudo-inverse `A^H (A A^H)^{-1}` of a full row rank matrix,
    /// satisfying `A A^+ = I`.
    pub fn right_pseudo_inverse(&self) -> Result<Self, Error> {
        if self.rows > self.cols {
            return Err(Error::InvalidConfig(format!(
                "right pseudo-inverse needs rows <= cols, got {}x{}",
                self.rows, self.cols
            )));
        }
        let ginv = self.gram().hermitian_inverse()?;
        self.conj_transpose().mul(&ginv)
    }
}

/// Lower-triangular Cholesky factor with forward/backward substitution.
#[derive(Clone, Debug)]
pub struct CholeskyFactor {
    l: ComplexMatrix,
}

impl CholeskyFactor {
    /// Solves `L L^H x = b`.
    pub fn solve(&self, b: &[Complex64]) -> Vec<Complex64> {
        let n = self.l.rows();
        assert_eq!(b.len(), n, "rhs length must match matrix size");
        let mut y = b.to_vec();
        for i in 0..n {
            for k in 0..i {
                let lik = self.l.get(i, k);
                y[i] = y[i] - lik * y[k];
            }
            y[i] /= self.l.get(i, i);
        }
        for i in (0..n).rev() {
            for k in i + 1..n {
                let lki = self.l.get(k, i).conj();
                y[i] = y[i] - lki * y[k];
            }
            y[i] /= self.l.get(i, i);
        }
        y
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn max_abs_diff(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
        let mut worst = 0.0f64;
        for r in 0..a.rows() {
            for cc in 0..a.cols() {
                worst = worst.max((a.get(r, cc) - b.get(r, cc)).norm());
            }
        }
        worst
    }

    /// Deterministic pseudo-random matrix for tests, no RNG dependency here.
    fn test_matrix(rows: usize, cols: usize, salt: u64) -> ComplexMatrix {
        let mut state = salt.wrapping_mul(0x9E3779B97F4A7C15).wrapping_add(1);
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        ComplexMatrix::from_fn(rows, cols, |_, _| c(next(), next()))
    }

    #[test]
    fn gram_of_identity_is_identity() {
        let h = ComplexMatrix::identity(2);
        assert!(max_abs_diff(&h.gram(), &ComplexMatrix::identity(2)) < 1e-15);
    }

    #[test]
    fn gram_of_row_vector() {
        let h = ComplexMatrix::from_rows(vec![vec![c(1.0, 0.0), c(0.0, 1.0)]]).unwrap();
        let g = h.gram();
        assert_eq!(g.rows(), 1);
        assert!((g.get(0, 0) - c(2.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn inverse_of_identity_and_diagonal() {
        let eye = ComplexMatrix::identity(2);
        assert!(max_abs_diff(&eye.hermitian_inverse().unwrap(), &eye) < 1e-14);

        let d = ComplexMatrix::from_rows(vec![
            vec![c(2.0, 0.0), c(0.0, 0.0)],
            vec![c(0.0, 0.0), c(4.0, 0.0)],
        ])
        .unwrap();
        let want = ComplexMatrix::from_rows(vec![
            vec![c(0.5, 0.0), c(0.0, 0.0)],
            vec![c(0.0, 0.0), c(0.25, 0.0)],
        ])
        .unwrap();
        assert!(max_abs_diff(&d.hermitian_inverse().unwrap(), &want) < 1e-14);
    }

    #[test]
    fn right_pseudo_inverse_of_diagonal() {
        let h = ComplexMatrix::from_rows(vec![
            vec![c(2.0, 0.0), c(0.0, 0.0)],
            vec![c(0.0, 0.0), c(1.0, 0.0)],
        ])
        .unwrap();
        let pinv = h.right_pseudo_inverse().unwrap();
        assert!((pinv.get(0, 0) - c(0.5, 0.0)).norm() < 1e-14);
        assert!((pinv.get(1, 1) - c(1.0, 0.0)).norm() < 1e-14);
        assert!(pinv.get(0, 1).norm() < 1e-14);
    }

    #[test]
    fn right_pseudo_inverse_is_right_identity() {
        for salt in 0..20 {
            let h = test_matrix(2, 4, salt);
            let pinv = h.right_pseudo_inverse().unwrap();
            let prod = h.mul(&pinv).unwrap();
            assert!(max_abs_diff(&prod, &ComplexMatrix::identity(2)) < 1e-10);
        }
    }

    #[test]
    fn singular_matrix_is_detected() {
        // Rank one: second row equals the first.
        let row = vec![c(1.0, 0.5), c(-0.3, 0.2)];
        let h = ComplexMatrix::from_rows(vec![row.clone(), row]).unwrap();
        assert!(matches!(h.gram().hermitian_inverse(), Err(Error::SingularMatrix)));
    }

    #[test]
    fn hermitian_solve_matches_inverse() {
        let g = test_matrix(3, 5, 9).gram();
        let b = vec![c(1.0, -2.0), c(0.5, 0.0), c(-1.0, 1.0)];
        let x = g.hermitian_solve(&b).unwrap();
        let back = g.mul_vec(&x);
        for (bi, yi) in b.iter().zip(&back) {
            assert!((bi - yi).norm() < 1e-10);
        }
    }

    #[test]
    fn nan_entries_are_rejected() {
        let r = ComplexMatrix::from_rows(vec![vec![c(f64::NAN, 0.0)]]);
        assert!(matches!(r, Err(Error::Domain(_))));
    }

    proptest! {
        // G + I is Hermitian positive definite with eigenvalues >= 1, so the
        // inverse must reproduce the identity to tight tolerance.
        #[test]
        fn inverse_residual_is_small(salt in 0u64..500) {
            let h = test_matrix(3, 6, salt);
            let mut a = h.gram();
            for i in 0..3 {
                let v = a.get(i, i) + c(1.0, 0.0);
                a.set(i, i, v);
            }
            let inv = a.hermitian_inverse().unwrap();
            let res = a.mul(&inv).unwrap();
            let err = max_abs_diff(&res, &ComplexMatrix::identity(3));
            prop_assert!(err <= 1e-10 * a.frobenius_norm().max(1.0));
        }

        #[test]
        fn double_inverse_returns_original(salt in 0u64..200) {
            let h = test_matrix(2, 4, salt);
            let mut a = h.gram();
            for i in 0..2 {
                let v = a.get(i, i) + c(1.0, 0.0);
                a.set(i, i, v);
            }
            let twice = a.hermitian_inverse().unwrap().hermitian_inverse().unwrap();
            prop_assert!(max_abs_diff(&twice, &a) <= 1e-8 * a.frobenius_norm());
        }

        #[test]
        fn gram_is_hermitian_psd(salt in 0u64..200) {
            let g = test_matrix(3, 4, salt).gram();
            for r in 0..3 {
                prop_assert!(g.get(r, r).im.abs() < 1e-14);
                prop_assert!(g.get(r, r).re >= -1e-14);
                for cc in 0..3 {
                    prop_assert!((g.get(r, cc) - g.get(cc, r).conj()).norm() < 1e-12);
                }
            }
        }
    }
}
