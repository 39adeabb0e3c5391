//! Dense spectral decompositions.

use nalgebra::{ComplexField, DMatrix, DVector};
use num_complex::Complex64;

/// Ascending eigenvalues and orthonormal eigenvectors (as columns) of a
/// symmetric or Hermitian matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDecomposition<T: nalgebra::Scalar = f64> {
    pub values: DVector<f64>,
    pub vectors: DMatrix<T>,
}

impl<T> SpectralDecomposition<T>
where
    T: ComplexField<RealField = f64> + Copy,
{
    /// Decompose a Hermitian matrix. Only the lower triangle is read.
    pub fn hermitian(m: DMatrix<T>) -> Self {
        let n = m.nrows();
        assert_eq!(n, m.ncols(), "matrix must be square");
        let eig = m.symmetric_eigen();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let values = DVector::from_iterator(n, order.iter().map(|&i| eig.eigenvalues[i]));
        let mut vectors = DMatrix::zeros(n, n);
        for (dst, &src) in order.iter().enumerate() {
            vectors.set_column(dst, &eig.eigenvectors.column(src));
        }
        Self { values, vectors }
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn vector(&self, i: usize) -> DVector<T> {
        self.vectors.column(i).into_owned()
    }

    /// Overlaps `<v_i|psi>` for every eigenvector.
    pub fn overlaps(&self, psi: &DVector<T>) -> DVector<T> {
        self.vectors.ad_mul(psi)
    }

    /// `max |A v - lambda v|` over all pairs, as a residual check against `m`.
    pub fn residual(&self, m: &DMatrix<T>) -> f64 {
        let av = m * &self.vectors;
        let mut worst = 0.0_f64;
        for (i, &lam) in self.values.iter().enumerate() {
            let r = av.column(i) - self.vectors.column(i) * T::from_real(lam);
            worst = worst.max(r.norm());
        }
        worst
    }
}

impl SpectralDecomposition<f64> {
    pub fn to_complex(&self) -> SpectralDecomposition<Complex64> {
        SpectralDecomposition {
            values: self.values.clone(),
            vectors: self.vectors.map(|x| Complex64::new(x, 0.0)),
        }
    }

    /// Flip the sign of eigenvector `i` so its entries sum to a nonnegative value.
    pub(crate) fn orient_positive(&mut self, i: usize) {
        if self.vectors.column(i).sum() < 0.0 {
            let mut col = self.vectors.column_mut(i);
            col.neg_mut();
        }
    }
}

/// Embed a real vector as complex amplitudes.
pub fn complexify(v: &DVector<f64>) -> DVector<Complex64> {
    v.map(|x| Complex64::new(x, 0.0))
}
