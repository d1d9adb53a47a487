//! Small dense Hermitian eigenproblems (one per fiber).

use alloc::vec::Vec;

use nalgebra::DMatrix;
use num_complex::Complex64;

pub(crate) struct HermitianEigen {
    pub values: Vec<f64>,
    /// Column `c` is the eigenvector for `values[c]`.
    vectors: DMatrix<Complex64>,
}

impl HermitianEigen {
    /// `matrix` is `n × n`, row-major, and assumed Hermitian.
    pub fn new(matrix: &[Complex64], n: usize) -> Self {
        let m = DMatrix::from_row_slice(n, n, matrix);
        let eig = m.symmetric_eigen();
        Self {
            values: eig.eigenvalues.iter().copied().collect(),
            vectors: eig.eigenvectors,
        }
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// `Σ_{λ > cutoff} v (v^H rhs) / λ`.
    pub fn pinv_apply(&self, rhs: &[Complex64], cutoff: f64) -> Vec<Complex64> {
        let n = rhs.len();
        let mut out = alloc::vec![Complex64::new(0.0, 0.0); n];
        for (c, &lambda) in self.values.iter().enumerate() {
            if lambda <= cutoff {
                continue;
            }
            let v = self.vectors.column(c);
            let proj = v.iter().zip(rhs).fold(Complex64::new(0.0, 0.0), |acc, (a, b)| acc + a.conj() * b);
            let scale = proj / lambda;
            for (o, a) in out.iter_mut().zip(v.iter()) {
                *o += a * scale;
            }
        }
        out
    }
}
