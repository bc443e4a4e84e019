//! Small dense linear-algebra helpers used by the oracle and norm checks.

use nalgebra::DMatrix;

use crate::pauli::C64;

/// Eigenvalues of a Hermitian matrix in ascending order.
pub fn hermitian_eigenvalues(m: &DMatrix<C64>) -> Vec<f64> {
    let mut v: Vec<f64> = m.clone().symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(|a, b| a.total_cmp(b));
    v
}

/// Largest singular value.
pub fn spectral_norm(m: &DMatrix<C64>) -> f64 {
    if m.nrows() == 0 {
        return 0.0;
    }
    m.clone().singular_values().iter().copied().fold(0.0, f64::max)
}

/// Eigendecomposition `H = V diag(w) V^dagger` of a Hermitian matrix.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: DMatrix<C64>,
}

impl HermitianEigen {
    pub fn new(h: &DMatrix<C64>) -> Self {
        let e = h.clone().symmetric_eigen();
        HermitianEigen { values: e.eigenvalues.iter().copied().collect(), vectors: e.eigenvectors }
    }

    /// `e^{-i t H}` as a dense matrix.
    pub fn expm_minus_i(&self, t: f64) -> DMatrix<C64> {
        let v = &self.vectors;
        let mut scaled = v.clone();
        for (k, &w) in self.values.iter().enumerate() {
            let ph = C64::from_polar(1.0, -t * w);
            for r in 0..scaled.nrows() {
                scaled[(r, k)] *= ph;
            }
        }
        scaled * v.adjoint()
    }
}

/// `e^{-i t H}` for a Hermitian `H`.
pub fn expm_hermitian(h: &DMatrix<C64>, t: f64) -> DMatrix<C64> {
    HermitianEigen::new(h).expm_minus_i(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expm_of_pauli_x() {
        let (o, z) = (C64::new(1.0, 0.0), C64::new(0.0, 0.0));
        let x = DMatrix::from_row_slice(2, 2, &[z, o, o, z]);
        let t = 0.3f64;
        let u = expm_hermitian(&x, t);
        assert!((u[(0, 0)] - C64::new(t.cos(), 0.0)).norm() < 1e-14);
        assert!((u[(0, 1)] - C64::new(0.0, -t.sin())).norm() < 1e-14);
        assert!((spectral_norm(&x) - 1.0).abs() < 1e-14);
        assert_eq!(hermitian_eigenvalues(&x).len(), 2);
    }
}
