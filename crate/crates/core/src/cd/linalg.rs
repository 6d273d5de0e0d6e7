use alloc::vec::Vec;

use nalgebra::SymmetricEigen;
use num_complex::Complex64;

#[allow(unused_imports)]
use crate::prelude::*;

use super::CMatrix;

/// Eigenvalues in ascending order with the matching eigenvectors as columns.
pub fn hermitian_eigen(h: &CMatrix) -> (Vec<f64>, CMatrix) {
    let d = h.nrows();
    let eig = SymmetricEigen::new(h.clone());
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = CMatrix::from_fn(d, d, |i, j| eig.eigenvectors[(i, order[j])]);
    (values, vectors)
}

/// ‖H − H†‖_F relative to ‖H‖_F (absolute when H = 0).
pub fn hermiticity_defect(h: &CMatrix) -> f64 {
    let defect = (h - h.adjoint()).norm();
    let scale = h.norm();
    if scale > 0.0 {
        defect / scale
    } else {
        defect
    }
}

/// exp(−i H · `time_over_hbar`) through the eigendecomposition of Hermitian `h`.
pub fn exp_hermitian(h: &CMatrix, time_over_hbar: f64) -> CMatrix {
    let (values, vectors) = hermitian_eigen(h);
    exp_from_eigen(&values, &vectors, time_over_hbar)
}

pub(crate) fn exp_from_eigen(values: &[f64], vectors: &CMatrix, time_over_hbar: f64) -> CMatrix {
    let mut scaled = vectors.clone();
    for (j, &e) in values.iter().enumerate() {
        let phase = Complex64::from_polar(1.0, -e * time_over_hbar);
        for i in 0..scaled.nrows() {
            scaled[(i, j)] *= phase;
        }
    }
    scaled * vectors.adjoint()
}

pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}
