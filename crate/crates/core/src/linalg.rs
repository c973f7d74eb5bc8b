//! Small dense-matrix helpers on top of `nalgebra`.

use nalgebra::SymmetricEigen;

use crate::{CMatrix, C64};

pub fn trace(m: &CMatrix) -> C64 {
    m.diagonal().iter().sum()
}

/// Eigenvalues of a Hermitian matrix in ascending order.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    let mut ev: Vec<f64> = SymmetricEigen::new(m.clone()).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Eigen-decomposition `m = sum_k w_k |v_k><v_k|` with ascending weights.
pub fn hermitian_eigen(m: &CMatrix) -> Vec<(f64, Vec<C64>)> {
    let eig = SymmetricEigen::new(m.clone());
    let mut out: Vec<(f64, Vec<C64>)> = eig
        .eigenvalues
        .iter()
        .enumerate()
        .map(|(k, &w)| (w, eig.eigenvectors.column(k).iter().copied().collect()))
        .collect();
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    out
}

/// Largest entrywise deviation from Hermiticity.
pub fn hermiticity_defect(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Copy `m` into the top-left block of a `dim x dim` zero matrix, or take its
/// top-left `dim x dim` block when `dim` is smaller.
pub fn resize(m: &CMatrix, dim: usize) -> CMatrix {
    let mut out = CMatrix::zeros(dim, dim);
    let k = dim.min(m.nrows());
    out.view_mut((0, 0), (k, k)).copy_from(&m.view((0, 0), (k, k)));
    out
}

/// Half the sum of absolute eigenvalues of `a - b`, after padding both to a
/// common dimension.
pub fn trace_distance(a: &CMatrix, b: &CMatrix) -> f64 {
    let dim = a.nrows().max(b.nrows());
    let diff = resize(a, dim) - resize(b, dim);
    0.5 * hermitian_eigenvalues(&diff).iter().map(|x| x.abs()).sum::<f64>()
}

/// `Tr[a b]` over the common top-left block.
pub fn trace_product(a: &CMatrix, b: &CMatrix) -> C64 {
    let n = a.nrows().min(b.nrows());
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            acc += a[(i, j)] * b[(j, i)];
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn pauli_y_eigenvalues() {
        let m = CMatrix::from_row_slice(2, 2, &[c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)]);
        let ev = hermitian_eigenvalues(&m);
        assert!((ev[0] + 1.0).abs() < 1e-14 && (ev[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn trace_distance_orthogonal_projectors() {
        let mut a = CMatrix::zeros(2, 2);
        a[(0, 0)] = c(1., 0.);
        let mut b = CMatrix::zeros(3, 3);
        b[(2, 2)] = c(1., 0.);
        assert!((trace_distance(&a, &b) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn resize_pads_and_crops() {
        let m = CMatrix::from_element(2, 2, c(1., 1.));
        let big = resize(&m, 4);
        assert_eq!(big[(1, 1)], c(1., 1.));
        assert_eq!(big[(3, 3)], c(0., 0.));
        assert_eq!(resize(&big, 1).nrows(), 1);
    }
}
