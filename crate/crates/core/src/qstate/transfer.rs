use std::ops::{Add, Mul};

use nalgebra::{DMatrix, DVector};

use super::state::{from_pauli_vec_in, to_pauli_vec_in};
use super::{DensityMatrix, OperatorBasis, PauliVec};
use crate::{Error, Result};

/// Real `d² x d²` representation of a Hermiticity-preserving linear map in the
/// orthonormal operator basis. Composition is matrix multiplication:
/// `(A * B)` applies `B` first.
#[derive(Clone, Debug, PartialEq)]
pub struct TransferMatrix {
    dim: usize,
    matrix: DMatrix<f64>,
}

impl TransferMatrix {
    pub fn new(dim: usize, matrix: DMatrix<f64>) -> Result<Self> {
        let n = dim * dim;
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(Error::DimensionMismatch { expected: n, found: matrix.nrows() });
        }
        Ok(Self { dim, matrix })
    }

    pub fn identity(dim: usize) -> Self {
        let n = dim * dim;
        Self { dim, matrix: DMatrix::identity(n, n) }
    }

    pub fn zeros(dim: usize) -> Self {
        let n = dim * dim;
        Self { dim, matrix: DMatrix::zeros(n, n) }
    }

    pub fn from_diagonal(dim: usize, diag: &[f64]) -> Result<Self> {
        if diag.len() != dim * dim {
            return Err(Error::DimensionMismatch { expected: dim * dim, found: diag.len() });
        }
        Ok(Self { dim, matrix: DMatrix::from_diagonal(&DVector::from_column_slice(diag)) })
    }

    /// Qubit map `diag(1, x, y, z) + B(w)`.
    pub fn diagonal_plus_corner(x: f64, y: f64, z: f64, w: f64) -> Self {
        let mut m = DMatrix::from_diagonal(&DVector::from_column_slice(&[1.0, x, y, z]));
        m[(3, 0)] = w;
        Self { dim: 2, matrix: m }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Side length of the matrix, `d²`.
    pub fn size(&self) -> usize {
        self.dim * self.dim
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.matrix
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.matrix[(i, j)]
    }

    /// Max deviation of the first row from `(1, 0, ..., 0)`.
    pub fn tp_residual(&self) -> f64 {
        (0..self.size())
            .map(|j| (self.matrix[(0, j)] - if j == 0 { 1.0 } else { 0.0 }).abs())
            .fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (&self.matrix - &other.matrix).amax()
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { dim: self.dim, matrix: &self.matrix * s }
    }

    pub fn apply_vec(&self, v: &PauliVec) -> Result<PauliVec> {
        if v.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: v.dim() });
        }
        PauliVec::new(self.dim, &self.matrix * v.coeffs())
    }

    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        if rho.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: rho.dim() });
        }
        let basis = OperatorBasis::new(self.dim);
        let v = to_pauli_vec_in(&basis, rho)?;
        from_pauli_vec_in(&basis, &self.apply_vec(&v)?)
    }

    /// Diagonal-plus-corner entries `(x, y, z, w)` of a qubit map whose other
    /// entries vanish within `tol`.
    pub fn diagonal_plus_corner_entries(&self, tol: f64) -> Option<[f64; 4]> {
        if self.dim != 2 {
            return None;
        }
        for i in 0..4 {
            for j in 0..4 {
                if i == j || (i == 3 && j == 0) {
                    continue;
                }
                if self.matrix[(i, j)].abs() > tol {
                    return None;
                }
            }
        }
        let m = &self.matrix;
        Some([m[(1, 1)], m[(2, 2)], m[(3, 3)], m[(3, 0)]])
    }
}

impl Mul for &TransferMatrix {
    type Output = TransferMatrix;

    fn mul(self, rhs: &TransferMatrix) -> TransferMatrix {
        assert_eq!(self.dim, rhs.dim, "composing maps of different dimension");
        TransferMatrix { dim: self.dim, matrix: &self.matrix * &rhs.matrix }
    }
}

impl Add for &TransferMatrix {
    type Output = TransferMatrix;

    fn add(self, rhs: &TransferMatrix) -> TransferMatrix {
        assert_eq!(self.dim, rhs.dim, "adding maps of different dimension");
        TransferMatrix { dim: self.dim, matrix: &self.matrix + &rhs.matrix }
    }
}

/// Applies `map` to `rho` through the vectorised representation.
pub fn apply_map(map: &TransferMatrix, rho: &DensityMatrix) -> Result<DensityMatrix> {
    map.apply(rho)
}

/// The matrix `B(x)` with `x` in the bottom-left corner and zeros elsewhere.
/// Adding it to a transfer matrix never touches the first row.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CornerMatrix {
    pub x: f64,
}

impl CornerMatrix {
    pub fn new(x: f64) -> Self {
        Self { x }
    }

    pub fn to_transfer(self, dim: usize) -> TransferMatrix {
        let mut t = TransferMatrix::zeros(dim);
        let n = t.size();
        t.matrix[(n - 1, 0)] = self.x;
        t
    }
}

impl Add<CornerMatrix> for &TransferMatrix {
    type Output = TransferMatrix;

    fn add(self, rhs: CornerMatrix) -> TransferMatrix {
        self + &rhs.to_transfer(self.dim)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::C64;

    #[test]
    fn identity_leaves_state_unchanged() {
        let rho = DensityMatrix::from_bloch(0.3, -0.2, 0.5).unwrap();
        let out = apply_map(&TransferMatrix::identity(2), &rho).unwrap();
        assert!(out.max_abs_diff(&rho) < 1e-15);
    }

    #[test]
    fn full_dephasing_kills_coherence() {
        let m = TransferMatrix::from_diagonal(2, &[1.0, 0.0, 0.0, 1.0]).unwrap();
        let plus = DensityMatrix::from_bloch(1.0, 0.0, 0.0).unwrap();
        let out = m.apply(&plus).unwrap();
        assert!(out.max_abs_diff(&DensityMatrix::maximally_mixed(2)) < 1e-15);
    }

    #[test]
    fn sigma_x_conjugation_flips_ground_state() {
        let m = TransferMatrix::from_diagonal(2, &[1.0, 1.0, -1.0, -1.0]).unwrap();
        let ket0 = DensityMatrix::basis_state(2, 0);
        // direct σx ρ σx
        let sx = nalgebra::DMatrix::from_row_slice(
            2,
            2,
            &[C64::new(0., 0.), C64::new(1., 0.), C64::new(1., 0.), C64::new(0., 0.)],
        );
        let direct = &sx * ket0.matrix() * &sx;
        let out = m.apply(&ket0).unwrap();
        assert!((out.matrix() - direct).iter().all(|z| z.norm() < 1e-15));
        assert!(out.max_abs_diff(&DensityMatrix::basis_state(2, 1)) < 1e-15);
    }

    #[test]
    fn corner_keeps_first_row() {
        let m = &TransferMatrix::identity(2) + CornerMatrix::new(-0.7);
        assert_eq!(m.tp_residual(), 0.0);
        assert_eq!(m.get(3, 0), -0.7);
        assert_eq!(m.diagonal_plus_corner_entries(0.0), Some([1.0, 1.0, 1.0, -0.7]));
    }

    #[test]
    fn apply_rejects_wrong_dimension() {
        let rho = DensityMatrix::maximally_mixed(3);
        assert!(matches!(
            TransferMatrix::identity(2).apply(&rho),
            Err(Error::DimensionMismatch { .. })
        ));
    }
}
