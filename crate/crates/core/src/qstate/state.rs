use nalgebra::{DMatrix, DVector};

use super::{OperatorBasis, EIGEN_TOL, HERMITIAN_TOL, TRACE_TOL};
use crate::{Error, Result, C64};

/// A `d x d` Hermitian operator, normally a unit-trace positive state.
///
/// [`DensityMatrix::new`] enforces the state invariants. Operators built by
/// [`from_pauli_vec`], [`DensityMatrix::difference`] or the unchecked
/// constructor skip the positivity and trace checks so that state
/// differences can flow through the same API.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    matrix: DMatrix<C64>,
}

fn max_hermitian_defect(m: &DMatrix<C64>) -> f64 {
    let mut worst = 0.0_f64;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

impl DensityMatrix {
    pub fn new(matrix: DMatrix<C64>) -> Result<Self> {
        let rho = Self::from_matrix_unchecked(matrix)?;
        rho.validate()?;
        Ok(rho)
    }

    /// Accepts any square matrix; only the shape is checked.
    pub fn from_matrix_unchecked(matrix: DMatrix<C64>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() || matrix.nrows() == 0 {
            return Err(Error::InvalidState(format!(
                "matrix must be square and non-empty, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        Ok(Self { matrix })
    }

    pub fn validate(&self) -> Result<()> {
        let herm = max_hermitian_defect(&self.matrix);
        if herm > HERMITIAN_TOL {
            return Err(Error::InvalidState(format!("not Hermitian (defect {herm:e})")));
        }
        let tr = self.matrix.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::InvalidState(format!("trace {tr} differs from 1")));
        }
        let min = self.min_eigenvalue();
        if min < -EIGEN_TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {min:e}")));
        }
        Ok(())
    }

    pub fn is_state(&self) -> bool {
        self.validate().is_ok()
    }

    /// `|ψ⟩⟨ψ|` for the normalised vector `ψ`.
    pub fn pure(psi: &[C64]) -> Result<Self> {
        let v = DVector::from_column_slice(psi);
        let norm = v.norm();
        if psi.is_empty() || norm == 0.0 {
            return Err(Error::InvalidState("zero state vector".into()));
        }
        let v = v / C64::new(norm, 0.0);
        Self::new(&v * v.adjoint())
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        let mut m = DMatrix::<C64>::zeros(dim, dim);
        for i in 0..dim {
            m[(i, i)] = C64::new(1.0 / dim as f64, 0.0);
        }
        Self { matrix: m }
    }

    /// Computational basis projector `|k⟩⟨k|`.
    pub fn basis_state(dim: usize, k: usize) -> Self {
        let mut m = DMatrix::<C64>::zeros(dim, dim);
        m[(k, k)] = C64::new(1.0, 0.0);
        Self { matrix: m }
    }

    /// Qubit state `(1 + x σx + y σy + z σz) / 2`; requires `|r| ≤ 1`.
    pub fn from_bloch(x: f64, y: f64, z: f64) -> Result<Self> {
        let m = DMatrix::from_row_slice(
            2,
            2,
            &[
                C64::new((1.0 + z) / 2.0, 0.0),
                C64::new(x / 2.0, -y / 2.0),
                C64::new(x / 2.0, y / 2.0),
                C64::new((1.0 - z) / 2.0, 0.0),
            ],
        );
        Self::new(m)
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.matrix
    }

    /// `self - other`, a traceless Hermitian operator for two states.
    pub fn difference(&self, other: &Self) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: other.dim() });
        }
        Ok(Self { matrix: &self.matrix - &other.matrix })
    }

    pub fn eigenvalues(&self) -> DVector<f64> {
        self.matrix.clone().symmetric_eigenvalues()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues().min()
    }

    /// Largest elementwise deviation from another operator.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.matrix
            .iter()
            .zip(other.matrix.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// Coefficients of a Hermitian operator on the orthonormal basis of its
/// dimension (see [`OperatorBasis`]).
#[derive(Clone, Debug, PartialEq)]
pub struct PauliVec {
    dim: usize,
    coeffs: DVector<f64>,
}

impl PauliVec {
    pub fn new(dim: usize, coeffs: DVector<f64>) -> Result<Self> {
        if coeffs.len() != dim * dim {
            return Err(Error::DimensionMismatch { expected: dim * dim, found: coeffs.len() });
        }
        Ok(Self { dim, coeffs })
    }

    pub fn from_slice(dim: usize, coeffs: &[f64]) -> Result<Self> {
        Self::new(dim, DVector::from_column_slice(coeffs))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coeffs(&self) -> &DVector<f64> {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> DVector<f64> {
        self.coeffs
    }
}

pub fn to_pauli_vec(rho: &DensityMatrix) -> PauliVec {
    let basis = OperatorBasis::new(rho.dim());
    to_pauli_vec_in(&basis, rho).expect("basis built for this dimension")
}

pub(crate) fn to_pauli_vec_in(basis: &OperatorBasis, rho: &DensityMatrix) -> Result<PauliVec> {
    let coeffs = basis.coefficients(rho.matrix())?;
    Ok(PauliVec { dim: basis.dim(), coeffs })
}

/// Inverse of [`to_pauli_vec`]. Positivity is not enforced.
pub fn from_pauli_vec(v: &PauliVec) -> DensityMatrix {
    let basis = OperatorBasis::new(v.dim);
    from_pauli_vec_in(&basis, v).expect("basis built for this dimension")
}

pub(crate) fn from_pauli_vec_in(basis: &OperatorBasis, v: &PauliVec) -> Result<DensityMatrix> {
    let m = basis.reconstruct(&v.coeffs)?;
    DensityMatrix::from_matrix_unchecked(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2 as R;

    fn close(a: &DensityMatrix, b: &DensityMatrix, tol: f64) -> bool {
        a.max_abs_diff(b) <= tol
    }

    #[test]
    fn maximally_mixed_vector() {
        let v = to_pauli_vec(&DensityMatrix::maximally_mixed(2));
        let want = [R, 0.0, 0.0, 0.0];
        for (a, b) in v.coeffs().iter().zip(want) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn ground_projector_vector() {
        let v = to_pauli_vec(&DensityMatrix::basis_state(2, 0));
        let want = [R, 0.0, 0.0, R];
        for (a, b) in v.coeffs().iter().zip(want) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn from_vec_examples() {
        let mixed = from_pauli_vec(&PauliVec::from_slice(2, &[R, 0.0, 0.0, 0.0]).unwrap());
        assert!(close(&mixed, &DensityMatrix::maximally_mixed(2), 1e-15));

        let plus = from_pauli_vec(&PauliVec::from_slice(2, &[R, R, 0.0, 0.0]).unwrap());
        assert!(close(&plus, &DensityMatrix::from_bloch(1.0, 0.0, 0.0).unwrap(), 1e-15));

        // σz/2 is traceless and not a state, but representable.
        let half_z = from_pauli_vec(&PauliVec::from_slice(2, &[0.0, 0.0, 0.0, R]).unwrap());
        assert!((half_z.matrix()[(0, 0)].re - 0.5).abs() < 1e-15);
        assert!((half_z.matrix()[(1, 1)].re + 0.5).abs() < 1e-15);
        assert!(!half_z.is_state());
    }

    #[test]
    fn validation_rejects_non_states() {
        let m = DMatrix::from_row_slice(
            2,
            2,
            &[C64::new(1.2, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(-0.2, 0.0)],
        );
        assert!(matches!(DensityMatrix::new(m), Err(Error::InvalidState(_))));
        let m = DMatrix::from_row_slice(
            2,
            2,
            &[C64::new(0.5, 0.0), C64::new(0.1, 0.0), C64::new(0.2, 0.0), C64::new(0.5, 0.0)],
        );
        assert!(DensityMatrix::new(m).is_err());
        assert!(DensityMatrix::from_bloch(0.0, 0.0, 1.1).is_err());
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let basis = OperatorBasis::new(3);
        let rho = DensityMatrix::maximally_mixed(2);
        assert!(matches!(
            to_pauli_vec_in(&basis, &rho),
            Err(Error::DimensionMismatch { expected: 3, found: 2 })
        ));
        assert!(PauliVec::from_slice(2, &[1.0, 0.0]).is_err());
    }
}
