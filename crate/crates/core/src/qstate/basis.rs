use nalgebra::{DMatrix, DVector};

use crate::{Error, Result, C64};

/// Hilbert-Schmidt orthonormal basis of Hermitian operators on `C^d`.
///
/// Ordering: `1/√d`, then for every pair `j < k` the symmetric and
/// antisymmetric off-diagonal elements, then the `d - 1` traceless diagonal
/// elements. For `d = 2` this is exactly `{1, σx, σy, σz} / √2`.
#[derive(Clone, Debug)]
pub struct OperatorBasis {
    dim: usize,
    elements: Vec<DMatrix<C64>>,
}

impl OperatorBasis {
    pub fn new(dim: usize) -> Self {
        assert!(dim >= 1, "Hilbert space dimension must be positive");
        let zero = || DMatrix::<C64>::zeros(dim, dim);
        let mut elements = Vec::with_capacity(dim * dim);

        let mut id = zero();
        let s = 1.0 / (dim as f64).sqrt();
        for i in 0..dim {
            id[(i, i)] = C64::new(s, 0.0);
        }
        elements.push(id);

        let r = std::f64::consts::FRAC_1_SQRT_2;
        for j in 0..dim {
            for k in (j + 1)..dim {
                let mut sym = zero();
                sym[(j, k)] = C64::new(r, 0.0);
                sym[(k, j)] = C64::new(r, 0.0);
                elements.push(sym);

                let mut anti = zero();
                anti[(j, k)] = C64::new(0.0, -r);
                anti[(k, j)] = C64::new(0.0, r);
                elements.push(anti);
            }
        }

        for l in 1..dim {
            let mut diag = zero();
            let norm = 1.0 / ((l * (l + 1)) as f64).sqrt();
            for m in 0..l {
                diag[(m, m)] = C64::new(norm, 0.0);
            }
            diag[(l, l)] = C64::new(-(l as f64) * norm, 0.0);
            elements.push(diag);
        }

        Self { dim, elements }
    }

    pub fn qubit() -> Self {
        Self::new(2)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of basis elements, `d²`.
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn element(&self, i: usize) -> &DMatrix<C64> {
        &self.elements[i]
    }

    fn check(&self, op: &DMatrix<C64>) -> Result<()> {
        if op.nrows() != self.dim || op.ncols() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: op.nrows() });
        }
        Ok(())
    }

    /// Complex coefficients `c_i = Tr[B_i X]`; valid for any operator `X`.
    pub fn complex_coefficients(&self, op: &DMatrix<C64>) -> Result<DVector<C64>> {
        self.check(op)?;
        let d = self.dim;
        Ok(DVector::from_iterator(
            self.len(),
            self.elements.iter().map(|b| {
                let mut acc = C64::new(0.0, 0.0);
                for i in 0..d {
                    for j in 0..d {
                        acc += b[(i, j)] * op[(j, i)];
                    }
                }
                acc
            }),
        ))
    }

    /// Real coefficients of a Hermitian operator. Imaginary parts, which
    /// vanish for Hermitian input, are discarded.
    pub fn coefficients(&self, op: &DMatrix<C64>) -> Result<DVector<f64>> {
        Ok(self.complex_coefficients(op)?.map(|c| c.re))
    }

    pub fn reconstruct_complex(&self, coeffs: &DVector<C64>) -> Result<DMatrix<C64>> {
        if coeffs.len() != self.len() {
            return Err(Error::DimensionMismatch { expected: self.len(), found: coeffs.len() });
        }
        let mut out = DMatrix::<C64>::zeros(self.dim, self.dim);
        for (c, b) in coeffs.iter().zip(&self.elements) {
            if *c != C64::new(0.0, 0.0) {
                out += b * *c;
            }
        }
        Ok(out)
    }

    pub fn reconstruct(&self, coeffs: &DVector<f64>) -> Result<DMatrix<C64>> {
        self.reconstruct_complex(&coeffs.map(|c| C64::new(c, 0.0)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn qubit_basis_is_scaled_paulis() {
        let b = OperatorBasis::qubit();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let c = |re: f64, im: f64| C64::new(re * r, im * r);
        let sx = DMatrix::from_row_slice(2, 2, &[c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)]);
        let sy = DMatrix::from_row_slice(2, 2, &[c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)]);
        let sz = DMatrix::from_row_slice(2, 2, &[c(1., 0.), c(0., 0.), c(0., 0.), c(-1., 0.)]);
        for (i, want) in [(1, sx), (2, sy), (3, sz)] {
            assert!((b.element(i) - want).camax() < 1e-15);
        }
    }

    #[test]
    fn basis_is_hs_orthonormal() {
        for d in 1..=4 {
            let b = OperatorBasis::new(d);
            assert_eq!(b.len(), d * d);
            for i in 0..b.len() {
                for j in 0..b.len() {
                    let ip = (b.element(i).adjoint() * b.element(j)).trace();
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert!((ip.re - want).abs() < 1e-14 && ip.im.abs() < 1e-14, "d={d} ({i},{j})");
                }
                let herm = b.element(i) - b.element(i).adjoint();
                assert!(herm.iter().all(|z| z.norm() < 1e-15));
            }
        }
    }
}
