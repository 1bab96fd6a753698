use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::{OperatorBasis, TransferMatrix};
use crate::C64;

/// Default PSD tolerance on Choi eigenvalues (engine output carries O(h²) error).
pub const DEFAULT_PSD_TOL: f64 = 1e-8;
/// Default tolerance on the first-row trace-preservation residual.
pub const DEFAULT_TP_TOL: f64 = 1e-10;

/// Unnormalised Choi matrix `Σ_ij |i⟩⟨j| ⊗ Φ(|i⟩⟨j|)`, indexed as
/// `(input, output)` with row `i·d + a`.
#[derive(Clone, Debug, PartialEq)]
pub struct ChoiMatrix {
    dim: usize,
    matrix: DMatrix<C64>,
}

impl ChoiMatrix {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn eigenvalues(&self) -> DVector<f64> {
        self.matrix.clone().symmetric_eigenvalues()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues().min()
    }

    pub fn hermitian_defect(&self) -> f64 {
        (&self.matrix - self.matrix.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Trace over the output factor; the identity for a trace-preserving map.
    pub fn partial_trace_output(&self) -> DMatrix<C64> {
        let d = self.dim;
        DMatrix::from_fn(d, d, |i, j| (0..d).map(|a| self.matrix[(i * d + a, j * d + a)]).sum())
    }
}

pub fn choi_of(map: &TransferMatrix) -> ChoiMatrix {
    let d = map.dim();
    let basis = OperatorBasis::new(d);
    let m = map.matrix().map(|x| C64::new(x, 0.0));
    let mut choi = DMatrix::<C64>::zeros(d * d, d * d);
    for i in 0..d {
        for j in 0..d {
            let mut unit = DMatrix::<C64>::zeros(d, d);
            unit[(i, j)] = C64::new(1.0, 0.0);
            let coeffs = basis.complex_coefficients(&unit).expect("dimensions agree");
            let image = basis.reconstruct_complex(&(&m * coeffs)).expect("dimensions agree");
            for a in 0..d {
                for b in 0..d {
                    choi[(i * d + a, j * d + b)] = image[(a, b)];
                }
            }
        }
    }
    ChoiMatrix { dim: d, matrix: choi }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CptReport {
    pub completely_positive: bool,
    pub trace_preserving: bool,
    pub min_eigenvalue: f64,
    pub tp_residual: f64,
}

impl CptReport {
    pub fn is_cpt(&self) -> bool {
        self.completely_positive && self.trace_preserving
    }
}

/// CP via Choi eigenvalues `≥ -tol_psd`, TP via first-row residual `≤ tol_tp`.
pub fn is_cpt(map: &TransferMatrix, tol_psd: f64, tol_tp: f64) -> CptReport {
    let min_eigenvalue = choi_of(map).min_eigenvalue();
    let tp_residual = map.tp_residual();
    CptReport {
        completely_positive: min_eigenvalue >= -tol_psd,
        trace_preserving: tp_residual <= tol_tp,
        min_eigenvalue,
        tp_residual,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag(v: [f64; 4]) -> TransferMatrix {
        TransferMatrix::from_diagonal(2, &v).unwrap()
    }

    #[test]
    fn identity_choi_is_unnormalised_bell_projector() {
        let c = choi_of(&TransferMatrix::identity(2));
        assert!((c.matrix().trace().re - 2.0).abs() < 1e-14);
        let ev = c.eigenvalues();
        let mut sorted: Vec<f64> = ev.iter().copied().collect();
        sorted.sort_by(f64::total_cmp);
        assert!((sorted[3] - 2.0).abs() < 1e-14);
        assert!(sorted[..3].iter().all(|x| x.abs() < 1e-14));
        // |Φ+⟩ = |00⟩ + |11⟩ support
        for (r, c2) in [(0, 0), (0, 3), (3, 0), (3, 3)] {
            assert!((c.matrix()[(r, c2)].re - 1.0).abs() < 1e-14);
        }
        assert!(c.hermitian_defect() < 1e-15);
    }

    // Pauli-diagonal maps have Choi eigenvalues (1 ± x ± y ± z)/2 over the
    // four sign patterns with an even number of minus signs.
    fn pauli_diag_min_eig(x: f64, y: f64, z: f64) -> f64 {
        [
            1.0 + x + y + z,
            1.0 + x - y - z,
            1.0 - x + y - z,
            1.0 - x - y + z,
        ]
        .into_iter()
        .map(|v| v / 2.0)
        .fold(f64::INFINITY, f64::min)
    }

    #[test]
    fn dephasing_half_is_psd() {
        let c = choi_of(&diag([1.0, 0.5, 0.5, 1.0]));
        let oracle = pauli_diag_min_eig(0.5, 0.5, 1.0);
        assert!((c.min_eigenvalue() - oracle).abs() < 1e-14);
        assert!(c.min_eigenvalue() >= -1e-14);
    }

    #[test]
    fn transpose_like_map_is_not_cp() {
        let c = choi_of(&diag([1.0, 1.0, 1.0, -1.0]));
        let oracle = pauli_diag_min_eig(1.0, 1.0, -1.0);
        assert!((c.min_eigenvalue() - oracle).abs() < 1e-14);
        assert!(c.min_eigenvalue() < -0.5);
    }

    #[test]
    fn is_cpt_examples() {
        assert!(is_cpt(&TransferMatrix::identity(2), DEFAULT_PSD_TOL, DEFAULT_TP_TOL).is_cpt());
        for k in 0..=200 {
            let d = (0.37 * k as f64).cos();
            let r = is_cpt(&diag([1.0, d, d, 1.0]), DEFAULT_PSD_TOL, DEFAULT_TP_TOL);
            assert!(r.is_cpt(), "t-index {k}: {r:?}");
            assert!((r.min_eigenvalue - pauli_diag_min_eig(d, d, 1.0)).abs() < 1e-13);
        }
        let r = is_cpt(&diag([1.0, 1.2, 1.0, 1.0]), DEFAULT_PSD_TOL, DEFAULT_TP_TOL);
        assert!(!r.completely_positive && r.trace_preserving);
        assert!((r.min_eigenvalue - pauli_diag_min_eig(1.2, 1.0, 1.0)).abs() < 1e-13);
    }

    #[test]
    fn partial_trace_detects_tp() {
        let tp = choi_of(&diag([1.0, 0.3, -0.2, 0.9]));
        let pt = tp.partial_trace_output();
        assert!((pt - DMatrix::<C64>::identity(2, 2)).iter().all(|z| z.norm() < 1e-14));

        let non_tp = choi_of(&diag([0.8, 0.3, 0.3, 0.8]));
        let pt = non_tp.partial_trace_output();
        assert!((pt[(0, 0)].re - 0.8).abs() < 1e-14);
        let r = is_cpt(&diag([0.8, 0.3, 0.3, 0.8]), DEFAULT_PSD_TOL, DEFAULT_TP_TOL);
        assert!(!r.trace_preserving);
    }
}
