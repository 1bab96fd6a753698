use nalgebra::DMatrix;

use super::pauli_matrices;
use crate::qstate::{OperatorBasis, TransferMatrix};
use crate::{Error, Result, C64};

/// One dissipator term `rate · (L ρ L† − ½{L†L, ρ})`.
#[derive(Clone, Debug, PartialEq)]
pub struct JumpOperator {
    pub rate: f64,
    pub operator: DMatrix<C64>,
}

/// Generator `ℒρ = −i[H, ρ] + Σ_k rate_k (L_k ρ L_k† − ½{L_k†L_k, ρ})`
/// (ħ = 1, `H` in units of rate).
#[derive(Clone, Debug, PartialEq)]
pub struct LindbladSpec {
    hamiltonian: DMatrix<C64>,
    jumps: Vec<JumpOperator>,
}

impl LindbladSpec {
    pub fn new(hamiltonian: DMatrix<C64>, jumps: Vec<JumpOperator>) -> Result<Self> {
        let d = hamiltonian.nrows();
        if d == 0 || hamiltonian.ncols() != d {
            return Err(Error::param("hamiltonian", "must be a non-empty square matrix"));
        }
        let defect = (&hamiltonian - hamiltonian.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if defect > 1e-12 {
            return Err(Error::NonHermitian(defect));
        }
        for j in &jumps {
            if j.operator.nrows() != d || j.operator.ncols() != d {
                return Err(Error::DimensionMismatch { expected: d, found: j.operator.nrows() });
            }
            if !(j.rate >= 0.0 && j.rate.is_finite()) {
                return Err(Error::param("rate", format!("jump rates must be non-negative, got {}", j.rate)));
            }
        }
        Ok(Self { hamiltonian, jumps })
    }

    pub fn zero(dim: usize) -> Self {
        Self { hamiltonian: DMatrix::zeros(dim, dim), jumps: Vec::new() }
    }

    /// Qubit pure dephasing with a single jump `√κ σz`.
    pub fn pure_dephasing(kappa: f64) -> Result<Self> {
        let [_, _, sz] = pauli_matrices();
        Self::new(DMatrix::zeros(2, 2), vec![JumpOperator { rate: kappa, operator: sz }])
    }

    /// Qubit precession `H = (ω/2) σz`.
    pub fn precession(omega: f64) -> Self {
        let [_, _, sz] = pauli_matrices();
        Self { hamiltonian: sz * C64::new(0.5 * omega, 0.0), jumps: Vec::new() }
    }

    pub fn with_jump(mut self, rate: f64, operator: DMatrix<C64>) -> Result<Self> {
        self.jumps.push(JumpOperator { rate, operator });
        Self::new(self.hamiltonian, self.jumps)
    }

    pub fn dim(&self) -> usize {
        self.hamiltonian.nrows()
    }

    pub fn hamiltonian(&self) -> &DMatrix<C64> {
        &self.hamiltonian
    }

    pub fn jumps(&self) -> &[JumpOperator] {
        &self.jumps
    }

    /// `ℒ` acting on an operator.
    pub fn apply(&self, rho: &DMatrix<C64>) -> DMatrix<C64> {
        let i = C64::new(0.0, 1.0);
        // R = −iH − ½ Σ rate L†L, so ℒρ = Rρ + ρR† + Σ rate LρL†
        let mut r = &self.hamiltonian * (-i);
        for j in &self.jumps {
            r -= j.operator.adjoint() * &j.operator * C64::new(0.5 * j.rate, 0.0);
        }
        let mut out = &r * rho + rho * r.adjoint();
        for j in &self.jumps {
            out += &j.operator * rho * j.operator.adjoint() * C64::new(j.rate, 0.0);
        }
        out
    }
}

/// Transfer representation `G_ij = Tr[B_i ℒ(B_j)]`; its first row vanishes.
pub fn lindblad_transfer_generator(spec: &LindbladSpec) -> TransferMatrix {
    let d = spec.dim();
    let basis = OperatorBasis::new(d);
    let n = basis.len();
    let mut g = DMatrix::<f64>::zeros(n, n);
    for j in 0..n {
        let image = spec.apply(basis.element(j));
        let coeffs = basis.coefficients(&image).expect("dimension agrees");
        g.set_column(j, &coeffs);
    }
    TransferMatrix::new(d, g).expect("square d² matrix")
}
