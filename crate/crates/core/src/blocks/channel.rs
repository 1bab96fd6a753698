use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::cmat;
use crate::qstate::{is_cpt, OperatorBasis, TransferMatrix, DEFAULT_PSD_TOL, DEFAULT_TP_TOL};
use crate::{Error, Result, C64};

/// Kraus completeness tolerance on `max |Σ K†K − I|`.
pub const KRAUS_TOL: f64 = 1e-12;

/// Index of a qubit Pauli conjugation channel `ρ ↦ σ_i ρ σ_i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PauliIndex {
    #[serde(alias = "0", alias = "identity")]
    I,
    X,
    Y,
    Z,
}

impl PauliIndex {
    pub const ALL: [PauliIndex; 4] = [Self::I, Self::X, Self::Y, Self::Z];

    /// `(ε_x, ε_y, ε_z)` of the transfer matrix `diag(1, ε_x, ε_y, ε_z)`.
    pub fn signs(self) -> [f64; 3] {
        match self {
            Self::I => [1.0, 1.0, 1.0],
            Self::X => [1.0, -1.0, -1.0],
            Self::Y => [-1.0, 1.0, -1.0],
            Self::Z => [-1.0, -1.0, 1.0],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::I => "0",
            Self::X => "x",
            Self::Y => "y",
            Self::Z => "z",
        }
    }
}

impl fmt::Display for PauliIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PauliIndex {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "0" | "i" | "identity" => Ok(Self::I),
            "x" => Ok(Self::X),
            "y" => Ok(Self::Y),
            "z" => Ok(Self::Z),
            _ => Err(Error::param("pauli_index", format!("expected one of 0, x, y, z; got `{s}`"))),
        }
    }
}

/// Jump channel `E`.
#[derive(Clone, Debug, PartialEq)]
pub enum ChannelSpec {
    Pauli(PauliIndex),
    Kraus { dim: usize, operators: Vec<DMatrix<C64>> },
    /// Channel given directly by its transfer matrix.
    Transfer(TransferMatrix),
}

impl ChannelSpec {
    pub fn pauli(index: PauliIndex) -> Self {
        Self::Pauli(index)
    }

    /// Validated Kraus channel `ρ ↦ Σ K ρ K†`.
    pub fn kraus(operators: Vec<DMatrix<C64>>) -> Result<Self> {
        let dim = operators.first().map(|k| k.nrows()).ok_or_else(|| Error::param("kraus", "empty Kraus set"))?;
        for k in &operators {
            if k.nrows() != dim || k.ncols() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: k.nrows().max(k.ncols()) });
            }
        }
        let mut sum = DMatrix::<C64>::zeros(dim, dim);
        for k in &operators {
            sum += k.adjoint() * k;
        }
        let defect = (sum - DMatrix::<C64>::identity(dim, dim)).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if defect > KRAUS_TOL {
            return Err(Error::IncompleteKraus(defect));
        }
        Ok(Self::Kraus { dim, operators })
    }

    /// Validated transfer-matrix channel (CPT within the default tolerances).
    pub fn transfer(m: TransferMatrix) -> Result<Self> {
        let r = is_cpt(&m, DEFAULT_PSD_TOL, DEFAULT_TP_TOL);
        if !r.is_cpt() {
            return Err(Error::param(
                "channel",
                format!("transfer matrix is not CPT (min Choi eigenvalue {:e}, TP residual {:e})", r.min_eigenvalue, r.tp_residual),
            ));
        }
        Ok(Self::Transfer(m))
    }

    /// Transfer-matrix channel without the CPT check, for fault injection.
    #[doc(hidden)]
    pub fn transfer_unchecked(m: TransferMatrix) -> Self {
        Self::Transfer(m)
    }

    /// Qubit amplitude damping with decay probability `p`.
    pub fn amplitude_damping(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::param("p", format!("must lie in [0, 1], got {p}")));
        }
        let k0 = cmat(2, &[(1., 0.), (0., 0.), (0., 0.), ((1.0 - p).sqrt(), 0.)]);
        let k1 = cmat(2, &[(0., 0.), (p.sqrt(), 0.), (0., 0.), (0., 0.)]);
        Self::kraus(vec![k0, k1])
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Pauli(_) => 2,
            Self::Kraus { dim, .. } => *dim,
            Self::Transfer(m) => m.dim(),
        }
    }

    pub fn pauli_index(&self) -> Option<PauliIndex> {
        match self {
            Self::Pauli(i) => Some(*i),
            Self::Kraus { .. } | Self::Transfer(_) => None,
        }
    }
}

/// Transfer matrix of the channel; always CPT for a validated spec.
pub fn channel_transfer(c: &ChannelSpec) -> TransferMatrix {
    match c {
        ChannelSpec::Pauli(i) => {
            let [ex, ey, ez] = i.signs();
            TransferMatrix::from_diagonal(2, &[1.0, ex, ey, ez]).expect("qubit diagonal")
        }
        ChannelSpec::Kraus { dim, operators } => {
            let basis = OperatorBasis::new(*dim);
            let n = basis.len();
            let mut m = DMatrix::<f64>::zeros(n, n);
            for j in 0..n {
                let b = basis.element(j);
                let mut image = DMatrix::<C64>::zeros(*dim, *dim);
                for k in operators {
                    image += k * b * k.adjoint();
                }
                m.set_column(j, &basis.coefficients(&image).expect("dimension agrees"));
            }
            TransferMatrix::new(*dim, m).expect("square d² matrix")
        }
        ChannelSpec::Transfer(m) => m.clone(),
    }
}

/// Random channel with `rank` Kraus operators: a Ginibre matrix is
/// orthonormalised into an isometry `V: C^d → C^{d·rank}` whose blocks are
/// the Kraus operators.
pub fn random_kraus_channel<R: Rng + ?Sized>(dim: usize, rank: usize, rng: &mut R) -> Result<ChannelSpec> {
    if dim == 0 || rank == 0 {
        return Err(Error::param("rank", "dimension and rank must be positive"));
    }
    let rows = dim * rank;
    let ginibre = DMatrix::<C64>::from_fn(rows, dim, |_, _| {
        C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let q = ginibre.qr().q();
    let ops = (0..rank).map(|k| q.rows(k * dim, dim).into_owned()).collect();
    ChannelSpec::kraus(ops)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blocks::pauli_matrices;
    use crate::qstate::DensityMatrix;
    use rand::SeedableRng;

    #[test]
    fn pauli_transfer_matches_conjugation() {
        let basis = OperatorBasis::qubit();
        let paulis = pauli_matrices();
        for (idx, s) in [PauliIndex::X, PauliIndex::Y, PauliIndex::Z].into_iter().zip(&paulis) {
            let m = channel_transfer(&ChannelSpec::Pauli(idx));
            for i in 0..4 {
                for j in 0..4 {
                    let direct = (basis.element(i) * s * basis.element(j) * s).trace().re;
                    assert!((m.get(i, j) - direct).abs() < 1e-15, "{idx} ({i},{j})");
                }
            }
        }
        assert_eq!(channel_transfer(&ChannelSpec::Pauli(PauliIndex::I)), TransferMatrix::identity(2));
        let z = channel_transfer(&ChannelSpec::Pauli(PauliIndex::Z));
        assert_eq!(z, TransferMatrix::from_diagonal(2, &[1.0, -1.0, -1.0, 1.0]).unwrap());
    }

    #[test]
    fn pauli_kraus_forms_agree() {
        for (idx, s) in [PauliIndex::X, PauliIndex::Y, PauliIndex::Z].into_iter().zip(pauli_matrices()) {
            let k = channel_transfer(&ChannelSpec::kraus(vec![s]).unwrap());
            assert!(k.max_abs_diff(&channel_transfer(&ChannelSpec::Pauli(idx))) < 1e-15);
        }
    }

    #[test]
    fn full_amplitude_damping_resets() {
        let m = channel_transfer(&ChannelSpec::amplitude_damping(1.0).unwrap());
        let ground = DensityMatrix::basis_state(2, 0);
        for rho in [
            DensityMatrix::basis_state(2, 1),
            DensityMatrix::from_bloch(0.3, -0.5, 0.1).unwrap(),
            DensityMatrix::maximally_mixed(2),
        ] {
            assert!(m.apply(&rho).unwrap().max_abs_diff(&ground) < 1e-15);
        }
    }

    #[test]
    fn incomplete_kraus_rejected() {
        let half = cmat(2, &[(0.5, 0.), (0., 0.), (0., 0.), (0.5, 0.)]);
        assert!(matches!(ChannelSpec::kraus(vec![half]), Err(Error::IncompleteKraus(_))));
    }

    #[test]
    fn random_channels_are_cpt() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for dim in 2..=3 {
            for rank in 1..=4 {
                let c = random_kraus_channel(dim, rank, &mut rng).unwrap();
                let r = is_cpt(&channel_transfer(&c), DEFAULT_PSD_TOL, DEFAULT_TP_TOL);
                assert!(r.is_cpt(), "{r:?}");
            }
        }
    }

    #[test]
    fn transfer_channels_are_checked() {
        let flipped = TransferMatrix::from_diagonal(2, &[1.0, -1.0, 1.0, 1.0]).unwrap();
        assert!(ChannelSpec::transfer(flipped.clone()).is_err());
        assert_eq!(channel_transfer(&ChannelSpec::transfer_unchecked(flipped.clone())), flipped);
        let z = channel_transfer(&ChannelSpec::Pauli(PauliIndex::Z));
        assert!(ChannelSpec::transfer(z).is_ok());
    }

    #[test]
    fn index_parsing() {
        assert_eq!("0".parse::<PauliIndex>().unwrap(), PauliIndex::I);
        assert_eq!("X".parse::<PauliIndex>().unwrap(), PauliIndex::X);
        assert!("w".parse::<PauliIndex>().is_err());
        assert_eq!(serde_json::from_str::<PauliIndex>("\"0\"").unwrap(), PauliIndex::I);
    }
}
