use nalgebra::DMatrix;

use super::{lindblad_transfer_generator, DampingParams, DephasingProfile, LindbladSpec};
use crate::qstate::TransferMatrix;
use crate::renewal::TimeGrid;
use crate::{Error, Result};

// Step of the central-difference fallback for profiles without D′.
const PROFILE_FD_STEP: f64 = 1e-5;

/// Markovian semigroup `F(t) = e^{tℒ}` with its cached transfer generator.
#[derive(Clone, Debug, PartialEq)]
pub struct Semigroup {
    spec: LindbladSpec,
    generator: TransferMatrix,
}

impl Semigroup {
    pub fn new(spec: LindbladSpec) -> Self {
        let generator = lindblad_transfer_generator(&spec);
        Self { spec, generator }
    }

    pub fn spec(&self) -> &LindbladSpec {
        &self.spec
    }

    pub fn generator(&self) -> &TransferMatrix {
        &self.generator
    }

    pub fn propagator(&self, t: f64) -> TransferMatrix {
        let m = (self.generator.matrix() * t).exp();
        TransferMatrix::new(self.generator.dim(), m).expect("generator shape")
    }
}

/// Maps tabulated on a grid. Queries must hit a node; derivatives are
/// available only when `finite_difference` is set.
#[derive(Clone, Debug, PartialEq)]
pub struct CustomTable {
    pub grid: TimeGrid,
    pub maps: Vec<TransferMatrix>,
    pub finite_difference: bool,
}

impl CustomTable {
    pub fn new(grid: TimeGrid, maps: Vec<TransferMatrix>, finite_difference: bool) -> Result<Self> {
        if maps.len() != grid.len() {
            return Err(Error::DimensionMismatch { expected: grid.len(), found: maps.len() });
        }
        let dim = maps[0].dim();
        if let Some(bad) = maps.iter().find(|m| m.dim() != dim) {
            return Err(Error::DimensionMismatch { expected: dim, found: bad.dim() });
        }
        Ok(Self { grid, maps, finite_difference })
    }

    fn index(&self, t: f64) -> Result<usize> {
        self.grid.node_index(t).ok_or(Error::OffGrid(t))
    }
}

/// Inter-jump family `t ↦ F(t)`.
#[derive(Clone, Debug)]
pub enum TimedMapSpec {
    Identity { dim: usize },
    /// `diag(1, D, D, 1)`
    Dephasing(DephasingProfile),
    /// `diag(1, G, G, G²) + B(G² − 1)`
    Damping(DampingParams),
    Semigroup(Semigroup),
    Custom(CustomTable),
}

/// Time derivative of a map, flagging one-sided finite differences.
#[derive(Clone, Debug, PartialEq)]
pub struct MapDerivative {
    pub matrix: TransferMatrix,
    pub one_sided: bool,
}

impl TimedMapSpec {
    pub fn semigroup(spec: LindbladSpec) -> Self {
        Self::Semigroup(Semigroup::new(spec))
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Identity { dim } => *dim,
            Self::Dephasing(_) | Self::Damping(_) => 2,
            Self::Semigroup(s) => s.generator.dim(),
            Self::Custom(c) => c.maps[0].dim(),
        }
    }

    pub fn has_derivative(&self) -> bool {
        match self {
            Self::Custom(c) => c.finite_difference,
            _ => true,
        }
    }

    /// Short identifier used in reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Self::Identity { .. } => "identity",
            Self::Dephasing(_) => "dephasing",
            Self::Damping(_) => "damping",
            Self::Semigroup(_) => "semigroup",
            Self::Custom(_) => "custom",
        }
    }

    /// `F(t_n)` at every node of `grid`.
    pub fn tabulate(&self, grid: &TimeGrid) -> Result<Vec<TransferMatrix>> {
        match self {
            Self::Custom(c) if c.grid == *grid => Ok(c.maps.clone()),
            _ => grid.nodes().map(|t| eval_f(self, t)).collect(),
        }
    }
}

fn dephasing_matrix(d: f64) -> TransferMatrix {
    TransferMatrix::from_diagonal(2, &[1.0, d, d, 1.0]).expect("qubit")
}

fn damping_matrix(g: f64, w: f64) -> TransferMatrix {
    TransferMatrix::diagonal_plus_corner(g, g, g * g, w)
}

/// `F(t)`.
pub fn eval_f(spec: &TimedMapSpec, t: f64) -> Result<TransferMatrix> {
    if t < 0.0 || t.is_nan() {
        return Err(Error::NegativeTime(t));
    }
    Ok(match spec {
        TimedMapSpec::Identity { dim } => TransferMatrix::identity(*dim),
        TimedMapSpec::Dephasing(p) => dephasing_matrix(p.value(t)),
        TimedMapSpec::Damping(p) => {
            let g = p.amplitude(t);
            damping_matrix(g, g * g - 1.0)
        }
        TimedMapSpec::Semigroup(s) => s.propagator(t),
        TimedMapSpec::Custom(c) => c.maps[c.index(t)?].clone(),
    })
}

/// `dF/dt`, analytic for the built-in families. Custom tables use second-order
/// differences on their own grid: central in the interior, one-sided at the
/// ends (flagged).
pub fn eval_f_derivative(spec: &TimedMapSpec, t: f64) -> Result<MapDerivative> {
    if t < 0.0 || t.is_nan() {
        return Err(Error::NegativeTime(t));
    }
    let exact = |matrix| Ok(MapDerivative { matrix, one_sided: false });
    match spec {
        TimedMapSpec::Identity { dim } => exact(TransferMatrix::zeros(*dim)),
        TimedMapSpec::Dephasing(p) => match p.derivative(t) {
            Some(dd) => exact(TransferMatrix::from_diagonal(2, &[0.0, dd, dd, 0.0])?),
            None => {
                let h = PROFILE_FD_STEP;
                let (dd, one_sided) = if t >= h {
                    ((p.value(t + h) - p.value(t - h)) / (2.0 * h), false)
                } else {
                    ((-3.0 * p.value(t) + 4.0 * p.value(t + h) - p.value(t + 2.0 * h)) / (2.0 * h), true)
                };
                Ok(MapDerivative { matrix: TransferMatrix::from_diagonal(2, &[0.0, dd, dd, 0.0])?, one_sided })
            }
        },
        TimedMapSpec::Damping(p) => {
            let (g, dg) = (p.amplitude(t), p.amplitude_derivative(t));
            let d2 = 2.0 * g * dg;
            let mut m = TransferMatrix::from_diagonal(2, &[0.0, dg, dg, d2])?.into_matrix();
            m[(3, 0)] = d2;
            exact(TransferMatrix::new(2, m)?)
        }
        TimedMapSpec::Semigroup(s) => exact(&s.generator * &s.propagator(t)),
        TimedMapSpec::Custom(c) => {
            if !c.finite_difference {
                return Err(Error::DerivativeUnavailable);
            }
            let n = c.index(t)?;
            let last = c.grid.steps();
            let h = c.grid.step();
            let m = |k: usize| c.maps[k].matrix();
            let (d, one_sided): (DMatrix<f64>, bool) = if last < 2 {
                ((m(1) - m(0)) / h, true)
            } else if n == 0 {
                ((m(0) * -3.0 + m(1) * 4.0 - m(2)) / (2.0 * h), true)
            } else if n == last {
                ((m(last) * 3.0 - m(last - 1) * 4.0 + m(last - 2)) / (2.0 * h), true)
            } else {
                ((m(n + 1) - m(n - 1)) / (2.0 * h), false)
            };
            Ok(MapDerivative { matrix: TransferMatrix::new(c.maps[0].dim(), d)?, one_sided })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::{is_cpt, DEFAULT_PSD_TOL, DEFAULT_TP_TOL};

    fn builtins() -> Vec<TimedMapSpec> {
        let mut v = vec![
            TimedMapSpec::Identity { dim: 2 },
            TimedMapSpec::Dephasing(DephasingProfile::cosine(1.0).unwrap()),
            TimedMapSpec::semigroup(LindbladSpec::pure_dephasing(0.3).unwrap()),
        ];
        for r in [0.1, 0.4, 0.5, 1.0, 3.0] {
            v.push(TimedMapSpec::Damping(DampingParams::new(1.0, r).unwrap()));
        }
        v
    }

    #[test]
    fn identity_at_zero() {
        for s in builtins() {
            let f = eval_f(&s, 0.0).unwrap();
            assert!(f.max_abs_diff(&TransferMatrix::identity(s.dim())) < 1e-12, "{}", s.kind());
        }
    }

    #[test]
    fn cpt_on_grid() {
        let grid = TimeGrid::new(10.0, 199).unwrap();
        for s in builtins() {
            for t in grid.nodes() {
                let r = is_cpt(&eval_f(&s, t).unwrap(), DEFAULT_PSD_TOL, DEFAULT_TP_TOL);
                assert!(r.is_cpt(), "{} t={t} {r:?}", s.kind());
            }
        }
    }

    #[test]
    fn damping_coherence_entry() {
        let s = TimedMapSpec::Damping(DampingParams::new(1.0, 0.5).unwrap());
        let f = eval_f(&s, 2.0).unwrap();
        let g = 2.0 * (-1.0f64).exp();
        assert!((f.get(1, 1) - g).abs() < 1e-14);
        assert!((f.get(3, 3) - g * g).abs() < 1e-14);
        assert!((f.get(3, 0) - (g * g - 1.0)).abs() < 1e-14);
    }

    #[test]
    fn semigroup_matches_closed_form_and_composes() {
        let kappa = 0.35;
        let s = TimedMapSpec::semigroup(LindbladSpec::pure_dephasing(kappa).unwrap());
        for t in [0.1, 1.0, 4.0] {
            let e = (-2.0 * kappa * t).exp();
            let want = TransferMatrix::from_diagonal(2, &[1.0, e, e, 1.0]).unwrap();
            assert!(eval_f(&s, t).unwrap().max_abs_diff(&want) < 1e-12);
        }
        let general = LindbladSpec::precession(1.1)
            .with_jump(0.2, crate::blocks::pauli_matrices()[0].clone())
            .unwrap();
        let s = TimedMapSpec::semigroup(general);
        let (t1, t2) = (0.7, 1.9);
        let lhs = eval_f(&s, t1 + t2).unwrap();
        let rhs = &eval_f(&s, t2).unwrap() * &eval_f(&s, t1).unwrap();
        assert!(lhs.max_abs_diff(&rhs) < 1e-10);
    }

    #[test]
    fn derivatives() {
        let cos = TimedMapSpec::Dephasing(DephasingProfile::cosine(1.0).unwrap());
        assert!(eval_f_derivative(&cos, 0.0).unwrap().matrix.matrix().amax() == 0.0);

        let sg = TimedMapSpec::semigroup(LindbladSpec::precession(0.8).with_jump(0.3, crate::blocks::pauli_matrices()[2].clone()).unwrap());
        if let TimedMapSpec::Semigroup(s) = &sg {
            for t in [0.0, 0.5, 2.0] {
                let d = eval_f_derivative(&sg, t).unwrap().matrix;
                let want = s.generator().matrix() * eval_f(&sg, t).unwrap().matrix();
                assert!((d.matrix() - want).amax() < 1e-10);
            }
        }

        let damp = TimedMapSpec::Damping(DampingParams::new(1.0, 3.0).unwrap());
        let h = 1e-4;
        for k in 1..40 {
            let t = 0.25 * k as f64;
            let fd = (eval_f(&damp, t + h).unwrap().matrix() - eval_f(&damp, t - h).unwrap().matrix()) / (2.0 * h);
            let d = eval_f_derivative(&damp, t).unwrap().matrix;
            assert!((d.matrix() - fd).amax() < 1e-6, "t={t}");
        }
    }

    #[test]
    fn custom_table() {
        let grid = TimeGrid::new(1.0, 10).unwrap();
        let spec = TimedMapSpec::Dephasing(DephasingProfile::exponential(0.5).unwrap());
        let table = CustomTable::new(grid, spec.tabulate(&grid).unwrap(), false).unwrap();
        let custom = TimedMapSpec::Custom(table.clone());
        assert!(eval_f(&custom, 0.3).is_ok());
        assert_eq!(eval_f(&custom, 0.35), Err(Error::OffGrid(0.35)));
        assert_eq!(eval_f_derivative(&custom, 0.3), Err(Error::DerivativeUnavailable));

        let fd = TimedMapSpec::Custom(CustomTable { finite_difference: true, ..table });
        let d0 = eval_f_derivative(&fd, 0.0).unwrap();
        assert!(d0.one_sided);
        let d = eval_f_derivative(&fd, 0.5).unwrap();
        assert!(!d.one_sided);
        let exact = -0.5 * (-0.25f64).exp();
        assert!((d.matrix.get(1, 1) - exact).abs() < 1e-3);
    }
}
