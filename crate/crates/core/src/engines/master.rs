use nalgebra::{DMatrix, DVector};

use super::ProcessSpec;
use crate::blocks::eval_f_derivative;
use crate::linalg::{from_row_major, gemm, gemv_acc, to_row_major};
use crate::qstate::{from_pauli_vec, to_pauli_vec, DensityMatrix, PauliVec};
use crate::renewal::TimeGrid;
use crate::{Error, Result};

/// States `ρ(t_n)` as operator-basis coefficient vectors.
#[derive(Clone, Debug)]
pub struct StateSeries {
    pub grid: TimeGrid,
    pub dim: usize,
    pub coeffs: Vec<DVector<f64>>,
}

impl StateSeries {
    pub fn vec(&self, n: usize) -> PauliVec {
        PauliVec::new(self.dim, self.coeffs[n].clone()).expect("stored with matching length")
    }

    pub fn state(&self, n: usize) -> DensityMatrix {
        from_pauli_vec(&self.vec(n))
    }

    /// Largest coefficient difference from `maps[n] · v0` over all nodes.
    pub fn max_abs_diff_from(&self, other: &[DVector<f64>]) -> f64 {
        self.coeffs.iter().zip(other).map(|(a, b)| (a - b).amax()).fold(0.0, f64::max)
    }
}

fn check_state(p: &ProcessSpec, rho0: &DensityMatrix) -> Result<DVector<f64>> {
    if rho0.dim() != p.dim() {
        return Err(Error::DimensionMismatch { expected: p.dim(), found: rho0.dim() });
    }
    Ok(to_pauli_vec(rho0).into_coeffs())
}

/// `dρ/dt` at `t = 0`: `I(0)ρ₀ + f(0)Eρ₀` with `I(0) = Ḟ(0) − f(0)·1`.
pub fn initial_derivative(p: &ProcessSpec, rho0: &DensityMatrix) -> Result<PauliVec> {
    let y0 = check_state(p, rho0)?;
    let f0 = p.waiting.initial_density();
    let fd = eval_f_derivative(&p.map, 0.0)?.matrix.into_matrix();
    let e = p.channel_matrix().into_matrix();
    let v = &fd * &y0 - &y0 * f0 + e * &y0 * f0;
    PauliVec::new(p.dim(), v)
}

/// Integrates the closed memory-kernel equation
/// `dρ/dt = ∫₀^t K(t−τ) E ρ(τ) dτ + f(0) E ρ(t) + I(t) ρ₀`
/// with `K = d/dt[fF]` (regular part) and `I = d/dt[gF]`, the point mass of
/// `K` at the origin entering as the instantaneous `f(0)Eρ(t)` term.
/// Implicit trapezoidal rule in time and trapezoidal convolution.
pub fn integrate_master_equation(p: &ProcessSpec, rho0: &DensityMatrix) -> Result<StateSeries> {
    if !p.map.has_derivative() {
        return Err(Error::DerivativeUnavailable);
    }
    let y0 = check_state(p, rho0)?;
    let (grid, w) = (&p.grid, &p.waiting);
    let n = p.dim() * p.dim();
    let h = grid.step();
    let f0 = w.initial_density();
    let e = to_row_major(p.channel_matrix().matrix());

    let fs = p.map.tabulate(grid)?;
    let mut ke = Vec::with_capacity(grid.len());
    let mut inhom = Vec::with_capacity(grid.len());
    for (m, t) in grid.nodes().enumerate() {
        let f = fs[m].matrix();
        let fd = eval_f_derivative(&p.map, t)?.matrix.into_matrix();
        let (dens, ddens, surv) = (w.pdf(t), w.dpdf(t), w.sf(t));
        let k = f * ddens + &fd * dens;
        let mut kflat = vec![0.0; n * n];
        gemm(&mut kflat, &to_row_major(&k), &e, n);
        ke.push(kflat);
        let i_m = f * (-dens) + fd * surv;
        let mut v = vec![0.0; n];
        gemv_acc(&mut v, &to_row_major(&i_m), y0.as_slice(), n, 1.0);
        inhom.push(v);
    }

    // [1 − (h/2)(f(0)E + (h/2)K(0)E)] y_{n+1} = known
    let e_mat = from_row_major(n, &e);
    let system = DMatrix::<f64>::identity(n, n) - (&e_mat * f0 + from_row_major(n, &ke[0]) * (0.5 * h)) * (0.5 * h);
    let lu = system.lu();
    if !lu.is_invertible() {
        return Err(Error::SingularSystem(1));
    }

    let mut ys: Vec<Vec<f64>> = vec![y0.as_slice().to_vec()];
    // R_0 = I(0)y₀ + f(0)Ey₀
    let mut r_prev = inhom[0].clone();
    gemv_acc(&mut r_prev, &e, &ys[0], n, f0);
    for step in 0..grid.steps() {
        let next = step + 1;
        // convolution part without the implicit j = next term
        let mut conv = vec![0.0; n];
        gemv_acc(&mut conv, &ke[next], &ys[0], n, 0.5 * h);
        for j in 1..next {
            gemv_acc(&mut conv, &ke[next - j], &ys[j], n, h);
        }
        let known: Vec<f64> = (0..n).map(|i| ys[step][i] + 0.5 * h * (r_prev[i] + inhom[next][i] + conv[i])).collect();
        let y_next = lu.solve(&DVector::from_vec(known)).ok_or(Error::SingularSystem(next))?;
        let y_next = y_next.as_slice().to_vec();

        let mut r = inhom[next].clone();
        for i in 0..n {
            r[i] += conv[i];
        }
        gemv_acc(&mut r, &e, &y_next, n, f0);
        gemv_acc(&mut r, &ke[0], &y_next, n, 0.5 * h);
        r_prev = r;
        ys.push(y_next);
    }
    Ok(StateSeries { grid: *grid, dim: p.dim(), coeffs: ys.into_iter().map(DVector::from_vec).collect() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blocks::{eval_f, ChannelSpec, LindbladSpec, PauliIndex, TimedMapSpec};
    use crate::renewal::WaitingTimeDist;

    #[test]
    fn identity_channel_recovers_semigroup() {
        let grid = TimeGrid::new(3.0, 3000).unwrap();
        let map = TimedMapSpec::semigroup(LindbladSpec::precession(1.0).with_jump(0.4, crate::blocks::pauli_matrices()[2].clone()).unwrap());
        let p = ProcessSpec::new(map.clone(), ChannelSpec::Pauli(PauliIndex::I), WaitingTimeDist::exponential(2.0).unwrap(), grid).unwrap();
        let rho0 = DensityMatrix::from_bloch(0.6, 0.2, 0.5).unwrap();
        let s = integrate_master_equation(&p, &rho0).unwrap();
        let v0 = to_pauli_vec(&rho0);
        for n in (0..grid.len()).step_by(100) {
            let want = eval_f(&map, grid.t(n)).unwrap().apply_vec(&v0).unwrap();
            assert!((s.coeffs[n].clone() - want.coeffs()).amax() < 1e-5);
        }
    }

    #[test]
    fn initial_slope() {
        let grid = TimeGrid::new(1.0, 10).unwrap();
        let p = ProcessSpec::new(
            TimedMapSpec::Identity { dim: 2 },
            ChannelSpec::Pauli(PauliIndex::Z),
            WaitingTimeDist::exponential(1.5).unwrap(),
            grid,
        )
        .unwrap();
        let rho0 = DensityMatrix::from_bloch(1.0, 0.0, 0.0).unwrap();
        // coherence decays at rate 2Γ initially
        let d = initial_derivative(&p, &rho0).unwrap();
        let x0 = to_pauli_vec(&rho0).coeffs()[1];
        assert!((d.coeffs()[1] + 3.0 * x0).abs() < 1e-14);
    }
}
