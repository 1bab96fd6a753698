//! Flat row-major kernels for the small dense matrices in the quadrature loops.

use nalgebra::DMatrix;

/// `out += scale * a * b` for `n x n` row-major blocks.
#[inline]
pub(crate) fn gemm_acc(out: &mut [f64], a: &[f64], b: &[f64], n: usize, scale: f64) {
    debug_assert!(out.len() == n * n && a.len() == n * n && b.len() == n * n);
    for i in 0..n {
        let row = &a[i * n..(i + 1) * n];
        let dst = &mut out[i * n..(i + 1) * n];
        for (k, &aik) in row.iter().enumerate() {
            let s = scale * aik;
            if s == 0.0 {
                continue;
            }
            let src = &b[k * n..(k + 1) * n];
            for (d, &bkj) in dst.iter_mut().zip(src) {
                *d += s * bkj;
            }
        }
    }
}

/// `out = a * b` for `n x n` row-major blocks.
#[inline]
pub(crate) fn gemm(out: &mut [f64], a: &[f64], b: &[f64], n: usize) {
    out.iter_mut().for_each(|x| *x = 0.0);
    gemm_acc(out, a, b, n, 1.0);
}

/// `out += scale * a * v` for an `n x n` row-major block and a vector.
#[inline]
pub(crate) fn gemv_acc(out: &mut [f64], a: &[f64], v: &[f64], n: usize, scale: f64) {
    for i in 0..n {
        let row = &a[i * n..(i + 1) * n];
        let s: f64 = row.iter().zip(v).map(|(x, y)| x * y).sum();
        out[i] += scale * s;
    }
}

pub(crate) fn to_row_major(m: &DMatrix<f64>) -> Vec<f64> {
    let (r, c) = m.shape();
    let mut out = Vec::with_capacity(r * c);
    for i in 0..r {
        for j in 0..c {
            out.push(m[(i, j)]);
        }
    }
    out
}

pub(crate) fn from_row_major(n: usize, data: &[f64]) -> DMatrix<f64> {
    DMatrix::from_row_slice(n, n, data)
}

pub(crate) fn identity_flat(n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n * n];
    for i in 0..n {
        out[i * n + i] = 1.0;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gemm_matches_nalgebra() {
        let a = DMatrix::from_fn(4, 4, |i, j| (i * 4 + j) as f64 * 0.3 - 1.0);
        let b = DMatrix::from_fn(4, 4, |i, j| ((i + 2 * j) % 5) as f64 - 2.0);
        let mut out = vec![0.0; 16];
        gemm(&mut out, &to_row_major(&a), &to_row_major(&b), 4);
        assert_eq!(from_row_major(4, &out), &a * &b);
    }
}
