//! Compressed sparse rows for the assembled subdomain matrices, plus a small
//! dense solver used by the element kernels.

use crate::scalar::Scalar;

#[derive(Clone, Debug, Default)]
pub struct CsrMatrix {
    nrows: usize,
    ncols: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    /// Build from `(row, col, value)` triplets; duplicates are summed.
    pub fn from_triplets(nrows: usize, ncols: usize, mut triplets: Vec<(usize, usize, f64)>) -> Self {
        triplets.sort_unstable_by_key(|&(r, c, _)| (r, c));
        let mut indptr = vec![0; nrows + 1];
        let mut indices = Vec::with_capacity(triplets.len());
        let mut values: Vec<f64> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in triplets {
            assert!(r < nrows && c < ncols, "triplet ({r}, {c}) out of bounds");
            if last == Some((r, c)) {
                *values.last_mut().unwrap() += v;
            } else {
                indices.push(c);
                values.push(v);
                indptr[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for r in 0..nrows {
            indptr[r + 1] += indptr[r];
        }
        Self { nrows, ncols, indptr, indices, values }
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let span = self.indptr[r]..self.indptr[r + 1];
        self.indices[span.clone()].iter().copied().zip(self.values[span].iter().copied())
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.row(r).find(|&(j, _)| j == c).map_or(0.0, |(_, v)| v)
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.ncols);
        (0..self.nrows)
            .map(|r| self.row(r).map(|(c, v)| v * x[c]).sum())
            .collect()
    }

    /// `x^T M y` over the leading `n x n` block.
    pub fn leading_form(&self, n: usize, x: &[f64], y: &[f64]) -> f64 {
        let mut acc = 0.0;
        for (r, &xr) in x.iter().enumerate().take(n) {
            if xr == 0.0 {
                continue;
            }
            let mut s = 0.0;
            for (c, v) in self.row(r) {
                if c < n {
                    s += v * y[c];
                }
            }
            acc += xr * s;
        }
        acc
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Largest `|M_ij - M_ji|`.
    pub fn max_asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for r in 0..self.nrows {
            for (c, v) in self.row(r) {
                worst = worst.max((v - self.get(c, r)).abs());
            }
        }
        worst
    }

    pub fn to_dense(&self) -> nalgebra::DMatrix<f64> {
        let mut m = nalgebra::DMatrix::zeros(self.nrows, self.ncols);
        for r in 0..self.nrows {
            for (c, v) in self.row(r) {
                m[(r, c)] = v;
            }
        }
        m
    }
}

/// Solve the dense `n x n` system `a x = b` (row-major `a`) by Gaussian
/// elimination with partial pivoting. Returns `None` for a singular matrix.
pub fn dense_solve<T: Scalar>(n: usize, a: &[T], b: &[T]) -> Option<Vec<T>> {
    assert_eq!(a.len(), n * n);
    let nrhs = b.len() / n;
    assert_eq!(b.len(), n * nrhs);
    let mut m = a.to_vec();
    // b is column-major with nrhs columns
    let mut x = b.to_vec();
    let scale = m.iter().fold(T::zero(), |s, v| s.max(v.abs()));
    for k in 0..n {
        let p = (k..n)
            .max_by(|&i, &j| m[i * n + k].abs().partial_cmp(&m[j * n + k].abs()).unwrap())
            .unwrap();
        if m[p * n + k].abs() <= scale * T::epsilon() * T::lit(16.0) {
            return None;
        }
        if p != k {
            for j in 0..n {
                m.swap(k * n + j, p * n + j);
            }
            for c in 0..nrhs {
                x.swap(c * n + k, c * n + p);
            }
        }
        for i in (k + 1)..n {
            let f = m[i * n + k] / m[k * n + k];
            if f == T::zero() {
                continue;
            }
            for j in k..n {
                let v = m[k * n + j];
                m[i * n + j] = m[i * n + j] - f * v;
            }
            for c in 0..nrhs {
                let v = x[c * n + k];
                x[c * n + i] = x[c * n + i] - f * v;
            }
        }
    }
    for c in 0..nrhs {
        for k in (0..n).rev() {
            let mut s = x[c * n + k];
            for j in (k + 1)..n {
                s = s - m[k * n + j] * x[c * n + j];
            }
            x[c * n + k] = s / m[k * n + k];
        }
    }
    Some(x)
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}
