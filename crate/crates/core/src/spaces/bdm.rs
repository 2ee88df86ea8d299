//! Lowest-order Brezzi-Douglas-Marini element on an axis-aligned rectangle.
//!
//! The local space is the full linear vector space plus `curl(x^2 y)` and
//! `curl(x y^2)`. Degrees of freedom are the values of the normal component
//! (with respect to the global `+x` / `+y` normal) at the two Gauss points of
//! each edge. Local order: left (2), right (2), bottom (2), top (2), with the
//! two points of an edge in increasing tangential coordinate.

use crate::linalg::dense_solve;
use crate::scalar::Scalar;

pub const LOCAL_VECTOR_DOFS: usize = 8;
pub const LOCAL_STRESS_DOFS: usize = 16;

/// Gauss points of the edge degrees of freedom on `[0, 1]`.
pub fn edge_nodes<T: Scalar>() -> [T; 2] {
    let d = T::lit(0.5) / T::lit(3.0).sqrt();
    [T::lit(0.5) - d, T::lit(0.5) + d]
}

/// Linear Lagrange functions through the edge nodes, evaluated at `t`.
pub fn edge_shape<T: Scalar>(t: T) -> [T; 2] {
    let [g0, g1] = edge_nodes::<T>();
    let d = g1 - g0;
    [(g1 - t) / d, (t - g0) / d]
}

#[derive(Clone, Debug)]
pub struct Bdm1Rect<T> {
    hx: T,
    hy: T,
    /// `coeffs[m][k]`: coefficient of monomial `m` in nodal basis function `k`.
    coeffs: [[T; LOCAL_VECTOR_DOFS]; LOCAL_VECTOR_DOFS],
}

impl<T: Scalar> Bdm1Rect<T> {
    pub fn new(hx: T, hy: T) -> Self {
        assert!(hx > T::zero() && hy > T::zero());
        let mut element = Self { hx, hy, coeffs: [[T::zero(); 8]; 8] };
        let nodes = edge_nodes::<T>();
        let mut dofs = vec![T::zero(); 64];
        for m in 0..8 {
            for (q, &g) in nodes.iter().enumerate() {
                let rows = [
                    (q, element.monomial(m, T::zero(), g)[0]),
                    (2 + q, element.monomial(m, T::one(), g)[0]),
                    (4 + q, element.monomial(m, g, T::zero())[1]),
                    (6 + q, element.monomial(m, g, T::one())[1]),
                ];
                for (k, v) in rows {
                    dofs[k * 8 + m] = v;
                }
            }
        }
        let mut identity = vec![T::zero(); 64];
        for k in 0..8 {
            identity[k * 8 + k] = T::one();
        }
        let inv = dense_solve(8, &dofs, &identity).expect("BDM1 degrees of freedom are unisolvent");
        for k in 0..8 {
            for m in 0..8 {
                element.coeffs[m][k] = inv[k * 8 + m];
            }
        }
        element
    }

    pub fn hx(&self) -> T {
        self.hx
    }

    pub fn hy(&self) -> T {
        self.hy
    }

    fn monomial(&self, m: usize, xi: T, eta: T) -> [T; 2] {
        let two = T::lit(2.0);
        let r = self.hy / self.hx;
        match m {
            0 => [T::one(), T::zero()],
            1 => [xi, T::zero()],
            2 => [eta, T::zero()],
            3 => [T::zero(), T::one()],
            4 => [T::zero(), xi],
            5 => [T::zero(), eta],
            // curl(x^2 y) and curl(x y^2) in cell-local coordinates
            6 => [xi * xi, -two * r * xi * eta],
            7 => [two * xi * eta / r, -eta * eta],
            _ => unreachable!(),
        }
    }

    fn monomial_div(&self, m: usize) -> T {
        match m {
            1 => T::one() / self.hx,
            5 => T::one() / self.hy,
            _ => T::zero(),
        }
    }

    /// Values of the 8 vector basis functions at local point `(xi, eta)` in `[0,1]^2`.
    pub fn values(&self, xi: T, eta: T) -> [[T; 2]; LOCAL_VECTOR_DOFS] {
        let mono: [[T; 2]; 8] = std::array::from_fn(|m| self.monomial(m, xi, eta));
        std::array::from_fn(|k| {
            let mut v = [T::zero(); 2];
            for (m, p) in mono.iter().enumerate() {
                v[0] = v[0] + self.coeffs[m][k] * p[0];
                v[1] = v[1] + self.coeffs[m][k] * p[1];
            }
            v
        })
    }

    /// Divergence of each vector basis function (constant on the cell).
    pub fn divergences(&self) -> [T; LOCAL_VECTOR_DOFS] {
        std::array::from_fn(|k| (0..8).map(|m| self.coeffs[m][k] * self.monomial_div(m)).sum())
    }

    /// Matrix-valued basis: function `row * 8 + k` has row `row` equal to vector
    /// basis `k` and the other row zero. Returns values and row-wise divergences.
    #[allow(clippy::type_complexity)]
    pub fn stress_basis(&self, xi: T, eta: T) -> ([[[T; 2]; 2]; LOCAL_STRESS_DOFS], [[T; 2]; LOCAL_STRESS_DOFS]) {
        let v = self.values(xi, eta);
        let d = self.divergences();
        let mut vals = [[[T::zero(); 2]; 2]; 16];
        let mut divs = [[T::zero(); 2]; 16];
        for row in 0..2 {
            for k in 0..8 {
                vals[row * 8 + k][row] = v[k];
                divs[row * 8 + k][row] = d[k];
            }
        }
        (vals, divs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nodal_check<T: Scalar>(hx: T, hy: T, tol: T) {
        let e = Bdm1Rect::new(hx, hy);
        let nodes = edge_nodes::<T>();
        for k in 0..8 {
            for (q, &g) in nodes.iter().enumerate() {
                let got = [
                    e.values(T::zero(), g)[k][0],
                    e.values(T::one(), g)[k][0],
                    e.values(g, T::zero())[k][1],
                    e.values(g, T::one())[k][1],
                ];
                for (edge, v) in got.into_iter().enumerate() {
                    let want = if k == edge * 2 + q { T::one() } else { T::zero() };
                    assert!((v - want).abs() < tol, "k={k} edge={edge} q={q}: {v:?}");
                }
            }
        }
    }

    #[test]
    fn nodal_basis_f64_and_f32() {
        nodal_check(1.0f64, 1.0, 1e-13);
        nodal_check(0.25f64, 1.0 / 6.0, 1e-12);
        nodal_check(0.5f32, 0.125, 1e-4);
    }

    #[test]
    fn constants_reproduced() {
        // sigma = I: row 0 = (1, 0) has x-normal value 1 on vertical edges
        let e = Bdm1Rect::new(0.3, 0.7);
        for &(xi, eta) in &[(0.1, 0.2), (0.9, 0.5), (0.5, 0.5)] {
            let v = e.values(xi, eta);
            let row0: [f64; 2] = std::array::from_fn(|c| (0..4).map(|k| v[k][c]).sum());
            let row1: [f64; 2] = std::array::from_fn(|c| (4..8).map(|k| v[k][c]).sum());
            assert!((row0[0] - 1.0).abs() < 1e-13 && row0[1].abs() < 1e-13);
            assert!(row1[0].abs() < 1e-13 && (row1[1] - 1.0).abs() < 1e-13);
        }
        let d = e.divergences();
        assert!((0..4).map(|k| d[k]).sum::<f64>().abs() < 1e-12);
        assert!((4..8).map(|k| d[k]).sum::<f64>().abs() < 1e-12);
    }

    #[test]
    fn normal_trace_is_linear_on_edges() {
        let e = Bdm1Rect::new(0.5, 0.25);
        for k in 0..8 {
            let f = |t: f64| e.values(1.0, t)[k][0];
            let mid = f(0.5);
            assert!((mid - 0.5 * (f(0.0) + f(1.0))).abs() < 1e-12);
            let g = |t: f64| e.values(t, 0.0)[k][1];
            assert!((g(0.3) - (0.7 * g(0.0) + 0.3 * g(1.0))).abs() < 1e-12);
        }
    }
}
