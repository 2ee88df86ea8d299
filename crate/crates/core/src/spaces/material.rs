//! Isotropic compliance law and material coefficient fields.

use std::fmt;
use std::sync::Arc;

use crate::scalar::Scalar;

/// Lame coefficients.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Lame<T> {
    pub lambda: T,
    pub mu: T,
}

impl<T: Scalar> Lame<T> {
    pub fn new(lambda: T, mu: T) -> Self {
        Self { lambda, mu }
    }

    pub fn is_admissible(&self) -> bool {
        self.mu > T::zero() && self.lambda >= T::zero() && self.lambda.is_finite() && self.mu.is_finite()
    }

    /// `A s = (s - lambda / (2 mu + 2 lambda) tr(s) I) / (2 mu)` in two dimensions.
    pub fn compliance(&self, s: [[T; 2]; 2]) -> [[T; 2]; 2] {
        let two = T::lit(2.0);
        let k = self.lambda / (two * self.mu + two * self.lambda);
        let tr = s[0][0] + s[1][1];
        let inv = T::one() / (two * self.mu);
        [
            [(s[0][0] - k * tr) * inv, s[0][1] * inv],
            [s[1][0] * inv, (s[1][1] - k * tr) * inv],
        ]
    }

    /// `(A s) : t`.
    pub fn compliance_inner(&self, s: [[T; 2]; 2], t: [[T; 2]; 2]) -> T {
        let a = self.compliance(s);
        a[0][0] * t[0][0] + a[0][1] * t[0][1] + a[1][0] * t[1][0] + a[1][1] * t[1][1]
    }

    /// Stiffness law `2 mu e + lambda tr(e) I`.
    pub fn stress_from_strain(&self, e: [[T; 2]; 2]) -> [[T; 2]; 2] {
        let two = T::lit(2.0);
        let tr = e[0][0] + e[1][1];
        [
            [two * self.mu * e[0][0] + self.lambda * tr, two * self.mu * e[0][1]],
            [two * self.mu * e[1][0], two * self.mu * e[1][1] + self.lambda * tr],
        ]
    }
}

pub type LameFn = dyn Fn(f64, f64) -> Lame<f64> + Send + Sync;

/// Spatially varying Lame coefficients.
#[derive(Clone)]
pub struct MaterialField {
    field: Arc<LameFn>,
}

impl MaterialField {
    pub fn new(f: impl Fn(f64, f64) -> Lame<f64> + Send + Sync + 'static) -> Self {
        Self { field: Arc::new(f) }
    }

    pub fn constant(lame: Lame<f64>) -> Self {
        Self::new(move |_, _| lame)
    }

    pub fn at(&self, x: f64, y: f64) -> Lame<f64> {
        (self.field)(x, y)
    }

    /// Multiply both coefficients by `s`.
    pub fn scaled(&self, s: f64) -> Self {
        let inner = self.field.clone();
        Self::new(move |x, y| {
            let l = inner(x, y);
            Lame::new(l.lambda * s, l.mu * s)
        })
    }
}

impl fmt::Debug for MaterialField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MaterialField").finish_non_exhaustive()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn compliance_of_identity() {
        for &(lambda, mu) in &[(1.0, 1.0), (0.0, 2.0), (10.0, 0.5)] {
            let l = Lame::new(lambda, mu);
            let a = l.compliance([[1.0f64, 0.0], [0.0, 1.0]]);
            let want = 1.0 / (2.0 * mu + 2.0 * lambda);
            assert!((a[0][0] - want).abs() < 1e-15 && (a[1][1] - want).abs() < 1e-15);
            assert_eq!(a[0][1], 0.0);
        }
    }

    #[test]
    fn stiffness_inverts_compliance() {
        let l = Lame::new(2.5f64, 0.7);
        let s = [[1.0, 0.3], [0.3, -2.0]];
        let back = l.stress_from_strain(l.compliance(s));
        for r in 0..2 {
            for c in 0..2 {
                assert!((back[r][c] - s[r][c]).abs() < 1e-13);
            }
        }
    }

    proptest! {
        #[test]
        fn compliance_bounds(
            lambda in 0.0f64..100.0, mu in 0.01f64..100.0,
            a in -10.0f64..10.0, b in -10.0f64..10.0, c in -10.0f64..10.0
        ) {
            let l = Lame::new(lambda, mu);
            let s = [[a, b], [b, c]];
            let norm2 = a * a + 2.0 * b * b + c * c;
            let e = l.compliance_inner(s, s);
            let tol = 1e-12 * norm2.max(1.0);
            prop_assert!(e >= norm2 / (2.0 * mu + 2.0 * lambda) - tol);
            prop_assert!(e <= norm2 / (2.0 * mu) + tol);
        }
    }
}
