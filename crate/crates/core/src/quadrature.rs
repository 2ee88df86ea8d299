//! Gauss-Legendre rules on the unit interval and their tensor products.

use crate::scalar::Scalar;

/// Gauss-Legendre rule mapped to `[0, 1]`; weights sum to one.
#[derive(Clone, Debug)]
pub struct GaussRule<T> {
    pub points: Vec<T>,
    pub weights: Vec<T>,
}

/// Value and derivative of the Legendre polynomial `P_n` at `x` in `[-1, 1]`.
pub fn legendre_with_derivative<T: Scalar>(n: usize, x: T) -> (T, T) {
    if n == 0 {
        return (T::one(), T::zero());
    }
    let mut p_prev = T::one();
    let mut p = x;
    for k in 2..=n {
        let kf = T::from_usize_lossy(k);
        let next = ((kf + kf - T::one()) * x * p - (kf - T::one()) * p_prev) / kf;
        p_prev = p;
        p = next;
    }
    let nf = T::from_usize_lossy(n);
    let dp = if (T::one() - x * x).abs() < T::epsilon() {
        // endpoint limit n(n+1)/2 * x^(n+1)
        let s = if x > T::zero() || n % 2 == 1 { T::one() } else { -T::one() };
        s * nf * (nf + T::one()) / T::lit(2.0)
    } else {
        nf * (x * p - p_prev) / (x * x - T::one())
    };
    (p, dp)
}

pub fn legendre<T: Scalar>(n: usize, x: T) -> T {
    legendre_with_derivative(n, x).0
}

impl<T: Scalar> GaussRule<T> {
    /// `n`-point rule, exact for polynomials of degree `2n - 1`.
    pub fn new(n: usize) -> Self {
        assert!(n > 0, "a Gauss rule needs at least one point");
        let mut points = vec![T::zero(); n];
        let mut weights = vec![T::zero(); n];
        let nf = T::from_usize_lossy(n);
        let pi = T::lit(std::f64::consts::PI);
        for i in 0..n.div_ceil(2) {
            let i_f = T::from_usize_lossy(i);
            let mut x = (pi * (i_f + T::lit(0.75)) / (nf + T::lit(0.5))).cos();
            for _ in 0..100 {
                let (p, dp) = legendre_with_derivative(n, x);
                let dx = p / dp;
                x = x - dx;
                if dx.abs() <= T::epsilon() * T::lit(4.0) {
                    break;
                }
            }
            let (_, dp) = legendre_with_derivative(n, x);
            let w = T::lit(2.0) / ((T::one() - x * x) * dp * dp);
            // x is the i-th largest root; map to [0, 1] and halve the weight
            let half = T::lit(0.5);
            points[n - 1 - i] = half * (T::one() + x);
            points[i] = half * (T::one() - x);
            weights[n - 1 - i] = half * w;
            weights[i] = half * w;
        }
        Self { points, weights }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Integrate `f` over `[a, b]`.
    pub fn integrate(&self, a: T, b: T, mut f: impl FnMut(T) -> T) -> T {
        let len = b - a;
        self.points
            .iter()
            .zip(&self.weights)
            .map(|(&t, &w)| w * f(a + len * t))
            .sum::<T>()
            * len
    }

    /// Tensor-product points `(xi, eta, weight)` on the unit square.
    pub fn tensor(&self) -> Vec<(T, T, T)> {
        let mut out = Vec::with_capacity(self.len() * self.len());
        for (j, &eta) in self.points.iter().enumerate() {
            for (i, &xi) in self.points.iter().enumerate() {
                out.push((xi, eta, self.weights[i] * self.weights[j]));
            }
        }
        out
    }
}
