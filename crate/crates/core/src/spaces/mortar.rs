//! Vector-valued mortar space on the interfaces.
//!
//! Discontinuous mortars use Legendre polynomials normalized to be
//! orthonormal in `L^2` of each segment, so their mass matrix is the identity.
//! Continuous mortars use nodal hats plus integrated-Legendre bubbles.
//! Each scalar function carries two components; the global index of
//! `(interface, scalar, component)` is `offset[interface] + 2 * scalar + component`.

use nalgebra::DMatrix;

use crate::geometry::{Continuity, MortarGrid};
use crate::quadrature::{legendre, GaussRule};
use crate::scalar::Scalar;

/// `L^2(0, len)`-orthonormal Legendre polynomial of degree `k` at local `t` in `[0, 1]`.
pub fn orthonormal_legendre<T: Scalar>(k: usize, t: T, len: T) -> T {
    let kf = T::from_usize_lossy(k);
    let scale = ((kf + kf + T::one()) / len).sqrt();
    scale * legendre(k, t + t - T::one())
}

/// Bubble of degree `k >= 2` vanishing at both segment ends.
pub fn lobatto_bubble<T: Scalar>(k: usize, t: T) -> T {
    let x = t + t - T::one();
    legendre(k, x) - legendre(k - 2, x)
}

/// Basis in which interface iterations see discontinuous mortar coefficients.
///
/// The stored representation is always the orthonormal one; an iteration basis
/// `{psi_j}` enters through the block-diagonal change of coefficients
/// `lambda = T c`, and the interface matrix seen by the iteration is `T^T S T`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum MortarBasis {
    Orthonormal,
    /// `P_k(2t - 1)` on each segment.
    #[default]
    Legendre,
    /// Lagrange polynomials through the Gauss-Lobatto points of each segment.
    Lobatto,
}

impl std::str::FromStr for MortarBasis {
    type Err = crate::Error;
    fn from_str(s: &str) -> crate::Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "orthonormal" | "orth" => Ok(Self::Orthonormal),
            "legendre" => Ok(Self::Legendre),
            "lobatto" | "nodal" => Ok(Self::Lobatto),
            other => Err(crate::Error::Config(format!("unknown mortar basis '{other}'"))),
        }
    }
}

impl std::fmt::Display for MortarBasis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Orthonormal => "orthonormal",
            Self::Legendre => "legendre",
            Self::Lobatto => "lobatto",
        })
    }
}

/// Gauss-Lobatto points of `n >= 2` nodes on `[0, 1]`.
pub fn lobatto_points(n: usize) -> Vec<f64> {
    let m = n - 1;
    let mut pts = vec![0.0; n];
    pts[m] = 1.0;
    // interior nodes: roots of P'_m, by Newton from Chebyshev guesses
    for (j, pt) in pts.iter_mut().enumerate().take(m).skip(1) {
        let mut x = -(std::f64::consts::PI * j as f64 / m as f64).cos();
        for _ in 0..100 {
            let (p, dp) = crate::quadrature::legendre_with_derivative::<f64>(m, x);
            // P'' from the Legendre equation
            let d2 = (2.0 * x * dp - (m * (m + 1)) as f64 * p) / (1.0 - x * x);
            let step = dp / d2;
            x -= step;
            if step.abs() < 1e-15 {
                break;
            }
        }
        *pt = 0.5 * (x + 1.0);
    }
    pts
}

#[derive(Clone, Debug)]
pub struct MortarSpace {
    grids: Vec<MortarGrid>,
    offsets: Vec<usize>,
    dim: usize,
    /// Scalar mass matrix per interface.
    masses: Vec<DMatrix<f64>>,
    basis: MortarBasis,
    /// Per interface and segment, the scalar block of `T`.
    transforms: Vec<Vec<DMatrix<f64>>>,
}

impl MortarSpace {
    pub fn new(grids: Vec<MortarGrid>) -> Self {
        let mut offsets = Vec::with_capacity(grids.len() + 1);
        let mut dim = 0;
        for g in &grids {
            offsets.push(dim);
            dim += 2 * scalar_dim(g);
        }
        offsets.push(dim);
        let masses = grids.iter().map(scalar_mass).collect();
        Self { grids, offsets, dim, masses, basis: MortarBasis::Orthonormal, transforms: Vec::new() }
    }

    /// Choose the iteration basis (only affects discontinuous mortars).
    pub fn with_basis(mut self, basis: MortarBasis) -> Self {
        self.basis = basis;
        self.transforms = self
            .grids
            .iter()
            .map(|g| {
                if g.continuity != Continuity::Discontinuous || basis == MortarBasis::Orthonormal {
                    return Vec::new();
                }
                let m = g.degree + 1;
                (0..g.num_segments())
                    .map(|s| {
                        let (a, b) = g.segment(s);
                        let len = b - a;
                        match basis {
                            MortarBasis::Legendre => DMatrix::from_fn(m, m, |i, j| {
                                if i == j { (len / (2 * i + 1) as f64).sqrt() } else { 0.0 }
                            }),
                            MortarBasis::Lobatto => {
                                let nodes = if m == 1 { vec![0.5] } else { lobatto_points(m) };
                                let v = DMatrix::from_fn(m, m, |j, k| orthonormal_legendre::<f64>(k, nodes[j], len));
                                v.try_inverse().expect("Lobatto Vandermonde is invertible")
                            }
                            MortarBasis::Orthonormal => unreachable!(),
                        }
                    })
                    .collect()
            })
            .collect();
        self
    }

    pub fn basis(&self) -> MortarBasis {
        self.basis
    }

    fn transform(&self, c: &[f64], transpose: bool) -> Vec<f64> {
        if self.transforms.is_empty() {
            return c.to_vec();
        }
        let mut out = c.to_vec();
        for (iface, blocks) in self.transforms.iter().enumerate() {
            let m = self.grids[iface].degree + 1;
            for (s, t) in blocks.iter().enumerate() {
                for comp in 0..2 {
                    for i in 0..m {
                        let mut acc = 0.0;
                        for j in 0..m {
                            let tij = if transpose { t[(j, i)] } else { t[(i, j)] };
                            acc += tij * c[self.dof(iface, s * m + j, comp)];
                        }
                        out[self.dof(iface, s * m + i, comp)] = acc;
                    }
                }
            }
        }
        out
    }

    /// Stored coefficients of the mortar function with iteration-basis coefficients `c`.
    pub fn synthesize(&self, c: &[f64]) -> Vec<f64> {
        self.transform(c, false)
    }

    /// Loads `<., phi_k>` in the stored basis to loads in the iteration basis.
    pub fn analyze(&self, load: &[f64]) -> Vec<f64> {
        self.transform(load, true)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn grids(&self) -> &[MortarGrid] {
        &self.grids
    }

    pub fn grid(&self, iface: usize) -> &MortarGrid {
        &self.grids[iface]
    }

    pub fn offset(&self, iface: usize) -> usize {
        self.offsets[iface]
    }

    /// Vector degrees of freedom on one interface.
    pub fn interface_dim(&self, iface: usize) -> usize {
        self.offsets[iface + 1] - self.offsets[iface]
    }

    pub fn scalar_dim(&self, iface: usize) -> usize {
        self.interface_dim(iface) / 2
    }

    pub fn dof(&self, iface: usize, scalar: usize, comp: usize) -> usize {
        self.offsets[iface] + 2 * scalar + comp
    }

    pub fn is_orthonormal(&self, iface: usize) -> bool {
        self.grids[iface].continuity == Continuity::Discontinuous
    }

    pub fn scalar_mass(&self, iface: usize) -> &DMatrix<f64> {
        &self.masses[iface]
    }

    /// Nonzero scalar basis values at tangential coordinate `t` inside segment `s`.
    pub fn segment_basis(&self, iface: usize, s: usize, t: f64) -> Vec<(usize, f64)> {
        segment_basis(&self.grids[iface], s, t)
    }

    /// Evaluate the vector mortar function `mu` on interface `iface` at `t`.
    pub fn evaluate(&self, mu: &[f64], iface: usize, t: f64) -> [f64; 2] {
        let grid = &self.grids[iface];
        let s = locate(&grid.breakpoints, t);
        let mut out = [0.0; 2];
        for (k, v) in self.segment_basis(iface, s, t) {
            out[0] += v * mu[self.dof(iface, k, 0)];
            out[1] += v * mu[self.dof(iface, k, 1)];
        }
        out
    }

    /// Solve with the scalar mass matrix of `iface`, componentwise, on an
    /// interface-local vector.
    pub fn solve_mass(&self, iface: usize, local: &mut [f64]) {
        if self.is_orthonormal(iface) {
            return;
        }
        let n = self.scalar_dim(iface);
        let chol = self.masses[iface].clone().cholesky().expect("mortar mass matrix is SPD");
        for comp in 0..2 {
            let rhs = nalgebra::DVector::from_fn(n, |k, _| local[2 * k + comp]);
            let x = chol.solve(&rhs);
            for k in 0..n {
                local[2 * k + comp] = x[k];
            }
        }
    }

    /// `L^2(Gamma)` projection of `f` onto the mortar space.
    pub fn project_function(&self, f: impl Fn(f64, usize) -> [f64; 2]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        for (iface, grid) in self.grids.iter().enumerate() {
            let rule = GaussRule::<f64>::new(grid.degree + 6);
            let off = self.offsets[iface];
            let mut local = vec![0.0; self.interface_dim(iface)];
            for s in 0..grid.num_segments() {
                let (a, b) = grid.segment(s);
                for (&p, &w) in rule.points.iter().zip(&rule.weights) {
                    let t = a + (b - a) * p;
                    let val = f(t, iface);
                    for (k, phi) in self.segment_basis(iface, s, t) {
                        local[2 * k] += w * (b - a) * phi * val[0];
                        local[2 * k + 1] += w * (b - a) * phi * val[1];
                    }
                }
            }
            self.solve_mass(iface, &mut local);
            out[off..off + local.len()].copy_from_slice(&local);
        }
        out
    }

    /// `L^2(Gamma)` inner product of two mortar functions.
    pub fn inner(&self, a: &[f64], b: &[f64]) -> f64 {
        let mut acc = 0.0;
        for iface in 0..self.grids.len() {
            let n = self.scalar_dim(iface);
            let m = &self.masses[iface];
            for comp in 0..2 {
                for i in 0..n {
                    for j in 0..n {
                        acc += a[self.dof(iface, i, comp)] * m[(i, j)] * b[self.dof(iface, j, comp)];
                    }
                }
            }
        }
        acc
    }
}

pub fn scalar_dim(grid: &MortarGrid) -> usize {
    let nseg = grid.num_segments();
    match grid.continuity {
        Continuity::Discontinuous => nseg * (grid.degree + 1),
        Continuity::Continuous => nseg + 1 + nseg * (grid.degree - 1),
    }
}

fn segment_basis(grid: &MortarGrid, s: usize, t: f64) -> Vec<(usize, f64)> {
    let (a, b) = grid.segment(s);
    let len = b - a;
    let local = (t - a) / len;
    let m = grid.degree;
    match grid.continuity {
        Continuity::Discontinuous => {
            (0..=m).map(|k| (s * (m + 1) + k, orthonormal_legendre(k, local, len))).collect()
        }
        Continuity::Continuous => {
            let nseg = grid.num_segments();
            let mut out = vec![(s, 1.0 - local), (s + 1, local)];
            for k in 2..=m {
                out.push((nseg + 1 + s * (m - 1) + (k - 2), lobatto_bubble(k, local)));
            }
            out
        }
    }
}

fn scalar_mass(grid: &MortarGrid) -> DMatrix<f64> {
    let n = scalar_dim(grid);
    let rule = GaussRule::<f64>::new(grid.degree + 2);
    let mut m = DMatrix::zeros(n, n);
    for s in 0..grid.num_segments() {
        let (a, b) = grid.segment(s);
        for (&p, &w) in rule.points.iter().zip(&rule.weights) {
            let vals = segment_basis(grid, s, a + (b - a) * p);
            for &(i, vi) in &vals {
                for &(j, vj) in &vals {
                    m[(i, j)] += w * (b - a) * vi * vj;
                }
            }
        }
    }
    m
}

/// Index of the segment of `breakpoints` containing `t` (closed on the right for the last one).
pub fn locate(breakpoints: &[f64], t: f64) -> usize {
    let n = breakpoints.len() - 1;
    match breakpoints[1..n].iter().position(|&b| t < b) {
        Some(s) => s,
        None => n - 1,
    }
}
