//! Check that no nonzero mortar function is invisible to both adjacent trace spaces.

use nalgebra::DMatrix;

use crate::geometry::Layout;
use crate::spaces::mortar::MortarSpace;
use crate::spaces::trace::{SubdomainTrace, TraceSide};
use crate::{Error, Result};

/// Relative singular-value threshold below which the stacked projection is
/// considered rank deficient.
pub const RANK_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct InterfaceSolvability {
    pub interface: usize,
    /// Smallest singular value of the `L^2`-normalized stacked projection,
    /// scaled so that matching trace and mortar grids give 1.
    pub sigma_min: f64,
    pub sigma_max: f64,
}

impl InterfaceSolvability {
    pub fn is_ok(&self) -> bool {
        self.sigma_max > 0.0 && self.sigma_min / self.sigma_max > RANK_TOLERANCE
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolvabilityReport {
    pub interfaces: Vec<InterfaceSolvability>,
}

impl SolvabilityReport {
    pub fn violated(&self) -> Vec<usize> {
        self.interfaces.iter().filter(|r| !r.is_ok()).map(|r| r.interface).collect()
    }

    pub fn is_ok(&self) -> bool {
        self.violated().is_empty()
    }

    pub fn into_result(self) -> Result<Self> {
        let bad = self.violated();
        if bad.is_empty() { Ok(self) } else { Err(Error::Solvability(bad)) }
    }

    /// Smallest `sigma_min` over all interfaces (1 when there are none).
    pub fn constant(&self) -> f64 {
        self.interfaces.iter().map(|r| r.sigma_min).fold(1.0, f64::min)
    }
}

/// `L^2`-normalized matrix of `Q_h` on one side: trace mass `(|e|/2) I`,
/// mortar mass `L L^T`, giving `sqrt(|e|/2) (2/|e|) G L^{-T}`.
fn normalized_projection(side: &TraceSide, mortar: &MortarSpace) -> DMatrix<f64> {
    let iface = side.interface;
    let scale = (2.0 / side.edge_len).sqrt();
    let mut q = &side.cross * scale;
    if !mortar.is_orthonormal(iface) {
        let n = mortar.scalar_dim(iface);
        let chol = mortar.scalar_mass(iface).clone().cholesky().expect("mortar mass matrix is SPD");
        let l = chol.l();
        let mut full = DMatrix::zeros(2 * n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                for c in 0..2 {
                    full[(2 * i + c, 2 * j + c)] = l[(i, j)];
                }
            }
        }
        // q L^{-T}: solve L X^T = q^T
        let xt = full.solve_lower_triangular(&q.transpose()).expect("nonsingular Cholesky factor");
        q = xt.transpose();
    }
    q
}

pub fn check_mortar_solvability(layout: &Layout, mortar: &MortarSpace, traces: &[SubdomainTrace]) -> SolvabilityReport {
    let decomp = &layout.decomposition;
    let mut out = Vec::with_capacity(decomp.interfaces.len());
    for g in &decomp.interfaces {
        let find = |s: usize| {
            traces[s].sides.iter().find(|side| side.interface == g.id).expect("interface side present")
        };
        let a = normalized_projection(find(g.lo), mortar);
        let b = normalized_projection(find(g.hi), mortar);
        let n = a.ncols();
        let mut stacked = DMatrix::zeros(a.nrows() + b.nrows(), n);
        stacked.rows_mut(0, a.nrows()).copy_from(&a);
        stacked.rows_mut(a.nrows(), b.nrows()).copy_from(&b);
        let (smin, smax) = if n == 0 {
            (1.0, 1.0)
        } else if stacked.nrows() < n {
            let sv = stacked.singular_values();
            (0.0, sv.max())
        } else {
            let sv = stacked.singular_values();
            (sv.min(), sv.max())
        };
        let r = std::f64::consts::SQRT_2;
        out.push(InterfaceSolvability { interface: g.id, sigma_min: smin / r, sigma_max: smax / r });
    }
    SolvabilityReport { interfaces: out }
}
