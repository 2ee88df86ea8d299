//! Discrete spaces: the BDM1 x Q0 x Q1 triple on rectangles, material laws,
//! mortar spaces and the trace projections between them.

pub mod bdm;
pub mod material;
pub mod mortar;
pub mod solvability;
pub mod trace;

pub use bdm::Bdm1Rect;
pub use material::{Lame, MaterialField};
pub use mortar::{MortarBasis, MortarSpace};
pub use solvability::{check_mortar_solvability, SolvabilityReport};
pub use trace::{SubdomainTrace, TraceSide};

use crate::geometry::SubdomainMesh;

/// Global stress dof of `(edge, row, Gauss point)`.
pub fn stress_dof(edge: usize, row: usize, q: usize) -> usize {
    4 * edge + 2 * row + q
}

/// Sizes and offsets of the `[sigma | u | gamma]` unknowns on one subdomain.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DofLayout {
    pub n_sigma: usize,
    pub n_u: usize,
    pub n_gamma: usize,
}

impl DofLayout {
    pub fn new(mesh: &SubdomainMesh) -> Self {
        Self { n_sigma: 4 * mesh.num_edges(), n_u: 2 * mesh.num_cells(), n_gamma: mesh.num_vertices() }
    }

    pub fn total(&self) -> usize {
        self.n_sigma + self.n_u + self.n_gamma
    }

    pub fn u_offset(&self) -> usize {
        self.n_sigma
    }

    pub fn gamma_offset(&self) -> usize {
        self.n_sigma + self.n_u
    }

    pub fn u_dof(&self, cell: usize, comp: usize) -> usize {
        self.n_sigma + 2 * cell + comp
    }

    pub fn gamma_dof(&self, vertex: usize) -> usize {
        self.n_sigma + self.n_u + vertex
    }
}

/// The 16 global stress dofs of cell `(i, j)` in basis order `row * 8 + k`,
/// with `k` running over (left q0, q1, right q0, q1, bottom q0, q1, top q0, q1).
pub fn cell_stress_dofs(mesh: &SubdomainMesh, i: usize, j: usize) -> [usize; 16] {
    let edges = mesh.cell_edges(i, j);
    let mut out = [0; 16];
    for row in 0..2 {
        for (le, &e) in edges.iter().enumerate() {
            for q in 0..2 {
                out[row * 8 + 2 * le + q] = stress_dof(e, row, q);
            }
        }
    }
    out
}
