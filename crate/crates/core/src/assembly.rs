//! Subdomain saddle-point matrices and right-hand sides.
//!
//! Unknown ordering on a subdomain is `[sigma | u | gamma]` (see
//! [`DofLayout`]). The assembled matrix is
//!
//! ```text
//! [ A    B_u^T  B_g^T ]
//! [ B_u  0      0     ]
//! [ B_g  0      0     ]
//! ```
//!
//! with `A <-> (A sigma, tau)`, `B_u <-> (div sigma, v)` and
//! `B_g <-> (sigma, xi)`, where a rotation `gamma` acts through the skew
//! matrix `[[0, -gamma], [gamma, 0]]` so that `(xi, tau) = xi (tau_21 - tau_12)`.

use crate::geometry::{BoundaryKind, Side, SideClass, SubdomainMesh};
use crate::linalg::CsrMatrix;
use crate::quadrature::GaussRule;
use crate::spaces::bdm::{edge_shape, Bdm1Rect};
use crate::spaces::{cell_stress_dofs, stress_dof, DofLayout, MaterialField};
use crate::{Error, Result};

/// Points per direction of the volume rule.
pub const VOLUME_POINTS: usize = 3;
/// Points per edge for boundary data.
pub const BOUNDARY_POINTS: usize = 7;

#[derive(Clone, Debug)]
pub struct SaddleSystem {
    pub matrix: CsrMatrix,
    pub layout: DofLayout,
    /// Stress dofs on traction-free boundary edges (normal trace fixed to zero).
    pub neumann_dofs: Vec<usize>,
    /// Stress dofs on interface edges.
    pub interface_dofs: Vec<usize>,
}

impl SaddleSystem {
    pub fn dim(&self) -> usize {
        self.layout.total()
    }

    /// Stress energy `(A sigma, tau)` of two full solution vectors.
    pub fn stress_energy(&self, x: &[f64], y: &[f64]) -> f64 {
        self.matrix.leading_form(self.layout.n_sigma, x, y)
    }
}

/// Stress dofs along one side of a subdomain.
pub fn side_stress_dofs(mesh: &SubdomainMesh, side: Side) -> Vec<usize> {
    let mut out = Vec::new();
    for e in mesh.side_edges(side) {
        for row in 0..2 {
            for q in 0..2 {
                out.push(stress_dof(e, row, q));
            }
        }
    }
    out
}

/// Bilinear vertex shape functions in order (bl, br, tl, tr).
fn vertex_shapes(xi: f64, eta: f64) -> [f64; 4] {
    [(1.0 - xi) * (1.0 - eta), xi * (1.0 - eta), (1.0 - xi) * eta, xi * eta]
}

pub fn assemble_subdomain(mesh: &SubdomainMesh, material: &MaterialField) -> Result<SaddleSystem> {
    let layout = DofLayout::new(mesh);
    let element = Bdm1Rect::<f64>::new(mesh.hx, mesh.hy);
    let rule = GaussRule::<f64>::new(VOLUME_POINTS).tensor();
    let area = mesh.cell_area();
    let basis: Vec<_> = rule.iter().map(|&(xi, eta, _)| element.stress_basis(xi, eta)).collect();
    let shapes: Vec<_> = rule.iter().map(|&(xi, eta, _)| vertex_shapes(xi, eta)).collect();
    let div = element.divergences();

    let mut trip = Vec::with_capacity(mesh.num_cells() * (256 + 2 * 16 * 2 + 2 * 64));
    for j in 0..mesh.ny {
        for i in 0..mesh.nx {
            let dofs = cell_stress_dofs(mesh, i, j);
            let (x0, y0) = mesh.cell_origin(i, j);
            let cell = mesh.cell_index(i, j);
            let verts = mesh.cell_vertices(i, j);
            let mut a_loc = [[0.0; 16]; 16];
            let mut g_loc = [[0.0; 16]; 4];
            for (qp, &(xi, eta, w)) in rule.iter().enumerate() {
                let (x, y) = (x0 + xi * mesh.hx, y0 + eta * mesh.hy);
                let lame = material.at(x, y);
                if !lame.is_admissible() {
                    return Err(Error::Material { x, y, lambda: lame.lambda, mu: lame.mu });
                }
                let wa = w * area;
                let (vals, _) = &basis[qp];
                let comp: Vec<_> = vals.iter().map(|&s| lame.compliance(s)).collect();
                for a in 0..16 {
                    for b in a..16 {
                        let c = &comp[a];
                        let t = &vals[b];
                        let v = c[0][0] * t[0][0] + c[0][1] * t[0][1] + c[1][0] * t[1][0] + c[1][1] * t[1][1];
                        a_loc[a][b] += wa * v;
                    }
                    let skew = vals[a][1][0] - vals[a][0][1];
                    for (v, &phi) in shapes[qp].iter().enumerate() {
                        g_loc[v][a] += wa * phi * skew;
                    }
                }
            }
            for a in 0..16 {
                for b in a..16 {
                    trip.push((dofs[a], dofs[b], a_loc[a][b]));
                    if a != b {
                        trip.push((dofs[b], dofs[a], a_loc[a][b]));
                    }
                }
                let row = a / 8;
                let bu = area * div[a % 8];
                if bu != 0.0 {
                    let u = layout.u_dof(cell, row);
                    trip.push((u, dofs[a], bu));
                    trip.push((dofs[a], u, bu));
                }
                for (v, &vert) in verts.iter().enumerate() {
                    let g = layout.gamma_dof(vert);
                    trip.push((g, dofs[a], g_loc[v][a]));
                    trip.push((dofs[a], g, g_loc[v][a]));
                }
            }
        }
    }
    let matrix = CsrMatrix::from_triplets(layout.total(), layout.total(), trip);

    let mut neumann_dofs = Vec::new();
    let mut interface_dofs = Vec::new();
    for side in Side::ALL {
        match mesh.side_class(side) {
            SideClass::Boundary(BoundaryKind::Neumann) => neumann_dofs.extend(side_stress_dofs(mesh, side)),
            SideClass::Interface(_) => interface_dofs.extend(side_stress_dofs(mesh, side)),
            SideClass::Boundary(BoundaryKind::Dirichlet) => {}
        }
    }
    neumann_dofs.sort_unstable();
    neumann_dofs.dedup();
    interface_dofs.sort_unstable();
    Ok(SaddleSystem { matrix, layout, neumann_dofs, interface_dofs })
}

/// Right-hand side split by block.
#[derive(Clone, Debug, PartialEq)]
pub struct RhsFunctional {
    pub stress: Vec<f64>,
    pub displacement: Vec<f64>,
    pub rotation: Vec<f64>,
}

impl RhsFunctional {
    pub fn zeros(layout: &DofLayout) -> Self {
        Self { stress: vec![0.0; layout.n_sigma], displacement: vec![0.0; layout.n_u], rotation: vec![0.0; layout.n_gamma] }
    }

    pub fn to_vector(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(self.stress.len() + self.displacement.len() + self.rotation.len());
        v.extend_from_slice(&self.stress);
        v.extend_from_slice(&self.displacement);
        v.extend_from_slice(&self.rotation);
        v
    }

    pub fn is_zero(&self) -> bool {
        self.stress.iter().chain(&self.displacement).chain(&self.rotation).all(|&v| v == 0.0)
    }
}

/// `(f, v)` on cells and `<g_D, tau n>` on Dirichlet edges.
pub fn assemble_bar_rhs(
    mesh: &SubdomainMesh,
    f: &dyn Fn(f64, f64) -> [f64; 2],
    g_d: &dyn Fn(f64, f64) -> [f64; 2],
) -> RhsFunctional {
    let layout = DofLayout::new(mesh);
    let mut rhs = RhsFunctional::zeros(&layout);
    let rule = GaussRule::<f64>::new(VOLUME_POINTS).tensor();
    let area = mesh.cell_area();
    for j in 0..mesh.ny {
        for i in 0..mesh.nx {
            let (x0, y0) = mesh.cell_origin(i, j);
            let cell = mesh.cell_index(i, j);
            for &(xi, eta, w) in &rule {
                let v = f(x0 + xi * mesh.hx, y0 + eta * mesh.hy);
                rhs.displacement[2 * cell] += w * area * v[0];
                rhs.displacement[2 * cell + 1] += w * area * v[1];
            }
        }
    }
    let edge_rule = GaussRule::<f64>::new(BOUNDARY_POINTS);
    for side in Side::ALL {
        if mesh.side_class(side) != SideClass::Boundary(BoundaryKind::Dirichlet) {
            continue;
        }
        let sign = side.outward_sign();
        let len = mesh.side_edge_length(side);
        for (k, e) in mesh.side_edges(side).into_iter().enumerate() {
            let (a, b) = mesh.side_edge_bounds(side, k);
            for (&p, &w) in edge_rule.points.iter().zip(&edge_rule.weights) {
                let t = a + (b - a) * p;
                let (x, y) = side_point(mesh, side, t);
                let g = g_d(x, y);
                let l = edge_shape(p);
                for row in 0..2 {
                    for q in 0..2 {
                        rhs.stress[stress_dof(e, row, q)] += sign * w * len * l[q] * g[row];
                    }
                }
            }
        }
    }
    rhs
}

/// Physical point on `side` at tangential coordinate `t`.
pub fn side_point(mesh: &SubdomainMesh, side: Side, t: f64) -> (f64, f64) {
    let r = &mesh.rect;
    match side {
        Side::Left => (r.x0, t),
        Side::Right => (r.x1, t),
        Side::Bottom => (t, r.y0),
        Side::Top => (t, r.y1),
    }
}

/// `<mu, tau n_i>_{Gamma_i}` for a mortar function `mu`; other blocks zero.
pub fn assemble_star_rhs(
    trace: &crate::spaces::SubdomainTrace,
    mortar: &crate::spaces::MortarSpace,
    mu: &[f64],
    layout: &DofLayout,
) -> RhsFunctional {
    let mut rhs = RhsFunctional::zeros(layout);
    let eta = trace.project_mortar(mortar, mu);
    trace.add_stress_load(&eta, &mut rhs.stress);
    rhs
}
