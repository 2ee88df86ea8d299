//! Discrete error norms against exact solutions.

use crate::geometry::{Layout, SubdomainMesh};
use crate::quadrature::GaussRule;
use crate::solver::MixedField;
use crate::spaces::{cell_stress_dofs, Bdm1Rect};
use crate::verification::cases::Exact;

/// Relative errors of one run. `mortar` is `NaN` when not applicable.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ErrorReport {
    pub sigma: f64,
    pub div: f64,
    pub u: f64,
    pub phu: f64,
    pub gamma: f64,
    pub mortar: f64,
}

impl ErrorReport {
    pub fn as_array(&self) -> [f64; 6] {
        [self.sigma, self.div, self.u, self.phu, self.gamma, self.mortar]
    }

    pub const NAMES: [&'static str; 6] = ["sigma", "div", "u", "Phu", "gamma", "mortar"];
}

/// Discrete stress of one subdomain at local point `(xi, eta)` of cell `(i, j)`.
pub fn stress_at(mesh: &SubdomainMesh, element: &Bdm1Rect<f64>, sigma: &[f64], i: usize, j: usize, xi: f64, eta: f64) -> [[f64; 2]; 2] {
    let dofs = cell_stress_dofs(mesh, i, j);
    let (vals, _) = element.stress_basis(xi, eta);
    let mut s = [[0.0; 2]; 2];
    for (a, &d) in dofs.iter().enumerate() {
        for r in 0..2 {
            for c in 0..2 {
                s[r][c] += sigma[d] * vals[a][r][c];
            }
        }
    }
    s
}

/// Cellwise constant divergence of the discrete stress.
pub fn div_at(mesh: &SubdomainMesh, element: &Bdm1Rect<f64>, sigma: &[f64], i: usize, j: usize) -> [f64; 2] {
    let dofs = cell_stress_dofs(mesh, i, j);
    let div = element.divergences();
    let mut out = [0.0; 2];
    for (a, &d) in dofs.iter().enumerate() {
        out[a / 8] += sigma[d] * div[a % 8];
    }
    out
}

pub fn rotation_at(mesh: &SubdomainMesh, gamma: &[f64], i: usize, j: usize, xi: f64, eta: f64) -> f64 {
    let v = mesh.cell_vertices(i, j);
    let w = [(1.0 - xi) * (1.0 - eta), xi * (1.0 - eta), (1.0 - xi) * eta, xi * eta];
    v.iter().zip(w).map(|(&k, w)| gamma[k] * w).sum()
}

fn ratio(num: f64, den: f64) -> f64 {
    if den > 0.0 { (num / den).sqrt() } else { num.sqrt() }
}

/// Relative `L^2` errors (3x3 Gauss per cell; midpoint rule for `P_h u - u_h`).
/// Norms of the exact fields that vanish identically fall back to absolute errors.
pub fn compute_errors(layout: &Layout, fields: &[MixedField], exact: &Exact) -> ErrorReport {
    let rule = GaussRule::<f64>::new(3).tensor();
    let mut num = [0.0; 5];
    let mut den = [0.0; 5];
    for (mesh, field) in layout.meshes.iter().zip(fields) {
        let element = Bdm1Rect::<f64>::new(mesh.hx, mesh.hy);
        let area = mesh.cell_area();
        for j in 0..mesh.ny {
            for i in 0..mesh.nx {
                let (x0, y0) = mesh.cell_origin(i, j);
                let cell = mesh.cell_index(i, j);
                let uh = [field.u[2 * cell], field.u[2 * cell + 1]];
                let dh = div_at(mesh, &element, &field.sigma, i, j);
                for &(xi, eta, w) in &rule {
                    let (x, y) = (x0 + xi * mesh.hx, y0 + eta * mesh.hy);
                    let wa = w * area;
                    let s = (exact.sigma)(x, y);
                    let sh = stress_at(mesh, &element, &field.sigma, i, j, xi, eta);
                    for r in 0..2 {
                        for c in 0..2 {
                            num[0] += wa * (s[r][c] - sh[r][c]).powi(2);
                            den[0] += wa * s[r][c].powi(2);
                        }
                    }
                    let d = (exact.div_sigma)(x, y);
                    let u = (exact.u)(x, y);
                    for c in 0..2 {
                        num[1] += wa * (d[c] - dh[c]).powi(2);
                        den[1] += wa * d[c].powi(2);
                        num[2] += wa * (u[c] - uh[c]).powi(2);
                        den[2] += wa * u[c].powi(2);
                    }
                    let g = (exact.gamma)(x, y);
                    let gh = rotation_at(mesh, &field.gamma, i, j, xi, eta);
                    num[4] += wa * (g - gh).powi(2);
                    den[4] += wa * g * g;
                }
                let um = (exact.u)(x0 + 0.5 * mesh.hx, y0 + 0.5 * mesh.hy);
                for c in 0..2 {
                    num[3] += area * (um[c] - uh[c]).powi(2);
                    den[3] += area * um[c].powi(2);
                }
            }
        }
    }
    ErrorReport {
        sigma: ratio(num[0], den[0]),
        div: ratio(num[1], den[1]),
        u: ratio(num[2], den[2]),
        phu: ratio(num[3], den[3]),
        gamma: ratio(num[4], den[4]),
        mortar: f64::NAN,
    }
}
