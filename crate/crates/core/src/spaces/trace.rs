//! Normal-stress trace spaces on subdomain interfaces and their `L^2`
//! projections to and from the mortar space.
//!
//! On every interface edge the normal trace `tau n_i` of a stress is a linear
//! vector function, stored by its values at the two edge Gauss points. The
//! trace slot of `(edge e, component c, point q)` on a side is
//! `offset + (2 e + c) * 2 + q` and maps to stress dof `4 edge + 2 c + q`
//! with the side's outward sign. Because the nodes are Gauss points, the trace
//! mass matrix is `diag(|e| / 2)`.

use nalgebra::DMatrix;

use crate::geometry::{Decomposition, Side, SubdomainMesh};
use crate::quadrature::GaussRule;
use crate::spaces::bdm::edge_shape;
use crate::spaces::mortar::MortarSpace;
use crate::spaces::stress_dof;

#[derive(Clone, Debug)]
pub struct TraceSide {
    pub interface: usize,
    pub side: Side,
    /// Outward normal relative to the global edge normal.
    pub sign: f64,
    pub edges: Vec<usize>,
    pub bounds: Vec<(f64, f64)>,
    pub edge_len: f64,
    pub offset: usize,
    /// Offset of this interface's dofs within [`SubdomainTrace::mortar_dofs`].
    pub mortar_offset: usize,
    /// Cross mass `int l_(e,c,q) phi_(k,c)` between trace slots and the
    /// interface-local mortar dofs.
    pub cross: DMatrix<f64>,
}

impl TraceSide {
    pub fn len(&self) -> usize {
        4 * self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn slot(&self, e: usize, comp: usize, q: usize) -> usize {
        self.offset + (2 * e + comp) * 2 + q
    }

    pub fn stress_dof(&self, e: usize, comp: usize, q: usize) -> usize {
        stress_dof(self.edges[e], comp, q)
    }
}

/// Trace layout of one subdomain on `Gamma_i`.
#[derive(Clone, Debug)]
pub struct SubdomainTrace {
    pub subdomain: usize,
    pub sides: Vec<TraceSide>,
    len: usize,
    /// Global mortar dofs on `Gamma_i`, grouped by interface.
    pub mortar_dofs: Vec<usize>,
}

impl SubdomainTrace {
    pub fn new(mesh: &SubdomainMesh, decomp: &Decomposition, mortar: &MortarSpace) -> Self {
        let mut sides = Vec::new();
        let mut offset = 0;
        let mut mortar_dofs = Vec::new();
        for g in decomp.interfaces_of(mesh.index) {
            let side = g.side_of(mesh.index).expect("adjacent interface");
            let edges = mesh.side_edges(side);
            let bounds: Vec<_> = (0..edges.len()).map(|k| mesh.side_edge_bounds(side, k)).collect();
            let cross = cross_mass(&bounds, mortar, g.id);
            let n = 4 * edges.len();
            let mortar_offset = mortar_dofs.len();
            sides.push(TraceSide {
                interface: g.id,
                side,
                sign: side.outward_sign(),
                edges,
                bounds,
                edge_len: mesh.side_edge_length(side),
                offset,
                mortar_offset,
                cross,
            });
            offset += n;
            let o = mortar.offset(g.id);
            mortar_dofs.extend(o..o + mortar.interface_dim(g.id));
        }
        Self { subdomain: mesh.index, sides, len: offset, mortar_dofs }
    }

    /// Number of trace coefficients on `Gamma_i`.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Restriction of a global mortar vector to the dofs on `Gamma_i`.
    pub fn gather(&self, mu: &[f64]) -> Vec<f64> {
        self.mortar_dofs.iter().map(|&d| mu[d]).collect()
    }

    /// Add a local mortar vector into a global one.
    pub fn scatter_add(&self, local: &[f64], out: &mut [f64]) {
        for (&d, v) in self.mortar_dofs.iter().zip(local) {
            out[d] += v;
        }
    }

    /// `Q_{h,i}`: `L^2` projection of a mortar function onto the trace space.
    pub fn project_mortar(&self, _mortar: &MortarSpace, mu: &[f64]) -> Vec<f64> {
        self.project_local(&self.gather(mu))
    }

    /// `Q_{h,i}` acting on mortar coefficients ordered as [`Self::mortar_dofs`].
    pub fn project_local(&self, local: &[f64]) -> Vec<f64> {
        let mut eta = vec![0.0; self.len];
        for side in &self.sides {
            let piece = &local[side.mortar_offset..side.mortar_offset + side.cross.ncols()];
            let scale = 2.0 / side.edge_len;
            for r in 0..side.len() {
                let s: f64 = side.cross.row(r).iter().zip(piece).map(|(a, b)| a * b).sum();
                eta[side.offset + r] = scale * s;
            }
        }
        eta
    }

    /// `<eta, phi_k>_{Gamma_i}` for the mortar basis functions on `Gamma_i`,
    /// ordered as [`Self::mortar_dofs`].
    pub fn local_load(&self, eta: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.mortar_dofs.len()];
        for side in &self.sides {
            let piece = &eta[side.offset..side.offset + side.len()];
            for (k, col) in side.cross.column_iter().enumerate() {
                out[side.mortar_offset + k] = col.iter().zip(piece).map(|(a, b)| a * b).sum::<f64>();
            }
        }
        out
    }

    /// `<eta, phi_k>_{Gamma_i}` for every global mortar basis function.
    pub fn mortar_load(&self, mortar: &MortarSpace, eta: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; mortar.dim()];
        self.add_mortar_load(mortar, eta, &mut out);
        out
    }

    pub fn add_mortar_load(&self, _mortar: &MortarSpace, eta: &[f64], out: &mut [f64]) {
        self.scatter_add(&self.local_load(eta), out);
    }

    /// `Q_{h,i}^T`: `L^2` projection of a trace function onto the mortar space
    /// (zero away from `Gamma_i`).
    pub fn project_to_mortar(&self, mortar: &MortarSpace, eta: &[f64]) -> Vec<f64> {
        let mut out = self.mortar_load(mortar, eta);
        for side in &self.sides {
            let off = mortar.offset(side.interface);
            let n = mortar.interface_dim(side.interface);
            mortar.solve_mass(side.interface, &mut out[off..off + n]);
        }
        out
    }

    /// Normal trace `sigma n_i` of a subdomain stress.
    pub fn trace_of(&self, sigma: &[f64]) -> Vec<f64> {
        let mut eta = vec![0.0; self.len];
        for side in &self.sides {
            for e in 0..side.edges.len() {
                for c in 0..2 {
                    for q in 0..2 {
                        eta[side.slot(e, c, q)] = side.sign * sigma[side.stress_dof(e, c, q)];
                    }
                }
            }
        }
        eta
    }

    /// Stress-block load `<eta, tau n_i>_{Gamma_i}` for every stress basis function.
    pub fn add_stress_load(&self, eta: &[f64], stress_rhs: &mut [f64]) {
        for side in &self.sides {
            let w = 0.5 * side.edge_len * side.sign;
            for e in 0..side.edges.len() {
                for c in 0..2 {
                    for q in 0..2 {
                        stress_rhs[side.stress_dof(e, c, q)] += w * eta[side.slot(e, c, q)];
                    }
                }
            }
        }
    }

    /// `<a, b>_{Gamma_i}` for two trace functions.
    pub fn inner(&self, a: &[f64], b: &[f64]) -> f64 {
        self.sides
            .iter()
            .map(|side| {
                let r = side.offset..side.offset + side.len();
                0.5 * side.edge_len * a[r.clone()].iter().zip(&b[r]).map(|(x, y)| x * y).sum::<f64>()
            })
            .sum()
    }

    /// `L^2` projection of a vector function of the tangential coordinate onto
    /// the trace space of every interface side.
    pub fn project_function(&self, f: impl Fn(usize, f64) -> [f64; 2], rule: &GaussRule<f64>) -> Vec<f64> {
        let mut eta = vec![0.0; self.len];
        for side in &self.sides {
            for (e, &(a, b)) in side.bounds.iter().enumerate() {
                for (&p, &w) in rule.points.iter().zip(&rule.weights) {
                    let v = f(side.interface, a + (b - a) * p);
                    let l = edge_shape(p);
                    for c in 0..2 {
                        for q in 0..2 {
                            // mass is diag(len/2): coefficient = 2/len * int f l_q
                            eta[side.slot(e, c, q)] += 2.0 * w * l[q] * v[c];
                        }
                    }
                }
            }
        }
        eta
    }
}

fn cross_mass(bounds: &[(f64, f64)], mortar: &MortarSpace, iface: usize) -> DMatrix<f64> {
    let grid = mortar.grid(iface);
    let mut cross = DMatrix::zeros(4 * bounds.len(), mortar.interface_dim(iface));
    let rule = GaussRule::<f64>::new(grid.degree + 2);
    let scale = grid.breakpoints.last().unwrap() - grid.breakpoints[0];
    for (e, &(ea, eb)) in bounds.iter().enumerate() {
        for s in 0..grid.num_segments() {
            let (sa, sb) = grid.segment(s);
            let (a, b) = (ea.max(sa), eb.min(sb));
            if b - a <= 1e-13 * scale {
                continue;
            }
            for (&p, &w) in rule.points.iter().zip(&rule.weights) {
                let t = a + (b - a) * p;
                let l = edge_shape((t - ea) / (eb - ea));
                for (k, phi) in mortar.segment_basis(iface, s, t) {
                    for c in 0..2 {
                        for q in 0..2 {
                            cross[((2 * e + c) * 2 + q, 2 * k + c)] += w * (b - a) * l[q] * phi;
                        }
                    }
                }
            }
        }
    }
    cross
}
