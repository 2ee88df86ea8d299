//! Normal-stress interface operator for matching grids.
//!
//! The unknown is the normal stress on `Gamma`, stored as the shared stress
//! dofs of the interface edges (the global edge normal makes them
//! single-valued). Each subdomain is solved with the interface stress
//! prescribed; the interface operator collects the residual of the stress
//! equation on the interface rows,
//!
//! ```text
//! b(lambda, mu) = sum_i (A sigma*_i(lambda), sigma*_i(mu)),
//! ```
//!
//! which is SPD as long as every subdomain touches the Dirichlet boundary.

use rayon::prelude::*;

use crate::assembly::{assemble_bar_rhs, assemble_subdomain, RhsFunctional};
use crate::geometry::{Layout, SubdomainMesh};
use crate::interface::cg::{cg_solve, CgReport};
use crate::interface::m1::{InterfaceSolution, VectorFn};
use crate::solver::{MixedField, SolveMode, SubdomainFactorization};
use crate::spaces::{stress_dof, MaterialField};
use crate::{Error, Result};

#[derive(Debug)]
pub struct NeumannSubdomain {
    pub mesh: SubdomainMesh,
    pub factorization: SubdomainFactorization,
    pub bar_rhs: RhsFunctional,
    /// Global interface index of each prescribed dof of the factorization.
    pub map: Vec<usize>,
}

impl NeumannSubdomain {
    fn gather(&self, lambda: &[f64]) -> Vec<f64> {
        self.map.iter().map(|&g| lambda[g]).collect()
    }

    fn solve(&self, rhs: &[f64], lambda: &[f64]) -> Vec<f64> {
        let data = if self.map.is_empty() { Vec::new() } else { self.gather(lambda) };
        self.factorization.solve(rhs, &data)
    }

    /// Rows of `K x - F` on the interface dofs.
    fn interface_residual(&self, x: &[f64], rhs: &[f64]) -> Vec<f64> {
        let m = &self.factorization.system().matrix;
        self.factorization.prescribed_dofs().iter().map(|&d| m.row(d).map(|(c, v)| v * x[c]).sum::<f64>() - rhs[d]).collect()
    }
}

#[derive(Debug)]
pub struct InterfaceOperatorM2 {
    layout: Layout,
    dim: usize,
    subdomains: Vec<NeumannSubdomain>,
}

impl InterfaceOperatorM2 {
    pub fn new(layout: Layout, material: &MaterialField, f: VectorFn, g_d: VectorFn) -> Result<Self> {
        let decomp = &layout.decomposition;
        if let Some(m) = layout.meshes.iter().find(|m| !m.touches_dirichlet()) {
            return Err(Error::FloatingSubdomain(m.index));
        }
        let mut offsets = Vec::with_capacity(decomp.interfaces.len());
        let mut dim = 0;
        for g in &decomp.interfaces {
            let (a, b) = g.sides();
            let (ma, mb) = (&layout.meshes[g.lo], &layout.meshes[g.hi]);
            let n = ma.side_edges(a).len();
            if n != mb.side_edges(b).len() || (ma.side_edge_length(a) - mb.side_edge_length(b)).abs() > 1e-12 {
                return Err(Error::Geometry(format!(
                    "the normal-stress formulation needs matching grids; interface {} is non-matching",
                    g.id
                )));
            }
            offsets.push(dim);
            dim += 4 * n;
        }
        let subdomains = layout
            .meshes
            .par_iter()
            .map(|mesh| {
                let system = assemble_subdomain(mesh, material)?;
                let mut global = vec![usize::MAX; system.layout.n_sigma];
                for g in decomp.interfaces_of(mesh.index) {
                    let side = g.side_of(mesh.index).expect("adjacent interface");
                    for (k, e) in mesh.side_edges(side).into_iter().enumerate() {
                        for row in 0..2 {
                            for q in 0..2 {
                                global[stress_dof(e, row, q)] = offsets[g.id] + 4 * k + 2 * row + q;
                            }
                        }
                    }
                }
                let bar_rhs = assemble_bar_rhs(mesh, f, g_d);
                let factorization = SubdomainFactorization::factorize(mesh, system, SolveMode::Neumann)?;
                let map = factorization.prescribed_dofs().iter().map(|&d| global[d]).collect();
                Ok(NeumannSubdomain { mesh: mesh.clone(), factorization, bar_rhs, map })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { layout, dim, subdomains })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn layout(&self) -> &Layout {
        &self.layout
    }

    pub fn subdomains(&self) -> &[NeumannSubdomain] {
        &self.subdomains
    }

    fn reduce(&self, locals: Vec<Vec<f64>>) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        for (sub, local) in self.subdomains.iter().zip(locals) {
            for (&g, v) in sub.map.iter().zip(local) {
                out[g] += v;
            }
        }
        out
    }

    pub fn apply(&self, lambda: &[f64]) -> Vec<f64> {
        let locals = self
            .subdomains
            .par_iter()
            .map(|sub| {
                if sub.map.is_empty() {
                    return Vec::new();
                }
                let zero = vec![0.0; sub.factorization.system().dim()];
                let x = sub.solve(&zero, lambda);
                sub.interface_residual(&x, &zero)
            })
            .collect();
        self.reduce(locals)
    }

    /// `sum_i (A sigma*_i(lambda), sigma*_i(lambda))`.
    pub fn energy(&self, lambda: &[f64]) -> f64 {
        let parts: Vec<f64> = self
            .subdomains
            .par_iter()
            .map(|sub| {
                let zero = vec![0.0; sub.factorization.system().dim()];
                let x = sub.solve(&zero, lambda);
                sub.factorization.system().stress_energy(&x, &x)
            })
            .collect();
        parts.iter().sum()
    }

    /// `h = -sum_i (K x_bar - F)` on the interface rows.
    pub fn interface_rhs(&self) -> Vec<f64> {
        let locals = self
            .subdomains
            .par_iter()
            .map(|sub| {
                let rhs = sub.bar_rhs.to_vector();
                let x = sub.solve(&rhs, &vec![0.0; self.dim]);
                sub.interface_residual(&x, &rhs).into_iter().map(|v| -v).collect()
            })
            .collect();
        self.reduce(locals)
    }

    pub fn recover(&self, lambda: &[f64]) -> Vec<MixedField> {
        self.subdomains
            .par_iter()
            .map(|sub| {
                let x = sub.solve(&sub.bar_rhs.to_vector(), lambda);
                MixedField::from_vector(sub.factorization.layout(), &x)
            })
            .collect()
    }

    pub fn max_solves(&self) -> usize {
        self.subdomains.iter().map(|s| s.factorization.solves()).max().unwrap_or(0)
    }

    pub fn reset_solve_counts(&self) {
        for s in &self.subdomains {
            s.factorization.reset_solves();
        }
    }

    pub fn solve(&self, tol: f64) -> Result<InterfaceSolution> {
        if self.dim == 0 {
            let fields = self.recover(&[]);
            let report = CgReport { iterations: 0, residual: 0.0, cond_est: 1.0, solves: self.max_solves() };
            return Ok(InterfaceSolution { lambda: Vec::new(), fields, report });
        }
        let h = self.interface_rhs();
        let x0 = vec![0.0; self.dim];
        let ax0 = self.apply(&x0);
        let r0: Vec<f64> = h.iter().zip(&ax0).map(|(a, b)| a - b).collect();
        let (lambda, mut report) = cg_solve(|p| self.apply(p), &h, x0, r0, tol, self.dim + 50)?;
        let fields = self.recover(&lambda);
        report.solves = self.max_solves();
        Ok(InterfaceSolution { lambda, fields, report })
    }
}
