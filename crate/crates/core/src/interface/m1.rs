//! Displacement-mortar interface operator.
//!
//! With star solutions `sigma*(lambda)` (zero sources, interface displacement
//! `lambda`) and bar solutions `sigma_bar` (physical data, zero interface
//! displacement), the interface problem reads `a(lambda, mu) = g(mu)` for all
//! mortar `mu`, where
//!
//! ```text
//! a(lambda, mu) =  sum_i <sigma*_i(lambda) n_i, mu>_{Gamma_i} = sum_i (A sigma*_i(lambda), sigma*_i(mu))
//! g(mu)         = -sum_i <sigma_bar_i n_i, mu>_{Gamma_i}
//! ```
//!
//! CG runs on the matrix of `a` in the iteration basis of the mortar space
//! (see [`crate::spaces::MortarBasis`]).

use rayon::prelude::*;

use crate::assembly::{assemble_bar_rhs, assemble_star_rhs, assemble_subdomain, RhsFunctional};
use crate::geometry::{Layout, SubdomainMesh};
use crate::interface::cg::{cg_solve, CgReport};
use crate::interface::msb::MultiscaleBasis;
use crate::linalg::norm;
use crate::solver::{MixedField, SolveMode, SubdomainFactorization};
use crate::spaces::{MaterialField, MortarSpace, SubdomainTrace};
use crate::Result;

pub type VectorFn<'a> = &'a (dyn Fn(f64, f64) -> [f64; 2] + Sync);

#[derive(Debug)]
pub struct Subdomain {
    pub mesh: SubdomainMesh,
    pub trace: SubdomainTrace,
    pub factorization: SubdomainFactorization,
    pub bar_rhs: RhsFunctional,
}

impl Subdomain {
    fn star_solve(&self, mortar: &MortarSpace, lambda: &[f64]) -> Vec<f64> {
        let rhs = assemble_star_rhs(&self.trace, mortar, lambda, self.factorization.layout());
        self.factorization.solve(&rhs.to_vector(), &[])
    }

    /// `<sigma n_i, phi_k>_{Gamma_i}` for the local mortar basis.
    pub fn flux_load(&self, sigma: &[f64]) -> Vec<f64> {
        self.trace.local_load(&self.trace.trace_of(sigma))
    }
}

#[derive(Debug)]
pub struct InterfaceOperatorM1 {
    layout: Layout,
    mortar: MortarSpace,
    subdomains: Vec<Subdomain>,
    msb: Option<MultiscaleBasis>,
}

impl InterfaceOperatorM1 {
    /// Assemble and factor every subdomain, and assemble the bar right-hand sides.
    pub fn new(layout: Layout, mortar: MortarSpace, material: &MaterialField, f: VectorFn, g_d: VectorFn) -> Result<Self> {
        let decomp = &layout.decomposition;
        let subdomains = layout
            .meshes
            .par_iter()
            .map(|mesh| {
                let system = assemble_subdomain(mesh, material)?;
                let trace = SubdomainTrace::new(mesh, decomp, &mortar);
                let bar_rhs = assemble_bar_rhs(mesh, f, g_d);
                let factorization = SubdomainFactorization::factorize(mesh, system, SolveMode::Dirichlet)?;
                Ok(Subdomain { mesh: mesh.clone(), trace, factorization, bar_rhs })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { layout, mortar, subdomains, msb: None })
    }

    pub fn dim(&self) -> usize {
        self.mortar.dim()
    }

    pub fn layout(&self) -> &Layout {
        &self.layout
    }

    pub fn mortar(&self) -> &MortarSpace {
        &self.mortar
    }

    pub fn subdomains(&self) -> &[Subdomain] {
        &self.subdomains
    }

    pub fn msb(&self) -> Option<&MultiscaleBasis> {
        self.msb.as_ref()
    }

    /// Precompute the multiscale stress basis; subsequent [`Self::apply`] calls use it.
    pub fn build_msb(&mut self) {
        self.msb = Some(MultiscaleBasis::build(&self.subdomains, &self.mortar));
    }

    pub fn drop_msb(&mut self) {
        self.msb = None;
    }

    fn reduce(&self, locals: Vec<Option<Vec<f64>>>) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        for (sub, local) in self.subdomains.iter().zip(locals) {
            if let Some(local) = local {
                sub.trace.scatter_add(&local, &mut out);
            }
        }
        out
    }

    /// Operator action through one star solve per subdomain.
    pub fn apply_direct(&self, lambda: &[f64]) -> Vec<f64> {
        let locals = self
            .subdomains
            .par_iter()
            .map(|sub| {
                if sub.trace.mortar_dofs.is_empty() {
                    return None;
                }
                let x = sub.star_solve(&self.mortar, lambda);
                Some(sub.flux_load(&x[..sub.factorization.layout().n_sigma]))
            })
            .collect();
        self.reduce(locals)
    }

    /// Operator action, through the multiscale basis when present.
    pub fn apply(&self, lambda: &[f64]) -> Vec<f64> {
        match &self.msb {
            Some(msb) => msb.apply(&self.subdomains, lambda),
            None => self.apply_direct(lambda),
        }
    }

    /// `sum_i (A sigma*_i(lambda), sigma*_i(lambda))` through direct star solves.
    pub fn energy(&self, lambda: &[f64]) -> f64 {
        let parts: Vec<f64> = self
            .subdomains
            .par_iter()
            .map(|sub| {
                if sub.trace.mortar_dofs.is_empty() {
                    return 0.0;
                }
                let x = sub.star_solve(&self.mortar, lambda);
                sub.factorization.system().stress_energy(&x, &x)
            })
            .collect();
        parts.iter().sum()
    }

    /// `g = -sum_i <sigma_bar_i n_i, phi_k>` (one bar solve per subdomain).
    pub fn interface_rhs(&self) -> Vec<f64> {
        let locals = self
            .subdomains
            .par_iter()
            .map(|sub| {
                let field = sub.factorization.solve_field(&sub.bar_rhs);
                if sub.trace.mortar_dofs.is_empty() {
                    return None;
                }
                Some(sub.flux_load(&field.sigma).into_iter().map(|v| -v).collect())
            })
            .collect();
        self.reduce(locals)
    }

    /// Subdomain fields `star(lambda) + bar`, one combined solve per subdomain.
    pub fn recover(&self, lambda: &[f64]) -> Vec<MixedField> {
        self.subdomains
            .par_iter()
            .map(|sub| {
                let layout = sub.factorization.layout();
                let mut rhs = sub.bar_rhs.to_vector();
                if !sub.trace.mortar_dofs.is_empty() {
                    let star = assemble_star_rhs(&sub.trace, &self.mortar, lambda, layout);
                    for (a, b) in rhs.iter_mut().zip(star.to_vector()) {
                        *a += b;
                    }
                }
                MixedField::from_vector(layout, &sub.factorization.solve(&rhs, &[]))
            })
            .collect()
    }

    /// Mortar jump functional `sum_i <sigma_i n_i, phi_k>` of subdomain fields,
    /// returned with its norm relative to the sum of the subdomain contributions.
    pub fn jump_residual(&self, fields: &[MixedField]) -> (Vec<f64>, f64) {
        let mut out = vec![0.0; self.dim()];
        let mut scale = 0.0;
        for (sub, field) in self.subdomains.iter().zip(fields) {
            let local = sub.flux_load(&field.sigma);
            scale += norm(&local);
            sub.trace.scatter_add(&local, &mut out);
        }
        let rel = if scale > 0.0 { norm(&out) / scale } else { 0.0 };
        (out, rel)
    }

    pub fn solve_counts(&self) -> Vec<usize> {
        self.subdomains.iter().map(|s| s.factorization.solves()).collect()
    }

    pub fn max_solves(&self) -> usize {
        self.solve_counts().into_iter().max().unwrap_or(0)
    }

    pub fn reset_solve_counts(&self) {
        for s in &self.subdomains {
            s.factorization.reset_solves();
        }
    }

    /// Full solve: bar solves, CG from a zero guess (initial residual through a
    /// direct application) and recovery. With no interfaces a single solve per
    /// subdomain is performed.
    pub fn solve(&self, tol: f64) -> Result<InterfaceSolution> {
        if self.dim() == 0 {
            let fields = self.recover(&[]);
            let report = CgReport { iterations: 0, residual: 0.0, cond_est: 1.0, solves: self.max_solves() };
            return Ok(InterfaceSolution { lambda: Vec::new(), fields, report });
        }
        let mortar = &self.mortar;
        let g = mortar.analyze(&self.interface_rhs());
        let x0 = vec![0.0; self.dim()];
        let ax0 = mortar.analyze(&self.apply_direct(&mortar.synthesize(&x0)));
        let r0: Vec<f64> = g.iter().zip(&ax0).map(|(a, b)| a - b).collect();
        let apply = |c: &[f64]| mortar.analyze(&self.apply(&mortar.synthesize(c)));
        let (coeffs, mut report) = cg_solve(apply, &g, x0, r0, tol, self.dim() + 50)?;
        let lambda = mortar.synthesize(&coeffs);
        let fields = self.recover(&lambda);
        report.solves = self.max_solves();
        Ok(InterfaceSolution { lambda, fields, report })
    }
}

#[derive(Clone, Debug)]
pub struct InterfaceSolution {
    pub lambda: Vec<f64>,
    pub fields: Vec<MixedField>,
    pub report: CgReport,
}
