//! Multiscale stress basis: the interface operator images of every mortar
//! basis function, one subdomain at a time.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::interface::m1::Subdomain;
use crate::spaces::MortarSpace;

#[derive(Clone, Debug)]
pub struct MultiscaleBasis {
    /// Per subdomain, column `k` holds `<sigma*(phi_k) n_i, phi_l>` over the
    /// local mortar dofs `l`.
    pub blocks: Vec<DMatrix<f64>>,
    /// Solves spent per subdomain during construction.
    pub construction_solves: Vec<usize>,
}

impl MultiscaleBasis {
    /// For each local mortar basis function: project onto the trace space,
    /// solve the star problem, project the normal stress back.
    pub fn build(subdomains: &[Subdomain], _mortar: &MortarSpace) -> Self {
        let built: Vec<(DMatrix<f64>, usize)> = subdomains
            .par_iter()
            .map(|sub| {
                let n = sub.trace.mortar_dofs.len();
                let layout = *sub.factorization.layout();
                let rhs: Vec<Vec<f64>> = (0..n)
                    .map(|k| {
                        let mut unit = vec![0.0; n];
                        unit[k] = 1.0;
                        let eta = sub.trace.project_local(&unit);
                        let mut b = vec![0.0; layout.total()];
                        sub.trace.add_stress_load(&eta, &mut b[..layout.n_sigma]);
                        b
                    })
                    .collect();
                let sols = sub.factorization.solve_many(&rhs, &[]);
                let mut block = DMatrix::zeros(n, n);
                for (k, x) in sols.iter().enumerate() {
                    let psi = sub.flux_load(&x[..layout.n_sigma]);
                    block.column_mut(k).copy_from_slice(&psi);
                }
                (block, n)
            })
            .collect();
        let (blocks, construction_solves) = built.into_iter().unzip();
        Self { blocks, construction_solves }
    }

    pub fn apply(&self, subdomains: &[Subdomain], lambda: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; lambda.len()];
        for (sub, block) in subdomains.iter().zip(&self.blocks) {
            if block.nrows() == 0 {
                continue;
            }
            let local = DVector::from_vec(sub.trace.gather(lambda));
            let y = block * local;
            sub.trace.scatter_add(y.as_slice(), &mut out);
        }
        out
    }

    /// `N_{H,i}` per subdomain.
    pub fn dims(&self) -> Vec<usize> {
        self.blocks.iter().map(|b| b.nrows()).collect()
    }
}
