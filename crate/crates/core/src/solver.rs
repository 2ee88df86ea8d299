//! Factorized subdomain solves.
//!
//! Each subdomain system is factored once per boundary-condition mode with a
//! sparse LU on the free unknowns and reused for every right-hand side.

use std::sync::atomic::{AtomicUsize, Ordering};

use faer::prelude::*;
use faer::sparse::linalg::solvers::Lu;
use faer::sparse::{SparseColMat, Triplet};
use faer::Mat;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::assembly::{RhsFunctional, SaddleSystem};
use crate::geometry::SubdomainMesh;
use crate::linalg::norm;
use crate::spaces::{DofLayout, MortarSpace, SubdomainTrace};
use crate::{Error, Result};

/// Residual bound of the random probe run after factorization.
pub const PROBE_TOLERANCE: f64 = 1e-11;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolveMode {
    /// Interface conditions are natural (displacement data enters the right-hand side).
    Dirichlet,
    /// Interface normal stresses are prescribed and eliminated.
    Neumann,
}

/// Stress, displacement and rotation coefficients of one subdomain.
#[derive(Clone, Debug, PartialEq)]
pub struct MixedField {
    pub sigma: Vec<f64>,
    pub u: Vec<f64>,
    pub gamma: Vec<f64>,
}

impl MixedField {
    pub fn from_vector(layout: &DofLayout, x: &[f64]) -> Self {
        Self {
            sigma: x[..layout.n_sigma].to_vec(),
            u: x[layout.u_offset()..layout.gamma_offset()].to_vec(),
            gamma: x[layout.gamma_offset()..].to_vec(),
        }
    }

    pub fn zeros(layout: &DofLayout) -> Self {
        Self { sigma: vec![0.0; layout.n_sigma], u: vec![0.0; layout.n_u], gamma: vec![0.0; layout.n_gamma] }
    }

    pub fn to_vector(&self) -> Vec<f64> {
        let mut v = self.sigma.clone();
        v.extend_from_slice(&self.u);
        v.extend_from_slice(&self.gamma);
        v
    }

    pub fn add(&mut self, other: &MixedField) {
        for (a, b) in self.sigma.iter_mut().zip(&other.sigma) {
            *a += b;
        }
        for (a, b) in self.u.iter_mut().zip(&other.u) {
            *a += b;
        }
        for (a, b) in self.gamma.iter_mut().zip(&other.gamma) {
            *a += b;
        }
    }
}

pub struct SubdomainFactorization {
    index: usize,
    mode: SolveMode,
    system: SaddleSystem,
    /// Unknowns kept in the factored system, increasing.
    free: Vec<usize>,
    /// Eliminated unknowns carrying prescribed values (interface stress dofs in Neumann mode).
    prescribed: Vec<usize>,
    lu: Lu<usize, f64>,
    solves: AtomicUsize,
}

impl std::fmt::Debug for SubdomainFactorization {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SubdomainFactorization")
            .field("index", &self.index)
            .field("mode", &self.mode)
            .field("free", &self.free.len())
            .field("solves", &self.solves())
            .finish_non_exhaustive()
    }
}

impl SubdomainFactorization {
    pub fn factorize(mesh: &SubdomainMesh, system: SaddleSystem, mode: SolveMode) -> Result<Self> {
        let index = mesh.index;
        if mode == SolveMode::Neumann && !mesh.touches_dirichlet() {
            return Err(Error::FloatingSubdomain(index));
        }
        let n = system.dim();
        let mut fixed = vec![false; n];
        for &d in &system.neumann_dofs {
            fixed[d] = true;
        }
        let prescribed: Vec<usize> = match mode {
            SolveMode::Dirichlet => Vec::new(),
            SolveMode::Neumann => system.interface_dofs.iter().copied().filter(|&d| !fixed[d]).collect(),
        };
        for &d in &prescribed {
            fixed[d] = true;
        }
        let free: Vec<usize> = (0..n).filter(|&d| !fixed[d]).collect();
        let mut reduced = vec![usize::MAX; n];
        for (k, &d) in free.iter().enumerate() {
            reduced[d] = k;
        }
        let mut trip = Vec::with_capacity(system.matrix.nnz());
        for (k, &d) in free.iter().enumerate() {
            for (c, v) in system.matrix.row(d) {
                if reduced[c] != usize::MAX {
                    trip.push(Triplet::new(k, reduced[c], v));
                }
            }
        }
        let factor_err = |reason: String| Error::Factorization { index, reason };
        let m = SparseColMat::<usize, f64>::try_new_from_triplets(free.len(), free.len(), &trip)
            .map_err(|e| factor_err(format!("{e:?}")))?;
        let lu = m.sp_lu().map_err(|e| factor_err(format!("{e:?}")))?;
        let f = Self { index, mode, system, free, prescribed, lu, solves: AtomicUsize::new(0) };
        f.probe()?;
        Ok(f)
    }

    fn probe(&self) -> Result<()> {
        let n = self.free.len();
        if n == 0 {
            return Ok(());
        }
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed ^ self.index as u64);
        let b: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let x = self.solve_reduced(&[b.clone()]).pop().unwrap();
        let mut full = vec![0.0; self.system.dim()];
        for (k, &d) in self.free.iter().enumerate() {
            full[d] = x[k];
        }
        let mx = self.system.matrix.mul_vec(&full);
        let res: Vec<f64> = self.free.iter().zip(&b).map(|(&d, bi)| mx[d] - bi).collect();
        let rel = norm(&res) / norm(&b);
        if rel.is_finite() && rel <= PROBE_TOLERANCE {
            Ok(())
        } else {
            let reason = if self.mode == SolveMode::Neumann {
                format!("probe residual {rel:e}; the Neumann problem is singular (floating subdomain?)")
            } else {
                format!("probe residual {rel:e}")
            };
            Err(Error::Factorization { index: self.index, reason })
        }
    }

    fn solve_reduced(&self, rhs: &[Vec<f64>]) -> Vec<Vec<f64>> {
        let n = self.free.len();
        let mut b = Mat::<f64>::from_fn(n, rhs.len(), |i, j| rhs[j][i]);
        self.lu.solve_in_place(b.as_mut());
        (0..rhs.len()).map(|j| (0..n).map(|i| b[(i, j)]).collect()).collect()
    }

    pub fn index(&self) -> usize {
        self.index
    }

    pub fn mode(&self) -> SolveMode {
        self.mode
    }

    pub fn system(&self) -> &SaddleSystem {
        &self.system
    }

    pub fn layout(&self) -> &DofLayout {
        &self.system.layout
    }

    pub fn prescribed_dofs(&self) -> &[usize] {
        &self.prescribed
    }

    /// Number of solves performed so far.
    pub fn solves(&self) -> usize {
        self.solves.load(Ordering::Relaxed)
    }

    pub fn reset_solves(&self) {
        self.solves.store(0, Ordering::Relaxed);
    }

    /// Solve with full-length right-hand sides; `prescribed[k]` holds the values
    /// of [`Self::prescribed_dofs`] for each right-hand side (empty in Dirichlet mode).
    /// Counts one solve per right-hand side.
    pub fn solve_many(&self, rhs: &[Vec<f64>], prescribed: &[Vec<f64>]) -> Vec<Vec<f64>> {
        if rhs.is_empty() {
            return Vec::new();
        }
        self.solves.fetch_add(rhs.len(), Ordering::Relaxed);
        let n = self.system.dim();
        let reduced: Vec<Vec<f64>> = rhs
            .iter()
            .enumerate()
            .map(|(j, b)| {
                let mut r: Vec<f64> = self.free.iter().map(|&d| b[d]).collect();
                if let Some(p) = prescribed.get(j).filter(|p| p.iter().any(|&v| v != 0.0)) {
                    let mut xp = vec![0.0; n];
                    for (&d, &v) in self.prescribed.iter().zip(p) {
                        xp[d] = v;
                    }
                    let coupling = self.system.matrix.mul_vec(&xp);
                    for (k, &d) in self.free.iter().enumerate() {
                        r[k] -= coupling[d];
                    }
                }
                r
            })
            .collect();
        let sols = self.solve_reduced(&reduced);
        sols.into_iter()
            .enumerate()
            .map(|(j, s)| {
                let mut x = vec![0.0; n];
                for (k, &d) in self.free.iter().enumerate() {
                    x[d] = s[k];
                }
                if let Some(p) = prescribed.get(j) {
                    for (&d, &v) in self.prescribed.iter().zip(p) {
                        x[d] = v;
                    }
                }
                x
            })
            .collect()
    }

    pub fn solve(&self, rhs: &[f64], prescribed: &[f64]) -> Vec<f64> {
        let p = if prescribed.is_empty() { Vec::new() } else { vec![prescribed.to_vec()] };
        self.solve_many(&[rhs.to_vec()], &p).pop().unwrap()
    }

    pub fn solve_field(&self, rhs: &RhsFunctional) -> MixedField {
        let x = self.solve(&rhs.to_vector(), &[]);
        MixedField::from_vector(self.layout(), &x)
    }
}

/// Star problem: zero sources, interface displacement `mu`.
pub fn solve_star(f: &SubdomainFactorization, trace: &SubdomainTrace, mortar: &MortarSpace, mu: &[f64]) -> MixedField {
    let rhs = crate::assembly::assemble_star_rhs(trace, mortar, mu, f.layout());
    f.solve_field(&rhs)
}

/// Bar problem: physical sources, zero interface data.
pub fn solve_bar(f: &SubdomainFactorization, rhs: &RhsFunctional) -> MixedField {
    f.solve_field(rhs)
}

/// Neumann star problem: prescribed interface stress dofs, zero sources.
pub fn solve_neumann_star(f: &SubdomainFactorization, data: &[f64]) -> MixedField {
    let n = f.system().dim();
    let x = f.solve(&vec![0.0; n], data);
    MixedField::from_vector(f.layout(), &x)
}
