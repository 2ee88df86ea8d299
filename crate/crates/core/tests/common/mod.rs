#![allow(dead_code)]

use elastdd::geometry::{build_checkerboard, build_mortar_grids, Continuity, Layout, MortarScaling, Pattern};
use elastdd::interface::InterfaceOperatorM1;
use elastdd::spaces::{MortarBasis, MortarSpace, SubdomainTrace};
use elastdd::verification::cases::ManufacturedCase;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()
}

pub fn mortar_for(layout: &Layout, degree: usize, scaling: MortarScaling, basis: MortarBasis) -> MortarSpace {
    let grids = build_mortar_grids(layout, scaling, degree, Continuity::Discontinuous).unwrap();
    MortarSpace::new(grids).with_basis(basis)
}

pub fn traces(layout: &Layout, mortar: &MortarSpace) -> Vec<SubdomainTrace> {
    layout.meshes.iter().map(|m| SubdomainTrace::new(m, &layout.decomposition, mortar)).collect()
}

/// Displacement-mortar operator for `case` on the 2x2 checkerboard at `level`.
pub fn operator(case: &ManufacturedCase, level: u32, degree: usize, scaling: MortarScaling) -> InterfaceOperatorM1 {
    let layout = build_checkerboard(level, Pattern::square(2)).unwrap();
    let mortar = mortar_for(&layout, degree, scaling, MortarBasis::default());
    InterfaceOperatorM1::new(layout, mortar, &case.material, &*case.f, &*case.g_d).unwrap()
}

/// Dense matrix of a linear map given by its action.
pub fn dense_of(n: usize, apply: impl Fn(&[f64]) -> Vec<f64>) -> nalgebra::DMatrix<f64> {
    let mut m = nalgebra::DMatrix::zeros(n, n);
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        let col = apply(&e);
        for i in 0..n {
            m[(i, j)] = col[i];
        }
    }
    m
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
