//! Multiscale mortar mixed finite elements for two-dimensional linear
//! elasticity with weakly imposed stress symmetry.
//!
//! The domain is split into rectangular subdomains carrying independent
//! (possibly non-matching) tensor grids. Each subdomain is discretized with the
//! `BDM1 x Q0 x Q1` triple (stress, displacement, continuous rotation) and the
//! subdomains are glued by a coarse displacement mortar. The coupled system is
//! reduced to a symmetric positive definite interface problem and solved with
//! conjugate gradients, optionally through a precomputed multiscale stress
//! basis. A normal-stress (Neumann) interface formulation is provided for
//! matching grids without floating subdomains.
//!
//! The low-level numerical kernels (quadrature, the reference stress element,
//! mortar polynomials, the compliance law) are generic over [`Scalar`]; the
//! assembled solver path works in [`Real`].

pub mod assembly;
pub mod cli;
pub mod error;
pub mod geometry;
pub mod interface;
pub mod linalg;
pub mod quadrature;
pub mod scalar;
pub mod solver;
pub mod spaces;
pub mod verification;

pub use error::{Error, Result};
pub use scalar::Scalar;

/// Scalar type of the assembled solver path.
pub type Real = f64;

pub type GaussRule64 = quadrature::GaussRule<f64>;
pub type Bdm1Rect64 = spaces::bdm::Bdm1Rect<f64>;
pub type Lame64 = spaces::material::Lame<f64>;
pub type GaussRule32 = quadrature::GaussRule<f32>;
pub type Bdm1Rect32 = spaces::bdm::Bdm1Rect<f32>;
