//! Interface problems and their iterative solution.

pub mod cg;
pub mod m1;
pub mod m2;
pub mod msb;

pub use cg::{cg_solve, lanczos_condition, CgReport, CG_TOLERANCE};
pub use m1::{InterfaceOperatorM1, InterfaceSolution, Subdomain};
pub use m2::InterfaceOperatorM2;
pub use msb::MultiscaleBasis;
