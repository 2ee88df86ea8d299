//! Test problems, error measurement and refinement studies.

pub mod cases;
pub mod errors;
pub mod raster;
pub mod run;
pub mod study;

pub use cases::{make_case, CaseId, ManufacturedCase};
pub use errors::{compute_errors, ErrorReport};
pub use raster::PorosityRaster;
pub use run::{run, GridKind, LevelResult, Method, RunSpec};
pub use study::{convergence_study, fit_exponent, rates, to_csv, CSV_HEADER};
