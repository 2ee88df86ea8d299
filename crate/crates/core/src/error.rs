use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid decomposition: {0}")]
    Geometry(String),

    #[error("invalid mortar grid: {0}")]
    Mortar(String),

    #[error("invalid material at ({x}, {y}): lambda = {lambda}, mu = {mu}")]
    Material { x: f64, y: f64, lambda: f64, mu: f64 },

    #[error(
        "subdomain {0} is floating (no Dirichlet boundary): Neumann subdomain solves are singular \
         and the FETI coarse space needed to handle them is unsupported"
    )]
    FloatingSubdomain(usize),

    #[error("factorization of subdomain {index} failed: {reason}")]
    Factorization { index: usize, reason: String },

    #[error("conjugate gradients did not converge in {iterations} iterations (relative residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("mortar solvability condition violated on interfaces {0:?}")]
    Solvability(Vec<usize>),

    #[error("invalid porosity raster: {0}")]
    Raster(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code: 1 for configuration/input errors (including floating
    /// subdomains under the normal-stress method and over-rich mortars), 2 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Factorization { .. } | Error::NoConvergence { .. } => 2,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
