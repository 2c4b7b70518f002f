//! Steady 2D compressible Euler simulator on unstructured triangulations with
//! explicit discontinuity tracking.
//!
//! Shocks and contact discontinuities are carried by independent polyline
//! front meshes laid over a fixed background triangulation. Each iteration the
//! cells crossed by a front are removed from the computation, the resulting
//! cavity boundaries act as surrogate discontinuities, and flow data is moved
//! between grid and front by Taylor extrapolation combined with the
//! Rankine-Hugoniot jump relations. The same solver runs in plain
//! shock-capturing mode when no fronts are supplied.

pub mod cavity;
// pub mod config;
// pub mod driver;
pub mod front;
pub mod gas;
pub mod geom;
pub mod interaction;
pub mod jump;
pub mod mesh;
pub mod motion;
// pub mod output;
pub mod recon;
pub mod solver;
pub mod transfer;
pub mod verify;

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("non-physical state: rho = {rho:.6e}, p = {p:.6e}")]
    NonPhysicalState { rho: f64, p: f64 },
    #[error("invalid gas model: gamma = {gamma} (must be > 1)")]
    InvalidGasModel { gamma: f64 },
    #[error("frame not orthonormal: |n| = {n_norm:.3e}, |tau| = {tau_norm:.3e}, n.tau = {n_dot_tau:.3e}")]
    BadFrame {
        n_norm: f64,
        tau_norm: f64,
        n_dot_tau: f64,
    },
    #[error("mesh error: {0}")]
    Mesh(String),
    #[error("msh parse error at line {line}: {msg}")]
    MshFormat { line: usize, msg: String },
    #[error("front error: {0}")]
    Front(String),
    #[error("cavity error: {0}")]
    Cavity(String),
    #[error("gradient recovery error: {0}")]
    Recon(String),
    #[error("transfer error: {0}")]
    Transfer(String),
    #[error("newton solve failed after {iters} iterations (residual {residual:.3e}): {context}")]
    NewtonFailed {
        iters: usize,
        residual: f64,
        context: String,
    },
    #[error("no admissible solution: {0}")]
    NoSolution(String),
    #[error("solver produced non-physical state at node {node}: rho = {rho:.6e}, p = {p:.6e}")]
    SolverBlowup { node: usize, rho: f64, p: f64 },
    #[error("interaction error: {0}")]
    Interaction(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("at iteration {iter}: {source}")]
    AtIteration {
        iter: usize,
        #[source]
        source: Box<Error>,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Wrap with the driver iteration the failure occurred in.
    pub fn at_iteration(self, iter: usize) -> Self {
        Error::AtIteration {
            iter,
            source: Box::new(self),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
