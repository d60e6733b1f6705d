use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("invalid domain: {0}")]
    Domain(String),

    #[error("invalid grid: {0}")]
    Grid(String),

    #[error("fields live on different grids or have incompatible component counts: {0}")]
    Incompatible(String),

    #[error("invalid operator specification: {0}")]
    Spec(String),

    #[error("point {point:?} lies outside the domain (signed distance {distance})")]
    OutsideDomain { point: Vec<f64>, distance: f64 },

    #[error("series blew up at order {order} (last valid order {last_valid}): {reason}")]
    BlowUp {
        order: usize,
        last_valid: usize,
        reason: String,
    },

    #[error("compatibility violated at boundary sample {point:?}: |u0 - u_b(.,0)| = {mismatch:e} exceeds {tolerance:e}")]
    Compatibility {
        point: Vec<f64>,
        mismatch: f64,
        tolerance: f64,
    },

    #[error("linear solver did not converge after {iterations} iterations (relative residual {residual:e})")]
    LinearSolver { iterations: usize, residual: f64 },

    #[error("time step {dt:e} violates the stability bound {bound:e}")]
    Cfl { dt: f64, bound: f64 },

    #[error(transparent)]
    Expr(#[from] crate::expr::ExprError),

    #[error("csv: {0}")]
    Csv(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
