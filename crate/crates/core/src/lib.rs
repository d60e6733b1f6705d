//! Time-Taylor series construction of solutions to initial-boundary value
//! problems.
//!
//! A solution is represented as `u(x, t) = Σ c_k(x) t^k` where the spatial
//! coefficients `c_k = (1/k!) ∂^k u/∂t^k (·, 0)` are generated order by order
//! from the equation itself. The crate covers linear and weakly nonlinear
//! parabolic equations, divergence-form parabolic and hyperbolic systems, a
//! damped orthotropic plate and Maxwell's equations, all discretized in space
//! by finite differences on tensor-product grids with zero extension outside
//! the domain.
//!
//! Module map:
//!
//! - [`geometry`]: domains, signed distance and boundary projection.
//! - [`fields`]: grids, sampled fields, stencils and Taylor series algebra.
//! - [`operators`]: discrete spatial operators for every problem class.
//! - [`recurrence`]: coefficient generation, manufactured forcing, residuals.
//! - [`dataprep`]: bump functions, boundary lifts and homogenization.
//! - [`oracle`]: classical time steppers used to cross-check the series.
//! - [`expr`]: the small arithmetic language used for coefficients and data.

pub mod dataprep;
pub mod error;
pub mod expr;
pub mod fields;
pub mod geometry;
mod linalg;
pub mod operators;
pub mod oracle;
pub mod recurrence;

pub use error::{Error, Result};
pub use expr::Expr;
pub use fields::{FieldNorms, Grid, SpatialField, StencilOrder, TaylorField};
pub use geometry::{Domain, HalfSpace};
pub use operators::{
    DivFormSystemSpec, MaxwellSpec, NonlinearTermsSpec, ParabolicScalarSpec, PlateSpec,
};
pub use recurrence::{RadiusEstimate, SolveReport, TruncationPolicy};
