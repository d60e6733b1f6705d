use serde::Serialize;

use super::RadiusEstimate;
use crate::fields::{Grid, StencilOrder, TaylorField};
use crate::oracle::ErrorRow;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridSummary {
    pub dim: usize,
    pub counts: Vec<usize>,
    pub spacing: Vec<f64>,
    pub stencil_order: u32,
    pub interior_points: usize,
}

impl GridSummary {
    pub fn of(grid: &Grid) -> Self {
        Self {
            dim: grid.dim(),
            counts: grid.counts().to_vec(),
            spacing: grid.spacing().to_vec(),
            stencil_order: match grid.stencil() {
                StencilOrder::Second => 2,
                StencilOrder::Fourth => 4,
            },
            interior_points: grid.interior_count(),
        }
    }
}

/// Outcome of one solve. The coefficient fields themselves are not
/// serialized; snapshots are written separately.
#[derive(Debug, Clone, Serialize)]
pub struct SolveReport {
    pub class: String,
    pub grid: GridSummary,
    pub order_used: usize,
    pub radius_estimate: RadiusEstimate,
    /// `‖c_k‖_∞` for each order; for Maxwell the `D` and `B` norms are
    /// combined by maximum.
    pub coeff_norms: Vec<f64>,
    pub residual_max: f64,
    pub oracle_errors: Vec<ErrorRow>,
    pub wall_ms: f64,
    pub notes: Vec<String>,
    #[serde(skip)]
    pub solution: Vec<TaylorField>,
}

impl SolveReport {
    /// Report skeleton for a single-series solution.
    pub fn new(class: &str, solution: Vec<TaylorField>) -> Self {
        let first = solution.first().expect("at least one series");
        let grid = GridSummary::of(first.grid());
        let mut norms = first.coeff_norms();
        for other in &solution[1..] {
            for (n, m) in norms.iter_mut().zip(other.coeff_norms()) {
                *n = n.max(m);
            }
        }
        let radius_estimate = super::radius::radius_from_norms(&norms);
        Self {
            class: class.to_string(),
            grid,
            order_used: first.order(),
            radius_estimate,
            coeff_norms: norms,
            residual_max: 0.0,
            oracle_errors: Vec::new(),
            wall_ms: 0.0,
            notes: Vec::new(),
            solution,
        }
    }
}
