use std::sync::Arc;

use super::{Grid, TaylorField};
use crate::error::Result;
use crate::expr::Expr;

/// Time-Taylor series of a PDE coefficient, sampled at every grid node
/// (including nodes outside the mask, so divergence-form terms can read the
/// coefficient on both sides of the boundary). Entry `j` holds the normalized
/// coefficient of `t^j`; missing orders are zero.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientSeries {
    grid: Arc<Grid>,
    orders: Vec<Vec<f64>>,
    nonzero: Vec<bool>,
}

impl CoefficientSeries {
    pub fn zero(grid: &Arc<Grid>) -> Self {
        Self::from_orders(grid, Vec::new())
    }

    pub fn constant(grid: &Arc<Grid>, v: f64) -> Self {
        Self::from_orders(grid, vec![vec![v; grid.len()]])
    }

    pub fn from_orders(grid: &Arc<Grid>, orders: Vec<Vec<f64>>) -> Self {
        for o in &orders {
            assert_eq!(o.len(), grid.len(), "coefficient samples must cover the grid");
        }
        let nonzero = orders.iter().map(|o| o.iter().any(|&v| v != 0.0)).collect();
        Self { grid: grid.clone(), orders, nonzero }
    }

    /// `orders` t-coefficients from `f(x, j)`.
    pub fn from_fn(grid: &Arc<Grid>, orders: usize, f: impl Fn(&[f64], usize) -> f64) -> Self {
        let data = (0..orders)
            .map(|j| (0..grid.len()).map(|idx| f(&grid.point(idx), j)).collect())
            .collect();
        Self::from_orders(grid, data)
    }

    /// One spatial expression per t-order.
    pub fn from_exprs(grid: &Arc<Grid>, exprs: &[Expr]) -> Result<Self> {
        for e in exprs {
            e.check_vars(grid.dim(), false)?;
        }
        Ok(Self::from_fn(grid, exprs.len(), |x, j| exprs[j].eval_at(x, 0.0)))
    }

    /// Uses the (masked) samples of the first component of a series.
    pub fn from_taylor(series: &TaylorField) -> Self {
        let orders = series.coeffs().iter().map(|c| c.component(0).to_vec()).collect();
        Self::from_orders(series.grid(), orders)
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    /// Number of stored t-orders.
    pub fn len(&self) -> usize {
        self.orders.len()
    }

    pub fn is_empty(&self) -> bool {
        !self.nonzero.iter().any(|&b| b)
    }

    /// Samples of order `j`, or `None` when that order is absent or zero.
    pub fn get(&self, j: usize) -> Option<&[f64]> {
        match self.nonzero.get(j) {
            Some(true) => Some(&self.orders[j]),
            _ => None,
        }
    }

    /// Samples of order `j` with absent orders as zeros.
    pub fn samples(&self, j: usize) -> Vec<f64> {
        self.orders.get(j).cloned().unwrap_or_else(|| vec![0.0; self.grid.len()])
    }

    /// Pointwise value of the coefficient at time `t`.
    pub fn eval(&self, t: f64) -> Vec<f64> {
        let mut acc = vec![0.0; self.grid.len()];
        for o in self.orders.iter().rev() {
            for (a, v) in acc.iter_mut().zip(o) {
                *a = *a * t + v;
            }
        }
        acc
    }

    pub fn max_abs(&self, j: usize) -> f64 {
        self.get(j).map_or(0.0, |v| v.iter().fold(0.0, |m, x| m.max(x.abs())))
    }

    /// Same coefficient collapsed to its value at time `t` (a single order).
    pub fn frozen_at(&self, t: f64) -> Self {
        Self::from_orders(&self.grid, vec![self.eval(t)])
    }
}
