use std::sync::Arc;

use super::{sample_directions, SpatialOperator};
use crate::error::{Error, Result};
use crate::fields::{CoefficientSeries, Grid, SpatialField};

/// `A u = a_ij u_{x_i x_j} - a_i u_{x_i} - a u` with series coefficients.
#[derive(Debug, Clone)]
pub struct ParabolicScalarSpec {
    grid: Arc<Grid>,
    /// Row-major `n × n`.
    second: Vec<CoefficientSeries>,
    first: Vec<CoefficientSeries>,
    zeroth: CoefficientSeries,
    mu: f64,
}

impl ParabolicScalarSpec {
    pub fn new(
        grid: &Arc<Grid>,
        second: Vec<CoefficientSeries>,
        first: Vec<CoefficientSeries>,
        zeroth: CoefficientSeries,
        mu: f64,
    ) -> Result<Self> {
        let n = grid.dim();
        if second.len() != n * n {
            return Err(Error::Spec(format!("expected {} second-order coefficients, got {}", n * n, second.len())));
        }
        if first.len() != n {
            return Err(Error::Spec(format!("expected {n} first-order coefficients, got {}", first.len())));
        }
        let spec = Self { grid: grid.clone(), second, first, zeroth, mu };
        spec.validate()?;
        Ok(spec)
    }

    /// `a_ij = δ_ij`, no lower-order terms.
    pub fn laplacian(grid: &Arc<Grid>) -> Self {
        let n = grid.dim();
        let second = (0..n * n)
            .map(|k| {
                if k / n == k % n {
                    CoefficientSeries::constant(grid, 1.0)
                } else {
                    CoefficientSeries::zero(grid)
                }
            })
            .collect();
        let first = (0..n).map(|_| CoefficientSeries::zero(grid)).collect();
        Self {
            grid: grid.clone(),
            second,
            first,
            zeroth: CoefficientSeries::zero(grid),
            mu: 1.0,
        }
    }

    pub fn second(&self, i: usize, k: usize) -> &CoefficientSeries {
        &self.second[i * self.grid.dim() + k]
    }

    pub fn first(&self, i: usize) -> &CoefficientSeries {
        &self.first[i]
    }

    pub fn zeroth(&self) -> &CoefficientSeries {
        &self.zeroth
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    /// Checks `a_ij(x, 0) ξ_i ξ_j ≥ μ |ξ|²` on interior nodes for the sampled
    /// directions.
    pub fn validate(&self) -> Result<()> {
        if !(self.mu > 0.0) {
            return Err(Error::Spec(format!("ellipticity constant must be positive, got {}", self.mu)));
        }
        let n = self.grid.dim();
        let a0: Vec<Vec<f64>> = self.second.iter().map(|s| s.samples(0)).collect();
        let dirs = sample_directions(n);
        for idx in (0..self.grid.len()).filter(|&i| self.grid.mask()[i]) {
            for xi in &dirs {
                let mut q = 0.0;
                for i in 0..n {
                    for k in 0..n {
                        q += a0[i * n + k][idx] * xi[i] * xi[k];
                    }
                }
                if q < self.mu * (1.0 - 1e-12) {
                    return Err(Error::Spec(format!(
                        "ellipticity fails at {:?}: a_ij ξ_i ξ_j = {q} < μ = {} for ξ = {xi:?}",
                        self.grid.point(idx),
                        self.mu
                    )));
                }
            }
        }
        Ok(())
    }
}

impl SpatialOperator for ParabolicScalarSpec {
    fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    fn components(&self) -> usize {
        1
    }

    fn coefficient_orders(&self) -> usize {
        self.second
            .iter()
            .chain(&self.first)
            .chain(std::iter::once(&self.zeroth))
            .map(CoefficientSeries::len)
            .max()
            .unwrap_or(0)
    }

    fn apply(&self, j: usize, u: &SpatialField) -> SpatialField {
        assert_eq!(u.components(), 1, "scalar operator applied to a vector field");
        let n = self.grid.dim();
        let mut out = SpatialField::zeros(&self.grid, 1);
        for i in 0..n {
            for k in 0..n {
                if let Some(a) = self.second[i * n + k].get(j) {
                    let d = if i == k { u.diff(i, 2) } else { u.mixed_diff(i, k) };
                    out.add_assign_unchecked(&d.mul_samples(a));
                }
            }
        }
        for i in 0..n {
            if let Some(a) = self.first[i].get(j) {
                out.sub_assign_unchecked(&u.diff(i, 1).mul_samples(a));
            }
        }
        if let Some(a) = self.zeroth.get(j) {
            out.sub_assign_unchecked(&u.mul_samples(a));
        }
        out
    }
}
