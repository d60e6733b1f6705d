//! Tensor-product grids, sampled fields, finite-difference stencils and the
//! algebra of normalized time-Taylor series.
//!
//! Fields are stored with the first axis varying fastest. Everything outside
//! the grid's interior mask is zero (extension by zero).

mod coefficients;
mod csv;
mod spatial;
pub(crate) mod stencil;
mod taylor;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Domain;

pub use coefficients::CoefficientSeries;
pub use spatial::{FieldNorms, SpatialField};
pub use taylor::TaylorField;

/// Formal accuracy of the central difference stencils.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum StencilOrder {
    #[serde(rename = "2")]
    Second,
    #[default]
    #[serde(rename = "4")]
    Fourth,
}

impl StencilOrder {
    pub fn from_int(order: u32) -> Result<Self> {
        match order {
            2 => Ok(StencilOrder::Second),
            4 => Ok(StencilOrder::Fourth),
            other => Err(Error::Grid(format!("stencil order must be 2 or 4, got {other}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    dim: usize,
    counts: [usize; 3],
    origin: [f64; 3],
    spacing: [f64; 3],
    strides: [usize; 3],
    len: usize,
    mask: Vec<bool>,
    stencil: StencilOrder,
    domain: Domain,
}

impl Grid {
    /// Grid with nodes `origin_i + k h_i`, `k < counts_i`, masked by `domain`.
    pub fn new(
        domain: &Domain,
        origin: &[f64],
        spacing: &[f64],
        counts: &[usize],
        stencil: StencilOrder,
    ) -> Result<Arc<Grid>> {
        domain.validate()?;
        let dim = domain.dim();
        for len in [origin.len(), spacing.len(), counts.len()] {
            if len != dim {
                return Err(Error::Dimension { expected: dim, got: len });
            }
        }
        let mut g = Grid {
            dim,
            counts: [1; 3],
            origin: [0.0; 3],
            spacing: [1.0; 3],
            strides: [0; 3],
            len: 1,
            mask: Vec::new(),
            stencil,
            domain: domain.clone(),
        };
        for i in 0..dim {
            if counts[i] < 5 {
                return Err(Error::Grid(format!(
                    "axis {i} needs at least 5 points for the stencils, got {}",
                    counts[i]
                )));
            }
            if !(spacing[i].is_finite() && spacing[i] > 0.0) {
                return Err(Error::Grid(format!("spacing on axis {i} must be positive, got {}", spacing[i])));
            }
            if !origin[i].is_finite() {
                return Err(Error::Grid(format!("origin on axis {i} is not finite")));
            }
            g.counts[i] = counts[i];
            g.origin[i] = origin[i];
            g.spacing[i] = spacing[i];
        }
        let mut stride = 1;
        for i in 0..3 {
            g.strides[i] = stride;
            stride *= g.counts[i];
        }
        g.len = stride;
        g.mask = domain.interior_mask(&g);
        Ok(Arc::new(g))
    }

    /// Endpoint-inclusive uniform grid on `[lower, upper]` with fourth-order stencils.
    pub fn uniform(domain: &Domain, lower: &[f64], upper: &[f64], counts: &[usize]) -> Result<Arc<Grid>> {
        Self::uniform_with_stencil(domain, lower, upper, counts, StencilOrder::Fourth)
    }

    pub fn uniform_with_stencil(
        domain: &Domain,
        lower: &[f64],
        upper: &[f64],
        counts: &[usize],
        stencil: StencilOrder,
    ) -> Result<Arc<Grid>> {
        if lower.len() != counts.len() || upper.len() != counts.len() {
            return Err(Error::Dimension { expected: counts.len(), got: lower.len().min(upper.len()) });
        }
        let mut spacing = Vec::with_capacity(counts.len());
        for i in 0..counts.len() {
            if !(lower[i] < upper[i]) {
                return Err(Error::Grid(format!("grid bounds on axis {i} must be strictly ordered")));
            }
            spacing.push((upper[i] - lower[i]) / (counts[i].max(2) - 1) as f64);
        }
        Self::new(domain, lower, &spacing, counts, stencil)
    }

    /// Uniform grid spanning the domain's bounding box.
    pub fn covering(domain: &Domain, counts: &[usize], stencil: StencilOrder) -> Result<Arc<Grid>> {
        domain.validate()?;
        let (lo, hi) = domain.bounding_box();
        Self::uniform_with_stencil(domain, &lo, &hi, counts, stencil)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts[..self.dim]
    }

    pub fn spacing(&self) -> &[f64] {
        &self.spacing[..self.dim]
    }

    pub fn origin(&self) -> &[f64] {
        &self.origin[..self.dim]
    }

    pub fn max_spacing(&self) -> f64 {
        self.spacing().iter().cloned().fold(0.0, f64::max)
    }

    pub fn min_spacing(&self) -> f64 {
        self.spacing().iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing().iter().product()
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn interior_count(&self) -> usize {
        self.mask.iter().filter(|&&m| m).count()
    }

    pub fn stencil(&self) -> StencilOrder {
        self.stencil
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub(crate) fn stride(&self, axis: usize) -> usize {
        self.strides[axis]
    }

    pub(crate) fn count(&self, axis: usize) -> usize {
        self.counts[axis]
    }

    /// Index along `axis` of flat index `idx`.
    #[inline]
    pub fn axis_index(&self, idx: usize, axis: usize) -> usize {
        (idx / self.strides[axis]) % self.counts[axis]
    }

    pub fn coord(&self, idx: usize, axis: usize) -> f64 {
        self.origin[axis] + self.axis_index(idx, axis) as f64 * self.spacing[axis]
    }

    pub fn point(&self, idx: usize) -> Vec<f64> {
        (0..self.dim).map(|a| self.coord(idx, a)).collect()
    }

    pub fn index(&self, multi: &[usize]) -> usize {
        multi.iter().enumerate().map(|(a, &i)| i * self.strides[a]).sum()
    }

    /// Flat index of the node closest to `x`, clamped to the grid.
    pub fn nearest_index(&self, x: &[f64]) -> usize {
        let multi: Vec<usize> = (0..self.dim)
            .map(|a| {
                let k = ((x[a] - self.origin[a]) / self.spacing[a]).round();
                k.clamp(0.0, (self.counts[a] - 1) as f64) as usize
            })
            .collect();
        self.index(&multi)
    }

    pub fn same_as(&self, other: &Grid) -> bool {
        std::ptr::eq(self, other) || self == other
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_layout() {
        let d = Domain::unit_box(2);
        let g = Grid::uniform(&d, &[0.0, 0.0], &[1.0, 2.0], &[11, 21]).unwrap();
        assert_eq!(g.len(), 231);
        assert_eq!(g.point(12), vec![0.1, 0.1]);
        assert_eq!(g.index(&[1, 1]), 12);
        assert_eq!(g.nearest_index(&[0.52, 0.04]), 5);
        assert!(Grid::uniform(&d, &[0.0, 0.0], &[1.0, 1.0], &[4, 11]).is_err());
        assert!(Grid::uniform(&d, &[0.0], &[1.0], &[11]).is_err());
    }
}
