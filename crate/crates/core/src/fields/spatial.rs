use std::sync::Arc;

use serde::Serialize;

use super::stencil;
use super::Grid;
use crate::error::{Error, Result};

/// `N`-component function sampled on a grid, zero outside the mask.
/// Storage is component-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SpatialField {
    grid: Arc<Grid>,
    ncomp: usize,
    data: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Default)]
pub struct FieldNorms {
    pub linf: f64,
    pub l2: f64,
    pub h1: f64,
}

impl SpatialField {
    pub fn zeros(grid: &Arc<Grid>, ncomp: usize) -> Self {
        assert!(ncomp >= 1, "a field needs at least one component");
        Self {
            grid: grid.clone(),
            ncomp,
            data: vec![0.0; ncomp * grid.len()],
        }
    }

    /// Wraps raw component-major values, zeroing everything outside the mask.
    pub fn from_values(grid: &Arc<Grid>, ncomp: usize, mut data: Vec<f64>) -> Result<Self> {
        if ncomp == 0 || data.len() != ncomp * grid.len() {
            return Err(Error::Incompatible(format!(
                "expected {} values for {ncomp} component(s), got {}",
                ncomp * grid.len(),
                data.len()
            )));
        }
        for c in 0..ncomp {
            stencil::apply_mask(grid, &mut data[c * grid.len()..(c + 1) * grid.len()]);
        }
        Ok(Self { grid: grid.clone(), ncomp, data })
    }

    /// Keeps values outside the mask. The difference kernels read them as
    /// boundary values; nothing else should hold such a field.
    pub(crate) fn with_exterior(grid: &Arc<Grid>, ncomp: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), ncomp * grid.len());
        Self { grid: grid.clone(), ncomp, data }
    }

    /// Copy with everything outside the mask zeroed.
    pub(crate) fn masked(&self) -> Self {
        let mut data = self.data.clone();
        let n = self.grid.len();
        for c in 0..self.ncomp {
            stencil::apply_mask(&self.grid, &mut data[c * n..(c + 1) * n]);
        }
        Self { grid: self.grid.clone(), ncomp: self.ncomp, data }
    }

    /// Samples `f(x, component)` at interior nodes.
    pub fn from_fn(grid: &Arc<Grid>, ncomp: usize, f: impl Fn(&[f64], usize) -> f64) -> Self {
        let n = grid.len();
        let mut data = vec![0.0; ncomp * n];
        for idx in 0..n {
            if grid.mask()[idx] {
                let x = grid.point(idx);
                for c in 0..ncomp {
                    data[c * n + idx] = f(&x, c);
                }
            }
        }
        Self { grid: grid.clone(), ncomp, data }
    }

    pub fn scalar(grid: &Arc<Grid>, f: impl Fn(&[f64]) -> f64) -> Self {
        Self::from_fn(grid, 1, |x, _| f(x))
    }

    /// Stacks scalar fields into one multi-component field.
    pub fn stack(parts: &[SpatialField]) -> Result<Self> {
        let first = parts.first().ok_or_else(|| Error::Incompatible("nothing to stack".into()))?;
        let mut data = Vec::new();
        for p in parts {
            first.check_grid(p)?;
            data.extend_from_slice(&p.data);
        }
        let ncomp = parts.iter().map(|p| p.ncomp).sum();
        Ok(Self { grid: first.grid.clone(), ncomp, data })
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn components(&self) -> usize {
        self.ncomp
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    pub fn component(&self, c: usize) -> &[f64] {
        let n = self.grid.len();
        &self.data[c * n..(c + 1) * n]
    }

    pub fn component_field(&self, c: usize) -> SpatialField {
        Self {
            grid: self.grid.clone(),
            ncomp: 1,
            data: self.component(c).to_vec(),
        }
    }

    pub fn value(&self, idx: usize, c: usize) -> f64 {
        self.data[c * self.grid.len() + idx]
    }

    pub(crate) fn check_grid(&self, other: &SpatialField) -> Result<()> {
        if !self.grid.same_as(&other.grid) {
            return Err(Error::Incompatible("fields are sampled on different grids".into()));
        }
        Ok(())
    }

    fn check_shape(&self, other: &SpatialField) -> Result<()> {
        self.check_grid(other)?;
        if self.ncomp != other.ncomp {
            return Err(Error::Incompatible(format!(
                "component counts differ ({} vs {})",
                self.ncomp, other.ncomp
            )));
        }
        Ok(())
    }

    fn map_components(&self, f: impl Fn(&[f64]) -> Vec<f64>) -> SpatialField {
        let mut data = Vec::with_capacity(self.data.len());
        for c in 0..self.ncomp {
            data.extend(f(self.component(c)));
        }
        Self { grid: self.grid.clone(), ncomp: self.ncomp, data }
    }

    /// Central derivative of order 1 or 2 along `axis`.
    pub fn diff(&self, axis: usize, order: u8) -> SpatialField {
        assert!(axis < self.grid.dim(), "axis {axis} out of range");
        assert!(order == 1 || order == 2, "derivative order must be 1 or 2");
        self.map_components(|v| stencil::central(&self.grid, v, axis, order))
    }

    /// `∂²/∂x_i∂x_j` for `i ≠ j`, composed in a fixed axis order so that the
    /// result is independent of argument order.
    pub fn mixed_diff(&self, i: usize, j: usize) -> SpatialField {
        assert!(i != j, "mixed_diff needs distinct axes");
        let (a, b) = (i.min(j), i.max(j));
        self.diff(a, 1).diff(b, 1)
    }

    pub fn scale(&self, s: f64) -> SpatialField {
        Self {
            grid: self.grid.clone(),
            ncomp: self.ncomp,
            data: self.data.iter().map(|v| v * s).collect(),
        }
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> SpatialField {
        let mut out = Self {
            grid: self.grid.clone(),
            ncomp: self.ncomp,
            data: self.data.iter().map(|&v| f(v)).collect(),
        };
        out.remask();
        out
    }

    pub fn add(&self, other: &SpatialField) -> Result<SpatialField> {
        self.check_shape(other)?;
        Ok(self.zip_with(other, |a, b| a + b))
    }

    pub fn sub(&self, other: &SpatialField) -> Result<SpatialField> {
        self.check_shape(other)?;
        Ok(self.zip_with(other, |a, b| a - b))
    }

    pub(crate) fn zip_with(&self, other: &SpatialField, f: impl Fn(f64, f64) -> f64) -> SpatialField {
        Self {
            grid: self.grid.clone(),
            ncomp: self.ncomp,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect(),
        }
    }

    /// `self += a · other`.
    pub fn axpy(&mut self, a: f64, other: &SpatialField) -> Result<()> {
        self.check_shape(other)?;
        for (x, y) in self.data.iter_mut().zip(&other.data) {
            *x += a * y;
        }
        Ok(())
    }

    pub(crate) fn add_assign_unchecked(&mut self, other: &SpatialField) {
        for (x, y) in self.data.iter_mut().zip(&other.data) {
            *x += y;
        }
    }

    pub(crate) fn sub_assign_unchecked(&mut self, other: &SpatialField) {
        for (x, y) in self.data.iter_mut().zip(&other.data) {
            *x -= y;
        }
    }

    /// Pointwise product with unmasked scalar samples (e.g. a coefficient).
    pub fn mul_samples(&self, samples: &[f64]) -> SpatialField {
        self.map_components(|v| stencil::mul(v, samples))
    }

    /// Pointwise product; one side may be scalar, otherwise component counts
    /// must agree.
    pub fn mul(&self, other: &SpatialField) -> Result<SpatialField> {
        self.check_grid(other)?;
        match (self.ncomp, other.ncomp) {
            (a, b) if a == b => Ok(self.zip_with(other, |x, y| x * y)),
            (1, _) => Ok(other.mul_samples(&self.data)),
            (_, 1) => Ok(self.mul_samples(&other.data)),
            (a, b) => Err(Error::Incompatible(format!("cannot multiply {a}- and {b}-component fields"))),
        }
    }

    pub(crate) fn remask(&mut self) {
        let n = self.grid.len();
        for c in 0..self.ncomp {
            stencil::apply_mask(&self.grid, &mut self.data[c * n..(c + 1) * n]);
        }
    }

    pub fn linf(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn max_abs_diff(&self, other: &SpatialField) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    /// L∞, discrete L² and discrete H¹ seminorm over all components.
    pub fn norms(&self) -> FieldNorms {
        let vol = self.grid.cell_volume();
        let l2 = (self.data.iter().map(|v| v * v).sum::<f64>() * vol).sqrt();
        let mut h1 = 0.0;
        for axis in 0..self.grid.dim() {
            h1 += self.diff(axis, 1).data.iter().map(|v| v * v).sum::<f64>();
        }
        FieldNorms {
            linf: self.linf(),
            l2,
            h1: (h1 * vol).sqrt(),
        }
    }
}
