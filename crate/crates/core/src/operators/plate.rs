use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::SpatialOperator;
use crate::error::{Error, Result};
use crate::fields::stencil;
use crate::fields::{Grid, SpatialField};

/// Elastic constants, density and damping of an orthotropic plate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlateMaterial {
    pub e1: f64,
    pub e2: f64,
    pub shear: f64,
    pub mu1: f64,
    pub mu2: f64,
    pub density: f64,
    pub a0: f64,
    pub a1: f64,
}

/// Plate with variable thickness; rigidities and damping rates are sampled
/// at every node.
#[derive(Debug, Clone)]
pub struct PlateSpec {
    grid: Arc<Grid>,
    material: PlateMaterial,
    thickness: Vec<f64>,
    d1: Vec<f64>,
    d2: Vec<f64>,
    d12: Vec<f64>,
    d3: Vec<f64>,
    rho_h: Vec<f64>,
    alpha0: Vec<f64>,
    alpha1: Vec<f64>,
}

impl PlateSpec {
    /// `thickness_bounds = (e1, e2)` with `0 < e1 ≤ h ≤ e2` required at
    /// every node.
    pub fn new(
        grid: &Arc<Grid>,
        material: PlateMaterial,
        thickness: impl Fn(&[f64]) -> f64,
        thickness_bounds: (f64, f64),
    ) -> Result<Self> {
        if grid.dim() != 2 {
            return Err(Error::Dimension { expected: 2, got: grid.dim() });
        }
        let m = material;
        for (name, v) in [("E1", m.e1), ("E2", m.e2), ("G", m.shear), ("density", m.density)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Spec(format!("{name} must be positive, got {v}")));
            }
        }
        for (name, v) in [("mu1", m.mu1), ("mu2", m.mu2)] {
            if !(0.0..1.0).contains(&v) {
                return Err(Error::Spec(format!("{name} must lie in [0, 1), got {v}")));
            }
        }
        for (name, v) in [("a0", m.a0), ("a1", m.a1)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::Spec(format!("damping {name} must be non-negative, got {v}")));
            }
        }
        let lhs = m.mu2 * m.e1;
        let rhs = m.mu1 * m.e2;
        if (lhs - rhs).abs() > 1e-12 * lhs.abs().max(rhs.abs()) {
            return Err(Error::Spec(format!(
                "inconsistent material: mu2*E1 = {lhs} but mu1*E2 = {rhs}, so D12 is not well defined"
            )));
        }
        let (lo, hi) = thickness_bounds;
        if !(lo > 0.0 && lo <= hi) {
            return Err(Error::Spec(format!("thickness bounds must satisfy 0 < e1 <= e2, got ({lo}, {hi})")));
        }
        let h: Vec<f64> = (0..grid.len()).map(|idx| thickness(&grid.point(idx))).collect();
        if let Some(idx) = h.iter().position(|v| !(*v >= lo && *v <= hi)) {
            return Err(Error::Spec(format!(
                "thickness {} at {:?} is outside [{lo}, {hi}]",
                h[idx],
                grid.point(idx)
            )));
        }
        let denom = 12.0 * (1.0 - m.mu1 * m.mu2);
        let d1: Vec<f64> = h.iter().map(|t| t.powi(3) * m.e1 / denom).collect();
        let d2: Vec<f64> = h.iter().map(|t| t.powi(3) * m.e2 / denom).collect();
        let d12: Vec<f64> = d1.iter().map(|d| m.mu2 * d).collect();
        let d3: Vec<f64> = h.iter().map(|t| t.powi(3) * m.shear / 6.0).collect();
        let rho_h: Vec<f64> = h.iter().map(|t| m.density * t).collect();
        let alpha0 = rho_h.iter().map(|r| m.a0 / r).collect();
        let alpha1 = rho_h.iter().map(|r| m.a1 / r).collect();
        Ok(Self {
            grid: grid.clone(),
            material,
            thickness: h,
            d1,
            d2,
            d12,
            d3,
            rho_h,
            alpha0,
            alpha1,
        })
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn material(&self) -> &PlateMaterial {
        &self.material
    }

    pub fn thickness(&self) -> &[f64] {
        &self.thickness
    }

    pub fn rigidities(&self) -> [&[f64]; 4] {
        [&self.d1, &self.d2, &self.d12, &self.d3]
    }

    pub fn rho_h(&self) -> &[f64] {
        &self.rho_h
    }

    pub fn alpha0(&self) -> &[f64] {
        &self.alpha0
    }

    pub fn alpha1(&self) -> &[f64] {
        &self.alpha1
    }

    /// Largest effective rigidity per unit mass, `max (D_eff / ρh)` with
    /// `D_eff = max(D1, D2) + D12 + 2 D3`.
    pub fn max_stiffness_ratio(&self) -> f64 {
        (0..self.grid.len())
            .map(|k| (self.d1[k].max(self.d2[k]) + self.d12[k] + 2.0 * self.d3[k]) / self.rho_h[k])
            .fold(0.0, f64::max)
    }

    /// Orthotropic operator
    /// `∂11(D1 ∂11 u) + ∂22(D2 ∂22 u) + ∂22(D12 ∂11 u) + ∂11(D12 ∂22 u) + 2 ∂12(D3 ∂12 u)`
    /// from composed three-point differences.
    pub fn apply_a(&self, u: &SpatialField) -> SpatialField {
        assert_eq!(u.components(), 1, "plate operator acts on scalar fields");
        let g = &*self.grid;
        let v = u.data();
        let uxx = stencil::compact_second(g, v, 0);
        let uyy = stencil::compact_second(g, v, 1);
        let t1 = stencil::compact_second(g, &stencil::mul(&self.d1, &uxx), 0);
        let t2 = stencil::compact_second(g, &stencil::mul(&self.d2, &uyy), 1);
        let t3 = stencil::compact_second(g, &stencil::mul(&self.d12, &uxx), 1);
        let t4 = stencil::compact_second(g, &stencil::mul(&self.d12, &uyy), 0);
        let pp = stencil::forward(g, &stencil::forward(g, v, 0), 1);
        let mm = stencil::backward(g, &stencil::backward(g, v, 0), 1);
        let left = stencil::backward(g, &stencil::backward(g, &stencil::mul(&self.d3, &pp), 0), 1);
        let right = stencil::forward(g, &stencil::forward(g, &stencil::mul(&self.d3, &mm), 0), 1);
        let out: Vec<f64> = (0..g.len())
            .map(|k| t1[k] + t2[k] + t3[k] + t4[k] + (left[k] + right[k]))
            .collect();
        SpatialField::from_values(&self.grid, 1, out).expect("scalar field")
    }

    /// `-(1/ρh) A u`, the elastic part of the acceleration.
    pub fn elastic_acceleration(&self, u: &SpatialField) -> SpatialField {
        let a = self.apply_a(u);
        let out: Vec<f64> = a.data().iter().zip(&self.rho_h).map(|(v, r)| -(v / r)).collect();
        SpatialField::from_values(&self.grid, 1, out).expect("scalar field")
    }
}

/// The undamped plate seen as a second-order-in-time linear operator
/// `u ↦ -(1/ρh) A u`.
pub struct PlateOperator<'a>(pub &'a PlateSpec);

impl SpatialOperator for PlateOperator<'_> {
    fn grid(&self) -> &Arc<Grid> {
        &self.0.grid
    }

    fn components(&self) -> usize {
        1
    }

    fn coefficient_orders(&self) -> usize {
        1
    }

    fn apply(&self, j: usize, u: &SpatialField) -> SpatialField {
        if j == 0 {
            self.0.elastic_acceleration(u)
        } else {
            SpatialField::zeros(&self.0.grid, 1)
        }
    }
}
