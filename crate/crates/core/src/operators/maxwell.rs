use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fields::{Grid, SpatialField};

/// Material fields of the Maxwell system, time independent.
#[derive(Debug, Clone)]
pub struct MaxwellSpec {
    grid: Arc<Grid>,
    mu_hat: Vec<f64>,
    xi_hat: Vec<f64>,
    sigma: Vec<f64>,
}

/// Optional `(lower, upper)` bounds checked for each material field.
pub type Bounds = Option<(f64, f64)>;

impl MaxwellSpec {
    pub fn new(
        grid: &Arc<Grid>,
        mu_hat: impl Fn(&[f64]) -> f64,
        xi_hat: impl Fn(&[f64]) -> f64,
        sigma: impl Fn(&[f64]) -> f64,
        bounds: [Bounds; 3],
    ) -> Result<Self> {
        if grid.dim() != 3 {
            return Err(Error::Dimension { expected: 3, got: grid.dim() });
        }
        let sample = |f: &dyn Fn(&[f64]) -> f64| -> Vec<f64> { (0..grid.len()).map(|i| f(&grid.point(i))).collect() };
        let fields = [sample(&mu_hat), sample(&xi_hat), sample(&sigma)];
        for ((name, v), b) in ["mu_hat", "xi_hat", "sigma"].iter().zip(&fields).zip(bounds) {
            let strict = *name != "sigma";
            for (idx, &x) in v.iter().enumerate() {
                let ok = x.is_finite() && if strict { x > 0.0 } else { x >= 0.0 };
                let in_bounds = b.map_or(true, |(lo, hi)| x >= lo && x <= hi);
                if !ok || !in_bounds {
                    return Err(Error::Spec(format!(
                        "{name} = {x} at {:?} violates positivity or the supplied bounds",
                        grid.point(idx)
                    )));
                }
            }
        }
        let [mu_hat, xi_hat, sigma] = fields;
        Ok(Self { grid: grid.clone(), mu_hat, xi_hat, sigma })
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn mu_hat(&self) -> &[f64] {
        &self.mu_hat
    }

    pub fn xi_hat(&self) -> &[f64] {
        &self.xi_hat
    }

    pub fn sigma(&self) -> &[f64] {
        &self.sigma
    }

    /// `max sqrt(μ̂ ξ̂)`, the largest wave speed.
    pub fn max_speed(&self) -> f64 {
        self.mu_hat
            .iter()
            .zip(&self.xi_hat)
            .map(|(m, x)| (m * x).sqrt())
            .fold(0.0, f64::max)
    }

    /// `σ ξ̂` samples.
    pub fn damping(&self) -> Vec<f64> {
        self.sigma.iter().zip(&self.xi_hat).map(|(s, x)| s * x).collect()
    }
}

fn check_vector(field: &SpatialField) -> Result<()> {
    if field.grid().dim() != 3 {
        return Err(Error::Dimension { expected: 3, got: field.grid().dim() });
    }
    if field.components() != 3 {
        return Err(Error::Incompatible(format!("expected a 3-component field, got {}", field.components())));
    }
    Ok(())
}

/// Collocated central-difference curl.
pub fn curl(w: &SpatialField) -> Result<SpatialField> {
    check_vector(w)?;
    let d = |c: usize, axis: usize| w.component_field(c).diff(axis, 1);
    let x = d(2, 1).sub(&d(1, 2))?;
    let y = d(0, 2).sub(&d(2, 0))?;
    let z = d(1, 0).sub(&d(0, 1))?;
    SpatialField::stack(&[x, y, z])
}

/// Collocated central-difference divergence.
pub fn div(w: &SpatialField) -> Result<SpatialField> {
    check_vector(w)?;
    let mut out = w.component_field(0).diff(0, 1);
    out.add_assign_unchecked(&w.component_field(1).diff(1, 1));
    out.add_assign_unchecked(&w.component_field(2).diff(2, 1));
    Ok(out)
}
