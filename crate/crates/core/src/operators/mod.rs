//! Discrete spatial operators for each problem class.
//!
//! Coefficients are time-Taylor series; `apply(j, u)` builds the operator
//! from the order-`j` coefficient fields only, so the time dependence lives
//! entirely in the coefficient data.

mod maxwell;
mod nonlinear;
mod parabolic;
mod plate;
mod system;

use std::sync::Arc;

use crate::fields::{Grid, SpatialField};

pub use maxwell::{curl, div, MaxwellSpec};
pub use nonlinear::{MSeries, NonlinearTermsSpec};
pub use parabolic::ParabolicScalarSpec;
pub use plate::{PlateMaterial, PlateOperator, PlateSpec};
pub use system::DivFormSystemSpec;

/// A linear spatial operator whose coefficients are power series in `t`.
pub trait SpatialOperator: Send + Sync {
    fn grid(&self) -> &Arc<Grid>;

    /// Component count of the fields it acts on.
    fn components(&self) -> usize;

    /// Number of stored t-orders; higher orders act as the zero operator.
    fn coefficient_orders(&self) -> usize;

    /// Operator assembled from the order-`j` coefficients.
    fn apply(&self, j: usize, u: &SpatialField) -> SpatialField;

    /// Operator with coefficients evaluated at time `t`.
    fn apply_at(&self, t: f64, u: &SpatialField) -> SpatialField {
        let mut out = SpatialField::zeros(self.grid(), u.components());
        let mut w = 1.0;
        for j in 0..self.coefficient_orders() {
            out.add_assign_unchecked(&self.apply(j, u).scale(w));
            w *= t;
        }
        out
    }
}

/// Directions `{-1, 0, 1}^n \ {0}`, normalized (26 in three dimensions).
pub(crate) fn sample_directions(n: usize) -> Vec<Vec<f64>> {
    let total = 3usize.pow(n as u32);
    let mut out = Vec::new();
    for code in 0..total {
        let mut c = code;
        let v: Vec<f64> = (0..n)
            .map(|_| {
                let d = (c % 3) as f64 - 1.0;
                c /= 3;
                d
            })
            .collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 0.0 {
            out.push(v.iter().map(|x| x / norm).collect());
        }
    }
    out
}

/// Unit directions for the component index of a system: the full cube
/// pattern up to three components, coordinate vectors and pairwise sums
/// beyond that.
pub(crate) fn component_directions(n: usize) -> Vec<Vec<f64>> {
    if n <= 3 {
        return sample_directions(n);
    }
    let mut out = Vec::new();
    for i in 0..n {
        let mut e = vec![0.0; n];
        e[i] = 1.0;
        out.push(e);
        for j in i + 1..n {
            for s in [1.0, -1.0] {
                let mut e = vec![0.0; n];
                e[i] = std::f64::consts::FRAC_1_SQRT_2;
                e[j] = s * std::f64::consts::FRAC_1_SQRT_2;
                out.push(e);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn direction_counts() {
        assert_eq!(sample_directions(3).len(), 26);
        assert_eq!(sample_directions(2).len(), 8);
        assert_eq!(sample_directions(1).len(), 2);
        assert_eq!(component_directions(4).len(), 4 + 12);
    }
}
