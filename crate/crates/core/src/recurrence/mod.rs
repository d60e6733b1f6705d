//! Generation of normalized Taylor coefficients for every problem class,
//! the inverse map (manufactured forcing), residual identities and a
//! convergence-radius diagnostic.

mod classes;
mod manufacture;
mod radius;
mod report;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::{SpatialField, TaylorField};

pub use classes::{
    hyperbolic_coeffs, maxwell_coeffs, nonlinear_parabolic_coeffs, parabolic_coeffs, plate_coeffs,
    system_parabolic_coeffs,
};
pub use manufacture::{
    manufacture_rhs, maxwell_residual, nonlinear_residual, plate_residual, residual_check, ResidualReport,
    TimeOrder,
};
pub use radius::{radius_estimate, RadiusEstimate};
pub use report::{GridSummary, SolveReport};

/// Hard cap on the number of generated orders.
pub const MAX_ORDER_CAP: usize = 400;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum TruncationPolicy {
    /// Coefficients `c_0..=c_order`.
    Fixed { order: usize },
    /// Stops at the first `m` with `‖c_m‖ T^m + ‖c_{m-1}‖ T^{m-1} < tolerance`.
    Adaptive {
        tolerance: f64,
        max_order: usize,
        horizon: f64,
    },
}

impl TruncationPolicy {
    pub fn validate(&self) -> Result<()> {
        match *self {
            TruncationPolicy::Fixed { order } => {
                if order < 1 || order > MAX_ORDER_CAP {
                    return Err(Error::Spec(format!("fixed order must lie in 1..={MAX_ORDER_CAP}, got {order}")));
                }
            }
            TruncationPolicy::Adaptive { tolerance, max_order, horizon } => {
                if !(tolerance > 0.0) {
                    return Err(Error::Spec(format!("tolerance must be positive, got {tolerance}")));
                }
                if max_order < 1 || max_order > MAX_ORDER_CAP {
                    return Err(Error::Spec(format!("max_order must lie in 1..={MAX_ORDER_CAP}, got {max_order}")));
                }
                if !(horizon > 0.0 && horizon.is_finite()) {
                    return Err(Error::Spec(format!("horizon must be positive, got {horizon}")));
                }
            }
        }
        Ok(())
    }

    pub fn max_order(&self) -> usize {
        match *self {
            TruncationPolicy::Fixed { order } => order,
            TruncationPolicy::Adaptive { max_order, .. } => max_order,
        }
    }
}

/// Runs `c_k = bracket(k, c_0..c_{k-1}) / denom(k)` from the given initial
/// coefficients until the policy says stop.
pub(crate) fn drive(
    init: Vec<SpatialField>,
    denom: impl Fn(usize) -> f64,
    policy: &TruncationPolicy,
    min_order: usize,
    mut bracket: impl FnMut(usize, &[SpatialField]) -> SpatialField,
) -> Result<TaylorField> {
    policy.validate()?;
    let mut coeffs = init;
    if coeffs.iter().any(|c| !c.is_finite()) {
        return Err(Error::BlowUp {
            order: 0,
            last_valid: 0,
            reason: "initial data is not finite".into(),
        });
    }
    let mut streak = 0usize;
    let scaled = |c: &SpatialField, k: usize, t: f64| c.linf() * t.powi(k as i32);
    loop {
        let k = coeffs.len();
        if k > policy.max_order() {
            break;
        }
        let d = denom(k);
        let c = bracket(k, &coeffs).map(|v| v / d);
        if !c.is_finite() {
            return Err(Error::BlowUp {
                order: k,
                last_valid: k - 1,
                reason: "non-finite coefficient entries".into(),
            });
        }
        coeffs.push(c);
        if let TruncationPolicy::Adaptive { tolerance, horizon, .. } = *policy {
            let g_k = scaled(&coeffs[k], k, horizon);
            let g_prev = scaled(&coeffs[k - 1], k - 1, horizon);
            if k > 20 && g_k > g_prev {
                streak += 1;
                if streak >= 10 {
                    return Err(Error::BlowUp {
                        order: k,
                        last_valid: k,
                        reason: format!(
                            "‖c_k‖·T^k has grown for 10 consecutive orders (now {g_k:e}); the series diverges on [0, {horizon}]"
                        ),
                    });
                }
            } else {
                streak = 0;
            }
            if k >= min_order.max(1) && g_k + g_prev < tolerance {
                break;
            }
        }
    }
    if let TruncationPolicy::Fixed { order } = *policy {
        coeffs.truncate(order + 1);
    }
    TaylorField::new(coeffs)
}
