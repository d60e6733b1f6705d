use serde::Serialize;

use crate::fields::TaylorField;

/// Estimated convergence radius of `Σ c_k t^k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RadiusEstimate {
    /// Geometric decay `‖c_k‖ ~ R^{-k}`.
    Finite { radius: f64 },
    /// Decay accelerating across the fit window, as for entire functions.
    /// `lower_bound` is the radius implied by the latest part of the window.
    SuperGeometric { lower_bound: f64 },
    /// Too few nonzero coefficients to fit.
    Indeterminate,
}

impl RadiusEstimate {
    /// A radius usable for choosing a horizon; `None` when indeterminate.
    pub fn usable_radius(&self) -> Option<f64> {
        match *self {
            RadiusEstimate::Finite { radius } => Some(radius),
            RadiusEstimate::SuperGeometric { lower_bound } => Some(lower_bound),
            RadiusEstimate::Indeterminate => None,
        }
    }
}

/// Slope of the least-squares line through `(k, y)`.
fn slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let mk = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|(k, y)| (k - mk) * (y - my)).sum();
    let sxx: f64 = points.iter().map(|(k, _)| (k - mk) * (k - mk)).sum();
    sxy / sxx
}

/// Fits `log ‖c_k‖_∞` over the last half of the computed orders.
///
/// Zero coefficients (odd terms of symmetric wave series, for instance) and
/// isolated dips more than three decades below both neighbours are skipped.
pub fn radius_estimate(u: &TaylorField) -> RadiusEstimate {
    radius_from_norms(&u.coeff_norms())
}

pub(crate) fn radius_from_norms(norms: &[f64]) -> RadiusEstimate {
    if norms.len() < 6 {
        return RadiusEstimate::Indeterminate;
    }
    let m = norms.len() - 1;
    let logs: Vec<Option<f64>> =
        norms.iter().map(|&n| (n > 0.0 && n.is_finite()).then(|| n.ln())).collect();
    let dip = 3.0 * std::f64::consts::LN_10;
    let mut points = Vec::new();
    for k in (m / 2).max(1)..=m {
        let Some(y) = logs[k] else { continue };
        let below = |j: Option<usize>| j.and_then(|j| logs.get(j).copied().flatten()).is_some_and(|v| v - y > dip);
        if below(k.checked_sub(1)) && below(Some(k + 1)) {
            continue;
        }
        points.push((k as f64, y));
    }
    if points.len() < 3 {
        return RadiusEstimate::Indeterminate;
    }
    let beta = slope(&points);
    if points.len() >= 6 {
        let half = points.len() / 2;
        let (early, late) = (slope(&points[..half]), slope(&points[half..]));
        if (early - late).exp() > 1.15 {
            return RadiusEstimate::SuperGeometric { lower_bound: (-late).exp() };
        }
    }
    RadiusEstimate::Finite { radius: (-beta).exp() }
}
