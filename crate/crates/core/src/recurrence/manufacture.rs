use serde::Serialize;

use super::classes::{check_series, linear_bracket, maxwell_bracket, nonlinear_bracket, plate_bracket};
use crate::error::{Error, Result};
use crate::fields::{SpatialField, TaylorField};
use crate::operators::{MaxwellSpec, NonlinearTermsSpec, ParabolicScalarSpec, PlateOperator, PlateSpec, SpatialOperator};

/// Highest time derivative in the equation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TimeOrder {
    First,
    Second,
}

impl TimeOrder {
    fn lag(self) -> usize {
        match self {
            TimeOrder::First => 1,
            TimeOrder::Second => 2,
        }
    }

    fn denom(self, k: usize) -> f64 {
        match self {
            TimeOrder::First => k as f64,
            TimeOrder::Second => (k * (k - 1)) as f64,
        }
    }
}

/// Forcing series for which the forward recurrence reproduces `u`:
/// `φ_{k-1} = k c_k - Σ_j A_j c_{k-1-j}` (first order) or
/// `φ_{k-2} = k(k-1) c_k - Σ_j B_j c_{k-2-j}` (second order).
pub fn manufacture_rhs(op: &dyn SpatialOperator, order: TimeOrder, u: &TaylorField) -> Result<TaylorField> {
    let lag = order.lag();
    check_series(op, u, "target solution")?;
    if u.len() <= lag {
        return Err(Error::Spec(format!(
            "manufacturing a forcing needs at least {} coefficients, got {}",
            lag + 1,
            u.len()
        )));
    }
    let none = TaylorField::zeros(op.grid(), op.components(), 0);
    let mut bracket = linear_bracket(op, &none, lag - 1);
    let mut out = Vec::with_capacity(u.len() - lag);
    for k in lag..u.len() {
        let mut phi = u.coeff(k).scale(order.denom(k));
        phi.sub_assign_unchecked(&bracket(k, &u.coeffs()[..k]));
        out.push(phi);
    }
    TaylorField::new(out)
}

/// Coefficient identities `denom(k) c_k - bracket_k = 0` and their
/// time-domain sums.
#[derive(Debug, Clone, Serialize)]
pub struct ResidualReport {
    /// `‖r_k‖_∞ / scale_k` per identity, indexed by the forcing order.
    pub per_order: Vec<f64>,
    pub coefficient_max: f64,
    pub times: Vec<f64>,
    /// `‖Σ r_k t^k‖_∞ / Σ scale_k t^k` at each sample time.
    pub per_time: Vec<f64>,
    pub time_max: f64,
}

fn ratio(num: f64, den: f64) -> f64 {
    if den > 0.0 {
        num / den
    } else {
        num
    }
}

fn assemble(
    coeffs: &[SpatialField],
    order: TimeOrder,
    forcing_norm: impl Fn(usize) -> f64,
    mut bracket: impl FnMut(usize, &[SpatialField]) -> SpatialField,
    times: &[f64],
) -> ResidualReport {
    let lag = order.lag();
    let mut residuals = Vec::new();
    let mut scales = Vec::new();
    for k in lag..coeffs.len() {
        let lhs = coeffs[k].scale(order.denom(k));
        let rhs = bracket(k, &coeffs[..k]);
        let scale = lhs.linf().max(rhs.linf()).max(forcing_norm(k - lag));
        let mut r = lhs;
        r.sub_assign_unchecked(&rhs);
        residuals.push(r);
        scales.push(scale);
    }
    let per_order: Vec<f64> = residuals.iter().zip(&scales).map(|(r, s)| ratio(r.linf(), *s)).collect();
    let per_time: Vec<f64> = times
        .iter()
        .map(|&t| {
            let Some(first) = residuals.first() else { return 0.0 };
            let mut sum = SpatialField::zeros(first.grid(), first.components());
            let mut scale = 0.0;
            let mut w = 1.0;
            for (r, s) in residuals.iter().zip(&scales) {
                sum.add_assign_unchecked(&r.scale(w));
                scale += s * w;
                w *= t;
            }
            ratio(sum.linf(), scale)
        })
        .collect();
    ResidualReport {
        coefficient_max: per_order.iter().copied().fold(0.0, f64::max),
        time_max: per_time.iter().copied().fold(0.0, f64::max),
        per_order,
        times: times.to_vec(),
        per_time,
    }
}

fn forcing_norms(f: &TaylorField) -> impl Fn(usize) -> f64 + '_ {
    |k| f.get(k).map_or(0.0, SpatialField::linf)
}

/// Residuals of a linear first- or second-order solve against forcing `f`.
pub fn residual_check(
    op: &dyn SpatialOperator,
    order: TimeOrder,
    u: &TaylorField,
    f: &TaylorField,
    times: &[f64],
) -> Result<ResidualReport> {
    check_series(op, u, "solution")?;
    check_series(op, f, "forcing")?;
    Ok(assemble(u.coeffs(), order, forcing_norms(f), linear_bracket(op, f, order.lag() - 1), times))
}

pub fn nonlinear_residual(
    pspec: &ParabolicScalarSpec,
    nspec: &NonlinearTermsSpec,
    u: &TaylorField,
    f: &TaylorField,
    times: &[f64],
) -> Result<ResidualReport> {
    check_series(pspec, u, "solution")?;
    check_series(pspec, f, "forcing")?;
    Ok(assemble(u.coeffs(), TimeOrder::First, forcing_norms(f), nonlinear_bracket(pspec, nspec, f), times))
}

pub fn plate_residual(spec: &PlateSpec, u: &TaylorField, f: &TaylorField, times: &[f64]) -> Result<ResidualReport> {
    let op = PlateOperator(spec);
    check_series(&op, u, "solution")?;
    check_series(&op, f, "forcing")?;
    Ok(assemble(u.coeffs(), TimeOrder::Second, forcing_norms(f), plate_bracket(spec, f), times))
}

pub fn maxwell_residual(
    spec: &MaxwellSpec,
    d: &TaylorField,
    b: &TaylorField,
    g1: &TaylorField,
    g2: &TaylorField,
    times: &[f64],
) -> Result<ResidualReport> {
    if d.len() != b.len() {
        return Err(Error::Incompatible(format!("D has {} coefficients, B has {}", d.len(), b.len())));
    }
    let stacked: Vec<SpatialField> = d
        .coeffs()
        .iter()
        .zip(b.coeffs())
        .map(|(x, y)| SpatialField::stack(&[x.clone(), y.clone()]))
        .collect::<Result<_>>()?;
    if !stacked[0].grid().same_as(spec.grid()) {
        return Err(Error::Incompatible("fields are sampled on a different grid than the material".into()));
    }
    let norm = |k: usize| {
        let a = g1.get(k).map_or(0.0, SpatialField::linf);
        a.max(g2.get(k).map_or(0.0, SpatialField::linf))
    };
    Ok(assemble(&stacked, TimeOrder::First, norm, maxwell_bracket(spec, g1, g2), times))
}
