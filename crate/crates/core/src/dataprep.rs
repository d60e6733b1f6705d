//! Compactly supported smooth data: bump functions, polynomial-times-bump
//! fields, boundary lifts, homogenization of boundary data and
//! divergence-free vector fields from curl potentials.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::{Expr, ExprError};
use crate::fields::{Grid, SpatialField, TaylorField};
use crate::operators::{curl, SpatialOperator};
use crate::recurrence::{manufacture_rhs, TimeOrder};

/// Transition width of the bump function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BumpParams {
    pub width: f64,
}

impl BumpParams {
    pub fn new(width: f64) -> Self {
        Self { width }
    }

    /// `a ≥ 2h` so corner effects stay below grid resolution, and
    /// `2a < inradius` so the plateau is nonempty.
    pub fn validate(&self, grid: &Grid) -> Result<()> {
        let a = self.width;
        let h = grid.max_spacing();
        if !(a.is_finite() && a > 0.0) {
            return Err(Error::Spec(format!("bump width must be positive, got {a}")));
        }
        if a < 2.0 * h * (1.0 - 1e-12) {
            return Err(Error::Spec(format!("bump width {a} is below twice the grid spacing {h}")));
        }
        let r = grid.domain().inradius();
        if 2.0 * a >= r {
            return Err(Error::Spec(format!("bump width {a}: 2a must be below the domain inradius {r}")));
        }
        Ok(())
    }
}

/// Bump profile as a function of the distance `rho` to the boundary:
/// 1 for `rho ≥ 2a`, 0 for `rho ≤ a`, `exp(1 - a²/(a² - (2a-rho)²))` between.
pub fn bump_value(rho: f64, a: f64) -> f64 {
    if rho >= 2.0 * a {
        1.0
    } else if rho <= a {
        0.0
    } else {
        let s = 2.0 * a - rho;
        (1.0 - a * a / (a * a - s * s)).exp()
    }
}

/// Lift profile as a function of the distance `rho`: `exp(1 - a²/(a² - rho²))`
/// for `rho < a`, else 0. Equals 1 on the boundary.
pub fn lift_profile(rho: f64, a: f64) -> f64 {
    if rho >= a {
        0.0
    } else {
        (1.0 - a * a / (a * a - rho * rho)).exp()
    }
}

fn distance_field(grid: &Grid) -> Vec<Option<f64>> {
    let domain = grid.domain();
    (0..grid.len())
        .map(|idx| grid.mask()[idx].then(|| -domain.distance_unchecked(&grid.point(idx))))
        .collect()
}

/// The bump function of the grid's domain, zero outside the mask.
pub fn bump(params: &BumpParams, grid: &Arc<Grid>) -> Result<SpatialField> {
    params.validate(grid)?;
    let a = params.width;
    let values = distance_field(grid)
        .into_iter()
        .map(|rho| rho.map_or(0.0, |r| bump_value(r, a)))
        .collect();
    SpatialField::from_values(grid, 1, values)
}

/// `expr(x) · bump(x)`.
pub fn smooth_compact(expr: &Expr, params: &BumpParams, grid: &Arc<Grid>) -> Result<SpatialField> {
    expr.check_vars(grid.dim(), false)?;
    let g = bump(params, grid)?;
    let values = g
        .data()
        .iter()
        .enumerate()
        .map(|(idx, &b)| if b == 0.0 { 0.0 } else { b * expr.eval_at(&grid.point(idx), 0.0) })
        .collect();
    SpatialField::from_values(grid, 1, values)
}

/// Separable Gaussian smoothing with standard deviation `2h` per axis,
/// truncated at four deviations and renormalized; the result is remasked.
pub fn gaussian_smooth(field: &SpatialField) -> SpatialField {
    let grid = field.grid().clone();
    let mut data = field.data().to_vec();
    let n = grid.len();
    for axis in 0..grid.dim() {
        let radius = 8usize;
        // sigma = 2h, so offsets are in units of h
        let weights: Vec<f64> = (0..=radius).map(|o| (-(o as f64).powi(2) / 8.0).exp()).collect();
        let total = weights[0] + 2.0 * weights[1..].iter().sum::<f64>();
        let count = grid.counts()[axis] as isize;
        let stride = grid.stride(axis);
        let mut next = vec![0.0; data.len()];
        for comp in 0..field.components() {
            let base = comp * n;
            for idx in 0..n {
                let i = grid.axis_index(idx, axis) as isize;
                let mut acc = weights[0] * data[base + idx];
                for (o, w) in weights.iter().enumerate().skip(1) {
                    let o = o as isize;
                    if i + o < count {
                        acc += w * data[base + idx + o as usize * stride];
                    }
                    if i - o >= 0 {
                        acc += w * data[base + idx - o as usize * stride];
                    }
                }
                next[base + idx] = acc / total;
            }
        }
        data = next;
    }
    SpatialField::from_values(&grid, field.components(), data).expect("same layout")
}

/// Boundary values `u_b(x, t)` on `S`.
#[derive(Debug, Clone, PartialEq)]
pub enum BoundaryData {
    /// A closed-form expression of the boundary point and `t`.
    Expression(Expr),
    /// Normalized t-coefficients, each an expression of the boundary point.
    Series(Vec<Expr>),
}

/// Highest order computed by the divided-difference fallback.
const DIVIDED_DIFFERENCE_CAP: usize = 8;

impl BoundaryData {
    pub fn zero() -> Self {
        BoundaryData::Series(vec![Expr::constant(0.0)])
    }

    pub fn validate(&self, dim: usize) -> Result<()> {
        match self {
            BoundaryData::Expression(e) => e.check_vars(dim, true)?,
            BoundaryData::Series(list) => {
                for e in list {
                    e.check_vars(dim, false)?;
                }
            }
        }
        Ok(())
    }

    pub fn is_zero(&self) -> bool {
        match self {
            BoundaryData::Expression(e) => *e == Expr::constant(0.0),
            BoundaryData::Series(list) => list.iter().all(|e| *e == Expr::constant(0.0)),
        }
    }

    pub fn value(&self, p: &[f64], t: f64) -> f64 {
        match self {
            BoundaryData::Expression(e) => e.eval_at(p, t),
            BoundaryData::Series(list) => list.iter().rev().fold(0.0, |acc, e| acc * t + e.eval_at(p, 0.0)),
        }
    }

    /// Normalized t-coefficients `0..=order` at boundary point `p`.
    ///
    /// Expressions are expanded in truncated power-series arithmetic; if an
    /// expression is not smooth at `t = 0` the coefficients come from forward
    /// divided differences with step `1e-4·horizon`, capped at order 8.
    pub fn coefficients(&self, p: &[f64], order: usize, horizon: f64) -> Vec<f64> {
        match self {
            BoundaryData::Series(list) => {
                (0..=order).map(|k| list.get(k).map_or(0.0, |e| e.eval_at(p, 0.0))).collect()
            }
            BoundaryData::Expression(e) => match e.taylor_in_t(p, order) {
                Ok(c) => c,
                Err(ExprError::NonSmooth(_)) => divided_differences(|t| e.eval_at(p, t), order, 1e-4 * horizon),
                Err(_) => vec![f64::NAN; order + 1],
            },
        }
    }
}

/// `Δ^k f(0) / (k! δ^k)` for `k ≤ min(order, 8)`, zero above.
fn divided_differences(f: impl Fn(f64) -> f64, order: usize, step: f64) -> Vec<f64> {
    let top = order.min(DIVIDED_DIFFERENCE_CAP);
    let samples: Vec<f64> = (0..=top).map(|i| f(i as f64 * step)).collect();
    let mut diffs = samples;
    let mut out = vec![0.0; order + 1];
    let mut factorial = 1.0;
    for k in 0..=top {
        if k > 0 {
            factorial *= k as f64;
            for i in 0..diffs.len() - k {
                diffs[i] = diffs[i + 1] - diffs[i];
            }
        }
        out[k] = diffs[0] / (factorial * step.powi(k as i32));
    }
    out
}

/// Boundary lift `w`: coefficient `k` is the `k`-th t-coefficient of `u_b`
/// at the projected point `P x`, times `exp(1 - a²/(a² - |x - Px|²))` within
/// distance `a` of the boundary and zero elsewhere.
pub fn boundary_lift(
    ub: &BoundaryData,
    width: f64,
    grid: &Arc<Grid>,
    order: usize,
    horizon: f64,
) -> Result<TaylorField> {
    let ghost = lift_with_exterior(ub, width, grid, order, horizon)?;
    TaylorField::new(ghost.coeffs().iter().map(SpatialField::masked).collect())
}

/// The same lift continued past the boundary, so nodes outside the mask
/// (the boundary nodes of a box, say) carry `u_b` as ghost values.
fn lift_with_exterior(
    ub: &BoundaryData,
    width: f64,
    grid: &Arc<Grid>,
    order: usize,
    horizon: f64,
) -> Result<TaylorField> {
    ub.validate(grid.dim())?;
    if !(width > 0.0 && width.is_finite()) {
        return Err(Error::Spec(format!("lift width must be positive, got {width}")));
    }
    let domain = grid.domain();
    let n = grid.len();
    let mut orders = vec![vec![0.0; n]; order + 1];
    for idx in 0..n {
        let x = grid.point(idx);
        let factor = lift_profile(domain.distance_unchecked(&x).abs(), width);
        if factor == 0.0 {
            continue;
        }
        let p = domain.project_unchecked(&x);
        let c = ub.coefficients(&p, order, horizon);
        for (k, v) in c.into_iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::Spec(format!(
                    "boundary data coefficient {k} is not finite at boundary point {p:?}"
                )));
            }
            orders[k][idx] = v * factor;
        }
    }
    TaylorField::new(orders.into_iter().map(|v| SpatialField::with_exterior(grid, 1, v)).collect())
}

/// Settings for building the lift during homogenization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LiftConfig {
    pub width: f64,
    /// Number of t-orders of the lift beyond the constant term.
    pub order: usize,
    pub horizon: f64,
}

/// A problem with zero boundary data, together with the lift that
/// reconstructs the original solution as `u = ũ + w`.
#[derive(Debug, Clone)]
pub struct Homogenized {
    pub forcing: TaylorField,
    pub u0: SpatialField,
    pub u1: Option<SpatialField>,
    pub lift: TaylorField,
}

impl Homogenized {
    pub fn reconstruct(&self, tilde: &TaylorField) -> Result<TaylorField> {
        tilde.add(&self.lift)
    }
}

/// Compares a trace (initial data on `S`) against the t-coefficient
/// `order_index` of `u_b` at the projections of the grid points nearest
/// the boundary.
fn check_compatibility(
    grid: &Grid,
    ub: &BoundaryData,
    trace: &dyn Fn(&[f64]) -> f64,
    order_index: usize,
    horizon: f64,
) -> Result<()> {
    let domain = grid.domain();
    let band = 1.5 * grid.max_spacing();
    let mut worst: Option<(Vec<f64>, f64)> = None;
    let mut scale = 0.0f64;
    for (idx, rho) in distance_field(grid).into_iter().enumerate() {
        let Some(rho) = rho else { continue };
        if rho > band {
            continue;
        }
        let p = domain.project_unchecked(&grid.point(idx));
        let expected = ub.coefficients(&p, order_index, horizon)[order_index];
        let got = trace(&p);
        scale = scale.max(expected.abs()).max(got.abs());
        let mismatch = (expected - got).abs();
        if worst.as_ref().map_or(true, |w| mismatch > w.1) {
            worst = Some((p, mismatch));
        }
    }
    let tolerance = 1e-8 * scale.max(1.0);
    match worst {
        Some((point, mismatch)) if !(mismatch <= tolerance) => {
            Err(Error::Compatibility { point, mismatch, tolerance })
        }
        _ => Ok(()),
    }
}

/// The lift and the forcing correction `lag · w_t - A w`. `A w` is taken
/// with the ghost values in place, so `ũ + w` obeys the boundary data
/// rather than the zero extension.
fn lift_and_correction(
    op: &dyn SpatialOperator,
    order: TimeOrder,
    ub: &BoundaryData,
    cfg: &LiftConfig,
) -> Result<(TaylorField, TaylorField)> {
    let lag = match order {
        TimeOrder::First => 1,
        TimeOrder::Second => 2,
    };
    let ghost = lift_with_exterior(ub, cfg.width, op.grid(), cfg.order.max(lag), cfg.horizon)?;
    // w is a polynomial in t, so its top order still enters through A w
    let correction = manufacture_rhs(op, order, &ghost.truncate(ghost.order() + lag))?;
    let mask = |t: &TaylorField| TaylorField::new(t.coeffs().iter().map(SpatialField::masked).collect());
    Ok((mask(&ghost)?, mask(&correction)?))
}

/// First-order problem `u_t = A u + f`, `u = u_b` on `S`: returns the
/// problem for `ũ = u - w` with `ũ_0 = u_0 - w_0` and
/// `f̃_k = φ_k - (k+1) w_{k+1} + Σ_j A_j w_{k-j}`.
///
/// `u0_trace` gives the initial data on the boundary; it must agree with
/// `u_b(·, 0)` to `1e-8` relative at the projected samples.
pub fn homogenize_parabolic(
    op: &dyn SpatialOperator,
    f: &TaylorField,
    u0: &SpatialField,
    u0_trace: &dyn Fn(&[f64]) -> f64,
    ub: &BoundaryData,
    cfg: &LiftConfig,
) -> Result<Homogenized> {
    let grid = op.grid();
    if ub.is_zero() {
        return Ok(Homogenized {
            forcing: f.clone(),
            u0: u0.clone(),
            u1: None,
            lift: TaylorField::zeros(grid, op.components(), 0),
        });
    }
    check_compatibility(grid, ub, u0_trace, 0, cfg.horizon)?;
    let (lift, correction) = lift_and_correction(op, TimeOrder::First, ub, cfg)?;
    Ok(Homogenized {
        forcing: f.sub(&correction)?,
        u0: u0.sub(lift.coeff(0))?,
        u1: None,
        lift,
    })
}

/// Second-order analogue: `ũ_1 = u_1 - w_1` and
/// `f̃_k = φ_k - (k+2)(k+1) w_{k+2} + Σ_j B_j w_{k-j}`.
#[allow(clippy::too_many_arguments)]
pub fn homogenize_hyperbolic(
    op: &dyn SpatialOperator,
    f: &TaylorField,
    u0: &SpatialField,
    u1: &SpatialField,
    u0_trace: &dyn Fn(&[f64]) -> f64,
    u1_trace: &dyn Fn(&[f64]) -> f64,
    ub: &BoundaryData,
    cfg: &LiftConfig,
) -> Result<Homogenized> {
    let grid = op.grid();
    if ub.is_zero() {
        return Ok(Homogenized {
            forcing: f.clone(),
            u0: u0.clone(),
            u1: Some(u1.clone()),
            lift: TaylorField::zeros(grid, op.components(), 0),
        });
    }
    check_compatibility(grid, ub, u0_trace, 0, cfg.horizon)?;
    check_compatibility(grid, ub, u1_trace, 1, cfg.horizon)?;
    let (lift, correction) = lift_and_correction(op, TimeOrder::Second, ub, cfg)?;
    Ok(Homogenized {
        forcing: f.sub(&correction)?,
        u0: u0.sub(lift.coeff(0))?,
        u1: Some(u1.sub(lift.coeff(1))?),
        lift,
    })
}

/// Forcing kept to orders `0..=l`, with `Σ_{k>l} ‖φ_k‖_∞ T^k` for the part
/// that was dropped.
#[derive(Debug, Clone)]
pub struct TruncatedForcing {
    pub forcing: TaylorField,
    pub tail_bound: f64,
}

pub fn truncate_forcing(f: &TaylorField, l: usize, horizon: f64) -> Result<TruncatedForcing> {
    if l > f.order() {
        return Err(Error::Spec(format!("cannot keep {l} orders of a forcing of order {}", f.order())));
    }
    let tail_bound = f.coeffs()[l + 1..]
        .iter()
        .enumerate()
        .map(|(i, c)| c.linf() * horizon.powi((l + 1 + i) as i32))
        .sum();
    Ok(TruncatedForcing { forcing: f.truncate(l), tail_bound })
}

/// `curl` of the potential made compact by the bump function; its discrete
/// divergence vanishes to round-off.
pub fn divfree_data(potential: &[Expr; 3], params: &BumpParams, grid: &Arc<Grid>) -> Result<SpatialField> {
    if grid.dim() != 3 {
        return Err(Error::Dimension { expected: 3, got: grid.dim() });
    }
    let parts = potential
        .iter()
        .map(|e| smooth_compact(e, params, grid))
        .collect::<Result<Vec<_>>>()?;
    curl(&SpatialField::stack(&parts)?)
}
