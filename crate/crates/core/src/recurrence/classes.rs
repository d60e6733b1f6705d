use super::{drive, TruncationPolicy};
use crate::error::{Error, Result};
use crate::fields::{SpatialField, TaylorField};
use crate::operators::{
    curl, DivFormSystemSpec, MSeries, MaxwellSpec, NonlinearTermsSpec, ParabolicScalarSpec, PlateSpec,
    SpatialOperator,
};

pub(crate) fn check_field(op: &dyn SpatialOperator, u: &SpatialField, what: &str) -> Result<()> {
    if !u.grid().same_as(op.grid()) {
        return Err(Error::Incompatible(format!("{what} is sampled on a different grid than the operator")));
    }
    if u.components() != op.components() {
        return Err(Error::Incompatible(format!(
            "{what} has {} component(s), the operator expects {}",
            u.components(),
            op.components()
        )));
    }
    Ok(())
}

pub(crate) fn check_series(op: &dyn SpatialOperator, f: &TaylorField, what: &str) -> Result<()> {
    check_field(op, f.coeff(0), what)
}

/// `Σ_{j<k-1-shift} A_j c_{k-1-shift-j} + φ_{k-1-shift}`, shared by the
/// first-order (`shift = 0`) and second-order (`shift = 1`) recurrences.
pub(crate) fn linear_bracket<'a>(
    op: &'a dyn SpatialOperator,
    f: &'a TaylorField,
    shift: usize,
) -> impl FnMut(usize, &[SpatialField]) -> SpatialField + 'a {
    move |k, c| {
        let top = k - 1 - shift;
        let mut acc = SpatialField::zeros(op.grid(), op.components());
        for j in 0..=top {
            if j >= op.coefficient_orders() {
                break;
            }
            acc.add_assign_unchecked(&op.apply(j, &c[top - j]));
        }
        if let Some(phi) = f.get(top) {
            acc.add_assign_unchecked(phi);
        }
        acc
    }
}

pub(crate) fn first_order(
    op: &dyn SpatialOperator,
    f: &TaylorField,
    u0: &SpatialField,
    policy: &TruncationPolicy,
) -> Result<TaylorField> {
    check_field(op, u0, "initial data")?;
    check_series(op, f, "forcing")?;
    drive(vec![u0.clone()], |k| k as f64, policy, f.len(), linear_bracket(op, f, 0))
}

/// `c_k = (1/k) [Σ_j A_j c_{k-1-j} + φ_{k-1}]`, `c_0 = u0`.
pub fn parabolic_coeffs(
    spec: &ParabolicScalarSpec,
    f: &TaylorField,
    u0: &SpatialField,
    policy: &TruncationPolicy,
) -> Result<TaylorField> {
    first_order(spec, f, u0, policy)
}

/// Same recurrence with the divergence-form system operator.
pub fn system_parabolic_coeffs(
    spec: &DivFormSystemSpec,
    f: &TaylorField,
    u0: &SpatialField,
    policy: &TruncationPolicy,
) -> Result<TaylorField> {
    first_order(spec, f, u0, policy)
}

pub(crate) fn nonlinear_bracket<'a>(
    pspec: &'a ParabolicScalarSpec,
    nspec: &'a NonlinearTermsSpec,
    f: &'a TaylorField,
) -> impl FnMut(usize, &[SpatialField]) -> SpatialField + 'a {
    let mut m = MSeries::new(nspec);
    let lambda = nspec.lambda();
    move |k, c| {
        // M_{k-1} needs c_0..=c_{k-1}
        while m.len() < k {
            m.push(c[m.len()].clone());
        }
        let top = k - 1;
        let mut acc = SpatialField::zeros(pspec.grid(), 1);
        for j in 0..=top {
            if j >= pspec.coefficient_orders() {
                break;
            }
            acc.add_assign_unchecked(&pspec.apply(j, &c[top - j]));
        }
        acc.sub_assign_unchecked(&m.term(top).scale(lambda));
        if let Some(phi) = f.get(top) {
            acc.add_assign_unchecked(phi);
        }
        acc
    }
}

/// Adds `-λ M(u)` to the parabolic recurrence; reduces to
/// [`parabolic_coeffs`] when `λ = 0`.
pub fn nonlinear_parabolic_coeffs(
    pspec: &ParabolicScalarSpec,
    nspec: &NonlinearTermsSpec,
    f: &TaylorField,
    u0: &SpatialField,
    policy: &TruncationPolicy,
) -> Result<TaylorField> {
    if nspec.lambda() == 0.0 {
        return parabolic_coeffs(pspec, f, u0, policy);
    }
    check_field(pspec, u0, "initial data")?;
    check_series(pspec, f, "forcing")?;
    drive(vec![u0.clone()], |k| k as f64, policy, f.len(), nonlinear_bracket(pspec, nspec, f))
}

/// `c_k = [Σ_j B_j c_{k-2-j} + φ_{k-2}] / (k(k-1))`, `c_0 = u0`, `c_1 = u1`.
/// Any [`SpatialOperator`] may play the role of `B`.
pub fn hyperbolic_coeffs(
    op: &dyn SpatialOperator,
    f: &TaylorField,
    u0: &SpatialField,
    u1: &SpatialField,
    policy: &TruncationPolicy,
) -> Result<TaylorField> {
    check_field(op, u0, "initial displacement")?;
    check_field(op, u1, "initial velocity")?;
    check_series(op, f, "forcing")?;
    drive(
        vec![u0.clone(), u1.clone()],
        |k| (k * (k - 1)) as f64,
        policy,
        f.len() + 1,
        linear_bracket(op, f, 1),
    )
}

pub(crate) fn plate_bracket<'a>(
    spec: &'a PlateSpec,
    f: &'a TaylorField,
) -> impl FnMut(usize, &[SpatialField]) -> SpatialField + 'a {
    // velocity series s_j = (j+1) c_{j+1}, its square and cube
    let mut s: Vec<SpatialField> = Vec::new();
    let mut ss: Vec<SpatialField> = Vec::new();
    move |k, c| {
        let n = k - 2;
        while s.len() <= n {
            let j = s.len();
            s.push(c[j + 1].scale((j + 1) as f64));
            let mut acc = SpatialField::zeros(spec.grid(), 1);
            for a in 0..=j {
                acc.add_assign_unchecked(&s[a].zip_with(&s[j - a], |x, y| x * y));
            }
            ss.push(acc);
        }
        let mut cube = SpatialField::zeros(spec.grid(), 1);
        for a in 0..=n {
            cube.add_assign_unchecked(&s[a].zip_with(&ss[n - a], |x, y| x * y));
        }
        let mut acc = SpatialField::zeros(spec.grid(), 1);
        acc.add_assign_unchecked(&spec.elastic_acceleration(&c[n]));
        if let Some(phi) = f.get(n) {
            acc.add_assign_unchecked(phi);
        }
        acc.sub_assign_unchecked(&c[k - 1].scale((k - 1) as f64).mul_samples(spec.alpha0()));
        acc.sub_assign_unchecked(&cube.mul_samples(spec.alpha1()));
        acc
    }
}

/// Damped plate:
/// `c_k = [φ_{k-2} - (1/ρh) A c_{k-2} - α0 (k-1) c_{k-1} - α1 q_{k-2}] / (k(k-1))`
/// where `q` is the cube of the velocity series.
pub fn plate_coeffs(
    spec: &PlateSpec,
    f: &TaylorField,
    u0: &SpatialField,
    u1: &SpatialField,
    policy: &TruncationPolicy,
) -> Result<TaylorField> {
    let op = crate::operators::PlateOperator(spec);
    check_field(&op, u0, "initial displacement")?;
    check_field(&op, u1, "initial velocity")?;
    check_series(&op, f, "forcing")?;
    drive(
        vec![u0.clone(), u1.clone()],
        |k| (k * (k - 1)) as f64,
        policy,
        f.len() + 1,
        plate_bracket(spec, f),
    )
}

/// Bracket for the stacked state `(d_k, b_k)` (six components).
pub(crate) fn maxwell_bracket<'a>(
    spec: &'a MaxwellSpec,
    g1: &'a TaylorField,
    g2: &'a TaylorField,
) -> impl FnMut(usize, &[SpatialField]) -> SpatialField + 'a {
    let damping = spec.damping();
    move |k, c| {
        let prev = &c[k - 1];
        let d = SpatialField::stack(&[prev.component_field(0), prev.component_field(1), prev.component_field(2)])
            .expect("same grid");
        let b = SpatialField::stack(&[prev.component_field(3), prev.component_field(4), prev.component_field(5)])
            .expect("same grid");
        let mut dd = curl(&b.mul_samples(spec.mu_hat())).expect("3-D grid");
        dd.sub_assign_unchecked(&d.mul_samples(&damping));
        if let Some(g) = g1.get(k - 1) {
            dd.add_assign_unchecked(g);
        }
        let mut db = curl(&d.mul_samples(spec.xi_hat())).expect("3-D grid").scale(-1.0);
        if let Some(g) = g2.get(k - 1) {
            db.add_assign_unchecked(g);
        }
        SpatialField::stack(&[dd, db]).expect("same grid")
    }
}

fn check_vector3(spec: &MaxwellSpec, u: &SpatialField, what: &str) -> Result<()> {
    if !u.grid().same_as(spec.grid()) || u.components() != 3 {
        return Err(Error::Incompatible(format!("{what} must be a 3-component field on the Maxwell grid")));
    }
    Ok(())
}

pub(crate) fn split_maxwell(stacked: TaylorField) -> Result<(TaylorField, TaylorField)> {
    let mut ds = Vec::with_capacity(stacked.len());
    let mut bs = Vec::with_capacity(stacked.len());
    for c in stacked.coeffs() {
        ds.push(SpatialField::stack(&[c.component_field(0), c.component_field(1), c.component_field(2)])?);
        bs.push(SpatialField::stack(&[c.component_field(3), c.component_field(4), c.component_field(5)])?);
    }
    Ok((TaylorField::new(ds)?, TaylorField::new(bs)?))
}

/// `d_k = (1/k)[curl(μ̂ b_{k-1}) - σ ξ̂ d_{k-1} + γ1_{k-1}]`,
/// `b_k = (1/k)[-curl(ξ̂ d_{k-1}) + γ2_{k-1}]`.
pub fn maxwell_coeffs(
    spec: &MaxwellSpec,
    g1: &TaylorField,
    g2: &TaylorField,
    d0: &SpatialField,
    b0: &SpatialField,
    policy: &TruncationPolicy,
) -> Result<(TaylorField, TaylorField)> {
    check_vector3(spec, d0, "D0")?;
    check_vector3(spec, b0, "B0")?;
    check_vector3(spec, g1.coeff(0), "G1")?;
    check_vector3(spec, g2.coeff(0), "G2")?;
    let init = SpatialField::stack(&[d0.clone(), b0.clone()])?;
    let stacked = drive(
        vec![init],
        |k| k as f64,
        policy,
        g1.len().max(g2.len()),
        maxwell_bracket(spec, g1, g2),
    )?;
    split_maxwell(stacked)
}
