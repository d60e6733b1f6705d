//! Classical time steppers on the same spatial operators, used to check the
//! series solutions in time.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::{SpatialField, TaylorField};
use crate::linalg::bicgstab;
use crate::operators::{curl, DivFormSystemSpec, MaxwellSpec, NonlinearTermsSpec, PlateSpec, SpatialOperator};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "scheme", rename_all = "snake_case")]
pub enum Scheme {
    CrankNicolson,
    ThetaMethod { theta: f64 },
    CentralDifferenceWave,
    MaxwellLeapfrog,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleConfig {
    pub scheme: Scheme,
    pub dt: f64,
    pub horizon: f64,
    /// Safety factor of the explicit stability bounds.
    #[serde(default = "default_cfl")]
    pub cfl: f64,
}

fn default_cfl() -> f64 {
    0.5
}

impl OracleConfig {
    pub fn new(scheme: Scheme, dt: f64, horizon: f64) -> Self {
        Self { scheme, dt, horizon, cfl: default_cfl() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::Spec(format!("time step must be positive, got {}", self.dt)));
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(Error::Spec(format!("horizon must be positive, got {}", self.horizon)));
        }
        if !(self.cfl > 0.0) {
            return Err(Error::Spec(format!("CFL factor must be positive, got {}", self.cfl)));
        }
        if let Scheme::ThetaMethod { theta } = self.scheme {
            if !(0.5..=1.0).contains(&theta) {
                return Err(Error::Spec(format!("θ must lie in [1/2, 1], got {theta}")));
            }
        }
        Ok(())
    }
}

/// Fields at the requested times.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshots {
    pub times: Vec<f64>,
    pub fields: Vec<SpatialField>,
}

/// One row of a Taylor-versus-oracle comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorRow {
    pub t: f64,
    pub linf: f64,
    pub l2: f64,
    pub h1: f64,
}

/// Uniform steps `T/N` with `N ≥ T/dt` chosen so every snapshot time lands
/// on a step. Returns the step, `N`, and the step index of each snapshot.
fn lattice(dt: f64, horizon: f64, times: &[f64]) -> Result<(f64, usize, Vec<usize>)> {
    for &t in times {
        if !(0.0..=horizon * (1.0 + 1e-12)).contains(&t) {
            return Err(Error::Spec(format!("snapshot time {t} lies outside [0, {horizon}]")));
        }
    }
    let base = (horizon / dt * (1.0 - 1e-12)).ceil().max(1.0) as usize;
    for n in base..=base * 64 {
        let step = horizon / n as f64;
        let idx: Vec<f64> = times.iter().map(|t| t / step).collect();
        if idx.iter().all(|x| (x - x.round()).abs() < 1e-8) {
            return Ok((step, n, idx.iter().map(|x| x.round() as usize).collect()));
        }
    }
    Err(Error::Spec(format!("no step at most {dt} puts all snapshot times {times:?} on a uniform lattice")))
}

struct Recorder {
    targets: Vec<usize>,
    fields: Vec<Option<SpatialField>>,
}

impl Recorder {
    fn new(targets: Vec<usize>) -> Self {
        let n = targets.len();
        Self { targets, fields: vec![None; n] }
    }

    fn record(&mut self, step: usize, u: &SpatialField) {
        for (i, &t) in self.targets.iter().enumerate() {
            if t == step {
                self.fields[i] = Some(u.clone());
            }
        }
    }

    fn last(&self) -> usize {
        self.targets.iter().copied().max().unwrap_or(0)
    }

    fn finish(self, times: &[f64]) -> Snapshots {
        Snapshots {
            times: times.to_vec(),
            fields: self.fields.into_iter().map(|f| f.expect("every snapshot recorded")).collect(),
        }
    }
}

fn check_data(op: &dyn SpatialOperator, u: &SpatialField, what: &str) -> Result<()> {
    if !u.grid().same_as(op.grid()) || u.components() != op.components() {
        return Err(Error::Incompatible(format!("{what} does not match the operator's grid and components")));
    }
    Ok(())
}

/// θ-method (Crank–Nicolson for `θ = 1/2`) for `u_t = A(t) u - λ M(u) + f`.
///
/// The operator is frozen at `t_n + θ dt`; each step solves
/// `(I - θ dt A) u^{n+1} = (I + (1-θ) dt A) u^n + dt f^{n+θ}` by BiCGSTAB to
/// relative residual `1e-12`. The nonlinear term, when present, is treated
/// explicitly with second-order extrapolation.
pub fn step_parabolic(
    op: &dyn SpatialOperator,
    nonlinear: Option<&NonlinearTermsSpec>,
    f: &TaylorField,
    u0: &SpatialField,
    config: &OracleConfig,
    times: &[f64],
) -> Result<Snapshots> {
    config.validate()?;
    let theta = match config.scheme {
        Scheme::CrankNicolson => 0.5,
        Scheme::ThetaMethod { theta } => theta,
        other => return Err(Error::Spec(format!("{other:?} is not a parabolic scheme"))),
    };
    check_data(op, u0, "initial data")?;
    check_data(op, f.coeff(0), "forcing")?;
    let (dt, _, targets) = lattice(config.dt, config.horizon, times)?;
    let grid = op.grid().clone();
    let ncomp = op.components();
    let mut rec = Recorder::new(targets);
    let mut u = u0.clone();
    let mut m_prev: Option<SpatialField> = None;
    rec.record(0, &u);
    for n in 0..rec.last() {
        let t = n as f64 * dt;
        let tf = t + theta * dt;
        let mut rhs = op.apply_at(tf, &u).scale((1.0 - theta) * dt);
        rhs.add_assign_unchecked(&u);
        let mut forcing = f.eval(t).scale(1.0 - theta);
        forcing.add_assign_unchecked(&f.eval(t + dt).scale(theta));
        rhs.add_assign_unchecked(&forcing.scale(dt));
        if let Some(ns) = nonlinear {
            let m_now = ns.apply_at(t, &u);
            let extrap = match &m_prev {
                Some(prev) => m_now.scale(1.0 + theta).sub(&prev.scale(theta))?,
                None => m_now.clone(),
            };
            rhs.sub_assign_unchecked(&extrap.scale(ns.lambda() * dt));
            m_prev = Some(m_now);
        }
        let apply = |x: &[f64]| -> Vec<f64> {
            let field = SpatialField::from_values(&grid, ncomp, x.to_vec()).expect("same layout");
            let ax = op.apply_at(tf, &field);
            x.iter().zip(ax.data()).map(|(xi, ai)| xi - theta * dt * ai).collect()
        };
        let (next, _) = bicgstab(apply, rhs.data(), u.data().to_vec(), 1e-12, 2000)?;
        u = SpatialField::from_values(&grid, ncomp, next)?;
        if !u.is_finite() {
            return Err(Error::BlowUp { order: n + 1, last_valid: n, reason: "oracle state is not finite".into() });
        }
        rec.record(n + 1, &u);
    }
    Ok(rec.finish(times))
}

fn explicit_step_check(dt: f64, bound: f64) -> Result<()> {
    if dt > bound {
        return Err(Error::Cfl { dt, bound });
    }
    Ok(())
}

/// Central differences in time for `u_tt = B(t) u + f`, started from
/// `u^1 = u0 + dt u1 + dt²/2 (B u0 + f(0))`.
/// Requires `dt ≤ C h / sqrt(max |a|)`.
pub fn step_wave(
    spec: &DivFormSystemSpec,
    f: &TaylorField,
    u0: &SpatialField,
    u1: &SpatialField,
    config: &OracleConfig,
    times: &[f64],
) -> Result<Snapshots> {
    config.validate()?;
    if config.scheme != Scheme::CentralDifferenceWave {
        return Err(Error::Spec(format!("{:?} is not a wave scheme", config.scheme)));
    }
    check_data(spec, u0, "initial displacement")?;
    check_data(spec, u1, "initial velocity")?;
    check_data(spec, f.coeff(0), "forcing")?;
    let (dt, _, targets) = lattice(config.dt, config.horizon, times)?;
    let h = spec.grid().min_spacing();
    explicit_step_check(dt, config.cfl * h / spec.max_principal().max(f64::MIN_POSITIVE).sqrt())?;
    let accel = |t: f64, u: &SpatialField| {
        let mut a = spec.apply_at(t, u);
        a.add_assign_unchecked(&f.eval(t));
        a
    };
    let mut rec = Recorder::new(targets);
    rec.record(0, u0);
    if rec.last() == 0 {
        return Ok(rec.finish(times));
    }
    let mut prev = u0.clone();
    let mut cur = u0.clone();
    cur.axpy(dt, u1)?;
    cur.axpy(0.5 * dt * dt, &accel(0.0, u0))?;
    rec.record(1, &cur);
    for n in 1..rec.last() {
        let mut next = cur.scale(2.0);
        next.sub_assign_unchecked(&prev);
        next.axpy(dt * dt, &accel(n as f64 * dt, &cur))?;
        prev = std::mem::replace(&mut cur, next);
        if !cur.is_finite() {
            return Err(Error::BlowUp { order: n + 1, last_valid: n, reason: "oracle state is not finite".into() });
        }
        rec.record(n + 1, &cur);
    }
    Ok(rec.finish(times))
}

/// Damped plate `u_tt = f - (1/ρh) A u - α0 u_t - α1 u_t³`.
///
/// Central differences with the linear damping taken implicitly
/// (`u_t ≈ (u^{n+1} - u^{n-1})/(2dt)`) and the cubic term explicitly from
/// the backward second-order velocity `(3u^n - 4u^{n-1} + u^{n-2})/(2dt)`.
/// Requires `dt ≤ C h² / (4 sqrt(max D_eff/ρh))`.
pub fn step_plate(
    spec: &PlateSpec,
    f: &TaylorField,
    u0: &SpatialField,
    u1: &SpatialField,
    config: &OracleConfig,
    times: &[f64],
) -> Result<Snapshots> {
    config.validate()?;
    if config.scheme != Scheme::CentralDifferenceWave {
        return Err(Error::Spec(format!("{:?} is not a wave scheme", config.scheme)));
    }
    let op = crate::operators::PlateOperator(spec);
    check_data(&op, u0, "initial displacement")?;
    check_data(&op, u1, "initial velocity")?;
    check_data(&op, f.coeff(0), "forcing")?;
    let (dt, _, targets) = lattice(config.dt, config.horizon, times)?;
    let h = spec.grid().min_spacing();
    explicit_step_check(dt, config.cfl * h * h / (4.0 * spec.max_stiffness_ratio().sqrt()))?;
    let a0 = spec.alpha0();
    let a1 = spec.alpha1();
    let cube = |v: &SpatialField| v.map(|x| x * x * x).mul_samples(a1);
    let mut rec = Recorder::new(targets);
    rec.record(0, u0);
    if rec.last() == 0 {
        return Ok(rec.finish(times));
    }
    let mut acc0 = spec.elastic_acceleration(u0);
    acc0.add_assign_unchecked(&f.eval(0.0));
    acc0.sub_assign_unchecked(&u1.mul_samples(a0));
    acc0.sub_assign_unchecked(&cube(u1));
    let mut prev2: Option<SpatialField> = None;
    let mut prev = u0.clone();
    let mut cur = u0.clone();
    cur.axpy(dt, u1)?;
    cur.axpy(0.5 * dt * dt, &acc0)?;
    rec.record(1, &cur);
    // velocity at t = dt for the first cubic evaluation
    let mut v_start = u1.clone();
    v_start.axpy(dt, &acc0)?;
    let inv_plus: Vec<f64> = a0.iter().map(|a| 1.0 / (1.0 + 0.5 * a * dt)).collect();
    let minus: Vec<f64> = a0.iter().map(|a| 1.0 - 0.5 * a * dt).collect();
    for n in 1..rec.last() {
        let velocity = match &prev2 {
            Some(p2) => {
                let mut v = cur.scale(3.0);
                v.axpy(-4.0, &prev)?;
                v.add_assign_unchecked(p2);
                v.scale(0.5 / dt)
            }
            None => v_start.clone(),
        };
        let mut force = spec.elastic_acceleration(&cur);
        force.add_assign_unchecked(&f.eval(n as f64 * dt));
        force.sub_assign_unchecked(&cube(&velocity));
        let mut next = cur.scale(2.0);
        next.sub_assign_unchecked(&prev.mul_samples(&minus));
        next.axpy(dt * dt, &force)?;
        let next = next.mul_samples(&inv_plus);
        prev2 = Some(std::mem::replace(&mut prev, std::mem::replace(&mut cur, next)));
        if !cur.is_finite() {
            return Err(Error::BlowUp { order: n + 1, last_valid: n, reason: "oracle state is not finite".into() });
        }
        rec.record(n + 1, &cur);
    }
    Ok(rec.finish(times))
}

/// Leapfrog for `D_t = curl(μ̂ B) - σ ξ̂ D + G1`, `B_t = -curl(ξ̂ D) + G2`
/// with `B` on half steps and the damping integrated exactly over each
/// step. Requires `dt ≤ C h / max sqrt(μ̂ ξ̂)`. Returns `(D, B)` snapshots.
pub fn step_maxwell(
    spec: &MaxwellSpec,
    g1: &TaylorField,
    g2: &TaylorField,
    d0: &SpatialField,
    b0: &SpatialField,
    config: &OracleConfig,
    times: &[f64],
) -> Result<(Snapshots, Snapshots)> {
    config.validate()?;
    if config.scheme != Scheme::MaxwellLeapfrog {
        return Err(Error::Spec(format!("{:?} is not the Maxwell scheme", config.scheme)));
    }
    for (u, what) in [(d0, "D0"), (b0, "B0"), (g1.coeff(0), "G1"), (g2.coeff(0), "G2")] {
        if !u.grid().same_as(spec.grid()) || u.components() != 3 {
            return Err(Error::Incompatible(format!("{what} must be a 3-component field on the Maxwell grid")));
        }
    }
    let (dt, _, targets) = lattice(config.dt, config.horizon, times)?;
    let h = spec.grid().min_spacing();
    explicit_step_check(dt, config.cfl * h / spec.max_speed())?;
    let decay: Vec<f64> = spec.damping().iter().map(|s| (-s * dt).exp()).collect();
    let gain: Vec<f64> = spec
        .damping()
        .iter()
        .map(|s| if *s * dt < 1e-8 { dt * (1.0 - 0.5 * s * dt) } else { (1.0 - (-s * dt).exp()) / s })
        .collect();
    let b_rate = |t: f64, d: &SpatialField| -> SpatialField {
        let mut r = curl(&d.mul_samples(spec.xi_hat())).expect("3-D grid").scale(-1.0);
        r.add_assign_unchecked(&g2.eval(t));
        r
    };
    let mut rd = Recorder::new(targets.clone());
    let mut rb = Recorder::new(targets);
    let mut d = d0.clone();
    rd.record(0, &d);
    rb.record(0, b0);
    let mut b_half = b0.clone();
    b_half.axpy(0.5 * dt, &b_rate(0.0, d0))?;
    for n in 0..rd.last() {
        let t_half = (n as f64 + 0.5) * dt;
        let mut drive = curl(&b_half.mul_samples(spec.mu_hat()))?;
        drive.add_assign_unchecked(&g1.eval(t_half));
        let mut next = d.mul_samples(&decay);
        next.add_assign_unchecked(&drive.mul_samples(&gain));
        d = next;
        let t = (n + 1) as f64 * dt;
        let rate = b_rate(t, &d);
        let mut b_full = b_half.clone();
        b_full.axpy(0.5 * dt, &rate)?;
        b_half.axpy(dt, &rate)?;
        if !d.is_finite() || !b_half.is_finite() {
            return Err(Error::BlowUp { order: n + 1, last_valid: n, reason: "oracle state is not finite".into() });
        }
        rd.record(n + 1, &d);
        rb.record(n + 1, &b_full);
    }
    Ok((rd.finish(times), rb.finish(times)))
}

/// Differences between the series evaluated at each snapshot time and the
/// snapshot itself.
pub fn compare(taylor: &TaylorField, snapshots: &Snapshots) -> Result<Vec<ErrorRow>> {
    snapshots
        .times
        .iter()
        .zip(&snapshots.fields)
        .map(|(&t, s)| {
            let e = taylor.eval(t).sub(s)?.norms();
            Ok(ErrorRow { t, linf: e.linf, l2: e.l2, h1: e.h1 })
        })
        .collect()
}

/// Largest `L∞` entry of a comparison table.
pub fn max_linf(rows: &[ErrorRow]) -> f64 {
    rows.iter().map(|r| r.linf).fold(0.0, f64::max)
}
