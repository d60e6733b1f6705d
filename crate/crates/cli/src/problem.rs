//! Turns a parsed configuration into operators and sampled data.
//!
//! Everything is built and checked here, before any solve starts, so a bad
//! config never fails halfway through a run.

use std::sync::Arc;

use taylor_ibvp::dataprep::{self, BoundaryData, BumpParams, LiftConfig};
use taylor_ibvp::fields::CoefficientSeries;
use taylor_ibvp::operators::PlateMaterial;
use taylor_ibvp::oracle::{OracleConfig, Scheme};
use taylor_ibvp::{
    DivFormSystemSpec, Expr, Grid, MaxwellSpec, NonlinearTermsSpec, ParabolicScalarSpec, PlateSpec, SpatialField,
    StencilOrder, TaylorField, TruncationPolicy,
};

use crate::config::{Class, Config, ConfigError, Exprs, SchemeName, SystemConfig, TruncationMode};

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub order: Option<usize>,
    pub snapshots: Option<Vec<f64>>,
    pub oracle: Option<SchemeName>,
    pub dt: Option<f64>,
    pub counts: Option<Vec<usize>>,
}

#[derive(Debug, Clone)]
pub enum Problem {
    Parabolic {
        spec: ParabolicScalarSpec,
        nonlinear: Option<NonlinearTermsSpec>,
        f: TaylorField,
        u0: SpatialField,
    },
    ParabolicSystem {
        spec: DivFormSystemSpec,
        f: TaylorField,
        u0: SpatialField,
    },
    Hyperbolic {
        spec: DivFormSystemSpec,
        f: TaylorField,
        u0: SpatialField,
        u1: SpatialField,
    },
    Plate {
        spec: PlateSpec,
        f: TaylorField,
        u0: SpatialField,
        u1: SpatialField,
    },
    Maxwell {
        spec: MaxwellSpec,
        g1: TaylorField,
        g2: TaylorField,
        d0: SpatialField,
        b0: SpatialField,
    },
}

/// Inhomogeneous boundary values and how to lift them.
#[derive(Debug, Clone)]
pub struct Boundary {
    pub data: BoundaryData,
    pub lift: LiftConfig,
    /// Initial data restricted to the boundary, for the compatibility check.
    pub u0_trace: Option<Expr>,
    pub u1_trace: Option<Expr>,
}

#[derive(Debug, Clone)]
pub struct Setup {
    pub class: Class,
    pub grid: Arc<Grid>,
    pub horizon: f64,
    pub snapshots: Vec<f64>,
    pub policy: TruncationPolicy,
    pub problem: Problem,
    pub boundary: Option<Boundary>,
    pub oracle: Option<OracleConfig>,
    pub bump: Option<BumpParams>,
    /// Manufactured target, if the config has one.
    pub target: Option<TaylorField>,
}

fn err(path: impl Into<String>, e: impl std::fmt::Display) -> ConfigError {
    ConfigError::new(path, e)
}

fn positive(path: &str, v: f64) -> Result<(), ConfigError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(err(path, format!("must be a positive number, got {v}")))
    }
}

/// Sampling context shared by every expression in one config.
struct Ctx {
    grid: Arc<Grid>,
    bump: Option<(BumpParams, SpatialField)>,
    compact: bool,
}

impl Ctx {
    fn dim(&self) -> usize {
        self.grid.dim()
    }

    fn expr(&self, path: &str, src: &str) -> Result<Expr, ConfigError> {
        let e = Expr::parse(src).map_err(|e| err(path, format!("`{src}`: {e}")))?;
        e.check_vars(self.dim(), false).map_err(|e| err(path, format!("`{src}`: {e}")))?;
        Ok(e)
    }

    fn bump_field(&self, path: &str) -> Result<&SpatialField, ConfigError> {
        self.bump
            .as_ref()
            .map(|b| &b.1)
            .ok_or_else(|| err(path, "needs a [bump] section with the transition width"))
    }

    fn bump_params(&self, path: &str) -> Result<BumpParams, ConfigError> {
        self.bump.as_ref().map(|b| b.0).ok_or_else(|| err(path, "needs a [bump] section with the transition width"))
    }

    /// A vector field, one expression per component, times the bump when
    /// the data is declared compact.
    fn field(&self, path: &str, exprs: &Exprs, ncomp: usize) -> Result<SpatialField, ConfigError> {
        let list = exprs.as_slice();
        if list.len() != ncomp {
            return Err(err(path, format!("expected {ncomp} component expression(s), got {}", list.len())));
        }
        let parts = list
            .iter()
            .enumerate()
            .map(|(c, s)| self.expr(&indexed(path, c, ncomp), s))
            .collect::<Result<Vec<_>, _>>()?;
        let field = SpatialField::from_fn(&self.grid, ncomp, |x, c| parts[c].eval_at(x, 0.0));
        if self.compact {
            let b = self.bump_field(path)?;
            return field.mul(b).map_err(|e| err(path, e));
        }
        Ok(field)
    }

    fn optional_field(&self, path: &str, exprs: Option<&Exprs>, ncomp: usize) -> Result<SpatialField, ConfigError> {
        match exprs {
            Some(e) => self.field(path, e, ncomp),
            None => Ok(SpatialField::zeros(&self.grid, ncomp)),
        }
    }

    /// One field per t-order.
    fn series(&self, path: &str, orders: &[Exprs], ncomp: usize) -> Result<TaylorField, ConfigError> {
        if orders.is_empty() {
            return Ok(TaylorField::zeros(&self.grid, ncomp, 0));
        }
        let coeffs = orders
            .iter()
            .enumerate()
            .map(|(k, e)| self.field(&format!("{path}[{k}]"), e, ncomp))
            .collect::<Result<Vec<_>, _>>()?;
        TaylorField::new(coeffs).map_err(|e| err(path, e))
    }

    /// A PDE coefficient given as its t-order expressions.
    fn coefficient(&self, path: &str, orders: &Exprs) -> Result<CoefficientSeries, ConfigError> {
        let exprs = orders
            .as_slice()
            .iter()
            .enumerate()
            .map(|(j, s)| self.expr(&format!("{path}[{j}]"), s))
            .collect::<Result<Vec<_>, _>>()?;
        if exprs.is_empty() {
            return Err(err(path, "needs at least one t-order"));
        }
        CoefficientSeries::from_exprs(&self.grid, &exprs).map_err(|e| err(path, e))
    }

    fn coefficients(&self, path: &str, list: &[Exprs], expected: usize) -> Result<Vec<CoefficientSeries>, ConfigError> {
        if list.is_empty() {
            return Ok(vec![CoefficientSeries::zero(&self.grid); expected]);
        }
        if list.len() != expected {
            return Err(err(path, format!("expected {expected} coefficients, got {}", list.len())));
        }
        list.iter().enumerate().map(|(i, e)| self.coefficient(&format!("{path}[{i}]"), e)).collect()
    }
}

fn indexed(path: &str, c: usize, ncomp: usize) -> String {
    if ncomp == 1 {
        path.to_string()
    } else {
        format!("{path}[{c}]")
    }
}

fn build_grid(cfg: &Config, counts: &[usize]) -> Result<Arc<Grid>, ConfigError> {
    cfg.domain.validate().map_err(|e| err("domain", e))?;
    let dim = cfg.domain.dim();
    if counts.len() != dim {
        return Err(err("grid.counts", format!("expected {dim} entries for a {dim}-D domain, got {}", counts.len())));
    }
    let stencil = StencilOrder::from_int(cfg.grid.stencil_order).map_err(|e| err("grid.stencil_order", e))?;
    let (lo, hi) = cfg.domain.bounding_box();
    let lower = cfg.grid.lower.clone().unwrap_or(lo);
    let upper = cfg.grid.upper.clone().unwrap_or(hi);
    Grid::uniform_with_stencil(&cfg.domain, &lower, &upper, counts, stencil).map_err(|e| err("grid", e))
}

fn build_policy(cfg: &Config, ov: &Overrides) -> Result<TruncationPolicy, ConfigError> {
    let t = &cfg.truncation;
    let policy = match (ov.order, t.mode) {
        (Some(order), _) => TruncationPolicy::Fixed { order },
        (None, TruncationMode::Fixed) => TruncationPolicy::Fixed {
            order: t.order.ok_or_else(|| err("truncation.order", "required in fixed mode"))?,
        },
        (None, TruncationMode::Adaptive) => {
            TruncationPolicy::Adaptive { tolerance: t.tolerance, max_order: t.max_order, horizon: cfg.horizon }
        }
    };
    policy.validate().map_err(|e| err("truncation", e))?;
    Ok(policy)
}

fn build_snapshots(cfg: &Config, ov: &Overrides) -> Result<Vec<f64>, ConfigError> {
    let t = cfg.horizon;
    let times = ov
        .snapshots
        .clone()
        .or_else(|| cfg.snapshots.clone())
        .unwrap_or_else(|| (0..=4).map(|i| t * i as f64 / 4.0).collect());
    if times.is_empty() {
        return Err(err("snapshots", "at least one snapshot time is required"));
    }
    for (i, &s) in times.iter().enumerate() {
        if !(0.0..=t).contains(&s) {
            return Err(err(format!("snapshots[{i}]"), format!("time {s} lies outside [0, {t}]")));
        }
    }
    Ok(times)
}

fn build_oracle(cfg: &Config, ov: &Overrides) -> Result<Option<OracleConfig>, ConfigError> {
    let section = cfg.oracle.as_ref();
    let Some(name) = ov.oracle.or(section.map(|s| s.scheme)) else {
        return Ok(None);
    };
    let dt = ov.dt.or(section.map(|s| s.dt)).ok_or_else(|| err("oracle.dt", "a time step is required"))?;
    let theta = section.and_then(|s| s.theta);
    let scheme = match name {
        SchemeName::CrankNicolson => Scheme::CrankNicolson,
        SchemeName::ThetaMethod => {
            Scheme::ThetaMethod { theta: theta.ok_or_else(|| err("oracle.theta", "required by theta_method"))? }
        }
        SchemeName::CentralDifferenceWave => Scheme::CentralDifferenceWave,
        SchemeName::MaxwellLeapfrog => Scheme::MaxwellLeapfrog,
    };
    let fits = match cfg.class {
        Class::Parabolic | Class::ParabolicSystem | Class::ParabolicNonlinear => {
            matches!(scheme, Scheme::CrankNicolson | Scheme::ThetaMethod { .. })
        }
        Class::HyperbolicSystem | Class::Plate => scheme == Scheme::CentralDifferenceWave,
        Class::Maxwell => scheme == Scheme::MaxwellLeapfrog,
    };
    if !fits {
        return Err(err("oracle.scheme", format!("{name:?} does not apply to class {}", cfg.class.name())));
    }
    let mut oc = OracleConfig::new(scheme, dt, cfg.horizon);
    if let Some(cfl) = section.and_then(|s| s.cfl) {
        oc.cfl = cfl;
    }
    oc.validate().map_err(|e| err("oracle", e))?;
    Ok(Some(oc))
}

fn section<'a, T>(v: &'a Option<T>, name: &str, class: Class) -> Result<&'a T, ConfigError> {
    v.as_ref().ok_or_else(|| err(name, format!("section is required for class {}", class.name())))
}

fn build_parabolic(cfg: &Config, ctx: &Ctx) -> Result<ParabolicScalarSpec, ConfigError> {
    let p = section(&cfg.parabolic, "parabolic", cfg.class)?;
    let n = ctx.dim();
    if p.second.len() != n * n {
        return Err(err("parabolic.second", format!("expected {} entries (row-major n×n), got {}", n * n, p.second.len())));
    }
    let second = ctx.coefficients("parabolic.second", &p.second, n * n)?;
    let first = ctx.coefficients("parabolic.first", &p.first, n)?;
    let zeroth = match &p.zeroth {
        Some(e) => ctx.coefficient("parabolic.zeroth", e)?,
        None => CoefficientSeries::zero(&ctx.grid),
    };
    ParabolicScalarSpec::new(&ctx.grid, second, first, zeroth, p.mu).map_err(|e| err("parabolic", e))
}

fn build_nonlinear(cfg: &Config, ctx: &Ctx) -> Result<NonlinearTermsSpec, ConfigError> {
    let nl = section(&cfg.nonlinear, "nonlinear", cfg.class)?;
    let n = ctx.dim();
    let b0 = match &nl.b0 {
        Some(e) => ctx.coefficient("nonlinear.b0", e)?,
        None => CoefficientSeries::zero(&ctx.grid),
    };
    let b1 = ctx.coefficients("nonlinear.b1", &nl.b1, n)?;
    let b2 = ctx.coefficients("nonlinear.b2", &nl.b2, n * n)?;
    NonlinearTermsSpec::new(&ctx.grid, b0, b1, b2, nl.lambda).map_err(|e| err("nonlinear", e))
}

fn build_system(s: &SystemConfig, ctx: &Ctx) -> Result<DivFormSystemSpec, ConfigError> {
    let (nc, n) = (s.components, ctx.dim());
    if nc == 0 {
        return Err(err("system.components", "must be at least 1"));
    }
    let check = |path: String, idx: &[(usize, usize, &str)]| -> Result<String, ConfigError> {
        for &(v, bound, name) in idx {
            if v >= bound {
                return Err(err(path, format!("index {name} = {v} is out of range 0..{bound}")));
            }
        }
        Ok(path)
    };
    let mut spec = match &s.diagonal {
        Some(e) => DivFormSystemSpec::diagonal(&ctx.grid, nc, &ctx.coefficient("system.diagonal", e)?, s.mu),
        None => DivFormSystemSpec::zero(&ctx.grid, nc, s.mu),
    };
    for (k, t) in s.a.iter().enumerate() {
        let p = check(format!("system.a[{k}]"), &[(t.i, nc, "i"), (t.j, nc, "j"), (t.r, n, "r"), (t.m, n, "m")])?;
        spec = spec.with_a(t.i, t.j, t.r, t.m, ctx.coefficient(&format!("{p}.orders"), &t.orders)?);
    }
    for (k, t) in s.b.iter().enumerate() {
        let p = check(format!("system.b[{k}]"), &[(t.i, nc, "i"), (t.j, nc, "j"), (t.m, n, "m")])?;
        spec = spec.with_b(t.i, t.j, t.m, ctx.coefficient(&format!("{p}.orders"), &t.orders)?);
    }
    for (k, t) in s.g.iter().enumerate() {
        let p = check(format!("system.g[{k}]"), &[(t.i, nc, "i"), (t.j, nc, "j")])?;
        spec = spec.with_g(t.i, t.j, ctx.coefficient(&format!("{p}.orders"), &t.orders)?);
    }
    spec.validate().map_err(|e| err("system", e))?;
    Ok(spec)
}

fn build_plate(cfg: &Config, ctx: &Ctx) -> Result<PlateSpec, ConfigError> {
    let p = section(&cfg.plate, "plate", cfg.class)?;
    let thickness = ctx.expr("plate.thickness", &p.thickness)?;
    let material = PlateMaterial {
        e1: p.e1,
        e2: p.e2,
        shear: p.shear,
        mu1: p.mu1,
        mu2: p.mu2,
        density: p.density,
        a0: p.a0,
        a1: p.a1,
    };
    let [lo, hi] = p.thickness_bounds;
    PlateSpec::new(&ctx.grid, material, |x| thickness.eval_at(x, 0.0), (lo, hi)).map_err(|e| err("plate", e))
}

fn build_maxwell(cfg: &Config, ctx: &Ctx) -> Result<Problem, ConfigError> {
    let m = section(&cfg.maxwell, "maxwell", cfg.class)?;
    let mu = ctx.expr("maxwell.mu_hat", &m.mu_hat)?;
    let xi = ctx.expr("maxwell.xi_hat", &m.xi_hat)?;
    let sigma = ctx.expr("maxwell.sigma", &m.sigma)?;
    let spec = MaxwellSpec::new(
        &ctx.grid,
        |x| mu.eval_at(x, 0.0),
        |x| xi.eval_at(x, 0.0),
        |x| sigma.eval_at(x, 0.0),
        [None; 3],
    )
    .map_err(|e| err("maxwell", e))?;
    let d = &cfg.data;
    let potential = |path: &str, p: &Option<[String; 3]>| -> Result<SpatialField, ConfigError> {
        match p {
            None => Ok(SpatialField::zeros(&ctx.grid, 3)),
            Some(list) => {
                let exprs = potential_exprs(ctx, path, list)?;
                dataprep::divfree_data(&exprs, &ctx.bump_params(path)?, &ctx.grid).map_err(|e| err(path, e))
            }
        }
    };
    let d0 = potential("data.d0_potential", &d.d0_potential)?;
    let b0 = potential("data.b0_potential", &d.b0_potential)?;
    let g1 = ctx.series(
        "data.g1",
        &d.g1.iter().map(|g| Exprs::Many(g.to_vec())).collect::<Vec<_>>(),
        3,
    )?;
    let g2 = if d.g2_potential.is_empty() {
        TaylorField::zeros(&ctx.grid, 3, 0)
    } else {
        let coeffs = d
            .g2_potential
            .iter()
            .enumerate()
            .map(|(k, p)| {
                let path = format!("data.g2_potential[{k}]");
                let exprs = potential_exprs(ctx, &path, p)?;
                dataprep::divfree_data(&exprs, &ctx.bump_params(&path)?, &ctx.grid).map_err(|e| err(&path, e))
            })
            .collect::<Result<Vec<_>, _>>()?;
        TaylorField::new(coeffs).map_err(|e| err("data.g2_potential", e))?
    };
    Ok(Problem::Maxwell { spec, g1, g2, d0, b0 })
}

fn potential_exprs(ctx: &Ctx, path: &str, list: &[String; 3]) -> Result<[Expr; 3], ConfigError> {
    let [a, b, c] = list;
    Ok([
        ctx.expr(&format!("{path}[0]"), a)?,
        ctx.expr(&format!("{path}[1]"), b)?,
        ctx.expr(&format!("{path}[2]"), c)?,
    ])
}

fn build_boundary(cfg: &Config, ctx: &Ctx, ncomp: usize) -> Result<Option<Boundary>, ConfigError> {
    let d = &cfg.data;
    let data = match (&d.ub, &d.ub_series) {
        (None, None) => return Ok(None),
        (Some(_), Some(_)) => return Err(err("data.ub_series", "give either ub or ub_series, not both")),
        (Some(src), None) => {
            let e = Expr::parse(src).map_err(|e| err("data.ub", format!("`{src}`: {e}")))?;
            BoundaryData::Expression(e)
        }
        (None, Some(list)) => BoundaryData::Series(
            list.iter()
                .enumerate()
                .map(|(k, s)| Expr::parse(s).map_err(|e| err(format!("data.ub_series[{k}]"), format!("`{s}`: {e}"))))
                .collect::<Result<_, _>>()?,
        ),
    };
    data.validate(ctx.dim()).map_err(|e| err("data.ub", e))?;
    if data.is_zero() {
        return Ok(None);
    }
    match cfg.class {
        Class::Parabolic | Class::HyperbolicSystem => {}
        Class::ParabolicSystem => {}
        other => {
            return Err(err("data.ub", format!("inhomogeneous boundary data is not supported for class {}", other.name())))
        }
    }
    if ncomp != 1 {
        return Err(err("data.ub", "boundary lifts are scalar; the problem has more than one component"));
    }
    let width = d.lift_width.ok_or_else(|| err("data.lift_width", "required with boundary data"))?;
    positive("data.lift_width", width)?;
    // compact initial data vanishes on the boundary
    let trace = |e: &Option<Exprs>, path: &str| -> Result<Option<Expr>, ConfigError> {
        match e {
            Some(list) if !d.compact => Ok(Some(ctx.expr(path, &list.as_slice()[0])?)),
            _ => Ok(None),
        }
    };
    Ok(Some(Boundary {
        data,
        lift: LiftConfig { width, order: d.lift_order, horizon: cfg.horizon },
        u0_trace: trace(&d.u0, "data.u0")?,
        u1_trace: trace(&d.u1, "data.u1")?,
    }))
}

/// Builds and validates everything needed to run the configured problem.
pub fn build(cfg: &Config, ov: &Overrides) -> Result<Setup, ConfigError> {
    positive("horizon", cfg.horizon)?;
    let counts = ov.counts.clone().unwrap_or_else(|| cfg.grid.counts.clone());
    let grid = build_grid(cfg, &counts)?;
    let bump = match cfg.bump {
        Some(params) => {
            let field = dataprep::bump(&params, &grid).map_err(|e| err("bump.width", e))?;
            Some((params, field))
        }
        None => None,
    };
    let ctx = Ctx { grid: grid.clone(), bump, compact: cfg.data.compact };
    let policy = build_policy(cfg, ov)?;
    let snapshots = build_snapshots(cfg, ov)?;
    let oracle = build_oracle(cfg, ov)?;
    let d = &cfg.data;
    let (problem, ncomp) = match cfg.class {
        Class::Parabolic | Class::ParabolicNonlinear => {
            let spec = build_parabolic(cfg, &ctx)?;
            let nonlinear = match cfg.class {
                Class::ParabolicNonlinear => Some(build_nonlinear(cfg, &ctx)?),
                _ => None,
            };
            let f = ctx.series("data.f", &d.f, 1)?;
            let u0 = ctx.optional_field("data.u0", d.u0.as_ref(), 1)?;
            (Problem::Parabolic { spec, nonlinear, f, u0 }, 1)
        }
        Class::ParabolicSystem | Class::HyperbolicSystem => {
            let s = section(&cfg.system, "system", cfg.class)?;
            let spec = build_system(s, &ctx)?;
            let nc = s.components;
            let f = ctx.series("data.f", &d.f, nc)?;
            let u0 = ctx.optional_field("data.u0", d.u0.as_ref(), nc)?;
            let problem = if cfg.class == Class::ParabolicSystem {
                Problem::ParabolicSystem { spec, f, u0 }
            } else {
                let u1 = ctx.optional_field("data.u1", d.u1.as_ref(), nc)?;
                Problem::Hyperbolic { spec, f, u0, u1 }
            };
            (problem, nc)
        }
        Class::Plate => {
            let spec = build_plate(cfg, &ctx)?;
            let f = ctx.series("data.f", &d.f, 1)?;
            let u0 = ctx.optional_field("data.u0", d.u0.as_ref(), 1)?;
            let u1 = ctx.optional_field("data.u1", d.u1.as_ref(), 1)?;
            (Problem::Plate { spec, f, u0, u1 }, 1)
        }
        Class::Maxwell => (build_maxwell(cfg, &ctx)?, 6),
    };
    let boundary = build_boundary(cfg, &ctx, ncomp)?;
    let target = match &cfg.manufacture {
        Some(m) => {
            if m.solution.len() < 3 {
                return Err(err("manufacture.solution", "needs at least three t-orders"));
            }
            Some(ctx.series("manufacture.solution", &m.solution, ncomp)?)
        }
        None => None,
    };
    Ok(Setup {
        class: cfg.class,
        grid,
        horizon: cfg.horizon,
        snapshots,
        policy,
        problem,
        boundary,
        oracle,
        bump: ctx.bump.map(|b| b.0),
        target,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse;

    const WAVE: &str = r#"
class = "hyperbolic_system"
horizon = 0.05

[domain]
kind = "box"
lower = [0.0, 0.0]
upper = [1.0, 1.0]

[grid]
counts = [21, 21]

[bump]
width = 0.1

[system]
components = 2
mu = 1.0
diagonal = ["1 + 0.1*x1"]
b = [{ i = 0, j = 1, m = 0, orders = ["0.5"] }]

[data]
compact = true
u0 = ["x1*x2", "1"]
"#;

    #[test]
    fn builds_a_wave_system() {
        let setup = build(&parse(WAVE).unwrap(), &Overrides::default()).unwrap();
        let quarters: Vec<f64> = (0..=4).map(|i| 0.05 * i as f64 / 4.0).collect();
        assert_eq!(setup.snapshots, quarters);
        assert_eq!(setup.snapshots[4], 0.05);
        let Problem::Hyperbolic { u0, u1, .. } = &setup.problem else { panic!("wrong class") };
        assert_eq!(u0.components(), 2);
        assert_eq!(u1.linf(), 0.0);
        // compact data vanishes next to the boundary
        assert_eq!(u0.value(setup.grid.nearest_index(&[0.05, 0.5]), 1), 0.0);
        assert_eq!(u0.value(setup.grid.nearest_index(&[0.5, 0.5]), 1), 1.0);
    }

    #[test]
    fn semantic_errors_carry_paths() {
        let case = |from: &str, to: &str| build(&parse(&WAVE.replace(from, to)).unwrap(), &Overrides::default()).unwrap_err();
        assert_eq!(case("i = 0, j = 1", "i = 0, j = 2").path, "system.b[0]");
        assert_eq!(case("\"x1*x2\"", "\"x1*x3\"").path, "data.u0[0]");
        assert_eq!(case("\"x1*x2\"", "\"x1*(x2\"").path, "data.u0[0]");
        assert_eq!(case("counts = [21, 21]", "counts = [21]").path, "grid.counts");
        assert_eq!(case("width = 0.1", "width = 0.4").path, "bump.width");
        assert_eq!(case("horizon = 0.05", "horizon = -1.0").path, "horizon");
        let e = case("[bump]\nwidth = 0.1\n", "");
        assert_eq!(e.path, "data.u0");
        let e = case("class = \"hyperbolic_system\"", "class = \"plate\"");
        assert_eq!(e.path, "plate");
    }

    #[test]
    fn overrides_take_precedence() {
        let cfg = parse(WAVE).unwrap();
        let ov = Overrides { order: Some(7), snapshots: Some(vec![0.01]), ..Default::default() };
        let setup = build(&cfg, &ov).unwrap();
        assert_eq!(setup.policy, TruncationPolicy::Fixed { order: 7 });
        assert_eq!(setup.snapshots, vec![0.01]);
        let ov = Overrides { snapshots: Some(vec![0.1]), ..Default::default() };
        assert_eq!(build(&cfg, &ov).unwrap_err().path, "snapshots[0]");
        let ov = Overrides { oracle: Some(SchemeName::CrankNicolson), dt: Some(1e-3), ..Default::default() };
        assert_eq!(build(&cfg, &ov).unwrap_err().path, "oracle.scheme");
    }
}
