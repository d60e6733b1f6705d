//! Subcommand implementations.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use serde::Serialize;
use taylor_ibvp::dataprep;
use taylor_ibvp::operators::SpatialOperator;
use taylor_ibvp::oracle::{self, ErrorRow};
use taylor_ibvp::recurrence::{self, ResidualReport, TimeOrder};
use taylor_ibvp::{SolveReport, SpatialField, TaylorField, TruncationPolicy};

use crate::config::Config;
use crate::problem::{build, Boundary, Overrides, Problem, Setup};

/// Data of the problem actually handed to the recurrence: with a boundary
/// lift subtracted when the config has inhomogeneous boundary values.
struct Reduced {
    f: TaylorField,
    u0: SpatialField,
    u1: Option<SpatialField>,
    lift: Option<TaylorField>,
}

pub struct Solved {
    /// `u`, or `(D, B)` for Maxwell.
    pub series: Vec<TaylorField>,
    pub report: SolveReport,
    pub residual: ResidualReport,
}

fn trace(e: &Option<taylor_ibvp::Expr>) -> impl Fn(&[f64]) -> f64 + '_ {
    move |p| e.as_ref().map_or(0.0, |e| e.eval_at(p, 0.0))
}

fn reduce(
    op: &dyn SpatialOperator,
    boundary: Option<&Boundary>,
    f: &TaylorField,
    u0: &SpatialField,
    u1: Option<&SpatialField>,
) -> Result<Reduced> {
    let Some(b) = boundary else {
        return Ok(Reduced { f: f.clone(), u0: u0.clone(), u1: u1.cloned(), lift: None });
    };
    let hom = match u1 {
        None => dataprep::homogenize_parabolic(op, f, u0, &trace(&b.u0_trace), &b.data, &b.lift),
        Some(u1) => dataprep::homogenize_hyperbolic(
            op,
            f,
            u0,
            u1,
            &trace(&b.u0_trace),
            &trace(&b.u1_trace),
            &b.data,
            &b.lift,
        ),
    }
    .context("homogenizing the boundary data")?;
    Ok(Reduced { f: hom.forcing, u0: hom.u0, u1: hom.u1, lift: Some(hom.lift) })
}

fn with_lift(tilde: TaylorField, lift: &Option<TaylorField>) -> Result<TaylorField> {
    match lift {
        Some(w) => Ok(tilde.add(w)?),
        None => Ok(tilde),
    }
}

fn combine(d: &[ErrorRow], b: &[ErrorRow]) -> Vec<ErrorRow> {
    d.iter()
        .zip(b)
        .map(|(x, y)| ErrorRow { t: x.t, linf: x.linf.max(y.linf), l2: x.l2.max(y.l2), h1: x.h1.max(y.h1) })
        .collect()
}

/// Runs the recurrence, the residual check and, when configured, the
/// oracle comparison.
pub fn solve(setup: &Setup) -> Result<Solved> {
    let start = Instant::now();
    let times = &setup.snapshots;
    let policy = &setup.policy;
    let b = setup.boundary.as_ref();
    let oc = setup.oracle.as_ref();
    let mut oracle_errors = Vec::new();
    let (series, residual) = match &setup.problem {
        Problem::Parabolic { spec, nonlinear: Some(ns), f, u0 } => {
            let u = recurrence::nonlinear_parabolic_coeffs(spec, ns, f, u0, policy)?;
            let res = recurrence::nonlinear_residual(spec, ns, &u, f, times)?;
            if let Some(oc) = oc {
                let snaps = oracle::step_parabolic(spec, Some(ns), f, u0, oc, times).context("running the oracle")?;
                oracle_errors = oracle::compare(&u, &snaps)?;
            }
            (vec![u], res)
        }
        Problem::Parabolic { spec, nonlinear: None, f, u0 } => {
            let r = reduce(spec, b, f, u0, None)?;
            let tilde = recurrence::parabolic_coeffs(spec, &r.f, &r.u0, policy)?;
            let res = recurrence::residual_check(spec, TimeOrder::First, &tilde, &r.f, times)?;
            if let Some(oc) = oc {
                let snaps = oracle::step_parabolic(spec, None, &r.f, &r.u0, oc, times).context("running the oracle")?;
                oracle_errors = oracle::compare(&tilde, &snaps)?;
            }
            (vec![with_lift(tilde, &r.lift)?], res)
        }
        Problem::ParabolicSystem { spec, f, u0 } => {
            let r = reduce(spec, b, f, u0, None)?;
            let tilde = recurrence::system_parabolic_coeffs(spec, &r.f, &r.u0, policy)?;
            let res = recurrence::residual_check(spec, TimeOrder::First, &tilde, &r.f, times)?;
            if let Some(oc) = oc {
                let snaps = oracle::step_parabolic(spec, None, &r.f, &r.u0, oc, times).context("running the oracle")?;
                oracle_errors = oracle::compare(&tilde, &snaps)?;
            }
            (vec![with_lift(tilde, &r.lift)?], res)
        }
        Problem::Hyperbolic { spec, f, u0, u1 } => {
            let r = reduce(spec, b, f, u0, Some(u1))?;
            let v1 = r.u1.as_ref().expect("second-order reduction keeps u1");
            let tilde = recurrence::hyperbolic_coeffs(spec, &r.f, &r.u0, v1, policy)?;
            let res = recurrence::residual_check(spec, TimeOrder::Second, &tilde, &r.f, times)?;
            if let Some(oc) = oc {
                let snaps = oracle::step_wave(spec, &r.f, &r.u0, v1, oc, times).context("running the oracle")?;
                oracle_errors = oracle::compare(&tilde, &snaps)?;
            }
            (vec![with_lift(tilde, &r.lift)?], res)
        }
        Problem::Plate { spec, f, u0, u1 } => {
            let u = recurrence::plate_coeffs(spec, f, u0, u1, policy)?;
            let res = recurrence::plate_residual(spec, &u, f, times)?;
            if let Some(oc) = oc {
                let snaps = oracle::step_plate(spec, f, u0, u1, oc, times).context("running the oracle")?;
                oracle_errors = oracle::compare(&u, &snaps)?;
            }
            (vec![u], res)
        }
        Problem::Maxwell { spec, g1, g2, d0, b0 } => {
            let (d, bf) = recurrence::maxwell_coeffs(spec, g1, g2, d0, b0, policy)?;
            let res = recurrence::maxwell_residual(spec, &d, &bf, g1, g2, times)?;
            if let Some(oc) = oc {
                let (sd, sb) =
                    oracle::step_maxwell(spec, g1, g2, d0, b0, oc, times).context("running the oracle")?;
                oracle_errors = combine(&oracle::compare(&d, &sd)?, &oracle::compare(&bf, &sb)?);
            }
            (vec![d, bf], res)
        }
    };
    let mut report = SolveReport::new(setup.class.name(), series.clone());
    report.residual_max = residual.coefficient_max.max(residual.time_max);
    report.oracle_errors = oracle_errors;
    if setup.boundary.is_some() {
        report.notes.push("boundary data lifted; residual and oracle errors refer to the homogenized problem".into());
    }
    if let Some(r) = report.radius_estimate.usable_radius() {
        if r < setup.horizon {
            report.notes.push(format!("estimated convergence radius {r:e} is below the horizon {:e}", setup.horizon));
        }
    }
    report.wall_ms = start.elapsed().as_secs_f64() * 1e3;
    Ok(Solved { series, report, residual })
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path).with_context(|| format!("cannot create {}", path.display()))?))
}

fn write_field(dir: &Path, name: &str, field: &SpatialField) -> Result<()> {
    let mut w = create(&dir.join(name))?;
    field.write_csv(&mut w).with_context(|| format!("writing {name}"))?;
    w.flush()?;
    Ok(())
}

fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<()> {
    let mut w = create(&dir.join(name))?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn write_snapshots(dir: &Path, setup: &Setup, solved: &Solved) -> Result<()> {
    let prefixes: &[&str] = if solved.series.len() == 2 { &["d", "b"] } else { &["u"] };
    let mut index = create(&dir.join("snapshots.csv"))?;
    writeln!(index, "index,t,file")?;
    for (i, &t) in setup.snapshots.iter().enumerate() {
        for (series, prefix) in solved.series.iter().zip(prefixes) {
            let name = format!("{prefix}_t{i}.csv");
            write_field(dir, &name, &series.eval(t))?;
            writeln!(index, "{i},{t:e},{name}")?;
        }
    }
    index.flush()?;
    Ok(())
}

fn write_errors(dir: &Path, rows: &[ErrorRow]) -> Result<()> {
    let mut w = create(&dir.join("errors.csv"))?;
    writeln!(w, "t,linf,l2,h1")?;
    for r in rows {
        writeln!(w, "{:e},{:e},{:e},{:e}", r.t, r.linf, r.l2, r.h1)?;
    }
    w.flush()?;
    Ok(())
}

pub fn cmd_solve(cfg: &Config, ov: &Overrides, out: &Path) -> Result<()> {
    let setup = build(cfg, ov)?;
    let solved = solve(&setup)?;
    fs::create_dir_all(out)?;
    write_snapshots(out, &setup, &solved)?;
    write_json(out, "report.json", &solved.report)?;
    write_json(out, "residual.json", &solved.residual)?;
    Ok(())
}

pub fn cmd_compare(cfg: &Config, ov: &Overrides, out: &Path) -> Result<()> {
    let setup = build(cfg, ov)?;
    if setup.oracle.is_none() {
        bail!("compare needs an [oracle] section or --oracle and --dt");
    }
    let solved = solve(&setup)?;
    fs::create_dir_all(out)?;
    write_errors(out, &solved.report.oracle_errors)?;
    write_json(out, "report.json", &solved.report)?;
    Ok(())
}

#[derive(Serialize)]
struct ManufactureReport {
    class: String,
    order: usize,
    /// Largest relative coefficient difference after solving with the
    /// manufactured forcing.
    round_trip_error: f64,
    forcing_norms: Vec<f64>,
    solution_norms: Vec<f64>,
}

pub fn cmd_manufacture(cfg: &Config, ov: &Overrides, out: &Path) -> Result<()> {
    let setup = build(cfg, ov)?;
    let target = setup.target.as_ref().ok_or_else(|| anyhow!("manufacture needs a [manufacture] section"))?;
    if setup.boundary.is_some() {
        bail!("manufacture works on problems with zero boundary data");
    }
    let fixed = TruncationPolicy::Fixed { order: target.order() };
    let (forcing, back) = match &setup.problem {
        Problem::Parabolic { spec, nonlinear: None, .. } => {
            let f = recurrence::manufacture_rhs(spec, TimeOrder::First, target)?;
            let back = recurrence::parabolic_coeffs(spec, &f, target.coeff(0), &fixed)?;
            (f, back)
        }
        Problem::ParabolicSystem { spec, .. } => {
            let f = recurrence::manufacture_rhs(spec, TimeOrder::First, target)?;
            let back = recurrence::system_parabolic_coeffs(spec, &f, target.coeff(0), &fixed)?;
            (f, back)
        }
        Problem::Hyperbolic { spec, .. } => {
            let f = recurrence::manufacture_rhs(spec, TimeOrder::Second, target)?;
            let back = recurrence::hyperbolic_coeffs(spec, &f, target.coeff(0), target.coeff(1), &fixed)?;
            (f, back)
        }
        _ => bail!("manufacture supports the linear classes parabolic, parabolic_system and hyperbolic_system"),
    };
    fs::create_dir_all(out)?;
    for (k, c) in forcing.coeffs().iter().enumerate() {
        write_field(out, &format!("forcing_{k}.csv"), c)?;
    }
    for (k, c) in target.coeffs().iter().enumerate() {
        write_field(out, &format!("solution_{k}.csv"), c)?;
    }
    let report = ManufactureReport {
        class: setup.class.name().to_string(),
        order: target.order(),
        round_trip_error: back.max_relative_diff(target),
        forcing_norms: forcing.coeff_norms(),
        solution_norms: target.coeff_norms(),
    };
    write_json(out, "report.json", &report)?;
    Ok(())
}

pub fn cmd_study(cfg: &Config, ov: &Overrides, out: &Path) -> Result<()> {
    let study = cfg.study.clone().unwrap_or_default();
    let orders: Vec<Option<usize>> =
        if study.orders.is_empty() { vec![ov.order] } else { study.orders.iter().copied().map(Some).collect() };
    let counts: Vec<Vec<usize>> = if study.counts.is_empty() { vec![cfg.grid.counts.clone()] } else { study.counts };
    // validate every variant before the first solve
    let mut setups = Vec::new();
    for c in &counts {
        for &order in &orders {
            let o = Overrides { order, counts: Some(c.clone()), ..ov.clone() };
            setups.push(build(cfg, &o)?);
        }
    }
    fs::create_dir_all(out)?;
    let mut w = create(&out.join("study.csv"))?;
    writeln!(w, "counts,spacing,order_used,radius,residual_max,oracle_linf,oracle_l2")?;
    for setup in &setups {
        let solved = solve(setup)?;
        let r = &solved.report;
        let counts = r.grid.counts.iter().map(usize::to_string).collect::<Vec<_>>().join("x");
        let radius = r.radius_estimate.usable_radius().map_or(String::new(), |v| format!("{v:e}"));
        let (linf, l2) = if setup.oracle.is_some() {
            let linf = oracle::max_linf(&r.oracle_errors);
            let l2 = r.oracle_errors.iter().map(|e| e.l2).fold(0.0, f64::max);
            (format!("{linf:e}"), format!("{l2:e}"))
        } else {
            (String::new(), String::new())
        };
        writeln!(
            w,
            "{counts},{:e},{},{radius},{:e},{linf},{l2}",
            setup.grid.max_spacing(),
            r.order_used,
            r.residual_max
        )?;
    }
    w.flush()?;
    Ok(())
}

pub fn cmd_bump(cfg: &Config, ov: &Overrides, out: &Path) -> Result<()> {
    let setup = build(cfg, ov)?;
    let params = setup.bump.ok_or_else(|| anyhow!("bump needs a [bump] section"))?;
    let field = dataprep::bump(&params, &setup.grid)?;
    fs::create_dir_all(out)?;
    write_field(out, "bump.csv", &field)
}
