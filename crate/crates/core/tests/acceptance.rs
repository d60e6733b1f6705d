//! Acceptance criteria AC-1 to AC-10, run in sequence. Each prints one
//! PASS/FAIL line with the measured quantity and its runtime; the process
//! exits non-zero when any criterion fails.

use std::f64::consts::PI;
use std::io::Write;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use taylor_ibvp::dataprep::{self, BoundaryData, BumpParams, LiftConfig};
use taylor_ibvp::expr::Expr;
use taylor_ibvp::fields::{CoefficientSeries, Grid, SpatialField, StencilOrder, TaylorField};
use taylor_ibvp::geometry::Domain;
use taylor_ibvp::operators::{
    curl, div, DivFormSystemSpec, MaxwellSpec, NonlinearTermsSpec, ParabolicScalarSpec, PlateMaterial, PlateOperator,
    PlateSpec, SpatialOperator,
};
use taylor_ibvp::oracle::{self, OracleConfig, Scheme, Snapshots};
use taylor_ibvp::recurrence::{
    hyperbolic_coeffs, manufacture_rhs, maxwell_coeffs, nonlinear_parabolic_coeffs, parabolic_coeffs, plate_coeffs,
    radius_estimate, residual_check, system_parabolic_coeffs, SolveReport, TimeOrder, TruncationPolicy,
};

type Check = Result<(bool, String), String>;

fn line_grid(n: usize, stencil: StencilOrder) -> Arc<Grid> {
    Grid::uniform_with_stencil(&Domain::unit_box(1), &[0.0], &[1.0], &[n], stencil).unwrap()
}

fn square_grid(n: usize) -> Arc<Grid> {
    Grid::uniform(&Domain::unit_box(2), &[0.0, 0.0], &[1.0, 1.0], &[n, n]).unwrap()
}

fn rel(got: &SpatialField, want: &SpatialField) -> f64 {
    let s = want.linf();
    let d = got.max_abs_diff(want);
    if s > 0.0 {
        d / s
    } else {
        d
    }
}

fn snapshot_times(horizon: f64) -> Vec<f64> {
    (0..=4).map(|i| horizon * i as f64 / 4.0).collect()
}

/// Largest `‖series(t) - snapshot‖_∞ / ‖snapshot‖_∞` over the snapshots.
fn worst_relative(series: &TaylorField, snaps: &Snapshots) -> f64 {
    snaps
        .times
        .iter()
        .zip(&snaps.fields)
        .map(|(&t, s)| rel(&series.eval(t), s))
        .fold(0.0, f64::max)
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

fn binomial(n: usize, k: usize) -> f64 {
    factorial(n) / (factorial(k) * factorial(n - k))
}

/// A few random sinusoids; smooth, bounded by the sum of amplitudes.
struct Waves(Vec<(f64, [f64; 3], f64)>);

impl Waves {
    fn new(rng: &mut ChaCha8Rng, amplitude: f64) -> Self {
        Waves(
            (0..3)
                .map(|_| {
                    let freq = [rng.gen_range(-4.0..4.0), rng.gen_range(-4.0..4.0), rng.gen_range(-4.0..4.0)];
                    (amplitude * rng.gen_range(-1.0..1.0) / 3.0, freq, rng.gen_range(0.0..2.0 * PI))
                })
                .collect(),
        )
    }

    fn at(&self, x: &[f64]) -> f64 {
        self.0
            .iter()
            .map(|(a, k, p)| a * (x.iter().zip(k).map(|(xi, ki)| xi * ki).sum::<f64>() + p).sin())
            .sum()
    }
}

fn random_series(rng: &mut ChaCha8Rng, g: &Arc<Grid>, base: f64, amplitude: f64, orders: usize) -> CoefficientSeries {
    let waves: Vec<Waves> = (0..orders).map(|_| Waves::new(rng, amplitude)).collect();
    CoefficientSeries::from_fn(g, orders, |x, j| if j == 0 { base } else { 0.0 } + waves[j].at(x))
}

fn random_field(rng: &mut ChaCha8Rng, g: &Arc<Grid>, ncomp: usize) -> SpatialField {
    let values = (0..ncomp * g.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
    SpatialField::from_values(g, ncomp, values).unwrap()
}

fn random_taylor(rng: &mut ChaCha8Rng, g: &Arc<Grid>, ncomp: usize, len: usize) -> TaylorField {
    TaylorField::new((0..len).map(|_| random_field(rng, g, ncomp)).collect()).unwrap()
}

fn ac1() -> Check {
    let g = line_grid(201, StencilOrder::Fourth);
    let a11 = CoefficientSeries::from_fn(&g, 3, |x, j| {
        let s = x[0] * x[0];
        [1.0 + s, 0.5 * s, 0.25 * s][j]
    });
    let z = CoefficientSeries::zero(&g);
    let spec = ParabolicScalarSpec::new(&g, vec![a11], vec![z.clone()], z, 0.5).map_err(|e| e.to_string())?;
    let shape = dataprep::bump(&BumpParams::new(0.1), &g)
        .map_err(|e| e.to_string())?
        .mul_samples(&(0..g.len()).map(|i| 1.0 + g.point(i)[0]).collect::<Vec<_>>());
    let poly = [1.0, -0.5, 0.75, 0.3, -0.2, 0.1, 0.05];
    let target = TaylorField::new(poly.iter().map(|p| shape.scale(*p)).collect()).unwrap();
    let f = manufacture_rhs(&spec, TimeOrder::First, &target).map_err(|e| e.to_string())?;
    let back = parabolic_coeffs(&spec, &f, target.coeff(0), &TruncationPolicy::Fixed { order: 6 })
        .map_err(|e| e.to_string())?;
    let err = back.max_relative_diff(&target);
    Ok((err <= 1e-11, format!("max relative coefficient error {err:.3e} (tolerance 1e-11)")))
}

fn ac2() -> Check {
    let g = line_grid(201, StencilOrder::Fourth);
    let spec = ParabolicScalarSpec::laplacian(&g);
    let pulse = dataprep::smooth_compact(
        &Expr::parse("exp(-100*(x1 - 0.5)^2)").unwrap(),
        &BumpParams::new(0.1),
        &g,
    )
    .map_err(|e| e.to_string())?;
    let horizon = 0.05;
    let f = TaylorField::zeros(&g, 1, 0);
    let policy = TruncationPolicy::Adaptive { tolerance: 1e-10, max_order: 400, horizon };
    let series = match parabolic_coeffs(&spec, &f, &pulse, &policy) {
        Ok(s) => s,
        Err(e) => return Ok((false, format!("series generation failed: {e}"))),
    };
    let times = snapshot_times(horizon);
    let cn = |dt: f64| {
        oracle::step_parabolic(&spec, None, &f, &pulse, &OracleConfig::new(Scheme::CrankNicolson, dt, horizon), &times)
            .map_err(|e| e.to_string())
    };
    let coarse = cn(1e-5)?;
    let fine = cn(5e-6)?;
    let abs = |s: &Snapshots| oracle::max_linf(&oracle::compare(&series, s).unwrap());
    let (e1, e2) = (abs(&coarse), abs(&fine));
    Ok((
        e1 <= 5e-5 && e2 <= e1,
        format!("order {} ; L∞ vs CN dt=1e-5: {e1:.3e}, dt=5e-6: {e2:.3e} (tolerance 5e-5)", series.order()),
    ))
}

/// Literal derivative-form recurrences against the normalized ones.
fn ac3() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0xAC3);
    let g = square_grid(41);
    let orders = 10;
    let mut worst = 0.0f64;
    let mut parts = Vec::new();

    // scalar parabolic
    let second = vec![
        random_series(&mut rng, &g, 1.0, 0.2, 3),
        random_series(&mut rng, &g, 0.0, 0.05, 1),
        random_series(&mut rng, &g, 0.0, 0.05, 1),
        random_series(&mut rng, &g, 1.0, 0.2, 3),
    ];
    let second = vec![second[0].clone(), second[1].clone(), second[1].clone(), second[3].clone()];
    let first = vec![random_series(&mut rng, &g, 0.0, 1.0, 3), random_series(&mut rng, &g, 0.0, 1.0, 3)];
    let zeroth = random_series(&mut rng, &g, 0.0, 1.0, 3);
    let spec = ParabolicScalarSpec::new(&g, second, first, zeroth, 0.4).map_err(|e| e.to_string())?;
    let u0 = random_field(&mut rng, &g, 1);
    let f = random_taylor(&mut rng, &g, 1, orders);
    let c = parabolic_coeffs(&spec, &f, &u0, &TruncationPolicy::Fixed { order: orders }).map_err(|e| e.to_string())?;
    let e = first_order_raw(&spec, &f, &u0, &c, orders);
    parts.push(format!("parabolic {e:.1e}"));
    worst = worst.max(e);

    // divergence-form system, two components
    let mut sys = DivFormSystemSpec::zero(&g, 2, 0.3);
    for i in 0..2 {
        for r in 0..2 {
            sys = sys.with_a(i, i, r, r, random_series(&mut rng, &g, 1.0, 0.2, 3));
        }
        sys = sys.with_a(i, 1 - i, 0, 1, random_series(&mut rng, &g, 0.0, 0.05, 2));
        for j in 0..2 {
            for m in 0..2 {
                sys = sys.with_b(i, j, m, random_series(&mut rng, &g, 0.0, 0.5, 2));
            }
            sys = sys.with_g(i, j, random_series(&mut rng, &g, 0.0, 0.5, 3));
        }
    }
    let u0 = random_field(&mut rng, &g, 2);
    let u1 = random_field(&mut rng, &g, 2);
    let f = random_taylor(&mut rng, &g, 2, orders);
    let c = system_parabolic_coeffs(&sys, &f, &u0, &TruncationPolicy::Fixed { order: orders })
        .map_err(|e| e.to_string())?;
    let e = first_order_raw(&sys, &f, &u0, &c, orders);
    parts.push(format!("system {e:.1e}"));
    worst = worst.max(e);

    // second order in time with the same operator
    let c = hyperbolic_coeffs(&sys, &f, &u0, &u1, &TruncationPolicy::Fixed { order: orders })
        .map_err(|e| e.to_string())?;
    let mut raw = vec![u0.clone(), u1.clone()];
    for k in 2..=orders {
        let n = k - 2;
        let mut acc = f.coeff(n).scale(factorial(n));
        for j in 0..=n.min(sys.coefficient_orders().saturating_sub(1)) {
            let term = sys.apply(j, &raw[n - j]).scale(binomial(n, j) * factorial(j));
            acc = acc.add(&term).unwrap();
        }
        raw.push(acc);
    }
    let e = (0..=orders).map(|k| rel(&raw[k].scale(1.0 / factorial(k)), c.coeff(k))).fold(0.0, f64::max);
    parts.push(format!("hyperbolic {e:.1e}"));
    worst = worst.max(e);

    // Maxwell needs a 3-D grid: a 41 x 41 slab, 9 nodes thick
    let g3 = Grid::uniform(
        &Domain::box_polytope(&[0.0, 0.0, 0.0], &[1.0, 1.0, 0.2]),
        &[0.0, 0.0, 0.0],
        &[1.0, 1.0, 0.2],
        &[41, 41, 9],
    )
    .map_err(|e| e.to_string())?;
    let (wm, wx, ws) = (Waves::new(&mut rng, 0.3), Waves::new(&mut rng, 0.3), Waves::new(&mut rng, 0.3));
    let mx = MaxwellSpec::new(&g3, |x| 1.0 + wm.at(x), |x| 1.0 + wx.at(x), |x| 0.5 + ws.at(x).abs(), [None; 3])
        .map_err(|e| e.to_string())?;
    let d0 = random_field(&mut rng, &g3, 3);
    let b0 = random_field(&mut rng, &g3, 3);
    let g1 = random_taylor(&mut rng, &g3, 3, orders);
    let g2 = random_taylor(&mut rng, &g3, 3, orders);
    let (d, b) = maxwell_coeffs(&mx, &g1, &g2, &d0, &b0, &TruncationPolicy::Fixed { order: orders })
        .map_err(|e| e.to_string())?;
    let damping: Vec<f64> = mx.sigma().iter().zip(mx.xi_hat()).map(|(s, x)| s * x).collect();
    let (mut rd, mut rb) = (vec![d0], vec![b0]);
    for k in 1..=orders {
        let w = factorial(k - 1);
        let dk = curl(&rb[k - 1].mul_samples(mx.mu_hat()))
            .unwrap()
            .sub(&rd[k - 1].mul_samples(&damping))
            .unwrap()
            .add(&g1.coeff(k - 1).scale(w))
            .unwrap();
        let bk = g2.coeff(k - 1).scale(w).sub(&curl(&rd[k - 1].mul_samples(mx.xi_hat())).unwrap()).unwrap();
        rd.push(dk);
        rb.push(bk);
    }
    let e = (0..=orders)
        .map(|k| {
            let s = 1.0 / factorial(k);
            rel(&rd[k].scale(s), d.coeff(k)).max(rel(&rb[k].scale(s), b.coeff(k)))
        })
        .fold(0.0, f64::max);
    parts.push(format!("maxwell {e:.1e}"));
    worst = worst.max(e);

    Ok((worst <= 1e-12, format!("max relative difference {worst:.3e} ({}) tolerance 1e-12", parts.join(", "))))
}

/// `D_k = Σ_j C(k-1, j) ∂^j A · D_{k-1-j} + ∂^{k-1} f`, compared as `D_k / k!`.
fn first_order_raw(op: &dyn SpatialOperator, f: &TaylorField, u0: &SpatialField, c: &TaylorField, m: usize) -> f64 {
    let mut raw = vec![u0.clone()];
    for k in 1..=m {
        let n = k - 1;
        let mut acc = f.coeff(n).scale(factorial(n));
        for j in 0..=n.min(op.coefficient_orders().saturating_sub(1)) {
            let term = op.apply(j, &raw[n - j]).scale(binomial(n, j) * factorial(j));
            acc = acc.add(&term).unwrap();
        }
        raw.push(acc);
    }
    (0..=m).map(|k| rel(&raw[k].scale(1.0 / factorial(k)), c.coeff(k))).fold(0.0, f64::max)
}

fn ac4() -> Check {
    let g = line_grid(21, StencilOrder::Second);
    let spec = ParabolicScalarSpec::new(
        &g,
        vec![CoefficientSeries::constant(&g, 1.0)],
        vec![CoefficientSeries::constant(&g, 100.0)],
        CoefficientSeries::zero(&g),
        1.0,
    )
    .map_err(|e| e.to_string())?;
    let shape = dataprep::smooth_compact(&Expr::parse("1 + x1").unwrap(), &BumpParams::new(0.1), &g)
        .map_err(|e| e.to_string())?;
    let horizon = 0.01;
    let f = TaylorField::new([1.0, -100.0, 1e4, 1e6].iter().map(|s| shape.scale(*s)).collect()).unwrap();
    let u0 = shape.scale(0.5);
    let policy = TruncationPolicy::Adaptive { tolerance: 1e-14, max_order: 400, horizon };
    let series = parabolic_coeffs(&spec, &f, &u0, &policy).map_err(|e| e.to_string())?;
    let times = snapshot_times(horizon);
    let residual = residual_check(&spec, TimeOrder::First, &series, &f, &times).map_err(|e| e.to_string())?;
    let res = residual.coefficient_max.max(residual.time_max);
    let cn = oracle::step_parabolic(
        &spec,
        None,
        &f,
        &u0,
        &OracleConfig::new(Scheme::CrankNicolson, 1e-6, horizon),
        &times,
    )
    .map_err(|e| e.to_string())?;
    let err = worst_relative(&series, &cn);
    Ok((
        err <= 1e-3 && res <= 1e-11,
        format!("order {} ; relative L∞ vs CN {err:.3e} (tolerance 1e-3); residual {res:.3e} (tolerance 1e-11)", series.order()),
    ))
}

/// Polynomials in `t` with field coefficients, truncated at a fixed degree.
fn poly_mul(p: &[SpatialField], q: &[SpatialField]) -> Vec<SpatialField> {
    (0..p.len())
        .map(|k| {
            let mut acc = p[0].mul(&q[k]).unwrap();
            for i in 1..=k {
                acc = acc.add(&p[i].mul(&q[k - i]).unwrap()).unwrap();
            }
            acc
        })
        .collect()
}

fn ac5() -> Check {
    let g = line_grid(41, StencilOrder::Fourth);
    let a11 = CoefficientSeries::from_fn(&g, 2, |x, j| [1.0 + 0.5 * x[0], 0.3][j]);
    let a1 = CoefficientSeries::from_fn(&g, 1, |x, _| 2.0 * x[0]);
    let spec = ParabolicScalarSpec::new(&g, vec![a11], vec![a1], CoefficientSeries::constant(&g, 0.5), 0.5)
        .map_err(|e| e.to_string())?;
    let b0 = CoefficientSeries::from_fn(&g, 2, |x, j| [1.0 + x[0], -0.5][j]);
    let b1 = CoefficientSeries::constant(&g, 0.7);
    let b11 = CoefficientSeries::from_fn(&g, 1, |x, _| 0.2 + x[0] * x[0]);
    let nonlinear = NonlinearTermsSpec::new(&g, b0.clone(), vec![b1.clone()], vec![b11.clone()], 1e-3)
        .map_err(|e| e.to_string())?;
    let u0 = dataprep::smooth_compact(&Expr::parse("sin(3*x1) + 2").unwrap(), &BumpParams::new(0.1), &g)
        .map_err(|e| e.to_string())?;
    let f = TaylorField::new(vec![u0.scale(0.3), u0.scale(-1.0)]).unwrap();
    let degree = 4;
    let policy = TruncationPolicy::Fixed { order: degree };

    let linear = parabolic_coeffs(&spec, &f, &u0, &policy).map_err(|e| e.to_string())?;
    let zero = nonlinear_parabolic_coeffs(&spec, &nonlinear.with_lambda(0.0).unwrap(), &f, &u0, &policy)
        .map_err(|e| e.to_string())?;
    let bitwise = linear.coeffs().iter().zip(zero.coeffs()).all(|(a, b)| a.data() == b.data());

    let got = nonlinear_parabolic_coeffs(&spec, &nonlinear, &f, &u0, &policy).map_err(|e| e.to_string())?;

    // Picard iteration on degree-4 polynomials: u ← u0 + ∫ (A u - λ M(u) + f)
    let n = degree + 1;
    let zeros = || SpatialField::zeros(&g, 1);
    let as_poly = |s: &CoefficientSeries| -> Vec<SpatialField> {
        (0..n).map(|j| SpatialField::from_values(&g, 1, s.samples(j)).unwrap()).collect()
    };
    let (pb0, pb1, pb11) = (as_poly(&b0), as_poly(&b1), as_poly(&b11));
    let mut u: Vec<SpatialField> = (0..n).map(|k| if k == 0 { u0.clone() } else { zeros() }).collect();
    for _ in 0..n {
        let ux: Vec<SpatialField> = u.iter().map(|c| c.diff(0, 1)).collect();
        let m = [
            poly_mul(&pb0, &poly_mul(&u, &u)),
            poly_mul(&pb1, &poly_mul(&ux, &u)),
            poly_mul(&pb11, &poly_mul(&ux, &ux)),
        ];
        let mut next = vec![u0.clone()];
        for k in 0..degree {
            let mut rhs = f.get(k).cloned().unwrap_or_else(zeros);
            for j in 0..=k.min(spec.coefficient_orders() - 1) {
                rhs = rhs.add(&spec.apply(j, &u[k - j])).unwrap();
            }
            for part in &m {
                rhs = rhs.sub(&part[k].scale(nonlinear.lambda())).unwrap();
            }
            next.push(rhs.scale(1.0 / (k + 1) as f64));
        }
        u = next;
    }
    let reference = TaylorField::new(u).unwrap();
    let err = got.max_relative_diff(&reference);
    let effect = got.max_relative_diff(&linear);
    Ok((
        bitwise && err <= 1e-10,
        format!(
            "λ=0 bitwise equal: {bitwise}; λ=1e-3 vs polynomial expansion {err:.3e} (tolerance 1e-10, nonlinear effect {effect:.1e})"
        ),
    ))
}

fn ac6() -> Check {
    let g = line_grid(201, StencilOrder::Fourth);
    let spec = DivFormSystemSpec::diagonal(&g, 1, &CoefficientSeries::constant(&g, 1.0), 1.0);
    // sin(100π x) at x_i = i/200 is 0, 1, 0, -1, ...
    let values = (0..g.len()).map(|i| [0.0, 1.0, 0.0, -1.0][i % 4]).collect();
    let u0 = SpatialField::from_values(&g, 1, values).unwrap();
    let h = g.spacing()[0];
    let lambda = 4.0 / (h * h) * (PI * 100.0 * h / 2.0).sin().powi(2);
    let check = spec.apply(0, &u0);
    let eig = rel(&check, &u0.scale(-lambda));
    let c = hyperbolic_coeffs(
        &spec,
        &TaylorField::zeros(&g, 1, 0),
        &u0,
        &SpatialField::zeros(&g, 1),
        &TruncationPolicy::Fixed { order: 20 },
    )
    .map_err(|e| e.to_string())?;
    let mut even = 0.0f64;
    let mut odd = 0.0f64;
    let scale = c.coeff_norms().into_iter().fold(0.0, f64::max);
    for k in 0..=20 {
        if k % 2 == 0 {
            let want = u0.scale((-lambda).powi(k as i32 / 2) / factorial(k));
            even = even.max(rel(c.coeff(k), &want));
        } else {
            odd = odd.max(c.coeff(k).linf() / scale);
        }
    }
    Ok((
        even <= 1e-12 && odd <= 1e-14,
        format!("even relative {even:.3e} (tolerance 1e-12); odd/scale {odd:.3e} (tolerance 1e-14); eigen residual {eig:.1e}"),
    ))
}

fn plate_material(a0: f64, a1: f64) -> PlateMaterial {
    PlateMaterial { e1: 1.0, e2: 0.8, shear: 0.4, mu1: 0.3, mu2: 0.24, density: 1.0, a0, a1 }
}

fn ac7() -> Check {
    let g = square_grid(61);
    let bump = BumpParams::new(0.1);
    let u0 = dataprep::smooth_compact(&Expr::parse("sin(2*x1)*cos(x2) + 1").unwrap(), &bump, &g)
        .map_err(|e| e.to_string())?;
    let u1 = dataprep::smooth_compact(&Expr::parse("x1 - x2").unwrap(), &bump, &g).map_err(|e| e.to_string())?;
    let f = TaylorField::new(vec![u0.scale(0.2), u1.scale(-0.1)]).unwrap();

    let free = PlateSpec::new(&g, plate_material(0.0, 0.0), |_| 0.1, (0.05, 0.2)).map_err(|e| e.to_string())?;
    let policy = TruncationPolicy::Fixed { order: 12 };
    let plate = plate_coeffs(&free, &f, &u0, &u1, &policy).map_err(|e| e.to_string())?;
    let plain = hyperbolic_coeffs(&PlateOperator(&free), &f, &u0, &u1, &policy).map_err(|e| e.to_string())?;
    let bitwise = plate.coeffs().iter().zip(plain.coeffs()).all(|(a, b)| a.data() == b.data());

    let damped = PlateSpec::new(&g, plate_material(0.05, 0.1), |_| 0.1, (0.05, 0.2)).map_err(|e| e.to_string())?;
    let series =
        plate_coeffs(&damped, &f, &u0, &u1, &TruncationPolicy::Fixed { order: 40 }).map_err(|e| e.to_string())?;
    let radius = radius_estimate(&series).usable_radius().ok_or("radius estimate is indeterminate")?;
    let horizon = (radius / 4.0).min(0.05);
    let h = g.min_spacing();
    let dt = 0.1 * h * h / (4.0 * damped.max_stiffness_ratio().sqrt());
    let times = snapshot_times(horizon);
    let snaps = oracle::step_plate(
        &damped,
        &f,
        &u0,
        &u1,
        &OracleConfig::new(Scheme::CentralDifferenceWave, dt, horizon),
        &times,
    )
    .map_err(|e| e.to_string())?;
    let err = worst_relative(&series, &snaps);
    Ok((
        bitwise && err <= 1e-3,
        format!(
            "undamped plate equals biharmonic wave bitwise: {bitwise}; R̂ = {radius:.3e}, T = {horizon:.3e}, relative L∞ vs oracle {err:.3e} (tolerance 1e-3)"
        ),
    ))
}

fn ac8() -> Check {
    let dom = Domain::unit_box(3);
    let g = Grid::uniform(&dom, &[0.0; 3], &[1.0; 3], &[33, 33, 33]).map_err(|e| e.to_string())?;
    let bump = BumpParams::new(0.1);
    let vec_field = |src: [&str; 3]| -> Result<SpatialField, String> {
        let p = src.map(|s| Expr::parse(s).unwrap());
        dataprep::divfree_data(&p, &bump, &g).map_err(|e| e.to_string())
    };
    let d0 = vec_field(["sin(3*x2)", "x1*x3", "cos(2*x1)"])?;
    let b0 = vec_field(["x2*x3", "sin(2*x3) + x1", "x1^2"])?;
    let g2 = TaylorField::constant(vec_field(["cos(x3)", "0.5*x1", "sin(x2)*x1"])?.scale(0.5));
    let g1_parts = ["x1 + 1", "x2*x3", "cos(x1)"]
        .map(|s| dataprep::smooth_compact(&Expr::parse(s).unwrap(), &bump, &g).unwrap());
    let g1 = TaylorField::constant(SpatialField::stack(&g1_parts).unwrap().scale(0.3));
    let spec = MaxwellSpec::new(&g, |x| 1.0 + 0.2 * x[0], |x| 1.0 + 0.1 * x[1] * x[2], |_| 0.5, [None; 3])
        .map_err(|e| e.to_string())?;
    let (d, b) =
        maxwell_coeffs(&spec, &g1, &g2, &d0, &b0, &TruncationPolicy::Fixed { order: 30 }).map_err(|e| e.to_string())?;
    let divergence = (0..=15)
        .map(|k| {
            let bk = b.coeff(k);
            div(bk).unwrap().linf() / bk.linf()
        })
        .fold(0.0, f64::max);

    let radius = SolveReport::new("maxwell", vec![d.clone(), b.clone()])
        .radius_estimate
        .usable_radius()
        .ok_or("radius estimate is indeterminate")?;
    let horizon = (radius / 4.0).min(0.2);
    // well below the stability bound so the leapfrog's O(dt²) error stays small
    let dt = 0.0125 * g.min_spacing() / spec.max_speed();
    let times = snapshot_times(horizon);
    let (sd, sb) = oracle::step_maxwell(
        &spec,
        &g1,
        &g2,
        &d0,
        &b0,
        &OracleConfig::new(Scheme::MaxwellLeapfrog, dt, horizon),
        &times,
    )
    .map_err(|e| e.to_string())?;
    let err = worst_relative(&d, &sd).max(worst_relative(&b, &sb));
    Ok((
        divergence <= 1e-12 && err <= 1e-3,
        format!(
            "max |div b_k|/‖b_k‖ for k ≤ 15: {divergence:.3e} (tolerance 1e-12); R̂ = {radius:.3e}, T = {horizon:.3e}, relative L∞ vs leapfrog {err:.3e} (tolerance 1e-3)"
        ),
    ))
}

fn ac9() -> Check {
    let g = line_grid(41, StencilOrder::Fourth);
    let spec = ParabolicScalarSpec::new(
        &g,
        vec![CoefficientSeries::from_fn(&g, 1, |x, _| 1.0 + 0.5 * x[0])],
        vec![CoefficientSeries::constant(&g, 2.0)],
        CoefficientSeries::zero(&g),
        1.0,
    )
    .map_err(|e| e.to_string())?;
    let ub = BoundaryData::Expression(Expr::parse("1 + 0.5*x1").unwrap());
    let horizon: f64 = 1e-4;
    let width = 0.1;

    // direct reference U = P + V: P matches u_b on S and is quadratic, so
    // every stencil differentiates it exactly; V is compactly supported
    let p = |x: f64| 1.0 + 0.5 * x + 2.0 * x * (1.0 - x);
    let a_p = |x: f64| (1.0 + 0.5 * x) * -4.0 - 2.0 * (2.5 - 4.0 * x);
    let shape = dataprep::smooth_compact(&Expr::parse("1 + x1^2").unwrap(), &BumpParams::new(0.2), &g)
        .map_err(|e| e.to_string())?;
    let poly = [1.0, -0.8, 0.5, 0.3, -0.2, 0.1, 0.05];
    let v = TaylorField::new(
        poly.iter().enumerate().map(|(k, c)| shape.scale(c / horizon.powi(k as i32))).collect(),
    )
    .unwrap();
    let mut f = manufacture_rhs(&spec, TimeOrder::First, &v).map_err(|e| e.to_string())?.into_coeffs();
    f[0] = f[0].sub(&SpatialField::scalar(&g, |x| a_p(x[0]))).unwrap();
    let f = TaylorField::new(f).unwrap();
    let mut target = v.into_coeffs();
    target[0] = target[0].add(&SpatialField::scalar(&g, |x| p(x[0]))).unwrap();
    let target = TaylorField::new(target).unwrap();

    let trace = |q: &[f64]| ub.value(q, 0.0);
    let cfg = LiftConfig { width, order: 1, horizon };
    let hom = dataprep::homogenize_parabolic(&spec, &f, target.coeff(0), &trace, &ub, &cfg)
        .map_err(|e| e.to_string())?;
    let tilde = parabolic_coeffs(&spec, &hom.forcing, &hom.u0, &TruncationPolicy::Fixed { order: poly.len() - 1 })
        .map_err(|e| e.to_string())?;
    let u = hom.reconstruct(&tilde).map_err(|e| e.to_string())?;
    let err = snapshot_times(horizon)
        .into_iter()
        .map(|t| rel(&u.eval(t), &target.eval(t)))
        .fold(0.0, f64::max);
    Ok((err <= 1e-9, format!("max relative L∞ over snapshots {err:.3e} (tolerance 1e-9)")))
}

fn ac10() -> Check {
    let a = 0.1;
    let params = BumpParams::new(a);
    let g = square_grid(81);
    let b = dataprep::bump(&params, &g).map_err(|e| e.to_string())?;
    let mut range_ok = true;
    let mut formula = 0.0f64;
    let mut plateaus = true;
    for idx in 0..g.len() {
        if !g.mask()[idx] {
            continue;
        }
        let x = g.point(idx);
        let rho = x.iter().map(|v| v.min(1.0 - v)).fold(f64::INFINITY, f64::min);
        let v = b.value(idx, 0);
        range_ok &= (0.0..=1.0).contains(&v);
        let want = if rho >= 2.0 * a {
            1.0
        } else if rho <= a {
            0.0
        } else {
            let s = 2.0 * a - rho;
            (1.0 - a * a / (a * a - s * s)).exp()
        };
        formula = formula.max((v - want).abs());
        if rho >= 2.0 * a + 1e-12 {
            plateaus &= v == 1.0;
        }
        if rho <= a - 1e-12 {
            plateaus &= v == 0.0;
        }
    }
    // node at distance 1.5a from the boundary: d(x, S₂) = a/2
    let mid = g.nearest_index(&[0.15, 0.5]);
    let transition = (b.value(mid, 0) - (-1.0f64 / 3.0).exp()).abs();

    let max_gradient = |n: usize| -> Result<f64, String> {
        let g = square_grid(n);
        let b = dataprep::bump(&params, &g).map_err(|e| e.to_string())?;
        let (bx, by) = (b.diff(0, 1), b.diff(1, 1));
        Ok(bx.data().iter().zip(by.data()).map(|(x, y)| x.hypot(*y)).fold(0.0, f64::max))
    };
    // the transition layer must span several nodes before the gradient settles
    let (coarse, fine) = (max_gradient(81)?, max_gradient(161)?);
    let drift = (fine / coarse - 1.0).abs();
    Ok((
        range_ok && plateaus && formula <= 1e-12 && transition <= 1e-12 && drift <= 0.2,
        format!(
            "range ok: {range_ok}; plateaus exact: {plateaus}; formula deviation {formula:.1e}; transition error {transition:.1e} (tolerance 1e-12); gradient drift {:.1}% (tolerance 20%)",
            100.0 * drift
        ),
    ))
}

fn main() -> ExitCode {
    let criteria: [(&str, f64, fn() -> Check); 10] = [
        ("AC-1", 1.0, ac1),
        ("AC-2", 10.0, ac2),
        ("AC-3", 30.0, ac3),
        ("AC-4", 30.0, ac4),
        ("AC-5", 5.0, ac5),
        ("AC-6", 2.0, ac6),
        ("AC-7", 60.0, ac7),
        ("AC-8", 120.0, ac8),
        ("AC-9", 10.0, ac9),
        ("AC-10", 1.0, ac10),
    ];
    // `cargo test` forwards harness flags; only bare words select criteria
    let filters: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    let mut ran = 0;
    for (id, budget, check) in criteria {
        if !filters.is_empty() && !filters.iter().any(|f| id.contains(f.as_str())) {
            continue;
        }
        ran += 1;
        let start = Instant::now();
        let outcome = check();
        let secs = start.elapsed().as_secs_f64();
        let (pass, detail) = match outcome {
            Ok((ok, detail)) => (ok && secs < budget, detail),
            Err(e) => (false, format!("error: {e}")),
        };
        if !pass {
            failed += 1;
        }
        println!(
            "{id} {} {detail}; runtime {secs:.2} s (budget {budget} s)",
            if pass { "PASS" } else { "FAIL" }
        );
        std::io::stdout().flush().ok();
    }
    println!("acceptance: {} passed, {failed} failed", ran - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
