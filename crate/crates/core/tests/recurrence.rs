use std::f64::consts::PI;
use std::sync::Arc;

use taylor_ibvp::dataprep::{self, BumpParams};
use taylor_ibvp::expr::Expr;
use taylor_ibvp::fields::{CoefficientSeries, Grid, SpatialField, StencilOrder, TaylorField};
use taylor_ibvp::geometry::Domain;
use taylor_ibvp::operators::{
    curl, DivFormSystemSpec, MaxwellSpec, NonlinearTermsSpec, ParabolicScalarSpec, PlateMaterial, PlateSpec,
};
use taylor_ibvp::recurrence::{
    hyperbolic_coeffs, manufacture_rhs, maxwell_coeffs, maxwell_residual, nonlinear_parabolic_coeffs,
    nonlinear_residual, parabolic_coeffs, plate_coeffs, plate_residual, residual_check, system_parabolic_coeffs,
    TimeOrder, TruncationPolicy,
};
use taylor_ibvp::Error;

fn line(n: usize, stencil: StencilOrder) -> Arc<Grid> {
    Grid::uniform_with_stencil(&Domain::unit_box(1), &[0.0], &[1.0], &[n], stencil).unwrap()
}

fn square(n: usize) -> Arc<Grid> {
    Grid::uniform(&Domain::unit_box(2), &[0.0, 0.0], &[1.0, 1.0], &[n, n]).unwrap()
}

fn compact(g: &Arc<Grid>, src: &str) -> SpatialField {
    dataprep::smooth_compact(&Expr::parse(src).unwrap(), &BumpParams::new(0.1), g).unwrap()
}

fn fixed(order: usize) -> TruncationPolicy {
    TruncationPolicy::Fixed { order }
}

#[test]
fn zero_data_gives_zero_series() {
    let g = square(21);
    let spec = ParabolicScalarSpec::laplacian(&g);
    let z = SpatialField::zeros(&g, 1);
    let f = TaylorField::zeros(&g, 1, 3);
    let c = parabolic_coeffs(&spec, &f, &z, &fixed(8)).unwrap();
    assert_eq!(c.len(), 9);
    assert!(c.coeffs().iter().all(|k| k.linf() == 0.0));
    let c = hyperbolic_coeffs(&DivFormSystemSpec::diagonal(&g, 1, &CoefficientSeries::constant(&g, 2.0), 1.0), &f, &z, &z, &fixed(8))
        .unwrap();
    assert!(c.coeffs().iter().all(|k| k.linf() == 0.0));
}

#[test]
fn heat_eigenvector_closed_form() {
    let g = line(41, StencilOrder::Second);
    let spec = ParabolicScalarSpec::laplacian(&g);
    let h = g.spacing()[0];
    // a high mode: round-off in the samples excites other modes, which must
    // not outgrow this one
    let u0 = SpatialField::scalar(&g, |x| (30.0 * PI * x[0]).sin());
    let lambda = 4.0 / (h * h) * (15.0 * PI * h).sin().powi(2);
    let c = parabolic_coeffs(&spec, &TaylorField::zeros(&g, 1, 0), &u0, &fixed(15)).unwrap();
    let mut want = u0.clone();
    for k in 0..=15 {
        let err = c.coeff(k).max_abs_diff(&want) / want.linf();
        assert!(err < 1e-12, "order {k}: {err}");
        want = want.scale(-lambda / (k + 1) as f64);
    }
}

#[test]
fn series_is_linear_in_the_data() {
    let g = line(61, StencilOrder::Fourth);
    let a = CoefficientSeries::from_fn(&g, 2, |x, j| [1.0 + x[0], 0.5][j]);
    let spec = ParabolicScalarSpec::new(&g, vec![a], vec![CoefficientSeries::constant(&g, 3.0)], CoefficientSeries::zero(&g), 0.5)
        .unwrap();
    let (u, v) = (compact(&g, "sin(5*x1)"), compact(&g, "x1^2 + 1"));
    let f = TaylorField::new(vec![u.scale(2.0), v.clone()]).unwrap();
    let k = TaylorField::new(vec![v.scale(-1.0)]).unwrap();
    let (alpha, beta) = (0.7, -1.3);
    let cu = parabolic_coeffs(&spec, &f, &u, &fixed(10)).unwrap();
    let cv = parabolic_coeffs(&spec, &k, &v, &fixed(10)).unwrap();
    let mix = parabolic_coeffs(
        &spec,
        &f.scale(alpha).add(&k.scale(beta)).unwrap(),
        &u.scale(alpha).add(&v.scale(beta)).unwrap(),
        &fixed(10),
    )
    .unwrap();
    let combined = cu.scale(alpha).add(&cv.scale(beta)).unwrap();
    assert!(mix.max_relative_diff(&combined) < 1e-12);
}

#[test]
fn one_component_system_matches_scalar() {
    // constant coefficients and three-point stencils: both operators are the
    // same second difference, evaluated in a different order
    let g = square(31);
    let g = Grid::uniform_with_stencil(g.domain(), &[0.0, 0.0], &[1.0, 1.0], &[31, 31], StencilOrder::Second).unwrap();
    let scalar = ParabolicScalarSpec::laplacian(&g);
    let system = DivFormSystemSpec::diagonal(&g, 1, &CoefficientSeries::constant(&g, 1.0), 1.0);
    let u0 = compact(&g, "sin(2*x1)*x2 + 1");
    let f = TaylorField::new(vec![u0.scale(0.3)]).unwrap();
    let a = parabolic_coeffs(&scalar, &f, &u0, &fixed(6)).unwrap();
    let b = system_parabolic_coeffs(&system, &f, &u0, &fixed(6)).unwrap();
    assert!(a.max_relative_diff(&b) < 1e-12, "{}", a.max_relative_diff(&b));
}

#[test]
fn decoupled_components_evolve_independently() {
    let g = square(21);
    let c1 = CoefficientSeries::from_fn(&g, 2, |x, j| [1.0 + x[0] * x[1], 0.2][j]);
    let c2 = CoefficientSeries::constant(&g, 0.5);
    let mut coupled = DivFormSystemSpec::zero(&g, 2, 0.4);
    for r in 0..2 {
        coupled = coupled.with_a(0, 0, r, r, c1.clone()).with_a(1, 1, r, r, c2.clone());
    }
    let first = DivFormSystemSpec::diagonal(&g, 1, &c1, 0.4);
    let second = DivFormSystemSpec::diagonal(&g, 1, &c2, 0.4);
    let (p, q) = (compact(&g, "x1 + x2"), compact(&g, "cos(3*x2)"));
    let stacked = SpatialField::stack(&[p.clone(), q.clone()]).unwrap();
    let f = TaylorField::zeros(&g, 2, 0);
    let f1 = TaylorField::zeros(&g, 1, 0);
    let both = hyperbolic_coeffs(&coupled, &f, &stacked, &stacked.scale(0.5), &fixed(8)).unwrap();
    let a = hyperbolic_coeffs(&first, &f1, &p, &p.scale(0.5), &fixed(8)).unwrap();
    let b = hyperbolic_coeffs(&second, &f1, &q, &q.scale(0.5), &fixed(8)).unwrap();
    for k in 0..=8 {
        assert_eq!(both.coeff(k).component(0), a.coeff(k).data());
        assert_eq!(both.coeff(k).component(1), b.coeff(k).data());
    }
}

#[test]
fn adaptive_truncation_stops_at_tolerance() {
    let g = line(41, StencilOrder::Second);
    let spec = ParabolicScalarSpec::laplacian(&g);
    let u0 = SpatialField::scalar(&g, |x| (PI * x[0]).sin());
    // round-off excites grid-scale modes, so the horizon must sit below 1/‖A‖
    let horizon = 1e-4;
    let policy = TruncationPolicy::Adaptive { tolerance: 1e-12, max_order: 100, horizon };
    let c = parabolic_coeffs(&spec, &TaylorField::zeros(&g, 1, 0), &u0, &policy).unwrap();
    let m = c.order();
    let tail = |k: usize| c.coeff(k).linf() * horizon.powi(k as i32);
    assert!(tail(m) + tail(m - 1) < 1e-12);
    assert!(tail(m - 1) + tail(m - 2) >= 1e-12);
    // the truncated sum satisfies the equation up to the dropped term
    let rep = residual_check(&spec, TimeOrder::First, &c, &TaylorField::zeros(&g, 1, 0), &[0.0, horizon]).unwrap();
    assert!(rep.coefficient_max < 1e-13 && rep.time_max < 1e-13);
}

#[test]
fn divergent_series_is_reported() {
    let g = line(101, StencilOrder::Fourth);
    let spec = ParabolicScalarSpec::laplacian(&g);
    let u0 = compact(&g, "1");
    let policy = TruncationPolicy::Adaptive { tolerance: 1e-10, max_order: 300, horizon: 1.0 };
    match parabolic_coeffs(&spec, &TaylorField::zeros(&g, 1, 0), &u0, &policy) {
        Err(Error::BlowUp { order, .. }) => assert!(order > 20),
        other => panic!("expected blow-up, got {other:?}"),
    }
}

#[test]
fn forcing_must_not_be_truncated_away() {
    let g = line(41, StencilOrder::Fourth);
    let spec = ParabolicScalarSpec::laplacian(&g);
    let u0 = SpatialField::zeros(&g, 1);
    // a forcing with a large late term; adaptive stopping may not ignore it
    let mut coeffs = vec![SpatialField::zeros(&g, 1); 6];
    coeffs[5] = compact(&g, "1");
    let f = TaylorField::new(coeffs).unwrap();
    let policy = TruncationPolicy::Adaptive { tolerance: 1e-8, max_order: 60, horizon: 1e-3 };
    let c = parabolic_coeffs(&spec, &f, &u0, &policy).unwrap();
    assert!(c.order() >= 6);
    assert!(c.coeff(6).linf() > 0.0);
}

#[test]
fn nonlinear_manufactured_residual() {
    let g = line(41, StencilOrder::Fourth);
    let spec = ParabolicScalarSpec::laplacian(&g);
    let nl = NonlinearTermsSpec::new(
        &g,
        CoefficientSeries::constant(&g, 1.0),
        vec![CoefficientSeries::constant(&g, 0.5)],
        vec![CoefficientSeries::constant(&g, 0.1)],
        0.2,
    )
    .unwrap();
    let u0 = compact(&g, "2 + sin(4*x1)");
    let f = TaylorField::new(vec![u0.scale(0.1)]).unwrap();
    let c = nonlinear_parabolic_coeffs(&spec, &nl, &f, &u0, &fixed(12)).unwrap();
    let rep = nonlinear_residual(&spec, &nl, &c, &f, &[0.0, 1e-4, 1e-3]).unwrap();
    assert!(rep.coefficient_max < 1e-13, "{}", rep.coefficient_max);
    // the nonlinear term changes the answer
    let lin = parabolic_coeffs(&spec, &f, &u0, &fixed(12)).unwrap();
    assert!(c.max_relative_diff(&lin) > 1e-3);
}

fn plate(g: &Arc<Grid>, a0: f64, a1: f64) -> PlateSpec {
    let material = PlateMaterial { e1: 2.0, e2: 1.0, shear: 0.5, mu1: 0.2, mu2: 0.1, density: 1.0, a0, a1 };
    PlateSpec::new(g, material, |x| 0.1 + 0.02 * x[0], (0.05, 0.2)).unwrap()
}

#[test]
fn damped_plate_satisfies_its_identities() {
    let g = square(31);
    let spec = plate(&g, 0.05, 0.2);
    let u0 = compact(&g, "x1*x2 + 1");
    let u1 = compact(&g, "sin(3*x1)");
    let f = TaylorField::new(vec![u0.scale(0.5)]).unwrap();
    let c = plate_coeffs(&spec, &f, &u0, &u1, &fixed(14)).unwrap();
    let rep = plate_residual(&spec, &c, &f, &[0.0, 1e-4]).unwrap();
    assert!(rep.coefficient_max < 1e-13, "{}", rep.coefficient_max);
    // c_2 by hand: (φ_0 - (1/ρh) A u0 - α0 u1 - α1 u1³) / 2
    let mut want = f.coeff(0).clone();
    want = want.add(&spec.elastic_acceleration(&u0)).unwrap();
    want = want.sub(&u1.mul_samples(spec.alpha0())).unwrap();
    want = want.sub(&u1.map(|v| v * v * v).mul_samples(spec.alpha1())).unwrap();
    let want = want.scale(0.5);
    assert!(c.coeff(2).max_abs_diff(&want) <= 1e-14 * want.linf());
}

fn cube(n: usize) -> Arc<Grid> {
    Grid::uniform(&Domain::unit_box(3), &[0.0; 3], &[1.0; 3], &[n; 3]).unwrap()
}

#[test]
fn maxwell_first_coefficient_is_curl_of_b() {
    let g = cube(17);
    let spec = MaxwellSpec::new(&g, |_| 1.0, |_| 1.0, |_| 0.0, [None; 3]).unwrap();
    let bump = BumpParams::new(0.125);
    let b0 = dataprep::divfree_data(&["x2", "x3*x1", "sin(x1)"].map(|s| Expr::parse(s).unwrap()), &bump, &g).unwrap();
    let d0 = SpatialField::zeros(&g, 3);
    let zero = TaylorField::zeros(&g, 3, 0);
    let (d, b) = maxwell_coeffs(&spec, &zero, &zero, &d0, &b0, &fixed(4)).unwrap();
    assert_eq!(d.coeff(1).data(), curl(&b0).unwrap().data());
    assert_eq!(b.coeff(1).linf(), 0.0);
    let rep = maxwell_residual(&spec, &d, &b, &zero, &zero, &[0.0, 0.01]).unwrap();
    assert!(rep.coefficient_max < 1e-14);
}

#[test]
fn manufacture_of_wave_target() {
    let g = line(41, StencilOrder::Fourth);
    let spec = DivFormSystemSpec::diagonal(&g, 1, &CoefficientSeries::constant(&g, 1.0), 1.0);
    let shape = compact(&g, "1 + x1");
    // coefficients on the operator's own time scale h
    let target = TaylorField::new((0..6).map(|k| shape.scale(40f64.powi(k))).collect()).unwrap();
    let f = manufacture_rhs(&spec, TimeOrder::Second, &target).unwrap();
    assert_eq!(f.len(), 4);
    let back = hyperbolic_coeffs(&spec, &f, target.coeff(0), target.coeff(1), &fixed(5)).unwrap();
    assert!(back.max_relative_diff(&target) < 1e-12, "{}", back.max_relative_diff(&target));
}

#[test]
fn invalid_inputs_are_rejected() {
    let g = line(21, StencilOrder::Fourth);
    let other = line(31, StencilOrder::Fourth);
    let spec = ParabolicScalarSpec::laplacian(&g);
    let f = TaylorField::zeros(&g, 1, 0);
    assert!(matches!(
        parabolic_coeffs(&spec, &f, &SpatialField::zeros(&other, 1), &fixed(3)),
        Err(Error::Incompatible(_))
    ));
    assert!(matches!(parabolic_coeffs(&spec, &f, &SpatialField::zeros(&g, 1), &fixed(0)), Err(Error::Spec(_))));
    let bad = TruncationPolicy::Adaptive { tolerance: -1.0, max_order: 10, horizon: 1.0 };
    assert!(parabolic_coeffs(&spec, &f, &SpatialField::zeros(&g, 1), &bad).is_err());
    let nan = SpatialField::scalar(&g, |_| f64::NAN);
    assert!(matches!(parabolic_coeffs(&spec, &f, &nan, &fixed(3)), Err(Error::BlowUp { .. })));
}
