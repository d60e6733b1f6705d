use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fields::{CoefficientSeries, Grid, SpatialField, TaylorField};

/// `M(u) = b0 u² + b_i u_{x_i} u + b_ij u_{x_i} u_{x_j}`, entering the
/// equation as `-λ M(u)`.
#[derive(Debug, Clone)]
pub struct NonlinearTermsSpec {
    grid: Arc<Grid>,
    b0: CoefficientSeries,
    b1: Vec<CoefficientSeries>,
    /// Row-major `n × n`.
    b2: Vec<CoefficientSeries>,
    lambda: f64,
}

impl NonlinearTermsSpec {
    pub fn new(
        grid: &Arc<Grid>,
        b0: CoefficientSeries,
        b1: Vec<CoefficientSeries>,
        b2: Vec<CoefficientSeries>,
        lambda: f64,
    ) -> Result<Self> {
        let n = grid.dim();
        if b1.len() != n || b2.len() != n * n {
            return Err(Error::Spec(format!(
                "nonlinear terms need {n} first-order and {} second-order coefficients",
                n * n
            )));
        }
        if !(lambda >= 0.0 && lambda.is_finite()) {
            return Err(Error::Spec(format!("λ must be non-negative, got {lambda}")));
        }
        Ok(Self { grid: grid.clone(), b0, b1, b2, lambda })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn with_lambda(&self, lambda: f64) -> Result<Self> {
        Self::new(&self.grid, self.b0.clone(), self.b1.clone(), self.b2.clone(), lambda)
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    /// Coefficients `0..=m` of the time series of `M(u)`.
    pub fn apply_series(&self, u: &TaylorField, m: usize) -> TaylorField {
        let mut acc = MSeries::new(self);
        let mut out = Vec::with_capacity(m + 1);
        for k in 0..=m {
            let c = u
                .get(k)
                .cloned()
                .unwrap_or_else(|| SpatialField::zeros(&self.grid, 1));
            acc.push(c);
            out.push(acc.term(k));
        }
        TaylorField::new(out).expect("coefficients share one grid")
    }

    /// `M(u)` with coefficients evaluated at time `t`.
    pub fn apply_at(&self, t: f64, u: &SpatialField) -> SpatialField {
        let n = self.grid.dim();
        let derivs: Vec<SpatialField> = (0..n).map(|i| u.diff(i, 1)).collect();
        let mut out = u.zip_with(u, |a, b| a * b).mul_samples(&self.b0.eval(t));
        for i in 0..n {
            if !self.b1[i].is_empty() {
                out.add_assign_unchecked(&derivs[i].zip_with(u, |a, b| a * b).mul_samples(&self.b1[i].eval(t)));
            }
            for l in 0..n {
                if !self.b2[i * n + l].is_empty() {
                    out.add_assign_unchecked(
                        &derivs[i].zip_with(&derivs[l], |a, b| a * b).mul_samples(&self.b2[i * n + l].eval(t)),
                    );
                }
            }
        }
        out
    }
}

/// Incremental evaluation of the `M(u)` series while the coefficients of
/// `u` are being generated: after `push(c_k)`, `term(k)` uses only
/// `c_0..=c_k`.
pub struct MSeries<'a> {
    spec: &'a NonlinearTermsSpec,
    coeffs: Vec<SpatialField>,
    derivs: Vec<Vec<SpatialField>>,
    /// `(u u)_s`, `(u_{x_i} u)_s`, `(u_{x_i} u_{x_l})_s`.
    uu: Vec<SpatialField>,
    du_u: Vec<Vec<SpatialField>>,
    du_du: Vec<Vec<SpatialField>>,
}

/// Top coefficient `Σ_q a_q b_{s-q}` of the product of two series of equal length.
fn convolve(grid: &Arc<Grid>, a: &[&SpatialField], b: &[&SpatialField]) -> SpatialField {
    let s = a.len() - 1;
    let mut acc = SpatialField::zeros(grid, 1);
    for q in 0..=s {
        acc.add_assign_unchecked(&a[q].zip_with(b[s - q], |x, y| x * y));
    }
    acc
}

impl<'a> MSeries<'a> {
    pub fn new(spec: &'a NonlinearTermsSpec) -> Self {
        let n = spec.grid.dim();
        Self {
            spec,
            coeffs: Vec::new(),
            derivs: Vec::new(),
            uu: Vec::new(),
            du_u: vec![Vec::new(); n],
            du_du: vec![Vec::new(); n * n],
        }
    }

    pub fn push(&mut self, c: SpatialField) {
        let n = self.spec.grid.dim();
        self.derivs.push((0..n).map(|i| c.diff(i, 1)).collect());
        self.coeffs.push(c);
        let grid = &self.spec.grid;
        let us: Vec<&SpatialField> = self.coeffs.iter().collect();
        let uu = convolve(grid, &us, &us);
        let du_u: Vec<SpatialField> = (0..n)
            .map(|i| {
                let di: Vec<&SpatialField> = self.derivs.iter().map(|d| &d[i]).collect();
                convolve(grid, &di, &us)
            })
            .collect();
        let du_du: Vec<SpatialField> = (0..n * n)
            .map(|il| {
                let di: Vec<&SpatialField> = self.derivs.iter().map(|d| &d[il / n]).collect();
                let dl: Vec<&SpatialField> = self.derivs.iter().map(|d| &d[il % n]).collect();
                convolve(grid, &di, &dl)
            })
            .collect();
        self.uu.push(uu);
        for (i, v) in du_u.into_iter().enumerate() {
            self.du_u[i].push(v);
        }
        for (il, v) in du_du.into_iter().enumerate() {
            self.du_du[il].push(v);
        }
    }

    /// Number of coefficients of `u` pushed so far.
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Coefficient `k` of the series of `M(u)`; requires `k` pushed terms.
    pub fn term(&self, k: usize) -> SpatialField {
        assert!(k < self.coeffs.len(), "term {k} needs c_0..=c_{k}");
        let spec = self.spec;
        let n = spec.grid.dim();
        let mut out = SpatialField::zeros(&spec.grid, 1);
        for p in 0..=k {
            if let Some(b) = spec.b0.get(p) {
                out.add_assign_unchecked(&self.uu[k - p].mul_samples(b));
            }
            for i in 0..n {
                if let Some(b) = spec.b1[i].get(p) {
                    out.add_assign_unchecked(&self.du_u[i][k - p].mul_samples(b));
                }
                for l in 0..n {
                    if let Some(b) = spec.b2[i * n + l].get(p) {
                        out.add_assign_unchecked(&self.du_du[i * n + l][k - p].mul_samples(b));
                    }
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Domain;
    use rand::{Rng, SeedableRng};

    fn setup(seed: u64) -> (Arc<Grid>, NonlinearTermsSpec, TaylorField) {
        let g = Grid::uniform(&Domain::unit_box(1), &[0.0], &[1.0], &[15]).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut series = |orders: usize| {
            let v: Vec<Vec<f64>> = (0..orders).map(|_| (0..g.len()).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect();
            CoefficientSeries::from_orders(&g, v)
        };
        let spec = NonlinearTermsSpec::new(&g, series(2), vec![series(3)], vec![series(2)], 0.1).unwrap();
        let coeffs = (0..3)
            .map(|_| {
                let v: Vec<f64> = (0..g.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
                SpatialField::from_values(&g, 1, v).unwrap()
            })
            .collect();
        (g.clone(), spec, TaylorField::new(coeffs).unwrap())
    }

    #[test]
    fn zero_series_and_pure_square() {
        let (g, spec, _) = setup(1);
        let zero = TaylorField::zeros(&g, 1, 3);
        assert_eq!(spec.apply_series(&zero, 3), TaylorField::zeros(&g, 1, 3));

        let one = CoefficientSeries::constant(&g, 1.0);
        let z = CoefficientSeries::zero(&g);
        let sq = NonlinearTermsSpec::new(&g, one, vec![z.clone()], vec![z], 1.0).unwrap();
        let c0 = SpatialField::scalar(&g, |p| p[0] + 0.5);
        let out = sq.apply_series(&TaylorField::constant(c0.clone()), 0);
        assert_eq!(*out.coeff(0), c0.zip_with(&c0, |a, b| a * b));
    }

    #[test]
    fn matches_polynomial_expansion() {
        // evaluate M(u(t)) pointwise as polynomials in t and compare
        let (g, spec, u) = setup(2);
        let m = 5;
        let got = spec.apply_series(&u, m);
        let poly = |c: &[f64]| c.to_vec();
        let mul = |a: &[f64], b: &[f64]| {
            let mut out = vec![0.0; a.len() + b.len() - 1];
            for (i, x) in a.iter().enumerate() {
                for (j, y) in b.iter().enumerate() {
                    out[i + j] += x * y;
                }
            }
            out
        };
        let du: Vec<SpatialField> = u.coeffs().iter().map(|c| c.diff(0, 1)).collect();
        for idx in 0..g.len() {
            let uc: Vec<f64> = u.coeffs().iter().map(|c| c.data()[idx]).collect();
            let dc: Vec<f64> = du.iter().map(|c| c.data()[idx]).collect();
            let b0: Vec<f64> = (0..2).map(|j| spec.b0.samples(j)[idx]).collect();
            let b1: Vec<f64> = (0..3).map(|j| spec.b1[0].samples(j)[idx]).collect();
            let b2: Vec<f64> = (0..2).map(|j| spec.b2[0].samples(j)[idx]).collect();
            let mut total = vec![0.0; 12];
            for (coef, a, b) in [(&b0, &uc, &uc), (&b1, &dc, &uc), (&b2, &dc, &dc)] {
                let p = mul(&poly(coef), &mul(a, b));
                for (k, v) in p.iter().enumerate() {
                    total[k] += v;
                }
            }
            let mask = g.mask()[idx];
            for k in 0..=m {
                let expect = if mask { total[k] } else { 0.0 };
                assert!((got.coeff(k).data()[idx] - expect).abs() < 1e-12, "k={k} idx={idx}");
            }
        }
    }

    #[test]
    fn quadratic_scaling() {
        let (_, spec, u) = setup(3);
        let a = spec.apply_series(&u, 4);
        let b = spec.apply_series(&u.scale(1.7), 4);
        for k in 0..=4 {
            let s = a.coeff(k).linf().max(1e-300);
            assert!(b.coeff(k).max_abs_diff(&a.coeff(k).scale(1.7 * 1.7)) <= 1e-12 * s * 2.89);
        }
    }
}
