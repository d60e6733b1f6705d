use std::sync::Arc;

use super::{component_directions, sample_directions, SpatialOperator};
use crate::error::{Error, Result};
use crate::fields::stencil;
use crate::fields::{CoefficientSeries, Grid, SpatialField};

/// Divergence-form system
/// `(B u)_i = ∂_r(a_ijrm ∂_m u_j) - b^i_jm ∂_m u_j - g^i_j u_j`.
///
/// The divergence term is the average of the two one-sided compositions
/// `D⁻_r(a D⁺_m u)` and `D⁺_r(a D⁻_m u)`, which for constant coefficients
/// reduces to the compact three-point second difference.
#[derive(Debug, Clone)]
pub struct DivFormSystemSpec {
    grid: Arc<Grid>,
    ncomp: usize,
    a: Vec<CoefficientSeries>,
    b: Vec<CoefficientSeries>,
    g: Vec<CoefficientSeries>,
    mu: f64,
}

impl DivFormSystemSpec {
    /// All coefficients zero; fill in with the `with_*` builders.
    pub fn zero(grid: &Arc<Grid>, ncomp: usize, mu: f64) -> Self {
        let n = grid.dim();
        let z = CoefficientSeries::zero(grid);
        Self {
            grid: grid.clone(),
            ncomp,
            a: vec![z.clone(); ncomp * ncomp * n * n],
            b: vec![z.clone(); ncomp * ncomp * n],
            g: vec![z; ncomp * ncomp],
            mu,
        }
    }

    /// `a_iirr = c` for every component and axis: a Laplacian per component.
    pub fn diagonal(grid: &Arc<Grid>, ncomp: usize, c: &CoefficientSeries, mu: f64) -> Self {
        let mut s = Self::zero(grid, ncomp, mu);
        for i in 0..ncomp {
            for r in 0..grid.dim() {
                s = s.with_a(i, i, r, r, c.clone());
            }
        }
        s
    }

    fn a_index(&self, i: usize, j: usize, r: usize, m: usize) -> usize {
        let n = self.grid.dim();
        ((i * self.ncomp + j) * n + r) * n + m
    }

    fn b_index(&self, i: usize, j: usize, m: usize) -> usize {
        (i * self.ncomp + j) * self.grid.dim() + m
    }

    pub fn with_a(mut self, i: usize, j: usize, r: usize, m: usize, c: CoefficientSeries) -> Self {
        let k = self.a_index(i, j, r, m);
        self.a[k] = c;
        self
    }

    pub fn with_b(mut self, i: usize, j: usize, m: usize, c: CoefficientSeries) -> Self {
        let k = self.b_index(i, j, m);
        self.b[k] = c;
        self
    }

    pub fn with_g(mut self, i: usize, j: usize, c: CoefficientSeries) -> Self {
        self.g[i * self.ncomp + j] = c;
        self
    }

    pub fn a(&self, i: usize, j: usize, r: usize, m: usize) -> &CoefficientSeries {
        &self.a[self.a_index(i, j, r, m)]
    }

    pub fn b(&self, i: usize, j: usize, m: usize) -> &CoefficientSeries {
        &self.b[self.b_index(i, j, m)]
    }

    pub fn g(&self, i: usize, j: usize) -> &CoefficientSeries {
        &self.g[i * self.ncomp + j]
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    /// Largest `|a_ijrm(x, 0)|`, used by explicit time-step bounds.
    pub fn max_principal(&self) -> f64 {
        self.a.iter().map(|c| c.max_abs(0)).fold(0.0, f64::max)
    }

    /// Strong ellipticity `a_ijrm ξ_r ξ_m ν_j ν_i ≥ μ |ξ|² |ν|²` at `t = 0`
    /// on interior nodes for sampled `ξ` and `ν`.
    pub fn validate(&self) -> Result<()> {
        if !(self.mu > 0.0) {
            return Err(Error::Spec(format!("ellipticity constant must be positive, got {}", self.mu)));
        }
        let n = self.grid.dim();
        let nc = self.ncomp;
        let xis = sample_directions(n);
        let nus = component_directions(nc);
        let a0: Vec<Option<&[f64]>> = self.a.iter().map(|c| c.get(0)).collect();
        for idx in (0..self.grid.len()).filter(|&i| self.grid.mask()[i]) {
            for xi in &xis {
                for nu in &nus {
                    let mut q = 0.0;
                    for i in 0..nc {
                        for j in 0..nc {
                            for r in 0..n {
                                for m in 0..n {
                                    if let Some(a) = a0[self.a_index(i, j, r, m)] {
                                        q += a[idx] * xi[r] * xi[m] * nu[j] * nu[i];
                                    }
                                }
                            }
                        }
                    }
                    if q < self.mu * (1.0 - 1e-12) {
                        return Err(Error::Spec(format!(
                            "strong ellipticity fails at {:?}: form = {q} < μ = {} for ξ = {xi:?}, ν = {nu:?}",
                            self.grid.point(idx),
                            self.mu
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

impl SpatialOperator for DivFormSystemSpec {
    fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    fn components(&self) -> usize {
        self.ncomp
    }

    fn coefficient_orders(&self) -> usize {
        self.a.iter().chain(&self.b).chain(&self.g).map(CoefficientSeries::len).max().unwrap_or(0)
    }

    fn apply(&self, t_order: usize, u: &SpatialField) -> SpatialField {
        assert_eq!(u.components(), self.ncomp, "component count mismatch");
        let grid = &*self.grid;
        let n = grid.dim();
        let len = grid.len();
        let nc = self.ncomp;
        let mut fwd: Vec<Option<Vec<f64>>> = vec![None; nc * n];
        let mut bwd: Vec<Option<Vec<f64>>> = vec![None; nc * n];
        let mut central: Vec<Option<Vec<f64>>> = vec![None; nc * n];
        let mut out = vec![0.0; nc * len];
        for i in 0..nc {
            let acc = &mut out[i * len..(i + 1) * len];
            for j in 0..nc {
                let uj = u.component(j);
                for r in 0..n {
                    for m in 0..n {
                        let Some(a) = self.a[self.a_index(i, j, r, m)].get(t_order) else {
                            continue;
                        };
                        let dp = fwd[j * n + m].get_or_insert_with(|| stencil::forward(grid, uj, m));
                        let p = stencil::mul(dp, a);
                        let dm = bwd[j * n + m].get_or_insert_with(|| stencil::backward(grid, uj, m));
                        let q = stencil::mul(dm, a);
                        let left = stencil::backward(grid, &p, r);
                        let right = stencil::forward(grid, &q, r);
                        for k in 0..len {
                            acc[k] += 0.5 * (left[k] + right[k]);
                        }
                    }
                }
                for m in 0..n {
                    if let Some(b) = self.b[self.b_index(i, j, m)].get(t_order) {
                        let d = central[j * n + m].get_or_insert_with(|| stencil::central(grid, uj, m, 1));
                        for k in 0..len {
                            acc[k] -= b[k] * d[k];
                        }
                    }
                }
                if let Some(g) = self.g[i * nc + j].get(t_order) {
                    for k in 0..len {
                        acc[k] -= g[k] * uj[k];
                    }
                }
            }
        }
        SpatialField::from_values(&self.grid, nc, out).expect("shape is consistent by construction")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::StencilOrder;
    use crate::geometry::Domain;
    use rand::{Rng, SeedableRng};

    fn line(n: usize) -> Arc<Grid> {
        Grid::uniform(&Domain::unit_box(1), &[0.0], &[1.0], &[n]).unwrap()
    }

    #[test]
    fn one_dimensional_laplacian() {
        let g = line(21);
        let spec = DivFormSystemSpec::diagonal(&g, 1, &CoefficientSeries::constant(&g, 1.0), 1.0);
        spec.validate().unwrap();
        let u = SpatialField::scalar(&g, |p| p[0] * p[0]);
        let b = spec.apply(0, &u);
        for idx in 2..19 {
            assert!((b.data()[idx] - 2.0).abs() < 1e-10, "{}", b.data()[idx]);
        }
    }

    #[test]
    fn zeroth_order_term() {
        let g = line(11);
        let mut spec = DivFormSystemSpec::zero(&g, 2, 1.0);
        for i in 0..2 {
            spec = spec.with_g(i, i, CoefficientSeries::constant(&g, 1.0));
        }
        let u = SpatialField::from_fn(&g, 2, |p, c| p[0] + c as f64);
        assert_eq!(spec.apply(0, &u), u.scale(-1.0));
    }

    #[test]
    fn constant_coefficients_match_dense_assembly() {
        // 2 components in 1-D on 11 nodes: explicit matrix of the compact
        // scheme, built entry by entry
        let g = Grid::uniform_with_stencil(&Domain::unit_box(1), &[0.0], &[1.0], &[11], StencilOrder::Second).unwrap();
        let h = g.spacing()[0];
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let mut r = || rng.gen_range(-1.0..1.0);
        let a = [[2.0 + r(), 0.3 * r()], [0.3 * r(), 2.0 + r()]];
        let b = [[r(), r()], [r(), r()]];
        let gg = [[r(), r()], [r(), r()]];
        let mut spec = DivFormSystemSpec::zero(&g, 2, 0.5);
        for i in 0..2 {
            for j in 0..2 {
                spec = spec
                    .with_a(i, j, 0, 0, CoefficientSeries::constant(&g, a[i][j]))
                    .with_b(i, j, 0, CoefficientSeries::constant(&g, b[i][j]))
                    .with_g(i, j, CoefficientSeries::constant(&g, gg[i][j]));
            }
        }
        spec.validate().unwrap();
        let n = 11;
        let mut mat = vec![vec![0.0; 2 * n]; 2 * n];
        for i in 0..2 {
            for p in 1..n - 1 {
                let row = i * n + p;
                for j in 0..2 {
                    let col = |q: usize| j * n + q;
                    mat[row][col(p - 1)] += a[i][j] / (h * h) + b[i][j] / (2.0 * h);
                    mat[row][col(p)] += -2.0 * a[i][j] / (h * h) - gg[i][j];
                    mat[row][col(p + 1)] += a[i][j] / (h * h) - b[i][j] / (2.0 * h);
                }
            }
        }
        let values: Vec<f64> = (0..2 * n).map(|_| r()).collect();
        let u = SpatialField::from_values(&g, 2, values).unwrap();
        let got = spec.apply(0, &u);
        let scale = got.linf();
        for row in 0..2 * n {
            let e: f64 = (0..2 * n).map(|c| mat[row][c] * u.data()[c]).sum();
            assert!((got.data()[row] - e).abs() <= 1e-13 * scale, "row {row}");
        }
    }
}
