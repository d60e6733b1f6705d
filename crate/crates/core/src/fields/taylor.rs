use std::sync::Arc;

use super::{Grid, SpatialField};
use crate::error::{Error, Result};

/// Normalized time-Taylor series `u(x, t) ≈ Σ c_k(x) t^k` with
/// `c_k = (1/k!) ∂^k u/∂t^k (·, 0)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TaylorField {
    coeffs: Vec<SpatialField>,
}

impl TaylorField {
    pub fn new(coeffs: Vec<SpatialField>) -> Result<Self> {
        let first = coeffs
            .first()
            .ok_or_else(|| Error::Incompatible("a series needs at least one coefficient".into()))?;
        for c in &coeffs[1..] {
            first.check_grid(c)?;
            if c.components() != first.components() {
                return Err(Error::Incompatible("coefficients differ in component count".into()));
            }
        }
        Ok(Self { coeffs })
    }

    pub fn constant(c0: SpatialField) -> Self {
        Self { coeffs: vec![c0] }
    }

    /// `order + 1` zero coefficients.
    pub fn zeros(grid: &Arc<Grid>, ncomp: usize, order: usize) -> Self {
        Self {
            coeffs: vec![SpatialField::zeros(grid, ncomp); order + 1],
        }
    }

    pub fn grid(&self) -> &Arc<Grid> {
        self.coeffs[0].grid()
    }

    pub fn components(&self) -> usize {
        self.coeffs[0].components()
    }

    /// Highest stored power of `t`.
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn coeff(&self, k: usize) -> &SpatialField {
        &self.coeffs[k]
    }

    pub fn get(&self, k: usize) -> Option<&SpatialField> {
        self.coeffs.get(k)
    }

    pub fn coeffs(&self) -> &[SpatialField] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<SpatialField> {
        self.coeffs
    }

    pub fn push(&mut self, c: SpatialField) -> Result<()> {
        self.coeffs[0].check_grid(&c)?;
        if c.components() != self.components() {
            return Err(Error::Incompatible("coefficient component count differs".into()));
        }
        self.coeffs.push(c);
        Ok(())
    }

    /// Horner evaluation of the partial sum at time `t`.
    pub fn eval(&self, t: f64) -> SpatialField {
        if t == 0.0 {
            return self.coeffs[0].clone();
        }
        let mut acc = self.coeffs[self.order()].clone();
        for c in self.coeffs[..self.order()].iter().rev() {
            acc = acc.zip_with(c, |a, b| a * t + b);
        }
        acc
    }

    /// Series of `∂u/∂t`: coefficients `(k + 1) c_{k+1}`.
    pub fn time_derivative(&self) -> TaylorField {
        if self.coeffs.len() == 1 {
            return Self::constant(SpatialField::zeros(self.grid(), self.components()));
        }
        Self {
            coeffs: self.coeffs[1..]
                .iter()
                .enumerate()
                .map(|(k, c)| c.scale((k + 1) as f64))
                .collect(),
        }
    }

    /// Coefficients `0..=l`; missing orders are zero.
    pub fn truncate(&self, l: usize) -> TaylorField {
        let mut coeffs: Vec<SpatialField> = self.coeffs.iter().take(l + 1).cloned().collect();
        while coeffs.len() < l + 1 {
            coeffs.push(SpatialField::zeros(self.grid(), self.components()));
        }
        Self { coeffs }
    }

    /// Coefficients `0..=m` of the pointwise product series
    /// `(AB)_k = Σ_p A_p B_{k-p}`; orders beyond either input count as zero.
    pub fn cauchy_product(&self, other: &TaylorField, m: usize) -> Result<TaylorField> {
        self.coeffs[0].check_grid(&other.coeffs[0])?;
        let ncomp = match (self.components(), other.components()) {
            (a, b) if a == b => a,
            (1, b) => b,
            (a, 1) => a,
            (a, b) => {
                return Err(Error::Incompatible(format!("cannot multiply {a}- and {b}-component series")))
            }
        };
        let mut out = Vec::with_capacity(m + 1);
        for k in 0..=m {
            let mut acc = SpatialField::zeros(self.grid(), ncomp);
            for p in 0..=k {
                if let (Some(a), Some(b)) = (self.get(p), other.get(k - p)) {
                    acc.add_assign_unchecked(&a.mul(b)?);
                }
            }
            out.push(acc);
        }
        Ok(Self { coeffs: out })
    }

    pub fn add(&self, other: &TaylorField) -> Result<TaylorField> {
        let n = self.len().max(other.len());
        let a = self.truncate(n - 1);
        let b = other.truncate(n - 1);
        let coeffs = a
            .coeffs
            .iter()
            .zip(&b.coeffs)
            .map(|(x, y)| x.add(y))
            .collect::<Result<_>>()?;
        Ok(Self { coeffs })
    }

    pub fn sub(&self, other: &TaylorField) -> Result<TaylorField> {
        self.add(&other.scale(-1.0))
    }

    pub fn scale(&self, s: f64) -> TaylorField {
        Self {
            coeffs: self.coeffs.iter().map(|c| c.scale(s)).collect(),
        }
    }

    pub fn coeff_norms(&self) -> Vec<f64> {
        self.coeffs.iter().map(SpatialField::linf).collect()
    }

    /// Largest coefficient-wise `‖a_k - b_k‖∞ / ‖b_k‖∞` over common orders,
    /// with zero reference coefficients compared absolutely.
    pub fn max_relative_diff(&self, reference: &TaylorField) -> f64 {
        self.coeffs
            .iter()
            .zip(&reference.coeffs)
            .map(|(a, b)| {
                let d = a.max_abs_diff(b);
                let s = b.linf();
                if s > 0.0 {
                    d / s
                } else {
                    d
                }
            })
            .fold(0.0, f64::max)
    }
}
