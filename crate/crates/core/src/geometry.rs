//! Spatial domains: signed distance, boundary projection and grid masks.
//!
//! Signed distance is negative inside, positive outside and zero on the
//! boundary `S`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::Grid;
use crate::linalg;

/// Half-space `normal · x - offset ≤ 0`. The domain interior is where every
/// face function is negative.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HalfSpace {
    pub normal: Vec<f64>,
    pub offset: f64,
}

impl HalfSpace {
    pub fn new(normal: Vec<f64>, offset: f64) -> Self {
        Self { normal, offset }
    }

    /// Face function value (not normalized).
    pub fn value(&self, x: &[f64]) -> f64 {
        dot(&self.normal, x) - self.offset
    }

    fn signed_distance(&self, x: &[f64]) -> f64 {
        self.value(x) / norm(&self.normal)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Domain {
    Box { lower: Vec<f64>, upper: Vec<f64> },
    Ball { center: Vec<f64>, radius: f64 },
    /// `Σ ((x_i - center_i) / semi_axes_i)^2 = level^2` on the boundary.
    Ellipsoid {
        center: Vec<f64>,
        semi_axes: Vec<f64>,
        level: f64,
    },
    ConvexPolytope { faces: Vec<HalfSpace> },
}

impl Domain {
    pub fn unit_box(dim: usize) -> Domain {
        Domain::Box {
            lower: vec![0.0; dim],
            upper: vec![1.0; dim],
        }
    }

    /// Axis-aligned box written as a polytope, faces ordered
    /// `-x1, +x1, -x2, +x2, ...`.
    pub fn box_polytope(lower: &[f64], upper: &[f64]) -> Domain {
        let n = lower.len();
        let mut faces = Vec::with_capacity(2 * n);
        for i in 0..n {
            let mut e = vec![0.0; n];
            e[i] = -1.0;
            faces.push(HalfSpace::new(e.clone(), -lower[i]));
            e[i] = 1.0;
            faces.push(HalfSpace::new(e, upper[i]));
        }
        Domain::ConvexPolytope { faces }
    }

    pub fn dim(&self) -> usize {
        match self {
            Domain::Box { lower, .. } => lower.len(),
            Domain::Ball { center, .. } | Domain::Ellipsoid { center, .. } => center.len(),
            Domain::ConvexPolytope { faces } => faces.first().map_or(0, |f| f.normal.len()),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.dim();
        if !(1..=3).contains(&n) {
            return Err(Error::Domain(format!("dimension must be 1, 2 or 3, got {n}")));
        }
        match self {
            Domain::Box { lower, upper } => {
                if upper.len() != n {
                    return Err(Error::Dimension { expected: n, got: upper.len() });
                }
                for (i, (l, u)) in lower.iter().zip(upper).enumerate() {
                    if !(l.is_finite() && u.is_finite() && l < u) {
                        return Err(Error::Domain(format!(
                            "box bounds on axis {i} must be finite and strictly ordered, got [{l}, {u}]"
                        )));
                    }
                }
            }
            Domain::Ball { radius, .. } => {
                if !(radius.is_finite() && *radius > 0.0) {
                    return Err(Error::Domain(format!("ball radius must be positive, got {radius}")));
                }
            }
            Domain::Ellipsoid { semi_axes, level, .. } => {
                if semi_axes.len() != n {
                    return Err(Error::Dimension { expected: n, got: semi_axes.len() });
                }
                if semi_axes.iter().any(|b| !(b.is_finite() && *b > 0.0)) {
                    return Err(Error::Domain("ellipsoid semi-axes must be positive".into()));
                }
                if !(level.is_finite() && *level > 0.0) {
                    return Err(Error::Domain(format!("ellipsoid level must be positive, got {level}")));
                }
            }
            Domain::ConvexPolytope { faces } => {
                for (k, f) in faces.iter().enumerate() {
                    if f.normal.len() != n {
                        return Err(Error::Dimension { expected: n, got: f.normal.len() });
                    }
                    if norm(&f.normal) == 0.0 || !f.offset.is_finite() {
                        return Err(Error::Domain(format!("face {k} is degenerate")));
                    }
                }
                if faces.len() < n + 1 {
                    return Err(Error::Domain(format!(
                        "a bounded polytope in {n} dimensions needs at least {} faces",
                        n + 1
                    )));
                }
                let (_, r) = self.chebyshev_center().ok_or_else(|| {
                    Error::Domain("polytope has no strictly feasible point".into())
                })?;
                if r <= 0.0 {
                    return Err(Error::Domain("polytope interior is empty".into()));
                }
                if self.polytope_vertices().is_empty() {
                    return Err(Error::Domain("polytope is unbounded".into()));
                }
            }
        }
        Ok(())
    }

    fn check_dim(&self, point: &[f64]) -> Result<()> {
        if point.len() != self.dim() {
            return Err(Error::Dimension { expected: self.dim(), got: point.len() });
        }
        Ok(())
    }

    pub fn signed_distance(&self, point: &[f64]) -> Result<f64> {
        self.check_dim(point)?;
        Ok(self.distance_unchecked(point))
    }

    pub(crate) fn distance_unchecked(&self, x: &[f64]) -> f64 {
        match self {
            Domain::Box { lower, upper } => {
                let mut outside = 0.0;
                let mut inside = f64::INFINITY;
                for i in 0..x.len() {
                    let below = lower[i] - x[i];
                    let above = x[i] - upper[i];
                    let excess = below.max(above);
                    if excess > 0.0 {
                        outside += excess * excess;
                    }
                    inside = inside.min(-excess);
                }
                if outside > 0.0 {
                    outside.sqrt()
                } else {
                    -inside
                }
            }
            Domain::Ball { center, radius } => dist(x, center) - radius,
            Domain::Ellipsoid { .. } => {
                let (p, omega) = self.ellipsoid_nearest(x);
                let d = dist(x, &p);
                if omega < 0.0 {
                    -d
                } else {
                    d
                }
            }
            Domain::ConvexPolytope { faces } => faces
                .iter()
                .map(|f| f.signed_distance(x))
                .fold(f64::NEG_INFINITY, f64::max),
        }
    }

    /// Nearest boundary point of an interior (or boundary) point. Ties go to
    /// the lowest face index; box faces are ordered `-x1, +x1, -x2, ...`.
    pub fn project_to_boundary(&self, point: &[f64]) -> Result<Vec<f64>> {
        self.check_dim(point)?;
        let d = self.distance_unchecked(point);
        if d > 1e-12 * self.diameter() {
            return Err(Error::OutsideDomain { point: point.to_vec(), distance: d });
        }
        Ok(self.project_unchecked(point))
    }

    pub(crate) fn project_unchecked(&self, x: &[f64]) -> Vec<f64> {
        match self {
            Domain::Box { lower, upper } => {
                let mut best = (f64::INFINITY, 0, 0.0);
                for i in 0..x.len() {
                    for (target, gap) in [(lower[i], x[i] - lower[i]), (upper[i], upper[i] - x[i])] {
                        if gap < best.0 {
                            best = (gap, i, target);
                        }
                    }
                }
                let mut p = x.to_vec();
                p[best.1] = best.2;
                // points outside past a corner land on the corner region
                for (i, v) in p.iter_mut().enumerate() {
                    *v = v.clamp(lower[i], upper[i]);
                }
                p
            }
            Domain::Ball { center, radius } => {
                let r = dist(x, center);
                if r == 0.0 {
                    let mut p = center.clone();
                    p[0] += radius;
                    return p;
                }
                center
                    .iter()
                    .zip(x)
                    .map(|(c, xi)| c + radius * (xi - c) / r)
                    .collect()
            }
            Domain::Ellipsoid { .. } => self.ellipsoid_nearest(x).0,
            Domain::ConvexPolytope { faces } => {
                let mut best = (f64::NEG_INFINITY, 0);
                for (k, f) in faces.iter().enumerate() {
                    let d = f.signed_distance(x);
                    if d > best.0 {
                        best = (d, k);
                    }
                }
                let face = &faces[best.1];
                let nn = norm(&face.normal);
                x.iter()
                    .zip(&face.normal)
                    .map(|(xi, ni)| xi - best.0 * ni / nn)
                    .collect()
            }
        }
    }

    /// Mask of grid nodes with negative signed distance.
    pub fn interior_mask(&self, grid: &Grid) -> Vec<bool> {
        (0..grid.len())
            .map(|idx| self.distance_unchecked(&grid.point(idx)) < 0.0)
            .collect()
    }

    /// The defining level function: `Σ (x_i - c_i)^2 / b_i^2 - level^2` for
    /// balls and ellipsoids (negative inside), and `±Π f_k` with the sign
    /// chosen positive inside for polytopes. Boxes use their polytope form.
    pub fn level_function(&self, x: &[f64]) -> f64 {
        match self {
            Domain::Ball { center, radius } => {
                x.iter().zip(center).map(|(a, c)| (a - c).powi(2)).sum::<f64>() - radius * radius
            }
            Domain::Ellipsoid { center, semi_axes, level } => {
                x.iter()
                    .zip(center)
                    .zip(semi_axes)
                    .map(|((a, c), b)| ((a - c) / b).powi(2))
                    .sum::<f64>()
                    - level * level
            }
            Domain::ConvexPolytope { faces } => {
                let sign = if faces.len() % 2 == 0 { 1.0 } else { -1.0 };
                sign * faces.iter().map(|f| f.value(x)).product::<f64>()
            }
            Domain::Box { lower, upper } => Domain::box_polytope(lower, upper).level_function(x),
        }
    }

    /// Radius of the largest inscribed ball.
    pub fn inradius(&self) -> f64 {
        match self {
            Domain::Box { lower, upper } => lower
                .iter()
                .zip(upper)
                .map(|(l, u)| 0.5 * (u - l))
                .fold(f64::INFINITY, f64::min),
            Domain::Ball { radius, .. } => *radius,
            Domain::Ellipsoid { semi_axes, level, .. } => {
                level * semi_axes.iter().cloned().fold(f64::INFINITY, f64::min)
            }
            Domain::ConvexPolytope { .. } => self.chebyshev_center().map_or(0.0, |(_, r)| r),
        }
    }

    pub fn diameter(&self) -> f64 {
        match self {
            Domain::Box { lower, upper } => dist(lower, upper),
            Domain::Ball { radius, .. } => 2.0 * radius,
            Domain::Ellipsoid { semi_axes, level, .. } => {
                2.0 * level * semi_axes.iter().cloned().fold(0.0, f64::max)
            }
            Domain::ConvexPolytope { .. } => {
                let v = self.polytope_vertices();
                let mut d: f64 = 0.0;
                for a in &v {
                    for b in &v {
                        d = d.max(dist(a, b));
                    }
                }
                d
            }
        }
    }

    /// Axis-aligned bounding box `(lower, upper)`.
    pub fn bounding_box(&self) -> (Vec<f64>, Vec<f64>) {
        match self {
            Domain::Box { lower, upper } => (lower.clone(), upper.clone()),
            Domain::Ball { center, radius } => (
                center.iter().map(|c| c - radius).collect(),
                center.iter().map(|c| c + radius).collect(),
            ),
            Domain::Ellipsoid { center, semi_axes, level } => (
                center.iter().zip(semi_axes).map(|(c, b)| c - level * b).collect(),
                center.iter().zip(semi_axes).map(|(c, b)| c + level * b).collect(),
            ),
            Domain::ConvexPolytope { .. } => {
                let n = self.dim();
                let mut lo = vec![f64::INFINITY; n];
                let mut hi = vec![f64::NEG_INFINITY; n];
                for v in self.polytope_vertices() {
                    for i in 0..n {
                        lo[i] = lo[i].min(v[i]);
                        hi[i] = hi[i].max(v[i]);
                    }
                }
                (lo, hi)
            }
        }
    }

    /// Chebyshev center found by enumerating sets of `n + 1` active faces.
    fn chebyshev_center(&self) -> Option<(Vec<f64>, f64)> {
        let Domain::ConvexPolytope { faces } = self else {
            return None;
        };
        let n = self.dim();
        let norms: Vec<f64> = faces.iter().map(|f| norm(&f.normal)).collect();
        let mut best: Option<(Vec<f64>, f64)> = None;
        for combo in combinations(faces.len(), n + 1) {
            let mut a = vec![0.0; (n + 1) * (n + 1)];
            let mut b = vec![0.0; n + 1];
            for (row, &k) in combo.iter().enumerate() {
                a[row * (n + 1)..row * (n + 1) + n].copy_from_slice(&faces[k].normal);
                a[row * (n + 1) + n] = norms[k];
                b[row] = faces[k].offset;
            }
            let Some(sol) = linalg::solve_dense(&mut a, &mut b, n + 1) else {
                continue;
            };
            let (x, r) = (&sol[..n], sol[n]);
            let feasible = faces
                .iter()
                .zip(&norms)
                .all(|(f, nn)| f.value(x) + r * nn <= 1e-10 * (1.0 + f.offset.abs()));
            if feasible && best.as_ref().map_or(true, |(_, rb)| r > *rb) {
                best = Some((x.to_vec(), r));
            }
        }
        best
    }

    fn polytope_vertices(&self) -> Vec<Vec<f64>> {
        let Domain::ConvexPolytope { faces } = self else {
            return Vec::new();
        };
        let n = self.dim();
        let mut out = Vec::new();
        for combo in combinations(faces.len(), n) {
            let mut a = Vec::with_capacity(n * n);
            let mut b = Vec::with_capacity(n);
            for &k in &combo {
                a.extend_from_slice(&faces[k].normal);
                b.push(faces[k].offset);
            }
            if let Some(v) = linalg::solve_dense(&mut a, &mut b, n) {
                if faces.iter().all(|f| f.value(&v) <= 1e-10 * (1.0 + f.offset.abs())) {
                    out.push(v);
                }
            }
        }
        out
    }

    /// Nearest point on an ellipsoid surface and the level function at `x`.
    ///
    /// Works on the centered, reflected point `y ≥ 0` and solves
    /// `Σ (e_i y_i / (e_i^2 + s))^2 = 1` for the Lagrange parameter `s` by a
    /// Newton iteration safeguarded with bisection.
    fn ellipsoid_nearest(&self, x: &[f64]) -> (Vec<f64>, f64) {
        let Domain::Ellipsoid { center, semi_axes, level } = self else {
            unreachable!("ellipsoid_nearest on a non-ellipsoid")
        };
        let n = x.len();
        let e: Vec<f64> = semi_axes.iter().map(|b| b * level).collect();
        let y: Vec<f64> = x.iter().zip(center).map(|(a, c)| (a - c).abs()).collect();
        let omega = self.level_function(x);
        let active: Vec<usize> = (0..n).filter(|&i| y[i] > 0.0).collect();

        let p_abs: Vec<f64> = if active.is_empty() {
            // at the center: nearest point is the end of the shortest axis
            let k = argmin(&e);
            let mut p = vec![0.0; n];
            p[k] = e[k];
            p
        } else {
            let f = |s: f64| -> (f64, f64) {
                let mut v = -1.0;
                let mut dv = 0.0;
                for &i in &active {
                    let r = e[i] * y[i] / (e[i] * e[i] + s);
                    v += r * r;
                    dv -= 2.0 * r * r / (e[i] * e[i] + s);
                }
                (v, dv)
            };
            let e_act_min = active.iter().map(|&i| e[i]).fold(f64::INFINITY, f64::min);
            let e_min = e.iter().cloned().fold(f64::INFINITY, f64::min);
            // degenerate branch: a zero coordinate on a strictly shorter axis
            if e_min < e_act_min {
                let k = argmin(&e);
                let s = -e[k] * e[k];
                let mut p = vec![0.0; n];
                let mut acc = 0.0;
                for &i in &active {
                    p[i] = e[i] * e[i] * y[i] / (e[i] * e[i] + s);
                    acc += (p[i] / e[i]).powi(2);
                }
                if acc <= 1.0 {
                    p[k] = e[k] * (1.0 - acc).sqrt();
                    return (reflect(&p, x, center), omega);
                }
            }
            let mut lo = active
                .iter()
                .map(|&i| -e[i] * e[i] + e[i] * y[i])
                .fold(f64::NEG_INFINITY, f64::max);
            let mut hi = -e_act_min * e_act_min
                + active.iter().map(|&i| (e[i] * y[i]).powi(2)).sum::<f64>().sqrt();
            hi = hi.max(lo);
            let mut s = if omega < 0.0 { lo.max(-e_act_min * e_act_min * 0.5).min(hi) } else { 0.5 * (lo + hi) };
            for _ in 0..100 {
                let (v, dv) = f(s);
                if v > 0.0 {
                    lo = s;
                } else {
                    hi = s;
                }
                let mut next = s - v / dv;
                if !(next > lo && next < hi) || !next.is_finite() {
                    next = 0.5 * (lo + hi);
                }
                let scale = e_act_min * e_act_min;
                if (next - s).abs() <= 1e-13 * scale || hi - lo <= 1e-13 * scale {
                    s = next;
                    break;
                }
                s = next;
            }
            let p: Vec<f64> = (0..n)
                .map(|i| if y[i] > 0.0 { e[i] * e[i] * y[i] / (e[i] * e[i] + s) } else { 0.0 })
                .collect();
            // pull the residual of the multiplier back onto the surface; the
            // shift is tangential to first order so the distance is unchanged
            let level: f64 = p.iter().zip(&e).map(|(pi, ei)| (pi / ei).powi(2)).sum();
            p.iter().map(|pi| pi / level.sqrt()).collect()
        };
        (reflect(&p_abs, x, center), omega)
    }
}

fn reflect(p_abs: &[f64], x: &[f64], center: &[f64]) -> Vec<f64> {
    p_abs
        .iter()
        .zip(x.iter().zip(center))
        .map(|(p, (xi, c))| if xi < c { c - p } else { c + p })
        .collect()
}

fn argmin(v: &[f64]) -> usize {
    let mut k = 0;
    for i in 1..v.len() {
        if v[i] < v[k] {
            k = i;
        }
    }
    k
}

fn combinations(n: usize, r: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if r > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..r).collect();
    loop {
        out.push(idx.clone());
        let mut i = r;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if idx[i] != i + n - r {
                break;
            }
            if i == 0 {
                return out;
            }
        }
        idx[i] += 1;
        for j in i + 1..r {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}
