//! Raw difference kernels over full-grid arrays.
//!
//! Reads outside the grid are zero. The `masked` kernels choose their stencil
//! per node and zero the output outside the mask; the one-sided and compact
//! kernels are applied everywhere so they can be composed around pointwise
//! coefficient products before a final mask.

use rayon::prelude::*;

use super::{Grid, StencilOrder};

const PAR_THRESHOLD: usize = 16_384;

pub(crate) fn fill(len: usize, f: impl Fn(usize) -> f64 + Sync + Send) -> Vec<f64> {
    if len >= PAR_THRESHOLD {
        (0..len).into_par_iter().map(f).collect()
    } else {
        (0..len).map(f).collect()
    }
}

#[inline]
fn read(src: &[f64], grid: &Grid, idx: usize, axis: usize, offset: isize) -> f64 {
    let i = grid.axis_index(idx, axis) as isize + offset;
    if i < 0 || i >= grid.count(axis) as isize {
        0.0
    } else {
        let s = grid.stride(axis) as isize;
        src[(idx as isize + offset * s) as usize]
    }
}

#[inline]
fn fourth_order_fits(grid: &Grid, idx: usize, axis: usize) -> bool {
    if grid.stencil() != StencilOrder::Fourth {
        return false;
    }
    let i = grid.axis_index(idx, axis);
    let n = grid.count(axis);
    if i < 2 || i + 2 >= n {
        return false;
    }
    let s = grid.stride(axis);
    let mask = grid.mask();
    mask[idx - s] && mask[idx + s]
}

/// Central first (`order == 1`) or second (`order == 2`) derivative along
/// `axis`, masked.
pub(crate) fn central(grid: &Grid, src: &[f64], axis: usize, order: u8) -> Vec<f64> {
    let h = grid.spacing[axis];
    let mask = grid.mask();
    fill(grid.len(), |idx| {
        if !mask[idx] {
            return 0.0;
        }
        let r = |o| read(src, grid, idx, axis, o);
        let wide = fourth_order_fits(grid, idx, axis);
        match (order, wide) {
            (1, false) => (r(1) - r(-1)) / (2.0 * h),
            (1, true) => (-r(2) + 8.0 * r(1) - 8.0 * r(-1) + r(-2)) / (12.0 * h),
            (_, false) => (r(1) - 2.0 * r(0) + r(-1)) / (h * h),
            (_, true) => (-r(2) + 16.0 * r(1) - 30.0 * r(0) + 16.0 * r(-1) - r(-2)) / (12.0 * h * h),
        }
    })
}

/// `(u[i+1] - u[i]) / h`, unmasked.
pub(crate) fn forward(grid: &Grid, src: &[f64], axis: usize) -> Vec<f64> {
    let h = grid.spacing[axis];
    fill(grid.len(), |idx| (read(src, grid, idx, axis, 1) - src[idx]) / h)
}

/// `(u[i] - u[i-1]) / h`, unmasked.
pub(crate) fn backward(grid: &Grid, src: &[f64], axis: usize) -> Vec<f64> {
    let h = grid.spacing[axis];
    fill(grid.len(), |idx| (src[idx] - read(src, grid, idx, axis, -1)) / h)
}

/// Three-point second difference, unmasked.
pub(crate) fn compact_second(grid: &Grid, src: &[f64], axis: usize) -> Vec<f64> {
    let h = grid.spacing[axis];
    fill(grid.len(), |idx| {
        (read(src, grid, idx, axis, 1) - 2.0 * src[idx] + read(src, grid, idx, axis, -1)) / (h * h)
    })
}

pub(crate) fn apply_mask(grid: &Grid, v: &mut [f64]) {
    for (x, &m) in v.iter_mut().zip(grid.mask()) {
        if !m {
            *x = 0.0;
        }
    }
}

pub(crate) fn mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x * y).collect()
}
