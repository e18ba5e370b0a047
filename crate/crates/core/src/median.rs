// SPDX-License-Identifier: Apache-2.0

use alloc::vec::Vec;

use crate::error::{Error, Result};

/// 0-based rank of the median among `n` values: the `ceil(n/2)`-th smallest.
#[inline]
pub fn median_rank(n: usize) -> usize {
    n.div_ceil(2) - 1
}

/// The `ceil(N/2)`-th smallest of `values` (1-indexed order statistics).
pub fn median_order_statistic(values: &[f64]) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut scratch: Vec<f64> = values.to_vec();
    Ok(select_median_in_place(&mut scratch))
}

/// Expected-linear-time selection; reorders `values`. Panics on empty input.
pub(crate) fn select_median_in_place(values: &mut [f64]) -> f64 {
    let k = median_rank(values.len());
    let (_, m, _) = values.select_nth_unstable_by(k, f64::total_cmp);
    *m
}


/// Median of `random` together with `k` copies of `fixed`, using `scratch`
/// as working space.
pub fn median_with_fixed_points(
    random: &[f64],
    fixed: f64,
    k: usize,
    scratch: &mut Vec<f64>,
) -> f64 {
    scratch.clear();
    scratch.extend_from_slice(random);
    scratch.extend(core::iter::repeat_n(fixed, k));
    select_median_in_place(scratch)
}
