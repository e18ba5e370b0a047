// SPDX-License-Identifier: Apache-2.0

//! Closed-form probability and size bounds the experiments compare against.

use core::f64::consts::{E, LN_2, PI, SQRT_2};

use crate::error::{Error, Result};

/// Lower bound on the probability that comprehensive search visits every
/// leaf when the density is bounded by `density_max` and
/// `d >= log2(n / n0)`. Returns `None` outside that regime.
pub fn all_leaves_visited_lower_bound(
    n: usize,
    n0: usize,
    d: usize,
    density_max: f64,
) -> Option<f64> {
    let levels = libm::log2(n as f64 / n0 as f64);
    let df = d as f64;
    if df < levels {
        return None;
    }
    let ln_term = (df / 2.0) * libm::log(2.0 * PI * E * levels / df);
    Some(1.0 - n as f64 * density_max * libm::exp(ln_term))
}

/// Ceiling on comprehensive-search visits for uniform data, `4 (8 sqrt(2 pi e))^d`.
pub fn visited_cells_ceiling(d: usize) -> f64 {
    4.0 * libm::pow(8.0 * libm::sqrt(2.0 * PI * E), d as f64)
}

/// `((sqrt 2 - 1) ln 2 / 8)^2`, the exponent constant of the cell-regularity bound.
pub fn cell_regularity_constant() -> f64 {
    let c1 = (SQRT_2 - 1.0) * LN_2 / 8.0;
    c1 * c1
}

/// Lower bound `1 - 3 n exp(-c n0)` on every leaf being regular.
pub fn cell_regularity_lower_bound(n: usize, n0: usize) -> f64 {
    1.0 - 3.0 * n as f64 * libm::exp(-cell_regularity_constant() * n0 as f64)
}

/// Admissible leaf-mass window `[n0 / 2n, 2 n0 / n]`.
pub fn leaf_mass_window(n: usize, n0: usize) -> (f64, f64) {
    let ratio = n0 as f64 / n as f64;
    (ratio / 2.0, 2.0 * ratio)
}

/// Largest aspect ratio a regular leaf may have.
pub const MAX_REGULAR_ASPECT: f64 = 4.0;

/// Expected L1 leaf diameter bound `6 d (n0 / n)^{1/d}`.
pub fn leaf_l1_diameter_bound(n: usize, n0: usize, d: usize) -> f64 {
    6.0 * d as f64 * libm::pow(n0 as f64 / n as f64, 1.0 / d as f64)
}

/// Tail bound for the median of `n` points on `[0, t]` of which `k` are
/// fixed: `P(|M - t/2| >= delta) <= 2 exp(-2 (n-k) (delta/t - k/(2(n-k)))^2)`.
/// Fails unless `delta / t > k / (2 (n - k))`.
pub fn fixed_point_median_tail_bound(n: usize, k: usize, t: f64, delta: f64) -> Result<f64> {
    if k >= n {
        return Err(Error::Hypothesis("need k < n random points"));
    }
    if t.is_nan() || t <= 0.0 {
        return Err(Error::Hypothesis("need t > 0"));
    }
    let m = (n - k) as f64;
    let slack = k as f64 / (2.0 * m);
    let ratio = delta / t;
    if ratio.is_nan() || ratio <= slack {
        return Err(Error::Hypothesis("need delta / t > k / (2 (n - k))"));
    }
    let gap = ratio - slack;
    Ok(2.0 * libm::exp(-2.0 * m * gap * gap))
}

/// Lower bound on the defeatist success probability for uniform data,
/// `1 - 3 n exp(-c n0) - 24 d^{3/2} (log2 n0 / n0)^{1/d}`.
pub fn defeatist_success_lower_bound(n: usize, n0: usize, d: usize) -> f64 {
    let n0f = n0 as f64;
    let df = d as f64;
    cell_regularity_lower_bound(n, n0)
        - 24.0 * libm::pow(df, 1.5) * libm::pow(libm::log2(n0f) / n0f, 1.0 / df)
}
