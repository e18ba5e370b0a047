// SPDX-License-Identifier: Apache-2.0

//! Closed axis-aligned rectangles and the ball/volume formulas used by search
//! and by the cell audits.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{Error, Result};

/// A closed box `[lo_0, hi_0] x ... x [lo_{d-1}, hi_{d-1}]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Rect {
    lo: Vec<f64>,
    hi: Vec<f64>,
}

impl Rect {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() {
            return Err(Error::DimensionMismatch {
                expected: lo.len(),
                found: hi.len(),
            });
        }
        if lo.is_empty() {
            return Err(Error::ZeroDimension);
        }
        for (a, b) in lo.iter().zip(&hi) {
            if !a.is_finite() || !b.is_finite() {
                return Err(Error::InvalidRect("non-finite bound"));
            }
            if a > b {
                return Err(Error::InvalidRect("lo exceeds hi"));
            }
        }
        Ok(Rect { lo, hi })
    }

    pub fn unit_cube(d: usize) -> Self {
        Rect {
            lo: alloc::vec![0.0; d],
            hi: alloc::vec![1.0; d],
        }
    }

    /// `[a, b]^d`.
    pub fn cube(d: usize, a: f64, b: f64) -> Result<Self> {
        Rect::new(alloc::vec![a; d], alloc::vec![b; d])
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    #[inline]
    pub fn lo(&self) -> &[f64] {
        &self.lo
    }

    #[inline]
    pub fn hi(&self) -> &[f64] {
        &self.hi
    }

    #[inline]
    pub fn side(&self, axis: usize) -> f64 {
        self.hi[axis] - self.lo[axis]
    }

    pub fn sides(&self) -> impl Iterator<Item = f64> + '_ {
        self.lo.iter().zip(&self.hi).map(|(a, b)| b - a)
    }

    pub fn contains(&self, q: &[f64]) -> bool {
        q.len() == self.dim()
            && q.iter()
                .zip(self.lo.iter().zip(&self.hi))
                .all(|(x, (a, b))| a <= x && x <= b)
    }

    /// Clips at `x[axis] <= threshold` (left) and `x[axis] >= threshold` (right).
    pub fn split(&self, axis: usize, threshold: f64) -> (Rect, Rect) {
        let s = threshold.clamp(self.lo[axis], self.hi[axis]);
        let mut left = self.clone();
        let mut right = self.clone();
        left.hi[axis] = s;
        right.lo[axis] = s;
        (left, right)
    }

    pub fn volume(&self) -> f64 {
        self.sides().product()
    }

    pub fn l1_diameter(&self) -> f64 {
        self.sides().sum()
    }

    pub fn l2_diameter(&self) -> f64 {
        libm::sqrt(self.sides().map(|s| s * s).sum())
    }

    /// Longest side over shortest side.
    pub fn aspect_ratio(&self) -> Result<f64> {
        let mut min = f64::INFINITY;
        let mut max = 0.0f64;
        for (axis, s) in self.sides().enumerate() {
            if s <= 0.0 {
                return Err(Error::DegenerateSide { axis });
            }
            min = min.min(s);
            max = max.max(s);
        }
        Ok(max / min)
    }

    /// The points at distance at least `t` from the boundary.
    pub fn inset(&self, t: f64) -> Result<Rect> {
        let max = self.sides().fold(f64::INFINITY, f64::min) / 2.0;
        if t.is_nan() || t < 0.0 || t > max {
            return Err(Error::InsetTooLarge { t, max });
        }
        Ok(Rect {
            lo: self.lo.iter().map(|a| a + t).collect(),
            hi: self.hi.iter().map(|b| b - t).collect(),
        })
    }

    pub fn dist_to_point(&self, q: &[f64]) -> Result<f64> {
        dist_point_to_rect(q, self)
    }
}

/// Euclidean distance from `q` to the closed rectangle; zero iff `q` is inside.
pub fn dist_point_to_rect(q: &[f64], r: &Rect) -> Result<f64> {
    if q.len() != r.dim() {
        return Err(Error::DimensionMismatch {
            expected: r.dim(),
            found: q.len(),
        });
    }
    Ok(dist_to_box(q, &r.lo, &r.hi))
}

/// Unchecked form of [`dist_point_to_rect`] over raw bound slices.
#[inline]
pub fn dist_to_box(q: &[f64], lo: &[f64], hi: &[f64]) -> f64 {
    let mut acc = 0.0;
    for ((x, a), b) in q.iter().zip(lo).zip(hi) {
        let t = if x < a {
            a - x
        } else if x > b {
            x - b
        } else {
            0.0
        };
        acc += t * t;
    }
    libm::sqrt(acc)
}

/// Whether `r` meets the open ball `{y : |y - center| < radius}`.
pub fn rect_intersects_open_ball(r: &Rect, center: &[f64], radius: f64) -> bool {
    debug_assert_eq!(center.len(), r.dim());
    dist_to_box(center, &r.lo, &r.hi) < radius
}

/// `ln(pi^{d/2} / Gamma(d/2 + 1))`, finite for every `d`.
pub fn ln_unit_ball_volume(d: usize) -> f64 {
    let h = d as f64 / 2.0;
    h * libm::log(PI) - libm::lgamma(h + 1.0)
}

/// Volume of the unit Euclidean ball in `d` dimensions. Underflows to zero
/// for very large `d`; use [`ln_unit_ball_volume`] there.
pub fn unit_ball_volume(d: usize) -> f64 {
    libm::exp(ln_unit_ball_volume(d))
}

/// Upper bound on the L2 diameter of a box with the given volume and aspect ratio.
pub fn diameter_bound_from_aspect(volume: f64, aspect: f64, d: usize) -> f64 {
    aspect * libm::sqrt(d as f64) * libm::pow(volume, 1.0 / d as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use proptest::prelude::*;

    fn r2(a: [f64; 2], b: [f64; 2]) -> Rect {
        Rect::new(a.to_vec(), b.to_vec()).unwrap()
    }

    #[test]
    fn construction_errors() {
        assert!(Rect::new(vec![0.0], vec![0.0, 1.0]).is_err());
        assert!(Rect::new(vec![1.0], vec![0.0]).is_err());
        assert!(Rect::new(vec![], vec![]).is_err());
    }

    #[test]
    fn point_distance() {
        let unit = Rect::unit_cube(2);
        assert_eq!(dist_point_to_rect(&[0.3, 0.7], &unit).unwrap(), 0.0);
        assert_eq!(dist_point_to_rect(&[2.0, 0.5], &unit).unwrap(), 1.0);
        assert_eq!(
            dist_point_to_rect(&[2.0, 2.0], &unit).unwrap(),
            libm::sqrt(2.0)
        );
        // boundary counts as inside
        assert_eq!(dist_point_to_rect(&[1.0, 0.0], &unit).unwrap(), 0.0);
        assert!(dist_point_to_rect(&[1.0], &unit).is_err());
    }

    #[test]
    fn open_ball() {
        let unit = Rect::unit_cube(2);
        assert!(!rect_intersects_open_ball(&unit, &[0.5, 0.5], 0.0));
        assert!(!rect_intersects_open_ball(&unit, &[3.0, 3.0], 0.0));
        assert!(rect_intersects_open_ball(&unit, &[0.5, 0.5], 1e-9));
        assert!(!rect_intersects_open_ball(&unit, &[2.0, 0.5], 1.0));
        assert!(rect_intersects_open_ball(&unit, &[2.0, 0.5], 1.01));
    }

    #[test]
    fn aspect() {
        assert_eq!(Rect::unit_cube(5).aspect_ratio().unwrap(), 1.0);
        assert_eq!(r2([0.0, 0.0], [1.0, 0.25]).aspect_ratio().unwrap(), 4.0);
        assert_eq!(
            Rect::cube(2, 0.0, 6.0).unwrap().aspect_ratio().unwrap(),
            1.0
        );
        assert_eq!(
            r2([0.0, 0.5], [1.0, 0.5]).aspect_ratio(),
            Err(Error::DegenerateSide { axis: 1 })
        );
    }

    #[test]
    fn measures() {
        let c = Rect::unit_cube(3);
        assert_eq!(c.volume(), 1.0);
        assert_eq!(c.l1_diameter(), 3.0);
        assert_eq!(c.l2_diameter(), libm::sqrt(3.0));

        let r = r2([0.0, 0.0], [0.5, 0.25]);
        assert_eq!(r.volume(), 0.125);
        assert_eq!(r.l1_diameter(), 0.75);
        assert_eq!(r.l2_diameter(), libm::sqrt(0.3125));

        assert_eq!(r2([0.0, 0.3], [1.0, 0.3]).volume(), 0.0);
    }

    #[test]
    fn insets() {
        let unit = Rect::unit_cube(2);
        assert_eq!(unit.inset(0.0).unwrap(), unit);
        let i = unit.inset(0.1).unwrap();
        assert_eq!(i.lo(), &[0.1, 0.1]);
        assert_eq!(i.hi(), &[0.9, 0.9]);

        let r = r2([0.0, 0.0], [1.0, 0.4]);
        let i = r.inset(0.2).unwrap();
        assert_eq!(i.lo(), &[0.2, 0.2]);
        assert_eq!(i.hi(), &[0.8, 0.2]);
        assert_eq!(i.volume(), 0.0);
        assert!(r.inset(0.21).is_err());
        assert!(r.inset(-0.1).is_err());
    }

    #[test]
    fn inset_volume_matches_product() {
        let r = r2([0.1, 0.2], [0.9, 0.6]);
        let t = 0.05;
        let expect = (0.8 - 2.0 * t) * (0.4 - 2.0 * t);
        assert!((r.inset(t).unwrap().volume() - expect).abs() < 1e-15);
    }

    #[test]
    fn split_partitions() {
        let (l, r) = Rect::unit_cube(2).split(0, 0.3);
        assert_eq!(l.hi(), &[0.3, 1.0]);
        assert_eq!(r.lo(), &[0.3, 0.0]);
        assert!((l.volume() + r.volume() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn ball_volumes() {
        assert!((unit_ball_volume(1) - 2.0).abs() < 1e-14);
        assert!((unit_ball_volume(2) - PI).abs() < 1e-14);
        assert!((unit_ball_volume(3) - 4.0 * PI / 3.0).abs() < 1e-13);
        assert!((unit_ball_volume(4) - PI * PI / 2.0).abs() < 1e-13);
    }

    #[test]
    fn ball_volume_recurrence() {
        // v_d = v_{d-2} * 2 pi / d, checked in log space so large d stays finite.
        for d in 3..=10_000usize {
            let lhs = ln_unit_ball_volume(d);
            let rhs = ln_unit_ball_volume(d - 2) + libm::log(2.0 * PI / d as f64);
            let rel_in_value = libm::expm1(lhs - rhs).abs();
            assert!(rel_in_value < 1e-9, "d = {d}: {rel_in_value}");
        }
        for d in 3..=300usize {
            let v = unit_ball_volume(d);
            let w = unit_ball_volume(d - 2) * 2.0 * PI / d as f64;
            assert!(((v - w) / w).abs() < 1e-9, "d = {d}");
        }
    }

    #[test]
    fn ball_volume_against_product_formula() {
        // Independent route: v_{2k} = pi^k / k!, v_{2k+1} = 2 (2 pi)^k / (2k+1)!!.
        let mut even = 1.0f64;
        let mut odd = 2.0f64;
        for k in 1..=80usize {
            even *= PI / k as f64;
            odd *= 2.0 * PI / (2 * k + 1) as f64;
            let e = unit_ball_volume(2 * k);
            let o = unit_ball_volume(2 * k + 1);
            assert!(((e - even) / even).abs() < 1e-10, "d = {}", 2 * k);
            assert!(((o - odd) / odd).abs() < 1e-10, "d = {}", 2 * k + 1);
        }
    }

    #[test]
    fn diameter_bound_examples() {
        assert!((diameter_bound_from_aspect(1.0, 1.0, 4) - 2.0).abs() < 1e-15);
        assert_eq!(Rect::unit_cube(4).l2_diameter(), 2.0);
        let b = diameter_bound_from_aspect(0.125, 2.0, 2);
        assert!((b - 1.0).abs() < 1e-12, "{b}");
    }

    fn arb_rect() -> impl Strategy<Value = Rect> {
        (1usize..12).prop_flat_map(|d| {
            prop::collection::vec((-10.0f64..10.0, 1e-3f64..5.0), d).prop_map(|v| {
                let lo: Vec<f64> = v.iter().map(|p| p.0).collect();
                let hi: Vec<f64> = v.iter().map(|p| p.0 + p.1).collect();
                Rect::new(lo, hi).unwrap()
            })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(10_000))]
        #[test]
        fn diameter_within_aspect_bound(r in arb_rect()) {
            let bound = diameter_bound_from_aspect(r.volume(), r.aspect_ratio().unwrap(), r.dim());
            prop_assert!(r.l2_diameter() <= bound * (1.0 + 1e-12));
        }
    }

    proptest! {
        #[test]
        fn diameter_norm_ordering(r in arb_rect()) {
            let l1 = r.l1_diameter();
            let l2 = r.l2_diameter();
            let sd = libm::sqrt(r.dim() as f64);
            prop_assert!(l2 <= l1 * (1.0 + 1e-12));
            prop_assert!(l1 <= sd * l2 * (1.0 + 1e-12));
        }

        #[test]
        fn distance_lipschitz(
            r in arb_rect(),
            seed in prop::collection::vec(-20.0f64..20.0, 24),
        ) {
            let d = r.dim();
            let q = &seed[..d];
            let p = &seed[12..12 + d];
            let dq = dist_point_to_rect(q, &r).unwrap();
            let dp = dist_point_to_rect(p, &r).unwrap();
            let gap = crate::dataset::euclidean(q, p);
            prop_assert!((dq - dp).abs() <= gap * (1.0 + 1e-12) + 1e-12);
            prop_assert_eq!(dq == 0.0, r.contains(q));
        }

        #[test]
        fn ball_monotone_in_radius(
            r in arb_rect(),
            c in prop::collection::vec(-20.0f64..20.0, 12),
            a in 0.0f64..30.0,
            b in 0.0f64..30.0,
        ) {
            let c = &c[..r.dim()];
            let (small, large) = if a <= b { (a, b) } else { (b, a) };
            if rect_intersects_open_ball(&r, c, small) {
                prop_assert!(rect_intersects_open_ball(&r, c, large));
            }
        }
    }
}
