// SPDX-License-Identifier: Apache-2.0

//! Product distributions on `[0,1]^d` whose marginals have piecewise-constant
//! densities. Cell masses factorize over coordinates and are computed exactly.

use alloc::vec::Vec;

use crate::dataset::DataSet;
use crate::error::{Error, Result};
use crate::geometry::Rect;
use crate::sampler::Sampler;

const MASS_TOLERANCE: f64 = 1e-12;

/// Piecewise-constant density on `[0,1]`: interval `j` is
/// `[breakpoints[j], breakpoints[j+1]]` and carries `masses[j]`.
/// Intervals with zero mass are gaps.
#[derive(Debug, Clone, PartialEq)]
pub struct MarginalSpec {
    breakpoints: Vec<f64>,
    masses: Vec<f64>,
    cumulative: Vec<f64>,
}

impl MarginalSpec {
    pub fn new(breakpoints: Vec<f64>, masses: Vec<f64>) -> Result<Self> {
        if masses.is_empty() || breakpoints.len() != masses.len() + 1 {
            return Err(Error::InvalidMarginal(
                "need one more breakpoint than intervals",
            ));
        }
        if breakpoints.iter().any(|b| !(0.0..=1.0).contains(b)) {
            return Err(Error::InvalidMarginal("breakpoints must lie in [0, 1]"));
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidMarginal(
                "breakpoints must be strictly increasing",
            ));
        }
        if masses.iter().any(|m| !m.is_finite() || *m < 0.0) {
            return Err(Error::InvalidMarginal(
                "masses must be finite and nonnegative",
            ));
        }
        let total: f64 = masses.iter().sum();
        if (total - 1.0).abs() > MASS_TOLERANCE {
            return Err(Error::InvalidMarginal("masses must sum to 1"));
        }
        let mut cumulative = Vec::with_capacity(breakpoints.len());
        let mut acc = 0.0;
        cumulative.push(0.0);
        for m in &masses {
            acc += m;
            cumulative.push(acc);
        }
        Ok(MarginalSpec {
            breakpoints,
            masses,
            cumulative,
        })
    }

    pub fn uniform() -> Self {
        MarginalSpec::new(alloc::vec![0.0, 1.0], alloc::vec![1.0]).unwrap()
    }

    /// Disjoint `(lo, hi, mass)` intervals in increasing order; the space
    /// between them gets zero density.
    pub fn from_intervals(intervals: &[(f64, f64, f64)]) -> Result<Self> {
        let mut breakpoints = Vec::new();
        let mut masses = Vec::new();
        for &(lo, hi, mass) in intervals {
            match breakpoints.last() {
                None => breakpoints.push(lo),
                Some(&prev) if prev < lo => {
                    breakpoints.push(lo);
                    masses.push(0.0);
                }
                Some(&prev) if prev == lo => {}
                Some(_) => return Err(Error::InvalidMarginal("intervals overlap")),
            }
            breakpoints.push(hi);
            masses.push(mass);
        }
        MarginalSpec::new(breakpoints, masses)
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    /// `(lo, hi, mass)` for every interval, gaps included.
    pub fn intervals(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.breakpoints
            .windows(2)
            .zip(&self.masses)
            .map(|(w, m)| (w[0], w[1], *m))
    }

    pub fn cdf(&self, x: f64) -> f64 {
        let b = &self.breakpoints;
        if x <= b[0] {
            return 0.0;
        }
        if x >= b[b.len() - 1] {
            return 1.0;
        }
        // b[j] <= x < b[j+1]
        let j = b.partition_point(|&v| v <= x) - 1;
        let frac = (x - b[j]) / (b[j + 1] - b[j]);
        (self.cumulative[j] + self.masses[j] * frac).min(1.0)
    }

    /// Mass of `[a, b]`.
    pub fn interval_mass(&self, a: f64, b: f64) -> f64 {
        if b <= a {
            return 0.0;
        }
        (self.cdf(b) - self.cdf(a)).max(0.0)
    }

    /// Inverse CDF: picks the interval by cumulative mass, then interpolates
    /// uniformly inside it.
    pub fn quantile(&self, u: f64) -> f64 {
        let j = self
            .cumulative
            .partition_point(|&c| c <= u)
            .clamp(1, self.masses.len())
            - 1;
        // Step past zero-mass gaps so the answer lands inside the support.
        let j = (j..self.masses.len())
            .find(|&k| self.masses[k] > 0.0)
            .or_else(|| (0..j).rev().find(|&k| self.masses[k] > 0.0))
            .unwrap_or(j);
        let (lo, hi) = (self.breakpoints[j], self.breakpoints[j + 1]);
        let frac = ((u - self.cumulative[j]) / self.masses[j]).clamp(0.0, 1.0);
        (lo + frac * (hi - lo)).clamp(lo, hi)
    }

    /// `(inf, sup)` of the density over `[0,1]`.
    pub fn density_bounds(&self) -> (f64, f64) {
        let covers =
            self.breakpoints[0] == 0.0 && self.breakpoints[self.breakpoints.len() - 1] == 1.0;
        let mut lo = if covers { f64::INFINITY } else { 0.0 };
        let mut hi = 0.0f64;
        for (a, b, m) in self.intervals() {
            let density = m / (b - a);
            lo = lo.min(density);
            hi = hi.max(density);
        }
        (lo, hi)
    }

    #[inline]
    pub fn sample(&self, sampler: &mut Sampler) -> f64 {
        self.quantile(sampler.next_f64())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DistributionKind {
    Uniform,
    Product,
    Corner,
}

/// Constants of the corner construction in dimension `d`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CornerParams {
    pub d: usize,
    /// Width of each edge interval, `1 / (10 sqrt d)`.
    pub epsilon: f64,
    /// Mass of the center band, `1 / (d log2 d)`.
    pub m_center: f64,
    /// Half-width of the center band, `d^-10`.
    pub eta: f64,
    /// `ceil(d^3 log2^3 d)`.
    pub n0: usize,
    /// `n0 * 2^d`, or `None` when that overflows.
    pub n: Option<usize>,
}

impl CornerParams {
    pub fn for_dimension(d: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidDistribution(
                "corner distribution needs d >= 2",
            ));
        }
        let df = d as f64;
        let lg = libm::log2(df);
        let n0 = libm::ceil(df * df * df * lg * lg * lg) as usize;
        let n = u32::try_from(d)
            .ok()
            .and_then(|e| 1usize.checked_shl(e))
            .filter(|_| d < usize::BITS as usize)
            .and_then(|p| p.checked_mul(n0));
        Ok(CornerParams {
            d,
            epsilon: 1.0 / (10.0 * libm::sqrt(df)),
            m_center: 1.0 / (df * lg),
            eta: libm::pow(df, -10.0),
            n0,
            n,
        })
    }

    pub fn band(&self) -> (f64, f64) {
        (0.5 - self.eta, 0.5 + self.eta)
    }

    pub fn marginal(&self) -> Result<MarginalSpec> {
        let (a, b) = self.band();
        if a >= b {
            return Err(Error::InvalidDistribution(
                "center band collapses in double precision",
            ));
        }
        let side = (1.0 - self.m_center) / 2.0;
        MarginalSpec::from_intervals(&[
            (0.0, self.epsilon, side),
            (a, b, self.m_center),
            (1.0 - self.epsilon, 1.0, side),
        ])
    }
}

pub fn example1_params(d: usize) -> Result<CornerParams> {
    CornerParams::for_dimension(d)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProductDistribution {
    kind: DistributionKind,
    marginals: Vec<MarginalSpec>,
}

impl ProductDistribution {
    pub fn uniform(d: usize) -> Result<Self> {
        Self::iid(DistributionKind::Uniform, MarginalSpec::uniform(), d)
    }

    pub fn iid_product(marginal: MarginalSpec, d: usize) -> Result<Self> {
        Self::iid(DistributionKind::Product, marginal, d)
    }

    pub fn product(marginals: Vec<MarginalSpec>) -> Result<Self> {
        if marginals.is_empty() {
            return Err(Error::ZeroDimension);
        }
        Ok(ProductDistribution {
            kind: DistributionKind::Product,
            marginals,
        })
    }

    /// The corner distribution with every constant at its formula value.
    pub fn corner(d: usize) -> Result<Self> {
        let params = CornerParams::for_dimension(d)?;
        Self::iid(DistributionKind::Corner, params.marginal()?, d)
    }

    fn iid(kind: DistributionKind, marginal: MarginalSpec, d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::ZeroDimension);
        }
        Ok(ProductDistribution {
            kind,
            marginals: alloc::vec![marginal; d],
        })
    }

    pub fn kind(&self) -> DistributionKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.marginals.len()
    }

    pub fn marginal(&self, i: usize) -> &MarginalSpec {
        &self.marginals[i]
    }

    pub fn marginal_cdf(&self, i: usize, x: f64) -> f64 {
        self.marginals[i].cdf(x)
    }

    /// Exact probability mass of a closed rectangle.
    pub fn cell_mass(&self, r: &Rect) -> f64 {
        assert_eq!(r.dim(), self.dim(), "rectangle dimension mismatch");
        self.marginals
            .iter()
            .zip(r.lo().iter().zip(r.hi()))
            .map(|(m, (a, b))| m.interval_mass(*a, *b))
            .product()
    }

    /// Lower and upper density bounds of the joint distribution.
    pub fn density_bounds(&self) -> (f64, f64) {
        self.marginals.iter().fold((1.0, 1.0), |(lo, hi), m| {
            let (a, b) = m.density_bounds();
            (lo * a, hi * b)
        })
    }

    pub fn sample_point(&self, sampler: &mut Sampler, out: &mut Vec<f64>) {
        out.extend(self.marginals.iter().map(|m| m.sample(sampler)));
    }

    pub fn sample(&self, sampler: &mut Sampler, count: usize) -> Result<DataSet> {
        if count == 0 {
            return Err(Error::EmptyInput);
        }
        let mut coords = Vec::with_capacity(count * self.dim());
        for _ in 0..count {
            self.sample_point(sampler, &mut coords);
        }
        DataSet::new(coords, self.dim())
    }
}
