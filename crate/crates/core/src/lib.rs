// SPDX-License-Identifier: Apache-2.0

//! Round-robin median-split k-d trees with instrumented nearest-neighbor search.
//!
//! The crate is `no_std` and only needs `alloc`. It contains the data
//! structure itself ([`tree`]), the rectangle geometry used by search and by
//! cell audits ([`geometry`]), defeatist and comprehensive search together
//! with a brute-force oracle ([`search`]), and seeded samplers with exact
//! cell-mass computations for piecewise-constant product distributions
//! ([`distributions`], [`sampler`]).
//!
//! ```
//! use kdbound_core::{DataSet, TreeConfig, KdTree, search};
//!
//! let data = DataSet::from_rows(&[[0.2], [0.4], [0.6], [0.9]]).unwrap();
//! let tree = KdTree::build(data, TreeConfig::new(1)).unwrap();
//! let hit = search::comprehensive_search(&tree, &[0.55]).unwrap();
//! assert_eq!(hit.index, 2);
//! ```

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod bounds;
pub mod dataset;
pub mod distributions;
pub mod error;
pub mod geometry;
pub mod median;
pub mod sampler;
pub mod search;
pub mod tree;

pub use dataset::DataSet;
pub use distributions::{CornerParams, MarginalSpec, ProductDistribution};
pub use error::{Error, Result};
pub use geometry::Rect;
pub use median::{median_order_statistic, median_with_fixed_points};
pub use sampler::Sampler;
pub use search::SearchOutcome;
pub use tree::{KdTree, Node, NodeId, SplitRule, TreeConfig};
