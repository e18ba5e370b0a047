// SPDX-License-Identifier: Apache-2.0

//! Defeatist search, comprehensive (backtracking) search and a brute-force
//! oracle. All three break distance ties toward the smallest point index.

use crate::dataset::{euclidean, DataSet};
use crate::error::{Error, Result};
use crate::geometry::dist_to_box;
use crate::tree::{KdTree, Node, NodeId};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchOutcome {
    pub index: usize,
    pub distance: f64,
    /// Leaves whose point lists were scanned (0 for brute force).
    pub visited_leaves: usize,
    pub distance_computations: usize,
    /// Second-child descents (comprehensive search only).
    pub backtracks: usize,
}

#[derive(Clone, Copy)]
struct Best {
    index: usize,
    distance: f64,
}

impl Best {
    const NONE: Best = Best {
        index: usize::MAX,
        distance: f64::INFINITY,
    };

    #[inline]
    fn offer(&mut self, index: usize, distance: f64) {
        if distance < self.distance || (distance == self.distance && index < self.index) {
            self.index = index;
            self.distance = distance;
        }
    }
}

pub fn brute_force_nn(data: &DataSet, q: &[f64]) -> Result<SearchOutcome> {
    if q.len() != data.dim() {
        return Err(Error::DimensionMismatch {
            expected: data.dim(),
            found: q.len(),
        });
    }
    let mut best = Best::NONE;
    for (i, p) in data.rows().enumerate() {
        best.offer(i, euclidean(p, q));
    }
    Ok(SearchOutcome {
        index: best.index,
        distance: best.distance,
        visited_leaves: 0,
        distance_computations: data.len(),
        backtracks: 0,
    })
}

/// Closest point within the query's own leaf.
pub fn defeatist_search(tree: &KdTree, q: &[f64]) -> Result<SearchOutcome> {
    let leaf = tree.locate_leaf(q)?;
    let mut best = Best::NONE;
    let points = tree.leaf_points(leaf);
    scan(tree, points, q, &mut best);
    Ok(SearchOutcome {
        index: best.index,
        distance: best.distance,
        visited_leaves: 1,
        distance_computations: points.len(),
        backtracks: 0,
    })
}

/// Exact nearest neighbor by depth-first descent with sibling backtracking.
///
/// The query-side child is searched first; the other child is searched only
/// if its cell meets the open ball around `q` whose radius is the current
/// best distance. A cell exactly at that distance is also searched when it
/// holds a smaller index than the current best, so exact ties resolve
/// the same way as in [`brute_force_nn`].
pub fn comprehensive_search(tree: &KdTree, q: &[f64]) -> Result<SearchOutcome> {
    tree.check_query(q)?;
    let mut state = Comprehensive {
        tree,
        q,
        best: Best::NONE,
        visited_leaves: 0,
        distance_computations: 0,
        backtracks: 0,
    };
    state.visit(tree.root());
    Ok(SearchOutcome {
        index: state.best.index,
        distance: state.best.distance,
        visited_leaves: state.visited_leaves,
        distance_computations: state.distance_computations,
        backtracks: state.backtracks,
    })
}

struct Comprehensive<'a> {
    tree: &'a KdTree,
    q: &'a [f64],
    best: Best,
    visited_leaves: usize,
    distance_computations: usize,
    backtracks: usize,
}

impl Comprehensive<'_> {
    fn holds_smaller_index(&self, id: NodeId) -> bool {
        self.tree
            .subtree_points(id)
            .iter()
            .any(|&i| i < self.best.index)
    }

    fn visit(&mut self, id: NodeId) {
        match *self.tree.node_unchecked(id) {
            Node::Leaf { .. } => {
                let points = self.tree.leaf_points(id);
                scan(self.tree, points, self.q, &mut self.best);
                self.visited_leaves += 1;
                self.distance_computations += points.len();
            }
            Node::Internal {
                rule, left, right, ..
            } => {
                let (first, second) = if rule.goes_left(self.q) {
                    (left, right)
                } else {
                    (right, left)
                };
                self.visit(first);
                let cell = self.tree.cell_unchecked(second);
                let gap = dist_to_box(self.q, cell.lo(), cell.hi());
                if gap < self.best.distance
                    || (gap == self.best.distance && self.holds_smaller_index(second))
                {
                    self.backtracks += 1;
                    self.visit(second);
                }
            }
        }
    }
}

#[inline]
fn scan(tree: &KdTree, points: &[usize], q: &[f64], best: &mut Best) {
    let data = tree.data();
    for &i in points {
        best.offer(i, euclidean(data.point(i), q));
    }
}
