// SPDX-License-Identifier: Apache-2.0

//! Round-robin median-split k-d tree.
//!
//! A node holding `N >= 2 n0` points splits on axis `level mod d` at the
//! `ceil(N/2)`-th smallest coordinate `s`; points with `x[axis] <= s` go left.
//! A node whose right side would be empty (the median is also the largest
//! coordinate on the axis) stays a leaf regardless of its size.

use alloc::vec::Vec;

use crate::dataset::DataSet;
use crate::error::{Error, Result};
use crate::geometry::Rect;
use crate::median::select_median_in_place;

#[derive(Debug, Clone, PartialEq)]
pub struct TreeConfig {
    pub min_leaf_size: usize,
    /// Root cell. `None` means the unit cube in the data's dimension.
    pub bounding_box: Option<Rect>,
}

impl TreeConfig {
    pub fn new(min_leaf_size: usize) -> Self {
        TreeConfig {
            min_leaf_size,
            bounding_box: None,
        }
    }

    pub fn with_bounding_box(mut self, rect: Rect) -> Self {
        self.bounding_box = Some(rect);
        self
    }

    pub fn root_cell(&self, d: usize) -> Rect {
        self.bounding_box
            .clone()
            .unwrap_or_else(|| Rect::unit_cube(d))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitRule {
    pub axis: usize,
    pub threshold: f64,
}

impl SplitRule {
    /// True when `x` belongs to the left child.
    #[inline]
    pub fn goes_left(&self, x: &[f64]) -> bool {
        x[self.axis] <= self.threshold
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub usize);

#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Internal {
        rule: SplitRule,
        left: NodeId,
        right: NodeId,
        level: usize,
    },
    /// Points are `order[start..end]` of the owning tree.
    Leaf {
        start: usize,
        end: usize,
        level: usize,
    },
}

impl Node {
    pub fn level(&self) -> usize {
        match self {
            Node::Internal { level, .. } | Node::Leaf { level, .. } => *level,
        }
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self, Node::Leaf { .. })
    }
}

/// Externally supplied node description, used to rebuild a tree from a file.
#[derive(Debug, Clone, PartialEq)]
pub enum NodeSpec {
    Internal {
        axis: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
    Leaf {
        points: Vec<usize>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct KdTree {
    data: DataSet,
    config: TreeConfig,
    nodes: Vec<Node>,
    cells: Vec<Rect>,
    order: Vec<usize>,
}

impl KdTree {
    pub fn build(data: DataSet, config: TreeConfig) -> Result<Self> {
        let root_cell = validate(&data, &config)?;
        let n = data.len();
        let mut tree = KdTree {
            order: (0..n).collect(),
            nodes: Vec::new(),
            cells: Vec::new(),
            data,
            config,
        };
        let mut scratch = Scratch {
            values: Vec::with_capacity(n),
            indices: Vec::with_capacity(n),
        };
        tree.build_node(0, n, 0, root_cell, &mut scratch);
        Ok(tree)
    }

    fn build_node(
        &mut self,
        start: usize,
        end: usize,
        level: usize,
        cell: Rect,
        scratch: &mut Scratch,
    ) -> NodeId {
        let id = NodeId(self.nodes.len());
        let count = end - start;
        let d = self.data.dim();
        self.nodes.push(Node::Leaf { start, end, level });
        self.cells.push(cell);
        if count < 2 * self.config.min_leaf_size {
            return id;
        }

        let axis = level % d;
        scratch.values.clear();
        scratch.values.extend(
            self.order[start..end]
                .iter()
                .map(|&i| self.data.coord(i, axis)),
        );
        let threshold = select_median_in_place(&mut scratch.values);

        // Stable partition of order[start..end] around the threshold.
        scratch.indices.clear();
        let slice = &self.order[start..end];
        scratch.indices.extend(
            slice
                .iter()
                .copied()
                .filter(|&i| self.data.coord(i, axis) <= threshold),
        );
        let n_left = scratch.indices.len();
        if n_left == count {
            return id;
        }
        scratch.indices.extend(
            slice
                .iter()
                .copied()
                .filter(|&i| self.data.coord(i, axis) > threshold),
        );
        self.order[start..end].copy_from_slice(&scratch.indices);

        let (left_cell, right_cell) = self.cells[id.0].split(axis, threshold);
        let left = self.build_node(start, start + n_left, level + 1, left_cell, scratch);
        let right = self.build_node(start + n_left, end, level + 1, right_cell, scratch);
        self.nodes[id.0] = Node::Internal {
            rule: SplitRule { axis, threshold },
            left,
            right,
            level,
        };
        id
    }

    /// Rebuilds a tree from explicit node records (node 0 is the root).
    ///
    /// Every structural invariant the builder guarantees is checked except
    /// that thresholds are medians, so hand-written trees are accepted.
    pub fn from_nodes(data: DataSet, config: TreeConfig, specs: &[NodeSpec]) -> Result<Self> {
        let root_cell = validate(&data, &config)?;
        if specs.is_empty() {
            return Err(Error::InvalidRect("tree has no nodes"));
        }
        let d = data.dim();
        let n = data.len();
        let mut tree = KdTree {
            nodes: alloc::vec![Node::Leaf { start: 0, end: 0, level: 0 }; specs.len()],
            cells: alloc::vec![root_cell.clone(); specs.len()],
            order: Vec::with_capacity(n),
            data,
            config,
        };
        let mut seen = alloc::vec![false; specs.len()];
        let mut owner = alloc::vec![false; n];
        // (node, level, cell)
        let mut stack = alloc::vec![(0usize, 0usize, root_cell)];
        while let Some((idx, level, cell)) = stack.pop() {
            if idx >= specs.len() || seen[idx] {
                return Err(Error::UnknownNode(idx));
            }
            seen[idx] = true;
            match &specs[idx] {
                NodeSpec::Internal {
                    axis,
                    threshold,
                    left,
                    right,
                } => {
                    if *axis != level % d || !threshold.is_finite() {
                        return Err(Error::InvalidRect("split axis breaks round-robin order"));
                    }
                    let (lc, rc) = cell.split(*axis, *threshold);
                    // Right pushed first so the left subtree is laid out first.
                    stack.push((*right, level + 1, rc));
                    stack.push((*left, level + 1, lc));
                    tree.nodes[idx] = Node::Internal {
                        rule: SplitRule {
                            axis: *axis,
                            threshold: *threshold,
                        },
                        left: NodeId(*left),
                        right: NodeId(*right),
                        level,
                    };
                }
                NodeSpec::Leaf { points } => {
                    let start = tree.order.len();
                    for &p in points {
                        if p >= n || owner[p] {
                            return Err(Error::InvalidRect(
                                "leaf lists do not partition the points",
                            ));
                        }
                        if !tree
                            .data
                            .point(p)
                            .iter()
                            .zip(cell.lo().iter().zip(cell.hi()))
                            .all(|(x, (a, b))| a <= x && x <= b)
                        {
                            return Err(Error::InvalidRect("point lies outside its leaf cell"));
                        }
                        owner[p] = true;
                        tree.order.push(p);
                    }
                    tree.nodes[idx] = Node::Leaf {
                        start,
                        end: tree.order.len(),
                        level,
                    };
                }
            }
            tree.cells[idx] = cell;
        }
        if seen.iter().any(|s| !s) || tree.order.len() != n {
            return Err(Error::InvalidRect("leaf lists do not partition the points"));
        }
        Ok(tree)
    }

    #[inline]
    pub fn root(&self) -> NodeId {
        NodeId(0)
    }

    pub fn data(&self) -> &DataSet {
        &self.data
    }

    pub fn config(&self) -> &TreeConfig {
        &self.config
    }

    pub fn dim(&self) -> usize {
        self.data.dim()
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn node(&self, id: NodeId) -> Result<&Node> {
        self.nodes.get(id.0).ok_or(Error::UnknownNode(id.0))
    }

    pub fn cell_of_node(&self, id: NodeId) -> Result<&Rect> {
        self.cells.get(id.0).ok_or(Error::UnknownNode(id.0))
    }

    #[inline]
    pub(crate) fn node_unchecked(&self, id: NodeId) -> &Node {
        &self.nodes[id.0]
    }

    #[inline]
    pub(crate) fn cell_unchecked(&self, id: NodeId) -> &Rect {
        &self.cells[id.0]
    }

    /// Point indices stored at a leaf; empty for internal nodes.
    pub fn leaf_points(&self, id: NodeId) -> &[usize] {
        match self.nodes.get(id.0) {
            Some(Node::Leaf { start, end, .. }) => &self.order[*start..*end],
            _ => &[],
        }
    }

    /// Point indices below `id`.
    pub fn subtree_points(&self, id: NodeId) -> &[usize] {
        let (mut lo, mut hi) = (id, id);
        while let Node::Internal { left, .. } = self.nodes[lo.0] {
            lo = left;
        }
        while let Node::Internal { right, .. } = self.nodes[hi.0] {
            hi = right;
        }
        match (&self.nodes[lo.0], &self.nodes[hi.0]) {
            (Node::Leaf { start, .. }, Node::Leaf { end, .. }) => &self.order[*start..*end],
            _ => unreachable!(),
        }
    }

    /// Leaves in depth-first (left before right) order.
    pub fn leaves(&self) -> Vec<NodeId> {
        let mut out = Vec::new();
        let mut stack = alloc::vec![self.root()];
        while let Some(id) = stack.pop() {
            match self.nodes[id.0] {
                Node::Leaf { .. } => out.push(id),
                Node::Internal { left, right, .. } => {
                    stack.push(right);
                    stack.push(left);
                }
            }
        }
        out
    }

    pub fn leaf_count(&self) -> usize {
        self.nodes.iter().filter(|n| n.is_leaf()).count()
    }

    /// Largest leaf level.
    pub fn depth(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| n.is_leaf())
            .map(Node::level)
            .max()
            .unwrap_or(0)
    }

    /// Internal split rules in node-id order.
    pub fn split_rules(&self) -> impl Iterator<Item = (NodeId, SplitRule, usize)> + '_ {
        self.nodes.iter().enumerate().filter_map(|(i, n)| match n {
            Node::Internal { rule, level, .. } => Some((NodeId(i), *rule, *level)),
            Node::Leaf { .. } => None,
        })
    }

    /// The leaf whose cell contains `q`, descending left whenever `q[axis] <= s`.
    pub fn locate_leaf(&self, q: &[f64]) -> Result<NodeId> {
        self.check_query(q)?;
        Ok(self.descend(q))
    }

    #[inline]
    pub(crate) fn descend(&self, q: &[f64]) -> NodeId {
        let mut id = self.root();
        while let Node::Internal {
            rule, left, right, ..
        } = &self.nodes[id.0]
        {
            id = if rule.goes_left(q) { *left } else { *right };
        }
        id
    }

    pub(crate) fn check_query(&self, q: &[f64]) -> Result<()> {
        if q.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: q.len(),
            });
        }
        Ok(())
    }
}

struct Scratch {
    values: Vec<f64>,
    indices: Vec<usize>,
}

fn validate(data: &DataSet, config: &TreeConfig) -> Result<Rect> {
    if config.min_leaf_size == 0 {
        return Err(Error::InvalidMinLeafSize);
    }
    let root = config.root_cell(data.dim());
    if root.dim() != data.dim() {
        return Err(Error::DimensionMismatch {
            expected: data.dim(),
            found: root.dim(),
        });
    }
    if let Some(row) = (0..data.len()).find(|&i| !root.contains(data.point(i))) {
        return Err(Error::PointOutsideBox { row });
    }
    Ok(root)
}
