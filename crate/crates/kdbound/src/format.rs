// SPDX-License-Identifier: Apache-2.0

//! On-disk formats: tree documents, point files, distribution configs and
//! build manifests. Floats go through serde_json's shortest round-trip
//! printer and are parsed back exactly.

use std::path::Path;

use kdbound_core::distributions::CornerParams;
use kdbound_core::tree::NodeSpec;
use kdbound_core::{
    DataSet, KdTree, MarginalSpec, Node, NodeId, ProductDistribution, Rect, TreeConfig,
};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub const TREE_FORMAT: &str = "kdbound-tree";
pub const TREE_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxDoc {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl BoxDoc {
    pub fn from_rect(r: &Rect) -> Self {
        BoxDoc {
            lo: r.lo().to_vec(),
            hi: r.hi().to_vec(),
        }
    }

    pub fn to_rect(&self) -> Result<Rect> {
        Ok(Rect::new(self.lo.clone(), self.hi.clone())?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NodeDoc {
    Internal {
        level: usize,
        axis: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
    Leaf {
        level: usize,
        points: Vec<usize>,
    },
}

/// Versioned JSON form of a built tree, including the points it indexes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeDocument {
    pub format: String,
    pub version: u32,
    pub dim: usize,
    pub min_leaf_size: usize,
    /// Root box; absent means the unit cube.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bounding_box: Option<BoxDoc>,
    pub points: Vec<Vec<f64>>,
    pub nodes: Vec<NodeDoc>,
}

impl TreeDocument {
    pub fn from_tree(tree: &KdTree) -> Self {
        let nodes = tree
            .nodes()
            .iter()
            .enumerate()
            .map(|(i, node)| match node {
                Node::Internal {
                    rule,
                    left,
                    right,
                    level,
                } => NodeDoc::Internal {
                    level: *level,
                    axis: rule.axis,
                    threshold: rule.threshold,
                    left: left.0,
                    right: right.0,
                },
                Node::Leaf { level, .. } => NodeDoc::Leaf {
                    level: *level,
                    points: tree.leaf_points(NodeId(i)).to_vec(),
                },
            })
            .collect();
        TreeDocument {
            format: TREE_FORMAT.to_string(),
            version: TREE_VERSION,
            dim: tree.dim(),
            min_leaf_size: tree.config().min_leaf_size,
            bounding_box: tree.config().bounding_box.as_ref().map(BoxDoc::from_rect),
            points: tree.data().rows().map(<[f64]>::to_vec).collect(),
            nodes,
        }
    }

    pub fn into_tree(self) -> Result<KdTree> {
        if self.format != TREE_FORMAT || self.version != TREE_VERSION {
            return Err(Error::Version {
                what: "tree document",
                found: self.version,
            });
        }
        let data = DataSet::from_rows(&self.points)?;
        if data.dim() != self.dim {
            return Err(Error::Params(format!(
                "document says dim {} but points have {}",
                self.dim,
                data.dim()
            )));
        }
        let mut config = TreeConfig::new(self.min_leaf_size);
        if let Some(b) = &self.bounding_box {
            config = config.with_bounding_box(b.to_rect()?);
        }
        let specs: Vec<NodeSpec> = self
            .nodes
            .into_iter()
            .map(|n| match n {
                NodeDoc::Internal {
                    axis,
                    threshold,
                    left,
                    right,
                    ..
                } => NodeSpec::Internal {
                    axis,
                    threshold,
                    left,
                    right,
                },
                NodeDoc::Leaf { points, .. } => NodeSpec::Leaf { points },
            })
            .collect();
        Ok(KdTree::from_nodes(data, config, &specs)?)
    }
}

pub fn tree_to_json(tree: &KdTree) -> String {
    let mut s = serde_json::to_string_pretty(&TreeDocument::from_tree(tree)).unwrap();
    s.push('\n');
    s
}

pub fn tree_from_json(text: &str) -> Result<KdTree> {
    let doc: TreeDocument = serde_json::from_str(text)?;
    doc.into_tree()
}

/// A point file: rows, plus an optional root box and query.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointsFile {
    pub points: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bounding_box: Option<BoxDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub query: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_leaf_size: Option<usize>,
}

impl PointsFile {
    pub fn dataset(&self) -> Result<DataSet> {
        Ok(DataSet::from_rows(&self.points)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DistributionType {
    Uniform,
    Product,
    Corner,
}

/// Declarative distribution spec. `product` takes disjoint `intervals`
/// (`[lo, hi]` pairs) with one mass each, applied to every coordinate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionConfig {
    #[serde(rename = "type")]
    pub kind: DistributionType,
    pub d: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub intervals: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub masses: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl DistributionConfig {
    pub fn uniform(d: usize) -> Self {
        DistributionConfig {
            kind: DistributionType::Uniform,
            d,
            intervals: None,
            masses: None,
            seed: None,
        }
    }

    pub fn corner(d: usize) -> Self {
        DistributionConfig {
            kind: DistributionType::Corner,
            ..Self::uniform(d)
        }
    }

    pub fn with_dim(&self, d: usize) -> Self {
        DistributionConfig { d, ..self.clone() }
    }

    /// Short label used in records, e.g. `uniform` or `corner`.
    pub fn label(&self) -> &'static str {
        match self.kind {
            DistributionType::Uniform => "uniform",
            DistributionType::Product => "product",
            DistributionType::Corner => "corner",
        }
    }

    pub fn build(&self) -> Result<ProductDistribution> {
        Ok(match self.kind {
            DistributionType::Uniform => ProductDistribution::uniform(self.d)?,
            DistributionType::Corner => ProductDistribution::corner(self.d)?,
            DistributionType::Product => {
                let (Some(intervals), Some(masses)) = (&self.intervals, &self.masses) else {
                    return Err(Error::Params(
                        "product distribution needs intervals and masses".into(),
                    ));
                };
                if intervals.len() != masses.len() {
                    return Err(Error::Params("one mass per interval".into()));
                }
                let parts: Vec<(f64, f64, f64)> = intervals
                    .iter()
                    .zip(masses)
                    .map(|(iv, m)| (iv[0], iv[1], *m))
                    .collect();
                ProductDistribution::iid_product(MarginalSpec::from_intervals(&parts)?, self.d)?
            }
        })
    }

    pub fn corner_params(&self) -> Option<CornerParams> {
        match self.kind {
            DistributionType::Corner => CornerParams::for_dimension(self.d).ok(),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BuildManifest {
    pub tree_file: String,
    pub source: String,
    pub n: usize,
    pub d: usize,
    pub n0: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub sha256: String,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|source| Error::Json {
        path: path.to_path_buf(),
        source,
    })
}
