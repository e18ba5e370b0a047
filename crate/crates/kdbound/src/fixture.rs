// SPDX-License-Identifier: Apache-2.0

//! The bundled 20-point planar fixture (root box `[0,6]^2`, leaf size 2).

use kdbound_core::{DataSet, KdTree, TreeConfig};

use crate::format::PointsFile;

pub const PLANAR20_JSON: &str = include_str!("../data/planar20.json");

pub fn planar20() -> PointsFile {
    serde_json::from_str(PLANAR20_JSON).expect("bundled fixture parses")
}

pub fn planar20_query() -> Vec<f64> {
    planar20().query.expect("fixture has a query")
}

pub fn planar20_tree() -> KdTree {
    let f = planar20();
    let data: DataSet = f.dataset().expect("fixture points");
    let rect = f.bounding_box.as_ref().unwrap().to_rect().unwrap();
    let cfg = TreeConfig::new(f.min_leaf_size.unwrap_or(2)).with_bounding_box(rect);
    KdTree::build(data, cfg).expect("fixture builds")
}
