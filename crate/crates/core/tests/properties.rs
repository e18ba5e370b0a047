// SPDX-License-Identifier: Apache-2.0

use kdbound_core::geometry::dist_point_to_rect;
use kdbound_core::search::{brute_force_nn, comprehensive_search, defeatist_search};
use kdbound_core::{DataSet, KdTree, Node, ProductDistribution, Sampler, TreeConfig};
use proptest::prelude::*;

fn random_tree(seed: u64, n: usize, d: usize, n0: usize, grid: Option<u64>) -> KdTree {
    let mut s = Sampler::new(seed);
    let data = match grid {
        // Coarse lattice coordinates force ties and duplicates.
        Some(k) => {
            let coords = (0..n * d)
                .map(|_| s.next_below(k + 1) as f64 / k as f64)
                .collect();
            DataSet::new(coords, d).unwrap()
        }
        None => ProductDistribution::uniform(d)
            .unwrap()
            .sample(&mut s, n)
            .unwrap(),
    };
    KdTree::build(data, TreeConfig::new(n0)).unwrap()
}

fn check_structure(tree: &KdTree) -> Result<(), TestCaseError> {
    let n = tree.data().len();
    let d = tree.dim();
    let n0 = tree.config().min_leaf_size;
    let mut seen = vec![false; n];
    for leaf in tree.leaves() {
        for &i in tree.leaf_points(leaf) {
            prop_assert!(!seen[i]);
            seen[i] = true;
        }
    }
    prop_assert!(seen.iter().all(|&x| x));

    for (i, node) in tree.nodes().iter().enumerate() {
        let id = kdbound_core::NodeId(i);
        let pts = tree.subtree_points(id);
        match node {
            Node::Leaf { .. } => {
                // Oversized leaves only arise when the median is also the
                // maximum along the split axis, so the right side is empty.
                if pts.len() >= 2 * n0 {
                    let axis = node.level() % d;
                    let mut vals: Vec<f64> =
                        pts.iter().map(|&p| tree.data().coord(p, axis)).collect();
                    vals.sort_by(f64::total_cmp);
                    prop_assert_eq!(vals[vals.len().div_ceil(2) - 1], vals[vals.len() - 1]);
                }
            }
            Node::Internal {
                rule,
                left,
                right,
                level,
            } => {
                prop_assert!(pts.len() >= 2 * n0);
                prop_assert_eq!(rule.axis, level % d);
                for &p in tree.subtree_points(*left) {
                    prop_assert!(tree.data().coord(p, rule.axis) <= rule.threshold);
                }
                for &p in tree.subtree_points(*right) {
                    prop_assert!(tree.data().coord(p, rule.axis) > rule.threshold);
                }
                let mut vals: Vec<f64> = pts
                    .iter()
                    .map(|&p| tree.data().coord(p, rule.axis))
                    .collect();
                vals.sort_by(f64::total_cmp);
                prop_assert_eq!(rule.threshold, vals[vals.len().div_ceil(2) - 1]);
                if vals.windows(2).all(|w| w[0] < w[1]) {
                    prop_assert_eq!(tree.subtree_points(*left).len(), vals.len().div_ceil(2));
                }
            }
        }
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn structural_invariants(
        seed in any::<u64>(),
        n in 1usize..600,
        d in 1usize..6,
        n0 in 1usize..9,
        grid in prop::option::of(1u64..6),
    ) {
        let tree = random_tree(seed, n, d, n0, grid);
        check_structure(&tree)?;
    }

    #[test]
    fn leaf_cells_partition_the_cube(seed in any::<u64>(), n in 1usize..400, d in 1usize..4) {
        let tree = random_tree(seed, n, d, 2, None);
        let total: f64 = tree.leaves().iter().map(|&l| tree.cell_of_node(l).unwrap().volume()).sum();
        prop_assert!((total - 1.0).abs() < 1e-9);
        let mut s = Sampler::new(seed ^ 1);
        for _ in 0..20 {
            let q: Vec<f64> = (0..d).map(|_| s.next_f64()).collect();
            let leaf = tree.locate_leaf(&q).unwrap();
            prop_assert!(tree.cell_of_node(leaf).unwrap().contains(&q));
        }
    }

    #[test]
    fn deterministic_build(seed in any::<u64>(), n in 1usize..300, d in 1usize..4) {
        prop_assert_eq!(random_tree(seed, n, d, 3, None), random_tree(seed, n, d, 3, None));
    }

    #[test]
    fn search_contracts(
        seed in any::<u64>(),
        n in 1usize..500,
        d in 1usize..9,
        n0 in 1usize..6,
        grid in prop::option::of(1u64..4),
    ) {
        let tree = random_tree(seed, n, d, n0, grid);
        let mut s = Sampler::new(seed.wrapping_add(17));
        let total_leaves = tree.leaf_count();
        for _ in 0..10 {
            let q: Vec<f64> = (0..d).map(|_| s.next_f64()).collect();
            let oracle = brute_force_nn(tree.data(), &q).unwrap();
            let com = comprehensive_search(&tree, &q).unwrap();
            let def = defeatist_search(&tree, &q).unwrap();
            prop_assert_eq!(com.index, oracle.index);
            prop_assert_eq!(com.distance, oracle.distance);
            prop_assert!(com.visited_leaves >= 1 && com.visited_leaves <= total_leaves);
            prop_assert!(def.distance >= com.distance);

            let leaf = tree.locate_leaf(&q).unwrap();
            let in_leaf = tree.leaf_points(leaf).contains(&oracle.index);
            prop_assert_eq!(def.distance == com.distance, in_leaf || def.distance == oracle.distance);
            if grid.is_none() {
                prop_assert!(def.distance_computations < 2 * n0);
            }

            // Open ball around q of the defeatist radius inside the leaf cell
            // forces the defeatist answer to be exact.
            let cell = tree.cell_of_node(leaf).unwrap();
            let margin = q.iter().enumerate().map(|(i, x)| (x - cell.lo()[i]).min(cell.hi()[i] - x)).fold(f64::INFINITY, f64::min);
            if def.distance <= margin {
                prop_assert_eq!(def.distance, oracle.distance);
            }
        }
    }

    #[test]
    fn lattice_queries_follow_tie_rule(
        seed in any::<u64>(),
        n in 1usize..300,
        d in 1usize..4,
        n0 in 1usize..4,
        k in 1u64..5,
    ) {
        // Queries on the half-step lattice are often equidistant from
        // points in different cells.
        let tree = random_tree(seed, n, d, n0, Some(k));
        let mut s = Sampler::new(seed ^ 5);
        for _ in 0..10 {
            let q: Vec<f64> = (0..d).map(|_| s.next_below(2 * k + 1) as f64 / (2 * k) as f64).collect();
            let oracle = brute_force_nn(tree.data(), &q).unwrap();
            let com = comprehensive_search(&tree, &q).unwrap();
            prop_assert_eq!((com.index, com.distance), (oracle.index, oracle.distance));
        }
    }

    #[test]
    fn pruned_leaves_are_far(seed in any::<u64>(), n in 16usize..800, d in 1usize..6) {
        let tree = random_tree(seed, n, d, 2, None);
        let mut s = Sampler::new(seed ^ 99);
        let q: Vec<f64> = (0..d).map(|_| s.next_f64()).collect();
        let com = comprehensive_search(&tree, &q).unwrap();
        // Leaves the search could have skipped at its final radius.
        let necessary = tree
            .leaves()
            .iter()
            .filter(|&&l| dist_point_to_rect(&q, tree.cell_of_node(l).unwrap()).unwrap() < com.distance)
            .count();
        prop_assert!(com.visited_leaves >= necessary);
    }
}

#[test]
fn power_of_two_regularity() {
    for (n, n0, d) in [
        (1024usize, 16usize, 3usize),
        (4096, 4, 2),
        (512, 1, 5),
        (2048, 64, 8),
    ] {
        let tree = random_tree(n as u64, n, d, n0, None);
        let k = (n / n0).trailing_zeros() as usize;
        assert_eq!(tree.depth(), k);
        assert_eq!(tree.leaf_count(), n / n0);
        for leaf in tree.leaves() {
            assert_eq!(tree.leaf_points(leaf).len(), n0);
            assert_eq!(tree.node(leaf).unwrap().level(), k);
        }
        for node in tree.nodes() {
            if let Node::Internal { level, .. } = node {
                assert!(*level < k);
            }
        }
    }
    let tree = random_tree(1, 1024, 8, 16, None);
    assert_eq!(tree.leaves().len(), 64);
}

#[test]
fn pruning_soundness_per_leaf() {
    // Every leaf the search skipped is no closer than the answer.
    let tree = random_tree(42, 2000, 3, 4, None);
    let mut s = Sampler::new(7);
    for _ in 0..200 {
        let q: Vec<f64> = (0..3).map(|_| s.next_f64()).collect();
        let com = comprehensive_search(&tree, &q).unwrap();
        let oracle = brute_force_nn(tree.data(), &q).unwrap();
        assert_eq!(com.index, oracle.index);
        let mut closer = 0;
        for leaf in tree.leaves() {
            let dist = dist_point_to_rect(&q, tree.cell_of_node(leaf).unwrap()).unwrap();
            if dist < com.distance {
                closer += 1;
            }
        }
        assert!(closer <= com.visited_leaves);
    }
}
