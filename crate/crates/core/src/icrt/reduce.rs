//! Trees spanned by sampled points: of a function at uniform times, and of
//! a p-tree at p-sampled vertices.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;

use super::EdgeTree;
use crate::error::{Error, Result};
use crate::paths::CadlagPath;
use crate::ptree::{PSeq, RootedTree};

/// The tree coded by `h` and the times `uniforms`.
///
/// With `U_(1) < ... < U_(J)` the order statistics, leaf `U_(i)` sits at
/// height `h(U_(i))` and consecutive leaves branch at `inf h` over
/// `[U_(i), U_(i+1)]`. Leaves keep the index of their uniform.
pub fn reduce_from_function(h: &CadlagPath, uniforms: &[f64]) -> Result<EdgeTree> {
    if uniforms.is_empty() {
        return Err(Error::EmptySample);
    }
    let mut order: Vec<usize> = (0..uniforms.len()).collect();
    order.sort_by(|&a, &b| uniforms[a].total_cmp(&uniforms[b]));
    for w in order.windows(2) {
        if uniforms[w[0]] == uniforms[w[1]] {
            return Err(Error::Degenerate(uniforms[w[0]], uniforms[w[1]]));
        }
    }
    let mut parent = vec![0usize];
    let mut depth = vec![0.0f64];
    let mut leaf_of = vec![0usize; uniforms.len()];
    // root-to-current-leaf spine
    let mut spine = vec![0usize];
    for (k, &i) in order.iter().enumerate() {
        if k > 0 {
            let b = h.infimum_on(uniforms[order[k - 1]], uniforms[i]);
            let mut last = None;
            while depth[*spine.last().unwrap()] > b {
                last = spine.pop();
            }
            if let Some(l) = last {
                let top = *spine.last().unwrap();
                if depth[top] < b {
                    parent.push(top);
                    depth.push(b);
                    let w = parent.len() - 1;
                    parent[l] = w;
                    spine.push(w);
                }
            }
        }
        parent.push(*spine.last().unwrap());
        depth.push(h.value(uniforms[i]));
        let leaf = parent.len() - 1;
        spine.push(leaf);
        leaf_of[i] = leaf;
    }
    Ok(EdgeTree::from_raw(&parent, &depth, 0, &leaf_of))
}

/// Spanning tree of the root and the given vertices with unit edge lengths,
/// degree-2 vertices contracted. Vertex `samples[k]` becomes leaf `k + 1`.
pub fn spanning_reduce_vertices(tree: &RootedTree, samples: &[usize]) -> Result<EdgeTree> {
    let mut seen = std::collections::HashSet::new();
    for &v in samples {
        if !seen.insert(v) {
            return Err(Error::DuplicateSample(v));
        }
    }
    let mut raw_id = std::collections::HashMap::new();
    raw_id.insert(tree.root, 0usize);
    let mut parent = vec![0usize];
    let mut depth = vec![0.0f64];
    let mut leaves = Vec::with_capacity(samples.len());
    for &s in samples {
        // climb until a vertex already in the raw tree
        let mut path = Vec::new();
        let mut v = s;
        while !raw_id.contains_key(&v) {
            path.push(v);
            v = tree.parent[v];
        }
        let mut above = raw_id[&v];
        for &w in path.iter().rev() {
            parent.push(above);
            depth.push(tree.depth[w] as f64);
            above = parent.len() - 1;
            raw_id.insert(w, above);
        }
        leaves.push(raw_id[&s]);
    }
    Ok(EdgeTree::from_raw(&parent, &depth, 0, &leaves))
}

/// `S^p_J`: `J` vertices drawn i.i.d. from `p` and the tree they span.
///
/// Fails with [`Error::DuplicateSample`] when a vertex is drawn twice; the
/// caller decides whether to redraw.
pub fn spanning_reduce_ptree<R: Rng + ?Sized>(tree: &RootedTree, p: &PSeq, j: usize, rng: &mut R) -> Result<EdgeTree> {
    let dist = WeightedIndex::new(p.probs()).map_err(|e| Error::InvalidPSeq(e.to_string()))?;
    let samples: Vec<usize> = (0..j).map(|_| dist.sample(rng)).collect();
    spanning_reduce_vertices(tree, &samples)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::icrt::edge_tree_stats;
    use crate::ptree::PSeq;
    use proptest::prelude::*;

    fn tent() -> CadlagPath {
        CadlagPath::from_points(&[0.0, 0.5, 1.0], &[0.0, 0.5, 0.0]).unwrap()
    }

    #[test]
    fn one_leaf() {
        let t = reduce_from_function(&tent(), &[0.3]).unwrap();
        assert_eq!(t.edges.len(), 1);
        assert!((t.edges[0].2 - 0.3).abs() < 1e-15);
    }

    /// Both uniforms sit at height 0.25 and the infimum between them is 0.25
    /// as well: one edge carrying both labels.
    #[test]
    fn tent_at_quarters_merges_labels() {
        let t = reduce_from_function(&tent(), &[0.25, 0.75]).unwrap();
        assert_eq!(t.edges.len(), 1);
        assert_eq!(t.leaves, vec![1, 1]);
        assert!((t.edges[0].2 - 0.25).abs() < 1e-15);
    }

    #[test]
    fn w_shape_gives_cherry_with_relabelling() {
        // h = 0, 1 at 0.2, 0.4 at 0.5, 1 at 0.8, 0
        let h = CadlagPath::from_points(&[0.0, 0.2, 0.5, 0.8, 1.0], &[0.0, 1.0, 0.4, 1.0, 0.0]).unwrap();
        let t = reduce_from_function(&h, &[0.8, 0.2]).unwrap();
        let s = edge_tree_stats(&t);
        assert_eq!(t.edges.len(), 3);
        assert!((s.total_length - 1.6).abs() < 1e-12);
        assert!((s.leaf_depths[0] - 1.0).abs() < 1e-15 && (s.leaf_depths[1] - 1.0).abs() < 1e-15);
        assert!(matches!(reduce_from_function(&h, &[0.3, 0.3]), Err(Error::Degenerate(..))));
    }

    #[test]
    fn spanning_tree_by_hand() {
        // 0 -> {1, 2}, 1 -> {3}, 3 -> {4}
        let p = PSeq::uniform(5);
        let t = RootedTree::from_parent_array(vec![0, 0, 0, 1, 3], &p).unwrap();
        let e = spanning_reduce_vertices(&t, &[4, 2]).unwrap();
        let s = edge_tree_stats(&e);
        assert_eq!(s.leaf_depths, vec![3.0, 1.0]);
        assert_eq!(s.total_length, 4.0);
        assert_eq!(e.edges.len(), 2);
        // a sample on the path to another keeps its vertex
        let e = spanning_reduce_vertices(&t, &[4, 1]).unwrap();
        assert_eq!(edge_tree_stats(&e).leaf_depths, vec![3.0, 1.0]);
        assert_eq!(e.edges.len(), 2);
        assert!(matches!(spanning_reduce_vertices(&t, &[3, 3]), Err(Error::DuplicateSample(3))));
        let e = spanning_reduce_vertices(&t, &[3]).unwrap();
        assert_eq!(e.edges, vec![(0, 1, 2.0)]);
    }

    fn arb_excursion() -> impl Strategy<Value = CadlagPath> {
        prop::collection::vec(0.01f64..2.0, 3..20).prop_map(|vals| {
            let n = vals.len() + 1;
            let mut ts = vec![0.0];
            let mut vs = vec![0.0];
            for (i, v) in vals.iter().enumerate() {
                ts.push((i + 1) as f64 / n as f64);
                vs.push(*v);
            }
            ts.push(1.0);
            vs.push(0.0);
            CadlagPath::from_points(&ts, &vs).unwrap()
        })
    }

    proptest! {
        #[test]
        fn scaling_scales_lengths(h in arb_excursion(), us in prop::collection::vec(0.0f64..1.0, 1..6), c in 0.1f64..10.0) {
            prop_assume!(us.iter().enumerate().all(|(i, a)| us[..i].iter().all(|b| a != b)));
            let a = reduce_from_function(&h, &us).unwrap();
            let b = reduce_from_function(&h.scale(c), &us).unwrap();
            prop_assert_eq!(a.shape_code(), b.shape_code());
            prop_assert!((b.total_length() - c * a.total_length()).abs() < 1e-9 * (1.0 + b.total_length()));
        }

        #[test]
        fn at_most_j_minus_one_branchpoints(h in arb_excursion(), us in prop::collection::vec(0.0f64..1.0, 1..6)) {
            prop_assume!(us.iter().enumerate().all(|(i, a)| us[..i].iter().all(|b| a != b)));
            let t = reduce_from_function(&h, &us).unwrap();
            let labelled: std::collections::HashSet<_> = t.leaves.iter().copied().collect();
            let internal = (1..t.vertex_count()).filter(|v| !labelled.contains(v)).count();
            prop_assert!(internal < us.len().max(1));
            // pairwise distances match the function
            let d = t.depths();
            for i in 0..us.len() {
                prop_assert!((d[t.leaves[i]] - h.value(us[i])).abs() < 1e-12);
            }
        }
    }
}
