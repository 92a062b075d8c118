//! Reduced trees: the line-breaking construction of the ICRT, trees read off
//! a function at uniform times, and spanning subtrees of p-trees.

mod line_break;
mod reduce;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub use line_break::{line_break_points, line_break_sample, line_break_tree, LineBreakPoints};
pub use reduce::{reduce_from_function, spanning_reduce_ptree, spanning_reduce_vertices};

/// Vertices closer than this along an edge are merged.
pub const MERGE_TOLERANCE: f64 = 1e-12;

/// Rooted tree with edge lengths and `J` labelled vertices.
///
/// The root is vertex 0 and every edge `(parent, child, length)` has
/// `parent < child`. `leaves[k]` is the vertex carrying label `k + 1`; two
/// labels share a vertex only in degenerate inputs, and a label may sit on
/// an internal vertex.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeTree {
    pub edges: Vec<(usize, usize, f64)>,
    pub leaves: Vec<usize>,
}

impl EdgeTree {
    /// Normalizes a raw rooted tree: merges vertices within
    /// [`MERGE_TOLERANCE`] of their parent, drops branches without labels,
    /// and contracts unlabelled vertices of degree 2.
    ///
    /// `parent[root] == root`; depths must not decrease from parent to child.
    pub fn from_raw(parent: &[usize], depth: &[f64], root: usize, leaves: &[usize]) -> Self {
        let n = parent.len();
        let mut children = vec![Vec::new(); n];
        for v in 0..n {
            if v != root {
                children[parent[v]].push(v);
            }
        }
        let mut order = vec![root];
        let mut head = 0;
        while head < order.len() {
            let v = order[head];
            head += 1;
            order.extend_from_slice(&children[v]);
        }
        // merge short edges
        let mut rep: Vec<usize> = (0..n).collect();
        let mut up = vec![usize::MAX; n];
        for &v in &order[1..] {
            let r = rep[parent[v]];
            if depth[v] - depth[r] <= MERGE_TOLERANCE {
                rep[v] = r;
            } else {
                up[v] = r;
            }
        }
        let labels: Vec<usize> = leaves.iter().map(|&v| rep[v]).collect();
        let mut labelled = vec![false; n];
        for &v in &labels {
            labelled[v] = true;
        }
        // prune and count useful children
        let mut useful = labelled.clone();
        let mut useful_children = vec![0usize; n];
        for &v in order.iter().rev() {
            if rep[v] != v || v == root {
                continue;
            }
            if useful[v] {
                useful[up[v]] = true;
                useful_children[up[v]] += 1;
            }
        }
        let keep = |v: usize| v == root || (useful[v] && (labelled[v] || useful_children[v] >= 2));
        let mut anchor = vec![usize::MAX; n];
        let mut id = vec![usize::MAX; n];
        id[root] = 0;
        anchor[root] = root;
        let mut edges = Vec::new();
        for &v in &order[1..] {
            if rep[v] != v || !useful[v] {
                continue;
            }
            let q = up[v];
            let a = if keep(q) { q } else { anchor[q] };
            anchor[v] = a;
            if keep(v) {
                id[v] = edges.len() + 1;
                edges.push((id[a], id[v], depth[v] - depth[a]));
            }
        }
        let leaves = labels.iter().map(|&v| id[v]).collect();
        Self { edges, leaves }
    }

    pub fn vertex_count(&self) -> usize {
        self.edges.len() + 1
    }

    pub fn leaf_count(&self) -> usize {
        self.leaves.len()
    }

    /// Root distance of every vertex.
    pub fn depths(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.vertex_count()];
        for &(p, c, l) in &self.edges {
            d[c] = d[p] + l;
        }
        d
    }

    pub fn total_length(&self) -> f64 {
        self.edges.iter().map(|e| e.2).sum()
    }

    /// Multiplies every edge length by `c`.
    pub fn scaled(&self, c: f64) -> Self {
        Self { edges: self.edges.iter().map(|&(p, q, l)| (p, q, c * l)).collect(), leaves: self.leaves.clone() }
    }

    fn children(&self) -> Vec<Vec<usize>> {
        let mut ch = vec![Vec::new(); self.vertex_count()];
        for &(p, c, _) in &self.edges {
            ch[p].push(c);
        }
        ch
    }

    /// Canonical shape: each vertex is written as `[labels:children]` with
    /// the children's codes sorted, so relabelling unlabelled vertices does
    /// not change the code. A single edge to leaf 1 is written `1-leaf`.
    pub fn shape_code(&self) -> String {
        if self.edges.len() == 1 && self.leaves == [1] {
            return "1-leaf".into();
        }
        let mut labels: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (k, &v) in self.leaves.iter().enumerate() {
            labels.entry(v).or_default().push(k + 1);
        }
        let children = self.children();
        fn code(v: usize, ch: &[Vec<usize>], labels: &BTreeMap<usize, Vec<usize>>) -> String {
            let own = labels
                .get(&v)
                .map(|l| l.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","))
                .unwrap_or_default();
            let mut kids: Vec<String> = ch[v].iter().map(|&c| code(c, ch, labels)).collect();
            kids.sort();
            format!("[{own}:{}]", kids.join(""))
        }
        code(0, &children, &labels)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("edge trees serialize")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EdgeTreeStats {
    pub total_length: f64,
    /// Root distance of leaf `k + 1` at index `k`.
    pub leaf_depths: Vec<f64>,
    pub shape: String,
}

pub fn edge_tree_stats(t: &EdgeTree) -> EdgeTreeStats {
    let d = t.depths();
    EdgeTreeStats {
        total_length: t.total_length(),
        leaf_depths: t.leaves.iter().map(|&v| d[v]).collect(),
        shape: t.shape_code(),
    }
}
