//! p-trees: random rooted trees on `[n]` with `P(t) = prod_v p_v^{d_v}`.
//!
//! Vertices are `0..n`; vertex `i` carries mass `p[i]`. The first `large`
//! vertices of a [`PSeq`] are the designated large atoms.

mod birthday;
mod circle;
mod exploration;
mod identities;

use serde::Serialize;

use crate::error::{Error, Result};

pub use birthday::{
    expected_repeat_time, hypothesis_diagnostics, make_particular_pseq, repeat_time_sample, HypothesisReport,
    RepeatTimeSampler, DEFAULT_LAMBDAS,
};
pub use circle::{
    build_breadth, build_depth, fexc_excursion, fp_bridge, sample_positions, sample_ptree, Construction, Excursion,
    Realization,
};
pub use exploration::{
    classical_exploration, exploration_height, g_process, pkey_discrepancy, pkey_from_realization, width_profile,
    PkeyDiscrepancy, WidthProfile,
};
pub use identities::{
    check_claim, check_clhp, check_deprop, check_f2r, check_keyg, check_keyg_literal, generation_weights,
    generation_weights_report, keyg_hypothesis_holds, neighbourhood_mass, IdentityReport,
};

/// Ranked probability vector with cached `sigma = sqrt(sum p_i^2)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PSeq {
    probs: Vec<f64>,
    sigma: f64,
    large: usize,
}

impl PSeq {
    pub fn new(probs: Vec<f64>, large: usize) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidPSeq("empty".into()));
        }
        if large > probs.len() {
            return Err(Error::InvalidPSeq(format!("{large} large atoms among {} masses", probs.len())));
        }
        for (i, &p) in probs.iter().enumerate() {
            if !(p > 0.0 && p.is_finite()) {
                return Err(Error::InvalidPSeq(format!("p[{i}] = {p} is not positive")));
            }
        }
        if let Some(i) = probs.windows(2).position(|w| w[0] < w[1]) {
            return Err(Error::InvalidPSeq(format!("not ranked at position {}", i + 1)));
        }
        let total = neumaier_sum(probs.iter().copied());
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidPSeq(format!("masses sum to {total}")));
        }
        let sigma = neumaier_sum(probs.iter().map(|p| p * p)).sqrt();
        Ok(Self { probs, sigma, large })
    }

    /// Sorts the masses first; the `large` designation then refers to the
    /// largest masses.
    pub fn from_unranked(mut probs: Vec<f64>, large: usize) -> Result<Self> {
        probs.sort_by(|a, b| b.total_cmp(a));
        Self::new(probs, large)
    }

    pub fn uniform(n: usize) -> Self {
        let p = 1.0 / n as f64;
        Self { probs: vec![p; n], sigma: (n as f64 * p * p).sqrt(), large: 0 }
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn large(&self) -> usize {
        self.large
    }

    pub fn is_large(&self, v: usize) -> bool {
        v < self.large
    }

    /// Smallest mass.
    pub fn p_star(&self) -> f64 {
        self.probs[self.probs.len() - 1]
    }

    /// Mass of `v` with the large atoms set to zero.
    pub fn truncated(&self, v: usize) -> f64 {
        if v < self.large {
            0.0
        } else {
            self.probs[v]
        }
    }

    pub fn mass<I: IntoIterator<Item = usize>>(&self, vertices: I) -> f64 {
        vertices.into_iter().map(|v| self.probs[v]).sum()
    }
}

impl std::ops::Index<usize> for PSeq {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.probs[i]
    }
}

pub(crate) fn neumaier_sum(values: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut c = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            c += (sum - t) + v;
        } else {
            c += (v - t) + sum;
        }
        sum = t;
    }
    sum + c
}

/// Rooted tree on `0..n` with ordered children.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RootedTree {
    /// `parent[root] == root`.
    pub parent: Vec<usize>,
    pub root: usize,
    child_start: Vec<usize>,
    child_list: Vec<usize>,
    pub depth: Vec<usize>,
    pub dfs_order: Vec<usize>,
    pub bfs_order: Vec<usize>,
    /// Examination end time `e(v)`: cumulative mass up to and including `v`
    /// in examination order.
    pub e_times: Vec<f64>,
    pub examination: Construction,
}

impl RootedTree {
    /// Tree from a parent array, children ordered by label and examined in
    /// depth-first order.
    pub fn from_parent_array(parent: Vec<usize>, p: &PSeq) -> Result<Self> {
        let n = parent.len();
        if n != p.len() {
            return Err(Error::InvalidArgument(format!("{n} vertices but {} masses", p.len())));
        }
        let roots: Vec<usize> = (0..n).filter(|&v| parent[v] == v).collect();
        if roots.len() != 1 {
            return Err(Error::InvalidArgument(format!("{} roots", roots.len())));
        }
        if parent.iter().any(|&q| q >= n) {
            return Err(Error::InvalidArgument("parent out of range".into()));
        }
        let mut children: Vec<Vec<usize>> = vec![Vec::new(); n];
        for v in 0..n {
            if parent[v] != v {
                children[parent[v]].push(v);
            }
        }
        let tree = Self::assemble(parent, roots[0], children, p, Construction::Depth);
        if tree.dfs_order.len() != n {
            return Err(Error::InvalidArgument("parent array has a cycle".into()));
        }
        Ok(tree)
    }

    pub(crate) fn assemble(
        parent: Vec<usize>,
        root: usize,
        children: Vec<Vec<usize>>,
        p: &PSeq,
        examination: Construction,
    ) -> Self {
        let n = parent.len();
        let mut child_start = Vec::with_capacity(n + 1);
        let mut child_list = Vec::with_capacity(n.saturating_sub(1));
        for c in &children {
            child_start.push(child_list.len());
            child_list.extend_from_slice(c);
        }
        child_start.push(child_list.len());
        let mut tree = Self {
            parent,
            root,
            child_start,
            child_list,
            depth: vec![0; n],
            dfs_order: Vec::with_capacity(n),
            bfs_order: Vec::with_capacity(n),
            e_times: vec![0.0; n],
            examination,
        };
        tree.fill_orders(p);
        tree
    }

    fn fill_orders(&mut self, p: &PSeq) {
        let mut stack = vec![self.root];
        while let Some(v) = stack.pop() {
            self.dfs_order.push(v);
            for &c in self.children(v).iter().rev() {
                stack.push(c);
            }
        }
        self.bfs_order.push(self.root);
        let mut head = 0;
        while head < self.bfs_order.len() {
            let v = self.bfs_order[head];
            head += 1;
            for i in self.child_start[v]..self.child_start[v + 1] {
                let c = self.child_list[i];
                self.depth[c] = self.depth[v] + 1;
                self.bfs_order.push(c);
            }
        }
        let order = match self.examination {
            Construction::Breadth => &self.bfs_order,
            Construction::Depth => &self.dfs_order,
        };
        let mut e = 0.0;
        for &v in order {
            e += p[v];
            self.e_times[v] = e;
        }
    }

    pub fn n(&self) -> usize {
        self.parent.len()
    }

    pub fn children(&self, v: usize) -> &[usize] {
        &self.child_list[self.child_start[v]..self.child_start[v + 1]]
    }

    pub fn out_degree(&self, v: usize) -> usize {
        self.child_start[v + 1] - self.child_start[v]
    }

    pub fn height(&self) -> usize {
        self.depth.iter().copied().max().unwrap_or(0)
    }

    pub fn parent_of(&self, v: usize) -> Option<usize> {
        (v != self.root).then(|| self.parent[v])
    }

    /// Ancestors of `v` from its parent up to the root.
    pub fn ancestors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        let mut cur = v;
        std::iter::from_fn(move || {
            let q = self.parent_of(cur)?;
            cur = q;
            Some(q)
        })
    }

    /// Checks acyclicity, a single root, and parent-before-child in both orders.
    pub fn validate(&self) -> Result<()> {
        let n = self.n();
        let mut seen = vec![usize::MAX; n];
        for (i, &v) in self.dfs_order.iter().enumerate() {
            seen[v] = i;
        }
        if seen.contains(&usize::MAX) || self.dfs_order.len() != n {
            return Err(Error::InvalidArgument("depth-first order is not a permutation".into()));
        }
        for v in 0..n {
            if v != self.root && seen[self.parent[v]] >= seen[v] {
                return Err(Error::InvalidArgument(format!("vertex {v} precedes its parent")));
            }
        }
        if self.parent[self.root] != self.root || (0..n).filter(|&v| self.parent[v] == v).count() != 1 {
            return Err(Error::InvalidArgument("not a single-rooted tree".into()));
        }
        Ok(())
    }

    /// Canonical key for comparing tree laws: the parent array with the
    /// root pointing to itself.
    pub fn key(&self) -> Vec<usize> {
        self.parent.clone()
    }
}

/// `prod_v p_v^{d_v}` with `d_v` the number of children of `v`.
pub fn ptree_probability(tree: &RootedTree, p: &PSeq) -> f64 {
    (0..tree.n()).map(|v| p[v].powi(tree.out_degree(v) as i32)).product()
}

/// Same product straight from a parent array.
pub fn ptree_probability_of_parents(parent: &[usize], p: &PSeq) -> f64 {
    parent.iter().enumerate().filter(|(v, q)| *v != **q).map(|(_, &q)| p[q]).product()
}

/// All rooted labelled trees on `0..n` as parent arrays (`n^{n-1}` of them).
///
/// Enumerates all functions `[n] -> [n]` with exactly one fixed point and
/// keeps the acyclic ones; intended for `n <= 6`.
pub fn enumerate_rooted_trees(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let total = n.pow(n as u32);
    let mut parent = vec![0usize; n];
    for code in 0..total {
        let mut c = code;
        for slot in parent.iter_mut() {
            *slot = c % n;
            c /= n;
        }
        if parent.iter().enumerate().filter(|(v, q)| v == *q).count() != 1 {
            continue;
        }
        let acyclic = (0..n).all(|start| {
            let mut v = start;
            for _ in 0..n {
                if parent[v] == v {
                    return true;
                }
                v = parent[v];
            }
            false
        });
        if acyclic {
            out.push(parent.clone());
        }
    }
    out
}
