//! Exact identities linking a p-tree to the excursion that built it.
//!
//! Every check here computes the tree side from the parent structure alone
//! and the path side by evaluating the excursion, so the two are independent.

use serde::Serialize;

use super::exploration::{classical_exploration, exploration_height, g_process, width_profile};
use super::{Construction, PSeq, Realization, RootedTree};
use crate::error::{Error, Result};
use crate::paths::CadlagPath;

pub const IDENTITY_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IdentityReport {
    pub identity: &'static str,
    pub max_error: f64,
    /// Number of points at which the identity was evaluated.
    pub checked: usize,
}

impl IdentityReport {
    fn new(identity: &'static str) -> Self {
        Self { identity, max_error: 0.0, checked: 0 }
    }

    fn record(&mut self, err: f64) {
        self.max_error = self.max_error.max(err);
        self.checked += 1;
    }

    pub fn passes(&self) -> bool {
        self.max_error <= IDENTITY_TOLERANCE
    }
}

/// Accumulates `A(v) = A(parent) + weight of later siblings of v` down the
/// tree and returns `A(v) + weight of children of v` for every `v`.
///
/// With `weight = p` this is `p(N(v))`, the mass of the later children of
/// the ancestors of `v` plus the children of `v`.
fn later_plus_children(tree: &RootedTree, weight: &[f64]) -> Vec<f64> {
    let n = tree.n();
    let mut a = vec![0.0; n];
    let mut out = vec![0.0; n];
    for &v in &tree.dfs_order {
        let kids = tree.children(v);
        let mut suffix = 0.0;
        for &c in kids.iter().rev() {
            a[c] = a[v] + suffix;
            suffix += weight[c];
        }
        out[v] = a[v] + suffix;
    }
    out
}

/// `p(N(v))` for every vertex.
pub fn neighbourhood_mass(tree: &RootedTree, p: &PSeq) -> Vec<f64> {
    later_plus_children(tree, p.probs())
}

/// Depth-first construction: `F^exc(e(v)) = p(N(v))`.
pub fn check_deprop(tree: &RootedTree, fexc: &CadlagPath, p: &PSeq) -> IdentityReport {
    let mass = neighbourhood_mass(tree, p);
    let e = dfs_exam_ends(tree, p);
    let mut rep = IdentityReport::new("deprop");
    for v in 0..tree.n() {
        rep.record((fexc.value(e[v]) - mass[v]).abs());
    }
    rep
}

/// Examination end times along the depth-first order, whatever the
/// construction recorded in the tree.
pub(crate) fn dfs_exam_ends(tree: &RootedTree, p: &PSeq) -> Vec<f64> {
    if tree.examination == Construction::Depth {
        return tree.e_times.clone();
    }
    let mut e = vec![0.0; tree.n()];
    let mut acc = 0.0;
    for &v in &tree.dfs_order {
        acc += p[v];
        e[v] = acc;
    }
    e
}

fn generation_masses(tree: &RootedTree, p: &PSeq) -> Vec<f64> {
    let mut mass = vec![0.0; tree.height() + 2];
    for v in 0..tree.n() {
        mass[tree.depth[v]] += p[v];
    }
    mass
}

/// Breadth-first construction: `u(h) = sum_{ht <= h-1} p` is where the
/// examination of generation `h - 1` ends, and `F^exc(u(h))` is the mass of
/// generation `h`.
///
/// The first error compares the examination clock with the generation sums;
/// the second compares the excursion with the next generation.
pub fn generation_weights_report(tree: &RootedTree, fexc: &CadlagPath, p: &PSeq) -> (Vec<(f64, f64)>, IdentityReport) {
    let mass = generation_masses(tree, p);
    let h_max = tree.height();
    // examination end of the last vertex of each generation
    let mut gen_end = vec![0.0; h_max + 1];
    let mut acc = 0.0;
    for &v in &tree.bfs_order {
        acc += p[v];
        gen_end[tree.depth[v]] = acc;
    }
    let mut rep = IdentityReport::new("F1/F2");
    let mut pairs = Vec::with_capacity(h_max + 1);
    let mut cum = 0.0;
    for h in 1..=h_max + 1 {
        cum += mass[h - 1];
        let u = gen_end[h - 1];
        rep.record((u - cum).abs());
        let f = fexc.value(u);
        rep.record((f - mass[h]).abs());
        pairs.push((u, f));
    }
    (pairs, rep)
}

pub fn generation_weights(tree: &RootedTree, fexc: &CadlagPath, p: &PSeq) -> Result<Vec<(f64, f64)>> {
    let (pairs, rep) = generation_weights_report(tree, fexc, p);
    if !rep.passes() {
        return Err(Error::IdentityViolation { identity: "F1/F2", discrepancy: rep.max_error });
    }
    Ok(pairs)
}

/// `W^p(h) = F^exc(W̄^p(h))` at every generation of the breadth-first tree.
pub fn check_f2r(tree: &RootedTree, fexc: &CadlagPath, p: &PSeq) -> IdentityReport {
    let w = width_profile(tree, p);
    let mut rep = IdentityReport::new("F2r");
    for g in 0..w.generations() {
        let h = g as f64 * w.sigma;
        rep.record((w.width(h) - fexc.value(w.cumulative(h))).abs());
    }
    rep
}

/// Breadth-first ordering property: every vertex after the root sits before
/// the examination clock reaches it, `x'_{v_j} < Y_j`.
///
/// `max_error` is `max(0, x'_{v_j} - Y_j)`; a tie counts as a violation of
/// size `f64::MIN_POSITIVE`.
pub fn check_claim(real: &Realization, p: &PSeq) -> IdentityReport {
    let order = &real.tree.bfs_order;
    let x = real.shifted();
    let mut rep = IdentityReport::new("claim");
    let mut y = p[order[0]];
    for &v in &order[1..] {
        let gap = x[v] - y;
        rep.record(if gap >= 0.0 { gap.max(f64::MIN_POSITIVE) } else { 0.0 });
        y += p[v];
    }
    rep
}

/// `H^n(t) = H^p(S_n(t))` at the cell midpoints `t = (k + 1/2)/n`.
pub fn check_clhp(tree: &RootedTree, p: &PSeq) -> IdentityReport {
    let n = tree.n();
    let hn = classical_exploration(tree);
    let hp = exploration_height(tree, p);
    let mut rep = IdentityReport::new("clhp");
    let mut prev = 0.0;
    for (k, &w) in tree.dfs_order.iter().enumerate() {
        let next = prev + p[w];
        let t = (k as f64 + 0.5) / n as f64;
        let s = 0.5 * (prev + next);
        rep.record((hn.value(t) - hp.value(s)).abs());
        prev = next;
    }
    rep
}

/// No large vertex is a child of another large vertex.
pub fn keyg_hypothesis_holds(tree: &RootedTree, p: &PSeq) -> bool {
    (0..p.large()).all(|i| match tree.parent_of(i) {
        Some(q) => !p.is_large(q),
        None => true,
    })
}

/// Both sides of the `G` identity at every `e(v)`: returns `(G(e(v)),
/// p(N*(v)), sum_{i in N(v), i large} (p_i - p(B_i)))` per vertex.
fn keyg_terms(real: &Realization, p: &PSeq) -> Vec<(f64, f64, f64)> {
    let tree = &real.tree;
    let n = tree.n();
    let g = g_process(real, p);
    let e = dfs_exam_ends(tree, p);
    let star: Vec<f64> = (0..n)
        .map(|w| {
            let parent_large = tree.parent_of(w).is_some_and(|q| p.is_large(q));
            if p.is_large(w) || parent_large {
                0.0
            } else {
                p[w]
            }
        })
        .collect();
    let deficit: Vec<f64> =
        (0..n).map(|w| if p.is_large(w) { p[w] - p.mass(tree.children(w).iter().copied()) } else { 0.0 }).collect();
    let n_star = later_plus_children(tree, &star);
    let n_def = later_plus_children(tree, &deficit);
    (0..n).map(|v| (g.value(e[v]), n_star[v], n_def[v])).collect()
}

/// `G^p_I(e(v)) = p(N*(v)) + sum_{i in N(v) ∩ [I]} (p_i - p(B_i))`, where
/// `N*(v)` drops from `N(v)` the large vertices and the children of large
/// vertices. `None` when some large vertex has a large parent.
///
/// Each large `i` in `N(v)` is discovered but unexamined, so `F^exc` counts
/// `p_i` while `r_i` removes `p(B_i)`; hence the plus sign.
pub fn check_keyg(real: &Realization, p: &PSeq) -> Option<IdentityReport> {
    if !keyg_hypothesis_holds(&real.tree, p) {
        return None;
    }
    let mut rep = IdentityReport::new("keyg");
    for (g, star, def) in keyg_terms(real, p) {
        rep.record((g - (star + def)).abs());
    }
    Some(rep)
}

/// The same identity with the correction term subtracted instead of added.
/// Kept to measure how far that reading is from the process.
pub fn check_keyg_literal(real: &Realization, p: &PSeq) -> Option<IdentityReport> {
    if !keyg_hypothesis_holds(&real.tree, p) {
        return None;
    }
    let mut rep = IdentityReport::new("keyg-literal");
    for (g, star, def) in keyg_terms(real, p) {
        rep.record((g - (star - def)).abs());
    }
    Some(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ptree::{build_breadth, build_depth};

    /// p = (0.4, 0.3, 0.2, 0.1) with vertex 0 large, x = (0.1, 0, 0.2, 0.5).
    ///
    /// Vertex 1 is the root and owns (0, 0.3]: children 0, 2. Depth-first
    /// examines 0 on (0.3, 0.7], finding 3, then 3 on (0.7, 0.8] and 2 on
    /// (0.8, 1]. By hand from F^exc and r_0 = 0.1 on (0.1, 0.7] ramping to 0
    /// at 0.8: G(0.3) = 0.6 - 0.1, G(0.7) = 0.3 - 0.1, G(0.8) = 0.2, G(1) = 0.
    fn hand() -> (Realization, PSeq) {
        let p = PSeq::new(vec![0.4, 0.3, 0.2, 0.1], 1).unwrap();
        let r = build_depth(&p, &[0.1, 0.0, 0.2, 0.5]).unwrap();
        (r, p)
    }

    #[test]
    fn hand_tree_shape() {
        let (r, _) = hand();
        assert_eq!(r.tree.root, 1);
        assert_eq!(r.tree.parent, vec![1, 1, 1, 0]);
        assert_eq!(r.tree.dfs_order, vec![1, 0, 3, 2]);
    }

    #[test]
    fn g_by_hand() {
        let (r, p) = hand();
        let g = g_process(&r, &p);
        for (u, want) in [(0.3, 0.5), (0.7, 0.2), (0.8, 0.2), (1.0, 0.0), (0.75, 0.2)] {
            assert!((g.value(u) - want).abs() < 1e-12, "G({u}) = {}", g.value(u));
        }
    }

    #[test]
    fn keyg_sign() {
        let (r, p) = hand();
        let plus = check_keyg(&r, &p).unwrap();
        assert!(plus.max_error < 1e-12);
        let minus = check_keyg_literal(&r, &p).unwrap();
        // at the root: N*(root) = {2}, correction 0.4 - 0.1
        assert!((minus.max_error - 0.6).abs() < 1e-12);
    }

    #[test]
    fn deprop_by_hand() {
        let (r, p) = hand();
        let n = neighbourhood_mass(&r.tree, &p);
        // N(1) = {0, 2}; N(0) = {2, 3}; N(3) = {2}; N(2) = {}
        let want = [0.3, 0.6, 0.0, 0.2];
        for v in 0..4 {
            assert!((n[v] - want[v]).abs() < 1e-12);
        }
        assert!(check_deprop(&r.tree, r.fexc(), &p).max_error < 1e-12);
    }

    #[test]
    fn single_vertex() {
        let p = PSeq::new(vec![1.0], 0).unwrap();
        let r = build_depth(&p, &[0.4]).unwrap();
        assert_eq!(check_deprop(&r.tree, r.fexc(), &p).max_error, 0.0);
        let b = build_breadth(&p, &[0.4]).unwrap();
        let pairs = generation_weights(&b.tree, b.fexc(), &p).unwrap();
        assert_eq!(pairs, vec![(1.0, 0.0)]);
    }

    #[test]
    fn root_with_two_children() {
        // x' = (0, 0.2, 0.3): root 0 owns (0, 0.5] and gets both
        let p = PSeq::new(vec![0.5, 0.3, 0.2], 0).unwrap();
        let b = build_breadth(&p, &[0.6, 0.8, 0.9]).unwrap();
        assert_eq!(b.tree.parent, vec![0, 0, 0]);
        let pairs = generation_weights(&b.tree, b.fexc(), &p).unwrap();
        assert!((pairs[0].0 - 0.5).abs() < 1e-15 && (pairs[0].1 - 0.5).abs() < 1e-15);
        assert!(check_f2r(&b.tree, b.fexc(), &p).passes());
        assert!(check_claim(&b, &p).passes());
    }

    #[test]
    fn clhp_on_hand_tree() {
        let (r, p) = hand();
        let hn = classical_exploration(&r.tree);
        // dfs 1, 0, 3, 2 has heights 0, 1, 2, 1
        for (k, want) in [0.0, 1.0, 2.0, 1.0].iter().enumerate() {
            assert_eq!(hn.value((k as f64 + 0.5) / 4.0), *want);
        }
        assert_eq!(check_clhp(&r.tree, &p).max_error, 0.0);
    }
}
