//! Height processes, the modified excursion `G^p_I`, and generation widths.

use rand::Rng;
use serde::Serialize;

use super::identities::dfs_exam_ends;
use super::{sample_ptree, Construction, PSeq, Realization, RootedTree};
use crate::paths::{CadlagPath, Knot};

/// `H^p(u) = ht(w_i)` for `u` in `(y*(i-1), y*(i)]`, with `y*` the
/// cumulative mass in depth-first order.
///
/// `H^p` is left-continuous; the returned path stores its right-continuous
/// version, so `H^p(e(v))` is the left limit at `e(v)`.
pub fn exploration_height(tree: &RootedTree, p: &PSeq) -> CadlagPath {
    let order = &tree.dfs_order;
    let n = order.len();
    let ht = |i: usize| tree.depth[order[i]] as f64;
    let mut knots = Vec::with_capacity(n + 1);
    knots.push(Knot::continuous(0.0, ht(0)));
    let mut y = 0.0;
    for i in 0..n - 1 {
        y += p[order[i]];
        knots.push(Knot::new(y, ht(i), ht(i + 1)));
    }
    knots.push(Knot::continuous(1.0, ht(n - 1)));
    CadlagPath::from_knots_unchecked(knots)
}

/// `H^n(t) = ht(w_{i+1})` for `i/n <= t < (i+1)/n`, and `H^n(1) = H^n(1-)`.
pub fn classical_exploration(tree: &RootedTree) -> CadlagPath {
    let order = &tree.dfs_order;
    let n = order.len();
    let ht = |i: usize| tree.depth[order[i]] as f64;
    let mut knots = Vec::with_capacity(n + 1);
    knots.push(Knot::continuous(0.0, ht(0)));
    for i in 1..n {
        knots.push(Knot::new(i as f64 / n as f64, ht(i - 1), ht(i)));
    }
    knots.push(Knot::continuous(1.0, ht(n - 1)));
    CadlagPath::from_knots_unchecked(knots)
}

/// `G^p_I = F^exc - sum_{i in [I]} r_i` for a depth-first realization.
///
/// `r_i = sum_{v in B_i} rho_v`, where `rho_v` is `p_v` from the discovery
/// of `i` until the examination of `v` starts and then decreases linearly to
/// 0 at `e(v)`. The jump of `r_i` at `x'_i` is stored right-continuously,
/// matching the jump of `F^exc` there.
pub fn g_process(real: &Realization, p: &PSeq) -> CadlagPath {
    let tree = &real.tree;
    let x = real.shifted();
    let e = dfs_exam_ends(tree, p);
    // (time, jump, slope change); r is piecewise linear between events
    let mut events: Vec<(f64, f64, f64)> = Vec::new();
    for i in 0..p.large() {
        let kids = tree.children(i);
        if kids.is_empty() {
            continue;
        }
        events.push((x[i], p.mass(kids.iter().copied()), 0.0));
        for &v in kids {
            events.push((e[v] - p[v], 0.0, -1.0));
            events.push((e[v], 0.0, 1.0));
        }
    }
    if events.is_empty() {
        return real.fexc().clone();
    }
    events.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut knots = vec![Knot::continuous(0.0, 0.0)];
    let (mut t, mut val, mut slope) = (0.0, 0.0, 0.0);
    for (s, jump, ds) in events {
        let left = val + slope * (s - t);
        let last = knots.last_mut().unwrap();
        if s == last.t {
            last.right += jump;
        } else {
            knots.push(Knot::new(s, left, left + jump));
        }
        t = s;
        val = knots.last().unwrap().right;
        slope += ds;
    }
    if t < 1.0 {
        knots.push(Knot::continuous(1.0, val + slope * (1.0 - t)));
    }
    // rounding can leave tiny negative remainders where the ramps end
    for k in &mut knots {
        if k.left.abs() < 1e-14 {
            k.left = 0.0;
        }
        if k.right.abs() < 1e-14 {
            k.right = 0.0;
        }
    }
    real.fexc().sub(&CadlagPath::from_knots_unchecked(knots))
}

/// Generation masses on the `sigma`-rescaled height axis.
///
/// `W^p(h)` is the mass of generation `[h/sigma]` and `W̄^p(h)` the mass of
/// all earlier generations. Generation `height + 1` is included, with width
/// 0 and cumulative mass 1.
#[derive(Debug, Clone, Serialize)]
pub struct WidthProfile {
    pub sigma: f64,
    pub mass: Vec<f64>,
    pub before: Vec<f64>,
}

impl WidthProfile {
    pub fn generations(&self) -> usize {
        self.mass.len()
    }

    fn generation(&self, h: f64) -> usize {
        ((h / self.sigma).floor().max(0.0) as usize).min(self.mass.len() - 1)
    }

    pub fn width(&self, h: f64) -> f64 {
        self.mass[self.generation(h)]
    }

    pub fn cumulative(&self, h: f64) -> f64 {
        self.before[self.generation(h)]
    }

    /// `inf { h : W̄^p(h) >= u }`.
    pub fn cumulative_inverse(&self, u: f64) -> f64 {
        let g = self.before.partition_point(|&b| b < u).min(self.before.len() - 1);
        g as f64 * self.sigma
    }
}

pub fn width_profile(tree: &RootedTree, p: &PSeq) -> WidthProfile {
    let gens = tree.height() + 2;
    let mut mass = vec![0.0; gens];
    for v in 0..tree.n() {
        mass[tree.depth[v]] += p[v];
    }
    let mut before = Vec::with_capacity(gens);
    let mut acc = 0.0;
    for &m in &mass {
        before.push(acc);
        acc += m;
    }
    WidthProfile { sigma: p.sigma(), mass, before }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PkeyDiscrepancy {
    /// `sup_u |(theta0^2/2) sigma H^p(u) - G^p_I(u)/sigma|`.
    pub sup: f64,
    /// The same difference at the examination ends `e(v)` only.
    pub at_exam_ends: f64,
}

pub fn pkey_from_realization(real: &Realization, p: &PSeq, theta0: f64) -> PkeyDiscrepancy {
    let sigma = p.sigma();
    let a = 0.5 * theta0 * theta0 * sigma;
    let h = exploration_height(&real.tree, p);
    let g = g_process(real, p);
    // H is constant and G linear between joint knots, so knot values suffice
    let sup = h.combine(&g, |hv, gv| a * hv - gv / sigma).sup_abs();
    let e = dfs_exam_ends(&real.tree, p);
    let at_exam_ends =
        (0..real.tree.n()).map(|v| (a * real.tree.depth[v] as f64 - g.value(e[v]) / sigma).abs()).fold(0.0, f64::max);
    PkeyDiscrepancy { sup, at_exam_ends }
}

/// One depth-first realization of the discrepancy between the rescaled
/// height process and `G^p_I`.
pub fn pkey_discrepancy<R: Rng + ?Sized>(p: &PSeq, theta0: f64, rng: &mut R) -> PkeyDiscrepancy {
    let real = sample_ptree(p, Construction::Depth, rng);
    pkey_from_realization(&real, p, theta0)
}
