//! Poisson line-breaking construction of the ICRT.
//!
//! Cutpoints are the first coordinates `U_i` of a Poisson measure on the
//! octant `{0 <= y <= x}` with intensity `theta0^2`, together with the points
//! `xi_{i,j}`, `j >= 2`, of independent rate-`theta_i` Poisson processes.
//! The cutpoint `U_i` joins at `V_i`; the cutpoint `xi_{i,j}` joins at the
//! hub `xi_{i,1}`.

use rand::Rng;
use rand_distr::{Distribution, Exp, Exp1};

use super::EdgeTree;
use crate::paths::Theta;

#[derive(Debug, Clone, PartialEq)]
pub struct LineBreakPoints {
    /// `eta_1 < ... < eta_J`.
    pub cutpoints: Vec<f64>,
    /// `eta*_k` for each cutpoint; always `< eta_k`.
    pub joinpoints: Vec<f64>,
}

enum Source {
    /// Octant points, generated through `Lambda(x) = theta0^2 x^2 / 2`.
    Octant { gamma: f64, next: f64, theta0: f64 },
    /// Rate-`theta_i` process with its hub at `first`.
    Atom { rate: Exp<f64>, first: f64, next: f64 },
}

impl Source {
    fn next(&self) -> f64 {
        match self {
            Source::Octant { next, .. } | Source::Atom { next, .. } => *next,
        }
    }
}

/// The first `count` cutpoints and their joinpoints.
pub fn line_break_points<R: Rng + ?Sized>(theta: &Theta, count: usize, rng: &mut R) -> LineBreakPoints {
    let mut sources = Vec::new();
    if theta.theta0() > 0.0 {
        let gamma: f64 = Exp1.sample(rng);
        let theta0 = theta.theta0();
        sources.push(Source::Octant { gamma, next: (2.0 * gamma).sqrt() / theta0, theta0 });
    }
    for &t in theta.atoms().iter().filter(|&&t| t > 0.0) {
        let rate = Exp::new(t).expect("positive rate");
        let first = rate.sample(rng);
        let next = first + rate.sample(rng);
        sources.push(Source::Atom { rate, first, next });
    }
    let mut cutpoints = Vec::with_capacity(count);
    let mut joinpoints = Vec::with_capacity(count);
    while cutpoints.len() < count {
        let k = (0..sources.len())
            .min_by(|&a, &b| sources[a].next().total_cmp(&sources[b].next()))
            .expect("theta has a positive component");
        match &mut sources[k] {
            Source::Octant { gamma, next, theta0 } => {
                cutpoints.push(*next);
                joinpoints.push(*next * rng.random::<f64>());
                let e: f64 = Exp1.sample(rng);
                *gamma += e;
                *next = (2.0 * *gamma).sqrt() / *theta0;
            }
            Source::Atom { rate, first, next } => {
                cutpoints.push(*next);
                joinpoints.push(*first);
                *next += rate.sample(rng);
            }
        }
    }
    LineBreakPoints { cutpoints, joinpoints }
}

/// Stage-`J` tree: the branch `[0, eta_1]`, then each segment
/// `(eta_k, eta_{k+1}]` glued by its left end to `eta*_k`. Leaf `k` is the
/// far end of the `k`-th segment.
pub fn line_break_tree(points: &LineBreakPoints, j: usize) -> EdgeTree {
    let eta = &points.cutpoints[..j];
    let seg_start = |s: usize| if s == 0 { 0.0 } else { eta[s - 1] };
    let segment_of = |y: f64| eta.partition_point(|&e| e < y);
    // attachment positions per segment
    let mut on_segment: Vec<Vec<f64>> = vec![Vec::new(); j];
    for &y in &points.joinpoints[..j.saturating_sub(1)] {
        on_segment[segment_of(y)].push(y);
    }
    let mut parent = vec![0usize];
    let mut depth = vec![0.0f64];
    let mut leaves = Vec::with_capacity(j);
    // vertex id of each attachment position, per segment
    let mut attach: Vec<Vec<(f64, usize)>> = vec![Vec::new(); j];
    for s in 0..j {
        let (mut cur, base) = if s == 0 {
            (0, 0.0)
        } else {
            let y = points.joinpoints[s - 1];
            let seg = segment_of(y);
            let v = attach[seg].iter().find(|(t, _)| *t == y).expect("joinpoint lies on an earlier segment").1;
            (v, depth[v])
        };
        let mut ys = std::mem::take(&mut on_segment[s]);
        ys.sort_by(f64::total_cmp);
        ys.dedup();
        for y in ys {
            parent.push(cur);
            depth.push(base + (y - seg_start(s)));
            cur = parent.len() - 1;
            attach[s].push((y, cur));
        }
        parent.push(cur);
        depth.push(base + (eta[s] - seg_start(s)));
        leaves.push(parent.len() - 1);
    }
    EdgeTree::from_raw(&parent, &depth, 0, &leaves)
}

/// Reduced ICRT on `J` leaves via line-breaking.
pub fn line_break_sample<R: Rng + ?Sized>(theta: &Theta, j: usize, rng: &mut R) -> EdgeTree {
    assert!(j >= 1, "need at least one leaf");
    let pts = line_break_points(theta, j, rng);
    line_break_tree(&pts, j)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::icrt::edge_tree_stats;
    use crate::paths::validate_theta;
    use crate::rng::RngState;

    #[test]
    fn one_leaf_is_one_edge() {
        let mut rng = RngState::new(1, 0).rng();
        let t = line_break_sample(&Theta::brownian(), 1, &mut rng);
        assert_eq!(t.edges.len(), 1);
        assert_eq!(t.leaves, vec![1]);
    }

    #[test]
    fn two_leaves_make_a_cherry() {
        let mut rng = RngState::new(2, 0).rng();
        for _ in 0..100 {
            let t = line_break_sample(&Theta::brownian(), 2, &mut rng);
            assert_eq!(t.edges.len(), 3);
            assert_eq!(t.vertex_count(), 4);
        }
    }

    #[test]
    fn hand_points() {
        // eta = (1, 1.5, 2.5), joinpoints 0.4 (on segment 1), 1.2 (on segment 2)
        let pts = LineBreakPoints { cutpoints: vec![1.0, 1.5, 2.5], joinpoints: vec![0.4, 1.2, 0.0] };
        let s = edge_tree_stats(&line_break_tree(&pts, 3));
        assert!((s.total_length - 2.5).abs() < 1e-15);
        // leaf 2 hangs at depth 0.4 with length 0.5; leaf 3 hangs from leaf 2's
        // segment at 0.4 + 0.2 with length 1.0
        let want = [1.0, 0.9, 1.6];
        for k in 0..3 {
            assert!((s.leaf_depths[k] - want[k]).abs() < 1e-12);
        }
    }

    #[test]
    fn shared_hub_gives_high_degree() {
        // three segments all glued to the same hub at 0.5
        let pts = LineBreakPoints { cutpoints: vec![1.0, 2.0, 3.0, 4.0], joinpoints: vec![0.5, 0.5, 0.5, 0.0] };
        let t = line_break_tree(&pts, 4);
        let mut deg = vec![0; t.vertex_count()];
        for &(p, c, _) in &t.edges {
            deg[p] += 1;
            deg[c] += 1;
        }
        assert_eq!(deg.iter().copied().max(), Some(5));
    }

    #[test]
    fn cutpoints_increase_and_joinpoints_precede() {
        let theta = validate_theta(0.862, &[0.345, 0.302, 0.216]).unwrap();
        let mut rng = RngState::new(4, 0).rng();
        let pts = line_break_points(&theta, 50, &mut rng);
        for w in pts.cutpoints.windows(2) {
            assert!(w[0] < w[1]);
        }
        for (e, j) in pts.cutpoints.iter().zip(&pts.joinpoints) {
            assert!(j < e);
        }
    }
}
