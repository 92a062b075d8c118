//! Particles on the circle: the bridge `F^p`, its excursion, and the
//! breadth-first and depth-first tree constructions read off from it.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{PSeq, RootedTree};
use crate::error::{Error, Result};
use crate::paths::{CadlagPath, Knot};

/// Left limits closer than this to the minimum count as a tie.
pub const TIE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Construction {
    Breadth,
    Depth,
}

impl std::str::FromStr for Construction {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "breadth" => Ok(Self::Breadth),
            "depth" => Ok(Self::Depth),
            _ => Err(Error::InvalidArgument(format!("unknown construction {s:?}"))),
        }
    }
}

pub fn sample_positions<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    (0..n).map(|_| rng.random::<f64>()).collect()
}

/// `F^p(u) = -u + sum_i p_i 1{x_i <= u}` on `[0, 1]`.
pub fn fp_bridge(p: &PSeq, x: &[f64]) -> Result<CadlagPath> {
    let order = sorted_positions(p, x)?;
    let mut knots = Vec::with_capacity(x.len() + 2);
    let mut cum = 0.0;
    let mut i = 0;
    // particles sitting at 0 jump immediately
    let mut at_zero = 0.0;
    while i < order.len() && x[order[i]] == 0.0 {
        at_zero += p[order[i]];
        i += 1;
    }
    cum += at_zero;
    knots.push(Knot::new(0.0, 0.0, at_zero));
    for &v in &order[i..] {
        let left = cum - x[v];
        cum += p[v];
        knots.push(Knot::new(x[v], left, left + p[v]));
    }
    knots.push(Knot::continuous(1.0, 0.0));
    Ok(CadlagPath::from_knots_unchecked(knots))
}

fn sorted_positions(p: &PSeq, x: &[f64]) -> Result<Vec<usize>> {
    if x.len() != p.len() {
        return Err(Error::InvalidArgument(format!("{} positions for {} masses", x.len(), p.len())));
    }
    if let Some(&bad) = x.iter().find(|&&v| !(0.0..1.0).contains(&v)) {
        return Err(Error::InvalidArgument(format!("position {bad} outside [0, 1)")));
    }
    let mut order: Vec<usize> = (0..x.len()).collect();
    order.sort_unstable_by(|&a, &b| x[a].total_cmp(&x[b]));
    if let Some(w) = order.windows(2).find(|w| x[w[0]] == x[w[1]]) {
        return Err(Error::DuplicatePosition(x[w[0]]));
    }
    Ok(order)
}

/// The excursion of `F^p` started at its minimizing particle.
#[derive(Debug, Clone)]
pub struct Excursion {
    /// `F^exc(u) = -u + sum_i p_i 1{x'_i <= u}`; at 0 it jumps from 0 to
    /// the root mass.
    pub path: CadlagPath,
    /// Minimizing particle `v_1`.
    pub root: usize,
    /// `y(1) = x_{v_1}`.
    pub y1: f64,
    /// `x'_i = x_i - y(1) mod 1`, indexed by vertex.
    pub shifted: Vec<f64>,
    /// Vertices in increasing order of `x'`, starting with the root.
    pub circle: Vec<usize>,
}

pub fn fexc_excursion(p: &PSeq, x: &[f64]) -> Result<Excursion> {
    let order = sorted_positions(p, x)?;
    let n = order.len();
    let mut best = 0;
    let mut best_val = f64::INFINITY;
    let mut second = f64::INFINITY;
    let mut cum = 0.0;
    for (k, &v) in order.iter().enumerate() {
        let left = cum - x[v];
        if left < best_val {
            second = best_val;
            best_val = left;
            best = k;
        } else if left < second {
            second = left;
        }
        cum += p[v];
    }
    if second - best_val <= TIE_TOLERANCE {
        return Err(Error::Tie);
    }
    let root = order[best];
    let y1 = x[root];
    let mut circle = Vec::with_capacity(n);
    circle.extend_from_slice(&order[best..]);
    circle.extend_from_slice(&order[..best]);
    let mut shifted = vec![0.0; n];
    for &v in &circle {
        shifted[v] = if x[v] >= y1 { x[v] - y1 } else { x[v] + 1.0 - y1 };
    }
    let mut knots = Vec::with_capacity(n + 1);
    knots.push(Knot::new(0.0, 0.0, p[root]));
    let mut cum = p[root];
    let mut prev = 0.0;
    for &v in &circle[1..] {
        let s = shifted[v];
        if !(s > prev && s < 1.0) {
            return Err(Error::DuplicatePosition(x[v]));
        }
        prev = s;
        let left = cum - s;
        cum += p[v];
        knots.push(Knot::new(s, left, left + p[v]));
    }
    knots.push(Knot::continuous(1.0, 0.0));
    Ok(Excursion { path: CadlagPath::from_knots_unchecked(knots), root, y1, shifted, circle })
}

/// A p-tree together with the particle configuration that built it.
#[derive(Debug, Clone)]
pub struct Realization {
    pub tree: RootedTree,
    pub excursion: Excursion,
}

impl Realization {
    pub fn fexc(&self) -> &CadlagPath {
        &self.excursion.path
    }

    pub fn shifted(&self) -> &[f64] {
        &self.excursion.shifted
    }
}

pub fn build_breadth(p: &PSeq, x: &[f64]) -> Result<Realization> {
    build(p, x, Construction::Breadth)
}

pub fn build_depth(p: &PSeq, x: &[f64]) -> Result<Realization> {
    build(p, x, Construction::Depth)
}

/// Both constructions examine vertices one at a time; the `j`-th examined
/// vertex owns the arc `(Y_j, Y_j + p]` and its children are the particles
/// in that arc. Since the arcs tile the circle in examination order, the
/// children of each vertex are the next block of the circle order.
pub fn build(p: &PSeq, x: &[f64], construction: Construction) -> Result<Realization> {
    let exc = fexc_excursion(p, x)?;
    let n = p.len();
    let circle = &exc.circle;
    let mut parent = vec![usize::MAX; n];
    let mut children: Vec<Vec<usize>> = vec![Vec::new(); n];
    parent[exc.root] = exc.root;
    let mut next = 1; // next undiscovered position in circle order
    let mut y = 0.0;
    let mut examine = |v: usize, next: &mut usize, y: &mut f64, children: &mut Vec<Vec<usize>>| {
        *y += p[v];
        let start = *next;
        while *next < n && exc.shifted[circle[*next]] <= *y {
            parent[circle[*next]] = v;
            *next += 1;
        }
        children[v].extend_from_slice(&circle[start..*next]);
    };
    let mut examined = 0;
    match construction {
        Construction::Breadth => {
            // breadth-first order is the circle order itself
            for j in 0..n {
                if j >= next {
                    return Err(Error::Tie);
                }
                examine(circle[j], &mut next, &mut y, &mut children);
                examined += 1;
            }
        }
        Construction::Depth => {
            let mut stack = vec![exc.root];
            while let Some(v) = stack.pop() {
                examine(v, &mut next, &mut y, &mut children);
                examined += 1;
                stack.extend(children[v].iter().rev());
            }
        }
    }
    if examined != n || next != n {
        // the excursion returned to zero early: only possible when the
        // minimum is not unique up to rounding
        return Err(Error::Tie);
    }
    let tree = RootedTree::assemble(parent, exc.root, children, p, construction);
    Ok(Realization { tree, excursion: exc })
}

/// Uniform positions and the chosen construction, redrawing the positions
/// on ties or collisions.
pub fn sample_ptree<R: Rng + ?Sized>(p: &PSeq, construction: Construction, rng: &mut R) -> Realization {
    loop {
        let x = sample_positions(p.len(), rng);
        match build(p, &x, construction) {
            Ok(r) => return r,
            Err(Error::Tie) | Err(Error::DuplicatePosition(_)) => continue,
            Err(e) => unreachable!("positions are valid by construction: {e}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bridge_values() {
        let p = PSeq::new(vec![1.0], 0).unwrap();
        let f = fp_bridge(&p, &[0.5]).unwrap();
        assert!((f.value(0.25) + 0.25).abs() < 1e-15);
        assert!((f.value(0.75) - 0.25).abs() < 1e-15);
        let p = PSeq::new(vec![0.6, 0.4], 0).unwrap();
        let f = fp_bridge(&p, &[0.5, 0.25]).unwrap();
        assert!((f.value(0.3) - 0.1).abs() < 1e-15);
        assert!(f.left_limit(1.0).abs() < 1e-12);
        assert!(matches!(fp_bridge(&p, &[0.5, 0.5]), Err(Error::DuplicatePosition(_))));
    }

    #[test]
    fn single_particle_excursion() {
        let p = PSeq::new(vec![1.0], 0).unwrap();
        let e = fexc_excursion(&p, &[0.3]).unwrap();
        assert_eq!(e.root, 0);
        for u in [0.1, 0.5, 0.9] {
            assert!((e.path.value(u) - (1.0 - u)).abs() < 1e-15);
        }
        assert_eq!(e.path.value(1.0), 0.0);
        let r = build_breadth(&p, &[0.3]).unwrap();
        assert_eq!(r.tree.parent, vec![0]);
    }

    /// p = (0.5, 0.3, 0.2), x = (0.05, 0.5, 0.7).
    ///
    /// Left limits of F^p at the particles: -0.05, 0.0, 0.1, so vertex 0 is
    /// the root and x' = (0, 0.45, 0.65). Breadth-first: the root owns
    /// (0, 0.5] and gets child 1; vertex 1 owns (0.5, 0.8] and gets child 2.
    #[test]
    fn hand_example_is_a_path() {
        let p = PSeq::new(vec![0.5, 0.3, 0.2], 0).unwrap();
        let x = [0.05, 0.5, 0.7];
        let b = build_breadth(&p, &x).unwrap();
        assert_eq!(b.tree.parent, vec![0, 0, 1]);
        let d = build_depth(&p, &x).unwrap();
        assert_eq!(d.tree.parent, vec![0, 0, 1]);
        assert_eq!(d.tree.dfs_order, vec![0, 1, 2]);
        let e = &d.tree.e_times;
        assert!((e[0] - 0.5).abs() < 1e-15 && (e[1] - 0.8).abs() < 1e-15 && (e[2] - 1.0).abs() < 1e-15);
    }

    /// p = (0.3, 0.25, 0.2, 0.15, 0.1), x = (0, 0.1, 0.2, 0.4, 0.6).
    ///
    /// Root 0 owns (0, 0.3] and gets 1, 2; vertex 1 owns (0.3, 0.55] and
    /// gets 3. Breadth-first then examines 2 on (0.55, 0.75], which holds
    /// vertex 4; depth-first examines 3 on (0.55, 0.7] first.
    #[test]
    fn constructions_differ() {
        let p = PSeq::new(vec![0.3, 0.25, 0.2, 0.15, 0.1], 0).unwrap();
        let x = [0.0, 0.1, 0.2, 0.4, 0.6];
        let b = build_breadth(&p, &x).unwrap();
        let d = build_depth(&p, &x).unwrap();
        assert_eq!(b.tree.parent, vec![0, 0, 0, 1, 2]);
        assert_eq!(d.tree.parent, vec![0, 0, 0, 1, 3]);
        assert_eq!(b.tree.bfs_order, vec![0, 1, 2, 3, 4]);
        assert_eq!(d.tree.dfs_order, vec![0, 1, 3, 4, 2]);
    }
}
