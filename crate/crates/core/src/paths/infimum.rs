//! Running infima and first passage on piecewise-linear paths.
//!
//! All three operations are exact on the knot representation: new knots are
//! only introduced where a linear piece crosses the current infimum level.

use super::cadlag::{CadlagPath, Knot};

/// `u -> inf_{u <= r <= to} x(r)` on `[from, to]`.
pub fn running_infimum(x: &CadlagPath, from: f64, to: f64) -> CadlagPath {
    let x = x.restrict(from, to);
    let ks = x.knots();
    let n = ks.len();
    let mut out: Vec<Knot> = Vec::with_capacity(n);
    // g at the last knot
    let last = ks[n - 1];
    let mut g_next = last.right;
    out.push(Knot::new(last.t, last.left.min(last.right), last.right));
    for k in (0..n - 1).rev() {
        let a = ks[k].right;
        let b = ks[k + 1].left;
        let c = b.min(g_next);
        let g_here = if a >= b || a >= c {
            c
        } else if b <= c {
            a
        } else {
            // x rises through c inside the segment
            let s = ks[k].t + (c - a) / (b - a) * (ks[k + 1].t - ks[k].t);
            if s > ks[k].t && s < ks[k + 1].t {
                out.push(Knot::continuous(s, c));
            }
            a
        };
        let right = g_here.min(a);
        out.push(Knot::new(ks[k].t, ks[k].left.min(right), right));
        g_next = right;
    }
    out.reverse();
    CadlagPath::from_knots_unchecked(out)
}

/// `u -> inf_{from <= r <= u} x(r)` on `[from, to]`.
pub fn forward_infimum(x: &CadlagPath, from: f64, to: f64) -> CadlagPath {
    let x = x.restrict(from, to);
    let ks = x.knots();
    let mut out: Vec<Knot> = Vec::with_capacity(ks.len());
    let first = ks[0];
    let mut h = first.right;
    out.push(Knot::new(first.t, first.left, first.right));
    for k in 1..ks.len() {
        let a = ks[k - 1].right;
        let b = ks[k].left;
        if b < a && b < h {
            if a > h {
                let s = ks[k - 1].t + (a - h) / (a - b) * (ks[k].t - ks[k - 1].t);
                if s > ks[k - 1].t && s < ks[k].t {
                    out.push(Knot::continuous(s, h));
                }
            }
            h = b;
        }
        let left = h;
        h = h.min(ks[k].right);
        out.push(Knot::new(ks[k].t, left, h));
    }
    CadlagPath::from_knots_unchecked(out)
}

/// `inf { s > t0 : x(s) <= level }`, or `None` if the path stays above
/// `level` on `(t0, end]`.
///
/// Crossings inside a linear piece are solved exactly; a crossing reached
/// only as a left limit still counts, since the infimum is what is returned.
pub fn first_passage_below(x: &CadlagPath, t0: f64, level: f64) -> Option<f64> {
    let ks = x.knots();
    if t0 >= x.end() {
        return None;
    }
    let start = ks.partition_point(|k| k.t <= t0);
    // start >= 1 unless t0 precedes the domain
    let (mut ta, mut a) = if start == 0 { (ks[0].t, ks[0].right) } else { (t0, x.value(t0)) };
    for k in ks.iter().skip(start) {
        let b = k.left;
        if a < level || (a == level && b <= a) {
            return Some(ta);
        }
        if b <= level && a > level {
            let s = ta + (a - level) / (a - b) * (k.t - ta);
            return Some(s.min(k.t));
        }
        if k.right <= level {
            return Some(k.t);
        }
        ta = k.t;
        a = k.right;
    }
    None
}
