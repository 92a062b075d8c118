//! Right-continuous piecewise-linear paths with jumps.
//!
//! A path is a sorted list of [`Knot`]s. At each knot the path may jump from
//! `left` (the left limit) to `right` (the value); between consecutive knots it
//! is the straight line from `right` at `t_k` to `left` at `t_{k+1}`.

use std::io::{self, BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Knot {
    pub t: f64,
    pub left: f64,
    pub right: f64,
}

impl Knot {
    pub fn new(t: f64, left: f64, right: f64) -> Self {
        Self { t, left, right }
    }

    pub fn continuous(t: f64, value: f64) -> Self {
        Self { t, left: value, right: value }
    }

    pub fn jump(&self) -> f64 {
        self.right - self.left
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CadlagPath {
    knots: Vec<Knot>,
}

impl CadlagPath {
    pub fn from_knots(knots: Vec<Knot>) -> Result<Self> {
        if knots.len() < 2 {
            return Err(Error::InvalidPath("a path needs at least two breakpoints".into()));
        }
        for w in knots.windows(2) {
            if !(w[0].t < w[1].t) {
                return Err(Error::InvalidPath(format!(
                    "breakpoints not strictly increasing at {} -> {}",
                    w[0].t, w[1].t
                )));
            }
        }
        if knots.iter().any(|k| !(k.t.is_finite() && k.left.is_finite() && k.right.is_finite())) {
            return Err(Error::InvalidPath("non-finite breakpoint or value".into()));
        }
        Ok(Self { knots })
    }

    /// Continuous path through `(times[k], values[k])`.
    pub fn from_points(times: &[f64], values: &[f64]) -> Result<Self> {
        if times.len() != values.len() {
            return Err(Error::InvalidPath("times and values differ in length".into()));
        }
        Self::from_knots(times.iter().zip(values).map(|(&t, &v)| Knot::continuous(t, v)).collect())
    }

    /// Constant path `c` on `[0, 1]`.
    pub fn constant(c: f64) -> Self {
        Self { knots: vec![Knot::continuous(0.0, c), Knot::continuous(1.0, c)] }
    }

    pub(crate) fn from_knots_unchecked(knots: Vec<Knot>) -> Self {
        debug_assert!(knots.len() >= 2);
        debug_assert!(knots.windows(2).all(|w| w[0].t < w[1].t), "unsorted knots");
        Self { knots }
    }

    pub fn knots(&self) -> &[Knot] {
        &self.knots
    }

    pub fn len(&self) -> usize {
        self.knots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.knots.is_empty()
    }

    pub fn start(&self) -> f64 {
        self.knots[0].t
    }

    pub fn end(&self) -> f64 {
        self.knots[self.knots.len() - 1].t
    }

    /// Index of the last knot with `t_k <= t`, clamped to the domain.
    fn locate(&self, t: f64) -> usize {
        let idx = self.knots.partition_point(|k| k.t <= t);
        idx.saturating_sub(1)
    }

    fn interpolate(&self, k: usize, t: f64) -> f64 {
        let a = &self.knots[k];
        let b = &self.knots[k + 1];
        let w = (t - a.t) / (b.t - a.t);
        a.right + w * (b.left - a.right)
    }

    /// Value at `t` (right-continuous). Times outside the domain are clamped.
    pub fn value(&self, t: f64) -> f64 {
        if t <= self.start() {
            return self.knots[0].right;
        }
        if t >= self.end() {
            return self.knots[self.knots.len() - 1].right;
        }
        let k = self.locate(t);
        if self.knots[k].t == t {
            self.knots[k].right
        } else {
            self.interpolate(k, t)
        }
    }

    /// Left limit at `t`.
    pub fn left_limit(&self, t: f64) -> f64 {
        if t <= self.start() {
            return self.knots[0].left;
        }
        if t > self.end() {
            return self.knots[self.knots.len() - 1].right;
        }
        let k = self.locate(t);
        if self.knots[k].t == t {
            self.knots[k].left
        } else {
            self.interpolate(k, t)
        }
    }

    /// Knots with a nonzero jump.
    pub fn jumps(&self) -> impl Iterator<Item = &Knot> + '_ {
        self.knots.iter().filter(|k| k.right != k.left)
    }

    pub fn max_abs_jump(&self) -> f64 {
        self.knots.iter().map(|k| k.jump().abs()).fold(0.0, f64::max)
    }

    /// Smallest value or left limit attained anywhere on the path.
    pub fn infimum(&self) -> f64 {
        self.knots.iter().map(|k| k.left.min(k.right)).fold(f64::INFINITY, f64::min)
    }

    /// `inf` of the path over `[a, b]`, left limits included.
    pub fn infimum_on(&self, a: f64, b: f64) -> f64 {
        let mut m = self.value(a).min(self.value(b)).min(self.left_limit(b));
        let lo = self.knots.partition_point(|k| k.t <= a);
        for k in &self.knots[lo..] {
            if k.t > b {
                break;
            }
            m = m.min(k.left);
            if k.t < b {
                m = m.min(k.right);
            }
        }
        m
    }

    pub fn supremum(&self) -> f64 {
        self.knots.iter().map(|k| k.left.max(k.right)).fold(f64::NEG_INFINITY, f64::max)
    }

    /// Sup-norm of the path.
    pub fn sup_abs(&self) -> f64 {
        self.knots.iter().map(|k| k.left.abs().max(k.right.abs())).fold(0.0, f64::max)
    }

    pub fn map_values(&self, f: impl Fn(f64) -> f64) -> Self {
        Self { knots: self.knots.iter().map(|k| Knot::new(k.t, f(k.left), f(k.right))).collect() }
    }

    pub fn scale(&self, c: f64) -> Self {
        self.map_values(|v| c * v)
    }

    /// Pointwise `f(self, other)` on the union of both breakpoint sets.
    ///
    /// Exact for affine `f`, since both inputs are linear between consecutive
    /// union breakpoints. For non-affine `f` the result is exact at the
    /// breakpoints only. The domain is the intersection of both domains.
    pub fn combine(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Self {
        let lo = self.start().max(other.start());
        let hi = self.end().min(other.end());
        let mut times: Vec<f64> = Vec::with_capacity(self.len() + other.len());
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.knots, &other.knots);
        while i < a.len() || j < b.len() {
            let t = match (a.get(i), b.get(j)) {
                (Some(x), Some(y)) if x.t == y.t => {
                    i += 1;
                    j += 1;
                    x.t
                }
                (Some(x), Some(y)) if x.t < y.t => {
                    i += 1;
                    x.t
                }
                (Some(_), Some(y)) => {
                    j += 1;
                    y.t
                }
                (Some(x), None) => {
                    i += 1;
                    x.t
                }
                (None, Some(y)) => {
                    j += 1;
                    y.t
                }
                (None, None) => unreachable!(),
            };
            if t >= lo && t <= hi {
                times.push(t);
            }
        }
        let (mut sa, mut sb) = (Sweep::new(a), Sweep::new(b));
        let knots = times
            .into_iter()
            .map(|t| {
                let (al, ar) = sa.at(t);
                let (bl, br) = sb.at(t);
                Knot::new(t, f(al, bl), f(ar, br))
            })
            .collect();
        Self::from_knots_unchecked(knots)
    }

    pub fn add(&self, other: &Self) -> Self {
        self.combine(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.combine(other, |a, b| a - b)
    }

    /// `sup |self - other|` over the common domain.
    pub fn sup_distance(&self, other: &Self) -> f64 {
        self.sub(other).sup_abs()
    }

    /// Restriction to `[from, to]`, with new knots at the cut points.
    pub fn restrict(&self, from: f64, to: f64) -> Self {
        let from = from.max(self.start());
        let to = to.min(self.end());
        let mut knots = Vec::new();
        if from == to {
            let v = self.value(from);
            return Self::from_knots_unchecked(vec![
                Knot::new(from, self.left_limit(from), v),
                Knot::new(from + f64::EPSILON, v, v),
            ]);
        }
        knots.push(Knot::new(from, self.left_limit(from), self.value(from)));
        for k in &self.knots {
            if k.t > from && k.t < to {
                knots.push(*k);
            }
        }
        knots.push(Knot::new(to, self.left_limit(to), self.value(to)));
        Self::from_knots_unchecked(knots)
    }

    /// Writes `t,left_value,right_value` rows with a header line.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "t,left_value,right_value")?;
        for k in &self.knots {
            writeln!(w, "{:?},{:?},{:?}", k.t, k.left, k.right)?;
        }
        Ok(())
    }

    pub fn read_csv<R: BufRead>(r: R) -> Result<Self> {
        let mut knots = Vec::new();
        for (lineno, line) in r.lines().enumerate() {
            let line = line.map_err(|e| Error::InvalidPath(e.to_string()))?;
            if lineno == 0 || line.trim().is_empty() {
                continue;
            }
            let fields: Vec<f64> = line
                .split(',')
                .map(|s| s.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::InvalidPath(format!("line {}: {e}", lineno + 1)))?;
            if fields.len() != 3 {
                return Err(Error::InvalidPath(format!("line {}: expected 3 columns", lineno + 1)));
            }
            knots.push(Knot::new(fields[0], fields[1], fields[2]));
        }
        Self::from_knots(knots)
    }
}

/// Evaluation at nondecreasing times inside the domain, in amortized O(1).
struct Sweep<'a> {
    ks: &'a [Knot],
    i: usize,
}

impl<'a> Sweep<'a> {
    fn new(ks: &'a [Knot]) -> Self {
        Self { ks, i: 0 }
    }

    /// `(left limit, value)` at `t`.
    fn at(&mut self, t: f64) -> (f64, f64) {
        let ks = self.ks;
        while self.i + 1 < ks.len() && ks[self.i + 1].t <= t {
            self.i += 1;
        }
        let a = &ks[self.i];
        if a.t == t || self.i + 1 == ks.len() {
            return (a.left, a.right);
        }
        let b = &ks[self.i + 1];
        let v = a.right + (t - a.t) / (b.t - a.t) * (b.left - a.right);
        (v, v)
    }
}
