//! `L(t) = int_0^t ds / x(s)` and occupation densities, both integrated
//! exactly on the linear pieces of a path.

use rayon::prelude::*;
use serde::Serialize;

use super::{ks_two_sample, TestReport};
use crate::error::{Error, Result};
use crate::paths::{sample_bessel_excursion, CadlagPath};
use crate::rng::RngState;

/// Values this far below zero are treated as rounding noise.
const NEGATIVE_SLACK: f64 = 1e-12;

/// How a linear piece that touches zero at one end is integrated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BoundaryRule {
    /// Integrate the linear interpolant; a zero endpoint makes `1/x`
    /// non-integrable and the integral infinite.
    Exact,
    /// Treat the piece as `c sqrt(distance to the zero)`, the local shape of
    /// an excursion leaving 0. The integral over the piece is then
    /// `2 d / v`, with `d` its length and `v` the nonzero end value.
    SquareRoot,
}

#[derive(Debug, Clone, Copy)]
struct Piece {
    t: f64,
    d: f64,
    u: f64,
    v: f64,
}

fn pieces(x: &CadlagPath) -> Result<Vec<Piece>> {
    let ks = x.knots();
    let mut out = Vec::with_capacity(ks.len());
    for w in ks.windows(2) {
        let (u, v) = (w[0].right, w[1].left);
        for (t, val) in [(w[0].t, u), (w[1].t, v)] {
            if val < -NEGATIVE_SLACK {
                return Err(Error::NegativePath { time: t, value: val });
            }
        }
        out.push(Piece { t: w[0].t, d: w[1].t - w[0].t, u: u.max(0.0), v: v.max(0.0) });
    }
    Ok(out)
}

fn piece_integral(p: &Piece, rule: BoundaryRule) -> f64 {
    let Piece { d, u, v, .. } = *p;
    match (u == 0.0, v == 0.0) {
        (true, true) => f64::INFINITY,
        (true, false) | (false, true) => match rule {
            BoundaryRule::Exact => f64::INFINITY,
            BoundaryRule::SquareRoot => 2.0 * d / u.max(v),
        },
        (false, false) if u == v => d / u,
        (false, false) => d * (v / u).ln() / (v - u),
    }
}

/// Integral over the first `s` time units of `p`.
fn piece_partial(p: &Piece, s: f64, rule: BoundaryRule) -> f64 {
    let Piece { d, u, v, .. } = *p;
    if s <= 0.0 {
        return 0.0;
    }
    if s >= d {
        return piece_integral(p, rule);
    }
    match (u == 0.0, v == 0.0, rule) {
        (true, _, BoundaryRule::Exact) | (true, true, _) => f64::INFINITY,
        (true, false, BoundaryRule::SquareRoot) => 2.0 * (s * d).sqrt() / v,
        (false, true, BoundaryRule::SquareRoot) => 2.0 * d.sqrt() / u * (d.sqrt() - (d - s).sqrt()),
        _ => {
            let k = (v - u) / d;
            if k == 0.0 {
                s / u
            } else {
                (k * s / u).ln_1p() / k
            }
        }
    }
}

/// Time spent inside `p` before the integral reaches `r`; `r` must not
/// exceed the integral over the piece.
fn piece_inverse(p: &Piece, r: f64, rule: BoundaryRule) -> f64 {
    let Piece { t, d, u, v } = *p;
    if u == 0.0 && v > 0.0 && rule == BoundaryRule::SquareRoot {
        return t + (r * v / 2.0).powi(2) / d;
    }
    if v == 0.0 && u > 0.0 && rule == BoundaryRule::SquareRoot {
        let s = d.sqrt() - r * u / (2.0 * d.sqrt());
        return t + d - s.max(0.0).powi(2);
    }
    let k = (v - u) / d;
    if k == 0.0 {
        t + r * u
    } else {
        (t + u * (k * r).exp_m1() / k).min(t + d)
    }
}

/// `int_{t0}^{t1} ds / x(s)`, infinite when `x` vanishes on the range.
pub fn lamperti_time(x: &CadlagPath, t0: f64, t1: f64) -> Result<f64> {
    lamperti_time_with(x, t0, t1, BoundaryRule::Exact)
}

pub fn lamperti_time_with(x: &CadlagPath, t0: f64, t1: f64, rule: BoundaryRule) -> Result<f64> {
    if t1 <= t0 {
        return Ok(0.0);
    }
    match rule {
        BoundaryRule::Exact => {
            let ps = pieces(&x.restrict(t0, t1))?;
            Ok(ps.iter().map(|p| piece_integral(p, rule)).sum())
        }
        // the square-root model belongs to the whole piece, so cutting the
        // path first would change it
        BoundaryRule::SquareRoot => {
            let clock = Clock::new(x, rule)?;
            Ok(clock.at(t1) - clock.at(t0))
        }
    }
}

/// `L^{-1}(y) = inf { t : L(t) >= y }`, or `None` when `L(end) < y`.
pub fn lamperti_inverse(x: &CadlagPath, y: f64, rule: BoundaryRule) -> Result<Option<f64>> {
    let clock = Clock::new(x, rule)?;
    Ok(clock.inverse(y))
}

struct Clock {
    pieces: Vec<Piece>,
    /// `L` at the start of each piece, plus the total.
    cum: Vec<f64>,
    rule: BoundaryRule,
}

impl Clock {
    fn new(x: &CadlagPath, rule: BoundaryRule) -> Result<Self> {
        let pieces = pieces(x)?;
        let mut cum = Vec::with_capacity(pieces.len() + 1);
        let mut acc = 0.0;
        cum.push(0.0);
        for p in &pieces {
            acc += piece_integral(p, rule);
            cum.push(acc);
        }
        Ok(Self { pieces, cum, rule })
    }

    /// `L(t)`.
    fn at(&self, t: f64) -> f64 {
        let k = self.pieces.partition_point(|p| p.t <= t).max(1) - 1;
        let p = &self.pieces[k];
        self.cum[k] + piece_partial(p, t - p.t, self.rule)
    }

    fn total(&self) -> f64 {
        *self.cum.last().unwrap()
    }

    fn inverse(&self, y: f64) -> Option<f64> {
        if y <= 0.0 {
            return Some(self.pieces[0].t);
        }
        if y > self.total() {
            return None;
        }
        // first piece whose end reaches y
        let k = self.cum.partition_point(|&c| c < y) - 1;
        Some(piece_inverse(&self.pieces[k], y - self.cum[k], self.rule))
    }
}

/// `x(L^{-1}(y))` on a grid of `y`, 0 once `y` passes `L(end)`.
///
/// At `y = 0` this is `x` at the start of the domain.
pub fn time_changed_width(x: &CadlagPath, y_grid: &[f64], rule: BoundaryRule) -> Result<Vec<f64>> {
    let clock = Clock::new(x, rule)?;
    Ok(y_grid.iter().map(|&y| clock.inverse(y).map_or(0.0, |t| x.value(t))).collect())
}

/// Lebesgue measure of `{s : lo <= x(s) < hi}`, exact on linear pieces.
pub fn time_in_band(x: &CadlagPath, lo: f64, hi: f64) -> f64 {
    let ks = x.knots();
    let mut total = 0.0;
    for w in ks.windows(2) {
        let (u, v, d) = (w[0].right, w[1].left, w[1].t - w[0].t);
        if u == v {
            if lo <= u && u < hi {
                total += d;
            }
            continue;
        }
        let (a, b) = if u < v { (u, v) } else { (v, u) };
        let overlap = (b.min(hi) - a.max(lo)).max(0.0);
        total += d * overlap / (b - a);
    }
    total
}

/// Level histogram: `density[k]` is the time spent in
/// `[start + k w, start + (k + 1) w)` divided by `w`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OccupationDensity {
    pub bin_width: f64,
    pub start: f64,
    pub density: Vec<f64>,
}

impl OccupationDensity {
    /// Density of the bin containing `level`.
    pub fn at(&self, level: f64) -> f64 {
        let k = ((level - self.start) / self.bin_width).floor();
        if k < 0.0 || k as usize >= self.density.len() {
            0.0
        } else {
            self.density[k as usize]
        }
    }

    pub fn total_time(&self) -> f64 {
        self.density.iter().sum::<f64>() * self.bin_width
    }
}

pub fn occupation_density(x: &CadlagPath, bin_width: f64) -> Result<OccupationDensity> {
    if !(bin_width > 0.0) {
        return Err(Error::InvalidArgument(format!("bin width {bin_width}")));
    }
    let lo = (x.infimum() / bin_width).floor();
    let hi = (x.supremum() / bin_width).floor();
    let bins = (hi - lo) as usize + 1;
    let start = lo * bin_width;
    let mut time = vec![0.0; bins];
    let bin_of = |y: f64| (((y - start) / bin_width).floor().max(0.0) as usize).min(bins - 1);
    for w in x.knots().windows(2) {
        let (u, v, d) = (w[0].right, w[1].left, w[1].t - w[0].t);
        if u == v {
            time[bin_of(u)] += d;
            continue;
        }
        let (a, b) = if u < v { (u, v) } else { (v, u) };
        let rate = d / (b - a);
        let (ka, kb) = (bin_of(a), bin_of(b));
        for (k, slot) in time.iter_mut().enumerate().take(kb + 1).skip(ka) {
            let edge_lo = start + k as f64 * bin_width;
            let overlap = (b.min(edge_lo + bin_width) - a.max(edge_lo)).max(0.0);
            *slot += overlap * rate;
        }
    }
    Ok(OccupationDensity { bin_width, start, density: time.into_iter().map(|t| t / bin_width).collect() })
}

/// Both sides of the Jeulin identity at one `u`, from independent
/// Brownian excursions per side.
#[derive(Debug, Clone, Serialize)]
pub struct JeulinSamples {
    pub u: f64,
    /// `l_{u/2} / 2`, the local time estimated over a band of `bin_width`
    /// centred at `u/2`.
    pub local_time: Vec<f64>,
    /// `B^exc(L^{-1}(u))` on the other excursions.
    pub time_changed: Vec<f64>,
    /// `int_0^1 ds / B^exc` on the time-changed side.
    pub lamperti_total: Vec<f64>,
    /// `2 max B^exc` on the local-time side.
    pub twice_max: Vec<f64>,
}

pub const JEULIN_BIN_WIDTH: f64 = 0.01;

pub fn jeulin_samples(m: usize, n_samples: usize, u: f64, state: RngState) -> Result<JeulinSamples> {
    let level = u / 2.0;
    let w = JEULIN_BIN_WIDTH;
    let rows: Vec<Result<(f64, f64, f64, f64)>> = (0..n_samples as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = state.child(i).rng();
            let a = sample_bessel_excursion(m, &mut rng)?;
            let b = sample_bessel_excursion(m, &mut rng)?;
            let local = 0.5 * time_in_band(&a, level - w / 2.0, level + w / 2.0) / w;
            let clock = Clock::new(&b, BoundaryRule::SquareRoot)?;
            let changed = clock.inverse(u).map_or(0.0, |t| b.value(t));
            Ok((local, changed, clock.total(), 2.0 * a.supremum()))
        })
        .collect();
    let mut out = JeulinSamples {
        u,
        local_time: Vec::with_capacity(n_samples),
        time_changed: Vec::with_capacity(n_samples),
        lamperti_total: Vec::with_capacity(n_samples),
        twice_max: Vec::with_capacity(n_samples),
    };
    for r in rows {
        let (l, c, t, mx) = r?;
        out.local_time.push(l);
        out.time_changed.push(c);
        out.lamperti_total.push(t);
        out.twice_max.push(mx);
    }
    Ok(out)
}

/// KS comparison of `l_{1/4}/2` against `B^exc(L^{-1}(1/2))`.
pub fn jeulin_check(m: usize, n_samples: usize, state: RngState) -> Result<TestReport> {
    let s = jeulin_samples(m, n_samples, 0.5, state)?;
    Ok(ks_two_sample(&s.local_time, &s.time_changed)?.named("jeulin").with_seed(state.seed))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tent() -> CadlagPath {
        CadlagPath::from_points(&[0.0, 0.5, 1.0], &[0.0, 0.5, 0.0]).unwrap()
    }

    #[test]
    fn constant_and_tent() {
        let c = CadlagPath::constant(0.25);
        assert!((lamperti_time(&c, 0.0, 1.0).unwrap() - 4.0).abs() < 1e-15);
        let l = lamperti_time(&tent(), 0.25, 0.75).unwrap();
        assert!((l - 2.0 * 2f64.ln()).abs() < 1e-12);
        assert_eq!(lamperti_time(&tent(), 0.0, 1.0).unwrap(), f64::INFINITY);
        // sqrt rule: int_0^d ds / (v sqrt(s/d)) = 2d/v on both end pieces
        let sq = lamperti_time_with(&tent(), 0.0, 1.0, BoundaryRule::SquareRoot).unwrap();
        assert!((sq - 4.0).abs() < 1e-12);
        let neg = CadlagPath::from_points(&[0.0, 1.0], &[0.1, -0.1]).unwrap();
        assert!(matches!(lamperti_time(&neg, 0.0, 1.0), Err(Error::NegativePath { .. })));
    }

    #[test]
    fn additive_over_intervals() {
        let x = CadlagPath::from_points(&[0.0, 0.3, 0.6, 1.0], &[0.2, 0.9, 0.4, 1.3]).unwrap();
        let whole = lamperti_time(&x, 0.1, 0.9).unwrap();
        let parts = lamperti_time(&x, 0.1, 0.45).unwrap() + lamperti_time(&x, 0.45, 0.9).unwrap();
        assert!((whole - parts).abs() < 1e-12);
        let bigger = x.map_values(|v| v + 0.1);
        assert!(lamperti_time(&bigger, 0.1, 0.9).unwrap() < whole);
    }

    #[test]
    fn inverse_round_trips() {
        let x = CadlagPath::from_points(&[0.0, 0.3, 0.6, 1.0], &[0.2, 0.9, 0.4, 1.3]).unwrap();
        for &t in &[0.05, 0.3, 0.41, 0.77, 0.99] {
            let l = lamperti_time(&x, 0.0, t).unwrap();
            let back = lamperti_inverse(&x, l, BoundaryRule::Exact).unwrap().unwrap();
            assert!((back - t).abs() < 1e-12, "{t} -> {l} -> {back}");
        }
        for &t in &[0.1, 0.5, 0.7, 0.95] {
            let l = lamperti_time_with(&tent(), 0.0, t, BoundaryRule::SquareRoot).unwrap();
            let back = lamperti_inverse(&tent(), l, BoundaryRule::SquareRoot).unwrap().unwrap();
            assert!((back - t).abs() < 1e-12, "{t} -> {l} -> {back}");
        }
        assert_eq!(lamperti_inverse(&x, 1e6, BoundaryRule::Exact).unwrap(), None);
    }

    #[test]
    fn constant_time_change() {
        let c = CadlagPath::constant(0.5);
        let w = time_changed_width(&c, &[0.0, 1.0, 1.99, 2.5], BoundaryRule::Exact).unwrap();
        assert_eq!(w, vec![0.5, 0.5, 0.5, 0.0]);
    }

    #[test]
    fn tent_occupation() {
        let occ = occupation_density(&tent(), 0.01).unwrap();
        for k in 0..50 {
            assert!((occ.density[k] - 2.0).abs() < 1e-9, "bin {k}: {}", occ.density[k]);
        }
        assert!((occ.total_time() - 1.0).abs() < 1e-12);
        let c = occupation_density(&CadlagPath::constant(0.123), 0.01).unwrap();
        assert_eq!(c.density.len(), 1);
        assert!((c.at(0.123) - 100.0).abs() < 1e-9);
        assert!((time_in_band(&tent(), 0.1, 0.2) - 0.2).abs() < 1e-12);
    }
}
