//! Brownian bridge, exchangeable-increment bridges and the Vervaat transform.

use rand::Rng;
use rand_distr::StandardNormal;

use super::cadlag::{CadlagPath, Knot};
use super::theta::Theta;
use crate::error::{Error, Result};

/// Default number of grid cells for the Brownian part.
pub const DEFAULT_GRID: usize = 1 << 14;

/// Standard Brownian bridge on the uniform grid `k / m`, `k = 0..=m`,
/// built as `W_k - (k/m) W_m` from a Gaussian random walk.
pub fn sample_brownian_bridge<R: Rng + ?Sized>(m: usize, rng: &mut R) -> Result<CadlagPath> {
    if m < 2 {
        return Err(Error::InvalidArgument(format!("grid size must be at least 2, got {m}")));
    }
    let sd = (1.0 / m as f64).sqrt();
    let mut walk = Vec::with_capacity(m + 1);
    let mut w = 0.0;
    walk.push(0.0);
    for _ in 0..m {
        let z: f64 = rng.sample(StandardNormal);
        w += sd * z;
        walk.push(w);
    }
    let end = w;
    let knots = walk
        .iter()
        .enumerate()
        .map(|(k, &wk)| {
            let t = k as f64 / m as f64;
            let v = if k == 0 || k == m { 0.0 } else { wk - t * end };
            Knot::continuous(t, v)
        })
        .collect();
    Ok(CadlagPath::from_knots_unchecked(knots))
}

/// Inserts, inside every cell of a continuous unit-variance path, a knot at
/// the minimum of the Brownian bridge between the cell's end values.
///
/// The minimum is sampled exactly from its conditional law
/// `m = (a + b - sqrt((b - a)^2 - 2 h ln V)) / 2`; it is placed so the
/// descent and climb times split as `(a - m)^2 : (b - m)^2`. Without it,
/// running infima taken on the grid sit `O(sqrt(h))` above the infima of the
/// underlying Brownian path.
pub fn insert_cell_minima<R: Rng + ?Sized>(path: &CadlagPath, rng: &mut R) -> CadlagPath {
    let ks = path.knots();
    let mut out = Vec::with_capacity(2 * ks.len());
    out.push(ks[0]);
    for w in ks.windows(2) {
        let (a, b) = (w[0].right, w[1].left);
        let h = w[1].t - w[0].t;
        let v: f64 = 1.0 - rng.random::<f64>();
        let m = 0.5 * (a + b - ((b - a).powi(2) - 2.0 * h * v.ln()).sqrt());
        let (da, db) = ((a - m).powi(2), (b - m).powi(2));
        // kept off the cell ends so shifted times stay strictly ordered
        let frac = if da + db > 0.0 { (da / (da + db)).clamp(1e-3, 1.0 - 1e-3) } else { 0.5 };
        let t = w[0].t + h * frac;
        if m < a.min(b) && t > w[0].t && t < w[1].t {
            out.push(Knot::continuous(t, m));
        }
        out.push(w[1]);
    }
    CadlagPath::from_knots_unchecked(out)
}

/// `I` uniform jump times avoiding the breakpoints of `bridge` and each other.
pub fn sample_jump_times<R: Rng + ?Sized>(count: usize, bridge: &CadlagPath, rng: &mut R) -> Vec<f64> {
    let mut times: Vec<f64> = Vec::with_capacity(count);
    while times.len() < count {
        let u: f64 = rng.random();
        if u > 0.0 && !times.contains(&u) && !hits_breakpoint(bridge, u) {
            times.push(u);
        }
    }
    times
}

fn hits_breakpoint(path: &CadlagPath, t: f64) -> bool {
    path.knots().binary_search_by(|k| k.t.total_cmp(&t)).is_ok()
}

/// `theta0 * bridge(t) + sum_i theta_i (1{U_i <= t} - t)` with exact jumps at
/// the `U_i`. `jump_times[i]` carries the atom `theta.atoms()[i]`. The bridge
/// value at a jump time is read off by linear interpolation.
pub fn build_ei_bridge(theta: &Theta, bridge: &CadlagPath, jump_times: &[f64]) -> Result<CadlagPath> {
    let order = check_jump_times(theta, jump_times)?;
    if let Some(&u) = jump_times.iter().find(|&&u| hits_breakpoint(bridge, u)) {
        return Err(Error::JumpCollision { time: u });
    }
    let mut knots = Vec::with_capacity(bridge.len() + order.len());
    let mut j = 0;
    for k in bridge.knots() {
        while j < order.len() && jump_times[order[j]] < k.t {
            let u = jump_times[order[j]];
            knots.push(Knot::continuous(u, bridge.value(u)));
            j += 1;
        }
        knots.push(*k);
    }
    Ok(assemble(theta, &knots, jump_times, &order))
}

/// Like [`build_ei_bridge`], but the Brownian part is refined before the
/// jumps are added: its value at each jump time is sampled exactly from the
/// conditional bridge law given the neighbouring knots, and every resulting
/// cell then gets its conditional minimum ([`insert_cell_minima`]).
///
/// With plain interpolation the level `X(U_i-)` that each jump is measured
/// against misses the `O(sqrt(h))` fluctuation of the path inside its cell.
pub fn build_ei_bridge_refined<R: Rng + ?Sized>(
    theta: &Theta,
    bridge: &CadlagPath,
    jump_times: &[f64],
    rng: &mut R,
) -> Result<CadlagPath> {
    let order = check_jump_times(theta, jump_times)?;
    if let Some(&u) = jump_times.iter().find(|&&u| hits_breakpoint(bridge, u)) {
        return Err(Error::JumpCollision { time: u });
    }
    let mut knots = Vec::with_capacity(bridge.len() + order.len());
    let mut j = 0;
    for k in bridge.knots() {
        while j < order.len() && jump_times[order[j]] < k.t {
            let u = jump_times[order[j]];
            let prev: Knot = *knots.last().expect("jump times are inside (0, 1)");
            let (s, h) = (u - prev.t, k.t - prev.t);
            let mean = prev.right + s / h * (k.left - prev.right);
            let z: f64 = rng.sample(StandardNormal);
            knots.push(Knot::continuous(u, mean + (s * (h - s) / h).sqrt() * z));
            j += 1;
        }
        knots.push(*k);
    }
    let refined = insert_cell_minima(&CadlagPath::from_knots_unchecked(knots), rng);
    Ok(assemble(theta, refined.knots(), jump_times, &order))
}

/// Validates jump times and returns their sorting permutation.
fn check_jump_times(theta: &Theta, jump_times: &[f64]) -> Result<Vec<usize>> {
    let atoms = theta.atoms();
    if jump_times.len() != atoms.len() {
        return Err(Error::InvalidArgument(format!("{} jump times given for {} atoms", jump_times.len(), atoms.len())));
    }
    let mut order: Vec<usize> = (0..atoms.len()).collect();
    order.sort_by(|&a, &b| jump_times[a].total_cmp(&jump_times[b]));
    for w in order.windows(2) {
        if jump_times[w[0]] == jump_times[w[1]] {
            return Err(Error::JumpCollision { time: jump_times[w[0]] });
        }
    }
    if let Some(&u) = jump_times.iter().find(|&&u| !(u > 0.0 && u < 1.0)) {
        return Err(Error::JumpCollision { time: u });
    }
    Ok(order)
}

/// Scales the Brownian knots by `theta0`, adds the drift and turns the knots
/// sitting at jump times (in `order`) into jumps.
fn assemble(theta: &Theta, bk: &[Knot], jump_times: &[f64], order: &[usize]) -> CadlagPath {
    let atoms = theta.atoms();
    let theta0 = theta.theta0();
    let drift: f64 = theta.atom_sum();
    let mut knots = Vec::with_capacity(bk.len());
    let mut cum = 0.0;
    let mut j = 0;
    for k in bk {
        let base = cum - drift * k.t;
        let left = theta0 * k.left + base;
        if j < order.len() && jump_times[order[j]] == k.t {
            cum += atoms[order[j]];
            knots.push(Knot::new(k.t, left, left + atoms[order[j]]));
            j += 1;
        } else {
            knots.push(Knot::new(k.t, left, theta0 * k.right + base));
        }
    }
    let n = knots.len();
    knots[0] = Knot::continuous(knots[0].t, 0.0);
    knots[n - 1] = Knot::continuous(knots[n - 1].t, 0.0);
    CadlagPath::from_knots_unchecked(knots)
}

/// Cyclic shift to the earliest minimum of the left-limit values, re-based so
/// that the left limit at the minimum becomes 0. Returns the shifted path
/// and the minimizing time.
pub fn vervaat_transform(x: &CadlagPath) -> (CadlagPath, f64) {
    let ks = x.knots();
    let mut best = 0;
    for (i, k) in ks.iter().enumerate() {
        if k.left < ks[best].left {
            best = i;
        }
    }
    if best == ks.len() - 1 {
        best = 0;
    }
    let t_min = ks[best].t;
    (cyclic_shift(x, t_min), t_min)
}

/// `s -> x(s + t) - x(t-)` with addition modulo the domain length.
///
/// Assumes `x` takes the same value at both ends of its domain.
pub fn cyclic_shift(x: &CadlagPath, t: f64) -> CadlagPath {
    let (start, end) = (x.start(), x.end());
    let ks = x.knots();
    if t <= start || t >= end {
        let base = ks[0].left;
        return x.map_values(|v| v - base);
    }
    let base = x.left_limit(t);
    let period = end - start;
    let mut out = Vec::with_capacity(ks.len() + 1);
    out.push(Knot::new(start, 0.0, x.value(t) - base));
    let after = ks.partition_point(|k| k.t <= t);
    for k in &ks[after..ks.len() - 1] {
        out.push(Knot::new(k.t - t + start, k.left - base, k.right - base));
    }
    // the end of the original path is glued to its start
    let last = ks[ks.len() - 1];
    out.push(Knot::new(end - t + start, last.left - base, ks[0].right - base));
    let before = ks.partition_point(|k| k.t < t);
    for k in &ks[1..before] {
        out.push(Knot::new(k.t + period - t, k.left - base, k.right - base));
    }
    out.push(Knot::new(end, 0.0, 0.0));
    CadlagPath::from_knots_unchecked(out)
}

/// An excursion `X^theta` with the data that produced it.
#[derive(Debug, Clone)]
pub struct Excursion {
    pub path: CadlagPath,
    /// Argmin of the underlying bridge.
    pub shift: f64,
    /// Jump times after the shift; `jump_times[i]` carries atom `i`.
    pub jump_times: Vec<f64>,
}

/// Standard Brownian excursion on the grid `k / m` as the Euclidean norm of
/// three independent Brownian bridges. Grid values have the exact excursion
/// marginals, unlike the Vervaat transform of a discretized bridge, whose
/// first step away from zero has positive density at 0.
pub fn sample_bessel_excursion<R: Rng + ?Sized>(m: usize, rng: &mut R) -> Result<CadlagPath> {
    let b = [sample_brownian_bridge(m, rng)?, sample_brownian_bridge(m, rng)?, sample_brownian_bridge(m, rng)?];
    let knots = (0..=m)
        .map(|k| {
            let r = b.iter().map(|p| p.knots()[k].right.powi(2)).sum::<f64>().sqrt();
            Knot::continuous(b[0].knots()[k].t, r)
        })
        .collect();
    Ok(CadlagPath::from_knots_unchecked(knots))
}

/// Vervaat transform of an exchangeable-increment bridge whose Brownian part
/// is sampled on `m` cells and refined as in [`build_ei_bridge_refined`].
///
/// On the discretized path the minimum can land on a jump time; the jump
/// times are then redrawn, which keeps the minimum at a continuity point.
pub fn sample_excursion<R: Rng + ?Sized>(theta: &Theta, m: usize, rng: &mut R) -> Result<Excursion> {
    excursion_from_bridge(theta, &sample_brownian_bridge(m, rng)?, rng)
}

pub fn excursion_from_bridge<R: Rng + ?Sized>(theta: &Theta, bridge: &CadlagPath, rng: &mut R) -> Result<Excursion> {
    loop {
        let times = sample_jump_times(theta.len(), bridge, rng);
        let x = build_ei_bridge_refined(theta, bridge, &times, rng)?;
        let (path, shift) = vervaat_transform(&x);
        if times.contains(&shift) {
            continue;
        }
        // same arithmetic as the shift inside the transform
        let jump_times = times.iter().map(|&u| if u >= shift { u - shift } else { u + 1.0 - shift }).collect();
        return Ok(Excursion { path, shift, jump_times });
    }
}
