//! The reflected excursion `Y = X - sum_i R_i`.
//!
//! Each upward jump of `X` at `t_i` opens an interval `[t_i, T_i]` that ends
//! when `X` first returns to its pre-jump level. On that interval `R_i` is
//! the running infimum of `X` measured from the pre-jump level, so that
//! subtracting it removes the jump and what the jump "lifted".

use serde::Serialize;

use crate::error::{Error, Result};
use crate::paths::{
    build_ei_bridge, cyclic_shift, first_passage_below, forward_infimum, running_infimum, vervaat_transform,
    CadlagPath, Knot, Theta,
};

/// Tolerance on the sign of an excursion path.
pub const EXCURSION_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JumpInterval {
    /// Position of the jump among all jumps, in time order.
    pub index: usize,
    pub t: f64,
    #[serde(rename = "T")]
    pub end: f64,
    pub theta: f64,
}

impl JumpInterval {
    pub fn contains(&self, other: &JumpInterval) -> bool {
        self.t <= other.t && other.end <= self.end
    }

    pub fn disjoint(&self, other: &JumpInterval) -> bool {
        self.end <= other.t || other.end <= self.t
    }
}

pub fn check_excursion(x: &CadlagPath) -> Result<()> {
    for k in x.knots() {
        let low = k.left.min(k.right);
        if low < -EXCURSION_TOLERANCE {
            return Err(Error::NotExcursion { reason: format!("value {low} at time {}", k.t) });
        }
        if k.right < k.left {
            return Err(Error::NotExcursion { reason: format!("negative jump at time {}", k.t) });
        }
    }
    let ends = x.value(x.start()).abs().max(x.value(x.end()).abs());
    if ends > EXCURSION_TOLERANCE {
        return Err(Error::NotExcursion { reason: "nonzero endpoint".into() });
    }
    Ok(())
}

pub fn jump_intervals(x: &CadlagPath) -> Result<Vec<JumpInterval>> {
    check_excursion(x)?;
    jump_intervals_unchecked(x, false)
}

/// With `relaxed`, a jump whose level is never revisited gets `T = end`
/// instead of an error.
fn jump_intervals_unchecked(x: &CadlagPath, relaxed: bool) -> Result<Vec<JumpInterval>> {
    let mut out = Vec::new();
    for k in x.knots() {
        if k.right > k.left {
            let end = match first_passage_below(x, k.t, k.left) {
                Some(s) => s,
                None if relaxed => x.end(),
                None => {
                    return Err(Error::NotExcursion {
                        reason: format!("no return to level {} after the jump at {}", k.left, k.t),
                    })
                }
            };
            out.push(JumpInterval { index: out.len(), t: k.t, end, theta: k.jump() });
        }
    }
    Ok(out)
}

/// `R_i(u) = inf_{t_i <= s <= u} x(s) - x(t_i-)` on `[t_i, T_i]`, zero elsewhere.
pub fn reflect_component(x: &CadlagPath, iv: &JumpInterval) -> CadlagPath {
    let level = x.left_limit(iv.t);
    let inf = forward_infimum(x, iv.t, iv.end);
    let (start, end) = (x.start(), x.end());
    let mut knots = Vec::with_capacity(inf.len() + 2);
    if iv.t > start {
        knots.push(Knot::continuous(start, 0.0));
    }
    let ik = inf.knots();
    for (j, k) in ik.iter().enumerate() {
        let left = if j == 0 { 0.0 } else { k.left - level };
        let mut right = k.right - level;
        if j == ik.len() - 1 && iv.end < end {
            right = 0.0;
        }
        knots.push(Knot::new(k.t, left, right));
    }
    if iv.end < end {
        knots.push(Knot::continuous(end, 0.0));
    }
    CadlagPath::from_knots_unchecked(knots)
}

pub fn build_y(x: &CadlagPath) -> Result<CadlagPath> {
    let intervals = jump_intervals(x)?;
    Ok(subtract_components(x, &intervals))
}

fn subtract_components(x: &CadlagPath, intervals: &[JumpInterval]) -> CadlagPath {
    let mut y = x.clone();
    for iv in intervals {
        y = y.sub(&reflect_component(x, iv));
    }
    y
}

/// Lebesgue measure of `{ inf_{u <= r <= s} x(r) : 0 <= u <= s }`.
///
/// The map `u -> inf_{[u, s]} x` is nondecreasing and piecewise linear; its
/// range has measure equal to the total increase along linear pieces, the
/// jumps being gaps.
pub fn y_via_lebesgue(x: &CadlagPath, s: f64) -> f64 {
    if s <= x.start() {
        return 0.0;
    }
    let g = running_infimum(x, x.start(), s);
    g.knots().windows(2).map(|w| (w[1].left - w[0].right).max(0.0)).sum()
}

/// Coupled pair `(Y'_n, Y)` from one bridge and one set of jump times.
///
/// `Y` is the reflected excursion of the full bridge. `Y'_n` keeps only the
/// first `n` atoms, but the truncated bridge is shifted at the argmin of the
/// full bridge, so jump times line up between the two. The truncated shifted
/// path need not be an excursion; a jump whose level is never revisited is
/// reflected until time 1.
pub fn truncated_y(
    theta: &Theta,
    n: usize,
    bridge: &CadlagPath,
    jump_times: &[f64],
) -> Result<(CadlagPath, CadlagPath)> {
    if n > theta.len() {
        return Err(Error::InvalidArgument(format!("truncation {n} exceeds {} atoms", theta.len())));
    }
    let full = build_ei_bridge(theta, bridge, jump_times)?;
    let (x, t_min) = vervaat_transform(&full);
    let y = build_y(&x)?;
    if n == theta.len() {
        return Ok((y.clone(), y));
    }
    let truncated = build_ei_bridge(&theta.truncate(n), bridge, &jump_times[..n])?;
    let xn = cyclic_shift(&truncated, t_min);
    let intervals = jump_intervals_unchecked(&xn, true)?;
    Ok((subtract_components(&xn, &intervals), y))
}
