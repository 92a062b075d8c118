//! Repeat times of i.i.d. draws, the particular approximating sequence, and
//! diagnostics for how close a p-sequence is to its limit.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use serde::Serialize;

use super::PSeq;
use crate::paths::Theta;

/// Draws i.i.d. from `p` until the first repeat.
#[derive(Debug, Clone)]
pub struct RepeatTimeSampler<'a> {
    p: &'a PSeq,
    dist: WeightedIndex<f64>,
}

impl<'a> RepeatTimeSampler<'a> {
    pub fn new(p: &'a PSeq) -> Self {
        let dist = WeightedIndex::new(p.probs()).expect("p-sequence masses are positive");
        Self { p, dist }
    }

    /// `(T, sum_{i < T} p̄(xi_i))` with `T` the index of the first repeat.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> (usize, f64) {
        let mut seen = vec![false; self.p.len()];
        let mut sum = 0.0;
        let mut t = 0;
        loop {
            let xi = self.dist.sample(rng);
            t += 1;
            if seen[xi] {
                return (t, sum);
            }
            seen[xi] = true;
            sum += self.p.truncated(xi);
        }
    }
}

pub fn repeat_time_sample<R: Rng + ?Sized>(p: &PSeq, rng: &mut R) -> (usize, f64) {
    RepeatTimeSampler::new(p).sample(rng)
}

/// `E[T] = sum_{k >= 0} P(T > k)` where `P(T > k)` is the chance that the
/// first `k` draws are distinct, `k! e_k(p)`.
///
/// The elementary symmetric sums are built one mass at a time, so the cost
/// is quadratic in `n`.
pub fn expected_repeat_time(p: &PSeq) -> f64 {
    let n = p.len();
    // q[k] = k! e_k over the masses seen so far
    let mut q = vec![0.0; n + 1];
    q[0] = 1.0;
    for (m, &pi) in p.probs().iter().enumerate() {
        for k in (1..=m + 1).rev() {
            q[k] += k as f64 * pi * q[k - 1];
        }
    }
    q.iter().sum()
}

/// `z = sqrt(n)/theta0`, `s = n + z sum theta_i`; the atoms get `z theta_i/s`
/// and `n` further vertices get `1/s` each.
///
/// The atoms are the designated large vertices. For small `n` an atom can be
/// lighter than `1/s`; the masses are then re-ranked and the large
/// designation follows the largest masses.
pub fn make_particular_pseq(theta: &Theta, n: usize) -> PSeq {
    let atoms = theta.atoms();
    let z = (n as f64).sqrt() / theta.theta0();
    let s = n as f64 + z * theta.atom_sum();
    let mut probs: Vec<f64> = atoms.iter().map(|t| z * t / s).collect();
    probs.extend(std::iter::repeat_n(1.0 / s, n));
    let large = atoms.len();
    PSeq::from_unranked(probs, large).expect("particular sequence is a probability vector")
}

#[derive(Debug, Clone, Serialize)]
pub struct HypothesisReport {
    pub sigma: f64,
    pub p_star: f64,
    /// `p_i / sigma` for the large atoms.
    pub scaled_large: Vec<f64>,
    /// `(lambda, E[exp(lambda p̄(xi)/sigma^2)])` with `xi ~ p`.
    pub mgf: Vec<(f64, f64)>,
    /// `E[p̄(xi)/sigma^2]`.
    pub mean_q: f64,
}

pub const DEFAULT_LAMBDAS: [f64; 5] = [-1.0, -0.5, 0.5, 1.0, 2.0];

/// Exact expectations over `xi ~ p`; no sampling involved.
pub fn hypothesis_diagnostics(p: &PSeq, lambdas: &[f64]) -> HypothesisReport {
    let s2 = p.sigma() * p.sigma();
    let q: Vec<f64> = (0..p.len()).map(|i| p.truncated(i) / s2).collect();
    let mgf =
        lambdas.iter().map(|&l| (l, p.probs().iter().zip(&q).map(|(pi, qi)| pi * (l * qi).exp()).sum())).collect();
    HypothesisReport {
        sigma: p.sigma(),
        p_star: p.p_star(),
        scaled_large: p.probs()[..p.large()].iter().map(|x| x / p.sigma()).collect(),
        mgf,
        mean_q: p.probs().iter().zip(&q).map(|(pi, qi)| pi * qi).sum(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::paths::validate_theta;
    use crate::rng::RngState;

    fn figure_theta() -> Theta {
        validate_theta(0.862, &[0.345, 0.302, 0.216]).unwrap()
    }

    #[test]
    fn single_mass_repeats_immediately() {
        let p = PSeq::new(vec![1.0], 0).unwrap();
        let mut rng = RngState::new(3, 0).rng();
        for _ in 0..5 {
            assert_eq!(repeat_time_sample(&p, &mut rng), (2, 1.0));
        }
        assert!((expected_repeat_time(&p) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn uniform_mean_matches_tail_product() {
        for n in [1usize, 2, 5, 50, 365] {
            let mut tail = 1.0;
            let mut want = 0.0;
            for k in 0..=n {
                want += tail;
                tail *= 1.0 - k as f64 / n as f64;
            }
            let got = expected_repeat_time(&PSeq::uniform(n));
            assert!((got - want).abs() < 1e-9 * want, "n = {n}: {got} vs {want}");
        }
    }

    #[test]
    fn empirical_mean_repeat_time() {
        let p = PSeq::new(vec![0.4, 0.3, 0.2, 0.1], 0).unwrap();
        let mut rng = RngState::new(11, 0).rng();
        let s = RepeatTimeSampler::new(&p);
        let reps = 200_000;
        let mean = (0..reps).map(|_| s.sample(&mut rng).0 as f64).sum::<f64>() / reps as f64;
        assert!((mean - expected_repeat_time(&p)).abs() < 0.01);
    }

    #[test]
    fn particular_sequence() {
        let p = make_particular_pseq(&Theta::brownian(), 100);
        assert!(p.probs().iter().all(|&x| (x - 0.01).abs() < 1e-15));
        let th = figure_theta();
        let p = make_particular_pseq(&th, 10_000);
        assert_eq!(p.len(), 10_000 + th.len());
        assert_eq!(p.large(), th.len());
        let d = hypothesis_diagnostics(&p, &DEFAULT_LAMBDAS);
        assert!((d.mean_q - 0.862f64.powi(2)).abs() < 0.05);
        let p = make_particular_pseq(&th, 1_000_000);
        assert!((p[0] / p.sigma() - 0.345).abs() < 0.01);
        // small n: some atoms are lighter than the unit masses
        let p = make_particular_pseq(&th, 4);
        assert_eq!(p.len(), 4 + th.len());
    }

    #[test]
    fn uniform_diagnostics() {
        let d = hypothesis_diagnostics(&PSeq::uniform(64), &[1.0]);
        assert!((d.mean_q - 1.0).abs() < 1e-12);
        assert!((d.mgf[0].1 - 1f64.exp()).abs() < 1e-12);
        assert!(d.p_star > 0.0);
    }
}
