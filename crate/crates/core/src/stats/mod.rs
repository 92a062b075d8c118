//! Goodness-of-fit tests, the Lamperti time change, occupation densities,
//! and the Jeulin identity check.

mod lamperti;

use std::io::{self, Write};

use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};

pub use lamperti::{
    jeulin_check, jeulin_samples, lamperti_inverse, lamperti_time, lamperti_time_with, occupation_density,
    time_changed_width, time_in_band, BoundaryRule, JeulinSamples, OccupationDensity,
};

pub const ALPHA: f64 = 0.01;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TestReport {
    pub suite: String,
    pub statistic: f64,
    pub p_value: f64,
    pub pass: bool,
    pub n_samples: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl TestReport {
    pub fn new(suite: impl Into<String>, statistic: f64, p_value: f64, n_samples: usize) -> Self {
        let p_value = p_value.clamp(0.0, 1.0);
        Self { suite: suite.into(), statistic, p_value, pass: p_value > ALPHA, n_samples, seed: None }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn named(mut self, suite: impl Into<String>) -> Self {
        self.suite = suite.into();
        self
    }

    pub fn write_json_line<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "{}", serde_json::to_string(self).expect("reports serialize"))
    }
}

/// `P(K > lambda)` for the Kolmogorov distribution.
pub fn kolmogorov_tail(lambda: f64) -> f64 {
    if lambda < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    for j in 1..=100 {
        let j = j as f64;
        let term = (-2.0 * j * j * lambda * lambda).exp();
        sum += if j as i64 % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Two-sample Kolmogorov-Smirnov test with the asymptotic p-value at
/// `sqrt(n m / (n + m)) D`.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<TestReport> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySample);
    }
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (n, m) = (a.len(), b.len());
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < n && j < m {
        let x = a[i].min(b[j]);
        while i < n && a[i] <= x {
            i += 1;
        }
        while j < m && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / n as f64 - j as f64 / m as f64).abs());
    }
    let ne = (n * m) as f64 / (n + m) as f64;
    Ok(TestReport::new("ks", d, kolmogorov_tail(ne.sqrt() * d), n + m))
}

/// Pearson chi-square goodness of fit with `categories - 1` degrees of
/// freedom. Every expected count must be at least 5.
pub fn chi_square_gof(counts: &[u64], expected_probs: &[f64]) -> Result<TestReport> {
    if counts.len() != expected_probs.len() {
        return Err(Error::InvalidArgument(format!(
            "{} counts for {} probabilities",
            counts.len(),
            expected_probs.len()
        )));
    }
    let total: u64 = counts.iter().sum();
    if total == 0 {
        return Err(Error::EmptySample);
    }
    let mass: f64 = expected_probs.iter().sum();
    if (mass - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidArgument(format!("expected probabilities sum to {mass}")));
    }
    let mut stat = 0.0;
    for (k, (&c, &p)) in counts.iter().zip(expected_probs).enumerate() {
        let e = p * total as f64;
        if e < 5.0 {
            return Err(Error::LowExpectedCount { category: k, expected: e });
        }
        stat += (c as f64 - e).powi(2) / e;
    }
    let dof = (counts.len() - 1) as f64;
    let p = if dof == 0.0 { 1.0 } else { 1.0 - ChiSquared::new(dof).expect("positive dof").cdf(stat) };
    Ok(TestReport::new("chi-square", stat, p, total as usize))
}

pub fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

/// Sample mean and its standard error.
pub fn mean_and_se(x: &[f64]) -> (f64, f64) {
    let m = mean(x);
    let var = x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (x.len() as f64 - 1.0);
    (m, (var / x.len() as f64).sqrt())
}

pub fn median(x: &[f64]) -> f64 {
    let mut v = x.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}
