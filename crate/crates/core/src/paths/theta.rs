use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default slack on `theta0^2 + sum theta_i^2 = 1`.
///
/// Parameter vectors are usually quoted to three decimals, which already
/// puts the sum of squares about 1e-4 away from one.
pub const NORM_TOLERANCE: f64 = 1e-4;

/// ICRT parameter: Brownian weight `theta0` and ranked atoms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Theta {
    theta0: f64,
    atoms: Vec<f64>,
    #[serde(skip)]
    resorted: bool,
}

impl Theta {
    pub fn new(theta0: f64, atoms: &[f64]) -> Result<Self> {
        validate_theta(theta0, atoms)
    }

    /// The Brownian case `(1)`.
    pub fn brownian() -> Self {
        Self { theta0: 1.0, atoms: Vec::new(), resorted: false }
    }

    pub fn theta0(&self) -> f64 {
        self.theta0
    }

    pub fn atoms(&self) -> &[f64] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn atom_sum(&self) -> f64 {
        self.atoms.iter().sum()
    }

    /// True when the atoms had to be sorted on construction.
    pub fn was_resorted(&self) -> bool {
        self.resorted
    }

    /// Keeps the first `n` atoms, leaving `theta0` untouched.
    pub fn truncate(&self, n: usize) -> Self {
        Self { theta0: self.theta0, atoms: self.atoms[..n.min(self.atoms.len())].to_vec(), resorted: false }
    }
}

pub fn validate_theta(theta0: f64, atoms: &[f64]) -> Result<Theta> {
    validate_theta_with(theta0, atoms, NORM_TOLERANCE)
}

pub fn validate_theta_with(theta0: f64, atoms: &[f64], tolerance: f64) -> Result<Theta> {
    if !(theta0 >= 0.0) {
        return Err(Error::Sign { index: 0, value: theta0 });
    }
    for (i, &a) in atoms.iter().enumerate() {
        if !(a >= 0.0) {
            return Err(Error::Sign { index: i + 1, value: a });
        }
    }
    if !atoms.is_empty() && theta0 == 0.0 {
        return Err(Error::ZeroTheta0);
    }
    let sum_sq = theta0 * theta0 + atoms.iter().map(|a| a * a).sum::<f64>();
    if (sum_sq - 1.0).abs() > tolerance {
        return Err(Error::Norm { sum_sq, tolerance });
    }
    let mut sorted = atoms.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let resorted = sorted.as_slice() != atoms;
    Ok(Theta { theta0, atoms: sorted, resorted })
}
