//! Seeded synthetic data. All generators draw from a ChaCha stream so a
//! seed fixes the output on every platform.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, LogNormal};

use crate::features::{ActivityLevel, FactorLevels};
use crate::glm::{inverse_logit, DesignMatrix};
use crate::{Error, Result};

pub type SynthRng = ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> SynthRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Factor levels drawn independently and uniformly.
pub fn random_levels(n: usize, rng: &mut impl Rng) -> Vec<FactorLevels> {
    let mut level = || ActivityLevel::ALL[rng.random_range(0..4)];
    (0..n)
        .map(|_| FactorLevels { views: level(), edits: level(), references: level(), reverts: level() })
        .collect()
}

/// Bernoulli outcomes with success probability logit⁻¹(Xβ).
pub fn simulate_outcomes(design: &DesignMatrix, beta: &[f64], rng: &mut impl Rng) -> Result<Vec<bool>> {
    if beta.len() != design.columns.len() {
        return Err(Error::invalid(format!("{} coefficients for {} columns", beta.len(), design.columns.len())));
    }
    Ok((0..design.nrows())
        .map(|i| {
            let eta: f64 = design.x.row(i).iter().zip(beta).map(|(x, b)| x * b).sum();
            rng.random_bool(inverse_logit(eta))
        })
        .collect())
}

/// Heavy-tailed non-negative integer counts, as page activity tends to be.
pub fn lognormal_counts(n: usize, mu: f64, sigma: f64, rng: &mut impl Rng) -> Result<Vec<u64>> {
    let dist = LogNormal::new(mu, sigma).map_err(|e| Error::invalid(format!("lognormal({mu}, {sigma}): {e}")))?;
    Ok((0..n).map(|_| dist.sample(rng).floor() as u64).collect())
}
