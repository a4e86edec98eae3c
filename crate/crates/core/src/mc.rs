//! Monte Carlo oracle for the closed forms in [`crate::prob`].
//!
//! Sample `i` draws `X_k1 = beta1 * U(2i)` and `X_k2 = beta2 * U(2i + 1)` from
//! the counter generator keyed by the seed. Streams own contiguous index
//! blocks, so results do not depend on `n_streams`.

use rayon::prelude::*;

use crate::error::{domain, Error, Result};
use crate::prob::BetaPair;
use crate::rng::CounterRng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct McConfig {
    pub n_samples: u64,
    pub seed: u64,
    pub n_streams: usize,
}

impl McConfig {
    pub fn new(n_samples: u64, seed: u64) -> Self {
        Self {
            n_samples,
            seed,
            n_streams: 1,
        }
    }

    pub fn with_streams(mut self, n_streams: usize) -> Self {
        self.n_streams = n_streams;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.n_samples == 0 {
            return Err(domain("n_samples must be >= 1"));
        }
        if self.n_streams == 0 {
            return Err(domain("n_streams must be >= 1"));
        }
        Ok(())
    }

    /// Half-open index ranges, one per stream.
    fn blocks(&self) -> Vec<(u64, u64)> {
        let s = self.n_streams as u64;
        let (q, r) = (self.n_samples / s, self.n_samples % s);
        let mut start = 0;
        (0..s)
            .map(|j| {
                let len = q + u64::from(j < r);
                let block = (start, start + len);
                start += len;
                block
            })
            .collect()
    }
}

/// Binomial proportion estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub p_hat: f64,
    /// `sqrt(p_hat (1 - p_hat) / n)`
    pub std_err: f64,
    pub n: u64,
}

impl McEstimate {
    pub fn from_count(successes: u64, n: u64) -> Self {
        let p_hat = successes as f64 / n as f64;
        Self {
            p_hat,
            std_err: (p_hat * (1.0 - p_hat) / n as f64).sqrt(),
            n,
        }
    }
}

fn check_beta(beta: &BetaPair) -> Result<()> {
    if !(beta.beta1 > 0.0 && beta.beta2 > 0.0) {
        return Err(Error::Degenerate(format!(
            "beta1={}, beta2={}: both bounds must be positive",
            beta.beta1, beta.beta2
        )));
    }
    Ok(())
}

#[inline]
fn draw(rng: &CounterRng, beta: &BetaPair, i: u64) -> (f64, f64) {
    (
        beta.beta1 * rng.unit_at(2 * i),
        beta.beta2 * rng.unit_at(2 * i + 1),
    )
}

/// Estimates `P{X_k1 <= X_k2}`; ties count as successes.
pub fn mc_head_probability(beta: &BetaPair, cfg: &McConfig) -> Result<McEstimate> {
    check_beta(beta)?;
    cfg.validate()?;
    let rng = CounterRng::new(cfg.seed);
    let successes: u64 = cfg
        .blocks()
        .into_par_iter()
        .map(|(lo, hi)| {
            (lo..hi)
                .filter(|&i| {
                    let (x1, x2) = draw(&rng, beta, i);
                    x1 <= x2
                })
                .count() as u64
        })
        .sum();
    Ok(McEstimate::from_count(successes, cfg.n_samples))
}

/// Histogram of `Z = X_k1 - X_k2` over `[-beta2, beta1]`, normalized to unit
/// area. Returns `(bin_center, frequency_density)`.
pub fn mc_density_histogram(
    beta: &BetaPair,
    cfg: &McConfig,
    n_bins: usize,
) -> Result<Vec<(f64, f64)>> {
    check_beta(beta)?;
    cfg.validate()?;
    if n_bins == 0 {
        return Err(domain("n_bins must be >= 1"));
    }
    let rng = CounterRng::new(cfg.seed);
    let lo = -beta.beta2;
    let width = (beta.beta1 + beta.beta2) / n_bins as f64;
    let counts = cfg
        .blocks()
        .into_par_iter()
        .map(|(a, b)| {
            let mut local = vec![0u64; n_bins];
            for i in a..b {
                let (x1, x2) = draw(&rng, beta, i);
                let bin = (((x1 - x2) - lo) / width) as usize;
                local[bin.min(n_bins - 1)] += 1;
            }
            local
        })
        .reduce(
            || vec![0u64; n_bins],
            |mut acc, local| {
                acc.iter_mut().zip(local).for_each(|(a, l)| *a += l);
                acc
            },
        );
    let scale = 1.0 / (cfg.n_samples as f64 * width);
    Ok(counts
        .into_iter()
        .enumerate()
        .map(|(j, c)| (lo + (j as f64 + 0.5) * width, c as f64 * scale))
        .collect())
}
