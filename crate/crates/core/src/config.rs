//! Bounds and tolerances for verdicts and reports. Every field has a
//! default; a JSON config file overrides any subset of them.

use serde::{Deserialize, Serialize};

use crate::arith::DEFAULT_SIEVE_BUDGET;
use crate::error::{invalid, Result};
use crate::expansion::convergence::DivergenceRule;
use crate::expansion::DEFAULT_WINDOW;
use crate::functions::spectrum::{DEFAULT_K_MAX, DEFAULT_SCAN_BOUND};
use crate::functions::DEFAULT_ONE_TOL;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    /// Primes scanned for spectra.
    pub scan_bound: u64,
    /// Exponents scanned for transparency valuations.
    pub k_max: u32,
    /// `|G(p^K) - 1| <= one_tol` counts as one for floating rules.
    pub one_tol: f64,
    /// Truncation of the Möbius series and expansions for normal and
    /// sporadic coefficients.
    pub series_q: u64,
    /// Truncation of the coprime expansions for exotic coefficients.
    pub exotic_q: u64,
    /// Checkpoints in the final convergence window.
    pub window: usize,
    /// Convergence tolerance.
    pub tol: f64,
    pub divergence_magnitude: f64,
    pub divergence_exponent: f64,
    /// Growth of `Σ_p |G(p)|` over the last decade that signals divergence.
    pub prime_increment_threshold: f64,
    /// `b` values whose restricted Möbius series must converge.
    pub sample_b: Vec<u64>,
    /// `a` values for the exotic coprime expansions; empty means
    /// `1..=50` together with `p0^k·m` for `k <= 4`, `m ∈ {1, 3, 5, 7, 15}`.
    pub sample_a: Vec<u64>,
    /// `a` values whose full expansion is checked against zero as
    /// corroboration.
    pub corroboration_a: Vec<u64>,
    pub weak_r_bound: u64,
    pub weak_k_bound: u32,
    /// Largest sieve the run may allocate.
    pub sieve_budget: u64,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            scan_bound: DEFAULT_SCAN_BOUND,
            k_max: DEFAULT_K_MAX,
            one_tol: DEFAULT_ONE_TOL,
            series_q: 1_000_000,
            exotic_q: 100_000,
            window: DEFAULT_WINDOW,
            tol: 0.02,
            divergence_magnitude: DivergenceRule::default().magnitude,
            divergence_exponent: DivergenceRule::default().exponent,
            prime_increment_threshold: 0.05,
            sample_b: (1..=30).collect(),
            sample_a: Vec::new(),
            corroboration_a: (1..=8).collect(),
            weak_r_bound: 100,
            weak_k_bound: 6,
            sieve_budget: DEFAULT_SIEVE_BUDGET,
        }
    }
}

impl Config {
    pub fn validate(&self) -> Result<()> {
        if self.scan_bound < 2 || self.k_max == 0 {
            return invalid("scan_bound must be >= 2 and k_max >= 1");
        }
        if self.series_q == 0 || self.exotic_q == 0 || self.window == 0 {
            return invalid("series_q, exotic_q and window must be positive");
        }
        if !(self.tol >= 0.0) || !(self.one_tol >= 0.0) {
            return invalid("tolerances must be non-negative");
        }
        if self.series_q.max(self.exotic_q) > self.sieve_budget {
            return invalid("truncations exceed the sieve budget");
        }
        if self.sample_b.contains(&0) || self.sample_a.contains(&0) || self.corroboration_a.contains(&0)
        {
            return invalid("sampled a and b must be positive");
        }
        if self.weak_r_bound == 0 || self.weak_k_bound == 0 {
            return invalid("weak_r_bound and weak_k_bound must be positive");
        }
        Ok(())
    }

    pub fn divergence_rule(&self) -> DivergenceRule {
        DivergenceRule {
            magnitude: self.divergence_magnitude,
            exponent: self.divergence_exponent,
        }
    }

    /// The `a` values sampled for an exotic coefficient with invisible `p0`.
    pub fn exotic_sample(&self, p0: u64) -> Vec<u64> {
        if !self.sample_a.is_empty() {
            return self.sample_a.clone();
        }
        let mut out: Vec<u64> = (1..=50).collect();
        let mut pk = 1u64;
        for _ in 1..=4 {
            pk = pk.saturating_mul(p0);
            for m in [1, 3, 5, 7, 15] {
                out.push(pk.saturating_mul(m));
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate_and_round_trip() {
        let c = Config::default();
        c.validate().unwrap();
        let json = serde_json::to_string(&c).unwrap();
        let back: Config = serde_json::from_str(&json).unwrap();
        assert_eq!(back, c);
        let partial: Config = serde_json::from_str(r#"{"tol": 0.5}"#).unwrap();
        assert_eq!(partial.tol, 0.5);
        assert_eq!(partial.series_q, c.series_q);
        assert!(serde_json::from_str::<Config>(r#"{"bogus": 1}"#).is_err());
    }

    #[test]
    fn exotic_sample_mixes_powers_of_p0() {
        let s = Config::default().exotic_sample(3);
        assert!(s.contains(&(81 * 15)));
        assert!(s.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(s[..50], (1..=50).collect::<Vec<_>>()[..]);
    }
}
