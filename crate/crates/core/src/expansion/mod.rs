//! Truncated Ramanujan expansions and the series built around them.

pub mod absconv;
pub mod convergence;
pub mod factor;
pub mod series;
pub mod verdict;

use std::fmt::Write as _;

use num_complex::Complex64;
use serde::Serialize;

use crate::arith::{ArithTables, Factorization};
use crate::error::{invalid, Error, Result};
use crate::functions::{ArithmeticFunction, Exactness};
use crate::value::{CompensatedSum, ExactSum, Value};

pub use absconv::{absolute_convergence_report, AbsConvReport};
pub use convergence::{detect_convergence, fit_growth_exponent, ConvergenceVerdict, Outcome};
pub use factor::{
    coprime_peel_identity, factorized_expansion, finite_factor, finite_factor_abel,
    finite_factor_forms_equal, finite_factor_star, peel_sweep, PeelSweepReport,
};
pub use series::{
    coprime_expansion_partial_sums, expansion_partial_sums, restricted_mobius_partial_sums,
};
pub use verdict::{zero_cloud_verdict, CheckVerdict, Conclusion, HypothesisCheck, ZeroCloudVerdict};

/// Largest truncation summed in exact arithmetic under [`SumMode::Auto`].
pub const EXACT_LIMIT: u64 = 10_000;

/// Points in the dense final window of [`default_checkpoints`].
pub const DEFAULT_WINDOW: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SumMode {
    /// Exact for exact functions up to [`EXACT_LIMIT`], floating otherwise.
    #[default]
    Auto,
    Exact,
    Floating,
}

impl SumMode {
    pub fn resolve(self, g: &dyn ArithmeticFunction, q_max: u64) -> Result<Exactness> {
        match self {
            SumMode::Auto if g.is_exact() && q_max <= EXACT_LIMIT => Ok(Exactness::ExactRational),
            SumMode::Auto | SumMode::Floating => Ok(Exactness::Floating),
            SumMode::Exact if g.is_exact() => Ok(Exactness::ExactRational),
            SumMode::Exact => Err(Error::NotExact(g.label().to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Checkpoint {
    pub x: u64,
    pub sum: Value,
}

/// Partial sums of one series at increasing truncation points.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PartialSumSeries {
    pub description: String,
    pub mode: Exactness,
    pub checkpoints: Vec<Checkpoint>,
}

impl PartialSumSeries {
    pub fn last(&self) -> Option<&Checkpoint> {
        self.checkpoints.last()
    }

    /// The sum at the largest checkpoint.
    pub fn final_sum(&self) -> Value {
        self.last()
            .map(|c| c.sum.clone())
            .unwrap_or_else(|| Value::zero_like(self.mode == Exactness::ExactRational))
    }

    pub fn points(&self) -> Vec<(u64, Complex64)> {
        self.checkpoints
            .iter()
            .map(|c| (c.x, c.sum.to_complex()))
            .collect()
    }

    /// `x,re,im` rows with a header line.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,re,im\n");
        for (x, z) in self.points() {
            let _ = writeln!(out, "{x},{:e},{:e}", z.re, z.im);
        }
        out
    }
}

/// Decades `10^2, 10^3, ...` below `q_max`, then `window` evenly spaced
/// points over `(q_max/2, q_max]`.
pub fn default_checkpoints(q_max: u64, window: usize) -> Vec<u64> {
    let mut out = Vec::new();
    let mut x = 100u64;
    while x < q_max / 2 {
        out.push(x);
        x = x.saturating_mul(10);
    }
    let window = window.max(1) as u64;
    let half = q_max / 2;
    let span = q_max - half;
    for i in 1..=window {
        out.push(half + (span * i).div_ceil(window));
    }
    out.retain(|&x| x >= 1);
    out.sort_unstable();
    out.dedup();
    out
}

fn prepare_checkpoints(q_max: u64, checkpoints: &[u64]) -> Result<Vec<u64>> {
    if q_max == 0 {
        return invalid("truncation must be at least 1");
    }
    if let Some(&x) = checkpoints.iter().find(|&&x| x == 0 || x > q_max) {
        return invalid(format!("checkpoint {x} outside [1, {q_max}]"));
    }
    let mut cps = checkpoints.to_vec();
    cps.push(q_max);
    cps.sort_unstable();
    cps.dedup();
    Ok(cps)
}

/// One term: `G(q)·w(q)` for `q` passing `keep`; `w` sees the factorization.
pub(crate) struct TermSpec<'a> {
    pub keep: &'a (dyn Fn(u64) -> bool + Sync),
    pub weight: &'a (dyn Fn(&Factorization) -> i64 + Sync),
    pub abs: bool,
}

/// The summation kernel shared by every series in this module.
pub(crate) fn accumulate(
    tables: &ArithTables,
    g: &dyn ArithmeticFunction,
    q_max: u64,
    checkpoints: &[u64],
    mode: Exactness,
    spec: &TermSpec<'_>,
) -> Result<Vec<Checkpoint>> {
    let cps = prepare_checkpoints(q_max, checkpoints)?;
    if q_max > tables.limit() {
        return Err(Error::Resource(format!(
            "truncation {q_max} exceeds the sieve limit {}",
            tables.limit()
        )));
    }
    let mut out = Vec::with_capacity(cps.len());
    let mut next = cps.iter().peekable();
    match mode {
        Exactness::ExactRational => {
            let mut acc = ExactSum::new();
            for q in 1..=q_max {
                if (spec.keep)(q) {
                    let f = tables.factorize(q)?;
                    let w = (spec.weight)(&f);
                    if w != 0 {
                        let t = g.value_at(&f)?.scale(w);
                        let t = if spec.abs { t.abs() } else { t };
                        match t {
                            Value::Exact(r) => acc.add(&r),
                            Value::Float(_) => return Err(Error::NotExact(g.label().to_string())),
                        }
                    }
                }
                if next.peek() == Some(&&q) {
                    next.next();
                    out.push(Checkpoint {
                        x: q,
                        sum: Value::Exact(acc.value()),
                    });
                }
            }
        }
        Exactness::Floating => {
            let mut acc = CompensatedSum::new();
            for q in 1..=q_max {
                if (spec.keep)(q) {
                    let f = tables.factorize(q)?;
                    let w = (spec.weight)(&f);
                    if w != 0 {
                        let t = g.complex_at(&f)? * w as f64;
                        acc.add(if spec.abs { Complex64::new(t.norm(), 0.0) } else { t });
                    }
                }
                if next.peek() == Some(&&q) {
                    next.next();
                    out.push(Checkpoint {
                        x: q,
                        sum: Value::Float(acc.value()),
                    });
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn checkpoint_schedule() {
        let cps = default_checkpoints(1_000_000, 32);
        assert_eq!(&cps[..4], &[100, 1000, 10_000, 100_000]);
        assert_eq!(cps.len(), 4 + 32);
        assert_eq!(*cps.last().unwrap(), 1_000_000);
        assert!(cps.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(default_checkpoints(4, 32), vec![3, 4]);
        assert_eq!(default_checkpoints(1, 32), vec![1]);
    }

    #[test]
    fn checkpoints_are_validated() {
        assert!(prepare_checkpoints(10, &[0]).is_err());
        assert!(prepare_checkpoints(10, &[11]).is_err());
        assert!(prepare_checkpoints(0, &[]).is_err());
        assert_eq!(prepare_checkpoints(10, &[5, 2, 5]).unwrap(), vec![2, 5, 10]);
    }
}
