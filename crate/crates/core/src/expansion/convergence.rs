//! Heuristic convergence verdicts on partial-sum checkpoints.
//!
//! A series "converges to L" when every checkpoint in the final window lies
//! within `tol` of L and of the window mean; it "diverges" when its final
//! magnitude exceeds a threshold and `log|S|` grows with positive slope in
//! `log x`. Neither verdict is a proof.

use num_complex::Complex64;
use serde::Serialize;

use super::PartialSumSeries;
use crate::error::{invalid, Result};
use crate::value::serialize_complex;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DivergenceRule {
    /// Minimum `|S|` at the last checkpoint.
    pub magnitude: f64,
    /// Minimum fitted exponent of `|S(x)| ~ x^e`.
    pub exponent: f64,
}

impl Default for DivergenceRule {
    fn default() -> Self {
        DivergenceRule {
            magnitude: 10.0,
            exponent: 0.1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Outcome {
    ConvergesTo {
        #[serde(serialize_with = "serialize_complex")]
        limit: Complex64,
    },
    DivergesToInfinity,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Evidence {
    pub window: usize,
    pub tol: f64,
    /// `max |S(x) - mean|` over the final window.
    pub spread: f64,
    /// `max |S(x) - L|` over the final window, `L` the target or the mean.
    pub deviation: f64,
    #[serde(serialize_with = "serialize_complex")]
    pub window_mean: Complex64,
    pub final_x: u64,
    pub final_magnitude: f64,
    pub growth_exponent: Option<f64>,
    pub divergence_rule: DivergenceRule,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceVerdict {
    pub outcome: Outcome,
    pub evidence: Evidence,
    pub heuristic: bool,
}

impl ConvergenceVerdict {
    pub fn converges(&self) -> bool {
        matches!(self.outcome, Outcome::ConvergesTo { .. })
    }

    pub fn converges_to(&self, target: Complex64, tol: f64) -> bool {
        match self.outcome {
            Outcome::ConvergesTo { limit } => (limit - target).norm() <= tol,
            _ => false,
        }
    }

    pub fn diverges(&self) -> bool {
        self.outcome == Outcome::DivergesToInfinity
    }
}

/// Least-squares slope of `log |S|` against `log x` over the points with
/// `x >= sqrt(x_last)` and `S != 0`.
pub fn fit_growth_exponent(points: &[(u64, f64)]) -> Option<f64> {
    let last = points.last()?.0 as f64;
    let from = last.sqrt();
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|&&(x, m)| x as f64 >= from && m > 0.0)
        .map(|&(x, m)| ((x as f64).ln(), m.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    Some(sxy / sxx)
}

pub fn detect_convergence(
    series: &PartialSumSeries,
    target: Option<Complex64>,
    window: usize,
    tol: f64,
) -> Result<ConvergenceVerdict> {
    detect_convergence_with(series, target, window, tol, DivergenceRule::default())
}

pub fn detect_convergence_with(
    series: &PartialSumSeries,
    target: Option<Complex64>,
    window: usize,
    tol: f64,
    rule: DivergenceRule,
) -> Result<ConvergenceVerdict> {
    let points = series.points();
    if window == 0 || points.len() < window {
        return invalid(format!(
            "need at least {window} checkpoints, the series has {}",
            points.len()
        ));
    }
    let tail = &points[points.len() - window..];
    let mean = tail.iter().map(|p| p.1).sum::<Complex64>() / window as f64;
    let spread = tail.iter().map(|p| (p.1 - mean).norm()).fold(0.0, f64::max);
    let center = target.unwrap_or(mean);
    let deviation = tail.iter().map(|p| (p.1 - center).norm()).fold(0.0, f64::max);
    let (final_x, final_sum) = *points.last().unwrap();
    let magnitudes: Vec<(u64, f64)> = points.iter().map(|&(x, z)| (x, z.norm())).collect();
    let growth = fit_growth_exponent(&magnitudes);

    let outcome = if spread <= tol && deviation <= tol {
        Outcome::ConvergesTo { limit: center }
    } else if final_sum.norm() > rule.magnitude && growth.is_some_and(|e| e > rule.exponent) {
        Outcome::DivergesToInfinity
    } else {
        Outcome::Inconclusive
    };
    Ok(ConvergenceVerdict {
        outcome,
        evidence: Evidence {
            window,
            tol,
            spread,
            deviation,
            window_mean: mean,
            final_x,
            final_magnitude: final_sum.norm(),
            growth_exponent: growth,
            divergence_rule: rule,
        },
        heuristic: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expansion::Checkpoint;
    use crate::functions::Exactness;
    use crate::value::Value;

    fn series(f: impl Fn(u64) -> f64, xs: impl IntoIterator<Item = u64>) -> PartialSumSeries {
        PartialSumSeries {
            description: "test".into(),
            mode: Exactness::Floating,
            checkpoints: xs
                .into_iter()
                .map(|x| Checkpoint {
                    x,
                    sum: Value::Float(Complex64::new(f(x), 0.0)),
                })
                .collect(),
        }
    }

    #[test]
    fn constant_zero_converges_to_zero() {
        let s = series(|_| 0.0, 1..=40);
        let v = detect_convergence(&s, None, 32, 1e-9).unwrap();
        assert!(v.converges_to(Complex64::new(0.0, 0.0), 0.0));
        let v = detect_convergence(&s, Some(Complex64::new(0.0, 0.0)), 32, 1e-9).unwrap();
        assert!(v.converges());
    }

    #[test]
    fn counting_function_diverges() {
        let s = series(|x| x as f64, (1..=40).map(|k| k * 1000));
        let v = detect_convergence(&s, None, 32, 0.01).unwrap();
        assert!(v.diverges());
        assert!((v.evidence.growth_exponent.unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn power_growth_exponent_is_recovered() {
        let s = series(|x| (x as f64).powf(0.4), (1..=60).map(|k| k * 10_000));
        let v = detect_convergence(&s, None, 32, 0.01).unwrap();
        assert!(v.diverges());
        assert!((v.evidence.growth_exponent.unwrap() - 0.4).abs() < 1e-9);
    }

    #[test]
    fn target_mismatch_is_not_convergence() {
        let s = series(|_| 1.0, 1..=40);
        let v = detect_convergence(&s, Some(Complex64::new(0.0, 0.0)), 32, 0.1).unwrap();
        assert_eq!(v.outcome, Outcome::Inconclusive);
        let v = detect_convergence(&s, None, 32, 0.1).unwrap();
        assert!(v.converges_to(Complex64::new(1.0, 0.0), 1e-12));
    }

    #[test]
    fn short_series_is_rejected() {
        let s = series(|_| 0.0, 1..=4);
        assert!(detect_convergence(&s, None, 32, 0.1).is_err());
    }

    #[test]
    fn slow_oscillation_is_inconclusive() {
        let s = series(|x| (x as f64).ln().sin(), (1..=64).map(|k| k * 100));
        let v = detect_convergence(&s, None, 32, 0.01).unwrap();
        assert_eq!(v.outcome, Outcome::Inconclusive);
    }
}
