//! Evidence-graded membership of a coefficient in the 0-cloud.
//!
//! The classification picks the criterion: a normal `G` needs
//! `Σ G(q)μ(q) = 0`, a sporadic one `Σ_{(q,P(G))=1} G(q)μ(q) = 0`, both under
//! the hypothesis that every `Σ_{(r,b)=1} G(r)μ(r)` converges; an exotic or
//! weakly exotic `G` needs `Σ_{(q,p0)=1} G(q)c_q(a)` to converge for every
//! `a`. Hypotheses quantify over all `a` or `b`, so they are sampled.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::convergence::{detect_convergence_with, ConvergenceVerdict, Outcome};
use super::series::{coprime_expansion_partial_sums, expansion_partial_sums, restricted_mobius_partial_sums};
use super::{default_checkpoints, PartialSumSeries, SumMode};
use crate::arith::{self, ArithTables};
use crate::config::Config;
use crate::error::Result;
use crate::functions::{
    is_weakly_exotic, spectrum, ArithmeticFunction, CatalogEntry, Classification,
    MultiplicativeFunction, SpectrumReport,
};
use crate::value::serialize_complex;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckVerdict {
    Passed,
    Failed,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckRole {
    /// The classification itself must be certified.
    Classification,
    /// An assumption under which the criterion applies.
    Hypothesis,
    /// The criterion proper.
    Condition,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Conclusion {
    InZeroCloud,
    NotInZeroCloud,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeriesEvidence {
    pub parameter: String,
    pub final_x: u64,
    #[serde(serialize_with = "serialize_complex")]
    pub final_sum: Complex64,
    pub verdict: ConvergenceVerdict,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HypothesisCheck {
    pub condition: String,
    pub role: CheckRole,
    pub verdict: CheckVerdict,
    pub required: bool,
    pub detail: String,
    pub evidence: Vec<SeriesEvidence>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZeroCloudVerdict {
    pub label: String,
    /// `None` for a general function with no declared weakly exotic prime.
    pub classification: Option<Classification>,
    pub certified: bool,
    pub hypothesis_checks: Vec<HypothesisCheck>,
    /// Extra evidence that does not enter the conclusion.
    pub corroboration: Vec<HypothesisCheck>,
    pub conclusion: Conclusion,
    pub heuristic: bool,
}

impl ZeroCloudVerdict {
    pub fn all_checks_passed(&self) -> bool {
        self.hypothesis_checks
            .iter()
            .all(|c| c.verdict == CheckVerdict::Passed)
    }
}

fn conclude(checks: &[HypothesisCheck]) -> Conclusion {
    let required = || checks.iter().filter(|c| c.required);
    if required().all(|c| c.verdict == CheckVerdict::Passed) {
        return Conclusion::InZeroCloud;
    }
    let premises_hold = required()
        .filter(|c| c.role != CheckRole::Condition)
        .all(|c| c.verdict == CheckVerdict::Passed);
    let condition_failed = required()
        .any(|c| c.role == CheckRole::Condition && c.verdict == CheckVerdict::Failed);
    if premises_hold && condition_failed {
        Conclusion::NotInZeroCloud
    } else {
        Conclusion::Inconclusive
    }
}

fn evidence(parameter: String, series: &PartialSumSeries, verdict: ConvergenceVerdict) -> SeriesEvidence {
    let last = series.last().expect("series always holds its truncation point");
    SeriesEvidence {
        parameter,
        final_x: last.x,
        final_sum: last.sum.to_complex(),
        verdict,
    }
}

/// Runs one series per parameter in parallel and grades them all.
fn series_check<F>(
    condition: String,
    role: CheckRole,
    params: &[u64],
    name: &str,
    target: Option<Complex64>,
    config: &Config,
    build: F,
) -> Result<HypothesisCheck>
where
    F: Fn(u64) -> Result<PartialSumSeries> + Sync,
{
    let results: Vec<Result<SeriesEvidence>> = params
        .par_iter()
        .map(|&p| {
            let s = build(p)?;
            let v = detect_convergence_with(&s, target, config.window, config.tol, config.divergence_rule())?;
            Ok(evidence(format!("{name}={p}"), &s, v))
        })
        .collect();
    let evidence: Vec<SeriesEvidence> = results.into_iter().collect::<Result<_>>()?;

    let converged = evidence.iter().filter(|e| e.verdict.converges()).count();
    let diverged = evidence.iter().filter(|e| e.verdict.diverges()).count();
    // with a target, a window that settles elsewhere is a genuine failure
    let settled_elsewhere = target.is_some()
        && evidence.iter().any(|e| {
            e.verdict.outcome == Outcome::Inconclusive
                && e.verdict.evidence.spread <= config.tol
        });
    let verdict = if converged == evidence.len() {
        CheckVerdict::Passed
    } else if diverged > 0 || settled_elsewhere {
        CheckVerdict::Failed
    } else {
        CheckVerdict::Inconclusive
    };
    let worst = evidence
        .iter()
        .map(|e| e.verdict.evidence.deviation)
        .fold(0.0, f64::max);
    let detail = format!(
        "{converged}/{} series converge{}; largest final-window deviation {worst:.3e} (tol {})",
        evidence.len(),
        match target {
            Some(t) => format!(" to {t}"),
            None => String::new(),
        },
        config.tol
    );
    Ok(HypothesisCheck {
        condition,
        role,
        verdict,
        required: true,
        detail,
        evidence,
    })
}

fn classification_check(class: Option<Classification>, certified: bool, detail: String) -> HypothesisCheck {
    HypothesisCheck {
        condition: match class {
            Some(c) => format!("G is {c}"),
            None => "G has a declared weakly exotic prime".to_string(),
        },
        role: CheckRole::Classification,
        verdict: if certified && class.is_some() {
            CheckVerdict::Passed
        } else {
            CheckVerdict::Inconclusive
        },
        required: true,
        detail,
        evidence: Vec::new(),
    }
}

/// Distinct radicals among `bs`, in first-seen order.
fn distinct_radicals(bs: &[u64]) -> Result<Vec<u64>> {
    let mut out: Vec<u64> = Vec::new();
    for &b in bs {
        let r = arith::radical(b)?;
        if !out.contains(&r) {
            out.push(r);
        }
    }
    Ok(out)
}

fn mobius_case(
    tables: &ArithTables,
    g: &MultiplicativeFunction,
    spec: &SpectrumReport,
    config: &Config,
    checks: &mut Vec<HypothesisCheck>,
    corroboration: &mut Vec<HypothesisCheck>,
) -> Result<()> {
    let q = config.series_q;
    let cps = default_checkpoints(q, config.window);
    let bs = distinct_radicals(&config.sample_b)?;
    checks.push(series_check(
        format!("sum_{{(r,b)=1}} G(r) mu(r) converges for b in {:?}", config.sample_b),
        CheckRole::Hypothesis,
        &bs,
        "b",
        None,
        config,
        |b| restricted_mobius_partial_sums(tables, g, b, q, &cps, SumMode::Floating),
    )?);
    let pg = spec.pg.unwrap_or(1);
    let condition = if pg == 1 {
        "sum_q G(q) mu(q) = 0".to_string()
    } else {
        format!("sum_{{(q,{pg})=1}} G(q) mu(q) = 0")
    };
    checks.push(series_check(
        condition,
        CheckRole::Condition,
        &[pg],
        "P(G)",
        Some(Complex64::new(0.0, 0.0)),
        config,
        |b| restricted_mobius_partial_sums(tables, g, b, q, &cps, SumMode::Floating),
    )?);
    corroboration.push(series_check(
        "sum_q G(q) c_q(a) = 0 for sampled a".to_string(),
        CheckRole::Condition,
        &config.corroboration_a,
        "a",
        Some(Complex64::new(0.0, 0.0)),
        config,
        |a| expansion_partial_sums(tables, g, a, q, &cps, SumMode::Floating),
    )?);
    for c in corroboration.iter_mut() {
        c.required = false;
    }
    Ok(())
}

fn exotic_case(
    tables: &ArithTables,
    g: &dyn ArithmeticFunction,
    p0: u64,
    config: &Config,
    checks: &mut Vec<HypothesisCheck>,
    corroboration: &mut Vec<HypothesisCheck>,
) -> Result<()> {
    let q = config.exotic_q;
    let cps = default_checkpoints(q, config.window);
    let sample = config.exotic_sample(p0);
    checks.push(series_check(
        format!("sum_{{(q,{p0})=1}} G(q) c_q(a) converges for sampled a"),
        CheckRole::Hypothesis,
        &sample,
        "a",
        None,
        config,
        |a| coprime_expansion_partial_sums(tables, g, a, p0, q, &cps, SumMode::Floating),
    )?);
    // the full expansions carry finite factors as large as p0^4 and settle
    // more slowly than the coprime ones, so they get the longer truncation
    let q_full = config.series_q.max(q);
    let cps_full = default_checkpoints(q_full, config.window);
    let mut c = series_check(
        "sum_q G(q) c_q(a) = 0 for sampled a".to_string(),
        CheckRole::Condition,
        &sample,
        "a",
        Some(Complex64::new(0.0, 0.0)),
        config,
        |a| expansion_partial_sums(tables, g, a, q_full, &cps_full, SumMode::Floating),
    )?;
    c.required = false;
    corroboration.push(c);
    Ok(())
}

/// Builds the sieve the verdict needs and runs it.
pub fn zero_cloud_verdict(entry: &CatalogEntry, config: &Config) -> Result<ZeroCloudVerdict> {
    config.validate()?;
    let tables = ArithTables::with_budget(config.series_q.max(config.exotic_q), config.sieve_budget)?;
    zero_cloud_verdict_with(&tables, entry, config)
}

pub fn zero_cloud_verdict_with(
    tables: &ArithTables,
    entry: &CatalogEntry,
    config: &Config,
) -> Result<ZeroCloudVerdict> {
    config.validate()?;
    let mut checks = Vec::new();
    let mut corroboration = Vec::new();
    let (classification, certified) = match entry {
        CatalogEntry::Multiplicative(g) => {
            let spec = spectrum(g, config.scan_bound, config.k_max, config.one_tol)?;
            let class = spec.classification;
            checks.push(classification_check(
                Some(class),
                spec.certified,
                format!(
                    "F(G) = {:?}, F0(G) = {:?} over primes <= {}, certified = {}",
                    spec.transparent_primes, spec.invisible_primes, spec.scan_bound, spec.certified
                ),
            ));
            match class {
                Classification::Normal | Classification::Sporadic => {
                    mobius_case(tables, g, &spec, config, &mut checks, &mut corroboration)?
                }
                Classification::Exotic | Classification::WeaklyExotic => {
                    let p0 = spec.first_invisible().expect("exotic means F0 is nonempty");
                    exotic_case(tables, g, p0, config, &mut checks, &mut corroboration)?
                }
            }
            (Some(class), spec.certified)
        }
        CatalogEntry::General(g) => match g.weakly_exotic_prime() {
            Some(p0) => {
                let cert = is_weakly_exotic(g, p0, config.weak_r_bound, config.weak_k_bound, config.one_tol)?;
                checks.push(classification_check(
                    Some(Classification::WeaklyExotic),
                    true,
                    format!("declared p0 = {p0}"),
                ));
                checks.push(HypothesisCheck {
                    condition: format!("G({p0}^K r) = G(r) for (r,{p0}) = 1"),
                    role: CheckRole::Hypothesis,
                    verdict: if cert.holds {
                        CheckVerdict::Passed
                    } else {
                        CheckVerdict::Failed
                    },
                    required: true,
                    detail: format!(
                        "{} pairs checked for r <= {}, K <= {}; first failure {:?}",
                        cert.checked_pairs, cert.r_bound, cert.k_bound, cert.first_failure
                    ),
                    evidence: Vec::new(),
                });
                exotic_case(tables, g, p0, config, &mut checks, &mut corroboration)?;
                (Some(Classification::WeaklyExotic), true)
            }
            None => {
                checks.push(classification_check(
                    None,
                    false,
                    "general function without a declared weakly exotic prime".to_string(),
                ));
                (None, false)
            }
        },
    };
    let conclusion = conclude(&checks);
    Ok(ZeroCloudVerdict {
        label: entry.label().to_string(),
        classification,
        certified,
        hypothesis_checks: checks,
        corroboration,
        conclusion,
        heuristic: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functions::{catalog, CatalogParams};

    fn small_config() -> Config {
        Config {
            series_q: 20_000,
            exotic_q: 5_000,
            sample_b: vec![1, 2, 3, 6],
            sample_a: vec![1, 2, 3, 4, 12],
            corroboration_a: vec![1, 2],
            tol: 0.05,
            ..Config::default()
        }
    }

    fn verdict(name: &str, params: &[&str]) -> ZeroCloudVerdict {
        let entry = catalog(name, &CatalogParams::parse(params).unwrap()).unwrap();
        zero_cloud_verdict(&entry, &small_config()).unwrap()
    }

    #[test]
    fn dispatch_follows_classification() {
        let v = verdict("GR", &[]);
        assert_eq!(v.classification, Some(Classification::Normal));
        assert!(v.hypothesis_checks[2].condition.starts_with("sum_q G(q) mu(q)"));
        let v = verdict("GH", &[]);
        assert_eq!(v.classification, Some(Classification::Sporadic));
        assert!(v.hypothesis_checks[2].condition.contains("(q,2)=1"));
        let v = verdict("indicator_prime_powers", &[]);
        assert_eq!(v.classification, Some(Classification::Exotic));
        assert!(v.hypothesis_checks[1].condition.contains("(q,2)=1"));
        assert_eq!(v.conclusion, Conclusion::InZeroCloud);
        let v = verdict("weakly_exotic_sample", &[]);
        assert_eq!(v.classification, Some(Classification::WeaklyExotic));
        assert_eq!(v.conclusion, Conclusion::InZeroCloud);
        assert!(v.all_checks_passed());
    }

    #[test]
    fn divergent_mobius_series_is_not_accepted() {
        // G(p) = -p^{-s} away from p1, p2: Σ G(q)μ(q) grows like x^{1-s}
        let v = verdict("prop5", &[]);
        assert_eq!(v.classification, Some(Classification::Normal));
        assert_ne!(v.conclusion, Conclusion::InZeroCloud);
    }

    #[test]
    fn conclusion_rules() {
        let check = |role, verdict| HypothesisCheck {
            condition: String::new(),
            role,
            verdict,
            required: true,
            detail: String::new(),
            evidence: Vec::new(),
        };
        use CheckRole::*;
        use CheckVerdict::*;
        assert_eq!(conclude(&[check(Hypothesis, Passed), check(Condition, Passed)]), Conclusion::InZeroCloud);
        assert_eq!(conclude(&[check(Hypothesis, Passed), check(Condition, Failed)]), Conclusion::NotInZeroCloud);
        assert_eq!(conclude(&[check(Hypothesis, Inconclusive), check(Condition, Failed)]), Conclusion::Inconclusive);
        assert_eq!(conclude(&[check(Classification, Inconclusive)]), Conclusion::Inconclusive);
    }
}
