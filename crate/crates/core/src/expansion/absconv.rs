//! Absolute convergence diagnostics: `Σ_p |G(p)|`, `Σ_q |G(q) c_q(a)|`, and
//! the finite-cofinite factorization
//! `Σ_q |G(q)c_q(a)| = Σ_{d | aP(a)} |G(d)c_d(a)| · Σ_{(r,a)=1} |G(r)μ(r)|`.

use serde::Serialize;

use super::series::absolute_expansion_partial_sums;
use super::{default_checkpoints, PartialSumSeries, SumMode, DEFAULT_WINDOW};
use crate::arith::{self, ArithTables};
use crate::error::{invalid, Result};
use crate::functions::{
    spectrum, ArithmeticFunction, MultiplicativeFunction, DEFAULT_ONE_TOL,
};
use crate::functions::spectrum::{DEFAULT_K_MAX, DEFAULT_SCAN_BOUND};
use crate::ramanujan::c_prime_power_v;
use crate::value::CompensatedSum;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AbsConvOptions {
    /// Growth of `Σ_{p≤B} |G(p)|` over `(B/10, B]` above which the prime
    /// series is reported divergent.
    pub increment_threshold: f64,
    pub scan_bound: u64,
    pub k_max: u32,
    pub one_tol: f64,
}

impl Default for AbsConvOptions {
    fn default() -> Self {
        AbsConvOptions {
            increment_threshold: 0.05,
            scan_bound: DEFAULT_SCAN_BOUND,
            k_max: DEFAULT_K_MAX,
            one_tol: DEFAULT_ONE_TOL,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SeriesVerdict {
    Converges,
    Diverges,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PrimeSumPoint {
    pub x: u64,
    pub sum: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PrimeSumDiagnostics {
    pub prime_bound: u64,
    pub checkpoints: Vec<PrimeSumPoint>,
    /// `Σ_{B/10 < p ≤ B} |G(p)|`.
    pub last_decade_increment: f64,
    pub increment_threshold: f64,
    /// Declared upper bound on `Σ_{p>B} |G(p)|`, when the function has one.
    pub declared_tail_bound: Option<f64>,
    pub verdict: SeriesVerdict,
    /// True when the verdict rests on a declared tail bound rather than on
    /// the growth heuristic.
    pub certified: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FactorizationCheck {
    pub q_max: u64,
    /// `Σ_{q≤Q} |G(q)c_q(a)|`.
    pub lhs: f64,
    /// `Σ_{d | aP(a)} |G(d)c_d(a)|`, a finite sum.
    pub finite_sum: f64,
    pub divisors: usize,
    /// `Σ_{r≤Q, (r,a)=1} |G(r)μ(r)|`.
    pub cofactor: f64,
    pub product: f64,
    /// `product - lhs`; the truncated sides differ only by pairs `d·r > Q`.
    pub discrepancy: f64,
    /// `Σ_d |G(d)c_d(a)| · T(Q/d)` with `T(y)` bounded through the Euler
    /// product and the declared prime tail.
    pub tail_bound: Option<f64>,
    pub within_tail_bound: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExoticCriterion {
    pub prime_sum_finite: Option<bool>,
    pub invisible_nonempty: bool,
    pub spectra_certified: bool,
    /// Absolute convergence for a member of the 0-cloud.
    pub predicts_absolute_convergence: Option<bool>,
    /// False when `Σ_p |G(p)| < ∞` but `F₀(G) = ∅`: then `G` is not in the
    /// 0-cloud at all.
    pub zero_cloud_consistent: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AbsConvReport {
    pub label: String,
    pub a: u64,
    pub prime_sums: PrimeSumDiagnostics,
    pub abs_series: PartialSumSeries,
    pub factorization: FactorizationCheck,
    /// Absolute convergence of `Σ_q G(q)c_q(a)`, which does not depend on `a`.
    pub absolute_convergence: SeriesVerdict,
    pub exotic_criterion: ExoticCriterion,
    pub heuristic: bool,
}

fn prime_sum_diagnostics(
    g: &MultiplicativeFunction,
    prime_bound: u64,
    threshold: f64,
) -> Result<PrimeSumDiagnostics> {
    let primes = arith::sieve_primes(prime_bound)?;
    let mut marks = Vec::new();
    let mut x = 10u64;
    while x < prime_bound {
        marks.push(x);
        x = x.saturating_mul(10);
    }
    marks.push(prime_bound);
    let decade_start = prime_bound / 10;

    let mut acc = CompensatedSum::new();
    let mut last_decade = CompensatedSum::new();
    let mut checkpoints = Vec::new();
    let mut it = primes.iter().peekable();
    for &m in &marks {
        while let Some(&&p) = it.peek() {
            if p > m {
                break;
            }
            let term = g.at_prime_power_complex(p, 1)?.norm().into();
            acc.add(term);
            if p > decade_start {
                last_decade.add(term);
            }
            it.next();
        }
        checkpoints.push(PrimeSumPoint {
            x: m,
            sum: acc.value().re,
        });
    }
    let increment = last_decade.value().re;
    let declared = g.prime_tail_bound(prime_bound);
    let (verdict, certified) = match declared {
        Some(t) if t.is_finite() => (SeriesVerdict::Converges, true),
        _ if increment > threshold => (SeriesVerdict::Diverges, false),
        _ => (SeriesVerdict::Inconclusive, false),
    };
    Ok(PrimeSumDiagnostics {
        prime_bound,
        checkpoints,
        last_decade_increment: increment,
        increment_threshold: threshold,
        declared_tail_bound: declared,
        verdict,
        certified,
    })
}

/// Divisors `d` of `a·P(a)` with `|G(d) c_d(a)|`.
fn finite_terms(g: &MultiplicativeFunction, a: u64) -> Result<Vec<(u64, f64)>> {
    let fa = arith::factorize(a)?;
    let mut out = vec![(1u64, 1.0f64)];
    for &(p, v) in fa.factors() {
        let mut next = Vec::with_capacity(out.len() * (v as usize + 2));
        for &(d, w) in &out {
            let mut pk = 1u64;
            for k in 0..=v + 1 {
                let local = g.at_prime_power_complex(p, k)?.norm() * c_prime_power_v(p, k, v).abs() as f64;
                next.push((d * pk, w * local));
                pk = pk.saturating_mul(p);
            }
        }
        out = next;
    }
    Ok(out)
}

fn factorization_check(
    tables: &ArithTables,
    g: &MultiplicativeFunction,
    a: u64,
    q_max: u64,
    lhs: f64,
    prime_bound: u64,
) -> Result<FactorizationCheck> {
    let terms = finite_terms(g, a)?;
    let finite_sum: f64 = terms.iter().map(|t| t.1).sum();
    let rad = arith::radical(a)?;

    // prefix sums of |G(r)μ(r)| over r coprime to a
    let mut prefix = Vec::with_capacity(q_max as usize + 1);
    prefix.push(0.0);
    let mut acc = CompensatedSum::new();
    for r in 1..=q_max {
        if arith::gcd(r, rad) == 1 {
            let f = tables.factorize(r)?;
            if f.is_squarefree() {
                acc.add(g.complex_at(&f)?.norm().into());
            }
        }
        prefix.push(acc.value().re);
    }
    let cofactor = prefix[q_max as usize];
    let product = finite_sum * cofactor;

    let tail_bound = g.prime_tail_bound(prime_bound).map(|t| -> Result<f64> {
        let mut euler = t.exp();
        for p in arith::sieve_primes(prime_bound)? {
            if rad % p != 0 {
                euler *= 1.0 + g.at_prime_power_complex(p, 1)?.norm();
            }
        }
        Ok(terms
            .iter()
            .filter(|t| t.1 != 0.0)
            .map(|&(d, w)| {
                let y = (q_max / d) as usize;
                w * (euler - prefix[y]).max(0.0)
            })
            .sum())
    });
    let tail_bound = tail_bound.transpose()?;
    let discrepancy = product - lhs;
    let slack = 1e-9 * product.abs().max(1.0);
    Ok(FactorizationCheck {
        q_max,
        lhs,
        finite_sum,
        divisors: terms.len(),
        cofactor,
        product,
        discrepancy,
        tail_bound,
        within_tail_bound: tail_bound.map(|b| discrepancy.abs() <= b + slack),
    })
}

/// Prime-sum growth, absolute partial sums, the factorization check and the
/// resulting verdicts for one `a`.
pub fn absolute_convergence_report(
    tables: &ArithTables,
    g: &MultiplicativeFunction,
    prime_bound: u64,
    a: u64,
    q_max: u64,
    options: &AbsConvOptions,
) -> Result<AbsConvReport> {
    if prime_bound < 2 || a == 0 || q_max == 0 {
        return invalid("absconv needs B >= 2, a >= 1 and Q >= 1");
    }
    let prime_sums = prime_sum_diagnostics(g, prime_bound, options.increment_threshold)?;
    let cps = default_checkpoints(q_max, DEFAULT_WINDOW);
    let abs_series = absolute_expansion_partial_sums(tables, g, a, q_max, &cps, SumMode::Floating)?;
    let lhs = abs_series.final_sum().to_complex().re;
    let factorization = factorization_check(tables, g, a, q_max, lhs, prime_bound)?;

    let spec = spectrum(g, options.scan_bound, options.k_max, options.one_tol)?;
    let prime_sum_finite = match prime_sums.verdict {
        SeriesVerdict::Converges => Some(true),
        SeriesVerdict::Diverges => Some(false),
        SeriesVerdict::Inconclusive => None,
    };
    let invisible_nonempty = !spec.invisible_primes.is_empty();
    let exotic_criterion = ExoticCriterion {
        prime_sum_finite,
        invisible_nonempty,
        spectra_certified: spec.certified,
        predicts_absolute_convergence: prime_sum_finite.map(|f| f && invisible_nonempty),
        zero_cloud_consistent: prime_sum_finite.map(|f| !f || invisible_nonempty),
    };
    Ok(AbsConvReport {
        label: g.label().to_string(),
        a,
        absolute_convergence: prime_sums.verdict,
        prime_sums,
        abs_series,
        factorization,
        exotic_criterion,
        heuristic: true,
    })
}

/// `Σ_{d | aP(a)} |G(d) c_d(a)|` on its own.
pub fn finite_absolute_sum(g: &MultiplicativeFunction, a: u64) -> Result<f64> {
    Ok(finite_terms(g, a)?.iter().map(|t| t.1).sum())
}
