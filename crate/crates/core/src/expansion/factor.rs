//! The finite factor `Π_{p|a} Σ_K G(p^K) c_{p^K}(a)`, its Abel-summed form,
//! the factorized expansion and the coprime peel identity.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use super::series::restricted_mobius_partial_sums;
use super::SumMode;
use crate::arith::{self, ArithTables};
use crate::error::{invalid, Error, Result};
use crate::functions::{ArithmeticFunction, Classification, MultiplicativeFunction, SpectrumReport};
use crate::ramanujan::c_prime_power_v;
use crate::value::Value;

fn pow_i64(p: u64, k: u32) -> Result<i64> {
    p.checked_pow(k)
        .and_then(|v| i64::try_from(v).ok())
        .ok_or_else(|| Error::Resource(format!("{p}^{k} overflows")))
}

/// `Σ_{K=0}^{v+1} G(p^K) c_{p^K}(a)` with `v = v_p(a)`.
pub fn local_factor(g: &MultiplicativeFunction, p: u64, v: u32) -> Result<Value> {
    let mut acc = Value::zero_like(g.is_exact());
    for k in 0..=v + 1 {
        acc = acc.add(&g.at_prime_power(p, k)?.scale(c_prime_power_v(p, k, v)));
    }
    Ok(acc)
}

/// `Σ_{K=0}^{v} p^K (G(p^K) - G(p^{K+1}))`.
pub fn local_factor_abel(g: &MultiplicativeFunction, p: u64, v: u32) -> Result<Value> {
    let mut acc = Value::zero_like(g.is_exact());
    let mut here = g.at_prime_power(p, 0)?;
    for k in 0..=v {
        let up = g.at_prime_power(p, k + 1)?;
        acc = acc.add(&here.sub(&up).scale(pow_i64(p, k)?));
        here = up;
    }
    Ok(acc)
}

fn product_over_primes_of(
    g: &MultiplicativeFunction,
    a: u64,
    local: fn(&MultiplicativeFunction, u64, u32) -> Result<Value>,
) -> Result<Value> {
    let fa = arith::factorize(a)?;
    let mut out = Value::one_like(g.is_exact());
    for &(p, v) in fa.factors() {
        out = out.mul(&local(g, p, v)?);
    }
    Ok(out)
}

/// `Π_{p|a} Σ_{K=0}^{v_p(a)+1} G(p^K) c_{p^K}(a)`; one for `a = 1`.
pub fn finite_factor(g: &MultiplicativeFunction, a: u64) -> Result<Value> {
    product_over_primes_of(g, a, local_factor)
}

/// `Π_{p|a} Σ_{K=0}^{v_p(a)} p^K (G(p^K) - G(p^{K+1}))`.
pub fn finite_factor_abel(g: &MultiplicativeFunction, a: u64) -> Result<Value> {
    product_over_primes_of(g, a, local_factor_abel)
}

/// Prime by prime agreement of the two forms: exact for exact functions,
/// within `tol` otherwise.
pub fn finite_factor_forms_equal(g: &MultiplicativeFunction, a: u64, tol: f64) -> Result<bool> {
    let fa = arith::factorize(a)?;
    for &(p, v) in fa.factors() {
        if !local_factor(g, p, v)?.approx_eq(&local_factor_abel(g, p, v)?, tol) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `a_G Π_{p∈F(G)} (1 - G(p^{v_{p,G}+1}))`, read off a spectrum of `g`.
pub fn finite_factor_star(g: &MultiplicativeFunction, spectrum: &SpectrumReport) -> Result<Value> {
    if spectrum.classification == Classification::Exotic {
        return invalid(format!("{} is exotic, a_G is undefined", g.label()));
    }
    let ag = spectrum
        .ag
        .ok_or_else(|| Error::InvalidInput(format!("a_G of {} is unavailable", g.label())))?;
    let mut out = Value::from_int(
        i64::try_from(ag).map_err(|_| Error::Resource(format!("a_G = {ag} overflows")))?,
        g.is_exact(),
    );
    let one = Value::one_like(g.is_exact());
    for &p in &spectrum.transparent_primes {
        let v = spectrum.valuations[&p]
            .finite()
            .ok_or_else(|| Error::InvalidInput(format!("v_{{{p},G}} is not finite")))?;
        out = out.mul(&one.sub(&g.at_prime_power(p, v + 1)?));
    }
    Ok(out)
}

/// `finite_factor(G, a) · Σ_{r≤x, (r,a)=1} G(r) μ(r)`.
pub fn factorized_expansion(
    tables: &ArithTables,
    g: &MultiplicativeFunction,
    a: u64,
    x: u64,
    mode: SumMode,
) -> Result<Value> {
    let finite = finite_factor(g, a)?;
    let cofactor = restricted_mobius_partial_sums(tables, g, a, x, &[], mode)?.final_sum();
    Ok(finite.mul(&cofactor))
}

fn check_peel_args(f: &[u64], p1: u64) -> Result<()> {
    if let Some(p) = f.iter().find(|&&p| !arith::is_prime(p)) {
        return invalid(format!("{p} in F is not prime"));
    }
    if !arith::is_prime(p1) {
        return invalid(format!("p1 = {p1} is not prime"));
    }
    if f.contains(&p1) {
        return invalid(format!("p1 = {p1} already lies in F"));
    }
    Ok(())
}

/// Both sides of
/// `Σ_{r≤x, (r,F)=1} Gμ = Σ_{r≤x, (r,F₁)=1} Gμ - G(p₁) Σ_{r≤x/p₁, (r,F₁)=1} Gμ`
/// with `F₁ = F ∪ {p₁}`, each computed by enumeration.
pub fn coprime_peel_identity(
    tables: &ArithTables,
    g: &MultiplicativeFunction,
    f: &[u64],
    p1: u64,
    x: u64,
    mode: SumMode,
) -> Result<(Value, Value)> {
    check_peel_args(f, p1)?;
    let b: u64 = f.iter().product();
    let lhs = restricted_mobius_partial_sums(tables, g, b, x, &[], mode)?.final_sum();
    let x1 = x / p1;
    let mut cps = vec![x];
    if x1 >= 1 {
        cps.push(x1);
    }
    let s1 = restricted_mobius_partial_sums(tables, g, b * p1, x, &cps, mode)?;
    let at = |t: u64| {
        s1.checkpoints
            .iter()
            .find(|c| c.x == t)
            .map(|c| c.sum.clone())
            .unwrap_or_else(|| Value::zero_like(lhs.is_exact()))
    };
    let tail = if x1 >= 1 { at(x1) } else { Value::zero_like(lhs.is_exact()) };
    let rhs = at(x).sub(&g.at_prime_power(p1, 1)?.mul(&tail));
    Ok((lhs, rhs))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PeelFailure {
    pub f: Vec<u64>,
    pub p1: u64,
    pub x: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PeelSweepReport {
    pub label: String,
    pub candidates: Vec<u64>,
    pub p1s: Vec<u64>,
    pub x_max: u64,
    pub checked: u64,
    pub failures: u64,
    pub first_failure: Option<PeelFailure>,
}

/// Exhaustive exact check of [`coprime_peel_identity`] for every
/// `F ⊆ candidates`, every `p1` in `p1s \ F` and every `x <= x_max`.
///
/// All terms are put over one common denominator once, so each check is a
/// comparison of big-integer prefix sums.
pub fn peel_sweep(
    g: &MultiplicativeFunction,
    candidates: &[u64],
    p1s: &[u64],
    x_max: u64,
) -> Result<PeelSweepReport> {
    if !g.is_exact() {
        return Err(Error::NotExact(g.label().to_string()));
    }
    let mut universe: Vec<u64> = candidates.iter().chain(p1s).copied().collect();
    universe.sort_unstable();
    universe.dedup();
    if universe.len() > 64 {
        return invalid("at most 64 distinct primes");
    }
    for &p in &universe {
        check_peel_args(&[], p)?;
    }
    let bit = |p: u64| 1u64 << universe.iter().position(|&q| q == p).unwrap();
    let tables = ArithTables::new(x_max.max(2))?;

    // term numerators over the common denominator L
    let mut terms: Vec<(u64, BigRational, u64)> = Vec::new();
    let mut lcm = BigInt::one();
    for r in 1..=x_max {
        let f = tables.factorize(r)?;
        let mu = f.mobius();
        if mu == 0 {
            continue;
        }
        let v = g.value_at(&f)?.scale(mu as i64);
        let v = v.as_exact().cloned().ok_or_else(|| Error::NotExact(g.label().to_string()))?;
        if v.is_zero() {
            continue;
        }
        lcm = lcm.lcm(v.denom());
        let mask = f.primes().filter(|p| universe.contains(p)).map(bit).sum::<u64>();
        terms.push((r, v, mask));
    }
    let numer: Vec<(u64, BigInt, u64)> = terms
        .into_iter()
        .map(|(r, v, mask)| (r, v.numer() * (&lcm / v.denom()), mask))
        .collect();

    let mut prefix_cache: HashMap<u64, Vec<BigInt>> = HashMap::new();
    let mut prefix = |mask: u64| -> Vec<BigInt> {
        prefix_cache
            .entry(mask)
            .or_insert_with(|| {
                let mut out = vec![BigInt::zero(); x_max as usize + 1];
                let mut acc = BigInt::zero();
                let mut it = numer.iter().peekable();
                for x in 1..=x_max {
                    while let Some((r, n, m)) = it.peek() {
                        if *r > x {
                            break;
                        }
                        if m & mask == 0 {
                            acc += n;
                        }
                        it.next();
                    }
                    out[x as usize] = acc.clone();
                }
                out
            })
            .clone()
    };

    let mut report = PeelSweepReport {
        label: g.label().to_string(),
        candidates: candidates.to_vec(),
        p1s: p1s.to_vec(),
        x_max,
        checked: 0,
        failures: 0,
        first_failure: None,
    };
    for subset in 0u64..(1 << candidates.len()) {
        let f: Vec<u64> = candidates
            .iter()
            .enumerate()
            .filter(|(i, _)| subset >> i & 1 == 1)
            .map(|(_, &p)| p)
            .collect();
        let f_mask: u64 = f.iter().map(|&p| bit(p)).sum();
        let lhs = prefix(f_mask);
        for &p1 in p1s.iter().filter(|p| !f.contains(p)) {
            let rhs = prefix(f_mask | bit(p1));
            let gp = g
                .at_prime_power(p1, 1)?
                .as_exact()
                .cloned()
                .ok_or_else(|| Error::NotExact(g.label().to_string()))?;
            let (gn, gd) = (gp.numer(), gp.denom());
            for x in 1..=x_max {
                let left = gd * &lhs[x as usize];
                let right = gd * &rhs[x as usize] - gn * &rhs[(x / p1) as usize];
                report.checked += 1;
                if left != right {
                    report.failures += 1;
                    report.first_failure.get_or_insert(PeelFailure {
                        f: f.clone(),
                        p1,
                        x,
                    });
                }
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functions::{catalog, spectrum, CatalogParams};
    use num_bigint::BigInt;

    fn mult(name: &str, params: &[&str]) -> MultiplicativeFunction {
        catalog(name, &CatalogParams::parse(params).unwrap())
            .unwrap()
            .as_multiplicative()
            .unwrap()
            .clone()
    }

    fn q(n: i64, d: i64) -> Value {
        Value::Exact(BigRational::new(BigInt::from(n), BigInt::from(d)))
    }

    /// Term-by-term oracle using the root-of-unity Ramanujan sum.
    fn local_oracle(g: &MultiplicativeFunction, p: u64, a: u64) -> Value {
        let v = arith::valuation(p, a).unwrap();
        (0..=v + 1).fold(q(0, 1), |acc, k| {
            let c = crate::ramanujan::c_direct(p.pow(k), a).unwrap();
            acc.add(&g.at_prime_power(p, k).unwrap().scale(c))
        })
    }

    #[test]
    fn finite_factor_examples() {
        let gh = mult("GH", &[]);
        assert_eq!(finite_factor(&gh, 1).unwrap(), q(1, 1));
        assert_eq!(finite_factor(&gh, 2).unwrap(), q(1, 1));
        assert!(finite_factor_forms_equal(&gh, 2, 0.0).unwrap());
        let gr = mult("GR", &[]);
        for p in [2u64, 3, 5, 7, 11] {
            assert_eq!(finite_factor(&gr, p).unwrap(), local_oracle(&gr, p, p));
        }
        assert!(finite_factor_forms_equal(&gr, 12, 0.0).unwrap());
        let want = local_oracle(&gr, 2, 12).mul(&local_oracle(&gr, 3, 12));
        assert_eq!(finite_factor(&gr, 12).unwrap(), want);
        assert_eq!(finite_factor_abel(&gr, 12).unwrap(), want);
    }

    #[test]
    fn star_form_examples() {
        let gr = mult("GR", &[]);
        let s = spectrum(&gr, 100, 8, 0.0).unwrap();
        assert_eq!(finite_factor_star(&gr, &s).unwrap(), q(1, 1));
        let gh = mult("GH", &[]);
        let s = spectrum(&gh, 100, 8, 0.0).unwrap();
        assert_eq!(finite_factor_star(&gh, &s).unwrap(), q(1, 1));
        assert_eq!(finite_factor(&gh, s.ag.unwrap()).unwrap(), q(1, 1));
        let g2 = mult("indicator_prime_powers", &[]);
        let s = spectrum(&g2, 100, 8, 0.0).unwrap();
        assert!(finite_factor_star(&g2, &s).is_err());
    }

    #[test]
    fn factorized_expansion_examples() {
        let t = ArithTables::new(1000).unwrap();
        let g2 = mult("indicator_prime_powers", &[]);
        assert!(factorized_expansion(&t, &g2, 2, 100, SumMode::Auto).unwrap().is_zero());
        let gr = mult("GR", &[]);
        let s = restricted_mobius_partial_sums(&t, &gr, 1, 500, &[], SumMode::Auto).unwrap();
        assert_eq!(factorized_expansion(&t, &gr, 1, 500, SumMode::Auto).unwrap(), s.final_sum());
    }

    #[test]
    fn peel_examples() {
        let t = ArithTables::new(100).unwrap();
        let gr = mult("GR", &[]);
        let (l, r) = coprime_peel_identity(&t, &gr, &[3], 2, 20, SumMode::Auto).unwrap();
        assert_eq!(l, r);
        let gh = mult("GH", &[]);
        let (l, r) = coprime_peel_identity(&t, &gh, &[], 2, 50, SumMode::Auto).unwrap();
        assert_eq!(l, r);
        // x < p1: no peel term
        let (l, r) = coprime_peel_identity(&t, &gh, &[2], 7, 5, SumMode::Auto).unwrap();
        assert_eq!(l, r);
        assert!(coprime_peel_identity(&t, &gh, &[2], 2, 5, SumMode::Auto).is_err());
    }

    #[test]
    fn peel_sweep_agrees_with_direct_enumeration() {
        let g0 = mult("G0", &["p0=3"]);
        let report = peel_sweep(&g0, &[2, 3], &[2, 3, 5], 120).unwrap();
        assert_eq!(report.failures, 0);
        assert_eq!(report.checked, 120 * (3 + 2 + 2 + 1));
        let t = ArithTables::new(120).unwrap();
        for x in [1, 17, 120] {
            let (l, r) = coprime_peel_identity(&t, &g0, &[2], 5, x, SumMode::Exact).unwrap();
            assert_eq!(l, r);
        }
    }
}
