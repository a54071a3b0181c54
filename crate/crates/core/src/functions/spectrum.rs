//! Spectra `F(G)`, `F₀(G)`, transparency valuations and the
//! normal / sporadic / exotic classification.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Serialize, Serializer};

use super::{ArithmeticFunction, MultiplicativeFunction};
use crate::arith::{self, Factorization};
use crate::error::{invalid, Error, Result};

pub const DEFAULT_SCAN_BOUND: u64 = 1000;
pub const DEFAULT_K_MAX: u32 = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    Normal,
    Sporadic,
    Exotic,
    WeaklyExotic,
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Classification::Normal => "normal",
            Classification::Sporadic => "sporadic",
            Classification::Exotic => "exotic",
            Classification::WeaklyExotic => "weakly_exotic",
        })
    }
}

/// `v_{p,G}`: finite, infinite (certified invisible), or at least `K_max + 1`
/// as far as the scan could tell.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransparencyValuation {
    Finite(u32),
    Infinite,
    Censored(u32),
}

impl TransparencyValuation {
    pub fn finite(&self) -> Option<u32> {
        match self {
            TransparencyValuation::Finite(k) => Some(*k),
            _ => None,
        }
    }

    pub fn is_transparent(&self) -> bool {
        !matches!(self, TransparencyValuation::Finite(0))
    }
}

impl fmt::Display for TransparencyValuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TransparencyValuation::Finite(k) => write!(f, "{k}"),
            TransparencyValuation::Infinite => f.write_str("infinity"),
            TransparencyValuation::Censored(k) => write!(f, ">={}", k + 1),
        }
    }
}

impl Serialize for TransparencyValuation {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            TransparencyValuation::Finite(k) => s.serialize_u32(*k),
            other => s.serialize_str(&other.to_string()),
        }
    }
}

/// Least `K <= k_max` with `G(p^{K+1}) != 1`.
pub fn transparency_valuation(
    g: &MultiplicativeFunction,
    p: u64,
    k_max: u32,
    tol: f64,
) -> Result<TransparencyValuation> {
    if !arith::is_prime(p) {
        return invalid(format!("{p} is not prime"));
    }
    if k_max == 0 {
        return invalid("K_max must be at least 1");
    }
    for k in 0..=k_max {
        if !g.at_prime_power(p, k + 1)?.is_one(tol) {
            return Ok(TransparencyValuation::Finite(k));
        }
    }
    let declared_invisible = g
        .declared_spectra()
        .is_some_and(|d| d.invisible().contains(&p));
    Ok(if declared_invisible {
        TransparencyValuation::Infinite
    } else {
        TransparencyValuation::Censored(k_max)
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumReport {
    pub scan_bound: u64,
    pub exponent_bound: u32,
    pub transparent_primes: BTreeSet<u64>,
    pub invisible_primes: BTreeSet<u64>,
    pub valuations: BTreeMap<u64, TransparencyValuation>,
    /// `None` when the product overflows.
    #[serde(rename = "PG")]
    pub pg: Option<u64>,
    /// `None` for exotic functions, censored valuations or overflow.
    #[serde(rename = "aG")]
    pub ag: Option<u64>,
    pub classification: Classification,
    pub certified: bool,
}

impl SpectrumReport {
    pub fn valuation(&self, p: u64) -> Option<TransparencyValuation> {
        self.valuations.get(&p).copied()
    }

    /// Some invisible prime, the natural choice of `p0`.
    pub fn first_invisible(&self) -> Option<u64> {
        self.invisible_primes.iter().next().copied()
    }

    /// `a_G` as a factorization, when it is defined.
    pub fn ag_factorization(&self) -> Option<Factorization> {
        let pairs: Option<Vec<(u64, u32)>> = self
            .transparent_primes
            .iter()
            .map(|&p| self.valuations.get(&p).and_then(|v| v.finite()).map(|v| (p, v)))
            .collect();
        Factorization::from_pairs(pairs?).ok()
    }
}

/// Scans primes up to `scan_bound` (plus any declared transparent prime
/// beyond it) and classifies.
pub fn spectrum(
    g: &MultiplicativeFunction,
    scan_bound: u64,
    k_max: u32,
    tol: f64,
) -> Result<SpectrumReport> {
    if scan_bound < 2 {
        return invalid("scan bound must be at least 2");
    }
    let declared = g.declared_spectra();
    let mut primes: BTreeSet<u64> = arith::sieve_primes(scan_bound)?.into_iter().collect();
    if let Some(d) = declared {
        primes.extend(d.transparent().iter().copied());
    }

    let mut transparent = BTreeSet::new();
    let mut invisible = BTreeSet::new();
    let mut valuations = BTreeMap::new();
    let mut censored = false;
    for &p in &primes {
        let v = transparency_valuation(g, p, k_max, tol)?;
        if v.is_transparent() {
            transparent.insert(p);
        }
        match v {
            TransparencyValuation::Infinite => {
                invisible.insert(p);
            }
            TransparencyValuation::Censored(_) => {
                censored = true;
                if declared.is_none() {
                    invisible.insert(p);
                }
            }
            TransparencyValuation::Finite(_) => {}
        }
        valuations.insert(p, v);
    }

    if let Some(d) = declared {
        let scanned_f: BTreeSet<u64> = d.transparent().iter().copied().collect();
        if scanned_f != transparent {
            return Err(Error::Internal(format!(
                "{}: declared F(G) = {:?} but the scan found {:?}",
                g.label(),
                d.transparent(),
                transparent
            )));
        }
        if let Some(p) = d
            .invisible()
            .iter()
            .find(|p| valuations.get(p).and_then(|v| v.finite()).is_some())
        {
            return Err(Error::Internal(format!(
                "{}: {p} is declared invisible but has a finite valuation",
                g.label()
            )));
        }
    }

    let classification = if !invisible.is_empty() {
        Classification::Exotic
    } else if !transparent.is_empty() {
        Classification::Sporadic
    } else {
        Classification::Normal
    };
    let pg = transparent
        .iter()
        .try_fold(1u64, |acc, &p| acc.checked_mul(p));
    let ag = if classification == Classification::Exotic || censored {
        None
    } else {
        transparent.iter().try_fold(1u64, |acc, &p| {
            let v = valuations[&p].finite()?;
            p.checked_pow(v).and_then(|pv| acc.checked_mul(pv))
        })
    };
    Ok(SpectrumReport {
        scan_bound,
        exponent_bound: k_max,
        transparent_primes: transparent,
        invisible_primes: invisible,
        valuations,
        pg,
        ag,
        classification,
        certified: declared.is_some() && !censored,
    })
}

/// Bounded check of `G(p0^K r) = G(r)` for `r <= r_bound` coprime to `p0`
/// and `K <= k_bound`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WeakExoticCertificate {
    pub holds: bool,
    pub p0: u64,
    pub r_bound: u64,
    pub k_bound: u32,
    pub checked_pairs: u64,
    /// `(r, K)` of the first violation.
    pub first_failure: Option<(u64, u32)>,
}

pub fn is_weakly_exotic(
    g: &dyn ArithmeticFunction,
    p0: u64,
    r_bound: u64,
    k_bound: u32,
    tol: f64,
) -> Result<WeakExoticCertificate> {
    if !arith::is_prime(p0) {
        return invalid(format!("{p0} is not prime"));
    }
    if r_bound == 0 || k_bound == 0 {
        return invalid("bounds must be at least 1");
    }
    let mut checked = 0;
    for r in (1..=r_bound).filter(|r| r % p0 != 0) {
        let fr = arith::factorize(r)?;
        let base = g.value_at(&fr)?;
        for k in 1..=k_bound {
            let pk = p0
                .checked_pow(k)
                .ok_or_else(|| Error::Resource(format!("{p0}^{k} overflows")))?;
            pk.checked_mul(r)
                .ok_or_else(|| Error::Resource(format!("{p0}^{k}*{r} overflows")))?;
            let mut pairs = fr.factors().to_vec();
            pairs.push((p0, k));
            pairs.sort_unstable();
            let n = Factorization::from_pairs(pairs)?;
            checked += 1;
            if !g.value_at(&n)?.approx_eq(&base, tol) {
                return Ok(WeakExoticCertificate {
                    holds: false,
                    p0,
                    r_bound,
                    k_bound,
                    checked_pairs: checked,
                    first_failure: Some((r, k)),
                });
            }
        }
    }
    Ok(WeakExoticCertificate {
        holds: true,
        p0,
        r_bound,
        k_bound,
        checked_pairs: checked,
        first_failure: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functions::{catalog, CatalogParams, GeneralArithmeticFunction, DEFAULT_ONE_TOL};

    fn mult(name: &str, params: &[&str]) -> MultiplicativeFunction {
        catalog(name, &CatalogParams::parse(params).unwrap())
            .unwrap()
            .as_multiplicative()
            .unwrap()
            .clone()
    }

    #[test]
    fn valuation_examples() {
        let v = |g: &MultiplicativeFunction| transparency_valuation(g, 2, 16, 0.0).unwrap();
        assert_eq!(v(&mult("GH", &[])), TransparencyValuation::Finite(1));
        assert_eq!(v(&mult("GR", &[])), TransparencyValuation::Finite(0));
        assert_eq!(v(&mult("indicator_prime_powers", &[])), TransparencyValuation::Infinite);
        let undeclared = MultiplicativeFunction::exact("ones", |_, _| Some(super::super::rational(1, 1)));
        assert_eq!(v(&undeclared), TransparencyValuation::Censored(16));
    }

    #[test]
    fn spectrum_examples() {
        let r = spectrum(&mult("GR", &[]), 1000, 16, 0.0).unwrap();
        assert!(r.transparent_primes.is_empty());
        assert_eq!(r.classification, Classification::Normal);
        assert_eq!(r.pg, Some(1));
        assert_eq!(r.ag, Some(1));
        assert!(r.certified);

        let r = spectrum(&mult("GH", &[]), 1000, 16, 0.0).unwrap();
        assert_eq!(r.transparent_primes, BTreeSet::from([2]));
        assert!(r.invisible_primes.is_empty());
        assert_eq!(r.classification, Classification::Sporadic);
        assert_eq!((r.pg, r.ag), (Some(2), Some(2)));

        let r = spectrum(&mult("indicator_prime_powers", &[]), 1000, 16, 0.0).unwrap();
        assert_eq!(r.invisible_primes, BTreeSet::from([2]));
        assert_eq!(r.classification, Classification::Exotic);
        assert_eq!(r.ag, None);
    }

    #[test]
    fn trichotomy_matches_catalog_labels() {
        let expect = [
            ("GR", Classification::Normal),
            ("GH", Classification::Sporadic),
            ("indicator_prime_powers", Classification::Exotic),
            ("G0", Classification::Exotic),
            ("prop1", Classification::Normal),
            ("prop2", Classification::Exotic),
            ("lemma7_h", Classification::Normal),
            ("prop5", Classification::Normal),
        ];
        for (name, class) in expect {
            let r = spectrum(&mult(name, &[]), 500, 8, DEFAULT_ONE_TOL).unwrap();
            assert_eq!(r.classification, class, "{name}");
            assert!(r.invisible_primes.is_subset(&r.transparent_primes));
            assert!(r.certified);
        }
        let r = spectrum(&mult("prop5", &["g2=1"]), 500, 8, DEFAULT_ONE_TOL).unwrap();
        assert_eq!(r.classification, Classification::Sporadic);
        assert_eq!((r.pg, r.ag), (Some(3), Some(3)));
    }

    #[test]
    fn serialization_uses_infinity_sentinel() {
        let r = spectrum(&mult("indicator_prime_powers", &["p0=3"]), 10, 4, 0.0).unwrap();
        let json = serde_json::to_value(&r).unwrap();
        assert_eq!(json["valuations"]["3"], "infinity");
        assert_eq!(json["valuations"]["2"], 0);
        assert_eq!(json["invisible_primes"], serde_json::json!([3]));
        assert_eq!(json["PG"], 3);
        assert!(json["aG"].is_null());
        assert_eq!(json["classification"], "exotic");
    }

    #[test]
    fn weakly_exotic_examples() {
        let g2 = GeneralArithmeticFunction::from_multiplicative(mult("indicator_prime_powers", &[]));
        assert!(is_weakly_exotic(&g2, 2, 100, 6, 0.0).unwrap().holds);
        let gr = mult("GR", &[]);
        let cert = is_weakly_exotic(&gr, 2, 100, 6, 0.0).unwrap();
        assert!(!cert.holds);
        assert_eq!(cert.first_failure, Some((1, 1)));
        let sample = catalog("weakly_exotic_sample", &CatalogParams::new()).unwrap();
        let cert = is_weakly_exotic(sample.as_function(), 2, 100, 6, 0.0).unwrap();
        assert!(cert.holds);
        assert_eq!(cert.checked_pairs, 50 * 6);
    }
}
