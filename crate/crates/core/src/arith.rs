//! Elementary kernels: sieves, factorization, Möbius, totient, radical,
//! p-adic valuation.
//!
//! Free functions work on any `u64` by trial division. [`ArithTables`] holds
//! linear-sieve tables (smallest prime factor, μ, φ) for the summation loops,
//! where every term needs a factorization.

use std::sync::OnceLock;

use serde::Serialize;

use crate::error::{invalid, Error, Result};

/// Largest table the sieves will allocate unless a caller asks for more.
pub const DEFAULT_SIEVE_BUDGET: u64 = 200_000_000;

/// Primes below 2^16, enough to trial-divide anything below 2^32.
fn small_primes() -> &'static [u64] {
    static PRIMES: OnceLock<Vec<u64>> = OnceLock::new();
    PRIMES.get_or_init(|| eratosthenes(1 << 16))
}

fn eratosthenes(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut primes = Vec::new();
    for i in 2..=n {
        if composite[i] {
            continue;
        }
        primes.push(i as u64);
        let mut j = i.saturating_mul(i);
        while j <= n {
            composite[j] = true;
            j += i;
        }
    }
    primes
}

/// All primes in `[2, limit]`, ascending.
pub fn sieve_primes(limit: u64) -> Result<Vec<u64>> {
    sieve_primes_with_budget(limit, DEFAULT_SIEVE_BUDGET)
}

pub fn sieve_primes_with_budget(limit: u64, budget: u64) -> Result<Vec<u64>> {
    if limit > budget {
        return Err(Error::Resource(format!(
            "sieve limit {limit} exceeds budget {budget}"
        )));
    }
    Ok(eratosthenes(limit))
}

pub fn gcd(a: u64, b: u64) -> u64 {
    num_integer::gcd(a, b)
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in small_primes() {
        if p * p > n {
            return true;
        }
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = (1u64 << 16) + 1;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// A positive integer together with its prime factorization.
///
/// Primes are strictly increasing and every exponent is at least one; `1` has
/// no factors.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Factorization {
    value: u64,
    factors: Vec<(u64, u32)>,
}

impl Factorization {
    pub fn one() -> Self {
        Factorization {
            value: 1,
            factors: Vec::new(),
        }
    }

    /// Builds a factorization from `(prime, exponent)` pairs, checking every
    /// invariant.
    pub fn from_pairs(mut factors: Vec<(u64, u32)>) -> Result<Self> {
        factors.sort_unstable();
        let mut value: u64 = 1;
        for (i, &(p, e)) in factors.iter().enumerate() {
            if e == 0 {
                return invalid(format!("zero exponent for prime {p}"));
            }
            if !is_prime(p) {
                return invalid(format!("{p} is not prime"));
            }
            if i > 0 && factors[i - 1].0 == p {
                return invalid(format!("prime {p} listed twice"));
            }
            let pe = p
                .checked_pow(e)
                .ok_or_else(|| Error::Resource(format!("{p}^{e} overflows u64")))?;
            value = value
                .checked_mul(pe)
                .ok_or_else(|| Error::Resource("factorization value overflows u64".into()))?;
        }
        Ok(Factorization { value, factors })
    }

    // Trusted constructor for the sieve paths.
    fn from_raw(value: u64, factors: Vec<(u64, u32)>) -> Self {
        Factorization { value, factors }
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|&(p, _)| p)
    }

    pub fn is_squarefree(&self) -> bool {
        self.factors.iter().all(|&(_, e)| e == 1)
    }

    pub fn radical(&self) -> u64 {
        self.primes().product()
    }

    pub fn valuation(&self, p: u64) -> u32 {
        self.factors
            .iter()
            .find(|&&(q, _)| q == p)
            .map_or(0, |&(_, e)| e)
    }

    pub fn mobius(&self) -> i8 {
        if !self.is_squarefree() {
            0
        } else if self.factors.len() % 2 == 0 {
            1
        } else {
            -1
        }
    }

    pub fn euler_phi(&self) -> u64 {
        self.factors
            .iter()
            .map(|&(p, e)| (p - 1) * p.pow(e - 1))
            .product()
    }

    /// True when no prime of `self` divides `m`.
    pub fn coprime_to(&self, m: u64) -> bool {
        self.primes().all(|p| m % p != 0)
    }

    /// Multiplies the factorization back out; used to check the invariant.
    pub fn multiply_back(&self) -> u64 {
        self.factors.iter().map(|&(p, e)| p.pow(e)).product()
    }
}

/// Trial division against the cached prime list, then odd candidates.
pub fn factorize(n: u64) -> Result<Factorization> {
    if n == 0 {
        return invalid("cannot factorize 0");
    }
    let mut rest = n;
    let mut factors = Vec::new();
    let mut push = |rest: &mut u64, p: u64| {
        let mut e = 0;
        while *rest % p == 0 {
            *rest /= p;
            e += 1;
        }
        if e > 0 {
            factors.push((p, e));
        }
    };
    for &p in small_primes() {
        if p * p > rest {
            break;
        }
        push(&mut rest, p);
    }
    let mut d = (1u64 << 16) + 1;
    while rest > 1 && d.saturating_mul(d) <= rest {
        push(&mut rest, d);
        d += 2;
    }
    if rest > 1 {
        factors.push((rest, 1));
    }
    Ok(Factorization::from_raw(n, factors))
}

pub fn mobius(n: u64) -> Result<i8> {
    Ok(factorize(n)?.mobius())
}

pub fn euler_phi(n: u64) -> Result<u64> {
    Ok(factorize(n)?.euler_phi())
}

/// Squarefree kernel; `radical(1) == 1`.
pub fn radical(a: u64) -> Result<u64> {
    Ok(factorize(a)?.radical())
}

/// Largest `k` with `p^k | a`.
pub fn valuation(p: u64, a: u64) -> Result<u32> {
    if !is_prime(p) {
        return invalid(format!("{p} is not prime"));
    }
    if a == 0 {
        return invalid("valuation of 0 is unbounded");
    }
    let mut k = 0;
    let mut rest = a;
    while rest % p == 0 {
        rest /= p;
        k += 1;
    }
    Ok(k)
}

/// Linear-sieve tables up to a fixed limit. Immutable once built, so one
/// instance can be shared across worker threads.
#[derive(Debug, Clone)]
pub struct ArithTables {
    limit: u64,
    spf: Vec<u32>,
    mu: Vec<i8>,
    phi: Vec<u32>,
    primes: Vec<u64>,
}

impl ArithTables {
    pub fn new(limit: u64) -> Result<Self> {
        Self::with_budget(limit, DEFAULT_SIEVE_BUDGET)
    }

    pub fn with_budget(limit: u64, budget: u64) -> Result<Self> {
        if limit > budget {
            return Err(Error::Resource(format!(
                "table limit {limit} exceeds budget {budget}"
            )));
        }
        if limit > u32::MAX as u64 {
            return Err(Error::Resource(format!("table limit {limit} exceeds u32 range")));
        }
        let n = limit.max(1) as usize;
        let mut spf = vec![0u32; n + 1];
        let mut mu = vec![0i8; n + 1];
        let mut phi = vec![0u32; n + 1];
        let mut primes: Vec<u64> = Vec::new();
        mu[1] = 1;
        phi[1] = 1;
        for i in 2..=n {
            if spf[i] == 0 {
                spf[i] = i as u32;
                mu[i] = -1;
                phi[i] = (i - 1) as u32;
                primes.push(i as u64);
            }
            let si = spf[i] as u64;
            for &p in &primes {
                if p > si || (i as u64) * p > n as u64 {
                    break;
                }
                let j = i * p as usize;
                spf[j] = p as u32;
                if p == si {
                    mu[j] = 0;
                    phi[j] = phi[i] * p as u32;
                } else {
                    mu[j] = -mu[i];
                    phi[j] = phi[i] * (p as u32 - 1);
                }
            }
        }
        Ok(ArithTables {
            limit: limit.max(1),
            spf,
            mu,
            phi,
            primes,
        })
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn factorize(&self, n: u64) -> Result<Factorization> {
        if n == 0 {
            return invalid("cannot factorize 0");
        }
        if n > self.limit {
            return factorize(n);
        }
        let mut rest = n as usize;
        let mut factors: Vec<(u64, u32)> = Vec::with_capacity(8);
        while rest > 1 {
            let p = self.spf[rest] as usize;
            let mut e = 0;
            while rest % p == 0 {
                rest /= p;
                e += 1;
            }
            factors.push((p as u64, e));
        }
        Ok(Factorization::from_raw(n, factors))
    }

    pub fn mobius(&self, n: u64) -> Result<i8> {
        match n {
            0 => invalid("mobius(0) is undefined"),
            n if n <= self.limit => Ok(self.mu[n as usize]),
            n => mobius(n),
        }
    }

    pub fn euler_phi(&self, n: u64) -> Result<u64> {
        match n {
            0 => invalid("phi(0) is undefined"),
            n if n <= self.limit => Ok(self.phi[n as usize] as u64),
            n => euler_phi(n),
        }
    }

    pub fn is_prime(&self, n: u64) -> bool {
        if n <= self.limit {
            n >= 2 && self.spf[n as usize] as u64 == n
        } else {
            is_prime(n)
        }
    }
}
