//! Ramanujan sums `c_q(a)`.
//!
//! Three independent routes are provided: the root-of-unity sum
//! ([`c_direct`]), Kluyver's divisor sum ([`c_kluyver`]) and the
//! von Sterneck–Hölder closed form ([`c_holder`]). Only the last one, and its
//! prime-power factorized variant [`c_from_factorization`], are used inside
//! summation loops; the other two are oracles.

use std::f64::consts::TAU;

use crate::arith::{self, ArithTables, Factorization};
use crate::error::{invalid, Error, Result};

const ROUNDING_TOL: f64 = 1e-6;

fn check_args(q: u64, a: u64) -> Result<()> {
    if q == 0 || a == 0 {
        return invalid(format!("c_q(a) needs q, a >= 1 (got q={q}, a={a})"));
    }
    Ok(())
}

/// Sums `e^{2πiah/q}` over `1 <= h <= q` coprime to `q` and rounds.
///
/// Fails with [`Error::FormulaInconsistency`] when the imaginary part does not
/// vanish or the real part is not an integer, both to within `1e-6`.
pub fn c_direct(q: u64, a: u64) -> Result<i64> {
    check_args(q, a)?;
    let (mut re, mut im) = (0.0f64, 0.0f64);
    let a_mod = (a % q) as u128;
    for h in 1..=q {
        if arith::gcd(h, q) != 1 {
            continue;
        }
        // reduce a*h mod q before scaling so the angle stays accurate
        let r = (a_mod * h as u128 % q as u128) as f64;
        let theta = TAU * r / q as f64;
        re += theta.cos();
        im += theta.sin();
    }
    let rounded = re.round();
    if im.abs() > ROUNDING_TOL || (re - rounded).abs() > ROUNDING_TOL {
        return Err(Error::FormulaInconsistency {
            q,
            a,
            detail: format!("sum = {re} + {im}i is not an integer"),
        });
    }
    Ok(rounded as i64)
}

/// `Σ_{d | (q,a)} μ(q/d) d`.
pub fn c_kluyver(q: u64, a: u64) -> Result<i64> {
    check_args(q, a)?;
    let g = arith::gcd(q, a);
    let mut total = 0i64;
    let mut d = 1;
    while d * d <= g {
        if g % d == 0 {
            total += arith::mobius(q / d)? as i64 * d as i64;
            let e = g / d;
            if e != d {
                total += arith::mobius(q / e)? as i64 * e as i64;
            }
        }
        d += 1;
    }
    Ok(total)
}

/// `μ(q/(q,a)) φ(q) / φ(q/(q,a))`.
pub fn c_holder(q: u64, a: u64) -> Result<i64> {
    check_args(q, a)?;
    let g = arith::gcd(q, a);
    let m = q / g;
    holder_combine(q, a, arith::mobius(m)?, arith::euler_phi(q)?, arith::euler_phi(m)?)
}

/// [`c_holder`] with μ and φ read from sieve tables.
pub fn c_holder_with(tables: &ArithTables, q: u64, a: u64) -> Result<i64> {
    check_args(q, a)?;
    let m = q / arith::gcd(q, a);
    let mu = tables.mobius(m)?;
    if mu == 0 {
        return Ok(0);
    }
    holder_combine(q, a, mu, tables.euler_phi(q)?, tables.euler_phi(m)?)
}

fn holder_combine(q: u64, a: u64, mu: i8, phi_q: u64, phi_m: u64) -> Result<i64> {
    if mu == 0 {
        return Ok(0);
    }
    if phi_q % phi_m != 0 {
        return Err(Error::Internal(format!(
            "phi({q}) = {phi_q} not divisible by phi(q/(q,a)) = {phi_m} (a = {a})"
        )));
    }
    Ok(mu as i64 * (phi_q / phi_m) as i64)
}

/// `c_{p^K}(a)` in closed form: `φ(p^K)` for `K <= v`, `-p^v` for `K = v + 1`
/// and zero beyond, where `v = v_p(a)`.
pub fn c_prime_power(p: u64, k: u32, a: u64) -> Result<i64> {
    let v = arith::valuation(p, a)?;
    Ok(c_prime_power_v(p, k, v))
}

/// Same as [`c_prime_power`] with `v_p(a)` already known.
pub fn c_prime_power_v(p: u64, k: u32, v: u32) -> i64 {
    if k == 0 {
        1
    } else if k <= v {
        ((p - 1) * p.pow(k - 1)) as i64
    } else if k == v + 1 {
        -(p.pow(v) as i64)
    } else {
        0
    }
}

/// `Σ_{K=0}^{v_p(a)+1} c_{p^K}(a)`, which always vanishes.
pub fn prime_power_column_sum(p: u64, a: u64) -> Result<i64> {
    let v = arith::valuation(p, a)?;
    Ok((0..=v + 1).map(|k| c_prime_power_v(p, k, v)).sum())
}

/// `c_q(a)` as a product of prime-power values over a known factorization of
/// `q`. This is the loop kernel: no gcd, no table lookups.
pub fn c_from_factorization(q: &Factorization, a: u64) -> i64 {
    let mut out = 1i64;
    for &(p, k) in q.factors() {
        let mut v = 0;
        let mut rest = a;
        while v < k && rest % p == 0 {
            rest /= p;
            v += 1;
        }
        // only whether v_p(a) reaches k - 1 or k matters
        let c = c_prime_power_v(p, k, v);
        if c == 0 {
            return 0;
        }
        out *= c;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn direct_examples() {
        for a in 1..20 {
            assert_eq!(c_direct(1, a).unwrap(), 1);
        }
        assert_eq!(c_direct(2, 1).unwrap(), -1);
        assert_eq!(c_direct(6, 3).unwrap(), -2);
        assert!(c_direct(0, 3).is_err());
        assert!(c_direct(3, 0).is_err());
    }

    #[test]
    fn kluyver_examples() {
        for q in 1..60 {
            for a in 1..60 {
                if arith::gcd(q, a) == 1 {
                    assert_eq!(c_kluyver(q, a).unwrap(), arith::mobius(q).unwrap() as i64);
                }
            }
        }
        assert_eq!(c_kluyver(4, 2).unwrap(), -2);
        assert_eq!(c_kluyver(12, 12).unwrap(), 4);
        assert_eq!(c_direct(12, 12).unwrap(), 4);
    }

    #[test]
    fn holder_examples() {
        for p in [2u64, 3, 5, 7, 11, 13] {
            for a in 1..40 {
                let expect = if a % p == 0 { p as i64 - 1 } else { -1 };
                assert_eq!(c_holder(p, a).unwrap(), expect);
                assert_eq!(c_direct(p, a).unwrap(), expect);
            }
        }
        assert_eq!(c_holder(9, 3).unwrap(), -3);
        assert_eq!(c_direct(9, 3).unwrap(), -3);
    }

    #[test]
    fn prime_power_examples() {
        assert_eq!(c_prime_power(2, 0, 7).unwrap(), 1);
        assert_eq!(c_prime_power(2, 3, 4).unwrap(), -4);
        assert_eq!(c_direct(8, 4).unwrap(), -4);
        assert_eq!(c_prime_power(3, 5, 9).unwrap(), 0);
        assert!(c_prime_power(4, 1, 2).is_err());
    }

    #[test]
    fn column_sum_examples() {
        assert_eq!(prime_power_column_sum(2, 1).unwrap(), 0);
        assert_eq!(prime_power_column_sum(3, 9).unwrap(), 0);
        assert_eq!(prime_power_column_sum(5, 7).unwrap(), 0);
    }

    #[test]
    fn prime_power_closed_form_matches_holder() {
        for p in [2u64, 3, 5, 7] {
            for k in 0..6 {
                for a in 1..300 {
                    let q = p.pow(k);
                    assert_eq!(c_prime_power(p, k, a).unwrap(), c_holder(q, a).unwrap());
                }
            }
        }
    }

    #[test]
    fn factorized_kernel_matches_holder() {
        let t = ArithTables::new(5000).unwrap();
        for q in 1..=1000u64 {
            let f = t.factorize(q).unwrap();
            for a in 1..=120u64 {
                let h = c_holder(q, a).unwrap();
                assert_eq!(c_from_factorization(&f, a), h, "q={q} a={a}");
                assert_eq!(c_holder_with(&t, q, a).unwrap(), h);
            }
        }
    }

    #[test]
    fn multiplicative_in_q_and_bounded_below_by_mu_squared() {
        for q1 in 1..=200u64 {
            for q2 in 1..=200 / q1 {
                if arith::gcd(q1, q2) != 1 {
                    continue;
                }
                for a in 1..=100 {
                    assert_eq!(
                        c_holder(q1 * q2, a).unwrap(),
                        c_holder(q1, a).unwrap() * c_holder(q2, a).unwrap()
                    );
                }
            }
        }
        for q in 1..=200u64 {
            let mu2 = arith::mobius(q).unwrap().abs() as i64;
            for a in 1..=200 {
                assert!(c_holder(q, a).unwrap().abs() >= mu2);
            }
        }
    }

    #[test]
    fn column_sums_vanish_for_small_primes() {
        for p in arith::sieve_primes(50).unwrap() {
            for a in 1..=200 {
                assert_eq!(prime_power_column_sum(p, a).unwrap(), 0);
            }
        }
    }
}
