//! `Σ_{q≤Q} G(q) c_q(a)`, its coprime-restricted variant, and
//! `S(b) = Σ_{(r,b)=1} G(r) μ(r)`.

use super::{accumulate, PartialSumSeries, SumMode, TermSpec};
use crate::arith::{self, ArithTables};
use crate::error::{invalid, Result};
use crate::functions::ArithmeticFunction;
use crate::ramanujan::c_from_factorization;

/// Partial sums of `Σ_{q≤x} G(q) c_q(a)`. `Q` is always a checkpoint.
pub fn expansion_partial_sums(
    tables: &ArithTables,
    g: &dyn ArithmeticFunction,
    a: u64,
    q_max: u64,
    checkpoints: &[u64],
    mode: SumMode,
) -> Result<PartialSumSeries> {
    coprime_expansion_partial_sums(tables, g, a, 1, q_max, checkpoints, mode)
}

/// Partial sums of `Σ_{q≤x, (q,m)=1} G(q) c_q(a)`.
pub fn coprime_expansion_partial_sums(
    tables: &ArithTables,
    g: &dyn ArithmeticFunction,
    a: u64,
    m: u64,
    q_max: u64,
    checkpoints: &[u64],
    mode: SumMode,
) -> Result<PartialSumSeries> {
    if a == 0 || m == 0 {
        return invalid("a and the coprimality modulus must be at least 1");
    }
    let mode = mode.resolve(g, q_max)?;
    let m = arith::radical(m)?;
    let keep = move |q: u64| m == 1 || arith::gcd(q, m) == 1;
    let weight = move |f: &arith::Factorization| c_from_factorization(f, a);
    let spec = TermSpec {
        keep: &keep,
        weight: &weight,
        abs: false,
    };
    let restriction = if m == 1 {
        String::new()
    } else {
        format!(", (q,{m})=1")
    };
    Ok(PartialSumSeries {
        description: format!("sum_{{q<=x{restriction}}} {}(q) c_q({a})", g.label()),
        mode,
        checkpoints: accumulate(tables, g, q_max, checkpoints, mode, &spec)?,
    })
}

/// Partial sums of `Σ_{r≤t, (r,b)=1} G(r) μ(r)`. Only `radical(b)` matters,
/// so the description names the radical.
pub fn restricted_mobius_partial_sums(
    tables: &ArithTables,
    g: &dyn ArithmeticFunction,
    b: u64,
    x: u64,
    checkpoints: &[u64],
    mode: SumMode,
) -> Result<PartialSumSeries> {
    if b == 0 {
        return invalid("b must be at least 1");
    }
    let mode = mode.resolve(g, x)?;
    let rad = arith::radical(b)?;
    let keep = move |r: u64| rad == 1 || arith::gcd(r, rad) == 1;
    let weight = |f: &arith::Factorization| f.mobius() as i64;
    let spec = TermSpec {
        keep: &keep,
        weight: &weight,
        abs: false,
    };
    Ok(PartialSumSeries {
        description: format!("S({rad}) = sum_{{r<=t, (r,{rad})=1}} {}(r) mu(r)", g.label()),
        mode,
        checkpoints: accumulate(tables, g, x, checkpoints, mode, &spec)?,
    })
}

/// Partial sums of `Σ_{q≤x} |G(q) c_q(a)|`.
pub fn absolute_expansion_partial_sums(
    tables: &ArithTables,
    g: &dyn ArithmeticFunction,
    a: u64,
    q_max: u64,
    checkpoints: &[u64],
    mode: SumMode,
) -> Result<PartialSumSeries> {
    if a == 0 {
        return invalid("a must be at least 1");
    }
    let mode = mode.resolve(g, q_max)?;
    let keep = |_: u64| true;
    let weight = move |f: &arith::Factorization| c_from_factorization(f, a);
    let spec = TermSpec {
        keep: &keep,
        weight: &weight,
        abs: true,
    };
    Ok(PartialSumSeries {
        description: format!("sum_{{q<=x}} |{}(q) c_q({a})|", g.label()),
        mode,
        checkpoints: accumulate(tables, g, q_max, checkpoints, mode, &spec)?,
    })
}

/// Partial sums of `Σ_{r≤t, (r,a)=1} |G(r) μ(r)|`.
pub fn absolute_cofactor_partial_sums(
    tables: &ArithTables,
    g: &dyn ArithmeticFunction,
    a: u64,
    x: u64,
    checkpoints: &[u64],
    mode: SumMode,
) -> Result<PartialSumSeries> {
    if a == 0 {
        return invalid("a must be at least 1");
    }
    let mode = mode.resolve(g, x)?;
    let rad = arith::radical(a)?;
    let keep = move |r: u64| rad == 1 || arith::gcd(r, rad) == 1;
    let weight = |f: &arith::Factorization| f.mobius() as i64;
    let spec = TermSpec {
        keep: &keep,
        weight: &weight,
        abs: true,
    };
    Ok(PartialSumSeries {
        description: format!("sum_{{r<=t, (r,{rad})=1}} |{}(r) mu(r)|", g.label()),
        mode,
        checkpoints: accumulate(tables, g, x, checkpoints, mode, &spec)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functions::{catalog, CatalogParams};
    use crate::value::Value;
    use num_bigint::BigInt;
    use num_rational::BigRational;

    fn q(n: i64, d: i64) -> Value {
        Value::Exact(BigRational::new(BigInt::from(n), BigInt::from(d)))
    }

    fn entry(name: &str) -> crate::functions::CatalogEntry {
        catalog(name, &CatalogParams::new()).unwrap()
    }

    #[test]
    fn expansion_examples() {
        let t = ArithTables::new(1000).unwrap();
        let g2 = entry("indicator_prime_powers");
        let s = expansion_partial_sums(&t, g2.as_function(), 1, 4, &[], SumMode::Auto).unwrap();
        assert_eq!(s.final_sum(), q(0, 1));
        let gr = entry("GR");
        let s = expansion_partial_sums(&t, gr.as_function(), 1, 10, &[1, 2], SumMode::Auto).unwrap();
        // Σ_{q≤10} μ(q)/q by direct enumeration
        let oracle = (1..=10u64).fold(q(0, 1), |acc, n| {
            acc.add(&q(crate::arith::mobius(n).unwrap() as i64, n as i64))
        });
        assert_eq!(oracle, q(19, 210));
        assert_eq!(s.final_sum(), oracle);
        assert_eq!(s.checkpoints[0].sum, q(1, 1));
        assert_eq!(s.checkpoints[1].sum, q(1, 2));
        for name in ["GH", "G0", "prop1", "lemma7_h"] {
            let g = entry(name);
            let s = expansion_partial_sums(&t, g.as_function(), 7, 1, &[], SumMode::Auto).unwrap();
            assert!(s.final_sum().is_one(1e-15), "{name}");
        }
    }

    #[test]
    fn restricted_examples() {
        let t = ArithTables::new(1000).unwrap();
        let gr = entry("GR");
        let s = restricted_mobius_partial_sums(&t, gr.as_function(), 1, 10, &[], SumMode::Auto)
            .unwrap();
        // 1 - 1/2 - 1/3 - 1/5 + 1/6 - 1/7 + 1/10
        let oracle = [(1, 1), (-1, 2), (-1, 3), (-1, 5), (1, 6), (-1, 7), (1, 10)]
            .iter()
            .fold(q(0, 1), |acc, &(n, d)| acc.add(&q(n, d)));
        assert_eq!(s.final_sum(), oracle);
        let g2 = entry("indicator_prime_powers");
        let s = restricted_mobius_partial_sums(&t, g2.as_function(), 2, 100, &[], SumMode::Auto)
            .unwrap();
        assert_eq!(s.final_sum(), q(1, 1));
    }

    #[test]
    fn exact_mode_rejects_floating_functions() {
        let t = ArithTables::new(100).unwrap();
        let h = entry("lemma7_h");
        assert!(expansion_partial_sums(&t, h.as_function(), 1, 10, &[], SumMode::Exact).is_err());
    }

    #[test]
    fn truncation_beyond_tables_is_a_resource_error() {
        let t = ArithTables::new(100).unwrap();
        let gr = entry("GR");
        let err = expansion_partial_sums(&t, gr.as_function(), 1, 1000, &[], SumMode::Auto);
        assert!(matches!(err, Err(crate::Error::Resource(_))));
    }
}
