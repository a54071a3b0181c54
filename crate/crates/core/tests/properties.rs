use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Zero};
use proptest::prelude::*;

use ramanujan_core::arith::{self, ArithTables};
use ramanujan_core::expansion::{
    expansion_partial_sums, finite_factor, finite_factor_abel, finite_factor_forms_equal,
    finite_factor_star, restricted_mobius_partial_sums, SumMode,
};
use ramanujan_core::functions::{
    spectrum, ArithmeticFunction, Classification, DeclaredSpectra, MultiplicativeFunction,
    TransparencyValuation,
};
use ramanujan_core::ramanujan::c_kluyver;
use ramanujan_core::value::{SmallRational, Value};

const SMALL_PRIMES: [u64; 6] = [2, 3, 5, 7, 11, 13];
const DEPTH: u32 = 6;

/// How a random rule behaves at one small prime.
#[derive(Debug, Clone)]
enum Shape {
    /// `G(p^k) = 1` for `k <= v`, then arbitrary values.
    Transparent(u32, Vec<SmallRational>),
    /// `G(p^k) = 1` for every `k`.
    Invisible,
}

fn non_one() -> impl Strategy<Value = SmallRational> {
    (-6i128..=6, 1i128..=7)
        .prop_map(|(n, d)| Ratio::new(n, d))
        .prop_filter("must differ from 1", |r| !r.is_one())
}

fn any_value() -> impl Strategy<Value = SmallRational> {
    (-6i128..=6, 1i128..=7).prop_map(|(n, d)| Ratio::new(n, d))
}

fn shape(allow_invisible: bool) -> impl Strategy<Value = Shape> {
    let transparent = (0u32..=3, non_one(), prop::collection::vec(any_value(), DEPTH as usize))
        .prop_map(|(v, first, mut rest)| {
            rest[0] = first;
            Shape::Transparent(v, rest)
        });
    if allow_invisible {
        prop_oneof![4 => transparent, 1 => Just(Shape::Invisible)].boxed()
    } else {
        transparent.boxed()
    }
}

fn rule_from(shapes: Vec<Shape>, declare: bool) -> MultiplicativeFunction {
    let table: BTreeMap<u64, Shape> = SMALL_PRIMES.iter().copied().zip(shapes).collect();
    let t = Arc::new(table.clone());
    let g = MultiplicativeFunction::exact("random", move |p, k| {
        match t.get(&p) {
            Some(Shape::Invisible) => Some(Ratio::one()),
            Some(Shape::Transparent(v, vals)) => {
                if k <= *v {
                    Some(Ratio::one())
                } else {
                    Some(vals[((k - v - 1) % DEPTH) as usize])
                }
            }
            // large primes: G(p^k) = p^{-k}, never 1
            None => Some(Ratio::new(1, (p as i128).checked_pow(k)?)),
        }
    });
    if !declare {
        return g;
    }
    let transparent = table
        .iter()
        .filter(|(_, s)| !matches!(s, Shape::Transparent(0, _)))
        .map(|(&p, _)| p);
    let invisible = table
        .iter()
        .filter(|(_, s)| matches!(s, Shape::Invisible))
        .map(|(&p, _)| p);
    g.with_declared_spectra(DeclaredSpectra::new(transparent, invisible).unwrap())
}

fn random_rule(allow_invisible: bool) -> impl Strategy<Value = (Vec<Shape>, MultiplicativeFunction)> {
    prop::collection::vec(shape(allow_invisible), SMALL_PRIMES.len())
        .prop_map(|shapes| (shapes.clone(), rule_from(shapes, true)))
}

fn brute(g: &dyn ArithmeticFunction, n: u64) -> BigRational {
    g.eval(n).unwrap().as_exact().unwrap().clone()
}

fn to_big(v: &Value) -> BigRational {
    v.as_exact().unwrap().clone()
}

/// Term-by-term local factor with the divisor-sum Ramanujan sum.
fn local_oracle(g: &MultiplicativeFunction, p: u64, a: u64) -> BigRational {
    let v = arith::valuation(p, a).unwrap();
    (0..=v + 1).fold(BigRational::zero(), |acc, k| {
        let c = c_kluyver(p.pow(k), a).unwrap();
        acc + to_big(&g.at_prime_power(p, k).unwrap()) * BigRational::from_integer(BigInt::from(c))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn invisible_primes_are_transparent((shapes, g) in random_rule(true), declare in any::<bool>()) {
        let g = if declare { g } else { rule_from(shapes, false) };
        let report = spectrum(&g, 50, 8, 0.0).unwrap();
        prop_assert!(report.invisible_primes.is_subset(&report.transparent_primes));
        for (&p, v) in &report.valuations {
            let transparent = !matches!(v, TransparencyValuation::Finite(0));
            prop_assert_eq!(transparent, report.transparent_primes.contains(&p));
        }
        let expected = if !report.invisible_primes.is_empty() {
            Classification::Exotic
        } else if !report.transparent_primes.is_empty() {
            Classification::Sporadic
        } else {
            Classification::Normal
        };
        prop_assert_eq!(report.classification, expected);
        prop_assert_eq!(report.certified, declare);
    }

    #[test]
    fn valuations_match_the_rule((shapes, g) in random_rule(false)) {
        let report = spectrum(&g, 50, 8, 0.0).unwrap();
        for (&p, s) in SMALL_PRIMES.iter().zip(&shapes) {
            let Shape::Transparent(v, _) = s else { unreachable!() };
            prop_assert_eq!(report.valuation(p), Some(TransparencyValuation::Finite(*v)));
        }
        let ag = report.ag.unwrap();
        for &p in &SMALL_PRIMES {
            let v = report.valuation(p).unwrap().finite().unwrap();
            prop_assert_eq!(arith::valuation(p, ag).unwrap(), v);
        }
    }

    #[test]
    fn abel_form_equals_the_finite_factor((_, g) in random_rule(true), a in 1u64..=500) {
        prop_assert!(finite_factor_forms_equal(&g, a, 0.0).unwrap());
        let fa = arith::factorize(a).unwrap();
        let oracle = fa
            .primes()
            .fold(BigRational::one(), |acc, p| acc * local_oracle(&g, p, a));
        prop_assert_eq!(to_big(&finite_factor(&g, a).unwrap()), oracle.clone());
        prop_assert_eq!(to_big(&finite_factor_abel(&g, a).unwrap()), oracle);
    }

    #[test]
    fn star_form_is_the_finite_factor_at_ag((_, g) in random_rule(false)) {
        let report = spectrum(&g, 50, 8, 0.0).unwrap();
        let ag = report.ag.unwrap();
        prop_assert_eq!(finite_factor_star(&g, &report).unwrap(), finite_factor(&g, ag).unwrap());
    }

    #[test]
    fn checkpoints_are_recomputable(
        (_, g) in random_rule(true),
        a in 1u64..=60,
        x in 1u64..=400,
        mut cps in prop::collection::vec(1u64..=400, 0..8),
    ) {
        let tables = ArithTables::new(400).unwrap();
        cps.retain(|&c| c <= x);
        let s = expansion_partial_sums(&tables, &g, a, x, &cps, SumMode::Exact).unwrap();
        prop_assert!(s.checkpoints.windows(2).all(|w| w[0].x < w[1].x));
        prop_assert_eq!(s.checkpoints.last().unwrap().x, x);
        let mut prev = (0u64, BigRational::zero());
        for cp in &s.checkpoints {
            let delta = (prev.0 + 1..=cp.x).fold(BigRational::zero(), |acc, q| {
                acc + brute(&g, q) * BigRational::from_integer(BigInt::from(c_kluyver(q, a).unwrap()))
            });
            let here = to_big(&cp.sum);
            prop_assert_eq!(&here - &prev.1, delta);
            prev = (cp.x, here);
        }
    }

    #[test]
    fn restricted_series_depend_only_on_the_radical(
        (_, g) in random_rule(true),
        b in 1u64..=2000,
        x in 1u64..=600,
    ) {
        let tables = ArithTables::new(600).unwrap();
        let cps: Vec<u64> = (1..=x).step_by(7).collect();
        let rad = arith::radical(b).unwrap();
        let s = restricted_mobius_partial_sums(&tables, &g, b, x, &cps, SumMode::Exact).unwrap();
        let t = restricted_mobius_partial_sums(&tables, &g, rad, x, &cps, SumMode::Exact).unwrap();
        prop_assert_eq!(&s.checkpoints, &t.checkpoints);
        let oracle = (1..=x)
            .filter(|&r| arith::gcd(r, b) == 1)
            .fold(BigRational::zero(), |acc, r| {
                let mu = arith::mobius(r).unwrap() as i64;
                acc + brute(&g, r) * BigRational::from_integer(BigInt::from(mu))
            });
        prop_assert_eq!(to_big(&s.final_sum()), oracle);
    }
}
