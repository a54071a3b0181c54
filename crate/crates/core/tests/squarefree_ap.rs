use num_complex::Complex64;

use ramanujan_core::functions::{catalog, CatalogParams};
use ramanujan_core::squarefree::{
    count_squarefree_in_ap, hooley_constant, lemma6_ratio_sweep, lemma6_weighted_sum, lemma7_demo,
    lemma7_h_value, Lemma7Options,
};

/// Largest `|computed - predicted| / y^{1/2-σ}` seen over the sweep below was
/// 0.099 (m = 4, r = 3, s = 0.6, y = 100); twice that is the regression bound.
const LEMMA6_RATIO_BOUND: f64 = 0.2;

fn is_squarefree(n: u64) -> bool {
    (2..).take_while(|d| d * d <= n).all(|d| n % (d * d) != 0)
}

#[test]
fn densities_approach_hooley_constants() {
    let x = 1_000_000;
    for (m, r) in [(1, 1), (2, 1), (4, 1), (4, 3)] {
        let density = count_squarefree_in_ap(x, m, r).unwrap() as f64 / x as f64;
        let c = hooley_constant(m).unwrap();
        assert!((density - c).abs() / c < 0.01, "m={m} r={r}: {density} vs {c}");
    }
    // the class 2 mod 4: all squarefree numbers minus the odd ones
    let even = count_squarefree_in_ap(x, 1, 1).unwrap() - count_squarefree_in_ap(x, 2, 1).unwrap();
    let c = hooley_constant(1).unwrap() - hooley_constant(2).unwrap();
    assert!((c - hooley_constant(4).unwrap()).abs() < 1e-15);
    assert!((even as f64 / x as f64 - c).abs() / c < 0.01);
}

#[test]
fn lemma6_ratio_stays_bounded() {
    let ys = [100u64, 300, 1000, 3000, 10_000, 30_000, 100_000, 300_000];
    for s in [0.6, 0.75, 0.9] {
        for (m, r) in [(1, 1), (2, 1), (3, 2), (4, 1), (4, 3), (5, 2)] {
            let sweep = lemma6_ratio_sweep(Complex64::new(s, 0.0), m, r, &ys, 1_000_000).unwrap();
            for p in sweep {
                assert!(p.ratio < LEMMA6_RATIO_BOUND, "s={s} m={m} r={r} y={}: {}", p.y, p.ratio);
            }
        }
    }
}

#[test]
fn lemma6_unrestricted_sum_from_zero() {
    let s = Complex64::new(0.6, 0.0);
    let w = lemma6_weighted_sum(s, 1, 1, 0, 10_000).unwrap();
    let oracle: f64 = (1..=10_000u64)
        .filter(|&q| is_squarefree(q))
        .map(|q| (q as f64).powf(-0.6))
        .sum();
    assert!((w.computed.re - oracle).abs() < 1e-9);
    let main = hooley_constant(1).unwrap() * 10_000f64.powf(0.4) / 0.4;
    assert!((w.predicted.re - main).abs() < 1e-9);
    // the main term captures the sum up to O(1)
    assert!((w.computed.re - main).abs() / main < 0.02);
}

#[test]
fn h_is_multiplicative_and_supported_on_squarefrees() {
    let s = Complex64::new(0.6, 0.0);
    let h = catalog("lemma7_h", &CatalogParams::parse(["s=0.6"]).unwrap()).unwrap();
    for q in 1..=10_000u64 {
        let sf = is_squarefree(q);
        let direct = lemma7_h_value(s, q, sf);
        let via_rule = h.as_function().eval(q).unwrap().to_complex();
        assert!((direct - via_rule).norm() < 1e-12, "q={q}");
        if q % 4 == 0 {
            assert_eq!(direct, Complex64::new(0.0, 0.0));
        }
    }
}

#[test]
fn h_at_twice_an_odd_squarefree() {
    let s = Complex64::new(0.6, 0.0);
    let factor = -Complex64::new(2.0, 0.0).powc(Complex64::new(1.0, 0.0) - s);
    for r in (1..=10_000u64).step_by(2).filter(|&r| is_squarefree(r)) {
        let lhs = lemma7_h_value(s, 2 * r, true);
        let rhs = factor * lemma7_h_value(s, r, true);
        assert!((lhs - rhs).norm() < 1e-12 * rhs.norm().max(1.0), "r={r}");
    }
}

#[test]
fn lemma7_full_series_settles_while_odd_part_grows() {
    let d = lemma7_demo(Complex64::new(0.6, 0.0), 1_000_000, &[], &Lemma7Options::default()).unwrap();
    assert!(d.window_sums.iter().all(|w| w.y >= 100_000));
    assert!(d.full_windows_shrink, "{:?}", d.window_sums);
    assert!(d.odd_verdict.diverges());
    assert!(d.odd.final_sum().norm() > 10.0);
    let e = d.odd_verdict.evidence.growth_exponent.unwrap();
    assert!((e - 0.4).abs() < 0.1, "exponent {e}");
}
