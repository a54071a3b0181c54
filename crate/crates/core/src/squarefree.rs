//! Squarefree numbers in arithmetic progressions, the density `c(m)`, the
//! weighted sums `Σ μ²(q) q^{-s}` over a progression, and the series
//! `h(q) = ±μ²(q) q^{-s}` whose sum converges while its odd part diverges.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::arith::{self, DEFAULT_SIEVE_BUDGET};
use crate::error::{invalid, Error, Result};
use crate::expansion::convergence::{detect_convergence_with, ConvergenceVerdict, DivergenceRule};
use crate::expansion::{default_checkpoints, Checkpoint, PartialSumSeries, DEFAULT_WINDOW};
use crate::functions::Exactness;
use crate::value::{serialize_complex, CompensatedSum, Value};

/// `flags[q]` is true iff `q` is squarefree; `flags[0]` is false.
pub fn squarefree_flags(x: u64) -> Result<Vec<bool>> {
    if x > DEFAULT_SIEVE_BUDGET {
        return Err(Error::Resource(format!(
            "squarefree sieve to {x} exceeds the budget {DEFAULT_SIEVE_BUDGET}"
        )));
    }
    let n = x as usize;
    let mut flags = vec![true; n + 1];
    flags[0] = false;
    let mut d = 2usize;
    while d * d <= n {
        let sq = d * d;
        let mut k = sq;
        while k <= n {
            flags[k] = false;
            k += sq;
        }
        d += 1;
    }
    Ok(flags)
}

fn check_progression(m: u64, r: u64) -> Result<()> {
    if m == 0 {
        return invalid("modulus must be at least 1");
    }
    if arith::gcd(r % m, m) != 1 && m != 1 {
        return invalid(format!("gcd({r}, {m}) != 1"));
    }
    Ok(())
}

/// Squarefree `q <= x` with `q ≡ r (mod m)`.
pub fn count_squarefree_in_ap(x: u64, m: u64, r: u64) -> Result<u64> {
    check_progression(m, r)?;
    if x == 0 {
        return invalid("x must be at least 1");
    }
    let flags = squarefree_flags(x)?;
    let start = if r % m == 0 { m } else { r % m };
    Ok((start..=x)
        .step_by(m as usize)
        .filter(|&q| flags[q as usize])
        .count() as u64)
}

/// `c(m) = (1/m)(6/π²) Π_{p|m} (1 - 1/p²)^{-1}`.
pub fn hooley_constant(m: u64) -> Result<f64> {
    let f = arith::factorize(m)?;
    let euler: f64 = f
        .primes()
        .map(|p| 1.0 / (1.0 - 1.0 / (p as f64 * p as f64)))
        .product();
    Ok(6.0 / (PI * PI) / m as f64 * euler)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WeightedSum {
    #[serde(serialize_with = "serialize_complex")]
    pub computed: Complex64,
    /// `c(m) (x^{1-s} - y^{1-s}) / (1-s)`.
    #[serde(serialize_with = "serialize_complex")]
    pub predicted: Complex64,
}

impl WeightedSum {
    pub fn error(&self) -> f64 {
        (self.computed - self.predicted).norm()
    }
}

fn cpow(q: u64, e: Complex64) -> Complex64 {
    Complex64::new(q as f64, 0.0).powc(e)
}

fn predicted_main_term(s: Complex64, m: u64, y: u64, x: u64) -> Result<Complex64> {
    let one = Complex64::new(1.0, 0.0);
    let e = one - s;
    let y_term = if y == 0 { Complex64::new(0.0, 0.0) } else { cpow(y, e) };
    Ok(hooley_constant(m)? * (cpow(x, e) - y_term) / e)
}

fn check_s(s: Complex64) -> Result<()> {
    if s == Complex64::new(1.0, 0.0) {
        return invalid("s = 1 is excluded");
    }
    if !(s.re > 0.5) {
        return invalid("needs Re s > 1/2");
    }
    Ok(())
}

/// `Σ_{y<q≤x, q≡r (m)} μ²(q) q^{-s}` by enumeration, with its main term.
pub fn lemma6_weighted_sum(s: Complex64, m: u64, r: u64, y: u64, x: u64) -> Result<WeightedSum> {
    check_s(s)?;
    check_progression(m, r)?;
    if y > x {
        return invalid("needs y <= x");
    }
    let flags = squarefree_flags(x)?;
    Ok(WeightedSum {
        computed: progression_sum(&flags, s, m, r, y, x),
        predicted: predicted_main_term(s, m, y, x)?,
    })
}

fn progression_sum(flags: &[bool], s: Complex64, m: u64, r: u64, y: u64, x: u64) -> Complex64 {
    let mut acc = CompensatedSum::new();
    let r = r % m;
    // first q > y in the class
    let first = y + 1 + (r + m - (y + 1) % m) % m;
    let mut q = first;
    while q <= x {
        if flags[q as usize] {
            acc.add(cpow(q, -s));
        }
        q += m;
    }
    acc.value()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RatioPoint {
    pub y: u64,
    pub error: f64,
    /// `error / y^{1/2 - Re s}`.
    pub ratio: f64,
}

/// `|computed - predicted| / y^{1/2-σ}` across `ys`, all with the same `x`.
pub fn lemma6_ratio_sweep(s: Complex64, m: u64, r: u64, ys: &[u64], x: u64) -> Result<Vec<RatioPoint>> {
    check_s(s)?;
    check_progression(m, r)?;
    if ys.iter().any(|&y| y == 0 || y >= x) {
        return invalid("each y must lie in [1, x)");
    }
    let flags = squarefree_flags(x)?;
    ys.iter()
        .map(|&y| {
            let w = WeightedSum {
                computed: progression_sum(&flags, s, m, r, y, x),
                predicted: predicted_main_term(s, m, y, x)?,
            };
            let scale = (y as f64).powf(0.5 - s.re);
            Ok(RatioPoint {
                y,
                error: w.error(),
                ratio: w.error() / scale,
            })
        })
        .collect()
}

/// `h(q) = μ²(q) q^{-s}` for odd `q`, `-2 μ²(q) q^{-s}` for even `q`.
pub fn lemma7_h_value(s: Complex64, q: u64, squarefree: bool) -> Complex64 {
    if !squarefree {
        return Complex64::new(0.0, 0.0);
    }
    let v = cpow(q, -s);
    if q % 2 == 0 {
        -2.0 * v
    } else {
        v
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WindowSum {
    pub y: u64,
    /// `Σ_{y<q≤2y} h(q)`.
    #[serde(serialize_with = "serialize_complex")]
    pub sum: Complex64,
    pub magnitude: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Lemma7Demo {
    #[serde(serialize_with = "serialize_complex")]
    pub s: Complex64,
    pub full: PartialSumSeries,
    pub odd: PartialSumSeries,
    pub window_sums: Vec<WindowSum>,
    pub window_tol: f64,
    /// Every window sum is below `window_tol` and they do not grow.
    pub full_windows_shrink: bool,
    pub odd_verdict: ConvergenceVerdict,
    pub expected_exponent: f64,
    pub heuristic: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Lemma7Options {
    /// Left ends `y` of the windows `(y, 2y]`; empty means `x/10, x/5, ...`
    /// doubling while `2y <= x`.
    pub window_ys: Vec<u64>,
    pub window_tol: f64,
    pub window: usize,
    pub rule: DivergenceRule,
}

impl Default for Lemma7Options {
    fn default() -> Self {
        Lemma7Options {
            window_ys: Vec::new(),
            window_tol: 0.05,
            window: DEFAULT_WINDOW,
            rule: DivergenceRule::default(),
        }
    }
}

/// Partial sums of `h` over all `q` and over odd `q`, windowed Cauchy sums of
/// the full series and a growth verdict on the odd one.
pub fn lemma7_demo(s: Complex64, x_max: u64, checkpoints: &[u64], options: &Lemma7Options) -> Result<Lemma7Demo> {
    if !(s.re > 0.5 && s.re < 1.0) {
        return invalid("needs 1/2 < Re s < 1");
    }
    if x_max < 2 {
        return invalid("x must be at least 2");
    }
    let ys: Vec<u64> = if options.window_ys.is_empty() {
        let mut out = Vec::new();
        let mut y = (x_max / 10).max(1);
        while 2 * y <= x_max {
            out.push(y);
            y *= 2;
        }
        out
    } else {
        options.window_ys.clone()
    };
    if let Some(&y) = ys.iter().find(|&&y| y == 0 || 2 * y > x_max) {
        return invalid(format!("window (y, 2y] with y = {y} does not fit in [1, {x_max}]"));
    }
    let mut cps: Vec<u64> = if checkpoints.is_empty() {
        default_checkpoints(x_max, options.window)
    } else {
        checkpoints.to_vec()
    };
    if let Some(&x) = cps.iter().find(|&&x| x == 0 || x > x_max) {
        return invalid(format!("checkpoint {x} outside [1, {x_max}]"));
    }
    let mut marks = cps.clone();
    marks.extend(ys.iter().flat_map(|&y| [y, 2 * y]));
    marks.push(x_max);
    marks.sort_unstable();
    marks.dedup();
    cps.push(x_max);
    cps.sort_unstable();
    cps.dedup();

    let flags = squarefree_flags(x_max)?;
    let mut full = CompensatedSum::new();
    let mut odd = CompensatedSum::new();
    let mut full_at = Vec::with_capacity(marks.len());
    let mut odd_at = Vec::with_capacity(marks.len());
    let mut next = marks.iter().peekable();
    for q in 1..=x_max {
        let v = lemma7_h_value(s, q, flags[q as usize]);
        if v.re != 0.0 || v.im != 0.0 {
            full.add(v);
            if q % 2 == 1 {
                odd.add(v);
            }
        }
        if next.peek() == Some(&&q) {
            next.next();
            full_at.push((q, full.value()));
            odd_at.push((q, odd.value()));
        }
    }
    let lookup = |tab: &[(u64, Complex64)], x: u64| tab.iter().find(|t| t.0 == x).map(|t| t.1).unwrap();
    let series = |tab: &[(u64, Complex64)], description: String| PartialSumSeries {
        description,
        mode: Exactness::Floating,
        checkpoints: cps
            .iter()
            .map(|&x| Checkpoint {
                x,
                sum: Value::Float(lookup(tab, x)),
            })
            .collect(),
    };
    let window_sums: Vec<WindowSum> = ys
        .iter()
        .map(|&y| {
            let sum = lookup(&full_at, 2 * y) - lookup(&full_at, y);
            WindowSum {
                y,
                sum,
                magnitude: sum.norm(),
            }
        })
        .collect();
    let full_windows_shrink = window_sums.iter().all(|w| w.magnitude < options.window_tol)
        && window_sums.windows(2).all(|w| w[1].magnitude <= w[0].magnitude * 1.5);
    let label = format!("h with s = {s}");
    let full = series(&full_at, format!("sum_{{q<=x}} h(q), {label}"));
    let odd = series(&odd_at, format!("sum_{{q<=x, q odd}} h(q), {label}"));
    let window = options.window.min(odd.checkpoints.len());
    let odd_verdict = detect_convergence_with(&odd, None, window, options.window_tol, options.rule)?;
    Ok(Lemma7Demo {
        s,
        full,
        odd,
        window_sums,
        window_tol: options.window_tol,
        full_windows_shrink,
        odd_verdict,
        expected_exponent: 1.0 - s.re,
        heuristic: true,
    })
}
