//! Named example coefficients of the null function.
//!
//! | name                     | exact | class         |
//! |--------------------------|-------|---------------|
//! | `GR`                     | yes   | normal        |
//! | `GH`                     | yes   | sporadic      |
//! | `indicator_prime_powers` | yes   | exotic        |
//! | `G0`                     | yes   | exotic        |
//! | `prop1`                  | no    | normal/sporadic |
//! | `prop2`                  | yes   | exotic        |
//! | `lemma7_h`               | no    | normal        |
//! | `prop5`                  | no    | normal/sporadic |
//! | `weakly_exotic_sample`   | yes   | weakly exotic (not multiplicative) |

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;
use std::sync::Arc;

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::Zero;

use super::{
    rational, ArithmeticFunction, DeclaredSpectra, GeneralArithmeticFunction,
    MultiplicativeFunction, DEFAULT_ONE_TOL,
};
use crate::arith;
use crate::error::{Error, Result};
use crate::value::{big, small_to_f64, SmallRational};

pub const NAMES: [&str; 9] = [
    "GR",
    "GH",
    "indicator_prime_powers",
    "G0",
    "prop1",
    "prop2",
    "lemma7_h",
    "prop5",
    "weakly_exotic_sample",
];

pub fn catalog_names() -> &'static [&'static str] {
    &NAMES
}

/// How a rule continues past the first power of a prime.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HigherPowerRule {
    /// `G(p^k) = 0` for `k >= 2`
    Zero,
    /// `G(p^k) = G(p)^k`
    Complete,
    /// `G(p^k) = p^{-k}`
    Power,
}

impl FromStr for HigherPowerRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "zero" => Ok(HigherPowerRule::Zero),
            "complete" => Ok(HigherPowerRule::Complete),
            "power" => Ok(HigherPowerRule::Power),
            other => Err(Error::InvalidInput(format!(
                "higher_power must be zero, complete or power (got `{other}`)"
            ))),
        }
    }
}

/// Parameters for catalog constructors. Unused fields are ignored; missing
/// ones take per-entry defaults.
#[derive(Debug, Clone, Default)]
pub struct CatalogParams {
    pub p0: Option<u64>,
    pub s: Option<Complex64>,
    pub alpha: Option<f64>,
    pub c: Option<f64>,
    pub cap: Option<f64>,
    pub higher_power: Option<HigherPowerRule>,
    pub p1: Option<u64>,
    pub p2: Option<u64>,
    pub g2: Option<Complex64>,
    pub g_p1_sq: Option<Complex64>,
    pub base: Option<BTreeMap<u64, SmallRational>>,
    pub sigma: Option<u32>,
    pub coeff: Option<SmallRational>,
}

impl CatalogParams {
    pub fn new() -> Self {
        Self::default()
    }

    /// Parses `key=value` items, e.g. `["p0=3", "s=0.6+0.1i"]`.
    pub fn parse<I, S>(items: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut out = CatalogParams::default();
        for item in items {
            let item = item.as_ref();
            let (key, value) = item
                .split_once('=')
                .ok_or_else(|| Error::InvalidInput(format!("expected key=value, got `{item}`")))?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "p0" => out.p0 = Some(parse_num(key, value)?),
                "p1" => out.p1 = Some(parse_num(key, value)?),
                "p2" => out.p2 = Some(parse_num(key, value)?),
                "sigma" => out.sigma = Some(parse_num(key, value)?),
                "alpha" => out.alpha = Some(parse_num(key, value)?),
                "c" => out.c = Some(parse_num(key, value)?),
                "cap" => out.cap = Some(parse_num(key, value)?),
                "s" => out.s = Some(parse_complex(value)?),
                "g2" => out.g2 = Some(parse_complex(value)?),
                "g_p1_sq" => out.g_p1_sq = Some(parse_complex(value)?),
                "higher_power" => out.higher_power = Some(value.parse()?),
                "coeff" => out.coeff = Some(parse_rational(value)?),
                "base" => out.base = Some(parse_base(value)?),
                other => return Err(Error::InvalidInput(format!("unknown parameter `{other}`"))),
            }
        }
        Ok(out)
    }
}

fn parse_num<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::InvalidInput(format!("cannot parse {key}=`{value}`")))
}

/// Accepts `x`, `yi`, `x+yi` and `x-yi`.
pub fn parse_complex(text: &str) -> Result<Complex64> {
    let bad = || Error::InvalidInput(format!("cannot parse complex number `{text}`"));
    let t: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let Some(body) = t.strip_suffix('i') else {
        return t.parse::<f64>().map(|re| Complex64::new(re, 0.0)).map_err(|_| bad());
    };
    // split at the last sign that is not the leading one or an exponent sign
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&i| (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(i) => (&body[..i], &body[i..]),
        None => ("0", body),
    };
    let im = match im {
        "" | "+" => "1",
        "-" => "-1",
        other => other,
    };
    Ok(Complex64::new(
        re.parse().map_err(|_| bad())?,
        im.parse().map_err(|_| bad())?,
    ))
}

pub fn parse_rational(text: &str) -> Result<SmallRational> {
    let bad = || Error::InvalidInput(format!("cannot parse rational `{text}`"));
    match text.split_once('/') {
        Some((n, d)) => {
            let n: i128 = n.trim().parse().map_err(|_| bad())?;
            let d: i128 = d.trim().parse().map_err(|_| bad())?;
            if d == 0 {
                return Err(bad());
            }
            Ok(rational(n, d))
        }
        None => Ok(rational(text.trim().parse().map_err(|_| bad())?, 1)),
    }
}

/// `r:value` pairs separated by commas, e.g. `1:1,3:-2,5:1/2`.
fn parse_base(text: &str) -> Result<BTreeMap<u64, SmallRational>> {
    text.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|pair| {
            let (r, v) = pair
                .split_once(':')
                .ok_or_else(|| Error::InvalidInput(format!("base entry `{pair}` needs r:value")))?;
            Ok((parse_num("base", r.trim())?, parse_rational(v)?))
        })
        .collect()
}

/// A catalog function: multiplicative, or general (non-multiplicative).
#[derive(Debug, Clone)]
pub enum CatalogEntry {
    Multiplicative(MultiplicativeFunction),
    General(GeneralArithmeticFunction),
}

impl CatalogEntry {
    pub fn as_function(&self) -> &dyn ArithmeticFunction {
        match self {
            CatalogEntry::Multiplicative(g) => g,
            CatalogEntry::General(g) => g,
        }
    }

    pub fn as_multiplicative(&self) -> Option<&MultiplicativeFunction> {
        match self {
            CatalogEntry::Multiplicative(g) => Some(g),
            CatalogEntry::General(_) => None,
        }
    }

    pub fn as_general(&self) -> Option<&GeneralArithmeticFunction> {
        match self {
            CatalogEntry::General(g) => Some(g),
            CatalogEntry::Multiplicative(_) => None,
        }
    }

    pub fn label(&self) -> &str {
        self.as_function().label()
    }
}

fn invalid_params<T>(name: &str, reason: impl Into<String>) -> Result<T> {
    Err(Error::InvalidParams {
        name: name.to_string(),
        reason: reason.into(),
    })
}

fn prime_param(name: &str, key: &str, value: Option<u64>, default: u64) -> Result<u64> {
    let p = value.unwrap_or(default);
    if !arith::is_prime(p) {
        return invalid_params(name, format!("{key}={p} is not prime"));
    }
    Ok(p)
}

fn fmt_complex(z: Complex64) -> String {
    if z.im == 0.0 {
        format!("{}", z.re)
    } else {
        format!("{}{:+}i", z.re, z.im)
    }
}

/// Builds the named catalog function.
pub fn catalog(name: &str, params: &CatalogParams) -> Result<CatalogEntry> {
    let g = match name {
        "GR" => CatalogEntry::Multiplicative(ramanujan_coefficient()),
        "GH" => CatalogEntry::Multiplicative(hardy_coefficient()),
        "indicator_prime_powers" => {
            let p0 = prime_param(name, "p0", params.p0, 2)?;
            CatalogEntry::Multiplicative(indicator_prime_powers(p0))
        }
        "G0" => {
            let p0 = prime_param(name, "p0", params.p0, 2)?;
            let higher = params.higher_power.unwrap_or(HigherPowerRule::Power);
            CatalogEntry::Multiplicative(g0(p0, higher))
        }
        "prop1" => CatalogEntry::Multiplicative(prop1(params)?),
        "prop2" => CatalogEntry::Multiplicative(prop2(params)?),
        "lemma7_h" => {
            let s = params.s.unwrap_or(Complex64::new(0.6, 0.0));
            if !(s.re > 0.5 && s.re < 1.0) {
                return invalid_params(name, "needs 1/2 < Re s < 1");
            }
            CatalogEntry::Multiplicative(lemma7_h(s))
        }
        "prop5" => CatalogEntry::Multiplicative(prop5(params)?),
        "weakly_exotic_sample" => CatalogEntry::General(weakly_exotic_sample(params)?),
        other => return Err(Error::UnknownCatalog(other.to_string())),
    };
    Ok(g)
}

/// `G_R(q) = 1/q`.
pub fn ramanujan_coefficient() -> MultiplicativeFunction {
    MultiplicativeFunction::exact("GR", |p, k| {
        (p as i128).checked_pow(k).map(|d| rational(1, d))
    })
    .with_declared_spectra(DeclaredSpectra::empty())
}

/// `G_H(q) = 1/φ(q)`.
pub fn hardy_coefficient() -> MultiplicativeFunction {
    MultiplicativeFunction::exact("GH", |p, k| {
        (p as i128)
            .checked_pow(k - 1)
            .and_then(|pk| pk.checked_mul(p as i128 - 1))
            .map(|d| rational(1, d))
    })
    .with_declared_spectra(DeclaredSpectra::new([2], []).expect("static spectra"))
}

/// One on the powers of `p0`, zero elsewhere.
pub fn indicator_prime_powers(p0: u64) -> MultiplicativeFunction {
    MultiplicativeFunction::exact(format!("indicator_prime_powers(p0={p0})"), move |p, _| {
        Some(rational((p == p0) as i128, 1))
    })
    .with_declared_spectra(DeclaredSpectra::new([p0], [p0]).expect("p0 is prime"))
    .with_prime_tail_bound(Arc::new(move |above| if above >= p0 { 0.0 } else { 1.0 }))
}

/// `G0(p0^k) = 1`, `G0(p) = 1/p` for `p != p0`; higher powers off `p0`
/// follow `higher` (default `p^{-k}`, which is also the complete continuation).
pub fn g0(p0: u64, higher: HigherPowerRule) -> MultiplicativeFunction {
    let tag = match higher {
        HigherPowerRule::Power | HigherPowerRule::Complete => "",
        HigherPowerRule::Zero => ",higher_power=zero",
    };
    MultiplicativeFunction::exact(format!("G0(p0={p0}{tag})"), move |p, k| {
        if p == p0 {
            return Some(rational(1, 1));
        }
        match (k, higher) {
            (1, _) => Some(rational(1, p as i128)),
            (_, HigherPowerRule::Zero) => Some(rational(0, 1)),
            _ => (p as i128).checked_pow(k).map(|d| rational(1, d)),
        }
    })
    .with_declared_spectra(DeclaredSpectra::new([p0], [p0]).expect("p0 is prime"))
}

/// `G(p) = 1/p + c p^{-1-α}` on primes.
///
/// The squarefree bound `|G(q)| <= C/q` is enforced by rejecting parameters
/// for which `sup_q q|G(q)|` cannot be bounded by `cap`: with
/// `-2 <= c p^{-α} <= 0` every local factor has modulus at most one; with
/// `c > 0` and `α > 1` the product is at most `exp(c/(α-1))`.
pub fn prop1(params: &CatalogParams) -> Result<MultiplicativeFunction> {
    const NAME: &str = "prop1";
    let alpha = params.alpha.unwrap_or(0.5);
    let c = params.c.unwrap_or(-0.5);
    let cap = params.cap.unwrap_or(1.0);
    let higher = params.higher_power.unwrap_or(HigherPowerRule::Zero);
    if !(alpha > 0.0) || !alpha.is_finite() || !c.is_finite() {
        return invalid_params(NAME, "needs finite alpha > 0 and finite c");
    }
    let squarefree_bound = if c <= 0.0 {
        if c * 2f64.powf(-alpha) < -2.0 {
            return invalid_params(NAME, "local factor 1 + c p^-alpha leaves [-1, 1] at p = 2");
        }
        1.0
    } else if alpha > 1.0 {
        (c / (alpha - 1.0)).exp()
    } else {
        return invalid_params(NAME, "c > 0 needs alpha > 1 for G(q) = O(1/q) on squarefrees");
    };
    if squarefree_bound > cap {
        return invalid_params(
            NAME,
            format!("squarefree bound {squarefree_bound:.6} exceeds cap {cap}"),
        );
    }

    let at_prime = move |p: u64| {
        let p = p as f64;
        1.0 / p + c * p.powf(-1.0 - alpha)
    };
    // |G(p)| <= (1 + |c|)/p < 1 beyond 1 + |c|, so only small primes can be transparent
    let transparent: Vec<u64> = (2..=(2.0 + c.abs()) as u64)
        .filter(|&p| arith::is_prime(p) && (at_prime(p) - 1.0).abs() <= DEFAULT_ONE_TOL)
        .collect();
    if higher == HigherPowerRule::Complete && !transparent.is_empty() {
        return invalid_params(NAME, "complete continuation at a transparent prime is exotic");
    }
    let label = format!(
        "prop1(alpha={alpha},c={c},higher_power={})",
        match higher {
            HigherPowerRule::Zero => "zero",
            HigherPowerRule::Complete => "complete",
            HigherPowerRule::Power => "power",
        }
    );
    Ok(MultiplicativeFunction::floating(label, move |p, k| {
        let v = match (k, higher) {
            (1, _) => at_prime(p),
            (_, HigherPowerRule::Zero) => 0.0,
            (_, HigherPowerRule::Complete) => at_prime(p).powi(k as i32),
            (_, HigherPowerRule::Power) => (p as f64).powi(-(k as i32)),
        };
        Complex64::new(v, 0.0)
    })
    .with_declared_spectra(DeclaredSpectra::new(transparent, [])?))
}

/// Exotic at `p0` with `G(p) = coeff · p^{-σ}` off `p0`, completely
/// multiplicative there; `Σ_p |G(p)|` converges.
pub fn prop2(params: &CatalogParams) -> Result<MultiplicativeFunction> {
    const NAME: &str = "prop2";
    let p0 = prime_param(NAME, "p0", params.p0, 2)?;
    let sigma = params.sigma.unwrap_or(2);
    let coeff = params.coeff.unwrap_or(rational(1, 1));
    if sigma < 2 {
        return invalid_params(NAME, "sigma must be at least 2");
    }
    let coeff_abs = small_to_f64(&coeff).abs();
    if coeff_abs >= 2f64.powi(sigma as i32) {
        return invalid_params(NAME, "|coeff| must stay below 2^sigma so G(p) != 1 off p0");
    }
    let label = format!("prop2(p0={p0},sigma={sigma},coeff={coeff})");
    Ok(MultiplicativeFunction::exact(label, move |p, k| {
        if p == p0 {
            return Some(rational(1, 1));
        }
        let den = (p as i128).checked_pow(sigma.checked_mul(k)?)?;
        let num_k = coeff.numer().checked_pow(k)?;
        let den_k = coeff.denom().checked_pow(k)?.checked_mul(den)?;
        Some(rational(num_k, den_k))
    })
    .with_declared_spectra(DeclaredSpectra::new([p0], [p0])?)
    .with_prime_tail_bound(Arc::new(move |above| {
        // Σ_{p > P} |c| p^{-σ} <= |c| ∫_P^∞ t^{-σ} dt, plus G(p0) = 1 if p0 > P
        let above = above.max(1) as f64;
        let tail = coeff_abs * above.powf(1.0 - sigma as f64) / (sigma as f64 - 1.0);
        tail + if (p0 as f64) > above { 1.0 } else { 0.0 }
    })))
}

/// `h(q) = μ²(q) q^{-s}` for odd `q`, `-2μ²(q) q^{-s}` for even `q`.
pub fn lemma7_h(s: Complex64) -> MultiplicativeFunction {
    MultiplicativeFunction::floating(format!("lemma7_h(s={})", fmt_complex(s)), move |p, k| {
        if k >= 2 {
            return Complex64::new(0.0, 0.0);
        }
        let v = Complex64::new(p as f64, 0.0).powc(-s);
        if p == 2 {
            -2.0 * v
        } else {
            v
        }
    })
    .with_declared_spectra(DeclaredSpectra::empty())
}

/// `G(p1) = p1^{1-s}`, `G(p2) = g2`, `G(p) = -p^{-s}` elsewhere; higher
/// powers vanish except `G(p1^2) = g_p1_sq` (default 0).
pub fn prop5(params: &CatalogParams) -> Result<MultiplicativeFunction> {
    const NAME: &str = "prop5";
    let s = params.s.unwrap_or(Complex64::new(0.6, 0.0));
    let p1 = prime_param(NAME, "p1", params.p1, 2)?;
    let p2 = prime_param(NAME, "p2", params.p2, 3)?;
    let g2 = params.g2.unwrap_or(Complex64::new(0.0, 0.0));
    let g_p1_sq = params.g_p1_sq.unwrap_or(Complex64::new(0.0, 0.0));
    if !(s.re > 0.5 && s.re < 1.0) {
        return invalid_params(NAME, "needs 1/2 < Re s < 1");
    }
    if p1 == p2 {
        return invalid_params(NAME, "p1 and p2 must be distinct");
    }
    let pow = |p: u64, e: Complex64| Complex64::new(p as f64, 0.0).powc(e);
    let one = Complex64::new(1.0, 0.0);
    if (g2 - pow(p2, one - s)).norm() <= DEFAULT_ONE_TOL {
        return invalid_params(NAME, "g2 must differ from p2^(1-s)");
    }
    let transparent: Vec<u64> = if (g2 - one).norm() <= DEFAULT_ONE_TOL {
        vec![p2]
    } else {
        Vec::new()
    };
    let mut label = String::new();
    let _ = write!(
        label,
        "prop5(s={},p1={p1},p2={p2},g2={}",
        fmt_complex(s),
        fmt_complex(g2)
    );
    if !g_p1_sq.is_zero() {
        let _ = write!(label, ",g_p1_sq={}", fmt_complex(g_p1_sq));
    }
    label.push(')');
    Ok(MultiplicativeFunction::floating(label, move |p, k| match k {
        1 if p == p1 => pow(p1, one - s),
        1 if p == p2 => g2,
        1 => -pow(p, -s),
        2 if p == p1 => g_p1_sq,
        _ => Complex64::new(0.0, 0.0),
    })
    // G(p2^2) = 0, so p2 is never invisible
    .with_declared_spectra(DeclaredSpectra::new(transparent, [])?))
}

/// The non-multiplicative `G(p0^K r) = base(r)` for `(r, p0) = 1`, with a
/// finitely supported `base`.
pub fn weakly_exotic_sample(params: &CatalogParams) -> Result<GeneralArithmeticFunction> {
    const NAME: &str = "weakly_exotic_sample";
    let p0 = prime_param(NAME, "p0", params.p0, 2)?;
    let base = match &params.base {
        Some(b) => b.clone(),
        None => default_base(p0),
    };
    if let Some(&r) = base.keys().find(|&&r| r == 0 || r % p0 == 0) {
        return invalid_params(NAME, format!("base key {r} is not a positive integer coprime to p0"));
    }
    let table: BTreeMap<u64, BigRational> = base
        .iter()
        .filter(|(_, v)| !v.is_zero())
        .map(|(&r, v)| (r, big(v)))
        .collect();
    let body = base
        .iter()
        .map(|(r, v)| format!("{r}:{v}"))
        .collect::<Vec<_>>()
        .join(",");
    let label = format!("weakly_exotic_sample(p0={p0},base={body})");
    Ok(GeneralArithmeticFunction::exact(label, move |f| {
        let mut r = f.value();
        while r % p0 == 0 {
            r /= p0;
        }
        Some(table.get(&r).cloned().unwrap_or_else(BigRational::zero))
    })
    .with_weakly_exotic_prime(p0))
}

/// A base that is visibly not multiplicative: `base(15) != base(3) base(5)`.
fn default_base(p0: u64) -> BTreeMap<u64, SmallRational> {
    let candidates: [(u64, SmallRational); 5] = [
        (1, rational(1, 1)),
        (3, rational(-2, 1)),
        (5, rational(1, 2)),
        (7, rational(1, 3)),
        (15, rational(3, 1)),
    ];
    candidates
        .into_iter()
        .filter(|(r, _)| r % p0 != 0)
        .collect()
}

/// Support of the default or given base, for callers that need a bound.
pub fn base_support_max(g: &GeneralArithmeticFunction, search: u64) -> u64 {
    (1..=search)
        .filter(|&r| g.eval(r).map(|v| !v.is_zero()).unwrap_or(false))
        .max()
        .unwrap_or(1)
}

/// Every multiplicative catalog entry with representative parameters.
pub fn multiplicative_fixtures() -> Vec<(&'static str, CatalogParams)> {
    let with = |f: fn(&mut CatalogParams)| {
        let mut p = CatalogParams::default();
        f(&mut p);
        p
    };
    vec![
        ("GR", CatalogParams::default()),
        ("GH", CatalogParams::default()),
        ("indicator_prime_powers", with(|p| p.p0 = Some(2))),
        ("indicator_prime_powers", with(|p| p.p0 = Some(3))),
        ("G0", with(|p| p.p0 = Some(2))),
        ("G0", with(|p| p.p0 = Some(3))),
        ("prop1", CatalogParams::default()),
        ("prop2", with(|p| p.p0 = Some(3))),
        ("lemma7_h", CatalogParams::default()),
        ("prop5", CatalogParams::default()),
    ]
}

/// Exact multiplicative catalog entries, as used by the identity sweeps.
pub fn exact_multiplicative_fixtures() -> Vec<MultiplicativeFunction> {
    multiplicative_fixtures()
        .into_iter()
        .filter_map(|(name, params)| catalog(name, &params).ok())
        .filter_map(|e| e.as_multiplicative().cloned())
        .filter(|g| g.is_exact())
        .collect()
}
