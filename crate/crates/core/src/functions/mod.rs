//! Arithmetic functions: multiplicative ones given by a prime-power rule and
//! general ones given pointwise, plus spectra and the example catalog.

pub mod catalog;
pub mod spectrum;

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

#[cfg(test)]
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{self, Factorization};
use crate::error::{invalid, Error, Result};
use crate::value::{big, small_to_f64, SmallRational, Value};

pub use catalog::{catalog, catalog_names, CatalogEntry, CatalogParams, HigherPowerRule};
pub use spectrum::{
    is_weakly_exotic, spectrum, transparency_valuation, Classification, SpectrumReport,
    TransparencyValuation, WeakExoticCertificate,
};

/// Tolerance for "equals one" on floating rules.
pub const DEFAULT_ONE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Exactness {
    ExactRational,
    Floating,
}

/// Anything that can be evaluated at a factored natural number.
pub trait ArithmeticFunction: Send + Sync {
    fn label(&self) -> &str;

    fn exactness(&self) -> Exactness;

    fn is_exact(&self) -> bool {
        self.exactness() == Exactness::ExactRational
    }

    fn value_at(&self, n: &Factorization) -> Result<Value>;

    /// Floating evaluation for long summation loops.
    fn complex_at(&self, n: &Factorization) -> Result<Complex64> {
        Ok(self.value_at(n)?.to_complex())
    }

    fn eval(&self, n: u64) -> Result<Value> {
        self.value_at(&arith::factorize(n)?)
    }
}

type ExactRule = Arc<dyn Fn(u64, u32) -> Option<SmallRational> + Send + Sync>;
type FloatRule = Arc<dyn Fn(u64, u32) -> Complex64 + Send + Sync>;

/// Upper bound on `Σ_{p > P} |G(p)|` as a function of `P`.
pub type PrimeTailBound = Arc<dyn Fn(u64) -> f64 + Send + Sync>;

/// Value of `G` at `p^k` for `k >= 1`. Exact rules return `None` on overflow.
#[derive(Clone)]
pub enum PrimePowerRule {
    Exact(ExactRule),
    Float(FloatRule),
}

/// Exactly known spectra: `F(G) = {p : G(p) = 1}` and
/// `F₀(G) = {p : G(p^K) = 1 for all K}`.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct DeclaredSpectra {
    transparent: BTreeSet<u64>,
    invisible: BTreeSet<u64>,
}

impl DeclaredSpectra {
    pub fn new(
        transparent: impl IntoIterator<Item = u64>,
        invisible: impl IntoIterator<Item = u64>,
    ) -> Result<Self> {
        let transparent: BTreeSet<u64> = transparent.into_iter().collect();
        let invisible: BTreeSet<u64> = invisible.into_iter().collect();
        if let Some(p) = transparent.iter().chain(&invisible).find(|&&p| !arith::is_prime(p)) {
            return invalid(format!("declared spectrum contains non-prime {p}"));
        }
        if !invisible.is_subset(&transparent) {
            return invalid("invisible primes must also be transparent");
        }
        Ok(DeclaredSpectra {
            transparent,
            invisible,
        })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn transparent(&self) -> &BTreeSet<u64> {
        &self.transparent
    }

    pub fn invisible(&self) -> &BTreeSet<u64> {
        &self.invisible
    }
}

/// A multiplicative `G` determined by its values at prime powers.
#[derive(Clone)]
pub struct MultiplicativeFunction {
    label: String,
    rule: PrimePowerRule,
    declared: Option<DeclaredSpectra>,
    prime_tail: Option<PrimeTailBound>,
}

impl fmt::Debug for MultiplicativeFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MultiplicativeFunction")
            .field("label", &self.label)
            .field("exactness", &self.exactness())
            .field("declared", &self.declared)
            .finish()
    }
}

impl MultiplicativeFunction {
    pub fn exact<F>(label: impl Into<String>, rule: F) -> Self
    where
        F: Fn(u64, u32) -> Option<SmallRational> + Send + Sync + 'static,
    {
        MultiplicativeFunction {
            label: label.into(),
            rule: PrimePowerRule::Exact(Arc::new(rule)),
            declared: None,
            prime_tail: None,
        }
    }

    pub fn floating<F>(label: impl Into<String>, rule: F) -> Self
    where
        F: Fn(u64, u32) -> Complex64 + Send + Sync + 'static,
    {
        MultiplicativeFunction {
            label: label.into(),
            rule: PrimePowerRule::Float(Arc::new(rule)),
            declared: None,
            prime_tail: None,
        }
    }

    pub fn with_declared_spectra(mut self, spectra: DeclaredSpectra) -> Self {
        self.declared = Some(spectra);
        self
    }

    pub fn with_prime_tail_bound(mut self, bound: PrimeTailBound) -> Self {
        self.prime_tail = Some(bound);
        self
    }

    pub fn declared_spectra(&self) -> Option<&DeclaredSpectra> {
        self.declared.as_ref()
    }

    pub fn prime_tail_bound(&self, above: u64) -> Option<f64> {
        self.prime_tail.as_ref().map(|b| b(above))
    }

    pub fn rule(&self) -> &PrimePowerRule {
        &self.rule
    }

    /// `G(p^k)`, with `G(p^0) = 1`.
    pub fn at_prime_power(&self, p: u64, k: u32) -> Result<Value> {
        if k == 0 {
            return Ok(Value::one_like(self.is_exact()));
        }
        match &self.rule {
            PrimePowerRule::Exact(r) => r(p, k)
                .map(|v| Value::Exact(big(&v)))
                .ok_or_else(|| overflow(&self.label, p, k)),
            PrimePowerRule::Float(r) => Ok(Value::Float(r(p, k))),
        }
    }

    pub fn at_prime_power_complex(&self, p: u64, k: u32) -> Result<Complex64> {
        if k == 0 {
            return Ok(Complex64::new(1.0, 0.0));
        }
        match &self.rule {
            PrimePowerRule::Exact(r) => r(p, k)
                .map(|v| Complex64::new(small_to_f64(&v), 0.0))
                .ok_or_else(|| overflow(&self.label, p, k)),
            PrimePowerRule::Float(r) => Ok(r(p, k)),
        }
    }
}

fn overflow(label: &str, p: u64, k: u32) -> Error {
    Error::Resource(format!("{label}({p}^{k}) overflows the exact rational range"))
}

impl ArithmeticFunction for MultiplicativeFunction {
    fn label(&self) -> &str {
        &self.label
    }

    fn exactness(&self) -> Exactness {
        match self.rule {
            PrimePowerRule::Exact(_) => Exactness::ExactRational,
            PrimePowerRule::Float(_) => Exactness::Floating,
        }
    }

    fn value_at(&self, n: &Factorization) -> Result<Value> {
        match &self.rule {
            PrimePowerRule::Exact(r) => {
                let mut acc = BigRational::one();
                for &(p, e) in n.factors() {
                    let v = r(p, e).ok_or_else(|| overflow(&self.label, p, e))?;
                    if v.is_zero() {
                        return Ok(Value::Exact(BigRational::zero()));
                    }
                    acc *= big(&v);
                }
                Ok(Value::Exact(acc))
            }
            PrimePowerRule::Float(_) => self.complex_at(n).map(Value::Float),
        }
    }

    fn complex_at(&self, n: &Factorization) -> Result<Complex64> {
        let mut acc = Complex64::new(1.0, 0.0);
        for &(p, e) in n.factors() {
            acc *= self.at_prime_power_complex(p, e)?;
        }
        Ok(acc)
    }
}

type GeneralExact = Arc<dyn Fn(&Factorization) -> Option<BigRational> + Send + Sync>;
type GeneralFloat = Arc<dyn Fn(&Factorization) -> Complex64 + Send + Sync>;

#[derive(Clone)]
enum GeneralRule {
    Exact(GeneralExact),
    Float(GeneralFloat),
    Multiplicative(MultiplicativeFunction),
}

/// A possibly non-multiplicative function, given pointwise.
#[derive(Clone)]
pub struct GeneralArithmeticFunction {
    label: String,
    rule: GeneralRule,
    bound: Option<u64>,
    weakly_exotic_prime: Option<u64>,
}

impl fmt::Debug for GeneralArithmeticFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GeneralArithmeticFunction")
            .field("label", &self.label)
            .field("bound", &self.bound)
            .field("weakly_exotic_prime", &self.weakly_exotic_prime)
            .finish()
    }
}

impl GeneralArithmeticFunction {
    pub fn exact<F>(label: impl Into<String>, eval: F) -> Self
    where
        F: Fn(&Factorization) -> Option<BigRational> + Send + Sync + 'static,
    {
        GeneralArithmeticFunction {
            label: label.into(),
            rule: GeneralRule::Exact(Arc::new(eval)),
            bound: None,
            weakly_exotic_prime: None,
        }
    }

    pub fn floating<F>(label: impl Into<String>, eval: F) -> Self
    where
        F: Fn(&Factorization) -> Complex64 + Send + Sync + 'static,
    {
        GeneralArithmeticFunction {
            label: label.into(),
            rule: GeneralRule::Float(Arc::new(eval)),
            bound: None,
            weakly_exotic_prime: None,
        }
    }

    /// Views a multiplicative function as a general one.
    pub fn from_multiplicative(g: MultiplicativeFunction) -> Self {
        let weakly_exotic_prime = g
            .declared_spectra()
            .and_then(|d| d.invisible().iter().next().copied());
        GeneralArithmeticFunction {
            label: g.label().to_string(),
            rule: GeneralRule::Multiplicative(g),
            bound: None,
            weakly_exotic_prime,
        }
    }

    /// Restricts the domain to `[1, bound]`.
    pub fn with_bound(mut self, bound: u64) -> Self {
        self.bound = Some(bound);
        self
    }

    /// Records a prime for which `G(p0^K r) = G(r)` holds by construction.
    pub fn with_weakly_exotic_prime(mut self, p0: u64) -> Self {
        self.weakly_exotic_prime = Some(p0);
        self
    }

    pub fn weakly_exotic_prime(&self) -> Option<u64> {
        self.weakly_exotic_prime
    }

    fn check_domain(&self, n: u64) -> Result<()> {
        match self.bound {
            Some(b) if n > b => invalid(format!("{} is only defined up to {b}", self.label)),
            _ => Ok(()),
        }
    }
}

impl ArithmeticFunction for GeneralArithmeticFunction {
    fn label(&self) -> &str {
        &self.label
    }

    fn exactness(&self) -> Exactness {
        match &self.rule {
            GeneralRule::Exact(_) => Exactness::ExactRational,
            GeneralRule::Float(_) => Exactness::Floating,
            GeneralRule::Multiplicative(g) => g.exactness(),
        }
    }

    fn value_at(&self, n: &Factorization) -> Result<Value> {
        self.check_domain(n.value())?;
        match &self.rule {
            GeneralRule::Exact(f) => f(n).map(Value::Exact).ok_or_else(|| {
                Error::Resource(format!("{}({}) overflows", self.label, n.value()))
            }),
            GeneralRule::Float(f) => Ok(Value::Float(f(n))),
            GeneralRule::Multiplicative(g) => g.value_at(n),
        }
    }

    fn complex_at(&self, n: &Factorization) -> Result<Complex64> {
        self.check_domain(n.value())?;
        match &self.rule {
            GeneralRule::Float(f) => Ok(f(n)),
            GeneralRule::Multiplicative(g) => g.complex_at(n),
            GeneralRule::Exact(_) => Ok(self.value_at(n)?.to_complex()),
        }
    }
}

pub(crate) fn rational(n: i128, d: i128) -> SmallRational {
    SmallRational::new(n, d)
}

#[cfg(test)]
pub(crate) fn big_rational(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::ArithTables;

    fn coprime_pairs(limit: u64) -> impl Iterator<Item = (u64, u64)> {
        (1..=limit).flat_map(move |m| {
            (1..=limit / m)
                .filter(move |&n| arith::gcd(m, n) == 1)
                .map(move |n| (m, n))
        })
    }

    #[test]
    fn value_at_one_is_one() {
        let g = MultiplicativeFunction::exact("zero-ish", |_, _| Some(rational(0, 1)));
        assert_eq!(g.eval(1).unwrap(), Value::one_like(true));
        assert!(g.eval(6).unwrap().is_zero());
    }

    #[test]
    fn exact_overflow_is_a_resource_error() {
        let g = MultiplicativeFunction::exact("overflowing", |p, k| {
            (p as i128).checked_pow(k * 50).map(|d| rational(1, d))
        });
        assert!(matches!(g.eval(8), Err(Error::Resource(_))));
    }

    #[test]
    fn declared_spectra_validation() {
        assert!(DeclaredSpectra::new([2], [2]).is_ok());
        assert!(DeclaredSpectra::new([2], [3]).is_err());
        assert!(DeclaredSpectra::new([4], []).is_err());
    }

    #[test]
    fn general_bound_is_enforced() {
        let g = GeneralArithmeticFunction::exact("id", |f| Some(big_rational(f.value() as i64, 1)))
            .with_bound(10);
        assert!(g.eval(10).is_ok());
        assert!(g.eval(11).is_err());
    }

    #[test]
    fn catalog_multiplicative_entries_extend_multiplicatively() {
        let t = ArithTables::new(10_000).unwrap();
        for (name, params) in catalog::multiplicative_fixtures() {
            let entry = catalog(name, &params).unwrap();
            let g = entry.as_multiplicative().unwrap();
            for (m, n) in coprime_pairs(10_000).step_by(3) {
                let gm = g.value_at(&t.factorize(m).unwrap()).unwrap();
                let gn = g.value_at(&t.factorize(n).unwrap()).unwrap();
                let gmn = g.value_at(&t.factorize(m * n).unwrap()).unwrap();
                assert!(
                    gmn.approx_eq(&gm.mul(&gn), 1e-12 * (1.0 + gmn.norm())),
                    "{name}: G({m}*{n})"
                );
            }
        }
    }
}
