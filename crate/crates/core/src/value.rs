//! Values of arithmetic functions and the accumulators used to sum them.

use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::{BigRational, Ratio};
use num_traits::{One, ToPrimitive, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

/// Prime-power rule outputs. Small enough to stay cheap, checked on overflow.
pub type SmallRational = Ratio<i128>;

pub fn big(r: &SmallRational) -> BigRational {
    BigRational::new_raw(BigInt::from(*r.numer()), BigInt::from(*r.denom()))
}

pub fn small_to_f64(r: &SmallRational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

pub fn big_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Either an exact rational or a floating complex number.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Exact(BigRational),
    Float(Complex64),
}

impl Value {
    pub fn zero_like(exact: bool) -> Value {
        if exact {
            Value::Exact(BigRational::zero())
        } else {
            Value::Float(Complex64::new(0.0, 0.0))
        }
    }

    pub fn one_like(exact: bool) -> Value {
        if exact {
            Value::Exact(BigRational::one())
        } else {
            Value::Float(Complex64::new(1.0, 0.0))
        }
    }

    pub fn from_int(n: i64, exact: bool) -> Value {
        if exact {
            Value::Exact(BigRational::from_integer(BigInt::from(n)))
        } else {
            Value::Float(Complex64::new(n as f64, 0.0))
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Value::Exact(_))
    }

    pub fn as_exact(&self) -> Option<&BigRational> {
        match self {
            Value::Exact(r) => Some(r),
            Value::Float(_) => None,
        }
    }

    pub fn to_complex(&self) -> Complex64 {
        match self {
            Value::Exact(r) => Complex64::new(big_to_f64(r), 0.0),
            Value::Float(z) => *z,
        }
    }

    pub fn norm(&self) -> f64 {
        match self {
            Value::Exact(r) => big_to_f64(r).abs(),
            Value::Float(z) => z.norm(),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Value::Exact(r) => r.is_zero(),
            Value::Float(z) => z.re == 0.0 && z.im == 0.0,
        }
    }

    /// Equality to one: exact in exact mode, `|v - 1| <= tol` otherwise.
    pub fn is_one(&self, tol: f64) -> bool {
        match self {
            Value::Exact(r) => r.is_one(),
            Value::Float(z) => (z - Complex64::new(1.0, 0.0)).norm() <= tol,
        }
    }

    /// Equality with the same convention as [`Value::is_one`]; mixed
    /// exactness compares numerically.
    pub fn approx_eq(&self, other: &Value, tol: f64) -> bool {
        match (self, other) {
            (Value::Exact(x), Value::Exact(y)) => x == y,
            _ => (self.to_complex() - other.to_complex()).norm() <= tol,
        }
    }

    pub fn add(&self, other: &Value) -> Value {
        match (self, other) {
            (Value::Exact(x), Value::Exact(y)) => Value::Exact(x + y),
            _ => Value::Float(self.to_complex() + other.to_complex()),
        }
    }

    pub fn sub(&self, other: &Value) -> Value {
        match (self, other) {
            (Value::Exact(x), Value::Exact(y)) => Value::Exact(x - y),
            _ => Value::Float(self.to_complex() - other.to_complex()),
        }
    }

    pub fn mul(&self, other: &Value) -> Value {
        match (self, other) {
            (Value::Exact(x), Value::Exact(y)) => Value::Exact(x * y),
            _ => Value::Float(self.to_complex() * other.to_complex()),
        }
    }

    pub fn scale(&self, k: i64) -> Value {
        match self {
            Value::Exact(x) => Value::Exact(x * BigRational::from_integer(BigInt::from(k))),
            Value::Float(z) => Value::Float(z * k as f64),
        }
    }

    pub fn abs(&self) -> Value {
        match self {
            Value::Exact(x) => Value::Exact(if x < &BigRational::zero() { -x } else { x.clone() }),
            Value::Float(z) => Value::Float(Complex64::new(z.norm(), 0.0)),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Exact(r) => write!(f, "{r}"),
            Value::Float(z) if z.im == 0.0 => write!(f, "{}", z.re),
            Value::Float(z) => write!(f, "{}{:+}i", z.re, z.im),
        }
    }
}

/// Exact values serialize as `{num, den}` strings, floats as `{re, im}`.
impl Serialize for Value {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Value::Exact(r) => {
                let mut st = s.serialize_struct("Rational", 2)?;
                st.serialize_field("num", &r.numer().to_string())?;
                st.serialize_field("den", &r.denom().to_string())?;
                st.end()
            }
            Value::Float(z) => serialize_complex(z, s),
        }
    }
}

pub fn serialize_complex<S: Serializer>(z: &Complex64, s: S) -> Result<S::Ok, S::Error> {
    let mut st = s.serialize_struct("Complex", 2)?;
    st.serialize_field("re", &z.re)?;
    st.serialize_field("im", &z.im)?;
    st.end()
}

/// Exact running sum over a lazily grown common denominator.
///
/// Reduction happens only in [`ExactSum::value`]; each `add` costs one
/// big-integer multiply-add, which keeps ten-thousand-term sums with huge
/// denominators cheap.
#[derive(Debug, Clone)]
pub struct ExactSum {
    num: BigInt,
    den: BigInt,
}

impl Default for ExactSum {
    fn default() -> Self {
        ExactSum {
            num: BigInt::zero(),
            den: BigInt::one(),
        }
    }
}

impl ExactSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, term: &BigRational) {
        if term.is_zero() {
            return;
        }
        let td = term.denom();
        if !td.is_one() {
            let g = match td.to_u64() {
                Some(d) => {
                    let r = (&self.den % d).to_u64().unwrap_or(0);
                    BigInt::from(num_integer::gcd(r, d))
                }
                None => self.den.gcd(td),
            };
            let k = td / &g;
            if !k.is_one() {
                self.num *= &k;
                self.den *= &k;
            }
            self.num += term.numer() * (&self.den / td);
        } else {
            self.num += term.numer() * &self.den;
        }
    }

    pub fn value(&self) -> BigRational {
        BigRational::new(self.num.clone(), self.den.clone())
    }
}

/// Neumaier-compensated complex sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    re: (f64, f64),
    im: (f64, f64),
}

fn neumaier(acc: &mut (f64, f64), v: f64) {
    let (sum, c) = acc;
    let t = *sum + v;
    if sum.abs() >= v.abs() {
        *c += (*sum - t) + v;
    } else {
        *c += (v - t) + *sum;
    }
    *sum = t;
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, z: Complex64) {
        neumaier(&mut self.re, z.re);
        neumaier(&mut self.im, z.im);
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.0 + self.re.1, self.im.0 + self.im.1)
    }
}

/// Running sum in whichever mode the summed function supports.
#[derive(Debug, Clone)]
pub enum Accumulator {
    Exact(ExactSum),
    Float(CompensatedSum),
}

impl Accumulator {
    pub fn new(exact: bool) -> Self {
        if exact {
            Accumulator::Exact(ExactSum::new())
        } else {
            Accumulator::Float(CompensatedSum::new())
        }
    }

    pub fn add(&mut self, v: &Value) {
        match (self, v) {
            (Accumulator::Exact(s), Value::Exact(r)) => s.add(r),
            (Accumulator::Float(s), v) => s.add(v.to_complex()),
            (Accumulator::Exact(_), Value::Float(_)) => {
                unreachable!("floating term added to an exact accumulator")
            }
        }
    }

    pub fn value(&self) -> Value {
        match self {
            Accumulator::Exact(s) => Value::Exact(s.value()),
            Accumulator::Float(s) => Value::Float(s.value()),
        }
    }
}
