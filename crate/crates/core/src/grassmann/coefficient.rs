//! Coefficient rings for Grassmann elements.
//!
//! Two modes are supported: exact complex rationals, used for the identity
//! suites, and `Complex64` for everything numerical.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::{Complex, Complex64};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use serde_json::Value;

/// Complex number with arbitrary-precision rational parts.
pub type Exact = Complex<BigRational>;

/// Which coefficient ring a generator table is bound to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CoefficientMode {
    Exact,
    Float,
}

pub trait Coefficient:
    Clone
    + Debug
    + PartialEq
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    const MODE: CoefficientMode;

    fn zero() -> Self;
    fn one() -> Self;
    fn imag_unit() -> Self;
    fn from_i64(v: i64) -> Self;
    fn from_ratio(num: i64, den: i64) -> Self;
    fn from_rational(r: &BigRational) -> Self;

    /// True when the coefficient should not be stored.
    fn is_negligible(&self, threshold: f64) -> bool;
    fn conj(&self) -> Self;
    fn to_complex64(&self) -> Complex64;
    /// Strictly positive and real.
    fn is_positive_real(&self) -> bool;

    fn to_json_parts(&self) -> (Value, Value);
    fn from_json_parts(re: &Value, im: &Value) -> Result<Self, String>;
}

impl Coefficient for Complex64 {
    const MODE: CoefficientMode = CoefficientMode::Float;

    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn imag_unit() -> Self {
        Complex64::new(0.0, 1.0)
    }
    fn from_i64(v: i64) -> Self {
        Complex64::new(v as f64, 0.0)
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        Complex64::new(num as f64 / den as f64, 0.0)
    }
    fn from_rational(r: &BigRational) -> Self {
        Complex64::new(r.to_f64().unwrap_or(f64::NAN), 0.0)
    }
    fn is_negligible(&self, threshold: f64) -> bool {
        self.norm() <= threshold
    }
    fn conj(&self) -> Self {
        Complex::conj(self)
    }
    fn to_complex64(&self) -> Complex64 {
        *self
    }
    fn is_positive_real(&self) -> bool {
        self.re > 0.0 && self.im == 0.0 && self.re.is_finite()
    }
    fn to_json_parts(&self) -> (Value, Value) {
        (Value::from(self.re), Value::from(self.im))
    }
    fn from_json_parts(re: &Value, im: &Value) -> Result<Self, String> {
        let re = re.as_f64().ok_or("float mode expects numeric \"re\"")?;
        let im = im.as_f64().ok_or("float mode expects numeric \"im\"")?;
        Ok(Complex64::new(re, im))
    }
}

fn rational_to_string(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn rational_from_str(s: &str) -> Result<BigRational, String> {
    let parse = |t: &str| {
        t.trim()
            .parse::<BigInt>()
            .map_err(|e| format!("bad rational {s:?}: {e}"))
    };
    match s.split_once('/') {
        Some((n, d)) => {
            let d = parse(d)?;
            if d.is_zero() {
                return Err(format!("zero denominator in {s:?}"));
            }
            Ok(BigRational::new(parse(n)?, d))
        }
        None => Ok(BigRational::from_integer(parse(s)?)),
    }
}

impl Coefficient for Exact {
    const MODE: CoefficientMode = CoefficientMode::Exact;

    fn zero() -> Self {
        Complex::new(BigRational::zero(), BigRational::zero())
    }
    fn one() -> Self {
        Complex::new(BigRational::one(), BigRational::zero())
    }
    fn imag_unit() -> Self {
        Complex::new(BigRational::zero(), BigRational::one())
    }
    fn from_i64(v: i64) -> Self {
        Complex::new(BigRational::from_integer(v.into()), BigRational::zero())
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        Complex::new(
            BigRational::new(num.into(), den.into()),
            BigRational::zero(),
        )
    }
    fn from_rational(r: &BigRational) -> Self {
        Complex::new(r.clone(), BigRational::zero())
    }
    fn is_negligible(&self, _threshold: f64) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
    fn conj(&self) -> Self {
        Complex::new(self.re.clone(), -self.im.clone())
    }
    fn to_complex64(&self) -> Complex64 {
        Complex64::new(
            self.re.to_f64().unwrap_or(f64::NAN),
            self.im.to_f64().unwrap_or(f64::NAN),
        )
    }
    fn is_positive_real(&self) -> bool {
        self.im.is_zero() && self.re.is_positive()
    }
    fn to_json_parts(&self) -> (Value, Value) {
        (
            Value::from(rational_to_string(&self.re)),
            Value::from(rational_to_string(&self.im)),
        )
    }
    fn from_json_parts(re: &Value, im: &Value) -> Result<Self, String> {
        let re = re.as_str().ok_or("exact mode expects \"re\" as a rational string")?;
        let im = im.as_str().ok_or("exact mode expects \"im\" as a rational string")?;
        Ok(Complex::new(rational_from_str(re)?, rational_from_str(im)?))
    }
}
