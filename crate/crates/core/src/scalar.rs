//! Scalar abstraction.
//!
//! Every algorithm in the crate is written once against [`Scalar`] (the
//! field the weights and vector coefficients live in) and [`Real`] (the
//! ordered field that moduli, norms and error bounds live in). Three
//! families are provided:
//!
//! * `f32` / `f64` — binary floating point, comparisons up to a tolerance;
//! * [`BigRational`] — exact rationals, every decision is exact;
//! * `Complex<f32>` / `Complex<f64>` — complex weights, float moduli.

use std::fmt::Debug;
use std::ops::Neg;

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{Num, One, Signed, ToPrimitive, Zero};
use serde_json::Value;

/// Field a weight sequence or vector is defined over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ScalarField {
    Real,
    Complex,
}

impl ScalarField {
    pub fn as_str(self) -> &'static str {
        match self {
            ScalarField::Real => "real",
            ScalarField::Complex => "complex",
        }
    }
}

/// Whether comparisons are decided exactly or up to a tolerance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ArithmeticMode {
    Exact,
    Float,
}

impl ArithmeticMode {
    pub fn as_str(self) -> &'static str {
        match self {
            ArithmeticMode::Exact => "exact",
            ArithmeticMode::Float => "float",
        }
    }
}

pub trait Scalar: Num + Clone + Debug + PartialEq + Neg<Output = Self> + Send + Sync + 'static {
    /// Type of moduli and norms.
    type Real: Real;

    const FIELD: ScalarField;

    fn modulus(&self) -> Self::Real;

    fn from_real(r: Self::Real) -> Self;

    fn conj(&self) -> Self;

    /// Unimodular `u` with `u * self == |self|`. Returns one for zero.
    fn phase_align(&self) -> Self {
        if self.is_zero() {
            return Self::one();
        }
        self.conj() / Self::from_real(self.modulus())
    }

    /// Builds a scalar from floating point parts; the imaginary part is
    /// dropped for real fields.
    fn from_f64_parts(re: f64, im: f64) -> Self;

    fn to_json(&self) -> Value;

    fn from_json(v: &Value) -> Result<Self, String>;

    fn mode() -> ArithmeticMode {
        if <Self::Real as Real>::EXACT {
            ArithmeticMode::Exact
        } else {
            ArithmeticMode::Float
        }
    }
}

pub trait Real: Scalar<Real = Self> + PartialOrd + Signed {
    /// True when arithmetic and comparisons are exact.
    const EXACT: bool;

    fn to_f64(&self) -> f64;

    /// Nearest representable value; exact for rationals.
    fn from_f64(x: f64) -> Self;

    /// Nonnegative `n`-th root of a nonnegative value. Exact for rationals
    /// whose numerator and denominator are perfect powers.
    fn nth_root(&self, n: u32) -> Self;

    /// Relative tolerance used when comparing against one.
    fn default_tolerance() -> f64;

    fn max_of(a: Self, b: Self) -> Self {
        if a >= b {
            a
        } else {
            b
        }
    }

    fn min_of(a: Self, b: Self) -> Self {
        if a <= b {
            a
        } else {
            b
        }
    }
}

/// Integer power by repeated squaring.
pub fn powi<S: Scalar>(base: &S, exp: u64) -> S {
    num_traits::pow::pow(base.clone(), exp as usize)
}

macro_rules! impl_float_real {
    ($f:ty, $tol:expr) => {
        impl Scalar for $f {
            type Real = $f;
            const FIELD: ScalarField = ScalarField::Real;

            fn modulus(&self) -> $f {
                self.abs()
            }

            fn from_real(r: $f) -> Self {
                r
            }

            fn conj(&self) -> Self {
                *self
            }

            fn phase_align(&self) -> Self {
                if *self < 0.0 {
                    -1.0
                } else {
                    1.0
                }
            }

            fn from_f64_parts(re: f64, _im: f64) -> Self {
                re as $f
            }

            fn to_json(&self) -> Value {
                json_number(*self as f64)
            }

            fn from_json(v: &Value) -> Result<Self, String> {
                json_to_f64(v).map(|x| x as $f)
            }
        }

        impl Real for $f {
            const EXACT: bool = false;

            fn to_f64(&self) -> f64 {
                *self as f64
            }

            fn from_f64(x: f64) -> Self {
                x as $f
            }

            fn nth_root(&self, n: u32) -> Self {
                if n == 1 {
                    *self
                } else {
                    self.powf(1.0 / n as $f)
                }
            }

            fn default_tolerance() -> f64 {
                $tol
            }
        }

        impl Scalar for Complex<$f> {
            type Real = $f;
            const FIELD: ScalarField = ScalarField::Complex;

            fn modulus(&self) -> $f {
                self.norm()
            }

            fn from_real(r: $f) -> Self {
                Complex::new(r, 0.0)
            }

            fn conj(&self) -> Self {
                Complex::conj(self)
            }

            fn from_f64_parts(re: f64, im: f64) -> Self {
                Complex::new(re as $f, im as $f)
            }

            fn to_json(&self) -> Value {
                Value::Array(vec![json_number(self.re as f64), json_number(self.im as f64)])
            }

            fn from_json(v: &Value) -> Result<Self, String> {
                match v {
                    Value::Array(parts) if parts.len() == 2 => Ok(Complex::new(
                        json_to_f64(&parts[0])? as $f,
                        json_to_f64(&parts[1])? as $f,
                    )),
                    Value::Array(_) => Err("complex scalar must be a [re, im] pair".into()),
                    other => json_to_f64(other).map(|re| Complex::new(re as $f, 0.0)),
                }
            }
        }
    };
}

impl_float_real!(f64, 1e-12);
impl_float_real!(f32, 1e-5);

impl Scalar for BigRational {
    type Real = BigRational;
    const FIELD: ScalarField = ScalarField::Real;

    fn modulus(&self) -> Self {
        self.abs()
    }

    fn from_real(r: Self) -> Self {
        r
    }

    fn conj(&self) -> Self {
        self.clone()
    }

    fn phase_align(&self) -> Self {
        if self.is_negative() {
            -Self::one()
        } else {
            Self::one()
        }
    }

    fn from_f64_parts(re: f64, _im: f64) -> Self {
        <Self as Real>::from_f64(re)
    }

    fn to_json(&self) -> Value {
        if self.is_integer() {
            if let Some(i) = self.numer().to_i64() {
                return Value::from(i);
            }
        }
        Value::String(format!("{}/{}", self.numer(), self.denom()))
    }

    fn from_json(v: &Value) -> Result<Self, String> {
        match v {
            Value::Number(n) => parse_rational(&n.to_string()),
            Value::String(s) => parse_rational(s),
            other => Err(format!("expected a rational scalar, found {other}")),
        }
    }
}

impl Real for BigRational {
    const EXACT: bool = true;

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn from_f64(x: f64) -> Self {
        BigRational::from_float(x).unwrap_or_else(BigRational::zero)
    }

    fn nth_root(&self, n: u32) -> Self {
        if n == 1 || self.is_zero() {
            return self.clone();
        }
        let num_root = self.numer().nth_root(n);
        let den_root = self.denom().nth_root(n);
        if num_traits::pow(num_root.clone(), n as usize) == *self.numer()
            && num_traits::pow(den_root.clone(), n as usize) == *self.denom()
        {
            return BigRational::new(num_root, den_root);
        }
        <Self as Real>::from_f64(Real::to_f64(self).powf(1.0 / n as f64))
    }

    fn default_tolerance() -> f64 {
        0.0
    }
}

fn json_number(x: f64) -> Value {
    serde_json::Number::from_f64(x)
        .map(Value::Number)
        .unwrap_or(Value::Null)
}

fn json_to_f64(v: &Value) -> Result<f64, String> {
    match v {
        Value::Number(n) => n.as_f64().ok_or_else(|| format!("number {n} out of range")),
        Value::String(s) => {
            let q = parse_rational(s)?;
            Ok(Real::to_f64(&q))
        }
        other => Err(format!("expected a real scalar, found {other}")),
    }
}

/// Parses `"p/q"`, integers and decimal literals (with optional exponent)
/// into an exact rational.
pub fn parse_rational(text: &str) -> Result<BigRational, String> {
    let s = text.trim();
    if s.is_empty() {
        return Err("empty rational literal".into());
    }
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| format!("bad numerator in {s:?}"))?;
        let q: BigInt = q.trim().parse().map_err(|_| format!("bad denominator in {s:?}"))?;
        if q.is_zero() {
            return Err(format!("zero denominator in {s:?}"));
        }
        return Ok(BigRational::new(p, q));
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => {
            let e: i64 = s[pos + 1..]
                .parse()
                .map_err(|_| format!("bad exponent in {s:?}"))?;
            (&s[..pos], e)
        }
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(format!("no digits in {s:?}"));
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(format!("not a number: {s:?}"));
    }
    let all_digits = format!("{int_part}{frac_part}");
    let mut numer: BigInt = if all_digits.is_empty() {
        BigInt::zero()
    } else {
        all_digits.parse().map_err(|_| format!("not a number: {s:?}"))?
    };
    if negative {
        numer = -numer;
    }
    let scale = exponent - frac_part.len() as i64;
    let ten = BigInt::from(10u32);
    let value = if scale >= 0 {
        BigRational::from_integer(numer * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(numer, num_traits::pow(ten, (-scale) as usize))
    };
    Ok(value)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(p: i64, d: i64) -> BigRational {
        BigRational::new(p.into(), d.into())
    }

    #[test]
    fn parses_rational_literals() {
        assert_eq!(parse_rational("3/4").unwrap(), q(3, 4));
        assert_eq!(parse_rational("-0.125").unwrap(), q(-1, 8));
        assert_eq!(parse_rational("0.1").unwrap(), q(1, 10));
        assert_eq!(parse_rational("2").unwrap(), q(2, 1));
        assert_eq!(parse_rational("1.5e2").unwrap(), q(150, 1));
        assert_eq!(parse_rational("25e-2").unwrap(), q(1, 4));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational(".").is_err());
    }

    #[test]
    fn rational_roots_are_exact_for_perfect_powers() {
        assert_eq!(q(16, 81).nth_root(4), q(2, 3));
        assert_eq!(q(1, 4).nth_root(2), q(1, 2));
        let r = q(2, 1).nth_root(2);
        assert!((Real::to_f64(&r) - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn phase_alignment_makes_products_positive() {
        let z = Complex::new(3.0f64, -4.0);
        let aligned = z.phase_align() * z;
        assert!((aligned.re - 5.0).abs() < 1e-12 && aligned.im.abs() < 1e-12);
        assert_eq!((-2.5f64).phase_align(), -1.0);
        assert_eq!(q(-1, 3).phase_align(), q(-1, 1));
    }

    #[test]
    fn json_round_trip() {
        let x = q(-7, 3);
        assert_eq!(BigRational::from_json(&x.to_json()).unwrap(), x);
        let z = Complex::new(0.5f64, -1.0);
        assert_eq!(Complex::<f64>::from_json(&z.to_json()).unwrap(), z);
        assert_eq!(f64::from_json(&Value::String("1/4".into())).unwrap(), 0.25);
    }
}
