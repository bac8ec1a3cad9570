//! Scalar domains shared by every module.
//!
//! Three domains are supported: exact rationals ([`Rational`]), exact
//! Gaussian rationals ([`QComplex`]) and double-precision complex numbers
//! ([`Complex64`]). Exact domains decide equality; the numeric domain uses
//! exact comparisons inside algebraic routines and explicit tolerances in
//! the numeric ones (root finding, Newton, finite differences).

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::{Complex, Complex64};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

pub type Rational = BigRational;
pub type QComplex = Complex<BigRational>;

/// Field operations plus the few extras the algorithms need.
pub trait Scalar:
    Clone
    + fmt::Debug
    + PartialEq
    + Send
    + Sync
    + 'static
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// Whether equality in this domain is decided exactly.
    const EXACT: bool;
    /// Domain tag used in serialized polynomials.
    const DOMAIN: &'static str;

    fn from_i64(v: i64) -> Self;
    fn from_rational(q: &Rational) -> Self;
    fn to_complex(&self) -> Complex64;

    fn magnitude(&self) -> f64 {
        self.to_complex().norm()
    }

    /// Total order used for canonical sorting: real part, then imaginary part.
    fn canonical_cmp(&self, other: &Self) -> Ordering;

    fn inv(&self) -> Self {
        Self::one() / self.clone()
    }

    /// Integer power; negative exponents invert. `0^0 = 1`.
    fn powi(&self, e: i64) -> Self {
        let mut base = if e < 0 { self.inv() } else { self.clone() };
        let mut n = e.unsigned_abs();
        let mut acc = Self::one();
        while n > 0 {
            if n & 1 == 1 {
                acc = acc * base.clone();
            }
            n >>= 1;
            if n > 0 {
                base = base.clone() * base;
            }
        }
        acc
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;
    const DOMAIN: &'static str = "rational";

    fn from_i64(v: i64) -> Self {
        Rational::from_integer(BigInt::from(v))
    }

    fn from_rational(q: &Rational) -> Self {
        q.clone()
    }

    fn to_complex(&self) -> Complex64 {
        Complex64::new(self.to_f64().unwrap_or(f64::NAN), 0.0)
    }

    fn magnitude(&self) -> f64 {
        self.abs().to_f64().unwrap_or(f64::INFINITY)
    }

    fn canonical_cmp(&self, other: &Self) -> Ordering {
        self.cmp(other)
    }
}

impl Scalar for QComplex {
    const EXACT: bool = true;
    const DOMAIN: &'static str = "complex-rational";

    fn from_i64(v: i64) -> Self {
        Complex::new(Rational::from_i64(v), Rational::zero())
    }

    fn from_rational(q: &Rational) -> Self {
        Complex::new(q.clone(), Rational::zero())
    }

    fn to_complex(&self) -> Complex64 {
        Complex64::new(
            self.re.to_f64().unwrap_or(f64::NAN),
            self.im.to_f64().unwrap_or(f64::NAN),
        )
    }

    fn canonical_cmp(&self, other: &Self) -> Ordering {
        self.re.cmp(&other.re).then_with(|| self.im.cmp(&other.im))
    }
}

impl Scalar for Complex64 {
    const EXACT: bool = false;
    const DOMAIN: &'static str = "complex";

    fn from_i64(v: i64) -> Self {
        Complex64::new(v as f64, 0.0)
    }

    fn from_rational(q: &Rational) -> Self {
        Complex64::new(q.to_f64().unwrap_or(f64::NAN), 0.0)
    }

    fn to_complex(&self) -> Complex64 {
        *self
    }

    fn canonical_cmp(&self, other: &Self) -> Ordering {
        self.re
            .total_cmp(&other.re)
            .then_with(|| self.im.total_cmp(&other.im))
    }

    fn powi(&self, e: i64) -> Self {
        if e >= i32::MIN as i64 && e <= i32::MAX as i64 {
            Complex64::powi(self, e as i32)
        } else {
            self.powf(e as f64)
        }
    }
}

pub fn rat(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

pub fn int(p: i64) -> Rational {
    Rational::from_integer(BigInt::from(p))
}

/// Canonical `"p/q"` form with `q > 0` and `gcd(p, q) = 1`; integers keep `/1`.
pub fn fmt_rational(q: &Rational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("malformed rational {input:?}: {reason}")]
pub struct ParseRationalError {
    pub input: String,
    pub reason: &'static str,
}

/// Parses `"p/q"` or `"p"`. Whitespace around the parts is not accepted.
pub fn parse_rational(s: &str) -> Result<Rational, ParseRationalError> {
    let err = |reason| ParseRationalError {
        input: s.to_string(),
        reason,
    };
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n, Some(d)),
        None => (s, None),
    };
    let parse_int = |t: &str| -> Result<BigInt, ParseRationalError> {
        let digits = t.strip_prefix(['-', '+']).unwrap_or(t);
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(err("expected an integer"));
        }
        t.parse::<BigInt>().map_err(|_| err("expected an integer"))
    };
    let n = parse_int(num)?;
    let d = match den {
        Some(d) => parse_int(d)?,
        None => BigInt::one(),
    };
    if d.is_zero() {
        return Err(err("zero denominator"));
    }
    Ok(Rational::new(n, d))
}

/// Exact Gaussian rational from integer parts.
pub fn qc(re: Rational, im: Rational) -> QComplex {
    Complex::new(re, im)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_round_trip() {
        let q = parse_rational("-6/4").unwrap();
        assert_eq!(fmt_rational(&q), "-3/2");
        assert_eq!(fmt_rational(&parse_rational("7").unwrap()), "7/1");
        assert_eq!(fmt_rational(&parse_rational("3/-6").unwrap()), "-1/2");
    }

    #[test]
    fn rejects_malformed() {
        assert_eq!(parse_rational("1/0").unwrap_err().reason, "zero denominator");
        assert!(parse_rational("").is_err());
        assert!(parse_rational("1.5").is_err());
        assert!(parse_rational("a/2").is_err());
        assert!(parse_rational("1/").is_err());
    }

    #[test]
    fn integer_powers() {
        assert_eq!(rat(2, 3).powi(3), rat(8, 27));
        assert_eq!(rat(2, 3).powi(-2), rat(9, 4));
        assert_eq!(int(0).powi(0), int(1));
        let i = qc(int(0), int(1));
        assert_eq!(i.powi(2), qc(int(-1), int(0)));
        assert_eq!(i.powi(-1), qc(int(0), int(-1)));
    }
}
