//! Exact complex-rational scalars.
//!
//! Level matrices of single words have 0/1 entries and relation checks must
//! be exact, so matrix entries and linear-combination coefficients are
//! complex numbers with arbitrary-precision rational parts. Conversion to
//! `f64` happens only at the numeric boundary (norm estimation, JSON output).

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{Signed, ToPrimitive, Zero};
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

pub type Rational = BigRational;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Scalar {
    pub re: Rational,
    pub im: Rational,
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar {
            re: Rational::zero(),
            im: Rational::zero(),
        }
    }

    pub fn one() -> Self {
        Scalar::from_int(1)
    }

    pub fn from_int(n: i64) -> Self {
        Scalar {
            re: Rational::from_integer(BigInt::from(n)),
            im: Rational::zero(),
        }
    }

    pub fn from_rational(re: Rational) -> Self {
        Scalar {
            re,
            im: Rational::zero(),
        }
    }

    pub fn new(re: Rational, im: Rational) -> Self {
        Scalar { re, im }
    }

    /// Exact rational `num/den`.
    pub fn from_ratio(num: i64, den: i64) -> Self {
        Scalar {
            re: Rational::new(BigInt::from(num), BigInt::from(den)),
            im: Rational::zero(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Scalar {
            re: self.re.clone(),
            im: -self.im.clone(),
        }
    }

    /// |z|^2 as an exact rational.
    pub fn abs_sq(&self) -> Rational {
        &self.re * &self.re + &self.im * &self.im
    }

    /// |z| as a float.
    pub fn modulus(&self) -> f64 {
        rational_to_f64(&self.abs_sq()).sqrt()
    }

    pub fn to_f64_pair(&self) -> (f64, f64) {
        (rational_to_f64(&self.re), rational_to_f64(&self.im))
    }
}

pub fn rational_to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // fall back to a quotient of approximations for extreme magnitudes
        let n = r.numer().to_f64().unwrap_or(f64::NAN);
        let d = r.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

/// Parses a decimal (`1`, `-0.25`) or ratio (`2/3`) literal as an exact rational.
pub fn rational_from_str(s: &str) -> Option<Rational> {
    let s = s.trim();
    if let Some((num, den)) = s.split_once('/') {
        let n: BigInt = num.trim().parse().ok()?;
        let d: BigInt = den.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(Rational::new(n, d));
    }
    if let Some((int_part, frac_part)) = s.split_once('.') {
        if frac_part.is_empty() || !frac_part.chars().all(|c| c.is_ascii_digit()) {
            return None;
        }
        let negative = int_part.starts_with('-');
        let int_digits = int_part.trim_start_matches(['-', '+']);
        if !int_digits.chars().all(|c| c.is_ascii_digit()) || int_digits.is_empty() {
            return None;
        }
        let scale = BigInt::from(10u32).pow(frac_part.len() as u32);
        let combined: BigInt = format!("{int_digits}{frac_part}").parse().ok()?;
        let signed = if negative { -combined } else { combined };
        return Some(Rational::new(signed, scale));
    }
    let n: BigInt = s.parse().ok()?;
    Some(Rational::from_integer(n))
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn fmt_rat(r: &Rational) -> String {
            if r.is_integer() {
                r.numer().to_string()
            } else {
                format!("{}/{}", r.numer(), r.denom())
            }
        }
        if self.im.is_zero() {
            write!(f, "{}", fmt_rat(&self.re))
        } else if self.re.is_zero() {
            write!(f, "{}i", fmt_rat(&self.im))
        } else if self.im.is_negative() {
            write!(f, "{}{}i", fmt_rat(&self.re), fmt_rat(&self.im))
        } else {
            write!(f, "{}+{}i", fmt_rat(&self.re), fmt_rat(&self.im))
        }
    }
}

impl Add for Scalar {
    type Output = Scalar;
    fn add(self, rhs: Scalar) -> Scalar {
        Scalar {
            re: self.re + rhs.re,
            im: self.im + rhs.im,
        }
    }
}

impl AddAssign for Scalar {
    fn add_assign(&mut self, rhs: Scalar) {
        self.re += rhs.re;
        self.im += rhs.im;
    }
}

impl Sub for Scalar {
    type Output = Scalar;
    fn sub(self, rhs: Scalar) -> Scalar {
        Scalar {
            re: self.re - rhs.re,
            im: self.im - rhs.im,
        }
    }
}

impl Mul for Scalar {
    type Output = Scalar;
    fn mul(self, rhs: Scalar) -> Scalar {
        &self * &rhs
    }
}

impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        Scalar {
            re: &self.re * &rhs.re - &self.im * &rhs.im,
            im: &self.re * &rhs.im + &self.im * &rhs.re,
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar {
            re: -self.re,
            im: -self.im,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimal_literals_are_exact() {
        assert_eq!(rational_from_str("0.25").unwrap(), Rational::new(1.into(), 4.into()));
        assert_eq!(rational_from_str("-1.5").unwrap(), Rational::new((-3).into(), 2.into()));
        assert_eq!(rational_from_str("2/3").unwrap(), Rational::new(2.into(), 3.into()));
        assert_eq!(rational_from_str("7").unwrap(), Rational::from_integer(7.into()));
        assert!(rational_from_str("1.").is_none());
        assert!(rational_from_str("1/0").is_none());
    }

    #[test]
    fn complex_arithmetic() {
        let i = Scalar::new(Rational::zero(), Rational::from_integer(1.into()));
        let z = i.clone() * i.clone();
        assert_eq!(z, Scalar::from_int(-1));
        assert_eq!(i.conj(), Scalar::new(Rational::zero(), Rational::from_integer((-1).into())));
        assert_eq!(i.abs_sq(), Rational::from_integer(1.into()));
    }

    #[test]
    fn display_forms() {
        assert_eq!(Scalar::from_ratio(1, 3).to_string(), "1/3");
        assert_eq!(Scalar::from_int(-2).to_string(), "-2");
        let z = Scalar::new(Rational::from_integer(1.into()), Rational::new(1.into(), 2.into()));
        assert_eq!(z.to_string(), "1+1/2i");
    }
}
