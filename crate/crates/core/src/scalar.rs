//! Exact field elements over the rationals and prime fields.
//!
//! Every computation in this crate is exact. Operator impls (`+`, `*`, ...)
//! panic when the two operands come from different fields; that can only
//! happen through a programming error inside the crate. The `checked_*`
//! methods return [`ScalarError`] instead and are what external callers
//! should use.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScalarError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("field mismatch: {0} vs {1}")]
    FieldMismatch(Field, Field),
    #[error("cannot parse coefficient `{0}`")]
    Parse(String),
    #[error("{0} is not a prime")]
    NotPrime(u64),
}

/// The ground field: ℚ or 𝔽ₚ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Field {
    Rationals,
    Prime(u64),
}

impl Field {
    pub fn prime(p: u64) -> Result<Field, ScalarError> {
        if is_prime(p) {
            Ok(Field::Prime(p))
        } else {
            Err(ScalarError::NotPrime(p))
        }
    }

    pub fn zero(self) -> Scalar {
        match self {
            Field::Rationals => Scalar::Rational(BigRational::zero()),
            Field::Prime(p) => Scalar::Mod { value: 0, p },
        }
    }

    pub fn one(self) -> Scalar {
        self.from_i64(1)
    }

    pub fn from_i64(self, n: i64) -> Scalar {
        match self {
            Field::Rationals => Scalar::Rational(BigRational::from_integer(BigInt::from(n))),
            Field::Prime(p) => Scalar::Mod { value: n.rem_euclid(p as i64) as u64, p },
        }
    }

    /// `(-1)^e` as a field element.
    pub fn sign(self, e: i64) -> Scalar {
        if e.rem_euclid(2) == 0 {
            self.one()
        } else {
            -self.one()
        }
    }

    pub fn characteristic(self) -> u64 {
        match self {
            Field::Rationals => 0,
            Field::Prime(p) => p,
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Rationals => write!(f, "Q"),
            Field::Prime(p) => write!(f, "Fp {p}"),
        }
    }
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Extended Euclid inverse of `a` modulo `p`.
fn mod_inverse(a: u64, p: u64) -> Option<u64> {
    let (mut r0, mut r1) = (p as i128, a as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 != 1 {
        return None;
    }
    Some(t0.rem_euclid(p as i128) as u64)
}

/// An element of a [`Field`], always in canonical form.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Scalar {
    Rational(BigRational),
    Mod { value: u64, p: u64 },
}

impl Scalar {
    pub fn field(&self) -> Field {
        match self {
            Scalar::Rational(_) => Field::Rationals,
            Scalar::Mod { p, .. } => Field::Prime(*p),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Rational(q) => q.is_zero(),
            Scalar::Mod { value, .. } => *value == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Rational(q) => q.is_one(),
            Scalar::Mod { value, .. } => *value == 1,
        }
    }

    pub fn inv(&self) -> Result<Scalar, ScalarError> {
        if self.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        Ok(match self {
            Scalar::Rational(q) => Scalar::Rational(q.recip()),
            Scalar::Mod { value, p } => Scalar::Mod {
                value: mod_inverse(*value, *p).expect("p is prime"),
                p: *p,
            },
        })
    }

    fn same_field(&self, other: &Scalar) -> Result<(), ScalarError> {
        if self.field() == other.field() {
            Ok(())
        } else {
            Err(ScalarError::FieldMismatch(self.field(), other.field()))
        }
    }

    pub fn checked_add(&self, other: &Scalar) -> Result<Scalar, ScalarError> {
        self.same_field(other)?;
        Ok(self + other)
    }

    pub fn checked_sub(&self, other: &Scalar) -> Result<Scalar, ScalarError> {
        self.same_field(other)?;
        Ok(self - other)
    }

    pub fn checked_mul(&self, other: &Scalar) -> Result<Scalar, ScalarError> {
        self.same_field(other)?;
        Ok(self * other)
    }

    pub fn checked_div(&self, other: &Scalar) -> Result<Scalar, ScalarError> {
        self.same_field(other)?;
        Ok(self * &other.inv()?)
    }

    /// Parses `[-]digits[/digits]`. Over 𝔽ₚ the integer is reduced and the
    /// `/` form multiplies by a modular inverse.
    pub fn parse(text: &str, field: Field) -> Result<Scalar, ScalarError> {
        let bad = || ScalarError::Parse(text.to_string());
        let (neg, body) = match text.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, text),
        };
        let (num, den) = match body.split_once('/') {
            Some((n, d)) => (n, Some(d)),
            None => (body, None),
        };
        let digits = |s: &str| -> Result<BigInt, ScalarError> {
            if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
                return Err(bad());
            }
            s.parse::<BigInt>().map_err(|_| bad())
        };
        let mut n = digits(num)?;
        if neg {
            n = -n;
        }
        let d = match den {
            Some(d) => digits(d)?,
            None => BigInt::one(),
        };
        if d.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        match field {
            Field::Rationals => Ok(Scalar::Rational(BigRational::new(n, d))),
            Field::Prime(p) => {
                let reduce = |x: &BigInt| -> Scalar {
                    let r = x.mod_floor(&BigInt::from(p));
                    Scalar::Mod { value: r.to_u64().expect("residue fits"), p }
                };
                reduce(&n).checked_div(&reduce(&d))
            }
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rational(q) => {
                if q.denom().is_one() {
                    write!(f, "{}", q.numer())
                } else {
                    write!(f, "{}/{}", q.numer(), q.denom())
                }
            }
            Scalar::Mod { value, .. } => write!(f, "{value}"),
        }
    }
}

fn mismatch(a: &Scalar, b: &Scalar) -> ! {
    panic!("scalar field mismatch: {} vs {}", a.field(), b.field())
}

impl Add for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(a + b),
            (Scalar::Mod { value: a, p }, Scalar::Mod { value: b, p: q }) if p == q => {
                Scalar::Mod { value: ((*a as u128 + *b as u128) % *p as u128) as u64, p: *p }
            }
            _ => mismatch(self, rhs),
        }
    }
}

impl Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        self + &(-rhs)
    }
}

impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(a * b),
            (Scalar::Mod { value: a, p }, Scalar::Mod { value: b, p: q }) if p == q => {
                Scalar::Mod { value: ((*a as u128 * *b as u128) % *p as u128) as u64, p: *p }
            }
            _ => mismatch(self, rhs),
        }
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Rational(a) => Scalar::Rational(-a),
            Scalar::Mod { value, p } => Scalar::Mod { value: (p - value) % p, p: *p },
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl Add for Scalar {
    type Output = Scalar;
    fn add(self, rhs: Scalar) -> Scalar {
        &self + &rhs
    }
}

impl Sub for Scalar {
    type Output = Scalar;
    fn sub(self, rhs: Scalar) -> Scalar {
        &self - &rhs
    }
}

impl Mul for Scalar {
    type Output = Scalar;
    fn mul(self, rhs: Scalar) -> Scalar {
        &self * &rhs
    }
}

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &Scalar) {
        *self = &*self + rhs;
    }
}

impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, rhs: &Scalar) {
        *self = &*self - rhs;
    }
}

/// Numerator and denominator of a rational scalar; used by the fraction-free
/// elimination path.
pub(crate) fn rational_parts(s: &Scalar) -> (BigInt, BigInt) {
    match s {
        Scalar::Rational(q) => (q.numer().clone(), q.denom().clone()),
        Scalar::Mod { .. } => unreachable!("rational_parts on a prime-field scalar"),
    }
}

pub(crate) fn from_bigint_ratio(n: BigInt, d: BigInt) -> Scalar {
    Scalar::Rational(BigRational::new(n, d))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> Scalar {
        Scalar::parse(s, Field::Rationals).unwrap()
    }

    #[test]
    fn add_fractions() {
        assert_eq!(q("1/2").checked_add(&q("1/3")).unwrap(), q("5/6"));
    }

    #[test]
    fn mul_mod_seven() {
        let f7 = Field::prime(7).unwrap();
        assert_eq!(f7.from_i64(2) * f7.from_i64(4), f7.one());
    }

    #[test]
    fn inverse_of_zero() {
        assert_eq!(Field::Rationals.zero().inv(), Err(ScalarError::DivisionByZero));
        assert_eq!(Field::Prime(5).zero().inv(), Err(ScalarError::DivisionByZero));
    }

    #[test]
    fn parse_canonicalizes() {
        assert_eq!(q("-3/6"), q("-1/2"));
        assert_eq!(q("-3/6").to_string(), "-1/2");
        let f7 = Field::prime(7).unwrap();
        assert_eq!(Scalar::parse("10", f7).unwrap(), f7.from_i64(3));
        assert_eq!(Scalar::parse("1/3", f7).unwrap(), f7.from_i64(5));
        assert_eq!(Scalar::parse("-1", f7).unwrap(), f7.from_i64(6));
    }

    #[test]
    fn parse_errors() {
        assert_eq!(Scalar::parse("1/0", Field::Rationals), Err(ScalarError::DivisionByZero));
        assert_eq!(Scalar::parse("7/7", Field::Prime(7)), Err(ScalarError::DivisionByZero));
        for bad in ["", "-", "1/", "/2", "1.5", "+3", "x", "1/-2"] {
            assert!(matches!(Scalar::parse(bad, Field::Rationals), Err(ScalarError::Parse(_))), "{bad}");
        }
    }

    #[test]
    fn field_mismatch() {
        let a = Field::Prime(3).one();
        let b = Field::Prime(5).one();
        assert_eq!(a.checked_add(&b), Err(ScalarError::FieldMismatch(Field::Prime(3), Field::Prime(5))));
        assert!(Field::prime(9).is_err());
        assert!(Field::prime(1).is_err());
    }

    #[test]
    fn signs() {
        let f = Field::Rationals;
        assert_eq!(f.sign(-3), -f.one());
        assert_eq!(f.sign(4), f.one());
    }
}
