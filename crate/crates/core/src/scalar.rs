//! Exact scalars over Q or a prime field F_p.
//!
//! Every scalar carries its field tag. Mixing tags in one arithmetic operation
//! is a programming error and panics; all public constructors that take user
//! input go through [`Field::parse_scalar`] and report errors instead.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Largest prime modulus accepted for F_p.
pub const MAX_PRIME: u64 = 1 << 31;

/// The ground field of a computation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Field {
    Rational,
    Prime(u32),
}

impl Field {
    /// Builds `F_p`, rejecting composite or out-of-range moduli.
    pub fn prime(p: u64) -> Result<Field> {
        if !(2..=MAX_PRIME).contains(&p) || !is_prime(p) {
            return Err(Error::InvalidField(format!("{p} is not a prime in [2, 2^31]")));
        }
        Ok(Field::Prime(p as u32))
    }

    pub fn zero(self) -> FieldScalar {
        match self {
            Field::Rational => FieldScalar::Q(BigRational::zero()),
            Field::Prime(p) => FieldScalar::Fp { value: 0, modulus: p },
        }
    }

    pub fn one(self) -> FieldScalar {
        self.from_i64(1)
    }

    pub fn from_i64(self, n: i64) -> FieldScalar {
        match self {
            Field::Rational => FieldScalar::Q(BigRational::from_integer(BigInt::from(n))),
            Field::Prime(p) => FieldScalar::Fp {
                value: n.rem_euclid(p as i64) as u32,
                modulus: p,
            },
        }
    }

    /// `(-1)^e` as a scalar.
    pub fn sign(self, e: i64) -> FieldScalar {
        if e.rem_euclid(2) == 0 {
            self.one()
        } else {
            self.from_i64(-1)
        }
    }

    /// Parses `"n"` or `"n/d"` into this field.
    pub fn parse_scalar(self, s: &str) -> Result<FieldScalar> {
        let bad = || Error::Parse(format!("invalid scalar {s:?}"));
        let (num, den) = match s.trim().split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (s.trim(), "1"),
        };
        let num = BigInt::from_str(num).map_err(|_| bad())?;
        let den = BigInt::from_str(den).map_err(|_| bad())?;
        if den.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {s:?}")));
        }
        match self {
            Field::Rational => Ok(FieldScalar::Q(BigRational::new(num, den))),
            Field::Prime(p) => {
                let reduce = |x: &BigInt| -> u32 {
                    let m = BigInt::from(p);
                    (((x % &m) + &m) % &m).to_u32().unwrap()
                };
                let d = reduce(&den);
                if d == 0 {
                    return Err(Error::Parse(format!("denominator of {s:?} vanishes mod {p}")));
                }
                let n = FieldScalar::Fp { value: reduce(&num), modulus: p };
                Ok(n / FieldScalar::Fp { value: d, modulus: p })
            }
        }
    }

    pub fn characteristic(self) -> u32 {
        match self {
            Field::Rational => 0,
            Field::Prime(p) => p,
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Rational => write!(f, "Q"),
            Field::Prime(p) => write!(f, "Fp:{p}"),
        }
    }
}

impl FromStr for Field {
    type Err = Error;

    fn from_str(s: &str) -> Result<Field> {
        let t = s.trim();
        if t.eq_ignore_ascii_case("q") {
            return Ok(Field::Rational);
        }
        let lower = t.to_ascii_lowercase();
        if let Some(p) = lower.strip_prefix("fp:") {
            let p: u64 = p
                .trim()
                .parse()
                .map_err(|_| Error::InvalidField(format!("bad prime in {s:?}")))?;
            return Field::prime(p);
        }
        Err(Error::InvalidField(format!("unknown field {s:?}; expected Q or Fp:<p>")))
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// An exact field element: a reduced fraction or a residue mod p.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum FieldScalar {
    Q(BigRational),
    Fp { value: u32, modulus: u32 },
}

impl FieldScalar {
    pub fn field(&self) -> Field {
        match self {
            FieldScalar::Q(_) => Field::Rational,
            FieldScalar::Fp { modulus, .. } => Field::Prime(*modulus),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            FieldScalar::Q(q) => q.is_zero(),
            FieldScalar::Fp { value, .. } => *value == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            FieldScalar::Q(q) => q.is_one(),
            FieldScalar::Fp { value, .. } => *value == 1,
        }
    }

    /// Multiplicative inverse; panics on zero.
    pub fn inv(&self) -> FieldScalar {
        assert!(!self.is_zero(), "inverse of zero");
        match self {
            FieldScalar::Q(q) => FieldScalar::Q(q.recip()),
            FieldScalar::Fp { value, modulus } => FieldScalar::Fp {
                value: pow_mod(*value as u64, *modulus as u64 - 2, *modulus as u64) as u32,
                modulus: *modulus,
            },
        }
    }

    /// Canonical `"num/den"` (or `"num"`) rendering used in JSON files.
    pub fn to_fraction_string(&self) -> String {
        match self {
            FieldScalar::Q(q) => {
                if q.denom().is_one() {
                    q.numer().to_string()
                } else {
                    format!("{}/{}", q.numer(), q.denom())
                }
            }
            FieldScalar::Fp { value, .. } => value.to_string(),
        }
    }

    fn check(&self, other: &FieldScalar) {
        debug_assert_eq!(self.field(), other.field(), "field mismatch in scalar arithmetic");
    }
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1u64;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    r
}

impl fmt::Display for FieldScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_fraction_string())
    }
}

impl<'a> Add<&'a FieldScalar> for &'a FieldScalar {
    type Output = FieldScalar;
    fn add(self, rhs: &FieldScalar) -> FieldScalar {
        self.check(rhs);
        match (self, rhs) {
            (FieldScalar::Q(a), FieldScalar::Q(b)) => FieldScalar::Q(a + b),
            (FieldScalar::Fp { value: a, modulus }, FieldScalar::Fp { value: b, .. }) => {
                FieldScalar::Fp {
                    value: ((*a as u64 + *b as u64) % *modulus as u64) as u32,
                    modulus: *modulus,
                }
            }
            _ => panic!("field mismatch"),
        }
    }
}

impl<'a> Sub<&'a FieldScalar> for &'a FieldScalar {
    type Output = FieldScalar;
    fn sub(self, rhs: &FieldScalar) -> FieldScalar {
        self + &(-rhs)
    }
}

impl<'a> Mul<&'a FieldScalar> for &'a FieldScalar {
    type Output = FieldScalar;
    fn mul(self, rhs: &FieldScalar) -> FieldScalar {
        self.check(rhs);
        match (self, rhs) {
            (FieldScalar::Q(a), FieldScalar::Q(b)) => FieldScalar::Q(a * b),
            (FieldScalar::Fp { value: a, modulus }, FieldScalar::Fp { value: b, .. }) => {
                FieldScalar::Fp {
                    value: ((*a as u64 * *b as u64) % *modulus as u64) as u32,
                    modulus: *modulus,
                }
            }
            _ => panic!("field mismatch"),
        }
    }
}

impl<'a> Div<&'a FieldScalar> for &'a FieldScalar {
    type Output = FieldScalar;
    fn div(self, rhs: &FieldScalar) -> FieldScalar {
        match (self, rhs) {
            (FieldScalar::Q(a), FieldScalar::Q(b)) => {
                assert!(!b.is_zero(), "division by zero");
                FieldScalar::Q(a / b)
            }
            _ => self * &rhs.inv(),
        }
    }
}

impl Neg for &FieldScalar {
    type Output = FieldScalar;
    fn neg(self) -> FieldScalar {
        match self {
            FieldScalar::Q(a) => FieldScalar::Q(-a),
            FieldScalar::Fp { value, modulus } => FieldScalar::Fp {
                value: if *value == 0 { 0 } else { modulus - value },
                modulus: *modulus,
            },
        }
    }
}

macro_rules! owned_binop {
    ($tr:ident, $m:ident) => {
        impl $tr for FieldScalar {
            type Output = FieldScalar;
            fn $m(self, rhs: FieldScalar) -> FieldScalar {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a FieldScalar> for FieldScalar {
            type Output = FieldScalar;
            fn $m(self, rhs: &FieldScalar) -> FieldScalar {
                (&self).$m(rhs)
            }
        }
    };
}
owned_binop!(Add, add);
owned_binop!(Sub, sub);
owned_binop!(Mul, mul);
owned_binop!(Div, div);

impl Neg for FieldScalar {
    type Output = FieldScalar;
    fn neg(self) -> FieldScalar {
        match self {
            FieldScalar::Q(a) => FieldScalar::Q(-a),
            other => -&other,
        }
    }
}

impl AddAssign<&FieldScalar> for FieldScalar {
    fn add_assign(&mut self, rhs: &FieldScalar) {
        match (self, rhs) {
            (FieldScalar::Q(a), FieldScalar::Q(b)) => *a += b,
            (s, r) => *s = &*s + r,
        }
    }
}

impl SubAssign<&FieldScalar> for FieldScalar {
    fn sub_assign(&mut self, rhs: &FieldScalar) {
        match (self, rhs) {
            (FieldScalar::Q(a), FieldScalar::Q(b)) => *a -= b,
            (s, r) => *s = &*s - r,
        }
    }
}

impl MulAssign<&FieldScalar> for FieldScalar {
    fn mul_assign(&mut self, rhs: &FieldScalar) {
        *self = &*self * rhs;
    }
}

impl FieldScalar {
    /// True for Q scalars that are negative; F_p scalars are never negative.
    pub fn is_negative(&self) -> bool {
        matches!(self, FieldScalar::Q(q) if q.is_negative())
    }
}
