//! Exact field scalars: the rationals and prime fields `F_p` with `p <= 2^31`.
//!
//! Every arithmetic operation is exact; there is no floating point anywhere
//! in this crate. `F_p` values are kept as canonical representatives in
//! `[0, p)`, rationals as reduced `BigRational`s.

use num::{BigInt, BigRational, One, Signed, Zero};
use std::fmt;

/// The field a scalar or matrix lives over.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Field {
    /// Prime field with `p` elements, `p` prime, `p <= 2^31`.
    Fp(u64),
    /// The rational numbers with arbitrary-precision integers.
    Rat,
}

impl Field {
    /// Validates the field descriptor (primality of `p`).
    pub fn validate(self) -> Result<Self, String> {
        match self {
            Field::Fp(p) => {
                if p < 2 || p > (1 << 31) {
                    return Err(format!("modulus {p} out of range"));
                }
                if !is_prime(p) {
                    return Err(format!("modulus {p} is not prime"));
                }
                Ok(self)
            }
            Field::Rat => Ok(self),
        }
    }

    pub fn zero(self) -> Scalar {
        match self {
            Field::Fp(p) => Scalar::Fp { p, v: 0 },
            Field::Rat => Scalar::Rat(BigRational::zero()),
        }
    }

    pub fn one(self) -> Scalar {
        match self {
            Field::Fp(p) => Scalar::Fp { p, v: 1 },
            Field::Rat => Scalar::Rat(BigRational::one()),
        }
    }

    /// Embeds a signed integer.
    pub fn scalar(self, n: i64) -> Scalar {
        match self {
            Field::Fp(p) => {
                let m = n.rem_euclid(p as i64) as u64;
                Scalar::Fp { p, v: m }
            }
            Field::Rat => Scalar::Rat(BigRational::from_integer(BigInt::from(n))),
        }
    }

    /// All field elements, for exhaustive enumeration. Panics over the rationals.
    pub fn elements(self) -> Vec<Scalar> {
        match self {
            Field::Fp(p) => (0..p).map(|v| Scalar::Fp { p, v }).collect(),
            Field::Rat => panic!("cannot enumerate the rationals"),
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Field::Fp(_))
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// An exact field element. Carries its own field tag so arithmetic can
/// check compatibility; mixing fields is a programming error and panics.
#[derive(Clone, PartialEq, Eq)]
pub enum Scalar {
    Fp { p: u64, v: u64 },
    Rat(BigRational),
}

impl Scalar {
    pub fn field(&self) -> Field {
        match self {
            Scalar::Fp { p, .. } => Field::Fp(*p),
            Scalar::Rat(_) => Field::Rat,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Fp { v, .. } => *v == 0,
            Scalar::Rat(r) => r.is_zero(),
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Fp { v, .. } => *v == 1,
            Scalar::Rat(r) => r.is_one(),
        }
    }

    pub fn add(&self, rhs: &Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Fp { p, v }, Scalar::Fp { p: q, v: w }) => {
                assert_eq!(p, q, "field mismatch");
                Scalar::Fp { p: *p, v: (v + w) % p }
            }
            (Scalar::Rat(a), Scalar::Rat(b)) => Scalar::Rat(a + b),
            _ => panic!("field mismatch"),
        }
    }

    pub fn sub(&self, rhs: &Scalar) -> Scalar {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> Scalar {
        match self {
            Scalar::Fp { p, v } => Scalar::Fp { p: *p, v: if *v == 0 { 0 } else { p - v } },
            Scalar::Rat(r) => Scalar::Rat(-r),
        }
    }

    pub fn mul(&self, rhs: &Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Fp { p, v }, Scalar::Fp { p: q, v: w }) => {
                assert_eq!(p, q, "field mismatch");
                // p <= 2^31 so v*w fits in u64.
                Scalar::Fp { p: *p, v: (v * w) % p }
            }
            (Scalar::Rat(a), Scalar::Rat(b)) => Scalar::Rat(a * b),
            _ => panic!("field mismatch"),
        }
    }

    /// Multiplicative inverse. Panics on zero.
    pub fn inv(&self) -> Scalar {
        match self {
            Scalar::Fp { p, v } => {
                assert!(*v != 0, "inverse of zero");
                Scalar::Fp { p: *p, v: pow_mod(*v, p - 2, *p) }
            }
            Scalar::Rat(r) => {
                assert!(!r.is_zero(), "inverse of zero");
                Scalar::Rat(r.recip())
            }
        }
    }

    pub fn div(&self, rhs: &Scalar) -> Scalar {
        self.mul(&rhs.inv())
    }

    pub fn pow(&self, mut n: u64) -> Scalar {
        let mut acc = self.field().one();
        let mut base = self.clone();
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            n >>= 1;
        }
        acc
    }
}

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    acc
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Fp { v, .. } => write!(f, "{v}"),
            Scalar::Rat(r) => {
                if r.denom().is_one() {
                    write!(f, "{}", r.numer())
                } else {
                    write!(f, "{}/{}", r.numer(), r.denom())
                }
            }
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Parses "a" or "a/b" into a rational scalar; integers into `F_p`.
pub fn parse_scalar(field: Field, text: &str) -> Result<Scalar, String> {
    match field {
        Field::Fp(_) => {
            let n: i64 = text.parse().map_err(|_| format!("bad F_p scalar {text:?}"))?;
            Ok(field.scalar(n))
        }
        Field::Rat => {
            let (num, den) = match text.split_once('/') {
                Some((a, b)) => (a, b),
                None => (text, "1"),
            };
            let n: BigInt = num.parse().map_err(|_| format!("bad numerator {num:?}"))?;
            let d: BigInt = den.parse().map_err(|_| format!("bad denominator {den:?}"))?;
            if d.is_zero() {
                return Err("zero denominator".into());
            }
            let r = BigRational::new(n, d);
            let _ = r.is_negative();
            Ok(Scalar::Rat(r))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fp_arithmetic_is_exact() {
        let f = Field::Fp(7);
        let a = f.scalar(3);
        let b = f.scalar(5);
        assert_eq!(a.add(&b), f.scalar(1));
        assert_eq!(a.mul(&b), f.scalar(1));
        assert_eq!(a.neg(), f.scalar(4));
        assert_eq!(a.inv().mul(&a), f.one());
    }

    #[test]
    fn every_nonzero_fp_element_inverts() {
        for p in [2u64, 3, 5, 7, 11] {
            let f = Field::Fp(p);
            for s in f.elements() {
                if !s.is_zero() {
                    assert!(s.inv().mul(&s).is_one());
                }
            }
        }
    }

    #[test]
    fn rational_arithmetic_reduces() {
        let f = Field::Rat;
        let half = parse_scalar(f, "1/2").unwrap();
        let third = parse_scalar(f, "2/6").unwrap();
        assert_eq!(parse_scalar(f, "1/3").unwrap(), third);
        let sum = half.add(&third);
        assert_eq!(sum, parse_scalar(f, "5/6").unwrap());
        assert!(sum.mul(&sum.inv()).is_one());
    }

    #[test]
    fn field_validation_rejects_composites() {
        assert!(Field::Fp(6).validate().is_err());
        assert!(Field::Fp(1).validate().is_err());
        assert!(Field::Fp(7).validate().is_ok());
        assert!(Field::Fp(2147483647).validate().is_ok());
    }
}
