//! Scalar fields for the lattice engine.
//!
//! Golden answers always use [`Q`] (arbitrary-precision rationals). [`Fp`] is a
//! large-prime field used for fast randomized sweeps; a rank computed over `Fp`
//! can only be smaller than the rational rank, never larger.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num::bigint::Sign;
use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};

/// Exact rational scalar.
pub type Q = BigRational;

pub trait Field:
    Clone
    + PartialEq
    + fmt::Debug
    + Send
    + Sync
    + Zero
    + One
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + 'static
{
    fn from_i64(v: i64) -> Self;

    /// `num / den`; `den` must be nonzero.
    fn from_ratio(num: &BigInt, den: &BigInt) -> Self;

    fn inv(&self) -> Self;

    fn mul_ref(&self, other: &Self) -> Self;

    /// `self -= a * b`.
    fn sub_mul_assign(&mut self, a: &Self, b: &Self);

    /// Numerator/denominator pair for serialization.
    fn to_ratio(&self) -> (BigInt, BigInt);
}

impl Field for Q {
    fn from_i64(v: i64) -> Self {
        Q::from_integer(BigInt::from(v))
    }

    fn from_ratio(num: &BigInt, den: &BigInt) -> Self {
        Q::new(num.clone(), den.clone())
    }

    fn inv(&self) -> Self {
        self.recip()
    }

    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }

    fn sub_mul_assign(&mut self, a: &Self, b: &Self) {
        *self -= a * b;
    }

    fn to_ratio(&self) -> (BigInt, BigInt) {
        (self.numer().clone(), self.denom().clone())
    }
}

/// Integers modulo the Mersenne prime 2^61 - 1.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Fp(u64);

impl Fp {
    pub const MODULUS: u64 = (1 << 61) - 1;

    pub fn new(v: u64) -> Self {
        Fp(v % Self::MODULUS)
    }

    pub fn value(self) -> u64 {
        self.0
    }

    fn reduce128(v: u128) -> u64 {
        let p = Self::MODULUS as u128;
        let folded = (v & p) + (v >> 61);
        let folded = (folded & p) + (folded >> 61);
        (folded % p) as u64
    }

    fn pow(self, mut e: u64) -> Self {
        let mut base = self;
        let mut acc = Fp(1);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }

    fn from_bigint(v: &BigInt) -> Self {
        let m = BigInt::from(Self::MODULUS);
        let mut r = v % &m;
        if r.sign() == Sign::Minus {
            r += &m;
        }
        Fp(r.to_u64().expect("reduced residue fits in u64"))
    }
}

impl fmt::Debug for Fp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Add for Fp {
    type Output = Fp;
    fn add(self, o: Fp) -> Fp {
        let s = self.0 + o.0;
        Fp(if s >= Self::MODULUS { s - Self::MODULUS } else { s })
    }
}

impl Sub for Fp {
    type Output = Fp;
    fn sub(self, o: Fp) -> Fp {
        if self.0 >= o.0 {
            Fp(self.0 - o.0)
        } else {
            Fp(self.0 + Self::MODULUS - o.0)
        }
    }
}

impl Mul for Fp {
    type Output = Fp;
    fn mul(self, o: Fp) -> Fp {
        Fp(Self::reduce128(self.0 as u128 * o.0 as u128))
    }
}

impl Neg for Fp {
    type Output = Fp;
    fn neg(self) -> Fp {
        if self.0 == 0 {
            self
        } else {
            Fp(Self::MODULUS - self.0)
        }
    }
}

impl Zero for Fp {
    fn zero() -> Self {
        Fp(0)
    }
    fn is_zero(&self) -> bool {
        self.0 == 0
    }
}

impl One for Fp {
    fn one() -> Self {
        Fp(1)
    }
}

impl Field for Fp {
    fn from_i64(v: i64) -> Self {
        if v >= 0 {
            Fp::new(v as u64)
        } else {
            -Fp::new(v.unsigned_abs())
        }
    }

    fn from_ratio(num: &BigInt, den: &BigInt) -> Self {
        let d = Fp::from_bigint(den);
        assert!(!d.is_zero(), "denominator vanishes modulo 2^61-1");
        Fp::from_bigint(num) * d.inv()
    }

    fn inv(&self) -> Self {
        assert!(!self.is_zero(), "inverse of zero");
        self.pow(Self::MODULUS - 2)
    }

    fn mul_ref(&self, other: &Self) -> Self {
        *self * *other
    }

    fn sub_mul_assign(&mut self, a: &Self, b: &Self) {
        *self = *self - *a * *b;
    }

    /// Residues are reported as the symmetric representative over 1.
    fn to_ratio(&self) -> (BigInt, BigInt) {
        let half = Self::MODULUS / 2;
        let v = if self.0 > half {
            -BigInt::from(Self::MODULUS - self.0)
        } else {
            BigInt::from(self.0)
        };
        (v, BigInt::one())
    }
}

/// Convenience constructor for small rationals.
pub fn q(num: i64, den: i64) -> Q {
    Q::new(BigInt::from(num), BigInt::from(den))
}

/// Formats a rational as `n` or `n/d`.
pub fn fmt_ratio(v: &Q) -> String {
    if v.denom().is_one() {
        v.numer().to_string()
    } else if v.is_negative() {
        format!("-{}/{}", v.numer().abs(), v.denom())
    } else {
        format!("{}/{}", v.numer(), v.denom())
    }
}
