use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, RngCore};

use super::{CharClass, Coeff};
use crate::error::{Error, Result};

pub fn is_prime(n: u64) -> bool {
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

/// The ring Z/p^m for a prime p.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Modulus {
    p: u64,
    m: u32,
    n: u64,
}

impl Modulus {
    pub fn new(p: u64, m: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::InvalidInput(format!("{p} is not prime")));
        }
        if m == 0 {
            return Err(Error::InvalidInput("precision level m must be positive".into()));
        }
        let n = p
            .checked_pow(m)
            .filter(|n| *n < (1 << 62))
            .ok_or_else(|| Error::Unsupported(format!("{p}^{m} exceeds the supported modulus range")))?;
        Ok(Modulus { p, m, n })
    }

    pub fn p(&self) -> u64 {
        self.p
    }
    pub fn level(&self) -> u32 {
        self.m
    }
    /// p^m.
    pub fn modulus(&self) -> u64 {
        self.n
    }

    /// The same prime at a lower level.
    pub fn at_level(&self, m: u32) -> Result<Self> {
        Modulus::new(self.p, m)
    }

    fn reduce_i128(&self, v: i128) -> u64 {
        v.rem_euclid(self.n as i128) as u64
    }

    fn reduce_bigint(&self, v: &BigInt) -> u64 {
        v.mod_floor(&BigInt::from(self.n)).to_u64().expect("residue fits in u64")
    }
}

/// Inverse of `a` modulo `n` by the extended Euclidean algorithm.
pub(crate) fn inv_mod(a: u64, n: u64) -> Option<u64> {
    let (mut r0, mut r1) = (n as i128, a as i128);
    let (mut s0, mut s1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    if r0 != 1 {
        return None;
    }
    Some(s0.rem_euclid(n as i128) as u64)
}

/// An element of Z/p^m, stored as its least non-negative residue.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ModInt {
    modulus: Modulus,
    value: u64,
}

impl ModInt {
    pub fn new(modulus: Modulus, value: i64) -> Self {
        ModInt { modulus, value: modulus.reduce_i128(value as i128) }
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn modulus(&self) -> Modulus {
        self.modulus
    }

    /// p-adic valuation of the representative; `None` for zero.
    pub fn valuation(&self) -> Option<u32> {
        if self.value == 0 {
            return None;
        }
        let mut v = 0;
        let mut x = self.value;
        while x.is_multiple_of(self.modulus.p) {
            x /= self.modulus.p;
            v += 1;
        }
        Some(v)
    }

    pub fn is_unit(&self) -> bool {
        !self.value.is_multiple_of(self.modulus.p)
    }

    /// Image under Z/p^m -> Z/p^k for k <= m.
    pub fn reduce_to(&self, level: u32) -> Result<ModInt> {
        if level > self.modulus.m {
            return Err(Error::InvalidInput(format!(
                "cannot reduce from level {} to the higher level {level}",
                self.modulus.m
            )));
        }
        let target = self.modulus.at_level(level)?;
        Ok(ModInt { modulus: target, value: self.value % target.n })
    }

    fn check(&self, other: &ModInt) {
        assert_eq!(self.modulus, other.modulus, "mixed moduli in Z/p^m arithmetic");
    }
}

impl fmt::Display for ModInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl Add for ModInt {
    type Output = ModInt;
    fn add(self, rhs: ModInt) -> ModInt {
        self.check(&rhs);
        let v = (self.value as u128 + rhs.value as u128) % self.modulus.n as u128;
        ModInt { modulus: self.modulus, value: v as u64 }
    }
}

impl Sub for ModInt {
    type Output = ModInt;
    fn sub(self, rhs: ModInt) -> ModInt {
        self.check(&rhs);
        let v = self.modulus.reduce_i128(self.value as i128 - rhs.value as i128);
        ModInt { modulus: self.modulus, value: v }
    }
}

impl Mul for ModInt {
    type Output = ModInt;
    fn mul(self, rhs: ModInt) -> ModInt {
        self.check(&rhs);
        let v = (self.value as u128 * rhs.value as u128) % self.modulus.n as u128;
        ModInt { modulus: self.modulus, value: v as u64 }
    }
}

impl Neg for ModInt {
    type Output = ModInt;
    fn neg(self) -> ModInt {
        let v = if self.value == 0 { 0 } else { self.modulus.n - self.value };
        ModInt { modulus: self.modulus, value: v }
    }
}

impl Coeff for ModInt {
    type Ctx = Modulus;

    fn ctx(&self) -> Modulus {
        self.modulus
    }
    fn zero(ctx: &Modulus) -> Self {
        ModInt { modulus: *ctx, value: 0 }
    }
    fn one(ctx: &Modulus) -> Self {
        ModInt { modulus: *ctx, value: 1 % ctx.n }
    }
    fn from_i64(ctx: &Modulus, n: i64) -> Self {
        ModInt::new(*ctx, n)
    }
    fn from_bigint(ctx: &Modulus, n: &BigInt) -> Self {
        ModInt { modulus: *ctx, value: ctx.reduce_bigint(n) }
    }
    fn from_rational(ctx: &Modulus, q: &BigRational) -> Result<Self> {
        let num = Self::from_bigint(ctx, q.numer());
        let den = Self::from_bigint(ctx, q.denom());
        let inv = den.inv().ok_or_else(|| Error::DenominatorNotInvertible {
            scalar: q.denom().to_string(),
            context: format!("mapping {q} into Z/{}", ctx.n),
        })?;
        Ok(num * inv)
    }
    fn is_zero(&self) -> bool {
        self.value.is_zero()
    }
    fn inv(&self) -> Option<Self> {
        inv_mod(self.value, self.modulus.n).map(|value| ModInt { modulus: self.modulus, value })
    }
    fn char_class(ctx: &Modulus) -> CharClass {
        if ctx.m == 1 {
            CharClass::Fp(ctx.p)
        } else {
            CharClass::Other
        }
    }
    fn pow(&self, mut e: u64) -> Self {
        let n = self.modulus.n as u128;
        let mut base = self.value as u128;
        let mut acc = 1u128 % n;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base % n;
            }
            base = base * base % n;
            e >>= 1;
        }
        ModInt { modulus: self.modulus, value: acc as u64 }
    }
    fn random_small(ctx: &Modulus, rng: &mut dyn RngCore, _bound: i64) -> Self {
        ModInt { modulus: *ctx, value: rng.gen_range(0..ctx.n) }
    }
}
