//! Exact coefficient rings.
//!
//! Everything downstream is generic over [`Coeff`]: the rationals
//! ([`BigRational`]), the residue rings Z/p^m ([`ModInt`]), polynomials in a
//! nilpotent parameter s ([`TruncPoly`]) and multivariate polynomials over
//! any of these (for symbolic Witt vectors). Values are immutable; every
//! operation returns a fresh value.

mod intpoly;
mod modint;
mod series;
mod trunc;

use std::fmt::{Debug, Display};
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, RngCore};

use crate::error::Result;

pub use intpoly::IntPoly;
pub use modint::{is_prime, ModInt, Modulus};
pub use series::Series;
pub use trunc::{TruncCtx, TruncPoly};

/// Coarse classification of a coefficient ring, used where an operation only
/// exists for some rings (Frobenius on Witt vectors, ghost inversion).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CharClass {
    /// Contains Q: every nonzero integer is invertible.
    QAlgebra,
    /// An F_p-algebra for the given prime.
    Fp(u64),
    /// Anything else (for instance Z/p^m with m > 1).
    Other,
}

/// A commutative ring with exact arithmetic and a runtime context.
///
/// The context carries whatever is needed to build constants (the modulus
/// for Z/p^m, the truncation order for s-polynomials). Binary operators
/// panic when the two operands live in different rings; the fallible entry
/// points ([`Series::add`] and friends) check [`Coeff::same_ring`] first.
pub trait Coeff:
    Clone
    + PartialEq
    + Debug
    + Display
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    type Ctx: Clone + PartialEq + Debug + Send + Sync;

    fn ctx(&self) -> Self::Ctx;
    fn zero(ctx: &Self::Ctx) -> Self;
    fn one(ctx: &Self::Ctx) -> Self;
    fn from_i64(ctx: &Self::Ctx, n: i64) -> Self;
    fn from_bigint(ctx: &Self::Ctx, n: &BigInt) -> Self;
    /// Image of a rational number; fails with `DenominatorNotInvertible`
    /// when the denominator is not a unit of the ring.
    fn from_rational(ctx: &Self::Ctx, q: &BigRational) -> Result<Self>;
    fn is_zero(&self) -> bool;
    /// Multiplicative inverse, if the element is a unit.
    fn inv(&self) -> Option<Self>;
    fn char_class(ctx: &Self::Ctx) -> CharClass;

    fn is_one(&self) -> bool {
        *self == Self::one(&self.ctx())
    }

    fn same_ring(a: &Self::Ctx, b: &Self::Ctx) -> bool {
        a == b
    }

    /// Equality up to the precision both operands actually carry.
    fn agrees_with(&self, other: &Self) -> bool {
        self == other
    }

    fn pow(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(&self.ctx());
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base.clone();
            }
            e >>= 1;
            if e > 0 {
                base = base.clone() * base;
            }
        }
        acc
    }

    /// A pseudo-random element with small integer data, for property checks.
    fn random_small(ctx: &Self::Ctx, rng: &mut dyn RngCore, bound: i64) -> Self {
        Self::from_i64(ctx, rng.gen_range(-bound..=bound))
    }

    /// Evaluate an integer polynomial at `point`.
    fn eval_int_poly(poly: &IntPoly, point: &[Self], ctx: &Self::Ctx) -> Self {
        poly.eval_generic(point, ctx)
    }
}

impl Coeff for BigRational {
    type Ctx = ();

    fn ctx(&self) {}
    fn zero(_: &()) -> Self {
        <BigRational as Zero>::zero()
    }
    fn one(_: &()) -> Self {
        <BigRational as One>::one()
    }
    fn from_i64(_: &(), n: i64) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }
    fn from_bigint(_: &(), n: &BigInt) -> Self {
        BigRational::from_integer(n.clone())
    }
    fn from_rational(_: &(), q: &BigRational) -> Result<Self> {
        Ok(q.clone())
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn inv(&self) -> Option<Self> {
        if Zero::is_zero(self) {
            None
        } else {
            Some(self.recip())
        }
    }
    fn char_class(_: &()) -> CharClass {
        CharClass::QAlgebra
    }
    fn random_small(_: &(), rng: &mut dyn RngCore, bound: i64) -> Self {
        let num = rng.gen_range(-bound..=bound);
        let den = rng.gen_range(1..=bound.max(1));
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }
    fn eval_int_poly(poly: &IntPoly, point: &[Self], _: &()) -> Self {
        poly.eval_rational(point)
    }
}

/// Render a rational as `a` or `a/b`.
pub fn format_rational(q: &BigRational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Parse `a`, `-a` or `a/b`.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num: BigInt = num.parse().ok()?;
    let den: BigInt = den.parse().ok()?;
    if den.is_zero() {
        return None;
    }
    Some(BigRational::new(num, den))
}

/// Small helper: a rational as `i64` when it is an integer in range.
pub fn rational_to_i64(q: &BigRational) -> Option<i64> {
    if q.is_integer() {
        q.numer().to_i64()
    } else {
        None
    }
}
