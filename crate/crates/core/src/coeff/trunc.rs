use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::RngCore;

use super::{CharClass, Coeff};
use crate::error::Result;

#[derive(Debug, Clone, PartialEq)]
pub struct TruncCtx<C: Coeff> {
    pub inner: C::Ctx,
    pub order: usize,
}

/// A polynomial in the deformation parameter s, modulo s^order.
///
/// This is the coefficient ring of one-parameter families f + s·g. Like the
/// t-series, each value carries its own order and arithmetic keeps the
/// smaller one.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncPoly<C: Coeff> {
    inner: C::Ctx,
    coeffs: Vec<C>,
}

impl<C: Coeff> TruncPoly<C> {
    /// Coefficients c_0..c_{order-1}; the order is the vector length.
    pub fn from_coeffs(inner: C::Ctx, coeffs: Vec<C>) -> Self {
        TruncPoly { inner, coeffs }
    }

    pub fn constant(c: C, order: usize) -> Self {
        let inner = c.ctx();
        let mut coeffs = vec![C::zero(&inner); order];
        if order > 0 {
            coeffs[0] = c;
        }
        TruncPoly { inner, coeffs }
    }

    /// The parameter s itself.
    pub fn s(inner: C::Ctx, order: usize) -> Self {
        let mut coeffs = vec![C::zero(&inner); order];
        if order > 1 {
            coeffs[1] = C::one(&inner);
        }
        TruncPoly { inner, coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeff(&self, k: usize) -> Option<&C> {
        self.coeffs.get(k)
    }

    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    pub fn inner_ctx(&self) -> &C::Ctx {
        &self.inner
    }

    pub fn truncate(&self, order: usize) -> Self {
        let n = order.min(self.order());
        TruncPoly { inner: self.inner.clone(), coeffs: self.coeffs[..n].to_vec() }
    }

    /// d/ds. The result is one order shorter.
    pub fn derivative(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| C::from_i64(&self.inner, k as i64) * c.clone())
            .collect();
        TruncPoly { inner: self.inner.clone(), coeffs }
    }

    /// Replace the coefficient of s^k (k < order).
    pub fn with_coeff(&self, k: usize, c: C) -> Self {
        let mut out = self.clone();
        out.coeffs[k] = c;
        out
    }

    fn binary(&self, rhs: &Self, f: impl Fn(C, C) -> C) -> Self {
        let n = self.order().min(rhs.order());
        let coeffs = (0..n).map(|k| f(self.coeffs[k].clone(), rhs.coeffs[k].clone())).collect();
        TruncPoly { inner: self.inner.clone(), coeffs }
    }
}

impl<C: Coeff> Add for TruncPoly<C> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        self.binary(&rhs, |a, b| a + b)
    }
}

impl<C: Coeff> Sub for TruncPoly<C> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self.binary(&rhs, |a, b| a - b)
    }
}

impl<C: Coeff> Mul for TruncPoly<C> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let n = self.order().min(rhs.order());
        let mut coeffs = vec![C::zero(&self.inner); n];
        for (i, a) in self.coeffs.iter().enumerate().take(n) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate().take(n - i) {
                if !b.is_zero() {
                    coeffs[i + j] = coeffs[i + j].clone() + a.clone() * b.clone();
                }
            }
        }
        TruncPoly { inner: self.inner, coeffs }
    }
}

impl<C: Coeff> Neg for TruncPoly<C> {
    type Output = Self;
    fn neg(self) -> Self {
        TruncPoly { inner: self.inner, coeffs: self.coeffs.into_iter().map(|c| -c).collect() }
    }
}

impl<C: Coeff> fmt::Display for TruncPoly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})*s")?,
                _ => write!(f, "({c})*s^{k}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl<C: Coeff> Coeff for TruncPoly<C> {
    type Ctx = TruncCtx<C>;

    fn ctx(&self) -> TruncCtx<C> {
        TruncCtx { inner: self.inner.clone(), order: self.order() }
    }
    fn zero(ctx: &TruncCtx<C>) -> Self {
        TruncPoly { inner: ctx.inner.clone(), coeffs: vec![C::zero(&ctx.inner); ctx.order] }
    }
    fn one(ctx: &TruncCtx<C>) -> Self {
        TruncPoly::constant(C::one(&ctx.inner), ctx.order)
    }
    fn from_i64(ctx: &TruncCtx<C>, n: i64) -> Self {
        TruncPoly::constant(C::from_i64(&ctx.inner, n), ctx.order)
    }
    fn from_bigint(ctx: &TruncCtx<C>, n: &BigInt) -> Self {
        TruncPoly::constant(C::from_bigint(&ctx.inner, n), ctx.order)
    }
    fn from_rational(ctx: &TruncCtx<C>, q: &BigRational) -> Result<Self> {
        Ok(TruncPoly::constant(C::from_rational(&ctx.inner, q)?, ctx.order))
    }
    fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }
    fn inv(&self) -> Option<Self> {
        let n = self.order();
        if n == 0 {
            return Some(self.clone());
        }
        let c0_inv = self.coeffs[0].inv()?;
        let mut out: Vec<C> = Vec::with_capacity(n);
        out.push(c0_inv.clone());
        for k in 1..n {
            let mut acc = C::zero(&self.inner);
            for j in 1..=k {
                acc = acc + self.coeffs[j].clone() * out[k - j].clone();
            }
            out.push(-(acc * c0_inv.clone()));
        }
        Some(TruncPoly { inner: self.inner.clone(), coeffs: out })
    }
    fn char_class(ctx: &TruncCtx<C>) -> CharClass {
        C::char_class(&ctx.inner)
    }
    fn same_ring(a: &TruncCtx<C>, b: &TruncCtx<C>) -> bool {
        C::same_ring(&a.inner, &b.inner)
    }
    fn agrees_with(&self, other: &Self) -> bool {
        let n = self.order().min(other.order());
        (0..n).all(|k| self.coeffs[k].agrees_with(&other.coeffs[k]))
    }
    fn random_small(ctx: &TruncCtx<C>, rng: &mut dyn RngCore, bound: i64) -> Self {
        let coeffs = (0..ctx.order).map(|_| C::random_small(&ctx.inner, rng, bound)).collect();
        TruncPoly { inner: ctx.inner.clone(), coeffs }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn tp(cs: &[(i64, i64)]) -> TruncPoly<BigRational> {
        TruncPoly::from_coeffs((), cs.iter().map(|&(n, d)| q(n, d)).collect())
    }

    #[test]
    fn product_truncates_at_smaller_order() {
        let a = tp(&[(1, 1), (1, 1), (0, 1), (0, 1)]);
        let b = tp(&[(1, 1), (-1, 1), (0, 1)]);
        let c = a * b;
        assert_eq!(c.order(), 3);
        assert_eq!(c, tp(&[(1, 1), (0, 1), (-1, 1)]));
    }

    #[test]
    fn inverse_of_one_minus_s() {
        let a = tp(&[(1, 1), (-1, 1), (0, 1), (0, 1)]);
        let inv = a.inv().unwrap();
        assert_eq!(inv, tp(&[(1, 1), (1, 1), (1, 1), (1, 1)]));
        assert!(tp(&[(0, 1), (1, 1)]).inv().is_none());
    }

    #[test]
    fn derivative_drops_one_order() {
        let a = tp(&[(1, 1), (2, 1), (3, 1)]);
        assert_eq!(a.derivative(), tp(&[(2, 1), (6, 1)]));
    }
}
