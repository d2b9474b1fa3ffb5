use std::fmt;

use super::Coeff;
use crate::error::{Error, Result};

/// A truncated Laurent series Σ_{k=ℓ}^{N-1} c_k t^k + O(t^N).
///
/// Coefficients at exponents ≥ N are unknown, never zero. The lower
/// exponent ℓ is kept canonical (the valuation) by trimming leading zeros;
/// the zero series has ℓ = N and no stored coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct Series<C: Coeff> {
    ctx: C::Ctx,
    low: i64,
    coeffs: Vec<C>,
    order: i64,
}

impl<C: Coeff> Series<C> {
    /// Coefficients for exponents `low, low+1, …`; anything at or past
    /// `order` is dropped and the window is zero-padded up to `order`.
    pub fn new(ctx: C::Ctx, low: i64, coeffs: Vec<C>, order: i64) -> Result<Self> {
        if low > order {
            return Err(Error::InvalidInput(format!(
                "lower exponent {low} exceeds truncation order {order}"
            )));
        }
        let mut coeffs = coeffs;
        let width = (order - low) as usize;
        coeffs.truncate(width);
        coeffs.resize(width, C::zero(&ctx));
        Ok(Series { ctx, low, coeffs, order }.normalized())
    }

    pub fn zero(ctx: C::Ctx, order: i64) -> Self {
        Series { ctx, low: order, coeffs: Vec::new(), order }
    }

    pub fn one(ctx: C::Ctx, order: i64) -> Self {
        let c = C::one(&ctx);
        Self::monomial(c, 0, order)
    }

    pub fn constant(c: C, order: i64) -> Self {
        Self::monomial(c, 0, order)
    }

    /// c · t^k. If k ≥ order the result is the zero series.
    pub fn monomial(c: C, k: i64, order: i64) -> Self {
        let ctx = c.ctx();
        if k >= order {
            return Self::zero(ctx, order);
        }
        let mut coeffs = vec![C::zero(&ctx); (order - k) as usize];
        coeffs[0] = c;
        Series { ctx, low: k, coeffs, order }.normalized()
    }

    /// Polynomial coefficients c_0, c_1, … truncated at `order`.
    pub fn from_coeffs(ctx: C::Ctx, coeffs: Vec<C>, order: i64) -> Self {
        let low = 0.min(order);
        Self::new(ctx, low, coeffs, order).expect("low ≤ order by construction")
    }

    fn normalized(mut self) -> Self {
        let lead = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        if lead > 0 {
            self.coeffs.drain(..lead);
            self.low += lead as i64;
        }
        self
    }

    pub fn ctx(&self) -> &C::Ctx {
        &self.ctx
    }

    pub fn order(&self) -> i64 {
        self.order
    }

    /// Lowest exponent with a nonzero coefficient, or the order for zero.
    pub fn valuation(&self) -> i64 {
        self.low
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Coefficient of t^k; `None` when k is beyond the truncation order.
    pub fn coeff(&self, k: i64) -> Option<C> {
        if k >= self.order {
            None
        } else if k < self.low {
            Some(C::zero(&self.ctx))
        } else {
            Some(self.coeffs[(k - self.low) as usize].clone())
        }
    }

    /// (exponent, coefficient) pairs of the nonzero terms.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &C)> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(move |(i, c)| (self.low + i as i64, c))
    }

    fn check_ring(&self, other: &Self) -> Result<()> {
        if C::same_ring(&self.ctx, &other.ctx) {
            Ok(())
        } else {
            Err(Error::TypeMismatch(format!(
                "series over different base rings: {:?} vs {:?}",
                self.ctx, other.ctx
            )))
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_ring(other)?;
        let order = self.order.min(other.order);
        let low = self.low.min(other.low).min(order);
        let coeffs = (low..order)
            .map(|k| self.coeff(k).unwrap() + other.coeff(k).unwrap())
            .collect();
        Ok(Series { ctx: self.ctx.clone(), low, coeffs, order }.normalized())
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_ring(other)?;
        let order = (self.order + other.low).min(other.order + self.low);
        let low = self.low + other.low;
        if low >= order {
            return Ok(Self::zero(self.ctx.clone(), order));
        }
        let width = (order - low) as usize;
        let mut coeffs = vec![C::zero(&self.ctx); width];
        for (i, a) in self.coeffs.iter().enumerate().take(width) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate().take(width - i) {
                if !b.is_zero() {
                    coeffs[i + j] = coeffs[i + j].clone() + a.clone() * b.clone();
                }
            }
        }
        Ok(Series { ctx: self.ctx.clone(), low, coeffs, order }.normalized())
    }

    pub fn neg(&self) -> Self {
        self.map_same(|_, c| -c.clone())
    }

    pub fn scale(&self, c: &C) -> Self {
        self.map_same(|_, x| c.clone() * x.clone())
    }

    /// Multiply by t^k. The order moves with the exponents.
    pub fn shift(&self, k: i64) -> Self {
        Series {
            ctx: self.ctx.clone(),
            low: self.low + k,
            coeffs: self.coeffs.clone(),
            order: self.order + k,
        }
    }

    /// g(t) ↦ g(−t).
    pub fn conjugate(&self) -> Self {
        self.map_same(|k, c| if k.rem_euclid(2) == 1 { -c.clone() } else { c.clone() })
    }

    /// The Euler operator t·d/dt: c_k ↦ k·c_k.
    pub fn theta(&self) -> Self {
        let ctx = self.ctx.clone();
        self.map_same(move |k, c| C::from_i64(&ctx, k) * c.clone())
    }

    pub fn invert(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::NotInvertible("the zero series".into()));
        }
        let lead = &self.coeffs[0];
        let lead_inv = lead
            .inv()
            .ok_or_else(|| Error::NotInvertible(format!("leading coefficient {lead} is not a unit")))?;
        // a = t^ℓ u with u known to relative precision N − ℓ.
        let rel = (self.order - self.low) as usize;
        let mut out: Vec<C> = Vec::with_capacity(rel);
        out.push(lead_inv.clone());
        for k in 1..rel {
            let mut acc = C::zero(&self.ctx);
            for j in 1..=k {
                acc = acc + self.coeffs[j].clone() * out[k - j].clone();
            }
            out.push(-(acc * lead_inv.clone()));
        }
        let low = -self.low;
        Ok(Series { ctx: self.ctx.clone(), low, coeffs: out, order: low + rel as i64 }.normalized())
    }

    /// Forget every coefficient at exponent ≥ `order`.
    pub fn truncate(&self, order: i64) -> Self {
        let order = order.min(self.order);
        if self.low >= order {
            return Self::zero(self.ctx.clone(), order);
        }
        let mut coeffs = self.coeffs.clone();
        coeffs.truncate((order - self.low) as usize);
        Series { ctx: self.ctx.clone(), low: self.low, coeffs, order }.normalized()
    }

    /// Coefficientwise map into another ring.
    pub fn map<D: Coeff>(&self, ctx: D::Ctx, f: impl Fn(&C) -> D) -> Series<D> {
        let coeffs = self.coeffs.iter().map(f).collect();
        Series { ctx, low: self.low, coeffs, order: self.order }.normalized()
    }

    /// Coefficientwise fallible map into another ring.
    pub fn try_map<D: Coeff>(&self, ctx: D::Ctx, f: impl Fn(&C) -> Result<D>) -> Result<Series<D>> {
        let coeffs = self.coeffs.iter().map(f).collect::<Result<Vec<_>>>()?;
        Ok(Series { ctx, low: self.low, coeffs, order: self.order }.normalized())
    }

    fn map_same(&self, f: impl Fn(i64, &C) -> C) -> Self {
        let coeffs = self.coeffs.iter().enumerate().map(|(i, c)| f(self.low + i as i64, c)).collect();
        Series { ctx: self.ctx.clone(), low: self.low, coeffs, order: self.order }.normalized()
    }

    /// Equality of every coefficient both series know.
    pub fn agrees_with(&self, other: &Self) -> bool {
        if !C::same_ring(&self.ctx, &other.ctx) {
            return false;
        }
        let order = self.order.min(other.order);
        let low = self.low.min(other.low);
        (low..order).all(|k| self.coeff(k).unwrap().agrees_with(&other.coeff(k).unwrap()))
    }
}

impl<C: Coeff> fmt::Display for Series<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.terms() {
            let text = c.to_string();
            let simple = !text.contains(' ');
            let (sign, body) = match text.strip_prefix('-') {
                Some(rest) if simple => ("-", rest.to_string()),
                _ => ("+", if simple { text } else { format!("({text})") }),
            };
            if first {
                if sign == "-" {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{body}")?,
                _ => {
                    if body != "1" {
                        write!(f, "{body}*")?;
                    }
                    if k == 1 {
                        write!(f, "t")?;
                    } else {
                        write!(f, "t^{k}")?;
                    }
                }
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O(t^{})", self.order)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::{ModInt, Modulus};
    use num_rational::BigRational;
    use proptest::prelude::*;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    fn poly(cs: &[i64], order: i64) -> Series<BigRational> {
        Series::from_coeffs((), cs.iter().map(|&c| q(c)).collect(), order)
    }

    #[test]
    fn difference_of_squares() {
        let a = poly(&[1, 1], 4);
        let b = poly(&[1, -1], 4);
        assert_eq!(a.mul(&b).unwrap(), poly(&[1, 0, -1], 4));
    }

    #[test]
    fn exponent_cancellation() {
        let tinv = Series::monomial(q(1), -1, 4);
        let t = Series::monomial(q(1), 1, 4);
        let prod = tinv.mul(&t).unwrap();
        assert_eq!(prod.coeff(0), Some(q(1)));
        assert_eq!(prod.order(), 3);
    }

    #[test]
    fn modular_product() {
        let z = Modulus::new(5, 2).unwrap();
        let s = |cs: &[i64]| Series::from_coeffs(z, cs.iter().map(|&c| ModInt::new(z, c)).collect(), 4);
        let prod = s(&[2, 3]).mul(&s(&[3, 1])).unwrap();
        assert_eq!(prod, s(&[6, 11, 3]));
    }

    #[test]
    fn mixed_rings_are_rejected() {
        let a = Series::constant(ModInt::new(Modulus::new(5, 2).unwrap(), 1), 4);
        let b = Series::constant(ModInt::new(Modulus::new(5, 3).unwrap(), 1), 4);
        assert!(matches!(a.add(&b), Err(Error::TypeMismatch(_))));
        assert!(matches!(a.mul(&b), Err(Error::TypeMismatch(_))));
    }

    #[test]
    fn geometric_series() {
        let inv = poly(&[1, -1], 4).invert().unwrap();
        assert_eq!(inv, poly(&[1, 1, 1, 1], 4));
    }

    #[test]
    fn modular_inverse_constant() {
        let z = Modulus::new(5, 2).unwrap();
        let three = Series::constant(ModInt::new(z, 3), 3);
        assert_eq!(three.invert().unwrap().coeff(0).unwrap().value(), 17);
        let bad = Series::from_coeffs(z, vec![ModInt::new(z, 5), ModInt::new(z, 1)], 3);
        assert!(matches!(bad.invert(), Err(Error::NotInvertible(_))));
    }

    #[test]
    fn conjugation_and_theta_on_examples() {
        assert_eq!(poly(&[1, 1, 1], 5).conjugate(), poly(&[1, -1, 1], 5));
        assert_eq!(poly(&[1, 1, 1], 5).theta(), poly(&[0, 1, 2], 5));
        assert!(poly(&[7], 5).theta().is_zero());
        let tinv = Series::monomial(q(1), -1, 3);
        assert_eq!(tinv.conjugate(), Series::monomial(q(-1), -1, 3));
        assert_eq!(tinv.theta(), Series::monomial(q(-1), -1, 3));
    }

    #[test]
    fn laurent_inverse_moves_the_window() {
        // (t + t^2)^{-1} = t^{-1} (1 - t + t^2 - …)
        let a = Series::new((), 1, vec![q(1), q(1)], 5).unwrap();
        let inv = a.invert().unwrap();
        assert_eq!(inv.valuation(), -1);
        assert_eq!(inv.order(), 3);
        assert_eq!(inv.coeff(0), Some(q(-1)));
        assert_eq!(inv.coeff(1), Some(q(1)));
    }

    fn arb_series() -> impl Strategy<Value = Series<BigRational>> {
        (-2i64..3, prop::collection::vec(-5i64..6, 0..6), 3i64..8).prop_map(|(low, cs, order)| {
            let order = order.max(low);
            Series::new((), low, cs.into_iter().map(q).collect(), order).unwrap()
        })
    }

    proptest! {
        #[test]
        fn ring_axioms(a in arb_series(), b in arb_series(), c in arb_series()) {
            let ab_c = a.mul(&b).unwrap().mul(&c).unwrap();
            let a_bc = a.mul(&b.mul(&c).unwrap()).unwrap();
            prop_assert!(ab_c.agrees_with(&a_bc));
            prop_assert!(a.mul(&b).unwrap().agrees_with(&b.mul(&a).unwrap()));
            let lhs = a.mul(&b.add(&c).unwrap()).unwrap();
            let rhs = a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap();
            prop_assert!(lhs.agrees_with(&rhs));
        }

        #[test]
        fn theta_is_a_derivation(a in arb_series(), b in arb_series()) {
            let lhs = a.mul(&b).unwrap().theta();
            let rhs = a.theta().mul(&b).unwrap().add(&a.mul(&b.theta()).unwrap()).unwrap();
            prop_assert!(lhs.agrees_with(&rhs));
        }

        #[test]
        fn conjugation_is_an_involutive_homomorphism(a in arb_series(), b in arb_series()) {
            prop_assert_eq!(a.conjugate().conjugate(), a.clone());
            let lhs = a.mul(&b).unwrap().conjugate();
            let rhs = a.conjugate().mul(&b.conjugate()).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn truncation_is_monotone(cs in prop::collection::vec(-5i64..6, 1..8),
                                  ds in prop::collection::vec(-5i64..6, 1..8),
                                  small in 1i64..5, extra in 0i64..5) {
            let big = small + extra;
            let a = poly(&cs, big).mul(&poly(&ds, big)).unwrap().truncate(small);
            let b = poly(&cs, small).mul(&poly(&ds, small)).unwrap();
            prop_assert!(a.agrees_with(&b));
            prop_assert!(b.order() >= a.order().min(small));
        }
    }
}
