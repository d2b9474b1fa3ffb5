//! p-typical Witt vectors of finite length.
//!
//! Arithmetic evaluates the universal polynomials of [`table`]; the ghost
//! map is exposed separately so that tests can check one against the other.

mod table;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Pow;

use crate::coeff::{CharClass, Coeff, ModInt, Modulus};
use crate::error::{Error, Result};

pub use table::{universal_witt_polynomials, WittTable};

/// An element of W_m(A): components a_0..a_{m−1} over a coefficient ring A.
#[derive(Debug, Clone, PartialEq)]
pub struct WittVector<C: Coeff> {
    p: u64,
    ctx: C::Ctx,
    comps: Vec<C>,
}

impl<C: Coeff> WittVector<C> {
    pub fn new(p: u64, ctx: C::Ctx, comps: Vec<C>) -> Result<Self> {
        if !crate::coeff::is_prime(p) {
            return Err(Error::InvalidInput(format!("{p} is not prime")));
        }
        if comps.iter().any(|c| !C::same_ring(&c.ctx(), &ctx)) {
            return Err(Error::TypeMismatch("component outside the base ring".into()));
        }
        Ok(WittVector { p, ctx, comps })
    }

    pub fn zero(p: u64, ctx: C::Ctx, len: usize) -> Self {
        let comps = vec![C::zero(&ctx); len];
        WittVector { p, ctx, comps }
    }

    pub fn one(p: u64, ctx: C::Ctx, len: usize) -> Self {
        let one = C::one(&ctx);
        Self::teichmuller(p, one, len)
    }

    /// [a] = (a, 0, …, 0).
    pub fn teichmuller(p: u64, a: C, len: usize) -> Self {
        let ctx = a.ctx();
        let mut comps = vec![C::zero(&ctx); len];
        if len > 0 {
            comps[0] = a;
        }
        WittVector { p, ctx, comps }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn len(&self) -> usize {
        self.comps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.comps.is_empty()
    }

    pub fn components(&self) -> &[C] {
        &self.comps
    }

    pub fn ctx(&self) -> &C::Ctx {
        &self.ctx
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.p != other.p {
            return Err(Error::TypeMismatch(format!("Witt vectors for p = {} and p = {}", self.p, other.p)));
        }
        if self.len() != other.len() {
            return Err(Error::TypeMismatch(format!(
                "Witt vectors of length {} and {}",
                self.len(),
                other.len()
            )));
        }
        if !C::same_ring(&self.ctx, &other.ctx) {
            return Err(Error::TypeMismatch("Witt vectors over different base rings".into()));
        }
        Ok(())
    }

    fn binary(&self, other: &Self, pick: impl Fn(&WittTable, usize) -> &crate::coeff::IntPoly) -> Result<Self> {
        self.check(other)?;
        let table = universal_witt_polynomials(self.p, self.len())?;
        let point: Vec<C> = self
            .comps
            .iter()
            .zip(&other.comps)
            .flat_map(|(a, b)| [a.clone(), b.clone()])
            .collect();
        let comps = (0..self.len())
            .map(|k| C::eval_int_poly(pick(&table, k), &point[..2 * (k + 1)], &self.ctx))
            .collect();
        Ok(WittVector { p: self.p, ctx: self.ctx.clone(), comps })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.binary(other, |t, k| t.sum(k))
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.binary(other, |t, k| t.prod(k))
    }

    pub fn neg(&self) -> Result<Self> {
        // The negation polynomials ignore the Y slots.
        let zero = C::zero(&self.ctx);
        let pad = WittVector { p: self.p, ctx: self.ctx.clone(), comps: vec![zero; self.len()] };
        self.binary(&pad, |t, k| t.neg(k))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg()?)
    }

    /// n · x as an n-fold Witt sum (double and add).
    pub fn scalar_mul(&self, n: u64) -> Result<Self> {
        let mut acc = Self::zero(self.p, self.ctx.clone(), self.len());
        let mut base = self.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.add(&base)?;
            }
            n >>= 1;
            if n > 0 {
                base = base.add(&base)?;
            }
        }
        Ok(acc)
    }

    /// Ghost components w_k = Σ_{i≤k} p^i a_i^{p^{k−i}}.
    ///
    /// Only meaningful without p-torsion, so the base ring must contain Q.
    pub fn ghost(&self) -> Result<Vec<C>> {
        if C::char_class(&self.ctx) != CharClass::QAlgebra {
            return Err(Error::Unsupported("ghost components need a Q-algebra".into()));
        }
        Ok(ghost_components(self.p, &self.comps, &self.ctx))
    }

    /// Inverse of the ghost map over a Q-algebra.
    pub fn from_ghost(p: u64, ctx: C::Ctx, ghost: &[C]) -> Result<Self> {
        if C::char_class(&ctx) != CharClass::QAlgebra {
            return Err(Error::Unsupported("inverting the ghost map needs a Q-algebra".into()));
        }
        let mut comps: Vec<C> = Vec::with_capacity(ghost.len());
        for (k, w) in ghost.iter().enumerate() {
            let mut rest = w.clone();
            for (i, a) in comps.iter().enumerate() {
                let c = C::from_bigint(&ctx, &BigInt::from(p).pow(i as u32));
                rest = rest - c * a.pow(p.pow((k - i) as u32));
            }
            let inv = BigRational::new(1.into(), BigInt::from(p).pow(k as u32));
            comps.push(rest * C::from_rational(&ctx, &inv)?);
        }
        Ok(WittVector { p, ctx, comps })
    }

    /// V(a_0, …, a_{m−1}) = (0, a_0, …, a_{m−2}).
    pub fn verschiebung(&self) -> Self {
        let mut comps = Vec::with_capacity(self.len());
        if !self.comps.is_empty() {
            comps.push(C::zero(&self.ctx));
            comps.extend_from_slice(&self.comps[..self.len() - 1]);
        }
        WittVector { p: self.p, ctx: self.ctx.clone(), comps }
    }

    /// Frobenius.
    ///
    /// Over an F_p-algebra this is a_i ↦ a_i^p and keeps the length. Over a
    /// Q-algebra it is computed through the ghost map; w_m(x) is needed for
    /// the last component, so the result is one component shorter.
    pub fn frobenius(&self) -> Result<Self> {
        match C::char_class(&self.ctx) {
            CharClass::Fp(q) if q == self.p => {
                let comps = self.comps.iter().map(|a| a.pow(self.p)).collect();
                Ok(WittVector { p: self.p, ctx: self.ctx.clone(), comps })
            }
            CharClass::QAlgebra => {
                let w = self.ghost()?;
                let shifted = if w.is_empty() { &w[..] } else { &w[1..] };
                Self::from_ghost(self.p, self.ctx.clone(), shifted)
            }
            _ => Err(Error::Unsupported(format!(
                "Frobenius on Witt vectors over {:?} (needs an F_{}-algebra or a Q-algebra)",
                self.ctx, self.p
            ))),
        }
    }

    /// Drop the last component: W_m → W_{m−1}.
    pub fn restrict(&self) -> Result<Self> {
        if self.comps.is_empty() {
            return Err(Error::InvalidInput("cannot restrict a Witt vector of length 0".into()));
        }
        let comps = self.comps[..self.len() - 1].to_vec();
        Ok(WittVector { p: self.p, ctx: self.ctx.clone(), comps })
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(|c| c.is_zero())
    }
}

/// Ghost components of a plain component list.
pub fn ghost_components<C: Coeff>(p: u64, comps: &[C], ctx: &C::Ctx) -> Vec<C> {
    (0..comps.len())
        .map(|k| {
            comps[..=k].iter().enumerate().fold(C::zero(ctx), |acc, (i, a)| {
                let c = C::from_bigint(ctx, &BigInt::from(p).pow(i as u32));
                acc + c * a.pow(p.pow((k - i) as u32))
            })
        })
        .collect()
}

fn check_prime_field(x: &WittVector<ModInt>) -> Result<Modulus> {
    let md = *x.ctx();
    if md.level() != 1 || md.p() != x.p() {
        return Err(Error::TypeMismatch(format!(
            "expected a Witt vector over F_{}, got components mod {}",
            x.p(),
            md.modulus()
        )));
    }
    Ok(md)
}

/// Teichmüller representative of a ∈ F_p inside Z/p^m: ã^{p^{m−1}}.
pub fn teichmuller_zpm(a: &ModInt, target: Modulus) -> ModInt {
    let lift = ModInt::new(target, a.value() as i64);
    lift.pow(target.p().pow(target.level() - 1))
}

/// The isomorphism W_m(F_p) → Z/p^m, (a_i) ↦ Σ p^i [a_i].
pub fn witt_to_zpm(x: &WittVector<ModInt>) -> Result<ModInt> {
    check_prime_field(x)?;
    if x.is_empty() {
        return Err(Error::InvalidInput("W_0 is the zero ring".into()));
    }
    let target = Modulus::new(x.p(), x.len() as u32)?;
    let mut acc = ModInt::new(target, 0);
    let mut pi = ModInt::new(target, 1);
    let p = ModInt::new(target, x.p() as i64);
    for a in x.components() {
        acc = acc + pi * teichmuller_zpm(a, target);
        pi = pi * p;
    }
    Ok(acc)
}

/// Inverse of [`witt_to_zpm`]: peel off Teichmüller digits.
pub fn zpm_to_witt(n: &ModInt) -> Result<WittVector<ModInt>> {
    let md = n.modulus();
    let field = md.at_level(1)?;
    let p = md.p();
    let mut rest = n.value();
    let mut comps = Vec::with_capacity(md.level() as usize);
    for k in 0..md.level() {
        // rest is known modulo p^{m−k}
        let level = md.level() - k;
        let here = md.at_level(level)?;
        let digit = ModInt::new(field, (rest % p) as i64);
        let t = teichmuller_zpm(&digit, here).value();
        let r = ModInt::new(here, rest as i64) - ModInt::new(here, t as i64);
        rest = r.value() / p;
        comps.push(digit);
    }
    WittVector::new(p, field, comps)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn wq(p: u64, comps: &[(i64, i64)]) -> WittVector<BigRational> {
        WittVector::new(p, (), comps.iter().map(|&(n, d)| q(n, d)).collect()).unwrap()
    }

    fn fp(p: u64) -> Modulus {
        Modulus::new(p, 1).unwrap()
    }

    fn wf(p: u64, comps: &[i64]) -> WittVector<ModInt> {
        let f = fp(p);
        WittVector::new(p, f, comps.iter().map(|&a| ModInt::new(f, a)).collect()).unwrap()
    }

    #[test]
    fn ghost_examples() {
        assert_eq!(wq(3, &[(1, 1), (1, 1)]).ghost().unwrap(), vec![q(1, 1), q(4, 1)]);
        let a = q(2, 3);
        let g = wq(5, &[(2, 3), (0, 1), (0, 1)]).ghost().unwrap();
        assert_eq!(g, vec![a.clone(), Coeff::pow(&a, 5), Coeff::pow(&a, 25)]);
        // p = 2: (x_0, x_1) ↦ (x_0, x_0² + 2 x_1)
        let g = wq(2, &[(3, 1), (5, 7)]).ghost().unwrap();
        assert_eq!(g, vec![q(3, 1), q(9, 1) + q(10, 7)]);
    }

    #[test]
    fn ghost_needs_characteristic_zero() {
        assert!(matches!(wf(5, &[1, 2]).ghost(), Err(Error::Unsupported(_))));
    }

    #[test]
    fn one_plus_one_over_f2() {
        let one = wf(2, &[1, 0]);
        let two = one.add(&one).unwrap();
        assert_eq!(two, wf(2, &[0, 1]));
        assert_eq!(witt_to_zpm(&two).unwrap().value(), 2);
    }

    #[test]
    fn additive_inverse_and_identity() {
        let x = wq(2, &[(1, 2), (-3, 1), (2, 5)]);
        assert!(x.add(&x.neg().unwrap()).unwrap().is_zero());
        let one = WittVector::one(2, (), 3);
        assert_eq!(one.mul(&x).unwrap(), x);
    }

    #[test]
    fn teichmuller_is_multiplicative() {
        let a = WittVector::teichmuller(5, q(2, 1), 3);
        let b = WittVector::teichmuller(5, q(3, 1), 3);
        assert_eq!(a.mul(&b).unwrap(), WittVector::teichmuller(5, q(6, 1), 3));
        let z = WittVector::teichmuller(5, q(0, 1), 3);
        assert_eq!(z.add(&a).unwrap(), a);
    }

    #[test]
    fn structure_maps_over_q() {
        let p = 3;
        let x = wq(p, &[(1, 2), (2, 1), (-1, 3)]);
        let y = wq(p, &[(2, 1), (1, 5), (1, 1)]);
        // F V = p on the components that survive.
        let fv = x.verschiebung().frobenius().unwrap();
        let px = x.scalar_mul(p).unwrap().restrict().unwrap();
        assert_eq!(fv, px);
        // V(x) V(y) = p V(xy)
        let lhs = x.verschiebung().mul(&y.verschiebung()).unwrap();
        let rhs = x.mul(&y).unwrap().verschiebung().scalar_mul(p).unwrap();
        assert_eq!(lhs, rhs);
        // ghost(F x)_k = ghost(x)_{k+1}
        let gf = x.frobenius().unwrap().ghost().unwrap();
        assert_eq!(gf[..], x.ghost().unwrap()[1..]);
    }

    #[test]
    fn frobenius_over_fp_and_unsupported_rings() {
        let x = wf(3, &[2, 1]);
        assert_eq!(x.frobenius().unwrap(), wf(3, &[2, 1]));
        let z = Modulus::new(3, 2).unwrap();
        let y = WittVector::new(3, z, vec![ModInt::new(z, 2)]).unwrap();
        assert!(matches!(y.frobenius(), Err(Error::Unsupported(_))));
    }

    #[test]
    fn restriction_is_a_homomorphism() {
        let x = wq(2, &[(1, 1), (1, 2), (3, 1)]);
        let y = wq(2, &[(-1, 1), (2, 1), (1, 3)]);
        assert_eq!(x.restrict().unwrap().components(), &x.components()[..2]);
        let lhs = x.add(&y).unwrap().restrict().unwrap();
        let rhs = x.restrict().unwrap().add(&y.restrict().unwrap()).unwrap();
        assert_eq!(lhs, rhs);
        let lhs = x.mul(&y).unwrap().restrict().unwrap();
        let rhs = x.restrict().unwrap().mul(&y.restrict().unwrap()).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn mismatched_vectors_are_rejected() {
        assert!(matches!(wq(2, &[(1, 1)]).add(&wq(3, &[(1, 1)])), Err(Error::TypeMismatch(_))));
        assert!(matches!(wq(2, &[(1, 1)]).mul(&wq(2, &[(1, 1), (0, 1)])), Err(Error::TypeMismatch(_))));
    }

    #[test]
    fn teichmuller_digits_in_zpm() {
        let t = teichmuller_zpm(&ModInt::new(fp(5), 2), Modulus::new(5, 2).unwrap());
        assert_eq!(t.value(), 7);
        assert_eq!(witt_to_zpm(&wf(5, &[2, 0])).unwrap().value(), 7);
        assert_eq!(witt_to_zpm(&wf(5, &[1, 0, 0])).unwrap().value(), 1);
    }

    #[test]
    fn zpm_round_trip() {
        for p in [2u64, 3, 5] {
            let md = Modulus::new(p, 3).unwrap();
            for v in 0..md.modulus() {
                let n = ModInt::new(md, v as i64);
                let w = zpm_to_witt(&n).unwrap();
                assert_eq!(witt_to_zpm(&w).unwrap(), n);
            }
        }
    }
}
