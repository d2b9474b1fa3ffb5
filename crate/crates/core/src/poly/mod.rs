//! Multivariate polynomials over the exact coefficient rings, Gröbner bases
//! of graded ideals and the Milnor algebra data of quasi-homogeneous germs.

mod groebner;
mod order;
mod singularity;

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rand::{Rng, RngCore};

use crate::coeff::{CharClass, Coeff};
use crate::error::Result;

pub use groebner::{buchberger, normal_form_with_cofactors, Division, GroebnerData};
pub use order::{MonomialOrder, TieBreak};
pub use singularity::{
    family_division, milnor_basis, milnor_number, qh_check, FamilyDeformation, FamilyDivision, QHSingularity,
};

/// An exponent vector.
pub type Monomial = Vec<u32>;

/// Weighted degree Σ w_i e_i of a monomial.
pub fn wdeg(m: &[u32], weights: &[BigRational]) -> BigRational {
    m.iter()
        .zip(weights)
        .fold(<BigRational as Zero>::zero(), |acc, (&e, w)| acc + w * BigInt::from(e))
}

/// Does `a` divide `b`?
pub fn divides(a: &[u32], b: &[u32]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

pub fn mono_mul(a: &[u32], b: &[u32]) -> Monomial {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

/// b / a, assuming a | b.
pub fn mono_div(b: &[u32], a: &[u32]) -> Monomial {
    b.iter().zip(a).map(|(x, y)| x - y).collect()
}

pub fn mono_lcm(a: &[u32], b: &[u32]) -> Monomial {
    a.iter().zip(b).map(|(x, y)| *x.max(y)).collect()
}

/// Default variable names: x, y, z for up to three variables, x1..xn beyond.
pub fn var_names(n: usize) -> Vec<String> {
    if n <= 3 {
        ["x", "y", "z"][..n].iter().map(|s| s.to_string()).collect()
    } else {
        (1..=n).map(|i| format!("x{i}")).collect()
    }
}

/// Render a monomial as `x^2*y`, or `1` for the empty product.
pub fn format_monomial(m: &[u32], names: &[String]) -> String {
    let parts: Vec<String> = m
        .iter()
        .enumerate()
        .filter(|(_, &e)| e > 0)
        .map(|(i, &e)| if e == 1 { names[i].clone() } else { format!("{}^{e}", names[i]) })
        .collect();
    if parts.is_empty() {
        "1".into()
    } else {
        parts.join("*")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PolyRing<C: Coeff> {
    pub nvars: usize,
    pub inner: C::Ctx,
}

/// A polynomial in n variables with coefficients in C.
///
/// Terms are kept in a map keyed by exponent vector with no zero
/// coefficients, so structural equality is polynomial equality. Monomial
/// orders only matter for leading terms and are passed explicitly.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiPoly<C: Coeff> {
    nvars: usize,
    ctx: C::Ctx,
    terms: BTreeMap<Monomial, C>,
}

impl<C: Coeff> MultiPoly<C> {
    pub fn zero(ctx: C::Ctx, nvars: usize) -> Self {
        MultiPoly { nvars, ctx, terms: BTreeMap::new() }
    }

    pub fn constant(ctx: C::Ctx, nvars: usize, c: C) -> Self {
        Self::monomial(ctx, vec![0; nvars], c)
    }

    pub fn one(ctx: C::Ctx, nvars: usize) -> Self {
        let c = C::one(&ctx);
        Self::constant(ctx, nvars, c)
    }

    pub fn var(ctx: C::Ctx, nvars: usize, i: usize) -> Self {
        let mut m = vec![0; nvars];
        m[i] = 1;
        let c = C::one(&ctx);
        Self::monomial(ctx, m, c)
    }

    pub fn monomial(ctx: C::Ctx, m: Monomial, c: C) -> Self {
        let nvars = m.len();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        MultiPoly { nvars, ctx, terms }
    }

    pub fn from_terms(ctx: C::Ctx, nvars: usize, terms: impl IntoIterator<Item = (Monomial, C)>) -> Self {
        let mut out = Self::zero(ctx, nvars);
        for (m, c) in terms {
            assert_eq!(m.len(), nvars, "exponent vector of wrong length");
            out.add_term(m, c);
        }
        out
    }

    fn add_term(&mut self, m: Monomial, c: C) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(old) => {
                let s = old.clone() + c;
                if s.is_zero() {
                    self.terms.remove(&m);
                } else {
                    *old = s;
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn ctx(&self) -> &C::Ctx {
        &self.ctx
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &C)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: &[u32]) -> C {
        self.terms.get(m).cloned().unwrap_or_else(|| C::zero(&self.ctx))
    }

    /// The constant term, if the polynomial is constant.
    pub fn as_constant(&self) -> Option<C> {
        match self.terms.len() {
            0 => Some(C::zero(&self.ctx)),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                m.iter().all(|&e| e == 0).then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn leading(&self, order: &MonomialOrder) -> Option<(&Monomial, &C)> {
        self.terms.iter().max_by(|a, b| order.cmp(a.0, b.0))
    }

    pub fn scale(&self, c: &C) -> Self {
        let mut out = Self::zero(self.ctx.clone(), self.nvars);
        for (m, a) in &self.terms {
            out.add_term(m.clone(), a.clone() * c.clone());
        }
        out
    }

    /// self · c x^m
    pub fn mul_term(&self, m: &[u32], c: &C) -> Self {
        let mut out = Self::zero(self.ctx.clone(), self.nvars);
        for (e, a) in &self.terms {
            out.add_term(mono_mul(e, m), a.clone() * c.clone());
        }
        out
    }

    pub fn add_ref(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub_ref(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }

    pub fn mul_ref(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.ctx.clone(), self.nvars);
        for (a, x) in &self.terms {
            for (b, y) in &other.terms {
                out.add_term(mono_mul(a, b), x.clone() * y.clone());
            }
        }
        out
    }

    pub fn neg_ref(&self) -> Self {
        let terms = self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect();
        MultiPoly { nvars: self.nvars, ctx: self.ctx.clone(), terms }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(self.ctx.clone(), self.nvars);
        for _ in 0..e {
            acc = acc.mul_ref(self);
        }
        acc
    }

    /// ∂/∂x_i
    pub fn derivative(&self, i: usize) -> Self {
        let mut out = Self::zero(self.ctx.clone(), self.nvars);
        for (m, c) in &self.terms {
            if m[i] == 0 {
                continue;
            }
            let mut d = m.clone();
            d[i] -= 1;
            out.add_term(d, C::from_i64(&self.ctx, m[i] as i64) * c.clone());
        }
        out
    }

    pub fn eval(&self, point: &[C]) -> C {
        self.terms.iter().fold(C::zero(&self.ctx), |acc, (m, c)| {
            let t = m
                .iter()
                .zip(point)
                .fold(c.clone(), |t, (&e, x)| if e == 0 { t } else { t * x.pow(e as u64) });
            acc + t
        })
    }

    pub fn map_coeffs<D: Coeff>(&self, ctx: D::Ctx, f: impl Fn(&C) -> D) -> MultiPoly<D> {
        MultiPoly::from_terms(ctx, self.nvars, self.terms.iter().map(|(m, c)| (m.clone(), f(c))))
    }

    pub fn try_map_coeffs<D: Coeff>(&self, ctx: D::Ctx, f: impl Fn(&C) -> Result<D>) -> Result<MultiPoly<D>> {
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| Ok((m.clone(), f(c)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(MultiPoly::from_terms(ctx, self.nvars, terms))
    }

    /// Largest weighted degree of a term; `None` for zero.
    pub fn max_wdeg(&self, weights: &[BigRational]) -> Option<BigRational> {
        self.terms.keys().map(|m| wdeg(m, weights)).max()
    }

    pub fn to_string_with(&self, names: &[String]) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut out = String::new();
        for (i, (m, c)) in self.terms.iter().rev().enumerate() {
            let text = c.to_string();
            let simple = !text.contains(' ');
            let (neg, body) = match text.strip_prefix('-') {
                Some(rest) if simple => (true, rest.to_string()),
                _ => (false, if simple { text } else { format!("({text})") }),
            };
            if i == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mono = format_monomial(m, names);
            match (body.as_str(), mono.as_str()) {
                (_, "1") => out.push_str(&body),
                ("1", _) => out.push_str(&mono),
                _ => {
                    out.push_str(&body);
                    out.push('*');
                    out.push_str(&mono);
                }
            }
        }
        out
    }
}

impl<C: Coeff> fmt::Display for MultiPoly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_string_with(&var_names(self.nvars)))
    }
}

impl<C: Coeff> Add for MultiPoly<C> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        self.add_ref(&rhs)
    }
}

impl<C: Coeff> Sub for MultiPoly<C> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self.sub_ref(&rhs)
    }
}

impl<C: Coeff> Mul for MultiPoly<C> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        self.mul_ref(&rhs)
    }
}

impl<C: Coeff> Neg for MultiPoly<C> {
    type Output = Self;
    fn neg(self) -> Self {
        self.neg_ref()
    }
}

/// Polynomial rings are coefficient rings too; this is what symbolic Witt
/// vectors are built on.
impl<C: Coeff> Coeff for MultiPoly<C> {
    type Ctx = PolyRing<C>;

    fn ctx(&self) -> PolyRing<C> {
        PolyRing { nvars: self.nvars, inner: self.ctx.clone() }
    }
    fn zero(ctx: &PolyRing<C>) -> Self {
        MultiPoly::zero(ctx.inner.clone(), ctx.nvars)
    }
    fn one(ctx: &PolyRing<C>) -> Self {
        MultiPoly::one(ctx.inner.clone(), ctx.nvars)
    }
    fn from_i64(ctx: &PolyRing<C>, n: i64) -> Self {
        MultiPoly::constant(ctx.inner.clone(), ctx.nvars, C::from_i64(&ctx.inner, n))
    }
    fn from_bigint(ctx: &PolyRing<C>, n: &BigInt) -> Self {
        MultiPoly::constant(ctx.inner.clone(), ctx.nvars, C::from_bigint(&ctx.inner, n))
    }
    fn from_rational(ctx: &PolyRing<C>, q: &BigRational) -> Result<Self> {
        Ok(MultiPoly::constant(ctx.inner.clone(), ctx.nvars, C::from_rational(&ctx.inner, q)?))
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    fn inv(&self) -> Option<Self> {
        let c = self.as_constant()?.inv()?;
        Some(MultiPoly::constant(self.ctx.clone(), self.nvars, c))
    }
    fn char_class(ctx: &PolyRing<C>) -> CharClass {
        C::char_class(&ctx.inner)
    }
    fn same_ring(a: &PolyRing<C>, b: &PolyRing<C>) -> bool {
        a.nvars == b.nvars && C::same_ring(&a.inner, &b.inner)
    }
    fn random_small(ctx: &PolyRing<C>, rng: &mut dyn RngCore, bound: i64) -> Self {
        let mut out = MultiPoly::zero(ctx.inner.clone(), ctx.nvars);
        for _ in 0..rng.gen_range(1..=3) {
            let m: Monomial = (0..ctx.nvars).map(|_| rng.gen_range(0..=2)).collect();
            out.add_term(m, C::random_small(&ctx.inner, rng, bound));
        }
        out
    }
}
