use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed};

use super::{buchberger, normal_form_with_cofactors, wdeg, GroebnerData, Monomial, MonomialOrder, MultiPoly, TieBreak};
use crate::coeff::{Coeff, TruncCtx, TruncPoly};
use crate::error::{Error, Result};

/// A validated quasi-homogeneous isolated hypersurface singularity.
#[derive(Debug, Clone)]
pub struct QHSingularity<C: Coeff> {
    f: MultiPoly<C>,
    weights: Vec<BigRational>,
    jacobian: Vec<MultiPoly<C>>,
    groebner: GroebnerData<C>,
}

impl<C: Coeff> QHSingularity<C> {
    pub fn f(&self) -> &MultiPoly<C> {
        &self.f
    }

    pub fn weights(&self) -> &[BigRational] {
        &self.weights
    }

    pub fn nvars(&self) -> usize {
        self.f.nvars()
    }

    pub fn ctx(&self) -> &C::Ctx {
        self.f.ctx()
    }

    /// ∂_1 f, …, ∂_n f
    pub fn jacobian(&self) -> &[MultiPoly<C>] {
        &self.jacobian
    }

    pub fn groebner(&self) -> &GroebnerData<C> {
        &self.groebner
    }

    /// |w| = Σ w_i
    pub fn weight_sum(&self) -> BigRational {
        self.weights.iter().sum()
    }
}

/// Validate f against the weights: every monomial must have weighted degree
/// one, the Euler relation f = Σ w_i x_i ∂_i f must hold in the coefficient
/// ring, and the Jacobian ideal must have finite codimension.
pub fn qh_check<C: Coeff>(f: &MultiPoly<C>, weights: &[BigRational], tie: TieBreak) -> Result<QHSingularity<C>> {
    let n = f.nvars();
    if weights.len() != n {
        return Err(Error::InvalidInput(format!("{} weights given for {n} variables", weights.len())));
    }
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    if let Some(w) = weights.iter().find(|w| !w.is_positive() || **w > half) {
        return Err(Error::InvalidInput(format!(
            "weight {} outside (0, 1/2]",
            crate::coeff::format_rational(w)
        )));
    }
    if f.is_zero() {
        return Err(Error::NotQuasiHomogeneous("f = 0".into()));
    }
    let one = <BigRational as One>::one();
    if let Some((m, _)) = f.terms().find(|(m, _)| wdeg(m, weights) != one) {
        return Err(Error::NotQuasiHomogeneous(format!(
            "monomial {} of {f} has weighted degree {}",
            super::format_monomial(m, &super::var_names(n)),
            crate::coeff::format_rational(&wdeg(m, weights))
        )));
    }
    let ctx = f.ctx().clone();
    let jacobian: Vec<MultiPoly<C>> = (0..n).map(|i| f.derivative(i)).collect();
    let mut euler = MultiPoly::zero(ctx.clone(), n);
    for (i, d) in jacobian.iter().enumerate() {
        let wi = C::from_rational(&ctx, &weights[i]).map_err(|e| match e {
            Error::DenominatorNotInvertible { scalar, .. } => Error::DenominatorNotInvertible {
                scalar,
                context: format!("weight {} in the Euler relation", crate::coeff::format_rational(&weights[i])),
            },
            other => other,
        })?;
        let mut xi = vec![0; n];
        xi[i] = 1;
        euler = euler.add_ref(&d.mul_term(&xi, &wi));
    }
    if &euler != f {
        return Err(Error::NotQuasiHomogeneous(format!("Euler relation fails: Σ w_i x_i ∂_i f = {euler}")));
    }
    if jacobian.iter().all(|d| d.is_zero()) {
        return Err(Error::NotIsolated(format!("all partial derivatives of {f} vanish")));
    }
    let order = MonomialOrder::weighted(weights, tie)?;
    let gb = buchberger(&jacobian, &order)?;
    if gb.staircase().is_none() {
        return Err(Error::NotIsolated(format!("the Jacobian ideal of {f} has infinite codimension")));
    }
    Ok(QHSingularity { f: f.clone(), weights: weights.to_vec(), jacobian, groebner: gb })
}

/// Standard monomials sorted by weighted degree, ties broken by descending
/// exponent vectors (so x comes before y).
pub fn milnor_basis<C: Coeff>(g: &GroebnerData<C>) -> Result<Vec<Monomial>> {
    let st = g
        .staircase()
        .ok_or_else(|| Error::NotIsolated("infinite staircase".into()))?;
    let n = g.nvars();
    let weights: Vec<BigRational> = match g.order().weights() {
        Some(w) => w.to_vec(),
        None => vec![<BigRational as One>::one(); n],
    };
    let mut basis = st.to_vec();
    basis.sort_by(|a, b| wdeg(a, &weights).cmp(&wdeg(b, &weights)).then_with(|| b.cmp(a)));
    Ok(basis)
}

pub fn milnor_number<C: Coeff>(g: &GroebnerData<C>) -> Result<usize> {
    Ok(milnor_basis(g)?.len())
}

/// The one-parameter family f_s = f + s·g with s^M = 0.
#[derive(Debug, Clone)]
pub struct FamilyDeformation<C: Coeff> {
    base: QHSingularity<C>,
    g: MultiPoly<C>,
    order: usize,
}

/// g = Σ a_i ∂_i(f_s) + r modulo s^M.
#[derive(Debug, Clone, PartialEq)]
pub struct FamilyDivision<C: Coeff> {
    pub remainder: MultiPoly<TruncPoly<C>>,
    pub cofactors: Vec<MultiPoly<TruncPoly<C>>>,
}

impl<C: Coeff> FamilyDeformation<C> {
    /// The direction g may not raise the weighted degree above that of f;
    /// otherwise the t-adic reduction of the family would not terminate.
    pub fn new(base: QHSingularity<C>, g: MultiPoly<C>, order: usize) -> Result<Self> {
        if order == 0 {
            return Err(Error::InvalidInput("s-truncation order must be positive".into()));
        }
        if g.nvars() != base.nvars() {
            return Err(Error::InvalidInput("deformation lives in a different number of variables".into()));
        }
        if let Some(d) = g.max_wdeg(base.weights()) {
            if d > <BigRational as One>::one() {
                return Err(Error::Unsupported(format!(
                    "deformation {g} has weighted degree {} > 1",
                    crate::coeff::format_rational(&d)
                )));
            }
        }
        Ok(FamilyDeformation { base, g, order })
    }

    pub fn base(&self) -> &QHSingularity<C> {
        &self.base
    }

    pub fn direction(&self) -> &MultiPoly<C> {
        &self.g
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn trunc_ctx(&self) -> TruncCtx<C> {
        TruncCtx { inner: self.base.ctx().clone(), order: self.order }
    }

    /// A polynomial constant in s.
    pub fn lift(&self, h: &MultiPoly<C>) -> MultiPoly<TruncPoly<C>> {
        let m = self.order;
        h.map_coeffs(self.trunc_ctx(), |c| TruncPoly::constant(c.clone(), m))
    }

    /// s · h
    pub fn lift_times_s(&self, h: &MultiPoly<C>) -> MultiPoly<TruncPoly<C>> {
        let s = TruncPoly::s(self.base.ctx().clone(), self.order);
        self.lift(h).scale(&s)
    }

    /// f + s·g
    pub fn f_s(&self) -> MultiPoly<TruncPoly<C>> {
        self.lift(self.base.f()).add_ref(&self.lift_times_s(&self.g))
    }
}

/// The s^k part of a family polynomial.
pub fn s_part<C: Coeff>(h: &MultiPoly<TruncPoly<C>>, k: usize, inner: &C::Ctx) -> MultiPoly<C> {
    MultiPoly::from_terms(
        inner.clone(),
        h.nvars(),
        h.terms().filter_map(|(m, c)| c.coeff(k).map(|a| (m.clone(), a.clone()))),
    )
}

/// Assemble Σ_k s^k parts[k] with s-order `order`.
pub fn from_s_parts<C: Coeff>(parts: &[MultiPoly<C>], ctx: &TruncCtx<C>, nvars: usize) -> MultiPoly<TruncPoly<C>> {
    let mut monos: Vec<Monomial> = parts.iter().flat_map(|p| p.terms().map(|(m, _)| m.clone())).collect();
    monos.sort();
    monos.dedup();
    MultiPoly::from_terms(
        ctx.clone(),
        nvars,
        monos.into_iter().map(|m| {
            let coeffs = (0..ctx.order)
                .map(|k| parts.get(k).map_or_else(|| C::zero(&ctx.inner), |p| p.coeff(&m)))
                .collect();
            (m, TruncPoly::from_coeffs(ctx.inner.clone(), coeffs))
        }),
    )
}

fn effective_order<C: Coeff>(h: &MultiPoly<TruncPoly<C>>, m: usize) -> usize {
    h.terms().map(|(_, c)| c.order()).fold(m, usize::min)
}

/// Order-by-order division modulo Jac(f_s): the s^k error term is divided
/// by Jac(f) after subtracting the contribution Σ a_i^{(k−1)} ∂_i g of the
/// previous round.
pub fn family_division<C: Coeff>(h: &MultiPoly<TruncPoly<C>>, fam: &FamilyDeformation<C>) -> Result<FamilyDivision<C>> {
    let base = fam.base();
    let n = base.nvars();
    let inner = base.ctx().clone();
    let order = effective_order(h, fam.order());
    let ctx = TruncCtx { inner: inner.clone(), order };
    let dg: Vec<MultiPoly<C>> = (0..n).map(|i| fam.direction().derivative(i)).collect();

    let mut rem_parts: Vec<MultiPoly<C>> = Vec::with_capacity(order);
    let mut cof_parts: Vec<Vec<MultiPoly<C>>> = Vec::with_capacity(order);
    for k in 0..order {
        let mut target = s_part(h, k, &inner);
        if let Some(prev) = cof_parts.last() {
            for (a, d) in prev.iter().zip(&dg) {
                target = target.sub_ref(&a.mul_ref(d));
            }
        }
        let div = normal_form_with_cofactors(&target, base.groebner())?;
        rem_parts.push(div.remainder);
        cof_parts.push(div.cofactors);
    }
    let remainder = from_s_parts(&rem_parts, &ctx, n);
    let cofactors: Vec<MultiPoly<TruncPoly<C>>> = (0..n)
        .map(|i| {
            let parts: Vec<MultiPoly<C>> = cof_parts.iter().map(|c| c[i].clone()).collect();
            from_s_parts(&parts, &ctx, n)
        })
        .collect();

    let fs = fam.f_s();
    let back = cofactors
        .iter()
        .enumerate()
        .fold(remainder.clone(), |acc, (i, a)| acc.add_ref(&a.mul_ref(&fs.derivative(i))));
    let diff = back.sub_ref(h);
    if diff.terms().any(|(_, c)| c.coeffs()[..order.min(c.order())].iter().any(|a| !a.is_zero())) {
        return Err(Error::InternalInconsistency(format!("family division identity failed for {h}")));
    }
    Ok(FamilyDivision { remainder, cofactors })
}
