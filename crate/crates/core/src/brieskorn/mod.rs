//! The Brieskorn lattice Ω^n[[t]] / (t·d + df∧)Ω^{n−1}[[t]] of a
//! quasi-homogeneous germ (or of a one-parameter family), its connection
//! operators and the higher residue pairing.
//!
//! Conventions: forms are read as ω·e^{f/t}, so the boundary relation is
//! df∧η ≡ −t·dη, and the connection operators are
//! ∇_{t∂t} = t∂_t − t^{−1}·f and ∇_{∂s} = ∂_s + t^{−1}·(∂_s f).

mod axioms;
mod pairing;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;

use crate::coeff::{Coeff, Series, TruncCtx, TruncPoly};
use crate::error::{Error, Result};
use crate::poly::{family_division, wdeg, FamilyDeformation, Monomial, MultiPoly};
use crate::residue::{family_residue_matrix, MilnorAlgebra};

pub use axioms::{flatness_defect, verify_axioms, AxiomCheck, AxiomReport, CheckStatus};
pub use pairing::{flat_extend_pairing, pairing_basis, pairing_eval, PairingMatrix};

/// Basis coordinates of the remainder and the cofactors of the partials.
pub type Split<S> = (Vec<S>, Vec<MultiPoly<S>>);

/// What the lattice computations need from the underlying algebra: a
/// monomial basis, division modulo the Jacobian ideal of the potential and
/// the residue matrix of the fiber at t = 0.
pub trait Lattice {
    type Scalar: Coeff;

    fn nvars(&self) -> usize;
    fn basis(&self) -> &[Monomial];
    fn weights(&self) -> &[BigRational];
    fn scalar_ctx(&self) -> <Self::Scalar as Coeff>::Ctx;
    /// f, or f_s for a family.
    fn potential(&self) -> MultiPoly<Self::Scalar>;
    /// g = Σ a_i ∂_i(potential) + r; returns the coordinates of r in the
    /// basis and the cofactors a_i.
    fn divide(&self, g: &MultiPoly<Self::Scalar>) -> Result<Split<Self::Scalar>>;
    /// ∂_s of the potential for families, `None` otherwise.
    fn deformation(&self) -> Option<MultiPoly<Self::Scalar>>;
    /// ∂_s on scalars (zero map without a parameter).
    fn scalar_derivative(&self, c: &Self::Scalar) -> Self::Scalar;
    fn residue_matrix(&self) -> Result<Vec<Vec<Self::Scalar>>>;

    fn mu(&self) -> usize {
        self.basis().len()
    }

    fn basis_poly(&self, i: usize) -> MultiPoly<Self::Scalar> {
        let ctx = self.scalar_ctx();
        let one = <Self::Scalar as Coeff>::one(&ctx);
        MultiPoly::monomial(ctx, self.basis()[i].clone(), one)
    }
}

impl<C: Coeff> Lattice for MilnorAlgebra<C> {
    type Scalar = C;

    fn nvars(&self) -> usize {
        self.singularity().nvars()
    }
    fn basis(&self) -> &[Monomial] {
        MilnorAlgebra::basis(self)
    }
    fn weights(&self) -> &[BigRational] {
        self.singularity().weights()
    }
    fn scalar_ctx(&self) -> C::Ctx {
        self.ctx().clone()
    }
    fn potential(&self) -> MultiPoly<C> {
        self.singularity().f().clone()
    }
    fn divide(&self, g: &MultiPoly<C>) -> Result<Split<C>> {
        let d = crate::poly::normal_form_with_cofactors(g, self.singularity().groebner())?;
        Ok((self.remainder_coordinates(&d.remainder)?, d.cofactors))
    }
    fn deformation(&self) -> Option<MultiPoly<C>> {
        None
    }
    fn scalar_derivative(&self, _c: &C) -> C {
        C::zero(self.ctx())
    }
    fn residue_matrix(&self) -> Result<Vec<Vec<C>>> {
        self.residue_pairing_matrix()
    }
}

/// The lattice of the family f_s = f + s·g, scalars in C[s]/(s^M).
#[derive(Debug, Clone)]
pub struct FamilyLattice<C: Coeff> {
    alg: MilnorAlgebra<C>,
    fam: FamilyDeformation<C>,
}

impl<C: Coeff> FamilyLattice<C> {
    pub fn new(alg: MilnorAlgebra<C>, g: MultiPoly<C>, sorder: usize) -> Result<Self> {
        let fam = FamilyDeformation::new(alg.singularity().clone(), g, sorder)?;
        Ok(FamilyLattice { alg, fam })
    }

    pub fn algebra(&self) -> &MilnorAlgebra<C> {
        &self.alg
    }

    pub fn family(&self) -> &FamilyDeformation<C> {
        &self.fam
    }
}

impl<C: Coeff> Lattice for FamilyLattice<C> {
    type Scalar = TruncPoly<C>;

    fn nvars(&self) -> usize {
        self.alg.singularity().nvars()
    }
    fn basis(&self) -> &[Monomial] {
        self.alg.basis()
    }
    fn weights(&self) -> &[BigRational] {
        self.alg.singularity().weights()
    }
    fn scalar_ctx(&self) -> TruncCtx<C> {
        self.fam.trunc_ctx()
    }
    fn potential(&self) -> MultiPoly<TruncPoly<C>> {
        self.fam.f_s()
    }
    fn divide(&self, g: &MultiPoly<TruncPoly<C>>) -> Result<Split<TruncPoly<C>>> {
        let d = family_division(g, &self.fam)?;
        let mut coords = vec![TruncPoly::zero(&self.scalar_ctx()); self.mu()];
        for (m, c) in d.remainder.terms() {
            let i = self.alg.index_of(m).ok_or_else(|| {
                Error::InternalInconsistency(format!("family remainder term outside the staircase in {}", d.remainder))
            })?;
            coords[i] = c.clone();
        }
        Ok((coords, d.cofactors))
    }
    fn deformation(&self) -> Option<MultiPoly<TruncPoly<C>>> {
        Some(self.fam.lift(self.fam.direction()))
    }
    fn scalar_derivative(&self, c: &TruncPoly<C>) -> TruncPoly<C> {
        c.derivative()
    }
    fn residue_matrix(&self) -> Result<Vec<Vec<TruncPoly<C>>>> {
        family_residue_matrix(&self.alg, &self.fam)
    }
}

/// A lattice class Σ_i u_i(t)·[φ_i dx].
#[derive(Debug, Clone, PartialEq)]
pub struct BrieskornElement<S: Coeff> {
    coords: Vec<Series<S>>,
}

impl<S: Coeff> BrieskornElement<S> {
    pub fn new(coords: Vec<Series<S>>) -> Self {
        BrieskornElement { coords }
    }

    pub fn zero(ctx: S::Ctx, mu: usize, order: i64) -> Self {
        BrieskornElement { coords: vec![Series::zero(ctx, order); mu] }
    }

    /// e_i = [φ_i dx]
    pub fn basis_element(ctx: S::Ctx, mu: usize, i: usize, order: i64) -> Self {
        let mut coords = vec![Series::zero(ctx.clone(), order); mu];
        coords[i] = Series::one(ctx, order);
        BrieskornElement { coords }
    }

    pub fn coords(&self) -> &[Series<S>] {
        &self.coords
    }

    pub fn mu(&self) -> usize {
        self.coords.len()
    }

    /// Common truncation order.
    pub fn order(&self) -> i64 {
        self.coords.iter().map(|c| c.order()).min().unwrap_or(i64::MAX)
    }

    /// Lowest t-exponent present.
    pub fn valuation(&self) -> i64 {
        self.coords.iter().filter(|c| !c.is_zero()).map(|c| c.valuation()).min().unwrap_or(self.order())
    }

    /// Lattice membership: no negative t-powers.
    pub fn in_lattice(&self) -> bool {
        self.valuation() >= 0
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let coords = self.coords.iter().zip(&other.coords).map(|(a, b)| a.add(b)).collect::<Result<_>>()?;
        Ok(BrieskornElement { coords })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let coords = self.coords.iter().zip(&other.coords).map(|(a, b)| a.sub(b)).collect::<Result<_>>()?;
        Ok(BrieskornElement { coords })
    }

    /// v(t) · self
    pub fn scale(&self, v: &Series<S>) -> Result<Self> {
        let coords = self.coords.iter().map(|a| v.mul(a)).collect::<Result<_>>()?;
        Ok(BrieskornElement { coords })
    }

    pub fn scale_scalar(&self, c: &S) -> Self {
        BrieskornElement { coords: self.coords.iter().map(|a| a.scale(c)).collect() }
    }

    /// t^k · self
    pub fn shift(&self, k: i64) -> Self {
        BrieskornElement { coords: self.coords.iter().map(|a| a.shift(k)).collect() }
    }

    pub fn truncate(&self, order: i64) -> Self {
        BrieskornElement { coords: self.coords.iter().map(|a| a.truncate(order)).collect() }
    }

    /// Coordinatewise t∂_t.
    pub fn theta(&self) -> Self {
        BrieskornElement { coords: self.coords.iter().map(|a| a.theta()).collect() }
    }

    /// Equality of every coefficient both sides know.
    pub fn agrees_with(&self, other: &Self) -> bool {
        self.mu() == other.mu() && self.coords.iter().zip(&other.coords).all(|(a, b)| a.agrees_with(b))
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.mu() != other.mu() {
            return Err(Error::TypeMismatch(format!(
                "lattice elements with {} and {} coordinates",
                self.mu(),
                other.mu()
            )));
        }
        Ok(())
    }
}

/// Largest weighted degree of g, rounded down, plus two: the number of
/// division rounds after which the reduction must have terminated.
fn round_cap(g_deg: Option<BigRational>) -> usize {
    match g_deg {
        None => 1,
        Some(d) => {
            let fl = d.numer().div_floor(d.denom());
            let fl: i64 = fl.try_into().unwrap_or(i64::MAX - 2);
            (fl.max(0) + 2) as usize
        }
    }
}

/// [g·dx] in basis coordinates, to t-order `order`.
///
/// Each round splits g = Σ a_i ∂_i f + r, records r at the current t-power
/// and continues with −Σ ∂_i a_i one t-power higher. The weighted degree
/// drops by one per round.
pub fn reduce_form<L: Lattice>(lat: &L, g: &MultiPoly<L::Scalar>, order: i64) -> Result<BrieskornElement<L::Scalar>> {
    let ctx = lat.scalar_ctx();
    let mu = lat.mu();
    let cap = round_cap(g.max_wdeg(lat.weights()));
    let width = order.max(0) as usize;
    let mut rows: Vec<Vec<L::Scalar>> = Vec::new();
    let mut h = g.clone();
    let mut rounds = 0usize;
    while !h.is_zero() && rows.len() < width {
        if rounds >= cap {
            return Err(Error::InternalInconsistency(format!(
                "t-adic reduction of {g} did not terminate within {cap} rounds"
            )));
        }
        rounds += 1;
        let (r, cof) = lat.divide(&h)?;
        rows.push(r);
        let zero = MultiPoly::zero(ctx.clone(), lat.nvars());
        h = cof.iter().enumerate().fold(zero, |acc, (i, a)| acc.sub_ref(&a.derivative(i)));
    }
    let coords = (0..mu)
        .map(|i| Series::from_coeffs(ctx.clone(), rows.iter().map(|r| r[i].clone()).collect(), order))
        .collect();
    Ok(BrieskornElement { coords })
}

/// Σ_i u_i(t)·images[i], where images[i] is the image of e_i.
fn apply_linear<S: Coeff>(v: &BrieskornElement<S>, images: &[BrieskornElement<S>]) -> Result<Option<BrieskornElement<S>>> {
    let mut acc: Option<BrieskornElement<S>> = None;
    for (u, img) in v.coords.iter().zip(images) {
        if u.is_zero() {
            continue;
        }
        let term = img.scale(u)?;
        acc = Some(match acc {
            None => term,
            Some(a) => a.add(&term)?,
        });
    }
    Ok(acc)
}

/// [F·φ_i dx] for every basis element, to t-order `order`.
fn multiplication_images<L: Lattice>(lat: &L, factor: &MultiPoly<L::Scalar>, order: i64) -> Result<Vec<BrieskornElement<L::Scalar>>> {
    (0..lat.mu())
        .map(|i| reduce_form(lat, &factor.mul_ref(&lat.basis_poly(i)), order))
        .collect()
}

/// ∇_{t∂t} v = t∂_t v − t^{−1}[f·v].
pub fn nabla_tdt<L: Lattice>(lat: &L, v: &BrieskornElement<L::Scalar>) -> Result<BrieskornElement<L::Scalar>> {
    let order = v.order().saturating_sub(v.valuation().min(0)) + 1;
    let images = multiplication_images(lat, &lat.potential(), order)?;
    let theta = v.theta();
    match apply_linear(v, &images)? {
        None => Ok(theta),
        Some(fv) => theta.sub(&fv.shift(-1)),
    }
}

/// ∇_{∂s} v = ∂_s v + t^{−1}[(∂_s f_s)·v]; only defined for families.
pub fn nabla_s<L: Lattice>(lat: &L, v: &BrieskornElement<L::Scalar>) -> Result<BrieskornElement<L::Scalar>> {
    let g = lat
        .deformation()
        .ok_or_else(|| Error::Unsupported("∇_s needs a family f + s·g".into()))?;
    let order = v.order().saturating_sub(v.valuation().min(0)) + 1;
    let images = multiplication_images(lat, &g, order)?;
    let ds = BrieskornElement {
        coords: v
            .coords
            .iter()
            .map(|u| u.map(u.ctx().clone(), |c| lat.scalar_derivative(c)))
            .collect(),
    };
    match apply_linear(v, &images)? {
        None => Ok(ds),
        Some(gv) => ds.add(&gv.shift(-1)),
    }
}

/// The ∇_{t∂t}-eigenvalues |w| + deg_w φ_i of the monomial basis.
pub fn spectral_numbers<C: Coeff>(alg: &MilnorAlgebra<C>) -> Vec<BigRational> {
    let w = alg.singularity().weights();
    let total: BigRational = w.iter().sum();
    alg.basis().iter().map(|m| &total + wdeg(m, w)).collect()
}

/// Is the multiset of spectral numbers symmetric about n/2?
pub fn spectrum_is_symmetric<C: Coeff>(alg: &MilnorAlgebra<C>) -> bool {
    let mut sp = spectral_numbers(alg);
    sp.sort();
    let n = BigRational::from_integer(BigInt::from(alg.singularity().nvars() as i64));
    let mut mirrored: Vec<BigRational> = sp.iter().map(|a| &n - a).collect();
    mirrored.sort();
    sp == mirrored
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{qh_check, TieBreak};

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn poly(terms: &[(&[u32], i64, i64)]) -> MultiPoly<BigRational> {
        let n = terms[0].0.len();
        MultiPoly::from_terms((), n, terms.iter().map(|&(m, a, b)| (m.to_vec(), q(a, b))))
    }

    fn alg(terms: &[(&[u32], i64, i64)], w: &[(i64, i64)]) -> MilnorAlgebra<BigRational> {
        let w: Vec<BigRational> = w.iter().map(|&(a, b)| q(a, b)).collect();
        MilnorAlgebra::new(qh_check(&poly(terms), &w, TieBreak::Grevlex).unwrap()).unwrap()
    }

    fn a2() -> MilnorAlgebra<BigRational> {
        alg(&[(&[3], 1, 1)], &[(1, 3)])
    }

    fn ser(low: i64, cs: &[(i64, i64)], order: i64) -> Series<BigRational> {
        Series::new((), low, cs.iter().map(|&(a, b)| q(a, b)).collect(), order).unwrap()
    }

    #[test]
    fn reduction_examples() {
        let a = a2();
        let r = reduce_form(&a, &poly(&[(&[2], 1, 1)]), 6).unwrap();
        assert!(r.is_zero());
        let r = reduce_form(&a, &poly(&[(&[3], 1, 1)]), 6).unwrap();
        assert_eq!(r.coords()[0], ser(1, &[(-1, 3)], 6));
        assert!(r.coords()[1].is_zero());
        let r = reduce_form(&a, &poly(&[(&[1], 1, 1)]), 6).unwrap();
        assert_eq!(r, BrieskornElement::basis_element((), 2, 1, 6));
    }

    #[test]
    fn euler_operator_is_diagonal_with_spectral_numbers() {
        let a = a2();
        let e1 = BrieskornElement::basis_element((), 2, 0, 6);
        let ex = BrieskornElement::basis_element((), 2, 1, 6);
        assert!(nabla_tdt(&a, &e1).unwrap().agrees_with(&e1.scale_scalar(&q(1, 3))));
        assert!(nabla_tdt(&a, &ex).unwrap().agrees_with(&ex.scale_scalar(&q(2, 3))));
        let b = alg(&[(&[2, 0], 1, 1), (&[0, 2], 1, 1)], &[(1, 2), (1, 2)]);
        let e = BrieskornElement::basis_element((), 1, 0, 6);
        assert!(nabla_tdt(&b, &e).unwrap().agrees_with(&e));
        // Leibniz in t
        let tv = ex.shift(1);
        let lhs = nabla_tdt(&a, &tv).unwrap();
        let rhs = tv.add(&nabla_tdt(&a, &ex).unwrap().shift(1)).unwrap();
        assert!(lhs.agrees_with(&rhs));
    }

    #[test]
    fn spectra_are_symmetric() {
        assert!(spectrum_is_symmetric(&a2()));
        assert_eq!(spectral_numbers(&a2()), vec![q(1, 3), q(2, 3)]);
        let d4 = alg(&[(&[3, 0], 1, 1), (&[1, 2], 1, 1)], &[(1, 3), (1, 3)]);
        assert!(spectrum_is_symmetric(&d4));
    }

    #[test]
    fn gauss_manin_on_cubic_family() {
        let a = a2();
        let fl = FamilyLattice::new(a, poly(&[(&[1], 1, 1)]), 4).unwrap();
        let ctx = fl.scalar_ctx();
        let e1 = BrieskornElement::basis_element(ctx.clone(), 2, 0, 6);
        let ex = BrieskornElement::basis_element(ctx.clone(), 2, 1, 6);
        let n1 = nabla_s(&fl, &e1).unwrap();
        assert!(n1.agrees_with(&ex.shift(-1)));
        let nx = nabla_s(&fl, &ex).unwrap();
        let minus_s_third = TruncPoly::from_coeffs((), vec![q(0, 1), q(-1, 3), q(0, 1), q(0, 1)]);
        assert!(nx.agrees_with(&e1.shift(-1).scale_scalar(&minus_s_third)));
        // t is ∂_s-constant
        let lhs = nabla_s(&fl, &ex.shift(1)).unwrap();
        assert!(lhs.agrees_with(&nx.shift(1)));
    }

    #[test]
    fn nabla_s_requires_a_family() {
        let e = BrieskornElement::basis_element((), 2, 0, 4);
        assert!(matches!(nabla_s(&a2(), &e), Err(Error::Unsupported(_))));
    }
}
