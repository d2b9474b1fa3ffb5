use crate::coeff::{Coeff, Series, TruncPoly};
use crate::error::{Error, Result};
use crate::residue::MilnorAlgebra;

use super::{reduce_form, BrieskornElement, FamilyLattice, Lattice};

/// K(e_i, e_j) as t-series.
#[derive(Debug, Clone, PartialEq)]
pub struct PairingMatrix<S: Coeff> {
    entries: Vec<Vec<Series<S>>>,
}

impl<S: Coeff> PairingMatrix<S> {
    pub fn new(entries: Vec<Vec<Series<S>>>) -> Result<Self> {
        let mu = entries.len();
        if entries.iter().any(|r| r.len() != mu) {
            return Err(Error::InvalidInput("pairing matrix must be square".into()));
        }
        Ok(PairingMatrix { entries })
    }

    pub fn entries(&self) -> &[Vec<Series<S>>] {
        &self.entries
    }

    pub fn entry(&self, i: usize, j: usize) -> &Series<S> {
        &self.entries[i][j]
    }

    pub fn mu(&self) -> usize {
        self.entries.len()
    }

    pub fn order(&self) -> i64 {
        self.entries.iter().flatten().map(|s| s.order()).min().unwrap_or(i64::MAX)
    }

    /// Lowest t-exponent present in any entry.
    pub fn valuation(&self) -> i64 {
        self.entries
            .iter()
            .flatten()
            .filter(|s| !s.is_zero())
            .map(|s| s.valuation())
            .min()
            .unwrap_or(self.order())
    }

    /// The t^0 coefficients.
    pub fn constant_term(&self) -> Option<Vec<Vec<S>>> {
        self.entries.iter().map(|r| r.iter().map(|s| s.coeff(0)).collect()).collect()
    }

    pub fn truncate(&self, order: i64) -> Self {
        PairingMatrix {
            entries: self.entries.iter().map(|r| r.iter().map(|s| s.truncate(order)).collect()).collect(),
        }
    }
}

/// K on the monomial basis of a quasi-homogeneous germ. The entries are the
/// constants res(φ_i φ_j): both classes are ∇_{t∂t}-eigenvectors and the
/// pairing has degree n, so every higher t-coefficient vanishes.
pub fn pairing_basis<C: Coeff>(alg: &MilnorAlgebra<C>, order: i64) -> Result<PairingMatrix<C>> {
    let res = alg.residue_pairing_matrix()?;
    let entries = res
        .into_iter()
        .map(|row| row.into_iter().map(|c| Series::constant(c, order)).collect())
        .collect();
    Ok(PairingMatrix { entries })
}

/// K(u, v) = Σ_{i,j} u_i(t)·v_j(−t)·K_ij(t).
pub fn pairing_eval<S: Coeff>(u: &BrieskornElement<S>, v: &BrieskornElement<S>, k: &PairingMatrix<S>) -> Result<Series<S>> {
    if u.mu() != k.mu() || v.mu() != k.mu() {
        return Err(Error::TypeMismatch(format!(
            "pairing of elements with {} and {} coordinates against a {}×{} matrix",
            u.mu(),
            v.mu(),
            k.mu(),
            k.mu()
        )));
    }
    let ctx = k.entries.first().and_then(|r| r.first()).map(|s| s.ctx().clone());
    let ctx = match ctx {
        Some(c) => c,
        None => return Err(Error::InvalidInput("empty pairing matrix".into())),
    };
    let vbar: Vec<Series<S>> = v.coords().iter().map(|s| s.conjugate()).collect();
    let mut acc = Series::zero(ctx, i64::MAX);
    let mut floor: Option<i64> = None;
    for (i, ui) in u.coords().iter().enumerate() {
        for (j, vj) in vbar.iter().enumerate() {
            let kij = &k.entries[i][j];
            let term = ui.mul(vj)?.mul(kij)?;
            acc = acc.add(&term)?;
            if !ui.is_zero() && !vj.is_zero() && !kij.is_zero() {
                let low = ui.valuation() + vj.valuation() + kij.valuation();
                floor = Some(floor.map_or(low, |f: i64| f.min(low)));
            }
        }
    }
    if let Some(f) = floor {
        if acc.order() <= f {
            return Err(Error::PrecisionLoss(format!(
                "pairing known only below t^{}, but its lowest possible term is t^{}",
                acc.order(),
                f
            )));
        }
    }
    Ok(acc)
}

/// s^k-coefficient of every t-coefficient.
fn s_slice<C: Coeff>(x: &Series<TruncPoly<C>>, k: usize, inner: &C::Ctx) -> Series<C> {
    x.map(inner.clone(), |c| c.coeff(k).cloned().unwrap_or_else(|| C::zero(inner)))
}

/// Replace the s^k-coefficients of x by those of part.
fn set_s_slice<C: Coeff>(x: &Series<TruncPoly<C>>, k: usize, part: &Series<C>) -> Result<Series<TruncPoly<C>>> {
    let ctx = x.ctx().clone();
    let order = x.order().min(part.order());
    let low = x.valuation().min(part.valuation()).min(order);
    let coeffs = (low..order)
        .map(|e| {
            let c = x.coeff(e).unwrap_or_else(|| TruncPoly::zero(&ctx));
            let v = part.coeff(e).unwrap_or_else(|| C::zero(&ctx.inner));
            c.with_coeff(k, v)
        })
        .collect();
    Series::new(ctx, low, coeffs, order)
}

/// Extend K from s = 0 to the family by solving the flatness equation
/// ∂_s K(e_i, e_j) = K(∇_s e_i, e_j) + K(e_i, ∇_s e_j) order by order in s.
///
/// Every ∇_s step divides by t, so `k0` must be known to t-order
/// `torder + M − 1`. The result is truncated at `torder`.
pub fn flat_extend_pairing<C: Coeff>(
    lat: &FamilyLattice<C>,
    k0: &PairingMatrix<C>,
    torder: i64,
) -> Result<PairingMatrix<TruncPoly<C>>> {
    let mu = lat.mu();
    let sorder = lat.family().order();
    let tctx = lat.scalar_ctx();
    let inner = tctx.inner.clone();
    if k0.mu() != mu {
        return Err(Error::TypeMismatch(format!("initial pairing is {}×{}, basis has {mu} elements", k0.mu(), k0.mu())));
    }
    let needed = torder + sorder as i64 - 1;
    if k0.order() < needed {
        return Err(Error::PrecisionLoss(format!(
            "initial pairing known to t^{} but {} s-orders need t^{needed}",
            k0.order(),
            sorder
        )));
    }
    let g = lat.deformation().expect("families carry a deformation");
    let beta: Vec<BrieskornElement<TruncPoly<C>>> = (0..mu)
        .map(|i| reduce_form(lat, &g.mul_ref(&lat.basis_poly(i)), needed + 1).map(|b| b.shift(-1)))
        .collect::<Result<_>>()?;
    let beta_bar: Vec<Vec<Series<TruncPoly<C>>>> =
        beta.iter().map(|b| b.coords().iter().map(|s| s.conjugate()).collect()).collect();

    let mut gm: Vec<Vec<Series<TruncPoly<C>>>> = k0
        .entries
        .iter()
        .map(|row| row.iter().map(|s| s.truncate(needed).map(tctx.clone(), |c| TruncPoly::constant(c.clone(), sorder))).collect())
        .collect();

    for m in 0..sorder.saturating_sub(1) {
        let scale = C::from_rational(&inner, &num_rational::BigRational::from_integer((m as i64 + 1).into()))?
            .inv()
            .ok_or_else(|| Error::DenominatorNotInvertible {
                scalar: (m + 1).to_string(),
                context: "flat extension of the pairing in s".into(),
            })?;
        let mut next = gm.clone();
        for i in 0..mu {
            for j in 0..mu {
                let mut rhs = Series::zero(tctx.clone(), i64::MAX);
                for l in 0..mu {
                    rhs = rhs.add(&beta[i].coords()[l].mul(&gm[l][j])?)?;
                    rhs = rhs.add(&beta_bar[j][l].mul(&gm[i][l])?)?;
                }
                let part = s_slice(&rhs, m, &inner).scale(&scale);
                next[i][j] = set_s_slice(&gm[i][j], m + 1, &part)?;
            }
        }
        gm = next;
    }
    let out = PairingMatrix { entries: gm };
    if out.order() < torder {
        return Err(Error::PrecisionLoss(format!(
            "flat extension lost t-precision: known to t^{}, requested t^{torder}",
            out.order()
        )));
    }
    Ok(out.truncate(torder))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{qh_check, MultiPoly, TieBreak};
    use num_rational::BigRational;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn a2() -> MilnorAlgebra<BigRational> {
        let f = MultiPoly::from_terms((), 1, [(vec![3], q(1, 1))]);
        MilnorAlgebra::new(qh_check(&f, &[q(1, 3)], TieBreak::Grevlex).unwrap()).unwrap()
    }

    #[test]
    fn cubic_pairing_on_forms() {
        let a = a2();
        let k = pairing_basis(&a, 6).unwrap();
        assert_eq!(k.constant_term().unwrap(), vec![vec![q(0, 1), q(1, 3)], vec![q(1, 3), q(0, 1)]]);
        let x3 = reduce_form(&a, &MultiPoly::from_terms((), 1, [(vec![3], q(1, 1))]), 6).unwrap();
        let x = BrieskornElement::basis_element((), 2, 1, 6);
        let v = pairing_eval(&x3, &x, &k).unwrap();
        assert_eq!(v, Series::monomial(q(-1, 9), 1, 6));
        let w = pairing_eval(&x, &x3, &k).unwrap();
        assert_eq!(w, Series::monomial(q(1, 9), 1, 6));
    }

    #[test]
    fn exhausted_precision_is_reported() {
        let a = a2();
        let k = pairing_basis(&a, 8).unwrap();
        let e = BrieskornElement::new(vec![Series::zero((), 1), Series::monomial(q(1, 1), 5, 6)]);
        let e1 = BrieskornElement::new(vec![Series::one((), 8), Series::one((), 8)]);
        assert!(matches!(pairing_eval(&e, &e1, &k), Err(Error::PrecisionLoss(_))));
    }

    #[test]
    #[allow(clippy::needless_range_loop)]
    fn flat_extension_of_cubic_family_is_constant() {
        let a = a2();
        let fl = FamilyLattice::new(a.clone(), MultiPoly::from_terms((), 1, [(vec![1], q(1, 1))]), 4).unwrap();
        let k0 = pairing_basis(&a, 6 + 3).unwrap();
        let k = flat_extend_pairing(&fl, &k0, 6).unwrap();
        let expect = [[q(0, 1), q(1, 3)], [q(1, 3), q(0, 1)]];
        for i in 0..2 {
            for j in 0..2 {
                let e = k.entry(i, j);
                assert_eq!(e.order(), 6);
                let c = e.coeff(0).unwrap();
                assert_eq!(c.coeffs(), &[expect[i][j].clone(), q(0, 1), q(0, 1), q(0, 1)]);
                assert!((1..6).all(|t| e.coeff(t).unwrap().is_zero()));
            }
        }
        let short = pairing_basis(&a, 6).unwrap();
        assert!(matches!(flat_extend_pairing(&fl, &short, 6), Err(Error::PrecisionLoss(_))));
    }
}
