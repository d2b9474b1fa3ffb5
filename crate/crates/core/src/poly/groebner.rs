use std::collections::VecDeque;

use super::{divides, mono_div, mono_lcm, Monomial, MonomialOrder, MultiPoly};
use crate::coeff::Coeff;
use crate::error::{Error, Result};

/// A reduced Gröbner basis together with the expression of every basis
/// element in terms of the original generators.
#[derive(Debug, Clone)]
pub struct GroebnerData<C: Coeff> {
    gens: Vec<MultiPoly<C>>,
    order: MonomialOrder,
    basis: Vec<MultiPoly<C>>,
    /// basis[j] = Σ_k cofactors[j][k] · gens[k]
    cofactors: Vec<Vec<MultiPoly<C>>>,
    staircase: Option<Vec<Monomial>>,
}

/// g = Σ cofactors[k] · gens[k] + remainder.
#[derive(Debug, Clone, PartialEq)]
pub struct Division<C: Coeff> {
    pub remainder: MultiPoly<C>,
    pub cofactors: Vec<MultiPoly<C>>,
}

impl<C: Coeff> GroebnerData<C> {
    pub fn generators(&self) -> &[MultiPoly<C>] {
        &self.gens
    }

    pub fn order(&self) -> &MonomialOrder {
        &self.order
    }

    pub fn basis(&self) -> &[MultiPoly<C>] {
        &self.basis
    }

    pub fn basis_cofactors(&self) -> &[Vec<MultiPoly<C>>] {
        &self.cofactors
    }

    pub fn leading_monomials(&self) -> Vec<Monomial> {
        self.basis.iter().map(|g| lm(g, &self.order)).collect()
    }

    /// Standard monomials, or `None` when there are infinitely many.
    pub fn staircase(&self) -> Option<&[Monomial]> {
        self.staircase.as_deref()
    }

    pub fn nvars(&self) -> usize {
        self.gens.first().map_or(0, |g| g.nvars())
    }
}

fn lm<C: Coeff>(g: &MultiPoly<C>, order: &MonomialOrder) -> Monomial {
    g.leading(order).expect("basis elements are nonzero").0.clone()
}

fn make_monic<C: Coeff>(
    g: MultiPoly<C>,
    cof: Vec<MultiPoly<C>>,
    order: &MonomialOrder,
) -> Result<(MultiPoly<C>, Vec<MultiPoly<C>>)> {
    let lc = g.leading(order).expect("nonzero").1.clone();
    let inv = lc.inv().ok_or_else(|| Error::DenominatorNotInvertible {
        scalar: lc.to_string(),
        context: format!("leading coefficient of {g} in a Gröbner basis computation"),
    })?;
    let cof = cof.iter().map(|c| c.scale(&inv)).collect();
    Ok((g.scale(&inv), cof))
}

/// Divide `h` by monic `basis`, always reducing the largest reducible term.
/// Returns the quotients (one per basis element) and the remainder.
fn divide<C: Coeff>(
    h: &MultiPoly<C>,
    basis: &[MultiPoly<C>],
    lms: &[Monomial],
    order: &MonomialOrder,
) -> (Vec<MultiPoly<C>>, MultiPoly<C>) {
    let ctx = h.ctx().clone();
    let n = h.nvars();
    let mut quots = vec![MultiPoly::zero(ctx.clone(), n); basis.len()];
    let mut r = h.clone();
    loop {
        let mut cands: Vec<(&Monomial, &C)> = r.terms().collect();
        cands.sort_by(|a, b| order.cmp(b.0, a.0));
        let hit = cands
            .into_iter()
            .find_map(|(m, c)| lms.iter().position(|l| divides(l, m)).map(|j| (m.clone(), c.clone(), j)));
        let Some((m, c, j)) = hit else {
            return (quots, r);
        };
        let shift = mono_div(&m, &lms[j]);
        r = r.sub_ref(&basis[j].mul_term(&shift, &c));
        quots[j] = quots[j].add_ref(&MultiPoly::monomial(ctx.clone(), shift, c));
    }
}

fn combine<C: Coeff>(quots: &[MultiPoly<C>], cofs: &[Vec<MultiPoly<C>>], ngens: usize, proto: &MultiPoly<C>) -> Vec<MultiPoly<C>> {
    let zero = MultiPoly::zero(proto.ctx().clone(), proto.nvars());
    (0..ngens)
        .map(|k| {
            quots
                .iter()
                .zip(cofs)
                .filter(|(q, _)| !q.is_zero())
                .fold(zero.clone(), |acc, (q, c)| acc.add_ref(&q.mul_ref(&c[k])))
        })
        .collect()
}

fn enumerate_staircase(lms: &[Monomial], nvars: usize) -> Option<Vec<Monomial>> {
    let mut bounds = Vec::with_capacity(nvars);
    for i in 0..nvars {
        let pure = lms
            .iter()
            .filter(|m| m.iter().enumerate().all(|(j, &e)| j == i || e == 0))
            .map(|m| m[i])
            .filter(|&e| e > 0)
            .min();
        bounds.push(pure?);
    }
    let mut out = Vec::new();
    let mut cur = vec![0u32; nvars];
    loop {
        if !lms.iter().any(|l| divides(l, &cur)) {
            out.push(cur.clone());
        }
        let mut i = 0;
        loop {
            if i == nvars {
                return Some(out);
            }
            cur[i] += 1;
            if cur[i] < bounds[i] {
                break;
            }
            cur[i] = 0;
            i += 1;
        }
    }
}

/// Reduced Gröbner basis of the ideal generated by `gens`.
///
/// Every leading coefficient met along the way must be a unit; over Z/p^m
/// a non-unit one raises `DenominatorNotInvertible` instead of silently
/// leaving the field case.
pub fn buchberger<C: Coeff>(gens: &[MultiPoly<C>], order: &MonomialOrder) -> Result<GroebnerData<C>> {
    let Some(first) = gens.first() else {
        return Err(Error::InvalidInput("no generators".into()));
    };
    let nvars = first.nvars();
    let ctx = first.ctx().clone();
    let ngens = gens.len();
    let unit = |k: usize| -> Vec<MultiPoly<C>> {
        (0..ngens)
            .map(|j| if j == k { MultiPoly::one(ctx.clone(), nvars) } else { MultiPoly::zero(ctx.clone(), nvars) })
            .collect()
    };

    let mut basis: Vec<MultiPoly<C>> = Vec::new();
    let mut cofs: Vec<Vec<MultiPoly<C>>> = Vec::new();
    for (k, g) in gens.iter().enumerate() {
        if g.is_zero() {
            continue;
        }
        let (g, c) = make_monic(g.clone(), unit(k), order)?;
        basis.push(g);
        cofs.push(c);
    }

    let mut pairs: VecDeque<(usize, usize)> =
        (0..basis.len()).flat_map(|j| (0..j).map(move |i| (i, j))).collect();
    while let Some((i, j)) = pairs.pop_front() {
        let (li, lj) = (lm(&basis[i], order), lm(&basis[j], order));
        if li.iter().zip(&lj).all(|(a, b)| *a == 0 || *b == 0) {
            continue;
        }
        let l = mono_lcm(&li, &lj);
        let one = C::one(&ctx);
        let (ui, uj) = (mono_div(&l, &li), mono_div(&l, &lj));
        let s = basis[i].mul_term(&ui, &one).sub_ref(&basis[j].mul_term(&uj, &one));
        let cs: Vec<MultiPoly<C>> = (0..ngens)
            .map(|k| cofs[i][k].mul_term(&ui, &one).sub_ref(&cofs[j][k].mul_term(&uj, &one)))
            .collect();
        let lms: Vec<Monomial> = basis.iter().map(|g| lm(g, order)).collect();
        let (q, r) = divide(&s, &basis, &lms, order);
        if r.is_zero() {
            continue;
        }
        let qc = combine(&q, &cofs, ngens, &r);
        let cr: Vec<MultiPoly<C>> = cs.iter().zip(&qc).map(|(a, b)| a.sub_ref(b)).collect();
        let (r, cr) = make_monic(r, cr, order)?;
        let t = basis.len();
        basis.push(r);
        cofs.push(cr);
        pairs.extend((0..t).map(|i| (i, t)));
    }

    // minimize: drop elements whose leading monomial another one divides
    let lms: Vec<Monomial> = basis.iter().map(|g| lm(g, order)).collect();
    let keep: Vec<usize> = (0..basis.len())
        .filter(|&i| {
            !(0..basis.len()).any(|j| j != i && divides(&lms[j], &lms[i]) && (lms[j] != lms[i] || j < i))
        })
        .collect();
    let mut basis: Vec<MultiPoly<C>> = keep.iter().map(|&i| basis[i].clone()).collect();
    let mut cofs: Vec<Vec<MultiPoly<C>>> = keep.iter().map(|&i| cofs[i].clone()).collect();

    // interreduce the tails
    for i in 0..basis.len() {
        let others: Vec<usize> = (0..basis.len()).filter(|&j| j != i).collect();
        let ob: Vec<MultiPoly<C>> = others.iter().map(|&j| basis[j].clone()).collect();
        let oc: Vec<Vec<MultiPoly<C>>> = others.iter().map(|&j| cofs[j].clone()).collect();
        let olms: Vec<Monomial> = ob.iter().map(|g| lm(g, order)).collect();
        let (q, r) = divide(&basis[i], &ob, &olms, order);
        let qc = combine(&q, &oc, ngens, &r);
        cofs[i] = cofs[i].iter().zip(&qc).map(|(a, b)| a.sub_ref(b)).collect();
        basis[i] = r;
    }

    let mut idx: Vec<usize> = (0..basis.len()).collect();
    idx.sort_by(|&a, &b| order.cmp(&lm(&basis[a], order), &lm(&basis[b], order)));
    let basis: Vec<MultiPoly<C>> = idx.iter().map(|&i| basis[i].clone()).collect();
    let cofs: Vec<Vec<MultiPoly<C>>> = idx.iter().map(|&i| cofs[i].clone()).collect();
    let lms: Vec<Monomial> = basis.iter().map(|g| lm(g, order)).collect();
    let staircase = enumerate_staircase(&lms, nvars);

    let data = GroebnerData { gens: gens.to_vec(), order: order.clone(), basis, cofactors: cofs, staircase };
    for (g, c) in data.basis.iter().zip(&data.cofactors) {
        let back = c
            .iter()
            .zip(&data.gens)
            .fold(MultiPoly::zero(ctx.clone(), nvars), |acc, (a, f)| acc.add_ref(&a.mul_ref(f)));
        if &back != g {
            return Err(Error::InternalInconsistency(format!(
                "Gröbner basis element {g} does not match its cofactor expression {back}"
            )));
        }
    }
    Ok(data)
}

/// Division by the original generators: g = Σ a_k gens[k] + r with r
/// supported on the staircase. The identity is re-expanded and checked on
/// every call.
pub fn normal_form_with_cofactors<C: Coeff>(g: &MultiPoly<C>, data: &GroebnerData<C>) -> Result<Division<C>> {
    let lms = data.leading_monomials();
    let (q, r) = divide(g, &data.basis, &lms, &data.order);
    let cofactors = combine(&q, &data.cofactors, data.gens.len(), g);
    let back = cofactors
        .iter()
        .zip(&data.gens)
        .fold(r.clone(), |acc, (a, f)| acc.add_ref(&a.mul_ref(f)));
    if &back != g {
        return Err(Error::InternalInconsistency(format!("division identity failed for {g}")));
    }
    Ok(Division { remainder: r, cofactors })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::{ModInt, Modulus};
    use crate::poly::TieBreak;
    use num_rational::BigRational;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn poly(terms: &[(&[u32], i64, i64)]) -> MultiPoly<BigRational> {
        let n = terms[0].0.len();
        MultiPoly::from_terms((), n, terms.iter().map(|&(m, a, b)| (m.to_vec(), q(a, b))))
    }

    #[test]
    fn single_generator() {
        let g = buchberger(&[poly(&[(&[2], 3, 1)])], &MonomialOrder::grevlex()).unwrap();
        assert_eq!(g.basis(), &[poly(&[(&[2], 1, 1)])]);
        assert_eq!(g.staircase().unwrap(), &[vec![0], vec![1]]);
    }

    #[test]
    fn d4_jacobian() {
        // (3x² + y², 2xy)
        let gens = [poly(&[(&[2, 0], 3, 1), (&[0, 2], 1, 1)]), poly(&[(&[1, 1], 2, 1)])];
        let w = [q(1, 3), q(1, 3)];
        let order = MonomialOrder::weighted(&w, TieBreak::Grevlex).unwrap();
        let g = buchberger(&gens, &order).unwrap();
        let lms = g.leading_monomials();
        assert_eq!(lms, vec![vec![1, 1], vec![2, 0], vec![0, 3]]);
        assert_eq!(g.basis()[1], poly(&[(&[2, 0], 1, 1), (&[0, 2], 1, 3)]));
        let mut st = g.staircase().unwrap().to_vec();
        st.sort();
        assert_eq!(st, vec![vec![0, 0], vec![0, 1], vec![0, 2], vec![1, 0]]);
    }

    #[test]
    fn maximal_ideal() {
        let gens = [poly(&[(&[1, 0], 2, 1)]), poly(&[(&[0, 1], 2, 1)])];
        let g = buchberger(&gens, &MonomialOrder::grlex()).unwrap();
        assert_eq!(g.staircase().unwrap(), &[vec![0, 0]]);
    }

    #[test]
    fn infinite_staircase() {
        // (2xy, x²)
        let gens = [poly(&[(&[1, 1], 2, 1)]), poly(&[(&[2, 0], 1, 1)])];
        let g = buchberger(&gens, &MonomialOrder::grevlex()).unwrap();
        assert!(g.staircase().is_none());
    }

    #[test]
    fn division_examples() {
        let gens = [poly(&[(&[2], 3, 1)])];
        let g = buchberger(&gens, &MonomialOrder::grevlex()).unwrap();
        let d = normal_form_with_cofactors(&poly(&[(&[2], 1, 1)]), &g).unwrap();
        assert!(d.remainder.is_zero());
        assert_eq!(d.cofactors, vec![poly(&[(&[0], 1, 3)])]);
        let d = normal_form_with_cofactors(&poly(&[(&[1], 1, 1)]), &g).unwrap();
        assert_eq!(d.remainder, poly(&[(&[1], 1, 1)]));
        assert!(d.cofactors[0].is_zero());

        let gens = [poly(&[(&[2, 0], 3, 1), (&[0, 2], 1, 1)]), poly(&[(&[1, 1], 2, 1)])];
        let w = [q(1, 3), q(1, 3)];
        let g = buchberger(&gens, &MonomialOrder::weighted(&w, TieBreak::Grevlex).unwrap()).unwrap();
        let d = normal_form_with_cofactors(&poly(&[(&[2, 0], 1, 1)]), &g).unwrap();
        assert_eq!(d.remainder, poly(&[(&[0, 2], -1, 3)]));
        assert_eq!(d.cofactors[0], poly(&[(&[0, 0], 1, 3)]));
        assert!(d.cofactors[1].is_zero());
    }

    #[test]
    fn non_unit_leading_coefficient_over_zpm() {
        let z = Modulus::new(3, 2).unwrap();
        let gens = [MultiPoly::monomial(z, vec![2], ModInt::new(z, 3))];
        assert!(matches!(
            buchberger(&gens, &MonomialOrder::grevlex()),
            Err(Error::DenominatorNotInvertible { .. })
        ));
    }
}
