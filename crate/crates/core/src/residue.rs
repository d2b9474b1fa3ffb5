//! The Milnor algebra of a quasi-homogeneous germ and its Grothendieck
//! residue, normalized by res(hess f) = μ.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::coeff::{Coeff, TruncPoly};
use crate::poly::{
    family_division, milnor_basis, normal_form_with_cofactors, wdeg, FamilyDeformation, Monomial, MultiPoly,
    QHSingularity,
};
use crate::error::{Error, Result};

/// Determinant of the matrix of second partials.
pub fn hessian<C: Coeff>(f: &MultiPoly<C>) -> MultiPoly<C> {
    let n = f.nvars();
    let rows: Vec<Vec<MultiPoly<C>>> = (0..n)
        .map(|i| {
            let di = f.derivative(i);
            (0..n).map(|j| di.derivative(j)).collect()
        })
        .collect();
    det_poly(&rows, f)
}

fn det_poly<C: Coeff>(m: &[Vec<MultiPoly<C>>], proto: &MultiPoly<C>) -> MultiPoly<C> {
    let n = m.len();
    if n == 0 {
        return MultiPoly::one(proto.ctx().clone(), proto.nvars());
    }
    let mut out = MultiPoly::zero(proto.ctx().clone(), proto.nvars());
    for (j, a) in m[0].iter().enumerate() {
        if a.is_zero() {
            continue;
        }
        let minor: Vec<Vec<MultiPoly<C>>> = m[1..]
            .iter()
            .map(|row| row.iter().enumerate().filter(|(k, _)| *k != j).map(|(_, x)| x.clone()).collect())
            .collect();
        let term = a.mul_ref(&det_poly(&minor, proto));
        out = if j % 2 == 0 { out.add_ref(&term) } else { out.sub_ref(&term) };
    }
    out
}

/// Determinant by elimination with unit pivots. Returns `None` exactly when
/// the determinant is not a unit (zero over a field; divisible by p over
/// Z/p^m, where a column without a unit entry forces that).
pub fn unit_determinant<C: Coeff>(m: &[Vec<C>], ctx: &C::Ctx) -> Option<C> {
    let n = m.len();
    let mut a: Vec<Vec<C>> = m.to_vec();
    let mut det = C::one(ctx);
    for col in 0..n {
        let piv = (col..n).find(|&r| a[r][col].inv().is_some())?;
        if piv != col {
            a.swap(piv, col);
            det = -det;
        }
        let inv = a[col][col].inv().unwrap();
        det = det * a[col][col].clone();
        for r in col + 1..n {
            if a[r][col].is_zero() {
                continue;
            }
            let factor = a[r][col].clone() * inv.clone();
            let (top, rest) = a.split_at_mut(r);
            for (x, y) in rest[0][col..].iter_mut().zip(&top[col][col..]) {
                *x = x.clone() - factor.clone() * y.clone();
            }
        }
    }
    Some(det)
}

/// Closed-form residue of x^k for the Brieskorn–Pham germ Σ x_i^{a_i}:
/// Π_i (1/a_i if k_i = a_i − 2, else 0). Used as an independent oracle.
pub fn bp_residue_oracle(k: &[u32], a: &[u32]) -> BigRational {
    k.iter().zip(a).fold(<BigRational as One>::one(), |acc, (&ki, &ai)| {
        if ai >= 2 && ki == ai - 2 {
            acc / BigRational::from_integer(BigInt::from(ai))
        } else {
            <BigRational as Zero>::zero()
        }
    })
}

/// The Milnor algebra O/Jac(f) with its monomial basis, multiplication
/// table and residue functional.
#[derive(Debug, Clone)]
pub struct MilnorAlgebra<C: Coeff> {
    sing: QHSingularity<C>,
    basis: Vec<Monomial>,
    index: HashMap<Monomial, usize>,
    socle: usize,
    hessian: MultiPoly<C>,
    hessian_socle: C,
    socle_residue: C,
    mult: Vec<Vec<Vec<C>>>,
}

impl<C: Coeff> MilnorAlgebra<C> {
    pub fn new(sing: QHSingularity<C>) -> Result<Self> {
        let basis = milnor_basis(sing.groebner())?;
        let index: HashMap<Monomial, usize> = basis.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
        let w = sing.weights();
        let top = basis.iter().map(|m| wdeg(m, w)).max().expect("μ ≥ 1");
        let socles: Vec<usize> = (0..basis.len()).filter(|&i| wdeg(&basis[i], w) == top).collect();
        if socles.len() != 1 {
            return Err(Error::InternalInconsistency(format!(
                "top weighted-degree part of the Milnor algebra has dimension {}",
                socles.len()
            )));
        }
        let socle = socles[0];
        let ctx = sing.ctx().clone();
        let mu = basis.len();

        let hess = hessian(sing.f());
        let nf = normal_form_with_cofactors(&hess, sing.groebner())?.remainder;
        let c = nf.coeff(&basis[socle]);
        if nf.terms().any(|(m, _)| *m != basis[socle]) {
            return Err(Error::InternalInconsistency(format!(
                "normal form of the Hessian {nf} is not a multiple of the socle monomial"
            )));
        }
        let mu_c = C::from_i64(&ctx, mu as i64);
        let law = transformation_law_socle_residue(&sing, &basis[socle])?;
        let socle_residue = match c.inv() {
            Some(ci) => {
                let r = mu_c.clone() * ci;
                if r != law {
                    return Err(Error::InternalInconsistency(format!(
                        "Hessian normalization gives {r}, the transformation law {law}"
                    )));
                }
                r
            }
            None => {
                // The Hessian scalar is not a unit (e.g. x³ over Z/2^m): the
                // transformation law still determines the residue.
                if c.clone() * law.clone() != mu_c {
                    return Err(Error::InternalInconsistency(format!(
                        "res(hess f) = {} but μ = {mu}",
                        c.clone() * law.clone()
                    )));
                }
                law
            }
        };

        let mut alg = MilnorAlgebra {
            sing,
            basis,
            index,
            socle,
            hessian: hess,
            hessian_socle: c,
            socle_residue,
            mult: Vec::new(),
        };
        let mut mult = vec![vec![Vec::new(); mu]; mu];
        #[allow(clippy::needless_range_loop)]
        for i in 0..mu {
            for j in i..mu {
                let prod = MultiPoly::monomial(ctx.clone(), crate::poly::mono_mul(&alg.basis[i], &alg.basis[j]), C::one(&ctx));
                let coords = alg.coordinates(&prod)?;
                mult[i][j] = coords.clone();
                mult[j][i] = coords;
            }
        }
        alg.mult = mult;
        Ok(alg)
    }

    pub fn singularity(&self) -> &QHSingularity<C> {
        &self.sing
    }

    pub fn basis(&self) -> &[Monomial] {
        &self.basis
    }

    pub fn mu(&self) -> usize {
        self.basis.len()
    }

    pub fn socle_index(&self) -> usize {
        self.socle
    }

    pub fn hessian(&self) -> &MultiPoly<C> {
        &self.hessian
    }

    /// c with NF(hess f) = c · (socle monomial).
    pub fn hessian_socle_coefficient(&self) -> &C {
        &self.hessian_socle
    }

    /// res of the socle monomial.
    pub fn socle_residue(&self) -> &C {
        &self.socle_residue
    }

    pub fn ctx(&self) -> &C::Ctx {
        self.sing.ctx()
    }

    pub fn index_of(&self, m: &[u32]) -> Option<usize> {
        self.index.get(m).copied()
    }

    /// NF(φ_i φ_j) in basis coordinates.
    pub fn product(&self, i: usize, j: usize) -> &[C] {
        &self.mult[i][j]
    }

    /// Coordinates of the class of g in the monomial basis.
    pub fn coordinates(&self, g: &MultiPoly<C>) -> Result<Vec<C>> {
        let r = normal_form_with_cofactors(g, self.sing.groebner())?.remainder;
        self.remainder_coordinates(&r)
    }

    pub(crate) fn remainder_coordinates(&self, r: &MultiPoly<C>) -> Result<Vec<C>> {
        let mut out = vec![C::zero(self.ctx()); self.mu()];
        for (m, c) in r.terms() {
            let i = self.index_of(m).ok_or_else(|| {
                Error::InternalInconsistency(format!("remainder term outside the staircase in {r}"))
            })?;
            out[i] = c.clone();
        }
        Ok(out)
    }

    /// The Grothendieck residue of g.
    pub fn groth_residue(&self, g: &MultiPoly<C>) -> Result<C> {
        let coords = self.coordinates(g)?;
        Ok(coords[self.socle].clone() * self.socle_residue.clone())
    }

    /// res(φ_i φ_j).
    pub fn residue_pairing_matrix(&self) -> Result<Vec<Vec<C>>> {
        let mu = self.mu();
        let m: Vec<Vec<C>> = (0..mu)
            .map(|i| (0..mu).map(|j| self.mult[i][j][self.socle].clone() * self.socle_residue.clone()).collect())
            .collect();
        if unit_determinant(&m, self.ctx()).is_none() {
            return Err(Error::InternalInconsistency("residue pairing is degenerate".into()));
        }
        Ok(m)
    }
}

/// Residue of the socle monomial by the transformation law: with
/// x_i^{N_i} = Σ_j A_ij ∂_j f, res(g) = coefficient of x^{N−1} in g·det A.
fn transformation_law_socle_residue<C: Coeff>(sing: &QHSingularity<C>, socle: &[u32]) -> Result<C> {
    let n = sing.nvars();
    let ctx = sing.ctx().clone();
    let w = sing.weights();
    let top = wdeg(socle, w);
    let mut rows = Vec::with_capacity(n);
    let mut big_n = Vec::with_capacity(n);
    for i in 0..n {
        // every monomial above the socle degree lies in the Jacobian ideal
        let mut e = 1u32;
        while BigRational::from_integer(BigInt::from(e)) * &w[i] <= top {
            e += 1;
        }
        let mut m = vec![0; n];
        m[i] = e;
        let xi = MultiPoly::monomial(ctx.clone(), m, C::one(&ctx));
        let div = normal_form_with_cofactors(&xi, sing.groebner())?;
        if !div.remainder.is_zero() {
            return Err(Error::InternalInconsistency(format!("x_{}^{e} is not in the Jacobian ideal", i + 1)));
        }
        rows.push(div.cofactors);
        big_n.push(e);
    }
    let det = det_poly(&rows, sing.f());
    let target: Vec<u32> = big_n.iter().zip(socle).map(|(&e, &s)| e - 1 - s).collect();
    Ok(det.coeff(&target))
}

/// Residue of g over the family f_s: socle coefficient of NF_s(g) scaled so
/// that res_s(hess f_s) = μ.
pub fn family_residue<C: Coeff>(
    alg: &MilnorAlgebra<C>,
    fam: &FamilyDeformation<C>,
    g: &MultiPoly<TruncPoly<C>>,
) -> Result<TruncPoly<C>> {
    let scale = family_residue_scale(alg, fam)?;
    let r = family_division(g, fam)?.remainder;
    Ok(socle_part(alg, &r, fam) * scale)
}

fn socle_part<C: Coeff>(alg: &MilnorAlgebra<C>, r: &MultiPoly<TruncPoly<C>>, fam: &FamilyDeformation<C>) -> TruncPoly<C> {
    let s = &alg.basis()[alg.socle_index()];
    let c = r.coeff(s);
    if r.terms().any(|(m, _)| m == s) {
        c
    } else {
        TruncPoly::constant(C::zero(alg.ctx()), fam.order())
    }
}

/// μ / (socle coefficient of NF_s(hess f_s)).
pub fn family_residue_scale<C: Coeff>(alg: &MilnorAlgebra<C>, fam: &FamilyDeformation<C>) -> Result<TruncPoly<C>> {
    let hs = hessian(&fam.f_s());
    let r = family_division(&hs, fam)?.remainder;
    let c = socle_part(alg, &r, fam);
    let inv = c.inv().ok_or_else(|| Error::DenominatorNotInvertible {
        scalar: c.to_string(),
        context: "Hessian normalization of the family residue".into(),
    })?;
    let mu = TruncPoly::constant(C::from_i64(alg.ctx(), alg.mu() as i64), fam.order());
    Ok(mu * inv)
}

/// res_s(φ_i φ_j) over the family.
pub fn family_residue_matrix<C: Coeff>(alg: &MilnorAlgebra<C>, fam: &FamilyDeformation<C>) -> Result<Vec<Vec<TruncPoly<C>>>> {
    let scale = family_residue_scale(alg, fam)?;
    let mu = alg.mu();
    let ctx = alg.ctx().clone();
    let mut out = vec![Vec::with_capacity(mu); mu];
    for (i, row) in out.iter_mut().enumerate() {
        for j in 0..mu {
            let m = crate::poly::mono_mul(&alg.basis()[i], &alg.basis()[j]);
            let g = fam.lift(&MultiPoly::monomial(ctx.clone(), m, C::one(&ctx)));
            let r = family_division(&g, fam)?.remainder;
            row.push(socle_part(alg, &r, fam) * scale.clone());
        }
    }
    Ok(out)
}
