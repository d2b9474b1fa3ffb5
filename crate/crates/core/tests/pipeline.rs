use num_rational::BigRational;

use witt_residue::brieskorn::{
    flat_extend_pairing, flatness_defect, pairing_basis, reduce_form, spectral_numbers, verify_axioms, BrieskornElement,
    FamilyLattice, Lattice,
};
use witt_residue::coeff::{Coeff, ModInt, Modulus, Series};
use witt_residue::poly::{qh_check, MultiPoly, TieBreak};
use witt_residue::residue::{family_residue_matrix, MilnorAlgebra};
use witt_residue::witt_lift::{compat_chain, witt_pairing, DenominatorPolicy, WittContext};
use witt_residue::Error;

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn poly(n: usize, terms: &[(&[u32], i64)]) -> MultiPoly<BigRational> {
    MultiPoly::from_terms((), n, terms.iter().map(|&(m, c)| (m.to_vec(), q(c, 1))))
}

fn algebra(f: &MultiPoly<BigRational>, w: &[BigRational]) -> MilnorAlgebra<BigRational> {
    MilnorAlgebra::new(qh_check(f, w, TieBreak::Grevlex).unwrap()).unwrap()
}

#[test]
fn d4_residues_and_spectrum() {
    let a = algebra(&poly(2, &[(&[3, 0], 1), (&[1, 2], 1)]), &[q(1, 3), q(1, 3)]);
    assert_eq!(a.mu(), 4);
    assert_eq!(a.groth_residue(&poly(2, &[(&[0, 2], 1)])).unwrap(), q(-1, 2));
    assert_eq!(a.groth_residue(&poly(2, &[(&[2, 0], 1)])).unwrap(), q(1, 6));
    let mut sp = spectral_numbers(&a);
    sp.sort();
    assert_eq!(sp, vec![q(2, 3), q(1, 1), q(1, 1), q(4, 3)]);
}

#[test]
fn x4_plus_y4_passes_the_axioms() {
    let a = algebra(&poly(2, &[(&[4, 0], 1), (&[0, 4], 1)]), &[q(1, 4), q(1, 4)]);
    assert_eq!(a.mu(), 9);
    let k = pairing_basis(&a, 8).unwrap();
    let rep = verify_axioms(&a, &k, 8, 5, 42).unwrap();
    assert!(rep.all_passed(), "{rep:?}");
}

#[test]
fn reduction_lowers_weighted_degree_each_round() {
    let a = algebra(&poly(1, &[(&[4], 1)]), &[q(1, 4)]);
    // x^9 dx: three rounds before it lands in the basis
    let r = reduce_form(&a, &poly(1, &[(&[9], 1)]), 8).unwrap();
    assert!(r.in_lattice());
    assert!(r.valuation() >= 2);
    let r = reduce_form(&a, &poly(1, &[(&[9], 1)]), 1).unwrap();
    assert!(r.is_zero());
}

#[test]
fn cubic_family_end_to_end() {
    let a = algebra(&poly(1, &[(&[3], 1)]), &[q(1, 3)]);
    let fam = FamilyLattice::new(a.clone(), poly(1, &[(&[1], 1)]), 6).unwrap();
    let k = flat_extend_pairing(&fam, &pairing_basis(&a, 8 + 5).unwrap(), 8).unwrap();
    let fiber = family_residue_matrix(fam.algebra(), fam.family()).unwrap();
    #[allow(clippy::needless_range_loop)]
    for i in 0..2 {
        for j in 0..2 {
            assert!(k.entry(i, j).coeff(0).unwrap().agrees_with(&fiber[i][j]));
        }
    }
    let ctx = fam.scalar_ctx();
    let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(9);
    for _ in 0..5 {
        let coords = (0..2)
            .map(|_| {
                let cs = (0..6).map(|_| Coeff::random_small(&ctx, &mut rng, 3)).collect();
                Series::from_coeffs(ctx.clone(), cs, 6)
            })
            .collect();
        let d = flatness_defect(&fam, &BrieskornElement::new(coords)).unwrap();
        assert!(d.is_zero() && d.order() >= 1);
    }
}

#[test]
fn modular_pipeline_matches_inverses() {
    let f = poly(1, &[(&[3], 1)]);
    let w = [q(1, 3)];
    for (p, expect) in [(5u64, [2u64, 17, 42]), (7, [5, 33, 229])] {
        for m in 1..=3u32 {
            let k = witt_pairing(&f, &w, &WittContext::new(p, m).unwrap(), 6).unwrap();
            let v = k.matrix.entry(0, 1).coeff(0).unwrap();
            assert_eq!(v.value(), expect[m as usize - 1]);
            let three = ModInt::new(Modulus::new(p, m).unwrap(), 3);
            assert!((three * v).is_one());
        }
        let chain = compat_chain(&f, &w, p, 4, 6, DenominatorPolicy::Error).unwrap();
        assert_eq!(chain.links.len(), 3);
    }
    let e = witt_pairing(&f, &w, &WittContext::new(3, 1).unwrap(), 6).unwrap_err();
    assert!(matches!(e, Error::DenominatorNotInvertible { .. }));
}
