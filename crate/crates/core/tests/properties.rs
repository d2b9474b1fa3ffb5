use num_rational::BigRational;
use proptest::prelude::*;

use witt_residue::brieskorn::{pairing_basis, pairing_eval, reduce_form, spectrum_is_symmetric, BrieskornElement};
use witt_residue::coeff::Series;
use witt_residue::poly::{buchberger, milnor_number, normal_form_with_cofactors, qh_check, MonomialOrder, MultiPoly, TieBreak};
use witt_residue::residue::{bp_residue_oracle, MilnorAlgebra};
use witt_residue::witt::WittVector;

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn poly(n: usize, terms: &[(Vec<u32>, i64)]) -> MultiPoly<BigRational> {
    MultiPoly::from_terms((), n, terms.iter().map(|(m, c)| (m.clone(), q(*c, 1))))
}

fn algebra(f: &MultiPoly<BigRational>, w: &[BigRational]) -> MilnorAlgebra<BigRational> {
    MilnorAlgebra::new(qh_check(f, w, TieBreak::Grevlex).unwrap()).unwrap()
}

fn brieskorn_pham(a: &[u32]) -> (MultiPoly<BigRational>, Vec<BigRational>) {
    let n = a.len();
    let terms: Vec<(Vec<u32>, i64)> = a
        .iter()
        .enumerate()
        .map(|(i, &e)| {
            let mut m = vec![0; n];
            m[i] = e;
            (m, 1)
        })
        .collect();
    (poly(n, &terms), a.iter().map(|&e| q(1, e as i64)).collect())
}

/// D4, E6-like x³+y⁴ and the Fermat cubic: the germs the linearity
/// properties run over.
fn germs() -> Vec<MilnorAlgebra<BigRational>> {
    vec![
        algebra(&poly(2, &[(vec![3, 0], 1), (vec![1, 2], 1)]), &[q(1, 3), q(1, 3)]),
        algebra(&poly(2, &[(vec![3, 0], 1), (vec![0, 4], 1)]), &[q(1, 3), q(1, 4)]),
        algebra(&poly(2, &[(vec![3, 0], 1), (vec![0, 3], 1)]), &[q(1, 3), q(1, 3)]),
    ]
}

fn random_poly(n: usize) -> impl Strategy<Value = Vec<(Vec<u32>, i64)>> {
    prop::collection::vec((prop::collection::vec(0u32..5, n), -4i64..5), 0..6)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn normal_form_is_linear(g in random_poly(2), h in random_poly(2), a in -3i64..4, b in -3i64..4, which in 0usize..3) {
        let alg = &germs()[which];
        let gb = alg.singularity().groebner();
        let (g, h) = (poly(2, &g), poly(2, &h));
        let (qa, qb) = (q(a, 1), q(b, 1));
        let comb = g.scale(&qa).add_ref(&h.scale(&qb));
        let lhs = normal_form_with_cofactors(&comb, gb).unwrap().remainder;
        let rg = normal_form_with_cofactors(&g, gb).unwrap().remainder;
        let rh = normal_form_with_cofactors(&h, gb).unwrap().remainder;
        prop_assert_eq!(lhs, rg.scale(&qa).add_ref(&rh.scale(&qb)));
    }

    #[test]
    fn reduction_is_linear(g in random_poly(2), h in random_poly(2), a in -3i64..4, b in -3i64..4, which in 0usize..3) {
        let alg = &germs()[which];
        let (g, h) = (poly(2, &g), poly(2, &h));
        let (qa, qb) = (q(a, 1), q(b, 1));
        let comb = g.scale(&qa).add_ref(&h.scale(&qb));
        let lhs = reduce_form(alg, &comb, 6).unwrap();
        let rhs = reduce_form(alg, &g, 6).unwrap().scale_scalar(&qa)
            .add(&reduce_form(alg, &h, 6).unwrap().scale_scalar(&qb)).unwrap();
        prop_assert!(lhs.agrees_with(&rhs));
    }

    #[test]
    fn residue_vanishes_on_the_jacobian_ideal(a0 in random_poly(2), a1 in random_poly(2), which in 0usize..3) {
        let alg = &germs()[which];
        let jac = alg.singularity().jacobian();
        let g = poly(2, &a0).mul_ref(&jac[0]).add_ref(&poly(2, &a1).mul_ref(&jac[1]));
        prop_assert_eq!(alg.groth_residue(&g).unwrap(), q(0, 1));
    }

    #[test]
    fn brieskorn_pham_milnor_number_and_residues(a in prop::collection::vec(2u32..6, 1..4)) {
        let (f, w) = brieskorn_pham(&a);
        let alg = algebra(&f, &w);
        let mu: usize = a.iter().map(|&e| (e - 1) as usize).product();
        prop_assert_eq!(alg.mu(), mu);
        for m in alg.basis() {
            let x = MultiPoly::monomial((), m.clone(), q(1, 1));
            prop_assert_eq!(alg.groth_residue(&x).unwrap(), bp_residue_oracle(m, &a));
        }
        let hess = witt_residue::residue::hessian(&f);
        prop_assert_eq!(alg.groth_residue(&hess).unwrap(), q(mu as i64, 1));
        prop_assert!(spectrum_is_symmetric(&alg));
    }

    #[test]
    fn residue_of_monomials_outside_the_staircase(a in prop::collection::vec(2u32..5, 2..3), k in prop::collection::vec(0u32..7, 2..3)) {
        let (f, w) = brieskorn_pham(&a);
        let alg = algebra(&f, &w);
        let x = MultiPoly::monomial((), k.clone(), q(1, 1));
        prop_assert_eq!(alg.groth_residue(&x).unwrap(), bp_residue_oracle(&k, &a));
    }

    #[test]
    fn milnor_number_does_not_depend_on_the_order(c in prop::sample::select(vec![-3i64, -1, 1, 3, 5])) {
        // x⁴ + c·x²y² + y⁴ is isolated for c² ≠ 4
        let f = poly(2, &[(vec![4, 0], 1), (vec![2, 2], c), (vec![0, 4], 1)]);
        let jac = vec![f.derivative(0), f.derivative(1)];
        let w = [q(1, 4), q(1, 4)];
        let orders = [
            MonomialOrder::grlex(),
            MonomialOrder::grevlex(),
            MonomialOrder::weighted(&w, TieBreak::Grlex).unwrap(),
            MonomialOrder::weighted(&w, TieBreak::Grevlex).unwrap(),
        ];
        for o in &orders {
            prop_assert_eq!(milnor_number(&buchberger(&jac, o).unwrap()).unwrap(), 9);
        }
    }

    #[test]
    fn pairing_is_sesquilinear_in_t(cs in prop::collection::vec(-3i64..4, 8), ds in prop::collection::vec(-3i64..4, 8)) {
        let alg = &germs()[0];
        let k = pairing_basis(alg, 8).unwrap();
        let ser = |v: &[i64]| Series::from_coeffs((), v.iter().map(|&c| q(c, 1)).collect(), 6);
        let u = BrieskornElement::new(cs.chunks(2).map(ser).collect());
        let v = BrieskornElement::new(ds.chunks(2).map(ser).collect());
        let lhs = pairing_eval(&u, &v.shift(1), &k).unwrap();
        let rhs = pairing_eval(&u, &v, &k).unwrap().shift(1).neg();
        prop_assert!(lhs.agrees_with(&rhs));
        prop_assert!(lhs.order() >= 6);
    }

    #[test]
    fn ghost_map_is_a_ring_homomorphism(x in prop::collection::vec(-9i64..10, 3), y in prop::collection::vec(-9i64..10, 3), p in prop::sample::select(vec![2u64, 3])) {
        let wv = |v: &[i64]| WittVector::new(p, (), v.iter().map(|&c| q(c, 1)).collect()).unwrap();
        let (a, b) = (wv(&x), wv(&y));
        let (ga, gb) = (a.ghost().unwrap(), b.ghost().unwrap());
        let s = a.add(&b).unwrap().ghost().unwrap();
        let m = a.mul(&b).unwrap().ghost().unwrap();
        for k in 0..3 {
            prop_assert_eq!(&s[k], &(&ga[k] + &gb[k]));
            prop_assert_eq!(&m[k], &(&ga[k] * &gb[k]));
        }
    }
}
