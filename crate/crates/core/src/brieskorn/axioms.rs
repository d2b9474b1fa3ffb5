use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::coeff::{Coeff, Series};
use crate::error::{Error, Result};

use super::{nabla_s, nabla_tdt, pairing_eval, BrieskornElement, Lattice, PairingMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckStatus {
    Pass,
    Fail,
    NotApplicable,
}

impl fmt::Display for CheckStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CheckStatus::Pass => "pass",
            CheckStatus::Fail => "fail",
            CheckStatus::NotApplicable => "n/a",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AxiomCheck {
    /// 1: conjugate symmetry, 2: sesquilinearity, 3: flatness in s,
    /// 4: Euler homogeneity, 5: leading term equals the residue pairing.
    pub axiom: u8,
    pub name: &'static str,
    pub status: CheckStatus,
    pub cases: usize,
    pub counterexample: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AxiomReport {
    pub checks: Vec<AxiomCheck>,
    pub seed: u64,
}

impl AxiomReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != CheckStatus::Fail)
    }

    pub fn get(&self, axiom: u8) -> Option<&AxiomCheck> {
        self.checks.iter().find(|c| c.axiom == axiom)
    }
}

struct Tally {
    axiom: u8,
    name: &'static str,
    cases: usize,
    counterexample: Option<String>,
}

impl Tally {
    fn new(axiom: u8, name: &'static str) -> Self {
        Tally { axiom, name, cases: 0, counterexample: None }
    }

    fn record(&mut self, ok: bool, describe: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok && self.counterexample.is_none() {
            self.counterexample = Some(describe());
        }
    }

    fn finish(self) -> AxiomCheck {
        let status = if self.counterexample.is_some() { CheckStatus::Fail } else { CheckStatus::Pass };
        AxiomCheck { axiom: self.axiom, name: self.name, status, cases: self.cases, counterexample: self.counterexample }
    }
}

/// Agreement on every common coefficient, with at least t^0 known on both
/// sides so that an exhausted truncation cannot pass vacuously.
fn same<S: Coeff>(a: &Series<S>, b: &Series<S>) -> bool {
    a.order().min(b.order()) >= 1 && a.agrees_with(b)
}

type Pair<S> = (BrieskornElement<S>, BrieskornElement<S>);

fn random_series<S: Coeff>(ctx: &S::Ctx, rng: &mut ChaCha8Rng, order: i64) -> Series<S> {
    let coeffs = (0..order).map(|_| S::random_small(ctx, rng, 3)).collect();
    Series::from_coeffs(ctx.clone(), coeffs, order)
}

fn random_section<S: Coeff>(ctx: &S::Ctx, mu: usize, rng: &mut ChaCha8Rng, order: i64) -> BrieskornElement<S> {
    BrieskornElement::new((0..mu).map(|_| random_series(ctx, rng, order)).collect())
}

fn show<S: Coeff>(v: &BrieskornElement<S>) -> String {
    let parts: Vec<String> = v.coords().iter().map(|c| format!("[{c}]")).collect();
    format!("({})", parts.join(", "))
}

/// Check the pairing axioms on every pair of basis classes and on
/// `trials` pairs of seeded random sections known to t-order `order`.
///
/// Axiom 3 is checked only for families; axiom 4 uses n = number of
/// variables.
pub fn verify_axioms<L: Lattice>(
    lat: &L,
    k: &PairingMatrix<L::Scalar>,
    order: i64,
    trials: usize,
    seed: u64,
) -> Result<AxiomReport> {
    if order < 1 {
        return Err(Error::InvalidInput(format!("axioms need t-order at least 1, got {order}")));
    }
    let ctx = lat.scalar_ctx();
    let mu = lat.mu();
    if k.mu() != mu {
        return Err(Error::TypeMismatch(format!("pairing matrix is {}×{}, basis has {mu} elements", k.mu(), k.mu())));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pairs: Vec<Pair<L::Scalar>> = Vec::new();
    for i in 0..mu {
        for j in 0..mu {
            pairs.push((
                BrieskornElement::basis_element(ctx.clone(), mu, i, order),
                BrieskornElement::basis_element(ctx.clone(), mu, j, order),
            ));
        }
    }
    for _ in 0..trials {
        let a = random_section(&ctx, mu, &mut rng, order);
        let b = random_section(&ctx, mu, &mut rng, order);
        pairs.push((a, b));
    }

    let n = <L::Scalar as Coeff>::from_i64(&ctx, lat.nvars() as i64);
    let family = lat.deformation().is_some();
    let mut sym = Tally::new(1, "conjugate symmetry");
    let mut sesq = Tally::new(2, "sesquilinearity");
    let mut flat = Tally::new(3, "flatness in s");
    let mut euler = Tally::new(4, "Euler homogeneity");

    for (a, b) in &pairs {
        let kab = pairing_eval(a, b, k)?;
        let kba = pairing_eval(b, a, k)?;
        let rhs = kba.conjugate();
        sym.record(same(&kab, &rhs), || {
            format!("s1 = {}, s2 = {}: K(s1,s2) = {kab}, K(s2,s1)(-t) = {rhs}", show(a), show(b))
        });

        let v = random_series(&ctx, &mut rng, order);
        let left = pairing_eval(&a.scale(&v)?, b, k)?;
        let mid = v.mul(&kab)?;
        let right = pairing_eval(a, &b.scale(&v.conjugate())?, k)?;
        sesq.record(same(&left, &mid) && same(&mid, &right), || {
            format!(
                "v = {v}, s1 = {}, s2 = {}: K(v s1, s2) = {left}, v K(s1,s2) = {mid}, K(s1, v(-t) s2) = {right}",
                show(a),
                show(b)
            )
        });

        let lhs = kab.theta().add(&kab.scale(&n))?;
        let rhs = pairing_eval(&nabla_tdt(lat, a)?, b, k)?.add(&pairing_eval(a, &nabla_tdt(lat, b)?, k)?)?;
        euler.record(same(&lhs, &rhs), || {
            format!("s1 = {}, s2 = {}: (t∂t + n)K = {lhs}, K(∇s1,s2) + K(s1,∇s2) = {rhs}", show(a), show(b))
        });

        if family {
            let lhs = kab.map(ctx.clone(), |c| lat.scalar_derivative(c));
            let rhs = pairing_eval(&nabla_s(lat, a)?, b, k)?.add(&pairing_eval(a, &nabla_s(lat, b)?, k)?)?;
            flat.record(same(&lhs, &rhs), || {
                format!("s1 = {}, s2 = {}: ∂s K = {lhs}, K(∇s s1,s2) + K(s1,∇s s2) = {rhs}", show(a), show(b))
            });
        }
    }

    let mut lead = Tally::new(5, "leading term is the residue pairing");
    let res = lat.residue_matrix()?;
    for (i, row) in res.iter().enumerate() {
        for (j, r) in row.iter().enumerate() {
            let entry = k.entry(i, j);
            let ok = entry.valuation() >= 0 && entry.order() >= 1 && entry.coeff(0).is_some_and(|c| c.agrees_with(r));
            lead.record(ok, || format!("K(e_{i}, e_{j}) = {entry}, residue = {r}"));
        }
    }

    let flat = if family {
        flat.finish()
    } else {
        AxiomCheck { axiom: 3, name: "flatness in s", status: CheckStatus::NotApplicable, cases: 0, counterexample: None }
    };
    Ok(AxiomReport { checks: vec![sym.finish(), sesq.finish(), flat, euler.finish(), lead.finish()], seed })
}

/// [∇_{t∂t}, ∇_{∂s}] v for a family; zero up to truncation when the
/// connection is flat.
pub fn flatness_defect<L: Lattice>(lat: &L, v: &BrieskornElement<L::Scalar>) -> Result<BrieskornElement<L::Scalar>> {
    let ts = nabla_tdt(lat, &nabla_s(lat, v)?)?;
    let st = nabla_s(lat, &nabla_tdt(lat, v)?)?;
    ts.sub(&st)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::brieskorn::{flat_extend_pairing, pairing_basis, FamilyLattice};
    use crate::coeff::{ModInt, Modulus};
    use crate::poly::{qh_check, MultiPoly, TieBreak};
    use crate::residue::MilnorAlgebra;
    use num_rational::BigRational;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn alg(terms: &[(&[u32], i64)], w: &[(i64, i64)]) -> MilnorAlgebra<BigRational> {
        let n = terms[0].0.len();
        let f = MultiPoly::from_terms((), n, terms.iter().map(|&(m, c)| (m.to_vec(), q(c, 1))));
        let w: Vec<BigRational> = w.iter().map(|&(a, b)| q(a, b)).collect();
        MilnorAlgebra::new(qh_check(&f, &w, TieBreak::Grevlex).unwrap()).unwrap()
    }

    #[test]
    fn axioms_hold_for_simple_germs() {
        let germs = [
            alg(&[(&[3], 1)], &[(1, 3)]),
            alg(&[(&[4], 1)], &[(1, 4)]),
            alg(&[(&[3, 0], 1), (&[1, 2], 1)], &[(1, 3), (1, 3)]),
            alg(&[(&[3, 0], 1), (&[0, 3], 1)], &[(1, 3), (1, 3)]),
        ];
        for a in &germs {
            let k = pairing_basis(a, 6).unwrap();
            let rep = verify_axioms(a, &k, 6, 4, 7).unwrap();
            assert!(rep.all_passed(), "{rep:?}");
            assert_eq!(rep.get(3).unwrap().status, CheckStatus::NotApplicable);
        }
    }

    #[test]
    fn a_wrong_pairing_is_caught() {
        let a = alg(&[(&[3], 1)], &[(1, 3)]);
        let mut e = pairing_basis(&a, 6).unwrap().entries().to_vec();
        e[0][1] = Series::constant(q(1, 2), 6);
        let bad = PairingMatrix::new(e).unwrap();
        let rep = verify_axioms(&a, &bad, 6, 2, 1).unwrap();
        assert_eq!(rep.get(1).unwrap().status, CheckStatus::Fail);
        assert!(rep.get(1).unwrap().counterexample.is_some());
        assert_eq!(rep.get(5).unwrap().status, CheckStatus::Fail);
    }

    #[test]
    fn axioms_hold_over_z_mod_p_power() {
        let ctx = Modulus::new(5, 3).unwrap();
        let f = MultiPoly::from_terms(ctx, 2, [(vec![3, 0], ModInt::new(ctx, 1)), (vec![0, 2], ModInt::new(ctx, 1))]);
        let a = MilnorAlgebra::new(qh_check(&f, &[q(1, 3), q(1, 2)], TieBreak::Grevlex).unwrap()).unwrap();
        let k = pairing_basis(&a, 5).unwrap();
        assert!(verify_axioms(&a, &k, 5, 3, 11).unwrap().all_passed());
    }

    #[test]
    fn cubic_family_is_flat() {
        let a = alg(&[(&[3], 1)], &[(1, 3)]);
        let fl = FamilyLattice::new(a.clone(), MultiPoly::from_terms((), 1, [(vec![1], q(1, 1))]), 4).unwrap();
        let k = flat_extend_pairing(&fl, &pairing_basis(&a, 8 + 3).unwrap(), 8).unwrap();
        let rep = verify_axioms(&fl, &k, 8, 2, 3).unwrap();
        assert!(rep.all_passed(), "{rep:?}");
        assert_eq!(rep.get(3).unwrap().status, CheckStatus::Pass);
        let ctx = fl.scalar_ctx();
        for i in 0..2 {
            let e = BrieskornElement::basis_element(ctx.clone(), 2, i, 8);
            let d = flatness_defect(&fl, &e).unwrap();
            assert!(d.is_zero() && d.order() >= 1, "{d:?}");
        }
    }
}
