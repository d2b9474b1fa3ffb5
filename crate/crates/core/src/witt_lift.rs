//! The residue and Brieskorn pipeline over W_m(F_p) = Z/p^m, and the
//! compatibility of the finite levels along reduction Z/p^{m+1} → Z/p^m.

use std::thread;

use num_rational::BigRational;

use crate::brieskorn::{pairing_basis, verify_axioms, AxiomReport, PairingMatrix};
use crate::coeff::{is_prime, Coeff, ModInt, Modulus, Series};
use crate::error::{Error, Result};
use crate::poly::{qh_check, Monomial, MultiPoly, TieBreak};
use crate::residue::MilnorAlgebra;
use crate::witt::teichmuller_zpm;

/// What to do when a denominator is divisible by p.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DenominatorPolicy {
    /// Fail with `DenominatorNotInvertible`.
    #[default]
    Error,
    /// Record the bad prime as a report entry and keep going.
    Track,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WittContext {
    modulus: Modulus,
    policy: DenominatorPolicy,
}

impl WittContext {
    pub fn new(p: u64, m: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::InvalidInput(format!("{p} is not prime")));
        }
        if m == 0 {
            return Err(Error::InvalidInput("Witt level must be at least 1".into()));
        }
        Ok(WittContext { modulus: Modulus::new(p, m)?, policy: DenominatorPolicy::Error })
    }

    pub fn with_policy(mut self, policy: DenominatorPolicy) -> Self {
        self.policy = policy;
        self
    }

    pub fn p(&self) -> u64 {
        self.modulus.p()
    }

    pub fn m(&self) -> u32 {
        self.modulus.level()
    }

    pub fn modulus(&self) -> Modulus {
        self.modulus
    }

    pub fn policy(&self) -> DenominatorPolicy {
        self.policy
    }

    pub fn at_level(&self, m: u32) -> Result<Self> {
        Ok(WittContext { modulus: self.modulus.at_level(m)?, policy: self.policy })
    }
}

/// Lift every F_p coefficient to its Teichmüller representative in Z/p^m.
pub fn teichmuller_lift_poly(f: &MultiPoly<ModInt>, ctx: &WittContext) -> Result<MultiPoly<ModInt>> {
    let md = ctx.modulus();
    f.try_map_coeffs(md, |a| {
        let src = a.modulus();
        if src.p() != md.p() || src.level() != 1 {
            return Err(Error::TypeMismatch(format!(
                "expected coefficients in F_{}, found Z/{}",
                md.p(),
                src.modulus()
            )));
        }
        Ok(teichmuller_zpm(a, md))
    })
}

/// Image of a rational polynomial in Z/p^m.
pub fn reduce_rational_poly(f: &MultiPoly<BigRational>, ctx: &WittContext) -> Result<MultiPoly<ModInt>> {
    let md = ctx.modulus();
    f.try_map_coeffs(md, |c| ModInt::from_rational(&md, c))
}

/// Milnor algebra and higher residue pairing of f over Z/p^m.
#[derive(Debug, Clone)]
pub struct WittPairing {
    pub context: WittContext,
    pub algebra: MilnorAlgebra<ModInt>,
    pub matrix: PairingMatrix<ModInt>,
}

fn pipeline(f: MultiPoly<ModInt>, weights: &[BigRational], ctx: &WittContext, torder: i64) -> Result<WittPairing> {
    let sing = qh_check(&f, weights, TieBreak::Grevlex)?;
    let algebra = MilnorAlgebra::new(sing)?;
    let matrix = pairing_basis(&algebra, torder)?;
    Ok(WittPairing { context: *ctx, algebra, matrix })
}

/// The pairing of a polynomial with rational coefficients, computed with
/// Z/p^m scalars throughout.
pub fn witt_pairing(f: &MultiPoly<BigRational>, weights: &[BigRational], ctx: &WittContext, torder: i64) -> Result<WittPairing> {
    pipeline(reduce_rational_poly(f, ctx)?, weights, ctx, torder)
}

/// The pairing of a polynomial over F_p, lifted by Teichmüller representatives.
pub fn witt_pairing_fp(f: &MultiPoly<ModInt>, weights: &[BigRational], ctx: &WittContext, torder: i64) -> Result<WittPairing> {
    pipeline(teichmuller_lift_poly(f, ctx)?, weights, ctx, torder)
}

/// Reduce every entry of a Z/p^{m+1} pairing matrix to Z/p^m.
pub fn reduce_matrix(k: &PairingMatrix<ModInt>, level: u32) -> Result<PairingMatrix<ModInt>> {
    let entries = k
        .entries()
        .iter()
        .map(|row| {
            row.iter()
                .map(|s| {
                    let md = s.ctx().at_level(level)?;
                    s.try_map(md, |c| c.reduce_to(level))
                })
                .collect::<Result<Vec<Series<ModInt>>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    PairingMatrix::new(entries)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompatReport {
    pub p: u64,
    /// The upper level m+1; it was compared against level m.
    pub upper: u32,
    pub basis: Vec<Monomial>,
    pub entries_compared: usize,
}

fn compare_levels(upper: &WittPairing, lower: &WittPairing) -> Result<CompatReport> {
    let p = upper.context.p();
    let (mu, ml) = (upper.context.m(), lower.context.m());
    if upper.algebra.basis() != lower.algebra.basis() {
        return Err(Error::InverseSystemViolation(format!(
            "Milnor bases differ between Z/{p}^{mu} and Z/{p}^{ml}"
        )));
    }
    let reduced = reduce_matrix(&upper.matrix, ml)?;
    let mut compared = 0;
    for (i, (ra, rb)) in reduced.entries().iter().zip(lower.matrix.entries()).enumerate() {
        for (j, (a, b)) in ra.iter().zip(rb).enumerate() {
            compared += 1;
            if !a.agrees_with(b) {
                return Err(Error::InverseSystemViolation(format!(
                    "K(e_{i}, e_{j}) at level {mu} reduces to {a} but level {ml} gives {b}"
                )));
            }
        }
    }
    Ok(CompatReport { p, upper: mu, basis: upper.algebra.basis().to_vec(), entries_compared: compared })
}

/// Reduce the level-(m+1) pairing mod p^m and compare it with the pairing
/// computed directly at level m. `ctx` is the upper level.
pub fn compat_check(f: &MultiPoly<BigRational>, weights: &[BigRational], ctx: &WittContext, torder: i64) -> Result<CompatReport> {
    if ctx.m() < 2 {
        return Err(Error::InvalidInput("compatibility needs an upper level of at least 2".into()));
    }
    let upper = witt_pairing(f, weights, ctx, torder)?;
    let lower = witt_pairing(f, weights, &ctx.at_level(ctx.m() - 1)?, torder)?;
    compare_levels(&upper, &lower)
}

#[derive(Debug, Clone)]
#[allow(clippy::large_enum_variant)]
pub enum LevelOutcome {
    Computed(WittPairing),
    SkippedBadPrime { level: u32, scalar: String },
}

#[derive(Debug, Clone)]
pub struct ChainReport {
    pub p: u64,
    pub levels: Vec<LevelOutcome>,
    pub links: Vec<CompatReport>,
}

impl ChainReport {
    pub fn bad_prime(&self) -> bool {
        self.levels.iter().any(|l| matches!(l, LevelOutcome::SkippedBadPrime { .. }))
    }
}

fn apply_policy(r: Result<WittPairing>, ctx: &WittContext) -> Result<LevelOutcome> {
    match (r, ctx.policy()) {
        (Ok(w), _) => Ok(LevelOutcome::Computed(w)),
        (Err(Error::DenominatorNotInvertible { scalar, .. }), DenominatorPolicy::Track) => {
            Ok(LevelOutcome::SkippedBadPrime { level: ctx.m(), scalar })
        }
        (Err(e), _) => Err(e),
    }
}

/// Levels 1..=mmax, computed concurrently, then every consecutive pair
/// checked for compatibility.
pub fn compat_chain(
    f: &MultiPoly<BigRational>,
    weights: &[BigRational],
    p: u64,
    mmax: u32,
    torder: i64,
    policy: DenominatorPolicy,
) -> Result<ChainReport> {
    if mmax == 0 {
        return Err(Error::InvalidInput("mmax must be at least 1".into()));
    }
    let ctxs = (1..=mmax)
        .map(|m| WittContext::new(p, m).map(|c| c.with_policy(policy)))
        .collect::<Result<Vec<_>>>()?;
    let results: Vec<Result<WittPairing>> = thread::scope(|scope| {
        let handles: Vec<_> = ctxs.iter().map(|c| scope.spawn(move || witt_pairing(f, weights, c, torder))).collect();
        handles.into_iter().map(|h| h.join().expect("level worker panicked")).collect()
    });
    let levels = results
        .into_iter()
        .zip(&ctxs)
        .map(|(r, c)| apply_policy(r, c))
        .collect::<Result<Vec<_>>>()?;
    let mut links = Vec::new();
    for pair in levels.windows(2) {
        if let [LevelOutcome::Computed(lo), LevelOutcome::Computed(hi)] = pair {
            links.push(compare_levels(hi, lo)?);
        }
    }
    Ok(ChainReport { p, levels, links })
}

#[derive(Debug, Clone, PartialEq)]
pub enum Consistency {
    /// Every entry of the rational matrix maps to the Z/p^m entry.
    Consistent { entries_compared: usize },
    /// A denominator is divisible by p; nothing to compare.
    SkippedBadPrime { scalar: String },
}

/// Map the rational pairing matrix into Z/p^m and compare it with the
/// pairing computed over Z/p^m directly.
pub fn rational_consistency(
    f: &MultiPoly<BigRational>,
    weights: &[BigRational],
    ctx: &WittContext,
    torder: i64,
) -> Result<Consistency> {
    let sing = qh_check(f, weights, TieBreak::Grevlex)?;
    let alg = MilnorAlgebra::new(sing)?;
    let kq = pairing_basis(&alg, torder)?;
    let md = ctx.modulus();
    let mapped = kq
        .entries()
        .iter()
        .map(|row| row.iter().map(|s| s.try_map(md, |c| ModInt::from_rational(&md, c))).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>();
    let witt = witt_pairing(f, weights, ctx, torder);
    let (mapped, witt) = match (mapped, witt) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(Error::DenominatorNotInvertible { scalar, .. }), _) | (_, Err(Error::DenominatorNotInvertible { scalar, .. })) => {
            return Ok(Consistency::SkippedBadPrime { scalar })
        }
        (Err(e), _) | (_, Err(e)) => return Err(e),
    };
    if alg.basis() != witt.algebra.basis() {
        return Err(Error::InternalInconsistency(format!(
            "Milnor bases over Q and over Z/{} differ",
            md.modulus()
        )));
    }
    let mut compared = 0;
    for (i, (ra, rb)) in mapped.iter().zip(witt.matrix.entries()).enumerate() {
        for (j, (a, b)) in ra.iter().zip(rb).enumerate() {
            compared += 1;
            if !a.agrees_with(b) {
                return Err(Error::InternalInconsistency(format!(
                    "K(e_{i}, e_{j}) over Q maps to {a} in Z/{}, direct computation gives {b}",
                    md.modulus()
                )));
            }
        }
    }
    Ok(Consistency::Consistent { entries_compared: compared })
}

/// The axiom suite over Z/p^m.
pub fn witt_verify(
    f: &MultiPoly<BigRational>,
    weights: &[BigRational],
    ctx: &WittContext,
    torder: i64,
    trials: usize,
    seed: u64,
) -> Result<AxiomReport> {
    let w = witt_pairing(f, weights, ctx, torder)?;
    verify_axioms(&w.algebra, &w.matrix, torder, trials, seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn bp(a: &[u32]) -> (MultiPoly<BigRational>, Vec<BigRational>) {
        let n = a.len();
        let f = MultiPoly::from_terms(
            (),
            n,
            a.iter().enumerate().map(|(i, &e)| {
                let mut m = vec![0; n];
                m[i] = e;
                (m, q(1, 1))
            }),
        );
        (f, a.iter().map(|&e| q(1, e as i64)).collect())
    }

    fn values(k: &PairingMatrix<ModInt>) -> Vec<Vec<u64>> {
        k.constant_term().unwrap().iter().map(|r| r.iter().map(|c| c.value()).collect()).collect()
    }

    #[test]
    fn teichmuller_lift_of_coefficients() {
        let f5 = Modulus::new(5, 1).unwrap();
        let f = MultiPoly::from_terms(f5, 1, [(vec![3], ModInt::new(f5, 1)), (vec![1], ModInt::new(f5, 2))]);
        let ctx = WittContext::new(5, 2).unwrap();
        let lifted = teichmuller_lift_poly(&f, &ctx).unwrap();
        assert_eq!(lifted.coeff(&[3]).value(), 1);
        assert_eq!(lifted.coeff(&[1]).value(), 7);
        let back = lifted.try_map_coeffs(f5, |c| c.reduce_to(1)).unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn cubic_over_z25() {
        let (f, w) = bp(&[3]);
        let k = witt_pairing(&f, &w, &WittContext::new(5, 2).unwrap(), 6).unwrap();
        assert_eq!(values(&k.matrix), vec![vec![0, 17], vec![17, 0]]);
        let e = witt_pairing(&f, &w, &WittContext::new(3, 2).unwrap(), 6).unwrap_err();
        assert!(matches!(e, Error::DenominatorNotInvertible { .. }), "{e:?}");
        let (g, w2) = bp(&[2, 2]);
        let k = witt_pairing(&g, &w2, &WittContext::new(7, 1).unwrap(), 4).unwrap();
        assert_eq!(values(&k.matrix), vec![vec![2]]);
    }

    #[test]
    fn levels_are_compatible() {
        let (f, w) = bp(&[3]);
        let r = compat_check(&f, &w, &WittContext::new(5, 3).unwrap(), 6).unwrap();
        assert_eq!(r.entries_compared, 4);
        let (g, w2) = bp(&[3, 3]);
        let chain = compat_chain(&g, &w2, 5, 3, 6, DenominatorPolicy::Error).unwrap();
        assert_eq!(chain.links.len(), 2);
        let socle = |l: &LevelOutcome| match l {
            LevelOutcome::Computed(wp) => {
                let a = &wp.algebra;
                let one = a.index_of(&[0, 0]).unwrap();
                wp.matrix.entry(one, a.socle_index()).coeff(0).unwrap().value()
            }
            _ => panic!("bad prime"),
        };
        assert_eq!(chain.levels.iter().map(socle).collect::<Vec<_>>(), vec![4, 14, 14]);
    }

    #[test]
    fn bad_primes_under_both_policies() {
        let (f, w) = bp(&[3]);
        assert!(compat_chain(&f, &w, 3, 2, 4, DenominatorPolicy::Error).is_err());
        let tracked = compat_chain(&f, &w, 3, 2, 4, DenominatorPolicy::Track).unwrap();
        assert!(tracked.bad_prime());
        assert!(tracked.links.is_empty());
    }

    #[test]
    fn rational_images_match() {
        let (f, w) = bp(&[3]);
        let c = rational_consistency(&f, &w, &WittContext::new(5, 3).unwrap(), 6).unwrap();
        assert_eq!(c, Consistency::Consistent { entries_compared: 4 });
        let (g, w4) = bp(&[4]);
        let c = rational_consistency(&g, &w4, &WittContext::new(2, 3).unwrap(), 6).unwrap();
        assert!(matches!(c, Consistency::SkippedBadPrime { .. }));
        let k = witt_pairing(&g, &w4, &WittContext::new(5, 3).unwrap(), 6).unwrap();
        assert_eq!(values(&k.matrix)[0][2], 94);
    }

    #[test]
    fn axioms_over_witt_levels() {
        let (f, w) = bp(&[3]);
        for m in 1..=3 {
            let rep = witt_verify(&f, &w, &WittContext::new(7, m).unwrap(), 6, 3, 5).unwrap();
            assert!(rep.all_passed(), "{rep:?}");
        }
    }
}
