use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_traits::Pow;

use crate::coeff::{is_prime, IntPoly};
use crate::error::{Error, Result};

/// Universal p-typical Witt polynomials S_k, P_k, I_k for k < len.
///
/// Component k lives in the 2(k+1) variables X_0, Y_0, …, X_k, Y_k, stored
/// interleaved: variable 2i is X_i and variable 2i+1 is Y_i. The negation
/// polynomials only involve the X's.
#[derive(Debug)]
pub struct WittTable {
    p: u64,
    sum: Vec<IntPoly>,
    prod: Vec<IntPoly>,
    neg: Vec<IntPoly>,
}

fn x(k: usize) -> usize {
    2 * k
}

fn y(k: usize) -> usize {
    2 * k + 1
}

/// w_k in the variables chosen by `var`, over 2(k+1) variables.
fn ghost_poly(p: u64, k: usize, var: impl Fn(usize) -> usize) -> IntPoly {
    let nvars = 2 * (k + 1);
    let mut out = IntPoly::zero(nvars);
    for i in 0..=k {
        let e = p.pow((k - i) as u32) as u32;
        let c = BigInt::from(p).pow(i as u32);
        out = out.add(&IntPoly::monomial(nvars, var(i), e, c));
    }
    out
}

/// Σ_{i<k} p^i Q_i^{p^{k-i}} for the already known components Q_i.
fn lower_ghost_terms(p: u64, known: &[IntPoly], k: usize, top: impl Fn(usize) -> Vec<usize>) -> IntPoly {
    let nvars = 2 * (k + 1);
    let mut out = IntPoly::zero(nvars);
    for (i, q) in known.iter().enumerate().take(k) {
        let e = p.pow((k - i) as u32) as u32;
        let pw = q.extend_vars(nvars).pow_split(e, &top(i));
        out = out.add(&pw.scale(&BigInt::from(p).pow(i as u32)));
    }
    out
}

fn solve(p: u64, name: char, k: usize, rhs: IntPoly) -> Result<IntPoly> {
    rhs.div_exact(&BigInt::from(p).pow(k as u32))
        .ok_or(Error::IntegralityViolation { p, name, index: k })
}

impl WittTable {
    fn empty(p: u64) -> Self {
        WittTable { p, sum: Vec::new(), prod: Vec::new(), neg: Vec::new() }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    /// Number of components covered.
    pub fn len(&self) -> usize {
        self.sum.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sum.is_empty()
    }

    pub fn sum(&self, k: usize) -> &IntPoly {
        &self.sum[k]
    }

    pub fn prod(&self, k: usize) -> &IntPoly {
        &self.prod[k]
    }

    pub fn neg(&self, k: usize) -> &IntPoly {
        &self.neg[k]
    }

    /// Solve the ghost equations for the next component.
    fn extend(&mut self) -> Result<()> {
        let p = self.p;
        let k = self.len();
        let top = |i: usize| vec![x(i), y(i)];
        let top_x = |i: usize| vec![x(i)];

        let wx = ghost_poly(p, k, x);
        let wy = ghost_poly(p, k, y);

        let s = wx.add(&wy).sub(&lower_ghost_terms(p, &self.sum, k, top));
        let m = wx.mul(&wy).sub(&lower_ghost_terms(p, &self.prod, k, top));
        let n = wx.neg().sub(&lower_ghost_terms(p, &self.neg, k, top_x));

        self.sum.push(solve(p, 'S', k, s)?);
        self.prod.push(solve(p, 'P', k, m)?);
        self.neg.push(solve(p, 'I', k, n)?);
        Ok(())
    }

    /// Compute the table from scratch without touching the shared cache.
    pub fn compute(p: u64, len: usize) -> Result<WittTable> {
        if !is_prime(p) {
            return Err(Error::InvalidInput(format!("{p} is not prime")));
        }
        let mut t = WittTable::empty(p);
        while t.len() < len {
            t.extend()?;
        }
        Ok(t)
    }
}

type Cache = Mutex<HashMap<u64, Arc<WittTable>>>;

fn cache() -> &'static Cache {
    static CACHE: OnceLock<Cache> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// The shared table for p with at least `len` components.
///
/// Tables are computed once and extended on demand; concurrent callers
/// serialize on the cache lock, so every caller observes the same values.
pub fn universal_witt_polynomials(p: u64, len: usize) -> Result<Arc<WittTable>> {
    if !is_prime(p) {
        return Err(Error::InvalidInput(format!("{p} is not prime")));
    }
    let mut guard = cache().lock().unwrap_or_else(|e| e.into_inner());
    if let Some(t) = guard.get(&p) {
        if t.len() >= len {
            return Ok(Arc::clone(t));
        }
    }
    let mut t = match guard.get(&p) {
        Some(old) => WittTable {
            p,
            sum: old.sum.clone(),
            prod: old.prod.clone(),
            neg: old.neg.clone(),
        },
        None => WittTable::empty(p),
    };
    while t.len() < len {
        t.extend()?;
    }
    let t = Arc::new(t);
    guard.insert(p, Arc::clone(&t));
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    // S_1 = X_1 + Y_1 − Σ_{0<j<p} (binom(p, j)/p) X_0^j Y_0^{p−j}.
    fn s1_closed_form(p: u64) -> IntPoly {
        let nvars = 4;
        let mut terms = vec![
            (vec![0, 0, 1, 0], BigInt::one()),
            (vec![0, 0, 0, 1], BigInt::one()),
        ];
        let mut binom = BigInt::one();
        for j in 1..p {
            binom = binom * BigInt::from(p - j + 1) / BigInt::from(j);
            terms.push((vec![j as u32, (p - j) as u32, 0, 0], -(&binom / BigInt::from(p))));
        }
        IntPoly::from_terms(nvars, terms)
    }

    fn b(n: i64) -> BigInt {
        BigInt::from(n)
    }

    #[test]
    fn degree_zero_components() {
        let t = WittTable::compute(5, 1).unwrap();
        assert_eq!(t.sum(0), &IntPoly::from_terms(2, vec![(vec![1, 0], b(1)), (vec![0, 1], b(1))]));
        assert_eq!(t.prod(0), &IntPoly::from_terms(2, vec![(vec![1, 1], b(1))]));
        assert_eq!(t.neg(0), &IntPoly::from_terms(2, vec![(vec![1, 0], b(-1))]));
    }

    #[test]
    fn first_sum_polynomial() {
        for p in [2, 3, 5, 7] {
            let t = WittTable::compute(p, 2).unwrap();
            assert_eq!(t.sum(1), &s1_closed_form(p), "p = {p}");
        }
        // p = 2: X_1 + Y_1 − X_0 Y_0
        let t = WittTable::compute(2, 2).unwrap();
        let expected = IntPoly::from_terms(
            4,
            vec![(vec![0, 0, 1, 0], b(1)), (vec![0, 0, 0, 1], b(1)), (vec![1, 1, 0, 0], b(-1))],
        );
        assert_eq!(t.sum(1), &expected);
    }

    #[test]
    fn first_product_polynomial() {
        for p in [2u64, 3, 5] {
            let t = WittTable::compute(p, 2).unwrap();
            let e = p as u32;
            let expected = IntPoly::from_terms(
                4,
                vec![
                    (vec![e, 0, 0, 1], b(1)),
                    (vec![0, e, 1, 0], b(1)),
                    (vec![0, 0, 1, 1], b(p as i64)),
                ],
            );
            assert_eq!(t.prod(1), &expected, "p = {p}");
        }
    }

    #[test]
    fn negation_is_componentwise_for_odd_p() {
        let t = WittTable::compute(3, 3).unwrap();
        for k in 0..3 {
            let nv = 2 * (k + 1);
            assert_eq!(t.neg(k), &IntPoly::monomial(nv, x(k), 1, b(-1)));
        }
        let t2 = WittTable::compute(2, 2).unwrap();
        assert_ne!(t2.neg(1), &IntPoly::monomial(4, x(1), 1, b(-1)));
    }

    #[test]
    fn ghost_equations_hold_symbolically() {
        for (p, len) in [(2u64, 4usize), (3, 3), (5, 2)] {
            let t = WittTable::compute(p, len).unwrap();
            for k in 0..len {
                let nv = 2 * (k + 1);
                let subst = |polys: &[IntPoly]| {
                    let mut out = IntPoly::zero(nv);
                    for (i, q) in polys.iter().enumerate().take(k + 1) {
                        let e = p.pow((k - i) as u32) as u32;
                        let c = BigInt::from(p).pow(i as u32);
                        out = out.add(&q.extend_vars(nv).pow(e).scale(&c));
                    }
                    out
                };
                let wx = ghost_poly(p, k, x);
                let wy = ghost_poly(p, k, y);
                assert_eq!(subst(&t.sum), wx.add(&wy), "sum p={p} k={k}");
                assert_eq!(subst(&t.prod), wx.mul(&wy), "prod p={p} k={k}");
                assert_eq!(subst(&t.neg), wx.neg(), "neg p={p} k={k}");
            }
        }
    }

    #[test]
    fn cache_extends_prefixwise() {
        let a = universal_witt_polynomials(3, 2).unwrap();
        let b = universal_witt_polynomials(3, 3).unwrap();
        assert!(b.len() >= 3);
        assert_eq!(a.sum(1), b.sum(1));
        let c = universal_witt_polynomials(3, 1).unwrap();
        assert!(c.len() >= 3);
    }

    #[test]
    fn concurrent_requests_agree() {
        let tables: Vec<_> = std::thread::scope(|s| {
            let hs: Vec<_> = (0..4).map(|_| s.spawn(|| universal_witt_polynomials(2, 3).unwrap())).collect();
            hs.into_iter().map(|h| h.join().unwrap()).collect()
        });
        for t in &tables[1..] {
            assert_eq!(t.sum(2), tables[0].sum(2));
        }
    }
}
