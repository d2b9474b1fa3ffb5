use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rustc_hash::FxHashMap;

use super::Coeff;

/// A sparse polynomial with integer coefficients.
///
/// Terms are kept sorted lexicographically by exponent vector (variable 0
/// most significant) with no zero coefficients, so equal polynomials are
/// structurally equal. This is the storage type of the universal Witt
/// polynomials, which can have hundreds of thousands of terms; the
/// multiplication and evaluation routines are tuned for that size.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntPoly {
    nvars: usize,
    terms: Vec<(Vec<u32>, BigInt)>,
}

impl IntPoly {
    pub fn zero(nvars: usize) -> Self {
        IntPoly { nvars, terms: Vec::new() }
    }

    pub fn constant(nvars: usize, c: BigInt) -> Self {
        Self::from_terms(nvars, vec![(vec![0; nvars], c)])
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        Self::monomial(nvars, i, 1, BigInt::one())
    }

    /// c · x_i^e
    pub fn monomial(nvars: usize, i: usize, e: u32, c: BigInt) -> Self {
        let mut exps = vec![0; nvars];
        exps[i] = e;
        Self::from_terms(nvars, vec![(exps, c)])
    }

    /// Build from arbitrary terms, merging duplicates and dropping zeros.
    pub fn from_terms(nvars: usize, terms: Vec<(Vec<u32>, BigInt)>) -> Self {
        let mut map: FxHashMap<Vec<u32>, BigInt> = FxHashMap::default();
        for (e, c) in terms {
            assert_eq!(e.len(), nvars, "exponent vector of wrong length");
            *map.entry(e).or_insert_with(BigInt::zero) += c;
        }
        Self::from_map(nvars, map)
    }

    fn from_map(nvars: usize, map: FxHashMap<Vec<u32>, BigInt>) -> Self {
        let mut terms: Vec<_> = map.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        terms.sort_unstable_by(|a, b| a.0.cmp(&b.0));
        IntPoly { nvars, terms }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> &[(Vec<u32>, BigInt)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, exps: &[u32]) -> BigInt {
        match self.terms.binary_search_by(|t| t.0.as_slice().cmp(exps)) {
            Ok(i) => self.terms[i].1.clone(),
            Err(_) => BigInt::zero(),
        }
    }

    /// Same polynomial viewed in more variables (new ones appended).
    pub fn extend_vars(&self, nvars: usize) -> Self {
        assert!(nvars >= self.nvars);
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| {
                let mut e = e.clone();
                e.resize(nvars, 0);
                (e, c.clone())
            })
            .collect();
        IntPoly { nvars, terms }
    }

    pub fn max_exponents(&self) -> Vec<u32> {
        let mut out = vec![0; self.nvars];
        for (e, _) in &self.terms {
            for (o, &x) in out.iter_mut().zip(e) {
                *o = (*o).max(x);
            }
        }
        out
    }

    pub fn add(&self, other: &IntPoly) -> IntPoly {
        assert_eq!(self.nvars, other.nvars);
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        while i < self.terms.len() || j < other.terms.len() {
            let ord = match (self.terms.get(i), other.terms.get(j)) {
                (Some(a), Some(b)) => a.0.cmp(&b.0),
                (Some(_), None) => std::cmp::Ordering::Less,
                _ => std::cmp::Ordering::Greater,
            };
            match ord {
                std::cmp::Ordering::Less => {
                    out.push(self.terms[i].clone());
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(other.terms[j].clone());
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    let c = &self.terms[i].1 + &other.terms[j].1;
                    if !c.is_zero() {
                        out.push((self.terms[i].0.clone(), c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        IntPoly { nvars: self.nvars, terms: out }
    }

    pub fn neg(&self) -> IntPoly {
        self.scale(&BigInt::from(-1))
    }

    pub fn sub(&self, other: &IntPoly) -> IntPoly {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &BigInt) -> IntPoly {
        if c.is_zero() {
            return IntPoly::zero(self.nvars);
        }
        let terms = self.terms.iter().map(|(e, x)| (e.clone(), x * c)).collect();
        IntPoly { nvars: self.nvars, terms }
    }

    /// Exact division of every coefficient by `d`; `None` if some
    /// coefficient is not divisible.
    pub fn div_exact(&self, d: &BigInt) -> Option<IntPoly> {
        let mut terms = Vec::with_capacity(self.terms.len());
        for (e, c) in &self.terms {
            let (q, r) = c.div_rem(d);
            if !r.is_zero() {
                return None;
            }
            terms.push((e.clone(), q));
        }
        Some(IntPoly { nvars: self.nvars, terms })
    }

    pub fn mul(&self, other: &IntPoly) -> IntPoly {
        assert_eq!(self.nvars, other.nvars);
        if self.is_empty() || other.is_empty() {
            return IntPoly::zero(self.nvars);
        }
        let ma = self.max_exponents();
        let mb = other.max_exponents();
        let widest = ma.iter().zip(&mb).map(|(a, b)| a + b).max().unwrap_or(0);
        let width = (32 - widest.leading_zeros()).max(1) as usize;
        if width * self.nvars <= 128 {
            self.mul_packed(other, width)
        } else {
            let mut map: FxHashMap<Vec<u32>, BigInt> = FxHashMap::default();
            for (ea, ca) in &self.terms {
                for (eb, cb) in &other.terms {
                    let e: Vec<u32> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                    *map.entry(e).or_insert_with(BigInt::zero) += ca * cb;
                }
            }
            Self::from_map(self.nvars, map)
        }
    }

    fn mul_packed(&self, other: &IntPoly, width: usize) -> IntPoly {
        let pack = |e: &[u32]| -> u128 {
            e.iter().enumerate().fold(0u128, |acc, (i, &x)| acc | ((x as u128) << (i * width)))
        };
        let a: Vec<(u128, &BigInt)> = self.terms.iter().map(|(e, c)| (pack(e), c)).collect();
        let b: Vec<(u128, &BigInt)> = other.terms.iter().map(|(e, c)| (pack(e), c)).collect();
        let mut map: FxHashMap<u128, BigInt> = FxHashMap::default();
        map.reserve(a.len().max(b.len()) * 2);
        for &(ka, ca) in &a {
            for &(kb, cb) in &b {
                let prod = ca * cb;
                map.entry(ka + kb).and_modify(|v| *v += &prod).or_insert(prod);
            }
        }
        let mask: u128 = (1u128 << width) - 1;
        let mut terms: Vec<(Vec<u32>, BigInt)> = map
            .into_iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| {
                let e = (0..self.nvars).map(|i| ((k >> (i * width)) & mask) as u32).collect();
                (e, c)
            })
            .collect();
        terms.sort_unstable_by(|x, y| x.0.cmp(&y.0));
        IntPoly { nvars: self.nvars, terms }
    }

    /// self^e by repeated multiplication (cheap when `self` has few terms).
    pub fn pow(&self, e: u32) -> IntPoly {
        let mut acc = IntPoly::constant(self.nvars, BigInt::one());
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// self^e computed as (L + R)^e = Σ binom(e, c) L^(e-c) R^c, where L
    /// collects the terms touching any variable in `top`. Worth it when L
    /// is tiny and R is large but lives in fewer variables.
    pub fn pow_split(&self, e: u32, top: &[usize]) -> IntPoly {
        let (l_terms, r_terms): (Vec<_>, Vec<_>) =
            self.terms.iter().cloned().partition(|(ex, _)| top.iter().any(|&v| ex[v] > 0));
        let l = IntPoly { nvars: self.nvars, terms: l_terms };
        let r = IntPoly { nvars: self.nvars, terms: r_terms };
        if r.is_empty() || l.is_empty() {
            return self.pow(e);
        }
        let mut l_pows = vec![IntPoly::constant(self.nvars, BigInt::one())];
        for _ in 0..e {
            let next = l_pows.last().unwrap().mul(&l);
            l_pows.push(next);
        }
        let mut out = IntPoly::zero(self.nvars);
        let mut r_pow = IntPoly::constant(self.nvars, BigInt::one());
        let mut binom = BigInt::one();
        for c in 0..=e {
            let term = l_pows[(e - c) as usize].mul(&r_pow).scale(&binom);
            out = out.add(&term);
            if c < e {
                r_pow = r_pow.mul(&r);
                binom = binom * BigInt::from(e - c) / BigInt::from(c + 1);
            }
        }
        out
    }

    /// Evaluate over an arbitrary coefficient ring.
    ///
    /// Walks the lexicographically sorted terms as a trie, one variable per
    /// level, so every shared prefix is multiplied out only once.
    pub fn eval_generic<C: Coeff>(&self, point: &[C], ctx: &C::Ctx) -> C {
        assert!(point.len() >= self.nvars, "evaluation point too short");
        if self.terms.is_empty() {
            return C::zero(ctx);
        }
        let maxe = self.max_exponents();
        let pows: Vec<Vec<C>> = (0..self.nvars)
            .map(|v| {
                let mut p = vec![C::one(ctx)];
                for _ in 0..maxe[v] {
                    let next = p.last().unwrap().clone() * point[v].clone();
                    p.push(next);
                }
                p
            })
            .collect();
        Self::eval_rec(&self.terms, 0, self.nvars, &pows, ctx)
    }

    fn eval_rec<C: Coeff>(
        terms: &[(Vec<u32>, BigInt)],
        level: usize,
        nvars: usize,
        pows: &[Vec<C>],
        ctx: &C::Ctx,
    ) -> C {
        if level == nvars {
            return C::from_bigint(ctx, &terms[0].1);
        }
        let mut acc = C::zero(ctx);
        for (e, group) in groups(terms, level) {
            let child = Self::eval_rec(group, level + 1, nvars, pows, ctx);
            acc = acc + if e == 0 { child } else { child * pows[level][e as usize].clone() };
        }
        acc
    }

    /// Evaluate at a rational point with integer arithmetic only.
    ///
    /// With x_v = a_v / b_v and E_v the largest exponent of x_v, every term
    /// is scaled by the common denominator Π b_v^{E_v}; the trie walk then
    /// only multiplies integers and a single rational is formed at the end.
    pub fn eval_rational(&self, point: &[BigRational]) -> BigRational {
        assert!(point.len() >= self.nvars, "evaluation point too short");
        if self.terms.is_empty() {
            return <BigRational as Zero>::zero();
        }
        let maxe = self.max_exponents();
        let mut denom = BigInt::one();
        let tables: Vec<Vec<BigInt>> = (0..self.nvars)
            .map(|v| {
                let (a, b) = (point[v].numer(), point[v].denom());
                let big_e = maxe[v] as usize;
                let mut a_pows = vec![BigInt::one()];
                let mut b_pows = vec![BigInt::one()];
                for _ in 0..big_e {
                    a_pows.push(a_pows.last().unwrap() * a);
                    b_pows.push(b_pows.last().unwrap() * b);
                }
                denom *= &b_pows[big_e];
                (0..=big_e).map(|e| &a_pows[e] * &b_pows[big_e - e]).collect()
            })
            .collect();
        let numer = Self::eval_rec_int(&self.terms, 0, self.nvars, &tables);
        BigRational::new(numer, denom)
    }

    fn eval_rec_int(
        terms: &[(Vec<u32>, BigInt)],
        level: usize,
        nvars: usize,
        tables: &[Vec<BigInt>],
    ) -> BigInt {
        if level == nvars {
            return terms[0].1.clone();
        }
        let mut acc = BigInt::zero();
        for (e, group) in groups(terms, level) {
            let child = Self::eval_rec_int(group, level + 1, nvars, tables);
            acc += child * &tables[level][e as usize];
        }
        acc
    }
}

/// Consecutive runs of terms sharing the exponent of variable `level`.
fn groups(terms: &[(Vec<u32>, BigInt)], level: usize) -> impl Iterator<Item = (u32, &[(Vec<u32>, BigInt)])> {
    let mut start = 0;
    std::iter::from_fn(move || {
        if start >= terms.len() {
            return None;
        }
        let e = terms[start].0[level];
        let mut end = start + 1;
        while end < terms.len() && terms[end].0[level] == e {
            end += 1;
        }
        let group = &terms[start..end];
        start = end;
        Some((e, group))
    })
}
