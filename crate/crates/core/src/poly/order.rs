use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TieBreak {
    Grlex,
    Grevlex,
}

/// A graded monomial order: weighted degree first (when weights are set),
/// then total degree, then lex or reverse lex.
///
/// Weights are stored as the integers w_i · lcm(denominators), which order
/// monomials exactly like the rational weights.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonomialOrder {
    weights: Option<Vec<BigInt>>,
    rational: Option<Vec<BigRational>>,
    tie: TieBreak,
}

impl MonomialOrder {
    pub fn grlex() -> Self {
        MonomialOrder { weights: None, rational: None, tie: TieBreak::Grlex }
    }

    pub fn grevlex() -> Self {
        MonomialOrder { weights: None, rational: None, tie: TieBreak::Grevlex }
    }

    pub fn weighted(weights: &[BigRational], tie: TieBreak) -> Result<Self> {
        if weights.iter().any(|w| !w.is_positive()) {
            return Err(Error::InvalidInput("monomial order weights must be positive".into()));
        }
        let l = weights.iter().fold(BigInt::one(), |l, w| l.lcm(w.denom()));
        let ints = weights.iter().map(|w| (w * &l).to_integer()).collect();
        Ok(MonomialOrder { weights: Some(ints), rational: Some(weights.to_vec()), tie })
    }

    pub fn weights(&self) -> Option<&[BigRational]> {
        self.rational.as_deref()
    }

    pub fn tie_break(&self) -> TieBreak {
        self.tie
    }

    pub fn name(&self) -> &'static str {
        match (self.weights.is_some(), self.tie) {
            (true, TieBreak::Grlex) => "wdeg-grlex",
            (true, TieBreak::Grevlex) => "wdeg-grevlex",
            (false, TieBreak::Grlex) => "grlex",
            (false, TieBreak::Grevlex) => "grevlex",
        }
    }

    pub fn cmp(&self, a: &[u32], b: &[u32]) -> Ordering {
        if let Some(w) = &self.weights {
            let wa: BigInt = a.iter().zip(w).map(|(&e, w)| w * e).sum();
            let wb: BigInt = b.iter().zip(w).map(|(&e, w)| w * e).sum();
            match wa.cmp(&wb) {
                Ordering::Equal => {}
                o => return o,
            }
        }
        let da: u64 = a.iter().map(|&e| e as u64).sum();
        let db: u64 = b.iter().map(|&e| e as u64).sum();
        match da.cmp(&db) {
            Ordering::Equal => {}
            o => return o,
        }
        match self.tie {
            TieBreak::Grlex => a.cmp(b),
            // the monomial with the smaller exponent in the last differing
            // variable is larger
            TieBreak::Grevlex => {
                for (x, y) in a.iter().zip(b).rev() {
                    if x != y {
                        return y.cmp(x);
                    }
                }
                Ordering::Equal
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grevlex_and_grlex_differ_on_degree_ties() {
        // x y^2 z^0 vs x^0 y^3 z^0 ... classic example: x*z^2 vs y^3
        let a = [1, 0, 2];
        let b = [0, 3, 0];
        assert_eq!(MonomialOrder::grlex().cmp(&a, &b), Ordering::Greater);
        assert_eq!(MonomialOrder::grevlex().cmp(&a, &b), Ordering::Less);
    }

    #[test]
    fn weights_dominate() {
        let w = [BigRational::new(1.into(), 3.into()), BigRational::new(1.into(), 6.into())];
        let o = MonomialOrder::weighted(&w, TieBreak::Grevlex).unwrap();
        // x (weight 2/6) vs y^2 (2/6): tie on weight, y^2 has larger total degree
        assert_eq!(o.cmp(&[1, 0], &[0, 2]), Ordering::Less);
        assert_eq!(o.cmp(&[1, 0], &[0, 1]), Ordering::Greater);
    }
}
