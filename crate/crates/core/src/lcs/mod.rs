//! Lower central series of free groups: Hall basic commutators, the Magnus
//! membership oracle, collection modulo `γ_p(F_m)`, and coordinates on the
//! free abelian quotients `γ_q/γ_{q+1}`.

mod hall;
mod magnus;

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::freegroup::{Word, WordError};

pub use hall::{witt_count, BasicCommutator, HallBasis, Shape, DEFAULT_MAX_WEIGHT};
pub use magnus::{magnus_expand, MagnusSeries};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LcsError {
    #[error("rank must be positive")]
    ZeroRank,
    #[error("weight {requested} outside the supported range 1..={bound}")]
    WeightOutOfRange { requested: usize, bound: usize },
    #[error("collection depth p={p} outside 2..={max}")]
    POutOfRange { p: usize, max: usize },
    #[error("word is not in γ_{q} (it lies in γ_{depth} only)")]
    NotInGamma { q: usize, depth: usize },
    #[error("rank mismatch between word (rank {word}) and basis (rank {basis})")]
    RankMismatch { word: u32, basis: u32 },
    #[error("`{0}` is not a basic commutator")]
    NotBasic(String),
    #[error("cannot parse commutator `{0}`")]
    BadCommutator(String),
    #[error("exponent {0} does not fit in a machine word")]
    ExponentOverflow(BigInt),
    #[error("internal consistency check failed: {0}")]
    Internal(String),
    #[error(transparent)]
    Word(#[from] WordError),
}

/// Result of [`lcs_depth`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Depth {
    /// `w ∈ γ_q \ γ_{q+1}`.
    Exact(usize),
    /// `w ∈ γ_q` for the reported `q = cap + 1`; nothing finer was checked.
    AtLeast(usize),
}

impl Depth {
    /// Lower bound on the depth that this result certifies.
    pub fn at_least(self) -> usize {
        match self {
            Depth::Exact(q) | Depth::AtLeast(q) => q,
        }
    }
}

/// Largest `q <= cap` with `w ∈ γ_q(F_m)`, read off the lowest nonzero
/// Magnus degree.
pub fn lcs_depth(w: &Word, cap: usize) -> Depth {
    let cap = cap.max(1);
    match magnus_expand(w, cap).lowest_nontrivial_degree() {
        Some(q) => Depth::Exact(q),
        None => Depth::AtLeast(cap + 1),
    }
}

/// Coordinates of `w γ_{q+1}` on the weight-`q` basic commutators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoordinateVector {
    pub weight: usize,
    pub entries: Vec<BigInt>,
}

impl CoordinateVector {
    /// The word length on `A_q^m` with respect to the basic-commutator basis.
    pub fn l1_norm(&self) -> BigInt {
        self.entries.iter().map(|e| e.abs()).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Zero::is_zero)
    }
}

/// One factor `c^{exponent}` of a collected or expanded product.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Power {
    pub ordinal: usize,
    pub exponent: i64,
}

/// Decomposition of `[w, w0] γ_p` into basic commutators of weights `3..p`.
#[derive(Debug, Clone, PartialEq)]
pub struct BracketExpansion {
    pub factors: Vec<Power>,
    /// Number of factors from `E_t^{±1}` (a power `c^s` counts `|s|` times).
    pub counts: BTreeMap<usize, u64>,
    /// Letter length `ℓ(w)`.
    pub letter_length: usize,
    /// `max_t counts[t] / ℓ(w)^{t-2}`.
    pub observed_constant: f64,
}

impl HallBasis {
    fn check_word(&self, w: &Word) -> Result<(), LcsError> {
        if w.rank() != self.rank() {
            return Err(LcsError::RankMismatch {
                word: w.rank(),
                basis: self.rank(),
            });
        }
        Ok(())
    }

    fn check_weight(&self, q: usize) -> Result<(), LcsError> {
        if q == 0 || q > self.max_weight() {
            return Err(LcsError::WeightOutOfRange {
                requested: q,
                bound: self.max_weight(),
            });
        }
        Ok(())
    }

    /// Coordinates of `w γ_{q+1}` in `A_q^m`; `w` must lie in `γ_q`.
    pub fn abelian_coords(&self, w: &Word, q: usize) -> Result<CoordinateVector, LcsError> {
        self.check_word(w)?;
        self.check_weight(q)?;
        let series = magnus_expand(w, q);
        if let Some(d) = series.lowest_nontrivial_degree() {
            if d < q {
                return Err(LcsError::NotInGamma { q, depth: d });
            }
        }
        let entries = self
            .solver(q)
            .solve(series.homogeneous(q))
            .ok_or_else(|| LcsError::Internal(format!("degree-{q} part is not a Lie element")))?;
        Ok(CoordinateVector { weight: q, entries })
    }

    /// The product `prod c^{s}` in the given order, as a reduced word.
    pub fn evaluate(&self, factors: &[Power]) -> Word {
        let mut out = Word::identity(self.rank());
        for f in factors {
            out.mul_assign_unchecked(&self.word(f.ordinal).pow(f.exponent));
        }
        out
    }

    /// Rewrites `w γ_p` as `prod_{c} c^{s_c} γ_p` over the basic commutators of
    /// weight `< p`, in basis order. Zero exponents are omitted.
    ///
    /// Each weight is peeled off in turn: the weight-`q` coordinates of the
    /// current remainder give the exponents, and the remainder is divided by
    /// that collected block, which pushes it into `γ_{q+1}`.
    pub fn collect(&self, w: &Word, p: usize) -> Result<Vec<Power>, LcsError> {
        self.check_word(w)?;
        if p < 2 || p > self.max_weight() + 1 {
            return Err(LcsError::POutOfRange {
                p,
                max: self.max_weight() + 1,
            });
        }
        self.collect_from(w, 1, p)
    }

    // Collection for a word already known to lie in γ_start.
    fn collect_from(&self, w: &Word, start: usize, p: usize) -> Result<Vec<Power>, LcsError> {
        let mut rest = w.clone();
        let mut out = Vec::new();
        for q in start..p {
            if rest.is_empty() {
                break;
            }
            let coords = self.abelian_coords(&rest, q)?;
            let mut block = Vec::new();
            for (ordinal, s) in self.level(q).zip(&coords.entries) {
                if s.is_zero() {
                    continue;
                }
                let exponent = s.to_i64().ok_or_else(|| LcsError::ExponentOverflow(s.clone()))?;
                block.push(Power { ordinal, exponent });
            }
            rest = self.evaluate(&block).inverse().mul_unchecked(&rest);
            out.extend(block);
        }
        Ok(out)
    }

    /// Checks `prod factors ≡ w (mod γ_p)` with the Magnus oracle.
    pub fn congruent_mod(&self, w: &Word, factors: &[Power], p: usize) -> bool {
        let lhs = magnus_expand(w, p - 1);
        let rhs = magnus_expand(&self.evaluate(factors), p - 1);
        lhs == rhs
    }

    /// Whether `v(x_1^n, ..., x_m^n) ≡ v^{n^r} (mod γ_{r+1})` for the basic
    /// commutator `v` of weight `r`.
    pub fn verify_bci(&self, ordinal: usize, n: i64) -> Result<bool, LcsError> {
        let r = self.get(ordinal).weight;
        let v = self.word(ordinal);
        let power = n
            .checked_pow(r as u32)
            .ok_or_else(|| LcsError::ExponentOverflow(BigInt::from(n).pow(r as u32)))?;
        let probe = v.substitute_powers(n)?.mul_unchecked(&v.pow(-power));
        Ok(magnus_expand(&probe, r).lowest_nontrivial_degree().is_none())
    }

    /// Writes `[w, w0] γ_p` as a product of basic commutators of weights
    /// `3..p` (for `w0 ∈ [F_m, F_m]`, `p >= 4`), and counts the factors per
    /// weight.
    ///
    /// `[w, w0]` is first expanded letter by letter with
    /// `[ac, b] = [a, b]^c [c, b]` and `T^c = T [T, c]`, giving iterated
    /// commutators `[[l_i, w0], l_j, ...]` (dropped once their weight reaches
    /// `p`); each of those is then collected from its own weight upward.
    pub fn expand_bracket(&self, w: &Word, w0: &Word, p: usize) -> Result<BracketExpansion, LcsError> {
        self.check_word(w)?;
        self.check_word(w0)?;
        if p < 4 || p > self.max_weight() + 1 {
            return Err(LcsError::POutOfRange {
                p,
                max: self.max_weight() + 1,
            });
        }
        let d0 = lcs_depth(w0, p).at_least();
        if d0 < 2 {
            return Err(LcsError::NotInGamma { q: 2, depth: d0 });
        }
        let rank = self.rank();
        // (term, certified weight)
        let mut terms: Vec<(Word, usize)> = Vec::new();
        for letter in w.letters() {
            let c = Word::reduce(rank, &[letter])?;
            let mut next = Vec::with_capacity(terms.len() * 2 + 1);
            for (t, wt) in terms {
                let conj = (wt + 1 < p).then(|| (t.commutator_with(&c), wt + 1));
                next.push((t, wt));
                next.extend(conj);
            }
            if d0 + 1 < p {
                next.push((c.commutator_with(w0), d0 + 1));
            }
            terms = next;
        }
        let mut factors = Vec::new();
        let mut counts: BTreeMap<usize, u64> = BTreeMap::new();
        for (t, wt) in &terms {
            for f in self.collect_from(t, *wt, p)? {
                *counts.entry(self.get(f.ordinal).weight).or_default() += f.exponent.unsigned_abs();
                factors.push(f);
            }
        }
        let target = w.commutator_with(w0);
        if !self.congruent_mod(&target, &factors, p) {
            return Err(LcsError::Internal("bracket expansion failed the Magnus check".into()));
        }
        let letter_length = w.len();
        let observed_constant = counts
            .iter()
            .map(|(&t, &c)| c as f64 / (letter_length.max(1) as f64).powi(t as i32 - 2))
            .fold(0.0, f64::max);
        Ok(BracketExpansion {
            factors,
            counts,
            letter_length,
            observed_constant,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::freegroup::parse_word_default;

    fn w2(s: &str) -> Word {
        parse_word_default(s, 2).unwrap()
    }

    #[test]
    fn depth_examples() {
        assert_eq!(lcs_depth(&w2("x1"), 5), Depth::Exact(1));
        assert_eq!(lcs_depth(&w2("[x1,x2]"), 5), Depth::Exact(2));
        assert_eq!(lcs_depth(&w2("[x1,x2,x2]"), 5), Depth::Exact(3));
        assert_eq!(lcs_depth(&w2(""), 5), Depth::AtLeast(6));
    }

    #[test]
    fn collect_examples() {
        let b = HallBasis::new(2, 5).unwrap();
        assert!(b.collect(&w2("[x2,x1] [x1,x2]"), 4).unwrap().is_empty());
        let c = b.collect(&w2("[x1^2,x2^2]"), 3).unwrap();
        assert_eq!(c, vec![Power { ordinal: 2, exponent: -4 }]);
        let c = b.collect(&w2("[x1,x2,x2]"), 4).unwrap();
        assert_eq!(b.expr(c[0].ordinal), "[[x2,x1],x2]");
        assert_eq!(c, vec![Power { ordinal: 4, exponent: -1 }]);
        assert!(matches!(b.collect(&w2("x1"), 7), Err(LcsError::POutOfRange { .. })));
        assert!(matches!(b.collect(&w2("x1"), 1), Err(LcsError::POutOfRange { .. })));
    }

    #[test]
    fn collect_generic_word() {
        let b = HallBasis::new(2, 5).unwrap();
        let w = w2("x1^2 x2^-1 x1 x2^3 x1^-1 x2");
        for p in 2..=6 {
            let c = b.collect(&w, p).unwrap();
            assert!(b.congruent_mod(&w, &c, p), "p={p}");
        }
        // collected exponents of weight 1 are exponent sums
        let c = b.collect(&w, 2).unwrap();
        assert_eq!(
            c,
            vec![Power { ordinal: 0, exponent: 2 }, Power { ordinal: 1, exponent: 3 }]
        );
    }

    #[test]
    fn coords_examples() {
        let b = HallBasis::new(2, 4).unwrap();
        assert_eq!(b.abelian_coords(&w2("[x2,x1]"), 2).unwrap().entries, vec![1.into()]);
        assert_eq!(
            b.abelian_coords(&w2("[x1^2,x2^2]"), 2).unwrap().entries,
            vec![(-4).into()]
        );
        assert_eq!(
            b.abelian_coords(&w2("[x1,x2,x2]"), 3).unwrap().entries,
            vec![0.into(), (-1).into()]
        );
        assert_eq!(
            b.abelian_coords(&w2("[x1,x2]"), 3),
            Err(LcsError::NotInGamma { q: 3, depth: 2 })
        );
    }

    #[test]
    fn bci_examples() {
        let b = HallBasis::new(2, 4).unwrap();
        assert!(b.verify_bci(b.parse_commutator("[x2,x1]").unwrap(), 2).unwrap());
        assert!(b.verify_bci(0, 7).unwrap());
        assert!(b.verify_bci(b.parse_commutator("[[x2,x1],x1]").unwrap(), 3).unwrap());
    }

    #[test]
    fn bracket_expansion_examples() {
        let b = HallBasis::new(2, 6).unwrap();
        let w0 = w2("[x1,x2]");
        let e = b.expand_bracket(&w2(""), &w0, 5).unwrap();
        assert!(e.factors.is_empty());
        let e = b.expand_bracket(&w2("x1"), &w0, 4).unwrap();
        assert!(!e.factors.is_empty());
        assert!(e.factors.iter().all(|f| b.get(f.ordinal).weight == 3));
        let short = b.expand_bracket(&w2("x1 x2"), &w0, 5).unwrap();
        let long = b.expand_bracket(&w2("x1 x2 x1 x2"), &w0, 5).unwrap();
        assert!(short.counts[&3] <= long.counts[&3]);
        assert!(matches!(
            b.expand_bracket(&w2("x1"), &w2("x2"), 5),
            Err(LcsError::NotInGamma { .. })
        ));
    }
}
