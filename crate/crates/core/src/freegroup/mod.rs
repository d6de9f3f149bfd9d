//! Reduced words in free groups of finite rank.
//!
//! A [`Word`] is stored in syllable (run-length) form: a sequence of
//! `(generator, exponent)` pairs with nonzero exponents and distinct adjacent
//! generators. Generators are numbered `1..=rank`.

mod ball;
mod parse;

use std::fmt;

pub use ball::{ball, BallEntry, DEFAULT_BALL_CAP};
pub use parse::{parse_word, parse_word_default, ParseError};
pub(crate) use parse::v_block;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum WordError {
    #[error("generator index {index} out of range for rank {rank}")]
    GeneratorOutOfRange { index: i64, rank: u32 },
    #[error("rank mismatch: {0} vs {1}")]
    RankMismatch(u32, u32),
    #[error("commutator of an empty argument list")]
    EmptyCommutator,
    #[error("power substitution needs n >= 1, got {0}")]
    NonPositivePower(i64),
    #[error("ball exceeded the element cap of {cap}")]
    Capacity { cap: usize },
}

/// A freely reduced word in the free group `F_rank`.
///
/// Ordering and hashing run over `(rank, syllables)`, which is the canonical
/// normal form, so equal group elements compare equal.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    rank: u32,
    syllables: Vec<(u32, i64)>,
}

impl Word {
    pub fn identity(rank: u32) -> Self {
        Word {
            rank,
            syllables: Vec::new(),
        }
    }

    /// The generator `x_index` (1-based).
    pub fn generator(rank: u32, index: u32) -> Result<Self, WordError> {
        Self::from_syllables(rank, [(index, 1)])
    }

    /// Reduces a sequence of signed letters: `+i` is `x_i`, `-i` is `x_i^{-1}`.
    pub fn reduce(rank: u32, letters: &[i32]) -> Result<Self, WordError> {
        Self::from_syllables(
            rank,
            letters.iter().map(|&l| (l.unsigned_abs(), l.signum() as i64)),
        )
    }

    /// Builds a word from arbitrary syllables (zero exponents and adjacent
    /// repeats allowed) and freely reduces it.
    pub fn from_syllables<I>(rank: u32, syllables: I) -> Result<Self, WordError>
    where
        I: IntoIterator<Item = (u32, i64)>,
    {
        let mut w = Word::identity(rank);
        for (g, e) in syllables {
            if g == 0 || g > rank {
                return Err(WordError::GeneratorOutOfRange {
                    index: g as i64,
                    rank,
                });
            }
            w.push(g, e);
        }
        Ok(w)
    }

    // Appends a syllable, merging with or cancelling against the tail.
    fn push(&mut self, g: u32, e: i64) {
        if e == 0 {
            return;
        }
        match self.syllables.last_mut() {
            Some((lg, le)) if *lg == g => {
                *le += e;
                if *le == 0 {
                    self.syllables.pop();
                }
            }
            _ => self.syllables.push((g, e)),
        }
    }

    pub fn rank(&self) -> u32 {
        self.rank
    }

    pub fn syllables(&self) -> &[(u32, i64)] {
        &self.syllables
    }

    /// Word length over `{x_i^{±1}}`.
    pub fn len(&self) -> usize {
        self.syllables.iter().map(|&(_, e)| e.unsigned_abs() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.syllables.is_empty()
    }

    /// Signed letters, expanding runs.
    pub fn letters(&self) -> impl Iterator<Item = i32> + '_ {
        self.syllables.iter().flat_map(|&(g, e)| {
            let l = if e > 0 { g as i32 } else { -(g as i32) };
            std::iter::repeat(l).take(e.unsigned_abs() as usize)
        })
    }

    /// Reinterprets the word in a free group of larger (or equal) rank.
    pub fn with_rank(&self, rank: u32) -> Result<Self, WordError> {
        if let Some(&(g, _)) = self.syllables.iter().find(|&&(g, _)| g > rank) {
            return Err(WordError::GeneratorOutOfRange {
                index: g as i64,
                rank,
            });
        }
        Ok(Word {
            rank,
            syllables: self.syllables.clone(),
        })
    }

    fn check_rank(&self, other: &Word) -> Result<(), WordError> {
        if self.rank != other.rank {
            return Err(WordError::RankMismatch(self.rank, other.rank));
        }
        Ok(())
    }

    pub fn multiply(&self, other: &Word) -> Result<Word, WordError> {
        self.check_rank(other)?;
        Ok(self.mul_unchecked(other))
    }

    pub(crate) fn mul_unchecked(&self, other: &Word) -> Word {
        let mut out = self.clone();
        out.mul_assign_unchecked(other);
        out
    }

    pub(crate) fn mul_assign_unchecked(&mut self, other: &Word) {
        let mut i = 0;
        // cancel across the seam before copying the rest
        while i < other.syllables.len() {
            let (g, e) = other.syllables[i];
            match self.syllables.last_mut() {
                Some((lg, le)) if *lg == g => {
                    *le += e;
                    if *le == 0 {
                        self.syllables.pop();
                        i += 1;
                        continue;
                    }
                    i += 1;
                    break;
                }
                _ => break,
            }
        }
        self.syllables.extend_from_slice(&other.syllables[i..]);
    }

    pub fn inverse(&self) -> Word {
        Word {
            rank: self.rank,
            syllables: self.syllables.iter().rev().map(|&(g, e)| (g, -e)).collect(),
        }
    }

    /// `self^k` for any integer `k`.
    pub fn pow(&self, k: i64) -> Word {
        if k == 0 || self.is_empty() {
            return Word::identity(self.rank);
        }
        let base = if k > 0 { self.clone() } else { self.inverse() };
        // conjugate-reduce so that powers only merge in the middle
        let (prefix, core) = base.split_conjugate();
        let mut out = Word::identity(self.rank);
        for _ in 0..k.unsigned_abs() {
            out.mul_assign_unchecked(&core);
        }
        prefix.mul_unchecked(&out).mul_unchecked(&prefix.inverse())
    }

    /// Writes `self = u c u^{-1}` with `c` cyclically reduced.
    pub fn split_conjugate(&self) -> (Word, Word) {
        let s = &self.syllables;
        let mut lo = 0usize;
        let mut hi = s.len();
        let mut prefix = Vec::new();
        let mut head: Option<(u32, i64)> = None;
        let mut tail: Option<(u32, i64)> = None;
        while hi - lo > 1 {
            let (g1, e1) = s[lo];
            let (g2, e2) = s[hi - 1];
            if g1 != g2 {
                break;
            }
            if e1 == -e2 {
                prefix.push((g1, e1));
                lo += 1;
                hi -= 1;
                continue;
            }
            // partial cancellation: x^{e1} M x^{e2} = x^t (x^{e1-t} M x^{e2+t}) x^{-t}
            if e1.signum() == -e2.signum() {
                let t = if e1.abs() < e2.abs() { e1 } else { -e2 };
                prefix.push((g1, t));
                head = Some((g1, e1 - t));
                tail = Some((g1, e2 + t));
                lo += 1;
                hi -= 1;
            }
            break;
        }
        let mut core = Word::identity(self.rank);
        for &(g, e) in head.iter().chain(&s[lo..hi]).chain(tail.iter()) {
            core.push(g, e);
        }
        let prefix = Word {
            rank: self.rank,
            syllables: prefix,
        };
        (prefix, core)
    }

    /// Cyclically reduced conjugate of `self`.
    pub fn cyclically_reduce(&self) -> Word {
        self.split_conjugate().1
    }

    /// Left-normed iterated commutator `[w1, ..., wr]` with
    /// `[a, b] = a^{-1} b^{-1} a b`.
    pub fn commutator(args: &[Word]) -> Result<Word, WordError> {
        let (first, rest) = args.split_first().ok_or(WordError::EmptyCommutator)?;
        let mut acc = first.clone();
        for w in rest {
            acc.check_rank(w)?;
            acc = acc.commutator_with(w);
        }
        Ok(acc)
    }

    pub(crate) fn commutator_with(&self, b: &Word) -> Word {
        let mut out = self.inverse();
        out.mul_assign_unchecked(&b.inverse());
        out.mul_assign_unchecked(self);
        out.mul_assign_unchecked(b);
        out
    }

    /// Replaces every `x_i` by `x_i^n`.
    pub fn substitute_powers(&self, n: i64) -> Result<Word, WordError> {
        if n < 1 {
            return Err(WordError::NonPositivePower(n));
        }
        Ok(Word {
            rank: self.rank,
            syllables: self.syllables.iter().map(|&(g, e)| (g, e * n)).collect(),
        })
    }

    /// Applies the homomorphism `x_i -> images[i-1]`.
    pub fn substitute(&self, images: &[Word]) -> Result<Word, WordError> {
        if images.len() < self.rank as usize {
            return Err(WordError::GeneratorOutOfRange {
                index: self.rank as i64,
                rank: images.len() as u32,
            });
        }
        let target = images.first().map(|w| w.rank).unwrap_or(0);
        if let Some(w) = images.iter().find(|w| w.rank != target) {
            return Err(WordError::RankMismatch(target, w.rank));
        }
        let mut out = Word::identity(target);
        for &(g, e) in &self.syllables {
            out.mul_assign_unchecked(&images[g as usize - 1].pow(e));
        }
        Ok(out)
    }

    /// Renders the word with custom generator names, e.g. `a^-1 b a b`.
    pub fn display_with(&self, names: &[impl AsRef<str>]) -> String {
        if self.is_empty() {
            return "1".to_string();
        }
        self.syllables
            .iter()
            .map(|&(g, e)| {
                let name = names
                    .get(g as usize - 1)
                    .map(|s| s.as_ref().to_string())
                    .unwrap_or_else(|| format!("x{g}"));
                if e == 1 {
                    name
                } else {
                    format!("{name}^{e}")
                }
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// Default generator names `x1, ..., xm`.
pub fn default_names(rank: u32) -> Vec<String> {
    (1..=rank).map(|i| format!("x{i}")).collect()
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display_with(&default_names(self.rank)))
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word[{}]({})", self.rank, self)
    }
}
