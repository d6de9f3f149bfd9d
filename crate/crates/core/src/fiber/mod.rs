//! Fiber products `F_m ×_N F_m` over the generating set
//! `{(x_i, x_i)} ∪ {(1, w) : w ∈ A}`, with `N` the normal closure of `A`.
//!
//! Elements are only ever built constructively (from a witness word over the
//! generators, or by a construction whose membership is proved by a witness);
//! membership in `N` is never decided.

mod bfs;
mod probe;
mod vq;

use std::fmt;

use thiserror::Error;

use crate::freegroup::{parse_word_default, ParseError, Word, WordError};
use crate::lcs::{lcs_depth, LcsError};

pub use bfs::{
    bfs_ball, bfs_length, bfs_length_bidirectional, bfs_length_forward, BfsOutcome,
    BIDIRECTIONAL_THRESHOLD, DEFAULT_STATE_CAP,
};
pub use probe::{distortion, estimate1_probe, DistortionReport, ProbeReport};
pub use vq::{build_vq, coordinate_certificate, vq_witness, Certificate, TestSequenceSpec};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FiberError {
    #[error(transparent)]
    Word(#[from] WordError),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Lcs(#[from] LcsError),
    #[error("witness letter {letter} outside 1..={count}")]
    InvalidLetter { letter: i64, count: usize },
    #[error("normal generator {index} is not in the commutator subgroup")]
    NotInCommutator { index: usize },
    #[error("invalid test sequence: {0}")]
    BadSpec(String),
    #[error("enumeration would visit {needed} items, above the cap {cap}")]
    Capacity {
        needed: u128,
        cap: usize,
        partial: Option<Box<ProbeReport>>,
    },
    #[error("internal consistency check failed: {0}")]
    Internal(String),
}

/// The generating set of `F_m ×_{<<A>>} F_m`.
///
/// Witness words have rank `m + |A|`: letter `i <= m` stands for
/// `(x_i, x_i)` and letter `m + j` for `(1, a_j)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiberGenerators {
    rank: u32,
    normal: Vec<Word>,
}

impl FiberGenerators {
    pub fn new(rank: u32, normal: Vec<Word>) -> Result<Self, FiberError> {
        if rank == 0 {
            return Err(FiberError::Lcs(LcsError::ZeroRank));
        }
        for w in &normal {
            if w.rank() != rank {
                return Err(WordError::RankMismatch(rank, w.rank()).into());
            }
        }
        Ok(FiberGenerators { rank, normal })
    }

    /// Parses normal generators written over `x1..xm`.
    pub fn parse(rank: u32, normal: &[&str]) -> Result<Self, FiberError> {
        let words = normal
            .iter()
            .map(|s| parse_word_default(s, rank))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(rank, words)
    }

    pub fn rank(&self) -> u32 {
        self.rank
    }

    pub fn normal(&self) -> &[Word] {
        &self.normal
    }

    /// Number of generators, `m + |A|`.
    pub fn count(&self) -> usize {
        self.rank as usize + self.normal.len()
    }

    /// Rank of witness words.
    pub fn witness_rank(&self) -> u32 {
        self.count() as u32
    }

    /// Checks that every normal generator lies in `[F_m, F_m]`.
    pub fn require_commutators(&self) -> Result<(), FiberError> {
        for (i, w) in self.normal.iter().enumerate() {
            if lcs_depth(w, 2).at_least() < 2 {
                return Err(FiberError::NotInCommutator { index: i + 1 });
            }
        }
        Ok(())
    }

    /// The pair `(left, right)` contributed by generator `index` (1-based)
    /// raised to `e`.
    pub(crate) fn step(&self, index: u32, e: i64) -> (Word, Word) {
        let m = self.rank;
        if index <= m {
            let x = Word::generator(m, index).expect("index in range").pow(e);
            (x.clone(), x)
        } else {
            let a = self.normal[(index - m - 1) as usize].pow(e);
            (Word::identity(m), a)
        }
    }

    /// Diagonal witness `(t, t)` for an ambient word `t`.
    pub fn diagonal(&self, t: &Word) -> Result<Word, FiberError> {
        if t.rank() != self.rank {
            return Err(WordError::RankMismatch(self.rank, t.rank()).into());
        }
        Ok(t.with_rank(self.witness_rank())?)
    }

    /// Witness for `(1, a_j)^e`.
    pub fn normal_letter(&self, j: usize, e: i64) -> Word {
        Word::from_syllables(self.witness_rank(), [(self.rank + j as u32, e)])
            .expect("letter in range")
    }
}

/// A pair `(γ, γw)` with `w ∈ <<A>>`, optionally with the witness that
/// produced it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiberElement {
    pub left: Word,
    pub right: Word,
    pub witness: Option<Word>,
}

impl FiberElement {
    pub fn identity(rank: u32) -> Self {
        FiberElement {
            left: Word::identity(rank),
            right: Word::identity(rank),
            witness: None,
        }
    }

    pub fn inverse(&self) -> Self {
        FiberElement {
            left: self.left.inverse(),
            right: self.right.inverse(),
            witness: self.witness.as_ref().map(Word::inverse),
        }
    }

    pub fn multiply(&self, other: &FiberElement) -> Result<Self, FiberError> {
        let witness = match (&self.witness, &other.witness) {
            (Some(a), Some(b)) => Some(a.multiply(b)?),
            _ => None,
        };
        Ok(FiberElement {
            left: self.left.multiply(&other.left)?,
            right: self.right.multiply(&other.right)?,
            witness,
        })
    }

    /// Ambient length `|γ| + |γw|` in `F_m × F_m`.
    pub fn ambient_length(&self) -> usize {
        self.left.len() + self.right.len()
    }

    pub fn same_pair(&self, other: &FiberElement) -> bool {
        self.left == other.left && self.right == other.right
    }
}

impl fmt::Display for FiberElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.left, self.right)
    }
}

/// Evaluates a witness word over the generators.
pub fn evaluate(gens: &FiberGenerators, witness: &Word) -> Result<FiberElement, FiberError> {
    let count = gens.count();
    let mut left = Word::identity(gens.rank);
    let mut right = Word::identity(gens.rank);
    for &(g, e) in witness.syllables() {
        if g as usize > count {
            return Err(FiberError::InvalidLetter {
                letter: g as i64,
                count,
            });
        }
        let (l, r) = gens.step(g, e);
        left.mul_assign_unchecked(&l);
        right.mul_assign_unchecked(&r);
    }
    Ok(FiberElement {
        left,
        right,
        witness: Some(witness.clone()),
    })
}
