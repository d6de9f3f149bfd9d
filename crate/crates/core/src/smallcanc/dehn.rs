//! Dehn's algorithm for C'(1/6) presentations.
//!
//! Any subword longer than the maximal piece `P` occurs at exactly one
//! cyclic position, so each start of the word is matched against the suffix
//! array only to depth `P + 1` and then extended letter by letter along that
//! unique position. Starts covered by a maximal match that is too short to
//! replace are skipped.

use num_bigint::BigInt;

use crate::freegroup::Word;
use crate::Rational;

use super::pieces::{letter_byte, pieces, CyclicIndex, PieceReport};
use super::{Presentation, SmallCancError};

pub struct DehnReducer {
    index: CyclicIndex,
    max_piece: usize,
    report: PieceReport,
}

impl DehnReducer {
    /// Fails unless `p` satisfies C'(1/6).
    pub fn new(p: &Presentation) -> Result<Self, SmallCancError> {
        let report = pieces(p);
        let sixth = Rational::new(BigInt::from(1), BigInt::from(6));
        if !report.satisfies(&sixth) {
            return Err(SmallCancError::NotSmallCancellation(report.worst_ratio.to_string()));
        }
        Ok(DehnReducer {
            index: CyclicIndex::new(p),
            max_piece: report.max_piece,
            report,
        })
    }

    pub fn report(&self) -> &PieceReport {
        &self.report
    }

    /// Repeatedly replaces a subword `u` with `uv` a cyclic relator and
    /// `|u| > |v|` by `v^{-1}`, then cyclically reduces. The result is
    /// empty iff `w` is trivial in the group.
    pub fn reduce(&self, w: &Word) -> Word {
        let rank = self.index.rank;
        let mut w = w.clone();
        loop {
            match self.find(&w) {
                Some((start, len, seg, offset)) => {
                    let letters: Vec<i32> = w.letters().collect();
                    let l = self.index.words[seg].len();
                    let rest = self.index.cyclic_letters(seg, offset + len, l - len);
                    let mut next: Vec<i32> = letters[..start].to_vec();
                    next.extend(rest.iter().rev().map(|&c| -c));
                    next.extend_from_slice(&letters[start + len..]);
                    w = Word::reduce(rank, &next).expect("letters in range");
                }
                None => {
                    let c = w.cyclically_reduce();
                    if c == w {
                        return w;
                    }
                    w = c;
                }
            }
        }
    }

    /// First `(start, length, segment, offset)` where more than half of a
    /// cyclic relator occurs.
    fn find(&self, w: &Word) -> Option<(usize, usize, usize, usize)> {
        let bytes: Vec<u8> = w.letters().map(letter_byte).collect();
        let n = bytes.len();
        let idx = &self.index;
        let mut i = 0;
        while i < n {
            let (mut lo, mut hi) = (0, idx.sa.len());
            let depth = (self.max_piece + 1).min(n - i);
            let mut k = 0;
            while k < depth {
                (lo, hi) = idx.refine(lo, hi, k, bytes[i + k]);
                if lo == hi {
                    break;
                }
                k += 1;
            }
            if k < self.max_piece + 1 {
                // too short to exceed half a relator, as 2P < L
                i += 1;
                continue;
            }
            // the occurrence is unique up to the two copies in its segment
            let (seg, off) = idx.locate(idx.sa[lo] as usize);
            let word = &idx.words[seg];
            let l = word.len();
            let off = off % l;
            let mut len = k;
            while len < l && i + len < n && word[(off + len) % l] == bytes[i + len] {
                len += 1;
            }
            if 2 * len > l {
                return Some((i, len, seg, off));
            }
            i += (len - self.max_piece).max(1);
        }
        None
    }
}

/// One-shot [`DehnReducer::reduce`].
pub fn dehn_reduce(p: &Presentation, w: &Word) -> Result<Word, SmallCancError> {
    p.check_word(w)?;
    Ok(DehnReducer::new(p)?.reduce(w))
}
