//! Pieces of a presentation.
//!
//! A piece is a word read at two distinct positions of the cyclic words
//! `r_i` and `r_i^{-1}`. Each cyclic word `c` of length `L` contributes the
//! text `c · c[..L-1]`, so every cyclic subword of length at most `L` starts
//! in the first copy. All texts are concatenated with a separator byte, a
//! suffix array is built over the result and the longest common prefixes of
//! neighbouring suffixes come from Kasai's algorithm. Common prefixes are
//! capped at the shorter of the two relator lengths, which never reaches a
//! separator.

use num_bigint::BigInt;
use num_traits::Zero;
use suffix_array::SuffixArray;

use crate::freegroup::Word;
use crate::Rational;

use super::Presentation;

const SEPARATOR: u8 = u8::MAX;

/// A position in the cyclic word `r_relator` (or its inverse), 0-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Occurrence {
    pub relator: usize,
    pub inverted: bool,
    pub offset: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PieceWitness {
    pub word: Word,
    pub first: Occurrence,
    pub second: Occurrence,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PieceReport {
    pub relator_lengths: Vec<usize>,
    /// Longest piece occurring in each relator (or its inverse).
    pub relator_pieces: Vec<usize>,
    pub max_piece: usize,
    /// `relator_pieces[i] / relator_lengths[i]`.
    pub ratios: Vec<Rational>,
    pub worst_ratio: Rational,
    pub witness: Option<PieceWitness>,
}

impl PieceReport {
    /// Every piece is shorter than `lambda` times each relator containing it.
    pub fn satisfies(&self, lambda: &Rational) -> bool {
        self.relator_pieces
            .iter()
            .zip(&self.relator_lengths)
            .all(|(&p, &l)| Rational::from_integer(BigInt::from(p)) < lambda * BigInt::from(l))
    }
}

pub(crate) fn letter_byte(l: i32) -> u8 {
    let g = l.unsigned_abs() as u8 - 1;
    2 * g + u8::from(l < 0)
}

fn byte_letter(b: u8) -> i32 {
    let g = (b / 2) as i32 + 1;
    if b % 2 == 0 {
        g
    } else {
        -g
    }
}

/// Suffix array over the doubled cyclic words of a presentation.
pub(crate) struct CyclicIndex {
    pub text: Vec<u8>,
    pub sa: Vec<u32>,
    /// Start of each segment in `text`.
    pub starts: Vec<usize>,
    /// Cyclic word of each segment, as bytes.
    pub words: Vec<Vec<u8>>,
    /// Segment `2i` is relator `i`, segment `2i + 1` its inverse.
    pub rank: u32,
}

impl CyclicIndex {
    pub fn new(p: &Presentation) -> Self {
        let mut words = Vec::with_capacity(2 * p.relators().len());
        for r in p.relators() {
            words.push(r.letters().map(letter_byte).collect::<Vec<u8>>());
            words.push(r.inverse().letters().map(letter_byte).collect());
        }
        let total: usize = words.iter().map(|w| 2 * w.len()).sum();
        let mut text = Vec::with_capacity(total);
        let mut starts = Vec::with_capacity(words.len());
        for w in &words {
            starts.push(text.len());
            text.extend_from_slice(w);
            text.extend_from_slice(&w[..w.len() - 1]);
            text.push(SEPARATOR);
        }
        let (_, mut sa) = SuffixArray::new(&text).into_parts();
        // the first entry is the empty suffix
        sa.remove(0);
        CyclicIndex {
            text,
            sa,
            starts,
            words,
            rank: p.rank(),
        }
    }

    /// Segment containing text position `pos` and the offset inside it.
    pub fn locate(&self, pos: usize) -> (usize, usize) {
        let seg = self.starts.partition_point(|&s| s <= pos) - 1;
        (seg, pos - self.starts[seg])
    }

    pub fn occurrence(&self, seg: usize, offset: usize) -> Occurrence {
        Occurrence {
            relator: seg / 2,
            inverted: seg % 2 == 1,
            offset: offset % self.words[seg].len(),
        }
    }

    /// The cyclic subword of segment `seg` of length `len` at `offset`.
    pub fn cyclic_letters(&self, seg: usize, offset: usize, len: usize) -> Vec<i32> {
        let w = &self.words[seg];
        (0..len).map(|k| byte_letter(w[(offset + k) % w.len()])).collect()
    }

    fn lcp_array(&self) -> Vec<u32> {
        // lcp[k] = lcp(sa[k-1], sa[k]); Kasai
        let n = self.text.len();
        let mut rank = vec![0u32; n];
        for (k, &s) in self.sa.iter().enumerate() {
            rank[s as usize] = k as u32;
        }
        let mut lcp = vec![0u32; n];
        let mut h = 0usize;
        for i in 0..n {
            let r = rank[i] as usize;
            if r == 0 {
                h = 0;
                continue;
            }
            let j = self.sa[r - 1] as usize;
            while i + h < n && j + h < n && self.text[i + h] == self.text[j + h] {
                h += 1;
            }
            lcp[r] = h as u32;
            h = h.saturating_sub(1);
        }
        lcp
    }

    /// Narrows `sa[lo..hi]`, whose suffixes share a prefix of length
    /// `depth`, to those continuing with `byte`.
    pub fn refine(&self, lo: usize, hi: usize, depth: usize, byte: u8) -> (usize, usize) {
        let key = |k: usize| self.text.get(self.sa[k] as usize + depth).copied();
        let (mut a, mut b) = (lo, hi);
        while a < b {
            let m = (a + b) / 2;
            if key(m) < Some(byte) {
                a = m + 1;
            } else {
                b = m;
            }
        }
        let first = a;
        b = hi;
        while a < b {
            let m = (a + b) / 2;
            if key(m) <= Some(byte) {
                a = m + 1;
            } else {
                b = m;
            }
        }
        (first, a)
    }
}

/// Longest pieces of `p`, per relator and overall.
pub fn pieces(p: &Presentation) -> PieceReport {
    let lengths: Vec<usize> = p.relators().iter().map(Word::len).collect();
    if lengths.is_empty() {
        return PieceReport {
            relator_lengths: lengths,
            relator_pieces: Vec::new(),
            max_piece: 0,
            ratios: Vec::new(),
            worst_ratio: Rational::zero(),
            witness: None,
        };
    }
    let idx = CyclicIndex::new(p);
    let lcp = idx.lcp_array();
    let n = idx.sa.len();
    // (segment, offset) for suffixes that start in a first copy
    let info: Vec<Option<(usize, usize)>> = idx
        .sa
        .iter()
        .map(|&s| {
            let (seg, off) = idx.locate(s as usize);
            (off < idx.words[seg].len()).then_some((seg, off))
        })
        .collect();
    let seg_len = |seg: usize| idx.words[seg].len();

    let mut best_per_seg = vec![0usize; idx.words.len()];
    let mut best: (usize, usize, usize) = (0, usize::MAX, usize::MAX);
    for k in 0..n {
        let Some((seg, _)) = info[k] else { continue };
        let cap = seg_len(seg);
        let mut found = 0usize;
        let mut partner = usize::MAX;
        // scan downwards then upwards with the running minimum lcp
        for dir in [-1isize, 1] {
            let mut run = u32::MAX as usize;
            let mut j = k as isize;
            loop {
                let (next, edge) = if dir < 0 {
                    (j - 1, j as usize)
                } else {
                    (j + 1, (j + 1) as usize)
                };
                if next < 0 || next as usize >= n {
                    break;
                }
                run = run.min(lcp[edge] as usize);
                if run <= found || found == cap {
                    break;
                }
                j = next;
                if let Some((s2, _)) = info[j as usize] {
                    let v = run.min(seg_len(s2)).min(cap);
                    if v > found {
                        found = v;
                        partner = j as usize;
                    }
                }
            }
        }
        if found > best_per_seg[seg] {
            best_per_seg[seg] = found;
        }
        if found > best.0 {
            best = (found, k, partner);
        }
    }

    let relator_pieces: Vec<usize> = (0..lengths.len())
        .map(|i| best_per_seg[2 * i].max(best_per_seg[2 * i + 1]))
        .collect();
    let ratios: Vec<Rational> = relator_pieces
        .iter()
        .zip(&lengths)
        .map(|(&a, &l)| Rational::new(BigInt::from(a), BigInt::from(l)))
        .collect();
    let worst_ratio = ratios.iter().max().cloned().unwrap_or_else(Rational::zero);
    let witness = (best.0 > 0).then(|| {
        let (s1, o1) = info[best.1].expect("valid suffix");
        let (s2, o2) = info[best.2].expect("valid partner");
        PieceWitness {
            word: Word::reduce(idx.rank, &idx.cyclic_letters(s1, o1, best.0)).expect("letters in range"),
            first: idx.occurrence(s1, o1),
            second: idx.occurrence(s2, o2),
        }
    });
    PieceReport {
        max_piece: *relator_pieces.iter().max().unwrap_or(&0),
        relator_lengths: lengths,
        relator_pieces,
        ratios,
        worst_ratio,
        witness,
    }
}

/// Whether `p` satisfies C'(`lambda`), with the piece report.
pub fn check_metric(p: &Presentation, lambda: &Rational) -> (bool, PieceReport) {
    let report = pieces(p);
    (report.satisfies(lambda), report)
}
