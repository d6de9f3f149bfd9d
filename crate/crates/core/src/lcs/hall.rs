use std::collections::HashMap;
use std::ops::Range;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use crate::freegroup::Word;
use crate::linalg::Matrix;
use crate::Rational;

use super::magnus::magnus_expand;
use super::LcsError;

/// Default bound on the weights a [`HallBasis`] may be built to.
pub const DEFAULT_MAX_WEIGHT: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Shape {
    Leaf(u32),
    /// `[left, right]`, both given by ordinal.
    Pair { left: usize, right: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BasicCommutator {
    pub shape: Shape,
    pub weight: usize,
    pub ordinal: usize,
}

/// Basic commutators of weight `1..=max_weight` in `F_rank`.
///
/// Commutators are ordered by weight; within a weight, `[x, y]` is ordered
/// by the ordinal of `y`, then of `x`.
#[derive(Clone)]
pub struct HallBasis {
    rank: u32,
    max_weight: usize,
    elements: Vec<BasicCommutator>,
    words: Vec<Word>,
    levels: Vec<Range<usize>>,
    by_pair: HashMap<(usize, usize), usize>,
    solvers: Vec<OnceLock<LevelSolver>>,
}

impl std::fmt::Debug for HallBasis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("HallBasis")
            .field("rank", &self.rank)
            .field("max_weight", &self.max_weight)
            .field("level_sizes", &self.level_sizes())
            .finish()
    }
}

impl HallBasis {
    pub fn new(rank: u32, max_weight: usize) -> Result<Self, LcsError> {
        Self::with_bound(rank, max_weight, DEFAULT_MAX_WEIGHT)
    }

    pub fn with_bound(rank: u32, max_weight: usize, bound: usize) -> Result<Self, LcsError> {
        if rank == 0 {
            return Err(LcsError::ZeroRank);
        }
        if max_weight == 0 || max_weight > bound {
            return Err(LcsError::WeightOutOfRange {
                requested: max_weight,
                bound,
            });
        }
        let mut elements: Vec<BasicCommutator> = Vec::new();
        let mut words: Vec<Word> = Vec::new();
        let mut levels = vec![0..0];
        let mut by_pair = HashMap::new();
        for g in 1..=rank {
            elements.push(BasicCommutator {
                shape: Shape::Leaf(g),
                weight: 1,
                ordinal: elements.len(),
            });
            words.push(Word::generator(rank, g).expect("generator in range"));
        }
        levels.push(0..elements.len());
        for weight in 2..=max_weight {
            let mut candidates: Vec<(usize, usize)> = Vec::new();
            for k1 in 1..weight {
                for x in levels[k1].clone() {
                    for y in levels[weight - k1].clone() {
                        if y >= x {
                            continue;
                        }
                        if let Shape::Pair { right: v, .. } = elements[x].shape {
                            if v > y {
                                continue;
                            }
                        }
                        candidates.push((x, y));
                    }
                }
            }
            candidates.sort_by_key(|&(x, y)| (y, x));
            let start = elements.len();
            for (x, y) in candidates {
                let ordinal = elements.len();
                elements.push(BasicCommutator {
                    shape: Shape::Pair { left: x, right: y },
                    weight,
                    ordinal,
                });
                words.push(words[x].commutator_with(&words[y]));
                by_pair.insert((x, y), ordinal);
            }
            levels.push(start..elements.len());
        }
        let solvers = (0..=max_weight).map(|_| OnceLock::new()).collect();
        Ok(HallBasis {
            rank,
            max_weight,
            elements,
            words,
            levels,
            by_pair,
            solvers,
        })
    }

    pub fn rank(&self) -> u32 {
        self.rank
    }

    pub fn max_weight(&self) -> usize {
        self.max_weight
    }

    pub fn elements(&self) -> &[BasicCommutator] {
        &self.elements
    }

    pub fn get(&self, ordinal: usize) -> &BasicCommutator {
        &self.elements[ordinal]
    }

    /// Ordinals of the weight-`q` basic commutators.
    pub fn level(&self, q: usize) -> Range<usize> {
        self.levels.get(q).cloned().unwrap_or(0..0)
    }

    pub fn level_sizes(&self) -> Vec<usize> {
        (1..=self.max_weight).map(|q| self.level(q).len()).collect()
    }

    /// The commutator as a reduced word.
    pub fn word(&self, ordinal: usize) -> &Word {
        &self.words[ordinal]
    }

    pub fn leaf(&self, generator: u32) -> Option<usize> {
        (1..=self.rank).contains(&generator).then(|| generator as usize - 1)
    }

    /// Ordinal of `[left, right]` when that bracket is basic.
    pub fn pair(&self, left: usize, right: usize) -> Option<usize> {
        self.by_pair.get(&(left, right)).copied()
    }

    /// Bracket notation such as `[[x2,x1],x1]`.
    pub fn expr(&self, ordinal: usize) -> String {
        match self.elements[ordinal].shape {
            Shape::Leaf(g) => format!("x{g}"),
            Shape::Pair { left, right } => format!("[{},{}]", self.expr(left), self.expr(right)),
        }
    }

    /// Parses bracket notation over `x1..xm` into a basic commutator.
    /// Left-normed brackets `[a,b,c]` are accepted.
    pub fn parse_commutator(&self, text: &str) -> Result<usize, LcsError> {
        let bytes: Vec<u8> = text.bytes().filter(|b| !b.is_ascii_whitespace()).collect();
        let mut pos = 0;
        let ord = self.parse_node(&bytes, &mut pos, text)?;
        if pos != bytes.len() {
            return Err(LcsError::BadCommutator(text.to_string()));
        }
        Ok(ord)
    }

    fn parse_node(&self, b: &[u8], pos: &mut usize, text: &str) -> Result<usize, LcsError> {
        let bad = || LcsError::BadCommutator(text.to_string());
        match b.get(*pos) {
            Some(b'[') => {
                *pos += 1;
                let mut acc = self.parse_node(b, pos, text)?;
                let mut args = 1;
                while b.get(*pos) == Some(&b',') {
                    *pos += 1;
                    let rhs = self.parse_node(b, pos, text)?;
                    acc = self.pair(acc, rhs).ok_or_else(|| LcsError::NotBasic(text.to_string()))?;
                    args += 1;
                }
                if b.get(*pos) != Some(&b']') || args < 2 {
                    return Err(bad());
                }
                *pos += 1;
                Ok(acc)
            }
            Some(b'x') => {
                *pos += 1;
                let start = *pos;
                while b.get(*pos).is_some_and(u8::is_ascii_digit) {
                    *pos += 1;
                }
                let g: u32 = std::str::from_utf8(&b[start..*pos])
                    .ok()
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(bad)?;
                self.leaf(g).ok_or_else(bad)
            }
            _ => Err(bad()),
        }
    }

    pub(crate) fn solver(&self, q: usize) -> &LevelSolver {
        self.solvers[q].get_or_init(|| LevelSolver::new(self, q))
    }
}

/// Solves for weight-`q` coordinates from the degree-`q` Magnus component.
///
/// The degree-`q` parts of the basic commutators of weight `q` are linearly
/// independent; `rows` picks a square invertible minor and `inverse` is its
/// inverse.
#[derive(Clone)]
pub(crate) struct LevelSolver {
    columns: Vec<Vec<BigInt>>,
    rows: Vec<usize>,
    inverse: Matrix<Rational>,
}

impl LevelSolver {
    fn new(basis: &HallBasis, q: usize) -> Self {
        let columns: Vec<Vec<BigInt>> = basis
            .level(q)
            .map(|o| magnus_expand(basis.word(o), q).homogeneous(q).to_vec())
            .collect();
        let n = columns.len();
        if n == 0 {
            return LevelSolver {
                columns,
                rows: Vec::new(),
                inverse: Matrix::zeros(0, 0),
            };
        }
        let len = columns[0].len();
        let mut t = Matrix::from_vec(
            n,
            len,
            columns
                .iter()
                .flat_map(|c| c.iter().map(|x| Rational::from_integer(x.clone())))
                .collect(),
        )
        .expect("shape");
        let rows = t.rref();
        assert_eq!(rows.len(), n, "weight-{q} Lie elements must be independent");
        let square = Matrix::from_vec(
            n,
            n,
            rows.iter()
                .flat_map(|&r| columns.iter().map(move |c| Rational::from_integer(c[r].clone())))
                .collect(),
        )
        .expect("shape");
        let inverse = square.inverse().expect("invertible minor");
        LevelSolver {
            columns,
            rows,
            inverse,
        }
    }

    /// Integer coordinates of `target` on the level, or `None` if `target`
    /// is not an integral combination of the columns.
    pub(crate) fn solve(&self, target: &[BigInt]) -> Option<Vec<BigInt>> {
        let n = self.columns.len();
        if n == 0 {
            return target.iter().all(Zero::is_zero).then(Vec::new);
        }
        let mut coords = Vec::with_capacity(n);
        for i in 0..n {
            let mut acc = Rational::zero();
            for (j, &r) in self.rows.iter().enumerate() {
                if !target[r].is_zero() {
                    acc += self.inverse[(i, j)].clone() * Rational::from_integer(target[r].clone());
                }
            }
            if !acc.is_integer() {
                return None;
            }
            coords.push(acc.to_integer());
        }
        for (k, t) in target.iter().enumerate() {
            let s: BigInt = coords
                .iter()
                .zip(&self.columns)
                .filter(|(c, _)| !c.is_zero())
                .map(|(c, col)| c * &col[k])
                .sum();
            if &s != t {
                return None;
            }
        }
        Some(coords)
    }
}

/// Witt's necklace count `(1/q) sum_{d|q} mu(d) m^{q/d}`: the rank of
/// `γ_q(F_m)/γ_{q+1}(F_m)`.
pub fn witt_count(m: u32, q: usize) -> usize {
    let mut total = BigInt::zero();
    for d in 1..=q {
        if q % d == 0 {
            let mu = mobius(d);
            if mu != 0 {
                total += BigInt::from(mu) * BigInt::from(m).pow((q / d) as u32);
            }
        }
    }
    (total / BigInt::from(q)).to_usize().expect("small count")
}

fn mobius(n: usize) -> i32 {
    let mut n = n;
    let mut sign = 1;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return 0;
            }
            sign = -sign;
        }
        p += 1;
    }
    if n > 1 {
        sign = -sign;
    }
    sign
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_levels() {
        let b = HallBasis::new(2, 3).unwrap();
        assert_eq!(b.level_sizes(), vec![2, 1, 2]);
        assert_eq!(b.expr(2), "[x2,x1]");
        assert_eq!(b.expr(3), "[[x2,x1],x1]");
        assert_eq!(b.expr(4), "[[x2,x1],x2]");
        let b = HallBasis::new(2, 6).unwrap();
        assert_eq!(b.level_sizes(), vec![2, 1, 2, 3, 6, 9]);
        let b = HallBasis::new(1, 2).unwrap();
        assert_eq!(b.level_sizes(), vec![1, 0]);
    }

    #[test]
    fn weight_bound_enforced() {
        assert!(matches!(
            HallBasis::new(2, 9),
            Err(LcsError::WeightOutOfRange { requested: 9, bound: 8 })
        ));
        assert!(HallBasis::with_bound(2, 9, 9).is_ok());
        assert!(matches!(HallBasis::new(0, 2), Err(LcsError::ZeroRank)));
    }

    #[test]
    fn defining_conditions_hold() {
        let b = HallBasis::new(3, 5).unwrap();
        for e in b.elements() {
            if let Shape::Pair { left, right } = e.shape {
                assert!(right < left);
                assert_eq!(e.weight, b.get(left).weight + b.get(right).weight);
                if let Shape::Pair { right: v, .. } = b.get(left).shape {
                    assert!(v <= right);
                }
            }
        }
        for w in b.elements().windows(2) {
            assert!(w[0].weight <= w[1].weight);
            assert_eq!(w[0].ordinal + 1, w[1].ordinal);
        }
    }

    #[test]
    fn parse_bracket_notation() {
        let b = HallBasis::new(2, 5).unwrap();
        let v = b.parse_commutator("[[x2,x1],x1]").unwrap();
        assert_eq!(b.expr(v), "[[x2,x1],x1]");
        let l = b.parse_commutator("[x2,x1,x1]").unwrap();
        assert_eq!(l, v);
        assert!(matches!(b.parse_commutator("[x1,x2]"), Err(LcsError::NotBasic(_))));
        assert!(b.parse_commutator("[x1").is_err());
    }

    #[test]
    fn witt_and_mobius() {
        assert_eq!(mobius(1), 1);
        assert_eq!(mobius(6), 1);
        assert_eq!(mobius(4), 0);
        assert_eq!(mobius(5), -1);
        let counts: Vec<usize> = (1..=6).map(|q| witt_count(2, q)).collect();
        assert_eq!(counts, vec![2, 1, 2, 3, 6, 9]);
        let counts: Vec<usize> = (1..=4).map(|q| witt_count(3, q)).collect();
        assert_eq!(counts, vec![3, 3, 8, 18]);
    }
}
