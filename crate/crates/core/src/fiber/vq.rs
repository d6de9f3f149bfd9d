//! The test sequence `V_q(x_1^n, ..., x_m^n)` and its certified growth in
//! `γ_β / γ_{β+1}`.

use num_bigint::BigInt;
use num_traits::{One, Pow, Zero};

use crate::freegroup::Word;
use crate::lcs::{HallBasis, LcsError, Shape};

use super::{FiberElement, FiberError, FiberGenerators};

/// `v = [b1, b2]` basic of weight `r`, the trailing count `q` and the
/// power `n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TestSequenceSpec {
    pub v: usize,
    pub b2: usize,
    pub r: usize,
    pub b2_weight: usize,
    pub q: u32,
    pub n: i64,
    v_word: Word,
    b2_word: Word,
}

impl TestSequenceSpec {
    /// Resolves `v` and `b2` in `basis` and checks that `b2` is the right
    /// factor of `v`.
    pub fn new(basis: &HallBasis, v: &str, b2: &str, q: u32, n: i64) -> Result<Self, FiberError> {
        let v_ord = basis.parse_commutator(v)?;
        let b2_ord = basis.parse_commutator(b2)?;
        Self::from_ordinals(basis, v_ord, b2_ord, q, n)
    }

    pub fn from_ordinals(basis: &HallBasis, v: usize, b2: usize, q: u32, n: i64) -> Result<Self, FiberError> {
        if n < 1 {
            return Err(FiberError::BadSpec(format!("n must be positive, got {n}")));
        }
        let c = basis.get(v);
        match c.shape {
            Shape::Pair { right, .. } if right == b2 => {}
            Shape::Pair { .. } => {
                return Err(FiberError::BadSpec(format!(
                    "{} is not the right factor of {}",
                    basis.expr(b2),
                    basis.expr(v)
                )))
            }
            Shape::Leaf(_) => {
                return Err(FiberError::BadSpec(format!("{} has weight 1", basis.expr(v))))
            }
        }
        Ok(TestSequenceSpec {
            v,
            b2,
            r: c.weight,
            b2_weight: basis.get(b2).weight,
            q,
            n,
            v_word: basis.word(v).clone(),
            b2_word: basis.word(b2).clone(),
        })
    }

    /// `β = r q + r + w(b2)`.
    pub fn beta(&self) -> usize {
        self.r * self.q as usize + self.r + self.b2_weight
    }

    /// `ε = 1 / (β - 1)`.
    pub fn epsilon(&self) -> f64 {
        1.0 / (self.beta() as f64 - 1.0)
    }

    pub fn with_n(&self, n: i64) -> Result<Self, FiberError> {
        if n < 1 {
            return Err(FiberError::BadSpec(format!("n must be positive, got {n}")));
        }
        Ok(TestSequenceSpec { n, ..self.clone() })
    }

    /// `V_q` evaluated at `x_i -> x_i^n`.
    pub fn word(&self) -> Result<Word, FiberError> {
        let v = self.v_word.substitute_powers(self.n)?;
        let b2 = self.b2_word.substitute_powers(self.n)?;
        let mut acc = v.commutator_with(&b2);
        for _ in 0..self.q {
            acc = acc.commutator_with(&v);
        }
        Ok(acc)
    }
}

/// `(1, V_q(x^n))`, without a witness.
pub fn build_vq(spec: &TestSequenceSpec) -> Result<FiberElement, FiberError> {
    let w = spec.word()?;
    Ok(FiberElement {
        left: Word::identity(w.rank()),
        right: w,
        witness: None,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    /// Ordinal of `V_q(x)` in the basis.
    pub ordinal: usize,
    pub beta: usize,
    /// The single nonzero coordinate of `V_q(x^n)`, equal to `n^β`.
    pub value: BigInt,
}

/// Locates `V_q(x)` as a basic commutator of weight `β` and checks that the
/// weight-`β` coordinates of `V_q(x^n)` are exactly `n^β` times its unit
/// vector.
pub fn coordinate_certificate(basis: &HallBasis, spec: &TestSequenceSpec) -> Result<Certificate, FiberError> {
    let beta = spec.beta();
    if beta > basis.max_weight() {
        return Err(LcsError::WeightOutOfRange {
            requested: beta,
            bound: basis.max_weight(),
        }
        .into());
    }
    let not_basic = || FiberError::BadSpec("V_q is not a basic commutator in this ordering".into());
    let mut ordinal = basis.pair(spec.v, spec.b2).ok_or_else(not_basic)?;
    for _ in 0..spec.q {
        ordinal = basis.pair(ordinal, spec.v).ok_or_else(not_basic)?;
    }
    let base = basis.abelian_coords(&spec.with_n(1)?.word()?, beta)?;
    let offset = ordinal - basis.level(beta).start;
    let unit_ok = base
        .entries
        .iter()
        .enumerate()
        .all(|(i, c)| if i == offset { c.is_one() } else { c.is_zero() });
    if !unit_ok {
        return Err(FiberError::Internal(format!(
            "coordinates of V_q(x) are not the unit vector at {}",
            basis.expr(ordinal)
        )));
    }
    let value: BigInt = Pow::pow(BigInt::from(spec.n), beta as u32);
    let scaled = basis.abelian_coords(&spec.word()?, beta)?;
    let scaled_ok = scaled
        .entries
        .iter()
        .enumerate()
        .all(|(i, c)| if i == offset { *c == value } else { c.is_zero() });
    if !scaled_ok {
        return Err(FiberError::Internal(format!(
            "coordinates of V_q(x^{}) are not n^β times the unit vector",
            spec.n
        )));
    }
    Ok(Certificate {
        ordinal,
        beta,
        value,
    })
}

/// An explicit witness for `(1, V_q(x^n))` over `gens`, or `None` when the
/// search for single-letter commutators inside `<<A>>` fails.
///
/// Uses `[u, t] = u^{-1} · t^{-1} u t` for `u ∈ N`, and for a commutator
/// of two words the expansions `[ab, c] = b^{-1}[a, c] b [b, c]` and
/// `[a, bc] = [a, c] c^{-1}[a, b] c` down to commutators of letters, each
/// matched against conjugates `z a^{±1} z^{-1}` with `|z| <= 2`.
pub fn vq_witness(
    basis: &HallBasis,
    gens: &FiberGenerators,
    spec: &TestSequenceSpec,
) -> Result<Option<Word>, FiberError> {
    if basis.rank() != gens.rank() {
        return Err(FiberError::BadSpec("basis and generators have different ranks".into()));
    }
    let letters = LetterCommutators::new(gens);
    let v = match shape_witness(basis, gens, &letters, spec.v, spec.n)? {
        Some(w) => w,
        None => return Ok(None),
    };
    let vn = spec.v_word.substitute_powers(spec.n)?;
    let b2n = spec.b2_word.substitute_powers(spec.n)?;
    let mut acc = commutator_with_ambient(gens, &v, &b2n)?;
    for _ in 0..spec.q {
        acc = commutator_with_ambient(gens, &acc, &vn)?;
    }
    Ok(Some(acc))
}

// witness of [u, t] from a witness U of (1, u): U^{-1} T^{-1} U T
fn commutator_with_ambient(gens: &FiberGenerators, u: &Word, t: &Word) -> Result<Word, FiberError> {
    let tw = gens.diagonal(t)?;
    Ok(u.inverse()
        .multiply(&tw.inverse())?
        .multiply(u)?
        .multiply(&tw)?)
}

// Witness for (1, c(x^n)) where c is a basic commutator of weight >= 2.
fn shape_witness(
    basis: &HallBasis,
    gens: &FiberGenerators,
    letters: &LetterCommutators,
    ordinal: usize,
    n: i64,
) -> Result<Option<Word>, FiberError> {
    let (left, right) = match basis.get(ordinal).shape {
        Shape::Pair { left, right } => (left, right),
        Shape::Leaf(_) => return Ok(None),
    };
    let lw = basis.word(left).substitute_powers(n)?;
    let rw = basis.word(right).substitute_powers(n)?;
    if basis.get(left).weight >= 2 {
        return Ok(match shape_witness(basis, gens, letters, left, n)? {
            Some(u) => Some(commutator_with_ambient(gens, &u, &rw)?),
            None => None,
        });
    }
    if basis.get(right).weight >= 2 {
        // [a, u] = [u, a]^{-1}
        return Ok(match shape_witness(basis, gens, letters, right, n)? {
            Some(u) => Some(commutator_with_ambient(gens, &u, &lw)?.inverse()),
            None => None,
        });
    }
    let a: Vec<i32> = lw.letters().collect();
    let b: Vec<i32> = rw.letters().collect();
    letters.expand(gens, &a, &b)
}

struct LetterCommutators {
    table: std::collections::HashMap<(i32, i32), Word>,
}

impl LetterCommutators {
    fn new(gens: &FiberGenerators) -> Self {
        let m = gens.rank();
        let mut table = std::collections::HashMap::new();
        let conjugators = crate::freegroup::ball(
            m,
            2,
            &(1..=m).map(|i| Word::generator(m, i).unwrap()).collect::<Vec<_>>(),
            usize::MAX,
        )
        .expect("rank is consistent");
        for (j, a) in gens.normal().iter().enumerate() {
            for e in [1i64, -1] {
                let ae = a.pow(e);
                for z in &conjugators {
                    let target = z.word.mul_unchecked(&ae).mul_unchecked(&z.word.inverse());
                    let letters: Vec<i32> = target.letters().collect();
                    if let Some(key) = letter_commutator(&letters) {
                        table.entry(key).or_insert_with(|| {
                            let zw = gens.diagonal(&z.word).unwrap();
                            zw.mul_unchecked(&gens.normal_letter(j + 1, e))
                                .mul_unchecked(&zw.inverse())
                        });
                    }
                }
            }
        }
        LetterCommutators { table }
    }

    fn get(&self, gens: &FiberGenerators, a: i32, b: i32) -> Option<Word> {
        if a == b || a == -b {
            return Some(Word::identity(gens.witness_rank()));
        }
        self.table.get(&(a, b)).cloned()
    }

    // Witness for [a, b] with a, b given as letter sequences.
    fn expand(&self, gens: &FiberGenerators, a: &[i32], b: &[i32]) -> Result<Option<Word>, FiberError> {
        if a.is_empty() || b.is_empty() {
            return Ok(Some(Word::identity(gens.witness_rank())));
        }
        if a.len() > 1 {
            // [a' l, c] = l^{-1} [a', c] l [l, c]
            let (head, last) = a.split_at(a.len() - 1);
            let (inner, tail) = match (self.expand(gens, head, b)?, self.expand(gens, last, b)?) {
                (Some(x), Some(y)) => (x, y),
                _ => return Ok(None),
            };
            let l = letter_word(gens, last[0]);
            return Ok(Some(l.inverse().mul_unchecked(&inner).mul_unchecked(&l).mul_unchecked(&tail)));
        }
        if b.len() > 1 {
            // [a, c' l] = [a, l] l^{-1} [a, c'] l
            let (head, last) = b.split_at(b.len() - 1);
            let (first, inner) = match (self.expand(gens, a, last)?, self.expand(gens, a, head)?) {
                (Some(x), Some(y)) => (x, y),
                _ => return Ok(None),
            };
            let l = letter_word(gens, last[0]);
            return Ok(Some(first.mul_unchecked(&l.inverse()).mul_unchecked(&inner).mul_unchecked(&l)));
        }
        Ok(self.get(gens, a[0], b[0]))
    }
}

fn letter_word(gens: &FiberGenerators, l: i32) -> Word {
    Word::reduce(gens.witness_rank(), &[l]).expect("letter in range")
}

// (a, b) when the letters spell [a, b] = a^{-1} b^{-1} a b for single letters
fn letter_commutator(w: &[i32]) -> Option<(i32, i32)> {
    match *w {
        [p, q, r, s] if r == -p && s == -q && p.abs() != q.abs() => Some((r, s)),
        _ => None,
    }
}
