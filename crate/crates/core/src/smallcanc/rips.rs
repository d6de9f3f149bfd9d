//! The Rips construction with disjoint `V`-blocks, and the presentation of
//! its fiber product over the normal subgroup `<x, y>`.

use num_bigint::BigInt;

use crate::freegroup::{v_block, Word};
use crate::Rational;

use super::pieces::check_metric;
use super::{Presentation, SmallCancError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConjugationLetter {
    X,
    Y,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RelatorKind {
    /// `R_j V_{j-1}(x, y)` for input relator `input` (0-based).
    Mixed { input: usize, word: Word },
    /// `a_i^{sign} t a_i^{-sign} V_k(x, y)` with `t` the given letter.
    Conjugation {
        generator: u32,
        letter: ConjugationLetter,
        sign: i64,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RipsRelator {
    pub kind: RelatorKind,
    pub v_index: i64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RipsOutput {
    pub presentation: Presentation,
    pub scale: i64,
    /// One entry per relator of `presentation`, in order.
    pub relators: Vec<RipsRelator>,
    /// Number of generators of the input.
    pub input_rank: u32,
}

impl RipsOutput {
    /// Inclusive range of `y`-exponents used by `V_r`.
    pub fn exponent_range(&self, r: i64) -> (i64, i64) {
        (self.scale * r + 1, self.scale * r + self.scale)
    }

    /// Checks that the `V`-blocks of distinct relators use disjoint
    /// exponent ranges.
    pub fn blocks_disjoint(&self) -> bool {
        let mut ranges: Vec<(i64, i64)> = self
            .relators
            .iter()
            .map(|r| self.exponent_range(r.v_index))
            .collect();
        ranges.sort();
        ranges.windows(2).all(|w| w[0].1 < w[1].0)
    }

    fn x(&self) -> u32 {
        self.input_rank + 1
    }

    fn y(&self) -> u32 {
        self.input_rank + 2
    }
}

fn v_word(rank: u32, r: i64, s: i64, x: u32, y: u32) -> Word {
    Word::from_syllables(rank, v_block(r, s, x, y)).expect("generators in range")
}

fn conjugation(rank: u32, a: u32, sign: i64, t: u32) -> Word {
    Word::from_syllables(rank, [(a, sign), (t, 1), (a, -sign)]).expect("generators in range")
}

/// Rips construction on `q` at scale `s`.
///
/// Generators are those of `q` followed by `x, y`. Relators are
/// `R_j V_{j-1}(x, y)` for the relators of `q`, then for `t = x, y` and each
/// generator `a_i`, `a_i t a_i^{-1} V_k` and `a_i^{-1} t a_i V_{k+1}` with
/// consecutive indices `k`. The result is checked for C'(1/6); on failure
/// the error carries both the output and the piece report.
pub fn rips_construct(q: &Presentation, s: i64) -> Result<RipsOutput, SmallCancError> {
    if s < 2 {
        return Err(SmallCancError::BadScale(s));
    }
    for n in q.names() {
        if n == "x" || n == "y" {
            return Err(SmallCancError::NameClash(n.clone()));
        }
    }
    let m = q.rank();
    let rank = m + 2;
    let (x, y) = (m + 1, m + 2);
    let mut words = Vec::new();
    let mut relators = Vec::new();
    let mut k = 0i64;
    for (j, r) in q.relators().iter().enumerate() {
        let lifted = r.with_rank(rank)?;
        words.push(lifted.mul_unchecked(&v_word(rank, k, s, x, y)));
        relators.push(RipsRelator {
            kind: RelatorKind::Mixed {
                input: j,
                word: r.clone(),
            },
            v_index: k,
        });
        k += 1;
    }
    for (letter, t) in [(ConjugationLetter::X, x), (ConjugationLetter::Y, y)] {
        for a in 1..=m {
            for sign in [1i64, -1] {
                words.push(conjugation(rank, a, sign, t).mul_unchecked(&v_word(rank, k, s, x, y)));
                relators.push(RipsRelator {
                    kind: RelatorKind::Conjugation {
                        generator: a,
                        letter,
                        sign,
                    },
                    v_index: k,
                });
                k += 1;
            }
        }
    }
    let mut names = q.names().to_vec();
    names.push("x".into());
    names.push("y".into());
    let output = RipsOutput {
        presentation: Presentation::new(names, words)?,
        scale: s,
        relators,
        input_rank: m,
    };
    debug_assert!(output.blocks_disjoint());
    let sixth = Rational::new(BigInt::from(1), BigInt::from(6));
    let (ok, report) = check_metric(&output.presentation, &sixth);
    if ok {
        Ok(output)
    } else {
        Err(SmallCancError::MetricFailed {
            report: Box::new(report),
            output: Box::new(output),
        })
    }
}

/// Presentation of the fiber product of the Rips group over `<x, y>`.
///
/// Generators are `a_1..a_m, x_L, y_L, x_R, y_R`, standing for `(a_i, a_i)`,
/// `(x, 1)`, `(y, 1)`, `(1, x)`, `(1, y)`. Relators, in order: the mixed
/// relators `R_j V(x_L, y_L) V(x_R, y_R)`; the four commutators
/// `[x_L, x_R], [x_L, y_R], [y_L, x_R], [y_L, y_R]`; then for each `a_i`, each
/// of `x, y` and each sign, the `L` copy of the conjugation relator followed
/// by its `R` copy. No relators from the second homotopy of the input are
/// added, which is correct when that module is trivial (as for the standard
/// presentation of `Z^2`).
pub fn fiber_presentation(rips: &RipsOutput) -> Result<Presentation, SmallCancError> {
    let m = rips.input_rank;
    let rank = m + 4;
    let (xl, yl, xr, yr) = (m + 1, m + 2, m + 3, m + 4);
    let s = rips.scale;
    let gen = |i: u32| Word::generator(rank, i).expect("generator in range");
    let mut words = Vec::new();
    for r in &rips.relators {
        if let RelatorKind::Mixed { word, .. } = &r.kind {
            let w = word
                .with_rank(rank)?
                .mul_unchecked(&v_word(rank, r.v_index, s, xl, yl))
                .mul_unchecked(&v_word(rank, r.v_index, s, xr, yr));
            words.push(w);
        }
    }
    for (a, b) in [(xl, xr), (xl, yr), (yl, xr), (yl, yr)] {
        words.push(gen(a).commutator_with(&gen(b)));
    }
    for a in 1..=m {
        for letter in [ConjugationLetter::X, ConjugationLetter::Y] {
            for sign in [1i64, -1] {
                let r = rips
                    .relators
                    .iter()
                    .find(|r| {
                        r.kind
                            == RelatorKind::Conjugation {
                                generator: a,
                                letter,
                                sign,
                            }
                    })
                    .expect("every conjugation relator is present");
                for (tx, ty) in [(xl, yl), (xr, yr)] {
                    let t = if letter == ConjugationLetter::X { tx } else { ty };
                    words.push(
                        conjugation(rank, a, sign, t).mul_unchecked(&v_word(rank, r.v_index, s, tx, ty)),
                    );
                }
            }
        }
    }
    let mut names: Vec<String> = rips.presentation.names()[..m as usize].to_vec();
    let (x, y) = (
        &rips.presentation.names()[rips.x() as usize - 1],
        &rips.presentation.names()[rips.y() as usize - 1],
    );
    for n in [format!("{x}_L"), format!("{y}_L"), format!("{x}_R"), format!("{y}_R")] {
        if names.contains(&n) {
            return Err(SmallCancError::NameClash(n));
        }
        names.push(n);
    }
    Presentation::new(names, words)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z2() -> Presentation {
        Presentation::parse("gens: a b\nrel: [a,b]").unwrap()
    }

    #[test]
    fn gamma_relators_follow_the_example() {
        let out = rips_construct(&z2(), 100).unwrap();
        let p = &out.presentation;
        assert_eq!(p.names(), ["a", "b", "x", "y"]);
        let expected = [
            "[a,b] V(0,100;x,y)",
            "a x a^-1 V(1,100;x,y)",
            "a^-1 x a V(2,100;x,y)",
            "b x b^-1 V(3,100;x,y)",
            "b^-1 x b V(4,100;x,y)",
            "a y a^-1 V(5,100;x,y)",
            "a^-1 y a V(6,100;x,y)",
            "b y b^-1 V(7,100;x,y)",
            "b^-1 y b V(8,100;x,y)",
        ];
        assert_eq!(p.relators().len(), 9);
        for (r, e) in p.relators().iter().zip(expected) {
            assert_eq!(*r, p.parse_word(e).unwrap(), "{e}");
        }
        assert_eq!(p.relators()[0].len(), 5154);
        assert!(out.blocks_disjoint());
    }

    #[test]
    fn degenerate_input_fails_the_metric() {
        let q = Presentation::parse("gens: a").unwrap();
        let err = rips_construct(&q, 2).unwrap_err();
        let SmallCancError::MetricFailed { output, .. } = err else {
            panic!("expected a metric failure")
        };
        assert_eq!(output.relators.len(), 4);
        let idx: Vec<i64> = output.relators.iter().map(|r| r.v_index).collect();
        assert_eq!(idx, [0, 1, 2, 3]);
        assert!(output.blocks_disjoint());
    }

    #[test]
    fn counts() {
        let q = Presentation::parse("gens: a b c\nrel: [a,b]\nrel: [b,c]").unwrap();
        let out = match rips_construct(&q, 40) {
            Ok(o) => o,
            Err(SmallCancError::MetricFailed { output, .. }) => *output,
            Err(e) => panic!("{e}"),
        };
        let fp = fiber_presentation(&out).unwrap();
        assert_eq!(fp.relators().len(), 2 + 4 + 8 * 3);
        assert_eq!(fp.rank(), 3 + 4);
        assert!(matches!(rips_construct(&z2(), 1), Err(SmallCancError::BadScale(1))));
    }
}
