//! Finite presentations, pieces and the C'(λ) condition, Dehn's algorithm,
//! the Rips construction with its fiber-product presentation, and exact
//! area at small caps.
//!
//! Presentation files look like
//!
//! ```text
//! gens: a b
//! rel: [a,b]
//! ```
//!
//! with one `rel:` line per relator in the word syntax of
//! [`parse_word`](crate::freegroup::parse_word). Blank lines and lines
//! starting with `#` are ignored.

mod area;
mod dehn;
mod pieces;
mod rips;

use std::collections::HashSet;
use std::fmt;

use thiserror::Error;

use crate::freegroup::{parse_word, ParseError, Word, WordError};

pub use area::{area, Area, DEFAULT_AREA_CAP};
pub use dehn::{dehn_reduce, DehnReducer};
pub use pieces::{check_metric, pieces, Occurrence, PieceReport, PieceWitness};
pub use rips::{fiber_presentation, rips_construct, ConjugationLetter, RelatorKind, RipsOutput, RipsRelator};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SmallCancError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: {source}")]
    Word {
        line: usize,
        #[source]
        source: ParseError,
    },
    #[error(transparent)]
    Rank(#[from] WordError),
    #[error("duplicate generator `{0}`")]
    DuplicateGenerator(String),
    #[error("invalid generator name `{0}`")]
    BadName(String),
    #[error("relator {index} is trivial after cyclic reduction")]
    EmptyRelator { index: usize },
    #[error("at most {max} generators are supported, got {got}")]
    TooManyGenerators { max: usize, got: usize },
    #[error("scale must be at least 2, got {0}")]
    BadScale(i64),
    #[error("generator name `{0}` clashes with the added generators")]
    NameClash(String),
    #[error(
        "output fails C'(1/6): worst piece ratio {} (maximal piece {}); retry with a larger scale",
        .report.worst_ratio, .report.max_piece
    )]
    MetricFailed {
        report: Box<PieceReport>,
        output: Box<RipsOutput>,
    },
    #[error("presentation does not satisfy C'(1/6): worst piece ratio {0}")]
    NotSmallCancellation(String),
    #[error("word has rank {got}, presentation has {expected} generators")]
    WordRank { expected: u32, got: u32 },
}

/// `<names | relators>` with every relator nonempty and cyclically reduced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Presentation {
    names: Vec<String>,
    relators: Vec<Word>,
}

/// Generators are mapped to single bytes in the suffix structures.
pub const MAX_GENERATORS: usize = 127;

fn valid_name(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl Presentation {
    pub fn new(names: Vec<String>, relators: Vec<Word>) -> Result<Self, SmallCancError> {
        if names.len() > MAX_GENERATORS {
            return Err(SmallCancError::TooManyGenerators {
                max: MAX_GENERATORS,
                got: names.len(),
            });
        }
        let mut seen = HashSet::new();
        for n in &names {
            if !valid_name(n) {
                return Err(SmallCancError::BadName(n.clone()));
            }
            if !seen.insert(n.as_str()) {
                return Err(SmallCancError::DuplicateGenerator(n.clone()));
            }
        }
        let rank = names.len() as u32;
        let mut out = Vec::with_capacity(relators.len());
        for (i, r) in relators.iter().enumerate() {
            if r.rank() != rank {
                return Err(WordError::RankMismatch(rank, r.rank()).into());
            }
            let c = r.cyclically_reduce();
            if c.is_empty() {
                return Err(SmallCancError::EmptyRelator { index: i + 1 });
            }
            out.push(c);
        }
        Ok(Presentation {
            names,
            relators: out,
        })
    }

    pub fn parse(text: &str) -> Result<Self, SmallCancError> {
        let mut names: Option<Vec<String>> = None;
        let mut relators = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let t = raw.trim();
            if t.is_empty() || t.starts_with('#') {
                continue;
            }
            let (key, rest) = t.split_once(':').ok_or_else(|| SmallCancError::Syntax {
                line,
                msg: "expected `gens:` or `rel:`".into(),
            })?;
            match key.trim() {
                "gens" => {
                    if names.is_some() {
                        return Err(SmallCancError::Syntax {
                            line,
                            msg: "repeated `gens:` line".into(),
                        });
                    }
                    names = Some(rest.split_whitespace().map(str::to_string).collect());
                }
                "rel" => {
                    let names = names.as_ref().ok_or_else(|| SmallCancError::Syntax {
                        line,
                        msg: "`rel:` before `gens:`".into(),
                    })?;
                    let w = parse_word(rest, names)
                        .map_err(|source| SmallCancError::Word { line, source })?;
                    relators.push(w);
                }
                other => {
                    return Err(SmallCancError::Syntax {
                        line,
                        msg: format!("unknown key `{other}`"),
                    })
                }
            }
        }
        let names = names.ok_or(SmallCancError::Syntax {
            line: 0,
            msg: "missing `gens:` line".into(),
        })?;
        Self::new(names, relators)
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn rank(&self) -> u32 {
        self.names.len() as u32
    }

    pub fn relators(&self) -> &[Word] {
        &self.relators
    }

    /// Total relator length.
    pub fn total_length(&self) -> usize {
        self.relators.iter().map(Word::len).sum()
    }

    pub fn parse_word(&self, text: &str) -> Result<Word, SmallCancError> {
        parse_word(text, &self.names).map_err(|source| SmallCancError::Word { line: 0, source })
    }

    pub fn display_word(&self, w: &Word) -> String {
        w.display_with(&self.names)
    }

    /// The file form accepted by [`Presentation::parse`].
    pub fn to_text(&self) -> String {
        let mut s = format!("gens: {}\n", self.names.join(" "));
        for r in &self.relators {
            s.push_str("rel: ");
            s.push_str(&self.display_word(r));
            s.push('\n');
        }
        s
    }

    pub(crate) fn check_word(&self, w: &Word) -> Result<(), SmallCancError> {
        if w.rank() != self.rank() {
            return Err(SmallCancError::WordRank {
                expected: self.rank(),
                got: w.rank(),
            });
        }
        Ok(())
    }
}

impl fmt::Display for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rels: Vec<String> = self.relators.iter().map(|r| self.display_word(r)).collect();
        write!(f, "<{} | {}>", self.names.join(", "), rels.join(", "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_examples() {
        let p = Presentation::parse("gens: a b\nrel: [a,b]").unwrap();
        assert_eq!(p.rank(), 2);
        assert_eq!(p.relators()[0], Word::reduce(2, &[-1, -2, 1, 2]).unwrap());
        let p = Presentation::parse("gens: a\nrel: a^3").unwrap();
        assert_eq!(p.relators()[0].syllables(), &[(1, 3)]);
        let p = Presentation::parse("# torus\ngens: a b\n\nrel: b a b^-1 a^-1 b^-1 b").unwrap();
        assert_eq!(p.relators()[0].len(), 4);
        assert_eq!(p.to_string(), "<a, b | b a b^-1 a^-1>");
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(
            Presentation::parse("gens: a b\nrel: c"),
            Err(SmallCancError::Word {
                line: 2,
                source: ParseError::UnknownGenerator { .. }
            })
        ));
        assert!(matches!(
            Presentation::parse("gens: a a"),
            Err(SmallCancError::DuplicateGenerator(_))
        ));
        assert!(matches!(
            Presentation::parse("gens: a\nrel: a a^-1"),
            Err(SmallCancError::EmptyRelator { index: 1 })
        ));
        assert!(matches!(
            Presentation::parse("rel: a"),
            Err(SmallCancError::Syntax { line: 1, .. })
        ));
        assert!(matches!(
            Presentation::parse("gens: a\nrel: [a,"),
            Err(SmallCancError::Word { line: 2, .. })
        ));
    }

    #[test]
    fn round_trip() {
        let p = Presentation::parse("gens: a b x y\nrel: [a,b] V(0,3;x,y)\nrel: a x a^-1 V(1,3;x,y)")
            .unwrap();
        assert_eq!(Presentation::parse(&p.to_text()).unwrap(), p);
    }
}
