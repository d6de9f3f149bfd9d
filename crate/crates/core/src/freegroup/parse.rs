//! Text syntax for words.
//!
//! ```text
//! word  := item*
//! item  := atom ('^' int)?
//! atom  := name | '[' word (',' word)+ ']' | '(' word ')' | 'V(' int ',' int ';' name ',' name ')'
//! ```
//!
//! Brackets are left-normed commutators. `V(r,s;x,y)` expands to
//! `x y^{sr+1} x y^{sr+2} ... x y^{sr+s}`. Exponents accept `^-2` and `^{-2}`.

use super::{Word, WordError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown generator `{name}` at byte {pos}")]
    UnknownGenerator { name: String, pos: usize },
    #[error(transparent)]
    Word(#[from] WordError),
}

/// Parses `text` over the generator names `names` (`names[i]` is generator `i+1`).
pub fn parse_word(text: &str, names: &[impl AsRef<str>]) -> Result<Word, ParseError> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
        names,
    };
    let w = p.word()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(w)
}

/// Parses over the default names `x1..x{rank}`.
pub fn parse_word_default(text: &str, rank: u32) -> Result<Word, ParseError> {
    parse_word(text, &super::default_names(rank))
}

struct Parser<'a, S> {
    src: &'a [u8],
    pos: usize,
    names: &'a [S],
}

impl<S: AsRef<str>> Parser<'_, S> {
    fn rank(&self) -> u32 {
        self.names.len() as u32
    }

    fn err(&self, msg: &str) -> ParseError {
        ParseError::Syntax {
            pos: self.pos,
            msg: msg.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expect(&mut self, c: u8) -> Result<(), ParseError> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(&format!("expected `{}`", c as char)))
        }
    }

    fn word(&mut self) -> Result<Word, ParseError> {
        let mut acc = Word::identity(self.rank());
        while let Some(c) = self.peek() {
            if c == b',' || c == b']' || c == b')' || c == b';' {
                break;
            }
            let item = self.item()?;
            acc.mul_assign_unchecked(&item);
        }
        Ok(acc)
    }

    fn item(&mut self) -> Result<Word, ParseError> {
        let atom = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let braced = self.peek() == Some(b'{');
            if braced {
                self.pos += 1;
            }
            let e = self.int()?;
            if braced {
                self.expect(b'}')?;
            }
            if e == 0 {
                return Err(self.err("exponent must be nonzero"));
            }
            return Ok(atom.pow(e));
        }
        Ok(atom)
    }

    fn atom(&mut self) -> Result<Word, ParseError> {
        match self.peek() {
            Some(b'[') => {
                self.pos += 1;
                let mut args = vec![self.word()?];
                while self.peek() == Some(b',') {
                    self.pos += 1;
                    args.push(self.word()?);
                }
                self.expect(b']')?;
                if args.len() < 2 {
                    return Err(self.err("commutator needs at least two entries"));
                }
                Ok(Word::commutator(&args)?)
            }
            Some(b'(') => {
                self.pos += 1;
                let w = self.word()?;
                self.expect(b')')?;
                Ok(w)
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                let name = self.ident();
                if name == "V" && self.peek() == Some(b'(') && self.lookup("V").is_none() {
                    return self.v_macro();
                }
                let g = self.lookup(&name).ok_or(ParseError::UnknownGenerator {
                    name: name.clone(),
                    pos: start,
                })?;
                Ok(Word::generator(self.rank(), g)?)
            }
            Some(_) => Err(self.err("expected a generator, `[` or `(`")),
            None => Err(self.err("unexpected end of input")),
        }
    }

    // V(r,s;x,y)
    fn v_macro(&mut self) -> Result<Word, ParseError> {
        self.expect(b'(')?;
        let r = self.int()?;
        self.expect(b',')?;
        let s = self.int()?;
        self.expect(b';')?;
        let x = self.gen_name()?;
        self.expect(b',')?;
        let y = self.gen_name()?;
        self.expect(b')')?;
        if r < 0 || s < 1 {
            return Err(self.err("V(r,s;x,y) needs r >= 0 and s >= 1"));
        }
        Ok(Word::from_syllables(self.rank(), v_block(r, s, x, y))?)
    }

    fn gen_name(&mut self) -> Result<u32, ParseError> {
        self.skip_ws();
        let start = self.pos;
        let name = self.ident();
        self.lookup(&name)
            .ok_or(ParseError::UnknownGenerator { name, pos: start })
    }

    fn ident(&mut self) -> String {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len()
            && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
        {
            self.pos += 1;
        }
        String::from_utf8_lossy(&self.src[start..self.pos]).into_owned()
    }

    fn lookup(&self, name: &str) -> Option<u32> {
        self.names
            .iter()
            .position(|n| n.as_ref() == name)
            .map(|i| i as u32 + 1)
    }

    fn int(&mut self) -> Result<i64, ParseError> {
        self.skip_ws();
        let start = self.pos;
        if self.pos < self.src.len() && (self.src[self.pos] == b'-' || self.src[self.pos] == b'+') {
            self.pos += 1;
        }
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .ok()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| ParseError::Syntax {
                pos: start,
                msg: "expected an integer".into(),
            })
    }
}

/// Syllables of `V_r(x, y) = prod_{j=1}^{s} x y^{sr+j}`.
pub(crate) fn v_block(r: i64, s: i64, x: u32, y: u32) -> impl Iterator<Item = (u32, i64)> {
    (1..=s).flat_map(move |j| [(x, 1), (y, s * r + j)])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plain_tokens() {
        let w = parse_word_default("x1^-1 x2 x1 x2^3", 2).unwrap();
        assert_eq!(w.syllables(), &[(1, -1), (2, 1), (1, 1), (2, 3)]);
        let w = parse_word_default("x1^{-2}x2", 2).unwrap();
        assert_eq!(w.syllables(), &[(1, -2), (2, 1)]);
    }

    #[test]
    fn brackets_expand() {
        let w = parse_word_default("[x1,x2]", 2).unwrap();
        assert_eq!(w, Word::reduce(2, &[-1, -2, 1, 2]).unwrap());
        let w = parse_word_default("[x1, x2, x1]", 2).unwrap();
        assert_eq!(w.len(), 8);
        let w = parse_word_default("[x1^2, x2^2]^-1", 2).unwrap();
        assert_eq!(w.len(), 8);
        let w = parse_word_default("[[x2,x1],x1]", 2).unwrap();
        let inner = parse_word_default("[x2,x1]", 2).unwrap();
        let x1 = Word::generator(2, 1).unwrap();
        assert_eq!(w, Word::commutator(&[inner, x1]).unwrap());
    }

    #[test]
    fn v_macro_expands() {
        let names = ["x", "y"];
        let w = parse_word("V(1,3;x,y)", &names).unwrap();
        assert_eq!(
            w.syllables(),
            &[(1, 1), (2, 4), (1, 1), (2, 5), (1, 1), (2, 6)]
        );
        assert_eq!(parse_word("V(0,100;x,y)", &names).unwrap().len(), 5150);
    }

    #[test]
    fn errors() {
        assert!(matches!(
            parse_word_default("x3", 2),
            Err(ParseError::UnknownGenerator { .. })
        ));
        assert!(matches!(
            parse_word_default("[x1 x2", 2),
            Err(ParseError::Syntax { .. })
        ));
        assert!(parse_word_default("x1^0", 2).is_err());
        assert!(parse_word_default("", 2).unwrap().is_empty());
    }
}
