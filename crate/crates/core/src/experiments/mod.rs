//! Representations of fiber products by exact matrices and the experiment
//! runners that compare Cartan-projection growth with word length.
//!
//! A [`RepSpec`] describes a representation; [`Rep::build`] turns it into an
//! evaluator on pairs `(left, right)` of free-group words, and
//! [`RipsRep::build`] into one on pairs of words in a Rips group, after
//! checking every relator.

mod runners;
mod sample;

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::cartan::{algebra_closure, CartanError, Place};
use crate::fiber::{FiberElement, FiberError};
use crate::freegroup::{Word, WordError};
use crate::lcs::{HallBasis, LcsError};
use crate::linalg::MatrixError;
use crate::smallcanc::{Presentation, SmallCancError};
use crate::{ExactMatrix, Rational};

pub use runners::{
    experiment_commutator_bound, experiment_qie, experiment_rips, experiment_semisimple, fit_loglog_slope,
    BudgetStat, CommutatorConfig, EnvelopeReport, ExperimentRow, QieConfig, QieReport, RipsConfig, RipsReport,
    RipsRow, SemisimpleConfig, BOUNDED_GROWTH, CSV_HEADER,
};
pub use sample::random_word;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Cartan(#[from] CartanError),
    #[error(transparent)]
    Fiber(#[from] FiberError),
    #[error(transparent)]
    Lcs(#[from] LcsError),
    #[error(transparent)]
    Word(#[from] WordError),
    #[error(transparent)]
    SmallCanc(#[from] SmallCancError),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error("invalid representation: {0}")]
    BadRep(String),
    #[error("relator {relator} does not map to the identity")]
    NotHomomorphism { relator: usize },
    #[error("{0} is only defined on the fiber product over γ_2 and does not extend to this group")]
    NotExtendable(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("coordinate {got} differs from n^β = {expected}")]
    Coordinate { got: BigInt, expected: BigInt },
}

#[derive(Debug, Clone, PartialEq)]
pub enum RepKind {
    /// `(g, h) -> left(g) ⊗ right(h)`, one matrix per generator in each
    /// factor.
    Tensor {
        left: Vec<ExactMatrix>,
        right: Vec<ExactMatrix>,
    },
    DirectSum(Vec<RepKind>),
    /// `(γ, γw) -> diag(λ, 1/λ)^{c(w)}` with `c(w)` the `[x2,x1]`
    /// coordinate of `w` in `γ_2 / γ_3`.
    PiLambda(Rational),
    /// `(γ, γw) -> [[1, c(w)], [0, 1]]`.
    PiUnipotent,
}

impl RepKind {
    pub fn dimension(&self) -> usize {
        match self {
            RepKind::Tensor { left, right } => {
                left.first().map_or(1, |m| m.rows()) * right.first().map_or(1, |m| m.rows())
            }
            RepKind::DirectSum(parts) => parts.iter().map(RepKind::dimension).sum(),
            RepKind::PiLambda(_) | RepKind::PiUnipotent => 2,
        }
    }

    fn name(&self) -> String {
        match self {
            RepKind::Tensor { .. } => format!("tensor(d={})", self.dimension()),
            RepKind::DirectSum(parts) => {
                parts.iter().map(RepKind::name).collect::<Vec<_>>().join("+")
            }
            RepKind::PiLambda(l) => format!("pilambda({l})"),
            RepKind::PiUnipotent => "piunipotent".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RepSpec {
    pub kind: RepKind,
    pub place: Place,
}

impl RepSpec {
    pub fn new(kind: RepKind, place: Place) -> Self {
        RepSpec { kind, place }
    }

    pub fn dimension(&self) -> usize {
        self.kind.dimension()
    }
}

impl fmt::Display for RepSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@{}", self.kind.name(), self.place)
    }
}

fn q(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

fn mat(rows: &[&[Rational]]) -> ExactMatrix {
    ExactMatrix::from_rows(rows.iter().map(|r| r.to_vec()).collect()).expect("rectangular")
}

/// The faithful Sanov pair `[[1,2],[0,1]], [[1,0],[2,1]]`.
pub fn sanov() -> Vec<ExactMatrix> {
    vec![
        mat(&[&[q(1), q(2)], &[q(0), q(1)]]),
        mat(&[&[q(1), q(0)], &[q(2), q(1)]]),
    ]
}

/// `[[1,1],[0,1]], [[1,0],[1/p,1]]`: unipotent generators of a free group
/// whose image is unbounded in `SL_2(Q_p)`.
pub fn p_free(p: u64) -> Vec<ExactMatrix> {
    let inv_p = Rational::new(BigInt::one(), BigInt::from(p));
    vec![
        mat(&[&[q(1), q(1)], &[q(0), q(1)]]),
        mat(&[&[q(1), q(0)], &[inv_p, q(1)]]),
    ]
}

/// Parses a representation description over generators `names`.
///
/// Accepted forms, joined by `+` for direct sums: `trivial`, `sanov`,
/// `pfree:<p>`, `pilambda:<λ>`, `piunipotent`, `abelian:<p>` (Rips groups:
/// `a_i -> diag` of powers of `p`, `x, y -> 1`), or the contents of a
/// tensor file with lines `left <gen>: <row>; <row>` and
/// `right <gen>: ...`.
pub fn parse_rep(text: &str, names: &[String], place: Place) -> Result<RepSpec, ExperimentError> {
    let kind = if text.lines().count() > 1 || text.trim_start().starts_with("left") {
        parse_tensor_file(text, names)?
    } else {
        let parts = text
            .split('+')
            .map(|p| parse_builtin(p.trim(), names))
            .collect::<Result<Vec<_>, _>>()?;
        if parts.len() == 1 {
            parts.into_iter().next().expect("one part")
        } else {
            RepKind::DirectSum(parts)
        }
    };
    Ok(RepSpec::new(kind, place))
}

fn parse_builtin(text: &str, names: &[String]) -> Result<RepKind, ExperimentError> {
    let m = names.len();
    let (head, arg) = text.split_once(':').unwrap_or((text, ""));
    let bad = |msg: &str| ExperimentError::BadRep(format!("`{text}`: {msg}"));
    let prime = || -> Result<u64, ExperimentError> {
        let p: u64 = arg.parse().map_err(|_| bad("expected a prime"))?;
        Place::padic(p)?;
        Ok(p)
    };
    match head {
        "trivial" => Ok(RepKind::Tensor {
            left: vec![ExactMatrix::identity(1); m],
            right: vec![ExactMatrix::identity(1); m],
        }),
        "sanov" | "pfree" => {
            if m != 2 {
                return Err(bad("defined for two generators"));
            }
            let f = if head == "sanov" { sanov() } else { p_free(prime()?) };
            Ok(RepKind::Tensor {
                left: f.clone(),
                right: f,
            })
        }
        "abelian" => {
            // `a_1 -> diag(p, 1)`, `a_2 -> diag(1, p)`, ...; the last two
            // generators (`x`, `y`) go to the identity
            if m < 3 {
                return Err(bad("needs a Rips presentation"));
            }
            let p = q(prime()? as i64);
            let images: Vec<ExactMatrix> = (0..m)
                .map(|i| {
                    if i + 2 >= m {
                        ExactMatrix::identity(2)
                    } else if i % 2 == 0 {
                        ExactMatrix::from_diag(vec![p.clone(), q(1)])
                    } else {
                        ExactMatrix::from_diag(vec![q(1), p.clone()])
                    }
                })
                .collect();
            Ok(RepKind::Tensor {
                left: images.clone(),
                right: images,
            })
        }
        "pilambda" => {
            let l = Rational::from_str(arg).map_err(|_| bad("expected a rational λ"))?;
            Ok(RepKind::PiLambda(l))
        }
        "piunipotent" => Ok(RepKind::PiUnipotent),
        _ => Err(bad("unknown representation")),
    }
}

fn parse_tensor_file(text: &str, names: &[String]) -> Result<RepKind, ExperimentError> {
    let m = names.len();
    let mut left: Vec<Option<ExactMatrix>> = vec![None; m];
    let mut right: Vec<Option<ExactMatrix>> = vec![None; m];
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = |msg: &str| ExperimentError::BadRep(format!("line {}: {msg}", i + 1));
        let (head, body) = line.split_once(':').ok_or_else(|| bad("expected `side gen: rows`"))?;
        let mut h = head.split_whitespace();
        let (Some(side), Some(gen), None) = (h.next(), h.next(), h.next()) else {
            return Err(bad("expected `left <gen>` or `right <gen>`"));
        };
        let g = names
            .iter()
            .position(|n| n == gen)
            .ok_or_else(|| bad(&format!("unknown generator `{gen}`")))?;
        let rows = body
            .split(';')
            .map(|r| {
                r.split_whitespace()
                    .map(|e| Rational::from_str(e).map_err(|_| bad(&format!("bad entry `{e}`"))))
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        let m = ExactMatrix::from_rows(rows).map_err(|e| bad(&e.to_string()))?;
        let slot = match side {
            "left" => &mut left[g],
            "right" => &mut right[g],
            _ => return Err(bad("side must be `left` or `right`")),
        };
        *slot = Some(m);
    }
    let collect = |v: Vec<Option<ExactMatrix>>, side: &str| {
        v.into_iter()
            .enumerate()
            .map(|(i, m)| m.ok_or_else(|| ExperimentError::BadRep(format!("no {side} matrix for `{}`", names[i]))))
            .collect::<Result<Vec<_>, _>>()
    };
    Ok(RepKind::Tensor {
        left: collect(left, "left")?,
        right: collect(right, "right")?,
    })
}

/// Generator images with cached inverses.
#[derive(Debug, Clone)]
struct Factor {
    images: Vec<ExactMatrix>,
    inverses: Vec<ExactMatrix>,
    dim: usize,
}

impl Factor {
    fn new(images: &[ExactMatrix], rank: u32) -> Result<Self, ExperimentError> {
        if images.len() != rank as usize {
            return Err(ExperimentError::BadRep(format!(
                "{} matrices for {rank} generators",
                images.len()
            )));
        }
        let dim = images.first().map_or(1, |m| m.rows());
        if images.iter().any(|m| m.rows() != dim || m.cols() != dim) {
            return Err(ExperimentError::BadRep("matrices must be square of one size".into()));
        }
        let inverses = images
            .iter()
            .map(|m| m.inverse().map_err(|_| ExperimentError::BadRep("singular generator image".into())))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Factor {
            images: images.to_vec(),
            inverses,
            dim,
        })
    }

    fn eval(&self, w: &Word) -> ExactMatrix {
        let mut acc = ExactMatrix::identity(self.dim);
        for &(g, e) in w.syllables() {
            let base = if e > 0 {
                &self.images[g as usize - 1]
            } else {
                &self.inverses[g as usize - 1]
            };
            acc = &acc * &base.pow(e.abs()).expect("square");
        }
        acc
    }

    /// Certifies absolute irreducibility: the images span the full matrix
    /// algebra.
    fn spanning(&self) -> Result<bool, ExperimentError> {
        let (dim, _) = algebra_closure(&self.images)?;
        Ok(dim == self.dim * self.dim)
    }
}

#[derive(Debug, Clone)]
enum Node {
    Tensor(Factor, Factor),
    Sum(Vec<Node>),
    Coordinate { lambda: Option<Rational> },
}

/// Evaluator of a [`RepSpec`] on `F_m × F_m` (or on `Δ` for the `π`
/// kinds).
#[derive(Debug, Clone)]
pub struct Rep {
    spec: RepSpec,
    rank: u32,
    root: Node,
    basis: Option<(HallBasis, usize)>,
}

impl Rep {
    pub fn build(spec: &RepSpec, rank: u32) -> Result<Self, ExperimentError> {
        let root = Self::node(&spec.kind, rank)?;
        let basis = if contains_coordinate(&spec.kind) {
            if rank < 2 {
                return Err(ExperimentError::BadRep("π reps need at least two generators".into()));
            }
            let b = HallBasis::new(rank, 2)?;
            let ord = b
                .pair(b.leaf(2).expect("leaf"), b.leaf(1).expect("leaf"))
                .ok_or_else(|| ExperimentError::BadRep("[x2,x1] missing from the basis".into()))?;
            let idx = ord - b.level(2).start;
            Some((b, idx))
        } else {
            None
        };
        Ok(Rep {
            spec: spec.clone(),
            rank,
            root,
            basis,
        })
    }

    fn node(kind: &RepKind, rank: u32) -> Result<Node, ExperimentError> {
        Ok(match kind {
            RepKind::Tensor { left, right } => Node::Tensor(Factor::new(left, rank)?, Factor::new(right, rank)?),
            RepKind::DirectSum(parts) => Node::Sum(
                parts
                    .iter()
                    .map(|p| Self::node(p, rank))
                    .collect::<Result<_, _>>()?,
            ),
            RepKind::PiLambda(l) => {
                if l.is_zero() {
                    return Err(ExperimentError::BadRep("λ must be nonzero".into()));
                }
                Node::Coordinate {
                    lambda: Some(l.clone()),
                }
            }
            RepKind::PiUnipotent => Node::Coordinate { lambda: None },
        })
    }

    pub fn spec(&self) -> &RepSpec {
        &self.spec
    }

    pub fn place(&self) -> Place {
        self.spec.place
    }

    pub fn dimension(&self) -> usize {
        self.spec.dimension()
    }

    /// `c(w)`: the `[x2,x1]` coordinate of `left^{-1} right` in `γ_2/γ_3`.
    fn coordinate(&self, left: &Word, right: &Word) -> Result<BigInt, ExperimentError> {
        let (basis, idx) = self.basis.as_ref().expect("built with a basis");
        let w = left.inverse().multiply(right)?;
        let c = basis.abelian_coords(&w, 2).map_err(|e| match e {
            LcsError::NotInGamma { .. } => ExperimentError::Precondition(
                "π reps are defined on pairs (γ, γw) with w in γ_2".into(),
            ),
            e => e.into(),
        })?;
        Ok(c.entries[*idx].clone())
    }

    fn eval_node(&self, node: &Node, left: &Word, right: &Word) -> Result<ExactMatrix, ExperimentError> {
        Ok(match node {
            Node::Tensor(a, b) => a.eval(left).kron(&b.eval(right)),
            Node::Sum(parts) => ExactMatrix::block_diag(
                &parts
                    .iter()
                    .map(|p| self.eval_node(p, left, right))
                    .collect::<Result<Vec<_>, _>>()?,
            ),
            Node::Coordinate { lambda } => {
                let c = self.coordinate(left, right)?;
                match lambda {
                    Some(l) => {
                        let e: i64 = c.try_into().map_err(|_| {
                            ExperimentError::Precondition("coordinate exceeds a machine word".into())
                        })?;
                        let d = ExactMatrix::from_diag(vec![l.clone(), l.recip()]);
                        d.pow(e)?
                    }
                    None => mat(&[&[q(1), Rational::from_integer(c)], &[q(0), q(1)]]),
                }
            }
        })
    }

    /// Image of the pair `(left, right)`.
    pub fn eval_pair(&self, left: &Word, right: &Word) -> Result<ExactMatrix, ExperimentError> {
        for w in [left, right] {
            if w.rank() != self.rank {
                return Err(WordError::RankMismatch(self.rank, w.rank()).into());
            }
        }
        self.eval_node(&self.root, left, right)
    }

    pub fn eval(&self, e: &FiberElement) -> Result<ExactMatrix, ExperimentError> {
        self.eval_pair(&e.left, &e.right)
    }

    /// Whether the representation is certified semisimple by construction:
    /// a direct sum of tensor products of spanning (absolutely irreducible)
    /// factors.
    pub fn certified_semisimple(&self) -> Result<bool, ExperimentError> {
        fn go(n: &Node) -> Result<bool, ExperimentError> {
            match n {
                Node::Tensor(a, b) => Ok(a.spanning()? && b.spanning()?),
                Node::Sum(parts) => {
                    for p in parts {
                        if !go(p)? {
                            return Ok(false);
                        }
                    }
                    Ok(true)
                }
                Node::Coordinate { .. } => Ok(false),
            }
        }
        go(&self.root)
    }
}

fn contains_coordinate(kind: &RepKind) -> bool {
    match kind {
        RepKind::Tensor { .. } => false,
        RepKind::DirectSum(parts) => parts.iter().any(contains_coordinate),
        RepKind::PiLambda(_) | RepKind::PiUnipotent => true,
    }
}

/// A representation of `Γ × Γ` for a finitely presented `Γ`, restricted to
/// the fiber product. Both factors are checked on every relator.
#[derive(Debug, Clone)]
pub struct RipsRep {
    spec: RepSpec,
    parts: Vec<(Factor, Factor)>,
}

impl RipsRep {
    pub fn build(spec: &RepSpec, p: &Presentation) -> Result<Self, ExperimentError> {
        let mut parts = Vec::new();
        Self::collect(&spec.kind, p, &mut parts)?;
        Ok(RipsRep {
            spec: spec.clone(),
            parts,
        })
    }

    fn collect(kind: &RepKind, p: &Presentation, out: &mut Vec<(Factor, Factor)>) -> Result<(), ExperimentError> {
        match kind {
            RepKind::Tensor { left, right } => {
                let a = Factor::new(left, p.rank())?;
                let b = Factor::new(right, p.rank())?;
                for f in [&a, &b] {
                    for (i, r) in p.relators().iter().enumerate() {
                        if !f.eval(r).is_identity() {
                            return Err(ExperimentError::NotHomomorphism { relator: i + 1 });
                        }
                    }
                }
                out.push((a, b));
                Ok(())
            }
            RepKind::DirectSum(parts) => parts.iter().try_for_each(|k| Self::collect(k, p, out)),
            RepKind::PiLambda(_) | RepKind::PiUnipotent => Err(ExperimentError::NotExtendable(kind.name())),
        }
    }

    pub fn spec(&self) -> &RepSpec {
        &self.spec
    }

    pub fn eval_pair(&self, left: &Word, right: &Word) -> ExactMatrix {
        let blocks: Vec<ExactMatrix> = self.parts.iter().map(|(a, b)| a.eval(left).kron(&b.eval(right))).collect();
        ExactMatrix::block_diag(&blocks)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cartan::mu;
    use crate::freegroup::parse_word_default;

    fn w(s: &str) -> Word {
        parse_word_default(s, 2).unwrap()
    }

    fn names(m: u32) -> Vec<String> {
        crate::freegroup::default_names(m)
    }

    #[test]
    fn pi_lambda_examples() {
        let spec = parse_rep("pilambda:2", &names(2), Place::PAdic(2)).unwrap();
        let rep = Rep::build(&spec, 2).unwrap();
        let one = Word::identity(2);
        let g = rep.eval_pair(&one, &w("[x2,x1]")).unwrap();
        let half = Rational::new(1.into(), 2.into());
        assert_eq!(g, ExactMatrix::from_diag(vec![q(2), half]));
        assert!(rep.eval_pair(&one, &w("[x1,x2,x1]")).unwrap().is_identity());
        assert!(matches!(
            rep.eval_pair(&one, &w("x1")),
            Err(ExperimentError::Precondition(_))
        ));
        let u = Rep::build(&parse_rep("piunipotent", &names(2), Place::Real).unwrap(), 2).unwrap();
        let g = u.eval_pair(&w("x1"), &w("x1 [x1,x2]^3")).unwrap();
        assert_eq!(g[(0, 1)], q(-3));
    }

    #[test]
    fn trivial_tensor_is_identity() {
        let rep = Rep::build(&parse_rep("trivial", &names(2), Place::Real).unwrap(), 2).unwrap();
        assert!(rep.eval_pair(&w("x1 x2^5"), &w("x2^-3")).unwrap().is_identity());
    }

    #[test]
    fn tensor_file_and_sums() {
        let text = "left x1: 1 2; 0 1\nleft x2: 1 0; 2 1\n# comment\nright x1: 2 0; 0 1\nright x2: 1 1/3; 0 1\n";
        let spec = parse_rep(text, &names(2), Place::PAdic(3)).unwrap();
        assert_eq!(spec.dimension(), 4);
        let rep = Rep::build(&spec, 2).unwrap();
        let g = rep.eval_pair(&Word::identity(2), &w("x2")).unwrap();
        assert_eq!(mu(Place::PAdic(3), &g).unwrap().exact_strings().unwrap(), ["1·log3", "1·log3", "-1·log3", "-1·log3"]);
        let sum = parse_rep("sanov+pilambda:3", &names(2), Place::Real).unwrap();
        assert_eq!(sum.dimension(), 6);
        assert!(parse_rep("left x3: 1", &names(2), Place::Real).is_err());
        assert!(parse_rep("pfree:4", &names(2), Place::Real).is_err());
        assert!(parse_rep("pilambda:0", &names(2), Place::Real).is_ok());
        assert!(Rep::build(&parse_rep("pilambda:0", &names(2), Place::Real).unwrap(), 2).is_err());
    }

    #[test]
    fn semisimplicity_certificate() {
        let rep = Rep::build(&parse_rep("sanov", &names(2), Place::Real).unwrap(), 2).unwrap();
        assert!(rep.certified_semisimple().unwrap());
        let rep = Rep::build(&parse_rep("piunipotent", &names(2), Place::Real).unwrap(), 2).unwrap();
        assert!(!rep.certified_semisimple().unwrap());
    }

    #[test]
    fn rips_reps_are_checked_on_relators() {
        let p = Presentation::parse("gens: a b x y\nrel: [a,b] V(0,3;x,y)\nrel: a x a^-1 V(1,3;x,y)").unwrap();
        let ab = parse_rep("abelian:5", p.names(), Place::PAdic(5)).unwrap();
        assert!(RipsRep::build(&ab, &p).is_ok());
        let pl = parse_rep("pilambda:2", p.names(), Place::PAdic(2)).unwrap();
        assert!(matches!(RipsRep::build(&pl, &p), Err(ExperimentError::NotExtendable(_))));
        let text = "left a: 1 0; 0 1\nleft b: 1 0; 0 1\nleft x: 1 1; 0 1\nleft y: 1 0; 0 1\n\
                    right a: 1\nright b: 1\nright x: 1\nright y: 1";
        let bad = parse_rep(text, p.names(), Place::Real).unwrap();
        assert!(matches!(RipsRep::build(&bad, &p), Err(ExperimentError::NotHomomorphism { relator: 1 })));
    }
}
