//! Exact area by iterative deepening.
//!
//! The search runs on cyclically reduced words. One move deletes a 2-cell
//! along a single boundary edge: a letter `e` with `e v` a cyclic relator
//! is replaced by `v^{-1}`, followed by free and cyclic reduction. Removing
//! a face along a longer arc is the same move up to free reduction, so
//! these moves reach every van Kampen diagram.

use std::collections::{HashMap, HashSet};
use std::fmt;

use crate::freegroup::Word;

use super::{Presentation, SmallCancError};

pub const DEFAULT_AREA_CAP: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Area {
    Exact(usize),
    AboveCap(usize),
}

impl Area {
    pub fn exact(&self) -> Option<usize> {
        match self {
            Area::Exact(n) => Some(*n),
            Area::AboveCap(_) => None,
        }
    }
}

impl fmt::Display for Area {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Area::Exact(n) => write!(f, "{n}"),
            Area::AboveCap(c) => write!(f, ">{c}"),
        }
    }
}

fn free_reduce(letters: impl IntoIterator<Item = i32>) -> Vec<i32> {
    let mut out: Vec<i32> = Vec::new();
    for l in letters {
        if out.last() == Some(&-l) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    let (mut a, mut b) = (0, out.len());
    while b - a >= 2 && out[a] == -out[b - 1] {
        a += 1;
        b -= 1;
    }
    out[a..b].to_vec()
}

fn min_rotation(w: &[i32]) -> Vec<i32> {
    if w.is_empty() {
        return Vec::new();
    }
    (0..w.len())
        .map(|k| w[k..].iter().chain(&w[..k]).copied().collect::<Vec<_>>())
        .min()
        .expect("nonempty")
}

struct Search {
    cyclic: Vec<Vec<i32>>,
    occurrences: HashMap<i32, Vec<(usize, usize)>>,
    single: HashSet<Vec<i32>>,
    failed: HashSet<(Vec<i32>, usize)>,
}

impl Search {
    fn new(p: &Presentation) -> Self {
        let mut cyclic = Vec::new();
        for r in p.relators() {
            cyclic.push(r.letters().collect::<Vec<i32>>());
            cyclic.push(r.inverse().letters().collect());
        }
        let mut occurrences: HashMap<i32, Vec<(usize, usize)>> = HashMap::new();
        for (c, w) in cyclic.iter().enumerate() {
            for (o, &l) in w.iter().enumerate() {
                occurrences.entry(l).or_default().push((c, o));
            }
        }
        let single = cyclic.iter().map(|w| min_rotation(w)).collect();
        Search {
            cyclic,
            occurrences,
            single,
            failed: HashSet::new(),
        }
    }

    fn within(&mut self, w: &[i32], budget: usize) -> bool {
        if w.is_empty() {
            return true;
        }
        if budget == 0 {
            return false;
        }
        let key = min_rotation(w);
        if budget == 1 {
            return self.single.contains(&key);
        }
        if self.failed.contains(&(key.clone(), budget)) {
            return false;
        }
        let n = w.len();
        for p in 0..n {
            let Some(occ) = self.occurrences.get(&w[p]) else { continue };
            for &(c, o) in &occ.clone() {
                let cw = &self.cyclic[c];
                let l = cw.len();
                let v_inv = (1..l).rev().map(|k| -cw[(o + k) % l]);
                let next = free_reduce(v_inv.chain(w[p + 1..].iter().copied()).chain(w[..p].iter().copied()));
                if self.within(&next, budget - 1) {
                    return true;
                }
            }
        }
        self.failed.insert((key, budget));
        false
    }
}

/// Minimal number of relator conjugates whose product is `w`, searched up
/// to `cap`. The caller asserts that `w` is trivial; otherwise the result
/// is `AboveCap`.
pub fn area(p: &Presentation, w: &Word, cap: usize) -> Result<Area, SmallCancError> {
    p.check_word(w)?;
    let start = free_reduce(w.letters());
    let mut search = Search::new(p);
    for k in 0..=cap {
        if search.within(&start, k) {
            return Ok(Area::Exact(k));
        }
    }
    Ok(Area::AboveCap(cap))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z2() -> Presentation {
        Presentation::parse("gens: a b\nrel: [a,b]").unwrap()
    }

    #[test]
    fn examples() {
        let p = z2();
        let w = |s: &str| p.parse_word(s).unwrap();
        assert_eq!(area(&p, &w("[a,b]"), 6).unwrap(), Area::Exact(1));
        assert_eq!(area(&p, &w("b a b^-1 a^-1"), 6).unwrap(), Area::Exact(1));
        assert_eq!(area(&p, &Word::identity(2), 6).unwrap(), Area::Exact(0));
        assert_eq!(area(&p, &w("[a^2,b]"), 6).unwrap(), Area::Exact(2));
        assert_eq!(area(&p, &w("[a^2,b^2]"), 6).unwrap(), Area::Exact(4));
        let far = area(&p, &w("[a^3,b^3]"), 6).unwrap();
        assert_eq!(far, Area::AboveCap(6));
        assert_eq!(far.to_string(), ">6");
    }

    #[test]
    fn reduction_helpers() {
        assert_eq!(free_reduce([1, 2, -2, 3, -1]), vec![3]);
        assert_eq!(min_rotation(&[2, 1, 3]), vec![1, 3, 2]);
        assert!(min_rotation(&[]).is_empty());
    }
}
