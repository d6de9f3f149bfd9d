//! Exact word length in the Cayley graph of a fiber product.

use std::collections::HashMap;
use std::fmt;

use crate::freegroup::Word;

use super::{FiberElement, FiberGenerators};

/// Radius above which [`bfs_length`] switches to the bidirectional search.
pub const BIDIRECTIONAL_THRESHOLD: usize = 8;
pub const DEFAULT_STATE_CAP: usize = 50_000_000;

type State = (Word, Word);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BfsOutcome {
    Exact(usize),
    /// The length exceeds the radius cap.
    AboveRadius(usize),
    /// The state cap was hit; the length is at least `lower_bound`.
    StateCap { states: usize, lower_bound: usize },
}

impl BfsOutcome {
    pub fn exact(&self) -> Option<usize> {
        match self {
            BfsOutcome::Exact(n) => Some(*n),
            _ => None,
        }
    }
}

impl fmt::Display for BfsOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BfsOutcome::Exact(n) => write!(f, "{n}"),
            BfsOutcome::AboveRadius(cap) => write!(f, ">{cap}"),
            BfsOutcome::StateCap { lower_bound, .. } => write!(f, ">={lower_bound}"),
        }
    }
}

fn steps(gens: &FiberGenerators) -> Vec<State> {
    (1..=gens.count() as u32)
        .flat_map(|g| [gens.step(g, 1), gens.step(g, -1)])
        .collect()
}

fn neighbours<'a>(s: &'a State, steps: &'a [State]) -> impl Iterator<Item = State> + 'a {
    steps
        .iter()
        .map(move |(l, r)| (s.0.mul_unchecked(l), s.1.mul_unchecked(r)))
}

/// Length of `target`: forward search up to the threshold radius,
/// bidirectional beyond it.
pub fn bfs_length(gens: &FiberGenerators, target: &FiberElement, radius_cap: usize) -> BfsOutcome {
    if radius_cap <= BIDIRECTIONAL_THRESHOLD {
        bfs_length_forward(gens, target, radius_cap, DEFAULT_STATE_CAP)
    } else {
        bfs_length_bidirectional(gens, target, radius_cap, DEFAULT_STATE_CAP)
    }
}

pub fn bfs_length_forward(
    gens: &FiberGenerators,
    target: &FiberElement,
    radius_cap: usize,
    state_cap: usize,
) -> BfsOutcome {
    let goal: State = (target.left.clone(), target.right.clone());
    let id = FiberElement::identity(gens.rank());
    let start: State = (id.left, id.right);
    if start == goal {
        return BfsOutcome::Exact(0);
    }
    let steps = steps(gens);
    let mut seen: HashMap<State, ()> = HashMap::from([(start.clone(), ())]);
    let mut frontier = vec![start];
    for depth in 1..=radius_cap {
        let mut next = Vec::new();
        for s in &frontier {
            for n in neighbours(s, &steps) {
                if n == goal {
                    return BfsOutcome::Exact(depth);
                }
                if seen.contains_key(&n) {
                    continue;
                }
                if seen.len() >= state_cap {
                    return BfsOutcome::StateCap {
                        states: seen.len(),
                        lower_bound: depth,
                    };
                }
                seen.insert(n.clone(), ());
                next.push(n);
            }
        }
        frontier = next;
    }
    BfsOutcome::AboveRadius(radius_cap)
}

/// Meet-in-the-middle search expanding whole layers from both ends, always
/// on the side with the smaller frontier.
pub fn bfs_length_bidirectional(
    gens: &FiberGenerators,
    target: &FiberElement,
    radius_cap: usize,
    state_cap: usize,
) -> BfsOutcome {
    let goal: State = (target.left.clone(), target.right.clone());
    let id = FiberElement::identity(gens.rank());
    let start: State = (id.left, id.right);
    if start == goal {
        return BfsOutcome::Exact(0);
    }
    let steps = steps(gens);
    let mut dist = [HashMap::from([(start.clone(), 0usize)]), HashMap::from([(goal.clone(), 0usize)])];
    let mut frontier = [vec![start], vec![goal]];
    let mut depth = [0usize, 0usize];
    // every path of length <= depth[0] + depth[1] has been ruled out
    while depth[0] + depth[1] < radius_cap {
        let side = if frontier[0].len() <= frontier[1].len() { 0 } else { 1 };
        let other = 1 - side;
        let mut next = Vec::new();
        let mut best: Option<usize> = None;
        for s in &frontier[side] {
            for n in neighbours(s, &steps) {
                if dist[side].contains_key(&n) {
                    continue;
                }
                if let Some(&k) = dist[other].get(&n) {
                    let total = depth[side] + 1 + k;
                    best = Some(best.map_or(total, |b: usize| b.min(total)));
                }
                if dist[0].len() + dist[1].len() >= state_cap {
                    return BfsOutcome::StateCap {
                        states: dist[0].len() + dist[1].len(),
                        lower_bound: depth[0] + depth[1] + 1,
                    };
                }
                dist[side].insert(n.clone(), depth[side] + 1);
                next.push(n);
            }
        }
        depth[side] += 1;
        if let Some(b) = best {
            return BfsOutcome::Exact(b);
        }
        if next.is_empty() {
            // a finite component without the target; cannot happen in a
            // group but keeps the loop total
            return BfsOutcome::AboveRadius(radius_cap);
        }
        frontier[side] = next;
    }
    BfsOutcome::AboveRadius(radius_cap)
}

/// All elements of the ball of the given radius, with exact lengths, in
/// BFS order. Returns the entries found before the state cap if it is hit,
/// together with a flag.
pub fn bfs_ball(gens: &FiberGenerators, radius: usize, state_cap: usize) -> (Vec<(FiberElement, usize)>, bool) {
    let id = FiberElement::identity(gens.rank());
    let start: State = (id.left, id.right);
    let steps = steps(gens);
    let mut seen: HashMap<State, ()> = HashMap::from([(start.clone(), ())]);
    let mut out = vec![(to_element(&start), 0)];
    let mut frontier = vec![start];
    for depth in 1..=radius {
        let mut next = Vec::new();
        for s in &frontier {
            for n in neighbours(s, &steps) {
                if seen.contains_key(&n) {
                    continue;
                }
                if seen.len() >= state_cap {
                    return (out, false);
                }
                seen.insert(n.clone(), ());
                out.push((to_element(&n), depth));
                next.push(n);
            }
        }
        frontier = next;
    }
    (out, true)
}

fn to_element(s: &State) -> FiberElement {
    FiberElement {
        left: s.0.clone(),
        right: s.1.clone(),
        witness: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fiber::evaluate;
    use crate::freegroup::parse_word_default;

    fn gens() -> FiberGenerators {
        FiberGenerators::parse(2, &["[x1,x2]"]).unwrap()
    }

    fn el(witness: &str) -> FiberElement {
        evaluate(&gens(), &parse_word_default(witness, 3).unwrap()).unwrap()
    }

    #[test]
    fn examples() {
        let g = gens();
        assert_eq!(bfs_length(&g, &el("x3"), 4), BfsOutcome::Exact(1));
        assert_eq!(bfs_length(&g, &el("x1 x3"), 4), BfsOutcome::Exact(2));
        assert_eq!(bfs_length(&g, &FiberElement::identity(2), 0), BfsOutcome::Exact(0));
        assert_eq!(bfs_length(&g, &el("x1 x3 x2 x3"), 2), BfsOutcome::AboveRadius(2));
    }

    #[test]
    fn strategies_agree() {
        let g = gens();
        for w in ["x1 x3 x2", "x3 x1 x3^-1 x2^2", "x1^2 x3 x1^-2 x3", "x2 x1 x3 x1^-1 x2^-1"] {
            let t = el(w);
            let a = bfs_length_forward(&g, &t, 7, DEFAULT_STATE_CAP);
            let b = bfs_length_bidirectional(&g, &t, 7, DEFAULT_STATE_CAP);
            assert_eq!(a, b, "{w}");
            assert!(a.exact().is_some());
        }
    }

    #[test]
    fn state_cap_is_reported() {
        let g = gens();
        let out = bfs_length_forward(&g, &el("x1^3 x3 x2^3"), 10, 50);
        assert!(matches!(out, BfsOutcome::StateCap { .. }));
        assert!(out.to_string().starts_with(">="));
    }

    #[test]
    fn ball_sizes() {
        let (ball, complete) = bfs_ball(&gens(), 1, 100);
        assert!(complete);
        assert_eq!(ball.len(), 7);
    }
}
