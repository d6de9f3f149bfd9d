use std::collections::HashSet;

use super::{Word, WordError};

pub const DEFAULT_BALL_CAP: usize = 50_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BallEntry {
    pub word: Word,
    /// Exact length over the given generating set.
    pub length: usize,
}

/// All elements of `F_rank` that are products of at most `radius` elements of
/// `gens ∪ gens^{-1}`, with their exact lengths, in BFS order.
pub fn ball(
    rank: u32,
    radius: usize,
    gens: &[Word],
    cap: usize,
) -> Result<Vec<BallEntry>, WordError> {
    for g in gens {
        if g.rank() != rank {
            return Err(WordError::RankMismatch(rank, g.rank()));
        }
    }
    let steps: Vec<Word> = gens
        .iter()
        .flat_map(|g| [g.clone(), g.inverse()])
        .collect();
    let id = Word::identity(rank);
    let mut seen: HashSet<Word> = HashSet::from([id.clone()]);
    let mut out = vec![BallEntry {
        word: id.clone(),
        length: 0,
    }];
    let mut frontier = vec![id];
    for length in 1..=radius {
        let mut next = Vec::new();
        for w in &frontier {
            for s in &steps {
                let v = w.mul_unchecked(s);
                if seen.insert(v.clone()) {
                    if seen.len() > cap {
                        return Err(WordError::Capacity { cap });
                    }
                    next.push(v);
                }
            }
        }
        out.extend(next.iter().map(|w| BallEntry {
            word: w.clone(),
            length,
        }));
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn free_gens(m: u32) -> Vec<Word> {
        (1..=m).map(|i| Word::generator(m, i).unwrap()).collect()
    }

    #[test]
    fn small_balls() {
        let g = free_gens(2);
        assert_eq!(ball(2, 0, &g, 100).unwrap().len(), 1);
        assert_eq!(ball(2, 1, &g, 100).unwrap().len(), 5);
        assert_eq!(ball(2, 2, &g, 100).unwrap().len(), 17);
    }

    #[test]
    fn sphere_sizes_match_free_group_growth() {
        for m in 1..=3u32 {
            let b = ball(m, 5, &free_gens(m), DEFAULT_BALL_CAP).unwrap();
            for k in 1..=5usize {
                let count = b.iter().filter(|e| e.length == k).count();
                let expected = 2 * m as usize * (2 * m as usize - 1).pow(k as u32 - 1);
                assert_eq!(count, expected, "m={m} k={k}");
            }
        }
    }

    #[test]
    fn cap_fails_loudly() {
        assert_eq!(
            ball(2, 3, &free_gens(2), 20),
            Err(WordError::Capacity { cap: 20 })
        );
    }
}
