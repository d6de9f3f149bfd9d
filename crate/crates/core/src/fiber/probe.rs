//! Desk-scale probes: products of conjugates against their weight-`p`
//! coordinate norm, and the distortion of the fiber product in `F_m × F_m`.

use std::collections::HashSet;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use crate::freegroup::{ball, Word, WordError};
use crate::lcs::{lcs_depth, HallBasis};

use super::bfs::bfs_ball;
use super::{FiberError, FiberGenerators};

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeReport {
    pub p: usize,
    pub max_factors: usize,
    pub max_conjugator: usize,
    /// Products enumerated (sequences, not distinct elements).
    pub products: u64,
    /// Distinct products lying in `γ_p`.
    pub in_gamma_p: u64,
    /// Largest `ℓ¹` norm of the weight-`p` coordinates.
    pub max_norm: BigInt,
    /// `max_norm / max(M, L)^{p-1}`.
    pub envelope: f64,
    /// Smallest observed `max{k, |z_i|} / norm^{1/(p-1)}` over products
    /// with nonzero norm.
    pub observed_c: Option<f64>,
}

/// Enumerates every product of at most `max_factors` conjugates `z^{-1} b z`
/// with `b ∈ B^{±1}` and `|z| <= max_conjugator`, and records the weight-`p`
/// coordinate norm of those in `γ_p`.
pub fn estimate1_probe(
    rank: u32,
    p: usize,
    b: &[Word],
    max_factors: usize,
    max_conjugator: usize,
    cap: usize,
) -> Result<ProbeReport, FiberError> {
    if p < 4 {
        return Err(FiberError::BadSpec(format!("p must be at least 4, got {p}")));
    }
    if b.is_empty() || max_factors == 0 {
        return Err(FiberError::BadSpec("need at least one factor".into()));
    }
    for w in b {
        if w.rank() != rank {
            return Err(WordError::RankMismatch(rank, w.rank()).into());
        }
    }
    let basis = HallBasis::new(rank, p)?;
    let gens: Vec<Word> = (1..=rank).map(|i| Word::generator(rank, i).unwrap()).collect();
    let zs = ball(rank, max_conjugator, &gens, cap.max(1))?;
    // each factor with the cost |z| it contributes
    let factors: Vec<(Word, usize)> = zs
        .iter()
        .flat_map(|z| {
            b.iter().flat_map(move |w| {
                [1i64, -1].map(|e| {
                    (
                        z.word.inverse().mul_unchecked(&w.pow(e)).mul_unchecked(&z.word),
                        z.length,
                    )
                })
            })
        })
        .collect();
    let f = factors.len() as u128;
    let needed: u128 = (1..=max_factors as u32).map(|k| f.pow(k)).sum();
    let mut report = ProbeReport {
        p,
        max_factors,
        max_conjugator,
        products: 0,
        in_gamma_p: 0,
        max_norm: BigInt::zero(),
        envelope: 0.0,
        observed_c: None,
    };
    if needed > cap as u128 {
        // enumerate only the single factors as the partial report
        let mut seen = HashSet::new();
        for (w, cost) in &factors {
            record(&basis, p, w, 1.max(*cost), &mut seen, &mut report)?;
        }
        finish(&mut report);
        return Err(FiberError::Capacity {
            needed,
            cap,
            partial: Some(Box::new(report)),
        });
    }
    let mut seen = HashSet::new();
    let mut stack: Vec<(Word, usize, usize)> = vec![(Word::identity(rank), 0, 0)];
    while let Some((prefix, k, cost)) = stack.pop() {
        if k == max_factors {
            continue;
        }
        for (w, c) in &factors {
            let prod = prefix.mul_unchecked(w);
            let cost = cost.max(*c);
            record(&basis, p, &prod, cost.max(k + 1), &mut seen, &mut report)?;
            stack.push((prod, k + 1, cost));
        }
    }
    finish(&mut report);
    Ok(report)
}

fn record(
    basis: &HallBasis,
    p: usize,
    w: &Word,
    scale: usize,
    seen: &mut HashSet<Word>,
    report: &mut ProbeReport,
) -> Result<(), FiberError> {
    report.products += 1;
    if lcs_depth(w, p).at_least() < p {
        return Ok(());
    }
    let norm = basis.abelian_coords(w, p)?.l1_norm();
    if seen.insert(w.clone()) {
        report.in_gamma_p += 1;
    }
    if !norm.is_zero() {
        let n = norm.to_f64().unwrap_or(f64::INFINITY);
        let c = scale as f64 / n.powf(1.0 / (p as f64 - 1.0));
        report.observed_c = Some(report.observed_c.map_or(c, |o: f64| o.min(c)));
    }
    if norm > report.max_norm {
        report.max_norm = norm;
    }
    Ok(())
}

fn finish(report: &mut ProbeReport) {
    let scale = report.max_factors.max(report.max_conjugator) as f64;
    report.envelope =
        report.max_norm.to_f64().unwrap_or(f64::INFINITY) / scale.powi(report.p as i32 - 1);
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistortionReport {
    pub q: usize,
    /// Largest fiber-product length among the elements found.
    pub value: usize,
    /// Fiber elements of ambient length `<= q` reached within the radius.
    pub found: usize,
    /// Count of such elements according to the membership predicate, when
    /// one was supplied.
    pub expected: Option<usize>,
    /// `found == expected`: every element was reached, so `value` is exact.
    pub complete: bool,
}

/// `max{ |(γ, γw)|_P : |γ| + |γw| <= q }` over the elements reached by a
/// search of the fiber product's Cayley graph to `radius`.
///
/// Without a membership predicate the value is a lower bound. With one,
/// the ambient ball is enumerated independently and the result is marked
/// complete when both counts agree.
pub fn distortion(
    gens: &FiberGenerators,
    q: usize,
    radius: usize,
    state_cap: usize,
    membership: Option<&dyn Fn(&Word) -> bool>,
) -> Result<DistortionReport, FiberError> {
    let (entries, _) = bfs_ball(gens, radius, state_cap);
    let mut value = 0;
    let mut found = 0;
    for (e, len) in &entries {
        if e.ambient_length() <= q {
            found += 1;
            value = value.max(*len);
        }
    }
    let expected = match membership {
        Some(member) => {
            let m = gens.rank();
            let letters: Vec<Word> = (1..=m).map(|i| Word::generator(m, i).unwrap()).collect();
            let amb = ball(m, q, &letters, state_cap)?;
            let mut count = 0;
            for a in &amb {
                for b in amb.iter().take_while(|b| b.length + a.length <= q) {
                    if member(&a.word.inverse().mul_unchecked(&b.word)) {
                        count += 1;
                    }
                }
            }
            Some(count)
        }
        None => None,
    };
    Ok(DistortionReport {
        q,
        value,
        found,
        complete: expected == Some(found),
        expected,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::freegroup::parse_word_default;

    fn abelian_trivial(w: &Word) -> bool {
        let mut sums = vec![0i64; w.rank() as usize];
        for &(g, e) in w.syllables() {
            sums[g as usize - 1] += e;
        }
        sums.iter().all(|&s| s == 0)
    }

    #[test]
    fn probe_examples() {
        let b = vec![parse_word_default("[x1,x2]", 2).unwrap()];
        let r = estimate1_probe(2, 4, &b, 1, 0, 1_000_000).unwrap();
        assert_eq!(r.max_norm, BigInt::zero());
        assert_eq!(r.in_gamma_p, 0);
        // two conjugates land in γ_4 only as [c^{-1}, y] with y a
        // commutator, which is already in γ_5: twelve such plus the identity
        let r = estimate1_probe(2, 4, &b, 2, 2, 1_000_000).unwrap();
        assert_eq!((r.in_gamma_p, r.max_norm.clone()), (13, BigInt::zero()));
        let r = estimate1_probe(2, 4, &b, 4, 1, 1_000_000).unwrap();
        assert!(r.max_norm > BigInt::zero());
        assert!(matches!(
            estimate1_probe(2, 4, &b, 3, 3, 1000),
            Err(FiberError::Capacity { partial: Some(_), .. })
        ));
    }

    #[test]
    fn distortion_of_commutator_fiber() {
        let gens = FiberGenerators::parse(2, &["[x1,x2]"]).unwrap();
        let d0 = distortion(&gens, 0, 3, 1_000_000, Some(&abelian_trivial)).unwrap();
        assert_eq!((d0.value, d0.complete), (0, true));
        let d2 = distortion(&gens, 2, 4, 1_000_000, Some(&abelian_trivial)).unwrap();
        assert_eq!((d2.value, d2.complete), (1, true));
        let d4 = distortion(&gens, 4, 5, 10_000_000, Some(&abelian_trivial)).unwrap();
        assert!(d4.complete);
        assert!(d4.value >= 3);
    }
}
