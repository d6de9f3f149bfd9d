//! Acceptance suite: one line per criterion, then a nonzero exit status if
//! any criterion failed. Runs with `cargo test --test acceptance`.

use std::collections::{HashMap, HashSet, VecDeque};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use fiberqi::cartan::{invariant_factor_valuations, log_abs_det, lyapunov, lyapunov_limit, mu, Place};
use fiberqi::experiments::{
    experiment_commutator_bound, experiment_qie, experiment_rips, parse_rep, CommutatorConfig, ExperimentError,
    QieConfig, Rep, RipsConfig, RipsRep, CSV_HEADER,
};
use fiberqi::fiber::{
    coordinate_certificate, distortion, FiberGenerators, TestSequenceSpec,
};
use fiberqi::freegroup::default_names;
use fiberqi::lcs::{magnus_expand, HallBasis};
use fiberqi::smallcanc::{area, check_metric, fiber_presentation, rips_construct, Area, Presentation};
use fiberqi::{ExactMatrix, Rational, Word};
use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 20_240_611;
const LOG_DET_RTOL: f64 = 1e-10;
const GROWTH: f64 = 1.10;
const SLOPE_MAX: f64 = 1.05;

type Check = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn q(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

fn random_matrix(rng: &mut ChaCha8Rng, d: usize) -> ExactMatrix {
    const DENOMS: [i64; 7] = [1, 2, 3, 4, 5, 9, 25];
    loop {
        let data = (0..d * d)
            .map(|_| q(rng.gen_range(-30..=30), DENOMS[rng.gen_range(0..DENOMS.len())]))
            .collect();
        let g = ExactMatrix::from_vec(d, d, data).unwrap();
        if !g.determinant().unwrap().is_zero() {
            return g;
        }
    }
}

// ---- 1. Hall basis against the necklace formula

fn mobius(n: usize) -> i64 {
    let (mut n, mut k, mut sign) = (n, 2, 1);
    while k * k <= n {
        if n % k == 0 {
            n /= k;
            if n % k == 0 {
                return 0;
            }
            sign = -sign;
        }
        k += 1;
    }
    if n > 1 {
        sign = -sign;
    }
    sign
}

fn necklaces(m: u32, q: usize) -> usize {
    let total: i64 = (1..=q)
        .filter(|d| q % d == 0)
        .map(|d| mobius(d) * (m as i64).pow((q / d) as u32))
        .sum();
    (total / q as i64) as usize
}

fn criterion_1() -> Check {
    for m in [2u32, 3] {
        let basis = HallBasis::new(m, 6).map_err(|e| e.to_string())?;
        let want: Vec<usize> = (1..=6).map(|k| necklaces(m, k)).collect();
        ensure(basis.level_sizes() == want, || {
            format!("m={m}: sizes {:?}, necklace counts {want:?}", basis.level_sizes())
        })?;
    }
    Ok("level sizes match for m=2,3 up to weight 6".into())
}

// ---- 2. collection against the Magnus expansion

fn criterion_2() -> Check {
    let basis = HallBasis::new(2, 5).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    for i in 0..200 {
        let len = rng.gen_range(0..=12);
        let letters: Vec<i32> = (0..len)
            .map(|_| rng.gen_range(1..=2) * if rng.gen_bool(0.5) { 1 } else { -1 })
            .collect();
        let w = Word::reduce(2, &letters).unwrap();
        let p = rng.gen_range(2..=6);
        let factors = basis.collect(&w, p).map_err(|e| e.to_string())?;
        let back = basis.evaluate(&factors);
        ensure(magnus_expand(&w, p - 1) == magnus_expand(&back, p - 1), || {
            format!("sample {i}: {letters:?} mod γ_{p}")
        })?;
    }
    Ok("200 words reproduce their truncated series".into())
}

// ---- 3. v(x^n) ≡ v^(n^r) mod γ_(r+1)

fn criterion_3() -> Check {
    let basis = HallBasis::new(2, 4).map_err(|e| e.to_string())?;
    let mut count = 0;
    for c in basis.elements() {
        for n in 1..=4 {
            let ok = basis.verify_bci(c.ordinal, n).map_err(|e| e.to_string())?;
            ensure(ok, || format!("{} fails at n={n}", basis.expr(c.ordinal)))?;
            count += 1;
        }
    }
    Ok(format!("{count} (commutator, n) pairs verified"))
}

// ---- 4. exact coordinate certificates

fn criterion_4() -> Check {
    let basis = HallBasis::new(2, 5).map_err(|e| e.to_string())?;
    let mut seen = Vec::new();
    for qd in [0u32, 1] {
        for n in 1..=3i64 {
            let spec = TestSequenceSpec::new(&basis, "[x2,x1]", "x1", qd, n).map_err(|e| e.to_string())?;
            let cert = coordinate_certificate(&basis, &spec).map_err(|e| e.to_string())?;
            let beta = 2 * qd as usize + 3;
            ensure(cert.beta == beta && cert.value == BigInt::from(n).pow(beta as u32), || {
                format!("q={qd} n={n}: beta {} value {}", cert.beta, cert.value)
            })?;
            seen.push(cert.value.to_string());
        }
    }
    ensure(seen[4] == "32" && seen[5] == "243", || format!("{seen:?}"))?;
    Ok(format!("coordinates {}", seen.join(",")))
}

// ---- 5. invariant factors against determinantal divisors

fn valuation(p: u64, x: &Rational) -> Option<i64> {
    if x.is_zero() {
        return None;
    }
    let pb = BigInt::from(p);
    let count = |mut n: BigInt| {
        let mut k = 0;
        while (&n % &pb).is_zero() {
            n /= &pb;
            k += 1;
        }
        k
    };
    Some(count(x.numer().abs()) - count(x.denom().abs()))
}

fn det(rows: &[usize], cols: &[usize], g: &ExactMatrix) -> Rational {
    let n = rows.len();
    let data = rows
        .iter()
        .flat_map(|&r| cols.iter().map(move |&c| g.data()[r * g.rows() + c].clone()))
        .collect();
    ExactMatrix::from_vec(n, n, data).unwrap().determinant().unwrap()
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    (0u32..1 << n)
        .filter(|s| s.count_ones() as usize == k)
        .map(|s| (0..n).filter(|i| s >> i & 1 == 1).collect())
        .collect()
}

/// Smallest valuation of a k×k minor is `v(d_k)`; consecutive differences
/// are the invariant-factor valuations.
fn minor_oracle(p: u64, g: &ExactMatrix) -> Vec<i64> {
    let n = g.rows();
    let mut dk = vec![0i64];
    for k in 1..=n {
        let best = subsets(n, k)
            .iter()
            .flat_map(|r| subsets(n, k).into_iter().map(move |c| (r.clone(), c)))
            .filter_map(|(r, c)| valuation(p, &det(&r, &c, g)))
            .min()
            .expect("invertible matrix has a nonzero minor");
        dk.push(best);
    }
    dk.windows(2).map(|w| w[1] - w[0]).collect()
}

fn criterion_5() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 5);
    let mut worst = 0.0f64;
    for i in 0..100 {
        let g = random_matrix(&mut rng, 3);
        for p in [2u64, 3, 5] {
            let got = invariant_factor_valuations(p, &g).map_err(|e| e.to_string())?;
            let want = minor_oracle(p, &g);
            ensure(got == want, || format!("sample {i}, p={p}: {got:?} vs {want:?}"))?;
        }
        let v = mu(Place::Real, &g).map_err(|e| e.to_string())?;
        let ld = log_abs_det(Place::Real, &g).map_err(|e| e.to_string())?;
        let rel = (v.sum() - ld).abs() / ld.abs().max(1.0);
        worst = worst.max(rel);
        ensure(rel <= LOG_DET_RTOL, || format!("sample {i}: real sum off by {rel:e}"))?;
    }
    Ok(format!("300 p-adic comparisons exact; real log-det residual {worst:.1e}"))
}

// ---- 6. Newton polygon against μ(g^64)/64

fn criterion_6() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 6);
    let primes = [2u64, 3, 5];
    let mut misses = Vec::new();
    for i in 0..50 {
        let g = random_matrix(&mut rng, 3);
        let p = primes[i % 3];
        let place = Place::PAdic(p);
        let lam = lyapunov(place, &g).map_err(|e| e.to_string())?;
        let lim = lyapunov_limit(place, &g, 6).map_err(|e| e.to_string())?;
        let m = mu(place, &g).map_err(|e| e.to_string())?;
        let (a, b, c) = (lam.exact().unwrap(), lim.exact().unwrap(), m.exact().unwrap());
        let tol = c.iter().map(Signed::abs).max().unwrap() / Rational::from_integer(64.into());
        let gap = a.iter().zip(b).map(|(x, y)| (x - y).abs()).max().unwrap();
        if gap > tol {
            misses.push(format!("#{i} p={p} gap {gap} > {tol}"));
        }
    }
    ensure(misses.is_empty(), || format!("{} of 50 outside tolerance: {}", misses.len(), misses.join("; ")))?;
    Ok("50 samples within max|μ(g)|/64".into())
}

// ---- 7. C'(1/6)

fn gamma22() -> Result<Presentation, String> {
    let z2 = Presentation::parse("gens: a b\nrel: [a,b]").map_err(|e| e.to_string())?;
    Ok(rips_construct(&z2, 100).map_err(|e| e.to_string())?.presentation)
}

fn criterion_7() -> Check {
    let sixth = q(1, 6);
    let mut notes = Vec::new();
    let mut failures = Vec::new();
    let torus = Presentation::parse("gens: a b\nrel: [a,b]").unwrap();
    let (ok, r) = check_metric(&torus, &sixth);
    notes.push(format!("torus {ok} {}", r.worst_ratio));
    if ok || r.worst_ratio != q(1, 2) {
        failures.push(format!("torus: ok={ok}, worst ratio {} (want false, 1/2)", r.worst_ratio));
    }
    let genus2 = Presentation::parse("gens: a b c d\nrel: [a,b][c,d]").unwrap();
    let (ok, r) = check_metric(&genus2, &sixth);
    notes.push(format!("genus-2 {ok} {}", r.worst_ratio));
    if !ok || r.worst_ratio != q(1, 8) {
        failures.push(format!("genus 2: ok={ok}, worst ratio {}", r.worst_ratio));
    }
    let g = gamma22()?;
    let (ok, r) = check_metric(&g, &sixth);
    notes.push(format!("Γ(2,2) {ok} {} over {} letters", r.worst_ratio, g.total_length()));
    if !ok || !(400_000..=500_000).contains(&g.total_length()) {
        failures.push(format!("Γ(2,2): ok={ok}, length {}", g.total_length()));
    }
    ensure(failures.is_empty(), || format!("{} [{}]", failures.join("; "), notes.join(", ")))?;
    Ok(notes.join(", "))
}

// ---- 8. the 21 relators of the fiber presentation

fn criterion_8() -> Check {
    let z2 = Presentation::parse("gens: a b\nrel: [a,b]").unwrap();
    let out = rips_construct(&z2, 100).map_err(|e| e.to_string())?;
    let fp = fiber_presentation(&out).map_err(|e| e.to_string())?;
    let v = |r: u32, side: &str| format!("V({r},100;x_{side},y_{side})");
    let mut listed = vec![
        format!("[a,b] {} {}", v(0, "L"), v(0, "R")),
        "[x_L,x_R]".to_string(),
        "[x_L,y_R]".into(),
        "[y_L,x_R]".into(),
        "[y_L,y_R]".into(),
    ];
    // V indices run over letter, then generator, then sign
    for (gi, g) in ["a", "b"].iter().enumerate() {
        for (ti, t) in ["x", "y"].iter().enumerate() {
            let k = 1 + 4 * ti as u32 + 2 * gi as u32;
            for (conj, side_k) in [(format!("{g} {t}_S {g}^-1"), k), (format!("{g}^-1 {t}_S {g}"), k + 1)] {
                for side in ["L", "R"] {
                    listed.push(format!("{} {}", conj.replace('S', side), v(side_k, side)));
                }
            }
        }
    }
    ensure(fp.relators().len() == 21 && listed.len() == 21, || {
        format!("{} relators", fp.relators().len())
    })?;
    for (i, (got, text)) in fp.relators().iter().zip(&listed).enumerate() {
        let want = fp.parse_word(text).map_err(|e| e.to_string())?;
        ensure(*got == want, || format!("relator {} differs from `{text}`", i + 1))?;
    }
    Ok(format!("21 relators identical, generators {}", fp.names().join(" ")))
}

// ---- 9. area and distortion

type Pair = (Vec<i32>, Vec<i32>);

fn push(w: &mut Vec<i32>, l: i32) {
    if w.last() == Some(&-l) {
        w.pop();
    } else {
        w.push(l);
    }
}

fn reduced_words(len: usize) -> Vec<Vec<i32>> {
    let mut out = vec![vec![]];
    let mut frontier = vec![vec![]];
    for _ in 0..len {
        let mut next = Vec::new();
        for w in &frontier {
            for l in [1, -1, 2, -2] {
                if (w as &Vec<i32>).last() != Some(&-l) {
                    let mut v = w.clone();
                    v.push(l);
                    next.push(v);
                }
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

fn abelianization(w: &[i32]) -> (i64, i64) {
    w.iter().fold((0, 0), |(a, b), &l| match l {
        1 => (a + 1, b),
        -1 => (a - 1, b),
        2 => (a, b + 1),
        _ => (a, b - 1),
    })
}

/// Independent distortion for `F_2 ×_{γ_2} F_2` with generators
/// `(x_i, x_i)` and `(1, [x1,x2])`: enumerate the ambient targets, then
/// search the fiber Cayley graph until all are reached.
fn distortion_oracle(qmax: usize, radius: usize) -> Option<usize> {
    let words = reduced_words(qmax);
    let mut targets: HashSet<Pair> = HashSet::new();
    for a in &words {
        for b in &words {
            if a.len() + b.len() <= qmax && abelianization(a) == abelianization(b) {
                targets.insert((a.clone(), b.clone()));
            }
        }
    }
    let comm = [-1, -2, 1, 2];
    let mut steps: Vec<(Vec<i32>, Vec<i32>)> = Vec::new();
    for l in [1, -1, 2, -2] {
        steps.push((vec![l], vec![l]));
    }
    steps.push((vec![], comm.to_vec()));
    steps.push((vec![], comm.iter().rev().map(|l| -l).collect()));
    let mut dist: HashMap<Pair, usize> = HashMap::new();
    let mut queue = VecDeque::new();
    dist.insert((vec![], vec![]), 0);
    queue.push_back((vec![], vec![]));
    let mut best = 0;
    let mut remaining = targets.len();
    while let Some(cur) = queue.pop_front() {
        let d = dist[&cur];
        if targets.contains(&cur) {
            best = best.max(d);
            remaining -= 1;
            if remaining == 0 {
                return Some(best);
            }
        }
        if d == radius {
            continue;
        }
        for (sl, sr) in &steps {
            let (mut l, mut r) = cur.clone();
            sl.iter().for_each(|&x| push(&mut l, x));
            sr.iter().for_each(|&x| push(&mut r, x));
            if !dist.contains_key(&(l.clone(), r.clone())) {
                dist.insert((l.clone(), r.clone()), d + 1);
                queue.push_back((l, r));
            }
        }
    }
    None
}

fn criterion_9() -> Check {
    let torus = Presentation::parse("gens: a b\nrel: [a,b]").unwrap();
    let w = torus.parse_word("[a^2,b^2]").unwrap();
    let a = area(&torus, &w, 6).map_err(|e| e.to_string())?;
    ensure(a == Area::Exact(4), || format!("area {a}"))?;
    let gens = FiberGenerators::parse(2, &["[x1,x2]"]).map_err(|e| e.to_string())?;
    let member = |w: &Word| {
        let l: Vec<i32> = w.letters().collect();
        abelianization(&l) == (0, 0)
    };
    let mut values = Vec::new();
    for qd in 0..=4 {
        let d = distortion(&gens, qd, 6, 10_000_000, Some(&member)).map_err(|e| e.to_string())?;
        let want = distortion_oracle(qd, 8);
        ensure(d.complete && Some(d.value) == want, || {
            format!("q={qd}: library {} (complete {}), oracle {want:?}", d.value, d.complete)
        })?;
        values.push(d.value.to_string());
    }
    Ok(format!("area 4; distortion q=0..4: {}", values.join(",")))
}

// ---- 10. commutator-bound envelope

fn criterion_10() -> Check {
    let spec = parse_rep("pfree:5", &default_names(2), Place::PAdic(5)).map_err(|e| e.to_string())?;
    let rep = Rep::build(&spec, 2).map_err(|e| e.to_string())?;
    ensure(rep.dimension() == 4, || format!("dimension {}", rep.dimension()))?;
    let cfg = CommutatorConfig {
        r: 5,
        budgets: vec![4, 8],
        trials: 100,
        seed: SEED,
        rank: 2,
    };
    let r = experiment_commutator_bound(&cfg, &rep).map_err(|e| e.to_string())?;
    let (a, b) = (r.stats[0].max_ratio, r.stats[1].max_ratio);
    ensure(r.stats.iter().all(|s| s.samples >= 100), || "too few samples".into())?;
    let detail = format!("max ratio {a:.6} at L=4, {b:.6} at L=8");
    ensure(b <= GROWTH * a, || detail.clone())?;
    Ok(detail)
}

// ---- 11. test sequence in F_2 x F_2

fn criterion_11() -> Check {
    let spec = parse_rep("pfree:5", &default_names(2), Place::PAdic(5)).map_err(|e| e.to_string())?;
    let rep = Rep::build(&spec, 2).map_err(|e| e.to_string())?;
    let cfg = QieConfig {
        d: 1,
        nmax: 30,
        bfs_cap: 10,
        bfs_nmax: 2,
        seed: SEED,
        ..QieConfig::default()
    };
    let r = experiment_qie(&cfg, &rep).map_err(|e| e.to_string())?;
    ensure(r.beta == 5 && r.rows.len() == 30, || format!("beta {}, {} rows", r.beta, r.rows.len()))?;
    for row in &r.rows {
        ensure(row.coord_value == BigInt::from(row.n).pow(5), || format!("n={}: {}", row.n, row.coord_value))?;
    }
    ensure(r.to_csv().lines().nth(1) == Some(CSV_HEADER), || "csv header".into())?;
    let bfs: Vec<String> = r.rows.iter().filter_map(|x| x.bfs.map(|b| b.to_string())).collect();
    let detail = format!("coordinates n^5; slope {:.4}; bfs {}", r.mu_slope, bfs.join(","));
    ensure(r.mu_slope <= SLOPE_MAX, || detail.clone())?;
    ensure(r.bfs_consistent(), || detail.clone())?;
    Ok(detail)
}

// ---- 12. Rips side

fn criterion_12() -> Check {
    let names: Vec<String> = ["a", "b", "x", "y"].map(String::from).to_vec();
    let reps = ["trivial", "abelian:2", "abelian:3", "abelian:5"]
        .iter()
        .map(|t| {
            let place = if *t == "trivial" { Place::PAdic(5) } else { t[8..].parse().map(Place::PAdic).unwrap() };
            Ok((t.to_string(), parse_rep(t, &names, place)?))
        })
        .collect::<Result<Vec<_>, ExperimentError>>()
        .map_err(|e| e.to_string())?;
    let cfg = RipsConfig {
        d: 1,
        nmax: 2,
        ..RipsConfig::default()
    };
    let r = experiment_rips(&cfg, &reps).map_err(|e| e.to_string())?;
    ensure(r.rows.iter().all(|x| x.nontrivial), || "δ reduced to the identity".into())?;
    ensure(r.slopes.iter().all(|&s| s <= SLOPE_MAX), || format!("slopes {:?}", r.slopes))?;
    let g = gamma22()?;
    let pi = parse_rep("pilambda:2", &names, Place::PAdic(2)).map_err(|e| e.to_string())?;
    ensure(matches!(RipsRep::build(&pi, &g), Err(ExperimentError::NotExtendable(_))), || {
        "π_λ was accepted on the Rips group".into()
    })?;
    let lens: Vec<String> = r.rows.iter().map(|x| x.length.to_string()).collect();
    Ok(format!("δ(1,n) nontrivial for n=1,2 (lengths {}); slopes {:?}", lens.join(","), r.slopes))
}

fn main() {
    let criteria: [(&str, u64, fn() -> Check); 12] = [
        ("hall basis level sizes", 1, criterion_1),
        ("collection soundness", 60, criterion_2),
        ("power identity for basic commutators", 30, criterion_3),
        ("coordinate certificates", 60, criterion_4),
        ("cartan exactness", 30, criterion_5),
        ("lyapunov limit", 60, criterion_6),
        ("small cancellation", 120, criterion_7),
        ("fiber presentation relators", 5, criterion_8),
        ("area and distortion", 120, criterion_9),
        ("commutator envelope", 600, criterion_10),
        ("test sequence growth", 600, criterion_11),
        ("rips fiber product", 600, criterion_12),
    ];
    let mut failed = 0;
    for (i, (name, limit, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let result = match result {
            Ok(d) if elapsed > Duration::from_secs(*limit) => Err(format!("{d}; over the {limit}s limit")),
            r => r,
        };
        let (tag, detail) = match &result {
            Ok(d) => ("PASS", d),
            Err(d) => ("FAIL", d),
        };
        if result.is_err() {
            failed += 1;
        }
        println!("[{tag}] {:>2} {name}: {detail} ({:.2}s)", i + 1, elapsed.as_secs_f64());
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
