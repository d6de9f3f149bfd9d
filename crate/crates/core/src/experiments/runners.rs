//! Experiment runners. Every runner is deterministic given its
//! configuration (and seed); rows are computed in parallel and collected in
//! order.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_traits::Pow;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::cartan::{mu, mu_norm};
use crate::fiber::{bfs_length, build_vq, coordinate_certificate, BfsOutcome, FiberGenerators, TestSequenceSpec};
use crate::freegroup::{parse_word_default, Word};
use crate::lcs::{HallBasis, DEFAULT_MAX_WEIGHT};
use crate::smallcanc::{rips_construct, DehnReducer, Presentation};

use super::sample::random_word;
use super::{ExperimentError, Rep, RepSpec, RipsRep};

/// Doubling the budget may raise the maximal ratio by at most this factor
/// for the envelope to count as bounded.
pub const BOUNDED_GROWTH: f64 = 1.10;

pub const CSV_HEADER: &str = "d,n,beta,coord_value,mu_norm,bfs_len";

/// Least-squares slope of `ln y` against `ln x` over the points with
/// `y > 0`; zero when fewer than two such points exist.
pub fn fit_loglog_slope(points: &[(f64, f64)]) -> f64 {
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 1e-12)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if pts.len() < 2 {
        return 0.0;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        0.0
    } else {
        sxy / sxx
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QieConfig {
    pub d: u32,
    pub v: String,
    pub b2: String,
    pub rank: u32,
    /// Normal generators of the fiber product, over `x1..xm`.
    pub normal: Vec<String>,
    pub nmax: i64,
    /// BFS radius cap.
    pub bfs_cap: usize,
    /// Largest `n` for which the BFS length is computed.
    pub bfs_nmax: i64,
    pub seed: u64,
}

impl Default for QieConfig {
    fn default() -> Self {
        QieConfig {
            d: 1,
            v: "[x2,x1]".into(),
            b2: "x1".into(),
            rank: 2,
            normal: vec!["[x1,x2]".into()],
            nmax: 30,
            bfs_cap: 10,
            bfs_nmax: 2,
            seed: 7,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentRow {
    pub d: u32,
    pub n: i64,
    pub beta: usize,
    pub coord_value: BigInt,
    pub mu_norm: f64,
    pub bfs: Option<BfsOutcome>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QieReport {
    pub rows: Vec<ExperimentRow>,
    pub beta: usize,
    /// Fitted log-log slope of the μ-norm against `n`.
    pub mu_slope: f64,
    /// Every coordinate equals `n^β`.
    pub coordinates_exact: bool,
    pub header: String,
}

impl QieReport {
    pub fn to_csv(&self) -> String {
        let mut s = format!("{}\n{CSV_HEADER}\n", self.header);
        for r in &self.rows {
            let bfs = r.bfs.map(|b| b.to_string()).unwrap_or_default();
            let _ = writeln!(s, "{},{},{},{},{:.12},{}", r.d, r.n, r.beta, r.coord_value, r.mu_norm, bfs);
        }
        s
    }

    /// BFS lengths (lower bounds where inexact) are at least one and
    /// nondecreasing in `n`.
    pub fn bfs_consistent(&self) -> bool {
        let bounds: Vec<(usize, bool)> = self
            .rows
            .iter()
            .filter_map(|r| r.bfs)
            .map(|b| match b {
                BfsOutcome::Exact(k) => (k, true),
                BfsOutcome::AboveRadius(c) => (c + 1, false),
                BfsOutcome::StateCap { lower_bound, .. } => (lower_bound, false),
            })
            .collect();
        !bounds.is_empty()
            && bounds.iter().all(|b| b.0 >= 1)
            // an exact value may not drop below an earlier value or bound
            && bounds.windows(2).all(|w| !w[1].1 || w[1].0 >= w[0].0)
    }
}

/// The test sequence `w(d, n) = (1, V_d(x_1^n, ..., x_m^n))`: exact
/// coordinate certificates, μ-norms under `rep` and BFS lengths for small
/// `n`.
pub fn experiment_qie(cfg: &QieConfig, rep: &Rep) -> Result<QieReport, ExperimentError> {
    if cfg.nmax < 1 {
        return Err(ExperimentError::Precondition("nmax must be positive".into()));
    }
    let basis = HallBasis::new(cfg.rank, DEFAULT_MAX_WEIGHT)?;
    let base = TestSequenceSpec::new(&basis, &cfg.v, &cfg.b2, cfg.d, 1)?;
    let beta = base.beta();
    let normal: Vec<&str> = cfg.normal.iter().map(String::as_str).collect();
    let gens = FiberGenerators::parse(cfg.rank, &normal)?;
    let place = rep.place();
    let rows = (1..=cfg.nmax)
        .into_par_iter()
        .map(|n| -> Result<ExperimentRow, ExperimentError> {
            let spec = base.with_n(n)?;
            let cert = coordinate_certificate(&basis, &spec)?;
            let expected = BigInt::from(n).pow(beta as u32);
            if cert.value != expected {
                return Err(ExperimentError::Coordinate {
                    got: cert.value,
                    expected,
                });
            }
            let target = build_vq(&spec)?;
            let g = rep.eval(&target)?;
            let norm = mu_norm(&mu(place, &g)?);
            let bfs = (n <= cfg.bfs_nmax).then(|| bfs_length(&gens, &target, cfg.bfs_cap));
            Ok(ExperimentRow {
                d: cfg.d,
                n,
                beta,
                coord_value: cert.value,
                mu_norm: norm,
                bfs,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let pts: Vec<(f64, f64)> = rows.iter().map(|r| (r.n as f64, r.mu_norm)).collect();
    Ok(QieReport {
        mu_slope: fit_loglog_slope(&pts),
        coordinates_exact: true,
        beta,
        header: format!(
            "# experiment=qie seed={} place={} rep={} v={} b2={} bfs_cap={}",
            cfg.seed,
            place,
            rep.spec(),
            cfg.v,
            cfg.b2,
            cfg.bfs_cap
        ),
        rows,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct BudgetStat {
    pub budget: usize,
    pub samples: usize,
    pub max_ratio: f64,
    pub mean_ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnvelopeReport {
    pub stats: Vec<BudgetStat>,
    /// Largest quotient of maximal ratios between consecutive budgets.
    pub growth: f64,
    /// `growth <= BOUNDED_GROWTH`.
    pub bounded: bool,
    pub header: String,
}

impl EnvelopeReport {
    fn new(stats: Vec<BudgetStat>, header: String) -> Self {
        let growth = stats
            .windows(2)
            .map(|w| {
                if w[0].max_ratio > 0.0 {
                    w[1].max_ratio / w[0].max_ratio
                } else if w[1].max_ratio > 0.0 {
                    f64::INFINITY
                } else {
                    1.0
                }
            })
            .fold(0.0, f64::max);
        EnvelopeReport {
            bounded: growth <= BOUNDED_GROWTH,
            growth,
            stats,
            header,
        }
    }

    pub fn to_csv(&self) -> String {
        let mut s = format!("{}\nbudget,samples,max_ratio,mean_ratio\n", self.header);
        for b in &self.stats {
            let _ = writeln!(s, "{},{},{:.12},{:.12}", b.budget, b.samples, b.max_ratio, b.mean_ratio);
        }
        s
    }
}

fn stat(budget: usize, ratios: &[f64]) -> BudgetStat {
    BudgetStat {
        budget,
        samples: ratios.len(),
        max_ratio: ratios.iter().copied().fold(0.0, f64::max),
        mean_ratio: if ratios.is_empty() {
            0.0
        } else {
            ratios.iter().sum::<f64>() / ratios.len() as f64
        },
    }
}

fn stream(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

#[derive(Debug, Clone, PartialEq)]
pub struct CommutatorConfig {
    pub r: usize,
    pub budgets: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    pub rank: u32,
}

impl Default for CommutatorConfig {
    fn default() -> Self {
        CommutatorConfig {
            r: 5,
            budgets: vec![4, 8],
            trials: 100,
            seed: 7,
            rank: 2,
        }
    }
}

/// Samples `(w_1, ..., w_r)` with `|w_i| <= L` and records
/// `||μ(ρ(1, [w_1, ..., w_r]))|| / (2^r (1 + Σ ||μ(ρ(w_i, w_i))||))`.
pub fn experiment_commutator_bound(cfg: &CommutatorConfig, rep: &Rep) -> Result<EnvelopeReport, ExperimentError> {
    let d = rep.dimension();
    if cfg.r < d + 1 {
        return Err(ExperimentError::Precondition(format!("r = {} must be at least d + 1 = {}", cfg.r, d + 1)));
    }
    let place = rep.place();
    let one = Word::identity(cfg.rank);
    let scale = 2f64.powi(cfg.r as i32);
    let mut stats = Vec::new();
    for (i, &budget) in cfg.budgets.iter().enumerate() {
        let mut rng = stream(cfg.seed, i);
        let tuples: Vec<Vec<Word>> = (0..cfg.trials)
            .map(|_| {
                (0..cfg.r)
                    .map(|_| {
                        let len = rng.gen_range(1..=budget.max(1));
                        random_word(&mut rng, cfg.rank, len)
                    })
                    .collect()
            })
            .collect();
        let ratios = tuples
            .par_iter()
            .map(|ws| -> Result<f64, ExperimentError> {
                let bracket = Word::commutator(ws)?;
                let top = mu_norm(&mu(place, &rep.eval_pair(&one, &bracket)?)?);
                let mut sum = 0.0;
                for w in ws {
                    sum += mu_norm(&mu(place, &rep.eval_pair(w, w)?)?);
                }
                Ok(top / (scale * (1.0 + sum)))
            })
            .collect::<Result<Vec<_>, _>>()?;
        stats.push(stat(budget, &ratios));
    }
    let header = format!(
        "# experiment=commutator seed={} place={} rep={} r={} trials={}",
        cfg.seed,
        place,
        rep.spec(),
        cfg.r,
        cfg.trials
    );
    Ok(EnvelopeReport::new(stats, header))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SemisimpleConfig {
    pub budgets: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    pub rank: u32,
    pub normal: Vec<String>,
    /// Number of brackets `[u, v]` of normal-generator conjugates in `w`.
    pub brackets: usize,
}

impl Default for SemisimpleConfig {
    fn default() -> Self {
        SemisimpleConfig {
            budgets: vec![4, 8],
            trials: 100,
            seed: 7,
            rank: 2,
            normal: vec!["[x1,x2]".into()],
            brackets: 1,
        }
    }
}

/// Samples `(γ, γw)` with `w ∈ [N, N]` and records
/// `||μ(ρ(γ, γw))|| / (|γ| + |γw|)`.
pub fn experiment_semisimple(cfg: &SemisimpleConfig, rep: &Rep) -> Result<EnvelopeReport, ExperimentError> {
    if !rep.certified_semisimple()? {
        return Err(ExperimentError::Precondition(
            "representation is not a sum of tensor products of spanning factors".into(),
        ));
    }
    let normal = cfg
        .normal
        .iter()
        .map(|s| parse_word_default(s, cfg.rank))
        .collect::<Result<Vec<_>, _>>()
        .map_err(crate::fiber::FiberError::from)?;
    if normal.is_empty() {
        return Err(ExperimentError::Precondition("no normal generators".into()));
    }
    let place = rep.place();
    let mut stats = Vec::new();
    for (i, &budget) in cfg.budgets.iter().enumerate() {
        let mut rng = stream(cfg.seed, i);
        let conjugate = |rng: &mut ChaCha8Rng| {
            let len = rng.gen_range(0..=budget / 2);
            let g = random_word(rng, cfg.rank, len);
            let a = &normal[rng.gen_range(0..normal.len())];
            let e = if rng.gen_bool(0.5) { 1 } else { -1 };
            g.multiply(&a.pow(e)).and_then(|x| x.multiply(&g.inverse()))
        };
        let mut pairs = Vec::with_capacity(cfg.trials);
        for _ in 0..cfg.trials {
            let len = rng.gen_range(0..=budget);
            let gamma = random_word(&mut rng, cfg.rank, len);
            let mut w = Word::identity(cfg.rank);
            for _ in 0..cfg.brackets {
                let u = conjugate(&mut rng)?;
                let v = conjugate(&mut rng)?;
                w = w.multiply(&Word::commutator(&[u, v])?)?;
            }
            let right = gamma.multiply(&w)?;
            pairs.push((gamma, right));
        }
        let ratios = pairs
            .par_iter()
            .map(|(l, r)| -> Result<f64, ExperimentError> {
                let len = l.len() + r.len();
                if len == 0 {
                    return Ok(0.0);
                }
                Ok(mu_norm(&mu(place, &rep.eval_pair(l, r)?)?) / len as f64)
            })
            .collect::<Result<Vec<_>, _>>()?;
        stats.push(stat(budget, &ratios));
    }
    let header = format!(
        "# experiment=semisimple seed={} place={} rep={} brackets={} trials={}",
        cfg.seed,
        place,
        rep.spec(),
        cfg.brackets,
        cfg.trials
    );
    Ok(EnvelopeReport::new(stats, header))
}

#[derive(Debug, Clone, PartialEq)]
pub struct RipsConfig {
    pub d: u32,
    pub nmax: i64,
    pub scale: i64,
    pub v: String,
    pub b2: String,
}

impl Default for RipsConfig {
    fn default() -> Self {
        RipsConfig {
            d: 1,
            nmax: 4,
            scale: 100,
            v: "[x2,x1]".into(),
            b2: "x1".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RipsRow {
    pub n: i64,
    /// Length of the right coordinate `V_d(a^n, b^n)`.
    pub length: usize,
    /// Dehn's algorithm leaves a nonempty word.
    pub nontrivial: bool,
    /// μ-norm under each representation, in order.
    pub mu_norms: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RipsReport {
    pub rows: Vec<RipsRow>,
    pub reps: Vec<String>,
    /// Fitted log-log slope of the μ-norm against `n`, per representation.
    pub slopes: Vec<f64>,
    pub worst_ratio: String,
    pub header: String,
}

impl RipsReport {
    pub fn to_csv(&self) -> String {
        let mut s = format!("{}\nn,length,nontrivial", self.header);
        for r in &self.reps {
            let _ = write!(s, ",mu_norm[{r}]");
        }
        s.push('\n');
        for row in &self.rows {
            let _ = write!(s, "{},{},{}", row.n, row.length, row.nontrivial);
            for m in &row.mu_norms {
                let _ = write!(s, ",{m:.12}");
            }
            s.push('\n');
        }
        s
    }
}

/// `δ(d, n) = (1, V_d(a^n, b^n))` in the fiber product of the Rips group
/// built on `<a, b | [a, b]>`: Dehn certificates of nontriviality and
/// μ-norms under representations of the Rips group.
pub fn experiment_rips(cfg: &RipsConfig, reps: &[(String, RepSpec)]) -> Result<RipsReport, ExperimentError> {
    if cfg.nmax < 1 {
        return Err(ExperimentError::Precondition("nmax must be positive".into()));
    }
    let z2 = Presentation::parse("gens: a b\nrel: [a,b]")?;
    let gamma = rips_construct(&z2, cfg.scale)?.presentation;
    let dehn = DehnReducer::new(&gamma)?;
    let built = reps
        .iter()
        .map(|(_, s)| RipsRep::build(s, &gamma))
        .collect::<Result<Vec<_>, _>>()?;
    let basis = HallBasis::new(2, DEFAULT_MAX_WEIGHT)?;
    let base = TestSequenceSpec::new(&basis, &cfg.v, &cfg.b2, cfg.d, 1)?;
    let rank = gamma.rank();
    let images = [Word::generator(rank, 1)?, Word::generator(rank, 2)?];
    let one = Word::identity(rank);
    let rows = (1..=cfg.nmax)
        .into_par_iter()
        .map(|n| -> Result<RipsRow, ExperimentError> {
            let w = base.with_n(n)?.word()?.substitute(&images)?;
            let nontrivial = !dehn.reduce(&w).is_empty();
            let mu_norms = built
                .iter()
                .map(|r| Ok(mu_norm(&mu(r.spec().place, &r.eval_pair(&one, &w))?)))
                .collect::<Result<Vec<_>, ExperimentError>>()?;
            Ok(RipsRow {
                n,
                length: w.len(),
                nontrivial,
                mu_norms,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let slopes = (0..reps.len())
        .map(|k| {
            let pts: Vec<(f64, f64)> = rows.iter().map(|r| (r.n as f64, r.mu_norms[k])).collect();
            fit_loglog_slope(&pts)
        })
        .collect();
    Ok(RipsReport {
        header: format!(
            "# experiment=rips d={} scale={} v={} b2={} worst_ratio={}",
            cfg.d,
            cfg.scale,
            cfg.v,
            cfg.b2,
            dehn.report().worst_ratio
        ),
        worst_ratio: dehn.report().worst_ratio.to_string(),
        reps: reps.iter().map(|(n, _)| n.clone()).collect(),
        rows,
        slopes,
    })
}
