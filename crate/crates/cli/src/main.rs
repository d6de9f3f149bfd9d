//! Command-line front end.
//!
//! Every subcommand accepts `--config <file>` with `key=value` lines; each
//! line becomes the flag `--key value` at the position of `--config`, so
//! flags given later on the command line take precedence.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde_json::{json, Value};

use fiberqi::cartan::{invariant_factor_valuations, mu, mu_norm, Place};
use fiberqi::experiments::{
    experiment_commutator_bound, experiment_qie, experiment_rips, experiment_semisimple, parse_rep,
    CommutatorConfig, QieConfig, Rep, RepSpec, RipsConfig, SemisimpleConfig,
};
use fiberqi::fiber::{
    bfs_length, build_vq, coordinate_certificate, evaluate, FiberGenerators, TestSequenceSpec,
};
use fiberqi::freegroup::{default_names, parse_word_default};
use fiberqi::lcs::{lcs_depth, Depth, HallBasis, DEFAULT_MAX_WEIGHT};
use fiberqi::smallcanc::{
    area, check_metric, dehn_reduce, fiber_presentation, rips_construct, Presentation, SmallCancError,
};
use fiberqi::{ExactMatrix, Rational};

#[derive(Parser)]
#[command(name = "fiberqi", version, about = "Fiber products, lower central series and Cartan projections")]
#[command(args_override_self = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Basic commutators of F_m up to a weight.
    Hall {
        #[arg(long, default_value_t = 2)]
        m: u32,
        #[arg(long, default_value_t = 4)]
        weight: usize,
    },
    /// Collect a word modulo γ_p.
    Collect {
        #[arg(long, default_value_t = 2)]
        m: u32,
        #[arg(long)]
        p: usize,
        #[arg(long)]
        word: String,
    },
    /// Coordinates of a word of γ_q on γ_q/γ_(q+1).
    Coords {
        #[arg(long, default_value_t = 2)]
        m: u32,
        #[arg(long)]
        q: usize,
        #[arg(long)]
        word: String,
    },
    /// Lower-central-series depth of a word.
    Depth {
        #[arg(long, default_value_t = 2)]
        m: u32,
        #[arg(long, default_value_t = DEFAULT_MAX_WEIGHT)]
        cap: usize,
        #[arg(long)]
        word: String,
    },
    /// Cartan projection of a rational matrix.
    Mu {
        #[arg(long, default_value = "real")]
        place: String,
        /// JSON array of rows of rational strings.
        #[arg(long)]
        matrix: PathBuf,
    },
    /// Word length of a fiber-product element given by a witness.
    Wordlen {
        #[arg(long, default_value_t = 2)]
        m: u32,
        /// Normal generator over x1..xm (repeatable).
        #[arg(long, default_value = "[x1,x2]")]
        normal: Vec<String>,
        /// Witness over x1..x(m+k): x_i is (x_i, x_i), x_(m+j) is (1, a_j).
        #[arg(long)]
        target_witness: String,
        #[arg(long, default_value_t = 10)]
        cap: usize,
    },
    /// Test-sequence element with its coordinate certificate and length.
    Vq(VqArgs),
    /// Check the C'(λ) condition.
    CheckSc {
        #[arg(long, default_value = "1/6")]
        lambda: String,
        file: PathBuf,
    },
    /// Rips construction over a presentation.
    Rips {
        #[arg(long, default_value_t = 100)]
        scale: i64,
        file: PathBuf,
    },
    /// Presentation of the fiber product of the Rips construction.
    Fiberpres {
        #[arg(long, default_value_t = 100)]
        scale: i64,
        file: PathBuf,
    },
    /// Dehn's algorithm on a word.
    Dehn {
        #[arg(long)]
        word: String,
        file: PathBuf,
    },
    /// Exact area of a null-homotopic word up to a cap.
    Area {
        #[arg(long)]
        word: String,
        #[arg(long, default_value_t = 6)]
        cap: usize,
        file: PathBuf,
    },
    /// Experiment runners writing CSV.
    #[command(subcommand)]
    Experiment(Experiment),
}

#[derive(Args)]
struct VqArgs {
    #[arg(long, default_value_t = 2)]
    m: u32,
    #[arg(long, default_value = "[x2,x1]")]
    v: String,
    #[arg(long, default_value = "x1")]
    b2: String,
    #[arg(long, default_value_t = 0)]
    q: u32,
    #[arg(long, default_value_t = 1)]
    n: i64,
    /// Emit rows for n = 1..=nmax instead of the single `n`.
    #[arg(long)]
    nmax: Option<i64>,
    #[arg(long, default_value = "[x1,x2]")]
    normal: Vec<String>,
    /// BFS radius cap; 0 skips the search.
    #[arg(long, default_value_t = 0)]
    cap: usize,
}

#[derive(Args)]
struct RepArgs {
    #[arg(long, default_value = "p:5")]
    place: String,
    /// Built-in name (`pfree:5`, `sanov`, `pilambda:2`, ... joined by `+`)
    /// or `tensor:<file>`.
    #[arg(long, default_value = "pfree:5")]
    rep: String,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Experiment {
    /// Cartan growth along the test sequence w(d, n).
    Qie {
        #[command(flatten)]
        common: RepArgs,
        #[arg(long, default_value_t = 1)]
        d: u32,
        #[arg(long, default_value = "[x2,x1]")]
        v: String,
        #[arg(long, default_value = "x1")]
        b2: String,
        #[arg(long, default_value_t = 2)]
        m: u32,
        #[arg(long, default_value = "[x1,x2]")]
        normal: Vec<String>,
        #[arg(long, default_value_t = 30)]
        nmax: i64,
        #[arg(long, default_value_t = 10)]
        bfs_cap: usize,
        #[arg(long, default_value_t = 2)]
        bfs_nmax: i64,
    },
    /// Envelope of the commutator bound over doubling budgets.
    Commutator {
        #[command(flatten)]
        common: RepArgs,
        #[arg(long, default_value_t = 5)]
        r: usize,
        #[arg(long, value_delimiter = ',', default_value = "4,8")]
        budget: Vec<usize>,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 2)]
        m: u32,
    },
    /// Envelope of the linear bound for semisimple representations.
    Semisimple {
        #[command(flatten)]
        common: RepArgs,
        #[arg(long, value_delimiter = ',', default_value = "4,8")]
        budget: Vec<usize>,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 2)]
        m: u32,
        #[arg(long, default_value = "[x1,x2]")]
        normal: Vec<String>,
        #[arg(long, default_value_t = 1)]
        brackets: usize,
    },
    /// δ(d, n) in the fiber product of the Rips group over Z^2.
    Rips {
        #[arg(long, default_value_t = 1)]
        d: u32,
        #[arg(long, default_value_t = 4)]
        nmax: i64,
        #[arg(long, default_value_t = 100)]
        scale: i64,
        /// Representations of the Rips group (repeatable): `name@place`,
        /// e.g. `abelian:5@p:5` or `trivial@real`.
        #[arg(long, default_value = "trivial@p:5")]
        rep: Vec<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Splices `key=value` lines from `--config` files into the argument list.
fn expand_config(args: Vec<String>) -> Result<Vec<String>> {
    let mut out = Vec::with_capacity(args.len());
    let mut it = args.into_iter();
    while let Some(a) = it.next() {
        let path = if a == "--config" {
            it.next().context("--config needs a file")?
        } else if let Some(p) = a.strip_prefix("--config=") {
            p.to_string()
        } else {
            out.push(a);
            continue;
        };
        let text = fs::read_to_string(&path).with_context(|| format!("reading {path}"))?;
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .with_context(|| format!("{path}:{}: expected key=value", i + 1))?;
            out.push(format!("--{}", k.trim().replace('_', "-")));
            out.push(v.trim().to_string());
        }
    }
    Ok(out)
}

/// Writes to stdout; a closed pipe ends the process quietly.
fn emit(text: &str) {
    let mut out = io::stdout().lock();
    if let Err(e) = out.write_all(text.as_bytes()).and_then(|_| out.flush()) {
        if e.kind() == io::ErrorKind::BrokenPipe {
            std::process::exit(0);
        }
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}

fn print_json(v: &Value) {
    emit(&format!("{}\n", serde_json::to_string_pretty(v).expect("serializable")));
}

fn big(n: &BigInt) -> Value {
    match n.to_i64() {
        Some(i) => json!(i),
        None => json!(n.to_string()),
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn presentation(path: &Path) -> Result<Presentation> {
    Ok(Presentation::parse(&read(path)?)?)
}

fn place(text: &str) -> Result<Place> {
    Ok(Place::from_str(text)?)
}

fn rep_spec(text: &str, names: &[String], place: Place) -> Result<RepSpec> {
    let body = match text.strip_prefix("tensor:") {
        Some(path) => read(Path::new(path))?,
        None => text.to_string(),
    };
    Ok(parse_rep(&body, names, place)?)
}

fn write_out(csv: &str, out: &Option<PathBuf>) -> Result<()> {
    match out {
        Some(p) => fs::write(p, csv).with_context(|| format!("writing {}", p.display())),
        None => {
            emit(csv);
            Ok(())
        }
    }
}

fn hall(m: u32, weight: usize) -> Result<()> {
    let basis = HallBasis::new(m, weight)?;
    let entries: Vec<Value> = basis
        .elements()
        .iter()
        .map(|c| json!({"ordinal": c.ordinal, "weight": c.weight, "expr": basis.expr(c.ordinal)}))
        .collect();
    print_json(&json!({"m": m, "levels": basis.level_sizes(), "basis": entries}));
    Ok(())
}

fn collect(m: u32, p: usize, word: &str) -> Result<()> {
    let w = parse_word_default(word, m)?;
    let basis = HallBasis::new(m, (p - 1).max(1))?;
    let factors = basis.collect(&w, p)?;
    let out: Vec<Value> = factors
        .iter()
        .map(|f| json!({"expr": basis.expr(f.ordinal), "weight": basis.get(f.ordinal).weight, "exponent": f.exponent}))
        .collect();
    print_json(&json!({"p": p, "factors": out, "verified": basis.congruent_mod(&w, &factors, p)}));
    Ok(())
}

fn coords(m: u32, q: usize, word: &str) -> Result<()> {
    let w = parse_word_default(word, m)?;
    let basis = HallBasis::new(m, q)?;
    let c = basis.abelian_coords(&w, q)?;
    let basis_json: Vec<Value> = basis
        .level(q)
        .map(|o| json!({"weight": q, "expr": basis.expr(o)}))
        .collect();
    let entries: Vec<Value> = c.entries.iter().map(big).collect();
    print_json(&json!({"basis": basis_json, "coords": entries}));
    Ok(())
}

fn depth(m: u32, cap: usize, word: &str) -> Result<()> {
    let w = parse_word_default(word, m)?;
    let v = match lcs_depth(&w, cap) {
        Depth::Exact(q) => json!({"depth": q, "exact": true}),
        Depth::AtLeast(q) => json!({"depth": q, "exact": false}),
    };
    print_json(&v);
    Ok(())
}

fn mu_cmd(place_text: &str, path: &Path) -> Result<()> {
    let pl = place(place_text)?;
    let rows: Vec<Vec<Value>> = serde_json::from_str(&read(path)?).context("matrix file must be a JSON array of rows")?;
    let rows = rows
        .into_iter()
        .map(|r| {
            r.into_iter()
                .map(|x| {
                    let s = match x {
                        Value::String(s) => s,
                        Value::Number(n) => n.to_string(),
                        other => bail!("matrix entry {other} is not a rational"),
                    };
                    Rational::from_str(s.trim()).map_err(|_| anyhow::anyhow!("cannot parse rational `{s}`"))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let g = ExactMatrix::from_rows(rows)?;
    let v = mu(pl, &g)?;
    let n = match pl {
        Place::PAdic(p) => json!(invariant_factor_valuations(p, &g)?),
        Place::Real => Value::Null,
    };
    print_json(&json!({
        "place": pl.to_string(),
        "n": n,
        "mu": v.values(),
        "norm": mu_norm(&v),
        "exact": v.exact_strings(),
        "error_bound": v.error_bound(),
    }));
    Ok(())
}

fn fiber_gens(m: u32, normal: &[String]) -> Result<FiberGenerators> {
    let normal: Vec<&str> = normal.iter().map(String::as_str).collect();
    Ok(FiberGenerators::parse(m, &normal)?)
}

fn wordlen(m: u32, normal: &[String], witness: &str, cap: usize) -> Result<()> {
    let gens = fiber_gens(m, normal)?;
    let w = parse_word_default(witness, gens.witness_rank())?;
    let e = evaluate(&gens, &w)?;
    let names = default_names(m);
    let len = bfs_length(&gens, &e, cap);
    print_json(&json!({
        "left": e.left.display_with(&names),
        "right": e.right.display_with(&names),
        "ambient_length": e.ambient_length(),
        "length": len.to_string(),
        "exact": len.exact().is_some(),
    }));
    Ok(())
}

fn vq(a: &VqArgs) -> Result<()> {
    let basis = HallBasis::new(a.m, DEFAULT_MAX_WEIGHT)?;
    let spec = TestSequenceSpec::new(&basis, &a.v, &a.b2, a.q, a.n)?;
    let gens = fiber_gens(a.m, &a.normal)?;
    let ns: Vec<i64> = match a.nmax {
        Some(k) => (1..=k).collect(),
        None => vec![a.n],
    };
    let mut csv = String::from("q,n,beta,coord_value,bfs_len_or_cap\n");
    for n in ns {
        let s = spec.with_n(n)?;
        let cert = coordinate_certificate(&basis, &s)?;
        let bfs = if a.cap > 0 {
            bfs_length(&gens, &build_vq(&s)?, a.cap).to_string()
        } else {
            String::new()
        };
        csv.push_str(&format!("{},{},{},{},{}\n", a.q, n, cert.beta, cert.value, bfs));
    }
    emit(&csv);
    Ok(())
}

fn check_sc(lambda: &str, path: &Path) -> Result<()> {
    let p = presentation(path)?;
    let l = Rational::from_str(lambda).map_err(|_| anyhow::anyhow!("cannot parse λ `{lambda}`"))?;
    let (ok, r) = check_metric(&p, &l);
    let witness = r.witness.as_ref().map(|w| {
        json!({
            "word": p.display_word(&w.word),
            "first": {"relator": w.first.relator + 1, "inverted": w.first.inverted, "offset": w.first.offset},
            "second": {"relator": w.second.relator + 1, "inverted": w.second.inverted, "offset": w.second.offset},
        })
    });
    print_json(&json!({
        "lambda": l.to_string(),
        "satisfied": ok,
        "worstRatio": r.worst_ratio.to_string(),
        "maxPiece": r.max_piece,
        "relatorLengths": r.relator_lengths,
        "relatorPieces": r.relator_pieces,
        "totalLength": p.total_length(),
        "witness": witness,
    }));
    Ok(())
}

fn rips(scale: i64, path: &Path, fiber: bool) -> Result<()> {
    let p = presentation(path)?;
    let out = match rips_construct(&p, scale) {
        Ok(o) => o,
        Err(SmallCancError::MetricFailed { report, .. }) => {
            bail!(
                "output fails C'(1/6): worstRatio {} (maximal piece {}); retry with a larger --scale",
                report.worst_ratio,
                report.max_piece
            )
        }
        Err(e) => return Err(e.into()),
    };
    let target = if fiber { fiber_presentation(&out)? } else { out.presentation.clone() };
    let (ok, r) = check_metric(&out.presentation, &Rational::new(1.into(), 6.into()));
    emit(&target.to_text());
    eprintln!(
        "{}",
        json!({
            "relators": target.relators().len(),
            "totalLength": target.total_length(),
            "smallCancellation": ok,
            "worstRatio": r.worst_ratio.to_string(),
        })
    );
    Ok(())
}

fn dehn(word: &str, path: &Path) -> Result<()> {
    let p = presentation(path)?;
    let w = p.parse_word(word)?;
    let r = dehn_reduce(&p, &w)?;
    print_json(&json!({
        "input_length": w.len(),
        "reduced": p.display_word(&r),
        "reduced_length": r.len(),
        "trivial": r.is_empty(),
    }));
    Ok(())
}

fn area_cmd(word: &str, cap: usize, path: &Path) -> Result<()> {
    let p = presentation(path)?;
    let w = p.parse_word(word)?;
    let a = area(&p, &w, cap)?;
    print_json(&json!({"cap": cap, "area": a.to_string(), "exact": a.exact().is_some()}));
    Ok(())
}

fn experiment(e: &Experiment) -> Result<()> {
    match e {
        Experiment::Qie {
            common,
            d,
            v,
            b2,
            m,
            normal,
            nmax,
            bfs_cap,
            bfs_nmax,
        } => {
            let spec = rep_spec(&common.rep, &default_names(*m), place(&common.place)?)?;
            let rep = Rep::build(&spec, *m)?;
            let cfg = QieConfig {
                d: *d,
                v: v.clone(),
                b2: b2.clone(),
                rank: *m,
                normal: normal.clone(),
                nmax: *nmax,
                bfs_cap: *bfs_cap,
                bfs_nmax: *bfs_nmax,
                seed: common.seed,
            };
            let r = experiment_qie(&cfg, &rep)?;
            write_out(&r.to_csv(), &common.out)?;
            eprintln!("beta={} mu_slope={:.6} bfs_consistent={}", r.beta, r.mu_slope, r.bfs_consistent());
        }
        Experiment::Commutator {
            common,
            r,
            budget,
            trials,
            m,
        } => {
            let spec = rep_spec(&common.rep, &default_names(*m), place(&common.place)?)?;
            let rep = Rep::build(&spec, *m)?;
            let cfg = CommutatorConfig {
                r: *r,
                budgets: budget.clone(),
                trials: *trials,
                seed: common.seed,
                rank: *m,
            };
            let rep = experiment_commutator_bound(&cfg, &rep)?;
            write_out(&rep.to_csv(), &common.out)?;
            eprintln!("growth={:.6} bounded={}", rep.growth, rep.bounded);
        }
        Experiment::Semisimple {
            common,
            budget,
            trials,
            m,
            normal,
            brackets,
        } => {
            let spec = rep_spec(&common.rep, &default_names(*m), place(&common.place)?)?;
            let rep = Rep::build(&spec, *m)?;
            let cfg = SemisimpleConfig {
                budgets: budget.clone(),
                trials: *trials,
                seed: common.seed,
                rank: *m,
                normal: normal.clone(),
                brackets: *brackets,
            };
            let rep = experiment_semisimple(&cfg, &rep)?;
            write_out(&rep.to_csv(), &common.out)?;
            eprintln!("growth={:.6} bounded={}", rep.growth, rep.bounded);
        }
        Experiment::Rips {
            d,
            nmax,
            scale,
            rep,
            out,
        } => {
            let names: Vec<String> = ["a", "b", "x", "y"].map(String::from).to_vec();
            let reps = rep
                .iter()
                .map(|t| {
                    let (body, pl) = t.rsplit_once('@').unwrap_or((t, "p:5"));
                    Ok((t.clone(), rep_spec(body, &names, place(pl)?)?))
                })
                .collect::<Result<Vec<_>>>()?;
            let cfg = RipsConfig {
                d: *d,
                nmax: *nmax,
                scale: *scale,
                ..RipsConfig::default()
            };
            let r = experiment_rips(&cfg, &reps)?;
            write_out(&r.to_csv(), out)?;
            let slopes: Vec<String> = r.slopes.iter().map(|s| format!("{s:.6}")).collect();
            eprintln!("worstRatio={} slopes={}", r.worst_ratio, slopes.join(","));
        }
    }
    Ok(())
}

fn main() -> Result<()> {
    let args = expand_config(std::env::args().collect())?;
    let cli = Cli::parse_from(args);
    match &cli.command {
        Command::Hall { m, weight } => hall(*m, *weight),
        Command::Collect { m, p, word } => collect(*m, *p, word),
        Command::Coords { m, q, word } => coords(*m, *q, word),
        Command::Depth { m, cap, word } => depth(*m, *cap, word),
        Command::Mu { place, matrix } => mu_cmd(place, matrix),
        Command::Wordlen {
            m,
            normal,
            target_witness,
            cap,
        } => wordlen(*m, normal, target_witness, *cap),
        Command::Vq(a) => vq(a),
        Command::CheckSc { lambda, file } => check_sc(lambda, file),
        Command::Rips { scale, file } => rips(*scale, file, false),
        Command::Fiberpres { scale, file } => rips(*scale, file, true),
        Command::Dehn { word, file } => dehn(word, file),
        Command::Area { word, cap, file } => area_cmd(word, *cap, file),
        Command::Experiment(e) => experiment(e),
    }
}
