use fiberqi::cartan::{mu, Place};
use fiberqi::experiments::{
    experiment_commutator_bound, experiment_qie, experiment_semisimple, parse_rep, CommutatorConfig, QieConfig, Rep,
    SemisimpleConfig,
};
use fiberqi::fiber::{evaluate, FiberGenerators};
use fiberqi::freegroup::default_names;
use fiberqi::{ExactMatrix, Rational, Word};
use num_bigint::BigInt;
use proptest::prelude::*;

const KINDS: [(&str, Place); 6] = [
    ("pfree:5", Place::PAdic(5)),
    ("sanov", Place::Real),
    ("trivial+pfree:3", Place::PAdic(3)),
    ("pilambda:2/3", Place::PAdic(3)),
    ("piunipotent", Place::Real),
    ("pilambda:5+piunipotent", Place::PAdic(5)),
];

fn rep(text: &str, place: Place) -> Rep {
    Rep::build(&parse_rep(text, &default_names(2), place).unwrap(), 2).unwrap()
}

fn gens() -> FiberGenerators {
    FiberGenerators::parse(2, &["[x1,x2]"]).unwrap()
}

fn witness() -> impl Strategy<Value = Word> {
    prop::collection::vec(prop::sample::select(vec![1, -1, 2, -2, 3, -3]), 0..8)
        .prop_map(|l| Word::reduce(3, &l).unwrap())
}

fn m(rows: [[i64; 2]; 2], den: [[i64; 2]; 2]) -> ExactMatrix {
    ExactMatrix::from_rows(
        (0..2)
            .map(|i| (0..2).map(|j| Rational::new(rows[i][j].into(), den[i][j].into())).collect())
            .collect(),
    )
    .unwrap()
}

/// `I ⊗ ρ(w)` for the `pfree:5` factor, multiplied out letter by letter.
fn identity_tensor_pfree5(w: &Word) -> ExactMatrix {
    let ones = [[1, 1], [1, 1]];
    let u = m([[1, 1], [0, 1]], ones);
    let l = m([[1, 0], [1, 1]], [[1, 1], [5, 1]]);
    let images = [u.inverse().unwrap(), u, l.inverse().unwrap(), l];
    let mut acc = ExactMatrix::identity(2);
    for x in w.letters() {
        let k = 2 * (x.unsigned_abs() as usize - 1) + usize::from(x > 0);
        acc = &acc * &images[k];
    }
    ExactMatrix::identity(2).kron(&acc)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn evaluation_is_a_homomorphism(u in witness(), v in witness()) {
        let g = gens();
        let eu = evaluate(&g, &u).unwrap();
        let ev = evaluate(&g, &v).unwrap();
        let euv = evaluate(&g, &u.multiply(&v).unwrap()).unwrap();
        for (text, place) in KINDS {
            let r = rep(text, place);
            let lhs = r.eval(&euv).unwrap();
            let rhs = &r.eval(&eu).unwrap() * &r.eval(&ev).unwrap();
            prop_assert_eq!(lhs, rhs, "{}", text);
        }
    }

    #[test]
    fn tensor_mu_of_right_factor(l in prop::collection::vec(prop::sample::select(vec![1, -1, 2, -2]), 0..14)) {
        let w = Word::reduce(2, &l).unwrap();
        let r = rep("pfree:5", Place::PAdic(5));
        let g = r.eval_pair(&Word::identity(2), &w).unwrap();
        let want = identity_tensor_pfree5(&w);
        prop_assert_eq!(&g, &want);
        let a = mu(Place::PAdic(5), &g).unwrap();
        let b = mu(Place::PAdic(5), &want).unwrap();
        prop_assert_eq!(a.exact().unwrap(), b.exact().unwrap());
    }
}

#[test]
fn qie_coordinates_are_powers() {
    let r = rep("pilambda:2", Place::PAdic(2));
    for d in 0..=2u32 {
        let cfg = QieConfig {
            d,
            nmax: 6,
            bfs_nmax: 0,
            ..QieConfig::default()
        };
        let out = experiment_qie(&cfg, &r).unwrap();
        assert_eq!(out.beta, 2 * d as usize + 3);
        for row in &out.rows {
            assert_eq!(row.coord_value, BigInt::from(row.n).pow(out.beta as u32));
        }
    }
}

#[test]
fn csv_is_byte_deterministic() {
    let r = rep("pfree:5", Place::PAdic(5));
    let qie = QieConfig {
        nmax: 8,
        bfs_nmax: 1,
        ..QieConfig::default()
    };
    let comm = CommutatorConfig {
        trials: 12,
        seed: 11,
        ..CommutatorConfig::default()
    };
    let semi = SemisimpleConfig {
        trials: 12,
        seed: 11,
        ..SemisimpleConfig::default()
    };
    let run = || {
        (
            experiment_qie(&qie, &r).unwrap().to_csv(),
            experiment_commutator_bound(&comm, &r).unwrap().to_csv(),
            experiment_semisimple(&semi, &r).unwrap().to_csv(),
        )
    };
    let first = run();
    let single = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap().install(run);
    assert_eq!(first, run());
    assert_eq!(first, single);
    assert!(first.1.starts_with("# experiment=commutator seed=11 "));
    let other = CommutatorConfig { seed: 12, ..comm.clone() };
    assert_ne!(first.1, experiment_commutator_bound(&other, &r).unwrap().to_csv());
}
