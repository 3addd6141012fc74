//! The library against the brute-force model in `common`, on fixtures and on
//! seeded random matrices.

mod common;

use cib::{
    basin_weights, enumerate_consistent, impact_balance, inconsistency_score, successor, trace,
    Attractor, SolveOptions, SuccessionRule, Weight,
};
use common::{rng, scenario, tuple, Basins, Dense, End};

fn library_basins(d: &Dense, rule: SuccessionRule) -> Basins {
    let table = basin_weights(&d.to_cim(), rule, &SolveOptions::default()).unwrap();
    let mut out = Basins {
        total: table.total,
        ..Basins::default()
    };
    for e in &table.entries {
        assert_eq!(e.weight, Weight::new(e.basin, table.total));
        out.fixed.insert(tuple(&e.scenario), e.basin);
    }
    for c in &table.cycles {
        out.cycles
            .insert(c.cycle.iter().map(tuple).collect(), c.basin);
    }
    out
}

fn check_instance(d: &Dense) {
    let cim = d.to_cim();
    let options = SolveOptions::default();
    for tolerance in [0u32, 1, 3] {
        let lib: Vec<_> = enumerate_consistent(&cim, tolerance, &options)
            .unwrap()
            .iter()
            .map(tuple)
            .collect();
        assert_eq!(
            lib,
            d.consistent_set(tolerance as i64),
            "tolerance {tolerance} on {d:?}"
        );
    }
    for z in d.scenarios() {
        let s = scenario(&z);
        for j in 0..d.n() {
            assert_eq!(
                impact_balance(&cim, &s, j).unwrap().balances,
                d.balances(&z, j)
            );
        }
        let score = (0..d.n()).map(|j| d.gap(&z, j)).max().unwrap();
        assert_eq!(inconsistency_score(&cim, &s).unwrap() as i64, score);
        for rule in SuccessionRule::ALL {
            assert_eq!(
                tuple(&successor(&cim, &s, rule).unwrap()),
                d.step(&z, rule),
                "{rule} from {z:?} on {d:?}"
            );
            let t = trace(&cim, &s, rule).unwrap();
            let (history, end) = d.walk(&z, rule);
            assert_eq!(t.path.iter().map(tuple).collect::<Vec<_>>(), history);
            let attractor = match &t.attractor {
                Attractor::FixedPoint(f) => End::Fixed(tuple(f)),
                Attractor::Cycle(c) => End::Cycle(c.iter().map(tuple).collect()),
            };
            assert_eq!(attractor, end);
        }
    }
    for rule in SuccessionRule::ALL {
        assert_eq!(library_basins(d, rule), d.basins(rule), "{rule} on {d:?}");
    }
}

#[test]
fn mutual2_matches_brute_force() {
    let mut d = Dense::zero(&[2, 2]);
    d.set(0, 1, vec![vec![3, -3], vec![-3, 3]]);
    d.set(1, 0, vec![vec![3, -3], vec![-3, 3]]);
    check_instance(&d);

    let global = d.basins(SuccessionRule::Global);
    assert_eq!(
        global.fixed.into_iter().collect::<Vec<_>>(),
        vec![(vec![1, 1], 1), (vec![2, 2], 1)]
    );
    assert_eq!(
        global.cycles.into_iter().collect::<Vec<_>>(),
        vec![(vec![vec![1, 2], vec![2, 1]], 2)]
    );
    let local = d.basins(SuccessionRule::Local);
    assert_eq!(
        local.fixed.into_iter().collect::<Vec<_>>(),
        vec![(vec![1, 1], 2), (vec![2, 2], 2)]
    );
    assert!(local.cycles.is_empty());
}

#[test]
fn random_dense_matrices_match_brute_force() {
    let mut r = rng(0x0dd5);
    for _ in 0..150 {
        let n = 2 + (r_u(&mut r) % 3) as usize;
        let d = common::random_dense(&mut r, n, 3, 1.0);
        check_instance(&d);
    }
}

#[test]
fn random_sparse_matrices_match_brute_force() {
    let mut r = rng(0x5a25e);
    for _ in 0..150 {
        let n = 2 + (r_u(&mut r) % 4) as usize;
        let d = common::random_dense(&mut r, n, 3, 0.35);
        check_instance(&d);
    }
}

#[test]
fn four_state_descriptors_exercise_incremental_moves() {
    let mut r = rng(0x1ac);
    for _ in 0..60 {
        let d = common::random_dense(&mut r, 3, 5, 0.8);
        check_instance(&d);
    }
}

fn r_u(r: &mut rand_chacha::ChaCha8Rng) -> u32 {
    use rand::RngCore;
    r.next_u32()
}
