use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vrsuite_core::analysis::leaderboard::{self, MODELS};
use vrsuite_core::analysis::{pearson, residual_capability_matrix, spearman, win_ratios, Outcome, PairRecord, PairwiseTable};
use vrsuite_core::evalkit::round3;

fn random_table(rng: &mut ChaCha8Rng) -> PairwiseTable {
    let models = rng.gen_range(2..6);
    let mut records = Vec::new();
    for s in 0..rng.gen_range(1..20) {
        for a in 0..models {
            for b in a + 1..models {
                if rng.gen_bool(0.6) {
                    let outcome = [Outcome::A, Outcome::B, Outcome::Tie][rng.gen_range(0..3)];
                    records.push(PairRecord::new(&format!("s{s}"), &format!("m{a}"), &format!("m{b}"), outcome));
                }
            }
        }
    }
    PairwiseTable::new(records).unwrap()
}

#[test]
fn win_ratio_conservation() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..1000 {
        let t = random_table(&mut rng);
        if t.records().is_empty() {
            continue;
        }
        for r in t.records() {
            let (a, b) = r.points();
            assert_eq!(a + b, 1.0);
        }
        let ratios = win_ratios(&t).unwrap();
        let mut weighted = 0.0;
        let mut appearances = 0usize;
        for (m, ratio) in &ratios {
            let n = t.records().iter().filter(|r| &r.model_a == m || &r.model_b == m).count();
            weighted += ratio * n as f64;
            appearances += n;
        }
        assert!((weighted / appearances as f64 - 0.5).abs() < 1e-12);
    }
}

#[test]
fn tie_only_tables_give_one_half() {
    let t = PairwiseTable::new(vec![
        PairRecord::new("s1", "a", "b", Outcome::Tie),
        PairRecord::new("s1", "a", "c", Outcome::Tie),
        PairRecord::new("s2", "b", "c", Outcome::Tie),
    ])
    .unwrap();
    assert!(win_ratios(&t).unwrap().values().all(|r| *r == 0.5));
}

/// Ranks by counting, independent of the library's sort-based ranking.
fn oracle_ranks(x: &[f64]) -> Vec<f64> {
    x.iter()
        .map(|v| {
            let below = x.iter().filter(|w| *w < v).count() as f64;
            let equal = x.iter().filter(|w| *w == v).count() as f64;
            below + (equal + 1.0) / 2.0
        })
        .collect()
}

#[test]
fn spearman_with_ties_matches_oracle() {
    let (x, y) = ([1.0, 2.0, 2.0, 4.0], [1.0, 3.0, 2.0, 4.0]);
    let want = pearson(&oracle_ranks(&x), &oracle_ranks(&y)).unwrap();
    assert!((spearman(&x, &y).unwrap() - want).abs() < 1e-12);
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..200 {
        let n = rng.gen_range(3..10);
        let x: Vec<f64> = (0..n).map(|_| rng.gen_range(0..5) as f64).collect();
        let y: Vec<f64> = (0..n).map(|_| rng.gen_range(0..5) as f64).collect();
        match (spearman(&x, &y), pearson(&oracle_ranks(&x), &oracle_ranks(&y))) {
            (Ok(a), Ok(b)) => assert!((a - b).abs() < 1e-12),
            (Err(_), Err(_)) => {}
            other => panic!("{other:?}"),
        }
    }
}

proptest! {
    #[test]
    fn residuals_are_orthogonal_to_the_general_factor(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s: Vec<[f64; 5]> = (0..9).map(|_| std::array::from_fn(|_| rng.gen_range(0.0..1.0))).collect();
        let g: Vec<f64> = s.iter().map(|r| r.iter().sum::<f64>() / 5.0 + rng.gen_range(-0.05..0.05)).collect();
        let m = residual_capability_matrix(&s, &g).unwrap();
        for e in &m.residuals {
            let gm = g.iter().sum::<f64>() / 9.0;
            let em = e.iter().sum::<f64>() / 9.0;
            let cov: f64 = g.iter().zip(e).map(|(a, b)| (a - gm) * (b - em)).sum();
            let norm = (g.iter().map(|a| (a - gm).powi(2)).sum::<f64>() * e.iter().map(|b| (b - em).powi(2)).sum::<f64>()).sqrt();
            prop_assert!((cov / norm).abs() < 1e-10);
        }
        for i in 0..5 {
            prop_assert_eq!(m.values[i][i], 1.0);
            for j in 0..5 {
                prop_assert_eq!(m.values[i][j], m.values[j][i]);
                prop_assert!((-1.0..=1.0).contains(&m.values[i][j]));
            }
        }
    }
}

#[test]
fn leaderboard_overall_is_mean_of_splits() {
    for (name, row) in MODELS.iter().chain([&leaderboard::HUMAN]) {
        let overall = round3((leaderboard::id_avg(row) + leaderboard::ood_avg(row)) / 2.0);
        assert_eq!(overall, row[0], "{name}");
    }
}
