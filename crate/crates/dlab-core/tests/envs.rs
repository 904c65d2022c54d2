use dlab_core::envs::{cheating_code, combination_lock, random_low_rank, random_tabular, Policy, TabularMDP};
use dlab_core::rl::{initial_value, value_iteration};
use dlab_core::Stream;
use proptest::prelude::*;

/// Return of an open-loop action sequence, by brute-force expansion.
fn sequence_value(m: &TabularMDP, seq: &[usize]) -> f64 {
    let mut dist = m.d1.probs().to_vec();
    let mut total = 0.0;
    for (h, &a) in seq.iter().enumerate() {
        let mut next = vec![0.0; m.s];
        for s in 0..m.s {
            total += dist[s] * m.reward(h, s, a);
            for (n, p) in next.iter_mut().zip(m.row(h, s, a)) {
                *n += dist[s] * p;
            }
        }
        dist = next;
    }
    total
}

#[test]
fn lock_enumeration() {
    for h in 1..=6 {
        let lock = combination_lock(h);
        let opening: Vec<u32> = (0..1u32 << h)
            .filter(|bits| {
                let seq: Vec<usize> = (0..h).map(|i| ((bits >> i) & 1) as usize).collect();
                sequence_value(&lock, &seq) == 1.0
            })
            .collect();
        assert_eq!(opening.len(), 1, "H = {h}");
        let (vf, pi) = value_iteration(&lock);
        assert_eq!(vf.v[0][0], 1.0);
        let seq: Vec<usize> = (0..h).map(|i| ((opening[0] >> i) & 1) as usize).collect();
        let greedy: Vec<usize> = (0..h).map(|l| (0..2).find(|&a| pi.probs[l][l][a] == 1.0).unwrap()).collect();
        assert_eq!(greedy, seq);
    }
}

#[test]
fn lock_uniform_value_monte_carlo() {
    let h = 4;
    let lock = combination_lock(h);
    let pi = Policy::uniform(h, h + 2, 2);
    assert_eq!(lock.policy_value(&pi), 1.0 / 16.0);
    let mut rng = Stream::from_seed(12);
    let n = 40_000;
    let hits = (0..n).filter(|_| lock.rollout(&pi, &mut rng).unwrap().total_reward() == 1.0).count();
    let p = 1.0 / 16.0;
    let se = (p * (1.0 - p) / n as f64).sqrt();
    assert!((hits as f64 / n as f64 - p).abs() < 4.0 * se);
}

#[test]
fn policy_value_matches_monte_carlo() {
    let mut rng = Stream::from_seed(31);
    let m = random_tabular(3, 2, 4, &mut rng);
    let pi = Policy::random_stochastic(4, 3, 2, &mut rng);
    let n = 100_000;
    let returns: Vec<f64> = (0..n).map(|_| m.rollout(&pi, &mut rng).unwrap().total_reward()).collect();
    let mean = returns.iter().sum::<f64>() / n as f64;
    let var = returns.iter().map(|r| (r - mean) * (r - mean)).sum::<f64>() / (n - 1) as f64;
    assert!((mean - m.policy_value(&pi)).abs() < 3.0 * (var / n as f64).sqrt());
}

#[test]
fn optimal_beats_random_policies() {
    let mut rng = Stream::from_seed(5);
    let m = random_tabular(4, 3, 5, &mut rng);
    let (vf, pi) = value_iteration(&m);
    let best = m.policy_value(&pi);
    assert!((best - initial_value(&m, &vf.v[0])).abs() < 1e-12);
    for i in 0..200 {
        let other = if i % 2 == 0 { Policy::random_deterministic(5, 4, 3, &mut rng) } else { Policy::random_stochastic(5, 4, 3, &mut rng) };
        assert!(m.policy_value(&other) <= best + 1e-12);
    }
}

#[test]
fn rollout_replay() {
    let m = random_tabular(4, 2, 5, &mut Stream::from_seed(2));
    let pi = Policy::uniform(5, 4, 2);
    let a = m.rollout(&pi, &mut Stream::from_seed(99)).unwrap();
    let b = m.rollout(&pi, &mut Stream::from_seed(99)).unwrap();
    assert_eq!(a, b);
    for (h, st) in a.steps.iter().enumerate() {
        assert_eq!(st.r, m.reward(h, st.s, st.a));
    }
}

#[test]
fn cheating_code_decodes() {
    let (code, _) = cheating_code(8).unwrap();
    assert_eq!(code.decisions(), 11);
    for (i, m) in code.models.iter().enumerate() {
        let cheat: Vec<f64> = (8..11).map(|c| m.mean(c)).collect();
        assert_eq!(code.decode(&cheat), i);
        for pi in 0..8 {
            if pi != i {
                assert_eq!(m.regret(pi), 0.25);
            }
        }
    }
    assert!(cheating_code(6).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn occupancy_is_consistent(seed in 0u64..10_000, s in 1usize..5, a in 1usize..4, h in 1usize..6) {
        let mut rng = Stream::from_seed(seed);
        let m = random_tabular(s, a, h, &mut rng);
        let pi = Policy::random_stochastic(h, s, a, &mut rng);
        let occ = m.occupancy(&pi);
        let mut value = 0.0;
        for (l, d) in occ.iter().enumerate() {
            prop_assert!((d.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            for (i, x) in d.iter().enumerate() {
                value += x * m.r[l * s * a + i];
            }
        }
        prop_assert!((value - m.policy_value(&pi)).abs() < 1e-12);
        for (i, x) in occ[0].iter().enumerate() {
            prop_assert!((x - m.d1.probs()[i / a] * pi.probs[0][i / a][i % a]).abs() < 1e-15);
        }
    }

    #[test]
    fn low_rank_rows_are_distributions(seed in 0u64..10_000, d in 1usize..4) {
        let m = random_low_rank(5, 2, 3, d, &mut Stream::from_seed(seed));
        let t = m.tabular();
        for row in t.p.chunks(5) {
            prop_assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            prop_assert!(row.iter().all(|&x| x >= 0.0));
        }
    }
}
