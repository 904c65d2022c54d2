use dlab_core::bandits::*;
use dlab_core::envs::BanditModel;
use dlab_core::{FiniteDist, Seed, Stream, StreamKey};
use proptest::prelude::*;

fn softmax(l: &[f64], eta: f64) -> Vec<f64> {
    let m = l.iter().map(|x| -eta * x).fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = l.iter().map(|x| (-eta * x - m).exp()).collect();
    let z: f64 = w.iter().sum();
    w.iter().map(|x| x / z).collect()
}

/// Exact expected cumulative loss of Exp3 by expanding every arm sequence.
fn exp3_tree(losses: &[[f64; 2]], eta: f64, t: usize, est: [f64; 2]) -> f64 {
    if t == losses.len() {
        return 0.0;
    }
    let p = softmax(&est, eta);
    let mut total = 0.0;
    for a in 0..2 {
        let mut next = est;
        next[a] += losses[t][a] / p[a];
        total += p[a] * (losses[t][a] + exp3_tree(losses, eta, t + 1, next));
    }
    total
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn exp3_full_tree_regret(raw in prop::collection::vec((0.0f64..1.0, 0.0f64..1.0), 1..=12)) {
        let losses: Vec<[f64; 2]> = raw.iter().map(|&(a, b)| [a, b]).collect();
        let t = losses.len();
        let eta = exp3_eta(2, t);
        let expected = exp3_tree(&losses, eta, 0, [0.0, 0.0]);
        let best = (0..2).map(|a| losses.iter().map(|l| l[a]).sum::<f64>()).fold(f64::INFINITY, f64::min);
        prop_assert!(expected - best <= 3.0 * (2.0 * t as f64 * 2f64.ln()).sqrt());
    }

    #[test]
    fn exp3_matches_reference_weights(raw in prop::collection::vec((0.0f64..1.0, 0.0f64..1.0, 0usize..2), 1..40)) {
        let mut algo = Exp3::new(2, raw.len());
        let eta = exp3_eta(2, raw.len());
        let mut est = [0.0f64; 2];
        for &(l0, l1, arm) in &raw {
            let p = algo.act(1);
            let want = softmax(&est, eta);
            prop_assert!((p.probs()[0] - want[0]).abs() < 1e-12);
            // Only replay arms the learner could plausibly have drawn.
            let arm = if want[arm] < 1e-3 { 1 - arm } else { arm };
            let loss = [l0, l1][arm];
            est[arm] += loss / want[arm];
            algo.observe(arm, 1.0 - loss, &p).unwrap();
        }
    }

    #[test]
    fn exp3_estimator_unbiased(p0 in 0.01f64..0.99, l0 in 0.0f64..1.0, l1 in 0.0f64..1.0) {
        let p = FiniteDist::new(vec![p0, 1.0 - p0]).unwrap();
        let l = [l0, l1];
        let mut mean = [0.0; 2];
        for arm in 0..2 {
            let e = exp3_loss_estimate(2, arm, l[arm], &p).unwrap();
            for k in 0..2 {
                mean[k] += p.probs()[arm] * e[k];
            }
        }
        prop_assert!((mean[0] - l0).abs() < 1e-12 && (mean[1] - l1).abs() < 1e-12);
    }
}

#[test]
fn exp3_estimate_fixture() {
    let p = FiniteDist::uniform(2);
    assert_eq!(exp3_loss_estimate(2, 0, 1.0, &p).unwrap(), vec![2.0, 0.0]);
    let tiny = FiniteDist::new(vec![1.0, 0.0]).unwrap();
    assert!(exp3_loss_estimate(2, 1, 1.0, &tiny).is_err());
    let mut algo = Exp3::new(3, 100);
    for _ in 0..50 {
        let p = algo.act(1);
        algo.observe(1, 1.0, &p).unwrap();
    }
    assert_eq!(algo.act(1), FiniteDist::uniform(3));
}

struct UcbAudit {
    valid: bool,
    width_ok: bool,
    potential: f64,
}

fn audit_ucb(means: &[f64], horizon: usize, delta: f64, seed: u64) -> UcbAudit {
    let env = BanditModel::gaussian(means);
    let a = means.len();
    let key = StreamKey::new(Seed(seed), 40);
    let mut algo = Ucb::new(a, horizon, delta);
    let mut out = UcbAudit { valid: true, width_ok: true, potential: 0.0 };
    for t in 1..=horizon {
        let intervals = ucb_intervals(&algo.stats, horizon, delta);
        let round_valid = intervals.iter().zip(means).all(|((lo, hi), m)| lo <= m && m <= hi);
        out.valid &= round_valid;
        let p = algo.act(t);
        let arm = p.probs().iter().position(|&x| x == 1.0).unwrap();
        if round_valid {
            out.width_ok &= env.regret(arm) <= intervals[arm].1 - intervals[arm].0;
        }
        let n = algo.stats.n[arm];
        out.potential += if n == 0.0 { 1.0 } else { (1.0 / n.sqrt()).min(1.0) };
        let mut rng = key.round(t as u64);
        let r = env.sample(arm, &mut rng).unwrap();
        algo.observe(arm, r, &p).unwrap();
    }
    out
}

#[test]
fn ucb_optimism_and_width() {
    let means = [0.9, 0.6, 0.5, 0.4, 0.2];
    let (horizon, delta) = (400, 0.1);
    let mut valid = 0;
    for seed in 0..200 {
        let au = audit_ucb(&means, horizon, delta, seed);
        valid += au.valid as usize;
        assert!(au.width_ok, "seed {seed}");
        assert!(au.potential <= 5.0 + 2.0 * (5.0 * horizon as f64).sqrt());
    }
    assert!(valid as f64 >= 0.9 * 200.0, "{valid}/200");
}

#[test]
fn etc_commit_is_permanent() {
    let env = BanditModel::gaussian(&[0.3, 0.9, 0.1]);
    let mut algo = ExploreThenCommit::new(3, 30).unwrap();
    let key = StreamKey::new(Seed(4), 41);
    let mut committed = None;
    let ledger = run_bandit(&env, &mut algo, 10_000, key, 4, "etc", |t, p, arm, _| {
        if t <= 30 {
            assert_eq!(arm, (t - 1) % 3);
        } else {
            assert_eq!(p.probs()[arm], 1.0);
            assert_eq!(*committed.get_or_insert(arm), arm);
        }
    })
    .unwrap();
    assert_eq!(ledger.len(), 10_000);
    assert!(ExploreThenCommit::new(3, 10).is_err());
}

#[test]
fn optimal_arm_has_zero_regret() {
    let env = BanditModel::gaussian(&[0.1, 0.5, 0.4]);
    let mut algo = Oracle { arm: 1, arms: 3 };
    let l = run_bandit(&env, &mut algo, 100, StreamKey::new(Seed(1), 2), 1, "g", |_, _, _, _| {}).unwrap();
    assert!(l.rows.iter().all(|r| r.inst_regret == 0.0 && r.cum_regret == 0.0));
}

#[test]
fn posterior_sampling_bayesian_regret() {
    let a = 5;
    let class: Vec<BanditModel> = (0..a)
        .map(|i| BanditModel::gaussian(&(0..a).map(|j| if j == i { 0.7 } else { 0.5 }).collect::<Vec<_>>()))
        .collect();
    let uniform = posterior_sampling_act(&FiniteDist::uniform(a), &class);
    assert_eq!(uniform, FiniteDist::uniform(a));
    let horizon = 5000;
    let mut regrets: Vec<f64> = (0..20u64)
        .map(|seed| {
            let truth = Stream::from_seed(seed + 77).below(a);
            let mut algo = PosteriorSampling::new(class.clone());
            run_bandit(&class[truth], &mut algo, horizon, StreamKey::new(Seed(seed), 42), seed, "ps", |_, _, _, _| {})
                .unwrap()
                .cumulative()
        })
        .collect();
    regrets.sort_by(f64::total_cmp);
    let median = 0.5 * (regrets[9] + regrets[10]);
    assert!(median <= (a as f64 * horizon as f64 * (a as f64).ln()).sqrt(), "{median}");
}
