use dlab_core::contextual::*;
use dlab_core::envs::{ContextualEnv, LinearEnv, Noise};
use dlab_core::estimators::FiniteClass;
use dlab_core::{FiniteDist, Seed, Stream, StreamKey};
use proptest::prelude::*;

fn values(a: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0f64..1.0, a)
}

fn triple() -> impl Strategy<Value = (Vec<f64>, Vec<f64>, f64)> {
    (1usize..=4).prop_flat_map(|a| (values(a), values(a), 0.01f64..1000.0))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn squarecb_per_round_inequality((fhat, fstar, gamma) in triple()) {
        let p = squarecb_act(&fhat, gamma);
        let a = fhat.len() as f64;
        let best = fstar.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let (mut regret, mut err) = (0.0, 0.0);
        for i in 0..fhat.len() {
            regret += p.probs()[i] * (best - fstar[i]);
            err += p.probs()[i] * (fhat[i] - fstar[i]) * (fhat[i] - fstar[i]);
        }
        prop_assert!(regret <= a / gamma + gamma * err);
    }

    #[test]
    fn igw_normalizer_and_shape(v in (1usize..8).prop_flat_map(values), gamma in 0.0f64..500.0) {
        let g = igw(&v, gamma);
        let a = v.len() as f64;
        prop_assert!(g.lambda >= 1.0 - 1e-12 && g.lambda <= a + 1e-12);
        prop_assert!((g.p.probs().iter().sum::<f64>() - 1.0).abs() < 1e-9);
        let greedy = g.p.probs()[dlab_argmax(&v)];
        prop_assert!(g.p.probs().iter().all(|&x| x <= greedy));
    }

    #[test]
    fn igw_equalizes_at_four_gamma(v in (2usize..6).prop_flat_map(values), gamma in 0.1f64..100.0) {
        let coef = 4.0 * gamma;
        let g = igw_raw(&v, coef);
        let p = g.p.probs();
        let score: Vec<f64> = (0..v.len())
            .map(|s| p.iter().zip(&v).map(|(w, x)| w * (v[s] - x)).sum::<f64>() + 1.0 / (coef * p[s]))
            .collect();
        let lo = score.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = score.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        prop_assert!(hi - lo <= 1e-8 * hi.abs().max(1.0));
    }
}

fn dlab_argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for i in 1..v.len() {
        if v[i] > v[best] {
            best = i;
        }
    }
    best
}

#[test]
fn igw_limits() {
    let g = igw(&[0.2, 0.9, 0.5], 1e9);
    assert!(g.p.probs()[1] > 1.0 - 1e-6);
    assert_eq!(squarecb_act(&[0.2, 0.9, 0.5], 0.0), FiniteDist::uniform(3));
    assert_eq!(eps_greedy_cb_act(&[0.2, 0.9], 1.0, 2), FiniteDist::uniform(2));
}

fn contextual_fixture() -> (ContextualEnv, FiniteClass) {
    let mut rng = Stream::from_seed(90);
    let (nx, na) = (4, 3);
    let tables: Vec<Vec<Vec<f64>>> = (0..8).map(|_| (0..nx).map(|_| (0..na).map(|_| rng.uniform()).collect()).collect()).collect();
    let class = FiniteClass::new(tables.iter().map(|t| t.iter().flatten().copied().collect()).collect()).unwrap();
    let env = ContextualEnv::new(FiniteDist::uniform(nx), tables[5].clone(), Noise::Bernoulli).unwrap();
    (env, class)
}

#[test]
fn eps_greedy_cb_with_exact_oracle_is_optimal() {
    let (env, _) = contextual_fixture();
    let exact = FiniteClass::new(vec![env.f.iter().flatten().copied().collect()]).unwrap();
    let mut algo = EpsGreedyCb { oracle: OnlineLeastSquares::new(exact, 3), eps: 0.0 };
    let l = run_contextual(&env, &mut algo, 300, StreamKey::new(Seed(3), 50), 3, "cb").unwrap();
    assert_eq!(l.cumulative(), 0.0);
}

#[test]
fn epoch_oracle_never_reads_current_epoch() {
    let (env, class) = contextual_fixture();
    let horizon = 200;
    let mut algo = EpochSquareCb::new(class, 3, horizon, 0.1);
    run_contextual(&env, &mut algo, horizon, StreamKey::new(Seed(8), 51), 8, "cb").unwrap();
    assert_eq!(algo.fit_log.len(), algo.schedule.len() - 1);
    for &(e, first, last) in &algo.fit_log {
        let ep = &algo.schedule[e];
        assert!(last < ep.start, "epoch {e} fit read round {last}");
        assert_eq!(first, algo.schedule[e - 1].start);
        assert_eq!(last, algo.schedule[e - 1].end);
    }
}

#[test]
fn squarecb_learns_on_fixture() {
    let (env, class) = contextual_fixture();
    let horizon = 4000;
    let run = |algo: &mut dyn ContextualAlgorithm| run_contextual(&env, algo, horizon, StreamKey::new(Seed(1), 52), 1, "cb").unwrap();
    let gamma = squarecb_gamma(horizon, 3, 8f64.ln());
    let sq = run(&mut SquareCb { oracle: OnlineLeastSquares::new(class.clone(), 3), gamma });
    let uniform = run(&mut EpsGreedyCb { oracle: OnlineLeastSquares::new(class, 3), eps: 1.0 });
    assert!(sq.cumulative() < 0.5 * uniform.cumulative());
}

fn unit(v: &[f64]) -> Vec<f64> {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter().map(|x| x / n).collect()
}

/// Random realizable linear instances: unit features, `‖θ‖ ≤ 1`.
pub fn linear_instance(seed: u64, d: usize, arms: usize) -> LinearEnv {
    let mut rng = Stream::from_seed(seed);
    let features: Vec<Vec<f64>> = (0..arms).map(|_| unit(&(0..d).map(|_| rng.normal()).collect::<Vec<_>>())).collect();
    let theta: Vec<f64> = unit(&(0..d).map(|_| rng.normal()).collect::<Vec<_>>()).iter().map(|x| 0.9 * x).collect();
    LinearEnv::new(features, theta, Noise::Gaussian).unwrap()
}

#[test]
fn linucb_audits() {
    let (d, horizon, delta) = (3, 400, 0.1);
    let beta = linucb_beta(d, horizon, delta);
    let mut valid = 0;
    for seed in 0..50 {
        let env = linear_instance(seed, d, 10);
        let au = linucb_run(&env, horizon, beta, StreamKey::new(Seed(seed), 53), seed, "lin").unwrap();
        assert!(au.potential <= au.potential_bound, "seed {seed}");
        valid += au.valid as usize;
    }
    assert!(valid >= 45, "{valid}/50");
}
