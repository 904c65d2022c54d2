use dlab_core::dec_lab::*;
use dlab_core::envs::{cheating_code, BanditModel};
use dlab_core::{Seed, Stream, StreamKey};
use proptest::prelude::*;

// ---------- eluder dimension ----------

/// Longest `ε'`-independent sequence by plain DFS over sequences, with
/// repeats allowed and the length capped at `|Π| + 1`.
fn dfs_longest(dev: &[Vec<f64>], eps: f64) -> usize {
    fn go(dev: &[Vec<f64>], eps: f64, sums: &mut Vec<f64>, depth: usize, cap: usize) -> usize {
        if depth == cap {
            return depth;
        }
        let mut best = depth;
        for pi in 0..dev[0].len() {
            let ok = dev.iter().zip(sums.iter()).any(|(d, &s)| d[pi] > eps && s <= eps * eps);
            if ok {
                for (s, d) in sums.iter_mut().zip(dev) {
                    *s += d[pi] * d[pi];
                }
                best = best.max(go(dev, eps, sums, depth + 1, cap));
                for (s, d) in sums.iter_mut().zip(dev) {
                    *s -= d[pi] * d[pi];
                }
            }
        }
        best
    }
    let mut sums = vec![0.0; dev.len()];
    go(dev, eps, &mut sums, 0, dev[0].len() + 1)
}

/// Sup over `ε' ≥ ε`: evaluate at every breakpoint (deviations and square
/// roots of subset sums of squared deviations), at midpoints between them,
/// and once above the largest.
fn eluder_oracle(values: &[Vec<f64>], fstar: &[f64], eps: f64) -> usize {
    let n = fstar.len();
    let dev: Vec<Vec<f64>> = values.iter().map(|f| f.iter().zip(fstar).map(|(a, b)| (a - b).abs()).collect()).collect();
    let mut pts = vec![eps];
    for d in &dev {
        for mask in 1u32..(1 << n) {
            let s: f64 = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| d[i] * d[i]).sum();
            pts.push(s.sqrt());
        }
        pts.extend(d.iter().copied());
    }
    pts.retain(|&x| x >= eps);
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    pts.dedup();
    let mut scales = pts.clone();
    for w in pts.windows(2) {
        scales.push(0.5 * (w[0] + w[1]));
    }
    scales.push(pts.last().unwrap() + 1.0);
    scales.iter().map(|&e| dfs_longest(&dev, e)).max().unwrap().max(1)
}

fn small_class() -> impl Strategy<Value = (Vec<Vec<f64>>, usize, f64)> {
    let grid = (0u8..=4).prop_map(|k| k as f64 / 4.0);
    (1usize..=4, 1usize..=5).prop_flat_map(move |(n, m)| {
        (prop::collection::vec(prop::collection::vec(grid.clone(), n), m), 0..m, prop::sample::select(vec![0.0, 0.1, 0.2, 0.3, 0.5]))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn eluder_matches_dfs_oracle((values, star, eps) in small_class()) {
        let r = eluder_dimension(&values, &values[star], eps).unwrap();
        prop_assert!(!r.lower_bound_only);
        prop_assert_eq!(r.dim, eluder_oracle(&values, &values[star], eps));
    }

    #[test]
    fn eluder_nonincreasing_in_eps((values, _, _) in small_class()) {
        let dims: Vec<usize> = [0.0, 0.1, 0.25, 0.4, 0.7, 1.0].iter().map(|&e| eluder_dimension_class(&values, e).unwrap().dim).collect();
        prop_assert!(dims.windows(2).all(|w| w[0] >= w[1]), "{:?}", dims);
    }
}

#[test]
fn eluder_hand_fixtures() {
    assert_eq!(eluder_dimension(&[vec![0.3, 0.1, 0.9]], &[0.3, 0.1, 0.9], 0.0).unwrap().dim, 1);
    let binary: Vec<Vec<f64>> = (0..8u32).map(|m| (0..3).map(|i| ((m >> i) & 1) as f64).collect()).collect();
    for star in &binary {
        assert_eq!(eluder_dimension(&binary, star, 0.4).unwrap().dim, 3);
    }
    // Two points: f differs from f* only at the second one.
    let r = eluder_dimension(&[vec![0.0, 0.0], vec![0.0, 0.5]], &[0.0, 0.0], 0.2).unwrap();
    assert_eq!(r.dim, 1);
}

#[test]
fn eluder_linear_d2_fixture() {
    let dirs: Vec<Vec<f64>> = (0..12).map(|k| {
        let t = k as f64 * std::f64::consts::PI / 6.0;
        vec![t.cos(), t.sin()]
    }).collect();
    let mut thetas = Vec::new();
    for i in -3..=3 {
        for j in -3..=3 {
            let th = [i as f64 / 3.0, j as f64 / 3.0];
            if th[0] * th[0] + th[1] * th[1] <= 1.0 + 1e-12 {
                thetas.push(th);
            }
        }
    }
    assert!(thetas.len() <= MAX_FUNCTIONS);
    let values: Vec<Vec<f64>> = thetas.iter().map(|th| dirs.iter().map(|x| th[0] * x[0] + th[1] * x[1]).collect()).collect();
    let r = eluder_dimension_class(&values, 0.3).unwrap();
    assert!(!r.lower_bound_only);
    assert!(r.dim >= 2 && r.dim <= 8, "{}", r.dim);
}

// ---------- offset DEC ----------

fn simplex_grid_value(prob: &DecProblem, n: usize) -> f64 {
    let mut best = f64::INFINITY;
    for i in 0..=n {
        for j in 0..=n - i {
            let p = [i as f64 / n as f64, j as f64 / n as f64, (n - i - j) as f64 / n as f64];
            let worst = (0..prob.models()).map(|m| {
                (0..3).map(|k| p[k] * (prob.regret[m][k] - prob.gamma * prob.div[m][k])).sum::<f64>()
            }).fold(f64::NEG_INFINITY, f64::max);
            best = best.min(worst);
        }
    }
    best
}

fn random_gaussian_problem(seed: u64, gamma: f64) -> DecProblem {
    let mut rng = Stream::from_seed(seed);
    let models: Vec<BanditModel> = (0..3).map(|_| BanditModel::gaussian(&[rng.uniform(), rng.uniform(), rng.uniform()])).collect();
    let reference = BanditModel::gaussian(&[rng.uniform(), rng.uniform(), rng.uniform()]);
    DecProblem::new(&models, &reference, gamma, DecDivergence::HellingerSq).unwrap()
}

#[test]
fn dec_offset_matches_simplex_grid() {
    for seed in 0..5 {
        let prob = random_gaussian_problem(seed, 2.0);
        let cert = dec_offset(&prob, DecSolver::default()).unwrap();
        let grid = simplex_grid_value(&prob, 200);
        assert!((cert.value - grid).abs() <= 0.01, "seed {seed}: {} vs {grid}", cert.value);
        assert!(cert.gap <= 1e-3);
        let worst = prob.payoffs(cert.p.probs()).into_iter().fold(f64::NEG_INFINITY, f64::max);
        assert!(worst <= cert.value + cert.gap);
    }
}

#[test]
fn single_model_class_is_zero() {
    let m = BanditModel::gaussian(&[0.1, 0.7, 0.4]);
    let cert = dec_offset(&DecProblem::new(std::slice::from_ref(&m), &m, 3.0, DecDivergence::HellingerSq).unwrap(), DecSolver::default()).unwrap();
    assert!(cert.value.abs() <= 1e-9, "{}", cert.value);
}

#[test]
fn dec_offset_monotone_in_gamma() {
    for seed in 10..14 {
        let vals: Vec<(f64, f64)> = [0.25, 0.5, 1.0, 2.0, 4.0, 8.0]
            .iter()
            .map(|&g| {
                let c = dec_offset(&random_gaussian_problem(seed, g), DecSolver::default()).unwrap();
                (c.value, c.gap)
            })
            .collect();
        for w in vals.windows(2) {
            assert!(w[1].0 <= w[0].0 + w[0].1 + w[1].1 + 1e-12, "seed {seed}: {vals:?}");
        }
    }
}

#[test]
fn hedge_brackets_cutting_plane() {
    for seed in 20..24 {
        let prob = random_gaussian_problem(seed, 1.5);
        let cp = dec_offset(&prob, DecSolver::default()).unwrap();
        let hd = dec_offset(&prob, DecSolver::Hedge { iters: 20000 }).unwrap();
        // Each certificate brackets the game value.
        assert!(hd.value <= cp.upper() + 1e-9 && cp.value <= hd.upper() + 1e-9);
        assert!(hd.gap <= 0.05, "{}", hd.gap);
    }
}

#[test]
fn igw_exact_small_grid() {
    for &(a, gamma) in &[(2usize, 1.0), (2, 10.0), (3, 10.0)] {
        let class = GridClass::uniform(100, vec![0.5; a], gamma);
        let cert = dec_offset(&class, DecSolver::default()).unwrap();
        let target = (a - 1) as f64 / (4.0 * gamma);
        assert!((cert.value - target).abs() <= 2e-3, "A={a} γ={gamma}: {}", cert.value);
    }
}

// ---------- closed-form strategies ----------

fn theta_grid(step: f64) -> Vec<[f64; 2]> {
    let k = (1.0 / step).round() as i64;
    let mut out = Vec::new();
    for i in -k..=k {
        for j in -k..=k {
            let t = [i as f64 * step, j as f64 * step];
            if t[0] * t[0] + t[1] * t[1] <= 1.0 + 1e-12 {
                out.push(t);
            }
        }
    }
    out
}

fn linear_worst_payoff(p: &[f64], feats: &[Vec<f64>], theta_hat: &[f64], gamma: f64) -> f64 {
    let fhat: Vec<f64> = feats.iter().map(|x| x[0] * theta_hat[0] + x[1] * theta_hat[1]).collect();
    theta_grid(0.02)
        .iter()
        .map(|th| {
            let f: Vec<f64> = feats.iter().map(|x| x[0] * th[0] + x[1] * th[1]).collect();
            structured_payoff(p, &f, &fhat, gamma)
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

#[test]
fn linear_dec_on_circle() {
    let feats: Vec<Vec<f64>> = (0..8).map(|k| {
        let t = k as f64 * std::f64::consts::PI / 4.0;
        vec![t.cos(), t.sin()]
    }).collect();
    let d = 2.0;
    let mut rng = Stream::from_seed(31);
    for _ in 0..5 {
        let th = [rng.uniform() - 0.5, rng.uniform() - 0.5];
        let s10 = linear_dec_strategy(&th, &feats, 10.0).unwrap();
        assert!((0.5..=1.0).contains(&s10.lambda));
        let w10 = linear_worst_payoff(s10.p.probs(), &feats, &th, 10.0);
        assert!(w10 <= 6.0 * d / 10.0, "{w10}");
        let s100 = linear_dec_strategy(&th, &feats, 100.0).unwrap();
        let w100 = linear_worst_payoff(s100.p.probs(), &feats, &th, 100.0);
        assert!(w100 <= 6.0 * d / 100.0, "{w100}");
    }
}

#[test]
fn lipschitz_cover_on_unit_interval() {
    let n = 201;
    let xs: Vec<f64> = (0..n).map(|i| i as f64 / (n - 1) as f64).collect();
    let dist: Vec<Vec<f64>> = xs.iter().map(|x| xs.iter().map(|y| (x - y).abs()).collect()).collect();
    let fhat: Vec<f64> = xs.iter().map(|x| 0.5 + 0.3 * (x - 0.4).abs().min(0.2)).collect();
    let s = lipschitz_dec_strategy(&fhat, &dist, 1.0, 100.0).unwrap();
    assert!((s.eps - 0.1).abs() < 1e-12);
    assert!(s.cover.len() <= 11, "{}", s.cover.len());
    for i in 0..n {
        assert!(s.cover.iter().any(|&c| dist[i][c] <= s.eps));
    }
    // Adversary: f̂ plus a 1-Lipschitz bump of any height at any location.
    let mut worst = f64::NEG_INFINITY;
    for c in 0..n {
        for k in 0..=20 {
            let h = k as f64 * 0.025;
            let f: Vec<f64> = xs.iter().zip(&fhat).map(|(x, v)| v + (h - (x - xs[c]).abs()).max(0.0)).collect();
            worst = worst.max(structured_payoff(s.p.probs(), &f, &fhat, 100.0));
        }
    }
    assert!(worst <= s.bound, "{worst} > {}", s.bound);
}

#[test]
fn cheating_exhaustive_payoff() {
    let (code, _) = cheating_code(16).unwrap();
    let gamma = 64.0;
    let bound = 4.0 * 4.0 / gamma;
    for fhat_model in 0..16 {
        let s = cheating_dec_strategy(&code, fhat_model, gamma).unwrap();
        assert!(!s.clipped);
        let fhat = code.models[fhat_model].means();
        for (k, m) in code.models.iter().enumerate() {
            let pay = structured_payoff(s.p.probs(), &m.means(), &fhat, gamma);
            assert!(pay <= bound, "f̂ {fhat_model} M {k}: {pay}");
            if m.best() == code.models[fhat_model].best() {
                assert!(pay <= 2.0 * s.eps);
            }
        }
    }
}

// ---------- constrained DEC ----------

#[test]
fn constrained_vacuous_radius_is_minimax_regret() {
    let models: Vec<BanditModel> = [[0.8, 0.3, 0.5], [0.2, 0.9, 0.4], [0.1, 0.2, 0.7]].iter().map(|m| BanditModel::gaussian(m)).collect();
    let reference = BanditModel::gaussian(&[0.5, 0.5, 0.5]);
    let prob = DecProblem::new(&models, &reference, 0.0, DecDivergence::HellingerSq).unwrap();
    let c = dec_constrained(&prob, 2f64.sqrt(), 0.005).unwrap();
    // γ = 0 removes the divergence term: the offset game is minimax regret.
    let minimax = dec_offset(&prob, DecSolver::default()).unwrap();
    assert!((c.value - minimax.value).abs() <= 0.01, "{} vs {}", c.value, minimax.value);
    assert!(c.refinement_ok);
}

#[test]
fn constrained_gaussian_subfamily() {
    let a = 3;
    for &eps in &[0.05, 0.1, 0.2] {
        let delta = eps * (2.0 * a as f64).sqrt();
        let reference = BanditModel::gaussian(&vec![0.5; a]);
        let mut models = vec![reference.clone()];
        for i in 0..a {
            let mut m = vec![0.5; a];
            m[i] += delta;
            models.push(BanditModel::gaussian(&m));
        }
        let prob = DecProblem::new(&models, &reference, 0.0, DecDivergence::HellingerSq).unwrap();
        let c = dec_constrained(&prob, eps, 0.005).unwrap();
        let lower = eps * (a as f64 / 2.0).sqrt();
        assert!(c.value >= lower - 0.005 * delta * a as f64, "ε={eps}: {} < {lower}", c.value);
    }
}

#[test]
fn constrained_rejects_large_decision_sets() {
    let prob = DecProblem::structured(&[vec![0.0; 5]], &[0.0; 5], 1.0).unwrap();
    assert!(dec_constrained(&prob, 0.1, 0.01).is_err());
}

// ---------- E2D ----------

fn gaussian_class(a: usize) -> Vec<BanditModel> {
    (0..a)
        .map(|i| {
            let mut m = vec![0.5; a];
            m[i] = 0.8;
            BanditModel::gaussian(&m)
        })
        .collect()
}

#[test]
fn e2d_singleton_class() {
    let m = BanditModel::gaussian(&[0.3, 0.6, 0.1, 0.2]);
    let rep = e2d_run(&[m], 0, &E2dConfig::new(4.0, 50), StreamKey::new(Seed(2), 60), 2, "single").unwrap();
    assert!(rep.ledger.rows.iter().all(|r| r.inst_regret.abs() < 1e-9));
    assert!(rep.holds);
}

#[test]
fn e2d_gaussian_rate() {
    let (a, horizon) = (5usize, 1000usize);
    let class = gaussian_class(a);
    let ln_m = (class.len() as f64).ln();
    let gamma = ((a * horizon) as f64 / (4.0 * ln_m)).sqrt();
    let mut regrets = Vec::new();
    for seed in 0..20u64 {
        let truth = seed as usize % a;
        let rep = e2d_run(&class, truth, &E2dConfig::new(gamma, horizon), StreamKey::new(Seed(seed), 61), seed, "gauss").unwrap();
        assert!(rep.holds && rep.per_round_ok, "seed {seed}");
        assert_eq!(rep.flagged_rounds, 0);
        regrets.push(rep.ledger.cumulative());
    }
    regrets.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let median = 0.5 * (regrets[9] + regrets[10]);
    let scale = ((a * horizon) as f64 * ln_m).sqrt();
    assert!(median <= 2.0 * scale, "median {median} vs {scale}");
}

#[test]
fn e2d_hellinger_and_map_variants_hold() {
    let class = gaussian_class(3);
    for (k, est) in [E2dEstimator::PosteriorMean, E2dEstimator::Map].into_iter().enumerate() {
        let mut cfg = E2dConfig::new(6.0, 300);
        cfg.divergence = DecDivergence::HellingerSq;
        cfg.estimator = est;
        let rep = e2d_run(&class, 1, &cfg, StreamKey::new(Seed(k as u64), 62), k as u64, "hel").unwrap();
        assert!(rep.holds);
    }
}

#[test]
fn generalized_ucb_never_cheats() {
    let (code, _) = cheating_code(8).unwrap();
    let class = dlab_core::estimators::FiniteClass::new(code.models.iter().map(|m| m.means()).collect()).unwrap();
    for seed in 0..3u64 {
        let truth = seed as usize * 3 % 8;
        let rep = generalized_ucb_run(&class, truth, &code.models[truth], 4.0, 500, StreamKey::new(Seed(seed), 63), seed, "cc", |pi| code.is_cheat(pi)).unwrap();
        assert_eq!(rep.forbidden_pulls, 0);
        assert_eq!(rep.width_violations, 0);
    }
}
