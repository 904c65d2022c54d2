//! The fifteen acceptance criteria, run with fixed seeds.
//!
//! Each criterion collects named checks. A check marked `known_gap` is one
//! whose failure is documented and expected; it still reports FAIL.

use std::time::Instant;

use rayon::prelude::*;

use dlab_core::bandits::{eps_greedy_schedule, run_bandit, EpsGreedy, Ucb};
use dlab_core::contextual::{linucb_beta, linucb_run, squarecb_act};
use dlab_core::dec_lab::{
    dec_offset, e2d_run, eluder_dimension, eluder_dimension_class, generalized_ucb_run, DecDivergence, DecSolver, E2dConfig, E2dReport, GridClass,
};
use dlab_core::envs::{cheating_code, combination_lock, random_low_rank, random_tabular, BanditModel, Policy, TabularMDP};
use dlab_core::estimators::{confidence_beta, ExpWeights, FiniteClass, LogLossPosterior};
use dlab_core::numprob::design::{g_optimal_design, leverage_direct};
use dlab_core::numprob::divergence::{divergence, hellinger_sq_gaussian, hellinger_sq_reward_mixture, Divergence};
use dlab_core::numprob::linalg::{sym_eigen, Mat};
use dlab_core::rl::{
    bellman_rank, bilinucb_beta, bilinucb_run, eps_greedy_rl_run, identity_checks, initial_value, linear_q_class, lsvi_ucb_run, ucbvi_run,
    value_iteration, LsviConfig, QFunction,
};
use dlab_core::{FiniteDist, RewardDist, Seed, Stream, StreamKey};

use crate::registry::random_linear;
use crate::sweep::{median, summarize};

#[derive(Debug, Clone)]
pub struct Check {
    pub label: String,
    pub pass: bool,
    pub known_gap: bool,
}

#[derive(Debug, Clone)]
pub struct CriterionReport {
    pub id: usize,
    pub title: &'static str,
    pub checks: Vec<Check>,
    pub detail: String,
    pub seconds: f64,
}

impl CriterionReport {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    /// Failed checks that are not documented gaps.
    pub fn unexpected_failures(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.pass && !c.known_gap).collect()
    }

    pub fn line(&self) -> String {
        let failed: Vec<&str> = self.checks.iter().filter(|c| !c.pass).map(|c| c.label.as_str()).collect();
        let mut s = format!("{} {:>2} {} ({:.2}s): {}", if self.pass() { "PASS" } else { "FAIL" }, self.id, self.title, self.seconds, self.detail);
        if !failed.is_empty() {
            s.push_str(&format!(" [failed: {}]", failed.join("; ")));
        }
        s
    }
}

struct Builder {
    id: usize,
    title: &'static str,
    checks: Vec<Check>,
    detail: Vec<String>,
    start: Instant,
    budget: Option<f64>,
}

impl Builder {
    fn new(id: usize, title: &'static str, budget: Option<f64>) -> Self {
        Builder { id, title, checks: Vec::new(), detail: Vec::new(), start: Instant::now(), budget }
    }

    fn check(&mut self, label: impl Into<String>, pass: bool) {
        self.checks.push(Check { label: label.into(), pass, known_gap: false });
    }

    fn gap(&mut self, label: impl Into<String>, pass: bool) {
        self.checks.push(Check { label: label.into(), pass, known_gap: true });
    }

    fn note(&mut self, s: impl Into<String>) {
        self.detail.push(s.into());
    }

    fn finish(mut self) -> CriterionReport {
        let seconds = self.start.elapsed().as_secs_f64();
        if let Some(b) = self.budget {
            self.check(format!("runtime < {b} s"), seconds < b);
        }
        CriterionReport { id: self.id, title: self.title, checks: self.checks, detail: self.detail.join(", "), seconds }
    }
}

/// Runs shared between criteria: the potential audit covers every LinUCB and
/// LSVI-UCB run, the bookkeeping audit every E2D run.
#[derive(Default)]
struct Shared {
    potentials: Vec<(String, bool)>,
    e2d: Vec<(String, bool)>,
}

fn c1() -> CriterionReport {
    let mut b = Builder::new(1, "IGW exactness on the grid DEC", Some(10.0));
    for &a in &[2usize, 3, 5] {
        for &gamma in &[1.0, 10.0] {
            let class = GridClass::uniform(100, vec![0.5; a], gamma);
            let target = (a - 1) as f64 / (4.0 * gamma);
            let label = format!("A={a} γ={gamma} within 2e-3 of {target:.4}");
            match dec_offset(&class, DecSolver::default()) {
                Ok(cert) => {
                    let ok = (cert.value - target).abs() <= 2e-3;
                    b.note(format!("A={a},γ={gamma}: {:.4} vs {target:.4}", cert.value));
                    // With A/(2γ) > 1/2 the unconstrained equalizer leaves the
                    // unit interval, so the grid cannot realize the value.
                    if gamma == 1.0 && a > 2 {
                        b.gap(label, ok);
                    } else {
                        b.check(label, ok);
                    }
                }
                Err(e) => b.check(format!("{label} ({e})"), false),
            }
        }
    }
    b.finish()
}

fn c2() -> CriterionReport {
    let mut b = Builder::new(2, "divergence ordering and Gaussian Hellinger", Some(1.0));
    let mut rng = Stream::from_seed(2);
    let mut bad = 0;
    let mut pairs = 0;
    while pairs < 1000 {
        let n = 2 + rng.below(5);
        let mut draw = || -> Vec<f64> { (0..n).map(|_| if rng.uniform() < 0.15 { 0.0 } else { rng.uniform() }).collect() };
        let (wp, wq) = (draw(), draw());
        let (Ok(p), Ok(q)) = (FiniteDist::from_weights(&wp), FiniteDist::from_weights(&wq)) else { continue };
        pairs += 1;
        let tv = divergence(Divergence::TV, &p, &q).unwrap_or(f64::NAN);
        let h = divergence(Divergence::HellingerSq, &p, &q).unwrap_or(f64::NAN);
        let kl = divergence(Divergence::KL, &p, &q).unwrap_or(f64::NAN);
        if !(tv * tv <= h && h <= kl) {
            bad += 1;
        }
    }
    b.note(format!("{bad} ordering violations in {pairs} pairs"));
    b.check("TV² ≤ H² ≤ KL", bad == 0);
    let mut worst_closed: f64 = 0.0;
    let mut worst_quad: f64 = 0.0;
    for k in 0..=60 {
        let gap = 0.05 * k as f64;
        let reference = -(-gap * gap / 8.0).exp_m1();
        worst_closed = worst_closed.max((hellinger_sq_gaussian(0.0, gap) - reference).abs());
        let quad = hellinger_sq_reward_mixture(&RewardDist::gaussian(0.0), &[(1.0, RewardDist::gaussian(gap))]) / 2.0;
        worst_quad = worst_quad.max((quad - reference).abs());
    }
    b.note(format!("closed form err {worst_closed:.1e}, quadrature err {worst_quad:.1e}"));
    b.check("closed form within 1e-12", worst_closed <= 1e-12);
    b.check("quadrature within 1e-12", worst_quad <= 1e-12);
    b.finish()
}

fn c3() -> CriterionReport {
    let mut b = Builder::new(3, "value identities on random tabular MDPs", Some(5.0));
    let mut rng = Stream::from_seed(3);
    let mut worst: f64 = 0.0;
    let mut sim_ok = true;
    for _ in 0..50 {
        let s = 1 + rng.below(5);
        let a = 1 + rng.below(3);
        let h = 1 + rng.below(6);
        let m = random_tabular(s, a, h, &mut rng);
        let mut mhat = random_tabular(s, a, h, &mut rng);
        mhat.d1 = m.d1.clone();
        let pi = Policy::random_stochastic(h, s, a, &mut rng);
        let pi2 = Policy::random_stochastic(h, s, a, &mut rng);
        let mut q: Vec<Vec<f64>> = (0..h).map(|_| (0..s * a).map(|_| 2.0 * rng.uniform()).collect()).collect();
        q.push(vec![0.0; s * a]);
        let r = identity_checks(&m, &mhat, &pi, &pi2, &q);
        worst = worst.max(r.max_discrepancy());
        sim_ok &= r.simulation.0.abs() <= r.simulation_bound + 1e-12;
    }
    b.note(format!("max discrepancy {worst:.1e}"));
    b.check("identities within 1e-10", worst <= 1e-10);
    b.check("simulation bound", sim_ok);
    b.finish()
}

fn c4() -> CriterionReport {
    let mut b = Builder::new(4, "UCB vs ε-greedy rate separation", Some(120.0));
    let (a, horizon) = (10usize, 20000usize);
    let mut means = vec![0.3; a];
    means[0] = 0.8;
    let env = BanditModel::gaussian(&means);
    let eps = eps_greedy_schedule(a, horizon, 0.1);
    let runs = |ucb: bool| -> Vec<_> {
        (0..20u64)
            .into_par_iter()
            .map(|seed| {
                let key = StreamKey::new(Seed(seed), 4);
                if ucb {
                    run_bandit(&env, &mut Ucb::new(a, horizon, 0.1), horizon, key, seed, "gaussian_mab", |_, _, _, _| {})
                } else {
                    run_bandit(&env, &mut EpsGreedy::new(a, eps), horizon, key, seed, "gaussian_mab", |_, _, _, _| {})
                }
            })
            .collect::<Result<Vec<_>, _>>()
            .unwrap_or_default()
    };
    let (u, e) = (runs(true), runs(false));
    if u.len() != 20 || e.len() != 20 {
        b.check("runs completed", false);
        return b.finish();
    }
    let su = summarize("ucb", horizon, &u);
    let se = summarize("eps_greedy", horizon, &e);
    let (xu, xe) = (su.exponent.unwrap_or(f64::NAN), se.exponent.unwrap_or(f64::NAN));
    b.note(format!("median {:.0} vs {:.0}, exponents {xu:.3} vs {xe:.3}", su.median, se.median));
    b.check("UCB median < ε-greedy median", su.median < se.median);
    b.check("UCB exponent ≤ 0.65", xu <= 0.65);
    b.check("ε-greedy exponent ≥ 0.6", xe >= 0.6);
    b.finish()
}

fn c5() -> CriterionReport {
    let mut b = Builder::new(5, "combination lock", Some(180.0));
    let (h, episodes) = (8usize, 3000usize);
    let lock = combination_lock(h);
    let per_seed: Vec<Option<(f64, f64)>> = (0..10u64)
        .into_par_iter()
        .map(|seed| {
            let eg = eps_greedy_rl_run(&lock, episodes, 0.1, StreamKey::new(Seed(seed), 51), seed, "combination_lock").ok()?;
            let uv = ucbvi_run(&lock, episodes, 0.1, StreamKey::new(Seed(seed), 52), seed, "combination_lock").ok()?;
            Some((eg.total_reward() / episodes as f64, uv.tail_return(200)))
        })
        .collect();
    let Some(per_seed) = per_seed.into_iter().collect::<Option<Vec<_>>>() else {
        b.check("runs completed", false);
        return b.finish();
    };
    let eg = median(&per_seed.iter().map(|x| x.0).collect::<Vec<_>>());
    let uv = median(&per_seed.iter().map(|x| x.1).collect::<Vec<_>>());
    b.note(format!("ε-greedy mean return {eg:.4}, UCB-VI tail return {uv:.4}"));
    b.check("ε-greedy return ≤ 0.05", eg <= 0.05);
    // The bonus stays above the lock's unit reward for far longer than
    // 3000 episodes at H=8.
    b.gap("UCB-VI tail return ≥ 0.5", uv >= 0.5);
    b.finish()
}

fn c6(shared: &mut Shared) -> CriterionReport {
    let mut b = Builder::new(6, "cheating code: E2D vs generalized UCB", Some(120.0));
    let (arms, horizon) = (16usize, 5000usize);
    let Ok((code, _)) = cheating_code(arms) else {
        b.check("instance", false);
        return b.finish();
    };
    let Ok(class) = FiniteClass::new(code.models.iter().map(|m| m.means()).collect()) else {
        b.check("class", false);
        return b.finish();
    };
    let beta = confidence_beta(code.models.len(), 0.1);
    let results: Vec<Option<(f64, f64, usize, bool)>> = (0..5u64)
        .into_par_iter()
        .map(|seed| {
            let truth = (seed as usize * 7 + 3) % arms;
            let e = e2d_run(&code.models, truth, &E2dConfig::new(arms as f64, horizon), StreamKey::new(Seed(seed), 11), seed, "cheating_code").ok()?;
            let g = generalized_ucb_run(&class, truth, &code.models[truth], beta, horizon, StreamKey::new(Seed(seed), 11), seed, "cheating_code", |pi| {
                code.is_cheat(pi)
            })
            .ok()?;
            Some((e.ledger.cumulative(), g.ledger.cumulative(), g.forbidden_pulls, e.holds))
        })
        .collect();
    let Some(results) = results.into_iter().collect::<Option<Vec<_>>>() else {
        b.check("runs completed", false);
        return b.finish();
    };
    for (seed, r) in results.iter().enumerate() {
        b.check(format!("seed {seed}: E2D ≤ 25% of generalized UCB"), r.0 <= 0.25 * r.1);
        shared.e2d.push((format!("cheating_code seed {seed}"), r.3));
    }
    let cheats: usize = results.iter().map(|r| r.2).sum();
    b.check("generalized UCB never pulls a cheat arm", cheats == 0);
    let ratios: Vec<String> = results.iter().map(|r| format!("{:.0}/{:.0}", r.0, r.1)).collect();
    b.note(format!("E2D/UCB regret {}", ratios.join(" ")));
    b.note(format!("{cheats} cheat pulls"));
    b.finish()
}

fn c7() -> CriterionReport {
    let mut b = Builder::new(7, "SquareCB per-round inequality", Some(1.0));
    let mut rng = Stream::from_seed(7);
    let mut bad = 0;
    for _ in 0..1000 {
        let a = 1 + rng.below(4);
        let fhat: Vec<f64> = (0..a).map(|_| rng.uniform()).collect();
        let fstar: Vec<f64> = (0..a).map(|_| rng.uniform()).collect();
        let gamma = 10f64.powf(-2.0 + 5.0 * rng.uniform());
        let p = squarecb_act(&fhat, gamma);
        let best = fstar.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let (mut regret, mut err) = (0.0, 0.0);
        for i in 0..a {
            regret += p.probs()[i] * (best - fstar[i]);
            err += p.probs()[i] * (fhat[i] - fstar[i]) * (fhat[i] - fstar[i]);
        }
        if regret > a as f64 / gamma + gamma * err {
            bad += 1;
        }
    }
    b.note(format!("{bad} violations in 1000 triples"));
    b.check("zero violations", bad == 0);
    b.finish()
}

fn c8(shared: &mut Shared) -> CriterionReport {
    let mut b = Builder::new(8, "elliptic potential on every run", None);
    // Extra runs at other dimensions on top of the optimism audits.
    let extra: Vec<(String, bool)> = [(2usize, 20usize), (5, 30)]
        .par_iter()
        .flat_map(|&(d, arms)| {
            (0..5u64).into_par_iter().map(move |seed| {
                let ok = random_linear(d, arms, 0.9, &mut Stream::from_seed(800 + seed))
                    .ok()
                    .and_then(|env| linucb_run(&env, 1000, linucb_beta(d, 1000, 0.1), StreamKey::new(Seed(seed), 81), seed, "linear_bandit").ok())
                    .is_some_and(|au| au.potential <= au.potential_bound);
                (format!("LinUCB d={d} seed {seed}"), ok)
            })
        })
        .collect();
    shared.potentials.extend(extra);
    let lsvi: Vec<(String, bool)> = (0..5u64)
        .into_par_iter()
        .map(|seed| {
            let env = random_low_rank(8, 3, 3, 3, &mut Stream::from_seed(810 + seed));
            let ok = lsvi_ucb_run(&env, &LsviConfig::new(1000, 0.1), StreamKey::new(Seed(seed), 82), seed, "random_low_rank").is_ok_and(|r| r.potential_ok());
            (format!("LSVI-UCB d=3 seed {seed}"), ok)
        })
        .collect();
    shared.potentials.extend(lsvi);
    let bad: Vec<&str> = shared.potentials.iter().filter(|p| !p.1).map(|p| p.0.as_str()).collect();
    b.note(format!("{} runs, {} violations", shared.potentials.len(), bad.len()));
    for p in &shared.potentials {
        if !p.1 {
            b.check(format!("{}: potential ≤ 2d ln(1+T/d)", p.0), false);
        }
    }
    b.check("potential bound on every run", bad.is_empty() && !shared.potentials.is_empty());
    b.finish()
}

fn c9() -> CriterionReport {
    let mut b = Builder::new(9, "eluder dimension fixtures", Some(30.0));
    let single = eluder_dimension(&[vec![0.3, 0.1, 0.9]], &[0.3, 0.1, 0.9], 0.0).map(|r| r.dim);
    b.check("singleton class → 1", single.as_ref().is_ok_and(|&d| d == 1));
    let binary: Vec<Vec<f64>> = (0..8u32).map(|m| (0..3).map(|i| ((m >> i) & 1) as f64).collect()).collect();
    let dims: Vec<usize> = binary.iter().filter_map(|star| eluder_dimension(&binary, star, 0.4).ok().map(|r| r.dim)).collect();
    b.check("binary class on 3 points at ε=0.4 → 3", dims.len() == 8 && dims.iter().all(|&d| d == 3));
    let dirs: Vec<Vec<f64>> = (0..12)
        .map(|k| {
            let t = k as f64 * std::f64::consts::PI / 6.0;
            vec![t.cos(), t.sin()]
        })
        .collect();
    let mut values = Vec::new();
    for i in -3..=3 {
        for j in -3..=3 {
            let th = [i as f64 / 3.0, j as f64 / 3.0];
            if th[0] * th[0] + th[1] * th[1] <= 1.0 + 1e-12 {
                values.push(dirs.iter().map(|x| th[0] * x[0] + th[1] * x[1]).collect::<Vec<f64>>());
            }
        }
    }
    // d·ln(1/ε) scaled: 4d ln(1 + 1/ε) at d=2, ε=0.3 is about 11.7; the
    // fixture is held to the tighter 8.
    match eluder_dimension_class(&values, 0.3) {
        Ok(r) => {
            b.note(format!("linear d=2 fixture: {}", r.dim));
            b.check("linear d=2 fixture exact", !r.lower_bound_only);
            b.check("linear d=2 fixture within d·log bound", r.dim >= 2 && r.dim <= 8);
        }
        Err(e) => b.check(format!("linear d=2 fixture ({e})"), false),
    }
    b.finish()
}

fn c10() -> CriterionReport {
    let mut b = Builder::new(10, "G-optimal design", Some(5.0));
    let tol = 1e-3;
    for d in [2usize, 3, 5] {
        let pts: Vec<Vec<f64>> = (0..d).map(|k| (0..d).map(|i| if i == k { 1.0 } else { 0.0 }).collect()).collect();
        let m = g_optimal_design(&pts, tol).map(|des| des.max_leverage()).unwrap_or(f64::NAN);
        b.check(format!("basis d={d}: max leverage = d"), (m - d as f64).abs() <= 1e-9);
    }
    let mut s = Stream::from_seed(9);
    let d = 4;
    let mut a = Mat::identity(d);
    for _ in 0..6 {
        let x: Vec<f64> = (0..d).map(|_| s.normal()).collect();
        a.add_outer(&x, 1.0);
    }
    let (vals, vecs) = sym_eigen(&a);
    let pts: Vec<Vec<f64>> = (0..d).map(|k| (0..d).map(|i| vecs[(i, k)] / vals[k].sqrt()).collect()).collect();
    let m = g_optimal_design(&pts, tol).map(|des| des.max_leverage()).unwrap_or(f64::NAN);
    b.check("ellipsoid fixture", m <= d as f64 * (1.0 + tol));
    let mut worst: f64 = 0.0;
    for seed in 0..50u64 {
        let mut s = Stream::from_seed(1000 + seed);
        let pts: Vec<Vec<f64>> = (0..50).map(|_| (0..3).map(|_| s.normal()).collect()).collect();
        let lev = g_optimal_design(&pts, tol).ok().and_then(|des| leverage_direct(&pts, des.weights.probs()));
        worst = worst.max(lev.map_or(f64::INFINITY, |l| l.into_iter().fold(0.0, f64::max)));
    }
    b.note(format!("random R³ sets: max leverage {worst:.6}"));
    b.check("50 random sets in R³", worst <= 3.0 * (1.0 + tol));
    b.finish()
}

fn random_q_class(m: &TabularMDP, n: usize, rng: &mut Stream) -> Vec<QFunction> {
    let (star, _) = value_iteration(m);
    let mut out = vec![QFunction { q: star.q }];
    for _ in 1..n {
        let mut q: Vec<Vec<f64>> = (0..m.h).map(|_| (0..m.s * m.a).map(|_| rng.uniform()).collect()).collect();
        q.push(vec![0.0; m.s * m.a]);
        out.push(QFunction { q });
    }
    out
}

fn qstar_column_max(f: &dlab_core::rl::BellmanFactorization) -> f64 {
    f.matrices.iter().flat_map(|m| (0..m.rows).map(move |i| m[(i, 0)].abs())).fold(0.0, f64::max)
}

fn c11() -> CriterionReport {
    let mut b = Builder::new(11, "Bellman rank", Some(10.0));
    let mut rng = Stream::from_seed(11);
    let mut col: f64 = 0.0;
    for k in 0..5 {
        let (s, a, h) = (2 + k % 2, 2, 3);
        let m = random_tabular(s, a, h, &mut rng);
        let class = random_q_class(&m, 16, &mut rng);
        let pols: Vec<Policy> = (0..16).map(|_| Policy::random_stochastic(h, s, a, &mut rng)).collect();
        let f = bellman_rank(&m, &class, &pols);
        col = col.max(qstar_column_max(&f));
        b.check(format!("tabular S={s} A={a}: rank {} ≤ {}", f.rank(), s * a), f.rank() <= s * a);
    }
    for d in 1..=3 {
        let env = random_low_rank(6, 3, 3, d, &mut rng);
        let class = linear_q_class(&env, 15, 0.5, &mut rng);
        let pols: Vec<Policy> = (0..15).map(|_| Policy::random_stochastic(3, 6, 3, &mut rng)).collect();
        let f = bellman_rank(env.tabular(), &class, &pols);
        col = col.max(qstar_column_max(&f));
        b.check(format!("low-rank d={d}: rank {} ≤ {d}", f.rank()), f.rank() <= d);
    }
    b.note(format!("Q* column max {col:.1e}"));
    b.check("Q* column zero within 1e-10", col <= 1e-10);
    b.finish()
}

fn c12(shared: &mut Shared) -> CriterionReport {
    let mut b = Builder::new(12, "optimism audits", Some(240.0));
    let ucbvi: Vec<bool> = (0..200u64)
        .into_par_iter()
        .map(|seed| {
            let m = random_tabular(3, 2, 3, &mut Stream::from_seed(seed));
            ucbvi_run(&m, 200, 0.1, StreamKey::new(Seed(seed), 7), seed, "random_tabular").is_ok_and(|r| r.optimistic_episodes == 200)
        })
        .collect();
    let ok_vi = ucbvi.iter().filter(|&&x| x).count();
    b.check(format!("UCB-VI optimism {ok_vi}/200 ≥ 180"), ok_vi >= 180);

    let (d, horizon) = (3usize, 400usize);
    let beta = linucb_beta(d, horizon, 0.1);
    let lin: Vec<Option<(bool, bool)>> = (0..50u64)
        .into_par_iter()
        .map(|seed| {
            let env = random_linear(d, 10, 0.9, &mut Stream::from_seed(seed)).ok()?;
            let au = linucb_run(&env, horizon, beta, StreamKey::new(Seed(seed), 53), seed, "linear_bandit").ok()?;
            Some((au.valid, au.potential <= au.potential_bound))
        })
        .collect();
    let ok_lin = lin.iter().filter(|r| r.is_some_and(|x| x.0)).count();
    b.check(format!("LinUCB validity {ok_lin}/50 ≥ 45"), ok_lin >= 45);
    for (seed, r) in lin.iter().enumerate() {
        shared.potentials.push((format!("LinUCB d=3 seed {seed}"), r.is_some_and(|x| x.1)));
    }

    let lsvi: Vec<Option<(bool, bool)>> = (0..50u64)
        .into_par_iter()
        .map(|seed| {
            let env = random_low_rank(6, 2, 3, 2, &mut Stream::from_seed(seed));
            let r = lsvi_ucb_run(&env, &LsviConfig::new(300, 0.1), StreamKey::new(Seed(seed), 8), seed, "random_low_rank").ok()?;
            Some((r.optimistic_episodes == 300, r.potential_ok()))
        })
        .collect();
    let ok_lsvi = lsvi.iter().filter(|r| r.is_some_and(|x| x.0)).count();
    b.check(format!("LSVI-UCB validity {ok_lsvi}/50 ≥ 45"), ok_lsvi >= 45);
    for (seed, r) in lsvi.iter().enumerate() {
        shared.potentials.push((format!("LSVI-UCB d=2 seed {seed}"), r.is_some_and(|x| x.1)));
    }
    b.note(format!("UCB-VI {ok_vi}/200, LinUCB {ok_lin}/50, LSVI-UCB {ok_lsvi}/50"));
    b.finish()
}

fn c13() -> CriterionReport {
    let mut b = Builder::new(13, "BiLinUCB PAC", Some(180.0));
    let env = random_low_rank(6, 2, 3, 2, &mut Stream::from_seed(2024));
    let t = env.tabular();
    let (star, _) = value_iteration(t);
    let opt = initial_value(t, &star.v[0]);
    let class = linear_q_class(&env, 31, 0.5, &mut Stream::from_seed(77));
    let (k, n) = (8, 2000);
    let beta = bilinucb_beta(k, n, class.len(), t.h, 0.1, 1.0);
    let runs: Vec<Option<(bool, bool)>> = (0..10u64)
        .into_par_iter()
        .map(|seed| {
            let rep = bilinucb_run(t, &class, k, n, beta, StreamKey::new(Seed(seed), 9)).ok()?;
            Some((opt - t.policy_value(&rep.policy) <= 0.1, rep.survived_all[0]))
        })
        .collect();
    let close = runs.iter().filter(|r| r.is_some_and(|x| x.0)).count();
    let kept = runs.iter().filter(|r| r.is_some_and(|x| x.1)).count();
    b.note(format!("|Q|={}, within 0.1 in {close}/10, Q* kept in {kept}/10", class.len()));
    b.check("class size 32", class.len() == 32);
    b.check("ε-optimal in ≥ 9/10", close >= 9);
    b.check("Q* survives in ≥ 9/10", kept >= 9);
    b.finish()
}

fn c14(shared: &mut Shared) -> CriterionReport {
    let mut b = Builder::new(14, "E2D bookkeeping inequality", None);
    let a = 5usize;
    let class: Vec<BanditModel> = (0..a)
        .map(|i| {
            let mut m = vec![0.5; a];
            m[i] = 0.8;
            BanditModel::gaussian(&m)
        })
        .collect();
    let horizon = 1000;
    let gamma = ((a * horizon) as f64 / (4.0 * (a as f64).ln())).sqrt();
    let mut runs: Vec<(String, Option<E2dReport>)> = (0..10u64)
        .into_par_iter()
        .map(|seed| {
            let truth = seed as usize % a;
            (format!("gaussian A=5 seed {seed}"), e2d_run(&class, truth, &E2dConfig::new(gamma, horizon), StreamKey::new(Seed(seed), 14), seed, "gaussian_mab").ok())
        })
        .collect();
    for seed in 0..2u64 {
        let mut cfg = E2dConfig::new(6.0, 300);
        cfg.divergence = DecDivergence::HellingerSq;
        runs.push((format!("gaussian A=5 Hellinger seed {seed}"), e2d_run(&class, 1, &cfg, StreamKey::new(Seed(seed), 15), seed, "gaussian_mab").ok()));
    }
    shared.e2d.extend(runs.into_iter().map(|(l, r)| (l, r.is_some_and(|r| r.holds))));
    let bad: Vec<&str> = shared.e2d.iter().filter(|r| !r.1).map(|r| r.0.as_str()).collect();
    b.note(format!("{} E2D runs, {} violations", shared.e2d.len(), bad.len()));
    for l in &bad {
        b.check(format!("{l}: regret ≤ Σ(dec + gap) + γ·Est"), false);
    }
    b.check("inequality on every run", bad.is_empty());
    b.finish()
}

fn c15() -> CriterionReport {
    let mut b = Builder::new(15, "online estimation oracle bounds", Some(5.0));
    let mut rng = Stream::from_seed(15);
    let mut ew_bad = 0;
    for _ in 0..100 {
        let n = 2 + rng.below(11);
        let horizon = 1 + rng.below(500);
        let Ok(mut ew) = ExpWeights::new(n, ExpWeights::tuned_eta(n, horizon)) else {
            ew_bad += 1;
            continue;
        };
        // Half the streams favour one expert, the rest are uniform noise.
        let biased = rng.bernoulli(0.5);
        let mut learner = 0.0;
        for _ in 0..horizon {
            let l: Vec<f64> = (0..n).map(|i| if biased && i == 0 { 0.5 * rng.uniform() } else { rng.uniform() }).collect();
            learner += ew.dist().expect(&l);
            if ew.update(&l).is_err() {
                ew_bad += 1;
            }
        }
        let best = ew.cum_loss.iter().copied().fold(f64::INFINITY, f64::min);
        if learner - best > (horizon as f64 * (n as f64).ln() / 2.0).sqrt() {
            ew_bad += 1;
        }
    }
    b.check(format!("exponential weights: {ew_bad} violations in 100 streams"), ew_bad == 0);
    let mut post_bad = 0;
    for _ in 0..100 {
        let n = 1 + rng.below(8);
        let horizon = 1 + rng.below(300);
        let laws: Vec<RewardDist> = (0..n).map(|_| RewardDist::bernoulli(0.05 + 0.9 * rng.uniform()).expect("mean in range")).collect();
        let truth = 0.05 + 0.9 * rng.uniform();
        let mut post = LogLossPosterior::uniform(n);
        for _ in 0..horizon {
            let y = if rng.bernoulli(truth) { 1.0 } else { 0.0 };
            let ld: Vec<f64> = laws.iter().map(|l| l.log_density(y)).collect();
            if post.update(&ld).is_err() {
                post_bad += 1;
            }
        }
        if post.regret() > (n as f64).ln() {
            post_bad += 1;
        }
    }
    b.check(format!("log-loss posterior: {post_bad} violations in 100 streams"), post_bad == 0);
    b.note(format!("{ew_bad} + {post_bad} violations"));
    b.finish()
}

/// Run every criterion. Reports come back ordered by id.
pub fn run_all() -> Vec<CriterionReport> {
    let mut shared = Shared::default();
    let mut out = vec![c1(), c2(), c3(), c4(), c5()];
    out.push(c6(&mut shared));
    out.push(c7());
    out.push(c9());
    out.push(c10());
    out.push(c11());
    out.push(c12(&mut shared));
    out.push(c13());
    out.push(c8(&mut shared));
    out.push(c14(&mut shared));
    out.push(c15());
    out.sort_by_key(|r| r.id);
    out
}
