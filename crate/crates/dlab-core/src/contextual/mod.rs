//! Contextual bandits driven by regression oracles: inverse gap weighting,
//! SquareCB (online and epoched), ε-Greedy and LinUCB.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::envs::{ContextualEnv, LinearEnv};
use crate::error::Error;
use crate::estimators::{confidence_beta, least_squares_finite, FiniteClass};
use crate::ledger::RegretLedger;
use crate::math;
use crate::numprob::dist::FiniteDist;
use crate::numprob::linalg::{ridge_in_ball, sherman_morrison, Mat};
use crate::numprob::rng::StreamKey;

/// Inverse gap weighting distribution with its normalizer.
#[derive(Debug, Clone, PartialEq)]
pub struct IgwDistribution {
    pub p: FiniteDist,
    pub lambda: f64,
}

/// `p(π) = 1/(λ + coef·(max f̂ − f̂(π)))`, `λ ∈ [1, A]` chosen so `Σp = 1`.
pub fn igw_raw(values: &[f64], coef: f64) -> IgwDistribution {
    let a = values.len();
    assert!(a > 0 && coef >= 0.0);
    if coef == 0.0 {
        return IgwDistribution { p: FiniteDist::uniform(a), lambda: a as f64 };
    }
    let best = math::max(values);
    let gaps: Vec<f64> = values.iter().map(|v| best - v).collect();
    let total = |lam: f64| gaps.iter().map(|g| 1.0 / (lam + coef * g)).sum::<f64>();
    let (mut lo, mut hi) = (1.0, a as f64);
    // Total mass is decreasing in λ: ≥ 1 at λ=1 (greedy term alone) and ≤ 1 at λ=A.
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if total(mid) > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * hi {
            break;
        }
    }
    let lambda = 0.5 * (lo + hi);
    let p: Vec<f64> = gaps.iter().map(|g| 1.0 / (lambda + coef * g)).collect();
    let s: f64 = p.iter().sum();
    debug_assert!((s - 1.0).abs() < 1e-10);
    let p = FiniteDist::new(p.into_iter().map(|x| x / s).collect()).expect("normalized");
    IgwDistribution { p, lambda }
}

/// The displayed IGW rule with gap coefficient `2γ`.
pub fn igw(values: &[f64], gamma: f64) -> IgwDistribution {
    igw_raw(values, 2.0 * gamma)
}

pub fn squarecb_act(pred: &[f64], gamma: f64) -> FiniteDist {
    igw(pred, gamma).p
}

/// `γ = √(T A / Est)`.
pub fn squarecb_gamma(horizon: usize, a: usize, est: f64) -> f64 {
    math::sqrt(horizon as f64 * a as f64 / est)
}

pub fn eps_greedy_cb_act(pred: &[f64], eps: f64, a: usize) -> FiniteDist {
    let mut p = vec![eps / a as f64; a];
    p[math::argmax(pred)] += 1.0 - eps;
    FiniteDist::from_weights(&p).expect("valid mixture")
}

/// One epoch of the offline schedule: rounds `start..=end` (1-based).
#[derive(Debug, Clone, PartialEq)]
pub struct Epoch {
    pub m: usize,
    pub start: usize,
    pub end: usize,
    pub gamma: f64,
}

/// Epochs `τ_m = 2^m` with `γ_m = √(AT / Est_off(τ_{m−1}))`. Round 1 sits in
/// epoch 0 with `γ = 0` (uniform, no data yet).
pub fn epoch_squarecb_schedule(horizon: usize, a: usize, est_off: impl Fn(usize) -> f64) -> Vec<Epoch> {
    assert!(horizon >= 2);
    let mut out = vec![Epoch { m: 0, start: 1, end: 1, gamma: 0.0 }];
    let mut m = 1;
    loop {
        let start = (1usize << (m - 1)) + 1;
        if start > horizon {
            break;
        }
        let end = (1usize << m).min(horizon);
        let gamma = squarecb_gamma(horizon, a, est_off(1 << (m - 1)));
        out.push(Epoch { m, start, end, gamma });
        m += 1;
    }
    out
}

/// Interface shared by all contextual learners.
pub trait ContextualAlgorithm {
    fn name(&self) -> String;
    fn act(&mut self, t: usize, x: usize) -> FiniteDist;
    fn observe(&mut self, t: usize, x: usize, a: usize, r: f64) -> Result<(), Error>;
}

/// Follow-the-leader square-loss oracle over a finite class on `X × A`
/// (query index `x·A + a`).
#[derive(Debug, Clone)]
pub struct OnlineLeastSquares {
    pub class: FiniteClass,
    pub actions: usize,
    pub cum_loss: Vec<f64>,
}

impl OnlineLeastSquares {
    pub fn new(class: FiniteClass, actions: usize) -> Self {
        let n = class.len();
        OnlineLeastSquares { class, actions, cum_loss: vec![0.0; n] }
    }

    pub fn leader(&self) -> usize {
        let neg: Vec<f64> = self.cum_loss.iter().map(|l| -l).collect();
        math::argmax(&neg)
    }

    pub fn predict(&self, x: usize) -> Vec<f64> {
        let f = self.leader();
        (0..self.actions).map(|a| self.class.eval(f, x * self.actions + a)).collect()
    }

    pub fn update(&mut self, x: usize, a: usize, r: f64) {
        let q = x * self.actions + a;
        for (f, l) in self.cum_loss.iter_mut().enumerate() {
            let e = self.class.eval(f, q) - r;
            *l += e * e;
        }
    }
}

#[derive(Debug, Clone)]
pub struct SquareCb {
    pub oracle: OnlineLeastSquares,
    pub gamma: f64,
}

impl ContextualAlgorithm for SquareCb {
    fn name(&self) -> String {
        "squarecb".into()
    }
    fn act(&mut self, _t: usize, x: usize) -> FiniteDist {
        squarecb_act(&self.oracle.predict(x), self.gamma)
    }
    fn observe(&mut self, _t: usize, x: usize, a: usize, r: f64) -> Result<(), Error> {
        self.oracle.update(x, a, r);
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct EpsGreedyCb {
    pub oracle: OnlineLeastSquares,
    pub eps: f64,
}

impl ContextualAlgorithm for EpsGreedyCb {
    fn name(&self) -> String {
        "eps_greedy_cb".into()
    }
    fn act(&mut self, _t: usize, x: usize) -> FiniteDist {
        eps_greedy_cb_act(&self.oracle.predict(x), self.eps, self.oracle.actions)
    }
    fn observe(&mut self, _t: usize, x: usize, a: usize, r: f64) -> Result<(), Error> {
        self.oracle.update(x, a, r);
        Ok(())
    }
}

/// SquareCB with an offline least-squares oracle refit once per epoch on
/// the previous epoch's data only.
#[derive(Debug, Clone)]
pub struct EpochSquareCb {
    pub class: FiniteClass,
    pub actions: usize,
    pub schedule: Vec<Epoch>,
    /// Data of the epoch currently being played, as `(query, reward)`.
    pub current: Vec<(usize, f64)>,
    pub fitted: Option<usize>,
    epoch: usize,
    /// Rounds whose data each fit consumed, for replay audits.
    pub fit_log: Vec<(usize, usize, usize)>,
    first_round_of_data: usize,
}

impl EpochSquareCb {
    pub fn new(class: FiniteClass, actions: usize, horizon: usize, delta: f64) -> Self {
        let beta = confidence_beta(class.len(), delta);
        let schedule = epoch_squarecb_schedule(horizon, actions, |_| beta);
        EpochSquareCb {
            class,
            actions,
            schedule,
            current: Vec::new(),
            fitted: None,
            epoch: 0,
            fit_log: Vec::new(),
            first_round_of_data: 1,
        }
    }

    fn epoch_of(&self, t: usize) -> usize {
        self.schedule.iter().position(|e| t >= e.start && t <= e.end).expect("round within horizon")
    }
}

impl ContextualAlgorithm for EpochSquareCb {
    fn name(&self) -> String {
        "epoch_squarecb".into()
    }
    fn act(&mut self, t: usize, x: usize) -> FiniteDist {
        let e = self.epoch_of(t);
        if e != self.epoch {
            let fit = least_squares_finite(&self.class, &self.current).expect("class nonempty");
            self.fitted = Some(fit.index);
            self.fit_log.push((e, self.first_round_of_data, t - 1));
            self.current.clear();
            self.first_round_of_data = t;
            self.epoch = e;
        }
        match self.fitted {
            None => FiniteDist::uniform(self.actions),
            Some(f) => {
                let pred: Vec<f64> = (0..self.actions).map(|a| self.class.eval(f, x * self.actions + a)).collect();
                squarecb_act(&pred, self.schedule[e].gamma)
            }
        }
    }
    fn observe(&mut self, _t: usize, x: usize, a: usize, r: f64) -> Result<(), Error> {
        self.current.push((x * self.actions + a, r));
        Ok(())
    }
}

/// Run a contextual learner; expected regret is exact given the drawn context.
pub fn run_contextual(
    env: &ContextualEnv,
    algo: &mut dyn ContextualAlgorithm,
    horizon: usize,
    key: StreamKey,
    seed: u64,
    env_name: &str,
) -> Result<RegretLedger, Error> {
    let mut ledger = RegretLedger::new(seed, algo.name(), env_name);
    for t in 1..=horizon {
        let mut rng = key.round(t as u64);
        let x = env.sample_context(&mut rng);
        let p = algo.act(t, x);
        let a = p.sample(&mut rng);
        let r = env.reward(x, a, &mut rng)?;
        ledger.push(env.expected_regret(x, p.probs()), r);
        algo.observe(t, x, a, r)?;
    }
    Ok(ledger)
}

/// LinUCB state: `Σ̃ = I + Σφφᵀ`, its inverse, `Σ rφ`, and the projected
/// least-squares estimate.
#[derive(Debug, Clone)]
pub struct LinUcbState {
    pub gram: Mat,
    pub sigma_inv: Mat,
    pub b: Vec<f64>,
    pub theta: Vec<f64>,
    pub beta: f64,
    /// Running `Σ_t ‖φ_t‖²_{Σ̃_t⁻¹}`.
    pub potential: f64,
}

impl LinUcbState {
    pub fn new(d: usize, beta: f64) -> Self {
        LinUcbState {
            gram: Mat::zeros(d, d),
            sigma_inv: Mat::identity(d),
            b: vec![0.0; d],
            theta: vec![0.0; d],
            beta,
            potential: 0.0,
        }
    }

    pub fn dim(&self) -> usize {
        self.b.len()
    }

    pub fn radius(&self) -> f64 {
        math::sqrt(16.0 * self.beta + 4.0)
    }

    pub fn bonus(&self, phi: &[f64]) -> f64 {
        self.radius() * math::sqrt(self.sigma_inv.quad(phi).max(0.0))
    }

    pub fn update(&mut self, phi: &[f64], r: f64) {
        self.potential += self.sigma_inv.quad(phi);
        self.gram.add_outer(phi, 1.0);
        sherman_morrison(&mut self.sigma_inv, phi);
        for (bi, p) in self.b.iter_mut().zip(phi) {
            *bi += r * p;
        }
        self.theta = ridge_in_ball(&self.gram, &self.b, 1.0);
    }

    /// `‖θ̂ − θ‖²_{Σ̃}`.
    pub fn confidence_distance(&self, theta: &[f64]) -> f64 {
        let diff: Vec<f64> = self.theta.iter().zip(theta).map(|(a, b)| a - b).collect();
        let mut sigma = self.gram.clone();
        for i in 0..self.dim() {
            sigma[(i, i)] += 1.0;
        }
        sigma.quad(&diff)
    }
}

/// `β` for the unit-ball linear class through a `1/T`-net:
/// `8 (d ln(1 + 2T) + ln(1/δ))`.
pub fn linucb_beta(d: usize, horizon: usize, delta: f64) -> f64 {
    8.0 * (d as f64 * math::ln(1.0 + 2.0 * horizon as f64) + math::ln(1.0 / delta))
}

pub fn linucb_act(state: &LinUcbState, features: &[Vec<f64>]) -> FiniteDist {
    let scores: Vec<f64> = features.iter().map(|f| math::dot(&state.theta, f) + state.bonus(f)).collect();
    FiniteDist::point(features.len(), math::argmax(&scores))
}

/// Per-run audit of a LinUCB run.
#[derive(Debug, Clone, PartialEq)]
pub struct LinUcbAudit {
    pub ledger: RegretLedger,
    pub potential: f64,
    pub potential_bound: f64,
    /// Confidence validity `‖θ̂−θ*‖²_{Σ̃} ≤ 16β+4` held at every round.
    pub valid: bool,
}

/// `2 d ln(1 + T/d)`.
pub fn elliptic_potential_bound(d: usize, horizon: usize) -> f64 {
    2.0 * d as f64 * math::ln(1.0 + horizon as f64 / d as f64)
}

pub fn linucb_run(env: &LinearEnv, horizon: usize, beta: f64, key: StreamKey, seed: u64, env_name: &str) -> Result<LinUcbAudit, Error> {
    let d = env.theta.len();
    let mut st = LinUcbState::new(d, beta);
    let mut ledger = RegretLedger::new(seed, "linucb", env_name);
    let mut valid = true;
    let r2 = 16.0 * beta + 4.0;
    for t in 1..=horizon {
        let mut rng = key.round(t as u64);
        valid &= st.confidence_distance(&env.theta) <= r2;
        let p = linucb_act(&st, &env.features);
        let a = math::argmax(p.probs());
        let r = env.model.sample(a, &mut rng)?;
        ledger.push(env.model.regret(a), r);
        st.update(&env.features[a], r);
    }
    Ok(LinUcbAudit { ledger, potential: st.potential, potential_bound: elliptic_potential_bound(d, horizon), valid })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn igw_examples() {
        let g = igw(&[0.3, 0.3], 5.0);
        assert!((g.lambda - 2.0).abs() < 1e-12 && (g.p[0] - 0.5).abs() < 1e-12);
        let g = igw(&[1.0, 0.0], 0.5);
        let phi = (1.0 + math::sqrt(5.0)) / 2.0;
        assert!((g.lambda - phi).abs() < 1e-10);
        assert!((g.p[0] - 1.0 / phi).abs() < 1e-10);
        let g = igw(&[1.0, 0.5, 0.5], 1.0);
        assert!((g.lambda - (1.0 + math::sqrt(2.0))).abs() < 1e-10);
        assert!((g.p[1] - 1.0 / (2.0 + math::sqrt(2.0))).abs() < 1e-10);
        assert_eq!(igw(&[0.9, 0.1, 0.4], 0.0).p, FiniteDist::uniform(3));
    }

    #[test]
    fn schedule_sixteen() {
        let s = epoch_squarecb_schedule(16, 2, |_| 1.0);
        let ranges: Vec<(usize, usize)> = s.iter().map(|e| (e.start, e.end)).collect();
        assert_eq!(ranges, vec![(1, 1), (2, 2), (3, 4), (5, 8), (9, 16)]);
        let s = epoch_squarecb_schedule(64, 3, |tau| 1.0 / tau as f64);
        assert!(s.windows(2).all(|w| w[1].gamma >= w[0].gamma));
    }

    #[test]
    fn linucb_no_data_prefers_longest_feature() {
        let st = LinUcbState::new(2, 1.0);
        let feats = vec![vec![0.5, 0.0], vec![0.0, 0.9], vec![0.9, 0.0]];
        assert_eq!(linucb_act(&st, &feats), FiniteDist::point(3, 1));
    }

    #[test]
    fn linucb_bonus_shrinks_on_pulled_direction() {
        let mut st = LinUcbState::new(2, 1.0);
        for _ in 0..50 {
            st.update(&[1.0, 0.0], 0.0);
        }
        assert!(st.bonus(&[0.0, 1.0]) > st.bonus(&[1.0, 0.0]));
        let feats = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        assert_eq!(linucb_act(&st, &feats), FiniteDist::point(2, 1));
    }

    #[test]
    fn projection_keeps_unit_norm() {
        let mut st = LinUcbState::new(2, 1.0);
        for _ in 0..100 {
            st.update(&[1.0, 0.0], 5.0);
        }
        assert!((math::norm(&st.theta) - 1.0).abs() < 1e-9);
    }
}
