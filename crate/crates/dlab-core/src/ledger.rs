use alloc::string::String;
use alloc::vec::Vec;

#[derive(Debug, Clone, PartialEq)]
pub struct LedgerRow {
    pub t: u64,
    pub inst_regret: f64,
    pub cum_regret: f64,
    pub reward: f64,
}

/// Per-round expected regret with the realized reward alongside.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RegretLedger {
    pub seed: u64,
    pub algo: String,
    pub env: String,
    pub rows: Vec<LedgerRow>,
}

impl RegretLedger {
    pub fn new(seed: u64, algo: impl Into<String>, env: impl Into<String>) -> Self {
        RegretLedger { seed, algo: algo.into(), env: env.into(), rows: Vec::new() }
    }

    pub fn push(&mut self, inst_regret: f64, reward: f64) {
        let cum = self.cumulative() + inst_regret;
        let t = self.rows.len() as u64 + 1;
        self.rows.push(LedgerRow { t, inst_regret, cum_regret: cum, reward });
    }

    pub fn cumulative(&self) -> f64 {
        self.rows.last().map_or(0.0, |r| r.cum_regret)
    }

    /// Cumulative regret after `t` rounds (1-based; 0 gives 0).
    pub fn cumulative_at(&self, t: usize) -> f64 {
        if t == 0 {
            0.0
        } else {
            self.rows[t.min(self.rows.len()) - 1].cum_regret
        }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn total_reward(&self) -> f64 {
        self.rows.iter().map(|r| r.reward).sum()
    }
}
