use alloc::vec;
use alloc::vec::Vec;

use crate::numprob::dist::FiniteDist;

use super::tabular::TabularMDP;

/// Good-action code used by [`combination_lock`]: `1, 0, 1, 0, …`.
/// Starting with action 1 keeps lowest-index tie-breaking from solving the
/// lock by accident.
pub fn default_lock_code(h: usize) -> Vec<usize> {
    (0..h).map(|i| 1 - i % 2).collect()
}

pub fn combination_lock(h: usize) -> TabularMDP {
    combination_lock_with_code(&default_lock_code(h))
}

/// Chain states `0..H`, goal `H`, dead `H+1`; two actions. At layer `h` the
/// good action `code[h]` advances the chain, the other falls into the
/// absorbing dead state. Reward 1 is paid only for the last good action.
pub fn combination_lock_with_code(code: &[usize]) -> TabularMDP {
    let h = code.len();
    assert!(h >= 1, "combination lock needs H ≥ 1");
    assert!(code.iter().all(|&c| c < 2), "code entries must be 0 or 1");
    let (ns, na) = (h + 2, 2);
    let (goal, dead) = (h, h + 1);
    let mut p = vec![0.0; h * ns * na * ns];
    let mut r = vec![0.0; h * ns * na];
    for layer in 0..h {
        for s in 0..ns {
            for a in 0..na {
                let next = if s == goal {
                    goal
                } else if s == layer && a == code[layer] {
                    s + 1
                } else {
                    dead
                };
                let i = (layer * ns + s) * na + a;
                p[i * ns + next] = 1.0;
                if layer == h - 1 && s == layer && a == code[layer] {
                    r[i] = 1.0;
                }
            }
        }
    }
    TabularMDP::new(ns, na, h, p, r, FiniteDist::point(ns, 0)).expect("lock construction is valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::envs::tabular::Policy;

    #[test]
    fn exactly_one_sequence_opens() {
        let lock = combination_lock(3);
        let mut winners = 0;
        for bits in 0..8usize {
            let seq: Vec<usize> = (0..3).map(|k| (bits >> k) & 1).collect();
            let table: Vec<Vec<usize>> = seq.iter().map(|&a| vec![a; lock.s]).collect();
            let v = lock.policy_value(&Policy::deterministic(&table, 2));
            assert!(v == 0.0 || v == 1.0);
            if v == 1.0 {
                winners += 1;
                assert_eq!(seq, default_lock_code(3));
            }
        }
        assert_eq!(winners, 1);
    }

    #[test]
    fn uniform_policy_value() {
        for h in 1..=10 {
            let lock = combination_lock(h);
            let v = lock.policy_value(&Policy::uniform(h, h + 2, 2));
            assert_eq!(v, 0.5f64.powi(h as i32));
        }
    }

    #[test]
    fn two_layer_occupancy() {
        let lock = combination_lock(2);
        let d = lock.state_occupancy(&Policy::uniform(2, 4, 2));
        assert_eq!(d[1][1], 0.5);
        assert_eq!(d[1][3], 0.5);
    }
}
