//! Tabular Q-Learning scored by cumulative correct actions: the number of
//! steps at which the greedy action at the visited state equals the target
//! action.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::mdp::{argmax, check_discount, Mdp, Policy, RewardVector};
use crate::stats::Z_99;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QLearningConfig {
    pub steps: usize,
    pub learning_rate: f64,
    pub epsilon: f64,
    pub q_init: f64,
    pub seed: u64,
}

impl Default for QLearningConfig {
    fn default() -> Self {
        QLearningConfig {
            steps: 10_000,
            learning_rate: 0.1,
            epsilon: 0.1,
            q_init: 0.0,
            seed: 0,
        }
    }
}

impl QLearningConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate > 0.0 && self.learning_rate <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "learning rate {} outside (0, 1]",
                self.learning_rate
            )));
        }
        if !(0.0..=1.0).contains(&self.epsilon) {
            return Err(Error::InvalidParameter(format!(
                "epsilon {} outside [0, 1]",
                self.epsilon
            )));
        }
        if !self.q_init.is_finite() {
            return Err(Error::InvalidParameter("q_init must be finite".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunTrace {
    pub correct_flags: Vec<bool>,
    pub cumulative_correct: Vec<u32>,
    pub final_q: Vec<f64>,
    pub episodes_completed: usize,
}

impl RunTrace {
    pub fn total_correct(&self) -> u32 {
        self.cumulative_correct.last().copied().unwrap_or(0)
    }
}

fn sample_next(successors: &[(usize, f64)], u: f64) -> usize {
    let mut acc = 0.0;
    for &(next, p) in successors {
        acc += p;
        if u < acc {
            return next;
        }
    }
    successors.last().expect("non-terminal state has successors").0
}

/// One run of ε-greedy Q-Learning. Per step the generator is consumed in a
/// fixed order: exploration coin, exploratory action (only when exploring),
/// then the transition draw.
pub fn q_learning_run(
    mdp: &Mdp,
    r: &RewardVector,
    pi_plus: &Policy,
    gamma: f64,
    cfg: &QLearningConfig,
) -> Result<RunTrace> {
    q_learning_run_with(mdp, r, pi_plus, gamma, cfg, |_, _| {})
}

/// As [`q_learning_run`], calling `observe(step, q_table)` after every update.
pub fn q_learning_run_with(
    mdp: &Mdp,
    r: &RewardVector,
    pi_plus: &Policy,
    gamma: f64,
    cfg: &QLearningConfig,
    mut observe: impl FnMut(usize, &[f64]),
) -> Result<RunTrace> {
    check_discount(gamma)?;
    cfg.validate()?;
    mdp.check_policy(pi_plus)?;
    let rewards = mdp.state_rewards(r)?;
    let na = mdp.n_actions();
    let mut q = vec![cfg.q_init; mdp.n_states() * na];
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut flags = Vec::with_capacity(cfg.steps);
    let mut cumulative = Vec::with_capacity(cfg.steps);
    let mut total = 0u32;
    let mut episodes = 0;
    let mut s = mdp.start_state();
    if mdp.is_terminal(s) {
        return Err(Error::InvalidParameter("start state is terminal".into()));
    }

    for t in 0..cfg.steps {
        let row = &q[s * na..(s + 1) * na];
        let greedy = argmax(row);
        let correct = greedy == pi_plus.action(s);
        total += correct as u32;
        flags.push(correct);
        cumulative.push(total);

        let explore = rng.random::<f64>() < cfg.epsilon;
        let a = if explore { rng.random_range(0..na) } else { greedy };
        let next = sample_next(mdp.successors(s, a), rng.random::<f64>());
        let reward = rewards[next];
        let bootstrap = if mdp.is_terminal(next) {
            0.0
        } else {
            q[next * na..(next + 1) * na]
                .iter()
                .copied()
                .fold(f64::NEG_INFINITY, f64::max)
        };
        let cell = &mut q[s * na + a];
        *cell += cfg.learning_rate * (reward + gamma * bootstrap - *cell);
        observe(t, &q);

        if mdp.is_terminal(next) {
            episodes += 1;
            s = mdp.start_state();
        } else {
            s = next;
        }
    }
    Ok(RunTrace {
        correct_flags: flags,
        cumulative_correct: cumulative,
        final_q: q,
        episodes_completed: episodes,
    })
}

/// Mean cumulative correct actions per step with 99% normal-approximation
/// confidence half-widths.
#[derive(Debug, Clone, PartialEq)]
pub struct AggregateCurve {
    pub mean: Vec<f64>,
    pub half_width: Vec<f64>,
    pub n_runs: usize,
}

impl AggregateCurve {
    pub fn final_mean(&self) -> f64 {
        self.mean.last().copied().unwrap_or(0.0)
    }

    pub fn final_half_width(&self) -> f64 {
        self.half_width.last().copied().unwrap_or(0.0)
    }

    /// Lower end of this curve's final CI is above the upper end of `other`'s.
    pub fn dominates(&self, other: &AggregateCurve) -> bool {
        self.final_mean() - self.final_half_width() > other.final_mean() + other.final_half_width()
    }
}

/// Seed of run `k`: `base_seed + k` (wrapping). ChaCha streams from distinct
/// seeds are independent.
pub fn run_seed(base_seed: u64, k: usize) -> u64 {
    base_seed.wrapping_add(k as u64)
}

const RUN_CHUNK: usize = 32;

/// Independent runs aggregated in run-index order, so the result does not
/// depend on how runs are scheduled across threads.
pub fn aggregate_runs(
    mdp: &Mdp,
    r: &RewardVector,
    pi_plus: &Policy,
    gamma: f64,
    cfg: &QLearningConfig,
    n_runs: usize,
) -> Result<AggregateCurve> {
    if n_runs == 0 {
        return Err(Error::InvalidParameter("n_runs must be at least 1".into()));
    }
    cfg.validate()?;
    let steps = cfg.steps;
    let mut sum = vec![0.0; steps];
    let mut sum_sq = vec![0.0; steps];
    let mut start = 0;
    while start < n_runs {
        let end = (start + RUN_CHUNK).min(n_runs);
        let traces: Vec<Vec<u32>> = (start..end)
            .into_par_iter()
            .map(|k| {
                let run_cfg = QLearningConfig {
                    seed: run_seed(cfg.seed, k),
                    ..*cfg
                };
                q_learning_run(mdp, r, pi_plus, gamma, &run_cfg).map(|t| t.cumulative_correct)
            })
            .collect::<Result<_>>()?;
        for trace in &traces {
            for (i, &c) in trace.iter().enumerate() {
                let c = c as f64;
                sum[i] += c;
                sum_sq[i] += c * c;
            }
        }
        start = end;
    }
    let n = n_runs as f64;
    let mean: Vec<f64> = sum.iter().map(|s| s / n).collect();
    let half_width = if n_runs < 2 {
        vec![0.0; steps]
    } else {
        sum.iter()
            .zip(&sum_sq)
            .map(|(s, sq)| {
                let m = s / n;
                let var = ((sq - n * m * m) / (n - 1.0)).max(0.0);
                Z_99 * (var / n).sqrt()
            })
            .collect()
    };
    Ok(AggregateCurve {
        mean,
        half_width,
        n_runs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::environments::{chain, ChainVariant, LEFT_MOVE, RIGHT_MOVE};

    fn combo() -> RewardVector {
        RewardVector::new(vec![1.0, -1.0]).unwrap()
    }

    #[test]
    fn zero_steps() {
        let (m, pi) = chain(10, ChainVariant::TwoFeature).unwrap();
        let cfg = QLearningConfig { steps: 0, ..Default::default() };
        let t = q_learning_run(&m, &combo(), &pi, 0.95, &cfg).unwrap();
        assert!(t.correct_flags.is_empty());
        assert_eq!(t.total_correct(), 0);
    }

    #[test]
    fn two_state_chain_hand_simulation() {
        // s0 -> right -> s1 (goal, terminal). Rewards: goal +1, step -1.
        // ε = 0, α = 1, γ = 0.95, Q starts at 0.
        //   t0: Q(s0)=[0,0], greedy left (tie) -> wrong. left self-loops:
        //       Q(s0,L) = -1 + 0.95*max(Q(s0)) = -1 + 0.95*0 = -1.
        //   t1: Q(s0)=[-1,0], greedy right -> correct. enter goal:
        //       Q(s0,R) = 1 (terminal bootstrap 0). reset.
        //   t2..t9: greedy right, Q(s0,R) stays 1, every step correct.
        let (m, pi) = chain(2, ChainVariant::TwoFeature).unwrap();
        let cfg = QLearningConfig {
            steps: 10,
            learning_rate: 1.0,
            epsilon: 0.0,
            q_init: 0.0,
            seed: 3,
        };
        let t = q_learning_run(&m, &combo(), &pi, 0.95, &cfg).unwrap();
        let mut expected = vec![true; 10];
        expected[0] = false;
        assert_eq!(t.correct_flags, expected);
        assert_eq!(t.cumulative_correct, (0..10).collect::<Vec<u32>>());
        assert_eq!(t.final_q[LEFT_MOVE], -1.0);
        assert_eq!(t.final_q[RIGHT_MOVE], 1.0);
        assert_eq!(t.episodes_completed, 9);
    }

    #[test]
    fn determinism() {
        let (m, pi) = chain(20, ChainVariant::TwoFeature).unwrap();
        let cfg = QLearningConfig { steps: 2_000, seed: 11, ..Default::default() };
        let a = q_learning_run(&m, &combo(), &pi, 0.95, &cfg).unwrap();
        let b = q_learning_run(&m, &combo(), &pi, 0.95, &cfg).unwrap();
        assert_eq!(a, b);
        let c = aggregate_runs(&m, &combo(), &pi, 0.95, &cfg, 5).unwrap();
        let d = aggregate_runs(&m, &combo(), &pi, 0.95, &cfg, 5).unwrap();
        assert_eq!(c, d);
    }

    #[test]
    fn single_run_aggregate() {
        let (m, pi) = chain(20, ChainVariant::TwoFeature).unwrap();
        let cfg = QLearningConfig { steps: 500, seed: 5, ..Default::default() };
        let agg = aggregate_runs(&m, &combo(), &pi, 0.95, &cfg, 1).unwrap();
        let t = q_learning_run(&m, &combo(), &pi, 0.95, &cfg).unwrap();
        let as_f: Vec<f64> = t.cumulative_correct.iter().map(|&c| c as f64).collect();
        assert_eq!(agg.mean, as_f);
        assert!(agg.half_width.iter().all(|&h| h == 0.0));
        assert!(aggregate_runs(&m, &combo(), &pi, 0.95, &cfg, 0).is_err());
    }

    #[test]
    fn goal_reward_never_moves_argmax_before_goal() {
        let (m, pi) = chain(60, ChainVariant::TwoFeature).unwrap();
        let r = RewardVector::new(vec![1.0, 0.0]).unwrap();
        let cfg = QLearningConfig {
            steps: 5_000,
            epsilon: 0.0,
            seed: 1,
            ..Default::default()
        };
        let mut reached = false;
        let t = q_learning_run_with(&m, &r, &pi, 0.95, &cfg, |_, q| {
            if !reached {
                reached = q.iter().any(|&v| v != 0.0);
            }
        })
        .unwrap();
        // greedy ties pick "left"; without exploration the goal is never found
        assert!(!reached);
        assert_eq!(t.total_correct(), 0);
        assert_eq!(t.episodes_completed, 0);
    }

    #[test]
    fn rejects_bad_config() {
        let (m, pi) = chain(5, ChainVariant::TwoFeature).unwrap();
        for cfg in [
            QLearningConfig { learning_rate: 0.0, ..Default::default() },
            QLearningConfig { learning_rate: 1.5, ..Default::default() },
            QLearningConfig { epsilon: -0.1, ..Default::default() },
            QLearningConfig { q_init: f64::NAN, ..Default::default() },
        ] {
            assert!(q_learning_run(&m, &combo(), &pi, 0.95, &cfg).is_err());
        }
    }
}
