//! Finite MDPs with state-based linear rewards.
//!
//! Reward timing: a state's reward accrues while it is occupied, so
//! `V(s) = R(s) + γ Σ T(s, π(s), s') V(s')`. Terminal states are absorbing,
//! pay their own reward once and have no continuation.

use crate::error::{Error, Result};
use crate::linalg::solve_refined;

/// Row-sum tolerance for stochastic transition rows.
pub const STOCHASTIC_TOL: f64 = 1e-12;

/// Value-iteration stopping rule.
pub const VI_TOL: f64 = 1e-12;
pub const VI_MAX_SWEEPS: usize = 100_000;

#[derive(Debug, Clone, PartialEq)]
pub struct Mdp {
    n_states: usize,
    n_actions: usize,
    n_features: usize,
    /// Sparse successor lists, indexed by `s * n_actions + a`. Empty for terminals.
    transitions: Vec<Vec<(usize, f64)>>,
    terminal: Vec<bool>,
    start: usize,
    /// Row-major `n_states x n_features`.
    features: Vec<f64>,
    discount: f64,
}

pub(crate) fn check_discount(gamma: f64) -> Result<()> {
    if (0.0..1.0).contains(&gamma) {
        Ok(())
    } else {
        Err(Error::InvalidDiscount(gamma))
    }
}

impl Mdp {
    /// Builds and validates an MDP.
    ///
    /// `transitions[s * n_actions + a]` lists `(next_state, probability)` pairs.
    /// Rows of terminal states are ignored and stored empty.
    pub fn new(
        n_states: usize,
        n_actions: usize,
        mut transitions: Vec<Vec<(usize, f64)>>,
        terminal: Vec<bool>,
        start: usize,
        features: Vec<Vec<f64>>,
        discount: f64,
    ) -> Result<Self> {
        if n_states == 0 {
            return Err(Error::InvalidParameter("MDP needs at least one state".into()));
        }
        if n_actions == 0 {
            return Err(Error::InvalidParameter("MDP needs at least one action".into()));
        }
        check_discount(discount)?;
        if transitions.len() != n_states * n_actions {
            return Err(Error::DimensionMismatch {
                what: "transition rows",
                expected: n_states * n_actions,
                found: transitions.len(),
            });
        }
        if terminal.len() != n_states {
            return Err(Error::DimensionMismatch {
                what: "terminal mask",
                expected: n_states,
                found: terminal.len(),
            });
        }
        if start >= n_states {
            return Err(Error::IndexOutOfRange {
                what: "start state",
                index: start,
                len: n_states,
            });
        }
        if features.len() != n_states {
            return Err(Error::DimensionMismatch {
                what: "feature rows",
                expected: n_states,
                found: features.len(),
            });
        }
        let n_features = features.first().map_or(0, Vec::len);
        if n_features == 0 {
            return Err(Error::InvalidParameter("MDP needs at least one feature".into()));
        }
        let mut flat = Vec::with_capacity(n_states * n_features);
        for row in &features {
            if row.len() != n_features {
                return Err(Error::DimensionMismatch {
                    what: "feature row",
                    expected: n_features,
                    found: row.len(),
                });
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidParameter("non-finite feature value".into()));
            }
            flat.extend_from_slice(row);
        }
        for s in 0..n_states {
            for a in 0..n_actions {
                let row = &mut transitions[s * n_actions + a];
                if terminal[s] {
                    row.clear();
                    continue;
                }
                let mut sum = 0.0;
                for &(next, p) in row.iter() {
                    if next >= n_states {
                        return Err(Error::IndexOutOfRange {
                            what: "successor state",
                            index: next,
                            len: n_states,
                        });
                    }
                    if !(p.is_finite() && p >= 0.0) {
                        return Err(Error::InvalidProbability {
                            state: s,
                            action: a,
                            next,
                            prob: p,
                        });
                    }
                    sum += p;
                }
                if (sum - 1.0).abs() > STOCHASTIC_TOL {
                    return Err(Error::NotStochastic {
                        state: s,
                        action: a,
                        sum,
                    });
                }
                row.retain(|&(_, p)| p > 0.0);
            }
        }
        Ok(Mdp {
            n_states,
            n_actions,
            n_features,
            transitions,
            terminal,
            start,
            features: flat,
            discount,
        })
    }

    pub fn n_states(&self) -> usize {
        self.n_states
    }

    pub fn n_actions(&self) -> usize {
        self.n_actions
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn start_state(&self) -> usize {
        self.start
    }

    pub fn discount(&self) -> f64 {
        self.discount
    }

    pub fn is_terminal(&self, s: usize) -> bool {
        self.terminal[s]
    }

    pub fn terminal_mask(&self) -> &[bool] {
        &self.terminal
    }

    /// Non-zero successors of `(s, a)`; empty for terminal states.
    pub fn successors(&self, s: usize, a: usize) -> &[(usize, f64)] {
        &self.transitions[s * self.n_actions + a]
    }

    pub fn feature_row(&self, s: usize) -> &[f64] {
        &self.features[s * self.n_features..(s + 1) * self.n_features]
    }

    pub fn feature(&self, s: usize, i: usize) -> f64 {
        self.features[s * self.n_features + i]
    }

    /// `T(s, a, s')`.
    pub fn prob(&self, s: usize, a: usize, next: usize) -> f64 {
        self.successors(s, a)
            .iter()
            .filter(|&&(n, _)| n == next)
            .map(|&(_, p)| p)
            .sum()
    }

    pub fn decision_states(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.n_states).filter(move |&s| !self.terminal[s])
    }

    /// The same MDP with one indicator feature per state.
    pub fn with_state_features(&self) -> Mdp {
        let n = self.n_states;
        let mut features = vec![0.0; n * n];
        for s in 0..n {
            features[s * n + s] = 1.0;
        }
        Mdp {
            n_features: n,
            features,
            ..self.clone()
        }
    }

    /// Replaces the feature matrix.
    pub fn with_features(&self, features: Vec<Vec<f64>>) -> Result<Mdp> {
        Mdp::new(
            self.n_states,
            self.n_actions,
            self.transitions.clone(),
            self.terminal.clone(),
            self.start,
            features,
            self.discount,
        )
    }

    /// Same dynamics and features under a different objective discount.
    pub fn with_discount(&self, discount: f64) -> Result<Mdp> {
        check_discount(discount)?;
        Ok(Mdp {
            discount,
            ..self.clone()
        })
    }

    /// Per-state rewards `R(s) = Σ_i F(s, i) R(i)`.
    pub fn state_rewards(&self, r: &RewardVector) -> Result<Vec<f64>> {
        self.check_reward(r)?;
        Ok((0..self.n_states)
            .map(|s| dot(self.feature_row(s), r.weights()))
            .collect())
    }

    pub(crate) fn check_reward(&self, r: &RewardVector) -> Result<()> {
        if r.len() != self.n_features {
            return Err(Error::DimensionMismatch {
                what: "reward weights",
                expected: self.n_features,
                found: r.len(),
            });
        }
        Ok(())
    }

    pub(crate) fn check_policy(&self, pi: &Policy) -> Result<()> {
        if pi.len() != self.n_states {
            return Err(Error::DimensionMismatch {
                what: "policy",
                expected: self.n_states,
                found: pi.len(),
            });
        }
        for s in self.decision_states() {
            let a = pi.action(s);
            if a >= self.n_actions {
                return Err(Error::IndexOutOfRange {
                    what: "policy action",
                    index: a,
                    len: self.n_actions,
                });
            }
        }
        Ok(())
    }

    fn expected_next(&self, s: usize, a: usize, v: &[f64]) -> f64 {
        self.successors(s, a).iter().map(|&(n, p)| p * v[n]).sum()
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Per-feature reward weights.
#[derive(Debug, Clone, PartialEq)]
pub struct RewardVector {
    weights: Vec<f64>,
}

impl RewardVector {
    pub const BOUND: f64 = 1.0;

    /// Weights must lie in `[-1, 1]`.
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if let Some(w) = weights.iter().find(|w| !(w.abs() <= Self::BOUND)) {
            return Err(Error::InvalidParameter(format!(
                "reward weight {w} outside [-1, 1]"
            )));
        }
        Ok(RewardVector { weights })
    }

    /// Accepts any finite weights; see [`RewardVector::out_of_bounds`].
    pub fn unbounded(weights: Vec<f64>) -> Result<Self> {
        if weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::InvalidParameter("non-finite reward weight".into()));
        }
        Ok(RewardVector { weights })
    }

    pub fn zeros(n: usize) -> Self {
        RewardVector {
            weights: vec![0.0; n],
        }
    }

    /// Indices of weights outside `[-1, 1]`.
    pub fn out_of_bounds(&self) -> Vec<usize> {
        self.weights
            .iter()
            .enumerate()
            .filter(|(_, w)| w.abs() > Self::BOUND)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn scaled(&self, c: f64) -> RewardVector {
        RewardVector {
            weights: self.weights.iter().map(|w| w * c).collect(),
        }
    }
}

/// Deterministic policy: one action per state. Actions stored for terminal
/// states are ignored.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Policy {
    actions: Vec<usize>,
}

impl Policy {
    pub fn new(actions: Vec<usize>) -> Self {
        Policy { actions }
    }

    pub fn uniform(n_states: usize, action: usize) -> Self {
        Policy {
            actions: vec![action; n_states],
        }
    }

    pub fn action(&self, s: usize) -> usize {
        self.actions[s]
    }

    pub fn actions(&self) -> &[usize] {
        &self.actions
    }

    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }

    /// Equality restricted to non-terminal states.
    pub fn agrees_with(&self, other: &Policy, mdp: &Mdp) -> bool {
        mdp.decision_states()
            .all(|s| self.actions[s] == other.actions[s])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValueTables {
    pub v: Vec<f64>,
    /// Row-major `n_states x n_actions`.
    pub q: Vec<f64>,
    n_actions: usize,
}

impl ValueTables {
    pub fn new(v: Vec<f64>, q: Vec<f64>, n_actions: usize) -> Self {
        debug_assert_eq!(q.len(), v.len() * n_actions);
        ValueTables { v, q, n_actions }
    }

    pub fn q(&self, s: usize, a: usize) -> f64 {
        self.q[s * self.n_actions + a]
    }

    pub fn q_row(&self, s: usize) -> &[f64] {
        &self.q[s * self.n_actions..(s + 1) * self.n_actions]
    }

    pub fn n_actions(&self) -> usize {
        self.n_actions
    }
}

/// Lowest-index argmax.
pub fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

pub fn reward_of_state(mdp: &Mdp, r: &RewardVector, s: usize) -> Result<f64> {
    mdp.check_reward(r)?;
    if s >= mdp.n_states {
        return Err(Error::IndexOutOfRange {
            what: "state",
            index: s,
            len: mdp.n_states,
        });
    }
    Ok(dot(mdp.feature_row(s), r.weights()))
}

fn q_from_v(mdp: &Mdp, rewards: &[f64], v: &[f64], gamma: f64) -> Vec<f64> {
    let na = mdp.n_actions;
    let mut q = vec![0.0; mdp.n_states * na];
    for s in 0..mdp.n_states {
        for a in 0..na {
            q[s * na + a] = if mdp.terminal[s] {
                rewards[s]
            } else {
                rewards[s] + gamma * mdp.expected_next(s, a, v)
            };
        }
    }
    q
}

/// Exact evaluation of `pi` at discount `gamma` by a direct linear solve.
pub fn evaluate_policy(
    mdp: &Mdp,
    r: &RewardVector,
    pi: &Policy,
    gamma: f64,
) -> Result<ValueTables> {
    check_discount(gamma)?;
    mdp.check_policy(pi)?;
    let rewards = mdp.state_rewards(r)?;
    let v = evaluate_rewards(mdp, &rewards, pi, gamma)?;
    let q = q_from_v(mdp, &rewards, &v, gamma);
    Ok(ValueTables::new(v, q, mdp.n_actions))
}

/// `(I - γ T_π) V = R` with identity rows at terminals.
pub(crate) fn policy_matrix(mdp: &Mdp, pi: &Policy, gamma: f64) -> Vec<f64> {
    let n = mdp.n_states;
    let mut a = vec![0.0; n * n];
    for s in 0..n {
        a[s * n + s] = 1.0;
        if mdp.terminal[s] {
            continue;
        }
        for &(next, p) in mdp.successors(s, pi.action(s)) {
            a[s * n + next] -= gamma * p;
        }
    }
    a
}

fn evaluate_rewards(mdp: &Mdp, rewards: &[f64], pi: &Policy, gamma: f64) -> Result<Vec<f64>> {
    let a = policy_matrix(mdp, pi, gamma);
    solve_refined(mdp.n_states, &a, rewards)
}

/// Max-norm residual of the policy Bellman equations.
pub fn bellman_residual(
    mdp: &Mdp,
    r: &RewardVector,
    pi: &Policy,
    gamma: f64,
    values: &ValueTables,
) -> Result<f64> {
    let rewards = mdp.state_rewards(r)?;
    let mut worst: f64 = 0.0;
    for s in 0..mdp.n_states {
        let target = if mdp.terminal[s] {
            rewards[s]
        } else {
            rewards[s] + gamma * mdp.expected_next(s, pi.action(s), &values.v)
        };
        worst = worst.max((values.v[s] - target).abs());
    }
    Ok(worst)
}

/// Value iteration to [`VI_TOL`] followed by the greedy policy.
pub fn optimal_policy(mdp: &Mdp, r: &RewardVector, gamma: f64) -> Result<(Policy, ValueTables)> {
    check_discount(gamma)?;
    let rewards = mdp.state_rewards(r)?;
    let n = mdp.n_states;
    let mut v = rewards.clone();
    let mut next = vec![0.0; n];
    for _ in 0..VI_MAX_SWEEPS {
        let mut delta: f64 = 0.0;
        for s in 0..n {
            next[s] = if mdp.terminal[s] {
                rewards[s]
            } else {
                (0..mdp.n_actions)
                    .map(|a| mdp.expected_next(s, a, &v))
                    .fold(f64::NEG_INFINITY, f64::max)
                    * gamma
                    + rewards[s]
            };
            delta = delta.max((next[s] - v[s]).abs());
        }
        std::mem::swap(&mut v, &mut next);
        if delta < VI_TOL {
            break;
        }
    }
    let q = q_from_v(mdp, &rewards, &v, gamma);
    let na = mdp.n_actions;
    let actions = (0..n)
        .map(|s| {
            if mdp.terminal[s] {
                0
            } else {
                argmax(&q[s * na..(s + 1) * na])
            }
        })
        .collect();
    Ok((Policy::new(actions), ValueTables::new(v, q, na)))
}

/// Per-state gap `Q(s, π⁺(s)) - max_{a≠π⁺(s)} Q(s, a)` for non-terminal states.
pub fn state_gaps(values: &ValueTables, mdp: &Mdp, pi_plus: &Policy) -> Vec<(usize, f64)> {
    mdp.decision_states()
        .map(|s| {
            let target = pi_plus.action(s);
            let row = values.q_row(s);
            let best_other = row
                .iter()
                .enumerate()
                .filter(|&(a, _)| a != target)
                .map(|(_, &q)| q)
                .fold(f64::NEG_INFINITY, f64::max);
            (s, row[target] - best_other)
        })
        .collect()
}

/// Minimum over non-terminal states of the target action's advantage over
/// the best alternative, under `Q^{π⁺}` at discount `gamma`.
pub fn action_gap(mdp: &Mdp, r: &RewardVector, pi_plus: &Policy, gamma: f64) -> Result<f64> {
    if mdp.n_actions < 2 {
        return Err(Error::SingleAction);
    }
    let values = evaluate_policy(mdp, r, pi_plus, gamma)?;
    state_gaps(&values, mdp, pi_plus)
        .into_iter()
        .map(|(_, g)| g)
        .reduce(f64::min)
        .ok_or(Error::NoDecisionStates)
}

/// `π⁺` is strictly optimal in every non-terminal state.
pub fn is_correct(mdp: &Mdp, r: &RewardVector, pi_plus: &Policy, gamma: f64) -> Result<bool> {
    Ok(action_gap(mdp, r, pi_plus, gamma)? > 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::environments::{chain, russell_norvig_grid, ChainVariant};

    fn two_state() -> Mdp {
        // s0 --right--> s1 (terminal); left self-loops.
        Mdp::new(
            2,
            2,
            vec![vec![(0, 1.0)], vec![(1, 1.0)], vec![], vec![]],
            vec![false, true],
            0,
            vec![vec![0.0, 1.0], vec![1.0, 0.0]],
            0.9,
        )
        .unwrap()
    }

    #[test]
    fn rejects_bad_rows() {
        let err = Mdp::new(
            1,
            1,
            vec![vec![(0, 0.5)]],
            vec![false],
            0,
            vec![vec![1.0]],
            0.5,
        )
        .unwrap_err();
        assert!(matches!(err, Error::NotStochastic { .. }));
        let err = Mdp::new(
            1,
            1,
            vec![vec![(0, 1.5), (0, -0.5)]],
            vec![false],
            0,
            vec![vec![1.0]],
            0.5,
        )
        .unwrap_err();
        assert!(matches!(err, Error::InvalidProbability { .. }));
        let err = Mdp::new(1, 1, vec![vec![(3, 1.0)]], vec![false], 0, vec![vec![1.0]], 0.5)
            .unwrap_err();
        assert!(matches!(err, Error::IndexOutOfRange { .. }));
        let err = Mdp::new(1, 1, vec![vec![(0, 1.0)]], vec![false], 0, vec![vec![1.0]], 1.0)
            .unwrap_err();
        assert!(matches!(err, Error::InvalidDiscount(_)));
    }

    #[test]
    fn reward_of_state_examples() {
        let (grid, _) = russell_norvig_grid();
        let r = RewardVector::new(vec![-0.04, 1.0, -1.0]).unwrap();
        let goal = crate::environments::RN_GOAL;
        assert_eq!(reward_of_state(&grid, &r, goal).unwrap(), 1.0);
        let zero = RewardVector::zeros(3);
        for s in 0..grid.n_states() {
            assert_eq!(reward_of_state(&grid, &zero, s).unwrap(), 0.0);
        }
        assert!(reward_of_state(&grid, &r, 11).is_err());

        let (sub, _) = chain(60, ChainVariant::Subgoals { spacing: 3, constant: true }).unwrap();
        let r = RewardVector::new(vec![-1.0, 1.0, -0.7]).unwrap();
        // s3 in 1-based numbering
        assert_eq!(reward_of_state(&sub, &r, 2).unwrap(), -0.7);
    }

    #[test]
    fn zero_discount_values_are_rewards() {
        let (grid, pi) = russell_norvig_grid();
        let r = RewardVector::new(vec![-0.04, 1.0, -1.0]).unwrap();
        let vt = evaluate_policy(&grid, &r, &pi, 0.0).unwrap();
        let rewards = grid.state_rewards(&r).unwrap();
        assert_eq!(vt.v, rewards);
    }

    #[test]
    fn terminal_value_is_reward() {
        let m = two_state();
        let r = RewardVector::new(vec![0.3, -0.2]).unwrap();
        let vt = evaluate_policy(&m, &r, &Policy::uniform(2, 1), 0.9).unwrap();
        assert_eq!(vt.v[1], 0.3);
        assert!((vt.v[0] - (-0.2 + 0.9 * 0.3)).abs() < 1e-15);
    }

    #[test]
    fn chain_leftmost_value_closed_form() {
        let (m, pi) = chain(60, ChainVariant::TwoFeature).unwrap();
        let r = RewardVector::new(vec![1.0, 0.0]).unwrap();
        let vt = evaluate_policy(&m, &r, &pi, 0.95).unwrap();
        assert!((vt.v[0] - 0.95f64.powi(59)).abs() < 1e-12);
        assert!((vt.v[0] - 0.048494525).abs() < 1e-8);
        assert!(bellman_residual(&m, &r, &pi, 0.95, &vt).unwrap() < 1e-10);
    }

    #[test]
    fn chain_value_matches_rollouts() {
        // deterministic chain: every rollout follows the same path, so the
        // Monte-Carlo estimate is a truncated discounted sum along it
        let (m, pi) = chain(60, ChainVariant::TwoFeature).unwrap();
        let r = RewardVector::new(vec![1.0, 0.0]).unwrap();
        let rewards = m.state_rewards(&r).unwrap();
        let mut s = 0;
        let mut ret = 0.0;
        let mut disc = 1.0;
        for _ in 0..10_000 {
            ret += disc * rewards[s];
            if m.is_terminal(s) {
                break;
            }
            disc *= 0.95;
            s = m.successors(s, pi.action(s))[0].0;
        }
        let vt = evaluate_policy(&m, &r, &pi, 0.95).unwrap();
        assert!((vt.v[0] - ret).abs() < 1e-12);
    }

    #[test]
    fn optimal_policy_examples() {
        let (m, _) = chain(60, ChainVariant::TwoFeature).unwrap();
        let combo = RewardVector::new(vec![1.0, -1.0]).unwrap();
        let (pi, vt) = optimal_policy(&m, &combo, 0.95).unwrap();
        assert!(m.decision_states().all(|s| pi.action(s) == 1));
        let exact = evaluate_policy(&m, &combo, &pi, 0.95).unwrap();
        for (a, b) in vt.v.iter().zip(&exact.v) {
            assert!((a - b).abs() < 1e-9);
        }
        let (pi, _) = optimal_policy(&m, &RewardVector::zeros(2), 0.95).unwrap();
        assert!(pi.actions().iter().all(|&a| a == 0));
    }

    #[test]
    fn chain_gap_presets() {
        let (m, pi) = chain(60, ChainVariant::TwoFeature).unwrap();
        let gap = |w: [f64; 2]| action_gap(&m, &RewardVector::new(w.to_vec()).unwrap(), &pi, 0.95).unwrap();
        assert!((gap([1.0, 0.0]) - 0.0024).abs() < 5e-5);
        assert!((gap([0.0, -1.0]) - 0.0485).abs() < 5e-5);
        assert!((gap([1.0, -1.0]) - 0.0509).abs() < 5e-5);
        let g = 0.95f64;
        assert!((gap([1.0, -1.0]) - g.powi(59) * (2.0 - g)).abs() < 1e-12);
    }

    #[test]
    fn correctness_examples() {
        let (grid, pi) = russell_norvig_grid();
        let r = RewardVector::new(vec![-0.04, 1.0, -1.0]).unwrap();
        assert!(is_correct(&grid, &r, &pi, 0.95).unwrap());
        assert!(!is_correct(&grid, &RewardVector::zeros(3), &pi, 0.95).unwrap());

        let (m, pi) = chain(60, ChainVariant::TwoFeature).unwrap();
        let bad = RewardVector::new(vec![-1.0, 0.0]).unwrap();
        assert!(!is_correct(&m, &bad, &pi, 0.95).unwrap());
        let (opt, _) = optimal_policy(&m, &bad, 0.95).unwrap();
        assert!(!opt.agrees_with(&pi, &m));
    }

    #[test]
    fn single_action_gap_is_error() {
        let m = Mdp::new(
            2,
            1,
            vec![vec![(1, 1.0)], vec![]],
            vec![false, true],
            0,
            vec![vec![1.0], vec![1.0]],
            0.9,
        )
        .unwrap();
        let r = RewardVector::new(vec![1.0]).unwrap();
        assert!(matches!(
            action_gap(&m, &r, &Policy::uniform(2, 0), 0.9),
            Err(Error::SingleAction)
        ));
    }

    #[test]
    fn reward_bounds() {
        assert!(RewardVector::new(vec![1.5]).is_err());
        assert!(RewardVector::new(vec![f64::NAN]).is_err());
        let r = RewardVector::unbounded(vec![0.5, -2.0]).unwrap();
        assert_eq!(r.out_of_bounds(), vec![1]);
    }
}
