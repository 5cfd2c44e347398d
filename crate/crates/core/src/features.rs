//! Discounted feature expectations of the target policy.
//!
//! `D(s, i) = F(s, i) + γ Σ_{s'} T(s, π⁺(s), s') D(s', i)` and
//! `D_a(s, i) = F(s, i) + γ Σ_{s'} T(s, a, s') D(s', i)`, with `D = D_a = F`
//! at terminal states. Values of `π⁺` are linear in the reward weights:
//! `V(s) = Σ_i D(s, i) R(i)`, `Q(s, a) = Σ_i D_a(s, i) R(i)`.

use crate::error::{Error, Result};
use crate::linalg::Lu;
use crate::mdp::{check_discount, dot, policy_matrix, Mdp, Policy, RewardVector, ValueTables};

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureExpectations {
    pub discount: f64,
    n_states: usize,
    n_actions: usize,
    n_features: usize,
    d: Vec<f64>,
    d_action: Vec<f64>,
}

impl FeatureExpectations {
    pub fn n_states(&self) -> usize {
        self.n_states
    }

    pub fn n_actions(&self) -> usize {
        self.n_actions
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn d(&self, s: usize, i: usize) -> f64 {
        self.d[s * self.n_features + i]
    }

    pub fn d_row(&self, s: usize) -> &[f64] {
        &self.d[s * self.n_features..(s + 1) * self.n_features]
    }

    pub fn d_action(&self, s: usize, a: usize, i: usize) -> f64 {
        self.d_action[(s * self.n_actions + a) * self.n_features + i]
    }

    pub fn d_action_row(&self, s: usize, a: usize) -> &[f64] {
        let k = self.n_features;
        let base = (s * self.n_actions + a) * k;
        &self.d_action[base..base + k]
    }
}

pub fn compute_feature_expectations(
    mdp: &Mdp,
    pi_plus: &Policy,
    discount: f64,
) -> Result<FeatureExpectations> {
    check_discount(discount)?;
    mdp.check_policy(pi_plus)?;
    let n = mdp.n_states();
    let na = mdp.n_actions();
    let k = mdp.n_features();

    let a = policy_matrix(mdp, pi_plus, discount);
    let lu = Lu::factor(n, a.clone())?;
    let mut d = vec![0.0; n * k];
    for i in 0..k {
        let rhs: Vec<f64> = (0..n).map(|s| mdp.feature(s, i)).collect();
        let mut col = lu.solve(&rhs);
        // one refinement step keeps the residual near machine precision
        let resid: Vec<f64> = (0..n)
            .map(|r| rhs[r] - (0..n).map(|c| a[r * n + c] * col[c]).sum::<f64>())
            .collect();
        for (x, dx) in col.iter_mut().zip(lu.solve(&resid)) {
            *x += dx;
        }
        for s in 0..n {
            d[s * k + i] = if mdp.is_terminal(s) { mdp.feature(s, i) } else { col[s] };
        }
    }

    let mut d_action = vec![0.0; n * na * k];
    for s in 0..n {
        for act in 0..na {
            let out = &mut d_action[(s * na + act) * k..(s * na + act + 1) * k];
            out.copy_from_slice(mdp.feature_row(s));
            if mdp.is_terminal(s) {
                continue;
            }
            for &(next, p) in mdp.successors(s, act) {
                for i in 0..k {
                    out[i] += discount * p * d[next * k + i];
                }
            }
        }
    }
    Ok(FeatureExpectations {
        discount,
        n_states: n,
        n_actions: na,
        n_features: k,
        d,
        d_action,
    })
}

/// `V` and `Q` of the target policy for reward `r`.
pub fn value_from_expectations(fe: &FeatureExpectations, r: &RewardVector) -> Result<ValueTables> {
    if r.len() != fe.n_features {
        return Err(Error::DimensionMismatch {
            what: "reward weights",
            expected: fe.n_features,
            found: r.len(),
        });
    }
    let w = r.weights();
    let v = (0..fe.n_states).map(|s| dot(fe.d_row(s), w)).collect();
    let q = (0..fe.n_states)
        .flat_map(|s| (0..fe.n_actions).map(move |a| (s, a)))
        .map(|(s, a)| dot(fe.d_action_row(s, a), w))
        .collect();
    Ok(ValueTables::new(v, q, fe.n_actions))
}

/// One row per non-terminal state and non-target action:
/// coefficients `D(s, ·) - D_a(s, ·)`, so the action advantage of the
/// target action over `a` is `row · R`.
#[derive(Debug, Clone)]
pub struct GapRows {
    pub n_features: usize,
    pub rows: Vec<GapRow>,
}

#[derive(Debug, Clone)]
pub struct GapRow {
    pub state: usize,
    pub action: usize,
    pub coeffs: Vec<f64>,
}

impl GapRows {
    pub fn new(mdp: &Mdp, pi_plus: &Policy, fe: &FeatureExpectations) -> Self {
        let mut rows = Vec::new();
        for s in mdp.decision_states() {
            let target = pi_plus.action(s);
            for a in (0..mdp.n_actions()).filter(|&a| a != target) {
                let coeffs = fe
                    .d_row(s)
                    .iter()
                    .zip(fe.d_action_row(s, a))
                    .map(|(d, da)| d - da)
                    .collect();
                rows.push(GapRow {
                    state: s,
                    action: a,
                    coeffs,
                });
            }
        }
        GapRows {
            n_features: fe.n_features,
            rows,
        }
    }

    /// Minimum advantage over all rows, i.e. the action gap.
    pub fn min_gap(&self, weights: &[f64]) -> f64 {
        self.rows
            .iter()
            .map(|row| dot(&row.coeffs, weights))
            .fold(f64::INFINITY, f64::min)
    }
}
