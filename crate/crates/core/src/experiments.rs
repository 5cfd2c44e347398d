//! Named reward functions compared in the learning experiments.

use crate::environments::{chain, russell_norvig_grid, ChainVariant, EnvironmentSpec, OBJECTIVE_DISCOUNT};
use crate::error::Result;
use crate::mdp::{Mdp, Policy, RewardVector};
use crate::synthesis::{RewardDesigner, SynthesisResult, DEFAULT_FLOOR, DEFAULT_TOL};

/// Gap at γ targeted by the low-gap dense reward.
pub const LOW_GAP_EPSILON: f64 = 0.001;

/// Chain rewards in presentation order.
pub const CHAIN_SUITE: [&str; 7] = [
    "goal",
    "penalty",
    "combo",
    "subgoal-constant",
    "subgoal-profile",
    "dense-lp",
    "dense-low-gap",
];

#[derive(Debug, Clone)]
pub struct NamedReward {
    pub name: &'static str,
    pub mdp: Mdp,
    pub policy: Policy,
    pub reward: RewardVector,
    /// Minimum subjective discount found by the LP search, for synthesized rewards.
    pub synthesized_gamma_tilde: Option<f64>,
}

/// Largest reward allowed on a non-goal state of the dense chain.
pub const DENSE_MAX_INTERMEDIATE: f64 = -0.01;

/// Weight box for the dense chain: the goal in `[-1, 1]`, every other state
/// in `[-1, DENSE_MAX_INTERMEDIATE]`.
pub fn dense_sign_bounds(mdp: &Mdp) -> Vec<(f64, f64)> {
    (0..mdp.n_features())
        .map(|i| {
            let goal_feature = (0..mdp.n_states()).any(|s| mdp.is_terminal(s) && mdp.feature(s, i) != 0.0);
            if goal_feature {
                (-1.0, 1.0)
            } else {
                (-1.0, DENSE_MAX_INTERMEDIATE)
            }
        })
        .collect()
}

/// LP reward at the smallest subjective discount reaching a gap of 0.01.
pub fn min_discount_reward(mdp: &Mdp, pi: &Policy, bounds: Option<Vec<(f64, f64)>>) -> Result<SynthesisResult> {
    let mut designer = RewardDesigner::new(mdp, pi, mdp.discount())?;
    if let Some(b) = bounds {
        designer = designer.with_bounds(b)?;
    }
    Ok(designer.min_subjective_discount(DEFAULT_FLOOR, DEFAULT_TOL)?.0)
}

pub fn chain_reward(name: &str, n: usize) -> Result<NamedReward> {
    let preset = |variant, preset: &str| -> Result<(Mdp, Policy, RewardVector)> {
        let (m, pi) = chain(n, variant)?;
        let r = EnvironmentSpec::Chain { n, variant }.reward_preset(preset)?;
        Ok((m, pi, r))
    };
    let subgoals = |constant| ChainVariant::Subgoals { spacing: 3, constant };
    let (name, (mdp, policy, reward), gt) = match name {
        "goal" => ("goal", preset(ChainVariant::TwoFeature, "goal")?, None),
        "penalty" => ("penalty", preset(ChainVariant::TwoFeature, "penalty")?, None),
        "combo" => ("combo", preset(ChainVariant::TwoFeature, "combo")?, None),
        "subgoal-constant" => ("subgoal-constant", preset(subgoals(true), "subgoal-constant")?, None),
        "subgoal-profile" => {
            let (m, pi) = chain(n, subgoals(false))?;
            let res = min_discount_reward(&m, &pi, None)?;
            ("subgoal-profile", (m, pi, res.reward), Some(res.gamma_tilde))
        }
        "dense-lp" => {
            let (m, pi) = chain(n, ChainVariant::Dense)?;
            let res = min_discount_reward(&m, &pi, Some(dense_sign_bounds(&m)))?;
            ("dense-lp", (m, pi, res.reward), Some(res.gamma_tilde))
        }
        "dense-low-gap" => {
            let (m, pi) = chain(n, ChainVariant::Dense)?;
            let r = RewardDesigner::new(&m, &pi, OBJECTIVE_DISCOUNT)?.low_gap_reward(LOW_GAP_EPSILON)?;
            ("dense-low-gap", (m, pi, r), None)
        }
        other => {
            return Err(crate::error::Error::InvalidParameter(format!(
                "unknown chain reward '{other}' (available: {})",
                CHAIN_SUITE.join(", ")
            )))
        }
    };
    Ok(NamedReward {
        name,
        mdp,
        policy,
        reward,
        synthesized_gamma_tilde: gt,
    })
}

pub fn chain_suite(n: usize) -> Result<Vec<NamedReward>> {
    CHAIN_SUITE.iter().map(|name| chain_reward(name, n)).collect()
}

/// The grid's original reward and its LP reward at the minimal subjective discount.
pub fn grid_pair() -> Result<[NamedReward; 2]> {
    let (mdp, policy) = russell_norvig_grid();
    let lp = min_discount_reward(&mdp, &policy, None)?;
    let original = EnvironmentSpec::RnGrid { slip: 0.1 }.reward_preset("original")?;
    Ok([
        NamedReward {
            name: "original",
            mdp: mdp.clone(),
            policy: policy.clone(),
            reward: original,
            synthesized_gamma_tilde: None,
        },
        NamedReward {
            name: "lp",
            mdp,
            policy,
            reward: lp.reward,
            synthesized_gamma_tilde: Some(lp.gamma_tilde),
        },
    ])
}
