//! Reward design and analysis for tabular MDPs with linear state rewards.
//!
//! - [`mdp`]: MDPs, rewards, policies, value iteration and the action gap.
//! - [`features`]: discounted feature expectations under a target policy.
//! - [`synthesis`]: LP reward design at an objective and a subjective discount.
//! - [`discount`]: the subjective discount of a given reward.
//! - [`learning`]: Q-Learning scored by cumulative correct actions.
//! - [`environments`]: the 4x3 grid and the chain family.
//! - [`random_search`]: random per-state rewards and the learning-speed study.
//! - [`format`], [`csvio`]: text environment/reward files and CSV tables.

// Dense numeric kernels read best with explicit indices, and `!(x <= b)` is
// how NaN gets rejected alongside out-of-range values.
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod csvio;
pub mod discount;
pub mod environments;
pub mod error;
pub mod experiments;
pub mod features;
pub mod format;
pub mod learning;
pub mod linalg;
pub mod lp;
pub mod mdp;
pub mod random_search;
pub mod stats;
pub mod synthesis;

pub use discount::{subjective_discount, SubjectiveDiscountReport};
pub use environments::{chain, russell_norvig_grid, ChainVariant, EnvironmentSpec};
pub use error::{Error, Result};
pub use features::{compute_feature_expectations, FeatureExpectations, GapRows};
pub use format::{load_environment, load_reward, parse_environment, parse_reward};
pub use learning::{aggregate_runs, q_learning_run, AggregateCurve, QLearningConfig, RunTrace};
pub use lp::{solve_lp, LpProblem, LpSolution, LpStatus};
pub use mdp::{action_gap, evaluate_policy, is_correct, optimal_policy, Mdp, Policy, RewardVector, ValueTables};
pub use random_search::{sample_and_filter, study, SearchRecord};
pub use synthesis::{synthesize, RewardDesigner, SynthesisResult};
