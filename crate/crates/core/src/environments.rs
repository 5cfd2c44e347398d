//! Benchmark MDPs: the Russell/Norvig 4x3 grid and the 60-state chain family.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::mdp::{optimal_policy, Mdp, Policy, RewardVector};

pub const OBJECTIVE_DISCOUNT: f64 = 0.95;

// Russell/Norvig grid. Cells are (column, row), 1-based, row 1 at the bottom.
// States are numbered row by row from the bottom, skipping the wall at (2, 2):
//
//   row 3:  7  8  9 10(goal)
//   row 2:  4  #  5  6(lava)
//   row 1:  0  1  2  3
pub const RN_START: usize = 0;
pub const RN_GOAL: usize = 10;
pub const RN_LAVA: usize = 6;
pub const RN_WALL: (i32, i32) = (2, 2);

pub const UP: usize = 0;
pub const DOWN: usize = 1;
pub const LEFT: usize = 2;
pub const RIGHT: usize = 3;

/// Step, goal and lava weights of the classic grid reward.
pub const RN_ORIGINAL_REWARD: [f64; 3] = [-0.04, 1.0, -1.0];

fn rn_cells() -> Vec<(i32, i32)> {
    (1..=3)
        .flat_map(|row| (1..=4).map(move |col| (col, row)))
        .filter(|&c| c != RN_WALL)
        .collect()
}

/// Cell `(column, row)` of each grid state.
pub fn rn_cell(s: usize) -> (i32, i32) {
    rn_cells()[s]
}

/// The 4x3 grid with 0.8 intended / 0.1 per orthogonal slip.
pub fn russell_norvig_grid() -> (Mdp, Policy) {
    russell_norvig_grid_with(0.1, OBJECTIVE_DISCOUNT).expect("built-in grid is valid")
}

/// Grid with configurable per-side slip probability and discount.
pub fn russell_norvig_grid_with(slip: f64, discount: f64) -> Result<(Mdp, Policy)> {
    if !(0.0..=0.5).contains(&slip) {
        return Err(Error::InvalidParameter(format!("slip {slip} outside [0, 0.5]")));
    }
    let cells = rn_cells();
    let index = |c: (i32, i32)| cells.iter().position(|&x| x == c);
    let moves = [(0, 1), (0, -1), (-1, 0), (1, 0)];
    let orthogonal = [[LEFT, RIGHT], [LEFT, RIGHT], [UP, DOWN], [UP, DOWN]];
    let n = cells.len();
    let mut terminal = vec![false; n];
    terminal[RN_GOAL] = true;
    terminal[RN_LAVA] = true;

    let step = |s: usize, m: usize| {
        let (c, r) = cells[s];
        let to = (c + moves[m].0, r + moves[m].1);
        index(to).unwrap_or(s)
    };
    let mut transitions = Vec::with_capacity(n * 4);
    for s in 0..n {
        for a in 0..4 {
            if terminal[s] {
                transitions.push(Vec::new());
                continue;
            }
            let mut row: Vec<(usize, f64)> = Vec::new();
            let mut add = |next: usize, p: f64| {
                match row.iter_mut().find(|(t, _)| *t == next) {
                    Some(e) => e.1 += p,
                    None => row.push((next, p)),
                }
            };
            add(step(s, a), 1.0 - 2.0 * slip);
            for &o in &orthogonal[a] {
                add(step(s, o), slip);
            }
            row.sort_by_key(|&(t, _)| t);
            transitions.push(row);
        }
    }
    let features = (0..n)
        .map(|s| match s {
            RN_GOAL => vec![0.0, 1.0, 0.0],
            RN_LAVA => vec![0.0, 0.0, 1.0],
            _ => vec![1.0, 0.0, 0.0],
        })
        .collect();
    let mdp = Mdp::new(n, 4, transitions, terminal, RN_START, features, discount)?;
    let r = RewardVector::new(RN_ORIGINAL_REWARD.to_vec())?;
    let (pi, _) = optimal_policy(&mdp, &r, discount)?;
    Ok((mdp, pi))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChainVariant {
    /// Features (goal indicator, non-goal step indicator).
    TwoFeature,
    /// Subgoal states every `spacing` states before the goal. Features:
    /// step indicator, goal indicator, then one shared subgoal feature
    /// (`constant`) or one feature per subgoal.
    Subgoals { spacing: usize, constant: bool },
    /// One indicator feature per state.
    Dense,
}

pub const LEFT_MOVE: usize = 0;
pub const RIGHT_MOVE: usize = 1;

/// Subgoal states (0-based) for a chain of length `n`: 1-based states
/// `k, 2k, ...` strictly before the goal.
pub fn subgoal_states(n: usize, spacing: usize) -> Vec<usize> {
    (1..)
        .map(|m| m * spacing)
        .take_while(|&one_based| one_based < n)
        .map(|one_based| one_based - 1)
        .collect()
}

/// Deterministic left/right chain; start at the left end, terminal goal at
/// the right end, left at the left wall self-loops. Target policy: right.
pub fn chain(n: usize, variant: ChainVariant) -> Result<(Mdp, Policy)> {
    chain_with_discount(n, variant, OBJECTIVE_DISCOUNT)
}

pub fn chain_with_discount(n: usize, variant: ChainVariant, discount: f64) -> Result<(Mdp, Policy)> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("chain length {n} < 2")));
    }
    let goal = n - 1;
    let mut transitions = Vec::with_capacity(n * 2);
    let mut terminal = vec![false; n];
    terminal[goal] = true;
    for s in 0..n {
        if s == goal {
            transitions.push(Vec::new());
            transitions.push(Vec::new());
        } else {
            transitions.push(vec![(s.saturating_sub(1), 1.0)]);
            transitions.push(vec![(s + 1, 1.0)]);
        }
    }
    let features: Vec<Vec<f64>> = match variant {
        ChainVariant::TwoFeature => (0..n)
            .map(|s| if s == goal { vec![1.0, 0.0] } else { vec![0.0, 1.0] })
            .collect(),
        ChainVariant::Subgoals { spacing, constant } => {
            if spacing < 2 || spacing >= n {
                return Err(Error::InvalidParameter(format!(
                    "subgoal spacing {spacing} invalid for chain of length {n}"
                )));
            }
            let subgoals = subgoal_states(n, spacing);
            let k = if constant { 3 } else { 2 + subgoals.len() };
            (0..n)
                .map(|s| {
                    let mut row = vec![0.0; k];
                    if s == goal {
                        row[1] = 1.0;
                    } else if let Some(j) = subgoals.iter().position(|&g| g == s) {
                        row[if constant { 2 } else { 2 + j }] = 1.0;
                    } else {
                        row[0] = 1.0;
                    }
                    row
                })
                .collect()
        }
        ChainVariant::Dense => (0..n)
            .map(|s| {
                let mut row = vec![0.0; n];
                row[s] = 1.0;
                row
            })
            .collect(),
    };
    let mdp = Mdp::new(n, 2, transitions, terminal, 0, features, discount)?;
    Ok((mdp, Policy::uniform(n, RIGHT_MOVE)))
}

/// Named environment, parsable from strings such as `rn_grid`, `chain60`,
/// `chain60_subgoals`, `chain60_subgoals_constant` and `chain60_dense`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EnvironmentSpec {
    RnGrid { slip: f64 },
    Chain { n: usize, variant: ChainVariant },
}

impl EnvironmentSpec {
    pub fn build(&self) -> Result<(Mdp, Policy)> {
        match *self {
            EnvironmentSpec::RnGrid { slip } => russell_norvig_grid_with(slip, OBJECTIVE_DISCOUNT),
            EnvironmentSpec::Chain { n, variant } => chain(n, variant),
        }
    }

    /// Named reward presets valid for this environment.
    pub fn reward_presets(&self) -> &'static [&'static str] {
        match self {
            EnvironmentSpec::RnGrid { .. } => &["original", "published-lp"],
            EnvironmentSpec::Chain { variant: ChainVariant::TwoFeature, .. } => {
                &["goal", "penalty", "combo"]
            }
            EnvironmentSpec::Chain {
                variant: ChainVariant::Subgoals { constant: true, .. },
                ..
            } => &["subgoal-constant"],
            _ => &[],
        }
    }

    pub fn reward_preset(&self, name: &str) -> Result<RewardVector> {
        let weights: Vec<f64> = match (self, name) {
            (EnvironmentSpec::RnGrid { .. }, "original") => RN_ORIGINAL_REWARD.to_vec(),
            (EnvironmentSpec::RnGrid { .. }, "published-lp") => vec![-0.0223, 0.6119, -1.0],
            (EnvironmentSpec::Chain { variant: ChainVariant::TwoFeature, .. }, p) => match p {
                "goal" => vec![1.0, 0.0],
                "penalty" => vec![0.0, -1.0],
                "combo" => vec![1.0, -1.0],
                _ => return Err(unknown_preset(self, name)),
            },
            (
                EnvironmentSpec::Chain {
                    variant: ChainVariant::Subgoals { constant: true, .. },
                    ..
                },
                "subgoal-constant",
            ) => vec![-1.0, 1.0, -0.7],
            _ => return Err(unknown_preset(self, name)),
        };
        RewardVector::new(weights)
    }
}

fn unknown_preset(env: &EnvironmentSpec, name: &str) -> Error {
    Error::InvalidParameter(format!(
        "unknown reward preset '{name}' for {env} (available: {})",
        env.reward_presets().join(", ")
    ))
}

impl fmt::Display for EnvironmentSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EnvironmentSpec::RnGrid { .. } => write!(f, "rn_grid"),
            EnvironmentSpec::Chain { n, variant } => {
                write!(f, "chain{n}")?;
                match variant {
                    ChainVariant::TwoFeature => Ok(()),
                    ChainVariant::Subgoals { spacing, constant } => {
                        write!(f, "_subgoals")?;
                        if *spacing != 3 {
                            write!(f, "{spacing}")?;
                        }
                        if *constant {
                            write!(f, "_constant")?;
                        }
                        Ok(())
                    }
                    ChainVariant::Dense => write!(f, "_dense"),
                }
            }
        }
    }
}

impl FromStr for EnvironmentSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "rn_grid" {
            return Ok(EnvironmentSpec::RnGrid { slip: 0.1 });
        }
        let bad = || Error::InvalidParameter(format!("unknown environment '{s}'"));
        let rest = s.strip_prefix("chain").ok_or_else(bad)?;
        let digits = rest.chars().take_while(char::is_ascii_digit).count();
        let n = if digits == 0 {
            60
        } else {
            rest[..digits].parse().map_err(|_| bad())?
        };
        let variant = match &rest[digits..] {
            "" => ChainVariant::TwoFeature,
            "_dense" => ChainVariant::Dense,
            tail => {
                let tail = tail.strip_prefix("_subgoals").ok_or_else(bad)?;
                let (tail, constant) = match tail.strip_suffix("_constant") {
                    Some(t) => (t, true),
                    None => (tail, false),
                };
                let spacing = if tail.is_empty() {
                    3
                } else {
                    tail.parse().map_err(|_| bad())?
                };
                ChainVariant::Subgoals { spacing, constant }
            }
        };
        if n < 2 {
            return Err(bad());
        }
        Ok(EnvironmentSpec::Chain { n, variant })
    }
}
