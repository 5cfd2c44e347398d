//! Reward synthesis by linear programming.
//!
//! Variables are the reward weights `R(1..k)` and the gap `δ`. For every
//! non-terminal state `s`, non-target action `a`, and each of the two
//! discounts (objective `γ` and subjective `γ̃`):
//!
//! ```text
//! Σ_i (D_a(s, i) - D(s, i)) R(i) + δ <= 0
//! ```
//!
//! and the program maximizes `δ` with `R(i) ∈ [-1, 1]`.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::features::{compute_feature_expectations, GapRows};
use crate::lp::{Constraint, LpProblem, LpStatus};
use crate::mdp::{action_gap, check_discount, Mdp, Policy, RewardVector};

/// Box on `δ`; `|δ|` cannot exceed the value range implied by `|R| <= 1`.
pub const DELTA_BOX: f64 = 10.0;
pub const DEFAULT_FLOOR: f64 = 0.01;
pub const DEFAULT_TOL: f64 = 1e-4;
/// Default γ̃ grid spacing for sweeps.
pub const SWEEP_STEP: f64 = 0.05;
/// LP optima at or below this are treated as "no positive gap".
const ZERO_GAP: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct SynthesisResult {
    pub gamma_tilde: f64,
    pub reward: RewardVector,
    /// LP optimum δ*.
    pub delta: f64,
    /// Action gap of `reward` recomputed at γ.
    pub objective_gap: f64,
    /// Action gap of `reward` recomputed at γ̃.
    pub subjective_gap: f64,
}

/// Builds the two-discount program with the default `[-1, 1]` weight box.
pub fn build_lp(mdp: &Mdp, pi_plus: &Policy, gamma: f64, gamma_tilde: f64) -> Result<LpProblem> {
    RewardDesigner::new(mdp, pi_plus, gamma)?.lp(gamma_tilde)
}

pub fn synthesize(mdp: &Mdp, pi_plus: &Policy, gamma: f64, gamma_tilde: f64) -> Result<SynthesisResult> {
    RewardDesigner::new(mdp, pi_plus, gamma)?.synthesize(gamma_tilde)
}

/// Smallest γ̃ (to [`DEFAULT_TOL`]) whose program still reaches `δ* >= delta_floor`.
pub fn min_subjective_discount_synthesis(
    mdp: &Mdp,
    pi_plus: &Policy,
    gamma: f64,
    delta_floor: f64,
) -> Result<(SynthesisResult, f64)> {
    RewardDesigner::new(mdp, pi_plus, gamma)?.min_subjective_discount(delta_floor, DEFAULT_TOL)
}

pub fn gamma_tilde_sweep(
    mdp: &Mdp,
    pi_plus: &Policy,
    gamma: f64,
    grid: &[f64],
) -> Result<Vec<SweepPoint>> {
    Ok(RewardDesigner::new(mdp, pi_plus, gamma)?.sweep(grid))
}

pub fn low_gap_dense_reward(
    mdp: &Mdp,
    pi_plus: &Policy,
    gamma: f64,
    epsilon: f64,
) -> Result<RewardVector> {
    RewardDesigner::new(mdp, pi_plus, gamma)?.low_gap_reward(epsilon)
}

/// Evenly spaced grid `0, step, 2·step, ...` up to and including `gamma`
/// (when `gamma` is a multiple of `step`).
pub fn default_sweep_grid(gamma: f64, step: f64) -> Vec<f64> {
    let n = (gamma / step + 1e-9).floor() as usize;
    (0..=n).map(|i| (i as f64 * step).min(gamma)).collect()
}

#[derive(Debug, Clone)]
pub struct SweepPoint {
    pub gamma_tilde: f64,
    pub outcome: std::result::Result<SynthesisResult, String>,
}

/// Reward-design programs for one MDP, target policy and objective discount.
#[derive(Debug, Clone)]
pub struct RewardDesigner<'a> {
    mdp: &'a Mdp,
    pi_plus: &'a Policy,
    gamma: f64,
    bounds: Vec<(f64, f64)>,
    objective_rows: GapRows,
}

impl<'a> RewardDesigner<'a> {
    pub fn new(mdp: &'a Mdp, pi_plus: &'a Policy, gamma: f64) -> Result<Self> {
        check_discount(gamma)?;
        mdp.check_policy(pi_plus)?;
        let fe = compute_feature_expectations(mdp, pi_plus, gamma)?;
        Ok(RewardDesigner {
            mdp,
            pi_plus,
            gamma,
            bounds: vec![(-RewardVector::BOUND, RewardVector::BOUND); mdp.n_features()],
            objective_rows: GapRows::new(mdp, pi_plus, &fe),
        })
    }

    /// Restricts individual weights to sub-intervals of `[-1, 1]`.
    pub fn with_bounds(mut self, bounds: Vec<(f64, f64)>) -> Result<Self> {
        if bounds.len() != self.mdp.n_features() {
            return Err(Error::DimensionMismatch {
                what: "feature bounds",
                expected: self.mdp.n_features(),
                found: bounds.len(),
            });
        }
        for &(l, u) in &bounds {
            if !(l >= -RewardVector::BOUND && u <= RewardVector::BOUND && l <= u) {
                return Err(Error::InvalidParameter(format!(
                    "feature bound [{l}, {u}] not inside [-1, 1]"
                )));
            }
        }
        self.bounds = bounds;
        Ok(self)
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    fn rows_at(&self, discount: f64) -> Result<GapRows> {
        if discount == self.gamma {
            return Ok(self.objective_rows.clone());
        }
        let fe = compute_feature_expectations(self.mdp, self.pi_plus, discount)?;
        Ok(GapRows::new(self.mdp, self.pi_plus, &fe))
    }

    fn variable_names(&self) -> Vec<String> {
        (1..=self.mdp.n_features())
            .map(|i| format!("R{i}"))
            .chain(std::iter::once("delta".to_string()))
            .collect()
    }

    pub fn lp(&self, gamma_tilde: f64) -> Result<LpProblem> {
        check_discount(gamma_tilde)?;
        let k = self.mdp.n_features();
        let subjective = self.rows_at(gamma_tilde)?;
        let constraints = [&self.objective_rows, &subjective]
            .into_iter()
            .flat_map(|rows| rows.rows.iter())
            .map(|row| {
                let mut coeffs: Vec<f64> = row.coeffs.iter().map(|c| -c).collect();
                coeffs.push(1.0);
                Constraint { coeffs, bound: 0.0 }
            })
            .collect();
        let mut objective = vec![0.0; k + 1];
        objective[k] = 1.0;
        let mut bounds = self.bounds.clone();
        bounds.push((-DELTA_BOX, DELTA_BOX));
        Ok(LpProblem {
            objective,
            constraints,
            bounds,
            variable_names: self.variable_names(),
        })
    }

    /// Raw LP optimum `(reward, δ*)` at `gamma_tilde`.
    pub fn best_delta(&self, gamma_tilde: f64) -> Result<(RewardVector, f64)> {
        let lp = self.lp(gamma_tilde)?;
        let sol = lp.solve()?;
        if sol.status != LpStatus::Optimal {
            return Err(Error::LpStatus(sol.status));
        }
        let k = self.mdp.n_features();
        let reward = RewardVector::new(sol.x[..k].to_vec())?;
        Ok((reward, sol.x[k]))
    }

    fn result(&self, gamma_tilde: f64, reward: RewardVector, delta: f64) -> Result<SynthesisResult> {
        let objective_gap = action_gap(self.mdp, &reward, self.pi_plus, self.gamma)?;
        let subjective_gap = action_gap(self.mdp, &reward, self.pi_plus, gamma_tilde)?;
        Ok(SynthesisResult {
            gamma_tilde,
            reward,
            delta,
            objective_gap,
            subjective_gap,
        })
    }

    pub fn synthesize(&self, gamma_tilde: f64) -> Result<SynthesisResult> {
        let (reward, delta) = self.best_delta(gamma_tilde)?;
        if delta <= ZERO_GAP {
            return Err(Error::NoCorrectReward { delta });
        }
        self.result(gamma_tilde, reward, delta)
    }

    /// Binary search on γ̃ ∈ [0, γ]; each midpoint is re-solved from scratch.
    pub fn min_subjective_discount(&self, floor: f64, tol: f64) -> Result<(SynthesisResult, f64)> {
        if !(floor > 0.0) || !(tol > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "floor {floor} and tolerance {tol} must be positive"
            )));
        }
        let (reward, delta) = self.best_delta(self.gamma)?;
        if delta < floor {
            return Err(Error::FloorUnreachable { floor, best: delta });
        }
        let mut best = (self.gamma, reward, delta);
        let (r0, d0) = self.best_delta(0.0)?;
        if d0 >= floor {
            let res = self.result(0.0, r0, d0)?;
            return Ok((res, 0.0));
        }
        let (mut lo, mut hi) = (0.0, self.gamma);
        while hi - lo > tol {
            let mid = 0.5 * (lo + hi);
            let (r, d) = self.best_delta(mid)?;
            if d >= floor {
                hi = mid;
                best = (mid, r, d);
            } else {
                lo = mid;
            }
        }
        let (g, r, d) = best;
        Ok((self.result(g, r, d)?, g))
    }

    /// One synthesis per grid point; failures are recorded, not fatal.
    pub fn sweep(&self, grid: &[f64]) -> Vec<SweepPoint> {
        grid.par_iter()
            .map(|&g| {
                let outcome = if !(0.0..=self.gamma).contains(&g) {
                    Err(format!("gamma_tilde {g} outside [0, {}]", self.gamma))
                } else {
                    self.synthesize(g).map_err(|e| e.to_string())
                };
                SweepPoint {
                    gamma_tilde: g,
                    outcome,
                }
            })
            .collect()
    }

    /// A correct reward whose gap at γ equals `epsilon`: a feasible point of
    /// the program with `δ` fixed to `epsilon`, scaled down onto the gap.
    pub fn low_gap_reward(&self, epsilon: f64) -> Result<RewardVector> {
        if !(epsilon > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "epsilon {epsilon} must be strictly positive"
            )));
        }
        let k = self.mdp.n_features();
        let constraints = self
            .objective_rows
            .rows
            .iter()
            .map(|row| Constraint {
                coeffs: row.coeffs.iter().map(|c| -c).collect(),
                bound: -epsilon,
            })
            .collect();
        let lp = LpProblem {
            objective: vec![0.0; k],
            constraints,
            bounds: self.bounds.clone(),
            variable_names: self.variable_names()[..k].to_vec(),
        };
        let sol = lp.solve()?;
        if sol.status != LpStatus::Optimal {
            return Err(Error::LpStatus(sol.status));
        }
        let gap = self.objective_rows.min_gap(&sol.x);
        let scale = epsilon / gap;
        let scaled: Vec<f64> = sol.x.iter().map(|w| w * scale).collect();
        let inside = scaled
            .iter()
            .zip(&self.bounds)
            .all(|(w, &(l, u))| (l..=u).contains(w));
        RewardVector::new(if inside { scaled } else { sol.x })
    }
}
