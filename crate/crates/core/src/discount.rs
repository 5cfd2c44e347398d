//! Subjective discount of a reward: the smallest discount at which the
//! target policy keeps an action gap of at least a threshold.
//!
//! The search bisects on `[0, γ]`, then audits an evenly spaced grid over
//! `[γ̃, γ]`. A failing audit point raises the lower end of the search to
//! that point and bisection resumes. Rewards that are correct at `γ` but
//! only reach the threshold at a larger discount get the first crossing
//! above `γ` (flagged by [`SubjectiveDiscountReport::above_objective`]).

use crate::error::{Error, Result};
use crate::mdp::{action_gap, check_discount, Mdp, Policy, RewardVector};

pub const DEFAULT_THRESHOLD: f64 = 0.01;
pub const DEFAULT_TOL: f64 = 1e-4;
pub const AUDIT_POINTS: usize = 11;
/// Resolution and upper limit of the scan above the objective discount.
pub const UPWARD_STEP: f64 = 1e-3;
pub const UPWARD_LIMIT: f64 = 0.999;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuditPoint {
    pub gamma: f64,
    pub correct: bool,
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubjectiveDiscountReport {
    /// `None` when the threshold is never reached.
    pub gamma_tilde: Option<f64>,
    pub gap_at_gamma_tilde: Option<f64>,
    pub objective_gap: f64,
    pub threshold: f64,
    pub above_objective: bool,
    pub checked_points: Vec<AuditPoint>,
}

impl SubjectiveDiscountReport {
    pub fn is_defined(&self) -> bool {
        self.gamma_tilde.is_some()
    }
}

struct Probe<'a> {
    mdp: &'a Mdp,
    r: &'a RewardVector,
    pi: &'a Policy,
    threshold: f64,
    log: Vec<AuditPoint>,
}

impl Probe<'_> {
    fn gap(&mut self, gamma: f64) -> Result<f64> {
        let gap = action_gap(self.mdp, self.r, self.pi, gamma)?;
        self.log.push(AuditPoint {
            gamma,
            correct: gap > 0.0,
            gap,
        });
        Ok(gap)
    }

    fn passes(&mut self, gamma: f64) -> Result<bool> {
        Ok(self.gap(gamma)? >= self.threshold)
    }

    /// Smallest passing point in `(lo, hi]`, given `lo` fails and `hi` passes.
    fn bisect(&mut self, mut lo: f64, mut hi: f64, tol: f64) -> Result<f64> {
        while hi - lo > tol {
            let mid = 0.5 * (lo + hi);
            if self.passes(mid)? {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(hi)
    }
}

pub fn subjective_discount(
    mdp: &Mdp,
    r: &RewardVector,
    pi_plus: &Policy,
    gamma: f64,
    delta_threshold: f64,
    tol: f64,
) -> Result<SubjectiveDiscountReport> {
    check_discount(gamma)?;
    if !(delta_threshold > 0.0 && delta_threshold.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "threshold {delta_threshold} must be positive"
        )));
    }
    if !(tol > 0.0 && tol < 1.0) {
        return Err(Error::InvalidParameter(format!("tolerance {tol} outside (0, 1)")));
    }
    let mut probe = Probe {
        mdp,
        r,
        pi: pi_plus,
        threshold: delta_threshold,
        log: Vec::new(),
    };
    let objective_gap = probe.gap(gamma)?;
    let undefined = |probe: Probe| SubjectiveDiscountReport {
        gamma_tilde: None,
        gap_at_gamma_tilde: None,
        objective_gap,
        threshold: delta_threshold,
        above_objective: false,
        checked_points: probe.log,
    };

    if objective_gap <= 0.0 {
        return Ok(undefined(probe));
    }

    if objective_gap < delta_threshold {
        // Scan upward for the first discount that reaches the threshold.
        let mut prev = gamma;
        let mut found = None;
        let mut g = gamma;
        while g < UPWARD_LIMIT {
            g = (g + UPWARD_STEP).min(UPWARD_LIMIT);
            if probe.passes(g)? {
                found = Some(g);
                break;
            }
            prev = g;
        }
        let Some(hit) = found else {
            return Ok(undefined(probe));
        };
        let gt = probe.bisect(prev, hit, tol)?;
        let gap = action_gap(mdp, r, pi_plus, gt)?;
        return Ok(SubjectiveDiscountReport {
            gamma_tilde: Some(gt),
            gap_at_gamma_tilde: Some(gap),
            objective_gap,
            threshold: delta_threshold,
            above_objective: true,
            checked_points: probe.log,
        });
    }

    let mut lo = 0.0;
    if probe.passes(0.0)? {
        lo = -1.0; // zero itself passes; audit decides
    }
    let mut candidate = if lo < 0.0 { 0.0 } else { probe.bisect(lo, gamma, tol)? };
    loop {
        let mut failing = None;
        for k in 0..AUDIT_POINTS {
            let g = candidate + (gamma - candidate) * k as f64 / (AUDIT_POINTS - 1) as f64;
            if !probe.passes(g)? {
                failing = Some(g);
            }
        }
        match failing {
            None => break,
            Some(f) => {
                // f < gamma because gamma passes
                candidate = probe.bisect(f, gamma, tol)?;
            }
        }
    }
    let gap = action_gap(mdp, r, pi_plus, candidate)?;
    Ok(SubjectiveDiscountReport {
        gamma_tilde: Some(candidate),
        gap_at_gamma_tilde: Some(gap),
        objective_gap,
        threshold: delta_threshold,
        above_objective: false,
        checked_points: probe.log,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::environments::{chain, ChainVariant};

    fn chain_report(w: [f64; 2], threshold: f64) -> SubjectiveDiscountReport {
        let (m, pi) = chain(60, ChainVariant::TwoFeature).unwrap();
        let r = RewardVector::new(w.to_vec()).unwrap();
        subjective_discount(&m, &r, &pi, 0.95, threshold, DEFAULT_TOL).unwrap()
    }

    #[test]
    fn action_penalty_matches_closed_form() {
        let rep = chain_report([0.0, -1.0], 0.01);
        let oracle = 0.01f64.powf(1.0 / 59.0);
        let gt = rep.gamma_tilde.unwrap();
        assert!((gt - oracle).abs() < 2e-4, "{gt} vs {oracle}");
        assert!((gt - 0.9249).abs() < 1e-3);
        assert!(!rep.above_objective);
        assert!(rep.gap_at_gamma_tilde.unwrap() >= 0.01 - 1e-6);
    }

    #[test]
    fn combo_value() {
        let gt = chain_report([1.0, -1.0], 0.01).gamma_tilde.unwrap();
        assert!((gt - 0.9238).abs() < 1e-3);
    }

    #[test]
    fn goal_reward_is_undefined() {
        let rep = chain_report([1.0, 0.0], 0.01);
        assert!(rep.gamma_tilde.is_none());
        assert!((rep.objective_gap - 0.0024).abs() < 5e-5);
    }

    #[test]
    fn incorrect_reward_is_undefined() {
        let rep = chain_report([-1.0, 0.0], 0.01);
        assert!(rep.gamma_tilde.is_none());
    }

    #[test]
    fn unreachable_threshold_is_undefined() {
        assert!(chain_report([1.0, -1.0], 1.5).gamma_tilde.is_none());
    }

    #[test]
    fn constant_subgoal_crosses_above_objective() {
        let (m, pi) = chain(60, ChainVariant::Subgoals { spacing: 3, constant: true }).unwrap();
        let r = RewardVector::new(vec![-1.0, 1.0, -0.7]).unwrap();
        let rep = subjective_discount(&m, &r, &pi, 0.95, 0.01, DEFAULT_TOL).unwrap();
        assert!(rep.above_objective);
        let gt = rep.gamma_tilde.unwrap();
        assert!((gt - 0.9510).abs() < 1e-3, "{gt}");
    }

    #[test]
    fn smaller_threshold_never_raises() {
        let mut last = f64::INFINITY;
        for thr in [0.04, 0.02, 0.01, 0.005, 0.001] {
            let gt = chain_report([0.0, -1.0], thr).gamma_tilde.unwrap();
            assert!(gt <= last + 1e-12);
            last = gt;
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        let (m, pi) = chain(5, ChainVariant::TwoFeature).unwrap();
        let r = RewardVector::new(vec![1.0, -1.0]).unwrap();
        assert!(subjective_discount(&m, &r, &pi, 0.95, 0.0, 1e-4).is_err());
        assert!(subjective_discount(&m, &r, &pi, 0.95, 0.01, 0.0).is_err());
        assert!(subjective_discount(&m, &r, &pi, 1.0, 0.01, 1e-4).is_err());
    }
}
