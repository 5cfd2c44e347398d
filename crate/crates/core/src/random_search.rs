//! Random per-state rewards: sampling, correctness filtering and the
//! subjective-discount vs. learning-speed study.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::discount::{subjective_discount, DEFAULT_THRESHOLD, DEFAULT_TOL};
use crate::error::{Error, Result};
use crate::features::{compute_feature_expectations, GapRows};
use crate::learning::{aggregate_runs, QLearningConfig};
use crate::mdp::{Mdp, Policy, RewardVector};
use crate::stats::{linear_regression, proportion, Regression};

/// Samples per generator stream; stream `c` covers samples `[c * CHUNK, (c + 1) * CHUNK)`.
const CHUNK: usize = 4096;

#[derive(Debug, Clone, PartialEq)]
pub struct SamplingConfig {
    pub n_samples: usize,
    pub seed: u64,
    /// States whose reward is held fixed instead of sampled.
    pub pinned: Vec<(usize, f64)>,
}

impl SamplingConfig {
    pub fn new(n_samples: usize, seed: u64) -> Self {
        SamplingConfig {
            n_samples,
            seed,
            pinned: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchRecord {
    pub sample_index: usize,
    /// Weights over one indicator feature per state.
    pub reward: RewardVector,
    pub correct: bool,
    pub subjective_discount: Option<f64>,
    pub cumulative_correct: Option<f64>,
}

/// Correct samples only, plus the number drawn.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchOutcome {
    pub n_samples: usize,
    pub records: Vec<SearchRecord>,
}

impl SearchOutcome {
    /// Fraction of correct samples and its standard error.
    pub fn fraction_correct(&self) -> (f64, f64) {
        proportion(self.records.len(), self.n_samples)
    }
}

fn is_state_indicator(mdp: &Mdp) -> bool {
    mdp.n_features() == mdp.n_states()
        && (0..mdp.n_states()).all(|s| {
            mdp.feature_row(s)
                .iter()
                .enumerate()
                .all(|(i, &v)| v == if i == s { 1.0 } else { 0.0 })
        })
}

/// `mdp` itself if it already has per-state indicator features.
pub fn per_state_mdp(mdp: &Mdp) -> Mdp {
    if is_state_indicator(mdp) {
        mdp.clone()
    } else {
        mdp.with_state_features()
    }
}

fn draw(rng: &mut ChaCha8Rng, n: usize, pinned: &[(usize, f64)]) -> Vec<f64> {
    let mut w: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..=1.0)).collect();
    for &(s, v) in pinned {
        w[s] = v;
    }
    w
}

pub fn sample_and_filter(mdp: &Mdp, pi_plus: &Policy, n_samples: usize, seed: u64) -> Result<SearchOutcome> {
    sample_and_filter_with(mdp, pi_plus, &SamplingConfig::new(n_samples, seed))
}

/// Uniform `[-1, 1]` reward per state, kept when the target policy is
/// strictly optimal at the MDP's discount.
pub fn sample_and_filter_with(mdp: &Mdp, pi_plus: &Policy, cfg: &SamplingConfig) -> Result<SearchOutcome> {
    let mdp = per_state_mdp(mdp);
    let n = mdp.n_states();
    for &(s, v) in &cfg.pinned {
        if s >= n {
            return Err(Error::IndexOutOfRange {
                what: "pinned state",
                index: s,
                len: n,
            });
        }
        if !(v.abs() <= 1.0) {
            return Err(Error::InvalidParameter(format!("pinned reward {v} outside [-1, 1]")));
        }
    }
    let fe = compute_feature_expectations(&mdp, pi_plus, mdp.discount())?;
    let rows = GapRows::new(&mdp, pi_plus, &fe);
    let chunks = cfg.n_samples.div_ceil(CHUNK);
    let per_chunk: Vec<Vec<SearchRecord>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(c as u64);
            let lo = c * CHUNK;
            let hi = (lo + CHUNK).min(cfg.n_samples);
            let mut hits = Vec::new();
            for idx in lo..hi {
                let w = draw(&mut rng, n, &cfg.pinned);
                if rows.min_gap(&w) > 0.0 {
                    hits.push(SearchRecord {
                        sample_index: idx,
                        reward: RewardVector::new(w).expect("sampled inside [-1, 1]"),
                        correct: true,
                        subjective_discount: None,
                        cumulative_correct: None,
                    });
                }
            }
            hits
        })
        .collect();
    Ok(SearchOutcome {
        n_samples: cfg.n_samples,
        records: per_chunk.into_iter().flatten().collect(),
    })
}

/// Reward of sample `index`, regenerated from the seed.
pub fn regenerate(mdp: &Mdp, cfg: &SamplingConfig, index: usize) -> RewardVector {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream((index / CHUNK) as u64);
    let n = mdp.n_states();
    let mut w = Vec::new();
    for _ in 0..=index % CHUNK {
        w = draw(&mut rng, n, &cfg.pinned);
    }
    RewardVector::new(w).expect("sampled inside [-1, 1]")
}

#[derive(Debug, Clone, PartialEq)]
pub struct StudyTable {
    pub records: Vec<SearchRecord>,
    /// Score on subjective discount over records with a defined discount;
    /// `None` with fewer than three such records.
    pub regression: Option<Regression>,
}

impl StudyTable {
    pub fn scatter(&self) -> Vec<(f64, f64)> {
        self.records
            .iter()
            .filter_map(|r| Some((r.subjective_discount?, r.cumulative_correct?)))
            .collect()
    }
}

/// Subjective discount (threshold 0.01) and mean final cumulative correct
/// actions over `n_runs` Q-Learning runs for every correct record.
pub fn study(
    records: &[SearchRecord],
    mdp: &Mdp,
    pi_plus: &Policy,
    gamma: f64,
    cfg: &QLearningConfig,
    n_runs: usize,
) -> Result<StudyTable> {
    let mdp = per_state_mdp(mdp);
    let scored: Vec<SearchRecord> = records
        .par_iter()
        .filter(|r| r.correct)
        .map(|rec| {
            let report = subjective_discount(&mdp, &rec.reward, pi_plus, gamma, DEFAULT_THRESHOLD, DEFAULT_TOL)?;
            let curve = aggregate_runs(&mdp, &rec.reward, pi_plus, gamma, cfg, n_runs)?;
            Ok(SearchRecord {
                subjective_discount: report.gamma_tilde,
                cumulative_correct: Some(curve.final_mean()),
                ..rec.clone()
            })
        })
        .collect::<Result<_>>()?;
    let (x, y): (Vec<f64>, Vec<f64>) = scored
        .iter()
        .filter_map(|r| Some((r.subjective_discount?, r.cumulative_correct?)))
        .unzip();
    Ok(StudyTable {
        regression: linear_regression(&x, &y),
        records: scored,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::environments::{chain, russell_norvig_grid, ChainVariant, RN_GOAL, RN_LAVA};
    use crate::mdp::is_correct;

    #[test]
    fn empty_sample() {
        let (m, pi) = russell_norvig_grid();
        let out = sample_and_filter(&m, &pi, 0, 1).unwrap();
        assert!(out.records.is_empty());
        assert_eq!(out.fraction_correct(), (0.0, 0.0));
    }

    #[test]
    fn constant_rewards_are_incorrect() {
        let (m, pi) = russell_norvig_grid();
        let m = m.with_state_features();
        for c in [-0.5, 0.0, 0.5] {
            let r = RewardVector::new(vec![c; m.n_states()]).unwrap();
            assert!(!is_correct(&m, &r, &pi, 0.95).unwrap());
        }
    }

    #[test]
    fn deterministic_and_reauditable() {
        let (m, pi) = chain(6, ChainVariant::TwoFeature).unwrap();
        let a = sample_and_filter(&m, &pi, 20_000, 9).unwrap();
        let b = sample_and_filter(&m, &pi, 20_000, 9).unwrap();
        assert_eq!(a, b);
        assert!(!a.records.is_empty());
        let per_state = m.with_state_features();
        let cfg = SamplingConfig::new(20_000, 9);
        for rec in &a.records {
            assert!(is_correct(&per_state, &rec.reward, &pi, 0.95).unwrap());
            assert_eq!(regenerate(&per_state, &cfg, rec.sample_index), rec.reward);
        }
    }

    #[test]
    fn pinned_states_hold() {
        let (m, pi) = russell_norvig_grid();
        let cfg = SamplingConfig {
            n_samples: 200_000,
            seed: 2,
            pinned: vec![(RN_GOAL, 1.0), (RN_LAVA, -1.0)],
        };
        let out = sample_and_filter_with(&m, &pi, &cfg).unwrap();
        for rec in &out.records {
            assert_eq!(rec.reward.weights()[RN_GOAL], 1.0);
            assert_eq!(rec.reward.weights()[RN_LAVA], -1.0);
        }
        let bad = SamplingConfig { pinned: vec![(99, 0.0)], ..cfg };
        assert!(sample_and_filter_with(&m, &pi, &bad).is_err());
    }

    #[test]
    fn single_record_study_has_no_regression() {
        let (m, pi) = chain(6, ChainVariant::TwoFeature).unwrap();
        let out = sample_and_filter(&m, &pi, 5_000, 4).unwrap();
        let one = &out.records[..1];
        let cfg = QLearningConfig { steps: 200, ..Default::default() };
        let table = study(one, &m, &pi, 0.95, &cfg, 3).unwrap();
        assert_eq!(table.records.len(), 1);
        assert!(table.records[0].cumulative_correct.is_some());
        assert!(table.regression.is_none());
    }
}
