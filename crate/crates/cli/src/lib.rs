//! `rewardgap` command line: action gaps, subjective discounts, LP reward
//! synthesis, learning curves and the data behind each figure.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use rewardgap::csvio::{self, CurveRow};
use rewardgap::discount::{subjective_discount, DEFAULT_THRESHOLD, DEFAULT_TOL};
use rewardgap::environments::EnvironmentSpec;
use rewardgap::experiments::{chain_reward, CHAIN_SUITE};
use rewardgap::format::{load_environment, load_reward, write_reward};
use rewardgap::learning::{aggregate_runs, QLearningConfig};
use rewardgap::mdp::{action_gap, Mdp, Policy, RewardVector};
use rewardgap::synthesis::{RewardDesigner, DEFAULT_FLOOR};

mod figures;

pub use figures::Figure;

pub const EXIT_USAGE: i32 = 2;
pub const EXIT_UNDEFINED: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    /// Infeasible program or undefined quantity.
    #[error("{0}")]
    Undefined(String),
    #[error(transparent)]
    Core(#[from] rewardgap::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use rewardgap::Error as E;
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Undefined(_) => EXIT_UNDEFINED,
            CliError::Core(e) => match e {
                E::InvalidParameter(_)
                | E::InvalidDiscount(_)
                | E::DimensionMismatch { .. }
                | E::IndexOutOfRange { .. }
                | E::Parse { .. }
                | E::NotStochastic { .. }
                | E::InvalidProbability { .. } => EXIT_USAGE,
                E::LpStatus(_) | E::NoCorrectReward { .. } | E::FloorUnreachable { .. } => EXIT_UNDEFINED,
                _ => 1,
            },
            CliError::Io(_) => 1,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "rewardgap", version, about = "Reward design and analysis for tabular MDPs")]
pub struct Cli {
    /// TOML file with defaults for any flag (flags win).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the action gap of a reward.
    Gap(Common),
    /// Print the subjective discount of a reward, or "undefined".
    Subjective {
        #[command(flatten)]
        common: Common,
        /// Gap the reward must keep at the reported discount (default 0.01).
        #[arg(long)]
        threshold: Option<f64>,
    },
    /// Design a reward by linear programming.
    Synthesize {
        #[command(flatten)]
        common: Common,
        /// Subjective discount the reward must also be correct at (default: the objective one).
        #[arg(long, conflicts_with = "minimize")]
        gamma_tilde: Option<f64>,
        /// Search for the smallest subjective discount reaching `--floor`.
        #[arg(long)]
        minimize: bool,
        /// Smallest acceptable gap when minimizing (default 0.01).
        #[arg(long)]
        floor: Option<f64>,
    },
    /// Q-Learning curve (mean cumulative correct actions) as CSV.
    Learn {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        learning: Learning,
    },
    /// Write the CSV data behind a figure and a pass/fail summary.
    Reproduce {
        figure: Figure,
        /// Output directory (default: the figure name).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Base seed; run k uses seed + k.
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        learning: Learning,
        /// Random rewards drawn (fig2).
        #[arg(long)]
        samples: Option<usize>,
        /// Most correct rewards scored by learning (fig2).
        #[arg(long)]
        max_rewards: Option<usize>,
        /// Fix goal and lava rewards to +1 and -1 instead of sampling them (fig2).
        #[arg(long)]
        pin_terminals: bool,
    },
}

#[derive(Debug, Clone, Default, Args)]
pub struct Common {
    /// Named environment (rn_grid, chain60, chain60_subgoals, chain60_dense, ...) or environment file.
    #[arg(long)]
    pub env: Option<String>,
    /// Preset name, `lp`, or reward file.
    #[arg(long)]
    pub reward: Option<String>,
    /// Objective discount (default: the environment's).
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Base seed; run k uses seed + k.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output file (default: stdout where applicable).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct Learning {
    /// Environment steps per run.
    #[arg(long)]
    pub steps: Option<usize>,
    /// Independent runs averaged per curve.
    #[arg(long)]
    pub runs: Option<usize>,
    /// Q-Learning step size (default 0.1).
    #[arg(long)]
    pub learning_rate: Option<f64>,
    /// Exploration rate (default 0.1).
    #[arg(long)]
    pub epsilon: Option<f64>,
}

/// File form of the flags. Every field is optional; flags override it.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub env: Option<String>,
    pub reward: Option<String>,
    pub gamma: Option<f64>,
    pub gamma_tilde: Option<f64>,
    pub floor: Option<f64>,
    pub minimize: Option<bool>,
    pub threshold: Option<f64>,
    pub steps: Option<usize>,
    pub runs: Option<usize>,
    pub learning_rate: Option<f64>,
    pub epsilon: Option<f64>,
    pub q_init: Option<f64>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub workers: Option<usize>,
    pub samples: Option<usize>,
    pub max_rewards: Option<usize>,
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> CliResult<Self> {
        toml::from_str(text).map_err(|e| CliError::Usage(format!("config: {e}")))
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Fields set in `self` win over `base`.
    pub fn over(self, base: ExperimentConfig) -> ExperimentConfig {
        ExperimentConfig {
            env: self.env.or(base.env),
            reward: self.reward.or(base.reward),
            gamma: self.gamma.or(base.gamma),
            gamma_tilde: self.gamma_tilde.or(base.gamma_tilde),
            floor: self.floor.or(base.floor),
            minimize: self.minimize.or(base.minimize),
            threshold: self.threshold.or(base.threshold),
            steps: self.steps.or(base.steps),
            runs: self.runs.or(base.runs),
            learning_rate: self.learning_rate.or(base.learning_rate),
            epsilon: self.epsilon.or(base.epsilon),
            q_init: self.q_init.or(base.q_init),
            seed: self.seed.or(base.seed),
            out: self.out.or(base.out),
            workers: self.workers.or(base.workers),
            samples: self.samples.or(base.samples),
            max_rewards: self.max_rewards.or(base.max_rewards),
        }
    }

    fn from_common(c: &Common) -> Self {
        ExperimentConfig {
            env: c.env.clone(),
            reward: c.reward.clone(),
            gamma: c.gamma,
            seed: c.seed,
            out: c.out.clone(),
            ..Default::default()
        }
    }

    fn with_learning(mut self, l: &Learning) -> Self {
        self.steps = l.steps;
        self.runs = l.runs;
        self.learning_rate = l.learning_rate;
        self.epsilon = l.epsilon;
        self
    }

    pub fn learning_config(&self, default_runs: usize) -> (QLearningConfig, usize) {
        let d = QLearningConfig::default();
        let cfg = QLearningConfig {
            steps: self.steps.unwrap_or(d.steps),
            learning_rate: self.learning_rate.unwrap_or(d.learning_rate),
            epsilon: self.epsilon.unwrap_or(d.epsilon),
            q_init: self.q_init.unwrap_or(d.q_init),
            seed: self.seed.unwrap_or(d.seed),
        };
        (cfg, self.runs.unwrap_or(default_runs))
    }
}

/// Environment resolved from a name or a file.
pub struct Environment {
    pub spec: Option<EnvironmentSpec>,
    pub mdp: Mdp,
    pub policy: Policy,
}

pub fn resolve_env(name: Option<&str>) -> CliResult<Environment> {
    let name = name.ok_or_else(|| CliError::Usage("--env is required".into()))?;
    if let Ok(spec) = name.parse::<EnvironmentSpec>() {
        let (mdp, policy) = spec.build()?;
        return Ok(Environment {
            spec: Some(spec),
            mdp,
            policy,
        });
    }
    if Path::new(name).is_file() {
        let (mdp, policy) = load_environment(name)?;
        return Ok(Environment {
            spec: None,
            mdp,
            policy,
        });
    }
    Err(CliError::Usage(format!(
        "unknown environment '{name}' (names: rn_grid, chain<N>, chain<N>_subgoals[_constant], chain<N>_dense; or a file)"
    )))
}

/// Preset of the environment, a chain experiment reward, `lp` (LP reward at
/// `gamma_tilde`, or at the minimal subjective discount), or a reward file.
pub fn resolve_reward(env: &Environment, cfg: &ExperimentConfig) -> CliResult<RewardVector> {
    let name = cfg
        .reward
        .as_deref()
        .ok_or_else(|| CliError::Usage("--reward is required".into()))?;
    if let Some(spec) = &env.spec {
        if spec.reward_presets().contains(&name) {
            return Ok(spec.reward_preset(name)?);
        }
        if let EnvironmentSpec::Chain { n, .. } = spec {
            if CHAIN_SUITE.contains(&name) {
                let nr = chain_reward(name, *n)?;
                if nr.mdp != env.mdp {
                    return Err(CliError::Usage(format!("reward '{name}' does not belong to environment {spec}")));
                }
                return Ok(nr.reward);
            }
        }
    }
    if name == "lp" {
        let gamma = cfg.gamma.unwrap_or(env.mdp.discount());
        let designer = RewardDesigner::new(&env.mdp, &env.policy, gamma)?;
        let res = match cfg.gamma_tilde {
            Some(gt) => designer.synthesize(gt)?,
            None => designer.min_subjective_discount(cfg.floor.unwrap_or(DEFAULT_FLOOR), DEFAULT_TOL)?.0,
        };
        return Ok(res.reward);
    }
    if Path::new(name).is_file() {
        let r = load_reward(name)?;
        if r.len() != env.mdp.n_features() {
            return Err(CliError::Usage(format!(
                "reward file has {} weights, environment has {} features",
                r.len(),
                env.mdp.n_features()
            )));
        }
        return Ok(r);
    }
    let presets = env.spec.map(|s| s.reward_presets().join(", ")).unwrap_or_default();
    Err(CliError::Usage(format!(
        "unknown reward '{name}' (presets: {presets}; or 'lp', or a reward file)"
    )))
}

fn set_workers(n: Option<usize>) -> CliResult<()> {
    if let Some(n) = n {
        if n == 0 {
            return Err(CliError::Usage("--workers must be at least 1".into()));
        }
        // Fails only if a pool already exists (e.g. repeated calls in one process).
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}

pub fn run(cli: Cli, stdout: &mut dyn Write) -> CliResult<()> {
    let file = match &cli.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    let workers = cli.workers.or(file.workers);
    set_workers(workers)?;
    match cli.command {
        Command::Gap(common) => {
            let cfg = ExperimentConfig::from_common(&common).over(file);
            let env = resolve_env(cfg.env.as_deref())?;
            let r = resolve_reward(&env, &cfg)?;
            let gamma = cfg.gamma.unwrap_or(env.mdp.discount());
            writeln!(stdout, "{}", action_gap(&env.mdp, &r, &env.policy, gamma)?)?;
            Ok(())
        }
        Command::Subjective { common, threshold } => {
            let cfg = ExperimentConfig {
                threshold,
                ..ExperimentConfig::from_common(&common)
            }
            .over(file);
            let env = resolve_env(cfg.env.as_deref())?;
            let r = resolve_reward(&env, &cfg)?;
            let gamma = cfg.gamma.unwrap_or(env.mdp.discount());
            let threshold = cfg.threshold.unwrap_or(DEFAULT_THRESHOLD);
            let rep = subjective_discount(&env.mdp, &r, &env.policy, gamma, threshold, DEFAULT_TOL)?;
            if let Some(p) = &cfg.out {
                csvio::write_rows(fs::File::create(p)?, &csvio::SUBJECTIVE, &csvio::subjective_rows(&rep, gamma))?;
            }
            match rep.gamma_tilde {
                Some(g) => {
                    writeln!(stdout, "{g}")?;
                    Ok(())
                }
                None => {
                    writeln!(stdout, "undefined")?;
                    Err(CliError::Undefined(format!(
                        "gap {} at discount {gamma} never reaches threshold {threshold}",
                        rep.objective_gap
                    )))
                }
            }
        }
        Command::Synthesize {
            common,
            gamma_tilde,
            minimize,
            floor,
        } => {
            let cfg = ExperimentConfig {
                gamma_tilde,
                minimize: minimize.then_some(true),
                floor,
                ..ExperimentConfig::from_common(&common)
            }
            .over(file);
            let env = resolve_env(cfg.env.as_deref())?;
            let gamma = cfg.gamma.unwrap_or(env.mdp.discount());
            let designer = RewardDesigner::new(&env.mdp, &env.policy, gamma)?;
            let res = if cfg.minimize.unwrap_or(false) {
                designer
                    .min_subjective_discount(cfg.floor.unwrap_or(DEFAULT_FLOOR), DEFAULT_TOL)?
                    .0
            } else {
                designer.synthesize(cfg.gamma_tilde.unwrap_or(gamma))?
            };
            let w: Vec<String> = res.reward.weights().iter().map(|v| v.to_string()).collect();
            writeln!(stdout, "gamma_tilde {}", res.gamma_tilde)?;
            writeln!(stdout, "delta {}", res.delta)?;
            writeln!(stdout, "objective_gap {}", res.objective_gap)?;
            writeln!(stdout, "subjective_gap {}", res.subjective_gap)?;
            writeln!(stdout, "reward {}", w.join(" "))?;
            if let Some(p) = &cfg.out {
                fs::write(p, write_reward(&res.reward))?;
            }
            Ok(())
        }
        Command::Learn { common, learning } => {
            let cfg = ExperimentConfig::from_common(&common).with_learning(&learning).over(file);
            let env = resolve_env(cfg.env.as_deref())?;
            let r = resolve_reward(&env, &cfg)?;
            let gamma = cfg.gamma.unwrap_or(env.mdp.discount());
            let (qcfg, runs) = cfg.learning_config(200);
            let curve = aggregate_runs(&env.mdp, &r, &env.policy, gamma, &qcfg, runs)?;
            match &cfg.out {
                Some(p) => csvio::write_curve(fs::File::create(p)?, &curve)?,
                None => csvio::write_curve(&mut *stdout, &curve)?,
            }
            Ok(())
        }
        Command::Reproduce {
            figure,
            out,
            seed,
            learning,
            samples,
            max_rewards,
            pin_terminals,
        } => {
            let cfg = ExperimentConfig {
                out,
                seed,
                samples,
                max_rewards,
                ..Default::default()
            }
            .with_learning(&learning)
            .over(file);
            figures::reproduce(figure, &cfg, pin_terminals, stdout)
        }
    }
}

/// Reads back a curve file, enforcing its schema.
pub fn read_curve(path: &Path) -> CliResult<Vec<CurveRow>> {
    Ok(csvio::read_rows(fs::File::open(path)?, &csvio::CURVE)?)
}
