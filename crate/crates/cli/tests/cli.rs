use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use rewardgap::csvio::{self, CurveRow, SweepRow};
use rewardgap::format::{parse_reward, write_environment};
use rewardgap_cli::ExperimentConfig;

fn rewardgap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rewardgap"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn number(o: &Output) -> f64 {
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    stdout(o).trim().parse().unwrap()
}

#[test]
fn gap_presets() {
    let goal = number(&rewardgap(&["gap", "--env", "chain60", "--reward", "goal"]));
    assert!((goal - 0.0024).abs() < 5e-5, "{goal}");
    let combo = number(&rewardgap(&["gap", "--env", "chain60", "--reward", "combo"]));
    assert!((combo - 0.0509).abs() < 5e-5, "{combo}");
}

#[test]
fn unknown_inputs_are_usage_errors() {
    assert_eq!(rewardgap(&["gap", "--env", "chain60", "--reward", "nope"]).status.code(), Some(2));
    assert_eq!(rewardgap(&["gap", "--env", "maze", "--reward", "goal"]).status.code(), Some(2));
    assert_eq!(rewardgap(&["gap", "--env", "chain60"]).status.code(), Some(2));
    assert_eq!(rewardgap(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn subjective_values() {
    let g = number(&rewardgap(&["subjective", "--env", "chain60", "--reward", "penalty"]));
    assert!((g - 0.9249).abs() < 1e-3, "{g}");
    let o = rewardgap(&["subjective", "--env", "chain60", "--reward", "goal"]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(stdout(&o).trim(), "undefined");
    let o = rewardgap(&["subjective", "--env", "chain60", "--reward", "combo", "--threshold", "1.5"]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(stdout(&o).trim(), "undefined");
}

#[test]
fn subjective_report_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("rep.csv");
    let o = rewardgap(&["subjective", "--env", "chain60", "--reward", "combo", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    let rows: Vec<csvio::SubjectiveRow> = csvio::read_rows(fs::File::open(&out).unwrap(), &csvio::SUBJECTIVE).unwrap();
    assert_eq!(rows[0].kind, "result");
    assert!((rows[0].gamma.unwrap() - 0.9238).abs() < 1e-3);
    assert!(rows.iter().filter(|r| r.kind == "audit").count() >= 11);
}

#[test]
fn synthesize_chain_picks_combo() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.txt");
    let o = rewardgap(&["synthesize", "--env", "chain60", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("reward 1 -1"), "{}", stdout(&o));
    let r = parse_reward(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(r.weights(), &[1.0, -1.0]);
}

#[test]
fn synthesize_minimize_and_infeasible_floor() {
    let o = rewardgap(&["synthesize", "--env", "rn_grid", "--minimize", "--floor", "0.01"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let delta: f64 = text
        .lines()
        .find_map(|l| l.strip_prefix("delta "))
        .unwrap()
        .parse()
        .unwrap();
    assert!(delta >= 0.01);
    let o = rewardgap(&["synthesize", "--env", "rn_grid", "--minimize", "--floor", "5"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(!o.stderr.is_empty());
}

#[test]
fn learn_zero_steps_is_header_only() {
    let o = rewardgap(&["learn", "--env", "chain60", "--reward", "combo", "--steps", "0", "--runs", "2"]);
    assert!(o.status.success());
    let rows: Vec<CurveRow> = csvio::read_rows(&o.stdout[..], &csvio::CURVE).unwrap();
    assert!(rows.is_empty());
}

#[test]
fn learn_is_deterministic_and_worker_independent() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, workers: &str| {
        let p = dir.path().join(name);
        let o = rewardgap(&[
            "learn", "--env", "rn_grid", "--reward", "original", "--steps", "500", "--runs", "40", "--seed", "7",
            "--workers", workers, "--out", p.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        fs::read(p).unwrap()
    };
    let a = run("a.csv", "1");
    let b = run("b.csv", "1");
    let c = run("c.csv", "4");
    assert_eq!(a, b);
    assert_eq!(a, c);
    let rows: Vec<CurveRow> = csvio::read_rows(&a[..], &csvio::CURVE).unwrap();
    assert_eq!(rows.len(), 500);
}

#[test]
fn config_file_mirrors_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.toml");
    fs::write(&cfg, "env = \"chain60\"\nreward = \"penalty\"\n").unwrap();
    let g = number(&rewardgap(&["--config", cfg.to_str().unwrap(), "gap"]));
    assert!((g - 0.0485).abs() < 5e-5);
    let g = number(&rewardgap(&["--config", cfg.to_str().unwrap(), "gap", "--reward", "combo"]));
    assert!((g - 0.0509).abs() < 5e-5);
    fs::write(&cfg, "envv = \"chain60\"\n").unwrap();
    assert_eq!(rewardgap(&["--config", cfg.to_str().unwrap(), "gap"]).status.code(), Some(2));
}

#[test]
fn config_parse() {
    let c = ExperimentConfig::parse("steps = 10\nseed = 3\nout = \"x.csv\"\n").unwrap();
    assert_eq!(c.steps, Some(10));
    assert_eq!(c.seed, Some(3));
    assert!(ExperimentConfig::parse("steps = -1").is_err());
    assert!(ExperimentConfig::parse("steps = 1\nsteps = 2").is_err());
}

#[test]
fn environment_and_reward_files() {
    let dir = tempfile::tempdir().unwrap();
    let (m, pi) = rewardgap::chain(60, rewardgap::ChainVariant::TwoFeature).unwrap();
    let env = dir.path().join("chain.mdp");
    fs::write(&env, write_environment(&m, &pi)).unwrap();
    let reward = dir.path().join("combo.reward");
    fs::write(&reward, "reward v1\nweights 1 -1\nend\n").unwrap();
    let g = number(&rewardgap(&["gap", "--env", env.to_str().unwrap(), "--reward", reward.to_str().unwrap()]));
    assert!((g - 0.0509).abs() < 5e-5);
    fs::write(&reward, "reward v1\nweights 1 -1 0\nend\n").unwrap();
    let o = rewardgap(&["gap", "--env", env.to_str().unwrap(), "--reward", reward.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

fn curve_names(dir: &Path) -> Vec<String> {
    let mut names: Vec<String> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .filter(|n| n.ends_with(".csv") && n != "rewards.csv")
        .map(|n| n.trim_end_matches(".csv").to_string())
        .collect();
    names.sort();
    names
}

#[test]
fn fig4_bundle() {
    let dir = tempfile::tempdir().unwrap();
    let o = rewardgap(&["reproduce", "fig4", "--runs", "20", "--steps", "2000", "--out", dir.path().to_str().unwrap()]);
    assert!(o.status.success());
    assert_eq!(curve_names(dir.path()), ["combo", "goal", "penalty", "subgoal-constant", "subgoal-profile"]);
    let rows: Vec<CurveRow> = csvio::read_rows(fs::File::open(dir.path().join("combo.csv")).unwrap(), &csvio::CURVE).unwrap();
    assert_eq!(rows.len(), 2000);
    let summary = fs::read_to_string(dir.path().join("summary.txt")).unwrap();
    assert!(summary.lines().any(|l| l.starts_with("criterion 1 PASS")));
}

#[test]
fn fig3_bundle() {
    let dir = tempfile::tempdir().unwrap();
    let o = rewardgap(&["reproduce", "fig3", "--runs", "4", "--steps", "500", "--out", dir.path().to_str().unwrap()]);
    assert!(o.status.success());
    let rows: Vec<SweepRow> = csvio::read_rows(fs::File::open(dir.path().join("sweep.csv")).unwrap(), &csvio::SWEEP).unwrap();
    assert_eq!(rows.len(), 20);
    let last = rows.last().unwrap();
    assert!((last.gamma_tilde - 0.95).abs() < 1e-12);
    assert!(last.delta.unwrap() > 0.0 && last.mean_correct_10k.is_some());
    assert!(rows[0].delta.is_none());
}

#[test]
fn fig2_bundle() {
    let dir = tempfile::tempdir().unwrap();
    let o = rewardgap(&[
        "reproduce", "fig2", "--samples", "200000", "--pin-terminals", "--runs", "5", "--steps", "1000", "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows: Vec<csvio::SearchRow> = csvio::read_rows(fs::File::open(dir.path().join("search.csv")).unwrap(), &csvio::SEARCH).unwrap();
    assert!(!rows.is_empty());
    assert!(rows.iter().all(|r| r.correct && r.mean_cumulative_correct.is_some()));
    assert_eq!(rows.last().unwrap().sample_index, 200000);
}

#[test]
fn config_seeds_parse() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus/config");
    for e in fs::read_dir(dir).unwrap() {
        let p = e.unwrap().path();
        ExperimentConfig::parse(&fs::read_to_string(&p).unwrap()).unwrap_or_else(|e| panic!("{}: {e}", p.display()));
    }
}
