//! Plain-text environment and reward files.
//!
//! Environment grammar (one item per line, `#` starts a comment, blank
//! lines ignored):
//!
//! ```text
//! mdp v1
//! states <n>
//! actions <m>
//! features <k>
//! discount <γ>
//! start <s>
//! terminals [<s> ...]
//! transitions
//! <s> <a>: <s'> <p> [<s'> <p> ...]      one line per non-terminal (s, a)
//! state_features
//! <s>: <f_1> ... <f_k>                  one line per state
//! policy
//! <a_0> ... <a_{n-1}>
//! end
//! ```
//!
//! Reward grammar:
//!
//! ```text
//! reward v1
//! weights <w_1> ... <w_k>
//! end
//! ```

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::mdp::{Mdp, Policy, RewardVector};

const MAX_STATE_ACTIONS: usize = 1 << 20;
const MAX_FEATURE_CELLS: usize = 1 << 24;

struct Lines<'a> {
    inner: Box<dyn Iterator<Item = (usize, &'a str)> + 'a>,
    last: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        let inner = text.lines().enumerate().filter_map(|(i, l)| {
            let l = l.split('#').next().unwrap_or("").trim();
            (!l.is_empty()).then_some((i + 1, l))
        });
        Lines {
            inner: Box::new(inner),
            last: 0,
        }
    }

    fn next(&mut self, what: &str) -> Result<(usize, &'a str)> {
        match self.inner.next() {
            Some((n, l)) => {
                self.last = n;
                Ok((n, l))
            }
            None => Err(Error::parse(self.last + 1, format!("unexpected end of input, expected {what}"))),
        }
    }

    fn keyword(&mut self, key: &str) -> Result<(usize, &'a str)> {
        let (n, l) = self.next(key)?;
        let mut it = l.splitn(2, char::is_whitespace);
        if it.next() != Some(key) {
            return Err(Error::parse(n, format!("expected '{key}'")));
        }
        Ok((n, it.next().unwrap_or("").trim()))
    }

    fn finish(&mut self) -> Result<()> {
        if let Some((n, _)) = self.inner.next() {
            return Err(Error::parse(n, "trailing content after 'end'"));
        }
        Ok(())
    }
}

fn num(line: usize, tok: &str) -> Result<f64> {
    tok.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| Error::parse(line, format!("invalid number '{tok}'")))
}

fn index(line: usize, tok: &str, what: &str, len: usize) -> Result<usize> {
    let i: usize = tok
        .parse()
        .map_err(|_| Error::parse(line, format!("invalid {what} '{tok}'")))?;
    if i >= len {
        return Err(Error::parse(line, format!("{what} {i} out of range (len {len})")));
    }
    Ok(i)
}

fn count(line: usize, tok: &str, what: &str) -> Result<usize> {
    match tok.parse::<usize>() {
        Ok(n) if n > 0 => Ok(n),
        _ => Err(Error::parse(line, format!("invalid {what} count '{tok}'"))),
    }
}

pub fn parse_environment(text: &str) -> Result<(Mdp, Policy)> {
    let mut lines = Lines::new(text);
    let (n, l) = lines.next("header")?;
    if l != "mdp v1" {
        return Err(Error::parse(n, "expected 'mdp v1'"));
    }
    let (ln, t) = lines.keyword("states")?;
    let n_states = count(ln, t, "state")?;
    let (ln, t) = lines.keyword("actions")?;
    let n_actions = count(ln, t, "action")?;
    if n_states.saturating_mul(n_actions) > MAX_STATE_ACTIONS {
        return Err(Error::parse(ln, "too many state-action pairs"));
    }
    let (ln, t) = lines.keyword("features")?;
    let n_features = count(ln, t, "feature")?;
    if n_states.saturating_mul(n_features) > MAX_FEATURE_CELLS {
        return Err(Error::parse(ln, "feature matrix too large"));
    }
    let (ln, t) = lines.keyword("discount")?;
    let discount = num(ln, t)?;
    let (ln, t) = lines.keyword("start")?;
    let start = index(ln, t, "start state", n_states)?;
    let (ln, t) = lines.keyword("terminals")?;
    let mut terminal = vec![false; n_states];
    for tok in t.split_whitespace() {
        let s = index(ln, tok, "terminal state", n_states)?;
        if terminal[s] {
            return Err(Error::parse(ln, format!("terminal state {s} listed twice")));
        }
        terminal[s] = true;
    }

    let (ln, t) = lines.keyword("transitions")?;
    if !t.is_empty() {
        return Err(Error::parse(ln, "unexpected content after 'transitions'"));
    }
    let mut transitions: Vec<Option<Vec<(usize, f64)>>> = vec![None; n_states * n_actions];
    let expected_rows = terminal.iter().filter(|&&t| !t).count() * n_actions;
    let mut row_lines = vec![0usize; n_states * n_actions];
    for _ in 0..expected_rows {
        let (ln, l) = lines.next("transition row")?;
        let (head, body) = l
            .split_once(':')
            .ok_or_else(|| Error::parse(ln, "expected '<s> <a>: <s'> <p> ...'"))?;
        let head: Vec<&str> = head.split_whitespace().collect();
        if head.len() != 2 {
            return Err(Error::parse(ln, "expected '<s> <a>:' before successors"));
        }
        let s = index(ln, head[0], "state", n_states)?;
        let a = index(ln, head[1], "action", n_actions)?;
        if terminal[s] {
            return Err(Error::parse(ln, format!("transition row for terminal state {s}")));
        }
        let slot = &mut transitions[s * n_actions + a];
        if slot.is_some() {
            return Err(Error::parse(ln, format!("duplicate transition row ({s}, {a})")));
        }
        let toks: Vec<&str> = body.split_whitespace().collect();
        if toks.is_empty() || !toks.len().is_multiple_of(2) {
            return Err(Error::parse(ln, format!("row ({s}, {a}) needs successor/probability pairs")));
        }
        let mut row = Vec::with_capacity(toks.len() / 2);
        let mut sum = 0.0;
        for pair in toks.chunks(2) {
            let next = index(ln, pair[0], "successor state", n_states)?;
            let p = num(ln, pair[1])?;
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::parse(ln, format!("row ({s}, {a}) has probability {p} outside [0, 1]")));
            }
            sum += p;
            row.push((next, p));
        }
        if (sum - 1.0).abs() > crate::mdp::STOCHASTIC_TOL {
            return Err(Error::parse(ln, format!("row ({s}, {a}) sums to {sum}, expected 1")));
        }
        *slot = Some(row);
        row_lines[s * n_actions + a] = ln;
    }

    let (ln, t) = lines.keyword("state_features")?;
    if !t.is_empty() {
        return Err(Error::parse(ln, "unexpected content after 'state_features'"));
    }
    let mut features: Vec<Option<Vec<f64>>> = vec![None; n_states];
    for _ in 0..n_states {
        let (ln, l) = lines.next("feature row")?;
        let (head, body) = l
            .split_once(':')
            .ok_or_else(|| Error::parse(ln, "expected '<s>: <f_1> ... <f_k>'"))?;
        let s = index(ln, head.trim(), "state", n_states)?;
        if features[s].is_some() {
            return Err(Error::parse(ln, format!("duplicate feature row for state {s}")));
        }
        let row = body
            .split_whitespace()
            .map(|t| num(ln, t))
            .collect::<Result<Vec<_>>>()?;
        if row.len() != n_features {
            return Err(Error::parse(
                ln,
                format!("feature row for state {s} has {} values, expected {n_features}", row.len()),
            ));
        }
        features[s] = Some(row);
    }

    let (ln, t) = lines.keyword("policy")?;
    if !t.is_empty() {
        return Err(Error::parse(ln, "unexpected content after 'policy'"));
    }
    let (ln, l) = lines.next("policy row")?;
    let actions = l
        .split_whitespace()
        .map(|t| index(ln, t, "action", n_actions))
        .collect::<Result<Vec<_>>>()?;
    if actions.len() != n_states {
        return Err(Error::parse(
            ln,
            format!("policy has {} actions, expected {n_states}", actions.len()),
        ));
    }
    let (ln, l) = lines.next("end")?;
    if l != "end" {
        return Err(Error::parse(ln, "expected 'end'"));
    }
    lines.finish()?;

    let transitions = transitions.into_iter().map(Option::unwrap_or_default).collect();
    let features = features
        .into_iter()
        .map(|r| r.expect("every state row read exactly once"))
        .collect();
    let mdp = Mdp::new(n_states, n_actions, transitions, terminal, start, features, discount).map_err(|e| {
        let line = match &e {
            Error::NotStochastic { state, action, .. } | Error::InvalidProbability { state, action, .. } => {
                row_lines[state * n_actions + action]
            }
            _ => 0,
        };
        Error::parse(line, e.to_string())
    })?;
    Ok((mdp, Policy::new(actions)))
}

pub fn write_environment(mdp: &Mdp, pi: &Policy) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "mdp v1");
    let _ = writeln!(out, "states {}", mdp.n_states());
    let _ = writeln!(out, "actions {}", mdp.n_actions());
    let _ = writeln!(out, "features {}", mdp.n_features());
    let _ = writeln!(out, "discount {}", mdp.discount());
    let _ = writeln!(out, "start {}", mdp.start_state());
    let terminals: Vec<String> = (0..mdp.n_states())
        .filter(|&s| mdp.is_terminal(s))
        .map(|s| s.to_string())
        .collect();
    let _ = writeln!(out, "terminals {}", terminals.join(" ").trim_end());
    out.push_str("transitions\n");
    for s in mdp.decision_states() {
        for a in 0..mdp.n_actions() {
            let _ = write!(out, "{s} {a}:");
            for &(next, p) in mdp.successors(s, a) {
                let _ = write!(out, " {next} {p}");
            }
            out.push('\n');
        }
    }
    out.push_str("state_features\n");
    for s in 0..mdp.n_states() {
        let _ = write!(out, "{s}:");
        for v in mdp.feature_row(s) {
            let _ = write!(out, " {v}");
        }
        out.push('\n');
    }
    out.push_str("policy\n");
    let acts: Vec<String> = pi.actions().iter().map(|a| a.to_string()).collect();
    let _ = writeln!(out, "{}", acts.join(" "));
    out.push_str("end\n");
    out
}

pub fn load_environment(path: impl AsRef<Path>) -> Result<(Mdp, Policy)> {
    parse_environment(&std::fs::read_to_string(path)?)
}

/// Weights are accepted outside `[-1, 1]` (see [`RewardVector::unbounded`]).
pub fn parse_reward(text: &str) -> Result<RewardVector> {
    let mut lines = Lines::new(text);
    let (n, l) = lines.next("header")?;
    if l != "reward v1" {
        return Err(Error::parse(n, "expected 'reward v1'"));
    }
    let (ln, t) = lines.keyword("weights")?;
    let weights = t
        .split_whitespace()
        .map(|tok| num(ln, tok))
        .collect::<Result<Vec<_>>>()?;
    if weights.is_empty() {
        return Err(Error::parse(ln, "no weights"));
    }
    let (ln, l) = lines.next("end")?;
    if l != "end" {
        return Err(Error::parse(ln, "expected 'end'"));
    }
    lines.finish()?;
    RewardVector::unbounded(weights).map_err(|e| Error::parse(ln, e.to_string()))
}

pub fn write_reward(r: &RewardVector) -> String {
    let w: Vec<String> = r.weights().iter().map(|v| v.to_string()).collect();
    format!("reward v1\nweights {}\nend\n", w.join(" "))
}

pub fn load_reward(path: impl AsRef<Path>) -> Result<RewardVector> {
    parse_reward(&std::fs::read_to_string(path)?)
}
