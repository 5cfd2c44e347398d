//! Versioned CSV tables. Every file starts with a `# schema: <name> v<N>`
//! comment line followed by the column header; readers reject any other
//! schema line or header.

use std::io::{BufRead, BufReader, Read, Write};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::discount::SubjectiveDiscountReport;
use crate::error::{Error, Result};
use crate::learning::AggregateCurve;
use crate::random_search::SearchRecord;
use crate::stats::Regression;
use crate::synthesis::SweepPoint;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Schema {
    pub name: &'static str,
    pub version: u32,
    pub columns: &'static [&'static str],
}

impl Schema {
    pub fn comment(&self) -> String {
        format!("# schema: {} v{}", self.name, self.version)
    }
}

pub const CURVE: Schema = Schema {
    name: "curve",
    version: 1,
    columns: &["step", "mean_cumulative_correct", "ci_half_width"],
};

pub const SWEEP: Schema = Schema {
    name: "sweep",
    version: 1,
    columns: &["gamma_tilde", "delta", "objective_gap", "subjective_gap", "mean_correct_10k"],
};

pub const SEARCH: Schema = Schema {
    name: "search",
    version: 1,
    columns: &["sample_index", "correct", "gamma_tilde", "mean_cumulative_correct"],
};

pub const REGRESSION: Schema = Schema {
    name: "regression",
    version: 1,
    columns: &["slope", "intercept", "r_squared", "slope_std_error", "p_value", "n"],
};

pub const SUBJECTIVE: Schema = Schema {
    name: "subjective",
    version: 1,
    columns: &["kind", "gamma", "gap", "correct"],
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    pub step: usize,
    pub mean_cumulative_correct: f64,
    pub ci_half_width: f64,
}

/// Empty optional fields mark infeasible points or runs that were not scored.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub gamma_tilde: f64,
    pub delta: Option<f64>,
    pub objective_gap: Option<f64>,
    pub subjective_gap: Option<f64>,
    pub mean_correct_10k: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchRow {
    pub sample_index: usize,
    pub correct: bool,
    pub gamma_tilde: Option<f64>,
    pub mean_cumulative_correct: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegressionRow {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub slope_std_error: f64,
    pub p_value: f64,
    pub n: usize,
}

/// `kind` is `result` (γ̃ and its gap; both empty when undefined),
/// `objective` or `audit`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubjectiveRow {
    pub kind: String,
    pub gamma: Option<f64>,
    pub gap: Option<f64>,
    pub correct: Option<bool>,
}

pub fn write_rows<W: Write, T: Serialize>(w: W, schema: &Schema, rows: &[T]) -> Result<()> {
    let mut w = w;
    writeln!(w, "{}", schema.comment())?;
    let mut out = csv::WriterBuilder::new().has_headers(false).from_writer(w);
    out.write_record(schema.columns)?;
    for row in rows {
        out.serialize(row)?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_rows<R: Read, T: DeserializeOwned>(r: R, schema: &Schema) -> Result<Vec<T>> {
    let mut r = BufReader::new(r);
    let mut first = String::new();
    r.read_line(&mut first)?;
    if first.trim_end_matches(['\r', '\n']) != schema.comment() {
        return Err(Error::parse(1, format!("expected '{}'", schema.comment())));
    }
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(r);
    let header = reader.headers()?.clone();
    if header.iter().ne(schema.columns.iter().copied()) {
        return Err(Error::parse(
            2,
            format!("header must be '{}'", schema.columns.join(",")),
        ));
    }
    let mut rows = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec?;
        let row = rec
            .deserialize(Some(&header))
            .map_err(|e| Error::parse(i + 3, e.to_string()))?;
        rows.push(row);
    }
    Ok(rows)
}

pub fn curve_rows(curve: &AggregateCurve) -> Vec<CurveRow> {
    curve
        .mean
        .iter()
        .zip(&curve.half_width)
        .enumerate()
        .map(|(i, (&m, &h))| CurveRow {
            step: i + 1,
            mean_cumulative_correct: m,
            ci_half_width: h,
        })
        .collect()
}

pub fn write_curve<W: Write>(w: W, curve: &AggregateCurve) -> Result<()> {
    write_rows(w, &CURVE, &curve_rows(curve))
}

/// `scores` pairs with the feasible sweep points, in order; missing entries are left empty.
pub fn sweep_rows(points: &[SweepPoint], scores: &[Option<f64>]) -> Vec<SweepRow> {
    points
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let ok = p.outcome.as_ref().ok();
            SweepRow {
                gamma_tilde: p.gamma_tilde,
                delta: ok.map(|r| r.delta),
                objective_gap: ok.map(|r| r.objective_gap),
                subjective_gap: ok.map(|r| r.subjective_gap),
                mean_correct_10k: scores.get(i).copied().flatten(),
            }
        })
        .collect()
}

pub fn search_rows(records: &[SearchRecord]) -> Vec<SearchRow> {
    records
        .iter()
        .map(|r| SearchRow {
            sample_index: r.sample_index,
            correct: r.correct,
            gamma_tilde: r.subjective_discount,
            mean_cumulative_correct: r.cumulative_correct,
        })
        .collect()
}

pub fn regression_row(r: &Regression) -> RegressionRow {
    RegressionRow {
        slope: r.slope,
        intercept: r.intercept,
        r_squared: r.r_squared,
        slope_std_error: r.slope_std_error,
        p_value: r.p_value,
        n: r.n,
    }
}

pub fn subjective_rows(rep: &SubjectiveDiscountReport, gamma: f64) -> Vec<SubjectiveRow> {
    let mut rows = vec![
        SubjectiveRow {
            kind: "result".into(),
            gamma: rep.gamma_tilde,
            gap: rep.gap_at_gamma_tilde,
            correct: rep.gap_at_gamma_tilde.map(|g| g > 0.0),
        },
        SubjectiveRow {
            kind: "objective".into(),
            gamma: Some(gamma),
            gap: Some(rep.objective_gap),
            correct: Some(rep.objective_gap > 0.0),
        },
    ];
    rows.extend(rep.checked_points.iter().map(|p| SubjectiveRow {
        kind: "audit".into(),
        gamma: Some(p.gamma),
        gap: Some(p.gap),
        correct: Some(p.correct),
    }));
    rows
}
