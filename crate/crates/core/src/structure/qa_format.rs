//! The QA table format: per-model global score plus per-residue predicted
//! distances.
//!
//! ```text
//! TARGET <target_id>
//! MODE 2
//! <model_id> <global:0.dd> <d1> <d2> ... <dL>
//! ```
//! where each `d` is a distance in Å with one decimal, or `X` when no
//! prediction is made for that position.

use crate::error::{Error, Result};

/// One model's row: global score in [0,1] and one optional distance per
/// target position (None = not predicted, written as `X`).
#[derive(Debug, Clone, PartialEq)]
pub struct QaRecord {
    pub model_id: String,
    pub global: f64,
    pub distances: Vec<Option<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QaFile {
    pub target_id: String,
    pub records: Vec<QaRecord>,
}

/// Serialize QA records. Scores print with 2 decimals, distances with 1;
/// out-of-range values are rejected before anything is written.
pub fn write_qa_output(target_id: &str, records: &[QaRecord]) -> Result<String> {
    for rec in records {
        if !(0.0..=1.0).contains(&rec.global) || !rec.global.is_finite() {
            return Err(Error::ScoreOutOfRange(rec.global));
        }
        for d in rec.distances.iter().flatten() {
            if !d.is_finite() || *d <= 0.0 || *d > 15.0 {
                return Err(Error::DistanceOutOfRange(*d));
            }
        }
    }
    let mut out = format!("TARGET {target_id}\nMODE 2\n");
    for rec in records {
        out.push_str(&rec.model_id);
        out.push_str(&format!(" {:.2}", rec.global));
        for d in &rec.distances {
            match d {
                Some(d) => out.push_str(&format!(" {d:.1}")),
                None => out.push_str(" X"),
            }
        }
        out.push('\n');
    }
    Ok(out)
}

/// Parse a QA table produced by [`write_qa_output`] (or by any other method
/// emitting the same format).
pub fn parse_qa_file(text: &str) -> Result<QaFile> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines.next().ok_or_else(|| Error::QaFormat("empty file".into()))?;
    let target_id = header
        .strip_prefix("TARGET ")
        .ok_or_else(|| Error::QaFormat(format!("expected TARGET line, got {header:?}")))?
        .trim()
        .to_string();
    if target_id.is_empty() {
        return Err(Error::QaFormat("empty target id".into()));
    }
    let mode = lines.next().ok_or_else(|| Error::QaFormat("missing MODE line".into()))?;
    if mode.trim() != "MODE 2" {
        return Err(Error::QaFormat(format!("expected 'MODE 2', got {mode:?}")));
    }
    let mut records = Vec::new();
    for line in lines {
        let mut toks = line.split_whitespace();
        let model_id = toks.next().unwrap().to_string();
        let global_tok = toks
            .next()
            .ok_or_else(|| Error::QaFormat(format!("model {model_id}: missing global score")))?;
        let global: f64 = global_tok
            .parse()
            .map_err(|_| Error::QaFormat(format!("model {model_id}: bad global score {global_tok:?}")))?;
        if !(0.0..=1.0).contains(&global) {
            return Err(Error::ScoreOutOfRange(global));
        }
        let mut distances = Vec::new();
        for tok in toks {
            if tok == "X" {
                distances.push(None);
            } else {
                let d: f64 = tok
                    .parse()
                    .map_err(|_| Error::QaFormat(format!("model {model_id}: bad distance {tok:?}")))?;
                distances.push(Some(d));
            }
        }
        records.push(QaRecord { model_id, global, distances });
    }
    Ok(QaFile { target_id, records })
}
