//! Sequence-based annotation files: target sequence plus predicted secondary
//! structure and relative solvent accessibility.
//!
//! Format (three content lines, `#` comments and blank lines ignored):
//!   line 1: one-letter target sequence
//!   line 2: SS string, 3-state or 8-state (reduced to H/E/C on read)
//!   line 3: whitespace-separated relative accessibilities in [0,1]

use crate::error::{Error, Result};
use crate::structure::{sequence_to_aas, PredictedAnnotations, Ss3};

/// A parsed annotation file: the declared target sequence and the per-position
/// predictions, already validated against each other.
#[derive(Debug, Clone)]
pub struct TargetAnnotations {
    pub sequence: String,
    pub ann: PredictedAnnotations,
}

pub fn parse_annotations(text: &str) -> Result<TargetAnnotations> {
    let mut lines = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'));
    let seq_line = lines
        .next()
        .ok_or_else(|| Error::AnnotationFormat("missing sequence line".into()))?
        .to_string();
    let ss_line = lines
        .next()
        .ok_or_else(|| Error::AnnotationFormat("missing secondary-structure line".into()))?;
    let sa_line = lines
        .next()
        .ok_or_else(|| Error::AnnotationFormat("missing solvent-accessibility line".into()))?;
    if let Some(extra) = lines.next() {
        return Err(Error::AnnotationFormat(format!("unexpected extra content: {extra:?}")));
    }

    sequence_to_aas(&seq_line)?;
    let n = seq_line.chars().count();

    let ss_pred: Vec<Ss3> = ss_line.chars().map(Ss3::from_code).collect();
    if ss_pred.len() != n {
        return Err(Error::AnnotationLength { field: "secondary structure", found: ss_pred.len(), expected: n });
    }

    let mut sa_pred = Vec::new();
    for tok in sa_line.split_whitespace() {
        let v: f64 = tok
            .parse()
            .map_err(|_| Error::AnnotationFormat(format!("bad accessibility value {tok:?}")))?;
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::AnnotationFormat(format!("accessibility {v} outside [0,1]")));
        }
        sa_pred.push(v);
    }
    if sa_pred.len() != n {
        return Err(Error::AnnotationLength { field: "solvent accessibility", found: sa_pred.len(), expected: n });
    }

    Ok(TargetAnnotations { sequence: seq_line, ann: PredictedAnnotations { ss_pred, sa_pred } })
}

/// Serialize annotations in the three-line format read by [`parse_annotations`].
pub fn write_annotations(sequence: &str, ann: &PredictedAnnotations) -> String {
    let ss: String = ann.ss_pred.iter().map(|s| s.as_char()).collect();
    let sa: Vec<String> = ann.sa_pred.iter().map(|v| format!("{v}")).collect();
    format!("{sequence}\n{ss}\n{}\n", sa.join(" "))
}
