//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("PDB parse error at line {line}: {msg}")]
    PdbParse { line: usize, msg: String },

    #[error("model contains no residues with a CA atom")]
    EmptyModel,

    #[error("model has fewer than 3 residues ({0}); superposition needs at least 3")]
    TooFewResidues(usize),

    #[error("residue indices are not strictly increasing at position {0}")]
    UnorderedResidues(usize),

    #[error("no valid models in pool for target {target}")]
    EmptyPool { target: String },

    #[error("model {model}: residue {seq_index} is {found} but target sequence has {expected}")]
    SequenceMismatch {
        model: String,
        seq_index: u32,
        found: char,
        expected: char,
    },

    #[error("model {model}: residue index {seq_index} exceeds target length {len}")]
    ResidueOutOfRange {
        model: String,
        seq_index: u32,
        len: usize,
    },

    #[error("annotation {field} length {found} does not match sequence length {expected}")]
    AnnotationLength {
        field: &'static str,
        found: usize,
        expected: usize,
    },

    #[error("annotation format: {0}")]
    AnnotationFormat(String),

    #[error("QA format: {0}")]
    QaFormat(String),

    #[error("global score {0} outside [0,1]")]
    ScoreOutOfRange(f64),

    #[error("distance {0} outside (0, 15]")]
    DistanceOutOfRange(f64),

    #[error("structures share {found} residues; at least {needed} required")]
    InsufficientOverlap { found: usize, needed: usize },

    #[error("point sets differ in length ({0} vs {1})")]
    PointLengthMismatch(usize, usize),

    #[error("fewer than 3 point pairs ({0})")]
    TooFewPoints(usize),

    #[error("pairwise scoring needs at least 2 models, pool has {0}")]
    SingleModelPool(usize),

    #[error("residue {0} not present in model")]
    ResidueNotInModel(u32),

    #[error("feature vector length {found} does not match model ({expected})")]
    FeatureLengthMismatch { found: usize, expected: usize },

    #[error("feature layout {found:?} does not match expected {expected:?}")]
    LayoutMismatch { found: String, expected: String },

    #[error("empty dataset")]
    EmptyDataset,

    #[error("cross-validation needs at least {k} samples, got {n}")]
    SampleSmallerThanFolds { n: usize, k: usize },

    #[error("feature matrix: {0}")]
    FeatureMatrix(String),

    #[error("forest model file: {0}")]
    ModelFormat(String),

    #[error("input lengths differ ({0} vs {1})")]
    LengthMismatch(usize, usize),

    #[error("correlation needs at least 2 paired values, got {0}")]
    TooFewPairs(usize),

    #[error("score maps do not cover the same models: {0}")]
    ModelSetMismatch(String),

    #[error("no models to score")]
    EmptyScoreMap,

    #[error("truth file: {0}")]
    TruthFormat(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
