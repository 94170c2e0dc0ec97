//! Core structural types: amino acids, residues, models, pools, and
//! sequence-based predicted annotations.

pub mod annotations;
pub mod pdb;
pub mod pool;
pub mod qa_format;

use crate::error::{Error, Result};

/// 3-D coordinate in Å.
pub type Point3 = [f64; 3];

/// The 20 standard amino acids, ordered alphabetically by one-letter code.
///
/// The discriminant order fixes the one-hot layout of the feature vectors
/// and is part of the persisted model contract; it must never change.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AminoAcid {
    Ala,
    Cys,
    Asp,
    Glu,
    Phe,
    Gly,
    His,
    Ile,
    Lys,
    Leu,
    Met,
    Asn,
    Pro,
    Gln,
    Arg,
    Ser,
    Thr,
    Val,
    Trp,
    Tyr,
}

pub const NUM_AMINO_ACIDS: usize = 20;

impl AminoAcid {
    pub const ALL: [AminoAcid; NUM_AMINO_ACIDS] = [
        AminoAcid::Ala,
        AminoAcid::Cys,
        AminoAcid::Asp,
        AminoAcid::Glu,
        AminoAcid::Phe,
        AminoAcid::Gly,
        AminoAcid::His,
        AminoAcid::Ile,
        AminoAcid::Lys,
        AminoAcid::Leu,
        AminoAcid::Met,
        AminoAcid::Asn,
        AminoAcid::Pro,
        AminoAcid::Gln,
        AminoAcid::Arg,
        AminoAcid::Ser,
        AminoAcid::Thr,
        AminoAcid::Val,
        AminoAcid::Trp,
        AminoAcid::Tyr,
    ];

    /// Position in the one-hot block (0..20), alphabetical by one-letter code.
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn one_letter(self) -> char {
        b"ACDEFGHIKLMNPQRSTVWY"[self.index()] as char
    }

    pub fn three_letter(self) -> &'static str {
        [
            "ALA", "CYS", "ASP", "GLU", "PHE", "GLY", "HIS", "ILE", "LYS", "LEU", "MET", "ASN",
            "PRO", "GLN", "ARG", "SER", "THR", "VAL", "TRP", "TYR",
        ][self.index()]
    }

    pub fn from_one_letter(c: char) -> Option<AminoAcid> {
        let c = c.to_ascii_uppercase();
        AminoAcid::ALL.iter().copied().find(|aa| aa.one_letter() == c)
    }

    /// Three-letter residue codes as they appear in PDB files.
    /// MSE (selenomethionine) maps to Met and SEC (selenocysteine) to Cys;
    /// every other nonstandard code is rejected.
    pub fn from_three_letter(code: &str) -> Option<AminoAcid> {
        let code = code.trim().to_ascii_uppercase();
        match code.as_str() {
            "MSE" => return Some(AminoAcid::Met),
            "SEC" => return Some(AminoAcid::Cys),
            _ => {}
        }
        AminoAcid::ALL.iter().copied().find(|aa| aa.three_letter() == code)
    }

    /// Kyte-Doolittle hydropathy index.
    pub fn kyte_doolittle(self) -> f64 {
        [
            1.8,  // A
            2.5,  // C
            -3.5, // D
            -3.5, // E
            2.8,  // F
            -0.4, // G
            -3.2, // H
            4.5,  // I
            -3.9, // K
            3.8,  // L
            1.9,  // M
            -3.5, // N
            -1.6, // P
            -3.5, // Q
            -4.5, // R
            -0.8, // S
            -0.7, // T
            4.2,  // V
            -0.9, // W
            -1.3, // Y
        ][self.index()]
    }

    /// Theoretical maximum solvent-accessible area (Å²), Tien et al. values.
    /// Used to turn absolute areas into relative accessibility.
    pub fn max_area(self) -> f64 {
        [
            129.0, // A
            167.0, // C
            193.0, // D
            223.0, // E
            240.0, // F
            104.0, // G
            224.0, // H
            197.0, // I
            236.0, // K
            201.0, // L
            224.0, // M
            195.0, // N
            159.0, // P
            225.0, // Q
            274.0, // R
            155.0, // S
            172.0, // T
            174.0, // V
            285.0, // W
            263.0, // Y
        ][self.index()]
    }

    pub fn is_nonpolar(self) -> bool {
        matches!(
            self,
            AminoAcid::Ala
                | AminoAcid::Val
                | AminoAcid::Leu
                | AminoAcid::Ile
                | AminoAcid::Pro
                | AminoAcid::Phe
                | AminoAcid::Met
                | AminoAcid::Trp
                | AminoAcid::Gly
                | AminoAcid::Cys
        )
    }
}

/// Parse a one-letter sequence string into amino acids.
pub fn sequence_to_aas(seq: &str) -> Result<Vec<AminoAcid>> {
    seq.chars()
        .enumerate()
        .map(|(i, c)| {
            AminoAcid::from_one_letter(c).ok_or_else(|| {
                Error::AnnotationFormat(format!("unknown amino acid '{c}' at sequence position {}", i + 1))
            })
        })
        .collect()
}

/// Three-state secondary structure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Ss3 {
    H,
    E,
    C,
}

impl Ss3 {
    /// Reduce an SS code letter to three states. Accepts both 3-state and
    /// 8-state alphabets: H,G,I -> H; E,B -> E; everything else -> C.
    pub fn from_code(c: char) -> Ss3 {
        match c.to_ascii_uppercase() {
            'H' | 'G' | 'I' => Ss3::H,
            'E' | 'B' => Ss3::E,
            _ => Ss3::C,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Ss3::H => 'H',
            Ss3::E => 'E',
            Ss3::C => 'C',
        }
    }
}

/// One residue of a structural model. The CA position is mandatory; the
/// other backbone atoms are optional and only consumed by the secondary
/// structure assignment and surface-area calculations.
#[derive(Debug, Clone, PartialEq)]
pub struct Residue {
    /// 1-based position in the target sequence.
    pub seq_index: u32,
    pub aa: AminoAcid,
    pub ca: Point3,
    pub n: Option<Point3>,
    pub c: Option<Point3>,
    pub o: Option<Point3>,
}

impl Residue {
    pub fn ca_only(seq_index: u32, aa: AminoAcid, ca: Point3) -> Residue {
        Residue { seq_index, aa, ca, n: None, c: None, o: None }
    }
}

/// A predicted (or experimental) 3-D structure for a target.
#[derive(Debug, Clone, PartialEq)]
pub struct StructureModel {
    pub model_id: String,
    pub target_id: String,
    pub residues: Vec<Residue>,
}

impl StructureModel {
    /// Validates the structural invariants: at least 3 residues and strictly
    /// increasing sequence indices.
    pub fn new(model_id: impl Into<String>, target_id: impl Into<String>, residues: Vec<Residue>) -> Result<StructureModel> {
        if residues.is_empty() {
            return Err(Error::EmptyModel);
        }
        if residues.len() < 3 {
            return Err(Error::TooFewResidues(residues.len()));
        }
        for i in 1..residues.len() {
            if residues[i].seq_index <= residues[i - 1].seq_index {
                return Err(Error::UnorderedResidues(i));
            }
        }
        Ok(StructureModel { model_id: model_id.into(), target_id: target_id.into(), residues })
    }

    pub fn len(&self) -> usize {
        self.residues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.residues.is_empty()
    }

    /// Index into `residues` for a sequence position, if resolved.
    pub fn position_of(&self, seq_index: u32) -> Option<usize> {
        self.residues.binary_search_by_key(&seq_index, |r| r.seq_index).ok()
    }

    pub fn residue_at(&self, seq_index: u32) -> Option<&Residue> {
        self.position_of(seq_index).map(|i| &self.residues[i])
    }

    /// One-letter sequence of the resolved residues (not the full target).
    pub fn resolved_sequence(&self) -> String {
        self.residues.iter().map(|r| r.aa.one_letter()).collect()
    }
}

/// All models submitted for one target, plus the target sequence they are
/// validated against.
#[derive(Debug, Clone)]
pub struct ModelPool {
    pub target_id: String,
    pub target_sequence: String,
    pub models: Vec<StructureModel>,
}

impl ModelPool {
    /// Builds a pool, stamping `target_id` on every model and validating each
    /// model against the target sequence.
    pub fn new(target_id: impl Into<String>, target_sequence: impl Into<String>, models: Vec<StructureModel>) -> Result<ModelPool> {
        let target_id = target_id.into();
        let target_sequence = target_sequence.into();
        sequence_to_aas(&target_sequence)?;
        let mut models = models;
        for m in &mut models {
            validate_against_sequence(m, &target_sequence)?;
            m.target_id = target_id.clone();
        }
        Ok(ModelPool { target_id, target_sequence, models })
    }

    pub fn len(&self) -> usize {
        self.models.len()
    }

    pub fn is_empty(&self) -> bool {
        self.models.is_empty()
    }

    pub fn target_length(&self) -> usize {
        self.target_sequence.chars().count()
    }
}

/// Checks that every residue of `model` fits the target sequence: index in
/// range and amino acid matching.
pub fn validate_against_sequence(model: &StructureModel, sequence: &str) -> Result<()> {
    let seq: Vec<char> = sequence.chars().collect();
    for r in &model.residues {
        let pos = r.seq_index as usize;
        if pos == 0 || pos > seq.len() {
            return Err(Error::ResidueOutOfRange {
                model: model.model_id.clone(),
                seq_index: r.seq_index,
                len: seq.len(),
            });
        }
        let expected = seq[pos - 1].to_ascii_uppercase();
        if r.aa.one_letter() != expected {
            return Err(Error::SequenceMismatch {
                model: model.model_id.clone(),
                seq_index: r.seq_index,
                found: r.aa.one_letter(),
                expected,
            });
        }
    }
    Ok(())
}

/// Per-position predictions made from the target sequence by external tools.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictedAnnotations {
    pub ss_pred: Vec<Ss3>,
    pub sa_pred: Vec<f64>,
}

impl PredictedAnnotations {
    pub fn len(&self) -> usize {
        self.ss_pred.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ss_pred.is_empty()
    }
}
