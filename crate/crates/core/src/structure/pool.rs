//! Pool assembly: read a directory's worth of model files for one target and
//! validate them against the target sequence.

use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::structure::pdb::parse_pdb;
use crate::structure::{validate_against_sequence, ModelPool, StructureModel};

/// Outcome of loading a pool: the surviving models plus one diagnostic line
/// per rejected file.
#[derive(Debug)]
pub struct PoolLoad {
    pub pool: ModelPool,
    pub rejected: Vec<String>,
}

fn model_id_for(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.to_string_lossy().into_owned())
}

/// Load and validate one target's model files.
///
/// Files that fail to parse or contradict the target sequence are rejected
/// with a per-file diagnostic rather than aborting the whole pool; zero
/// surviving models is an error.
pub fn load_pool(paths: &[PathBuf], target_id: &str, sequence: &str) -> Result<PoolLoad> {
    let mut models: Vec<StructureModel> = Vec::new();
    let mut rejected = Vec::new();
    for path in paths {
        let id = model_id_for(path);
        let outcome = std::fs::read_to_string(path)
            .map_err(Error::Io)
            .and_then(|text| parse_pdb(&text, &id))
            .and_then(|m| validate_against_sequence(&m, sequence).map(|_| m));
        match outcome {
            Ok(mut m) => {
                m.target_id = target_id.to_string();
                models.push(m);
            }
            Err(e) => rejected.push(format!("{}: {e}", path.display())),
        }
    }
    if models.is_empty() {
        return Err(Error::EmptyPool { target: target_id.to_string() });
    }
    let pool = ModelPool::new(target_id, sequence, models)?;
    Ok(PoolLoad { pool, rejected })
}

/// All plausible model files in a directory, sorted by name for deterministic
/// pool order.
pub fn model_files_in_dir(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut paths: Vec<PathBuf> = Vec::new();
    for entry in std::fs::read_dir(dir)? {
        let entry = entry?;
        let path = entry.path();
        if path.is_file() {
            paths.push(path);
        }
    }
    paths.sort();
    Ok(paths)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structure::pdb::write_pdb;
    use crate::structure::{AminoAcid, Residue, StructureModel};

    fn toy_model(id: &str, offset: f64) -> StructureModel {
        let residues = (1..=3)
            .map(|i| Residue::ca_only(i, AminoAcid::Ala, [i as f64 * 3.8 + offset, 0.0, 0.0]))
            .collect();
        StructureModel::new(id, "", residues).unwrap()
    }

    #[test]
    fn loads_valid_and_rejects_mismatched() {
        let dir = std::env::temp_dir().join(format!("rfqa_pool_test_{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let good = dir.join("good.pdb");
        std::fs::write(&good, write_pdb(&toy_model("good", 0.0))).unwrap();
        let bad = dir.join("bad.pdb");
        std::fs::write(&bad, write_pdb(&toy_model("bad", 0.0)).replace("ALA", "GLY")).unwrap();
        let load = load_pool(&[good, bad], "t1", "AAA").unwrap();
        assert_eq!(load.pool.len(), 1);
        assert_eq!(load.pool.models[0].model_id, "good");
        assert_eq!(load.rejected.len(), 1);
        assert!(load.rejected[0].contains("bad.pdb"));
        std::fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn empty_pool_is_an_error() {
        assert!(matches!(
            load_pool(&[], "t1", "AAA"),
            Err(Error::EmptyPool { .. })
        ));
    }
}
