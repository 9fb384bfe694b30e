use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{write_atomic, LabError, RunConfig, SCHEMA_VERSION};
use crate::drazin::corpus::{generate, CorpusLimits, CorpusMeta};
use crate::linalg::text::format_matrix;

/// Metadata written next to each generated matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusSidecar {
    pub schema: u32,
    pub generator: String,
    pub matrix_file: String,
    pub limits: CorpusLimits,
    #[serde(flatten)]
    pub meta: CorpusMeta,
}

/// Writes `matrix_NNNN.txt` and `matrix_NNNN.json` for each of the
/// `corpus_size` matrices drawn from `seed` into `dir`, and returns the
/// paths in that order.
pub fn gen_corpus(config: &RunConfig, dir: &Path) -> Result<Vec<PathBuf>, LabError> {
    config.validate()?;
    std::fs::create_dir_all(dir).map_err(|e| LabError::io(dir, e))?;
    let limits = CorpusLimits::default();
    let mut written = Vec::with_capacity(2 * config.corpus_size);
    for m in generate(config.seed, config.corpus_size, &limits) {
        let stem = format!("matrix_{:04}", m.meta.item);
        let matrix_path = dir.join(format!("{stem}.txt"));
        write_atomic(&matrix_path, format_matrix(&m.a).as_bytes())?;
        let sidecar = CorpusSidecar {
            schema: SCHEMA_VERSION,
            generator: "ChaCha8Rng::seed_from_u64".to_string(),
            matrix_file: format!("{stem}.txt"),
            limits,
            meta: m.meta,
        };
        let mut json = serde_json::to_string_pretty(&sidecar).expect("sidecars serialize");
        json.push('\n');
        let meta_path = dir.join(format!("{stem}.json"));
        write_atomic(&meta_path, json.as_bytes())?;
        written.push(matrix_path);
        written.push(meta_path);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::drazin::{default_structural_tol, drazin_index};
    use crate::linalg::text::parse_matrix;

    #[test]
    fn regeneration_is_byte_identical_and_metadata_matches() {
        let config = RunConfig {
            seed: 7,
            corpus_size: 3,
            ..RunConfig::default()
        };
        let first = tempfile::tempdir().unwrap();
        let second = tempfile::tempdir().unwrap();
        let a = gen_corpus(&config, first.path()).unwrap();
        let b = gen_corpus(&config, second.path()).unwrap();
        assert_eq!(a.len(), 6);
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(std::fs::read(x).unwrap(), std::fs::read(y).unwrap());
        }
        for pair in a.chunks(2) {
            let m = parse_matrix(&std::fs::read_to_string(&pair[0]).unwrap()).unwrap();
            let meta: CorpusSidecar = serde_json::from_str(&std::fs::read_to_string(&pair[1]).unwrap()).unwrap();
            assert_eq!(drazin_index(&m, default_structural_tol(m.rows())).unwrap(), meta.meta.true_index);
        }
    }
}
