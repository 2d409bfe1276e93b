//! Deterministic corpus proposer: candidate files sampled uniformly with
//! replacement. Replacement matters; a generator asked the same question n
//! times emits duplicates, and duplicates are exactly how a popular model
//! accrues ensemble weight.

use super::{ProposerConfig, ProposerError};
use crate::dsl::ModelSource;
use crate::seed;
use rand::Rng;
use std::path::Path;

/// Sample `n` candidate sources from the corpus directory (uniform with
/// replacement), or enumerate every file once when `cfg.exhaustive` is set.
/// File order is name-sorted, so the selection sequence is a pure function
/// of (corpus contents, cfg.seed, n).
pub fn corpus_propose(cfg: &ProposerConfig, n: usize) -> Result<Vec<ModelSource>, ProposerError> {
    cfg.validate()?;
    let dir = cfg
        .corpus_dir
        .as_ref()
        .ok_or_else(|| ProposerError::BadConfig("corpus mode requires corpus_dir".into()))?;
    if cfg.exhaustive {
        corpus_enumerate(dir)
    } else {
        corpus_propose_from(dir, cfg.seed, n)
    }
}

fn corpus_files(dir: &Path) -> Result<Vec<String>, ProposerError> {
    let mut files: Vec<std::path::PathBuf> = std::fs::read_dir(dir)
        .map_err(|_| ProposerError::EmptyCorpus(dir.to_path_buf()))?
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| p.is_file())
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(ProposerError::EmptyCorpus(dir.to_path_buf()));
    }
    Ok(files
        .iter()
        .map(std::fs::read_to_string)
        .collect::<Result<_, _>>()?)
}

/// Every corpus file exactly once, in name order.
pub(crate) fn corpus_enumerate(dir: &Path) -> Result<Vec<ModelSource>, ProposerError> {
    let texts = corpus_files(dir)?;
    Ok(texts
        .into_iter()
        .enumerate()
        .map(|(i, t)| ModelSource::new(format!("m{i:04}"), t))
        .collect())
}

pub(crate) fn corpus_propose_from(
    dir: &Path,
    seed_value: u64,
    n: usize,
) -> Result<Vec<ModelSource>, ProposerError> {
    let texts = corpus_files(dir)?;
    let mut rng = seed::stream(seed_value, &["corpus".into()]);
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let pick = rng.random_range(0..texts.len());
        out.push(ModelSource::new(format!("m{i:04}"), texts[pick].clone()));
    }
    Ok(out)
}
