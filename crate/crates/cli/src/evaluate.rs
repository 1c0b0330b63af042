//! Load problem documents and run the harness over them in parallel.

use std::fs;
use std::path::{Path, PathBuf};

use nyaya_core::logic::LogicProblem;
use nyaya_harness::{
    rejection_sample, run_tiers, ClientError, EvalConfig, EvalRecord, Example, JudgeClient, ModelClient,
};
use rayon::prelude::*;
use thiserror::Error;

use crate::corpus::{markdown_files, CorpusError};

#[derive(Debug, Error)]
pub enum LoadError {
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{0}: problem documents need frontmatter with id and ground_truth")]
    NotAProblem(PathBuf),
    #[error("{path}: {message}")]
    Logic { path: PathBuf, message: String },
    #[error("duplicate id `{0}`")]
    DuplicateId(String),
}

/// Problem documents in `dir`, each with its optional sibling `<id>.logic.json`, sorted by id.
pub fn load_examples(dir: &Path) -> Result<Vec<Example>, LoadError> {
    let mut out = Vec::new();
    for path in markdown_files(dir)? {
        let text = fs::read_to_string(&path).map_err(|source| LoadError::Io { path: path.clone(), source })?;
        let mut example = Example::from_document(&text).ok_or_else(|| LoadError::NotAProblem(path.clone()))?;
        let logic = dir.join(format!("{}.logic.json", example.id));
        if logic.is_file() {
            let json = fs::read_to_string(&logic).map_err(|source| LoadError::Io { path: logic.clone(), source })?;
            let problem = LogicProblem::from_json(&json)
                .map_err(|e| LoadError::Logic { path: logic.clone(), message: e.to_string() })?;
            example.problem = Some(problem);
        }
        out.push(example);
    }
    out.sort_by(|a, b| a.id.cmp(&b.id));
    if let Some(w) = out.windows(2).find(|w| w[0].id == w[1].id) {
        return Err(LoadError::DuplicateId(w[0].id.clone()));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Evaluated {
    pub record: EvalRecord,
    pub attempts: u32,
    /// Client failures during sampling. With no output at all the record scores an empty string.
    pub errors: Vec<ClientError>,
}

/// Sample each example, then run the full tier chain on the chosen (or last) output.
pub fn evaluate(
    examples: &[Example],
    client: &dyn ModelClient,
    config: &EvalConfig,
    judge: Option<&dyn JudgeClient>,
) -> Vec<Evaluated> {
    examples
        .par_iter()
        .map(|example| {
            let sampled = rejection_sample(example, client, config);
            let output = sampled.chosen_record().or(sampled.records.last()).map_or(String::new(), |r| r.output.clone());
            Evaluated {
                record: run_tiers(example, &output, config, judge),
                attempts: sampled.attempts,
                errors: sampled.errors,
            }
        })
        .collect()
}
