//! Corpus Markdown to instruction-tuning JSONL, plus split, dedup and distribution counts.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use nyaya_core::model::{Difficulty, Frontmatter, ProblemType};
use nyaya_core::parser::{parse_document, ParseOptions};
use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::SplitMix64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrainingInstance {
    pub instruction: String,
    pub input: String,
    pub output: String,
}

/// An instance plus where it came from. JSONL inputs carry no id, so theirs is a content hash.
#[derive(Debug, Clone, PartialEq)]
pub struct CorpusEntry {
    pub id: String,
    pub frontmatter: Option<Frontmatter>,
    pub instance: TrainingInstance,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FileProblem {
    pub path: PathBuf,
    pub codes: Vec<String>,
}

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{} invalid corpus file(s):\n{}", .0.len(), list(.0))]
    Invalid(Vec<FileProblem>),
    #[error("line {line}: {message}")]
    Json { line: usize, message: String },
    #[error("duplicate id `{0}`")]
    DuplicateId(String),
    #[error("cannot split an empty corpus")]
    Empty,
    #[error("ratio {0} outside [0, 1]")]
    Ratio(f64),
}

fn list(problems: &[FileProblem]) -> String {
    problems.iter().map(|p| format!("  {}: {}", p.path.display(), p.codes.join(", "))).collect::<Vec<_>>().join("\n")
}

/// Markdown files directly under `dir`, sorted by path.
pub fn markdown_files(dir: &Path) -> Result<Vec<PathBuf>, CorpusError> {
    let io = |source| CorpusError::Io { path: dir.to_path_buf(), source };
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(io)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|x| x == "md"))
        .collect();
    files.sort();
    Ok(files)
}

fn trace_start(text: &str) -> Option<usize> {
    text.match_indices("## Samshaya").map(|(i, _)| i).find(|i| *i == 0 || text.as_bytes()[i - 1] == b'\n')
}

/// Parse one corpus document. Any parse failure rejects the file.
pub fn convert_document(text: &str) -> Result<CorpusEntry, Vec<String>> {
    let text = text.replace("\r\n", "\n");
    let doc = parse_document(&text, &ParseOptions { corpus_mode: true, require_leading_samshaya: false });
    if !doc.parse_ok() {
        return Err(doc.failures.iter().map(|f| f.fine_label()).collect());
    }
    let start = trace_start(&text).ok_or_else(|| vec!["missing_samshaya".to_string()])?;
    let fm = doc.frontmatter.expect("corpus mode requires frontmatter");
    Ok(CorpusEntry {
        id: fm.id.clone().unwrap_or_default(),
        instance: TrainingInstance {
            instruction: doc.problem_statement,
            input: String::new(),
            output: text[start..].to_string(),
        },
        frontmatter: Some(fm),
    })
}

/// Every `.md` file in `dir`, sorted by id. Fails with the full list of bad files.
pub fn to_jsonl(dir: &Path) -> Result<Vec<CorpusEntry>, CorpusError> {
    let files = markdown_files(dir)?;
    let results: Vec<(PathBuf, Result<CorpusEntry, CorpusError>)> = files
        .into_par_iter()
        .map(|path| {
            let r = fs::read_to_string(&path)
                .map_err(|source| CorpusError::Io { path: path.clone(), source })
                .and_then(|t| {
                    convert_document(&t)
                        .map_err(|codes| CorpusError::Invalid(vec![FileProblem { path: path.clone(), codes }]))
                });
            (path, r)
        })
        .collect();
    let mut entries = Vec::new();
    let mut bad = Vec::new();
    for (_, r) in results {
        match r {
            Ok(e) => entries.push(e),
            Err(CorpusError::Invalid(mut p)) => bad.append(&mut p),
            Err(e) => return Err(e),
        }
    }
    if !bad.is_empty() {
        return Err(CorpusError::Invalid(bad));
    }
    entries.sort_by(|a, b| a.id.cmp(&b.id));
    if let Some(w) = entries.windows(2).find(|w| w[0].id == w[1].id) {
        return Err(CorpusError::DuplicateId(w[0].id.clone()));
    }
    Ok(entries)
}

pub fn write_jsonl(entries: &[CorpusEntry]) -> String {
    let mut s = String::new();
    for e in entries {
        s.push_str(&serde_json::to_string(&e.instance).expect("plain strings serialize"));
        s.push('\n');
    }
    s
}

fn sha256_hex(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}

pub fn read_jsonl(text: &str) -> Result<Vec<CorpusEntry>, CorpusError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let instance: TrainingInstance =
            serde_json::from_str(line).map_err(|e| CorpusError::Json { line: i + 1, message: e.to_string() })?;
        out.push(CorpusEntry { id: sha256_hex(line.as_bytes()), frontmatter: None, instance });
    }
    out.sort_by(|a, b| a.id.cmp(&b.id));
    Ok(out)
}

/// A corpus directory or a JSONL file.
pub fn load_entries(path: &Path) -> Result<Vec<CorpusEntry>, CorpusError> {
    if path.is_dir() {
        return to_jsonl(path);
    }
    let text = fs::read_to_string(path).map_err(|source| CorpusError::Io { path: path.to_path_buf(), source })?;
    read_jsonl(&text)
}

/// Seeded Fisher-Yates over id-sorted input; `val = round((1 - ratio) * n)`.
pub fn split_corpus(
    entries: &[CorpusEntry],
    ratio: f64,
    seed: u64,
) -> Result<(Vec<CorpusEntry>, Vec<CorpusEntry>), CorpusError> {
    if entries.is_empty() {
        return Err(CorpusError::Empty);
    }
    if !(0.0..=1.0).contains(&ratio) {
        return Err(CorpusError::Ratio(ratio));
    }
    let mut items: Vec<CorpusEntry> = entries.to_vec();
    items.sort_by(|a, b| a.id.cmp(&b.id));
    let mut rng = SplitMix64::seed_from_u64(seed);
    for i in (1..items.len()).rev() {
        let j = (rng.next_u64() % (i as u64 + 1)) as usize;
        items.swap(i, j);
    }
    let n = items.len();
    let val = (((1.0 - ratio) * n as f64).round() as usize).min(n);
    let val_items = items.split_off(n - val);
    Ok((items, val_items))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dropped {
    pub id: String,
    pub kept_id: String,
    pub hash: String,
}

impl fmt::Display for Dropped {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: duplicate of {} (sha256 {})", self.id, self.kept_id, &self.hash[..12])
    }
}

fn squash(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// SHA-256 of whitespace-normalized instruction, a newline, and whitespace-normalized output.
pub fn dedup_key(instance: &TrainingInstance) -> String {
    sha256_hex(format!("{}\n{}", squash(&instance.instruction), squash(&instance.output)).as_bytes())
}

/// Keeps the first occurrence by id.
pub fn dedup(entries: &[CorpusEntry]) -> (Vec<CorpusEntry>, Vec<Dropped>) {
    let mut sorted: Vec<&CorpusEntry> = entries.iter().collect();
    sorted.sort_by(|a, b| a.id.cmp(&b.id));
    let mut seen: HashMap<String, String> = HashMap::new();
    let mut kept = Vec::new();
    let mut dropped = Vec::new();
    for e in sorted {
        let hash = dedup_key(&e.instance);
        match seen.get(&hash) {
            Some(first) => dropped.push(Dropped { id: e.id.clone(), kept_id: first.clone(), hash }),
            None => {
                seen.insert(hash, e.id.clone());
                kept.push(e.clone());
            }
        }
    }
    (kept, dropped)
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusStats {
    pub total: usize,
    pub by_problem_type: BTreeMap<String, usize>,
    pub by_difficulty: BTreeMap<String, usize>,
    pub negative_examples: usize,
    pub z3_verifiable: usize,
}

pub fn corpus_stats(entries: &[CorpusEntry]) -> CorpusStats {
    let mut s = CorpusStats {
        by_problem_type: ProblemType::KNOWN.iter().map(|p| (p.key().to_string(), 0)).collect(),
        by_difficulty: Difficulty::ALL.iter().map(|d| (d.key().to_string(), 0)).collect(),
        ..Default::default()
    };
    for e in entries {
        s.total += 1;
        let Some(fm) = &e.frontmatter else { continue };
        if let Some(p) = &fm.problem_type {
            *s.by_problem_type.entry(p.key().to_string()).or_default() += 1;
        }
        if let Some(d) = fm.difficulty {
            *s.by_difficulty.entry(d.key().to_string()).or_default() += 1;
        }
        s.negative_examples += usize::from(fm.negative_example == Some(true));
        s.z3_verifiable += usize::from(fm.z3_verifiable == Some(true));
    }
    s
}
