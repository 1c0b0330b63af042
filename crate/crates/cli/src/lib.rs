//! Corpus tooling, evaluation reports and the pieces behind the `nyaya` binary.

pub mod corpus;
pub mod evaluate;
pub mod report;

pub use corpus::{
    corpus_stats, dedup, dedup_key, load_entries, read_jsonl, split_corpus, to_jsonl, write_jsonl, CorpusEntry,
    CorpusError, CorpusStats, Dropped, TrainingInstance,
};
pub use evaluate::{evaluate, load_examples, Evaluated, LoadError};
pub use report::{format_cell, ReportDocument, ReportError, ReportRow, SCHEMA_VERSION};

/// Process exit statuses.
pub mod exit {
    pub const OK: u8 = 0;
    /// Something was checked and came out negative: an invalid trace, a wrong answer.
    pub const NEGATIVE: u8 = 1;
    pub const USAGE: u8 = 2;
    pub const IO: u8 = 3;
    pub const INVALID_DATA: u8 = 4;
    /// Model client or solver failure.
    pub const EXTERNAL: u8 = 5;
}
