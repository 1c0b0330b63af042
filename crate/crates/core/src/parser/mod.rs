//! Markdown-with-frontmatter documents into [`NyayaTrace`] plus a failure list.

mod fields;
mod frontmatter;
mod sections;
mod taxonomy;
mod trace;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::model::{Frontmatter, NyayaTrace, Phase, SyllogismMember};

pub use fields::{extract_fields, is_label_line, split_subsections, Field, Subsection};
pub use frontmatter::{missing_fields, parse_frontmatter, REQUIRED_FIELDS};
pub use sections::{split_sections, Section, SplitBody};
pub use taxonomy::{classify_failures, merge_max, FailureCategory, ReportingMode, Taxonomy};
pub use trace::{parse_document, parse_trace, ParseOptions};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "code", rename_all = "snake_case")]
pub enum FailureCode {
    MissingSection {
        phase: Phase,
    },
    MissingRequiredField {
        phase: Phase,
        field: String,
    },
    InvalidDoubtType {
        key: String,
    },
    MissingSyllogism,
    /// `index` is 1-based.
    IncompleteSyllogism {
        index: usize,
        missing: Vec<SyllogismMember>,
    },
    SectionOrderViolation,
    FrontmatterMissingField {
        field: String,
    },
    MalformedFrontmatter,
    UnexpectedLeadingText,
}

impl FailureCode {
    pub fn key(&self) -> &'static str {
        match self {
            FailureCode::MissingSection { .. } => "missing_section",
            FailureCode::MissingRequiredField { .. } => "missing_required_field",
            FailureCode::InvalidDoubtType { .. } => "invalid_doubt_type",
            FailureCode::MissingSyllogism => "missing_syllogism",
            FailureCode::IncompleteSyllogism { .. } => "incomplete_syllogism",
            FailureCode::SectionOrderViolation => "section_order_violation",
            FailureCode::FrontmatterMissingField { .. } => "frontmatter_missing_field",
            FailureCode::MalformedFrontmatter => "malformed_frontmatter",
            FailureCode::UnexpectedLeadingText => "unexpected_leading_text",
        }
    }
}

impl fmt::Display for FailureCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FailureCode::MissingSection { phase } => write!(f, "Missing required section: {phase}"),
            FailureCode::MissingRequiredField { phase, field } => {
                write!(f, "Missing required field: {field} ({phase})")
            }
            FailureCode::InvalidDoubtType { key } => write!(f, "Invalid doubt type: {key}"),
            FailureCode::MissingSyllogism => f.write_str("Pancha Avayava missing syllogism"),
            FailureCode::IncompleteSyllogism { index, missing } => {
                let names: Vec<_> = missing.iter().map(|m| m.name()).collect();
                write!(f, "Syllogism {index} missing members: {}", names.join(", "))
            }
            FailureCode::SectionOrderViolation => f.write_str("Phase sections out of canonical order"),
            FailureCode::FrontmatterMissingField { field } => {
                write!(f, "Frontmatter missing required field: {field}")
            }
            FailureCode::MalformedFrontmatter => f.write_str("Malformed frontmatter"),
            FailureCode::UnexpectedLeadingText => {
                f.write_str("Text before the first phase header (response must start with ## Samshaya)")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ParseFailure {
    pub code: FailureCode,
    pub message: String,
}

impl ParseFailure {
    pub fn new(code: FailureCode) -> Self {
        let message = code.to_string();
        ParseFailure { code, message }
    }

    /// Short label in the wording of per-example error tables ("Missing Nirnaya Justification").
    pub fn table_label(&self) -> String {
        match &self.code {
            FailureCode::MissingSection { phase } => format!("Missing {phase}"),
            FailureCode::MissingRequiredField { phase, field } => format!("Missing {phase} {field}"),
            FailureCode::InvalidDoubtType { .. } => "Invalid doubt type".into(),
            FailureCode::MissingSyllogism | FailureCode::IncompleteSyllogism { .. } => {
                "Invalid Pancha Avayava structure".into()
            }
            _ => self.message.clone(),
        }
    }

    /// Snake-case label, finer than [`FailureCategory`] ("missing_tarka_analysis").
    pub fn fine_label(&self) -> String {
        match &self.code {
            FailureCode::MissingSection { phase } => format!("missing_{}", phase.key()),
            FailureCode::MissingRequiredField { phase, field } => {
                format!("missing_{}_{}", phase.key(), crate::model::normalize_enum_token(field))
            }
            other => other.key().to_string(),
        }
    }

    pub fn category(&self) -> FailureCategory {
        FailureCategory::of(&self.code)
    }
}

impl fmt::Display for ParseFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParsedDocument {
    pub frontmatter: Option<Frontmatter>,
    pub problem_statement: String,
    pub trace: NyayaTrace,
    pub failures: Vec<ParseFailure>,
}

impl ParsedDocument {
    pub fn parse_ok(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn primary_failure(&self) -> Option<&ParseFailure> {
        self.failures.first()
    }
}
