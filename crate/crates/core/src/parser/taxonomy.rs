use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{FailureCode, ParseFailure};
use crate::model::Phase;

/// Coarse rows of the parse-error taxonomy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FailureCategory {
    MissingHetvabhasa,
    MissingNirnaya,
    MissingRequiredField,
    InvalidDoubtType,
    MissingPanchaAvayava,
    MissingSyllogism,
    Other,
}

impl FailureCategory {
    pub const ALL: [FailureCategory; 7] = [
        FailureCategory::MissingHetvabhasa,
        FailureCategory::MissingNirnaya,
        FailureCategory::MissingRequiredField,
        FailureCategory::InvalidDoubtType,
        FailureCategory::MissingPanchaAvayava,
        FailureCategory::MissingSyllogism,
        FailureCategory::Other,
    ];

    pub fn of(code: &FailureCode) -> FailureCategory {
        match code {
            FailureCode::MissingSection { phase: Phase::Hetvabhasa } => FailureCategory::MissingHetvabhasa,
            FailureCode::MissingSection { phase: Phase::Nirnaya } => FailureCategory::MissingNirnaya,
            FailureCode::MissingSection { phase: Phase::PanchaAvayava } => FailureCategory::MissingPanchaAvayava,
            FailureCode::MissingRequiredField { .. } => FailureCategory::MissingRequiredField,
            FailureCode::InvalidDoubtType { .. } => FailureCategory::InvalidDoubtType,
            FailureCode::MissingSyllogism | FailureCode::IncompleteSyllogism { .. } => {
                FailureCategory::MissingSyllogism
            }
            _ => FailureCategory::Other,
        }
    }

    pub fn key(self) -> &'static str {
        match self {
            FailureCategory::MissingHetvabhasa => "missing_hetvabhasa",
            FailureCategory::MissingNirnaya => "missing_nirnaya",
            FailureCategory::MissingRequiredField => "missing_required_field",
            FailureCategory::InvalidDoubtType => "invalid_doubt_type",
            FailureCategory::MissingPanchaAvayava => "missing_pancha_avayava",
            FailureCategory::MissingSyllogism => "missing_syllogism",
            FailureCategory::Other => "other",
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportingMode {
    /// Only each document's first failure counts.
    #[default]
    Primary,
    All,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Taxonomy {
    /// Every coarse category, zero-initialized.
    pub categories: BTreeMap<String, usize>,
    /// Fine labels such as `missing_nirnaya_justification`; only observed ones appear.
    pub labels: BTreeMap<String, usize>,
}

impl Taxonomy {
    pub fn empty() -> Self {
        Taxonomy {
            categories: FailureCategory::ALL.iter().map(|c| (c.key().to_string(), 0)).collect(),
            labels: BTreeMap::new(),
        }
    }

    pub fn total(&self) -> usize {
        self.categories.values().sum()
    }
}

/// Histogram over taxonomy rows. Each item is one document's failure list.
pub fn classify_failures<'a, I>(documents: I, mode: ReportingMode) -> Taxonomy
where
    I: IntoIterator<Item = &'a [ParseFailure]>,
{
    let mut t = Taxonomy::empty();
    for failures in documents {
        let counted = match mode {
            ReportingMode::Primary => &failures[..failures.len().min(1)],
            ReportingMode::All => failures,
        };
        for f in counted {
            *t.categories.entry(f.category().key().to_string()).or_default() += 1;
            *t.labels.entry(f.fine_label()).or_default() += 1;
        }
    }
    t
}

/// Per-key maximum of two histograms.
pub fn merge_max(a: &Taxonomy, b: &Taxonomy) -> Taxonomy {
    let merge = |x: &BTreeMap<String, usize>, y: &BTreeMap<String, usize>| {
        let mut out = x.clone();
        for (k, v) in y {
            let e = out.entry(k.clone()).or_default();
            *e = (*e).max(*v);
        }
        out
    };
    Taxonomy { categories: merge(&a.categories, &b.categories), labels: merge(&a.labels, &b.labels) }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(code: FailureCode) -> ParseFailure {
        ParseFailure::new(code)
    }

    #[test]
    fn empty_input_is_all_zero() {
        let t = classify_failures(std::iter::empty(), ReportingMode::All);
        assert_eq!(t.categories.len(), 7);
        assert_eq!(t.total(), 0);
    }

    #[test]
    fn primary_counts_first_only() {
        let doc = vec![
            f(FailureCode::MissingSection { phase: Phase::Hetvabhasa }),
            f(FailureCode::MissingSection { phase: Phase::Nirnaya }),
        ];
        let p = classify_failures([doc.as_slice()], ReportingMode::Primary);
        assert_eq!(p.categories["missing_hetvabhasa"], 1);
        assert_eq!(p.categories["missing_nirnaya"], 0);
        let a = classify_failures([doc.as_slice()], ReportingMode::All);
        assert_eq!(a.categories["missing_nirnaya"], 1);
    }

    #[test]
    fn merge_takes_maximum() {
        let one = vec![f(FailureCode::MissingSyllogism)];
        let two = vec![f(FailureCode::InvalidDoubtType { key: "x".into() })];
        let a = classify_failures([one.as_slice(), one.as_slice()], ReportingMode::Primary);
        let b = classify_failures([one.as_slice(), two.as_slice()], ReportingMode::Primary);
        let m = merge_max(&a, &b);
        assert_eq!(m.labels["missing_syllogism"], 2);
        assert_eq!(m.labels["invalid_doubt_type"], 1);
    }
}
