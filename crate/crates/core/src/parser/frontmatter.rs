use std::collections::BTreeMap;

use serde_yaml::Value;

use super::{FailureCode, ParseFailure};
use crate::model::{Difficulty, Frontmatter, MetaValue, ProblemType};

/// Keys a corpus document must carry.
pub const REQUIRED_FIELDS: [&str; 3] = ["id", "problem_type", "ground_truth"];

/// Split a leading `---` block off `text` and parse it.
///
/// Returns `(None, text)` when the document does not open with a delimiter line.
pub fn parse_frontmatter(text: &str) -> Result<(Option<Frontmatter>, &str), ParseFailure> {
    let Some(after_open) = strip_delimiter_line(text) else {
        return Ok((None, text));
    };

    let mut offset = 0;
    let mut close = None;
    for line in after_open.split_inclusive('\n') {
        if line.trim_end() == "---" {
            close = Some((offset, offset + line.len()));
            break;
        }
        offset += line.len();
    }
    let Some((yaml_end, body_start)) = close else {
        return Err(ParseFailure::new(FailureCode::MalformedFrontmatter));
    };

    let yaml = &after_open[..yaml_end];
    let value: Value = if yaml.trim().is_empty() {
        Value::Null
    } else {
        serde_yaml::from_str(yaml).map_err(|_| ParseFailure::new(FailureCode::MalformedFrontmatter))?
    };
    let fm = match value {
        Value::Null => Frontmatter::default(),
        Value::Mapping(map) => from_mapping(map),
        _ => return Err(ParseFailure::new(FailureCode::MalformedFrontmatter)),
    };
    Ok((Some(fm), &after_open[body_start..]))
}

/// One failure per mandatory key that is absent or blank.
pub fn missing_fields(fm: Option<&Frontmatter>) -> Vec<ParseFailure> {
    let present = |field: &str| match fm {
        None => false,
        Some(fm) => match field {
            "id" => fm.id.as_deref().is_some_and(|s| !s.trim().is_empty()),
            "problem_type" => fm.problem_type.as_ref().is_some_and(|p| !p.key().is_empty()),
            "ground_truth" => fm.ground_truth.as_deref().is_some_and(|s| !s.trim().is_empty()),
            _ => true,
        },
    };
    REQUIRED_FIELDS
        .iter()
        .filter(|f| !present(f))
        .map(|f| ParseFailure::new(FailureCode::FrontmatterMissingField { field: f.to_string() }))
        .collect()
}

fn strip_delimiter_line(text: &str) -> Option<&str> {
    let text = text.strip_prefix('\u{feff}').unwrap_or(text);
    let (first, rest) = match text.find('\n') {
        Some(i) => (&text[..i], &text[i + 1..]),
        None => (text, ""),
    };
    (first.trim_end() == "---").then_some(rest)
}

fn from_mapping(map: serde_yaml::Mapping) -> Frontmatter {
    let mut fm = Frontmatter::default();
    let mut nested_flags: BTreeMap<String, bool> = BTreeMap::new();

    for (k, v) in map {
        let key = scalar_string(&k);
        match key.as_str() {
            "id" => fm.id = Some(scalar_string(&v)),
            "ground_truth" => fm.ground_truth = Some(scalar_string(&v)),
            "problem_type" => fm.problem_type = Some(ProblemType::parse(&scalar_string(&v))),
            "difficulty" => match Difficulty::parse(&scalar_string(&v)) {
                Some(d) => fm.difficulty = Some(d),
                None => {
                    fm.metadata.insert(key, to_meta(&v));
                }
            },
            "z3_verifiable" => fm.z3_verifiable = as_bool(&v),
            "negative_example" => fm.negative_example = as_bool(&v),
            _ => {
                if let Value::Mapping(inner) = &v {
                    for (ik, iv) in inner {
                        let ik = scalar_string(ik);
                        if ik == "z3_verifiable" || ik == "negative_example" {
                            if let Some(b) = as_bool(iv) {
                                nested_flags.insert(ik, b);
                            }
                        }
                    }
                }
                fm.metadata.insert(key, to_meta(&v));
            }
        }
    }

    if fm.z3_verifiable.is_none() {
        fm.z3_verifiable = nested_flags.get("z3_verifiable").copied();
    }
    if fm.negative_example.is_none() {
        fm.negative_example = nested_flags.get("negative_example").copied();
    }
    fm
}

fn scalar_string(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::Bool(b) => b.to_string(),
        Value::Number(n) => n.to_string(),
        Value::String(s) => s.clone(),
        other => serde_yaml::to_string(other).unwrap_or_default().trim().to_string(),
    }
}

fn as_bool(v: &Value) -> Option<bool> {
    match v {
        Value::Bool(b) => Some(*b),
        Value::String(s) => match s.trim().to_ascii_lowercase().as_str() {
            "true" | "yes" => Some(true),
            "false" | "no" => Some(false),
            _ => None,
        },
        _ => None,
    }
}

fn to_meta(v: &Value) -> MetaValue {
    match v {
        Value::Sequence(items) => MetaValue::List(items.iter().map(scalar_string).collect()),
        Value::Mapping(map) => MetaValue::Map(map.iter().map(|(k, v)| (scalar_string(k), scalar_string(v))).collect()),
        other => MetaValue::Scalar(scalar_string(other)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TEMPLATE: &str = "---\nid: pramana-001\nproblem_type: constraint_satisfaction\ndifficulty: simple\nvariables: 3\nground_truth: \"Alice has the fish\"\nmetadata:\n  author: manual\n  z3_verifiable: true\n  stage: 0\n---\n\n# Problem\nbody\n";

    #[test]
    fn reads_template_fields() {
        let (fm, rest) = parse_frontmatter(TEMPLATE).unwrap();
        let fm = fm.unwrap();
        assert_eq!(fm.id.as_deref(), Some("pramana-001"));
        assert_eq!(fm.problem_type, Some(ProblemType::ConstraintSatisfaction));
        assert_eq!(fm.difficulty, Some(Difficulty::Simple));
        assert_eq!(fm.ground_truth.as_deref(), Some("Alice has the fish"));
        assert_eq!(fm.z3_verifiable, Some(true));
        assert_eq!(fm.metadata["variables"], MetaValue::Scalar("3".into()));
        assert!(matches!(fm.metadata["metadata"], MetaValue::Map(_)));
        assert!(rest.starts_with("\n# Problem"));
        assert!(missing_fields(Some(&fm)).is_empty());
    }

    #[test]
    fn absent_block_returns_text_unchanged() {
        let text = "## Samshaya\nstuff";
        let (fm, rest) = parse_frontmatter(text).unwrap();
        assert!(fm.is_none());
        assert_eq!(rest, text);
    }

    #[test]
    fn unclosed_block_is_malformed() {
        let err = parse_frontmatter("---\nid: x\n## Samshaya\n").unwrap_err();
        assert_eq!(err.code, FailureCode::MalformedFrontmatter);
    }

    #[test]
    fn missing_ground_truth_is_reported() {
        let (fm, _) = parse_frontmatter("---\nid: a\nproblem_type: boolean_sat\n---\n").unwrap();
        let missing = missing_fields(fm.as_ref());
        assert_eq!(
            missing.into_iter().map(|f| f.code).collect::<Vec<_>>(),
            vec![FailureCode::FrontmatterMissingField { field: "ground_truth".into() }]
        );
        assert_eq!(missing_fields(None).len(), 3);
    }

    #[test]
    fn top_level_flag_wins_over_nested() {
        let (fm, _) =
            parse_frontmatter("---\nnegative_example: false\nmetadata:\n  negative_example: true\n---\n").unwrap();
        assert_eq!(fm.unwrap().negative_example, Some(false));
    }
}
