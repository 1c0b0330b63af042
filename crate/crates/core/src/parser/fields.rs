//! Bold `**Label**:` fields and `### ` subsections inside a phase body.

use std::sync::LazyLock;

use regex::Regex;

use super::sections::{fenced_lines, header_name};
use crate::model::{is_hr, normalize_enum_token};

// `**Label**:`, `**Label:**`, `**Label (gloss)**:`
static LABEL: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"\*\*\s*([A-Za-z][A-Za-z ]*?)\s*(?:\([^)*]*\))?\s*(?::\s*\*\*|\*\*\s*:)").unwrap());

static BULLET: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"^\s*(?:[-*+]\s+)?").unwrap());

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Field {
    pub key: String,
    pub value: String,
}

/// Labels found on a line, as (key, label-start, value-start).
fn labels_on(line: &str) -> Vec<(String, usize, usize)> {
    let lead = BULLET.find(line).map_or(0, |m| m.end());
    let mut out = Vec::new();
    for caps in LABEL.captures_iter(line) {
        let whole = caps.get(0).unwrap();
        if out.is_empty() && whole.start() != lead {
            break;
        }
        out.push((normalize_enum_token(&caps[1]), whole.start(), whole.end()));
    }
    out
}

pub fn is_label_line(line: &str) -> bool {
    !labels_on(line).is_empty()
}

/// Extract labelled fields. A value continues over following lines until a blank line,
/// another label, a header, a horizontal rule or a fence.
pub fn extract_fields(body: &str) -> Vec<Field> {
    let mut fields: Vec<Field> = Vec::new();
    let mut open = false;

    for (line, fenced) in fenced_lines(body) {
        let t = line.trim();
        if fenced || t.is_empty() || t.starts_with('#') || is_hr(t) {
            open = false;
            continue;
        }
        let labels = labels_on(line);
        if labels.is_empty() {
            if open {
                let last = fields.last_mut().unwrap();
                if !last.value.is_empty() {
                    last.value.push(' ');
                }
                last.value.push_str(t);
            }
            continue;
        }
        for (i, (key, _, value_start)) in labels.iter().enumerate() {
            let value_end = labels.get(i + 1).map_or(line.len(), |next| next.1);
            fields.push(Field { key: key.clone(), value: line[*value_start..value_end].trim().to_string() });
        }
        open = true;
    }
    fields
}

/// First non-empty value for any of `keys`, in key priority order.
pub fn first_value(fields: &[Field], keys: &[&str]) -> Option<String> {
    keys.iter().find_map(|k| fields.iter().find(|f| f.key == *k && !f.value.is_empty()).map(|f| f.value.clone()))
}

/// Whether any of `keys` appears as a label, even with an empty value.
pub fn has_label(fields: &[Field], keys: &[&str]) -> bool {
    fields.iter().any(|f| keys.contains(&f.key.as_str()))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subsection {
    pub header: String,
    pub name: String,
    pub body: String,
}

/// Split on `### ` headers outside fences. Text before the first one is dropped.
pub fn split_subsections(body: &str) -> Vec<Subsection> {
    let mut out: Vec<Subsection> = Vec::new();
    let mut lines: Vec<&str> = Vec::new();
    let flush = |out: &mut Vec<Subsection>, lines: &mut Vec<&str>| {
        if let Some(last) = out.last_mut() {
            last.body = lines.join("\n");
        }
        lines.clear();
    };
    for (line, fenced) in fenced_lines(body) {
        match (!fenced).then(|| line.strip_prefix("### ")).flatten() {
            Some(h) => {
                flush(&mut out, &mut lines);
                let header = h.trim().to_string();
                out.push(Subsection { name: header_name(&header).to_string(), header, body: String::new() });
            }
            None => lines.push(line),
        }
    }
    flush(&mut out, &mut lines);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn label_forms() {
        let f = extract_fields(
            "**Doubt Type**: Vipratipatti (x)\n**Justification:** because\n- **Pratijna (Thesis)**: claim",
        );
        let keys: Vec<_> = f.iter().map(|f| f.key.as_str()).collect();
        assert_eq!(keys, ["doubt_type", "justification", "pratijna"]);
        assert_eq!(f[0].value, "Vipratipatti (x)");
        assert_eq!(f[1].value, "because");
    }

    #[test]
    fn continuation_joins_wrapped_lines() {
        let f = extract_fields("**Final Answer**: Alice has the fish, Bob has the cat, and Carol \nhas the dog.\n**Justification**: ok\n\nstray");
        assert_eq!(f[0].value, "Alice has the fish, Bob has the cat, and Carol has the dog.");
        assert_eq!(f[1].value, "ok");
    }

    #[test]
    fn several_labels_on_one_line() {
        let f = extract_fields("**Pratijna**: claim  **Hetu**: evidence");
        assert_eq!(f.len(), 2);
        assert_eq!(f[0].value, "claim");
        assert_eq!(f[1].value, "evidence");
    }

    #[test]
    fn mid_sentence_bold_is_not_a_label() {
        assert!(!is_label_line("The **key**: point is this"));
        assert!(extract_fields("so **Note**: x").is_empty());
    }

    #[test]
    fn subsections_split() {
        let s = split_subsections("intro\n### Pratyaksha (Direct)\n- a\n### Anumana\n- b\n");
        assert_eq!(s.len(), 2);
        assert_eq!(s[0].name, "Pratyaksha");
        assert_eq!(s[0].body, "- a");
    }
}
