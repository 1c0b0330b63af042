use serde::{Deserialize, Serialize};

use crate::model::{is_hr, normalize_enum_token, Phase};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Section {
    /// Header text with the `## ` marker removed.
    pub header: String,
    /// Header text before any parenthetical gloss.
    pub name: String,
    pub phase: Option<Phase>,
    pub body: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitBody {
    pub problem_statement: String,
    pub leading_text: String,
    pub sections: Vec<Section>,
}

pub(crate) fn is_fence(line: &str) -> bool {
    let t = line.trim_start();
    t.starts_with("```") || t.starts_with("~~~")
}

/// Iterate lines paired with whether each sits inside a fenced block.
/// Fence delimiter lines themselves report `true`.
pub(crate) fn fenced_lines(text: &str) -> impl Iterator<Item = (&str, bool)> {
    let mut inside = false;
    text.lines().map(move |line| {
        if is_fence(line) {
            inside = !inside;
            (line, true)
        } else {
            (line, inside)
        }
    })
}

pub(crate) fn header_name(header: &str) -> &str {
    let cut = header.find('(').unwrap_or(header.len());
    header[..cut].trim()
}

/// Split a document body on `## ` headers.
pub fn split_sections(text: &str) -> SplitBody {
    let mut out = SplitBody::default();
    let mut pre: Vec<&str> = Vec::new();
    let mut current: Option<(String, Vec<&str>)> = None;

    for (line, fenced) in fenced_lines(text) {
        let header = (!fenced).then(|| line.strip_prefix("## ")).flatten();
        match header {
            Some(h) => {
                if let Some((hdr, body)) = current.take() {
                    out.sections.push(make_section(hdr, &body));
                }
                current = Some((h.trim().to_string(), Vec::new()));
            }
            None => match current.as_mut() {
                Some((_, body)) => body.push(line),
                None => pre.push(line),
            },
        }
    }
    if let Some((hdr, body)) = current.take() {
        out.sections.push(make_section(hdr, &body));
    }

    let problem_at = pre
        .iter()
        .position(|l| l.strip_prefix("# ").is_some_and(|h| normalize_enum_token(header_name(h)) == "problem"));
    let (leading, problem): (&[&str], &[&str]) = match problem_at {
        Some(i) => (&pre[..i], &pre[i + 1..]),
        None => (&pre[..], &[]),
    };
    out.leading_text = join_trimmed(leading.iter().copied().filter(|l| !is_hr(l)));
    out.problem_statement = trim_hr_edges(problem);
    out
}

fn make_section(header: String, body: &[&str]) -> Section {
    let name = header_name(&header).to_string();
    let phase = Phase::from_key(&normalize_enum_token(&name));
    Section { header, name, phase, body: body.join("\n") }
}

fn join_trimmed<'a>(lines: impl Iterator<Item = &'a str>) -> String {
    lines.collect::<Vec<_>>().join("\n").trim().to_string()
}

fn trim_hr_edges(lines: &[&str]) -> String {
    let keep = |l: &&str| !l.trim().is_empty() && !is_hr(l);
    let start = lines.iter().position(keep).unwrap_or(lines.len());
    let end = lines.iter().rposition(keep).map_or(start, |e| e + 1);
    lines[start..end].join("\n")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gloss_variants_share_a_name() {
        let body = "## Pramana (Sources of Knowledge)\nx\n## Pramana (Evidence Sources)\ny\n";
        let split = split_sections(body);
        assert_eq!(split.sections.len(), 2);
        assert!(split.sections.iter().all(|s| s.name == "Pramana" && s.phase == Some(Phase::Pramana)));
    }

    #[test]
    fn no_headers_means_all_leading() {
        let split = split_sections("just some text\n---\nmore");
        assert!(split.sections.is_empty());
        assert_eq!(split.leading_text, "just some text\nmore");
    }

    #[test]
    fn problem_block_is_separated() {
        let split = split_sections("# Problem\n\nWho has the cat?\n\n---\n\n## Samshaya\nbody");
        assert_eq!(split.problem_statement, "Who has the cat?");
        assert_eq!(split.leading_text, "");
        assert_eq!(split.sections[0].phase, Some(Phase::Samshaya));
    }

    #[test]
    fn headers_inside_fences_are_ignored() {
        let split = split_sections("## Tarka\n```\n## Nirnaya\n```\n");
        assert_eq!(split.sections.len(), 1);
        assert!(split.sections[0].body.contains("## Nirnaya"));
    }
}
