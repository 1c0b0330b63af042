use std::sync::LazyLock;

use regex::Regex;

use super::fields::{extract_fields, first_value, has_label, split_subsections, Field};
use super::frontmatter::{missing_fields, parse_frontmatter};
use super::sections::{split_sections, Section};
use super::{FailureCode, ParseFailure, ParsedDocument};
use crate::model::*;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ParseOptions {
    /// Require id, problem_type and ground_truth in the frontmatter.
    pub corpus_mode: bool,
    /// Reject any text before the first phase header.
    pub require_leading_samshaya: bool,
}

pub fn parse_trace(text: &str) -> ParsedDocument {
    parse_document(text, &ParseOptions::default())
}

pub fn parse_document(text: &str, opts: &ParseOptions) -> ParsedDocument {
    let text = text.replace("\r\n", "\n");
    let mut failures = Vec::new();

    let (frontmatter, body) = match parse_frontmatter(&text) {
        Ok(ok) => ok,
        Err(f) => {
            failures.push(f);
            let rest = text.split_once('\n').map_or("", |(_, r)| r);
            (None, rest)
        }
    };
    if opts.corpus_mode {
        failures.extend(missing_fields(frontmatter.as_ref()));
    }

    let split = split_sections(body);
    if opts.require_leading_samshaya && !split.leading_text.is_empty() {
        failures.push(ParseFailure::new(FailureCode::UnexpectedLeadingText));
    }

    let mut trace = NyayaTrace { leading_text: split.leading_text.clone(), ..NyayaTrace::default() };
    let mut first: [Option<&Section>; 6] = [None; 6];
    for s in &split.sections {
        if let Some(p) = s.phase {
            if first[p.index()].is_none() {
                first[p.index()] = Some(s);
                trace.section_order.push(p);
            }
        }
    }
    if trace.section_order.windows(2).any(|w| w[0] > w[1]) {
        failures.push(ParseFailure::new(FailureCode::SectionOrderViolation));
    }

    for phase in Phase::ALL {
        let Some(section) = first[phase.index()] else {
            failures.push(ParseFailure::new(FailureCode::MissingSection { phase }));
            continue;
        };
        trace.phase_presence[phase.index()] = true;
        let body = section.body.as_str();
        match phase {
            Phase::Samshaya => trace.samshaya = Some(samshaya(body, &mut failures)),
            Phase::Pramana => trace.pramana = Some(pramana(body)),
            Phase::PanchaAvayava => trace.pancha_avayava = Some(pancha_avayava(body, &mut failures)),
            Phase::Tarka => trace.tarka = Some(tarka(body, &mut failures)),
            Phase::Hetvabhasa => trace.hetvabhasa = Some(hetvabhasa(body)),
            Phase::Nirnaya => trace.nirnaya = Some(nirnaya(body, &mut failures)),
        }
    }

    ParsedDocument { frontmatter, problem_statement: split.problem_statement, trace, failures }
}

fn missing_field(phase: Phase, field: &str) -> ParseFailure {
    ParseFailure::new(FailureCode::MissingRequiredField { phase, field: field.to_string() })
}

fn samshaya(body: &str, failures: &mut Vec<ParseFailure>) -> SamshayaPhase {
    let fields = extract_fields(body);
    let doubt_type =
        first_value(&fields, &["doubt_type"]).map(|v| DoubtClass::from_surface(&v)).filter(|d| !d.key().is_empty());
    let justification = first_value(&fields, &["justification"]);

    match &doubt_type {
        None => failures.push(missing_field(Phase::Samshaya, "Doubt Type")),
        Some(DoubtClass::Invalid(key)) => {
            failures.push(ParseFailure::new(FailureCode::InvalidDoubtType { key: key.clone() }))
        }
        Some(DoubtClass::Canonical(_)) => {}
    }
    if justification.is_none() {
        failures.push(missing_field(Phase::Samshaya, "Justification"));
    }
    SamshayaPhase { doubt_type, justification }
}

static SUBTYPE: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"(?i)\btype\s*:\s*([A-Za-z_]+)").unwrap());

fn pramana(body: &str) -> PramanaPhase {
    let mut phase = PramanaPhase::default();
    for sub in split_subsections(body) {
        let Some(kind) = PramanaKind::from_key(&normalize_enum_token(&sub.name)) else {
            continue;
        };
        if phase.sources.contains_key(&kind) {
            continue;
        }
        let text = sub.body.trim().to_string();
        let items = bullet_items(&text)
            .into_iter()
            .map(|t| {
                let subtype = SUBTYPE
                    .captures(&t)
                    .and_then(|c| AnumanaSubtype::from_key(&normalize_enum_token(&c[1])))
                    .or_else(|| {
                        let first = t.split_whitespace().next().unwrap_or("");
                        AnumanaSubtype::from_key(&normalize_enum_token(first))
                    });
                PramanaItem { text: t, subtype }
            })
            .collect();
        phase.sources.insert(kind, PramanaBlock { text, items });
    }
    phase
}

fn bullet_items(text: &str) -> Vec<String> {
    let mut items: Vec<String> = Vec::new();
    for line in text.lines() {
        let t = line.trim();
        if t.is_empty() || t.starts_with("```") || is_hr(t) {
            continue;
        }
        let bullet = t.strip_prefix("- ").or_else(|| t.strip_prefix("* "));
        match bullet {
            Some(rest) => items.push(rest.trim().to_string()),
            None if line.starts_with(char::is_whitespace) && !items.is_empty() => {
                let last = items.last_mut().unwrap();
                last.push(' ');
                last.push_str(t);
            }
            None => {}
        }
    }
    items
}

fn pancha_avayava(body: &str, failures: &mut Vec<ParseFailure>) -> PanchaAvayavaPhase {
    let mut phase = PanchaAvayavaPhase::default();
    for sub in split_subsections(body) {
        let head = sub.header.split(':').next().unwrap_or("");
        if !normalize_enum_token(head).starts_with("syllogism") {
            continue;
        }
        let topic = sub.header.split_once(':').map(|(_, t)| t.trim().to_string()).unwrap_or_default();
        let fields = extract_fields(&sub.body);
        let mut s = Syllogism { topic, ..Syllogism::default() };
        for m in SyllogismMember::ALL {
            if let Some(f) = fields.iter().find(|f| f.key == m.key()) {
                s.set_member(m, f.value.clone());
            }
        }
        phase.syllogisms.push(s);
    }

    if phase.syllogisms.is_empty() {
        failures.push(ParseFailure::new(FailureCode::MissingSyllogism));
    }
    for (i, s) in phase.syllogisms.iter().enumerate() {
        let missing = s.missing_members();
        if !missing.is_empty() {
            failures.push(ParseFailure::new(FailureCode::IncompleteSyllogism { index: i + 1, missing }));
        }
    }
    phase
}

const FOUR_FIELDS: [&str; 4] = ["hypothesis", "consequence", "analysis", "resolution"];

fn tarka(body: &str, failures: &mut Vec<ParseFailure>) -> TarkaPhase {
    let fields = extract_fields(body);
    let get = |k: &str| first_value(&fields, &[k]);
    let single = has_label(&fields, &["test"]) && !has_label(&fields, &FOUR_FIELDS);
    let t = TarkaPhase {
        form: if single { TarkaForm::SingleTest } else { TarkaForm::FourField },
        hypothesis: get("hypothesis"),
        consequence: get("consequence"),
        analysis: get("analysis"),
        resolution: get("resolution"),
        test: get("test"),
    };
    match t.form {
        TarkaForm::FourField if t.analysis.is_none() => failures.push(missing_field(Phase::Tarka, "Analysis")),
        TarkaForm::SingleTest if t.test.is_none() => failures.push(missing_field(Phase::Tarka, "Test")),
        _ => {}
    }
    t
}

static CHECK_FOR: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"(?i)^check\b(?:\s+for\b)?\s*:?\s*(.*)$").unwrap());
static KEY_VALUE: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"^([A-Za-z][A-Za-z _-]*?)\s*:\s*(.*)$").unwrap());

fn hetvabhasa(body: &str) -> HetvabhasaPhase {
    let mut phase = HetvabhasaPhase::default();
    for line in body.lines() {
        let mut t = line.trim().replace(['*', '`'], "");
        if let Some(rest) = t.trim_start().strip_prefix("- ") {
            t = rest.to_string();
        }
        let t = t.trim();
        if t.is_empty() || is_hr(t) {
            continue;
        }
        let rest = CHECK_FOR.captures(t).map(|c| c[1].to_string()).unwrap_or_else(|| t.to_string());

        if rest.contains('/') && !rest.contains(':') {
            let names: Vec<_> = rest.split('/').map(normalize_enum_token).filter(|n| !n.is_empty()).collect();
            let kinds: Vec<_> = names.iter().filter_map(|n| FallacyKind::from_key(n)).collect();
            if !kinds.is_empty() && kinds.len() == names.len() {
                for k in kinds {
                    phase.checks.entry(k).or_default();
                }
            }
            continue;
        }
        let Some(c) = KEY_VALUE.captures(&rest) else {
            continue;
        };
        let key = normalize_enum_token(&c[1]);
        let value = c[2].trim().trim_matches('"').to_string();
        if let Some(kind) = FallacyKind::from_key(&key) {
            phase.checks.entry(kind).or_insert(value);
        } else if key == "reasoning" && phase.reasoning.is_none() {
            phase.reasoning = Some(value);
        }
    }
    phase
}

fn nirnaya(body: &str, failures: &mut Vec<ParseFailure>) -> NirnayaPhase {
    let fields: Vec<Field> = extract_fields(body);
    let status = first_value(&fields, &["status"]).and_then(|s| {
        let k = normalize_enum_token(&s);
        if k.starts_with("definitive") {
            Some(NirnayaStatus::DefinitiveKnowledge)
        } else if k.starts_with("hypothesis") {
            Some(NirnayaStatus::HypothesisRequiringVerification)
        } else {
            None
        }
    });
    let confidence = first_value(&fields, &["confidence"]).and_then(|c| {
        match normalize_enum_token(&c).split('_').next().unwrap_or("") {
            "high" => Some(Confidence::High),
            "medium" => Some(Confidence::Medium),
            "low" => Some(Confidence::Low),
            _ => None,
        }
    });
    let n = NirnayaPhase {
        status,
        final_answer: first_value(&fields, &["final_answer", "answer"]),
        justification: first_value(&fields, &["justification"]),
        confidence,
    };
    if n.final_answer.is_none() {
        failures.push(missing_field(Phase::Nirnaya, "Final Answer"));
    }
    if n.justification.is_none() {
        failures.push(missing_field(Phase::Nirnaya, "Justification"));
    }
    n
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINI: &str = "## Samshaya\n**Doubt Type**: Vipratipatti\n**Justification**: j\n\n## Pramana\n### Pratyaksha\n- a\n### Anumana\n- type: purvavat\n  premise: x\n### Upamana\n- c\n### Shabda\n- None\n\n## Pancha Avayava\n### Syllogism 1: T\n**Pratijna**: p\n**Hetu**: h\n**Udaharana**: Wherever x, there y.\n**Upanaya**: u\n**Nigamana**: n\n\n## Tarka\n**Hypothesis**: Suppose not n.\n**Consequence**: c\n**Analysis**: a\n**Resolution**: r\n\n## Hetvabhasa\nCheck for Savyabhichara: No\nCheck for Viruddha: No\nCheck for Asiddha: No\nCheck for Satpratipaksha: No\nCheck for Badhita: No\n\n## Nirnaya\n**Status**: Definitive Knowledge\n**Final Answer**: n\n**Justification**: j\n**Confidence**: High - certain\n";

    #[test]
    fn mini_trace_parses() {
        let doc = parse_trace(MINI);
        assert!(doc.parse_ok(), "{:?}", doc.failures);
        assert_eq!(doc.trace.phase_presence, [true; 6]);
        let p = doc.trace.pramana.as_ref().unwrap();
        assert_eq!(p.sources[&PramanaKind::Anumana].items[0].subtype, Some(AnumanaSubtype::Purvavat));
        assert!(p.has_kind(PramanaKind::Shabda));
        let n = doc.trace.nirnaya.as_ref().unwrap();
        assert_eq!(n.status, Some(NirnayaStatus::DefinitiveKnowledge));
        assert_eq!(n.confidence, Some(Confidence::High));
        assert_eq!(doc.trace.hetvabhasa.as_ref().unwrap().coverage(FallacySelector::Either), 5);
    }

    #[test]
    fn yaml_and_slash_fallacy_forms() {
        let h = hetvabhasa("```yaml\nfallacy_checks:\n  savyabhichara: none_detected\n  viruddha: none_detected\n  prakaranasama: none_detected\n  sadhyasama: none_detected\n  kalaatita: none_detected\n\nreasoning: \"fine\"\n```");
        assert_eq!(h.checked_count(FallacySet::Canonical), 5);
        assert_eq!(h.reasoning.as_deref(), Some("fine"));
        let h = hetvabhasa("Check: Savyabhichara / Viruddha / Prakaranasama\n       / Sadhyasama / Kalaatita");
        assert_eq!(h.checked_count(FallacySet::Canonical), 5);
    }

    #[test]
    fn single_test_tarka() {
        let mut f = Vec::new();
        let t = tarka("**Test**: Assume the opposite. Contradiction.", &mut f);
        assert_eq!(t.form, TarkaForm::SingleTest);
        assert!(f.is_empty());
        let t = tarka("**Hypothesis**: Suppose not.\n**Resolution**: done", &mut f);
        assert_eq!(t.form, TarkaForm::FourField);
        assert_eq!(f.len(), 1);
        assert_eq!(f[0].fine_label(), "missing_tarka_analysis");
    }

    #[test]
    fn answer_label_is_accepted() {
        let mut f = Vec::new();
        let n = nirnaya("**Answer**: x\n**Justification**: y", &mut f);
        assert!(f.is_empty());
        assert_eq!(n.final_answer.as_deref(), Some("x"));
    }

    #[test]
    fn order_violation_and_strict_leading_text() {
        let swapped =
            MINI.replace("## Tarka", "## TMP").replace("## Hetvabhasa", "## Tarka").replace("## TMP", "## Hetvabhasa");
        let doc = parse_trace(&swapped);
        assert!(doc.failures.iter().any(|f| f.code == FailureCode::SectionOrderViolation));

        let with_preamble = format!("Let me think.\n\n{MINI}");
        assert!(parse_trace(&with_preamble).parse_ok());
        let strict = ParseOptions { require_leading_samshaya: true, ..Default::default() };
        let doc = parse_document(&with_preamble, &strict);
        assert_eq!(doc.failures[0].code, FailureCode::UnexpectedLeadingText);
    }

    #[test]
    fn crlf_is_tolerated() {
        assert!(parse_trace(&MINI.replace('\n', "\r\n")).parse_ok());
    }
}
