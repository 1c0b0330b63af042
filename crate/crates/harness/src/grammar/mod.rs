//! GBNF grammar for six-phase traces, and an acceptor used to check it against the validator.

mod gbnf;

use std::fmt::Write;

use nyaya_core::model::{DoubtType, FallacySet, Phase, PramanaKind, SyllogismMember};
use nyaya_core::validator::{RuleMode, ValidationConfig};
use regex::Regex;
use thiserror::Error;

pub use gbnf::Gbnf;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GrammarError {
    #[error("grammar syntax error on line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("rule `{0}` defined twice")]
    DuplicateRule(String),
    #[error("rule `{0}` is not defined")]
    UndefinedRule(String),
    #[error("rule `{0}` is recursive")]
    Recursive(String),
    #[error("grammar too large for the acceptor: {0}")]
    Regex(String),
}

fn lit(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

fn rule_name(s: &str) -> String {
    s.to_ascii_lowercase().replace([' ', '_'], "-")
}

/// A bold label such as `**Doubt Type**:` or `**Pratijna (Thesis)**:`.
fn label(names: &[&str]) -> String {
    let alts: Vec<String> = names.iter().map(|n| lit(n)).collect();
    format!("bullet \"**\" ws ({}) gloss colon", alts.join(" | "))
}

fn check_line(f: nyaya_core::model::FallacyKind) -> String {
    format!(
        "bullet \"**\"? (\"Check for \" | \"check for \" | \"Check: \")? ({} | {}) \"**\"? ws \":\" [^\\n]* \"\\n\"",
        lit(f.title()),
        lit(f.key())
    )
}

/// Grammar text for traces the validator would accept under `cfg`.
pub fn emit_grammar(cfg: &ValidationConfig) -> String {
    let mut g = String::new();
    g.push_str("# Six-phase Nyaya reasoning trace\n");
    let phases: Vec<String> = Phase::ALL.iter().map(|p| rule_name(p.key())).collect();
    if cfg.require_leading_samshaya {
        let _ = writeln!(g, "root ::= {}", phases.join(" "));
    } else {
        let _ = writeln!(g, "root ::= preamble {}", phases.join(" "));
        g.push_str("preamble ::= line*\n");
    }

    g.push_str(
        r####"
# Free text. `line` never opens a phase; `inner` never opens a subsection either.
line ::= ( [^#\n] [^\n]* | "#" [^#\n] [^\n]* | "#" | "##" [^ \n] [^\n]* | "##" )? "\n"
inner ::= ( [^#\n] [^\n]* | "#" [^#\n] [^\n]* | "#" | "##" [^# \n] [^\n]* | "##" | "###" [^ \n] [^\n]* | "###" )? "\n"
content ::= ws ( [^-#\n \t] [^\n]* | "-" ( [^-\n] [^\n]* )? | "--" ( [^-\n] [^\n]* )? ) "\n"
ws ::= [ \t]*
bullet ::= ws ( [-*+] [ \t]+ )?
gloss ::= ( ws "(" [^)*\n]* ")" )?
colon ::= ws ( ":" ws "**" | "**" ws ":" )
value ::= ws [^ \t\n] [^\n]* "\n"
"####,
    );

    // Samshaya
    let doubts: Vec<String> = DoubtType::ALL.iter().flat_map(|d| [lit(d.title()), lit(d.key())]).collect();
    let _ = write!(
        g,
        r####"
samshaya ::= "## Samshaya" [^\n]* "\n" line* ( doubt-type line* samshaya-justification | samshaya-justification line* doubt-type ) line*
doubt-type ::= {} ws doubt-value ws ( "(" [^)\n]* ")" ws )? ( "**" [^\n]* )? "\n"
doubt-value ::= {}
samshaya-justification ::= {} value
"####,
        label(&["Doubt Type"]),
        doubts.join(" | "),
        label(&["Justification"])
    );

    // Pramana
    let kinds: Vec<String> = PramanaKind::ALL.iter().map(|k| rule_name(k.key())).collect();
    let _ = writeln!(g, "\npramana ::= \"## Pramana\" [^\\n]* \"\\n\" inner* {} line*", kinds.join(" "));
    for k in PramanaKind::ALL {
        let _ = writeln!(g, "{} ::= \"### {}\" [^\\n]* \"\\n\" inner* content inner*", rule_name(k.key()), k.name());
    }

    // Pancha Avayava
    let members: Vec<String> = SyllogismMember::ALL.iter().map(|m| rule_name(m.key())).collect();
    let _ = write!(
        g,
        "\npancha-avayava ::= \"## Pancha Avayava\" [^\\n]* \"\\n\" inner* syllogism+\nsyllogism ::= \"### Syllogism\" [^\\n]* \"\\n\" inner* {} inner*\n",
        members.join(" inner* ")
    );
    for m in SyllogismMember::ALL {
        let tail = if m == SyllogismMember::Udaharana { "ws universal-rule" } else { "value" };
        let _ = writeln!(g, "{} ::= {} {}", rule_name(m.key()), label(&[m.name()]), tail);
    }
    match cfg.universal_rule {
        RuleMode::Lenient => g.push_str(
            "universal-rule ::= ( [^\\n]* [^A-Za-z0-9_\\n] )? [Ww] \"herever\" [ \\t]+ [A-Za-z0-9_] [^\\n]* \"\\n\"\n",
        ),
        RuleMode::Strict => g.push_str(
            "universal-rule ::= ( [^\\n]* [^A-Za-z0-9_\\n] )? [Ww] \"herever\" [ \\t]+ [A-Za-z0-9_] [^.!?;\\n]* [^A-Za-z0-9_\\n] [Tt] \"here\" ( [^A-Za-z0-9_\\n] [^\\n]* )? \"\\n\"\n",
        ),
    }

    // Tarka
    let _ = write!(
        g,
        "\ntarka ::= \"## Tarka\" [^\\n]* \"\\n\" line* ( tarka-analysis | tarka-test ) line*\ntarka-analysis ::= {} value\ntarka-test ::= {} value\n",
        label(&["Analysis"]),
        label(&["Test"])
    );

    // Hetvabhasa
    let sets: Vec<FallacySet> = cfg.fallacy_selector.sets().to_vec();
    let set_rules: Vec<String> = sets.iter().map(|s| format!("checks-{}", rule_name(set_key(*s)))).collect();
    let _ = writeln!(g, "\nhetvabhasa ::= \"## Hetvabhasa\" [^\\n]* \"\\n\" line* ( {} ) line*", set_rules.join(" | "));
    for (s, name) in sets.iter().zip(&set_rules) {
        let members = s.members();
        let lines: Vec<String> = members.iter().map(|f| format!("check-{}", f.key())).collect();
        let slash: Vec<String> = members.iter().map(|f| lit(f.title())).collect();
        let _ = writeln!(
            g,
            "{name} ::= {} | bullet \"Check for \" {} ws \"\\n\"",
            lines.join(" line* "),
            slash.join(" ws \"/\" ws ")
        );
    }
    let mut seen = Vec::new();
    for s in &sets {
        for f in s.members() {
            if !seen.contains(&f) {
                seen.push(f);
                let _ = writeln!(g, "check-{} ::= {}", f.key(), check_line(f));
            }
        }
    }

    // Nirnaya
    let _ = write!(
        g,
        "\nnirnaya ::= \"## Nirnaya\" [^\\n]* \"\\n\" line* final-answer line* nirnaya-justification line*\nfinal-answer ::= {} value\nnirnaya-justification ::= {} value\n",
        label(&["Final Answer", "Answer"]),
        label(&["Justification"])
    );
    g
}

fn set_key(s: FallacySet) -> &'static str {
    match s {
        FallacySet::Canonical => "canonical",
        FallacySet::Alternate => "alternate",
    }
}

/// A grammar compiled for repeated acceptance checks.
#[derive(Debug, Clone)]
pub struct Acceptor {
    re: Regex,
}

impl Acceptor {
    pub fn new(grammar: &str) -> Result<Self, GrammarError> {
        Ok(Acceptor { re: Gbnf::parse(grammar)?.compile("root")? })
    }

    pub fn accepts(&self, text: &str) -> bool {
        let mut t = text.replace("\r\n", "\n");
        if t.is_empty() {
            return false;
        }
        if !t.ends_with('\n') {
            t.push('\n');
        }
        self.re.is_match(&t)
    }
}

/// One-shot acceptance. Malformed grammars accept nothing.
pub fn grammar_accepts(grammar: &str, text: &str) -> bool {
    Acceptor::new(grammar).is_ok_and(|a| a.accepts(text))
}

#[cfg(test)]
mod tests {
    use super::*;
    use nyaya_core::model::FallacySelector;

    const MINI: &str = "## Samshaya (Doubt Analysis)\n**Doubt Type**: Vipratipatti (conflict)\n**Justification**: j\n\n## Pramana\n### Pratyaksha\n- a\n### Anumana\n- b\n### Upamana\n- c\n### Shabda\n- d\n\n## Pancha Avayava\n### Syllogism 1: T\n**Pratijna (Thesis)**: p\n**Hetu**: h\n**Udaharana**: Wherever x, there y.\n**Upanaya**: u\n**Nigamana**: n\n\n## Tarka\n**Hypothesis**: Suppose not n.\n**Analysis**: a\n\n## Hetvabhasa\nCheck for Savyabhichara: No\nCheck for Viruddha: No\nCheck for Asiddha: No\nCheck for Satpratipaksha: No\nCheck for Badhita: No\n\n## Nirnaya\n**Final Answer**: n\n**Justification**: j\n";

    fn acceptor(cfg: &ValidationConfig) -> Acceptor {
        Acceptor::new(&emit_grammar(cfg)).unwrap()
    }

    #[test]
    fn grammar_text_shape() {
        let g = emit_grammar(&ValidationConfig::default());
        assert!(g.find("\"## Samshaya\"").unwrap() < g.find("\"## Pramana\"").unwrap());
        assert!(g.contains("\"Prakaranasama\""));
        assert!(g.contains("\"Samana Dharma Upapatti\""));
        assert_eq!(g, emit_grammar(&ValidationConfig::default()));
        let alt =
            emit_grammar(&ValidationConfig { fallacy_selector: FallacySelector::Alternate, ..Default::default() });
        assert!(!alt.contains("Prakaranasama"));
    }

    #[test]
    fn accepts_minimal_trace() {
        let a = acceptor(&ValidationConfig::default());
        assert!(a.accepts(MINI));
        assert!(a.accepts(&MINI.replace('\n', "\r\n")));
        assert!(a.accepts(&format!("Some preamble.\n\n{MINI}")));
        assert!(!a.accepts(""));
    }

    #[test]
    fn rejects_structural_breaks() {
        let a = acceptor(&ValidationConfig::default());
        assert!(!a.accepts(&MINI.replace("Vipratipatti (conflict)", "Vipratipatti Samshaya (conflict)")));
        assert!(!a.accepts(&MINI.replace("**Hetu**: h\n", "")));
        assert!(!a.accepts(&MINI.replace("Check for Viruddha: No\n", "")));
        assert!(!a.accepts(&MINI.replace("**Analysis**: a\n", "")));
        assert!(!a.accepts(&MINI.replace("Wherever x", "For x")));
        let cut = MINI.split("## Hetvabhasa").next().unwrap();
        assert!(!a.accepts(cut));
    }

    #[test]
    fn strict_leading_text() {
        let a = acceptor(&ValidationConfig { require_leading_samshaya: true, ..Default::default() });
        assert!(a.accepts(MINI));
        assert!(!a.accepts(&format!("Preamble\n{MINI}")));
    }

    #[test]
    fn slash_check_list() {
        let a = acceptor(&ValidationConfig::default());
        let slashed = MINI.replace(
            "Check for Savyabhichara: No\nCheck for Viruddha: No\nCheck for Asiddha: No\nCheck for Satpratipaksha: No\nCheck for Badhita: No\n",
            "Check for Savyabhichara / Viruddha / Asiddha / Satpratipaksha / Badhita\n",
        );
        assert!(a.accepts(&slashed));
    }

    #[test]
    fn bad_grammar_accepts_nothing() {
        assert!(!grammar_accepts("root ::= (", MINI));
    }
}
