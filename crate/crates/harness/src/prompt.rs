use nyaya_core::model::{FallacySet, Phase, PramanaKind, SyllogismMember};

use crate::client::PromptBundle;

pub const SYSTEM_PROMPT: &str = "You are a Nyaya reasoning engine. Follow the exact output format provided.";

/// `## Samshaya (Doubt Analysis)` and friends.
pub fn phase_header(p: Phase) -> String {
    format!("## {} ({})", p.name(), p.gloss())
}

/// The numbered required-order list and the start constraint.
pub fn format_instructions() -> String {
    let mut s = String::from("Required section order:\n");
    for (i, p) in Phase::ALL.iter().enumerate() {
        s.push_str(&format!("{}) {}\n", i + 1, phase_header(*p)));
    }
    s.push_str("\nCRITICAL:\n- Response MUST start with: \"## Samshaya\"\n- Copy the template exactly.\n");
    s
}

/// Skeletal trace with one label per line and one check line per fallacy.
pub fn template(fallacies: FallacySet) -> String {
    let mut s = String::new();
    for (i, p) in Phase::ALL.iter().enumerate() {
        if i > 0 {
            s.push_str("---\n");
        }
        s.push_str(&phase_header(*p));
        s.push('\n');
        match p {
            Phase::Samshaya => s.push_str("**Doubt Type**:\n**Justification**:\n"),
            Phase::Pramana => {
                for k in PramanaKind::ALL {
                    s.push_str(&format!("### {} ({})\n", k.name(), k.gloss()));
                }
            }
            Phase::PanchaAvayava => {
                s.push_str("### Syllogism 1:\n");
                for m in SyllogismMember::ALL {
                    s.push_str(&format!("**{} ({})**:\n", m.name(), m.gloss()));
                }
            }
            Phase::Tarka => s.push_str("**Hypothesis**:\n**Consequence**:\n**Analysis**:\n**Resolution**:\n"),
            Phase::Hetvabhasa => {
                for f in fallacies.members() {
                    s.push_str(&format!("Check for {}:\n", f.title()));
                }
            }
            Phase::Nirnaya => s.push_str("**Final Answer**:\n**Justification**:\n"),
        }
    }
    s
}

/// System and user text for one problem. Without format prompting the user text is the bare problem.
pub fn assemble_prompt(problem: &str, format_prompting: bool) -> PromptBundle {
    let user = if format_prompting {
        format!(
            "### Problem:\n{}\n\n### Instructions:\n{}\n### Template:\n{}\n### Nyaya Reasoning:\n",
            problem.trim(),
            format_instructions(),
            template(FallacySet::Alternate)
        )
    } else {
        problem.to_string()
    };
    PromptBundle { system: SYSTEM_PROMPT.to_string(), user }
}

#[cfg(test)]
mod tests {
    use super::*;

    const PETS: &str = "Alice, Bob, and Carol each have one pet: a cat, a dog, or a fish.";

    #[test]
    fn formatted_prompt() {
        let p = assemble_prompt(PETS, true);
        assert_eq!(p.system, SYSTEM_PROMPT);
        let sam = p.user.find("## Samshaya (Doubt Analysis)").unwrap();
        let pra = p.user.find("## Pramana").unwrap();
        assert!(sam < pra);
        assert!(p.user.contains("1) ## Samshaya (Doubt Analysis)\n"));
        assert!(p.user.contains("6) ## Nirnaya (Ascertainment)\n"));
        assert!(p.user.contains("Check for Badhita:\n"));
        assert!(p.user.trim_end().ends_with("### Nyaya Reasoning:"));
        assert_eq!(p, assemble_prompt(PETS, true));
    }

    #[test]
    fn bare_prompt() {
        let p = assemble_prompt(PETS, false);
        assert_eq!(p.user, PETS);
        assert_eq!(p.system, SYSTEM_PROMPT);
    }

    #[test]
    fn template_labels() {
        let t = template(FallacySet::Canonical);
        assert!(t.contains("**Udaharana (Universal + Example)**:\n"));
        assert!(t.contains("### Shabda (Testimony)\n"));
        assert!(t.contains("Check for Prakaranasama:\n"));
        assert_eq!(t.matches("---\n").count(), 5);
    }
}
