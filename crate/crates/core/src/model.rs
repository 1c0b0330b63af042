//! Domain types for six-phase traces and their frontmatter.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

/// The six phases, in canonical order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Samshaya,
    Pramana,
    PanchaAvayava,
    Tarka,
    Hetvabhasa,
    Nirnaya,
}

impl Phase {
    pub const ALL: [Phase; 6] =
        [Phase::Samshaya, Phase::Pramana, Phase::PanchaAvayava, Phase::Tarka, Phase::Hetvabhasa, Phase::Nirnaya];

    pub fn name(self) -> &'static str {
        match self {
            Phase::Samshaya => "Samshaya",
            Phase::Pramana => "Pramana",
            Phase::PanchaAvayava => "Pancha Avayava",
            Phase::Tarka => "Tarka",
            Phase::Hetvabhasa => "Hetvabhasa",
            Phase::Nirnaya => "Nirnaya",
        }
    }

    pub fn key(self) -> &'static str {
        match self {
            Phase::Samshaya => "samshaya",
            Phase::Pramana => "pramana",
            Phase::PanchaAvayava => "pancha_avayava",
            Phase::Tarka => "tarka",
            Phase::Hetvabhasa => "hetvabhasa",
            Phase::Nirnaya => "nirnaya",
        }
    }

    /// Header gloss used by the prompt template.
    pub fn gloss(self) -> &'static str {
        match self {
            Phase::Samshaya => "Doubt Analysis",
            Phase::Pramana => "Sources of Knowledge",
            Phase::PanchaAvayava => "5-Member Syllogism",
            Phase::Tarka => "Counterfactual Reasoning",
            Phase::Hetvabhasa => "Fallacy Check",
            Phase::Nirnaya => "Ascertainment",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_key(key: &str) -> Option<Phase> {
        Phase::ALL.into_iter().find(|p| p.key() == key)
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DoubtType {
    SamanaDharmaUpapatti,
    AnekaDharmaUpapatti,
    Vipratipatti,
    UpalabdhiAvyavastha,
    AnupalabdhiAvyavastha,
}

impl DoubtType {
    pub const ALL: [DoubtType; 5] = [
        DoubtType::SamanaDharmaUpapatti,
        DoubtType::AnekaDharmaUpapatti,
        DoubtType::Vipratipatti,
        DoubtType::UpalabdhiAvyavastha,
        DoubtType::AnupalabdhiAvyavastha,
    ];

    pub fn key(self) -> &'static str {
        match self {
            DoubtType::SamanaDharmaUpapatti => "samana_dharma_upapatti",
            DoubtType::AnekaDharmaUpapatti => "aneka_dharma_upapatti",
            DoubtType::Vipratipatti => "vipratipatti",
            DoubtType::UpalabdhiAvyavastha => "upalabdhi_avyavastha",
            DoubtType::AnupalabdhiAvyavastha => "anupalabdhi_avyavastha",
        }
    }

    /// Title-cased, space separated surface form ("Samana Dharma Upapatti").
    pub fn title(self) -> &'static str {
        match self {
            DoubtType::SamanaDharmaUpapatti => "Samana Dharma Upapatti",
            DoubtType::AnekaDharmaUpapatti => "Aneka Dharma Upapatti",
            DoubtType::Vipratipatti => "Vipratipatti",
            DoubtType::UpalabdhiAvyavastha => "Upalabdhi Avyavastha",
            DoubtType::AnupalabdhiAvyavastha => "Anupalabdhi Avyavastha",
        }
    }

    pub fn from_key(key: &str) -> Option<DoubtType> {
        DoubtType::ALL.into_iter().find(|d| d.key() == key)
    }
}

/// A doubt-type field value: canonical, or the normalized surface form that failed to match.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DoubtClass {
    Canonical(DoubtType),
    Invalid(String),
}

impl DoubtClass {
    pub fn from_surface(surface: &str) -> DoubtClass {
        let key = normalize_enum_token(surface);
        match DoubtType::from_key(&key) {
            Some(d) => DoubtClass::Canonical(d),
            None => DoubtClass::Invalid(key),
        }
    }

    pub fn key(&self) -> &str {
        match self {
            DoubtClass::Canonical(d) => d.key(),
            DoubtClass::Invalid(k) => k,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PramanaKind {
    Pratyaksha,
    Anumana,
    Upamana,
    Shabda,
}

impl PramanaKind {
    pub const ALL: [PramanaKind; 4] =
        [PramanaKind::Pratyaksha, PramanaKind::Anumana, PramanaKind::Upamana, PramanaKind::Shabda];

    pub fn key(self) -> &'static str {
        match self {
            PramanaKind::Pratyaksha => "pratyaksha",
            PramanaKind::Anumana => "anumana",
            PramanaKind::Upamana => "upamana",
            PramanaKind::Shabda => "shabda",
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            PramanaKind::Pratyaksha => "Pratyaksha",
            PramanaKind::Anumana => "Anumana",
            PramanaKind::Upamana => "Upamana",
            PramanaKind::Shabda => "Shabda",
        }
    }

    pub fn gloss(self) -> &'static str {
        match self {
            PramanaKind::Pratyaksha => "Direct Perception",
            PramanaKind::Anumana => "Inference",
            PramanaKind::Upamana => "Comparison",
            PramanaKind::Shabda => "Testimony",
        }
    }

    pub fn from_key(key: &str) -> Option<PramanaKind> {
        PramanaKind::ALL.into_iter().find(|k| k.key() == key)
    }
}

impl fmt::Display for PramanaKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnumanaSubtype {
    Purvavat,
    Sheshavat,
    Samanyatodrishta,
}

impl AnumanaSubtype {
    pub const ALL: [AnumanaSubtype; 3] =
        [AnumanaSubtype::Purvavat, AnumanaSubtype::Sheshavat, AnumanaSubtype::Samanyatodrishta];

    pub fn key(self) -> &'static str {
        match self {
            AnumanaSubtype::Purvavat => "purvavat",
            AnumanaSubtype::Sheshavat => "sheshavat",
            AnumanaSubtype::Samanyatodrishta => "samanyatodrishta",
        }
    }

    pub fn from_key(key: &str) -> Option<AnumanaSubtype> {
        AnumanaSubtype::ALL.into_iter().find(|s| s.key() == key)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FallacyKind {
    Savyabhichara,
    Viruddha,
    Prakaranasama,
    Sadhyasama,
    Kalaatita,
    Asiddha,
    Satpratipaksha,
    Badhita,
}

impl FallacyKind {
    pub const ALL: [FallacyKind; 8] = [
        FallacyKind::Savyabhichara,
        FallacyKind::Viruddha,
        FallacyKind::Prakaranasama,
        FallacyKind::Sadhyasama,
        FallacyKind::Kalaatita,
        FallacyKind::Asiddha,
        FallacyKind::Satpratipaksha,
        FallacyKind::Badhita,
    ];

    pub fn key(self) -> &'static str {
        match self {
            FallacyKind::Savyabhichara => "savyabhichara",
            FallacyKind::Viruddha => "viruddha",
            FallacyKind::Prakaranasama => "prakaranasama",
            FallacyKind::Sadhyasama => "sadhyasama",
            FallacyKind::Kalaatita => "kalaatita",
            FallacyKind::Asiddha => "asiddha",
            FallacyKind::Satpratipaksha => "satpratipaksha",
            FallacyKind::Badhita => "badhita",
        }
    }

    pub fn title(self) -> &'static str {
        match self {
            FallacyKind::Savyabhichara => "Savyabhichara",
            FallacyKind::Viruddha => "Viruddha",
            FallacyKind::Prakaranasama => "Prakaranasama",
            FallacyKind::Sadhyasama => "Sadhyasama",
            FallacyKind::Kalaatita => "Kalaatita",
            FallacyKind::Asiddha => "Asiddha",
            FallacyKind::Satpratipaksha => "Satpratipaksha",
            FallacyKind::Badhita => "Badhita",
        }
    }

    pub fn from_key(key: &str) -> Option<FallacyKind> {
        FallacyKind::ALL.into_iter().find(|f| f.key() == key)
    }
}

/// The two five-member naming sets for fallacy checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FallacySet {
    Canonical,
    Alternate,
}

impl FallacySet {
    pub fn members(self) -> [FallacyKind; 5] {
        use FallacyKind::*;
        match self {
            FallacySet::Canonical => [Savyabhichara, Viruddha, Prakaranasama, Sadhyasama, Kalaatita],
            FallacySet::Alternate => [Savyabhichara, Viruddha, Asiddha, Satpratipaksha, Badhita],
        }
    }
}

/// Which set a trace must cover; `Either` accepts whichever covers more.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FallacySelector {
    Canonical,
    Alternate,
    #[default]
    Either,
}

impl FallacySelector {
    pub fn sets(self) -> &'static [FallacySet] {
        match self {
            FallacySelector::Canonical => &[FallacySet::Canonical],
            FallacySelector::Alternate => &[FallacySet::Alternate],
            FallacySelector::Either => &[FallacySet::Canonical, FallacySet::Alternate],
        }
    }
}

impl std::str::FromStr for FallacySelector {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "canonical" => Ok(FallacySelector::Canonical),
            "alternate" => Ok(FallacySelector::Alternate),
            "either" => Ok(FallacySelector::Either),
            other => Err(format!("unknown fallacy set `{other}` (expected canonical, alternate or either)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SyllogismMember {
    Pratijna,
    Hetu,
    Udaharana,
    Upanaya,
    Nigamana,
}

impl SyllogismMember {
    pub const ALL: [SyllogismMember; 5] = [
        SyllogismMember::Pratijna,
        SyllogismMember::Hetu,
        SyllogismMember::Udaharana,
        SyllogismMember::Upanaya,
        SyllogismMember::Nigamana,
    ];

    pub fn key(self) -> &'static str {
        match self {
            SyllogismMember::Pratijna => "pratijna",
            SyllogismMember::Hetu => "hetu",
            SyllogismMember::Udaharana => "udaharana",
            SyllogismMember::Upanaya => "upanaya",
            SyllogismMember::Nigamana => "nigamana",
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SyllogismMember::Pratijna => "Pratijna",
            SyllogismMember::Hetu => "Hetu",
            SyllogismMember::Udaharana => "Udaharana",
            SyllogismMember::Upanaya => "Upanaya",
            SyllogismMember::Nigamana => "Nigamana",
        }
    }

    pub fn gloss(self) -> &'static str {
        match self {
            SyllogismMember::Pratijna => "Thesis",
            SyllogismMember::Hetu => "Reason",
            SyllogismMember::Udaharana => "Universal + Example",
            SyllogismMember::Upanaya => "Application",
            SyllogismMember::Nigamana => "Conclusion",
        }
    }

    pub fn from_key(key: &str) -> Option<SyllogismMember> {
        SyllogismMember::ALL.into_iter().find(|m| m.key() == key)
    }
}

impl fmt::Display for SyllogismMember {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Syllogism {
    pub topic: String,
    pub pratijna: Option<String>,
    pub hetu: Option<String>,
    pub udaharana: Option<String>,
    pub upanaya: Option<String>,
    pub nigamana: Option<String>,
}

impl Syllogism {
    pub fn member(&self, m: SyllogismMember) -> Option<&str> {
        let slot = match m {
            SyllogismMember::Pratijna => &self.pratijna,
            SyllogismMember::Hetu => &self.hetu,
            SyllogismMember::Udaharana => &self.udaharana,
            SyllogismMember::Upanaya => &self.upanaya,
            SyllogismMember::Nigamana => &self.nigamana,
        };
        slot.as_deref().filter(|t| !t.trim().is_empty())
    }

    pub fn set_member(&mut self, m: SyllogismMember, text: String) {
        let slot = match m {
            SyllogismMember::Pratijna => &mut self.pratijna,
            SyllogismMember::Hetu => &mut self.hetu,
            SyllogismMember::Udaharana => &mut self.udaharana,
            SyllogismMember::Upanaya => &mut self.upanaya,
            SyllogismMember::Nigamana => &mut self.nigamana,
        };
        *slot = Some(text);
    }

    pub fn missing_members(&self) -> Vec<SyllogismMember> {
        SyllogismMember::ALL.into_iter().filter(|m| self.member(*m).is_none()).collect()
    }

    pub fn is_complete(&self) -> bool {
        self.missing_members().is_empty()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SamshayaPhase {
    pub doubt_type: Option<DoubtClass>,
    pub justification: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PramanaItem {
    pub text: String,
    pub subtype: Option<AnumanaSubtype>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PramanaBlock {
    pub text: String,
    pub items: Vec<PramanaItem>,
}

impl PramanaBlock {
    /// Any non-blank line that is not a horizontal rule. "- None" counts.
    pub fn has_content(&self) -> bool {
        self.text.lines().any(|l| !l.trim().is_empty() && !is_hr(l))
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PramanaPhase {
    pub sources: BTreeMap<PramanaKind, PramanaBlock>,
}

impl PramanaPhase {
    pub fn has_kind(&self, kind: PramanaKind) -> bool {
        self.sources.get(&kind).is_some_and(|b| b.has_content())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PanchaAvayavaPhase {
    pub syllogisms: Vec<Syllogism>,
}

impl PanchaAvayavaPhase {
    pub fn complete_count(&self) -> usize {
        self.syllogisms.iter().filter(|s| s.is_complete()).count()
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TarkaForm {
    #[default]
    FourField,
    SingleTest,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TarkaPhase {
    pub form: TarkaForm,
    pub hypothesis: Option<String>,
    pub consequence: Option<String>,
    pub analysis: Option<String>,
    pub resolution: Option<String>,
    pub test: Option<String>,
}

impl TarkaPhase {
    pub fn is_field_complete(&self) -> bool {
        let filled = |o: &Option<String>| o.as_deref().is_some_and(|t| !t.trim().is_empty());
        match self.form {
            TarkaForm::FourField => {
                filled(&self.hypothesis)
                    && filled(&self.consequence)
                    && filled(&self.analysis)
                    && filled(&self.resolution)
            }
            TarkaForm::SingleTest => filled(&self.test),
        }
    }

    /// The text that states what is being assumed.
    pub fn premise(&self) -> Option<&str> {
        match self.form {
            TarkaForm::FourField => self.hypothesis.as_deref(),
            TarkaForm::SingleTest => self.test.as_deref(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct HetvabhasaPhase {
    pub checks: BTreeMap<FallacyKind, String>,
    pub reasoning: Option<String>,
}

impl HetvabhasaPhase {
    pub fn checked_count(&self, set: FallacySet) -> usize {
        set.members().iter().filter(|f| self.checks.contains_key(f)).count()
    }

    pub fn coverage(&self, selector: FallacySelector) -> usize {
        selector.sets().iter().map(|s| self.checked_count(*s)).max().unwrap_or(0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NirnayaStatus {
    DefinitiveKnowledge,
    HypothesisRequiringVerification,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Confidence {
    High,
    Medium,
    Low,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct NirnayaPhase {
    pub status: Option<NirnayaStatus>,
    pub final_answer: Option<String>,
    pub justification: Option<String>,
    pub confidence: Option<Confidence>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProblemType {
    ConstraintSatisfaction,
    BooleanSat,
    TransitiveReasoning,
    SetMembership,
    MultiStepDeduction,
    Other(String),
}

impl ProblemType {
    pub const KNOWN: [ProblemType; 5] = [
        ProblemType::ConstraintSatisfaction,
        ProblemType::BooleanSat,
        ProblemType::TransitiveReasoning,
        ProblemType::SetMembership,
        ProblemType::MultiStepDeduction,
    ];

    pub fn parse(surface: &str) -> ProblemType {
        let key = normalize_enum_token(surface);
        ProblemType::KNOWN.into_iter().find(|p| p.key() == key).unwrap_or(ProblemType::Other(key))
    }

    pub fn key(&self) -> &str {
        match self {
            ProblemType::ConstraintSatisfaction => "constraint_satisfaction",
            ProblemType::BooleanSat => "boolean_sat",
            ProblemType::TransitiveReasoning => "transitive_reasoning",
            ProblemType::SetMembership => "set_membership",
            ProblemType::MultiStepDeduction => "multi_step_deduction",
            ProblemType::Other(k) => k,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Difficulty {
    Simple,
    Moderate,
    Complex,
}

impl Difficulty {
    pub const ALL: [Difficulty; 3] = [Difficulty::Simple, Difficulty::Moderate, Difficulty::Complex];

    pub fn key(self) -> &'static str {
        match self {
            Difficulty::Simple => "simple",
            Difficulty::Moderate => "moderate",
            Difficulty::Complex => "complex",
        }
    }

    pub fn parse(surface: &str) -> Option<Difficulty> {
        let key = normalize_enum_token(surface);
        Difficulty::ALL.into_iter().find(|d| d.key() == key)
    }
}

/// A frontmatter value from the supported YAML subset.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MetaValue {
    Scalar(String),
    List(Vec<String>),
    Map(BTreeMap<String, String>),
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Frontmatter {
    pub id: Option<String>,
    pub problem_type: Option<ProblemType>,
    pub difficulty: Option<Difficulty>,
    pub ground_truth: Option<String>,
    pub z3_verifiable: Option<bool>,
    pub negative_example: Option<bool>,
    /// Every other key, including the nested `metadata:` block.
    pub metadata: BTreeMap<String, MetaValue>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct NyayaTrace {
    pub leading_text: String,
    pub samshaya: Option<SamshayaPhase>,
    pub pramana: Option<PramanaPhase>,
    pub pancha_avayava: Option<PanchaAvayavaPhase>,
    pub tarka: Option<TarkaPhase>,
    pub hetvabhasa: Option<HetvabhasaPhase>,
    pub nirnaya: Option<NirnayaPhase>,
    pub phase_presence: [bool; 6],
    /// Phases in the order their headers first appeared.
    pub section_order: Vec<Phase>,
}

impl NyayaTrace {
    pub fn has_phase(&self, phase: Phase) -> bool {
        self.phase_presence[phase.index()]
    }

    pub fn phase_count(&self) -> usize {
        self.phase_presence.iter().filter(|p| **p).count()
    }

    pub fn syllogisms(&self) -> &[Syllogism] {
        self.pancha_avayava.as_ref().map(|p| p.syllogisms.as_slice()).unwrap_or(&[])
    }
}

pub(crate) fn is_hr(line: &str) -> bool {
    let t = line.trim();
    t.len() >= 3 && t.chars().all(|c| c == '-')
}

/// Reduce a raw field value to a snake_case identifier.
///
/// Bold markers, backticks and parenthetical glosses are dropped; an unclosed `(` drops
/// everything after it.
pub fn normalize_enum_token(surface: &str) -> String {
    let mut stripped = String::with_capacity(surface.len());
    let mut depth = 0usize;
    for c in surface.chars() {
        match c {
            '*' | '`' => {}
            '(' => depth += 1,
            ')' if depth > 0 => depth -= 1,
            ')' => stripped.push(' '),
            _ if depth == 0 => stripped.push(c),
            _ => {}
        }
    }
    let lower = stripped.to_lowercase();
    lower
        .split(|c: char| c.is_whitespace() || c == '_' || c == '-')
        .map(|t| t.trim_matches(|c: char| !c.is_alphanumeric()))
        .filter(|t| !t.is_empty())
        .collect::<Vec<_>>()
        .join("_")
}
