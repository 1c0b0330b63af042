use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::LogicError;

pub const MAX_BIJECTION: usize = 8;
pub const MAX_HORN_VARS: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LogicProblem {
    Bijection(BijectionProblem),
    Horn(HornProblem),
}

/// Entities mapped one-to-one onto values.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BijectionProblem {
    pub entities: Vec<String>,
    pub values: Vec<String>,
    #[serde(default)]
    pub constraints: Vec<BijectionConstraint>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum BijectionConstraint {
    Assign {
        entity: String,
        value: String,
    },
    Forbid {
        entity: String,
        value: String,
    },
    /// `before` takes a value earlier in `values` than `after`. Used for orderings.
    Precedes {
        before: String,
        after: String,
    },
}

impl fmt::Display for BijectionConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BijectionConstraint::Assign { entity, value } => write!(f, "assign({entity}, {value})"),
            BijectionConstraint::Forbid { entity, value } => write!(f, "forbid({entity}, {value})"),
            BijectionConstraint::Precedes { before, after } => write!(f, "precedes({before}, {after})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HornProblem {
    pub variables: Vec<String>,
    #[serde(default)]
    pub facts: Vec<Literal>,
    #[serde(default)]
    pub rules: Vec<HornRule>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Literal {
    pub var: String,
    pub value: bool,
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "fact({} = {})", self.var, self.value)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HornRule {
    #[serde(rename = "if")]
    pub antecedent: String,
    #[serde(rename = "then")]
    pub consequent: String,
}

impl fmt::Display for HornRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "rule({} -> {})", self.antecedent, self.consequent)
    }
}

/// A (possibly partial) answer.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "values", rename_all = "snake_case")]
pub enum AssignmentAnswer {
    Bijection(BTreeMap<String, String>),
    Horn(BTreeMap<String, bool>),
}

impl AssignmentAnswer {
    pub fn is_empty(&self) -> bool {
        match self {
            AssignmentAnswer::Bijection(m) => m.is_empty(),
            AssignmentAnswer::Horn(m) => m.is_empty(),
        }
    }

    pub fn len(&self) -> usize {
        match self {
            AssignmentAnswer::Bijection(m) => m.len(),
            AssignmentAnswer::Horn(m) => m.len(),
        }
    }

    /// Whether every binding in `self` also holds in `other`.
    pub fn is_extended_by(&self, other: &AssignmentAnswer) -> bool {
        match (self, other) {
            (AssignmentAnswer::Bijection(a), AssignmentAnswer::Bijection(b)) => {
                a.iter().all(|(k, v)| b.get(k) == Some(v))
            }
            (AssignmentAnswer::Horn(a), AssignmentAnswer::Horn(b)) => a.iter().all(|(k, v)| b.get(k) == Some(v)),
            _ => false,
        }
    }
}

impl fmt::Display for AssignmentAnswer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = match self {
            AssignmentAnswer::Bijection(m) => m.iter().map(|(k, v)| format!("{k}: {v}")).collect(),
            AssignmentAnswer::Horn(m) => m.iter().map(|(k, v)| format!("{k}: {v}")).collect(),
        };
        f.write_str(&parts.join(", "))
    }
}

fn check_unique(items: &[String], what: &'static str) -> Result<(), LogicError> {
    let mut seen = BTreeSet::new();
    for i in items {
        if !seen.insert(i) {
            return Err(LogicError::Duplicate { what, name: i.clone() });
        }
    }
    Ok(())
}

impl BijectionProblem {
    pub fn validate(&self) -> Result<(), LogicError> {
        check_unique(&self.entities, "entity")?;
        check_unique(&self.values, "value")?;
        if self.entities.len() != self.values.len() {
            return Err(LogicError::SizeMismatch { entities: self.entities.len(), values: self.values.len() });
        }
        let entity = |e: &String| {
            if self.entities.contains(e) {
                Ok(())
            } else {
                Err(LogicError::Undeclared { what: "entity", name: e.clone() })
            }
        };
        let value = |v: &String| {
            if self.values.contains(v) {
                Ok(())
            } else {
                Err(LogicError::Undeclared { what: "value", name: v.clone() })
            }
        };
        for c in &self.constraints {
            match c {
                BijectionConstraint::Assign { entity: e, value: v }
                | BijectionConstraint::Forbid { entity: e, value: v } => {
                    entity(e)?;
                    value(v)?;
                }
                BijectionConstraint::Precedes { before, after } => {
                    entity(before)?;
                    entity(after)?;
                }
            }
        }
        Ok(())
    }

    pub fn value_index(&self, v: &str) -> Option<usize> {
        self.values.iter().position(|x| x == v)
    }
}

impl HornProblem {
    pub fn validate(&self) -> Result<(), LogicError> {
        check_unique(&self.variables, "variable")?;
        let declared = |v: &String| {
            if self.variables.contains(v) {
                Ok(())
            } else {
                Err(LogicError::Undeclared { what: "variable", name: v.clone() })
            }
        };
        for f in &self.facts {
            declared(&f.var)?;
        }
        for r in &self.rules {
            declared(&r.antecedent)?;
            declared(&r.consequent)?;
        }
        Ok(())
    }
}

impl LogicProblem {
    pub fn validate(&self) -> Result<(), LogicError> {
        match self {
            LogicProblem::Bijection(b) => b.validate(),
            LogicProblem::Horn(h) => h.validate(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self, LogicError> {
        let p: LogicProblem = serde_json::from_str(text).map_err(|e| LogicError::Json(e.to_string()))?;
        p.validate()?;
        Ok(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_shape() {
        let p = LogicProblem::from_json(
            r#"{"kind":"horn","variables":["P","Q"],"facts":[{"var":"P","value":true}],"rules":[{"if":"P","then":"Q"}]}"#,
        )
        .unwrap();
        assert!(matches!(p, LogicProblem::Horn(ref h) if h.rules[0].consequent == "Q"));
    }

    #[test]
    fn rejects_malformed_problems() {
        let dup = r#"{"kind":"bijection","entities":["A","A"],"values":["x","y"]}"#;
        assert!(matches!(LogicProblem::from_json(dup), Err(LogicError::Duplicate { .. })));
        let uneven = r#"{"kind":"bijection","entities":["A","B"],"values":["x"]}"#;
        assert!(matches!(LogicProblem::from_json(uneven), Err(LogicError::SizeMismatch { .. })));
        let undeclared = r#"{"kind":"horn","variables":["P"],"rules":[{"if":"P","then":"Z"}]}"#;
        assert!(matches!(LogicProblem::from_json(undeclared), Err(LogicError::Undeclared { .. })));
    }
}
