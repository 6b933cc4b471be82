use std::collections::BTreeSet;
use std::path::Path;

use super::{is_box_label, is_referent, is_sense, ClfError, SymbolClass};

const BUNDLED: &str = include_str!("../../data/inventory.txt");

/// Where a token sits inside a clause.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TokenContext<'a> {
    /// First field: the box the clause belongs to.
    BoxField,
    /// Second field. `next` is the following field, needed to spot concepts
    /// (`house "n.05"`).
    Head { next: Option<&'a str> },
    Argument,
}

/// Known DRS operators, discourse relations and comparison relations.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Inventory {
    operators: BTreeSet<String>,
    relations: BTreeSet<String>,
    comparisons: BTreeSet<String>,
}

impl Inventory {
    /// The inventory shipped with the crate.
    pub fn bundled() -> Self {
        Self::parse(BUNDLED).expect("bundled inventory is valid")
    }

    /// Reads `<class> <SYMBOL>` lines; classes are `operator`, `relation` and
    /// `comparison`.
    pub fn parse(text: &str) -> Result<Self, ClfError> {
        let mut inv = Inventory::default();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut fields = line.split_whitespace();
            let (class, sym) = match (fields.next(), fields.next(), fields.next()) {
                (Some(c), Some(s), None) => (c, s),
                _ => {
                    return Err(ClfError::Inventory { line: i + 1, reason: format!("expected `<class> <symbol>`, got `{line}`") })
                }
            };
            let set = match class {
                "operator" => &mut inv.operators,
                "relation" => &mut inv.relations,
                "comparison" => &mut inv.comparisons,
                other => {
                    return Err(ClfError::Inventory { line: i + 1, reason: format!("unknown class `{other}`") })
                }
            };
            set.insert(sym.to_string());
        }
        Ok(inv)
    }

    pub fn load(path: &Path) -> Result<Self, ClfError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ClfError::Inventory { line: 0, reason: format!("{}: {e}", path.display()) })?;
        Self::parse(&text)
    }

    pub fn add_operator(&mut self, s: impl Into<String>) {
        self.operators.insert(s.into());
    }

    pub fn add_relation(&mut self, s: impl Into<String>) {
        self.relations.insert(s.into());
    }

    pub fn add_comparison(&mut self, s: impl Into<String>) {
        self.comparisons.insert(s.into());
    }

    pub fn is_operator(&self, s: &str) -> bool {
        self.operators.contains(s)
    }

    pub fn is_relation(&self, s: &str) -> bool {
        self.relations.contains(s)
    }

    pub fn is_comparison(&self, s: &str) -> bool {
        self.comparisons.contains(s)
    }

    /// Classifies a single whitespace-delimited field.
    pub fn classify(&self, token: &str, ctx: TokenContext<'_>) -> Result<SymbolClass, ClfError> {
        let unclassifiable = || ClfError::Unclassifiable(token.to_string());
        match ctx {
            TokenContext::BoxField => {
                if is_box_label(token) {
                    Ok(SymbolClass::BoxLabel)
                } else {
                    Err(unclassifiable())
                }
            }
            TokenContext::Argument => {
                if is_box_label(token) {
                    Ok(SymbolClass::BoxLabel)
                } else if is_referent(token) {
                    Ok(SymbolClass::DiscourseReferent)
                } else if unquote(token).is_some() {
                    Ok(SymbolClass::Constant)
                } else {
                    Err(unclassifiable())
                }
            }
            TokenContext::Head { next } => {
                if token == "REF" {
                    return Ok(SymbolClass::RefIntroducer);
                }
                if self.is_operator(token) {
                    return Ok(SymbolClass::DrsOperator);
                }
                if self.is_relation(token) {
                    return Ok(SymbolClass::DiscourseRelation);
                }
                if self.is_comparison(token) {
                    return Ok(SymbolClass::ComparisonRelation);
                }
                if unquote(token).is_some() {
                    return Err(unclassifiable());
                }
                if next.and_then(unquote).is_some_and(is_sense) {
                    return Ok(SymbolClass::Concept);
                }
                let mut chars = token.chars();
                let first = chars.next().ok_or_else(unclassifiable)?;
                let all_caps = token.chars().all(|c| c.is_ascii_uppercase() || c.is_ascii_digit());
                if first.is_uppercase() && !all_caps && token.chars().all(|c| c.is_alphanumeric() || c == '_') {
                    Ok(SymbolClass::SemanticRole)
                } else {
                    // unknown all-caps symbols belong in the inventory file
                    Err(unclassifiable())
                }
            }
        }
    }
}

/// Strips surrounding double quotes.
pub(crate) fn unquote(token: &str) -> Option<&str> {
    if token.len() >= 2 && token.starts_with('"') && token.ends_with('"') {
        Some(&token[1..token.len() - 1])
    } else {
        None
    }
}
