use std::collections::HashMap;
use std::fmt;
use std::path::Path;

use crate::error::{Error, Result};

pub const PRODUCTION_COUNT: usize = 104;
pub const POS_TAG_COUNT: usize = 53;
pub const UNIVERSAL_TAG_COUNT: usize = 18;

const BUILTIN_RULES: &str = include_str!("../../data/production_rules.txt");
const BUILTIN_TAGS: &str = include_str!("../../data/pos_tags.txt");
const BUILTIN_UNIVERSAL: &str = include_str!("../../data/universal_tags.tsv");

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Production {
    pub lhs: String,
    pub rhs: Vec<String>,
}

impl Production {
    pub fn new(lhs: &str, rhs: &[&str]) -> Self {
        Production {
            lhs: lhs.to_string(),
            rhs: rhs.iter().map(|s| s.to_string()).collect(),
        }
    }

    /// Feature-name form, e.g. `ADVP_->_RB`.
    pub fn feature_name(&self) -> String {
        format!("{}_->_{}", self.lhs, self.rhs.join("_"))
    }
}

impl fmt::Display for Production {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {}", self.lhs, self.rhs.join(" "))
    }
}

/// Production-rule signatures, fine POS tags and the fine-to-universal tag
/// map. Order in each list fixes feature order.
#[derive(Debug, Clone)]
pub struct ProductionRegistry {
    rules: Vec<Production>,
    rule_index: HashMap<Production, usize>,
    tags: Vec<String>,
    tag_index: HashMap<String, usize>,
    universal: Vec<String>,
    universal_of: HashMap<String, usize>,
}

fn data_lines(text: &str) -> impl Iterator<Item = &str> {
    // "# " opens a comment; a bare "#" is the pound-sign tag
    text.lines()
        .map(str::trim_end)
        .filter(|l| !l.trim().is_empty() && !l.starts_with("# "))
}

impl ProductionRegistry {
    pub fn builtin() -> Self {
        Self::parse(BUILTIN_RULES, BUILTIN_TAGS, BUILTIN_UNIVERSAL).expect("built-in registry is valid")
    }

    pub fn from_files(rules: &Path, tags: &Path, universal: &Path) -> Result<Self> {
        let read = |p: &Path| std::fs::read_to_string(p).map_err(|e| Error::resource(p, e.to_string()));
        Self::parse(&read(rules)?, &read(tags)?, &read(universal)?)
    }

    pub fn parse(rules: &str, tags: &str, universal: &str) -> Result<Self> {
        let mut parsed = Vec::new();
        for line in data_lines(rules) {
            let (lhs, rhs) = line
                .split_once("->")
                .ok_or_else(|| Error::Config(format!("production without '->': {line:?}")))?;
            let rhs: Vec<String> = rhs.split_whitespace().map(str::to_string).collect();
            if lhs.trim().is_empty() || rhs.is_empty() {
                return Err(Error::Config(format!("malformed production {line:?}")));
            }
            parsed.push(Production {
                lhs: lhs.trim().to_string(),
                rhs,
            });
        }
        let tag_list: Vec<String> = data_lines(tags).map(|l| l.trim().to_string()).collect();

        let mut targets: Vec<String> = Vec::new();
        let mut mapping: Vec<(String, String)> = Vec::new();
        for line in data_lines(universal) {
            if let Some(rest) = line.strip_prefix("@targets") {
                targets = rest.split_whitespace().map(str::to_string).collect();
                continue;
            }
            let (fine, coarse) = line
                .split_once('\t')
                .ok_or_else(|| Error::Config(format!("universal map line without tab: {line:?}")))?;
            mapping.push((fine.to_string(), coarse.trim().to_string()));
        }

        check_size("production rules", parsed.len(), PRODUCTION_COUNT)?;
        check_size("POS tags", tag_list.len(), POS_TAG_COUNT)?;
        check_size("universal tags", targets.len(), UNIVERSAL_TAG_COUNT)?;

        let rule_index = index_unique(&parsed, "production")?;
        let tag_index = index_unique(&tag_list, "POS tag")?;
        let target_index = index_unique(&targets, "universal tag")?;
        let mut universal_of = HashMap::new();
        for (fine, coarse) in mapping {
            let idx = *target_index
                .get(&coarse)
                .ok_or_else(|| Error::Config(format!("unknown universal tag {coarse:?}")))?;
            universal_of.insert(fine, idx);
        }

        Ok(ProductionRegistry {
            rules: parsed,
            rule_index,
            tags: tag_list,
            tag_index,
            universal: targets,
            universal_of,
        })
    }

    pub fn rules(&self) -> &[Production] {
        &self.rules
    }

    pub fn rule_position(&self, p: &Production) -> Option<usize> {
        self.rule_index.get(p).copied()
    }

    pub fn pos_tags(&self) -> &[String] {
        &self.tags
    }

    pub fn tag_position(&self, tag: &str) -> Option<usize> {
        self.tag_index.get(tag).copied()
    }

    pub fn universal_tags(&self) -> &[String] {
        &self.universal
    }

    pub fn universal_position(&self, fine_tag: &str) -> Option<usize> {
        self.universal_of.get(fine_tag).copied()
    }

    /// Stable text form, used for the registry hash.
    pub fn signature(&self) -> String {
        let mut s = String::new();
        for r in &self.rules {
            s.push_str(&r.to_string());
            s.push('\n');
        }
        s.push_str(&self.tags.join(" "));
        s.push('\n');
        s.push_str(&self.universal.join(" "));
        s
    }
}

fn check_size(what: &str, got: usize, want: usize) -> Result<()> {
    if got != want {
        return Err(Error::Config(format!("registry must list {want} {what}, found {got}")));
    }
    Ok(())
}

fn index_unique<T: Clone + Eq + std::hash::Hash + fmt::Debug>(items: &[T], what: &str) -> Result<HashMap<T, usize>> {
    let mut map = HashMap::with_capacity(items.len());
    for (i, item) in items.iter().enumerate() {
        if map.insert(item.clone(), i).is_some() {
            return Err(Error::Config(format!("duplicate {what} {item:?}")));
        }
    }
    Ok(map)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_sizes() {
        let r = ProductionRegistry::builtin();
        assert_eq!(r.rules().len(), 104);
        assert_eq!(r.pos_tags().len(), 53);
        assert_eq!(r.universal_tags().len(), 18);
        for tag in r.pos_tags() {
            assert!(r.universal_position(tag).is_some(), "{tag} unmapped");
        }
        assert!(r.tag_position("#").is_some());
        assert!(r.rule_position(&Production::new("ADVP", &["RB"])).is_some());
    }

    #[test]
    fn wrong_size_rejected() {
        let err = ProductionRegistry::parse("S -> NP VP\n", BUILTIN_TAGS, BUILTIN_UNIVERSAL).unwrap_err();
        assert!(err.to_string().contains("104"));
    }
}
