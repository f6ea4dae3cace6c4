//! JSON interchange format for groupoids and subgroupoids.
//!
//! ```json
//! { "objects": ["x", "y"],
//!   "arrows": [{"id": "e_x", "src": "x", "tgt": "x"}, ...],
//!   "compose": [["g", "h", "gh"], ...],
//!   "identity": {"x": "e_x", ...},
//!   "inverse": {"g": "g_inv", ...} }
//! ```
//!
//! A subgroupoid file lists arrow ids, and optionally its base objects:
//! `{ "base": ["x", "y"], "arrows": ["e_x", ...] }`. Without `base`, the
//! endpoints of the listed arrows are used.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{Arrow, FiniteGroupoid, GroupoidError, Subgroupoid};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ArrowRecord {
    pub id: String,
    pub src: String,
    pub tgt: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupoidFile {
    pub objects: Vec<String>,
    pub arrows: Vec<ArrowRecord>,
    pub compose: Vec<[String; 3]>,
    pub identity: BTreeMap<String, String>,
    pub inverse: BTreeMap<String, String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubgroupoidFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base: Option<Vec<String>>,
    pub arrows: Vec<String>,
}

impl GroupoidFile {
    pub fn from_groupoid(g: &FiniteGroupoid) -> Self {
        let n = g.arrow_count();
        let mut compose = Vec::new();
        for a in 0..n {
            for b in 0..n {
                if let Some(c) = g.compose(a, b) {
                    compose.push([
                        g.arrow_name(a).to_string(),
                        g.arrow_name(b).to_string(),
                        g.arrow_name(c).to_string(),
                    ]);
                }
            }
        }
        Self {
            objects: g.object_names().to_vec(),
            arrows: (0..n)
                .map(|a| ArrowRecord {
                    id: g.arrow_name(a).to_string(),
                    src: g.object_name(g.source(a)).to_string(),
                    tgt: g.object_name(g.target(a)).to_string(),
                })
                .collect(),
            compose,
            identity: (0..g.object_count())
                .map(|x| (g.object_name(x).to_string(), g.arrow_name(g.identity(x)).to_string()))
                .collect(),
            inverse: (0..n)
                .map(|a| (g.arrow_name(a).to_string(), g.arrow_name(g.inverse(a)).to_string()))
                .collect(),
        }
    }

    pub fn into_groupoid(self) -> Result<FiniteGroupoid, GroupoidError> {
        let object_index: BTreeMap<&str, usize> = self
            .objects
            .iter()
            .enumerate()
            .map(|(i, s)| (s.as_str(), i))
            .collect();
        let arrow_index: BTreeMap<&str, usize> = self
            .arrows
            .iter()
            .enumerate()
            .map(|(i, a)| (a.id.as_str(), i))
            .collect();
        let obj = |s: &str| object_index.get(s).copied().ok_or_else(|| GroupoidError::UnknownObject(s.into()));
        let arr = |s: &str| arrow_index.get(s).copied().ok_or_else(|| GroupoidError::UnknownArrow(s.into()));

        let arrows = self
            .arrows
            .iter()
            .map(|a| Ok(Arrow { source: obj(&a.src)?, target: obj(&a.tgt)? }))
            .collect::<Result<Vec<_>, GroupoidError>>()?;
        let n = arrows.len();
        let mut compose = vec![None; n * n];
        for [g, h, gh] in &self.compose {
            let slot = &mut compose[arr(g)? * n + arr(h)?];
            if slot.is_some() {
                return Err(GroupoidError::Inconsistent {
                    table: "compose",
                    detail: format!("product of `{g}` and `{h}` listed twice"),
                });
            }
            *slot = Some(arr(gh)?);
        }
        let identity = self
            .objects
            .iter()
            .map(|x| {
                let e = self.identity.get(x).ok_or_else(|| GroupoidError::Inconsistent {
                    table: "identity",
                    detail: format!("object `{x}` has no identity"),
                })?;
                arr(e)
            })
            .collect::<Result<Vec<_>, _>>()?;
        if let Some(x) = self.identity.keys().find(|x| !object_index.contains_key(x.as_str())) {
            return Err(GroupoidError::UnknownObject(x.clone()));
        }
        let inverse = self
            .arrows
            .iter()
            .map(|a| {
                let inv = self.inverse.get(&a.id).ok_or_else(|| GroupoidError::Inconsistent {
                    table: "inverse",
                    detail: format!("arrow `{}` has no inverse", a.id),
                })?;
                arr(inv)
            })
            .collect::<Result<Vec<_>, _>>()?;
        if let Some(a) = self.inverse.keys().find(|a| !arrow_index.contains_key(a.as_str())) {
            return Err(GroupoidError::UnknownArrow(a.clone()));
        }
        FiniteGroupoid::from_tables(
            self.objects.clone(),
            self.arrows.iter().map(|a| a.id.clone()).collect(),
            arrows,
            compose,
            identity,
            inverse,
        )
    }
}

impl SubgroupoidFile {
    pub fn from_subgroupoid(parent: &FiniteGroupoid, sub: &Subgroupoid) -> Self {
        Self {
            base: Some(sub.base.iter().map(|&x| parent.object_name(x).to_string()).collect()),
            arrows: sub.arrows.iter().map(|&a| parent.arrow_name(a).to_string()).collect(),
        }
    }

    pub fn resolve(&self, parent: &FiniteGroupoid) -> Result<Subgroupoid, GroupoidError> {
        let mut sub = Subgroupoid::default();
        for name in &self.arrows {
            let a = parent.arrow_id(name).ok_or_else(|| GroupoidError::UnknownArrow(name.clone()))?;
            sub.arrows.insert(a);
        }
        match &self.base {
            Some(base) => {
                for name in base {
                    let x = parent.object_id(name).ok_or_else(|| GroupoidError::UnknownObject(name.clone()))?;
                    sub.base.insert(x);
                }
            }
            None => {
                for &a in &sub.arrows {
                    sub.base.insert(parent.source(a));
                    sub.base.insert(parent.target(a));
                }
            }
        }
        Ok(sub)
    }
}

pub fn parse_groupoid(json: &str) -> Result<FiniteGroupoid, IoError> {
    let file: GroupoidFile = serde_json::from_str(json)?;
    Ok(file.into_groupoid()?)
}

pub fn parse_subgroupoid(json: &str, parent: &FiniteGroupoid) -> Result<Subgroupoid, IoError> {
    let file: SubgroupoidFile = serde_json::from_str(json)?;
    Ok(file.resolve(parent)?)
}

pub fn groupoid_to_json(g: &FiniteGroupoid) -> String {
    serde_json::to_string_pretty(&GroupoidFile::from_groupoid(g)).expect("serializable")
}

pub fn subgroupoid_to_json(parent: &FiniteGroupoid, sub: &Subgroupoid) -> String {
    serde_json::to_string_pretty(&SubgroupoidFile::from_subgroupoid(parent, sub)).expect("serializable")
}

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Groupoid(#[from] GroupoidError),
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groupoid::{counterexample, FiniteGroup};

    #[test]
    fn groupoid_json_round_trip() {
        let g = FiniteGroupoid::trivial(&["x", "y"], &FiniteGroup::symmetric3());
        let back = parse_groupoid(&groupoid_to_json(&g)).unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn subgroupoid_json_round_trip() {
        let (g, h) = counterexample();
        let back = parse_subgroupoid(&subgroupoid_to_json(&g, &h), &g).unwrap();
        assert_eq!(back, h);
    }

    #[test]
    fn base_defaults_to_endpoints() {
        let g = FiniteGroupoid::pair(&["a", "b", "c"]);
        let sub = parse_subgroupoid(r#"{"arrows": ["(a,a)", "(b,b)", "(a,b)", "(b,a)"]}"#, &g).unwrap();
        assert_eq!(sub.base.len(), 2);
        assert!(sub.defect(&g).is_none());
    }

    #[test]
    fn unknown_references_are_errors() {
        let g = FiniteGroupoid::pair(&["a"]);
        assert!(matches!(
            parse_subgroupoid(r#"{"arrows": ["nope"]}"#, &g),
            Err(IoError::Groupoid(GroupoidError::UnknownArrow(_)))
        ));
        let bad = r#"{"objects": ["a"], "arrows": [{"id": "e", "src": "a", "tgt": "b"}],
                      "compose": [], "identity": {"a": "e"}, "inverse": {"e": "e"}}"#;
        assert!(matches!(parse_groupoid(bad), Err(IoError::Groupoid(GroupoidError::UnknownObject(_)))));
        assert!(matches!(parse_groupoid("{"), Err(IoError::Json(_))));
    }
}
