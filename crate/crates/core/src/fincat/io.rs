//! The JSON category file format.
//!
//! ```json
//! { "objects": ["a", "b"],
//!   "morphisms": [{"id": "ia", "src": "a", "tgt": "a"}, …],
//!   "identities": {"a": "ia", …},
//!   "compose": [["g", "f", "gf"], …] }
//! ```
//!
//! Compositions with an identity may be omitted and are inferred.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use super::{CategoryError, FinCategory, Morphism};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MorphismEntry {
    pub id: String,
    pub src: String,
    pub tgt: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CategoryFile {
    pub objects: Vec<String>,
    pub morphisms: Vec<MorphismEntry>,
    pub identities: BTreeMap<String, String>,
    #[serde(default)]
    pub compose: Vec<[String; 3]>,
}

#[derive(Debug, thiserror::Error)]
pub enum ParseError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("semantic error: {0}")]
    Semantic(String),
    #[error(transparent)]
    Category(#[from] CategoryError),
}

impl CategoryFile {
    pub fn from_category(c: &FinCategory) -> Self {
        let objects = c.objects().to_vec();
        let morphisms = c
            .morphisms()
            .iter()
            .map(|m| MorphismEntry {
                id: m.name.clone(),
                src: c.object_name(m.src).to_string(),
                tgt: c.object_name(m.tgt).to_string(),
            })
            .collect();
        let identities = (0..c.num_objects())
            .map(|i| {
                (
                    c.object_name(i).to_string(),
                    c.morphism_name(c.identity(i)).to_string(),
                )
            })
            .collect();
        let compose = c
            .composable_pairs()
            .filter(|&(g, f)| !c.is_identity(g) && !c.is_identity(f))
            .filter_map(|(g, f)| {
                c.try_compose(g, f).map(|gf| {
                    [
                        c.morphism_name(g).to_string(),
                        c.morphism_name(f).to_string(),
                        c.morphism_name(gf).to_string(),
                    ]
                })
            })
            .collect();
        CategoryFile {
            objects,
            morphisms,
            identities,
            compose,
        }
    }

    /// Resolves names; fails on unknown ids or non-composable table entries.
    /// Category axioms are not checked here.
    pub fn to_category(&self) -> Result<FinCategory, ParseError> {
        let sem = |m: String| ParseError::Semantic(m);
        let obj_index: HashMap<&str, usize> = self
            .objects
            .iter()
            .enumerate()
            .map(|(i, o)| (o.as_str(), i))
            .collect();
        let obj = |name: &str| {
            obj_index
                .get(name)
                .copied()
                .ok_or_else(|| sem(format!("unknown object {name:?}")))
        };
        let morphisms = self
            .morphisms
            .iter()
            .map(|m| {
                Ok(Morphism {
                    name: m.id.clone(),
                    src: obj(&m.src)?,
                    tgt: obj(&m.tgt)?,
                })
            })
            .collect::<Result<Vec<_>, ParseError>>()?;
        let mor_index: HashMap<&str, usize> = self
            .morphisms
            .iter()
            .enumerate()
            .map(|(i, m)| (m.id.as_str(), i))
            .collect();
        let mor = |name: &str| {
            mor_index
                .get(name)
                .copied()
                .ok_or_else(|| sem(format!("unknown morphism {name:?}")))
        };
        for o in self.identities.keys() {
            obj(o)?;
        }
        let identities = self
            .objects
            .iter()
            .map(|o| {
                self.identities
                    .get(o)
                    .ok_or_else(|| sem(format!("object {o:?} has no identity")))
                    .and_then(|m| mor(m))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let mut table = HashMap::new();
        for [g, f, gf] in &self.compose {
            let (gi, fi, gfi) = (mor(g)?, mor(f)?, mor(gf)?);
            if morphisms[gi].src != morphisms[fi].tgt {
                return Err(sem(format!(
                    "{g}∘{f} listed but {g} and {f} are not composable"
                )));
            }
            if table.insert((gi, fi), gfi).is_some_and(|prev| prev != gfi) {
                return Err(sem(format!("conflicting entries for {g}∘{f}")));
            }
        }
        let is_id = |f: usize| {
            identities.get(morphisms[f].src) == Some(&f) && morphisms[f].src == morphisms[f].tgt
        };
        Ok(FinCategory::from_table(
            self.objects.clone(),
            morphisms.clone(),
            identities.clone(),
            |g, f| {
                table.get(&(g, f)).copied().or_else(|| {
                    if is_id(g) {
                        Some(f)
                    } else if is_id(f) {
                        Some(g)
                    } else {
                        None
                    }
                })
            },
        ))
    }
}

fn syntax(e: serde_json::Error) -> ParseError {
    ParseError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    }
}

/// Parses a category file without checking the category axioms.
pub fn parse_category_unchecked(text: &str) -> Result<FinCategory, ParseError> {
    let file: CategoryFile = serde_json::from_str(text).map_err(syntax)?;
    file.to_category()
}

/// Parses and validates a category file.
pub fn parse_category(text: &str) -> Result<FinCategory, ParseError> {
    Ok(parse_category_unchecked(text)?.checked()?)
}

pub fn serialize_category(c: &FinCategory) -> String {
    serde_json::to_string_pretty(&CategoryFile::from_category(c)).expect("category file serializes")
}
