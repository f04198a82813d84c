//! Representation and endomorphism files.
//!
//! ```json
//! { "category": "cat.json",
//!   "dims": {"a": 2, "b": 1},
//!   "action": {"f": [["1", "0"]], …} }
//! ```
//!
//! Identity actions may be omitted. An endomorphism file carries
//! `"dimS"`, `"dimT"` and `"components": {obj: matrix}`. The `"category"`
//! field, when it is an inline category, must match the category given
//! alongside; a string is taken as a file reference and not interpreted here.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{validate_endo, validate_rep, RepReport, Representation, TwistedEndo};
use crate::exactla::{RatMatrix, Rational};
use crate::fincat::{CategoryFile, FinCategory};

#[derive(Debug, thiserror::Error)]
pub enum RepFileError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("semantic error: {0}")]
    Semantic(String),
    #[error("invalid:\n{0}")]
    Invalid(RepReport),
}

#[derive(Debug, Serialize, Deserialize)]
struct RepFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    category: Option<serde_json::Value>,
    dims: BTreeMap<String, usize>,
    #[serde(default)]
    action: BTreeMap<String, Vec<Vec<Rational>>>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
struct EndoFile {
    dim_s: usize,
    dim_t: usize,
    components: BTreeMap<String, Vec<Vec<Rational>>>,
}

fn syntax(e: serde_json::Error) -> RepFileError {
    RepFileError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    }
}

fn matrix(
    rows: usize,
    cols: usize,
    data: Vec<Vec<Rational>>,
    what: &str,
) -> Result<RatMatrix, RepFileError> {
    let bad = || RepFileError::Semantic(format!("{what} should be {rows}×{cols}"));
    if rows == 0 || cols == 0 {
        // `[]` or a list of empty rows both denote an empty matrix.
        if data.len() == rows && data.iter().all(Vec::is_empty) || data.is_empty() {
            return Ok(RatMatrix::zeros(rows, cols));
        }
        return Err(bad());
    }
    if data.len() != rows || data.iter().any(|r| r.len() != cols) {
        return Err(bad());
    }
    Ok(RatMatrix::from_rows(data).expect("rectangular"))
}

fn check_category(
    value: &Option<serde_json::Value>,
    base: &FinCategory,
) -> Result<(), RepFileError> {
    if let Some(v @ serde_json::Value::Object(_)) = value {
        let file: CategoryFile = serde_json::from_value(v.clone())
            .map_err(|e| RepFileError::Semantic(format!("inline category: {e}")))?;
        let inline = file
            .to_category()
            .map_err(|e| RepFileError::Semantic(format!("inline category: {e}")))?;
        if &inline != base {
            return Err(RepFileError::Semantic(
                "inline category differs from the given category".into(),
            ));
        }
    }
    Ok(())
}

pub fn parse_representation(
    text: &str,
    base: Arc<FinCategory>,
) -> Result<Representation, RepFileError> {
    let file: RepFile = serde_json::from_str(text).map_err(syntax)?;
    check_category(&file.category, &base)?;
    let c = &base;
    for name in file.dims.keys() {
        c.object_index(name)
            .ok_or_else(|| RepFileError::Semantic(format!("unknown object {name:?}")))?;
    }
    let dims = (0..c.num_objects())
        .map(|i| {
            file.dims.get(c.object_name(i)).copied().ok_or_else(|| {
                RepFileError::Semantic(format!("no dimension for object {:?}", c.object_name(i)))
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut action: Vec<Option<RatMatrix>> = vec![None; c.num_morphisms()];
    for (name, data) in file.action {
        let h = c
            .morphism_index(&name)
            .ok_or_else(|| RepFileError::Semantic(format!("unknown morphism {name:?}")))?;
        action[h] = Some(matrix(
            dims[c.src(h)],
            dims[c.tgt(h)],
            data,
            &format!("action of {name}"),
        )?);
    }
    let action = action
        .into_iter()
        .enumerate()
        .map(|(h, m)| match m {
            Some(m) => Ok(m),
            None if c.is_identity(h) => Ok(RatMatrix::identity(dims[c.src(h)])),
            None => Err(RepFileError::Semantic(format!(
                "no action given for {:?}",
                c.morphism_name(h)
            ))),
        })
        .collect::<Result<Vec<_>, _>>()?;
    let a = Representation { base, dims, action };
    let report = validate_rep(&a);
    if !report.is_valid() {
        return Err(RepFileError::Invalid(report));
    }
    Ok(a)
}

pub fn parse_endo(text: &str, a: &Representation) -> Result<TwistedEndo, RepFileError> {
    let file: EndoFile = serde_json::from_str(text).map_err(syntax)?;
    let c = &a.base;
    let mut components: Vec<Option<RatMatrix>> = vec![None; c.num_objects()];
    for (name, data) in file.components {
        let i = c
            .object_index(&name)
            .ok_or_else(|| RepFileError::Semantic(format!("unknown object {name:?}")))?;
        let (r, k) = (a.dims[i] * file.dim_t, a.dims[i] * file.dim_s);
        components[i] = Some(matrix(r, k, data, &format!("component at {name}"))?);
    }
    let components = components
        .into_iter()
        .enumerate()
        .map(|(i, m)| match m {
            Some(m) => Ok(m),
            None if a.dims[i] == 0 => Ok(RatMatrix::zeros(0, 0)),
            None => Err(RepFileError::Semantic(format!(
                "no component for object {:?}",
                c.object_name(i)
            ))),
        })
        .collect::<Result<Vec<_>, _>>()?;
    let f = TwistedEndo {
        dim_s: file.dim_s,
        dim_t: file.dim_t,
        components,
    };
    let report = validate_endo(a, &f);
    if !report.is_valid() {
        return Err(RepFileError::Invalid(report));
    }
    Ok(f)
}

/// Non-identity actions only; `category` is written as the given reference.
pub fn serialize_representation(a: &Representation, category: Option<&str>) -> String {
    let c = &a.base;
    let file = RepFile {
        category: category.map(|s| serde_json::Value::String(s.into())),
        dims: (0..c.num_objects())
            .map(|i| (c.object_name(i).to_string(), a.dims[i]))
            .collect(),
        action: (0..c.num_morphisms())
            .filter(|&h| !c.is_identity(h))
            .map(|h| (c.morphism_name(h).to_string(), a.action[h].to_rows()))
            .collect(),
    };
    serde_json::to_string_pretty(&file).expect("representation serializes")
}

pub fn serialize_endo(a: &Representation, f: &TwistedEndo) -> String {
    let c = &a.base;
    let file = EndoFile {
        dim_s: f.dim_s,
        dim_t: f.dim_t,
        components: (0..c.num_objects())
            .map(|i| (c.object_name(i).to_string(), f.components[i].to_rows()))
            .collect(),
    };
    serde_json::to_string_pretty(&file).expect("endomorphism serializes")
}
