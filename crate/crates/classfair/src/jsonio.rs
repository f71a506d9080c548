//! JSON interchange for instances and matchings.
//!
//! Instance files:
//!
//! ```json
//! { "classes": [[0, 1], [2]],
//!   "items":   [0, 1, 2],
//!   "edges":   [[0, 0], [2, 1]] }
//! ```
//!
//! `classes` lists agent ids per class, `items` lists item ids in arrival
//! order, `edges` lists `[agent, item]` pairs. Ids must be dense: agents
//! exactly `0..n`, and `items` exactly `[0, 1, ..., m-1]` (arrival position
//! equals id), so that matching files are unambiguous and emit/parse is an
//! exact round-trip.
//!
//! Matching files:
//!
//! ```json
//! { "assign": [[0, 0, "1/2"], [1, 0, "1/2"]] }
//! ```
//!
//! Each entry is `[agent, item, "num/den"]` with exact rational masses;
//! parsing validates edge support and capacities against the instance.

use crate::frac::{format_ratio, parse_ratio, FracParseError};
use crate::instance::{Instance, InstanceError};
use crate::matching::{FractionalMatching, MatchingError};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum JsonError {
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("items array must be [0, 1, ..., m-1] in arrival order")]
    NonDenseItems,
    #[error(transparent)]
    Instance(#[from] InstanceError),
    #[error(transparent)]
    Matching(#[from] MatchingError),
    #[error("bad rational at ({agent}, {item}): {source}")]
    BadMass {
        agent: usize,
        item: usize,
        source: FracParseError,
    },
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Serialize, Deserialize)]
struct InstanceJson {
    classes: Vec<Vec<usize>>,
    items: Vec<usize>,
    edges: Vec<(usize, usize)>,
}

#[derive(Serialize, Deserialize)]
struct MatchingJson {
    assign: Vec<(usize, usize, String)>,
}

/// Serializes an instance (pretty-printed, stable field and entry order).
pub fn instance_to_json(inst: &Instance) -> String {
    let doc = InstanceJson {
        classes: inst.classes().to_vec(),
        items: (0..inst.n_items()).collect(),
        edges: inst.edges().collect(),
    };
    serde_json::to_string_pretty(&doc).expect("instance serializes")
}

/// Parses and validates an instance document.
pub fn parse_instance(text: &str) -> Result<Instance, JsonError> {
    let doc: InstanceJson = serde_json::from_str(text)?;
    if doc.items.iter().copied().ne(0..doc.items.len()) {
        return Err(JsonError::NonDenseItems);
    }
    Ok(Instance::new(doc.classes, doc.items.len(), doc.edges)?)
}

/// Serializes a matching's nonzero entries as exact `"num/den"` strings.
pub fn matching_to_json(m: &FractionalMatching) -> String {
    let doc = MatchingJson {
        assign: m.support().map(|(a, o, v)| (a, o, format_ratio(v))).collect(),
    };
    serde_json::to_string_pretty(&doc).expect("matching serializes")
}

/// Parses a matching document and validates it against `inst`.
pub fn parse_matching(text: &str, inst: &Instance) -> Result<FractionalMatching, JsonError> {
    let doc: MatchingJson = serde_json::from_str(text)?;
    let mut m = FractionalMatching::empty(inst.n_agents(), inst.n_items());
    for (agent, item, mass) in doc.assign {
        let v = parse_ratio(&mass).map_err(|source| JsonError::BadMass { agent, item, source })?;
        if agent >= inst.n_agents() || item >= inst.n_items() {
            return Err(JsonError::Matching(MatchingError::NotAnEdge { agent, item }));
        }
        if v < num::Zero::zero() {
            return Err(JsonError::Matching(MatchingError::NegativeMass { agent, item }));
        }
        m.add(agent, item, &v);
    }
    m.validate(inst)?;
    Ok(m)
}

pub fn load_instance(path: &std::path::Path) -> Result<Instance, JsonError> {
    parse_instance(&std::fs::read_to_string(path)?)
}

pub fn load_matching(
    path: &std::path::Path,
    inst: &Instance,
) -> Result<FractionalMatching, JsonError> {
    parse_matching(&std::fs::read_to_string(path)?, inst)
}
