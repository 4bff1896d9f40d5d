//! JSON instance documents.
//!
//! ```json
//! {
//!   "agents": 2,
//!   "bundles": ["item", "empty"],
//!   "types": [[{"values": {"item": 1, "empty": 0}}], [{"name": "hi", "values": {"item": 2, "empty": 0}}]],
//!   "allocation": [{"profile": [0, 0], "assigned": ["item", "empty"]}]
//! }
//! ```
//!
//! Unknown keys are rejected. `name` is optional and only needed to tell apart
//! types with identical values.

use std::collections::BTreeMap;

use efic_core::{Instance, InstanceParts, ModelError, TypeSpec};
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("malformed CSV: {0}")]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("{0}")]
    Payments(String),
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceDoc {
    agents: usize,
    bundles: Vec<String>,
    types: Vec<Vec<TypeDoc>>,
    allocation: Vec<RowDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TypeDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    name: Option<String>,
    values: BTreeMap<String, f64>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RowDoc {
    profile: Vec<usize>,
    assigned: Vec<String>,
}

pub fn parse_instance(text: &str) -> Result<Instance, FormatError> {
    let doc: InstanceDoc = serde_json::from_str(text)?;
    let parts = InstanceParts {
        agents: doc.agents,
        bundles: doc.bundles,
        types: doc
            .types
            .into_iter()
            .map(|space| {
                space
                    .into_iter()
                    .map(|t| TypeSpec {
                        name: t.name,
                        values: t.values.into_iter().collect(),
                    })
                    .collect()
            })
            .collect(),
        allocation: doc
            .allocation
            .into_iter()
            .map(|r| (r.profile, r.assigned))
            .collect(),
    };
    Ok(Instance::from_parts(parts)?)
}

/// Pretty-printed document; `parse_instance` inverts it exactly.
pub fn instance_to_json(inst: &Instance) -> String {
    let parts = inst.to_parts();
    let doc = InstanceDoc {
        agents: parts.agents,
        bundles: parts.bundles,
        types: parts
            .types
            .into_iter()
            .map(|space| {
                space
                    .into_iter()
                    .map(|t| TypeDoc {
                        name: t.name,
                        values: t.values.into_iter().collect(),
                    })
                    .collect()
            })
            .collect(),
        allocation: parts
            .allocation
            .into_iter()
            .map(|(profile, assigned)| RowDoc { profile, assigned })
            .collect(),
    };
    serde_json::to_string_pretty(&doc).expect("instance documents always serialize")
}
