//! Versioned JSON model documents.
//!
//! ```text
//! { "format_version": 1,
//!   "config": { "ntree", "mtry", "min_node_size", "bootstrap", "seed" },
//!   "feature_names": [...],
//!   "train_targets": [...],
//!   "trees": [ { "seed": u64,
//!                "nodes": [ { "id": 0, "kind": "split", "feature", "threshold", "left", "right" },
//!                           { "id": 1, "kind": "leaf", "indices": [...] }, ... ] } ] }
//! ```
//!
//! Nodes are listed in pre-order and ids must equal list positions.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, ForestError, Result};

use super::{Forest, ForestConfig, Node, Tree};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct VersionProbe {
    format_version: u32,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelDoc {
    format_version: u32,
    config: ForestConfig,
    feature_names: Vec<String>,
    train_targets: Vec<f64>,
    trees: Vec<TreeDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TreeDoc {
    seed: u64,
    nodes: Vec<NodeDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
enum NodeDoc {
    Split {
        id: usize,
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
    Leaf {
        id: usize,
        indices: Vec<usize>,
    },
}

impl Forest {
    pub fn to_json(&self) -> String {
        let doc = ModelDoc {
            format_version: FORMAT_VERSION,
            config: self.config().clone(),
            feature_names: self.feature_names().to_vec(),
            train_targets: self.train_targets().to_vec(),
            trees: self
                .trees()
                .iter()
                .map(|t| TreeDoc {
                    seed: t.seed(),
                    nodes: t
                        .nodes()
                        .iter()
                        .enumerate()
                        .map(|(id, n)| match n {
                            Node::Split {
                                feature,
                                threshold,
                                left,
                                right,
                            } => NodeDoc::Split {
                                id,
                                feature: *feature,
                                threshold: *threshold,
                                left: *left,
                                right: *right,
                            },
                            Node::Leaf { indices } => NodeDoc::Leaf {
                                id,
                                indices: indices.clone(),
                            },
                        })
                        .collect(),
                })
                .collect(),
        };
        serde_json::to_string(&doc).expect("model document serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, ForestError> {
        let probe: VersionProbe =
            serde_json::from_str(text).map_err(|e| ForestError::InvalidModel(e.to_string()))?;
        if probe.format_version != FORMAT_VERSION {
            return Err(ForestError::UnsupportedFormatVersion(probe.format_version));
        }
        let doc: ModelDoc =
            serde_json::from_str(text).map_err(|e| ForestError::InvalidModel(e.to_string()))?;
        if doc.config.ntree != doc.trees.len() {
            return Err(ForestError::InvalidModel(format!(
                "config says {} trees, document has {}",
                doc.config.ntree,
                doc.trees.len()
            )));
        }
        let m = doc.feature_names.len();
        let n = doc.train_targets.len();
        let trees = doc
            .trees
            .into_iter()
            .map(|t| {
                let nodes = t
                    .nodes
                    .into_iter()
                    .enumerate()
                    .map(|(pos, nd)| {
                        let (id, node) = match nd {
                            NodeDoc::Split {
                                id,
                                feature,
                                threshold,
                                left,
                                right,
                            } => (
                                id,
                                Node::Split {
                                    feature,
                                    threshold,
                                    left,
                                    right,
                                },
                            ),
                            NodeDoc::Leaf { id, indices } => (id, Node::Leaf { indices }),
                        };
                        if id != pos {
                            return Err(ForestError::InvalidModel(format!(
                                "node id {id} at position {pos}"
                            )));
                        }
                        Ok(node)
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                Tree::from_nodes(nodes, t.seed, m, n)
            })
            .collect::<Result<Vec<_>, _>>()?;
        Forest::from_parts(trees, doc.train_targets, doc.config, doc.feature_names)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(Self::from_json(&text)?)
    }
}
