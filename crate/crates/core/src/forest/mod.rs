//! Regression random forest with leaf-retained training indices.
//!
//! A forest answers every query through its weight vector: the average over
//! trees of `1 / |leaf|` on the training rows sharing a leaf with the query.
//! The conditional mean is the weighted sum of training targets; the
//! [`crate::qrf`] module reuses the same weights for the full conditional
//! distribution.

mod importance;
mod pdp;
mod persist;
mod tree;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::ForestError;
use crate::numeric::derive_seed;

pub use importance::{FeatureImportance, ImportanceReport};
pub use pdp::default_grid;
pub use persist::FORMAT_VERSION;
pub use tree::{Node, Tree};

use tree::GrowParams;

/// Hyper-parameters for [`Forest::fit`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForestConfig {
    /// Number of trees.
    pub ntree: usize,
    /// Features tried per split; `None` means `max(M / 3, 1)`.
    pub mtry: Option<usize>,
    /// A node with fewer than `2 * min_node_size` rows becomes a leaf.
    pub min_node_size: usize,
    /// Grow each tree on a bootstrap resample instead of all rows.
    pub bootstrap: bool,
    pub seed: u64,
}

impl Default for ForestConfig {
    fn default() -> Self {
        Self {
            ntree: 500,
            mtry: None,
            min_node_size: 5,
            bootstrap: true,
            seed: 42,
        }
    }
}

impl ForestConfig {
    pub fn resolved_mtry(&self, n_features: usize) -> usize {
        self.mtry.unwrap_or_else(|| (n_features / 3).max(1))
    }

    pub fn validate(&self, n_features: usize) -> Result<(), ForestError> {
        let mtry = self.resolved_mtry(n_features);
        if self.ntree == 0 {
            return Err(ForestError::InvalidConfig("ntree must be at least 1".into()));
        }
        if self.min_node_size == 0 {
            return Err(ForestError::InvalidConfig(
                "min_node_size must be at least 1".into(),
            ));
        }
        if n_features == 0 {
            return Err(ForestError::InvalidConfig("data has no features".into()));
        }
        if mtry == 0 || mtry > n_features {
            return Err(ForestError::InvalidConfig(format!(
                "mtry={mtry} must lie in 1..={n_features}"
            )));
        }
        Ok(())
    }

    /// Seed of tree `index`, independent of build order.
    pub fn tree_seed(&self, index: usize) -> u64 {
        derive_seed(self.seed, index as u64)
    }
}

/// Per-training-row weights for one query point.
///
/// Entries are non-negative and sum to one (up to rounding).
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector {
    weights: Vec<f64>,
}

impl WeightVector {
    pub(crate) fn from_raw(weights: Vec<f64>) -> Self {
        Self { weights }
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn sum(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// `sum_i w_i * values_i`, accumulated in index order.
    pub fn dot(&self, values: &[f64]) -> f64 {
        self.weights.iter().zip(values).map(|(w, v)| w * v).sum()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.weights
    }
}

/// Trained ensemble. Immutable; all queries take `&self`.
#[derive(Debug, Clone, PartialEq)]
pub struct Forest {
    trees: Vec<Tree>,
    train_targets: Vec<f64>,
    config: ForestConfig,
    feature_names: Vec<String>,
}

impl Forest {
    /// Grow `config.ntree` trees in parallel.
    ///
    /// Each tree draws from its own stream seeded by
    /// [`ForestConfig::tree_seed`], so the result is bit-identical for a given
    /// `(train, config)` regardless of thread count.
    pub fn fit(train: &Dataset, config: &ForestConfig) -> Result<Self, ForestError> {
        if train.is_empty() {
            return Err(ForestError::EmptyTrainingSet);
        }
        let m = train.n_features();
        config.validate(m)?;
        let mut config = config.clone();
        config.mtry = Some(config.resolved_mtry(m));
        let params = GrowParams {
            mtry: config.resolved_mtry(m),
            min_node_size: config.min_node_size,
            bootstrap: config.bootstrap,
        };
        let trees = (0..config.ntree)
            .into_par_iter()
            .map(|i| Tree::grow(train.features(), train.target(), &params, config.tree_seed(i)))
            .collect();
        Ok(Self {
            trees,
            train_targets: train.target().to_vec(),
            config,
            feature_names: train.feature_names().to_vec(),
        })
    }

    /// Reassemble a forest from parts, validating every tree.
    pub fn from_parts(
        trees: Vec<Tree>,
        train_targets: Vec<f64>,
        config: ForestConfig,
        feature_names: Vec<String>,
    ) -> Result<Self, ForestError> {
        if trees.is_empty() {
            return Err(ForestError::InvalidModel("forest has no trees".into()));
        }
        if train_targets.is_empty() || train_targets.iter().any(|t| !t.is_finite()) {
            return Err(ForestError::InvalidModel(
                "training targets must be nonempty and finite".into(),
            ));
        }
        config.validate(feature_names.len())?;
        Ok(Self {
            trees,
            train_targets,
            config,
            feature_names,
        })
    }

    pub fn trees(&self) -> &[Tree] {
        &self.trees
    }

    pub fn config(&self) -> &ForestConfig {
        &self.config
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn n_features(&self) -> usize {
        self.feature_names.len()
    }

    pub fn train_targets(&self) -> &[f64] {
        &self.train_targets
    }

    pub fn n_train(&self) -> usize {
        self.train_targets.len()
    }

    fn check_query(&self, x: &[f64]) -> Result<(), ForestError> {
        if x.len() != self.n_features() {
            return Err(ForestError::DimensionMismatch {
                expected: self.n_features(),
                found: x.len(),
            });
        }
        Ok(())
    }

    /// Weights of a single tree.
    pub fn tree_weights(&self, tree: usize, x: &[f64]) -> Result<WeightVector, ForestError> {
        self.check_query(x)?;
        Ok(self.trees[tree].weights(x, self.n_train()))
    }

    /// Mean of the per-tree weight vectors.
    pub fn forest_weights(&self, x: &[f64]) -> Result<WeightVector, ForestError> {
        self.check_query(x)?;
        let mut w = vec![0.0; self.n_train()];
        for tree in &self.trees {
            let leaf = tree.leaf(x);
            let share = 1.0 / leaf.len() as f64;
            for &i in leaf {
                w[i] += share;
            }
        }
        let k = self.trees.len() as f64;
        for v in &mut w {
            *v /= k;
        }
        Ok(WeightVector::from_raw(w))
    }

    /// Conditional mean: forest weights dotted with the training targets.
    pub fn predict_mean(&self, x: &[f64]) -> Result<f64, ForestError> {
        Ok(self.forest_weights(x)?.dot(&self.train_targets))
    }
}
