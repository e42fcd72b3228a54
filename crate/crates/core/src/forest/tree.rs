//! CART regression trees whose leaves remember their training rows.

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::ForestError;

use super::WeightVector;

/// A node in pre-order layout. Children of a split always have larger ids.
#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    /// `x[feature] <= threshold` goes left, everything else right.
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
    /// Sorted, distinct training-row indices that reached this leaf.
    Leaf { indices: Vec<usize> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Tree {
    nodes: Vec<Node>,
    seed: u64,
}

pub(crate) struct GrowParams {
    pub mtry: usize,
    pub min_node_size: usize,
    pub bootstrap: bool,
}

impl Tree {
    /// Assemble a tree from pre-ordered nodes, checking structure.
    ///
    /// Node `i`'s left child must be `i + 1`, every node other than the root
    /// must be referenced exactly once, and leaves must hold sorted,
    /// distinct indices below `n_train`.
    pub fn from_nodes(
        nodes: Vec<Node>,
        seed: u64,
        n_features: usize,
        n_train: usize,
    ) -> Result<Self, ForestError> {
        let bad = |msg: String| Err(ForestError::InvalidModel(msg));
        if nodes.is_empty() {
            return bad("tree has no nodes".into());
        }
        // Walk in pre-order and check that the visit order is 0, 1, 2, ...
        let mut expected = 0usize;
        let mut stack = vec![0usize];
        while let Some(id) = stack.pop() {
            if id != expected {
                return bad(format!("node {id} visited out of pre-order (expected {expected})"));
            }
            expected += 1;
            match &nodes[id] {
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    if *feature >= n_features {
                        return bad(format!("node {id} splits on unknown feature {feature}"));
                    }
                    if !threshold.is_finite() {
                        return bad(format!("node {id} has a non-finite threshold"));
                    }
                    if *left != id + 1 || *right <= *left || *right >= nodes.len() {
                        return bad(format!("node {id} has invalid children {left}, {right}"));
                    }
                    stack.push(*right);
                    stack.push(*left);
                }
                Node::Leaf { indices } => {
                    if indices.is_empty() {
                        return bad(format!("leaf {id} is empty"));
                    }
                    if indices.windows(2).any(|w| w[0] >= w[1]) {
                        return bad(format!("leaf {id} indices are not sorted and distinct"));
                    }
                    if indices.last().is_some_and(|&i| i >= n_train) {
                        return bad(format!("leaf {id} references a row beyond {n_train}"));
                    }
                }
            }
        }
        if expected != nodes.len() {
            return bad(format!(
                "{} of {} nodes unreachable from the root",
                nodes.len() - expected,
                nodes.len()
            ));
        }
        let mut seen = vec![false; n_train];
        for node in &nodes {
            if let Node::Leaf { indices } = node {
                for &i in indices {
                    if std::mem::replace(&mut seen[i], true) {
                        return bad(format!("row {i} appears in more than one leaf"));
                    }
                }
            }
        }
        Ok(Self { nodes, seed })
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    /// Seed of the random stream this tree was grown from.
    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Training rows in the leaf that `x` falls into.
    pub fn leaf(&self, x: &[f64]) -> &[usize] {
        let mut id = 0;
        loop {
            match &self.nodes[id] {
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => id = if x[*feature] <= *threshold { *left } else { *right },
                Node::Leaf { indices } => return indices,
            }
        }
    }

    /// `1 / |leaf(x)|` on each row of the leaf reached by `x`, zero elsewhere.
    pub fn weights(&self, x: &[f64], n_train: usize) -> WeightVector {
        let mut w = vec![0.0; n_train];
        let leaf = self.leaf(x);
        let share = 1.0 / leaf.len() as f64;
        for &i in leaf {
            w[i] = share;
        }
        WeightVector::from_raw(w)
    }

    /// Mean target of the leaf reached by `x`.
    pub fn predict(&self, x: &[f64], targets: &[f64]) -> f64 {
        let leaf = self.leaf(x);
        leaf.iter().map(|&i| targets[i]).sum::<f64>() / leaf.len() as f64
    }

    /// Rows that were drawn for this tree, in increasing order.
    pub fn in_bag_rows(&self) -> Vec<usize> {
        let mut rows: Vec<usize> = self
            .nodes
            .iter()
            .filter_map(|n| match n {
                Node::Leaf { indices } => Some(indices.iter().copied()),
                Node::Split { .. } => None,
            })
            .flatten()
            .collect();
        rows.sort_unstable();
        rows
    }

    /// Rows never drawn for this tree.
    pub fn oob_rows(&self, n_train: usize) -> Vec<usize> {
        let mut in_bag = vec![false; n_train];
        for i in self.in_bag_rows() {
            in_bag[i] = true;
        }
        (0..n_train).filter(|&i| !in_bag[i]).collect()
    }

    pub fn n_leaves(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| matches!(n, Node::Leaf { .. }))
            .count()
    }

    /// Grow one tree on `(features, targets)` from its own random stream.
    pub(crate) fn grow(features: &[Vec<f64>], targets: &[f64], params: &GrowParams, seed: u64) -> Self {
        let n = targets.len();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let samples: Vec<usize> = if params.bootstrap {
            (0..n).map(|_| rng.random_range(0..n)).collect()
        } else {
            (0..n).collect()
        };
        let mut builder = Builder {
            features,
            targets,
            params,
            rng,
            nodes: Vec::new(),
        };
        builder.build(samples);
        Self {
            nodes: builder.nodes,
            seed,
        }
    }
}

struct Builder<'a> {
    features: &'a [Vec<f64>],
    targets: &'a [f64],
    params: &'a GrowParams,
    rng: ChaCha8Rng,
    nodes: Vec<Node>,
}

struct Candidate {
    feature: usize,
    threshold: f64,
    gain: f64,
}

impl Builder<'_> {
    /// Grow the subtree for `samples` (may contain repeats) and return its id.
    fn build(&mut self, samples: Vec<usize>) -> usize {
        let id = self.nodes.len();
        self.nodes.push(Node::Leaf { indices: Vec::new() });

        let first = self.targets[samples[0]];
        let pure = samples.iter().all(|&i| self.targets[i] == first);
        let split = if pure || samples.len() < 2 * self.params.min_node_size {
            None
        } else {
            self.best_split(&samples)
        };

        match split {
            None => {
                let mut indices = samples;
                indices.sort_unstable();
                indices.dedup();
                self.nodes[id] = Node::Leaf { indices };
            }
            Some(c) => {
                let (left, right): (Vec<usize>, Vec<usize>) = samples
                    .into_iter()
                    .partition(|&i| self.features[i][c.feature] <= c.threshold);
                let left_id = self.build(left);
                let right_id = self.build(right);
                self.nodes[id] = Node::Split {
                    feature: c.feature,
                    threshold: c.threshold,
                    left: left_id,
                    right: right_id,
                };
            }
        }
        id
    }

    /// Variance-reduction split over `mtry` randomly chosen features.
    ///
    /// Gain is `S_l^2/n_l + S_r^2/n_r` on node-centred targets, which equals
    /// the drop in summed squared error. Ties keep the lowest feature index,
    /// then the smallest threshold. Both children must keep at least
    /// `min_node_size` samples. When none of the drawn features admits such a
    /// split, the remaining features are tried in index order.
    fn best_split(&mut self, samples: &[usize]) -> Option<Candidate> {
        let m = self.features[0].len();
        let mut drawn = index::sample(&mut self.rng, m, self.params.mtry).into_vec();
        drawn.sort_unstable();

        let centre = samples.iter().map(|&i| self.targets[i]).sum::<f64>() / samples.len() as f64;
        let mut pairs: Vec<(f64, f64)> = Vec::with_capacity(samples.len());
        let mut best: Option<Candidate> = None;
        for &feature in &drawn {
            self.scan(feature, samples, centre, &mut pairs, &mut best);
        }
        if best.is_none() {
            for feature in (0..m).filter(|j| !drawn.contains(j)) {
                self.scan(feature, samples, centre, &mut pairs, &mut best);
                if best.is_some() {
                    break;
                }
            }
        }
        best
    }

    fn scan(
        &self,
        feature: usize,
        samples: &[usize],
        centre: f64,
        pairs: &mut Vec<(f64, f64)>,
        best: &mut Option<Candidate>,
    ) {
        let n = samples.len() as f64;
        pairs.clear();
        pairs.extend(
            samples
                .iter()
                .map(|&i| (self.features[i][feature], self.targets[i] - centre)),
        );
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let total: f64 = pairs.iter().map(|p| p.1).sum();
        let min_child = self.params.min_node_size;
        let mut left_sum = 0.0;
        for k in 0..pairs.len() - 1 {
            left_sum += pairs[k].1;
            let (lo, hi) = (pairs[k].0, pairs[k + 1].0);
            if lo == hi || k + 1 < min_child || pairs.len() - k - 1 < min_child {
                continue;
            }
            let n_left = (k + 1) as f64;
            let right_sum = total - left_sum;
            let gain = left_sum * left_sum / n_left + right_sum * right_sum / (n - n_left);
            if best.as_ref().is_none_or(|b| gain > b.gain) {
                let mut threshold = lo + (hi - lo) / 2.0;
                if threshold >= hi {
                    threshold = lo;
                }
                *best = Some(Candidate {
                    feature,
                    threshold,
                    gain,
                });
            }
        }
    }
}
