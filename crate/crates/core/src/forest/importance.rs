//! Out-of-bag permutation importance (%IncMSE).

use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::ForestError;
use crate::numeric::derive_seed;

use super::Forest;

const PERMUTATION_STREAM: u64 = 0x5045_524d_5554_4521;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureImportance {
    pub feature: String,
    /// 1 is the most important feature.
    pub rank: usize,
    /// Mean relative increase of out-of-bag MSE when the feature is shuffled.
    pub pct_inc_mse: f64,
}

/// Importance of every feature, in the forest's feature order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImportanceReport {
    pub features: Vec<FeatureImportance>,
}

impl ImportanceReport {
    fn from_scores(names: &[String], scores: Vec<f64>) -> Self {
        let mut order: Vec<usize> = (0..scores.len()).collect();
        order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
        let mut rank = vec![0; scores.len()];
        for (r, &j) in order.iter().enumerate() {
            rank[j] = r + 1;
        }
        let features = names
            .iter()
            .zip(scores)
            .zip(rank)
            .map(|((name, pct_inc_mse), rank)| FeatureImportance {
                feature: name.clone(),
                rank,
                pct_inc_mse,
            })
            .collect();
        Self { features }
    }

    /// Entries sorted by rank.
    pub fn ranked(&self) -> Vec<&FeatureImportance> {
        let mut v: Vec<_> = self.features.iter().collect();
        v.sort_by_key(|f| f.rank);
        v
    }

    /// Feature indices of the `k` best-ranked features.
    pub fn top_k(&self, k: usize) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.features.len()).collect();
        idx.sort_by_key(|&j| self.features[j].rank);
        idx.truncate(k);
        idx
    }

    pub fn get(&self, name: &str) -> Option<&FeatureImportance> {
        self.features.iter().find(|f| f.feature == name)
    }

    /// `feature,rank,pct_inc_mse`, one row per feature in feature order.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("feature,rank,pct_inc_mse\n");
        for f in &self.features {
            let _ = writeln!(out, "{},{},{:.4}", f.feature, f.rank, f.pct_inc_mse);
        }
        out
    }

    /// Text table with three-decimal scores.
    pub fn to_table(&self) -> String {
        let width = self
            .features
            .iter()
            .map(|f| f.feature.len())
            .max()
            .unwrap_or(7)
            .max(7);
        let mut out = format!("{:<width$} {:>5} {:>8}\n", "Feature", "Rank", "%IncMSE");
        for f in &self.features {
            let _ = writeln!(out, "{:<width$} {:>5} {:>8.3}", f.feature, f.rank, f.pct_inc_mse);
        }
        out
    }
}

impl Forest {
    /// Permutation importance on out-of-bag rows.
    ///
    /// For every tree with OOB rows, feature `j`'s OOB values are shuffled
    /// and the tree's OOB MSE is recomputed; the score is the mean over trees
    /// of `(mse_permuted - mse_oob) / mse_oob`. Trees whose OOB MSE is zero
    /// carry no relative information and are skipped. `train` must be the
    /// data the forest was fit on.
    pub fn permutation_importance(&self, train: &Dataset) -> Result<ImportanceReport, ForestError> {
        if !self.config().bootstrap {
            return Err(ForestError::NoOobSamples);
        }
        if train.len() != self.n_train()
            || train.n_features() != self.n_features()
            || train
                .target()
                .iter()
                .zip(self.train_targets())
                .any(|(a, b)| a.to_bits() != b.to_bits())
        {
            return Err(ForestError::TrainingDataMismatch(format!(
                "expected {} rows with the training targets",
                self.n_train()
            )));
        }

        let m = self.n_features();
        let targets = self.train_targets();
        let base_seed = derive_seed(self.config().seed, PERMUTATION_STREAM);

        let per_tree: Vec<Option<Vec<f64>>> = self
            .trees()
            .par_iter()
            .enumerate()
            .map(|(t, tree)| {
                let oob = tree.oob_rows(self.n_train());
                if oob.is_empty() {
                    return None;
                }
                let mse = |rows: &mut dyn Iterator<Item = (f64, &[f64])>| {
                    let mut ss = 0.0;
                    let mut count = 0usize;
                    for (y, x) in rows {
                        ss += (tree.predict(x, targets) - y).powi(2);
                        count += 1;
                    }
                    ss / count as f64
                };
                let base = mse(&mut oob.iter().map(|&i| (targets[i], train.row(i))));
                let tree_seed = derive_seed(base_seed, t as u64);
                let ratios = (0..m)
                    .map(|j| {
                        if base == 0.0 {
                            return f64::NAN;
                        }
                        let mut shuffled: Vec<f64> = oob.iter().map(|&i| train.row(i)[j]).collect();
                        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(tree_seed, j as u64));
                        shuffled.shuffle(&mut rng);
                        let mut x = vec![0.0; m];
                        let mut ss = 0.0;
                        for (&i, &v) in oob.iter().zip(&shuffled) {
                            x.copy_from_slice(train.row(i));
                            x[j] = v;
                            ss += (tree.predict(&x, targets) - targets[i]).powi(2);
                        }
                        let permuted = ss / oob.len() as f64;
                        (permuted - base) / base
                    })
                    .collect();
                Some(ratios)
            })
            .collect();

        if per_tree.iter().all(Option::is_none) {
            return Err(ForestError::NoOobSamples);
        }
        let scores = (0..m)
            .map(|j| {
                let (sum, count) = per_tree
                    .iter()
                    .flatten()
                    .map(|r| r[j])
                    .filter(|v| !v.is_nan())
                    .fold((0.0, 0usize), |(s, c), v| (s + v, c + 1));
                if count == 0 {
                    0.0
                } else {
                    sum / count as f64
                }
            })
            .collect();
        Ok(ImportanceReport::from_scores(self.feature_names(), scores))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forest::ForestConfig;

    #[test]
    fn ranks_descend_with_ties_by_index() {
        let names: Vec<String> = ["a", "b", "c", "d"].iter().map(|s| s.to_string()).collect();
        let r = ImportanceReport::from_scores(&names, vec![0.1, 0.3, 0.1, -0.2]);
        let ranks: Vec<usize> = r.features.iter().map(|f| f.rank).collect();
        assert_eq!(ranks, vec![2, 1, 3, 4]);
        assert_eq!(r.top_k(2), vec![1, 0]);
    }

    #[test]
    fn table_six_row_format() {
        let r = ImportanceReport::from_scores(&["AvgT".to_string()], vec![0.175]);
        assert!(r.to_csv().contains("AvgT,1,0.1750"));
        assert!(r.to_table().lines().nth(1).unwrap().ends_with("1    0.175"));
    }

    #[test]
    fn requires_bootstrap() {
        let ds = Dataset::with_index_years(
            vec!["x".into()],
            (0..10).map(|i| vec![i as f64 / 10.0]).collect(),
            (0..10).map(|i| i as f64).collect(),
        )
        .unwrap();
        let f = Forest::fit(
            &ds,
            &ForestConfig {
                ntree: 5,
                bootstrap: false,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(f.permutation_importance(&ds), Err(ForestError::NoOobSamples));
    }

    #[test]
    fn rejects_foreign_data() {
        let mk = |shift: f64| {
            Dataset::with_index_years(
                vec!["x".into()],
                (0..20).map(|i| vec![i as f64 / 20.0]).collect(),
                (0..20).map(|i| i as f64 + shift).collect(),
            )
            .unwrap()
        };
        let f = Forest::fit(&mk(0.0), &ForestConfig { ntree: 5, ..Default::default() }).unwrap();
        assert!(matches!(
            f.permutation_importance(&mk(1.0)),
            Err(ForestError::TrainingDataMismatch(_))
        ));
    }
}
