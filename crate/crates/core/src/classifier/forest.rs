use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::tree::{grow, TreeModel, TreeParams};
use super::{argmax, FeatureMask, LabeledDataset, Prediction};
use crate::error::{Error, Result};
use crate::ObjectClass;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ForestParams {
    pub n_trees: usize,
    pub max_depth: usize,
    pub min_leaf: usize,
    /// Features drawn per split; at or above the mask size every feature is used.
    pub features_per_split: usize,
    pub bootstrap: bool,
    pub seed: u64,
    pub features: FeatureMask,
}

impl Default for ForestParams {
    fn default() -> Self {
        ForestParams {
            n_trees: 50,
            max_depth: 12,
            min_leaf: 1,
            // ceil(sqrt(19))
            features_per_split: 5,
            bootstrap: true,
            seed: 0,
            features: FeatureMask::All,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForestModel {
    pub params: ForestParams,
    /// Seed of each tree's bootstrap and feature-subset stream.
    pub tree_seeds: Vec<u64>,
    pub trees: Vec<TreeModel>,
}

impl ForestModel {
    pub fn votes(&self, values: &[f64]) -> [usize; 4] {
        let mut votes = [0usize; 4];
        for t in &self.trees {
            votes[t.predict(values).class.index()] += 1;
        }
        votes
    }

    pub(crate) fn predict(&self, values: &[f64]) -> Prediction {
        let votes = self.votes(values);
        let scores = votes.map(|v| v as f64);
        let k = argmax(&scores);
        Prediction {
            class: ObjectClass::from_index(k).expect("four classes"),
            confidence: votes[k] as f64 / self.trees.len() as f64,
        }
    }
}

/// Bagged CART trees. Trees are grown in parallel; each owns a seed drawn in
/// order from the forest seed, so the model is a pure function of the inputs.
pub fn train_forest(train: &LabeledDataset, params: &ForestParams) -> Result<ForestModel> {
    if train.is_empty() {
        return Err(Error::Dataset("cannot train on an empty set".into()));
    }
    if params.n_trees == 0 || params.features_per_split == 0 {
        return Err(Error::Dataset("forest needs at least one tree and one feature per split".into()));
    }
    let mut master = ChaCha8Rng::seed_from_u64(params.seed);
    let tree_seeds: Vec<u64> = (0..params.n_trees).map(|_| master.next_u64()).collect();
    let tree_params = TreeParams {
        max_depth: params.max_depth,
        min_leaf: params.min_leaf,
        features: params.features,
    };
    let n = train.len();
    let trees = tree_seeds
        .par_iter()
        .map(|&seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let rows: Vec<usize> = if params.bootstrap {
                (0..n).map(|_| rng.gen_range(0..n)).collect()
            } else {
                (0..n).collect()
            };
            grow(
                &train.samples,
                rows,
                &tree_params,
                Some((params.features_per_split, &mut rng)),
            )
        })
        .collect();
    Ok(ForestModel {
        params: *params,
        tree_seeds,
        trees,
    })
}
