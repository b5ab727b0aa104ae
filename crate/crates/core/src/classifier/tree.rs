//! CART classification tree with Gini impurity.
//!
//! Splits are `x[feature] <= threshold` (left) with thresholds at midpoints
//! between consecutive distinct values. Equal gains keep the first candidate
//! seen, i.e. the lowest feature index and then the lowest threshold.

use rand::seq::index::sample;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{prediction_from_scores, FeatureMask, LabeledDataset, Prediction, Sample};
use crate::error::{Error, Result};

const MIN_GAIN: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TreeParams {
    pub max_depth: usize,
    pub min_leaf: usize,
    pub features: FeatureMask,
}

impl Default for TreeParams {
    fn default() -> Self {
        TreeParams {
            max_depth: 12,
            min_leaf: 1,
            features: FeatureMask::All,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "node", rename_all = "snake_case")]
pub enum Node {
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
    /// Training-sample counts per class, in [`ObjectClass`](crate::ObjectClass) order.
    Leaf { counts: [u32; 4] },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeModel {
    pub params: TreeParams,
    /// Feature indices the tree was allowed to split on.
    pub features: Vec<usize>,
    /// Arena of nodes; the root is `nodes[0]`.
    pub nodes: Vec<Node>,
}

impl TreeModel {
    pub fn depth(&self) -> usize {
        fn walk(nodes: &[Node], i: usize) -> usize {
            match nodes[i] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + walk(nodes, left).max(walk(nodes, right)),
            }
        }
        walk(&self.nodes, 0)
    }

    pub fn leaf_counts(&self, values: &[f64]) -> [u32; 4] {
        let mut i = 0;
        loop {
            match self.nodes[i] {
                Node::Leaf { counts } => return counts,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => i = if values[feature] <= threshold { left } else { right },
            }
        }
    }

    pub(crate) fn predict(&self, values: &[f64]) -> Prediction {
        prediction_from_scores(self.leaf_counts(values).map(f64::from))
    }
}

pub fn train_tree(train: &LabeledDataset, params: &TreeParams) -> Result<TreeModel> {
    if train.is_empty() {
        return Err(Error::Dataset("cannot train on an empty set".into()));
    }
    let rows: Vec<usize> = (0..train.len()).collect();
    Ok(grow(&train.samples, rows, params, None))
}

/// Grow a tree over `rows` (which may repeat, for bootstrap samples). With
/// `per_split = Some((m, rng))`, each node considers `m` randomly chosen
/// features from the mask.
pub(crate) fn grow(
    samples: &[Sample],
    rows: Vec<usize>,
    params: &TreeParams,
    per_split: Option<(usize, &mut ChaCha8Rng)>,
) -> TreeModel {
    let features = params.features.indices();
    let mut builder = Grower {
        samples,
        params,
        features: &features,
        per_split,
        nodes: Vec::new(),
    };
    builder.node(rows, 0);
    TreeModel {
        params: *params,
        features: features.clone(),
        nodes: builder.nodes,
    }
}

struct Grower<'a, 'r> {
    samples: &'a [Sample],
    params: &'a TreeParams,
    features: &'a [usize],
    per_split: Option<(usize, &'r mut ChaCha8Rng)>,
    nodes: Vec<Node>,
}

struct BestSplit {
    feature: usize,
    threshold: f64,
    gain: f64,
}

fn gini(counts: &[u32; 4], n: u32) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let n = n as f64;
    1.0 - counts.iter().map(|&c| (c as f64 / n).powi(2)).sum::<f64>()
}

impl Grower<'_, '_> {
    fn node(&mut self, rows: Vec<usize>, depth: usize) -> usize {
        let mut counts = [0u32; 4];
        for &r in &rows {
            counts[self.samples[r].label.index()] += 1;
        }
        let id = self.nodes.len();
        self.nodes.push(Node::Leaf { counts });

        let pure = counts.iter().filter(|&&c| c > 0).count() <= 1;
        if pure || depth >= self.params.max_depth || rows.len() < 2 * self.params.min_leaf.max(1) {
            return id;
        }
        let candidates = self.candidate_features();
        let Some(best) = self.best_split(&rows, &counts, &candidates) else {
            return id;
        };
        let (left_rows, right_rows): (Vec<usize>, Vec<usize>) = rows
            .into_iter()
            .partition(|&r| self.samples[r].features.values[best.feature] <= best.threshold);
        let left = self.node(left_rows, depth + 1);
        let right = self.node(right_rows, depth + 1);
        self.nodes[id] = Node::Split {
            feature: best.feature,
            threshold: best.threshold,
            left,
            right,
        };
        id
    }

    fn candidate_features(&mut self) -> Vec<usize> {
        match &mut self.per_split {
            Some((m, rng)) if *m < self.features.len() => {
                let mut picked: Vec<usize> = sample(&mut **rng, self.features.len(), *m)
                    .into_iter()
                    .map(|k| self.features[k])
                    .collect();
                picked.sort_unstable();
                picked
            }
            _ => self.features.to_vec(),
        }
    }

    fn best_split(&self, rows: &[usize], counts: &[u32; 4], candidates: &[usize]) -> Option<BestSplit> {
        let n = rows.len() as u32;
        let parent = gini(counts, n);
        let min_leaf = self.params.min_leaf.max(1) as u32;
        let mut best: Option<BestSplit> = None;
        let mut column: Vec<(f64, usize)> = Vec::with_capacity(rows.len());

        for &f in candidates {
            column.clear();
            column.extend(
                rows.iter()
                    .map(|&r| (self.samples[r].features.values[f], self.samples[r].label.index())),
            );
            column.sort_by(|a, b| a.0.total_cmp(&b.0));

            let mut left = [0u32; 4];
            for k in 0..column.len() - 1 {
                left[column[k].1] += 1;
                let (v, next) = (column[k].0, column[k + 1].0);
                if v == next {
                    continue;
                }
                let nl = (k + 1) as u32;
                let nr = n - nl;
                if nl < min_leaf || nr < min_leaf {
                    continue;
                }
                let mut right = *counts;
                for c in 0..4 {
                    right[c] -= left[c];
                }
                let gain = parent
                    - (nl as f64 / n as f64) * gini(&left, nl)
                    - (nr as f64 / n as f64) * gini(&right, nr);
                let improves = match &best {
                    None => gain > MIN_GAIN,
                    Some(b) => gain > b.gain + MIN_GAIN,
                };
                if improves {
                    let mut threshold = 0.5 * (v + next);
                    if threshold >= next {
                        threshold = v;
                    }
                    best = Some(BestSplit {
                        feature: f,
                        threshold,
                        gain,
                    });
                }
            }
        }
        best
    }
}
