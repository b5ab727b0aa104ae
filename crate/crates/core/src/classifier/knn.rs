use serde::{Deserialize, Serialize};

use super::{prediction_from_scores, FeatureMask, LabeledDataset, Prediction};
use crate::error::{Error, Result};
use crate::ObjectClass;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KnnParams {
    pub k: usize,
    pub features: FeatureMask,
}

impl Default for KnnParams {
    fn default() -> Self {
        KnnParams {
            k: 5,
            features: FeatureMask::All,
        }
    }
}

/// Distance-weighted k-nearest-neighbour vote in z-score space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnnModel {
    pub k: usize,
    pub features: Vec<usize>,
    pub mean: Vec<f64>,
    /// Per-feature standard deviation; constant features store 1.
    pub scale: Vec<f64>,
    /// Standardized training vectors, restricted to `features`.
    pub points: Vec<Vec<f64>>,
    pub labels: Vec<ObjectClass>,
}

pub fn train_knn(train: &LabeledDataset, params: &KnnParams) -> Result<KnnModel> {
    if train.is_empty() {
        return Err(Error::Dataset("cannot train on an empty set".into()));
    }
    if params.k == 0 {
        return Err(Error::Dataset("k must be positive".into()));
    }
    let features = params.features.indices();
    let n = train.len() as f64;
    let column = |f: usize| train.samples.iter().map(move |s| s.features.values[f]);
    let mean: Vec<f64> = features.iter().map(|&f| column(f).sum::<f64>() / n).collect();
    let scale: Vec<f64> = features
        .iter()
        .zip(&mean)
        .map(|(&f, &m)| {
            let sd = (column(f).map(|v| (v - m).powi(2)).sum::<f64>() / n).sqrt();
            if sd > 1e-12 {
                sd
            } else {
                1.0
            }
        })
        .collect();
    let mut model = KnnModel {
        k: params.k,
        features,
        mean,
        scale,
        points: Vec::with_capacity(train.len()),
        labels: train.samples.iter().map(|s| s.label).collect(),
    };
    model.points = train
        .samples
        .iter()
        .map(|s| model.standardize(&s.features.values))
        .collect();
    Ok(model)
}

impl KnnModel {
    fn standardize(&self, values: &[f64]) -> Vec<f64> {
        self.features
            .iter()
            .enumerate()
            .map(|(j, &f)| (values[f] - self.mean[j]) / self.scale[j])
            .collect()
    }

    pub(crate) fn predict(&self, values: &[f64]) -> Prediction {
        let q = self.standardize(values);
        let mut dist: Vec<(f64, usize)> = self
            .points
            .iter()
            .enumerate()
            .map(|(i, p)| {
                let d2: f64 = p.iter().zip(&q).map(|(a, b)| (a - b).powi(2)).sum();
                (d2.sqrt(), i)
            })
            .collect();
        let k = self.k.min(dist.len());
        dist.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let mut scores = [0.0; 4];
        for &(d, i) in &dist[..k] {
            scores[self.labels[i].index()] += 1.0 / (d + 1e-9);
        }
        prediction_from_scores(scores)
    }
}

#[cfg(test)]
mod tests {
    use super::super::test_support::*;
    use super::*;

    #[test]
    fn nearest_neighbours_vote() {
        let m = train_knn(&toy(), &KnnParams { k: 3, ..KnnParams::default() }).unwrap();
        assert_eq!(m.predict(&fv(0.95).values).class, ObjectClass::Wall);
        assert_eq!(m.predict(&fv(0.05).values).class, ObjectClass::Door);
        let p = m.predict(&toy().samples[0].features.values);
        assert!(p.confidence > 0.99, "exact match dominates the weighted vote");
    }

    #[test]
    fn constant_features_do_not_divide_by_zero() {
        let m = train_knn(&toy(), &KnnParams::default()).unwrap();
        assert!(m.scale.iter().all(|s| s.is_finite() && *s > 0.0));
        assert!(m.points.iter().flatten().all(|v| v.is_finite()));
    }
}
