//! Object-type classifiers over [`FeatureVector`]s: CART decision tree,
//! random forest and a KNN baseline, plus dataset splitting, evaluation and
//! a versioned JSON model file.

mod eval;
mod forest;
mod knn;
mod tree;

use std::fs;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::{FeatureRow, FeatureVector, FEATURE_COUNT, SHAPE_FEATURES};
use crate::ObjectClass;

pub use eval::{evaluate, evaluate_predictions, render_table, ClassMetrics, EvaluationReport, TableRow};
pub use forest::{train_forest, ForestModel, ForestParams};
pub use knn::{train_knn, KnnModel, KnnParams};
pub use tree::{train_tree, Node, TreeModel, TreeParams};

pub const MODEL_FORMAT: &str = "bimgraph-classifier";
pub const MODEL_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub features: FeatureVector,
    pub label: ObjectClass,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct LabeledDataset {
    pub samples: Vec<Sample>,
}

impl LabeledDataset {
    pub fn new(samples: Vec<Sample>) -> Result<Self> {
        if let Some(i) = samples
            .iter()
            .position(|s| s.features.values.iter().any(|v| !v.is_finite()))
        {
            return Err(Error::Dataset(format!("sample {i} has a non-finite feature")));
        }
        Ok(LabeledDataset { samples })
    }

    /// Keep the labeled rows of a feature table.
    pub fn from_rows(rows: &[FeatureRow]) -> Result<Self> {
        Self::new(
            rows.iter()
                .filter_map(|r| {
                    r.label.map(|label| Sample {
                        features: r.features,
                        label,
                    })
                })
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn class_counts(&self) -> [usize; 4] {
        let mut c = [0; 4];
        for s in &self.samples {
            c[s.label.index()] += 1;
        }
        c
    }
}

/// Train/validation/test fractions and the shuffle seed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub train: f64,
    pub valid: f64,
    pub test: f64,
    pub seed: u64,
}

impl SplitSpec {
    /// The 7:1:2 split.
    pub fn seeded(seed: u64) -> Self {
        SplitSpec {
            train: 0.7,
            valid: 0.1,
            test: 0.2,
            seed,
        }
    }
}

pub const MIN_SPLIT_ROWS: usize = 10;

/// Seeded shuffle followed by contiguous slicing. Train and validation sizes
/// are floored; the remainder goes to test.
pub fn split(
    dataset: &LabeledDataset,
    spec: &SplitSpec,
) -> Result<(LabeledDataset, LabeledDataset, LabeledDataset)> {
    let fr = [spec.train, spec.valid, spec.test];
    if fr.iter().any(|f| !(0.0..=1.0).contains(f)) || (fr.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
        return Err(Error::Dataset(format!("split fractions {fr:?} must sum to 1")));
    }
    let n = dataset.len();
    if n < MIN_SPLIT_ROWS {
        return Err(Error::DatasetTooSmall {
            got: n,
            min: MIN_SPLIT_ROWS,
        });
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(spec.seed));
    let n_train = (n as f64 * spec.train + 1e-9).floor() as usize;
    let n_valid = (n as f64 * spec.valid + 1e-9).floor() as usize;
    let take = |idx: &[usize]| LabeledDataset {
        samples: idx.iter().map(|&i| dataset.samples[i]).collect(),
    };
    Ok((
        take(&order[..n_train]),
        take(&order[n_train..n_train + n_valid]),
        take(&order[n_train + n_valid..]),
    ))
}

/// Which of the 19 features a model may look at.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureMask {
    #[default]
    All,
    /// Translation-invariant features only.
    ShapeOnly,
}

impl FeatureMask {
    pub fn indices(self) -> Vec<usize> {
        match self {
            FeatureMask::All => (0..FEATURE_COUNT).collect(),
            FeatureMask::ShapeOnly => SHAPE_FEATURES.to_vec(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prediction {
    pub class: ObjectClass,
    /// Share of the vote (or leaf mass) held by the winning class.
    pub confidence: f64,
}

/// Index of the largest entry; ties go to the lowest index, which is the
/// lexicographically first class name.
pub(crate) fn argmax(scores: &[f64; 4]) -> usize {
    let mut best = 0;
    for k in 1..4 {
        if scores[k] > scores[best] {
            best = k;
        }
    }
    best
}

pub(crate) fn prediction_from_scores(scores: [f64; 4]) -> Prediction {
    let total: f64 = scores.iter().sum();
    let k = argmax(&scores);
    Prediction {
        class: ObjectClass::from_index(k).expect("four classes"),
        confidence: if total > 0.0 { scores[k] / total } else { 0.0 },
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "algorithm", rename_all = "snake_case")]
pub enum Model {
    DecisionTree(TreeModel),
    RandomForest(ForestModel),
    Knn(KnnModel),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct ModelFile {
    format: String,
    version: u32,
    #[serde(flatten)]
    model: Model,
}

impl Model {
    pub fn name(&self) -> &'static str {
        match self {
            Model::DecisionTree(_) => "Decision tree",
            Model::RandomForest(_) => "Random forest",
            Model::Knn(_) => "K-nearest neighbors (KNN)",
        }
    }

    pub fn predict(&self, fv: &FeatureVector) -> Prediction {
        self.predict_values(&fv.values)
            .expect("feature vectors always have the model arity")
    }

    pub fn predict_values(&self, values: &[f64]) -> Result<Prediction> {
        if values.len() != FEATURE_COUNT {
            return Err(Error::FeatureArity {
                expected: FEATURE_COUNT,
                got: values.len(),
            });
        }
        Ok(match self {
            Model::DecisionTree(m) => m.predict(values),
            Model::RandomForest(m) => m.predict(values),
            Model::Knn(m) => m.predict(values),
        })
    }

    pub fn to_json(&self) -> Result<String> {
        let file = ModelFile {
            format: MODEL_FORMAT.into(),
            version: MODEL_VERSION,
            model: self.clone(),
        };
        Ok(serde_json::to_string_pretty(&file)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: ModelFile = serde_json::from_str(text)?;
        if file.format != MODEL_FORMAT || file.version != MODEL_VERSION {
            return Err(Error::Model(format!(
                "unsupported model file {} v{}",
                file.format, file.version
            )));
        }
        Ok(file.model)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_json()?).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }
}

#[cfg(test)]
pub(crate) mod test_support {
    use super::*;

    /// Two-class set separable on feature 0 at 0.5.
    pub fn toy() -> LabeledDataset {
        let mut samples = Vec::new();
        for k in 0..10 {
            let mut values = [0.0; FEATURE_COUNT];
            values[0] = if k < 5 { 0.1 + 0.05 * k as f64 } else { 0.6 + 0.05 * k as f64 };
            values[1] = (k % 3) as f64;
            samples.push(Sample {
                features: FeatureVector {
                    values,
                    degenerate: false,
                },
                label: if k < 5 { ObjectClass::Door } else { ObjectClass::Wall },
            });
        }
        LabeledDataset { samples }
    }

    pub fn fv(values0: f64) -> FeatureVector {
        let mut values = [0.0; FEATURE_COUNT];
        values[0] = values0;
        FeatureVector {
            values,
            degenerate: false,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::test_support::*;
    use super::*;

    fn dataset(n: usize) -> LabeledDataset {
        let mut d = toy();
        while d.samples.len() < n {
            let s = d.samples[d.samples.len() % 10];
            d.samples.push(s);
        }
        d.samples.truncate(n);
        d
    }

    #[test]
    fn split_sizes() {
        let (tr, va, te) = split(&dataset(1484), &SplitSpec::seeded(3)).unwrap();
        assert_eq!((tr.len(), va.len(), te.len()), (1038, 148, 298));
        let (tr, va, te) = split(&dataset(10), &SplitSpec::seeded(3)).unwrap();
        assert_eq!((tr.len(), va.len(), te.len()), (7, 1, 2));
    }

    #[test]
    fn split_is_a_seeded_partition() {
        let mut d = dataset(57);
        for (i, s) in d.samples.iter_mut().enumerate() {
            s.features.values[5] = i as f64;
        }
        let a = split(&d, &SplitSpec::seeded(11)).unwrap();
        let b = split(&d, &SplitSpec::seeded(11)).unwrap();
        assert_eq!(a, b);
        let mut ids: Vec<usize> = [&a.0, &a.1, &a.2]
            .iter()
            .flat_map(|p| p.samples.iter().map(|s| s.features.values[5] as usize))
            .collect();
        ids.sort_unstable();
        assert_eq!(ids, (0..57).collect::<Vec<_>>());
        let c = split(&d, &SplitSpec::seeded(12)).unwrap();
        assert_ne!(a.0, c.0);
    }

    #[test]
    fn split_rejects_small_sets() {
        assert!(matches!(
            split(&dataset(9), &SplitSpec::seeded(0)),
            Err(Error::DatasetTooSmall { got: 9, min: 10 })
        ));
    }

    #[test]
    fn arity_mismatch() {
        let model = Model::DecisionTree(train_tree(&toy(), &TreeParams::default()).unwrap());
        assert!(matches!(
            model.predict_values(&[0.0; 5]),
            Err(Error::FeatureArity { expected: 19, got: 5 })
        ));
    }

    #[test]
    fn model_file_round_trip() {
        let model = Model::RandomForest(
            train_forest(&toy(), &ForestParams { n_trees: 3, ..ForestParams::default() }).unwrap(),
        );
        let text = model.to_json().unwrap();
        assert!(text.contains("\"format\": \"bimgraph-classifier\""));
        assert!(text.contains("\"algorithm\": \"random_forest\""));
        assert_eq!(Model::from_json(&text).unwrap(), model);
        let bumped = text.replace("\"version\": 1", "\"version\": 99");
        assert!(matches!(Model::from_json(&bumped), Err(Error::Model(_))));
    }
}
