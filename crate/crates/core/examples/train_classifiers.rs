//! Train decision tree, random forest and KNN on a generated corpus split
//! 7:1:2 and print validation and test accuracy.
//!
//!     cargo run --release --example train_classifiers

use bimgraph::classifier::{
    evaluate, render_table, split, train_forest, train_knn, train_tree, ForestParams, KnnParams, LabeledDataset,
    Model, SplitSpec, TableRow, TreeParams,
};
use bimgraph::synth::{feature_rows, generate_scenes, SceneSpec};

fn main() -> bimgraph::Result<()> {
    let scenes = generate_scenes(&SceneSpec::seeded(1), 80)?;
    let data = LabeledDataset::from_rows(&feature_rows(&scenes))?;
    let (train, valid, test) = split(&data, &SplitSpec::seeded(1))?;
    println!(
        "{} objects: {} train, {} valid, {} test",
        data.len(),
        train.len(),
        valid.len(),
        test.len()
    );

    let models = [
        Model::DecisionTree(train_tree(&train, &TreeParams::default())?),
        Model::RandomForest(train_forest(&train, &ForestParams::default())?),
        Model::Knn(train_knn(&train, &KnnParams::default())?),
    ];
    let mut rows = Vec::new();
    for m in &models {
        rows.push(TableRow {
            algorithm: m.name().into(),
            valid_accuracy: evaluate(m, &valid)?.accuracy,
            test_accuracy: evaluate(m, &test)?.accuracy,
        });
    }
    print!("{}", render_table(&rows));

    let report = evaluate(&models[1], &test)?;
    println!("\nrandom forest, test set:");
    for c in &report.per_class {
        println!(
            "  {:<7} precision {:.3} recall {:.3} f1 {:.3} (n={})",
            c.class.as_str(),
            c.precision,
            c.recall,
            c.f1,
            c.support
        );
    }
    Ok(())
}
