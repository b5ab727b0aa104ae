//! End-to-end chains: classify, relate, attribute, graph, and back.

use std::fs;
use std::path::Path;

use rayon::prelude::*;

use crate::attributes::compute_attributes;
use crate::classifier::{train_forest, FeatureMask, ForestParams, LabeledDataset, Model};
use crate::error::{Error, Result};
use crate::features::extract_features;
use crate::graph::{build_graph, BimGraph};
use crate::ply::load_ply;
use crate::reconstruct::{compare_scenes, plan_from_graph, realize, ComparisonReport, ReconstructionPlan};
use crate::record::ObjectRecord;
use crate::relations::{infer_all_detailed, Diagnostic, Relation, RelationConfig};
use crate::synth::{feature_rows, generate_scenes, Scene, SceneObject, SceneSpec};
use crate::turtle::{parse_turtle, serialize_turtle};

/// Every `*.ply` directly inside `dir`, id = file stem, sorted by id.
pub fn load_objects(dir: impl AsRef<Path>) -> Result<Vec<ObjectRecord>> {
    let dir = dir.as_ref();
    let mut paths = Vec::new();
    for entry in fs::read_dir(dir).map_err(|e| Error::io(dir, e))? {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        if path.is_file() && path.extension().is_some_and(|x| x.eq_ignore_ascii_case("ply")) {
            paths.push(path);
        }
    }
    if paths.is_empty() {
        return Err(Error::EmptyInput(format!("no .ply files in {}", dir.display())));
    }
    paths.sort();
    paths
        .par_iter()
        .map(|p| {
            let id = p.file_stem().and_then(|s| s.to_str()).unwrap_or_default().to_owned();
            Ok(ObjectRecord::new(id, load_ply(p)?))
        })
        .collect()
}

pub fn records_from_scene(objects: &[SceneObject]) -> Vec<ObjectRecord> {
    objects.iter().map(|o| ObjectRecord::new(o.id.clone(), o.mesh.clone())).collect()
}

pub fn classify_records(records: &mut [ObjectRecord], model: &Model) {
    records.par_iter_mut().for_each(|r| {
        let p = model.predict(&extract_features(&r.mesh));
        r.class = Some(p.class);
        r.confidence = Some(p.confidence);
    });
}

pub fn attach_attributes(records: &mut [ObjectRecord]) -> Result<()> {
    records.par_iter_mut().try_for_each(|r| {
        r.attributes = Some(compute_attributes(r)?);
        Ok(())
    })
}

#[derive(Debug, Clone)]
pub struct Enriched {
    pub records: Vec<ObjectRecord>,
    pub relations: Vec<Relation>,
    pub diagnostics: Vec<Diagnostic>,
    pub graph: BimGraph,
}

/// Classify, relate, compute attributes, build the graph.
pub fn enrich(mut records: Vec<ObjectRecord>, model: &Model, cfg: &RelationConfig) -> Result<Enriched> {
    if records.is_empty() {
        return Err(Error::EmptyInput("nothing to enrich".into()));
    }
    classify_records(&mut records, model);
    let inference = infer_all_detailed(&records, cfg)?;
    attach_attributes(&mut records)?;
    let graph = build_graph(&records, &inference.relations)?;
    Ok(Enriched {
        records,
        relations: inference.relations,
        diagnostics: inference.diagnostics,
        graph,
    })
}

#[derive(Debug, Clone)]
pub struct RoundTrip {
    pub turtle: String,
    pub plan: ReconstructionPlan,
    pub rebuilt: Vec<SceneObject>,
    pub report: ComparisonReport,
}

/// Enrich the scene, go through Turtle text, plan, realize and compare with
/// the original geometry.
pub fn roundtrip_scene(scene: &Scene, model: &Model, cfg: &RelationConfig, tol: f64) -> Result<RoundTrip> {
    let enriched = enrich(records_from_scene(&scene.objects), model, cfg)?;
    let turtle = serialize_turtle(&enriched.graph);
    let graph = parse_turtle(&turtle)?;
    let plan = plan_from_graph(&graph)?;
    let rebuilt = realize(&plan)?;
    let report = compare_scenes(&scene.objects, &rebuilt, tol);
    Ok(RoundTrip {
        turtle,
        plan,
        rebuilt,
        report,
    })
}

/// Scenes used to train the built-in classifier.
pub const DEFAULT_TRAINING_SCENES: usize = 60;

/// Random forest on shape features of a generated corpus, seeded from `seed`
/// but on a different stream than the scenes it will be applied to.
pub fn default_model(seed: u64) -> Result<Model> {
    let spec = SceneSpec::seeded(seed ^ 0x5eed_c0de_0000_0001);
    let scenes = generate_scenes(&spec, DEFAULT_TRAINING_SCENES)?;
    let data = LabeledDataset::from_rows(&feature_rows(&scenes))?;
    let params = ForestParams {
        seed,
        features: FeatureMask::ShapeOnly,
        ..ForestParams::default()
    };
    Ok(Model::RandomForest(train_forest(&data, &params)?))
}
