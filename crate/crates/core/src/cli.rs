//! `bimgraph` command line.
//!
//! Exit codes: 0 success, 1 usage, 2 data error, 3 comparison failure.
//! Errors are printed as a single `error[<kind>]: <message>` line.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::classifier::{
    evaluate, render_table, split, train_forest, train_knn, train_tree, ForestParams, KnnParams, LabeledDataset,
    Model, SplitSpec, TableRow, TreeParams,
};
use crate::error::{Error, Result};
use crate::features::{extract_features, read_features_csv, write_features_csv, FeatureRow};
use crate::pipeline::{default_model, enrich, load_objects, roundtrip_scene};
use crate::reconstruct::{plan_from_graph, realize};
use crate::relations::{infer_all_detailed, write_relations_csv, RelationConfig};
use crate::synth::{generate_corpus, generate_scenes, scene_name, write_objects, Manifest, SceneSpec};
use crate::turtle::{parse_turtle, serialize_turtle};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_COMPARISON: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "bimgraph", version, about = "Semantic enrichment of building-object meshes")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a labeled synthetic corpus (PLY files, features.csv, manifest.json).
    Gen(GenArgs),
    /// Extract the 19 geometric features of every PLY file in a directory.
    Features(FeaturesArgs),
    /// Train decision tree, random forest and KNN; save one of them.
    Train(TrainArgs),
    /// Predict the class of every PLY file in a directory.
    Classify(ClassifyArgs),
    /// Infer adjacentTo / hosting / hosted relations between PLY files.
    Relate(RelateArgs),
    /// Classify, relate, compute attributes and write a Turtle graph.
    Enrich(EnrichArgs),
    /// Turn a Turtle graph into a plan and realized PLY meshes.
    Reconstruct(ReconstructArgs),
    /// Generate scenes, enrich, reconstruct and compare with the originals.
    Roundtrip(RoundtripArgs),
}

#[derive(Debug, Clone, Args)]
pub struct Tolerances {
    /// Largest bounding-box gap sum treated as touching (m).
    #[arg(long, default_value_t = RelationConfig::default().eps_gap)]
    pub eps_gap: f64,
    /// Largest surface distance treated as contact (m).
    #[arg(long, default_value_t = RelationConfig::default().eps_contact)]
    pub eps_contact: f64,
    /// Slack for box containment (m).
    #[arg(long, default_value_t = RelationConfig::default().eps_contain)]
    pub eps_contain: f64,
}

impl Tolerances {
    fn config(&self) -> RelationConfig {
        RelationConfig {
            eps_gap: self.eps_gap,
            eps_contact: self.eps_contact,
            eps_contain: self.eps_contain,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct GenArgs {
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 32)]
    pub scenes: usize,
}

#[derive(Debug, Clone, Args)]
pub struct FeaturesArgs {
    /// Directory of PLY files, or a corpus directory with manifest.json.
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Output CSV.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Algorithm {
    DecisionTree,
    RandomForest,
    Knn,
}

#[derive(Debug, Clone, Args)]
pub struct TrainArgs {
    /// Labeled features CSV, or a corpus directory containing features.csv.
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Model file to write.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Which trained model to save.
    #[arg(long, value_enum, default_value_t = Algorithm::RandomForest)]
    pub algorithm: Algorithm,
}

#[derive(Debug, Clone, Args)]
pub struct ClassifyArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub model: PathBuf,
    /// CSV with columns id, class, confidence.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct RelateArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    /// CSV with columns subject, predicate, object.
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub tolerances: Tolerances,
}

#[derive(Debug, Clone, Args)]
pub struct EnrichArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub model: PathBuf,
    /// Turtle file to write.
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub tolerances: Tolerances,
}

#[derive(Debug, Clone, Args)]
pub struct ReconstructArgs {
    /// Turtle graph.
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Directory for plan.json and one PLY per command.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct RoundtripArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 5)]
    pub scenes: usize,
    /// Classifier to use; by default a forest is trained on a separate
    /// seeded corpus.
    #[arg(long)]
    pub model: Option<PathBuf>,
    /// Center and extent tolerance for matching objects (m).
    #[arg(long, default_value_t = 1e-3)]
    pub tol: f64,
    /// Optional directory for per-scene graphs, plans and reports.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub tolerances: Tolerances,
}

/// Parse `args` (including the program name) and run. Returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(&cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error[{}]: {}", e.kind(), e.to_string().replace('\n', " "));
            EXIT_DATA
        }
    }
}

fn write_file(path: &Path, contents: impl AsRef<[u8]>) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

fn non_negative(name: &str, v: f64) -> Result<()> {
    if v >= 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::Dataset(format!("{name} must be a finite value >= 0, got {v}")))
    }
}

pub fn execute(command: &Command) -> Result<i32> {
    match command {
        Command::Gen(a) => {
            let m = generate_corpus(&SceneSpec::seeded(a.seed), a.scenes, &a.out)?;
            let hist: Vec<String> = m.class_histogram.iter().map(|(c, n)| format!("{c}={n}")).collect();
            println!(
                "wrote {} scenes, {} objects ({}) to {}",
                m.scenes.len(),
                m.object_count,
                hist.join(" "),
                a.out.display()
            );
        }
        Command::Features(a) => {
            let rows = if a.input.join("manifest.json").is_file() {
                corpus_rows(&a.input)?
            } else {
                load_objects(&a.input)?
                    .into_iter()
                    .map(|r| FeatureRow {
                        features: extract_features(&r.mesh),
                        id: r.id,
                        label: None,
                    })
                    .collect()
            };
            let mut buf = Vec::new();
            write_features_csv(&rows, &mut buf)?;
            write_file(&a.out, buf)?;
            println!("wrote {} feature rows to {}", rows.len(), a.out.display());
        }
        Command::Train(a) => {
            let csv = if a.input.is_dir() {
                a.input.join("features.csv")
            } else {
                a.input.clone()
            };
            let text = fs::read(&csv).map_err(|e| Error::io(&csv, e))?;
            let data = LabeledDataset::from_rows(&read_features_csv(text.as_slice())?)?;
            let (train, valid, test) = split(&data, &SplitSpec::seeded(a.seed))?;
            let models = [
                (Algorithm::DecisionTree, Model::DecisionTree(train_tree(&train, &TreeParams::default())?)),
                (
                    Algorithm::RandomForest,
                    Model::RandomForest(train_forest(
                        &train,
                        &ForestParams {
                            seed: a.seed,
                            ..ForestParams::default()
                        },
                    )?),
                ),
                (Algorithm::Knn, Model::Knn(train_knn(&train, &KnnParams::default())?)),
            ];
            let mut rows = Vec::new();
            for (_, m) in &models {
                rows.push(TableRow {
                    algorithm: m.name().into(),
                    valid_accuracy: evaluate(m, &valid)?.accuracy,
                    test_accuracy: evaluate(m, &test)?.accuracy,
                });
            }
            println!(
                "{} rows: {} train / {} valid / {} test",
                data.len(),
                train.len(),
                valid.len(),
                test.len()
            );
            print!("{}", render_table(&rows));
            let (_, chosen) = models.iter().find(|(alg, _)| *alg == a.algorithm).expect("all trained");
            write_file(&a.out, chosen.to_json()? + "\n")?;
            println!("saved {} to {}", chosen.name(), a.out.display());
        }
        Command::Classify(a) => {
            let model = Model::load(&a.model)?;
            let mut records = load_objects(&a.input)?;
            crate::pipeline::classify_records(&mut records, &model);
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["id", "class", "confidence"])?;
            for r in &records {
                let class = r.class.expect("classified");
                let conf = crate::numfmt::sig9(r.confidence.expect("classified"));
                w.write_record([r.id.as_str(), class.as_str(), conf.as_str()])?;
            }
            let buf = w.into_inner().map_err(|e| Error::Dataset(e.to_string()))?;
            write_file(&a.out, buf)?;
            println!("classified {} objects into {}", records.len(), a.out.display());
        }
        Command::Relate(a) => {
            let cfg = a.tolerances.config();
            let records = load_objects(&a.input)?;
            let inference = infer_all_detailed(&records, &cfg)?;
            for d in &inference.diagnostics {
                eprintln!("warning: {d}");
            }
            let mut buf = Vec::new();
            write_relations_csv(&inference.relations, &mut buf)?;
            write_file(&a.out, buf)?;
            println!("wrote {} relations to {}", inference.relations.len(), a.out.display());
        }
        Command::Enrich(a) => {
            let cfg = a.tolerances.config();
            let model = Model::load(&a.model)?;
            let enriched = enrich(load_objects(&a.input)?, &model, &cfg)?;
            for d in &enriched.diagnostics {
                eprintln!("warning: {d}");
            }
            write_file(&a.out, serialize_turtle(&enriched.graph))?;
            println!(
                "wrote graph with {} nodes and {} edges to {}",
                enriched.graph.nodes().len(),
                enriched.graph.edges().len(),
                a.out.display()
            );
        }
        Command::Reconstruct(a) => {
            let text = fs::read_to_string(&a.input).map_err(|e| Error::io(&a.input, e))?;
            let plan = plan_from_graph(&parse_turtle(&text)?)?;
            let objects = realize(&plan)?;
            write_objects(&objects, &a.out)?;
            plan.save(a.out.join("plan.json"))?;
            println!("realized {} objects into {}", objects.len(), a.out.display());
        }
        Command::Roundtrip(a) => return roundtrip(a),
    }
    Ok(EXIT_OK)
}

fn corpus_rows(dir: &Path) -> Result<Vec<FeatureRow>> {
    let manifest = Manifest::load(dir.join("manifest.json"))?;
    let mut rows = Vec::new();
    for s in &manifest.scenes {
        for o in &s.objects {
            let mesh = crate::ply::load_ply(dir.join(&o.file))?;
            rows.push(FeatureRow {
                id: format!("{}/{}", s.name, o.id),
                label: Some(o.class),
                features: extract_features(&mesh),
            });
        }
    }
    Ok(rows)
}

fn roundtrip(a: &RoundtripArgs) -> Result<i32> {
    non_negative("--tol", a.tol)?;
    let cfg = a.tolerances.config();
    let model = match &a.model {
        Some(p) => Model::load(p)?,
        None => default_model(a.seed)?,
    };
    let scenes = generate_scenes(&SceneSpec::seeded(a.seed), a.scenes)?;
    let mut failed = 0;
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    for (i, scene) in scenes.iter().enumerate() {
        let name = scene_name(i);
        let rt = roundtrip_scene(scene, &model, &cfg, a.tol)?;
        if !rt.report.pass {
            failed += 1;
        }
        let _ = write!(out, "{name}: {}", rt.report.to_text());
        if let Some(dir) = &a.out {
            let d = dir.join(&name);
            write_file(&d.join("graph.ttl"), &rt.turtle)?;
            write_file(&d.join("plan.json"), rt.plan.to_json()?)?;
            write_file(&d.join("report.json"), rt.report.to_json()? + "\n")?;
        }
    }
    let _ = writeln!(out, "{} of {} scenes passed", scenes.len() - failed, scenes.len());
    Ok(if failed == 0 { EXIT_OK } else { EXIT_COMPARISON })
}
