//! Relations between the objects of one scene, checked against its ground
//! truth.
//!
//!     cargo run --example infer_relations

use bimgraph::pipeline::records_from_scene;
use bimgraph::relations::{infer_all_detailed, score_relations, write_relations_csv, RelationConfig};
use bimgraph::synth::{generate_scene, SceneSpec};

fn main() -> bimgraph::Result<()> {
    let scene = generate_scene(&SceneSpec::seeded(5))?;
    let records = records_from_scene(&scene.objects);
    let inference = infer_all_detailed(&records, &RelationConfig::default())?;

    for o in &scene.objects {
        println!("{:>3}  {}", o.id, o.class);
    }
    println!();
    write_relations_csv(&inference.relations, std::io::stdout().lock())?;
    for d in &inference.diagnostics {
        println!("warning: {d}");
    }

    let score = score_relations(&scene.ids(), &inference.relations, &scene.truth.relations);
    println!(
        "\naccuracy {:.4}, micro-F1 {:.4}, exact {}",
        score.accuracy(),
        score.f1(),
        score.exact()
    );
    Ok(())
}
