//! Write a labeled corpus: one PLY per object, features.csv, manifest.json.
//!
//!     cargo run --example generate_corpus [-- out_dir]

use bimgraph::synth::{generate_corpus, SceneSpec};

fn main() -> bimgraph::Result<()> {
    let out = std::env::args().nth(1).unwrap_or_else(|| "corpus".into());
    let spec = SceneSpec {
        rooms_x: (2, 2),
        rooms_y: (1, 2),
        ..SceneSpec::seeded(3)
    };
    let manifest = generate_corpus(&spec, 10, &out)?;
    println!("{} scenes, {} objects in {out}", manifest.scenes.len(), manifest.object_count);
    for (class, n) in &manifest.class_histogram {
        println!("  {class:<7} {n}");
    }
    let first = &manifest.scenes[0];
    println!("{}: {} objects, {} relations", first.name, first.objects.len(), first.relations.len());
    Ok(())
}
