//! Geometry to graph to plan to geometry, compared with the original.
//!
//!     cargo run --release --example roundtrip [-- scenes]

use bimgraph::pipeline::{default_model, roundtrip_scene};
use bimgraph::relations::RelationConfig;
use bimgraph::synth::{generate_scenes, scene_name, SceneSpec};

fn main() -> bimgraph::Result<()> {
    let n = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(3);
    let model = default_model(7)?;
    let cfg = RelationConfig::default();
    for (i, scene) in generate_scenes(&SceneSpec::seeded(7), n)?.iter().enumerate() {
        let rt = roundtrip_scene(scene, &model, &cfg, 1e-3)?;
        print!("{}: {}", scene_name(i), rt.report.to_text());
        if i == 0 {
            println!("plan of the first scene:\n{}", rt.plan.to_json()?);
        }
    }
    Ok(())
}
