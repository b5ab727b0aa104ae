//! The 19-value descriptor of one object of each class.
//!
//!     cargo run --example extract_features

use bimgraph::features::{extract_features, FEATURE_NAMES};
use bimgraph::synth::{generate_scene, SceneSpec};
use bimgraph::ObjectClass;

fn main() -> bimgraph::Result<()> {
    let scene = generate_scene(&SceneSpec::seeded(4))?;
    let picks: Vec<_> = ObjectClass::ALL
        .iter()
        .filter_map(|c| scene.objects.iter().find(|o| o.class == *c))
        .collect();
    print!("{:<22}", "feature");
    for o in &picks {
        print!("{:>14}", format!("{} {}", o.class, o.id));
    }
    println!();
    let vectors: Vec<_> = picks.iter().map(|o| extract_features(&o.mesh)).collect();
    for (i, name) in FEATURE_NAMES.iter().enumerate() {
        print!("{name:<22}");
        for v in &vectors {
            print!("{:>14.4}", v.as_slice()[i]);
        }
        println!();
    }
    Ok(())
}
