//! Enrich one scene into a graph, print its Turtle text, parse it back and
//! run a few queries.
//!
//!     cargo run --release --example turtle_graph

use bimgraph::pipeline::{default_model, enrich, records_from_scene};
use bimgraph::relations::RelationConfig;
use bimgraph::synth::{generate_scene, SceneSpec};
use bimgraph::turtle::{parse_turtle, serialize_turtle};
use bimgraph::ObjectClass;

fn main() -> bimgraph::Result<()> {
    let model = default_model(0)?;
    let scene = generate_scene(&SceneSpec::seeded(6))?;
    let enriched = enrich(records_from_scene(&scene.objects), &model, &RelationConfig::default())?;
    let text = serialize_turtle(&enriched.graph);
    print!("{text}");

    let graph = parse_turtle(&text)?;
    assert_eq!(graph.edges(), enriched.graph.edges());
    println!();
    for (name, node) in graph.nodes() {
        match node.class {
            ObjectClass::Wall => println!("{name} hosts {:?}", graph.query_hosted(name)?),
            ObjectClass::Window | ObjectClass::Door => println!("{name} is hosted by {:?}", graph.query_host(name)?),
            ObjectClass::Floor => println!("{name} touches {} objects", graph.query_adjacent(name)?.len()),
        }
    }
    Ok(())
}
