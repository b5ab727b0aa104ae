//! Load a PLY mesh (or build a sample one) and print its basic measures.
//!
//!     cargo run --example load_ply_measures [-- path/to/object.ply]

use bimgraph::ply::{encode_ply, load_ply, parse_ply, Encoding};
use bimgraph::{Mesh, Point};

fn main() -> bimgraph::Result<()> {
    let mesh = match std::env::args().nth(1) {
        Some(path) => load_ply(path)?,
        None => {
            let wall = Mesh::cuboid(Point::new(0.0, 0.0, 0.0), Point::new(4.0, 0.25, 2.8));
            parse_ply(&encode_ply(&wall, Encoding::Ascii))?
        }
    };
    let b = mesh.aabb();
    println!("vertices      {}", mesh.vertex_count());
    println!("triangles     {}", mesh.triangle_count());
    println!("closed        {}", mesh.is_closed());
    println!("aabb min      {:?}", b.min.coords.as_slice());
    println!("aabb max      {:?}", b.max.coords.as_slice());
    println!("surface area  {:.6}", mesh.surface_area());
    println!("volume        {:.6}", mesh.volume());
    Ok(())
}
