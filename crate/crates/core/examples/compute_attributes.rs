//! Type-dependent attributes for boxes and a tilted slab.
//!
//!     cargo run --example compute_attributes

use nalgebra::{Isometry3, Translation3, UnitQuaternion};

use bimgraph::attributes::{attributes_for, Attribute};
use bimgraph::{Mesh, ObjectClass, Point, Vector};

fn show(label: &str, mesh: &Mesh, class: ObjectClass) -> bimgraph::Result<()> {
    let attrs = attributes_for(mesh, class)?;
    println!("{label} ({class})");
    for (a, v) in attrs.iter() {
        println!("  {:<12} {v:>10.4} {}", a.as_str(), a.unit());
    }
    if let Some(c) = attrs.central_point {
        println!("  {:<12} {:.3} {:.3} {:.3}", "centralPoint", c.x, c.y, c.z);
    }
    if attrs.approximate_orientation {
        println!("  (orientation from principal axis)");
    }
    Ok(())
}

fn main() -> bimgraph::Result<()> {
    let wall = Mesh::cuboid(Point::new(0.0, 0.0, 0.0), Point::new(0.2, 5.0, 3.0));
    show("wall along y", &wall, ObjectClass::Wall)?;

    let floor = Mesh::cuboid(Point::new(0.0, 0.0, -0.3), Point::new(8.0, 6.0, 0.0));
    show("floor", &floor, ObjectClass::Floor)?;

    let window = Mesh::cuboid(Point::new(1.0, 0.05, 0.9), Point::new(2.2, 0.15, 2.3));
    show("window", &window, ObjectClass::Window)?;

    let rot = UnitQuaternion::from_axis_angle(&Vector::x_axis(), 30f64.to_radians());
    let ramp = floor.transformed(&Isometry3::from_parts(Translation3::identity(), rot));
    println!("ramp slope {:.4} deg", attributes_for(&ramp, ObjectClass::Floor)?.get(Attribute::Slope).unwrap());
    Ok(())
}
