//! Class-dependent dimensional attributes.
//!
//! | class         | attributes                                                            |
//! |---------------|-----------------------------------------------------------------------|
//! | wall          | height, length, thickness, area (length x height), volume, orientation |
//! | floor         | thickness, length, width, area, perimeter, slope, volume, orientation |
//! | window / door | width, depth, height                                                  |
//!
//! Every class also gets `central_point`, the bounding-box center. Lengths
//! are in meters, angles in degrees. `orientation` is the plan angle of the
//! long side (0 along x, 90 along y).

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mesh::{Mesh, Point, Vector};
use crate::record::ObjectRecord;
use crate::ObjectClass;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Attribute {
    Height,
    Width,
    Length,
    Thickness,
    Depth,
    Area,
    Perimeter,
    Volume,
    Slope,
    Orientation,
}

impl Attribute {
    pub const ALL: [Attribute; 10] = [
        Attribute::Height,
        Attribute::Width,
        Attribute::Length,
        Attribute::Thickness,
        Attribute::Depth,
        Attribute::Area,
        Attribute::Perimeter,
        Attribute::Volume,
        Attribute::Slope,
        Attribute::Orientation,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Attribute::Height => "height",
            Attribute::Width => "width",
            Attribute::Length => "length",
            Attribute::Thickness => "thickness",
            Attribute::Depth => "depth",
            Attribute::Area => "area",
            Attribute::Perimeter => "perimeter",
            Attribute::Volume => "volume",
            Attribute::Slope => "slope",
            Attribute::Orientation => "orientation",
        }
    }

    pub fn unit(self) -> &'static str {
        match self {
            Attribute::Area => "m2",
            Attribute::Volume => "m3",
            Attribute::Slope | Attribute::Orientation => "deg",
            _ => "m",
        }
    }

    /// Areas and volumes are compared with a relative tolerance, the rest
    /// with an absolute one.
    pub fn is_derived_quantity(self) -> bool {
        matches!(self, Attribute::Area | Attribute::Volume)
    }
}

impl fmt::Display for Attribute {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Attribute {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Attribute::ALL
            .into_iter()
            .find(|a| a.as_str() == s)
            .ok_or_else(|| Error::Integrity(format!("unknown attribute '{s}'")))
    }
}

/// Attribute set required for each class.
pub fn required_attributes(class: ObjectClass) -> &'static [Attribute] {
    use Attribute::*;
    match class {
        ObjectClass::Wall => &[Height, Length, Thickness, Area, Volume, Orientation],
        ObjectClass::Floor => &[Thickness, Length, Width, Area, Perimeter, Slope, Volume, Orientation],
        ObjectClass::Window | ObjectClass::Door => &[Width, Depth, Height],
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct AttributeMap {
    values: BTreeMap<Attribute, f64>,
    pub central_point: Option<Point>,
    /// Set when a wall is not axis-aligned and its length/thickness split
    /// came from the principal plan direction instead.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub approximate_orientation: bool,
}

impl AttributeMap {
    pub fn new() -> Self {
        AttributeMap::default()
    }

    pub fn get(&self, a: Attribute) -> Option<f64> {
        self.values.get(&a).copied()
    }

    pub fn set(&mut self, a: Attribute, value: f64) {
        self.values.insert(a, value);
    }

    pub fn iter(&self) -> impl Iterator<Item = (Attribute, f64)> + '_ {
        self.values.iter().map(|(a, v)| (*a, *v))
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty() && self.central_point.is_none()
    }

    /// Largest deviation from `other` over the union of both key sets, with
    /// areas and volumes measured relative to `max(1, |expected|)`. A key
    /// present on one side only counts as infinite.
    pub fn max_deviation(&self, other: &AttributeMap) -> f64 {
        let mut worst: f64 = 0.0;
        for a in Attribute::ALL {
            match (self.get(a), other.get(a)) {
                (None, None) => {}
                (Some(x), Some(y)) => {
                    let d = (x - y).abs();
                    worst = worst.max(if a.is_derived_quantity() { d / y.abs().max(1.0) } else { d });
                }
                _ => return f64::INFINITY,
            }
        }
        match (self.central_point, other.central_point) {
            (Some(p), Some(q)) => worst.max((p - q).abs().max()),
            (None, None) => worst,
            _ => f64::INFINITY,
        }
    }
}

/// Below this a box extent counts as zero.
const ZERO_EXTENT: f64 = 1e-12;
/// Normals whose unit vectors differ by less than this are one group.
const PARALLEL_TOL: f64 = 1e-9;

pub fn compute_attributes(record: &ObjectRecord) -> Result<AttributeMap> {
    let class = record.class.ok_or_else(|| Error::MissingAttribute {
        node: record.id.clone(),
        attribute: "class".into(),
    })?;
    attributes_for(&record.mesh, class)
}

pub fn attributes_for(mesh: &Mesh, class: ObjectClass) -> Result<AttributeMap> {
    let bbox = mesh.aabb();
    let e = bbox.extents();
    for (i, axis) in ["x", "y", "z"].into_iter().enumerate() {
        if e[i] <= ZERO_EXTENT {
            return Err(Error::DegenerateGeometry {
                class: class.as_str().into(),
                axis,
            });
        }
    }
    let mut m = AttributeMap {
        central_point: Some(bbox.center()),
        ..AttributeMap::default()
    };
    let orientation_of = |ex: f64, ey: f64| if ex >= ey { 0.0 } else { 90.0 };
    use Attribute::*;
    match class {
        ObjectClass::Wall => {
            let (length, thickness, orientation) = if is_axis_aligned(mesh) {
                (e.x.max(e.y), e.x.min(e.y), orientation_of(e.x, e.y))
            } else {
                m.approximate_orientation = true;
                principal_plan_extents(mesh)
            };
            m.set(Height, e.z);
            m.set(Length, length);
            m.set(Thickness, thickness);
            m.set(Area, length * e.z);
            m.set(Volume, mesh.volume());
            m.set(Orientation, orientation);
        }
        ObjectClass::Floor => {
            let volume = mesh.volume();
            m.set(Thickness, e.z);
            m.set(Length, e.x.max(e.y));
            m.set(Width, e.x.min(e.y));
            m.set(Area, volume / e.z);
            m.set(Perimeter, 2.0 * (e.x + e.y));
            m.set(Slope, slope_degrees(mesh));
            m.set(Volume, volume);
            m.set(Orientation, orientation_of(e.x, e.y));
        }
        ObjectClass::Window | ObjectClass::Door => {
            m.set(Width, e.x.max(e.y));
            m.set(Depth, e.x.min(e.y));
            m.set(Height, e.z);
        }
    }
    Ok(m)
}

fn unit_normal(t: &[Point; 3]) -> Option<(Vector, f64)> {
    let c = (t[1] - t[0]).cross(&(t[2] - t[0]));
    let len = c.norm();
    (len > 0.0).then(|| (c / len, 0.5 * len))
}

fn is_axis_aligned(mesh: &Mesh) -> bool {
    mesh.triangle_points().all(|t| match unit_normal(&t) {
        Some((n, _)) => n.iter().filter(|c| c.abs() > PARALLEL_TOL).count() == 1,
        None => true,
    })
}

/// Length, thickness and plan angle from the principal direction of the
/// vertices projected onto the ground plane.
fn principal_plan_extents(mesh: &Mesh) -> (f64, f64, f64) {
    let vs = mesh.vertices();
    let n = vs.len() as f64;
    let (mx, my) = (
        vs.iter().map(|p| p.x).sum::<f64>() / n,
        vs.iter().map(|p| p.y).sum::<f64>() / n,
    );
    let (mut cxx, mut cyy, mut cxy) = (0.0, 0.0, 0.0);
    for p in vs {
        let (dx, dy) = (p.x - mx, p.y - my);
        cxx += dx * dx;
        cyy += dy * dy;
        cxy += dx * dy;
    }
    let angle = 0.5 * (2.0 * cxy).atan2(cxx - cyy);
    let (s, c) = angle.sin_cos();
    let span = |f: &dyn Fn(&Point) -> f64| {
        let (lo, hi) = vs
            .iter()
            .map(f)
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
        hi - lo
    };
    let along = span(&|p| p.x * c + p.y * s);
    let across = span(&|p| -p.x * s + p.y * c);
    let mut deg = angle.to_degrees();
    if along < across {
        deg += 90.0;
    }
    (along.max(across), along.min(across), deg.rem_euclid(180.0))
}

/// Angle between the vertical and the normal of the largest group of
/// parallel faces (opposite normals count as parallel).
pub fn slope_degrees(mesh: &Mesh) -> f64 {
    let mut groups: Vec<(Vector, f64)> = Vec::new();
    for t in mesh.triangle_points() {
        let Some((mut n, area)) = unit_normal(&t) else {
            continue;
        };
        let flip = n.z < -PARALLEL_TOL
            || (n.z.abs() <= PARALLEL_TOL && (n.y < -PARALLEL_TOL || (n.y.abs() <= PARALLEL_TOL && n.x < 0.0)));
        if flip {
            n = -n;
        }
        match groups.iter_mut().find(|(g, _)| (g - n).norm() < 1e-6) {
            Some(g) => g.1 += area,
            None => groups.push((n, area)),
        }
    }
    let mut best: Option<(Vector, f64)> = None;
    for g in groups {
        if best.is_none_or(|b| g.1 > b.1 * (1.0 + 1e-12)) {
            best = Some(g);
        }
    }
    best.map_or(0.0, |(n, _)| n.z.abs().min(1.0).acos().to_degrees())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use nalgebra::{Isometry3, Translation3, UnitQuaternion};

    fn boxed(min: [f64; 3], max: [f64; 3]) -> Mesh {
        Mesh::cuboid(Point::from(min), Point::from(max))
    }

    #[test]
    fn wall_box() {
        let m = attributes_for(&boxed([0.0; 3], [4.0, 0.2, 3.0]), ObjectClass::Wall).unwrap();
        assert_relative_eq!(m.get(Attribute::Height).unwrap(), 3.0);
        assert_relative_eq!(m.get(Attribute::Length).unwrap(), 4.0);
        assert_relative_eq!(m.get(Attribute::Thickness).unwrap(), 0.2);
        assert_relative_eq!(m.get(Attribute::Area).unwrap(), 12.0);
        assert_relative_eq!(m.get(Attribute::Volume).unwrap(), 2.4, max_relative = 1e-12);
        assert_eq!(m.get(Attribute::Orientation), Some(0.0));
        assert_eq!(m.central_point, Some(Point::new(2.0, 0.1, 1.5)));
        assert!(!m.approximate_orientation);
        assert!(m.get(Attribute::Slope).is_none());
    }

    #[test]
    fn floor_box() {
        let m = attributes_for(&boxed([0.0; 3], [5.0, 4.0, 0.25]), ObjectClass::Floor).unwrap();
        assert_relative_eq!(m.get(Attribute::Thickness).unwrap(), 0.25);
        assert_relative_eq!(m.get(Attribute::Area).unwrap(), 20.0, max_relative = 1e-12);
        assert_relative_eq!(m.get(Attribute::Perimeter).unwrap(), 18.0);
        assert_relative_eq!(m.get(Attribute::Volume).unwrap(), 5.0, max_relative = 1e-12);
        assert_eq!(m.get(Attribute::Slope), Some(0.0));
    }

    #[test]
    fn window_box() {
        let m = attributes_for(&boxed([1.0, 0.05, 0.9], [2.2, 0.15, 2.3]), ObjectClass::Window).unwrap();
        assert_relative_eq!(m.get(Attribute::Width).unwrap(), 1.2, epsilon = 1e-12);
        assert_relative_eq!(m.get(Attribute::Height).unwrap(), 1.4, epsilon = 1e-12);
        assert_relative_eq!(m.get(Attribute::Depth).unwrap(), 0.1, epsilon = 1e-12);
        assert_eq!(m.len(), 3);
    }

    #[test]
    fn flat_quad_is_degenerate() {
        let flat = Mesh::new(
            vec![
                Point::new(0.0, 0.0, 0.0),
                Point::new(1.0, 0.0, 0.0),
                Point::new(1.0, 1.0, 0.0),
            ],
            vec![[0, 1, 2]],
        )
        .unwrap();
        assert!(matches!(
            attributes_for(&flat, ObjectClass::Floor),
            Err(Error::DegenerateGeometry { axis: "z", .. })
        ));
    }

    #[test]
    fn rotated_slab_slope() {
        let slab = boxed([-2.5, -2.0, -0.125], [2.5, 2.0, 0.125]);
        for deg in [10.0_f64, 30.0, 45.0] {
            let rot = UnitQuaternion::from_axis_angle(&Vector::x_axis(), deg.to_radians());
            let iso = Isometry3::from_parts(Translation3::new(3.0, 1.0, 2.0), rot);
            assert_relative_eq!(slope_degrees(&slab.transformed(&iso)), deg, epsilon = 1e-9);
        }
    }

    #[test]
    fn rotated_wall_is_flagged() {
        let wall = boxed([-2.0, -0.1, 0.0], [2.0, 0.1, 3.0]);
        let rot = UnitQuaternion::from_axis_angle(&Vector::z_axis(), 30f64.to_radians());
        let m = attributes_for(&wall.transformed(&Isometry3::from_parts(Translation3::identity(), rot)), ObjectClass::Wall)
            .unwrap();
        assert!(m.approximate_orientation);
        assert_relative_eq!(m.get(Attribute::Length).unwrap(), 4.0, epsilon = 1e-9);
        assert_relative_eq!(m.get(Attribute::Thickness).unwrap(), 0.2, epsilon = 1e-9);
        assert_relative_eq!(m.get(Attribute::Orientation).unwrap(), 30.0, epsilon = 1e-9);
    }

    #[test]
    fn translation_moves_only_the_center() {
        let a = boxed([0.0; 3], [4.0, 0.2, 3.0]);
        let shift = Vector::new(10.0, -3.0, 0.5);
        let m = attributes_for(&a, ObjectClass::Wall).unwrap();
        let n = attributes_for(&a.translated(shift), ObjectClass::Wall).unwrap();
        for (k, v) in m.iter() {
            assert_relative_eq!(n.get(k).unwrap(), v, max_relative = 1e-12);
        }
        assert_relative_eq!(n.central_point.unwrap(), m.central_point.unwrap() + shift, epsilon = 1e-12);
    }
}
