//! From graph back to geometry: creation plan, realization, comparison.
//!
//! A [`ReconstructionPlan`] is the hand-off format a CAD adapter would
//! consume. Commands get fresh sequential ids; `source` keeps the graph node
//! each one came from.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::attributes::{Attribute, AttributeMap};
use crate::error::{Error, Result};
use crate::graph::BimGraph;
use crate::mesh::{Aabb, Mesh, Point, Vector};
use crate::solid::{wall_with_openings, HorizontalAxis, Opening};
use crate::synth::SceneObject;
use crate::ObjectClass;

pub const PLAN_VERSION: u32 = 1;

/// Snapping distance for values that went through the 9-digit text format.
const SNAP: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReconstructionPlan {
    pub version: u32,
    pub units: String,
    pub commands: Vec<Command>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "snake_case")]
pub enum Command {
    /// Wall along the centerline `start -> end` at base height, extruded up.
    CreateWall {
        id: String,
        source: String,
        units: String,
        start: Point,
        end: Point,
        height: f64,
        thickness: f64,
    },
    /// Slab whose top face is the rectangle `min..max` at height `top`.
    CreateFloor {
        id: String,
        source: String,
        units: String,
        min: [f64; 2],
        max: [f64; 2],
        top: f64,
        thickness: f64,
    },
    /// Window or door centered at `center`, cut into wall `host`.
    PlaceHosted {
        id: String,
        source: String,
        units: String,
        kind: ObjectClass,
        host: String,
        center: Point,
        width: f64,
        height: f64,
        depth: f64,
    },
}

impl Command {
    pub fn id(&self) -> &str {
        match self {
            Command::CreateWall { id, .. } | Command::CreateFloor { id, .. } | Command::PlaceHosted { id, .. } => id,
        }
    }

    pub fn source(&self) -> &str {
        match self {
            Command::CreateWall { source, .. }
            | Command::CreateFloor { source, .. }
            | Command::PlaceHosted { source, .. } => source,
        }
    }
}

impl ReconstructionPlan {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let plan: ReconstructionPlan = serde_json::from_str(text)?;
        plan.validate()?;
        Ok(plan)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_json()?).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        Self::from_json(&fs::read_to_string(path).map_err(|e| Error::io(path, e))?)
    }

    /// Version and units, unique ids, hosts that name an earlier wall, and
    /// no wall or floor after the first hosted placement.
    pub fn validate(&self) -> Result<()> {
        if self.version != PLAN_VERSION {
            return Err(Error::Plan(format!("unsupported plan version {}", self.version)));
        }
        let mut walls = std::collections::HashSet::new();
        let mut ids = std::collections::HashSet::new();
        let mut placing = false;
        let units_ok = |u: &str| u == "m";
        if !units_ok(&self.units) {
            return Err(Error::Plan(format!("unsupported units '{}'", self.units)));
        }
        for c in &self.commands {
            if !ids.insert(c.id()) {
                return Err(Error::Plan(format!("duplicate command id {}", c.id())));
            }
            match c {
                Command::CreateWall { id, units, .. } | Command::CreateFloor { id, units, .. } => {
                    if placing {
                        return Err(Error::Plan(format!("{id}: walls and floors must precede placements")));
                    }
                    if !units_ok(units) {
                        return Err(Error::Plan(format!("{id}: unsupported units '{units}'")));
                    }
                    if matches!(c, Command::CreateWall { .. }) {
                        walls.insert(id.as_str());
                    }
                }
                Command::PlaceHosted {
                    id, units, host, kind, ..
                } => {
                    placing = true;
                    if !units_ok(units) {
                        return Err(Error::Plan(format!("{id}: unsupported units '{units}'")));
                    }
                    if !kind.is_hosted_kind() {
                        return Err(Error::Plan(format!("{id}: {kind} cannot be hosted")));
                    }
                    if !walls.contains(host.as_str()) {
                        return Err(Error::Plan(format!("{id}: host {host} is not an earlier wall")));
                    }
                }
            }
        }
        Ok(())
    }
}

fn require(attrs: &AttributeMap, node: &str, a: Attribute) -> Result<f64> {
    attrs.get(a).ok_or_else(|| Error::MissingAttribute {
        node: node.into(),
        attribute: a.as_str().into(),
    })
}

fn center_of(attrs: &AttributeMap, node: &str) -> Result<Point> {
    attrs.central_point.ok_or_else(|| Error::MissingAttribute {
        node: node.into(),
        attribute: "centralPoint".into(),
    })
}

/// Walls, then floors, then windows and doors, each phase in node-name order.
pub fn plan_from_graph(graph: &BimGraph) -> Result<ReconstructionPlan> {
    let mut commands = Vec::new();
    let mut wall_ids: HashMap<&str, String> = HashMap::new();
    let next_id = |commands: &Vec<Command>| (commands.len() + 1).to_string();
    let of_class = |c: ObjectClass| graph.nodes().iter().filter(move |(_, n)| n.class == c);

    for (name, node) in of_class(ObjectClass::Wall) {
        let a = &node.attributes;
        let c = center_of(a, name)?;
        let length = require(a, name, Attribute::Length)?;
        let height = require(a, name, Attribute::Height)?;
        let thickness = require(a, name, Attribute::Thickness)?;
        let orientation = require(a, name, Attribute::Orientation)?;
        let dir = if orientation == 0.0 {
            Vector::x()
        } else if orientation == 90.0 {
            Vector::y()
        } else {
            let r = orientation.to_radians();
            Vector::new(r.cos(), r.sin(), 0.0)
        };
        let half = 0.5 * length * dir;
        let base = Point::new(c.x, c.y, c.z - 0.5 * height);
        let id = next_id(&commands);
        wall_ids.insert(name, id.clone());
        commands.push(Command::CreateWall {
            id,
            source: name.clone(),
            units: "m".into(),
            start: base - half,
            end: base + half,
            height,
            thickness,
        });
    }
    for (name, node) in of_class(ObjectClass::Floor) {
        let a = &node.attributes;
        let c = center_of(a, name)?;
        let length = require(a, name, Attribute::Length)?;
        let width = require(a, name, Attribute::Width)?;
        let thickness = require(a, name, Attribute::Thickness)?;
        let orientation = require(a, name, Attribute::Orientation)?;
        let (ex, ey) = if (orientation - 90.0).abs() < 45.0 {
            (width, length)
        } else {
            (length, width)
        };
        commands.push(Command::CreateFloor {
            id: next_id(&commands),
            source: name.clone(),
            units: "m".into(),
            min: [c.x - 0.5 * ex, c.y - 0.5 * ey],
            max: [c.x + 0.5 * ex, c.y + 0.5 * ey],
            top: c.z + 0.5 * thickness,
            thickness,
        });
    }
    // door_* sorts before window_*, so this is node-name order
    for kind in [ObjectClass::Door, ObjectClass::Window] {
        for (name, node) in of_class(kind) {
            let host = graph
                .query_host(name)?
                .ok_or_else(|| Error::Plan(format!("{name} has no host wall")))?;
            let host = wall_ids
                .get(host)
                .ok_or_else(|| Error::Plan(format!("{name} is hosted by {host}, which is not a wall")))?
                .clone();
            let a = &node.attributes;
            commands.push(Command::PlaceHosted {
                id: next_id(&commands),
                source: name.clone(),
                units: "m".into(),
                kind,
                host,
                center: center_of(a, name)?,
                width: require(a, name, Attribute::Width)?,
                height: require(a, name, Attribute::Height)?,
                depth: require(a, name, Attribute::Depth)?,
            });
        }
    }
    Ok(ReconstructionPlan {
        version: PLAN_VERSION,
        units: "m".into(),
        commands,
    })
}

struct WallSlot {
    id: String,
    axis: HorizontalAxis,
    bounds: Aabb,
    openings: Vec<Opening>,
}

fn snap_into(lo: f64, hi: f64, min: f64, max: f64) -> (f64, f64) {
    let lo = if lo < min && lo > min - SNAP { min } else { lo };
    let hi = if hi > max && hi < max + SNAP { max } else { hi };
    (lo, hi)
}

/// Realize a plan as meshes, cutting one opening per hosted object.
pub fn realize(plan: &ReconstructionPlan) -> Result<Vec<SceneObject>> {
    plan.validate()?;
    let mut walls: Vec<WallSlot> = Vec::new();
    let mut slot_of: HashMap<&str, usize> = HashMap::new();
    let mut out: Vec<Option<SceneObject>> = Vec::new();
    let mut wall_out: Vec<usize> = Vec::new();

    for c in &plan.commands {
        match c {
            Command::CreateWall {
                id,
                start,
                end,
                height,
                thickness,
                ..
            } => {
                let d = end - start;
                let len = d.norm();
                let axis = if d.y.abs() <= 1e-9 * len {
                    HorizontalAxis::X
                } else if d.x.abs() <= 1e-9 * len {
                    HorizontalAxis::Y
                } else {
                    return Err(Error::Geometry(format!("wall {id} is not axis-aligned")));
                };
                let (ui, wi) = (axis.index(), axis.other().index());
                let mut min = Point::new(0.0, 0.0, start.z);
                let mut max = Point::new(0.0, 0.0, start.z + height);
                min[ui] = start[ui].min(end[ui]);
                max[ui] = start[ui].max(end[ui]);
                min[wi] = start[wi] - 0.5 * thickness;
                max[wi] = start[wi] + 0.5 * thickness;
                slot_of.insert(id, walls.len());
                wall_out.push(out.len());
                out.push(None);
                walls.push(WallSlot {
                    id: id.clone(),
                    axis,
                    bounds: Aabb::new(min, max)?,
                    openings: Vec::new(),
                });
            }
            Command::CreateFloor {
                id,
                min,
                max,
                top,
                thickness,
                ..
            } => {
                let b = Aabb::new(
                    Point::new(min[0], min[1], top - thickness),
                    Point::new(max[0], max[1], *top),
                )?;
                out.push(Some(SceneObject {
                    id: id.clone(),
                    class: ObjectClass::Floor,
                    mesh: Mesh::cuboid(b.min, b.max),
                }));
            }
            Command::PlaceHosted {
                id,
                kind,
                host,
                center,
                width,
                height,
                depth,
                ..
            } => {
                let wall = &mut walls[slot_of[host.as_str()]];
                let (ui, wi) = (wall.axis.index(), wall.axis.other().index());
                let wb = wall.bounds;
                let (u0, u1) = snap_into(center[ui] - 0.5 * width, center[ui] + 0.5 * width, wb.min[ui], wb.max[ui]);
                let (w0, w1) = snap_into(center[wi] - 0.5 * depth, center[wi] + 0.5 * depth, wb.min[wi], wb.max[wi]);
                let (z0, z1) = snap_into(center.z - 0.5 * height, center.z + 0.5 * height, wb.min.z, wb.max.z);
                let mut min = Point::new(0.0, 0.0, z0);
                let mut max = Point::new(0.0, 0.0, z1);
                min[ui] = u0;
                max[ui] = u1;
                min[wi] = w0;
                max[wi] = w1;
                let b = Aabb::new(min, max)?;
                if !wb.contains(&b, 0.0) {
                    return Err(Error::Geometry(format!(
                        "{kind} {id} does not fit inside host wall {}",
                        wall.id
                    )));
                }
                wall.openings.push(Opening {
                    u_min: u0,
                    u_max: u1,
                    z_min: z0,
                    z_max: z1,
                });
                out.push(Some(SceneObject {
                    id: id.clone(),
                    class: *kind,
                    mesh: Mesh::cuboid(b.min, b.max),
                }));
            }
        }
    }
    for (wall, &k) in walls.iter().zip(&wall_out) {
        out[k] = Some(SceneObject {
            id: wall.id.clone(),
            class: ObjectClass::Wall,
            mesh: wall_with_openings(&wall.bounds, wall.axis, &wall.openings)?,
        });
    }
    Ok(out.into_iter().map(|o| o.expect("every slot filled")).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ObjectMatch {
    pub class: ObjectClass,
    pub original: String,
    pub reconstructed: String,
    /// Distance between bounding-box centers.
    pub center_delta: f64,
    /// Absolute extent difference per axis.
    pub extent_delta: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub tolerance: f64,
    pub matches: Vec<ObjectMatch>,
    pub unmatched_original: Vec<String>,
    pub unmatched_reconstructed: Vec<String>,
    pub pass: bool,
}

impl ComparisonReport {
    pub fn max_center_delta(&self) -> f64 {
        self.matches.iter().map(|m| m.center_delta).fold(0.0, f64::max)
    }

    pub fn max_extent_delta(&self) -> f64 {
        self.matches
            .iter()
            .flat_map(|m| m.extent_delta)
            .fold(0.0, f64::max)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "{}: {} matched, {} unmatched original, {} unmatched reconstructed (tol {} m)",
            if self.pass { "PASS" } else { "FAIL" },
            self.matches.len(),
            self.unmatched_original.len(),
            self.unmatched_reconstructed.len(),
            self.tolerance
        );
        let _ = writeln!(
            s,
            "max center delta {:.3e} m, max extent delta {:.3e} m",
            self.max_center_delta(),
            self.max_extent_delta()
        );
        for id in &self.unmatched_original {
            let _ = writeln!(s, "  unmatched original {id}");
        }
        for id in &self.unmatched_reconstructed {
            let _ = writeln!(s, "  unmatched reconstructed {id}");
        }
        s
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Pair objects of equal class whose centers and extents agree within
/// `tol`, nearest centers first. Ids are ignored.
pub fn compare_scenes(original: &[SceneObject], reconstructed: &[SceneObject], tol: f64) -> ComparisonReport {
    let boxes = |s: &[SceneObject]| s.iter().map(|o| o.mesh.aabb()).collect::<Vec<_>>();
    let (ba, bb) = (boxes(original), boxes(reconstructed));
    let mut candidates = Vec::new();
    for (i, a) in original.iter().enumerate() {
        for (j, b) in reconstructed.iter().enumerate() {
            if a.class != b.class {
                continue;
            }
            let center_delta = (ba[i].center() - bb[j].center()).norm();
            let ext = (ba[i].extents() - bb[j].extents()).abs();
            if center_delta <= tol && ext.max() <= tol {
                candidates.push((center_delta, i, j, [ext.x, ext.y, ext.z]));
            }
        }
    }
    candidates.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)).then(x.2.cmp(&y.2)));
    let mut used_a = vec![false; original.len()];
    let mut used_b = vec![false; reconstructed.len()];
    let mut matches = Vec::new();
    for (center_delta, i, j, extent_delta) in candidates {
        if used_a[i] || used_b[j] {
            continue;
        }
        used_a[i] = true;
        used_b[j] = true;
        matches.push(ObjectMatch {
            class: original[i].class,
            original: original[i].id.clone(),
            reconstructed: reconstructed[j].id.clone(),
            center_delta,
            extent_delta,
        });
    }
    matches.sort_by(|x, y| x.original.cmp(&y.original));
    let leftovers = |objs: &[SceneObject], used: &[bool]| {
        let mut v: Vec<String> = objs
            .iter()
            .zip(used)
            .filter(|(_, u)| !**u)
            .map(|(o, _)| o.id.clone())
            .collect();
        v.sort();
        v
    };
    let unmatched_original = leftovers(original, &used_a);
    let unmatched_reconstructed = leftovers(reconstructed, &used_b);
    ComparisonReport {
        tolerance: tol,
        pass: unmatched_original.is_empty() && unmatched_reconstructed.is_empty(),
        matches,
        unmatched_original,
        unmatched_reconstructed,
    }
}

/// Class histogram, handy for summaries.
pub fn class_counts(objects: &[SceneObject]) -> BTreeMap<ObjectClass, usize> {
    let mut m = BTreeMap::new();
    for o in objects {
        *m.entry(o.class).or_insert(0) += 1;
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::attributes::attributes_for;
    use crate::graph::build_graph;
    use crate::record::ObjectRecord;
    use crate::relations::{Predicate, Relation};
    use approx::assert_relative_eq;

    fn record(id: &str, class: ObjectClass, min: [f64; 3], max: [f64; 3]) -> ObjectRecord {
        let mut r = ObjectRecord::new(id, Mesh::cuboid(Point::from(min), Point::from(max))).with_class(class);
        r.attributes = Some(attributes_for(&r.mesh, class).unwrap());
        r
    }

    fn wall_and_window(hosted: bool) -> BimGraph {
        let rels = if hosted {
            vec![
                Relation::new("1", Predicate::Hosting, "2"),
                Relation::new("2", Predicate::Hosted, "1"),
            ]
        } else {
            vec![]
        };
        build_graph(
            &[
                record("1", ObjectClass::Wall, [0.0; 3], [4.0, 0.2, 3.0]),
                record("2", ObjectClass::Window, [1.4, 0.05, 0.8], [2.6, 0.15, 2.2]),
            ],
            &rels,
        )
        .unwrap()
    }

    #[test]
    fn wall_centerline() {
        let g = build_graph(&[record("1", ObjectClass::Wall, [0.0; 3], [4.0, 0.2, 3.0])], &[]).unwrap();
        let plan = plan_from_graph(&g).unwrap();
        match &plan.commands[..] {
            [Command::CreateWall {
                start,
                end,
                height,
                thickness,
                ..
            }] => {
                assert_relative_eq!(*start, Point::new(0.0, 0.1, 0.0), epsilon = 1e-12);
                assert_relative_eq!(*end, Point::new(4.0, 0.1, 0.0), epsilon = 1e-12);
                assert_eq!((*height, *thickness), (3.0, 0.2));
            }
            other => panic!("{other:?}"),
        }
        let objs = realize(&plan).unwrap();
        assert_relative_eq!(objs[0].mesh.volume(), 2.4, max_relative = 1e-12);
    }

    #[test]
    fn window_plan_and_opening() {
        let plan = plan_from_graph(&wall_and_window(true)).unwrap();
        assert!(matches!(plan.commands[0], Command::CreateWall { .. }));
        assert!(matches!(&plan.commands[1], Command::PlaceHosted { host, .. } if host == "1"));
        let objs = realize(&plan).unwrap();
        assert_relative_eq!(objs[0].mesh.volume(), 2.4 - 1.2 * 1.4 * 0.2, max_relative = 1e-9);
        assert!(objs[0].mesh.aabb().contains(&objs[1].mesh.aabb(), 0.0));
        let back = ReconstructionPlan::from_json(&plan.to_json().unwrap()).unwrap();
        assert_eq!(back, plan);
    }

    #[test]
    fn unhosted_window_is_plan_error() {
        assert!(matches!(plan_from_graph(&wall_and_window(false)), Err(Error::Plan(m)) if m.contains("window_2")));
    }

    #[test]
    fn oversize_hosted_object_is_rejected() {
        let mut plan = plan_from_graph(&wall_and_window(true)).unwrap();
        if let Command::PlaceHosted { width, .. } = &mut plan.commands[1] {
            *width = 9.0;
        }
        assert!(matches!(realize(&plan), Err(Error::Geometry(_))));
    }

    #[test]
    fn comparison() {
        let objs = realize(&plan_from_graph(&wall_and_window(true)).unwrap()).unwrap();
        let same = compare_scenes(&objs, &objs, 1e-3);
        assert!(same.pass);
        assert_eq!(same.max_center_delta(), 0.0);

        let renamed: Vec<SceneObject> = objs
            .iter()
            .map(|o| SceneObject {
                id: format!("x{}", o.id),
                ..o.clone()
            })
            .collect();
        assert!(compare_scenes(&objs, &renamed, 1e-3).pass);

        let mut moved = objs.clone();
        moved[0].mesh = moved[0].mesh.translated(Vector::new(0.5, 0.0, 0.0));
        let r = compare_scenes(&objs, &moved, 1e-3);
        assert!(!r.pass);
        assert_eq!(r.unmatched_original, ["1"]);
        assert!(r.to_text().starts_with("FAIL"));
    }
}
