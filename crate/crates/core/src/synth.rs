//! Seeded apartment scenes with analytic ground truth.
//!
//! A scene is an orthogonal grid of rooms. Walls running along x sit on the
//! horizontal grid lines and span the full footprint; walls running along y
//! fill the gaps between them, so every junction is an exact face contact.
//! One slab lies under the whole footprint with its top at z = 0. Exterior
//! wall bays receive windows, one exterior bay receives the entrance door,
//! and interior bays may receive doors. Each window or door fills its
//! opening exactly.
//!
//! Classes, attributes and relations are derived from the construction
//! parameters alone.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::attributes::{Attribute, AttributeMap};
use crate::error::{Error, Result};
use crate::features::{extract_features, write_features_csv, FeatureRow};
use crate::mesh::{Aabb, Mesh, Point};
use crate::ply::write_ply;
use crate::relations::{Predicate, Relation};
use crate::solid::{wall_with_openings, HorizontalAxis, Opening};
use crate::ObjectClass;

/// Closed interval of a uniformly drawn quantity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Span {
    pub min: f64,
    pub max: f64,
}

impl Span {
    pub const fn new(min: f64, max: f64) -> Self {
        Span { min, max }
    }

    fn draw(self, rng: &mut ChaCha8Rng) -> f64 {
        if self.min == self.max {
            self.min
        } else {
            rng.gen_range(self.min..=self.max)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SceneSpec {
    pub seed: u64,
    /// Room count along x, inclusive range.
    pub rooms_x: (usize, usize),
    pub rooms_y: (usize, usize),
    pub room_size: Span,
    pub exterior_thickness: Span,
    pub interior_thickness: Span,
    pub wall_height: Span,
    pub floor_thickness: Span,
    /// Windows per exterior wall bay (one bay per room side).
    pub windows_per_bay: (usize, usize),
    /// Doors per interior wall bay.
    pub doors_per_interior_bay: (usize, usize),
    pub window_width: Span,
    pub window_height: Span,
    pub sill_height: Span,
    /// Window depth as a fraction of the host wall thickness.
    pub window_depth_ratio: Span,
    pub door_width: Span,
    pub door_height: Span,
    /// Clearance between openings, and between an opening and a wall end
    /// or junction.
    pub margin: f64,
    /// Scenes are shifted in plan by up to this much along x and y.
    pub max_offset: f64,
}

impl Default for SceneSpec {
    fn default() -> Self {
        SceneSpec {
            seed: 0,
            rooms_x: (1, 3),
            rooms_y: (1, 3),
            room_size: Span::new(3.0, 5.0),
            exterior_thickness: Span::new(0.25, 0.4),
            interior_thickness: Span::new(0.1, 0.2),
            wall_height: Span::new(2.6, 3.2),
            floor_thickness: Span::new(0.2, 0.35),
            windows_per_bay: (0, 1),
            doors_per_interior_bay: (0, 1),
            window_width: Span::new(0.6, 1.6),
            window_height: Span::new(0.8, 1.4),
            sill_height: Span::new(0.5, 1.0),
            window_depth_ratio: Span::new(0.3, 1.0),
            door_width: Span::new(0.8, 1.0),
            door_height: Span::new(2.0, 2.2),
            margin: 0.2,
            max_offset: 10.0,
        }
    }
}

impl SceneSpec {
    pub fn seeded(seed: u64) -> Self {
        SceneSpec {
            seed,
            ..SceneSpec::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let spans = [
            ("room_size", self.room_size),
            ("exterior_thickness", self.exterior_thickness),
            ("interior_thickness", self.interior_thickness),
            ("wall_height", self.wall_height),
            ("floor_thickness", self.floor_thickness),
            ("window_width", self.window_width),
            ("window_height", self.window_height),
            ("sill_height", self.sill_height),
            ("window_depth_ratio", self.window_depth_ratio),
            ("door_width", self.door_width),
            ("door_height", self.door_height),
        ];
        for (name, s) in spans {
            if !(s.min > 0.0 && s.min <= s.max && s.max.is_finite()) {
                return Err(Error::Spec(format!("{name} must satisfy 0 < min <= max, got {s:?}")));
            }
        }
        if self.window_depth_ratio.max > 1.0 {
            return Err(Error::Spec("window_depth_ratio cannot exceed 1".into()));
        }
        for (name, (lo, hi)) in [
            ("rooms_x", self.rooms_x),
            ("rooms_y", self.rooms_y),
            ("windows_per_bay", self.windows_per_bay),
            ("doors_per_interior_bay", self.doors_per_interior_bay),
        ] {
            if lo > hi {
                return Err(Error::Spec(format!("{name} range ({lo}, {hi}) is reversed")));
            }
        }
        if self.rooms_x.0 == 0 || self.rooms_y.0 == 0 {
            return Err(Error::Spec("at least one room per axis".into()));
        }
        if !(self.margin > 0.0 && self.margin.is_finite()) {
            return Err(Error::Spec("margin must be positive".into()));
        }
        if !(self.max_offset >= 0.0 && self.max_offset.is_finite()) {
            return Err(Error::Spec("max_offset must be >= 0".into()));
        }
        let max_t = self.exterior_thickness.max.max(self.interior_thickness.max);
        let shortest_bay = self.room_size.min - max_t - 2.0 * self.margin;
        if self.door_width.max > shortest_bay {
            return Err(Error::Spec(format!(
                "door width up to {} does not fit the shortest wall bay ({shortest_bay:.3} m)",
                self.door_width.max
            )));
        }
        let longest_bay = self.room_size.max - 2.0 * self.margin;
        if self.window_width.min > longest_bay {
            return Err(Error::Spec(format!(
                "window width {} exceeds every wall bay (at most {longest_bay:.3} m)",
                self.window_width.min
            )));
        }
        let top = self.wall_height.min - self.margin;
        if self.door_height.max > top {
            return Err(Error::Spec("door height does not fit under the lowest wall".into()));
        }
        if self.sill_height.max + self.window_height.max > top {
            return Err(Error::Spec("sill plus window height does not fit the lowest wall".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SceneObject {
    pub id: String,
    pub class: ObjectClass,
    pub mesh: Mesh,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub classes: BTreeMap<String, ObjectClass>,
    pub attributes: BTreeMap<String, AttributeMap>,
    /// Sorted, both directions of every pair.
    pub relations: Vec<Relation>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scene {
    pub seed: u64,
    pub objects: Vec<SceneObject>,
    pub truth: GroundTruth,
}

impl Scene {
    pub fn ids(&self) -> Vec<String> {
        self.objects.iter().map(|o| o.id.clone()).collect()
    }
}

struct WallPlan {
    axis: HorizontalAxis,
    bounds: Aabb,
    bays: Vec<(f64, f64)>,
    exterior: bool,
    openings: Vec<Opening>,
}

struct HostedPlan {
    class: ObjectClass,
    wall: usize,
    bounds: Aabb,
}

#[derive(Clone, Copy)]
struct Request {
    class: ObjectClass,
    width: f64,
    height: f64,
    bottom: f64,
    required: bool,
}

fn cumulative(origin: f64, sizes: &[f64]) -> Vec<f64> {
    let mut out = vec![origin];
    for s in sizes {
        out.push(out.last().unwrap() + s);
    }
    out
}

fn boxed(min: [f64; 3], max: [f64; 3]) -> Aabb {
    Aabb {
        min: Point::from(min),
        max: Point::from(max),
    }
}

pub fn generate_scene(spec: &SceneSpec) -> Result<Scene> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let nx = rng.gen_range(spec.rooms_x.0..=spec.rooms_x.1);
    let ny = rng.gen_range(spec.rooms_y.0..=spec.rooms_y.1);
    let room_w: Vec<f64> = (0..nx).map(|_| spec.room_size.draw(&mut rng)).collect();
    let room_d: Vec<f64> = (0..ny).map(|_| spec.room_size.draw(&mut rng)).collect();
    let te = spec.exterior_thickness.draw(&mut rng);
    let ti = spec.interior_thickness.draw(&mut rng);
    let height = spec.wall_height.draw(&mut rng);
    let ft = spec.floor_thickness.draw(&mut rng);
    let (ox, oy) = if spec.max_offset > 0.0 {
        (
            rng.gen_range(-spec.max_offset..=spec.max_offset),
            rng.gen_range(-spec.max_offset..=spec.max_offset),
        )
    } else {
        (0.0, 0.0)
    };
    let xs = cumulative(ox, &room_w);
    let ys = cumulative(oy, &room_d);
    let tx: Vec<f64> = (0..=nx).map(|i| if i == 0 || i == nx { te } else { ti }).collect();
    let ty: Vec<f64> = (0..=ny).map(|j| if j == 0 || j == ny { te } else { ti }).collect();
    let y_lo: Vec<f64> = (0..=ny).map(|j| ys[j] - 0.5 * ty[j]).collect();
    let y_hi: Vec<f64> = (0..=ny).map(|j| ys[j] + 0.5 * ty[j]).collect();
    let x_lo: Vec<f64> = (0..=nx).map(|i| xs[i] - 0.5 * tx[i]).collect();
    let x_hi: Vec<f64> = (0..=nx).map(|i| xs[i] + 0.5 * tx[i]).collect();
    let m = spec.margin;

    let mut walls = Vec::new();
    let mut wall_pairs = Vec::new();
    for j in 0..=ny {
        walls.push(WallPlan {
            axis: HorizontalAxis::X,
            bounds: boxed([x_lo[0], y_lo[j], 0.0], [x_hi[nx], y_hi[j], height]),
            bays: (0..nx).map(|i| (x_hi[i] + m, x_lo[i + 1] - m)).collect(),
            exterior: j == 0 || j == ny,
            openings: Vec::new(),
        });
    }
    for i in 0..=nx {
        for j in 0..ny {
            let k = walls.len();
            walls.push(WallPlan {
                axis: HorizontalAxis::Y,
                bounds: boxed([x_lo[i], y_hi[j], 0.0], [x_hi[i], y_lo[j + 1], height]),
                bays: vec![(y_hi[j] + m, y_lo[j + 1] - m)],
                exterior: i == 0 || i == nx,
                openings: Vec::new(),
            });
            wall_pairs.push((k, j));
            wall_pairs.push((k, j + 1));
        }
    }
    let floor = boxed([x_lo[0], y_lo[0], -ft], [x_hi[nx], y_hi[ny], 0.0]);

    let bays: Vec<(usize, usize)> = walls
        .iter()
        .enumerate()
        .flat_map(|(w, plan)| (0..plan.bays.len()).map(move |b| (w, b)))
        .collect();
    let exterior: Vec<(usize, usize)> = bays.iter().copied().filter(|&(w, _)| walls[w].exterior).collect();
    let entrance = *exterior.choose(&mut rng).expect("every scene has exterior walls");

    let mut hosted = Vec::new();
    for &(w, b) in &bays {
        let mut requests = Vec::new();
        if (w, b) == entrance {
            requests.push(Request {
                class: ObjectClass::Door,
                width: spec.door_width.draw(&mut rng),
                height: spec.door_height.draw(&mut rng),
                bottom: 0.0,
                required: true,
            });
        }
        let (class, count) = if walls[w].exterior {
            (ObjectClass::Window, spec.windows_per_bay)
        } else {
            (ObjectClass::Door, spec.doors_per_interior_bay)
        };
        for _ in 0..rng.gen_range(count.0..=count.1) {
            requests.push(if class == ObjectClass::Window {
                Request {
                    class,
                    width: spec.window_width.draw(&mut rng),
                    height: spec.window_height.draw(&mut rng),
                    bottom: spec.sill_height.draw(&mut rng),
                    required: false,
                }
            } else {
                Request {
                    class,
                    width: spec.door_width.draw(&mut rng),
                    height: spec.door_height.draw(&mut rng),
                    bottom: 0.0,
                    required: false,
                }
            });
        }
        let (a, z) = walls[w].bays[b];
        let fits = |rs: &[Request]| {
            let total: f64 = rs.iter().map(|r| r.width).sum();
            total + m * rs.len().saturating_sub(1) as f64 <= z - a
        };
        while !fits(&requests) {
            match requests.iter().rposition(|r| !r.required) {
                Some(k) => {
                    requests.remove(k);
                }
                None => {
                    return Err(Error::Spec(format!(
                        "door does not fit in a {:.3} m wall bay",
                        z - a
                    )))
                }
            }
        }
        if requests.is_empty() {
            continue;
        }
        requests.shuffle(&mut rng);
        let total: f64 = requests.iter().map(|r| r.width).sum();
        let slack = (z - a) - total - m * (requests.len() - 1) as f64;
        let weights: Vec<f64> = (0..=requests.len()).map(|_| rng.gen::<f64>() + 1e-3).collect();
        let wsum: f64 = weights.iter().sum();
        let mut u = a + slack * weights[0] / wsum;
        let (axis, bounds) = (walls[w].axis, walls[w].bounds);
        let (ui, wi) = (axis.index(), axis.other().index());
        let thickness = bounds.max[wi] - bounds.min[wi];
        for (k, r) in requests.iter().enumerate() {
            let opening = Opening {
                u_min: u,
                u_max: u + r.width,
                z_min: r.bottom,
                z_max: r.bottom + r.height,
            };
            let (w0, w1) = if r.class == ObjectClass::Window {
                let depth = thickness * spec.window_depth_ratio.draw(&mut rng);
                let c = 0.5 * (bounds.min[wi] + bounds.max[wi]);
                (c - 0.5 * depth, c + 0.5 * depth)
            } else {
                (bounds.min[wi], bounds.max[wi])
            };
            let mut min = Point::new(0.0, 0.0, opening.z_min);
            let mut max = Point::new(0.0, 0.0, opening.z_max);
            min[ui] = opening.u_min;
            max[ui] = opening.u_max;
            min[wi] = w0;
            max[wi] = w1;
            hosted.push(HostedPlan {
                class: r.class,
                wall: w,
                bounds: Aabb { min, max },
            });
            walls[w].openings.push(opening);
            u = opening.u_max + m + slack * weights[k + 1] / wsum;
        }
    }

    assemble(spec.seed, &walls, &wall_pairs, floor, &hosted)
}

fn assemble(
    seed: u64,
    walls: &[WallPlan],
    wall_pairs: &[(usize, usize)],
    floor: Aabb,
    hosted: &[HostedPlan],
) -> Result<Scene> {
    let wall_id = |w: usize| (w + 1).to_string();
    let floor_id = (walls.len() + 1).to_string();
    let hosted_id = |h: usize| (walls.len() + 2 + h).to_string();

    let mut objects = Vec::new();
    let mut truth = GroundTruth::default();
    let mut relations = Vec::new();
    fn both(rels: &mut Vec<Relation>, a: &str, p: Predicate, b: &str) {
        let r = Relation::new(a, p, b);
        rels.push(r.inverse());
        rels.push(r);
    }

    for (w, plan) in walls.iter().enumerate() {
        let mesh = wall_with_openings(&plan.bounds, plan.axis, &plan.openings)?;
        let e = plan.bounds.extents();
        let (length, thickness) = (e[plan.axis.index()], e[plan.axis.other().index()]);
        let cut: f64 = plan
            .openings
            .iter()
            .map(|o| (o.u_max - o.u_min) * (o.z_max - o.z_min) * thickness)
            .sum();
        let mut attrs = AttributeMap::new();
        attrs.central_point = Some(plan.bounds.center());
        attrs.set(Attribute::Height, e.z);
        attrs.set(Attribute::Length, length);
        attrs.set(Attribute::Thickness, thickness);
        attrs.set(Attribute::Area, length * e.z);
        attrs.set(Attribute::Volume, length * e.z * thickness - cut);
        attrs.set(Attribute::Orientation, plan.axis.degrees());
        push(&mut objects, &mut truth, wall_id(w), ObjectClass::Wall, mesh, attrs);
        both(&mut relations, &wall_id(w), Predicate::AdjacentTo, &floor_id);
    }
    for &(y_wall, x_wall) in wall_pairs {
        both(&mut relations, &wall_id(y_wall), Predicate::AdjacentTo, &wall_id(x_wall));
    }

    let e = floor.extents();
    let mut attrs = AttributeMap::new();
    attrs.central_point = Some(floor.center());
    attrs.set(Attribute::Thickness, e.z);
    attrs.set(Attribute::Length, e.x.max(e.y));
    attrs.set(Attribute::Width, e.x.min(e.y));
    attrs.set(Attribute::Area, e.x * e.y);
    attrs.set(Attribute::Perimeter, 2.0 * (e.x + e.y));
    attrs.set(Attribute::Slope, 0.0);
    attrs.set(Attribute::Volume, e.x * e.y * e.z);
    attrs.set(Attribute::Orientation, if e.x >= e.y { 0.0 } else { 90.0 });
    push(
        &mut objects,
        &mut truth,
        floor_id.clone(),
        ObjectClass::Floor,
        Mesh::cuboid(floor.min, floor.max),
        attrs,
    );

    for (h, plan) in hosted.iter().enumerate() {
        let id = hosted_id(h);
        let e = plan.bounds.extents();
        let axis = walls[plan.wall].axis;
        let mut attrs = AttributeMap::new();
        attrs.central_point = Some(plan.bounds.center());
        attrs.set(Attribute::Width, e[axis.index()]);
        attrs.set(Attribute::Depth, e[axis.other().index()]);
        attrs.set(Attribute::Height, e.z);
        push(
            &mut objects,
            &mut truth,
            id.clone(),
            plan.class,
            Mesh::cuboid(plan.bounds.min, plan.bounds.max),
            attrs,
        );
        let host = wall_id(plan.wall);
        relations.push(Relation::new(host.as_str(), Predicate::Hosting, id.as_str()));
        relations.push(Relation::new(id.as_str(), Predicate::Hosted, host.as_str()));
        if plan.class == ObjectClass::Door {
            both(&mut relations, &id, Predicate::AdjacentTo, &floor_id);
        }
    }
    relations.sort();
    relations.dedup();
    truth.relations = relations;
    Ok(Scene { seed, objects, truth })
}

fn push(
    objects: &mut Vec<SceneObject>,
    truth: &mut GroundTruth,
    id: String,
    class: ObjectClass,
    mesh: Mesh,
    attrs: AttributeMap,
) {
    truth.classes.insert(id.clone(), class);
    truth.attributes.insert(id.clone(), attrs);
    objects.push(SceneObject { id, class, mesh });
}

/// Seed of scene `index` in a corpus built from `base`.
pub fn scene_seed(base: u64, index: usize) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(base);
    rng.set_stream(index as u64 + 1);
    rng.next_u64()
}

/// `n` scenes, generated in parallel; scene `i` uses [`scene_seed`]`(spec.seed, i)`.
pub fn generate_scenes(spec: &SceneSpec, n: usize) -> Result<Vec<Scene>> {
    spec.validate()?;
    (0..n)
        .into_par_iter()
        .map(|i| {
            generate_scene(&SceneSpec {
                seed: scene_seed(spec.seed, i),
                ..*spec
            })
        })
        .collect()
}

pub fn scene_name(index: usize) -> String {
    format!("scene_{index:03}")
}

/// Labeled feature rows with ids `<scene>/<object>`.
pub fn feature_rows(scenes: &[Scene]) -> Vec<FeatureRow> {
    scenes
        .iter()
        .enumerate()
        .flat_map(|(i, s)| {
            s.objects.iter().map(move |o| FeatureRow {
                id: format!("{}/{}", scene_name(i), o.id),
                label: Some(o.class),
                features: extract_features(&o.mesh),
            })
        })
        .collect()
}

pub const MANIFEST_FORMAT: &str = "bimgraph-corpus";
pub const MANIFEST_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub format: String,
    pub version: u32,
    pub units: String,
    pub seed: u64,
    pub spec: SceneSpec,
    pub class_histogram: BTreeMap<ObjectClass, usize>,
    pub object_count: usize,
    pub scenes: Vec<ManifestScene>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestScene {
    pub name: String,
    pub seed: u64,
    pub objects: Vec<ManifestObject>,
    pub relations: Vec<Relation>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestObject {
    pub id: String,
    pub class: ObjectClass,
    /// Relative to the corpus root.
    pub file: String,
    pub attributes: AttributeMap,
}

impl Manifest {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let m: Manifest = serde_json::from_str(&text)?;
        if m.format != MANIFEST_FORMAT || m.version != MANIFEST_VERSION {
            return Err(Error::Dataset(format!(
                "{} is not a version {MANIFEST_VERSION} {MANIFEST_FORMAT} manifest",
                path.display()
            )));
        }
        Ok(m)
    }
}

pub fn build_manifest(spec: &SceneSpec, scenes: &[Scene]) -> Manifest {
    let mut class_histogram: BTreeMap<ObjectClass, usize> = ObjectClass::ALL.iter().map(|c| (*c, 0)).collect();
    let scenes: Vec<ManifestScene> = scenes
        .iter()
        .enumerate()
        .map(|(i, s)| ManifestScene {
            name: scene_name(i),
            seed: s.seed,
            objects: s
                .objects
                .iter()
                .map(|o| {
                    *class_histogram.get_mut(&o.class).expect("all classes") += 1;
                    ManifestObject {
                        id: o.id.clone(),
                        class: o.class,
                        file: format!("{}/{}.ply", scene_name(i), o.id),
                        attributes: s.truth.attributes[&o.id].clone(),
                    }
                })
                .collect(),
            relations: s.truth.relations.clone(),
        })
        .collect();
    Manifest {
        format: MANIFEST_FORMAT.into(),
        version: MANIFEST_VERSION,
        units: "m".into(),
        seed: spec.seed,
        spec: *spec,
        object_count: class_histogram.values().sum(),
        class_histogram,
        scenes,
    }
}

/// Write `manifest.json`, `features.csv` and one PLY per object under
/// `out/scene_NNN/`.
pub fn generate_corpus(spec: &SceneSpec, n: usize, out: impl AsRef<Path>) -> Result<Manifest> {
    if n == 0 {
        return Err(Error::Spec("a corpus needs at least one scene".into()));
    }
    let out = out.as_ref();
    let scenes = generate_scenes(spec, n)?;
    fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    for (i, s) in scenes.iter().enumerate() {
        write_scene(s, out.join(scene_name(i)))?;
    }
    let manifest = build_manifest(spec, &scenes);
    let path = out.join("manifest.json");
    fs::write(&path, serde_json::to_string_pretty(&manifest)? + "\n").map_err(|e| Error::io(&path, e))?;
    let path = out.join("features.csv");
    let file = fs::File::create(&path).map_err(|e| Error::io(&path, e))?;
    write_features_csv(&feature_rows(&scenes), std::io::BufWriter::new(file))?;
    Ok(manifest)
}

/// One PLY per object, named `<id>.ply`.
pub fn write_scene(scene: &Scene, dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    write_objects(&scene.objects, dir)
}

pub fn write_objects(objects: &[SceneObject], dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    objects
        .iter()
        .map(|o| {
            let path = dir.join(format!("{}.ply", o.id));
            write_ply(&o.mesh, &path)?;
            Ok(path)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_room(seed: u64) -> SceneSpec {
        SceneSpec {
            rooms_x: (1, 1),
            rooms_y: (1, 1),
            ..SceneSpec::seeded(seed)
        }
    }

    #[test]
    fn single_room_layout() {
        let s = generate_scene(&one_room(3)).unwrap();
        let count = |c| s.objects.iter().filter(|o| o.class == c).count();
        assert_eq!(count(ObjectClass::Wall), 4);
        assert_eq!(count(ObjectClass::Floor), 1);
        assert!(count(ObjectClass::Door) >= 1);
        let walls: Vec<&String> = s
            .objects
            .iter()
            .filter(|o| o.class == ObjectClass::Wall)
            .map(|o| &o.id)
            .collect();
        let wall_wall = s
            .truth
            .relations
            .iter()
            .filter(|r| r.predicate == Predicate::AdjacentTo && walls.contains(&&r.subject) && walls.contains(&&r.object))
            .count();
        assert_eq!(wall_wall, 8);
        let floor = &s.objects.iter().find(|o| o.class == ObjectClass::Floor).unwrap().id;
        for w in walls {
            assert!(s.truth.relations.contains(&Relation::new(w.as_str(), Predicate::AdjacentTo, floor.as_str())));
        }
    }

    #[test]
    fn deterministic() {
        let spec = SceneSpec::seeded(11);
        assert_eq!(generate_scene(&spec).unwrap(), generate_scene(&spec).unwrap());
        assert_ne!(generate_scene(&spec).unwrap(), generate_scene(&SceneSpec::seeded(12)).unwrap());
    }

    #[test]
    fn infeasible_specs() {
        let wide = SceneSpec {
            window_width: Span::new(9.0, 9.5),
            ..SceneSpec::default()
        };
        assert!(matches!(generate_scene(&wide), Err(Error::Spec(_))));
        let tall = SceneSpec {
            door_height: Span::new(2.0, 3.5),
            ..SceneSpec::default()
        };
        assert!(matches!(generate_scene(&tall), Err(Error::Spec(_))));
        let reversed = SceneSpec {
            room_size: Span::new(5.0, 3.0),
            ..SceneSpec::default()
        };
        assert!(reversed.validate().is_err());
    }

    #[test]
    fn hosted_boxes_sit_inside_their_walls() {
        for seed in 0..10 {
            let s = generate_scene(&SceneSpec::seeded(seed)).unwrap();
            let by_id: BTreeMap<&str, &SceneObject> = s.objects.iter().map(|o| (o.id.as_str(), o)).collect();
            for r in s.truth.relations.iter().filter(|r| r.predicate == Predicate::Hosting) {
                let wall = by_id[r.subject.as_str()].mesh.aabb();
                let opening = by_id[r.object.as_str()].mesh.aabb();
                assert!(wall.contains(&opening, 1e-12));
            }
        }
    }

    #[test]
    fn wall_volume_matches_mesh() {
        let s = generate_scene(&SceneSpec::seeded(5)).unwrap();
        for o in s.objects.iter().filter(|o| o.class == ObjectClass::Wall) {
            assert!(o.mesh.is_closed());
            let expected = s.truth.attributes[&o.id].get(Attribute::Volume).unwrap();
            assert!((o.mesh.volume() - expected).abs() <= 1e-9 * expected);
        }
    }

    #[test]
    fn corpus_on_disk() {
        let dir = tempfile::tempdir().unwrap();
        let m = generate_corpus(&SceneSpec::seeded(1), 2, dir.path()).unwrap();
        assert_eq!(m.scenes.len(), 2);
        let back = Manifest::load(dir.path().join("manifest.json")).unwrap();
        assert_eq!(back, m);
        for o in &m.scenes[1].objects {
            assert!(dir.path().join(&o.file).is_file());
        }
        let csv = fs::read_to_string(dir.path().join("features.csv")).unwrap();
        assert_eq!(csv.lines().count(), m.object_count + 1);
        assert!(csv.contains("\nscene_000/1,wall,"));
    }
}
