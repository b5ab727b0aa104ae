use approx::assert_relative_eq;
use nalgebra::{Isometry3, Translation3, UnitQuaternion};
use proptest::prelude::*;

use bimgraph::attributes::{attributes_for, Attribute};
use bimgraph::classifier::{
    split, train_forest, train_tree, FeatureMask, ForestParams, LabeledDataset, Model, SplitSpec, TreeParams,
};
use bimgraph::features::{extract_features, FEATURE_COUNT, SHAPE_FEATURES};
use bimgraph::graph::build_graph;
use bimgraph::ply::{encode_ply, parse_ply, Encoding};
use bimgraph::proximity::mesh_distance;
use bimgraph::reconstruct::{plan_from_graph, realize};
use bimgraph::record::ObjectRecord;
use bimgraph::relations::{check_relation_invariants, infer_all, RelationConfig};
use bimgraph::synth::{feature_rows, generate_scene, generate_scenes, SceneSpec};
use bimgraph::turtle::{parse_turtle, serialize_turtle};
use bimgraph::{Mesh, ObjectClass, Point, Vector};

fn point(r: f64) -> impl Strategy<Value = Point> {
    (-r..r, -r..r, -r..r).prop_map(|(x, y, z)| Point::new(x, y, z))
}

fn extents() -> impl Strategy<Value = Vector> {
    (0.01..10.0, 0.01..10.0, 0.01..10.0).prop_map(|(x, y, z)| Vector::new(x, y, z))
}

fn cuboid() -> impl Strategy<Value = Mesh> {
    (point(50.0), extents()).prop_map(|(lo, e)| Mesh::cuboid(lo, lo + e))
}

fn rotation() -> impl Strategy<Value = Isometry3<f64>> {
    (point(1.0), 0.0..std::f64::consts::PI, point(5.0)).prop_filter_map("zero axis", |(axis, angle, t)| {
        let axis = axis.coords;
        (axis.norm() > 1e-3).then(|| {
            Isometry3::from_parts(
                Translation3::from(t.coords),
                UnitQuaternion::from_scaled_axis(axis.normalize() * angle),
            )
        })
    })
}

fn scene_spec() -> impl Strategy<Value = SceneSpec> {
    any::<u64>().prop_map(SceneSpec::seeded)
}

fn forest_data() -> LabeledDataset {
    let scenes = generate_scenes(&SceneSpec::seeded(21), 12).unwrap();
    LabeledDataset::from_rows(&feature_rows(&scenes)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ascii_ply_round_trip_is_stable(m in cuboid()) {
        let bytes = encode_ply(&m, Encoding::Ascii);
        let back = parse_ply(&bytes).unwrap();
        prop_assert_eq!(back.triangles(), m.triangles());
        for (p, q) in back.vertices().iter().zip(m.vertices()) {
            prop_assert!((p - q).abs().max() <= 5e-9 * q.coords.abs().max().max(1.0));
        }
        prop_assert_eq!(encode_ply(&back, Encoding::Ascii), bytes);
    }

    #[test]
    fn binary_ply_round_trip_is_exact(m in cuboid(), iso in rotation()) {
        let m = m.transformed(&iso);
        let back = parse_ply(&encode_ply(&m, Encoding::BinaryLittleEndian)).unwrap();
        prop_assert_eq!(back, m);
    }

    #[test]
    fn box_volume_and_area(lo in point(100.0), e in extents()) {
        let m = Mesh::cuboid(lo, lo + e);
        assert_relative_eq!(m.volume(), e.x * e.y * e.z, max_relative = 1e-9);
        assert_relative_eq!(m.surface_area(), 2.0 * (e.x * e.y + e.y * e.z + e.z * e.x), max_relative = 1e-9);
        let b = m.aabb();
        prop_assert_eq!(b.min, lo);
        prop_assert_eq!(b.max, lo + e);
    }

    #[test]
    fn volume_and_area_are_translation_invariant(m in cuboid(), iso in rotation(), shift in point(1000.0)) {
        let m = m.transformed(&iso);
        let moved = m.translated(shift.coords);
        assert_relative_eq!(moved.volume(), m.volume(), max_relative = 1e-9);
        assert_relative_eq!(moved.surface_area(), m.surface_area(), max_relative = 1e-9);
    }

    #[test]
    fn shape_features_ignore_translation(m in cuboid(), shift in point(500.0)) {
        let a = extract_features(&m);
        let b = extract_features(&m.translated(shift.coords));
        prop_assert_eq!(a.as_slice().len(), FEATURE_COUNT);
        for &i in &SHAPE_FEATURES {
            let (x, y) = (a.as_slice()[i], b.as_slice()[i]);
            prop_assert!((x - y).abs() <= 1e-9 * x.abs().max(1.0), "feature {} {} vs {}", i, x, y);
        }
        // The remaining features are box corners and centers and move with the mesh.
        for i in (0..FEATURE_COUNT).filter(|i| !SHAPE_FEATURES.contains(i)) {
            let (x, y) = (a.as_slice()[i], b.as_slice()[i]);
            let d = shift.coords[i % 3];
            prop_assert!((y - x - d).abs() <= 1e-9 * (x.abs() + d.abs()).max(1.0), "feature {}", i);
        }
    }

    #[test]
    fn distance_is_symmetric_and_gap_bounded(a in cuboid(), b in cuboid(), iso in rotation()) {
        let b = b.transformed(&iso);
        let (ab, ba) = (mesh_distance(&a, &b), mesh_distance(&b, &a));
        prop_assert!((ab - ba).abs() <= 1e-12 * ab.max(1.0));
        // Boxes never come closer than their bounding boxes.
        prop_assert!(ab + 1e-9 >= a.aabb().gap(&b.aabb()).norm());
    }

    #[test]
    fn far_apart_boxes_are_unrelated(a in cuboid(), b in cuboid(), gap in 1e-5..1.0) {
        let shift = a.aabb().max.x - b.aabb().min.x + gap;
        let b = b.translated(Vector::new(shift, 0.0, 0.0));
        let records = [ObjectRecord::new("a", a), ObjectRecord::new("b", b)];
        prop_assert!(infer_all(&records, &RelationConfig::default()).unwrap().is_empty());
    }

    #[test]
    fn random_boxes_give_consistent_relations(boxes in prop::collection::vec((point(3.0), extents()), 2..10), seed in any::<u64>()) {
        let records: Vec<_> = boxes
            .iter()
            .enumerate()
            .map(|(i, (lo, e))| ObjectRecord::new(i.to_string(), Mesh::cuboid(*lo, lo + e / 4.0)))
            .collect();
        let cfg = RelationConfig::default();
        let rels = infer_all(&records, &cfg).unwrap();
        check_relation_invariants(&rels).unwrap();
        let mut shuffled = records.clone();
        let k = (seed as usize) % shuffled.len();
        shuffled.rotate_left(k);
        shuffled.reverse();
        prop_assert_eq!(infer_all(&shuffled, &cfg).unwrap(), rels);
    }

    #[test]
    fn attributes_follow_translation(lo in point(20.0), e in extents(), shift in point(100.0)) {
        let m = Mesh::cuboid(lo, lo + e);
        for class in ObjectClass::ALL {
            let a = attributes_for(&m, class).unwrap();
            let b = attributes_for(&m.translated(shift.coords), class).unwrap();
            for (k, v) in a.iter() {
                let w = b.get(k).unwrap();
                prop_assert!((v - w).abs() <= 1e-9 * v.abs().max(1.0), "{} {} vs {}", k, v, w);
            }
            let (p, q) = (a.central_point.unwrap(), b.central_point.unwrap());
            prop_assert!((q - p - shift.coords).abs().max() <= 1e-9 * (p.coords.abs().max() + shift.coords.abs().max()));
        }
    }

    #[test]
    fn box_wall_area_is_length_times_height(lo in point(20.0), e in extents()) {
        let a = attributes_for(&Mesh::cuboid(lo, lo + e), ObjectClass::Wall).unwrap();
        let (l, h) = (a.get(Attribute::Length).unwrap(), a.get(Attribute::Height).unwrap());
        assert_relative_eq!(a.get(Attribute::Area).unwrap(), l * h, max_relative = 1e-9);
        assert_relative_eq!(a.get(Attribute::Volume).unwrap(), e.x * e.y * e.z, max_relative = 1e-9);
    }

    #[test]
    fn tilted_slab_slope(e in extents(), deg in 0.0..60.0f64, iso in rotation()) {
        // Make the slab clearly flat so its top and bottom dominate the area.
        let slab = Mesh::cuboid(Point::origin(), Point::new(e.x + 1.0, e.y + 1.0, 0.01 + e.z / 100.0));
        let tilt = UnitQuaternion::from_axis_angle(&Vector::x_axis(), deg.to_radians());
        let spin = UnitQuaternion::from_axis_angle(&Vector::z_axis(), iso.rotation.angle());
        let m = slab.transformed(&Isometry3::from_parts(iso.translation, spin * tilt));
        let slope = attributes_for(&m, ObjectClass::Floor).unwrap().get(Attribute::Slope).unwrap();
        prop_assert!((slope - deg).abs() <= 1e-6, "{} vs {}", slope, deg);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn generated_scenes_satisfy_their_invariants(spec in scene_spec()) {
        let scene = generate_scene(&spec).unwrap();
        prop_assert_eq!(scene.clone(), generate_scene(&spec).unwrap());
        check_relation_invariants(&scene.truth.relations).unwrap();

        let records: Vec<_> = scene
            .objects
            .iter()
            .map(|o| ObjectRecord::new(o.id.clone(), o.mesh.clone()).with_class(o.class))
            .collect();
        let inferred = infer_all(&records, &RelationConfig::default()).unwrap();
        prop_assert_eq!(&inferred, &scene.truth.relations);

        let by_id = |id: &str| scene.objects.iter().find(|o| o.id == id).unwrap();
        for r in scene.truth.relations.iter().filter(|r| r.predicate.as_str() == "hosting") {
            let (host, guest) = (by_id(&r.subject), by_id(&r.object));
            prop_assert!(host.mesh.aabb().contains(&guest.mesh.aabb(), 1e-9));
            prop_assert!(mesh_distance(&host.mesh, &guest.mesh) <= 1e-9);
        }
        for o in &scene.objects {
            let expected = &scene.truth.attributes[&o.id];
            let got = attributes_for(&o.mesh, o.class).unwrap();
            prop_assert!(got.max_deviation(expected) <= 1e-6);
        }
    }

    #[test]
    fn graph_text_and_plan_are_deterministic(spec in scene_spec()) {
        let scene = generate_scene(&spec).unwrap();
        let mut records: Vec<_> = scene
            .objects
            .iter()
            .map(|o| ObjectRecord::new(o.id.clone(), o.mesh.clone()).with_class(o.class))
            .collect();
        bimgraph::pipeline::attach_attributes(&mut records).unwrap();
        let rels = infer_all(&records, &RelationConfig::default()).unwrap();
        let graph = build_graph(&records, &rels).unwrap();
        let text = serialize_turtle(&graph);
        prop_assert_eq!(&text, &serialize_turtle(&build_graph(&records, &rels).unwrap()));

        let back = parse_turtle(&text).unwrap();
        prop_assert_eq!(back.edges(), graph.edges());
        for (name, node) in graph.nodes() {
            prop_assert!(back.nodes()[name].attributes.max_deviation(&node.attributes) == 0.0);
        }
        let plan = plan_from_graph(&back).unwrap();
        prop_assert_eq!(plan.to_json().unwrap(), plan_from_graph(&graph).unwrap().to_json().unwrap());

        let rebuilt = realize(&plan).unwrap();
        for r in back.edges().iter().filter(|r| r.predicate.as_str() == "hosting") {
            let find = |name: &str| {
                let cmd = plan.commands.iter().find(|c| c.source() == name).unwrap();
                rebuilt.iter().find(|o| o.id == cmd.id()).unwrap()
            };
            prop_assert!(find(&r.subject).mesh.aabb().contains(&find(&r.object).mesh.aabb(), 1e-6));
        }
    }

    #[test]
    fn split_is_a_seeded_partition(seed in any::<u64>()) {
        let data = forest_data();
        let spec = SplitSpec { train: 0.7, valid: 0.1, test: 0.2, seed };
        let (a, b, c) = split(&data, &spec).unwrap();
        prop_assert_eq!(a.len() + b.len() + c.len(), data.len());
        prop_assert_eq!(a.len(), data.len() * 7 / 10);
        let again = split(&data, &spec).unwrap();
        prop_assert_eq!(&a.samples, &again.0.samples);
        prop_assert_eq!(&c.samples, &again.2.samples);
    }

    #[test]
    fn one_tree_forest_without_bagging_is_a_tree(seed in any::<u64>()) {
        let data = forest_data();
        let fp = ForestParams {
            n_trees: 1,
            bootstrap: false,
            features_per_split: FEATURE_COUNT,
            seed,
            ..ForestParams::default()
        };
        let forest = Model::RandomForest(train_forest(&data, &fp).unwrap());
        let tree = Model::DecisionTree(train_tree(&data, &TreeParams::default()).unwrap());
        let mut rng = seed;
        for _ in 0..1000 {
            let values: Vec<f64> = (0..FEATURE_COUNT)
                .map(|_| {
                    rng = rng.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                    ((rng >> 11) as f64 / (1u64 << 53) as f64) * 20.0 - 5.0
                })
                .collect();
            prop_assert_eq!(
                forest.predict_values(&values).unwrap().class,
                tree.predict_values(&values).unwrap().class
            );
        }
    }

    #[test]
    fn shape_only_forest_ignores_scene_offset(seed in any::<u64>(), shift in point(200.0)) {
        let data = forest_data();
        let fp = ForestParams { seed, n_trees: 15, features: FeatureMask::ShapeOnly, ..ForestParams::default() };
        let model = Model::RandomForest(train_forest(&data, &fp).unwrap());
        let scene = generate_scene(&SceneSpec::seeded(seed)).unwrap();
        for o in &scene.objects {
            let a = model.predict(&extract_features(&o.mesh));
            let b = model.predict(&extract_features(&o.mesh.translated(shift.coords)));
            prop_assert_eq!(a.class, b.class);
        }
    }
}
