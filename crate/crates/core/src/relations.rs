//! Rule-based `adjacentTo` / `hosting` / `hosted` inference.
//!
//! A pair of objects is examined in three stages:
//!
//! 1. the per-axis bounding-box gaps must sum to (nearly) zero;
//! 2. the exact surface distance must be within the contact tolerance, and
//!    neither mesh may penetrate the other;
//! 3. box containment decides the predicate: the containing object hosts the
//!    contained one, anything else is adjacency.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use log::warn;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mesh::{Aabb, Mesh};
use crate::proximity::{mesh_distance, point_in_mesh, point_mesh_distance};
use crate::record::ObjectRecord;

/// Relation terms of the CBIM vocabulary.
///
/// Declared in lexicographic order of their names, which the derived `Ord`
/// uses for sorting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Predicate {
    #[serde(rename = "adjacentTo")]
    AdjacentTo,
    #[serde(rename = "hosted")]
    Hosted,
    #[serde(rename = "hosting")]
    Hosting,
}

impl Predicate {
    pub fn as_str(self) -> &'static str {
        match self {
            Predicate::AdjacentTo => "adjacentTo",
            Predicate::Hosted => "hosted",
            Predicate::Hosting => "hosting",
        }
    }

    pub fn inverse(self) -> Predicate {
        match self {
            Predicate::AdjacentTo => Predicate::AdjacentTo,
            Predicate::Hosted => Predicate::Hosting,
            Predicate::Hosting => Predicate::Hosted,
        }
    }
}

impl fmt::Display for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Predicate {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "adjacentTo" => Ok(Predicate::AdjacentTo),
            "hosted" => Ok(Predicate::Hosted),
            "hosting" => Ok(Predicate::Hosting),
            other => Err(Error::Integrity(format!("unknown predicate '{other}'"))),
        }
    }
}

/// Directed edge between two objects (by id or by graph node name).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Relation {
    pub subject: String,
    pub predicate: Predicate,
    pub object: String,
}

impl Relation {
    pub fn new(subject: impl Into<String>, predicate: Predicate, object: impl Into<String>) -> Self {
        Relation {
            subject: subject.into(),
            predicate,
            object: object.into(),
        }
    }

    pub fn inverse(&self) -> Relation {
        Relation::new(self.object.clone(), self.predicate.inverse(), self.subject.clone())
    }
}

/// Check the structural invariants of a relation set: no self-relations,
/// every `hosting` has its `hosted` inverse (and vice versa), and
/// `adjacentTo` is symmetric.
pub fn check_relation_invariants<'a>(relations: impl IntoIterator<Item = &'a Relation>) -> Result<()> {
    let set: HashSet<&Relation> = relations.into_iter().collect();
    for r in &set {
        if r.subject == r.object {
            return Err(Error::Integrity(format!("self-relation on {}", r.subject)));
        }
        if !set.contains(&r.inverse()) {
            return Err(Error::Integrity(format!(
                "{} {} {} has no inverse {} edge",
                r.subject,
                r.predicate,
                r.object,
                r.predicate.inverse()
            )));
        }
    }
    Ok(())
}

/// Tolerances, in meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RelationConfig {
    /// Largest bounding-box gap sum still treated as touching.
    pub eps_gap: f64,
    /// Largest surface distance still treated as contact; also the depth a
    /// vertex must sit inside the other mesh to count as penetration.
    pub eps_contact: f64,
    /// Slack on every face for box containment.
    pub eps_contain: f64,
}

impl Default for RelationConfig {
    fn default() -> Self {
        RelationConfig {
            eps_gap: 1e-6,
            eps_contact: 1e-3,
            eps_contain: 1e-3,
        }
    }
}

impl RelationConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("eps_gap", self.eps_gap),
            ("eps_contact", self.eps_contact),
            ("eps_contain", self.eps_contain),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::Dataset(format!("{name} must be a finite value >= 0, got {v}")));
            }
        }
        Ok(())
    }
}

pub fn contains(a: &Aabb, b: &Aabb, eps: f64) -> bool {
    a.contains(b, eps)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Diagnostic {
    /// The meshes touch but one pushes into the other; no relation emitted.
    Penetration { a: String, b: String },
    /// Identical boxes: no host can be chosen, adjacency emitted instead.
    MutualContainment { a: String, b: String },
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Diagnostic::Penetration { a, b } => write!(f, "{a} and {b} interpenetrate; pair skipped"),
            Diagnostic::MutualContainment { a, b } => {
                write!(f, "{a} and {b} contain each other; treated as adjacent")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PairVerdict {
    pub relations: Vec<Relation>,
    pub diagnostic: Option<Diagnostic>,
}

fn penetrates(probe: &Mesh, target: &Mesh, target_box: &Aabb, depth: f64) -> bool {
    probe.vertices().iter().any(|v| {
        (0..3).all(|i| target_box.min[i] + depth < v[i] && v[i] < target_box.max[i] - depth)
            && point_in_mesh(v, target)
            && point_mesh_distance(v, target) > depth
    })
}

pub fn classify_pair(a: &ObjectRecord, b: &ObjectRecord, cfg: &RelationConfig) -> PairVerdict {
    let (ba, bb) = (a.aabb(), b.aabb());
    if ba.gap(bb).sum() > cfg.eps_gap {
        return PairVerdict::default();
    }
    if mesh_distance(&a.mesh, &b.mesh) > cfg.eps_contact {
        return PairVerdict::default();
    }
    if penetrates(&a.mesh, &b.mesh, bb, cfg.eps_contact) || penetrates(&b.mesh, &a.mesh, ba, cfg.eps_contact) {
        let d = Diagnostic::Penetration {
            a: a.id.clone(),
            b: b.id.clone(),
        };
        warn!("{d}");
        return PairVerdict {
            relations: Vec::new(),
            diagnostic: Some(d),
        };
    }
    let a_holds_b = contains(ba, bb, cfg.eps_contain);
    let b_holds_a = contains(bb, ba, cfg.eps_contain);
    let hosting = |host: &ObjectRecord, guest: &ObjectRecord| PairVerdict {
        relations: vec![
            Relation::new(host.id.clone(), Predicate::Hosting, guest.id.clone()),
            Relation::new(guest.id.clone(), Predicate::Hosted, host.id.clone()),
        ],
        diagnostic: None,
    };
    match (a_holds_b, b_holds_a) {
        (true, false) => hosting(a, b),
        (false, true) => hosting(b, a),
        (mutual, _) => {
            let diagnostic = mutual.then(|| Diagnostic::MutualContainment {
                a: a.id.clone(),
                b: b.id.clone(),
            });
            if let Some(d) = &diagnostic {
                warn!("{d}");
            }
            PairVerdict {
                relations: vec![
                    Relation::new(a.id.clone(), Predicate::AdjacentTo, b.id.clone()),
                    Relation::new(b.id.clone(), Predicate::AdjacentTo, a.id.clone()),
                ],
                diagnostic,
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Inference {
    /// Sorted by (subject, predicate, object).
    pub relations: Vec<Relation>,
    pub diagnostics: Vec<Diagnostic>,
}

/// Classify every unordered pair. Pairs are processed in parallel and the
/// result is sorted, so it does not depend on input order.
pub fn infer_all_detailed(objects: &[ObjectRecord], cfg: &RelationConfig) -> Result<Inference> {
    cfg.validate()?;
    let mut seen = HashSet::new();
    for o in objects {
        if !seen.insert(o.id.as_str()) {
            return Err(Error::IdCollision(o.id.clone()));
        }
    }
    let n = objects.len();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let verdicts: Vec<PairVerdict> = pairs
        .par_iter()
        .map(|&(i, j)| classify_pair(&objects[i], &objects[j], cfg))
        .collect();
    let mut relations: Vec<Relation> = verdicts.iter().flat_map(|v| v.relations.iter().cloned()).collect();
    relations.sort();
    relations.dedup();
    let mut diagnostics: Vec<Diagnostic> = verdicts.into_iter().filter_map(|v| v.diagnostic).collect();
    diagnostics.sort_by_key(|d| d.to_string());
    Ok(Inference {
        relations,
        diagnostics,
    })
}

pub fn infer_all(objects: &[ObjectRecord], cfg: &RelationConfig) -> Result<Vec<Relation>> {
    infer_all_detailed(objects, cfg).map(|inf| inf.relations)
}

pub fn write_relations_csv<W: Write>(relations: &[Relation], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["subject", "predicate", "object"])?;
    for r in relations {
        w.write_record([r.subject.as_str(), r.predicate.as_str(), r.object.as_str()])?;
    }
    w.flush().map_err(|e| Error::Dataset(e.to_string()))?;
    Ok(())
}

pub fn read_relations_csv<R: Read>(input: R) -> Result<Vec<Relation>> {
    let mut r = csv::Reader::from_reader(input);
    let mut out = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let field = |k: usize| rec.get(k).unwrap_or("").to_owned();
        out.push(Relation::new(field(0), field(1).parse()?, field(2)));
    }
    Ok(out)
}

/// Agreement between an inferred and a reference relation set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RelationScore {
    /// Unordered object pairs considered.
    pub pairs: usize,
    /// Pairs whose set of predicates (in both directions) matches.
    pub pairs_correct: usize,
    pub true_positives: usize,
    pub false_positives: usize,
    pub false_negatives: usize,
}

impl RelationScore {
    pub fn accuracy(&self) -> f64 {
        if self.pairs == 0 {
            1.0
        } else {
            self.pairs_correct as f64 / self.pairs as f64
        }
    }

    /// Micro-averaged F1 over directed relation triples.
    pub fn f1(&self) -> f64 {
        let denom = 2 * self.true_positives + self.false_positives + self.false_negatives;
        if denom == 0 {
            1.0
        } else {
            2.0 * self.true_positives as f64 / denom as f64
        }
    }

    pub fn exact(&self) -> bool {
        self.false_positives == 0 && self.false_negatives == 0
    }

    pub fn merge(&self, other: &RelationScore) -> RelationScore {
        RelationScore {
            pairs: self.pairs + other.pairs,
            pairs_correct: self.pairs_correct + other.pairs_correct,
            true_positives: self.true_positives + other.true_positives,
            false_positives: self.false_positives + other.false_positives,
            false_negatives: self.false_negatives + other.false_negatives,
        }
    }
}

pub fn score_relations(ids: &[String], predicted: &[Relation], truth: &[Relation]) -> RelationScore {
    let p: BTreeSet<&Relation> = predicted.iter().collect();
    let t: BTreeSet<&Relation> = truth.iter().collect();
    let tp = p.intersection(&t).count();

    let label = |set: &BTreeSet<&Relation>| {
        let mut m: BTreeMap<(String, String), BTreeSet<(bool, Predicate)>> = BTreeMap::new();
        for r in set {
            let forward = r.subject <= r.object;
            let key = if forward {
                (r.subject.clone(), r.object.clone())
            } else {
                (r.object.clone(), r.subject.clone())
            };
            m.entry(key).or_default().insert((forward, r.predicate));
        }
        m
    };
    let (lp, lt) = (label(&p), label(&t));
    let n = ids.len();
    let pairs = n * n.saturating_sub(1) / 2;
    let keys: BTreeSet<&(String, String)> = lp.keys().chain(lt.keys()).collect();
    let wrong = keys.iter().filter(|k| lp.get(**k) != lt.get(**k)).count();
    RelationScore {
        pairs,
        pairs_correct: pairs.saturating_sub(wrong),
        true_positives: tp,
        false_positives: p.len() - tp,
        false_negatives: t.len() - tp,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::Point;
    use crate::solid::{wall_with_openings, HorizontalAxis, Opening};

    fn cuboid(id: &str, min: [f64; 3], max: [f64; 3]) -> ObjectRecord {
        ObjectRecord::new(id, Mesh::cuboid(Point::from(min), Point::from(max)))
    }

    #[test]
    fn wall_hosts_fitted_window() {
        let opening = Opening {
            u_min: 1.4,
            u_max: 2.6,
            z_min: 0.8,
            z_max: 2.2,
        };
        let wall_box = Aabb::new(Point::origin(), Point::new(4.0, 0.2, 3.0)).unwrap();
        let wall = ObjectRecord::new(
            "w",
            wall_with_openings(&wall_box, HorizontalAxis::X, &[opening]).unwrap(),
        );
        let window = cuboid("win", [1.4, 0.05, 0.8], [2.6, 0.15, 2.2]);
        let v = classify_pair(&wall, &window, &RelationConfig::default());
        assert_eq!(
            v.relations,
            vec![
                Relation::new("w", Predicate::Hosting, "win"),
                Relation::new("win", Predicate::Hosted, "w"),
            ]
        );
        assert!(v.diagnostic.is_none());
        let swapped = classify_pair(&window, &wall, &RelationConfig::default());
        assert_eq!(swapped.relations, v.relations);
    }

    #[test]
    fn corner_walls_are_adjacent() {
        let a = cuboid("a", [0.0, 0.0, 0.0], [4.0, 0.2, 3.0]);
        let b = cuboid("b", [0.0, 0.2, 0.0], [0.2, 3.0, 3.0]);
        let v = classify_pair(&a, &b, &RelationConfig::default());
        assert_eq!(
            v.relations,
            vec![
                Relation::new("a", Predicate::AdjacentTo, "b"),
                Relation::new("b", Predicate::AdjacentTo, "a"),
            ]
        );
    }

    #[test]
    fn distant_objects_are_unrelated() {
        let wall = cuboid("w", [0.0, 0.0, 0.0], [4.0, 0.2, 3.0]);
        let floor = cuboid("f", [0.0, 0.0, -2.25], [4.0, 4.0, -2.0]);
        assert!(classify_pair(&wall, &floor, &RelationConfig::default()).relations.is_empty());
    }

    #[test]
    fn box_gap_passes_but_surfaces_do_not_touch() {
        // the boxes touch at a corner edge, the triangle is cut off diagonally
        let a = cuboid("a", [0.0, 0.0, 0.0], [1.0, 1.0, 1.0]);
        let tilted = ObjectRecord::new(
            "t",
            Mesh::new(
                vec![
                    Point::new(1.0, 1.3, 0.5),
                    Point::new(1.3, 1.0, 0.5),
                    Point::new(1.3, 1.3, 0.6),
                ],
                vec![[0, 1, 2]],
            )
            .unwrap(),
        );
        assert_eq!(a.aabb().gap(tilted.aabb()).sum(), 0.0);
        let v = classify_pair(&a, &tilted, &RelationConfig::default());
        assert!(v.relations.is_empty(), "{v:?}");
    }

    #[test]
    fn interpenetration_is_skipped() {
        let a = cuboid("a", [0.0, 0.0, 0.0], [1.0, 1.0, 1.0]);
        let b = cuboid("b", [0.5, 0.5, 0.5], [1.5, 1.5, 1.5]);
        let v = classify_pair(&a, &b, &RelationConfig::default());
        assert!(v.relations.is_empty());
        assert!(matches!(v.diagnostic, Some(Diagnostic::Penetration { .. })));
    }

    #[test]
    fn identical_boxes_resolve_to_adjacency() {
        let a = cuboid("a", [0.0, 0.0, 0.0], [1.0, 1.0, 1.0]);
        let b = cuboid("b", [0.0, 0.0, 0.0], [1.0, 1.0, 1.0]);
        assert!(contains(a.aabb(), b.aabb(), 1e-3) && contains(b.aabb(), a.aabb(), 1e-3));
        let v = classify_pair(&a, &b, &RelationConfig::default());
        assert_eq!(v.relations.len(), 2);
        assert!(v.relations.iter().all(|r| r.predicate == Predicate::AdjacentTo));
        assert!(matches!(v.diagnostic, Some(Diagnostic::MutualContainment { .. })));
    }

    #[test]
    fn infer_all_edge_cases() {
        let one = vec![cuboid("a", [0.0; 3], [1.0; 3])];
        assert!(infer_all(&one, &RelationConfig::default()).unwrap().is_empty());
        let dup = vec![cuboid("a", [0.0; 3], [1.0; 3]), cuboid("a", [2.0; 3], [3.0; 3])];
        assert!(matches!(
            infer_all(&dup, &RelationConfig::default()),
            Err(Error::IdCollision(id)) if id == "a"
        ));
        let bad = RelationConfig {
            eps_gap: -1.0,
            ..RelationConfig::default()
        };
        assert!(infer_all(&one, &bad).is_err());
    }

    #[test]
    fn invariant_checker() {
        let ok = [
            Relation::new("a", Predicate::Hosting, "b"),
            Relation::new("b", Predicate::Hosted, "a"),
        ];
        assert!(check_relation_invariants(&ok).is_ok());
        assert!(check_relation_invariants(&ok[..1]).is_err());
        let selfie = [Relation::new("a", Predicate::AdjacentTo, "a")];
        assert!(check_relation_invariants(&selfie).is_err());
    }

    #[test]
    fn csv_dump() {
        let rels = vec![
            Relation::new("1", Predicate::AdjacentTo, "2"),
            Relation::new("2", Predicate::AdjacentTo, "1"),
        ];
        let mut buf = Vec::new();
        write_relations_csv(&rels, &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf.clone()).unwrap(),
            "subject,predicate,object\n1,adjacentTo,2\n2,adjacentTo,1\n"
        );
        assert_eq!(read_relations_csv(buf.as_slice()).unwrap(), rels);
    }

    #[test]
    fn scoring() {
        let ids: Vec<String> = ["1", "2", "3"].iter().map(|s| s.to_string()).collect();
        let truth = vec![
            Relation::new("1", Predicate::AdjacentTo, "2"),
            Relation::new("2", Predicate::AdjacentTo, "1"),
        ];
        let s = score_relations(&ids, &truth, &truth);
        assert_eq!((s.pairs, s.accuracy(), s.f1(), s.exact()), (3, 1.0, 1.0, true));
        let wrong = vec![
            Relation::new("1", Predicate::Hosting, "2"),
            Relation::new("2", Predicate::Hosted, "1"),
        ];
        let s = score_relations(&ids, &wrong, &truth);
        assert_eq!(s.pairs_correct, 2);
        assert_eq!(s.f1(), 0.0);
    }
}
