//! The enriched building graph: typed nodes with attributes, relation edges.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::attributes::AttributeMap;
use crate::error::{Error, Result};
use crate::record::ObjectRecord;
use crate::relations::{check_relation_invariants, Predicate, Relation};
use crate::ObjectClass;

#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    pub class: ObjectClass,
    pub source_id: String,
    pub attributes: AttributeMap,
}

/// `wall_17` for a wall with id `17`.
pub fn node_name(class: ObjectClass, id: &str) -> String {
    format!("{}_{}", class.as_str(), id)
}

/// Inverse of [`node_name`].
pub fn split_node_name(name: &str) -> Option<(ObjectClass, &str)> {
    let (class, id) = name.split_once('_')?;
    let class = class.parse().ok()?;
    (!id.is_empty()).then_some((class, id))
}

/// Nodes ordered by name; edges are relations over node names.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct BimGraph {
    nodes: BTreeMap<String, Node>,
    edges: BTreeSet<Relation>,
}

impl BimGraph {
    pub fn new() -> Self {
        BimGraph::default()
    }

    /// Assemble and validate.
    pub fn from_parts(nodes: BTreeMap<String, Node>, edges: BTreeSet<Relation>) -> Result<Self> {
        let g = BimGraph { nodes, edges };
        g.validate()?;
        Ok(g)
    }

    pub fn nodes(&self) -> &BTreeMap<String, Node> {
        &self.nodes
    }

    pub fn edges(&self) -> &BTreeSet<Relation> {
        &self.edges
    }

    pub fn node(&self, name: &str) -> Result<&Node> {
        self.nodes.get(name).ok_or_else(|| Error::UnknownNode(name.into()))
    }

    pub fn validate(&self) -> Result<()> {
        for (name, node) in &self.nodes {
            if split_node_name(name) != Some((node.class, node.source_id.as_str())) {
                return Err(Error::Integrity(format!(
                    "node name {name} does not match {}",
                    node_name(node.class, &node.source_id)
                )));
            }
        }
        for r in &self.edges {
            for end in [&r.subject, &r.object] {
                if !self.nodes.contains_key(end) {
                    return Err(Error::Integrity(format!(
                        "edge {} {} {} names unknown node {end}",
                        r.subject, r.predicate, r.object
                    )));
                }
            }
        }
        check_relation_invariants(&self.edges)?;
        let mut hosts: BTreeMap<&str, usize> = BTreeMap::new();
        for r in self.edges.iter().filter(|r| r.predicate == Predicate::Hosted) {
            *hosts.entry(&r.subject).or_default() += 1;
        }
        if let Some((node, &count)) = hosts.iter().find(|(_, &c)| c > 1) {
            return Err(Error::HostMultiplicity {
                node: node.to_string(),
                count,
            });
        }
        Ok(())
    }

    fn targets(&self, name: &str, predicate: Predicate) -> Result<Vec<&str>> {
        self.node(name)?;
        let from = Relation::new(name, predicate, "");
        Ok(self
            .edges
            .range(from..)
            .take_while(|r| r.subject == name && r.predicate == predicate)
            .map(|r| r.object.as_str())
            .collect())
    }

    /// Host of a window or door, if it has one.
    pub fn query_host(&self, name: &str) -> Result<Option<&str>> {
        let hosts = self.targets(name, Predicate::Hosted)?;
        match hosts.len() {
            0 | 1 => Ok(hosts.first().copied()),
            count => Err(Error::HostMultiplicity {
                node: name.into(),
                count,
            }),
        }
    }

    /// Neighbours by name, sorted.
    pub fn query_adjacent(&self, name: &str) -> Result<Vec<&str>> {
        self.targets(name, Predicate::AdjacentTo)
    }

    /// Objects hosted by a wall, sorted.
    pub fn query_hosted(&self, name: &str) -> Result<Vec<&str>> {
        self.targets(name, Predicate::Hosting)
    }
}

/// Turn classified records and id-level relations into a graph.
pub fn build_graph(records: &[ObjectRecord], relations: &[Relation]) -> Result<BimGraph> {
    let mut by_id: HashMap<&str, String> = HashMap::new();
    let mut nodes = BTreeMap::new();
    for r in records {
        let class = r.class.ok_or_else(|| Error::MissingAttribute {
            node: r.id.clone(),
            attribute: "class".into(),
        })?;
        let name = node_name(class, &r.id);
        if by_id.insert(&r.id, name.clone()).is_some() {
            return Err(Error::IdCollision(r.id.clone()));
        }
        nodes.insert(
            name,
            Node {
                class,
                source_id: r.id.clone(),
                attributes: r.attributes.clone().unwrap_or_default(),
            },
        );
    }
    let resolve = |id: &str| {
        by_id
            .get(id)
            .cloned()
            .ok_or_else(|| Error::Integrity(format!("relation names unknown object id {id}")))
    };
    let edges = relations
        .iter()
        .map(|r| Ok(Relation::new(resolve(&r.subject)?, r.predicate, resolve(&r.object)?)))
        .collect::<Result<BTreeSet<_>>>()?;
    BimGraph::from_parts(nodes, edges)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{Mesh, Point};

    fn rec(id: &str, class: ObjectClass) -> ObjectRecord {
        ObjectRecord::new(id, Mesh::cuboid(Point::origin(), Point::new(1.0, 1.0, 1.0))).with_class(class)
    }

    fn rel(s: &str, p: Predicate, o: &str) -> Relation {
        Relation::new(s, p, o)
    }

    #[test]
    fn single_wall() {
        let g = build_graph(&[rec("17", ObjectClass::Wall)], &[]).unwrap();
        assert_eq!(g.nodes().keys().collect::<Vec<_>>(), ["wall_17"]);
        assert!(g.edges().is_empty());
        assert_eq!(g.query_host("wall_17").unwrap(), None);
        assert!(g.query_adjacent("wall_17").unwrap().is_empty());
    }

    #[test]
    fn hosted_window() {
        let g = build_graph(
            &[rec("17", ObjectClass::Wall), rec("3", ObjectClass::Window)],
            &[
                rel("17", Predicate::Hosting, "3"),
                rel("3", Predicate::Hosted, "17"),
            ],
        )
        .unwrap();
        assert_eq!(g.edges().len(), 2);
        assert_eq!(g.query_host("window_3").unwrap(), Some("wall_17"));
        assert_eq!(g.query_hosted("wall_17").unwrap(), ["window_3"]);
    }

    #[test]
    fn adjacency_sorted() {
        let ids = ["1", "2", "4"];
        let recs: Vec<_> = ids.iter().map(|i| rec(i, ObjectClass::Wall)).collect();
        let mut rels = Vec::new();
        for o in ["4", "2"] {
            rels.push(rel("1", Predicate::AdjacentTo, o));
            rels.push(rel(o, Predicate::AdjacentTo, "1"));
        }
        let g = build_graph(&recs, &rels).unwrap();
        assert_eq!(g.query_adjacent("wall_1").unwrap(), ["wall_2", "wall_4"]);
    }

    #[test]
    fn errors() {
        let walls = [rec("1", ObjectClass::Wall)];
        assert!(matches!(
            build_graph(&walls, &[rel("1", Predicate::AdjacentTo, "9"), rel("9", Predicate::AdjacentTo, "1")]),
            Err(Error::Integrity(_))
        ));
        let g = build_graph(&walls, &[]).unwrap();
        assert!(matches!(g.query_host("wall_2"), Err(Error::UnknownNode(_))));

        let recs = [
            rec("1", ObjectClass::Wall),
            rec("2", ObjectClass::Wall),
            rec("3", ObjectClass::Window),
        ];
        let rels = [
            rel("1", Predicate::Hosting, "3"),
            rel("3", Predicate::Hosted, "1"),
            rel("2", Predicate::Hosting, "3"),
            rel("3", Predicate::Hosted, "2"),
        ];
        assert!(matches!(
            build_graph(&recs, &rels),
            Err(Error::HostMultiplicity { count: 2, .. })
        ));
    }

    #[test]
    fn names() {
        assert_eq!(node_name(ObjectClass::Door, "scene_1"), "door_scene_1");
        assert_eq!(split_node_name("door_scene_1"), Some((ObjectClass::Door, "scene_1")));
        assert_eq!(split_node_name("beam_1"), None);
        assert_eq!(split_node_name("wall_"), None);
    }
}
