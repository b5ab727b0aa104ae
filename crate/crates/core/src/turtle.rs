//! Turtle subset for [`BimGraph`].
//!
//! The writer emits a fixed prefix block, then one block per node in name
//! order: a `;`-continued statement with the class and the attribute
//! literals, followed by one triple per outgoing edge.
//!
//! ```text
//! @prefix cbim: <https://w3id.org/cbim#> .
//! @prefix inst: <https://example.org/bimgraph/inst/> .
//! @prefix attr: <https://example.org/bimgraph/attr#> .
//!
//! inst:wall_17 a cbim:Wall ;
//!     attr:area "12" ;
//!     attr:centralPoint "2 0.1 1.5" ;
//!     attr:height "3" .
//! inst:wall_17 cbim:hosting inst:window_3 .
//! ```
//!
//! Numbers are plain string literals with 9 significant digits, widened to
//! the shortest exact form when 9 digits would not read back unchanged. The
//! reader
//! accepts any statement layout (`;` and `,` continuation, `#` comments,
//! arbitrary prefix names) as long as the terms resolve to these three
//! namespaces.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write;

use crate::attributes::{Attribute, AttributeMap};
use crate::error::{Error, Result};
use crate::graph::{split_node_name, BimGraph, Node};
use crate::mesh::Point;
use crate::numfmt::sig9_exact;
use crate::relations::{Predicate, Relation};
use crate::ObjectClass;

pub const CBIM_NS: &str = "https://w3id.org/cbim#";
pub const INST_NS: &str = "https://example.org/bimgraph/inst/";
pub const ATTR_NS: &str = "https://example.org/bimgraph/attr#";

const CENTRAL_POINT: &str = "centralPoint";
const APPROXIMATE: &str = "approximateOrientation";

pub fn serialize_turtle(graph: &BimGraph) -> String {
    let mut out = String::new();
    for (p, ns) in [("cbim", CBIM_NS), ("inst", INST_NS), ("attr", ATTR_NS)] {
        let _ = writeln!(out, "@prefix {p}: <{ns}> .");
    }
    for (name, node) in graph.nodes() {
        let mut lines = vec![format!("inst:{name} a cbim:{}", node.class.iri_local())];
        let mut attrs: Vec<(String, String)> = node
            .attributes
            .iter()
            .map(|(a, v)| (a.as_str().to_owned(), sig9_exact(v)))
            .collect();
        if let Some(p) = node.attributes.central_point {
            attrs.push((CENTRAL_POINT.into(), format!("{} {} {}", sig9_exact(p.x), sig9_exact(p.y), sig9_exact(p.z))));
        }
        if node.attributes.approximate_orientation {
            attrs.push((APPROXIMATE.into(), "true".into()));
        }
        attrs.sort();
        lines.extend(attrs.into_iter().map(|(k, v)| format!("    attr:{k} \"{v}\"")));
        out.push('\n');
        out.push_str(&lines.join(" ;\n"));
        out.push_str(" .\n");
        let from = Relation::new(name.as_str(), Predicate::AdjacentTo, "");
        for r in graph.edges().range(from..).take_while(|r| &r.subject == name) {
            let _ = writeln!(out, "inst:{} cbim:{} inst:{} .", r.subject, r.predicate, r.object);
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Prefix,
    Iri(String),
    Name(String, String),
    Literal(String),
    A,
    Semi,
    Comma,
    Dot,
}

fn perr(line: usize, message: impl Into<String>) -> Error {
    Error::Turtle {
        line,
        message: message.into(),
    }
}

fn tokenize(text: &str) -> Result<Vec<(Tok, usize)>> {
    let mut toks = Vec::new();
    let mut chars = text.chars().peekable();
    let mut line = 1;
    while let Some(&c) = chars.peek() {
        match c {
            '\n' => {
                line += 1;
                chars.next();
            }
            c if c.is_whitespace() => {
                chars.next();
            }
            '#' => {
                while chars.peek().is_some_and(|&c| c != '\n') {
                    chars.next();
                }
            }
            ';' | ',' | '.' => {
                chars.next();
                toks.push((
                    match c {
                        ';' => Tok::Semi,
                        ',' => Tok::Comma,
                        _ => Tok::Dot,
                    },
                    line,
                ));
            }
            '<' => {
                chars.next();
                let mut iri = String::new();
                loop {
                    match chars.next() {
                        Some('>') => break,
                        Some('\n') | None => return Err(perr(line, "unterminated IRI")),
                        Some(c) => iri.push(c),
                    }
                }
                toks.push((Tok::Iri(iri), line));
            }
            '"' => {
                chars.next();
                let mut lit = String::new();
                loop {
                    match chars.next() {
                        Some('"') => break,
                        Some('\\') => match chars.next() {
                            Some(e @ ('"' | '\\')) => lit.push(e),
                            _ => return Err(perr(line, "unsupported escape in literal")),
                        },
                        Some('\n') | None => return Err(perr(line, "unterminated literal")),
                        Some(c) => lit.push(c),
                    }
                }
                toks.push((Tok::Literal(lit), line));
            }
            _ => {
                let mut word = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_whitespace() || matches!(c, ';' | ',' | '"' | '<' | '#') {
                        break;
                    }
                    // a dot ends the word unless a name character follows
                    if c == '.' {
                        let mut ahead = chars.clone();
                        ahead.next();
                        if !ahead.peek().is_some_and(|n| n.is_alphanumeric() || *n == '_') {
                            break;
                        }
                    }
                    word.push(c);
                    chars.next();
                }
                let tok = match word.as_str() {
                    "@prefix" => Tok::Prefix,
                    "a" => Tok::A,
                    _ => match word.split_once(':') {
                        Some((p, l)) => Tok::Name(p.into(), l.into()),
                        None => return Err(perr(line, format!("unexpected token '{word}'"))),
                    },
                };
                toks.push((tok, line));
            }
        }
    }
    Ok(toks)
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Ns {
    Cbim,
    Inst,
    Attr,
}

#[derive(Default)]
struct Draft {
    class: Option<ObjectClass>,
    attributes: AttributeMap,
    line: usize,
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    prefixes: BTreeMap<String, Ns>,
    drafts: BTreeMap<String, Draft>,
    edges: BTreeSet<Relation>,
}

impl Parser {
    fn line(&self) -> usize {
        self.toks
            .get(self.pos)
            .or(self.toks.last())
            .map_or(1, |t| t.1)
    }

    fn next(&mut self) -> Result<(Tok, usize)> {
        let t = self
            .toks
            .get(self.pos)
            .cloned()
            .ok_or_else(|| perr(self.line(), "unexpected end of input"))?;
        self.pos += 1;
        Ok(t)
    }

    fn expect(&mut self, want: Tok) -> Result<()> {
        let (t, line) = self.next()?;
        if t != want {
            return Err(perr(line, format!("expected {want:?}, found {t:?}")));
        }
        Ok(())
    }

    fn resolve(&self, tok: &Tok, line: usize) -> Result<(Ns, String)> {
        match tok {
            Tok::Name(p, local) => {
                let ns = self
                    .prefixes
                    .get(p)
                    .ok_or_else(|| perr(line, format!("unknown prefix '{p}:'")))?;
                Ok((*ns, local.clone()))
            }
            Tok::Iri(iri) => [(CBIM_NS, Ns::Cbim), (INST_NS, Ns::Inst), (ATTR_NS, Ns::Attr)]
                .into_iter()
                .find_map(|(base, ns)| iri.strip_prefix(base).map(|l| (ns, l.to_owned())))
                .ok_or_else(|| perr(line, format!("IRI <{iri}> is outside the known namespaces"))),
            other => Err(perr(line, format!("expected a name, found {other:?}"))),
        }
    }

    fn run(&mut self) -> Result<()> {
        while self.pos < self.toks.len() {
            let (t, line) = self.next()?;
            if t == Tok::Prefix {
                self.prefix_decl(line)?;
            } else {
                self.statement(t, line)?;
            }
        }
        Ok(())
    }

    fn prefix_decl(&mut self, line: usize) -> Result<()> {
        let (name, line) = match self.next()? {
            (Tok::Name(p, l), line) if l.is_empty() => (p, line),
            (t, _) => return Err(perr(line, format!("bad prefix name {t:?}"))),
        };
        let iri = match self.next()? {
            (Tok::Iri(i), _) => i,
            (t, l) => return Err(perr(l, format!("expected prefix IRI, found {t:?}"))),
        };
        let ns = match iri.as_str() {
            CBIM_NS => Ns::Cbim,
            INST_NS => Ns::Inst,
            ATTR_NS => Ns::Attr,
            _ => return Err(perr(line, format!("prefix '{name}:' maps to unsupported namespace <{iri}>"))),
        };
        self.prefixes.insert(name, ns);
        self.expect(Tok::Dot)
    }

    fn subject(&self, tok: &Tok, line: usize) -> Result<String> {
        match self.resolve(tok, line)? {
            (Ns::Inst, local) if split_node_name(&local).is_some() => Ok(local),
            (Ns::Inst, local) => Err(perr(line, format!("instance name '{local}' is not <class>_<id>"))),
            _ => Err(perr(line, "subjects and relation objects must be inst: names")),
        }
    }

    fn statement(&mut self, first: Tok, line: usize) -> Result<()> {
        let subject = self.subject(&first, line)?;
        self.drafts.entry(subject.clone()).or_default();
        loop {
            let (pred, pline) = self.next()?;
            loop {
                let (obj, oline) = self.next()?;
                self.triple(&subject, &pred, pline, &obj, oline)?;
                let (sep, sline) = self.next()?;
                match sep {
                    Tok::Comma => continue,
                    Tok::Semi => break,
                    Tok::Dot => return Ok(()),
                    t => return Err(perr(sline, format!("expected ',', ';' or '.', found {t:?}"))),
                }
            }
        }
    }

    fn triple(&mut self, subject: &str, pred: &Tok, pline: usize, obj: &Tok, oline: usize) -> Result<()> {
        if *pred == Tok::A {
            let class = match self.resolve(obj, oline)? {
                (Ns::Cbim, local) => ObjectClass::from_iri_local(&local)
                    .ok_or_else(|| perr(oline, format!("unknown class cbim:{local}")))?,
                _ => return Err(perr(oline, "class must be a cbim: term")),
            };
            let d = self.drafts.get_mut(subject).expect("subject registered");
            if d.class.is_some_and(|c| c != class) {
                return Err(perr(oline, format!("{subject} has two classes")));
            }
            d.class = Some(class);
            d.line = pline;
            return Ok(());
        }
        match self.resolve(pred, pline)? {
            (Ns::Attr, key) => {
                let Tok::Literal(lit) = obj else {
                    return Err(perr(oline, "attribute value must be a string literal"));
                };
                let number = |s: &str| {
                    s.parse::<f64>()
                        .ok()
                        .filter(|v| v.is_finite())
                        .ok_or_else(|| perr(oline, format!("'{s}' is not a finite number")))
                };
                let attrs = &mut self.drafts.get_mut(subject).expect("subject registered").attributes;
                match key.as_str() {
                    CENTRAL_POINT => {
                        let xyz = lit.split_whitespace().map(number).collect::<Result<Vec<f64>>>()?;
                        if xyz.len() != 3 {
                            return Err(perr(oline, "central point needs three coordinates"));
                        }
                        attrs.central_point = Some(Point::new(xyz[0], xyz[1], xyz[2]));
                    }
                    APPROXIMATE => {
                        attrs.approximate_orientation = lit
                            .parse()
                            .map_err(|_| perr(oline, format!("'{lit}' is not a boolean")))?;
                    }
                    other => {
                        let a: Attribute = other
                            .parse()
                            .map_err(|_| perr(pline, format!("unknown attribute attr:{other}")))?;
                        attrs.set(a, number(lit)?);
                    }
                }
            }
            (Ns::Cbim, rel) => {
                let predicate: Predicate = rel
                    .parse()
                    .map_err(|_| perr(pline, format!("unknown relation cbim:{rel}")))?;
                let object = self.subject(obj, oline)?;
                self.edges.insert(Relation::new(subject, predicate, object));
            }
            (Ns::Inst, _) => return Err(perr(pline, "inst: names cannot be predicates")),
        }
        Ok(())
    }
}

pub fn parse_turtle(text: &str) -> Result<BimGraph> {
    let mut p = Parser {
        toks: tokenize(text)?,
        pos: 0,
        prefixes: BTreeMap::new(),
        drafts: BTreeMap::new(),
        edges: BTreeSet::new(),
    };
    p.run()?;
    let mut nodes = BTreeMap::new();
    for (name, d) in p.drafts {
        let Some(class) = d.class else {
            return Err(Error::Integrity(format!("{name} has no class (missing 'a cbim:...')")));
        };
        let (name_class, id) = split_node_name(&name).expect("checked while parsing");
        if name_class != class {
            return Err(perr(d.line, format!("{name} is declared as cbim:{}", class.iri_local())));
        }
        nodes.insert(
            name.clone(),
            Node {
                class,
                source_id: id.to_owned(),
                attributes: d.attributes,
            },
        );
    }
    BimGraph::from_parts(nodes, p.edges)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::attributes::attributes_for;
    use crate::graph::build_graph;
    use crate::mesh::Mesh;
    use crate::record::ObjectRecord;

    fn wall_window() -> BimGraph {
        let wall_mesh = Mesh::cuboid(Point::origin(), Point::new(4.0, 0.2, 3.0));
        let win_mesh = Mesh::cuboid(Point::new(1.0, 0.05, 0.8), Point::new(2.2, 0.15, 2.2));
        let mut wall = ObjectRecord::new("17", wall_mesh).with_class(ObjectClass::Wall);
        wall.attributes = Some(attributes_for(&wall.mesh, ObjectClass::Wall).unwrap());
        let mut win = ObjectRecord::new("3", win_mesh).with_class(ObjectClass::Window);
        win.attributes = Some(attributes_for(&win.mesh, ObjectClass::Window).unwrap());
        build_graph(
            &[wall, win],
            &[
                Relation::new("17", Predicate::Hosting, "3"),
                Relation::new("3", Predicate::Hosted, "17"),
            ],
        )
        .unwrap()
    }

    #[test]
    fn layout() {
        let ttl = serialize_turtle(&wall_window());
        assert_eq!(ttl.matches("a cbim:Wall").count(), 1);
        assert!(ttl.contains("inst:wall_17 a cbim:Wall ;\n    attr:area \"12\" ;"));
        assert!(ttl.contains("attr:centralPoint \"2 0.1 1.5\""));
        assert!(ttl.contains("inst:wall_17 cbim:hosting inst:window_3 .\n"));
        assert!(ttl.contains("inst:window_3 cbim:hosted inst:wall_17 .\n"));
    }

    #[test]
    fn round_trip() {
        let g = wall_window();
        let back = parse_turtle(&serialize_turtle(&g)).unwrap();
        assert_eq!(back.edges(), g.edges());
        assert_eq!(back.nodes().len(), 2);
        let d = back.nodes()["wall_17"].attributes.max_deviation(&g.nodes()["wall_17"].attributes);
        assert!(d < 1e-9, "{d}");
        assert_eq!(serialize_turtle(&back), serialize_turtle(&g));
    }

    #[test]
    fn prefixes_only() {
        let text = format!("@prefix cbim: <{CBIM_NS}> .\n@prefix inst: <{INST_NS}> .\n");
        assert!(parse_turtle(&text).unwrap().nodes().is_empty());
        assert!(parse_turtle("").unwrap().nodes().is_empty());
    }

    #[test]
    fn unknown_prefix_reports_line() {
        let text = format!("@prefix inst: <{INST_NS}> .\n\ninst:wall_1 a foo:Wall .\n");
        match parse_turtle(&text) {
            Err(Error::Turtle { line, message }) => {
                assert_eq!(line, 3);
                assert!(message.contains("foo"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn missing_inverse_is_integrity_error() {
        let text = format!(
            "@prefix cbim: <{CBIM_NS}> .\n@prefix inst: <{INST_NS}> .\n\
             inst:wall_1 a cbim:Wall .\ninst:window_2 a cbim:Window .\n\
             inst:wall_1 cbim:hosting inst:window_2 .\n"
        );
        assert!(matches!(parse_turtle(&text), Err(Error::Integrity(_))));
    }

    #[test]
    fn alternative_layout() {
        let text = format!(
            "@prefix c: <{CBIM_NS}> . @prefix i: <{INST_NS}> . # comment\n\
             i:wall_1 a c:Wall ; c:adjacentTo i:wall_2 , i:wall_3 .\n\
             i:wall_2 a c:Wall ; c:adjacentTo i:wall_1 .\n\
             <{INST_NS}wall_3> a c:Wall ; c:adjacentTo i:wall_1 .\n"
        );
        let g = parse_turtle(&text).unwrap();
        assert_eq!(g.query_adjacent("wall_1").unwrap(), ["wall_2", "wall_3"]);
    }
}
