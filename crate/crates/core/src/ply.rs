//! Reading and writing the PLY subset emitted by BIM geometry exporters.
//!
//! Supported: `ascii` and `binary_little_endian` encodings, vertex `x`/`y`/`z`
//! of any scalar type, and a face list property named `vertex_indices` or
//! `vertex_index`. Other elements and properties are parsed and skipped.
//! Polygon faces are fan-triangulated from their first vertex.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::mesh::{Mesh, Point};
use crate::numfmt::sig9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Encoding {
    Ascii,
    BinaryLittleEndian,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Scalar {
    I8,
    U8,
    I16,
    U16,
    I32,
    U32,
    F32,
    F64,
}

impl Scalar {
    fn parse(name: &str) -> Result<Self> {
        Ok(match name {
            "char" | "int8" => Scalar::I8,
            "uchar" | "uint8" => Scalar::U8,
            "short" | "int16" => Scalar::I16,
            "ushort" | "uint16" => Scalar::U16,
            "int" | "int32" => Scalar::I32,
            "uint" | "uint32" => Scalar::U32,
            "float" | "float32" => Scalar::F32,
            "double" | "float64" => Scalar::F64,
            other => return Err(Error::Format(format!("unknown scalar type '{other}'"))),
        })
    }

    fn size(self) -> usize {
        match self {
            Scalar::I8 | Scalar::U8 => 1,
            Scalar::I16 | Scalar::U16 => 2,
            Scalar::I32 | Scalar::U32 | Scalar::F32 => 4,
            Scalar::F64 => 8,
        }
    }
}

#[derive(Debug, Clone)]
enum Property {
    Scalar { name: String, ty: Scalar },
    List { name: String, count: Scalar, item: Scalar },
}

impl Property {
    fn name(&self) -> &str {
        match self {
            Property::Scalar { name, .. } | Property::List { name, .. } => name,
        }
    }
}

#[derive(Debug, Clone)]
struct Element {
    name: String,
    count: usize,
    properties: Vec<Property>,
}

#[derive(Debug)]
struct Header {
    encoding: Encoding,
    elements: Vec<Element>,
    body_offset: usize,
}

fn parse_header(bytes: &[u8]) -> Result<Header> {
    let mut offset = 0;
    let mut lines = Vec::new();
    loop {
        let rest = &bytes[offset..];
        let Some(nl) = rest.iter().position(|&b| b == b'\n') else {
            return Err(Error::Format("header is missing 'end_header'".into()));
        };
        let line = std::str::from_utf8(&rest[..nl])
            .map_err(|_| Error::Format("header is not ASCII text".into()))?
            .trim_end_matches('\r')
            .trim();
        offset += nl + 1;
        if line == "end_header" {
            break;
        }
        lines.push(line.to_owned());
    }

    let mut iter = lines.iter();
    if iter.next().map(String::as_str) != Some("ply") {
        return Err(Error::Format("file does not start with 'ply'".into()));
    }
    let mut encoding = None;
    let mut elements: Vec<Element> = Vec::new();
    for line in iter {
        let words: Vec<&str> = line.split_whitespace().collect();
        match words.as_slice() {
            [] => {}
            ["comment", ..] | ["obj_info", ..] => {}
            ["format", fmt, _version] => {
                encoding = Some(match *fmt {
                    "ascii" => Encoding::Ascii,
                    "binary_little_endian" => Encoding::BinaryLittleEndian,
                    other => {
                        return Err(Error::Format(format!("unsupported encoding '{other}'")))
                    }
                });
            }
            ["element", name, count] => {
                let count = count
                    .parse()
                    .map_err(|_| Error::Format(format!("bad element count in '{line}'")))?;
                elements.push(Element {
                    name: (*name).to_owned(),
                    count,
                    properties: Vec::new(),
                });
            }
            ["property", "list", count, item, name] => {
                let el = elements
                    .last_mut()
                    .ok_or_else(|| Error::Format("property before any element".into()))?;
                el.properties.push(Property::List {
                    name: (*name).to_owned(),
                    count: Scalar::parse(count)?,
                    item: Scalar::parse(item)?,
                });
            }
            ["property", ty, name] => {
                let el = elements
                    .last_mut()
                    .ok_or_else(|| Error::Format("property before any element".into()))?;
                el.properties.push(Property::Scalar {
                    name: (*name).to_owned(),
                    ty: Scalar::parse(ty)?,
                });
            }
            _ => return Err(Error::Format(format!("unrecognized header line '{line}'"))),
        }
    }
    let encoding = encoding.ok_or_else(|| Error::Format("missing 'format' line".into()))?;
    Ok(Header {
        encoding,
        elements,
        body_offset: offset,
    })
}

/// Source of scalar values for the body, independent of encoding.
trait Values {
    fn next(&mut self, ty: Scalar) -> Result<f64>;
}

struct AsciiValues<'a> {
    tokens: std::str::SplitAsciiWhitespace<'a>,
}

impl Values for AsciiValues<'_> {
    fn next(&mut self, _ty: Scalar) -> Result<f64> {
        let tok = self
            .tokens
            .next()
            .ok_or_else(|| Error::Format("unexpected end of ASCII body".into()))?;
        tok.parse()
            .map_err(|_| Error::Format(format!("bad number '{tok}'")))
    }
}

struct BinaryValues<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Values for BinaryValues<'_> {
    fn next(&mut self, ty: Scalar) -> Result<f64> {
        let n = ty.size();
        let end = self.pos + n;
        let b = self
            .bytes
            .get(self.pos..end)
            .ok_or_else(|| Error::Format("unexpected end of binary body".into()))?;
        self.pos = end;
        Ok(match ty {
            Scalar::I8 => b[0] as i8 as f64,
            Scalar::U8 => b[0] as f64,
            Scalar::I16 => i16::from_le_bytes([b[0], b[1]]) as f64,
            Scalar::U16 => u16::from_le_bytes([b[0], b[1]]) as f64,
            Scalar::I32 => i32::from_le_bytes(b.try_into().unwrap()) as f64,
            Scalar::U32 => u32::from_le_bytes(b.try_into().unwrap()) as f64,
            Scalar::F32 => f32::from_le_bytes(b.try_into().unwrap()) as f64,
            Scalar::F64 => f64::from_le_bytes(b.try_into().unwrap()),
        })
    }
}

/// Parse a PLY document held in memory.
pub fn parse_ply(bytes: &[u8]) -> Result<Mesh> {
    let header = parse_header(bytes)?;
    let body = &bytes[header.body_offset..];
    match header.encoding {
        Encoding::Ascii => {
            let text = std::str::from_utf8(body)
                .map_err(|_| Error::Format("ASCII body is not valid text".into()))?;
            let mut values = AsciiValues {
                tokens: text.split_ascii_whitespace(),
            };
            read_body(&header, &mut values)
        }
        Encoding::BinaryLittleEndian => {
            let mut values = BinaryValues { bytes: body, pos: 0 };
            read_body(&header, &mut values)
        }
    }
}

fn read_body(header: &Header, values: &mut dyn Values) -> Result<Mesh> {
    let mut vertices: Vec<Point> = Vec::new();
    let mut faces: Vec<Vec<i64>> = Vec::new();
    let mut saw_vertex = false;

    for el in &header.elements {
        match el.name.as_str() {
            "vertex" => {
                saw_vertex = true;
                let pos = |axis: &str| {
                    el.properties
                        .iter()
                        .position(|p| matches!(p, Property::Scalar { name, .. } if name == axis))
                        .ok_or_else(|| Error::Format(format!("vertex element has no '{axis}' property")))
                };
                let (xi, yi, zi) = (pos("x")?, pos("y")?, pos("z")?);
                vertices.reserve(el.count);
                let mut row = vec![0.0; el.properties.len()];
                for _ in 0..el.count {
                    for (k, prop) in el.properties.iter().enumerate() {
                        row[k] = read_property(prop, values)?.first().copied().unwrap_or(0.0);
                    }
                    vertices.push(Point::new(row[xi], row[yi], row[zi]));
                }
            }
            "face" => {
                let list = el
                    .properties
                    .iter()
                    .position(|p| {
                        matches!(p, Property::List { .. })
                            && matches!(p.name(), "vertex_indices" | "vertex_index")
                    })
                    .ok_or_else(|| Error::Format("face element has no vertex_indices list".into()))?;
                faces.reserve(el.count);
                for _ in 0..el.count {
                    for (k, prop) in el.properties.iter().enumerate() {
                        let vals = read_property(prop, values)?;
                        if k == list {
                            faces.push(vals.into_iter().map(|v| v as i64).collect());
                        }
                    }
                }
            }
            _ => {
                for _ in 0..el.count {
                    for prop in &el.properties {
                        read_property(prop, values)?;
                    }
                }
            }
        }
    }
    if !saw_vertex {
        return Err(Error::Format("no vertex element".into()));
    }
    if vertices.is_empty() || faces.is_empty() {
        return Err(Error::EmptyMesh(format!(
            "{} vertices, {} faces",
            vertices.len(),
            faces.len()
        )));
    }

    let n = vertices.len();
    let mut triangles = Vec::with_capacity(faces.len());
    for (face, idx) in faces.iter().enumerate() {
        if idx.len() < 3 {
            return Err(Error::Format(format!("face {face} has {} vertices", idx.len())));
        }
        if let Some(&bad) = idx.iter().find(|&&i| i < 0 || i as usize >= n) {
            return Err(Error::Index {
                face,
                index: bad.max(0) as usize,
                vertex_count: n,
            });
        }
        for k in 1..idx.len() - 1 {
            triangles.push([idx[0] as u32, idx[k] as u32, idx[k + 1] as u32]);
        }
    }
    Mesh::new(vertices, triangles)
}

fn read_property(prop: &Property, values: &mut dyn Values) -> Result<Vec<f64>> {
    match prop {
        Property::Scalar { ty, .. } => Ok(vec![values.next(*ty)?]),
        Property::List { count, item, .. } => {
            let n = values.next(*count)?;
            if n < 0.0 || n.fract() != 0.0 {
                return Err(Error::Format(format!("bad list length {n}")));
            }
            (0..n as usize).map(|_| values.next(*item)).collect()
        }
    }
}

pub fn load_ply(path: impl AsRef<Path>) -> Result<Mesh> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    parse_ply(&bytes)
}

/// Serialize `mesh`. ASCII output carries 9 significant digits per
/// coordinate; binary output stores exact `double`s.
pub fn encode_ply(mesh: &Mesh, encoding: Encoding) -> Vec<u8> {
    let mut out = Vec::new();
    let format = match encoding {
        Encoding::Ascii => "ascii",
        Encoding::BinaryLittleEndian => "binary_little_endian",
    };
    let _ = write!(
        out,
        "ply\nformat {format} 1.0\nelement vertex {}\nproperty double x\nproperty double y\nproperty double z\nelement face {}\nproperty list uchar int vertex_indices\nend_header\n",
        mesh.vertex_count(),
        mesh.triangle_count()
    );
    match encoding {
        Encoding::Ascii => {
            for p in mesh.vertices() {
                let _ = writeln!(out, "{} {} {}", sig9(p.x), sig9(p.y), sig9(p.z));
            }
            for [a, b, c] in mesh.triangles() {
                let _ = writeln!(out, "3 {a} {b} {c}");
            }
        }
        Encoding::BinaryLittleEndian => {
            for p in mesh.vertices() {
                for v in [p.x, p.y, p.z] {
                    out.extend_from_slice(&v.to_le_bytes());
                }
            }
            for tri in mesh.triangles() {
                out.push(3);
                for &i in tri {
                    out.extend_from_slice(&(i as i32).to_le_bytes());
                }
            }
        }
    }
    out
}

/// Write `mesh` as ASCII PLY.
pub fn write_ply(mesh: &Mesh, path: impl AsRef<Path>) -> Result<()> {
    write_ply_with(mesh, path, Encoding::Ascii)
}

pub fn write_ply_with(mesh: &Mesh, path: impl AsRef<Path>, encoding: Encoding) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, encode_ply(mesh, encoding)).map_err(|e| Error::io(path, e))
}
