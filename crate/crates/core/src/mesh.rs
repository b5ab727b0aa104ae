//! Indexed triangle meshes and the basic measures the pipeline is built on.
//!
//! All coordinates are meters in the global frame of the exported model.

use std::collections::HashMap;

use nalgebra::{Isometry3, Point3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Point = Point3<f64>;
pub type Vector = Vector3<f64>;

/// An indexed triangle soup.
///
/// A constructed `Mesh` always has at least three vertices, at least one
/// triangle, finite coordinates and in-range indices.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    vertices: Vec<Point>,
    triangles: Vec<[u32; 3]>,
}

impl Mesh {
    pub fn new(vertices: Vec<Point>, triangles: Vec<[u32; 3]>) -> Result<Self> {
        if vertices.is_empty() || triangles.is_empty() {
            return Err(Error::EmptyMesh(format!(
                "{} vertices, {} triangles",
                vertices.len(),
                triangles.len()
            )));
        }
        if vertices.len() < 3 {
            return Err(Error::InvalidMesh(format!(
                "a mesh needs at least 3 vertices, got {}",
                vertices.len()
            )));
        }
        if let Some(i) = vertices
            .iter()
            .position(|p| !(p.x.is_finite() && p.y.is_finite() && p.z.is_finite()))
        {
            return Err(Error::InvalidMesh(format!("vertex {i} has a non-finite coordinate")));
        }
        let n = vertices.len();
        for (face, tri) in triangles.iter().enumerate() {
            for &index in tri {
                if index as usize >= n {
                    return Err(Error::Index {
                        face,
                        index: index as usize,
                        vertex_count: n,
                    });
                }
            }
        }
        Ok(Mesh {
            vertices,
            triangles,
        })
    }

    /// Axis-aligned box with outward-facing triangles.
    pub fn cuboid(min: Point, max: Point) -> Mesh {
        let v = |x: bool, y: bool, z: bool| {
            Point::new(
                if x { max.x } else { min.x },
                if y { max.y } else { min.y },
                if z { max.z } else { min.z },
            )
        };
        let vertices = vec![
            v(false, false, false),
            v(true, false, false),
            v(true, true, false),
            v(false, true, false),
            v(false, false, true),
            v(true, false, true),
            v(true, true, true),
            v(false, true, true),
        ];
        let triangles = vec![
            [0, 2, 1],
            [0, 3, 2],
            [4, 5, 6],
            [4, 6, 7],
            [0, 1, 5],
            [0, 5, 4],
            [1, 2, 6],
            [1, 6, 5],
            [2, 3, 7],
            [2, 7, 6],
            [3, 0, 4],
            [3, 4, 7],
        ];
        Mesh {
            vertices,
            triangles,
        }
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[u32; 3]] {
        &self.triangles
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn triangle_count(&self) -> usize {
        self.triangles.len()
    }

    pub fn triangle(&self, i: usize) -> [Point; 3] {
        let [a, b, c] = self.triangles[i];
        [
            self.vertices[a as usize],
            self.vertices[b as usize],
            self.vertices[c as usize],
        ]
    }

    pub fn triangle_points(&self) -> impl Iterator<Item = [Point; 3]> + '_ {
        (0..self.triangles.len()).map(move |i| self.triangle(i))
    }

    pub fn translated(&self, offset: Vector) -> Mesh {
        Mesh {
            vertices: self.vertices.iter().map(|p| p + offset).collect(),
            triangles: self.triangles.clone(),
        }
    }

    pub fn transformed(&self, iso: &Isometry3<f64>) -> Mesh {
        Mesh {
            vertices: self.vertices.iter().map(|p| iso * p).collect(),
            triangles: self.triangles.clone(),
        }
    }

    /// Same geometry with every triangle's winding reversed.
    pub fn flipped(&self) -> Mesh {
        Mesh {
            vertices: self.vertices.clone(),
            triangles: self.triangles.iter().map(|&[a, b, c]| [a, c, b]).collect(),
        }
    }

    pub fn aabb(&self) -> Aabb {
        Aabb::from_points(&self.vertices).expect("mesh has vertices")
    }

    /// Sum of triangle areas. Degenerate triangles contribute zero.
    pub fn surface_area(&self) -> f64 {
        self.triangle_points().map(|t| triangle_area(&t)).sum()
    }

    /// Divergence-theorem sum of signed tetrahedron volumes.
    ///
    /// The tetrahedra are anchored at the AABB min corner instead of the
    /// origin. On a closed mesh the two are identical; the anchor keeps the
    /// sum well conditioned for models placed far from the origin.
    pub fn signed_volume(&self) -> f64 {
        let anchor = self.aabb().min;
        self.triangle_points()
            .map(|[a, b, c]| {
                let (a, b, c) = (a - anchor, b - anchor, c - anchor);
                a.dot(&b.cross(&c))
            })
            .sum::<f64>()
            / 6.0
    }

    /// Enclosed volume, insensitive to winding direction.
    pub fn volume(&self) -> f64 {
        self.signed_volume().abs()
    }

    /// Volume together with whether the surface is closed enough for the
    /// value to be meaningful.
    pub fn volume_estimate(&self) -> VolumeEstimate {
        VolumeEstimate {
            value: self.volume(),
            reliable: self.is_closed(),
        }
    }

    /// True when, after welding coincident vertices, every edge is shared by
    /// an even number of triangles.
    pub fn is_closed(&self) -> bool {
        let mut welded: HashMap<[u64; 3], usize> = HashMap::new();
        let remap: Vec<usize> = self
            .vertices
            .iter()
            .map(|p| {
                let key = [p.x.to_bits(), p.y.to_bits(), p.z.to_bits()];
                let next = welded.len();
                *welded.entry(key).or_insert(next)
            })
            .collect();
        let mut edges: HashMap<(usize, usize), u32> = HashMap::new();
        for tri in &self.triangles {
            for k in 0..3 {
                let a = remap[tri[k] as usize];
                let b = remap[tri[(k + 1) % 3] as usize];
                if a == b {
                    continue;
                }
                *edges.entry((a.min(b), a.max(b))).or_default() += 1;
            }
        }
        !edges.is_empty() && edges.values().all(|&c| c % 2 == 0)
    }

    /// Unweighted mean of the vertex positions.
    pub fn vertex_centroid(&self) -> Point {
        let sum = self
            .vertices
            .iter()
            .fold(Vector::zeros(), |acc, p| acc + p.coords);
        Point::from(sum / self.vertices.len() as f64)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VolumeEstimate {
    pub value: f64,
    pub reliable: bool,
}

pub fn triangle_area(t: &[Point; 3]) -> f64 {
    (t[1] - t[0]).cross(&(t[2] - t[0])).norm() * 0.5
}

/// Axis-aligned bounding box; `min[i] <= max[i]` on every axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Aabb {
    pub min: Point,
    pub max: Point,
}

/// Per-axis separation of two boxes; zero on an axis where they touch or
/// overlap.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AabbGap {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl AabbGap {
    pub fn sum(&self) -> f64 {
        self.x + self.y + self.z
    }

    pub fn norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }
}

impl Aabb {
    pub fn new(min: Point, max: Point) -> Result<Self> {
        // Negated so NaN coordinates are rejected too.
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if (0..3).any(|i| !(min[i] <= max[i])) {
            return Err(Error::Geometry(format!(
                "box min {min:?} exceeds max {max:?}"
            )));
        }
        Ok(Aabb { min, max })
    }

    pub fn from_points(points: &[Point]) -> Option<Self> {
        let first = *points.first()?;
        Some(points.iter().skip(1).fold(
            Aabb {
                min: first,
                max: first,
            },
            |b, p| Aabb {
                min: b.min.inf(p),
                max: b.max.sup(p),
            },
        ))
    }

    pub fn extents(&self) -> Vector {
        self.max - self.min
    }

    pub fn center(&self) -> Point {
        nalgebra::center(&self.min, &self.max)
    }

    pub fn volume(&self) -> f64 {
        let e = self.extents();
        e.x * e.y * e.z
    }

    pub fn merged(&self, other: &Aabb) -> Aabb {
        Aabb {
            min: self.min.inf(&other.min),
            max: self.max.sup(&other.max),
        }
    }

    pub fn translated(&self, offset: Vector) -> Aabb {
        Aabb {
            min: self.min + offset,
            max: self.max + offset,
        }
    }

    pub fn gap(&self, other: &Aabb) -> AabbGap {
        let axis = |i: usize| {
            0f64.max(self.min[i] - other.max[i])
                .max(other.min[i] - self.max[i])
        };
        AabbGap {
            x: axis(0),
            y: axis(1),
            z: axis(2),
        }
    }

    /// `self` contains `other`, allowing `eps` slack on every face.
    pub fn contains(&self, other: &Aabb, eps: f64) -> bool {
        (0..3).all(|i| self.min[i] - eps <= other.min[i] && other.max[i] <= self.max[i] + eps)
    }

    pub fn contains_point(&self, p: &Point, eps: f64) -> bool {
        (0..3).all(|i| self.min[i] - eps <= p[i] && p[i] <= self.max[i] + eps)
    }
}

pub fn aabb_gap(a: &Aabb, b: &Aabb) -> AabbGap {
    a.gap(b)
}
