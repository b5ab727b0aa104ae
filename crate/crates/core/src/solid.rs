//! Closed meshes for axis-aligned wall slabs with rectangular through-openings.
//!
//! The wall face is cut into a non-uniform grid whose lines are the wall
//! bounds plus every opening bound. Solid cells become front/back quads and
//! every solid cell edge that borders an opening or the outside becomes a
//! quad across the thickness. All quads share grid vertices, so the result is
//! conforming and closed.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mesh::{Aabb, Mesh, Point, Vector};

/// Horizontal axis along which a wall runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HorizontalAxis {
    X,
    Y,
}

impl HorizontalAxis {
    pub fn index(self) -> usize {
        match self {
            HorizontalAxis::X => 0,
            HorizontalAxis::Y => 1,
        }
    }

    pub fn other(self) -> HorizontalAxis {
        match self {
            HorizontalAxis::X => HorizontalAxis::Y,
            HorizontalAxis::Y => HorizontalAxis::X,
        }
    }

    /// Plan angle of the axis in degrees from +x.
    pub fn degrees(self) -> f64 {
        match self {
            HorizontalAxis::X => 0.0,
            HorizontalAxis::Y => 90.0,
        }
    }
}

/// A rectangular hole through the full wall thickness, in world coordinates
/// along the wall's length axis and the vertical axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Opening {
    pub u_min: f64,
    pub u_max: f64,
    pub z_min: f64,
    pub z_max: f64,
}

/// Build the closed mesh of `bounds` with `openings` cut through it along the
/// axis perpendicular to `length_axis`.
pub fn wall_with_openings(bounds: &Aabb, length_axis: HorizontalAxis, openings: &[Opening]) -> Result<Mesh> {
    let ui = length_axis.index();
    let wi = length_axis.other().index();
    let (u0, u1) = (bounds.min[ui], bounds.max[ui]);
    let (z0, z1) = (bounds.min.z, bounds.max.z);
    let (w0, w1) = (bounds.min[wi], bounds.max[wi]);
    if !(u1 > u0 && z1 > z0 && w1 > w0) {
        return Err(Error::Geometry("wall box has a zero extent".into()));
    }
    for o in openings {
        if !(o.u_min < o.u_max && o.z_min < o.z_max) {
            return Err(Error::Geometry(format!("empty opening {o:?}")));
        }
        if o.u_min <= u0 || o.u_max >= u1 || o.z_min < z0 || o.z_max >= z1 {
            return Err(Error::Geometry(format!(
                "opening {o:?} is not inside the wall face [{u0}, {u1}] x [{z0}, {z1}]"
            )));
        }
    }

    let mut us = vec![u0, u1];
    let mut zs = vec![z0, z1];
    for o in openings {
        us.extend([o.u_min, o.u_max]);
        zs.extend([o.z_min, o.z_max]);
    }
    sort_dedup(&mut us);
    sort_dedup(&mut zs);

    let (nu, nz) = (us.len() - 1, zs.len() - 1);
    let solid: Vec<bool> = (0..nu * nz)
        .map(|k| {
            let (i, j) = (k % nu, k / nu);
            let cu = 0.5 * (us[i] + us[i + 1]);
            let cz = 0.5 * (zs[j] + zs[j + 1]);
            !openings
                .iter()
                .any(|o| o.u_min < cu && cu < o.u_max && o.z_min < cz && cz < o.z_max)
        })
        .collect();
    let is_solid = |i: isize, j: isize| {
        i >= 0 && j >= 0 && (i as usize) < nu && (j as usize) < nz && solid[j as usize * nu + i as usize]
    };

    let mut builder = Builder::new(length_axis);
    let uw = [w0, w1];
    for j in 0..nz {
        for i in 0..nu {
            if !is_solid(i as isize, j as isize) {
                continue;
            }
            let (ua, ub, za, zb) = (us[i], us[i + 1], zs[j], zs[j + 1]);
            // faces across the thickness
            builder.quad([(ua, w0, za), (ub, w0, za), (ub, w0, zb), (ua, w0, zb)], (0.0, -1.0, 0.0));
            builder.quad([(ua, w1, za), (ub, w1, za), (ub, w1, zb), (ua, w1, zb)], (0.0, 1.0, 0.0));
            let (ii, jj) = (i as isize, j as isize);
            if !is_solid(ii - 1, jj) {
                builder.quad([(ua, uw[0], za), (ua, uw[1], za), (ua, uw[1], zb), (ua, uw[0], zb)], (-1.0, 0.0, 0.0));
            }
            if !is_solid(ii + 1, jj) {
                builder.quad([(ub, uw[0], za), (ub, uw[1], za), (ub, uw[1], zb), (ub, uw[0], zb)], (1.0, 0.0, 0.0));
            }
            if !is_solid(ii, jj - 1) {
                builder.quad([(ua, uw[0], za), (ub, uw[0], za), (ub, uw[1], za), (ua, uw[1], za)], (0.0, 0.0, -1.0));
            }
            if !is_solid(ii, jj + 1) {
                builder.quad([(ua, uw[0], zb), (ub, uw[0], zb), (ub, uw[1], zb), (ua, uw[1], zb)], (0.0, 0.0, 1.0));
            }
        }
    }
    builder.finish()
}

fn sort_dedup(v: &mut Vec<f64>) {
    v.sort_by(f64::total_cmp);
    v.dedup();
}

/// Accumulates quads given in (u, w, z) wall coordinates.
struct Builder {
    length_axis: HorizontalAxis,
    index: BTreeMap<[u64; 3], u32>,
    vertices: Vec<Point>,
    triangles: Vec<[u32; 3]>,
}

impl Builder {
    fn new(length_axis: HorizontalAxis) -> Self {
        Builder {
            length_axis,
            index: BTreeMap::new(),
            vertices: Vec::new(),
            triangles: Vec::new(),
        }
    }

    fn world(&self, (u, w, z): (f64, f64, f64)) -> Point {
        match self.length_axis {
            HorizontalAxis::X => Point::new(u, w, z),
            HorizontalAxis::Y => Point::new(w, u, z),
        }
    }

    fn vertex(&mut self, local: (f64, f64, f64)) -> u32 {
        let p = self.world(local);
        let key = [p.x.to_bits(), p.y.to_bits(), p.z.to_bits()];
        let next = self.vertices.len() as u32;
        *self.index.entry(key).or_insert_with(|| {
            self.vertices.push(p);
            next
        })
    }

    fn quad(&mut self, corners: [(f64, f64, f64); 4], outward_local: (f64, f64, f64)) {
        let ids = corners.map(|c| self.vertex(c));
        let outward = {
            let (u, w, z) = outward_local;
            let p = self.world((u, w, z));
            Vector::new(p.x, p.y, p.z)
        };
        let [a, b, c, d] = ids;
        let normal = (self.vertices[b as usize] - self.vertices[a as usize])
            .cross(&(self.vertices[c as usize] - self.vertices[a as usize]));
        if normal.dot(&outward) >= 0.0 {
            self.triangles.push([a, b, c]);
            self.triangles.push([a, c, d]);
        } else {
            self.triangles.push([a, c, b]);
            self.triangles.push([a, d, c]);
        }
    }

    fn finish(self) -> Result<Mesh> {
        Mesh::new(self.vertices, self.triangles)
    }
}
