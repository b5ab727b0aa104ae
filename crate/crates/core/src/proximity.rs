//! Exact distance queries between triangles and meshes.

use crate::mesh::{Aabb, Mesh, Point, Vector};

/// Closest point to `p` on the triangle `t` (Voronoi-region walk).
pub fn closest_point_on_triangle(p: &Point, t: &[Point; 3]) -> Point {
    let [a, b, c] = *t;
    let ab = b - a;
    let ac = c - a;
    let ap = p - a;
    let d1 = ab.dot(&ap);
    let d2 = ac.dot(&ap);
    if d1 <= 0.0 && d2 <= 0.0 {
        return a;
    }
    let bp = p - b;
    let d3 = ab.dot(&bp);
    let d4 = ac.dot(&bp);
    if d3 >= 0.0 && d4 <= d3 {
        return b;
    }
    let vc = d1 * d4 - d3 * d2;
    if vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0 {
        let v = d1 / (d1 - d3);
        return a + ab * v;
    }
    let cp = p - c;
    let d5 = ab.dot(&cp);
    let d6 = ac.dot(&cp);
    if d6 >= 0.0 && d5 <= d6 {
        return c;
    }
    let vb = d5 * d2 - d1 * d6;
    if vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0 {
        let w = d2 / (d2 - d6);
        return a + ac * w;
    }
    let va = d3 * d6 - d5 * d4;
    if va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0 {
        let w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
        return b + (c - b) * w;
    }
    let denom = va + vb + vc;
    if denom.abs() < f64::MIN_POSITIVE {
        // zero-area triangle: fall back to its edges
        return [(a, b), (b, c), (c, a)]
            .into_iter()
            .map(|(s, e)| closest_point_on_segment(p, &s, &e))
            .min_by(|x, y| (x - p).norm_squared().total_cmp(&(y - p).norm_squared()))
            .expect("three edges");
    }
    let v = vb / denom;
    let w = vc / denom;
    a + ab * v + ac * w
}

pub fn closest_point_on_segment(p: &Point, a: &Point, b: &Point) -> Point {
    let ab = b - a;
    let len2 = ab.norm_squared();
    if len2 == 0.0 {
        return *a;
    }
    let t = ((p - a).dot(&ab) / len2).clamp(0.0, 1.0);
    a + ab * t
}

pub fn point_triangle_distance(p: &Point, t: &[Point; 3]) -> f64 {
    (closest_point_on_triangle(p, t) - p).norm()
}

/// Minimum distance between segments `p1q1` and `p2q2`.
pub fn segment_segment_distance(p1: &Point, q1: &Point, p2: &Point, q2: &Point) -> f64 {
    const EPS: f64 = 1e-300;
    let d1 = q1 - p1;
    let d2 = q2 - p2;
    let r = p1 - p2;
    let a = d1.norm_squared();
    let e = d2.norm_squared();
    let f = d2.dot(&r);
    let (s, t);
    if a <= EPS && e <= EPS {
        return r.norm();
    }
    if a <= EPS {
        s = 0.0;
        t = (f / e).clamp(0.0, 1.0);
    } else {
        let c = d1.dot(&r);
        if e <= EPS {
            t = 0.0;
            s = (-c / a).clamp(0.0, 1.0);
        } else {
            let b = d1.dot(&d2);
            let denom = a * e - b * b;
            let mut s0 = if denom > 0.0 {
                ((b * f - c * e) / denom).clamp(0.0, 1.0)
            } else {
                0.0
            };
            let mut t0 = (b * s0 + f) / e;
            if t0 < 0.0 {
                t0 = 0.0;
                s0 = (-c / a).clamp(0.0, 1.0);
            } else if t0 > 1.0 {
                t0 = 1.0;
                s0 = ((b - c) / a).clamp(0.0, 1.0);
            }
            s = s0;
            t = t0;
        }
    }
    let c1 = p1 + d1 * s;
    let c2 = p2 + d2 * t;
    (c1 - c2).norm()
}

/// Whether the closed segment `pq` pierces triangle `t`. Segments parallel
/// to the triangle plane report `false`; those contacts are picked up by the
/// edge and vertex distance terms of [`triangle_distance`].
pub fn segment_hits_triangle(p: &Point, q: &Point, t: &[Point; 3]) -> bool {
    ray_triangle_param(p, &(q - p), t).is_some_and(|s| (0.0..=1.0).contains(&s))
}

/// Parameter `s` at which `origin + s * dir` crosses triangle `t`.
fn ray_triangle_param(origin: &Point, dir: &Vector, t: &[Point; 3]) -> Option<f64> {
    let e1 = t[1] - t[0];
    let e2 = t[2] - t[0];
    let h = dir.cross(&e2);
    let det = e1.dot(&h);
    let scale = e1.norm() * e2.norm() * dir.norm();
    if det.abs() <= 1e-12 * scale || scale == 0.0 {
        return None;
    }
    let inv = 1.0 / det;
    let s = origin - t[0];
    let u = inv * s.dot(&h);
    if !(0.0..=1.0).contains(&u) {
        return None;
    }
    let qv = s.cross(&e1);
    let v = inv * dir.dot(&qv);
    if v < 0.0 || u + v > 1.0 {
        return None;
    }
    Some(inv * e2.dot(&qv))
}

/// Exact minimum distance between two triangles; zero when they touch or
/// intersect.
pub fn triangle_distance(a: &[Point; 3], b: &[Point; 3]) -> f64 {
    for k in 0..3 {
        let (s, e) = (&a[k], &a[(k + 1) % 3]);
        if segment_hits_triangle(s, e, b) {
            return 0.0;
        }
        let (s, e) = (&b[k], &b[(k + 1) % 3]);
        if segment_hits_triangle(s, e, a) {
            return 0.0;
        }
    }
    let mut best = f64::INFINITY;
    for p in a {
        best = best.min(point_triangle_distance(p, b));
    }
    for p in b {
        best = best.min(point_triangle_distance(p, a));
    }
    for i in 0..3 {
        for j in 0..3 {
            best = best.min(segment_segment_distance(
                &a[i],
                &a[(i + 1) % 3],
                &b[j],
                &b[(j + 1) % 3],
            ));
        }
    }
    best
}

fn triangle_boxes(mesh: &Mesh) -> Vec<Aabb> {
    mesh.triangle_points()
        .map(|t| Aabb::from_points(&t).expect("three points"))
        .collect()
}

/// Minimum distance between the surfaces of two meshes.
///
/// Triangle pairs are visited in order of their bounding-box separation and
/// skipped once that lower bound reaches the best distance found, so the
/// result equals the all-pairs minimum.
pub fn mesh_distance(a: &Mesh, b: &Mesh) -> f64 {
    let boxes_a = triangle_boxes(a);
    let boxes_b = triangle_boxes(b);
    let whole_b = b.aabb();

    let mut order_a: Vec<(f64, usize)> = boxes_a
        .iter()
        .enumerate()
        .map(|(i, bx)| (bx.gap(&whole_b).norm(), i))
        .collect();
    order_a.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));

    let mut best = f64::INFINITY;
    let mut order_b: Vec<(f64, usize)> = Vec::with_capacity(boxes_b.len());
    for &(bound_a, i) in &order_a {
        if bound_a >= best {
            break;
        }
        let ta = a.triangle(i);
        order_b.clear();
        order_b.extend(
            boxes_b
                .iter()
                .enumerate()
                .map(|(j, bx)| (boxes_a[i].gap(bx).norm(), j)),
        );
        order_b.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));
        for &(bound, j) in &order_b {
            if bound >= best {
                break;
            }
            let d = triangle_distance(&ta, &b.triangle(j));
            if d < best {
                best = d;
                if best == 0.0 {
                    return 0.0;
                }
            }
        }
    }
    best
}

/// Distance from `p` to the nearest point on the mesh surface.
pub fn point_mesh_distance(p: &Point, mesh: &Mesh) -> f64 {
    let mut best = f64::INFINITY;
    for t in mesh.triangle_points() {
        let bx = Aabb::from_points(&t).expect("three points");
        let lb = Aabb { min: *p, max: *p }.gap(&bx).norm();
        if lb >= best {
            continue;
        }
        best = best.min(point_triangle_distance(p, &t));
    }
    best
}

// Generic directions so parity rays do not graze the edges of axis-aligned
// geometry.
const RAY_DIRECTIONS: [[f64; 3]; 3] = [
    [0.538_516_480_7, 0.719_401_729_3, 0.438_793_871_9],
    [-0.613_240_981_1, 0.352_801_047_2, 0.706_727_382_4],
    [0.274_193_560_8, -0.823_561_709_3, 0.496_552_312_7],
];

/// Ray-parity inside test against a closed mesh, majority vote over three
/// directions. Points on the surface give an arbitrary answer.
pub fn point_in_mesh(p: &Point, mesh: &Mesh) -> bool {
    let votes = RAY_DIRECTIONS
        .iter()
        .filter(|d| {
            let dir = Vector::new(d[0], d[1], d[2]);
            let hits = mesh
                .triangle_points()
                .filter(|t| ray_triangle_param(p, &dir, t).is_some_and(|s| s > 0.0))
                .count();
            hits % 2 == 1
        })
        .count();
    votes >= 2
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn tri(a: [f64; 3], b: [f64; 3], c: [f64; 3]) -> [Point; 3] {
        [Point::from(a), Point::from(b), Point::from(c)]
    }

    fn unit_cube() -> Mesh {
        Mesh::cuboid(Point::origin(), Point::new(1.0, 1.0, 1.0))
    }

    #[test]
    fn parallel_triangles() {
        let a = tri([0., 0., 0.], [1., 0., 0.], [0., 1., 0.]);
        let b = tri([0., 0., 1.], [1., 0., 1.], [0., 1., 1.]);
        assert_abs_diff_eq!(triangle_distance(&a, &b), 1.0);
        assert_eq!(triangle_distance(&a, &a), 0.0);
    }

    #[test]
    fn crossing_triangles_have_zero_distance() {
        let a = tri([0., 0., 0.], [2., 0., 0.], [0., 2., 0.]);
        // vertical triangle piercing the interior of `a`
        let b = tri([0.3, 0.3, -1.], [0.5, 0.5, 1.], [0.3, 0.6, 1.]);
        assert_eq!(triangle_distance(&a, &b), 0.0);
    }

    #[test]
    fn skew_edges() {
        let a = tri([0., 0., 0.], [1., 0., 0.], [0., 0., -1.]);
        let b = tri([0.5, -1., 2.], [0.5, 1., 2.], [0.5, 0., 3.]);
        assert_abs_diff_eq!(triangle_distance(&a, &b), 2.0, epsilon = 1e-12);
    }

    #[test]
    fn cube_distances() {
        let a = unit_cube();
        let touching = a.translated(Vector::new(1.0, 0.0, 0.0));
        let gap = a.translated(Vector::new(1.5, 0.0, 0.0));
        let diagonal = a.translated(Vector::new(2.0, 2.0, 0.0));
        assert_eq!(mesh_distance(&a, &touching), 0.0);
        assert_abs_diff_eq!(mesh_distance(&a, &gap), 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(mesh_distance(&a, &diagonal), 2f64.sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn inside_test() {
        let cube = unit_cube();
        assert!(point_in_mesh(&Point::new(0.5, 0.5, 0.5), &cube));
        assert!(point_in_mesh(&Point::new(0.01, 0.99, 0.02), &cube));
        assert!(!point_in_mesh(&Point::new(1.5, 0.5, 0.5), &cube));
        assert!(!point_in_mesh(&Point::new(-0.2, -0.2, -0.2), &cube));
        assert_abs_diff_eq!(point_mesh_distance(&Point::new(0.5, 0.5, 0.25), &cube), 0.25);
    }
}
