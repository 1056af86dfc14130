//! Manifold geometry: geodesic metrics, volumes, equidistant designs and
//! triangulations of the supported surfaces.

use std::collections::HashMap;
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Tolerance for "point lies on the manifold" checks.
pub const CHART_TOL: f64 = 1e-12;

/// The supported compact surfaces.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ManifoldKind {
    /// Closed planar disk of the given radius centred at the origin.
    Disk { radius: f64 },
    /// Unit 2-sphere embedded in R^3.
    Sphere2,
    /// Flat torus `[0, l1) x [0, l2)` with periodic identification.
    Torus2 { l1: f64, l2: f64 },
}

/// A point in the chart of some [`ManifoldKind`].
///
/// Disk points are planar `(x, y)`, sphere points are unit 3-vectors and torus
/// points are `(u, v)` reduced into `[0, l1) x [0, l2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Point {
    Planar([f64; 2]),
    Spherical([f64; 3]),
    Toroidal([f64; 2]),
}

impl Point {
    pub fn coords(&self) -> &[f64] {
        match self {
            Point::Planar(c) | Point::Toroidal(c) => c,
            Point::Spherical(c) => c,
        }
    }
}

fn wrap(x: f64, period: f64) -> f64 {
    let r = x.rem_euclid(period);
    // rem_euclid can round up to exactly `period` for tiny negative inputs
    if r >= period {
        0.0
    } else {
        r
    }
}

impl ManifoldKind {
    pub fn disk(radius: f64) -> Result<Self> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::invalid(format!("disk radius must be positive, got {radius}")));
        }
        Ok(ManifoldKind::Disk { radius })
    }

    pub fn torus(l1: f64, l2: f64) -> Result<Self> {
        if !(l1.is_finite() && l1 > 0.0 && l2.is_finite() && l2 > 0.0) {
            return Err(Error::invalid(format!(
                "torus side lengths must be positive, got ({l1}, {l2})"
            )));
        }
        Ok(ManifoldKind::Torus2 { l1, l2 })
    }

    /// Intrinsic dimension `d`. Every formula downstream takes it as a variable.
    pub fn dim(&self) -> usize {
        match self {
            ManifoldKind::Disk { .. } | ManifoldKind::Sphere2 | ManifoldKind::Torus2 { .. } => 2,
        }
    }

    /// Short variant tag used in file headers and on the command line.
    pub fn tag(&self) -> &'static str {
        match self {
            ManifoldKind::Disk { .. } => "disk",
            ManifoldKind::Sphere2 => "sphere",
            ManifoldKind::Torus2 { .. } => "torus",
        }
    }

    /// Number of chart coordinates per point.
    pub fn chart_len(&self) -> usize {
        match self {
            ManifoldKind::Disk { .. } | ManifoldKind::Torus2 { .. } => 2,
            ManifoldKind::Sphere2 => 3,
        }
    }

    /// Riemannian volume (area) of the surface.
    pub fn volume(&self) -> f64 {
        match *self {
            ManifoldKind::Disk { radius } => PI * radius * radius,
            ManifoldKind::Sphere2 => 4.0 * PI,
            ManifoldKind::Torus2 { l1, l2 } => l1 * l2,
        }
    }

    /// Builds a point from raw chart coordinates, canonicalizing torus
    /// coordinates and rejecting anything off the manifold.
    pub fn point(&self, coords: &[f64]) -> Result<Point> {
        if coords.len() != self.chart_len() {
            return Err(Error::invalid(format!(
                "{} points need {} coordinates, got {}",
                self.tag(),
                self.chart_len(),
                coords.len()
            )));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::invalid("non-finite point coordinate"));
        }
        let p = match *self {
            ManifoldKind::Disk { .. } => Point::Planar([coords[0], coords[1]]),
            ManifoldKind::Sphere2 => Point::Spherical([coords[0], coords[1], coords[2]]),
            ManifoldKind::Torus2 { l1, l2 } => {
                Point::Toroidal([wrap(coords[0], l1), wrap(coords[1], l2)])
            }
        };
        self.validate(&p)?;
        Ok(p)
    }

    /// Projects an arbitrary non-zero 3-vector onto the unit sphere.
    pub fn sphere_point(v: [f64; 3]) -> Point {
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        Point::Spherical([v[0] / n, v[1] / n, v[2] / n])
    }

    pub fn validate(&self, p: &Point) -> Result<()> {
        match (*self, p) {
            (ManifoldKind::Disk { radius }, Point::Planar([x, y])) => {
                if x.hypot(*y) > radius * (1.0 + CHART_TOL) {
                    return Err(Error::invalid(format!(
                        "point ({x}, {y}) lies outside the disk of radius {radius}"
                    )));
                }
            }
            (ManifoldKind::Sphere2, Point::Spherical(v)) => {
                let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
                if (n - 1.0).abs() > CHART_TOL {
                    return Err(Error::invalid(format!("sphere point has norm {n}")));
                }
            }
            (ManifoldKind::Torus2 { l1, l2 }, Point::Toroidal([u, v])) => {
                if !(0.0..l1).contains(u) || !(0.0..l2).contains(v) {
                    return Err(Error::invalid(format!(
                        "torus point ({u}, {v}) is not canonical"
                    )));
                }
            }
            _ => {
                return Err(Error::invalid(format!(
                    "point {p:?} does not belong to the {} chart",
                    self.tag()
                )))
            }
        }
        Ok(())
    }

    /// Geodesic distance without chart validation. Mismatched charts give NaN.
    pub(crate) fn rho(&self, a: &Point, b: &Point) -> f64 {
        match (*self, a, b) {
            (ManifoldKind::Disk { .. }, Point::Planar(p), Point::Planar(q)) => {
                (p[0] - q[0]).hypot(p[1] - q[1])
            }
            (ManifoldKind::Sphere2, Point::Spherical(p), Point::Spherical(q)) => {
                // atan2(|p x q|, p . q) is accurate for both tiny and near-antipodal arcs
                let cx = p[1] * q[2] - p[2] * q[1];
                let cy = p[2] * q[0] - p[0] * q[2];
                let cz = p[0] * q[1] - p[1] * q[0];
                let cross = (cx * cx + cy * cy + cz * cz).sqrt();
                let dot = p[0] * q[0] + p[1] * q[1] + p[2] * q[2];
                cross.atan2(dot)
            }
            (ManifoldKind::Torus2 { l1, l2 }, Point::Toroidal(p), Point::Toroidal(q)) => {
                let du = (p[0] - q[0]).abs() % l1;
                let dv = (p[1] - q[1]).abs() % l2;
                du.min(l1 - du).hypot(dv.min(l2 - dv))
            }
            _ => f64::NAN,
        }
    }
}

/// Geodesic distance `ρ(a, b)` on `m`.
///
/// Disk: Euclidean. Sphere: great-circle arc. Torus: Euclidean distance to the
/// nearest periodic copy.
pub fn geodesic_distance(m: &ManifoldKind, a: &Point, b: &Point) -> Result<f64> {
    m.validate(a)?;
    m.validate(b)?;
    Ok(m.rho(a, b))
}

/// `vol S^{d-1} = 2 π^{d/2} / Γ(d/2)`.
pub fn sphere_surface_volume(d: usize) -> Result<f64> {
    if d == 0 {
        return Err(Error::invalid("sphere dimension d must be at least 1"));
    }
    Ok(2.0 * PI.powf(d as f64 / 2.0) / gamma_half(d))
}

/// `Γ(d/2)` for positive integers `d`, by the recursion from `Γ(1) = 1`,
/// `Γ(1/2) = √π`.
fn gamma_half(d: usize) -> f64 {
    let target = d as f64 / 2.0;
    let (mut g, mut x) = if d.is_multiple_of(2) { (1.0, 1.0) } else { (PI.sqrt(), 0.5) };
    while x < target {
        g *= x;
        x += 1.0;
    }
    g
}

pub fn volume(m: &ManifoldKind) -> f64 {
    m.volume()
}

const GOLDEN_ANGLE: f64 = 2.399_963_229_728_653; // π (3 − √5)

/// Deterministic, asymptotically equidistant point set of size `count`.
///
/// * disk: sunflower (Vogel) spiral, the first point at the origin;
/// * sphere: Fibonacci lattice;
/// * torus: near-square grid with `⌈√count⌉` columns, filled column by column.
pub fn equidistant_points(m: &ManifoldKind, count: usize) -> Result<Vec<Point>> {
    if count == 0 {
        return Err(Error::invalid("point count must be at least 1"));
    }
    let n = count as f64;
    let pts = match *m {
        ManifoldKind::Disk { radius } => (0..count)
            .map(|i| {
                let r = radius * (i as f64 / n).sqrt();
                let t = i as f64 * GOLDEN_ANGLE;
                Point::Planar([r * t.cos(), r * t.sin()])
            })
            .collect(),
        ManifoldKind::Sphere2 => (0..count)
            .map(|i| {
                let z = 1.0 - (2.0 * i as f64 + 1.0) / n;
                let r = (1.0 - z * z).max(0.0).sqrt();
                let t = i as f64 * GOLDEN_ANGLE;
                ManifoldKind::sphere_point([r * t.cos(), r * t.sin(), z])
            })
            .collect(),
        ManifoldKind::Torus2 { l1, l2 } => {
            let cols = (count as f64).sqrt().ceil() as usize;
            let rows = count.div_ceil(cols);
            (0..count)
                .map(|idx| {
                    let (a, b) = (idx / rows, idx % rows);
                    Point::Toroidal([a as f64 * l1 / cols as f64, b as f64 * l2 / rows as f64])
                })
                .collect()
        }
    };
    Ok(pts)
}

/// Nearest-neighbour distance of every point (brute force).
pub fn nearest_neighbor_distances(m: &ManifoldKind, pts: &[Point]) -> Vec<f64> {
    pts.iter()
        .enumerate()
        .map(|(j, p)| {
            pts.iter()
                .enumerate()
                .filter(|&(i, _)| i != j)
                .map(|(_, q)| m.rho(p, q))
                .fold(f64::INFINITY, f64::min)
        })
        .collect()
}

/// `max_j min_{i≠j} ρ(z_i, z_j) / min_j min_{i≠j} ρ(z_i, z_j)`.
pub fn equidistance_ratio(m: &ManifoldKind, pts: &[Point]) -> Result<f64> {
    if pts.len() < 2 {
        return Err(Error::invalid("equidistance ratio needs at least 2 points"));
    }
    for p in pts {
        m.validate(p)?;
    }
    let nn = nearest_neighbor_distances(m, pts);
    let lo = nn.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = nn.iter().copied().fold(0.0, f64::max);
    if lo <= CHART_TOL {
        return Err(Error::invalid("point set contains duplicated points"));
    }
    Ok(hi / lo)
}

/// Indices of `pts` inside the closed geodesic ball `B_center(radius)`.
pub fn geodesic_ball(m: &ManifoldKind, center: &Point, radius: f64, pts: &[Point]) -> Vec<usize> {
    pts.iter()
        .enumerate()
        .filter(|(_, p)| m.rho(center, p) <= radius)
        .map(|(i, _)| i)
        .collect()
}

/// A triangulated surface.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    pub manifold: ManifoldKind,
    pub vertices: Vec<Point>,
    pub triangles: Vec<[usize; 3]>,
    pub resolution: usize,
}

impl Mesh {
    /// Sorted, deduplicated edge list derived from the triangles.
    pub fn edges(&self) -> Vec<[usize; 2]> {
        let mut edges: Vec<[usize; 2]> = self
            .triangles
            .iter()
            .flat_map(|t| {
                let mut t = *t;
                t.sort_unstable();
                [[t[0], t[1]], [t[0], t[2]], [t[1], t[2]]]
            })
            .collect();
        edges.sort_unstable();
        edges.dedup();
        edges
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.vertices.len() as i64 - self.edges().len() as i64 + self.triangles.len() as i64
    }

    /// Triangle barycentres, mapped back onto the manifold.
    pub fn barycenters(&self) -> Vec<Point> {
        self.triangles
            .iter()
            .map(|t| {
                let [a, b, c] = t.map(|i| self.vertices[i]);
                match (self.manifold, a, b, c) {
                    (ManifoldKind::Disk { .. }, Point::Planar(a), Point::Planar(b), Point::Planar(c)) => {
                        Point::Planar([(a[0] + b[0] + c[0]) / 3.0, (a[1] + b[1] + c[1]) / 3.0])
                    }
                    (ManifoldKind::Sphere2, Point::Spherical(a), Point::Spherical(b), Point::Spherical(c)) => {
                        ManifoldKind::sphere_point([a[0] + b[0] + c[0], a[1] + b[1] + c[1], a[2] + b[2] + c[2]])
                    }
                    (ManifoldKind::Torus2 { l1, l2 }, Point::Toroidal(a), Point::Toroidal(b), Point::Toroidal(c)) => {
                        // unwrap b and c next to a before averaging
                        let near = |x: f64, base: f64, l: f64| x - l * ((x - base) / l).round();
                        let u = (a[0] + near(b[0], a[0], l1) + near(c[0], a[0], l1)) / 3.0;
                        let v = (a[1] + near(b[1], a[1], l2) + near(c[1], a[1], l2)) / 3.0;
                        Point::Toroidal([wrap(u, l1), wrap(v, l2)])
                    }
                    _ => unreachable!("mesh vertices always match the mesh chart"),
                }
            })
            .collect()
    }

    /// Checks vertex ids, chart membership, and the edge-manifold condition
    /// (two triangles per interior edge, one per disk boundary edge).
    pub fn check_invariants(&self) -> Result<()> {
        let nv = self.vertices.len();
        for p in &self.vertices {
            self.manifold.validate(p)?;
        }
        let mut edge_use: HashMap<[usize; 2], usize> = HashMap::new();
        for t in &self.triangles {
            if t.iter().any(|&v| v >= nv) {
                return Err(Error::invalid(format!("triangle {t:?} references a missing vertex")));
            }
            if t[0] == t[1] || t[1] == t[2] || t[0] == t[2] {
                return Err(Error::invalid(format!("degenerate triangle {t:?}")));
            }
            let mut s = *t;
            s.sort_unstable();
            for e in [[s[0], s[1]], [s[0], s[2]], [s[1], s[2]]] {
                *edge_use.entry(e).or_default() += 1;
            }
        }
        let closed = !matches!(self.manifold, ManifoldKind::Disk { .. });
        for (e, &count) in &edge_use {
            if count > 2 || (closed && count != 2) {
                return Err(Error::invalid(format!("edge {e:?} belongs to {count} triangles")));
            }
        }
        Ok(())
    }
}

/// Triangulates `m` at the given refinement level.
///
/// * disk: `resolution` concentric rings, ring `i` carrying `6 i` vertices,
///   zipped together; the centre is fanned to the first ring;
/// * sphere: icosahedron subdivided `resolution` times, vertices projected
///   to the sphere;
/// * torus: `resolution x resolution` grid split along diagonals. At least 3
///   is needed for the identification to yield a simplicial complex.
pub fn triangulate(m: &ManifoldKind, resolution: usize) -> Result<Mesh> {
    if resolution == 0 {
        return Err(Error::invalid("resolution must be at least 1"));
    }
    let (vertices, triangles) = match *m {
        ManifoldKind::Disk { radius } => disk_rings(radius, resolution),
        ManifoldKind::Sphere2 => icosphere(resolution),
        ManifoldKind::Torus2 { l1, l2 } => {
            if resolution < 3 {
                return Err(Error::invalid("torus triangulation needs resolution >= 3"));
            }
            torus_grid(l1, l2, resolution)
        }
    };
    let mesh = Mesh {
        manifold: *m,
        vertices,
        triangles,
        resolution,
    };
    debug_assert!(mesh.check_invariants().is_ok());
    Ok(mesh)
}

fn disk_rings(radius: f64, rings: usize) -> (Vec<Point>, Vec<[usize; 3]>) {
    let mut vertices = vec![Point::Planar([0.0, 0.0])];
    let mut ring_start = vec![0usize];
    for i in 1..=rings {
        ring_start.push(vertices.len());
        let count = 6 * i;
        let r = radius * i as f64 / rings as f64;
        for j in 0..count {
            let t = 2.0 * PI * j as f64 / count as f64;
            vertices.push(Point::Planar([r * t.cos(), r * t.sin()]));
        }
    }
    let mut triangles = Vec::new();
    let first = ring_start[1];
    for j in 0..6 {
        triangles.push([0, first + j, first + (j + 1) % 6]);
    }
    for i in 1..rings {
        let (a, b) = (6 * i, 6 * (i + 1));
        let inner = |p: usize| ring_start[i] + p % a;
        let outer = |q: usize| ring_start[i + 1] + q % b;
        let (mut p, mut q) = (0usize, 0usize);
        while p < a || q < b {
            // advance whichever ring's next vertex has the smaller angle
            let advance_outer = q < b && (p == a || (q + 1) * a <= (p + 1) * b);
            if advance_outer {
                triangles.push([inner(p), outer(q), outer(q + 1)]);
                q += 1;
            } else {
                triangles.push([inner(p), outer(q), inner(p + 1)]);
                p += 1;
            }
        }
    }
    (vertices, triangles)
}

fn icosphere(subdivisions: usize) -> (Vec<Point>, Vec<[usize; 3]>) {
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let mut raw: Vec<[f64; 3]> = vec![
        [-1.0, phi, 0.0],
        [1.0, phi, 0.0],
        [-1.0, -phi, 0.0],
        [1.0, -phi, 0.0],
        [0.0, -1.0, phi],
        [0.0, 1.0, phi],
        [0.0, -1.0, -phi],
        [0.0, 1.0, -phi],
        [phi, 0.0, -1.0],
        [phi, 0.0, 1.0],
        [-phi, 0.0, -1.0],
        [-phi, 0.0, 1.0],
    ];
    let normalize = |v: [f64; 3]| {
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        [v[0] / n, v[1] / n, v[2] / n]
    };
    raw.iter_mut().for_each(|v| *v = normalize(*v));
    let mut faces: Vec<[usize; 3]> = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    for _ in 0..subdivisions {
        let mut midpoints: HashMap<(usize, usize), usize> = HashMap::new();
        let mut midpoint = |a: usize, b: usize, raw: &mut Vec<[f64; 3]>| {
            *midpoints.entry((a.min(b), a.max(b))).or_insert_with(|| {
                let (p, q) = (raw[a], raw[b]);
                raw.push(normalize([p[0] + q[0], p[1] + q[1], p[2] + q[2]]));
                raw.len() - 1
            })
        };
        let mut next = Vec::with_capacity(faces.len() * 4);
        for [a, b, c] in faces {
            let ab = midpoint(a, b, &mut raw);
            let bc = midpoint(b, c, &mut raw);
            let ca = midpoint(c, a, &mut raw);
            next.extend([[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]);
        }
        faces = next;
    }
    (raw.into_iter().map(Point::Spherical).collect(), faces)
}

fn torus_grid(l1: f64, l2: f64, r: usize) -> (Vec<Point>, Vec<[usize; 3]>) {
    let id = |i: usize, j: usize| (i % r) * r + (j % r);
    let vertices = (0..r)
        .flat_map(|i| (0..r).map(move |j| Point::Toroidal([i as f64 * l1 / r as f64, j as f64 * l2 / r as f64])))
        .collect();
    let mut triangles = Vec::with_capacity(2 * r * r);
    for i in 0..r {
        for j in 0..r {
            triangles.push([id(i, j), id(i + 1, j), id(i + 1, j + 1)]);
            triangles.push([id(i, j), id(i + 1, j + 1), id(i, j + 1)]);
        }
    }
    (vertices, triangles)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn torus1() -> ManifoldKind {
        ManifoldKind::torus(1.0, 1.0).unwrap()
    }

    #[test]
    fn sphere_pole_distances() {
        let m = ManifoldKind::Sphere2;
        let n = Point::Spherical([0.0, 0.0, 1.0]);
        let s = Point::Spherical([0.0, 0.0, -1.0]);
        assert_eq!(geodesic_distance(&m, &n, &n).unwrap(), 0.0);
        assert!((geodesic_distance(&m, &n, &s).unwrap() - PI).abs() < 1e-15);
    }

    #[test]
    fn torus_wraparound_matches_shift_oracle() {
        let m = torus1();
        let a = m.point(&[0.1, 0.0]).unwrap();
        let b = m.point(&[0.9, 0.0]).unwrap();
        // brute force over the nine integer shifts of b
        let oracle = (-1..=1)
            .flat_map(|s| (-1..=1).map(move |t| (s as f64, t as f64)))
            .map(|(s, t)| (0.1 - (0.9 + s)).hypot(0.0 - (0.0 + t)))
            .fold(f64::INFINITY, f64::min);
        let d = geodesic_distance(&m, &a, &b).unwrap();
        assert!((d - oracle).abs() < 1e-12);
        assert!((d - 0.2).abs() < 1e-12);
    }

    #[test]
    fn chart_mismatch_is_rejected() {
        let a = Point::Planar([0.0, 0.0]);
        let b = Point::Spherical([0.0, 0.0, 1.0]);
        assert!(geodesic_distance(&ManifoldKind::Sphere2, &a, &b).is_err());
        assert!(ManifoldKind::disk(1.0).unwrap().point(&[2.0, 0.0]).is_err());
        assert!(ManifoldKind::Sphere2.point(&[1.0, 1.0, 0.0]).is_err());
    }

    #[test]
    fn torus_points_are_canonicalized() {
        let m = ManifoldKind::torus(2.0, 3.0).unwrap();
        let p = m.point(&[-0.5, 7.0]).unwrap();
        assert_eq!(p, Point::Toroidal([1.5, 1.0]));
    }

    #[test]
    fn torus_grid_of_four() {
        let pts = equidistant_points(&torus1(), 4).unwrap();
        let expected = [[0.0, 0.0], [0.0, 0.5], [0.5, 0.0], [0.5, 0.5]];
        assert_eq!(pts, expected.map(Point::Toroidal).to_vec());
        assert_eq!(equidistance_ratio(&torus1(), &pts).unwrap(), 1.0);
    }

    #[test]
    fn fibonacci_pair_is_well_separated() {
        let pts = equidistant_points(&ManifoldKind::Sphere2, 2).unwrap();
        let d = geodesic_distance(&ManifoldKind::Sphere2, &pts[0], &pts[1]).unwrap();
        assert!(d >= PI / 2.0, "separation {d}");
    }

    #[test]
    fn single_disk_point_is_origin() {
        let pts = equidistant_points(&ManifoldKind::disk(1.0).unwrap(), 1).unwrap();
        assert_eq!(pts, vec![Point::Planar([0.0, 0.0])]);
    }

    #[test]
    fn fibonacci_ratio_golden() {
        let m = ManifoldKind::Sphere2;
        let r = equidistance_ratio(&m, &equidistant_points(&m, 100).unwrap()).unwrap();
        assert!((1.0..=2.0).contains(&r));
        assert!((r - FIB100_RATIO).abs() < 1e-9, "ratio {r}");
    }
    const FIB100_RATIO: f64 = 1.110_089_778_123_428_7;

    #[test]
    fn duplicated_points_are_an_error() {
        let m = torus1();
        let p = m.point(&[0.25, 0.25]).unwrap();
        let q = m.point(&[0.5, 0.25]).unwrap();
        assert!(equidistance_ratio(&m, &[p, q, p]).is_err());
        assert!(equidistance_ratio(&m, &[p]).is_err());
    }

    fn ratios(m: &ManifoldKind) -> Vec<f64> {
        [16, 64, 256, 1024]
            .iter()
            .map(|&n| equidistance_ratio(m, &equidistant_points(m, n).unwrap()).unwrap())
            .collect()
    }

    #[test]
    fn ratio_improves_with_count() {
        for m in [ManifoldKind::disk(10.0).unwrap(), torus1()] {
            let r = ratios(&m);
            assert!(r[3] <= r[0], "{m:?}: {r:?}");
        }
    }

    #[test]
    fn fibonacci_ratio_stays_bounded() {
        // creeps up towards ~1.13 rather than decreasing
        let r = ratios(&ManifoldKind::Sphere2);
        assert!(r.iter().all(|&x| (1.0..1.2).contains(&x)), "{r:?}");
        assert!((r[0] - 1.071_318_686_883_639).abs() < 1e-9);
    }

    #[test]
    fn volumes() {
        assert!((sphere_surface_volume(2).unwrap() - 2.0 * PI).abs() < 1e-14);
        assert!((sphere_surface_volume(3).unwrap() - 4.0 * PI).abs() < 1e-14);
        // Γ(2) = 1, so vol S^3 = 2π²
        assert!((sphere_surface_volume(4).unwrap() - 2.0 * PI * PI).abs() < 1e-13);
        // Γ(5/2) = 3√π/4, vol S^4 = 8π²/3
        assert!((sphere_surface_volume(5).unwrap() - 8.0 * PI * PI / 3.0).abs() < 1e-13);
        assert!(sphere_surface_volume(0).is_err());
        assert!((volume(&ManifoldKind::disk(10.0).unwrap()) - 100.0 * PI).abs() < 1e-12);
        assert_eq!(volume(&ManifoldKind::torus(2.0, 3.0).unwrap()), 6.0);
    }

    #[test]
    fn icosphere_counts() {
        let mesh = triangulate(&ManifoldKind::Sphere2, 1).unwrap();
        assert_eq!(mesh.vertices.len(), 42);
        assert_eq!(mesh.triangles.len(), 80);
        assert_eq!(mesh.edges().len(), 120);
        mesh.check_invariants().unwrap();
    }

    #[test]
    fn torus_counts() {
        let mesh = triangulate(&torus1(), 3).unwrap();
        assert_eq!((mesh.vertices.len(), mesh.edges().len(), mesh.triangles.len()), (9, 27, 18));
        assert_eq!(mesh.euler_characteristic(), 0);
        assert!(triangulate(&torus1(), 2).is_err());
    }

    #[test]
    fn smallest_disk_fan() {
        let mesh = triangulate(&ManifoldKind::disk(1.0).unwrap(), 1).unwrap();
        assert_eq!(mesh.vertices.len(), 7);
        assert_eq!(mesh.triangles.len(), 6);
        assert_eq!(mesh.euler_characteristic(), 1);
    }

    #[test]
    fn euler_characteristics_and_invariants() {
        for r in 1..6 {
            let disk = triangulate(&ManifoldKind::disk(10.0).unwrap(), r).unwrap();
            disk.check_invariants().unwrap();
            assert_eq!(disk.euler_characteristic(), 1);
            assert_eq!(disk.vertices.len(), 1 + 3 * r * (r + 1));
        }
        for r in 1..4 {
            let s = triangulate(&ManifoldKind::Sphere2, r).unwrap();
            s.check_invariants().unwrap();
            assert_eq!(s.euler_characteristic(), 2);
        }
        for r in 3..8 {
            let t = triangulate(&ManifoldKind::torus(2.0, 1.5).unwrap(), r).unwrap();
            t.check_invariants().unwrap();
            assert_eq!(t.euler_characteristic(), 0);
        }
    }

    #[test]
    fn barycenters_lie_on_the_manifold() {
        for mesh in [
            triangulate(&ManifoldKind::disk(10.0).unwrap(), 3).unwrap(),
            triangulate(&ManifoldKind::Sphere2, 2).unwrap(),
            triangulate(&torus1(), 5).unwrap(),
        ] {
            for b in mesh.barycenters() {
                mesh.manifold.validate(&b).unwrap();
            }
        }
    }

    #[test]
    fn ball_contains_centre() {
        let m = ManifoldKind::Sphere2;
        let pts = equidistant_points(&m, 50).unwrap();
        let idx = geodesic_ball(&m, &pts[7], 0.0, &pts);
        assert_eq!(idx, vec![7]);
        assert_eq!(geodesic_ball(&m, &pts[7], PI, &pts).len(), 50);
    }
}
