//! Compact sets, open regions, simply connected domains and closed contours
//! in the complex plane.
//!
//! Compact sets are finite unions of primitives. Membership and distances are
//! computed exactly from the primitives; samples exist only to evaluate sup
//! norms and to seed point selection.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default number of mesh cells across the diameter of a set.
pub const MESH_DIVISIONS: f64 = 128.0;
/// Boundary samples are this many times denser than the interior grid.
pub const BOUNDARY_OVERSAMPLING: f64 = 4.0;
/// Winding sums further than this from an integer are rejected.
pub const WINDING_RESIDUAL_MAX: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("invalid primitive: {0}")]
    InvalidPrimitive(String),
    #[error("invalid domain: {0}")]
    InvalidDomain(String),
    #[error("the base point lies on or outside the domain")]
    BasePointNotInterior,
    #[error("exhaustion index must be at least 1, got {0}")]
    BadExhaustionIndex(u32),
    #[error("the whole plane has an empty complement")]
    EmptyComplement,
    #[error("padding radius {0} does not enclose the domain")]
    PaddingTooSmall(f64),
    #[error("contour is not a simple closed curve: {0}")]
    BadContour(String),
    #[error("point {0} lies on the contour")]
    PointOnContour(C64),
    #[error("winding sum {0} is not within tolerance of an integer")]
    WindingNotConverged(f64),
    #[error("clearance {clearance} cannot be achieved: {reason}")]
    ClearanceUnachievable { clearance: f64, reason: String },
}

fn cross(a: C64, b: C64) -> f64 {
    a.re * b.im - a.im * b.re
}

fn dot(a: C64, b: C64) -> f64 {
    a.re * b.re + a.im * b.im
}

/// Distance from `z` to the segment `[a, b]`.
pub fn segment_distance(z: C64, a: C64, b: C64) -> f64 {
    let d = b - a;
    let len2 = d.norm_sqr();
    if len2 == 0.0 {
        return (z - a).norm();
    }
    let t = (dot(z - a, d) / len2).clamp(0.0, 1.0);
    (z - (a + d * t)).norm()
}

/// Closed segments `[p1, p2]` and `[q1, q2]` share a point.
pub fn segments_intersect(p1: C64, p2: C64, q1: C64, q2: C64) -> bool {
    let d1 = cross(q2 - q1, p1 - q1);
    let d2 = cross(q2 - q1, p2 - q1);
    let d3 = cross(p2 - p1, q1 - p1);
    let d4 = cross(p2 - p1, q2 - p1);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0)) {
        return true;
    }
    let on = |a: C64, b: C64, p: C64, d: f64| {
        d == 0.0 && p.re >= a.re.min(b.re) && p.re <= a.re.max(b.re) && p.im >= a.im.min(b.im) && p.im <= a.im.max(b.im)
    };
    on(q1, q2, p1, d1) || on(q1, q2, p2, d2) || on(p1, p2, q1, d3) || on(p1, p2, q2, d4)
}

fn polygon_edges(vertices: &[C64]) -> impl Iterator<Item = (C64, C64)> + '_ {
    let n = vertices.len();
    (0..n).map(move |i| (vertices[i], vertices[(i + 1) % n]))
}

fn polygon_boundary_distance(z: C64, vertices: &[C64]) -> f64 {
    polygon_edges(vertices).map(|(a, b)| segment_distance(z, a, b)).fold(f64::INFINITY, f64::min)
}

/// Even-odd test for the open interior of a polygon.
fn polygon_interior_contains(z: C64, vertices: &[C64]) -> bool {
    let mut inside = false;
    for (a, b) in polygon_edges(vertices) {
        if (a.im > z.im) != (b.im > z.im) {
            let x = a.re + (z.im - a.im) / (b.im - a.im) * (b.re - a.re);
            if z.re < x {
                inside = !inside;
            }
        }
    }
    inside
}

fn polygon_is_simple(vertices: &[C64]) -> bool {
    let n = vertices.len();
    if n < 3 {
        return false;
    }
    for i in 0..n {
        for j in i + 1..n {
            let adjacent = j == i + 1 || (i == 0 && j == n - 1);
            if adjacent {
                continue;
            }
            let (p1, p2) = (vertices[i], vertices[(i + 1) % n]);
            let (q1, q2) = (vertices[j], vertices[(j + 1) % n]);
            if segments_intersect(p1, p2, q1, q2) {
                return false;
            }
        }
    }
    let area: f64 = polygon_edges(vertices).map(|(a, b)| cross(a, b)).sum();
    area.abs() > 0.0
}

fn polygon_is_convex(vertices: &[C64]) -> bool {
    let n = vertices.len();
    let mut sign = 0.0;
    for i in 0..n {
        let c = cross(vertices[(i + 1) % n] - vertices[i], vertices[(i + 2) % n] - vertices[(i + 1) % n]);
        if c != 0.0 {
            if sign != 0.0 && c.signum() != sign {
                return false;
            }
            sign = c.signum();
        }
    }
    true
}

/// Points along `[a, b]` with spacing at most `h`, endpoints included.
fn sample_segment(a: C64, b: C64, h: f64, out: &mut Vec<C64>) {
    let n = ((b - a).norm() / h).ceil().max(1.0) as usize;
    for i in 0..=n {
        out.push(a + (b - a) * (i as f64 / n as f64));
    }
}

fn sample_arc(center: C64, radius: f64, start: f64, sweep: f64, h: f64, closed: bool, out: &mut Vec<C64>) {
    let n = (radius * sweep / h).ceil().max(8.0) as usize;
    let last = if closed { n - 1 } else { n };
    for i in 0..=last {
        let t = start + sweep * i as f64 / n as f64;
        out.push(center + C64::from_polar(radius, t));
    }
}

/// Angle of `w` measured counterclockwise from `start`, in `[0, 2 pi)`.
fn angle_from(w: C64, start: f64) -> f64 {
    (w.arg() - start).rem_euclid(TAU)
}

/// Building block of compact sets. All primitives are closed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Primitive {
    Disk { center: C64, radius: f64 },
    Segment { a: C64, b: C64 },
    /// Circular arc from angle `start` counterclockwise through `sweep` radians.
    Arc { center: C64, radius: f64, start: f64, sweep: f64 },
    /// Closed region bounded by a simple polygon.
    Polygon { vertices: Vec<C64> },
    /// `{|z - center| <= radius} ∩ {Re(z conj(normal)) >= offset}` with unit `normal`.
    Cap { center: C64, radius: f64, normal: C64, offset: f64 },
}

impl Primitive {
    pub fn validate(&self) -> Result<(), GeometryError> {
        let bad = |m: &str| Err(GeometryError::InvalidPrimitive(m.to_string()));
        match self {
            Primitive::Disk { radius, .. } if !(*radius > 0.0 && radius.is_finite()) => bad("disk radius must be positive"),
            Primitive::Segment { a, b } if a == b => bad("segment endpoints coincide"),
            Primitive::Arc { radius, sweep, .. } if !(*radius > 0.0) || !(*sweep > 0.0 && *sweep < TAU) => {
                bad("arc needs positive radius and sweep in (0, 2 pi)")
            }
            Primitive::Polygon { vertices } if !polygon_is_simple(vertices) => bad("polygon is not simple"),
            Primitive::Cap { center, radius, normal, offset } => {
                if !(*radius > 0.0) || (normal.norm() - 1.0).abs() > 1e-12 {
                    return bad("cap needs positive radius and unit normal");
                }
                let d = offset - dot(*center, *normal);
                if d >= *radius {
                    return bad("cap is empty");
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// Chord and arc of a cap: `(chord_a, chord_b, arc_start, arc_sweep)`.
    /// A cap whose chord misses the disk degenerates to the full disk.
    fn cap_parts(center: C64, radius: f64, normal: C64, offset: f64) -> Option<(C64, C64, f64, f64)> {
        let d = offset - dot(center, normal);
        if d <= -radius {
            return None;
        }
        let half = (radius * radius - d * d).max(0.0).sqrt();
        let foot = center + normal * d;
        let tangent = normal * C64::i();
        let alpha = (d / radius).clamp(-1.0, 1.0).acos();
        Some((foot - tangent * half, foot + tangent * half, normal.arg() - alpha, 2.0 * alpha))
    }

    /// Exact Euclidean distance from `z` to the primitive.
    pub fn distance(&self, z: C64) -> f64 {
        match self {
            Primitive::Disk { center, radius } => ((z - center).norm() - radius).max(0.0),
            Primitive::Segment { a, b } => segment_distance(z, *a, *b),
            Primitive::Arc { center, radius, start, sweep } => {
                let w = z - center;
                if w.norm() > 0.0 && angle_from(w, *start) <= *sweep {
                    (w.norm() - radius).abs()
                } else {
                    let e0 = center + C64::from_polar(*radius, *start);
                    let e1 = center + C64::from_polar(*radius, start + sweep);
                    (z - e0).norm().min((z - e1).norm())
                }
            }
            Primitive::Polygon { vertices } => {
                if polygon_interior_contains(z, vertices) {
                    0.0
                } else {
                    polygon_boundary_distance(z, vertices)
                }
            }
            Primitive::Cap { center, radius, normal, offset } => {
                if (z - center).norm() <= *radius && dot(z, *normal) >= *offset {
                    return 0.0;
                }
                match Self::cap_parts(*center, *radius, *normal, *offset) {
                    None => ((z - center).norm() - radius).max(0.0),
                    Some((a, b, start, sweep)) => {
                        let arc = Primitive::Arc { center: *center, radius: *radius, start, sweep };
                        segment_distance(z, a, b).min(arc.distance(z))
                    }
                }
            }
        }
    }

    pub fn contains(&self, z: C64) -> bool {
        self.distance(z) <= 1e-12 * (1.0 + z.norm())
    }

    pub fn is_convex(&self) -> bool {
        match self {
            Primitive::Disk { .. } | Primitive::Segment { .. } | Primitive::Cap { .. } => true,
            Primitive::Arc { .. } => false,
            Primitive::Polygon { vertices } => polygon_is_convex(vertices),
        }
    }

    pub fn translate(&self, shift: C64) -> Primitive {
        match self {
            Primitive::Disk { center, radius } => Primitive::Disk { center: center + shift, radius: *radius },
            Primitive::Segment { a, b } => Primitive::Segment { a: a + shift, b: b + shift },
            Primitive::Arc { center, radius, start, sweep } => {
                Primitive::Arc { center: center + shift, radius: *radius, start: *start, sweep: *sweep }
            }
            Primitive::Polygon { vertices } => Primitive::Polygon { vertices: vertices.iter().map(|v| v + shift).collect() },
            Primitive::Cap { center, radius, normal, offset } => Primitive::Cap {
                center: center + shift,
                radius: *radius,
                normal: *normal,
                offset: offset + dot(shift, *normal),
            },
        }
    }

    /// Points on the topological boundary with spacing at most `h`. For
    /// primitives without interior this is the whole primitive.
    pub fn boundary_points(&self, h: f64) -> Vec<C64> {
        let mut out = Vec::new();
        match self {
            Primitive::Disk { center, radius } => sample_arc(*center, *radius, 0.0, TAU, h, true, &mut out),
            Primitive::Segment { a, b } => sample_segment(*a, *b, h, &mut out),
            Primitive::Arc { center, radius, start, sweep } => sample_arc(*center, *radius, *start, *sweep, h, false, &mut out),
            Primitive::Polygon { vertices } => {
                for (a, b) in polygon_edges(vertices) {
                    sample_segment(a, b, h, &mut out);
                    out.pop();
                }
            }
            Primitive::Cap { center, radius, normal, offset } => match Self::cap_parts(*center, *radius, *normal, *offset) {
                None => sample_arc(*center, *radius, 0.0, TAU, h, true, &mut out),
                Some((a, b, start, sweep)) => {
                    sample_segment(a, b, h, &mut out);
                    sample_arc(*center, *radius, start, sweep, h, false, &mut out);
                }
            },
        }
        out
    }

    /// Axis-aligned bounding box `(min, max)`.
    pub fn bounding_box(&self) -> (C64, C64) {
        let pts: Vec<C64> = match self {
            Primitive::Disk { center, radius } | Primitive::Cap { center, radius, .. } => {
                vec![center - C64::new(*radius, *radius), center + C64::new(*radius, *radius)]
            }
            other => other.boundary_points(other.rough_size() / 256.0),
        };
        bbox(&pts)
    }

    fn rough_size(&self) -> f64 {
        match self {
            Primitive::Disk { radius, .. } | Primitive::Arc { radius, .. } | Primitive::Cap { radius, .. } => 2.0 * radius,
            Primitive::Segment { a, b } => (b - a).norm(),
            Primitive::Polygon { vertices } => {
                let (lo, hi) = bbox(vertices);
                (hi - lo).norm()
            }
        }
    }

    fn has_interior(&self) -> bool {
        matches!(self, Primitive::Disk { .. } | Primitive::Polygon { .. } | Primitive::Cap { .. })
    }
}

fn bbox(pts: &[C64]) -> (C64, C64) {
    let mut lo = C64::new(f64::INFINITY, f64::INFINITY);
    let mut hi = C64::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
    for p in pts {
        lo.re = lo.re.min(p.re);
        lo.im = lo.im.min(p.im);
        hi.re = hi.re.max(p.re);
        hi.im = hi.im.max(p.im);
    }
    (lo, hi)
}

/// Largest pairwise distance in a point list.
fn point_diameter(pts: &[C64]) -> f64 {
    let mut best = 0.0f64;
    for (i, p) in pts.iter().enumerate() {
        for q in &pts[i + 1..] {
            best = best.max((p - q).norm());
        }
    }
    best
}

/// A compact set given as a union of primitives together with its samples.
#[derive(Clone, Debug)]
pub struct CompactSetSample {
    primitives: Vec<Primitive>,
    mesh: f64,
    samples: Vec<C64>,
    boundary: Vec<C64>,
    in_m: bool,
}

impl CompactSetSample {
    /// Samples the union at mesh `h` (default `diam / 128`).
    pub fn new(primitives: Vec<Primitive>, mesh: Option<f64>) -> Result<Self, GeometryError> {
        for p in &primitives {
            p.validate()?;
        }
        if primitives.is_empty() {
            return Ok(Self { primitives, mesh: mesh.unwrap_or(1.0), samples: vec![], boundary: vec![], in_m: true });
        }
        let coarse: Vec<C64> = primitives.iter().flat_map(|p| p.boundary_points(p.rough_size() / 64.0)).collect();
        let diam = point_diameter(&coarse);
        let h = match mesh {
            Some(h) if h > 0.0 => h,
            Some(h) => return Err(GeometryError::InvalidPrimitive(format!("mesh {h} must be positive"))),
            None => (diam / MESH_DIVISIONS).max(f64::MIN_POSITIVE),
        };
        let hb = h / BOUNDARY_OVERSAMPLING;
        let boundary: Vec<C64> = primitives.iter().flat_map(|p| p.boundary_points(hb)).collect();
        let mut samples = boundary.clone();
        for p in primitives.iter().filter(|p| p.has_interior()) {
            let (lo, hi) = p.bounding_box();
            let (i0, i1) = ((lo.re / h).floor() as i64, (hi.re / h).ceil() as i64);
            let (j0, j1) = ((lo.im / h).floor() as i64, (hi.im / h).ceil() as i64);
            for i in i0..=i1 {
                for j in j0..=j1 {
                    let z = C64::new(i as f64 * h, j as f64 * h);
                    if p.distance(z) == 0.0 {
                        samples.push(z);
                    }
                }
            }
        }
        let in_m = connected_complement(&primitives, hb);
        Ok(Self { primitives, mesh: h, samples, boundary, in_m })
    }

    pub fn empty() -> Self {
        Self { primitives: vec![], mesh: 1.0, samples: vec![], boundary: vec![], in_m: true }
    }

    pub fn primitives(&self) -> &[Primitive] {
        &self.primitives
    }

    pub fn mesh(&self) -> f64 {
        self.mesh
    }

    /// Interior grid points together with the boundary samples.
    pub fn samples(&self) -> &[C64] {
        &self.samples
    }

    /// Boundary samples at spacing `mesh / 4`; sup norms of functions
    /// holomorphic on the set are taken here.
    pub fn boundary(&self) -> &[C64] {
        &self.boundary
    }

    /// Whether the complement was certified connected.
    pub fn in_m(&self) -> bool {
        self.in_m
    }

    pub fn is_empty(&self) -> bool {
        self.primitives.is_empty()
    }

    pub fn distance(&self, z: C64) -> f64 {
        self.primitives.iter().map(|p| p.distance(z)).fold(f64::INFINITY, f64::min)
    }

    pub fn contains(&self, z: C64) -> bool {
        self.primitives.iter().any(|p| p.contains(z))
    }

    pub fn diameter(&self) -> f64 {
        point_diameter(&self.primitives.iter().flat_map(|p| p.boundary_points(p.rough_size() / 64.0)).collect::<Vec<_>>())
    }

    /// Largest modulus of `z - center` over the boundary samples.
    pub fn max_modulus_about(&self, center: C64) -> f64 {
        self.boundary.iter().map(|z| (z - center).norm()).fold(0.0, f64::max)
    }

    pub fn translate(&self, shift: C64) -> Self {
        Self {
            primitives: self.primitives.iter().map(|p| p.translate(shift)).collect(),
            mesh: self.mesh,
            samples: self.samples.iter().map(|z| z + shift).collect(),
            boundary: self.boundary.iter().map(|z| z + shift).collect(),
            in_m: self.in_m,
        }
    }

    /// Union keeping the samples of both parts; the finer mesh is reported.
    pub fn union(&self, other: &Self) -> Self {
        let mut primitives = self.primitives.clone();
        primitives.extend(other.primitives.iter().cloned());
        let mut samples = self.samples.clone();
        samples.extend_from_slice(&other.samples);
        let mut boundary = self.boundary.clone();
        boundary.extend_from_slice(&other.boundary);
        let mesh = self.mesh.min(other.mesh);
        let in_m = connected_complement(&primitives, mesh / BOUNDARY_OVERSAMPLING);
        Self { primitives, mesh, samples, boundary, in_m }
    }

    /// Minimum distance from the samples to `omega`, and whether it is at
    /// least one mesh cell.
    pub fn separation_from(&self, omega: &Region) -> (f64, bool) {
        let d = self.samples.iter().map(|&z| omega.distance(z)).fold(f64::INFINITY, f64::min);
        (d, d >= self.mesh * (1.0 - 1e-9))
    }
}

/// Sound certificate that a union of primitives does not separate the plane.
///
/// Each primitive is non-separating. Non-convex primitives must be disjoint
/// from the rest; convex ones may meet provided their intersection graph is a
/// forest, so that every primitive added along the forest meets the union in
/// one convex piece. Near contacts within `tol` count as intersections.
fn connected_complement(primitives: &[Primitive], tol: f64) -> bool {
    let n = primitives.len();
    let samples: Vec<Vec<C64>> = primitives.iter().map(|p| p.boundary_points(tol)).collect();
    let touches = |i: usize, j: usize| {
        samples[i].iter().any(|&z| primitives[j].distance(z) <= tol) || samples[j].iter().any(|&z| primitives[i].distance(z) <= tol)
    };
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for i in 0..n {
        for j in i + 1..n {
            if !touches(i, j) {
                continue;
            }
            if !primitives[i].is_convex() || !primitives[j].is_convex() {
                return false;
            }
            let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
            if ri == rj {
                return false;
            }
            parent[ri] = rj;
        }
    }
    true
}

/// Open subsets of the plane.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Region {
    Plane,
    Disk { center: C64, radius: f64 },
    /// `{Re(z conj(normal)) < offset}` with unit `normal`.
    HalfPlane { normal: C64, offset: f64 },
    /// Open interior of a simple polygon.
    Polygon { vertices: Vec<C64> },
    /// Points closer than `radius` to the union of `primitives`.
    Neighborhood { primitives: Vec<Primitive>, radius: f64 },
    Union(Vec<Region>),
}

impl Region {
    pub fn contains(&self, z: C64) -> bool {
        match self {
            Region::Plane => true,
            Region::Disk { center, radius } => (z - center).norm() < *radius,
            Region::HalfPlane { normal, offset } => dot(z, *normal) < *offset,
            Region::Polygon { vertices } => polygon_interior_contains(z, vertices) && polygon_boundary_distance(z, vertices) > 0.0,
            Region::Neighborhood { primitives, radius } => primitives.iter().any(|p| p.distance(z) < *radius),
            Region::Union(parts) => parts.iter().any(|r| r.contains(z)),
        }
    }

    /// Euclidean distance from `z` to the region (zero inside or on the boundary).
    pub fn distance(&self, z: C64) -> f64 {
        match self {
            Region::Plane => 0.0,
            Region::Disk { center, radius } => ((z - center).norm() - radius).max(0.0),
            Region::HalfPlane { normal, offset } => (dot(z, *normal) - offset).max(0.0),
            Region::Polygon { vertices } => {
                if polygon_interior_contains(z, vertices) {
                    0.0
                } else {
                    polygon_boundary_distance(z, vertices)
                }
            }
            Region::Neighborhood { primitives, radius } => {
                (primitives.iter().map(|p| p.distance(z)).fold(f64::INFINITY, f64::min) - radius).max(0.0)
            }
            Region::Union(parts) => parts.iter().map(|r| r.distance(z)).fold(f64::INFINITY, f64::min),
        }
    }

    /// Points of the boundary with spacing at most `h`; unbounded boundaries
    /// are cut off outside `|z| <= window`.
    pub fn boundary_points(&self, h: f64, window: f64) -> Vec<C64> {
        let mut out = Vec::new();
        match self {
            Region::Plane => {}
            Region::Disk { center, radius } => sample_arc(*center, *radius, 0.0, TAU, h, true, &mut out),
            Region::HalfPlane { normal, offset } => {
                let foot = normal * *offset;
                let t = normal * C64::i();
                sample_segment(foot - t * window, foot + t * window, h, &mut out);
            }
            Region::Polygon { vertices } => {
                for (a, b) in polygon_edges(vertices) {
                    sample_segment(a, b, h, &mut out);
                    out.pop();
                }
            }
            Region::Neighborhood { primitives, radius } => {
                for p in primitives {
                    offset_points(p, *radius, h, &mut out);
                }
                let tol = 1e-9 * radius.max(1.0);
                out.retain(|&z| primitives.iter().all(|p| p.distance(z) >= radius - tol));
            }
            Region::Union(parts) => {
                for (i, r) in parts.iter().enumerate() {
                    let pts = r.boundary_points(h, window);
                    out.extend(pts.into_iter().filter(|&z| parts.iter().enumerate().all(|(j, s)| j == i || !s.contains(z))));
                }
            }
        }
        out
    }

    pub fn translate(&self, shift: C64) -> Region {
        match self {
            Region::Plane => Region::Plane,
            Region::Disk { center, radius } => Region::Disk { center: center + shift, radius: *radius },
            Region::HalfPlane { normal, offset } => Region::HalfPlane { normal: *normal, offset: offset + dot(shift, *normal) },
            Region::Polygon { vertices } => Region::Polygon { vertices: vertices.iter().map(|v| v + shift).collect() },
            Region::Neighborhood { primitives, radius } => {
                Region::Neighborhood { primitives: primitives.iter().map(|p| p.translate(shift)).collect(), radius: *radius }
            }
            Region::Union(parts) => Region::Union(parts.iter().map(|r| r.translate(shift)).collect()),
        }
    }
}

/// Points at distance exactly `r` from the primitive, spacing at most `h`.
fn offset_points(p: &Primitive, r: f64, h: f64, out: &mut Vec<C64>) {
    match p {
        Primitive::Disk { center, radius } => sample_arc(*center, radius + r, 0.0, TAU, h, true, out),
        Primitive::Segment { a, b } => {
            let n = (b - a) / (b - a).norm() * C64::new(0.0, -1.0);
            sample_segment(a + n * r, b + n * r, h, out);
            sample_segment(b - n * r, a - n * r, h, out);
            sample_arc(*b, r, n.arg(), PI, h, false, out);
            sample_arc(*a, r, (-n).arg(), PI, h, false, out);
        }
        other => {
            // Offset every boundary point in all directions; the caller
            // keeps only the points at the exact offset distance.
            for z in other.boundary_points(h) {
                sample_arc(z, r, 0.0, TAU, h, true, out);
            }
        }
    }
}

/// An open simply connected domain with a base point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DomainSpec {
    shape: Region,
    zeta0: C64,
}

impl DomainSpec {
    pub fn new(shape: Region, zeta0: C64) -> Result<Self, GeometryError> {
        match &shape {
            Region::Disk { radius, .. } if !(*radius > 0.0) => {
                return Err(GeometryError::InvalidDomain("disk radius must be positive".into()))
            }
            Region::HalfPlane { normal, .. } if (normal.norm() - 1.0).abs() > 1e-12 => {
                return Err(GeometryError::InvalidDomain("half-plane normal must be a unit vector".into()))
            }
            Region::Polygon { vertices } if !polygon_is_simple(vertices) => {
                return Err(GeometryError::InvalidDomain("polygon is not simple".into()))
            }
            Region::Neighborhood { .. } | Region::Union(_) => {
                return Err(GeometryError::InvalidDomain("only disks, half-planes, polygons or the plane".into()))
            }
            _ => {}
        }
        let d = Self::boundary_distance(&shape, zeta0);
        if !(d > 0.0) {
            return Err(GeometryError::BasePointNotInterior);
        }
        Ok(Self { shape, zeta0 })
    }

    fn boundary_distance(shape: &Region, z: C64) -> f64 {
        if !shape.contains(z) {
            return 0.0;
        }
        match shape {
            Region::Plane => f64::INFINITY,
            Region::Disk { center, radius } => radius - (z - center).norm(),
            Region::HalfPlane { normal, offset } => offset - dot(z, *normal),
            Region::Polygon { vertices } => polygon_boundary_distance(z, vertices),
            _ => 0.0,
        }
    }

    pub fn shape(&self) -> &Region {
        &self.shape
    }

    pub fn zeta0(&self) -> C64 {
        self.zeta0
    }

    pub fn is_bounded(&self) -> bool {
        matches!(self.shape, Region::Disk { .. } | Region::Polygon { .. })
    }

    /// Radius of the smallest origin-centred disk containing the domain.
    fn outer_radius(&self) -> f64 {
        match &self.shape {
            Region::Disk { center, radius } => center.norm() + radius,
            Region::Polygon { vertices } => vertices.iter().map(|v| v.norm()).fold(0.0, f64::max),
            _ => f64::INFINITY,
        }
    }
}

/// The `k`-th exhausting compact set of the complement.
///
/// Bounded domains inside `D(0, N)` give `[N, N + k]`. Unbounded domains
/// give the part of the complement at distance at least one mesh cell from
/// the domain, cut to `D(zeta0, k)`; the result may be empty for small `k`.
pub fn make_exhaustion(omega: &DomainSpec, k: u32, n_pad: Option<u32>, mesh: Option<f64>) -> Result<CompactSetSample, GeometryError> {
    if k == 0 {
        return Err(GeometryError::BadExhaustionIndex(k));
    }
    if omega.is_bounded() {
        let outer = omega.outer_radius();
        let n = match n_pad {
            Some(n) if (n as f64) > outer => n as f64,
            Some(n) => return Err(GeometryError::PaddingTooSmall(n as f64)),
            None => (outer + 1.0).floor(),
        };
        let seg = Primitive::Segment { a: C64::new(n, 0.0), b: C64::new(n + k as f64, 0.0) };
        return CompactSetSample::new(vec![seg], mesh);
    }
    match omega.shape() {
        Region::HalfPlane { normal, offset } => {
            let radius = k as f64;
            let h = mesh.unwrap_or(2.0 * radius / MESH_DIVISIONS);
            let cap = Primitive::Cap { center: omega.zeta0(), radius, normal: *normal, offset: offset + h };
            if cap.validate().is_err() {
                return Ok(CompactSetSample { mesh: h, ..CompactSetSample::empty() });
            }
            CompactSetSample::new(vec![cap], Some(h))
        }
        _ => Err(GeometryError::EmptyComplement),
    }
}

/// One node of a discretised contour: the point and `gamma'(t) dt`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Node {
    pub z: C64,
    pub dz: C64,
}

/// A positively oriented closed curve.
#[derive(Clone, Debug, PartialEq)]
pub enum Loop {
    Circle { center: C64, radius: f64 },
    /// Ellipse with semi-axes `a >= b`, major axis at angle `angle`.
    Ellipse { center: C64, a: f64, b: f64, angle: f64 },
    /// Values and derivatives at equispaced parameters on `[0, 1)`.
    Sampled { points: Vec<C64>, derivs: Vec<C64> },
}

impl Loop {
    /// Builds a sampled loop after checking it is a smooth, simple,
    /// positively oriented closed curve.
    pub fn sampled(points: Vec<C64>, derivs: Vec<C64>) -> Result<Self, GeometryError> {
        let n = points.len();
        if n < 16 || derivs.len() != n {
            return Err(GeometryError::BadContour("need at least 16 nodes with matching derivatives".into()));
        }
        for k in 0..n {
            let fd = (points[(k + 1) % n] - points[(k + n - 1) % n]) * (n as f64 / 2.0);
            if (fd - derivs[k]).norm() > 0.1 * derivs[k].norm().max(1e-300) {
                return Err(GeometryError::BadContour(format!("derivative mismatch at node {k}")));
            }
        }
        if !polygon_is_simple(&points) {
            return Err(GeometryError::BadContour("curve intersects itself".into()));
        }
        let area: f64 = polygon_edges(&points).map(|(a, b)| cross(a, b)).sum();
        if area <= 0.0 {
            return Err(GeometryError::BadContour("curve is not positively oriented".into()));
        }
        Ok(Loop::Sampled { points, derivs })
    }

    /// `n` trapezoidal nodes; sampled loops ignore `n` unless it divides
    /// their node count, in which case they are subsampled.
    pub fn nodes(&self, n: usize) -> Vec<Node> {
        match self {
            Loop::Circle { center, radius } => (0..n)
                .map(|k| {
                    let t = TAU * k as f64 / n as f64;
                    let e = C64::from_polar(1.0, t);
                    Node { z: center + e * radius, dz: e * C64::i() * (radius * TAU / n as f64) }
                })
                .collect(),
            Loop::Ellipse { center, a, b, angle } => {
                let rot = C64::from_polar(1.0, *angle);
                (0..n)
                    .map(|k| {
                        let t = TAU * k as f64 / n as f64;
                        let (s, c) = t.sin_cos();
                        Node { z: center + rot * C64::new(a * c, b * s), dz: rot * C64::new(-a * s, b * c) * (TAU / n as f64) }
                    })
                    .collect()
            }
            Loop::Sampled { points, derivs } => {
                let m = points.len();
                let step = if n > 0 && n <= m && m % n == 0 { m / n } else { 1 };
                let count = m / step;
                (0..count)
                    .map(|k| Node { z: points[k * step], dz: derivs[k * step] / count as f64 })
                    .collect()
            }
        }
    }

    /// Whether [`nodes`](Self::nodes) can produce arbitrarily many nodes.
    pub fn refinable(&self) -> bool {
        !matches!(self, Loop::Sampled { .. })
    }

    pub fn native_nodes(&self) -> Option<usize> {
        match self {
            Loop::Sampled { points, .. } => Some(points.len()),
            _ => None,
        }
    }
}

/// A union of disjoint positively oriented loops, each discretised with
/// `nodes` trapezoidal nodes.
#[derive(Clone, Debug, PartialEq)]
pub struct Contour {
    loops: Vec<Loop>,
    nodes: usize,
}

impl Contour {
    pub fn new(loops: Vec<Loop>, nodes: usize) -> Result<Self, GeometryError> {
        if loops.is_empty() {
            return Err(GeometryError::BadContour("no loops".into()));
        }
        let nodes = loops.iter().filter_map(Loop::native_nodes).min().unwrap_or(nodes);
        Ok(Self { loops, nodes })
    }

    pub fn loops(&self) -> &[Loop] {
        &self.loops
    }

    pub fn node_count(&self) -> usize {
        self.nodes
    }

    pub fn refinable(&self) -> bool {
        self.loops.iter().all(Loop::refinable)
    }

    /// The same curves with `n` nodes per loop.
    pub fn with_nodes(&self, n: usize) -> Self {
        Self { loops: self.loops.clone(), nodes: n }
    }

    pub fn nodes(&self) -> Vec<Node> {
        self.loops.iter().flat_map(|l| l.nodes(self.nodes)).collect()
    }

    /// Trapezoidal approximation of the total length.
    pub fn length(&self) -> f64 {
        self.nodes().iter().map(|n| n.dz.norm()).sum()
    }

    /// Distance from `z` to the polygon through the nodes.
    fn polyline_distance(&self, z: C64) -> f64 {
        self.loops
            .iter()
            .map(|l| {
                let pts: Vec<C64> = l.nodes(self.nodes).iter().map(|n| n.z).collect();
                polygon_boundary_distance(z, &pts)
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// Raw trapezoidal value of `(1 / 2 pi i) sum dz / (z_k - z)`.
    pub fn winding_sum(&self, z: C64) -> C64 {
        let s: C64 = self.nodes().iter().map(|n| n.dz / (n.z - z)).sum();
        s / C64::new(0.0, TAU)
    }

    pub fn winding_number(&self, z: C64) -> Result<i64, GeometryError> {
        if self.polyline_distance(z) <= 1e-9 * self.length() {
            return Err(GeometryError::PointOnContour(z));
        }
        let w = self.winding_sum(z);
        let k = w.re.round();
        if (w - C64::new(k, 0.0)).norm() > WINDING_RESIDUAL_MAX {
            return Err(GeometryError::WindingNotConverged(w.re));
        }
        Ok(k as i64)
    }

    /// Minimum distance from the nodes to a compact set.
    pub fn distance_to(&self, k: &CompactSetSample) -> f64 {
        self.nodes().iter().map(|n| k.distance(n.z)).fold(f64::INFINITY, f64::min)
    }
}

/// Builds a contour in `outer \ inner` winding once around `inner`.
///
/// Disks get concentric circles and segments get confocal ellipses, each
/// placed halfway between the primitive and the boundary of `outer`.
/// Primitives whose loops would interfere are grouped under one enclosing
/// circle. Fails when a loop cannot keep `clearance` from both sides.
pub fn make_contour(inner: &CompactSetSample, outer: &Region, clearance: f64) -> Result<Contour, GeometryError> {
    let fail = |reason: String| GeometryError::ClearanceUnachievable { clearance, reason };
    if inner.is_empty() {
        return Err(fail("empty set".into()));
    }
    if let Some(z) = inner.samples().iter().find(|&&z| !outer.contains(z)) {
        return Err(fail(format!("sample {z} lies outside the neighbourhood")));
    }
    let h = inner.mesh() / BOUNDARY_OVERSAMPLING;
    let window = 4.0 * (inner.max_modulus_about(C64::new(0.0, 0.0)) + 1.0);
    let wall = outer.boundary_points(h, window);

    let mut clusters: Vec<Vec<usize>> = (0..inner.primitives().len()).map(|i| vec![i]).collect();
    loop {
        let loops: Vec<Loop> =
            clusters.iter().map(|c| cluster_loop(inner.primitives(), c, &wall, clearance)).collect::<Result<_, _>>().map_err(fail)?;
        let trial: Vec<Contour> = loops.iter().map(|l| Contour::new(vec![l.clone()], 512).expect("loop")).collect();
        let mut merge = None;
        'outer: for (i, ci) in trial.iter().enumerate() {
            for (j, cj) in clusters.iter().enumerate() {
                if i == j {
                    continue;
                }
                let pts: Vec<C64> = cj.iter().flat_map(|&p| inner.primitives()[p].boundary_points(h * 4.0)).collect();
                let hits = pts.iter().any(|&z| ci.winding_sum(z).norm() > 0.5 || ci.polyline_distance(z) < clearance);
                let crosses = trial[j].nodes().iter().any(|n| ci.winding_sum(n.z).norm() > 0.5);
                if hits || crosses {
                    merge = Some((i.min(j), i.max(j)));
                    break 'outer;
                }
            }
        }
        match merge {
            Some((i, j)) => {
                let moved = clusters.remove(j);
                clusters[i].extend(moved);
            }
            None => {
                let mut contour = Contour::new(loops, 256)?;
                let d = contour.distance_to(inner);
                let n = (4.0 * contour.length() / d).max(256.0) as usize;
                contour = contour.with_nodes(n.next_power_of_two());
                validate_contour(&contour, inner, &wall).map_err(fail)?;
                return Ok(contour);
            }
        }
    }
}

fn cluster_loop(prims: &[Primitive], cluster: &[usize], wall: &[C64], clearance: f64) -> Result<Loop, String> {
    let margin = |dist: &dyn Fn(C64) -> f64| wall.iter().map(|&z| dist(z)).fold(f64::INFINITY, f64::min);
    if let [single] = cluster {
        let p = &prims[*single];
        let m = margin(&|z| p.distance(z));
        let m = if m.is_finite() { m } else { 4.0 * clearance };
        let off = m / 2.0;
        if off < clearance {
            return Err(format!("gap {m:.3e} around a primitive is below twice the clearance"));
        }
        match p {
            Primitive::Disk { center, radius } => return Ok(Loop::Circle { center: *center, radius: radius + off }),
            Primitive::Segment { a, b } => {
                let half = (b - a).norm() / 2.0;
                return Ok(Loop::Ellipse { center: (a + b) / 2.0, a: (half * half + off * off).sqrt(), b: off, angle: (b - a).arg() });
            }
            _ => {}
        }
    }
    let pts: Vec<C64> = cluster.iter().flat_map(|&i| prims[i].boundary_points(prims[i].rough_size() / 256.0)).collect();
    let (lo, hi) = bbox(&pts);
    let center = (lo + hi) / 2.0;
    let r = pts.iter().map(|z| (z - center).norm()).fold(0.0, f64::max);
    let disk = Primitive::Disk { center, radius: r };
    let m = margin(&|z| disk.distance(z));
    let m = if m.is_finite() { m } else { 4.0 * clearance };
    if m / 2.0 < clearance {
        return Err(format!("enclosing circle leaves a gap of {m:.3e}"));
    }
    Ok(Loop::Circle { center, radius: r + m / 2.0 })
}

fn validate_contour(contour: &Contour, inner: &CompactSetSample, wall: &[C64]) -> Result<(), String> {
    for z in inner.samples() {
        match contour.winding_number(*z) {
            Ok(1) => {}
            Ok(k) => return Err(format!("winding {k} at set point {z}")),
            Err(e) => return Err(e.to_string()),
        }
    }
    for z in wall {
        match contour.winding_number(*z) {
            Ok(0) => {}
            Ok(k) => return Err(format!("winding {k} at boundary point {z}")),
            Err(e) => return Err(e.to_string()),
        }
    }
    Ok(())
}
