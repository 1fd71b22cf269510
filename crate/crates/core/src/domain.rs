//! Polygonal domains with holes: loading, validation, point location and
//! the range of directions that keep a point inside the domain.
//!
//! Vertices are numbered globally, outer ring first, then each hole in
//! input order. Edge `i` runs from vertex `i` to its ring successor, and
//! rings are oriented so the domain always lies to the left of an edge.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{orient, project_param, segment_distance, side_distance, Angle, Arc, DirectionRange, Point};
use crate::scalar::Tolerance;

type P = Point<f64>;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PointLocation {
    Vertex {
        index: usize,
    },
    /// Strictly inside edge `edge`; `param` in `(0, 1)` from its start vertex.
    Edge {
        edge: usize,
        param: f64,
    },
    Interior,
    Outside,
}

impl PointLocation {
    pub fn is_outside(&self) -> bool {
        matches!(self, PointLocation::Outside)
    }

    /// Dimension of the stratum: 0 vertex, 1 edge, 2 interior.
    pub fn dim(&self) -> usize {
        match self {
            PointLocation::Vertex { .. } => 0,
            PointLocation::Edge { .. } => 1,
            PointLocation::Interior | PointLocation::Outside => 2,
        }
    }
}

/// Violations of the general-position assumption.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct GeneralPositionReport {
    pub collinear_triples: Vec<[usize; 3]>,
    /// Vertex pairs joined by more than one shortest path. Filled in by
    /// [`crate::geodesic::general_position_report`].
    pub multi_path_pairs: Vec<[usize; 2]>,
    /// Whether the multi-path check has run.
    pub paths_checked: bool,
}

impl GeneralPositionReport {
    pub fn is_clean(&self) -> bool {
        self.collinear_triples.is_empty() && self.multi_path_pairs.is_empty()
    }

    pub fn violation_count(&self) -> usize {
        self.collinear_triples.len() + self.multi_path_pairs.len()
    }
}

#[derive(Serialize, Deserialize)]
struct DomainDoc {
    outer: Vec<[f64; 2]>,
    #[serde(default)]
    holes: Vec<Vec<[f64; 2]>>,
}

#[derive(Clone, Debug)]
pub struct PolygonalDomain {
    vertices: Vec<P>,
    /// `ring_start[k]..ring_start[k + 1]` are the vertices of ring `k`.
    ring_start: Vec<usize>,
    ring_of: Vec<usize>,
    eps: f64,
    tol: Tolerance<f64>,
    collinear: Vec<[usize; 3]>,
}

impl PolygonalDomain {
    /// Validates and orients the rings. The first ring is the outer boundary.
    pub fn new(outer: Vec<P>, holes: Vec<Vec<P>>) -> Result<Self> {
        Self::with_tolerance(outer, holes, Tolerance::default())
    }

    pub fn with_tolerance(outer: Vec<P>, holes: Vec<Vec<P>>, tol: Tolerance<f64>) -> Result<Self> {
        let mut rings = Vec::with_capacity(holes.len() + 1);
        rings.push(outer);
        rings.extend(holes);
        for (k, ring) in rings.iter().enumerate() {
            if ring.len() < 3 {
                return Err(Error::Validation(format!("ring {k} has fewer than 3 vertices")));
            }
            if let Some(p) = ring.iter().find(|p| !p.is_finite()) {
                return Err(Error::Validation(format!("ring {k} has non-finite vertex {p}")));
            }
        }
        let (lo, hi) = bbox(rings.iter().flatten().copied());
        let eps = tol.len_at(lo.dist(hi));
        for (k, ring) in rings.iter_mut().enumerate() {
            let area = signed_area(ring);
            if area.abs() <= eps * eps {
                return Err(Error::Validation(format!("ring {k} has zero area")));
            }
            let want_ccw = k == 0;
            if (area > 0.0) != want_ccw {
                ring.reverse();
            }
        }

        let mut vertices = Vec::new();
        let mut ring_start = Vec::new();
        let mut ring_of = Vec::new();
        for (k, ring) in rings.iter().enumerate() {
            ring_start.push(vertices.len());
            vertices.extend_from_slice(ring);
            ring_of.extend(std::iter::repeat_n(k, ring.len()));
        }
        ring_start.push(vertices.len());
        let mut dom = PolygonalDomain {
            vertices,
            ring_start,
            ring_of,
            eps,
            tol,
            collinear: Vec::new(),
        };
        dom.validate()?;
        dom.collinear = dom.find_collinear_triples();
        Ok(dom)
    }

    fn validate(&self) -> Result<()> {
        let n = self.n();
        for i in 0..n {
            for j in i + 1..n {
                if self.vertices[i].dist(self.vertices[j]) <= self.eps {
                    return Err(Error::Validation(format!(
                        "repeated vertex {} (indices {i} and {j})",
                        self.vertices[i]
                    )));
                }
            }
        }
        // Any two edges may only share their common endpoint when adjacent.
        for e in 0..n {
            let (a, b) = self.edge(e);
            for f in e + 1..n {
                let (c, d) = self.edge(f);
                let adjacent = self.next(e) == f || self.next(f) == e;
                if adjacent {
                    // Adjacent edges must not fold back onto each other.
                    let (shared, x, y) = if self.next(e) == f { (b, a, d) } else { (a, b, c) };
                    let ux = x - shared;
                    let uy = y - shared;
                    if ux.cross(uy).abs() <= self.eps * ux.norm().max(uy.norm()) && ux.dot(uy) > 0.0 {
                        return Err(Error::Validation(format!("edges {e} and {f} overlap")));
                    }
                    continue;
                }
                if segments_touch(a, b, c, d, self.eps) {
                    let msg = if self.ring_of[e] == self.ring_of[f] {
                        format!("ring {} is self-intersecting (edges {e} and {f})", self.ring_of[e])
                    } else {
                        format!("rings {} and {} intersect", self.ring_of[e], self.ring_of[f])
                    };
                    return Err(Error::Validation(msg));
                }
            }
        }
        // With no crossings, nesting is decided by one vertex per ring.
        let outer = self.ring(0);
        for k in 1..self.h() + 1 {
            let p = self.ring(k)[0];
            if !point_in_ring(outer, p) {
                return Err(Error::Validation(format!("hole {} lies outside the outer ring", k - 1)));
            }
            for m in 1..self.h() + 1 {
                if m != k && point_in_ring(self.ring(m), p) {
                    return Err(Error::Validation(format!("holes {} and {} are nested", m - 1, k - 1)));
                }
            }
        }
        Ok(())
    }

    fn find_collinear_triples(&self) -> Vec<[usize; 3]> {
        let n = self.n();
        let mut out = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    let (a, b, c) = (self.vertices[i], self.vertices[j], self.vertices[k]);
                    // Height of the triangle over its longest side.
                    let longest = a.dist(b).max(b.dist(c)).max(c.dist(a));
                    if orient(a, b, c).abs() <= self.eps * longest {
                        out.push([i, j, k]);
                    }
                }
            }
        }
        out
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: DomainDoc = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let conv = |r: Vec<[f64; 2]>| r.into_iter().map(|[x, y]| P::new(x, y)).collect::<Vec<_>>();
        Self::new(conv(doc.outer), doc.holes.into_iter().map(conv).collect())
    }

    pub fn to_json(&self) -> String {
        let conv = |r: &[P]| r.iter().map(|p| [p.x, p.y]).collect::<Vec<_>>();
        let doc = DomainDoc {
            outer: conv(self.ring(0)),
            holes: (1..=self.h()).map(|k| conv(self.ring(k))).collect(),
        };
        serde_json::to_string(&doc).expect("domain serializes")
    }

    /// Total vertex count.
    pub fn n(&self) -> usize {
        self.vertices.len()
    }

    /// Hole count.
    pub fn h(&self) -> usize {
        self.ring_start.len() - 2
    }

    pub fn vertices(&self) -> &[P] {
        &self.vertices
    }

    pub fn vertex(&self, i: usize) -> P {
        self.vertices[i]
    }

    pub fn ring(&self, k: usize) -> &[P] {
        &self.vertices[self.ring_start[k]..self.ring_start[k + 1]]
    }

    pub fn ring_count(&self) -> usize {
        self.ring_start.len() - 1
    }

    pub fn ring_of(&self, i: usize) -> usize {
        self.ring_of[i]
    }

    pub fn next(&self, i: usize) -> usize {
        let k = self.ring_of[i];
        if i + 1 == self.ring_start[k + 1] {
            self.ring_start[k]
        } else {
            i + 1
        }
    }

    pub fn prev(&self, i: usize) -> usize {
        let k = self.ring_of[i];
        if i == self.ring_start[k] {
            self.ring_start[k + 1] - 1
        } else {
            i - 1
        }
    }

    /// Endpoints of edge `e`; the domain is on the left.
    pub fn edge(&self, e: usize) -> (P, P) {
        (self.vertices[e], self.vertices[self.next(e)])
    }

    /// Length tolerance scaled to the domain size.
    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn tolerance(&self) -> &Tolerance<f64> {
        &self.tol
    }

    pub fn bbox(&self) -> (P, P) {
        bbox(self.vertices.iter().copied())
    }

    pub fn diameter(&self) -> f64 {
        let (lo, hi) = self.bbox();
        lo.dist(hi)
    }

    /// Whether vertex `i` is reflex as seen from the domain.
    pub fn is_reflex(&self, i: usize) -> bool {
        orient(self.vertex(self.prev(i)), self.vertex(i), self.vertex(self.next(i))) < 0.0
    }

    pub fn classify(&self, p: P) -> PointLocation {
        if !p.is_finite() {
            return PointLocation::Outside;
        }
        if let Some(i) = (0..self.n()).find(|&i| self.vertices[i].dist(p) <= self.eps) {
            return PointLocation::Vertex { index: i };
        }
        for e in 0..self.n() {
            let (a, b) = self.edge(e);
            if segment_distance(a, b, p) <= self.eps {
                let t = project_param(a, b, p);
                return PointLocation::Edge { edge: e, param: t };
            }
        }
        if !point_in_ring(self.ring(0), p) {
            return PointLocation::Outside;
        }
        if (1..=self.h()).any(|k| point_in_ring(self.ring(k), p)) {
            return PointLocation::Outside;
        }
        PointLocation::Interior
    }

    pub fn contains(&self, p: P) -> bool {
        !self.classify(p).is_outside()
    }

    pub fn require_inside(&self, p: P) -> Result<PointLocation> {
        let loc = self.classify(p);
        if loc.is_outside() {
            Err(Error::OutsideDomain(p.to_string()))
        } else {
            Ok(loc)
        }
    }

    /// Directions along which `p` can move and stay in the domain.
    pub fn free_direction_range(&self, p: P) -> Result<DirectionRange<f64>> {
        Ok(match self.require_inside(p)? {
            PointLocation::Interior | PointLocation::Outside => DirectionRange::full(),
            PointLocation::Edge { edge, .. } => {
                let (a, b) = self.edge(edge);
                let th = Angle::new((b - a).y.atan2((b - a).x)).value();
                DirectionRange::from_arc(Arc::closed(th, th + std::f64::consts::PI))
            }
            PointLocation::Vertex { index } => self.vertex_wedge(index),
        })
    }

    /// Closed wedge at vertex `i` from the outgoing edge counterclockwise to
    /// the incoming edge.
    pub fn vertex_wedge(&self, i: usize) -> DirectionRange<f64> {
        let v = self.vertex(i);
        let out = self.vertex(self.next(i)) - v;
        let inc = self.vertex(self.prev(i)) - v;
        let a0 = out.y.atan2(out.x);
        let a1 = inc.y.atan2(inc.x);
        let size = crate::geom::normalize_angle(a1 - a0);
        DirectionRange::from_arc(Arc::closed(a0, a0 + size))
    }

    /// Collinear triples only; see [`crate::geodesic::general_position_report`]
    /// for the full check.
    pub fn check_general_position(&self) -> GeneralPositionReport {
        GeneralPositionReport {
            collinear_triples: self.collinear.clone(),
            multi_path_pairs: Vec::new(),
            paths_checked: false,
        }
    }

    /// Copy with every vertex moved by `f`; validation is rerun.
    pub fn map_vertices(&self, mut f: impl FnMut(usize, P) -> P) -> Result<Self> {
        let rings: Vec<Vec<P>> = (0..self.ring_count())
            .map(|k| {
                (self.ring_start[k]..self.ring_start[k + 1])
                    .map(|i| f(i, self.vertices[i]))
                    .collect()
            })
            .collect();
        let mut it = rings.into_iter();
        let outer = it.next().expect("outer ring");
        Self::with_tolerance(outer, it.collect(), self.tol)
    }
}

pub fn signed_area(ring: &[P]) -> f64 {
    let n = ring.len();
    (0..n).map(|i| ring[i].cross(ring[(i + 1) % n])).sum::<f64>() * 0.5
}

fn bbox(points: impl Iterator<Item = P>) -> (P, P) {
    points.fold(
        (
            P::new(f64::INFINITY, f64::INFINITY),
            P::new(f64::NEG_INFINITY, f64::NEG_INFINITY),
        ),
        |(lo, hi), p| {
            (
                P::new(lo.x.min(p.x), lo.y.min(p.y)),
                P::new(hi.x.max(p.x), hi.y.max(p.y)),
            )
        },
    )
}

/// Even-odd test; boundary points give an unspecified answer.
pub fn point_in_ring(ring: &[P], p: P) -> bool {
    let n = ring.len();
    let mut inside = false;
    for i in 0..n {
        let a = ring[i];
        let b = ring[(i + 1) % n];
        if (a.y > p.y) != (b.y > p.y) {
            let x = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
            if x > p.x {
                inside = !inside;
            }
        }
    }
    inside
}

/// Closed segments `ab` and `cd` share at least one point (within `eps`).
fn segments_touch(a: P, b: P, c: P, d: P, eps: f64) -> bool {
    if segment_distance(a, b, c) <= eps
        || segment_distance(a, b, d) <= eps
        || segment_distance(c, d, a) <= eps
        || segment_distance(c, d, b) <= eps
    {
        return true;
    }
    let d1 = side_distance(a, b, c);
    let d2 = side_distance(a, b, d);
    let d3 = side_distance(c, d, a);
    let d4 = side_distance(c, d, b);
    (d1 > 0.0) != (d2 > 0.0) && (d3 > 0.0) != (d4 > 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    pub(crate) fn d1() -> PolygonalDomain {
        PolygonalDomain::from_json(r#"{"outer":[[0,0],[10,0],[10,10],[0,10]],"holes":[[[4,4],[6,4],[6,6],[4,6]]]}"#)
            .unwrap()
    }

    fn square() -> PolygonalDomain {
        PolygonalDomain::from_json(r#"{"outer":[[0,0],[1,0],[1,1],[0,1]],"holes":[]}"#).unwrap()
    }

    #[test]
    fn load_examples() {
        let s = square();
        assert_eq!((s.n(), s.h()), (4, 0));
        let d = d1();
        assert_eq!((d.n(), d.h()), (8, 1));
        let bad = PolygonalDomain::from_json(r#"{"outer":[[0,0],[1,0],[0,1],[1,1]]}"#);
        assert!(matches!(bad, Err(Error::Validation(_))));
        assert!(matches!(PolygonalDomain::from_json("{"), Err(Error::Parse(_))));
    }

    #[test]
    fn orientation_is_corrected() {
        let d = PolygonalDomain::from_json(
            r#"{"outer":[[0,0],[0,10],[10,10],[10,0]],"holes":[[[4,4],[4,6],[6,6],[6,4]]]}"#,
        )
        .unwrap();
        assert!(signed_area(d.ring(0)) > 0.0);
        assert!(signed_area(d.ring(1)) < 0.0);
    }

    #[test]
    fn invalid_holes() {
        let outside = r#"{"outer":[[0,0],[1,0],[1,1],[0,1]],"holes":[[[2,2],[3,2],[3,3]]]}"#;
        assert!(matches!(PolygonalDomain::from_json(outside), Err(Error::Validation(_))));
        let overlap =
            r#"{"outer":[[0,0],[10,0],[10,10],[0,10]],"holes":[[[2,2],[5,2],[5,5],[2,5]],[[4,4],[7,4],[7,7],[4,7]]]}"#;
        assert!(matches!(PolygonalDomain::from_json(overlap), Err(Error::Validation(_))));
        let crossing = r#"{"outer":[[0,0],[10,0],[10,10],[0,10]],"holes":[[[8,4],[12,4],[12,6],[8,6]]]}"#;
        assert!(matches!(
            PolygonalDomain::from_json(crossing),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn classify_examples() {
        let d = d1();
        assert_eq!(d.classify(P::new(5.0, 1.0)), PointLocation::Interior);
        match d.classify(P::new(4.0, 5.0)) {
            PointLocation::Edge { edge, param } => {
                let (a, b) = d.edge(edge);
                assert!(a.x == 4.0 && b.x == 4.0);
                assert!(param > 0.0 && param < 1.0);
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(d.classify(P::new(11.0, 5.0)), PointLocation::Outside);
        assert_eq!(d.classify(P::new(5.0, 5.0)), PointLocation::Outside);
        let i = d.vertices().iter().position(|&v| v == P::new(6.0, 6.0)).unwrap();
        assert_eq!(d.classify(P::new(6.0, 6.0)), PointLocation::Vertex { index: i });
        assert_eq!(d.classify(P::new(6.0 + 1e-12, 6.0)), PointLocation::Vertex { index: i });
    }

    #[test]
    fn free_direction_examples() {
        let d = d1();
        assert!(d.free_direction_range(P::new(5.0, 1.0)).unwrap().is_full());
        let s = square();
        let r = s.free_direction_range(P::new(0.5, 0.0)).unwrap();
        let a = r.arcs()[0];
        assert!(a.start.abs() < 1e-15 && (a.size - PI).abs() < 1e-15 && !a.start_open && !a.end_open);
        let r = s.free_direction_range(P::new(0.0, 0.0)).unwrap();
        let a = r.arcs()[0];
        assert!(a.start.abs() < 1e-15 && (a.size - FRAC_PI_2).abs() < 1e-15);
        assert!(matches!(
            s.free_direction_range(P::new(2.0, 0.0)),
            Err(Error::OutsideDomain(_))
        ));
        // Hole corners are reflex: wedge of 3π/2.
        let r = d.free_direction_range(P::new(4.0, 4.0)).unwrap();
        assert!((r.measure() - 1.5 * PI).abs() < 1e-12);
        assert!(r.contains(1.25 * PI) && !r.contains(0.25 * PI));
    }

    #[test]
    fn hole_wedges_sum_to_polygon_angles() {
        let d = PolygonalDomain::from_json(
            r#"{"outer":[[0,0],[10,0],[12,7],[5,11],[-1,6]],"holes":[[[4,4],[6,3.5],[7,6],[5,7.5],[3.6,6]]]}"#,
        )
        .unwrap();
        // Interior angles of an m-gon sum to (m-2)π; the domain sees 2π minus each.
        let m = 5.0;
        let hole: f64 = (5..10).map(|i| d.vertex_wedge(i).measure()).sum();
        assert!((hole - (2.0 * PI * m - (m - 2.0) * PI)).abs() < 1e-9);
        let outer: f64 = (0..5).map(|i| d.vertex_wedge(i).measure()).sum();
        assert!((outer - (m - 2.0) * PI).abs() < 1e-9);
    }

    #[test]
    fn general_position_examples() {
        assert!(!d1().check_general_position().collinear_triples.is_empty());
        let tri = PolygonalDomain::from_json(r#"{"outer":[[0,0],[3,0.2],[1,2]]}"#).unwrap();
        assert!(tri.check_general_position().is_clean());
        // Jitter every vertex of D1 by up to 1e-3 and recheck by brute force.
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let j = d1()
            .map_vertices(|_, p| P::new(p.x + rng.gen_range(-1e-3..1e-3), p.y + rng.gen_range(-1e-3..1e-3)))
            .unwrap();
        let v = j.vertices();
        let mut worst = f64::INFINITY;
        for a in 0..v.len() {
            for b in 0..v.len() {
                for c in 0..v.len() {
                    if a != b && b != c && a != c {
                        worst = worst.min(side_distance(v[a], v[b], v[c]).abs());
                    }
                }
            }
        }
        assert!(worst > 1e-6);
        assert!(j.check_general_position().collinear_triples.is_empty());
    }

    #[test]
    fn json_round_trip() {
        let d = d1();
        let e = PolygonalDomain::from_json(&d.to_json()).unwrap();
        assert_eq!(d.vertices(), e.vertices());
    }
}
