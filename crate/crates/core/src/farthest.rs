//! Farthest points: `d_max(s)` and the set `F(s)`.
//!
//! Every point `t` reaches `s` through a last "source": `s` itself when the
//! two see each other, otherwise a vertex `v` with additive weight `d(s, v)`.
//! Local maxima of `d(s, ·)` therefore sit at polygon vertices, at points of
//! an edge where two weighted sources tie, or at interior points where three
//! tie. We generate all of those, bound each one by its claimed value, and
//! evaluate the true distance in decreasing order of that bound.

use serde::Serialize;

use crate::domain::{PointLocation, PolygonalDomain};
use crate::error::{Error, Result};
use crate::geodesic::{all_shortest_paths, GeodesicPath, PivotSets, SourceField, DEFAULT_REL_TOL};
use crate::geom::{side_distance, Point};
use crate::visibility::{visible_unchecked, visible_vertices_unchecked, VisibilityGraph};

type P = Point<f64>;

/// Real roots of `a x² + b x + c`, ascending. Near-zero discriminants
/// collapse to a double root.
pub fn solve_quadratic(a: f64, b: f64, c: f64) -> Vec<f64> {
    let scale = a.abs().max(b.abs()).max(c.abs());
    if scale == 0.0 {
        return vec![];
    }
    if a.abs() <= 1e-14 * scale {
        if b.abs() <= 1e-14 * scale {
            return vec![];
        }
        return vec![-c / b];
    }
    let disc = b * b - 4.0 * a * c;
    let dtol = 1e-12 * (b * b + (4.0 * a * c).abs());
    if disc < -dtol {
        return vec![];
    }
    if disc <= dtol {
        return vec![-b / (2.0 * a)];
    }
    let sq = disc.sqrt();
    let q = -0.5 * (b + b.signum() * sq);
    let (mut r1, mut r2) = (q / a, c / q);
    if r1 > r2 {
        std::mem::swap(&mut r1, &mut r2);
    }
    vec![r1, r2]
}

/// Points `t` and values `ρ` with `ρ = w₁ + |v₁ t|` that satisfy two extra
/// linear equations `rows[k] · (x, y, ρ) = rhs[k]`.
fn lifted_solve(rows: [[f64; 3]; 2], rhs: [f64; 2], v1: P, w1: f64) -> Vec<(P, f64)> {
    let [r1, r2] = rows;
    let null = [
        r1[1] * r2[2] - r1[2] * r2[1],
        r1[2] * r2[0] - r1[0] * r2[2],
        r1[0] * r2[1] - r1[1] * r2[0],
    ];
    let nn = null.iter().map(|x| x * x).sum::<f64>();
    let rscale = r1.iter().chain(r2.iter()).map(|x| x * x).sum::<f64>();
    if nn <= 1e-24 * rscale * rscale {
        return vec![];
    }
    // Least-norm particular solution through the 2×2 Gram system.
    let g11 = r1.iter().map(|x| x * x).sum::<f64>();
    let g22 = r2.iter().map(|x| x * x).sum::<f64>();
    let g12 = r1.iter().zip(r2.iter()).map(|(a, b)| a * b).sum::<f64>();
    let det = g11 * g22 - g12 * g12;
    let m1 = (g22 * rhs[0] - g12 * rhs[1]) / det;
    let m2 = (g11 * rhs[1] - g12 * rhs[0]) / det;
    let p = [
        m1 * r1[0] + m2 * r2[0],
        m1 * r1[1] + m2 * r2[1],
        m1 * r1[2] + m2 * r2[2],
    ];
    // |(p + λn)_xy − v₁|² − ((p + λn)_ρ − w₁)² = 0
    let dx = p[0] - v1.x;
    let dy = p[1] - v1.y;
    let dr = p[2] - w1;
    let a = null[0] * null[0] + null[1] * null[1] - null[2] * null[2];
    let b = 2.0 * (dx * null[0] + dy * null[1] - dr * null[2]);
    let c = dx * dx + dy * dy - dr * dr;
    solve_quadratic(a, b, c)
        .into_iter()
        .map(|l| (P::new(p[0] + l * null[0], p[1] + l * null[1]), p[2] + l * null[2]))
        .filter(|&(_, rho)| rho >= w1 - 1e-9 * (1.0 + w1.abs()))
        .collect()
}

fn site_row(v1: P, w1: f64, vi: P, wi: f64) -> ([f64; 3], f64) {
    (
        [-2.0 * (vi.x - v1.x), -2.0 * (vi.y - v1.y), 2.0 * (wi - w1)],
        (wi * wi - w1 * w1) - (vi.dot(vi) - v1.dot(v1)),
    )
}

/// Newton polish of `w_i + |v_i t|` all equal, for two or three sites with
/// an optional line constraint.
fn polish(sites: &[(P, f64)], line: Option<(P, P)>, mut t: P) -> P {
    let f = |t: P| -> Vec<f64> {
        let base = sites[0].1 + sites[0].0.dist(t);
        sites[1..].iter().map(|&(v, w)| w + v.dist(t) - base).collect()
    };
    for _ in 0..8 {
        let r = f(t);
        let g0 = unit_from(sites[0].0, t);
        let grads: Vec<P> = sites[1..].iter().map(|&(v, _)| unit_from(v, t) - g0).collect();
        let step = match (line, grads.len()) {
            (None, 2) => {
                let det = grads[0].cross(grads[1]);
                if det.abs() < 1e-14 {
                    break;
                }
                // Solve [g1; g2] δ = −r.
                P::new(
                    (-r[0] * grads[1].y + r[1] * grads[0].y) / det,
                    (-r[1] * grads[0].x + r[0] * grads[1].x) / det,
                )
            }
            (Some((a, b)), 1) => {
                let d = b - a;
                let dd = d.dot(d);
                let slope = grads[0].dot(d) / dd.sqrt();
                if slope.abs() < 1e-14 {
                    break;
                }
                d * (-r[0] / slope / dd.sqrt())
            }
            _ => break,
        };
        if !step.is_finite() {
            break;
        }
        let next = t + step;
        let improved =
            f(next).iter().map(|x| x.abs()).fold(0.0, f64::max) < r.iter().map(|x| x.abs()).fold(0.0, f64::max);
        if !improved {
            break;
        }
        t = next;
    }
    t
}

fn unit_from(v: P, t: P) -> P {
    let d = t - v;
    let n = d.norm();
    if n == 0.0 {
        P::origin()
    } else {
        d * (1.0 / n)
    }
}

fn max_residual(sites: &[(P, f64)], t: P) -> f64 {
    let vals: Vec<f64> = sites.iter().map(|&(v, w)| w + v.dist(t)).collect();
    let hi = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let lo = vals.iter().cloned().fold(f64::INFINITY, f64::min);
    hi - lo
}

/// All points whose weighted distances `w_i + |v_i t|` to the three sites agree.
pub fn weighted_equidistant(sites: [(P, f64); 3]) -> Result<Vec<P>> {
    let scale = sites.iter().map(|(v, w)| v.norm().max(w.abs())).fold(1.0, f64::max);
    for i in 0..3 {
        for j in i + 1..3 {
            if sites[i].0.dist(sites[j].0) <= 1e-12 * scale && (sites[i].1 - sites[j].1).abs() <= 1e-12 * scale {
                return Err(Error::DegenerateInput("repeated site".into()));
            }
        }
    }
    Ok(equidistant3(&sites, scale))
}

fn equidistant3(sites: &[(P, f64); 3], scale: f64) -> Vec<P> {
    let (v1, w1) = sites[0];
    let (r2, b2) = site_row(v1, w1, sites[1].0, sites[1].1);
    let (r3, b3) = site_row(v1, w1, sites[2].0, sites[2].1);
    let mut out: Vec<P> = Vec::new();
    for (t, _) in lifted_solve([r2, r3], [b2, b3], v1, w1) {
        let t = polish(sites, None, t);
        if max_residual(sites, t) <= 1e-9 * scale && !out.iter().any(|q| q.dist(t) <= 1e-9 * scale) {
            out.push(t);
        }
    }
    out
}

/// Points on segment `ab` where the two weighted sites tie, with the
/// segment parameter of each.
pub fn equidistant_on_segment(sites: [(P, f64); 2], a: P, b: P) -> Vec<(P, f64)> {
    let scale = sites
        .iter()
        .map(|(v, w)| v.norm().max(w.abs()))
        .fold(a.norm().max(b.norm()).max(1.0), f64::max);
    let (v1, w1) = sites[0];
    let (r2, b2) = site_row(v1, w1, sites[1].0, sites[1].1);
    let n = (b - a).perp();
    let line_row = [n.x, n.y, 0.0];
    let line_rhs = n.dot(a);
    let len2 = (b - a).dot(b - a);
    let mut out: Vec<(P, f64)> = Vec::new();
    for (t, _) in lifted_solve([r2, line_row], [b2, line_rhs], v1, w1) {
        let t = polish(&sites, Some((a, b)), t);
        let lam = (t - a).dot(b - a) / len2;
        if !(-1e-12..=1.0 + 1e-12).contains(&lam) {
            continue;
        }
        let t = a.lerp(b, lam.clamp(0.0, 1.0));
        if max_residual(&sites, t) <= 1e-9 * scale && !out.iter().any(|q| q.0.dist(t) <= 1e-9 * scale) {
            out.push((t, lam));
        }
    }
    out
}

/// Whether a farthest point is consistent with its location class.
///
/// `t_pivots` are the last waypoints before `t` over all shortest paths
/// (the source itself when it sees `t`).
pub fn location_consistent(dom: &PolygonalDomain, t: P, location: PointLocation, t_pivots: &[P]) -> bool {
    let eps = dom.eps();
    match location {
        PointLocation::Vertex { .. } => true,
        PointLocation::Outside => false,
        PointLocation::Interior => t_pivots.len() >= 3 && strictly_inside_hull(t, t_pivots, dom.tolerance().ang),
        PointLocation::Edge { edge, .. } => {
            if t_pivots.len() < 2 {
                return false;
            }
            let (a, b) = dom.edge(edge);
            let dir = b - a;
            let interior = t_pivots.iter().any(|&q| side_distance(a, b, q) > eps);
            let along: Vec<f64> = t_pivots.iter().map(|&q| (q - t).dot(dir) / dir.norm()).collect();
            interior && along.iter().any(|&x| x > eps) && along.iter().any(|&x| x < -eps)
        }
    }
}

/// `t` lies strictly inside the convex hull of `pts`: every open half-plane
/// through `t` contains some point, i.e. the directions from `t` leave no
/// angular gap of π or more.
fn strictly_inside_hull(t: P, pts: &[P], ang_tol: f64) -> bool {
    let mut angs: Vec<f64> = pts
        .iter()
        .filter(|q| q.dist(t) > 0.0)
        .map(|q| (q.y - t.y).atan2(q.x - t.x))
        .collect();
    if angs.len() < 3 {
        return false;
    }
    angs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut gap = angs[0] + std::f64::consts::TAU - angs[angs.len() - 1];
    for w in angs.windows(2) {
        gap = gap.max(w[1] - w[0]);
    }
    gap < std::f64::consts::PI - ang_tol
}

#[derive(Clone, Debug, Serialize)]
pub struct FarthestPoint {
    pub point: P,
    pub location: PointLocation,
    pub pivots: PivotSets,
    /// Number of shortest paths from the source, or `None` past the cap.
    pub path_count: Option<usize>,
    pub degenerate: bool,
    pub location_consistent: bool,
    #[serde(skip)]
    pub paths: Vec<GeodesicPath>,
}

impl FarthestPoint {
    /// Last waypoints before `t` over all paths.
    pub fn t_pivot_points(&self) -> Vec<P> {
        let mut v: Vec<P> = Vec::new();
        for p in &self.paths {
            let q = p.waypoints[p.waypoints.len() - 2];
            if !v.contains(&q) {
                v.push(q);
            }
        }
        v
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FarthestReport {
    pub source: P,
    pub dmax: f64,
    pub farthest: Vec<FarthestPoint>,
}

impl FarthestReport {
    pub fn has_degenerate(&self) -> bool {
        self.farthest.iter().any(|f| f.degenerate)
    }
}

/// A point where the weighted sources tie, with the common value as an
/// upper bound on the true distance.
#[derive(Clone, Copy, Debug)]
struct Candidate {
    point: P,
    claimed: f64,
}

/// Evaluated local-maximum candidate of `d(s, ·)`.
#[derive(Clone, Copy, Debug)]
pub struct Evaluated {
    pub point: P,
    pub value: f64,
}

pub struct FarthestSearch<'a> {
    dom: &'a PolygonalDomain,
    field: SourceField,
    sources: Vec<(P, f64, Option<usize>)>,
}

impl<'a> FarthestSearch<'a> {
    pub fn new(dom: &'a PolygonalDomain, graph: &VisibilityGraph, s: P) -> Result<Self> {
        let field = SourceField::new(dom, graph, s)?;
        let eps = dom.eps();
        let mut sources = vec![(s, 0.0, None)];
        for v in 0..dom.n() {
            let pv = dom.vertex(v);
            // Shortest paths only bend at reflex vertices.
            if pv.dist(s) <= eps || !field.to_vertex[v].is_finite() || !dom.is_reflex(v) {
                continue;
            }
            // A vertex visible from s is dominated by s itself wherever both
            // are visible, but still starts its own shadow region.
            sources.push((pv, field.to_vertex[v], Some(v)));
        }
        Ok(FarthestSearch { dom, field, sources })
    }

    pub fn field(&self) -> &SourceField {
        &self.field
    }

    fn sees(&self, src: usize, t: P) -> bool {
        visible_unchecked(self.dom, self.sources[src].0, t)
    }

    fn candidates(&self) -> Vec<Candidate> {
        let dom = self.dom;
        let eps = dom.eps();
        let m = self.sources.len();
        let mut out = Vec::new();
        for v in 0..dom.n() {
            out.push(Candidate {
                point: dom.vertex(v),
                claimed: self.field.to_vertex[v],
            });
        }
        for e in 0..dom.n() {
            let (a, b) = dom.edge(e);
            for i in 0..m {
                for j in i + 1..m {
                    let (si, sj) = (self.sources[i], self.sources[j]);
                    for (t, lam) in equidistant_on_segment([(si.0, si.1), (sj.0, sj.1)], a, b) {
                        if lam * a.dist(b) <= eps || (1.0 - lam) * a.dist(b) <= eps {
                            continue;
                        }
                        if self.sees(i, t) && self.sees(j, t) {
                            out.push(Candidate {
                                point: t,
                                claimed: si.1 + si.0.dist(t),
                            });
                        }
                    }
                }
            }
        }
        for i in 0..m {
            for j in i + 1..m {
                for k in j + 1..m {
                    let sites = [
                        (self.sources[i].0, self.sources[i].1),
                        (self.sources[j].0, self.sources[j].1),
                        (self.sources[k].0, self.sources[k].1),
                    ];
                    let scale = sites.iter().map(|(v, w)| v.norm().max(w.abs())).fold(1.0, f64::max);
                    for t in equidistant3(&sites, scale) {
                        if !matches!(dom.classify(t), PointLocation::Interior) {
                            continue;
                        }
                        if self.sees(i, t) && self.sees(j, t) && self.sees(k, t) {
                            out.push(Candidate {
                                point: t,
                                claimed: sites[0].1 + sites[0].0.dist(t),
                            });
                        }
                    }
                }
            }
        }
        out
    }

    /// True distances of every candidate whose value is within `band` of the
    /// maximum, sorted by decreasing value.
    pub fn near_max(&self, band: f64) -> Vec<Evaluated> {
        let mut cands = self.candidates();
        cands.sort_by(|a, b| b.claimed.partial_cmp(&a.claimed).unwrap_or(std::cmp::Ordering::Equal));
        let lower = self
            .field
            .to_vertex
            .iter()
            .cloned()
            .filter(|x| x.is_finite())
            .fold(0.0, f64::max);
        let mut best = lower;
        let mut out: Vec<Evaluated> = Vec::new();
        for c in cands {
            if c.claimed < best - band {
                break;
            }
            let value = self.distance(c.point);
            if value >= best - band {
                out.push(Evaluated { point: c.point, value });
            }
            best = best.max(value);
        }
        out.retain(|e| e.value >= best - band);
        out.sort_by(|a, b| b.value.partial_cmp(&a.value).unwrap_or(std::cmp::Ordering::Equal));
        let tol = self.dom.eps();
        let mut dedup: Vec<Evaluated> = Vec::new();
        for e in out {
            if !dedup.iter().any(|d| d.point.dist(e.point) <= tol) {
                dedup.push(e);
            }
        }
        dedup
    }

    pub fn distance(&self, t: P) -> f64 {
        if self.dom.classify(t).is_outside() {
            return f64::NAN;
        }
        let vis = visible_vertices_unchecked(self.dom, t);
        self.field.distance_via(self.dom, t, &vis)
    }

    /// Whether no point on a tiny circle around `t` is farther from the source.
    /// The circle is smaller than the boundary tolerance, so only samples
    /// classified as interior count; the others may lie just outside.
    pub fn is_local_max(&self, t: P, value: f64) -> bool {
        let r = 1e-8 * value.max(1.0);
        let slack = 1e-3 * r;
        (0..16).all(|k| {
            let q = t + P::unit(k as f64 * std::f64::consts::TAU / 16.0) * r;
            if !matches!(self.dom.classify(q), PointLocation::Interior) {
                return true;
            }
            let d = self.distance(q);
            d.is_nan() || d <= value + slack
        })
    }
}

pub fn dmax_and_farthest(dom: &PolygonalDomain, graph: &VisibilityGraph, s: P) -> Result<FarthestReport> {
    let search = FarthestSearch::new(dom, graph, s)?;
    let tol = dom.tolerance().len_at(dom.diameter());
    let top = search.near_max(tol);
    let dmax = top.first().map(|e| e.value).unwrap_or(0.0);
    let mut farthest = Vec::new();
    for e in top.iter().filter(|e| e.value >= dmax - tol) {
        farthest.push(describe_farthest(dom, graph, s, e.point)?);
    }
    Ok(FarthestReport {
        source: s,
        dmax,
        farthest,
    })
}

/// Pivots, path count and location checks for a farthest point `t` of `s`.
pub fn describe_farthest(dom: &PolygonalDomain, graph: &VisibilityGraph, s: P, t: P) -> Result<FarthestPoint> {
    let mut location = dom.classify(t);
    let mut point = t;
    if let PointLocation::Vertex { index } = location {
        point = dom.vertex(index);
    }
    if location.is_outside() {
        location = PointLocation::Interior;
    }
    let (paths, path_count) = match all_shortest_paths(dom, graph, s, point, DEFAULT_REL_TOL) {
        Ok(p) => {
            let n = p.len();
            (p, Some(n))
        }
        Err(Error::PathExplosion(_)) => (Vec::new(), None),
        Err(e) => return Err(e),
    };
    let minimal = match location {
        PointLocation::Interior => 3,
        PointLocation::Edge { .. } => 2,
        _ => 1,
    };
    let degenerate = path_count.is_none_or(|c| c > minimal);
    let mut fp = FarthestPoint {
        point,
        location,
        pivots: PivotSets::from_paths(&paths),
        path_count,
        degenerate,
        location_consistent: false,
        paths,
    };
    fp.location_consistent = location_consistent(dom, point, location, &fp.t_pivot_points());
    Ok(fp)
}
