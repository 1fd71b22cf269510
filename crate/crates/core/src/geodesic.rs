//! Geodesic distances, shortest-path enumeration and pivot sets.

use serde::Serialize;

use crate::domain::{GeneralPositionReport, PointLocation, PolygonalDomain};
use crate::error::{Error, Result};
use crate::geom::Point;
use crate::visibility::{visible_unchecked, visible_vertices_unchecked, VisibilityGraph};

type P = Point<f64>;

pub const DEFAULT_REL_TOL: f64 = 1e-9;
pub const DEFAULT_PATH_CAP: usize = 64;

/// Distances from one point to every polygon vertex.
#[derive(Clone, Debug)]
pub struct SourceField {
    pub point: P,
    pub location: PointLocation,
    /// Vertices visible from `point`.
    pub visible: Vec<usize>,
    /// `to_vertex[v]` is the geodesic distance from `point` to vertex `v`.
    pub to_vertex: Vec<f64>,
}

impl SourceField {
    pub fn new(dom: &PolygonalDomain, graph: &VisibilityGraph, p: P) -> Result<Self> {
        let location = dom.require_inside(p)?;
        let visible = visible_vertices_unchecked(dom, p);
        let to_vertex = (0..dom.n())
            .map(|v| {
                visible
                    .iter()
                    .map(|&u| p.dist(dom.vertex(u)) + graph.vertex_distance(u, v))
                    .fold(f64::INFINITY, f64::min)
            })
            .collect();
        Ok(SourceField {
            point: p,
            location,
            visible,
            to_vertex,
        })
    }

    /// Geodesic distance from the source to `t`, given the vertices `t` sees.
    pub fn distance_via(&self, dom: &PolygonalDomain, t: P, t_visible: &[usize]) -> f64 {
        if visible_unchecked(dom, self.point, t) {
            return self.point.dist(t);
        }
        t_visible
            .iter()
            .map(|&v| self.to_vertex[v] + dom.vertex(v).dist(t))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn distance_to(&self, dom: &PolygonalDomain, t: P) -> f64 {
        if visible_unchecked(dom, self.point, t) {
            return self.point.dist(t);
        }
        let vis = visible_vertices_unchecked(dom, t);
        self.distance_via(dom, t, &vis)
    }
}

pub fn distance(dom: &PolygonalDomain, graph: &VisibilityGraph, s: P, t: P) -> Result<f64> {
    dom.require_inside(t)?;
    Ok(SourceField::new(dom, graph, s)?.distance_to(dom, t))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GeodesicPath {
    pub waypoints: Vec<P>,
    /// Polygon vertex index of each interior waypoint.
    pub vertices: Vec<usize>,
    pub length: f64,
}

impl GeodesicPath {
    pub fn s_pivot(&self) -> Option<usize> {
        self.vertices.first().copied()
    }

    pub fn t_pivot(&self) -> Option<usize> {
        self.vertices.last().copied()
    }

    /// First point after the source: the s-pivot, or the target itself.
    pub fn first_hop(&self) -> P {
        self.waypoints[1]
    }

    /// Last point before the target: the t-pivot, or the source itself.
    pub fn last_hop(&self) -> P {
        self.waypoints[self.waypoints.len() - 2]
    }
}

/// All shortest `s`-`t` paths up to a relative slack.
pub fn all_shortest_paths(
    dom: &PolygonalDomain,
    graph: &VisibilityGraph,
    s: P,
    t: P,
    rel_tol: f64,
) -> Result<Vec<GeodesicPath>> {
    all_shortest_paths_capped(dom, graph, s, t, rel_tol, DEFAULT_PATH_CAP)
}

pub fn all_shortest_paths_capped(
    dom: &PolygonalDomain,
    graph: &VisibilityGraph,
    s: P,
    t: P,
    rel_tol: f64,
    cap: usize,
) -> Result<Vec<GeodesicPath>> {
    dom.require_inside(s)?;
    dom.require_inside(t)?;
    if visible_unchecked(dom, s, t) {
        return Ok(vec![GeodesicPath {
            waypoints: vec![s, t],
            vertices: vec![],
            length: s.dist(t),
        }]);
    }
    let fs = SourceField::new(dom, graph, s)?;
    let ft = SourceField::new(dom, graph, t)?;
    let d = fs.distance_via(dom, t, &ft.visible);
    if !d.is_finite() {
        return Err(Error::DegenerateInput(format!("no path between {s} and {t}")));
    }
    let slack = dom.eps().max(rel_tol * d);
    let eps = dom.eps();
    let mut out = Vec::new();
    let mut stack: Vec<usize> = Vec::new();

    struct Ctx<'a> {
        dom: &'a PolygonalDomain,
        graph: &'a VisibilityGraph,
        ft: &'a SourceField,
        s: P,
        t: P,
        bound: f64,
        eps: f64,
        cap: usize,
    }

    fn finish(ctx: &Ctx, stack: &[usize], len: f64, out: &mut Vec<GeodesicPath>) -> Result<()> {
        if out.len() >= ctx.cap {
            return Err(Error::PathExplosion(ctx.cap));
        }
        let mut waypoints = vec![ctx.s];
        waypoints.extend(stack.iter().map(|&v| ctx.dom.vertex(v)));
        waypoints.push(ctx.t);
        out.push(GeodesicPath {
            waypoints,
            vertices: stack.to_vec(),
            length: len,
        });
        Ok(())
    }

    fn expand(ctx: &Ctx, stack: &mut Vec<usize>, len: f64, out: &mut Vec<GeodesicPath>) -> Result<()> {
        let u = *stack.last().expect("nonempty");
        let pu = ctx.dom.vertex(u);
        if ctx.ft.visible.contains(&u) && len + pu.dist(ctx.t) <= ctx.bound {
            finish(ctx, stack, len + pu.dist(ctx.t), out)?;
        }
        for &w in ctx.graph.neighbors(u) {
            let pw = ctx.dom.vertex(w);
            let step = len + pu.dist(pw);
            if stack.contains(&w) || step + ctx.ft.to_vertex[w] > ctx.bound {
                continue;
            }
            if pw.dist(ctx.t) <= ctx.eps {
                finish(ctx, stack, step, out)?;
                continue;
            }
            stack.push(w);
            expand(ctx, stack, step, out)?;
            stack.pop();
        }
        Ok(())
    }

    let ctx = Ctx {
        dom,
        graph,
        ft: &ft,
        s,
        t,
        bound: d + slack,
        eps,
        cap,
    };
    for &u in &fs.visible {
        let pu = dom.vertex(u);
        let first = s.dist(pu);
        if first <= eps {
            // `s` sits on vertex `u`: continue from its neighbours.
            for &w in graph.neighbors(u) {
                let pw = dom.vertex(w);
                if s.dist(pw) + ft.to_vertex[w] <= ctx.bound && !fs.visible.contains(&w) {
                    stack.push(w);
                    expand(&ctx, &mut stack, s.dist(pw), &mut out)?;
                    stack.pop();
                }
            }
            continue;
        }
        if first + ft.to_vertex[u] > ctx.bound {
            continue;
        }
        if pu.dist(t) <= eps {
            finish(&ctx, &stack, first, &mut out)?;
            continue;
        }
        stack.push(u);
        expand(&ctx, &mut stack, first, &mut out)?;
        stack.pop();
    }
    out.sort_by(|a, b| a.vertices.cmp(&b.vertices));
    out.dedup_by(|a, b| a.vertices == b.vertices);
    Ok(out)
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct PivotSets {
    pub s_pivots: Vec<usize>,
    pub t_pivots: Vec<usize>,
    /// Pairs `(u, v)` that are the first and last vertex of one shortest path.
    pub couples: Vec<(usize, usize)>,
}

impl PivotSets {
    pub fn from_paths(paths: &[GeodesicPath]) -> Self {
        let mut ps = PivotSets::default();
        for p in paths {
            if let (Some(u), Some(v)) = (p.s_pivot(), p.t_pivot()) {
                ps.s_pivots.push(u);
                ps.t_pivots.push(v);
                ps.couples.push((u, v));
            }
        }
        for v in [&mut ps.s_pivots, &mut ps.t_pivots] {
            v.sort_unstable();
            v.dedup();
        }
        ps.couples.sort_unstable();
        ps.couples.dedup();
        ps
    }

    pub fn is_empty(&self) -> bool {
        self.couples.is_empty()
    }

    /// s-pivots coupled with t-pivot `v`.
    pub fn coupled_with(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.couples.iter().filter(move |c| c.1 == v).map(|c| c.0)
    }
}

pub fn pivot_sets(dom: &PolygonalDomain, graph: &VisibilityGraph, s: P, t: P) -> Result<PivotSets> {
    let paths = all_shortest_paths(dom, graph, s, t, DEFAULT_REL_TOL)?;
    Ok(PivotSets::from_paths(&paths))
}

/// Collinear triples plus vertex pairs joined by more than one shortest path.
pub fn general_position_report(dom: &PolygonalDomain, graph: &VisibilityGraph) -> GeneralPositionReport {
    let mut report = dom.check_general_position();
    report.paths_checked = true;
    for i in 0..dom.n() {
        for j in i + 1..dom.n() {
            if graph.is_edge(i, j) {
                continue;
            }
            let count = all_shortest_paths_capped(dom, graph, dom.vertex(i), dom.vertex(j), DEFAULT_REL_TOL, 2)
                .map(|p| p.len())
                .unwrap_or(2);
            if count > 1 {
                report.multi_path_pairs.push([i, j]);
            }
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn d1() -> PolygonalDomain {
        PolygonalDomain::from_json(r#"{"outer":[[0,0],[10,0],[10,10],[0,10]],"holes":[[[4,4],[6,4],[6,6],[4,6]]]}"#)
            .unwrap()
    }

    fn idx(dom: &PolygonalDomain, x: f64, y: f64) -> usize {
        dom.vertices().iter().position(|&v| v == P::new(x, y)).unwrap()
    }

    #[test]
    fn distance_examples() {
        let d = d1();
        let g = VisibilityGraph::build(&d);
        let p = P::new(2.0, 5.0);
        assert_eq!(distance(&d, &g, p, p).unwrap(), 0.0);
        let expect = 2.0 + 2.0 * 5f64.sqrt();
        assert!((distance(&d, &g, p, P::new(8.0, 5.0)).unwrap() - expect).abs() < 1e-12);
        let sq = PolygonalDomain::from_json(r#"{"outer":[[0,0],[1,0],[1,1],[0,1]]}"#).unwrap();
        let gs = VisibilityGraph::build(&sq);
        let r = distance(&sq, &gs, P::new(0.0, 0.0), P::new(1.0, 1.0)).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-15);
        assert!(distance(&d, &g, p, P::new(5.0, 5.0)).is_err());
    }

    #[test]
    fn path_enumeration_examples() {
        let d = d1();
        let g = VisibilityGraph::build(&d);
        let paths = all_shortest_paths(&d, &g, P::new(2.0, 5.0), P::new(8.0, 5.0), DEFAULT_REL_TOL).unwrap();
        assert_eq!(paths.len(), 2);
        for p in &paths {
            assert!((p.length - (2.0 + 2.0 * 5f64.sqrt())).abs() < 1e-12);
            assert_eq!(p.vertices.len(), 2);
        }
        let one = all_shortest_paths(&d, &g, P::new(2.0, 5.0), P::new(3.0, 5.0), DEFAULT_REL_TOL).unwrap();
        assert_eq!(one.len(), 1);
        assert_eq!(one[0].waypoints.len(), 2);
    }

    #[test]
    fn pivot_examples() {
        let d = d1();
        let g = VisibilityGraph::build(&d);
        let ps = pivot_sets(&d, &g, P::new(2.0, 5.0), P::new(8.0, 5.0)).unwrap();
        let (a, b, c, e) = (
            idx(&d, 4.0, 6.0),
            idx(&d, 4.0, 4.0),
            idx(&d, 6.0, 6.0),
            idx(&d, 6.0, 4.0),
        );
        let mut su = vec![a, b];
        su.sort();
        let mut tv = vec![c, e];
        tv.sort();
        assert_eq!(ps.s_pivots, su);
        assert_eq!(ps.t_pivots, tv);
        let mut couples = vec![(a, c), (b, e)];
        couples.sort();
        assert_eq!(ps.couples, couples);

        assert!(pivot_sets(&d, &g, P::new(2.0, 5.0), P::new(3.0, 5.0))
            .unwrap()
            .is_empty());

        let ps = pivot_sets(&d, &g, P::new(2.0, 5.0), P::new(6.5, 5.0)).unwrap();
        assert_eq!(ps.t_pivots, tv);
        assert_eq!(ps.s_pivots, su);
    }

    #[test]
    fn paths_from_vertex_sources() {
        let d = d1();
        let g = VisibilityGraph::build(&d);
        let paths = all_shortest_paths(&d, &g, P::new(4.0, 4.0), P::new(6.0, 6.0), DEFAULT_REL_TOL).unwrap();
        assert_eq!(paths.len(), 2);
        for p in &paths {
            assert_eq!(p.vertices.len(), 1);
            assert!((p.length - 4.0).abs() < 1e-12);
        }
        let report = general_position_report(&d, &g);
        assert!(report.multi_path_pairs.contains(&{
            let (i, j) = (idx(&d, 4.0, 4.0), idx(&d, 6.0, 6.0));
            [i.min(j), i.max(j)]
        }));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]
        #[test]
        fn metric_axioms(a in (0.0..10.0f64, 0.0..10.0f64), b in (0.0..10.0f64, 0.0..10.0f64), m in (0.0..10.0f64, 0.0..10.0f64)) {
            let d = d1();
            let g = VisibilityGraph::build(&d);
            let (s, t, m) = (P::new(a.0, a.1), P::new(b.0, b.1), P::new(m.0, m.1));
            prop_assume!(d.contains(s) && d.contains(t) && d.contains(m));
            let st = distance(&d, &g, s, t).unwrap();
            prop_assert!((st - distance(&d, &g, t, s).unwrap()).abs() < 1e-9);
            prop_assert!(st <= distance(&d, &g, s, m).unwrap() + distance(&d, &g, m, t).unwrap() + 1e-9);
            prop_assert!(st >= s.dist(t) - 1e-12);
            let paths = all_shortest_paths(&d, &g, s, t, DEFAULT_REL_TOL).unwrap();
            prop_assert!(!paths.is_empty());
            for p in &paths {
                prop_assert!(p.length <= st * (1.0 + 1e-9) + d.eps());
                let sum: f64 = p.waypoints.windows(2).map(|w| w[0].dist(w[1])).sum();
                prop_assert!((sum - p.length).abs() < 1e-9);
            }
        }
    }
}
