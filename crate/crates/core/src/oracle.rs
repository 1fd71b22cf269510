//! Brute-force references on a uniform grid.
//!
//! Distances are still exact geodesic distances; only the set of target
//! points is discretized. Every point of the domain lies within `h` of a
//! target, and geodesic distance is 1-Lipschitz, which turns grid maxima
//! into two-sided bounds.

use rayon::prelude::*;

use crate::domain::PolygonalDomain;
use crate::geodesic::SourceField;
use crate::geom::Point;
use crate::visibility::{visible_unchecked, visible_vertices_unchecked, VisibilityGraph};

type P = Point<f64>;

/// Lattice points of spacing `h` inside the domain, plus the vertices and
/// boundary samples at spacing `h`.
pub fn grid_points(dom: &PolygonalDomain, h: f64) -> Vec<P> {
    assert!(h > 0.0);
    let (lo, hi) = dom.bbox();
    let nx = ((hi.x - lo.x) / h).ceil() as i64;
    let ny = ((hi.y - lo.y) / h).ceil() as i64;
    let mut pts: Vec<P> = dom.vertices().to_vec();
    for e in 0..dom.n() {
        let (a, b) = dom.edge(e);
        let k = (a.dist(b) / h).ceil() as usize;
        for i in 1..k {
            pts.push(a.lerp(b, i as f64 / k as f64));
        }
    }
    for i in 0..=nx {
        for j in 0..=ny {
            let p = P::new(lo.x + i as f64 * h, lo.y + j as f64 * h);
            if dom.contains(p) {
                pts.push(p);
            }
        }
    }
    pts
}

/// Precomputed targets and their visible vertices.
pub struct GridOracle<'a> {
    dom: &'a PolygonalDomain,
    graph: &'a VisibilityGraph,
    h: f64,
    targets: Vec<P>,
    target_vis: Vec<Vec<usize>>,
}

impl<'a> GridOracle<'a> {
    pub fn new(dom: &'a PolygonalDomain, graph: &'a VisibilityGraph, h: f64) -> Self {
        let targets = grid_points(dom, h);
        let target_vis = targets
            .par_iter()
            .map(|&q| visible_vertices_unchecked(dom, q))
            .collect();
        GridOracle {
            dom,
            graph,
            h,
            targets,
            target_vis,
        }
    }

    pub fn spacing(&self) -> f64 {
        self.h
    }

    pub fn targets(&self) -> &[P] {
        &self.targets
    }

    fn dist(&self, field: &SourceField, k: usize) -> f64 {
        let q = self.targets[k];
        if visible_unchecked(self.dom, field.point, q) {
            return field.point.dist(q);
        }
        self.target_vis[k]
            .iter()
            .map(|&v| field.to_vertex[v] + self.dom.vertex(v).dist(q))
            .fold(f64::INFINITY, f64::min)
    }

    /// Largest geodesic distance from `s` to a grid target: a lower bound
    /// on `d_max(s)` that is at most `h` below it.
    pub fn max_distance(&self, s: P) -> f64 {
        let field = SourceField::new(self.dom, self.graph, s).expect("source inside domain");
        (0..self.targets.len())
            .map(|k| self.dist(&field, k))
            .fold(0.0, f64::max)
    }

    /// Like [`Self::max_distance`] but gives up as soon as the running
    /// maximum reaches `stop`, trying the targets in `hot` first. Returns the
    /// maximum and its target when the scan completes.
    fn max_distance_below(&self, field: &SourceField, stop: f64, hot: &[usize]) -> Option<(f64, usize)> {
        let mut best = (0.0, 0usize);
        for &k in hot {
            let d = self.dist(field, k);
            if d >= stop {
                return None;
            }
            if d > best.0 {
                best = (d, k);
            }
        }
        for k in 0..self.targets.len() {
            let d = self.dist(field, k);
            if d >= stop {
                return None;
            }
            if d > best.0 {
                best = (d, k);
            }
        }
        Some(best)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct OracleCenter {
    pub point: P,
    /// Upper bound on `d_max(point)`, hence on the radius.
    pub value: f64,
    /// The radius is at least this.
    pub lower: f64,
    pub spacing: f64,
}

/// Grid point with the smallest upper bound on `d_max`; the true radius
/// lies in `[value − 2h, value]`.
pub fn brute_force_center(dom: &PolygonalDomain, graph: &VisibilityGraph, h: f64) -> OracleCenter {
    let oracle = GridOracle::new(dom, graph, h);
    let sources = oracle.targets.clone();
    // Vertex distances come free with the source field and bound d_max from below.
    let mut order: Vec<(f64, usize)> = sources
        .par_iter()
        .enumerate()
        .map(|(i, &s)| {
            let f = SourceField::new(dom, graph, s).expect("grid point inside");
            (f.to_vertex.iter().cloned().fold(0.0, f64::max), i)
        })
        .collect();
    order.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
    let mut best = (f64::INFINITY, sources[order[0].1]);
    let mut hot: Vec<usize> = Vec::new();
    for &(lb, i) in &order {
        if lb + h >= best.0 {
            break;
        }
        let s = sources[i];
        let field = SourceField::new(dom, graph, s).expect("grid point inside");
        if let Some((m, arg)) = oracle.max_distance_below(&field, best.0 - h, &hot) {
            best = (m + h, s);
            if !hot.contains(&arg) {
                hot.insert(0, arg);
                hot.truncate(32);
            }
        }
    }
    OracleCenter {
        point: best.1,
        value: best.0,
        lower: best.0 - 2.0 * h,
        spacing: h,
    }
}
