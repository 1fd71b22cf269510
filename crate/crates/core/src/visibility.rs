//! Strict visibility and the vertex visibility graph.
//!
//! Two points see each other when the closed segment between them stays in
//! the domain and no polygon vertex lies in the open segment. A segment
//! that grazes a vertex is therefore blocked, and shortest paths always
//! list such vertices as waypoints.

use crate::domain::PolygonalDomain;
use crate::error::Result;
use crate::geom::{segments_cross, Point};

type P = Point<f64>;

/// Visibility without the inside checks on `p` and `q`.
pub(crate) fn visible_unchecked(dom: &PolygonalDomain, p: P, q: P) -> bool {
    let eps = dom.eps();
    let len = p.dist(q);
    if len <= eps {
        return true;
    }
    let dir = (q - p) * (1.0 / len);
    for &v in dom.vertices() {
        let along = (v - p).dot(dir);
        if along <= eps || along >= len - eps {
            continue;
        }
        if (v - p).cross(dir).abs() <= eps {
            return false;
        }
    }
    for e in 0..dom.n() {
        let (a, b) = dom.edge(e);
        if segments_cross(p, q, a, b, eps) {
            return false;
        }
    }
    !dom.classify(p.midpoint(q)).is_outside()
}

pub fn visible(dom: &PolygonalDomain, p: P, q: P) -> Result<bool> {
    dom.require_inside(p)?;
    dom.require_inside(q)?;
    Ok(visible_unchecked(dom, p, q))
}

/// Visibility graph over the polygon vertices together with all-pairs
/// vertex-to-vertex geodesic distances.
#[derive(Clone, Debug)]
pub struct VisibilityGraph {
    adj: Vec<Vec<usize>>,
    dist: Vec<Vec<f64>>,
}

impl VisibilityGraph {
    pub fn build(dom: &PolygonalDomain) -> Self {
        let n = dom.n();
        let mut adj = vec![Vec::new(); n];
        let mut dist = vec![vec![f64::INFINITY; n]; n];
        for i in 0..n {
            dist[i][i] = 0.0;
            for j in i + 1..n {
                let (a, b) = (dom.vertex(i), dom.vertex(j));
                if visible_unchecked(dom, a, b) {
                    adj[i].push(j);
                    adj[j].push(i);
                    let w = a.dist(b);
                    dist[i][j] = w;
                    dist[j][i] = w;
                }
            }
        }
        // Floyd–Warshall; n is small.
        for k in 0..n {
            for i in 0..n {
                let dik = dist[i][k];
                if !dik.is_finite() {
                    continue;
                }
                for j in 0..n {
                    let via = dik + dist[k][j];
                    if via < dist[i][j] {
                        dist[i][j] = via;
                    }
                }
            }
        }
        VisibilityGraph { adj, dist }
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.adj[i]
    }

    pub fn is_edge(&self, i: usize, j: usize) -> bool {
        self.adj[i].contains(&j)
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(i, nb)| nb.iter().filter(move |&&j| j > i).map(move |&j| (i, j)))
    }

    /// Geodesic distance between vertices `i` and `j`.
    pub fn vertex_distance(&self, i: usize, j: usize) -> f64 {
        self.dist[i][j]
    }
}

/// Indices of the polygon vertices visible from `p`.
pub fn visible_vertices(dom: &PolygonalDomain, p: P) -> Result<Vec<usize>> {
    dom.require_inside(p)?;
    Ok(visible_vertices_unchecked(dom, p))
}

pub(crate) fn visible_vertices_unchecked(dom: &PolygonalDomain, p: P) -> Vec<usize> {
    (0..dom.n())
        .filter(|&i| visible_unchecked(dom, p, dom.vertex(i)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use proptest::prelude::*;

    fn d1() -> PolygonalDomain {
        PolygonalDomain::from_json(r#"{"outer":[[0,0],[10,0],[10,10],[0,10]],"holes":[[[4,4],[6,4],[6,6],[4,6]]]}"#)
            .unwrap()
    }

    fn idx(dom: &PolygonalDomain, x: f64, y: f64) -> usize {
        dom.vertices().iter().position(|&v| v == P::new(x, y)).unwrap()
    }

    #[test]
    fn visible_examples() {
        let d = d1();
        assert!(visible(&d, P::new(2.0, 5.0), P::new(3.0, 5.0)).unwrap());
        assert!(!visible(&d, P::new(2.0, 5.0), P::new(8.0, 5.0)).unwrap());
        // (4,6) sits exactly in the open segment.
        assert!(!visible(&d, P::new(2.0, 5.0), P::new(6.0, 7.0)).unwrap());
        assert!(visible(&d, P::new(2.0, 5.0), P::new(6.0, 7.5)).unwrap());
        assert!(matches!(
            visible(&d, P::new(5.0, 5.0), P::new(1.0, 1.0)),
            Err(Error::OutsideDomain(_))
        ));
    }

    #[test]
    fn boundary_segments() {
        let d = d1();
        // Along a hole edge: in the domain, no vertex inside.
        assert!(visible(&d, P::new(4.0, 4.0), P::new(6.0, 4.0)).unwrap());
        assert!(visible(&d, P::new(4.0, 4.5), P::new(4.0, 5.5)).unwrap());
        // Along the outer bottom edge past a corner is outside.
        assert!(!visible(&d, P::new(1.0, 0.0), P::new(11.0, 0.0)).unwrap_or(false));
        // Through the hole from edge to edge.
        assert!(!visible(&d, P::new(4.0, 5.0), P::new(6.0, 5.0)).unwrap());
    }

    #[test]
    fn graph_examples() {
        let quad = PolygonalDomain::from_json(r#"{"outer":[[0,0],[3,0.5],[3.5,3],[-0.5,2.5]]}"#).unwrap();
        let g = VisibilityGraph::build(&quad);
        assert_eq!(g.edge_count(), 6);

        let d = d1();
        let g = VisibilityGraph::build(&d);
        assert!(!g.is_edge(idx(&d, 0.0, 0.0), idx(&d, 10.0, 10.0)));
        assert!(g.is_edge(idx(&d, 0.0, 0.0), idx(&d, 4.0, 4.0)));
        // Opposite hole corners are two hole edges apart.
        let a = idx(&d, 4.0, 4.0);
        let b = idx(&d, 6.0, 6.0);
        assert!(!g.is_edge(a, b));
        assert!((g.vertex_distance(a, b) - 4.0).abs() < 1e-12);
    }

    #[test]
    fn visible_vertices_examples() {
        let d = d1();
        let vis = visible_vertices(&d, P::new(2.0, 5.0)).unwrap();
        assert!(vis.contains(&idx(&d, 4.0, 4.0)) && vis.contains(&idx(&d, 4.0, 6.0)));
        assert!(!vis.contains(&idx(&d, 6.0, 4.0)) && !vis.contains(&idx(&d, 6.0, 6.0)));
        let sq = PolygonalDomain::from_json(r#"{"outer":[[0,0],[1,0],[1,1],[0,1]]}"#).unwrap();
        assert_eq!(visible_vertices(&sq, P::new(0.5, 0.5)).unwrap().len(), 4);
        assert!(matches!(
            visible_vertices(&d, P::new(5.0, 5.0)),
            Err(Error::OutsideDomain(_))
        ));
    }

    proptest! {
        #[test]
        fn symmetric_and_hereditary(x1 in 0.0..10.0f64, y1 in 0.0..10.0f64, x2 in 0.0..10.0f64, y2 in 0.0..10.0f64, f in 0.05..0.95f64) {
            let d = d1();
            let p = P::new(x1, y1);
            let q = P::new(x2, y2);
            prop_assume!(d.contains(p) && d.contains(q));
            let pq = visible(&d, p, q).unwrap();
            prop_assert_eq!(pq, visible(&d, q, p).unwrap());
            if pq {
                let r = p.lerp(q, f);
                prop_assert!(visible(&d, p, r).unwrap() && visible(&d, r, q).unwrap());
            }
        }
    }
}
