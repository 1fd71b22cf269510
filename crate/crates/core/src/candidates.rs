//! Candidate points for geodesic centers.
//!
//! A center is a vertex, or a point pinned down by a small system of
//! path-length equalities plus angle conditions on its farthest points.
//! The generators below produce such points for the special
//! configurations (one farthest point, empty π-range), the general
//! configurations (several farthest points whose π-ranges cancel) and the
//! degenerate ones (surplus shortest paths). Only points that pass an exact
//! re-check with the geodesic module are emitted.
//!
//! General configurations are not enumerated over all vertex tuples.
//! Instead a coarse grid of trial sources is refined toward local minima of
//! `d_max`, and the pivot structure of the near-farthest points seen there
//! fixes which couplings to solve for.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::Serialize;

use crate::center::descend;
use crate::domain::{PointLocation, PolygonalDomain};
use crate::error::{Error, Result};
use crate::farthest::{
    describe_farthest, dmax_and_farthest, equidistant_on_segment, location_consistent, weighted_equidistant,
    FarthestSearch,
};
use crate::geodesic::{distance, general_position_report, SourceField};
use crate::geom::{signed_angle, Point};
use crate::pirange::{canonicalize_interior, edge_angles, pirange_from_couples, pirange_interior, Diagnostics};
use crate::visibility::{visible_unchecked, VisibilityGraph};

type P = Point<f64>;

/// Default cap on enumerated tuples.
pub const DEFAULT_BUDGET: u64 = 10_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DegenerateKind {
    /// `t` is a vertex reached by three paths.
    VertexTarget,
    /// `t` is the crossing of two pivot segments.
    CrossingTarget,
    /// `s` lies on the segment between two roots.
    RootSegment,
    /// `s` lies on a polygon edge.
    EdgeLocus,
}

/// Which configuration produced a candidate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CaseTag {
    Vertex,
    SpecialEdge,
    SpecialInterior,
    /// Farthest points counted as `[interior, edge, vertex]`.
    General {
        s_on_edge: bool,
        counts: [u8; 3],
    },
    Degenerate(DegenerateKind),
}

impl CaseTag {
    pub fn is_general(&self) -> bool {
        matches!(self, CaseTag::General { .. })
    }
}

impl fmt::Display for CaseTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CaseTag::Vertex => write!(f, "vertex"),
            CaseTag::SpecialEdge => write!(f, "special-E"),
            CaseTag::SpecialInterior => write!(f, "special-I"),
            CaseTag::General {
                s_on_edge,
                counts: [i, e, v],
            } => {
                if *s_on_edge {
                    write!(f, "G-sE-({i},{e},{v})")
                } else {
                    write!(f, "G-({i},{e},{v})")
                }
            }
            CaseTag::Degenerate(k) => write!(
                f,
                "D-{}",
                match k {
                    DegenerateKind::VertexTarget => "vertex-target",
                    DegenerateKind::CrossingTarget => "crossing-target",
                    DegenerateKind::RootSegment => "root-segment",
                    DegenerateKind::EdgeLocus => "edge-locus",
                }
            ),
        }
    }
}

impl FromStr for CaseTag {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("unknown case tag {text:?}"));
        let tag = match text {
            "vertex" => CaseTag::Vertex,
            "special-E" => CaseTag::SpecialEdge,
            "special-I" => CaseTag::SpecialInterior,
            "D-vertex-target" => CaseTag::Degenerate(DegenerateKind::VertexTarget),
            "D-crossing-target" => CaseTag::Degenerate(DegenerateKind::CrossingTarget),
            "D-root-segment" => CaseTag::Degenerate(DegenerateKind::RootSegment),
            "D-edge-locus" => CaseTag::Degenerate(DegenerateKind::EdgeLocus),
            _ => {
                let rest = text.strip_prefix("G-").ok_or_else(bad)?;
                let (s_on_edge, rest) = match rest.strip_prefix("sE-").or_else(|| rest.strip_prefix("s∈E-")) {
                    Some(r) => (true, r),
                    None => (false, rest),
                };
                let inner = rest
                    .strip_prefix('(')
                    .and_then(|r| r.strip_suffix(')'))
                    .ok_or_else(bad)?;
                let nums: Vec<u8> = inner
                    .split(',')
                    .map(|x| x.trim().parse::<u8>())
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|_| bad())?;
                if nums.len() != 3 {
                    return Err(bad());
                }
                CaseTag::General {
                    s_on_edge,
                    counts: [nums[0], nums[1], nums[2]],
                }
            }
        };
        Ok(tag)
    }
}

impl Serialize for CaseTag {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        ser.collect_str(self)
    }
}

/// Where an unknown point lives.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "index", rename_all = "snake_case")]
pub enum Slot {
    Vertex(usize),
    Edge(usize),
    Free,
}

impl Slot {
    fn dim(self) -> usize {
        match self {
            Slot::Vertex(_) => 0,
            Slot::Edge(_) => 1,
            Slot::Free => 2,
        }
    }

    fn of(loc: PointLocation) -> Option<Slot> {
        match loc {
            PointLocation::Vertex { index } => Some(Slot::Vertex(index)),
            PointLocation::Edge { edge, .. } => Some(Slot::Edge(edge)),
            PointLocation::Interior => Some(Slot::Free),
            PointLocation::Outside => None,
        }
    }

    fn matches(self, loc: PointLocation) -> bool {
        match (self, loc) {
            (Slot::Vertex(i), PointLocation::Vertex { index }) => i == index,
            (Slot::Edge(e), PointLocation::Edge { edge, .. }) => e == edge,
            (Slot::Free, PointLocation::Interior) => true,
            _ => false,
        }
    }

    fn point(self, dom: &PolygonalDomain, x: &[f64]) -> P {
        match self {
            Slot::Vertex(i) => dom.vertex(i),
            Slot::Edge(e) => {
                let (a, b) = dom.edge(e);
                a + (b - a) * (x[0] / a.dist(b))
            }
            Slot::Free => P::new(x[0], x[1]),
        }
    }

    fn params(self, dom: &PolygonalDomain, p: P) -> Vec<f64> {
        match self {
            Slot::Vertex(_) => vec![],
            Slot::Edge(e) => {
                let (a, b) = dom.edge(e);
                let len = a.dist(b);
                vec![((p - a).dot(b - a) / len).clamp(0.0, len)]
            }
            Slot::Free => vec![p.x, p.y],
        }
    }
}

/// One tracked shortest path, by its s-pivot `u` and t-pivot `v`. Both are
/// absent for a direct segment.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Couple {
    pub u: Option<usize>,
    pub v: Option<usize>,
}

impl Couple {
    pub const DIRECT: Couple = Couple { u: None, v: None };

    fn hops(self, dom: &PolygonalDomain, s: P, t: P) -> (P, P) {
        match (self.u, self.v) {
            (Some(u), Some(v)) => (dom.vertex(u), dom.vertex(v)),
            _ => (t, s),
        }
    }

    fn length(self, dom: &PolygonalDomain, graph: &VisibilityGraph, s: P, t: P) -> f64 {
        match (self.u, self.v) {
            (Some(u), Some(v)) => s.dist(dom.vertex(u)) + graph.vertex_distance(u, v) + dom.vertex(v).dist(t),
            _ => s.dist(t),
        }
    }
}

/// A farthest point of a candidate together with the paths that reach it.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TargetInfo {
    pub point: P,
    pub slot: Slot,
    pub couples: Vec<Couple>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CandidatePoint {
    pub point: P,
    pub case_tag: CaseTag,
    /// Common length of all recorded paths.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d_value: Option<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub path_info: Vec<TargetInfo>,
}

impl CandidatePoint {
    pub fn bare(point: P, case_tag: CaseTag) -> Self {
        CandidatePoint {
            point,
            case_tag,
            d_value: None,
            path_info: vec![],
        }
    }
}

type Residual<'a> = Box<dyn Fn(&[f64]) -> f64 + Send + Sync + 'a>;

/// Square or overdetermined system of scalar residuals.
pub struct EquationSystem<'a> {
    pub unknowns: usize,
    pub constraints: Vec<Residual<'a>>,
    /// Typical magnitude of the unknowns; sets difference steps and the
    /// convergence threshold.
    pub scale: f64,
}

impl<'a> EquationSystem<'a> {
    pub fn new(unknowns: usize, scale: f64) -> Self {
        EquationSystem {
            unknowns,
            constraints: Vec::new(),
            scale,
        }
    }

    pub fn push(&mut self, f: impl Fn(&[f64]) -> f64 + Send + Sync + 'a) {
        self.constraints.push(Box::new(f));
    }

    fn residual(&self, x: &[f64]) -> Option<DVector<f64>> {
        let r = DVector::from_iterator(self.constraints.len(), self.constraints.iter().map(|f| f(x)));
        r.iter().all(|v| v.is_finite()).then_some(r)
    }

    fn jacobian(&self, x: &[f64]) -> Option<DMatrix<f64>> {
        let m = self.constraints.len();
        let mut j = DMatrix::zeros(m, self.unknowns);
        let mut xp = x.to_vec();
        for k in 0..self.unknowns {
            let h = 1e-7 * self.scale.max(x[k].abs()).max(1e-3);
            xp[k] = x[k] + h;
            let hi = self.residual(&xp)?;
            xp[k] = x[k] - h;
            let lo = self.residual(&xp)?;
            xp[k] = x[k];
            j.set_column(k, &((hi - lo) / (2.0 * h)));
        }
        Some(j)
    }

    fn tolerance(&self) -> f64 {
        1e-12 * self.scale.max(1.0)
    }
}

/// Damped Gauss-Newton from one seed.
fn newton(sys: &EquationSystem, seed: &[f64]) -> Option<Vec<f64>> {
    let tol = sys.tolerance();
    let mut x = seed.to_vec();
    let mut r = sys.residual(&x)?;
    for _ in 0..100 {
        if r.amax() <= tol {
            return Some(x);
        }
        let j = sys.jacobian(&x)?;
        let svd = j.svd(true, true);
        let cutoff = 1e-13 * svd.singular_values.max();
        let step = svd.solve(&(-&r), cutoff).ok()?;
        let mut lam = 1.0;
        loop {
            let trial: Vec<f64> = x.iter().zip(step.iter()).map(|(a, d)| a + lam * d).collect();
            if let Some(rt) = sys.residual(&trial) {
                if rt.norm() < r.norm() {
                    x = trial;
                    r = rt;
                    break;
                }
            }
            lam *= 0.5;
            if lam < 1e-8 {
                return (r.amax() <= tol).then_some(x);
            }
        }
    }
    (r.amax() <= tol).then_some(x)
}

/// Solutions reached from the seeds, without duplicates.
pub fn solve_system(sys: &EquationSystem, seeds: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let same = 1e-9 * sys.scale.max(1.0);
    let mut out: Vec<Vec<f64>> = Vec::new();
    for seed in seeds {
        if seed.len() != sys.unknowns {
            continue;
        }
        if let Some(x) = newton(sys, seed) {
            if !out.iter().any(|y| y.iter().zip(&x).all(|(a, b)| (a - b).abs() <= same)) {
                out.push(x);
            }
        }
    }
    out
}

/// Tuning of the generators.
#[derive(Clone, Debug)]
pub struct CandidateOptions {
    /// Run on domains that violate general position.
    pub force: bool,
    /// Cap on enumerated tuples.
    pub budget: u64,
    /// Cells of the coarse probe grid along the longer bounding-box side.
    pub grid_cells: usize,
    /// Number of grid points refined into probes.
    pub probes: usize,
    pub refine_iters: usize,
}

impl Default for CandidateOptions {
    fn default() -> Self {
        CandidateOptions {
            force: false,
            budget: DEFAULT_BUDGET,
            grid_cells: 16,
            probes: 12,
            refine_iters: 80,
        }
    }
}

/// What an equation system adds on top of the path-length equalities.
#[derive(Clone, Copy, Debug, PartialEq)]
enum Extra {
    None,
    /// `α = π` and `β₁ + β₂ = π` at an edge target.
    SpecialEdge,
    /// `a_i = b_i` at an interior target.
    SpecialInterior,
    /// The bounding line of the only π-range contains the edge of `s`.
    EdgeBoundary(usize),
    /// The two π-ranges are opposite half-planes.
    Opposite,
}

impl Extra {
    fn count(self) -> usize {
        match self {
            Extra::None => 0,
            Extra::SpecialEdge | Extra::SpecialInterior => 2,
            Extra::EdgeBoundary(_) | Extra::Opposite => 1,
        }
    }
}

#[derive(Clone, Debug)]
struct Structure {
    s_slot: Slot,
    targets: Vec<(Slot, Vec<Couple>)>,
    extra: Extra,
}

impl Structure {
    fn unknowns(&self) -> usize {
        self.s_slot.dim() + self.targets.iter().map(|t| t.0.dim()).sum::<usize>() + 1
    }

    fn equations(&self) -> usize {
        self.targets.iter().map(|t| t.1.len()).sum::<usize>() + self.extra.count()
    }

    fn decode(&self, dom: &PolygonalDomain, x: &[f64]) -> (P, Vec<P>, f64) {
        let mut k = self.s_slot.dim();
        let s = self.s_slot.point(dom, &x[..k]);
        let mut ts = Vec::with_capacity(self.targets.len());
        for (slot, _) in &self.targets {
            ts.push(slot.point(dom, &x[k..k + slot.dim()]));
            k += slot.dim();
        }
        (s, ts, x[k])
    }

    fn encode(&self, dom: &PolygonalDomain, s: P, ts: &[P], rho: f64) -> Vec<f64> {
        let mut x = self.s_slot.params(dom, s);
        for ((slot, _), &t) in self.targets.iter().zip(ts) {
            x.extend(slot.params(dom, t));
        }
        x.push(rho);
        x
    }

    fn system<'a>(&'a self, dom: &'a PolygonalDomain, graph: &'a VisibilityGraph) -> EquationSystem<'a> {
        let mut sys = EquationSystem::new(self.unknowns(), dom.diameter());
        for (i, (_, couples)) in self.targets.iter().enumerate() {
            for &c in couples {
                sys.push(move |x| {
                    let (s, ts, rho) = self.decode(dom, x);
                    c.length(dom, graph, s, ts[i]) - rho
                });
            }
        }
        let tol = dom.tolerance();
        match self.extra {
            Extra::None => {}
            Extra::SpecialEdge => {
                let edge_parts = move |x: &[f64]| {
                    let (s, ts, _) = self.decode(dom, x);
                    let (slot, couples) = &self.targets[0];
                    let Slot::Edge(e) = *slot else { return None };
                    let hops = [couples[0].hops(dom, s, ts[0]), couples[1].hops(dom, s, ts[0])];
                    edge_angles(s, ts[0], dom.edge(e), hops, tol).ok()
                };
                sys.push(move |x| {
                    edge_parts(x).map_or(f64::NAN, |(a1, a2, ..)| {
                        signed_angle(a2.value() - a1.value() - std::f64::consts::PI)
                    })
                });
                sys.push(move |x| {
                    edge_parts(x).map_or(f64::NAN, |(_, _, b1, b2, _)| {
                        b1.value() + b2.value() - std::f64::consts::PI
                    })
                });
            }
            Extra::SpecialInterior => {
                let gaps = move |x: &[f64]| {
                    let (s, ts, _) = self.decode(dom, x);
                    let c = &self.targets[0].1;
                    let hops = [
                        c[0].hops(dom, s, ts[0]),
                        c[1].hops(dom, s, ts[0]),
                        c[2].hops(dom, s, ts[0]),
                    ];
                    let (al, be, _) = canonicalize_interior(s, ts[0], hops, tol).ok()?;
                    match pirange_interior(al, be, tol).ok()?.diagnostics {
                        Diagnostics::Interior { a, b, .. } => Some((a, b)),
                        _ => None,
                    }
                };
                for k in 0..2 {
                    sys.push(move |x| gaps(x).map_or(f64::NAN, |(a, b)| a[k] - b[k]));
                }
            }
            Extra::EdgeBoundary(e) => {
                let (a, b) = dom.edge(e);
                let phi = (b - a).y.atan2((b - a).x);
                sys.push(move |x| {
                    let (s, ts, _) = self.decode(dom, x);
                    self.normal(dom, s, &ts, 0)
                        .map_or(f64::NAN, |n| signed_angle(n - phi - 1.5 * std::f64::consts::PI))
                });
            }
            Extra::Opposite => {
                sys.push(move |x| {
                    let (s, ts, _) = self.decode(dom, x);
                    match (self.normal(dom, s, &ts, 0), self.normal(dom, s, &ts, 1)) {
                        (Some(n0), Some(n1)) => signed_angle(n1 - n0 - std::f64::consts::PI),
                        _ => f64::NAN,
                    }
                });
            }
        }
        sys
    }

    /// Middle direction of the π-range of target `i`.
    fn normal(&self, dom: &PolygonalDomain, s: P, ts: &[P], i: usize) -> Option<f64> {
        let (slot, couples) = &self.targets[i];
        let loc = slot_location(dom, *slot, ts[i]);
        let hops: Vec<(P, P)> = couples.iter().map(|c| c.hops(dom, s, ts[i])).collect();
        let r = pirange_from_couples(dom, s, ts[i], loc, &hops).ok()?;
        if r.special {
            return None;
        }
        r.range.widest_mid()
    }

    fn tag(&self) -> CaseTag {
        let mut counts = [0u8; 3];
        for (slot, _) in &self.targets {
            counts[match slot {
                Slot::Free => 0,
                Slot::Edge(_) => 1,
                Slot::Vertex(_) => 2,
            }] += 1;
        }
        match self.extra {
            Extra::SpecialEdge => CaseTag::SpecialEdge,
            Extra::SpecialInterior => CaseTag::SpecialInterior,
            _ => CaseTag::General {
                s_on_edge: matches!(self.s_slot, Slot::Edge(_)),
                counts,
            },
        }
    }
}

fn slot_location(dom: &PolygonalDomain, slot: Slot, p: P) -> PointLocation {
    match slot {
        Slot::Vertex(index) => PointLocation::Vertex { index },
        Slot::Edge(edge) => {
            let (a, b) = dom.edge(edge);
            PointLocation::Edge {
                edge,
                param: (p - a).dot(b - a) / (b - a).dot(b - a),
            }
        }
        Slot::Free => PointLocation::Interior,
    }
}

/// Exact re-check of a solved configuration: every recorded path is a real
/// shortest path, each target is consistent with its location class, the
/// pivot orders agree at interior targets, and the π-ranges together with
/// the free directions of `s` leave nothing.
pub fn validate_quadruple(dom: &PolygonalDomain, graph: &VisibilityGraph, s: P, targets: &[TargetInfo]) -> bool {
    let Ok(s_loc) = dom.require_inside(s) else {
        return false;
    };
    let _ = s_loc;
    let tol = dom.tolerance();
    let mut range = match dom.free_direction_range(s) {
        Ok(r) => r,
        Err(_) => return false,
    };
    let mut common: Option<f64> = None;
    for target in targets {
        let t = target.point;
        let loc = dom.classify(t);
        if !target.slot.matches(loc) || target.couples.is_empty() {
            return false;
        }
        let Ok(d) = distance(dom, graph, s, t) else {
            return false;
        };
        let len_tol = 1e-8 * d.max(1.0);
        if common.is_some_and(|c| (c - d).abs() > len_tol) {
            return false;
        }
        common = Some(d);
        for c in &target.couples {
            let (u, v) = c.hops(dom, s, t);
            let seen = match (c.u, c.v) {
                (Some(_), Some(_)) => visible_unchecked(dom, s, u) && visible_unchecked(dom, v, t),
                _ => visible_unchecked(dom, s, t),
            };
            if !seen || (c.length(dom, graph, s, t) - d).abs() > len_tol {
                return false;
            }
        }
        let hops: Vec<(P, P)> = target.couples.iter().map(|c| c.hops(dom, s, t)).collect();
        let pivots: Vec<P> = hops.iter().map(|h| h.1).collect();
        if !location_consistent(dom, t, loc, &pivots) {
            return false;
        }
        if matches!(loc, PointLocation::Interior)
            && (hops.len() != 3 || canonicalize_interior(s, t, [hops[0], hops[1], hops[2]], tol).is_err())
        {
            return false;
        }
        match pirange_from_couples(dom, s, t, slot_location(dom, target.slot, t), &hops) {
            Ok(r) => range = range.intersect(&r.range),
            Err(_) => return false,
        }
    }
    range.measure() <= 10.0 * tol.ang
}

/// Merges points closer than the length tolerance. A merged group keeps
/// the copy with the largest `d_value`.
pub fn dedupe(points: Vec<CandidatePoint>, eps: f64) -> Vec<CandidatePoint> {
    let mut out: Vec<CandidatePoint> = Vec::new();
    for c in points {
        match out.iter_mut().find(|o| o.point.dist(c.point) <= eps) {
            Some(o) => {
                let better = match (o.d_value, c.d_value) {
                    (None, Some(_)) => true,
                    (Some(a), Some(b)) => b > a,
                    _ => false,
                };
                if better {
                    *o = c;
                }
            }
            None => out.push(c),
        }
    }
    out
}

/// A refined trial source and the near-farthest points seen from it.
#[derive(Clone, Debug)]
struct Probe {
    s: P,
    targets: Vec<ProbeTarget>,
}

#[derive(Clone, Debug)]
struct ProbeTarget {
    point: P,
    slot: Slot,
    couples: Vec<Couple>,
    /// Index of the near-farthest point this variant belongs to.
    origin: usize,
}

/// Shared state of the generators for one domain.
pub struct Generator<'a> {
    dom: &'a PolygonalDomain,
    graph: &'a VisibilityGraph,
    opts: CandidateOptions,
    probes: OnceLock<Vec<Probe>>,
}

impl<'a> Generator<'a> {
    /// Fails on a domain that violates general position unless forced.
    pub fn new(dom: &'a PolygonalDomain, graph: &'a VisibilityGraph, opts: CandidateOptions) -> Result<Self> {
        if !opts.force {
            let report = general_position_report(dom, graph);
            if !report.is_clean() {
                return Err(Error::GeneralPositionViolated(report.violation_count()));
            }
        }
        Ok(Self::unchecked(dom, graph, opts))
    }

    pub(crate) fn unchecked(dom: &'a PolygonalDomain, graph: &'a VisibilityGraph, opts: CandidateOptions) -> Self {
        Generator {
            dom,
            graph,
            opts,
            probes: OnceLock::new(),
        }
    }

    /// Exact configurations suggested by the near-farthest points of `s`.
    pub fn snap(&self, s: P) -> Vec<CandidatePoint> {
        match self.probe_at(s) {
            Some(p) => self.solve_probes(std::slice::from_ref(&p), |_| true),
            None => vec![],
        }
    }

    fn reflex(&self) -> Vec<usize> {
        (0..self.dom.n()).filter(|&v| self.dom.is_reflex(v)).collect()
    }

    fn check_budget(&self, tuples: u64) -> Result<()> {
        if tuples > self.opts.budget {
            return Err(Error::CombinatorialBudgetExceeded(tuples));
        }
        Ok(())
    }

    pub fn vertex_candidates(&self) -> Vec<CandidatePoint> {
        self.dom
            .vertices()
            .iter()
            .map(|&p| CandidatePoint::bare(p, CaseTag::Vertex))
            .collect()
    }

    /// Special configurations: the edge case by direct enumeration of
    /// `(e, v₁, v₂, u₁, u₂)`, both cases also by solving from the probes.
    pub fn special(&self) -> Result<Vec<CandidatePoint>> {
        let mut out = self.special_edge()?;
        out.extend(self.probed(|tag| matches!(tag, CaseTag::SpecialEdge | CaseTag::SpecialInterior)));
        Ok(out)
    }

    fn special_edge(&self) -> Result<Vec<CandidatePoint>> {
        let (dom, graph) = (self.dom, self.graph);
        let reflex = self.reflex();
        let r = reflex.len() as u64;
        self.check_budget(dom.n() as u64 * r * r.saturating_sub(1) / 2 * r * r)?;
        let eps = dom.eps();
        let work: Vec<(usize, usize, usize)> = (0..dom.n())
            .flat_map(|e| {
                let reflex = &reflex;
                (0..reflex.len()).flat_map(move |i| (i + 1..reflex.len()).map(move |j| (e, reflex[i], reflex[j])))
            })
            .collect();
        let found: Vec<Vec<CandidatePoint>> = work
            .par_iter()
            .map(|&(e, v1, v2)| {
                let mut out = Vec::new();
                let (a, b) = dom.edge(e);
                let len = a.dist(b);
                let dir = (b - a) * (1.0 / len);
                let nrm = dir.perp();
                let (p1, p2) = (dom.vertex(v1), dom.vertex(v2));
                let (a1, n1) = ((p1 - a).dot(dir), (p1 - a).dot(nrm));
                let (a2, n2) = ((p2 - a).dot(dir), (p2 - a).dot(nrm));
                if n1 <= eps || n2 <= eps {
                    return out;
                }
                // The perpendicular at t bisects ∠v₁tv₂ exactly here.
                let lam = (n2 * a1 + n1 * a2) / (n1 + n2);
                if lam <= eps || lam >= len - eps {
                    return out;
                }
                let t = a + dir * lam;
                if !visible_unchecked(dom, t, p1) || !visible_unchecked(dom, t, p2) {
                    return out;
                }
                let Ok(field) = SourceField::new(dom, graph, t) else {
                    return out;
                };
                let tol = 1e-9
                    * field
                        .to_vertex
                        .iter()
                        .cloned()
                        .filter(|d| d.is_finite())
                        .fold(1.0, f64::max);
                let roots = |v: usize| -> Vec<(usize, f64)> {
                    let tail = dom.vertex(v).dist(t);
                    reflex
                        .iter()
                        .filter_map(|&u| {
                            let c = graph.vertex_distance(u, v) + tail;
                            ((c - field.to_vertex[u]).abs() <= tol).then_some((u, c))
                        })
                        .collect()
                };
                let (r1, r2) = (roots(v1), roots(v2));
                for &(u1, c1) in &r1 {
                    for &(u2, c2) in &r2 {
                        if u1 == u2 || !graph.is_edge(u1, u2) {
                            continue;
                        }
                        let (q1, q2) = (dom.vertex(u1), dom.vertex(u2));
                        let l = q1.dist(q2);
                        let mu = (l + c2 - c1) / (2.0 * l);
                        if mu * l <= eps || (1.0 - mu) * l <= eps {
                            continue;
                        }
                        let s = q1.lerp(q2, mu);
                        let target = TargetInfo {
                            point: t,
                            slot: Slot::Edge(e),
                            couples: vec![
                                Couple {
                                    u: Some(u1),
                                    v: Some(v1),
                                },
                                Couple {
                                    u: Some(u2),
                                    v: Some(v2),
                                },
                            ],
                        };
                        if validate_quadruple(dom, graph, s, std::slice::from_ref(&target)) {
                            out.push(CandidatePoint {
                                point: s,
                                case_tag: CaseTag::SpecialEdge,
                                d_value: Some(mu * l + c1),
                                path_info: vec![target],
                            });
                        }
                    }
                }
                out
            })
            .collect();
        Ok(found.into_iter().flatten().collect())
    }

    /// General configurations, optionally restricted to one case.
    pub fn general(&self, case: Option<CaseTag>) -> Result<Vec<CandidatePoint>> {
        if let Some(tag) = case {
            if !tag.is_general() {
                return Err(Error::Validation(format!("{tag} is not a general case")));
            }
        }
        Ok(self.probed(|tag| tag.is_general() && case.is_none_or(|c| c == tag)))
    }

    fn probes(&self) -> &[Probe] {
        self.probes.get_or_init(|| self.compute_probes())
    }

    fn compute_probes(&self) -> Vec<Probe> {
        let (dom, graph) = (self.dom, self.graph);
        let (lo, hi) = dom.bbox();
        let mut h = (hi.x - lo.x).max(hi.y - lo.y) / self.opts.grid_cells.max(2) as f64;
        let mut grid = Vec::new();
        // Thin domains can slip between the cells; halve until enough land inside.
        for _ in 0..8 {
            grid.clear();
            let (nx, ny) = (((hi.x - lo.x) / h).ceil() as usize, ((hi.y - lo.y) / h).ceil() as usize);
            for i in 0..=nx {
                for j in 0..=ny {
                    let p = P::new(lo.x + (i as f64 + 0.5) * h, lo.y + (j as f64 + 0.5) * h);
                    if matches!(dom.classify(p), PointLocation::Interior) {
                        grid.push(p);
                    }
                }
            }
            if grid.len() >= self.opts.probes {
                break;
            }
            h *= 0.5;
        }
        let mut scored: Vec<(f64, P)> = grid
            .par_iter()
            .filter_map(|&p| dmax_and_farthest(dom, graph, p).ok().map(|r| (r.dmax, p)))
            .collect();
        scored.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.x.partial_cmp(&b.1.x).unwrap()));
        let mut seeds: Vec<P> = Vec::new();
        for &(_, p) in &scored {
            if seeds.len() >= self.opts.probes {
                break;
            }
            if seeds.iter().all(|q| q.dist(p) > 1.5 * h) {
                seeds.push(p);
            }
        }
        let refined: Vec<P> = seeds
            .par_iter()
            .filter_map(|&p| descend(dom, graph, p, self.opts.refine_iters).ok().map(|d| d.point))
            .collect();
        let mut uniq: Vec<P> = Vec::new();
        for p in refined {
            if uniq.iter().all(|q| q.dist(p) > 1e-7 * dom.diameter().max(1.0)) {
                uniq.push(p);
            }
        }
        uniq.par_iter().filter_map(|&s| self.probe_at(s)).collect()
    }

    fn probe_at(&self, s: P) -> Option<Probe> {
        let (dom, graph) = (self.dom, self.graph);
        let search = FarthestSearch::new(dom, graph, s).ok()?;
        let near = search.near_max(0.02 * dom.diameter());
        let mut targets = Vec::new();
        let mut origin = 0;
        for e in near.iter().filter(|e| search.is_local_max(e.point, e.value)).take(6) {
            let Ok(f) = describe_farthest(dom, graph, s, e.point) else {
                continue;
            };
            let Some(slot) = Slot::of(f.location) else { continue };
            let couples: Vec<Couple> = f
                .paths
                .iter()
                .map(|p| Couple {
                    u: p.s_pivot(),
                    v: p.t_pivot(),
                })
                .collect();
            let want = if couples.len() == 1 && couples[0] == Couple::DIRECT {
                1
            } else {
                slot.dim() + 1
            };
            if couples.len() < want || couples.is_empty() {
                continue;
            }
            for pick in combinations(couples.len(), want).into_iter().take(10) {
                targets.push(ProbeTarget {
                    point: f.point,
                    slot,
                    couples: pick.iter().map(|&k| couples[k]).collect(),
                    origin,
                });
            }
            origin += 1;
        }
        (!targets.is_empty()).then_some(Probe { s, targets })
    }

    /// Solves every structure suggested by the probes whose tag passes `keep`.
    fn probed(&self, keep: impl Fn(CaseTag) -> bool + Sync) -> Vec<CandidatePoint> {
        self.solve_probes(self.probes(), keep)
    }

    fn solve_probes(&self, probes: &[Probe], keep: impl Fn(CaseTag) -> bool + Sync) -> Vec<CandidatePoint> {
        let dom = self.dom;
        let mut jobs: Vec<(Structure, Vec<f64>)> = Vec::new();
        for probe in probes {
            let s0 = probe.s;
            let mut s_slots = Vec::new();
            if matches!(dom.classify(s0), PointLocation::Interior | PointLocation::Edge { .. }) {
                s_slots.push(Slot::Free);
            }
            for e in 0..dom.n() {
                let (a, b) = dom.edge(e);
                if crate::geom::segment_distance(a, b, s0) <= 0.02 * dom.diameter() {
                    s_slots.push(Slot::Edge(e));
                }
            }
            let m = probe.targets.len();
            for size in 1..=3.min(m) {
                for pick in combinations(m, size) {
                    let ts: Vec<&ProbeTarget> = pick.iter().map(|&k| &probe.targets[k]).collect();
                    let mut origins: Vec<usize> = ts.iter().map(|t| t.origin).collect();
                    origins.dedup();
                    if origins.len() != size {
                        continue;
                    }
                    for &s_slot in &s_slots {
                        let extra = match (s_slot, size) {
                            (Slot::Free, 1) => match ts[0].slot {
                                Slot::Edge(_) => Extra::SpecialEdge,
                                Slot::Free => Extra::SpecialInterior,
                                Slot::Vertex(_) => continue,
                            },
                            (Slot::Free, 2) => Extra::Opposite,
                            (Slot::Edge(e), 1) => Extra::EdgeBoundary(e),
                            _ => Extra::None,
                        };
                        let st = Structure {
                            s_slot,
                            targets: ts.iter().map(|t| (t.slot, t.couples.clone())).collect(),
                            extra,
                        };
                        if st.unknowns() != st.equations() || !keep(st.tag()) {
                            continue;
                        }
                        let pts: Vec<P> = ts.iter().map(|t| t.point).collect();
                        let rho = ts
                            .iter()
                            .flat_map(|t| t.couples.iter().map(|c| c.length(dom, self.graph, s0, t.point)))
                            .sum::<f64>()
                            / st.targets.iter().map(|t| t.1.len()).sum::<usize>() as f64;
                        let x0 = st.encode(dom, s0, &pts, rho);
                        jobs.push((st, x0));
                    }
                }
            }
        }
        let found: Vec<Vec<CandidatePoint>> = jobs.par_iter().map(|(st, x0)| self.solve_structure(st, x0)).collect();
        found.into_iter().flatten().collect()
    }

    fn solve_structure(&self, st: &Structure, x0: &[f64]) -> Vec<CandidatePoint> {
        let (dom, graph) = (self.dom, self.graph);
        let sys = st.system(dom, graph);
        let mut seeds = vec![x0.to_vec()];
        let r = 1e-3 * dom.diameter();
        for k in 0..8 {
            let mut x = x0.to_vec();
            let dir = P::unit(k as f64 * std::f64::consts::FRAC_PI_4);
            match st.s_slot {
                Slot::Free => {
                    x[0] += r * dir.x;
                    x[1] += r * dir.y;
                }
                Slot::Edge(_) => x[0] += r * dir.x,
                Slot::Vertex(_) => {}
            }
            seeds.push(x);
        }
        let mut out = Vec::new();
        for x in solve_system(&sys, &seeds) {
            let (s, ts, rho) = st.decode(dom, &x);
            if !st.s_slot.matches(dom.classify(s)) {
                continue;
            }
            let targets: Vec<TargetInfo> = st
                .targets
                .iter()
                .zip(&ts)
                .map(|((slot, couples), &t)| TargetInfo {
                    point: t,
                    slot: *slot,
                    couples: couples.clone(),
                })
                .collect();
            if validate_quadruple(dom, graph, s, &targets) {
                out.push(CandidatePoint {
                    point: s,
                    case_tag: st.tag(),
                    d_value: Some(rho),
                    path_info: targets,
                });
            }
        }
        out
    }

    /// Degenerate configurations: sources tied between three weighted
    /// roots of a fixed target, or between two roots on a root segment or a
    /// polygon edge. Targets are the vertices and the crossings of segments
    /// between reflex vertices.
    pub fn degenerate(&self) -> Result<Vec<CandidatePoint>> {
        let dom = self.dom;
        let reflex = self.reflex();
        let mut anchors: Vec<(P, CaseTag)> = (0..dom.n())
            .map(|v| (dom.vertex(v), CaseTag::Degenerate(DegenerateKind::VertexTarget)))
            .collect();
        let segs: Vec<(usize, usize)> = reflex
            .iter()
            .enumerate()
            .flat_map(|(i, &a)| reflex[i + 1..].iter().map(move |&b| (a, b)))
            .collect();
        let sites = reflex.len() as u64 + 1;
        let per_anchor = sites * sites * sites / 6 + sites * sites / 2 * (dom.n() as u64 + 1);
        let seg_pairs = (segs.len() * segs.len().saturating_sub(1) / 2) as u64;
        self.check_budget(seg_pairs + (dom.n() as u64 + seg_pairs) * per_anchor)?;
        let eps = dom.eps();
        for i in 0..segs.len() {
            for j in i + 1..segs.len() {
                let (a, b) = (dom.vertex(segs[i].0), dom.vertex(segs[i].1));
                let (c, d) = (dom.vertex(segs[j].0), dom.vertex(segs[j].1));
                if !crate::geom::segments_cross(a, b, c, d, eps) {
                    continue;
                }
                let Some((pa, _)) = crate::geom::line_intersection(a, b, c, d) else {
                    continue;
                };
                let t = a.lerp(b, pa);
                if matches!(dom.classify(t), PointLocation::Interior)
                    && anchors.iter().all(|q| q.0.dist(t) > eps)
                    && [segs[i].0, segs[i].1, segs[j].0, segs[j].1]
                        .iter()
                        .all(|&v| visible_unchecked(dom, t, dom.vertex(v)))
                {
                    anchors.push((t, CaseTag::Degenerate(DegenerateKind::CrossingTarget)));
                }
            }
        }
        let found: Vec<Vec<CandidatePoint>> = anchors
            .par_iter()
            .map(|&(t, tag)| self.degenerate_at(t, tag, &reflex))
            .collect();
        let mut out = self.vertex_candidates();
        out.extend(found.into_iter().flatten());
        Ok(out)
    }

    fn degenerate_at(&self, t: P, tag: CaseTag, reflex: &[usize]) -> Vec<CandidatePoint> {
        let (dom, graph) = (self.dom, self.graph);
        let Ok(field) = SourceField::new(dom, graph, t) else {
            return vec![];
        };
        let eps = dom.eps();
        // Each site is a root u weighted by d(u, t); `None` is t itself.
        let mut sites: Vec<(Option<usize>, P, f64)> = vec![(None, t, 0.0)];
        for &u in reflex {
            let d = field.to_vertex[u];
            if d.is_finite() && dom.vertex(u).dist(t) > eps {
                sites.push((Some(u), dom.vertex(u), d));
            }
        }
        let t_slot = Slot::of(dom.classify(t)).unwrap_or(Slot::Free);
        let check = |s: P, claimed: f64, roots: &[usize]| -> bool {
            if dom.classify(s).is_outside() {
                return false;
            }
            if !roots.iter().all(|&k| visible_unchecked(dom, s, sites[k].1)) {
                return false;
            }
            let d = field.distance_to(dom, s);
            (d - claimed).abs() <= 1e-9 * d.max(1.0)
        };
        let emit = |s: P, claimed: f64, roots: &[usize], tag: CaseTag| CandidatePoint {
            point: s,
            case_tag: tag,
            d_value: Some(claimed),
            path_info: vec![TargetInfo {
                point: t,
                slot: t_slot,
                couples: roots
                    .iter()
                    .map(|&k| match sites[k].0 {
                        Some(u) => Couple {
                            u: Some(u),
                            v: last_pivot(dom, graph, &field, u, t),
                        },
                        None => Couple::DIRECT,
                    })
                    .collect(),
            }],
        };
        let m = sites.len();
        let mut out = Vec::new();
        for i in 0..m {
            for j in i + 1..m {
                for k in j + 1..m {
                    let tri = [
                        (sites[i].1, sites[i].2),
                        (sites[j].1, sites[j].2),
                        (sites[k].1, sites[k].2),
                    ];
                    for s in weighted_equidistant(tri).unwrap_or_default() {
                        let claimed = sites[i].2 + sites[i].1.dist(s);
                        if check(s, claimed, &[i, j, k]) {
                            out.push(emit(s, claimed, &[i, j, k], tag));
                        }
                    }
                }
                let pair = [(sites[i].1, sites[i].2), (sites[j].1, sites[j].2)];
                for e in 0..dom.n() {
                    let (a, b) = dom.edge(e);
                    for (s, _) in equidistant_on_segment(pair, a, b) {
                        let claimed = sites[i].2 + sites[i].1.dist(s);
                        if check(s, claimed, &[i, j]) {
                            out.push(emit(
                                s,
                                claimed,
                                &[i, j],
                                CaseTag::Degenerate(DegenerateKind::EdgeLocus),
                            ));
                        }
                    }
                }
                if let (Some(u1), Some(u2)) = (sites[i].0, sites[j].0) {
                    if !graph.is_edge(u1, u2) {
                        continue;
                    }
                    let l = sites[i].1.dist(sites[j].1);
                    let mu = (l + sites[j].2 - sites[i].2) / (2.0 * l);
                    if mu * l <= eps || (1.0 - mu) * l <= eps {
                        continue;
                    }
                    let s = sites[i].1.lerp(sites[j].1, mu);
                    let claimed = sites[i].2 + mu * l;
                    if check(s, claimed, &[i, j]) {
                        out.push(emit(
                            s,
                            claimed,
                            &[i, j],
                            CaseTag::Degenerate(DegenerateKind::RootSegment),
                        ));
                    }
                }
            }
        }
        out
    }
}

/// The vertex before `t` on some shortest path from vertex `u` to `t`.
fn last_pivot(dom: &PolygonalDomain, graph: &VisibilityGraph, field: &SourceField, u: usize, t: P) -> Option<usize> {
    let target = field.to_vertex[u];
    let tol = 1e-9 * target.max(1.0);
    field
        .visible
        .iter()
        .copied()
        .filter(|&v| (graph.vertex_distance(u, v) + dom.vertex(v).dist(t) - target).abs() <= tol)
        .min_by(|&a, &b| {
            graph
                .vertex_distance(u, a)
                .partial_cmp(&graph.vertex_distance(u, b))
                .unwrap()
        })
}

/// All `k`-subsets of `0..n` in lexicographic order.
fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if k <= n {
        rec(0, n, k, &mut Vec::new(), &mut out);
    }
    out
}

pub fn special_candidates(
    dom: &PolygonalDomain,
    graph: &VisibilityGraph,
    opts: &CandidateOptions,
) -> Result<Vec<CandidatePoint>> {
    Generator::new(dom, graph, opts.clone())?.special()
}

pub fn general_candidates(
    dom: &PolygonalDomain,
    graph: &VisibilityGraph,
    case: Option<CaseTag>,
    opts: &CandidateOptions,
) -> Result<Vec<CandidatePoint>> {
    Generator::new(dom, graph, opts.clone())?.general(case)
}

pub fn degenerate_candidates(
    dom: &PolygonalDomain,
    graph: &VisibilityGraph,
    opts: &CandidateOptions,
) -> Result<Vec<CandidatePoint>> {
    Generator::new(dom, graph, opts.clone())?.degenerate()
}
