//! Geodesic centers: candidate evaluation and local descent.

use rayon::prelude::*;
use serde::Serialize;

use crate::candidates::{dedupe, CandidateOptions, CaseTag, Generator};
use crate::domain::PolygonalDomain;
use crate::error::{Error, Result};
use crate::farthest::{dmax_and_farthest, FarthestReport, FarthestSearch};
use crate::geodesic::{all_shortest_paths, DEFAULT_REL_TOL};
use crate::geom::{halfplane_range, DirectionRange, Point};
use crate::pirange::{necessary_condition_for, pirange};
use crate::visibility::VisibilityGraph;

pub use crate::oracle::{brute_force_center, OracleCenter};

type P = Point<f64>;

#[derive(Clone, Debug, Serialize)]
pub struct CenterResult {
    pub centers: Vec<P>,
    pub radius: f64,
    pub per_center: Vec<FarthestReport>,
    /// Case that produced each center.
    pub provenance: Vec<CaseTag>,
    /// Whether `R(s)` is empty at each center; absent when a farthest point
    /// is degenerate.
    pub necessary: Vec<Option<bool>>,
    pub candidates_evaluated: usize,
}

/// Evaluates `d_max` on every candidate and keeps the minimizers.
pub fn solve(dom: &PolygonalDomain, graph: &VisibilityGraph, opts: &CandidateOptions) -> Result<CenterResult> {
    let gen = Generator::new(dom, graph, opts.clone())?;
    let mut all = gen.vertex_candidates();
    all.extend(gen.special()?);
    all.extend(gen.general(None)?);
    all.extend(gen.degenerate()?);
    let all = dedupe(all, dom.eps());
    log::debug!("evaluating {} candidates", all.len());
    let reports: Vec<Option<FarthestReport>> = all
        .par_iter()
        .map(|c| dmax_and_farthest(dom, graph, c.point).ok())
        .collect();
    let radius = reports.iter().flatten().map(|r| r.dmax).fold(f64::INFINITY, f64::min);
    if !radius.is_finite() {
        return Err(Error::NoConvergence("no candidate could be evaluated".into()));
    }
    let tie = dom.tolerance().len_at(radius);
    let mut res = CenterResult {
        centers: vec![],
        radius,
        per_center: vec![],
        provenance: vec![],
        necessary: vec![],
        candidates_evaluated: all.len(),
    };
    for (c, r) in all.iter().zip(reports) {
        let Some(r) = r else { continue };
        if r.dmax > radius + tie {
            continue;
        }
        let verdict = match necessary_condition_for(dom, graph, r.clone()) {
            Ok(nc) => Some(nc.empty),
            Err(Error::NotApplicable(_)) => None,
            Err(e) => return Err(e),
        };
        res.centers.push(c.point);
        res.per_center.push(r);
        res.provenance.push(c.case_tag);
        res.necessary.push(verdict);
    }
    Ok(res)
}

/// Outcome of [`descend`].
#[derive(Clone, Copy, Debug)]
pub struct Descent {
    pub point: P,
    pub dmax: f64,
    /// Stopped because no admissible direction or no step was left.
    pub converged: bool,
    pub iterations: usize,
}

/// Directions that shorten every path to `t`, falling back to moving
/// toward all first hops at once when `t` is degenerate.
fn shrinking_directions(dom: &PolygonalDomain, graph: &VisibilityGraph, s: P, t: P) -> DirectionRange<f64> {
    if let Ok(r) = pirange(dom, graph, s, t) {
        return r.range;
    }
    let mut range = DirectionRange::full();
    if let Ok(paths) = all_shortest_paths(dom, graph, s, t, DEFAULT_REL_TOL) {
        for p in paths {
            let hop = p.first_hop() - s;
            range = range.intersect(&halfplane_range(crate::geom::Angle::new(hop.y.atan2(hop.x))));
        }
    }
    range
}

/// Descent on `d_max`: step along the middle of the directions admissible
/// for every nearly farthest point, accept only strict decreases and
/// shrink the step otherwise.
pub fn descend(dom: &PolygonalDomain, graph: &VisibilityGraph, s0: P, max_iter: usize) -> Result<Descent> {
    dom.require_inside(s0)?;
    let eps = dom.eps();
    let ang = dom.tolerance().ang;
    let mut s = s0;
    let mut d = dmax_and_farthest(dom, graph, s)?.dmax;
    let mut step = 0.05 * dom.diameter();
    for it in 0..max_iter {
        if step < eps {
            return Ok(Descent {
                point: s,
                dmax: d,
                converged: true,
                iterations: it,
            });
        }
        let search = FarthestSearch::new(dom, graph, s)?;
        let band = (2.0 * step).max(dom.tolerance().len_at(dom.diameter()));
        let mut range = dom.free_direction_range(s)?;
        for e in search.near_max(band) {
            if e.value < d - band || !search.is_local_max(e.point, e.value) {
                continue;
            }
            range = range.intersect(&shrinking_directions(dom, graph, s, e.point));
            if range.measure() <= ang {
                break;
            }
        }
        let Some(theta) = range.widest_mid().filter(|_| range.measure() > ang) else {
            step *= 0.5;
            continue;
        };
        let trial = s + P::unit(theta) * step;
        let accepted = dom.contains(trial)
            && match dmax_and_farthest(dom, graph, trial) {
                Ok(r) if r.dmax < d => {
                    s = trial;
                    d = r.dmax;
                    true
                }
                _ => false,
            };
        if accepted {
            step *= 1.5;
        } else {
            step *= 0.5;
        }
    }
    Ok(Descent {
        point: s,
        dmax: d,
        converged: false,
        iterations: max_iter,
    })
}

/// Moves `s0` downhill on `d_max` until no admissible direction is left.
/// A point that already satisfies the necessary condition comes back
/// unchanged.
pub fn local_refine(dom: &PolygonalDomain, graph: &VisibilityGraph, s0: P, max_iter: usize) -> Result<P> {
    let report = dmax_and_farthest(dom, graph, s0)?;
    if let Ok(nc) = necessary_condition_for(dom, graph, report) {
        if nc.empty {
            return Ok(s0);
        }
    }
    let out = descend(dom, graph, s0, max_iter)?;
    // Descent stalls a little short of kinks of d_max; an exact
    // configuration close by finishes the job.
    let gen = Generator::unchecked(dom, graph, CandidateOptions::default());
    let reach = 1e-3 * dom.diameter();
    let snapped = gen
        .snap(out.point)
        .into_iter()
        .filter(|c| c.point.dist(out.point) <= reach)
        .filter_map(|c| dmax_and_farthest(dom, graph, c.point).ok().map(|r| (r.dmax, c.point)))
        .filter(|&(v, _)| v <= out.dmax + dom.tolerance().len_at(out.dmax))
        .min_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    match snapped {
        Some((_, p)) => Ok(p),
        None if out.converged => Ok(out.point),
        None => Err(Error::NoProgress(max_iter)),
    }
}
