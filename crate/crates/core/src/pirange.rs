//! Admissible directions for moving a source away from being a center.
//!
//! For a farthest point `t` of `s` the set of directions that let both
//! points move while every tracked shortest path gets shorter is an open
//! half-circle of directions, or empty in codimension-two configurations.
//! The closed forms below are generic over the scalar type; the
//! domain-aware wrappers further down work in `f64`.

use crate::domain::{PointLocation, PolygonalDomain};
use crate::error::{Error, Result};
use crate::farthest::{dmax_and_farthest, FarthestReport};
use crate::geodesic::{all_shortest_paths, DEFAULT_REL_TOL};
use crate::geom::{angle_of, halfplane_range, normalize_angle, Angle, Arc, DirectionRange, Point};
use crate::scalar::{Scalar, Tolerance};
use crate::visibility::VisibilityGraph;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PathDerivativeInput<T> {
    pub s: Point<T>,
    pub t: Point<T>,
    pub u: Point<T>,
    pub v: Point<T>,
    pub r_s: Angle<T>,
    pub r_t: Angle<T>,
    /// Speed of `t` relative to `s`.
    pub tau: T,
}

/// First and second derivative of `|su| + d(u, v) + |vt|` when `s` moves
/// along `r_s` at unit speed and `t` along `r_t` at speed `tau`.
pub fn path_derivatives<T: Scalar>(inp: &PathDerivativeInput<T>, tol: &Tolerance<T>) -> Result<(T, T)> {
    if inp.tau < T::zero() || !inp.tau.is_finite() {
        return Err(Error::DegenerateInput(format!("negative speed ratio {}", inp.tau)));
    }
    let from_u = angle_of(inp.u, inp.s, tol)?;
    let from_v = angle_of(inp.v, inp.t, tol)?;
    let cs = (inp.r_s.value() - from_u.value()).cos();
    let ct = (inp.r_t.value() - from_v.value()).cos();
    let ss = T::one() - cs * cs;
    let st = T::one() - ct * ct;
    let d1 = cs + inp.tau * ct;
    // t covers τ·h in time h, so its curvature term scales with τ².
    let d2 = ss.max(T::zero()) / inp.s.dist(inp.u) + inp.tau * inp.tau * st.max(T::zero()) / inp.t.dist(inp.v);
    Ok((d1, d2))
}

/// Named intermediate quantities of the closed forms.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Diagnostics<T> {
    Vertex {
        alpha: T,
    },
    Edge {
        lambda: T,
        alpha: T,
        beta1: T,
        beta2: T,
    },
    Interior {
        delta: T,
        delta1: T,
        delta2: T,
        alpha: [T; 3],
        beta: [T; 3],
        a: [T; 3],
        b: [T; 3],
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct PiRangeResult<T> {
    pub range: DirectionRange<T>,
    pub special: bool,
    pub diagnostics: Diagnostics<T>,
}

/// Open half-circle `(start, start + π)`.
fn half_from<T: Scalar>(start: T) -> DirectionRange<T> {
    DirectionRange::from_arc(Arc::open(start, start + T::PI()))
}

/// The single-path case: directions with a positive component toward `u`.
pub fn pirange_vertex<T: Scalar>(s: Point<T>, u: Point<T>, tol: &Tolerance<T>) -> Result<PiRangeResult<T>> {
    let a = angle_of(s, u, tol)?;
    Ok(PiRangeResult {
        range: halfplane_range(a),
        special: false,
        diagnostics: Diagnostics::Vertex { alpha: a.value() },
    })
}

/// Two paths to a point on an edge. `beta1`, `beta2` are the directions of
/// the t-pivots measured counterclockwise from the edge line, with
/// `beta1 ∈ [0, π/2)` and `beta2 ∈ (π/2, π]`.
pub fn pirange_edge<T: Scalar>(
    alpha1: Angle<T>,
    alpha2: Angle<T>,
    beta1: Angle<T>,
    beta2: Angle<T>,
    tol: &Tolerance<T>,
) -> Result<PiRangeResult<T>> {
    let half = T::FRAC_PI_2();
    let (b1, b2) = (beta1.value(), beta2.value());
    if !(b1 < half && b2 > half && b2 <= T::PI() + tol.ang) || (b1 == T::zero() && (b2 - T::PI()).abs() <= tol.ang) {
        return Err(Error::PreconditionViolated(format!(
            "edge angles beta1={b1}, beta2={b2} outside [0, π/2) × (π/2, π]"
        )));
    }
    let a1 = alpha1.value();
    let alpha = alpha2.value() - a1;
    let lambda = alpha.cos() - b2.cos() / b1.cos();
    let sa = alpha.sin();
    let diagnostics = Diagnostics::Edge {
        lambda,
        alpha: normalize_angle(alpha),
        beta1: b1,
        beta2: b2,
    };
    let eps = tol.special;
    let (range, special) = if sa.abs() <= eps && lambda.abs() <= eps {
        (DirectionRange::empty(), true)
    } else if sa.abs() <= eps {
        if lambda > T::zero() {
            (half_from(a1 - half), false)
        } else {
            (half_from(a1 - T::lit(3.0) * half), false)
        }
    } else {
        let start = a1 - (lambda / sa).atan();
        if sa > T::zero() {
            (half_from(start), false)
        } else {
            (half_from(start - T::PI()), false)
        }
    };
    Ok(PiRangeResult {
        range,
        special,
        diagnostics,
    })
}

/// Three paths to an interior point, inputs in canonical order: the
/// t-pivots clockwise around `t`, the s-pivots counterclockwise around `s`.
pub fn pirange_interior<T: Scalar>(
    alpha: [Angle<T>; 3],
    beta: [Angle<T>; 3],
    tol: &Tolerance<T>,
) -> Result<PiRangeResult<T>> {
    let al = alpha.map(|a| a.value());
    let be = beta.map(|b| b.value());
    let b = [
        normalize_angle(be[0] - be[1]),
        normalize_angle(be[1] - be[2]),
        normalize_angle(be[2] - be[0]),
    ];
    let a = [
        normalize_angle(al[1] - al[0]),
        normalize_angle(al[2] - al[1]),
        normalize_angle(al[0] - al[2]),
    ];
    if b.iter().any(|&x| x <= tol.ang || x >= T::PI() - tol.ang) {
        return Err(Error::PreconditionViolated(format!(
            "t-pivot gaps {:?} not all in (0, π)",
            b
        )));
    }
    let sum = b[0] + b[1] + b[2];
    if (sum - T::tau()).abs() > T::lit(10.0) * tol.ang {
        return Err(Error::PreconditionViolated("t-pivot gaps do not sum to 2π".into()));
    }
    let d21 = be[1] - be[0];
    let d31 = be[2] - be[0];
    let e21 = al[1] - al[0];
    let e31 = al[2] - al[0];
    let delta = e31.sin() / d31.sin() - e21.sin() / d21.sin();
    let delta1 = (d21.cos() - e21.cos()) / d21.sin();
    let delta2 = (d31.cos() - e31.cos()) / d31.sin();
    let diagnostics = Diagnostics::Interior {
        delta,
        delta1,
        delta2,
        alpha: al,
        beta: be,
        a,
        b,
    };
    let half = T::FRAC_PI_2();
    let eps = tol.special;
    let gap = delta1 - delta2;
    let (range, special) = if delta.abs() <= eps && gap.abs() <= eps {
        (DirectionRange::empty(), true)
    } else if delta.abs() <= eps {
        if gap > T::zero() {
            (half_from(al[0] - half), false)
        } else {
            (half_from(al[0] - T::lit(3.0) * half), false)
        }
    } else {
        let start = al[0] - (gap / delta).atan();
        if delta > T::zero() {
            (half_from(start), false)
        } else {
            (half_from(start - T::PI()), false)
        }
    };
    Ok(PiRangeResult {
        range,
        special,
        diagnostics,
    })
}

/// Relabels three couples `(u_i, v_i)` into canonical order and returns
/// `(α, β, permutation)` with `α_i = →s u_i`, `β_i = →t v_i`.
#[allow(clippy::type_complexity)]
pub fn canonicalize_interior<T: Scalar>(
    s: Point<T>,
    t: Point<T>,
    couples: [(Point<T>, Point<T>); 3],
    tol: &Tolerance<T>,
) -> Result<([Angle<T>; 3], [Angle<T>; 3], [usize; 3])> {
    for i in 0..3 {
        for j in i + 1..3 {
            if couples[i].1.dist(couples[j].1) <= tol.len {
                return Err(Error::PreconditionViolated("repeated t-pivot".into()));
            }
        }
    }
    let mut beta = [Angle::default(); 3];
    let mut alpha = [Angle::default(); 3];
    for i in 0..3 {
        beta[i] = angle_of(t, couples[i].1, tol)?;
        alpha[i] = angle_of(s, couples[i].0, tol)?;
    }
    // Clockwise around t: decreasing angle, cyclically.
    let mut order = [0usize, 1, 2];
    order.sort_by(|&i, &j| {
        beta[j]
            .value()
            .partial_cmp(&beta[i].value())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let be = order.map(|i| beta[i].value());
    let gaps = [
        normalize_angle(be[0] - be[1]),
        normalize_angle(be[1] - be[2]),
        normalize_angle(be[2] - be[0]),
    ];
    if gaps.iter().any(|&g| g <= tol.ang || g >= T::PI() - tol.ang) {
        return Err(Error::PreconditionViolated(
            "t not strictly inside the t-pivot triangle".into(),
        ));
    }
    let al = order.map(|i| alpha[i].value());
    let a_sum = normalize_angle(al[1] - al[0]) + normalize_angle(al[2] - al[1]) + normalize_angle(al[0] - al[2]);
    let all_same = normalize_angle(al[1] - al[0]).min(T::tau() - normalize_angle(al[1] - al[0])) <= tol.ang
        && normalize_angle(al[2] - al[0]).min(T::tau() - normalize_angle(al[2] - al[0])) <= tol.ang;
    if !all_same && (a_sum - T::tau()).abs() > T::lit(10.0) * tol.ang {
        return Err(Error::NotCanonical(
            "s-pivots are not counterclockwise when t-pivots are clockwise".into(),
        ));
    }
    Ok((order.map(|i| alpha[i]), order.map(|i| beta[i]), order))
}

/// Edge-case angles for two couples meeting `t` on the edge `a → b`
/// (domain on the left). Returns `(α₁, α₂, β₁, β₂, swapped)`.
#[allow(clippy::type_complexity)]
pub fn edge_angles<T: Scalar>(
    s: Point<T>,
    t: Point<T>,
    edge: (Point<T>, Point<T>),
    couples: [(Point<T>, Point<T>); 2],
    tol: &Tolerance<T>,
) -> Result<(Angle<T>, Angle<T>, Angle<T>, Angle<T>, bool)> {
    let line = angle_of(edge.0, edge.1, tol)?;
    let mut rel = [T::zero(); 2];
    for i in 0..2 {
        let b = angle_of(t, couples[i].1, tol)?;
        let mut r = normalize_angle(b.value() - line.value());
        // Pivots on the line behind t come out as 2π − tiny.
        if r > T::PI() {
            if T::tau() - r <= tol.ang {
                r = T::zero();
            } else if r - T::PI() <= tol.ang {
                r = T::PI();
            } else {
                return Err(Error::PreconditionViolated(
                    "t-pivot on the outer side of the edge".into(),
                ));
            }
        }
        rel[i] = r;
    }
    let swapped = rel[0] > rel[1];
    let (i, j) = if swapped { (1, 0) } else { (0, 1) };
    Ok((
        angle_of(s, couples[i].0, tol)?,
        angle_of(s, couples[j].0, tol)?,
        Angle::new(rel[i]),
        Angle::new(rel[j]),
        swapped,
    ))
}

type P = Point<f64>;

/// What the t-end of the tracked paths may do.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TargetFreedom {
    /// `t` is a vertex and stays put.
    Fixed,
    /// `t` slides along an edge with this direction angle.
    Edge(f64),
    /// `t` moves freely.
    Free,
}

/// Whether some motion of `t` makes every t-pivot have a coupled path whose
/// length strictly decreases when `s` moves along `theta_s`.
///
/// `couples` holds `(α_u, β_v, v_id)`: direction from `s` to the s-pivot,
/// direction from `t` to the t-pivot, and a t-pivot label.
pub fn direction_feasible(couples: &[(f64, f64, usize)], freedom: TargetFreedom, theta_s: f64) -> bool {
    // With w = τ·(cos θ_t, sin θ_t) each path decreases iff
    // cos(α_u − θ_s) + w · e(β_v) > 0; for each t-pivot the best coupled
    // s-pivot decides.
    let mut labels: Vec<usize> = couples.iter().map(|c| c.2).collect();
    labels.sort_unstable();
    labels.dedup();
    let mut a: Vec<P> = Vec::new();
    let mut b: Vec<f64> = Vec::new();
    for &v in &labels {
        let best = couples
            .iter()
            .filter(|c| c.2 == v)
            .map(|c| (c.0 - theta_s).cos())
            .fold(f64::NEG_INFINITY, f64::max);
        let beta = couples.iter().find(|c| c.2 == v).map(|c| c.1).unwrap_or(0.0);
        let dir = P::unit(beta);
        let coeff = match freedom {
            TargetFreedom::Fixed => P::origin(),
            TargetFreedom::Edge(th) => P::new(dir.dot(P::unit(th)), 0.0),
            TargetFreedom::Free => dir,
        };
        a.push(coeff);
        b.push(-best);
    }
    open_halfplanes_feasible(&a, &b)
}

/// Whether `{w ∈ ℝ² : a_i · w > b_i ∀i}` is nonempty.
///
/// By the transposition theorem for strict systems it is empty iff some
/// `λ ≥ 0, λ ≠ 0` has `Σ λ_i a_i = 0` and `Σ λ_i b_i ≥ 0`; it suffices to
/// try the extreme rays of that cone, whose supports have at most three
/// elements in the plane.
pub fn open_halfplanes_feasible(a: &[P], b: &[f64]) -> bool {
    let m = a.len();
    let scale = a.iter().map(|p| p.norm()).fold(0.0, f64::max).max(1e-300);
    let zero = 1e-12 * scale;
    for i in 0..m {
        if a[i].norm() <= zero && b[i] >= 0.0 {
            return false;
        }
    }
    for i in 0..m {
        for j in i + 1..m {
            let (ni, nj) = (a[i].norm(), a[j].norm());
            if ni <= zero || nj <= zero {
                continue;
            }
            let antiparallel = a[i].cross(a[j]).abs() <= zero * scale && a[i].dot(a[j]) < 0.0;
            if antiparallel && b[i] / ni + b[j] / nj >= 0.0 {
                return false;
            }
        }
    }
    for i in 0..m {
        for j in i + 1..m {
            for k in j + 1..m {
                let l = [a[j].cross(a[k]), a[k].cross(a[i]), a[i].cross(a[j])];
                let big = l.iter().map(|x| x.abs()).fold(0.0, f64::max);
                if big <= zero * scale {
                    continue;
                }
                let pos = l.iter().all(|&x| x >= -zero * scale);
                let neg = l.iter().all(|&x| x <= zero * scale);
                if !(pos || neg) {
                    continue;
                }
                let sgn = if pos { 1.0 } else { -1.0 };
                let val = sgn * (l[0] * b[i] + l[1] * b[j] + l[2] * b[k]);
                if val >= 0.0 {
                    return false;
                }
            }
        }
    }
    true
}

/// Tracked couples of a non-degenerate farthest point, as angle triples for
/// [`direction_feasible`], along with the target's freedom.
fn tracked_couples(
    dom: &PolygonalDomain,
    graph: &VisibilityGraph,
    s: P,
    t: P,
) -> Result<(Vec<(f64, f64, usize)>, TargetFreedom, PointLocation)> {
    let paths = all_shortest_paths(dom, graph, s, t, DEFAULT_REL_TOL)?;
    let loc = dom.require_inside(t)?;
    check_path_count(loc, paths.len(), paths.iter().all(|p| p.vertices.is_empty()))?;
    let tol = dom.tolerance();
    let mut out = Vec::new();
    for p in &paths {
        let au = angle_of(s, p.first_hop(), tol)?.value();
        let bv = angle_of(t, p.last_hop(), tol)?.value();
        out.push((au, bv, p.t_pivot().unwrap_or(usize::MAX)));
    }
    let freedom = match loc {
        PointLocation::Vertex { .. } => TargetFreedom::Fixed,
        PointLocation::Edge { edge, .. } => {
            let (a, b) = dom.edge(edge);
            TargetFreedom::Edge((b - a).y.atan2((b - a).x))
        }
        _ => TargetFreedom::Free,
    };
    Ok((out, freedom, loc))
}

fn check_path_count(loc: PointLocation, count: usize, direct: bool) -> Result<()> {
    if direct {
        return Ok(());
    }
    let want = match loc {
        PointLocation::Vertex { .. } => 1,
        PointLocation::Edge { .. } => 2,
        _ => 3,
    };
    if count != want {
        return Err(Error::DegenerateFarthest(format!(
            "{count} shortest paths to a point of dimension {}",
            loc.dim()
        )));
    }
    Ok(())
}

/// Decides by direct search over target motions whether moving `s` along
/// `r_s` can shorten all tracked paths.
pub fn feasibility_oracle(dom: &PolygonalDomain, graph: &VisibilityGraph, s: P, t: P, r_s: Angle<f64>) -> Result<bool> {
    let (couples, freedom, _) = tracked_couples(dom, graph, s, t)?;
    Ok(direction_feasible(&couples, freedom, r_s.value()))
}

/// The π-range of `s` with respect to its farthest point `t`.
pub fn pirange(dom: &PolygonalDomain, graph: &VisibilityGraph, s: P, t: P) -> Result<PiRangeResult<f64>> {
    let paths = all_shortest_paths(dom, graph, s, t, DEFAULT_REL_TOL)?;
    let loc = dom.require_inside(t)?;
    let couples: Vec<(P, P)> = paths.iter().map(|p| (p.first_hop(), p.last_hop())).collect();
    pirange_from_couples(dom, s, t, loc, &couples)
}

/// The π-range for explicitly given paths, each described by its first
/// and last hop (`t` and `s` themselves for a direct segment).
pub fn pirange_from_couples(
    dom: &PolygonalDomain,
    s: P,
    t: P,
    loc: PointLocation,
    couples: &[(P, P)],
) -> Result<PiRangeResult<f64>> {
    let tol = dom.tolerance();
    let direct = couples.len() == 1 && couples[0].0 == t;
    if direct {
        return pirange_vertex(s, t, tol);
    }
    check_path_count(loc, couples.len(), false)?;
    match loc {
        PointLocation::Vertex { .. } => pirange_vertex(s, couples[0].0, tol),
        PointLocation::Edge { edge, .. } => {
            let (a1, a2, b1, b2, _) = edge_angles(s, t, dom.edge(edge), [couples[0], couples[1]], tol)?;
            pirange_edge(a1, a2, b1, b2, tol)
        }
        _ => {
            let (al, be, _) = canonicalize_interior(s, t, [couples[0], couples[1], couples[2]], tol)?;
            pirange_interior(al, be, tol)
        }
    }
}

/// `R(s, t) = R_f(s) ∩ R_π(s, t)`.
pub fn admissible_range(dom: &PolygonalDomain, graph: &VisibilityGraph, s: P, t: P) -> Result<DirectionRange<f64>> {
    let free = dom.free_direction_range(s)?;
    Ok(free.intersect(&pirange(dom, graph, s, t)?.range))
}

/// `R(s)`, the directions admissible for every farthest point at once.
#[derive(Clone, Debug)]
pub struct NecessaryCondition {
    pub empty: bool,
    pub range: DirectionRange<f64>,
    pub report: FarthestReport,
}

pub fn necessary_condition(dom: &PolygonalDomain, graph: &VisibilityGraph, s: P) -> Result<NecessaryCondition> {
    let report = dmax_and_farthest(dom, graph, s)?;
    necessary_condition_for(dom, graph, report)
}

pub fn necessary_condition_for(
    dom: &PolygonalDomain,
    graph: &VisibilityGraph,
    report: FarthestReport,
) -> Result<NecessaryCondition> {
    if report.has_degenerate() {
        return Err(Error::NotApplicable("degenerate farthest point present".into()));
    }
    let s = report.source;
    let mut range = dom.free_direction_range(s)?;
    for f in &report.farthest {
        range = range.intersect(&pirange(dom, graph, s, f.point)?.range);
    }
    let empty = range.measure() <= dom.tolerance().ang;
    Ok(NecessaryCondition { empty, range, report })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn tol() -> Tolerance<f64> {
        Tolerance::default()
    }

    fn deg(x: f64) -> Angle<f64> {
        Angle::from_degrees(x)
    }

    fn arc_deg(r: &DirectionRange<f64>) -> (f64, f64) {
        let a = r.arcs()[0];
        let mut s = a.start.to_degrees();
        if s > 180.0 {
            s -= 360.0;
        }
        (s, s + a.size.to_degrees())
    }

    #[test]
    fn derivative_examples() {
        let base = PathDerivativeInput {
            s: P::new(0.0, 0.0),
            t: P::new(5.0, 5.0),
            u: P::new(2.0, 0.0),
            v: P::new(5.0, 3.0),
            r_s: Angle::new(0.0),
            r_t: Angle::new(0.0),
            tau: 0.0,
        };
        let (d1, d2) = path_derivatives(&base, &tol()).unwrap();
        assert!((d1 + 1.0).abs() < 1e-15 && d2.abs() < 1e-15);
        let away = PathDerivativeInput {
            r_s: Angle::new(PI),
            ..base
        };
        let (d1, d2) = path_derivatives(&away, &tol()).unwrap();
        assert!((d1 - 1.0).abs() < 1e-15 && d2.abs() < 1e-15);
        let perp = PathDerivativeInput {
            r_s: Angle::new(FRAC_PI_2),
            ..base
        };
        let (d1, d2) = path_derivatives(&perp, &tol()).unwrap();
        assert!(d1.abs() < 1e-15 && (d2 - 0.5).abs() < 1e-15);
        let bad = PathDerivativeInput { u: base.s, ..base };
        assert!(path_derivatives(&bad, &tol()).is_err());
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let inp = PathDerivativeInput {
            s: P::new(0.3, -0.2),
            t: P::new(4.0, 2.0),
            u: P::new(1.5, 1.0),
            v: P::new(3.0, 0.5),
            r_s: Angle::new(2.0),
            r_t: Angle::new(-0.7),
            tau: 0.8,
        };
        let (d1, d2) = path_derivatives(&inp, &tol()).unwrap();
        let f = |h: f64| {
            let s = inp.s + inp.r_s.unit() * h;
            let t = inp.t + inp.r_t.unit() * (inp.tau * h);
            s.dist(inp.u) + t.dist(inp.v)
        };
        let h = 1e-4;
        assert!(((f(h) - f(-h)) / (2.0 * h) - d1).abs() < 1e-7);
        assert!(((f(h) - 2.0 * f(0.0) + f(-h)) / (h * h) - d2).abs() < 1e-5);
    }

    #[test]
    fn vertex_examples() {
        let o = P::new(0.0, 0.0);
        let r = pirange_vertex(o, P::new(1.0, 0.0), &tol()).unwrap();
        assert_eq!(arc_deg(&r.range), (-90.0, 90.0));
        let r = pirange_vertex(o, P::new(0.0, -3.0), &tol()).unwrap();
        let a = r.range.arcs()[0];
        assert!((a.start - PI).abs() < 1e-15 && (a.size - PI).abs() < 1e-15);
        let r = pirange_vertex(o, P::new(1.0, 1.0), &tol()).unwrap();
        let (lo, hi) = arc_deg(&r.range);
        assert!((lo + 45.0).abs() < 1e-12 && (hi - 135.0).abs() < 1e-12);
    }

    #[test]
    fn edge_reference_values() {
        let r = pirange_edge(deg(30.0), deg(90.0), deg(30.0), deg(135.0), &tol()).unwrap();
        let Diagnostics::Edge { lambda, .. } = r.diagnostics else {
            panic!()
        };
        assert!((lambda - 1.3165).abs() < 1e-3);
        let (lo, hi) = arc_deg(&r.range);
        assert!((lo + 26.66).abs() < 0.01 && (hi - 153.34).abs() < 0.01);

        let r = pirange_edge(deg(0.0), deg(180.0), deg(60.0), deg(120.0), &tol()).unwrap();
        assert!(r.special && r.range.is_empty());

        let r = pirange_edge(deg(40.0), deg(40.0), deg(30.0), deg(135.0), &tol()).unwrap();
        let Diagnostics::Edge { lambda, .. } = r.diagnostics else {
            panic!()
        };
        assert!((lambda - 1.8165).abs() < 1e-4);
        let (lo, hi) = arc_deg(&r.range);
        assert!((lo + 50.0).abs() < 1e-9 && (hi - 130.0).abs() < 1e-9);

        assert!(matches!(
            pirange_edge(deg(0.0), deg(10.0), deg(100.0), deg(135.0), &tol()),
            Err(Error::PreconditionViolated(_))
        ));
    }

    #[test]
    fn interior_reference_values() {
        // Angles chosen so the reference δ values come out.
        let right = pirange_interior(
            [deg(0.0), deg(100.0), deg(100.0)],
            [deg(0.0), deg(270.0), deg(120.0)],
            &tol(),
        )
        .unwrap();
        let Diagnostics::Interior {
            delta, delta1, delta2, ..
        } = right.diagnostics
        else {
            panic!()
        };
        assert!((delta - 2.1220).abs() < 1e-3);
        assert!((delta1 + 0.1736).abs() < 1e-3 && (delta2 + 0.3768).abs() < 1e-3);
        let (lo, hi) = arc_deg(&right.range);
        assert!((lo + 5.47).abs() < 0.02 && (hi - 174.53).abs() < 0.02, "{lo} {hi}");

        let left = pirange_interior(
            [deg(0.0), deg(100.0), deg(220.0)],
            [deg(0.0), deg(270.0), deg(120.0)],
            &tol(),
        )
        .unwrap();
        let Diagnostics::Interior {
            delta, delta1, delta2, ..
        } = left.diagnostics
        else {
            panic!()
        };
        assert!((delta - 0.2426).abs() < 1e-3);
        assert!((delta1 + 0.1736).abs() < 1e-3 && (delta2 - 0.3072).abs() < 1e-3);
        let (lo, hi) = arc_deg(&left.range);
        assert!((lo - 63.23).abs() < 0.02 && (hi - 243.23).abs() < 0.02, "{lo} {hi}");
    }

    #[test]
    fn interior_special_when_gaps_match() {
        let b = [deg(100.0), deg(150.0), deg(110.0)];
        let beta = [deg(0.0), deg(-100.0), deg(-250.0)];
        let alpha = [deg(20.0), deg(20.0 + 100.0), deg(20.0 + 250.0)];
        let r = pirange_interior(alpha, beta, &tol()).unwrap();
        assert!(r.special && r.range.is_empty());
        let Diagnostics::Interior { a, b: bb, .. } = r.diagnostics else {
            panic!()
        };
        for i in 0..3 {
            assert!((a[i] - bb[i]).abs() < 1e-12 && (bb[i] - b[i].value()).abs() < 1e-12);
        }
        assert!(matches!(
            pirange_interior(alpha, [deg(0.0), deg(10.0), deg(20.0)], &tol()),
            Err(Error::PreconditionViolated(_))
        ));
    }

    #[test]
    fn canonicalize_examples() {
        let t = P::new(0.0, 0.0);
        let s = P::new(10.0, 0.0);
        let vs = [P::unit(0.0), P::unit(2.0 * PI / 3.0), P::unit(4.0 * PI / 3.0)];
        // s-pivots mirror the t-pivots so the two orders agree.
        let us = [
            s + P::unit(PI) * 1.0,
            s + P::unit(PI - 2.0 * PI / 3.0),
            s + P::unit(PI + 2.0 * PI / 3.0),
        ];
        let couples = [(us[0], vs[0]), (us[1], vs[1]), (us[2], vs[2])];
        let (al, be, _) = canonicalize_interior(s, t, couples, &tol()).unwrap();
        let b = [
            be[0].value() - be[1].value(),
            be[1].value() - be[2].value(),
            be[2].value() - be[0].value(),
        ]
        .map(normalize_angle);
        assert!(b.iter().all(|&x| x > 0.0 && x < PI));
        let a = [
            al[1].value() - al[0].value(),
            al[2].value() - al[1].value(),
            al[0].value() - al[2].value(),
        ]
        .map(normalize_angle);
        assert!((a.iter().sum::<f64>() - 2.0 * PI).abs() < 1e-9);

        let outside = [(us[0], P::unit(0.0)), (us[1], P::unit(0.5)), (us[2], P::unit(1.0))];
        assert!(matches!(
            canonicalize_interior(s, t, outside, &tol()),
            Err(Error::PreconditionViolated(_))
        ));
        let repeated = [(us[0], vs[0]), (us[1], vs[0]), (us[2], vs[2])];
        assert!(matches!(
            canonicalize_interior(s, t, repeated, &tol()),
            Err(Error::PreconditionViolated(_))
        ));
        let crossed = [(us[0], vs[0]), (us[2], vs[1]), (us[1], vs[2])];
        assert!(matches!(
            canonicalize_interior(s, t, crossed, &tol()),
            Err(Error::NotCanonical(_))
        ));
    }

    #[test]
    fn halfplane_feasibility() {
        let a = [P::new(1.0, 0.0), P::new(-1.0, 0.0)];
        assert!(open_halfplanes_feasible(&a, &[-1.0, -1.0]));
        assert!(!open_halfplanes_feasible(&a, &[1.0, -1.0]));
        assert!(!open_halfplanes_feasible(&a, &[0.0, 0.0]));
        let tri = [P::unit(0.0), P::unit(2.0 * PI / 3.0), P::unit(4.0 * PI / 3.0)];
        assert!(open_halfplanes_feasible(&tri, &[-0.1, -0.1, -0.1]));
        assert!(!open_halfplanes_feasible(&tri, &[0.1, 0.1, -0.1]));
        assert!(!open_halfplanes_feasible(&[P::origin()], &[0.0]));
        assert!(open_halfplanes_feasible(&[P::origin()], &[-0.5]));
    }

    fn random_interior(rng: &mut impl rand::Rng) -> ([Angle<f64>; 3], [Angle<f64>; 3]) {
        // Gaps in (0, π) summing to 2π, by rejection.
        loop {
            let b1 = rng.gen_range(0.05..PI - 0.05);
            let b2 = rng.gen_range(0.05..PI - 0.05);
            let b3 = 2.0 * PI - b1 - b2;
            if !(0.05..PI - 0.05).contains(&b3) {
                continue;
            }
            let beta0: f64 = rng.gen_range(0.0..2.0 * PI);
            let beta = [beta0, beta0 - b1, beta0 - b1 - b2].map(Angle::new);
            let a1 = rng.gen_range(0.0..2.0 * PI);
            let a2 = rng.gen_range(0.0..2.0 * PI - a1);
            let alpha0: f64 = rng.gen_range(0.0..2.0 * PI);
            let alpha = [alpha0, alpha0 + a1, alpha0 + a1 + a2].map(Angle::new);
            return (alpha, beta);
        }
    }

    #[test]
    fn interior_matches_oracle_on_random_configurations() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..300 {
            let (alpha, beta) = random_interior(&mut rng);
            let r = pirange_interior(alpha, beta, &tol()).unwrap();
            let couples: Vec<(f64, f64, usize)> = (0..3).map(|i| (alpha[i].value(), beta[i].value(), i)).collect();
            for k in 0..72 {
                let th = k as f64 * PI / 36.0 + 0.001;
                if r.range.boundary_distance(th) < 1e-4 {
                    continue;
                }
                assert_eq!(
                    r.range.contains(th),
                    direction_feasible(&couples, TargetFreedom::Free, th),
                    "{alpha:?} {beta:?} {th}"
                );
            }
        }
    }

    proptest! {
        #[test]
        fn edge_range_measure_and_oracle(a1 in 0.0..2.0 * PI, a2 in 0.0..2.0 * PI, b1 in 0.0..1.5f64, b2 in 1.65..PI, line in 0.0..2.0 * PI) {
            let r = pirange_edge(Angle::new(a1), Angle::new(a2), Angle::new(b1), Angle::new(b2), &tol()).unwrap();
            let m = r.range.measure();
            prop_assert!(m.abs() < 1e-9 || (m - PI).abs() < 1e-9);
            let couples = [(a1, line + b1, 0), (a2, line + b2, 1)];
            for k in 0..36 {
                let th = k as f64 * PI / 18.0 + 0.003;
                if r.range.boundary_distance(th) > 1e-6 {
                    prop_assert_eq!(r.range.contains(th), direction_feasible(&couples, TargetFreedom::Edge(line), th));
                }
            }
        }

        #[test]
        fn interior_rotation_invariant(seed in 0u64..10_000) {
            use rand::SeedableRng;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let (al, be) = random_interior(&mut rng);
            let r0 = pirange_interior(al, be, &tol()).unwrap();
            let r1 = pirange_interior([al[1], al[2], al[0]], [be[1], be[2], be[0]], &tol()).unwrap();
            prop_assert_eq!(r0.special, r1.special);
            prop_assert!((r0.range.measure() - r1.range.measure()).abs() < 1e-9);
            prop_assert!((r0.range.intersect(&r1.range).measure() - r0.range.measure()).abs() < 1e-7);
            // Sanity on the generator: cot(β₃−β₁) < cot(β₂−β₁).
            let d21 = be[1].value() - be[0].value();
            let d31 = be[2].value() - be[0].value();
            prop_assert!(1.0 / d31.tan() - 1.0 / d21.tan() < 0.0);
        }
    }
}
