//! Planar primitives, angles on the circle, and direction ranges.
//!
//! A [`DirectionRange`] is a finite union of circular intervals, each stored
//! as a canonical start angle in `[0, 2π)` plus a size in `(0, 2π]`. The
//! all-directions range is a separate flag so intersection never has to
//! reason about an interval that wraps onto itself.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::scalar::{Scalar, Tolerance};

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Point<T> {
    pub x: T,
    pub y: T,
}

impl<T: Scalar> Point<T> {
    pub const fn new(x: T, y: T) -> Self {
        Point { x, y }
    }

    pub fn origin() -> Self {
        Point::new(T::zero(), T::zero())
    }

    /// Unit vector at angle `theta`.
    pub fn unit(theta: T) -> Self {
        Point::new(theta.cos(), theta.sin())
    }

    pub fn dot(self, o: Self) -> T {
        self.x * o.x + self.y * o.y
    }

    /// z-component of the 2D cross product.
    pub fn cross(self, o: Self) -> T {
        self.x * o.y - self.y * o.x
    }

    pub fn norm(self) -> T {
        self.x.hypot(self.y)
    }

    pub fn dist(self, o: Self) -> T {
        (self - o).norm()
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn lerp(self, o: Self, t: T) -> Self {
        self + (o - self) * t
    }

    pub fn midpoint(self, o: Self) -> Self {
        self.lerp(o, T::lit(0.5))
    }

    /// Counterclockwise rotation by `theta` about the origin.
    pub fn rotate(self, theta: T) -> Self {
        let (s, c) = theta.sin_cos();
        Point::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }

    pub fn perp(self) -> Self {
        Point::new(-self.y, self.x)
    }

    pub fn cast<U: Scalar>(self) -> Point<U> {
        Point::new(
            U::from(self.x).unwrap_or_else(U::nan),
            U::from(self.y).unwrap_or_else(U::nan),
        )
    }
}

impl<T: Scalar> Add for Point<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Point::new(self.x + o.x, self.y + o.y)
    }
}

impl<T: Scalar> Sub for Point<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Point::new(self.x - o.x, self.y - o.y)
    }
}

impl<T: Scalar> Mul<T> for Point<T> {
    type Output = Self;
    fn mul(self, k: T) -> Self {
        Point::new(self.x * k, self.y * k)
    }
}

impl<T: Scalar> Neg for Point<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Point::new(-self.x, -self.y)
    }
}

impl<T: Scalar> fmt::Display for Point<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

impl<T: Scalar + serde::Serialize> serde::Serialize for Point<T> {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        [self.x, self.y].serialize(ser)
    }
}

/// Twice the signed area of triangle `abc`; positive when counterclockwise.
pub fn orient<T: Scalar>(a: Point<T>, b: Point<T>, c: Point<T>) -> T {
    (b - a).cross(c - a)
}

/// Signed distance of `p` from the directed line through `a` and `b`
/// (positive on the left).
pub fn side_distance<T: Scalar>(a: Point<T>, b: Point<T>, p: Point<T>) -> T {
    let len = a.dist(b);
    if len == T::zero() {
        return a.dist(p);
    }
    orient(a, b, p) / len
}

/// Closest-point parameter of `p` on segment `ab`, clamped to `[0, 1]`.
pub fn project_param<T: Scalar>(a: Point<T>, b: Point<T>, p: Point<T>) -> T {
    let d = b - a;
    let l2 = d.dot(d);
    if l2 == T::zero() {
        return T::zero();
    }
    ((p - a).dot(d) / l2).max(T::zero()).min(T::one())
}

pub fn segment_distance<T: Scalar>(a: Point<T>, b: Point<T>, p: Point<T>) -> T {
    a.lerp(b, project_param(a, b, p)).dist(p)
}

/// Proper crossing of segments `pq` and `ab`: the interiors intersect in a
/// single point and neither segment merely touches the other's line.
pub fn segments_cross<T: Scalar>(p: Point<T>, q: Point<T>, a: Point<T>, b: Point<T>, eps: T) -> bool {
    let d1 = side_distance(p, q, a);
    let d2 = side_distance(p, q, b);
    let d3 = side_distance(a, b, p);
    let d4 = side_distance(a, b, q);
    ((d1 > eps && d2 < -eps) || (d1 < -eps && d2 > eps)) && ((d3 > eps && d4 < -eps) || (d3 < -eps && d4 > eps))
}

/// Intersection point of the lines `p + s(q-p)` and `a + t(b-a)`, as the
/// parameters `(s, t)`.
pub fn line_intersection<T: Scalar>(p: Point<T>, q: Point<T>, a: Point<T>, b: Point<T>) -> Option<(T, T)> {
    let r = q - p;
    let s = b - a;
    let den = r.cross(s);
    if den.abs() <= T::epsilon() * r.norm() * s.norm() {
        return None;
    }
    let w = a - p;
    Some((w.cross(s) / den, w.cross(r) / den))
}

/// An angle with its canonical representative in `[0, 2π)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, PartialOrd)]
pub struct Angle<T>(T);

impl<T: Scalar> Angle<T> {
    pub fn new(raw: T) -> Self {
        Angle(normalize_angle(raw))
    }

    pub fn from_degrees(deg: T) -> Self {
        Angle::new(deg.to_radians())
    }

    pub fn value(self) -> T {
        self.0
    }

    pub fn degrees(self) -> T {
        self.0.to_degrees()
    }

    /// Shortest unsigned angular separation, in `[0, π]`.
    pub fn separation(self, other: Self) -> T {
        let d = normalize_angle(self.0 - other.0);
        d.min(T::tau() - d)
    }

    pub fn approx_eq(self, other: Self, tol: T) -> bool {
        self.separation(other) <= tol
    }

    pub fn opposite(self) -> Self {
        Angle::new(self.0 + T::PI())
    }

    pub fn unit(self) -> Point<T> {
        Point::unit(self.0)
    }
}

impl<T: Scalar> fmt::Display for Angle<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Reduce an angle to `[0, 2π)`.
pub fn normalize_angle<T: Scalar>(raw: T) -> T {
    let tau = T::tau();
    let mut v = raw - tau * (raw / tau).floor();
    if v >= tau || v < T::zero() {
        v = T::zero();
    }
    v
}

/// Reduce an angle to `(-π, π]`.
pub fn signed_angle<T: Scalar>(raw: T) -> T {
    let v = normalize_angle(raw);
    if v > T::PI() {
        v - T::tau()
    } else {
        v
    }
}

/// Direction of the vector `to - from`, counterclockwise from the +x axis.
pub fn angle_of<T: Scalar>(from: Point<T>, to: Point<T>, tol: &Tolerance<T>) -> Result<Angle<T>> {
    let d = to - from;
    if !(d.norm() > tol.len) {
        return Err(Error::DegenerateInput(format!(
            "direction between coincident points {from} and {to}"
        )));
    }
    Ok(Angle::new(d.y.atan2(d.x)))
}

/// A circular interval `start .. start + size` with per-end openness.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Arc<T> {
    pub start: T,
    pub size: T,
    pub start_open: bool,
    pub end_open: bool,
}

impl<T: Scalar> Arc<T> {
    pub fn open(start: T, end: T) -> Self {
        Self::with_flags(start, end, true, true)
    }

    pub fn closed(start: T, end: T) -> Self {
        Self::with_flags(start, end, false, false)
    }

    /// Arc running counterclockwise from `start` to `end`; `end` is taken
    /// as the first representative at or after `start`.
    pub fn with_flags(start: T, end: T, start_open: bool, end_open: bool) -> Self {
        let s = normalize_angle(start);
        let mut size = end - start;
        if size > T::tau() || size < T::zero() {
            size = normalize_angle(size);
        }
        Arc {
            start: s,
            size,
            start_open,
            end_open,
        }
    }

    pub fn end(&self) -> T {
        self.start + self.size
    }

    pub fn contains(&self, theta: T) -> bool {
        let d = normalize_angle(theta - self.start);
        let inside_start = if self.start_open { d > T::zero() } else { true };
        let inside_end = if self.end_open { d < self.size } else { d <= self.size };
        (inside_start && inside_end) || (!self.start_open && d == T::zero())
    }

    /// Angle bisecting the arc.
    pub fn mid(&self) -> T {
        normalize_angle(self.start + self.size * T::lit(0.5))
    }
}

/// A set of directions, closed under intersection.
#[derive(Clone, Debug, PartialEq)]
pub struct DirectionRange<T> {
    full: bool,
    arcs: Vec<Arc<T>>,
}

impl<T: Scalar> DirectionRange<T> {
    pub fn full() -> Self {
        DirectionRange {
            full: true,
            arcs: Vec::new(),
        }
    }

    pub fn empty() -> Self {
        DirectionRange {
            full: false,
            arcs: Vec::new(),
        }
    }

    pub fn from_arc(arc: Arc<T>) -> Self {
        Self::from_arcs(vec![arc])
    }

    /// Builds a normalized range from arbitrary, possibly overlapping arcs.
    pub fn from_arcs(arcs: Vec<Arc<T>>) -> Self {
        let mut r = DirectionRange { full: false, arcs };
        r.normalize();
        r
    }

    pub fn is_full(&self) -> bool {
        self.full
    }

    /// True when no direction is contained. Zero-size pieces never survive
    /// normalization, so this is an exact test.
    pub fn is_empty(&self) -> bool {
        !self.full && self.arcs.is_empty()
    }

    pub fn arcs(&self) -> &[Arc<T>] {
        &self.arcs
    }

    pub fn measure(&self) -> T {
        if self.full {
            return T::tau();
        }
        self.arcs.iter().fold(T::zero(), |acc, a| acc + a.size)
    }

    pub fn contains(&self, theta: T) -> bool {
        self.full || self.arcs.iter().any(|a| a.contains(theta))
    }

    /// Distance from `theta` to the nearest endpoint of any arc; infinite
    /// for the full and empty ranges.
    pub fn boundary_distance(&self, theta: T) -> T {
        let at = Angle::new(theta);
        self.arcs
            .iter()
            .flat_map(|a| [a.start, a.end()])
            .map(|e| at.separation(Angle::new(e)))
            .fold(T::infinity(), T::min)
    }

    /// Direction in the middle of the largest piece, if any.
    pub fn widest_mid(&self) -> Option<T> {
        if self.full {
            return Some(T::zero());
        }
        self.arcs
            .iter()
            .max_by(|a, b| a.size.partial_cmp(&b.size).unwrap_or(std::cmp::Ordering::Equal))
            .map(|a| a.mid())
    }

    pub fn intersect(&self, other: &Self) -> Self {
        if self.full {
            return other.clone();
        }
        if other.full {
            return self.clone();
        }
        let mut out = Vec::new();
        for a in &self.arcs {
            for b in &other.arcs {
                intersect_arcs(a, b, &mut out);
            }
        }
        Self::from_arcs(out)
    }

    /// Merges overlapping or touching arcs and detects full coverage.
    fn normalize(&mut self) {
        if self.full {
            self.arcs.clear();
            return;
        }
        let tau = T::tau();
        let mut arcs: Vec<Arc<T>> = self
            .arcs
            .drain(..)
            .filter(|a| a.size > T::zero())
            .map(|mut a| {
                a.start = normalize_angle(a.start);
                a
            })
            .collect();
        if arcs.iter().any(|a| a.size >= tau) {
            self.full = true;
            return;
        }
        arcs.sort_by(|a, b| a.start.partial_cmp(&b.start).unwrap_or(std::cmp::Ordering::Equal));
        let mut merged: Vec<Arc<T>> = Vec::with_capacity(arcs.len());
        for a in arcs {
            if let Some(last) = merged.last_mut() {
                if touches(last.end(), last.end_open, a.start, a.start_open) {
                    if a.end() > last.end() {
                        last.size = a.end() - last.start;
                        last.end_open = a.end_open;
                    } else if a.end() == last.end() {
                        last.end_open = last.end_open && a.end_open;
                    }
                    continue;
                }
            }
            merged.push(a);
        }
        // The last arc may wrap past 2π onto the first ones.
        while merged.len() > 1 {
            let last = merged[merged.len() - 1];
            let first = merged[0];
            let wrapped_end = last.end() - tau;
            if touches(wrapped_end, last.end_open, first.start, first.start_open) {
                let new_end = wrapped_end.max(first.end());
                let end_open = if first.end() > wrapped_end {
                    first.end_open
                } else if first.end() < wrapped_end {
                    last.end_open
                } else {
                    first.end_open && last.end_open
                };
                let n = merged.len();
                merged[n - 1].size = new_end + tau - last.start;
                merged[n - 1].end_open = end_open;
                merged.remove(0);
            } else {
                break;
            }
        }
        if let Some(a) = merged.first() {
            if a.size >= tau {
                self.full = true;
                return;
            }
        }
        if merged.len() == 1 && merged[0].size >= tau {
            self.full = true;
            return;
        }
        self.arcs = merged;
    }
}

fn touches<T: Scalar>(end: T, end_open: bool, start: T, start_open: bool) -> bool {
    start < end || (start == end && !(end_open && start_open))
}

/// Pushes the pieces of `a ∩ b` onto `out`, dropping single directions.
fn intersect_arcs<T: Scalar>(a: &Arc<T>, b: &Arc<T>, out: &mut Vec<Arc<T>>) {
    let tau = T::tau();
    // Work in coordinates where `a` starts at zero.
    let shift = normalize_angle(b.start - a.start);
    for offset in [shift, shift - tau] {
        let lo_b = offset;
        let hi_b = offset + b.size;
        let (lo, lo_open) = if lo_b > T::zero() {
            (lo_b, b.start_open)
        } else if lo_b < T::zero() {
            (T::zero(), a.start_open)
        } else {
            (T::zero(), a.start_open || b.start_open)
        };
        let (hi, hi_open) = if hi_b < a.size {
            (hi_b, b.end_open)
        } else if hi_b > a.size {
            (a.size, a.end_open)
        } else {
            (a.size, a.end_open || b.end_open)
        };
        if hi > lo {
            out.push(Arc {
                start: normalize_angle(a.start + lo),
                size: hi - lo,
                start_open: lo_open,
                end_open: hi_open,
            });
        }
    }
}

/// Intersection of any number of ranges; the empty list yields the full range.
pub fn range_intersect<T: Scalar>(ranges: &[DirectionRange<T>]) -> DirectionRange<T> {
    ranges.iter().fold(DirectionRange::full(), |acc, r| acc.intersect(r))
}

/// Open range of size π of directions with positive component along the
/// unit vector at `bound_normal`.
pub fn halfplane_range<T: Scalar>(bound_normal: Angle<T>) -> DirectionRange<T> {
    let half = T::FRAC_PI_2();
    DirectionRange::from_arc(Arc::open(bound_normal.value() - half, bound_normal.value() + half))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn tol() -> Tolerance<f64> {
        Tolerance::default()
    }

    #[test]
    fn angle_of_axes_and_diagonal() {
        let o = Point::new(0.0, 0.0);
        assert_eq!(angle_of(o, Point::new(1.0, 0.0), &tol()).unwrap().value(), 0.0);
        assert!((angle_of(o, Point::new(0.0, 1.0), &tol()).unwrap().value() - FRAC_PI_2).abs() < 1e-15);
        let a = angle_of(o, Point::new(-1.0, -1.0), &tol()).unwrap().value();
        assert!((a - 5.0 * PI / 4.0).abs() < 1e-15);
        assert!(matches!(angle_of(o, o, &tol()), Err(Error::DegenerateInput(_))));
    }

    #[test]
    fn intersect_examples() {
        let full = DirectionRange::<f64>::full();
        assert!(range_intersect(&[full.clone(), full.clone()]).is_full());

        let upper = DirectionRange::from_arc(Arc::open(0.0, PI));
        let mid = DirectionRange::from_arc(Arc::open(FRAC_PI_2, 1.5 * PI));
        let r = range_intersect(&[upper.clone(), mid]);
        assert_eq!(r.arcs().len(), 1);
        let a = r.arcs()[0];
        assert!((a.start - FRAC_PI_2).abs() < 1e-15 && (a.end() - PI).abs() < 1e-15);
        assert!(a.start_open && a.end_open);

        let lower = DirectionRange::from_arc(Arc::open(PI, 2.0 * PI));
        assert!(range_intersect(&[upper, lower]).is_empty());
    }

    #[test]
    fn closed_half_meets_complementary_open_half_in_nothing() {
        let rf = DirectionRange::from_arc(Arc::closed(0.0, PI));
        let rp = DirectionRange::from_arc(Arc::open(PI, 2.0 * PI));
        assert!(rf.intersect(&rp).is_empty());
        // Closed meets closed at two isolated directions; those are dropped.
        let rc = DirectionRange::from_arc(Arc::closed(PI, 2.0 * PI));
        assert!(rf.intersect(&rc).is_empty());
    }

    #[test]
    fn halfplane_examples() {
        let east = halfplane_range(Angle::new(0.0));
        let a = east.arcs()[0];
        assert!((a.start - 1.5 * PI).abs() < 1e-15 && (a.size - PI).abs() < 1e-15);
        assert!(east.contains(0.0) && !east.contains(FRAC_PI_2) && !east.contains(PI));

        let north = halfplane_range(Angle::new(FRAC_PI_2));
        assert!(north.arcs()[0].start.abs() < 1e-15);
        let west = halfplane_range(Angle::new(PI));
        assert!((west.arcs()[0].start - FRAC_PI_2).abs() < 1e-15);
    }

    #[test]
    fn wrapping_union_becomes_full() {
        let r = DirectionRange::from_arcs(vec![Arc::closed(0.0, PI), Arc::closed(PI, 2.0 * PI)]);
        assert!(r.is_full());
        let r = DirectionRange::from_arcs(vec![Arc::open(-1.0f64, 1.0), Arc::open(0.5, 3.0)]);
        assert_eq!(r.arcs().len(), 1);
        assert!((r.measure() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn generic_over_f32() {
        let r = halfplane_range(Angle::new(1.0f32));
        assert!((r.measure() - std::f32::consts::PI).abs() < 1e-6);
        let a = angle_of(Point::new(0.0f32, 0.0), Point::new(0.0, -2.0), &Tolerance::default()).unwrap();
        assert!((a.value() - 1.5 * std::f32::consts::PI).abs() < 1e-5);
    }

    fn arb_range() -> impl Strategy<Value = DirectionRange<f64>> {
        prop::collection::vec((0.0..2.0 * PI, 0.01..4.0f64, any::<bool>(), any::<bool>()), 0..4).prop_map(|v| {
            DirectionRange::from_arcs(
                v.into_iter()
                    .map(|(s, l, so, eo)| Arc::with_flags(s, s + l, so, eo))
                    .collect(),
            )
        })
    }

    proptest! {
        #[test]
        fn angle_reversal(x1 in -50.0..50.0f64, y1 in -50.0..50.0f64, x2 in -50.0..50.0f64, y2 in -50.0..50.0f64) {
            let p = Point::new(x1, y1);
            let q = Point::new(x2, y2);
            prop_assume!(p.dist(q) > 1e-6);
            let a = angle_of(p, q, &tol()).unwrap();
            let b = angle_of(q, p, &tol()).unwrap();
            prop_assert!(a.approx_eq(b.opposite(), 1e-9));
        }

        #[test]
        fn halfplane_measure_is_pi(theta in -20.0..20.0f64) {
            prop_assert!((halfplane_range(Angle::new(theta)).measure() - PI).abs() < 1e-12);
        }

        #[test]
        fn intersection_set_algebra(a in arb_range(), b in arb_range(), c in arb_range(), probe in 0.0..2.0 * PI) {
            let ab = a.intersect(&b);
            let ba = b.intersect(&a);
            prop_assert!((ab.measure() - ba.measure()).abs() < 1e-9);
            let left = ab.intersect(&c);
            let right = a.intersect(&b.intersect(&c));
            prop_assert!((left.measure() - right.measure()).abs() < 1e-9);
            prop_assert!((a.intersect(&a).measure() - a.measure()).abs() < 1e-9);
            // Membership agrees with the pointwise definition away from endpoints.
            if ab.boundary_distance(probe) > 1e-9 && a.boundary_distance(probe) > 1e-9 && b.boundary_distance(probe) > 1e-9 {
                prop_assert_eq!(ab.contains(probe), a.contains(probe) && b.contains(probe));
            }
        }
    }
}
