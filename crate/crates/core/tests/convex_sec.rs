//! In a hole-free convex domain the geodesic center is the center of the
//! smallest circle enclosing the vertices.

use geocenter::candidates::CandidateOptions;
use geocenter::center::solve;
use geocenter::visibility::VisibilityGraph;
use geocenter::{instances, Point};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;

fn circle2(a: Point, b: Point) -> (Point, f64) {
    let c = a.midpoint(b);
    (c, c.dist(a))
}

fn circle3(a: Point, b: Point, c: Point) -> (Point, f64) {
    let (bx, by) = (b.x - a.x, b.y - a.y);
    let (cx, cy) = (c.x - a.x, c.y - a.y);
    let d = 2.0 * (bx * cy - by * cx);
    let (b2, c2) = (bx * bx + by * by, cx * cx + cy * cy);
    let o = Point::new(a.x + (cy * b2 - by * c2) / d, a.y + (bx * c2 - cx * b2) / d);
    (o, o.dist(a))
}

fn inside(circle: (Point, f64), p: Point) -> bool {
    p.dist(circle.0) <= circle.1 * (1.0 + 1e-12)
}

/// Welzl's move-to-front construction over a shuffled point set.
fn welzl(pts: &[Point], seed: u64) -> (Point, f64) {
    let mut p = pts.to_vec();
    p.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
    let mut c = (p[0], 0.0);
    for i in 1..p.len() {
        if inside(c, p[i]) {
            continue;
        }
        c = (p[i], 0.0);
        for j in 0..i {
            if inside(c, p[j]) {
                continue;
            }
            c = circle2(p[i], p[j]);
            for k in 0..j {
                if !inside(c, p[k]) {
                    c = circle3(p[i], p[j], p[k]);
                }
            }
        }
    }
    c
}

fn check(seed: u64) -> Result<(), TestCaseError> {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let dom = instances::random_convex(&mut rng, 9);
    let g = VisibilityGraph::build(&dom);
    let (c, r) = welzl(dom.vertices(), seed);
    let res = solve(&dom, &g, &CandidateOptions::default()).unwrap();
    prop_assert_eq!(res.centers.len(), 1);
    prop_assert!(res.centers[0].dist(c) <= 1e-8, "{} vs {}", res.centers[0], c);
    prop_assert!((res.radius - r).abs() <= 1e-8);
    Ok(())
}

// Two of the three farthest vertices are close together along a short edge.
#[test]
fn close_farthest_vertices() {
    check(796_715_872_598_532_984).unwrap();
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn convex_center_is_enclosing_circle(seed in any::<u64>()) {
        check(seed)?;
    }
}
