//! Reference domains and random domain generators.

use rand::Rng;

use crate::domain::PolygonalDomain;
use crate::geom::Point;

type P = Point<f64>;

fn ring(coords: &[(f64, f64)]) -> Vec<P> {
    coords.iter().map(|&(x, y)| P::new(x, y)).collect()
}

pub fn unit_square() -> PolygonalDomain {
    PolygonalDomain::new(ring(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]), vec![]).expect("valid")
}

/// 10×10 square with a centered 2×2 square hole.
pub fn d1() -> PolygonalDomain {
    PolygonalDomain::new(
        ring(&[(0.0, 0.0), (10.0, 0.0), (10.0, 10.0), (0.0, 10.0)]),
        vec![ring(&[(4.0, 4.0), (6.0, 4.0), (6.0, 6.0), (4.0, 6.0)])],
    )
    .expect("valid")
}

/// Inner triangle circumradius of [`d2`].
pub const D2_INNER: f64 = 0.5;
/// Seed of the symmetric jitter applied by [`d2`].
pub const D2_SEED: u64 = 20_150_601;

/// Equilateral triangle of circumradius `r` centered at the origin, one
/// vertex at angle `phase`.
pub fn equilateral(r: f64, phase: f64) -> Vec<P> {
    (0..3)
        .map(|k| P::unit(phase + k as f64 * std::f64::consts::TAU / 3.0) * r)
        .collect()
}

/// Two concentric equilateral triangles, the inner one a hole. The inner
/// triangle gets a seeded rotation and scale perturbation that keeps the
/// three-fold symmetry but breaks every axis of mirror symmetry and all
/// vertex collinearities.
pub fn d2() -> PolygonalDomain {
    d2_with_seed(D2_SEED)
}

pub fn d2_with_seed(seed: u64) -> PolygonalDomain {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let twist = rng.gen_range(0.05..0.15);
    let scale = 1.0 + rng.gen_range(-0.02..0.02);
    let outer = equilateral(1.0, std::f64::consts::FRAC_PI_2);
    let inner = equilateral(D2_INNER * scale, std::f64::consts::FRAC_PI_2 + twist);
    PolygonalDomain::new(outer, vec![inner]).expect("valid")
}

/// Half-width of the outer square of [`d3`].
pub const D3_OUTER: f64 = 1.0;
/// Half-width of the square hole of [`d3`].
pub const D3_INNER: f64 = 0.8;
/// Half-width and depth of the notch cut into the top of the hole.
pub const D3_NOTCH: f64 = 0.02;

/// A square corridor around a square hole whose top edge has a tiny
/// triangular notch at its midpoint, so the midpoint is an interior point.
pub fn d3() -> PolygonalDomain {
    let (r, big, e) = (D3_INNER, D3_OUTER, D3_NOTCH);
    PolygonalDomain::new(
        ring(&[(-big, -big), (big, -big), (big, big), (-big, big)]),
        vec![ring(&[
            (-r, -r),
            (r, -r),
            (r, r),
            (e, r),
            (0.0, r - e),
            (-e, r),
            (-r, r),
        ])],
    )
    .expect("valid")
}

/// Moves every vertex by an independent uniform offset in `[-amount, amount]²`.
pub fn jitter(dom: &PolygonalDomain, amount: f64, seed: u64) -> PolygonalDomain {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    dom.map_vertices(|_, p| {
        P::new(
            p.x + rng.gen_range(-amount..amount),
            p.y + rng.gen_range(-amount..amount),
        )
    })
    .expect("jitter keeps the domain valid")
}

/// Convex hull, counterclockwise, without collinear points.
pub fn convex_hull(points: &[P]) -> Vec<P> {
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a.x.partial_cmp(&b.x).unwrap().then(a.y.partial_cmp(&b.y).unwrap()));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let mut hull: Vec<P> = Vec::with_capacity(2 * pts.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &P>> = if pass == 0 {
            Box::new(pts.iter())
        } else {
            Box::new(pts.iter().rev())
        };
        for &p in iter {
            while hull.len() >= start + 2 && crate::geom::orient(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
    }
    hull
}

/// Random convex polygon with at most `max_n` vertices inside `[-1, 1]²`.
pub fn random_convex(rng: &mut impl Rng, max_n: usize) -> PolygonalDomain {
    loop {
        let k = rng.gen_range(3..=max_n.max(3));
        let pts: Vec<P> = (0..k)
            .map(|_| {
                let a = rng.gen_range(0.0..std::f64::consts::TAU);
                let r = rng.gen_range(0.3..1.0);
                P::new(r * a.cos(), 0.8 * r * a.sin())
            })
            .collect();
        let hull = convex_hull(&pts);
        if hull.len() < 3 {
            continue;
        }
        if let Ok(d) = PolygonalDomain::new(hull, vec![]) {
            if d.check_general_position().is_clean() {
                return d;
            }
        }
    }
}

/// Random star-shaped outer boundary with up to two small convex holes, at
/// most `max_n` vertices in total.
pub fn random_domain(rng: &mut impl Rng, max_n: usize) -> PolygonalDomain {
    assert!(max_n >= 6);
    loop {
        let holes_wanted = rng.gen_range(1..=2usize);
        let hole_sizes: Vec<usize> = (0..holes_wanted).map(|_| rng.gen_range(3..=4)).collect();
        let budget = max_n - hole_sizes.iter().sum::<usize>();
        if budget < 3 {
            continue;
        }
        let k = rng.gen_range(3.max(budget.min(5))..=budget.min(10));
        let mut angles: Vec<f64> = (0..k).map(|_| rng.gen_range(0.0..std::f64::consts::TAU)).collect();
        angles.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let outer: Vec<P> = angles.iter().map(|&a| P::unit(a) * rng.gen_range(0.6..1.0)).collect();
        let mut holes = Vec::new();
        for &m in &hole_sizes {
            let c = P::new(rng.gen_range(-0.4..0.4), rng.gen_range(-0.4..0.4));
            let rad = rng.gen_range(0.06..0.18);
            let phase = rng.gen_range(0.0..std::f64::consts::TAU);
            let pts: Vec<P> = (0..m)
                .map(|i| {
                    c + P::unit(phase + i as f64 * std::f64::consts::TAU / m as f64 + rng.gen_range(-0.3..0.3)) * rad
                })
                .collect();
            holes.push(pts);
        }
        let Ok(dom) = PolygonalDomain::new(outer, holes) else {
            continue;
        };
        // Keep holes well inside: every hole vertex away from the outer ring.
        let clear = (dom.ring(0).len()..dom.n()).all(|i| {
            let p = dom.vertex(i);
            (0..dom.ring(0).len()).all(|e| {
                let (a, b) = dom.edge(e);
                crate::geom::segment_distance(a, b, p) > 0.05
            })
        });
        if clear && dom.check_general_position().is_clean() {
            return dom;
        }
    }
}
