//! Deterministic SVG output. Coordinates are printed with six decimals and
//! elements are emitted in a fixed order, so identical inputs give
//! byte-identical files.

use std::fmt::Write;

use geocenter::visibility::VisibilityGraph;
use geocenter::{DirectionRange, Point, PolygonalDomain};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Layer {
    Domain,
    VisibilityGraph,
    GridHeatmap,
    Paths,
    PirangeFans,
    Candidates,
    Centers,
}

impl Layer {
    pub fn parse(name: &str) -> Option<Layer> {
        Some(match name {
            "domain" => Layer::Domain,
            "visibility-graph" => Layer::VisibilityGraph,
            "grid-heatmap" => Layer::GridHeatmap,
            "paths" => Layer::Paths,
            "pirange-fans" => Layer::PirangeFans,
            "candidates" => Layer::Candidates,
            "centers" => Layer::Centers,
            _ => return None,
        })
    }
}

#[derive(Clone, Debug)]
pub struct RenderSpec {
    pub width: f64,
    pub layers: Vec<Layer>,
    pub stroke: f64,
    pub marker: f64,
}

impl Default for RenderSpec {
    fn default() -> Self {
        RenderSpec {
            width: 800.0,
            layers: vec![Layer::Domain],
            stroke: 1.5,
            marker: 4.0,
        }
    }
}

/// A direction fan anchored at a point.
#[derive(Clone, Debug)]
pub struct Fan {
    pub at: Point,
    pub range: DirectionRange,
}

/// Everything that can be drawn over the domain.
#[derive(Clone, Debug, Default)]
pub struct Overlays {
    pub paths: Vec<Vec<Point>>,
    pub fans: Vec<Fan>,
    pub candidates: Vec<Point>,
    pub centers: Vec<Point>,
    pub farthest: Vec<Point>,
    pub sources: Vec<Point>,
    /// Grid samples with a scalar value.
    pub heat: Vec<(Point, f64)>,
    pub heat_cell: f64,
}

/// World to pixel map fitting the bounding box plus 5% on every side.
struct View {
    lo: Point,
    hi: Point,
    scale: f64,
    width: f64,
    height: f64,
}

impl View {
    fn new(dom: &PolygonalDomain, width: f64) -> View {
        let (lo, hi) = dom.bbox();
        let (w, h) = (hi.x - lo.x, hi.y - lo.y);
        let lo = Point::new(lo.x - 0.05 * w, lo.y - 0.05 * h);
        let hi = Point::new(hi.x + 0.05 * w, hi.y + 0.05 * h);
        let scale = width / (hi.x - lo.x);
        View {
            lo,
            hi,
            scale,
            width,
            height: (hi.y - lo.y) * scale,
        }
    }

    fn xy(&self, p: Point) -> (f64, f64) {
        ((p.x - self.lo.x) * self.scale, (self.hi.y - p.y) * self.scale)
    }

    fn pt(&self, p: Point) -> String {
        let (x, y) = self.xy(p);
        format!("{x:.6},{y:.6}")
    }
}

fn ring_path(view: &View, ring: &[Point]) -> String {
    let mut d = String::new();
    for (i, &p) in ring.iter().enumerate() {
        let (x, y) = view.xy(p);
        let _ = write!(d, "{}{x:.6} {y:.6} ", if i == 0 { "M" } else { "L" });
    }
    d.push('Z');
    d
}

/// Blue to red.
fn heat_color(u: f64) -> String {
    let u = u.clamp(0.0, 1.0);
    let r = (255.0 * u).round() as u8;
    let b = (255.0 * (1.0 - u)).round() as u8;
    format!("#{r:02x}40{b:02x}")
}

fn circle(out: &mut String, view: &View, p: Point, r: f64, class: &str, fill: &str) {
    let (x, y) = view.xy(p);
    let _ = writeln!(
        out,
        r#"  <circle class="{class}" cx="{x:.6}" cy="{y:.6}" r="{r:.6}" fill="{fill}"/>"#
    );
}

pub fn render_svg(
    dom: &PolygonalDomain,
    graph: Option<&VisibilityGraph>,
    overlays: &Overlays,
    spec: &RenderSpec,
) -> String {
    let view = View::new(dom, spec.width);
    let mut layers = spec.layers.clone();
    layers.sort();
    layers.dedup();
    let sw = spec.stroke;
    let mut out = String::new();
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w:.6}" height="{h:.6}" viewBox="0 0 {w:.6} {h:.6}">"#,
        w = view.width,
        h = view.height
    );
    for layer in layers {
        match layer {
            Layer::Domain => {
                let _ = writeln!(
                    out,
                    r##"  <path class="outer" d="{}" fill="#f4f1e8" stroke="#333333" stroke-width="{sw:.6}"/>"##,
                    ring_path(&view, dom.ring(0))
                );
                for k in 1..=dom.h() {
                    let _ = writeln!(
                        out,
                        r##"  <path class="hole" d="{}" fill="#9a9a9a" stroke="#333333" stroke-width="{sw:.6}"/>"##,
                        ring_path(&view, dom.ring(k))
                    );
                }
            }
            Layer::VisibilityGraph => {
                let Some(g) = graph else { continue };
                for (i, j) in g.edges() {
                    let (x1, y1) = view.xy(dom.vertex(i));
                    let (x2, y2) = view.xy(dom.vertex(j));
                    let _ = writeln!(
                        out,
                        r##"  <line class="visibility" x1="{x1:.6}" y1="{y1:.6}" x2="{x2:.6}" y2="{y2:.6}" stroke="#88aacc" stroke-width="{:.6}"/>"##,
                        0.5 * sw
                    );
                }
            }
            Layer::GridHeatmap => {
                let hi = overlays.heat.iter().map(|h| h.1).fold(0.0, f64::max);
                let cell = overlays.heat_cell * view.scale;
                for &(p, v) in &overlays.heat {
                    let (x, y) = view.xy(p);
                    let u = if hi > 0.0 { v / hi } else { 0.0 };
                    let _ = writeln!(
                        out,
                        r#"  <rect class="heat" x="{:.6}" y="{:.6}" width="{cell:.6}" height="{cell:.6}" fill="{}" fill-opacity="0.6"/>"#,
                        x - 0.5 * cell,
                        y - 0.5 * cell,
                        heat_color(u)
                    );
                }
            }
            Layer::Paths => {
                for path in &overlays.paths {
                    let pts: Vec<String> = path.iter().map(|&p| view.pt(p)).collect();
                    let _ = writeln!(
                        out,
                        r##"  <polyline class="path" points="{}" fill="none" stroke="#c0392b" stroke-width="{sw:.6}"/>"##,
                        pts.join(" ")
                    );
                }
            }
            Layer::PirangeFans => {
                let r = 0.08 * (view.hi.x - view.lo.x).max(view.hi.y - view.lo.y);
                for fan in &overlays.fans {
                    let (cx, cy) = view.xy(fan.at);
                    for arc in fan.range.arcs() {
                        let a = view.xy(fan.at + Point::unit(arc.start) * r);
                        let b = view.xy(fan.at + Point::unit(arc.start + arc.size) * r);
                        let large = u8::from(arc.size > std::f64::consts::PI);
                        let rr = r * view.scale;
                        // Pixel y points down, so counterclockwise in the world is sweep 0.
                        let _ = writeln!(
                            out,
                            r##"  <path class="fan" d="M{cx:.6} {cy:.6} L{:.6} {:.6} A{rr:.6} {rr:.6} 0 {large} 0 {:.6} {:.6} Z" fill="#27ae60" fill-opacity="0.3"/>"##,
                            a.0, a.1, b.0, b.1
                        );
                    }
                    if fan.range.is_full() {
                        circle(&mut out, &view, fan.at, r * view.scale, "fan", "#27ae60");
                    }
                }
            }
            Layer::Candidates => {
                for &p in &overlays.candidates {
                    circle(&mut out, &view, p, 0.6 * spec.marker, "candidate", "#7f8c8d");
                }
            }
            Layer::Centers => {
                for &p in &overlays.sources {
                    circle(&mut out, &view, p, spec.marker, "source", "#2c3e50");
                }
                for &p in &overlays.farthest {
                    circle(&mut out, &view, p, spec.marker, "farthest", "#e67e22");
                }
                for &p in &overlays.centers {
                    circle(&mut out, &view, p, 1.5 * spec.marker, "center", "#8e44ad");
                }
            }
        }
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use geocenter::instances;

    #[test]
    fn square_fits_with_margin() {
        let d = instances::unit_square();
        let svg = render_svg(&d, None, &Overlays::default(), &RenderSpec::default());
        assert_eq!(svg.matches("<path").count(), 1);
        // 800 px across 1.1 units: the corner (0, 1) lands 5% in from the top left.
        assert!(svg.contains("L36.363636 36.363636 Z"), "{svg}");
    }

    #[test]
    fn layers_are_ordered() {
        let d = instances::d1();
        let ov = Overlays {
            centers: vec![Point::new(5.0, 2.0)],
            ..Overlays::default()
        };
        let spec = RenderSpec {
            layers: vec![Layer::Centers, Layer::Domain],
            ..RenderSpec::default()
        };
        let svg = render_svg(&d, None, &ov, &spec);
        assert!(svg.find("class=\"outer\"").unwrap() < svg.find("class=\"center\"").unwrap());
        assert_eq!(svg.matches("class=\"hole\"").count(), 1);
    }
}
