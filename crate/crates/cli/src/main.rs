//! Command-line driver for the geocenter library.

mod render;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use geocenter::candidates::{CandidateOptions, CandidatePoint, CaseTag, DegenerateKind, Generator};
use geocenter::center::{brute_force_center, solve};
use geocenter::farthest::dmax_and_farthest;
use geocenter::geodesic::{all_shortest_paths, general_position_report, DEFAULT_REL_TOL};
use geocenter::oracle::GridOracle;
use geocenter::pirange::{admissible_range, necessary_condition, pirange, Diagnostics};
use geocenter::visibility::VisibilityGraph;
use geocenter::{instances, DirectionRange, Error, Point, PolygonalDomain};

use render::{render_svg, Fan, Layer, Overlays, RenderSpec};

#[derive(Parser)]
#[command(
    name = "geocenter",
    version,
    about = "Geodesic distances and centers in polygonal domains with holes"
)]
struct Cli {
    /// Worker threads for the parallel parts (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone)]
struct Common {
    /// Domain JSON: {"outer": [[x, y], ...], "holes": [[[x, y], ...], ...]}.
    #[arg(long)]
    domain: PathBuf,
    /// Write an SVG rendering here.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Perturb every vertex by up to 1e-6 of the diameter with this seed.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check the domain and report general-position violations.
    Validate {
        #[command(flatten)]
        common: Common,
    },
    /// Geodesic distance between two points.
    Dist {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_parser = parse_point)]
        from: Point,
        #[arg(long, value_parser = parse_point)]
        to: Point,
        #[arg(long, default_value_t = DEFAULT_REL_TOL)]
        rel_tol: f64,
    },
    /// All shortest paths between two points.
    Paths {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_parser = parse_point)]
        from: Point,
        #[arg(long, value_parser = parse_point)]
        to: Point,
        #[arg(long, default_value_t = DEFAULT_REL_TOL)]
        rel_tol: f64,
    },
    /// Maximum geodesic distance from s and the points attaining it.
    Farthest {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_parser = parse_point)]
        s: Point,
    },
    /// Directions of motion of s that shorten every shortest path to t.
    Pirange {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_parser = parse_point)]
        s: Point,
        #[arg(long, value_parser = parse_point)]
        t: Point,
    },
    /// Admissible directions at s for t, or for all farthest points when t is omitted.
    Admissible {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_parser = parse_point)]
        s: Point,
        #[arg(long, value_parser = parse_point)]
        t: Option<Point>,
    },
    /// Candidate center points.
    Candidates {
        #[command(flatten)]
        common: Common,
        /// Restrict to one case, e.g. vertex, special-E, G-(2,1,0), D-root-segment.
        #[arg(long = "case")]
        case: Option<String>,
        #[arg(long)]
        force: bool,
    },
    /// Geodesic centers and radius.
    Center {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        force: bool,
    },
    /// Brute-force grid bounds: d_max at s, or the best grid center.
    Oracle {
        #[command(flatten)]
        common: Common,
        /// Grid spacing (default: 2% of the diameter).
        #[arg(long)]
        grid: Option<f64>,
        #[arg(long, value_parser = parse_point)]
        s: Option<Point>,
    },
    /// Draw the domain with optional overlays.
    Render {
        #[command(flatten)]
        common: Common,
        /// Comma-separated layers: domain, visibility-graph, grid-heatmap,
        /// paths, pirange-fans, candidates, centers.
        #[arg(long, default_value = "domain")]
        layers: String,
        #[arg(long, value_parser = parse_point)]
        from: Option<Point>,
        #[arg(long, value_parser = parse_point)]
        to: Option<Point>,
        #[arg(long, value_parser = parse_point)]
        s: Option<Point>,
        #[arg(long)]
        grid: Option<f64>,
        #[arg(long)]
        force: bool,
        #[arg(long, default_value_t = 800.0)]
        width: f64,
    },
}

fn parse_point(text: &str) -> Result<Point, String> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 2 {
        return Err(format!("expected X,Y but got {text:?}"));
    }
    let x: f64 = parts[0].trim().parse().map_err(|e| format!("{e}"))?;
    let y: f64 = parts[1].trim().parse().map_err(|e| format!("{e}"))?;
    if !x.is_finite() || !y.is_finite() {
        return Err("coordinates must be finite".into());
    }
    Ok(Point::new(x, y))
}

/// Failure with its exit code.
struct Failure {
    code: u8,
    msg: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse(_)
            | Error::Validation(_)
            | Error::DegenerateInput(_)
            | Error::OutsideDomain(_)
            | Error::GeneralPositionViolated(_) => 2,
            _ => 3,
        };
        Failure {
            code,
            msg: e.to_string(),
        }
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure {
        code: 1,
        msg: msg.into(),
    }
}

type Res<T> = Result<T, Failure>;

fn load(common: &Common) -> Res<PolygonalDomain> {
    let text = std::fs::read_to_string(&common.domain).map_err(|e| Failure {
        code: 2,
        msg: format!("cannot read {}: {e}", common.domain.display()),
    })?;
    let dom = PolygonalDomain::from_json(&text)?;
    Ok(match common.seed {
        Some(seed) => {
            let amount = 1e-6 * dom.diameter();
            let d = instances::jitter(&dom, amount, seed);
            log::info!("jittered by up to {amount:e} with seed {seed}");
            d
        }
        None => dom,
    })
}

fn range_json(r: &DirectionRange) -> Value {
    if r.is_empty() {
        return json!("empty");
    }
    if r.is_full() {
        return json!("full");
    }
    Value::Array(
        r.arcs()
            .iter()
            .map(|a| json!({"start": a.start, "end": a.start + a.size}))
            .collect(),
    )
}

fn diagnostics_json(d: &Diagnostics<f64>) -> Value {
    match *d {
        Diagnostics::Vertex { alpha } => json!({"case": "vertex", "alpha": alpha}),
        Diagnostics::Edge {
            lambda,
            alpha,
            beta1,
            beta2,
        } => {
            json!({"case": "edge", "lambda": lambda, "alpha": alpha, "beta1": beta1, "beta2": beta2})
        }
        Diagnostics::Interior {
            delta,
            delta1,
            delta2,
            alpha,
            beta,
            a,
            b,
        } => json!({
            "case": "interior", "delta": delta, "delta1": delta1, "delta2": delta2,
            "alpha": alpha, "beta": beta, "a": a, "b": b,
        }),
    }
}

fn options(force: bool) -> CandidateOptions {
    CandidateOptions {
        force,
        ..CandidateOptions::default()
    }
}

fn candidate_list(gen: &Generator, case: Option<&str>) -> Res<Vec<CandidatePoint>> {
    let Some(case) = case else {
        let mut all = gen.vertex_candidates();
        all.extend(gen.special()?);
        all.extend(gen.general(None)?);
        all.extend(gen.degenerate()?);
        return Ok(all);
    };
    let tag: CaseTag = case.parse().map_err(|_| usage(format!("unknown case tag {case:?}")))?;
    let pool = match tag {
        CaseTag::Vertex => gen.vertex_candidates(),
        CaseTag::SpecialEdge | CaseTag::SpecialInterior => gen.special()?,
        CaseTag::General { .. } => gen.general(Some(tag))?,
        CaseTag::Degenerate(DegenerateKind::VertexTarget) => {
            let mut v = gen.degenerate()?;
            v.extend(gen.vertex_candidates());
            v
        }
        CaseTag::Degenerate(_) => gen.degenerate()?,
    };
    Ok(pool.into_iter().filter(|c| c.case_tag == tag).collect())
}

fn write_svg(
    common: &Common,
    dom: &PolygonalDomain,
    graph: Option<&VisibilityGraph>,
    overlays: &Overlays,
    layers: Vec<Layer>,
    width: f64,
) -> Res<()> {
    let Some(path) = &common.out else { return Ok(()) };
    let spec = RenderSpec {
        width,
        layers,
        ..RenderSpec::default()
    };
    std::fs::write(path, render_svg(dom, graph, overlays, &spec)).map_err(|e| Failure {
        code: 3,
        msg: format!("cannot write {}: {e}", path.display()),
    })
}

fn run(cmd: Cmd) -> Res<Value> {
    match cmd {
        Cmd::Validate { common } => {
            let dom = load(&common)?;
            let graph = VisibilityGraph::build(&dom);
            let report = general_position_report(&dom, &graph);
            write_svg(
                &common,
                &dom,
                Some(&graph),
                &Overlays::default(),
                vec![Layer::Domain, Layer::VisibilityGraph],
                800.0,
            )?;
            Ok(json!({
                "valid": true,
                "vertices": dom.n(),
                "holes": dom.h(),
                "visibility_edges": graph.edge_count(),
                "general_position": report.is_clean(),
                "report": report,
            }))
        }
        Cmd::Dist {
            common,
            from,
            to,
            rel_tol,
        }
        | Cmd::Paths {
            common,
            from,
            to,
            rel_tol,
        } if rel_tol < 0.0 => {
            let _ = (common, from, to);
            Err(usage("--rel-tol must be non-negative"))
        }
        Cmd::Dist {
            common,
            from,
            to,
            rel_tol,
        } => {
            let dom = load(&common)?;
            let graph = VisibilityGraph::build(&dom);
            let paths = all_shortest_paths(&dom, &graph, from, to, rel_tol)?;
            let distance = paths.first().map(|p| p.length).unwrap_or(0.0);
            let ov = Overlays {
                paths: paths.iter().map(|p| p.waypoints.clone()).collect(),
                ..Overlays::default()
            };
            write_svg(&common, &dom, None, &ov, vec![Layer::Domain, Layer::Paths], 800.0)?;
            Ok(json!({"distance": distance, "paths": paths.len()}))
        }
        Cmd::Paths {
            common,
            from,
            to,
            rel_tol,
        } => {
            let dom = load(&common)?;
            let graph = VisibilityGraph::build(&dom);
            let paths = all_shortest_paths(&dom, &graph, from, to, rel_tol)?;
            let ov = Overlays {
                paths: paths.iter().map(|p| p.waypoints.clone()).collect(),
                ..Overlays::default()
            };
            write_svg(&common, &dom, None, &ov, vec![Layer::Domain, Layer::Paths], 800.0)?;
            Ok(json!({
                "distance": paths.first().map(|p| p.length).unwrap_or(0.0),
                "paths": paths,
            }))
        }
        Cmd::Farthest { common, s } => {
            let dom = load(&common)?;
            let graph = VisibilityGraph::build(&dom);
            let report = dmax_and_farthest(&dom, &graph, s)?;
            let ov = Overlays {
                paths: report
                    .farthest
                    .iter()
                    .flat_map(|f| f.paths.iter().map(|p| p.waypoints.clone()))
                    .collect(),
                farthest: report.farthest.iter().map(|f| f.point).collect(),
                sources: vec![s],
                ..Overlays::default()
            };
            write_svg(
                &common,
                &dom,
                None,
                &ov,
                vec![Layer::Domain, Layer::Paths, Layer::Centers],
                800.0,
            )?;
            Ok(serde_json::to_value(&report).expect("report serializes"))
        }
        Cmd::Pirange { common, s, t } => {
            let dom = load(&common)?;
            let graph = VisibilityGraph::build(&dom);
            let r = pirange(&dom, &graph, s, t)?;
            let ov = Overlays {
                fans: vec![Fan {
                    at: s,
                    range: r.range.clone(),
                }],
                sources: vec![s],
                farthest: vec![t],
                ..Overlays::default()
            };
            write_svg(
                &common,
                &dom,
                None,
                &ov,
                vec![Layer::Domain, Layer::PirangeFans, Layer::Centers],
                800.0,
            )?;
            Ok(json!({
                "range": range_json(&r.range),
                "special": r.special,
                "diagnostics": diagnostics_json(&r.diagnostics),
            }))
        }
        Cmd::Admissible { common, s, t } => {
            let dom = load(&common)?;
            let graph = VisibilityGraph::build(&dom);
            let (range, extra) = match t {
                Some(t) => (admissible_range(&dom, &graph, s, t)?, json!({"t": t})),
                None => {
                    let nc = necessary_condition(&dom, &graph, s)?;
                    let fp: Vec<Point> = nc.report.farthest.iter().map(|f| f.point).collect();
                    (nc.range, json!({"farthest": fp, "dmax": nc.report.dmax}))
                }
            };
            let ov = Overlays {
                fans: vec![Fan {
                    at: s,
                    range: range.clone(),
                }],
                sources: vec![s],
                ..Overlays::default()
            };
            write_svg(
                &common,
                &dom,
                None,
                &ov,
                vec![Layer::Domain, Layer::PirangeFans, Layer::Centers],
                800.0,
            )?;
            let mut out = json!({"range": range_json(&range), "empty": range.is_empty()});
            if let (Value::Object(o), Value::Object(e)) = (&mut out, extra) {
                o.extend(e);
            }
            Ok(out)
        }
        Cmd::Candidates { common, case, force } => {
            let dom = load(&common)?;
            let graph = VisibilityGraph::build(&dom);
            let gen = Generator::new(&dom, &graph, options(force))?;
            let list = candidate_list(&gen, case.as_deref())?;
            let ov = Overlays {
                candidates: list.iter().map(|c| c.point).collect(),
                ..Overlays::default()
            };
            write_svg(&common, &dom, None, &ov, vec![Layer::Domain, Layer::Candidates], 800.0)?;
            Ok(json!({"count": list.len(), "candidates": list}))
        }
        Cmd::Center { common, force } => {
            let dom = load(&common)?;
            let graph = VisibilityGraph::build(&dom);
            let r = solve(&dom, &graph, &options(force))?;
            let ov = Overlays {
                centers: r.centers.clone(),
                farthest: r
                    .per_center
                    .iter()
                    .flat_map(|f| f.farthest.iter().map(|p| p.point))
                    .collect(),
                ..Overlays::default()
            };
            write_svg(&common, &dom, None, &ov, vec![Layer::Domain, Layer::Centers], 800.0)?;
            Ok(json!({
                "radius": r.radius,
                "centers": r.centers,
                "provenance": r.provenance,
                "necessary_condition_empty": r.necessary,
                "farthest": r.per_center.iter().map(|f| f.farthest.iter().map(|p| p.point).collect::<Vec<_>>()).collect::<Vec<_>>(),
                "candidates_evaluated": r.candidates_evaluated,
            }))
        }
        Cmd::Oracle { common, grid, s } => {
            let dom = load(&common)?;
            let graph = VisibilityGraph::build(&dom);
            let h = grid.unwrap_or(0.02 * dom.diameter());
            if !(h > 0.0 && h.is_finite()) {
                return Err(usage("--grid must be positive"));
            }
            match s {
                Some(s) => {
                    dom.require_inside(s)?;
                    let oracle = GridOracle::new(&dom, &graph, h);
                    let lower = oracle.max_distance(s);
                    let field = geocenter::geodesic::SourceField::new(&dom, &graph, s)?;
                    let ov = Overlays {
                        heat: oracle
                            .targets()
                            .iter()
                            .map(|&q| (q, field.distance_to(&dom, q)))
                            .collect(),
                        heat_cell: h,
                        sources: vec![s],
                        ..Overlays::default()
                    };
                    write_svg(
                        &common,
                        &dom,
                        None,
                        &ov,
                        vec![Layer::GridHeatmap, Layer::Domain, Layer::Centers],
                        800.0,
                    )?;
                    Ok(json!({"spacing": h, "lower": lower, "upper": lower + h, "targets": oracle.targets().len()}))
                }
                None => {
                    let c = brute_force_center(&dom, &graph, h);
                    let ov = Overlays {
                        centers: vec![c.point],
                        ..Overlays::default()
                    };
                    write_svg(&common, &dom, None, &ov, vec![Layer::Domain, Layer::Centers], 800.0)?;
                    Ok(json!({"point": c.point, "value": c.value, "lower": c.lower, "spacing": c.spacing}))
                }
            }
        }
        Cmd::Render {
            common,
            layers,
            from,
            to,
            s,
            grid,
            force,
            width,
        } => {
            if common.out.is_none() {
                return Err(usage("render needs --out"));
            }
            let layers: Vec<Layer> = layers
                .split(',')
                .map(|l| Layer::parse(l.trim()).ok_or_else(|| usage(format!("unknown layer {l:?}"))))
                .collect::<Res<_>>()?;
            let dom = load(&common)?;
            let graph = VisibilityGraph::build(&dom);
            let mut ov = Overlays::default();
            if layers.contains(&Layer::Paths) {
                let (Some(a), Some(b)) = (from, to) else {
                    return Err(usage("the paths layer needs --from and --to"));
                };
                ov.paths = all_shortest_paths(&dom, &graph, a, b, DEFAULT_REL_TOL)?
                    .into_iter()
                    .map(|p| p.waypoints)
                    .collect();
            }
            if layers.contains(&Layer::PirangeFans) || layers.contains(&Layer::GridHeatmap) {
                let Some(s) = s else {
                    return Err(usage("the pirange-fans and grid-heatmap layers need --s"));
                };
                ov.sources.push(s);
                if layers.contains(&Layer::PirangeFans) {
                    let report = dmax_and_farthest(&dom, &graph, s)?;
                    for f in &report.farthest {
                        ov.farthest.push(f.point);
                        if let Ok(r) = pirange(&dom, &graph, s, f.point) {
                            ov.fans.push(Fan { at: s, range: r.range });
                        }
                    }
                }
                if layers.contains(&Layer::GridHeatmap) {
                    let h = grid.unwrap_or(0.02 * dom.diameter());
                    let field = geocenter::geodesic::SourceField::new(&dom, &graph, s)?;
                    ov.heat = geocenter::oracle::grid_points(&dom, h)
                        .into_iter()
                        .map(|q| (q, field.distance_to(&dom, q)))
                        .collect();
                    ov.heat_cell = h;
                }
            }
            if layers.contains(&Layer::Candidates) {
                let gen = Generator::new(&dom, &graph, options(force))?;
                ov.candidates = candidate_list(&gen, None)?.into_iter().map(|c| c.point).collect();
            }
            if layers.contains(&Layer::Centers) {
                ov.centers = solve(&dom, &graph, &options(force))?.centers;
            }
            write_svg(&common, &dom, Some(&graph), &ov, layers.clone(), width)?;
            Ok(json!({"out": common.out, "layers": layers.len()}))
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter("GEOCENTER_LOG")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    match run(cli.cmd) {
        Ok(v) => {
            use std::io::Write;
            // A closed pipe downstream is not an error worth reporting.
            let _ = writeln!(std::io::stdout().lock(), "{v}");
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}
