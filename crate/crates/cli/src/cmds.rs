//! Implementations of the five subcommands.

use std::path::Path;

use bregman_geometry::generator::Generator as GenericGenerator;
use bregman_geometry::sphere::{sphere_divergence, SphereSpec};
use bregman_geometry::triangle::GeodesicTriangle;
use bregman_geometry::generator::{EtaCoords, ThetaCoords};
use bregman_geometry::{
    bregman, check_pythagoras, dual_bregman, dual_pythagoras_flats, dual_transport,
    fenchel_young, four_param_residual, inner_product, interior_angles, jensen,
    parallelogram_residual, parse_edges, primal_transport, right_angle_flat, solve_double_right,
    solve_dual_pythagoras_is2d, sphere_points, three_param_residual, Chart, Flat, GeodesicKind,
    Generator, Geodesic, Point, SeparableKind, TangentVector,
};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::scene::{parse_vector, read_input, Scene};
use crate::svg::{render, Polyline};
use crate::{ChartArg, CliError, FormatArg, GeoKindArg, SolveArg, SphereKindArg, SuiteArg};

/// Fixed-width scientific notation with 17 significant digits
/// (round-trip safe for f64), used for all CSV numbers.
fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

fn write_out(out: Option<&Path>, content: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, content)?,
        None => print!("{content}"),
    }
    Ok(())
}

fn load_generator(arg: &str) -> Result<Generator, CliError> {
    Ok(GenericGenerator::from_json(&read_input(arg)?)?)
}

fn chart_of(arg: ChartArg) -> Chart {
    match arg {
        ChartArg::Theta => Chart::Theta,
        ChartArg::Eta => Chart::Eta,
    }
}

fn vec_json(v: &DVector<f64>) -> Value {
    Value::Array(v.iter().map(|&x| json!(x)).collect())
}

fn point_json(p: &Point) -> Value {
    json!({ "theta": vec_json(p.theta()), "eta": vec_json(p.eta()) })
}

pub fn divergence(gen: &str, theta1: &str, theta2: &str) -> Result<i32, CliError> {
    let gen = load_generator(gen)?;
    let t1 = ThetaCoords(parse_vector(theta1)?);
    let t2 = ThetaCoords(parse_vector(theta2)?);
    gen.check_theta(&t1)?;
    gen.check_theta(&t2)?;
    let e1 = gen.gradient(&t1)?;
    let e2 = gen.gradient(&t2)?;
    let report = json!({
        "bregman": bregman(&gen, &t1, &t2)?,
        "dual_bregman": dual_bregman(&gen, &EtaCoords(e1.0), &EtaCoords(e2.0.clone()))?,
        "fenchel_young": fenchel_young(&gen, &t1, &e2)?,
        "jensen": jensen(&gen, &t1, &t2)?,
    });
    println!("{}", serde_json::to_string_pretty(&report).unwrap());
    Ok(0)
}

fn flat_json(flat: &Flat) -> Value {
    json!({
        "chart": match flat.chart { Chart::Theta => "theta", Chart::Eta => "eta" },
        "normal": vec_json(&flat.normal),
        "offset": flat.offset,
    })
}

fn named_point<'a>(
    points: &'a std::collections::BTreeMap<String, Point>,
    name: &str,
) -> Result<&'a Point, CliError> {
    points
        .get(name)
        .ok_or_else(|| CliError::Usage(format!("scene has no point named {name:?}")))
}

#[allow(clippy::too_many_arguments)]
pub fn triangle(
    scene: &str,
    edges: &str,
    solve: Option<SolveArg>,
    out: Option<&Path>,
    chart: Option<ChartArg>,
    samples: Option<usize>,
) -> Result<i32, CliError> {
    let scene = Scene::load(scene)?;
    let (gen, points) = scene.build()?;
    let p = named_point(&points, "p")?.clone();
    let q = named_point(&points, "q")?.clone();

    let mut solver = Value::Null;
    let r = match solve {
        None => named_point(&points, "r")?.clone(),
        Some(SolveArg::DoubleRight) => {
            let theta_r = solve_double_right(&gen, &p, &q)?;
            let r = Point::from_theta(&gen, theta_r)?;
            solver = json!({ "construction": "double-right", "r": point_json(&r) });
            r
        }
        Some(SolveArg::DualPythagoras) => {
            let theta_r = solve_dual_pythagoras_is2d(&p, &q)?;
            let r = Point::from_theta(&gen, theta_r)?;
            let (eta_flat, theta_flat) = dual_pythagoras_flats(&gen, &p, &q)?;
            solver = json!({
                "construction": "dual-pythagoras",
                "r": point_json(&r),
                "eta_flat": flat_json(&eta_flat),
                "theta_flat": flat_json(&theta_flat),
            });
            r
        }
        Some(SolveArg::SingleRightFlat) => {
            let flat = right_angle_flat(&gen, &p, &q)?;
            solver = json!({ "construction": "single-right-flat", "flat": flat_json(&flat) });
            match points.get("r") {
                Some(r) => {
                    solver["flat_residual_at_r"] = json!(flat.residual_at(r));
                    r.clone()
                }
                None => {
                    // No third vertex: report the flat alone.
                    println!(
                        "{}",
                        serde_json::to_string_pretty(&json!({ "solver": solver })).unwrap()
                    );
                    return Ok(0);
                }
            }
        }
    };

    let edge_kinds = parse_edges(edges)?;
    let tri = GeodesicTriangle::new(p.clone(), q.clone(), r.clone(), edge_kinds)?;
    let angles = interior_angles(&gen, &tri)?;
    let pyth = check_pythagoras(&gen, &p, &q, &r)?;
    let report = json!({
        "edges": tri.edges_str(),
        "vertices": { "p": point_json(&p), "q": point_json(&q), "r": point_json(&r) },
        "angles": {
            "radians": {
                "alpha_p": angles.alpha_p, "alpha_q": angles.alpha_q, "alpha_r": angles.alpha_r,
                "total": angles.total, "excess": angles.excess,
            },
            "degrees": {
                "alpha_p": angles.alpha_p.to_degrees(), "alpha_q": angles.alpha_q.to_degrees(),
                "alpha_r": angles.alpha_r.to_degrees(), "total": angles.total.to_degrees(),
                "excess": angles.excess.to_degrees(),
            },
        },
        "pythagoras": {
            "primal_residual": pyth.primal_residual, "dual_residual": pyth.dual_residual,
            "primal_cos": pyth.primal_cos, "dual_cos": pyth.dual_cos,
        },
        "solver": solver,
    });
    println!("{}", serde_json::to_string_pretty(&report).unwrap());

    if let Some(path) = out {
        let chart = chart
            .map(chart_of)
            .or(scene.chart)
            .unwrap_or(Chart::Theta);
        let n = samples.or(scene.samples).unwrap_or(256);
        let mut polylines = Vec::new();
        let verts = [(&p, &q), (&q, &r), (&r, &p)];
        for (i, (a, b)) in verts.iter().enumerate() {
            let g = Geodesic::new((*a).clone(), (*b).clone(), edge_kinds[i])?;
            let pts = g.sample(&gen, n, chart)?;
            polylines.push(Polyline {
                points: pts.iter().map(|v| [v[0], v[1]]).collect(),
                class: match edge_kinds[i] {
                    GeodesicKind::Primal => "primal",
                    GeodesicKind::Dual => "dual",
                },
            });
        }
        std::fs::write(path, render(&polylines))?;
    }
    Ok(0)
}

pub fn sphere(
    kind: SphereKindArg,
    center: &str,
    radius: f64,
    grid: usize,
    format: FormatArg,
    out: Option<&Path>,
) -> Result<i32, CliError> {
    let kind = match kind {
        SphereKindArg::ExtendedKl => SeparableKind::ExtendedKl,
        SphereKindArg::ItakuraSaito => SeparableKind::ItakuraSaito,
    };
    let center = parse_vector(center)?;
    let d = center.len();
    let spec = SphereSpec::new(kind, center.clone(), radius)?;

    // (orthant label, samples) per sign pattern; a zero-radius sphere is the
    // single point at the center.
    let mut patches: Vec<(Vec<i8>, Vec<bregman_geometry::SpherePoint>)> = Vec::new();
    if radius == 0.0 {
        patches.push((
            vec![1; d],
            vec![bregman_geometry::SpherePoint {
                u: DVector::zeros(d),
                x: center.clone(),
            }],
        ));
    } else {
        for mask in 0..(1u32 << d) {
            let orthant: Vec<i8> = (0..d)
                .map(|i| if mask & (1 << i) == 0 { 1 } else { -1 })
                .collect();
            let pts = sphere_points(&spec, &orthant, grid)?;
            patches.push((orthant, pts));
        }
    }

    match format {
        FormatArg::Csv => {
            let mut csv = String::new();
            for i in 1..=d {
                csv.push_str(&format!("u{i},"));
            }
            for i in 1..=d {
                csv.push_str(&format!("x{i},"));
            }
            csv.push_str("residual\n");
            for (_, pts) in &patches {
                for pt in pts {
                    let residual = (sphere_divergence(&spec, &pt.x) - radius).abs();
                    let fields: Vec<String> = pt
                        .u
                        .iter()
                        .chain(pt.x.iter())
                        .map(|&v| fmt(v))
                        .chain(std::iter::once(fmt(residual)))
                        .collect();
                    csv.push_str(&fields.join(","));
                    csv.push('\n');
                }
            }
            write_out(out, &csv)?;
        }
        FormatArg::Svg => {
            if d != 2 {
                return Err(CliError::Usage(
                    "SVG output is only available for 2D spheres".into(),
                ));
            }
            let polylines: Vec<Polyline> = patches
                .iter()
                .map(|(_, pts)| Polyline {
                    points: pts.iter().map(|p| [p.x[0], p.x[1]]).collect(),
                    class: "sphere",
                })
                .collect();
            write_out(out, &render(&polylines))?;
        }
        FormatArg::Json => {
            let patches_json: Vec<Value> = patches
                .iter()
                .map(|(orthant, pts)| {
                    json!({
                        "orthant": orthant,
                        "points": pts.iter().map(|p| json!({
                            "u": vec_json(&p.u), "x": vec_json(&p.x),
                        })).collect::<Vec<_>>(),
                    })
                })
                .collect();
            write_out(
                out,
                &format!(
                    "{}\n",
                    serde_json::to_string_pretty(&json!({ "patches": patches_json })).unwrap()
                ),
            )?;
        }
    }
    Ok(0)
}

#[allow(clippy::too_many_arguments)]
pub fn geodesic(
    gen: &str,
    a: &str,
    b: &str,
    kind: GeoKindArg,
    chart: ChartArg,
    samples: usize,
    format: FormatArg,
    out: Option<&Path>,
) -> Result<i32, CliError> {
    let gen = load_generator(gen)?;
    let a = Point::from_theta(&gen, ThetaCoords(parse_vector(a)?))?;
    let b = Point::from_theta(&gen, ThetaCoords(parse_vector(b)?))?;
    let kind = match kind {
        GeoKindArg::Primal => GeodesicKind::Primal,
        GeoKindArg::Dual => GeodesicKind::Dual,
    };
    let g = Geodesic::new(a, b, kind)?;
    let pts = g.sample(&gen, samples, chart_of(chart))?;
    let d = pts[0].len();

    match format {
        FormatArg::Csv => {
            let names = ["x", "y", "z"];
            let mut csv = String::from("t");
            for i in 0..d {
                if d <= 3 {
                    csv.push_str(&format!(",{}", names[i]));
                } else {
                    csv.push_str(&format!(",x{}", i + 1));
                }
            }
            csv.push('\n');
            for (i, p) in pts.iter().enumerate() {
                let t = i as f64 / samples as f64;
                csv.push_str(&fmt(t));
                for &v in p.iter() {
                    csv.push(',');
                    csv.push_str(&fmt(v));
                }
                csv.push('\n');
            }
            write_out(out, &csv)?;
        }
        FormatArg::Svg => {
            if d != 2 {
                return Err(CliError::Usage(
                    "SVG output is only available for 2D geodesics".into(),
                ));
            }
            let class = match kind {
                GeodesicKind::Primal => "primal",
                GeodesicKind::Dual => "dual",
            };
            let pl = Polyline {
                points: pts.iter().map(|p| [p[0], p[1]]).collect(),
                class,
            };
            write_out(out, &render(&[pl]))?;
        }
        FormatArg::Json => {
            let rows: Vec<Value> = pts
                .iter()
                .enumerate()
                .map(|(i, p)| json!({ "t": i as f64 / samples as f64, "x": vec_json(p) }))
                .collect();
            write_out(
                out,
                &format!(
                    "{}\n",
                    serde_json::to_string_pretty(&json!({ "points": rows })).unwrap()
                ),
            )?;
        }
    }
    Ok(0)
}

/// Samples a theta-chart point uniformly from a kind-appropriate box.
fn sample_theta(gen: &Generator, rng: &mut ChaCha8Rng) -> ThetaCoords<f64> {
    let d = gen.dim();
    let positive = matches!(
        gen,
        GenericGenerator::ExtendedKl { .. } | GenericGenerator::ItakuraSaito { .. }
    );
    let v = DVector::from_fn(d, |_, _| {
        if positive {
            rng.gen_range(0.1..3.0)
        } else {
            rng.gen_range(-2.0..2.0)
        }
    });
    ThetaCoords(v)
}

struct Check {
    name: &'static str,
    worst: f64,
    tol: f64,
}

impl Check {
    fn new(name: &'static str, tol: f64) -> Self {
        Self {
            name,
            worst: 0.0,
            tol,
        }
    }
    fn record(&mut self, residual: f64) {
        self.worst = self.worst.max(residual.abs());
    }
}

fn finish(suite: &str, n: usize, seed: u64, checks: &[Check]) -> i32 {
    println!("suite {suite}: n={n} seed={seed}");
    let mut failed = false;
    for c in checks {
        let ok = c.worst <= c.tol;
        failed |= !ok;
        println!(
            "  {}: worst residual {} (tolerance {}) {}",
            c.name,
            fmt(c.worst),
            fmt(c.tol),
            if ok { "ok" } else { "FAIL" }
        );
    }
    println!("result: {}", if failed { "fail" } else { "pass" });
    i32::from(failed)
}

pub fn verify(gen: &str, suite: SuiteArg, n: usize, seed: u64) -> Result<i32, CliError> {
    let gen = load_generator(gen)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match suite {
        SuiteArg::Identities => {
            let mut c3 = Check::new("three_param", 1e-10);
            let mut c4 = Check::new("four_param", 1e-10);
            let mut cp = Check::new("parallelogram", 1e-10);
            let mut cc = Check::new("metric_inverse", 1e-9);
            let mut cl = Check::new("legendre_round_trip", 1e-9);
            for _ in 0..n {
                let ts: Vec<ThetaCoords<f64>> =
                    (0..4).map(|_| sample_theta(&gen, &mut rng)).collect();
                let scale = 1.0
                    + ts.iter()
                        .map(|t| gen.potential(t).unwrap().abs())
                        .fold(0.0f64, f64::max);
                c3.record(three_param_residual(&gen, &ts[0], &ts[1], &ts[2])? / scale);
                c4.record(four_param_residual(&gen, &ts[0], &ts[1], &ts[2], &ts[3])? / scale);
                cp.record(parallelogram_residual(&gen, &ts[0], &ts[1], &ts[2])? / scale);
                let eta = gen.gradient(&ts[0])?;
                let prod = gen.hessian(&ts[0])? * gen.conjugate_hessian(&eta)?;
                cc.record((prod - DMatrix::identity(gen.dim(), gen.dim())).norm());
                let back = gen.conjugate_gradient(&eta)?;
                cl.record((&back.0 - &ts[0].0).norm() / (1.0 + ts[0].0.norm()));
            }
            Ok(finish("identities", n, seed, &[c3, c4, cp, cc, cl]))
        }
        SuiteArg::Transport => {
            let mut c = Check::new("transport_metric_compatibility", 1e-9);
            for _ in 0..n {
                let a = Point::from_theta(&gen, sample_theta(&gen, &mut rng))?;
                let b = Point::from_theta(&gen, sample_theta(&gen, &mut rng))?;
                let d = gen.dim();
                let v = TangentVector::from_contravariant(
                    &gen,
                    a.clone(),
                    DVector::from_fn(d, |_, _| rng.gen_range(-1.0..1.0)),
                )?;
                let w = TangentVector::from_contravariant(
                    &gen,
                    a.clone(),
                    DVector::from_fn(d, |_, _| rng.gen_range(-1.0..1.0)),
                )?;
                let before = inner_product(&v, &w)?;
                let after =
                    inner_product(&primal_transport(&gen, &b, &v)?, &dual_transport(&gen, &b, &w)?)?;
                c.record((after - before) / (1.0 + before.abs()));
            }
            Ok(finish("transport", n, seed, &[c]))
        }
        SuiteArg::Pythagoras => {
            // The signed Pythagorean residual must equal the corresponding
            // inner product at q (generalized law of cosines), primal and dual.
            let mut cp = Check::new("primal_residual_vs_cos", 1e-10);
            let mut cd = Check::new("dual_residual_vs_cos", 1e-10);
            for _ in 0..n {
                let p = Point::from_theta(&gen, sample_theta(&gen, &mut rng))?;
                let q = Point::from_theta(&gen, sample_theta(&gen, &mut rng))?;
                let r = Point::from_theta(&gen, sample_theta(&gen, &mut rng))?;
                let rep = check_pythagoras(&gen, &p, &q, &r)?;
                let scale = 1.0
                    + rep.primal_residual.abs().max(rep.dual_residual.abs())
                    + rep.primal_cos.abs().max(rep.dual_cos.abs());
                cp.record((rep.primal_residual - rep.primal_cos) / scale);
                cd.record((rep.dual_residual - rep.dual_cos) / scale);
            }
            Ok(finish("pythagoras", n, seed, &[cp, cd]))
        }
        SuiteArg::TwoPi => {
            if !matches!(&gen, GenericGenerator::ItakuraSaito { dim: 2 }) {
                println!(
                    "suite two-pi: out of scope for this generator (holds only for the \
                     2D Itakura-Saito manifold); skipped"
                );
                return Ok(0);
            }
            // The 360-degree sum holds for triangles whose eta-image keeps
            // the theta-chart orientation; reversing triangles are the known
            // violating class and are reported, not failed.
            let orient = |a: &DVector<f64>, b: &DVector<f64>, c: &DVector<f64>| {
                (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
            };
            let mut c = Check::new("two_pi_angle_sum", 1e-6);
            let mut reversing = 0usize;
            let mut worst_reversing = 0.0f64;
            let mut done = 0usize;
            while done < n {
                let p = Point::from_theta(&gen, sample_theta(&gen, &mut rng))?;
                let q = Point::from_theta(&gen, sample_theta(&gen, &mut rng))?;
                let r = Point::from_theta(&gen, sample_theta(&gen, &mut rng))?;
                if p.theta_distance(&q) < 1e-3
                    || q.theta_distance(&r) < 1e-3
                    || r.theta_distance(&p) < 1e-3
                {
                    continue;
                }
                let tri =
                    GeodesicTriangle::new(p.clone(), q.clone(), r.clone(), [GeodesicKind::Primal; 3])?;
                let s1 = interior_angles(&gen, &tri)?.total;
                let s2 = interior_angles(&gen, &tri.dual_triangle())?.total;
                let dev = (s1 + s2 - 2.0 * std::f64::consts::PI).abs();
                let same = orient(p.theta(), q.theta(), r.theta())
                    * orient(p.eta(), q.eta(), r.eta())
                    > 0.0;
                if same {
                    c.record(dev);
                    done += 1;
                } else {
                    reversing += 1;
                    worst_reversing = worst_reversing.max(dev);
                }
            }
            println!(
                "orientation-reversing triangles observed: {reversing} (worst deviation {} rad)",
                fmt(worst_reversing)
            );
            Ok(finish("two-pi", n, seed, &[c]))
        }
    }
}
