//! `bregman`: divergences, geodesic triangles, divergence spheres, geodesic
//! sampling and invariant verification for dually flat manifolds, from the
//! command line.
//!
//! Exit codes: 0 ok, 1 verification failure, 2 domain error, 3 solver failure.

mod cmds;
mod scene;
mod svg;

use std::path::PathBuf;

use bregman_geometry::GeometryError;
use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "bregman", version, about = "Geometry of dually flat (Bregman) manifolds")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum ChartArg {
    Theta,
    Eta,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum FormatArg {
    Json,
    Csv,
    Svg,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum SolveArg {
    DoubleRight,
    DualPythagoras,
    SingleRightFlat,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum GeoKindArg {
    Primal,
    Dual,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum SphereKindArg {
    ExtendedKl,
    ItakuraSaito,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum SuiteArg {
    Identities,
    Transport,
    Pythagoras,
    TwoPi,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluate the divergence family between two theta-chart points.
    Divergence {
        /// Generator JSON: inline, a file path, or '-' for stdin.
        #[arg(long)]
        gen: String,
        /// Comma-separated theta coordinates of the first point.
        #[arg(long, allow_hyphen_values = true)]
        theta1: String,
        /// Comma-separated theta coordinates of the second point.
        #[arg(long, allow_hyphen_values = true)]
        theta2: String,
    },
    /// Report on a geodesic triangle from a scene, optionally solving for
    /// the third vertex first, and optionally rendering an SVG.
    Triangle {
        /// Scene JSON: inline, a file path, or '-' for stdin.
        #[arg(long)]
        scene: String,
        /// Edge types for (pq, qr, rp), e.g. ppp, pdp, ddd.
        #[arg(long = "type", default_value = "ppp")]
        edges: String,
        /// Construction to run for the third vertex r.
        #[arg(long, value_enum)]
        solve: Option<SolveArg>,
        /// Write an SVG rendering of the triangle here.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Chart to draw in (defaults to the scene's chart, then theta).
        #[arg(long, value_enum)]
        chart: Option<ChartArg>,
        /// Points per geodesic edge in the SVG.
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Sample a divergence sphere of a separable generator over all orthants.
    Sphere {
        /// Separable generator kind.
        #[arg(long, value_enum)]
        kind: SphereKindArg,
        /// Comma-separated center coordinates (strictly positive).
        #[arg(long, allow_hyphen_values = true)]
        center: String,
        /// Sphere radius (divergence level, >= 0).
        #[arg(long)]
        radius: f64,
        /// Grid resolution per free simplex parameter.
        #[arg(long, default_value_t = 64)]
        grid: usize,
        #[arg(long, value_enum, default_value = "csv")]
        format: FormatArg,
        /// Output file (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sample a primal or dual geodesic between two theta-chart points.
    Geodesic {
        /// Generator JSON: inline, a file path, or '-' for stdin.
        #[arg(long)]
        gen: String,
        /// Comma-separated theta coordinates of the start point.
        #[arg(long, allow_hyphen_values = true)]
        a: String,
        /// Comma-separated theta coordinates of the end point.
        #[arg(long, allow_hyphen_values = true)]
        b: String,
        #[arg(long, value_enum, default_value = "primal")]
        kind: GeoKindArg,
        #[arg(long, value_enum, default_value = "theta")]
        chart: ChartArg,
        #[arg(long, default_value_t = 256)]
        samples: usize,
        #[arg(long, value_enum, default_value = "csv")]
        format: FormatArg,
        /// Output file (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a seeded invariant suite and print worst-case residuals.
    Verify {
        /// Generator JSON: inline, a file path, or '-' for stdin.
        #[arg(long)]
        gen: String,
        #[arg(long, value_enum)]
        suite: SuiteArg,
        /// Number of random cases.
        #[arg(long, default_value_t = 1000)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

/// CLI-level error with the process exit code it maps to.
#[derive(Debug)]
pub enum CliError {
    Geometry(GeometryError),
    Usage(String),
    Io(std::io::Error),
}

impl From<GeometryError> for CliError {
    fn from(e: GeometryError) -> Self {
        Self::Geometry(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::Io(e)
    }
}

/// Short machine-readable tag for an error kind.
fn error_kind(e: &GeometryError) -> &'static str {
    match e {
        GeometryError::DomainError { .. } => "domain_error",
        GeometryError::BasePointMismatch => "base_point_mismatch",
        GeometryError::DegenerateVector => "degenerate_vector",
        GeometryError::SingularSystem => "singular_system",
        GeometryError::NoConvergence { .. } => "no_convergence",
        GeometryError::SingularJacobian => "singular_jacobian",
        GeometryError::EmptyIntersection => "empty_intersection",
        GeometryError::DegenerateQuadratic => "degenerate_quadratic",
        GeometryError::BothRootsAtQ => "both_roots_at_q",
        GeometryError::DimensionMismatch { .. } => "dimension_mismatch",
        GeometryError::InvalidSpec(_) => "invalid_spec",
    }
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            Self::Geometry(e) => match e {
                GeometryError::DomainError { .. }
                | GeometryError::DimensionMismatch { .. }
                | GeometryError::InvalidSpec(_)
                | GeometryError::BasePointMismatch
                | GeometryError::DegenerateVector => 2,
                _ => 3,
            },
            Self::Usage(_) | Self::Io(_) => 2,
        }
    }
}

fn main() {
    // Die quietly on a closed pipe (e.g. `bregman ... | head`).
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    let result = match cli.cmd {
        Cmd::Divergence { gen, theta1, theta2 } => cmds::divergence(&gen, &theta1, &theta2),
        Cmd::Triangle {
            scene,
            edges,
            solve,
            out,
            chart,
            samples,
        } => cmds::triangle(&scene, &edges, solve, out.as_deref(), chart, samples),
        Cmd::Sphere {
            kind,
            center,
            radius,
            grid,
            format,
            out,
        } => cmds::sphere(kind, &center, radius, grid, format, out.as_deref()),
        Cmd::Geodesic {
            gen,
            a,
            b,
            kind,
            chart,
            samples,
            format,
            out,
        } => cmds::geodesic(&gen, &a, &b, kind, chart, samples, format, out.as_deref()),
        Cmd::Verify { gen, suite, n, seed } => cmds::verify(&gen, suite, n, seed),
    };
    match result {
        Ok(code) => std::process::exit(code),
        Err(err) => {
            match &err {
                CliError::Geometry(e) => {
                    // Machine-readable error object on stdout; prose on stderr.
                    println!(
                        "{}",
                        serde_json::json!({ "error": error_kind(e), "message": e.to_string() })
                    );
                    eprintln!("error: {e}");
                }
                CliError::Usage(msg) => eprintln!("error: {msg}"),
                CliError::Io(e) => eprintln!("error: {e}"),
            }
            std::process::exit(err.exit_code());
        }
    }
}
