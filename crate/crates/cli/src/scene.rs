//! Scene JSON: a generator plus named theta-chart points and geodesic edges.

use std::collections::BTreeMap;
use std::io::Read;

use bregman_geometry::generator::GeneratorSpec;
use bregman_geometry::generator::ThetaCoords;
use bregman_geometry::{Chart, GeodesicKind, Generator, Point};
use nalgebra::DVector;
use serde::Deserialize;

use crate::CliError;

/// Declarative scene: generator, named points (theta coordinates), edges
/// between named points, preferred chart and sampling density.
#[derive(Debug, Clone, Deserialize)]
pub struct Scene {
    pub generator: GeneratorSpec,
    #[serde(default)]
    pub points: BTreeMap<String, Vec<f64>>,
    #[serde(default)]
    pub edges: Vec<(String, String, GeodesicKind)>,
    #[serde(default)]
    pub chart: Option<Chart>,
    #[serde(default)]
    pub samples: Option<usize>,
}

/// Reads an argument that is inline JSON (starts with `{`), `-` for stdin,
/// or a file path.
pub fn read_input(arg: &str) -> Result<String, CliError> {
    if arg.trim_start().starts_with('{') {
        return Ok(arg.to_string());
    }
    if arg == "-" {
        let mut buf = String::new();
        std::io::stdin().read_to_string(&mut buf)?;
        return Ok(buf);
    }
    Ok(std::fs::read_to_string(arg)?)
}

/// Parses a comma-separated coordinate vector.
pub fn parse_vector(s: &str) -> Result<DVector<f64>, CliError> {
    let parts: Result<Vec<f64>, _> = s.split(',').map(|p| p.trim().parse::<f64>()).collect();
    match parts {
        Ok(v) if !v.is_empty() => Ok(DVector::from_vec(v)),
        _ => Err(CliError::Usage(format!("cannot parse coordinates from {s:?}"))),
    }
}

impl Scene {
    pub fn load(arg: &str) -> Result<Self, CliError> {
        let text = read_input(arg)?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Usage(format!("cannot parse scene JSON: {e}")))
    }

    /// Builds the generator and validates every named point and edge.
    pub fn build(&self) -> Result<(Generator, BTreeMap<String, Point>), CliError> {
        let gen = Generator::from_spec(&self.generator)?;
        let mut points = BTreeMap::new();
        for (name, coords) in &self.points {
            let theta = ThetaCoords(DVector::from_vec(coords.clone()));
            let point = Point::from_theta(&gen, theta)?;
            points.insert(name.clone(), point);
        }
        for (a, b, _) in &self.edges {
            for name in [a, b] {
                if !points.contains_key(name) {
                    return Err(CliError::Usage(format!(
                        "edge endpoint {name:?} is not a named point"
                    )));
                }
            }
        }
        Ok((gen, points))
    }
}
