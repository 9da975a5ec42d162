//! Primal and dual geodesics (chart-linear curves), endpoint tangents,
//! sampling for rendering, and 2D intersection of a theta-flat with an
//! eta-flat.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::chart::{Point, TangentVector, DEGENERATE_EPS};
use crate::error::{GeometryError, Result};
use crate::generator::{EtaCoords, Generator, ThetaCoords};
use crate::scalar::{real, Real};

/// Which connection a geodesic (or edge) follows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeodesicKind {
    /// Straight in the theta chart.
    Primal,
    /// Straight in the eta chart.
    Dual,
}

/// Chart selector for flats and sampling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Chart {
    Theta,
    Eta,
}

/// A geodesic segment between two points, linear in its defining chart.
#[derive(Debug, Clone)]
pub struct Geodesic<T: Real> {
    a: Point<T>,
    b: Point<T>,
    kind: GeodesicKind,
}

/// A hyperplane normal' x = offset expressed in one chart.
#[derive(Debug, Clone, PartialEq)]
pub struct Flat<T: Real> {
    pub chart: Chart,
    pub normal: DVector<T>,
    pub offset: T,
}

impl<T: Real> Flat<T> {
    pub fn new(chart: Chart, normal: DVector<T>, offset: T) -> Result<Self> {
        if normal.norm() <= real(DEGENERATE_EPS) {
            return Err(GeometryError::DegenerateVector);
        }
        Ok(Self {
            chart,
            normal,
            offset,
        })
    }

    /// Signed residual normal' x - offset at the point's chart coordinates.
    pub fn residual_at(&self, point: &Point<T>) -> T {
        let coords = match self.chart {
            Chart::Theta => point.theta(),
            Chart::Eta => point.eta(),
        };
        self.normal.dot(coords) - self.offset
    }
}

impl<T: Real> Geodesic<T> {
    pub fn new(a: Point<T>, b: Point<T>, kind: GeodesicKind) -> Result<Self> {
        let dist = match kind {
            GeodesicKind::Primal => (a.theta() - b.theta()).norm(),
            GeodesicKind::Dual => (a.eta() - b.eta()).norm(),
        };
        if dist <= real(DEGENERATE_EPS) {
            return Err(GeometryError::DegenerateVector);
        }
        Ok(Self { a, b, kind })
    }

    pub fn a(&self) -> &Point<T> {
        &self.a
    }

    pub fn b(&self) -> &Point<T> {
        &self.b
    }

    pub fn kind(&self) -> GeodesicKind {
        self.kind
    }

    /// Point at parameter t: linear interpolation in the kind-matching chart.
    pub fn point_at(&self, gen: &Generator<T>, t: T) -> Result<Point<T>> {
        let s = T::one() - t;
        match self.kind {
            GeodesicKind::Primal => {
                let theta = ThetaCoords(self.a.theta() * s + self.b.theta() * t);
                Point::from_theta(gen, theta)
            }
            GeodesicKind::Dual => {
                let eta = EtaCoords(self.a.eta() * s + self.b.eta() * t);
                Point::from_eta(gen, eta)
            }
        }
    }

    /// Tangent vector at the start point a.
    ///
    /// Primal geodesics have constant contravariant components theta(b) -
    /// theta(a); dual geodesics have constant covariant components eta(b) -
    /// eta(a).
    pub fn tangent_at_start(&self, gen: &Generator<T>) -> Result<TangentVector<T>> {
        match self.kind {
            GeodesicKind::Primal => TangentVector::from_contravariant(
                gen,
                self.a.clone(),
                self.b.theta() - self.a.theta(),
            ),
            GeodesicKind::Dual => {
                TangentVector::from_covariant(gen, self.a.clone(), self.b.eta() - self.a.eta())
            }
        }
    }

    /// n+1 coordinate tuples of point_at(i/n) expressed in the given chart.
    pub fn sample(&self, gen: &Generator<T>, n: usize, chart: Chart) -> Result<Vec<DVector<T>>> {
        assert!(n >= 1, "sample needs n >= 1");
        let mut out = Vec::with_capacity(n + 1);
        for i in 0..=n {
            let t = real::<T>(i as f64) / real::<T>(n as f64);
            let p = self.point_at(gen, t)?;
            out.push(match chart {
                Chart::Theta => p.theta().clone(),
                Chart::Eta => p.eta().clone(),
            });
        }
        Ok(out)
    }
}

/// Default number of segments when sampling geodesics for rendering.
pub const DEFAULT_SAMPLE_N: usize = 256;

/// Default bracketing window for [`intersect_flats_2d`], intersected with the
/// generator domain.
pub const DEFAULT_SEED_WINDOW: [[f64; 2]; 2] = [[1e-6, 50.0], [1e-6, 50.0]];

const BRACKET_CELLS: usize = 1024;
const BISECT_TOL: f64 = 1e-13;

/// All intersection points of a theta-chart flat with an eta-chart flat for a
/// 2D generator, found by bracketing along the theta-flat.
///
/// The theta-flat is parameterized by arclength in theta; the scalar root
/// function is the eta-flat residual of the mapped point. `seed_window` is a
/// theta-chart bounding box `[[x_min, x_max], [y_min, y_max]]`.
pub fn intersect_flats_2d<T: Real>(
    gen: &Generator<T>,
    f_theta: &Flat<T>,
    f_eta: &Flat<T>,
    seed_window: Option<[[f64; 2]; 2]>,
) -> Result<Vec<Point<T>>> {
    assert_eq!(gen.dim(), 2, "intersect_flats_2d requires dim 2");
    assert_eq!(f_theta.chart, Chart::Theta);
    assert_eq!(f_eta.chart, Chart::Eta);
    let window = seed_window.unwrap_or(DEFAULT_SEED_WINDOW);

    // Arclength parameterization of the theta-flat: x(s) = x0 + s * dir with
    // unit dir orthogonal to the normal, x0 the point of the flat closest to
    // the origin.
    let n = &f_theta.normal;
    let n2 = n.dot(n);
    let x0 = n * (f_theta.offset / n2);
    let dir = DVector::from_column_slice(&[-n[1], n[0]]) / n2.sqrt();

    // Clip the line to the window to get the s-range, then tighten to the
    // domain by probing.
    let mut s_lo = T::from_f64(f64::NEG_INFINITY).unwrap_or_else(|| -real::<T>(1e300));
    let mut s_hi = T::from_f64(f64::INFINITY).unwrap_or_else(|| real::<T>(1e300));
    for i in 0..2 {
        let lo = real::<T>(window[i][0]);
        let hi = real::<T>(window[i][1]);
        if dir[i].abs() > real(DEGENERATE_EPS) {
            let s1 = (lo - x0[i]) / dir[i];
            let s2 = (hi - x0[i]) / dir[i];
            s_lo = s_lo.max(s1.min(s2));
            s_hi = s_hi.min(s1.max(s2));
        } else if x0[i] < lo || x0[i] > hi {
            return Err(GeometryError::EmptyIntersection);
        }
    }
    if s_lo >= s_hi {
        return Err(GeometryError::EmptyIntersection);
    }

    let theta_at = |s: T| ThetaCoords(&x0 + &dir * s);
    let residual_at = |s: T| -> Result<T> {
        let theta = theta_at(s);
        gen.check_theta(&theta)?;
        let eta = gen.gradient(&theta)?;
        Ok(f_eta.normal.dot(&eta.0) - f_eta.offset)
    };

    // Grid scan: skip out-of-domain cells, bracket sign changes.
    let cells = BRACKET_CELLS;
    let h = (s_hi - s_lo) / real::<T>(cells as f64);
    let mut prev: Option<(T, T)> = None;
    let mut roots: Vec<T> = Vec::new();
    for i in 0..=cells {
        let s = s_lo + h * real::<T>(i as f64);
        match residual_at(s) {
            Ok(v) => {
                if v == T::zero() {
                    roots.push(s);
                    prev = Some((s, v));
                    continue;
                }
                if let Some((sp, vp)) = prev {
                    if (vp > T::zero()) != (v > T::zero()) {
                        roots.push(bisect(&residual_at, sp, s)?);
                    }
                }
                prev = Some((s, v));
            }
            Err(_) => prev = None,
        }
    }
    if roots.is_empty() {
        return Err(GeometryError::EmptyIntersection);
    }
    roots.dedup_by(|a, b| (*a - *b).abs() < real::<T>(1e-10));
    roots
        .into_iter()
        .map(|s| Point::from_theta(gen, theta_at(s)))
        .collect()
}

fn bisect<T: Real, F: Fn(T) -> Result<T>>(f: &F, mut lo: T, mut hi: T) -> Result<T> {
    let mut f_lo = f(lo)?;
    for _ in 0..200 {
        if (hi - lo).abs() <= real(BISECT_TOL) {
            break;
        }
        let mid = (lo + hi) / (T::one() + T::one());
        let f_mid = f(mid)?;
        if f_mid == T::zero() {
            return Ok(mid);
        }
        if (f_lo > T::zero()) == (f_mid > T::zero()) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok((lo + hi) / (T::one() + T::one()))
}
