//! Parametric spheres of separable divergences: two-sided scalar solves via
//! the Lambert W function (extended KL and Itakura-Saito), orthant assembly
//! of sphere points, and tangent axis-parallel boxes.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{GeometryError, Result};
use crate::numeric::{lambert_w0, lambert_w_minus1};
use crate::scalar::{real, Real};

/// Separable divergence families with closed-form two-sided scalar solves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeparableKind {
    ExtendedKl,
    ItakuraSaito,
}

/// A sphere {x : D(center : x) = radius} of a separable divergence.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereSpec<T: Real> {
    pub kind: SeparableKind,
    pub center: DVector<T>,
    pub radius: T,
}

impl<T: Real> SphereSpec<T> {
    pub fn new(kind: SeparableKind, center: DVector<T>, radius: T) -> Result<Self> {
        for (i, &c) in center.iter().enumerate() {
            if !(c > T::zero()) {
                return Err(GeometryError::DomainError {
                    chart: "sphere center",
                    index: i,
                    value: c.to_subset().unwrap_or(f64::NAN),
                });
            }
        }
        if !(radius >= T::zero()) {
            return Err(GeometryError::DomainError {
                chart: "sphere radius",
                index: 0,
                value: radius.to_subset().unwrap_or(f64::NAN),
            });
        }
        Ok(Self {
            kind,
            center,
            radius,
        })
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    fn scalar_solve(&self, c: T, u: T) -> Result<(T, T)> {
        match self.kind {
            SeparableKind::ExtendedKl => scalar_solve_kl(c, u),
            SeparableKind::ItakuraSaito => scalar_solve_is(c, u),
        }
    }
}

fn check_scalar_inputs<T: Real>(c: T, u: T) -> Result<()> {
    if !(c > T::zero()) {
        return Err(GeometryError::DomainError {
            chart: "scalar center",
            index: 0,
            value: c.to_subset().unwrap_or(f64::NAN),
        });
    }
    if !(u >= T::zero()) {
        return Err(GeometryError::DomainError {
            chart: "scalar level",
            index: 0,
            value: u.to_subset().unwrap_or(f64::NAN),
        });
    }
    Ok(())
}

/// Scalar extended KL divergence c log(c/x) - c + x.
pub fn kl_scalar_divergence<T: Real>(c: T, x: T) -> T {
    c * (c / x).ln() - c + x
}

/// Scalar Itakura-Saito divergence c/x - log(c/x) - 1.
pub fn is_scalar_divergence<T: Real>(c: T, x: T) -> T {
    c / x - (c / x).ln() - T::one()
}

/// Both solutions x of c log(c/x) - c + x = u, as (x_minus, x_plus) with
/// x_minus <= c <= x_plus. The left root comes from the principal Lambert
/// branch, the right root from the lower branch.
pub fn scalar_solve_kl<T: Real>(c: T, u: T) -> Result<(T, T)> {
    check_scalar_inputs(c, u)?;
    // x/c - log(x/c) = 1 + u/c, so x/c = -W(-exp(-1 - u/c)).
    let arg = -(-u / c - T::one()).exp();
    let x_minus = -c * lambert_w0(arg)?;
    let x_plus = -c * lambert_w_minus1(arg)?;
    Ok((x_minus.min(c), x_plus.max(c)))
}

/// Both solutions x of c/x - log(c/x) - 1 = u, as (x_minus, x_plus) with
/// x_minus <= c <= x_plus. Branch roles swap relative to the KL solve: the
/// left root uses the lower branch, the right root the principal branch.
pub fn scalar_solve_is<T: Real>(c: T, u: T) -> Result<(T, T)> {
    check_scalar_inputs(c, u)?;
    // c/x - log(c/x) = 1 + u, so c/x = -W(-exp(-1 - u)).
    let arg = -(-u - T::one()).exp();
    let x_minus = -c / lambert_w_minus1(arg)?;
    let x_plus = -c / lambert_w0(arg)?;
    Ok((x_minus.min(c), x_plus.max(c)))
}

/// One sphere sample: the simplex parameter u and the point x.
#[derive(Debug, Clone, PartialEq)]
pub struct SpherePoint<T: Real> {
    pub u: DVector<T>,
    pub x: DVector<T>,
}

/// Samples one orthant of the sphere with a recursive uniform simplex grid:
/// u_1 = j r / m, then the remainder is split the same way, the last
/// coordinate taking whatever is left. Coordinate i uses the root on the
/// side of sign(orthant[i]).
///
/// `solver` maps (center coordinate, level) to the two-sided scalar roots;
/// use [`sphere_points`] for the built-in KL/IS solvers.
pub fn sphere_points_with<T: Real, S>(
    center: &DVector<T>,
    radius: T,
    orthant: &[i8],
    m: usize,
    solver: &S,
) -> Result<Vec<SpherePoint<T>>>
where
    S: Fn(T, T) -> Result<(T, T)>,
{
    let d = center.len();
    assert_eq!(orthant.len(), d, "orthant sign per coordinate");
    assert!(m >= 1, "grid size must be >= 1");
    let mut out = Vec::new();
    let mut u = vec![T::zero(); d];
    fill_simplex(center, radius, orthant, m, solver, 0, &mut u, &mut out)?;
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn fill_simplex<T: Real, S>(
    center: &DVector<T>,
    remaining: T,
    orthant: &[i8],
    m: usize,
    solver: &S,
    i: usize,
    u: &mut Vec<T>,
    out: &mut Vec<SpherePoint<T>>,
) -> Result<()>
where
    S: Fn(T, T) -> Result<(T, T)>,
{
    let d = center.len();
    if i == d - 1 {
        u[i] = remaining.max(T::zero());
        let uv = DVector::from_vec(u.clone());
        let mut x = DVector::zeros(d);
        for k in 0..d {
            let (lo, hi) = solver(center[k], uv[k])?;
            x[k] = if orthant[k] < 0 { lo } else { hi };
        }
        out.push(SpherePoint { u: uv, x });
        return Ok(());
    }
    for j in 0..=m {
        u[i] = remaining * real::<T>(j as f64) / real::<T>(m as f64);
        fill_simplex(center, remaining - u[i], orthant, m, solver, i + 1, u, out)?;
    }
    Ok(())
}

/// Samples one orthant of `spec` with the built-in scalar solver.
pub fn sphere_points<T: Real>(
    spec: &SphereSpec<T>,
    orthant: &[i8],
    m: usize,
) -> Result<Vec<SpherePoint<T>>> {
    sphere_points_with(&spec.center, spec.radius, orthant, m, &|c, u| {
        spec.scalar_solve(c, u)
    })
}

/// The 2^D corners of the axis-parallel box tangent to the sphere at the
/// simplex parameter u (requires sum(u) = radius to 1e-12).
pub fn tangent_box<T: Real>(spec: &SphereSpec<T>, u: &DVector<T>) -> Result<Vec<DVector<T>>> {
    let d = spec.dim();
    if u.len() != d {
        return Err(GeometryError::DimensionMismatch {
            expected: d,
            got: u.len(),
        });
    }
    let sum = u.iter().fold(T::zero(), |s, &v| s + v);
    if (sum - spec.radius).abs() > real::<T>(1e-12) * (T::one() + spec.radius.abs()) {
        return Err(GeometryError::DomainError {
            chart: "tangent box level sum",
            index: 0,
            value: sum.to_subset().unwrap_or(f64::NAN),
        });
    }
    let mut sides = Vec::with_capacity(d);
    for k in 0..d {
        if u[k] < T::zero() {
            return Err(GeometryError::DomainError {
                chart: "tangent box level",
                index: k,
                value: u[k].to_subset().unwrap_or(f64::NAN),
            });
        }
        sides.push(spec.scalar_solve(spec.center[k], u[k])?);
    }
    let mut corners = Vec::with_capacity(1 << d);
    for mask in 0..(1usize << d) {
        let mut x = DVector::zeros(d);
        for k in 0..d {
            x[k] = if mask & (1 << k) == 0 {
                sides[k].0
            } else {
                sides[k].1
            };
        }
        corners.push(x);
    }
    Ok(corners)
}

/// Sum of per-coordinate divergences from the sphere's center to x.
pub fn sphere_divergence<T: Real>(spec: &SphereSpec<T>, x: &DVector<T>) -> T {
    let mut total = T::zero();
    for k in 0..spec.dim() {
        total += match spec.kind {
            SeparableKind::ExtendedKl => kl_scalar_divergence(spec.center[k], x[k]),
            SeparableKind::ItakuraSaito => is_scalar_divergence(spec.center[k], x[k]),
        };
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};

    #[test]
    fn kl_scalar_roots() {
        let (lo, hi) = scalar_solve_kl(1.0, 0.0).unwrap();
        assert_relative_eq!(lo, 1.0, epsilon = 1e-7);
        assert_relative_eq!(hi, 1.0, epsilon = 1e-7);
        // Roots of x - log x = 2 (bisection reference values).
        let (lo, hi) = scalar_solve_kl(1.0, 1.0).unwrap();
        assert_relative_eq!(lo, 0.15859433956303937, max_relative = 1e-10);
        assert_relative_eq!(hi, 3.1461932206205825, max_relative = 1e-10);
        assert!(kl_scalar_divergence(1.0, lo) - 1.0 < 1e-10);
        assert!(kl_scalar_divergence(1.0, hi) - 1.0 < 1e-10);
    }

    #[test]
    fn is_scalar_roots() {
        let (lo, hi) = scalar_solve_is(1.0, 0.0).unwrap();
        assert_relative_eq!(lo, 1.0, epsilon = 1e-7);
        assert_relative_eq!(hi, 1.0, epsilon = 1e-7);
        // Roots of 1/x - log(1/x) - 1 = 1.
        let (lo, hi): (f64, f64) = scalar_solve_is(1.0, 1.0).unwrap();
        assert_relative_eq!(is_scalar_divergence(1.0, lo), 1.0, max_relative = 1e-10);
        assert_relative_eq!(is_scalar_divergence(1.0, hi), 1.0, max_relative = 1e-10);
        // Bisection reference values for 1/x - log(1/x) = 2.
        assert_relative_eq!(lo, 0.31784443289937268, max_relative = 1e-10);
        assert_relative_eq!(hi, 6.3053952792716912, max_relative = 1e-10);
    }

    #[test]
    fn scalar_ordering_and_monotonicity() {
        for solver in [
            scalar_solve_kl as fn(f64, f64) -> crate::error::Result<(f64, f64)>,
            scalar_solve_is,
        ] {
            let c = 0.7;
            let mut prev = solver(c, 1e-6).unwrap();
            assert!(prev.0 <= c && c <= prev.1);
            for k in 1..60 {
                let u = 1e-6 + 0.1 * k as f64;
                let (lo, hi) = solver(c, u).unwrap();
                assert!(lo < prev.0, "x_minus must decrease in u");
                assert!(hi > prev.1, "x_plus must increase in u");
                assert!(lo > 0.0 && lo < c && hi > c);
                prev = (lo, hi);
            }
        }
    }

    #[test]
    fn scalar_domain_errors() {
        assert!(scalar_solve_kl(0.0, 1.0).is_err());
        assert!(scalar_solve_kl(1.0, -0.1).is_err());
        assert!(scalar_solve_is(-1.0, 1.0).is_err());
    }

    #[test]
    fn sphere_points_residuals_kl_circle() {
        let spec: SphereSpec<f64> = SphereSpec::new(
            SeparableKind::ExtendedKl,
            DVector::from_row_slice(&[0.5, 0.5]),
            0.5,
        )
        .unwrap();
        for orthant in [[-1i8, -1], [-1, 1], [1, -1], [1, 1]] {
            let pts = sphere_points(&spec, &orthant, 64).unwrap();
            assert_eq!(pts.len(), 65);
            for p in &pts {
                let res = (sphere_divergence(&spec, &p.x) - 0.5).abs();
                assert!(res < 1e-9 * 1.5, "residual {res}");
            }
        }
    }

    #[test]
    fn sphere_points_residuals_is_circle() {
        let spec: SphereSpec<f64> = SphereSpec::new(
            SeparableKind::ItakuraSaito,
            DVector::from_row_slice(&[0.5, 0.5]),
            1.0,
        )
        .unwrap();
        for orthant in [[-1i8, -1], [-1, 1], [1, -1], [1, 1]] {
            let pts = sphere_points(&spec, &orthant, 64).unwrap();
            for p in &pts {
                let res = (sphere_divergence(&spec, &p.x) - 1.0).abs();
                assert!(res < 1e-9 * 2.0, "residual {res}");
            }
        }
    }

    #[test]
    fn sphere_degenerate_cases() {
        // r = 0: single point = center.
        let spec: SphereSpec<f64> = SphereSpec::new(
            SeparableKind::ExtendedKl,
            DVector::from_row_slice(&[0.4, 1.3]),
            0.0,
        )
        .unwrap();
        let pts = sphere_points(&spec, &[1, 1], 4).unwrap();
        for p in &pts {
            assert_relative_eq!(p.x[0], 0.4, epsilon = 1e-7);
            assert_relative_eq!(p.x[1], 1.3, epsilon = 1e-7);
        }
        // D = 1: exactly the scalar roots.
        let spec: SphereSpec<f64> = SphereSpec::new(
            SeparableKind::ItakuraSaito,
            DVector::from_row_slice(&[2.0]),
            0.7,
        )
        .unwrap();
        let (lo, hi) = scalar_solve_is(2.0, 0.7).unwrap();
        let left = sphere_points(&spec, &[-1], 3).unwrap();
        let right = sphere_points(&spec, &[1], 3).unwrap();
        for p in &left {
            assert_relative_eq!(p.x[0], lo);
        }
        for p in &right {
            assert_relative_eq!(p.x[0], hi);
        }
    }

    #[test]
    fn tangent_box_corners_on_sphere() {
        let spec: SphereSpec<f64> = SphereSpec::new(
            SeparableKind::ExtendedKl,
            DVector::from_row_slice(&[0.5, 0.5]),
            0.5,
        )
        .unwrap();
        let corners = tangent_box(&spec, &DVector::from_row_slice(&[0.25, 0.25])).unwrap();
        assert_eq!(corners.len(), 4);
        for c in &corners {
            assert!((sphere_divergence(&spec, c) - 0.5).abs() < 1e-9);
        }

        let spec: SphereSpec<f64> = SphereSpec::new(
            SeparableKind::ItakuraSaito,
            DVector::from_row_slice(&[0.5, 0.5]),
            1.0,
        )
        .unwrap();
        let corners = tangent_box(&spec, &DVector::from_row_slice(&[0.5, 0.5])).unwrap();
        for c in &corners {
            assert!((sphere_divergence(&spec, c) - 1.0).abs() < 1e-9);
        }

        // Degenerate split: flat in every coordinate except the first.
        let corners = tangent_box(&spec, &DVector::from_row_slice(&[1.0, 0.0])).unwrap();
        for c in &corners {
            assert_relative_eq!(c[1], 0.5, epsilon = 1e-7);
        }
        // Wrong sum rejected.
        assert!(tangent_box(&spec, &DVector::from_row_slice(&[0.9, 0.0])).is_err());
    }

    #[test]
    fn fuzzed_residuals() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..60 {
            let d = rng.gen_range(1..=3usize);
            let kind = if rng.gen_bool(0.5) {
                SeparableKind::ExtendedKl
            } else {
                SeparableKind::ItakuraSaito
            };
            let center = DVector::from_fn(d, |_, _| rng.gen_range(0.05..4.0));
            let r: f64 = rng.gen_range(0.001..5.0);
            let spec: SphereSpec<f64> = SphereSpec::new(kind, center, r).unwrap();
            let orthant: Vec<i8> = (0..d).map(|_| if rng.gen_bool(0.5) { 1 } else { -1 }).collect();
            for p in sphere_points(&spec, &orthant, 5).unwrap() {
                let res = (sphere_divergence(&spec, &p.x) - r).abs();
                assert!(res < 1e-9 * (1.0 + r), "residual {res} (kind {kind:?})");
            }
        }
    }
}
