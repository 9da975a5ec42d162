//! Shared numeric kernels: real branches of the Lambert W function, a
//! cancellation-safe quadratic solver, damped Newton iteration for small
//! systems, and central-difference derivative estimates.

use nalgebra::{DMatrix, DVector};

use crate::error::{GeometryError, Result};
use crate::scalar::{real, Real};

/// Inputs within this distance below -1/e are clamped to the branch point.
const BRANCH_CLAMP: f64 = 1e-16;

fn branch_point<T: Real>() -> T {
    -T::e().recip()
}

/// Halley iteration for w*exp(w) = a from a starting guess.
fn halley<T: Real>(a: T, mut w: T) -> T {
    for _ in 0..50 {
        let ew = w.exp();
        let f = w * ew - a;
        if f == T::zero() {
            break;
        }
        // Halley step for f(w) = w e^w - a.
        let denom = ew * (w + T::one()) - (w + real::<T>(2.0)) * f / (real::<T>(2.0) * w + real::<T>(2.0));
        if denom == T::zero() || !denom.is_finite() {
            break;
        }
        let step = f / denom;
        w -= step;
        if step.abs() <= real::<T>(1e-16) * (T::one() + w.abs()) {
            break;
        }
    }
    w
}

/// Principal branch W0 of the Lambert W function, defined for a >= -1/e.
///
/// Satisfies w*exp(w) = a with w >= -1.
pub fn lambert_w0<T: Real>(a: T) -> Result<T> {
    let bp = branch_point::<T>();
    if a < bp - real(BRANCH_CLAMP) {
        return Err(GeometryError::DomainError {
            chart: "lambert_w0",
            index: 0,
            value: a.to_subset().unwrap_or(f64::NAN),
        });
    }
    let a = if a < bp { bp } else { a };
    let p2 = real::<T>(2.0) * (T::e() * a + T::one());
    if p2 <= T::zero() {
        return Ok(-T::one());
    }
    let w0 = if p2 < real(0.5) {
        // Series around the branch point.
        let p = p2.sqrt();
        -T::one() + p - p * p / real(3.0) + real::<T>(11.0 / 72.0) * p * p * p
    } else if a < T::e() {
        // w ~ a for small a; a Pade-style start covers (-1/e, e).
        a / (T::one() + a)
    } else {
        let l = a.ln();
        l - l.ln()
    };
    Ok(halley(a, w0).max(-T::one()))
}

/// Secondary real branch W-1 of the Lambert W function on [-1/e, 0).
///
/// Satisfies w*exp(w) = a with w <= -1.
pub fn lambert_w_minus1<T: Real>(a: T) -> Result<T> {
    let bp = branch_point::<T>();
    if a < bp - real(BRANCH_CLAMP) || a >= T::zero() {
        return Err(GeometryError::DomainError {
            chart: "lambert_w_minus1",
            index: 0,
            value: a.to_subset().unwrap_or(f64::NAN),
        });
    }
    let a = if a < bp { bp } else { a };
    let p2 = real::<T>(2.0) * (T::e() * a + T::one());
    if p2 <= T::zero() {
        return Ok(-T::one());
    }
    let w0 = if p2 < real(0.5) {
        let p = p2.sqrt();
        -T::one() - p - p * p / real(3.0) - real::<T>(11.0 / 72.0) * p * p * p
    } else {
        // Asymptote for a -> 0-: w ~ ln(-a) - ln(-ln(-a)).
        let l1 = (-a).ln();
        let l2 = (-l1).ln();
        l1 - l2
    };
    Ok(halley(a, w0).min(-T::one()))
}

/// Real roots of A x^2 + B x + C = 0, cancellation-safe.
///
/// Falls back to the linear root when A = 0; a negative discriminant yields
/// no roots.
pub fn solve_quadratic<T: Real>(a: T, b: T, c: T) -> Vec<T> {
    if a == T::zero() {
        if b == T::zero() {
            return vec![];
        }
        return vec![-c / b];
    }
    let disc = b * b - real::<T>(4.0) * a * c;
    if disc < T::zero() {
        return vec![];
    }
    if disc == T::zero() {
        return vec![-b / (real::<T>(2.0) * a)];
    }
    let sign_b = if b >= T::zero() { T::one() } else { -T::one() };
    let q = -(b + sign_b * disc.sqrt()) / real::<T>(2.0);
    if q == T::zero() {
        // b = 0 and c = 0.
        return vec![T::zero(), -b / a];
    }
    vec![q / a, c / q]
}

/// Configuration of the damped Newton solver.
#[derive(Debug, Clone, Copy)]
pub struct NewtonConfig {
    /// Residual infinity-norm tolerance.
    pub tol: f64,
    pub max_iter: usize,
    /// Maximum number of step halvings per iteration.
    pub damping: usize,
}

impl Default for NewtonConfig {
    fn default() -> Self {
        Self {
            tol: 1e-12,
            max_iter: 200,
            damping: 30,
        }
    }
}

fn inf_norm<T: Real>(v: &DVector<T>) -> T {
    v.iter().fold(T::zero(), |m, x| m.max(x.abs()))
}

/// Damped Newton iteration on a small square system f(x) = 0.
///
/// The Jacobian is estimated by central differences when `jacobian` is
/// `None`. All trial iterates must pass `domain_guard`; the step is halved
/// (up to `cfg.damping` times) until they do.
pub fn newton_solve<T, F, J, G>(
    f: F,
    jacobian: Option<J>,
    x0: &DVector<T>,
    cfg: &NewtonConfig,
    domain_guard: G,
) -> Result<DVector<T>>
where
    T: Real,
    F: Fn(&DVector<T>) -> DVector<T>,
    J: Fn(&DVector<T>) -> DMatrix<T>,
    G: Fn(&DVector<T>) -> bool,
{
    let mut x = x0.clone();
    if !domain_guard(&x) {
        return Err(GeometryError::NoConvergence {
            iterations: 0,
            residual: f64::INFINITY,
        });
    }
    let mut res = f(&x);
    let mut res_norm = inf_norm(&res);
    for iter in 0..cfg.max_iter {
        if res_norm <= real(cfg.tol) {
            return Ok(x);
        }
        let jac = match &jacobian {
            Some(j) => j(&x),
            None => fd_jacobian(&f, &x),
        };
        let scale = jac.iter().fold(T::zero(), |m, v| m.max(v.abs()));
        let lu = jac.lu();
        let det = lu.determinant();
        if det.abs() < real::<T>(1e-14) * (T::one() + scale) {
            return Err(GeometryError::SingularJacobian);
        }
        let step = lu
            .solve(&res)
            .ok_or(GeometryError::SingularJacobian)?;
        let mut lambda = T::one();
        let mut accepted = false;
        for _ in 0..=cfg.damping {
            let trial = &x - &step * lambda;
            if domain_guard(&trial) {
                let trial_res = f(&trial);
                let trial_norm = inf_norm(&trial_res);
                if trial_norm < res_norm || lambda < T::one() {
                    x = trial;
                    res = trial_res;
                    res_norm = trial_norm;
                    accepted = true;
                    break;
                }
                // Full step grew the residual: damp once, then accept.
            }
            lambda /= real::<T>(2.0);
        }
        if !accepted {
            return Err(GeometryError::NoConvergence {
                iterations: iter + 1,
                residual: res_norm.to_subset().unwrap_or(f64::NAN),
            });
        }
    }
    if res_norm <= real(cfg.tol) {
        Ok(x)
    } else {
        Err(GeometryError::NoConvergence {
            iterations: cfg.max_iter,
            residual: res_norm.to_subset().unwrap_or(f64::NAN),
        })
    }
}

fn fd_step<T: Real>(xi: T) -> T {
    real::<T>(1e-7) * (T::one() + xi.abs())
}

fn fd_jacobian<T, F>(f: &F, x: &DVector<T>) -> DMatrix<T>
where
    T: Real,
    F: Fn(&DVector<T>) -> DVector<T>,
{
    let n = x.len();
    let f0 = f(x);
    let m = f0.len();
    let mut jac = DMatrix::zeros(m, n);
    for j in 0..n {
        let h = fd_step(x[j]);
        let mut xp = x.clone();
        let mut xm = x.clone();
        xp[j] += h;
        xm[j] -= h;
        let fp = f(&xp);
        let fm = f(&xm);
        for i in 0..m {
            jac[(i, j)] = (fp[i] - fm[i]) / (real::<T>(2.0) * h);
        }
    }
    jac
}

/// Central-difference gradient estimate with step h_i = h*(1+|x_i|).
pub fn fd_gradient<T, F>(f: F, x: &DVector<T>, h: T) -> DVector<T>
where
    T: Real,
    F: Fn(&DVector<T>) -> T,
{
    let n = x.len();
    let mut g = DVector::zeros(n);
    for i in 0..n {
        let hi = h * (T::one() + x[i].abs());
        let mut xp = x.clone();
        let mut xm = x.clone();
        xp[i] += hi;
        xm[i] -= hi;
        g[i] = (f(&xp) - f(&xm)) / (real::<T>(2.0) * hi);
    }
    g
}

/// Central-difference Hessian estimate.
pub fn fd_hessian<T, F>(f: F, x: &DVector<T>, h: T) -> DMatrix<T>
where
    T: Real,
    F: Fn(&DVector<T>) -> T,
{
    let n = x.len();
    let mut hess = DMatrix::zeros(n, n);
    let f0 = f(x);
    for i in 0..n {
        let hi = h * (T::one() + x[i].abs());
        for j in i..n {
            let hj = h * (T::one() + x[j].abs());
            let v = if i == j {
                let mut xp = x.clone();
                let mut xm = x.clone();
                xp[i] += hi;
                xm[i] -= hi;
                (f(&xp) - real::<T>(2.0) * f0 + f(&xm)) / (hi * hi)
            } else {
                let mut xpp = x.clone();
                let mut xpm = x.clone();
                let mut xmp = x.clone();
                let mut xmm = x.clone();
                xpp[i] += hi;
                xpp[j] += hj;
                xpm[i] += hi;
                xpm[j] -= hj;
                xmp[i] -= hi;
                xmp[j] += hj;
                xmm[i] -= hi;
                xmm[j] -= hj;
                (f(&xpp) - f(&xpm) - f(&xmp) + f(&xmm)) / (real::<T>(4.0) * hi * hj)
            };
            hess[(i, j)] = v;
            hess[(j, i)] = v;
        }
    }
    hess
}

/// Default finite-difference step used by the test oracles.
pub fn default_fd_step<T: Real>() -> T {
    real(1e-5)
}
