//! Bregman generators: the convex potential F together with its gradient,
//! Hessian and Legendre conjugate triple (F*, grad F*, Hess F*).
//!
//! Four manifolds are built in: Mahalanobis (half quadratic form), the
//! extended Kullback-Leibler manifold (extended Shannon negentropy), the
//! Itakura-Saito manifold (Burg negentropy) and the multinoulli manifolds
//! (log-normalizer of the categorical family). A [`CustomGenerator`] can
//! supply any subset of the six maps, with the missing ones derived
//! numerically.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use serde::{Deserialize, Serialize};

use crate::error::{GeometryError, Result};
use crate::numeric::{self, NewtonConfig};
use crate::scalar::{real, Real};

/// Strict-interior margin for domain checks: points within this distance of
/// the domain boundary are rejected, since the Hessian metrics blow up there.
pub const DOMAIN_MARGIN: f64 = 1e-12;

/// Primal chart coordinates (natural parameters).
#[derive(Debug, Clone, PartialEq)]
pub struct ThetaCoords<T: Real>(pub DVector<T>);

/// Dual chart coordinates (expectation parameters).
#[derive(Debug, Clone, PartialEq)]
pub struct EtaCoords<T: Real>(pub DVector<T>);

impl<T: Real> ThetaCoords<T> {
    pub fn from_slice(values: &[T]) -> Self {
        Self(DVector::from_row_slice(values))
    }
    pub fn len(&self) -> usize {
        self.0.len()
    }
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl<T: Real> EtaCoords<T> {
    pub fn from_slice(values: &[T]) -> Self {
        Self(DVector::from_row_slice(values))
    }
    pub fn len(&self) -> usize {
        self.0.len()
    }
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl<T: Real> std::ops::Deref for ThetaCoords<T> {
    type Target = DVector<T>;
    fn deref(&self) -> &Self::Target {
        &self.0
    }
}

impl<T: Real> std::ops::Deref for EtaCoords<T> {
    type Target = DVector<T>;
    fn deref(&self) -> &Self::Target {
        &self.0
    }
}

/// Kind tag of a built-in generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeneratorKind {
    Mahalanobis,
    ExtendedKl,
    ItakuraSaito,
    Multinoulli,
}

/// JSON-facing description of a generator:
/// `{"kind": "itakura_saito" | "extended_kl" | "multinoulli" | "mahalanobis",
///   "dim": N, "q": [[...]]}` (`q` only for Mahalanobis).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub kind: GeneratorKind,
    pub dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<Vec<Vec<f64>>>,
}

/// Mahalanobis generator F_Q = (1/2) theta' Q theta for SPD Q.
#[derive(Clone)]
pub struct Mahalanobis<T: Real> {
    q: DMatrix<T>,
    // Cholesky factor of Q used to apply Q^{-1} without forming the inverse.
    chol: Cholesky<T, Dyn>,
    q_inv: DMatrix<T>,
}

impl<T: Real> Mahalanobis<T> {
    pub fn new(q: DMatrix<T>) -> Result<Self> {
        let d = q.nrows();
        if d == 0 || q.ncols() != d {
            return Err(GeometryError::InvalidSpec(
                "q_matrix must be square and non-empty".into(),
            ));
        }
        if q != q.transpose() {
            return Err(GeometryError::InvalidSpec("q_matrix must be symmetric".into()));
        }
        let chol = Cholesky::new(q.clone()).ok_or_else(|| {
            GeometryError::InvalidSpec("q_matrix must be positive definite".into())
        })?;
        let q_inv = chol.inverse();
        Ok(Self { q, chol, q_inv })
    }

    pub fn matrix(&self) -> &DMatrix<T> {
        &self.q
    }
}

type ScalarFn<T> = Box<dyn Fn(&DVector<T>) -> T + Send + Sync>;
type VectorFn<T> = Box<dyn Fn(&DVector<T>) -> DVector<T> + Send + Sync>;
type MatrixFn<T> = Box<dyn Fn(&DVector<T>) -> DMatrix<T> + Send + Sync>;
type GuardFn<T> = Box<dyn Fn(&DVector<T>) -> bool + Send + Sync>;

/// User-defined generator. Only `potential` is mandatory; every other map is
/// derived numerically when absent (the conjugate gradient by a Newton solve
/// of grad F(theta) = eta, the conjugate Hessian from the Crouzeix identity).
pub struct CustomGenerator<T: Real> {
    pub dim: usize,
    pub potential: ScalarFn<T>,
    pub gradient: Option<VectorFn<T>>,
    pub hessian: Option<MatrixFn<T>>,
    pub conjugate_potential: Option<ScalarFn<T>>,
    pub conjugate_gradient: Option<VectorFn<T>>,
    pub conjugate_hessian: Option<MatrixFn<T>>,
    /// Strict-interior membership test for the primal domain.
    pub theta_guard: Option<GuardFn<T>>,
    /// Strict-interior membership test for the dual domain.
    pub eta_guard: Option<GuardFn<T>>,
    /// Starting point for the Newton inversion of the gradient map.
    pub newton_start: Option<DVector<T>>,
}

impl<T: Real> std::fmt::Debug for Generator<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Mahalanobis(m) => f.debug_struct("Mahalanobis").field("q", &m.q).finish(),
            Self::ExtendedKl { dim } => f.debug_struct("ExtendedKl").field("dim", dim).finish(),
            Self::ItakuraSaito { dim } => {
                f.debug_struct("ItakuraSaito").field("dim", dim).finish()
            }
            Self::Multinoulli { dim } => f.debug_struct("Multinoulli").field("dim", dim).finish(),
            Self::Custom(c) => f.debug_struct("Custom").field("dim", &c.dim).finish_non_exhaustive(),
        }
    }
}

/// A dually flat manifold, defined by its Bregman generator.
pub enum Generator<T: Real> {
    Mahalanobis(Mahalanobis<T>),
    ExtendedKl { dim: usize },
    ItakuraSaito { dim: usize },
    Multinoulli { dim: usize },
    Custom(CustomGenerator<T>),
}

fn domain_err(chart: &'static str, index: usize, value: impl Into<f64>) -> GeometryError {
    GeometryError::DomainError {
        chart,
        index,
        value: value.into(),
    }
}

fn check_dim<T: Real>(v: &DVector<T>, dim: usize) -> Result<()> {
    if v.len() != dim {
        return Err(GeometryError::DimensionMismatch {
            expected: dim,
            got: v.len(),
        });
    }
    Ok(())
}

/// log(1 + sum(exp(theta_i))), overflow-safe.
fn log1p_sum_exp<T: Real>(theta: &DVector<T>) -> T {
    let m = theta.iter().fold(T::zero(), |m, &x| m.max(x));
    let s = theta.iter().fold((-m).exp(), |acc, &x| acc + (x - m).exp());
    m + s.ln()
}

impl<T: Real> Generator<T> {
    pub fn mahalanobis(q: DMatrix<T>) -> Result<Self> {
        Ok(Self::Mahalanobis(Mahalanobis::new(q)?))
    }

    /// Mahalanobis with Q = I: Euclidean geometry.
    pub fn euclidean(dim: usize) -> Self {
        Self::Mahalanobis(Mahalanobis::new(DMatrix::identity(dim, dim)).expect("identity is SPD"))
    }

    pub fn extended_kl(dim: usize) -> Self {
        assert!(dim >= 1);
        Self::ExtendedKl { dim }
    }

    pub fn itakura_saito(dim: usize) -> Self {
        assert!(dim >= 1);
        Self::ItakuraSaito { dim }
    }

    pub fn multinoulli(dim: usize) -> Self {
        assert!(dim >= 1);
        Self::Multinoulli { dim }
    }

    pub fn custom(custom: CustomGenerator<T>) -> Self {
        Self::Custom(custom)
    }

    pub fn from_spec(spec: &GeneratorSpec) -> Result<Self> {
        if spec.dim == 0 {
            return Err(GeometryError::InvalidSpec("dim must be >= 1".into()));
        }
        match spec.kind {
            GeneratorKind::Mahalanobis => {
                let rows = spec.q.as_ref().ok_or_else(|| {
                    GeometryError::InvalidSpec("mahalanobis requires a q matrix".into())
                })?;
                if rows.len() != spec.dim || rows.iter().any(|r| r.len() != spec.dim) {
                    return Err(GeometryError::InvalidSpec(format!(
                        "q must be {0}x{0}",
                        spec.dim
                    )));
                }
                let q = DMatrix::from_fn(spec.dim, spec.dim, |i, j| real(rows[i][j]));
                Self::mahalanobis(q)
            }
            GeneratorKind::ExtendedKl => Ok(Self::extended_kl(spec.dim)),
            GeneratorKind::ItakuraSaito => Ok(Self::itakura_saito(spec.dim)),
            GeneratorKind::Multinoulli => Ok(Self::multinoulli(spec.dim)),
        }
    }

    pub fn from_json(json: &str) -> Result<Self> {
        let spec: GeneratorSpec = serde_json::from_str(json)
            .map_err(|e| GeometryError::InvalidSpec(e.to_string()))?;
        Self::from_spec(&spec)
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Mahalanobis(m) => m.q.nrows(),
            Self::ExtendedKl { dim } | Self::ItakuraSaito { dim } | Self::Multinoulli { dim } => {
                *dim
            }
            Self::Custom(c) => c.dim,
        }
    }

    /// Validates that theta lies in the strict interior of the primal domain.
    pub fn check_theta(&self, theta: &ThetaCoords<T>) -> Result<()> {
        check_dim(&theta.0, self.dim())?;
        let eps = real::<T>(DOMAIN_MARGIN);
        match self {
            Self::ExtendedKl { .. } | Self::ItakuraSaito { .. } => {
                for (i, &x) in theta.0.iter().enumerate() {
                    if !(x > eps) {
                        return Err(domain_err("theta", i, x.to_subset().unwrap_or(f64::NAN)));
                    }
                }
            }
            Self::Mahalanobis(_) | Self::Multinoulli { .. } => {
                for (i, &x) in theta.0.iter().enumerate() {
                    if !x.is_finite() {
                        return Err(domain_err("theta", i, x.to_subset().unwrap_or(f64::NAN)));
                    }
                }
            }
            Self::Custom(c) => {
                if let Some(guard) = &c.theta_guard {
                    if !guard(&theta.0) {
                        return Err(domain_err("theta", 0, f64::NAN));
                    }
                }
            }
        }
        Ok(())
    }

    /// Validates that eta lies in the strict interior of the dual domain.
    pub fn check_eta(&self, eta: &EtaCoords<T>) -> Result<()> {
        check_dim(&eta.0, self.dim())?;
        let eps = real::<T>(DOMAIN_MARGIN);
        match self {
            Self::ItakuraSaito { .. } => {
                for (i, &x) in eta.0.iter().enumerate() {
                    if !(x < -eps) {
                        return Err(domain_err("eta", i, x.to_subset().unwrap_or(f64::NAN)));
                    }
                }
            }
            Self::Multinoulli { .. } => {
                let mut sum = T::zero();
                for (i, &x) in eta.0.iter().enumerate() {
                    if !(x > eps) {
                        return Err(domain_err("eta", i, x.to_subset().unwrap_or(f64::NAN)));
                    }
                    sum += x;
                }
                if !(sum < T::one() - eps) {
                    return Err(domain_err("eta", 0, sum.to_subset().unwrap_or(f64::NAN)));
                }
            }
            Self::Mahalanobis(_) | Self::ExtendedKl { .. } => {
                for (i, &x) in eta.0.iter().enumerate() {
                    if !x.is_finite() {
                        return Err(domain_err("eta", i, x.to_subset().unwrap_or(f64::NAN)));
                    }
                }
            }
            Self::Custom(c) => {
                if let Some(guard) = &c.eta_guard {
                    if !guard(&eta.0) {
                        return Err(domain_err("eta", 0, f64::NAN));
                    }
                }
            }
        }
        Ok(())
    }

    /// The potential F(theta).
    pub fn potential(&self, theta: &ThetaCoords<T>) -> Result<T> {
        self.check_theta(theta)?;
        let th = &theta.0;
        Ok(match self {
            Self::Mahalanobis(m) => (th.transpose() * &m.q * th)[(0, 0)] / real::<T>(2.0),
            Self::ExtendedKl { .. } => th.iter().fold(T::zero(), |s, &x| s + x * x.ln() - x),
            Self::ItakuraSaito { .. } => -th.iter().fold(T::zero(), |s, &x| s + x.ln()),
            Self::Multinoulli { .. } => log1p_sum_exp(th),
            Self::Custom(c) => (c.potential)(th),
        })
    }

    /// The gradient eta = grad F(theta); this is the theta -> eta chart change.
    pub fn gradient(&self, theta: &ThetaCoords<T>) -> Result<EtaCoords<T>> {
        self.check_theta(theta)?;
        let th = &theta.0;
        Ok(EtaCoords(match self {
            Self::Mahalanobis(m) => &m.q * th,
            Self::ExtendedKl { .. } => th.map(|x| x.ln()),
            Self::ItakuraSaito { .. } => th.map(|x| -x.recip()),
            Self::Multinoulli { .. } => {
                let f = log1p_sum_exp(th);
                th.map(|x| (x - f).exp())
            }
            Self::Custom(c) => match &c.gradient {
                Some(g) => g(th),
                None => numeric::fd_gradient(|x| (c.potential)(x), th, numeric::default_fd_step()),
            },
        }))
    }

    /// The Hessian metric grad^2 F(theta), symmetric positive definite.
    pub fn hessian(&self, theta: &ThetaCoords<T>) -> Result<DMatrix<T>> {
        self.check_theta(theta)?;
        let th = &theta.0;
        Ok(match self {
            Self::Mahalanobis(m) => m.q.clone(),
            Self::ExtendedKl { .. } => DMatrix::from_diagonal(&th.map(|x| x.recip())),
            Self::ItakuraSaito { .. } => DMatrix::from_diagonal(&th.map(|x| (x * x).recip())),
            Self::Multinoulli { dim } => {
                let f = log1p_sum_exp(th);
                let lam: DVector<T> = th.map(|x| (x - f).exp());
                DMatrix::from_fn(*dim, *dim, |i, j| {
                    if i == j {
                        lam[i] - lam[i] * lam[i]
                    } else {
                        -lam[i] * lam[j]
                    }
                })
            }
            Self::Custom(c) => match &c.hessian {
                Some(h) => h(th),
                None => numeric::fd_hessian(|x| (c.potential)(x), th, numeric::default_fd_step()),
            },
        })
    }

    /// The Legendre conjugate F*(eta).
    pub fn conjugate_potential(&self, eta: &EtaCoords<T>) -> Result<T> {
        self.check_eta(eta)?;
        let et = &eta.0;
        Ok(match self {
            Self::Mahalanobis(m) => (et.transpose() * &m.q_inv * et)[(0, 0)] / real::<T>(2.0),
            Self::ExtendedKl { .. } => et.iter().fold(T::zero(), |s, &x| s + x.exp()),
            Self::ItakuraSaito { dim } => {
                -real::<T>(*dim as f64) - et.iter().fold(T::zero(), |s, &x| s + (-x).ln())
            }
            Self::Multinoulli { .. } => {
                let rest = T::one() - et.iter().fold(T::zero(), |s, &x| s + x);
                et.iter().fold(rest * rest.ln(), |s, &x| s + x * x.ln())
            }
            Self::Custom(c) => match &c.conjugate_potential {
                Some(f) => f(et),
                None => {
                    let theta = self.conjugate_gradient(eta)?;
                    theta.0.dot(et) - (c.potential)(&theta.0)
                }
            },
        })
    }

    /// The conjugate gradient theta = grad F*(eta); the eta -> theta chart change.
    pub fn conjugate_gradient(&self, eta: &EtaCoords<T>) -> Result<ThetaCoords<T>> {
        self.check_eta(eta)?;
        let et = &eta.0;
        Ok(ThetaCoords(match self {
            Self::Mahalanobis(m) => m.chol.solve(et),
            Self::ExtendedKl { .. } => et.map(|x| x.exp()),
            Self::ItakuraSaito { .. } => et.map(|x| -x.recip()),
            Self::Multinoulli { .. } => {
                let rest = T::one() - et.iter().fold(T::zero(), |s, &x| s + x);
                et.map(|x| (x / rest).ln())
            }
            Self::Custom(c) => match &c.conjugate_gradient {
                Some(g) => g(et),
                None => self.invert_gradient(c, et)?,
            },
        }))
    }

    /// The conjugate Hessian grad^2 F*(eta) = (grad^2 F(theta(eta)))^{-1}.
    pub fn conjugate_hessian(&self, eta: &EtaCoords<T>) -> Result<DMatrix<T>> {
        self.check_eta(eta)?;
        let et = &eta.0;
        Ok(match self {
            Self::Mahalanobis(m) => m.q_inv.clone(),
            Self::ExtendedKl { .. } => DMatrix::from_diagonal(&et.map(|x| x.exp())),
            Self::ItakuraSaito { .. } => DMatrix::from_diagonal(&et.map(|x| (x * x).recip())),
            Self::Multinoulli { dim } => {
                let rest = T::one() - et.iter().fold(T::zero(), |s, &x| s + x);
                DMatrix::from_fn(*dim, *dim, |i, j| {
                    if i == j {
                        rest.recip() + et[i].recip()
                    } else {
                        rest.recip()
                    }
                })
            }
            Self::Custom(c) => match &c.conjugate_hessian {
                Some(h) => h(et),
                None => {
                    // Crouzeix identity: invert the primal Hessian at theta(eta).
                    let theta = self.conjugate_gradient(eta)?;
                    let hess = self.hessian(&theta)?;
                    hess.clone()
                        .try_inverse()
                        .ok_or(GeometryError::SingularSystem)?
                }
            },
        })
    }

    /// Newton inversion of grad F(theta) = eta for custom generators.
    fn invert_gradient(&self, c: &CustomGenerator<T>, eta: &DVector<T>) -> Result<DVector<T>> {
        let cfg = NewtonConfig {
            tol: 1e-12,
            max_iter: 100,
            damping: 30,
        };
        let x0 = c
            .newton_start
            .clone()
            .unwrap_or_else(|| DVector::from_element(c.dim, T::one()));
        let f = |x: &DVector<T>| {
            let g = match &c.gradient {
                Some(g) => g(x),
                None => numeric::fd_gradient(|y| (c.potential)(y), x, numeric::default_fd_step()),
            };
            g - eta
        };
        let guard = |x: &DVector<T>| match &c.theta_guard {
            Some(g) => g(x),
            None => true,
        };
        numeric::newton_solve(f, None::<fn(&DVector<T>) -> DMatrix<T>>, &x0, &cfg, guard)
    }
}
