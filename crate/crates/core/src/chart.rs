//! Tangent-space machinery: contravariant/covariant component conversion,
//! inner products, norms, angles and the dual pair of parallel transports.
//!
//! The primal basis is fixed globally (the standard basis of the theta
//! chart), so contravariant components are the canonical storage; covariant
//! components are obtained by lowering with the Hessian metric and cached on
//! the vector.

use nalgebra::DVector;

use crate::error::{GeometryError, Result};
use crate::generator::{EtaCoords, Generator, ThetaCoords};
use crate::scalar::{real, Real};

/// Norm threshold below which a vector counts as degenerate.
pub const DEGENERATE_EPS: f64 = 1e-12;

/// A manifold point with both chart representations cached.
#[derive(Debug, Clone, PartialEq)]
pub struct Point<T: Real> {
    theta: DVector<T>,
    eta: DVector<T>,
}

impl<T: Real> Point<T> {
    pub fn from_theta(gen: &Generator<T>, theta: ThetaCoords<T>) -> Result<Self> {
        let eta = gen.gradient(&theta)?;
        Ok(Self {
            theta: theta.0,
            eta: eta.0,
        })
    }

    pub fn from_eta(gen: &Generator<T>, eta: EtaCoords<T>) -> Result<Self> {
        let theta = gen.conjugate_gradient(&eta)?;
        Ok(Self {
            theta: theta.0,
            eta: eta.0,
        })
    }

    pub fn theta(&self) -> &DVector<T> {
        &self.theta
    }

    pub fn eta(&self) -> &DVector<T> {
        &self.eta
    }

    pub fn dim(&self) -> usize {
        self.theta.len()
    }

    /// Coordinate distance in the theta chart (used for distinctness tests).
    pub fn theta_distance(&self, other: &Self) -> T {
        (&self.theta - &other.theta).norm()
    }
}

/// A tangent vector at a base point, with both component representations.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentVector<T: Real> {
    base: Point<T>,
    contravariant: DVector<T>,
    covariant: DVector<T>,
}

impl<T: Real> TangentVector<T> {
    pub fn from_contravariant(
        gen: &Generator<T>,
        base: Point<T>,
        contravariant: DVector<T>,
    ) -> Result<Self> {
        let covariant = lower(gen, &base, &contravariant)?;
        Ok(Self {
            base,
            contravariant,
            covariant,
        })
    }

    pub fn from_covariant(
        gen: &Generator<T>,
        base: Point<T>,
        covariant: DVector<T>,
    ) -> Result<Self> {
        let contravariant = raise(gen, &base, &covariant)?;
        Ok(Self {
            base,
            contravariant,
            covariant,
        })
    }

    pub fn base(&self) -> &Point<T> {
        &self.base
    }

    pub fn contravariant(&self) -> &DVector<T> {
        &self.contravariant
    }

    pub fn covariant(&self) -> &DVector<T> {
        &self.covariant
    }

    /// Metric length, guarded against tiny negative round-off.
    pub fn norm(&self) -> T {
        self.contravariant.dot(&self.covariant).max(T::zero()).sqrt()
    }
}

/// Lowers contravariant components by the Hessian metric at the point.
pub fn lower<T: Real>(
    gen: &Generator<T>,
    point: &Point<T>,
    contravariant: &DVector<T>,
) -> Result<DVector<T>> {
    let h = gen.hessian(&ThetaCoords(point.theta.clone()))?;
    Ok(h * contravariant)
}

/// Raises covariant components by the conjugate Hessian at the point.
pub fn raise<T: Real>(
    gen: &Generator<T>,
    point: &Point<T>,
    covariant: &DVector<T>,
) -> Result<DVector<T>> {
    let h = gen.conjugate_hessian(&EtaCoords(point.eta.clone()))?;
    Ok(h * covariant)
}

fn same_base<T: Real>(u: &TangentVector<T>, v: &TangentVector<T>) -> Result<()> {
    if u.base.theta_distance(&v.base) > real(DEGENERATE_EPS) {
        return Err(GeometryError::BasePointMismatch);
    }
    Ok(())
}

/// Inner product g_p(u, v) of two vectors based at the same point.
pub fn inner_product<T: Real>(u: &TangentVector<T>, v: &TangentVector<T>) -> Result<T> {
    same_base(u, v)?;
    Ok(u.covariant.dot(&v.contravariant))
}

/// Interior angle between u and v at their common base point, in [0, pi].
pub fn angle<T: Real>(u: &TangentVector<T>, v: &TangentVector<T>) -> Result<T> {
    same_base(u, v)?;
    let nu = u.norm();
    let nv = v.norm();
    if nu < real(DEGENERATE_EPS) || nv < real(DEGENERATE_EPS) {
        return Err(GeometryError::DegenerateVector);
    }
    let cos = (u.covariant.dot(&v.contravariant) / (nu * nv))
        .min(T::one())
        .max(-T::one());
    Ok(cos.acos())
}

/// Primal parallel transport: contravariant components are preserved.
pub fn primal_transport<T: Real>(
    gen: &Generator<T>,
    to: &Point<T>,
    v: &TangentVector<T>,
) -> Result<TangentVector<T>> {
    TangentVector::from_contravariant(gen, to.clone(), v.contravariant.clone())
}

/// Dual parallel transport: covariant components are preserved.
pub fn dual_transport<T: Real>(
    gen: &Generator<T>,
    to: &Point<T>,
    v: &TangentVector<T>,
) -> Result<TangentVector<T>> {
    TangentVector::from_covariant(gen, to.clone(), v.covariant.clone())
}
