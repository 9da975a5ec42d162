//! Bregman, dual and Fenchel-Young divergences, the Jensen divergence pair,
//! the 3-/4-parameter and parallelogram identities, and the generalized
//! Pythagoras check.

use crate::chart::Point;
use crate::error::Result;
use crate::generator::{EtaCoords, Generator, ThetaCoords};
use crate::scalar::Real;

/// Bregman divergence B_F(theta1 : theta2) = F(t1) - F(t2) - (t1-t2)' grad F(t2).
pub fn bregman<T: Real>(
    gen: &Generator<T>,
    theta1: &ThetaCoords<T>,
    theta2: &ThetaCoords<T>,
) -> Result<T> {
    let f1 = gen.potential(theta1)?;
    let f2 = gen.potential(theta2)?;
    let g2 = gen.gradient(theta2)?;
    Ok(f1 - f2 - (&theta1.0 - &theta2.0).dot(&g2.0))
}

/// Dual Bregman divergence B_{F*}(eta1 : eta2).
pub fn dual_bregman<T: Real>(
    gen: &Generator<T>,
    eta1: &EtaCoords<T>,
    eta2: &EtaCoords<T>,
) -> Result<T> {
    let f1 = gen.conjugate_potential(eta1)?;
    let f2 = gen.conjugate_potential(eta2)?;
    let g2 = gen.conjugate_gradient(eta2)?;
    Ok(f1 - f2 - (&eta1.0 - &eta2.0).dot(&g2.0))
}

/// Fenchel-Young (canonical) divergence A_F(theta1 : eta2) = F + F* - <theta, eta>.
pub fn fenchel_young<T: Real>(
    gen: &Generator<T>,
    theta1: &ThetaCoords<T>,
    eta2: &EtaCoords<T>,
) -> Result<T> {
    Ok(gen.potential(theta1)? + gen.conjugate_potential(eta2)? - theta1.0.dot(&eta2.0))
}

/// Jensen divergence J_F = (F(t1)+F(t2))/2 - F((t1+t2)/2).
pub fn jensen<T: Real>(
    gen: &Generator<T>,
    theta1: &ThetaCoords<T>,
    theta2: &ThetaCoords<T>,
) -> Result<T> {
    let mid = ThetaCoords((&theta1.0 + &theta2.0) / (T::one() + T::one()));
    Ok((gen.potential(theta1)? + gen.potential(theta2)?) / (T::one() + T::one())
        - gen.potential(&mid)?)
}

/// Jensen-Bregman divergence: the average of the two Bregman divergences to
/// the midpoint. Equal to [`jensen`] by the midpoint identity; kept as a
/// separate algebraic route.
pub fn jensen_bregman<T: Real>(
    gen: &Generator<T>,
    theta1: &ThetaCoords<T>,
    theta2: &ThetaCoords<T>,
) -> Result<T> {
    let mid = ThetaCoords((&theta1.0 + &theta2.0) / (T::one() + T::one()));
    Ok((bregman(gen, theta1, &mid)? + bregman(gen, theta2, &mid)?) / (T::one() + T::one()))
}

/// Residual of the 3-parameter identity (generalized law of cosines):
/// B(t1:t2) - B(t1:t3) - B(t3:t2) + (t1-t3)'(grad F(t2) - grad F(t3)).
pub fn three_param_residual<T: Real>(
    gen: &Generator<T>,
    theta1: &ThetaCoords<T>,
    theta2: &ThetaCoords<T>,
    theta3: &ThetaCoords<T>,
) -> Result<T> {
    let correction = (&theta1.0 - &theta3.0).dot(&(gen.gradient(theta2)?.0 - gen.gradient(theta3)?.0));
    Ok(bregman(gen, theta1, theta2)?
        - bregman(gen, theta1, theta3)?
        - bregman(gen, theta3, theta2)?
        + correction)
}

/// Residual of the 4-parameter (quadrilateral) identity:
/// B(p1:q1) + B(p2:q2) - B(p1:q2) - B(p2:q1) - (t(p2)-t(p1))'(eta(q1)-eta(q2)).
pub fn four_param_residual<T: Real>(
    gen: &Generator<T>,
    p1: &ThetaCoords<T>,
    p2: &ThetaCoords<T>,
    q1: &ThetaCoords<T>,
    q2: &ThetaCoords<T>,
) -> Result<T> {
    let eta_q1 = gen.gradient(q1)?;
    let eta_q2 = gen.gradient(q2)?;
    Ok(bregman(gen, p1, q1)? + bregman(gen, p2, q2)?
        - bregman(gen, p1, q2)?
        - bregman(gen, p2, q1)?
        - (&p2.0 - &p1.0).dot(&(eta_q1.0 - eta_q2.0)))
}

/// Residual of the parallelogram identity:
/// B(t1:t) + B(t2:t) - 2 J_F(t1,t2) - 2 B((t1+t2)/2 : t).
pub fn parallelogram_residual<T: Real>(
    gen: &Generator<T>,
    theta1: &ThetaCoords<T>,
    theta2: &ThetaCoords<T>,
    theta: &ThetaCoords<T>,
) -> Result<T> {
    let two = T::one() + T::one();
    let mid = ThetaCoords((&theta1.0 + &theta2.0) / two);
    Ok(bregman(gen, theta1, theta)? + bregman(gen, theta2, theta)?
        - two * jensen(gen, theta1, theta2)?
        - two * bregman(gen, &mid, theta)?)
}

/// Both Pythagorean residuals and the matching inner products at q.
///
/// By the 3-parameter identity, `primal_residual` equals `primal_cos`
/// (the inner product g_q(v_qp, v*_qr)) and likewise for the dual pair, so
/// the sign classifies the angle at q as acute, right, or obtuse.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PythagorasReport<T: Real> {
    /// D(p:q) + D(q:r) - D(p:r).
    pub primal_residual: T,
    /// D*(p:q) + D*(q:r) - D*(p:r).
    pub dual_residual: T,
    /// g_q(v_qp, v*_qr) = (theta_p - theta_q)'(eta_r - eta_q).
    pub primal_cos: T,
    /// g_q(v*_qp, v_qr) = (eta_p - eta_q)'(theta_r - theta_q).
    pub dual_cos: T,
}

/// Evaluates both dual Pythagorean identities for the triple (p, q, r).
pub fn check_pythagoras<T: Real>(
    gen: &Generator<T>,
    p: &Point<T>,
    q: &Point<T>,
    r: &Point<T>,
) -> Result<PythagorasReport<T>> {
    let tp = ThetaCoords(p.theta().clone());
    let tq = ThetaCoords(q.theta().clone());
    let tr = ThetaCoords(r.theta().clone());
    let primal_residual =
        bregman(gen, &tp, &tq)? + bregman(gen, &tq, &tr)? - bregman(gen, &tp, &tr)?;
    // D*(a:b) = D(b:a).
    let dual_residual =
        bregman(gen, &tq, &tp)? + bregman(gen, &tr, &tq)? - bregman(gen, &tr, &tp)?;
    let primal_cos = (p.theta() - q.theta()).dot(&(r.eta() - q.eta()));
    let dual_cos = (p.eta() - q.eta()).dot(&(r.theta() - q.theta()));
    Ok(PythagorasReport {
        primal_residual,
        dual_residual,
        primal_cos,
        dual_cos,
    })
}

/// Relative scale for residual identities: 1 + sum of term magnitudes.
pub fn residual_scale<T: Real>(terms: &[T]) -> T {
    terms.iter().fold(T::one(), |s, t| s + t.abs())
}
