//! Geodesic triangles with per-edge connection types, interior angles,
//! right-angle flats, double-right and prescribed-angle constructions, the
//! triple-right search, and the simultaneous dual-Pythagoras constructions.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::chart::{angle, Point, TangentVector};
use crate::error::{GeometryError, Result};
use crate::generator::{Generator, ThetaCoords};
use crate::geodesic::{Chart, Flat, GeodesicKind};
use crate::numeric::{newton_solve, solve_quadratic, NewtonConfig};
use crate::scalar::{real, Real};

/// Minimum pairwise theta-distance between triangle vertices.
pub const DISTINCT_EPS: f64 = 1e-10;

/// A triangle with vertices p, q, r and a connection type per edge
/// (pq, qr, rp).
#[derive(Debug, Clone)]
pub struct GeodesicTriangle<T: Real> {
    pub p: Point<T>,
    pub q: Point<T>,
    pub r: Point<T>,
    pub edges: [GeodesicKind; 3],
}

/// Interior angles of a triangle, their sum and the excess over pi.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AngleReport<T: Real> {
    pub alpha_p: T,
    pub alpha_q: T,
    pub alpha_r: T,
    pub total: T,
    pub excess: T,
}

#[derive(Serialize, Deserialize)]
struct TriangleJson {
    p: Vec<f64>,
    q: Vec<f64>,
    r: Vec<f64>,
    edges: String,
}

fn edge_char(k: GeodesicKind) -> char {
    match k {
        GeodesicKind::Primal => 'p',
        GeodesicKind::Dual => 'd',
    }
}

/// Parses an edge-type string over the alphabet {p, d}, e.g. "pdp".
pub fn parse_edges(s: &str) -> Result<[GeodesicKind; 3]> {
    let chars: Vec<char> = s.chars().collect();
    if chars.len() != 3 {
        return Err(GeometryError::InvalidSpec(format!(
            "edge string must have 3 characters, got {s:?}"
        )));
    }
    let mut out = [GeodesicKind::Primal; 3];
    for (i, c) in chars.iter().enumerate() {
        out[i] = match c {
            'p' => GeodesicKind::Primal,
            'd' => GeodesicKind::Dual,
            _ => {
                return Err(GeometryError::InvalidSpec(format!(
                    "edge character must be 'p' or 'd', got {c:?}"
                )))
            }
        };
    }
    Ok(out)
}

impl<T: Real> GeodesicTriangle<T> {
    pub fn new(p: Point<T>, q: Point<T>, r: Point<T>, edges: [GeodesicKind; 3]) -> Result<Self> {
        let eps = real(DISTINCT_EPS);
        if p.theta_distance(&q) <= eps || q.theta_distance(&r) <= eps || r.theta_distance(&p) <= eps
        {
            return Err(GeometryError::DegenerateVector);
        }
        Ok(Self { p, q, r, edges })
    }

    /// Same vertices with every edge type flipped. An involution.
    pub fn dual_triangle(&self) -> Self {
        let flip = |k: GeodesicKind| match k {
            GeodesicKind::Primal => GeodesicKind::Dual,
            GeodesicKind::Dual => GeodesicKind::Primal,
        };
        Self {
            p: self.p.clone(),
            q: self.q.clone(),
            r: self.r.clone(),
            edges: [flip(self.edges[0]), flip(self.edges[1]), flip(self.edges[2])],
        }
    }

    /// Edge-type string over {p, d}, e.g. "ppp" or "pdp".
    pub fn edges_str(&self) -> String {
        self.edges.iter().map(|&k| edge_char(k)).collect()
    }

    pub fn to_json(&self) -> String {
        let v = |pt: &Point<T>| {
            pt.theta()
                .iter()
                .map(|x| x.to_subset().expect("scalar convertible to f64"))
                .collect()
        };
        serde_json::to_string(&TriangleJson {
            p: v(&self.p),
            q: v(&self.q),
            r: v(&self.r),
            edges: self.edges_str(),
        })
        .expect("triangle serialization cannot fail")
    }

    pub fn from_json(gen: &Generator<T>, json: &str) -> Result<Self> {
        let raw: TriangleJson = serde_json::from_str(json)
            .map_err(|e| GeometryError::InvalidSpec(format!("triangle JSON: {e}")))?;
        let pt = |v: &[f64]| {
            let coords: Vec<T> = v.iter().map(|&x| real(x)).collect();
            Point::from_theta(gen, ThetaCoords(DVector::from_vec(coords)))
        };
        Self::new(pt(&raw.p)?, pt(&raw.q)?, pt(&raw.r)?, parse_edges(&raw.edges)?)
    }
}

/// Tangent at `from` pointing toward `to` along an edge of the given kind.
fn edge_tangent<T: Real>(
    gen: &Generator<T>,
    from: &Point<T>,
    to: &Point<T>,
    kind: GeodesicKind,
) -> Result<TangentVector<T>> {
    match kind {
        GeodesicKind::Primal => {
            TangentVector::from_contravariant(gen, from.clone(), to.theta() - from.theta())
        }
        GeodesicKind::Dual => {
            TangentVector::from_covariant(gen, from.clone(), to.eta() - from.eta())
        }
    }
}

/// Interior angles measured with the Hessian metric at each vertex, using
/// the edge-type-appropriate tangent for each incident edge.
pub fn interior_angles<T: Real>(
    gen: &Generator<T>,
    t: &GeodesicTriangle<T>,
) -> Result<AngleReport<T>> {
    // Edge order: 0 = pq, 1 = qr, 2 = rp.
    let alpha_p = angle(
        &edge_tangent(gen, &t.p, &t.q, t.edges[0])?,
        &edge_tangent(gen, &t.p, &t.r, t.edges[2])?,
    )?;
    let alpha_q = angle(
        &edge_tangent(gen, &t.q, &t.r, t.edges[1])?,
        &edge_tangent(gen, &t.q, &t.p, t.edges[0])?,
    )?;
    let alpha_r = angle(
        &edge_tangent(gen, &t.r, &t.p, t.edges[2])?,
        &edge_tangent(gen, &t.r, &t.q, t.edges[1])?,
    )?;
    let total = alpha_p + alpha_q + alpha_r;
    Ok(AngleReport {
        alpha_p,
        alpha_q,
        alpha_r,
        total,
        excess: total - T::pi(),
    })
}

/// The theta-flat of points r whose primal edge qr is metric-orthogonal at q
/// to the primal edge qp.
pub fn right_angle_flat<T: Real>(
    gen: &Generator<T>,
    p: &Point<T>,
    q: &Point<T>,
) -> Result<Flat<T>> {
    let normal = gen.hessian(&ThetaCoords(q.theta().clone()))? * (p.theta() - q.theta());
    let offset = q.theta().dot(&normal);
    Flat::new(Chart::Theta, normal, offset)
}

/// Solves for the third vertex r of a 2D ppp triangle with right angles at
/// both p and q, by Cramer's rule on the two right-angle flat equations.
pub fn solve_double_right<T: Real>(
    gen: &Generator<T>,
    p: &Point<T>,
    q: &Point<T>,
) -> Result<ThetaCoords<T>> {
    assert_eq!(gen.dim(), 2, "solve_double_right requires dim 2");
    let theta_pq = p.theta() - q.theta();
    let hq = gen.hessian(&ThetaCoords(q.theta().clone()))?;
    let hp = gen.hessian(&ThetaCoords(p.theta().clone()))?;
    let row_q = &hq * &theta_pq;
    let row_p = &hp * &theta_pq;
    let b1 = q.theta().dot(&row_q);
    let b2 = p.theta().dot(&row_p);
    let a = DMatrix::from_rows(&[row_q.transpose(), row_p.transpose()]);
    let det = a[(0, 0)] * a[(1, 1)] - a[(0, 1)] * a[(1, 0)];
    let scale = a.iter().fold(T::zero(), |m, v| m.max(v.abs()));
    if det.abs() < real::<T>(1e-12) * (T::one() + scale) {
        return Err(GeometryError::SingularSystem);
    }
    let x = (b1 * a[(1, 1)] - a[(0, 1)] * b2) / det;
    let y = (a[(0, 0)] * b2 - b1 * a[(1, 0)]) / det;
    let theta_r = ThetaCoords(DVector::from_column_slice(&[x, y]));
    gen.check_theta(&theta_r)?;
    Ok(theta_r)
}

/// Solves for r such that the ppp triangle (p, q, r) has interior angle
/// `alpha_q` at q and `alpha_p` at p, by damped Newton from `initial`.
pub fn solve_prescribed_angles<T: Real>(
    gen: &Generator<T>,
    p: &Point<T>,
    q: &Point<T>,
    alpha_q: T,
    alpha_p: T,
    initial: &ThetaCoords<T>,
) -> Result<ThetaCoords<T>> {
    assert_eq!(gen.dim(), 2, "solve_prescribed_angles requires dim 2");
    let theta_pq = p.theta() - q.theta();
    let theta_qp = -&theta_pq;
    let hq = gen.hessian(&ThetaCoords(q.theta().clone()))?;
    let hp = gen.hessian(&ThetaCoords(p.theta().clone()))?;
    let norm_pq_q = (&hq * &theta_pq).dot(&theta_pq).max(T::zero()).sqrt();
    let norm_qp_p = (&hp * &theta_qp).dot(&theta_qp).max(T::zero()).sqrt();
    let cos_q = alpha_q.cos();
    let cos_p = alpha_p.cos();
    let tq = q.theta().clone();
    let tp = p.theta().clone();

    let residual = |x: &DVector<T>| -> DVector<T> {
        let theta_rq = x - &tq;
        let theta_rp = x - &tp;
        let nq = (&hq * &theta_rq).dot(&theta_rq).max(T::zero()).sqrt();
        let np = (&hp * &theta_rp).dot(&theta_rp).max(T::zero()).sqrt();
        let f1 = theta_rq.dot(&(&hq * &theta_pq)) - nq * norm_pq_q * cos_q;
        let f2 = theta_rp.dot(&(&hp * &theta_qp)) - np * norm_qp_p * cos_p;
        DVector::from_column_slice(&[f1, f2])
    };
    let guard = |x: &DVector<T>| gen.check_theta(&ThetaCoords(x.clone())).is_ok();
    let cfg = NewtonConfig::default();
    let sol = newton_solve(
        residual,
        None::<fn(&DVector<T>) -> DMatrix<T>>,
        &initial.0,
        &cfg,
        guard,
    )?;
    let theta_r = ThetaCoords(sol);
    gen.check_theta(&theta_r)?;
    Ok(theta_r)
}

/// Outcome of the multi-start triple-right search. A fruitless search is a
/// value, not an error.
#[derive(Debug, Clone)]
pub enum SearchOutcome<T: Real> {
    Found {
        p: Point<T>,
        q: Point<T>,
        r: Point<T>,
        max_residual: T,
    },
    NotFound {
        best_residual: T,
        starts_used: usize,
    },
}

/// Multi-start Newton search for a ppp triangle with right angles at all
/// three vertices, inside the theta-chart box `[[x_min, x_max], [y_min,
/// y_max]]`.
///
/// Each start pins p fully and the first coordinate of q (drawn uniformly
/// from the box with a seeded RNG) and solves the three orthogonality
/// equations for the remaining three coordinates.
pub fn search_triple_right<T: Real>(
    gen: &Generator<T>,
    bounds: [[f64; 2]; 2],
    budget: usize,
    rng_seed: u64,
) -> SearchOutcome<T> {
    assert_eq!(gen.dim(), 2, "search_triple_right requires dim 2");
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let lo = [real::<T>(bounds[0][0]), real::<T>(bounds[1][0])];
    let hi = [real::<T>(bounds[0][1]), real::<T>(bounds[1][1])];
    let in_box = |v: &DVector<T>, i: usize, j: usize| {
        v[0] >= lo[i] && v[0] <= hi[i] && v[1] >= lo[j] && v[1] <= hi[j]
    };
    let mut best = T::from_f64(f64::INFINITY).unwrap_or_else(|| real::<T>(1e300));
    let mut starts_used = 0usize;

    let cfg = NewtonConfig {
        tol: 1e-10,
        max_iter: 40,
        damping: 10,
    };
    let found_tol = real::<T>(1e-9);
    let distinct = real::<T>(1e-6);

    for _ in 0..budget {
        starts_used += 1;
        let mut draw = |i: usize| {
            let u: f64 = rng.gen_range(0.0..1.0);
            lo[i] + (hi[i] - lo[i]) * real::<T>(u)
        };
        let p = DVector::from_column_slice(&[draw(0), draw(1)]);
        let qx = draw(0);
        // Unknowns: q_y, r_x, r_y.
        let x0 = DVector::from_column_slice(&[draw(1), draw(0), draw(1)]);

        let assemble = |x: &DVector<T>| {
            let q = DVector::from_column_slice(&[qx, x[0]]);
            let r = DVector::from_column_slice(&[x[1], x[2]]);
            (q, r)
        };
        // Distinctness pre-filter on the start.
        {
            let (q, r) = assemble(&x0);
            if (&p - &q).norm() <= distinct
                || (&q - &r).norm() <= distinct
                || (&r - &p).norm() <= distinct
            {
                continue;
            }
        }
        let residual = |x: &DVector<T>| -> DVector<T> {
            let (q, r) = assemble(x);
            let orth = |at: &DVector<T>, u: &DVector<T>, v: &DVector<T>| {
                match gen.hessian(&ThetaCoords(at.clone())) {
                    Ok(h) => (h * (u - at)).dot(&(v - at)),
                    Err(_) => T::from_f64(f64::NAN).unwrap_or_else(T::one),
                }
            };
            DVector::from_column_slice(&[
                orth(&p, &q, &r),
                orth(&q, &r, &p),
                orth(&r, &p, &q),
            ])
        };
        let guard = |x: &DVector<T>| {
            let (q, r) = assemble(x);
            gen.check_theta(&ThetaCoords(q.clone())).is_ok()
                && gen.check_theta(&ThetaCoords(r.clone())).is_ok()
        };
        let sol = match newton_solve(
            &residual,
            None::<fn(&DVector<T>) -> DMatrix<T>>,
            &x0,
            &cfg,
            guard,
        ) {
            Ok(sol) => sol,
            Err(_) => {
                let r0 = residual(&x0);
                let m = r0.iter().fold(T::zero(), |m, v| m.max(v.abs()));
                if m.is_finite() && m < best {
                    best = m;
                }
                continue;
            }
        };
        let res = residual(&sol);
        let max_res = res.iter().fold(T::zero(), |m, v| m.max(v.abs()));
        let (q, r) = assemble(&sol);
        let pairwise_ok = (&p - &q).norm() > distinct
            && (&q - &r).norm() > distinct
            && (&r - &p).norm() > distinct;
        let boxed = in_box(&p, 0, 1) && in_box(&q, 0, 1) && in_box(&r, 0, 1);
        if max_res <= found_tol && pairwise_ok && boxed {
            let mk = |v: DVector<T>| Point::from_theta(gen, ThetaCoords(v));
            if let (Ok(p), Ok(q), Ok(r)) = (mk(p.clone()), mk(q), mk(r)) {
                return SearchOutcome::Found {
                    p,
                    q,
                    r,
                    max_residual: max_res,
                };
            }
        }
        // Converged but rejected (typically collapsed vertices): still the
        // best residual seen among genuinely distinct configurations, if any.
        if pairwise_ok && max_res < best {
            best = max_res;
        }
    }
    SearchOutcome::NotFound {
        best_residual: best,
        starts_used,
    }
}

/// The pair of flats whose intersection carries the points r closing both
/// Pythagorean identities at q simultaneously: an eta-chart flat with normal
/// theta_p - theta_q through eta_q, and a theta-chart flat with normal
/// eta_p - eta_q through theta_q.
pub fn dual_pythagoras_flats<T: Real>(
    gen: &Generator<T>,
    p: &Point<T>,
    q: &Point<T>,
) -> Result<(Flat<T>, Flat<T>)> {
    let _ = gen;
    let theta_pq = p.theta() - q.theta();
    let eta_pq = p.eta() - q.eta();
    let f_eta = Flat::new(Chart::Eta, theta_pq.clone(), theta_pq.dot(q.eta()))?;
    let f_theta = Flat::new(Chart::Theta, eta_pq.clone(), eta_pq.dot(q.theta()))?;
    Ok((f_eta, f_theta))
}

/// Closed-form solution of the simultaneous dual-Pythagoras point for the
/// 2D Itakura-Saito generator.
///
/// Substituting the theta-flat line into the eta-flat equation (with
/// eta = -1/theta componentwise) yields a quadratic whose two roots are q
/// itself and the sought r; the root distinct from q is returned.
pub fn solve_dual_pythagoras_is2d<T: Real>(p: &Point<T>, q: &Point<T>) -> Result<ThetaCoords<T>> {
    let gen = Generator::itakura_saito(2);
    assert_eq!(p.dim(), 2, "solve_dual_pythagoras_is2d requires dim 2");
    let theta_pq = p.theta() - q.theta();
    let eta_pq = p.eta() - q.eta();
    // Work with coordinate roles (u, v); swap when the v-component of eta_pq
    // is too small to divide by.
    let swap = eta_pq[1].abs() < real::<T>(1e-12) * (T::one() + eta_pq.norm());
    let (iu, iv) = if swap { (1, 0) } else { (0, 1) };
    if eta_pq[iv].abs() <= real(1e-300) {
        return Err(GeometryError::DegenerateVector);
    }
    let a = -eta_pq[iu] / eta_pq[iv];
    let b = eta_pq.dot(q.theta()) / eta_pq[iv];
    let d = theta_pq.dot(q.eta());
    let qa = -d * a;
    let qb = -theta_pq[iu] * a - theta_pq[iv] - b * d;
    let qc = -theta_pq[iu] * b;

    let candidates: Vec<T> = if qa.abs() < real(1e-14) {
        if qb.abs() < real(1e-14) {
            return Err(GeometryError::DegenerateQuadratic);
        }
        vec![-qc / qb]
    } else {
        let roots = solve_quadratic(qa, qb, qc);
        if roots.is_empty() {
            return Err(GeometryError::DegenerateQuadratic);
        }
        roots
    };

    let mut best: Option<(T, ThetaCoords<T>)> = None;
    for u in candidates {
        let v = a * u + b;
        let mut coords = DVector::zeros(2);
        coords[iu] = u;
        coords[iv] = v;
        let theta_r = ThetaCoords(coords);
        if gen.check_theta(&theta_r).is_err() {
            continue;
        }
        let dist = (&theta_r.0 - q.theta()).norm();
        if dist > real(1e-8) {
            match &best {
                Some((d0, _)) if *d0 >= dist => {}
                _ => best = Some((dist, theta_r)),
            }
        }
    }
    match best {
        Some((_, theta_r)) => Ok(theta_r),
        None => Err(GeometryError::BothRootsAtQ),
    }
}
