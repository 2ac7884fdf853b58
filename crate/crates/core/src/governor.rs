//! Reference governor for friction-feasible leg references.
//!
//! The governor keeps an applied reference `x_w` that chases the desired
//! reference `x_r` while the constraint vector `h(x_w)` stays non-negative:
//!
//! ```text
//! ẋ_w = v_r + v_t + v_n
//! v_r = α̂_r (x_r − x_w)
//! v_t = α̂_t Σ_k n_k n_kᵀ P (x_r − x_w)     n_k: P-orthonormal basis of null(C_r)
//! v_n = α̂_n r rᵀ P (x_r − x_w)             r: P-normalised gradient of the
//!                                           most violated constraint
//! ```
//!
//! `C_r` stacks the gradients (at `x_w`) of the constraints violated at
//! `x_r`. With `P = I` the bases reduce to plain orthonormal vectors.
//!
//! The law is integrated with explicit Euler at the control rate. Each step
//! is guarded: the attraction terms lose their component along any
//! currently satisfied constraint they would push negative (the sliding
//! motion the continuous law produces on the boundary), and the final step
//! is shortened if a satisfied row would still cross zero under
//! linearisation. For linear constraints the guard makes the iterate stay
//! feasible exactly.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::GovernorError;
use crate::geometry::Vec3;

pub const ACTIVE_TOL: f64 = 1e-4;
pub const RANK_TOL: f64 = 1e-8;
pub const FD_STEP: f64 = 1e-6;
const SCALE_SLACK: f64 = 1e-12;
/// Constraint tolerance used by the acceptance checks, constraint units.
pub const EPS_H: f64 = 1e-3;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GovernorGains {
    pub alpha_r: f64,
    pub alpha_t: f64,
    pub alpha_n: f64,
}

impl Default for GovernorGains {
    fn default() -> Self {
        Self { alpha_r: 20.0, alpha_t: 20.0, alpha_n: 10.0 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GovernorState {
    pub x_w: DVector<f64>,
    pub x_r: DVector<f64>,
    pub p: DMatrix<f64>,
    pub gains: GovernorGains,
}

impl GovernorState {
    pub fn new(x_w: DVector<f64>, x_r: DVector<f64>, p: DMatrix<f64>, gains: GovernorGains) -> Result<Self, GovernorError> {
        let n = x_w.len();
        if x_r.len() != n {
            return Err(GovernorError::DimensionMismatch { expected: n, got: x_r.len() });
        }
        if p.nrows() != n || p.ncols() != n {
            return Err(GovernorError::DimensionMismatch { expected: n, got: p.nrows() });
        }
        if (&p - p.transpose()).amax() > 1e-12 || p.clone().cholesky().is_none() {
            return Err(GovernorError::NotPositiveDefinite);
        }
        if !(gains.alpha_r > 0.0 && gains.alpha_t > 0.0 && gains.alpha_n > 0.0) {
            return Err(GovernorError::InvalidGain(format!("{gains:?}")));
        }
        Ok(Self { x_w, x_r, p, gains })
    }

    /// Identity-weighted governor starting at `x_w = x_r`.
    pub fn at_reference(x: DVector<f64>, gains: GovernorGains) -> Self {
        let n = x.len();
        Self { x_w: x.clone(), x_r: x, p: DMatrix::identity(n, n), gains }
    }

    pub fn dim(&self) -> usize {
        self.x_w.len()
    }
}

/// Constraint values at the applied and desired references plus the
/// gradients at the applied reference (one row per constraint).
#[derive(Clone, Debug, PartialEq)]
pub struct ConstraintEval {
    pub h_w: DVector<f64>,
    pub h_r: DVector<f64>,
    pub grad_w: DMatrix<f64>,
}

impl ConstraintEval {
    /// Evaluate `h` at both references, gradients by central differences.
    pub fn from_fn<F>(h: F, x_w: &DVector<f64>, x_r: &DVector<f64>, step: f64) -> Self
    where
        F: Fn(&DVector<f64>) -> DVector<f64>,
    {
        let h_w = h(x_w);
        let h_r = h(x_r);
        let n = x_w.len();
        let mut grad_w = DMatrix::zeros(h_w.len(), n);
        for j in 0..n {
            let mut xp = x_w.clone();
            let mut xm = x_w.clone();
            xp[j] += step;
            xm[j] -= step;
            let col = (h(&xp) - h(&xm)) / (2.0 * step);
            grad_w.set_column(j, &col);
        }
        Self { h_w, h_r, grad_w }
    }

    pub fn empty(n: usize) -> Self {
        Self { h_w: DVector::zeros(0), h_r: DVector::zeros(0), grad_w: DMatrix::zeros(0, n) }
    }

    pub fn min_w(&self) -> f64 {
        min_or_inf(&self.h_w)
    }

    pub fn min_r(&self) -> f64 {
        min_or_inf(&self.h_r)
    }

    pub fn n_violated(&self) -> usize {
        self.h_r.iter().filter(|&&h| h < 0.0).count()
    }
}

fn min_or_inf(v: &DVector<f64>) -> f64 {
    v.iter().copied().fold(f64::INFINITY, f64::min)
}

fn argmin(v: &DVector<f64>) -> Option<usize> {
    (0..v.len()).min_by(|&a, &b| v[a].total_cmp(&v[b]))
}

/// `V = (x_r − x_w)ᵀ P (x_r − x_w)`.
pub fn lyapunov_value(gov: &GovernorState) -> f64 {
    let e = &gov.x_r - &gov.x_w;
    e.dot(&(&gov.p * &e))
}

/// Switched gains `(α̂_r, α̂_t, α̂_n)` from the two minimum constraint
/// values, case by case as in the update law.
pub fn gain_schedule(min_hw: f64, min_hr: f64, g: &GovernorGains) -> (f64, f64, f64) {
    let ar = if min_hw >= 0.0 || min_hr >= 0.0 { g.alpha_r } else { 0.0 };
    let at = if min_hw >= 0.0 || min_hr < 0.0 { g.alpha_t } else { 0.0 };
    let an = if min_hw <= min_hr && min_hr < 0.0 {
        g.alpha_n
    } else if min_hr < min_hw && min_hw < 0.0 {
        -g.alpha_n
    } else {
        0.0
    };
    (ar, at, an)
}

/// P-orthonormal basis (columns) of `{d : C d = 0}`.
pub fn p_null_basis(rows: &DMatrix<f64>, p: &DMatrix<f64>) -> Result<DMatrix<f64>, GovernorError> {
    let n = p.nrows();
    let l = p.clone().cholesky().ok_or(GovernorError::NotPositiveDefinite)?.l();
    let l_inv_t = l.transpose().try_inverse().ok_or(GovernorError::NotPositiveDefinite)?;
    if rows.nrows() == 0 {
        return Ok(l_inv_t);
    }
    // C d = 0 with d = L⁻ᵀ y  ⇔  (C L⁻ᵀ) y = 0
    let a = rows * &l_inv_t;
    let ata = a.transpose() * &a;
    let eig = ata.symmetric_eigen();
    let lmax = eig.eigenvalues.iter().copied().fold(0.0, f64::max);
    let cutoff = (RANK_TOL * RANK_TOL) * lmax;
    let keep: Vec<usize> = (0..n).filter(|&k| lmax == 0.0 || eig.eigenvalues[k] <= cutoff).collect();
    let mut y = DMatrix::zeros(n, keep.len());
    for (c, &k) in keep.iter().enumerate() {
        y.set_column(c, &eig.eigenvectors.column(k));
    }
    Ok(l_inv_t * y)
}

/// `Σ_k α n_k n_kᵀ P e` for a given P-orthonormal basis.
pub fn tangent_velocity(basis: &DMatrix<f64>, p: &DMatrix<f64>, e: &DVector<f64>, alpha: f64) -> DVector<f64> {
    basis * (basis.transpose() * (p * e)) * alpha
}

fn select_rows(m: &DMatrix<f64>, rows: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(rows.len(), m.ncols(), |i, j| m[(rows[i], j)])
}

/// One governor step of length `dt`.
pub fn update(gov: &GovernorState, c: &ConstraintEval, dt: f64) -> Result<GovernorState, GovernorError> {
    let n = gov.dim();
    if gov.x_r.len() != n {
        return Err(GovernorError::DimensionMismatch { expected: n, got: gov.x_r.len() });
    }
    if c.grad_w.ncols() != n {
        return Err(GovernorError::DimensionMismatch { expected: n, got: c.grad_w.ncols() });
    }
    let m = c.h_w.len();
    if c.h_r.len() != m || c.grad_w.nrows() != m {
        return Err(GovernorError::DimensionMismatch { expected: m, got: c.h_r.len().min(c.grad_w.nrows()) });
    }
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(GovernorError::InvalidGain(format!("dt = {dt}")));
    }

    let p = &gov.p;
    let e = &gov.x_r - &gov.x_w;
    let pe = p * &e;
    // round-off below the boundary counts as on it
    let min_w = if c.min_w() > -SCALE_SLACK { c.min_w().max(0.0) } else { c.min_w() };
    let min_r = c.min_r();
    let (ar, at, an) = gain_schedule(min_w, min_r, &gov.gains);

    let violated: Vec<usize> = (0..m).filter(|&k| c.h_r[k] < 0.0).collect();
    let v_r = &e * ar;
    let v_t = if at != 0.0 {
        let basis = p_null_basis(&select_rows(&c.grad_w, &violated), p)?;
        tangent_velocity(&basis, p, &e, at)
    } else {
        DVector::zeros(n)
    };
    let v_n = if an != 0.0 {
        let k = if min_w < 0.0 { argmin(&c.h_w) } else { argmin(&c.h_r) };
        match k {
            Some(k) => {
                let g = c.grad_w.row(k).transpose();
                let pinv_g = p.clone().cholesky().ok_or(GovernorError::NotPositiveDefinite)?.solve(&g);
                let norm = g.dot(&pinv_g).sqrt();
                if norm > 0.0 {
                    let r = pinv_g / norm;
                    &r * (r.dot(&pe) * an)
                } else {
                    DVector::zeros(n)
                }
            }
            None => DVector::zeros(n),
        }
    } else {
        DVector::zeros(n)
    };

    // Guard every row against the attraction terms: a satisfied row may
    // fall to zero, a violated row may not fall further. Move freely up to
    // the first floor, slide along it for the rest of the step.
    let floor: Vec<f64> = c.h_w.iter().map(|&h| if h >= -SCALE_SLACK { 0.0 } else { h }).collect();
    let full = (v_r + v_t) * dt;
    let normal = v_n * dt;
    let mut d = &full + &normal;
    let mut reach: f64 = 1.0;
    let mut blocked: Vec<usize> = Vec::new();
    for _ in 0..=m {
        let crossing: Vec<usize> = (0..m)
            .filter(|&k| !blocked.contains(&k) && c.h_w[k] + c.grad_w.row(k).dot(&d.transpose()) < floor[k] - SCALE_SLACK)
            .collect();
        if crossing.is_empty() {
            break;
        }
        for &k in &crossing {
            let dec = c.grad_w.row(k).dot(&full.transpose());
            if dec < 0.0 {
                reach = reach.min((c.h_w[k] - floor[k]).max(0.0) / -dec);
            }
        }
        blocked.extend(crossing);
        let basis = p_null_basis(&select_rows(&c.grad_w, &blocked), p)?;
        let slide = &basis * (basis.transpose() * (p * &full));
        d = &full * reach + slide * (1.0 - reach) + &normal;
    }
    let mut scale: f64 = 1.0;
    for k in 0..m {
        let dec = c.grad_w.row(k).dot(&d.transpose());
        if c.h_w[k] + dec < floor[k] - SCALE_SLACK {
            scale = scale.min((c.h_w[k] - floor[k]).max(0.0) / -dec);
        }
    }
    let mut next = gov.clone();
    next.x_w = &gov.x_w + d * scale.max(0.0);
    Ok(next)
}

/// Snapshot of the leg servos used to predict contact forces.
///
/// The legs are position servos in foot space (body frame, relative to the
/// COM): `q̈ = k_p (x − q) + k_d (ẋ − q̇)`, where the reference velocity
/// `ẋ = ff_rate (x − prev_ref)` is the finite difference of successive
/// applied references (`ff_rate = 0` drops it). With stance feet pinned by friction,
/// the body accelerates opposite to the mean stance-foot acceleration, and
/// the ground must supply `m (a + g ẑ)`, shared equally by the stance feet.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FrictionContext {
    /// Body → inertial rotation.
    pub rotation: nalgebra::Matrix3<f64>,
    pub foot_pos: [Vec3; 4],
    pub foot_vel: [Vec3; 4],
    /// Reference applied on the previous tick.
    pub prev_ref: [Vec3; 4],
    /// `1/dt` of the reference finite difference, or 0.
    pub ff_rate: f64,
    pub stance: [bool; 4],
    pub mass: f64,
    pub gravity: f64,
    pub kp: f64,
    pub kd: f64,
    /// Pyramid coefficient (the dry friction coefficient).
    pub mu: f64,
    /// Amount subtracted from every row, N; tightens the pyramid.
    pub margin: f64,
}

impl FrictionContext {
    pub fn n_stance(&self) -> usize {
        self.stance.iter().filter(|&&s| s).count()
    }

    /// Commanded foot acceleration of leg `i` (body frame) for reference `x`.
    pub fn foot_accel(&self, x: &DVector<f64>, i: usize) -> Vec3 {
        let target = Vec3::new(x[3 * i], x[3 * i + 1], x[3 * i + 2]);
        let ff = (target - self.prev_ref[i]) * self.ff_rate;
        (target - self.foot_pos[i]) * self.kp + (ff - self.foot_vel[i]) * self.kd
    }

    /// Per-stance-foot ground force (inertial) required by reference `x`.
    pub fn required_forces(&self, x: &DVector<f64>) -> Vec<Vec3> {
        let n = self.n_stance();
        if n == 0 {
            return Vec::new();
        }
        let mean: Vec3 = (0..4).filter(|&i| self.stance[i]).map(|i| self.foot_accel(x, i)).sum::<Vec3>() / n as f64;
        let body_accel = -(self.rotation * mean);
        let total = (body_accel + Vec3::new(0.0, 0.0, self.gravity)) * self.mass;
        vec![total / n as f64; n]
    }

    /// Pyramid rows `[μ f_z − |f_x|, μ f_z − |f_y|, f_z]` per stance foot.
    pub fn constraints(&self, x: &DVector<f64>) -> DVector<f64> {
        let f = self.required_forces(x);
        DVector::from_iterator(
            3 * f.len(),
            f.iter().flat_map(|f| [self.mu * f.z - f.x.abs(), self.mu * f.z - f.y.abs(), f.z].map(|h| h - self.margin)),
        )
    }
}

/// Friction-pyramid constraints at both references, gradients by central
/// differences.
pub fn friction_constraints(ctx: &FrictionContext, x_w: &DVector<f64>, x_r: &DVector<f64>) -> ConstraintEval {
    if ctx.n_stance() == 0 {
        return ConstraintEval::empty(x_w.len());
    }
    ConstraintEval::from_fn(|x| ctx.constraints(x), x_w, x_r, FD_STEP)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn linear_eval(a: &DVector<f64>, b: f64, gov: &GovernorState) -> ConstraintEval {
        let h = |x: &DVector<f64>| DVector::from_element(1, a.dot(x) - b);
        ConstraintEval::from_fn(h, &gov.x_w, &gov.x_r, FD_STEP)
    }

    #[test]
    fn gains_follow_case_table() {
        let g = GovernorGains::default();
        assert_eq!(gain_schedule(0.5, 0.2, &g), (20.0, 20.0, 0.0));
        assert_eq!(gain_schedule(0.5, -0.2, &g), (20.0, 20.0, 0.0));
        assert_eq!(gain_schedule(-0.1, -0.5, &g), (0.0, 20.0, -10.0));
        assert_eq!(gain_schedule(-0.5, -0.1, &g), (0.0, 20.0, 10.0));
        assert_eq!(gain_schedule(-0.5, 0.1, &g), (20.0, 0.0, 0.0));
    }

    #[test]
    fn feasible_everywhere_is_pure_attraction() {
        let x_w = DVector::from_vec(vec![0.0, 0.0]);
        let x_r = DVector::from_vec(vec![1.0, 2.0]);
        let gov = GovernorState::new(x_w, x_r.clone(), DMatrix::identity(2, 2), GovernorGains::default()).unwrap();
        let c = linear_eval(&DVector::from_vec(vec![1.0, 0.0]), -10.0, &gov);
        let next = update(&gov, &c, 1e-3).unwrap();
        let step = &next.x_w - &gov.x_w;
        let e = &x_r - &gov.x_w;
        assert!((step.normalize() - e.normalize()).norm() < 1e-9);
    }

    #[test]
    fn reference_is_a_fixed_point() {
        let x = DVector::from_vec(vec![0.3, -0.2, 0.1]);
        let gov = GovernorState::at_reference(x.clone(), GovernorGains::default());
        let c = ConstraintEval::from_fn(|x| DVector::from_vec(vec![1.0 - x.norm()]), &gov.x_w, &gov.x_r, FD_STEP);
        assert_eq!(update(&gov, &c, 1e-3).unwrap().x_w, x);
    }

    #[test]
    fn lyapunov_examples() {
        let gov = GovernorState::new(
            DVector::from_vec(vec![0.0, 0.0]),
            DVector::from_vec(vec![3.0, 4.0]),
            DMatrix::identity(2, 2),
            GovernorGains::default(),
        )
        .unwrap();
        assert_eq!(lyapunov_value(&gov), 25.0);
        let same = GovernorState::at_reference(DVector::from_vec(vec![1.0, 2.0]), GovernorGains::default());
        assert_eq!(lyapunov_value(&same), 0.0);
    }

    #[test]
    fn lyapunov_decreases_when_unconstrained() {
        let mut gov = GovernorState::new(
            DVector::from_vec(vec![0.0, 0.0]),
            DVector::from_vec(vec![1.0, -2.0]),
            DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 3.0])),
            GovernorGains::default(),
        )
        .unwrap();
        let mut v = lyapunov_value(&gov);
        for _ in 0..1000 {
            gov = update(&gov, &ConstraintEval::empty(2), 1e-3).unwrap();
            let nv = lyapunov_value(&gov);
            assert!(nv <= v);
            v = nv;
        }
        assert!(v < 1e-10);
    }

    fn toy_projection(p: DMatrix<f64>) -> (DVector<f64>, DVector<f64>, f64) {
        let a = DVector::from_vec(vec![1.0, 1.0]);
        let b = 1.0;
        let x_r = DVector::from_vec(vec![0.2, -0.6]);
        let mut gov = GovernorState::new(DVector::from_vec(vec![1.0, 1.0]), x_r.clone(), p.clone(), GovernorGains::default()).unwrap();
        let mut worst = f64::INFINITY;
        for _ in 0..5000 {
            let c = linear_eval(&a, b, &gov);
            gov = update(&gov, &c, 1e-3).unwrap();
            worst = worst.min(a.dot(&gov.x_w) - b);
        }
        // closed-form P-metric projection onto aᵀx = b
        let pinv_a = p.clone().try_inverse().unwrap() * &a;
        let x_star = &x_r + &pinv_a * ((b - a.dot(&x_r)) / a.dot(&pinv_a));
        (gov.x_w, x_star, worst)
    }

    #[test]
    fn converges_to_projection_identity_weight() {
        let (x, x_star, worst) = toy_projection(DMatrix::identity(2, 2));
        assert!((x - x_star).norm() < 1e-3);
        assert!(worst >= -EPS_H);
    }

    #[test]
    fn converges_to_projection_weighted_metric() {
        let p = DMatrix::from_row_slice(2, 2, &[2.0, 0.5, 0.5, 1.0]);
        let (x, x_star, worst) = toy_projection(p);
        assert!((&x - &x_star).norm() < 1e-3, "{x} vs {x_star}");
        assert!(worst >= -EPS_H);
    }

    #[test]
    fn active_step_is_tangent_to_violated_gradients() {
        let a = DVector::from_vec(vec![1.0, 2.0, -1.0]);
        let x_w = DVector::from_vec(vec![1.0, 0.0, 0.0]); // aᵀx_w = 1 = b
        let x_r = DVector::from_vec(vec![-1.0, 0.5, 2.0]);
        let p = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 2.0, 0.5]));
        let gov = GovernorState::new(x_w, x_r, p, GovernorGains::default()).unwrap();
        let c = linear_eval(&a, 1.0, &gov);
        assert!(c.h_w[0].abs() < ACTIVE_TOL && c.h_r[0] < 0.0);
        let step = update(&gov, &c, 1e-3).unwrap().x_w - &gov.x_w;
        assert!(step.norm() > 0.0);
        assert!(a.dot(&step).abs() < 1e-6 * step.norm() * a.norm());
    }

    fn gram_schmidt_p(vectors: &[DVector<f64>], p: &DMatrix<f64>) -> DMatrix<f64> {
        let mut out: Vec<DVector<f64>> = Vec::new();
        for v in vectors {
            let mut w = v.clone();
            for u in &out {
                w -= u * u.dot(&(p * v));
            }
            let norm = w.dot(&(p * &w)).sqrt();
            if norm > 1e-9 {
                out.push(w / norm);
            }
        }
        DMatrix::from_columns(&out)
    }

    #[test]
    fn tangent_term_is_basis_invariant() {
        let c = DMatrix::from_row_slice(1, 3, &[1.0, -2.0, 0.5]);
        let p = DMatrix::from_row_slice(3, 3, &[2.0, 0.3, 0.0, 0.3, 1.0, 0.1, 0.0, 0.1, 1.5]);
        let e = DVector::from_vec(vec![0.7, -0.1, 0.4]);
        // two null-space spanning sets, orthogonalised in different orders
        let n1 = DVector::from_vec(vec![2.0, 1.0, 0.0]);
        let n2 = DVector::from_vec(vec![0.0, 0.25, 1.0]);
        let b1 = gram_schmidt_p(&[n1.clone(), n2.clone()], &p);
        let b2 = gram_schmidt_p(&[n2 + &n1 * 0.3, n1], &p);
        let t1 = tangent_velocity(&b1, &p, &e, 20.0);
        let t2 = tangent_velocity(&b2, &p, &e, 20.0);
        let t3 = tangent_velocity(&p_null_basis(&c, &p).unwrap(), &p, &e, 20.0);
        assert!((&t1 - &t2).norm() < 1e-12);
        assert!((&t1 - &t3).norm() < 1e-10);
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let gov = GovernorState::at_reference(DVector::zeros(3), GovernorGains::default());
        assert!(matches!(update(&gov, &ConstraintEval::empty(2), 1e-3), Err(GovernorError::DimensionMismatch { .. })));
        assert!(GovernorState::new(DVector::zeros(2), DVector::zeros(3), DMatrix::identity(2, 2), GovernorGains::default()).is_err());
    }

    fn stance_ctx() -> FrictionContext {
        let hip = [Vec3::new(0.15, 0.1, 0.0), Vec3::new(0.15, -0.1, 0.0), Vec3::new(-0.15, 0.1, 0.0), Vec3::new(-0.15, -0.1, 0.0)];
        FrictionContext {
            rotation: nalgebra::Matrix3::identity(),
            foot_pos: hip.map(|h| h + Vec3::new(0.0, 0.0, -0.25)),
            foot_vel: [Vec3::zeros(); 4],
            prev_ref: hip.map(|h| h + Vec3::new(0.0, 0.0, -0.25)),
            ff_rate: 0.0,
            stance: [true; 4],
            mass: 5.0,
            gravity: 9.81,
            kp: 400.0,
            kd: 40.0,
            mu: 0.6,
            margin: 0.0,
        }
    }

    fn nominal(ctx: &FrictionContext) -> DVector<f64> {
        DVector::from_iterator(12, ctx.foot_pos.iter().flat_map(|p| [p.x, p.y, p.z]))
    }

    #[test]
    fn static_stance_is_strictly_feasible() {
        let ctx = stance_ctx();
        let x = nominal(&ctx);
        let c = friction_constraints(&ctx, &x, &x);
        assert_eq!(c.h_w.len(), 12);
        assert!(c.h_w.iter().all(|&h| h > 0.0));
    }

    #[test]
    fn aggressive_lateral_command_violates_pyramid() {
        // commanded foot acceleration k_p·0.05 = 20 m/s² sideways ⇒ required
        // |f_y| = m·20/4 = 25 N > μ f_z = 0.6·12.26 N
        let ctx = stance_ctx();
        let mut x = nominal(&ctx);
        for i in 0..4 {
            x[3 * i + 1] -= 0.05;
        }
        let c = friction_constraints(&ctx, &x, &x);
        let f = ctx.required_forces(&x)[0];
        assert!((f.y - 25.0).abs() < 1e-9);
        assert!(c.h_r[1] < 0.0 && (c.h_r[1] - (0.6 * f.z - 25.0)).abs() < 1e-9);
    }

    #[test]
    fn airborne_has_no_rows() {
        let mut ctx = stance_ctx();
        ctx.stance = [false; 4];
        let x = nominal(&ctx);
        assert_eq!(friction_constraints(&ctx, &x, &x).h_w.len(), 0);
    }

    proptest! {
        #[test]
        fn linear_toy_stays_feasible(ax in -2.0..2.0f64, ay in 0.2..2.0f64, rx in -3.0..3.0f64, ry in -3.0..-1.0f64) {
            let a = DVector::from_vec(vec![ax, ay]);
            let b = -0.5;
            let mut gov = GovernorState::new(DVector::zeros(2), DVector::from_vec(vec![rx, ry]), DMatrix::identity(2, 2), GovernorGains::default()).unwrap();
            for _ in 0..300 {
                let c = linear_eval(&a, b, &gov);
                gov = update(&gov, &c, 1e-3).unwrap();
                prop_assert!(a.dot(&gov.x_w) - b >= -EPS_H);
            }
        }
    }
}
