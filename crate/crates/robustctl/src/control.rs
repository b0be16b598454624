//! Runtime control laws: PID, full-state feedback with sliding targets,
//! motorcycle line guidance, adaptive gains, windowed least-squares
//! identification and barrier-function safety filters.

use std::f64::consts::PI;

use crate::models::{sinc, sip_partial_model};
use crate::numerics::{least_squares, mat, qp_small, vector, Complex, Mat, Vector};
use crate::synthesis::{design_gain_matrix, GainMatrix};
use crate::{Error, Result};

/// Discrete PID with rectangle-rule integration and a backward-difference
/// derivative.
#[derive(Debug, Clone, PartialEq)]
pub struct PidController {
    pub p: f64,
    pub i: f64,
    pub d: f64,
    pub dt: f64,
    pub integral: f64,
    pub prev_error: Option<f64>,
}

impl PidController {
    pub fn new(p: f64, i: f64, d: f64, dt: f64) -> Result<Self> {
        if !(dt > 0.0) {
            return Err(Error::Domain("PID needs dt > 0".into()));
        }
        Ok(PidController { p, i, d, dt, integral: 0.0, prev_error: None })
    }

    /// `P·e + I·(Σe·dt) + D·(e − e_prev)/dt`; the first call has no
    /// derivative kick.
    pub fn step(&mut self, e: f64) -> f64 {
        self.integral += e * self.dt;
        let prev = self.prev_error.unwrap_or(e);
        self.prev_error = Some(e);
        self.p * e + self.i * self.integral + self.d * (e - prev) / self.dt
    }
}

/// `−kᵀ(x − x_E)`.
pub fn fsfc(k: &Vector, x: &Vector, x_e: &Vector) -> Result<f64> {
    if k.len() != x.len() || x.len() != x_e.len() {
        return Err(Error::Dimension(format!(
            "fsfc lengths: gain {}, state {}, target {}",
            k.len(),
            x.len(),
            x_e.len()
        )));
    }
    Ok(-k.dot(&(x - x_e)))
}

/// Moves `v` toward zero by `step` without crossing it.
pub fn shrink_toward_zero(v: f64, step: f64) -> f64 {
    if v > 0.0 {
        (v - step).max(0.0)
    } else {
        (v + step).min(0.0)
    }
}

/// Sliding target for the double inverted pendulum: the cart set-point
/// slides from `x0` to the origin at `s_v` metres per second.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlidingTargetDIP {
    pub x0: f64,
    pub s_v: f64,
}

impl SlidingTargetDIP {
    pub fn new(x0: f64, s_v: f64) -> Result<Self> {
        if !(s_v > 0.0) {
            return Err(Error::Domain("slide rate must be positive".into()));
        }
        Ok(SlidingTargetDIP { x0, s_v })
    }
}

/// `(0, 0, 0, 0, sign(x0)·max(|x0| − s_v·t, 0), 0)`.
pub fn dip_sliding_target(tgt: &SlidingTargetDIP, t: f64) -> Vector {
    let pos = tgt.x0.signum() * (tgt.x0.abs() - tgt.s_v * t).max(0.0);
    let mut v = Vector::zeros(6);
    v[4] = if tgt.x0 == 0.0 { 0.0 } else { pos };
    v
}

/// A line in the plane through `(x, y)` with heading `phi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pose {
    pub x: f64,
    pub y: f64,
    pub phi: f64,
}

/// Two-line guidance: follow the line through `pose_i` until within
/// `preview` of the turning point where it meets the line through `pose_d`,
/// then follow the second line.
#[derive(Debug, Clone, PartialEq)]
pub struct MotorcycleGuidance {
    pub pose_i: Pose,
    pub pose_d: Pose,
    pub turning_point: (f64, f64),
    pub preview: f64,
    pub active_line: u8,
}

impl MotorcycleGuidance {
    pub fn new(pose_i: Pose, pose_d: Pose, preview: f64) -> Result<Self> {
        if !(preview > 0.0) {
            return Err(Error::Domain("preview distance must be positive".into()));
        }
        let m = mat(&[
            &[pose_i.phi.cos(), -pose_d.phi.cos()],
            &[pose_i.phi.sin(), -pose_d.phi.sin()],
        ]);
        let det = m.determinant();
        if det.abs() < 1e-12 {
            return Err(Error::Singular("guidance lines are parallel".into()));
        }
        let rhs = vector(&[pose_d.x - pose_i.x, pose_d.y - pose_i.y]);
        let t = m.lu().solve(&rhs).ok_or_else(|| Error::Singular("guidance lines are parallel".into()))?;
        let turning_point = (pose_i.x + pose_i.phi.cos() * t[0], pose_i.y + pose_i.phi.sin() * t[0]);
        Ok(MotorcycleGuidance { pose_i, pose_d, turning_point, preview, active_line: 1 })
    }

    pub fn active_pose(&self) -> Pose {
        if self.active_line == 1 {
            self.pose_i
        } else {
            self.pose_d
        }
    }

    /// Steering command `β = −Kᵀ[ȳ, φ − φ_S, θ, θ̇]` where `ȳ` is the signed
    /// lateral offset from the active line.
    pub fn step(&mut self, pose: Pose, roll: f64, roll_rate: f64, k: &Vector) -> Result<f64> {
        if k.len() != 4 {
            return Err(Error::Dimension("motorcycle gain needs 4 entries".into()));
        }
        let (xm, ym) = self.turning_point;
        if self.active_line == 1 && ((pose.x - xm).powi(2) + (pose.y - ym).powi(2)).sqrt() < self.preview {
            self.active_line = 2;
        }
        let s = self.active_pose();
        let lateral = -s.phi.sin() * (pose.x - s.x) + s.phi.cos() * (pose.y - s.y);
        let z = vector(&[lateral, pose.phi - s.phi, roll, roll_rate]);
        Ok(-k.dot(&z))
    }
}

pub fn motorcycle_guidance_step(
    g: &mut MotorcycleGuidance,
    pose: Pose,
    roll: f64,
    roll_rate: f64,
    k: &Vector,
) -> Result<f64> {
    g.step(pose, roll, roll_rate, k)
}

/// Partial-state pendulum model coefficients at `theta` with the small-angle
/// guard of the online adaptive law.
pub fn guarded_partial_model(theta: f64, l: f64, g: f64) -> (Mat, Mat) {
    let a21 = if theta.abs() < 0.1 { g / l } else { g / l * theta.sin() / theta };
    sip_partial_model(a21, -theta.cos() / l)
}

/// Per-period adaptive gain: pole placement on the model re-evaluated at the
/// current angle.
pub fn adaptive_gain_per_period(theta: f64, poles: &[Complex<f64>], l: f64, g: f64) -> Result<GainMatrix> {
    let (a, b) = guarded_partial_model(theta, l, g);
    design_gain_matrix(&a, &b, poles)
}

/// Gains precomputed at `θ = 0`, `π/4` and `θ_max` for the three angle bands
/// `|θ| < π/6`, `π/6 ≤ |θ| < π/3` and the rest.
#[derive(Debug, Clone, PartialEq)]
pub struct GainLookup {
    pub gains: [GainMatrix; 3],
    pub anchors: [f64; 3],
}

impl GainLookup {
    pub fn new(poles: &[Complex<f64>], theta_max: f64, l: f64, g: f64) -> Result<Self> {
        let anchors = [0.0, PI / 4.0, theta_max];
        let design = |th: f64| {
            let (a, b) = sip_partial_model(g / l * sinc(th), -th.cos() / l);
            design_gain_matrix(&a, &b, poles)
        };
        Ok(GainLookup { gains: [design(anchors[0])?, design(anchors[1])?, design(anchors[2])?], anchors })
    }

    pub fn band(theta: f64) -> usize {
        if theta.abs() < PI / 6.0 {
            0
        } else if theta.abs() < PI / 3.0 {
            1
        } else {
            2
        }
    }

    pub fn select(&self, theta: f64) -> &GainMatrix {
        &self.gains[Self::band(theta)]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum AdaptiveMode<'a> {
    PerPeriod,
    Lookup(&'a GainLookup),
}

pub fn adaptive_gain(theta: f64, mode: &AdaptiveMode<'_>, poles: &[Complex<f64>], l: f64, g: f64) -> Result<GainMatrix> {
    match mode {
        AdaptiveMode::PerPeriod => adaptive_gain_per_period(theta, poles, l, g),
        AdaptiveMode::Lookup(table) => Ok(table.select(theta).clone()),
    }
}

/// Sliding window of regression rows for online identification.
#[derive(Debug, Clone, PartialEq)]
pub struct SysIdWindow {
    capacity: usize,
    rows: Vec<(Vector, f64)>,
}

impl SysIdWindow {
    /// A window of `capacity` rows (the listing's `kSI + 1`).
    pub fn new(capacity: usize) -> Result<Self> {
        if capacity == 0 {
            return Err(Error::Domain("identification window needs capacity >= 1".into()));
        }
        Ok(SysIdWindow { capacity, rows: Vec::with_capacity(capacity) })
    }

    /// Inserts the newest row, evicting the oldest once full.
    pub fn push(&mut self, regressor: Vector, response: f64) {
        if self.rows.len() == self.capacity {
            self.rows.pop();
        }
        self.rows.insert(0, (regressor, response));
    }

    pub fn warm(&self) -> bool {
        self.rows.len() == self.capacity
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Rows newest first.
    pub fn rows(&self) -> &[(Vector, f64)] {
        &self.rows
    }
}

/// Least-squares parameters of the stacked window. Errors with
/// [`Error::Rank`] when the regressors do not identify every parameter.
pub fn sysid_solve(w: &SysIdWindow) -> Result<Vector> {
    if !w.warm() {
        return Err(Error::Domain("identification window is not full yet".into()));
    }
    let p = w.rows[0].0.len();
    let design = Mat::from_fn(w.rows.len(), p, |i, j| w.rows[i].0[j]);
    let target = Vector::from_iterator(w.rows.len(), w.rows.iter().map(|r| r.1));
    least_squares(&design, &target)
}

/// Barrier function `h` with gradient and the linear class-K gain `α(h) = c·h`.
pub struct BarrierSpec {
    pub h: Box<dyn Fn(&Vector) -> f64 + Send + Sync>,
    pub grad_h: Box<dyn Fn(&Vector) -> Vector + Send + Sync>,
    pub alpha_gain: f64,
}

impl BarrierSpec {
    /// Keeps a planar point outside the disk of radius `r` at `(cx, cy)`:
    /// `h = ((x−cx)² + (y−cy)² − r²)/2`.
    pub fn outside_disk(cx: f64, cy: f64, r: f64, alpha_gain: f64) -> Self {
        BarrierSpec {
            h: Box::new(move |s| ((s[0] - cx).powi(2) + (s[1] - cy).powi(2) - r * r) / 2.0),
            grad_h: Box::new(move |s| vector(&[s[0] - cx, s[1] - cy])),
            alpha_gain,
        }
    }

    /// Pendulum angle/rate envelope `h = (25(θ_B² − θ²) + (θ̇_B² − θ̇²))/2`.
    pub fn pendulum_envelope(theta_b: f64, rate_b: f64, alpha_gain: f64) -> Self {
        BarrierSpec {
            h: Box::new(move |s| (25.0 * (theta_b * theta_b - s[0] * s[0]) + (rate_b * rate_b - s[1] * s[1])) / 2.0),
            grad_h: Box::new(|s| vector(&[-25.0 * s[0], -s[1], 0.0, 0.0])),
            alpha_gain,
        }
    }

    pub fn alpha(&self, h: f64) -> f64 {
        self.alpha_gain * h
    }

    /// `(L_f h, L_g h)` for the control-affine field `f + g·u`.
    pub fn lie(&self, x: &Vector, f: &Vector, g: &Vector) -> (f64, f64) {
        let grad = (self.grad_h)(x);
        (grad.dot(f), grad.dot(g))
    }
}

/// Control Lyapunov function with the linear gain `γ(V) = c·V`.
pub struct ClfSpec {
    pub v: Box<dyn Fn(&Vector) -> f64 + Send + Sync>,
    pub grad_v: Box<dyn Fn(&Vector) -> Vector + Send + Sync>,
    pub gamma_gain: f64,
}

impl ClfSpec {
    /// `V = xᵀx/2`.
    pub fn quadratic(gamma_gain: f64) -> Self {
        ClfSpec {
            v: Box::new(|s| s.dot(s) / 2.0),
            grad_v: Box::new(|s| s.clone()),
            gamma_gain,
        }
    }

    pub fn gamma(&self, v: f64) -> f64 {
        self.gamma_gain * v
    }
}

/// Lie derivatives below this magnitude are treated as singular.
pub const LIE_GUARD: f64 = 1e-4;

/// Closed form of `min |u − u_ref|` s.t. `L_f h + L_g h·u ≥ −α(h)`.
pub fn cbf_filter_scalar(u_ref: f64, lfh: f64, lgh: f64, alpha_h: f64) -> f64 {
    if lgh > LIE_GUARD {
        u_ref.max(-(lfh + alpha_h) / lgh)
    } else if lgh < -LIE_GUARD {
        u_ref.min(-(lfh + alpha_h) / lgh)
    } else {
        u_ref
    }
}

/// Inputs of one relaxed CLF-CBF program.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClfCbfTerms {
    pub u_ref: f64,
    pub lfv: f64,
    pub lgv: f64,
    pub gamma_v: f64,
    pub lfh: f64,
    pub lgh: f64,
    pub alpha_h: f64,
}

/// Solves
/// `min ½H(u − û)² + ½λδ²` s.t. `L_fV + L_gV·u ≤ −γ(V) + δ`,
/// `L_fh + L_gh·u ≥ −α(h)` in the variables `(u, δ)`.
///
/// `guard_active` reproduces the listing's singularity guard: when set, the
/// reference is returned untouched with `δ = 0`.
pub fn clf_cbf_step(t: &ClfCbfTerms, lambda: f64, h: f64, guard_active: bool) -> Result<(f64, f64)> {
    if !(lambda > 0.0 && h > 0.0) {
        return Err(Error::Domain("CLF-CBF weights must be positive".into()));
    }
    if guard_active {
        return Ok((t.u_ref, 0.0));
    }
    let hm = Mat::from_diagonal(&vector(&[h, lambda]));
    let c = vector(&[-h * t.u_ref, 0.0]);
    let a = mat(&[&[t.lgv, -1.0], &[-t.lgh, 0.0]]);
    let b = vector(&[-t.lfv - t.gamma_v, t.lfh + t.alpha_h]);
    let z = qp_small(&hm, &c, &a, &b)?;
    Ok((z[0], z[1]))
}

/// Reference law `u = −x²·sin(y)/y − 2y` for the planar point, with the
/// small-`y` branch `−x² − 2y`.
pub fn lyapunov_ref_2d(x: f64, y: f64) -> f64 {
    if y.abs() > LIE_GUARD {
        -x * x * y.sin() / y - 2.0 * y
    } else {
        -x * x - 2.0 * y
    }
}
