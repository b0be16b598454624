//! Nonlinear plants, explicit Euler integration and linearization.

use nalgebra::{Complex, ComplexField};

use crate::numerics::{Mat, Vector};
use crate::{Error, Result};

/// A named nonlinear vector field `ẋ = f(x, u)`.
pub trait Plant: Send + Sync {
    fn name(&self) -> &str;
    fn state_dim(&self) -> usize;
    fn input_dim(&self) -> usize;
    fn deriv(&self, x: &Vector, u: &Vector) -> Vector;

    /// Exact Jacobians `(∂f/∂x, ∂f/∂u)` when the plant provides them.
    fn jacobian(&self, _x: &Vector, _u: &Vector) -> Option<(Mat, Mat)> {
        None
    }

    fn params(&self) -> Vec<Param> {
        Vec::new()
    }
}

/// A physical parameter with its unit.
#[derive(Debug, Clone, PartialEq)]
pub struct Param {
    pub name: &'static str,
    pub value: f64,
    pub unit: &'static str,
}

fn param(name: &'static str, value: f64, unit: &'static str) -> Param {
    Param { name, value, unit }
}

/// Single inverted pendulum on a cart driven by cart acceleration.
/// State `(θ, θ̇, x, ẋ)`, input `a`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sip {
    pub l: f64,
    pub g: f64,
}

impl Default for Sip {
    fn default() -> Self {
        Sip { l: 1.0, g: 10.0 }
    }
}

impl Plant for Sip {
    fn name(&self) -> &str {
        "single inverted pendulum"
    }
    fn state_dim(&self) -> usize {
        4
    }
    fn input_dim(&self) -> usize {
        1
    }
    fn deriv(&self, x: &Vector, u: &Vector) -> Vector {
        let (th, dth, dx, a) = (x[0], x[1], x[3], u[0]);
        Vector::from_vec(vec![
            dth,
            th.sin() / self.l * self.g - th.cos() / self.l * a,
            dx,
            a,
        ])
    }
    fn jacobian(&self, x: &Vector, u: &Vector) -> Option<(Mat, Mat)> {
        let (th, a) = (x[0], u[0]);
        let mut am = Mat::zeros(4, 4);
        am[(0, 1)] = 1.0;
        am[(1, 0)] = (self.g * th.cos() + a * th.sin()) / self.l;
        am[(2, 3)] = 1.0;
        let bm = Mat::from_column_slice(4, 1, &[0.0, -th.cos() / self.l, 0.0, 1.0]);
        Some((am, bm))
    }
    fn params(&self) -> Vec<Param> {
        vec![param("L", self.l, "m"), param("g", self.g, "m/s^2")]
    }
}

/// `sinθ/θ`, continuous at zero.
pub fn sinc(theta: f64) -> f64 {
    if theta.abs() < 1e-8 {
        1.0 - theta * theta / 6.0
    } else {
        theta.sin() / theta
    }
}

/// The state-dependent factorization `f(x, a) = A(x)·x + B(x)·a` of the
/// single inverted pendulum, evaluated at angle `theta`.
///
/// For `|θ| < 0.1` the coefficient `A₂₁` falls back to the small-angle value
/// `g/L`, the same guard the online adaptive controller uses, so the
/// factorization is exact only outside that band.
pub fn sip_factored_model(theta: f64, l: f64, g: f64) -> (Mat, Mat) {
    let a21 = if theta.abs() < 0.1 { g / l } else { g / l * sinc(theta) };
    let mut a = Mat::zeros(4, 4);
    a[(0, 1)] = 1.0;
    a[(1, 0)] = a21;
    a[(2, 3)] = 1.0;
    let b = Mat::from_column_slice(4, 1, &[0.0, -theta.cos() / l, 0.0, 1.0]);
    (a, b)
}

/// Partial-state model on `(θ, θ̇, ẋ)` with given coefficients
/// `A₂₁ = a21` and `B₂ = b2`.
pub fn sip_partial_model(a21: f64, b2: f64) -> (Mat, Mat) {
    let mut a = Mat::zeros(3, 3);
    a[(0, 1)] = 1.0;
    a[(1, 0)] = a21;
    let b = Mat::from_column_slice(3, 1, &[0.0, b2, 1.0]);
    (a, b)
}

/// Partial-state model at angle `theta` without the small-angle guard.
pub fn sip_partial_at(theta: f64, l: f64, g: f64) -> (Mat, Mat) {
    sip_partial_model(g / l * sinc(theta), -theta.cos() / l)
}

/// Double inverted pendulum: point masses `m1`, `m2` on massless links `l1`,
/// `l2` stacked on a cart whose acceleration is the input. Angles are absolute
/// and measured from the upward vertical.
///
/// State `(θ₁, θ̇₁, θ₂, θ̇₂, x, ẋ)`, input `a`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dip {
    pub m1: f64,
    pub m2: f64,
    pub l1: f64,
    pub l2: f64,
    pub g: f64,
}

impl Default for Dip {
    fn default() -> Self {
        Dip { m1: 1.0, m2: 1.0, l1: 1.0, l2: 1.0, g: 10.0 }
    }
}

impl Dip {
    /// Angular accelerations from the Euler–Lagrange equations
    ///
    /// ```text
    /// (m1+m2)L1·θ̈1 + m2L2·cos(θ1−θ2)·θ̈2 = (m1+m2)(g sinθ1 − a cosθ1) − m2L2·sin(θ1−θ2)·θ̇2²
    /// m2L1·cos(θ1−θ2)·θ̈1 + m2L2·θ̈2     = m2(g sinθ2 − a cosθ2)     + m2L1·sin(θ1−θ2)·θ̇1²
    /// ```
    ///
    /// Generic over the scalar so the same code serves complex-step
    /// differentiation.
    fn accelerations<T: ComplexField<RealField = f64> + Copy>(&self, th1: T, dth1: T, th2: T, dth2: T, a: T) -> (T, T) {
        let c = |v: f64| T::from_real(v);
        let (m1, m2, l1, l2, g) = (c(self.m1), c(self.m2), c(self.l1), c(self.l2), c(self.g));
        let c12 = (th1 - th2).cos();
        let s12 = (th1 - th2).sin();
        let m11 = (m1 + m2) * l1;
        let m12 = m2 * l2 * c12;
        let m21 = m2 * l1 * c12;
        let m22 = m2 * l2;
        let r1 = (m1 + m2) * (g * th1.sin() - a * th1.cos()) - m2 * l2 * s12 * dth2 * dth2;
        let r2 = m2 * (g * th2.sin() - a * th2.cos()) + m2 * l1 * s12 * dth1 * dth1;
        let det = m11 * m22 - m12 * m21;
        ((r1 * m22 - m12 * r2) / det, (m11 * r2 - m21 * r1) / det)
    }

    fn deriv_generic<T: ComplexField<RealField = f64> + Copy>(&self, x: &[T; 6], a: T) -> [T; 6] {
        let (dd1, dd2) = self.accelerations(x[0], x[1], x[2], x[3], a);
        [x[1], dd1, x[3], dd2, x[5], a]
    }
}

impl Plant for Dip {
    fn name(&self) -> &str {
        "double inverted pendulum"
    }
    fn state_dim(&self) -> usize {
        6
    }
    fn input_dim(&self) -> usize {
        1
    }
    fn deriv(&self, x: &Vector, u: &Vector) -> Vector {
        let s = [x[0], x[1], x[2], x[3], x[4], x[5]];
        Vector::from_row_slice(&self.deriv_generic(&s, u[0]))
    }
    fn jacobian(&self, x: &Vector, u: &Vector) -> Option<(Mat, Mat)> {
        let s: [f64; 6] = [x[0], x[1], x[2], x[3], x[4], x[5]];
        Some(complex_step_jacobian(6, 1, |xs, us| self.deriv_generic(&xs.try_into().unwrap(), us[0]).to_vec(), &s, &[u[0]]))
    }
    fn params(&self) -> Vec<Param> {
        vec![
            param("m1", self.m1, "kg"),
            param("m2", self.m2, "kg"),
            param("L1", self.l1, "m"),
            param("L2", self.l2, "m"),
            param("g", self.g, "m/s^2"),
        ]
    }
}

/// Jacobians by complex-step differentiation: `∂f/∂xⱼ = Im f(x + i·h·eⱼ) / h`.
/// There is no subtractive cancellation, so the result is exact to rounding.
fn complex_step_jacobian<F>(n: usize, m: usize, f: F, x: &[f64], u: &[f64]) -> (Mat, Mat)
where
    F: Fn(&[Complex<f64>], &[Complex<f64>]) -> Vec<Complex<f64>>,
{
    let h = 1e-30;
    let xc: Vec<Complex<f64>> = x.iter().map(|v| Complex::new(*v, 0.0)).collect();
    let uc: Vec<Complex<f64>> = u.iter().map(|v| Complex::new(*v, 0.0)).collect();
    let mut a = Mat::zeros(n, n);
    let mut b = Mat::zeros(n, m);
    for j in 0..n {
        let mut xp = xc.clone();
        xp[j].im = h;
        let fx = f(&xp, &uc);
        for i in 0..n {
            a[(i, j)] = fx[i].im / h;
        }
    }
    for j in 0..m {
        let mut up = uc.clone();
        up[j].im = h;
        let fu = f(&xc, &up);
        for i in 0..n {
            b[(i, j)] = fu[i].im / h;
        }
    }
    (a, b)
}

/// Motorcycle as a kinematic bicycle with a first-order steering lag and an
/// inverted-pendulum roll mode, travelling at constant speed `v`.
///
/// State `(x, y, φ, β, θ, θ̇)`: position, yaw, steering angle, roll, roll
/// rate. Input: commanded steering angle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Motorcycle {
    pub l: f64,
    pub h: f64,
    pub tau: f64,
    pub g: f64,
    pub v: f64,
}

impl Default for Motorcycle {
    fn default() -> Self {
        Motorcycle { l: 1.5, h: 1.0, tau: 0.02, g: 10.0, v: 10.0 }
    }
}

impl Motorcycle {
    fn deriv_generic<T: ComplexField<RealField = f64> + Copy>(&self, s: &[T], cmd: T) -> Vec<T> {
        let c = |v: f64| T::from_real(v);
        let (phi, beta, th, dth) = (s[2], s[3], s[4], s[5]);
        let v = c(self.v);
        vec![
            v * phi.cos(),
            v * phi.sin(),
            v / c(self.l) * beta.tan(),
            (cmd - beta) / c(self.tau),
            dth,
            c(self.g / self.h) * th.sin() - c(self.v * self.v / (self.h * self.l)) * beta.tan() * th.cos(),
        ]
    }

    /// The lag-free lateral model on `(y, φ, θ, θ̇)` with the steering angle
    /// itself as input; its linearization is the four-state design model.
    pub fn lateral(&self) -> MotorcycleLateral {
        MotorcycleLateral { l: self.l, h: self.h, g: self.g, v: self.v }
    }
}

impl Plant for Motorcycle {
    fn name(&self) -> &str {
        "motorcycle"
    }
    fn state_dim(&self) -> usize {
        6
    }
    fn input_dim(&self) -> usize {
        1
    }
    fn deriv(&self, x: &Vector, u: &Vector) -> Vector {
        Vector::from_vec(self.deriv_generic(x.as_slice(), u[0]))
    }
    fn jacobian(&self, x: &Vector, u: &Vector) -> Option<(Mat, Mat)> {
        Some(complex_step_jacobian(6, 1, |xs, us| self.deriv_generic(xs, us[0]), x.as_slice(), &[u[0]]))
    }
    fn params(&self) -> Vec<Param> {
        vec![
            param("L", self.l, "m"),
            param("H", self.h, "m"),
            param("tau_beta", self.tau, "s"),
            param("g", self.g, "m/s^2"),
            param("v", self.v, "m/s"),
        ]
    }
}

/// See [`Motorcycle::lateral`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MotorcycleLateral {
    pub l: f64,
    pub h: f64,
    pub g: f64,
    pub v: f64,
}

impl MotorcycleLateral {
    fn deriv_generic<T: ComplexField<RealField = f64> + Copy>(&self, s: &[T], beta: T) -> Vec<T> {
        let c = |v: f64| T::from_real(v);
        let (phi, th, dth) = (s[1], s[2], s[3]);
        vec![
            c(self.v) * phi.sin(),
            c(self.v / self.l) * beta.tan(),
            dth,
            c(self.g / self.h) * th.sin() - c(self.v * self.v / (self.h * self.l)) * beta.tan() * th.cos(),
        ]
    }
}

impl Plant for MotorcycleLateral {
    fn name(&self) -> &str {
        "motorcycle lateral"
    }
    fn state_dim(&self) -> usize {
        4
    }
    fn input_dim(&self) -> usize {
        1
    }
    fn deriv(&self, x: &Vector, u: &Vector) -> Vector {
        Vector::from_vec(self.deriv_generic(x.as_slice(), u[0]))
    }
    fn jacobian(&self, x: &Vector, u: &Vector) -> Option<(Mat, Mat)> {
        Some(complex_step_jacobian(4, 1, |xs, us| self.deriv_generic(xs, us[0]), x.as_slice(), &[u[0]]))
    }
}

/// Planar point with `ẋ = x·sin y`, `ẏ = y + u`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Point2d;

impl Plant for Point2d {
    fn name(&self) -> &str {
        "2-D point"
    }
    fn state_dim(&self) -> usize {
        2
    }
    fn input_dim(&self) -> usize {
        1
    }
    fn deriv(&self, x: &Vector, u: &Vector) -> Vector {
        Vector::from_vec(vec![x[0] * x[1].sin(), x[1] + u[0]])
    }
    fn jacobian(&self, x: &Vector, _u: &Vector) -> Option<(Mat, Mat)> {
        let a = Mat::from_row_slice(2, 2, &[x[1].sin(), x[0] * x[1].cos(), 0.0, 1.0]);
        let b = Mat::from_column_slice(2, 1, &[0.0, 1.0]);
        Some((a, b))
    }
}

/// A plant defined by a closure, mostly for tests.
pub struct FnPlant<F> {
    pub name: String,
    pub state_dim: usize,
    pub input_dim: usize,
    pub f: F,
}

impl<F> Plant for FnPlant<F>
where
    F: Fn(&Vector, &Vector) -> Vector + Send + Sync,
{
    fn name(&self) -> &str {
        &self.name
    }
    fn state_dim(&self) -> usize {
        self.state_dim
    }
    fn input_dim(&self) -> usize {
        self.input_dim
    }
    fn deriv(&self, x: &Vector, u: &Vector) -> Vector {
        (self.f)(x, u)
    }
}

fn check_dims(plant: &dyn Plant, x: &Vector, u: &Vector) -> Result<()> {
    if x.len() != plant.state_dim() || u.len() != plant.input_dim() {
        return Err(Error::Dimension(format!(
            "{} expects state {} and input {}, got {} and {}",
            plant.name(),
            plant.state_dim(),
            plant.input_dim(),
            x.len(),
            u.len()
        )));
    }
    Ok(())
}

/// One explicit Euler step `x + dt·f(x, u)`.
pub fn step_euler(plant: &dyn Plant, x: &Vector, u: &Vector, dt: f64) -> Result<Vector> {
    step_at(plant, x, u, dt, f64::NAN)
}

fn step_at(plant: &dyn Plant, x: &Vector, u: &Vector, dt: f64, t: f64) -> Result<Vector> {
    check_dims(plant, x, u)?;
    if !(dt > 0.0) {
        return Err(Error::Domain(format!("dt must be positive, got {dt}")));
    }
    let d = plant.deriv(x, u);
    if d.len() != x.len() {
        return Err(Error::Dimension(format!("{} returned a derivative of length {}", plant.name(), d.len())));
    }
    let next = x + d * dt;
    if next.iter().any(|v| !v.is_finite()) || u.iter().any(|v| !v.is_finite()) {
        return Err(Error::BlowUp { t, state: x.iter().copied().collect() });
    }
    Ok(next)
}

/// Central finite-difference Jacobians with step `1e-6`.
pub fn finite_difference_jacobian(plant: &dyn Plant, x0: &Vector, u0: &Vector) -> (Mat, Mat) {
    let h = 1e-6;
    let n = x0.len();
    let m = u0.len();
    let mut a = Mat::zeros(n, n);
    let mut b = Mat::zeros(n, m);
    for j in 0..n {
        let mut xp = x0.clone();
        let mut xm = x0.clone();
        xp[j] += h;
        xm[j] -= h;
        a.set_column(j, &((plant.deriv(&xp, u0) - plant.deriv(&xm, u0)) / (2.0 * h)));
    }
    for j in 0..m {
        let mut up = u0.clone();
        let mut um = u0.clone();
        up[j] += h;
        um[j] -= h;
        b.set_column(j, &((plant.deriv(x0, &up) - plant.deriv(x0, &um)) / (2.0 * h)));
    }
    (a, b)
}

/// `(A, B)` at `(x0, u0)`: analytic when the plant has it, otherwise central
/// finite differences.
pub fn linearize(plant: &dyn Plant, x0: &Vector, u0: &Vector) -> Result<(Mat, Mat)> {
    check_dims(plant, x0, u0)?;
    let (a, b) = plant
        .jacobian(x0, u0)
        .unwrap_or_else(|| finite_difference_jacobian(plant, x0, u0));
    if a.iter().chain(b.iter()).any(|v| !v.is_finite()) {
        return Err(Error::BlowUp { t: f64::NAN, state: x0.iter().copied().collect() });
    }
    Ok((a, b))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TerminalEvent {
    /// "Control success!"
    Success,
    /// "Control failure!"
    Failure,
    /// "Arrive at destination!"
    Destination,
    Timeout,
}

impl TerminalEvent {
    pub fn as_str(&self) -> &'static str {
        match self {
            TerminalEvent::Success => "success",
            TerminalEvent::Failure => "failure",
            TerminalEvent::Destination => "destination",
            TerminalEvent::Timeout => "timeout",
        }
    }

    pub fn message(&self) -> &'static str {
        match self {
            TerminalEvent::Success => "Control success!",
            TerminalEvent::Failure => "Control failure!",
            TerminalEvent::Destination => "Arrive at destination!",
            TerminalEvent::Timeout => "Simulation time span exhausted",
        }
    }
}

pub type StatePredicate = Box<dyn Fn(&Vector) -> bool + Send + Sync>;

/// A stop condition checked on the freshly integrated state.
pub struct Stop {
    pub event: TerminalEvent,
    pub predicate: StatePredicate,
}

impl Stop {
    pub fn new(event: TerminalEvent, predicate: impl Fn(&Vector) -> bool + Send + Sync + 'static) -> Self {
        Stop { event, predicate: Box::new(predicate) }
    }
}

/// Simulation settings. The loop mirrors the listings: the time span
/// `0:dt:t_end` gives `round(t_end/dt) + 1` control steps; each step computes
/// the input, integrates, then evaluates `stops` in order on the new state.
pub struct SimSpec {
    pub dt: f64,
    pub t_end: f64,
    pub x0: Vector,
    pub stops: Vec<Stop>,
    /// Record every k-th sample (k ≥ 1).
    pub decimation: usize,
}

impl SimSpec {
    pub fn new(dt: f64, t_end: f64, x0: Vector) -> Self {
        SimSpec { dt, t_end, x0, stops: Vec::new(), decimation: 1 }
    }

    pub fn stop(mut self, event: TerminalEvent, predicate: impl Fn(&Vector) -> bool + Send + Sync + 'static) -> Self {
        self.stops.push(Stop::new(event, predicate));
        self
    }

    pub fn steps(&self) -> usize {
        (self.t_end / self.dt).round() as usize + 1
    }
}

/// Recorded run. `inputs[k]` is the input applied from `states[k]`; the final
/// recorded sample repeats the last applied input.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vector>,
    pub inputs: Vec<Vector>,
    pub terminal_event: TerminalEvent,
    pub final_time: f64,
    pub final_state: Vector,
    pub steps_taken: usize,
}

/// Runs the closed loop until a stop predicate fires or the time span is
/// exhausted. `controller(t, x)` is called once per integration step.
pub fn simulate<C>(plant: &dyn Plant, mut controller: C, spec: &SimSpec) -> Result<Trajectory>
where
    C: FnMut(f64, &Vector) -> Result<Vector>,
{
    if !(spec.dt > 0.0) || !(spec.t_end >= spec.dt) || spec.decimation == 0 {
        return Err(Error::Domain(format!(
            "invalid sim spec: dt = {}, t_end = {}, decimation = {}",
            spec.dt, spec.t_end, spec.decimation
        )));
    }
    let mut x = spec.x0.clone();
    let mut times = Vec::new();
    let mut states = Vec::new();
    let mut inputs = Vec::new();
    let mut last_u = Vector::zeros(plant.input_dim());
    let mut event = TerminalEvent::Timeout;
    let mut k = 0;
    let n = spec.steps();
    while k < n {
        let t = k as f64 * spec.dt;
        let u = controller(t, &x)?;
        if k % spec.decimation == 0 {
            times.push(t);
            states.push(x.clone());
            inputs.push(u.clone());
        }
        x = step_at(plant, &x, &u, spec.dt, t)?;
        last_u = u;
        k += 1;
        if let Some(stop) = spec.stops.iter().find(|s| (s.predicate)(&x)) {
            event = stop.event;
            break;
        }
    }
    let final_time = k as f64 * spec.dt;
    if k % spec.decimation == 0 {
        times.push(final_time);
        states.push(x.clone());
        inputs.push(last_u);
    }
    Ok(Trajectory { times, states, inputs, terminal_event: event, final_time, final_state: x, steps_taken: k })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{mat, vector};

    #[test]
    fn sip_equilibrium_is_fixed() {
        let x = Vector::zeros(4);
        let next = step_euler(&Sip::default(), &x, &vector(&[0.0]), 0.001).unwrap();
        assert_eq!(next, x);
    }

    #[test]
    fn sip_single_step_by_hand() {
        let x = vector(&[0.2, 0.0, 0.0, 0.0]);
        let next = step_euler(&Sip::default(), &x, &vector(&[0.0]), 0.001).unwrap();
        assert!((next[1] - 10.0 * 0.2f64.sin() * 0.001).abs() < 1e-15);
        assert!((next[1] - 0.0019867).abs() < 1e-7);
    }

    #[test]
    fn point_step_at_zero_angle() {
        let next = step_euler(&Point2d, &vector(&[1.0, 0.0]), &vector(&[0.0]), 0.001).unwrap();
        assert_eq!(next, vector(&[1.0, 0.0]));
    }

    #[test]
    fn step_rejects_bad_input() {
        assert!(matches!(
            step_euler(&Sip::default(), &Vector::zeros(3), &vector(&[0.0]), 0.001),
            Err(Error::Dimension(_))
        ));
        assert!(step_euler(&Sip::default(), &Vector::zeros(4), &vector(&[0.0]), 0.0).is_err());
        let r = step_euler(&Sip::default(), &Vector::zeros(4), &vector(&[f64::NAN]), 0.001);
        assert!(matches!(r, Err(Error::BlowUp { .. })));
    }

    #[test]
    fn sip_linearization_at_origin() {
        let (a, b) = linearize(&Sip::default(), &Vector::zeros(4), &vector(&[0.0])).unwrap();
        assert_eq!(a[(1, 0)], 10.0);
        assert_eq!(b, Mat::from_column_slice(4, 1, &[0.0, -1.0, 0.0, 1.0]));
    }

    #[test]
    fn dip_linearization_matches_design_model() {
        let (a, b) = linearize(&Dip::default(), &Vector::zeros(6), &vector(&[0.0])).unwrap();
        let row2 = [20.0, 0.0, -10.0, 0.0, 0.0, 0.0];
        let row4 = [-20.0, 0.0, 20.0, 0.0, 0.0, 0.0];
        for j in 0..6 {
            assert!((a[(1, j)] - row2[j]).abs() < 1e-12);
            assert!((a[(3, j)] - row4[j]).abs() < 1e-12);
        }
        let expect_b = [0.0, -1.0, 0.0, 0.0, 0.0, 1.0];
        for i in 0..6 {
            assert!((b[(i, 0)] - expect_b[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn motorcycle_lateral_linearization() {
        let lat = Motorcycle::default().lateral();
        let (a, b) = linearize(&lat, &Vector::zeros(4), &vector(&[0.0])).unwrap();
        let expect_a = mat(&[
            &[0.0, 10.0, 0.0, 0.0],
            &[0.0, 0.0, 0.0, 0.0],
            &[0.0, 0.0, 0.0, 1.0],
            &[0.0, 0.0, 10.0, 0.0],
        ]);
        assert!((a - expect_a).amax() < 1e-12);
        let expect_b = [0.0, 10.0 / 1.5, 0.0, -100.0 / 1.5];
        for i in 0..4 {
            assert!((b[(i, 0)] - expect_b[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn factored_model_examples() {
        let (a, b) = sip_factored_model(0.0, 1.0, 10.0);
        assert_eq!((a[(1, 0)], b[(1, 0)]), (10.0, -1.0));
        let t = 0.4 * std::f64::consts::PI;
        let (a, b) = sip_factored_model(t, 1.0, 10.0);
        assert!((a[(1, 0)] - 7.57).abs() < 5e-3 && (b[(1, 0)] + 0.31).abs() < 5e-3);
        let t = std::f64::consts::FRAC_PI_4;
        let (a, b) = sip_factored_model(t, 1.0, 10.0);
        assert!((a[(1, 0)] - 9.0032).abs() < 1e-4 && (b[(1, 0)] + std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn zero_dynamics_times_out() {
        let plant = FnPlant { name: "zero".into(), state_dim: 2, input_dim: 1, f: |x: &Vector, _u: &Vector| Vector::zeros(x.len()) };
        let spec = SimSpec::new(0.1, 1.0, vector(&[1.0, 2.0]));
        let traj = simulate(&plant, |_, _| Ok(vector(&[0.0])), &spec).unwrap();
        assert_eq!(traj.terminal_event, TerminalEvent::Timeout);
        assert!(traj.states.iter().all(|s| *s == vector(&[1.0, 2.0])));
        assert_eq!(traj.times.len(), traj.states.len());
        assert!(traj.times.windows(2).all(|w| w[1] > w[0]));
    }
}
