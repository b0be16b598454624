//! Wiring of plant, controller, switching logic and stop predicates for every
//! scenario.

use std::f64::consts::PI;

use robustctl::control::{
    adaptive_gain_per_period, cbf_filter_scalar, clf_cbf_step, fsfc, lyapunov_ref_2d, shrink_toward_zero,
    BarrierSpec, ClfCbfTerms, ClfSpec, GainLookup, MotorcycleGuidance, Pose, SysIdWindow, LIE_GUARD,
};
use robustctl::models::{
    linearize, simulate, sip_factored_model, sip_partial_at, sip_partial_model, Dip, Motorcycle, Point2d,
    SimSpec, Sip, TerminalEvent, Trajectory,
};
use robustctl::numerics::vector;
use robustctl::synthesis::{
    design_gain_matrix, place_repeated, robust_riccati_gain, RobustConfig, RobustDesign, RobustOutcome,
    UncertaintyBounds,
};
use robustctl::{Complex, Mat, Vector};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::registry::{Defaults, Overrides, ScenarioId};
use crate::ScenarioError;

/// Largest pendulum angle the robust and adaptive designs cover.
pub const THETA_MAX: f64 = 0.4 * PI;

/// Summary of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub scenario: ScenarioId,
    pub terminal_event: String,
    pub final_state: Vec<f64>,
    pub elapsed_sim_time: f64,
    /// Smallest barrier value over the recorded samples (barrier scenarios).
    pub min_h: Option<f64>,
    pub gain_matrices_used: Vec<UsedGain>,
    /// Steps on which a singularity guard bypassed the safety filter.
    pub guard_activations: Option<usize>,
    /// SHA-256 of the recorded times, states and inputs.
    pub checksum: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UsedGain {
    pub label: String,
    pub k: Vec<f64>,
}

impl UsedGain {
    fn new(label: &str, k: &Vector) -> Self {
        UsedGain { label: label.to_string(), k: k.iter().copied().collect() }
    }
}

/// One least-squares estimate of the identification scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct IdSample {
    pub t: f64,
    pub theta: [f64; 2],
    /// Mean pendulum angle over the window rows.
    pub mean_angle: f64,
    /// Spread of the acceleration column of the window.
    pub input_spread: f64,
}

/// Extra observations that do not belong in the serialized report.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Diagnostics {
    /// Time at which a switching scenario handed over to sliding-mode control.
    pub switch_time: Option<f64>,
    pub identification: Vec<IdSample>,
    /// Identification solves rejected as rank deficient; the previous gain
    /// was held on those steps.
    pub rank_failures: usize,
    /// Lines switched to by the motorcycle guidance (1 or 2).
    pub final_line: Option<u8>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioRun {
    pub trajectory: Trajectory,
    pub report: RunReport,
    pub diagnostics: Diagnostics,
}

/// Runs a scenario with its listing defaults, modified by `overrides`.
pub fn run_scenario(id: ScenarioId, overrides: &Overrides) -> Result<(Trajectory, RunReport), ScenarioError> {
    let run = run_scenario_detailed(id, overrides)?;
    Ok((run.trajectory, run.report))
}

/// As [`run_scenario`], also returning per-scenario diagnostics.
pub fn run_scenario_detailed(id: ScenarioId, overrides: &Overrides) -> Result<ScenarioRun, ScenarioError> {
    let d = overrides.apply(id)?;
    match id {
        ScenarioId::DipSmc => run_dip(id, &d),
        ScenarioId::MotorcycleSmc => run_motorcycle(id, &d),
        ScenarioId::SipNonrobustFailure => run_sip_nonrobust(id, &d),
        ScenarioId::SipRobustRiccati => {
            let design = robust_design(false)?;
            run_sip_switching(id, &d, vec![UsedGain::new("robust", &design.gain.k)], |_| design.gain.k.clone())
        }
        ScenarioId::SipRobustRiccatiMidpoint => {
            let design = robust_design(true)?;
            run_sip_switching(id, &d, vec![UsedGain::new("robust", &design.gain.k)], |_| design.gain.k.clone())
        }
        ScenarioId::SipIntervalPolynomial => {
            let k = interval_polynomial_gain(THETA_MAX, 1.0, 10.0);
            run_sip_switching(id, &d, vec![UsedGain::new("robust", &k)], |_| k.clone())
        }
        ScenarioId::SipAdaptiveLookup => {
            let table = GainLookup::new(&repeated(-4.0, 3), THETA_MAX, 1.0, 10.0)?;
            let labels = ["lookup |theta| < pi/6", "lookup |theta| < pi/3", "lookup otherwise"];
            let used = table.gains.iter().zip(labels).map(|(g, l)| UsedGain::new(l, &g.k)).collect();
            run_sip_switching(id, &d, used, |x| table.select(x[0]).k.clone())
        }
        ScenarioId::SipAdaptiveOnline => run_sip_adaptive_online(id, &d),
        ScenarioId::SipAdaptiveSysid => run_sip_sysid(id, &d),
        ScenarioId::SipCbf => run_sip_cbf(id, &d),
        ScenarioId::Point2dCbfCase1 | ScenarioId::Point2dCbfCase2 => run_point_cbf(id, &d),
        ScenarioId::Point2dClfCbfCase1 | ScenarioId::Point2dClfCbfCase2 => run_point_clf_cbf(id, &d),
    }
}

fn repeated(pole: f64, n: usize) -> Vec<Complex<f64>> {
    vec![Complex::new(pole, 0.0); n]
}

fn partial(x: &Vector) -> Vector {
    vector(&[x[0], x[1], x[3]])
}

fn sip_stop_failure(spec: SimSpec) -> SimSpec {
    spec.stop(TerminalEvent::Failure, |x| x[0].abs() >= PI / 2.0)
}

fn sip_stop_success_then_failure(spec: SimSpec) -> SimSpec {
    sip_stop_failure(spec.stop(TerminalEvent::Success, |x| x.dot(x) < 0.001))
}

fn finish(
    id: ScenarioId,
    trajectory: Trajectory,
    gains: Vec<UsedGain>,
    min_h: Option<f64>,
    guard_activations: Option<usize>,
    diagnostics: Diagnostics,
) -> ScenarioRun {
    let report = RunReport {
        scenario: id,
        terminal_event: trajectory.terminal_event.as_str().to_string(),
        final_state: trajectory.final_state.iter().copied().collect(),
        elapsed_sim_time: trajectory.final_time,
        min_h,
        gain_matrices_used: gains,
        guard_activations,
        checksum: checksum(&trajectory),
    };
    ScenarioRun { trajectory, report, diagnostics }
}

/// SHA-256 over the little-endian bytes of every recorded time, state and
/// input, in order.
pub fn checksum(traj: &Trajectory) -> String {
    let mut hasher = Sha256::new();
    for ((t, x), u) in traj.times.iter().zip(&traj.states).zip(&traj.inputs) {
        hasher.update(t.to_le_bytes());
        for v in x.iter().chain(u.iter()) {
            hasher.update(v.to_le_bytes());
        }
    }
    hasher.update(traj.terminal_event.as_str().as_bytes());
    hasher.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

/// Gain of the sliding-mode stage of the switching pendulum scenarios.
pub fn sip_smc_gain() -> Result<Vector, ScenarioError> {
    let (a, b) = sip_factored_model(0.0, 1.0, 10.0);
    let poles = [
        Complex::new(-4.0, 0.0),
        Complex::new(-4.0, 2.0),
        Complex::new(-4.0, -2.0),
        Complex::new(-4.0, 0.0),
    ];
    Ok(design_gain_matrix(&a, &b, &poles)?.k)
}

/// Robust Riccati design for the partial pendulum model between `θ = 0` and
/// `θ = θ_max`. The vertex-anchored variant takes the upright model as
/// nominal with `ā = b̄ = 300`; the midpoint variant takes the average of the
/// two bounding models with `ā = b̄ = 50`.
pub fn robust_design(midpoint: bool) -> Result<RobustDesign, ScenarioError> {
    let (a1, b1) = sip_partial_at(0.0, 1.0, 10.0);
    let (a2, b2) = sip_partial_at(THETA_MAX, 1.0, 10.0);
    let (ap, bp, weight) = if midpoint {
        ((&a1 + &a2) / 2.0, (&b1 + &b2) / 2.0, 50.0)
    } else {
        (a1, b1, 300.0)
    };
    let bounds = UncertaintyBounds::between(&ap, &bp, &a2, &b2);
    let cfg = RobustConfig {
        a_bar: weight,
        b_bar: weight,
        epsilon: 0.01,
        q: Mat::identity(3, 3),
        r: Mat::from_element(1, 1, 0.01),
    };
    match robust_riccati_gain(&ap, &bp, &bounds, &cfg)? {
        RobustOutcome::Solved(d) => Ok(*d),
        RobustOutcome::NoSolution { reason, .. } => Err(ScenarioError::Design(reason)),
    }
}

/// Interval-polynomial gain: `k₃ = −10`, then `k₂` and `k₁` set 10 below
/// their bounds rounded down to a multiple of 10.
pub fn interval_polynomial_gain(theta_max: f64, l: f64, g: f64) -> Vector {
    let a_max = g / l;
    let b_min = theta_max.cos() / l;
    let k3 = -10.0;
    let k2 = ((k3 / b_min) / 10.0).floor() * 10.0 - 10.0;
    let k1 = ((a_max * k2 / (-b_min * k2 + k3)) / 10.0).floor() * 10.0 - 10.0;
    vector(&[k1, k2, k3])
}

fn spec_from(d: &Defaults) -> SimSpec {
    SimSpec::new(d.dt, d.t_end, Vector::from_vec(d.x0.clone()))
}

fn run_dip(id: ScenarioId, d: &Defaults) -> Result<ScenarioRun, ScenarioError> {
    let plant = Dip::default();
    let (a, b) = linearize(&plant, &Vector::zeros(6), &Vector::zeros(1))?;
    let k = place_repeated(&a, &b, -4.0)?.k;
    let slide = d.slide_rate.unwrap_or(8.0) * d.dt;
    let mut target = Vector::zeros(6);
    target[4] = d.x0[4];
    let spec = spec_from(d).stop(TerminalEvent::Failure, |x| x[0].abs() >= PI / 2.0 && x[2].abs() >= PI / 2.0);
    let traj = simulate(
        &plant,
        |_, x| {
            target[4] = shrink_toward_zero(target[4], slide);
            Ok(vector(&[fsfc(&k, x, &target)?]))
        },
        &spec,
    )?;
    Ok(finish(id, traj, vec![UsedGain::new("fsfc", &k)], None, None, Diagnostics::default()))
}

/// Start and destination of the motorcycle run.
pub fn motorcycle_poses(x0: &[f64]) -> (Pose, Pose) {
    let (phi_i, phi_d, d1, d2) = (PI / 8.0, PI / 4.0, 20.0, 20.0);
    let pose_i = Pose { x: x0[0], y: x0[1], phi: phi_i };
    let pose_d = Pose {
        x: d1 * phi_i.cos() + d2 * phi_d.cos(),
        y: d1 * phi_i.sin() + d2 * phi_d.sin(),
        phi: phi_d,
    };
    (pose_i, pose_d)
}

fn run_motorcycle(id: ScenarioId, d: &Defaults) -> Result<ScenarioRun, ScenarioError> {
    let plant = Motorcycle::default();
    let lateral = plant.lateral();
    let (a, b) = linearize(&lateral, &Vector::zeros(4), &Vector::zeros(1))?;
    let k = place_repeated(&a, &b, -2.5)?.k;
    let (pose_i, pose_d) = motorcycle_poses(&d.x0);
    let mut guidance = MotorcycleGuidance::new(pose_i, pose_d, d.preview.unwrap_or(6.0))?;
    let spec = spec_from(d)
        .stop(TerminalEvent::Failure, |x| x[4].abs() >= PI / 2.0)
        .stop(TerminalEvent::Destination, move |x| (x[0] - pose_d.x).hypot(x[1] - pose_d.y) < 0.2);
    let traj = simulate(
        &plant,
        |_, x| {
            let beta = guidance.step(Pose { x: x[0], y: x[1], phi: x[2] }, x[4], x[5], &k)?;
            Ok(vector(&[beta]))
        },
        &spec,
    )?;
    let diagnostics = Diagnostics { final_line: Some(guidance.active_line), ..Default::default() };
    Ok(finish(id, traj, vec![UsedGain::new("lateral", &k)], None, None, diagnostics))
}

fn run_sip_nonrobust(id: ScenarioId, d: &Defaults) -> Result<ScenarioRun, ScenarioError> {
    let (a, b) = sip_partial_at(0.0, 1.0, 10.0);
    let k = place_repeated(&a, &b, -4.0)?.k;
    let spec = sip_stop_failure(spec_from(d));
    let traj = simulate(&Sip::default(), |_, x| Ok(vector(&[-k.dot(&partial(x))])), &spec)?;
    Ok(finish(id, traj, vec![UsedGain::new("nominal", &k)], None, None, Diagnostics::default()))
}

/// Partial-state law while `θ² + θ̇² + ẋ² > 1`, then a one-way switch to
/// full-state feedback onto a cart set-point sliding to the origin.
fn run_sip_switching(
    id: ScenarioId,
    d: &Defaults,
    mut gains: Vec<UsedGain>,
    far_gain: impl Fn(&Vector) -> Vector,
) -> Result<ScenarioRun, ScenarioError> {
    let k_smc = sip_smc_gain()?;
    gains.push(UsedGain::new("sliding mode", &k_smc));
    let slide = d.slide_rate.unwrap_or(8.0) * d.dt;
    let mut target: Option<Vector> = None;
    let mut switch_time = None;
    let spec = sip_stop_success_then_failure(spec_from(d));
    let traj = simulate(
        &Sip::default(),
        |t, x| {
            if target.is_none() && x[0] * x[0] + x[1] * x[1] + x[3] * x[3] > 1.0 {
                return Ok(vector(&[-far_gain(x).dot(&partial(x))]));
            }
            let tgt = target.get_or_insert_with(|| {
                switch_time = Some(t);
                vector(&[0.0, 0.0, x[2], 0.0])
            });
            tgt[2] = shrink_toward_zero(tgt[2], slide);
            Ok(vector(&[fsfc(&k_smc, x, tgt)?]))
        },
        &spec,
    )?;
    let diagnostics = Diagnostics { switch_time, ..Default::default() };
    Ok(finish(id, traj, gains, None, None, diagnostics))
}

fn run_sip_adaptive_online(id: ScenarioId, d: &Defaults) -> Result<ScenarioRun, ScenarioError> {
    let poles = repeated(-4.0, 3);
    let mut first: Option<Vector> = None;
    let mut last = Vector::zeros(3);
    let spec = sip_stop_failure(spec_from(d));
    let traj = simulate(
        &Sip::default(),
        |_, x| {
            let k = adaptive_gain_per_period(x[0], &poles, 1.0, 10.0)?.k;
            first.get_or_insert_with(|| k.clone());
            let u = -k.dot(&partial(x));
            last = k;
            Ok(vector(&[u]))
        },
        &spec,
    )?;
    let gains = vec![UsedGain::new("per-period first", &first.unwrap_or_default()), UsedGain::new("per-period last", &last)];
    Ok(finish(id, traj, gains, None, None, Diagnostics::default()))
}

/// Window length of the identification scenario (`kSI + 1`).
pub const SYSID_WINDOW: usize = 6;

fn run_sip_sysid(id: ScenarioId, d: &Defaults) -> Result<ScenarioRun, ScenarioError> {
    let poles = repeated(-4.0, 3);
    let dt = d.dt;
    let mut window = SysIdWindow::new(SYSID_WINDOW)?;
    let mut prev_rate = d.x0[1];
    let mut acc = 0.0;
    let mut k_step = 0usize;
    let mut gain: Option<Vector> = None;
    let mut first_gain: Option<Vector> = None;
    let mut samples = Vec::new();
    let mut rank_failures = 0;
    let spec = sip_stop_failure(spec_from(d));
    let traj = simulate(
        &Sip::default(),
        |t, x| {
            let response = (x[1] - prev_rate) / dt;
            if k_step < SYSID_WINDOW {
                acc = 1.0;
                window.push(vector(&[x[0], acc]), response);
            } else {
                window.push(vector(&[x[0], acc]), response);
                match robustctl::control::sysid_solve(&window) {
                    Ok(theta) => {
                        let rows = window.rows();
                        let n = rows.len() as f64;
                        let mean_angle = rows.iter().map(|r| r.0[0]).sum::<f64>() / n;
                        let (lo, hi) = rows.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| {
                            (lo.min(r.0[1]), hi.max(r.0[1]))
                        });
                        samples.push(IdSample { t, theta: [theta[0], theta[1]], mean_angle, input_spread: hi - lo });
                        let (a, b) = sip_partial_model(theta[0], theta[1]);
                        match design_gain_matrix(&a, &b, &poles) {
                            Ok(g) => {
                                first_gain.get_or_insert_with(|| g.k.clone());
                                gain = Some(g.k);
                            }
                            Err(robustctl::Error::Uncontrollable(_)) => rank_failures += 1,
                            Err(e) => return Err(e),
                        }
                    }
                    Err(robustctl::Error::Rank(_)) => rank_failures += 1,
                    Err(e) => return Err(e),
                }
                if let Some(k) = &gain {
                    acc = -k.dot(&partial(x));
                }
            }
            prev_rate = x[1];
            k_step += 1;
            Ok(vector(&[acc]))
        },
        &spec,
    )?;
    let mut gains = Vec::new();
    if let Some(k) = &first_gain {
        gains.push(UsedGain::new("identified first", k));
    }
    if let Some(k) = &gain {
        gains.push(UsedGain::new("identified last", k));
    }
    let diagnostics = Diagnostics { identification: samples, rank_failures, ..Default::default() };
    Ok(finish(id, traj, gains, None, None, diagnostics))
}

/// Barrier of the pendulum safety scenario.
pub fn sip_barrier() -> BarrierSpec {
    BarrierSpec::pendulum_envelope(PI / 15.0, 2.0, 1.0)
}

fn run_sip_cbf(id: ScenarioId, d: &Defaults) -> Result<ScenarioRun, ScenarioError> {
    let plant = Sip::default();
    let (a, b) = sip_factored_model(0.0, 1.0, 10.0);
    let k = place_repeated(&a, &b, -4.0)?.k;
    let barrier = sip_barrier();
    let mut guards = 0;
    let spec = sip_stop_failure(spec_from(d));
    let traj = simulate(
        &plant,
        |_, x| {
            let u_ref = -k.dot(x);
            let h = (barrier.h)(x);
            let f = vector(&[x[1], plant.g * x[0].sin() / plant.l, x[3], 0.0]);
            let g = vector(&[0.0, -x[0].cos() / plant.l, 0.0, 1.0]);
            let (lfh, lgh) = barrier.lie(x, &f, &g);
            if lgh.abs() <= LIE_GUARD {
                guards += 1;
            }
            Ok(vector(&[cbf_filter_scalar(u_ref, lfh, lgh, barrier.alpha(h))]))
        },
        &spec,
    )?;
    let min_h = traj.states.iter().map(|s| (barrier.h)(s)).fold(f64::INFINITY, f64::min);
    Ok(finish(id, traj, vec![UsedGain::new("reference", &k)], Some(min_h), Some(guards), Diagnostics::default()))
}

/// Barrier keeping the planar point out of the scenario's disk.
pub fn point_barrier(id: ScenarioId) -> Result<BarrierSpec, ScenarioError> {
    let (cx, cy, r) = id
        .unsafe_disk()
        .ok_or_else(|| ScenarioError::Design(format!("{id} has no unsafe disk")))?;
    Ok(BarrierSpec::outside_disk(cx, cy, r, 10.0))
}

fn point_fields(x: &Vector) -> (Vector, Vector) {
    (vector(&[x[0] * x[1].sin(), x[1]]), vector(&[0.0, 1.0]))
}

fn run_point_cbf(id: ScenarioId, d: &Defaults) -> Result<ScenarioRun, ScenarioError> {
    let barrier = point_barrier(id)?;
    let mut guards = 0;
    let traj = simulate(
        &Point2d,
        |_, x| {
            let u_ref = lyapunov_ref_2d(x[0], x[1]);
            let (f, g) = point_fields(x);
            let (lfh, lgh) = barrier.lie(x, &f, &g);
            if lgh.abs() <= LIE_GUARD {
                guards += 1;
            }
            Ok(vector(&[cbf_filter_scalar(u_ref, lfh, lgh, barrier.alpha((barrier.h)(x)))]))
        },
        &spec_from(d),
    )?;
    let min_h = traj.states.iter().map(|s| (barrier.h)(s)).fold(f64::INFINITY, f64::min);
    Ok(finish(id, traj, Vec::new(), Some(min_h), Some(guards), Diagnostics::default()))
}

/// Weights of the relaxed program: `H` on the input, `λ` on the slack.
pub const CLF_CBF_H: f64 = 1.0;
pub const CLF_CBF_LAMBDA: f64 = 0.25;

fn run_point_clf_cbf(id: ScenarioId, d: &Defaults) -> Result<ScenarioRun, ScenarioError> {
    let barrier = point_barrier(id)?;
    let clf = ClfSpec::quadratic(1.0);
    let mut guards = 0;
    let traj = simulate(
        &Point2d,
        |_, x| {
            let (f, g) = point_fields(x);
            let u_ref = lyapunov_ref_2d(x[0], x[1]);
            let grad_v = (clf.grad_v)(x);
            let (lfh, lgh) = barrier.lie(x, &f, &g);
            let guard = x[1].abs() <= LIE_GUARD;
            if guard {
                guards += 1;
            }
            let terms = ClfCbfTerms {
                u_ref,
                lfv: grad_v.dot(&f),
                lgv: grad_v.dot(&g),
                gamma_v: clf.gamma((clf.v)(x)),
                lfh,
                lgh,
                alpha_h: barrier.alpha((barrier.h)(x)),
            };
            let (u, _) = clf_cbf_step(&terms, CLF_CBF_LAMBDA, CLF_CBF_H, guard)?;
            Ok(vector(&[u]))
        },
        &spec_from(d),
    )?;
    let min_h = traj.states.iter().map(|s| (barrier.h)(s)).fold(f64::INFINITY, f64::min);
    Ok(finish(id, traj, Vec::new(), Some(min_h), Some(guards), Diagnostics::default()))
}
