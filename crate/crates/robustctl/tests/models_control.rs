use proptest::prelude::*;
use robustctl::control::{dip_sliding_target, BarrierSpec, SlidingTargetDIP};
use robustctl::models::{
    finite_difference_jacobian, linearize, simulate, sip_factored_model, Dip, Motorcycle, Plant, Point2d, SimSpec,
    Sip, TerminalEvent,
};
use robustctl::numerics::{mat, vector};
use robustctl::{Mat, Vector};

fn max_abs_diff(a: &Mat, b: &Mat) -> f64 {
    (a - b).amax()
}

#[test]
fn linearizations_match_reference_design_models() {
    let zero1 = vector(&[0.0]);

    let (a, b) = linearize(&Sip::default(), &Vector::zeros(4), &zero1).unwrap();
    let a_sip = mat(&[&[0.0, 1.0, 0.0, 0.0], &[10.0, 0.0, 0.0, 0.0], &[0.0, 0.0, 0.0, 1.0], &[0.0, 0.0, 0.0, 0.0]]);
    assert!(max_abs_diff(&a, &a_sip) <= 1e-9);
    assert!(max_abs_diff(&b, &mat(&[&[0.0], &[-1.0], &[0.0], &[1.0]])) <= 1e-9);

    let (a, b) = linearize(&Dip::default(), &Vector::zeros(6), &zero1).unwrap();
    let a_dip = mat(&[
        &[0.0, 1.0, 0.0, 0.0, 0.0, 0.0],
        &[20.0, 0.0, -10.0, 0.0, 0.0, 0.0],
        &[0.0, 0.0, 0.0, 1.0, 0.0, 0.0],
        &[-20.0, 0.0, 20.0, 0.0, 0.0, 0.0],
        &[0.0, 0.0, 0.0, 0.0, 0.0, 1.0],
        &[0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    ]);
    assert!(max_abs_diff(&a, &a_dip) <= 1e-9);
    assert!(max_abs_diff(&b, &mat(&[&[0.0], &[-1.0], &[0.0], &[0.0], &[0.0], &[1.0]])) <= 1e-9);

    let (a, b) = linearize(&Motorcycle::default().lateral(), &Vector::zeros(4), &zero1).unwrap();
    let a_moto = mat(&[&[0.0, 10.0, 0.0, 0.0], &[0.0, 0.0, 0.0, 0.0], &[0.0, 0.0, 0.0, 1.0], &[0.0, 0.0, 10.0, 0.0]]);
    assert!(max_abs_diff(&a, &a_moto) <= 1e-9);
    assert!(max_abs_diff(&b, &mat(&[&[0.0], &[10.0 / 1.5], &[0.0], &[-100.0 / 1.5]])) <= 1e-9);
}

fn check_fd(plant: &dyn Plant, x: &Vector, u: &Vector) -> Result<(), TestCaseError> {
    let (a, b) = linearize(plant, x, u).unwrap();
    let (af, bf) = finite_difference_jacobian(plant, x, u);
    let scale = 1.0 + a.amax().max(b.amax());
    prop_assert!(max_abs_diff(&a, &af) <= 1e-5 * scale, "{}: A differs by {}", plant.name(), max_abs_diff(&a, &af));
    prop_assert!(max_abs_diff(&b, &bf) <= 1e-5 * scale, "{}: B differs by {}", plant.name(), max_abs_diff(&b, &bf));
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn analytic_jacobians_match_finite_differences(
        s in prop::collection::vec(-1.0..1.0f64, 6),
        u in -2.0..2.0f64,
    ) {
        let u = vector(&[u]);
        check_fd(&Sip::default(), &Vector::from_vec(s[..4].to_vec()), &u)?;
        check_fd(&Dip::default(), &Vector::from_vec(s.clone()), &u)?;
        let moto: Vec<f64> = s.iter().map(|v| v * 0.5).collect();
        check_fd(&Motorcycle::default(), &Vector::from_vec(moto.clone()), &(&u * 0.2))?;
        check_fd(&Motorcycle::default().lateral(), &Vector::from_vec(moto[..4].to_vec()), &(&u * 0.2))?;
        check_fd(&Point2d, &Vector::from_vec(s[..2].to_vec()), &u)?;
    }

    #[test]
    fn factored_model_is_exact_away_from_the_guard(
        theta in prop_oneof![-1.5..-0.1f64, 0.1..1.5f64],
        rest in prop::collection::vec(-3.0..3.0f64, 3),
        u in -5.0..5.0f64,
    ) {
        let x = vector(&[theta, rest[0], rest[1], rest[2]]);
        let uv = vector(&[u]);
        let (a, b) = sip_factored_model(theta, 1.0, 10.0);
        let f = Sip::default().deriv(&x, &uv);
        prop_assert!((&a * &x + &b * &uv - f).amax() <= 1e-12);
    }

    #[test]
    fn disk_barrier_vanishes_on_the_circle(
        cx in -5.0..5.0f64, cy in -5.0..5.0f64, r in 0.1..5.0f64, ang in 0.0..std::f64::consts::TAU,
    ) {
        let b = BarrierSpec::outside_disk(cx, cy, r, 1.0);
        let p = vector(&[cx + r * ang.cos(), cy + r * ang.sin()]);
        prop_assert!((b.h)(&p).abs() <= 1e-9);
        let outside = vector(&[cx + 1.1 * r * ang.cos(), cy + 1.1 * r * ang.sin()]);
        prop_assert!((b.h)(&outside) > 0.0);
    }

    #[test]
    fn envelope_barrier_vanishes_on_its_boundary(
        tb in 0.05..1.0f64, rb in 0.05..2.0f64, ang in 0.0..std::f64::consts::TAU,
    ) {
        let b = BarrierSpec::pendulum_envelope(tb, rb, 1.0);
        let big_r = 25.0 * tb * tb + rb * rb;
        let x = vector(&[(big_r / 25.0).sqrt() * ang.cos(), big_r.sqrt() * ang.sin(), 0.3, -0.7]);
        prop_assert!((b.h)(&x).abs() <= 1e-9);
        prop_assert!((b.h)(&Vector::zeros(4)) > 0.0);
    }

    #[test]
    fn sliding_target_is_lipschitz(
        x0 in -100.0..100.0f64, s_v in 0.1..20.0f64, t1 in 0.0..20.0f64, t2 in 0.0..20.0f64,
    ) {
        let tgt = SlidingTargetDIP::new(x0, s_v).unwrap();
        let (p1, p2) = (dip_sliding_target(&tgt, t1), dip_sliding_target(&tgt, t2));
        prop_assert!((p1[4] - p2[4]).abs() <= s_v * (t1 - t2).abs() + 1e-12);
        prop_assert!(p1[4].abs() <= x0.abs());
        prop_assert!(p1[4] * x0 >= 0.0);
    }
}

#[test]
fn simulation_is_deterministic_and_counts_steps() {
    let k = vector(&[-131.6, -41.6, -25.6, -25.6]);
    let run = || {
        let spec = SimSpec::new(0.001, 0.5, vector(&[0.2, 0.0, 0.5, 0.0]))
            .stop(TerminalEvent::Failure, |x| x[0].abs() >= std::f64::consts::FRAC_PI_2);
        simulate(&Sip::default(), |_, x| Ok(vector(&[-k.dot(x)])), &spec).unwrap()
    };
    let (a, b) = (run(), run());
    assert_eq!(a, b);
    assert_eq!(a.terminal_event, TerminalEvent::Timeout);
    assert_eq!(a.steps_taken, 501);
    assert_eq!(a.times.len(), a.states.len());
}
