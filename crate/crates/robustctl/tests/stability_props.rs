use proptest::prelude::*;
use robustctl::numerics::{eigenvalues, induced_norm, Poly};
use robustctl::stability::{
    bauer_fike_check, interval_poly_stable, kharitonov_polys, routh_stable, sip_closed_loop, sip_delta_ac,
    sip_delta_ac_coefficient, sip_theta_safe_radius, IntervalPoly,
};
use robustctl::{Complex, Mat, Vector};

/// Roots drawn in the left half plane (real roots and conjugate pairs).
fn hurwitz_roots() -> impl Strategy<Value = Vec<Complex<f64>>> {
    (1usize..=6, prop::collection::vec((-3.0..-0.2f64, 0.0..2.5f64, any::<bool>()), 6)).prop_map(|(deg, raw)| {
        let mut roots = Vec::new();
        for (re, im, pair) in raw {
            if roots.len() == deg {
                break;
            }
            if pair && roots.len() + 2 <= deg {
                roots.push(Complex::new(re, im));
                roots.push(Complex::new(re, -im));
            } else {
                roots.push(Complex::new(re, 0.0));
            }
        }
        roots
    })
}

/// Interval polynomial around a Hurwitz nominal with relative widths up to
/// `spread`; the leading coefficient stays exactly 1.
fn interval_poly() -> impl Strategy<Value = IntervalPoly> {
    (hurwitz_roots(), prop::collection::vec((0.0..1.0f64, 0.0..1.0f64), 7), 0.0..0.9f64).prop_map(
        |(roots, widths, spread)| {
            let nominal = Poly::from_roots(&roots).unwrap();
            let n = nominal.degree();
            let (mut lo, mut hi) = (Vec::new(), Vec::new());
            for (i, c) in nominal.coeffs().iter().enumerate() {
                if i == n {
                    lo.push(1.0);
                    hi.push(1.0);
                } else {
                    let (wl, wu) = widths[i];
                    lo.push(c - spread * wl * c.abs());
                    hi.push(c + spread * wu * c.abs());
                }
            }
            IntervalPoly::new(lo, hi).unwrap()
        },
    )
}

fn max_real_root(p: &Poly) -> f64 {
    p.roots().unwrap().iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max)
}

fn sip_full_gain() -> Vector {
    Vector::from_vec(vec![-131.6, -41.6, -25.6, -25.6])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    /// Kharitonov's four polynomials against every vertex plus 50 interior
    /// members: the verdicts must never disagree.
    #[test]
    fn kharitonov_agrees_with_vertices_and_interior(
        ip in interval_poly(),
        samples in prop::collection::vec(prop::collection::vec(0.0..1.0f64, 7), 50),
    ) {
        let verdict = interval_poly_stable(&ip);
        let vertices_stable = ip.vertices().iter().all(|v| routh_stable(v).unwrap().stable);
        prop_assert_eq!(verdict, vertices_stable);
        for k in kharitonov_polys(&ip) {
            prop_assert!(ip.vertices().contains(&k));
        }
        if verdict {
            for t in &samples {
                let p = ip.sample(&t[..=ip.degree()]);
                prop_assert!(routh_stable(&p).unwrap().stable, "interior member {:?} unstable", p.coeffs());
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn routh_agrees_with_companion_eigenvalues(
        deg in 1usize..=8,
        coeffs in prop::collection::vec(-1.0..1.0f64, 9),
        roots in hurwitz_roots(),
        from_roots in any::<bool>(),
    ) {
        let p = if from_roots {
            Poly::from_roots(&roots).unwrap()
        } else {
            let mut c = coeffs[..=deg].to_vec();
            if c[deg].abs() < 0.1 {
                c[deg] = 0.5;
            }
            Poly::new(c)
        };
        let m = max_real_root(&p);
        // Roots within a hair of the imaginary axis are numerically undecidable.
        prop_assume!(m.abs() > 1e-6);
        let r = routh_stable(&p).unwrap();
        prop_assert_eq!(r.stable, m < 0.0, "max Re = {}, first column {:?}", m, r.first_column);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn delta_ac_norm_is_bounded_by_theta_squared(
        k in prop::collection::vec(-150.0..0.0f64, 4),
        theta in -1.3..1.3f64,
        partial in any::<bool>(),
    ) {
        let k = if partial { Vector::from_vec(k[..3].to_vec()) } else { Vector::from_vec(k) };
        let d = sip_delta_ac(&k, theta, 1.0, 10.0).unwrap();
        let bound = theta * theta * sip_delta_ac_coefficient(&k, 1.0, 10.0);
        prop_assert!(induced_norm(&d) <= bound * (1.0 + 1e-12) + 1e-12);
    }

    #[test]
    fn bauer_fike_contains_perturbed_eigenvalues(
        a in prop::collection::vec(-2.0..2.0f64, 16),
        d in prop::collection::vec(-1.0..1.0f64, 16),
        scale in 1e-4..1.0f64,
    ) {
        let a = Mat::from_row_slice(4, 4, &a);
        let delta = Mat::from_row_slice(4, 4, &d) * scale;
        match bauer_fike_check(&a, &delta) {
            Ok(bf) => prop_assert!(bf.holds, "distance {} radius {}", bf.max_distance, bf.radius),
            // Nearly defective draws are reported, not mis-certified.
            Err(_) => prop_assume!(false),
        }
    }

    #[test]
    fn closed_loop_stable_inside_safe_radius(frac in -0.999..0.999f64) {
        let k = sip_full_gain();
        let r = sip_theta_safe_radius(&k, 1.0, 10.0).unwrap();
        let ac = sip_closed_loop(&k, frac * r, 1.0, 10.0).unwrap();
        prop_assert!(eigenvalues(&ac).unwrap().iter().all(|z| z.re < 0.0));
    }
}

#[test]
fn bauer_fike_on_pendulum_closed_loop() {
    let k = sip_full_gain();
    let ac0 = sip_closed_loop(&k, 0.0, 1.0, 10.0).unwrap();
    for deg in [-60.0f64, -20.0, 5.0, 45.0] {
        let delta = sip_delta_ac(&k, deg.to_radians(), 1.0, 10.0).unwrap();
        assert!(bauer_fike_check(&ac0, &delta).unwrap().holds);
    }
}

#[test]
fn safe_radius_is_positive_and_small() {
    let r = sip_theta_safe_radius(&sip_full_gain(), 1.0, 10.0).unwrap();
    assert!(r > 0.0 && r < std::f64::consts::FRAC_PI_2, "radius {r}");
}

#[test]
fn family_straddling_the_axis_is_unstable() {
    // s² + s + a₀ with a₀ ∈ [−1, 1] contains members with a positive root.
    let ip = IntervalPoly::new(vec![-1.0, 1.0, 1.0], vec![1.0, 1.0, 1.0]).unwrap();
    assert!(!interval_poly_stable(&ip));
    let ip = IntervalPoly::new(vec![1.0, 1.0, 1.0], vec![2.0, 3.0, 1.0]).unwrap();
    assert!(interval_poly_stable(&ip));
}
