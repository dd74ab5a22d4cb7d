use num_complex::Complex64 as C;
use proptest::prelude::*;
use rgflow::{
    alpha_of_t, boundary_curve, domain_contains, eval_f, eval_g_critical, eval_g_normal, eval_v,
    eval_v_real, solve_pbar, theta_prime_n, u0_prime, Flavor, FlowParams,
};

fn flavor() -> impl Strategy<Value = Flavor> {
    prop_oneof![Just(Flavor::Critical), Just(Flavor::Normal)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn reflection_symmetry(
        fl in flavor(), beta in 0.5f64..4.0, t in 0.0f64..5.0,
        re in -3.0f64..-0.05, im in 0.01f64..2.0,
    ) {
        let params = FlowParams::new(beta, fl, t).unwrap();
        let up = eval_v(&params, C::new(re, im)).unwrap();
        let down = eval_v(&params, C::new(re, -im)).unwrap();
        prop_assert!((up.im + down.im).abs() <= 1e-12 * up.norm().max(1.0));
        prop_assert!((up.re - down.re).abs() <= 1e-12 * up.norm().max(1.0));
    }

    #[test]
    fn f_nonnegative(w in -50.0f64..0.999) {
        let f = eval_f(w).unwrap();
        prop_assert!(f >= 0.0);
        if w.abs() > 1e-3 {
            prop_assert!(f > 0.0);
        }
    }

    #[test]
    fn g_critical_increasing(t in 0.05f64..4.0, a in -5.0f64..0.0, step in 1e-3f64..0.5) {
        let limit = 1.0 / ((2.0 * t).exp() - 1.0);
        let b = (a + step).min(0.999 * limit);
        prop_assume!(b > a + 1e-4);
        prop_assert!(eval_g_critical(t, b).unwrap() > eval_g_critical(t, a).unwrap());
    }

    #[test]
    fn g_normal_increasing(t in 0.05f64..4.0, beta in 0.5f64..3.9, a in -5.0f64..0.0, step in 1e-3f64..0.5) {
        let limit = 1.0 / (1.0 - (-2.0 * t).exp());
        let b = (a + step).min(0.999 * limit);
        prop_assume!(b > a + 1e-4);
        prop_assert!(eval_g_normal(t, b, beta).unwrap() > eval_g_normal(t, a, beta).unwrap());
    }

    #[test]
    fn round_trip_real(t in 0.0f64..5.0, s in 0.01f64..0.98) {
        let params = FlowParams::critical(t).unwrap();
        let alpha = alpha_of_t(t).unwrap();
        let p = -alpha * s;
        let x = eval_v_real(&params, p).unwrap();
        let back = solve_pbar(&params, C::new(x, 0.0), 1e-10).unwrap().pbar;
        prop_assert!((back.re - p).abs() <= 1e-9, "p={p} back={back}");
        prop_assert!(back.im.abs() <= 1e-12);
    }

    #[test]
    fn round_trip_normal(beta in 0.5f64..3.5, t in 0.0f64..3.0, p in -2.0f64..-0.01) {
        let params = FlowParams::normal(beta, t).unwrap();
        let x = eval_v_real(&params, p).unwrap();
        let back = solve_pbar(&params, C::new(x, 0.0), 1e-10);
        // points past the turning point belong to the other branch
        if let Ok(r) = back {
            let fwd = eval_v_real(&params, r.pbar.re).unwrap();
            prop_assert!((fwd - x).abs() <= 1e-8 * x.abs().max(1.0));
        }
    }

    #[test]
    fn pick_positivity(re in -3.0f64..3.0, im in 1e-3f64..10.0, n in 2u32..120) {
        let z = C::new(re, im);
        prop_assert!(u0_prime(z, 4.0).unwrap().im > 0.0);
        let x = C::new(re / 20.0, im / 20.0);
        prop_assert!(theta_prime_n(n, x, 4.0).unwrap().im > 0.0);
    }

    #[test]
    fn pbar_stays_in_upper_half_plane(t in 0.0f64..4.0, re in -1.5f64..1.5, im in 0.01f64..1.5) {
        let params = FlowParams::critical(t).unwrap();
        let x = C::new(re, im);
        let r = solve_pbar(&params, x, 1e-10).unwrap();
        prop_assert!(r.pbar.im > 0.0);
        prop_assert!((eval_v(&params, r.pbar).unwrap() - x).norm() <= 1e-8 * x.norm().max(1.0));
    }

    #[test]
    fn domains_nest(t in 0.0f64..4.0, dt in 0.01f64..2.0, re in -4.0f64..0.0, im in 0.0f64..2.2) {
        let eta = C::new(re, im);
        if domain_contains(t + dt, eta).unwrap() {
            prop_assert!(domain_contains(t, eta).unwrap());
        }
    }
}

#[test]
fn arcs_are_convex() {
    for t in [0.0, 0.5, 1.0, 2.0, 4.0] {
        let b = boundary_curve(t, 129).unwrap();
        let pts = &b.arc;
        for w in pts.windows(3) {
            let (h1, h2) = (w[1].p - w[0].p, w[2].p - w[1].p);
            let curvature = (w[2].q - w[1].q) / h2 - (w[1].q - w[0].q) / h1;
            assert!(
                curvature <= 1e-9,
                "t={t} p={} curvature {curvature}",
                w[1].p
            );
        }
    }
}

#[test]
fn arcs_close_at_both_ends() {
    for t in [0.0, 0.5, 1.0, 2.0, 4.0] {
        let b = boundary_curve(t, 257).unwrap();
        assert!(b.failed.is_empty());
        let n = b.arc.len();
        assert!(b.arc[0].q.abs() < 1e-3 && b.arc[n - 1].q.abs() < 1e-3);
        // one grid step in from each end the height is already small
        assert!(b.arc[1].q < 0.5 && b.arc[n - 2].q < 0.5);
    }
}

#[test]
fn boundary_is_limit_of_principal_branch() {
    for t in [0.5, 1.0, 2.0] {
        let params = FlowParams::critical(t).unwrap();
        let b = boundary_curve(t, 33).unwrap();
        for pt in &b.arc[2..b.arc.len() - 2] {
            let eta = C::new(pt.p, pt.q);
            let x = eval_v(&params, eta).unwrap() + C::new(0.0, 1e-9);
            let back = solve_pbar(&params, x, 1e-12).unwrap().pbar;
            assert!((back - eta).norm() <= 1e-4, "t={t} eta={eta} back={back}");
        }
    }
}
