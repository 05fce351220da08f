use hsbounds::bounds::{self, Settings};
use hsbounds::kernels;
use hsbounds::laplace;
use hsbounds::par::Execution;
use hsbounds::specfun::{f21, gamma, ln_gamma};
use hsbounds::BoundQuery;
use num_rational::Ratio;
use proptest::prelude::*;
use std::f64::consts::PI;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn hyp2f1_symmetric_in_numerator(a in 0.1f64..6.0, b in 0.1f64..6.0, c in 0.5f64..12.0, w in -0.9f64..0.9) {
        let x = f21(a, b, c, w).unwrap();
        let y = f21(b, a, c, w).unwrap();
        prop_assert!(rel(x, y) < 1e-12, "{x} vs {y}");
    }

    #[test]
    fn hyp2f1_increasing_for_positive_parameters(a in 0.1f64..5.0, b in 0.1f64..5.0, extra in 0.01f64..5.0,
                                                w in -5.0f64..0.9, dw in 0.01f64..0.09) {
        // the derivative is (ab/c) F(a+1, b+1; c+1; w), positive by Euler's integral once c > b
        let c = b + extra;
        let lo = f21(a, b, c, w).unwrap();
        let hi = f21(a, b, c, w + dw).unwrap();
        prop_assert!(hi > lo, "F({a},{b};{c};{w}) = {lo} >= {hi}");
    }

    #[test]
    fn gamma_duplication(x in 0.05f64..60.0) {
        let lhs = ln_gamma(2.0 * x).unwrap();
        let rhs = (2.0 * x - 1.0) * 2f64.ln() - 0.5 * PI.ln() + ln_gamma(x).unwrap() + ln_gamma(x + 0.5).unwrap();
        prop_assert!((lhs - rhs).abs() < 1e-12 * lhs.abs().max(1.0));
    }

    #[test]
    fn gamma_recurrence(x in 0.05f64..30.0) {
        prop_assert!(rel(gamma(x + 1.0).unwrap(), x * gamma(x).unwrap()) < 1e-13);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn kernel_routes_agree(d in 1u32..=6, gap in 0.05f64..20.0, lu in -3.0f64..4.0) {
        let q = BoundQuery::from_gap(d, gap).unwrap();
        let u = 10f64.powf(lu);
        let a = kernels::f_nd_direct(&q, u).unwrap();
        let b = kernels::f_nd_transformed(&q, u).unwrap();
        prop_assert!(rel(a, b) < 1e-10, "d={d} n={} u={u}: {a} vs {b}", q.n());
        prop_assert!(a > 0.0 && a <= 1.0 + 1e-12);
    }

    #[test]
    fn s_nd_shape(d in 1u32..=4, gap in 0.02f64..12.0) {
        let q = BoundQuery::from_gap(d, gap).unwrap();
        let grid: Vec<f64> = (0..=60).map(|i| 10f64.powf(-2.0 + i as f64 * 0.1)).collect();
        let vals: Vec<f64> = grid.iter().map(|&u| kernels::ln_s_nd(&q, u).unwrap()).collect();
        let inf = kernels::ln_s_nd_limit_inf(&q);
        if q.n() > q.half_d() + 0.5 + 1e-9 {
            let top = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let r = bounds::k_plus(&q).unwrap();
            prop_assert!(2.0 * r.value.ln() >= top - 1e-9);
            prop_assert!(2.0 * r.value.ln() > inf);
        } else {
            for w in vals.windows(2) {
                prop_assert!(w[1] >= w[0] - 1e-10, "{} then {}", w[0], w[1]);
            }
            prop_assert!(vals.last().unwrap() <= &(inf + 1e-9));
        }
    }

    #[test]
    fn leading_law_halves_at_four_times_the_scale(n in 1.0f64..1e6) {
        let spec = laplace::l_integral();
        let a = laplace::asymp_value(&spec, n, 1).unwrap();
        let b = laplace::asymp_value(&spec, 4.0 * n, 1).unwrap();
        prop_assert!((b / a - 0.5).abs() < 1e-13);
        prop_assert!(rel(a, (3.0 * PI / n).sqrt()) < 1e-13);
    }

    #[test]
    fn optimizer_ignores_objective_scale(d in 1u32..=3, gap in 0.6f64..8.0, scale_exp in -6i32..=6) {
        let q = BoundQuery::from_gap(d, gap).unwrap();
        let k = 10f64.powi(scale_exp);
        let f = |u: f64| k * kernels::s_nd(&q, u).unwrap();
        let g = |u: f64| kernels::s_nd(&q, u).unwrap();
        let a = hsbounds::optim::maximize_1d(f, 0.0, f64::INFINITY, 1.0, 1e-10).unwrap();
        let b = hsbounds::optim::maximize_1d(g, 0.0, f64::INFINITY, 1.0, 1e-10).unwrap();
        prop_assert!(rel(a.max_value / k, b.max_value) < 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn lower_never_exceeds_upper(d in 1u32..=4, gap in 0.05f64..25.0) {
        let q = BoundQuery::from_gap(d, gap).unwrap();
        let s = bounds::sandwich(&q, &Settings::default()).unwrap();
        prop_assert!(s.lower.value <= s.upper.value, "n={} d={d}: {} > {}", q.n(), s.lower.value, s.upper.value);
        prop_assert!(s.ratio > 0.0);
    }

    #[test]
    fn ratio_band_on_the_half_integer_grid(d in 1u32..=4, k in 1i64..=40) {
        let q = BoundQuery::from_ratio(Ratio::new(d as i64 + k, 2), d).unwrap();
        let s = bounds::sandwich(&q, &Settings::default()).unwrap();
        prop_assert!(s.ratio >= 0.74 && s.ratio <= 0.89, "n={} d={d}: ratio {}", q.n(), s.ratio);
    }

    #[test]
    fn execution_modes_agree(d in 1u32..=3, gap in 0.3f64..12.0) {
        let q = BoundQuery::from_gap(d, gap).unwrap();
        let seq = Settings { exec: Execution::Sequential, ..Settings::default() };
        let par = Settings { exec: Execution::Parallel, ..Settings::default() };
        let a = bounds::best_lower_with(&q, &seq).unwrap();
        let b = bounds::best_lower_with(&q, &par).unwrap();
        prop_assert_eq!(a.value, b.value);
        prop_assert_eq!(a.kind, b.kind);
    }
}

#[test]
fn small_gap_follows_boundary_law() {
    for d in 1..=4 {
        let mut last = f64::INFINITY;
        for gap in [1e-2, 1e-3, 1e-4] {
            let q = BoundQuery::from_gap(d, gap).unwrap();
            let k = bounds::k_plus(&q).unwrap().value;
            let err = rel(k, bounds::k_plus_asymp_small(&q));
            assert!(err < last, "d={d} gap={gap}: {err}");
            last = err;
        }
        assert!(last < 0.05, "d={d}: {last}");
    }
}
