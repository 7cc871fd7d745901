use approx::assert_relative_eq;
use proptest::prelude::*;

use super::*;

fn grid_points(r: f64, k: usize) -> Vec<f64> {
    (0..=k).map(|i| r * i as f64 / k as f64).collect()
}

/// Largest jump between neighbouring samples on a fine uniform grid.
fn modulus(o: &OracleSolution, k: usize) -> f64 {
    let u = o.sample(&grid_points(o.params.radius, k));
    u.windows(2).map(|w| (w[1] - w[0]).abs()).fold(0.0, f64::max)
}

#[test]
fn constant_examples() {
    assert_relative_eq!(constant_solution(-1.0, 0.0, 1, 1.0).unwrap(), 1.0, epsilon = 1e-13);
    assert_relative_eq!(constant_solution(1.0, 2.0, 1, 1.0).unwrap(), 1.0, epsilon = 1e-13);
    assert_eq!(constant_solution(2.0, 0.0, 3, 2.0).unwrap(), 0.0);
    assert!(constant_solution(0.0, 1.0, 1, 1.0).is_err());
    assert!(constant_solution(0.5, -1.0, 1, 1.0).is_err());
}

#[test]
fn constant_oracle_respects_datum_side() {
    assert!(constant_solution_oracle(-1.0, 0.0, 1, 1.0, 2.0).is_ok());
    assert!(constant_solution_oracle(-1.0, 0.0, 1, 1.0, 0.5).is_err());
    assert!(constant_solution_oracle(1.0, 2.0, 1, 1.0, 0.5).is_ok());
    assert!(constant_solution_oracle(1.0, 2.0, 1, 1.0, 2.0).is_err());
}

#[test]
fn sublinear_matches_closed_form() {
    let o = sublinear_profile(0.5, 0.0, 1, 1.0, 4.0).unwrap();
    let r = o.params.interface.unwrap();
    assert_relative_eq!(r, 0.75, epsilon = 1e-9);
    assert_relative_eq!(o.eval(0.0), 16.0 / 9.0, max_relative = 1e-8);
    assert_relative_eq!(o.eval(1.0), 4.0, max_relative = 1e-12);
    for rho in [0.76f64, 0.8, 0.9, 0.95, 0.999] {
        let exact = (0.5 + 1.0 - rho).powi(-2);
        assert_relative_eq!(o.eval(rho), exact, max_relative = 1e-8);
    }
    let h = o.eval(r);
    assert!((h - h.sqrt() / r).abs() <= 1e-10);
}

#[test]
fn sublinear_rejects_flat_datum() {
    assert!(sublinear_profile(0.5, 1.0, 1, 1.0, 1.0).is_err());
}

#[test]
fn sublinear_at_threshold_is_constant() {
    // H_N(R) = 1 - 1 = 0: no inner core beyond R
    let o = sublinear_profile(0.5, 0.0, 1, 1.0, 1.0).unwrap();
    assert_eq!(o.params.interface, Some(1.0));
    assert_relative_eq!(o.eval(0.0), 1.0);
}

#[test]
fn sublinear_large_g_tends_to_barrier() {
    for g in [1e2, 1e4, 1e6] {
        let u0 = sublinear_profile(0.5, 0.0, 1, 1.0, g).unwrap().eval(0.0);
        assert_relative_eq!(u0, 4.0 / (1.0 + g.powf(-0.5)).powi(2), max_relative = 1e-7);
    }
}

#[test]
fn sublinear_hn_increasing_where_nonnegative() {
    for (f, dim, g) in [(0.0, 1, 4.0), (0.5, 2, 10.0), (0.2, 3, 50.0)] {
        let o = sublinear_profile(0.5, f, dim, 1.0, g).unwrap();
        let trace = hn_trace(&o);
        // trace runs inward, so H_N must not increase along it
        for w in trace.windows(2) {
            if w[1].1 >= 0.0 {
                assert!(w[1].1 <= w[0].1 + 1e-12 * w[0].1.abs().max(1.0), "{w:?}");
            }
        }
        let r = o.params.interface.unwrap();
        let h = o.eval(r);
        let hn = h - f - h.sqrt() * dim as f64 / r;
        assert!(hn.abs() <= 1e-10 * g.max(1.0), "H_N(r) = {hn}");
    }
}

#[test]
fn barrier_closed_form() {
    let o = barrier_profile(0.5, 0.0, 1, 1.0).unwrap();
    assert_relative_eq!(o.params.interface.unwrap(), 0.5, epsilon = 1e-9);
    assert_relative_eq!(o.eval(0.0), 4.0, max_relative = 1e-8);
    for rho in [0.6, 0.8, 0.99] {
        assert_relative_eq!(o.eval(rho), (1.0 - rho).powi(-2), max_relative = 1e-7);
    }
    assert!(o.eval(1.0).is_infinite());
}

#[test]
fn barrier_monotone_in_source() {
    let lo = barrier_profile(0.5, 0.0, 2, 1.0).unwrap();
    let hi = barrier_profile(0.5, 1.0, 2, 1.0).unwrap();
    for rho in grid_points(0.99, 50) {
        assert!(hi.eval(rho) >= lo.eval(rho) - 1e-9, "rho = {rho}");
    }
}

#[test]
fn barrier_dominates_profiles() {
    let b = barrier_profile(0.5, 0.0, 2, 1.0).unwrap();
    for g in [5.0, 20.0, 200.0] {
        let o = sublinear_profile(0.5, 0.0, 2, 1.0, g).unwrap();
        for rho in grid_points(0.99, 40) {
            assert!(o.eval(rho) <= b.eval(rho) * (1.0 + 1e-8), "G = {g}, rho = {rho}");
        }
    }
}

#[test]
fn barrier_boundary_asymptote() {
    let (m, f) = (0.5, 0.3);
    let o = barrier_profile(m, f, 2, 1.0).unwrap();
    let d = 1e-3;
    let asym = ((1.0 - m) / m * d).powf(1.0 / (m - 1.0));
    assert_relative_eq!(o.eval(1.0 - d), asym, max_relative = 1e-2);
}

#[test]
fn m1_examples() {
    let o = m1_profile(1, 2.0, 1.0).unwrap();
    assert_relative_eq!(o.eval(0.0), (-1f64).exp(), max_relative = 1e-14);
    assert_relative_eq!(o.eval(1.5), (-0.5f64).exp(), max_relative = 1e-14);
    assert_relative_eq!(o.eval(2.0), 1.0, max_relative = 1e-14);
    let o = m1_profile(2, 4.0, 1.0).unwrap();
    assert_relative_eq!(o.eval(0.0), 2.0 * (-2f64).exp(), max_relative = 1e-14);
    assert_eq!(o.eval(2.0 - 1e-15), o.eval(2.0));
    assert!(m1_profile(2, 2.0, 1.0).is_err());
}

#[test]
fn superlinear_examples() {
    assert_eq!(superlinear_constant(2.0, 1, 1.0, 2.0).unwrap().eval(0.3), 2.0);
    assert_eq!(superlinear_constant(2.0, 1, 1.0, 1.0).unwrap().eval(0.3), 1.0);
    assert!(superlinear_constant(2.0, 1, 1.0, 0.5).is_err());
}

#[test]
fn compact_support_examples() {
    let o = compact_support(2.0, 1.0, 0.3).unwrap();
    assert_relative_eq!(o.params.interface.unwrap(), 0.4, epsilon = 1e-14);
    assert_relative_eq!(o.eval(1.0), 0.3, epsilon = 1e-14);
    assert_eq!(o.eval(0.4), 0.0);
    assert_eq!(o.eval(0.2), 0.0);
    assert_relative_eq!(o.eval(0.7), 0.15, epsilon = 1e-14);
    assert!(compact_support(2.0, 1.0, 0.5).is_err());
}

#[test]
fn jump_examples() {
    let o = jump_constant_example(1.0, 1, 1.0, 0.1, 1.2, 1.0).unwrap();
    assert_relative_eq!(o.certificate.lhs, 0.02, epsilon = 1e-14);
    assert_eq!(o.eval(0.05), 1.0);
    assert!(jump_constant_example(1.0, 1, 1.0, 0.99, 3.0, 1.0).is_err());
    assert!(jump_constant_example(1.0, 3, 1.0, 0.5, 1.0, 1.0).is_ok());

    let o = jump_m1_example(3.0, 1.0, 1.0, 2.0).unwrap();
    assert_relative_eq!(o.eval(0.5), 1.5);
    assert_relative_eq!(o.eval(1.0), 1.5);
    assert_relative_eq!(o.eval(2.0), 1.0 + 0.5 * (-1f64).exp(), max_relative = 1e-14);
    assert_relative_eq!(o.params.boundary_flux.unwrap(), -1.18394, epsilon = 1e-5);
    assert!(jump_m1_example(1.2, 1.0, 0.1, 1.0).is_err());
}

#[test]
fn large_g_regimes() {
    let rep = large_g_classify(1.0, 0.0, 1, 2.0, &[1.0, 10.0, 100.0], GSource::Oracle).unwrap();
    assert_eq!(rep.regime, GRegime::Diverging);
    for s in &rep.samples {
        assert_relative_eq!(s.u0, s.g * (-1f64).exp(), max_relative = 1e-14);
    }
    let rep = large_g_classify(-1.0, 0.0, 1, 1.0, &[1.0, 10.0, 1e3], GSource::Oracle).unwrap();
    assert_eq!(rep.regime, GRegime::SaturatingConstant);
    assert!(rep.samples.iter().all(|s| (s.u0 - 1.0).abs() < 1e-12));
    let rep = large_g_classify(0.5, 0.0, 1, 1.0, &[4.0, 100.0, 1e4], GSource::Oracle).unwrap();
    assert_eq!(rep.regime, GRegime::SaturatingBarrier);
    assert_relative_eq!(rep.predicted_limit.unwrap(), 4.0, max_relative = 1e-8);
    assert!(rep.samples.windows(2).all(|w| w[0].u0 < w[1].u0));
    assert!(large_g_classify(0.0, 0.0, 1, 1.0, &[1.0], GSource::Oracle).is_err());
}

#[test]
fn evaluators_continuous_and_nonnegative() {
    let oracles = [
        sublinear_profile(0.5, 0.0, 1, 1.0, 4.0).unwrap(),
        sublinear_profile(0.3, 0.2, 2, 1.5, 30.0).unwrap(),
        m1_profile(1, 2.0, 1.0).unwrap(),
        m1_profile(2, 4.0, 3.0).unwrap(),
        compact_support(2.0, 1.0, 0.3).unwrap(),
        jump_m1_example(3.0, 1.0, 1.0, 2.0).unwrap(),
    ];
    for o in &oracles {
        let u = o.sample(&grid_points(o.params.radius, 4000));
        assert!(u.iter().all(|&v| v >= 0.0), "{:?}", o.kind);
        // a jump keeps the modulus fixed under refinement
        let (coarse, fine) = (modulus(o, 4000), modulus(o, 8000));
        assert!(fine <= 0.75 * coarse + 1e-12, "{:?}: {coarse} -> {fine}", o.kind);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn constant_solves_its_relation(m in prop_oneof![-3.0f64..-0.1, 0.1f64..3.0], f in 0.0f64..5.0, dim in 1u32..4, r in 0.2f64..4.0) {
        let u = constant_solution(m, f, dim, r).unwrap();
        let k = dim as f64 / r;
        let defect = if m < 0.0 { u - f - u.powf(m) * k } else if u == 0.0 { 0.0 } else { u + u.powf(m) * k - f };
        prop_assert!(defect.abs() <= 1e-12 * (1.0 + f + u.abs().powf(m) * k));
    }

    #[test]
    fn sublinear_interface_root(m in 0.2f64..0.9, f in 0.0f64..1.0, dim in 1u32..4, g in 5.0f64..100.0) {
        prop_assume!(g - f - g.powf(m) * dim as f64 > 0.0);
        let o = sublinear_profile(m, f, dim, 1.0, g).unwrap();
        let r = o.params.interface.unwrap();
        let h = o.eval(r);
        let hn = h - f - h.powf(m) * dim as f64 / r;
        prop_assert!(hn.abs() <= 1e-10 * g);
        prop_assert!(o.eval(0.0) <= g);
    }
}
