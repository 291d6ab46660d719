use approx::assert_abs_diff_eq;
use ocb_core::rates::{
    check_superposition_inequality, rate_ocb_claimed, rate_ocb_exact, sweep, Modulation,
};
use ocb_core::{gaussian_capacity, mi_bpsk, mi_qpsk, Dims, SweepSpec};
use proptest::prelude::*;

#[test]
fn default_sweep_rows_hold_their_invariants() {
    let rows = sweep(&SweepSpec::default()).unwrap();
    assert_eq!(rows.len(), 60);
    for w in rows.windows(2) {
        assert!(w[1].i_bpsk >= w[0].i_bpsk);
        assert!(w[1].i_qpsk >= w[0].i_qpsk);
    }
    for r in &rows {
        assert_eq!(r.r_j_claimed, r.r_c1_claimed + r.r_c2);
        assert!((r.sum_exact - r.i_qpsk).abs() < 1e-6, "γ {}", r.gamma);
        assert!((0.0..=1.0).contains(&r.i_bpsk));
        assert!((0.0..=2.0).contains(&r.i_qpsk));
        assert!(r.c_gauss_complex >= r.i_qpsk);
        assert!(r.i_qpsk <= gaussian_capacity(r.gamma, Dims::Complex).unwrap() + 1e-6);
        assert!(r.i_v1_exact <= r.i_qpsk.min(1.0) + 1e-6);
        assert!(r.i_v1_exact >= r.i_qpsk - 1.0 - 1e-6);
        assert_eq!(r.i_v2_exact, r.r_c2);
        assert_abs_diff_eq!(
            r.r_j_claimed - r.sum_exact,
            r.r_c1_claimed - r.i_v1_exact,
            epsilon = 1e-12
        );
        assert!((r.i_qpsk - 2.0 * mi_bpsk(r.gamma / 2.0).unwrap()).abs() < 1e-6);
    }
}

#[test]
fn claimed_composite_rate_endpoints() {
    assert_eq!(rate_ocb_claimed(0.0).unwrap(), 0.0);
    assert_abs_diff_eq!(rate_ocb_claimed(1e4).unwrap(), 2.0, epsilon = 1e-6);
    let e = rate_ocb_exact(0.0).unwrap();
    assert_eq!((e.i_v1, e.i_v2, e.sum), (0.0, 0.0, 0.0));
}

#[test]
fn subadditivity_grid() {
    let grid = [0.25, 0.5, 1.0, 2.0, 4.0];
    for m in [Modulation::Bpsk, Modulation::Qpsk] {
        for &e1 in &grid {
            for &e2 in &grid {
                let c = check_superposition_inequality(e1, e2, 1.0, m).unwrap();
                assert!(c.holds, "{m:?} ({e1}, {e2}): {c:?}");
            }
            let zero = check_superposition_inequality(e1, 0.0, 1.0, m).unwrap();
            assert!((zero.lhs - zero.rhs).abs() < 1e-9);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn chain_rule_and_decomposition(gamma in 0.01f64..100.0) {
        let e = rate_ocb_exact(gamma).unwrap();
        let q = mi_qpsk(gamma).unwrap();
        prop_assert!((e.sum - q).abs() < 1e-6);
        prop_assert!((q - 2.0 * mi_bpsk(gamma / 2.0).unwrap()).abs() < 1e-6);
        prop_assert!(e.i_v1 >= 0.0 && e.i_v2 >= 0.0);
    }

    #[test]
    fn superposition_is_strict_and_symmetric(e1 in 0.05f64..8.0, e2 in 0.05f64..8.0, s2 in 0.2f64..3.0) {
        let a = check_superposition_inequality(e1, e2, s2, Modulation::Bpsk).unwrap();
        let b = check_superposition_inequality(e2, e1, s2, Modulation::Bpsk).unwrap();
        prop_assert!(a.holds);
        prop_assert_eq!(a, b);
    }
}
