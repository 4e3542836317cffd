use hedgehog::algebra::{
    critical_system, h_star_estimate, int, psi, psi_positive_check, psi_reduce, rat, run_all, varphi, SuiteOptions,
    WVector, G,
};
use proptest::prelude::*;

#[test]
fn default_suite_passes() {
    let rep = run_all(&SuiteOptions::default());
    for r in &rep.results {
        assert!(r.passed, "{} worst margin {:e}", r.name, r.worst_margin);
        assert!(r.worst_margin >= -1e-11);
    }
    assert!(rep.exact.passed, "{:?}", rep.exact);
    assert_eq!(rep.exact.y2_at_one, "-441133354650/60505388947441");
}

#[test]
fn suite_is_reproducible_across_runs() {
    let opts = SuiteOptions { samples: 50_000, seed: 7, ..Default::default() };
    let a = serde_json::to_string(&run_all(&opts).results).unwrap();
    let b = serde_json::to_string(&run_all(&opts).results).unwrap();
    assert_eq!(a, b);
}

#[test]
fn onset_is_stable_under_refinement() {
    let a = h_star_estimate(100, 1e-8);
    let b = h_star_estimate(1000, 1e-8);
    assert!(a.predicate_at_one && b.predicate_at_one);
    assert!((a.h_star - b.h_star).abs() <= 1e-8);
    assert!(b.failing_at_zero.is_empty());
}

#[test]
fn x_branch_discriminant_is_negative_on_rationals() {
    for k in 0..=1000 {
        let d = critical_system(&rat(k, 1000));
        assert!(d.x_branch.excluded, "h = {k}/1000");
        assert!(d.residual_zero);
    }
    assert_eq!(critical_system(&int(1)).x_branch.value, "-72570");
}

proptest! {
    #[test]
    fn reduction_never_increases_psi(w in prop::array::uniform5(-4.0..4.0f64)) {
        let w = WVector::from_array(w);
        prop_assert!(psi(&w) - psi(&psi_reduce(&w)) >= -1e-12);
    }

    #[test]
    fn psi_positivity_bounded_below_by_g(w in prop::array::uniform5(-4.0..4.0f64), h in 0.6667f64..1.0) {
        let w = WVector::from_array(w);
        let v = psi_positive_check(&w, h).unwrap();
        let e = hedgehog::algebra::epsilon(&w);
        prop_assert!(v >= G(e).unwrap() - 1e-10 * (1.0 + v.abs()));
    }

    #[test]
    fn varphi_nonnegative(v in prop::array::uniform3(-3.0..3.0f64), h in 0.0f64..1.0) {
        prop_assert!(varphi(v[0], v[1], v[2], h) >= -1e-12);
    }
}
