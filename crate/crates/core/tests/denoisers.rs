use proptest::prelude::*;
use spiral_core::denoise::{
    denoise_canonical_l1, denoise_l1_dual_observed, denoise_tv, rdp_fit, rdp_ti_fit, rdp_tree,
    tv_objective, ShiftSet, SubConfig,
};
use spiral_core::operators::{LinearMap, OrthoBasis, WaveletFamily};
use spiral_core::Signal;
use spiral_oracles::{canonical_l1_scan, enumerate_rdp};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn canonical_l1_matches_scan(s in prop::collection::vec(-5.0f64..5.0, 1..20), kappa in 0.0f64..3.0) {
        let f = denoise_canonical_l1(&s, kappa).unwrap();
        for (fi, si) in f.iter().zip(&s) {
            prop_assert!(*fi >= 0.0);
            prop_assert!((fi - canonical_l1_scan(*si, kappa)).abs() < 1e-9);
        }
    }

    #[test]
    fn dual_l1_iterates_stay_feasible(s in prop::collection::vec(-3.0f64..3.0, 64), kappa in 0.0f64..2.0) {
        let basis = OrthoBasis::new_2d(WaveletFamily::Daubechies(2), 8, 8).unwrap();
        let mut ok = true;
        let mut last_dual = f64::NEG_INFINITY;
        let mut dual_monotone = true;
        denoise_l1_dual_observed(&s, kappa, &basis, &SubConfig::tight(), None, |sweep| {
            ok &= sweep.f.iter().all(|&v| v >= 0.0);
            ok &= sweep.lambda.iter().all(|&v| v >= 0.0);
            ok &= sweep.gamma.iter().all(|&g| g.abs() <= kappa);
            dual_monotone &= sweep.dual >= last_dual - 1e-9 * sweep.dual.abs().max(1.0);
            last_dual = sweep.dual;
            let wt = basis.apply(sweep.theta).unwrap();
            ok &= wt.iter().zip(sweep.f).all(|(a, b)| (a - b).abs() < 1e-10);
        }).unwrap();
        prop_assert!(ok);
        prop_assert!(dual_monotone);
    }

    #[test]
    fn rdp_matches_enumeration(values in prop::collection::vec(-1.0f64..3.0, 16), kappa in 0.0f64..2.0) {
        let s = Signal::image(4, 4, values.clone()).unwrap();
        let fit = rdp_fit(&s, kappa).unwrap();
        let reference = enumerate_rdp(&values, 4, kappa);
        prop_assert_eq!(fit.cost, reference.cost);
        prop_assert_eq!(fit.estimate.values(), reference.image.as_slice());
        prop_assert_eq!(rdp_tree(&s, kappa).unwrap().optimal_cost(), fit.cost);
    }

    #[test]
    fn tv_beats_projection_and_stays_feasible(values in prop::collection::vec(-1.0f64..3.0, 64), kappa in 0.0f64..2.0) {
        let s = Signal::image(8, 8, values.clone()).unwrap();
        let out = denoise_tv(&s, kappa, &SubConfig::tv_default(), None).unwrap();
        prop_assert!(out.f.is_feasible());
        let proj = s.with_values(values.iter().map(|v| v.max(0.0)).collect()).unwrap();
        prop_assert!(tv_objective(&out.f, &s, kappa).unwrap() <= tv_objective(&proj, &s, kappa).unwrap());
    }
}

#[test]
fn tv_warm_start_is_no_worse() {
    let values: Vec<f64> = (0..256)
        .map(|i| ((i * 13) % 29) as f64 / 7.0 - 0.5)
        .collect();
    let s = Signal::image(16, 16, values).unwrap();
    let cfg = SubConfig::tv_default();
    let cold = denoise_tv(&s, 0.5, &cfg, None).unwrap();
    let warm = denoise_tv(&s, 0.5, &cfg, Some(&cold.dual)).unwrap();
    assert!(warm.iterations <= cold.iterations);
    assert!(
        tv_objective(&warm.f, &s, 0.5).unwrap() <= tv_objective(&cold.f, &s, 0.5).unwrap() + 1e-9
    );
}

#[test]
fn rdp_ti_single_shift_equals_rdp() {
    let values: Vec<f64> = (0..64).map(|i| ((i * 7) % 11) as f64).collect();
    let s = Signal::image(8, 8, values).unwrap();
    let plain = rdp_fit(&s, 1.5).unwrap();
    let ti = rdp_ti_fit(&s, 1.5, &ShiftSet::Explicit(vec![(0, 0)])).unwrap();
    assert_eq!(ti.estimate.values(), plain.estimate.values());
    assert_eq!(ti.mean_cells, plain.partition.len() as f64);
    let full = rdp_ti_fit(&s, 1.5, &ShiftSet::Full).unwrap();
    assert!(full.estimate.is_feasible());
}
