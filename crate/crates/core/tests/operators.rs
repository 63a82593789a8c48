#![allow(clippy::needless_range_loop)]

use proptest::prelude::*;
use spiral_core::operators::{
    build_tomography, DenseMatrix, LinearMap, OrthoBasis, StackedDifference, WaveletFamily,
};
use spiral_core::Signal;
use spiral_oracles::{haar_analysis_matrix, haar_analysis_matrix_2d};

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn adjoint_gap(map: &dyn LinearMap, x: &[f64], y: &[f64]) -> f64 {
    let lhs = dot(&map.apply(x).unwrap(), y);
    let rhs = dot(x, &map.apply_adjoint(y).unwrap());
    (lhs - rhs).abs() / lhs.abs().max(rhs.abs()).max(1e-300)
}

#[test]
fn haar_synthesis_is_transpose_of_reference_analysis() {
    let basis = OrthoBasis::new_1d(WaveletFamily::Haar, 16).unwrap();
    let dense = basis.to_dense().unwrap();
    let reference = haar_analysis_matrix(16);
    for i in 0..16 {
        for j in 0..16 {
            assert!((dense.get(i, j) - reference[j][i]).abs() < 1e-14);
        }
    }
    let basis2 = OrthoBasis::new_2d(WaveletFamily::Haar, 8, 8).unwrap();
    let dense2 = basis2.to_dense().unwrap();
    let reference2 = haar_analysis_matrix_2d(8);
    for i in 0..64 {
        for j in 0..64 {
            assert!((dense2.get(i, j) - reference2[j][i]).abs() < 1e-14);
        }
    }
}

#[test]
fn tomography_entries_are_nonnegative_and_attenuated() {
    let mu = Signal::image(8, 8, vec![0.05; 64]).unwrap();
    let clear = Signal::image(8, 8, vec![0.0; 64]).unwrap();
    let a = build_tomography(8, 8, 6, 135.0, 10, &mu)
        .unwrap()
        .to_dense()
        .unwrap();
    let r = build_tomography(8, 8, 6, 135.0, 10, &clear)
        .unwrap()
        .to_dense()
        .unwrap();
    assert!(a.data().iter().all(|&v| v >= 0.0));
    for (x, y) in a.data().iter().zip(r.data()) {
        assert!(x <= y);
    }
    assert!(r.data().iter().any(|&v| v > 0.0));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn wavelet_roundtrip_and_adjoint(
        (x, y) in (prop::collection::vec(-5.0f64..5.0, 64), prop::collection::vec(-5.0f64..5.0, 64)),
        moments in 1u8..=4,
    ) {
        let basis = OrthoBasis::new_2d(WaveletFamily::Daubechies(moments), 8, 8).unwrap();
        let back = basis.synthesis(&basis.analysis(&x).unwrap()).unwrap();
        for (a, b) in back.iter().zip(&x) {
            prop_assert!((a - b).abs() < 1e-10);
        }
        prop_assert!(adjoint_gap(&basis, &x, &y) < 1e-10);
    }

    #[test]
    fn dense_and_difference_adjoints(
        data in prop::collection::vec(-1.0f64..1.0, 35),
        x in prop::collection::vec(-1.0f64..1.0, 7),
        y in prop::collection::vec(-1.0f64..1.0, 5),
        img in prop::collection::vec(-1.0f64..1.0, 36),
        grad in prop::collection::vec(-1.0f64..1.0, 60),
    ) {
        let a = DenseMatrix::new(5, 7, data).unwrap();
        prop_assert!(adjoint_gap(&a, &x, &y) < 1e-12);
        let d = StackedDifference::new(6, 6);
        prop_assert_eq!(d.rows(), 60);
        prop_assert!(adjoint_gap(&d, &img, &grad) < 1e-12);
    }

    #[test]
    fn tomography_adjoint(
        x in prop::collection::vec(0.0f64..1.0, 64),
        seed in 0u64..1000,
    ) {
        let mu = Signal::image(8, 8, (0..64).map(|i| ((i as u64 * 31 + seed) % 7) as f64 * 0.01).collect()).unwrap();
        let tomo = build_tomography(8, 8, 9, 135.0, 12, &mu).unwrap();
        let y: Vec<f64> = (0..tomo.rows()).map(|i| ((i as u64 * 17 + seed) % 11) as f64 - 5.0).collect();
        prop_assert!(adjoint_gap(&tomo, &x, &y) < 1e-10);
    }
}
