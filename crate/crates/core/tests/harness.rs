use proptest::prelude::*;
use spiral_core::harness::io::{decode_pgm, encode_pgm, read_image, write_image};
use spiral_core::harness::{
    make_phantom, rmse_percent, run_experiment, tau_grid, ExperimentConfig, MethodSpec,
};
use spiral_core::Signal;

fn tiny_config() -> ExperimentConfig {
    ExperimentConfig {
        side: 16,
        n_angles: 12,
        n_radial: 16,
        total_counts: 2e4,
        trials: 2,
        tau_points: 2,
        max_iter: 80,
        methods: vec![MethodSpec::tv(true, true), MethodSpec::rdp()],
        ..ExperimentConfig::default()
    }
}

#[test]
fn experiment_outputs_are_reproducible() {
    let config = tiny_config();
    let dir_a = tempfile::tempdir().unwrap();
    let dir_b = tempfile::tempdir().unwrap();
    let a = run_experiment(&config, Some(dir_a.path())).unwrap();
    let b = run_experiment(&config, Some(dir_b.path())).unwrap();

    assert_eq!(a.records.len(), config.trials * config.methods.len());
    assert_eq!(a.runs.len(), a.records.len() * config.tau_points);
    assert!(a
        .records
        .iter()
        .all(|r| r.error.is_none() && r.rmse_percent >= 0.0));

    for file in [
        "summary.csv",
        "runs.csv",
        "truth.pgm",
        "images/trial00_rdp.pgm",
    ] {
        let x = std::fs::read(dir_a.path().join(file)).unwrap();
        let y = std::fs::read(dir_b.path().join(file)).unwrap();
        assert_eq!(x, y, "{file} differs");
    }
    assert_eq!(a.summary_csv(), b.summary_csv());
    let summary = std::fs::read_to_string(dir_a.path().join("summary.csv")).unwrap();
    assert_eq!(summary.lines().count(), a.records.len() + 1);
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir_a.path().join("manifest.json")).unwrap())
            .unwrap();
    assert_eq!(manifest["config"]["seed"], 1);
    assert!(dir_a.path().join("traces").read_dir().unwrap().count() > 0);
}

#[test]
fn experiment_config_json_defaults_missing_fields() {
    let config: ExperimentConfig = serde_json::from_str(r#"{"side": 32, "trials": 3}"#).unwrap();
    assert_eq!(config.side, 32);
    assert_eq!(config.trials, 3);
    assert_eq!(config.total_counts, 2e5);
    assert_eq!(config.methods.len(), 8);
    let round: ExperimentConfig =
        serde_json::from_str(&serde_json::to_string(&config).unwrap()).unwrap();
    assert_eq!(round, config);
}

#[test]
fn tau_grid_is_log_spaced() {
    let g = tau_grid(0.01, 1.0, 3).unwrap();
    assert!(
        (g[0] - 0.01).abs() < 1e-15 && (g[1] - 0.1).abs() < 1e-12 && (g[2] - 1.0).abs() < 1e-12
    );
    assert!(tau_grid(0.0, 1.0, 3).is_err());
}

#[test]
fn phantom_rmse_is_zero_against_itself() {
    let (truth, mu) = make_phantom(32).unwrap();
    assert_eq!(rmse_percent(&truth, &truth).unwrap(), 0.0);
    assert!(mu.values().iter().all(|&v| v >= 0.0));
    let zero = Signal::zeros_like(&truth);
    assert!((rmse_percent(&zero, &truth).unwrap() - 100.0).abs() < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn pgm_roundtrip_within_quantization(values in prop::collection::vec(0.0f64..100.0, 12)) {
        let image = Signal::image(3, 4, values.clone()).unwrap();
        let (bytes, scale) = encode_pgm(&image).unwrap();
        let decoded = decode_pgm(&bytes).unwrap();
        prop_assert_eq!(decoded.shape(), Some((3, 4)));
        let max = values.iter().copied().fold(0.0, f64::max);
        for (d, v) in decoded.values().iter().zip(&values) {
            prop_assert!((d * scale - v).abs() <= max / 65535.0 + 1e-12);
        }
    }

    #[test]
    fn csv_roundtrip_is_exact(values in prop::collection::vec(0.0f64..100.0, 6)) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.csv");
        let image = Signal::image(2, 3, values).unwrap();
        write_image(&path, &image).unwrap();
        prop_assert_eq!(read_image(&path).unwrap(), image);
    }
}
