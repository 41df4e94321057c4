//! Inversion-loop invariants beyond the per-step unit tests.

use specinv_core::inversion::{self, InversionConfig, InversionSeed};
use specinv_core::kinetic;
use specinv_core::models::{self, PotentialShape};

/// Every iterate preserves the energy-from-K structure: minimizing
/// K⁽ᵏ⁾(r) + v f⁽ᵏ⁾(r) over r recovers the iterate's own curve.
#[test]
fn one_step_consistency_between_kfunction_and_curve() {
    let target = models::exact_spectral_curve(&PotentialShape::hulthen(), 1, 0).unwrap();
    let mut config = InversionConfig::new(
        target,
        InversionSeed::Shape(PotentialShape::coulomb()),
        1,
        0,
    );
    config.max_iterations = 1;
    config.tolerance = 1e-12;
    let run = inversion::run_inversion(&config).unwrap();
    for state in &run.states {
        for v in [2.0, 5.0, 11.0] {
            let via_k = kinetic::energy_from_kfunction(&state.kfun, &state.shape, v).unwrap();
            let direct = state.curve.value(v).unwrap();
            assert!(
                (via_k - direct).abs() <= 1e-5 * direct.abs().max(1e-3),
                "iteration {} v={v}: {via_k} vs {direct}",
                state.iteration
            );
        }
    }
}

/// Power targets forget the seed: a Coulomb seed and an oscillator seed
/// land on the same second iterate.
#[test]
fn seed_independence_for_power_targets() {
    let target_shape = PotentialShape::power(1.0).unwrap();
    let run_with = |seed: PotentialShape| {
        let target = models::exact_spectral_curve(&target_shape, 1, 0).unwrap();
        let mut config = InversionConfig::new(target, InversionSeed::Shape(seed), 1, 0);
        config.max_iterations = 2;
        config.tolerance = 1e-12;
        config.r_window = (0.02, 25.0);
        config.r_count = 400;
        config.v_count = 96;
        inversion::run_inversion(&config).unwrap()
    };
    let coulomb_run = run_with(PotentialShape::coulomb());
    let osc_run = run_with(PotentialShape::power(2.0).unwrap());
    let mut sup: f64 = 0.0;
    for &r in coulomb_run
        .r_grid
        .iter()
        .filter(|&&r| (0.1..=5.0).contains(&r))
    {
        let a = models::eval_shape(&coulomb_run.final_state().shape, r).unwrap();
        let b = models::eval_shape(&osc_run.final_state().shape, r).unwrap();
        sup = sup.max((a - b).abs());
    }
    assert!(sup < 1e-4, "seeds disagree by {sup:.3e} after two steps");
}

/// An excited-state curve fed in as ground-state data is still a valid
/// concave curve; the iteration converges to its ground-state preimage
/// (uniqueness binds per state, not across states), with the error
/// dropping from the first step on.
#[test]
fn excited_curve_inverted_as_ground_state_still_converges() {
    let target = models::exact_spectral_curve(&PotentialShape::hulthen(), 2, 0).unwrap();
    let mut config = InversionConfig::new(
        target,
        InversionSeed::Shape(PotentialShape::coulomb()),
        1,
        0,
    );
    config.max_iterations = 3;
    config.tolerance = 1e-12;
    config.r_window = (0.05, 5.0);
    config.r_count = 120;
    let run = inversion::run_inversion(&config).unwrap();
    let errors: Vec<f64> = run.metrics().iter().map(|m| m.curve_error).collect();
    for k in 0..errors.len() - 1 {
        assert!(
            errors[k + 1] < errors[k],
            "error not decreasing: {errors:?}"
        );
    }
    assert!(errors.last().unwrap() < &0.05, "errors: {errors:?}");
}

/// Exported history directories carry the iterate tables, the per-iterate
/// curve errors, and the manifest.
#[test]
fn export_writes_complete_history() {
    let target = models::exact_spectral_curve(&PotentialShape::hulthen(), 1, 0).unwrap();
    let mut config = InversionConfig::new(
        target,
        InversionSeed::Shape(PotentialShape::coulomb()),
        1,
        0,
    );
    config.max_iterations = 1;
    config.tolerance = 1e-12;
    config.r_count = 60;
    let run = inversion::run_inversion(&config).unwrap();
    let dir = std::env::temp_dir().join(format!("specinv-export-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    let meta = specinv_core::io::ArtifactMeta::new("0.0.0-test", "export test");
    inversion::export_history(&dir, &meta, &config, &run).unwrap();

    for k in 0..=1 {
        let it = dir.join(format!("iterate_{k:03}.csv"));
        let cv = dir.join(format!("curve_{k:03}.csv"));
        assert!(it.exists(), "{it:?}");
        assert!(cv.exists(), "{cv:?}");
        let cols = specinv_core::io::read_csv(&it, &["r", "f"]).unwrap();
        assert_eq!(cols[0].len(), 60);
    }
    assert!(dir.join("target.csv").exists());
    let manifest = std::fs::read_to_string(dir.join("manifest.json")).unwrap();
    assert!(manifest.contains("\"outcome\""));
    assert!(manifest.contains("\"curve_error\""));
    let _ = std::fs::remove_dir_all(&dir);
}
