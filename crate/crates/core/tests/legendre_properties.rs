//! Legendre-machinery invariants across the closed-form families.

use specinv_core::grid::log_grid;
use specinv_core::kinetic::{self, StateLabel};
use specinv_core::models::{self, PotentialShape};

/// r²·K(r) is constant for every pure power and the log shape: the
/// K-function computed through the curve maximization must reproduce the
/// inverse-square form with tiny relative spread.
#[test]
fn kfunction_power_form_has_constant_r_squared_k() {
    let shapes: Vec<(String, PotentialShape)> = vec![
        ("q=-1".into(), PotentialShape::coulomb()),
        ("q=-0.5".into(), PotentialShape::power(-0.5).unwrap()),
        ("q=1".into(), PotentialShape::power(1.0).unwrap()),
        ("q=2".into(), PotentialShape::power(2.0).unwrap()),
        ("log".into(), PotentialShape::log()),
    ];
    let r_grid = log_grid(0.3, 3.0, 21).unwrap();
    for (name, shape) in shapes {
        let curve = models::exact_spectral_curve(&shape, 1, 0).unwrap();
        let k = kinetic::kfunction_from_curve(&curve, &shape, &r_grid).unwrap();
        let values: Vec<f64> = r_grid.iter().map(|&r| k.value(r).unwrap() * r * r).collect();
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        let spread = values
            .iter()
            .map(|v| (v - mean).abs() / mean)
            .fold(0.0f64, f64::max);
        assert!(spread < 1e-5, "{name}: r²K spread {spread:.2e} (mean {mean})");

        // and the constant agrees with the exact P² where closed forms exist
        let exact = models::exact_kfunction(&shape, 1, 0).unwrap();
        let p2 = exact.value(1.0).unwrap();
        assert!(
            (mean - p2).abs() < 1e-6 * p2,
            "{name}: r²K = {mean} vs P² = {p2}"
        );
    }
}

/// Scaling law: replacing f by A f(r/b) + B and K by K(r/b)/b² maps the
/// energy minimization onto the scaled system exactly.
#[test]
fn energy_from_kfunction_respects_the_scaling_law() {
    let (a, b, big_b) = (1.7, 0.6, -0.4);
    let base = PotentialShape::hulthen();
    let scaled = models::scale_shift(&base, a, b, big_b).unwrap();

    // K of the base system, sampled through its curve.
    let curve = models::exact_spectral_curve(&base, 1, 0).unwrap();
    let r_grid = log_grid(0.05, 30.0, 200).unwrap();
    let k_base = kinetic::kfunction_from_curve(&curve, &base, &r_grid).unwrap();

    // K'(r) = K(r/b)/b² tabulated on the stretched grid.
    let r_scaled: Vec<f64> = r_grid.iter().map(|&r| r * b).collect();
    let k_vals: Vec<f64> = r_grid
        .iter()
        .map(|&r| k_base.value(r).unwrap() / (b * b))
        .collect();
    let k_scaled = kinetic::KFunction::from_samples(&r_scaled, &k_vals).unwrap();

    for v in [2.0, 4.0] {
        // E_scaled(v) = F_base(A b² v)/b² + B v per the coupling transform.
        let expect = curve.value(a * b * b * v).unwrap() / (b * b) + big_b * v;
        let got = kinetic::energy_from_kfunction(&k_scaled, &scaled, v).unwrap();
        assert!(
            (got - expect).abs() < 1e-5 * expect.abs().max(1.0),
            "v={v}: {got} vs {expect}"
        );
    }
}

/// The envelope coupling-parameter form is exact for affine g and matches
/// the tangential-family bound for the three Coulomb-plus transformations.
#[test]
fn coupling_form_matches_envelope_bound_for_benchmark_family() {
    use specinv_core::envelope::{self, EnvelopeBasis};
    let basis = EnvelopeBasis::coulomb(1, 0).unwrap();
    let grid = log_grid(0.02, 50.0, 160).unwrap();
    for w in [
        models::WKind::Linear,
        models::WKind::Oscillator,
        models::WKind::Log,
    ] {
        let f = PotentialShape::coulomb_plus(w, 1.0, 0.5).unwrap();
        let profile = envelope::build_transformation(&f, &basis.shape_h, &grid).unwrap();
        let v_grid = [1.0, 5.0, 20.0];
        let approx = kinetic::curve_from_coupling_form(&basis.curve_h, &profile, &v_grid).unwrap();
        for &v in &v_grid {
            let bound = envelope::envelope_bound(&profile, &basis, v).unwrap();
            let other = approx.value(v).unwrap();
            assert!(
                (bound.value - other).abs() <= 1e-8 * other.abs().max(1.0),
                "{w:?} v={v}: {} vs {other}",
                bound.value
            );
        }
    }
}

/// P(q) is monotone increasing in q at fixed state labels; the q = -0.5,
/// 1 and log entries come from the numerical solver.
#[test]
fn p_coefficient_is_monotone_in_the_exponent() {
    let state = StateLabel::new(1, 0);
    let mut values = Vec::new();
    for q in [-1.0, -0.5, 1.0, 2.0] {
        let shape = if q == -1.0 {
            PotentialShape::coulomb()
        } else {
            PotentialShape::power(q).unwrap()
        };
        let k = models::exact_kfunction(&shape, state.n, state.ell).unwrap();
        let p = k.value(1.0).unwrap().sqrt();
        values.push((q, p));
    }
    let k_log = models::exact_kfunction(&PotentialShape::log(), 1, 0).unwrap();
    let p_log = k_log.value(1.0).unwrap().sqrt();
    values.insert(2, (0.0, p_log));

    for pair in values.windows(2) {
        assert!(
            pair[1].1 > pair[0].1,
            "P not increasing: P({}) = {} vs P({}) = {}",
            pair[0].0,
            pair[0].1,
            pair[1].0,
            pair[1].1
        );
    }
    // anchor the closed-form endpoints
    assert!((values[0].1 - 1.0).abs() < 1e-10, "P(-1) = {}", values[0].1);
    assert!(
        (values.last().unwrap().1 - 1.5).abs() < 1e-10,
        "P(2) = {}",
        values.last().unwrap().1
    );
}
