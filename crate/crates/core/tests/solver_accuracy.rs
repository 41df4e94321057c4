//! Eigensolver accuracy against the closed-form benchmark spectra, plus
//! the Hellmann–Feynman and lower-bound consistency properties.

use specinv_core::models::PotentialShape;
use specinv_core::solver::{self, RadialProblem};

fn solve(shape: &PotentialShape, v: f64, n: u32, ell: u32) -> solver::EigenSolution {
    let p = RadialProblem::new(shape.clone(), v, n, ell);
    solver::solve_state(&p).unwrap_or_else(|e| panic!("solve {} v={v} n={n} l={ell}: {e}", shape.describe()))
}

#[test]
fn hulthen_energies_across_states_and_couplings() {
    let shape = PotentialShape::hulthen();
    let mut worst: f64 = 0.0;
    for n in 1u32..=3 {
        let n2 = (n * n) as f64;
        for mult in [2.0, 5.0, 10.0] {
            let v = mult * n2;
            let exact = -((v - n2) / (2.0 * n as f64)).powi(2);
            let sol = solve(&shape, v, n, 0);
            let rel = ((sol.energy - exact) / exact).abs();
            worst = worst.max(rel);
            assert!(rel <= 1e-6, "n={n} v={v}: E={} exact={exact} rel={rel:.2e}", sol.energy);
            assert_eq!(sol.nodes as u32, n - 1);
        }
    }
    println!("hulthen worst relative error: {worst:.2e}");
}

#[test]
fn coulomb_and_oscillator_families() {
    let coulomb = PotentialShape::coulomb();
    let osc = PotentialShape::power(2.0).unwrap();
    let mut worst: f64 = 0.0;
    for n in 1u32..=3 {
        for ell in 0u32..=2 {
            let e_c = -1.0 / (4.0 * ((n + ell) as f64).powi(2));
            let sol_c = solve(&coulomb, 1.0, n, ell);
            let rel_c = ((sol_c.energy - e_c) / e_c).abs();
            worst = worst.max(rel_c);
            assert!(rel_c <= 1e-6, "coulomb n={n} l={ell}: rel={rel_c:.2e}");

            let e_o = 4.0 * n as f64 + 2.0 * ell as f64 - 1.0;
            let sol_o = solve(&osc, 1.0, n, ell);
            let rel_o = ((sol_o.energy - e_o) / e_o).abs();
            worst = worst.max(rel_o);
            assert!(rel_o <= 1e-6, "oscillator n={n} l={ell}: rel={rel_o:.2e}");
        }
    }
    println!("power-family worst relative error: {worst:.2e}");
}

#[test]
fn hellmann_feynman_derivative_matches_finite_differences() {
    let cases: Vec<(PotentialShape, u32, u32, Vec<f64>)> = vec![
        (PotentialShape::hulthen(), 1, 0, vec![2.0, 6.0]),
        (PotentialShape::coulomb(), 1, 0, vec![1.0, 3.0]),
        (PotentialShape::power(2.0).unwrap(), 2, 1, vec![1.0, 4.0]),
    ];
    for (shape, n, ell, vs) in cases {
        for v in vs {
            let h = 1e-3 * v;
            let sol = solve(&shape, v, n, ell);
            let ep = solve(&shape, v + h, n, ell).energy;
            let em = solve(&shape, v - h, n, ell).energy;
            let fd = (ep - em) / (2.0 * h);
            let rel = ((sol.expectation_f - fd) / fd).abs();
            assert!(
                rel <= 1e-4,
                "{} v={v}: <f>={} fd={fd} rel={rel:.2e}",
                shape.describe(),
                sol.expectation_f
            );
        }
    }
}

#[test]
fn log_shape_curve_satisfies_the_scaling_identity() {
    // F(v) - v F(1) + v ln(v)/2 = 0
    let shape = PotentialShape::log();
    let e1 = solve(&shape, 1.0, 1, 0).energy;
    for v in [0.5, 2.0, 7.0] {
        let e = solve(&shape, v, 1, 0).energy;
        let defect = e - v * e1 + 0.5 * v * v.ln();
        assert!(defect.abs() <= 1e-5, "v={v}: defect {defect:.2e}");
    }
    println!("log-potential E(1) = {e1:.8}");
    assert!(e1 > 1.0 && e1 < 1.1, "ground state of -Δ + ln r should be near 1.04");
}

#[test]
fn lower_bound_sandwiches_every_benchmark() {
    let cases: Vec<(PotentialShape, u32, u32, f64)> = vec![
        (PotentialShape::hulthen(), 1, 0, 4.0),
        (PotentialShape::hulthen(), 2, 0, 12.0),
        (PotentialShape::coulomb(), 1, 0, 2.0),
        (PotentialShape::power(2.0).unwrap(), 1, 0, 1.0),
        (PotentialShape::power(1.0).unwrap(), 1, 0, 1.5),
        (PotentialShape::log(), 1, 0, 1.0),
    ];
    for (shape, n, ell, v) in cases {
        let bound = solver::energy_lower_bound(&shape, v).unwrap();
        let e = solve(&shape, v, n, ell).energy;
        assert!(
            bound <= e + 1e-10,
            "{} v={v}: bound {bound} above energy {e}",
            shape.describe()
        );
    }
}

#[test]
fn spectral_curve_derivative_is_monotone_and_concavity_flagged() {
    let grid: Vec<f64> = specinv_core::grid::log_grid(1.5, 50.0, 16).unwrap();
    let curve = solver::spectral_curve(&PotentialShape::hulthen(), 1, 0, &grid).unwrap();
    assert!(curve.concave_verified());
    let (_, _, fp) = curve.samples().unwrap();
    assert!(fp.windows(2).all(|w| w[1] <= w[0] + 1e-9));
}

#[test]
fn general_power_exponent_through_the_solver() {
    // q = -0.5 and q = 1 have no closed forms; check scaling consistency
    // F(v) = E(q) v^{2/(2+q)} by comparing two couplings.
    for q in [-0.5, 1.0] {
        let shape = PotentialShape::power(q).unwrap();
        let p = 2.0 / (2.0 + q);
        let e1 = solve(&shape, 1.0, 1, 0).energy;
        let e4 = solve(&shape, 4.0, 1, 0).energy;
        let rel = (e4 - e1 * 4f64.powf(p)) / e4;
        assert!(
            rel.abs() <= 2e-6,
            "q={q}: scaling defect {rel:.2e} (E1={e1}, E4={e4})"
        );
    }
}
