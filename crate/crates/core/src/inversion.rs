//! Functional inversion of a spectral curve back to its potential shape.
//!
//! One step of the iteration, starting from the current approximation
//! `f⁽ᵏ⁾` with its own curve `F⁽ᵏ⁾`:
//!
//! ```text
//! K⁽ᵏ⁾(r)   = max_{u>v₁} [F⁽ᵏ⁾(u) - u f⁽ᵏ⁾(r)]
//! f⁽ᵏ⁺¹⁾(r) = max_{v>v₁} [F(v)/v - K⁽ᵏ⁾(r)/v]
//! ```
//!
//! with `F` the target curve being inverted. Both maximizations are
//! concave searches performed pointwise on a fixed log-spaced radial
//! grid; iterate curves come from the eigensolver on a coupling window
//! sized so the maximizers stay interior.

use crate::error::{Error, Result, Side};
use crate::grid::log_grid;
use crate::interp::isotonic_projection;
use crate::io::ArtifactMeta;
use crate::kinetic::{self, KFunction, SpectralCurve};
use crate::models::{eval_shape, PotentialShape};
use crate::solver;

/// Starting point of the iteration: a shape (whose own curve feeds
/// the first K-function) or a K-function directly.
#[derive(Debug, Clone)]
pub enum InversionSeed {
    Shape(PotentialShape),
    KFunction(KFunction),
}

/// Configuration of one inversion run.
#[derive(Debug, Clone)]
pub struct InversionConfig {
    pub target: SpectralCurve,
    pub seed: InversionSeed,
    pub n: u32,
    pub ell: u32,
    /// reconstruction interval (both ends positive)
    pub r_window: (f64, f64),
    pub r_count: usize,
    /// coupling window for curve matching; None = derived from the target
    pub v_window: Option<(f64, f64)>,
    pub v_count: usize,
    pub max_iterations: usize,
    /// relative curve-error threshold that stops the iteration
    pub tolerance: f64,
}

impl InversionConfig {
    pub fn new(target: SpectralCurve, seed: InversionSeed, n: u32, ell: u32) -> Self {
        InversionConfig {
            target,
            seed,
            n,
            ell,
            r_window: (0.05, 10.0),
            r_count: 200,
            v_window: None,
            v_count: 24,
            max_iterations: 8,
            tolerance: 1e-4,
        }
    }
}

/// One iterate of the algorithm.
#[derive(Debug, Clone)]
pub struct InversionState {
    pub iteration: usize,
    /// current shape approximation, tabulated on the r-grid (the seed
    /// keeps its analytic form)
    pub shape: PotentialShape,
    /// the shape's own spectral curve
    pub curve: SpectralCurve,
    /// K-function of this iterate (the input to the next step)
    pub kfun: KFunction,
    /// sup over the matching window of |F⁽ᵏ⁾(v) - F(v)| / |F(v)|
    pub curve_error: f64,
    /// sup-norm distance to the previous iterate on the r-grid
    pub shape_delta: Option<f64>,
    /// whether the monotonicity projection had to fire
    pub projected: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum InversionOutcome {
    Converged,
    MaxIterations,
    Diverged,
}

/// Full run: every iterate retained, plus how it ended.
#[derive(Debug)]
pub struct InversionRun {
    pub states: Vec<InversionState>,
    pub outcome: InversionOutcome,
    pub r_grid: Vec<f64>,
    /// fixed window on which curve errors are measured
    pub metric_grid: Vec<f64>,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct IterationMetrics {
    pub iteration: usize,
    pub curve_error: f64,
    pub shape_delta: Option<f64>,
    pub projected: bool,
    pub curve_points: usize,
}

/// Seed K-function for inverting the excited-state curve `F_n`:
/// `K⁽⁰⁾(r) = (n+ℓ)²/r²`, the Coulomb K-function of the same excitation.
/// With this seed the first Hulthén iterate is the closed form for all n.
pub fn excited_state_seed(n: u32, ell: u32) -> KFunction {
    let p = (n + ell) as f64;
    KFunction::InverseSquare { p_squared: p * p }
}

struct Resolved {
    r_grid: Vec<f64>,
    metric_grid: Vec<f64>,
    metric_lo: f64,
    metric_hi: f64,
    error_floor: f64,
}

fn resolve(config: &InversionConfig) -> Result<Resolved> {
    let (r_lo, r_hi) = config.r_window;
    if !(r_lo > 0.0 && r_hi > r_lo) {
        return Err(Error::domain(format!(
            "bad r_window [{r_lo}, {r_hi}]"
        )));
    }
    if config.tolerance <= 0.0 {
        return Err(Error::domain("tolerance must be positive"));
    }
    let r_grid = log_grid(r_lo, r_hi, config.r_count.max(8))?;

    let v1 = config.target.v_min();
    let (mut lo, mut hi) = config.v_window.unwrap_or({
        let lo = (1.2 * v1).max(v1 + 0.5);
        let hi = if v1 > 0.0 { 50.0 * v1 } else { 100.0 };
        (lo, hi)
    });
    // keep the metric window inside the target's evaluable domain
    let eval_min = config.target.v_eval_min();
    if eval_min > lo {
        lo = eval_min * (1.0 + 1e-9);
    }
    let t_hi = config.target.v_max();
    if t_hi.is_finite() && t_hi < hi {
        hi = t_hi;
    }
    if !(hi > lo) {
        return Err(Error::domain(format!(
            "matching window [{lo}, {hi}] is empty inside the target domain"
        )));
    }
    let metric_grid = shifted_geometric(v1, lo, hi, config.v_count.max(8));

    // A sampled target must reach kinetic energies below what the window
    // demands: s is constant along the tangent continuation, so samples at
    // couplings with s(v) above ~1/r_hi² leave the shape-update
    // maximization unbounded for the outermost radii.
    if let Some((vs, _, _)) = config.target.samples() {
        let v0 = vs[0];
        let s0 = config.target.s_of_v(v0)?;
        let p = (config.n + config.ell) as f64;
        let s_needed = 0.9 * p * p / (r_hi * r_hi);
        if s0 > s_needed {
            return Err(Error::Domain(format!(
                "target curve starts at v={v0} where s(v)={s0:.3e}, but the \
reconstruction window reaches r={r_hi} needing s down to {s_needed:.3e}; \
sample the target at smaller couplings or shrink the window"
            )));
        }
    }

    // relative-error denominator floor: guards the zero crossings of
    // confining-target curves
    let mut mean_abs = 0.0;
    for &v in &metric_grid {
        mean_abs += config.target.value(v)?.abs();
    }
    mean_abs /= metric_grid.len() as f64;
    let error_floor = (1e-2 * mean_abs).max(1e-12);

    Ok(Resolved {
        r_grid,
        metric_grid,
        metric_lo: lo,
        metric_hi: hi,
        error_floor,
    })
}

/// Geometric grid in the shifted coordinate `v - v₁`.
fn shifted_geometric(v1: f64, lo: f64, hi: f64, count: usize) -> Vec<f64> {
    let a = lo - v1;
    let b = hi - v1;
    let mut out = Vec::with_capacity(count);
    for i in 0..count {
        let t = i as f64 / (count - 1) as f64;
        out.push(v1 + a * (b / a).powf(t));
    }
    out[0] = lo;
    out[count - 1] = hi;
    out
}

fn curve_error_of(
    curve: &SpectralCurve,
    target: &SpectralCurve,
    res: &Resolved,
) -> Result<f64> {
    let mut sup: f64 = 0.0;
    for &v in &res.metric_grid {
        let ft = target.value(v)?;
        let err = match curve.value(v) {
            Ok(fk) => (fk - ft).abs() / ft.abs().max(res.error_floor),
            // iterate does not even bind here: count as order-one error
            Err(_) => 1.0,
        };
        sup = sup.max(err);
    }
    Ok(sup)
}

/// Solve the iterate's curve on a window sized so that both Legendre
/// maximizations stay interior: the lower end is probed until
/// `F'(v_lo) > f(r_hi)` (or the threshold floor is reached, beyond which
/// the tangent continuation takes over), the upper end until
/// `F'(v_hi) < f(r_lo)`.
fn iterate_curve(
    shape: &PotentialShape,
    n: u32,
    ell: u32,
    res: &Resolved,
    v_count: usize,
    hi_min: f64,
) -> Result<SpectralCurve> {
    let v1 = solver::detect_critical_coupling(shape, n, ell)?;
    let f_hi = eval_shape(shape, *res.r_grid.last().unwrap())?;
    let f_lo = eval_shape(shape, res.r_grid[0])?;
    let floor_gap = if shape.confining_tail() {
        1e-9
    } else if shape.long_range_tail() {
        // no binding threshold; the floor only caps the solver's outer
        // radius (E ~ u^k vanishes smoothly as u -> 0)
        2e-3
    } else {
        5e-3 * v1.max(1.0)
    };

    let probe = |v: f64| -> Result<f64> {
        let problem = solver::RadialProblem::new(shape.clone(), v, n, ell);
        Ok(solver::solve_state(&problem)?.expectation_f)
    };

    // Bracket the coupling where F'(v) crosses the largest shape value,
    // then overshoot by a factor so the maximizers for the outermost radii
    // sit well inside the sampled window rather than at its edge.
    let mut lo = res.metric_lo.max(v1 + floor_gap);
    for _ in 0..24 {
        if lo - v1 <= floor_gap * 1.01 {
            break;
        }
        match probe(lo) {
            Ok(fp) if fp > f_hi + 1e-3 * f_hi.abs().max(1e-3) => break,
            Ok(_) => lo = v1 + (lo - v1) / 3.0,
            Err(Error::NoBoundState { .. }) => {
                // detected v1 was slightly low; nudge the floor up
                lo = v1 + (lo - v1) * 2.0;
                break;
            }
            Err(e) => return Err(e),
        }
    }
    lo = (v1 + (lo - v1) / 4.0).max(v1 + floor_gap);

    const HI_CAP: f64 = 2e7;
    let mut hi = (res.metric_hi * 1.5).max(hi_min);
    while hi < HI_CAP {
        match probe(hi) {
            Ok(fp) if fp < f_lo - 1e-3 * f_lo.abs().max(1e-3) => break,
            Ok(_) => hi *= 2.0,
            Err(e) => return Err(e),
        }
    }
    hi = (hi * 4.0).min(4.0 * HI_CAP);

    let grid = shifted_geometric(v1, lo, hi, v_count.max(8));
    let curve = solver::spectral_curve(shape, n, ell, &grid)?;
    Ok(curve
        .with_critical_coupling(v1)
        .with_tangent_extension(true))
}

/// `f⁽ᵏ⁺¹⁾(r) = f̄_target(K⁽ᵏ⁾(r))` pointwise on the grid, then the
/// monotone projection if numerics pushed the table out of class.
fn next_shape_values(
    target: &SpectralCurve,
    kfun: &KFunction,
    r_grid: &[f64],
) -> Result<(Vec<f64>, bool)> {
    let mut vals = Vec::with_capacity(r_grid.len());
    for &r in r_grid {
        let s = kfun.value(r)?;
        if !(s > 0.0) {
            return Err(Error::InvariantViolation(format!(
                "K-function produced a non-positive kinetic energy {s} at r={r}"
            )));
        }
        let (fbar, _) = kinetic::kinetic_value(target, s)?;
        vals.push(fbar);
    }
    let scale = vals.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
    let violation = vals
        .windows(2)
        .map(|w| (w[0] - w[1]).max(0.0))
        .fold(0.0f64, f64::max);
    if violation > 1e-6 * scale {
        Ok((isotonic_projection(&vals), true))
    } else if violation > 0.0 {
        Ok((isotonic_projection(&vals), false))
    } else {
        Ok((vals, false))
    }
}

fn state_from_shape(
    shape: PotentialShape,
    iteration: usize,
    prev: Option<&InversionState>,
    projected: bool,
    config: &InversionConfig,
    res: &Resolved,
) -> Result<InversionState> {
    let curve = match crate::models::exact_spectral_curve(&shape, config.n, config.ell) {
        Ok(c) => c,
        Err(Error::UnsupportedModel(_)) => {
            iterate_curve(&shape, config.n, config.ell, res, config.v_count, 0.0).map_err(|e| {
                Error::IterateUnsolvable {
                    iteration,
                    source: Box::new(e),
                }
            })?
        }
        Err(e) => return Err(e),
    };

    // The iterate's own K-function, with one window-widening retry if
    // the maximization touches the sampled upper edge.
    let kfun = match kinetic::kfunction_from_curve(&curve, &shape, &res.r_grid) {
        Ok(k) => k,
        Err(Error::BoundaryMaximum { side: Side::Upper, .. }) if curve.is_sampled() => {
            let hi_min = 4.0 * curve.v_max();
            let wider = iterate_curve(&shape, config.n, config.ell, res, config.v_count, hi_min)
                .map_err(|e| Error::IterateUnsolvable {
                    iteration,
                    source: Box::new(e),
                })?;
            kinetic::kfunction_from_curve(&wider, &shape, &res.r_grid)?
        }
        Err(e) => return Err(e),
    };

    let curve_error = curve_error_of(&curve, &config.target, res)?;
    let shape_delta = match prev {
        Some(p) => {
            let mut sup: f64 = 0.0;
            for &r in &res.r_grid {
                let a = eval_shape(&shape, r)?;
                let b = eval_shape(&p.shape, r)?;
                sup = sup.max((a - b).abs());
            }
            Some(sup)
        }
        None => None,
    };

    Ok(InversionState {
        iteration,
        shape,
        curve,
        kfun,
        curve_error,
        shape_delta,
        projected,
    })
}

/// One step of the inversion: the K-function of the current iterate,
/// then the shape update against the target curve.
pub fn invert_step(state: &InversionState, config: &InversionConfig) -> Result<InversionState> {
    let res = resolve(config)?;
    let (vals, projected) = next_shape_values(&config.target, &state.kfun, &res.r_grid)?;
    let shape = PotentialShape::tabulated(res.r_grid.clone(), vals, true)?;
    state_from_shape(
        shape,
        state.iteration + 1,
        Some(state),
        projected,
        config,
        &res,
    )
}

/// Run the full iteration from the seed.
///
/// Stops when the relative curve error drops below `tolerance`, the
/// iteration budget is exhausted, or the error has increased three times
/// in a row (divergence); the history retains every iterate either way.
pub fn run_inversion(config: &InversionConfig) -> Result<InversionRun> {
    let res = resolve(config)?;
    let mut states: Vec<InversionState> = Vec::new();

    match &config.seed {
        InversionSeed::Shape(shape) => {
            states.push(state_from_shape(shape.clone(), 0, None, false, config, &res)?);
        }
        InversionSeed::KFunction(k) => {
            // The shape update applied to the seed K-function is already
            // the first iterate; it enters the history as iteration 1.
            let (vals, projected) = next_shape_values(&config.target, k, &res.r_grid)?;
            let shape = PotentialShape::tabulated(res.r_grid.clone(), vals, true)?;
            states.push(state_from_shape(shape, 1, None, projected, config, &res)?);
        }
    }

    let outcome = loop {
        let last = states.last().unwrap();
        if last.curve_error <= config.tolerance {
            break InversionOutcome::Converged;
        }
        if states.len() > config.max_iterations {
            break InversionOutcome::MaxIterations;
        }
        let next = invert_step(last, config)?;
        let done = next.curve_error <= config.tolerance;
        states.push(next);
        if done {
            break InversionOutcome::Converged;
        }
        let errors: Vec<f64> = states.iter().map(|s| s.curve_error).collect();
        if divergence_detected(&errors) {
            break InversionOutcome::Diverged;
        }
        if states.len() > config.max_iterations {
            break InversionOutcome::MaxIterations;
        }
    };

    Ok(InversionRun {
        states,
        outcome,
        r_grid: res.r_grid,
        metric_grid: res.metric_grid,
    })
}

/// Divergence rule: the curve error increased over each of the last
/// three steps.
fn divergence_detected(errors: &[f64]) -> bool {
    errors.len() >= 4
        && errors
            .windows(2)
            .rev()
            .take(3)
            .all(|pair| pair[1] > pair[0])
}

impl InversionRun {
    pub fn metrics(&self) -> Vec<IterationMetrics> {
        self.states
            .iter()
            .map(|s| IterationMetrics {
                iteration: s.iteration,
                curve_error: s.curve_error,
                shape_delta: s.shape_delta,
                projected: s.projected,
                curve_points: s.curve.samples().map(|(v, _, _)| v.len()).unwrap_or(0),
            })
            .collect()
    }

    pub fn final_state(&self) -> &InversionState {
        self.states.last().unwrap()
    }
}

#[derive(serde::Serialize)]
struct RunManifest<'a> {
    tool_version: &'a str,
    config_hash: &'a str,
    target: String,
    seed: String,
    n: u32,
    ell: u32,
    r_window: (f64, f64),
    r_count: usize,
    metric_window: (f64, f64),
    v_count: usize,
    tolerance: f64,
    max_iterations: usize,
    outcome: InversionOutcome,
    iterations: Vec<IterationMetrics>,
}

/// Export the run as a directory of CSV tables plus a JSON manifest:
/// one `iterate_k.csv` (`r,f`) and one `curve_k.csv` (`v,F,error`) per
/// iterate, the target curve, and `manifest.json`.
pub fn export_history(
    dir: &std::path::Path,
    meta: &ArtifactMeta,
    config: &InversionConfig,
    run: &InversionRun,
) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    for state in &run.states {
        let k = state.iteration;
        let mut rows: Vec<[f64; 2]> = Vec::with_capacity(run.r_grid.len());
        for &r in &run.r_grid {
            rows.push([r, eval_shape(&state.shape, r)?]);
        }
        crate::io::write_csv(
            &dir.join(format!("iterate_{k:03}.csv")),
            meta,
            &["r", "f"],
            rows.iter().map(|r| r.as_slice()),
        )?;

        let mut crows: Vec<[f64; 3]> = Vec::with_capacity(run.metric_grid.len());
        for &v in &run.metric_grid {
            let ft = config.target.value(v)?;
            let (fk, err) = match state.curve.value(v) {
                Ok(fk) => (fk, (fk - ft).abs() / ft.abs().max(1e-12)),
                Err(_) => (f64::NAN, f64::NAN),
            };
            crows.push([v, fk, err]);
        }
        crate::io::write_csv(
            &dir.join(format!("curve_{k:03}.csv")),
            meta,
            &["v", "F", "error"],
            crows.iter().map(|r| r.as_slice()),
        )?;
    }

    let mut trows: Vec<[f64; 2]> = Vec::with_capacity(run.metric_grid.len());
    for &v in &run.metric_grid {
        trows.push([v, config.target.value(v)?]);
    }
    crate::io::write_csv(
        &dir.join("target.csv"),
        meta,
        &["v", "F"],
        trows.iter().map(|r| r.as_slice()),
    )?;

    let manifest = RunManifest {
        tool_version: &meta.version,
        config_hash: &meta.config_hash,
        target: format!(
            "curve(n={}, ell={}, v1={})",
            config.target.state().n,
            config.target.state().ell,
            config.target.v_min()
        ),
        seed: match &config.seed {
            InversionSeed::Shape(s) => s.describe(),
            InversionSeed::KFunction(KFunction::InverseSquare { p_squared }) => {
                format!("kfunction P^2={p_squared}")
            }
            InversionSeed::KFunction(_) => "kfunction (sampled)".into(),
        },
        n: config.n,
        ell: config.ell,
        r_window: config.r_window,
        r_count: config.r_count,
        metric_window: (run.metric_grid[0], *run.metric_grid.last().unwrap()),
        v_count: config.v_count,
        tolerance: config.tolerance,
        max_iterations: config.max_iterations,
        outcome: run.outcome,
        iterations: run.metrics(),
    };
    crate::io::write_json(&dir.join("manifest.json"), &manifest)
}
