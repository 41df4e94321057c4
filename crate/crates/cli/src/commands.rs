//! Command implementations.

use crate::spec::GridSpec;
use specinv_core::envelope::{self, EnvelopeBasis};
use specinv_core::inversion::{self, InversionConfig, InversionSeed};
use specinv_core::io::{write_csv, write_json, ArtifactMeta};
use specinv_core::kinetic::{self, SpectralCurve};
use specinv_core::models::{self, PotentialShape};
use specinv_core::solver::{self, RadialProblem};
use specinv_core::{Error, Result};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Canonical config string: command plus sorted key=value pairs. Hashing
/// this keeps artifacts traceable and byte-identical across repeat runs.
pub fn meta_for(command: &str, options: &BTreeMap<String, String>) -> ArtifactMeta {
    let mut canon = String::from(command);
    for (k, v) in options {
        canon.push(' ');
        canon.push_str(k);
        canon.push('=');
        canon.push_str(v);
    }
    ArtifactMeta::new(VERSION, &canon)
}

/// The spectral curve of a shape: closed form when one exists, otherwise
/// solver-sampled on the provided grid.
fn curve_of_shape(
    shape: &PotentialShape,
    n: u32,
    ell: u32,
    v_grid: Option<&[f64]>,
) -> Result<SpectralCurve> {
    match models::exact_spectral_curve(shape, n, ell) {
        Ok(c) => Ok(c),
        Err(Error::UnsupportedModel(_)) => {
            let grid = v_grid.ok_or_else(|| {
                Error::Parse(format!(
                    "{} has no closed-form curve; provide --vgrid so it can be solved",
                    shape.describe()
                ))
            })?;
            let v1 = solver::detect_critical_coupling(shape, n, ell)?;
            Ok(solver::spectral_curve(shape, n, ell, grid)?
                .with_critical_coupling(v1)
                .with_tangent_extension(true))
        }
        Err(e) => Err(e),
    }
}

#[derive(serde::Serialize)]
struct SolveRecord<'a> {
    tool_version: &'a str,
    config_hash: &'a str,
    shape: String,
    v: f64,
    n: u32,
    ell: u32,
    #[serde(flatten)]
    solution: specinv_core::EigenSolution,
}

pub fn solve(
    meta: &ArtifactMeta,
    shape: &PotentialShape,
    v: f64,
    n: u32,
    ell: u32,
    out: Option<&Path>,
) -> Result<()> {
    let problem = RadialProblem::new(shape.clone(), v, n, ell);
    let solution = solver::solve_state(&problem)?;
    println!("E = {}", solution.energy);
    println!(
        "nodes = {}  residual = {:.3e}  norm_check = {:.12}  <f> = {}",
        solution.nodes, solution.residual, solution.norm_check, solution.expectation_f
    );
    if let Some(dir) = out {
        let record = SolveRecord {
            tool_version: &meta.version,
            config_hash: &meta.config_hash,
            shape: shape.describe(),
            v,
            n,
            ell,
            solution,
        };
        write_json(&dir.join("solve.json"), &record)?;
    }
    Ok(())
}

pub fn curve(
    meta: &ArtifactMeta,
    shape: &PotentialShape,
    n: u32,
    ell: u32,
    vgrid: &GridSpec,
    out: &Path,
) -> Result<()> {
    let grid = vgrid.build()?;
    let curve = solver::spectral_curve(shape, n, ell, &grid)?;
    let (vs, fs, fps) = curve.samples().expect("solver curves are sampled");
    let rows: Vec<[f64; 3]> = (0..vs.len()).map(|i| [vs[i], fs[i], fps[i]]).collect();
    write_csv(
        &out.join("curve.csv"),
        meta,
        &["v", "F", "Fprime"],
        rows.iter().map(|r| r.as_slice()),
    )?;
    println!(
        "curve.csv: {} points, concave_verified = {}",
        vs.len(),
        curve.concave_verified()
    );
    Ok(())
}

pub fn kinetic(
    meta: &ArtifactMeta,
    shape: &PotentialShape,
    n: u32,
    ell: u32,
    sgrid: &GridSpec,
    vgrid: Option<&GridSpec>,
    out: &Path,
) -> Result<()> {
    let v_grid = vgrid.map(|g| g.build()).transpose()?;
    let curve = curve_of_shape(shape, n, ell, v_grid.as_deref())?;
    let s_grid = sgrid.build()?;
    let kp = kinetic::kinetic_from_curve(&curve, &s_grid)?;
    let (ss, fb) = kp.samples().expect("sampled kinetic potential");
    let rows: Vec<[f64; 2]> = (0..ss.len()).map(|i| [ss[i], fb[i]]).collect();
    write_csv(
        &out.join("kinetic.csv"),
        meta,
        &["s", "fbar"],
        rows.iter().map(|r| r.as_slice()),
    )?;
    println!("kinetic.csv: {} points", ss.len());
    Ok(())
}

pub fn kfun(
    meta: &ArtifactMeta,
    shape: &PotentialShape,
    n: u32,
    ell: u32,
    rgrid: &GridSpec,
    vgrid: Option<&GridSpec>,
    out: &Path,
) -> Result<()> {
    let v_grid = vgrid.map(|g| g.build()).transpose()?;
    let curve = curve_of_shape(shape, n, ell, v_grid.as_deref())?;
    let r_grid = rgrid.build()?;
    let k = kinetic::kfunction_from_curve(&curve, shape, &r_grid)?;
    let rows: Vec<[f64; 2]> = r_grid
        .iter()
        .map(|&r| Ok([r, k.value(r)?]))
        .collect::<Result<Vec<_>>>()?;
    write_csv(
        &out.join("kfun.csv"),
        meta,
        &["r", "K"],
        rows.iter().map(|r| r.as_slice()),
    )?;
    println!("kfun.csv: {} points", rows.len());
    Ok(())
}

#[derive(serde::Serialize)]
struct BoundOut {
    v: f64,
    value: f64,
    kind: envelope::BoundKind,
    basis: String,
    touch_point: f64,
}

#[derive(serde::Serialize)]
struct BoundsFile<'a> {
    tool_version: &'a str,
    config_hash: &'a str,
    shape: String,
    convexity: envelope::ConvexitySign,
    bounds: Vec<BoundOut>,
}

#[allow(clippy::too_many_arguments)]
pub fn bounds(
    meta: &ArtifactMeta,
    shape: &PotentialShape,
    basis_shape: &PotentialShape,
    n: u32,
    ell: u32,
    couplings: &[f64],
    rgrid: &GridSpec,
    out: &Path,
) -> Result<()> {
    let basis = EnvelopeBasis::new(
        basis_shape.clone(),
        models::exact_spectral_curve(basis_shape, n, ell)?,
        models::exact_kfunction(basis_shape, n, ell)?,
    )?;
    let grid = rgrid.build()?;
    let profile = envelope::build_transformation(shape, basis_shape, &grid)?;
    let mut records = Vec::with_capacity(couplings.len());
    for &v in couplings {
        let b = envelope::envelope_bound(&profile, &basis, v)?;
        println!(
            "v = {v}: {} bound {} (touch radius {})",
            match b.kind {
                envelope::BoundKind::Lower => "lower",
                envelope::BoundKind::Upper => "upper",
            },
            b.value,
            b.touch_radius
        );
        records.push(BoundOut {
            v,
            value: b.value,
            kind: b.kind,
            basis: basis_shape.describe(),
            touch_point: b.touch_radius,
        });
    }
    let file = BoundsFile {
        tool_version: &meta.version,
        config_hash: &meta.config_hash,
        shape: shape.describe(),
        convexity: profile.convexity_sign,
        bounds: records,
    };
    write_json(&out.join("bounds.json"), &file)?;
    Ok(())
}

/// Fully-resolved inversion invocation.
pub struct InvertArgs {
    pub target: TargetSpec,
    pub seed: InversionSeed,
    pub n: u32,
    pub ell: u32,
    pub r_window: GridSpec,
    pub v_window: Option<(f64, f64)>,
    pub v_count: usize,
    pub iterations: usize,
    pub tolerance: f64,
    /// shape of the curve being inverted, when known (presets): adds the
    /// goal column to figure.csv
    pub goal: Option<PotentialShape>,
    /// grid for generating a solver target from a goal shape
    pub target_vgrid: Option<GridSpec>,
}

pub enum TargetSpec {
    /// analytic curve of a shape (or solver-sampled via `target_vgrid`)
    Shape(PotentialShape),
    /// sampled curve from a CSV file (`v,F,Fprime`) with its critical coupling
    Csv(PathBuf, f64),
}

pub fn invert(meta: &ArtifactMeta, args: InvertArgs, out: &Path) -> Result<()> {
    let target = match &args.target {
        TargetSpec::Shape(shape) => {
            let vg = args.target_vgrid.as_ref().map(|g| g.build()).transpose()?;
            curve_of_shape(shape, args.n, args.ell, vg.as_deref())?
        }
        TargetSpec::Csv(path, v1) => {
            let cols = specinv_core::io::read_csv(path, &["v", "F", "Fprime"])?;
            SpectralCurve::from_samples(
                cols[0].clone(),
                cols[1].clone(),
                cols[2].clone(),
                kinetic::StateLabel::new(args.n, args.ell),
            )?
            .with_critical_coupling(*v1)
            .with_tangent_extension(true)
        }
    };

    let mut config = InversionConfig::new(target, args.seed, args.n, args.ell);
    config.r_window = (args.r_window.min, args.r_window.max);
    config.r_count = args.r_window.count;
    config.v_window = args.v_window;
    config.v_count = args.v_count;
    config.max_iterations = args.iterations;
    config.tolerance = args.tolerance;

    let run = inversion::run_inversion(&config)?;
    inversion::export_history(out, meta, &config, &run)?;

    // Plot-ready combined table when seed and goal shapes are known.
    if let Some(goal) = &args.goal {
        let shape_at = |state_idx: usize, r: f64| -> Result<f64> {
            models::eval_shape(&run.states[state_idx].shape, r)
        };
        let have3 = run.states.len() > 3;
        let mut rows: Vec<Vec<f64>> = Vec::with_capacity(run.r_grid.len());
        for &r in &run.r_grid {
            let mut row = vec![r, shape_at(0, r)?];
            if run.states.len() > 1 {
                row.push(shape_at(1, r)?);
            }
            if have3 {
                row.push(shape_at(3, r)?);
            }
            row.push(models::eval_shape(goal, r)?);
            rows.push(row);
        }
        let columns: Vec<&str> = match (run.states.len() > 1, have3) {
            (true, true) => vec!["r", "seed", "f1", "f3", "goal"],
            (true, false) => vec!["r", "seed", "f1", "goal"],
            _ => vec!["r", "seed", "goal"],
        };
        write_csv(
            &out.join("figure.csv"),
            meta,
            &columns,
            rows.iter().map(|r| r.as_slice()),
        )?;
    }

    for m in run.metrics() {
        println!(
            "iteration {}: curve_error = {:.6e}{}",
            m.iteration,
            m.curve_error,
            match m.shape_delta {
                Some(d) => format!("  shape_delta = {d:.6e}"),
                None => String::new(),
            }
        );
    }
    println!("outcome: {:?}", run.outcome);
    if run.outcome == inversion::InversionOutcome::Diverged {
        return Err(Error::Domain("inversion diverged".into()));
    }
    Ok(())
}

/// Preset inversion runs reproducing the published figure data
/// (`a = 1`, `b = 1/2` for the Coulomb-plus family).
pub fn preset_invert_args(name: &str) -> Result<InvertArgs> {
    let coulomb_seed = InversionSeed::Shape(PotentialShape::coulomb());
    let base = |target: TargetSpec, goal: PotentialShape, tgrid: Option<GridSpec>| InvertArgs {
        target,
        seed: coulomb_seed.clone(),
        n: 1,
        ell: 0,
        r_window: GridSpec {
            min: 0.05,
            max: 10.0,
            count: 200,
            log: true,
        },
        v_window: None,
        v_count: 24,
        iterations: 3,
        tolerance: 1e-9,
        goal: Some(goal),
        target_vgrid: tgrid,
    };
    let solver_grid = |lo: f64| GridSpec {
        min: lo,
        max: 150.0,
        count: 72,
        log: true,
    };
    match name {
        "hulthen-fig1" => {
            let goal = PotentialShape::hulthen();
            Ok(base(TargetSpec::Shape(goal.clone()), goal, None))
        }
        "coulinear-fig3" => {
            let goal = PotentialShape::coulomb_plus(models::WKind::Linear, 1.0, 0.5)?;
            Ok(base(
                TargetSpec::Shape(goal.clone()),
                goal,
                Some(solver_grid(4e-4)),
            ))
        }
        "couosc-fig4" => {
            let goal = PotentialShape::coulomb_plus(models::WKind::Oscillator, 1.0, 0.5)?;
            Ok(base(
                TargetSpec::Shape(goal.clone()),
                goal,
                Some(solver_grid(1e-5)),
            ))
        }
        "coulog-fig5" => {
            let goal = PotentialShape::coulomb_plus(models::WKind::Log, 1.0, 0.5)?;
            Ok(base(
                TargetSpec::Shape(goal.clone()),
                goal,
                Some(solver_grid(4e-4)),
            ))
        }
        other => Err(Error::Parse(format!(
            "unknown preset {other:?}; available: hulthen-fig1, coulinear-fig3, couosc-fig4, coulog-fig5"
        ))),
    }
}
