//! Command-line front end: forward solving, spectral curves, Legendre
//! transforms, envelope bounds, and geometric spectral inversion, with
//! plot-ready CSV artifacts.

mod commands;
mod spec;

use clap::{Args, Parser, Subcommand};
use commands::{InvertArgs, TargetSpec};
use specinv_core::inversion::InversionSeed;
use specinv_core::{Error, Result};
use std::collections::{BTreeMap, HashMap};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "specinv",
    version,
    about = "Bound-state spectral curves of -Δ + v f(r) and their geometric inversion"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
struct Common {
    /// Plain-text key=value config file; explicit flags win on conflict
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory for artifact files
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one bound state E = F(v) and print the energy
    Solve {
        #[command(flatten)]
        common: Common,
        /// Shape spec, e.g. "hulthen" or "coulomb_plus linear 1 0.5"
        #[arg(long)]
        shape: Option<String>,
        #[arg(long)]
        v: Option<f64>,
        #[arg(long)]
        n: Option<u32>,
        #[arg(long)]
        ell: Option<u32>,
    },
    /// Sample a spectral curve F(v) with Hellmann-Feynman derivatives
    Curve {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        shape: Option<String>,
        #[arg(long)]
        n: Option<u32>,
        #[arg(long)]
        ell: Option<u32>,
        /// Coupling grid min:max:count[:lin|log]
        #[arg(long)]
        vgrid: Option<String>,
    },
    /// Kinetic potential f̄(s) of a shape's curve (Legendre inversion)
    Kinetic {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        shape: Option<String>,
        #[arg(long)]
        n: Option<u32>,
        #[arg(long)]
        ell: Option<u32>,
        #[arg(long)]
        sgrid: Option<String>,
        /// Coupling grid for shapes without closed-form curves
        #[arg(long)]
        vgrid: Option<String>,
    },
    /// K-function K(r) = max_v [F(v) - v f(r)]
    Kfun {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        shape: Option<String>,
        #[arg(long)]
        n: Option<u32>,
        #[arg(long)]
        ell: Option<u32>,
        #[arg(long)]
        rgrid: Option<String>,
        #[arg(long)]
        vgrid: Option<String>,
    },
    /// Envelope energy bounds from a soluble basis potential
    Bounds {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        shape: Option<String>,
        /// Basis shape with known curve and K-function (e.g. "coulomb")
        #[arg(long)]
        basis: Option<String>,
        #[arg(long)]
        n: Option<u32>,
        #[arg(long)]
        ell: Option<u32>,
        /// Comma-separated couplings, e.g. "1,5,20"
        #[arg(long)]
        v: Option<String>,
        /// Radial grid for the transformation profile
        #[arg(long)]
        rgrid: Option<String>,
    },
    /// Reconstruct a potential shape from a spectral curve
    Invert {
        #[command(flatten)]
        common: Common,
        /// Bundled figure reproduction: hulthen-fig1, coulinear-fig3,
        /// couosc-fig4, coulog-fig5
        #[arg(long)]
        preset: Option<String>,
        /// Target curve from a CSV file with header v,F,Fprime
        #[arg(long)]
        target_csv: Option<PathBuf>,
        /// Critical coupling of the CSV target curve
        #[arg(long)]
        v1: Option<f64>,
        /// Target curve from a shape spec (closed form, or solved on
        /// --target-vgrid)
        #[arg(long)]
        target_shape: Option<String>,
        #[arg(long)]
        target_vgrid: Option<String>,
        /// Seed shape spec (default "coulomb")
        #[arg(long)]
        seed: Option<String>,
        /// Seed with the excited-state K-function (n+ell)²/r² instead
        #[arg(long)]
        seed_excited: bool,
        #[arg(long)]
        n: Option<u32>,
        #[arg(long)]
        ell: Option<u32>,
        /// Reconstruction window min:max:count
        #[arg(long)]
        rwindow: Option<String>,
        /// Curve-matching window min:max (count comes from --vcount)
        #[arg(long)]
        vwindow: Option<String>,
        #[arg(long)]
        vcount: Option<usize>,
        #[arg(long)]
        iterations: Option<usize>,
        #[arg(long)]
        tolerance: Option<f64>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            let code = exit_code_for(&err);
            let payload = serde_json::json!({
                "error": {
                    "kind": error_kind(&err),
                    "message": err.to_string(),
                    "exit_code": code,
                }
            });
            eprintln!("{payload}");
            ExitCode::from(code)
        }
    }
}

/// Exit codes: 2 bad input, 3 no bound state, 4 boundary extremum,
/// 5 divergence, 1 anything else.
fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::Domain(msg) if msg.contains("diverged") => 5,
        Error::Domain(_)
        | Error::Range(_)
        | Error::Parse(_)
        | Error::UnsupportedModel(_)
        | Error::Io(_) => 2,
        Error::NoBoundState { .. } | Error::PartialCurve { .. } => 3,
        Error::BoundaryMaximum { .. } | Error::BoundaryMinimum { .. } | Error::UnboundedSearch(_) => 4,
        Error::IterateUnsolvable { source, .. } => exit_code_for(source),
        _ => 1,
    }
}

fn error_kind(err: &Error) -> &'static str {
    match err {
        Error::Domain(_) => "domain",
        Error::Range(_) => "range",
        Error::Parse(_) => "parse",
        Error::UnsupportedModel(_) => "unsupported_model",
        Error::NoBoundState { .. } => "no_bound_state",
        Error::PartialCurve { .. } => "partial_curve",
        Error::BoundaryMaximum { .. } => "boundary_maximum",
        Error::BoundaryMinimum { .. } => "boundary_minimum",
        Error::UnboundedSearch(_) => "unbounded_search",
        Error::NumericalInstability(_) => "numerical_instability",
        Error::IterateUnsolvable { .. } => "iterate_unsolvable",
        Error::InvariantViolation(_) => "invariant_violation",
        Error::NoCertificate(_) => "no_certificate",
        Error::BasisUnsuitable(_) => "basis_unsuitable",
        Error::Tangency(_) => "tangency",
        Error::Io(_) => "io",
    }
}

fn load_config(common: &Common) -> Result<HashMap<String, String>> {
    match &common.config {
        Some(path) => spec::read_config_file(path),
        None => Ok(HashMap::new()),
    }
}

fn out_dir(common: &Common, cfg: &HashMap<String, String>) -> Result<Option<PathBuf>> {
    spec::fill(&common.out, "out", cfg, |s| Ok(PathBuf::from(s)))
}

fn require_out(common: &Common, cfg: &HashMap<String, String>) -> Result<PathBuf> {
    spec::require(out_dir(common, cfg)?, "out")
}

fn parse_u32(s: &str) -> Result<u32> {
    s.parse()
        .map_err(|_| Error::Parse(format!("bad integer: {s:?}")))
}

fn parse_usize(s: &str) -> Result<usize> {
    s.parse()
        .map_err(|_| Error::Parse(format!("bad integer: {s:?}")))
}

fn parse_f64(s: &str) -> Result<f64> {
    s.parse()
        .map_err(|_| Error::Parse(format!("bad number: {s:?}")))
}

fn parse_grid(text: &str) -> Result<spec::GridSpec> {
    spec::GridSpec::parse(text)
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Solve {
            common,
            shape,
            v,
            n,
            ell,
        } => {
            let cfg = load_config(&common)?;
            let shape_text = spec::require(
                spec::fill(&shape, "shape", &cfg, |s| Ok(s.to_string()))?,
                "shape",
            )?;
            let v = spec::require(spec::fill(&v, "v", &cfg, parse_f64)?, "v")?;
            let n = spec::fill(&n, "n", &cfg, parse_u32)?.unwrap_or(1);
            let ell = spec::fill(&ell, "ell", &cfg, parse_u32)?.unwrap_or(0);
            let out = out_dir(&common, &cfg)?;
            let shape = spec::parse_shape(&shape_text)?;
            let mut opts = BTreeMap::new();
            opts.insert("shape".into(), shape_text);
            opts.insert("v".into(), v.to_string());
            opts.insert("n".into(), n.to_string());
            opts.insert("ell".into(), ell.to_string());
            let meta = commands::meta_for("solve", &opts);
            commands::solve(&meta, &shape, v, n, ell, out.as_deref())
        }
        Command::Curve {
            common,
            shape,
            n,
            ell,
            vgrid,
        } => {
            let cfg = load_config(&common)?;
            let shape_text = spec::require(
                spec::fill(&shape, "shape", &cfg, |s| Ok(s.to_string()))?,
                "shape",
            )?;
            let vgrid_text = spec::require(
                spec::fill(&vgrid, "vgrid", &cfg, |s| Ok(s.to_string()))?,
                "vgrid",
            )?;
            let n = spec::fill(&n, "n", &cfg, parse_u32)?.unwrap_or(1);
            let ell = spec::fill(&ell, "ell", &cfg, parse_u32)?.unwrap_or(0);
            let out = require_out(&common, &cfg)?;
            let shape = spec::parse_shape(&shape_text)?;
            let grid = parse_grid(&vgrid_text)?;
            let mut opts = BTreeMap::new();
            opts.insert("shape".into(), shape_text);
            opts.insert("vgrid".into(), vgrid_text);
            opts.insert("n".into(), n.to_string());
            opts.insert("ell".into(), ell.to_string());
            let meta = commands::meta_for("curve", &opts);
            commands::curve(&meta, &shape, n, ell, &grid, &out)
        }
        Command::Kinetic {
            common,
            shape,
            n,
            ell,
            sgrid,
            vgrid,
        } => {
            let cfg = load_config(&common)?;
            let shape_text = spec::require(
                spec::fill(&shape, "shape", &cfg, |s| Ok(s.to_string()))?,
                "shape",
            )?;
            let sgrid_text = spec::require(
                spec::fill(&sgrid, "sgrid", &cfg, |s| Ok(s.to_string()))?,
                "sgrid",
            )?;
            let vgrid_text = spec::fill(&vgrid, "vgrid", &cfg, |s| Ok(s.to_string()))?;
            let n = spec::fill(&n, "n", &cfg, parse_u32)?.unwrap_or(1);
            let ell = spec::fill(&ell, "ell", &cfg, parse_u32)?.unwrap_or(0);
            let out = require_out(&common, &cfg)?;
            let shape = spec::parse_shape(&shape_text)?;
            let sgrid = parse_grid(&sgrid_text)?;
            let vgrid_parsed = vgrid_text.as_deref().map(parse_grid).transpose()?;
            let mut opts = BTreeMap::new();
            opts.insert("shape".into(), shape_text);
            opts.insert("sgrid".into(), sgrid_text);
            if let Some(t) = vgrid_text {
                opts.insert("vgrid".into(), t);
            }
            opts.insert("n".into(), n.to_string());
            opts.insert("ell".into(), ell.to_string());
            let meta = commands::meta_for("kinetic", &opts);
            commands::kinetic(&meta, &shape, n, ell, &sgrid, vgrid_parsed.as_ref(), &out)
        }
        Command::Kfun {
            common,
            shape,
            n,
            ell,
            rgrid,
            vgrid,
        } => {
            let cfg = load_config(&common)?;
            let shape_text = spec::require(
                spec::fill(&shape, "shape", &cfg, |s| Ok(s.to_string()))?,
                "shape",
            )?;
            let rgrid_text = spec::require(
                spec::fill(&rgrid, "rgrid", &cfg, |s| Ok(s.to_string()))?,
                "rgrid",
            )?;
            let vgrid_text = spec::fill(&vgrid, "vgrid", &cfg, |s| Ok(s.to_string()))?;
            let n = spec::fill(&n, "n", &cfg, parse_u32)?.unwrap_or(1);
            let ell = spec::fill(&ell, "ell", &cfg, parse_u32)?.unwrap_or(0);
            let out = require_out(&common, &cfg)?;
            let shape = spec::parse_shape(&shape_text)?;
            let rgrid = parse_grid(&rgrid_text)?;
            let vgrid_parsed = vgrid_text.as_deref().map(parse_grid).transpose()?;
            let mut opts = BTreeMap::new();
            opts.insert("shape".into(), shape_text);
            opts.insert("rgrid".into(), rgrid_text);
            if let Some(t) = vgrid_text {
                opts.insert("vgrid".into(), t);
            }
            opts.insert("n".into(), n.to_string());
            opts.insert("ell".into(), ell.to_string());
            let meta = commands::meta_for("kfun", &opts);
            commands::kfun(&meta, &shape, n, ell, &rgrid, vgrid_parsed.as_ref(), &out)
        }
        Command::Bounds {
            common,
            shape,
            basis,
            n,
            ell,
            v,
            rgrid,
        } => {
            let cfg = load_config(&common)?;
            let shape_text = spec::require(
                spec::fill(&shape, "shape", &cfg, |s| Ok(s.to_string()))?,
                "shape",
            )?;
            let basis_text = spec::fill(&basis, "basis", &cfg, |s| Ok(s.to_string()))?
                .unwrap_or_else(|| "coulomb".to_string());
            let v_text = spec::require(spec::fill(&v, "v", &cfg, |s| Ok(s.to_string()))?, "v")?;
            let rgrid_text = spec::fill(&rgrid, "rgrid", &cfg, |s| Ok(s.to_string()))?
                .unwrap_or_else(|| "0.02:50:160".to_string());
            let n = spec::fill(&n, "n", &cfg, parse_u32)?.unwrap_or(1);
            let ell = spec::fill(&ell, "ell", &cfg, parse_u32)?.unwrap_or(0);
            let out = require_out(&common, &cfg)?;
            let shape = spec::parse_shape(&shape_text)?;
            let basis_shape = spec::parse_shape(&basis_text)?;
            let couplings: Vec<f64> = v_text
                .split(',')
                .map(|t| parse_f64(t.trim()))
                .collect::<Result<_>>()?;
            let rgrid = parse_grid(&rgrid_text)?;
            let mut opts = BTreeMap::new();
            opts.insert("shape".into(), shape_text);
            opts.insert("basis".into(), basis_text);
            opts.insert("v".into(), v_text);
            opts.insert("rgrid".into(), rgrid_text);
            opts.insert("n".into(), n.to_string());
            opts.insert("ell".into(), ell.to_string());
            let meta = commands::meta_for("bounds", &opts);
            commands::bounds(&meta, &shape, &basis_shape, n, ell, &couplings, &rgrid, &out)
        }
        Command::Invert {
            common,
            preset,
            target_csv,
            v1,
            target_shape,
            target_vgrid,
            seed,
            seed_excited,
            n,
            ell,
            rwindow,
            vwindow,
            vcount,
            iterations,
            tolerance,
        } => {
            let cfg = load_config(&common)?;
            let out = require_out(&common, &cfg)?;
            let preset = spec::fill(&preset, "preset", &cfg, |s| Ok(s.to_string()))?;

            let mut opts = BTreeMap::new();
            let mut args = if let Some(name) = &preset {
                opts.insert("preset".into(), name.clone());
                commands::preset_invert_args(name)?
            } else {
                let n = spec::require(spec::fill(&n, "n", &cfg, parse_u32)?, "n")?;
                let ell = spec::fill(&ell, "ell", &cfg, parse_u32)?.unwrap_or(0);
                let target_csv =
                    spec::fill(&target_csv, "target_csv", &cfg, |s| Ok(PathBuf::from(s)))?;
                let target_shape_text =
                    spec::fill(&target_shape, "target_shape", &cfg, |s| Ok(s.to_string()))?;
                let target = match (&target_csv, &target_shape_text) {
                    (Some(path), None) => {
                        let v1 = spec::fill(&v1, "v1", &cfg, parse_f64)?.unwrap_or(0.0);
                        opts.insert("target_csv".into(), path.display().to_string());
                        opts.insert("v1".into(), v1.to_string());
                        TargetSpec::Csv(path.clone(), v1)
                    }
                    (None, Some(text)) => {
                        opts.insert("target_shape".into(), text.clone());
                        TargetSpec::Shape(spec::parse_shape(text)?)
                    }
                    _ => {
                        return Err(Error::Parse(
                            "choose exactly one of --preset, --target-csv, --target-shape".into(),
                        ))
                    }
                };
                let goal = match &target {
                    TargetSpec::Shape(s) => Some(s.clone()),
                    TargetSpec::Csv(..) => None,
                };
                InvertArgs {
                    target,
                    seed: InversionSeed::Shape(specinv_core::models::PotentialShape::coulomb()),
                    n,
                    ell,
                    r_window: spec::GridSpec {
                        min: 0.05,
                        max: 10.0,
                        count: 200,
                        log: true,
                    },
                    v_window: None,
                    v_count: 24,
                    iterations: 3,
                    tolerance: 1e-9,
                    goal,
                    target_vgrid: None,
                }
            };

            if let Some(text) = spec::fill(&seed, "seed", &cfg, |s| Ok(s.to_string()))? {
                opts.insert("seed".into(), text.clone());
                args.seed = InversionSeed::Shape(spec::parse_shape(&text)?);
            }
            let seed_excited =
                seed_excited || cfg.get("seed_excited").map(|v| v == "true").unwrap_or(false);
            if seed_excited {
                opts.insert("seed_excited".into(), "true".into());
                args.seed = InversionSeed::KFunction(specinv_core::inversion::excited_state_seed(
                    args.n, args.ell,
                ));
            }
            if let Some(text) = spec::fill(&rwindow, "rwindow", &cfg, |s| Ok(s.to_string()))? {
                opts.insert("rwindow".into(), text.clone());
                args.r_window = parse_grid(&text)?;
            }
            if let Some(text) = spec::fill(&vwindow, "vwindow", &cfg, |s| Ok(s.to_string()))? {
                opts.insert("vwindow".into(), text.clone());
                let parts: Vec<&str> = text.split(':').collect();
                if parts.len() != 2 {
                    return Err(Error::Parse(format!(
                        "vwindow must be min:max, got {text:?}"
                    )));
                }
                args.v_window = Some((parse_f64(parts[0])?, parse_f64(parts[1])?));
            }
            if let Some(tv) =
                spec::fill(&target_vgrid, "target_vgrid", &cfg, |s| Ok(s.to_string()))?
            {
                opts.insert("target_vgrid".into(), tv.clone());
                args.target_vgrid = Some(parse_grid(&tv)?);
            }
            if let Some(c) = spec::fill(&vcount, "vcount", &cfg, parse_usize)? {
                opts.insert("vcount".into(), c.to_string());
                args.v_count = c;
            }
            if let Some(it) = spec::fill(&iterations, "iterations", &cfg, parse_usize)? {
                opts.insert("iterations".into(), it.to_string());
                args.iterations = it;
            }
            if let Some(tol) = spec::fill(&tolerance, "tolerance", &cfg, parse_f64)? {
                opts.insert("tolerance".into(), tol.to_string());
                args.tolerance = tol;
            }
            opts.insert("n".into(), args.n.to_string());
            opts.insert("ell".into(), args.ell.to_string());

            let meta = commands::meta_for("invert", &opts);
            commands::invert(&meta, args, &out)
        }
    }
}
