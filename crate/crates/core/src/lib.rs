//! Coupling-dependent bound-state spectra of radial Schrödinger operators
//! `H = -Δ + v f(r)` and their geometric inversion.
//!
//! The forward direction computes the eigenvalue curve `E = F(v)` for an
//! attractive central potential shape `f(r)`, either from closed forms
//! ([`models`]) or numerically ([`solver`]). The [`kinetic`] module carries
//! the Legendre-transform triangle between `F(v)`, the kinetic potential
//! `f̄(s)`, and the K-function `K(r)`. The [`envelope`] module turns smooth
//! transformations of a soluble basis potential into certified energy
//! bounds, and [`inversion`] runs the functional iteration that
//! reconstructs `f(r)` from a single spectral curve `F(v)`.

pub mod envelope;
pub mod error;
pub mod grid;
pub mod interp;
pub mod inversion;
pub mod io;
pub mod kinetic;
pub mod models;
pub mod search;
pub mod solver;

pub use error::{Error, Result, Side};
pub use kinetic::{KFunction, KineticPotential, SpectralCurve};
pub use models::{PotentialShape, PowerSpectralConstants, WKind};
pub use solver::{EigenSolution, RadialProblem};
