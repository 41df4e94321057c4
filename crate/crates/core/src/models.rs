//! Closed-form potential shapes, their exact spectral curves, kinetic
//! potentials, and K-functions.
//!
//! These serve three roles at once: seeds for the inversion iteration,
//! targets whose curves are inverted, and oracles for the numerical
//! solver. Shapes are immutable after construction and all operations are
//! pure.

use crate::error::{Error, Result};
use crate::interp::Pchip;
use crate::kinetic::{CurveForm, KFunction, KpForm, KineticPotential, SpectralCurve, StateLabel};

/// The confining term `w(r)` of the Coulomb-plus family `-a/r + b w(r)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum WKind {
    /// `w(r) = r`
    Linear,
    /// `w(r) = r²`
    Oscillator,
    /// `w(r) = ln r`
    Log,
}

impl WKind {
    fn eval(self, r: f64) -> f64 {
        match self {
            WKind::Linear => r,
            WKind::Oscillator => r * r,
            WKind::Log => r.ln(),
        }
    }

    fn deriv(self, r: f64) -> f64 {
        match self {
            WKind::Linear => 1.0,
            WKind::Oscillator => 2.0 * r,
            WKind::Log => 1.0 / r,
        }
    }
}

/// Origin/tail classification of a shape.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum Singularity {
    /// `r·f(r)` has a negative finite limit at the origin (or f is
    /// unbounded below there no faster than 1/r).
    Coulombic,
    /// `f(0⁺)` finite.
    Bounded,
    /// `f(r) → ∞` with bounded origin behavior.
    Confining,
}

/// A tabulated shape: monotone cubic interpolation of `(r, f)` pairs in
/// the `ln r` coordinate, with the fitted Coulomb tail `c/r + d` below the
/// first node and linear continuation of the last segment above the last.
#[derive(Debug, Clone)]
pub struct TabulatedShape {
    r: Vec<f64>,
    f: Vec<f64>,
    interp: Pchip,
    extrapolate: bool,
    coul_c: f64,
    coul_d: f64,
    tail_slope: f64,
}

impl TabulatedShape {
    pub fn new(r: Vec<f64>, f: Vec<f64>, extrapolate: bool) -> Result<Self> {
        if r.len() < 4 || r.len() != f.len() {
            return Err(Error::domain(
                "tabulated shape needs >= 4 matching (r, f) pairs",
            ));
        }
        if r[0] <= 0.0 || r.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::domain(
                "tabulated r values must be strictly increasing and positive",
            ));
        }
        let scale = f.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
        if f.windows(2).any(|w| w[1] < w[0] - 1e-9 * scale) {
            return Err(Error::InvariantViolation(
                "tabulated shape is not monotone non-decreasing".into(),
            ));
        }
        if !(r[0] * f[0]).is_finite() {
            return Err(Error::InvariantViolation(
                "r·f(r) must stay finite toward the origin".into(),
            ));
        }
        let x: Vec<f64> = r.iter().map(|v| v.ln()).collect();
        let interp = Pchip::new(x, f.clone())?;
        // Coulomb tail c/r + d through the two smallest nodes.
        let coul_c = (f[0] - f[1]) / (1.0 / r[0] - 1.0 / r[1]);
        let coul_d = f[0] - coul_c / r[0];
        let n = r.len();
        let tail_slope = (f[n - 1] - f[n - 2]) / (r[n - 1] - r[n - 2]);
        Ok(TabulatedShape {
            r,
            f,
            interp,
            extrapolate,
            coul_c,
            coul_d,
            tail_slope,
        })
    }

    pub fn nodes(&self) -> (&[f64], &[f64]) {
        (&self.r, &self.f)
    }

    pub fn range(&self) -> (f64, f64) {
        (self.r[0], self.r[self.r.len() - 1])
    }

    fn eval(&self, r: f64) -> Result<f64> {
        let n = self.r.len();
        if r < self.r[0] {
            if !self.extrapolate {
                return Err(Error::range(format!(
                    "r={r} below tabulated range start {} and extrapolation disabled",
                    self.r[0]
                )));
            }
            return Ok(self.coul_c / r + self.coul_d);
        }
        if r > self.r[n - 1] {
            if !self.extrapolate {
                return Err(Error::range(format!(
                    "r={r} above tabulated range end {} and extrapolation disabled",
                    self.r[n - 1]
                )));
            }
            return Ok(self.f[n - 1] + self.tail_slope * (r - self.r[n - 1]));
        }
        Ok(self.interp.eval(r.ln()))
    }

    fn deriv(&self, r: f64) -> Result<f64> {
        let n = self.r.len();
        if r < self.r[0] {
            if !self.extrapolate {
                return Err(Error::range("below tabulated range"));
            }
            return Ok(-self.coul_c / (r * r));
        }
        if r > self.r[n - 1] {
            if !self.extrapolate {
                return Err(Error::range("above tabulated range"));
            }
            return Ok(self.tail_slope);
        }
        Ok(self.interp.deriv(r.ln()) / r)
    }
}

/// Evaluable radial shape `f(r)`, analytic or tabulated.
#[derive(Debug, Clone)]
pub enum PotentialShape {
    /// `f(r) = -1/r`
    Coulomb,
    /// `f(r) = sgn(q) r^q`, `q > -2`, `q ≠ 0`
    Power { q: f64 },
    /// `f(r) = ln r`
    Log,
    /// `f(r) = -1/(e^r - 1)`
    Hulthen,
    /// `f(r) = -a/r + b w(r)`, `a, b > 0`
    CoulombPlus { w: WKind, a: f64, b: f64 },
    /// `amp · f(r/stretch) + shift`
    Scaled {
        base: Box<PotentialShape>,
        amp: f64,
        stretch: f64,
        shift: f64,
    },
    Tabulated(TabulatedShape),
}

impl PotentialShape {
    pub fn coulomb() -> Self {
        PotentialShape::Coulomb
    }

    pub fn power(q: f64) -> Result<Self> {
        if !(q > -2.0) || q == 0.0 || !q.is_finite() {
            return Err(Error::domain(format!(
                "power exponent must satisfy q > -2, q != 0, got {q}"
            )));
        }
        Ok(PotentialShape::Power { q })
    }

    pub fn log() -> Self {
        PotentialShape::Log
    }

    pub fn hulthen() -> Self {
        PotentialShape::Hulthen
    }

    pub fn coulomb_plus(w: WKind, a: f64, b: f64) -> Result<Self> {
        if !(a > 0.0 && b > 0.0) {
            return Err(Error::domain(format!(
                "coulomb_plus needs a > 0 and b > 0, got a={a}, b={b}"
            )));
        }
        Ok(PotentialShape::CoulombPlus { w, a, b })
    }

    pub fn tabulated(r: Vec<f64>, f: Vec<f64>, extrapolate: bool) -> Result<Self> {
        Ok(PotentialShape::Tabulated(TabulatedShape::new(r, f, extrapolate)?))
    }

    /// Shape derivative `f'(r)`; exact for analytic kinds.
    pub fn derivative_at(&self, r: f64) -> Result<f64> {
        if r <= 0.0 {
            return Err(Error::domain(format!("shape derivative needs r > 0, got {r}")));
        }
        match self {
            PotentialShape::Coulomb => Ok(1.0 / (r * r)),
            PotentialShape::Power { q } => Ok(q.signum() * q * r.powf(q - 1.0)),
            PotentialShape::Log => Ok(1.0 / r),
            PotentialShape::Hulthen => {
                let e = r.exp();
                Ok(e / ((e - 1.0) * (e - 1.0)))
            }
            PotentialShape::CoulombPlus { w, a, b } => Ok(a / (r * r) + b * w.deriv(r)),
            PotentialShape::Scaled {
                base,
                amp,
                stretch,
                ..
            } => Ok(amp / stretch * base.derivative_at(r / stretch)?),
            PotentialShape::Tabulated(t) => t.deriv(r),
        }
    }

    /// `true` if the shape grows without bound at large r.
    pub fn confining_tail(&self) -> bool {
        match self {
            PotentialShape::Coulomb | PotentialShape::Hulthen => false,
            PotentialShape::Power { q } => *q > 0.0,
            PotentialShape::Log => true,
            PotentialShape::CoulombPlus { .. } => true,
            PotentialShape::Scaled { base, .. } => base.confining_tail(),
            PotentialShape::Tabulated(t) => t.extrapolate && t.tail_slope > 1e-12,
        }
    }

    /// `true` for long-range attractive tails (approach to the large-r
    /// limit slower than r⁻²), which bind at every positive coupling.
    pub fn long_range_tail(&self) -> bool {
        match self {
            PotentialShape::Coulomb => true,
            PotentialShape::Power { q } => *q < 0.0,
            PotentialShape::Log | PotentialShape::Hulthen => false,
            PotentialShape::CoulombPlus { .. } => false,
            PotentialShape::Scaled { base, .. } => base.long_range_tail(),
            // linear continuation beyond the table is either confining or
            // exactly constant, never long-range
            PotentialShape::Tabulated(_) => false,
        }
    }

    /// Large-r limit for non-confining shapes.
    pub fn tail_limit(&self) -> Option<f64> {
        if self.confining_tail() {
            return None;
        }
        match self {
            PotentialShape::Coulomb | PotentialShape::Hulthen => Some(0.0),
            PotentialShape::Power { q } if *q < 0.0 => Some(0.0),
            PotentialShape::Scaled {
                base, amp, shift, ..
            } => base.tail_limit().map(|l| amp * l + shift),
            PotentialShape::Tabulated(t) => Some(t.f[t.f.len() - 1]),
            _ => None,
        }
    }

    /// Strength of the origin singularity: `lim_{r→0} r·f(r)`.
    pub fn origin_coulomb_strength(&self) -> f64 {
        match self {
            PotentialShape::Coulomb => -1.0,
            PotentialShape::Hulthen => -1.0,
            PotentialShape::Power { .. } | PotentialShape::Log => 0.0,
            PotentialShape::CoulombPlus { a, .. } => -a,
            PotentialShape::Scaled {
                base, amp, stretch, ..
            } => amp * stretch * base.origin_coulomb_strength(),
            PotentialShape::Tabulated(t) => {
                if t.extrapolate {
                    t.coul_c
                } else {
                    t.r[0] * t.f[0]
                }
            }
        }
    }

    pub fn singularity(&self) -> Singularity {
        if self.origin_coulomb_strength().abs() > 1e-10 {
            Singularity::Coulombic
        } else if self.confining_tail() {
            Singularity::Confining
        } else {
            Singularity::Bounded
        }
    }

    /// Short text form used in artifact metadata.
    pub fn describe(&self) -> String {
        match self {
            PotentialShape::Coulomb => "coulomb".into(),
            PotentialShape::Power { q } => format!("power q={q}"),
            PotentialShape::Log => "log".into(),
            PotentialShape::Hulthen => "hulthen".into(),
            PotentialShape::CoulombPlus { w, a, b } => {
                let wname = match w {
                    WKind::Linear => "linear",
                    WKind::Oscillator => "oscillator",
                    WKind::Log => "log",
                };
                format!("coulomb_plus {wname} a={a} b={b}")
            }
            PotentialShape::Scaled {
                base,
                amp,
                stretch,
                shift,
            } => format!("scaled({amp}, {stretch}, {shift}) of {}", base.describe()),
            PotentialShape::Tabulated(t) => {
                format!("tabulated[{} nodes on [{}, {}]]", t.r.len(), t.r[0], t.r[t.r.len() - 1])
            }
        }
    }
}

/// Evaluate `f(r)`; exact for analytic kinds, interpolated for tabulated.
pub fn eval_shape(shape: &PotentialShape, r: f64) -> Result<f64> {
    if r <= 0.0 || !r.is_finite() {
        return Err(Error::domain(format!("shape evaluation needs r > 0, got {r}")));
    }
    match shape {
        PotentialShape::Coulomb => Ok(-1.0 / r),
        PotentialShape::Power { q } => Ok(q.signum() * r.powf(*q)),
        PotentialShape::Log => Ok(r.ln()),
        PotentialShape::Hulthen => {
            // -1/(e^r - 1) = -e^{-r}/(1 - e^{-r}), stable for large r.
            let em = (-r).exp();
            Ok(-em / (1.0 - em))
        }
        PotentialShape::CoulombPlus { w, a, b } => Ok(-a / r + b * w.eval(r)),
        PotentialShape::Scaled {
            base,
            amp,
            stretch,
            shift,
        } => Ok(amp * eval_shape(base, r / stretch)? + shift),
        PotentialShape::Tabulated(t) => t.eval(r),
    }
}

/// Scale and shift: returns the shape `A·f(r/b) + B`.
///
/// Its kinetic potential transforms to `A f̄(b² s) + B` and its K-function
/// to `K(r/b)/b²`; for pure powers and the log shape the K-function is
/// invariant under the whole family.
pub fn scale_shift(shape: &PotentialShape, a: f64, b: f64, big_b: f64) -> Result<PotentialShape> {
    if !(a > 0.0 && b > 0.0) || !a.is_finite() || !b.is_finite() || !big_b.is_finite() {
        return Err(Error::domain(format!(
            "scale_shift needs A > 0, b > 0, finite B; got A={a}, b={b}, B={big_b}"
        )));
    }
    Ok(match shape {
        // Compose nested transforms instead of stacking wrappers.
        PotentialShape::Scaled {
            base,
            amp,
            stretch,
            shift,
        } => PotentialShape::Scaled {
            base: base.clone(),
            amp: a * amp,
            stretch: b * stretch,
            shift: a * shift + big_b,
        },
        other => PotentialShape::Scaled {
            base: Box::new(other.clone()),
            amp: a,
            stretch: b,
            shift: big_b,
        },
    })
}

/// Closed-form unit-coupling eigenvalue `E_{nℓ}(q)` where one exists.
pub fn power_energy_closed_form(q: f64, n: u32, ell: u32) -> Option<f64> {
    let (nf, lf) = (n as f64, ell as f64);
    if q == -1.0 {
        Some(-1.0 / (4.0 * (nf + lf) * (nf + lf)))
    } else if q == 2.0 {
        Some(4.0 * nf + 2.0 * lf - 1.0)
    } else {
        None
    }
}

/// The `P_{nℓ}(q)` coefficient from the unit-coupling eigenvalue:
/// `P = |E|^{(2+q)/(2q)} (2/(2+q))^{1/q} |q/(2+q)|^{1/2}`.
pub fn p_from_energy(q: f64, e_unit: f64) -> Result<f64> {
    if !(q > -2.0) || q == 0.0 {
        return Err(Error::domain(format!("P(q) needs q > -2, q != 0, got {q}")));
    }
    Ok(e_unit.abs().powf((2.0 + q) / (2.0 * q))
        * (2.0 / (2.0 + q)).powf(1.0 / q)
        * (q / (2.0 + q)).abs().sqrt())
}

/// `P_{nℓ}(0)` accommodating the log potential: `P² = e^{2E_L - 1}/2`.
pub fn p_log_from_energy(e_log: f64) -> f64 {
    ((2.0 * e_log - 1.0).exp() / 2.0).sqrt()
}

/// Spectral constants of one pure-power state.
#[derive(Debug, Clone, Copy)]
pub struct PowerSpectralConstants {
    pub q: f64,
    pub n: u32,
    pub ell: u32,
    pub e_nl: f64,
    pub p_nl: f64,
}

impl PowerSpectralConstants {
    pub fn from_energy(q: f64, n: u32, ell: u32, e_nl: f64) -> Result<Self> {
        if n < 1 {
            return Err(Error::domain("radial index n must be >= 1"));
        }
        let p_nl = p_from_energy(q, e_nl)?;
        if !(p_nl > 0.0) {
            return Err(Error::InvariantViolation(format!(
                "P_nl must be positive, got {p_nl}"
            )));
        }
        Ok(PowerSpectralConstants { q, n, ell, e_nl, p_nl })
    }

    /// Constants from the closed-form energies, where they exist.
    pub fn closed_form(q: f64, n: u32, ell: u32) -> Option<Self> {
        let e = power_energy_closed_form(q, n, ell)?;
        PowerSpectralConstants::from_energy(q, n, ell, e).ok()
    }
}

fn unit_energy(shape: &PotentialShape, n: u32, ell: u32) -> Result<f64> {
    let problem = crate::solver::RadialProblem::new(shape.clone(), 1.0, n, ell);
    Ok(crate::solver::solve_state(&problem)?.energy)
}

/// Exact spectral curve `F(v)` for shapes with closed forms.
///
/// Hulthén is s-wave only; power and log need the unit-coupling eigenvalue
/// `E_{nℓ}`, which is taken from the closed forms for `q ∈ {-1, 2}` and
/// from the numerical solver otherwise.
pub fn exact_spectral_curve(shape: &PotentialShape, n: u32, ell: u32) -> Result<SpectralCurve> {
    if n < 1 {
        return Err(Error::domain("radial index n must be >= 1"));
    }
    let state = StateLabel::new(n, ell);
    match shape {
        PotentialShape::Hulthen => {
            if ell != 0 {
                return Err(Error::UnsupportedModel(
                    "the Hulthén closed form covers s-states only; use the solver for ell > 0"
                        .into(),
                ));
            }
            Ok(SpectralCurve::analytic(
                CurveForm::Hulthen { n },
                state,
                (n * n) as f64,
            ))
        }
        PotentialShape::Coulomb => Ok(SpectralCurve::analytic(
            CurveForm::Power {
                q: -1.0,
                e_unit: power_energy_closed_form(-1.0, n, ell).unwrap(),
            },
            state,
            0.0,
        )),
        PotentialShape::Power { q } => {
            let e_unit = match power_energy_closed_form(*q, n, ell) {
                Some(e) => e,
                None => unit_energy(shape, n, ell)?,
            };
            Ok(SpectralCurve::analytic(
                CurveForm::Power { q: *q, e_unit },
                state,
                0.0,
            ))
        }
        PotentialShape::Log => {
            let e_log = unit_energy(shape, n, ell)?;
            Ok(SpectralCurve::analytic(CurveForm::Log { e_log }, state, 0.0))
        }
        PotentialShape::Scaled {
            base,
            amp,
            stretch,
            shift,
        } => {
            let inner = exact_spectral_curve(base, n, ell)?;
            let coupling_scale = amp * stretch * stretch;
            let form = CurveForm::Transformed {
                base: Box::new(curve_form_of(&inner)?),
                coupling_scale,
                energy_scale: 1.0 / (stretch * stretch),
                slope: *shift,
            };
            let v1 = inner.v_min() / coupling_scale;
            Ok(SpectralCurve::analytic(form, state, v1))
        }
        other => Err(Error::UnsupportedModel(format!(
            "no closed-form spectral curve for {}",
            other.describe()
        ))),
    }
}

fn curve_form_of(curve: &SpectralCurve) -> Result<CurveForm> {
    // Analytic curves only; sampled forms cannot be re-wrapped exactly.
    match curve.samples() {
        Some(_) => Err(Error::UnsupportedModel(
            "cannot transform a sampled curve analytically".into(),
        )),
        None => Ok(curve.form_internal().clone()),
    }
}

/// Exact kinetic potential for power/log shapes (Coulomb is q = -1).
pub fn exact_kinetic_potential(
    shape: &PotentialShape,
    n: u32,
    ell: u32,
) -> Result<KineticPotential> {
    match shape {
        PotentialShape::Hulthen => {
            if ell != 0 {
                return Err(Error::UnsupportedModel("Hulthén kinetic potential is s-wave only".into()));
            }
            Ok(KineticPotential::analytic(KpForm::Hulthen { n }))
        }
        PotentialShape::Coulomb => Ok(KineticPotential::analytic(KpForm::Power {
            q: -1.0,
            e_unit: power_energy_closed_form(-1.0, n, ell).unwrap(),
        })),
        PotentialShape::Power { q } => {
            let e_unit = match power_energy_closed_form(*q, n, ell) {
                Some(e) => e,
                None => unit_energy(shape, n, ell)?,
            };
            Ok(KineticPotential::analytic(KpForm::Power { q: *q, e_unit }))
        }
        PotentialShape::Log => {
            let e_log = unit_energy(shape, n, ell)?;
            Ok(KineticPotential::analytic(KpForm::Log { e_log }))
        }
        other => Err(Error::UnsupportedModel(format!(
            "no closed-form kinetic potential for {}",
            other.describe()
        ))),
    }
}

/// Exact K-function `K(r) = P²_{nℓ}/r²` for power and log shapes.
pub fn exact_kfunction(shape: &PotentialShape, n: u32, ell: u32) -> Result<KFunction> {
    match shape {
        PotentialShape::Coulomb => {
            let p = (n + ell) as f64;
            Ok(KFunction::InverseSquare { p_squared: p * p })
        }
        PotentialShape::Power { q } => {
            let e_unit = match power_energy_closed_form(*q, n, ell) {
                Some(e) => e,
                None => unit_energy(shape, n, ell)?,
            };
            let p = p_from_energy(*q, e_unit)?;
            Ok(KFunction::InverseSquare { p_squared: p * p })
        }
        PotentialShape::Log => {
            let e_log = unit_energy(shape, n, ell)?;
            let p = p_log_from_energy(e_log);
            Ok(KFunction::InverseSquare { p_squared: p * p })
        }
        // K-functions of pure powers and the log shape are completely
        // invariant under scale-and-shift transformations.
        PotentialShape::Scaled { base, .. } => match **base {
            PotentialShape::Coulomb | PotentialShape::Power { .. } | PotentialShape::Log => {
                exact_kfunction(base, n, ell)
            }
            _ => Err(Error::UnsupportedModel(
                "no closed-form K-function for scaled non-power shapes".into(),
            )),
        },
        other => Err(Error::UnsupportedModel(format!(
            "no closed-form K-function for {}",
            other.describe()
        ))),
    }
}

/// Read a tabulated shape from a two-column CSV with header `r,f`.
pub fn read_shape_csv(path: &std::path::Path, extrapolate: bool) -> Result<PotentialShape> {
    let cols = crate::io::read_csv(path, &["r", "f"])?;
    PotentialShape::tabulated(cols[0].clone(), cols[1].clone(), extrapolate)
}

/// Write `(r, f)` pairs as a two-column CSV with header `r,f`.
pub fn write_shape_csv(
    path: &std::path::Path,
    meta: &crate::io::ArtifactMeta,
    r: &[f64],
    f: &[f64],
) -> Result<()> {
    let rows: Vec<[f64; 2]> = r.iter().zip(f.iter()).map(|(a, b)| [*a, *b]).collect();
    crate::io::write_csv(path, meta, &["r", "f"], rows.iter().map(|row| row.as_slice()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn coulomb_at_two_is_minus_half() {
        let f = eval_shape(&PotentialShape::coulomb(), 2.0).unwrap();
        assert_eq!(f, -0.5);
    }

    #[test]
    fn hulthen_origin_behaves_like_coulomb() {
        let shape = PotentialShape::hulthen();
        let r = 1e-8;
        let rf = r * eval_shape(&shape, r).unwrap();
        assert!((rf + 1.0).abs() < 1e-6, "r f(r) = {rf}");
        assert_eq!(shape.singularity(), Singularity::Coulombic);
    }

    #[test]
    fn power_two_at_three_is_nine() {
        let shape = PotentialShape::power(2.0).unwrap();
        assert_eq!(eval_shape(&shape, 3.0).unwrap(), 9.0);
    }

    #[test]
    fn eval_rejects_nonpositive_radius() {
        assert!(eval_shape(&PotentialShape::coulomb(), 0.0).is_err());
        assert!(eval_shape(&PotentialShape::coulomb(), -1.0).is_err());
    }

    #[test]
    fn power_constructor_rejects_bad_exponents() {
        assert!(PotentialShape::power(-2.0).is_err());
        assert!(PotentialShape::power(-2.5).is_err());
        assert!(PotentialShape::power(0.0).is_err());
        assert!(PotentialShape::power(1.0).is_ok());
    }

    #[test]
    fn hulthen_curve_matches_closed_form() {
        let c = exact_spectral_curve(&PotentialShape::hulthen(), 1, 0).unwrap();
        assert!((c.value(4.0).unwrap() + 2.25).abs() < 1e-14);
        assert!(c.value(0.5).is_err(), "below critical coupling");
        assert!(exact_spectral_curve(&PotentialShape::hulthen(), 1, 1).is_err());
    }

    #[test]
    fn coulomb_and_oscillator_unit_energies() {
        let c = exact_spectral_curve(&PotentialShape::coulomb(), 1, 0).unwrap();
        assert!((c.value(1.0).unwrap() + 0.25).abs() < 1e-14);
        let o = exact_spectral_curve(&PotentialShape::power(2.0).unwrap(), 1, 0).unwrap();
        assert!((o.value(1.0).unwrap() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn kfunction_closed_forms() {
        let k = exact_kfunction(&PotentialShape::coulomb(), 1, 0).unwrap();
        assert!((k.value(2.0).unwrap() - 0.25).abs() < 1e-14);
        let k2 = exact_kfunction(&PotentialShape::power(2.0).unwrap(), 1, 0).unwrap();
        assert!((k2.value(1.0).unwrap() - 2.25).abs() < 1e-12);
    }

    #[test]
    fn p_closed_form_identities_to_twelve_digits() {
        // P(-1) = n + ℓ and P(2) = 2n + ℓ - 1/2 via the energy formula.
        for n in 1..=3u32 {
            for ell in 0..=2u32 {
                let pm1 = PowerSpectralConstants::closed_form(-1.0, n, ell).unwrap();
                let expect = (n + ell) as f64;
                assert!(
                    (pm1.p_nl - expect).abs() < 1e-12 * expect,
                    "P(-1) n={n} ell={ell}: {} vs {expect}",
                    pm1.p_nl
                );
                let p2 = PowerSpectralConstants::closed_form(2.0, n, ell).unwrap();
                let expect2 = 2.0 * n as f64 + ell as f64 - 0.5;
                assert!(
                    (p2.p_nl - expect2).abs() < 1e-12 * expect2,
                    "P(2) n={n} ell={ell}: {} vs {expect2}",
                    p2.p_nl
                );
            }
        }
    }

    #[test]
    fn scale_shift_closed_forms() {
        let c = scale_shift(&PotentialShape::coulomb(), 2.0, 1.0, 0.0).unwrap();
        assert!((eval_shape(&c, 1.0).unwrap() + 2.0).abs() < 1e-15);
        let p = scale_shift(&PotentialShape::power(1.0).unwrap(), 1.0, 2.0, 0.0).unwrap();
        assert!((eval_shape(&p, 1.0).unwrap() - 0.5).abs() < 1e-15);
        // nested transforms compose
        let cc = scale_shift(&c, 3.0, 2.0, 1.0).unwrap();
        assert!((eval_shape(&cc, 1.0).unwrap() - (3.0 * (-2.0 / 0.5) + 1.0)).abs() < 1e-12);
    }

    #[test]
    fn exact_curves_are_concave_in_v() {
        let shapes: Vec<(PotentialShape, u32, u32)> = vec![
            (PotentialShape::hulthen(), 1, 0),
            (PotentialShape::coulomb(), 1, 0),
            (PotentialShape::power(2.0).unwrap(), 2, 1),
        ];
        for (shape, n, ell) in shapes {
            let c = exact_spectral_curve(&shape, n, ell).unwrap();
            let v0 = c.v_min().max(0.1) * 1.3 + 0.5;
            for i in 0..20 {
                let v = v0 * (1.0 + 0.5 * i as f64);
                let h = 1e-3 * v;
                let dd = (c.value(v + h).unwrap() - 2.0 * c.value(v).unwrap()
                    + c.value(v - h).unwrap())
                    / (h * h);
                assert!(dd <= 1e-8, "{}: F'' = {dd} at v={v}", shape.describe());
            }
        }
    }

    #[test]
    fn hulthen_curve_has_coulombic_large_v_asymptotics() {
        for n in [1u32, 2] {
            let c = exact_spectral_curve(&PotentialShape::hulthen(), n, 0).unwrap();
            for v in [1e3, 1e4] {
                let ratio = c.value(v).unwrap() / (v * v);
                let expect = -1.0 / (4.0 * (n * n) as f64);
                assert!(
                    (ratio - expect).abs() < 2e-2 * expect.abs() * (1e4 / v),
                    "n={n} v={v}: {ratio} vs {expect}"
                );
            }
        }
    }

    #[test]
    fn tabulated_shape_interpolates_and_extrapolates() {
        // Tabulate the Coulomb shape itself: the fitted tail must reproduce it.
        let r: Vec<f64> = crate::grid::log_grid(0.1, 10.0, 50).unwrap();
        let f: Vec<f64> = r.iter().map(|x| -1.0 / x).collect();
        let shape = PotentialShape::tabulated(r, f, true).unwrap();
        assert!((eval_shape(&shape, 1.0).unwrap() + 1.0).abs() < 5e-4);
        assert!((eval_shape(&shape, 0.01).unwrap() + 100.0).abs() < 1e-6 * 100.0);
        let no_ext = match &shape {
            PotentialShape::Tabulated(t) => {
                PotentialShape::Tabulated(TabulatedShape::new(t.r.clone(), t.f.clone(), false).unwrap())
            }
            _ => unreachable!(),
        };
        assert!(eval_shape(&no_ext, 0.01).is_err());
        assert!(eval_shape(&no_ext, 20.0).is_err());
    }

    #[test]
    fn shape_csv_round_trip() {
        let dir = std::env::temp_dir().join(format!("specinv-models-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("shape.csv");
        let r: Vec<f64> = crate::grid::log_grid(0.1, 5.0, 24).unwrap();
        let f: Vec<f64> = r.iter().map(|x| -1.0 / x).collect();
        let meta = crate::io::ArtifactMeta::new("0.0.0-test", "csv round trip");
        write_shape_csv(&path, &meta, &r, &f).unwrap();
        let shape = read_shape_csv(&path, true).unwrap();
        for (&ri, &fi) in r.iter().zip(f.iter()) {
            assert!((eval_shape(&shape, ri).unwrap() - fi).abs() < 1e-12);
        }
        let _ = std::fs::remove_dir_all(&dir);
    }

    #[test]
    fn tabulated_rejects_decreasing_values() {
        let r = vec![0.5, 1.0, 2.0, 4.0];
        let f = vec![-1.0, -0.5, -0.8, -0.2];
        assert!(PotentialShape::tabulated(r, f, true).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn kfunction_invariant_under_scale_shift_for_powers(
            a in 0.2f64..5.0,
            b in 0.2f64..5.0,
            big_b in -3.0f64..3.0,
            pick in 0usize..2,
        ) {
            let base = if pick == 0 {
                PotentialShape::coulomb()
            } else {
                PotentialShape::power(2.0).unwrap()
            };
            let scaled = scale_shift(&base, a, b, big_b).unwrap();
            let k0 = exact_kfunction(&base, 1, 0).unwrap();
            let k1 = exact_kfunction(&scaled, 1, 0).unwrap();
            for &r in &[0.3, 1.0, 3.7] {
                let (v0, v1) = (k0.value(r).unwrap(), k1.value(r).unwrap());
                prop_assert!((v0 - v1).abs() <= 1e-12 * v0.abs());
            }
        }
    }
}
