//! Spectral curves, kinetic potentials, K-functions, and the Legendre
//! machinery connecting them.
//!
//! For a concave spectral curve `F(v)` the kinetic potential is the
//! Legendre dual reached through `f̄(s) = max_{v>v₁} [F(v) - s]/v`, with
//! the parametric form `s = F(v) - v F'(v)`, `f̄ = F'(v)`. The K-function
//! re-parametrizes the kinetic energy by radius, `K(r) = max_{v>v₁}
//! [F(v) - v f(r)]`, and the energy is recovered from either dual by a
//! final minimization. These four directions plus the coupling-parameter
//! form of the envelope approximation are the operations here.

use crate::error::{Error, Result, Side};
use crate::interp::{Pchip, SampledC1};
use crate::models::PotentialShape;
use crate::search;

/// Quantum state labels: radial index `n >= 1` (node count `n-1`), angular
/// momentum `ell >= 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct StateLabel {
    pub n: u32,
    pub ell: u32,
}

impl StateLabel {
    pub fn new(n: u32, ell: u32) -> Self {
        StateLabel { n, ell }
    }
}

/// Closed-form or sampled representation of one eigenvalue curve `F(v)`.
#[derive(Debug, Clone)]
pub enum CurveForm {
    /// Hulthén s-state: `F_n(v) = -((v - n²)/(2n))²`, `v > n²`.
    Hulthen { n: u32 },
    /// Pure power `sgn(q) r^q`: `F(v) = E_unit · v^{2/(2+q)}`.
    Power { q: f64, e_unit: f64 },
    /// Log shape: `F(v) = v E_L - v ln(v)/2`.
    Log { e_log: f64 },
    /// Curve of `A f(r/b) + B` expressed through the base curve:
    /// `F(v) = energy_scale · F_base(coupling_scale · v) + slope · v`.
    Transformed {
        base: Box<CurveForm>,
        coupling_scale: f64,
        energy_scale: f64,
        slope: f64,
    },
    /// Solver- or transform-generated samples `(v, F, F')`.
    Sampled(SampledC1),
}

/// One spectral curve `v ↦ F(v)` for a fixed quantum state.
#[derive(Debug, Clone)]
pub struct SpectralCurve {
    form: CurveForm,
    state: StateLabel,
    /// Critical coupling: the curve's domain is open at `v₁`.
    v1: f64,
    /// Continue a sampled curve below its first sample with the tangent
    /// line at that sample (the threshold law makes this exact to second
    /// order in the distance to `v₁`). Analytic forms never need it.
    tangent_low: bool,
    concave_verified: bool,
}

impl SpectralCurve {
    pub fn analytic(form: CurveForm, state: StateLabel, v1: f64) -> Self {
        SpectralCurve {
            form,
            state,
            v1,
            tangent_low: false,
            concave_verified: true,
        }
    }

    /// Build a sampled curve from `(v, F, F')` triples (v strictly increasing).
    pub fn from_samples(
        v: Vec<f64>,
        f: Vec<f64>,
        fp: Vec<f64>,
        state: StateLabel,
    ) -> Result<Self> {
        let interp = SampledC1::new(v, f, fp)?;
        let concave = second_divided_differences_nonpositive(interp.x(), interp.y(), 1e-8);
        Ok(SpectralCurve {
            form: CurveForm::Sampled(interp),
            state,
            v1: 0.0,
            tangent_low: false,
            concave_verified: concave,
        })
    }

    pub fn with_critical_coupling(mut self, v1: f64) -> Self {
        self.v1 = v1;
        self
    }

    pub fn with_tangent_extension(mut self, on: bool) -> Self {
        self.tangent_low = on;
        self
    }

    pub fn state(&self) -> StateLabel {
        self.state
    }

    pub fn concave_verified(&self) -> bool {
        self.concave_verified
    }

    /// Critical coupling `v₁` (left, open end of the domain).
    pub fn v_min(&self) -> f64 {
        self.v1
    }

    /// Upper end of the evaluable domain (`∞` for analytic forms).
    pub fn v_max(&self) -> f64 {
        fn of(form: &CurveForm) -> f64 {
            match form {
                CurveForm::Sampled(c) => c.range().1,
                CurveForm::Transformed {
                    base,
                    coupling_scale,
                    ..
                } => of(base) / coupling_scale,
                _ => f64::INFINITY,
            }
        }
        of(&self.form)
    }

    /// Lowest coupling at which the curve can actually be evaluated
    /// (`v₁` itself is excluded; sampled curves without tangent extension
    /// start at their first sample).
    pub fn v_eval_min(&self) -> f64 {
        match &self.form {
            CurveForm::Sampled(c) if !self.tangent_low => c.range().0,
            _ => self.v1,
        }
    }

    pub fn is_sampled(&self) -> bool {
        matches!(self.form, CurveForm::Sampled(_))
    }

    pub fn value(&self, v: f64) -> Result<f64> {
        if v <= self.v1 {
            return Err(Error::domain(format!(
                "coupling v={v} at or below critical coupling v1={}",
                self.v1
            )));
        }
        form_value(&self.form, v, self.tangent_low)
    }

    pub fn derivative(&self, v: f64) -> Result<f64> {
        if v <= self.v1 {
            return Err(Error::domain(format!(
                "coupling v={v} at or below critical coupling v1={}",
                self.v1
            )));
        }
        form_derivative(&self.form, v, self.tangent_low)
    }

    /// Kinetic-energy parameter `s(v) = F(v) - v F'(v)`.
    pub fn s_of_v(&self, v: f64) -> Result<f64> {
        Ok(self.value(v)? - v * self.derivative(v)?)
    }

    /// Samples of the curve, when it is a sampled form.
    pub fn samples(&self) -> Option<(&[f64], &[f64], &[f64])> {
        match &self.form {
            CurveForm::Sampled(c) => Some((c.x(), c.y(), c.yp())),
            _ => None,
        }
    }

    pub(crate) fn form_internal(&self) -> &CurveForm {
        &self.form
    }
}

fn form_value(form: &CurveForm, v: f64, tangent_low: bool) -> Result<f64> {
    match form {
        CurveForm::Hulthen { n } => {
            let n2 = (*n as f64) * (*n as f64);
            let d = (v - n2) / (2.0 * *n as f64);
            Ok(-d * d)
        }
        CurveForm::Power { q, e_unit } => {
            let p = 2.0 / (2.0 + q);
            Ok(e_unit * v.powf(p))
        }
        CurveForm::Log { e_log } => Ok(v * e_log - 0.5 * v * v.ln()),
        CurveForm::Transformed {
            base,
            coupling_scale,
            energy_scale,
            slope,
        } => Ok(energy_scale * form_value(base, coupling_scale * v, tangent_low)? + slope * v),
        CurveForm::Sampled(c) => {
            let (lo, _hi) = c.range();
            if tangent_low && v < lo {
                Ok(c.eval(lo)? + c.deriv(lo)? * (v - lo))
            } else {
                c.eval(v)
            }
        }
    }
}

fn form_derivative(form: &CurveForm, v: f64, tangent_low: bool) -> Result<f64> {
    match form {
        CurveForm::Hulthen { n } => {
            let nn = *n as f64;
            Ok(-(v - nn * nn) / (2.0 * nn * nn))
        }
        CurveForm::Power { q, e_unit } => {
            let p = 2.0 / (2.0 + q);
            Ok(e_unit * p * v.powf(p - 1.0))
        }
        CurveForm::Log { e_log } => Ok(e_log - 0.5 * v.ln() - 0.5),
        CurveForm::Transformed {
            base,
            coupling_scale,
            energy_scale,
            slope,
        } => Ok(energy_scale
            * coupling_scale
            * form_derivative(base, coupling_scale * v, tangent_low)?
            + slope),
        CurveForm::Sampled(c) => {
            let (lo, _hi) = c.range();
            if tangent_low && v < lo {
                c.deriv(lo)
            } else {
                c.deriv(v)
            }
        }
    }
}

pub(crate) fn second_divided_differences_nonpositive(x: &[f64], y: &[f64], tol: f64) -> bool {
    for i in 1..x.len().saturating_sub(1) {
        let left = (y[i] - y[i - 1]) / (x[i] - x[i - 1]);
        let right = (y[i + 1] - y[i]) / (x[i + 1] - x[i]);
        let dd2 = (right - left) / (x[i + 1] - x[i - 1]);
        if dd2 > tol {
            return false;
        }
    }
    true
}

/// Closed-form or sampled kinetic potential `s ↦ f̄(s)`.
#[derive(Debug, Clone)]
pub enum KpForm {
    /// Hulthén s-state: `f̄_n(s) = -[(4s/n² + 1)^{1/2} - 1]/2`.
    Hulthen { n: u32 },
    /// Pure power: `f̄(s) = (2E/(2+q)) (qE/(2+q))^{q/2} s^{-q/2}`.
    Power { q: f64, e_unit: f64 },
    /// Log shape: `f̄(s) = E_L - ln(2es)/2`.
    Log { e_log: f64 },
    /// Kinetic potential of `A f(r/b) + B`: `A f̄_base(b² s) + B`.
    Transformed {
        base: Box<KpForm>,
        s_scale: f64,
        value_scale: f64,
        shift: f64,
    },
    /// Samples `(s, f̄, f̄')` from the Legendre maximization.
    Sampled(SampledC1),
}

/// Monotone-decreasing kinetic potential with derivative access.
#[derive(Debug, Clone)]
pub struct KineticPotential {
    form: KpForm,
}

impl KineticPotential {
    pub fn analytic(form: KpForm) -> Self {
        KineticPotential { form }
    }

    pub fn domain(&self) -> (f64, f64) {
        fn dom(form: &KpForm) -> (f64, f64) {
            match form {
                KpForm::Sampled(c) => c.range(),
                KpForm::Transformed { base, s_scale, .. } => {
                    let (lo, hi) = dom(base);
                    (lo / s_scale, hi / s_scale)
                }
                _ => (0.0, f64::INFINITY),
            }
        }
        dom(&self.form)
    }

    pub fn value(&self, s: f64) -> Result<f64> {
        if s <= 0.0 {
            return Err(Error::domain(format!("kinetic potential needs s > 0, got {s}")));
        }
        kp_value(&self.form, s)
    }

    pub fn derivative(&self, s: f64) -> Result<f64> {
        if s <= 0.0 {
            return Err(Error::domain(format!("kinetic potential needs s > 0, got {s}")));
        }
        kp_derivative(&self.form, s)
    }

    pub fn samples(&self) -> Option<(&[f64], &[f64])> {
        match &self.form {
            KpForm::Sampled(c) => Some((c.x(), c.y())),
            _ => None,
        }
    }
}

fn kp_value(form: &KpForm, s: f64) -> Result<f64> {
    match form {
        KpForm::Hulthen { n } => {
            let n2 = (*n as f64) * (*n as f64);
            Ok(-0.5 * ((4.0 * s / n2 + 1.0).sqrt() - 1.0))
        }
        KpForm::Power { q, e_unit } => {
            let c = q * e_unit / (2.0 + q);
            Ok((2.0 * e_unit / (2.0 + q)) * c.powf(q / 2.0) * s.powf(-q / 2.0))
        }
        KpForm::Log { e_log } => Ok(e_log - 0.5 * (2.0 * std::f64::consts::E * s).ln()),
        KpForm::Transformed {
            base,
            s_scale,
            value_scale,
            shift,
        } => Ok(value_scale * kp_value(base, s_scale * s)? + shift),
        KpForm::Sampled(c) => c.eval(s),
    }
}

fn kp_derivative(form: &KpForm, s: f64) -> Result<f64> {
    match form {
        KpForm::Hulthen { n } => {
            let n2 = (*n as f64) * (*n as f64);
            Ok(-1.0 / (n2 * (4.0 * s / n2 + 1.0).sqrt()))
        }
        KpForm::Power { q, .. } => {
            let val = kp_value(form, s)?;
            Ok(-0.5 * q * val / s)
        }
        KpForm::Log { .. } => Ok(-0.5 / s),
        KpForm::Transformed {
            base,
            s_scale,
            value_scale,
            ..
        } => Ok(value_scale * s_scale * kp_derivative(base, s_scale * s)?),
        KpForm::Sampled(c) => c.deriv(s),
    }
}

/// The r-parametrized kinetic energy `K(r) = (f̄⁻¹ ∘ f)(r)`.
#[derive(Debug, Clone)]
pub enum KFunction {
    /// `K(r) = P²/r²` — exact for pure powers and the log shape.
    InverseSquare { p_squared: f64 },
    /// Sampled K values indexed by `ln r` (positive, decreasing).
    Sampled { interp: Pchip },
}

impl KFunction {
    pub fn from_samples(r: &[f64], k: &[f64]) -> Result<Self> {
        let x: Vec<f64> = r.iter().map(|ri| ri.ln()).collect();
        Ok(KFunction::Sampled {
            interp: Pchip::new(x, k.to_vec())?,
        })
    }

    pub fn domain(&self) -> (f64, f64) {
        match self {
            KFunction::InverseSquare { .. } => (0.0, f64::INFINITY),
            KFunction::Sampled { interp } => {
                let xs = interp.x();
                (xs[0].exp(), xs[xs.len() - 1].exp())
            }
        }
    }

    pub fn value(&self, r: f64) -> Result<f64> {
        if r <= 0.0 {
            return Err(Error::domain(format!("K-function needs r > 0, got {r}")));
        }
        match self {
            KFunction::InverseSquare { p_squared } => Ok(p_squared / (r * r)),
            KFunction::Sampled { interp } => {
                let x = r.ln();
                let xs = interp.x();
                if x < xs[0] - 1e-12 || x > xs[xs.len() - 1] + 1e-12 {
                    return Err(Error::range(format!(
                        "r={r} outside sampled K-function domain"
                    )));
                }
                Ok(interp.eval(x))
            }
        }
    }
}

/// Extremum search over a curve domain `(v₁, hi)`, operating in the
/// shifted-log coordinate `t = ln(v - v₁)` so maximizers crowding the
/// critical coupling stay resolvable. Open ends expand geometrically;
/// hitting a closed end reports the boundary.
fn extremize_shifted(
    obj: &dyn Fn(f64) -> Option<f64>,
    anchor: f64,
    lo: f64,
    hi: f64,
    lo_open: bool,
    hi_open: bool,
    maximize: bool,
) -> Result<search::Extremum> {
    if !(hi > lo && lo > anchor) {
        return Err(Error::domain(format!(
            "bad search window [{lo}, {hi}] over anchor {anchor}"
        )));
    }
    let mut t_lo = (lo - anchor).ln();
    let mut t_hi = (hi - anchor).ln();
    const T_FLOOR: f64 = -46.0; // v - v1 ~ 1e-20
    const T_CEIL: f64 = 32.2; // v - v1 ~ 1e14
    let sign = if maximize { -1.0 } else { 1.0 };
    loop {
        let wrapped = |t: f64| match obj(anchor + t.exp()) {
            Some(val) if val.is_finite() => sign * val,
            _ => f64::INFINITY,
        };
        match search::minimize(wrapped, t_lo, t_hi, false, 64) {
            Ok(ext) => {
                return Ok(search::Extremum {
                    x: anchor + ext.x.exp(),
                    value: sign * ext.value,
                })
            }
            Err(Error::BoundaryMinimum {
                side: Side::Lower, ..
            }) if lo_open && t_lo > T_FLOOR => {
                t_lo = (t_lo - 7.0).max(T_FLOOR);
            }
            Err(Error::BoundaryMinimum {
                side: Side::Upper, ..
            }) if hi_open && t_hi < T_CEIL => {
                t_hi = (t_hi + 2.1).min(T_CEIL);
            }
            Err(Error::BoundaryMinimum { side, .. }) => {
                let param = anchor
                    + if side == Side::Lower { t_lo } else { t_hi }.exp();
                return Err(if maximize {
                    Error::BoundaryMaximum { param, side }
                } else {
                    Error::BoundaryMinimum { param, side }
                });
            }
            Err(e) => return Err(e),
        }
    }
}

fn curve_search_window(curve: &SpectralCurve) -> (f64, f64, f64, bool, bool) {
    let anchor = curve.v_min();
    let eval_min = curve.v_eval_min();
    let lo = if eval_min > anchor {
        // closed lower end at the first usable coupling
        eval_min * (1.0 + 1e-12) + 1e-300
    } else {
        anchor + 1e-9 * anchor.max(1.0)
    };
    let hi_limit = curve.v_max();
    let hi = if hi_limit.is_finite() {
        hi_limit
    } else {
        (anchor + 1.0) * 8.0
    };
    let lo_open = eval_min <= anchor;
    let hi_open = !hi_limit.is_finite();
    (anchor, lo, hi, lo_open, hi_open)
}

/// One point of the Legendre inversion: `f̄(s) = max_{v>v₁} [F(v) - s]/v`.
/// Returns the value and the maximizer `v*` (so `f̄'(s) = -1/v*`).
pub fn kinetic_value(curve: &SpectralCurve, s: f64) -> Result<(f64, f64)> {
    if s <= 0.0 {
        return Err(Error::domain(format!("kinetic argument must be positive, got {s}")));
    }
    let (anchor, lo, hi, lo_open, hi_open) = curve_search_window(curve);
    let obj = |v: f64| curve.value(v).ok().map(|f| (f - s) / v);
    let ext = extremize_shifted(&obj, anchor, lo, hi, lo_open, hi_open, true)?;
    Ok((ext.value, ext.x))
}

/// Legendre inversion `f̄(s) = max_{v>v₁} [F(v) - s]/v`, sampled on `s_grid`.
///
/// The maximizer `v*(s)` supplies the derivative `f̄'(s) = -1/v*`.
pub fn kinetic_from_curve(curve: &SpectralCurve, s_grid: &[f64]) -> Result<KineticPotential> {
    if s_grid.len() < 2 || s_grid.windows(2).any(|w| w[1] <= w[0]) || s_grid[0] <= 0.0 {
        return Err(Error::domain(
            "s_grid must be strictly increasing and positive",
        ));
    }
    let mut fbar = Vec::with_capacity(s_grid.len());
    let mut fbar_p = Vec::with_capacity(s_grid.len());
    for &s in s_grid {
        let (val, v_star) = kinetic_value(curve, s)?;
        fbar.push(val);
        fbar_p.push(-1.0 / v_star);
    }
    Ok(KineticPotential {
        form: KpForm::Sampled(SampledC1::new(s_grid.to_vec(), fbar, fbar_p)?),
    })
}

/// Energy recovery `F(v) = min_{s} [s + v f̄(s)]`, sampled on `v_grid`.
///
/// The minimizer supplies `F'(v) = f̄(s*)`.
pub fn curve_from_kinetic(
    kp: &KineticPotential,
    v_grid: &[f64],
    state: StateLabel,
) -> Result<SpectralCurve> {
    if v_grid.len() < 2 || v_grid.windows(2).any(|w| w[1] <= w[0]) || v_grid[0] <= 0.0 {
        return Err(Error::domain(
            "v_grid must be strictly increasing and positive",
        ));
    }
    let (s_lo, s_hi) = kp.domain();
    let open = !s_hi.is_finite();
    let lo = if s_lo > 0.0 {
        s_lo * (1.0 + 1e-12)
    } else {
        1e-9
    };
    let hi = if open { lo.max(1.0) * 64.0 } else { s_hi };
    let mut f = Vec::with_capacity(v_grid.len());
    let mut fp = Vec::with_capacity(v_grid.len());
    for &v in v_grid {
        let obj = |s: f64| kp.value(s).ok().map(|fb| s + v * fb);
        let ext = extremize_shifted(&obj, 0.0, lo, hi, open, open, false)?;
        f.push(ext.value);
        fp.push(kp.value(ext.x)?);
    }
    SpectralCurve::from_samples(v_grid.to_vec(), f, fp, state)
}

/// `K(r) = max_{v>v₁} [F(v) - v f(r)]`, sampled pointwise on `r_grid`.
pub fn kfunction_from_curve(
    curve: &SpectralCurve,
    shape: &PotentialShape,
    r_grid: &[f64],
) -> Result<KFunction> {
    if r_grid.len() < 2 || r_grid.windows(2).any(|w| w[1] <= w[0]) || r_grid[0] <= 0.0 {
        return Err(Error::domain(
            "r_grid must be strictly increasing and positive",
        ));
    }
    let (anchor, lo, hi, lo_open, hi_open) = curve_search_window(curve);
    let mut k = Vec::with_capacity(r_grid.len());
    for &r in r_grid {
        let fr = crate::models::eval_shape(shape, r)?;
        let obj = |v: f64| curve.value(v).ok().map(|fval| fval - v * fr);
        let ext = extremize_shifted(&obj, anchor, lo, hi, lo_open, hi_open, true)?;
        k.push(ext.value);
    }
    KFunction::from_samples(r_grid, &k)
}

/// `F(v) = min_{r} [K(r) + v f(r)]`.
pub fn energy_from_kfunction(k: &KFunction, shape: &PotentialShape, v: f64) -> Result<f64> {
    if v <= 0.0 {
        return Err(Error::domain(format!("coupling must be positive, got {v}")));
    }
    let (r_lo, r_hi) = k.domain();
    let open = !r_hi.is_finite();
    let lo = if r_lo > 0.0 { r_lo * (1.0 + 1e-12) } else { 1e-8 };
    let hi = if open { lo.max(1.0) * 64.0 } else { r_hi };
    let obj = |r: f64| {
        match (k.value(r), crate::models::eval_shape(shape, r)) {
            (Ok(kv), Ok(fv)) => Some(kv + v * fv),
            _ => None,
        }
    };
    let ext = extremize_shifted(&obj, 0.0, lo, hi, open, open, false)?;
    Ok(ext.value)
}

/// A transformation `g` applicable to basis-potential values.
pub trait Transform {
    fn apply(&self, h: f64) -> Result<f64>;
}

impl<F: Fn(f64) -> f64> Transform for F {
    fn apply(&self, h: f64) -> Result<f64> {
        Ok(self(h))
    }
}

/// Envelope approximation with the coupling as minimization parameter:
/// `F(v) ≈ min_u [H(u) - u H'(u) + v g(H'(u))]`, exact for affine `g`.
pub fn curve_from_coupling_form(
    curve_h: &SpectralCurve,
    g: &dyn Transform,
    v_grid: &[f64],
) -> Result<SpectralCurve> {
    if v_grid.len() < 2 || v_grid.windows(2).any(|w| w[1] <= w[0]) || v_grid[0] <= 0.0 {
        return Err(Error::domain(
            "v_grid must be strictly increasing and positive",
        ));
    }
    let (anchor, lo, hi, lo_open, hi_open) = curve_search_window(curve_h);
    let mut f = Vec::with_capacity(v_grid.len());
    let mut fp = Vec::with_capacity(v_grid.len());
    for &v in v_grid {
        let obj = |u: f64| {
            let hval = curve_h.value(u).ok()?;
            let hp = curve_h.derivative(u).ok()?;
            let gv = g.apply(hp).ok()?;
            Some(hval - u * hp + v * gv)
        };
        let ext = extremize_shifted(&obj, anchor, lo, hi, lo_open, hi_open, false)?;
        f.push(ext.value);
        let hp = curve_h.derivative(ext.x)?;
        fp.push(g.apply(hp)?);
    }
    SpectralCurve::from_samples(v_grid.to_vec(), f, fp, curve_h.state())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::log_grid;
    use crate::models;
    use proptest::prelude::*;

    fn hulthen_curve(n: u32) -> SpectralCurve {
        SpectralCurve::analytic(
            CurveForm::Hulthen { n },
            StateLabel::new(n, 0),
            (n * n) as f64,
        )
    }

    fn coulomb_curve() -> SpectralCurve {
        SpectralCurve::analytic(
            CurveForm::Power {
                q: -1.0,
                e_unit: -0.25,
            },
            StateLabel::new(1, 0),
            0.0,
        )
    }

    #[test]
    fn hulthen_kinetic_value_at_s_two_is_minus_one() {
        let curve = hulthen_curve(1);
        let s_grid = log_grid(0.5, 8.0, 33).unwrap();
        let kp = kinetic_from_curve(&curve, &s_grid).unwrap();
        // s = 2 is a grid point of log_grid(0.5, 8, 33).
        let v = kp.value(2.0).unwrap();
        assert!((v + 1.0).abs() < 1e-9, "fbar(2) = {v}");
    }

    #[test]
    fn coulomb_kinetic_is_minus_sqrt_s() {
        let curve = coulomb_curve();
        let s_grid = log_grid(0.2, 5.0, 41).unwrap();
        let kp = kinetic_from_curve(&curve, &s_grid).unwrap();
        for &s in s_grid.iter() {
            let expect = -s.sqrt();
            let got = kp.value(s).unwrap();
            assert!((got - expect).abs() < 1e-9, "s={s}: {got} vs {expect}");
        }
    }

    #[test]
    fn curve_from_kinetic_recovers_coulomb_energy() {
        // fbar(s) = -sqrt(s): at v = 2 the minimum of s + v*fbar is -1 at s = 1.
        let kp = KineticPotential::analytic(KpForm::Power {
            q: -1.0,
            e_unit: -0.25,
        });
        let curve = curve_from_kinetic(&kp, &[1.0, 2.0, 3.0], StateLabel::new(1, 0)).unwrap();
        assert!((curve.value(2.0).unwrap() + 1.0).abs() < 1e-10);
    }

    #[test]
    fn hulthen_round_trip_through_both_duals() {
        let curve = hulthen_curve(1);
        let kp = KineticPotential::analytic(KpForm::Hulthen { n: 1 });
        let v_grid = log_grid(1.5, 40.0, 24).unwrap();
        let via_kp = curve_from_kinetic(&kp, &v_grid, StateLabel::new(1, 0)).unwrap();
        for &v in &v_grid {
            let exact = curve.value(v).unwrap();
            let got = via_kp.value(v).unwrap();
            assert!(
                (got - exact).abs() <= 1e-9 * exact.abs().max(1.0),
                "v={v}: {got} vs {exact}"
            );
        }
    }

    #[test]
    fn kfunction_of_coulomb_pair_is_inverse_square() {
        let curve = coulomb_curve();
        let shape = PotentialShape::coulomb();
        let r_grid = log_grid(0.5, 8.0, 17).unwrap();
        let k = kfunction_from_curve(&curve, &shape, &r_grid).unwrap();
        let v = k.value(2.0).unwrap();
        assert!((v - 0.25).abs() < 1e-8, "K(2) = {v}");
    }

    #[test]
    fn energy_from_inverse_square_kfunction_matches_coulomb() {
        let k = KFunction::InverseSquare { p_squared: 1.0 };
        let shape = PotentialShape::coulomb();
        let e = energy_from_kfunction(&k, &shape, 2.0).unwrap();
        assert!((e + 1.0).abs() < 1e-10, "E = {e}");
        // K = 2.25/r² with the oscillator shape recovers E(2) = 3 at v=1
        let k2 = KFunction::InverseSquare { p_squared: 2.25 };
        let osc = PotentialShape::power(2.0).unwrap();
        let e2 = energy_from_kfunction(&k2, &osc, 1.0).unwrap();
        assert!((e2 - 3.0).abs() < 1e-10, "E = {e2}");
    }

    #[test]
    fn coupling_form_identity_returns_same_curve() {
        let curve = coulomb_curve();
        let grid = [1.0, 2.0, 4.0];
        let out = curve_from_coupling_form(&curve, &(|h: f64| h), &grid).unwrap();
        for &v in &grid {
            let a = out.value(v).unwrap();
            let b = curve.value(v).unwrap();
            assert!((a - b).abs() < 1e-9 * b.abs().max(1.0));
        }
    }

    #[test]
    fn coupling_form_affine_is_exact() {
        // g(h) = 2h + 1 on the Coulomb basis gives F(v) = -v^2 + v.
        let curve = coulomb_curve();
        let grid = [0.5, 1.0, 2.0, 3.0];
        let out = curve_from_coupling_form(&curve, &(|h: f64| 2.0 * h + 1.0), &grid).unwrap();
        for &v in &grid {
            let expect = -v * v + v;
            let got = out.value(v).unwrap();
            assert!((got - expect).abs() < 1e-8, "v={v}: {got} vs {expect}");
        }
    }

    #[test]
    fn boundary_maximum_is_reported_for_undersized_sampled_curve() {
        // Sampled Coulomb curve on [2, 4]; asking for fbar at s far outside
        // the represented range must hit the window edge.
        let v: Vec<f64> = log_grid(2.0, 4.0, 9).unwrap();
        let f: Vec<f64> = v.iter().map(|x| -x * x / 4.0).collect();
        let fp: Vec<f64> = v.iter().map(|x| -x / 2.0).collect();
        let curve = SpectralCurve::from_samples(v, f, fp, StateLabel::new(1, 0)).unwrap();
        let err = kinetic_from_curve(&curve, &[50.0, 60.0]).unwrap_err();
        match err {
            Error::BoundaryMaximum { side, .. } => assert_eq!(side, Side::Upper),
            other => panic!("expected boundary maximum, got {other:?}"),
        }
    }

    #[test]
    fn scaled_curve_kinetic_transforms_per_scaling_law() {
        // fbar of A f(r/b) + B is A fbar(b^2 s) + B.
        let (a, b, big_b) = (2.0, 1.5, 0.7);
        let scaled = SpectralCurve::analytic(
            CurveForm::Transformed {
                base: Box::new(CurveForm::Hulthen { n: 1 }),
                coupling_scale: a * b * b,
                energy_scale: 1.0 / (b * b),
                slope: big_b,
            },
            StateLabel::new(1, 0),
            1.0 / (a * b * b),
        );
        let s_grid = log_grid(0.3, 3.0, 17).unwrap();
        let kp_scaled = kinetic_from_curve(&scaled, &s_grid).unwrap();
        let kp_base = KineticPotential::analytic(KpForm::Hulthen { n: 1 });
        for &s in &s_grid {
            let expect = a * kp_base.value(b * b * s).unwrap() + big_b;
            let got = kp_scaled.value(s).unwrap();
            assert!((got - expect).abs() < 1e-8, "s={s}: {got} vs {expect}");
        }
        let _ = models::eval_shape; // silence unused import in cfg(test) builds
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn legendre_parametric_consistency_on_hulthen(v in 1.05f64..80.0) {
            // s + v*fbar(s) at s(v) = F - vF' with fbar = F' recovers F.
            let curve = hulthen_curve(1);
            let fv = curve.value(v).unwrap();
            let fpv = curve.derivative(v).unwrap();
            let s = fv - v * fpv;
            let recovered = s + v * fpv;
            prop_assert!((recovered - fv).abs() <= 1e-12 * fv.abs().max(1.0));
            // and the max formula agrees with F'.
            let kp = KineticPotential::analytic(KpForm::Hulthen { n: 1 });
            prop_assert!((kp.value(s).unwrap() - fpv).abs() <= 1e-10 * fpv.abs().max(1e-6));
        }
    }
}
