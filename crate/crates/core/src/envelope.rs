//! Envelope approximation engine.
//!
//! A target shape written as a smooth transformation `f(r) = g(h(r))` of a
//! basis potential `h` with known curve `H(v)` admits the family of
//! tangential potentials `f^(t)(r) = a(t) h(r) + b(t)`, `a(t) = g'(h(t))`,
//! `b(t) = g(h(t)) - h(t) g'(h(t))`. When `g` has definite convexity the
//! tangential family lies entirely on one side of `f` and the best
//! tangential energy is a certified bound: convex `g` gives the lower
//! bound `F(v) ≥ max_t [H(a(t) v) + b(t) v]`, concave `g` the mirrored
//! upper bound.

use crate::error::{Error, Result};
use crate::interp::Pchip;
use crate::kinetic::{self, SpectralCurve, KFunction};
use crate::models::{eval_shape, scale_shift, PotentialShape};
use crate::search;

/// Basis potential with its spectral curve and K-function.
#[derive(Debug, Clone)]
pub struct EnvelopeBasis {
    pub shape_h: PotentialShape,
    pub curve_h: SpectralCurve,
    pub kfunction_h: KFunction,
}

impl EnvelopeBasis {
    /// Validates the curve/K-function consistency
    /// `min_r [K(r) + v h(r)] = H(v)` at a few sampled couplings.
    pub fn new(
        shape_h: PotentialShape,
        curve_h: SpectralCurve,
        kfunction_h: KFunction,
    ) -> Result<Self> {
        let v_lo = curve_h.v_min().max(0.0) + 0.5;
        for k in 0..3 {
            let v = v_lo * (1.0 + 2.0 * k as f64);
            let via_k = kinetic::energy_from_kfunction(&kfunction_h, &shape_h, v)?;
            let direct = curve_h.value(v)?;
            if (via_k - direct).abs() > 1e-6 * direct.abs().max(1.0) {
                return Err(Error::InvariantViolation(format!(
                    "basis curve and K-function disagree at v={v}: {via_k} vs {direct}"
                )));
            }
        }
        Ok(EnvelopeBasis {
            shape_h,
            curve_h,
            kfunction_h,
        })
    }

    /// The Coulomb basis for state `(n, ℓ)` — closed forms throughout.
    pub fn coulomb(n: u32, ell: u32) -> Result<Self> {
        let shape = PotentialShape::coulomb();
        let curve = crate::models::exact_spectral_curve(&shape, n, ell)?;
        let kfun = crate::models::exact_kfunction(&shape, n, ell)?;
        EnvelopeBasis::new(shape, curve, kfun)
    }

    /// A pure-power basis for state `(n, ℓ)`.
    pub fn power(q: f64, n: u32, ell: u32) -> Result<Self> {
        let shape = PotentialShape::power(q)?;
        let curve = crate::models::exact_spectral_curve(&shape, n, ell)?;
        let kfun = crate::models::exact_kfunction(&shape, n, ell)?;
        EnvelopeBasis::new(shape, curve, kfun)
    }
}

/// Sign of `g''` detected from sampled second divided differences.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum ConvexitySign {
    Convex,
    Concave,
    Indefinite,
}

/// Sampled transformation `g = f ∘ h⁻¹` along an r-grid.
#[derive(Debug, Clone)]
pub struct TransformationProfile {
    shape_f: PotentialShape,
    shape_h: PotentialShape,
    r_grid: Vec<f64>,
    /// g sampled against h, for evaluation at arbitrary h-values
    g_of_h: Pchip,
    pub convexity_sign: ConvexitySign,
}

impl TransformationProfile {
    pub fn r_range(&self) -> (f64, f64) {
        (self.r_grid[0], self.r_grid[self.r_grid.len() - 1])
    }

    /// `g(h) = f(h⁻¹(h))`, exact up to the root tolerance: the monotone
    /// basis is inverted by bisection over the profiled radius range, so
    /// the value does not carry sample-interpolation error.
    pub fn g_at(&self, h: f64) -> Result<f64> {
        let xs = self.g_of_h.x();
        let (lo, hi) = (xs[0], xs[xs.len() - 1]);
        let span = (hi - lo).abs().max(1e-300);
        if h < lo - 1e-9 * span || h > hi + 1e-9 * span {
            return Err(Error::range(format!(
                "basis value {h} outside sampled transformation range [{lo}, {hi}]"
            )));
        }
        let (mut ra, mut rb) = self.r_range();
        let increasing = eval_shape(&self.shape_h, rb)? > eval_shape(&self.shape_h, ra)?;
        for _ in 0..80 {
            let mid = (ra * rb).sqrt();
            let hm = eval_shape(&self.shape_h, mid)?;
            if (hm < h) == increasing {
                ra = mid;
            } else {
                rb = mid;
            }
            if rb - ra <= 1e-15 * rb {
                break;
            }
        }
        eval_shape(&self.shape_f, (ra * rb).sqrt())
    }

    /// `g'` at the touch radius, via the chain rule on the exact shapes.
    pub fn slope_at_radius(&self, t: f64) -> Result<f64> {
        let hp = self.shape_h.derivative_at(t)?;
        if hp.abs() < 1e-300 {
            return Err(Error::Tangency(format!("basis derivative vanishes at r={t}")));
        }
        Ok(self.shape_f.derivative_at(t)? / hp)
    }
}

impl kinetic::Transform for TransformationProfile {
    fn apply(&self, h: f64) -> Result<f64> {
        self.g_at(h)
    }
}

/// Sample `g = f ∘ h⁻¹` on `r_grid` and classify its convexity.
pub fn build_transformation(
    f: &PotentialShape,
    h: &PotentialShape,
    r_grid: &[f64],
) -> Result<TransformationProfile> {
    if r_grid.len() < 5 || r_grid.windows(2).any(|w| w[1] <= w[0]) || r_grid[0] <= 0.0 {
        return Err(Error::domain(
            "transformation r_grid must be strictly increasing, positive, >= 5 points",
        ));
    }
    let mut hs = Vec::with_capacity(r_grid.len());
    let mut gs = Vec::with_capacity(r_grid.len());
    for &r in r_grid {
        hs.push(eval_shape(h, r)?);
        gs.push(eval_shape(f, r)?);
    }
    let increasing = hs.windows(2).all(|w| w[1] > w[0]);
    let decreasing = hs.windows(2).all(|w| w[1] < w[0]);
    if !increasing && !decreasing {
        return Err(Error::BasisUnsuitable(format!(
            "basis {} is not strictly monotone on the grid",
            h.describe()
        )));
    }
    if decreasing {
        hs.reverse();
        gs.reverse();
    }

    // Classify convexity by second divided differences of g against h.
    let mut dd_min = f64::INFINITY;
    let mut dd_max = f64::NEG_INFINITY;
    for i in 1..hs.len() - 1 {
        let left = (gs[i] - gs[i - 1]) / (hs[i] - hs[i - 1]);
        let right = (gs[i + 1] - gs[i]) / (hs[i + 1] - hs[i]);
        let dd = 2.0 * (right - left) / (hs[i + 1] - hs[i - 1]);
        dd_min = dd_min.min(dd);
        dd_max = dd_max.max(dd);
    }
    let scale = dd_max.abs().max(dd_min.abs()).max(1.0);
    let tol = 1e-8 * scale;
    let convexity_sign = if dd_min >= -tol {
        ConvexitySign::Convex
    } else if dd_max <= tol {
        ConvexitySign::Concave
    } else {
        ConvexitySign::Indefinite
    };

    Ok(TransformationProfile {
        shape_f: f.clone(),
        shape_h: h.clone(),
        r_grid: r_grid.to_vec(),
        g_of_h: Pchip::new(hs, gs)?,
        convexity_sign,
    })
}

/// Tangential potential `f^(t)(r) = a(t) h(r) + b(t)` touching `f` at `t`.
pub fn tangential_potential(
    profile: &TransformationProfile,
    basis: &EnvelopeBasis,
    t: f64,
) -> Result<PotentialShape> {
    let (r_lo, r_hi) = profile.r_range();
    if t < r_lo || t > r_hi {
        return Err(Error::domain(format!(
            "touch radius {t} outside profile range [{r_lo}, {r_hi}]"
        )));
    }
    let a = profile.slope_at_radius(t)?;
    if !(a > 0.0) || !a.is_finite() {
        return Err(Error::Tangency(format!(
            "tangential slope a(t) = {a} at t={t} is not positive"
        )));
    }
    let ht = eval_shape(&basis.shape_h, t)?;
    let ft = eval_shape(&profile.shape_f, t)?;
    let b = ft - ht * a;
    scale_shift(&basis.shape_h, a, 1.0, b)
}

/// Certified energy bound record.
#[derive(Debug, Clone, serde::Serialize)]
pub struct BoundRecord {
    pub v: f64,
    pub value: f64,
    pub kind: BoundKind,
    pub touch_radius: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundKind {
    Lower,
    Upper,
}

/// Best tangential-potential energy at coupling `v`:
/// convex `g` → `max_t [H(a(t)v) + b(t)v]` is a lower bound,
/// concave `g` → the same construction minimized is an upper bound.
pub fn envelope_bound(
    profile: &TransformationProfile,
    basis: &EnvelopeBasis,
    v: f64,
) -> Result<BoundRecord> {
    if v <= 0.0 {
        return Err(Error::domain(format!("coupling must be positive, got {v}")));
    }
    let kind = match profile.convexity_sign {
        ConvexitySign::Convex => BoundKind::Lower,
        ConvexitySign::Concave => BoundKind::Upper,
        ConvexitySign::Indefinite => {
            return Err(Error::NoCertificate(
                "transformation convexity is indefinite; no bound direction".into(),
            ))
        }
    };
    let (r_lo, r_hi) = profile.r_range();
    let objective = |t: f64| -> f64 {
        let tangent_energy = (|| -> Result<f64> {
            let a = profile.slope_at_radius(t)?;
            if !(a > 0.0) {
                return Err(Error::Tangency("nonpositive slope".into()));
            }
            let ht = eval_shape(&basis.shape_h, t)?;
            let ft = eval_shape(&profile.shape_f, t)?;
            let b = ft - ht * a;
            Ok(basis.curve_h.value(a * v)? + b * v)
        })();
        match tangent_energy {
            Ok(e) => e,
            Err(_) => match kind {
                BoundKind::Lower => f64::NEG_INFINITY,
                BoundKind::Upper => f64::INFINITY,
            },
        }
    };
    let ext = match kind {
        BoundKind::Lower => search::maximize(objective, r_lo, r_hi, true, 96)?,
        BoundKind::Upper => search::minimize(objective, r_lo, r_hi, true, 96)?,
    };
    Ok(BoundRecord {
        v,
        value: ext.value,
        kind,
        touch_radius: ext.x,
    })
}
