//! Shape-preserving interpolation.
//!
//! Two interpolants cover all sampled data in the crate:
//!
//! * [`Pchip`] — the Fritsch–Carlson monotone cubic, used for tabulated
//!   potential shapes and transformation profiles. Monotone data yields a
//!   monotone interpolant, which is what keeps tabulated shapes inside the
//!   admissible potential class.
//! * [`SampledC1`] — for curves known together with their first derivative
//!   (spectral curves via Hellmann–Feynman, kinetic potentials via their
//!   maximizer). The derivative samples are interpolated with [`Pchip`] and
//!   integrated analytically, so a non-increasing derivative produces a
//!   concave value track; a smooth Hermite ramp absorbs the per-segment
//!   quadrature defect so that the values are also matched at the nodes.
//!
//! [`isotonic_projection`] is the pool-adjacent-violators projection used
//! when an inversion iterate drifts out of the monotone class.

use crate::error::{Error, Result};

/// Monotone piecewise-cubic Hermite interpolant (PCHIP).
#[derive(Debug, Clone)]
pub struct Pchip {
    x: Vec<f64>,
    y: Vec<f64>,
    d: Vec<f64>,
}

impl Pchip {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        let n = x.len();
        if n < 2 || y.len() != n {
            return Err(Error::domain("pchip needs matching x/y with >= 2 points"));
        }
        if x.iter().any(|v| !v.is_finite()) || y.iter().any(|v| !v.is_finite()) {
            return Err(Error::domain("pchip input must be finite"));
        }
        let mut h = Vec::with_capacity(n - 1);
        let mut delta = Vec::with_capacity(n - 1);
        for i in 0..n - 1 {
            let hi = x[i + 1] - x[i];
            if hi <= 0.0 {
                return Err(Error::domain("pchip abscissae must be strictly increasing"));
            }
            h.push(hi);
            delta.push((y[i + 1] - y[i]) / hi);
        }

        let mut d = vec![0.0; n];
        for k in 1..n - 1 {
            let (s1, s2) = (delta[k - 1], delta[k]);
            if s1 == 0.0 || s2 == 0.0 || s1.signum() != s2.signum() {
                d[k] = 0.0;
            } else {
                let w1 = 2.0 * h[k] + h[k - 1];
                let w2 = h[k] + 2.0 * h[k - 1];
                d[k] = (w1 + w2) / (w1 / s1 + w2 / s2);
            }
        }
        d[0] = edge_slope(h[0], delta[0], h.get(1).copied(), delta.get(1).copied());
        d[n - 1] = edge_slope(
            h[n - 2],
            delta[n - 2],
            if n >= 3 { Some(h[n - 3]) } else { None },
            if n >= 3 { Some(delta[n - 3]) } else { None },
        );
        Ok(Pchip { x, y, d })
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    fn segment(&self, xq: f64) -> usize {
        let n = self.x.len();
        if xq <= self.x[0] {
            0
        } else if xq >= self.x[n - 1] {
            n - 2
        } else {
            self.x.partition_point(|&xi| xi <= xq).saturating_sub(1)
        }
    }

    /// Evaluate at `xq`; endpoint segments extend beyond the data range.
    pub fn eval(&self, xq: f64) -> f64 {
        let k = self.segment(xq);
        let h = self.x[k + 1] - self.x[k];
        let t = (xq - self.x[k]) / h;
        let (t2, t3) = (t * t, t * t * t);
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        h00 * self.y[k] + h10 * h * self.d[k] + h01 * self.y[k + 1] + h11 * h * self.d[k + 1]
    }

    /// Derivative of the interpolant at `xq`.
    pub fn deriv(&self, xq: f64) -> f64 {
        let k = self.segment(xq);
        let h = self.x[k + 1] - self.x[k];
        let t = (xq - self.x[k]) / h;
        let t2 = t * t;
        let dh00 = (6.0 * t2 - 6.0 * t) / h;
        let dh10 = 3.0 * t2 - 4.0 * t + 1.0;
        let dh01 = (-6.0 * t2 + 6.0 * t) / h;
        let dh11 = 3.0 * t2 - 2.0 * t;
        dh00 * self.y[k] + dh10 * self.d[k] + dh01 * self.y[k + 1] + dh11 * self.d[k + 1]
    }

    /// Exact integral of the interpolant over one full segment `k`.
    fn segment_integral(&self, k: usize) -> f64 {
        let h = self.x[k + 1] - self.x[k];
        0.5 * h * (self.y[k] + self.y[k + 1]) + h * h * (self.d[k] - self.d[k + 1]) / 12.0
    }

    /// Integral from `x[k]` to `xq` inside segment `k` (`xq` in that segment).
    fn partial_integral(&self, k: usize, xq: f64) -> f64 {
        let h = self.x[k + 1] - self.x[k];
        let t = (xq - self.x[k]) / h;
        let (t2, t3, t4) = (t * t, t * t * t, t * t * t * t);
        let ih00 = t - t3 + 0.5 * t4;
        let ih10 = 0.5 * t2 - 2.0 * t3 / 3.0 + 0.25 * t4;
        let ih01 = t3 - 0.5 * t4;
        let ih11 = 0.25 * t4 - t3 / 3.0;
        h * (ih00 * self.y[k]
            + ih10 * h * self.d[k]
            + ih01 * self.y[k + 1]
            + ih11 * h * self.d[k + 1])
    }
}

fn edge_slope(h0: f64, s0: f64, h1: Option<f64>, s1: Option<f64>) -> f64 {
    match (h1, s1) {
        (Some(h1), Some(s1)) => {
            let mut d = ((2.0 * h0 + h1) * s0 - h0 * s1) / (h0 + h1);
            if d.signum() != s0.signum() {
                d = 0.0;
            } else if s0.signum() != s1.signum() && d.abs() > 3.0 * s0.abs() {
                d = 3.0 * s0;
            }
            d
        }
        _ => s0,
    }
}

/// C¹ interpolant of `(x, y, y')` samples with shape-preserving derivative.
///
/// The derivative track is the PCHIP of the `y'` samples; the value track
/// is its analytic integral anchored at every node, with a cubic ramp
/// spreading each segment's quadrature defect so nodes are matched exactly
/// while endpoint derivatives stay untouched.
#[derive(Debug, Clone)]
pub struct SampledC1 {
    x: Vec<f64>,
    y: Vec<f64>,
    dp: Pchip,
    /// per-segment defect `Δy - ∫ p`
    defect: Vec<f64>,
}

impl SampledC1 {
    pub fn new(x: Vec<f64>, y: Vec<f64>, yp: Vec<f64>) -> Result<Self> {
        let n = x.len();
        if n < 2 || y.len() != n || yp.len() != n {
            return Err(Error::domain("sampled curve needs matching x/y/y' >= 2 points"));
        }
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::domain("sampled curve values must be finite"));
        }
        let dp = Pchip::new(x.clone(), yp)?;
        let mut defect = Vec::with_capacity(n - 1);
        for k in 0..n - 1 {
            defect.push((y[k + 1] - y[k]) - dp.segment_integral(k));
        }
        Ok(SampledC1 { x, y, dp, defect })
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn yp(&self) -> &[f64] {
        self.dp.y()
    }

    pub fn range(&self) -> (f64, f64) {
        (self.x[0], self.x[self.x.len() - 1])
    }

    pub fn contains(&self, xq: f64) -> bool {
        xq >= self.x[0] && xq <= self.x[self.x.len() - 1]
    }

    /// Value at `xq` (must lie within the sampled range).
    pub fn eval(&self, xq: f64) -> Result<f64> {
        if !self.contains(xq) {
            return Err(Error::range(format!(
                "x={xq} outside sampled range [{}, {}]",
                self.x[0],
                self.x[self.x.len() - 1]
            )));
        }
        let k = self.dp.segment(xq);
        let h = self.x[k + 1] - self.x[k];
        let t = (xq - self.x[k]) / h;
        let ramp = t * t * (3.0 - 2.0 * t);
        Ok(self.y[k] + self.dp.partial_integral(k, xq) + self.defect[k] * ramp)
    }

    /// Derivative at `xq`.
    pub fn deriv(&self, xq: f64) -> Result<f64> {
        if !self.contains(xq) {
            return Err(Error::range(format!(
                "x={xq} outside sampled range [{}, {}]",
                self.x[0],
                self.x[self.x.len() - 1]
            )));
        }
        let k = self.dp.segment(xq);
        let h = self.x[k + 1] - self.x[k];
        let t = (xq - self.x[k]) / h;
        Ok(self.dp.eval(xq) + self.defect[k] * 6.0 * t * (1.0 - t) / h)
    }
}

/// Weighted pool-adjacent-violators projection onto non-decreasing sequences.
pub fn isotonic_projection(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    let mut level: Vec<f64> = Vec::with_capacity(n);
    let mut weight: Vec<f64> = Vec::with_capacity(n);
    let mut count: Vec<usize> = Vec::with_capacity(n);
    for &v in values {
        level.push(v);
        weight.push(1.0);
        count.push(1);
        while level.len() >= 2 {
            let m = level.len();
            if level[m - 2] <= level[m - 1] {
                break;
            }
            let w = weight[m - 2] + weight[m - 1];
            let merged = (level[m - 2] * weight[m - 2] + level[m - 1] * weight[m - 1]) / w;
            level.truncate(m - 1);
            weight.truncate(m - 1);
            let c = count.pop().unwrap();
            *level.last_mut().unwrap() = merged;
            *weight.last_mut().unwrap() = w;
            *count.last_mut().unwrap() += c;
        }
    }
    let mut out = Vec::with_capacity(n);
    for (lv, c) in level.iter().zip(count.iter()) {
        out.extend(std::iter::repeat_n(*lv, *c));
    }
    out
}
