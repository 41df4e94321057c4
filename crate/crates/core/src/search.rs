//! One-dimensional extremum searches.
//!
//! Every max/min problem in this crate (the Legendre formulas, the
//! K-function and tangential-potential extremizations, the operator lower
//! bound) is unimodal by the concavity/convexity structure of the objects
//! involved, so a bracketing scan followed by golden-section refinement
//! and a final parabolic polish is sufficient and derivative-free.

use crate::error::{Error, Result, Side};

const INV_GOLD: f64 = 0.381_966_011_250_105_1; // 2 - phi

#[derive(Debug, Clone, Copy)]
pub struct Extremum {
    pub x: f64,
    pub value: f64,
}

/// Maximize `f` over `[lo, hi]`.
///
/// The interval is first scanned on `n_scan` points (log-spaced when
/// `log_scale`), and the best interior point seeds golden-section
/// refinement. If the best scan point is an endpoint the maximum is not
/// bracketed and a [`Error::BoundaryMaximum`] is returned carrying that
/// endpoint, so callers can widen the interval instead of trusting a
/// clamped value.
pub fn maximize(
    f: impl Fn(f64) -> f64,
    lo: f64,
    hi: f64,
    log_scale: bool,
    n_scan: usize,
) -> Result<Extremum> {
    let ext = minimize_inner(|x| -f(x), lo, hi, log_scale, n_scan, true)?;
    Ok(Extremum {
        x: ext.x,
        value: -ext.value,
    })
}

/// Minimize `f` over `[lo, hi]`; boundary hits yield [`Error::BoundaryMinimum`].
pub fn minimize(
    f: impl Fn(f64) -> f64,
    lo: f64,
    hi: f64,
    log_scale: bool,
    n_scan: usize,
) -> Result<Extremum> {
    minimize_inner(f, lo, hi, log_scale, n_scan, false)
}

/// Maximize `f` over `(lo, ∞)`: the upper end of the scan window grows
/// geometrically until the objective is decreasing there, then the
/// bracketed maximum is refined as usual.
pub fn maximize_unbounded_above(
    f: impl Fn(f64) -> f64,
    lo: f64,
    hi_start: f64,
) -> Result<Extremum> {
    let mut hi = hi_start.max(lo * 4.0);
    let cap = 1e14;
    loop {
        match maximize(&f, lo, hi, true, 48) {
            Err(Error::BoundaryMaximum {
                side: Side::Upper, ..
            }) => {
                hi *= 8.0;
                if hi > cap {
                    return Err(Error::UnboundedSearch(format!(
                        "maximum not bracketed below {cap:.1e}"
                    )));
                }
            }
            other => return other,
        }
    }
}

/// Minimize `f` over `(lo, ∞)` by geometric expansion of the upper end.
pub fn minimize_unbounded_above(
    f: impl Fn(f64) -> f64,
    lo: f64,
    hi_start: f64,
) -> Result<Extremum> {
    let ext = maximize_unbounded_above(|x| -f(x), lo, hi_start)?;
    Ok(Extremum {
        x: ext.x,
        value: -ext.value,
    })
}

fn minimize_inner(
    f: impl Fn(f64) -> f64,
    lo: f64,
    hi: f64,
    log_scale: bool,
    n_scan: usize,
    as_max: bool,
) -> Result<Extremum> {
    if !(lo.is_finite() && hi.is_finite()) || hi <= lo {
        return Err(Error::domain(format!("bad search interval [{lo}, {hi}]")));
    }
    if log_scale && lo <= 0.0 {
        return Err(Error::domain("log-scale search needs lo > 0"));
    }
    let n = n_scan.max(8);
    let xs: Vec<f64> = if log_scale {
        crate::grid::log_grid(lo, hi, n)?
    } else {
        crate::grid::linear_grid(lo, hi, n)?
    };
    let vals: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
    let mut best = 0usize;
    for (i, &v) in vals.iter().enumerate() {
        if v < vals[best] || !vals[best].is_finite() {
            best = i;
        }
    }
    if !vals[best].is_finite() {
        return Err(Error::NumericalInstability(
            "objective not finite anywhere on the scan grid".into(),
        ));
    }
    // Plateau: a constant objective has no interior bracket; any point is
    // extremal (affine transformations produce exactly this).
    let (v_lo, v_hi) = vals
        .iter()
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    if v_hi - v_lo <= 1e-13 * v_hi.abs().max(v_lo.abs()).max(1e-30) {
        return Ok(Extremum {
            x: xs[n / 2],
            value: vals[n / 2],
        });
    }
    if best == 0 || best == n - 1 {
        let side = if best == 0 { Side::Lower } else { Side::Upper };
        let param = xs[best];
        return Err(if as_max {
            Error::BoundaryMaximum { param, side }
        } else {
            Error::BoundaryMinimum { param, side }
        });
    }

    // Golden-section on the bracketing triple, in the scan coordinate.
    let to_t = |x: f64| if log_scale { x.ln() } else { x };
    let from_t = |t: f64| if log_scale { t.exp() } else { t };
    let mut a = to_t(xs[best - 1]);
    let mut b = to_t(xs[best + 1]);
    let mut x1 = a + INV_GOLD * (b - a);
    let mut x2 = b - INV_GOLD * (b - a);
    let mut f1 = f(from_t(x1));
    let mut f2 = f(from_t(x2));
    let scale = a.abs().max(b.abs()).max(1e-30);
    for _ in 0..200 {
        if (b - a).abs() <= 1e-12 * scale {
            break;
        }
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = a + INV_GOLD * (b - a);
            f1 = f(from_t(x1));
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = b - INV_GOLD * (b - a);
            f2 = f(from_t(x2));
        }
    }
    let (mut tx, mut tv) = if f1 < f2 { (x1, f1) } else { (x2, f2) };

    // Parabolic polish through (a, tx, b).
    let (fa, fb) = (f(from_t(a)), f(from_t(b)));
    let denom = (tx - a) * (tv - fb) - (tx - b) * (tv - fa);
    if denom.abs() > 0.0 {
        let num = (tx - a).powi(2) * (tv - fb) - (tx - b).powi(2) * (tv - fa);
        let cand = tx - 0.5 * num / denom;
        if cand.is_finite() && cand > a && cand < b {
            let fc = f(from_t(cand));
            if fc < tv {
                tx = cand;
                tv = fc;
            }
        }
    }
    Ok(Extremum {
        x: from_t(tx),
        value: tv,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_quadratic_minimum() {
        let ext = minimize(|x| (x - 2.5) * (x - 2.5) + 1.0, 0.0, 10.0, false, 32).unwrap();
        assert!((ext.x - 2.5).abs() < 1e-6, "x = {}", ext.x);
        assert!((ext.value - 1.0).abs() < 1e-14);
    }

    #[test]
    fn finds_maximum_on_log_grid() {
        // max of F(v)/v - s/v for the Coulomb curve F = -v^2/4, s = 1:
        // stationarity at v = 2, value -1.
        let ext = maximize(|v| (-v * v / 4.0 - 1.0) / v, 1e-3, 1e3, true, 64).unwrap();
        assert!((ext.x - 2.0).abs() < 1e-7);
        assert!((ext.value + 1.0).abs() < 1e-12);
    }

    #[test]
    fn boundary_hit_is_reported_not_clamped() {
        let err = maximize(|x| x, 1.0, 2.0, false, 16).unwrap_err();
        match err {
            Error::BoundaryMaximum { param, side } => {
                assert_eq!(side, Side::Upper);
                assert_eq!(param, 2.0);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn expanding_search_escapes_small_initial_window() {
        // max of -(x - 1000)^2 starting with hi = 2.
        let ext = maximize_unbounded_above(|x| -(x - 1000.0) * (x - 1000.0), 1.0, 2.0).unwrap();
        assert!((ext.x - 1000.0).abs() < 1e-5);
    }
}
