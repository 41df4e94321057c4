//! Grid construction helpers.

use crate::error::{Error, Result};

/// `count` points from `lo` to `hi` inclusive, uniform in log space.
pub fn log_grid(lo: f64, hi: f64, count: usize) -> Result<Vec<f64>> {
    if !(lo.is_finite() && hi.is_finite()) || lo <= 0.0 || hi <= lo {
        return Err(Error::domain(format!(
            "log grid needs 0 < lo < hi, got [{lo}, {hi}]"
        )));
    }
    if count < 2 {
        return Err(Error::domain("grid needs at least 2 points"));
    }
    let step = (hi / lo).ln() / (count - 1) as f64;
    let mut pts: Vec<f64> = (0..count).map(|i| lo * (i as f64 * step).exp()).collect();
    pts[0] = lo;
    pts[count - 1] = hi;
    Ok(pts)
}

/// `count` points from `lo` to `hi` inclusive, uniform spacing.
pub fn linear_grid(lo: f64, hi: f64, count: usize) -> Result<Vec<f64>> {
    if !(lo.is_finite() && hi.is_finite()) || hi <= lo {
        return Err(Error::domain(format!(
            "linear grid needs lo < hi, got [{lo}, {hi}]"
        )));
    }
    if count < 2 {
        return Err(Error::domain("grid needs at least 2 points"));
    }
    let step = (hi - lo) / (count - 1) as f64;
    let mut pts: Vec<f64> = (0..count).map(|i| lo + i as f64 * step).collect();
    pts[count - 1] = hi;
    Ok(pts)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_grid_hits_endpoints_and_is_increasing() {
        let g = log_grid(0.05, 10.0, 200).unwrap();
        assert_eq!(g.len(), 200);
        assert_eq!(g[0], 0.05);
        assert_eq!(g[199], 10.0);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn rejects_degenerate_ranges() {
        assert!(log_grid(-1.0, 2.0, 10).is_err());
        assert!(log_grid(1.0, 1.0, 10).is_err());
        assert!(linear_grid(3.0, 2.0, 10).is_err());
        assert!(linear_grid(0.0, 1.0, 1).is_err());
    }
}
