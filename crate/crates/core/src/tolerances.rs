//! Numerical tolerances shared across modules.

use crate::domain::Grid;
use crate::extended::ExtendedValue;

/// Pure evaluation slack for `phi <= f`.
pub const TOL_SUPPORT: f64 = 1e-9;

/// Equality slack for Young-type identities and subgradient inequalities.
pub const TOL_EQ: f64 = 1e-7;

/// Euclidean slack in `(a, v)` space for convex-hull membership.
pub const TOL_HULL: f64 = 1e-6;

/// A point is in the strict sublevel set `[phi < alpha]` when
/// `phi < alpha - STRICT_MARGIN`.
pub const STRICT_MARGIN: f64 = 1e-9;

/// Suprema above this are reported as diverging rather than as values.
pub const DIVERGENCE_CEILING: f64 = 1e6;

/// Allowed `f - f**` on a grid: spatial step plus curvature truncation.
pub fn tol_biconj(grid: &Grid, a_max: f64) -> f64 {
    2.0 * grid.max_step() + 2.0 / (1.0 + a_max)
}

/// Allowed primal/dual mismatch: 2% of the larger magnitude, at least 1e-6.
/// Infinite values fall back to the absolute floor.
pub fn tol_gap(primal: ExtendedValue, dual: ExtendedValue) -> f64 {
    let scale = [primal, dual]
        .iter()
        .filter_map(|v| v.as_finite())
        .map(f64::abs)
        .fold(0.0, f64::max);
    (0.02 * scale).max(1e-6)
}

/// Difference between the exact inner minimum over `y >= g(x)` and its value
/// restricted to grid points: each coordinate moves by at most one step, and
/// the integrand `a y^2 - v y` has slope at most `|v| + 2 a R` on the box.
pub fn tol_lag(y_grid: &Grid, a: f64, v: &[f64]) -> f64 {
    let dom = y_grid.domain();
    let slope_sum: f64 = v
        .iter()
        .enumerate()
        .map(|(i, vi)| {
            let radius = dom.lower()[i].abs().max(dom.upper()[i].abs());
            y_grid.step(i) * (vi.abs() + 2.0 * a * radius)
        })
        .sum();
    slope_sum + 1e-9
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gap_tolerance_scales() {
        let t = tol_gap(ExtendedValue::finite(-0.25), ExtendedValue::finite(-0.5));
        assert!((t - 0.01).abs() < 1e-15);
        assert_eq!(tol_gap(ExtendedValue::ZERO, ExtendedValue::ZERO), 1e-6);
        assert_eq!(tol_gap(ExtendedValue::PosInf, ExtendedValue::NegInf), 1e-6);
    }

    #[test]
    fn biconj_tolerance() {
        let g = Grid::interval(-2.0, 2.0, 401).unwrap();
        assert!((tol_biconj(&g, 8.0) - (0.02 + 2.0 / 9.0)).abs() < 1e-12);
    }
}
