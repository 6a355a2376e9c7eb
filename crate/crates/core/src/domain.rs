//! Box domains and uniform grids over them.

use serde::Serialize;

use crate::error::{Error, Result};

/// An axis-aligned box `[lower, upper] ⊂ R^n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoxDomain {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl BoxDomain {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.is_empty() {
            return Err(Error::InvalidBox("dimension must be at least 1".into()));
        }
        if lower.len() != upper.len() {
            return Err(Error::InvalidBox(format!(
                "lower has {} entries, upper has {}",
                lower.len(),
                upper.len()
            )));
        }
        for (i, (lo, hi)) in lower.iter().zip(&upper).enumerate() {
            if !lo.is_finite() || !hi.is_finite() {
                return Err(Error::InvalidBox(format!("bound {i} is not finite")));
            }
            if lo > hi {
                return Err(Error::InvalidBox(format!("lower[{i}] = {lo} > upper[{i}] = {hi}")));
            }
        }
        Ok(Self { lower, upper })
    }

    /// The cube `[lo, hi]^n`.
    pub fn cube(n: usize, lo: f64, hi: f64) -> Result<Self> {
        Self::new(vec![lo; n], vec![hi; n])
    }

    pub fn interval(lo: f64, hi: f64) -> Result<Self> {
        Self::new(vec![lo], vec![hi])
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        x.len() == self.dim()
            && x
                .iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(v, (lo, hi))| *v >= lo - tol && *v <= hi + tol)
    }
}

/// A uniform tensor grid over a box. Both endpoints of every axis are grid
/// points. Points are enumerated in lexicographic order with the first
/// coordinate varying slowest.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Grid {
    domain: BoxDomain,
    points_per_dim: Vec<usize>,
    #[serde(skip)]
    strides: Vec<usize>,
}

impl Grid {
    pub fn new(domain: BoxDomain, points_per_dim: Vec<usize>) -> Result<Self> {
        if points_per_dim.len() != domain.dim() {
            return Err(Error::Dimension {
                expected: domain.dim(),
                found: points_per_dim.len(),
            });
        }
        if let Some(i) = points_per_dim.iter().position(|&n| n < 2) {
            return Err(Error::InvalidGrid(format!(
                "axis {i} has {} point(s); at least 2 are required",
                points_per_dim[i]
            )));
        }
        let mut strides = vec![1usize; points_per_dim.len()];
        for d in (0..points_per_dim.len().saturating_sub(1)).rev() {
            strides[d] = strides[d + 1]
                .checked_mul(points_per_dim[d + 1])
                .ok_or_else(|| Error::InvalidGrid("too many points".into()))?;
        }
        strides[0]
            .checked_mul(points_per_dim[0])
            .ok_or_else(|| Error::InvalidGrid("too many points".into()))?;
        Ok(Self {
            domain,
            points_per_dim,
            strides,
        })
    }

    /// Same number of points on every axis.
    pub fn uniform(domain: BoxDomain, points: usize) -> Result<Self> {
        let n = domain.dim();
        Self::new(domain, vec![points; n])
    }

    /// One-dimensional grid over `[lo, hi]`.
    pub fn interval(lo: f64, hi: f64, points: usize) -> Result<Self> {
        Self::uniform(BoxDomain::interval(lo, hi)?, points)
    }

    pub fn domain(&self) -> &BoxDomain {
        &self.domain
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    pub fn points_per_dim(&self) -> &[usize] {
        &self.points_per_dim
    }

    pub fn len(&self) -> usize {
        self.strides[0] * self.points_per_dim[0]
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Coordinate `i` on axis `d`. Computed as `lo + (hi - lo) * i / (n - 1)`
    /// so that symmetric boxes hit zero and both endpoints exactly.
    pub fn coord(&self, d: usize, i: usize) -> f64 {
        let n = self.points_per_dim[d];
        let (lo, hi) = (self.domain.lower[d], self.domain.upper[d]);
        if i + 1 == n {
            hi
        } else {
            lo + (hi - lo) * i as f64 / (n - 1) as f64
        }
    }

    pub fn step(&self, d: usize) -> f64 {
        (self.domain.upper[d] - self.domain.lower[d]) / (self.points_per_dim[d] - 1) as f64
    }

    pub fn max_step(&self) -> f64 {
        (0..self.dim()).map(|d| self.step(d)).fold(0.0, f64::max)
    }

    pub fn multi_index(&self, index: usize) -> Vec<usize> {
        let mut out = vec![0; self.dim()];
        self.multi_index_into(index, &mut out);
        out
    }

    pub fn multi_index_into(&self, mut index: usize, out: &mut [usize]) {
        for (d, stride) in self.strides.iter().enumerate() {
            out[d] = index / stride;
            index %= stride;
        }
    }

    pub fn flat_index(&self, multi: &[usize]) -> usize {
        multi.iter().zip(&self.strides).map(|(i, s)| i * s).sum()
    }

    pub fn point(&self, index: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        self.point_into(index, &mut out);
        out
    }

    pub fn point_into(&self, mut index: usize, out: &mut [f64]) {
        for (d, stride) in self.strides.iter().enumerate() {
            out[d] = self.coord(d, index / stride);
            index %= stride;
        }
    }

    /// All points, flattened row by row (`len * dim` values).
    pub fn flattened_points(&self) -> Vec<f64> {
        let dim = self.dim();
        let mut out = vec![0.0; self.len() * dim];
        for (i, chunk) in out.chunks_mut(dim).enumerate() {
            self.point_into(i, chunk);
        }
        out
    }

    pub fn points(&self) -> impl Iterator<Item = Vec<f64>> + '_ {
        (0..self.len()).map(|i| self.point(i))
    }

    /// Index of the grid point matching `x` up to a relative tolerance.
    pub fn locate(&self, x: &[f64]) -> Option<usize> {
        if x.len() != self.dim() {
            return None;
        }
        let mut multi = vec![0; self.dim()];
        for d in 0..self.dim() {
            let step = self.step(d);
            let raw = if step > 0.0 {
                ((x[d] - self.domain.lower[d]) / step).round()
            } else {
                0.0
            };
            if raw < 0.0 || raw >= self.points_per_dim[d] as f64 {
                return None;
            }
            let i = raw as usize;
            let tol = 1e-9 * (1.0 + x[d].abs()).max(step);
            if (self.coord(d, i) - x[d]).abs() > tol {
                return None;
            }
            multi[d] = i;
        }
        Some(self.flat_index(&multi))
    }

    /// Whether the point lies strictly inside the box along every axis.
    pub fn is_interior(&self, index: usize) -> bool {
        self.multi_index(index)
            .iter()
            .zip(&self.points_per_dim)
            .all(|(&i, &n)| i > 0 && i + 1 < n)
    }

    /// Indices of the axis neighbours (±1 along each axis) of a grid point.
    pub fn neighbours(&self, index: usize) -> Vec<usize> {
        let multi = self.multi_index(index);
        let mut out = Vec::with_capacity(2 * self.dim());
        for d in 0..self.dim() {
            if multi[d] > 0 {
                out.push(index - self.strides[d]);
            }
            if multi[d] + 1 < self.points_per_dim[d] {
                out.push(index + self.strides[d]);
            }
        }
        out
    }

    /// The grid obtained by inserting a midpoint between every pair of
    /// consecutive points; contains every point of `self`.
    pub fn refined(&self) -> Grid {
        let points = self.points_per_dim.iter().map(|n| 2 * n - 1).collect();
        Grid::new(self.domain.clone(), points).expect("refinement of a valid grid is valid")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn endpoints_and_zero_are_exact() {
        let g = Grid::interval(-2.0, 2.0, 401).unwrap();
        assert_eq!(g.coord(0, 0), -2.0);
        assert_eq!(g.coord(0, 400), 2.0);
        assert_eq!(g.coord(0, 200), 0.0);
        assert_eq!(g.locate(&[0.5]), Some(250));
        assert_eq!(g.locate(&[0.505]), None);
    }

    #[test]
    fn lexicographic_order_first_axis_slowest() {
        let g = Grid::new(BoxDomain::cube(2, 0.0, 1.0).unwrap(), vec![2, 3]).unwrap();
        assert_eq!(g.len(), 6);
        assert_eq!(g.point(1), vec![0.0, 0.5]);
        assert_eq!(g.point(3), vec![1.0, 0.0]);
        assert_eq!(g.flat_index(&g.multi_index(5)), 5);
    }

    #[test]
    fn rejects_degenerate_inputs() {
        assert!(BoxDomain::new(vec![1.0], vec![0.0]).is_err());
        assert!(BoxDomain::new(vec![], vec![]).is_err());
        assert!(Grid::interval(0.0, 1.0, 1).is_err());
    }

    #[test]
    fn refinement_keeps_original_points() {
        let g = Grid::interval(-1.0, 1.0, 5).unwrap();
        let r = g.refined();
        for p in g.points() {
            assert!(r.locate(&p).is_some());
        }
    }
}
