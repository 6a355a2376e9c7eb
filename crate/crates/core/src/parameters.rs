//! Finite samples of an elementary class, indexed by curvature and linear part.

use std::cmp::Ordering;

use serde::Serialize;

use crate::domain::Grid;
use crate::elementary::{ElementaryClass, ElementaryFunction};
use crate::error::{Error, Result};

/// The constant term is never sampled: it shifts a function and its conjugate
/// by the same amount, so every supremum over it is closed-form.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParameterGrid {
    class: ElementaryClass,
    a_values: Vec<f64>,
    ell_grid: Grid,
    seeds: Vec<(f64, Vec<f64>)>,
}

impl ParameterGrid {
    pub fn new(class: ElementaryClass, a_values: Vec<f64>, ell_grid: Grid) -> Result<Self> {
        if a_values.is_empty() {
            return Err(Error::InvalidParameter("a_values must not be empty".into()));
        }
        if a_values.iter().any(|a| !a.is_finite() || *a < 0.0) {
            return Err(Error::InvalidParameter("a_values must be finite and >= 0".into()));
        }
        if a_values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParameter("a_values must be strictly increasing".into()));
        }
        if a_values[0] != 0.0 {
            return Err(Error::InvalidParameter("a_values must include 0".into()));
        }
        if class == ElementaryClass::Affine && a_values.len() != 1 {
            return Err(Error::InvalidParameter("the affine class only admits a = 0".into()));
        }
        Ok(Self {
            class,
            a_values,
            ell_grid,
            seeds: Vec::new(),
        })
    }

    /// Affine class over `ell_grid`.
    pub fn affine(ell_grid: Grid) -> Self {
        Self::new(ElementaryClass::Affine, vec![0.0], ell_grid).expect("a = 0 is always valid")
    }

    pub fn quad_minorant(a_values: Vec<f64>, ell_grid: Grid) -> Result<Self> {
        Self::new(ElementaryClass::QuadMinorant, a_values, ell_grid)
    }

    /// Adds explicit `(a, ell)` members outside the product grid.
    pub fn with_seeds(mut self, seeds: Vec<(f64, Vec<f64>)>) -> Result<Self> {
        for (a, ell) in &seeds {
            ElementaryFunction::new(self.class, *a, ell.clone(), 0.0)?;
            if ell.len() != self.dim() {
                return Err(Error::Dimension {
                    expected: self.dim(),
                    found: ell.len(),
                });
            }
        }
        self.seeds = seeds;
        Ok(self)
    }

    pub fn class(&self) -> ElementaryClass {
        self.class
    }

    pub fn a_values(&self) -> &[f64] {
        &self.a_values
    }

    pub fn a_max(&self) -> f64 {
        self.members().iter().map(|m| m.0).fold(0.0, f64::max)
    }

    pub fn ell_grid(&self) -> &Grid {
        &self.ell_grid
    }

    pub fn seeds(&self) -> &[(f64, Vec<f64>)] {
        &self.seeds
    }

    pub fn dim(&self) -> usize {
        self.ell_grid.dim()
    }

    /// All `(a, ell)` pairs, sorted lexicographically and deduplicated.
    pub fn members(&self) -> Vec<(f64, Vec<f64>)> {
        let mut out: Vec<(f64, Vec<f64>)> = Vec::with_capacity(self.a_values.len() * self.ell_grid.len() + self.seeds.len());
        for &a in &self.a_values {
            for ell in self.ell_grid.points() {
                out.push((a, ell));
            }
        }
        out.extend(self.seeds.iter().cloned());
        out.sort_by(compare_members);
        out.dedup_by(|x, y| compare_members(x, y) == Ordering::Equal);
        out
    }

    /// Members as elementary functions with `c = 0`.
    pub fn functions(&self) -> Vec<ElementaryFunction> {
        self.members()
            .into_iter()
            .map(|(a, ell)| ElementaryFunction::new(self.class, a, ell, 0.0).expect("validated at construction"))
            .collect()
    }

    pub fn len(&self) -> usize {
        self.members().len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// Lexicographic order on `(a, ell)`.
pub fn compare_members(x: &(f64, Vec<f64>), y: &(f64, Vec<f64>)) -> Ordering {
    x.0.total_cmp(&y.0).then_with(|| {
        x.1.iter()
            .zip(&y.1)
            .map(|(p, q)| p.total_cmp(q))
            .find(|o| *o != Ordering::Equal)
            .unwrap_or(Ordering::Equal)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ell(n: usize) -> Grid {
        Grid::interval(-1.0, 1.0, n).unwrap()
    }

    #[test]
    fn validation() {
        assert!(ParameterGrid::quad_minorant(vec![], ell(3)).is_err());
        assert!(ParameterGrid::quad_minorant(vec![1.0], ell(3)).is_err());
        assert!(ParameterGrid::quad_minorant(vec![0.0, 2.0, 1.0], ell(3)).is_err());
        assert!(ParameterGrid::new(ElementaryClass::Affine, vec![0.0, 1.0], ell(3)).is_err());
        assert!(ParameterGrid::affine(ell(3)).with_seeds(vec![(1.0, vec![0.0])]).is_err());
        assert!(ParameterGrid::affine(ell(3)).with_seeds(vec![(0.0, vec![0.0, 1.0])]).is_err());
    }

    #[test]
    fn members_are_sorted_and_unique() {
        let pg = ParameterGrid::quad_minorant(vec![0.0, 1.0], ell(3))
            .unwrap()
            .with_seeds(vec![(0.5, vec![0.25]), (1.0, vec![0.0])])
            .unwrap();
        let m = pg.members();
        assert_eq!(m.len(), 7);
        assert_eq!(m[3], (0.5, vec![0.25]));
        assert!(m.windows(2).all(|w| compare_members(&w[0], &w[1]) == Ordering::Less));
        assert_eq!(pg.a_max(), 1.0);
    }
}
