//! Functions tabulated on a grid. Every sup/inf in the library is a scan over
//! one of these.

use rayon::prelude::*;

use crate::domain::Grid;
use crate::error::{Error, Result};
use crate::extended::ExtendedValue;
use crate::objective::{extremum_of_values, ExtendedFunction, Extremum, ExtremumMode};

#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    grid: Grid,
    points: Vec<f64>,
    sq_norms: Vec<f64>,
    values: Vec<ExtendedValue>,
}

impl GridFunction {
    pub fn tabulate(f: &dyn ExtendedFunction, grid: &Grid) -> Result<Self> {
        if f.dim() != grid.dim() {
            return Err(Error::Dimension {
                expected: f.dim(),
                found: grid.dim(),
            });
        }
        let n = grid.dim();
        let points = grid.flattened_points();
        let values = points.par_chunks(n).map(|x| f.eval(x)).collect();
        Ok(Self::assemble(grid.clone(), points, values))
    }

    pub fn from_values(grid: &Grid, values: Vec<ExtendedValue>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidGrid(format!(
                "{} values for a grid of {} points",
                values.len(),
                grid.len()
            )));
        }
        Ok(Self::assemble(grid.clone(), grid.flattened_points(), values))
    }

    fn assemble(grid: Grid, points: Vec<f64>, values: Vec<ExtendedValue>) -> Self {
        let sq_norms = points.chunks(grid.dim()).map(|x| x.iter().map(|v| v * v).sum()).collect();
        Self {
            grid,
            points,
            sq_norms,
            values,
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.grid.dim()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[ExtendedValue] {
        &self.values
    }

    pub fn value(&self, index: usize) -> ExtendedValue {
        self.values[index]
    }

    pub fn point(&self, index: usize) -> &[f64] {
        let n = self.dim();
        &self.points[index * n..(index + 1) * n]
    }

    pub fn sq_norm(&self, index: usize) -> f64 {
        self.sq_norms[index]
    }

    /// Flat index of the grid point at `x`.
    pub fn index_of(&self, x: &[f64]) -> Result<usize> {
        if x.len() != self.dim() {
            return Err(Error::Dimension {
                expected: self.dim(),
                found: x.len(),
            });
        }
        self.grid.locate(x).ok_or_else(|| Error::NotGridPoint(x.to_vec()))
    }

    pub fn is_proper(&self) -> bool {
        self.check_proper().is_ok()
    }

    pub fn check_proper(&self) -> Result<()> {
        if let Some(i) = self.values.iter().position(|v| v.is_neg_inf()) {
            return Err(Error::Improper(format!("value -inf at {:?}", self.point(i))));
        }
        if !self.values.iter().any(|v| v.is_finite()) {
            return Err(Error::Improper("no finite value on the grid".into()));
        }
        Ok(())
    }

    pub fn extremum(&self, mode: ExtremumMode) -> Extremum {
        let (value, index) = extremum_of_values(&self.values, mode).expect("grids are never empty");
        Extremum {
            value,
            index,
            argpoint: index.map(|i| self.point(i).to_vec()),
        }
    }

    /// Indices where the value is finite.
    pub fn finite_indices(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.values[i].is_finite()).collect()
    }
}
