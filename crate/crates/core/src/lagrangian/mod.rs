//! Lagrangians `L(x, psi) = psi(y0) - p*_x(psi)` built from perturbation
//! functions, with `p*_x(psi) = sup_y psi(y) - p(x, y)` taken over a `y` grid.

mod dual_class;
mod perturbation;

use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

pub use dual_class::{dual_class, dual_class_registry, AffineDual, DualClass, DualParameter, QuadDual};
pub use perturbation::{
    perturbation_registry, ConstraintPerturbation, CustomPerturbation, FenchelPerturbation, FunctionSpec, Perturbation,
    PerturbationBuilder, PerturbationSpec,
};

use crate::domain::Grid;
use crate::error::{Error, Result};
use crate::extended::ExtendedValue;
use crate::objective::{extremum_of_values, ExtendedFunction, ExtremumMode};
use crate::sampled::GridFunction;
use crate::tolerances::DIVERGENCE_CEILING;

/// `p(x, .)` tabulated on the `y` grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Section {
    pub x: Vec<f64>,
    pub values: Vec<ExtendedValue>,
}

impl Section {
    /// `p(x, .)` is `+inf` at every grid point.
    pub fn is_empty_domain(&self) -> bool {
        self.values.iter().all(|v| v.is_pos_inf())
    }
}

#[derive(Debug, Clone)]
pub struct Lagrangian {
    perturbation: Arc<dyn Perturbation>,
    dual_class: Arc<dyn DualClass>,
    y_grid: Grid,
    y_points: Vec<f64>,
    y_sq: Vec<f64>,
}

impl Lagrangian {
    /// The `y` grid must contain the anchor.
    pub fn new(perturbation: Arc<dyn Perturbation>, dual_class: Arc<dyn DualClass>, y_grid: Grid) -> Result<Self> {
        if y_grid.dim() != perturbation.y_dim() {
            return Err(Error::Dimension {
                expected: perturbation.y_dim(),
                found: y_grid.dim(),
            });
        }
        if y_grid.locate(perturbation.anchor()).is_none() {
            return Err(Error::NotGridPoint(perturbation.anchor().to_vec()));
        }
        let y_points = y_grid.flattened_points();
        let y_sq = y_points.chunks(y_grid.dim()).map(|y| y.iter().map(|t| t * t).sum()).collect();
        Ok(Self {
            perturbation,
            dual_class,
            y_grid,
            y_points,
            y_sq,
        })
    }

    pub fn perturbation(&self) -> &Arc<dyn Perturbation> {
        &self.perturbation
    }

    pub fn dual_class(&self) -> &Arc<dyn DualClass> {
        &self.dual_class
    }

    pub fn y_grid(&self) -> &Grid {
        &self.y_grid
    }

    /// Same perturbation and `y` grid under another dual class.
    pub fn with_dual_class(&self, dual_class: Arc<dyn DualClass>) -> Self {
        Self {
            dual_class,
            ..self.clone()
        }
    }

    pub fn section(&self, x: &[f64]) -> Result<Section> {
        if x.len() != self.perturbation.x_dim() {
            return Err(Error::Dimension {
                expected: self.perturbation.x_dim(),
                found: x.len(),
            });
        }
        let values = self.perturbation.section(x, &self.y_points)?;
        if let Some(j) = values.iter().position(|v| v.is_neg_inf()) {
            return Err(Error::Improper(format!(
                "p(x, y) = -inf at x = {x:?}, y = {:?}",
                self.y_grid.point(j)
            )));
        }
        Ok(Section { x: x.to_vec(), values })
    }

    fn check_psi(&self, psi: &DualParameter) -> Result<()> {
        if psi.dim() == self.y_grid.dim() {
            Ok(())
        } else {
            Err(Error::Dimension {
                expected: self.y_grid.dim(),
                found: psi.dim(),
            })
        }
    }

    fn psi_at(&self, j: usize, psi: &DualParameter) -> f64 {
        let m = self.y_grid.dim();
        let y = &self.y_points[j * m..(j + 1) * m];
        -psi.a() * self.y_sq[j] + psi.v().iter().zip(y).map(|(v, t)| v * t).sum::<f64>()
    }

    /// `sup_y psi(y) - p(x, y)` over the section; `-inf` iff `p(x, .)` is
    /// `+inf` on the whole grid.
    pub fn psi_conjugate_on(&self, section: &Section, psi: &DualParameter) -> Result<ExtendedValue> {
        self.check_psi(psi)?;
        let mut best = ExtendedValue::NegInf;
        for (j, p) in section.values.iter().enumerate() {
            if let Some(pv) = p.as_finite() {
                let s = ExtendedValue::finite(self.psi_at(j, psi) - pv);
                if s > best {
                    best = s;
                }
            }
        }
        Ok(best)
    }

    pub fn psi_conjugate(&self, x: &[f64], psi: &DualParameter) -> Result<ExtendedValue> {
        self.psi_conjugate_on(&self.section(x)?, psi)
    }

    /// `L(x, psi)` from a precomputed section. A perturbation may supply a
    /// closed form for parameters where the bounded grid would mislead.
    pub fn eval_on(&self, section: &Section, psi: &DualParameter) -> Result<ExtendedValue> {
        self.check_psi(psi)?;
        if let Some(v) = self.perturbation.closed_form_lagrangian(&section.x, psi) {
            return Ok(v);
        }
        Ok(match self.psi_conjugate_on(section, psi)? {
            ExtendedValue::NegInf => ExtendedValue::PosInf,
            ExtendedValue::PosInf => ExtendedValue::NegInf,
            ExtendedValue::Finite(c) => ExtendedValue::finite(psi.eval(self.perturbation.anchor()) - c),
        })
    }

    pub fn eval(&self, x: &[f64], psi: &DualParameter) -> Result<ExtendedValue> {
        self.eval_on(&self.section(x)?, psi)
    }

    /// `L(x, psi)` for every grid `x` and every parameter.
    pub fn table(&self, x_grid: &Grid, params: &[DualParameter]) -> Result<LagrangianTable> {
        if x_grid.dim() != self.perturbation.x_dim() {
            return Err(Error::Dimension {
                expected: self.perturbation.x_dim(),
                found: x_grid.dim(),
            });
        }
        if params.is_empty() {
            return Err(Error::InvalidParameter("no dual parameters".into()));
        }
        let rows: Vec<Vec<ExtendedValue>> = (0..x_grid.len())
            .into_par_iter()
            .map(|i| {
                let section = self.section(&x_grid.point(i))?;
                params.iter().map(|psi| self.eval_on(&section, psi)).collect()
            })
            .collect::<Result<_>>()?;
        Ok(LagrangianTable {
            x_grid: x_grid.clone(),
            params: params.to_vec(),
            values: rows.into_iter().flatten().collect(),
        })
    }

    /// `max_psi L(x, psi)` over the sampled parameters.
    pub fn sup_over_dual(&self, x: &[f64], params: &[DualParameter]) -> Result<DualSupremum> {
        let section = self.section(x)?;
        let values = params.iter().map(|psi| self.eval_on(&section, psi)).collect::<Result<Vec<_>>>()?;
        let (value, arg) = extremum_of_values(&values, ExtremumMode::Max)?;
        Ok(DualSupremum {
            value,
            argmax: arg.map(|k| params[k].clone()),
            diverging: value > ExtendedValue::finite(DIVERGENCE_CEILING),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DualSupremum {
    pub value: ExtendedValue,
    pub argmax: Option<DualParameter>,
    /// The supremum exceeds the divergence ceiling; it stands for `+inf`.
    pub diverging: bool,
}

/// `L(x, psi)` for every grid `x` (rows) and sampled `psi` (columns).
#[derive(Debug, Clone, PartialEq)]
pub struct LagrangianTable {
    pub x_grid: Grid,
    pub params: Vec<DualParameter>,
    values: Vec<ExtendedValue>,
}

impl LagrangianTable {
    pub fn value(&self, x_index: usize, param_index: usize) -> ExtendedValue {
        self.values[x_index * self.params.len() + param_index]
    }

    pub fn column_values(&self, param_index: usize) -> Vec<ExtendedValue> {
        (0..self.x_grid.len()).map(|i| self.value(i, param_index)).collect()
    }

    /// `L(., psi)` as a grid function.
    pub fn column(&self, param_index: usize) -> GridFunction {
        GridFunction::from_values(&self.x_grid, self.column_values(param_index)).expect("column length matches grid")
    }

    /// `q(psi) = min_x L(x, psi)` for every parameter.
    pub fn dual_function(&self) -> Vec<ExtendedValue> {
        (0..self.params.len())
            .into_par_iter()
            .map(|p| extremum_of_values(&self.column_values(p), ExtremumMode::Min).expect("nonempty").0)
            .collect()
    }

    /// `max_psi L(x, psi)` for every grid `x`.
    pub fn row_suprema(&self) -> Vec<ExtendedValue> {
        let p = self.params.len();
        self.values
            .chunks(p)
            .map(|row| extremum_of_values(row, ExtremumMode::Max).expect("nonempty").0)
            .collect()
    }

    /// CSV with columns `x1..xn,a,v1..vm,L`.
    pub fn to_csv(&self) -> String {
        let n = self.x_grid.dim();
        let m = self.params.first().map_or(0, |p| p.dim());
        let mut out = String::new();
        for d in 1..=n {
            out.push_str(&format!("x{d},"));
        }
        out.push_str("a,");
        for d in 1..=m {
            out.push_str(&format!("v{d},"));
        }
        out.push_str("L\n");
        for i in 0..self.x_grid.len() {
            let x = self.x_grid.point(i);
            for (k, psi) in self.params.iter().enumerate() {
                for c in &x {
                    out.push_str(&format!("{c},"));
                }
                out.push_str(&format!("{},", psi.a()));
                for v in psi.v() {
                    out.push_str(&format!("{v},"));
                }
                out.push_str(&format!("{}\n", self.value(i, k)));
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClosedFormValue {
    pub value: f64,
    /// Minimizer `y_i = max{g_i(x), v_i / 2a}` of the inner problem.
    pub inner_argmin: Vec<f64>,
}

/// `f(x) + sum_i [-v_i m_i + a m_i^2]` with `m_i = max{g_i(x), v_i / 2a}`.
pub fn augmented_lagrangian_closed_form(p: &ConstraintPerturbation, x: &[f64], a: f64, v: &[f64]) -> Result<ClosedFormValue> {
    if !(a.is_finite() && a > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "the closed form needs a > 0 (got {a}); use the affine class for a = 0"
        )));
    }
    let g = p.constraint_values(x);
    if v.len() != g.len() {
        return Err(Error::Dimension {
            expected: g.len(),
            found: v.len(),
        });
    }
    let fx = p.base().eval(x).as_finite().ok_or(Error::NonFiniteBase)?;
    let inner_argmin: Vec<f64> = g.iter().zip(v).map(|(gi, vi)| gi.max(vi / (2.0 * a))).collect();
    let penalty: f64 = inner_argmin.iter().zip(v).map(|(m, vi)| -vi * m + a * m * m).sum();
    Ok(ClosedFormValue {
        value: fx + penalty,
        inner_argmin,
    })
}

/// The closed form written with `u = -v`:
/// `f(x) + sum_i [u_i m_i + a m_i^2]` with `m_i = max{g_i(x), -u_i / 2a}`.
pub fn augmented_lagrangian_multiplier_form(p: &ConstraintPerturbation, x: &[f64], a: f64, u: &[f64]) -> Result<ClosedFormValue> {
    if !(a.is_finite() && a > 0.0) {
        return Err(Error::InvalidParameter(format!("the closed form needs a > 0 (got {a})")));
    }
    let g = p.constraint_values(x);
    if u.len() != g.len() {
        return Err(Error::Dimension {
            expected: g.len(),
            found: u.len(),
        });
    }
    let fx = p.base().eval(x).as_finite().ok_or(Error::NonFiniteBase)?;
    let inner_argmin: Vec<f64> = g.iter().zip(u).map(|(gi, ui)| gi.max(-ui / (2.0 * a))).collect();
    let penalty: f64 = inner_argmin.iter().zip(u).map(|(m, ui)| ui * m + a * m * m).sum();
    Ok(ClosedFormValue {
        value: fx + penalty,
        inner_argmin,
    })
}
