//! The JSON run configuration and its resolution into core objects.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use phidual_core::catalog::{self, CatalogEntry, DualitySetup, Problem};
use phidual_core::lagrangian::{dual_class, PerturbationSpec};
use phidual_core::{BoxDomain, ElementaryClass, ElementaryFunction, Grid, ObjectiveFunction, ParameterGrid};
use serde::Deserialize;

use crate::CliError;

/// Uniform grid on a box; a single `points` entry applies to every axis.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub points: Vec<usize>,
}

impl GridSpec {
    pub fn build(&self, field: &str) -> Result<Grid, CliError> {
        let domain = BoxDomain::new(self.lower.clone(), self.upper.clone()).map_err(|e| CliError::field(field, e))?;
        let points = match self.points.as_slice() {
            [n] => vec![*n; domain.dim()],
            p => p.to_vec(),
        };
        Grid::new(domain, points).map_err(|e| CliError::field(field, e))
    }
}

/// Parameter sample: curvatures times a grid of linear parts, plus seeds.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParameterSpec {
    /// Class of conjugating functions; ignored by duality commands, which use
    /// `dual_class`.
    #[serde(default)]
    pub class: Option<ElementaryClass>,
    #[serde(default)]
    pub a_values: Option<Vec<f64>>,
    #[serde(default)]
    pub ell: Option<GridSpec>,
    #[serde(default)]
    pub seeds: Vec<(f64, Vec<f64>)>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InlineFunction {
    pub expression: String,
    #[serde(default)]
    pub constraints: Vec<String>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

/// Problem given in the configuration instead of by catalog name.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InlineProblem {
    #[serde(default)]
    pub function: Option<InlineFunction>,
    #[serde(default)]
    pub perturbation: Option<PerturbationSpec>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ElementarySpec {
    pub class: ElementaryClass,
    #[serde(default)]
    pub a: f64,
    pub ell: Vec<f64>,
    #[serde(default)]
    pub c: f64,
}

impl ElementarySpec {
    pub fn build(&self, field: &str) -> Result<ElementaryFunction, CliError> {
        ElementaryFunction::new(self.class, self.a, self.ell.clone(), self.c).map_err(|e| CliError::field(field, e))
    }
}

/// Every field is optional; command-line flags override the file.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Catalog entry name.
    #[serde(default)]
    pub problem: Option<String>,
    #[serde(default)]
    pub inline: Option<InlineProblem>,
    /// `affine` or `quad`.
    #[serde(default)]
    pub dual_class: Option<String>,
    #[serde(default)]
    pub parameters: Option<ParameterSpec>,
    #[serde(default)]
    pub x_grid: Option<GridSpec>,
    #[serde(default)]
    pub y_grid: Option<GridSpec>,
    #[serde(default)]
    pub point: Option<Vec<f64>>,
    #[serde(default)]
    pub epsilon: Option<f64>,
    #[serde(default)]
    pub alphas: Option<Vec<f64>>,
    /// Explicit pair for `intersect`; without it the witness search runs.
    #[serde(default)]
    pub pair: Option<(ElementarySpec, ElementarySpec)>,
    #[serde(default)]
    pub t_steps: Option<usize>,
    #[serde(default)]
    pub budget: Option<usize>,
    #[serde(default)]
    pub criteria: Option<Vec<u8>>,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub csv: Option<PathBuf>,
    #[serde(default)]
    pub threads: Option<usize>,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            CliError::Validation(format!("config field `{path}`: {}", e.into_inner()))
        })
    }

    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Validation(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn dual_class_name(&self) -> &str {
        self.dual_class.as_deref().unwrap_or("quad")
    }

    fn check_exclusive(&self) -> Result<(), CliError> {
        match (&self.problem, &self.inline) {
            (Some(_), Some(_)) => Err(CliError::Validation("config fields `problem` and `inline` are mutually exclusive".into())),
            (None, None) => Err(CliError::Validation("config needs `problem` (catalog name) or `inline`".into())),
            _ => Ok(()),
        }
    }

    fn catalog_entry(&self) -> Result<Option<Arc<CatalogEntry>>, CliError> {
        self.check_exclusive()?;
        match &self.problem {
            Some(name) => catalog::load(name).map(Some).map_err(|e| CliError::field("problem", e)),
            None => Ok(None),
        }
    }

    /// A function on a grid, for the conjugation and subdifferential commands.
    pub fn function_problem(&self) -> Result<FunctionProblem, CliError> {
        let entry = self.catalog_entry()?;
        let (function, default_grid, a_max) = match &entry {
            Some(e) => {
                let a_max = match &e.problem {
                    Problem::Function { a_max, .. } => *a_max,
                    Problem::Duality(_) => 8.0,
                };
                (e.objective().clone(), Some(e.grid().clone()), a_max)
            }
            None => {
                let inline = self.inline.as_ref().expect("checked");
                let f = inline
                    .function
                    .as_ref()
                    .ok_or_else(|| CliError::Validation("config field `inline.function` is required for this command".into()))?;
                let domain = BoxDomain::new(f.lower.clone(), f.upper.clone()).map_err(|e| CliError::field("inline.function", e))?;
                let function = ObjectiveFunction::parse(&f.expression, &f.constraints, domain).map_err(|e| CliError::field("inline.function", e))?;
                (function, None, 8.0)
            }
        };
        let grid = match (&self.x_grid, default_grid) {
            (Some(spec), _) => spec.build("x_grid")?,
            (None, Some(g)) => g,
            (None, None) => return Err(CliError::Validation("config field `x_grid` is required for inline functions".into())),
        };
        let pg = self.conjugation_pg(grid.dim(), a_max)?;
        Ok(FunctionProblem { function, grid, pg })
    }

    fn conjugation_pg(&self, dim: usize, a_max: f64) -> Result<ParameterGrid, CliError> {
        let spec = self.parameters.clone().unwrap_or_default();
        let class = spec.class.unwrap_or(ElementaryClass::QuadMinorant);
        let ell = match &spec.ell {
            Some(g) => g.build("parameters.ell")?,
            None => {
                let points = if dim == 1 { 801 } else { 21 };
                Grid::uniform(BoxDomain::cube(dim, -40.0, 40.0).expect("valid box"), points).expect("valid grid")
            }
        };
        let pg = match class {
            ElementaryClass::Affine => ParameterGrid::affine(ell),
            _ => {
                let mut a_values = spec.a_values.clone().unwrap_or_else(|| {
                    let mut v = vec![0.0, 0.5, 1.0, 2.0, 4.0, 8.0];
                    if !v.contains(&a_max) {
                        v.push(a_max);
                    }
                    v.sort_by(f64::total_cmp);
                    v
                });
                a_values.dedup();
                ParameterGrid::new(class, a_values, ell).map_err(|e| CliError::field("parameters", e))?
            }
        };
        if spec.seeds.is_empty() {
            Ok(pg)
        } else {
            pg.with_seeds(spec.seeds).map_err(|e| CliError::field("parameters.seeds", e))
        }
    }

    /// A perturbation with grids, for the Lagrangian and duality commands.
    pub fn duality_problem(&self) -> Result<DualitySetup, CliError> {
        let entry = self.catalog_entry()?;
        let mut setup = match &entry {
            Some(e) => e
                .duality()
                .cloned()
                .ok_or_else(|| CliError::Validation(format!("catalog entry `{}` has no perturbation; use conjugate, biconj or subdiff", e.name)))?,
            None => {
                let inline = self.inline.as_ref().expect("checked");
                let spec = inline
                    .perturbation
                    .as_ref()
                    .ok_or_else(|| CliError::Validation("config field `inline.perturbation` is required for this command".into()))?;
                let p = spec.build().map_err(|e| CliError::field("inline.perturbation", e))?;
                let x_grid = self
                    .x_grid
                    .as_ref()
                    .ok_or_else(|| CliError::Validation("config field `x_grid` is required for inline problems".into()))?
                    .build("x_grid")?;
                let y_grid = self
                    .y_grid
                    .as_ref()
                    .ok_or_else(|| CliError::Validation("config field `y_grid` is required for inline problems".into()))?
                    .build("y_grid")?;
                let m = y_grid.dim();
                let cube = |n: usize, lo: f64, hi: f64, pts: usize| Grid::uniform(BoxDomain::cube(n, lo, hi).expect("valid box"), pts).expect("valid grid");
                let n = x_grid.dim();
                DualitySetup {
                    perturbation: p,
                    x_grid,
                    y_grid,
                    v_grid: cube(m, -4.0, 4.0, if m == 1 { 81 } else { 9 }),
                    a_values: vec![0.0, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0],
                    seeds: Vec::new(),
                    witness_ell_grid: cube(n, -4.0, 4.0, if n == 1 { 41 } else { 5 }),
                    witness_a_values: vec![0.0, 1.0],
                }
            }
        };
        if entry.is_some() {
            if let Some(g) = &self.x_grid {
                setup.x_grid = g.build("x_grid")?;
            }
            if let Some(g) = &self.y_grid {
                setup.y_grid = g.build("y_grid")?;
            }
        }
        if let Some(spec) = &self.parameters {
            if let Some(a) = &spec.a_values {
                setup.a_values = a.clone();
            }
            if let Some(g) = &spec.ell {
                setup.v_grid = g.build("parameters.ell")?;
            }
            if !spec.seeds.is_empty() {
                setup.seeds = spec.seeds.clone();
            }
        }
        dual_class(self.dual_class_name()).map_err(|e| CliError::field("dual_class", e))?;
        Ok(setup)
    }
}

pub struct FunctionProblem {
    pub function: ObjectiveFunction,
    pub grid: Grid,
    pub pg: ParameterGrid,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_fields_name_their_path() {
        let err = RunConfig::from_json(r#"{"problem": "abs", "x_grid": {"lower": [0], "upper": [1], "points": [3], "step": 1}}"#).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("x_grid"), "{msg}");
        assert!(msg.contains("step"), "{msg}");
    }

    #[test]
    fn type_errors_name_their_path() {
        let msg = RunConfig::from_json(r#"{"parameters": {"a_values": "many"}}"#).unwrap_err().to_string();
        assert!(msg.contains("parameters.a_values"), "{msg}");
    }

    #[test]
    fn problem_and_inline_are_exclusive() {
        let c = RunConfig::from_json(r#"{"problem": "abs", "inline": {}}"#).unwrap();
        assert!(c.function_problem().is_err());
        assert!(RunConfig::default().function_problem().is_err());
    }

    #[test]
    fn catalog_defaults() {
        let c = RunConfig::from_json(r#"{"problem": "classical-gap"}"#).unwrap();
        let s = c.duality_problem().unwrap();
        assert_eq!(s.x_grid.len(), 101);
        let f = RunConfig::from_json(r#"{"problem": "dc-kink"}"#).unwrap().function_problem().unwrap();
        assert!(f.pg.a_values().contains(&9.0));
        assert!(RunConfig::from_json(r#"{"problem": "abs"}"#).unwrap().duality_problem().is_err());
    }

    #[test]
    fn inline_problems() {
        let c = RunConfig::from_json(
            r#"{"inline": {"function": {"expression": "abs(x1)", "lower": [-1], "upper": [1]}},
                "x_grid": {"lower": [-1], "upper": [1], "points": [21]},
                "parameters": {"class": "affine", "ell": {"lower": [-1], "upper": [1], "points": [3]}}}"#,
        )
        .unwrap();
        let f = c.function_problem().unwrap();
        assert_eq!(f.pg.len(), 3);

        let c = RunConfig::from_json(
            r#"{"inline": {"perturbation": {"kind": "constraint", "lower": [0], "upper": [1],
                  "objective": {"expression": "-x1^2"}, "constraints": ["2*x1 - 1"]}},
                "x_grid": {"lower": [0], "upper": [1], "points": [11]},
                "y_grid": {"lower": [-1], "upper": [1], "points": [21]},
                "dual_class": "affine"}"#,
        )
        .unwrap();
        assert_eq!(c.duality_problem().unwrap().y_grid.len(), 21);
    }
}
