//! Expression-defined extended-real functions on boxes and exact grid extrema.

use rayon::prelude::*;
use serde::Serialize;

use crate::domain::{BoxDomain, Grid};
use crate::elementary::ElementaryFunction;
use crate::error::{Error, Result};
use crate::expr::{parse_expression, Expr};
use crate::extended::ExtendedValue;

/// Slack allowed when testing `g(x) <= 0`. Equality constraints written as two
/// inequalities need this to survive rounding on grid points.
pub const FEAS_TOL: f64 = 1e-9;

/// Anything that can be evaluated pointwise as an extended real.
pub trait ExtendedFunction: Send + Sync {
    fn dim(&self) -> usize;

    fn eval(&self, x: &[f64]) -> ExtendedValue;

    /// The box the function is defined on, if it has one.
    fn domain(&self) -> Option<&BoxDomain> {
        None
    }
}

impl ExtendedFunction for ElementaryFunction {
    fn dim(&self) -> usize {
        ElementaryFunction::dim(self)
    }

    fn eval(&self, x: &[f64]) -> ExtendedValue {
        ExtendedValue::finite(ElementaryFunction::eval(self, x))
    }
}

/// Maps a raw evaluation onto the extended reals. NaN marks a point outside
/// the natural domain of the expression (for example `sqrt` of a negative) and
/// becomes `+inf`.
pub(crate) fn to_extended(value: f64) -> ExtendedValue {
    ExtendedValue::from_f64(value).unwrap_or(ExtendedValue::PosInf)
}

/// `f(x)` if every `g_i(x) <= 0`, `+inf` otherwise.
#[derive(Debug, Clone, PartialEq)]
pub struct ObjectiveFunction {
    source: String,
    expr: Expr,
    constraint_sources: Vec<String>,
    constraints: Vec<Expr>,
    domain: BoxDomain,
}

impl ObjectiveFunction {
    pub fn parse<S: AsRef<str>>(expression: &str, constraints: &[S], domain: BoxDomain) -> Result<Self> {
        let n = domain.dim();
        let expr = parse_expression(expression, n)?;
        let mut parsed = Vec::with_capacity(constraints.len());
        for c in constraints {
            parsed.push(parse_expression(c.as_ref(), n)?);
        }
        Ok(Self {
            source: expression.to_string(),
            expr,
            constraint_sources: constraints.iter().map(|c| c.as_ref().to_string()).collect(),
            constraints: parsed,
            domain,
        })
    }

    /// Assembles an objective from already parsed parts.
    pub(crate) fn from_parts(source: String, expr: Expr, constraint_sources: Vec<String>, constraints: Vec<Expr>, domain: BoxDomain) -> Self {
        Self {
            source,
            expr,
            constraint_sources,
            constraints,
            domain,
        }
    }

    pub fn constraints(&self) -> &[Expr] {
        &self.constraints
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn constraint_sources(&self) -> &[String] {
        &self.constraint_sources
    }

    pub fn expr(&self) -> &Expr {
        &self.expr
    }

    pub fn box_domain(&self) -> &BoxDomain {
        &self.domain
    }

    pub fn is_feasible(&self, x: &[f64]) -> bool {
        self.constraints.iter().all(|g| g.eval_x(x) <= FEAS_TOL)
    }

    /// Value of the expression ignoring the constraints.
    pub fn eval_unconstrained(&self, x: &[f64]) -> ExtendedValue {
        to_extended(self.expr.eval_x(x))
    }

    /// Properness on a grid: some point finite, none at `-inf`.
    pub fn check_proper(&self, grid: &Grid) -> Result<()> {
        crate::sampled::GridFunction::tabulate(self, grid)?.check_proper()
    }
}

impl ExtendedFunction for ObjectiveFunction {
    fn dim(&self) -> usize {
        self.domain.dim()
    }

    fn eval(&self, x: &[f64]) -> ExtendedValue {
        if self.is_feasible(x) {
            self.eval_unconstrained(x)
        } else {
            ExtendedValue::PosInf
        }
    }

    fn domain(&self) -> Option<&BoxDomain> {
        Some(&self.domain)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExtremumMode {
    Min,
    Max,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Extremum {
    pub value: ExtendedValue,
    /// Flat grid index of the first point attaining `value`.
    #[serde(skip)]
    pub index: Option<usize>,
    pub argpoint: Option<Vec<f64>>,
}

/// Extremum of tabulated values. Points at the "wrong" infinity (`+inf` for
/// min, `-inf` for max) are skipped unless every point is there. Ties resolve
/// to the smallest index.
pub fn extremum_of_values(values: &[ExtendedValue], mode: ExtremumMode) -> Result<(ExtendedValue, Option<usize>)> {
    if values.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let better = |a: ExtendedValue, b: ExtendedValue| match mode {
        ExtremumMode::Min => a < b,
        ExtremumMode::Max => a > b,
    };
    let skip = match mode {
        ExtremumMode::Min => ExtendedValue::PosInf,
        ExtremumMode::Max => ExtendedValue::NegInf,
    };
    let best = values
        .par_iter()
        .enumerate()
        .filter(|(_, v)| **v != skip)
        .map(|(i, v)| (*v, i))
        .reduce_with(|l, r| {
            if better(r.0, l.0) || (r.0 == l.0 && r.1 < l.1) {
                r
            } else {
                l
            }
        });
    Ok(match best {
        Some((v, i)) => (v, Some(i)),
        None => (skip, None),
    })
}

/// Exact extremum of `f` over the points of `grid`.
pub fn grid_extremum(f: &dyn ExtendedFunction, grid: &Grid, mode: ExtremumMode) -> Result<Extremum> {
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    if f.dim() != grid.dim() {
        return Err(Error::Dimension {
            expected: f.dim(),
            found: grid.dim(),
        });
    }
    if let Some(domain) = f.domain() {
        let inside = (0..grid.dim()).all(|d| {
            let (lo, hi) = (grid.domain().lower()[d], grid.domain().upper()[d]);
            lo >= domain.lower()[d] - FEAS_TOL && hi <= domain.upper()[d] + FEAS_TOL
        });
        if !inside {
            return Err(Error::InvalidGrid("grid extends outside the function's box".into()));
        }
    }
    let values: Vec<ExtendedValue> = (0..grid.len())
        .into_par_iter()
        .map_init(|| vec![0.0; grid.dim()], |buf, i| {
            grid.point_into(i, buf);
            f.eval(buf)
        })
        .collect();
    let (value, index) = extremum_of_values(&values, mode)?;
    Ok(Extremum {
        value,
        index,
        argpoint: index.map(|i| grid.point(i)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn objective(src: &str, constraints: &[&str], lo: f64, hi: f64) -> ObjectiveFunction {
        ObjectiveFunction::parse(src, constraints, BoxDomain::interval(lo, hi).unwrap()).unwrap()
    }

    #[test]
    fn minimum_of_parabola() {
        let f = objective("x1^2", &[], -2.0, 2.0);
        let g = Grid::interval(-2.0, 2.0, 401).unwrap();
        let m = grid_extremum(&f, &g, ExtremumMode::Min).unwrap();
        assert_eq!(m.value, ExtendedValue::finite(0.0));
        assert_eq!(m.argpoint, Some(vec![0.0]));
    }

    #[test]
    fn infeasible_everywhere_is_pos_inf() {
        let f = objective("x1^2", &["x1 - 1"], 2.0, 3.0);
        let g = Grid::interval(2.0, 3.0, 11).unwrap();
        let m = grid_extremum(&f, &g, ExtremumMode::Min).unwrap();
        assert_eq!(m.value, ExtendedValue::PosInf);
        assert_eq!(m.argpoint, None);
    }

    #[test]
    fn maximum_of_concave_parabola() {
        let f = objective("x1 - x1^2", &[], -2.0, 2.0);
        let g = Grid::interval(-2.0, 2.0, 4001).unwrap();
        let m = grid_extremum(&f, &g, ExtremumMode::Max).unwrap();
        assert!((m.value.to_f64() - 0.25).abs() < 1e-12);
        assert!((m.argpoint.unwrap()[0] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn ties_go_to_first_point() {
        let f = objective("min((x1+1)^2, (x1-1)^2)", &[], -2.0, 2.0);
        let g = Grid::interval(-2.0, 2.0, 5).unwrap();
        let m = grid_extremum(&f, &g, ExtremumMode::Min).unwrap();
        assert_eq!(m.argpoint, Some(vec![-1.0]));
    }

    #[test]
    fn nan_maps_to_pos_inf() {
        let f = objective("sqrt(x1)", &[], -1.0, 1.0);
        assert_eq!(f.eval(&[-1.0]), ExtendedValue::PosInf);
        assert_eq!(f.eval(&[4.0]), ExtendedValue::finite(2.0));
    }

    #[test]
    fn rejects_grid_outside_box() {
        let f = objective("x1", &[], 0.0, 1.0);
        let g = Grid::interval(-1.0, 1.0, 3).unwrap();
        assert!(matches!(grid_extremum(&f, &g, ExtremumMode::Min), Err(Error::InvalidGrid(_))));
    }

    #[test]
    fn properness() {
        let g = Grid::interval(-1.0, 1.0, 3).unwrap();
        assert!(objective("x1", &[], -1.0, 1.0).check_proper(&g).is_ok());
        assert!(objective("x1", &["x1 - 5", "1 - x1 - 5"], -1.0, 1.0).check_proper(&g).is_ok());
        assert!(objective("x1", &["1"], -1.0, 1.0).check_proper(&g).is_err());
        assert!(objective("-1/(x1^2)", &[], -1.0, 1.0).check_proper(&g).is_err());
    }

    proptest! {
        #[test]
        fn min_is_a_lower_bound(a in -3.0f64..3.0, b in -3.0f64..3.0, n in 2usize..60) {
            let f = objective(&format!("sin({a}*x1) + {b}*x1^2"), &[], -2.0, 2.0);
            let g = Grid::interval(-2.0, 2.0, n).unwrap();
            let m = grid_extremum(&f, &g, ExtremumMode::Min).unwrap();
            for p in g.points() {
                prop_assert!(m.value <= f.eval(&p));
            }
            prop_assert_eq!(f.eval(&m.argpoint.unwrap()), m.value);
        }

        #[test]
        fn refinement_is_monotone(a in -3.0f64..3.0, n in 2usize..40) {
            let f = objective(&format!("cos({a}*x1) - x1^3"), &[], -2.0, 2.0);
            let g = Grid::interval(-2.0, 2.0, n).unwrap();
            let fine = g.refined();
            let (lo, hi) = (
                grid_extremum(&f, &g, ExtremumMode::Min).unwrap().value,
                grid_extremum(&f, &g, ExtremumMode::Max).unwrap().value,
            );
            prop_assert!(grid_extremum(&f, &fine, ExtremumMode::Min).unwrap().value <= lo);
            prop_assert!(grid_extremum(&f, &fine, ExtremumMode::Max).unwrap().value >= hi);
        }
    }
}
