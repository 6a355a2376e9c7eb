//! Perturbation functions `p(x, y)` with an anchor `y0` where `p(x, y0) = f(x)`.

use std::fmt::Debug;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::domain::BoxDomain;
use crate::error::{Error, Result};
use crate::expr::{parse_expression, parse_expression_xy, BinOp, Expr};
use crate::extended::ExtendedValue;
use crate::objective::{to_extended, ExtendedFunction, ObjectiveFunction, FEAS_TOL};
use crate::registry::Registry;

use super::dual_class::DualParameter;

pub trait Perturbation: Send + Sync + Debug {
    fn kind(&self) -> &'static str;

    fn x_domain(&self) -> &BoxDomain;

    fn x_dim(&self) -> usize {
        self.x_domain().dim()
    }

    fn y_dim(&self) -> usize;

    fn anchor(&self) -> &[f64];

    /// The objective `f`, built independently of `eval` so that the anchor
    /// identity `p(x, y0) = f(x)` is a genuine check.
    fn objective(&self) -> &ObjectiveFunction;

    fn eval(&self, x: &[f64], y: &[f64]) -> Result<ExtendedValue>;

    /// `p(x, .)` at every point of a flattened list of `y` coordinates.
    fn section(&self, x: &[f64], y_points: &[f64]) -> Result<Vec<ExtendedValue>> {
        y_points.chunks(self.y_dim()).map(|y| self.eval(x, y)).collect()
    }

    /// Lagrangian value in closed form, for parameters where a grid supremum
    /// over a bounded box would misrepresent an unbounded one.
    fn closed_form_lagrangian(&self, _x: &[f64], _psi: &DualParameter) -> Option<ExtendedValue> {
        None
    }
}

fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::Dimension { expected, found })
    }
}

/// `p(x, y) = f(x)` if `g_i(x) <= y_i` for every `i`, `+inf` otherwise; `y0 = 0`.
#[derive(Debug, Clone)]
pub struct ConstraintPerturbation {
    base: ObjectiveFunction,
    constraints: Vec<Expr>,
    constraint_sources: Vec<String>,
    objective: ObjectiveFunction,
    anchor: Vec<f64>,
}

impl ConstraintPerturbation {
    /// `base` may carry its own indicator constraints; those are not perturbed.
    pub fn new<S: AsRef<str>>(base: ObjectiveFunction, constraints: &[S]) -> Result<Self> {
        if constraints.is_empty() {
            return Err(Error::InvalidParameter("the constraint kind needs at least one constraint".into()));
        }
        let n = base.box_domain().dim();
        let parsed = constraints
            .iter()
            .map(|c| parse_expression(c.as_ref(), n))
            .collect::<Result<Vec<_>>>()?;
        let sources: Vec<String> = constraints.iter().map(|c| c.as_ref().to_string()).collect();
        let mut all_sources = base.constraint_sources().to_vec();
        all_sources.extend(sources.iter().cloned());
        let mut all = base.constraints().to_vec();
        all.extend(parsed.iter().cloned());
        let objective = ObjectiveFunction::from_parts(base.source().to_string(), base.expr().clone(), all_sources, all, base.box_domain().clone());
        Ok(Self {
            anchor: vec![0.0; parsed.len()],
            base,
            constraints: parsed,
            constraint_sources: sources,
            objective,
        })
    }

    /// `f` without the perturbed constraints.
    pub fn base(&self) -> &ObjectiveFunction {
        &self.base
    }

    pub fn constraint_sources(&self) -> &[String] {
        &self.constraint_sources
    }

    /// `G(x) = (g_1(x), ..., g_m(x))`.
    pub fn constraint_values(&self, x: &[f64]) -> Vec<f64> {
        self.constraints.iter().map(|g| g.eval_x(x)).collect()
    }
}

impl Perturbation for ConstraintPerturbation {
    fn kind(&self) -> &'static str {
        "constraint"
    }

    fn x_domain(&self) -> &BoxDomain {
        self.base.box_domain()
    }

    fn y_dim(&self) -> usize {
        self.constraints.len()
    }

    fn anchor(&self) -> &[f64] {
        &self.anchor
    }

    fn objective(&self) -> &ObjectiveFunction {
        &self.objective
    }

    fn eval(&self, x: &[f64], y: &[f64]) -> Result<ExtendedValue> {
        check_len(self.y_dim(), y.len())?;
        let fx = self.base.eval(x);
        if fx.is_pos_inf() {
            return Ok(fx);
        }
        let feasible = self.constraints.iter().zip(y).all(|(g, yi)| g.eval_x(x) <= yi + FEAS_TOL);
        Ok(if feasible { fx } else { ExtendedValue::PosInf })
    }

    fn section(&self, x: &[f64], y_points: &[f64]) -> Result<Vec<ExtendedValue>> {
        let m = self.y_dim();
        let fx = self.base.eval(x);
        let gx = self.constraint_values(x);
        Ok(y_points
            .chunks(m)
            .map(|y| {
                if fx.is_pos_inf() || !gx.iter().zip(y).all(|(g, yi)| *g <= yi + FEAS_TOL) {
                    ExtendedValue::PosInf
                } else {
                    fx
                }
            })
            .collect())
    }

    /// With `a = 0` the infimum over `y >= G(x)` is unbounded below as soon as
    /// some `v_i > 0`; otherwise it is attained at `y = G(x)`.
    fn closed_form_lagrangian(&self, x: &[f64], psi: &DualParameter) -> Option<ExtendedValue> {
        if psi.a() != 0.0 {
            return None;
        }
        let fx = self.base.eval(x);
        if fx.is_pos_inf() {
            return Some(fx);
        }
        if psi.v().iter().any(|v| *v > 0.0) {
            return Some(ExtendedValue::NegInf);
        }
        let gx = self.constraint_values(x);
        if gx.iter().any(|g| g.is_nan()) {
            return Some(ExtendedValue::PosInf);
        }
        let pairing: f64 = psi.v().iter().zip(&gx).map(|(v, g)| v * g).sum();
        Some(fx.add_finite(-pairing))
    }
}

/// `p(x, y) = g(x) + h(x - y)` on `Y = X`, `y0 = 0`, so `f = g + h`.
#[derive(Debug, Clone)]
pub struct FenchelPerturbation {
    g: ObjectiveFunction,
    h: ObjectiveFunction,
    objective: ObjectiveFunction,
    anchor: Vec<f64>,
}

impl FenchelPerturbation {
    pub fn new(g: ObjectiveFunction, h: ObjectiveFunction) -> Result<Self> {
        check_len(g.box_domain().dim(), h.box_domain().dim())?;
        let mut sources = g.constraint_sources().to_vec();
        sources.extend(h.constraint_sources().iter().cloned());
        let mut constraints = g.constraints().to_vec();
        constraints.extend(h.constraints().iter().cloned());
        let objective = ObjectiveFunction::from_parts(
            format!("({}) + ({})", g.source(), h.source()),
            Expr::Binary(BinOp::Add, Box::new(g.expr().clone()), Box::new(h.expr().clone())),
            sources,
            constraints,
            g.box_domain().clone(),
        );
        let n = g.box_domain().dim();
        Ok(Self {
            g,
            h,
            objective,
            anchor: vec![0.0; n],
        })
    }

    pub fn g(&self) -> &ObjectiveFunction {
        &self.g
    }

    pub fn h(&self) -> &ObjectiveFunction {
        &self.h
    }
}

impl Perturbation for FenchelPerturbation {
    fn kind(&self) -> &'static str {
        "fenchel"
    }

    fn x_domain(&self) -> &BoxDomain {
        self.g.box_domain()
    }

    fn y_dim(&self) -> usize {
        self.anchor.len()
    }

    fn anchor(&self) -> &[f64] {
        &self.anchor
    }

    fn objective(&self) -> &ObjectiveFunction {
        &self.objective
    }

    fn eval(&self, x: &[f64], y: &[f64]) -> Result<ExtendedValue> {
        check_len(self.y_dim(), y.len())?;
        let gx = self.g.eval(x);
        if gx.is_pos_inf() {
            return Ok(gx);
        }
        let shifted: Vec<f64> = x.iter().zip(y).map(|(a, b)| a - b).collect();
        gx.checked_add(self.h.eval(&shifted))
    }

    fn section(&self, x: &[f64], y_points: &[f64]) -> Result<Vec<ExtendedValue>> {
        let n = self.y_dim();
        let gx = self.g.eval(x);
        let mut shifted = vec![0.0; n];
        y_points
            .chunks(n)
            .map(|y| {
                if gx.is_pos_inf() {
                    return Ok(gx);
                }
                for (s, (a, b)) in shifted.iter_mut().zip(x.iter().zip(y)) {
                    *s = a - b;
                }
                gx.checked_add(self.h.eval(&shifted))
            })
            .collect()
    }
}

/// A two-argument expression in `x1..xn, y1..ym` with optional indicator
/// constraints in the same variables.
#[derive(Debug, Clone)]
pub struct CustomPerturbation {
    expr: Expr,
    constraints: Vec<Expr>,
    domain: BoxDomain,
    anchor: Vec<f64>,
    objective: ObjectiveFunction,
}

impl CustomPerturbation {
    pub fn new<S: AsRef<str>>(expression: &str, constraints: &[S], domain: BoxDomain, anchor: Vec<f64>) -> Result<Self> {
        if anchor.is_empty() || anchor.iter().any(|a| !a.is_finite()) {
            return Err(Error::InvalidParameter("anchor must be a nonempty finite vector".into()));
        }
        let (n, m) = (domain.dim(), anchor.len());
        let expr = parse_expression_xy(expression, n, m)?;
        let parsed = constraints
            .iter()
            .map(|c| parse_expression_xy(c.as_ref(), n, m))
            .collect::<Result<Vec<_>>>()?;
        let objective = ObjectiveFunction::from_parts(
            expression.to_string(),
            expr.substitute_y(&anchor),
            constraints.iter().map(|c| c.as_ref().to_string()).collect(),
            parsed.iter().map(|c| c.substitute_y(&anchor)).collect(),
            domain.clone(),
        );
        Ok(Self {
            expr,
            constraints: parsed,
            domain,
            anchor,
            objective,
        })
    }
}

impl Perturbation for CustomPerturbation {
    fn kind(&self) -> &'static str {
        "custom"
    }

    fn x_domain(&self) -> &BoxDomain {
        &self.domain
    }

    fn y_dim(&self) -> usize {
        self.anchor.len()
    }

    fn anchor(&self) -> &[f64] {
        &self.anchor
    }

    fn objective(&self) -> &ObjectiveFunction {
        &self.objective
    }

    fn eval(&self, x: &[f64], y: &[f64]) -> Result<ExtendedValue> {
        check_len(self.y_dim(), y.len())?;
        if self.constraints.iter().any(|c| !(c.eval(x, y) <= FEAS_TOL)) {
            return Ok(ExtendedValue::PosInf);
        }
        Ok(to_extended(self.expr.eval(x, y)))
    }
}

/// An expression with its own indicator constraints.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctionSpec {
    pub expression: String,
    #[serde(default)]
    pub constraints: Vec<String>,
}

/// Serializable description of a perturbation; `kind` selects the builder.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PerturbationSpec {
    pub kind: String,
    /// Lower corner of the `x` box.
    pub lower: Vec<f64>,
    /// Upper corner of the `x` box.
    pub upper: Vec<f64>,
    /// `constraint` kind: the objective (may carry unperturbed constraints).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub objective: Option<FunctionSpec>,
    /// `constraint` kind: the perturbed `g_i`. `custom` kind: constraints in `x, y`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub constraints: Vec<String>,
    /// `fenchel` kind.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g: Option<FunctionSpec>,
    /// `fenchel` kind.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h: Option<FunctionSpec>,
    /// `custom` kind: `p(x, y)` in `x1..xn, y1..ym`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expression: Option<String>,
    /// `custom` kind: the anchor `y0`, which also fixes `m`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub anchor: Option<Vec<f64>>,
}

impl PerturbationSpec {
    fn domain(&self) -> Result<BoxDomain> {
        BoxDomain::new(self.lower.clone(), self.upper.clone())
    }

    fn function(&self, field: &'static str, spec: &Option<FunctionSpec>) -> Result<ObjectiveFunction> {
        let spec = spec
            .as_ref()
            .ok_or_else(|| Error::InvalidParameter(format!("kind `{}` requires `{field}`", self.kind)))?;
        ObjectiveFunction::parse(&spec.expression, &spec.constraints, self.domain()?)
    }

    pub fn build(&self) -> Result<Arc<dyn Perturbation>> {
        perturbation_registry().create(&self.kind)?.build(self)
    }
}

/// Builds one perturbation kind from a spec.
pub trait PerturbationBuilder: Send + Sync {
    fn build(&self, spec: &PerturbationSpec) -> Result<Arc<dyn Perturbation>>;
}

struct ConstraintBuilder;

impl PerturbationBuilder for ConstraintBuilder {
    fn build(&self, spec: &PerturbationSpec) -> Result<Arc<dyn Perturbation>> {
        let base = spec.function("objective", &spec.objective)?;
        Ok(Arc::new(ConstraintPerturbation::new(base, &spec.constraints)?))
    }
}

struct FenchelBuilder;

impl PerturbationBuilder for FenchelBuilder {
    fn build(&self, spec: &PerturbationSpec) -> Result<Arc<dyn Perturbation>> {
        let g = spec.function("g", &spec.g)?;
        let h = spec.function("h", &spec.h)?;
        Ok(Arc::new(FenchelPerturbation::new(g, h)?))
    }
}

struct CustomBuilder;

impl PerturbationBuilder for CustomBuilder {
    fn build(&self, spec: &PerturbationSpec) -> Result<Arc<dyn Perturbation>> {
        let expression = spec
            .expression
            .as_ref()
            .ok_or_else(|| Error::InvalidParameter("kind `custom` requires `expression`".into()))?;
        let anchor = spec
            .anchor
            .clone()
            .ok_or_else(|| Error::InvalidParameter("kind `custom` requires `anchor`".into()))?;
        Ok(Arc::new(CustomPerturbation::new(expression, &spec.constraints, spec.domain()?, anchor)?))
    }
}

pub fn perturbation_registry() -> Registry<dyn PerturbationBuilder> {
    let mut r: Registry<dyn PerturbationBuilder> = Registry::new("perturbation kind");
    r.register("constraint", || Arc::new(ConstraintBuilder) as Arc<dyn PerturbationBuilder>);
    r.register("fenchel", || Arc::new(FenchelBuilder) as Arc<dyn PerturbationBuilder>);
    r.register("custom", || Arc::new(CustomBuilder) as Arc<dyn PerturbationBuilder>);
    r
}
