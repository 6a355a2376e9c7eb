//! Dual parameters and the classes they are drawn from.

use std::fmt::Debug;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::domain::Grid;
use crate::elementary::ElementaryClass;
use crate::error::{Error, Result};
use crate::parameters::ParameterGrid;
use crate::registry::Registry;

/// `psi(y) = -a|y|^2 + <v, y>`. The constant term never affects a Lagrangian
/// value and is omitted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualParameter {
    class: ElementaryClass,
    a: f64,
    v: Vec<f64>,
}

impl DualParameter {
    pub fn new(class: ElementaryClass, a: f64, v: Vec<f64>) -> Result<Self> {
        if class == ElementaryClass::QuadMajorant {
            return Err(Error::ClassMismatch("dual parameters come from the affine or quad_minorant class".into()));
        }
        if !(a.is_finite() && a >= 0.0) {
            return Err(Error::InvalidParameter(format!("dual curvature a = {a} must be finite and >= 0")));
        }
        if class == ElementaryClass::Affine && a != 0.0 {
            return Err(Error::InvalidParameter(format!("affine dual parameter with a = {a}")));
        }
        if v.is_empty() || v.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter("v must be a nonempty finite vector".into()));
        }
        Ok(Self { class, a, v })
    }

    pub fn affine(v: Vec<f64>) -> Result<Self> {
        Self::new(ElementaryClass::Affine, 0.0, v)
    }

    pub fn quad(a: f64, v: Vec<f64>) -> Result<Self> {
        Self::new(ElementaryClass::QuadMinorant, a, v)
    }

    /// Parameter written with the classical multiplier `u = -v`, for which the
    /// constraint-kind Lagrangian reads `f(x) + <u, G(x)>` when `a = 0`.
    pub fn from_multiplier(class: ElementaryClass, a: f64, u: &[f64]) -> Result<Self> {
        Self::new(class, a, u.iter().map(|x| -x).collect())
    }

    pub fn class(&self) -> ElementaryClass {
        self.class
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn v(&self) -> &[f64] {
        &self.v
    }

    pub fn dim(&self) -> usize {
        self.v.len()
    }

    pub fn eval(&self, y: &[f64]) -> f64 {
        let sq: f64 = y.iter().map(|t| t * t).sum();
        let lin: f64 = self.v.iter().zip(y).map(|(v, t)| v * t).sum();
        -self.a * sq + lin
    }

    /// `t * self + (1 - t) * other`, acting linearly on `(a, v)`.
    pub fn combine(&self, t: f64, other: &DualParameter) -> Result<DualParameter> {
        if self.dim() != other.dim() {
            return Err(Error::Dimension {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        let class = if self.class == ElementaryClass::Affine && other.class == ElementaryClass::Affine {
            ElementaryClass::Affine
        } else {
            ElementaryClass::QuadMinorant
        };
        let a = t * self.a + (1.0 - t) * other.a;
        let v = self.v.iter().zip(&other.v).map(|(p, q)| t * p + (1.0 - t) * q).collect();
        DualParameter::new(class, a, v)
    }

    /// Distance in `(a, v)` space.
    pub fn distance(&self, other: &DualParameter) -> f64 {
        let dv: f64 = self.v.iter().zip(&other.v).map(|(p, q)| (p - q).powi(2)).sum();
        ((self.a - other.a).powi(2) + dv).sqrt()
    }

    pub fn norm_v(&self) -> f64 {
        self.v.iter().map(|x| x * x).sum::<f64>().sqrt()
    }
}

/// A class of dual parameters, selected by name.
pub trait DualClass: Send + Sync + Debug {
    fn name(&self) -> &'static str;

    fn elementary_class(&self) -> ElementaryClass;

    /// Sample of the class over the given curvatures and linear parts. Classes
    /// without curvature ignore `a_values`.
    fn parameter_grid(&self, a_values: Vec<f64>, v_grid: Grid) -> Result<ParameterGrid>;

    fn parameter(&self, a: f64, v: Vec<f64>) -> Result<DualParameter> {
        DualParameter::new(self.elementary_class(), a, v)
    }

    /// Every member of `pg` as a dual parameter.
    fn samples(&self, pg: &ParameterGrid) -> Result<Vec<DualParameter>> {
        if pg.class() != self.elementary_class() {
            return Err(Error::ClassMismatch(format!(
                "parameter grid of class {} used with dual class {}",
                pg.class().name(),
                self.name()
            )));
        }
        pg.members().into_iter().map(|(a, v)| self.parameter(a, v)).collect()
    }
}

/// Linear dual functions `<v, y>`; yields the classical Lagrangian.
#[derive(Debug, Clone, Copy, Default)]
pub struct AffineDual;

impl DualClass for AffineDual {
    fn name(&self) -> &'static str {
        "affine"
    }

    fn elementary_class(&self) -> ElementaryClass {
        ElementaryClass::Affine
    }

    fn parameter_grid(&self, _a_values: Vec<f64>, v_grid: Grid) -> Result<ParameterGrid> {
        Ok(ParameterGrid::affine(v_grid))
    }
}

/// Concave quadratics `-a|y|^2 + <v, y>`; yields augmented Lagrangians.
#[derive(Debug, Clone, Copy, Default)]
pub struct QuadDual;

impl DualClass for QuadDual {
    fn name(&self) -> &'static str {
        "quad"
    }

    fn elementary_class(&self) -> ElementaryClass {
        ElementaryClass::QuadMinorant
    }

    fn parameter_grid(&self, a_values: Vec<f64>, v_grid: Grid) -> Result<ParameterGrid> {
        ParameterGrid::quad_minorant(a_values, v_grid)
    }
}

pub fn dual_class_registry() -> Registry<dyn DualClass> {
    let mut r: Registry<dyn DualClass> = Registry::new("dual class");
    r.register("affine", || Arc::new(AffineDual) as Arc<dyn DualClass>);
    r.register("quad", || Arc::new(QuadDual) as Arc<dyn DualClass>);
    r
}

/// Looks up a dual class by name (`affine` or `quad`).
pub fn dual_class(name: &str) -> Result<Arc<dyn DualClass>> {
    dual_class_registry().create(name)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(DualParameter::affine(vec![1.0]).is_ok());
        assert!(DualParameter::new(ElementaryClass::Affine, 1.0, vec![1.0]).is_err());
        assert!(DualParameter::quad(-1.0, vec![1.0]).is_err());
        assert!(DualParameter::quad(1.0, vec![]).is_err());
        assert!(DualParameter::new(ElementaryClass::QuadMajorant, 1.0, vec![1.0]).is_err());
    }

    #[test]
    fn multiplier_form_flips_sign() {
        let p = DualParameter::from_multiplier(ElementaryClass::Affine, 0.0, &[3.0]).unwrap();
        assert_eq!(p.v(), &[-3.0]);
    }

    #[test]
    fn combination_is_linear() {
        let p = DualParameter::quad(1.0, vec![2.0]).unwrap();
        let q = DualParameter::affine(vec![-2.0]).unwrap();
        let m = p.combine(0.25, &q).unwrap();
        assert_eq!(m.a(), 0.25);
        assert_eq!(m.v(), &[-1.0]);
        let y = [0.7];
        assert!((m.eval(&y) - (0.25 * p.eval(&y) + 0.75 * q.eval(&y))).abs() < 1e-15);
    }

    #[test]
    fn registry_lookup() {
        assert_eq!(dual_class("quad").unwrap().name(), "quad");
        assert_eq!(dual_class("affine").unwrap().elementary_class(), ElementaryClass::Affine);
        assert!(matches!(dual_class("cubic"), Err(Error::UnknownName { .. })));
        let names: Vec<_> = dual_class_registry().names().collect();
        assert_eq!(names, vec!["affine", "quad"]);
    }

    #[test]
    fn samples_follow_member_order() {
        let pg = QuadDual.parameter_grid(vec![0.0, 1.0], Grid::interval(-1.0, 1.0, 3).unwrap()).unwrap();
        let s = QuadDual.samples(&pg).unwrap();
        assert_eq!(s.len(), 6);
        assert_eq!(s[3], DualParameter::quad(1.0, vec![-1.0]).unwrap());
        assert!(AffineDual.samples(&pg).is_err());
    }
}
