//! Elementary functions: affine maps and quadratic minorants / majorants.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ElementaryClass {
    /// `⟨ℓ,x⟩ + c`
    Affine,
    /// `−a‖x‖² + ⟨ℓ,x⟩ + c`, `a ≥ 0`
    QuadMinorant,
    /// `a‖x‖² + ⟨ℓ,x⟩ + c`, `a ≥ 0`
    QuadMajorant,
}

impl ElementaryClass {
    /// Sign in front of `a‖x‖²`.
    pub fn curvature_sign(self) -> f64 {
        match self {
            ElementaryClass::QuadMajorant => 1.0,
            _ => -1.0,
        }
    }

    /// Affine and quadratic-minorant functions both belong to the lsc class.
    pub fn is_lsc(self) -> bool {
        !matches!(self, ElementaryClass::QuadMajorant)
    }

    pub fn name(self) -> &'static str {
        match self {
            ElementaryClass::Affine => "affine",
            ElementaryClass::QuadMinorant => "quad_minorant",
            ElementaryClass::QuadMajorant => "quad_majorant",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ElementaryFunction {
    class: ElementaryClass,
    a: f64,
    ell: Vec<f64>,
    c: f64,
}

impl ElementaryFunction {
    pub fn new(class: ElementaryClass, a: f64, ell: Vec<f64>, c: f64) -> Result<Self> {
        if !(a.is_finite() && a >= 0.0) {
            return Err(Error::InvalidParameter(format!("curvature a = {a} must be finite and >= 0")));
        }
        if class == ElementaryClass::Affine && a != 0.0 {
            return Err(Error::InvalidParameter(format!("affine function with a = {a}")));
        }
        if ell.is_empty() {
            return Err(Error::InvalidParameter("ell must have at least one entry".into()));
        }
        if !c.is_finite() || ell.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("non-finite elementary coefficient".into()));
        }
        Ok(Self { class, a, ell, c })
    }

    pub fn affine(ell: Vec<f64>, c: f64) -> Result<Self> {
        Self::new(ElementaryClass::Affine, 0.0, ell, c)
    }

    pub fn quad_minorant(a: f64, ell: Vec<f64>, c: f64) -> Result<Self> {
        Self::new(ElementaryClass::QuadMinorant, a, ell, c)
    }

    pub fn quad_majorant(a: f64, ell: Vec<f64>, c: f64) -> Result<Self> {
        Self::new(ElementaryClass::QuadMajorant, a, ell, c)
    }

    /// The constant function `c` on `R^n`.
    pub fn constant(n: usize, c: f64) -> Result<Self> {
        Self::affine(vec![0.0; n], c)
    }

    pub fn class(&self) -> ElementaryClass {
        self.class
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn ell(&self) -> &[f64] {
        &self.ell
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn dim(&self) -> usize {
        self.ell.len()
    }

    pub fn with_c(&self, c: f64) -> Self {
        Self { c, ..self.clone() }
    }

    pub fn is_constant(&self) -> bool {
        self.a == 0.0 && self.ell.iter().all(|v| *v == 0.0)
    }

    /// Value at `x` with the constant dropped.
    pub fn eval_without_c(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.ell.len());
        let linear: f64 = self.ell.iter().zip(x).map(|(l, v)| l * v).sum();
        if self.a == 0.0 {
            linear
        } else {
            let sq: f64 = x.iter().map(|v| v * v).sum();
            self.class.curvature_sign() * self.a * sq + linear
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.eval_without_c(x) + self.c
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn evaluation_rules() {
        let x = [1.0, 2.0];
        let aff = ElementaryFunction::affine(vec![1.0, -1.0], 3.0).unwrap();
        assert_eq!(aff.eval(&x), 2.0);
        let minor = ElementaryFunction::quad_minorant(0.5, vec![1.0, -1.0], 3.0).unwrap();
        assert_eq!(minor.eval(&x), 2.0 - 2.5);
        let major = ElementaryFunction::quad_majorant(0.5, vec![1.0, -1.0], 3.0).unwrap();
        assert_eq!(major.eval(&x), 2.0 + 2.5);
    }

    #[test]
    fn affine_requires_zero_curvature() {
        assert!(ElementaryFunction::new(ElementaryClass::Affine, 1.0, vec![0.0], 0.0).is_err());
        assert!(ElementaryFunction::quad_minorant(-1.0, vec![0.0], 0.0).is_err());
    }
}
