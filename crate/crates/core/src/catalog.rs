//! Built-in problem instances with recommended grids and expected values.

use std::sync::Arc;

use serde::Serialize;

use crate::domain::{BoxDomain, Grid};
use crate::duality::{certify, DualityReport};
use crate::error::{Error, Result};
use crate::lagrangian::{dual_class, ConstraintPerturbation, FenchelPerturbation, Lagrangian, Perturbation};
use crate::objective::ObjectiveFunction;
use crate::parameters::ParameterGrid;
use crate::registry::Registry;

/// Recommended grids for a problem with a perturbation.
#[derive(Debug, Clone)]
pub struct DualitySetup {
    pub perturbation: Arc<dyn Perturbation>,
    pub x_grid: Grid,
    pub y_grid: Grid,
    /// Linear parts of dual parameters.
    pub v_grid: Grid,
    /// Curvatures of quad dual parameters.
    pub a_values: Vec<f64>,
    /// Extra quad dual parameters.
    pub seeds: Vec<(f64, Vec<f64>)>,
    /// Linear parts of the support members tried by the witness search.
    pub witness_ell_grid: Grid,
    pub witness_a_values: Vec<f64>,
}

impl DualitySetup {
    pub fn lagrangian(&self, class: &str) -> Result<Lagrangian> {
        Lagrangian::new(self.perturbation.clone(), dual_class(class)?, self.y_grid.clone())
    }

    pub fn dual_pg(&self, class: &str) -> Result<ParameterGrid> {
        let pg = dual_class(class)?.parameter_grid(self.a_values.clone(), self.v_grid.clone())?;
        if pg.class().name() == "affine" || self.seeds.is_empty() {
            Ok(pg)
        } else {
            pg.with_seeds(self.seeds.clone())
        }
    }

    /// Support members for the witness search, of the same elementary class
    /// as the dual parameters.
    pub fn witness_pg(&self, class: &str) -> Result<ParameterGrid> {
        dual_class(class)?.parameter_grid(self.witness_a_values.clone(), self.witness_ell_grid.clone())
    }

    pub fn certify(&self, class: &str) -> Result<DualityReport> {
        certify(&self.lagrangian(class)?, &self.x_grid, &self.dual_pg(class)?)
    }
}

/// Values the recommended settings reproduce.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Expected {
    pub primal: Option<f64>,
    pub affine_dual: Option<f64>,
    pub quad_dual: Option<f64>,
    /// `f - f**` at the origin for the recommended curvature bound.
    pub biconjugate_gap_at_origin: Option<f64>,
    /// The constant `0` pairs with itself as an intersection witness at level 0.
    pub zero_witness_at_level_zero: bool,
    pub provenance: &'static str,
}

#[derive(Debug, Clone)]
pub enum Problem {
    Duality(DualitySetup),
    /// A function studied through its biconjugate only.
    Function { function: ObjectiveFunction, grid: Grid, a_max: f64 },
}

#[derive(Debug, Clone)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub notes: &'static str,
    pub problem: Problem,
    pub expected: Expected,
}

impl CatalogEntry {
    pub fn duality(&self) -> Option<&DualitySetup> {
        match &self.problem {
            Problem::Duality(s) => Some(s),
            Problem::Function { .. } => None,
        }
    }

    /// The objective `p(., y0)` or the studied function.
    pub fn objective(&self) -> &ObjectiveFunction {
        match &self.problem {
            Problem::Duality(s) => s.perturbation.objective(),
            Problem::Function { function, .. } => function,
        }
    }

    /// Grid the objective is tabulated on.
    pub fn grid(&self) -> &Grid {
        match &self.problem {
            Problem::Duality(s) => &s.x_grid,
            Problem::Function { grid, .. } => grid,
        }
    }
}

fn interval(lo: f64, hi: f64) -> BoxDomain {
    BoxDomain::interval(lo, hi).expect("valid interval")
}

fn grid(lo: f64, hi: f64, n: usize) -> Grid {
    Grid::interval(lo, hi, n).expect("valid grid")
}

fn cube_grid(n: usize, lo: f64, hi: f64, points: usize) -> Grid {
    Grid::uniform(BoxDomain::cube(n, lo, hi).expect("valid box"), points).expect("valid grid")
}

fn constraint(f: &str, g: &[&str], domain: BoxDomain) -> Arc<dyn Perturbation> {
    let base = ObjectiveFunction::parse::<&str>(f, &[], domain).expect("catalog expression parses");
    Arc::new(ConstraintPerturbation::new(base, g).expect("catalog constraints parse"))
}

fn fenchel(g: (&str, &[&str]), h: (&str, &[&str]), domain: BoxDomain) -> Arc<dyn Perturbation> {
    let g = ObjectiveFunction::parse(g.0, g.1, domain.clone()).expect("catalog expression parses");
    let h = ObjectiveFunction::parse(h.0, h.1, domain).expect("catalog expression parses");
    Arc::new(FenchelPerturbation::new(g, h).expect("catalog dimensions match"))
}

fn classical_gap() -> CatalogEntry {
    CatalogEntry {
        name: "classical-gap",
        notes: "f = -x^2, 2x - 1 <= 0 on [0, 1]. Concave V makes the classical dual fall short; a quadratic dual closes the gap.",
        problem: Problem::Duality(DualitySetup {
            perturbation: constraint("-x1^2", &["2*x1 - 1"], interval(0.0, 1.0)),
            x_grid: grid(0.0, 1.0, 101),
            y_grid: grid(-2.0, 2.0, 401),
            v_grid: grid(-3.0, 1.0, 81),
            a_values: vec![0.0, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0],
            seeds: vec![(0.25, vec![-0.5])],
            witness_ell_grid: grid(-4.0, 4.0, 81),
            witness_a_values: vec![0.0, 1.0, 4.0],
        }),
        expected: Expected {
            primal: Some(-0.25),
            affine_dual: Some(-0.5),
            quad_dual: Some(-0.25),
            provenance: "derived: endpoint analysis of the Lagrangian in x; L(., 1/4, -1/2) is constant -1/4",
            ..Expected::default()
        },
    }
}

fn convex_lp() -> CatalogEntry {
    CatalogEntry {
        name: "convex-lp",
        notes: "f = x, -x <= 0 on [-1, 1].",
        problem: Problem::Duality(DualitySetup {
            perturbation: constraint("x1", &["-x1"], interval(-1.0, 1.0)),
            x_grid: grid(-1.0, 1.0, 41),
            y_grid: grid(-2.0, 2.0, 81),
            v_grid: grid(-3.0, 1.0, 41),
            a_values: vec![0.0, 0.5, 1.0, 2.0, 4.0],
            seeds: Vec::new(),
            witness_ell_grid: grid(-2.0, 2.0, 21),
            witness_a_values: vec![0.0, 1.0],
        }),
        expected: Expected {
            primal: Some(0.0),
            affine_dual: Some(0.0),
            quad_dual: Some(0.0),
            provenance: "trivial: linear objective over a half-line, multiplier 1",
            ..Expected::default()
        },
    }
}

fn double_well() -> CatalogEntry {
    CatalogEntry {
        name: "double-well",
        notes: "f = (x^2 - 1)^2, x - 0.5 <= 0 on [-2, 2]. V vanishes near the anchor.",
        problem: Problem::Duality(DualitySetup {
            perturbation: constraint("(x1^2 - 1)^2", &["x1 - 0.5"], interval(-2.0, 2.0)),
            x_grid: grid(-2.0, 2.0, 81),
            y_grid: grid(-3.0, 3.0, 61),
            v_grid: grid(-2.0, 2.0, 41),
            a_values: vec![0.0, 0.5, 1.0, 2.0, 4.0],
            seeds: Vec::new(),
            witness_ell_grid: grid(-2.0, 2.0, 21),
            witness_a_values: vec![0.0, 1.0],
        }),
        expected: Expected {
            primal: Some(0.0),
            affine_dual: Some(0.0),
            quad_dual: Some(0.0),
            provenance: "derived: x = -1 is feasible and a global zero of f",
            ..Expected::default()
        },
    }
}

fn kernel_line() -> CatalogEntry {
    let on_line: &[&str] = &["x1", "-x1"];
    CatalogEntry {
        name: "kernel-line",
        notes: "R^2, p(x, y) = g(x) + h(x - y) with g the indicator of {x1 = 0} and h = |x| on that line.",
        problem: Problem::Duality(DualitySetup {
            perturbation: fenchel(("0", on_line), ("sqrt(x1^2 + x2^2)", on_line), BoxDomain::cube(2, -1.0, 1.0).expect("valid box")),
            x_grid: cube_grid(2, -1.0, 1.0, 11),
            y_grid: cube_grid(2, -1.0, 1.0, 11),
            v_grid: cube_grid(2, -1.0, 1.0, 5),
            a_values: vec![0.0, 1.0],
            seeds: Vec::new(),
            witness_ell_grid: cube_grid(2, -1.0, 1.0, 5),
            witness_a_values: vec![0.0, 1.0],
        }),
        expected: Expected {
            primal: Some(0.0),
            affine_dual: Some(0.0),
            quad_dual: Some(0.0),
            zero_witness_at_level_zero: true,
            provenance: "worked example: inf of the norm over a kernel is 0, constants 0 have the intersection property at 0",
            ..Expected::default()
        },
    }
}

fn orthogonal_lines() -> CatalogEntry {
    CatalogEntry {
        name: "orthogonal-lines",
        notes: "R^4, p(x, y) = ind_C(x) + ind_S(x - y) with C = {x1 = x2, x3 = x4} and S = {x1 = -x2, x3 = -x4}; C and S meet only at 0.",
        problem: Problem::Duality(DualitySetup {
            perturbation: fenchel(
                ("0", &["x1 - x2", "x2 - x1", "x3 - x4", "x4 - x3"]),
                ("0", &["x1 + x2", "-x1 - x2", "x3 + x4", "-x3 - x4"]),
                BoxDomain::cube(4, -1.0, 1.0).expect("valid box"),
            ),
            x_grid: cube_grid(4, -1.0, 1.0, 5),
            y_grid: cube_grid(4, -1.0, 1.0, 5),
            v_grid: cube_grid(4, -1.0, 1.0, 3),
            a_values: vec![0.0, 1.0],
            seeds: Vec::new(),
            witness_ell_grid: cube_grid(4, -1.0, 1.0, 3),
            witness_a_values: vec![0.0, 1.0],
        }),
        expected: Expected {
            primal: Some(0.0),
            affine_dual: Some(0.0),
            quad_dual: Some(0.0),
            zero_witness_at_level_zero: true,
            provenance: "worked example: S and C intersect only at 0, the constant 0 witnesses the intersection property at 0",
            ..Expected::default()
        },
    }
}

fn function_entry(name: &'static str, notes: &'static str, src: &str, a_max: f64, expected: Expected) -> CatalogEntry {
    CatalogEntry {
        name,
        notes,
        problem: Problem::Function {
            function: ObjectiveFunction::parse::<&str>(src, &[], interval(-2.0, 2.0)).expect("catalog expression parses"),
            grid: grid(-2.0, 2.0, 401),
            a_max,
        },
        expected,
    }
}

fn dc_kink() -> CatalogEntry {
    function_entry(
        "dc-kink",
        "f = x^2 + 1 - 2|x|; the kink at 0 is only reached as the curvature bound grows.",
        "x1^2 + 1 - 2*abs(x1)",
        9.0,
        Expected {
            biconjugate_gap_at_origin: Some(0.1),
            provenance: "derived: the best minorant -a x^2 + c touches f at |x| = 1/(1+a), leaving 1/(1+a) at 0",
            ..Expected::default()
        },
    )
}

fn simple(name: &'static str, src: &str) -> CatalogEntry {
    function_entry(
        name,
        "biconjugate study on [-2, 2]",
        src,
        8.0,
        Expected {
            biconjugate_gap_at_origin: Some(0.0),
            provenance: "trivial: convex or quadratic-minorant representable",
            ..Expected::default()
        },
    )
}

pub fn catalog_registry() -> Registry<CatalogEntry> {
    let mut r: Registry<CatalogEntry> = Registry::new("catalog entry");
    r.register("classical-gap", || Arc::new(classical_gap()));
    r.register("convex-lp", || Arc::new(convex_lp()));
    r.register("double-well", || Arc::new(double_well()));
    r.register("kernel-line", || Arc::new(kernel_line()));
    r.register("orthogonal-lines", || Arc::new(orthogonal_lines()));
    r.register("dc-kink", || Arc::new(dc_kink()));
    r.register("abs", || Arc::new(simple("abs", "abs(x1)")));
    r.register("parabola", || Arc::new(simple("parabola", "x1^2")));
    r.register("quartic-well", || Arc::new(simple("quartic-well", "(x1^2 - 1)^2")));
    r.register("neg-parabola", || Arc::new(simple("neg-parabola", "-x1^2")));
    r
}

pub fn load(name: &str) -> Result<Arc<CatalogEntry>> {
    catalog_registry().create(name)
}

pub fn names() -> Vec<&'static str> {
    catalog_registry().names().collect()
}

/// Entries that come with a perturbation.
pub fn duality_entries() -> Vec<Arc<CatalogEntry>> {
    names()
        .into_iter()
        .map(|n| load(n).expect("registered"))
        .filter(|e| e.duality().is_some())
        .collect()
}

/// Rejects names outside the catalog with the list of valid ones.
pub fn check_name(name: &str) -> Result<()> {
    if names().contains(&name) {
        Ok(())
    } else {
        Err(Error::UnknownName {
            kind: "catalog entry",
            name: name.to_string(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conjugation::{biconjugate, phi_convexity_report};
    use crate::extended::ExtendedValue;
    use crate::sampled::GridFunction;

    #[test]
    fn every_entry_loads() {
        for n in names() {
            let e = load(n).unwrap();
            assert_eq!(e.name, n);
            e.objective().check_proper(e.grid()).unwrap();
        }
        assert!(matches!(load("nonsense"), Err(Error::UnknownName { .. })));
        assert_eq!(duality_entries().len(), 5);
    }

    #[test]
    fn expected_duality_values() {
        for e in duality_entries() {
            let s = e.duality().unwrap();
            for class in ["affine", "quad"] {
                let r = s.certify(class).unwrap();
                let expected = if class == "affine" { e.expected.affine_dual } else { e.expected.quad_dual };
                assert!((r.primal_value.to_f64() - e.expected.primal.unwrap()).abs() < 1e-9, "{} primal {}", e.name, r.primal_value);
                assert!((r.dual_value.to_f64() - expected.unwrap()).abs() < 1e-9, "{} {class} dual {}", e.name, r.dual_value);
            }
        }
    }

    #[test]
    fn biconjugate_entries() {
        for n in ["dc-kink", "abs", "parabola", "quartic-well", "neg-parabola"] {
            let e = load(n).unwrap();
            let Problem::Function { function, grid, a_max } = &e.problem else { panic!() };
            let f = GridFunction::tabulate(function, grid).unwrap();
            let pg = ParameterGrid::quad_minorant(vec![0.0, *a_max], Grid::interval(-40.0, 40.0, 801).unwrap()).unwrap();
            let at_zero = f.value(200).to_f64() - biconjugate(&f, &pg, &[0.0]).unwrap().to_f64();
            assert!((at_zero - e.expected.biconjugate_gap_at_origin.unwrap()).abs() < 1e-9, "{n}: {at_zero}");
            if n != "dc-kink" {
                assert!(phi_convexity_report(&f, &pg).unwrap().phi_convex_on_grid);
            }
            assert_ne!(f.value(0), ExtendedValue::PosInf);
        }
    }
}
