//! Primal and dual values, the optimal value function and duality
//! certification on grids.

use rayon::prelude::*;
use serde::Serialize;

use crate::conjugation::biconjugate;
use crate::domain::Grid;
use crate::error::{Error, Result};
use crate::extended::ExtendedValue;
use crate::lagrangian::{DualParameter, Lagrangian, LagrangianTable, Perturbation};
use crate::objective::{extremum_of_values, grid_extremum, ExtremumMode};
use crate::parameters::ParameterGrid;
use crate::sampled::GridFunction;
use crate::subdifferential::{estimate_subdifferential, finite_component, paraconvexity_modulus_on, LscSubgradient, DEFAULT_PAIR_BUDGET};
use crate::tolerances::{tol_gap, DIVERGENCE_CEILING, TOL_EQ, TOL_HULL};

/// Moduli tried when testing the value function for paraconvexity.
pub const VALUE_FUNCTION_MODULI: [f64; 9] = [0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Check {
    Holds,
    Fails,
    Undetermined,
}

impl Check {
    fn from_bool(b: bool) -> Self {
        if b {
            Check::Holds
        } else {
            Check::Fails
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PrimalValue {
    /// Grid minimum of the objective.
    pub value: ExtendedValue,
    pub argmin: Option<Vec<f64>>,
    /// `min_x max_psi L(x, psi)` over the sampled parameters.
    pub via_lagrangian: ExtendedValue,
    /// Some row supremum exceeds the divergence ceiling.
    pub diverging_rows: usize,
    /// The two computations agree within the gap tolerance.
    pub agree: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DualValue {
    pub value: ExtendedValue,
    /// Every sampled parameter whose dual function value is within `TOL_EQ`
    /// of the maximum.
    pub argmax: Vec<DualParameter>,
    #[serde(skip)]
    pub dual_function: Vec<ExtendedValue>,
}

fn check_lagrangian_grid(l: &Lagrangian, x_grid: &Grid) -> Result<()> {
    if x_grid.dim() != l.perturbation().x_dim() {
        return Err(Error::Dimension {
            expected: l.perturbation().x_dim(),
            found: x_grid.dim(),
        });
    }
    Ok(())
}

fn primal_from_table(l: &Lagrangian, x_grid: &Grid, table: &LagrangianTable) -> Result<PrimalValue> {
    let direct = grid_extremum(l.perturbation().objective(), x_grid, ExtremumMode::Min)?;
    let rows = table.row_suprema();
    let diverging_rows = rows.iter().filter(|v| **v > ExtendedValue::finite(DIVERGENCE_CEILING)).count();
    let (via, _) = extremum_of_values(&rows, ExtremumMode::Min)?;
    let agree = match (direct.value.as_finite(), via.as_finite()) {
        (Some(p), Some(q)) => (p - q).abs() <= tol_gap(direct.value, via),
        _ => direct.value == via,
    };
    Ok(PrimalValue {
        value: direct.value,
        argmin: direct.argpoint,
        via_lagrangian: via,
        diverging_rows,
        agree,
    })
}

fn dual_from_table(table: &LagrangianTable) -> Result<DualValue> {
    let q = table.dual_function();
    let (value, _) = extremum_of_values(&q, ExtremumMode::Max)?;
    let argmax = match value {
        ExtendedValue::Finite(best) => table
            .params
            .iter()
            .zip(&q)
            .filter(|(_, v)| v.as_finite().is_some_and(|v| v >= best - TOL_EQ))
            .map(|(p, _)| p.clone())
            .collect(),
        ExtendedValue::PosInf => table.params.iter().zip(&q).filter(|(_, v)| v.is_pos_inf()).map(|(p, _)| p.clone()).collect(),
        ExtendedValue::NegInf => Vec::new(),
    };
    Ok(DualValue {
        value,
        argmax,
        dual_function: q,
    })
}

/// `inf_x sup_psi L(x, psi)` next to the direct grid minimum of the objective.
pub fn primal_value(l: &Lagrangian, x_grid: &Grid, dual_pg: &ParameterGrid) -> Result<PrimalValue> {
    check_lagrangian_grid(l, x_grid)?;
    let table = l.table(x_grid, &l.dual_class().samples(dual_pg)?)?;
    primal_from_table(l, x_grid, &table)
}

/// `sup_psi inf_x L(x, psi)` over the members of `dual_pg`.
pub fn dual_value(l: &Lagrangian, x_grid: &Grid, dual_pg: &ParameterGrid) -> Result<DualValue> {
    check_lagrangian_grid(l, x_grid)?;
    let table = l.table(x_grid, &l.dual_class().samples(dual_pg)?)?;
    dual_from_table(&table)
}

/// `V(y) = min_x p(x, y)` over the grids.
#[derive(Debug, Clone, PartialEq)]
pub struct ValueFunctionTable {
    pub y_grid: Grid,
    pub values: Vec<ExtendedValue>,
    pub anchor_index: usize,
}

impl ValueFunctionTable {
    pub fn at_anchor(&self) -> ExtendedValue {
        self.values[self.anchor_index]
    }

    pub fn anchor(&self) -> Vec<f64> {
        self.y_grid.point(self.anchor_index)
    }

    pub fn to_grid_function(&self) -> GridFunction {
        GridFunction::from_values(&self.y_grid, self.values.clone()).expect("table length matches grid")
    }

    /// CSV with columns `y1..ym,V`.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for d in 1..=self.y_grid.dim() {
            out.push_str(&format!("y{d},"));
        }
        out.push_str("V\n");
        for (i, v) in self.values.iter().enumerate() {
            for c in self.y_grid.point(i) {
                out.push_str(&format!("{c},"));
            }
            out.push_str(&format!("{v}\n"));
        }
        out
    }
}

pub fn value_function(p: &dyn Perturbation, x_grid: &Grid, y_grid: &Grid) -> Result<ValueFunctionTable> {
    if x_grid.dim() != p.x_dim() {
        return Err(Error::Dimension {
            expected: p.x_dim(),
            found: x_grid.dim(),
        });
    }
    if y_grid.dim() != p.y_dim() {
        return Err(Error::Dimension {
            expected: p.y_dim(),
            found: y_grid.dim(),
        });
    }
    let anchor_index = y_grid.locate(p.anchor()).ok_or_else(|| Error::NotGridPoint(p.anchor().to_vec()))?;
    let y_points = y_grid.flattened_points();
    let values = (0..x_grid.len())
        .into_par_iter()
        .map(|i| p.section(&x_grid.point(i), &y_points))
        .try_reduce(
            || vec![ExtendedValue::PosInf; y_grid.len()],
            |a, b| Ok(a.into_iter().zip(b).map(|(u, v)| u.min(v)).collect()),
        )?;
    if let Some(j) = values.iter().position(|v| v.is_neg_inf()) {
        return Err(Error::Improper(format!("V = -inf at y = {:?}", y_grid.point(j))));
    }
    Ok(ValueFunctionTable {
        y_grid: y_grid.clone(),
        values,
        anchor_index,
    })
}

/// `V**(y0)` over the members of `dual_pg`.
pub fn value_biconjugate_at_anchor(table: &ValueFunctionTable, dual_pg: &ParameterGrid) -> Result<ExtendedValue> {
    let v = table.to_grid_function();
    v.check_proper()?;
    biconjugate(&v, dual_pg, &table.anchor())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Certifications {
    /// `dual <= primal + tol_gap`.
    pub weak_duality_ok: bool,
    /// `primal - dual <= tol_gap`.
    pub zero_gap: bool,
    /// The sampled subdifferential of `V` at the anchor is nonempty.
    pub strong_duality: bool,
    /// `|V(y0) - V**(y0)| <= tol_gap`.
    pub v_psi_convex_at_anchor: bool,
    /// Some candidate modulus makes `V` paraconvex on its finite region
    /// around the anchor.
    pub v_paraconvex: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConsistencyChecks {
    /// The two routes to the primal value agree.
    pub primal_agreement: bool,
    /// `zero_gap` agrees with `v_psi_convex_at_anchor`.
    pub zero_gap_matches_value_function: bool,
    /// A nonempty sampled subdifferential comes with a zero gap.
    pub subdifferential_implies_zero_gap: Check,
    /// The sampled subdifferential and the dual argmax coincide.
    pub subdifferential_matches_argmax: Check,
    /// Paraconvex `V` with interior anchor comes with a zero gap and a
    /// nonempty dual argmax.
    pub paraconvex_implies_strong_duality: Check,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DualityReport {
    pub dual_class: String,
    pub primal_value: ExtendedValue,
    pub primal_argmin: Option<Vec<f64>>,
    pub primal_via_lagrangian: ExtendedValue,
    pub dual_value: ExtendedValue,
    pub dual_argmax: Vec<DualParameter>,
    pub gap: ExtendedValue,
    pub tol_gap: f64,
    #[serde(rename = "V_at_anchor")]
    pub v_at_anchor: ExtendedValue,
    #[serde(rename = "V_biconj_at_anchor")]
    pub v_biconj_at_anchor: ExtendedValue,
    pub subdifferential_at_anchor: Vec<LscSubgradient>,
    pub v_paraconvexity_modulus: Option<f64>,
    pub anchor_interior: bool,
    pub certifications: Certifications,
    pub checks: ConsistencyChecks,
}

/// `primal - dual`, with `+inf - x = +inf` and equal infinities giving 0.
fn duality_gap(primal: ExtendedValue, dual: ExtendedValue) -> ExtendedValue {
    match (primal, dual) {
        (ExtendedValue::Finite(p), ExtendedValue::Finite(d)) => ExtendedValue::finite(p - d),
        (p, d) if p == d => ExtendedValue::ZERO,
        (ExtendedValue::PosInf, _) | (_, ExtendedValue::NegInf) => ExtendedValue::PosInf,
        _ => ExtendedValue::NegInf,
    }
}

/// Every element of `a` is within `tol` of some element of `b`.
fn covered(a: &[(f64, Vec<f64>)], b: &[(f64, Vec<f64>)], tol: f64) -> bool {
    a.iter().all(|(pa, pv)| {
        b.iter().any(|(qa, qv)| {
            let d2 = (pa - qa).powi(2) + pv.iter().zip(qv).map(|(x, y)| (x - y).powi(2)).sum::<f64>();
            d2.sqrt() <= tol
        })
    })
}

/// Computes primal and dual values, the value function around the anchor and
/// the flags relating them. The `y` grid is the Lagrangian's own.
pub fn certify(l: &Lagrangian, x_grid: &Grid, dual_pg: &ParameterGrid) -> Result<DualityReport> {
    check_lagrangian_grid(l, x_grid)?;
    let samples = l.dual_class().samples(dual_pg)?;
    let table = l.table(x_grid, &samples)?;
    let primal = primal_from_table(l, x_grid, &table)?;
    let dual = dual_from_table(&table)?;
    let gap = duality_gap(primal.value, dual.value);
    let tol = tol_gap(primal.value, dual.value);

    let vt = value_function(l.perturbation().as_ref(), x_grid, l.y_grid())?;
    let v_at_anchor = vt.at_anchor();
    let vf = vt.to_grid_function();
    let v_biconj = if vf.is_proper() {
        biconjugate(&vf, dual_pg, &vt.anchor())?
    } else {
        v_at_anchor
    };
    let v_psi_convex = match (v_at_anchor.as_finite(), v_biconj.as_finite()) {
        (Some(v), Some(b)) => (v - b).abs() <= tol,
        _ => v_at_anchor == v_biconj,
    };

    let subdifferential = if v_at_anchor.is_finite() {
        estimate_subdifferential(&vf, &vt.anchor(), 0.0, dual_pg)?.members
    } else {
        Vec::new()
    };

    let mask = finite_component(&vf, vt.anchor_index);
    let anchor_interior = vt.y_grid.is_interior(vt.anchor_index) && vt.y_grid.neighbours(vt.anchor_index).iter().all(|&j| mask[j]);
    let modulus = if mask.iter().filter(|m| **m).count() >= 3 {
        paraconvexity_modulus_on(&vf, &VALUE_FUNCTION_MODULI, &mask, DEFAULT_PAIR_BUDGET)?.accepted
    } else {
        None
    };

    let weak_duality_ok = dual.value <= primal.value.add_finite(tol);
    let zero_gap = gap <= ExtendedValue::finite(tol);
    let strong_duality = !subdifferential.is_empty();

    let sub_pairs: Vec<(f64, Vec<f64>)> = subdifferential.iter().map(|m| (m.a, m.v.clone())).collect();
    let arg_pairs: Vec<(f64, Vec<f64>)> = dual.argmax.iter().map(|p| (p.a(), p.v().to_vec())).collect();
    let subdifferential_matches_argmax = if sub_pairs.is_empty() && arg_pairs.is_empty() {
        Check::Undetermined
    } else if !zero_gap {
        Check::from_bool(sub_pairs.is_empty())
    } else {
        Check::from_bool(covered(&sub_pairs, &arg_pairs, TOL_HULL) && covered(&arg_pairs, &sub_pairs, TOL_HULL))
    };
    let paraconvex_implies_strong_duality = if modulus.is_some() && anchor_interior {
        Check::from_bool(zero_gap && !dual.argmax.is_empty())
    } else {
        Check::Undetermined
    };

    Ok(DualityReport {
        dual_class: l.dual_class().name().to_string(),
        primal_value: primal.value,
        primal_argmin: primal.argmin.clone(),
        primal_via_lagrangian: primal.via_lagrangian,
        dual_value: dual.value,
        dual_argmax: dual.argmax.clone(),
        gap,
        tol_gap: tol,
        v_at_anchor,
        v_biconj_at_anchor: v_biconj,
        subdifferential_at_anchor: subdifferential,
        v_paraconvexity_modulus: modulus,
        anchor_interior,
        certifications: Certifications {
            weak_duality_ok,
            zero_gap,
            strong_duality,
            v_psi_convex_at_anchor: v_psi_convex,
            v_paraconvex: modulus.is_some(),
        },
        checks: ConsistencyChecks {
            primal_agreement: primal.agree,
            zero_gap_matches_value_function: zero_gap == v_psi_convex,
            subdifferential_implies_zero_gap: if strong_duality { Check::from_bool(zero_gap) } else { Check::Undetermined },
            subdifferential_matches_argmax,
            paraconvex_implies_strong_duality,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::BoxDomain;
    use crate::lagrangian::{dual_class, ConstraintPerturbation, FenchelPerturbation};
    use crate::objective::ObjectiveFunction;
    use std::sync::Arc;

    fn gap_lagrangian(class: &str) -> Lagrangian {
        let base = ObjectiveFunction::parse::<&str>("-x1^2", &[], BoxDomain::interval(0.0, 1.0).unwrap()).unwrap();
        let p = ConstraintPerturbation::new(base, &["2*x1 - 1"]).unwrap();
        Lagrangian::new(Arc::new(p), dual_class(class).unwrap(), Grid::interval(-2.0, 2.0, 401).unwrap()).unwrap()
    }

    fn x_grid() -> Grid {
        Grid::interval(0.0, 1.0, 101).unwrap()
    }

    fn quad_pg() -> ParameterGrid {
        ParameterGrid::quad_minorant(vec![0.0, 0.25, 0.5, 1.0, 4.0], Grid::interval(-2.0, 2.0, 41).unwrap()).unwrap()
    }

    fn affine_pg() -> ParameterGrid {
        ParameterGrid::affine(Grid::interval(-2.0, 2.0, 41).unwrap())
    }

    #[test]
    fn primal_value_examples() {
        let p = primal_value(&gap_lagrangian("quad"), &x_grid(), &quad_pg()).unwrap();
        assert_eq!(p.value, ExtendedValue::finite(-0.25));
        assert_eq!(p.argmin, Some(vec![0.5]));

        let base = ObjectiveFunction::parse::<&str>("x1", &[], BoxDomain::interval(-1.0, 1.0).unwrap()).unwrap();
        let lp = ConstraintPerturbation::new(base, &["-x1"]).unwrap();
        let l = Lagrangian::new(Arc::new(lp), dual_class("affine").unwrap(), Grid::interval(-2.0, 2.0, 81).unwrap()).unwrap();
        let p = primal_value(&l, &Grid::interval(-1.0, 1.0, 41).unwrap(), &affine_pg()).unwrap();
        assert_eq!(p.value, ExtendedValue::ZERO);
        assert!(p.agree);
    }

    #[test]
    fn dual_values_on_the_gap_problem() {
        let d = dual_value(&gap_lagrangian("affine"), &x_grid(), &affine_pg()).unwrap();
        assert!((d.value.to_f64() + 0.5).abs() < 1e-12);
        let d = dual_value(&gap_lagrangian("quad"), &x_grid(), &quad_pg()).unwrap();
        assert!((d.value.to_f64() + 0.25).abs() < 1e-12);
        assert!(d.argmax.contains(&DualParameter::quad(0.25, vec![-0.5]).unwrap()));
    }

    #[test]
    fn value_function_of_the_gap_problem() {
        let l = gap_lagrangian("quad");
        let vt = value_function(l.perturbation().as_ref(), &x_grid(), &Grid::interval(-2.0, 2.0, 41).unwrap()).unwrap();
        for (i, v) in vt.values.iter().enumerate() {
            let y = vt.y_grid.point(i)[0];
            let expected = if y < -1.0 - 1e-12 {
                f64::INFINITY
            } else if y > 1.0 {
                -1.0
            } else {
                -((1.0 + y) / 2.0).powi(2)
            };
            assert!((v.to_f64() - expected).abs() < 1e-12 || v.to_f64() == expected, "y = {y}: {v}");
        }
        assert_eq!(vt.at_anchor(), ExtendedValue::finite(-0.25));
        assert!((value_biconjugate_at_anchor(&vt, &affine_pg()).unwrap().to_f64() + 0.5).abs() < 1e-9);
        assert!((value_biconjugate_at_anchor(&vt, &quad_pg()).unwrap().to_f64() + 0.25).abs() < 1e-9);
        assert!(vt.to_csv().starts_with("y1,V\n"));
    }

    #[test]
    fn fenchel_value_function() {
        let d = || BoxDomain::interval(-2.0, 2.0).unwrap();
        let g = ObjectiveFunction::parse::<&str>("abs(x1)", &[], d()).unwrap();
        let h = ObjectiveFunction::parse::<&str>("abs(x1)", &[], d()).unwrap();
        let p = FenchelPerturbation::new(g, h).unwrap();
        let vt = value_function(&p, &Grid::interval(-2.0, 2.0, 41).unwrap(), &Grid::interval(-2.0, 2.0, 41).unwrap()).unwrap();
        for (i, v) in vt.values.iter().enumerate() {
            assert!((v.to_f64() - vt.y_grid.point(i)[0].abs()).abs() < 1e-12);
        }
    }

    #[test]
    fn certify_gap_problem() {
        let r = certify(&gap_lagrangian("quad"), &x_grid(), &quad_pg()).unwrap();
        assert!(r.certifications.zero_gap && r.certifications.strong_duality && r.certifications.weak_duality_ok);
        assert!(r.subdifferential_at_anchor.iter().any(|m| m.a == 0.25 && m.v == vec![-0.5]));
        assert_eq!(r.checks.subdifferential_matches_argmax, Check::Holds);
        assert!(r.checks.zero_gap_matches_value_function);

        let r = certify(&gap_lagrangian("affine"), &x_grid(), &affine_pg()).unwrap();
        assert!(!r.certifications.zero_gap);
        assert!((r.gap.to_f64() - 0.25).abs() < 0.02);
        assert!(r.subdifferential_at_anchor.is_empty());
        assert!(r.checks.zero_gap_matches_value_function);
    }

    #[test]
    fn certify_double_well() {
        let base = ObjectiveFunction::parse::<&str>("(x1^2-1)^2", &[], BoxDomain::interval(-2.0, 2.0).unwrap()).unwrap();
        let p = ConstraintPerturbation::new(base, &["x1 - 0.5"]).unwrap();
        let l = Lagrangian::new(Arc::new(p), dual_class("quad").unwrap(), Grid::interval(-3.0, 3.0, 61).unwrap()).unwrap();
        let r = certify(&l, &Grid::interval(-2.0, 2.0, 81).unwrap(), &quad_pg()).unwrap();
        assert_eq!(r.primal_value, ExtendedValue::ZERO);
        assert!(r.certifications.zero_gap && r.certifications.v_paraconvex && r.anchor_interior);
        assert_eq!(r.checks.paraconvex_implies_strong_duality, Check::Holds);
    }

    #[test]
    fn gap_arithmetic() {
        use ExtendedValue::*;
        assert_eq!(duality_gap(PosInf, Finite(1.0)), PosInf);
        assert_eq!(duality_gap(PosInf, PosInf), ExtendedValue::ZERO);
        assert_eq!(duality_gap(Finite(1.0), NegInf), PosInf);
        assert_eq!(duality_gap(Finite(1.0), Finite(0.5)), Finite(0.5));
    }
}
