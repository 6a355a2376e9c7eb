//! Conjugates with respect to an elementary class, second conjugates, support
//! membership and the Young inequality.

use rayon::prelude::*;
use serde::Serialize;

use crate::elementary::{ElementaryClass, ElementaryFunction};
use crate::error::{Error, Result};
use crate::extended::ExtendedValue;
use crate::parameters::ParameterGrid;
use crate::sampled::GridFunction;
use crate::tolerances::{tol_biconj, TOL_EQ, TOL_SUPPORT};

/// Value of `phi - c` at grid point `i`, using the cached squared norm.
pub(crate) fn member_value(f: &GridFunction, i: usize, class: ElementaryClass, a: f64, ell: &[f64]) -> f64 {
    let lin: f64 = ell.iter().zip(f.point(i)).map(|(l, x)| l * x).sum();
    class.curvature_sign() * a * f.sq_norm(i) + lin
}

fn check_dim(f: &GridFunction, phi_dim: usize) -> Result<()> {
    if f.dim() == phi_dim {
        Ok(())
    } else {
        Err(Error::Dimension {
            expected: f.dim(),
            found: phi_dim,
        })
    }
}

/// `sup_x (phi(x) - c) - f(x)` over the grid.
fn conjugate_without_c(f: &GridFunction, class: ElementaryClass, a: f64, ell: &[f64]) -> ExtendedValue {
    let mut best = ExtendedValue::NegInf;
    for (i, v) in f.values().iter().enumerate() {
        if let Some(fv) = v.as_finite() {
            let s = member_value(f, i, class, a, ell) - fv;
            if ExtendedValue::finite(s) > best {
                best = ExtendedValue::finite(s);
            }
        }
    }
    best
}

fn reject_neg_inf(f: &GridFunction) -> Result<()> {
    match f.values().iter().position(|v| v.is_neg_inf()) {
        Some(i) => Err(Error::Improper(format!("value -inf at {:?}", f.point(i)))),
        None => Ok(()),
    }
}

/// `f*(phi) = sup_x phi(x) - f(x)` over the grid. Points where `f = +inf` are
/// skipped; the result is `-inf` exactly when `f` is `+inf` everywhere.
pub fn conjugate(f: &GridFunction, phi: &ElementaryFunction) -> Result<ExtendedValue> {
    check_dim(f, phi.dim())?;
    reject_neg_inf(f)?;
    Ok(conjugate_without_c(f, phi.class(), phi.a(), phi.ell()).add_finite(phi.c()))
}

/// Conjugate at every member of `pg` (with `c = 0`), in member order.
pub fn conjugate_all(f: &GridFunction, pg: &ParameterGrid) -> Result<Vec<ExtendedValue>> {
    check_dim(f, pg.dim())?;
    reject_neg_inf(f)?;
    let class = pg.class();
    Ok(pg
        .members()
        .par_iter()
        .map(|(a, ell)| conjugate_without_c(f, class, *a, ell))
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SupportCertificate {
    pub phi: ElementaryFunction,
    /// `min_x f(x) - phi(x)`; may be slightly negative within the support tolerance.
    pub slack: f64,
    pub witness_point: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum SupportVerdict {
    Accepted(SupportCertificate),
    Rejected { violation: f64, point: Vec<f64> },
}

impl SupportVerdict {
    pub fn is_accepted(&self) -> bool {
        matches!(self, SupportVerdict::Accepted(_))
    }
}

/// Whether `phi <= f` at every grid point, up to `TOL_SUPPORT`.
pub fn is_in_support(f: &GridFunction, phi: &ElementaryFunction) -> Result<SupportVerdict> {
    check_dim(f, phi.dim())?;
    let mut slack = f64::INFINITY;
    let mut at = None;
    for (i, v) in f.values().iter().enumerate() {
        let s = match v {
            ExtendedValue::PosInf => continue,
            ExtendedValue::NegInf => f64::NEG_INFINITY,
            ExtendedValue::Finite(fv) => fv - phi.eval(f.point(i)),
        };
        if s < slack {
            slack = s;
            at = Some(i);
        }
    }
    let witness_point = at.map(|i| f.point(i).to_vec());
    Ok(if slack >= -TOL_SUPPORT {
        SupportVerdict::Accepted(SupportCertificate {
            phi: phi.clone(),
            slack,
            witness_point,
        })
    } else {
        SupportVerdict::Rejected {
            violation: -slack,
            point: witness_point.expect("a violation has a location"),
        }
    })
}

/// Largest constant shift keeping `phi` below `f`: `phi.with_c(-f*(phi - c))`.
/// `None` when `f` is `+inf` everywhere (every shift works).
pub fn tightest_minorant(f: &GridFunction, phi: &ElementaryFunction) -> Result<Option<ElementaryFunction>> {
    let conj = conjugate(f, &phi.with_c(0.0))?;
    Ok(conj.as_finite().map(|v| phi.with_c(-v)))
}

/// `f**` on every grid point together with the index of the first maximizing
/// member (members in the order of `pg.members()`).
#[derive(Debug, Clone, PartialEq)]
pub struct BiconjugateTable {
    pub values: Vec<ExtendedValue>,
    pub best_member: Vec<Option<usize>>,
}

pub fn biconjugate_all(f: &GridFunction, pg: &ParameterGrid) -> Result<BiconjugateTable> {
    let conj = conjugate_all(f, pg)?;
    let members = pg.members();
    let class = pg.class();
    let (values, best_member) = (0..f.len())
        .into_par_iter()
        .map(|i| {
            let mut best = ExtendedValue::NegInf;
            let mut arg = None;
            for (m, (a, ell)) in members.iter().enumerate() {
                let term = match conj[m] {
                    ExtendedValue::NegInf => ExtendedValue::PosInf,
                    ExtendedValue::PosInf => ExtendedValue::NegInf,
                    ExtendedValue::Finite(c) => ExtendedValue::finite(member_value(f, i, class, *a, ell) - c),
                };
                if term > best {
                    best = term;
                    arg = Some(m);
                }
            }
            (best, arg)
        })
        .unzip();
    Ok(BiconjugateTable { values, best_member })
}

/// `f**(x) = max over (a, ell) of phi(x) - f*(phi)`; `x` must be a grid point.
pub fn biconjugate(f: &GridFunction, pg: &ParameterGrid, x: &[f64]) -> Result<ExtendedValue> {
    let i = f.index_of(x)?;
    let conj = conjugate_all(f, pg)?;
    let class = pg.class();
    Ok(pg
        .members()
        .iter()
        .zip(conj)
        .map(|((a, ell), c)| match c {
            ExtendedValue::NegInf => ExtendedValue::PosInf,
            ExtendedValue::PosInf => ExtendedValue::NegInf,
            ExtendedValue::Finite(c) => ExtendedValue::finite(member_value(f, i, class, *a, ell) - c),
        })
        .max()
        .unwrap_or(ExtendedValue::NegInf))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapRow {
    pub x: Vec<f64>,
    pub f: ExtendedValue,
    pub f_biconj: ExtendedValue,
    pub gap: ExtendedValue,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhiConvexityReport {
    #[serde(skip)]
    pub rows: Vec<GapRow>,
    /// Largest `f - f**` over points where `f` is finite.
    pub max_gap: f64,
    pub max_gap_point: Option<Vec<f64>>,
    pub tol_biconj: f64,
    pub phi_convex_on_grid: bool,
    /// Grid points where `f = +inf`; the gap there is not part of `max_gap`.
    pub points_outside_domain: usize,
}

impl PhiConvexityReport {
    pub fn gap_at(&self, x: &[f64]) -> Option<ExtendedValue> {
        self.rows.iter().find(|r| r.x == x).map(|r| r.gap)
    }

    /// CSV with columns `x1..xn,f,f_biconj,gap`.
    pub fn to_csv(&self) -> String {
        let n = self.rows.first().map_or(0, |r| r.x.len());
        let mut out = String::new();
        for d in 1..=n {
            out.push_str(&format!("x{d},"));
        }
        out.push_str("f,f_biconj,gap\n");
        for r in &self.rows {
            for x in &r.x {
                out.push_str(&format!("{x},"));
            }
            out.push_str(&format!("{},{},{}\n", r.f, r.f_biconj, r.gap));
        }
        out
    }
}

/// Pointwise `f - f**` and the verdict `max gap <= tol_biconj`.
pub fn phi_convexity_report(f: &GridFunction, pg: &ParameterGrid) -> Result<PhiConvexityReport> {
    f.check_proper()?;
    let table = biconjugate_all(f, pg)?;
    let mut rows = Vec::with_capacity(f.len());
    let mut max_gap = f64::NEG_INFINITY;
    let mut max_gap_point = None;
    let mut outside = 0;
    for i in 0..f.len() {
        let fv = f.value(i);
        let bv = table.values[i];
        let gap = match (fv, bv) {
            (ExtendedValue::Finite(a), ExtendedValue::Finite(b)) => ExtendedValue::finite(a - b),
            (ExtendedValue::PosInf, ExtendedValue::PosInf) => ExtendedValue::ZERO,
            (ExtendedValue::PosInf, _) => ExtendedValue::PosInf,
            (_, ExtendedValue::NegInf) => ExtendedValue::PosInf,
            _ => ExtendedValue::NegInf,
        };
        if fv.is_finite() {
            let g = gap.to_f64();
            if g > max_gap {
                max_gap = g;
                max_gap_point = Some(f.point(i).to_vec());
            }
        } else {
            outside += 1;
        }
        rows.push(GapRow {
            x: f.point(i).to_vec(),
            f: fv,
            f_biconj: bv,
            gap,
        });
    }
    let tol = tol_biconj(f.grid(), pg.a_max());
    Ok(PhiConvexityReport {
        rows,
        max_gap,
        max_gap_point,
        tol_biconj: tol,
        phi_convex_on_grid: max_gap <= tol,
        points_outside_domain: outside,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum YoungOutcome {
    StrictInequality,
    EqualityHenceSubgradient,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct YoungCheck {
    pub outcome: YoungOutcome,
    /// `f(x) + f*(phi) - phi(x)`, nonnegative up to rounding.
    pub excess: f64,
}

/// Compares `f(x) + f*(phi)` with `phi(x)`; equality within `TOL_EQ` means
/// `phi` is a subgradient of `f` at `x`.
pub fn young_equality_check(f: &GridFunction, phi: &ElementaryFunction, x: &[f64]) -> Result<YoungCheck> {
    let i = f.index_of(x)?;
    let fx = f.value(i).as_finite().ok_or(Error::NonFiniteBase)?;
    let conj = conjugate(f, phi)?.as_finite().ok_or(Error::NonFiniteBase)?;
    let excess = fx + conj - phi.eval(f.point(i));
    Ok(YoungCheck {
        outcome: if excess.abs() <= TOL_EQ {
            YoungOutcome::EqualityHenceSubgradient
        } else {
            YoungOutcome::StrictInequality
        },
        excess,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{BoxDomain, Grid};
    use crate::objective::ObjectiveFunction;
    use proptest::prelude::*;

    fn tab(src: &str, constraints: &[&str], lo: f64, hi: f64, n: usize) -> GridFunction {
        let f = ObjectiveFunction::parse(src, constraints, BoxDomain::interval(lo, hi).unwrap()).unwrap();
        GridFunction::tabulate(&f, &Grid::interval(lo, hi, n).unwrap()).unwrap()
    }

    fn affine(l: f64, c: f64) -> ElementaryFunction {
        ElementaryFunction::affine(vec![l], c).unwrap()
    }

    fn quad(a: f64, l: f64, c: f64) -> ElementaryFunction {
        ElementaryFunction::quad_minorant(a, vec![l], c).unwrap()
    }

    fn quad_pg(a_max: usize, l: f64, n: usize) -> ParameterGrid {
        let a = (0..=a_max).map(|a| a as f64).collect();
        ParameterGrid::quad_minorant(a, Grid::interval(-l, l, n).unwrap()).unwrap()
    }

    #[test]
    fn conjugate_examples() {
        let ind = tab("0", &["x1", "-x1"], -1.0, 1.0, 21);
        assert_eq!(conjugate(&ind, &affine(5.0, 3.0)).unwrap(), ExtendedValue::finite(3.0));
        let sq = tab("x1^2", &[], -2.0, 2.0, 4001);
        assert!((conjugate(&sq, &affine(1.0, 0.0)).unwrap().to_f64() - 0.25).abs() < 1e-12);
        assert_eq!(conjugate(&sq, &quad(1.0, 0.0, 0.0)).unwrap(), ExtendedValue::ZERO);
        let never = tab("0", &["1"], -1.0, 1.0, 5);
        assert_eq!(conjugate(&never, &affine(1.0, 0.0)).unwrap(), ExtendedValue::NegInf);
        let improper = tab("-1/x1^2", &[], -1.0, 1.0, 5);
        assert!(conjugate(&improper, &affine(1.0, 0.0)).is_err());
    }

    #[test]
    fn support_examples() {
        let dw = tab("(x1^2-1)^2", &[], -2.0, 2.0, 401);
        assert!(is_in_support(&dw, &quad(0.0, 0.0, 0.0)).unwrap().is_accepted());
        let sq = tab("x1^2", &[], -2.0, 2.0, 401);
        match is_in_support(&sq, &affine(0.0, 1.0)).unwrap() {
            SupportVerdict::Rejected { point, violation } => {
                assert_eq!(point, vec![0.0]);
                assert!((violation - 1.0).abs() < 1e-12);
            }
            other => panic!("{other:?}"),
        }
        let neg = tab("-x1^2", &[], -2.0, 2.0, 401);
        match is_in_support(&neg, &quad(1.0, 0.0, 0.0)).unwrap() {
            SupportVerdict::Accepted(cert) => assert_eq!(cert.slack, 0.0),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn biconjugate_examples() {
        let abs = tab("abs(x1)", &[], -2.0, 2.0, 401);
        let pg = ParameterGrid::affine(Grid::interval(-1.0, 1.0, 201).unwrap());
        assert!((biconjugate(&abs, &pg, &[1.0]).unwrap().to_f64() - 1.0).abs() < 1e-12);

        let neg = tab("-x1^2", &[], -2.0, 2.0, 401);
        let pg = quad_pg(2, 1.0, 3);
        let table = biconjugate_all(&neg, &pg).unwrap();
        for (b, f) in table.values.iter().zip(neg.values()) {
            assert_eq!(b, f);
        }
    }

    #[test]
    fn biconjugate_of_neg_quartic_is_finite_on_a_bounded_box() {
        // On [-2, 2], -x^4 >= -4 x^2, so a curvature-4 member is a minorant and
        // the second conjugate stays finite.
        let f = tab("-x1^4", &[], -2.0, 2.0, 401);
        let pg = quad_pg(4, 1.0, 3);
        let table = biconjugate_all(&f, &pg).unwrap();
        assert!(table.values.iter().all(|v| v.is_finite()));
        assert!(table.values.iter().zip(f.values()).all(|(b, f)| *b <= f.add_finite(TOL_SUPPORT)));
    }

    #[test]
    fn convexity_report_examples() {
        let dw = tab("(x1^2-1)^2", &[], -2.0, 2.0, 401);
        let r = phi_convexity_report(&dw, &quad_pg(4, 64.0, 1281)).unwrap();
        assert!(r.phi_convex_on_grid, "max gap {}", r.max_gap);

        let kink = tab("x1^2 + 1 - 2*abs(x1)", &[], -2.0, 2.0, 401);
        let r = phi_convexity_report(&kink, &quad_pg(99, 8.0, 161)).unwrap();
        let g0 = r.gap_at(&[0.0]).unwrap().to_f64();
        assert!((g0 - 0.01).abs() <= 0.001, "gap at 0 = {g0}");

        let spike = tab("max(0, 1 - 1000*abs(x1))", &[], -2.0, 2.0, 401);
        let r = phi_convexity_report(&spike, &quad_pg(8, 8.0, 161)).unwrap();
        assert!((r.gap_at(&[0.0]).unwrap().to_f64() - 1.0).abs() < 0.05);
        assert_eq!(r.max_gap_point, Some(vec![0.0]));
    }

    #[test]
    fn report_csv_shape() {
        let f = tab("x1^2", &["x1 - 0.5"], -1.0, 1.0, 5);
        let r = phi_convexity_report(&f, &quad_pg(1, 1.0, 3)).unwrap();
        let csv = r.to_csv();
        assert!(csv.starts_with("x1,f,f_biconj,gap\n"));
        assert_eq!(csv.lines().count(), 6);
        assert_eq!(r.points_outside_domain, 1);
        assert!(csv.lines().last().unwrap().contains("+inf"));
    }

    #[test]
    fn young_examples() {
        let sq = tab("x1^2", &[], -2.0, 2.0, 401);
        let y = young_equality_check(&sq, &affine(2.0, -1.0), &[1.0]).unwrap();
        assert_eq!(y.outcome, YoungOutcome::EqualityHenceSubgradient);
        let y = young_equality_check(&sq, &affine(0.0, 0.0), &[1.0]).unwrap();
        assert_eq!(y.outcome, YoungOutcome::StrictInequality);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn fenchel_young(a in 0.0f64..4.0, l in -3.0f64..3.0, c in -2.0f64..2.0, k in 0usize..81, s in -2.0f64..2.0) {
            let f = tab(&format!("sin(3*x1) + {s}*x1^2"), &[], -2.0, 2.0, 81);
            let phi = quad(a, l, c);
            let conj = conjugate(&f, &phi).unwrap().to_f64();
            let x = f.point(k).to_vec();
            prop_assert!(f.value(k).to_f64() + conj >= phi.eval(&x) - TOL_EQ);
        }

        #[test]
        fn biconjugate_is_dominated_and_monotone(s in -2.0f64..2.0, w in 0.5f64..4.0) {
            let f = tab(&format!("cos({w}*x1) + {s}*abs(x1)"), &[], -2.0, 2.0, 61);
            let small = biconjugate_all(&f, &quad_pg(2, 2.0, 9)).unwrap();
            let large = biconjugate_all(&f, &quad_pg(4, 4.0, 17)).unwrap();
            for i in 0..f.len() {
                prop_assert!(small.values[i] <= f.value(i).add_finite(TOL_SUPPORT));
                prop_assert!(large.values[i] >= small.values[i]);
            }
        }

        #[test]
        fn elementary_functions_are_fixed_points(a in 0usize..3, li in 0usize..9, c in -1.0f64..1.0) {
            let pg = quad_pg(2, 2.0, 9);
            let l = pg.ell_grid().coord(0, li);
            let f = tab(&format!("-{a}*x1^2 + {l}*x1 + {c}"), &[], -2.0, 2.0, 41);
            let table = biconjugate_all(&f, &pg).unwrap();
            for i in 0..f.len() {
                prop_assert!((table.values[i].to_f64() - f.value(i).to_f64()).abs() < 1e-12);
            }
        }
    }
}
