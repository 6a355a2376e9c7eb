//! The intersection property of two elementary functions at a level, and the
//! search for support members of a Lagrangian that have it.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::conjugation::conjugate_all;
use crate::domain::Grid;
use crate::elementary::ElementaryFunction;
use crate::error::{Error, Result};
use crate::lagrangian::{DualParameter, Lagrangian};
use crate::parameters::ParameterGrid;
use crate::tolerances::{STRICT_MARGIN, TOL_HULL};

pub const DEFAULT_T_STEPS: usize = 257;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum IntersectionForm {
    GeneralT,
    LscSublevel,
    AffineAlgebraic,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntersectionQuery {
    pub phi1: ElementaryFunction,
    pub phi2: ElementaryFunction,
    pub alpha: f64,
    /// Number of uniform `t` values in `[0, 1]`; odd so that `1/2` is included.
    pub t_steps: usize,
}

impl IntersectionQuery {
    pub fn new(phi1: ElementaryFunction, phi2: ElementaryFunction, alpha: f64) -> Result<Self> {
        Self::with_t_steps(phi1, phi2, alpha, DEFAULT_T_STEPS)
    }

    pub fn with_t_steps(phi1: ElementaryFunction, phi2: ElementaryFunction, alpha: f64, t_steps: usize) -> Result<Self> {
        if phi1.dim() != phi2.dim() {
            return Err(Error::Dimension {
                expected: phi1.dim(),
                found: phi2.dim(),
            });
        }
        if !alpha.is_finite() {
            return Err(Error::InvalidParameter(format!("level alpha = {alpha} must be finite")));
        }
        if t_steps < 3 || t_steps.is_multiple_of(2) {
            return Err(Error::InvalidParameter(format!("t_steps = {t_steps} must be odd and at least 3")));
        }
        Ok(Self { phi1, phi2, alpha, t_steps })
    }

    fn check_grid(&self, grid: &Grid) -> Result<()> {
        if grid.dim() != self.phi1.dim() {
            return Err(Error::Dimension {
                expected: self.phi1.dim(),
                found: grid.dim(),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntersectionVerdict {
    pub holds: bool,
    pub violating_t: Option<f64>,
    /// For the general form this point lies in `[t phi1 + (1-t) phi2 < alpha]`
    /// and in `[phi1 < alpha]`; for the sublevel form it lies in both
    /// strict sublevel sets.
    pub violating_point: Option<Vec<f64>>,
    pub form_used: IntersectionForm,
}

impl IntersectionVerdict {
    fn holds(form: IntersectionForm) -> Self {
        Self {
            holds: true,
            violating_t: None,
            violating_point: None,
            form_used: form,
        }
    }
}

/// First grid point where `value(x) < alpha` and `also(x) < alpha`.
fn first_common_point(grid: &Grid, alpha: f64, value: impl Fn(&[f64]) -> f64 + Sync, also: impl Fn(&[f64]) -> f64 + Sync) -> Option<usize> {
    (0..grid.len()).into_par_iter().find_first(|&i| {
        let x = grid.point(i);
        value(&x) < alpha && also(&x) < alpha
    })
}

/// Checks, for every `t` in the uniform `t` grid and at the exact break
/// points, that `[t phi1 + (1-t) phi2 < alpha]` misses `[phi1 < alpha]` or
/// `[phi2 < alpha]` on the grid.
pub fn intersection_general(q: &IntersectionQuery, grid: &Grid) -> Result<IntersectionVerdict> {
    q.check_grid(grid)?;
    let alpha = q.alpha;
    let (p1, p2) = (&q.phi1, &q.phi2);

    // A point of [phi1 < alpha] lies in the combined sublevel set for t in a
    // right ray ending at 1, a point of [phi2 < alpha] for a left ray starting
    // at 0. A violation needs the two unions of rays to overlap.
    let mut right_start = f64::INFINITY;
    let mut left_end = f64::NEG_INFINITY;
    for x in grid.points() {
        let (f1, f2) = (p1.eval(&x), p2.eval(&x));
        if f1 < alpha {
            right_start = right_start.min(if f2 < alpha { f64::NEG_INFINITY } else { (alpha - f2) / (f1 - f2) });
        }
        if f2 < alpha {
            left_end = left_end.max(if f1 < alpha { f64::INFINITY } else { (alpha - f2) / (f1 - f2) });
        }
    }

    let mut ts: Vec<f64> = (0..q.t_steps).map(|k| k as f64 / (q.t_steps - 1) as f64).collect();
    if right_start < left_end {
        ts.push((0.5 * (right_start.max(0.0) + left_end.min(1.0))).clamp(0.0, 1.0));
    }
    ts.sort_by(f64::total_cmp);
    ts.dedup();

    for t in ts {
        let combo = |x: &[f64]| t * p1.eval(x) + (1.0 - t) * p2.eval(x);
        let Some(i) = first_common_point(grid, alpha, combo, |x| p1.eval(x)) else {
            continue;
        };
        if first_common_point(grid, alpha, combo, |x| p2.eval(x)).is_some() {
            return Ok(IntersectionVerdict {
                holds: false,
                violating_t: Some(t),
                violating_point: Some(grid.point(i)),
                form_used: IntersectionForm::GeneralT,
            });
        }
    }
    Ok(IntersectionVerdict::holds(IntersectionForm::GeneralT))
}

/// `[phi1 < alpha] ∩ [phi2 < alpha] = ∅` over the grid points.
pub fn intersection_lsc(q: &IntersectionQuery, grid: &Grid) -> Result<IntersectionVerdict> {
    q.check_grid(grid)?;
    if !(q.phi1.class().is_lsc() && q.phi2.class().is_lsc()) {
        return Err(Error::ClassMismatch(
            "the sublevel form needs affine or quad_minorant functions".into(),
        ));
    }
    let (p1, p2) = (&q.phi1, &q.phi2);
    Ok(match first_common_point(grid, q.alpha, |x| p1.eval(x), |x| p2.eval(x)) {
        Some(i) => IntersectionVerdict {
            holds: false,
            violating_t: None,
            violating_point: Some(grid.point(i)),
            form_used: IntersectionForm::LscSublevel,
        },
        None => IntersectionVerdict::holds(IntersectionForm::LscSublevel),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AffineAlgebraicVerdict {
    pub holds: bool,
    pub t0: Option<f64>,
    /// `|t z1 + (1-t) z2|` at the reported `t0`, or the smallest value seen.
    pub residual: f64,
}

/// Looks for `t0` in `[0, 1]` with `t0 z1 + (1-t0) z2 = 0` (within the hull
/// tolerance) and `t0 d1 + (1-t0) d2 >= inf_f - eps`.
pub fn intersection_affine_algebraic(z1: &[f64], d1: f64, z2: &[f64], d2: f64, inf_f: f64, eps: f64) -> Result<AffineAlgebraicVerdict> {
    if z1.len() != z2.len() {
        return Err(Error::Dimension {
            expected: z1.len(),
            found: z2.len(),
        });
    }
    if !(eps > 0.0) {
        return Err(Error::InvalidParameter(format!("eps = {eps} must be positive")));
    }
    let residual = |t: f64| z1.iter().zip(z2).map(|(a, b)| (t * a + (1.0 - t) * b).powi(2)).sum::<f64>().sqrt();
    let level_ok = |t: f64| t * d1 + (1.0 - t) * d2 >= inf_f - eps;

    let diff_sq: f64 = z1.iter().zip(z2).map(|(a, b)| (a - b).powi(2)).sum();
    let mut candidates = Vec::with_capacity(DEFAULT_T_STEPS + 3);
    if diff_sq > 0.0 {
        let dot: f64 = z2.iter().zip(z1.iter().zip(z2)).map(|(b, (a, b2))| b * (a - b2)).sum();
        candidates.push((-dot / diff_sq).clamp(0.0, 1.0));
    }
    candidates.extend([1.0, 0.0]);
    candidates.extend((0..DEFAULT_T_STEPS).map(|k| k as f64 / (DEFAULT_T_STEPS - 1) as f64));

    let mut best = f64::INFINITY;
    for t in candidates {
        let r = residual(t);
        best = best.min(r);
        if r <= TOL_HULL && level_ok(t) {
            return Ok(AffineAlgebraicVerdict {
                holds: true,
                t0: Some(t),
                residual: r,
            });
        }
    }
    Ok(AffineAlgebraicVerdict {
        holds: false,
        t0: None,
        residual: best,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntersectionWitness {
    pub alpha: f64,
    pub psi1: DualParameter,
    pub psi2: DualParameter,
    pub phi1: ElementaryFunction,
    pub phi2: ElementaryFunction,
    pub form_used: IntersectionForm,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchCoverage {
    pub alpha: f64,
    pub dual_samples: usize,
    /// Dual samples whose Lagrangian section takes the value `-inf`; they
    /// have no support members.
    pub dual_samples_without_support: usize,
    pub support_members: usize,
    pub distinct_sublevel_sets: usize,
    pub pairs_checked: usize,
    pub pairs_total: usize,
}

/// Either a witness, or the coverage of a search that found none. An empty
/// search says nothing about witnesses outside the sampled classes.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum WitnessSearch {
    Found(IntersectionWitness),
    NoWitnessWithinBudget(SearchCoverage),
}

impl WitnessSearch {
    pub fn witness(&self) -> Option<&IntersectionWitness> {
        match self {
            WitnessSearch::Found(w) => Some(w),
            WitnessSearch::NoWitnessWithinBudget(_) => None,
        }
    }
}

pub const DEFAULT_WITNESS_BUDGET: usize = 20_000_000;

struct Candidate {
    sample: usize,
    phi: ElementaryFunction,
    set: Vec<u64>,
}

fn sublevel_bits(phi: &ElementaryFunction, points: &[f64], dim: usize, level: f64) -> (Vec<u64>, bool) {
    let n = points.len() / dim;
    let mut bits = vec![0u64; n.div_ceil(64)];
    let mut empty = true;
    for (i, x) in points.chunks(dim).enumerate() {
        if phi.eval(x) < level {
            bits[i / 64] |= 1 << (i % 64);
            empty = false;
        }
    }
    (bits, empty)
}

fn disjoint(a: &[u64], b: &[u64]) -> bool {
    a.iter().zip(b).all(|(x, y)| x & y == 0)
}

/// Support members of `L(., psi)` drawn from `pg`, ordered by decreasing grid
/// minimum. `None` when `L(., psi)` takes the value `-inf` on the grid.
fn support_members(lagrangian: &Lagrangian, x_grid: &Grid, points: &[f64], psi: &DualParameter, pg: &ParameterGrid, alpha: f64) -> Result<Option<Vec<ElementaryFunction>>> {
    let table = lagrangian.table(x_grid, std::slice::from_ref(psi))?;
    let column = table.column(0);
    if column.values().iter().any(|v| v.is_neg_inf()) {
        return Ok(None);
    }
    let conj = conjugate_all(&column, pg)?;
    let dim = x_grid.dim();
    let mut members: Vec<(f64, ElementaryFunction)> = Vec::new();
    for ((a, ell), c) in pg.members().into_iter().zip(conj) {
        let c = match c.as_finite() {
            Some(v) => -v,
            // L(., psi) is +inf on the whole grid: every constant minorizes it.
            None if c.is_neg_inf() && a == 0.0 && ell.iter().all(|v| *v == 0.0) => alpha,
            None => continue,
        };
        let phi = ElementaryFunction::new(pg.class(), a, ell, c)?;
        let min = points.chunks(dim).map(|x| phi.eval(x)).fold(f64::INFINITY, f64::min);
        members.push((min, phi));
    }
    members.sort_by(|x, y| y.0.total_cmp(&x.0));
    Ok(Some(members.into_iter().map(|(_, phi)| phi).collect()))
}

/// Looks for `psi1, psi2` among `dual_samples` and support members
/// `phi_i` of `L(., psi_i)` in `pg` with the intersection property at level
/// `alpha` on `x_grid`. Dual samples are tried by increasing `(a, |v|)`.
/// A member whose strict sublevel set is empty pairs with itself; otherwise
/// pairs of distinct sublevel sets are compared, at most `budget` of them.
/// Sublevel sets are taken at `alpha - STRICT_MARGIN`.
pub fn search_intersection_witness(
    lagrangian: &Lagrangian,
    x_grid: &Grid,
    alpha: f64,
    dual_samples: &[DualParameter],
    pg: &ParameterGrid,
    budget: usize,
) -> Result<WitnessSearch> {
    if !alpha.is_finite() {
        return Err(Error::InvalidParameter(format!("level alpha = {alpha} must be finite")));
    }
    if pg.dim() != x_grid.dim() {
        return Err(Error::Dimension {
            expected: x_grid.dim(),
            found: pg.dim(),
        });
    }
    let mut samples = dual_samples.to_vec();
    samples.sort_by(|p, q| p.a().total_cmp(&q.a()).then(p.norm_v().total_cmp(&q.norm_v())));

    let points = x_grid.flattened_points();
    let dim = x_grid.dim();
    let level = alpha - STRICT_MARGIN;
    let lsc = pg.class().is_lsc();

    let mut without_support = 0;
    let mut member_count = 0;
    let mut pool: Vec<Candidate> = Vec::new();
    let mut seen: HashMap<Vec<u64>, ()> = HashMap::new();

    for chunk_start in (0..samples.len()).step_by(32) {
        let chunk = &samples[chunk_start..(chunk_start + 32).min(samples.len())];
        let computed: Vec<Option<Vec<(ElementaryFunction, Vec<u64>, bool)>>> = chunk
            .par_iter()
            .map(|psi| {
                Ok(support_members(lagrangian, x_grid, &points, psi, pg, alpha)?.map(|members| {
                    members
                        .into_iter()
                        .map(|phi| {
                            let (bits, empty) = sublevel_bits(&phi, &points, dim, level);
                            (phi, bits, empty)
                        })
                        .collect()
                }))
            })
            .collect::<Result<_>>()?;

        for (offset, members) in computed.into_iter().enumerate() {
            let sample = chunk_start + offset;
            let Some(members) = members else {
                without_support += 1;
                continue;
            };
            member_count += members.len();
            for (phi, set, empty) in members {
                if empty {
                    let psi = samples[sample].clone();
                    return Ok(WitnessSearch::Found(IntersectionWitness {
                        alpha,
                        psi1: psi.clone(),
                        psi2: psi,
                        phi1: phi.clone(),
                        phi2: phi,
                        form_used: if lsc { IntersectionForm::LscSublevel } else { IntersectionForm::GeneralT },
                    }));
                }
                if seen.insert(set.clone(), ()).is_none() {
                    pool.push(Candidate { sample, phi, set });
                }
            }
        }
    }

    let p = pool.len();
    let pairs_total = p * p.saturating_sub(1) / 2;
    // Rows i cover pairs (i, j > i); keep whole rows while the budget lasts.
    let mut rows = 0;
    let mut pairs_checked = 0;
    while rows < p && pairs_checked + (p - rows - 1) <= budget {
        pairs_checked += p - rows - 1;
        rows += 1;
    }

    let found = (0..rows).into_par_iter().find_map_first(|i| {
        ((i + 1)..p).find_map(|j| {
            let (c1, c2) = (&pool[i], &pool[j]);
            if !disjoint(&c1.set, &c2.set) {
                return None;
            }
            if lsc {
                return Some((i, j, IntersectionForm::LscSublevel));
            }
            let q = IntersectionQuery::new(c1.phi.clone(), c2.phi.clone(), level).ok()?;
            match intersection_general(&q, x_grid) {
                Ok(v) if v.holds => Some((i, j, IntersectionForm::GeneralT)),
                _ => None,
            }
        })
    });

    Ok(match found {
        Some((i, j, form_used)) => WitnessSearch::Found(IntersectionWitness {
            alpha,
            psi1: samples[pool[i].sample].clone(),
            psi2: samples[pool[j].sample].clone(),
            phi1: pool[i].phi.clone(),
            phi2: pool[j].phi.clone(),
            form_used,
        }),
        None => WitnessSearch::NoWitnessWithinBudget(SearchCoverage {
            alpha,
            dual_samples: samples.len(),
            dual_samples_without_support: without_support,
            support_members: member_count,
            distinct_sublevel_sets: p,
            pairs_checked,
            pairs_total,
        }),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conjugation::is_in_support;
    use crate::domain::BoxDomain;
    use crate::lagrangian::{dual_class, ConstraintPerturbation, DualClass, QuadDual};
    use crate::objective::ObjectiveFunction;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::sync::Arc;

    fn affine(l: f64, c: f64) -> ElementaryFunction {
        ElementaryFunction::affine(vec![l], c).unwrap()
    }

    fn line() -> Grid {
        Grid::interval(-2.0, 2.0, 401).unwrap()
    }

    #[test]
    fn general_form_examples() {
        let q = IntersectionQuery::new(affine(1.0, 0.0), affine(-1.0, 0.0), 0.0).unwrap();
        assert!(intersection_general(&q, &line()).unwrap().holds);

        let q = IntersectionQuery::new(affine(0.0, -1.0), affine(0.0, -1.0), 0.0).unwrap();
        let v = intersection_general(&q, &line()).unwrap();
        assert!(!v.holds);
        assert_eq!(v.violating_t, Some(0.0));

        let q = IntersectionQuery::new(affine(0.0, 0.5), ElementaryFunction::quad_majorant(2.0, vec![1.0], -3.0).unwrap(), 0.5).unwrap();
        assert!(intersection_general(&q, &line()).unwrap().holds);
    }

    #[test]
    fn sublevel_form_examples() {
        let q = IntersectionQuery::new(affine(1.0, 0.0), affine(-1.0, 0.0), 0.0).unwrap();
        assert!(intersection_lsc(&q, &line()).unwrap().holds);

        let bump = ElementaryFunction::quad_minorant(1.0, vec![0.0], 1.0).unwrap();
        let q = IntersectionQuery::new(bump.clone(), bump, 0.0).unwrap();
        let v = intersection_lsc(&q, &line()).unwrap();
        assert!(!v.holds);
        assert!(v.violating_point.unwrap()[0].abs() > 1.0);

        let up = ElementaryFunction::quad_majorant(1.0, vec![0.0], 0.0).unwrap();
        let q = IntersectionQuery::new(up.clone(), up, 0.0).unwrap();
        assert!(matches!(intersection_lsc(&q, &line()), Err(Error::ClassMismatch(_))));
    }

    #[test]
    fn query_validation() {
        assert!(IntersectionQuery::with_t_steps(affine(1.0, 0.0), affine(1.0, 0.0), 0.0, 4).is_err());
        assert!(IntersectionQuery::new(affine(1.0, 0.0), ElementaryFunction::affine(vec![1.0, 0.0], 0.0).unwrap(), 0.0).is_err());
        assert!(IntersectionQuery::new(affine(1.0, 0.0), affine(1.0, 0.0), f64::NAN).is_err());
    }

    #[test]
    fn affine_algebraic_examples() {
        let v = intersection_affine_algebraic(&[1.0], 0.0, &[-1.0], 0.0, 0.0, 0.1).unwrap();
        assert!(v.holds);
        assert_eq!(v.t0, Some(0.5));
        assert!(!intersection_affine_algebraic(&[1.0], 5.0, &[1.0], 5.0, 0.0, 0.1).unwrap().holds);
        let v = intersection_affine_algebraic(&[0.0], 2.0, &[3.0], -7.0, 2.0, 0.1).unwrap();
        assert_eq!((v.holds, v.t0), (true, Some(1.0)));
        assert!(intersection_affine_algebraic(&[1.0], 0.0, &[-1.0], 0.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn sublevel_and_general_forms_agree_on_affine_pairs() {
        let grid = Grid::interval(-2.0, 2.0, 2001).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let q = IntersectionQuery::new(
                affine(rng.gen_range(-2.0..2.0), rng.gen_range(-1.0..1.0)),
                affine(rng.gen_range(-2.0..2.0), rng.gen_range(-1.0..1.0)),
                rng.gen_range(-1.0..1.0),
            )
            .unwrap();
            assert_eq!(intersection_lsc(&q, &grid).unwrap().holds, intersection_general(&q, &grid).unwrap().holds, "{q:?}");
        }
    }

    fn constraint_lagrangian(f: &str, g: &str, lo: f64, hi: f64, class: &str) -> Lagrangian {
        let base = ObjectiveFunction::parse::<&str>(f, &[], BoxDomain::interval(lo, hi).unwrap()).unwrap();
        let p = ConstraintPerturbation::new(base, &[g]).unwrap();
        Lagrangian::new(Arc::new(p), dual_class(class).unwrap(), Grid::interval(-3.0, 3.0, 121).unwrap()).unwrap()
    }

    #[test]
    fn constant_witness_at_the_optimal_level() {
        let l = constraint_lagrangian("x1^2", "1 - x1", -2.0, 2.0, "quad");
        let xg = Grid::interval(-2.0, 2.0, 81).unwrap();
        let pg = QuadDual.parameter_grid(vec![0.0, 1.0, 4.0], Grid::interval(-4.0, 4.0, 17).unwrap()).unwrap();
        let samples = QuadDual.samples(&pg).unwrap();
        let phi_pg = ParameterGrid::quad_minorant(vec![0.0, 1.0], Grid::interval(-2.0, 2.0, 9).unwrap()).unwrap();
        let w = search_intersection_witness(&l, &xg, 0.9, &samples, &phi_pg, 1000).unwrap();
        let w = w.witness().expect("witness below the primal value");
        let column = l.table(&xg, std::slice::from_ref(&w.psi1)).unwrap().column(0);
        assert!(is_in_support(&column, &w.phi1).unwrap().is_accepted());
        let q = IntersectionQuery::new(w.phi1.clone(), w.phi2.clone(), 0.9).unwrap();
        assert!(intersection_lsc(&q, &xg).unwrap().holds);
    }

    #[test]
    fn no_affine_witness_inside_the_gap() {
        let l = constraint_lagrangian("-x1^2", "2*x1 - 1", 0.0, 1.0, "affine");
        let xg = Grid::interval(0.0, 1.0, 101).unwrap();
        let vg = Grid::interval(-3.0, 1.0, 81).unwrap();
        let samples = dual_class("affine").unwrap().samples(&ParameterGrid::affine(vg.clone())).unwrap();
        let phi_pg = ParameterGrid::affine(Grid::interval(-4.0, 4.0, 81).unwrap());
        let out = search_intersection_witness(&l, &xg, -0.35, &samples, &phi_pg, DEFAULT_WITNESS_BUDGET).unwrap();
        match out {
            WitnessSearch::NoWitnessWithinBudget(c) => {
                assert_eq!(c.pairs_checked, c.pairs_total);
                assert!(c.dual_samples_without_support > 0);
            }
            WitnessSearch::Found(w) => panic!("unexpected witness {w:?}"),
        }
        // Below the dual value the classical Lagrangian itself supplies one.
        let out = search_intersection_witness(&l, &xg, -0.6, &samples, &phi_pg, DEFAULT_WITNESS_BUDGET).unwrap();
        assert!(out.witness().is_some());
    }

    proptest! {
        #[test]
        fn constant_member_at_level_always_holds(l in -3.0f64..3.0, c in -3.0f64..3.0, alpha in -2.0f64..2.0) {
            let q = IntersectionQuery::with_t_steps(affine(0.0, alpha), affine(l, c), alpha, 33).unwrap();
            prop_assert!(intersection_general(&q, &line()).unwrap().holds);
            prop_assert!(intersection_lsc(&q, &line()).unwrap().holds);
        }

        #[test]
        fn constant_pattern_is_monotone_in_level(beta in -2.0f64..2.0, l in -3.0f64..3.0, drop in 0.0f64..2.0) {
            let q = IntersectionQuery::with_t_steps(affine(0.0, beta), affine(l, 0.0), beta - drop, 33).unwrap();
            prop_assert!(intersection_general(&q, &line()).unwrap().holds);
        }

        #[test]
        fn violations_are_genuine(l1 in -3.0f64..3.0, c1 in -1.0f64..1.0, a2 in 0.0f64..2.0, l2 in -3.0f64..3.0, alpha in -1.0f64..1.0) {
            let q = IntersectionQuery::with_t_steps(affine(l1, c1), ElementaryFunction::quad_minorant(a2, vec![l2], 0.0).unwrap(), alpha, 33).unwrap();
            let v = intersection_general(&q, &line()).unwrap();
            if let (Some(t), Some(x)) = (v.violating_t, v.violating_point) {
                prop_assert!(q.phi1.eval(&x) < alpha);
                prop_assert!(t * q.phi1.eval(&x) + (1.0 - t) * q.phi2.eval(&x) < alpha);
            }
            let s = intersection_lsc(&q, &line()).unwrap();
            if let Some(x) = s.violating_point {
                prop_assert!(q.phi1.eval(&x) < alpha && q.phi2.eval(&x) < alpha);
            }
        }
    }
}
