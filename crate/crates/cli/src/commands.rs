use phidual_core::acceptance::{run_criteria, CriterionResult, CRITERIA};
use phidual_core::catalog;
use phidual_core::conjugation::{conjugate_all, phi_convexity_report};
use phidual_core::duality::{dual_value, value_function};
use phidual_core::minimax::{
    intersection_general, intersection_lsc, search_intersection_witness, IntersectionQuery, DEFAULT_T_STEPS, DEFAULT_WITNESS_BUDGET,
};
use phidual_core::subdifferential::estimate_subdifferential;
use phidual_core::{BoxDomain, Grid, GridFunction};
use serde_json::{json, Value};

use crate::config::RunConfig;
use crate::CliError;

/// JSON document for stdout or `--output`, plus an optional CSV table.
pub struct Output {
    pub json: Value,
    pub csv: Option<String>,
}

fn to_json<T: serde::Serialize>(value: &T) -> Value {
    serde_json::to_value(value).expect("report types serialize")
}

fn tabulate(cfg: &RunConfig) -> Result<(GridFunction, phidual_core::ParameterGrid), CliError> {
    let p = cfg.function_problem()?;
    let f = GridFunction::tabulate(&p.function, &p.grid)?;
    Ok((f, p.pg))
}

pub fn conjugate(cfg: &RunConfig) -> Result<Output, CliError> {
    let (f, pg) = tabulate(cfg)?;
    let values = conjugate_all(&f, &pg)?;
    let rows: Vec<Value> = pg
        .members()
        .iter()
        .zip(&values)
        .map(|((a, ell), v)| json!({"a": a, "ell": ell, "conjugate": v}))
        .collect();
    let report = phi_convexity_report(&f, &pg)?;
    Ok(Output {
        json: json!({"class": pg.class(), "members": rows}),
        csv: Some(report.to_csv()),
    })
}

pub fn biconj(cfg: &RunConfig) -> Result<Output, CliError> {
    let (f, pg) = tabulate(cfg)?;
    let report = phi_convexity_report(&f, &pg)?;
    let mut json = to_json(&report);
    json["class"] = to_json(&pg.class());
    json["members"] = json!(pg.len());
    Ok(Output {
        json,
        csv: Some(report.to_csv()),
    })
}

pub fn subdiff(cfg: &RunConfig) -> Result<Output, CliError> {
    let point = cfg
        .point
        .clone()
        .ok_or_else(|| CliError::Validation("`point` is required for subdiff".into()))?;
    let (f, pg) = tabulate(cfg)?;
    let sample = estimate_subdifferential(&f, &point, cfg.epsilon.unwrap_or(0.0), &pg)?;
    Ok(Output {
        json: to_json(&sample),
        csv: Some(sample.to_csv()),
    })
}

fn alphas(cfg: &RunConfig) -> Result<Vec<f64>, CliError> {
    cfg.alphas
        .clone()
        .filter(|a| !a.is_empty())
        .ok_or_else(|| CliError::Validation("`alphas` must list at least one level for intersect".into()))
}

pub fn intersect(cfg: &RunConfig) -> Result<Output, CliError> {
    let alphas = alphas(cfg)?;
    match &cfg.pair {
        Some((s1, s2)) => {
            let phi1 = s1.build("pair[0]")?;
            let phi2 = s2.build("pair[1]")?;
            let grid = match &cfg.x_grid {
                Some(g) => g.build("x_grid")?,
                None => {
                    let n = phi1.dim();
                    Grid::uniform(BoxDomain::cube(n, -10.0, 10.0)?, if n == 1 { 2001 } else { 41 })?
                }
            };
            let t_steps = cfg.t_steps.unwrap_or(DEFAULT_T_STEPS);
            let lsc = s1.class.is_lsc() && s2.class.is_lsc();
            let mut verdicts = Vec::with_capacity(alphas.len());
            for alpha in alphas {
                let q = IntersectionQuery::with_t_steps(phi1.clone(), phi2.clone(), alpha, t_steps)?;
                let general = intersection_general(&q, &grid)?;
                let sublevel = if lsc { Some(intersection_lsc(&q, &grid)?) } else { None };
                verdicts.push(json!({"alpha": alpha, "general": general, "lsc_sublevel": sublevel}));
            }
            Ok(Output {
                json: json!({"phi1": phi1, "phi2": phi2, "verdicts": verdicts}),
                csv: None,
            })
        }
        None => {
            let setup = cfg.duality_problem()?;
            let class = cfg.dual_class_name();
            let l = setup.lagrangian(class)?;
            let samples = l.dual_class().samples(&setup.dual_pg(class)?)?;
            let pg = setup.witness_pg(class)?;
            let budget = cfg.budget.unwrap_or(DEFAULT_WITNESS_BUDGET);
            let mut searches = Vec::with_capacity(alphas.len());
            for alpha in alphas {
                searches.push(search_intersection_witness(&l, &setup.x_grid, alpha, &samples, &pg, budget)?);
            }
            Ok(Output {
                json: json!({"dual_class": class, "budget": budget, "searches": searches}),
                csv: None,
            })
        }
    }
}

pub fn lagrangian(cfg: &RunConfig) -> Result<Output, CliError> {
    let setup = cfg.duality_problem()?;
    let class = cfg.dual_class_name();
    let l = setup.lagrangian(class)?;
    let params = l.dual_class().samples(&setup.dual_pg(class)?)?;
    let table = l.table(&setup.x_grid, &params)?;
    let dual: Vec<Value> = params
        .iter()
        .zip(table.dual_function())
        .map(|(p, q)| json!({"a": p.a(), "v": p.v(), "q": q}))
        .collect();
    Ok(Output {
        json: json!({
            "dual_class": class,
            "x_points": setup.x_grid.len(),
            "dual_samples": params.len(),
            "dual_function": dual,
        }),
        csv: Some(table.to_csv()),
    })
}

pub fn gap(cfg: &RunConfig) -> Result<Output, CliError> {
    let setup = cfg.duality_problem()?;
    let report = setup.certify(cfg.dual_class_name())?;
    Ok(Output {
        json: to_json(&report),
        csv: None,
    })
}

pub fn strong(cfg: &RunConfig) -> Result<Output, CliError> {
    let setup = cfg.duality_problem()?;
    let class = cfg.dual_class_name();
    let report = setup.certify(class)?;
    let table = value_function(setup.perturbation.as_ref(), &setup.x_grid, &setup.y_grid)?;
    let dual = dual_value(&setup.lagrangian(class)?, &setup.x_grid, &setup.dual_pg(class)?)?;
    Ok(Output {
        json: json!({
            "dual_class": class,
            "anchor": table.anchor(),
            "V_at_anchor": report.v_at_anchor,
            "subdifferential_at_anchor": report.subdifferential_at_anchor,
            "dual_value": dual.value,
            "dual_argmax": dual.argmax,
            "strong_duality": report.certifications.strong_duality,
            "v_paraconvexity_modulus": report.v_paraconvexity_modulus,
            "anchor_interior": report.anchor_interior,
            "checks": report.checks,
        }),
        csv: Some(table.to_csv()),
    })
}

pub fn list_catalog() -> Result<Output, CliError> {
    let mut entries = Vec::new();
    for name in catalog::names() {
        let e = catalog::load(name)?;
        entries.push(json!({
            "name": e.name,
            "kind": if e.duality().is_some() { "duality" } else { "function" },
            "notes": e.notes,
            "expected": e.expected,
        }));
    }
    Ok(Output {
        json: json!({"entries": entries}),
        csv: None,
    })
}

pub fn verify_all(cfg: &RunConfig) -> Result<(Output, Vec<CriterionResult>), CliError> {
    let ids: Vec<u8> = match &cfg.criteria {
        Some(ids) => {
            if let Some(bad) = ids.iter().find(|&&i| i == 0 || usize::from(i) > CRITERIA.len()) {
                return Err(CliError::Validation(format!("criterion {bad} is not in 1..={}", CRITERIA.len())));
            }
            ids.clone()
        }
        None => (1..=CRITERIA.len() as u8).collect(),
    };
    let results = run_criteria(&ids);
    let failed = results.iter().filter(|r| !r.passed).count();
    let json = json!({"passed": results.len() - failed, "failed": failed, "results": results});
    Ok((Output { json, csv: None }, results))
}
