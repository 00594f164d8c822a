//! Named checks selectable with `--checks`.

use terwilliger_wreath::structure::{
    build_f_family, build_g_family, check_ag_forms, check_block_forms, check_commutation, check_f_properties,
    check_matrix_units, decomposition_report, DecompReport,
};
use terwilliger_wreath::terwilliger::{check_primary_module, check_triple_list, check_triply_regular};
use terwilliger_wreath::wreath::{check_ball_structure, check_vanishing_criterion};
use terwilliger_wreath::{make_context, CheckReport, CycloNum, Error, Moduli, Rational, Result, Scheme};

/// Checks for wreath products of cyclic schemes, in execution order.
pub const WREATH_CHECKS: [&str; 12] = [
    "axioms",
    "ball-structure",
    "vanishing",
    "triple-list",
    "triply-regular",
    "primary-module",
    "block-form",
    "matrix-units",
    "ag-forms",
    "commutation",
    "f-family",
    "decomposition",
];

/// Checks that apply to an arbitrary ingested scheme.
pub const GENERIC_CHECKS: [&str; 3] = ["axioms", "triply-regular", "primary-module"];

/// Resolves `all` or a comma-separated list against `known`, keeping the
/// canonical order.
pub fn select(list: &str, known: &[&'static str]) -> std::result::Result<Vec<&'static str>, String> {
    let wanted: Vec<&str> = list.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
    if wanted.is_empty() {
        return Err("no checks selected".into());
    }
    if wanted == ["all"] {
        return Ok(known.to_vec());
    }
    if let Some(bad) = wanted.iter().find(|w| !known.contains(w)) {
        return Err(format!("unknown check '{bad}' (known: {})", known.join(", ")));
    }
    Ok(known.iter().copied().filter(|k| wanted.contains(k)).collect())
}

pub fn axioms(s: &Scheme) -> CheckReport {
    let report = s.verify_axioms();
    let mut r = CheckReport::new("axioms");
    for (name, check) in [
        ("identity", &report.identity),
        ("partition", &report.partition),
        ("transpose", &report.transpose),
        ("regularity", &report.regularity),
    ] {
        r.record(check.holds, || format!("{name}: {}", check.counterexample.clone().unwrap_or_default()));
    }
    r
}

fn per_point(name: &str, points: &[usize], mut f: impl FnMut(usize) -> Result<CheckReport>) -> Result<CheckReport> {
    let mut r = CheckReport::new(name);
    for &x in points {
        r.absorb(&format!("x={x}"), f(x)?);
    }
    Ok(r)
}

/// A structure error while building the matrix units is a failed check.
fn units_or_fail<S: terwilliger_wreath::Scalar>(
    name: &str,
    built: Result<terwilliger_wreath::structure::GFamily<S>>,
    then: impl FnOnce(&terwilliger_wreath::structure::GFamily<S>) -> Result<CheckReport>,
) -> Result<CheckReport> {
    match built {
        Ok(g) => then(&g),
        Err(Error::Structure(w)) => {
            let mut r = CheckReport::new(name);
            r.fail(w);
            Ok(r)
        }
        Err(e) => Err(e),
    }
}

/// A check result plus the quantities it computed along the way, taken at
/// the first base point.
pub struct Outcome {
    pub report: CheckReport,
    pub dim_t: Option<usize>,
    pub one_dim_count: Option<usize>,
}

impl From<CheckReport> for Outcome {
    fn from(report: CheckReport) -> Self {
        Outcome { report, dim_t: None, one_dim_count: None }
    }
}

fn triply_regular(s: &Scheme, points: &[usize]) -> Result<Outcome> {
    let r = check_triply_regular(s, Some(points))?;
    Ok(Outcome {
        report: r.to_check("triply-regular"),
        dim_t: r.dimensions.first().map(|d| d.dim_t),
        one_dim_count: None,
    })
}

/// Runs one wreath-product check over the selected base points.
pub fn run_wreath(name: &str, m: &Moduli, s: &Scheme, points: &[usize]) -> Result<Outcome> {
    match name {
        "triply-regular" => triply_regular(s, points),
        "f-family" => {
            let mut count = None;
            let report = per_point(name, points, |x| {
                let ctx = make_context::<Rational>(s, x)?.convert(|q| CycloNum::rational(q.clone()));
                let f = build_f_family(&ctx, m)?;
                count.get_or_insert(f.nonzero_count());
                units_or_fail(name, build_g_family(&ctx, m), |g| check_f_properties(&ctx, &f, g))
            })?;
            Ok(Outcome { report, dim_t: None, one_dim_count: count })
        }
        "decomposition" => {
            let r = decomposition_report(m, Some(points))?;
            Ok(Outcome { report: decomposition_check(&r), dim_t: Some(r.dim_t), one_dim_count: Some(r.one_dim_count) })
        }
        _ => run_plain(name, m, s, points).map(Outcome::from),
    }
}

fn run_plain(name: &str, m: &Moduli, s: &Scheme, points: &[usize]) -> Result<CheckReport> {
    let rational = |x| make_context::<Rational>(s, x);
    match name {
        "axioms" => Ok(axioms(s)),
        "ball-structure" => check_ball_structure(m),
        "vanishing" => check_vanishing_criterion(m),
        "triple-list" => per_point(name, points, |x| check_triple_list(m, x)),
        "primary-module" => per_point(name, points, |x| check_primary_module(&rational(x)?)),
        "block-form" => per_point(name, points, |x| check_block_forms(&rational(x)?, m)),
        "matrix-units" => per_point(name, points, |x| {
            units_or_fail(name, build_g_family(&rational(x)?, m), check_matrix_units)
        }),
        "ag-forms" => per_point(name, points, |x| {
            let ctx = rational(x)?;
            units_or_fail(name, build_g_family(&ctx, m), |g| check_ag_forms(&ctx, m, g))
        }),
        "commutation" => per_point(name, points, |x| check_commutation(&rational(x)?, m)),
        other => Err(Error::Domain(format!("no wreath check named {other}"))),
    }
}

/// Collapses a decomposition report into a single check.
pub fn decomposition_check(r: &DecompReport) -> CheckReport {
    let mut c = CheckReport::new("decomposition");
    c.record(r.dim_t == r.dim_formula, || format!("dim T = {}, formula {}", r.dim_t, r.dim_formula));
    for v in &r.verdicts {
        c.record(v.passed(), || v.to_string());
    }
    c
}

/// Runs one generic check on an ingested scheme.
pub fn run_generic(name: &str, s: &Scheme, points: &[usize]) -> Result<Outcome> {
    match name {
        "axioms" => Ok(axioms(s).into()),
        "triply-regular" => triply_regular(s, points),
        "primary-module" => {
            per_point(name, points, |x| check_primary_module(&make_context::<Rational>(s, x)?)).map(Outcome::from)
        }
        other => Err(Error::Domain(format!("no generic check named {other}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn selection_keeps_canonical_order() {
        assert_eq!(select("decomposition,axioms", &WREATH_CHECKS).unwrap(), vec!["axioms", "decomposition"]);
        assert_eq!(select("all", &GENERIC_CHECKS).unwrap().len(), 3);
        assert!(select("axioms,bogus", &WREATH_CHECKS).is_err());
        assert!(select(" , ", &WREATH_CHECKS).is_err());
    }
}
