//! One-shot report of every phi-reduction check for a generator pair.

use serde::Serialize;
use serde_json::{json, Value};

use crate::error::Result;
use crate::generators::Generator;
use crate::phi::{block_scenario_residual, default_fit_grid, default_ratio_grid, BlockScenario, Pair, Phi};
use crate::qam::ResidualReport;
use crate::scalar::Scalar;

pub const ORIGIN_SEQUENCE_LENGTH: usize = 10_000;

/// One check of the report. Residual checks fill `lhs`..`rel_residual` and
/// pass when `rel_residual <= tolerance`; the others put their findings in
/// `detail`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Diagnostic {
    pub name: String,
    pub inputs: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lhs: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rhs: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub abs_residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rel_residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<Value>,
    pub pass: bool,
}

impl Diagnostic {
    fn residual<T: Scalar>(name: &str, inputs: Value, r: Result<ResidualReport<T>>, tol: T) -> Self {
        match r {
            Ok(r) => Self {
                name: name.to_string(),
                inputs,
                lhs: Some(r.lhs.as_f64()),
                rhs: Some(r.rhs.as_f64()),
                abs_residual: Some(r.abs_residual.as_f64()),
                rel_residual: Some(r.rel_residual.as_f64()),
                detail: None,
                pass: r.passes(tol),
            },
            Err(e) => Self::failed(name, inputs, e),
        }
    }

    fn finding(name: &str, inputs: Value, detail: Value, pass: bool) -> Self {
        Self {
            name: name.to_string(),
            inputs,
            lhs: None,
            rhs: None,
            abs_residual: None,
            rel_residual: None,
            detail: Some(detail),
            pass,
        }
    }

    fn failed(name: &str, inputs: Value, e: crate::Error) -> Self {
        Self::finding(name, inputs, json!({ "error": e.to_string() }), false)
    }
}

fn pair_json<T: Scalar>(p: Pair<T>) -> Value {
    json!([p.0.as_f64(), p.1.as_f64()])
}

/// Runs the full chain of checks at fixed sample inputs with block masses
/// `alpha` (over `X`) and `beta` (over `Y`).
pub fn phi_diagnostics<T: Scalar>(
    f: &Generator<T>,
    g: &Generator<T>,
    alpha: Pair<T>,
    beta: Pair<T>,
    tol: T,
) -> Result<Vec<Diagnostic>> {
    let phi = Phi::new(f, g)?;
    let lit = T::lit;
    let masses = json!({ "alpha": pair_json(alpha), "beta": pair_json(beta) });
    let with = |extra: Value| {
        let mut m = masses.clone();
        if let (Some(obj), Value::Object(add)) = (m.as_object_mut(), extra) {
            obj.extend(add);
        }
        m
    };
    let mut out = Vec::new();

    let stuv = [lit(1.0), lit(4.0), lit(9.0), lit(16.0)];
    let block = stuv
        .iter()
        .map(|&s| g.inverse(s))
        .collect::<Result<Vec<_>>>()
        .and_then(|v| BlockScenario::new(alpha, beta, [v[0], v[1], v[2], v[3]]));
    match block {
        Ok(sc) => out.push(Diagnostic::residual(
            "block_scenario",
            with(json!({ "values": sc.values().iter().map(|v| v.as_f64()).collect::<Vec<_>>() })),
            block_scenario_residual(f, g, &sc),
            tol,
        )),
        Err(e) => out.push(Diagnostic::failed("block_scenario", masses.clone(), e)),
    }

    out.push(Diagnostic::residual(
        "phi_equation",
        with(json!({ "stuv": [1.0, 4.0, 9.0, 16.0] })),
        phi.equation_residual(alpha, beta, stuv),
        tol,
    ));

    let (xv, yv) = ((lit(1.0), lit(9.0)), (lit(4.0), lit(16.0)));
    out.push(Diagnostic::residual(
        "jensen_affinity",
        with(json!({ "x": pair_json(xv), "y": pair_json(yv) })),
        phi.jensen_affinity_residual(alpha, beta, xv, yv),
        tol,
    ));

    for (label, b) in [("beta_homogeneity_1", beta.0), ("beta_homogeneity_2", beta.1)] {
        out.push(Diagnostic::residual(
            label,
            with(json!({ "beta": b.as_f64(), "x": pair_json(xv) })),
            phi.beta_homogeneity_residual(alpha, b, xv),
            tol,
        ));
    }

    let (ax, ay) = ((lit(1.0), lit(4.0)), (lit(4.0), lit(1.0)));
    out.push(Diagnostic::residual(
        "additivity",
        with(json!({ "x": pair_json(ax), "y": pair_json(ay) })),
        phi.additivity_residual(alpha, ax, ay),
        tol,
    ));

    let ordered = [
        ((lit(1.0), lit(1.0)), (lit(2.0), lit(1.0))),
        ((lit(1.0), lit(1.0)), (lit(1.0), lit(2.0))),
        ((lit(0.5), lit(0.5)), (lit(2.0), lit(2.0))),
        ((lit(0.1), lit(3.0)), (lit(0.2), lit(3.0))),
        ((lit(0.01), lit(0.01)), (lit(100.0), lit(100.0))),
    ];
    let pairs_json: Vec<_> = ordered.iter().map(|(p, q)| json!([pair_json(*p), pair_json(*q)])).collect();
    match phi.monotone_check(alpha, &ordered) {
        Ok(ok) => out.push(Diagnostic::finding(
            "monotone",
            with(json!({ "pairs": pairs_json })),
            json!({ "strictly_increasing": ok }),
            ok,
        )),
        Err(e) => out.push(Diagnostic::failed("monotone", masses.clone(), e)),
    }

    match phi.origin_limit(alpha, ORIGIN_SEQUENCE_LENGTH) {
        Ok(xi) => {
            let decreasing = xi.windows(2).all(|w| w[1] < w[0]);
            let first = xi[0];
            let last = xi[xi.len() - 1];
            let small = last <= lit(1e-3) * first;
            out.push(Diagnostic::finding(
                "origin_limit",
                with(json!({ "n_max": ORIGIN_SEQUENCE_LENGTH })),
                json!({
                    "first": first.as_f64(),
                    "second": xi[1].as_f64(),
                    "last": last.as_f64(),
                    "strictly_decreasing": decreasing,
                    "last_below_1e-3_first": small,
                }),
                decreasing && small,
            ));
        }
        Err(e) => out.push(Diagnostic::failed("origin_limit", masses.clone(), e)),
    }

    let grid = default_fit_grid::<T>();
    let fit = phi.fit_linear_form(alpha, &grid);
    match &fit {
        Ok(fit) => {
            let accepted = phi.linear_form_fit(alpha, &grid, tol)?.is_some();
            out.push(Diagnostic::finding(
                "linear_form",
                with(json!({ "grid": "9x9 geometric over [0.1, 10]^2" })),
                json!({
                    "a": fit.a.as_f64(),
                    "b": fit.b.as_f64(),
                    "max_fit_residual": fit.max_fit_residual.as_f64(),
                    "accepted": accepted,
                }),
                accepted,
            ));
        }
        Err(e) => out.push(Diagnostic::failed("linear_form", masses.clone(), e.clone())),
    }

    if let Ok(fit) = fit {
        let (x, y) = (lit(1.0), lit(4.0));
        out.push(Diagnostic::residual(
            "scaled_cauchy",
            with(json!({ "a": fit.a.as_f64(), "b": fit.b.as_f64(), "x": 1.0, "y": 4.0 })),
            phi.scaled_cauchy_residual(alpha, (fit.a, fit.b), x, y),
            tol,
        ));
    }

    match phi.proportionality_extract(&default_ratio_grid::<T>(), tol) {
        Ok(c) => out.push(Diagnostic::finding(
            "proportionality",
            with(json!({ "grid": "17 geometric points over [0.1, 10]" })),
            json!({ "c": c.map(|c| c.as_f64()) }),
            c.is_some(),
        )),
        Err(e) => out.push(Diagnostic::failed("proportionality", masses.clone(), e)),
    }

    Ok(out)
}
