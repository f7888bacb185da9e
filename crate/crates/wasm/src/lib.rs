//! Browser bindings for the interactive demo page.
//!
//! Every export takes plain strings and returns a JSON string shaped as
//! `{"ok": ...}` or `{"error": "..."}`, so the page needs no glue types
//! and the same functions can be exercised natively in tests.

use std::sync::Arc;

use wasm_bindgen::prelude::wasm_bindgen;

use affalg::algebra::{classify, iso_from_model, verify_isomorphism, AlgebraParams};
use affalg::bench::{run_bench, Workload};
use affalg::coeffs::{FieldElem, FieldMode, Param};
use affalg::expr::{parse_and_eval, parse_ratio};
use affalg::{AlgebraRef, CacheStrategy};

fn ok(value: serde_json::Value) -> String {
    serde_json::json!({ "ok": value }).to_string()
}

fn err(message: impl std::fmt::Display) -> String {
    serde_json::json!({ "error": message.to_string() }).to_string()
}

/// Builds an algebra from the four parameter fields.  A blank field stays
/// symbolic; if all four are filled the computation is over the rationals.
fn resolve(q: &str, alpha: &str, beta: &str, gamma: &str) -> Result<AlgebraRef, String> {
    let fields = [
        (Param::Q, q.trim()),
        (Param::Alpha, alpha.trim()),
        (Param::Beta, beta.trim()),
        (Param::Gamma, gamma.trim()),
    ];
    let mode = if fields.iter().all(|(_, t)| !t.is_empty()) {
        FieldMode::Rational
    } else {
        FieldMode::Symbolic
    };
    let mut values = Vec::with_capacity(4);
    for (param, text) in fields {
        let v = if text.is_empty() {
            FieldElem::symbol(param)
        } else {
            let r = parse_ratio(text).map_err(|e| format!("{}: {}", param.name(), e))?;
            mode.embed_rat(&r).map_err(|e| e.to_string())?
        };
        values.push(v);
    }
    let [q, alpha, beta, gamma]: [FieldElem; 4] = values.try_into().expect("four parameters");
    AlgebraParams::new(q, alpha, beta, gamma)
        .map(Arc::new)
        .map_err(|e| e.to_string())
}

/// Normal form of an expression in the algebra given by the four fields.
#[wasm_bindgen]
pub fn demo_normal_form(q: &str, alpha: &str, beta: &str, gamma: &str, expr: &str) -> String {
    let alg = match resolve(q, alpha, beta, gamma) {
        Ok(a) => a,
        Err(e) => return err(e),
    };
    match parse_and_eval(expr, &alg) {
        Ok(p) => ok(serde_json::json!({
            "algebra": alg.to_string(),
            "normal_form": p.to_string(),
            "terms": p.num_terms(),
        })),
        Err(e) => err(e),
    }
}

/// Classifies the algebra and reports the witness map with verification.
#[wasm_bindgen]
pub fn demo_classify(q: &str, alpha: &str, beta: &str, gamma: &str) -> String {
    let alg = match resolve(q, alpha, beta, gamma) {
        Ok(a) => a,
        Err(e) => return err(e),
    };
    let map = iso_from_model(&alg);
    ok(serde_json::json!({
        "algebra": alg.to_string(),
        "class": classify(&alg).name(),
        "model": map.source().to_string(),
        "map_from_model": map.to_string(),
        "verified": verify_isomorphism(&map),
    }))
}

/// Runs one workload of the deterministic suite under a cache strategy and
/// returns the report (request counts drive the heatmap on the page).
#[wasm_bindgen]
pub fn demo_bench(workload: &str, strategy: &str, seed: u64) -> String {
    let suite = Workload::default_suite(seed);
    let Some(w) = suite.iter().find(|w| w.name == workload) else {
        return err(format!(
            "unknown workload '{}'; available: {}",
            workload,
            suite.iter().map(|w| w.name.as_str()).collect::<Vec<_>>().join(", ")
        ));
    };
    let strategy: CacheStrategy = match strategy.parse() {
        Ok(s) => s,
        Err(e) => return err(e),
    };
    match run_bench(w, strategy) {
        Ok(run) => match serde_json::to_value(&run.report) {
            Ok(v) => ok(v),
            Err(e) => err(e),
        },
        Err(e) => err(e),
    }
}

/// Names of the bundled workloads, for populating the page's dropdown.
#[wasm_bindgen]
pub fn demo_workloads() -> String {
    let names: Vec<String> = Workload::default_suite(1)
        .into_iter()
        .map(|w| w.name)
        .collect();
    ok(serde_json::json!(names))
}
