//! Browser bindings for the AG-group library.
//!
//! Every export takes and returns JSON strings, so the page needs no
//! generated TypeScript and the payload shapes stay identical to the
//! library's serde output. Errors come back as `{"error": "..."}` instead
//! of throwing, which keeps the JS side to a single code path.
//!
//! The crate builds for `wasm32-unknown-unknown` (the core library's
//! `parallel` feature is disabled here — everything runs on the browser's
//! single thread) and equally as a plain rlib, so the exports are unit
//! tested on the host.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use ag_core::{
    check_all, classify_involutions, construct, count, AbelianGroupType, AgRepresentation,
    Budget, CayleyTable, CheckReport, Endomorphism, InvolutionClassification,
};

/// Orders the demo page may ask for. Enumeration above this runs for
/// minutes on one thread; the page enforces the same ceiling in its input.
const DEMO_MAX_ORDER: u64 = 64;

fn error_json(e: impl std::fmt::Display) -> String {
    serde_json::to_string(&serde_json::json!({ "error": e.to_string() }))
        .expect("error payload serializes")
}

fn ok_json<T: Serialize>(value: &T) -> String {
    match serde_json::to_string(value) {
        Ok(s) => s,
        Err(e) => error_json(e),
    }
}

#[derive(Serialize)]
struct ConstructedTable {
    table: CayleyTable,
    text: String,
    laws: Vec<CheckReport>,
}

/// Builds AG(G, φ) from a group-type string (e.g. `"Z4xZ2"`) and a
/// generator-image matrix given as JSON rows (e.g. `"[[3,0],[0,1]]"`).
/// Returns the Cayley table, its plain-text form, and all seven law
/// reports for the page to render as badges.
#[wasm_bindgen]
pub fn construct_table(group: &str, matrix_json: &str) -> String {
    let group: AbelianGroupType = match group.parse() {
        Ok(g) => g,
        Err(e) => return error_json(e),
    };
    let matrix: Vec<Vec<u64>> = match serde_json::from_str(matrix_json) {
        Ok(m) => m,
        Err(e) => return error_json(format!("matrix: {e}")),
    };
    let endo = match Endomorphism::new(group, matrix) {
        Ok(f) => f,
        Err(e) => return error_json(e),
    };
    let rep = match AgRepresentation::new(endo) {
        Ok(r) => r,
        Err(e) => return error_json(e),
    };
    let table = match construct(&rep) {
        Ok(t) => t,
        Err(e) => return error_json(e),
    };
    let laws = match check_all(&table) {
        Ok(reports) => reports,
        Err(e) => return error_json(e),
    };
    let text = table.to_text();
    ok_json(&ConstructedTable { table, text, laws })
}

/// a(n) with the per-group-type split; `with_representatives` attaches one
/// involution matrix per class. Capped at order 64 for the single-threaded
/// page.
#[wasm_bindgen]
pub fn enumerate_order(n: u32, with_representatives: bool) -> String {
    let n = u64::from(n);
    if n == 0 || n > DEMO_MAX_ORDER {
        return error_json(format!("order must be between 1 and {DEMO_MAX_ORDER}"));
    }
    let budget = Budget { max_order: DEMO_MAX_ORDER, stretch: false, max_nodes: None };
    match count(n, &budget, with_representatives) {
        Ok(result) => ok_json(&result),
        Err(e) => error_json(e),
    }
}

/// Conjugacy classes of the involutory automorphisms of an abelian group,
/// same payload as the library's classification.
#[wasm_bindgen]
pub fn classify_group(group: &str) -> String {
    let ty: AbelianGroupType = match group.parse() {
        Ok(g) => g,
        Err(e) => return error_json(e),
    };
    if ty.order() > DEMO_MAX_ORDER {
        return error_json(format!("order must be at most {DEMO_MAX_ORDER}"));
    }
    let budget = Budget { max_order: DEMO_MAX_ORDER, stretch: false, max_nodes: None };
    let classification: InvolutionClassification = match classify_involutions(&ty, &budget) {
        Ok(c) => c,
        Err(e) => return error_json(e),
    };
    ok_json(&classification)
}
