//! Browser bindings: canonical forms, Latin square classes and bounds.
//!
//! Every function takes and returns plain strings so the page needs no glue
//! beyond what `wasm-bindgen` generates. Errors come back as `Err(String)`,
//! which JavaScript sees as a thrown exception.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use wasm_bindgen::prelude::*;

use mds_atlas::bounds::{bounds_ledger, latin_square_counts, render_class_table};
use mds_atlas::format::{parse_code, write_code};
use mds_atlas::pipeline::classify_latin_squares;
use mds_atlas::pipeline::latin::MAX_LATIN_ORDER;
use mds_atlas::symmetry::{canonical_form, cert_hex};

/// Largest Latin square order the page will classify.
pub const MAX_DEMO_ORDER: usize = 6;

/// Canonical representative of a code in `.mds` text, with its certificate
/// and automorphism group order as comments.
#[wasm_bindgen]
pub fn canonical(text: &str) -> Result<String, String> {
    let code = parse_code(text, "input").map_err(|e| e.to_string())?;
    let f = canonical_form(&code);
    let mut comments = vec![format!("cert: {}", cert_hex(&f.cert)), format!("automorphisms: {}", f.aut_order)];
    let p = code.is_mds();
    if p.is_mds {
        comments.push(format!("MDS with n={} k={} d={}", code.n(), p.k, p.d));
    } else {
        comments.push("not MDS".into());
    }
    Ok(write_code(&f.canon, &comments))
}

/// Equivalence classes of Latin squares of order `q`, one representative per class.
#[wasm_bindgen]
pub fn latin_classes(q: usize) -> Result<String, String> {
    if !(2..=MAX_DEMO_ORDER).contains(&q) {
        return Err(format!("order must be between 2 and {MAX_DEMO_ORDER}"));
    }
    let c = classify_latin_squares(q).map_err(|e| e.to_string())?;
    let mut out = String::new();
    let _ = writeln!(out, "{} classes, {} reduced squares", c.registry.records.len(), c.reduced_count);
    for r in &c.registry.records {
        let _ = writeln!(out, "\nclass {} (automorphisms: {})", r.id, r.aut_order);
        let mut square = vec![vec![0u8; q]; q];
        for w in r.rep.words() {
            square[w[0] as usize][w[1] as usize] = w[2];
        }
        for row in square {
            let line: Vec<String> = row.iter().map(u8::to_string).collect();
            let _ = writeln!(out, "  {}", line.join(" "));
        }
    }
    Ok(out)
}

/// Lower bounds on the number of `(n,n-1)_q` codes for the listed alphabet
/// sizes (comma separated). Orders up to 7 start from their classified Latin
/// squares, which takes several seconds for order 7.
#[wasm_bindgen]
pub fn bounds(qs: &str, max_n: usize) -> Result<String, String> {
    if !(3..=12).contains(&max_n) {
        return Err("max n must be between 3 and 12".into());
    }
    let mut ledgers = Vec::new();
    for part in qs.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let q: usize = part.parse().map_err(|_| format!("not a number: {part}"))?;
        if !(2..=16).contains(&q) {
            return Err(format!("q must be between 2 and 16, got {q}"));
        }
        let mut exact = BTreeMap::new();
        if q <= MAX_LATIN_ORDER {
            exact.insert(3, latin_square_counts(q).map_err(|e| e.to_string())?);
        }
        ledgers.push(bounds_ledger(q, max_n, &exact).map_err(|e| e.to_string())?);
    }
    if ledgers.is_empty() {
        return Err("no alphabet sizes given".into());
    }
    Ok(render_class_table(&ledgers))
}
