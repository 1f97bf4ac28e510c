use std::fmt::Write;

use cheshire_core::hilbert::Ket;
use serde_json::{json, Value};

/// `label,re,im` rows in round-trip float form.
pub fn ket_csv(ket: &Ket) -> String {
    let conv = ket.convention();
    let mut out = String::from("label,re,im\n");
    for (k, a) in ket.iter() {
        let _ = writeln!(out, "{},{:?},{:?}", conv.label(k), a.re, a.im);
    }
    out
}

pub fn ket_json(ket: &Ket) -> Value {
    let conv = ket.convention();
    Value::Array(
        ket.iter()
            .map(|(k, a)| json!({ "label": conv.label(k), "alias": conv.alias(k), "re": a.re, "im": a.im }))
            .collect(),
    )
}

pub fn print_json(value: &Value) {
    println!("{}", serde_json::to_string_pretty(value).expect("JSON values serialize"));
}
