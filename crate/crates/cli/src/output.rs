//! Rendering helpers shared by the subcommands.

use std::io::IsTerminal;

use e6v_core::qforms::{DiagonalForm, WittInvariants};
use serde_json::{json, Value};

/// Whether PASS/FAIL markers may be colored: only on a terminal and only
/// when `NO_COLOR` is unset or empty.
pub fn use_color() -> bool {
    std::io::stdout().is_terminal()
        && std::env::var("NO_COLOR").map_or(true, |v| v.is_empty())
}

pub fn pass_marker(pass: bool, color: bool) -> String {
    match (pass, color) {
        (true, true) => "\x1b[32mpass\x1b[0m".to_string(),
        (false, true) => "\x1b[31mFAIL\x1b[0m".to_string(),
        (true, false) => "pass".to_string(),
        (false, false) => "FAIL".to_string(),
    }
}

/// Diagonal entries as a JSON array of integers.
pub fn entries_json(form: &DiagonalForm) -> Value {
    Value::Array(
        form.entries()
            .iter()
            .map(|c| Value::from(c.value()))
            .collect(),
    )
}

/// Witt invariants as a JSON object; Hasse symbols keyed by prime.
pub fn invariants_json(inv: &WittInvariants) -> Value {
    let hasse: serde_json::Map<String, Value> = inv
        .hasse
        .iter()
        .map(|(p, s)| (p.to_string(), Value::from(i64::from(*s))))
        .collect();
    json!({
        "rank": inv.rank,
        "disc": inv.disc.value(),
        "signature": [inv.signature.0, inv.signature.1],
        "hasse": hasse,
    })
}

/// Witt invariants on one line, for the text reports.
pub fn invariants_text(inv: &WittInvariants) -> String {
    let hasse: Vec<String> = inv
        .hasse
        .iter()
        .map(|(p, s)| format!("{p}:{s:+}"))
        .collect();
    format!(
        "rank {}, disc {}, signature ({}, {}), hasse [{}]",
        inv.rank,
        inv.disc,
        inv.signature.0,
        inv.signature.1,
        hasse.join(", ")
    )
}

/// Print a JSON document (pretty, trailing newline) on stdout.
pub fn emit_json(doc: &Value) {
    println!(
        "{}",
        serde_json::to_string_pretty(doc).expect("JSON documents serialize")
    );
}
