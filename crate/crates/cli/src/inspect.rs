//! `twist`, `form`, and `sw`: printing forms and class tables.

use std::process::ExitCode;

use serde_json::json;

use e6v_core::qforms::DiagonalForm;
use e6v_core::sw::{solve_p, total_class, trace_form_class, F2Poly, MVector};
use e6v_core::twisting::{verify_identity, IdentityName, TwistSpec};
use e6v_core::weyl::GSet;

use crate::context::verify_context;
use crate::output::{emit_json, entries_json, invariants_json, invariants_text};
use crate::FormName;

fn parse_classes(text: &str) -> Result<TwistSpec, String> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    if parts.len() != 4 {
        return Err(format!(
            "--classes needs exactly 4 comma-separated integers, got {}",
            parts.len()
        ));
    }
    let mut classes = [0i64; 4];
    for (slot, part) in classes.iter_mut().zip(&parts) {
        *slot = part
            .parse::<i64>()
            .map_err(|_| format!("--classes entry {part:?} is not an integer"))?;
    }
    TwistSpec::from_ints(classes).map_err(|e| e.to_string())
}

/// The registry identity whose left side is the requested twisted form.
fn compare_identity(form: FormName) -> Option<IdentityName> {
    match form {
        FormName::Q6 => Some(IdentityName::Thm2_44),
        FormName::Q7 => Some(IdentityName::Thm2_45),
        FormName::Q27 => Some(IdentityName::Thm2_46),
        FormName::Q45 => Some(IdentityName::Eq610),
        FormName::Q4 | FormName::Q5 => None,
    }
}

pub fn run_twist(classes: &str, form: FormName, compare: bool, json: bool) -> ExitCode {
    let twist = match parse_classes(classes) {
        Ok(t) => t,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    let identity = match (compare, compare_identity(form)) {
        (false, _) => None,
        (true, Some(id)) => Some(id),
        (true, None) => {
            eprintln!(
                "error: no closed-form comparison is registered for {}; use q6, q7, q27, or q45",
                form.as_str()
            );
            return ExitCode::from(2);
        }
    };

    let ctx = match verify_context() {
        Ok(c) => c,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::FAILURE;
        }
    };
    let family = ctx.twisted_family(&twist);
    let twisted: &DiagonalForm = match form {
        FormName::Q4 => &family.q4,
        FormName::Q5 => &family.q5,
        FormName::Q6 => &family.q6,
        FormName::Q7 => &family.q7,
        FormName::Q27 => &family.q27_direct,
        FormName::Q45 => &family.q45_direct,
    };
    let inv = twisted.witt_invariants();

    let report = match identity {
        None => None,
        Some(id) => match verify_identity(ctx, id, &twist) {
            Ok(r) => Some(r),
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::FAILURE;
            }
        },
    };

    if json {
        let mut doc = json!({
            "command": "twist",
            "schema_version": 1,
            "classes": twist.classes().iter().map(|c| c.value()).collect::<Vec<_>>(),
            "form": form.as_str(),
            "twisted": {
                "entries": entries_json(twisted),
                "invariants": invariants_json(&inv),
            },
        });
        if let Some(r) = &report {
            doc["compare"] = json!({
                "identity": r.identity.name(),
                "rhs_entries": entries_json(&r.rhs),
                "rhs_invariants": invariants_json(&r.rhs_invariants),
                "verdict": r.verdict,
            });
        }
        emit_json(&doc);
    } else {
        println!("twist {twist}");
        println!("{} twisted: {twisted}", form.as_str());
        println!("  invariants: {}", invariants_text(&inv));
        if let Some(r) = &report {
            println!("compare [{}]: rhs = {}", r.identity.name(), r.rhs);
            println!("  invariants: {}", invariants_text(&r.rhs_invariants));
            println!(
                "  verdict: {}",
                if r.verdict { "isometric" } else { "NOT isometric" }
            );
        }
    }

    match &report {
        Some(r) if !r.verdict => ExitCode::FAILURE,
        _ => ExitCode::SUCCESS,
    }
}

pub fn run_form(form: FormName, json: bool) -> ExitCode {
    let ctx = match verify_context() {
        Ok(c) => c,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::FAILURE;
        }
    };
    let family = ctx.twisted_family(&TwistSpec::TRIVIAL);
    let (plain, cform) = match form {
        FormName::Q4 => (family.q4, None),
        FormName::Q5 => (family.q5, None),
        FormName::Q6 => (family.q6, Some(&ctx.q6_cform)),
        FormName::Q7 => (family.q7, Some(&ctx.q7_cform)),
        FormName::Q27 => (family.q27_direct, Some(&ctx.q27_cform)),
        FormName::Q45 => (family.q45_direct, None),
    };
    let inv = plain.witt_invariants();

    if json {
        let mut doc = json!({
            "command": "form",
            "schema_version": 1,
            "form": form.as_str(),
            "rank": plain.rank(),
            "entries": entries_json(&plain),
            "invariants": invariants_json(&inv),
        });
        if let Some(cform) = cform {
            let components: serde_json::Map<String, serde_json::Value> = cform
                .components
                .iter()
                .map(|(mask, part)| (mask.to_string(), entries_json(part)))
                .collect();
            doc["components"] = serde_json::Value::Object(components);
        }
        emit_json(&doc);
    } else {
        println!("{}: {plain}", form.as_str());
        println!("  invariants: {}", invariants_text(&inv));
        if let Some(cform) = cform {
            println!("  character components:");
            for (mask, part) in &cform.components {
                println!("    mask {mask:2}: {part}");
            }
        }
    }
    ExitCode::SUCCESS
}

/// One row of the `sw` report.
struct SwAction {
    name: &'static str,
    describes: &'static str,
    m: MVector,
}

fn exponents(p: &F2Poly) -> Vec<usize> {
    match p.degree() {
        None => Vec::new(),
        Some(d) => (0..=d).filter(|&k| p.coeff(k)).collect(),
    }
}

/// Slots (1, 2, 4) whose factor is present in the e := 0 specialization.
fn e_zero_factor_slots(m: &MVector) -> Vec<usize> {
    let mut slots = Vec::new();
    if m.0[0] % 2 == 1 {
        slots.push(1);
    }
    if (m.0[1] / 2) % 2 == 1 {
        slots.push(2);
    }
    if (m.0[3] / 4) % 2 == 1 {
        slots.push(4);
    }
    slots
}

pub fn run_sw(json: bool) -> ExitCode {
    let ctx = match verify_context() {
        Ok(c) => c,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::FAILURE;
        }
    };
    let actions = {
        use e6v_core::sw::{m_vector_dim6, m_vector_from_action};
        let dim6 = m_vector_dim6(&ctx.weyl, &ctx.cube);
        let lines = m_vector_from_action(&ctx.weyl, &ctx.cube, &GSet::lines());
        let triangles = m_vector_from_action(&ctx.weyl, &ctx.cube, &ctx.triangles);
        match (dim6, lines, triangles) {
            (Ok(dim6), Ok(lines), Ok(triangles)) => [
                SwAction {
                    name: "dim6",
                    describes: "reflection representation",
                    m: dim6,
                },
                SwAction {
                    name: "lines",
                    describes: "permutation of the 27 lines",
                    m: lines,
                },
                SwAction {
                    name: "triangles",
                    describes: "permutation of the 45 triangles",
                    m: triangles,
                },
            ],
            _ => {
                eprintln!("error: a cube generator product is not an involution");
                return ExitCode::FAILURE;
            }
        }
    };

    let mut rows = Vec::new();
    for action in &actions {
        let p = match solve_p(&action.m) {
            Ok(p) => p,
            Err(e) => {
                eprintln!("error: {} has no class table: {e}", action.name);
                return ExitCode::FAILURE;
            }
        };
        let total = match total_class(&action.m) {
            Ok(t) => t,
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::FAILURE;
            }
        };
        // slots whose coefficient picks up the trace-form t-correction
        let diff = trace_form_class(&total).add(&total);
        let correction: Vec<usize> = (0..5).filter(|&k| diff.coeffs[k].t_part).collect();
        rows.push((action, p, e_zero_factor_slots(&action.m), correction));
    }

    if json {
        let actions_json: Vec<serde_json::Value> = rows
            .iter()
            .map(|(action, p, e_zero, correction)| {
                json!({
                    "name": action.name,
                    "action": action.describes,
                    "m": action.m.0,
                    "p": p.iter()
                        .map(|poly| json!({
                            "exponents": exponents(poly),
                            "text": poly.to_string(),
                        }))
                        .collect::<Vec<_>>(),
                    "e_zero_factor_slots": e_zero,
                    "trace_correction_slots": correction,
                })
            })
            .collect();
        emit_json(&json!({
            "command": "sw",
            "schema_version": 1,
            "actions": actions_json,
        }));
    } else {
        for (action, p, e_zero, correction) in &rows {
            println!("{} ({}):", action.name, action.describes);
            println!(
                "  m = ({}, {}, {}, {})",
                action.m.0[0], action.m.0[1], action.m.0[2], action.m.0[3]
            );
            for (i, poly) in p.iter().enumerate() {
                println!("  p{} = {poly}", i + 1);
            }
            let factors: String = e_zero
                .iter()
                .map(|slot| format!("(1 + w{slot})"))
                .collect::<Vec<_>>()
                .join(" ");
            println!(
                "  e := 0 factorization: {}",
                if factors.is_empty() { "1" } else { &factors }
            );
            let corr: String = correction
                .iter()
                .map(|slot| format!("t*w{slot}"))
                .collect::<Vec<_>>()
                .join(" + ");
            println!(
                "  trace-form correction: {}",
                if corr.is_empty() { "none" } else { &corr }
            );
        }
    }
    ExitCode::SUCCESS
}
