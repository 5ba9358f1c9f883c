//! Lazily built shared state for the subcommands.

use std::sync::OnceLock;

use e6v_core::VerifyContext;

static CONTEXT: OnceLock<Result<VerifyContext, String>> = OnceLock::new();

/// The shared verification context, built once on first use. Errors are
/// reported as strings so later callers see the same failure.
pub fn verify_context() -> Result<&'static VerifyContext, String> {
    CONTEXT
        .get_or_init(|| {
            eprintln!("building verification context (lattice, graph, group, decompositions)...");
            VerifyContext::build().map_err(|e| e.to_string())
        })
        .as_ref()
        .map_err(Clone::clone)
}
