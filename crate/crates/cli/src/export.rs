//! `graph`, `lattice`, `group`: machine-readable exports.
//!
//! Output is deterministic: graph vertices are listed in label order
//! (x1..x6, x1'..x6', then pairs lexicographically) and every list is
//! sorted, so repeated exports are byte-identical.

use std::process::ExitCode;

use anyhow::Context;
use serde_json::json;

use e6v_core::schlafli::{clique_census, schlafli_labels};
use e6v_core::VerifyContext;

use crate::context::verify_context;
use crate::{ExportArgs, ExportFormat};

#[derive(Clone, Copy, PartialEq, Eq)]
pub enum ExportKind {
    Graph,
    Lattice,
    Group,
}

impl ExportKind {
    fn name(self) -> &'static str {
        match self {
            ExportKind::Graph => "graph",
            ExportKind::Lattice => "lattice",
            ExportKind::Group => "group",
        }
    }
}

/// Adjacency between label indices, with vertices in label order.
fn labelled_edges(ctx: &VerifyContext) -> Vec<(usize, usize)> {
    let labels = schlafli_labels();
    let mut edges = Vec::new();
    for i in 0..labels.len() {
        for j in (i + 1)..labels.len() {
            let (u, v) = (ctx.model.line_of(labels[i]), ctx.model.line_of(labels[j]));
            if ctx.omega.adjacent(u, v) {
                edges.push((i, j));
            }
        }
    }
    edges
}

fn graph_dot(ctx: &VerifyContext) -> String {
    let labels = schlafli_labels();
    let mut out = String::from("graph omega {\n");
    for (i, label) in labels.iter().enumerate() {
        out.push_str(&format!("  v{i} [label=\"{label}\"];\n"));
    }
    for (i, j) in labelled_edges(ctx) {
        out.push_str(&format!("  v{i} -- v{j};\n"));
    }
    out.push_str("}\n");
    out
}

fn graph_json(ctx: &VerifyContext) -> serde_json::Value {
    let labels = schlafli_labels();
    let census = clique_census(&ctx.omega);
    json!({
        "schema_version": 1,
        "kind": "graph",
        "vertices": labels
            .iter()
            .enumerate()
            .map(|(i, label)| json!({"index": i, "label": label.to_string()}))
            .collect::<Vec<_>>(),
        "edges": labelled_edges(ctx)
            .iter()
            .map(|&(i, j)| json!([i, j]))
            .collect::<Vec<_>>(),
        "census": {
            "vertices": census.vertices,
            "edges": census.edges,
            "triangles": census.triangles,
            "tetrahedra": census.tetrahedra,
        },
    })
}

fn lattice_json(ctx: &VerifyContext) -> serde_json::Value {
    let lat = &ctx.lattice;
    let gram = lat.gram();
    json!({
        "schema_version": 1,
        "kind": "lattice",
        "rank": 6,
        "root_count": lat.roots().len(),
        "line_count": lat.lines().len(),
        "roots": lat.roots().iter().map(|r| r.0.to_vec()).collect::<Vec<_>>(),
        "lines": lat.lines()
            .iter()
            .map(|line| json!({"n": line.point.n, "weight": line.point.w.0.to_vec()}))
            .collect::<Vec<_>>(),
        "gram": gram.iter().map(|row| row.to_vec()).collect::<Vec<_>>(),
        "gram_det": lat.gram_det(),
        "signature": [lat.gram_signature().0, lat.gram_signature().1],
    })
}

fn group_json(ctx: &VerifyContext) -> serde_json::Value {
    let weyl = &ctx.weyl;
    let census = weyl.involution_census();
    let maximal = weyl.maximal_cubes(&ctx.lattice);
    let info = weyl.normalizer_image(&ctx.lattice, &ctx.cube.cube);
    let generators: Vec<Vec<u8>> = ctx
        .cube
        .generators
        .iter()
        .map(|&id| weyl.group.element(id).perm.to_vec())
        .collect();
    json!({
        "schema_version": 1,
        "kind": "group",
        "order": weyl.order(),
        "order_factorization": "2^7 * 3^4 * 5",
        "reflections": weyl.positive_roots.len(),
        "involutions_by_degree": census.by_degree.to_vec(),
        "maximal_cubes": maximal.len(),
        "cube_normalizer": {
            "order": info.normalizer_order,
            "centralizer": info.centralizer_order,
            "image": info.image_size,
        },
        "canonical_cube_generators": generators,
    })
}

pub fn run_export(kind: ExportKind, args: &ExportArgs) -> ExitCode {
    if args.format == ExportFormat::Dot && kind != ExportKind::Graph {
        eprintln!(
            "error: dot output is only available for `graph`, not `{}`",
            kind.name()
        );
        return ExitCode::from(2);
    }
    let ctx = match verify_context() {
        Ok(c) => c,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::FAILURE;
        }
    };
    let payload = match (kind, args.format) {
        (ExportKind::Graph, ExportFormat::Dot) => graph_dot(ctx),
        (ExportKind::Graph, ExportFormat::Json) => render(&graph_json(ctx)),
        (ExportKind::Lattice, _) => render(&lattice_json(ctx)),
        (ExportKind::Group, _) => render(&group_json(ctx)),
    };
    match &args.output {
        None => {
            print!("{payload}");
            ExitCode::SUCCESS
        }
        Some(path) => {
            match std::fs::write(path, &payload)
                .with_context(|| format!("writing {}", path.display()))
            {
                Ok(()) => ExitCode::SUCCESS,
                Err(e) => {
                    eprintln!("error: {e:#}");
                    ExitCode::FAILURE
                }
            }
        }
    }
}

fn render(doc: &serde_json::Value) -> String {
    let mut text = serde_json::to_string_pretty(doc).expect("JSON documents serialize");
    text.push('\n');
    text
}
