use std::fmt::Write;

use serde::{Deserialize, Serialize};

use crate::canon::{derivation_to_trace, Derivation};
use crate::engine::{DatalogProgram, DerivationGraph, Fact};
use crate::error::{Error, Result};
use crate::instances::{escape, microstructure_dot, node, CspInstance, PathInstance};
use crate::pathsolver::Braid;

use super::experiment::Report;
use super::formats::{csp_to_json, path_to_json, to_json, LoadedInstance};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExportFormat {
    Dot,
    Json,
    Text,
}

impl ExportFormat {
    pub fn parse(s: &str) -> Result<ExportFormat> {
        match s {
            "dot" => Ok(ExportFormat::Dot),
            "json" => Ok(ExportFormat::Json),
            "text" => Ok(ExportFormat::Text),
            _ => Err(Error::Unsupported(format!("format `{s}`"))),
        }
    }
}

/// Anything that can be exported.
#[derive(Clone, Copy, Debug)]
pub enum ExportTarget<'a> {
    Instance(&'a LoadedInstance),
    Program(&'a DatalogProgram),
    Graph(&'a DatalogProgram, &'a CspInstance, &'a DerivationGraph),
    Trace(&'a CspInstance, &'a Derivation),
    Braid(&'a PathInstance, &'a Braid),
    Report(&'a Report),
}

impl ExportTarget<'_> {
    fn kind(&self) -> &'static str {
        match self {
            ExportTarget::Instance(_) => "instance",
            ExportTarget::Program(_) => "program",
            ExportTarget::Graph(..) => "derivation graph",
            ExportTarget::Trace(..) => "trace",
            ExportTarget::Braid(..) => "braid",
            ExportTarget::Report(_) => "report",
        }
    }
}

pub fn export_artifacts(target: ExportTarget<'_>, format: ExportFormat) -> Result<String> {
    use ExportFormat::*;
    match (target, format) {
        (ExportTarget::Instance(i), Dot) => microstructure_dot(&i.to_csp()),
        (ExportTarget::Instance(LoadedInstance::Csp(i)), Json) => Ok(csp_to_json(i)),
        (ExportTarget::Instance(LoadedInstance::Path(p)), Json) => Ok(path_to_json(p, None)),
        (ExportTarget::Program(p), Text) => Ok(p.to_string()),
        (ExportTarget::Graph(p, i, g), Dot) => Ok(graph_dot(p, i, g)),
        (ExportTarget::Trace(i, d), Text | Json) => derivation_to_trace(i, d),
        (ExportTarget::Braid(p, b), Dot) => braid_dot(p, b),
        (ExportTarget::Braid(_, b), Json) => Ok(to_json(b)),
        (ExportTarget::Report(r), Text) => Ok(report_text(r)),
        (ExportTarget::Report(r), Json) => Ok(to_json(r)),
        (t, f) => Err(Error::Unsupported(format!("{} as {f:?}", t.kind()).to_lowercase())),
    }
}

fn fact_label(p: &DatalogProgram, i: &CspInstance, f: &Fact) -> String {
    let args: Vec<&str> = f.1.iter().map(|&v| i.var_name(v)).collect();
    format!("{}({})", p.predicate(f.0).name, args.join(","))
}

/// Vertices are IDB facts; base facts are boxed and goal facts doubled.
pub fn graph_dot(p: &DatalogProgram, i: &CspInstance, g: &DerivationGraph) -> String {
    let mut ids = std::collections::BTreeMap::new();
    for f in g.base.keys().chain(g.edges.keys().flat_map(|(u, v)| [u, v])) {
        let n = ids.len();
        ids.entry(f.clone()).or_insert(n);
    }
    let mut out = String::from("digraph derivation {\n");
    for (f, id) in &ids {
        let mut attrs = format!("label=\"{}\"", escape(&fact_label(p, i, f)));
        if g.base.contains_key(f) {
            attrs.push_str(", shape=box");
        }
        if g.goals.contains(&f.0) {
            attrs.push_str(", peripheries=2");
        }
        writeln!(out, "  f{id} [{attrs}];").unwrap();
    }
    for ((u, v), gr) in &g.edges {
        writeln!(out, "  f{} -> f{} [label=\"r{}\"];", ids[u], ids[v], gr.rule).unwrap();
    }
    out.push_str("}\n");
    out
}

const COLORS: [&str; 6] = ["red", "blue", "darkgreen", "orange", "purple", "brown"];

/// Microstructure of `p` with each braid solution drawn as a coloured path
/// and the crossing values filled.
pub fn braid_dot(p: &PathInstance, b: &Braid) -> Result<String> {
    let mut out = microstructure_dot(&p.to_csp())?;
    out.truncate(out.len() - 2);
    out.push('\n');
    for (k, s) in b.solutions.iter().enumerate() {
        let color = COLORS[k % COLORS.len()];
        for v in 1..s.len() {
            writeln!(
                out,
                "  {} -> {} [color={color}, penwidth=2, label=\"s{k}\"];",
                node(v - 1, s[v - 1]),
                node(v, s[v])
            )
            .unwrap();
        }
    }
    for (k, &i) in b.indices.iter().enumerate() {
        let a = b.solutions[k][i - 1];
        writeln!(out, "  {} [style=filled, fillcolor=gray];", node(i - 1, a)).unwrap();
    }
    out.push_str("}\n");
    Ok(out)
}

/// Fixed-width table: one row per trial, then the agreement matrix and
/// property tallies.
pub fn report_text(r: &Report) -> String {
    let mut out = String::new();
    writeln!(out, "structure {}  seed {}  trials {}", r.structure.trim(), r.seed, r.trials.len()).unwrap();
    let mut header = format!("{:>6} {:>6}", "trial", "len");
    for k in &r.solvers {
        write!(header, " {:>10}", k.name()).unwrap();
    }
    header.push_str("  trace");
    writeln!(out, "{header}").unwrap();
    for t in &r.trials {
        write!(out, "{:>6} {:>6}", t.index, t.length).unwrap();
        for k in &r.solvers {
            write!(out, " {:>10}", t.outcomes[k].to_string()).unwrap();
        }
        if let Some(tr) = &t.trace {
            write!(out, "  {}", &tr.id[..12]).unwrap();
        }
        if !t.violations.is_empty() {
            write!(out, "  !! {}", t.violations.join("; ")).unwrap();
        }
        out.push('\n');
    }
    writeln!(out, "agreement").unwrap();
    let mut row = format!("{:>12}", "");
    for k in &r.solvers {
        write!(row, " {:>12}", k.name()).unwrap();
    }
    writeln!(out, "{row}").unwrap();
    for (a, ka) in r.solvers.iter().enumerate() {
        write!(out, "{:>12}", ka.name()).unwrap();
        for b in 0..r.solvers.len() {
            write!(out, " {:>12}", format!("{}/{}", r.agreement[a][b], r.compared[a][b])).unwrap();
        }
        out.push('\n');
    }
    let p = &r.properties;
    for (name, t) in [
        ("witness valid", p.witness_valid),
        ("trace replay", p.trace_replay),
        ("canon sound", p.canon_sound),
    ] {
        writeln!(out, "{name:<14} {}/{}", t.checked - t.failed, t.checked).unwrap();
    }
    writeln!(
        out,
        "violations {}  budget exceeded {}  errors {}",
        r.violations, r.budget_exceeded, r.errors
    )
    .unwrap();
    out
}
