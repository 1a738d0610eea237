use std::fmt::Write;

use crate::algebra::{Elem, Relation};
use crate::error::{Error, Result};

use super::csp::{CspInstance, Var};

pub(crate) fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

pub(crate) fn node(v: Var, a: Elem) -> String {
    format!("n{v}_{a}")
}

/// Per-variable intersection of unary constraints.
pub fn unary_domains(i: &CspInstance) -> Result<Vec<Relation>> {
    let d = i.domain_size();
    let mut doms = vec![Relation::full(d, 1)?; i.num_vars()];
    for c in i.constraints() {
        let r = i.relation_of(c)?;
        if c.scope.len() == 1 {
            let v = c.scope[0];
            doms[v] = doms[v].intersection(r)?;
        }
    }
    Ok(doms)
}

/// Microstructure as a DOT digraph: one cluster per variable holding the
/// values allowed by its unary constraints, one edge per binary tuple
/// between allowed values.
pub fn microstructure_dot(i: &CspInstance) -> Result<String> {
    i.ensure_valid()?;
    if let Some(c) = i.constraints().iter().find(|c| c.scope.len() > 2) {
        return Err(Error::Unsupported(format!(
            "microstructure of a constraint of arity {}",
            c.scope.len()
        )));
    }
    let doms = unary_domains(i)?;
    let mut out = String::from("digraph microstructure {\n  rankdir=LR;\n  node [shape=circle];\n");
    for (v, dom) in doms.iter().enumerate() {
        writeln!(out, "  subgraph cluster_{v} {{").unwrap();
        writeln!(out, "    label=\"{}\";", escape(i.var_name(v))).unwrap();
        for a in dom.elements() {
            writeln!(out, "    {} [label=\"{a}\"];", node(v, a)).unwrap();
        }
        out.push_str("  }\n");
    }
    for c in i.constraints().iter().filter(|c| c.scope.len() == 2) {
        let (x, y) = (c.scope[0], c.scope[1]);
        for t in i.relation_of(c)?.tuples() {
            if doms[x].contains(&[t[0]]) && doms[y].contains(&[t[1]]) {
                writeln!(
                    out,
                    "  {} -> {} [label=\"{}\"];",
                    node(x, t[0]),
                    node(y, t[1]),
                    escape(&c.relation)
                )
                .unwrap();
            }
        }
    }
    out.push_str("}\n");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{ak2, az2};

    #[test]
    fn eq_pair() {
        let mut i = CspInstance::with_variables(az2(), 2);
        i.add_constraint(vec![0, 1], "EQ");
        let dot = microstructure_dot(&i).unwrap();
        assert_eq!(dot.matches("subgraph cluster_").count(), 2);
        assert_eq!(dot.matches("[label=\"0\"]").count() + dot.matches("[label=\"1\"]").count(), 4);
        assert_eq!(dot.matches(" -> ").count(), 2);
    }

    #[test]
    fn contradictory_unaries_leave_empty_cluster() {
        let mut i = CspInstance::with_variables(ak2(), 1);
        i.add_constraint(vec![0], "C0");
        i.add_constraint(vec![0], "C1");
        let dot = microstructure_dot(&i).unwrap();
        assert!(dot.contains("subgraph cluster_0 {\n    label=\"v1\";\n  }"));
    }

    #[test]
    fn six_variables_with_chords() {
        let mut i = CspInstance::with_variables(az2(), 6);
        for v in 0..5 {
            i.add_constraint(vec![v, v + 1], "NEQ");
        }
        i.add_constraint(vec![0, 3], "EQ");
        i.add_constraint(vec![2, 5], "NEQ");
        let dot = microstructure_dot(&i).unwrap();
        assert_eq!(dot.matches("subgraph cluster_").count(), 6);
    }

    #[test]
    fn rejects_ternary() {
        let s = crate::algebra::RelationalStructure::new(2)
            .unwrap()
            .with_relation("T", Relation::full(2, 3).unwrap())
            .unwrap();
        let mut i = CspInstance::with_variables(s, 3);
        i.add_constraint(vec![0, 1, 2], "T");
        assert!(microstructure_dot(&i).is_err());
    }
}
