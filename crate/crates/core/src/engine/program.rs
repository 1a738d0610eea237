use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Predicate {
    pub name: String,
    pub arity: usize,
    pub idb: bool,
}

/// An atom over rule-local variables `0..rule.vars.len()`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Atom {
    pub predicate: usize,
    pub args: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Rule {
    pub head: Atom,
    pub body: Vec<Atom>,
    /// Source names of the local variables.
    pub vars: Vec<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Fragment {
    General,
    Linear,
    Symmetric,
}

impl fmt::Display for Fragment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Fragment::General => "general",
            Fragment::Linear => "linear",
            Fragment::Symmetric => "symmetric",
        })
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DatalogProgram {
    predicates: Vec<Predicate>,
    by_name: HashMap<String, usize>,
    rules: Vec<Rule>,
    goals: Vec<usize>,
}

impl DatalogProgram {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn declare(&mut self, name: &str, arity: usize, idb: bool) -> Result<usize> {
        if arity == 0 {
            return Err(Error::NullaryRelation);
        }
        if let Some(&p) = self.by_name.get(name) {
            let old = &self.predicates[p];
            if old.arity != arity || old.idb != idb {
                return Err(Error::Precondition(format!(
                    "predicate `{name}` redeclared with a different signature"
                )));
            }
            return Ok(p);
        }
        let p = self.predicates.len();
        self.predicates.push(Predicate {
            name: name.to_string(),
            arity,
            idb,
        });
        self.by_name.insert(name.to_string(), p);
        Ok(p)
    }

    pub fn set_goal(&mut self, name: &str) -> Result<()> {
        let p = self.predicate_id(name)?;
        if !self.predicates[p].idb {
            return Err(Error::Precondition(format!("goal `{name}` must be an IDB")));
        }
        if !self.goals.contains(&p) {
            self.goals.push(p);
        }
        Ok(())
    }

    pub fn add_rule(&mut self, rule: Rule) -> Result<()> {
        self.check_atom(&rule.head, rule.vars.len())?;
        if !self.predicates[rule.head.predicate].idb {
            return Err(Error::Precondition(format!(
                "rule head `{}` is not an IDB",
                self.predicates[rule.head.predicate].name
            )));
        }
        for a in &rule.body {
            self.check_atom(a, rule.vars.len())?;
        }
        self.rules.push(rule);
        Ok(())
    }

    fn check_atom(&self, a: &Atom, nvars: usize) -> Result<()> {
        let p = self
            .predicates
            .get(a.predicate)
            .ok_or_else(|| Error::UnknownRelation(format!("#{}", a.predicate)))?;
        if p.arity != a.args.len() {
            return Err(Error::ArityMismatch {
                expected: p.arity,
                found: a.args.len(),
            });
        }
        if let Some(&v) = a.args.iter().find(|&&v| v >= nvars) {
            return Err(Error::VariableOutOfRange(v));
        }
        Ok(())
    }

    pub fn predicate_id(&self, name: &str) -> Result<usize> {
        self.by_name
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownRelation(name.to_string()))
    }

    pub fn predicate(&self, p: usize) -> &Predicate {
        &self.predicates[p]
    }

    pub fn predicates(&self) -> &[Predicate] {
        &self.predicates
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn goals(&self) -> &[usize] {
        &self.goals
    }

    pub fn is_idb(&self, p: usize) -> bool {
        self.predicates[p].idb
    }

    pub fn is_goal(&self, p: usize) -> bool {
        self.goals.contains(&p)
    }

    /// Positions of IDB atoms in the body of `rule`.
    pub fn idb_positions(&self, rule: &Rule) -> Vec<usize> {
        (0..rule.body.len())
            .filter(|&j| self.is_idb(rule.body[j].predicate))
            .collect()
    }

    /// The rule with its head and the IDB body atom at `pos` swapped.
    pub fn mirror(&self, rule: &Rule, pos: usize) -> Rule {
        let mut m = rule.clone();
        std::mem::swap(&mut m.head, &mut m.body[pos]);
        m
    }

    pub fn classify(&self) -> Fragment {
        if self.rules.iter().any(|r| self.idb_positions(r).len() > 1) {
            return Fragment::General;
        }
        let symmetric = self.rules.iter().all(|r| match self.idb_positions(r).first() {
            None => true,
            Some(&pos) => {
                let m = self.mirror(r, pos);
                self.rules.iter().any(|q| self.equivalent(&m, q))
            }
        });
        if symmetric {
            Fragment::Symmetric
        } else {
            Fragment::Linear
        }
    }

    /// Equal up to a bijective renaming of variables and reordering of
    /// non-IDB body atoms.
    pub fn equivalent(&self, a: &Rule, b: &Rule) -> bool {
        if a.vars.len() != b.vars.len() || a.body.len() != b.body.len() {
            return false;
        }
        let pa = self.idb_positions(a);
        let pb = self.idb_positions(b);
        if pa.len() != pb.len() {
            return false;
        }
        let mut fwd = vec![usize::MAX; a.vars.len()];
        let mut bwd = vec![usize::MAX; b.vars.len()];
        let mut trail = Vec::new();
        if !bind_atom(&a.head, &b.head, &mut fwd, &mut bwd, &mut trail) {
            return false;
        }
        for (&i, &j) in pa.iter().zip(&pb) {
            if !bind_atom(&a.body[i], &b.body[j], &mut fwd, &mut bwd, &mut trail) {
                return false;
            }
        }
        let sa: Vec<&Atom> = (0..a.body.len()).filter(|i| !pa.contains(i)).map(|i| &a.body[i]).collect();
        let sb: Vec<&Atom> = (0..b.body.len()).filter(|i| !pb.contains(i)).map(|i| &b.body[i]).collect();
        let mut used = vec![false; sb.len()];
        match_sides(&sa, &sb, &mut used, &mut fwd, &mut bwd)
    }
}

fn bind_atom(x: &Atom, y: &Atom, fwd: &mut [usize], bwd: &mut [usize], trail: &mut Vec<usize>) -> bool {
    if x.predicate != y.predicate || x.args.len() != y.args.len() {
        return false;
    }
    for (&u, &v) in x.args.iter().zip(&y.args) {
        match (fwd[u], bwd[v]) {
            (usize::MAX, usize::MAX) => {
                fwd[u] = v;
                bwd[v] = u;
                trail.push(u);
            }
            (fu, bv) if fu == v && bv == u => {}
            _ => return false,
        }
    }
    true
}

fn match_sides(sa: &[&Atom], sb: &[&Atom], used: &mut [bool], fwd: &mut [usize], bwd: &mut [usize]) -> bool {
    let Some((first, rest)) = sa.split_first() else {
        return true;
    };
    for j in 0..sb.len() {
        if used[j] {
            continue;
        }
        let mut trail = Vec::new();
        if bind_atom(first, sb[j], fwd, bwd, &mut trail) {
            used[j] = true;
            if match_sides(rest, sb, used, fwd, bwd) {
                return true;
            }
            used[j] = false;
        }
        for u in trail {
            bwd[fwd[u]] = usize::MAX;
            fwd[u] = usize::MAX;
        }
    }
    false
}
