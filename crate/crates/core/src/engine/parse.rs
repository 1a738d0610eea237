use std::fmt;

use crate::error::{Error, Result};

use super::program::{Atom, DatalogProgram, Rule};

fn err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn is_ident(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn parse_signature(line: usize, s: &str) -> Result<(String, usize)> {
    let (name, arity) = s
        .split_once('/')
        .ok_or_else(|| err(line, format!("expected NAME/arity, found `{s}`")))?;
    let name = name.trim();
    if !is_ident(name) {
        return Err(err(line, format!("bad predicate name `{name}`")));
    }
    let arity = arity
        .trim()
        .parse()
        .map_err(|_| err(line, format!("bad arity `{arity}`")))?;
    Ok((name.to_string(), arity))
}

/// `Name(a, b)` → ("Name", ["a", "b"]).
fn parse_atom(line: usize, s: &str) -> Result<(String, Vec<String>)> {
    let s = s.trim();
    let open = s.find('(').ok_or_else(|| err(line, format!("expected `(` in `{s}`")))?;
    if !s.ends_with(')') {
        return Err(err(line, format!("expected `)` at the end of `{s}`")));
    }
    let name = s[..open].trim();
    if !is_ident(name) {
        return Err(err(line, format!("bad predicate name `{name}`")));
    }
    let inner = &s[open + 1..s.len() - 1];
    let args: Vec<String> = inner.split(',').map(|a| a.trim().to_string()).collect();
    if let Some(a) = args.iter().find(|a| !is_ident(a)) {
        return Err(err(line, format!("bad variable `{a}`")));
    }
    Ok((name.to_string(), args))
}

fn split_atoms(s: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0usize;
    let mut start = 0;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth = depth.saturating_sub(1),
            ',' if depth == 0 => {
                out.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    if !s[start..].trim().is_empty() || !out.is_empty() {
        out.push(&s[start..]);
    }
    out
}

impl DatalogProgram {
    /// Parses the line-oriented program text; `%` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut p = DatalogProgram::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let body = raw.split('%').next().unwrap().trim();
            if body.is_empty() {
                continue;
            }
            if let Some(rest) = body.strip_prefix("#idb") {
                let (n, a) = parse_signature(line, rest)?;
                p.declare(&n, a, true).map_err(|e| err(line, e.to_string()))?;
            } else if let Some(rest) = body.strip_prefix("#edb") {
                let (n, a) = parse_signature(line, rest)?;
                p.declare(&n, a, false).map_err(|e| err(line, e.to_string()))?;
            } else if let Some(rest) = body.strip_prefix("#goal") {
                p.set_goal(rest.trim()).map_err(|e| err(line, e.to_string()))?;
            } else {
                let rule = p.parse_rule(line, body)?;
                p.add_rule(rule).map_err(|e| err(line, e.to_string()))?;
            }
        }
        Ok(p)
    }

    fn parse_rule(&self, line: usize, s: &str) -> Result<Rule> {
        let s = s
            .strip_suffix('.')
            .ok_or_else(|| err(line, "rule must end with `.`"))?;
        let (head, body) = match s.split_once(":-") {
            Some((h, b)) => (h, Some(b)),
            None => (s, None),
        };
        let mut vars: Vec<String> = Vec::new();
        let mut atom = |text: &str| -> Result<Atom> {
            let (name, args) = parse_atom(line, text)?;
            let predicate = self
                .predicate_id(&name)
                .map_err(|_| err(line, format!("undeclared predicate `{name}`")))?;
            let args = args
                .into_iter()
                .map(|a| match vars.iter().position(|v| *v == a) {
                    Some(i) => i,
                    None => {
                        vars.push(a);
                        vars.len() - 1
                    }
                })
                .collect();
            Ok(Atom { predicate, args })
        };
        let head = atom(head)?;
        let body = match body {
            None => Vec::new(),
            Some(b) => split_atoms(b)
                .into_iter()
                .map(&mut atom)
                .collect::<Result<_>>()?,
        };
        Ok(Rule { head, body, vars })
    }

    pub fn parse_rule_str(&self, s: &str) -> Result<Rule> {
        self.parse_rule(1, s.trim())
    }

    fn write_atom(&self, f: &mut fmt::Formatter<'_>, rule: &Rule, a: &Atom) -> fmt::Result {
        let args: Vec<&str> = a.args.iter().map(|&v| rule.vars[v].as_str()).collect();
        write!(f, "{}({})", self.predicate(a.predicate).name, args.join(","))
    }

    pub fn rule_to_string(&self, rule: &Rule) -> String {
        struct R<'a>(&'a DatalogProgram, &'a Rule);
        impl fmt::Display for R<'_> {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                self.0.write_rule(f, self.1)
            }
        }
        R(self, rule).to_string()
    }

    fn write_rule(&self, f: &mut fmt::Formatter<'_>, rule: &Rule) -> fmt::Result {
        self.write_atom(f, rule, &rule.head)?;
        if !rule.body.is_empty() {
            write!(f, " :- ")?;
            for (i, a) in rule.body.iter().enumerate() {
                if i > 0 {
                    write!(f, ", ")?;
                }
                self.write_atom(f, rule, a)?;
            }
        }
        write!(f, ".")
    }
}

impl fmt::Display for DatalogProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in self.predicates() {
            let kind = if p.idb { "idb" } else { "edb" };
            writeln!(f, "#{kind} {}/{}", p.name, p.arity)?;
        }
        for &g in self.goals() {
            writeln!(f, "#goal {}", self.predicate(g).name)?;
        }
        for r in self.rules() {
            self.write_rule(f, r)?;
            writeln!(f)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::program::Fragment;

    const TC: &str = "#edb E/2\n#idb T/2\nT(x,y) :- E(x,y).\nT(x,y) :- T(x,z), E(z,y).\n";

    #[test]
    fn roundtrip() {
        let p = DatalogProgram::parse(TC).unwrap();
        assert_eq!(p.to_string(), TC);
        assert_eq!(DatalogProgram::parse(&p.to_string()).unwrap(), p);
        let spaced = "  #edb   E/2 \n#idb T/2\n\n T(x, y) :-  E(x,y) .\nT(x,y):-T(x,z),E(z,y).";
        let squash = |s: &str| s.split_whitespace().collect::<String>();
        let q = DatalogProgram::parse(&spaced.replace(" .", ".")).unwrap();
        assert_eq!(squash(&q.to_string()), squash(TC));
    }

    #[test]
    fn errors() {
        assert!(matches!(DatalogProgram::parse("T(x) :- E(x)."), Err(Error::Parse { line: 1, .. })));
        assert!(DatalogProgram::parse("#edb E/2\n#idb T/1\nT(x) :- E(x).").is_err());
        assert!(DatalogProgram::parse("#edb E/2\nE(x,y).").is_err());
        assert!(DatalogProgram::parse("#idb T/1\nT(x)").is_err());
        assert!(DatalogProgram::parse("#goal X").is_err());
        assert!(DatalogProgram::parse("#idb T/x").is_err());
    }

    #[test]
    fn classification_examples() {
        let base = "#edb E/2\n#idb R/2\n#idb S/2\n";
        let lin = DatalogProgram::parse(&format!("{base}R(x,y) :- S(x,z), E(z,y).")).unwrap();
        assert_eq!(lin.classify(), Fragment::Linear);
        let sym = DatalogProgram::parse(&format!(
            "{base}R(x,y) :- S(x,z), E(z,y).\nS(x,z) :- R(x,y), E(z,y)."
        ))
        .unwrap();
        assert_eq!(sym.classify(), Fragment::Symmetric);
        let renamed = DatalogProgram::parse(&format!(
            "{base}R(x,y) :- S(x,z), E(z,y).\nS(a,b) :- E(b,c), R(a,c)."
        ))
        .unwrap();
        assert_eq!(renamed.classify(), Fragment::Symmetric);
        let gen = DatalogProgram::parse(&format!("{base}R(x,y) :- S(x,z), R(z,y).")).unwrap();
        assert_eq!(gen.classify(), Fragment::General);
        let edb_only = DatalogProgram::parse(&format!("{base}R(x,y) :- E(x,y).\nS(x,x) :- E(x,y).")).unwrap();
        assert_eq!(edb_only.classify(), Fragment::Symmetric);
    }
}
