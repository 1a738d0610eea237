use std::collections::{BTreeSet, HashMap};

use crate::algebra::{unpack_relation, Relation};
use crate::error::{Error, Result};
use crate::instances::{CspInstance, Var};

use super::derivation::{Derivation, SideAtom, Step};
use super::fact::Fact;

fn step_width(prev: Option<&Fact>, head: &Fact, side: &[SideAtom]) -> usize {
    let mut vars: BTreeSet<Var> = head.vars().iter().copied().collect();
    if let Some(p) = prev {
        vars.extend(p.vars());
    }
    for a in side {
        vars.extend(&a.scope);
    }
    vars.len()
}

/// `R(scope) ← A(v), R(scope)` after the seed `A(v) ←`, for constraint
/// number `idx` of `i`.
pub fn constraint_derivation(i: &CspInstance, idx: usize) -> Result<Derivation> {
    let c = i
        .constraints()
        .get(idx)
        .ok_or(Error::IndexOutOfRange {
            index: idx,
            len: i.constraints().len(),
        })?;
    let rel = i.relation_of(c)?;
    let mut d = Derivation::seed(i.domain_size(), c.scope[0]);
    d.push(Fact::new(&c.scope, rel)?, vec![SideAtom::new(c.relation.clone(), c.scope.clone())]);
    Ok(d)
}

/// Seed on `window[0]`, then one step deriving the projection onto
/// `target` of the solutions of the subinstance induced by `window`.
pub fn window_derivation(i: &CspInstance, window: &[Var], target: &[Var]) -> Result<Derivation> {
    let inside: BTreeSet<(String, Vec<Var>)> = i
        .constraints()
        .iter()
        .filter(|c| c.scope.iter().all(|v| window.contains(v)))
        .map(|c| (c.relation.clone(), c.scope.clone()))
        .collect();
    let rels: Vec<(&[Var], &Relation)> = inside
        .iter()
        .map(|(name, scope)| Ok((scope.as_slice(), i.structure().relation(name)?)))
        .collect::<Result<_>>()?;
    let all = Fact::conjunction(i.domain_size(), window, &rels)?;
    let head = all.project(target)?;
    let first = *window
        .first()
        .ok_or_else(|| Error::Precondition("empty window".into()))?;
    let mut d = Derivation::seed(i.domain_size(), first);
    d.push(
        head,
        inside
            .into_iter()
            .map(|(name, scope)| SideAtom::new(name, scope))
            .collect(),
    );
    Ok(d)
}

/// From a derivation `U₁ … U_m` of `S(σ)` builds
/// `R(ρ), R∧U₁, …, R∧U_m`, failing if a step needs more than `k` variables.
pub fn conjoin_derivation(d: &Derivation, r: &Relation, rho: &[Var], k: usize) -> Result<Derivation> {
    let base = Fact::new(rho, r)?;
    let mut out = Derivation {
        premise: Some(match &d.premise {
            Some(p) => base.conjoin(p)?,
            None => base.clone(),
        }),
        steps: Vec::with_capacity(d.steps.len()),
    };
    let mut prev = out.premise.clone().unwrap();
    for step in &d.steps {
        let head = base.conjoin(&step.head)?;
        let w = step_width(Some(&prev), &head, &step.side);
        if w > k {
            return Err(Error::WidthTooSmall {
                needed: w,
                available: k,
            });
        }
        out.steps.push(Step {
            head: head.clone(),
            side: step.side.clone(),
        });
        prev = head;
    }
    Ok(out)
}

/// Inputs to [`stack_derivation`].
pub struct StackSpec<'a> {
    /// Instance the outer derivation lives in.
    pub outer_instance: &'a CspInstance,
    /// Inner derivation over the base instance for every constraint of
    /// the outer instance, keyed by relation name and scope.
    pub inner: &'a HashMap<SideAtom, Derivation>,
    pub power_k: usize,
    /// Outer variable → the `power_k` base variables it stands for.
    pub var_map: &'a [Vec<Var>],
    pub base_domain: usize,
    /// Largest rule allowed in the output.
    pub width_cap: usize,
}

impl StackSpec<'_> {
    pub fn unpack_fact(&self, f: &Fact) -> Result<Fact> {
        let tuple: Vec<Var> = f
            .vars()
            .iter()
            .flat_map(|&w| self.var_map[w].iter().copied())
            .collect();
        let rel = unpack_relation(f.relation(), self.base_domain, self.power_k)?;
        Fact::new(&tuple, &rel)
    }

    fn unpack_side(&self, a: &SideAtom) -> Result<Fact> {
        let rel = self.outer_instance.structure().relation(&a.relation)?;
        self.unpack_fact(&Fact::new(&a.scope, rel)?)
    }
}

/// Replaces every outer step `N ← P, T₁ … T_q` by: conjoin each inner
/// derivation of `T̄ⱼ` onto `P`, move from `P∧T̄` to `N∧T̄`, then peel the
/// `T̄ⱼ` off again in reverse through mirror steps.
pub fn stack_derivation(outer: &Derivation, spec: &StackSpec<'_>) -> Result<Derivation> {
    for (w, vs) in spec.var_map.iter().enumerate() {
        if vs.len() != spec.power_k {
            return Err(Error::Precondition(format!(
                "outer variable {w} maps to {} base variables, expected {}",
                vs.len(),
                spec.power_k
            )));
        }
    }
    let premise = outer.premise.as_ref().map(|p| spec.unpack_fact(p)).transpose()?;
    let mut out = Derivation {
        premise: premise.clone(),
        steps: Vec::new(),
    };
    let mut cur = premise;
    let cap = spec.width_cap;
    for step in &outer.steps {
        let n = spec.unpack_fact(&step.head)?;
        let p = match cur.take() {
            Some(p) => p,
            None => {
                let seed = Derivation::seed(spec.base_domain, n.vars()[0]);
                let f = seed.steps[0].head.clone();
                out.append(seed);
                f
            }
        };
        let mut inners = Vec::with_capacity(step.side.len());
        for a in &step.side {
            let d = spec
                .inner
                .get(a)
                .ok_or_else(|| Error::MissingInnerDerivation(format!("{}{:?}", a.relation, a.scope)))?;
            if d.premise.is_some() {
                return Err(Error::Precondition("inner derivations must start from a seed".into()));
            }
            let want = spec.unpack_side(a)?;
            if d.final_fact() != Some(&want) {
                return Err(Error::Inconsistent(format!(
                    "inner derivation for {}{:?} does not end at {want}",
                    a.relation, a.scope
                )));
            }
            inners.push((d, want));
        }
        let mut acc = p;
        for (d, _) in &inners {
            let c = conjoin_derivation(d, acc.relation(), acc.vars(), cap)?;
            acc = c.final_fact().unwrap().clone();
            out.append(c);
        }
        let mut prefix = vec![n.clone()];
        for (_, t) in &inners {
            let next = prefix.last().unwrap().conjoin(t)?;
            prefix.push(next);
        }
        let target = prefix.last().unwrap().clone();
        let w = step_width(Some(&acc), &target, &[]);
        if w > cap {
            return Err(Error::WidthTooSmall {
                needed: w,
                available: cap,
            });
        }
        if target != acc {
            out.push(target, Vec::new());
        }
        for (j, (d, _)) in inners.iter().enumerate().rev() {
            let r = &prefix[j];
            let c = conjoin_derivation(d, r.relation(), r.vars(), cap)?;
            out.append(c.reversed());
        }
        cur = Some(n);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::ak2;
    use crate::canon::config::CanonConfig;
    use crate::canon::derivation::replay;

    fn neq_path() -> CspInstance {
        let mut i = CspInstance::with_variables(ak2(), 3);
        i.add_constraint(vec![0, 1], "NEQ");
        i.add_constraint(vec![1, 2], "NEQ");
        i.add_constraint(vec![0], "C0");
        i
    }

    #[test]
    fn conjoin_length_and_endpoint() {
        let i = neq_path();
        let d = constraint_derivation(&i, 0).unwrap();
        let c0 = i.structure().relation("C0").unwrap();
        let c = conjoin_derivation(&d, c0, &[2], 3).unwrap();
        assert_eq!(c.facts().len(), d.facts().len() + 1);
        let want = Fact::new(&[2], c0).unwrap().conjoin(d.final_fact().unwrap()).unwrap();
        assert_eq!(c.final_fact(), Some(&want));
        replay(&i, &c, &CanonConfig::all(3)).unwrap();
        assert!(matches!(
            conjoin_derivation(&d, c0, &[2], 2),
            Err(Error::WidthTooSmall { needed: 3, .. })
        ));
    }

    #[test]
    fn window_step_replays() {
        let i = neq_path();
        let d = window_derivation(&i, &[0, 1, 2], &[2]).unwrap();
        assert_eq!(d.final_fact().unwrap().tuples().collect::<Vec<_>>(), vec![vec![0]]);
        replay(&i, &d, &CanonConfig::all(3)).unwrap();
    }
}
