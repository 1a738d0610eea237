use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::algebra::{verify_hm_chain, HmChain, RelationalStructure};
use crate::canon::{
    constraint_derivation, derivation_to_trace, replay, stack_derivation, window_derivation, CanonConfig, Derivation,
    SideAtom, StackSpec,
};
use crate::error::{Error, Result};
use crate::instances::{PathInstance, SatVerdict, Solution, Var};

use super::lambda::lambda_derivation;
use super::reduce::{build_i_lambda, shrink_instance, LambdaReduction, Shrunk};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathSolverConfig {
    /// Length up to which `I_λ` is decided directly; `2|A|² + 2` if unset.
    pub window: Option<usize>,
    /// Build the refutation as a derivation of the canonical program.
    pub trace: bool,
    /// Replay every refutation before returning it.
    pub verify_trace: bool,
    /// Check the chain against the structure first.
    pub check_chain: bool,
}

impl Default for PathSolverConfig {
    fn default() -> Self {
        PathSolverConfig {
            window: None,
            trace: true,
            verify_trace: true,
            check_chain: true,
        }
    }
}

impl PathSolverConfig {
    pub fn window_for(&self, domain: usize) -> usize {
        self.window.unwrap_or(2 * domain * domain + 2)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveStats {
    /// Instances visited, outermost first, with their lengths and `N`.
    pub levels: Vec<LevelStats>,
    /// Times a long, fully subdirect `I_λ` was decided directly.
    pub fallbacks: usize,
    pub trace_steps: usize,
    /// Largest rule in the refutation.
    pub trace_width: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelStats {
    pub length: usize,
    pub max_unary: usize,
    pub lambda_length: Option<usize>,
    pub how: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathVerdict {
    pub verdict: SatVerdict,
    /// Refutation over [`PathInstance::to_csp`], ending at an empty relation.
    pub derivation: Option<Derivation>,
    pub stats: SolveStats,
}

impl PathVerdict {
    /// The refutation as trace text.
    pub fn trace(&self, p: &PathInstance) -> Result<Option<String>> {
        self.derivation
            .as_ref()
            .map(|d| derivation_to_trace(&p.to_csp(), d))
            .transpose()
    }
}

enum Outcome {
    Sat,
    Unsat(Option<Derivation>),
}

struct Solver<'a> {
    window: usize,
    cfg: &'a PathSolverConfig,
    stats: SolveStats,
}

/// First index with an empty unary constraint, or with no tuple of
/// `B_{i,i+1}` inside `Bᵢ × B_{i+1}`, as a window on `to_csp` variables.
fn local_contradiction(p: &PathInstance) -> Option<Vec<Var>> {
    for i in 1..=p.len() {
        if p.unary(i).is_empty() {
            return Some(vec![i - 1]);
        }
        if i < p.len() {
            let e = p.binary(i).restrict_binary(p.unary(i), p.unary(i + 1)).expect("binary relation");
            if e.is_empty() {
                return Some(vec![i - 1, i]);
            }
        }
    }
    None
}

fn refute_window(p: &PathInstance, window: &[Var]) -> Result<Derivation> {
    window_derivation(&p.to_csp(), window, &window[..1])
}

/// Rewrites a derivation over `outer` into one over `base`, given a
/// derivation over `base` of every constraint of `outer`.
fn lift(
    outer: &PathInstance,
    d: &Derivation,
    base: &PathInstance,
    vars: &[usize],
    inner: impl Fn(&SideAtom) -> Result<Derivation>,
) -> Result<Derivation> {
    let outer_csp = outer.to_csp();
    let mut map = HashMap::new();
    for c in outer_csp.constraints() {
        let a = SideAtom::new(c.relation.clone(), c.scope.clone());
        let di = inner(&a)?;
        map.insert(a, di);
    }
    let var_map: Vec<Vec<Var>> = vars.iter().map(|&v| vec![v - 1]).collect();
    stack_derivation(
        d,
        &StackSpec {
            outer_instance: &outer_csp,
            inner: &map,
            power_k: 1,
            var_map: &var_map,
            base_domain: base.domain(),
            width_cap: usize::MAX,
        },
    )
}

/// Variable of a unary side atom, or left end of a binary one (0-based).
fn left_var(a: &SideAtom) -> usize {
    a.scope[0]
}

fn lift_from_lambda(red: &LambdaReduction, d: &Derivation, base: &PathInstance) -> Result<Derivation> {
    let base_csp = base.to_csp();
    lift(&red.instance, d, base, &red.vars, |a| {
        let p = left_var(a);
        let v = red.vars[p];
        if a.scope.len() == 1 {
            constraint_derivation(&base_csp, 2 * (v - 1))
        } else if red.is_gap(p + 1) {
            lambda_derivation(base, v, red.vars[p + 1])
        } else {
            constraint_derivation(&base_csp, 2 * (v - 1) + 1)
        }
    })
}

fn lift_from_shrunk(sh: &Shrunk, d: &Derivation, base: &PathInstance) -> Result<Derivation> {
    let base_csp = base.to_csp();
    let range = |(lo, hi): (usize, usize)| -> Vec<Var> { (lo - 1..hi).collect() };
    lift(&sh.instance, d, base, &sh.indices, |a| {
        let j = left_var(a);
        if a.scope.len() == 1 {
            window_derivation(&base_csp, &range(sh.unary_windows[j]), &[sh.indices[j] - 1])
        } else {
            let (lo, hi) = sh.binary_windows[j];
            window_derivation(&base_csp, &range((lo, hi)), &[lo - 1, hi - 1])
        }
    })
}

impl Solver<'_> {
    fn direct(&self, q: &PathInstance) -> Result<Outcome> {
        if q.is_satisfiable() {
            return Ok(Outcome::Sat);
        }
        let all: Vec<Var> = (0..q.len()).collect();
        Ok(Outcome::Unsat(self.traced(|| refute_window(q, &all))?))
    }

    fn traced(&self, f: impl FnOnce() -> Result<Derivation>) -> Result<Option<Derivation>> {
        if self.cfg.trace {
            f().map(Some)
        } else {
            Ok(None)
        }
    }

    fn level(&mut self, p: &PathInstance) -> Result<Outcome> {
        let mut stats = LevelStats {
            length: p.len(),
            max_unary: p.max_unary(),
            lambda_length: None,
            how: String::new(),
        };
        let slot = self.stats.levels.len();
        if let Some(w) = local_contradiction(p) {
            stats.how = "local contradiction".into();
            self.stats.levels.push(stats);
            return Ok(Outcome::Unsat(self.traced(|| refute_window(p, &w))?));
        }
        if p.max_unary() <= 1 {
            stats.how = "singletons".into();
            self.stats.levels.push(stats);
            return Ok(Outcome::Sat);
        }
        let red = build_i_lambda(p)?;
        let q = &red.instance;
        stats.lambda_length = Some(q.len());
        self.stats.levels.push(stats);
        let inner = if q.len() <= self.window {
            self.stats.levels[slot].how = "direct".into();
            self.direct(q)?
        } else {
            match shrink_instance(q, self.window) {
                Ok(sh) => {
                    self.stats.levels[slot].how = "shrink".into();
                    match self.level(&sh.instance)? {
                        Outcome::Sat => Outcome::Sat,
                        Outcome::Unsat(d) => Outcome::Unsat(d.map(|d| lift_from_shrunk(&sh, &d, q)).transpose()?),
                    }
                }
                Err(Error::Precondition(why)) => {
                    log::warn!("deciding I_λ of length {} directly: {why}", q.len());
                    self.stats.fallbacks += 1;
                    self.stats.levels[slot].how = "fallback".into();
                    self.direct(q)?
                }
                Err(e) => return Err(e),
            }
        };
        Ok(match inner {
            Outcome::Sat => Outcome::Sat,
            Outcome::Unsat(d) => Outcome::Unsat(d.map(|d| lift_from_lambda(&red, &d, p)).transpose()?),
        })
    }
}

/// Decides a path instance by the reduction `I → I_λ → K → …` on the size
/// of the unary constraints, producing a refutation in the canonical
/// program on UNSAT.
pub fn solve_path(s: &RelationalStructure, hm: &HmChain, p: &PathInstance, cfg: &PathSolverConfig) -> Result<PathVerdict> {
    if s.domain_size() != p.domain() {
        return Err(Error::DomainMismatch {
            expected: s.domain_size(),
            found: p.domain(),
        });
    }
    if cfg.check_chain {
        verify_hm_chain(hm, s).map_err(|v| Error::InvalidHmChain(v.to_string()))?;
    }
    let mut solver = Solver {
        window: cfg.window_for(p.domain()).max(1),
        cfg,
        stats: SolveStats::default(),
    };
    let outcome = solver.level(p)?;
    let mut stats = solver.stats;
    let direct = p.first_solution();
    match outcome {
        Outcome::Sat => {
            let w = direct.ok_or_else(|| Error::Inconsistent("reduction found no contradiction on an unsatisfiable instance".into()))?;
            Ok(PathVerdict {
                verdict: SatVerdict::sat(Solution(w)),
                derivation: None,
                stats,
            })
        }
        Outcome::Unsat(d) => {
            if direct.is_some() {
                return Err(Error::Inconsistent("reduction refuted a satisfiable instance".into()));
            }
            if let Some(d) = &d {
                stats.trace_steps = d.steps.len();
                if cfg.verify_trace {
                    let rep = replay(&p.to_csp(), d, &CanonConfig::all(usize::MAX))?;
                    if !rep.final_fact.is_empty() {
                        return Err(Error::Inconsistent("refutation does not end at an empty relation".into()));
                    }
                    stats.trace_width = rep.width;
                }
            }
            let why = format!(
                "refuted after {} level(s){}",
                stats.levels.len(),
                if stats.fallbacks > 0 { " with direct fallback" } else { "" }
            );
            Ok(PathVerdict {
                verdict: SatVerdict::unsat(Some(why)),
                derivation: d,
                stats,
            })
        }
    }
}

/// Checks a refutation over a path instance without the solver.
pub fn check_refutation(p: &PathInstance, d: &Derivation) -> Result<usize> {
    let rep = replay(&p.to_csp(), d, &CanonConfig::all(usize::MAX))?;
    if rep.final_fact.is_empty() {
        Ok(rep.width)
    } else {
        Err(Error::Inconsistent("refutation does not end at an empty relation".into()))
    }
}
