use serde::{Deserialize, Serialize};

use crate::algebra::{checked_pow, decode, encode, verify_hm_chain, Elem, HmChain, Relation, RelationalStructure};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::instances::{
    brute_force_solutions, induced_subinstance, CspInstance, OracleConfig, PathDecomposition, PathInstance,
    SatVerdict, Solution, Var,
};
use crate::pathsolver::{solve_path, PathSolverConfig, SolveStats};

use super::bags::{normalize_bags, BagTuple};

/// The `k`-th bubble power of `base`, realized only through the relations
/// a reduction needs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BubbleStructure {
    pub base: RelationalStructure,
    pub k: usize,
}

impl BubbleStructure {
    pub fn new(base: RelationalStructure, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::Precondition("bubble powers need k ≥ 1".into()));
        }
        checked_pow(base.domain_size(), k).ok_or(Error::RelationTooLarge {
            domain: base.domain_size(),
            arity: k,
        })?;
        Ok(BubbleStructure { base, k })
    }

    pub fn domain_size(&self) -> usize {
        self.base.domain_size().pow(self.k as u32)
    }

    /// `E_I = {(a,b) : aᵢ = b_j for all (i,j) ∈ I}`, coordinates 0-based.
    pub fn e_relation(&self, pairs: &[(usize, usize)]) -> Result<Relation> {
        let (d, k) = (self.base.domain_size(), self.k);
        if let Some(&(i, j)) = pairs.iter().find(|&&(i, j)| i >= k || j >= k) {
            return Err(Error::IndexOutOfRange {
                index: i.max(j),
                len: k,
            });
        }
        Relation::from_predicate(self.domain_size(), 2, |t| {
            let (a, b) = (decode(d, k, t[0]), decode(d, k, t[1]));
            pairs.iter().all(|&(i, j)| a[i] == b[j])
        })
    }

    /// `{ρ∘χ : ρ solves the subinstance of `j` induced by the bag}`.
    pub fn bag_relation(&self, j: &CspInstance, chi: &BagTuple, oracle: &OracleConfig) -> Result<Relation> {
        let members = chi.members();
        let (sub, old) = induced_subinstance(j, &members)?;
        let d = self.base.domain_size();
        let mut out = Relation::empty(self.domain_size(), 1)?;
        for s in brute_force_solutions(&sub, oracle)? {
            let value = |v: Var| s.values()[old.binary_search(&v).unwrap()];
            let coords: Vec<Elem> = chi.chi.iter().map(|&v| value(v)).collect();
            out.insert(&[encode(d, &coords)])?;
        }
        Ok(out)
    }
}

/// The path instance over `A^k` built from a bounded-pathwidth instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BubbleReduction {
    pub bubble: BubbleStructure,
    pub instance: PathInstance,
    pub bag_tuples: Vec<BagTuple>,
    pub decomposition: PathDecomposition,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BubbleConfig {
    /// Linear order on the variables, smallest first; interning order if unset.
    pub order: Option<Vec<Var>>,
    pub oracle: OracleConfig,
    pub path: PathSolverConfig,
    /// Check the chain, acting coordinatewise, on every relation of the
    /// path instance before solving.
    pub check_power_chain: bool,
}

impl Default for BubbleConfig {
    fn default() -> Self {
        BubbleConfig {
            order: None,
            oracle: OracleConfig {
                exec: Exec::Sequential,
                ..OracleConfig::default()
            },
            path: PathSolverConfig {
                trace: false,
                verify_trace: false,
                check_chain: false,
                ..PathSolverConfig::default()
            },
            check_power_chain: false,
        }
    }
}

fn ranks(j: &CspInstance, order: Option<&[Var]>) -> Result<Vec<usize>> {
    let n = j.num_vars();
    let Some(order) = order else {
        return Ok((0..n).collect());
    };
    let mut rank = vec![usize::MAX; n];
    for (pos, &v) in order.iter().enumerate() {
        if v >= n {
            return Err(Error::VariableOutOfRange(v));
        }
        rank[v] = pos;
    }
    if order.len() != n || rank.contains(&usize::MAX) {
        return Err(Error::Precondition("the order must list every variable exactly once".into()));
    }
    Ok(rank)
}

/// Lists the solutions of every bag as a unary relation on `A^k` and joins
/// consecutive bags by the `E_I` equating their shared variables.
pub fn pathwidth_to_path(j: &CspInstance, d: &PathDecomposition, cfg: &BubbleConfig) -> Result<BubbleReduction> {
    j.ensure_valid()?;
    let issues = d.issues(j);
    if !issues.is_empty() {
        let text: Vec<String> = issues.iter().map(ToString::to_string).collect();
        return Err(Error::InvalidDecomposition(text.join("; ")));
    }
    let d = normalize_bags(d)?;
    if d.bags.is_empty() {
        return Err(Error::InvalidDecomposition("no bags".into()));
    }
    let k = d.width + 1;
    let bubble = BubbleStructure::new(j.structure().clone(), k)?;
    let rank = ranks(j, cfg.order.as_deref())?;
    let bag_tuples: Vec<BagTuple> = d.bags.iter().map(|b| BagTuple::new(b, k, &rank)).collect::<Result<_>>()?;
    let unary = bag_tuples
        .iter()
        .map(|chi| bubble.bag_relation(j, chi, &cfg.oracle))
        .collect::<Result<_>>()?;
    let binary = bag_tuples
        .windows(2)
        .map(|w| {
            let pairs: Vec<(usize, usize)> = (0..k)
                .flat_map(|a| (0..k).map(move |b| (a, b)))
                .filter(|&(a, b)| w[0].chi[a] == w[1].chi[b])
                .collect();
            bubble.e_relation(&pairs)
        })
        .collect::<Result<_>>()?;
    let instance = PathInstance::new(bubble.domain_size(), unary, binary)?;
    Ok(BubbleReduction {
        bubble,
        instance,
        bag_tuples,
        decomposition: d,
    })
}

/// `t(v)` is coordinate `p` of `s(χᵢ)` for some `χᵢ(p) = v`; every such
/// reading must agree. Variables in no bag take the value 0.
pub fn lift_solution(s: &[Elem], bag_tuples: &[BagTuple], j: &CspInstance) -> Result<Solution> {
    if s.len() != bag_tuples.len() {
        return Err(Error::Precondition(format!(
            "{} values for {} bags",
            s.len(),
            bag_tuples.len()
        )));
    }
    let d = j.domain_size();
    let mut t: Vec<Option<Elem>> = vec![None; j.num_vars()];
    for (value, chi) in s.iter().zip(bag_tuples) {
        let coords = decode(d, chi.chi.len(), *value);
        for (&v, &a) in chi.chi.iter().zip(&coords) {
            match t[v] {
                Some(b) if b != a => {
                    return Err(Error::Inconsistent(format!("variable {v} read as both {b} and {a}")));
                }
                _ => t[v] = Some(a),
            }
        }
    }
    Ok(Solution(t.into_iter().map(|x| x.unwrap_or(0)).collect()))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BubbleVerdict {
    pub verdict: SatVerdict,
    pub path_length: usize,
    pub k: usize,
    pub stats: SolveStats,
}

/// Reduces to a path instance over `A^k`, decides it with the path solver
/// under the chain acting coordinatewise, and lifts the witness back.
pub fn decide_csp(
    s: &RelationalStructure,
    hm: &HmChain,
    j: &CspInstance,
    d: &PathDecomposition,
    cfg: &BubbleConfig,
) -> Result<BubbleVerdict> {
    verify_hm_chain(hm, s).map_err(|v| Error::InvalidHmChain(v.to_string()))?;
    if j.structure() != s {
        return Err(Error::Precondition("instance is not over the given structure".into()));
    }
    if d.bags.is_empty() && j.constraints().is_empty() {
        return Ok(BubbleVerdict {
            verdict: SatVerdict::sat(Solution(vec![0; j.num_vars()])),
            path_length: 0,
            k: d.width + 1,
            stats: SolveStats::default(),
        });
    }
    let red = pathwidth_to_path(j, d, cfg)?;
    let power = hm.power(red.bubble.k)?;
    let bs = red.instance.structure();
    let mut path = cfg.path;
    path.check_chain = cfg.check_power_chain;
    let v = solve_path(&bs, &power, &red.instance, &path)?;
    let verdict = match &v.verdict.witness {
        Some(w) => {
            let t = lift_solution(w.values(), &red.bag_tuples, j)?;
            if !j.is_solution(t.values()) {
                return Err(Error::Inconsistent("lifted assignment violates the instance".into()));
            }
            SatVerdict::sat(t)
        }
        None => v.verdict.clone(),
    };
    Ok(BubbleVerdict {
        verdict,
        path_length: red.instance.len(),
        k: red.bubble.k,
        stats: v.stats,
    })
}

/// Widths for deciding the base structure from a width `s` for path
/// instances of its bubble power.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WidthBounds {
    /// `k(s + 2)`.
    pub stacked: u64,
    /// `(k + 2)s`.
    pub scaled: u64,
}

pub fn width_bound(k: u64, s: u64) -> Option<u64> {
    s.checked_add(2)?.checked_mul(k)
}

pub fn width_bounds(k: u64, s: u64) -> Option<WidthBounds> {
    Some(WidthBounds {
        stacked: width_bound(k, s)?,
        scaled: k.checked_add(2)?.checked_mul(s)?,
    })
}
