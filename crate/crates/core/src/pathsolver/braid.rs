use serde::{Deserialize, Serialize};

use crate::algebra::{Elem, HmChain};
use crate::error::{budget_error, Error, Result};
use crate::instances::{brute_force_solutions, OracleConfig, PathInstance, Solution};

/// Solutions `s₀ … s_n` and crossing indices `i₁ < … < i_n` (1-based) with
/// `s_k(i_k) = s_{k+1}(i_k)` and `s_{k-1}(i_{k+1}) = s_k(i_{k+1})` for
/// `k = 1 … n-1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Braid {
    pub solutions: Vec<Vec<Elem>>,
    pub indices: Vec<usize>,
}

/// Binary constraint `index` (1-based, `B_{index,index+1}`) and a tuple of it.
pub type MarkedEdge = (usize, (Elem, Elem));

impl Braid {
    pub fn n(&self) -> usize {
        self.indices.len()
    }

    fn at(&self, k: usize, i: usize) -> Elem {
        self.solutions[k][i - 1]
    }

    /// Shape, solution and crossing checks against `p`.
    pub fn check(&self, p: &PathInstance) -> Result<()> {
        let n = self.n();
        let bad = |m: String| Err(Error::Inconsistent(m));
        if n == 0 || self.solutions.len() != n + 1 {
            return bad(format!("{} solutions for {n} indices", self.solutions.len()));
        }
        if self.indices.windows(2).any(|w| w[0] >= w[1]) || self.indices[0] == 0 || self.indices[n - 1] > p.len() {
            return bad(format!("indices {:?} are not increasing within [1,{}]", self.indices, p.len()));
        }
        if let Some(k) = self.solutions.iter().position(|s| !p.is_solution(s)) {
            return bad(format!("s{k} is not a solution"));
        }
        for k in 1..n {
            let (ik, ik1) = (self.indices[k - 1], self.indices[k]);
            if self.at(k, ik) != self.at(k + 1, ik) || self.at(k - 1, ik1) != self.at(k, ik1) {
                return bad(format!("crossing equalities fail at k={k}"));
            }
        }
        Ok(())
    }

    /// Between crossings `k` and `k+1` solution `s_k` uses one of `edges`,
    /// for every `k = 1 … n-1`.
    pub fn passes_edges(&self, edges: &[MarkedEdge]) -> bool {
        (1..self.n()).all(|k| self.passes_between(k, edges))
    }

    fn passes_between(&self, k: usize, edges: &[MarkedEdge]) -> bool {
        let (lo, hi) = (self.indices[k - 1], self.indices[k]);
        edges
            .iter()
            .any(|&(j, (a, b))| lo <= j && j < hi && self.at(k, j) == a && self.at(k, j + 1) == b)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BraidSearch {
    pub oracle: OracleConfig,
    /// Largest number of partial braids visited.
    pub budget: u64,
}

impl Default for BraidSearch {
    fn default() -> Self {
        BraidSearch {
            oracle: OracleConfig::default(),
            budget: 1 << 24,
        }
    }
}

fn next_combination(c: &mut [usize], top: usize) -> bool {
    let n = c.len();
    for pos in (0..n).rev() {
        if c[pos] < top - (n - 1 - pos) {
            c[pos] += 1;
            for q in pos + 1..n {
                c[q] = c[q - 1] + 1;
            }
            return true;
        }
    }
    false
}

struct Dfs<'a> {
    sols: &'a [Solution],
    indices: &'a [usize],
    edges: Option<&'a [MarkedEdge]>,
    chosen: Vec<usize>,
    visited: u64,
    budget: u64,
}

impl Dfs<'_> {
    fn val(&self, k: usize, i: usize) -> Elem {
        self.sols[self.chosen[k]].values()[i - 1]
    }

    fn fits(&self, k: usize) -> bool {
        let n = self.indices.len();
        let ix = |m: usize| self.indices[m - 1];
        if k >= 2 && self.val(k - 1, ix(k - 1)) != self.val(k, ix(k - 1)) {
            return false;
        }
        if (1..n).contains(&k) && self.val(k - 1, ix(k + 1)) != self.val(k, ix(k + 1)) {
            return false;
        }
        if let (Some(edges), true) = (self.edges, (1..n).contains(&k)) {
            let (lo, hi) = (ix(k), ix(k + 1));
            let s = self.sols[self.chosen[k]].values();
            return edges
                .iter()
                .any(|&(j, (a, b))| lo <= j && j < hi && s[j - 1] == a && s[j] == b);
        }
        true
    }

    fn run(&mut self) -> Result<bool> {
        let k = self.chosen.len();
        if k == self.indices.len() + 1 {
            return Ok(true);
        }
        for s in 0..self.sols.len() {
            self.visited += 1;
            if self.visited > self.budget {
                return Err(budget_error("braid search", "partial braids".to_string(), self.budget));
            }
            self.chosen.push(s);
            if self.fits(k) && self.run()? {
                return Ok(true);
            }
            self.chosen.pop();
        }
        Ok(false)
    }
}

/// The lexicographically first `n`-braid over (index vector, solution
/// vector), solutions ordered lexicographically; with `required_edges`,
/// every `s_k` for `k = 1 … n-1` must use a marked edge between its two
/// crossings.
pub fn find_braid(
    p: &PathInstance,
    n: usize,
    required_edges: Option<&[MarkedEdge]>,
    cfg: &BraidSearch,
) -> Result<Option<Braid>> {
    if n == 0 {
        return Err(Error::Precondition("braids need n ≥ 1".into()));
    }
    let l = p.len();
    if n > l {
        return Ok(None);
    }
    let sols = brute_force_solutions(&p.to_csp(), &cfg.oracle)?;
    if sols.is_empty() {
        return Ok(None);
    }
    let mut indices: Vec<usize> = (1..=n).collect();
    let mut visited = 0;
    loop {
        let mut dfs = Dfs {
            sols: &sols,
            indices: &indices,
            edges: required_edges,
            chosen: Vec::with_capacity(n + 1),
            visited,
            budget: cfg.budget,
        };
        if dfs.run()? {
            return Ok(Some(Braid {
                solutions: dfs.chosen.iter().map(|&s| sols[s].values().to_vec()).collect(),
                indices,
            }));
        }
        visited = dfs.visited;
        if !next_combination(&mut indices, l) {
            return Ok(None);
        }
    }
}

/// Glues `r_k = p_k(s_{k-1}, s_k, s_{k+1})` (with `r₀ = s₀`, `r_n = s_n`)
/// into `t(i) = r_k(i)` for `i_k < i ≤ i_{k+1}`, where `i₀ = 0` and
/// `i_{n+1} = ℓ`.
pub fn braid_to_solution(p: &PathInstance, braid: &Braid, hm: &HmChain) -> Result<Solution> {
    let n = hm.n();
    if braid.n() != n || braid.solutions.len() != n + 1 {
        return Err(Error::Precondition(format!(
            "a chain with n={n} needs an {n}-braid, got {} indices and {} solutions",
            braid.n(),
            braid.solutions.len()
        )));
    }
    if hm.domain() != p.domain() {
        return Err(Error::DomainMismatch {
            expected: p.domain(),
            found: hm.domain(),
        });
    }
    let l = p.len();
    let s = &braid.solutions;
    if s.iter().any(|x| x.len() != l) {
        return Err(Error::Precondition(format!("braid solutions must have length {l}")));
    }
    let r: Vec<Vec<Elem>> = (0..=n)
        .map(|k| {
            if k == 0 || k == n {
                s[k].clone()
            } else {
                (0..l)
                    .map(|i| hm.term(k).apply(&[s[k - 1][i], s[k][i], s[k + 1][i]]))
                    .collect()
            }
        })
        .collect();
    for k in 1..=n {
        let ik = braid.indices[k - 1];
        if r[k - 1][ik - 1] != r[k][ik - 1] {
            return Err(Error::Inconsistent(format!("r{} and r{k} disagree at {ik}", k - 1)));
        }
    }
    let mut bounds = vec![0];
    bounds.extend_from_slice(&braid.indices);
    bounds.push(l);
    let mut t = vec![0; l];
    for k in 0..=n {
        let (lo, hi) = (bounds[k], bounds[k + 1]);
        t[lo..hi].copy_from_slice(&r[k][lo..hi]);
    }
    if !p.is_solution(&t) {
        return Err(Error::Inconsistent("glued mapping is not a solution".into()));
    }
    Ok(Solution(t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{az2, OperationTable, Relation};

    fn xor_chain() -> HmChain {
        HmChain::with_middle(OperationTable::xor3())
    }

    #[test]
    fn single_solution_gives_degenerate_braid() {
        let p = PathInstance::from_names(&az2(), &["C0", "C0", "C0"], &["EQ", "EQ"]).unwrap();
        let b = find_braid(&p, 2, None, &BraidSearch::default()).unwrap().unwrap();
        assert_eq!(b.indices, vec![1, 2]);
        assert!(b.solutions.iter().all(|s| s == &vec![0, 0, 0]));
        b.check(&p).unwrap();
        let t = braid_to_solution(&p, &b, &xor_chain()).unwrap();
        assert_eq!(t.values(), &[0, 0, 0]);
        assert!(find_braid(&p, 4, None, &BraidSearch::default()).unwrap().is_none());
    }

    #[test]
    fn eq_chain_crossings_need_agreement() {
        let full = Relation::full(2, 1).unwrap();
        let eq = Relation::equality(2).unwrap();
        let p = PathInstance::new(2, vec![full; 3], vec![eq.clone(), eq]).unwrap();
        let b = find_braid(&p, 2, None, &BraidSearch::default()).unwrap().unwrap();
        b.check(&p).unwrap();
        // any two constant solutions crossing at an index coincide
        for k in 1..b.n() {
            assert_eq!(b.solutions[k], b.solutions[k + 1]);
            assert_eq!(b.solutions[k - 1], b.solutions[k]);
        }
    }

    #[test]
    fn marked_edges_force_a_real_zigzag() {
        let full = Relation::full(2, 1).unwrap();
        let all = Relation::full(2, 2).unwrap();
        let p = PathInstance::new(2, vec![full; 4], vec![all; 3]).unwrap();
        let edges = [(2, (1, 0))];
        let b = find_braid(&p, 2, Some(&edges), &BraidSearch::default()).unwrap().unwrap();
        b.check(&p).unwrap();
        assert!(b.passes_edges(&edges));
        let t = braid_to_solution(&p, &b, &xor_chain()).unwrap();
        let (i1, i2) = (b.indices[0], b.indices[1]);
        assert_eq!(t.values()[i1 - 1], b.solutions[0][i1 - 1]);
        assert_eq!(t.values()[i2 - 1], b.solutions[2][i2 - 1]);
    }

    #[test]
    fn wrong_size_rejected() {
        let p = PathInstance::from_names(&az2(), &["C0", "C0"], &["EQ"]).unwrap();
        let b = Braid {
            solutions: vec![vec![0, 0]; 2],
            indices: vec![1],
        };
        assert!(braid_to_solution(&p, &b, &xor_chain()).is_err());
    }
}
