use crate::algebra::{Elem, Relation};
use crate::error::{Error, Result};
use crate::instances::PathInstance;

use super::lambda::lambda_relation;
use super::profile::path_profile;

/// `I_λ` together with, for each of its variables, the 1-based index of the
/// variable of `I` it stands for.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LambdaReduction {
    pub instance: PathInstance,
    pub vars: Vec<usize>,
}

impl LambdaReduction {
    /// Whether binary constraint `p` of `I_λ` is a `λ` gap rather than a
    /// binary constraint copied from `I`.
    pub fn is_gap(&self, p: usize) -> bool {
        self.vars[p] != self.vars[p - 1] + 1
    }
}

/// Keeps the variables `1`, `ℓ` and both ends of every binary constraint
/// holding a backward edge; consecutive kept variables inherit `I`'s
/// constraint and the others are joined by `λ`.
pub fn build_i_lambda(p: &PathInstance) -> Result<LambdaReduction> {
    let l = p.len();
    let mut u = vec![1, l];
    for i in path_profile(p).backward_indices() {
        u.push(i);
        u.push(i + 1);
    }
    u.sort_unstable();
    u.dedup();
    let unary = u.iter().map(|&v| p.unary(v).clone()).collect();
    let binary = u
        .windows(2)
        .map(|w| {
            if w[1] == w[0] + 1 {
                Ok(p.binary(w[0]).clone())
            } else {
                Ok(lambda_relation(p, w[0], w[1])?.relation(p.domain()))
            }
        })
        .collect::<Result<_>>()?;
    Ok(LambdaReduction {
        instance: PathInstance::new(p.domain(), unary, binary)?,
        vars: u,
    })
}

/// Solutions of `I_{[a,b]}` after clamping the window to `[1, ℓ]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntervalSolutionSets {
    pub a: usize,
    pub b: usize,
    /// `{(s(a), s(b))}`.
    pub endpoint_pairs: Relation,
    /// `point_sets[i - a] = {s(i)}`.
    pub point_sets: Vec<Relation>,
}

impl IntervalSolutionSets {
    pub fn point_set(&self, i: usize) -> &Relation {
        &self.point_sets[i - self.a]
    }
}

/// Members of the next unary constraint (`i+1` going forward, `i` going
/// backward) joined by `B_{i,i+1}` to some member of `from`.
fn step(p: &PathInstance, from: &[bool], i: usize, forward: bool) -> Vec<bool> {
    let d = p.domain();
    let target = p.unary(if forward { i + 1 } else { i });
    let e = p.binary(i);
    (0..d)
        .map(|y| {
            target.contains(&[y])
                && (0..d).any(|x| from[x] && if forward { e.contains(&[x, y]) } else { e.contains(&[y, x]) })
        })
        .collect()
}

fn member_mask(r: &Relation) -> Vec<bool> {
    (0..r.domain()).map(|a| r.contains(&[a])).collect()
}

fn mask_relation(d: usize, m: &[bool]) -> Relation {
    Relation::unary(d, (0..d).filter(|&a| m[a])).expect("unary relation")
}

/// Exact endpoint pairs and point sets of the solutions on `[a, b]`,
/// computed by propagation from both ends.
pub fn interval_solution_sets(p: &PathInstance, a: usize, b: usize) -> Result<IntervalSolutionSets> {
    let (a, b) = (a.max(1), b.min(p.len()));
    p.check_range(a, b)?;
    let d = p.domain();
    let n = b - a + 1;
    let mut fwd = vec![member_mask(p.unary(a))];
    for i in a..b {
        let next = step(p, &fwd[i - a], i, true);
        fwd.push(next);
    }
    let mut bwd = vec![Vec::new(); n];
    bwd[n - 1] = member_mask(p.unary(b));
    for i in (a..b).rev() {
        bwd[i - a] = step(p, &bwd[i - a + 1], i, false);
    }
    let point_sets = (0..n)
        .map(|k| {
            let m: Vec<bool> = (0..d).map(|x| fwd[k][x] && bwd[k][x]).collect();
            mask_relation(d, &m)
        })
        .collect();
    let mut endpoint_pairs = Relation::empty(d, 2)?;
    for x in p.unary(a).elements() {
        let mut cur: Vec<bool> = (0..d).map(|y| y == x).collect();
        for i in a..b {
            cur = step(p, &cur, i, true);
        }
        for (y, &hit) in cur.iter().enumerate() {
            if hit {
                endpoint_pairs.insert(&[x, y])?;
            }
        }
    }
    Ok(IntervalSolutionSets {
        a,
        b,
        endpoint_pairs,
        point_sets,
    })
}

/// The smaller instance `K` and where its constraints were read off.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Shrunk {
    pub instance: PathInstance,
    /// Variables of `I_λ` kept, 1-based and increasing.
    pub indices: Vec<usize>,
    /// Window whose point set at `indices[j]` is `K`'s `j`-th unary.
    pub unary_windows: Vec<(usize, usize)>,
    /// Window `[indices[j], indices[j+1]]` giving `K`'s `j`-th binary.
    pub binary_windows: Vec<(usize, usize)>,
}

/// `|S_{[i-1,i+1],i}| < |Bᵢ|`: a neighbouring binary constraint is not
/// subdirect and rules out part of `Bᵢ`.
fn shrinks_at(p: &PathInstance, i: usize) -> Result<bool> {
    let s = interval_solution_sets(p, i.saturating_sub(1), i + 1)?;
    Ok(s.point_set(i).len() < p.unary(i).len())
}

fn leftmost_shrinking(p: &PathInstance, lo: usize, hi: usize) -> Result<Option<usize>> {
    for i in lo..=hi.min(p.len()) {
        if shrinks_at(p, i)? {
            return Ok(Some(i));
        }
    }
    Ok(None)
}

/// Picks the leftmost shrinking index in `[1, L]`, then in each following
/// `[i_j + 1, i_j + L]`, until the rest of the instance fits in one window.
/// `K` lives on the picked indices; every unary constraint of `K` is
/// strictly smaller than the one it replaces, and `K` is satisfiable exactly
/// when `p` is.
pub fn shrink_instance(p: &PathInstance, window: usize) -> Result<Shrunk> {
    if window == 0 {
        return Err(Error::Precondition("window length must be positive".into()));
    }
    if p.max_unary() <= 1 {
        return Err(Error::Precondition("unary constraints of size at most 1 cannot shrink".into()));
    }
    let l = p.len();
    let missing = |lo: usize, hi: usize| {
        Error::Precondition(format!("no constraint in [{lo},{}] rules out a value", hi.min(l)))
    };
    let mut indices = vec![leftmost_shrinking(p, 1, window)?.ok_or_else(|| missing(1, window))?];
    loop {
        let last = *indices.last().unwrap();
        if l - last <= window {
            break;
        }
        let next = leftmost_shrinking(p, last + 1, last + window)?.ok_or_else(|| missing(last + 1, last + window))?;
        indices.push(next);
    }
    let k = indices.len();
    let unary_windows: Vec<(usize, usize)> = indices
        .iter()
        .enumerate()
        .map(|(j, &i)| {
            let lo = if j == 0 { 1 } else { i - 1 };
            let hi = if j + 1 == k { l } else { (i + 1).min(l) };
            (lo, hi)
        })
        .collect();
    let binary_windows: Vec<(usize, usize)> = indices.windows(2).map(|w| (w[0], w[1])).collect();
    let unary = indices
        .iter()
        .zip(&unary_windows)
        .map(|(&i, &(lo, hi))| Ok(interval_solution_sets(p, lo, hi)?.point_set(i).clone()))
        .collect::<Result<_>>()?;
    let binary = binary_windows
        .iter()
        .map(|&(lo, hi)| Ok(interval_solution_sets(p, lo, hi)?.endpoint_pairs))
        .collect::<Result<_>>()?;
    Ok(Shrunk {
        instance: PathInstance::new(p.domain(), unary, binary)?,
        indices,
        unary_windows,
        binary_windows,
    })
}

/// Values of the solutions of `p`, as sets per variable.
pub fn solution_values(p: &PathInstance) -> Vec<Vec<Elem>> {
    interval_solution_sets(p, 1, p.len())
        .expect("full range")
        .point_sets
        .iter()
        .map(Relation::elements)
        .collect()
}
