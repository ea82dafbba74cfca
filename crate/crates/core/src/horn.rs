//! Horn decompositions of `P+(s)` and truncation-level arithmetic.

use std::collections::BTreeSet;

use thiserror::Error;

pub type Subset = Vec<usize>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HornError {
    #[error("k = {0} is not an element of s")]
    KNotInS(usize),
    #[error("horn needs |s| >= 2, got {0}")]
    TooSmall(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HornSpec {
    s: Subset,
    k: usize,
}

impl HornSpec {
    pub fn new(s: &[usize], k: usize) -> Result<Self, HornError> {
        let s: BTreeSet<usize> = s.iter().copied().collect();
        if !s.contains(&k) {
            return Err(HornError::KNotInS(k));
        }
        if s.len() < 2 {
            return Err(HornError::TooSmall(s.len()));
        }
        Ok(HornSpec { s: s.into_iter().collect(), k })
    }

    pub fn s(&self) -> &[usize] {
        &self.s
    }

    pub fn k(&self) -> usize {
        self.k
    }
}

/// Nonempty subsets ordered by cardinality, then lexicographically.
pub fn nonempty_subsets(s: &[usize]) -> Vec<Subset> {
    let n = s.len();
    let mut out: Vec<Subset> = (1u32..(1 << n))
        .map(|mask| (0..n).filter(|i| mask & (1 << i) != 0).map(|i| s[i]).collect())
        .collect();
    out.sort_by(|a: &Subset, b: &Subset| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    out
}

/// Nonempty proper subsets, same order.
pub fn proper_faces(s: &[usize]) -> Vec<Subset> {
    nonempty_subsets(s).into_iter().filter(|t| t.len() < s.len()).collect()
}

pub fn is_subset_closed(family: &BTreeSet<Subset>) -> bool {
    family.iter().all(|t| proper_faces(t).iter().all(|u| family.contains(u)))
}

fn without(s: &[usize], k: usize) -> Subset {
    s.iter().copied().filter(|&x| x != k).collect()
}

fn with(s: &[usize], k: usize) -> Subset {
    let mut v: BTreeSet<usize> = s.iter().copied().collect();
    v.insert(k);
    v.into_iter().collect()
}

/// `P+(s)` with `s` and `s − k` removed.
pub fn horn_poset(h: &HornSpec) -> BTreeSet<Subset> {
    let top = h.s.clone();
    let face = without(&h.s, h.k);
    nonempty_subsets(&h.s).into_iter().filter(|t| *t != top && *t != face).collect()
}

pub fn alpha_sequence(h: &HornSpec) -> Vec<Subset> {
    nonempty_subsets(&without(&h.s, h.k))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubsetChain {
    pub start: BTreeSet<Subset>,
    /// Pairs `(αᵢ, αᵢ ∪ {k})`.
    pub steps: Vec<(Subset, Subset)>,
}

impl SubsetChain {
    /// `S₀, S₁, …`.
    pub fn stages(&self) -> Vec<BTreeSet<Subset>> {
        let mut cur = self.start.clone();
        let mut out = vec![cur.clone()];
        for (a, b) in &self.steps {
            cur.insert(a.clone());
            cur.insert(b.clone());
            out.push(cur.clone());
        }
        out
    }
}

pub fn s_chain(h: &HornSpec) -> SubsetChain {
    let start = [vec![h.k]].into_iter().collect();
    let steps = alpha_sequence(h).into_iter().map(|a| {
        let b = with(&a, h.k);
        (a, b)
    });
    SubsetChain { start, steps: steps.collect() }
}

/// What goes wrong with a chain, if anything.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ChainDefect {
    NotClosed(usize),
    Repeated(Subset),
    Uncovered,
    WrongEnd,
    WrongPenultimate,
    Pullback(usize),
}

/// Checks closure, single coverage, the two endpoint identities and the
/// pullback side condition.
pub fn check_s_chain(h: &HornSpec, c: &SubsetChain) -> Result<(), ChainDefect> {
    let stages = c.stages();
    let mut seen: BTreeSet<Subset> = c.start.clone();
    for (i, (a, b)) in c.steps.iter().enumerate() {
        for x in [a, b] {
            if !seen.insert(x.clone()) {
                return Err(ChainDefect::Repeated(x.clone()));
            }
        }
        let prev = &stages[i];
        let local: BTreeSet<Subset> = nonempty_subsets(b).into_iter().filter(|t| prev.contains(t)).collect();
        let hs = HornSpec::new(b, h.k).map_err(|_| ChainDefect::Pullback(i + 1))?;
        if local != horn_poset(&hs) {
            return Err(ChainDefect::Pullback(i + 1));
        }
    }
    for (i, st) in stages.iter().enumerate() {
        if !is_subset_closed(st) {
            return Err(ChainDefect::NotClosed(i));
        }
    }
    let full: BTreeSet<Subset> = nonempty_subsets(&h.s).into_iter().collect();
    if seen != full {
        return Err(ChainDefect::Uncovered);
    }
    if stages.last() != Some(&full) {
        return Err(ChainDefect::WrongEnd);
    }
    if stages.len() < 2 || stages[stages.len() - 2] != horn_poset(h) {
        return Err(ChainDefect::WrongPenultimate);
    }
    Ok(())
}

/// Truncation level of the fibres `E_[k] ↠ M_[k]` for an `n`-type.
pub fn fiber_level(n: i32, k: i32) -> i32 {
    (n - k).max(-2)
}

pub fn contractible(n: i32, k: i32) -> bool {
    n - k <= -2
}

pub fn stabilization_index(n: i32) -> i32 {
    n + 1
}
