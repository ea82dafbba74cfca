//! Column enumerations of Δ̂+, the two pairing sequences that grow a
//! downward-closed subcategory two objects at a time, and finite
//! contraction certificates built from them.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::cats::{pair_step, CatsError, DcSubcat, Flavor, HatObj};
use crate::diagrams::{entry_name, limit_telescope, raw_tower, DiagramError};
use crate::rewrite::{ChainStep, EquivChain, EquivStep, LevelEnv};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ContractionError {
    #[error("step {index}: {source}")]
    Step { index: usize, source: CatsError },
    #[error("{0} is added more than once")]
    Repeated(HatObj),
    #[error(transparent)]
    Diagram(#[from] DiagramError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    fn admits(self, j: usize) -> bool {
        j.is_multiple_of(2) == (self == Parity::Even)
    }
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColumnEnum {
    pub parity: Parity,
    pub bound: usize,
    pub items: Vec<(usize, usize)>,
}

/// All `(m, j)` of the given parity with `j ≤ m+1` and `m+1 ≤ bound`,
/// ordered by `m+j` and then by `j`.
pub fn column_enum(parity: Parity, bound: usize) -> ColumnEnum {
    let mut items: Vec<(usize, usize)> = (0..bound)
        .flat_map(|m| (0..=m + 1).map(move |j| (m, j)))
        .filter(|&(_, j)| parity.admits(j))
        .collect();
    items.sort_by_key(|&(m, j)| (m + j, j));
    ColumnEnum { parity, bound, items }
}

/// A start subcategory and the pairs `⟨m,j⟩, ⟨m+1,j+1⟩` added to it in order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairingChain {
    pub start: DcSubcat,
    pub steps: Vec<(HatObj, HatObj)>,
}

impl PairingChain {
    fn from_columns(start: DcSubcat, cols: &ColumnEnum) -> Self {
        let steps = cols
            .items
            .iter()
            .map(|&(m, j)| (HatObj { m, j }, HatObj { m: m + 1, j: j + 1 }))
            .collect();
        PairingChain { start, steps }
    }

    /// Every intermediate subcategory, starting with `start`. Each step is a
    /// checked pair step, so all of them are downward closed.
    pub fn stages(&self) -> Result<Vec<DcSubcat>, ContractionError> {
        let mut out = vec![self.start.clone()];
        let mut seen: BTreeSet<HatObj> = self.start.objects().clone();
        for (index, &(lo, up)) in self.steps.iter().enumerate() {
            for x in [lo, up] {
                if !seen.insert(x) {
                    return Err(ContractionError::Repeated(x));
                }
            }
            let next = pair_step(out.last().expect("nonempty"), lo, up)
                .map_err(|source| ContractionError::Step { index, source })?;
            out.push(next);
        }
        Ok(out)
    }

    pub fn end(&self) -> Result<DcSubcat, ContractionError> {
        Ok(self.stages()?.pop().expect("nonempty"))
    }
}

/// `D₀ = {⟨0,1⟩}` grown by the even columns.
pub fn d_chain(bound: usize) -> PairingChain {
    let start = DcSubcat::new(bound, Flavor::Hat, [HatObj { m: 0, j: 1 }].into())
        .expect("⟨0,1⟩ has no predecessors");
    PairingChain::from_columns(start, &column_enum(Parity::Even, bound))
}

/// `D'₀ = {⟨m,0⟩ : m ≤ bound}` grown by the odd columns.
pub fn dprime_chain(bound: usize) -> PairingChain {
    PairingChain::from_columns(DcSubcat::spine(bound, bound), &column_enum(Parity::Odd, bound))
}

/// Objects at the top level `bound` that neither chain can pair, because
/// their partner would lie above the bound.
pub fn unpaired_top(parity: Parity, bound: usize) -> Vec<HatObj> {
    (0..=bound + 1).filter(|&j| parity.admits(j)).map(|j| HatObj { m: bound, j }).collect()
}

pub const SINGLETON_PAIR: &str = "SingletonPair";
pub const LEVEL_CONTRACT: &str = "LevelContract";

/// Replayable steps from `B` (the limit over `{⟨0,1⟩}`) to `A →ⁿ⁺¹ B`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteCertificate {
    pub n: i32,
    pub chain: EquivChain,
}

impl FiniteCertificate {
    pub fn to_chain(&self) -> EquivChain {
        self.chain.clone()
    }
}

fn pair_tag(lo: HatObj, up: HatObj) -> String {
    format!("{SINGLETON_PAIR}({lo},{up})")
}

fn position(d: &BTreeSet<HatObj>, x: HatObj) -> usize {
    d.iter().take_while(|y| **y < x).count()
}

/// Expands along the even pairs up to level `n+2`, fills and empties the
/// contractible top level, then contracts along the odd pairs to the spine.
pub fn finite_certificate(n: i32) -> Result<FiniteCertificate, ContractionError> {
    assert!(n >= -1, "truncation level below -1");
    let top = (n + 2) as usize;
    let mut steps = Vec::new();

    let grow = d_chain(top);
    let mut cur: BTreeSet<HatObj> = grow.end()?.objects().clone();
    for &(lo, up) in &grow.steps {
        steps.push(ChainStep::new(&pair_tag(lo, up), EquivStep::HatPair { lower: lo, upper: up, add: true }));
    }

    // Entries at the top level are contractible, so they may come and go.
    let full: BTreeSet<HatObj> =
        (0..=top).flat_map(|m| (0..=m + 1).map(move |j| HatObj { m, j })).collect();
    let full_tel = limit_telescope(&DcSubcat::new(top, Flavor::Hat, full.clone()).map_err(DiagramError::from)?)?;
    for x in unpaired_top(Parity::Even, top) {
        cur.insert(x);
        let name = entry_name(x);
        let ty = full_tel.entries.iter().find(|(m, _)| *m == name).expect("full limit has every entry").1.clone();
        steps.push(ChainStep::new(LEVEL_CONTRACT, EquivStep::LevelExpand { at: position(&cur, x), name, ty }));
    }
    for x in unpaired_top(Parity::Odd, top) {
        let at = position(&cur, x);
        cur.remove(&x);
        steps.push(ChainStep::new(LEVEL_CONTRACT, EquivStep::LevelContract { at }));
    }

    let shrink = dprime_chain(top);
    for &(lo, up) in shrink.steps.iter().rev() {
        steps.push(ChainStep::new(&pair_tag(lo, up), EquivStep::HatPair { lower: lo, upper: up, add: false }));
    }
    steps.push(ChainStep::new(LEVEL_CONTRACT, EquivStep::LevelContract { at: top }));

    let start = limit_telescope(&d_chain(top).start)?;
    let levels: LevelEnv = [("B".to_string(), n)].into_iter().collect();
    let chain = EquivChain { start, steps, end: raw_tower(n + 1), levels };
    Ok(FiniteCertificate { n, chain })
}

#[cfg(test)]
mod tests;
