use super::*;
use crate::cats::{is_downwards_closed, predecessors};
use crate::finite_model::battery_envs;
use crate::rewrite::{check_chain, check_chain_in_models};
use crate::typeexpr::alpha_eq_tel;
use proptest::prelude::*;

fn h(m: usize, j: usize) -> HatObj {
    HatObj { m, j }
}

fn all_objects(bound: usize) -> BTreeSet<HatObj> {
    (0..=bound).flat_map(|m| (0..=m + 1).map(move |j| h(m, j))).collect()
}

/// `(k,i)` precedes `(m,j)` when `k+i < m+j`, or the sums agree and `i < j`.
fn precedes(a: (usize, usize), b: (usize, usize)) -> bool {
    a.0 + a.1 < b.0 + b.1 || (a.0 + a.1 == b.0 + b.1 && a.1 < b.1)
}

#[test]
fn column_examples() {
    let even = column_enum(Parity::Even, 4);
    assert_eq!(even.items[..5], [(0, 0), (1, 0), (2, 0), (3, 0), (1, 2)]);
    assert_eq!(even.items[0], (0, 0));
    let odd = column_enum(Parity::Odd, 4);
    assert_eq!(odd.items, vec![(0, 1), (1, 1), (2, 1), (3, 1), (2, 3), (3, 3)]);
    assert!(column_enum(Parity::Even, 0).items.is_empty());
}

proptest! {
    #[test]
    fn columns_are_complete_and_ordered(bound in 0usize..=8, even in any::<bool>()) {
        let parity = if even { Parity::Even } else { Parity::Odd };
        let c = column_enum(parity, bound);
        // Brute force over a generous grid.
        let mut want: Vec<(usize, usize)> = Vec::new();
        for m in 0..=10 {
            for j in 0..=12 {
                if j % 2 == usize::from(!even) && j <= m + 1 && m + 1 <= bound {
                    want.push((m, j));
                }
            }
        }
        prop_assert_eq!(c.items.len(), want.len());
        for w in &want {
            prop_assert!(c.items.contains(w));
        }
        for pair in c.items.windows(2) {
            prop_assert!(precedes(pair[0], pair[1]));
        }
    }
}

#[test]
fn d_chain_examples() {
    let d = d_chain(4);
    assert_eq!(d.steps[..3], [(h(0, 0), h(1, 1)), (h(1, 0), h(2, 1)), (h(2, 0), h(3, 1))]);
    let pos = |p| d.steps.iter().position(|s| *s == p).unwrap();
    assert!(pos((h(3, 0), h(4, 1))) < pos((h(1, 2), h(2, 3))));
    let stages = d.stages().unwrap();
    assert_eq!(stages[1].objects(), &[h(0, 1), h(0, 0), h(1, 1)].into_iter().collect());
    assert!(is_downwards_closed(stages[1].objects()));
}

#[test]
fn dprime_chain_examples() {
    let d = dprime_chain(4);
    assert_eq!(d.steps[..3], [(h(0, 1), h(1, 2)), (h(1, 1), h(2, 2)), (h(2, 1), h(3, 2))]);
    let first_high = d.steps.iter().find(|(lo, _)| lo.j >= 3).unwrap();
    assert_eq!(*first_high, (h(2, 3), h(3, 4)));
}

/// Pairs drawn in the standard picture up to level 4, as `(lower, upper)`;
/// top-row objects whose partner lies above the drawing have no upper.
fn drawn_groupings(parity: Parity) -> Vec<(HatObj, Option<HatObj>)> {
    let (closed, open): (&[(usize, usize)], &[(usize, usize)]) = match parity {
        Parity::Even => (&[(0, 0), (1, 0), (2, 0), (3, 0), (1, 2), (2, 2), (3, 2), (3, 4)], &[(4, 0), (4, 2), (4, 4)]),
        Parity::Odd => (&[(0, 1), (1, 1), (2, 1), (3, 1), (2, 3), (3, 3)], &[(4, 1), (4, 3), (4, 5)]),
    };
    closed
        .iter()
        .map(|&(m, j)| (h(m, j), Some(h(m + 1, j + 1))))
        .chain(open.iter().map(|&(m, j)| (h(m, j), None)))
        .collect()
}

#[test]
fn first_pairs_are_drawn_groupings() {
    for (parity, chain) in [(Parity::Even, d_chain(8)), (Parity::Odd, dprime_chain(8))] {
        let drawn = drawn_groupings(parity);
        for &(lo, up) in &chain.steps[..5] {
            let hit = drawn.iter().any(|&(l, u)| l == lo && u.is_none_or(|u| u == up));
            assert!(hit, "{parity}: {lo},{up} is not a drawn grouping");
        }
    }
    // Every closed grouping of the drawing is a step at bound 4.
    for (parity, chain) in [(Parity::Even, d_chain(4)), (Parity::Odd, dprime_chain(4))] {
        for (lo, up) in drawn_groupings(parity) {
            if let Some(up) = up {
                assert!(chain.steps.contains(&(lo, up)), "{parity}: missing {lo},{up}");
            }
        }
        let open: Vec<HatObj> = drawn_groupings(parity).into_iter().filter(|g| g.1.is_none()).map(|g| g.0).collect();
        assert_eq!(open, unpaired_top(parity, 4));
    }
}

#[test]
fn chains_cover_each_object_once() {
    for bound in 1..=8 {
        for (parity, chain) in [(Parity::Even, d_chain(bound)), (Parity::Odd, dprime_chain(bound))] {
            let stages = chain.stages().unwrap();
            let mut count = chain.start.len();
            for (k, (lo, up)) in chain.steps.iter().enumerate() {
                let before = stages[k].objects();
                assert!(is_downwards_closed(stages[k + 1].objects()));
                assert!(!before.contains(lo) && !before.contains(up));
                // The upper object's only missing predecessor is the lower one.
                let missing: Vec<HatObj> =
                    predecessors(*up, up.m).into_iter().filter(|p| !before.contains(p)).collect();
                assert_eq!(missing, vec![*lo]);
                count += 2;
            }
            let end = stages.last().unwrap().objects();
            assert_eq!(end.len(), count, "bound {bound}: an object was added twice");
            let mut covered = end.clone();
            covered.extend(unpaired_top(parity, bound));
            assert_eq!(covered, all_objects(bound), "bound {bound} {parity}");
        }
        // The two leftovers partition the top level.
        let mut top: Vec<HatObj> = unpaired_top(Parity::Even, bound);
        top.extend(unpaired_top(Parity::Odd, bound));
        top.sort();
        assert_eq!(top, (0..=bound + 1).map(|j| h(bound, j)).collect::<Vec<_>>());
    }
}

#[test]
fn certificates_replay_to_the_raw_tower() {
    for n in -1..=2 {
        let cert = finite_certificate(n).unwrap();
        let stages = check_chain(&cert.to_chain()).unwrap_or_else(|e| panic!("n={n}: {e}"));
        assert!(alpha_eq_tel(stages.last().unwrap(), &raw_tower(n + 1)));
        assert!(cert.chain.steps.iter().all(|s| s.tag.starts_with(SINGLETON_PAIR) || s.tag == LEVEL_CONTRACT));
    }
}

#[test]
fn propositional_certificate_is_short() {
    // ⟨0,0⟩⟨1,1⟩ in, ⟨1,0⟩ ⟨1,2⟩ in, ⟨1,1⟩ out, ⟨0,1⟩⟨1,2⟩ out, ⟨1,0⟩ out.
    let cert = finite_certificate(-1).unwrap();
    let kinds: Vec<&str> = cert.chain.steps.iter().map(|s| s.step.kind()).collect();
    assert_eq!(kinds, ["hat-pair", "level-expand", "level-expand", "level-contract", "hat-pair", "level-contract"]);
}

#[test]
fn small_certificates_hold_in_the_model() {
    for n in [-1, 0] {
        let c = finite_certificate(n).unwrap().to_chain();
        let used = check_chain_in_models(&c, &battery_envs()).unwrap_or_else(|e| panic!("n={n}: {e}"));
        assert!(used > 0);
    }
}
