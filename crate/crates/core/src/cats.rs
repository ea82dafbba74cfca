//! Index categories: strictly increasing maps (Δ+), the column-extended
//! category Δ̂+ and the lattice of downward-closed full subcategories.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CatsError {
    #[error("cannot compose: codomain [{0}] differs from domain [{1}]")]
    Mismatch(usize, usize),
    #[error("not a strictly increasing map [{dom}] -> [{cod}]: {values:?}")]
    NotIncreasing { dom: usize, cod: usize, values: Vec<usize> },
    #[error("column index {j} out of range for level {m}")]
    BadColumn { m: usize, j: usize },
    #[error("classification failed: {0} columns satisfy alpha")]
    Classify(usize),
    #[error("bound mismatch: {0} vs {1}")]
    BoundMismatch(usize, usize),
    #[error("flavor mismatch")]
    FlavorMismatch,
    #[error("object {0} exceeds bound {1}")]
    OutOfBound(HatObj, usize),
    #[error("not downward closed: {0} is missing predecessor {1}")]
    NotClosed(HatObj, HatObj),
    #[error("bad object token `{0}`")]
    BadToken(String),
    #[error("cannot add the pair {0}, {1}: {2}")]
    BadPair(HatObj, HatObj, &'static str),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SimplexObj {
    pub n: usize,
}

/// A strictly increasing map `[dom] -> [cod]`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct IncrMap {
    dom: usize,
    cod: usize,
    values: Vec<usize>,
}

impl IncrMap {
    pub fn new(dom: usize, cod: usize, values: Vec<usize>) -> Result<Self, CatsError> {
        let ok = values.len() == dom + 1
            && values.windows(2).all(|w| w[0] < w[1])
            && values.iter().all(|&v| v <= cod);
        if ok {
            Ok(IncrMap { dom, cod, values })
        } else {
            Err(CatsError::NotIncreasing { dom, cod, values })
        }
    }

    pub fn identity(n: usize) -> Self {
        IncrMap { dom: n, cod: n, values: (0..=n).collect() }
    }

    pub fn dom(&self) -> SimplexObj {
        SimplexObj { n: self.dom }
    }

    pub fn cod(&self) -> SimplexObj {
        SimplexObj { n: self.cod }
    }

    pub fn values(&self) -> &[usize] {
        &self.values
    }

    pub fn at(&self, x: usize) -> usize {
        self.values[x]
    }
}

impl fmt::Display for IncrMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let vs: Vec<String> = self.values.iter().map(|v| v.to_string()).collect();
        write!(f, "({}):[{}]->[{}]", vs.join(","), self.dom, self.cod)
    }
}

/// Object `⟨m,j⟩` of Δ̂+, with `0 ≤ j ≤ m+1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HatObj {
    pub m: usize,
    pub j: usize,
}

impl HatObj {
    pub fn new(m: usize, j: usize) -> Result<Self, CatsError> {
        if j <= m + 1 {
            Ok(HatObj { m, j })
        } else {
            Err(CatsError::BadColumn { m, j })
        }
    }

    /// The retraction onto Δ+.
    pub fn rank(&self) -> usize {
        self.m
    }

    pub fn token(&self) -> String {
        format!("{}:{}", self.m, self.j)
    }

    pub fn parse_token(s: &str) -> Result<Self, CatsError> {
        let bad = || CatsError::BadToken(s.to_string());
        let (a, b) = s.split_once(':').ok_or_else(bad)?;
        let m = a.trim().parse().map_err(|_| bad())?;
        let j = b.trim().parse().map_err(|_| bad())?;
        HatObj::new(m, j).map_err(|_| bad())
    }
}

impl fmt::Display for HatObj {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "⟨{},{}⟩", self.m, self.j)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HatMap {
    pub src: HatObj,
    pub dst: HatObj,
    pub map: IncrMap,
}

impl HatMap {
    pub fn identity(x: HatObj) -> Self {
        HatMap { src: x, dst: x, map: IncrMap::identity(x.m) }
    }

    /// `self` followed by `g`.
    pub fn then(&self, g: &HatMap) -> Result<HatMap, CatsError> {
        if self.dst != g.src {
            return Err(CatsError::Mismatch(self.dst.m, g.src.m));
        }
        Ok(HatMap { src: self.src, dst: g.dst, map: compose_incr(&self.map, &g.map)? })
    }
}

/// All strictly increasing maps `[k] -> [m]`, lexicographic in their values.
pub fn enumerate_incr_maps(k: SimplexObj, m: SimplexObj) -> Vec<IncrMap> {
    let mut out = Vec::new();
    if k.n > m.n {
        return out;
    }
    let mut cur = Vec::with_capacity(k.n + 1);
    fn go(k: usize, m: usize, cur: &mut Vec<usize>, out: &mut Vec<IncrMap>) {
        if cur.len() == k + 1 {
            out.push(IncrMap { dom: k, cod: m, values: cur.clone() });
            return;
        }
        let lo = cur.last().map_or(0, |v| v + 1);
        let left = k + 1 - cur.len();
        for v in lo..=(m + 1 - left) {
            cur.push(v);
            go(k, m, cur, out);
            cur.pop();
        }
    }
    go(k.n, m.n, &mut cur, &mut out);
    out
}

/// `f` then `g`: `result(x) = g(f(x))`.
pub fn compose_incr(f: &IncrMap, g: &IncrMap) -> Result<IncrMap, CatsError> {
    if f.cod != g.dom {
        return Err(CatsError::Mismatch(f.cod, g.dom));
    }
    let values = f.values.iter().map(|&x| g.values[x]).collect();
    IncrMap::new(f.dom, g.cod, values)
}

/// The column condition α for `f : [k] -> [m]` between columns `i` and `j`.
pub fn alpha_holds(f: &IncrMap, i: usize, j: usize) -> bool {
    use std::cmp::Ordering::*;
    match i.cmp(&j) {
        Greater => false,
        Equal => (0..i.min(f.dom + 1)).all(|x| f.values[x] == x),
        Less => (0..=f.dom).all(|x| if x < i { f.values[x] == x } else { f.values[x] > x }),
    }
}

/// The hom-set Δ̂+(src, dst).
pub fn hat_hom(src: HatObj, dst: HatObj) -> Vec<HatMap> {
    enumerate_incr_maps(SimplexObj { n: src.m }, SimplexObj { n: dst.m })
        .into_iter()
        .filter(|f| alpha_holds(f, src.j, dst.j))
        .map(|map| HatMap { src, dst, map })
        .collect()
}

/// The unique column `i` with `alpha_holds(f, i, j)`.
pub fn classify_map(f: &IncrMap, j: usize) -> Result<usize, CatsError> {
    if j > f.cod + 1 {
        return Err(CatsError::BadColumn { m: f.cod, j });
    }
    let hits: Vec<usize> = (0..=f.dom + 1).filter(|&i| alpha_holds(f, i, j)).collect();
    match hits.as_slice() {
        [i] => Ok(*i),
        _ => Err(CatsError::Classify(hits.len())),
    }
}

/// Objects receiving a nonidentity morphism from `x` in the opposite category.
pub fn predecessors(x: HatObj, _bound: usize) -> BTreeSet<HatObj> {
    let mut out = BTreeSet::new();
    for k in 0..x.m {
        for i in 0..=k + 1 {
            let y = HatObj { m: k, j: i };
            if !hat_hom(y, x).is_empty() {
                out.insert(y);
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Flavor {
    Simplex,
    Hat,
}

/// A finite downward-closed full subcategory, i.e. an element of Sub(I).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DcSubcat {
    bound: usize,
    flavor: Flavor,
    objects: BTreeSet<HatObj>,
}

pub fn is_downwards_closed(s: &BTreeSet<HatObj>) -> bool {
    first_gap(s).is_none()
}

fn first_gap(s: &BTreeSet<HatObj>) -> Option<(HatObj, HatObj)> {
    for &x in s {
        for y in predecessors(x, x.m) {
            if !s.contains(&y) {
                return Some((x, y));
            }
        }
    }
    None
}

impl DcSubcat {
    pub fn new(bound: usize, flavor: Flavor, objects: BTreeSet<HatObj>) -> Result<Self, CatsError> {
        for &x in &objects {
            if x.m > bound {
                return Err(CatsError::OutOfBound(x, bound));
            }
            if flavor == Flavor::Simplex && x.j != 0 {
                return Err(CatsError::FlavorMismatch);
            }
        }
        if let Some((x, y)) = first_gap(&objects) {
            return Err(CatsError::NotClosed(x, y));
        }
        Ok(DcSubcat { bound, flavor, objects })
    }

    pub fn empty(bound: usize, flavor: Flavor) -> Self {
        DcSubcat { bound, flavor, objects: BTreeSet::new() }
    }

    /// The spine `{⟨m,0⟩ : m ≤ n}`.
    pub fn spine(n: usize, bound: usize) -> Self {
        let objects = (0..=n).map(|m| HatObj { m, j: 0 }).collect();
        DcSubcat { bound, flavor: Flavor::Hat, objects }
    }

    pub fn bound(&self) -> usize {
        self.bound
    }

    pub fn flavor(&self) -> Flavor {
        self.flavor
    }

    pub fn objects(&self) -> &BTreeSet<HatObj> {
        &self.objects
    }

    pub fn contains(&self, x: &HatObj) -> bool {
        self.objects.contains(x)
    }

    pub fn len(&self) -> usize {
        self.objects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.objects.is_empty()
    }

    /// Adds objects, failing if the result is not downward closed.
    pub fn extend<I: IntoIterator<Item = HatObj>>(&self, xs: I) -> Result<Self, CatsError> {
        let mut objects = self.objects.clone();
        objects.extend(xs);
        DcSubcat::new(self.bound, self.flavor, objects)
    }

    /// Removes objects, failing if the result is not downward closed.
    pub fn remove<'a, I: IntoIterator<Item = &'a HatObj>>(&self, xs: I) -> Result<Self, CatsError> {
        let mut objects = self.objects.clone();
        for x in xs {
            objects.remove(x);
        }
        DcSubcat::new(self.bound, self.flavor, objects)
    }

    pub fn to_tokens(&self) -> String {
        self.objects.iter().map(HatObj::token).collect::<Vec<_>>().join(" ")
    }

    pub fn from_tokens(bound: usize, flavor: Flavor, s: &str) -> Result<Self, CatsError> {
        let objects = s
            .split_whitespace()
            .map(HatObj::parse_token)
            .collect::<Result<BTreeSet<_>, _>>()?;
        DcSubcat::new(bound, flavor, objects)
    }
}

fn check_compatible(a: &DcSubcat, b: &DcSubcat) -> Result<(), CatsError> {
    if a.bound != b.bound {
        return Err(CatsError::BoundMismatch(a.bound, b.bound));
    }
    if a.flavor != b.flavor {
        return Err(CatsError::FlavorMismatch);
    }
    Ok(())
}

pub fn dc_union(a: &DcSubcat, b: &DcSubcat) -> Result<DcSubcat, CatsError> {
    check_compatible(a, b)?;
    let objects = a.objects.union(&b.objects).copied().collect();
    Ok(DcSubcat { bound: a.bound, flavor: a.flavor, objects })
}

pub fn dc_intersect(a: &DcSubcat, b: &DcSubcat) -> Result<DcSubcat, CatsError> {
    check_compatible(a, b)?;
    let objects = a.objects.intersection(&b.objects).copied().collect();
    Ok(DcSubcat { bound: a.bound, flavor: a.flavor, objects })
}

/// The closure `x̄ = {y : y ⪯ x}`.
pub fn dc_generated(x: HatObj) -> DcSubcat {
    let mut objects = BTreeSet::new();
    let mut todo = vec![x];
    while let Some(y) = todo.pop() {
        if objects.insert(y) {
            todo.extend(predecessors(y, y.m));
        }
    }
    let flavor = if objects.iter().all(|o| o.j == 0) { Flavor::Simplex } else { Flavor::Hat };
    DcSubcat { bound: x.m, flavor, objects }
}

/// `dc_generated` at a larger bound and fixed flavor.
pub fn dc_generated_in(x: HatObj, bound: usize, flavor: Flavor) -> Result<DcSubcat, CatsError> {
    let g = dc_generated(x);
    DcSubcat::new(bound, flavor, g.objects)
}

/// `D + ⟨m−1,j−1⟩ + ⟨m,j⟩`, provided `D` holds every predecessor of the upper
/// object except the lower one and neither of the two.
pub fn pair_step(d: &DcSubcat, lower: HatObj, upper: HatObj) -> Result<DcSubcat, CatsError> {
    let bad = |why| Err(CatsError::BadPair(lower, upper, why));
    if upper.m == 0 || upper.j == 0 || lower != (HatObj { m: upper.m - 1, j: upper.j - 1 }) {
        return bad("not of the shape ⟨m−1,j−1⟩, ⟨m,j⟩");
    }
    if d.contains(&lower) || d.contains(&upper) {
        return bad("already present");
    }
    if predecessors(upper, upper.m).iter().any(|p| *p != lower && !d.contains(p)) {
        return bad("a predecessor of the upper object is missing");
    }
    d.extend([lower, upper])
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn s(n: usize) -> SimplexObj {
        SimplexObj { n }
    }

    fn h(m: usize, j: usize) -> HatObj {
        HatObj::new(m, j).unwrap()
    }

    fn im(dom: usize, cod: usize, v: &[usize]) -> IncrMap {
        IncrMap::new(dom, cod, v.to_vec()).unwrap()
    }

    // Oracle: filter all functions [k] -> [m] for strict monotonicity.
    fn brute_maps(k: usize, m: usize) -> Vec<Vec<usize>> {
        let total = (m + 1).pow(k as u32 + 1);
        let mut out = Vec::new();
        for code in 0..total {
            let mut c = code;
            let mut v = Vec::new();
            for _ in 0..=k {
                v.push(c % (m + 1));
                c /= m + 1;
            }
            v.reverse();
            if v.windows(2).all(|w| w[0] < w[1]) {
                out.push(v);
            }
        }
        out.sort();
        out
    }

    #[test]
    fn enumerate_examples() {
        let got: Vec<_> = enumerate_incr_maps(s(1), s(2)).iter().map(|f| f.values().to_vec()).collect();
        assert_eq!(got, vec![vec![0, 1], vec![0, 2], vec![1, 2]]);
        assert_eq!(enumerate_incr_maps(s(0), s(0)), vec![IncrMap::identity(0)]);
        assert!(enumerate_incr_maps(s(2), s(1)).is_empty());
    }

    #[test]
    fn enumerate_matches_brute_force() {
        for m in 0..=5 {
            for k in 0..=m + 1 {
                let got: Vec<_> = enumerate_incr_maps(s(k), s(m)).iter().map(|f| f.values().to_vec()).collect();
                assert_eq!(got, brute_maps(k, m), "k={k} m={m}");
            }
        }
    }

    #[test]
    fn counts_are_binomial() {
        for m in 0..=8 {
            for k in 0..=m {
                assert_eq!(enumerate_incr_maps(s(k), s(m)).len(), binomial(m + 1, k + 1));
            }
        }
    }

    #[test]
    fn compose_examples() {
        let f = im(0, 1, &[1]);
        let g = im(1, 2, &[0, 2]);
        assert_eq!(compose_incr(&f, &g).unwrap(), im(0, 2, &[2]));
        assert_eq!(compose_incr(&IncrMap::identity(1), &g).unwrap(), g);
        assert!(compose_incr(&g, &f).is_err());
    }

    #[test]
    fn compose_associative_exhaustive() {
        for a in 0..=3 {
            for b in a..=4 {
                for c in b..=4 {
                    for d in c..=4 {
                        for f in enumerate_incr_maps(s(a), s(b)) {
                            for g in enumerate_incr_maps(s(b), s(c)) {
                                let fg = compose_incr(&f, &g).unwrap();
                                for k in enumerate_incr_maps(s(c), s(d)) {
                                    let l = compose_incr(&fg, &k).unwrap();
                                    let r = compose_incr(&f, &compose_incr(&g, &k).unwrap()).unwrap();
                                    assert_eq!(l, r);
                                }
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn alpha_examples() {
        assert!(alpha_holds(&im(0, 1, &[1]), 0, 1));
        assert!(!alpha_holds(&im(0, 1, &[0]), 0, 1));
        for f in enumerate_incr_maps(s(1), s(3)) {
            assert!(!alpha_holds(&f, 2, 1));
        }
    }

    #[test]
    fn hat_hom_examples() {
        assert_eq!(hat_hom(h(0, 0), h(1, 0)).len(), 2);
        let x = hat_hom(h(0, 1), h(1, 2));
        assert_eq!(x.len(), 1);
        assert_eq!(x[0].map.values(), &[0]);
        assert!(hat_hom(h(1, 1), h(0, 0)).is_empty());
    }

    #[test]
    fn classify_examples() {
        assert_eq!(classify_map(&im(1, 2, &[0, 2]), 2).unwrap(), 1);
        assert_eq!(classify_map(&im(1, 2, &[1, 2]), 2).unwrap(), 0);
        for f in enumerate_incr_maps(s(2), s(4)) {
            assert_eq!(classify_map(&f, 0).unwrap(), 0);
        }
    }

    #[test]
    fn columns_partition_hom_sets() {
        for m in 0..=6 {
            for k in 0..=m {
                for j in 0..=m + 1 {
                    let mut seen = BTreeSet::new();
                    let mut total = 0;
                    for i in 0..=k + 1 {
                        for f in hat_hom(h(k, i), h(m, j)) {
                            assert!(seen.insert(f.map.clone()), "overlap");
                            total += 1;
                        }
                    }
                    assert_eq!(total, binomial(m + 1, k + 1));
                }
            }
        }
    }

    #[test]
    fn composition_closure() {
        let objs: Vec<HatObj> = (0..=4).flat_map(|m| (0..=m + 1).map(move |j| h(m, j))).collect();
        for &x in &objs {
            for &y in objs.iter().filter(|y| y.m >= x.m) {
                for f in hat_hom(x, y) {
                    for &z in objs.iter().filter(|z| z.m >= y.m) {
                        for g in hat_hom(y, z) {
                            let c = f.then(&g).unwrap();
                            assert!(alpha_holds(&c.map, x.j, z.j));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn spine_is_simplex_category() {
        for m in 0..=5 {
            for k in 0..=m {
                let a: Vec<_> = hat_hom(h(k, 0), h(m, 0)).into_iter().map(|f| f.map).collect();
                assert_eq!(a, enumerate_incr_maps(s(k), s(m)));
            }
        }
    }

    #[test]
    fn predecessor_examples() {
        assert_eq!(predecessors(h(1, 1), 3), [h(0, 0), h(0, 1)].into_iter().collect());
        assert!(predecessors(h(0, 1), 3).is_empty());
        let p = predecessors(h(2, 3), 3);
        for y in [h(1, 0), h(1, 1), h(1, 2)] {
            assert!(p.contains(&y));
        }
        for x in predecessors(h(3, 2), 3) {
            assert!(x.m < 3);
        }
    }

    #[test]
    fn no_arrows_between_level_zero_columns() {
        assert!(hat_hom(h(0, 0), h(0, 1)).is_empty());
        assert!(hat_hom(h(0, 1), h(0, 0)).is_empty());
    }

    #[test]
    fn small_hom_multiplicities() {
        // (source level m, source column, target column, arrow count) between adjacent levels.
        let drawn: &[(usize, usize, usize, usize)] = &[
            (1, 0, 0, 2), (1, 1, 0, 1), (1, 1, 1, 1), (1, 2, 0, 1), (1, 2, 1, 1),
            (2, 0, 0, 3), (2, 1, 0, 1), (2, 1, 1, 2), (2, 2, 0, 1), (2, 2, 1, 1), (2, 2, 2, 1),
            (2, 3, 0, 1), (2, 3, 1, 1), (2, 3, 2, 1),
            (3, 0, 0, 4), (3, 1, 0, 1), (3, 1, 1, 3), (3, 2, 0, 1), (3, 2, 1, 1), (3, 2, 2, 2),
            (3, 3, 0, 1), (3, 3, 1, 1), (3, 3, 2, 1), (3, 3, 3, 1),
            (3, 4, 0, 1), (3, 4, 1, 1), (3, 4, 2, 1), (3, 4, 3, 1),
        ];
        for m in 1..=3 {
            for j in 0..=m + 1 {
                for i in 0..=m {
                    let want = drawn
                        .iter()
                        .find(|d| d.0 == m && d.1 == j && d.2 == i)
                        .map_or(0, |d| d.3);
                    assert_eq!(hat_hom(h(m - 1, i), h(m, j)).len(), want, "<{m},{j}> -> <{},{i}>", m - 1);
                }
            }
        }
    }

    #[test]
    fn generated_and_closure() {
        let g = dc_generated(h(1, 1));
        assert_eq!(g.objects(), &[h(0, 0), h(0, 1), h(1, 1)].into_iter().collect());
        assert!(!is_downwards_closed(&[h(1, 1)].into_iter().collect()));
        let u = dc_union(&g, &g).unwrap();
        assert_eq!(u, g);
    }

    #[test]
    fn tokens_round_trip() {
        let d = dc_generated_in(h(2, 3), 4, Flavor::Hat).unwrap();
        let t = d.to_tokens();
        assert_eq!(DcSubcat::from_tokens(4, Flavor::Hat, &t).unwrap(), d);
        assert!(t.starts_with("0:0 0:1"));
    }

    #[test]
    fn pair_step_examples() {
        let h = |m, j| HatObj { m, j };
        let d0 = DcSubcat::new(3, Flavor::Hat, [h(0, 1)].into_iter().collect()).unwrap();
        let d1 = pair_step(&d0, h(0, 0), h(1, 1)).unwrap();
        assert_eq!(d1.len(), 3);
        assert!(pair_step(&d1, h(0, 0), h(1, 1)).is_err());
        assert!(pair_step(&d1, h(1, 0), h(1, 1)).is_err());
        // ⟨2,1⟩ also needs ⟨1,1⟩ and ⟨0,*⟩ first; ⟨1,0⟩ is the lower partner.
        let d2 = pair_step(&d1, h(1, 0), h(2, 1)).unwrap();
        assert_eq!(d2.len(), 5);
        assert!(pair_step(&d0, h(1, 0), h(2, 1)).is_err());
    }

    fn all_objs(bound: usize) -> Vec<HatObj> {
        (0..=bound).flat_map(|m| (0..=m + 1).map(move |j| h(m, j))).collect()
    }

    fn arb_dc() -> impl Strategy<Value = DcSubcat> {
        proptest::collection::vec(0..all_objs(3).len(), 0..4).prop_map(|ix| {
            let objs = all_objs(3);
            let mut acc = DcSubcat::empty(3, Flavor::Hat);
            for i in ix {
                let g = dc_generated_in(objs[i], 3, Flavor::Hat).unwrap();
                acc = dc_union(&acc, &g).unwrap();
            }
            acc
        })
    }

    proptest! {
        #[test]
        fn lattice_laws(a in arb_dc(), b in arb_dc(), c in arb_dc()) {
            let u = |x: &DcSubcat, y: &DcSubcat| dc_union(x, y).unwrap();
            let i = |x: &DcSubcat, y: &DcSubcat| dc_intersect(x, y).unwrap();
            prop_assert_eq!(u(&a, &b), u(&b, &a));
            prop_assert_eq!(i(&a, &b), i(&b, &a));
            prop_assert_eq!(u(&u(&a, &b), &c), u(&a, &u(&b, &c)));
            prop_assert_eq!(i(&i(&a, &b), &c), i(&a, &i(&b, &c)));
            prop_assert_eq!(u(&a, &i(&a, &b)), a.clone());
            prop_assert_eq!(i(&a, &u(&a, &b)), a.clone());
            prop_assert!(is_downwards_closed(u(&a, &b).objects()));
            prop_assert!(is_downwards_closed(i(&a, &b).objects()));
        }

        #[test]
        fn generated_is_least(ix in 0usize..14, d in arb_dc()) {
            let x = all_objs(3)[ix];
            let g = dc_generated_in(x, 3, Flavor::Hat).unwrap();
            prop_assert!(is_downwards_closed(g.objects()));
            if d.contains(&x) {
                prop_assert!(g.objects().is_subset(d.objects()));
            }
        }

        #[test]
        fn rank_decreases(m in 1usize..5, j in 0usize..6) {
            let j = j.min(m + 1);
            for y in predecessors(h(m, j), m) {
                prop_assert!(y.m < m);
            }
        }
    }
}
