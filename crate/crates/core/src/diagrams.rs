//! Symbolic diagrams: the equality diagram of `B`, the constant diagrams on
//! `A`, natural-transformation fibers, their limits as telescopes, and the
//! canonical cone.

use thiserror::Error;

use crate::cats::{classify_map, CatsError, DcSubcat, Flavor, HatMap, HatObj, IncrMap};
use std::collections::BTreeSet;

use crate::horn::{is_subset_closed, nonempty_subsets, Subset};
use crate::typeexpr::{Name, Signature, Telescope, Term, TypeExpr};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DiagramError {
    #[error("level {0} exceeds bound {1}")]
    OutOfBound(usize, usize),
    #[error("tuple has {got} entries, expected {want}")]
    LengthMismatch { got: usize, want: usize },
    #[error("no nicer form for level {0}")]
    NoNiceForm(i32),
    #[error("subset family is not closed under faces")]
    NotClosed,
    #[error("plain diagram has no object {0}")]
    NotInSpine(HatObj),
    #[error(transparent)]
    Cats(#[from] CatsError),
}

/// Binder name of the matching entry for a subset, e.g. `m01`.
pub fn subset_name(s: &[usize]) -> Name {
    let digits: String = s.iter().map(|i| i.to_string()).collect();
    format!("m{digits}")
}

/// Entry name of the limit component at `⟨m,j⟩`.
pub fn entry_name(x: HatObj) -> Name {
    format!("n{}{}", x.m, x.j)
}

pub fn parse_entry_name(n: &str) -> Option<HatObj> {
    let rest = n.strip_prefix('n')?;
    let mut cs = rest.chars();
    let m = cs.next()?.to_digit(10)? as usize;
    let j = cs.next()?.to_digit(10)? as usize;
    if cs.next().is_some() {
        return None;
    }
    HatObj::new(m, j).ok()
}

pub fn etat_name(k: usize) -> Name {
    format!("etat{k}")
}

/// Proper nonempty subsets of `{0..n}`, by cardinality and then lexicographically.
fn proper_subsets(n: usize) -> Vec<Subset> {
    let all: Vec<usize> = (0..=n).collect();
    nonempty_subsets(&all).into_iter().filter(|s| s.len() <= n).collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EqualityDiagram {
    pub base: Name,
    pub bound: usize,
}

impl EqualityDiagram {
    pub fn new(base: &str, bound: usize) -> Self {
        EqualityDiagram { base: base.to_string(), bound }
    }

    fn check(&self, n: usize) -> Result<(), DiagramError> {
        if n > self.bound {
            Err(DiagramError::OutOfBound(n, self.bound))
        } else {
            Ok(())
        }
    }

    fn b(&self) -> TypeExpr {
        TypeExpr::base(&self.base)
    }

    fn matching_unchecked(&self, n: usize) -> Telescope {
        self.family_unchecked(proper_subsets(n))
    }

    fn family_unchecked(&self, family: Vec<Subset>) -> Telescope {
        let entries = family
            .into_iter()
            .map(|s| {
                let faces: Vec<Term> = proper_subsets(s.len() - 1)
                    .into_iter()
                    .map(|f| Term::Var(subset_name(&f.iter().map(|&i| s[i]).collect::<Vec<_>>())))
                    .collect();
                (subset_name(&s), self.fiber_unchecked(s.len() - 1, Term::tuple(faces)))
            })
            .collect();
        Telescope::new(entries)
    }

    /// One entry per member of a subset-closed family, faces first.
    /// The full family of `{0..n}` gives `M_n` followed by the top fiber.
    pub fn family_telescope(&self, family: &BTreeSet<Subset>) -> Result<Telescope, DiagramError> {
        if let Some(top) = family.iter().map(|s| s.len()).max() {
            self.check(top - 1)?;
        }
        if !is_subset_closed(family) {
            return Err(DiagramError::NotClosed);
        }
        let mut ordered: Vec<Subset> = family.iter().cloned().collect();
        ordered.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        Ok(self.family_unchecked(ordered))
    }

    /// `M_n` as a telescope, one entry per proper face of the n-simplex.
    pub fn matching_telescope(&self, n: usize) -> Result<Telescope, DiagramError> {
        self.check(n)?;
        Ok(self.matching_unchecked(n))
    }

    pub fn matching_type(&self, n: usize) -> Result<TypeExpr, DiagramError> {
        Ok(self.matching_telescope(n)?.to_type())
    }

    fn fiber_unchecked(&self, n: usize, m: Term) -> TypeExpr {
        let (ty, lhs) = if n == 0 {
            (TypeExpr::Unit, Term::Star)
        } else {
            (self.matching_unchecked(n).to_type(), Term::app(Term::Const(etat_name(n)), Term::var("x")))
        };
        TypeExpr::sigma("x", self.b(), TypeExpr::id(ty, lhs, m))
    }

    /// `Σ (x : B). η̃ₙ x = m` over the given point `m` of `M_n`.
    pub fn equality_fiber_at(&self, n: usize, m: Term) -> Result<TypeExpr, DiagramError> {
        self.check(n)?;
        let m = if n == 0 { Term::Star } else { m };
        Ok(self.fiber_unchecked(n, m))
    }

    /// The fiber over the matching variable `m`.
    pub fn equality_fiber(&self, n: usize) -> Result<TypeExpr, DiagramError> {
        self.equality_fiber_at(n, Term::var("m"))
    }

    /// `Σ (m : M_n). fiber`, which should be equivalent to `B`.
    pub fn total_space(&self, n: usize) -> Result<TypeExpr, DiagramError> {
        let fib = self.equality_fiber(n)?;
        Ok(TypeExpr::sigma("m", self.matching_type(n)?, fib))
    }

    /// Unfolding of `η̃ₙ x`: the tuple of `(x , refl (η̃ₖ x))` over all proper faces.
    pub fn eta_unfolding(&self, n: usize, x: &Term) -> Result<Term, DiagramError> {
        self.check(n)?;
        Ok(eta_unfolding(n, x))
    }

    pub fn signature(&self, extra: &[(Name, TypeExpr)]) -> Signature {
        let mut sig = Signature::default();
        for k in 1..=self.bound {
            sig = sig.with(&etat_name(k), TypeExpr::arrow(self.b(), self.matching_unchecked(k).to_type()));
        }
        for (n, t) in extra {
            sig = sig.with(n, t.clone());
        }
        sig
    }
}

pub fn eta_unfolding(n: usize, x: &Term) -> Term {
    if n == 0 {
        return Term::Star;
    }
    Term::tuple(
        proper_subsets(n)
            .into_iter()
            .map(|s| {
                let k = s.len() - 1;
                let inner = if k == 0 { Term::Star } else { Term::app(Term::Const(etat_name(k)), x.clone()) };
                Term::pair(x.clone(), Term::refl(inner))
            })
            .collect(),
    )
}

/// The constant diagram on `A`, extended to the columns of Δ̂+.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrivialDiagram {
    pub base: Name,
    pub basepoint: Name,
}

impl TrivialDiagram {
    pub fn new(base: &str, basepoint: &str) -> Self {
        TrivialDiagram { base: base.to_string(), basepoint: basepoint.to_string() }
    }

    /// Number of `A` factors at `x`.
    pub fn arity(&self, x: HatObj) -> usize {
        x.m + 1 - x.j
    }
}

/// Contravariant action of `f : ⟨k,i⟩ → ⟨m,j⟩` on a tuple at `⟨m,j⟩`.
pub fn trivial_act<T: Clone>(f: &HatMap, tuple: &[T], a0: &T) -> Result<Vec<T>, DiagramError> {
    let want = f.dst.m + 1 - f.dst.j;
    if tuple.len() != want {
        return Err(DiagramError::LengthMismatch { got: tuple.len(), want });
    }
    let padded: Vec<T> = std::iter::repeat_n(a0.clone(), f.dst.j).chain(tuple.iter().cloned()).collect();
    Ok(f.map.values().iter().map(|&v| padded[v].clone()).skip(f.src.j).collect())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NatDiagram {
    pub domain: TrivialDiagram,
    pub codomain: EqualityDiagram,
    pub flavor: Flavor,
}

pub fn arg_names(n: usize) -> Vec<Name> {
    (1..=n).map(|i| format!("a{i}")).collect()
}

impl NatDiagram {
    pub fn new(flavor: Flavor, bound: usize) -> Self {
        NatDiagram {
            domain: TrivialDiagram::new("A", "a0"),
            codomain: EqualityDiagram::new("B", bound),
            flavor,
        }
    }

    pub fn bound(&self) -> usize {
        self.codomain.bound
    }

    fn check(&self, x: HatObj) -> Result<(), DiagramError> {
        if x.m > self.bound() {
            return Err(DiagramError::OutOfBound(x.m, self.bound()));
        }
        if self.flavor == Flavor::Simplex && x.j != 0 {
            return Err(DiagramError::NotInSpine(x));
        }
        Ok(())
    }

    /// `v̄`: the point of `M_m` determined by earlier entries and the arguments at `x`.
    pub fn matching_tuple(&self, x: HatObj, args: &[Term]) -> Result<Term, DiagramError> {
        self.check(x)?;
        let a0 = Term::Const(self.domain.basepoint.clone());
        let mut comps = Vec::new();
        for s in proper_subsets(x.m) {
            let k = s.len() - 1;
            let map = IncrMap::new(k, x.m, s)?;
            let i = classify_map(&map, x.j)?;
            let f = HatMap { src: HatObj::new(k, i)?, dst: x, map };
            let acted = trivial_act(&f, args, &a0)?;
            comps.push(Term::apps(Term::Var(entry_name(f.src)), acted));
        }
        Ok(Term::tuple(comps))
    }

    /// `Π (a¹ … : A). Σ (x : B). η̃ x = v̄`, with no Π when the column leaves no factor.
    pub fn hat_fiber(&self, x: HatObj) -> Result<TypeExpr, DiagramError> {
        let names = arg_names(self.domain.arity(x));
        let args: Vec<Term> = names.iter().map(|n| Term::var(n)).collect();
        let v = self.matching_tuple(x, &args)?;
        let body = self.codomain.equality_fiber_at(x.m, v)?;
        let a = TypeExpr::base(&self.domain.base);
        Ok(names.iter().rev().fold(body, |acc, n| TypeExpr::pi(n, a.clone(), acc)))
    }

    pub fn limit_telescope(&self, d: &DcSubcat) -> Result<Telescope, DiagramError> {
        if d.bound() > self.bound() {
            return Err(DiagramError::OutOfBound(d.bound(), self.bound()));
        }
        let entries = d
            .objects()
            .iter()
            .map(|&x| Ok((entry_name(x), self.hat_fiber(x)?)))
            .collect::<Result<Vec<_>, DiagramError>>()?;
        Ok(Telescope::new(entries))
    }

    pub fn signature(&self) -> Signature {
        self.codomain.signature(&[(self.domain.basepoint.clone(), TypeExpr::base(&self.domain.base))])
    }
}

/// `a₀ : A` and `η̃ₖ : B → M_k` for `1 ≤ k ≤ bound`.
pub fn standard_signature(bound: usize) -> Signature {
    NatDiagram::new(Flavor::Hat, bound).signature()
}

/// `A →ⁿ B` in raw form; empty for `n = -1`.
pub fn raw_tower(n: i32) -> Telescope {
    if n < 0 {
        return Telescope::default();
    }
    let n = n as usize;
    let nat = NatDiagram::new(Flavor::Simplex, n);
    nat.limit_telescope(&DcSubcat::spine(n, n)).expect("spine is downward closed")
}

/// Limit over a downward-closed subcategory of Δ̂+, in raw form.
pub fn limit_telescope(d: &DcSubcat) -> Result<Telescope, DiagramError> {
    NatDiagram::new(Flavor::Hat, d.bound()).limit_telescope(d)
}

fn a() -> TypeExpr {
    TypeExpr::base("A")
}

fn b() -> TypeExpr {
    TypeExpr::base("B")
}

fn ap(f: &str, xs: &[&str]) -> Term {
    Term::apps(Term::var(f), xs.iter().map(|x| Term::var(x)))
}

pub fn const_type(f: &str) -> TypeExpr {
    TypeExpr::pis(&["a1", "a2"], &a(), TypeExpr::id(b(), ap(f, &["a1"]), ap(f, &["a2"])))
}

pub fn coh_type(f: &str, c: &str) -> TypeExpr {
    let lhs = Term::comp(ap(c, &["a1", "a2"]), ap(c, &["a2", "a3"]));
    let amb = TypeExpr::id(b(), ap(f, &["a1"]), ap(f, &["a3"]));
    TypeExpr::pis(&["a1", "a2", "a3"], &a(), TypeExpr::id(amb, lhs, ap(c, &["a1", "a3"])))
}

/// The readable towers for `n ≤ 2`.
pub fn nice_tower(n: i32) -> Result<Telescope, DiagramError> {
    if !(-1..=2).contains(&n) {
        return Err(DiagramError::NoNiceForm(n));
    }
    let mut e = Vec::new();
    if n >= 0 {
        e.push(("f".to_string(), TypeExpr::arrow(a(), b())));
    }
    if n >= 1 {
        e.push(("c".to_string(), const_type("f")));
    }
    if n >= 2 {
        e.push(("d".to_string(), coh_type("f", "c")));
    }
    Ok(Telescope::new(e))
}

/// `γₙ(b)`: one component per level, each `λ z¹ … . (b , refl (η̃ₖ b))`.
/// Components are right-nested like [`Telescope::to_type`].
pub fn canonical_element(n: i32, b: &Term) -> Term {
    let comps = (0..=n.max(-1))
        .map(|k| {
            let k = k as usize;
            let inner = if k == 0 { Term::Star } else { Term::app(Term::Const(etat_name(k)), b.clone()) };
            let body = Term::pair(b.clone(), Term::refl(inner));
            (1..=k + 1).rev().fold(body, |acc, i| Term::lam(&format!("z{i}"), acc))
        })
        .collect();
    Term::tuple(comps)
}

/// Beta and projection reduction, enough for the cone unfolding.
pub fn normalize(t: &Term) -> Term {
    use crate::typeexpr::subst_tm;
    match t {
        Term::App(f, x) => {
            let f = normalize(f);
            let x = normalize(x);
            match f {
                Term::Lam(y, body) => normalize(&subst_tm(&body, &y, &x)),
                f => Term::app(f, x),
            }
        }
        Term::Fst(p) => match normalize(p) {
            Term::Pair(a, _) => *a,
            p => Term::Fst(Box::new(p)),
        },
        Term::Snd(p) => match normalize(p) {
            Term::Pair(_, b) => *b,
            p => Term::Snd(Box::new(p)),
        },
        Term::Lam(x, b) => Term::lam(x, normalize(b)),
        Term::Pair(a, b) => Term::pair(normalize(a), normalize(b)),
        Term::Refl(a) => Term::refl(normalize(a)),
        Term::PathComp(p, q) => Term::comp(normalize(p), normalize(q)),
        Term::Var(_) | Term::Const(_) | Term::Star => t.clone(),
    }
}

/// `v̄(γ_{n−1}(b), x̄)` after unfolding, to compare with `η̃ₙ b`.
pub fn cone_matching(n: usize, b: &Term) -> Term {
    let nat = NatDiagram::new(Flavor::Simplex, n);
    let x = HatObj { m: n, j: 0 };
    let args: Vec<Term> = arg_names(n + 1).iter().map(|s| Term::var(s)).collect();
    let mut v = nat.matching_tuple(x, &args).expect("level within bound");
    let gamma = canonical_element(n as i32, b);
    let mut comps = Vec::new();
    let mut cur = gamma;
    for _ in 0..n {
        match cur {
            Term::Pair(h, t) => {
                comps.push(*h);
                cur = *t;
            }
            _ => unreachable!("canonical element has n+1 components"),
        }
    }
    for (k, c) in comps.iter().enumerate() {
        v = crate::typeexpr::subst_tm(&v, &entry_name(HatObj { m: k, j: 0 }), c);
    }
    normalize(&v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cats::{dc_generated_in, dc_union, enumerate_incr_maps, hat_hom, SimplexObj};
    use crate::typeexpr::{alpha_eq_tel, alpha_eq_ty, scope_check};
    use proptest::prelude::*;

    fn eq(bound: usize) -> EqualityDiagram {
        EqualityDiagram::new("B", bound)
    }

    #[test]
    fn matching_counts() {
        let e = eq(4);
        for n in 0..=4 {
            let m = e.matching_telescope(n).unwrap();
            assert_eq!(m.len(), (1 << (n + 1)) - 2);
            assert_eq!(scope_check(&m), Ok(()));
        }
        assert!(e.matching_telescope(0).unwrap().is_empty());
        assert!(e.matching_telescope(5).is_err());
        let m1 = e.matching_telescope(1).unwrap();
        assert_eq!(m1.names(), vec!["m0", "m1"]);
        for (_, t) in &m1.entries {
            assert_eq!(*t, e.equality_fiber(0).unwrap());
        }
        let m2 = e.matching_telescope(2).unwrap();
        assert_eq!(m2.names(), vec!["m0", "m1", "m2", "m01", "m02", "m12"]);
    }

    #[test]
    fn face_entry_shape() {
        let e = eq(2);
        let m2 = e.matching_telescope(2).unwrap();
        let (_, t) = &m2.entries[4];
        let want = TypeExpr::sigma(
            "x",
            b(),
            TypeExpr::id(
                e.matching_type(1).unwrap(),
                Term::app(Term::cnst("etat1"), Term::var("x")),
                Term::pair(Term::var("m0"), Term::var("m2")),
            ),
        );
        assert_eq!(*t, want);
    }

    #[test]
    fn fiber_examples() {
        let e = eq(2);
        let f0 = e.equality_fiber(0).unwrap();
        assert_eq!(f0, TypeExpr::sigma("x", b(), TypeExpr::id(TypeExpr::Unit, Term::Star, Term::Star)));
        let f1 = e.equality_fiber(1).unwrap();
        let allowed = ["m", "x"];
        assert!(f1.free_vars().iter().all(|v| allowed.contains(&v.as_str())));
        assert!(e.equality_fiber(3).is_err());
    }

    fn hm(src: (usize, usize), dst: (usize, usize), vals: &[usize]) -> HatMap {
        HatMap {
            src: HatObj::new(src.0, src.1).unwrap(),
            dst: HatObj::new(dst.0, dst.1).unwrap(),
            map: IncrMap::new(src.0, dst.0, vals.to_vec()).unwrap(),
        }
    }

    #[test]
    fn trivial_act_examples() {
        let a0 = "a0".to_string();
        let t = vec!["a".to_string()];
        assert_eq!(trivial_act(&hm((0, 0), (1, 1), &[1]), &t, &a0).unwrap(), vec!["a".to_string()]);
        assert!(trivial_act(&hm((0, 1), (1, 1), &[0]), &t, &a0).unwrap().is_empty());
        let id = HatMap::identity(HatObj::new(2, 0).unwrap());
        let t3: Vec<String> = ["p", "q", "r"].iter().map(|s| s.to_string()).collect();
        assert_eq!(trivial_act(&id, &t3, &a0).unwrap(), t3);
        assert!(trivial_act(&id, &t, &a0).is_err());
    }

    // Exhaustive over composable pairs with m ≤ 3.
    #[test]
    fn trivial_act_functorial() {
        let objs: Vec<HatObj> = (0..=3).flat_map(|m| (0..=m + 1).map(move |j| HatObj { m, j })).collect();
        let a0 = 0usize;
        let mut checked = 0;
        for &x in &objs {
            for &y in &objs {
                for f in hat_hom(x, y) {
                    for &z in &objs {
                        for g in hat_hom(y, z) {
                            let t: Vec<usize> = (1..=z.m + 1 - z.j).map(|i| 10 + i).collect();
                            let fg = f.then(&g).unwrap();
                            let once = trivial_act(&fg, &t, &a0).unwrap();
                            let twice = trivial_act(&f, &trivial_act(&g, &t, &a0).unwrap(), &a0).unwrap();
                            assert_eq!(once, twice);
                            checked += 1;
                        }
                    }
                }
            }
        }
        assert!(checked > 100);
    }

    #[test]
    fn tower_counts() {
        assert!(raw_tower(-1).is_empty());
        for n in 0..=4 {
            let t = raw_tower(n);
            assert_eq!(t.len(), n as usize + 1);
            assert_eq!(scope_check(&t), Ok(()));
        }
        assert_eq!(raw_tower(1).names(), vec!["n00", "n10"]);
        let t0 = raw_tower(0);
        let want = TypeExpr::pi(
            "a1",
            a(),
            TypeExpr::sigma("x", b(), TypeExpr::id(TypeExpr::Unit, Term::Star, Term::Star)),
        );
        assert_eq!(t0.entries[0].1, want);
    }

    #[test]
    fn raw_level_one_matching() {
        let t = raw_tower(1);
        let want_m = Term::pair(
            Term::app(Term::var("n00"), Term::var("a1")),
            Term::app(Term::var("n00"), Term::var("a2")),
        );
        match &t.entries[1].1 {
            TypeExpr::Pi(_, _, inner) => match &**inner {
                TypeExpr::Pi(_, _, fib) => match &**fib {
                    TypeExpr::Sigma(_, _, id) => match &**id {
                        TypeExpr::Id(_, _, m) => assert_eq!(*m, want_m),
                        o => panic!("{o:?}"),
                    },
                    o => panic!("{o:?}"),
                },
                o => panic!("{o:?}"),
            },
            o => panic!("{o:?}"),
        }
    }

    #[test]
    fn nice_forms() {
        let sig = Signature::default();
        let lines = crate::typeexpr::telescope_lines(&nice_tower(2).unwrap(), crate::typeexpr::Format::Unicode, &sig);
        assert_eq!(lines[0], "f : A → B");
        assert_eq!(lines[1], "c : Π (a¹ a² : A). f a¹ = f a²");
        assert_eq!(lines[2], "d : Π (a¹ a² a³ : A). c a¹ a² · c a² a³ = c a¹ a³");
        assert_eq!(nice_tower(0).unwrap().len(), 1);
        assert!(nice_tower(3).is_err());
    }

    #[test]
    fn hat_fiber_examples() {
        let nat = NatDiagram::new(Flavor::Hat, 3);
        let e = eq(3);
        // ⟨0,1⟩ has no A factor.
        assert_eq!(nat.hat_fiber(HatObj { m: 0, j: 1 }).unwrap(), e.equality_fiber(0).unwrap());
        // ⟨1,2⟩ sits over the pair (f₁ , f a₀).
        let want = e
            .equality_fiber_at(1, Term::pair(Term::var("n01"), Term::app(Term::var("n00"), Term::cnst("a0"))))
            .unwrap();
        assert_eq!(nat.hat_fiber(HatObj { m: 1, j: 2 }).unwrap(), want);
        // ⟨1,1⟩: one A factor, over (f₁ , f a).
        let want = TypeExpr::pi(
            "a1",
            a(),
            e.equality_fiber_at(1, Term::pair(Term::var("n01"), Term::app(Term::var("n00"), Term::var("a1"))))
                .unwrap(),
        );
        assert_eq!(nat.hat_fiber(HatObj { m: 1, j: 1 }).unwrap(), want);
        assert!(nat.hat_fiber(HatObj { m: 4, j: 0 }).is_err());
        let plain = NatDiagram::new(Flavor::Simplex, 3);
        assert!(plain.hat_fiber(HatObj { m: 1, j: 1 }).is_err());
    }

    #[test]
    fn limit_examples() {
        let d = dc_generated_in(HatObj { m: 0, j: 1 }, 2, Flavor::Hat).unwrap();
        assert_eq!(limit_telescope(&d).unwrap().names(), vec!["n01"]);
        let d = dc_generated_in(HatObj { m: 1, j: 1 }, 2, Flavor::Hat).unwrap();
        let t = limit_telescope(&d).unwrap();
        assert_eq!(t.names(), vec!["n00", "n01", "n11"]);
        assert_eq!(scope_check(&t), Ok(()));
        for n in 0..=3 {
            let sp = DcSubcat::spine(n, n);
            assert!(alpha_eq_tel(&limit_telescope(&sp).unwrap(), &raw_tower(n as i32)));
        }
    }

    // Oracle: the matching tuple's components match a direct enumeration of faces.
    #[test]
    fn matching_tuple_faces() {
        let nat = NatDiagram::new(Flavor::Hat, 3);
        for m in 0..=3usize {
            for j in 0..=m + 1 {
                let x = HatObj { m, j };
                let args: Vec<Term> = arg_names(m + 1 - j).iter().map(|s| Term::var(s)).collect();
                let v = nat.matching_tuple(x, &args).unwrap();
                let mut faces = 0;
                for k in 0..m {
                    faces += enumerate_incr_maps(SimplexObj { n: k }, SimplexObj { n: m }).len();
                }
                let mut count = 0;
                let mut cur = &v;
                while let Term::Pair(h, t) = cur {
                    count += 1;
                    assert!(matches!(h.spine().0, Term::Var(_)));
                    cur = t;
                }
                if faces > 0 {
                    count += 1;
                }
                assert_eq!(count, faces);
            }
        }
    }

    #[test]
    fn canonical_examples() {
        let b = Term::var("b");
        let c0 = canonical_element(0, &b);
        assert_eq!(c0, Term::lam("z1", Term::pair(b.clone(), Term::refl(Term::Star))));
        let c1 = canonical_element(1, &b);
        match &c1 {
            Term::Pair(h, t) => {
                assert_eq!(**h, c0);
                assert!(matches!(**t, Term::Lam(..)));
            }
            o => panic!("{o:?}"),
        }
        for n in 0..=4 {
            let t = canonical_element(n, &Term::cnst("b"));
            assert!(t.free_vars().is_empty());
        }
    }

    #[test]
    fn cone_unfolds_to_eta() {
        let b = Term::var("b");
        for n in 1..=4usize {
            assert_eq!(cone_matching(n, &b), eta_unfolding(n, &b), "level {n}");
        }
    }

    #[test]
    fn signature_contents() {
        let sig = standard_signature(2);
        assert_eq!(sig.get("a0"), Some(&a()));
        assert!(sig.get("etat1").is_some() && sig.get("etat2").is_some() && sig.get("etat3").is_none());
    }

    fn arb_dc() -> impl Strategy<Value = DcSubcat> {
        prop::collection::vec((0usize..=3, 0usize..=4), 1..4).prop_map(|xs| {
            let mut d = DcSubcat::empty(3, Flavor::Hat);
            for (m, j) in xs {
                let x = HatObj { m, j: j % (m + 2) };
                d = dc_union(&d, &dc_generated_in(x, 3, Flavor::Hat).unwrap()).unwrap();
            }
            d
        })
    }

    proptest! {
        #[test]
        fn limit_restriction(d1 in arb_dc(), d2 in arb_dc()) {
            let u = dc_union(&d1, &d2).unwrap();
            let tu = limit_telescope(&u).unwrap();
            let t1 = limit_telescope(&d1).unwrap();
            let t2 = limit_telescope(&d2).unwrap();
            prop_assert_eq!(tu.len(), u.len());
            let mut names: Vec<&str> = t1.names();
            names.extend(t2.names());
            names.sort();
            names.dedup();
            prop_assert_eq!(tu.names().len(), names.len());
            for t in [&t1, &t2] {
                for (n, ty) in &t.entries {
                    let i = tu.index_of(n).unwrap();
                    prop_assert!(alpha_eq_ty(&tu.entries[i].1, ty));
                }
            }
            prop_assert_eq!(scope_check(&tu), Ok(()));
        }
    }
}
