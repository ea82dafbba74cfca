//! Syntax of the type-theory fragment: 1, Σ, Π, Id, ∥−∥ and base types,
//! terms, and dependency-ordered telescopes.

mod parse;
mod pretty;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

pub use parse::{parse_telescope_lines, parse_term, parse_type, ParseError};
pub use pretty::{pretty_telescope, pretty_term, pretty_type, pretty_type_in, telescope_lines, Format};

pub type Name = String;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TypeExpr {
    Unit,
    Base(Name),
    Sigma(Name, Box<TypeExpr>, Box<TypeExpr>),
    Pi(Name, Box<TypeExpr>, Box<TypeExpr>),
    Id(Box<TypeExpr>, Term, Term),
    Trunc(Box<TypeExpr>),
    Arrow(Box<TypeExpr>, Box<TypeExpr>),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(Name),
    App(Box<Term>, Box<Term>),
    Lam(Name, Box<Term>),
    Pair(Box<Term>, Box<Term>),
    Fst(Box<Term>),
    Snd(Box<Term>),
    Refl(Box<Term>),
    PathComp(Box<Term>, Box<Term>),
    Const(Name),
    Star,
}

impl TypeExpr {
    pub fn base(n: &str) -> Self {
        TypeExpr::Base(n.to_string())
    }

    pub fn sigma(x: &str, d: TypeExpr, c: TypeExpr) -> Self {
        TypeExpr::Sigma(x.to_string(), Box::new(d), Box::new(c))
    }

    pub fn pi(x: &str, d: TypeExpr, c: TypeExpr) -> Self {
        TypeExpr::Pi(x.to_string(), Box::new(d), Box::new(c))
    }

    /// `Π (x₁ … xₙ : d). c`.
    pub fn pis(xs: &[&str], d: &TypeExpr, c: TypeExpr) -> Self {
        xs.iter().rev().fold(c, |acc, x| TypeExpr::pi(x, d.clone(), acc))
    }

    pub fn arrow(d: TypeExpr, c: TypeExpr) -> Self {
        TypeExpr::Arrow(Box::new(d), Box::new(c))
    }

    pub fn id(t: TypeExpr, a: Term, b: Term) -> Self {
        TypeExpr::Id(Box::new(t), a, b)
    }

    pub fn trunc(t: TypeExpr) -> Self {
        TypeExpr::Trunc(Box::new(t))
    }

    pub fn free_vars(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        fv_ty(self, &mut Vec::new(), &mut out);
        out
    }

    pub fn mentions(&self, x: &str) -> bool {
        self.free_vars().contains(x)
    }

    /// Arrow sugar expanded to a Π with an unused binder.
    pub fn desugar(&self) -> TypeExpr {
        match self {
            TypeExpr::Arrow(d, c) => {
                let avoid = c.free_vars();
                TypeExpr::pi(&fresh("_", &avoid), (**d).clone(), (**c).clone())
            }
            other => other.clone(),
        }
    }
}

impl Term {
    pub fn var(x: &str) -> Self {
        Term::Var(x.to_string())
    }

    pub fn cnst(x: &str) -> Self {
        Term::Const(x.to_string())
    }

    pub fn app(f: Term, a: Term) -> Self {
        Term::App(Box::new(f), Box::new(a))
    }

    pub fn apps(f: Term, args: impl IntoIterator<Item = Term>) -> Self {
        args.into_iter().fold(f, Term::app)
    }

    pub fn lam(x: &str, b: Term) -> Self {
        Term::Lam(x.to_string(), Box::new(b))
    }

    pub fn pair(a: Term, b: Term) -> Self {
        Term::Pair(Box::new(a), Box::new(b))
    }

    /// Right-nested tuple; `⋆` when empty.
    pub fn tuple(xs: Vec<Term>) -> Self {
        let mut it = xs.into_iter().rev();
        match it.next() {
            None => Term::Star,
            Some(last) => it.fold(last, |acc, x| Term::pair(x, acc)),
        }
    }

    pub fn comp(p: Term, q: Term) -> Self {
        Term::PathComp(Box::new(p), Box::new(q))
    }

    pub fn refl(a: Term) -> Self {
        Term::Refl(Box::new(a))
    }

    pub fn free_vars(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        fv_tm(self, &mut Vec::new(), &mut out);
        out
    }

    pub fn mentions(&self, x: &str) -> bool {
        self.free_vars().contains(x)
    }

    /// Head and arguments of an application spine.
    pub fn spine(&self) -> (&Term, Vec<&Term>) {
        let mut args = Vec::new();
        let mut cur = self;
        while let Term::App(f, a) = cur {
            args.push(&**a);
            cur = f;
        }
        args.reverse();
        (cur, args)
    }
}

fn fv_ty(e: &TypeExpr, bound: &mut Vec<Name>, out: &mut BTreeSet<Name>) {
    match e {
        TypeExpr::Unit | TypeExpr::Base(_) => {}
        TypeExpr::Sigma(x, d, c) | TypeExpr::Pi(x, d, c) => {
            fv_ty(d, bound, out);
            bound.push(x.clone());
            fv_ty(c, bound, out);
            bound.pop();
        }
        TypeExpr::Id(t, a, b) => {
            fv_ty(t, bound, out);
            fv_tm(a, bound, out);
            fv_tm(b, bound, out);
        }
        TypeExpr::Trunc(t) => fv_ty(t, bound, out),
        TypeExpr::Arrow(d, c) => {
            fv_ty(d, bound, out);
            fv_ty(c, bound, out);
        }
    }
}

fn fv_tm(t: &Term, bound: &mut Vec<Name>, out: &mut BTreeSet<Name>) {
    match t {
        Term::Var(x) => {
            if !bound.contains(x) {
                out.insert(x.clone());
            }
        }
        Term::App(a, b) | Term::Pair(a, b) | Term::PathComp(a, b) => {
            fv_tm(a, bound, out);
            fv_tm(b, bound, out);
        }
        Term::Lam(x, b) => {
            bound.push(x.clone());
            fv_tm(b, bound, out);
            bound.pop();
        }
        Term::Fst(a) | Term::Snd(a) | Term::Refl(a) => fv_tm(a, bound, out),
        Term::Const(_) | Term::Star => {}
    }
}

/// `base`, or `base_1`, `base_2`, … avoiding `avoid`.
pub fn fresh(base: &str, avoid: &BTreeSet<Name>) -> Name {
    if !avoid.contains(base) {
        return base.to_string();
    }
    (1..).map(|i| format!("{base}_{i}")).find(|n| !avoid.contains(n)).expect("infinite supply")
}

fn rebind(x: &Name, body_fv: BTreeSet<Name>, name: &str, r: &Term) -> Option<Name> {
    if r.mentions(x) && body_fv.contains(name) {
        let mut avoid = body_fv;
        avoid.extend(r.free_vars());
        avoid.insert(name.to_string());
        Some(fresh(x, &avoid))
    } else {
        None
    }
}

/// Capture-avoiding substitution of `r` for the variable `name`.
pub fn subst_ty(e: &TypeExpr, name: &str, r: &Term) -> TypeExpr {
    match e {
        TypeExpr::Unit | TypeExpr::Base(_) => e.clone(),
        TypeExpr::Sigma(x, d, c) | TypeExpr::Pi(x, d, c) => {
            let d2 = subst_ty(d, name, r);
            let c2 = if x == name {
                (**c).clone()
            } else if let Some(y) = rebind(x, c.free_vars(), name, r) {
                let renamed = subst_ty(c, x, &Term::Var(y.clone()));
                let body = subst_ty(&renamed, name, r);
                return rebuild_binder(e, y, d2, body);
            } else {
                subst_ty(c, name, r)
            };
            rebuild_binder(e, x.clone(), d2, c2)
        }
        TypeExpr::Id(t, a, b) => TypeExpr::Id(Box::new(subst_ty(t, name, r)), subst_tm(a, name, r), subst_tm(b, name, r)),
        TypeExpr::Trunc(t) => TypeExpr::trunc(subst_ty(t, name, r)),
        TypeExpr::Arrow(d, c) => TypeExpr::arrow(subst_ty(d, name, r), subst_ty(c, name, r)),
    }
}

fn rebuild_binder(e: &TypeExpr, x: Name, d: TypeExpr, c: TypeExpr) -> TypeExpr {
    match e {
        TypeExpr::Sigma(..) => TypeExpr::Sigma(x, Box::new(d), Box::new(c)),
        _ => TypeExpr::Pi(x, Box::new(d), Box::new(c)),
    }
}

pub fn subst_tm(t: &Term, name: &str, r: &Term) -> Term {
    match t {
        Term::Var(x) => {
            if x == name {
                r.clone()
            } else {
                t.clone()
            }
        }
        Term::App(a, b) => Term::app(subst_tm(a, name, r), subst_tm(b, name, r)),
        Term::Pair(a, b) => Term::pair(subst_tm(a, name, r), subst_tm(b, name, r)),
        Term::PathComp(a, b) => Term::comp(subst_tm(a, name, r), subst_tm(b, name, r)),
        Term::Fst(a) => Term::Fst(Box::new(subst_tm(a, name, r))),
        Term::Snd(a) => Term::Snd(Box::new(subst_tm(a, name, r))),
        Term::Refl(a) => Term::refl(subst_tm(a, name, r)),
        Term::Lam(x, b) => {
            if x == name {
                t.clone()
            } else if let Some(y) = rebind(x, b.free_vars(), name, r) {
                let renamed = subst_tm(b, x, &Term::Var(y.clone()));
                Term::Lam(y, Box::new(subst_tm(&renamed, name, r)))
            } else {
                Term::Lam(x.clone(), Box::new(subst_tm(b, name, r)))
            }
        }
        Term::Const(_) | Term::Star => t.clone(),
    }
}

/// Locally nameless form: bound variables become indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum DTy {
    Unit,
    Base(Name),
    Sigma(Box<DTy>, Box<DTy>),
    Pi(Box<DTy>, Box<DTy>),
    Id(Box<DTy>, DTm, DTm),
    Trunc(Box<DTy>),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum DTm {
    Bound(usize),
    Free(Name),
    App(Box<DTm>, Box<DTm>),
    Lam(Box<DTm>),
    Pair(Box<DTm>, Box<DTm>),
    Fst(Box<DTm>),
    Snd(Box<DTm>),
    Refl(Box<DTm>),
    Comp(Box<DTm>, Box<DTm>),
    Const(Name),
    Star,
}

// Arrow binders are pushed as `None`, which no variable can resolve to.
fn db_ty(e: &TypeExpr, env: &mut Vec<Option<Name>>) -> DTy {
    match e {
        TypeExpr::Unit => DTy::Unit,
        TypeExpr::Base(b) => DTy::Base(b.clone()),
        TypeExpr::Sigma(x, d, c) | TypeExpr::Pi(x, d, c) => {
            let d2 = db_ty(d, env);
            env.push(Some(x.clone()));
            let c2 = db_ty(c, env);
            env.pop();
            if matches!(e, TypeExpr::Sigma(..)) {
                DTy::Sigma(Box::new(d2), Box::new(c2))
            } else {
                DTy::Pi(Box::new(d2), Box::new(c2))
            }
        }
        TypeExpr::Arrow(d, c) => {
            let d2 = db_ty(d, env);
            env.push(None);
            let c2 = db_ty(c, env);
            env.pop();
            DTy::Pi(Box::new(d2), Box::new(c2))
        }
        TypeExpr::Id(t, a, b) => DTy::Id(Box::new(db_ty(t, env)), db_tm(a, env), db_tm(b, env)),
        TypeExpr::Trunc(t) => DTy::Trunc(Box::new(db_ty(t, env))),
    }
}

fn db_tm(t: &Term, env: &mut Vec<Option<Name>>) -> DTm {
    match t {
        Term::Var(x) => match env.iter().rev().position(|b| b.as_deref() == Some(x.as_str())) {
            Some(i) => DTm::Bound(i),
            None => DTm::Free(x.clone()),
        },
        Term::App(a, b) => DTm::App(Box::new(db_tm(a, env)), Box::new(db_tm(b, env))),
        Term::Pair(a, b) => DTm::Pair(Box::new(db_tm(a, env)), Box::new(db_tm(b, env))),
        Term::PathComp(a, b) => DTm::Comp(Box::new(db_tm(a, env)), Box::new(db_tm(b, env))),
        Term::Fst(a) => DTm::Fst(Box::new(db_tm(a, env))),
        Term::Snd(a) => DTm::Snd(Box::new(db_tm(a, env))),
        Term::Refl(a) => DTm::Refl(Box::new(db_tm(a, env))),
        Term::Lam(x, b) => {
            env.push(Some(x.clone()));
            let r = DTm::Lam(Box::new(db_tm(b, env)));
            env.pop();
            r
        }
        Term::Const(c) => DTm::Const(c.clone()),
        Term::Star => DTm::Star,
    }
}

pub fn alpha_eq_ty(x: &TypeExpr, y: &TypeExpr) -> bool {
    db_ty(x, &mut Vec::new()) == db_ty(y, &mut Vec::new())
}

pub fn alpha_eq_tm(x: &Term, y: &Term) -> bool {
    db_tm(x, &mut Vec::new()) == db_tm(y, &mut Vec::new())
}

/// Equal up to renaming of entries and binders.
pub fn alpha_eq_tel(x: &Telescope, y: &Telescope) -> bool {
    if x.len() != y.len() {
        return false;
    }
    let (mut ex, mut ey) = (Vec::new(), Vec::new());
    for ((nx, tx), (ny, ty)) in x.entries.iter().zip(&y.entries) {
        if db_ty(tx, &mut ex) != db_ty(ty, &mut ey) {
            return false;
        }
        ex.push(Some(nx.clone()));
        ey.push(Some(ny.clone()));
    }
    true
}

/// An ordered list of named components, i.e. a nested Σ-type.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Telescope {
    pub entries: Vec<(Name, TypeExpr)>,
}

impl Telescope {
    pub fn new(entries: Vec<(Name, TypeExpr)>) -> Self {
        Telescope { entries }
    }

    pub fn from_pairs(entries: &[(&str, TypeExpr)]) -> Self {
        Telescope { entries: entries.iter().map(|(n, t)| (n.to_string(), t.clone())).collect() }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn names(&self) -> Vec<&str> {
        self.entries.iter().map(|(n, _)| n.as_str()).collect()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.entries.iter().position(|(n, _)| n == name)
    }

    /// The nested Σ-type; `𝟏` when empty.
    pub fn to_type(&self) -> TypeExpr {
        let mut it = self.entries.iter().rev();
        match it.next() {
            None => TypeExpr::Unit,
            Some((_, last)) => it.fold(last.clone(), |acc, (n, t)| TypeExpr::sigma(n, t.clone(), acc)),
        }
    }

    /// Whether any entry from position `from` on mentions `name`.
    pub fn used_after(&self, from: usize, name: &str) -> bool {
        self.entries.iter().skip(from).any(|(_, t)| t.mentions(name))
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ScopeError {
    #[error("entry {index} (`{entry}`) mentions unbound variable `{var}`")]
    Unbound { index: usize, entry: Name, var: Name },
    #[error("entry {index} reuses the name `{entry}`")]
    Duplicate { index: usize, entry: Name },
}

pub fn scope_check(t: &Telescope) -> Result<(), ScopeError> {
    let mut seen: BTreeSet<&str> = BTreeSet::new();
    for (index, (n, ty)) in t.entries.iter().enumerate() {
        if let Some(var) = ty.free_vars().into_iter().find(|v| !seen.contains(v.as_str())) {
            return Err(ScopeError::Unbound { index, entry: n.clone(), var });
        }
        if !seen.insert(n) {
            return Err(ScopeError::Duplicate { index, entry: n.clone() });
        }
    }
    Ok(())
}

/// Scope check of a term against a telescope prefix.
pub fn term_in_scope(t: &Term, tel: &Telescope, upto: usize) -> Result<(), Name> {
    let names: BTreeSet<&str> = tel.entries[..upto].iter().map(|(n, _)| n.as_str()).collect();
    match t.free_vars().into_iter().find(|v| !names.contains(v.as_str())) {
        Some(v) => Err(v),
        None => Ok(()),
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ReorderError {
    #[error("not a permutation of {0} entries")]
    NotPermutation(usize),
    #[error("moving `{moved}` breaks its dependency on `{depends_on}`")]
    Dependency { moved: Name, depends_on: Name },
}

/// Entry `i` of the result is entry `perm[i]` of `t`.
pub fn reorder(t: &Telescope, perm: &[usize]) -> Result<Telescope, ReorderError> {
    let n = t.len();
    let distinct: BTreeSet<usize> = perm.iter().copied().collect();
    if perm.len() != n || distinct.len() != n || perm.iter().any(|&p| p >= n) {
        return Err(ReorderError::NotPermutation(n));
    }
    let mut placed: BTreeSet<&str> = BTreeSet::new();
    let all: BTreeSet<&str> = t.entries.iter().map(|(n, _)| n.as_str()).collect();
    for &p in perm {
        let (name, ty) = &t.entries[p];
        for v in ty.free_vars() {
            if all.contains(v.as_str()) && !placed.contains(v.as_str()) {
                return Err(ReorderError::Dependency { moved: name.clone(), depends_on: v });
            }
        }
        placed.insert(name);
    }
    Ok(Telescope { entries: perm.iter().map(|&p| t.entries[p].clone()).collect() })
}

pub fn invert_perm(perm: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; perm.len()];
    for (i, &p) in perm.iter().enumerate() {
        inv[p] = i;
    }
    inv
}

/// Types of named constants.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Signature {
    pub consts: BTreeMap<Name, TypeExpr>,
}

impl Signature {
    pub fn with(mut self, name: &str, ty: TypeExpr) -> Self {
        self.consts.insert(name.to_string(), ty);
        self
    }

    pub fn get(&self, name: &str) -> Option<&TypeExpr> {
        self.consts.get(name)
    }
}

/// Best-effort type synthesis, used to elide the ambient type of `=`.
pub fn synth(t: &Term, ctx: &[(Name, TypeExpr)], sig: &Signature) -> Option<TypeExpr> {
    match t {
        Term::Var(x) => ctx.iter().rev().find(|(n, _)| n == x).map(|(_, ty)| ty.clone()),
        Term::Const(c) => sig.get(c).cloned(),
        Term::Star => Some(TypeExpr::Unit),
        Term::App(f, a) => match synth(f, ctx, sig)? {
            TypeExpr::Pi(y, _, c) => Some(subst_ty(&c, &y, a)),
            TypeExpr::Arrow(_, c) => Some(*c),
            _ => None,
        },
        Term::Fst(p) => match synth(p, ctx, sig)? {
            TypeExpr::Sigma(_, d, _) => Some(*d),
            _ => None,
        },
        Term::Snd(p) => match synth(p, ctx, sig)? {
            TypeExpr::Sigma(y, _, c) => Some(subst_ty(&c, &y, &Term::Fst(p.clone()))),
            _ => None,
        },
        Term::Refl(a) => {
            let ty = synth(a, ctx, sig)?;
            Some(TypeExpr::id(ty, (**a).clone(), (**a).clone()))
        }
        Term::PathComp(p, q) => match (synth(p, ctx, sig)?, synth(q, ctx, sig)?) {
            (TypeExpr::Id(t, x, _), TypeExpr::Id(_, _, z)) => Some(TypeExpr::Id(t, x, z)),
            _ => None,
        },
        Term::Lam(..) | Term::Pair(..) => None,
    }
}

/// Internal identifier and its unicode rendering.
pub const TRANSLITERATION: &[(&str, &str)] = &[
    ("a0", "a₀"),
    ("a1", "a¹"),
    ("a2", "a²"),
    ("a3", "a³"),
    ("a4", "a⁴"),
    ("a5", "a⁵"),
    ("b1", "b¹"),
    ("b2", "b²"),
    ("b3", "b³"),
    ("f1", "f₁"),
    ("c1", "c₁"),
    ("c2", "c₂"),
    ("d1", "d₁"),
    ("d2", "d₂"),
    ("d3", "d₃"),
    ("etat1", "η̃₁"),
    ("etat2", "η̃₂"),
    ("etat3", "η̃₃"),
    ("etat4", "η̃₄"),
    ("etat5", "η̃₅"),
];

pub fn display_name(n: &str) -> &str {
    TRANSLITERATION.iter().find(|(i, _)| *i == n).map_or(n, |(_, d)| d)
}

pub fn internal_name(d: &str) -> String {
    TRANSLITERATION.iter().find(|(_, x)| *x == d).map_or(d, |(i, _)| i).to_string()
}

impl fmt::Display for TypeExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&pretty_type(self, Format::Unicode))
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&pretty_term(self, Format::Unicode))
    }
}
