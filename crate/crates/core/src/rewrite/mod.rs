//! Equivalence-preserving rewrites of telescopes: adding and removing
//! contractible components, distributing Π over Σ, reordering, absorbing
//! truncated exponents, and growing limits along hat pairs.

mod builtin;

#[cfg(test)]
mod tests;

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::cats::{pair_step, DcSubcat, Flavor, HatObj};
use crate::diagrams::{limit_telescope, parse_entry_name};
use crate::finite_model::{equiv_check, eval_telescope, h_level, FinGroupoid, ModelEnv, ModelError};
use crate::horn::fiber_level;
use crate::typeexpr::{alpha_eq_tel, alpha_eq_ty, fresh, reorder, subst_ty, Name, ReorderError, Telescope, Term, TypeExpr};

pub use builtin::{builtin_chain, BUILTINS};

/// Declared truncation levels of base types.
pub type LevelEnv = BTreeMap<Name, i32>;

/// Witness constant standing for an inhabitant left to the model check.
pub const DERIVE: &str = "derive";

/// `derive x y …`: the listed components suffice to build an inhabitant.
pub fn derive(uses: &[&str]) -> Term {
    Term::apps(Term::cnst(DERIVE), uses.iter().map(|u| Term::var(u)))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SingletonForm {
    /// One component `name : Π prefix. Σ (b : T). P`.
    Family(Name),
    /// Two components `b : T` and `name : P`; the prefix must be empty.
    Paired(Name),
}

/// `Σ (b : T). P` where `P` is `b = x`, `x = b`, or the same with `b`
/// pre- or post-composed by a path not involving `b`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Singleton {
    pub form: SingletonForm,
    pub prefix: Vec<(Name, TypeExpr)>,
    pub carrier: Name,
    pub carrier_ty: TypeExpr,
    pub path_ty: TypeExpr,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AbsorbDir {
    /// `∥S∥ → Π (a : S). C` to `Π (a : S). C`; later uses of the
    /// component are reparametrized through a constant λ.
    Collapse,
    /// `(λ y. t) x` to `t` when `x` ranges over a truncation.
    PathRewrite,
    /// As `Collapse`, for a component nothing later depends on.
    Regroup,
}

impl AbsorbDir {
    pub fn name(self) -> &'static str {
        match self {
            AbsorbDir::Collapse => "collapse",
            AbsorbDir::PathRewrite => "path-rewrite",
            AbsorbDir::Regroup => "regroup",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "collapse" => Some(AbsorbDir::Collapse),
            "path-rewrite" => Some(AbsorbDir::PathRewrite),
            "regroup" => Some(AbsorbDir::Regroup),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EquivStep {
    AddSingleton { at: usize, singleton: Singleton },
    RemoveSingleton { at: usize, paired: bool },
    Distribute { at: usize, names: (Name, Name) },
    Undistribute { at: usize, name: Name, binder: Name },
    Reorder { perm: Vec<usize> },
    AddProp { at: usize, name: Name, ty: TypeExpr, witness: Term },
    RemoveProp { at: usize, witness: Term },
    TruncAbsorb { at: usize, dir: AbsorbDir },
    LevelContract { at: usize },
    LevelExpand { at: usize, name: Name, ty: TypeExpr },
    /// Grow or shrink a limit telescope by `⟨m−1,j−1⟩, ⟨m,j⟩`.
    HatPair { lower: HatObj, upper: HatObj, add: bool },
}

impl EquivStep {
    pub fn kind(&self) -> &'static str {
        match self {
            EquivStep::AddSingleton { .. } => "add-singleton",
            EquivStep::RemoveSingleton { .. } => "remove-singleton",
            EquivStep::Distribute { .. } => "distribute",
            EquivStep::Undistribute { .. } => "undistribute",
            EquivStep::Reorder { .. } => "reorder",
            EquivStep::AddProp { .. } => "add-prop",
            EquivStep::RemoveProp { .. } => "remove-prop",
            EquivStep::TruncAbsorb { .. } => "trunc-absorb",
            EquivStep::LevelContract { .. } => "level-contract",
            EquivStep::LevelExpand { .. } => "level-expand",
            EquivStep::HatPair { .. } => "hat-pair",
        }
    }
}

/// A step with its justification tag.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainStep {
    pub tag: String,
    pub step: EquivStep,
}

impl ChainStep {
    pub fn new(tag: &str, step: EquivStep) -> Self {
        ChainStep { tag: tag.to_string(), step }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquivChain {
    pub start: Telescope,
    pub steps: Vec<ChainStep>,
    pub end: Telescope,
    pub levels: LevelEnv,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StepError {
    #[error("no component at index {0}")]
    Index(usize),
    #[error("the name `{0}` is already taken")]
    Taken(Name),
    #[error("`{0}` mentions `{1}`, which is not in scope there")]
    Scope(Name, Name),
    #[error("`{name}` is still used by `{user}`")]
    InUse { name: Name, user: Name },
    #[error("`{0}` is not a singleton: {1}")]
    NotSingleton(Name, String),
    #[error("`{0}` is not of the form Π … Σ …")]
    NotDistributable(Name),
    #[error("`{0}` and `{1}` do not undistribute: {2}")]
    NotUndistributable(Name, Name, String),
    #[error("`{name}` has level {level}, needs at most {max}")]
    Level { name: Name, level: i32, max: i32 },
    #[error("no declared level for base type `{0}`")]
    UnknownBase(Name),
    #[error("`{0}` cannot absorb a truncation: {1}")]
    Absorb(Name, String),
    #[error("hat pair: {0}")]
    Hat(String),
    #[error(transparent)]
    Reorder(#[from] ReorderError),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChainError {
    #[error("step {index} ({tag}): {source}")]
    Step { index: usize, tag: String, source: StepError },
    #[error("replay ends at a telescope other than the declared end")]
    EndMismatch,
    #[error("step {index} ({tag}) in `{env}`: {source}")]
    Model { index: usize, tag: String, env: String, source: ModelError },
    #[error("step {index} ({tag}) changes the groupoid in `{env}`")]
    NotEquivalent { index: usize, tag: String, env: String },
}

fn etat_level(t: &Term) -> Option<usize> {
    match t {
        Term::Const(c) => c.strip_prefix("etat")?.parse().ok(),
        _ => None,
    }
}

/// Structural upper bound on the truncation level.
pub fn level_of(e: &TypeExpr, levels: &LevelEnv) -> Result<i32, StepError> {
    Ok(match e {
        TypeExpr::Unit => -2,
        TypeExpr::Base(b) => *levels.get(b).ok_or_else(|| StepError::UnknownBase(b.clone()))?,
        TypeExpr::Trunc(_) => -1,
        TypeExpr::Id(t, _, _) => (level_of(t, levels)? - 1).max(-2),
        TypeExpr::Pi(_, _, c) | TypeExpr::Arrow(_, c) => level_of(c, levels)?,
        TypeExpr::Sigma(x, t, c) => {
            // Fibers of `η̃ₖ` over an n-type are (n−k)-truncated.
            if let TypeExpr::Id(_, Term::App(f, arg), m) = &**c {
                if let (Some(k), Term::Var(y)) = (etat_level(f), &**arg) {
                    if y == x && !m.mentions(x) {
                        return Ok(fiber_level(level_of(t, levels)?, k as i32));
                    }
                }
            }
            level_of(t, levels)?.max(level_of(c, levels)?)
        }
    })
}

// ---- helpers ----

fn entry(t: &Telescope, i: usize) -> Result<&(Name, TypeExpr), StepError> {
    t.entries.get(i).ok_or(StepError::Index(i))
}

fn fresh_name(t: &Telescope, n: &str) -> Result<(), StepError> {
    if t.index_of(n).is_some() || n == DERIVE {
        return Err(StepError::Taken(n.to_string()));
    }
    Ok(())
}

fn scope_names(t: &Telescope, upto: usize) -> BTreeSet<&str> {
    t.entries[..upto.min(t.len())].iter().map(|(n, _)| n.as_str()).collect()
}

fn in_scope(t: &Telescope, upto: usize, who: &str, fv: BTreeSet<Name>) -> Result<(), StepError> {
    let names = scope_names(t, upto);
    match fv.into_iter().find(|v| !names.contains(v.as_str())) {
        Some(v) => Err(StepError::Scope(who.to_string(), v)),
        None => Ok(()),
    }
}

fn unused_after(t: &Telescope, from: usize, name: &str) -> Result<(), StepError> {
    match t.entries.iter().skip(from).find(|(_, ty)| ty.mentions(name)) {
        Some((user, _)) => Err(StepError::InUse { name: name.to_string(), user: user.clone() }),
        None => Ok(()),
    }
}

fn level_at_most(name: &str, ty: &TypeExpr, levels: &LevelEnv, max: i32) -> Result<(), StepError> {
    let level = level_of(ty, levels)?;
    if level > max {
        return Err(StepError::Level { name: name.to_string(), level, max });
    }
    Ok(())
}

/// Binders of leading Π and Arrow, with fresh names for arrows.
fn peel_pis(e: &TypeExpr) -> (Vec<(Name, TypeExpr)>, TypeExpr) {
    let mut binders = Vec::new();
    let mut cur = e.clone();
    loop {
        match cur {
            TypeExpr::Pi(x, d, c) => {
                binders.push((x, *d));
                cur = *c;
            }
            TypeExpr::Arrow(d, c) => {
                let mut avoid = c.free_vars();
                avoid.extend(binders.iter().map(|(n, _)| n.clone()));
                binders.push((fresh("x", &avoid), *d));
                cur = *c;
            }
            other => return (binders, other),
        }
    }
}

fn wrap_pis(binders: &[(Name, TypeExpr)], body: TypeExpr) -> TypeExpr {
    binders.iter().rev().fold(body, |acc, (x, d)| TypeExpr::pi(x, d.clone(), acc))
}

fn is_b_side(s: &Term, b: &str) -> bool {
    match s {
        Term::Var(x) => x == b,
        Term::PathComp(p, q) => match (&**p, &**q) {
            (Term::Var(x), u) | (u, Term::Var(x)) if x == b => !u.mentions(b),
            _ => false,
        },
        _ => false,
    }
}

/// Shape check for `Σ (b : T). P`.
fn singleton_shape(b: &str, carrier_ty: &TypeExpr, path_ty: &TypeExpr) -> Result<(), String> {
    if carrier_ty.mentions(b) {
        return Err(format!("the carrier type mentions `{b}`"));
    }
    let TypeExpr::Id(u, l, r) = path_ty else {
        return Err("the second component is not an identity type".into());
    };
    if u.mentions(b) {
        return Err(format!("the ambient type mentions `{b}`"));
    }
    let (side, anchor) = if is_b_side(l, b) {
        (l, r)
    } else if is_b_side(r, b) {
        (r, l)
    } else {
        return Err(format!("neither side is `{b}` up to composition"));
    };
    if anchor.mentions(b) {
        return Err(format!("the anchor mentions `{b}`"));
    }
    if matches!(side, Term::Var(_)) && !alpha_eq_ty(u, carrier_ty) {
        return Err("the path does not live in the carrier".into());
    }
    if !matches!(side, Term::Var(_)) && !matches!(carrier_ty, TypeExpr::Id(..)) {
        return Err("a composed side needs a path carrier".into());
    }
    Ok(())
}

fn splice(t: &Telescope, at: usize, remove: usize, insert: Vec<(Name, TypeExpr)>) -> Telescope {
    let mut entries = t.entries[..at].to_vec();
    entries.extend(insert);
    entries.extend(t.entries[at + remove..].iter().cloned());
    Telescope::new(entries)
}

fn replace_spine_tm(t: &Term, g: &str, args: &[Name], b: &str) -> Result<Term, String> {
    let (head, xs) = t.spine();
    if let Term::Var(h) = head {
        if h == g && xs.len() == args.len() && xs.iter().zip(args).all(|(x, a)| matches!(x, Term::Var(v) if v == a)) {
            return Ok(Term::var(b));
        }
    }
    let r = |u: &Term| replace_spine_tm(u, g, args, b);
    Ok(match t {
        Term::Var(_) | Term::Const(_) | Term::Star => t.clone(),
        Term::App(x, y) => Term::app(r(x)?, r(y)?),
        Term::Pair(x, y) => Term::pair(r(x)?, r(y)?),
        Term::PathComp(x, y) => Term::comp(r(x)?, r(y)?),
        Term::Fst(x) => Term::Fst(Box::new(r(x)?)),
        Term::Snd(x) => Term::Snd(Box::new(r(x)?)),
        Term::Refl(x) => Term::refl(r(x)?),
        Term::Lam(x, body) => {
            if x == g || x == b || args.contains(x) {
                return Err(format!("binder `{x}` shadows the pattern"));
            }
            Term::lam(x, r(body)?)
        }
    })
}

fn replace_spine_ty(e: &TypeExpr, g: &str, args: &[Name], b: &str) -> Result<TypeExpr, String> {
    let r = |x: &TypeExpr| replace_spine_ty(x, g, args, b);
    Ok(match e {
        TypeExpr::Unit | TypeExpr::Base(_) => e.clone(),
        TypeExpr::Id(u, x, y) => TypeExpr::id(r(u)?, replace_spine_tm(x, g, args, b)?, replace_spine_tm(y, g, args, b)?),
        TypeExpr::Trunc(u) => TypeExpr::trunc(r(u)?),
        TypeExpr::Arrow(d, c) => TypeExpr::arrow(r(d)?, r(c)?),
        TypeExpr::Sigma(x, d, c) | TypeExpr::Pi(x, d, c) => {
            if x == g || x == b || args.contains(x) {
                return Err(format!("binder `{x}` shadows the pattern"));
            }
            let (d, c) = (r(d)?, r(c)?);
            if matches!(e, TypeExpr::Sigma(..)) {
                TypeExpr::sigma(x, d, c)
            } else {
                TypeExpr::pi(x, d, c)
            }
        }
    })
}

/// `(λ y. t) x` to `t` for `x` bound over a truncation and `y` unused.
fn beta_trunc_tm(t: &Term, truncated: &BTreeSet<Name>, hits: &mut usize) -> Term {
    let r = |u: &Term, hits: &mut usize| beta_trunc_tm(u, truncated, hits);
    match t {
        Term::App(f, a) => {
            if let (Term::Lam(y, body), Term::Var(x)) = (&**f, &**a) {
                if truncated.contains(x) && !body.mentions(y) {
                    *hits += 1;
                    return r(body, hits);
                }
            }
            Term::app(r(f, hits), r(a, hits))
        }
        Term::Pair(x, y) => Term::pair(r(x, hits), r(y, hits)),
        Term::PathComp(x, y) => Term::comp(r(x, hits), r(y, hits)),
        Term::Fst(x) => Term::Fst(Box::new(r(x, hits))),
        Term::Snd(x) => Term::Snd(Box::new(r(x, hits))),
        Term::Refl(x) => Term::refl(r(x, hits)),
        Term::Lam(x, body) => {
            let mut inner = truncated.clone();
            inner.remove(x);
            Term::lam(x, beta_trunc_tm(body, &inner, hits))
        }
        Term::Var(_) | Term::Const(_) | Term::Star => t.clone(),
    }
}

fn beta_trunc_ty(e: &TypeExpr, truncated: &BTreeSet<Name>, hits: &mut usize) -> TypeExpr {
    match e {
        TypeExpr::Unit | TypeExpr::Base(_) => e.clone(),
        TypeExpr::Id(u, a, b) => TypeExpr::id(
            beta_trunc_ty(u, truncated, hits),
            beta_trunc_tm(a, truncated, hits),
            beta_trunc_tm(b, truncated, hits),
        ),
        TypeExpr::Trunc(u) => TypeExpr::trunc(beta_trunc_ty(u, truncated, hits)),
        TypeExpr::Arrow(d, c) => {
            TypeExpr::arrow(beta_trunc_ty(d, truncated, hits), beta_trunc_ty(c, truncated, hits))
        }
        TypeExpr::Sigma(x, d, c) | TypeExpr::Pi(x, d, c) => {
            let d2 = beta_trunc_ty(d, truncated, hits);
            let mut inner = truncated.clone();
            inner.remove(x);
            if matches!(e, TypeExpr::Pi(..)) && matches!(**d, TypeExpr::Trunc(_)) {
                inner.insert(x.clone());
            }
            let c2 = beta_trunc_ty(c, &inner, hits);
            if matches!(e, TypeExpr::Sigma(..)) {
                TypeExpr::sigma(x, d2, c2)
            } else {
                TypeExpr::pi(x, d2, c2)
            }
        }
    }
}

/// `Π (x : ∥S∥). Π (a : S). C` with `x` unused, to `Π (a : S). C`.
fn absorb_shape(name: &str, ty: &TypeExpr) -> Result<TypeExpr, StepError> {
    let bad = |why: &str| StepError::Absorb(name.to_string(), why.to_string());
    let (x, dom, body) = match ty {
        TypeExpr::Pi(x, d, c) => (Some(x.as_str()), &**d, &**c),
        TypeExpr::Arrow(d, c) => (None, &**d, &**c),
        _ => return Err(bad("not a function type")),
    };
    let TypeExpr::Trunc(s) = dom else {
        return Err(bad("the domain is not a truncation"));
    };
    if x.is_some_and(|x| body.mentions(x)) {
        return Err(bad("the body depends on the truncated argument"));
    }
    let inner = match body {
        TypeExpr::Pi(_, d, _) | TypeExpr::Arrow(d, _) => d,
        _ => return Err(bad("the body is not a function out of the truncated type")),
    };
    if !alpha_eq_ty(inner, s) {
        return Err(bad("the body is not a function out of the truncated type"));
    }
    Ok(body.clone())
}

fn hat_objects(t: &Telescope) -> Result<BTreeSet<HatObj>, StepError> {
    t.entries
        .iter()
        .map(|(n, _)| parse_entry_name(n).ok_or_else(|| StepError::Hat(format!("`{n}` is not a limit entry"))))
        .collect()
}

fn hat_limit(objs: BTreeSet<HatObj>, bound: usize) -> Result<(DcSubcat, Telescope), StepError> {
    let d = DcSubcat::new(bound, Flavor::Hat, objs).map_err(|e| StepError::Hat(e.to_string()))?;
    let t = limit_telescope(&d).map_err(|e| StepError::Hat(e.to_string()))?;
    Ok((d, t))
}

// ---- steps ----

pub fn apply_step(t: &Telescope, s: &EquivStep, levels: &LevelEnv) -> Result<Telescope, StepError> {
    match s {
        EquivStep::AddSingleton { at, singleton: sg } => {
            let at = *at;
            if at > t.len() {
                return Err(StepError::Index(at));
            }
            let Singleton { form, prefix, carrier, carrier_ty, path_ty } = sg;
            match form {
                SingletonForm::Family(name) => {
                    fresh_name(t, name)?;
                    singleton_shape(carrier, carrier_ty, path_ty).map_err(|m| StepError::NotSingleton(name.clone(), m))?;
                    let ty = wrap_pis(prefix, TypeExpr::sigma(carrier, carrier_ty.clone(), path_ty.clone()));
                    in_scope(t, at, name, ty.free_vars())?;
                    Ok(splice(t, at, 0, vec![(name.clone(), ty)]))
                }
                SingletonForm::Paired(path) => {
                    if !prefix.is_empty() {
                        return Err(StepError::NotSingleton(path.clone(), "a paired singleton takes no prefix".into()));
                    }
                    fresh_name(t, carrier)?;
                    fresh_name(t, path)?;
                    if carrier == path {
                        return Err(StepError::Taken(path.clone()));
                    }
                    singleton_shape(carrier, carrier_ty, path_ty).map_err(|m| StepError::NotSingleton(path.clone(), m))?;
                    in_scope(t, at, carrier, carrier_ty.free_vars())?;
                    let mut fv = path_ty.free_vars();
                    fv.remove(carrier);
                    in_scope(t, at, path, fv)?;
                    Ok(splice(t, at, 0, vec![(carrier.clone(), carrier_ty.clone()), (path.clone(), path_ty.clone())]))
                }
            }
        }
        EquivStep::RemoveSingleton { at, paired } => {
            let at = *at;
            if *paired {
                let (b, carrier_ty) = entry(t, at)?;
                let (p, path_ty) = entry(t, at + 1)?;
                singleton_shape(b, carrier_ty, path_ty).map_err(|m| StepError::NotSingleton(p.clone(), m))?;
                unused_after(t, at + 2, b)?;
                unused_after(t, at + 2, p)?;
                Ok(splice(t, at, 2, vec![]))
            } else {
                let (name, ty) = entry(t, at)?;
                let (_, body) = peel_pis(ty);
                let TypeExpr::Sigma(b, carrier_ty, path_ty) = body else {
                    return Err(StepError::NotSingleton(name.clone(), "no Σ under the Π prefix".into()));
                };
                singleton_shape(&b, &carrier_ty, &path_ty).map_err(|m| StepError::NotSingleton(name.clone(), m))?;
                unused_after(t, at + 1, name)?;
                Ok(splice(t, at, 1, vec![]))
            }
        }
        EquivStep::Distribute { at, names: (g, h) } => {
            let (x, ty) = entry(t, *at)?;
            let (binders, body) = peel_pis(ty);
            let TypeExpr::Sigma(b, bt, c) = body else {
                return Err(StepError::NotDistributable(x.clone()));
            };
            if binders.is_empty() {
                return Err(StepError::NotDistributable(x.clone()));
            }
            for n in [g, h] {
                if n != x {
                    fresh_name(t, n)?;
                }
                if binders.iter().any(|(a, _)| a == n) {
                    return Err(StepError::Taken(n.clone()));
                }
            }
            if g == h {
                return Err(StepError::Taken(h.clone()));
            }
            unused_after(t, at + 1, x)?;
            let applied = Term::apps(Term::var(g), binders.iter().map(|(a, _)| Term::var(a)));
            let gt = wrap_pis(&binders, *bt);
            let ht = wrap_pis(&binders, subst_ty(&c, &b, &applied));
            Ok(splice(t, *at, 1, vec![(g.clone(), gt), (h.clone(), ht)]))
        }
        EquivStep::Undistribute { at, name, binder } => {
            let at = *at;
            let (g, gty) = entry(t, at)?;
            let (h, hty) = entry(t, at + 1)?;
            let fail = |m: &str| StepError::NotUndistributable(g.clone(), h.clone(), m.to_string());
            if name != g && name != h {
                fresh_name(t, name)?;
            }
            let (binders, bt) = peel_pis(gty);
            if binders.is_empty() {
                return Err(fail("the first component is not a function"));
            }
            let args: Vec<Name> = binders.iter().map(|(a, _)| a.clone()).collect();
            if args.contains(binder) || binder == g || binder == h {
                return Err(fail("the binder clashes"));
            }
            let mut cur = hty.clone();
            for (a, d) in &binders {
                let (y, dom, rest) = match cur {
                    TypeExpr::Pi(y, dom, rest) => (Some(y), dom, rest),
                    TypeExpr::Arrow(dom, rest) => (None, dom, rest),
                    _ => return Err(fail("the second component has fewer arguments")),
                };
                if !alpha_eq_ty(&dom, d) {
                    return Err(fail("argument types differ"));
                }
                cur = match y {
                    Some(y) if y != *a => subst_ty(&rest, &y, &Term::var(a)),
                    _ => *rest,
                };
            }
            if cur.mentions(binder) {
                return Err(fail("the binder is already free in the body"));
            }
            let c = replace_spine_ty(&cur, g, &args, binder).map_err(|m| fail(&m))?;
            if c.mentions(g) {
                return Err(fail("the body uses the first component other than at the shared arguments"));
            }
            unused_after(t, at + 2, g)?;
            unused_after(t, at + 2, h)?;
            let ty = wrap_pis(&binders, TypeExpr::sigma(binder, bt, c));
            Ok(splice(t, at, 2, vec![(name.clone(), ty)]))
        }
        EquivStep::Reorder { perm } => Ok(reorder(t, perm)?),
        EquivStep::AddProp { at, name, ty, witness } => {
            if *at > t.len() {
                return Err(StepError::Index(*at));
            }
            fresh_name(t, name)?;
            in_scope(t, *at, name, ty.free_vars())?;
            level_at_most(name, ty, levels, -1)?;
            in_scope(t, *at, name, witness.free_vars())?;
            Ok(splice(t, *at, 0, vec![(name.clone(), ty.clone())]))
        }
        EquivStep::RemoveProp { at, witness } => {
            let (name, ty) = entry(t, *at)?;
            level_at_most(name, ty, levels, -1)?;
            in_scope(t, *at, name, witness.free_vars())?;
            unused_after(t, at + 1, name)?;
            Ok(splice(t, *at, 1, vec![]))
        }
        EquivStep::TruncAbsorb { at, dir } => {
            let (name, ty) = entry(t, *at)?;
            match dir {
                AbsorbDir::Collapse | AbsorbDir::Regroup => {
                    let body = absorb_shape(name, ty)?;
                    let mut out = splice(t, *at, 1, vec![(name.clone(), body)]);
                    if *dir == AbsorbDir::Regroup {
                        unused_after(t, at + 1, name)?;
                        return Ok(out);
                    }
                    let mut avoid: BTreeSet<Name> = t.entries.iter().map(|(n, _)| n.clone()).collect();
                    for (_, e) in &t.entries {
                        avoid.extend(e.free_vars());
                    }
                    let y = fresh("y", &avoid);
                    let konst = Term::lam(&y, Term::var(name));
                    for (_, e) in out.entries.iter_mut().skip(at + 1) {
                        *e = subst_ty(e, name, &konst);
                    }
                    Ok(out)
                }
                AbsorbDir::PathRewrite => {
                    let mut hits = 0;
                    let rewritten = beta_trunc_ty(ty, &BTreeSet::new(), &mut hits);
                    if hits == 0 {
                        return Err(StepError::Absorb(name.clone(), "no redex over a truncated argument".into()));
                    }
                    Ok(splice(t, *at, 1, vec![(name.clone(), rewritten)]))
                }
            }
        }
        EquivStep::LevelContract { at } => {
            let (name, ty) = entry(t, *at)?;
            level_at_most(name, ty, levels, -2)?;
            unused_after(t, at + 1, name)?;
            Ok(splice(t, *at, 1, vec![]))
        }
        EquivStep::LevelExpand { at, name, ty } => {
            if *at > t.len() {
                return Err(StepError::Index(*at));
            }
            fresh_name(t, name)?;
            in_scope(t, *at, name, ty.free_vars())?;
            level_at_most(name, ty, levels, -2)?;
            Ok(splice(t, *at, 0, vec![(name.clone(), ty.clone())]))
        }
        EquivStep::HatPair { lower, upper, add } => {
            let objs = hat_objects(t)?;
            let bound = objs.iter().map(|x| x.m).chain([upper.m]).max().unwrap_or(0);
            let (d, expect) = hat_limit(objs.clone(), bound)?;
            if !alpha_eq_tel(t, &expect) {
                return Err(StepError::Hat("the telescope is not the limit over its entries".into()));
            }
            if *add {
                let grown = pair_step(&d, *lower, *upper).map_err(|e| StepError::Hat(e.to_string()))?;
                Ok(hat_limit(grown.objects().clone(), bound)?.1)
            } else {
                if !d.contains(lower) || !d.contains(upper) {
                    return Err(StepError::Hat(format!("{lower} and {upper} are not both present")));
                }
                let mut rest = objs;
                rest.remove(lower);
                rest.remove(upper);
                let (smaller, tel) = hat_limit(rest, bound)?;
                let regrown = pair_step(&smaller, *lower, *upper).map_err(|e| StepError::Hat(e.to_string()))?;
                if regrown.objects() != d.objects() {
                    return Err(StepError::Hat("removal does not invert a pair step".into()));
                }
                Ok(tel)
            }
        }
    }
}

/// Replays the chain; each step's obligations are checked syntactically.
pub fn check_chain(c: &EquivChain) -> Result<Vec<Telescope>, ChainError> {
    let mut stages = vec![c.start.clone()];
    for (index, s) in c.steps.iter().enumerate() {
        let cur = stages.last().expect("nonempty");
        let next = apply_step(cur, &s.step, &c.levels).map_err(|source| ChainError::Step {
            index,
            tag: s.tag.clone(),
            source,
        })?;
        stages.push(next);
    }
    if !alpha_eq_tel(stages.last().expect("nonempty"), &c.end) {
        return Err(ChainError::EndMismatch);
    }
    Ok(stages)
}

/// Whether the environment's bases sit within the declared levels.
pub fn realizes(env: &ModelEnv, levels: &LevelEnv) -> bool {
    levels.iter().all(|(b, &l)| env.bases.get(b).is_some_and(|g| h_level(g) <= l))
}

/// Replays the chain and checks every step against the finite model in
/// each environment realizing the chain's levels. Returns the number of
/// environments used.
pub fn check_chain_in_models(c: &EquivChain, envs: &[ModelEnv]) -> Result<usize, ChainError> {
    let stages = check_chain(c)?;
    let used: Vec<&ModelEnv> = envs.iter().filter(|e| realizes(e, &c.levels)).collect();
    for env in &used {
        let eval = |i: usize| -> Result<FinGroupoid, ChainError> {
            eval_telescope(&stages[i], env).map_err(|source| ChainError::Model {
                index: i.saturating_sub(1),
                tag: c.steps.get(i.saturating_sub(1)).map_or(String::new(), |s| s.tag.clone()),
                env: env.name.clone(),
                source,
            })
        };
        let mut before = eval(0)?;
        for (index, s) in c.steps.iter().enumerate() {
            let after = eval(index + 1)?;
            let same = equiv_check(&before, &after).map_err(|source| ChainError::Model {
                index,
                tag: s.tag.clone(),
                env: env.name.clone(),
                source,
            })?;
            if !same {
                return Err(ChainError::NotEquivalent { index, tag: s.tag.clone(), env: env.name.clone() });
            }
            before = after;
        }
    }
    Ok(used.len())
}
