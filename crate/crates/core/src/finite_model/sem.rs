//! Evaluation of types as groupoids, with strict transport along
//! morphisms of the context.

use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::rc::Rc;

use super::groupoid::FinGroupoid;
use super::{ModelEnv, ModelError};
use crate::diagrams::{eta_unfolding, EqualityDiagram};
use crate::typeexpr::{subst_tm, Name, Term, TypeExpr};

type R<T> = Result<T, ModelError>;

/// Largest automorphism group a skeleton will tabulate.
pub const MAX_AUT: usize = 96;

/// Objects of evaluated types. Function tables are sorted by argument.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Val {
    Star,
    Obj(usize),
    Pair(Box<Val>, Box<Val>),
    Fun(Vec<(Val, Val)>),
    Path(Mor),
}

/// Morphisms. `Pair(μ, ν)` in a Σ-type has `ν : tr_μ(w₁) → w₂`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mor {
    Triv,
    Base(usize),
    Pair(Box<Mor>, Box<Mor>),
    Fun(Vec<(Val, Mor)>),
}

fn vpair(a: Val, b: Val) -> Val {
    Val::Pair(Box::new(a), Box::new(b))
}

fn mpair(a: Mor, b: Mor) -> Mor {
    Mor::Pair(Box::new(a), Box::new(b))
}

impl Val {
    fn split(&self) -> R<(&Val, &Val)> {
        match self {
            Val::Pair(a, b) => Ok((a, b)),
            _ => Err(ModelError::Internal("expected a pair value".into())),
        }
    }

    fn table(&self) -> R<&[(Val, Val)]> {
        match self {
            Val::Fun(t) => Ok(t),
            _ => Err(ModelError::Internal("expected a function value".into())),
        }
    }

    fn path(&self) -> R<&Mor> {
        match self {
            Val::Path(m) => Ok(m),
            _ => Err(ModelError::Internal("expected a path".into())),
        }
    }
}

impl Mor {
    fn split(&self) -> R<(&Mor, &Mor)> {
        match self {
            Mor::Pair(a, b) => Ok((a, b)),
            _ => Err(ModelError::Internal("expected a pair morphism".into())),
        }
    }

    fn table(&self) -> R<&[(Val, Mor)]> {
        match self {
            Mor::Fun(t) => Ok(t),
            _ => Err(ModelError::Internal("expected a function morphism".into())),
        }
    }

    fn base(&self) -> R<usize> {
        match self {
            Mor::Base(k) => Ok(*k),
            _ => Err(ModelError::Internal("expected a base morphism".into())),
        }
    }
}

fn lookup<'a, T>(t: &'a [(Val, T)], k: &Val) -> R<&'a T> {
    t.iter()
        .find(|(x, _)| x == k)
        .map(|(_, v)| v)
        .ok_or_else(|| ModelError::Internal("argument outside function table".into()))
}

/// Semantic types: closures over an environment.
#[derive(Debug, Clone)]
pub enum SType {
    Unit,
    Base(Name),
    Id(Box<SType>, Val, Val),
    Trunc(bool),
    Pi(Name, Box<SType>, Ty, Env),
    Sigma(Name, Box<SType>, Ty, Env),
}

#[derive(Debug, Clone)]
pub struct Binding {
    pub name: Name,
    pub val: Val,
    pub ty: SType,
}

#[derive(Debug)]
enum Node {
    Nil,
    Cons(Binding, Env),
}

/// Persistent environment; positions count from the oldest binding.
#[derive(Debug, Clone)]
pub struct Env {
    node: Rc<Node>,
    len: usize,
}

impl Env {
    pub fn empty() -> Self {
        Env { node: Rc::new(Node::Nil), len: 0 }
    }

    pub fn push(&self, name: &str, val: Val, ty: SType) -> Env {
        Env { node: Rc::new(Node::Cons(Binding { name: name.to_string(), val, ty }, self.clone())), len: self.len + 1 }
    }

    pub fn lookup(&self, name: &str) -> Option<(usize, &Binding)> {
        let mut cur = self;
        loop {
            match &*cur.node {
                Node::Nil => return None,
                Node::Cons(b, rest) => {
                    if b.name == name {
                        return Some((cur.len - 1, b));
                    }
                    cur = rest;
                }
            }
        }
    }

    fn at(&self, pos: usize) -> Option<&Binding> {
        let mut cur = self;
        loop {
            match &*cur.node {
                Node::Nil => return None,
                Node::Cons(b, rest) => {
                    if cur.len - 1 == pos {
                        return Some(b);
                    }
                    cur = rest;
                }
            }
        }
    }
}

/// A morphism of contexts, listing only the non-identity positions.
pub type Gamma = BTreeMap<usize, Mor>;

type Snapshot = Vec<(Val, Val, Option<Mor>)>;

pub struct Model<'a> {
    pub env: &'a ModelEnv,
    matching: RefCell<HashMap<usize, SType>>,
    // Transport only sees the free variables of a type, so results are
    // memoized on their values. `pinned` keeps the keyed nodes alive.
    pinned: RefCell<HashMap<usize, Ty>>,
    tr_memo: RefCell<HashMap<(usize, Snapshot, Val), Val>>,
    trm_memo: RefCell<HashMap<(usize, Snapshot, Val, Val, Mor), Mor>>,
}

fn etat_level(c: &str) -> Option<usize> {
    c.strip_prefix("etat")?.parse().ok()
}

/// Type expressions with shared subtrees and cached free variables.
#[derive(Debug)]
pub enum TyNode {
    Unit,
    Base(Name),
    Id(Ty, Term, Term),
    Trunc(Ty),
    Pi(Name, Ty, Ty),
    Sigma(Name, Ty, Ty),
}

#[derive(Debug)]
pub struct TyData {
    pub node: TyNode,
    fv: BTreeSet<Name>,
}

pub type Ty = Rc<TyData>;

fn binder_fv(x: &str, d: &Ty, c: &Ty) -> BTreeSet<Name> {
    let mut fv = d.fv.clone();
    fv.extend(c.fv.iter().filter(|n| *n != x).cloned());
    fv
}

/// Arrows become `Π` with an empty binder name.
pub fn compile(e: &TypeExpr) -> Ty {
    let (node, fv) = match e {
        TypeExpr::Unit => (TyNode::Unit, BTreeSet::new()),
        TypeExpr::Base(b) => (TyNode::Base(b.clone()), BTreeSet::new()),
        TypeExpr::Id(u, a, b) => {
            let u = compile(u);
            let mut fv = u.fv.clone();
            fv.extend(a.free_vars());
            fv.extend(b.free_vars());
            (TyNode::Id(u, a.clone(), b.clone()), fv)
        }
        TypeExpr::Trunc(t) => {
            let t = compile(t);
            let fv = t.fv.clone();
            (TyNode::Trunc(t), fv)
        }
        TypeExpr::Sigma(x, d, c) | TypeExpr::Pi(x, d, c) => {
            let (d, c) = (compile(d), compile(c));
            let fv = binder_fv(x, &d, &c);
            if matches!(e, TypeExpr::Sigma(..)) {
                (TyNode::Sigma(x.clone(), d, c), fv)
            } else {
                (TyNode::Pi(x.clone(), d, c), fv)
            }
        }
        TypeExpr::Arrow(d, c) => {
            let (d, c) = (compile(d), compile(c));
            let fv = binder_fv("", &d, &c);
            (TyNode::Pi(String::new(), d, c), fv)
        }
    };
    Rc::new(TyData { node, fv })
}

impl<'a> Model<'a> {
    pub fn new(env: &'a ModelEnv) -> Self {
        Model {
            env,
            matching: RefCell::new(HashMap::new()),
            pinned: RefCell::new(HashMap::new()),
            tr_memo: RefCell::new(HashMap::new()),
            trm_memo: RefCell::new(HashMap::new()),
        }
    }

    fn base(&self, b: &str) -> R<&FinGroupoid> {
        self.env.bases.get(b).ok_or_else(|| ModelError::Unbound(b.to_string()))
    }

    // ---- types ----

    pub fn eval_ty(&self, e: &TypeExpr, rho: &Env) -> R<SType> {
        self.eval(&compile(e), rho)
    }

    pub fn eval(&self, e: &Ty, rho: &Env) -> R<SType> {
        Ok(match &e.node {
            TyNode::Unit => SType::Unit,
            TyNode::Base(b) => {
                self.base(b)?;
                SType::Base(b.clone())
            }
            TyNode::Sigma(x, d, c) => SType::Sigma(x.clone(), Box::new(self.eval(d, rho)?), c.clone(), rho.clone()),
            TyNode::Pi(x, d, c) => SType::Pi(x.clone(), Box::new(self.eval(d, rho)?), c.clone(), rho.clone()),
            TyNode::Id(u, a, b) => {
                let ut = self.eval(u, rho)?;
                let av = self.ev(a, rho, Some(&ut))?.0;
                let bv = self.ev(b, rho, Some(&ut))?.0;
                SType::Id(Box::new(ut), av, bv)
            }
            TyNode::Trunc(t) => {
                let tt = self.eval(t, rho)?;
                SType::Trunc(!self.objects(&tt)?.is_empty())
            }
        })
    }

    fn matching_type(&self, k: usize) -> R<SType> {
        if let Some(t) = self.matching.borrow().get(&k) {
            return Ok(t.clone());
        }
        let e = EqualityDiagram::new("B", k).matching_type(k).map_err(|e| ModelError::Type(e.to_string()))?;
        let t = self.eval_ty(&e, &Env::empty())?;
        self.matching.borrow_mut().insert(k, t.clone());
        Ok(t)
    }

    fn body(&self, c: &Ty, env: &Env, x: &str, d: &SType, v: &Val) -> R<SType> {
        self.eval(c, &env.push(x, v.clone(), d.clone()))
    }

    fn discrete_expr(&self, e: &Ty) -> R<bool> {
        Ok(match &e.node {
            TyNode::Unit | TyNode::Trunc(_) | TyNode::Id(..) => true,
            TyNode::Base(b) => self.base(b)?.is_discrete(),
            TyNode::Sigma(_, d, c) => self.discrete_expr(d)? && self.discrete_expr(c)?,
            TyNode::Pi(_, _, c) => self.discrete_expr(c)?,
        })
    }

    pub fn is_discrete(&self, t: &SType) -> R<bool> {
        Ok(match t {
            SType::Unit | SType::Trunc(_) | SType::Id(..) => true,
            SType::Base(b) => self.base(b)?.is_discrete(),
            SType::Pi(_, _, c, _) => self.discrete_expr(c)?,
            SType::Sigma(_, d, c, _) => self.is_discrete(d)? && self.discrete_expr(c)?,
        })
    }

    /// One object per isomorphism class.
    pub fn objects(&self, t: &SType) -> R<Vec<Val>> {
        match t {
            SType::Unit => Ok(vec![Val::Star]),
            SType::Trunc(b) => Ok(if *b { vec![Val::Star] } else { vec![] }),
            SType::Base(b) => Ok(self.base(b)?.class_reps().into_iter().map(Val::Obj).collect()),
            SType::Id(u, a, b) => Ok(self.homs(u, a, b)?.into_iter().map(Val::Path).collect()),
            SType::Pi(x, d, c, env) => {
                if !self.is_discrete(d)? {
                    return Err(ModelError::Unsupported("Π over a non-discrete domain".into()));
                }
                let mut acc: Vec<Vec<(Val, Val)>> = vec![vec![]];
                for dv in self.objects(d)? {
                    let cs = self.objects(&self.body(c, env, x, d, &dv)?)?;
                    let mut next = Vec::with_capacity(acc.len() * cs.len());
                    for row in &acc {
                        for cv in &cs {
                            let mut r = row.clone();
                            r.push((dv.clone(), cv.clone()));
                            next.push(r);
                        }
                    }
                    acc = next;
                    if acc.is_empty() {
                        break;
                    }
                }
                Ok(acc
                    .into_iter()
                    .map(|mut r| {
                        r.sort();
                        Val::Fun(r)
                    })
                    .collect())
            }
            SType::Sigma(x, d, c, env) => {
                let discrete = self.is_discrete(t)?;
                let mut reps: Vec<Val> = Vec::new();
                for dv in self.objects(d)? {
                    let ct = self.body(c, env, x, d, &dv)?;
                    if !discrete && self.is_discrete(&ct)? {
                        // Classes over `dv` are orbits of its automorphisms.
                        let auts = self.homs(d, &dv, &dv)?;
                        let mut seen: HashSet<Val> = HashSet::new();
                        for w in self.objects(&ct)? {
                            if seen.contains(&w) {
                                continue;
                            }
                            for mu in &auts {
                                seen.insert(self.tr_fib(t, &dv, &dv, mu, &w)?);
                            }
                            reps.push(vpair(dv.clone(), w));
                        }
                        continue;
                    }
                    for w in self.objects(&ct)? {
                        let cand = vpair(dv.clone(), w);
                        if discrete {
                            reps.push(cand);
                            continue;
                        }
                        // Distinct base representatives are never isomorphic.
                        let mut seen = false;
                        for r in reps.iter().filter(|r| matches!(r, Val::Pair(u, _) if **u == dv)) {
                            if self.has_hom(t, r, &cand)? {
                                seen = true;
                                break;
                            }
                        }
                        if !seen {
                            reps.push(cand);
                        }
                    }
                }
                Ok(reps)
            }
        }
    }

    /// Transport in the fiber of a Σ-type along `μ : x₁ → x₂` in the base.
    fn tr_fib(&self, t: &SType, x1: &Val, x2: &Val, mu: &Mor, w: &Val) -> R<Val> {
        let SType::Sigma(y, d, c, env) = t else {
            return Err(ModelError::Internal("fiber transport outside Σ".into()));
        };
        if x1 == x2 && self.identity(d, x1)? == *mu {
            return Ok(w.clone());
        }
        let r1 = env.push(y, x1.clone(), (**d).clone());
        let r2 = env.push(y, x2.clone(), (**d).clone());
        let g: Gamma = [(env.len, mu.clone())].into_iter().collect();
        self.tr(c, &r1, &g, &r2, w)
    }

    fn trm_fib(&self, t: &SType, x1: &Val, x2: &Val, mu: &Mor, w1: &Val, w2: &Val, nu: &Mor) -> R<Mor> {
        let SType::Sigma(y, d, c, env) = t else {
            return Err(ModelError::Internal("fiber transport outside Σ".into()));
        };
        if x1 == x2 && self.identity(d, x1)? == *mu {
            return Ok(nu.clone());
        }
        let r1 = env.push(y, x1.clone(), (**d).clone());
        let r2 = env.push(y, x2.clone(), (**d).clone());
        let g: Gamma = [(env.len, mu.clone())].into_iter().collect();
        self.trm(c, &r1, &g, &r2, w1, w2, nu)
    }

    pub fn homs(&self, t: &SType, v1: &Val, v2: &Val) -> R<Vec<Mor>> {
        match t {
            SType::Unit | SType::Trunc(_) => Ok(vec![Mor::Triv]),
            SType::Id(..) => Ok(if v1 == v2 { vec![Mor::Triv] } else { vec![] }),
            SType::Base(b) => {
                let g = self.base(b)?;
                let (Val::Obj(x), Val::Obj(y)) = (v1, v2) else {
                    return Err(ModelError::Internal("base object expected".into()));
                };
                Ok((0..g.hom_count(*x, *y)).map(Mor::Base).collect())
            }
            SType::Pi(x, d, c, env) => {
                let (t1, t2) = (v1.table()?, v2.table()?);
                let mut acc: Vec<Vec<(Val, Mor)>> = vec![vec![]];
                for (dv, c1) in t1 {
                    let c2 = lookup(t2, dv)?;
                    let hs = self.homs(&self.body(c, env, x, d, dv)?, c1, c2)?;
                    let mut next = Vec::new();
                    for row in &acc {
                        for h in &hs {
                            let mut r = row.clone();
                            r.push((dv.clone(), h.clone()));
                            next.push(r);
                        }
                    }
                    acc = next;
                    if acc.is_empty() {
                        break;
                    }
                }
                Ok(acc.into_iter().map(Mor::Fun).collect())
            }
            SType::Sigma(x, d, c, env) => {
                let ((x1, w1), (x2, w2)) = (v1.split()?, v2.split()?);
                let c2 = self.body(c, env, x, d, x2)?;
                let mut out = Vec::new();
                for mu in self.homs(d, x1, x2)? {
                    let tw = self.tr_fib(t, x1, x2, &mu, w1)?;
                    for nu in self.homs(&c2, &tw, w2)? {
                        out.push(mpair(mu.clone(), nu));
                    }
                }
                Ok(out)
            }
        }
    }

    pub fn has_hom(&self, t: &SType, v1: &Val, v2: &Val) -> R<bool> {
        match t {
            SType::Unit | SType::Trunc(_) => Ok(true),
            SType::Id(..) => Ok(v1 == v2),
            SType::Base(b) => {
                let (Val::Obj(x), Val::Obj(y)) = (v1, v2) else {
                    return Err(ModelError::Internal("base object expected".into()));
                };
                Ok(self.base(b)?.hom_count(*x, *y) > 0)
            }
            SType::Pi(x, d, c, env) => {
                let (t1, t2) = (v1.table()?, v2.table()?);
                for (dv, c1) in t1 {
                    if !self.has_hom(&self.body(c, env, x, d, dv)?, c1, lookup(t2, dv)?)? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            SType::Sigma(x, d, c, env) => {
                let ((x1, w1), (x2, w2)) = (v1.split()?, v2.split()?);
                let c2 = self.body(c, env, x, d, x2)?;
                for mu in self.homs(d, x1, x2)? {
                    let tw = self.tr_fib(t, x1, x2, &mu, w1)?;
                    if self.has_hom(&c2, &tw, w2)? {
                        return Ok(true);
                    }
                }
                Ok(false)
            }
        }
    }

    pub fn identity(&self, t: &SType, v: &Val) -> R<Mor> {
        match t {
            SType::Unit | SType::Trunc(_) | SType::Id(..) => Ok(Mor::Triv),
            SType::Base(b) => match v {
                Val::Obj(x) => Ok(Mor::Base(self.base(b)?.identity(*x))),
                _ => Err(ModelError::Internal("base object expected".into())),
            },
            SType::Pi(x, d, c, env) => {
                let mut out = Vec::new();
                for (dv, cv) in v.table()? {
                    out.push((dv.clone(), self.identity(&self.body(c, env, x, d, dv)?, cv)?));
                }
                Ok(Mor::Fun(out))
            }
            SType::Sigma(x, d, c, env) => {
                let (u, w) = v.split()?;
                Ok(mpair(self.identity(d, u)?, self.identity(&self.body(c, env, x, d, u)?, w)?))
            }
        }
    }

    /// `g ∘ f` for `f : v1 → v2`, `g : v2 → v3`.
    pub fn compose(&self, t: &SType, v1: &Val, v2: &Val, v3: &Val, f: &Mor, g: &Mor) -> R<Mor> {
        match t {
            SType::Unit | SType::Trunc(_) | SType::Id(..) => Ok(Mor::Triv),
            SType::Base(b) => {
                let gr = self.base(b)?;
                let (Val::Obj(x), Val::Obj(y), Val::Obj(z)) = (v1, v2, v3) else {
                    return Err(ModelError::Internal("base object expected".into()));
                };
                Ok(Mor::Base(gr.compose(*x, *y, *z, f.base()?, g.base()?)))
            }
            SType::Pi(x, d, c, env) => {
                let (t1, t2, t3) = (v1.table()?, v2.table()?, v3.table()?);
                let (tf, tg) = (f.table()?, g.table()?);
                let mut out = Vec::new();
                for (dv, a) in t1 {
                    let ct = self.body(c, env, x, d, dv)?;
                    let m = self.compose(&ct, a, lookup(t2, dv)?, lookup(t3, dv)?, lookup(tf, dv)?, lookup(tg, dv)?)?;
                    out.push((dv.clone(), m));
                }
                Ok(Mor::Fun(out))
            }
            SType::Sigma(x, d, c, env) => {
                let ((x1, w1), (x2, w2), (x3, w3)) = (v1.split()?, v2.split()?, v3.split()?);
                let ((m1, n1), (m2, n2)) = (f.split()?, g.split()?);
                let mu = self.compose(d, x1, x2, x3, m1, m2)?;
                let t1w = self.tr_fib(t, x1, x2, m1, w1)?;
                let tt = self.tr_fib(t, x2, x3, m2, &t1w)?;
                let t2w = self.tr_fib(t, x2, x3, m2, w2)?;
                let moved = self.trm_fib(t, x2, x3, m2, &t1w, w2, n1)?;
                let c3 = self.body(c, env, x, d, x3)?;
                let nu = self.compose(&c3, &tt, &t2w, w3, &moved, n2)?;
                Ok(mpair(mu, nu))
            }
        }
    }

    pub fn inverse(&self, t: &SType, v1: &Val, v2: &Val, f: &Mor) -> R<Mor> {
        match t {
            SType::Unit | SType::Trunc(_) | SType::Id(..) => Ok(Mor::Triv),
            SType::Base(b) => {
                let (Val::Obj(x), Val::Obj(y)) = (v1, v2) else {
                    return Err(ModelError::Internal("base object expected".into()));
                };
                Ok(Mor::Base(self.base(b)?.inverse(*x, *y, f.base()?)))
            }
            SType::Pi(x, d, c, env) => {
                let (t1, t2, tf) = (v1.table()?, v2.table()?, f.table()?);
                let mut out = Vec::new();
                for (dv, a) in t1 {
                    let ct = self.body(c, env, x, d, dv)?;
                    out.push((dv.clone(), self.inverse(&ct, a, lookup(t2, dv)?, lookup(tf, dv)?)?));
                }
                Ok(Mor::Fun(out))
            }
            SType::Sigma(x, d, c, env) => {
                let ((x1, w1), (x2, w2)) = (v1.split()?, v2.split()?);
                let (m, n) = f.split()?;
                let mi = self.inverse(d, x1, x2, m)?;
                let tw1 = self.tr_fib(t, x1, x2, m, w1)?;
                let c2 = self.body(c, env, x, d, x2)?;
                let ni = self.inverse(&c2, &tw1, w2, n)?;
                let back = self.trm_fib(t, x2, x1, &mi, w2, &tw1, &ni)?;
                Ok(mpair(mi, back))
            }
        }
    }

    // ---- transport ----

    fn moves(&self, fv: &BTreeSet<Name>, rho: &Env, g: &Gamma) -> bool {
        g.keys().any(|&p| rho.at(p).is_some_and(|b| fv.contains(&b.name)))
    }

    fn snapshot(&self, e: &Ty, r1: &Env, g: &Gamma, r2: &Env) -> Option<(usize, Snapshot)> {
        let mut out = Vec::with_capacity(e.fv.len());
        for x in &e.fv {
            let (p, b1) = r1.lookup(x)?;
            let (_, b2) = r2.lookup(x)?;
            out.push((b1.val.clone(), b2.val.clone(), g.get(&p).cloned()));
        }
        let id = Rc::as_ptr(e) as usize;
        self.pinned.borrow_mut().entry(id).or_insert_with(|| e.clone());
        Some((id, out))
    }

    /// Transport of an object of `e` along `g : ρ₁ → ρ₂`.
    pub fn tr(&self, e: &Ty, r1: &Env, g: &Gamma, r2: &Env, v: &Val) -> R<Val> {
        if g.is_empty() || !self.moves(&e.fv, r1, g) {
            return Ok(v.clone());
        }
        let key = self.snapshot(e, r1, g, r2).map(|(id, s)| (id, s, v.clone()));
        if let Some(k) = &key {
            if let Some(r) = self.tr_memo.borrow().get(k) {
                return Ok(r.clone());
            }
        }
        let r = self.tr_raw(e, r1, g, r2, v)?;
        if let Some(k) = key {
            self.tr_memo.borrow_mut().insert(k, r.clone());
        }
        Ok(r)
    }

    fn tr_raw(&self, e: &Ty, r1: &Env, g: &Gamma, r2: &Env, v: &Val) -> R<Val> {
        match &e.node {
            TyNode::Unit | TyNode::Trunc(_) | TyNode::Base(_) => Ok(v.clone()),
            TyNode::Id(u, a, b) => {
                let p = v.path()?;
                let (u1, u2) = (self.eval(u, r1)?, self.eval(u, r2)?);
                let a1 = self.ev(a, r1, Some(&u1))?.0;
                let b1 = self.ev(b, r1, Some(&u1))?.0;
                let a2 = self.ev(a, r2, Some(&u2))?.0;
                let b2 = self.ev(b, r2, Some(&u2))?.0;
                let ta = self.tr(u, r1, g, r2, &a1)?;
                let tb = self.tr(u, r1, g, r2, &b1)?;
                let apa = self.ap(a, r1, g, r2)?;
                let apb = self.ap(b, r1, g, r2)?;
                let tp = self.trm(u, r1, g, r2, &a1, &b1, p)?;
                let inv = self.inverse(&u2, &ta, &a2, &apa)?;
                let s = self.compose(&u2, &a2, &ta, &tb, &inv, &tp)?;
                Ok(Val::Path(self.compose(&u2, &a2, &tb, &b2, &s, &apb)?))
            }
            TyNode::Sigma(y, d, c) => {
                let (u, w) = v.split()?;
                let (d1, d2) = (self.eval(d, r1)?, self.eval(d, r2)?);
                let tu = self.tr(d, r1, g, r2, u)?;
                let tw = self.tr(c, &r1.push(y, u.clone(), d1), g, &r2.push(y, tu.clone(), d2), w)?;
                Ok(vpair(tu, tw))
            }
            TyNode::Pi(y, d, c) => {
                let (d1, d2) = (self.eval(d, r1)?, self.eval(d, r2)?);
                let mut out = Vec::new();
                for (dv, cv) in v.table()? {
                    let td = self.tr(d, r1, g, r2, dv)?;
                    let tc = self.tr(c, &r1.push(y, dv.clone(), d1.clone()), g, &r2.push(y, td.clone(), d2.clone()), cv)?;
                    out.push((td, tc));
                }
                out.sort();
                Ok(Val::Fun(out))
            }
        }
    }

    /// Action of transport on a morphism `μ : v1 → v2` of `e(ρ₁)`.
    #[allow(clippy::too_many_arguments)]
    pub fn trm(&self, e: &Ty, r1: &Env, g: &Gamma, r2: &Env, v1: &Val, v2: &Val, mu: &Mor) -> R<Mor> {
        if g.is_empty() || !self.moves(&e.fv, r1, g) {
            return Ok(mu.clone());
        }
        if matches!(e.node, TyNode::Unit | TyNode::Trunc(_) | TyNode::Id(..)) {
            return Ok(Mor::Triv);
        }
        let key = self.snapshot(e, r1, g, r2).map(|(id, s)| (id, s, v1.clone(), v2.clone(), mu.clone()));
        if let Some(k) = &key {
            if let Some(r) = self.trm_memo.borrow().get(k) {
                return Ok(r.clone());
            }
        }
        let r = self.trm_raw(e, r1, g, r2, v1, v2, mu)?;
        if let Some(k) = key {
            self.trm_memo.borrow_mut().insert(k, r.clone());
        }
        Ok(r)
    }

    #[allow(clippy::too_many_arguments)]
    fn trm_raw(&self, e: &Ty, r1: &Env, g: &Gamma, r2: &Env, v1: &Val, v2: &Val, mu: &Mor) -> R<Mor> {
        match &e.node {
            TyNode::Unit | TyNode::Trunc(_) | TyNode::Id(..) => Ok(Mor::Triv),
            TyNode::Base(_) => Ok(mu.clone()),
            TyNode::Sigma(y, d, c) => {
                let ((u1, w1), (u2, w2)) = (v1.split()?, v2.split()?);
                let (m1, nu) = mu.split()?;
                let (d1, d2) = (self.eval(d, r1)?, self.eval(d, r2)?);
                let m1t = self.trm(d, r1, g, r2, u1, u2, m1)?;
                let inner: Gamma = [(r1.len, m1.clone())].into_iter().collect();
                let src = self.tr(c, &r1.push(y, u1.clone(), d1.clone()), &inner, &r1.push(y, u2.clone(), d1.clone()), w1)?;
                let tu2 = self.tr(d, r1, g, r2, u2)?;
                let nut = self.trm(c, &r1.push(y, u2.clone(), d1), g, &r2.push(y, tu2, d2), &src, w2, nu)?;
                Ok(mpair(m1t, nut))
            }
            TyNode::Pi(y, d, c) => {
                let (d1, d2) = (self.eval(d, r1)?, self.eval(d, r2)?);
                let (t1, t2, tm) = (v1.table()?, v2.table()?, mu.table()?);
                let mut out = Vec::new();
                for (dv, a) in t1 {
                    let td = self.tr(d, r1, g, r2, dv)?;
                    let m = self.trm(
                        c,
                        &r1.push(y, dv.clone(), d1.clone()),
                        g,
                        &r2.push(y, td.clone(), d2.clone()),
                        a,
                        lookup(t2, dv)?,
                        lookup(tm, dv)?,
                    )?;
                    out.push((td, m));
                }
                out.sort();
                Ok(Mor::Fun(out))
            }
        }
    }

    /// `ap(t) : tr(t(ρ₁)) → t(ρ₂)`.
    pub fn ap(&self, t: &Term, r1: &Env, g: &Gamma, r2: &Env) -> R<Mor> {
        match t {
            Term::Var(x) => {
                let (pos, b) = r2.lookup(x).ok_or_else(|| ModelError::Unbound(x.clone()))?;
                match g.get(&pos) {
                    Some(m) => Ok(m.clone()),
                    None => self.identity(&b.ty, &b.val),
                }
            }
            Term::Star | Term::Refl(_) | Term::PathComp(..) => Ok(Mor::Triv),
            Term::Const(c) => {
                let (v, ty) = self.constant(c)?;
                self.identity(&ty, &v)
            }
            Term::App(f, a) => match (&**f, &**a) {
                (Term::Const(c), x) if etat_level(c).is_some() => {
                    self.ap(&eta_unfolding(etat_level(c).unwrap_or(0), x), r1, g, r2)
                }
                (Term::Lam(x, b), a) => self.ap(&subst_tm(b, x, a), r1, g, r2),
                _ => {
                    let mf = self.ap(f, r1, g, r2)?;
                    let (_, fty) = self.ev(f, r2, None)?;
                    let SType::Pi(_, d, _, _) = fty else {
                        return Err(ModelError::Type("applying a non-function".into()));
                    };
                    let av = self.ev(a, r2, Some(&d))?.0;
                    Ok(lookup(mf.table()?, &av)?.clone())
                }
            },
            Term::Pair(a, b) => Ok(mpair(self.ap(a, r1, g, r2)?, self.ap(b, r1, g, r2)?)),
            Term::Fst(p) => Ok(self.ap(p, r1, g, r2)?.split()?.0.clone()),
            Term::Snd(p) => Ok(self.ap(p, r1, g, r2)?.split()?.1.clone()),
            Term::Lam(..) => Err(ModelError::Unsupported("action of a bare λ on morphisms".into())),
        }
    }

    // ---- terms ----

    fn constant(&self, c: &str) -> R<(Val, SType)> {
        let (ty, v) = self.env.consts.get(c).ok_or_else(|| ModelError::Unbound(c.to_string()))?;
        Ok((v.clone(), self.eval_ty(ty, &Env::empty())?))
    }

    /// Value and type of a term; `expected` is required for pairs and λ.
    pub fn ev(&self, t: &Term, rho: &Env, expected: Option<&SType>) -> R<(Val, SType)> {
        match t {
            Term::Var(x) => {
                let (_, b) = rho.lookup(x).ok_or_else(|| ModelError::Unbound(x.clone()))?;
                Ok((b.val.clone(), b.ty.clone()))
            }
            Term::Const(c) => {
                if etat_level(c).is_some() {
                    return Err(ModelError::Unsupported(format!("unapplied `{c}`")));
                }
                self.constant(c)
            }
            Term::Star => Ok((Val::Star, SType::Unit)),
            Term::App(f, a) => match (&**f, &**a) {
                (Term::Const(c), x) if etat_level(c).is_some() => {
                    let k = etat_level(c).unwrap_or(0);
                    let m = self.matching_type(k)?;
                    let v = self.ev(&eta_unfolding(k, x), rho, Some(&m))?.0;
                    Ok((v, m))
                }
                (Term::Lam(x, b), a) => {
                    let (av, aty) = self.ev(a, rho, None)?;
                    self.ev(b, &rho.push(x, av, aty), expected)
                }
                _ => {
                    let (fv, fty) = self.ev(f, rho, None)?;
                    let SType::Pi(y, d, c, env) = fty else {
                        return Err(ModelError::Type(format!("applying a non-function in `{t}`")));
                    };
                    let av = self.ev(a, rho, Some(&d))?.0;
                    let r = lookup(fv.table()?, &av)?.clone();
                    Ok((r, self.body(&c, &env, &y, &d, &av)?))
                }
            },
            Term::Fst(p) => {
                let (pv, pty) = self.ev(p, rho, None)?;
                let SType::Sigma(_, d, _, _) = pty else {
                    return Err(ModelError::Type("projection from a non-pair".into()));
                };
                Ok((pv.split()?.0.clone(), *d))
            }
            Term::Snd(p) => {
                let (pv, pty) = self.ev(p, rho, None)?;
                let SType::Sigma(y, d, c, env) = pty else {
                    return Err(ModelError::Type("projection from a non-pair".into()));
                };
                let (u, w) = pv.split()?;
                Ok((w.clone(), self.body(&c, &env, &y, &d, u)?))
            }
            Term::Pair(a, b) => {
                let Some(exp @ SType::Sigma(y, d, c, env)) = expected else {
                    return Err(ModelError::Type(format!("cannot infer the type of pair `{t}`")));
                };
                let av = self.ev(a, rho, Some(d))?.0;
                let ct = self.body(c, env, y, d, &av)?;
                let bv = self.ev(b, rho, Some(&ct))?.0;
                Ok((vpair(av, bv), exp.clone()))
            }
            Term::Lam(x, b) => {
                let Some(exp @ SType::Pi(y, d, c, env)) = expected else {
                    return Err(ModelError::Type(format!("cannot infer the type of `{t}`")));
                };
                if !self.is_discrete(d)? {
                    return Err(ModelError::Unsupported("λ over a non-discrete domain".into()));
                }
                let mut out = Vec::new();
                for dv in self.objects(d)? {
                    let ct = self.body(c, env, y, d, &dv)?;
                    let bv = self.ev(b, &rho.push(x, dv.clone(), (**d).clone()), Some(&ct))?.0;
                    out.push((dv, bv));
                }
                out.sort();
                Ok((Val::Fun(out), exp.clone()))
            }
            Term::Refl(a) => {
                let (av, u) = match expected {
                    Some(SType::Id(u, _, _)) => (self.ev(a, rho, Some(u))?.0, (**u).clone()),
                    _ => self.ev(a, rho, None)?,
                };
                let id = self.identity(&u, &av)?;
                Ok((Val::Path(id), SType::Id(Box::new(u), av.clone(), av)))
            }
            Term::PathComp(p, q) => {
                let (pv, pty) = self.ev(p, rho, None)?;
                let SType::Id(u, x, y) = pty else {
                    return Err(ModelError::Type("composing a non-path".into()));
                };
                let (qv, qty) = match self.ev(q, rho, None) {
                    Ok(r) => r,
                    Err(_) => {
                        let Some(SType::Id(_, _, z)) = expected else {
                            return Err(ModelError::Type("cannot infer a path composite".into()));
                        };
                        let want = SType::Id(u.clone(), y.clone(), z.clone());
                        self.ev(q, rho, Some(&want))?
                    }
                };
                let SType::Id(_, _, z) = qty else {
                    return Err(ModelError::Type("composing a non-path".into()));
                };
                let m = self.compose(&u, &x, &y, &z, pv.path()?, qv.path()?)?;
                Ok((Val::Path(m), SType::Id(u, x, z)))
            }
        }
    }

    /// One object per isomorphism class of `t`, in enumeration order.
    pub fn reps(&self, t: &SType) -> R<Vec<Val>> {
        self.objects(t)
    }

    /// Index of the representative of `v` and some morphism `v → rep`.
    pub fn classify(&self, t: &SType, reps: &[Val], v: &Val) -> R<(usize, Mor)> {
        for (i, r) in reps.iter().enumerate() {
            if let Some(m) = self.homs(t, v, r)?.into_iter().next() {
                return Ok((i, m));
            }
        }
        Err(ModelError::Internal("object outside every class".into()))
    }

    /// The skeleton of `t` as a finite groupoid.
    pub fn skeleton(&self, t: &SType) -> R<FinGroupoid> {
        let reps = self.reps(t)?;
        let n = reps.len();
        let mut homs = vec![vec![Vec::new(); n]; n];
        let mut comp = HashMap::new();
        let mut ident = Vec::with_capacity(n);
        for (i, r) in reps.iter().enumerate() {
            let auts = self.homs(t, r, r)?;
            if auts.len() > MAX_AUT {
                return Err(ModelError::TooLarge(auts.len()));
            }
            let index: HashMap<&Mor, usize> = auts.iter().enumerate().map(|(k, m)| (m, k)).collect();
            let find = |m: &Mor| index.get(m).copied().ok_or_else(|| ModelError::Internal("composite outside hom-set".into()));
            ident.push(find(&self.identity(t, r)?)?);
            let e = ident[i];
            for (a, f) in auts.iter().enumerate() {
                for (b, g) in auts.iter().enumerate() {
                    let h = if a == e {
                        b
                    } else if b == e {
                        a
                    } else {
                        find(&self.compose(t, r, r, r, f, g)?)?
                    };
                    comp.insert((i, i, i, a, b), h);
                }
            }
            homs[i][i] = (0..auts.len()).map(|k| format!("h{k}")).collect();
        }
        let objects = (0..n).map(|i| format!("o{i}")).collect();
        FinGroupoid::new(objects, homs, comp, ident)
    }
}
