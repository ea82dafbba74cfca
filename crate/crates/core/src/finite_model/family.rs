//! Families of groupoids over a finite base, with strict transport.

use std::collections::HashMap;

use super::groupoid::{h_level, FinGroupoid};
use super::sem::{compile, Env, Gamma, Model, Mor, SType, Val};
use super::{ModelEnv, ModelError};
use crate::typeexpr::Telescope;

type R<T> = Result<T, ModelError>;

/// A functor between finite groupoids. `mor[(a, b, φ)]` is the index of the
/// image of `φ : a → b` in `hom(obj[a], obj[b])`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Functor {
    pub obj: Vec<usize>,
    pub mor: HashMap<(usize, usize, usize), usize>,
}

impl Functor {
    pub fn identity(g: &FinGroupoid) -> Self {
        let n = g.num_objects();
        let mut mor = HashMap::new();
        for a in 0..n {
            for b in 0..n {
                for f in 0..g.hom_count(a, b) {
                    mor.insert((a, b, f), f);
                }
            }
        }
        Functor { obj: (0..n).collect(), mor }
    }

    /// `self` followed by `next`.
    pub fn then(&self, next: &Functor) -> Functor {
        let obj = self.obj.iter().map(|&x| next.obj[x]).collect();
        let mor = self
            .mor
            .iter()
            .map(|(&(a, b, f), &g)| ((a, b, f), next.mor[&(self.obj[a], self.obj[b], g)]))
            .collect();
        Functor { obj, mor }
    }

    fn check(&self, src: &FinGroupoid, dst: &FinGroupoid) -> Result<(), String> {
        let n = src.num_objects();
        if self.obj.len() != n || self.obj.iter().any(|&x| x >= dst.num_objects()) {
            return Err("object map is not total".into());
        }
        for a in 0..n {
            for b in 0..n {
                for f in 0..src.hom_count(a, b) {
                    match self.mor.get(&(a, b, f)) {
                        Some(&g) if g < dst.hom_count(self.obj[a], self.obj[b]) => {}
                        _ => return Err(format!("morphism {f} : {a} -> {b} has no image")),
                    }
                }
            }
            if self.mor[&(a, a, src.identity(a))] != dst.identity(self.obj[a]) {
                return Err(format!("identity at {a} is not preserved"));
            }
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for f in 0..src.hom_count(a, b) {
                        for g in 0..src.hom_count(b, c) {
                            let lhs = self.mor[&(a, c, src.compose(a, b, c, f, g))];
                            let (fa, fb, fc) = (self.obj[a], self.obj[b], self.obj[c]);
                            let rhs = dst.compose(fa, fb, fc, self.mor[&(a, b, f)], self.mor[&(b, c, g)]);
                            if lhs != rhs {
                                return Err("composition is not preserved".into());
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

/// A family of groupoids over `base`, with a transport functor for every
/// base morphism `(x, y, f)`.
#[derive(Debug, Clone)]
pub struct FamilySem {
    base: FinGroupoid,
    fibers: Vec<FinGroupoid>,
    transport: HashMap<(usize, usize, usize), Functor>,
}

impl FamilySem {
    /// Checks that every transport is a functor and that transport is strictly functorial.
    pub fn new(
        base: FinGroupoid,
        fibers: Vec<FinGroupoid>,
        transport: HashMap<(usize, usize, usize), Functor>,
    ) -> R<Self> {
        let bad = |m: String| Err(ModelError::Invalid(m));
        let n = base.num_objects();
        if fibers.len() != n {
            return bad("one fiber per base object is required".into());
        }
        for x in 0..n {
            for y in 0..n {
                for f in 0..base.hom_count(x, y) {
                    let Some(t) = transport.get(&(x, y, f)) else {
                        return bad(format!("no transport along {f} : {x} -> {y}"));
                    };
                    if let Err(m) = t.check(&fibers[x], &fibers[y]) {
                        return bad(format!("transport along {f} : {x} -> {y}: {m}"));
                    }
                }
            }
            if transport[&(x, x, base.identity(x))] != Functor::identity(&fibers[x]) {
                return bad(format!("transport along the identity at {x} is not the identity"));
            }
        }
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    for f in 0..base.hom_count(x, y) {
                        for g in 0..base.hom_count(y, z) {
                            let gf = base.compose(x, y, z, f, g);
                            if transport[&(x, z, gf)] != transport[&(x, y, f)].then(&transport[&(y, z, g)]) {
                                return bad("transport does not respect composition".into());
                            }
                        }
                    }
                }
            }
        }
        Ok(FamilySem { base, fibers, transport })
    }

    pub fn base(&self) -> &FinGroupoid {
        &self.base
    }

    pub fn fiber(&self, x: usize) -> &FinGroupoid {
        &self.fibers[x]
    }

    pub fn transport(&self, x: usize, y: usize, f: usize) -> &Functor {
        &self.transport[&(x, y, f)]
    }

    fn total_objects(&self) -> Vec<(usize, usize)> {
        (0..self.base.num_objects())
            .flat_map(|b| (0..self.fibers[b].num_objects()).map(move |x| (b, x)))
            .collect()
    }

    // Morphisms (b, x) → (b', x') as pairs (f, φ) with φ : T_f(x) → x'.
    fn total_homs(&self, (b, x): (usize, usize), (c, y): (usize, usize)) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for f in 0..self.base.hom_count(b, c) {
            let tx = self.transport[&(b, c, f)].obj[x];
            for phi in 0..self.fibers[c].hom_count(tx, y) {
                out.push((f, phi));
            }
        }
        out
    }

    /// The total groupoid: pairs of a base morphism and a fiber morphism out of the transported source.
    pub fn total(&self) -> R<FinGroupoid> {
        let objs = self.total_objects();
        let homs: Vec<Vec<Vec<(usize, usize)>>> =
            objs.iter().map(|&p| objs.iter().map(|&q| self.total_homs(p, q)).collect()).collect();
        let mut comp = HashMap::new();
        for (i, &(b, x)) in objs.iter().enumerate() {
            for (j, &(c, y)) in objs.iter().enumerate() {
                for (k, &(d, z)) in objs.iter().enumerate() {
                    let index: HashMap<(usize, usize), usize> =
                        homs[i][k].iter().enumerate().map(|(h, &m)| (m, h)).collect();
                    for (a, &(f, phi)) in homs[i][j].iter().enumerate() {
                        for (e, &(g, psi)) in homs[j][k].iter().enumerate() {
                            let tg = &self.transport[&(c, d, g)];
                            let tf = &self.transport[&(b, c, f)];
                            let gf = self.base.compose(b, c, d, f, g);
                            // T_g(φ) : T_g T_f x → T_g y, then ψ : T_g y → z.
                            let tphi = tg.mor[&(tf.obj[x], y, phi)];
                            let src = tg.obj[tf.obj[x]];
                            let fib = &self.fibers[d];
                            let m = fib.compose(src, tg.obj[y], z, tphi, psi);
                            comp.insert((i, j, k, a, e), index[&(gf, m)]);
                        }
                    }
                }
            }
        }
        let ident = objs
            .iter()
            .enumerate()
            .map(|(i, &(b, x))| {
                let id = (self.base.identity(b), self.fibers[b].identity(x));
                homs[i][i].iter().position(|&m| m == id).expect("identity pair present")
            })
            .collect();
        let labels = objs.iter().map(|&(b, x)| format!("{}/{}", self.base.object_label(b), self.fibers[b].object_label(x))).collect();
        let hom_labels = homs
            .iter()
            .map(|row| row.iter().map(|hs| hs.iter().map(|&(f, p)| format!("{f}/{p}")).collect()).collect())
            .collect();
        FinGroupoid::new(labels, hom_labels, comp, ident)
    }

    /// Whether the projection from the total groupoid to the base is an
    /// equivalence, decided directly: essentially surjective and bijective on hom-sets.
    pub fn projection_is_equiv(&self) -> bool {
        let objs = self.total_objects();
        let surjective = (0..self.base.num_objects())
            .all(|b| objs.iter().any(|&(c, _)| self.base.hom_count(c, b) > 0));
        if !surjective {
            return false;
        }
        objs.iter().all(|&p| {
            objs.iter().all(|&q| {
                let hs = self.total_homs(p, q);
                let mut firsts: Vec<usize> = hs.iter().map(|&(f, _)| f).collect();
                firsts.dedup();
                hs.len() == self.base.hom_count(p.0, q.0) && firsts.len() == hs.len()
            })
        })
    }

    /// Whether every fiber is equivalent to the unit groupoid.
    pub fn fibers_contractible(&self) -> bool {
        self.fibers.iter().all(|g| h_level(g) == -2)
    }

    /// The family over the first `k` entries of `tel` whose fibers are the remaining entries,
    /// with base and fibers replaced by their skeletons.
    pub fn from_split(tel: &Telescope, k: usize, env: &ModelEnv) -> R<Self> {
        if k == 0 || k > tel.len() {
            return Err(ModelError::Precondition(format!("cannot split a telescope of length {} at {k}", tel.len())));
        }
        let model = Model::new(env);
        let prefix = Telescope::new(tel.entries[..k].to_vec());
        let suffix = Telescope::new(tel.entries[k..].to_vec());
        let rest = compile(&suffix.to_type());
        let pty = model.eval_ty(&prefix.to_type(), &Env::empty())?;
        let base_reps = model.reps(&pty)?;
        let base = model.skeleton(&pty)?;
        let mut fibers = Vec::new();
        let mut transport = HashMap::new();
        for (bi, p) in base_reps.iter().enumerate() {
            let rho = bind_prefix(&model, &prefix, p)?;
            let fty = model.eval(&rest, &rho)?;
            let freps = model.reps(&fty)?;
            let fib = model.skeleton(&fty)?;
            let auts = model.homs(&pty, p, p)?;
            for (ai, alpha) in auts.iter().enumerate() {
                let gamma = split_morphism(k, alpha)?;
                let mut obj = Vec::new();
                let mut conj = Vec::new();
                for r in &freps {
                    let v = model.tr(&rest, &rho, &gamma, &rho, r)?;
                    let (j, c) = model.classify(&fty, &freps, &v)?;
                    obj.push(j);
                    conj.push((v, c));
                }
                let mut mor = HashMap::new();
                for (i, r) in freps.iter().enumerate() {
                    let (v, c) = &conj[i];
                    let target = &freps[obj[i]];
                    let cinv = model.inverse(&fty, v, target, c)?;
                    let tauts = model.homs(&fty, target, target)?;
                    for (fi, phi) in model.homs(&fty, r, r)?.iter().enumerate() {
                        let m = model.trm(&rest, &rho, &gamma, &rho, r, r, phi)?;
                        let m = model.compose(&fty, target, v, v, &cinv, &m)?;
                        let m = model.compose(&fty, target, v, target, &m, c)?;
                        let idx = tauts
                            .iter()
                            .position(|t| *t == m)
                            .ok_or_else(|| ModelError::Internal("transported morphism outside hom-set".into()))?;
                        mor.insert((i, i, fi), idx);
                    }
                }
                transport.insert((bi, bi, ai), Functor { obj, mor });
            }
            fibers.push(fib);
        }
        FamilySem::new(base, fibers, transport)
    }
}

fn split_nested<'v, T>(k: usize, v: &'v T, split: impl Fn(&'v T) -> Option<(&'v T, &'v T)>) -> R<Vec<&'v T>> {
    let mut out = Vec::with_capacity(k);
    let mut cur = v;
    for _ in 1..k {
        let (a, b) = split(cur).ok_or_else(|| ModelError::Internal("telescope value is not a nested pair".into()))?;
        out.push(a);
        cur = b;
    }
    out.push(cur);
    Ok(out)
}

fn bind_prefix(model: &Model, prefix: &Telescope, v: &Val) -> R<Env> {
    let parts = split_nested(prefix.len(), v, |x| match x {
        Val::Pair(a, b) => Some((&**a, &**b)),
        _ => None,
    })?;
    let mut rho = Env::empty();
    for ((name, ty), part) in prefix.entries.iter().zip(parts) {
        let t: SType = model.eval_ty(ty, &rho)?;
        rho = rho.push(name, part.clone(), t);
    }
    Ok(rho)
}

fn split_morphism(k: usize, m: &Mor) -> R<Gamma> {
    let parts = split_nested(k, m, |x| match x {
        Mor::Pair(a, b) => Some((&**a, &**b)),
        _ => None,
    })?;
    Ok(parts.into_iter().enumerate().map(|(i, p)| (i, p.clone())).collect())
}
