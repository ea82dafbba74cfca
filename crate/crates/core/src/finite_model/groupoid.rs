//! Finite groupoids, their equivalence and h-level.

use std::collections::HashMap;

use super::{ModelError, MAX_AUT};

/// Composition key `(x, y, z, f, g)` for `f : x → y`, `g : y → z`.
type CompKey = (usize, usize, usize, usize, usize);

/// A finite groupoid given by explicit tables. Morphisms are addressed by
/// their index in `homs[src][dst]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FinGroupoid {
    objects: Vec<String>,
    homs: Vec<Vec<Vec<String>>>,
    comp: HashMap<CompKey, usize>,
    ident: Vec<usize>,
}

impl FinGroupoid {
    /// Validates totality, associativity, identities and inverses.
    pub fn new(
        objects: Vec<String>,
        homs: Vec<Vec<Vec<String>>>,
        comp: HashMap<CompKey, usize>,
        ident: Vec<usize>,
    ) -> Result<Self, ModelError> {
        let g = FinGroupoid { objects, homs, comp, ident };
        g.validate()?;
        Ok(g)
    }

    fn validate(&self) -> Result<(), ModelError> {
        let n = self.objects.len();
        let bad = |m: String| Err(ModelError::Invalid(m));
        if self.homs.len() != n || self.homs.iter().any(|r| r.len() != n) || self.ident.len() != n {
            return bad("table sizes do not match the object list".into());
        }
        for x in 0..n {
            if self.ident[x] >= self.homs[x][x].len() {
                return bad(format!("object {x} has no identity"));
            }
        }
        // Targets reachable from each object; composites only exist along these.
        let out: Vec<Vec<usize>> = (0..n).map(|x| (0..n).filter(|&y| !self.homs[x][y].is_empty()).collect()).collect();
        for x in 0..n {
            for &y in &out[x] {
                for &z in &out[y] {
                    for f in 0..self.homs[x][y].len() {
                        for g in 0..self.homs[y][z].len() {
                            match self.comp.get(&(x, y, z, f, g)) {
                                Some(&h) if h < self.homs[x][z].len() => {}
                                _ => return bad(format!("missing composite ({x},{y},{z},{f},{g})")),
                            }
                        }
                    }
                }
            }
        }
        for x in 0..n {
            for &y in &out[x] {
                for f in 0..self.homs[x][y].len() {
                    if self.compose(x, y, y, f, self.ident[y]) != f || self.compose(x, x, y, self.ident[x], f) != f {
                        return bad(format!("identity law fails at {x}->{y}"));
                    }
                    let has_inv = (0..self.homs[y][x].len())
                        .any(|g| self.compose(x, y, x, f, g) == self.ident[x] && self.compose(y, x, y, g, f) == self.ident[y]);
                    if !has_inv {
                        return bad(format!("morphism {f} : {x}->{y} is not invertible"));
                    }
                }
            }
        }
        for w in 0..n {
            for &x in &out[w] {
                for &y in &out[x] {
                    for &z in &out[y] {
                        for f in 0..self.homs[w][x].len() {
                            for g in 0..self.homs[x][y].len() {
                                let gf = self.compose(w, x, y, f, g);
                                for h in 0..self.homs[y][z].len() {
                                    let hg = self.compose(x, y, z, g, h);
                                    if self.compose(w, y, z, gf, h) != self.compose(w, x, z, f, hg) {
                                        return bad("composition is not associative".into());
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// The discrete groupoid on `n` objects.
    pub fn discrete(n: usize) -> Self {
        let objects = (0..n).map(|i| format!("x{i}")).collect();
        let homs = (0..n)
            .map(|x| (0..n).map(|y| if x == y { vec![format!("id{x}")] } else { vec![] }).collect())
            .collect();
        let comp = (0..n).map(|x| ((x, x, x, 0, 0), 0)).collect();
        FinGroupoid { objects, homs, comp, ident: vec![0; n] }
    }

    /// One object with the cyclic group of order `n` as automorphisms.
    pub fn cyclic(n: usize) -> Self {
        assert!(n >= 1);
        let homs = vec![vec![(0..n).map(|k| format!("g{k}")).collect()]];
        let comp = (0..n).flat_map(|a| (0..n).map(move |b| ((0, 0, 0, a, b), (a + b) % n))).collect();
        FinGroupoid { objects: vec!["*".into()], homs, comp, ident: vec![0] }
    }

    /// `n` objects, pairwise uniquely isomorphic.
    pub fn codiscrete(n: usize) -> Self {
        let objects = (0..n).map(|i| format!("x{i}")).collect();
        let homs = (0..n)
            .map(|x| (0..n).map(|y| vec![format!("u{x}{y}")]).collect())
            .collect();
        let mut comp = HashMap::new();
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    comp.insert((x, y, z, 0, 0), 0);
                }
            }
        }
        FinGroupoid { objects, homs, comp, ident: vec![0; n] }
    }

    pub fn num_objects(&self) -> usize {
        self.objects.len()
    }

    pub fn object_label(&self, x: usize) -> &str {
        &self.objects[x]
    }

    pub fn object_index(&self, label: &str) -> Option<usize> {
        self.objects.iter().position(|o| o == label)
    }

    pub fn hom_labels(&self, x: usize, y: usize) -> &[String] {
        &self.homs[x][y]
    }

    pub fn hom_count(&self, x: usize, y: usize) -> usize {
        self.homs[x][y].len()
    }

    pub fn identity(&self, x: usize) -> usize {
        self.ident[x]
    }

    /// `g ∘ f` for `f : x → y` and `g : y → z`.
    pub fn compose(&self, x: usize, y: usize, z: usize, f: usize, g: usize) -> usize {
        self.comp[&(x, y, z, f, g)]
    }

    pub fn inverse(&self, x: usize, y: usize, f: usize) -> usize {
        (0..self.homs[y][x].len())
            .find(|&g| self.compose(x, y, x, f, g) == self.ident[x])
            .expect("validated groupoid has inverses")
    }

    pub fn is_discrete(&self) -> bool {
        let n = self.objects.len();
        (0..n).all(|x| (0..n).all(|y| self.homs[x][y].len() == usize::from(x == y)))
    }

    /// One representative per isomorphism class, in index order.
    pub fn class_reps(&self) -> Vec<usize> {
        let mut reps: Vec<usize> = Vec::new();
        for x in 0..self.objects.len() {
            if !reps.iter().any(|&r| !self.homs[r][x].is_empty()) {
                reps.push(x);
            }
        }
        reps
    }

    /// Multiplication table of the automorphism group at `x`.
    pub fn aut_group(&self, x: usize) -> Group {
        let k = self.homs[x][x].len();
        let table = (0..k).map(|a| (0..k).map(|b| self.compose(x, x, x, a, b)).collect()).collect();
        Group { table, unit: self.ident[x] }
    }
}

/// A finite group as a table; `table[a][b]` is `b ∘ a`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Group {
    pub table: Vec<Vec<usize>>,
    pub unit: usize,
}

/// Largest non-abelian group handed to the bijection search.
pub const MAX_GROUP: usize = 24;

impl Group {
    pub fn order(&self) -> usize {
        self.table.len()
    }

    fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    fn elem_order(&self, a: usize) -> usize {
        let mut x = a;
        let mut k = 1;
        while x != self.unit {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    fn is_abelian(&self) -> bool {
        (0..self.order()).all(|a| (0..a).all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    fn generated(&self, gens: &[usize]) -> Vec<bool> {
        let mut seen = vec![false; self.order()];
        seen[self.unit] = true;
        let mut stack = vec![self.unit];
        while let Some(x) = stack.pop() {
            for &g in gens {
                let y = self.mul(x, g);
                if !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
        seen
    }
}

/// Brute-force group isomorphism: choose generators, try all order-respecting
/// images, and check the induced map is a bijective homomorphism.
/// Abelian groups are settled by counting elements of each order.
pub fn group_iso(g: &Group, h: &Group) -> Result<bool, ModelError> {
    for x in [g, h] {
        if x.order() > MAX_AUT {
            return Err(ModelError::TooLarge(x.order()));
        }
    }
    if g.order() != h.order() {
        return Ok(false);
    }
    let mut og: Vec<usize> = (0..g.order()).map(|a| g.elem_order(a)).collect();
    let mut oh: Vec<usize> = (0..h.order()).map(|a| h.elem_order(a)).collect();
    let (og_by, oh_by) = (og.clone(), oh.clone());
    og.sort_unstable();
    oh.sort_unstable();
    if og != oh {
        return Ok(false);
    }
    let (ga, ha) = (g.is_abelian(), h.is_abelian());
    if ga || ha {
        return Ok(ga && ha);
    }
    if g.order() > MAX_GROUP {
        return Err(ModelError::TooLarge(g.order()));
    }
    let mut gens = Vec::new();
    loop {
        let span = g.generated(&gens);
        match (0..g.order()).find(|&a| !span[a]) {
            Some(a) => gens.push(a),
            None => break,
        }
    }
    let mut images = Vec::new();
    Ok(assign(g, h, &gens, &og_by, &oh_by, &mut images))
}

fn assign(g: &Group, h: &Group, gens: &[usize], og: &[usize], oh: &[usize], images: &mut Vec<usize>) -> bool {
    if images.len() == gens.len() {
        return extends(g, h, gens, images);
    }
    let want = og[gens[images.len()]];
    for cand in 0..h.order() {
        if oh[cand] == want {
            images.push(cand);
            if assign(g, h, gens, og, oh, images) {
                return true;
            }
            images.pop();
        }
    }
    false
}

fn extends(g: &Group, h: &Group, gens: &[usize], images: &[usize]) -> bool {
    let mut phi: Vec<Option<usize>> = vec![None; g.order()];
    phi[g.unit] = Some(h.unit);
    let mut stack = vec![g.unit];
    while let Some(x) = stack.pop() {
        let px = phi[x].expect("visited");
        for (&s, &ps) in gens.iter().zip(images) {
            let y = g.mul(x, s);
            let py = h.mul(px, ps);
            match phi[y] {
                Some(q) if q != py => return false,
                Some(_) => {}
                None => {
                    phi[y] = Some(py);
                    stack.push(y);
                }
            }
        }
    }
    let mut hit = vec![false; h.order()];
    for p in phi.iter().flatten() {
        if hit[*p] {
            return false;
        }
        hit[*p] = true;
    }
    if hit.iter().any(|x| !x) {
        return false;
    }
    // Homomorphism on all pairs.
    (0..g.order()).all(|a| {
        (0..g.order()).all(|b| phi[g.mul(a, b)] == Some(h.mul(phi[a].unwrap(), phi[b].unwrap())))
    })
}

/// Equivalence of finite groupoids: matching classes with isomorphic automorphism groups.
pub fn equiv_check(g: &FinGroupoid, h: &FinGroupoid) -> Result<bool, ModelError> {
    let gs: Vec<Group> = g.class_reps().into_iter().map(|x| g.aut_group(x)).collect();
    let hs: Vec<Group> = h.class_reps().into_iter().map(|x| h.aut_group(x)).collect();
    if gs.len() != hs.len() {
        return Ok(false);
    }
    let mut used = vec![false; hs.len()];
    'outer: for a in &gs {
        for (i, b) in hs.iter().enumerate() {
            if !used[i] && group_iso(a, b)? {
                used[i] = true;
                continue 'outer;
            }
        }
        return Ok(false);
    }
    Ok(true)
}

/// `-2` contractible, `-1` empty, `0` a set up to equivalence, `1` otherwise.
pub fn h_level(g: &FinGroupoid) -> i32 {
    let reps = g.class_reps();
    let trivial = reps.iter().all(|&x| g.hom_count(x, x) == 1);
    match (reps.len(), trivial) {
        (0, _) => -1,
        (1, true) => -2,
        (_, true) => 0,
        _ => 1,
    }
}
