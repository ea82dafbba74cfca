//! Text fixtures for groupoids and model environments.
//!
//! Line oriented; `#` starts a comment, blank lines are ignored.
//!
//! ```text
//! groupoid Z2
//!   objects x
//!   hom x x e g        # first label of `hom x x` is the identity of x
//!   comp g g = e       # g then g is e
//! end
//! groupoid D2 = discrete 2     # also: cyclic N, codiscrete N
//!
//! env Z2_A2
//!   base A = D2
//!   base B = Z2
//!   const a0 : A = x0  # an object label of A's groupoid
//!   level B = 1
//! end
//! ```
//!
//! Morphism labels are unique within a groupoid. Composites with an
//! identity are implied; every other composite must be listed. Shorthand
//! groupoids label objects `x0, x1, …`. Environments are validated against
//! their declared levels.

use std::collections::HashMap;

use super::groupoid::FinGroupoid;
use super::{ModelEnv, ModelError};
use super::sem::Val;
use crate::typeexpr::{Name, TypeExpr};

/// The standard battery.
pub const BATTERY: &str = include_str!("../../data/battery.txt");

#[derive(Debug, Clone, Default)]
pub struct Fixture {
    pub groupoids: Vec<(Name, FinGroupoid)>,
    pub envs: Vec<ModelEnv>,
}

impl Fixture {
    pub fn groupoid(&self, name: &str) -> Option<&FinGroupoid> {
        self.groupoids.iter().find(|(n, _)| n == name).map(|(_, g)| g)
    }

    pub fn env(&self, name: &str) -> Option<&ModelEnv> {
        self.envs.iter().find(|e| e.name == name)
    }
}

#[derive(Default)]
struct Draft {
    objects: Vec<String>,
    // (src, dst, labels)
    homs: Vec<(usize, usize, Vec<String>)>,
    comps: Vec<(usize, String, String, String)>,
}

fn err<T>(line: usize, msg: impl Into<String>) -> Result<T, ModelError> {
    Err(ModelError::Fixture { line, msg: msg.into() })
}

impl Draft {
    fn obj(&self, line: usize, x: &str) -> Result<usize, ModelError> {
        match self.objects.iter().position(|o| o == x) {
            Some(i) => Ok(i),
            None => err(line, format!("unknown object `{x}`")),
        }
    }

    fn finish(self, line: usize) -> Result<FinGroupoid, ModelError> {
        let n = self.objects.len();
        let mut homs = vec![vec![Vec::<String>::new(); n]; n];
        let mut where_: HashMap<String, (usize, usize, usize)> = HashMap::new();
        for (s, d, labels) in self.homs {
            if !homs[s][d].is_empty() {
                return err(line, format!("hom {} {} given twice", self.objects[s], self.objects[d]));
            }
            for (i, l) in labels.iter().enumerate() {
                if where_.insert(l.clone(), (s, d, i)).is_some() {
                    return err(line, format!("morphism label `{l}` used twice"));
                }
            }
            homs[s][d] = labels;
        }
        let mut ident = Vec::with_capacity(n);
        for x in 0..n {
            if homs[x][x].is_empty() {
                return err(line, format!("object `{}` has no identity", self.objects[x]));
            }
            ident.push(0);
        }
        let mut comp = HashMap::new();
        for x in 0..n {
            for y in 0..n {
                for f in 0..homs[x][y].len() {
                    comp.insert((x, y, y, f, 0), f);
                    comp.insert((x, x, y, 0, f), f);
                }
            }
        }
        for (l, f, g, h) in self.comps {
            let look = |m: &str| where_.get(m).copied().map_or_else(|| err(l, format!("unknown morphism `{m}`")), Ok);
            let ((x, y, fi), (y2, z, gi), (x2, z2, hi)) = (look(&f)?, look(&g)?, look(&h)?);
            if y != y2 || x != x2 || z != z2 {
                return err(l, format!("`{f}` then `{g}` = `{h}` does not type-check"));
            }
            if let Some(old) = comp.insert((x, y, z, fi, gi), hi) {
                if old != hi {
                    return err(l, format!("conflicting composite for `{f}` then `{g}`"));
                }
            }
        }
        FinGroupoid::new(self.objects, homs, comp, ident).or_else(|e| err(line, e.to_string()))
    }
}

fn shorthand(line: usize, kind: &str, n: &str) -> Result<FinGroupoid, ModelError> {
    let n: usize = n.parse().or_else(|_| err(line, format!("bad size `{n}`")))?;
    match kind {
        "discrete" => Ok(FinGroupoid::discrete(n)),
        "cyclic" if n >= 1 => Ok(FinGroupoid::cyclic(n)),
        "codiscrete" => Ok(FinGroupoid::codiscrete(n)),
        _ => err(line, format!("unknown groupoid `{kind} {n}`")),
    }
}

enum Block {
    None,
    Groupoid(Name, Draft),
    Env(ModelEnv),
}

pub fn parse_fixture(text: &str) -> Result<Fixture, ModelError> {
    let mut fx = Fixture::default();
    let mut block = Block::None;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let w: Vec<&str> = content.split_whitespace().collect();
        block = match (block, w.as_slice()) {
            (Block::None, ["groupoid", name, "=", kind, n]) => {
                fx.groupoids.push((name.to_string(), shorthand(line, kind, n)?));
                Block::None
            }
            (Block::None, ["groupoid", name]) => Block::Groupoid(name.to_string(), Draft::default()),
            (Block::None, ["env", name]) => Block::Env(ModelEnv::new(name)),
            (Block::Groupoid(n, mut d), ["objects", xs @ ..]) => {
                d.objects.extend(xs.iter().map(|x| x.to_string()));
                Block::Groupoid(n, d)
            }
            (Block::Groupoid(n, mut d), ["hom", x, y, ls @ ..]) if !ls.is_empty() => {
                let (s, t) = (d.obj(line, x)?, d.obj(line, y)?);
                d.homs.push((s, t, ls.iter().map(|l| l.to_string()).collect()));
                Block::Groupoid(n, d)
            }
            (Block::Groupoid(n, mut d), ["comp", f, g, "=", h]) => {
                d.comps.push((line, f.to_string(), g.to_string(), h.to_string()));
                Block::Groupoid(n, d)
            }
            (Block::Groupoid(n, d), ["end"]) => {
                fx.groupoids.push((n, d.finish(line)?));
                Block::None
            }
            (Block::Env(mut e), ["base", name, "=", g]) => {
                let Some(gr) = fx.groupoid(g) else {
                    return err(line, format!("unknown groupoid `{g}`"));
                };
                e.bases.insert(name.to_string(), gr.clone());
                Block::Env(e)
            }
            (Block::Env(mut e), ["const", c, ":", ty, "=", label]) => {
                let Some(gr) = e.bases.get(*ty) else {
                    return err(line, format!("unknown base `{ty}`"));
                };
                let Some(ix) = gr.object_index(label) else {
                    return err(line, format!("`{ty}` has no object `{label}`"));
                };
                e.consts.insert(c.to_string(), (TypeExpr::base(ty), Val::Obj(ix)));
                Block::Env(e)
            }
            (Block::Env(mut e), ["level", name, "=", l]) => {
                let l: i32 = l.parse().or_else(|_| err(line, format!("bad level `{l}`")))?;
                e.levels.insert(name.to_string(), l);
                Block::Env(e)
            }
            (Block::Env(e), ["end"]) => {
                e.validate().or_else(|m| err(line, m.to_string()))?;
                fx.envs.push(e);
                Block::None
            }
            _ => return err(line, format!("unexpected `{content}`")),
        };
    }
    match block {
        Block::None => Ok(fx),
        _ => err(text.lines().count(), "unterminated block"),
    }
}
