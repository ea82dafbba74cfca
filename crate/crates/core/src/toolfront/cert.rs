//! Certificate files: a header, the start telescope, one record per step,
//! and the end telescope.
//!
//! ```text
//! truncup-certificate 1
//! n 0
//! level B 0
//! etat 2
//! start
//!   n01 : B
//! step hat-pair
//!   tag SingletonPair(⟨0,0⟩,⟨1,1⟩)
//!   lower 0:0
//!   upper 1:1
//!   add true
//! end
//!   n00 : A → B × ⋆ = ⋆
//! ```
//!
//! Record fields are indented. Types and terms use the unicode syntax;
//! step-level ones are printed outside any telescope context. `etat K`
//! declares the constants `η̃₁ … η̃_K` for parsing.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::cats::HatObj;
use crate::contraction::{finite_certificate, ContractionError};
use crate::diagrams::standard_signature;
use crate::rewrite::{AbsorbDir, ChainStep, EquivChain, EquivStep, LevelEnv, Singleton, SingletonForm, DERIVE};
use crate::typeexpr::{
    internal_name, parse_telescope_lines, parse_term, parse_type, pretty_term, pretty_type_in, telescope_lines, Format,
    Name, Signature, Telescope, Term, TypeExpr,
};

pub const CERT_HEADER: &str = "truncup-certificate 1";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CertificateFile {
    /// Truncation level the certificate was built for, if any.
    pub n: Option<i32>,
    pub chain: EquivChain,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CertError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
}

fn syntax<T>(line: usize, msg: impl Into<String>) -> Result<T, CertError> {
    Err(CertError::Syntax { line, msg: msg.into() })
}

pub fn emit_certificate(n: i32) -> Result<CertificateFile, ContractionError> {
    Ok(CertificateFile { n: Some(n), chain: finite_certificate(n)?.to_chain() })
}

/// `a₀ : A`, `η̃ₖ : B → M_k` for `k ≤ etat`, and the opaque witness constant.
pub fn cert_signature(etat: usize) -> Signature {
    standard_signature(etat).with("a0", TypeExpr::base("A")).with(DERIVE, TypeExpr::Unit)
}

fn consts_tm(t: &Term, out: &mut BTreeSet<Name>) {
    match t {
        Term::Const(c) => {
            out.insert(c.clone());
        }
        Term::Var(_) | Term::Star => {}
        Term::App(a, b) | Term::Pair(a, b) | Term::PathComp(a, b) => {
            consts_tm(a, out);
            consts_tm(b, out);
        }
        Term::Lam(_, b) | Term::Fst(b) | Term::Snd(b) | Term::Refl(b) => consts_tm(b, out),
    }
}

/// Adds the constants a type mentions to `out`.
pub fn type_constants(e: &TypeExpr, out: &mut BTreeSet<Name>) {
    match e {
        TypeExpr::Unit | TypeExpr::Base(_) => {}
        TypeExpr::Sigma(_, d, c) | TypeExpr::Pi(_, d, c) | TypeExpr::Arrow(d, c) => {
            type_constants(d, out);
            type_constants(c, out);
        }
        TypeExpr::Id(t, a, b) => {
            type_constants(t, out);
            consts_tm(a, out);
            consts_tm(b, out);
        }
        TypeExpr::Trunc(t) => type_constants(t, out),
    }
}

/// Constants mentioned anywhere in the chain.
pub fn chain_constants(c: &EquivChain) -> BTreeSet<Name> {
    let mut out = BTreeSet::new();
    for tel in [&c.start, &c.end] {
        for (_, t) in &tel.entries {
            type_constants(t, &mut out);
        }
    }
    for s in &c.steps {
        match &s.step {
            EquivStep::AddSingleton { singleton, .. } => {
                for (_, t) in &singleton.prefix {
                    type_constants(t, &mut out);
                }
                type_constants(&singleton.carrier_ty, &mut out);
                type_constants(&singleton.path_ty, &mut out);
            }
            EquivStep::AddProp { ty, witness, .. } => {
                type_constants(ty, &mut out);
                consts_tm(witness, &mut out);
            }
            EquivStep::RemoveProp { witness, .. } => consts_tm(witness, &mut out),
            EquivStep::LevelExpand { ty, .. } => type_constants(ty, &mut out),
            _ => {}
        }
    }
    out
}

fn etat_bound(c: &EquivChain) -> usize {
    chain_constants(c).iter().filter_map(|n| n.strip_prefix("etat")?.parse().ok()).max().unwrap_or(0)
}

struct Writer {
    sig: Signature,
    out: Vec<String>,
}

impl Writer {
    fn field(&mut self, key: &str, val: impl AsRef<str>) {
        self.out.push(format!("  {key} {}", val.as_ref()));
    }

    fn ty(&self, t: &TypeExpr) -> String {
        pretty_type_in(t, Format::Unicode, &[], &self.sig)
    }

    fn tm(&self, t: &Term) -> String {
        pretty_term(t, Format::Unicode)
    }

    fn telescope(&mut self, head: &str, t: &Telescope) {
        self.out.push(head.to_string());
        for l in telescope_lines(t, Format::Unicode, &self.sig) {
            self.out.push(format!("  {l}"));
        }
    }

    fn step(&mut self, s: &ChainStep) {
        self.out.push(format!("step {}", s.step.kind()));
        self.field("tag", &s.tag);
        match &s.step {
            EquivStep::AddSingleton { at, singleton: sg } => {
                self.field("at", at.to_string());
                let form = match &sg.form {
                    SingletonForm::Family(n) => format!("family {n}"),
                    SingletonForm::Paired(n) => format!("paired {n}"),
                };
                self.field("form", form);
                for (x, t) in &sg.prefix {
                    let line = format!("{x} : {}", self.ty(t));
                    self.field("prefix", line);
                }
                let line = format!("{} : {}", sg.carrier, self.ty(&sg.carrier_ty));
                self.field("carrier", line);
                let line = self.ty(&sg.path_ty);
                self.field("path", line);
            }
            EquivStep::RemoveSingleton { at, paired } => {
                self.field("at", at.to_string());
                self.field("paired", paired.to_string());
            }
            EquivStep::Distribute { at, names } => {
                self.field("at", at.to_string());
                self.field("names", format!("{} {}", names.0, names.1));
            }
            EquivStep::Undistribute { at, name, binder } => {
                self.field("at", at.to_string());
                self.field("name", name);
                self.field("binder", binder);
            }
            EquivStep::Reorder { perm } => {
                let ps: Vec<String> = perm.iter().map(|p| p.to_string()).collect();
                self.field("perm", ps.join(" "));
            }
            EquivStep::AddProp { at, name, ty, witness } => {
                self.field("at", at.to_string());
                self.field("name", name);
                let (t, w) = (self.ty(ty), self.tm(witness));
                self.field("type", t);
                self.field("witness", w);
            }
            EquivStep::RemoveProp { at, witness } => {
                self.field("at", at.to_string());
                let w = self.tm(witness);
                self.field("witness", w);
            }
            EquivStep::TruncAbsorb { at, dir } => {
                self.field("at", at.to_string());
                self.field("dir", dir.name());
            }
            EquivStep::LevelContract { at } => self.field("at", at.to_string()),
            EquivStep::LevelExpand { at, name, ty } => {
                self.field("at", at.to_string());
                self.field("name", name);
                let t = self.ty(ty);
                self.field("type", t);
            }
            EquivStep::HatPair { lower, upper, add } => {
                self.field("lower", lower.token());
                self.field("upper", upper.token());
                self.field("add", add.to_string());
            }
        }
    }
}

pub fn write_certificate(c: &CertificateFile) -> String {
    let etat = etat_bound(&c.chain);
    let mut w = Writer { sig: cert_signature(etat), out: vec![CERT_HEADER.to_string()] };
    if let Some(n) = c.n {
        w.out.push(format!("n {n}"));
    }
    for (b, l) in &c.chain.levels {
        w.out.push(format!("level {b} {l}"));
    }
    w.out.push(format!("etat {etat}"));
    w.telescope("start", &c.chain.start);
    for s in &c.chain.steps {
        w.step(s);
    }
    w.telescope("end", &c.chain.end);
    let mut text = w.out.join("\n");
    text.push('\n');
    text
}

/// An indented record line: its number and text without the indent.
type Body = Vec<(usize, String)>;

struct Fields {
    head: usize,
    kind: String,
    items: Vec<(usize, String, String)>,
}

impl Fields {
    fn new(head: usize, kind: &str, body: &Body) -> Self {
        let items = body
            .iter()
            .map(|(line, text)| {
                let (k, v) = text.split_once(' ').unwrap_or((text.as_str(), ""));
                (*line, k.to_string(), v.to_string())
            })
            .collect();
        Fields { head, kind: kind.to_string(), items }
    }

    fn all(&self, key: &str) -> Vec<(usize, &str)> {
        self.items.iter().filter(|(_, k, _)| k == key).map(|(l, _, v)| (*l, v.as_str())).collect()
    }

    fn one(&self, key: &str) -> Result<(usize, &str), CertError> {
        match self.all(key).as_slice() {
            [x] => Ok(*x),
            [] => syntax(self.head, format!("`{}` step lacks `{key}`", self.kind)),
            _ => syntax(self.head, format!("`{}` step repeats `{key}`", self.kind)),
        }
    }

    fn known(&self, keys: &[&str]) -> Result<(), CertError> {
        for (l, k, _) in &self.items {
            if k != "tag" && !keys.contains(&k.as_str()) {
                return syntax(*l, format!("unknown field `{k}` for `{}`", self.kind));
            }
        }
        Ok(())
    }

    fn num(&self, key: &str) -> Result<usize, CertError> {
        let (l, v) = self.one(key)?;
        v.trim().parse().or_else(|_| syntax(l, format!("`{key}` needs a number, got `{v}`")))
    }

    fn flag(&self, key: &str) -> Result<bool, CertError> {
        let (l, v) = self.one(key)?;
        match v.trim() {
            "true" => Ok(true),
            "false" => Ok(false),
            _ => syntax(l, format!("`{key}` needs true or false, got `{v}`")),
        }
    }

    fn name(&self, key: &str) -> Result<Name, CertError> {
        let (l, v) = self.one(key)?;
        ident(l, v)
    }
}

fn ident(line: usize, s: &str) -> Result<Name, CertError> {
    let s = s.trim();
    if s.is_empty() || s.contains(char::is_whitespace) {
        return syntax(line, format!("expected a single name, got `{s}`"));
    }
    Ok(internal_name(s))
}

struct Reader {
    sig: Signature,
}

impl Reader {
    fn ty(&self, line: usize, s: &str) -> Result<TypeExpr, CertError> {
        parse_type(s, &[], &self.sig).or_else(|e| syntax(line, e.to_string()))
    }

    fn tm(&self, line: usize, s: &str) -> Result<Term, CertError> {
        parse_term(s, &[], &self.sig).or_else(|e| syntax(line, e.to_string()))
    }

    fn typed(&self, line: usize, s: &str) -> Result<(Name, TypeExpr), CertError> {
        let Some((n, t)) = s.split_once(" : ") else {
            return syntax(line, format!("expected `name : type`, got `{s}`"));
        };
        Ok((ident(line, n)?, self.ty(line, t)?))
    }

    fn telescope(&self, body: &Body) -> Result<Telescope, CertError> {
        let lines: Vec<&str> = body.iter().map(|(_, s)| s.as_str()).collect();
        parse_telescope_lines(&lines, &self.sig).or_else(|e| syntax(body.first().map_or(0, |b| b.0), e.to_string()))
    }

    fn hat(&self, f: &Fields, key: &str) -> Result<HatObj, CertError> {
        let (l, v) = f.one(key)?;
        HatObj::parse_token(v.trim()).or_else(|e| syntax(l, e.to_string()))
    }

    fn step(&self, head: usize, kind: &str, body: &Body) -> Result<ChainStep, CertError> {
        let f = Fields::new(head, kind, body);
        let tag = f.one("tag")?.1.to_string();
        let step = match kind {
            "add-singleton" => {
                f.known(&["at", "form", "prefix", "carrier", "path"])?;
                let (l, form) = f.one("form")?;
                let form = match form.split_once(' ') {
                    Some(("family", n)) => SingletonForm::Family(ident(l, n)?),
                    Some(("paired", n)) => SingletonForm::Paired(ident(l, n)?),
                    _ => return syntax(l, format!("bad singleton form `{form}`")),
                };
                let prefix = f.all("prefix").into_iter().map(|(l, v)| self.typed(l, v)).collect::<Result<_, _>>()?;
                let (l, c) = f.one("carrier")?;
                let (carrier, carrier_ty) = self.typed(l, c)?;
                let (l, p) = f.one("path")?;
                let path_ty = self.ty(l, p)?;
                EquivStep::AddSingleton { at: f.num("at")?, singleton: Singleton { form, prefix, carrier, carrier_ty, path_ty } }
            }
            "remove-singleton" => {
                f.known(&["at", "paired"])?;
                EquivStep::RemoveSingleton { at: f.num("at")?, paired: f.flag("paired")? }
            }
            "distribute" => {
                f.known(&["at", "names"])?;
                let (l, v) = f.one("names")?;
                let Some((g, h)) = v.trim().split_once(' ') else {
                    return syntax(l, "`names` needs two names");
                };
                EquivStep::Distribute { at: f.num("at")?, names: (ident(l, g)?, ident(l, h)?) }
            }
            "undistribute" => {
                f.known(&["at", "name", "binder"])?;
                EquivStep::Undistribute { at: f.num("at")?, name: f.name("name")?, binder: f.name("binder")? }
            }
            "reorder" => {
                f.known(&["perm"])?;
                let (l, v) = f.one("perm")?;
                let perm = v
                    .split_whitespace()
                    .map(|p| p.parse::<usize>().or_else(|_| syntax(l, format!("bad index `{p}`"))))
                    .collect::<Result<_, _>>()?;
                EquivStep::Reorder { perm }
            }
            "add-prop" => {
                f.known(&["at", "name", "type", "witness"])?;
                let (lt, t) = f.one("type")?;
                let (lw, w) = f.one("witness")?;
                EquivStep::AddProp { at: f.num("at")?, name: f.name("name")?, ty: self.ty(lt, t)?, witness: self.tm(lw, w)? }
            }
            "remove-prop" => {
                f.known(&["at", "witness"])?;
                let (lw, w) = f.one("witness")?;
                EquivStep::RemoveProp { at: f.num("at")?, witness: self.tm(lw, w)? }
            }
            "trunc-absorb" => {
                f.known(&["at", "dir"])?;
                let (l, d) = f.one("dir")?;
                let Some(dir) = AbsorbDir::parse(d.trim()) else {
                    return syntax(l, format!("unknown direction `{d}`"));
                };
                EquivStep::TruncAbsorb { at: f.num("at")?, dir }
            }
            "level-contract" => {
                f.known(&["at"])?;
                EquivStep::LevelContract { at: f.num("at")? }
            }
            "level-expand" => {
                f.known(&["at", "name", "type"])?;
                let (lt, t) = f.one("type")?;
                EquivStep::LevelExpand { at: f.num("at")?, name: f.name("name")?, ty: self.ty(lt, t)? }
            }
            "hat-pair" => {
                f.known(&["lower", "upper", "add"])?;
                EquivStep::HatPair { lower: self.hat(&f, "lower")?, upper: self.hat(&f, "upper")?, add: f.flag("add")? }
            }
            _ => return syntax(head, format!("unknown step kind `{kind}`")),
        };
        Ok(ChainStep { tag, step })
    }
}

pub fn parse_certificate(text: &str) -> Result<CertificateFile, CertError> {
    // Group lines into records: a flush-left head and its indented body.
    let mut records: Vec<(usize, String, Body)> = Vec::new();
    let mut saw_header = false;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        if raw.trim().is_empty() || raw.trim_start().starts_with('#') {
            continue;
        }
        if !saw_header {
            if raw.trim_end() != CERT_HEADER {
                return syntax(line, format!("expected `{CERT_HEADER}`"));
            }
            saw_header = true;
            continue;
        }
        if let Some(rest) = raw.strip_prefix("  ") {
            match records.last_mut() {
                Some(r) => r.2.push((line, rest.trim_end().to_string())),
                None => return syntax(line, "indented line outside a record"),
            }
        } else {
            records.push((line, raw.trim_end().to_string(), Vec::new()));
        }
    }
    if !saw_header {
        return syntax(1, "empty certificate");
    }

    let mut n = None;
    let mut levels = LevelEnv::new();
    let mut etat = None;
    let mut start = None;
    let mut end = None;
    let mut step_records = Vec::new();
    for (line, head, body) in records {
        let (key, rest) = head.split_once(' ').unwrap_or((head.as_str(), ""));
        let no_body = |what: &str| if body.is_empty() { Ok(()) } else { syntax(line, format!("`{what}` takes no body")) };
        match key {
            "n" => {
                no_body("n")?;
                n = Some(rest.trim().parse::<i32>().or_else(|_| syntax(line, format!("bad level `{rest}`")))?);
            }
            "level" => {
                no_body("level")?;
                let mut it = rest.split_whitespace();
                let (Some(b), Some(l), None) = (it.next(), it.next(), it.next()) else {
                    return syntax(line, "expected `level NAME K`");
                };
                let l = l.parse::<i32>().or_else(|_| syntax(line, format!("bad level `{l}`")))?;
                if levels.insert(b.to_string(), l).is_some() {
                    return syntax(line, format!("level of `{b}` given twice"));
                }
            }
            "etat" => {
                no_body("etat")?;
                etat = Some(rest.trim().parse::<usize>().or_else(|_| syntax(line, format!("bad bound `{rest}`")))?);
            }
            "start" if start.is_none() && step_records.is_empty() => start = Some(body),
            "end" if end.is_none() => end = Some(body),
            "step" if end.is_none() => step_records.push((line, rest.trim().to_string(), body)),
            _ => return syntax(line, format!("unexpected `{head}`")),
        }
    }
    let Some(etat) = etat else {
        return syntax(1, "missing `etat` line");
    };
    let reader = Reader { sig: cert_signature(etat) };
    let Some(start) = start else {
        return syntax(1, "missing `start` telescope");
    };
    let Some(end) = end else {
        return syntax(1, "missing `end` telescope");
    };
    let start = reader.telescope(&start)?;
    let end = reader.telescope(&end)?;
    let steps = step_records
        .iter()
        .map(|(line, kind, body)| reader.step(*line, kind, body))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(CertificateFile { n, chain: EquivChain { start, steps, end, levels } })
}
