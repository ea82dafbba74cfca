use super::{alpha_eq_ty, display_name, synth, Name, Signature, Telescope, Term, TypeExpr};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Format {
    Unicode,
    Latex,
    Agda,
    Coq,
}

impl Format {
    pub fn parse(s: &str) -> Option<Format> {
        match s {
            "unicode" => Some(Format::Unicode),
            "latex" => Some(Format::Latex),
            "agda" => Some(Format::Agda),
            "coq" => Some(Format::Coq),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Format::Unicode => "unicode",
            Format::Latex => "latex",
            Format::Agda => "agda",
            Format::Coq => "coq",
        }
    }

    pub fn all() -> [Format; 4] {
        [Format::Agda, Format::Coq, Format::Latex, Format::Unicode]
    }
}

// Type precedences.
const T_BIND: u8 = 0;
const T_ARROW: u8 = 1;
const T_PROD: u8 = 2;
const T_EQ: u8 = 3;
const T_ATOM: u8 = 4;

// Term precedences.
const M_LAM: u8 = 0;
const M_COMP: u8 = 1;
const M_APP: u8 = 2;
const M_ATOM: u8 = 3;

struct Printer<'a> {
    fmt: Format,
    sig: &'a Signature,
    ctx: Vec<(Name, TypeExpr)>,
}

fn paren(s: String, own: u8, need: u8) -> String {
    if own < need {
        format!("({s})")
    } else {
        s
    }
}

impl<'a> Printer<'a> {
    fn name(&self, n: &str) -> String {
        match self.fmt {
            Format::Unicode => display_name(n).to_string(),
            Format::Agda | Format::Coq => n.to_string(),
            Format::Latex => latex_name(n),
        }
    }

    fn binder_group(&mut self, x: &Name, d: &TypeExpr, c: &TypeExpr, sigma: bool) -> (Vec<Name>, TypeExpr) {
        let mut names = vec![x.clone()];
        let mut body = c.clone();
        loop {
            let next = match (&body, sigma) {
                (TypeExpr::Sigma(y, d2, c2), true) | (TypeExpr::Pi(y, d2, c2), false) => {
                    let closed = names.iter().all(|n| !d2.mentions(n));
                    if closed && alpha_eq_ty(d2, d) && c2.mentions(y) {
                        Some((y.clone(), (**c2).clone()))
                    } else {
                        None
                    }
                }
                _ => None,
            };
            match next {
                Some((y, c2)) => {
                    names.push(y);
                    body = c2;
                }
                None => break,
            }
        }
        (names, body)
    }

    fn ty(&mut self, e: &TypeExpr, need: u8) -> String {
        match e {
            TypeExpr::Unit => match self.fmt {
                Format::Unicode => "𝟏",
                Format::Latex => "\\mathbf{1}",
                Format::Agda => "⊤",
                Format::Coq => "unit",
            }
            .to_string(),
            TypeExpr::Base(b) => self.name(b),
            TypeExpr::Trunc(t) => match self.fmt {
                Format::Unicode => format!("∥{}∥", self.ty(t, T_BIND)),
                Format::Latex => format!("\\lVert {} \\rVert", self.ty(t, T_BIND)),
                Format::Agda => format!("∥ {} ∥", self.ty(t, T_BIND)),
                Format::Coq => paren(format!("trunc {}", self.ty(t, T_ATOM)), T_EQ, need),
            },
            TypeExpr::Arrow(d, c) => self.arrow(d, c, need),
            TypeExpr::Pi(x, d, c) if !c.mentions(x) => {
                self.ctx.push((x.clone(), (**d).clone()));
                let s = self.arrow(d, c, need);
                self.ctx.pop();
                s
            }
            TypeExpr::Sigma(x, d, c) if !c.mentions(x) && self.fmt != Format::Coq => {
                let l = self.ty(d, T_EQ);
                self.ctx.push((x.clone(), (**d).clone()));
                let r = self.ty(c, T_PROD);
                self.ctx.pop();
                let op = if self.fmt == Format::Latex { "\\times" } else { "×" };
                paren(format!("{l} {op} {r}"), T_PROD, need)
            }
            TypeExpr::Sigma(x, d, c) | TypeExpr::Pi(x, d, c) => {
                let sigma = matches!(e, TypeExpr::Sigma(..));
                let (names, body) = if matches!(self.fmt, Format::Coq | Format::Agda) && sigma {
                    (vec![x.clone()], (**c).clone())
                } else {
                    self.binder_group(x, d, c, sigma)
                };
                let dom = self.ty(d, T_BIND);
                for n in &names {
                    self.ctx.push((n.clone(), (**d).clone()));
                }
                let shown: Vec<String> = names.iter().map(|n| self.name(n)).collect();
                let b = self.ty(&body, T_BIND);
                for _ in &names {
                    self.ctx.pop();
                }
                let xs = match self.fmt {
                    Format::Latex => shown.join("\\,"),
                    _ => shown.join(" "),
                };
                let s = match (self.fmt, sigma) {
                    (Format::Unicode, true) => format!("Σ ({xs} : {dom}). {b}"),
                    (Format::Unicode, false) => format!("Π ({xs} : {dom}). {b}"),
                    (Format::Latex, true) => format!("\\Sigma ({xs} : {dom}).\\, {b}"),
                    (Format::Latex, false) => format!("\\Pi ({xs} : {dom}).\\, {b}"),
                    (Format::Agda, true) => format!("Σ[ {xs} ∈ {dom} ] {b}"),
                    (Format::Agda, false) => format!("({xs} : {dom}) → {b}"),
                    (Format::Coq, true) => return format!("{{{xs} : {dom} & {b}}}"),
                    (Format::Coq, false) => format!("forall ({xs} : {dom}), {b}"),
                };
                paren(s, T_BIND, need)
            }
            TypeExpr::Id(t, a, b) => {
                let l = self.tm(a, M_COMP);
                let r = self.tm(b, M_COMP);
                let s = match self.fmt {
                    Format::Unicode => {
                        let recovered = synth(a, &self.ctx, self.sig).or_else(|| synth(b, &self.ctx, self.sig));
                        if recovered.is_some_and(|x| alpha_eq_ty(&x, t)) {
                            format!("{l} = {r}")
                        } else {
                            format!("{l} =[{}] {r}", self.ty(t, T_BIND))
                        }
                    }
                    Format::Latex | Format::Coq => format!("{l} = {r}"),
                    Format::Agda => format!("{l} ≡ {r}"),
                };
                paren(s, T_EQ, need)
            }
        }
    }

    fn arrow(&mut self, d: &TypeExpr, c: &TypeExpr, need: u8) -> String {
        let l = self.ty(d, T_PROD);
        let r = self.ty(c, T_ARROW);
        let op = match self.fmt {
            Format::Unicode | Format::Agda => "→",
            Format::Latex => "\\to",
            Format::Coq => "->",
        };
        paren(format!("{l} {op} {r}"), T_ARROW, need)
    }

    fn tm(&mut self, t: &Term, need: u8) -> String {
        match t {
            Term::Var(x) | Term::Const(x) => self.name(x),
            Term::Star => match self.fmt {
                Format::Unicode => "⋆",
                Format::Latex => "\\star",
                Format::Agda | Format::Coq => "tt",
            }
            .to_string(),
            Term::App(..) => {
                let (head, args) = t.spine();
                let mut parts = vec![self.tm(head, M_APP)];
                for a in args {
                    parts.push(self.tm(a, M_ATOM));
                }
                let sep = if self.fmt == Format::Latex { "\\," } else { " " };
                paren(parts.join(sep), M_APP, need)
            }
            Term::Lam(x, b) => {
                let xs = self.name(x);
                let body = self.tm(b, M_LAM);
                let s = match self.fmt {
                    Format::Unicode => format!("λ {xs}. {body}"),
                    Format::Latex => format!("\\lambda {xs}.\\, {body}"),
                    Format::Agda => format!("λ {xs} → {body}"),
                    Format::Coq => format!("fun {xs} => {body}"),
                };
                paren(s, M_LAM, need)
            }
            Term::Pair(a, b) => {
                if self.fmt == Format::Coq {
                    let s = format!("existT _ {} {}", self.tm(a, M_ATOM), self.tm(b, M_ATOM));
                    return paren(s, M_APP, need);
                }
                let mut items = vec![self.tm(a, M_LAM)];
                let mut rest = &**b;
                while let Term::Pair(x, y) = rest {
                    items.push(self.tm(x, M_LAM));
                    rest = y;
                }
                items.push(self.tm(rest, M_LAM));
                let sep = if self.fmt == Format::Latex { ", " } else { " , " };
                format!("({})", items.join(sep))
            }
            Term::Fst(a) | Term::Snd(a) => {
                let first = matches!(t, Term::Fst(_));
                let kw = match (self.fmt, first) {
                    (Format::Unicode, true) => "fst",
                    (Format::Unicode, false) => "snd",
                    (Format::Latex, true) => "\\mathsf{pr}_1",
                    (Format::Latex, false) => "\\mathsf{pr}_2",
                    (Format::Agda, true) => "proj₁",
                    (Format::Agda, false) => "proj₂",
                    (Format::Coq, true) => "projT1",
                    (Format::Coq, false) => "projT2",
                };
                let sep = if self.fmt == Format::Latex { "\\," } else { " " };
                paren(format!("{kw}{sep}{}", self.tm(a, M_ATOM)), M_APP, need)
            }
            Term::Refl(a) => match self.fmt {
                Format::Unicode => paren(format!("refl {}", self.tm(a, M_ATOM)), M_APP, need),
                Format::Latex => paren(format!("\\mathsf{{refl}}\\,{}", self.tm(a, M_ATOM)), M_APP, need),
                Format::Agda => "refl".to_string(),
                Format::Coq => "eq_refl".to_string(),
            },
            Term::PathComp(p, q) => match self.fmt {
                Format::Unicode | Format::Latex => {
                    let op = if self.fmt == Format::Latex { "\\cdot" } else { "·" };
                    let s = format!("{} {op} {}", self.tm(p, M_COMP), self.tm(q, M_APP));
                    paren(s, M_COMP, need)
                }
                Format::Agda | Format::Coq => {
                    let f = if self.fmt == Format::Agda { "trans" } else { "eq_trans" };
                    let s = format!("{f} {} {}", self.tm(p, M_ATOM), self.tm(q, M_ATOM));
                    paren(s, M_APP, need)
                }
            },
        }
    }
}

fn latex_name(n: &str) -> String {
    let special = match n {
        "a0" => Some("\\mathfrak{a}_{0}".to_string()),
        _ if n.starts_with("etat") => Some(format!("\\tilde{{\\eta}}_{{{}}}", &n[4..])),
        _ => None,
    };
    if let Some(s) = special {
        return s;
    }
    let split = n.trim_end_matches(|c: char| c.is_ascii_digit()).len();
    let (stem, digits) = n.split_at(split);
    let stem = stem.replace('_', "\\_");
    if digits.is_empty() {
        stem
    } else if super::TRANSLITERATION.iter().any(|(i, d)| *i == n && !d.contains(['₀', '₁', '₂', '₃', '₄', '₅'])) {
        format!("{stem}^{{{digits}}}")
    } else {
        format!("{stem}_{{{digits}}}")
    }
}

pub fn pretty_type(e: &TypeExpr, fmt: Format) -> String {
    pretty_type_in(e, fmt, &[], &Signature::default())
}

pub fn pretty_type_in(e: &TypeExpr, fmt: Format, ctx: &[(Name, TypeExpr)], sig: &Signature) -> String {
    let mut p = Printer { fmt, sig, ctx: ctx.to_vec() };
    p.ty(e, T_BIND)
}

pub fn pretty_term(t: &Term, fmt: Format) -> String {
    let sig = Signature::default();
    let mut p = Printer { fmt, sig: &sig, ctx: Vec::new() };
    p.tm(t, M_LAM)
}

/// The telescope as one nested Σ-type.
pub fn pretty_telescope(t: &Telescope, fmt: Format, sig: &Signature) -> String {
    pretty_type_in(&t.to_type(), fmt, &[], sig)
}

/// One `name : type` line per entry, each printed in the context of the previous ones.
pub fn telescope_lines(t: &Telescope, fmt: Format, sig: &Signature) -> Vec<String> {
    let mut p = Printer { fmt, sig, ctx: Vec::new() };
    let mut out = Vec::new();
    for (n, ty) in &t.entries {
        let s = p.ty(ty, T_BIND);
        out.push(format!("{} : {}", p.name(n), s));
        p.ctx.push((n.clone(), ty.clone()));
    }
    out
}
