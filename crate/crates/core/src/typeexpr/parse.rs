//! Reference parser for the unicode rendering.

use thiserror::Error;

use super::{internal_name, synth, Name, Signature, Telescope, Term, TypeExpr};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("parse error at token {pos}: {msg}")]
pub struct ParseError {
    pub pos: usize,
    pub msg: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Sym(&'static str),
}

const SYMS: &[&str] = &[
    "=[", "Σ", "Π", "λ", "→", "×", "=", "]", "∥", "𝟏", "⋆", "·", "(", ")", ",", ".", ":",
];

fn ident_start(c: char) -> bool {
    c.is_alphabetic() || c == '_'
}

fn ident_cont(c: char) -> bool {
    c.is_alphanumeric()
        || c == '_'
        || c == '\''
        || ('\u{0300}'..='\u{036F}').contains(&c)
        || "¹²³⁴⁵⁶⁷⁸⁹⁰₀₁₂₃₄₅₆₇₈₉".contains(c)
}

fn lex(s: &str) -> Result<Vec<Tok>, ParseError> {
    let mut out = Vec::new();
    let mut rest = s;
    'outer: while let Some(c) = rest.chars().next() {
        if c.is_whitespace() {
            rest = &rest[c.len_utf8()..];
            continue;
        }
        for sym in SYMS {
            if rest.starts_with(sym) {
                out.push(Tok::Sym(sym));
                rest = &rest[sym.len()..];
                continue 'outer;
            }
        }
        if ident_start(c) {
            let end = rest.char_indices().find(|&(i, ch)| i > 0 && !ident_cont(ch)).map_or(rest.len(), |(i, _)| i);
            out.push(Tok::Ident(rest[..end].to_string()));
            rest = &rest[end..];
            continue;
        }
        return Err(ParseError { pos: out.len(), msg: format!("unexpected character `{c}`") });
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<Tok>,
    pos: usize,
    ctx: Vec<(Name, TypeExpr)>,
    lams: Vec<Name>,
    sig: &'a Signature,
}

type PResult<T> = Result<T, ParseError>;

impl<'a> Parser<'a> {
    fn err<T>(&self, msg: impl Into<String>) -> PResult<T> {
        Err(ParseError { pos: self.pos, msg: msg.into() })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn at_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Some(Tok::Sym(x)) if *x == s)
    }

    fn eat(&mut self, s: &str) -> bool {
        if self.at_sym(s) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, s: &str) -> PResult<()> {
        if self.eat(s) {
            Ok(())
        } else {
            self.err(format!("expected `{s}`"))
        }
    }

    fn ident(&mut self) -> PResult<String> {
        match self.peek() {
            Some(Tok::Ident(x)) => {
                let x = x.clone();
                self.pos += 1;
                Ok(x)
            }
            _ => self.err("expected identifier"),
        }
    }

    fn bound(&self, x: &str) -> bool {
        self.lams.iter().any(|n| n == x) || self.ctx.iter().any(|(n, _)| n == x)
    }

    fn ty(&mut self) -> PResult<TypeExpr> {
        if self.at_sym("Σ") || self.at_sym("Π") {
            let sigma = self.eat("Σ");
            if !sigma {
                self.expect("Π")?;
            }
            self.expect("(")?;
            let mut names = Vec::new();
            while let Some(Tok::Ident(_)) = self.peek() {
                names.push(internal_name(&self.ident()?));
            }
            if names.is_empty() {
                return self.err("binder needs a name");
            }
            self.expect(":")?;
            let d = self.ty()?;
            self.expect(")")?;
            self.expect(".")?;
            for n in &names {
                self.ctx.push((n.clone(), d.clone()));
            }
            let body = self.ty();
            for _ in &names {
                self.ctx.pop();
            }
            let body = body?;
            return Ok(names.iter().rev().fold(body, |acc, n| {
                if sigma {
                    TypeExpr::sigma(n, d.clone(), acc)
                } else {
                    TypeExpr::pi(n, d.clone(), acc)
                }
            }));
        }
        let l = self.prod()?;
        if self.eat("→") {
            let r = self.ty()?;
            return Ok(TypeExpr::arrow(l, r));
        }
        Ok(l)
    }

    fn prod(&mut self) -> PResult<TypeExpr> {
        let l = self.eqty()?;
        if self.eat("×") {
            let r = self.prod_rhs()?;
            return Ok(TypeExpr::sigma("_", l, r));
        }
        Ok(l)
    }

    // Right operand of ×: a product, or a binder form extending to the right.
    fn prod_rhs(&mut self) -> PResult<TypeExpr> {
        if self.at_sym("Σ") || self.at_sym("Π") {
            return self.ty();
        }
        self.prod()
    }

    fn eqty(&mut self) -> PResult<TypeExpr> {
        let save = self.pos;
        if let Ok(t) = self.atomty() {
            if !self.at_sym("=") && !self.at_sym("=[") && !self.at_sym("·") && !self.starts_atom() {
                return Ok(t);
            }
        }
        self.pos = save;
        let l = self.comp()?;
        let amb = if self.eat("=[") {
            let t = self.ty()?;
            self.expect("]")?;
            Some(t)
        } else {
            self.expect("=")?;
            None
        };
        let r = self.comp()?;
        let amb = match amb {
            Some(t) => t,
            None => match synth(&l, &self.ctx, self.sig).or_else(|| synth(&r, &self.ctx, self.sig)) {
                Some(t) => t,
                None => return self.err("cannot recover the type of an equation"),
            },
        };
        Ok(TypeExpr::id(amb, l, r))
    }

    fn atomty(&mut self) -> PResult<TypeExpr> {
        if self.eat("𝟏") {
            return Ok(TypeExpr::Unit);
        }
        if self.eat("∥") {
            let t = self.ty()?;
            self.expect("∥")?;
            return Ok(TypeExpr::trunc(t));
        }
        if self.eat("(") {
            let t = self.ty()?;
            self.expect(")")?;
            return Ok(t);
        }
        match self.peek() {
            Some(Tok::Ident(x)) => {
                let x = internal_name(x);
                let upper = x.chars().next().is_some_and(|c| c.is_uppercase());
                if upper && !self.bound(&x) && self.sig.get(&x).is_none() {
                    self.pos += 1;
                    Ok(TypeExpr::Base(x))
                } else {
                    self.err("not a type")
                }
            }
            _ => self.err("expected a type"),
        }
    }

    fn starts_atom(&self) -> bool {
        match self.peek() {
            Some(Tok::Ident(_)) => true,
            Some(Tok::Sym(s)) => matches!(*s, "(" | "⋆"),
            None => false,
        }
    }

    fn term(&mut self) -> PResult<Term> {
        if self.eat("λ") {
            let x = internal_name(&self.ident()?);
            self.expect(".")?;
            self.lams.push(x.clone());
            let b = self.term();
            self.lams.pop();
            return Ok(Term::lam(&x, b?));
        }
        self.comp()
    }

    fn comp(&mut self) -> PResult<Term> {
        let mut l = self.app()?;
        while self.eat("·") {
            let r = self.app()?;
            l = Term::comp(l, r);
        }
        Ok(l)
    }

    fn app(&mut self) -> PResult<Term> {
        let mut head = match self.peek() {
            Some(Tok::Ident(k)) if k == "fst" || k == "snd" || k == "refl" => {
                let k = k.clone();
                self.pos += 1;
                let a = Box::new(self.atom()?);
                match k.as_str() {
                    "fst" => Term::Fst(a),
                    "snd" => Term::Snd(a),
                    _ => Term::Refl(a),
                }
            }
            _ => self.atom()?,
        };
        while self.starts_atom() && !self.at_type_ident() {
            let a = self.atom()?;
            head = Term::app(head, a);
        }
        Ok(head)
    }

    fn at_type_ident(&self) -> bool {
        match self.peek() {
            Some(Tok::Ident(x)) => {
                let x = internal_name(x);
                x.chars().next().is_some_and(|c| c.is_uppercase()) && !self.bound(&x) && self.sig.get(&x).is_none()
            }
            _ => false,
        }
    }

    fn atom(&mut self) -> PResult<Term> {
        if self.eat("⋆") {
            return Ok(Term::Star);
        }
        if self.eat("(") {
            let mut items = vec![self.term()?];
            while self.eat(",") {
                items.push(self.term()?);
            }
            self.expect(")")?;
            return Ok(Term::tuple(items));
        }
        let x = internal_name(&self.ident()?);
        if matches!(x.as_str(), "fst" | "snd" | "refl") {
            return self.err("keyword in argument position");
        }
        if !self.bound(&x) && self.sig.get(&x).is_some() {
            Ok(Term::Const(x))
        } else {
            Ok(Term::Var(x))
        }
    }

    fn done(&self) -> PResult<()> {
        if self.pos == self.toks.len() {
            Ok(())
        } else {
            self.err("trailing input")
        }
    }
}

pub fn parse_type(s: &str, ctx: &[(Name, TypeExpr)], sig: &Signature) -> Result<TypeExpr, ParseError> {
    let mut p = Parser { toks: lex(s)?, pos: 0, ctx: ctx.to_vec(), lams: Vec::new(), sig };
    let t = p.ty()?;
    p.done()?;
    Ok(t)
}

pub fn parse_term(s: &str, ctx: &[(Name, TypeExpr)], sig: &Signature) -> Result<Term, ParseError> {
    let mut p = Parser { toks: lex(s)?, pos: 0, ctx: ctx.to_vec(), lams: Vec::new(), sig };
    let t = p.term()?;
    p.done()?;
    Ok(t)
}

/// Parses `name : type` lines, each in the context of the previous ones.
pub fn parse_telescope_lines<S: AsRef<str>>(lines: &[S], sig: &Signature) -> Result<Telescope, ParseError> {
    let mut ctx: Vec<(Name, TypeExpr)> = Vec::new();
    for line in lines {
        let line = line.as_ref();
        let (n, t) = line
            .split_once(" : ")
            .ok_or_else(|| ParseError { pos: 0, msg: format!("missing ` : ` in `{line}`") })?;
        let ty = parse_type(t, &ctx, sig)?;
        ctx.push((internal_name(n.trim()), ty));
    }
    Ok(Telescope::new(ctx))
}
