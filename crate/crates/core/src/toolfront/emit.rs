//! Statements of the finite universal property in four syntaxes.

use std::collections::BTreeSet;

use crate::diagrams::{cone_matching, etat_name, nice_tower, raw_tower, standard_signature};
use crate::typeexpr::{pretty_telescope, pretty_term, pretty_type_in, Format, Name, Telescope, Term};

use super::cert::{emit_certificate, type_constants, write_certificate};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EmitRequest {
    pub n: i32,
    pub format: Format,
    pub certificate: bool,
    /// Use the readable tower where one exists.
    pub nice: bool,
}

/// `A →ᵏ B`, readable when asked for and available.
pub fn tower_telescope(k: i32, nice: bool) -> Telescope {
    match nice_tower(k) {
        Ok(t) if nice => t,
        _ => raw_tower(k),
    }
}

fn superscript(k: i32) -> String {
    const SUP: [char; 10] = ['⁰', '¹', '²', '³', '⁴', '⁵', '⁶', '⁷', '⁸', '⁹'];
    let digits: String = k.unsigned_abs().to_string().chars().map(|c| SUP[c.to_digit(10).unwrap_or(0) as usize]).collect();
    if k < 0 {
        format!("⁻{digits}")
    } else {
        digits
    }
}

fn level_word(n: i32) -> String {
    if n < 0 {
        format!("({n})-type")
    } else {
        format!("{n}-type")
    }
}

fn module_name(n: i32) -> String {
    if n < 0 {
        format!("TruncUpNeg{}", n.unsigned_abs())
    } else {
        format!("TruncUp{n}")
    }
}

/// The `η̃ₖ` a tower mentions, in order.
fn etats(t: &Telescope) -> Vec<usize> {
    let mut names: BTreeSet<Name> = BTreeSet::new();
    for (_, e) in &t.entries {
        type_constants(e, &mut names);
    }
    let mut ks: Vec<usize> = names.iter().filter_map(|n| n.strip_prefix("etat")?.parse().ok()).collect();
    ks.sort_unstable();
    ks
}

struct Parts {
    tower: String,
    /// `(name, type, body at x)` for each `η̃ₖ`.
    defs: Vec<(String, String, String)>,
}

fn parts(t: &Telescope, fmt: Format) -> Parts {
    let ks = etats(t);
    let sig = standard_signature(ks.last().copied().unwrap_or(0));
    let tower = pretty_telescope(t, fmt, &sig);
    let defs = ks
        .iter()
        .map(|&k| {
            let name = etat_name(k);
            let ty = sig.get(&name).expect("signature covers the tower").clone();
            let shown = pretty_term(&Term::Const(name.clone()), fmt);
            (shown, pretty_type_in(&ty, fmt, &[], &sig), pretty_term(&cone_matching(k, &Term::var("x")), fmt))
        })
        .collect();
    Parts { tower, defs }
}

fn comment_block(fmt: Format, text: &str) -> String {
    let mut out = String::new();
    match fmt {
        Format::Coq => {
            out.push_str("(*\n");
            for l in text.lines() {
                out.push_str(&format!("   {l}\n"));
            }
            out.push_str("*)\n");
        }
        _ => {
            let lead = match fmt {
                Format::Agda => "--",
                Format::Latex => "%",
                _ => "#",
            };
            for l in text.lines() {
                out.push_str(&format!("{lead} {l}\n"));
            }
        }
    }
    out
}

pub fn emit_statement(r: &EmitRequest) -> String {
    let n = r.n;
    let k = n + 1;
    let t = tower_telescope(k, r.nice);
    let p = parts(&t, r.format);
    let title = format!("Finite universal property of the propositional truncation, n = {n}.");
    let mut out = String::new();
    match r.format {
        Format::Agda => {
            out.push_str(&format!("-- {title}\n-- Statement only; the certificate is checked by `truncup verify`.\n"));
            out.push_str("{-# OPTIONS --without-K #-}\n");
            out.push_str(&format!("module {} where\n\n", module_name(n)));
            out.push_str("open import Data.Nat using (ℕ)\n");
            out.push_str("open import Data.Product using (Σ; Σ-syntax; _×_; _,_)\n");
            out.push_str("open import Data.Unit using (⊤; tt)\n");
            out.push_str("open import Relation.Binary.PropositionalEquality using (_≡_; refl; trans)\n\n");
            out.push_str("postulate\n");
            out.push_str("  ∥_∥ : Set → Set\n");
            out.push_str("  isOfHLevel : ℕ → Set → Set\n");
            out.push_str("  isEquiv : {X Y : Set} → (X → Y) → Set\n\n");
            out.push_str(&format!("module _ (A : Set) (B : Set) (B-level : isOfHLevel {} B) where\n\n", n + 2));
            for (name, ty, body) in &p.defs {
                out.push_str(&format!("  {name} : {ty}\n  {name} x = {body}\n\n"));
            }
            out.push_str(&format!("  Tower : Set\n  Tower = {}\n\n", p.tower));
            out.push_str("  postulate\n");
            out.push_str("    canonical : (∥ A ∥ → B) → Tower\n");
            out.push_str("    universal-property : isEquiv canonical\n");
        }
        Format::Coq => {
            out.push_str(&format!("(* {title} *)\n(* Statement only; the certificate is checked by `truncup verify`. *)\n\n"));
            out.push_str("Axiom trunc : Type -> Type.\n");
            out.push_str("Axiom IsHLevel : nat -> Type -> Type.\n");
            out.push_str("Axiom IsEquiv : forall {X Y : Type}, (X -> Y) -> Type.\n\n");
            out.push_str(&format!("Section {}.\n\n", module_name(n)));
            out.push_str("Variables A B : Type.\n");
            out.push_str(&format!("Hypothesis B_level : IsHLevel {} B.\n\n", n + 2));
            for (name, ty, body) in &p.defs {
                out.push_str(&format!("Definition {name} : {ty} :=\n  fun x => {body}.\n\n"));
            }
            out.push_str(&format!("Definition Tower : Type :=\n  {}.\n\n", p.tower));
            out.push_str("Variable canonical : (trunc A -> B) -> Tower.\n");
            out.push_str("Hypothesis universal_property : IsEquiv canonical.\n\n");
            out.push_str(&format!("End {}.\n", module_name(n)));
        }
        Format::Latex => {
            out.push_str(&format!("% {title}\n"));
            let arrow = format!("A \\to^{{{k}}} B");
            out.push_str("\\begin{align*}\n");
            for (name, ty, body) in &p.defs {
                out.push_str(&format!("  {name} &: {ty} \\\\\n  {name}\\,x &:\\equiv {body} \\\\\n"));
            }
            out.push_str(&format!("  {arrow} &:\\equiv {}\n", p.tower));
            out.push_str("\\end{align*}\n");
            out.push_str(&format!(
                "For every type $A$ and every ${}$-type $B$, the canonical map\n\\[ (\\lVert A \\rVert \\to B) \\to ({arrow}) \\]\nis an equivalence.\n",
                n
            ));
        }
        Format::Unicode => {
            out.push_str(&format!("# {title}\n"));
            let arrow = format!("A →{} B", superscript(k));
            for (name, ty, body) in &p.defs {
                out.push_str(&format!("{name} : {ty}\n{name} x :≡ {body}\n"));
            }
            out.push_str(&format!("{arrow} :≡ {}\n", p.tower));
            out.push_str(&format!(
                "For every type A and every {} B, the canonical map (∥A∥ → B) → ({arrow}) is an equivalence.\n",
                level_word(n)
            ));
        }
    }
    if r.certificate {
        match emit_certificate(n) {
            Ok(c) => {
                out.push('\n');
                out.push_str(&comment_block(r.format, &write_certificate(&c)));
            }
            Err(e) => out.push_str(&comment_block(r.format, &format!("no certificate: {e}"))),
        }
    }
    out
}
