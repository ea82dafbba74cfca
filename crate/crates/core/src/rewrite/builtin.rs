//! The expand-and-contract chains for sets, groupoids, and the absorption
//! of a truncated exponent.

use super::{derive, AbsorbDir, ChainStep, EquivChain, EquivStep, LevelEnv, Singleton, SingletonForm};
use crate::diagrams::{coh_type, const_type, nice_tower};
use crate::typeexpr::{Telescope, Term, TypeExpr};

pub const BUILTINS: [&str; 3] = ["prop22", "prop23", "lemma21"];

pub fn builtin_chain(name: &str) -> Option<EquivChain> {
    match name {
        "prop22" => Some(set_chain()),
        "prop23" => Some(groupoid_chain()),
        "lemma21" => Some(absorb_chain()),
        _ => None,
    }
}

fn a() -> TypeExpr {
    TypeExpr::base("A")
}

fn b() -> TypeExpr {
    TypeExpr::base("B")
}

fn v(x: &str) -> Term {
    Term::var(x)
}

fn a0() -> Term {
    Term::cnst("a0")
}

fn ap(f: &str, xs: Vec<Term>) -> Term {
    Term::apps(v(f), xs)
}

fn eq(t: TypeExpr, x: Term, y: Term) -> TypeExpr {
    TypeExpr::id(t, x, y)
}

fn levels(n: i32) -> LevelEnv {
    [("B".to_string(), n)].into_iter().collect()
}

fn start() -> Telescope {
    Telescope::from_pairs(&[("f1", b())])
}

/// `Π (a : A). Σ (b : B). b = f₁`, split into `f` and `c₁`.
fn expand_f_c1() -> Vec<ChainStep> {
    vec![
        ChainStep::new(
            "S1",
            EquivStep::AddSingleton {
                at: 1,
                singleton: Singleton {
                    form: SingletonForm::Family("fc1".into()),
                    prefix: vec![("a".into(), a())],
                    carrier: "b".into(),
                    carrier_ty: b(),
                    path_ty: eq(b(), v("b"), v("f1")),
                },
            },
        ),
        ChainStep::new("S2", EquivStep::Distribute { at: 1, names: ("f".into(), "c1".into()) }),
    ]
}

fn set_chain() -> EquivChain {
    let mut steps = expand_f_c1();
    steps.extend([
        ChainStep::new(
            "S3",
            EquivStep::AddProp { at: 3, name: "c".into(), ty: const_type("f"), witness: derive(&["f", "f1", "c1"]) },
        ),
        ChainStep::new(
            "S3",
            EquivStep::AddProp {
                at: 4,
                name: "c2".into(),
                ty: eq(b(), ap("f", vec![a0()]), v("f1")),
                witness: Term::app(v("c1"), a0()),
            },
        ),
        // f₁ f c₁ c c₂  ↦  f c f₁ c₂ c₁
        ChainStep::new("S4", EquivStep::Reorder { perm: vec![1, 3, 0, 4, 2] }),
        ChainStep::new(
            "S5",
            EquivStep::RemoveProp {
                at: 4,
                witness: Term::lam("a", Term::comp(ap("c", vec![v("a"), a0()]), v("c2"))),
            },
        ),
        ChainStep::new("S6", EquivStep::RemoveSingleton { at: 2, paired: true }),
    ]);
    EquivChain { start: start(), steps, end: nice_tower(1).expect("level 1 has a nice form"), levels: levels(0) }
}

fn groupoid_chain() -> EquivChain {
    let fa = |x: &str| ap("f", vec![v(x)]);
    let c1 = |x: Term| ap("c1", vec![x]);
    let c = |x: Term, y: Term| ap("c", vec![x, y]);
    let ambient0 = eq(b(), ap("f", vec![a0()]), v("f1"));
    let mut steps = expand_f_c1();
    steps.extend([
        ChainStep::new(
            "S1",
            EquivStep::AddSingleton {
                at: 3,
                singleton: Singleton {
                    form: SingletonForm::Family("cd1".into()),
                    prefix: vec![("a1".into(), a()), ("a2".into(), a())],
                    carrier: "b".into(),
                    carrier_ty: eq(b(), fa("a1"), fa("a2")),
                    path_ty: eq(eq(b(), fa("a1"), v("f1")), Term::comp(v("b"), c1(v("a2"))), c1(v("a1"))),
                },
            },
        ),
        ChainStep::new("S1", EquivStep::Distribute { at: 3, names: ("c".into(), "d1".into()) }),
        ChainStep::new(
            "S1",
            EquivStep::AddSingleton {
                at: 5,
                singleton: Singleton {
                    form: SingletonForm::Paired("d3".into()),
                    prefix: vec![],
                    carrier: "c2".into(),
                    carrier_ty: ambient0.clone(),
                    path_ty: eq(ambient0.clone(), Term::comp(c(a0(), a0()), c1(a0())), v("c2")),
                },
            },
        ),
        ChainStep::new(
            "S1",
            EquivStep::AddProp { at: 7, name: "d".into(), ty: coh_type("f", "c"), witness: derive(&["f", "f1", "c", "c1", "d1"]) },
        ),
        ChainStep::new(
            "S1",
            EquivStep::AddProp {
                at: 8,
                name: "d2".into(),
                ty: TypeExpr::pi("a", a(), eq(ambient0.clone(), Term::comp(c(a0(), v("a")), c1(v("a"))), v("c2"))),
                witness: derive(&["c", "c1", "c2", "d1", "d3"]),
            },
        ),
        // f₁ f c₁ c d₁ c₂ d₃ d d₂  ↦  f c d f₁ c₂ c₁ d₂ d₁ d₃
        ChainStep::new("S2", EquivStep::Reorder { perm: vec![1, 3, 7, 0, 5, 2, 8, 4, 6] }),
        ChainStep::new("S3", EquivStep::RemoveProp { at: 8, witness: Term::app(v("d2"), a0()) }),
        ChainStep::new("S3", EquivStep::RemoveProp { at: 7, witness: derive(&["c", "d", "c1", "d2"]) }),
        ChainStep::new("S3", EquivStep::Undistribute { at: 5, name: "cd2".into(), binder: "b".into() }),
        ChainStep::new("S3", EquivStep::RemoveSingleton { at: 5, paired: false }),
        ChainStep::new("S3", EquivStep::RemoveSingleton { at: 3, paired: true }),
    ]);
    EquivChain { start: start(), steps, end: nice_tower(2).expect("level 2 has a nice form"), levels: levels(1) }
}

fn absorb_chain() -> EquivChain {
    let g = TypeExpr::arrow(a(), b());
    let start = Telescope::from_pairs(&[("h", TypeExpr::arrow(TypeExpr::trunc(a()), TypeExpr::sigma("g", g, const_type("g"))))]);
    let steps = vec![
        ChainStep::new("distribute", EquivStep::Distribute { at: 0, names: ("g".into(), "k".into()) }),
        ChainStep::new("collapse", EquivStep::TruncAbsorb { at: 0, dir: AbsorbDir::Collapse }),
        ChainStep::new("path-rewrite", EquivStep::TruncAbsorb { at: 1, dir: AbsorbDir::PathRewrite }),
        ChainStep::new("regroup", EquivStep::TruncAbsorb { at: 1, dir: AbsorbDir::Regroup }),
    ];
    EquivChain { start, steps, end: nice_tower(1).expect("level 1 has a nice form"), levels: LevelEnv::new() }
}
