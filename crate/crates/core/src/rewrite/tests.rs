use super::*;
use crate::diagrams::raw_tower;
use crate::finite_model::{battery, battery_envs, eval_type, FamilySem, ModelEnv, ModelError, Val};
use crate::typeexpr::{Telescope, Term, TypeExpr};
use proptest::prelude::*;

fn a() -> TypeExpr {
    TypeExpr::base("A")
}

fn b() -> TypeExpr {
    TypeExpr::base("B")
}

fn v(x: &str) -> Term {
    Term::var(x)
}

fn lv(pairs: &[(&str, i32)]) -> LevelEnv {
    pairs.iter().map(|(n, l)| (n.to_string(), *l)).collect()
}

fn apply(t: &Telescope, s: EquivStep) -> Result<Telescope, StepError> {
    apply_step(t, &s, &lv(&[("A", 0), ("B", 0)]))
}

#[test]
fn builtin_chains_replay() {
    for name in BUILTINS {
        let c = builtin_chain(name).unwrap();
        check_chain(&c).unwrap_or_else(|e| panic!("{name}: {e}"));
    }
    assert!(builtin_chain("prop99").is_none());
}

#[test]
fn set_chain_has_six_macro_steps() {
    let c = builtin_chain("prop22").unwrap();
    let mut tags: Vec<&str> = c.steps.iter().map(|s| s.tag.as_str()).collect();
    tags.dedup();
    assert_eq!(tags, ["S1", "S2", "S3", "S4", "S5", "S6"]);
}

#[test]
fn groupoid_chain_expands_nine_components() {
    let c = builtin_chain("prop23").unwrap();
    let stages = check_chain(&c).unwrap();
    let last_s1 = c.steps.iter().rposition(|s| s.tag == "S1").unwrap();
    assert_eq!(stages[last_s1 + 1].names(), ["f1", "f", "c1", "c", "d1", "c2", "d3", "d", "d2"]);
    let after_s2 = c.steps.iter().rposition(|s| s.tag == "S2").unwrap();
    assert_eq!(stages[after_s2 + 1].names(), ["f", "c", "d", "f1", "c2", "c1", "d2", "d1", "d3"]);
}

#[test]
fn absorb_chain_starts_with_distribute() {
    let c = builtin_chain("lemma21").unwrap();
    assert!(matches!(c.steps[0].step, EquivStep::Distribute { .. }));
    let dirs: Vec<AbsorbDir> = c
        .steps
        .iter()
        .filter_map(|s| match s.step {
            EquivStep::TruncAbsorb { dir, .. } => Some(dir),
            _ => None,
        })
        .collect();
    assert_eq!(dirs, [AbsorbDir::Collapse, AbsorbDir::PathRewrite, AbsorbDir::Regroup]);
}

#[test]
fn singleton_then_distribute() {
    let t = Telescope::from_pairs(&[("f1", b())]);
    let c = builtin_chain("prop22").unwrap();
    let t = apply(&t, c.steps[0].step.clone()).unwrap();
    let t = apply(&t, c.steps[1].step.clone()).unwrap();
    let want = Telescope::from_pairs(&[
        ("f1", b()),
        ("f", TypeExpr::arrow(a(), b())),
        ("c1", TypeExpr::pi("a", a(), TypeExpr::id(b(), Term::app(v("f"), v("a")), v("f1")))),
    ]);
    assert!(alpha_eq_tel(&t, &want), "{t:?}");
}

#[test]
fn distribute_example() {
    // Π (a : A). Σ (b : B). C(a, b)  ≃  Σ (g : Π (a : A). B). Π (a : A). C(a, g a)
    let c = TypeExpr::id(b(), v("b"), v("b"));
    let t = Telescope::from_pairs(&[("x", TypeExpr::pi("a", a(), TypeExpr::sigma("b", b(), c)))]);
    let out = apply(&t, EquivStep::Distribute { at: 0, names: ("g".into(), "h".into()) }).unwrap();
    let ga = Term::app(v("g"), v("a"));
    let want = Telescope::from_pairs(&[
        ("g", TypeExpr::pi("a", a(), b())),
        ("h", TypeExpr::pi("a", a(), TypeExpr::id(b(), ga.clone(), ga))),
    ]);
    assert!(alpha_eq_tel(&out, &want));
    let err = apply(&out, EquivStep::Distribute { at: 0, names: ("p".into(), "q".into()) }).unwrap_err();
    assert!(matches!(err, StepError::NotDistributable(_)));
}

#[test]
fn dependency_guards() {
    let t = Telescope::from_pairs(&[
        ("b", b()),
        ("p", TypeExpr::id(b(), Term::cnst("x0"), v("b"))),
        ("q", TypeExpr::id(b(), v("b"), v("b"))),
    ]);
    let err = apply(&t, EquivStep::RemoveSingleton { at: 0, paired: true }).unwrap_err();
    assert_eq!(err, StepError::InUse { name: "b".into(), user: "q".into() });
    let ok = apply(&Telescope::new(t.entries[..2].to_vec()), EquivStep::RemoveSingleton { at: 0, paired: true });
    assert_eq!(ok.unwrap(), Telescope::default());
}

#[test]
fn bad_reorder_is_reported_at_its_step() {
    let mut c = builtin_chain("prop22").unwrap();
    c.steps[4] = ChainStep::new("S4", EquivStep::Reorder { perm: vec![3, 1, 0, 4, 2] });
    match check_chain(&c) {
        Err(ChainError::Step { index: 4, source: StepError::Reorder(_), .. }) => {}
        other => panic!("{other:?}"),
    }
    let mut c = builtin_chain("prop22").unwrap();
    c.end = raw_tower(1);
    assert_eq!(check_chain(&c), Err(ChainError::EndMismatch));
}

#[test]
fn prop_steps_need_low_levels() {
    let c = builtin_chain("prop22").unwrap();
    let mut groupoidal = c.clone();
    groupoidal.levels = lv(&[("B", 1)]);
    assert!(matches!(check_chain(&groupoidal), Err(ChainError::Step { index: 2, source: StepError::Level { .. }, .. })));
    let stages = check_chain(&c).unwrap();
    let step = EquivStep::AddProp { at: 5, name: "e".into(), ty: b(), witness: v("f1") };
    assert!(matches!(apply(&stages[4], step), Err(StepError::Level { level: 0, .. })));
    let step = EquivStep::AddProp { at: 1, name: "e".into(), ty: TypeExpr::Unit, witness: v("c2") };
    assert_eq!(apply(&stages[4], step), Err(StepError::Scope("e".into(), "c2".into())));
}

#[test]
fn level_of_examples() {
    let l0 = lv(&[("B", 0)]);
    let l1 = lv(&[("B", 1)]);
    let idb = TypeExpr::id(b(), v("x"), v("y"));
    assert_eq!(level_of(&idb, &l0), Ok(-1));
    let idid = TypeExpr::id(idb.clone(), v("p"), v("q"));
    assert_eq!(level_of(&idid, &l1), Ok(-1));
    assert_eq!(level_of(&idid, &l0), Ok(-2));
    assert_eq!(level_of(&TypeExpr::trunc(a()), &l0), Ok(-1));
    assert_eq!(level_of(&TypeExpr::Unit, &l0), Ok(-2));
    assert_eq!(level_of(&TypeExpr::arrow(a(), b()), &l1), Ok(1));
    assert_eq!(level_of(&TypeExpr::sigma("x", a(), b()), &l1), Err(StepError::UnknownBase("A".into())));
    // Hat fibers at level k over an n-type.
    let tel = raw_tower(3);
    for (k, (_, ty)) in tel.entries.iter().enumerate() {
        assert_eq!(level_of(ty, &l1), Ok((1 - k as i32).max(-2)));
    }
}

#[test]
fn level_contract_and_expand() {
    let l = lv(&[("B", 0)]);
    let t = raw_tower(2);
    let out = apply_step(&t, &EquivStep::LevelContract { at: 2 }, &l).unwrap();
    assert!(alpha_eq_tel(&out, &raw_tower(1)));
    let (name, ty) = t.entries[2].clone();
    let back = apply_step(&out, &EquivStep::LevelExpand { at: 2, name, ty }, &l).unwrap();
    assert_eq!(back, t);
    assert!(matches!(
        apply_step(&t, &EquivStep::LevelContract { at: 1 }, &l),
        Err(StepError::Level { level: -1, .. })
    ));
}

#[test]
fn hat_pairs() {
    use crate::cats::{DcSubcat, Flavor, HatObj};
    let h = |m, j| HatObj::new(m, j).unwrap();
    let d = DcSubcat::new(1, Flavor::Hat, [h(0, 1)].into_iter().collect()).unwrap();
    let t = limit_telescope(&d).unwrap();
    let l = lv(&[("B", 0)]);
    let up = apply_step(&t, &EquivStep::HatPair { lower: h(0, 0), upper: h(1, 1), add: true }, &l).unwrap();
    assert_eq!(up.names(), ["n00", "n01", "n11"]);
    let down = apply_step(&up, &EquivStep::HatPair { lower: h(0, 0), upper: h(1, 1), add: false }, &l).unwrap();
    assert_eq!(down, t);
    assert!(apply_step(&t, &EquivStep::HatPair { lower: h(0, 1), upper: h(1, 2), add: true }, &l).is_err());
    assert!(apply_step(&raw_tower(1).clone(), &EquivStep::Reorder { perm: vec![1, 0] }, &l).is_err());
}

// ---- round trips ----

/// A well-scoped prefix over `A` and `B`.
fn base_tel(n: usize) -> Telescope {
    let pool = [
        ("u", b()),
        ("g", TypeExpr::arrow(a(), b())),
        ("w", TypeExpr::id(b(), Term::app(v("g"), Term::cnst("a0")), v("u"))),
        ("z", TypeExpr::pi("a", a(), TypeExpr::id(b(), Term::app(v("g"), v("a")), v("u")))),
    ];
    Telescope::from_pairs(&pool[..n])
}

fn anchor_for(t: &Telescope) -> Term {
    if t.index_of("g").is_some() {
        Term::app(v("g"), Term::cnst("a0"))
    } else if t.index_of("u").is_some() {
        v("u")
    } else {
        Term::cnst("x0")
    }
}

proptest! {
    #[test]
    fn singleton_round_trip(n in 0usize..=4, at_frac in 0usize..=4, paired in any::<bool>(), flip in any::<bool>(), with_prefix in any::<bool>()) {
        let t = base_tel(n);
        let at = at_frac.min(n);
        let prefix_scope = Telescope::new(t.entries[..at].to_vec());
        let anchor = anchor_for(&prefix_scope);
        let (l, r) = if flip { (anchor, v("bb")) } else { (v("bb"), anchor) };
        let prefix = if with_prefix && !paired { vec![("a".to_string(), a())] } else { vec![] };
        let sg = Singleton {
            form: if paired { SingletonForm::Paired("pp".into()) } else { SingletonForm::Family("ss".into()) },
            prefix,
            carrier: "bb".into(),
            carrier_ty: b(),
            path_ty: TypeExpr::id(b(), l, r),
        };
        let grown = apply(&t, EquivStep::AddSingleton { at, singleton: sg }).unwrap();
        prop_assert_eq!(grown.len(), n + if paired { 2 } else { 1 });
        let back = apply(&grown, EquivStep::RemoveSingleton { at, paired }).unwrap();
        prop_assert_eq!(back, t);
    }

    #[test]
    fn prop_round_trip(n in 0usize..=4, at_frac in 0usize..=4) {
        let t = base_tel(n);
        let at = at_frac.min(n);
        let scope = Telescope::new(t.entries[..at].to_vec());
        let anchor = anchor_for(&scope);
        let ty = TypeExpr::id(b(), anchor.clone(), anchor);
        let grown = apply(&t, EquivStep::AddProp { at, name: "pq".into(), ty, witness: Term::Star }).unwrap();
        let back = apply(&grown, EquivStep::RemoveProp { at, witness: Term::Star }).unwrap();
        prop_assert_eq!(back, t);
    }

    #[test]
    fn distribute_round_trip(n in 0usize..=4, arity in 1usize..=3, dep in 0usize..3) {
        let t = base_tel(n);
        let args: Vec<String> = (1..=arity).map(|i| format!("a{i}")).collect();
        let body = match dep {
            0 => TypeExpr::id(b(), v("b"), v("b")),
            1 => TypeExpr::arrow(a(), TypeExpr::id(b(), v("b"), v("b"))),
            _ => TypeExpr::pi("e", a(), TypeExpr::id(TypeExpr::arrow(a(), b()), Term::lam("q", v("b")), Term::lam("q", v("b")))),
        };
        let fam = args.iter().rev().fold(TypeExpr::sigma("b", b(), body), |acc, x| TypeExpr::pi(x, a(), acc));
        let mut entries = t.entries.clone();
        entries.push(("xx".into(), fam));
        let t = Telescope::new(entries);
        let at = t.len() - 1;
        let split = apply(&t, EquivStep::Distribute { at, names: ("gg".into(), "hh".into()) }).unwrap();
        let back = apply(&split, EquivStep::Undistribute { at, name: "xx".into(), binder: "b".into() }).unwrap();
        prop_assert!(alpha_eq_tel(&back, &t));
        prop_assert_eq!(back, t);
    }
}

#[test]
fn undistribute_rejects_stray_uses() {
    let fg = |x: &str| Term::app(v("g"), v(x));
    let t = Telescope::from_pairs(&[
        ("g", TypeExpr::pi("a", a(), b())),
        ("h", TypeExpr::pi("a", a(), TypeExpr::id(b(), fg("a"), Term::app(v("g"), Term::cnst("a0"))))),
    ]);
    let err = apply(&t, EquivStep::Undistribute { at: 0, name: "x".into(), binder: "b".into() }).unwrap_err();
    assert!(matches!(err, StepError::NotUndistributable(..)));
}

// ---- level bound against the model ----

/// A small closed type built from a stream of choices.
struct Gen<'a> {
    choices: &'a [u8],
    pos: usize,
    fresh: usize,
}

impl Gen<'_> {
    fn next(&mut self, n: u8) -> u8 {
        let c = self.choices.get(self.pos).copied().unwrap_or(0);
        self.pos += 1;
        c % n
    }

    fn name(&mut self) -> String {
        self.fresh += 1;
        format!("x{}", self.fresh)
    }

    // `ctx` lists variables of type B in scope.
    fn ty(&mut self, depth: u8, ctx: &mut Vec<String>) -> TypeExpr {
        let pick = if depth == 0 { self.next(3) } else { self.next(8) };
        match pick {
            0 => TypeExpr::Unit,
            1 => b(),
            2 => match ctx.len() {
                0 => b(),
                k => {
                    let x = ctx[self.next(k as u8) as usize].clone();
                    let y = ctx[self.next(k as u8) as usize].clone();
                    TypeExpr::id(b(), v(&x), v(&y))
                }
            },
            3 => TypeExpr::trunc(self.ty(depth - 1, ctx)),
            4 | 5 => {
                let x = self.name();
                let d = if pick == 4 { b() } else { a() };
                let is_b = pick == 4;
                if is_b {
                    ctx.push(x.clone());
                }
                let c = self.ty(depth - 1, ctx);
                if is_b {
                    ctx.pop();
                }
                TypeExpr::sigma(&x, d, c)
            }
            6 => {
                let x = self.name();
                TypeExpr::pi(&x, a(), self.ty(depth - 1, ctx))
            }
            _ => {
                // Id over an identity type: loops at a point, compared with refl.
                match ctx.last() {
                    Some(x) => {
                        let amb = TypeExpr::id(b(), v(x), v(x));
                        TypeExpr::id(amb, Term::refl(v(x)), Term::refl(v(x)))
                    }
                    None => TypeExpr::arrow(a(), b()),
                }
            }
        }
    }
}

fn level_envs() -> Vec<(ModelEnv, LevelEnv)> {
    battery_envs()
        .into_iter()
        .map(|e| {
            let lb = *e.levels.get("B").unwrap();
            (e, lv(&[("A", 0), ("B", lb)]))
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]
    #[test]
    fn level_of_bounds_the_model(choices in prop::collection::vec(any::<u8>(), 24)) {
        let mut g = Gen { choices: &choices, pos: 0, fresh: 0 };
        let ty = g.ty(3, &mut Vec::new());
        let mut checked = 0;
        for (env, levels) in level_envs() {
            let bound = level_of(&ty, &levels).unwrap();
            // Automorphism groups past the model's capacity are skipped, nothing else.
            let g = match eval_type(&ty, &env) {
                Err(ModelError::TooLarge(_)) => continue,
                r => r.unwrap(),
            };
            prop_assert!(h_level(&g) <= bound, "{} in {}: {} > {}", ty, env.name, h_level(&g), bound);
            checked += 1;
        }
        prop_assert!(checked > 0, "{} fits no environment", ty);
    }
}

#[test]
fn equality_fiber_rule_bounds_fibers() {
    for (env, levels) in level_envs() {
        for k in 1..=3usize {
            let tel = raw_tower(k as i32);
            let bound = level_of(&tel.entries[k].1, &levels).unwrap();
            let fam = FamilySem::from_split(&tel, k, &env).unwrap();
            for x in 0..fam.base().num_objects() {
                assert!(h_level(fam.fiber(x)) <= bound, "{} k={k}", env.name);
            }
        }
    }
}

// ---- model checks ----

fn absorb_envs() -> Vec<ModelEnv> {
    let gs = battery();
    let find = |n: &str| gs.iter().find(|(m, _)| m == n).unwrap().1.clone();
    let mut out = Vec::new();
    for an in ["D0", "D1", "D2", "D3"] {
        for (bn, g) in &gs {
            let mut env = ModelEnv::new(&format!("{an}_{bn}")).with_base("A", find(an)).with_base("B", g.clone());
            if an != "D0" {
                env = env.with_const("a0", a(), Val::Obj(0));
            }
            out.push(env);
        }
    }
    out
}

#[test]
fn trunc_absorb_holds_in_the_model() {
    // |A| ≤ 3 against every battery groupoid, including the empty A.
    let c = builtin_chain("lemma21").unwrap();
    let envs = absorb_envs();
    assert_eq!(check_chain_in_models(&c, &envs), Ok(envs.len()));
    // The absorbed exponent directly.
    for env in &envs {
        let lhs = eval_type(&TypeExpr::arrow(TypeExpr::trunc(a()), TypeExpr::arrow(a(), b())), env).unwrap();
        let rhs = eval_type(&TypeExpr::arrow(a(), b()), env).unwrap();
        assert!(equiv_check(&lhs, &rhs).unwrap(), "{}", env.name);
    }
}

#[test]
fn groupoid_chain_steps_hold_in_the_model() {
    let c = builtin_chain("prop23").unwrap();
    // Every battery base is at most 1-truncated.
    assert_eq!(check_chain_in_models(&c, &battery_envs()), Ok(14));
}

#[test]
fn set_chain_steps_hold_in_the_model() {
    let c = builtin_chain("prop22").unwrap();
    // Discrete B, plus the contractible two-object groupoid.
    assert_eq!(check_chain_in_models(&c, &battery_envs()), Ok(10));
}

#[test]
fn unsound_step_is_caught_by_the_model() {
    // A propositional but uninhabited component passes the syntactic checks.
    let c = EquivChain {
        start: Telescope::from_pairs(&[("u", b()), ("w", b())]),
        steps: vec![ChainStep::new(
            "bad",
            EquivStep::AddProp { at: 2, name: "p".into(), ty: TypeExpr::id(b(), v("u"), v("w")), witness: derive(&["u", "w"]) },
        )],
        end: Telescope::from_pairs(&[("u", b()), ("w", b()), ("p", TypeExpr::id(b(), v("u"), v("w")))]),
        levels: lv(&[("B", 0)]),
    };
    assert!(check_chain(&c).is_ok());
    match check_chain_in_models(&c, &battery_envs()) {
        Err(ChainError::NotEquivalent { index: 0, env, .. }) => assert!(env.starts_with("D2") || env.starts_with("D3"), "{env}"),
        other => panic!("{other:?}"),
    }
    // Environments above the declared level are not used.
    let z2: Vec<ModelEnv> = battery_envs().into_iter().filter(|e| e.name.starts_with("Z2")).collect();
    assert_eq!(check_chain_in_models(&c, &z2), Ok(0));
}
