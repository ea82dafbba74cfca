//! Finite groupoid semantics for the type fragment, used as the ground
//! truth for every equivalence and contractibility claim at small sizes.
//!
//! Types evaluate to strict groupoids. `Π` needs a discrete domain, `Σ` is
//! the total groupoid of its family, `Id` is the discrete groupoid of
//! morphisms, and truncation collapses to the empty or the unit groupoid.
//! Results are returned as skeletons.

mod family;
mod fixture;
mod groupoid;
mod sem;


use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::cats::{pair_step, DcSubcat, HatObj};
use crate::diagrams::{limit_telescope, EqualityDiagram};
use crate::horn::{horn_poset, nonempty_subsets, HornSpec, Subset};
use crate::typeexpr::{Name, Telescope, TypeExpr};

pub use family::{FamilySem, Functor};
pub use fixture::{parse_fixture, Fixture, BATTERY};
pub use groupoid::{equiv_check, group_iso, h_level, FinGroupoid, Group, MAX_GROUP};
pub use sem::{compile, Env, Gamma, Model, Mor, SType, Ty, TyNode, Val, MAX_AUT};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("internal evaluation error: {0}")]
    Internal(String),
    #[error("outside the supported fragment: {0}")]
    Unsupported(String),
    #[error("unbound name `{0}`")]
    Unbound(String),
    #[error("ill-typed: {0}")]
    Type(String),
    #[error("group or hom-set of size {0} is too large")]
    TooLarge(usize),
    #[error("invalid groupoid: {0}")]
    Invalid(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("fixture line {line}: {msg}")]
    Fixture { line: usize, msg: String },
}

/// Interpretation of base types and constants, plus declared h-levels.
#[derive(Debug, Clone, Default)]
pub struct ModelEnv {
    pub name: String,
    pub bases: BTreeMap<Name, FinGroupoid>,
    pub consts: BTreeMap<Name, (TypeExpr, Val)>,
    pub levels: BTreeMap<Name, i32>,
}

impl ModelEnv {
    pub fn new(name: &str) -> Self {
        ModelEnv { name: name.to_string(), ..Default::default() }
    }

    pub fn with_base(mut self, name: &str, g: FinGroupoid) -> Self {
        self.bases.insert(name.to_string(), g);
        self
    }

    pub fn with_const(mut self, name: &str, ty: TypeExpr, v: Val) -> Self {
        self.consts.insert(name.to_string(), (ty, v));
        self
    }

    pub fn with_level(mut self, name: &str, level: i32) -> Self {
        self.levels.insert(name.to_string(), level);
        self
    }

    /// `A` and `B` assigned, with `a₀` the first object of `A` when there is one.
    pub fn standard(a: FinGroupoid, b: FinGroupoid) -> Self {
        let has_point = a.num_objects() > 0;
        let env = ModelEnv::new("standard").with_base("A", a).with_base("B", b);
        if has_point {
            env.with_const("a0", TypeExpr::base("A"), Val::Obj(0))
        } else {
            env
        }
    }

    pub fn has_basepoint(&self) -> bool {
        self.consts.contains_key("a0")
    }

    /// Declared levels bound the actual ones; base-typed constants name real objects.
    pub fn validate(&self) -> Result<(), ModelError> {
        for (n, &l) in &self.levels {
            let g = self.bases.get(n).ok_or_else(|| ModelError::Unbound(n.clone()))?;
            if h_level(g) > l {
                return Err(ModelError::Invalid(format!("`{n}` has h-level {} above the declared {l}", h_level(g))));
            }
        }
        for (c, (ty, v)) in &self.consts {
            if let (TypeExpr::Base(b), Val::Obj(i)) = (ty, v) {
                let g = self.bases.get(b).ok_or_else(|| ModelError::Unbound(b.clone()))?;
                if *i >= g.num_objects() {
                    return Err(ModelError::Invalid(format!("`{c}` names object {i} of `{b}`, which has {}", g.num_objects())));
                }
            }
        }
        Ok(())
    }
}

/// The skeleton of the groupoid a closed type denotes.
pub fn eval_type(e: &TypeExpr, env: &ModelEnv) -> Result<FinGroupoid, ModelError> {
    let m = Model::new(env);
    let t = m.eval_ty(e, &Env::empty())?;
    m.skeleton(&t)
}

pub fn eval_telescope(t: &Telescope, env: &ModelEnv) -> Result<FinGroupoid, ModelError> {
    eval_type(&t.to_type(), env)
}

fn diagram_err(e: impl std::fmt::Display) -> ModelError {
    ModelError::Precondition(e.to_string())
}

/// The full `n`-simplex of the equality diagram against its `k`-th horn.
pub fn horn_oracle(n: usize, k: usize, env: &ModelEnv) -> Result<bool, ModelError> {
    if n > 2 {
        return Err(ModelError::Precondition(format!("horn oracle supports n ≤ 2, got {n}")));
    }
    let all: Vec<usize> = (0..=n).collect();
    let spec = HornSpec::new(&all, k).map_err(diagram_err)?;
    let full: BTreeSet<Subset> = nonempty_subsets(&all).into_iter().collect();
    let horn = horn_poset(&spec);
    let diag = EqualityDiagram::new("B", n);
    let g = eval_telescope(&diag.family_telescope(&full).map_err(diagram_err)?, env)?;
    let h = eval_telescope(&diag.family_telescope(&horn).map_err(diagram_err)?, env)?;
    equiv_check(&g, &h)
}

/// Limit over `d` with the pair added, against the limit over `d`.
pub fn pair_oracle(lower: HatObj, upper: HatObj, d: &DcSubcat, env: &ModelEnv) -> Result<bool, ModelError> {
    if !env.has_basepoint() {
        return Err(ModelError::Precondition("the constant diagram needs a basepoint a0 : A".into()));
    }
    if upper.m > 3 {
        return Err(ModelError::Precondition(format!("pair oracle supports levels ≤ 3, got {}", upper.m)));
    }
    let grown = pair_step(d, lower, upper).map_err(diagram_err)?;
    let g = eval_telescope(&limit_telescope(&grown).map_err(diagram_err)?, env)?;
    let h = eval_telescope(&limit_telescope(d).map_err(diagram_err)?, env)?;
    equiv_check(&g, &h)
}

/// Named groupoids of the standard battery.
pub fn battery() -> Vec<(Name, FinGroupoid)> {
    parse_fixture(BATTERY).expect("bundled battery parses").groupoids
}

/// Environments of the standard battery.
pub fn battery_envs() -> Vec<ModelEnv> {
    parse_fixture(BATTERY).expect("bundled battery parses").envs
}
