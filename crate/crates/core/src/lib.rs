//! Combinatorics and symbolic machinery for coherently constant functions
//! and the finite universal property of propositional truncation.

pub mod cats;
pub mod contraction;
pub mod diagrams;
pub mod finite_model;
pub mod horn;
pub mod rewrite;
pub mod toolfront;
pub mod typeexpr;
