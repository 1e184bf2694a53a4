//! Knot atoms, symbolic expressions over them and the fact ledger.

pub mod expr;
pub mod ledger;
pub mod seifert;

pub use expr::{normalize, ConcordanceClass, KnotExpression, SignedAtom, UNKNOT};
pub use ledger::{
    load_ledger, CrossingRelation, Fact, FactKind, FactUse, FactValue, KnotAtom, Ledger,
    SEED_LEDGER,
};
pub use seifert::SeifertMatrix;
