//! Concordance invariants of knots from exact signatures, branched-cover
//! topology and equivariant d-invariant sequences.
//!
//! The library is organised bottom-up:
//!
//! - [`cyclotomic`] and [`signature`]: exact Levine–Tristram signatures at
//!   prime-order roots of unity.
//! - [`knot`]: Seifert matrices, symbolic knot expressions and the fact
//!   ledger.
//! - [`cover`]: Betti numbers and signatures of cyclic branched covers.
//! - [`sequence`]: δ- and ξ-sequences, j and θ, min-plus sums and
//!   crossing-change bounds.
//! - [`infer`]: fixed-point propagation of bounds on θ over a ledger.
//! - [`definite`]: genus bounds for surfaces in negative definite
//!   4-manifolds.

pub mod cover;
pub mod cyclotomic;
pub mod definite;
pub mod error;
pub mod infer;
pub mod knot;
pub mod prime;
pub mod sequence;
pub mod signature;

pub use cover::{cover_b_plus_for_genus_bound, cover_topology, CoverInput, CoverTopology};
pub use cyclotomic::{CyclotomicElement, RealEmbedding};
pub use definite::{
    compare_bounds, eta, genus_bound_odd_q, genus_bound_q2, BoundComparison, DefiniteForm,
    GenusBound, HomologyClass,
};
pub use error::{Error, Result};
pub use infer::{infer_theta, infer_theta_m, infer_theta_with, Inference, Rule, TraceStep};
pub use knot::{
    load_ledger, normalize, ConcordanceClass, CrossingRelation, Fact, FactKind, FactUse, FactValue,
    KnotAtom, KnotExpression, Ledger, SeifertMatrix, SignedAtom, SEED_LEDGER,
};
pub use prime::Prime;
pub use sequence::{
    crossing_change_j_bounds, ell_lower_bound, j_value, j_value_m, sum_delta_upper, theta,
    theta_m, torus_delta_sequence, xi_sequence, BoundInterval, CrossingDirection, DeltaSequence,
    ThetaValue, TorusFamily, UpperDeltaSequence, XiSequence,
};
pub use signature::{lt_signature, lt_signatures, sigma_q, signature, SignatureValue};
