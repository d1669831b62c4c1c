//! Relational geometric logic over finite signatures.

pub mod horn;
pub mod prover;
pub mod semantics;
pub mod signature;
pub mod syntactic;
pub mod syntax;

pub use horn::{normalize_geometric, relationalize, Disjunct, GeometricFormulaNF, HornObject, Relationalized, Sequent};
pub use prover::{
    prove_bounded, sequent_presieves, validate_proof_certificate, GoalDoc, GoalPresieve, ProofCertificate, ProofOutcome, Theory, TheoryDoc,
    TheoryNotion, DEFAULT_CONTEXT_BOUND, DEFAULT_DEPTH,
};
pub use semantics::{eval_formula, find_countermodel, holds_in_model, FiniteModel, ModelDoc};
pub use signature::{Signature, SignatureDoc};
pub use syntactic::{factor_through, horn_conjunction, horn_pullback, syntactic_homs, Pullback, SyntacticMorphism};
pub use syntax::{parse_formula, parse_sequent, Formula, SequentAst, Term};
