//! Learning linear temporal logic (LTL) formulas over finite traces.
//!
//! The crate covers two inference problems end to end:
//!
//! * **Noisy binary classification** — given traces labeled positive/negative
//!   and a tolerated misclassification threshold `kappa`, find a minimal
//!   syntax-DAG formula that classifies at least `1 - kappa` of the sample
//!   ([`learn::learn_noisy`]; `kappa = 0` is the exact baseline
//!   [`learn::learn_exact`]). A decision-tree layer composes small predicates
//!   into a classifier and flattens it back to one formula ([`dtree`]).
//! * **One-class classification** — given positive traces only and a size
//!   bound, find a consistent formula whose language is minimal among all
//!   size-bounded consistent formulas ([`occ`]), using LTLf-to-DFA compilation
//!   and language inclusion as the specificity oracle ([`automata`]).
//!
//! Both learners run on an embedded CDCL SAT solver with cardinality
//! constraints and soft-clause maximization ([`sat`]).
//!
//! Formulas are interpreted over *finite, nonempty* traces with **strong
//! Next** semantics: `X p` is false at the last position of a trace. `F`,
//! `G`, and `U` are reflexive at the current position.

pub mod automata;
pub mod deadline;
pub mod dtree;
pub mod harness;
pub mod learn;
pub mod ltl;
pub mod occ;
pub mod rng;
pub mod sat;
pub mod trace;

pub use deadline::Deadline;
pub use ltl::{FormulaBuilder, LtlFormula};
pub use trace::{Sample, Trace, Valuation};
