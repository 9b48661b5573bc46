//! Qualitative solvers for almost-sure and positive winning.
//!
//! Two routes compute the same almost-sure set: a nested-fixpoint evaluator
//! over the one-step set operators ([`ops`], [`naive`]) and an incremental
//! level-based algorithm that maintains per-state caches under level
//! decrements ([`improved`]). Positive winning is the inner fixpoint alone.
//! Both produce a [`SolveReport`] carrying the winning set, per-state levels,
//! and the witness chains consumed by strategy synthesis.

pub mod improved;
pub mod naive;
pub mod ops;
pub mod report;

pub use improved::{almost_set_improved, almost_set_improved_with_order, LevelState};
pub use naive::{almost_set_naive, positive_set};
pub use ops::{allow1, asp, bad2, good1};
pub use report::{Algorithm, Objective, SolveCounters, SolveReport};
