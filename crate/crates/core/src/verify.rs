//! Independent verification oracles for solver output and synthesized
//! strategies.
//!
//! Everything here is exact: fixing strategies turns the game into a
//! one-player MDP or a Markov chain over rationals, and the mean-payoff
//! solvers (policy enumeration, policy iteration, bottom-class analysis)
//! decide the claimed guarantees with no numerical tolerance. A separate
//! coBuchi fixpoint cross-checks positive winning on turn-based
//! deterministic boolean games, finite-memory opponents are refuted by
//! explicit product-chain analysis, and a seed-deterministic simulator
//! provides statistical smoke tests on top of the exact machinery.

pub mod chain;
pub mod claims;
pub mod cobuchi;
pub mod fm;
mod linalg;
pub mod mdp;
pub mod simulate;

pub use chain::{absorption_stats, analyze, mc_mean_payoff, ChainAnalysis, MarkovChain};
pub use claims::{verify_eps_claim, verify_spoiler_stationary, ReportRow, VerificationReport};
pub use cobuchi::cobuchi_winning_set;
pub use fm::{patience_floor_check, spoil_finite_memory};
pub use mdp::{
    chain_of, fix_strategy, mdp_max_mean_payoff, mdp_min_mean_payoff, Goal, Mdp, MdpSolution,
    DEFAULT_ENUMERATION_BOUND,
};
pub use simulate::{simulate, SimStats};
