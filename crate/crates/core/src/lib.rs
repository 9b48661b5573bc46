//! Qualitative analysis of concurrent stochastic mean-payoff games.
//!
//! The crate houses:
//! - the game model ([`game`]): finite concurrent stochastic games with exact
//!   rational transition probabilities and rewards in `[0, 1]`, plus text
//!   formats, generators for the standard hard-instance families, and
//!   deterministic random games;
//! - qualitative solvers ([`solver`]): the triple-fixpoint characterizations of
//!   the almost-sure and positive winning sets for "mean payoff equals the
//!   maximal reward", both as a direct fixpoint evaluation and as the
//!   level-based quadratic algorithm with its amortized counters;
//! - strategy synthesis ([`synthesis`]): witness strategies on the winning
//!   sets (the eps-graded stationary family, the segment-based Markov
//!   almost-sure strategy, and the spoiler constructions for the complement);
//! - verification oracles ([`verify`]): exact MDP and Markov-chain mean-payoff
//!   solvers used to check synthesized strategies against their claimed
//!   guarantees, a coBuchi cross-oracle for turn-based deterministic games,
//!   finite-memory spoiling, and seed-deterministic simulation;
//! - the reduction from deterministic mean-payoff game values to qualitative
//!   analysis ([`reduction`]) with its brute-force referee.
//!
//! All probability and value computations are exact (arbitrary-precision
//! rationals); no floating point enters any decision.

pub mod cli;
pub mod error;
pub mod game;
pub mod generators;
pub mod rational;
pub mod reduction;
pub mod solver;
pub mod strategy;
pub mod synthesis;
pub mod verify;

pub use cli::CommandResult;
pub use error::{GameError, ParseError, ReduceError, SimError, SynthError, VerifyError};
pub use game::{Distribution, GameBuilder, GameStructure, Player, StateId, StateSet};
pub use rational::Rational;
pub use reduction::{
    dmpg_optimal_pair, dmpg_value_bruteforce, edge_gadget_chain, gen_random_dmpg, lasso_value,
    reduce_dmpg, transport_pair, transported_value, verify_reduction, GadgetMap,
    RandomDmpgParams,
};
pub use solver::{Algorithm, Objective, SolveReport};
pub use strategy::{FiniteMemoryStrategy, RoundIndexedStrategy, StationaryStrategy, Strategy};
pub use synthesis::{
    synth_eps_stationary, synth_markov_almost, synth_positive_markov,
    synth_positive_spoiler_stationary, synth_spoiler_markov,
};
pub use verify::{
    absorption_stats, chain_of, cobuchi_winning_set, fix_strategy, mc_mean_payoff,
    mdp_max_mean_payoff, mdp_min_mean_payoff, patience_floor_check, simulate,
    spoil_finite_memory, verify_eps_claim, verify_spoiler_stationary, MarkovChain, Mdp,
    SimStats, VerificationReport,
};
