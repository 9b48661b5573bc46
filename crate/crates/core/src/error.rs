//! Error types for the model, the file formats, and the analysis pipelines.

use thiserror::Error;

/// Structural or semantic defects in a game, a DMPG, or a strategy table.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GameError {
    #[error("duplicate state '{0}'")]
    DuplicateState(String),
    #[error("unknown state '{0}'")]
    UnknownState(String),
    #[error("invalid {kind} name '{name}'")]
    InvalidName { kind: String, name: String },
    #[error("state '{state}': action set for player {player} already declared")]
    DuplicateActionSet { state: String, player: u8 },
    #[error("state '{state}': duplicate action '{action}' for player {player}")]
    DuplicateAction { state: String, action: String, player: u8 },
    #[error("state '{state}': empty action set for player {player}")]
    EmptyActionSet { state: String, player: u8 },
    #[error("state '{state}': unknown action '{action}' for player {player}")]
    UnknownAction { state: String, action: String, player: u8 },
    #[error("duplicate transition for ({state}, {a}, {b})")]
    DuplicateTransition { state: String, a: String, b: String },
    #[error("missing transition for ({state}, {a}, {b})")]
    MissingTransition { state: String, a: String, b: String },
    #[error("transition ({state}, {a}, {b}): duplicate target '{target}'")]
    DuplicateTarget { state: String, a: String, b: String, target: String },
    #[error("transition ({state}, {a}, {b}): probability {prob} is not positive")]
    NonPositiveProbability { state: String, a: String, b: String, prob: String },
    #[error("transition ({state}, {a}, {b}): distribution sums to {sum}")]
    DistributionSum { state: String, a: String, b: String, sum: String },
    #[error("transition ({state}, {a}, {b}): reward {reward} outside [0, 1]")]
    RewardOutOfRange { state: String, a: String, b: String, reward: String },
    #[error("game has no states")]
    NoStates,
    #[error("node '{0}' has no outgoing edge")]
    NoOutgoingEdge(String),
    #[error("edge reward {0} is negative")]
    NegativeEdgeReward(String),
    #[error("strategy: no distribution for state '{0}'")]
    StrategyMissingState(String),
    #[error("strategy at '{state}': {msg}")]
    StrategyInvalid { state: String, msg: String },
}

/// Line-anchored errors from the text formats.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("line {line}: {msg}")]
pub struct ParseError {
    pub line: usize,
    pub msg: String,
}

impl ParseError {
    pub fn new(line: usize, msg: impl Into<String>) -> Self {
        ParseError { line, msg: msg.into() }
    }
}

/// Failures of the fixpoint operator preconditions (public operator API).
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OpError {
    #[error("precondition violated: {0}")]
    Precondition(String),
}

/// Strategy-synthesis failures.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum SynthError {
    #[error("eps must lie strictly between 0 and 1, got {0}")]
    BadEps(String),
    #[error("solve report lacks the inner chain needed for synthesis")]
    MissingChain,
    #[error("solve report lacks the outer chain needed for spoiler synthesis")]
    MissingOuterChain,
    #[error("solve report does not match this synthesis kind: {0}")]
    ReportMismatch(String),
    #[error("horizon cap {cap} exceeded; best certified average so far {best}")]
    HorizonCapExceeded { cap: u64, best: String },
    #[error("segment materialization cap {0} exceeded")]
    MaterializationCap(u64),
    #[error("internal consistency failure: {0}")]
    InternalConsistency(String),
}

/// Verification-oracle failures (the checks themselves report pass/fail
/// through their reports; these are failures to even run the check).
#[derive(Debug, Error, Clone, PartialEq)]
pub enum VerifyError {
    #[error("strategy belongs to the wrong player for this check")]
    WrongPlayer,
    #[error("strategy does not fit the game: {0}")]
    StrategyMismatch(String),
    #[error("positional enumeration bound {bound} exceeded ({count} policies)")]
    EnumerationBound { bound: u64, count: String },
    #[error("policy iteration failed to terminate within {0} improvements")]
    PolicyIterationDiverged(u64),
    #[error("game is not turn-based deterministic with boolean rewards: {0}")]
    NotTurnBasedDeterministic(String),
    #[error("game does not structurally match a supported family: {0}")]
    StructureMismatch(String),
    #[error("eps must satisfy {0}")]
    BadEps(String),
    #[error("internal consistency failure: {0}")]
    InternalConsistency(String),
}

/// Simulation failures.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("unknown start state '{0}'")]
    UnknownStart(String),
    #[error("strategy for player {player} has no distribution materialized for round {round}")]
    RoundNotMaterialized { player: u8, round: u64 },
    #[error("strategy does not fit the game: {0}")]
    Mismatch(String),
}

/// Reduction failures.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum ReduceError {
    #[error("maximal edge reward must be at least 1, got {0}")]
    ZeroMaxReward(String),
    #[error("positional enumeration bound {bound} exceeded ({count} strategy pairs)")]
    EnumerationBound { bound: u64, count: String },
    #[error("unknown node '{0}'")]
    UnknownNode(String),
}
