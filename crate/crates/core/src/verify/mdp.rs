//! Exact mean-payoff MDPs obtained by fixing one player's stationary
//! strategy.
//!
//! Fixing a stationary strategy averages the fixed player out of every
//! cell, leaving the free player a finite MDP with exact rational
//! transitions and rewards. Optimal positional values are computed either
//! by exhaustive positional-policy enumeration (small action products) or
//! by multichain Howard policy iteration over exact gain/bias pairs; the
//! two agree wherever both are feasible, and the fuzz tests check that.

use std::collections::BTreeMap;

use num::{BigUint, One, Zero};

use crate::error::VerifyError;
use crate::game::{GameStructure, Player, StateId};
use crate::rational::Rational;
use crate::strategy::StationaryStrategy;
use crate::verify::chain::{analyze, MarkovChain};
use crate::verify::linalg;

/// Largest positional-policy count the solver will enumerate exhaustively;
/// beyond it, policy iteration takes over.
pub const DEFAULT_ENUMERATION_BOUND: u64 = 1_000_000;

const IMPROVEMENT_CAP: u64 = 10_000;

/// A finite mean-payoff MDP with exact transition probabilities and
/// rewards, as produced by fixing one player of a game.
#[derive(Debug, Clone, PartialEq)]
pub struct Mdp {
    names: Vec<String>,
    action_names: Vec<Vec<String>>,
    delta: Vec<Vec<Vec<(usize, Rational)>>>,
    reward: Vec<Vec<Rational>>,
}

impl Mdp {
    pub fn n(&self) -> usize {
        self.names.len()
    }

    pub fn name(&self, s: usize) -> &str {
        &self.names[s]
    }

    pub fn action_count(&self, s: usize) -> usize {
        self.action_names[s].len()
    }

    pub fn action_name(&self, s: usize, a: usize) -> &str {
        &self.action_names[s][a]
    }

    pub fn row(&self, s: usize, a: usize) -> &[(usize, Rational)] {
        &self.delta[s][a]
    }

    pub fn reward(&self, s: usize, a: usize) -> &Rational {
        &self.reward[s][a]
    }

    /// The Markov chain induced by a positional policy (one action index
    /// per state).
    pub fn policy_chain(&self, policy: &[usize]) -> Result<MarkovChain, VerifyError> {
        if policy.len() != self.n() {
            return Err(VerifyError::InternalConsistency(
                "policy does not cover every state".into(),
            ));
        }
        let rows = (0..self.n()).map(|s| self.delta[s][policy[s]].clone()).collect();
        let rewards = (0..self.n()).map(|s| self.reward[s][policy[s]].clone()).collect();
        MarkovChain::new(self.names.clone(), rows, rewards)
    }

    fn policy_count(&self) -> BigUint {
        self.action_names
            .iter()
            .map(|actions| BigUint::from(actions.len()))
            .product()
    }
}

fn merge_row(parts: Vec<(Rational, &[(StateId, Rational)])>) -> Vec<(usize, Rational)> {
    let mut merged: BTreeMap<usize, Rational> = BTreeMap::new();
    for (weight, entries) in parts {
        if weight.is_zero() {
            continue;
        }
        for (t, p) in entries {
            *merged.entry(*t).or_insert_with(Rational::zero) += &weight * p;
        }
    }
    merged.into_iter().collect()
}

/// Averages `sigma`'s player out of `game`, leaving the other player's
/// MDP.
pub fn fix_strategy(game: &GameStructure, sigma: &StationaryStrategy) -> Result<Mdp, VerifyError> {
    if !sigma.fits(game) {
        return Err(VerifyError::StrategyMismatch(
            "stationary rows do not match the game's states and actions".into(),
        ));
    }
    let fixed = sigma.player();
    let free = fixed.other();
    let names: Vec<String> = game.state_ids().map(|s| game.state_name(s).to_string()).collect();
    let mut action_names = Vec::with_capacity(game.n());
    let mut delta = Vec::with_capacity(game.n());
    let mut reward = Vec::with_capacity(game.n());
    for s in game.state_ids() {
        let free_actions: Vec<String> = game.actions(free, s).to_vec();
        let mut srows = Vec::with_capacity(free_actions.len());
        let mut srewards = Vec::with_capacity(free_actions.len());
        for f in 0..free_actions.len() {
            let mut parts = Vec::new();
            let mut r = Rational::zero();
            for (x, w) in sigma.row(s) {
                let (a, b) = match fixed {
                    Player::One => (*x, f),
                    Player::Two => (f, *x),
                };
                parts.push((w.clone(), game.delta(s, a, b).entries()));
                r += w * game.reward(s, a, b);
            }
            srows.push(merge_row(parts));
            srewards.push(r);
        }
        action_names.push(free_actions);
        delta.push(srows);
        reward.push(srewards);
    }
    Ok(Mdp { names, action_names, delta, reward })
}

/// Fixes both players, leaving a Markov chain over the game's states.
pub fn chain_of(
    game: &GameStructure,
    sigma1: &StationaryStrategy,
    sigma2: &StationaryStrategy,
) -> Result<MarkovChain, VerifyError> {
    if sigma1.player() != Player::One || sigma2.player() != Player::Two {
        return Err(VerifyError::WrongPlayer);
    }
    if !sigma1.fits(game) || !sigma2.fits(game) {
        return Err(VerifyError::StrategyMismatch(
            "stationary rows do not match the game's states and actions".into(),
        ));
    }
    let names: Vec<String> = game.state_ids().map(|s| game.state_name(s).to_string()).collect();
    let mut rows = Vec::with_capacity(game.n());
    let mut rewards = Vec::with_capacity(game.n());
    for s in game.state_ids() {
        let mut parts = Vec::new();
        let mut r = Rational::zero();
        for (a, wa) in sigma1.row(s) {
            for (b, wb) in sigma2.row(s) {
                let w = wa * wb;
                r += &w * game.reward(s, *a, *b);
                parts.push((w, game.delta(s, *a, *b).entries()));
            }
        }
        rows.push(merge_row(parts));
        rewards.push(r);
    }
    MarkovChain::new(names, rows, rewards)
}

/// Optimization sense for the free player.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Goal {
    Min,
    Max,
}

impl Goal {
    fn improves(self, candidate: &Rational, incumbent: &Rational) -> bool {
        match self {
            Goal::Min => candidate < incumbent,
            Goal::Max => candidate > incumbent,
        }
    }

    fn prefers_vector(self, candidate: &[Rational], incumbent: &[Rational]) -> bool {
        match self {
            Goal::Min => candidate < incumbent,
            Goal::Max => candidate > incumbent,
        }
    }
}

/// Optimal mean-payoff values with a positional policy attaining them at
/// every state simultaneously.
#[derive(Debug, Clone, PartialEq)]
pub struct MdpSolution {
    pub values: Vec<Rational>,
    pub policy: Vec<usize>,
}

/// Exhaustive positional enumeration. Errors when the policy count
/// exceeds `bound`.
pub fn enumerate_mean_payoff(
    mdp: &Mdp,
    goal: Goal,
    bound: u64,
) -> Result<MdpSolution, VerifyError> {
    let count = mdp.policy_count();
    if count > BigUint::from(bound) {
        return Err(VerifyError::EnumerationBound { bound, count: count.to_string() });
    }
    let n = mdp.n();
    let mut policy = vec![0usize; n];
    let mut best: Option<MdpSolution> = None;
    let mut pointwise: Vec<Option<Rational>> = vec![None; n];
    loop {
        let values = analyze(&mdp.policy_chain(&policy)?)?.expected;
        for (s, value) in values.iter().enumerate() {
            let replace = match &pointwise[s] {
                Some(current) => goal.improves(value, current),
                None => true,
            };
            if replace {
                pointwise[s] = Some(value.clone());
            }
        }
        let replace = match &best {
            Some(incumbent) => goal.prefers_vector(&values, &incumbent.values),
            None => true,
        };
        if replace {
            best = Some(MdpSolution { values, policy: policy.clone() });
        }
        // Odometer step over the per-state action ranges.
        let mut s = 0;
        loop {
            if s == n {
                let best = best.expect("at least one policy was evaluated");
                let pointwise: Vec<Rational> =
                    pointwise.into_iter().map(|v| v.expect("state evaluated")).collect();
                if best.values != pointwise {
                    return Err(VerifyError::InternalConsistency(
                        "no single positional policy attains every per-state optimum".into(),
                    ));
                }
                return Ok(best);
            }
            policy[s] += 1;
            if policy[s] < mdp.action_count(s) {
                break;
            }
            policy[s] = 0;
            s += 1;
        }
    }
}

/// Exact gain/bias evaluation of a positional policy. The bias is
/// anchored to 0 at the smallest state of each recurrent class, which
/// pins the per-class additive constant without disturbing the bias
/// equation anywhere.
fn evaluate_policy(
    mdp: &Mdp,
    policy: &[usize],
) -> Result<(Vec<Rational>, Vec<Rational>), VerifyError> {
    let n = mdp.n();
    let chain = mdp.policy_chain(policy)?;
    let analysis = analyze(&chain)?;
    let gain = analysis.expected;
    let mut anchors = vec![false; n];
    for class in &analysis.classes {
        anchors[class[0]] = true;
    }
    let mut a = vec![vec![Rational::zero(); n]; n];
    let mut rhs = vec![vec![Rational::zero()]; n];
    for s in 0..n {
        if anchors[s] {
            a[s][s] = Rational::one();
            continue;
        }
        a[s][s] += Rational::one();
        for (t, p) in chain.step_row(s) {
            a[s][*t] -= p.clone();
        }
        rhs[s][0] = mdp.reward(s, policy[s]) - &gain[s];
    }
    let solution = linalg::solve(a, rhs)
        .ok_or_else(|| VerifyError::InternalConsistency("bias system is singular".into()))?;
    let bias = solution.into_iter().map(|mut row| row.pop().expect("one column")).collect();
    Ok((gain, bias))
}

/// Multichain Howard policy iteration with exact arithmetic: improve the
/// expected gain where an action strictly improves it, otherwise improve
/// the bias among the gain-preserving actions; stop when neither phase
/// changes the policy.
pub fn howard_mean_payoff(mdp: &Mdp, goal: Goal) -> Result<MdpSolution, VerifyError> {
    let n = mdp.n();
    let mut policy = vec![0usize; n];
    for _ in 0..IMPROVEMENT_CAP {
        let (gain, bias) = evaluate_policy(mdp, &policy)?;
        let dot = |row: &[(usize, Rational)], v: &[Rational]| -> Rational {
            row.iter().map(|(t, p)| p * &v[*t]).sum()
        };
        let mut changed = false;
        for s in 0..n {
            let mut best_action = policy[s];
            let mut best_q = gain[s].clone();
            for a in 0..mdp.action_count(s) {
                let q = dot(mdp.row(s, a), &gain);
                if goal.improves(&q, &best_q) {
                    best_q = q;
                    best_action = a;
                }
            }
            if best_action != policy[s] {
                policy[s] = best_action;
                changed = true;
            }
        }
        if changed {
            continue;
        }
        for s in 0..n {
            let mut best_action = policy[s];
            let mut best_w = bias[s].clone();
            for a in 0..mdp.action_count(s) {
                if dot(mdp.row(s, a), &gain) != gain[s] {
                    continue;
                }
                let w = mdp.reward(s, a) - &gain[s] + dot(mdp.row(s, a), &bias);
                if goal.improves(&w, &best_w) {
                    best_w = w;
                    best_action = a;
                }
            }
            if best_action != policy[s] {
                policy[s] = best_action;
                changed = true;
            }
        }
        if !changed {
            return Ok(MdpSolution { values: gain, policy });
        }
    }
    Err(VerifyError::PolicyIterationDiverged(IMPROVEMENT_CAP))
}

/// Optimal values for `goal`, by enumeration when the positional-policy
/// count fits under `bound` and by policy iteration otherwise.
pub fn solve_mean_payoff(mdp: &Mdp, goal: Goal, bound: u64) -> Result<MdpSolution, VerifyError> {
    if mdp.policy_count() <= BigUint::from(bound) {
        enumerate_mean_payoff(mdp, goal, bound)
    } else {
        howard_mean_payoff(mdp, goal)
    }
}

/// Minimum mean-payoff values of the MDP (the adversarial direction for
/// claims of the form "at least `1 - eps`").
pub fn mdp_min_mean_payoff(mdp: &Mdp) -> Result<MdpSolution, VerifyError> {
    solve_mean_payoff(mdp, Goal::Min, DEFAULT_ENUMERATION_BOUND)
}

/// Maximum mean-payoff values of the MDP (the adversarial direction for
/// claims of the form "at most `1 - c`").
pub fn mdp_max_mean_payoff(mdp: &Mdp) -> Result<MdpSolution, VerifyError> {
    solve_mean_payoff(mdp, Goal::Max, DEFAULT_ENUMERATION_BOUND)
}
