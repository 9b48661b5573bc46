//! The coBuchi cross-oracle for turn-based deterministic boolean games.
//!
//! On such games, winning the "limit average equals 1" objective with
//! positive probability coincides with classical coBuchi winning:
//! eventually-always traversing only reward-1 edges. The winning set is
//! computed on the edge-split graph (states plus one midpoint vertex per
//! available move) by the two-level fixpoint
//! `mu Y. nu Z. (safe and pre(Z)) or pre(Y)`, entirely independently of
//! the mean-payoff machinery, so the two solvers can referee each other.

use num::One;

use crate::error::VerifyError;
use crate::game::{GameStructure, Player, StateSet};
use crate::rational::Rational;

struct SplitGraph {
    /// Per original state: the midpoint vertex of each available move.
    moves: Vec<Vec<usize>>,
    /// Whether the owner of each original state picks the move
    /// (existential) or suffers it (universal).
    existential: Vec<bool>,
    /// Per midpoint (indexed from 0): its unique target state and whether
    /// its edge pays 1.
    target: Vec<usize>,
    rewarding: Vec<bool>,
}

fn split(game: &GameStructure) -> Result<SplitGraph, VerifyError> {
    if !game.is_boolean() {
        return Err(VerifyError::NotTurnBasedDeterministic(
            "rewards are not all 0 or 1".into(),
        ));
    }
    let one = Rational::one();
    let mut moves = Vec::with_capacity(game.n());
    let mut existential = Vec::with_capacity(game.n());
    let mut target = Vec::new();
    let mut rewarding = Vec::new();
    for s in game.state_ids() {
        let k1 = game.action_count(Player::One, s);
        let k2 = game.action_count(Player::Two, s);
        if k1 > 1 && k2 > 1 {
            return Err(VerifyError::NotTurnBasedDeterministic(format!(
                "both players have choices at state {}",
                game.state_name(s)
            )));
        }
        // With at most one real chooser, every move is a single (a, b)
        // cell; a state where neither player chooses belongs to the
        // maximizer harmlessly.
        let owner_is_max = k2 == 1;
        let mut mids = Vec::new();
        for a in 0..k1 {
            for b in 0..k2 {
                let dist = game.delta(s, a, b);
                if !dist.is_dirac() {
                    return Err(VerifyError::NotTurnBasedDeterministic(format!(
                        "state {} has a probabilistic transition",
                        game.state_name(s)
                    )));
                }
                mids.push(target.len());
                target.push(dist.entries()[0].0);
                rewarding.push(*game.reward(s, a, b) == one);
            }
        }
        moves.push(mids);
        existential.push(owner_is_max);
    }
    Ok(SplitGraph { moves, existential, target, rewarding })
}

/// The set of states from which the maximizer can force the play to
/// eventually traverse only reward-1 edges forever. Requires a turn-based
/// deterministic game with boolean rewards.
pub fn cobuchi_winning_set(game: &GameStructure) -> Result<StateSet, VerifyError> {
    let graph = split(game)?;
    let n = game.n();
    let mids = graph.target.len();
    // Vertex layout: originals 0..n, then midpoints n..n+mids. Midpoints
    // are safe exactly when their edge pays 1; originals are always safe
    // (badness lives on edges).
    let v = n + mids;
    let pre = |set: &[bool]| -> Vec<bool> {
        let mut out = vec![false; v];
        for s in 0..n {
            let hits = |m: &usize| set[n + m];
            out[s] = if graph.existential[s] {
                graph.moves[s].iter().any(hits)
            } else {
                graph.moves[s].iter().all(hits)
            };
        }
        for m in 0..mids {
            out[n + m] = set[graph.target[m]];
        }
        out
    };
    let mut y = vec![false; v];
    loop {
        let pre_y = pre(&y);
        let mut z = vec![true; v];
        loop {
            let pre_z = pre(&z);
            let mut next = vec![false; v];
            for i in 0..v {
                let safe = i < n || graph.rewarding[i - n];
                next[i] = (safe && pre_z[i]) || pre_y[i];
            }
            if next == z {
                break;
            }
            z = next;
        }
        if z == y {
            return Ok((0..n).filter(|&s| y[s]).collect());
        }
        y = z;
    }
}
