//! One-step set operators over a game: allowed actions, spoiling
//! counter-actions, good actions, and the combined `asp` predecessor
//! operator that the fixpoint solvers iterate.

use crate::error::OpError;
use crate::game::{ActionId, GameStructure, Player, StateId, StateSet};

/// Actions of player 1 at `s` whose successors stay inside `x` no matter
/// which action player 2 picks.
pub fn allow1(game: &GameStructure, s: StateId, x: &StateSet) -> Vec<ActionId> {
    let a_count = game.action_count(Player::One, s);
    let b_count = game.action_count(Player::Two, s);
    (0..a_count)
        .filter(|&a| {
            (0..b_count).all(|b| game.delta(s, a, b).supported_in(x))
        })
        .collect()
}

/// Actions of player 2 at `s` that can push some allowed player-1 action
/// into `y` with positive probability. Requires `y ⊆ x`.
pub fn bad2(
    game: &GameStructure,
    s: StateId,
    x: &StateSet,
    y: &StateSet,
) -> Result<Vec<ActionId>, OpError> {
    if !y.is_subset(x) {
        return Err(OpError::Precondition(
            "bad2 requires the second argument to be a subset of the first".into(),
        ));
    }
    let allowed = allow1(game, s, x);
    let b_count = game.action_count(Player::Two, s);
    Ok((0..b_count)
        .filter(|&b| {
            allowed
                .iter()
                .any(|&a| game.delta(s, a, b).support().any(|t| y.contains(&t)))
        })
        .collect())
}

/// Allowed actions of player 1 at `s` that, against every non-spoiling
/// player-2 action, earn the maximal reward and stay inside `z`.
/// Requires `y ⊆ z ⊆ x`.
pub fn good1(
    game: &GameStructure,
    s: StateId,
    x: &StateSet,
    y: &StateSet,
    z: &StateSet,
) -> Result<Vec<ActionId>, OpError> {
    if !y.is_subset(z) || !z.is_subset(x) {
        return Err(OpError::Precondition(
            "good1 requires nested arguments: second within third within first".into(),
        ));
    }
    let allowed = allow1(game, s, x);
    let bad = bad2(game, s, x, y)?;
    let b_count = game.action_count(Player::Two, s);
    Ok(allowed
        .iter()
        .copied()
        .filter(|&a| {
            (0..b_count)
                .filter(|b| !bad.contains(b))
                .all(|b| {
                    game.reward_is_max(s, a, b) && game.delta(s, a, b).supported_in(z)
                })
        })
        .collect())
}

/// States where player 1 has at least one good action: the one-step
/// predecessor operator of the nested fixpoint. Requires `y ⊆ z ⊆ x`.
pub fn asp(
    game: &GameStructure,
    x: &StateSet,
    y: &StateSet,
    z: &StateSet,
) -> Result<StateSet, OpError> {
    let mut out = StateSet::new();
    for s in game.state_ids() {
        if !good1(game, s, x, y, z)?.is_empty() {
            out.insert(s);
        }
    }
    Ok(out)
}
