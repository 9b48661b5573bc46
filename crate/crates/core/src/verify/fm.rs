//! Refutation of finite-memory strategies on the two hard families where
//! only infinite memory wins.
//!
//! Both families have a single choice state with a 2x2 cell whose only
//! rewarding play is the matching pair on the second actions. Against any
//! finite-memory automaton with deterministic updates, the opponent can
//! track the automaton's memory exactly and answer the current memory
//! state alone: play the first column exactly when the automaton puts
//! zero weight on its first action, and the second column otherwise. The
//! resulting play is a finite Markov chain over (state, memory) pairs,
//! and its exact analysis certifies the refutation.

use std::collections::BTreeMap;

use num::{One, Zero};

use crate::error::VerifyError;
use crate::game::{GameStructure, Player, StateId};
use crate::rational::Rational;
use crate::solver::almost_set_improved;
use crate::strategy::{FiniteMemoryStrategy, StationaryStrategy};
use crate::verify::chain::{analyze, MarkovChain};
use crate::verify::claims::{verify_eps_claim, ReportRow, VerificationReport};

/// Which supported family the game matched, with its role assignment.
struct Roles {
    /// The single choice state.
    play: StateId,
    /// The matched labelings: `a[0]`/`b[0]` are the actions of the
    /// sink-reaching matching pair, `a[1]`/`b[1]` those of the rewarding
    /// staying pair.
    a: [usize; 2],
    b: [usize; 2],
}

fn is_absorbing(game: &GameStructure, s: StateId, reward: &Rational) -> bool {
    game.action_count(Player::One, s) == 1
        && game.action_count(Player::Two, s) == 1
        && game.delta(s, 0, 0).entries() == [(s, Rational::one())]
        && game.reward(s, 0, 0) == reward
}

fn cell_is(
    game: &GameStructure,
    s: StateId,
    a: usize,
    b: usize,
    target: StateId,
    reward: &Rational,
) -> bool {
    game.delta(s, a, b).entries() == [(target, Rational::one())]
        && game.reward(s, a, b) == reward
}

/// Matches the 2-state ladder: an absorbing reward-1 sink, and a choice
/// state where the matching first pair falls into the sink with reward 0,
/// the matching second pair stays with reward 1, and mismatches stay with
/// reward 0.
fn match_ladder(game: &GameStructure) -> Option<Roles> {
    if game.n() != 2 {
        return None;
    }
    let one = Rational::one();
    let zero = Rational::zero();
    for sink in game.state_ids() {
        if !is_absorbing(game, sink, &one) {
            continue;
        }
        let play = 1 - sink;
        if game.action_count(Player::One, play) != 2 || game.action_count(Player::Two, play) != 2
        {
            continue;
        }
        for a in [[0, 1], [1, 0]] {
            for b in [[0, 1], [1, 0]] {
                if cell_is(game, play, a[0], b[0], sink, &zero)
                    && cell_is(game, play, a[0], b[1], play, &zero)
                    && cell_is(game, play, a[1], b[0], play, &zero)
                    && cell_is(game, play, a[1], b[1], play, &one)
                {
                    return Some(Roles { play, a, b });
                }
            }
        }
    }
    None
}

/// Matches the 3-state coin game: absorbing reward-1 and reward-0 sinks,
/// and a choice state where the matching first pair reaches the good sink
/// with reward 0, the matching second pair stays with reward 1, and
/// mismatches fall into the bad sink.
fn match_coin(game: &GameStructure) -> Option<Roles> {
    if game.n() != 3 {
        return None;
    }
    let one = Rational::one();
    let zero = Rational::zero();
    for sink1 in game.state_ids() {
        if !is_absorbing(game, sink1, &one) {
            continue;
        }
        for sink0 in game.state_ids() {
            if sink0 == sink1 || !is_absorbing(game, sink0, &zero) {
                continue;
            }
            let play = game.state_ids().find(|&s| s != sink1 && s != sink0).expect("3 states");
            if game.action_count(Player::One, play) != 2
                || game.action_count(Player::Two, play) != 2
            {
                continue;
            }
            for a in [[0, 1], [1, 0]] {
                for b in [[0, 1], [1, 0]] {
                    if cell_is(game, play, a[0], b[0], sink1, &zero)
                        && cell_is(game, play, a[0], b[1], sink0, &zero)
                        && cell_is(game, play, a[1], b[0], sink0, &zero)
                        && cell_is(game, play, a[1], b[1], play, &one)
                    {
                        return Some(Roles { play, a, b });
                    }
                }
            }
        }
    }
    None
}

/// Weight `fm` puts on the first (labeled) action at the choice state in
/// memory `mem`.
fn first_action_weight(fm: &FiniteMemoryStrategy, roles: &Roles, mem: usize) -> Rational {
    fm.move_row(mem, roles.play)
        .iter()
        .find(|(a, _)| *a == roles.a[0])
        .map(|(_, w)| w.clone())
        .unwrap_or_else(Rational::zero)
}

/// The deterministic column the responder answers with in memory `mem` at
/// state `s`: the first column exactly when `fm` cannot play its first
/// action there, the second otherwise (sinks have a single column).
fn responder_column(fm: &FiniteMemoryStrategy, roles: &Roles, mem: usize, s: StateId) -> usize {
    if s != roles.play {
        return 0;
    }
    if first_action_weight(fm, roles, mem).is_zero() {
        roles.b[0]
    } else {
        roles.b[1]
    }
}

/// Builds the memory-tracking punishing responder: same memory automaton
/// as `fm`, moves determined by `fm`'s current memory alone.
fn build_responder(
    game: &GameStructure,
    fm: &FiniteMemoryStrategy,
    roles: &Roles,
) -> FiniteMemoryStrategy {
    let mm = fm.mem_count();
    let mem_names: Vec<String> = (0..mm).map(|m| fm.mem_name(m).to_string()).collect();
    let mut moves = Vec::with_capacity(mm);
    let mut update = Vec::with_capacity(mm);
    for mem in 0..mm {
        let mut mem_moves = Vec::with_capacity(game.n());
        let mut mem_update = Vec::with_capacity(game.n());
        for s in game.state_ids() {
            mem_moves.push(vec![(responder_column(fm, roles, mem, s), Rational::one())]);
            let k1 = game.action_count(Player::One, s);
            let k2 = game.action_count(Player::Two, s);
            mem_update.push(
                (0..k1)
                    .map(|a| (0..k2).map(|b| fm.next_mem(mem, s, a, b)).collect())
                    .collect(),
            );
        }
        moves.push(mem_moves);
        update.push(mem_update);
    }
    FiniteMemoryStrategy::new(game, Player::Two, mem_names, fm.initial(), moves, update)
        .expect("responder mirrors a validated automaton")
}

/// The chain over (state, memory) pairs reachable from the choice state
/// under `fm` against the responder, with the product states' names.
fn product_chain(
    game: &GameStructure,
    fm: &FiniteMemoryStrategy,
    roles: &Roles,
) -> Result<MarkovChain, VerifyError> {
    let start = (roles.play, fm.initial());
    let mut index: BTreeMap<(StateId, usize), usize> = BTreeMap::new();
    let mut order: Vec<(StateId, usize)> = Vec::new();
    index.insert(start, 0);
    order.push(start);
    let mut rows: Vec<Vec<(usize, Rational)>> = Vec::new();
    let mut rewards: Vec<Rational> = Vec::new();
    let mut next = 0usize;
    while next < order.len() {
        let (s, mem) = order[next];
        next += 1;
        let b = responder_column(fm, roles, mem, s);
        let mut row = Vec::new();
        let mut reward = Rational::zero();
        for (a, wa) in fm.move_row(mem, s) {
            reward += wa * game.reward(s, *a, b);
            let to_mem = fm.next_mem(mem, s, *a, b);
            for (t, pt) in game.delta(s, *a, b).entries() {
                let key = (*t, to_mem);
                let idx = *index.entry(key).or_insert_with(|| {
                    order.push(key);
                    order.len() - 1
                });
                row.push((idx, wa * pt));
            }
        }
        rows.push(row);
        rewards.push(reward);
    }
    let names = order
        .iter()
        .map(|(s, mem)| format!("{}@{}", game.state_name(*s), fm.mem_name(*mem)))
        .collect();
    MarkovChain::new(names, rows, rewards)
}

/// Refutes a finite-memory automaton for the maximizer on the ladder or
/// the coin game: returns the memory-tracking responder and the exact
/// product-chain verdict. On the ladder the limit average is certified to
/// stay at or below `1 - p` almost surely, where `p` is the automaton's
/// minimum positive weight on its first action; on the coin game the play
/// is certified to be absorbed at value 0.
pub fn spoil_finite_memory(
    game: &GameStructure,
    fm: &FiniteMemoryStrategy,
) -> Result<(FiniteMemoryStrategy, VerificationReport), VerifyError> {
    if fm.player() != Player::One {
        return Err(VerifyError::WrongPlayer);
    }
    if !fm.fits(game) {
        return Err(VerifyError::StrategyMismatch(
            "automaton tables do not match the game's states and actions".into(),
        ));
    }
    let (roles, is_ladder) = match match_ladder(game) {
        Some(roles) => (roles, true),
        None => match match_coin(game) {
            Some(roles) => (roles, false),
            None => {
                return Err(VerifyError::StructureMismatch(
                    "expected the 2-state ladder or the 3-state coin game".into(),
                ))
            }
        },
    };
    let responder = build_responder(game, fm, &roles);
    let chain = product_chain(game, fm, &roles)?;
    let analysis = analyze(&chain)?;
    let (claim, threshold) = if is_ladder {
        let mut p = Rational::one();
        for mem in 0..fm.mem_count() {
            let w = first_action_weight(fm, &roles, mem);
            if !w.is_zero() && w < p {
                p = w;
            }
        }
        (format!("fm-spoil-ladder p={p}"), Rational::one() - &p)
    } else {
        ("fm-spoil-coin".to_string(), Rational::zero())
    };
    let rows = (0..chain.n())
        .map(|i| ReportRow {
            state: chain.name(i).to_string(),
            value: analysis.max_reachable[i].clone(),
            pass: analysis.max_reachable[i] <= threshold,
        })
        .collect();
    Ok((responder, VerificationReport { claim, rows, witness: None }))
}

/// The truth of "patience below the floor implies the almost-sure claim
/// fails" for a candidate strategy on the n-rung ladder, with the floor
/// `eps^(-1.5^(n-1))` compared exactly by clearing the fractional
/// exponent: patience < floor iff patience^(2^(n-1)) * eps^(3^(n-1)) < 1.
pub fn patience_floor_check(
    n: usize,
    eps: &Rational,
    candidate: &StationaryStrategy,
) -> Result<bool, VerifyError> {
    if n == 0 {
        return Err(VerifyError::InternalConsistency("the ladder needs at least one rung".into()));
    }
    if !(eps > &Rational::zero() && eps <= &Rational::new(1.into(), 3.into())) {
        return Err(VerifyError::BadEps("0 < eps <= 1/3".into()));
    }
    if candidate.player() != Player::One {
        return Err(VerifyError::WrongPlayer);
    }
    let game = crate::generators::gen_gn(n);
    if !candidate.fits(&game) {
        return Err(VerifyError::StrategyMismatch(
            "stationary rows do not match the ladder's states and actions".into(),
        ));
    }
    let (e2, e3) = match (2usize.checked_pow((n - 1) as u32), 3usize.checked_pow((n - 1) as u32))
    {
        (Some(e2), Some(e3)) => (e2, e3),
        _ => {
            return Err(VerifyError::InternalConsistency(
                "floor exponent overflows a machine word".into(),
            ))
        }
    };
    let below_floor =
        num::pow::pow(candidate.patience(), e2) * num::pow::pow(eps.clone(), e3) < Rational::one();
    if !below_floor {
        return Ok(true);
    }
    let report = almost_set_improved(&game);
    let verdict = verify_eps_claim(&game, candidate, &report.winning, eps)?;
    Ok(!verdict.passed())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::GameBuilder;
    use crate::generators::{gen_gbar, gen_gm, gen_gn};
    use crate::rational::{rat, rat_int};
    use crate::synthesis::synth_eps_stationary;

    fn one_mem(game: &GameStructure, row_at_play: Vec<(usize, Rational)>) -> FiniteMemoryStrategy {
        let moves = vec![game
            .state_ids()
            .map(|s| {
                if game.action_count(Player::One, s) == 1 {
                    vec![(0, rat_int(1))]
                } else {
                    row_at_play.clone()
                }
            })
            .collect()];
        let update = vec![game
            .state_ids()
            .map(|s| {
                vec![
                    vec![0; game.action_count(Player::Two, s)];
                    game.action_count(Player::One, s)
                ]
            })
            .collect()];
        FiniteMemoryStrategy::new(game, Player::One, vec!["m0".into()], 0, moves, update).unwrap()
    }

    #[test]
    fn uniform_memoryless_play_is_held_at_one_half_on_the_ladder() {
        let g = gen_gn(1);
        let fm = one_mem(&g, vec![(0, rat(1, 2)), (1, rat(1, 2))]);
        let (responder, report) = spoil_finite_memory(&g, &fm).unwrap();
        assert!(report.passed());
        assert_eq!(report.claim, "fm-spoil-ladder p=1/2");
        // The play never leaves the choice state: the responder answers the
        // second column, under which both outcomes stay.
        assert_eq!(report.rows.len(), 1);
        assert_eq!(report.rows[0].state, "v1@m0");
        assert_eq!(report.rows[0].value, rat(1, 2));
        let v1 = g.state_id("v1").unwrap();
        assert_eq!(responder.move_row(0, v1), &[(1, rat_int(1))]);
    }

    #[test]
    fn never_playing_the_first_action_earns_nothing_on_the_ladder() {
        let g = gen_gn(1);
        let fm = one_mem(&g, vec![(1, rat_int(1))]);
        let (responder, report) = spoil_finite_memory(&g, &fm).unwrap();
        assert!(report.passed());
        assert_eq!(report.claim, "fm-spoil-ladder p=1");
        assert_eq!(report.rows[0].value, rat_int(0));
        let v1 = g.state_id("v1").unwrap();
        assert_eq!(responder.move_row(0, v1), &[(0, rat_int(1))]);
    }

    #[test]
    fn any_small_automaton_is_absorbed_at_zero_on_the_coin_game() {
        let g = gen_gbar();
        // Three memory states cycling on every observation; the automaton
        // alternates two silent rounds with one round of the first action.
        let mut moves = Vec::new();
        let mut update = Vec::new();
        for mem in 0..3usize {
            moves.push(
                g.state_ids()
                    .map(|s| {
                        if game_choice(&g, s) {
                            if mem == 2 {
                                vec![(0, rat(1, 3)), (1, rat(2, 3))]
                            } else {
                                vec![(1, rat_int(1))]
                            }
                        } else {
                            vec![(0, rat_int(1))]
                        }
                    })
                    .collect(),
            );
            update.push(
                g.state_ids()
                    .map(|s| {
                        vec![
                            vec![(mem + 1) % 3; g.action_count(Player::Two, s)];
                            g.action_count(Player::One, s)
                        ]
                    })
                    .collect(),
            );
        }
        let fm = FiniteMemoryStrategy::new(
            &g,
            Player::One,
            vec!["m0".into(), "m1".into(), "m2".into()],
            0,
            moves,
            update,
        )
        .unwrap();
        let (_, report) = spoil_finite_memory(&g, &fm).unwrap();
        assert!(report.passed());
        assert_eq!(report.claim, "fm-spoil-coin");
        let start = report.rows.iter().find(|row| row.state == "v@m0").unwrap();
        assert_eq!(start.value, rat_int(0));
        assert!(report.rows.iter().all(|row| row.value < rat_int(1)));
    }

    fn game_choice(game: &GameStructure, s: StateId) -> bool {
        game.action_count(Player::One, s) > 1
    }

    #[test]
    fn relabeled_ladders_still_match() {
        // Same dynamics as the 1-rung ladder with both action orders
        // swapped at the choice state and the states listed sink-last.
        let mut b = GameBuilder::new("relabeled");
        b.state("p").unwrap();
        b.state("z").unwrap();
        b.actions(Player::One, "p", &["x1", "x2"]).unwrap();
        b.actions(Player::Two, "p", &["y1", "y2"]).unwrap();
        b.actions(Player::One, "z", &["x"]).unwrap();
        b.actions(Player::Two, "z", &["y"]).unwrap();
        b.trans("z", "x", "y", rat_int(1), &[("z", rat_int(1))]).unwrap();
        b.trans("p", "x2", "y2", rat_int(0), &[("z", rat_int(1))]).unwrap();
        b.trans("p", "x2", "y1", rat_int(0), &[("p", rat_int(1))]).unwrap();
        b.trans("p", "x1", "y2", rat_int(0), &[("p", rat_int(1))]).unwrap();
        b.trans("p", "x1", "y1", rat_int(1), &[("p", rat_int(1))]).unwrap();
        let g = b.build().unwrap();
        let fm = one_mem(&g, vec![(0, rat(1, 4)), (1, rat(3, 4))]);
        let (_, report) = spoil_finite_memory(&g, &fm).unwrap();
        // Under the swapped labeling the automaton's "first action" is x2
        // with weight 3/4, so the certified bound is 1 - 3/4.
        assert_eq!(report.claim, "fm-spoil-ladder p=3/4");
        assert!(report.passed());
        assert_eq!(report.rows[0].value, rat(1, 4));
    }

    #[test]
    fn unrelated_games_are_rejected() {
        let g = gen_gm(2);
        let fm = one_mem(&g, vec![(0, rat(1, 2)), (1, rat(1, 2))]);
        assert!(matches!(
            spoil_finite_memory(&g, &fm),
            Err(VerifyError::StructureMismatch(_))
        ));
    }

    #[test]
    fn patience_floor_holds_on_spec_instances() {
        // Patience 2 is below the floor 4 and the uniform row indeed fails
        // the quarter claim.
        let g = gen_gn(1);
        let uniform = StationaryStrategy::uniform(&g, Player::One);
        assert!(patience_floor_check(1, &rat(1, 4), &uniform).unwrap());

        // The graded strategy on the 2-rung ladder has patience 6144, well
        // above the floor 8, so the implication is vacuous.
        let g2 = gen_gn(2);
        let report = almost_set_improved(&g2);
        let graded = synth_eps_stationary(&g2, &report, &rat(1, 4)).unwrap();
        assert_eq!(graded.patience(), rat_int(6144));
        assert!(patience_floor_check(2, &rat(1, 4), &graded).unwrap());

        // Zero weight on the descending action loses outright; the check
        // still reports the implication as true.
        let rows = g
            .state_ids()
            .map(|s| {
                if g.action_count(Player::One, s) == 1 {
                    vec![(0, rat_int(1))]
                } else {
                    vec![(1, rat_int(1))]
                }
            })
            .collect();
        let stubborn = StationaryStrategy::new(&g, Player::One, rows).unwrap();
        assert!(patience_floor_check(1, &rat(1, 4), &stubborn).unwrap());

        assert!(matches!(
            patience_floor_check(1, &rat(1, 2), &uniform),
            Err(VerifyError::BadEps(_))
        ));
    }
}
