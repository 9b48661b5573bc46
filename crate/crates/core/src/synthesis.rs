//! Witness-strategy synthesis. Builds, as explicit data, the strategies
//! whose existence the winning-set characterizations promise: the
//! eps-graded stationary family on the almost-sure set, its round-indexed
//! assembly with certified horizons, the spoiling constructions on the
//! complements, and the positive-winning round strategy. All weights are
//! exact rationals and every construction is a pure function of the game,
//! the solve report, and the parameters.

use crate::error::SynthError;
use crate::game::{GameStructure, Player, StateId, StateSet};
use crate::rational::{geometric_sum, pow_biguint, rat, Rational};
use crate::solver::{ops, Objective, SolveReport};
use crate::strategy::{
    ActionRow, ConstructionTag, RoundIndexedStrategy, RoundSegment, SegmentLength,
    StationaryStrategy,
};
use num::{BigUint, One, Signed, Zero};

fn check_eps(epsilon: &Rational) -> Result<(), SynthError> {
    if epsilon.is_positive() && *epsilon < Rational::one() {
        Ok(())
    } else {
        Err(SynthError::BadEps(epsilon.to_string()))
    }
}

/// The stage-`j` mixing weight: the weight spread over allowed non-good
/// actions on the `j`-th witness layer counted from the top.
///
/// `beta_2` and beyond shrink super-exponentially; stage 1 uses `epsilon`
/// itself (see [`layer_mixing`]). The exponents are geometric sums in `n`;
/// for `n = 1` each sum takes its limit value (the number of summands).
/// Accepts `epsilon = 1` so the degenerate value can be unit-tested.
pub fn beta(
    j: u32,
    n: usize,
    m: usize,
    delta_min: &Rational,
    epsilon: &Rational,
) -> Result<Rational, SynthError> {
    assert!(j >= 2, "beta is defined for stages j >= 2");
    assert!(n >= 1 && m >= 1, "beta requires at least one state and action");
    assert!(
        delta_min.is_positive() && *delta_min <= Rational::one(),
        "beta requires a transition-probability floor in (0, 1]"
    );
    if !epsilon.is_positive() || *epsilon > Rational::one() {
        return Err(SynthError::BadEps(epsilon.to_string()));
    }
    let sum_short = geometric_sum(n as u64, j - 1);
    let sum_full = geometric_sum(n as u64, j);
    let ratio = delta_min / Rational::from_integer((m as i64).into());
    let numer = pow_biguint(epsilon, &sum_full)
        * pow_biguint(&ratio, &(&sum_full - BigUint::one()));
    Ok(numer / pow_biguint(&Rational::from_integer((n as i64).into()), &sum_short))
}

/// Mixing weight for the layer `j` levels below the top: `epsilon` at the
/// top layer, `beta_j` below it.
fn layer_mixing(
    j: u32,
    n: usize,
    m: usize,
    delta_min: &Rational,
    epsilon: &Rational,
) -> Result<Rational, SynthError> {
    if j == 1 {
        Ok(epsilon.clone())
    } else {
        beta(j, n, m, delta_min, epsilon)
    }
}

fn uniform_row(game: &GameStructure, player: Player, s: StateId) -> ActionRow {
    let k = game.action_count(player, s);
    let w = rat(1, k as i64);
    (0..k).map(|a| (a, w.clone())).collect()
}

/// Weighted row: each action in `good` gets `(1 - mix)/|good|` (or
/// `1/|good|` when every allowed action is good), each remaining action in
/// `allowed` gets `mix/(|allowed| - |good|)`, everything else gets nothing.
fn graded_row(allowed: &[usize], good: &[usize], mix: &Rational) -> ActionRow {
    let aw = allowed.len() as i64;
    let gd = good.len() as i64;
    debug_assert!(gd >= 1 && gd <= aw);
    let mut row: ActionRow = Vec::with_capacity(allowed.len());
    if aw == gd {
        let w = rat(1, gd);
        for &a in good {
            row.push((a, w.clone()));
        }
    } else {
        let good_w = (Rational::one() - mix) / Rational::from_integer(gd.into());
        let other_w = mix / Rational::from_integer((aw - gd).into());
        for &a in allowed {
            if good.contains(&a) {
                row.push((a, good_w.clone()));
            } else {
                row.push((a, other_w.clone()));
            }
        }
    }
    row.sort_by_key(|(a, _)| *a);
    row
}

fn almost_sure_chain<'r>(
    report: &'r SolveReport,
) -> Result<&'r [StateSet], SynthError> {
    if report.objective != Objective::AlmostSure {
        return Err(SynthError::ReportMismatch(
            "an almost-sure report is required".into(),
        ));
    }
    if report.winning.is_empty() {
        return Ok(&report.y_chain);
    }
    if report.y_chain.is_empty() {
        return Err(SynthError::MissingChain);
    }
    if report.y_chain.last() != Some(&report.winning) {
        return Err(SynthError::ReportMismatch(
            "witness chain does not end at the winning set".into(),
        ));
    }
    Ok(&report.y_chain)
}

/// The eps-graded stationary strategy for player 1 on the almost-sure set.
///
/// On the `i`-th witness layer (with `j = chain length - i + 1` counting
/// from the top), good actions share `1 - mix` and remaining allowed
/// actions share `mix`, where `mix` is `epsilon` at the top layer and
/// `beta_j` below it; outside the winning set the strategy is uniform.
pub fn synth_eps_stationary(
    game: &GameStructure,
    report: &SolveReport,
    epsilon: &Rational,
) -> Result<StationaryStrategy, SynthError> {
    check_eps(epsilon)?;
    let chain = almost_sure_chain(report)?;
    let ell = chain.len();
    let n = game.n();
    let m = game.m();
    let empty = StateSet::new();
    let mut rows = Vec::with_capacity(n);
    for s in game.state_ids() {
        if !report.winning.contains(&s) {
            rows.push(uniform_row(game, Player::One, s));
            continue;
        }
        let i = report.y_index(game, s);
        debug_assert!(i >= 1 && i <= ell);
        let j = (ell - i + 1) as u32;
        let mix = layer_mixing(j, n, m, game.delta_min(), epsilon)?;
        let below = if i >= 2 { &chain[i - 2] } else { &empty };
        let layer = &chain[i - 1];
        let allowed = ops::allow1(game, s, &report.winning);
        let good = ops::good1(game, s, &report.winning, below, layer)
            .map_err(|e| SynthError::InternalConsistency(e.to_string()))?;
        if good.is_empty() {
            return Err(SynthError::InternalConsistency(format!(
                "winning state {} has no good action on its layer",
                game.state_name(s)
            )));
        }
        rows.push(graded_row(&allowed, &good, &mix));
    }
    StationaryStrategy::new(game, Player::One, rows)
        .map_err(|e| SynthError::InternalConsistency(e.to_string()))
}

/// Exact patience bound `(n*m/(delta_min*epsilon))^(n^(n+2))` check for the
/// eps-graded strategy, decided without materializing the right-hand side.
pub fn patience_within_bound(
    game: &GameStructure,
    sigma: &StationaryStrategy,
    epsilon: &Rational,
) -> bool {
    let n = game.n();
    let m = game.m();
    let base = Rational::from_integer(((n * m) as i64).into())
        / (game.delta_min() * epsilon);
    debug_assert!(base > Rational::one());
    let exp = BigUint::from(n).pow((n + 2) as u32);
    crate::rational::le_pow(&sigma.patience(), &base, &exp)
}

/// Expected total rewards after each step of value iteration on the MDP
/// where player 1 plays `sigma` and player 2 minimizes.
fn min_value_step(game: &GameStructure, sigma: &StationaryStrategy, v: &[Rational]) -> Vec<Rational> {
    game.state_ids()
        .map(|s| {
            (0..game.action_count(Player::Two, s))
                .map(|b| {
                    sigma
                        .row(s)
                        .iter()
                        .map(|(a, w)| {
                            let step: Rational = game
                                .delta(s, *a, b)
                                .entries()
                                .iter()
                                .map(|(t, p)| p * &v[*t])
                                .sum();
                            w * &(game.reward(s, *a, b) + step)
                        })
                        .sum::<Rational>()
                })
                .min()
                .expect("at least one action")
        })
        .collect()
}

/// Smallest horizon `T` such that `T`-step value iteration on the
/// minimizing MDP certifies expected average reward at least
/// `1 - 2*epsilon_i` from every state in `targets`; fails past `cap`
/// with the best certified average so far.
pub fn compute_horizon(
    game: &GameStructure,
    sigma: &StationaryStrategy,
    targets: &StateSet,
    epsilon_i: &Rational,
    cap: u64,
) -> Result<u64, SynthError> {
    let goal = Rational::one() - rat(2, 1) * epsilon_i;
    let mut v: Vec<Rational> = vec![Rational::zero(); game.n()];
    let mut best: Option<Rational> = None;
    for t in 1..=cap {
        v = min_value_step(game, sigma, &v);
        let worst = targets
            .iter()
            .map(|&s| &v[s] / Rational::from_integer((t as i64).into()))
            .min();
        match worst {
            None => return Ok(t),
            Some(w) => {
                if w >= goal {
                    return Ok(t);
                }
                best = Some(match best {
                    Some(b) if b > w => b,
                    _ => w,
                });
            }
        }
    }
    Err(SynthError::HorizonCapExceeded {
        cap,
        best: best.map_or_else(|| "none".into(), |b| b.to_string()),
    })
}

/// The round-indexed almost-sure strategy: segment `i` plays the
/// eps-graded strategy for `epsilon_i` (halving from 1/4) over a horizon
/// certified by [`compute_horizon`]. Materializes the first segment; later
/// segments extend on demand via [`ensure_rounds`].
pub fn synth_markov_almost(
    game: &GameStructure,
    report: &SolveReport,
    horizon_cap: u64,
) -> Result<RoundIndexedStrategy, SynthError> {
    almost_sure_chain(report)?;
    if report.winning.is_empty() {
        return Err(SynthError::ReportMismatch(
            "the almost-sure set is empty; nothing to win from".into(),
        ));
    }
    let eps1 = rat(1, 4);
    let sigma = synth_eps_stationary(game, report, &eps1)?;
    let horizon = compute_horizon(game, &sigma, &report.winning, &eps1, horizon_cap)?;
    Ok(RoundIndexedStrategy::new(
        Player::One,
        ConstructionTag::EpsHalvingAlmostSure { horizon_cap },
        vec![RoundSegment { length: SegmentLength::Finite(horizon), strategy: sigma }],
    ))
}

/// `epsilon_i` of the halving schedule: 1/4, 1/8, 1/16, ...
fn halving_eps(i: u64) -> Rational {
    let mut e = rat(1, 4);
    for _ in 1..i {
        e /= rat(2, 1);
    }
    e
}

/// Per-state classification for the spoiler construction over the outer
/// chain: either a fixed row (outside the first refinement or inside the
/// almost-sure set) or a coin layer mixing "uniform over all" with
/// "uniform over the non-spoiling actions".
struct SpoilerPlan {
    /// `Some(row)` for round-independent states; `None` for coin layers.
    fixed: Vec<Option<ActionRow>>,
    /// For coin layers: the non-spoiling action set.
    non_bad: Vec<Vec<usize>>,
}

fn spoiler_plan(game: &GameStructure, report: &SolveReport) -> Result<SpoilerPlan, SynthError> {
    if report.objective != Objective::AlmostSure {
        return Err(SynthError::ReportMismatch(
            "an almost-sure report is required".into(),
        ));
    }
    let chain = report.x_chain.as_ref().ok_or(SynthError::MissingOuterChain)?;
    if report.winning == game.all_states() {
        return Err(SynthError::ReportMismatch(
            "every state is almost-sure winning; nothing to spoil".into(),
        ));
    }
    let mut fixed = vec![None; game.n()];
    let mut non_bad = vec![Vec::new(); game.n()];
    for s in game.state_ids() {
        if report.winning.contains(&s) {
            fixed[s] = Some(uniform_row(game, Player::Two, s));
            continue;
        }
        // Position in the outer chain: the last layer still containing s.
        let j = chain.iter().take_while(|layer| layer.contains(&s)).count();
        debug_assert!(j >= 1 && j < chain.len());
        let bad = ops::bad2(game, s, &chain[j - 1], &chain[j])
            .map_err(|e| SynthError::InternalConsistency(e.to_string()))?;
        let nb: Vec<usize> = (0..game.action_count(Player::Two, s))
            .filter(|b| !bad.contains(b))
            .collect();
        if nb.is_empty() {
            return Err(SynthError::InternalConsistency(format!(
                "every action of player 2 at {} is spoiling-excluded",
                game.state_name(s)
            )));
        }
        if j == 1 || nb.len() == game.action_count(Player::Two, s) {
            // Base layer, or a coin layer where no action is spoiling: the
            // coin mixture of "uniform over all" with "uniform over nb"
            // degenerates to plain uniform over nb, independent of the coin.
            let w = rat(1, nb.len() as i64);
            fixed[s] = Some(nb.iter().map(|&b| (b, w.clone())).collect());
        } else {
            non_bad[s] = nb;
        }
    }
    Ok(SpoilerPlan { fixed, non_bad })
}

fn spoiler_round_rows(
    game: &GameStructure,
    plan: &SpoilerPlan,
    coin: &Rational,
) -> Vec<ActionRow> {
    game.state_ids()
        .map(|s| match &plan.fixed[s] {
            Some(row) => row.clone(),
            None => {
                let k = game.action_count(Player::Two, s);
                let all_w = coin / Rational::from_integer((k as i64).into());
                let nb = &plan.non_bad[s];
                let nb_w = (Rational::one() - coin)
                    / Rational::from_integer((nb.len() as i64).into());
                (0..k)
                    .map(|b| {
                        let w = if nb.contains(&b) {
                            &all_w + &nb_w
                        } else {
                            all_w.clone()
                        };
                        (b, w)
                    })
                    .collect()
            }
        })
        .collect()
}

/// The round-indexed spoiler for player 2 on the complement of the
/// almost-sure set, built over the report's outer refinement chain. In
/// round `i`, states strictly inside the first refinement flip a coin with
/// probability `spoiler_eps/2^i` between "uniform over all actions" and
/// "uniform over the non-spoiling actions"; the outermost layer always
/// plays uniform over its non-spoiling actions. When no state needs the
/// coin the result is a single unbounded segment.
pub fn synth_spoiler_markov(
    game: &GameStructure,
    report: &SolveReport,
    spoiler_eps: &Rational,
) -> Result<RoundIndexedStrategy, SynthError> {
    check_eps(spoiler_eps)?;
    let plan = spoiler_plan(game, report)?;
    let tag = ConstructionTag::SpoilerMarkov { eps: spoiler_eps.clone() };
    if plan.fixed.iter().all(Option::is_some) {
        let rows = spoiler_round_rows(game, &plan, &Rational::zero());
        let sigma = StationaryStrategy::new(game, Player::Two, rows)
            .map_err(|e| SynthError::InternalConsistency(e.to_string()))?;
        return Ok(RoundIndexedStrategy::new(
            Player::Two,
            tag,
            vec![RoundSegment { length: SegmentLength::Rest, strategy: sigma }],
        ));
    }
    let coin = spoiler_eps / rat(2, 1);
    let rows = spoiler_round_rows(game, &plan, &coin);
    let sigma = StationaryStrategy::new(game, Player::Two, rows)
        .map_err(|e| SynthError::InternalConsistency(e.to_string()))?;
    Ok(RoundIndexedStrategy::new(
        Player::Two,
        tag,
        vec![RoundSegment { length: SegmentLength::Finite(1), strategy: sigma }],
    ))
}

/// The guaranteed-gap constant of the spoiler constructions:
/// `(delta_min/m)^(n-1) / m`.
pub fn spoiler_gap(game: &GameStructure) -> Rational {
    let m = Rational::from_integer((game.m() as i64).into());
    let ratio = game.delta_min() / &m;
    pow_biguint(&ratio, &BigUint::from(game.n() - 1)) / m
}

/// The stationary spoiler for player 2 on the complement of the positive
/// winning set: uniform over the non-spoiling actions outside the set,
/// uniform over everything inside. Patience at most `m`.
pub fn synth_positive_spoiler_stationary(
    game: &GameStructure,
    report: &SolveReport,
) -> Result<StationaryStrategy, SynthError> {
    if report.objective != Objective::Positive {
        return Err(SynthError::ReportMismatch("a positive report is required".into()));
    }
    if report.winning == game.all_states() {
        return Err(SynthError::ReportMismatch(
            "every state is positive winning; nothing to spoil".into(),
        ));
    }
    let all = game.all_states();
    let mut rows = Vec::with_capacity(game.n());
    for s in game.state_ids() {
        if report.winning.contains(&s) {
            rows.push(uniform_row(game, Player::Two, s));
            continue;
        }
        let bad = ops::bad2(game, s, &all, &report.winning)
            .map_err(|e| SynthError::InternalConsistency(e.to_string()))?;
        let nb: Vec<usize> = (0..game.action_count(Player::Two, s))
            .filter(|b| !bad.contains(b))
            .collect();
        if nb.is_empty() {
            return Err(SynthError::InternalConsistency(format!(
                "every action of player 2 at {} is spoiling-excluded",
                game.state_name(s)
            )));
        }
        let w = rat(1, nb.len() as i64);
        rows.push(nb.iter().map(|&b| (b, w.clone())).collect());
    }
    StationaryStrategy::new(game, Player::Two, rows)
        .map_err(|e| SynthError::InternalConsistency(e.to_string()))
}

fn positive_round_rows(
    game: &GameStructure,
    report: &SolveReport,
    eps_k: &Rational,
) -> Result<Vec<ActionRow>, SynthError> {
    let all = game.all_states();
    let empty = StateSet::new();
    let mut rows = Vec::with_capacity(game.n());
    for s in game.state_ids() {
        if !report.winning.contains(&s) {
            rows.push(uniform_row(game, Player::One, s));
            continue;
        }
        let i = report.y_index(game, s);
        let below = if i >= 2 { &report.y_chain[i - 2] } else { &empty };
        let layer = &report.y_chain[i - 1];
        let allowed = ops::allow1(game, s, &all);
        let good = ops::good1(game, s, &all, below, layer)
            .map_err(|e| SynthError::InternalConsistency(e.to_string()))?;
        if good.is_empty() {
            return Err(SynthError::InternalConsistency(format!(
                "positive-winning state {} has no good action on its layer",
                game.state_name(s)
            )));
        }
        rows.push(graded_row(&allowed, &good, eps_k));
    }
    Ok(rows)
}

/// The round-indexed positive-winning strategy for player 1: in round `k`,
/// good actions on each witness layer share `1 - epsilon_k` and the rest
/// share `epsilon_k`, halving from 1/4. Materializes round 1; later rounds
/// extend on demand via [`ensure_rounds`].
pub fn synth_positive_markov(
    game: &GameStructure,
    report: &SolveReport,
) -> Result<RoundIndexedStrategy, SynthError> {
    if report.objective != Objective::Positive {
        return Err(SynthError::ReportMismatch("a positive report is required".into()));
    }
    if report.winning.is_empty() {
        return Err(SynthError::ReportMismatch(
            "the positive winning set is empty; nothing to win from".into(),
        ));
    }
    if report.y_chain.is_empty() {
        return Err(SynthError::MissingChain);
    }
    let rows = positive_round_rows(game, report, &halving_eps(1))?;
    let sigma = StationaryStrategy::new(game, Player::One, rows)
        .map_err(|e| SynthError::InternalConsistency(e.to_string()))?;
    Ok(RoundIndexedStrategy::new(
        Player::One,
        ConstructionTag::PositiveMarkov,
        vec![RoundSegment { length: SegmentLength::Finite(1), strategy: sigma }],
    ))
}

/// Extends a round-indexed strategy's materialized segments until round
/// `t` is covered, following its construction tag. A strategy with an
/// unbounded final segment is already fully covered; an explicit strategy
/// cannot be extended past its materialized rounds.
pub fn ensure_rounds(
    strategy: &mut RoundIndexedStrategy,
    game: &GameStructure,
    report: &SolveReport,
    t: u64,
) -> Result<(), SynthError> {
    loop {
        let covered = match strategy.materialized_rounds() {
            None => return Ok(()),
            Some(c) if c >= t => return Ok(()),
            Some(c) => c,
        };
        match strategy.tag().clone() {
            ConstructionTag::Explicit => {
                return Err(SynthError::MaterializationCap(covered));
            }
            ConstructionTag::EpsHalvingAlmostSure { horizon_cap } => {
                let i = strategy.segments().len() as u64 + 1;
                let eps_i = halving_eps(i);
                let sigma = synth_eps_stationary(game, report, &eps_i)?;
                let horizon =
                    compute_horizon(game, &sigma, &report.winning, &eps_i, horizon_cap)?;
                strategy.push_segment(RoundSegment {
                    length: SegmentLength::Finite(horizon),
                    strategy: sigma,
                });
            }
            ConstructionTag::SpoilerMarkov { eps } => {
                let plan = spoiler_plan(game, report)?;
                let round = covered + 1;
                let mut coin = eps.clone();
                for _ in 0..round {
                    coin /= rat(2, 1);
                }
                let rows = spoiler_round_rows(game, &plan, &coin);
                let sigma = StationaryStrategy::new(game, Player::Two, rows)
                    .map_err(|e| SynthError::InternalConsistency(e.to_string()))?;
                strategy.push_segment(RoundSegment {
                    length: SegmentLength::Finite(1),
                    strategy: sigma,
                });
            }
            ConstructionTag::PositiveMarkov => {
                let round = covered + 1;
                let rows = positive_round_rows(game, report, &halving_eps(round))?;
                let sigma = StationaryStrategy::new(game, Player::One, rows)
                    .map_err(|e| SynthError::InternalConsistency(e.to_string()))?;
                strategy.push_segment(RoundSegment {
                    length: SegmentLength::Finite(1),
                    strategy: sigma,
                });
            }
        }
    }
}
