//! Level-based almost-sure solver. Every state starts at level `n` and
//! levels only decrease; per-state caches (allowed actions, per-action
//! spoiling witness counts, good actions) are recomputed in full only when
//! some level hits zero, and patched incrementally otherwise. The states
//! with positive final level form the almost-sure winning set, and the
//! descending level values encode the witness chain.

use crate::game::{ActionId, GameStructure, Player, StateId, StateSet};
use crate::solver::report::{Algorithm, Objective, SolveCounters, SolveReport};

/// Mutable solver state: current levels plus the per-state caches and the
/// instrumentation counters.
pub struct LevelState<'g> {
    game: &'g GameStructure,
    level: Vec<usize>,
    /// `allow1[s][a]`: no successor of `(s, a, ·)` sits at level zero.
    allow1: Vec<Vec<bool>>,
    /// `num[s][b]`: number of pairs `(a, t)` with `a` allowed at `s` and
    /// `t` a successor of `(s, a, b)` strictly above `s`'s level. The
    /// action `b` is spoiling exactly while this count is positive.
    num: Vec<Vec<usize>>,
    /// `good1[s][a]`: `a` is allowed and, against every non-spoiling `b`,
    /// earns the maximal reward with no successor below `s`'s level.
    good1: Vec<Vec<bool>>,
    good1_count: Vec<usize>,
    /// Successor entries per state (all action pairs), for work accounting.
    entries_by_state: Vec<u64>,
    /// Successor entries per (state, player-2 action).
    entries_by_state_b: Vec<Vec<u64>>,
    process_calls: Vec<u64>,
    remove_calls: Vec<Vec<u64>>,
    work_units: u64,
}

impl<'g> LevelState<'g> {
    /// Sets every level to the number of states and computes all caches.
    pub fn init(game: &'g GameStructure) -> Self {
        let n = game.n();
        let mut entries_by_state = vec![0u64; n];
        let mut entries_by_state_b = Vec::with_capacity(n);
        let mut allow1 = Vec::with_capacity(n);
        let mut num = Vec::with_capacity(n);
        let mut good1 = Vec::with_capacity(n);
        let mut remove_calls = Vec::with_capacity(n);
        for s in game.state_ids() {
            let a_count = game.action_count(Player::One, s);
            let b_count = game.action_count(Player::Two, s);
            let mut per_b = vec![0u64; b_count];
            for a in 0..a_count {
                for b in 0..b_count {
                    let e = game.delta(s, a, b).support().count() as u64;
                    entries_by_state[s] += e;
                    per_b[b] += e;
                }
            }
            entries_by_state_b.push(per_b);
            allow1.push(vec![false; a_count]);
            num.push(vec![0; b_count]);
            good1.push(vec![false; a_count]);
            remove_calls.push(vec![0; b_count]);
        }
        let mut state = LevelState {
            game,
            level: vec![n; n],
            allow1,
            num,
            good1,
            good1_count: vec![0; n],
            entries_by_state,
            entries_by_state_b,
            process_calls: vec![0; n],
            remove_calls,
            work_units: 0,
        };
        for s in game.state_ids() {
            state.process(s);
        }
        state
    }

    /// Recomputes all caches of `s` from the current levels.
    pub fn process(&mut self, s: StateId) {
        self.process_calls[s] += 1;
        self.work_units += self.entries_by_state[s];
        let game = self.game;
        let a_count = game.action_count(Player::One, s);
        let b_count = game.action_count(Player::Two, s);
        let ls = self.level[s];
        for a in 0..a_count {
            self.allow1[s][a] = (0..b_count).all(|b| {
                game.delta(s, a, b).support().all(|t| self.level[t] > 0)
            });
        }
        for b in 0..b_count {
            let mut witnesses = 0;
            for a in 0..a_count {
                if !self.allow1[s][a] {
                    continue;
                }
                witnesses += game
                    .delta(s, a, b)
                    .support()
                    .filter(|&t| self.level[t] > ls)
                    .count();
            }
            self.num[s][b] = witnesses;
        }
        let mut count = 0;
        for a in 0..a_count {
            let good = self.allow1[s][a]
                && (0..b_count).filter(|&b| self.num[s][b] == 0).all(|b| {
                    game.reward_is_max(s, a, b)
                        && game.delta(s, a, b).support().all(|t| self.level[t] >= ls)
                });
            self.good1[s][a] = good;
            if good {
                count += 1;
            }
        }
        self.good1_count[s] = count;
    }

    /// Reacts to the witness count of `(s, b)` reaching zero: `b` stops
    /// spoiling, so every cached good action must additionally earn the
    /// maximal reward against `b` and keep all `b`-successors at or above
    /// `s`'s level.
    pub fn remove(&mut self, s: StateId, b: ActionId) {
        assert_eq!(self.num[s][b], 0, "remove requires an exhausted witness count");
        self.remove_calls[s][b] += 1;
        self.work_units += self.entries_by_state_b[s][b];
        let game = self.game;
        let ls = self.level[s];
        for a in 0..game.action_count(Player::One, s) {
            if !self.good1[s][a] {
                continue;
            }
            let still_good = game.reward_is_max(s, a, b)
                && game.delta(s, a, b).support().all(|t| self.level[t] >= ls);
            if !still_good {
                self.good1[s][a] = false;
                self.good1_count[s] -= 1;
            }
        }
    }

    /// Runs the decrement loop to the fixpoint, sweeping states in the
    /// given order. Returns the number of sweeps (including the final one
    /// that finds nothing to decrement).
    pub fn run(&mut self, order: &[StateId]) -> u64 {
        let preds = self.game.pred_triples();
        let n = self.game.n();
        let mut in_dropped = vec![false; n];
        let mut passes = 0;
        loop {
            passes += 1;
            let dropped: Vec<StateId> = order
                .iter()
                .copied()
                .filter(|&s| self.level[s] > 0 && self.good1_count[s] == 0)
                .collect();
            if dropped.is_empty() {
                return passes;
            }
            let mut reached_zero = false;
            for &s in &dropped {
                self.level[s] -= 1;
                if self.level[s] == 0 {
                    reached_zero = true;
                }
            }
            if reached_zero {
                for &s in order {
                    self.process(s);
                }
                continue;
            }
            for &s in &dropped {
                in_dropped[s] = true;
            }
            for &s in &dropped {
                self.process(s);
                let ls = self.level[s];
                for &(t, a, b) in &preds[s] {
                    self.work_units += 1;
                    if in_dropped[t] || !self.allow1[t][a] {
                        continue;
                    }
                    if self.level[t] == ls {
                        // `s` was a strictly-above witness for `(t, b)` and
                        // has just dropped to `t`'s level.
                        assert!(self.num[t][b] > 0, "witness count underflow");
                        self.num[t][b] -= 1;
                        if self.num[t][b] == 0 {
                            self.remove(t, b);
                        }
                    } else if self.level[t] == ls + 1
                        && self.num[t][b] == 0
                        && self.good1[t][a]
                    {
                        // `s` sat at `t`'s level under a non-spoiling `b`
                        // and has just dropped below it, so `a` loses its
                        // good status at `t`.
                        self.good1[t][a] = false;
                        self.good1_count[t] -= 1;
                    }
                }
            }
            for &s in &dropped {
                in_dropped[s] = false;
            }
        }
    }

    /// Current level of `s`.
    pub fn level(&self, s: StateId) -> usize {
        self.level[s]
    }

    /// Cached allowed actions of `s`, ascending.
    pub fn allowed_actions(&self, s: StateId) -> Vec<ActionId> {
        (0..self.allow1[s].len()).filter(|&a| self.allow1[s][a]).collect()
    }

    /// Cached spoiling actions of `s` (positive witness count), ascending.
    pub fn spoiling_actions(&self, s: StateId) -> Vec<ActionId> {
        (0..self.num[s].len()).filter(|&b| self.num[s][b] > 0).collect()
    }

    /// Cached good actions of `s`, ascending.
    pub fn good_actions(&self, s: StateId) -> Vec<ActionId> {
        (0..self.good1[s].len()).filter(|&a| self.good1[s][a]).collect()
    }

    /// Current witness count of `(s, b)`.
    pub fn witness_count(&self, s: StateId, b: ActionId) -> usize {
        self.num[s][b]
    }
}

/// Almost-sure winning set via the level-based solver, sweeping states in
/// ascending id order.
pub fn almost_set_improved(game: &GameStructure) -> SolveReport {
    let order: Vec<StateId> = game.state_ids().collect();
    almost_set_improved_with_order(game, &order)
}

/// Almost-sure winning set via the level-based solver, sweeping states in
/// the given order. The final result does not depend on the order; exposing
/// it lets tests check exactly that.
pub fn almost_set_improved_with_order(game: &GameStructure, order: &[StateId]) -> SolveReport {
    let n = game.n();
    let mut seen = vec![false; n];
    assert_eq!(order.len(), n, "sweep order must list every state once");
    for &s in order {
        assert!(s < n && !seen[s], "sweep order must be a permutation");
        seen[s] = true;
    }

    let mut state = LevelState::init(game);
    let passes = state.run(order);

    let winning: StateSet = game.state_ids().filter(|&s| state.level[s] > 0).collect();
    let mut distinct: Vec<usize> = winning.iter().map(|&s| state.level[s]).collect();
    distinct.sort_unstable_by(|a, b| b.cmp(a));
    distinct.dedup();
    for (i, &lv) in distinct.iter().enumerate() {
        assert_eq!(lv, n - i, "positive final levels are contiguous from n");
    }
    let y_chain: Vec<StateSet> = distinct
        .iter()
        .map(|&lv| game.state_ids().filter(|&s| state.level[s] >= lv).collect())
        .collect();

    SolveReport {
        objective: Objective::AlmostSure,
        algorithm: Algorithm::Improved,
        winning,
        levels: state.level.clone(),
        y_chain,
        x_chain: None,
        counters: SolveCounters {
            outer_steps: 0,
            inner_steps: 0,
            passes,
            process_calls: state.process_calls.clone(),
            remove_calls: state.remove_calls.clone(),
            work_units: state.work_units,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::GameBuilder;
    use crate::generators::{
        gen_gbar, gen_gm, gen_gn, gen_pennies, gen_random, RandomGameParams,
    };
    use crate::rational::{rat, rat_int};
    use crate::solver::naive::almost_set_naive;
    use crate::solver::ops;
    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn initial_caches_match_set_operators_at_full_sets() {
        // With all levels equal and positive, the cached sets coincide with
        // the set operators evaluated at (full, empty, full).
        let games = [gen_gn(1), gen_gn(3), gen_gbar(), gen_gm(3), gen_pennies(false)];
        for g in &games {
            let st = LevelState::init(g);
            let all = g.all_states();
            let empty = StateSet::new();
            for s in g.state_ids() {
                assert_eq!(st.allowed_actions(s), ops::allow1(g, s, &all));
                assert_eq!(
                    st.spoiling_actions(s),
                    ops::bad2(g, s, &all, &empty).unwrap()
                );
                assert_eq!(
                    st.good_actions(s),
                    ops::good1(g, s, &all, &empty, &all).unwrap()
                );
            }
        }
    }

    #[test]
    fn ladder_levels_descend_one_per_rung() {
        let g = gen_gn(3);
        let report = almost_set_improved(&g);
        assert_eq!(report.winning, g.all_states());
        let level_of = |name: &str| report.levels[g.state_id(name).unwrap()];
        assert_eq!(
            [level_of("v0"), level_of("v1"), level_of("v2"), level_of("v3")],
            [4, 3, 2, 1]
        );
        let naive = almost_set_naive(&g);
        assert_eq!(report.y_chain, naive.y_chain);
        for s in g.state_ids() {
            assert_eq!(report.y_index(&g, s), naive.y_index(&g, s));
        }
    }

    #[test]
    fn mismatch_game_empties_and_coin_game_keeps_only_sink() {
        let gm = gen_gm(2);
        let report = almost_set_improved(&gm);
        assert!(report.winning.is_empty());
        assert!(report.y_chain.is_empty());

        let gbar = gen_gbar();
        let report = almost_set_improved(&gbar);
        let v1 = gbar.state_id("v1").unwrap();
        assert_eq!(report.winning, [v1].into_iter().collect::<StateSet>());
        assert_eq!(report.levels[v1], 3);
        assert_eq!(report.y_chain, vec![[v1].into_iter().collect::<StateSet>()]);
    }

    #[test]
    fn non_boolean_rewards_use_the_maximal_reward_as_target() {
        // A two-state ladder whose rewards live in {0, 1/2}: the maximal
        // reward plays the role the unit reward plays in boolean games.
        let mut b = GameBuilder::new("halfladder");
        b.state("base").unwrap();
        b.state("top").unwrap();
        for s in ["base", "top"] {
            b.actions(crate::game::Player::One, s, &["a1", "a2"]).unwrap();
            b.actions(crate::game::Player::Two, s, &["b1", "b2"]).unwrap();
        }
        for (a, bb) in [("a1", "b1"), ("a1", "b2"), ("a2", "b1"), ("a2", "b2")] {
            b.trans("base", a, bb, rat(1, 2), &[("base", rat_int(1))]).unwrap();
        }
        b.trans("top", "a1", "b1", rat_int(0), &[("base", rat_int(1))]).unwrap();
        b.trans("top", "a1", "b2", rat_int(0), &[("top", rat_int(1))]).unwrap();
        b.trans("top", "a2", "b1", rat_int(0), &[("top", rat_int(1))]).unwrap();
        b.trans("top", "a2", "b2", rat(1, 2), &[("top", rat_int(1))]).unwrap();
        let g = b.build().unwrap();
        assert!(!g.is_boolean());

        let improved = almost_set_improved(&g);
        let naive = almost_set_naive(&g);
        assert_eq!(improved.winning, g.all_states());
        assert_eq!(improved.winning, naive.winning);
        assert_eq!(improved.y_chain, naive.y_chain);
    }

    #[test]
    fn agrees_with_fixpoint_solver_on_random_games() {
        for seed in 0..60 {
            let params = RandomGameParams {
                n: 2 + (seed as usize % 6),
                m_max: 2 + (seed as usize % 2),
                branching: 3,
                reward_density: rat(1, 2),
                seed,
            };
            let g = gen_random(&params);
            let improved = almost_set_improved(&g);
            let naive = almost_set_naive(&g);
            assert_eq!(
                improved.winning,
                naive.winning,
                "winning sets diverge on seed {seed}\n{}",
                g.to_cmpg_text()
            );
            assert_eq!(
                improved.y_chain,
                naive.y_chain,
                "witness chains diverge on seed {seed}\n{}",
                g.to_cmpg_text()
            );
        }
    }

    #[test]
    fn sweep_order_does_not_change_the_outcome() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for seed in 0..20 {
            let params = RandomGameParams {
                n: 5,
                m_max: 2,
                branching: 2,
                reward_density: rat(1, 2),
                seed: 100 + seed,
            };
            let g = gen_random(&params);
            let base = almost_set_improved(&g);
            let mut order: Vec<StateId> = g.state_ids().collect();
            for _ in 0..4 {
                order.shuffle(&mut rng);
                let shuffled = almost_set_improved_with_order(&g, &order);
                assert_eq!(shuffled.levels, base.levels, "seed {seed}");
            }
            order.reverse();
            let reversed = almost_set_improved_with_order(&g, &order);
            assert_eq!(reversed.levels, base.levels);
        }
    }

    #[test]
    fn counters_respect_the_stated_bounds() {
        let games = [gen_gn(6), gen_gbar(), gen_pennies(true), gen_gm(4)];
        for g in &games {
            let n = g.n() as u64;
            let report = almost_set_improved(g);
            for s in g.state_ids() {
                assert!(
                    report.counters.process_calls[s] <= 2 * n + 1,
                    "state {s} processed {} times in {}",
                    report.counters.process_calls[s],
                    g.name()
                );
                for row in &report.counters.remove_calls {
                    for &r in row {
                        assert!(r <= n, "remove count {r} exceeds state count in {}", g.name());
                    }
                }
            }
            assert!(report.counters.work_units > 0);
            assert!(report.counters.passes >= 1);
        }
    }

    #[test]
    fn incremental_caches_match_full_recomputation_after_run() {
        // After the run reaches its fixpoint, re-deriving every cache from
        // the final levels must reproduce the incrementally maintained ones.
        for seed in 0..30 {
            let params = RandomGameParams {
                n: 4 + (seed as usize % 4),
                m_max: 2,
                branching: 2,
                reward_density: rat(2, 3),
                seed: 500 + seed,
            };
            let g = gen_random(&params);
            let mut st = LevelState::init(&g);
            st.run(&g.state_ids().collect::<Vec<_>>());
            let levels: Vec<usize> = g.state_ids().map(|s| st.level(s)).collect();
            let allowed: Vec<_> = g.state_ids().map(|s| st.allowed_actions(s)).collect();
            let spoiling: Vec<_> = g.state_ids().map(|s| st.spoiling_actions(s)).collect();
            let good: Vec<_> = g.state_ids().map(|s| st.good_actions(s)).collect();
            for s in g.state_ids() {
                st.process(s);
            }
            for s in g.state_ids() {
                assert_eq!(st.level(s), levels[s], "levels untouched by process");
                assert_eq!(st.allowed_actions(s), allowed[s], "seed {seed} state {s}");
                assert_eq!(st.spoiling_actions(s), spoiling[s], "seed {seed} state {s}");
                assert_eq!(st.good_actions(s), good[s], "seed {seed} state {s}");
            }
        }
    }
}
