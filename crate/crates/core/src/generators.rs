//! Generators for the standard hard-instance families and for
//! seed-deterministic random games.
//!
//! The named families are the ones the qualitative theory is calibrated
//! against: the ladder family `G^n` (almost-sure winning everywhere, but
//! patience and memory requirements explode with `n`), the three-state
//! absorbing game `Gbar` (positive winning without any finite-memory
//! witness), the one-state family `Gm` (spoiler patience exactly `m`), and
//! the two matching-pennies games. Every generator produces a validated
//! [`GameStructure`]; all constructions are deterministic, and the random
//! generator is a pure function of its parameters including the seed.

use crate::game::{GameBuilder, GameStructure, Player};
use crate::rational::{is_unit_interval, rat_int, Rational};
use num::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// The ladder family: states `v0..vn`, `v0` absorbing with reward 1. At
/// `v{l}` for `l >= 1`, matching plays move down (`a1,b1` to `v{l-1}`) or
/// stay with reward 1 (`a2,b2`), while mismatched plays reset to `vn`.
pub fn gen_gn(n: usize) -> GameStructure {
    assert!(n >= 1, "gen_gn requires n >= 1");
    let mut b = GameBuilder::new(&format!("gn{n}"));
    let names: Vec<String> = (0..=n).map(|i| format!("v{i}")).collect();
    for name in &names {
        b.state(name).expect("fresh state");
    }
    b.actions(Player::One, &names[0], &["a"]).expect("actions");
    b.actions(Player::Two, &names[0], &["b"]).expect("actions");
    b.trans(&names[0], "a", "b", rat_int(1), &[(&names[0], rat_int(1))]).expect("trans");
    for l in 1..=n {
        let v = &names[l];
        b.actions(Player::One, v, &["a1", "a2"]).expect("actions");
        b.actions(Player::Two, v, &["b1", "b2"]).expect("actions");
        b.trans(v, "a1", "b1", rat_int(0), &[(&names[l - 1], rat_int(1))]).expect("trans");
        b.trans(v, "a2", "b2", rat_int(1), &[(v, rat_int(1))]).expect("trans");
        b.trans(v, "a1", "b2", rat_int(0), &[(&names[n], rat_int(1))]).expect("trans");
        b.trans(v, "a2", "b1", rat_int(0), &[(&names[n], rat_int(1))]).expect("trans");
    }
    b.build().expect("gen_gn produces a valid game")
}

/// The three-state absorbing game: `v0` absorbing with reward 0, `v1`
/// absorbing with reward 1, and `v` where matching `a1,b1` reaches `v1`,
/// matching `a2,b2` stays with reward 1, and mismatches fall into `v0`.
pub fn gen_gbar() -> GameStructure {
    let mut b = GameBuilder::new("gbar");
    for name in ["v0", "v1", "v"] {
        b.state(name).expect("fresh state");
    }
    b.actions(Player::One, "v0", &["a"]).expect("actions");
    b.actions(Player::Two, "v0", &["b"]).expect("actions");
    b.trans("v0", "a", "b", rat_int(0), &[("v0", rat_int(1))]).expect("trans");
    b.actions(Player::One, "v1", &["a"]).expect("actions");
    b.actions(Player::Two, "v1", &["b"]).expect("actions");
    b.trans("v1", "a", "b", rat_int(1), &[("v1", rat_int(1))]).expect("trans");
    b.actions(Player::One, "v", &["a1", "a2"]).expect("actions");
    b.actions(Player::Two, "v", &["b1", "b2"]).expect("actions");
    b.trans("v", "a1", "b1", rat_int(0), &[("v1", rat_int(1))]).expect("trans");
    b.trans("v", "a2", "b2", rat_int(1), &[("v", rat_int(1))]).expect("trans");
    b.trans("v", "a1", "b2", rat_int(0), &[("v0", rat_int(1))]).expect("trans");
    b.trans("v", "a2", "b1", rat_int(0), &[("v0", rat_int(1))]).expect("trans");
    b.build().expect("gen_gbar produces a valid game")
}

/// The one-state family: a single state `v` with `m` actions per player,
/// every transition a self-loop, reward 1 exactly on mismatched actions.
pub fn gen_gm(m: usize) -> GameStructure {
    assert!(m >= 2, "gen_gm requires m >= 2");
    let mut b = GameBuilder::new(&format!("gm{m}"));
    b.state("v").expect("fresh state");
    let a_names: Vec<String> = (1..=m).map(|i| format!("a{i}")).collect();
    let b_names: Vec<String> = (1..=m).map(|i| format!("b{i}")).collect();
    let a_refs: Vec<&str> = a_names.iter().map(String::as_str).collect();
    let b_refs: Vec<&str> = b_names.iter().map(String::as_str).collect();
    b.actions(Player::One, "v", &a_refs).expect("actions");
    b.actions(Player::Two, "v", &b_refs).expect("actions");
    for i in 0..m {
        for j in 0..m {
            let r = if i == j { rat_int(0) } else { rat_int(1) };
            b.trans("v", &a_names[i], &b_names[j], r, &[("v", rat_int(1))]).expect("trans");
        }
    }
    b.build().expect("gen_gm produces a valid game")
}

/// The matching-pennies games on states `s0` (play) and `s1` (absorbing sink
/// with reward 1). In the classical game any match moves to the sink with
/// transition reward 0 and mismatches stay put. In the variant, matching
/// tails wins immediately (reward 1 into the sink) while matching heads pays
/// reward 1 but stays in `s0`.
pub fn gen_pennies(variant: bool) -> GameStructure {
    let name = if variant { "pennies-variant" } else { "pennies" };
    let mut b = GameBuilder::new(name);
    b.state("s0").expect("fresh state");
    b.state("s1").expect("fresh state");
    b.actions(Player::One, "s0", &["t", "h"]).expect("actions");
    b.actions(Player::Two, "s0", &["t", "h"]).expect("actions");
    b.actions(Player::One, "s1", &["a"]).expect("actions");
    b.actions(Player::Two, "s1", &["b"]).expect("actions");
    if variant {
        b.trans("s0", "t", "t", rat_int(1), &[("s1", rat_int(1))]).expect("trans");
        b.trans("s0", "h", "h", rat_int(1), &[("s0", rat_int(1))]).expect("trans");
    } else {
        b.trans("s0", "t", "t", rat_int(0), &[("s1", rat_int(1))]).expect("trans");
        b.trans("s0", "h", "h", rat_int(0), &[("s1", rat_int(1))]).expect("trans");
    }
    b.trans("s0", "t", "h", rat_int(0), &[("s0", rat_int(1))]).expect("trans");
    b.trans("s0", "h", "t", rat_int(0), &[("s0", rat_int(1))]).expect("trans");
    b.trans("s1", "a", "b", rat_int(1), &[("s1", rat_int(1))]).expect("trans");
    b.build().expect("gen_pennies produces a valid game")
}

/// A two-rung ladder (`v0` absorbing with reward 1, `v1` above it) with a
/// detour state `u` and a dead sink `t`. From `u`, entering the ladder or
/// earning the reward both risk falling into the sink, while one action
/// loops safely at reward 0 and another moves toward the ladder without
/// leaving `{v0, v1, u}`. The almost-sure refinement therefore takes two
/// strict steps (`u` survives the first and falls in the second), and at
/// `u` exactly one player-2 action avoids helping player 1 into the final
/// winning set — the configuration that forces the complement spoiler to
/// use its round-dependent mixture.
pub fn gen_coin_over_ladder() -> GameStructure {
    let mut b = GameBuilder::new("coinladder");
    for s in ["v0", "v1", "u", "t"] {
        b.state(s).expect("fresh state");
    }
    b.actions(Player::One, "v0", &["a"]).expect("actions");
    b.actions(Player::Two, "v0", &["b"]).expect("actions");
    b.actions(Player::One, "v1", &["a1", "a2"]).expect("actions");
    b.actions(Player::Two, "v1", &["b1", "b2"]).expect("actions");
    b.actions(Player::One, "u", &["a1", "a2", "a3", "a4"]).expect("actions");
    b.actions(Player::Two, "u", &["b1", "b2"]).expect("actions");
    b.actions(Player::One, "t", &["a"]).expect("actions");
    b.actions(Player::Two, "t", &["b"]).expect("actions");
    let one = rat_int(1);
    let zero = rat_int(0);
    b.trans("v0", "a", "b", one.clone(), &[("v0", one.clone())]).expect("trans");
    b.trans("v1", "a1", "b1", zero.clone(), &[("v0", one.clone())]).expect("trans");
    b.trans("v1", "a1", "b2", zero.clone(), &[("v1", one.clone())]).expect("trans");
    b.trans("v1", "a2", "b1", zero.clone(), &[("v1", one.clone())]).expect("trans");
    b.trans("v1", "a2", "b2", one.clone(), &[("v1", one.clone())]).expect("trans");
    b.trans("u", "a1", "b1", zero.clone(), &[("v1", one.clone())]).expect("trans");
    b.trans("u", "a1", "b2", zero.clone(), &[("t", one.clone())]).expect("trans");
    b.trans("u", "a2", "b1", zero.clone(), &[("t", one.clone())]).expect("trans");
    b.trans("u", "a2", "b2", one.clone(), &[("u", one.clone())]).expect("trans");
    b.trans("u", "a3", "b1", zero.clone(), &[("u", one.clone())]).expect("trans");
    b.trans("u", "a3", "b2", zero.clone(), &[("u", one.clone())]).expect("trans");
    b.trans("u", "a4", "b1", zero.clone(), &[("v1", one.clone())]).expect("trans");
    b.trans("u", "a4", "b2", zero.clone(), &[("u", one.clone())]).expect("trans");
    b.trans("t", "a", "b", zero, &[("t", one)]).expect("trans");
    b.build().expect("gen_coin_over_ladder produces a valid game")
}

/// Parameters for the random game generator.
#[derive(Debug, Clone)]
pub struct RandomGameParams {
    /// Number of states, at least 1.
    pub n: usize,
    /// Maximal action-set size per state and player, at least 1.
    pub m_max: usize,
    /// Maximal support size of a non-Dirac distribution, at least 1.
    pub branching: usize,
    /// Probability that a transition carries reward 1 (rewards are boolean).
    pub reward_density: Rational,
    pub seed: u64,
}

impl Default for RandomGameParams {
    fn default() -> Self {
        RandomGameParams {
            n: 4,
            m_max: 2,
            branching: 2,
            reward_density: Rational::new(1.into(), 2.into()),
            seed: 0,
        }
    }
}

/// Seed-deterministic random game: action counts are uniform in
/// `1..=m_max`, each transition is Dirac with probability 1/2 and otherwise
/// spreads over up to `branching` distinct targets with small integer
/// weights, and each reward is 1 with probability `reward_density`.
///
/// Identical parameters (seed included) yield the identical game.
pub fn gen_random(params: &RandomGameParams) -> GameStructure {
    assert!(params.n >= 1, "gen_random requires n >= 1");
    assert!(params.m_max >= 1, "gen_random requires m_max >= 1");
    assert!(params.branching >= 1, "gen_random requires branching >= 1");
    assert!(is_unit_interval(&params.reward_density), "reward_density must lie in [0, 1]");
    let density_num =
        params.reward_density.numer().to_u64().expect("reward_density numerator fits u64");
    let density_den =
        params.reward_density.denom().to_u64().expect("reward_density denominator fits u64");

    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let n = params.n;
    let mut b = GameBuilder::new(&format!("rand{n}s{}", params.seed));
    let state_names: Vec<String> = (0..n).map(|i| format!("s{i}")).collect();
    for name in &state_names {
        b.state(name).expect("fresh state");
    }
    let mut counts1 = Vec::with_capacity(n);
    let mut counts2 = Vec::with_capacity(n);
    for name in &state_names {
        let k1 = rng.gen_range(1..=params.m_max);
        let k2 = rng.gen_range(1..=params.m_max);
        let a_names: Vec<String> = (1..=k1).map(|i| format!("a{i}")).collect();
        let b_names: Vec<String> = (1..=k2).map(|i| format!("b{i}")).collect();
        let a_refs: Vec<&str> = a_names.iter().map(String::as_str).collect();
        let b_refs: Vec<&str> = b_names.iter().map(String::as_str).collect();
        b.actions(Player::One, name, &a_refs).expect("actions");
        b.actions(Player::Two, name, &b_refs).expect("actions");
        counts1.push(k1);
        counts2.push(k2);
    }
    let max_support = params.branching.min(n);
    for (s, name) in state_names.iter().enumerate() {
        for a in 1..=counts1[s] {
            for bb in 1..=counts2[s] {
                let reward = if density_num == 0 {
                    rat_int(0)
                } else if rng.gen_range(0..density_den) < density_num {
                    rat_int(1)
                } else {
                    rat_int(0)
                };
                let dirac = max_support < 2 || rng.gen_range(0u32..2) == 0;
                let targets: Vec<(usize, u64)> = if dirac {
                    vec![(rng.gen_range(0..n), 1)]
                } else {
                    let width = rng.gen_range(2..=max_support);
                    let mut pool: Vec<usize> = (0..n).collect();
                    for i in 0..width {
                        let j = rng.gen_range(i..n);
                        pool.swap(i, j);
                    }
                    let mut chosen: Vec<(usize, u64)> =
                        pool[..width].iter().map(|&t| (t, rng.gen_range(1u64..=8))).collect();
                    chosen.sort_unstable_by_key(|(t, _)| *t);
                    chosen
                };
                let total: u64 = targets.iter().map(|(_, w)| w).sum();
                let dist: Vec<(&str, Rational)> = targets
                    .iter()
                    .map(|&(t, w)| {
                        (state_names[t].as_str(), Rational::new(w.into(), total.into()))
                    })
                    .collect();
                b.trans(name, &format!("a{a}"), &format!("b{bb}"), reward, &dist)
                    .expect("trans");
            }
        }
    }
    b.build().expect("gen_random produces a valid game")
}

/// Seed-deterministic random turn-based deterministic game: each state is
/// owned by one player chosen by coin flip, the owner's action count is
/// uniform in `1..=m_max` while the other player has a single action,
/// every transition is Dirac, and each reward is 1 with probability
/// `reward_density` (rewards are boolean). `branching` is ignored.
///
/// Identical parameters (seed included) yield the identical game.
pub fn gen_random_turn_based(params: &RandomGameParams) -> GameStructure {
    assert!(params.n >= 1, "gen_random_turn_based requires n >= 1");
    assert!(params.m_max >= 1, "gen_random_turn_based requires m_max >= 1");
    assert!(is_unit_interval(&params.reward_density), "reward_density must lie in [0, 1]");
    let density_num =
        params.reward_density.numer().to_u64().expect("reward_density numerator fits u64");
    let density_den =
        params.reward_density.denom().to_u64().expect("reward_density denominator fits u64");

    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let n = params.n;
    let mut b = GameBuilder::new(&format!("randtb{n}s{}", params.seed));
    let state_names: Vec<String> = (0..n).map(|i| format!("s{i}")).collect();
    for name in &state_names {
        b.state(name).expect("fresh state");
    }
    let mut counts = Vec::with_capacity(n);
    for name in &state_names {
        let owner = if rng.gen_range(0u32..2) == 0 { Player::One } else { Player::Two };
        let k = rng.gen_range(1..=params.m_max);
        let (k1, k2) = match owner {
            Player::One => (k, 1),
            Player::Two => (1, k),
        };
        let a_names: Vec<String> = (1..=k1).map(|i| format!("a{i}")).collect();
        let b_names: Vec<String> = (1..=k2).map(|i| format!("b{i}")).collect();
        let a_refs: Vec<&str> = a_names.iter().map(String::as_str).collect();
        let b_refs: Vec<&str> = b_names.iter().map(String::as_str).collect();
        b.actions(Player::One, name, &a_refs).expect("actions");
        b.actions(Player::Two, name, &b_refs).expect("actions");
        counts.push((k1, k2));
    }
    for (s, name) in state_names.iter().enumerate() {
        for a in 1..=counts[s].0 {
            for bb in 1..=counts[s].1 {
                let reward = if density_num == 0 {
                    rat_int(0)
                } else if rng.gen_range(0..density_den) < density_num {
                    rat_int(1)
                } else {
                    rat_int(0)
                };
                let target = state_names[rng.gen_range(0..n)].as_str();
                b.trans(name, &format!("a{a}"), &format!("b{bb}"), reward, &[(target, rat_int(1))])
                    .expect("trans");
            }
        }
    }
    b.build().expect("gen_random_turn_based produces a valid game")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::parse_game;
    use crate::rational::rat;

    #[test]
    fn gn_matches_formula() {
        for n in 1..=5 {
            let g = gen_gn(n);
            assert_eq!(g.n(), n + 1);
            assert_eq!(g.m(), 2);
            assert_eq!(*g.delta_min(), rat_int(1));
            assert!(g.is_boolean());
            let id = |k: usize| g.state_id(&format!("v{k}")).unwrap();
            // Absorbing bottom with reward 1.
            assert_eq!(g.delta(id(0), 0, 0), &crate::game::Distribution::dirac(id(0)));
            assert_eq!(*g.reward(id(0), 0, 0), rat_int(1));
            for l in 1..=n {
                let v = id(l);
                let a1 = g.action_id(Player::One, v, "a1").unwrap();
                let a2 = g.action_id(Player::One, v, "a2").unwrap();
                let b1 = g.action_id(Player::Two, v, "b1").unwrap();
                let b2 = g.action_id(Player::Two, v, "b2").unwrap();
                assert_eq!(g.delta(v, a1, b1).entries(), &[(id(l - 1), rat_int(1))]);
                assert_eq!(g.delta(v, a2, b2).entries(), &[(v, rat_int(1))]);
                assert_eq!(g.delta(v, a1, b2).entries(), &[(id(n), rat_int(1))]);
                assert_eq!(g.delta(v, a2, b1).entries(), &[(id(n), rat_int(1))]);
                assert_eq!(*g.reward(v, a2, b2), rat_int(1));
                assert_eq!(*g.reward(v, a1, b1), rat_int(0));
                assert_eq!(*g.reward(v, a1, b2), rat_int(0));
                assert_eq!(*g.reward(v, a2, b1), rat_int(0));
            }
        }
    }

    #[test]
    fn gn1_mismatch_resets_to_top() {
        // With n = 1 the reset target coincides with the state itself.
        let g = gen_gn(1);
        let v1 = g.state_id("v1").unwrap();
        let a1 = g.action_id(Player::One, v1, "a1").unwrap();
        let b2 = g.action_id(Player::Two, v1, "b2").unwrap();
        assert_eq!(g.delta(v1, a1, b2).entries(), &[(v1, rat_int(1))]);
    }

    #[test]
    fn gbar_structure() {
        let g = gen_gbar();
        assert_eq!(g.n(), 3);
        let v0 = g.state_id("v0").unwrap();
        let v1 = g.state_id("v1").unwrap();
        let v = g.state_id("v").unwrap();
        assert_eq!(*g.reward(v0, 0, 0), rat_int(0));
        assert_eq!(*g.reward(v1, 0, 0), rat_int(1));
        let a1 = g.action_id(Player::One, v, "a1").unwrap();
        let a2 = g.action_id(Player::One, v, "a2").unwrap();
        let b1 = g.action_id(Player::Two, v, "b1").unwrap();
        let b2 = g.action_id(Player::Two, v, "b2").unwrap();
        assert_eq!(g.delta(v, a1, b1).entries(), &[(v1, rat_int(1))]);
        assert_eq!(g.delta(v, a2, b2).entries(), &[(v, rat_int(1))]);
        assert_eq!(g.delta(v, a1, b2).entries(), &[(v0, rat_int(1))]);
        assert_eq!(g.delta(v, a2, b1).entries(), &[(v0, rat_int(1))]);
        assert_eq!(*g.reward(v, a2, b2), rat_int(1));
        assert_eq!(*g.reward(v, a1, b1), rat_int(0));
    }

    #[test]
    fn gm_has_reward_one_off_diagonal() {
        let g = gen_gm(2);
        assert_eq!(g.n(), 1);
        assert_eq!(g.m(), 2);
        for i in 0..2 {
            for j in 0..2 {
                let expected = if i == j { rat_int(0) } else { rat_int(1) };
                assert_eq!(*g.reward(0, i, j), expected);
                assert_eq!(g.delta(0, i, j).entries(), &[(0, rat_int(1))]);
            }
        }
        let g5 = gen_gm(5);
        assert_eq!(g5.m(), 5);
        assert_eq!(g5.delta_size(), 25);
    }

    #[test]
    fn pennies_classical_vs_variant() {
        let c = gen_pennies(false);
        let s0 = c.state_id("s0").unwrap();
        let s1 = c.state_id("s1").unwrap();
        let t = c.action_id(Player::One, s0, "t").unwrap();
        let h = c.action_id(Player::One, s0, "h").unwrap();
        // Classical: both matches move to the sink with transition reward 0.
        assert_eq!(c.delta(s0, t, t).entries(), &[(s1, rat_int(1))]);
        assert_eq!(c.delta(s0, h, h).entries(), &[(s1, rat_int(1))]);
        assert_eq!(*c.reward(s0, t, t), rat_int(0));
        assert_eq!(*c.reward(s0, h, h), rat_int(0));
        assert_eq!(c.delta(s0, t, h).entries(), &[(s0, rat_int(1))]);
        assert_eq!(*c.reward(s1, 0, 0), rat_int(1));

        let v = gen_pennies(true);
        let s0 = v.state_id("s0").unwrap();
        let s1 = v.state_id("s1").unwrap();
        // Variant: matching tails wins immediately, matching heads pays 1
        // and continues.
        assert_eq!(v.delta(s0, t, t).entries(), &[(s1, rat_int(1))]);
        assert_eq!(*v.reward(s0, t, t), rat_int(1));
        assert_eq!(v.delta(s0, h, h).entries(), &[(s0, rat_int(1))]);
        assert_eq!(*v.reward(s0, h, h), rat_int(1));
        assert_eq!(*v.reward(s0, t, h), rat_int(0));
        assert_eq!(*v.reward(s0, h, t), rat_int(0));
    }

    #[test]
    fn random_same_seed_identical() {
        let p = RandomGameParams { n: 6, m_max: 3, branching: 3, ..Default::default() };
        let g1 = gen_random(&p);
        let g2 = gen_random(&p);
        assert_eq!(g1, g2);
        let g3 = gen_random(&RandomGameParams { seed: 1, ..p.clone() });
        assert_ne!(g1, g3);
    }

    #[test]
    fn random_respects_bounds_over_seed_sweep() {
        for seed in 0..40 {
            let p = RandomGameParams {
                n: 5,
                m_max: 3,
                branching: 3,
                reward_density: rat(1, 3),
                seed,
            };
            let g = gen_random(&p);
            assert_eq!(g.n(), 5);
            assert!(g.m() <= 3);
            for s in g.state_ids() {
                for a in 0..g.action_count(Player::One, s) {
                    for b in 0..g.action_count(Player::Two, s) {
                        assert!(g.delta(s, a, b).entries().len() <= 3);
                        let r = g.reward(s, a, b);
                        assert!(*r == rat_int(0) || *r == rat_int(1));
                    }
                }
            }
        }
    }

    #[test]
    fn random_single_state_and_zero_density() {
        let p = RandomGameParams {
            n: 1,
            m_max: 2,
            branching: 4,
            reward_density: rat_int(0),
            seed: 7,
        };
        let g = gen_random(&p);
        assert_eq!(g.n(), 1);
        assert_eq!(*g.max_reward(), rat_int(0));
        let p1 = RandomGameParams { reward_density: rat_int(1), ..p };
        let g = gen_random(&p1);
        assert_eq!(*g.max_reward(), rat_int(1));
    }

    #[test]
    fn random_round_trips_through_text() {
        let p = RandomGameParams { n: 7, m_max: 3, branching: 4, seed: 13, ..Default::default() };
        let g = gen_random(&p);
        let g2 = parse_game(&g.to_cmpg_text()).unwrap();
        assert_eq!(g, g2);
    }

    #[test]
    fn random_turn_based_games_are_turn_based_deterministic_boolean() {
        for seed in 0..6 {
            let p = RandomGameParams {
                n: 5,
                m_max: 3,
                branching: 4,
                reward_density: rat(1, 3),
                seed,
            };
            let g = gen_random_turn_based(&p);
            assert_eq!(g.n(), 5);
            assert!(g.is_boolean());
            for s in g.state_ids() {
                let k1 = g.action_count(Player::One, s);
                let k2 = g.action_count(Player::Two, s);
                assert!(k1 == 1 || k2 == 1, "both players choose at state {s}");
                for a in 0..k1 {
                    for b in 0..k2 {
                        assert!(g.delta(s, a, b).is_dirac());
                    }
                }
            }
            assert_eq!(g, gen_random_turn_based(&p));
        }
    }

    #[test]
    fn coin_over_ladder_structure() {
        let g = gen_coin_over_ladder();
        assert_eq!(g.n(), 4);
        assert_eq!(g.m(), 4);
        assert!(g.is_boolean());
        assert_eq!(*g.delta_min(), rat_int(1));
        let u = g.state_id("u").unwrap();
        let v1 = g.state_id("v1").unwrap();
        let t = g.state_id("t").unwrap();
        // The detour's safe loop stays put and its probe reaches the ladder
        // only when player 2 cooperates.
        assert_eq!(g.delta(u, 2, 0).support().collect::<Vec<_>>(), vec![u]);
        assert_eq!(g.delta(u, 3, 0).support().collect::<Vec<_>>(), vec![v1]);
        assert_eq!(g.delta(u, 3, 1).support().collect::<Vec<_>>(), vec![u]);
        assert_eq!(g.delta(u, 1, 0).support().collect::<Vec<_>>(), vec![t]);
        assert_eq!(*g.reward(u, 1, 1), rat_int(1));
    }
}
