//! Nested-fixpoint solvers: the positive-winning set is a least fixpoint
//! over the one-step operator, and the almost-sure set wraps it in a
//! greatest-fixpoint refinement loop.

use crate::game::{GameStructure, StateSet};
use crate::solver::ops::asp;
use crate::solver::report::{Algorithm, Objective, SolveCounters, SolveReport};

/// Result of one least-fixpoint run: the strictly ascending witness chain
/// and the number of one-step evaluations spent.
struct MuRun {
    chain: Vec<StateSet>,
    fixpoint: StateSet,
    steps: u64,
}

/// Greatest fixpoint over `z` of the one-step operator at fixed `x`, `y`.
/// Seeds with `x` and intersects each step so the iterates stay a
/// descending chain inside `x` with `y` below them throughout.
fn nu_z(game: &GameStructure, x: &StateSet, y: &StateSet, steps: &mut u64) -> StateSet {
    let mut z = x.clone();
    loop {
        *steps += 1;
        let next: StateSet = asp(game, x, y, &z)
            .expect("fixpoint iterates stay nested")
            .intersection(x)
            .cloned()
            .collect();
        if next == z {
            return z;
        }
        z = next;
    }
}

/// Least fixpoint over `y` of the inner greatest fixpoint, at fixed `x`.
fn mu_y(game: &GameStructure, x: &StateSet) -> MuRun {
    let mut steps = 0;
    let mut chain = Vec::new();
    let mut y = StateSet::new();
    loop {
        let next = nu_z(game, x, &y, &mut steps);
        if next == y {
            return MuRun { chain, fixpoint: y, steps };
        }
        chain.push(next.clone());
        y = next;
    }
}

/// Per-state level: the 1-based index of the first chain element containing
/// the state, 0 for states outside the fixpoint.
fn chain_levels(game: &GameStructure, chain: &[StateSet]) -> Vec<usize> {
    let mut levels = vec![0; game.n()];
    for (i, layer) in chain.iter().enumerate() {
        for &s in layer {
            if levels[s] == 0 {
                levels[s] = i + 1;
            }
        }
    }
    levels
}

/// States from which player 1 wins almost-surely, via the nested fixpoint.
/// The report carries the outer refinement chain (strictly descending from
/// the full state set) and the witness chain of the final inner run.
pub fn almost_set_naive(game: &GameStructure) -> SolveReport {
    let mut outer_steps = 0;
    let mut inner_steps = 0;
    let mut x_chain = vec![game.all_states()];
    let mut x = game.all_states();
    let run = loop {
        outer_steps += 1;
        let run = mu_y(game, &x);
        inner_steps += run.steps;
        if run.fixpoint == x {
            break run;
        }
        x_chain.push(run.fixpoint.clone());
        x = run.fixpoint;
    };
    let levels = chain_levels(game, &run.chain);
    SolveReport {
        objective: Objective::AlmostSure,
        algorithm: Algorithm::Naive,
        winning: run.fixpoint,
        levels,
        y_chain: run.chain,
        x_chain: Some(x_chain),
        counters: SolveCounters {
            outer_steps,
            inner_steps,
            ..SolveCounters::default()
        },
    }
}

/// States from which player 1 wins with positive probability: the inner
/// least fixpoint evaluated over the full state set.
pub fn positive_set(game: &GameStructure) -> SolveReport {
    let all = game.all_states();
    let run = mu_y(game, &all);
    let levels = chain_levels(game, &run.chain);
    SolveReport {
        objective: Objective::Positive,
        algorithm: Algorithm::Naive,
        winning: run.fixpoint,
        levels,
        y_chain: run.chain,
        x_chain: None,
        counters: SolveCounters {
            outer_steps: 1,
            inner_steps: run.steps,
            ..SolveCounters::default()
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{gen_gbar, gen_gm, gen_gn, gen_pennies};

    fn ids(game: &GameStructure, names: &[&str]) -> StateSet {
        names.iter().map(|n| game.state_id(n).unwrap()).collect()
    }

    #[test]
    fn ladder_is_fully_almost_sure_with_layered_chain() {
        for n in 1..=5usize {
            let g = gen_gn(n);
            let report = almost_set_naive(&g);
            assert_eq!(report.winning, g.all_states(), "ladder size {n}");
            // The witness chain grows one rung at a time from the absorbing
            // state upwards.
            assert_eq!(report.y_chain.len(), n + 1);
            for (i, layer) in report.y_chain.iter().enumerate() {
                let expect: StateSet = (0..=i)
                    .map(|k| g.state_id(&format!("v{k}")).unwrap())
                    .collect();
                assert_eq!(*layer, expect, "layer {i} of ladder size {n}");
            }
            // Levels name the rung index, base first.
            for k in 0..=n {
                let s = g.state_id(&format!("v{k}")).unwrap();
                assert_eq!(report.levels[s], k + 1);
            }
            // The full set is already a fixpoint, so the outer chain is
            // the singleton full set.
            assert_eq!(report.x_chain, Some(vec![g.all_states()]));
        }
    }

    #[test]
    fn single_state_mismatch_game_loses_everywhere() {
        for m in 2..=4usize {
            let g = gen_gm(m);
            let almost = almost_set_naive(&g);
            assert!(almost.winning.is_empty());
            assert_eq!(
                almost.x_chain,
                Some(vec![g.all_states(), StateSet::new()]),
                "one refinement step empties the candidate set"
            );
            assert!(almost.y_chain.is_empty());
            let positive = positive_set(&g);
            assert!(positive.winning.is_empty());
            assert_eq!(positive.levels, vec![0]);
        }
    }

    #[test]
    fn coin_game_positive_but_not_almost_sure() {
        let g = gen_gbar();
        let almost = almost_set_naive(&g);
        assert_eq!(almost.winning, ids(&g, &["v1"]));
        let positive = positive_set(&g);
        assert_eq!(positive.winning, ids(&g, &["v1", "v"]));
        assert_eq!(positive.y_chain, vec![ids(&g, &["v1"]), ids(&g, &["v1", "v"])]);
        let v = g.state_id("v").unwrap();
        let v1 = g.state_id("v1").unwrap();
        let v0 = g.state_id("v0").unwrap();
        assert_eq!(positive.levels[v1], 1);
        assert_eq!(positive.levels[v], 2);
        assert_eq!(positive.levels[v0], 0);
    }

    #[test]
    fn matching_coins_reach_the_sink_almost_surely() {
        for variant in [false, true] {
            let g = gen_pennies(variant);
            let report = almost_set_naive(&g);
            assert_eq!(
                report.winning,
                g.all_states(),
                "variant={variant}: every state wins almost-surely"
            );
        }
    }

    #[test]
    fn almost_sure_set_is_a_fixpoint_of_one_refinement() {
        let games = [gen_gn(3), gen_gbar(), gen_gm(2), gen_pennies(false)];
        for g in &games {
            let report = almost_set_naive(g);
            let recheck = mu_y(g, &report.winning);
            assert_eq!(recheck.fixpoint, report.winning);
        }
    }

    #[test]
    fn positive_set_contains_almost_sure_set() {
        let games = [gen_gn(4), gen_gbar(), gen_gm(3), gen_pennies(true)];
        for g in &games {
            let almost = almost_set_naive(g);
            let positive = positive_set(g);
            assert!(almost.winning.is_subset(&positive.winning));
        }
    }

    #[test]
    fn chains_are_strictly_monotone() {
        let games = [gen_gn(4), gen_gbar(), gen_pennies(false), gen_pennies(true)];
        for g in &games {
            let report = almost_set_naive(g);
            let mut prev: Option<&StateSet> = None;
            for layer in &report.y_chain {
                if let Some(p) = prev {
                    assert!(p.is_subset(layer) && p != layer);
                }
                prev = Some(layer);
            }
            if let Some(chain) = &report.x_chain {
                assert_eq!(chain[0], g.all_states());
                for w in chain.windows(2) {
                    assert!(w[1].is_subset(&w[0]) && w[1] != w[0]);
                }
                assert_eq!(*chain.last().unwrap(), report.winning);
            }
        }
    }
}
