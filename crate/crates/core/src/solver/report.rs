//! Solve results: winning set, per-state levels, witness chains, and the
//! instrumentation counters the complexity checks read.

use crate::game::{ActionId, GameStructure, StateId, StateSet};

/// Which winning mode was solved for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Objective {
    AlmostSure,
    Positive,
}

impl Objective {
    pub fn as_str(self) -> &'static str {
        match self {
            Objective::AlmostSure => "almost",
            Objective::Positive => "positive",
        }
    }
}

/// Which solver produced the report.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algorithm {
    Naive,
    Improved,
}

impl Algorithm {
    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::Naive => "naive",
            Algorithm::Improved => "improved",
        }
    }
}

/// Instrumentation accumulated while solving. Fixpoint runs fill the step
/// counts; the level-based solver fills the pass count, per-state process
/// counts, per-(state, action) remove counts, and the work accumulator
/// measured in successor entries touched.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SolveCounters {
    /// Outer refinement steps (fixpoint route) or 1 for a single inner run.
    pub outer_steps: u64,
    /// Total one-step operator evaluations across all inner fixpoint runs.
    pub inner_steps: u64,
    /// Sweeps of the level-decrement loop.
    pub passes: u64,
    /// Per-state count of full cache recomputations.
    pub process_calls: Vec<u64>,
    /// Per-state, per-player-2-action count of incremental cache removals.
    pub remove_calls: Vec<Vec<u64>>,
    /// Successor entries touched by recomputations, removals, and
    /// predecessor updates.
    pub work_units: u64,
}

/// Outcome of a solve: the winning set plus the layered structure that
/// strategy synthesis and the certificate checks consume.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveReport {
    pub objective: Objective,
    pub algorithm: Algorithm,
    pub winning: StateSet,
    /// Per-state level. For fixpoint solves this is the 1-based index of
    /// the first witness layer containing the state (0 outside the winning
    /// set); for the level-based solver it is the final level counter.
    pub levels: Vec<usize>,
    /// Strictly ascending witness chain ending at the winning set.
    pub y_chain: Vec<StateSet>,
    /// Strictly descending refinement chain from the full state set down to
    /// the almost-sure set. Present only for the fixpoint almost-sure route.
    pub x_chain: Option<Vec<StateSet>>,
    pub counters: SolveCounters,
}

impl SolveReport {
    /// 1-based witness-layer index of `s`, or 0 outside the winning set.
    /// Converts the level-based solver's descending levels to layer indices.
    pub fn y_index(&self, game: &GameStructure, s: StateId) -> usize {
        if !self.winning.contains(&s) {
            return 0;
        }
        match self.algorithm {
            Algorithm::Naive => self.levels[s],
            Algorithm::Improved => game.n() + 1 - self.levels[s],
        }
    }

    /// One line per state, sorted by state name:
    /// `NAME level=K in_winning=yes|no`.
    pub fn to_text(&self, game: &GameStructure) -> String {
        let mut names: Vec<StateId> = game.state_ids().collect();
        names.sort_by(|&a, &b| game.state_name(a).cmp(game.state_name(b)));
        let mut out = String::new();
        for s in names {
            let flag = if self.winning.contains(&s) { "yes" } else { "no" };
            out.push_str(&format!(
                "{} level={} in_winning={}\n",
                game.state_name(s),
                self.levels[s],
                flag
            ));
        }
        out
    }

    /// Total removals recorded for one (state, player-2 action) pair.
    pub fn remove_count(&self, s: StateId, b: ActionId) -> u64 {
        self.counters
            .remove_calls
            .get(s)
            .and_then(|row| row.get(b))
            .copied()
            .unwrap_or(0)
    }
}

#[cfg(test)]
mod tests {
    use crate::generators::{gen_gbar, gen_gn};
    use crate::solver::naive::{almost_set_naive, positive_set};

    #[test]
    fn text_listing_is_sorted_and_flagged() {
        let g = gen_gbar();
        let report = positive_set(&g);
        let text = report.to_text(&g);
        assert_eq!(
            text,
            "v level=2 in_winning=yes\nv0 level=0 in_winning=no\nv1 level=1 in_winning=yes\n"
        );
    }

    #[test]
    fn y_index_matches_levels_for_fixpoint_reports() {
        let g = gen_gn(2);
        let report = almost_set_naive(&g);
        for s in g.state_ids() {
            assert_eq!(report.y_index(&g, s), report.levels[s]);
        }
    }
}
