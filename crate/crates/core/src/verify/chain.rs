//! Exact Markov-chain analysis.
//!
//! The long-run behavior of a finite chain is governed by its bottom
//! strongly-connected classes: the play enters one of them with
//! probability 1, and inside a class the limit average equals the class
//! gain almost surely. The analysis computes the classes, their exact
//! stationary distributions and gains, the absorption probabilities from
//! every state, and from those the per-state expected value and the
//! extremes over reachable classes.

use std::collections::BTreeMap;

use num::{One, Zero};

use crate::error::VerifyError;
use crate::rational::Rational;
use crate::verify::linalg;

/// A finite Markov chain with exact transition probabilities and an
/// expected one-step reward per state. States carry display names so
/// reports over derived chains (such as strategy products) stay readable.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkovChain {
    names: Vec<String>,
    step: Vec<Vec<(usize, Rational)>>,
    reward: Vec<Rational>,
}

impl MarkovChain {
    /// Builds a chain, merging duplicate targets per row and validating
    /// that every row is a probability distribution.
    pub fn new(
        names: Vec<String>,
        rows: Vec<Vec<(usize, Rational)>>,
        reward: Vec<Rational>,
    ) -> Result<Self, VerifyError> {
        let n = names.len();
        if n == 0 {
            return Err(VerifyError::InternalConsistency("chain has no states".into()));
        }
        if rows.len() != n || reward.len() != n {
            return Err(VerifyError::InternalConsistency(
                "chain rows and rewards must cover every state".into(),
            ));
        }
        let mut step = Vec::with_capacity(n);
        for (s, row) in rows.into_iter().enumerate() {
            let mut merged: BTreeMap<usize, Rational> = BTreeMap::new();
            for (t, p) in row {
                if t >= n {
                    return Err(VerifyError::InternalConsistency(format!(
                        "chain row {s} targets out-of-range state {t}"
                    )));
                }
                if p.is_zero() {
                    continue;
                }
                if p < Rational::zero() {
                    return Err(VerifyError::InternalConsistency(format!(
                        "chain row {s} has a negative probability"
                    )));
                }
                *merged.entry(t).or_insert_with(Rational::zero) += p;
            }
            let total: Rational = merged.values().sum();
            if total != Rational::one() {
                return Err(VerifyError::InternalConsistency(format!(
                    "chain row {s} sums to {total}, not 1"
                )));
            }
            step.push(merged.into_iter().collect());
        }
        Ok(MarkovChain { names, step, reward })
    }

    pub fn n(&self) -> usize {
        self.names.len()
    }

    pub fn name(&self, s: usize) -> &str {
        &self.names[s]
    }

    pub fn step_row(&self, s: usize) -> &[(usize, Rational)] {
        &self.step[s]
    }

    pub fn reward(&self, s: usize) -> &Rational {
        &self.reward[s]
    }
}

/// The full long-run decomposition of a chain.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainAnalysis {
    /// Bottom strongly-connected classes, each sorted, ordered by their
    /// smallest member.
    pub classes: Vec<Vec<usize>>,
    /// Exact gain of each class under its stationary distribution.
    pub gains: Vec<Rational>,
    /// Class index per state; `None` for transient states.
    pub class_of: Vec<Option<usize>>,
    /// `reach[s][c]`: exact probability of absorption in class `c` from
    /// `s`. Rows sum to 1.
    pub reach: Vec<Vec<Rational>>,
    /// Expected limit-average value per state.
    pub expected: Vec<Rational>,
    /// Minimum gain over the classes reachable from each state: the value
    /// the limit average meets or exceeds almost surely.
    pub min_reachable: Vec<Rational>,
    /// Maximum gain over the classes reachable from each state: the value
    /// the limit average stays at or below almost surely.
    pub max_reachable: Vec<Rational>,
}

fn strongly_connected_components(adj: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let n = adj.len();
    const UNSEEN: usize = usize::MAX;
    let mut index = vec![UNSEEN; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack: Vec<usize> = Vec::new();
    let mut next_index = 0usize;
    let mut components: Vec<Vec<usize>> = Vec::new();
    let mut call: Vec<(usize, usize)> = Vec::new();
    for root in 0..n {
        if index[root] != UNSEEN {
            continue;
        }
        index[root] = next_index;
        low[root] = next_index;
        next_index += 1;
        stack.push(root);
        on_stack[root] = true;
        call.push((root, 0));
        while let Some(&(v, child)) = call.last() {
            if child < adj[v].len() {
                call.last_mut().expect("frame exists").1 += 1;
                let w = adj[v][child];
                if index[w] == UNSEEN {
                    index[w] = next_index;
                    low[w] = next_index;
                    next_index += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] && index[w] < low[v] {
                    low[v] = index[w];
                }
            } else {
                call.pop();
                if let Some(&(parent, _)) = call.last() {
                    if low[v] < low[parent] {
                        low[parent] = low[v];
                    }
                }
                if low[v] == index[v] {
                    let mut component = Vec::new();
                    loop {
                        let w = stack.pop().expect("component member on stack");
                        on_stack[w] = false;
                        component.push(w);
                        if w == v {
                            break;
                        }
                    }
                    component.sort_unstable();
                    components.push(component);
                }
            }
        }
    }
    components
}

/// Stationary distribution of an irreducible closed class, as a map from
/// the class's local position to its probability.
fn stationary_distribution(
    chain: &MarkovChain,
    class: &[usize],
) -> Result<Vec<Rational>, VerifyError> {
    let k = class.len();
    let pos: BTreeMap<usize, usize> = class.iter().enumerate().map(|(i, &s)| (s, i)).collect();
    // Rows 0..k-1: balance equations (P^T - I) pi = 0; the last one is
    // redundant on an irreducible class and is replaced by normalization.
    let mut a = vec![vec![Rational::zero(); k]; k];
    for (j, &s) in class.iter().enumerate() {
        for (t, p) in chain.step_row(s) {
            let i = *pos.get(t).ok_or_else(|| {
                VerifyError::InternalConsistency("bottom class is not closed".into())
            })?;
            a[i][j] += p.clone();
        }
        a[j][j] -= Rational::one();
    }
    for cell in &mut a[k - 1] {
        *cell = Rational::one();
    }
    let mut rhs = vec![vec![Rational::zero()]; k];
    rhs[k - 1][0] = Rational::one();
    let solution = linalg::solve(a, rhs).ok_or_else(|| {
        VerifyError::InternalConsistency("stationary system is singular".into())
    })?;
    Ok(solution.into_iter().map(|mut row| row.pop().expect("one column")).collect())
}

/// Decomposes the chain and computes every long-run quantity.
pub fn analyze(chain: &MarkovChain) -> Result<ChainAnalysis, VerifyError> {
    let n = chain.n();
    let adj: Vec<Vec<usize>> =
        (0..n).map(|s| chain.step_row(s).iter().map(|&(t, _)| t).collect()).collect();
    let mut classes: Vec<Vec<usize>> = strongly_connected_components(&adj)
        .into_iter()
        .filter(|component| {
            component.iter().all(|&s| {
                adj[s].iter().all(|t| component.binary_search(t).is_ok())
            })
        })
        .collect();
    classes.sort_by_key(|component| component[0]);

    let mut class_of = vec![None; n];
    for (c, component) in classes.iter().enumerate() {
        for &s in component {
            class_of[s] = Some(c);
        }
    }

    let mut gains = Vec::with_capacity(classes.len());
    for component in &classes {
        let pi = stationary_distribution(chain, component)?;
        let gain = component
            .iter()
            .zip(&pi)
            .map(|(&s, weight)| weight * chain.reward(s))
            .sum();
        gains.push(gain);
    }

    // Absorption probabilities: indicator rows for class states, one
    // linear solve with a column per class for the transient states.
    let transient: Vec<usize> = (0..n).filter(|&s| class_of[s].is_none()).collect();
    let tpos: BTreeMap<usize, usize> =
        transient.iter().enumerate().map(|(i, &s)| (s, i)).collect();
    let k = classes.len();
    let mut reach = vec![vec![Rational::zero(); k]; n];
    for s in 0..n {
        if let Some(c) = class_of[s] {
            reach[s][c] = Rational::one();
        }
    }
    if !transient.is_empty() {
        let tn = transient.len();
        let mut a = vec![vec![Rational::zero(); tn]; tn];
        let mut rhs = vec![vec![Rational::zero(); k]; tn];
        for (i, &s) in transient.iter().enumerate() {
            a[i][i] = Rational::one();
            for (t, p) in chain.step_row(s) {
                match class_of[*t] {
                    Some(c) => rhs[i][c] += p.clone(),
                    None => a[i][tpos[t]] -= p.clone(),
                }
            }
        }
        let solution = linalg::solve(a, rhs).ok_or_else(|| {
            VerifyError::InternalConsistency("absorption system is singular".into())
        })?;
        for (i, &s) in transient.iter().enumerate() {
            reach[s] = solution[i].clone();
        }
    }

    let expected: Vec<Rational> = (0..n)
        .map(|s| reach[s].iter().zip(&gains).map(|(p, g)| p * g).sum())
        .collect();
    let mut min_reachable = Vec::with_capacity(n);
    let mut max_reachable = Vec::with_capacity(n);
    for s in 0..n {
        let mut lo: Option<&Rational> = None;
        let mut hi: Option<&Rational> = None;
        for (c, p) in reach[s].iter().enumerate() {
            if p.is_zero() {
                continue;
            }
            if lo.is_none_or(|v| &gains[c] < v) {
                lo = Some(&gains[c]);
            }
            if hi.is_none_or(|v| &gains[c] > v) {
                hi = Some(&gains[c]);
            }
        }
        let lo = lo.ok_or_else(|| {
            VerifyError::InternalConsistency("state reaches no bottom class".into())
        })?;
        let hi = hi.expect("max exists whenever min does");
        min_reachable.push(lo.clone());
        max_reachable.push(hi.clone());
    }

    Ok(ChainAnalysis { classes, gains, class_of, reach, expected, min_reachable, max_reachable })
}

/// Per-state `(expected value, almost-sure value)` of the limit average:
/// the expectation over absorption classes and the minimum gain among
/// them (the bound the limit average achieves with probability 1).
pub fn mc_mean_payoff(chain: &MarkovChain) -> Result<Vec<(Rational, Rational)>, VerifyError> {
    let analysis = analyze(chain)?;
    Ok(analysis.expected.into_iter().zip(analysis.min_reachable).collect())
}

/// Expected absorption statistics against a target set the chain reaches
/// almost surely from everywhere: per state, the expected number of steps
/// until the first visit to `targets` and the expected total reward
/// accumulated strictly before it. Errors when some bottom class lies
/// outside the target set (absorption would not be almost sure).
pub fn absorption_stats(
    chain: &MarkovChain,
    targets: &std::collections::BTreeSet<usize>,
) -> Result<Vec<(Rational, Rational)>, VerifyError> {
    let n = chain.n();
    let analysis = analyze(chain)?;
    for component in &analysis.classes {
        if component.iter().any(|s| !targets.contains(s)) {
            return Err(VerifyError::InternalConsistency(
                "a bottom class escapes the target set; absorption is not almost sure".into(),
            ));
        }
    }
    let free: Vec<usize> = (0..n).filter(|s| !targets.contains(s)).collect();
    let fpos: BTreeMap<usize, usize> = free.iter().enumerate().map(|(i, &s)| (s, i)).collect();
    let mut out = vec![(Rational::zero(), Rational::zero()); n];
    if free.is_empty() {
        return Ok(out);
    }
    let fnn = free.len();
    let mut a = vec![vec![Rational::zero(); fnn]; fnn];
    let mut rhs = vec![vec![Rational::zero(); 2]; fnn];
    for (i, &s) in free.iter().enumerate() {
        a[i][i] = Rational::one();
        for (t, p) in chain.step_row(s) {
            if let Some(&j) = fpos.get(t) {
                a[i][j] -= p.clone();
            }
        }
        rhs[i][0] = Rational::one();
        rhs[i][1] = chain.reward(s).clone();
    }
    let solution = linalg::solve(a, rhs).ok_or_else(|| {
        VerifyError::InternalConsistency("hitting-time system is singular".into())
    })?;
    for (i, &s) in free.iter().enumerate() {
        out[s] = (solution[i][0].clone(), solution[i][1].clone());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, rat_int};
    use std::collections::BTreeSet;

    fn chain(rows: Vec<Vec<(usize, Rational)>>, rewards: Vec<Rational>) -> MarkovChain {
        let names = (0..rows.len()).map(|i| format!("c{i}")).collect();
        MarkovChain::new(names, rows, rewards).unwrap()
    }

    #[test]
    fn single_self_loop_has_its_reward_as_value() {
        let c = chain(vec![vec![(0, rat_int(1))]], vec![rat_int(1)]);
        assert_eq!(mc_mean_payoff(&c).unwrap(), vec![(rat_int(1), rat_int(1))]);
    }

    #[test]
    fn split_absorption_averages_expected_and_takes_min_almost_surely() {
        // State 0 moves to absorbing reward-0 and reward-1 states with
        // probability 1/2 each.
        let c = chain(
            vec![
                vec![(1, rat(1, 2)), (2, rat(1, 2))],
                vec![(1, rat_int(1))],
                vec![(2, rat_int(1))],
            ],
            vec![rat_int(0), rat_int(0), rat_int(1)],
        );
        let values = mc_mean_payoff(&c).unwrap();
        assert_eq!(values[0], (rat(1, 2), rat_int(0)));
        let analysis = analyze(&c).unwrap();
        assert_eq!(analysis.max_reachable[0], rat_int(1));
        assert_eq!(analysis.classes, vec![vec![1], vec![2]]);
        assert_eq!(analysis.reach[0], vec![rat(1, 2), rat(1, 2)]);
    }

    #[test]
    fn deterministic_two_cycle_has_the_cycle_mean() {
        let c = chain(
            vec![vec![(1, rat_int(1))], vec![(0, rat_int(1))]],
            vec![rat_int(0), rat_int(1)],
        );
        let values = mc_mean_payoff(&c).unwrap();
        assert_eq!(values[0], (rat(1, 2), rat(1, 2)));
        assert_eq!(values[1], (rat(1, 2), rat(1, 2)));
    }

    #[test]
    fn asymmetric_class_uses_the_exact_stationary_distribution() {
        // A: stay 1/3, to B 2/3; B: to A 1/2, stay 1/2. Stationary weights
        // are 3/7 and 4/7; rewards 1 and 0 give gain 3/7.
        let c = chain(
            vec![
                vec![(0, rat(1, 3)), (1, rat(2, 3))],
                vec![(0, rat(1, 2)), (1, rat(1, 2))],
            ],
            vec![rat_int(1), rat_int(0)],
        );
        let analysis = analyze(&c).unwrap();
        assert_eq!(analysis.classes, vec![vec![0, 1]]);
        assert_eq!(analysis.gains, vec![rat(3, 7)]);
        assert_eq!(mc_mean_payoff(&c).unwrap()[1], (rat(3, 7), rat(3, 7)));
    }

    #[test]
    fn transient_values_mix_reachable_class_gains() {
        // 0 splits between a 1/3-reward loop and a 3/4-reward loop.
        let c = chain(
            vec![
                vec![(1, rat(1, 2)), (2, rat(1, 2))],
                vec![(1, rat_int(1))],
                vec![(2, rat_int(1))],
            ],
            vec![rat(1, 2), rat(1, 3), rat(3, 4)],
        );
        let analysis = analyze(&c).unwrap();
        assert_eq!(analysis.expected[0], rat(13, 24));
        assert_eq!(analysis.min_reachable[0], rat(1, 3));
        assert_eq!(analysis.max_reachable[0], rat(3, 4));
    }

    #[test]
    fn permuting_state_order_permutes_values_exactly() {
        let rows = vec![
            vec![(1, rat(1, 4)), (2, rat(3, 4))],
            vec![(1, rat(1, 2)), (2, rat(1, 2))],
            vec![(2, rat_int(1))],
        ];
        let rewards = vec![rat(1, 5), rat(2, 3), rat(1, 7)];
        let c = chain(rows.clone(), rewards.clone());
        let values = mc_mean_payoff(&c).unwrap();
        // Reverse the state order: state i maps to 2 - i.
        let perm = |i: usize| 2 - i;
        let mut prows = vec![Vec::new(); 3];
        let mut prewards = vec![rat_int(0); 3];
        for i in 0..3 {
            prows[perm(i)] =
                rows[i].iter().map(|(t, p)| (perm(*t), p.clone())).collect();
            prewards[perm(i)] = rewards[i].clone();
        }
        let pc = chain(prows, prewards);
        let pvalues = mc_mean_payoff(&pc).unwrap();
        for i in 0..3 {
            assert_eq!(values[i], pvalues[perm(i)]);
        }
    }

    #[test]
    fn absorption_stats_solve_hitting_time_and_pre_target_reward() {
        // 0 -> 1 always; 1 stays with 1/2 and hits the target 2 with 1/2.
        // Expected steps from 1: 2; from 0: 3. Rewards 1/4 at 0, 1/3 at 1:
        // expected pre-target reward from 1 is 2/3, from 0 is 1/4 + 2/3.
        let c = chain(
            vec![
                vec![(1, rat_int(1))],
                vec![(1, rat(1, 2)), (2, rat(1, 2))],
                vec![(2, rat_int(1))],
            ],
            vec![rat(1, 4), rat(1, 3), rat_int(0)],
        );
        let targets: BTreeSet<usize> = [2usize].into_iter().collect();
        let stats = absorption_stats(&c, &targets).unwrap();
        assert_eq!(stats[2], (rat_int(0), rat_int(0)));
        assert_eq!(stats[1], (rat_int(2), rat(2, 3)));
        assert_eq!(stats[0], (rat_int(3), rat(11, 12)));
    }

    #[test]
    fn absorption_stats_reject_escaping_classes() {
        let c = chain(
            vec![vec![(0, rat_int(1))], vec![(1, rat_int(1))]],
            vec![rat_int(1), rat_int(0)],
        );
        let targets: BTreeSet<usize> = [1usize].into_iter().collect();
        assert!(absorption_stats(&c, &targets).is_err());
    }

    #[test]
    fn constructor_rejects_bad_rows_and_merges_duplicates() {
        assert!(MarkovChain::new(
            vec!["a".into()],
            vec![vec![(0, rat(1, 2))]],
            vec![rat_int(0)]
        )
        .is_err());
        assert!(MarkovChain::new(
            vec!["a".into()],
            vec![vec![(1, rat_int(1))]],
            vec![rat_int(0)]
        )
        .is_err());
        let merged = MarkovChain::new(
            vec!["a".into()],
            vec![vec![(0, rat(1, 2)), (0, rat(1, 2))]],
            vec![rat_int(0)],
        )
        .unwrap();
        assert_eq!(merged.step_row(0), &[(0, rat_int(1))]);
    }
}
