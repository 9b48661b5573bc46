//! Reduction from deterministic mean-payoff game (DMPG) values to the
//! qualitative analysis solved by this crate.
//!
//! Every weighted edge of the deterministic game is replaced by a four-state
//! probabilistic gadget with boolean rewards. Fixing any positional strategy
//! pair on the deterministic game and transporting it through the gadgets
//! yields a Markov chain whose almost-sure mean payoff is exactly the
//! deterministic pair value divided by `3M`, where `M` is the maximal edge
//! reward. Consequently `val(s) >= lambda` in the deterministic game holds
//! iff the transported max-min value is at least `lambda / (3M)`.
//!
//! Deterministic game values are computed by a brute-force referee that
//! enumerates positional strategy pairs and evaluates lasso cycle means; it
//! is intended for desk-scale instances and guarded by an enumeration bound.

use num::{BigInt, BigUint, One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::fmt::Write as _;

use crate::error::ReduceError;
use crate::game::{Dmpg, GameBuilder, GameStructure, Player, StateId};
use crate::rational::{rat_int, Rational};
use crate::strategy::StationaryStrategy;
use crate::verify::{chain_of, mc_mean_payoff, MarkovChain, DEFAULT_ENUMERATION_BOUND};

/// Where the pieces of a reduced game came from: one game state per
/// deterministic node, and four fresh gadget states per edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GadgetMap {
    node_state: Vec<StateId>,
    edge_states: Vec<[StateId; 4]>,
}

impl GadgetMap {
    pub fn node_count(&self) -> usize {
        self.node_state.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_states.len()
    }

    /// Game state carrying deterministic node `node`.
    pub fn node_state(&self, node: usize) -> StateId {
        self.node_state[node]
    }

    /// The four gadget states `[v1, v2, v3, v4]` of edge `edge`.
    pub fn edge_states(&self, edge: usize) -> [StateId; 4] {
        self.edge_states[edge]
    }

    /// Sidecar text: one line per edge naming its four gadget states.
    pub fn to_text(&self, game: &GameStructure) -> String {
        let mut out = String::new();
        for (i, [v1, v2, v3, v4]) in self.edge_states.iter().enumerate() {
            let _ = writeln!(
                out,
                "edge {} -> v1={} v2={} v3={} v4={}",
                i,
                game.state_name(*v1),
                game.state_name(*v2),
                game.state_name(*v3),
                game.state_name(*v4),
            );
        }
        out
    }
}

/// Parameters for the seed-deterministic random DMPG generator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RandomDmpgParams {
    /// Number of nodes (at least 1).
    pub nodes: usize,
    /// Maximal out-degree per node (at least 1; each node draws 1..=out_max).
    pub out_max: usize,
    /// Maximal edge reward (rewards draw uniformly from 0..=reward_max).
    pub reward_max: u64,
    /// RNG seed; the generator is a pure function of the parameters.
    pub seed: u64,
}

impl Default for RandomDmpgParams {
    fn default() -> Self {
        RandomDmpgParams { nodes: 4, out_max: 2, reward_max: 3, seed: 0 }
    }
}

/// Random deterministic mean-payoff game: every node gets a fair-coin owner
/// and between 1 and `out_max` edges with uniform targets and rewards.
pub fn gen_random_dmpg(params: &RandomDmpgParams) -> Dmpg {
    assert!(params.nodes >= 1, "need at least one node");
    assert!(params.out_max >= 1, "need at least one out-edge per node");
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let names: Vec<String> = (0..params.nodes).map(|i| format!("u{}", i)).collect();
    let mut nodes: Vec<(&str, Player)> = Vec::with_capacity(params.nodes);
    for name in &names {
        let owner = if rng.gen_range(0u32..2) == 0 { Player::One } else { Player::Two };
        nodes.push((name.as_str(), owner));
    }
    let mut edges: Vec<(&str, &str, u64)> = Vec::new();
    for src in 0..params.nodes {
        let degree = rng.gen_range(1..=params.out_max);
        for _ in 0..degree {
            let dst = rng.gen_range(0..params.nodes);
            let reward = rng.gen_range(0..=params.reward_max);
            edges.push((names[src].as_str(), names[dst].as_str(), reward));
        }
    }
    let name = format!("randd{}s{}", params.nodes, params.seed);
    Dmpg::new(&name, &nodes, &edges).expect("generated nodes and edges are valid")
}

/// Value of the unique lasso induced from `start` by a full positional
/// choice vector (`choices[i]` = local out-edge index at node `i`): the mean
/// reward of the cycle the walk settles into.
pub fn lasso_value(dmpg: &Dmpg, choices: &[usize], start: usize) -> Rational {
    assert_eq!(choices.len(), dmpg.node_count(), "one choice per node");
    let mut seen_at = vec![usize::MAX; dmpg.node_count()];
    let mut path: Vec<usize> = Vec::new();
    let mut cur = start;
    loop {
        if seen_at[cur] != usize::MAX {
            let cycle = &path[seen_at[cur]..];
            let sum: BigInt = cycle.iter().map(|&e| BigInt::from(dmpg.edges()[e].reward)).sum();
            return Rational::new(sum, BigInt::from(cycle.len() as u64));
        }
        seen_at[cur] = path.len();
        let outs = dmpg.out_edges(cur);
        assert!(choices[cur] < outs.len(), "choice out of range at node {}", cur);
        let e = outs[choices[cur]];
        path.push(e);
        cur = dmpg.edges()[e].dst;
    }
}

/// Steps a mixed-radix odometer; returns false once it wraps to all zeros.
fn advance(digits: &mut [usize], radix: &[usize]) -> bool {
    for i in 0..digits.len() {
        digits[i] += 1;
        if digits[i] < radix[i] {
            return true;
        }
        digits[i] = 0;
    }
    false
}

/// Max-min deterministic value from `start` together with an optimal
/// positional pair realizing it (a maximizer choice vector completed with a
/// minimizer best response), under an explicit enumeration bound on the
/// number of positional profiles.
pub fn dmpg_optimal_pair_bounded(
    dmpg: &Dmpg,
    start: &str,
    bound: u64,
) -> Result<(Rational, Vec<usize>), ReduceError> {
    let s = dmpg
        .node_id(start)
        .ok_or_else(|| ReduceError::UnknownNode(start.to_string()))?;
    let n = dmpg.node_count();
    let mut count = BigUint::one();
    for i in 0..n {
        count *= BigUint::from(dmpg.out_edges(i).len());
    }
    if count > BigUint::from(bound) {
        return Err(ReduceError::EnumerationBound { bound, count: count.to_string() });
    }
    let max_nodes: Vec<usize> = (0..n).filter(|&i| dmpg.owner(i) == Player::One).collect();
    let min_nodes: Vec<usize> = (0..n).filter(|&i| dmpg.owner(i) == Player::Two).collect();
    let max_radix: Vec<usize> = max_nodes.iter().map(|&i| dmpg.out_edges(i).len()).collect();
    let min_radix: Vec<usize> = min_nodes.iter().map(|&i| dmpg.out_edges(i).len()).collect();
    let mut best: Option<(Rational, Vec<usize>)> = None;
    let mut max_digits = vec![0usize; max_nodes.len()];
    loop {
        let mut worst: Option<(Rational, Vec<usize>)> = None;
        let mut min_digits = vec![0usize; min_nodes.len()];
        loop {
            let mut choices = vec![0usize; n];
            for (k, &i) in max_nodes.iter().enumerate() {
                choices[i] = max_digits[k];
            }
            for (k, &i) in min_nodes.iter().enumerate() {
                choices[i] = min_digits[k];
            }
            let value = lasso_value(dmpg, &choices, s);
            if worst.as_ref().is_none_or(|(w, _)| value < *w) {
                worst = Some((value, choices));
            }
            if !advance(&mut min_digits, &min_radix) {
                break;
            }
        }
        let (worst_value, worst_choices) = worst.expect("every node has an out-edge");
        if best.as_ref().is_none_or(|(b, _)| worst_value > *b) {
            best = Some((worst_value, worst_choices));
        }
        if !advance(&mut max_digits, &max_radix) {
            break;
        }
    }
    Ok(best.expect("every node has an out-edge"))
}

/// [`dmpg_optimal_pair_bounded`] at the default enumeration bound.
pub fn dmpg_optimal_pair(dmpg: &Dmpg, start: &str) -> Result<(Rational, Vec<usize>), ReduceError> {
    dmpg_optimal_pair_bounded(dmpg, start, DEFAULT_ENUMERATION_BOUND)
}

/// Max-min deterministic mean-payoff value from `start` by brute-force
/// positional enumeration, under an explicit enumeration bound.
pub fn dmpg_value_bruteforce_bounded(
    dmpg: &Dmpg,
    start: &str,
    bound: u64,
) -> Result<Rational, ReduceError> {
    Ok(dmpg_optimal_pair_bounded(dmpg, start, bound)?.0)
}

/// [`dmpg_value_bruteforce_bounded`] at the default enumeration bound.
pub fn dmpg_value_bruteforce(dmpg: &Dmpg, start: &str) -> Result<Rational, ReduceError> {
    Ok(dmpg_optimal_pair_bounded(dmpg, start, DEFAULT_ENUMERATION_BOUND)?.0)
}

/// Builds the concurrent game simulating the deterministic game at scale
/// `1/(3M)`.
///
/// Per edge `e = (s, t)` with reward `r`: the owner of `s` gets an action
/// (singleton for the other side) leading to the entry state `v1(e)`;
/// `v1(e)` moves to `v2(e)` with probability `r/M` and to `v3(e)` with
/// probability `(M-r)/M`, both with reward 0; `v2(e)` (reward 1) and
/// `v3(e)` (reward 0) move to `v4(e)` with probability `1 - 1/M` and to `t`
/// with probability `1/M`; `v4(e)` returns to `v1(e)` surely with reward 0.
/// Zero-weight branches are omitted. All rewards are boolean.
pub fn reduce_dmpg(dmpg: &Dmpg) -> Result<(GameStructure, GadgetMap), ReduceError> {
    let m = dmpg.max_reward();
    if m == 0 {
        return Err(ReduceError::ZeroMaxReward("0".to_string()));
    }
    // A gadget-name prefix no node name starts with, so gadget states stay
    // fresh whatever the input calls its nodes.
    let mut prefix = String::from("e");
    while (0..dmpg.node_count()).any(|i| dmpg.node_name(i).starts_with(&prefix)) {
        prefix.insert(0, 'g');
    }
    let mut builder = GameBuilder::new(&format!("{}_reduced", dmpg.name()));
    let mut node_state = Vec::with_capacity(dmpg.node_count());
    for i in 0..dmpg.node_count() {
        let id = builder.state(dmpg.node_name(i)).expect("node names are valid and distinct");
        node_state.push(id);
    }
    let gadget_names: Vec<[String; 4]> = (0..dmpg.edges().len())
        .map(|e| {
            [1, 2, 3, 4].map(|k| format!("{}{}_v{}", prefix, e, k))
        })
        .collect();
    let mut edge_states = Vec::with_capacity(dmpg.edges().len());
    for names in &gadget_names {
        let ids = [0, 1, 2, 3].map(|k| {
            builder.state(&names[k]).expect("gadget names are fresh by prefix choice")
        });
        edge_states.push(ids);
    }
    let one = Rational::one();
    let in_m = |num: u64| Rational::new(BigInt::from(num), BigInt::from(m));
    for i in 0..dmpg.node_count() {
        let owner = dmpg.owner(i);
        let edge_actions: Vec<String> =
            dmpg.out_edges(i).iter().map(|e| format!("e{}", e)).collect();
        let edge_refs: Vec<&str> = edge_actions.iter().map(|s| s.as_str()).collect();
        let name = dmpg.node_name(i);
        match owner {
            Player::One => {
                builder.actions(Player::One, name, &edge_refs).expect("fresh action set");
                builder.actions(Player::Two, name, &["b"]).expect("fresh action set");
            }
            Player::Two => {
                builder.actions(Player::One, name, &["a"]).expect("fresh action set");
                builder.actions(Player::Two, name, &edge_refs).expect("fresh action set");
            }
        }
        for (k, &e) in dmpg.out_edges(i).iter().enumerate() {
            let entry = gadget_names[e][0].as_str();
            let (a, b) = match owner {
                Player::One => (edge_refs[k], "b"),
                Player::Two => ("a", edge_refs[k]),
            };
            builder
                .trans(name, a, b, rat_int(0), &[(entry, one.clone())])
                .expect("distinct edge actions give distinct cells");
        }
    }
    for (e, edge) in dmpg.edges().iter().enumerate() {
        let [v1, v2, v3, v4] = &gadget_names[e];
        let target = dmpg.node_name(edge.dst);
        for v in [v1, v2, v3, v4] {
            builder.actions(Player::One, v, &["a"]).expect("fresh action set");
            builder.actions(Player::Two, v, &["b"]).expect("fresh action set");
        }
        let r = edge.reward;
        let entry_branches: Vec<(&str, Rational)> = if r == 0 {
            vec![(v3.as_str(), one.clone())]
        } else if r == m {
            vec![(v2.as_str(), one.clone())]
        } else {
            vec![(v2.as_str(), in_m(r)), (v3.as_str(), in_m(m - r))]
        };
        builder.trans(v1, "a", "b", rat_int(0), &entry_branches).expect("branches sum to one");
        let exit_branches: Vec<(&str, Rational)> = if m == 1 {
            vec![(target, one.clone())]
        } else {
            vec![(v4.as_str(), in_m(m - 1)), (target, in_m(1))]
        };
        builder.trans(v2, "a", "b", rat_int(1), &exit_branches).expect("branches sum to one");
        builder.trans(v3, "a", "b", rat_int(0), &exit_branches).expect("branches sum to one");
        builder
            .trans(v4, "a", "b", rat_int(0), &[(v1.as_str(), one.clone())])
            .expect("sure branch");
    }
    let game = builder.build().expect("every cell of the reduced game is declared");
    Ok((game, GadgetMap { node_state, edge_states }))
}

/// Transports a full positional choice vector into a pair of Dirac
/// stationary strategies on the reduced game: at a node state the owner
/// plays the chosen edge action, everywhere else the single action.
pub fn transport_pair(
    dmpg: &Dmpg,
    game: &GameStructure,
    map: &GadgetMap,
    choices: &[usize],
) -> (StationaryStrategy, StationaryStrategy) {
    assert_eq!(choices.len(), dmpg.node_count(), "one choice per node");
    let mut rows1: Vec<Vec<(usize, Rational)>> =
        vec![vec![(0, Rational::one())]; game.n()];
    let mut rows2 = rows1.clone();
    for i in 0..dmpg.node_count() {
        let s = map.node_state(i);
        match dmpg.owner(i) {
            Player::One => rows1[s] = vec![(choices[i], Rational::one())],
            Player::Two => rows2[s] = vec![(choices[i], Rational::one())],
        }
    }
    let sigma1 = StationaryStrategy::new(game, Player::One, rows1)
        .expect("transported rows match the reduced game");
    let sigma2 = StationaryStrategy::new(game, Player::Two, rows2)
        .expect("transported rows match the reduced game");
    (sigma1, sigma2)
}

/// Almost-sure mean payoff of the transported chain at the state carrying
/// `node`. Equals the deterministic lasso value from `node` divided by `3M`.
pub fn transported_value(
    dmpg: &Dmpg,
    game: &GameStructure,
    map: &GadgetMap,
    choices: &[usize],
    node: usize,
) -> Rational {
    let (sigma1, sigma2) = transport_pair(dmpg, game, map, choices);
    let chain = chain_of(game, &sigma1, &sigma2).expect("transported strategies fit");
    let values = mc_mean_payoff(&chain).expect("transported chain is well formed");
    values[map.node_state(node)].1.clone()
}

/// The single-edge hitting chain: `enter` takes edge `edge` into its gadget,
/// and the gadget's exit to the destination node is redirected to a fresh
/// absorbing state. Expected absorption statistics from `enter` are exactly
/// `3M` steps and total reward `r(edge)`.
pub fn edge_gadget_chain(game: &GameStructure, map: &GadgetMap, edge: usize) -> MarkovChain {
    let ids = map.edge_states(edge);
    let local = |t: StateId| -> usize {
        match ids.iter().position(|&v| v == t) {
            Some(k) => k + 1,
            None => 5,
        }
    };
    let mut names = vec!["enter".to_string()];
    names.extend([1, 2, 3, 4].map(|k| format!("v{}", k)));
    names.push("absorb".to_string());
    let mut rows: Vec<Vec<(usize, Rational)>> = vec![vec![(1, Rational::one())]];
    let mut rewards = vec![Rational::zero()];
    for &v in &ids {
        let row = game
            .delta(v, 0, 0)
            .entries()
            .iter()
            .map(|(t, p)| (local(*t), p.clone()))
            .collect();
        rows.push(row);
        rewards.push(game.reward(v, 0, 0).clone());
    }
    rows.push(vec![(5, Rational::one())]);
    rewards.push(Rational::zero());
    MarkovChain::new(names, rows, rewards).expect("single-edge chain is well formed")
}

/// Checks the value-scaling theorem at one start and threshold: computes the
/// deterministic max-min value and an optimal pair by brute force, confirms
/// the transported chain's almost-sure value equals `val / (3M)` exactly,
/// and returns the truth of `val >= lambda  iff  transported >= lambda/(3M)`.
pub fn verify_reduction(
    dmpg: &Dmpg,
    start: &str,
    lambda: &Rational,
) -> Result<bool, ReduceError> {
    let (value, choices) = dmpg_optimal_pair(dmpg, start)?;
    let (game, map) = reduce_dmpg(dmpg)?;
    let node = dmpg.node_id(start).expect("start resolved by the brute force");
    let transported = transported_value(dmpg, &game, &map, &choices, node);
    let scale = rat_int(3) * Rational::from(BigInt::from(dmpg.max_reward()));
    if transported != &value / &scale {
        return Ok(false);
    }
    Ok((value >= *lambda) == (transported >= lambda / &scale))
}
