//! The game model.
//!
//! A game structure has a finite state space, a nonempty finite action set per
//! state for each player, and a total transition function: for every state `s`
//! and action pair `(a, b)` a distribution `delta(s, a, b)` over successor
//! states with exact positive rational probabilities summing to 1, plus a
//! rational reward `r(s, a, b)` in `[0, 1]`.
//!
//! States and actions are index-based internally; names appear only at the
//! text-format boundary. Canonical ordering everywhere is declaration order.
//! A game is immutable after construction and safe to share across threads.
//!
//! The module also houses the deterministic mean-payoff game graph type
//! ([`Dmpg`]) consumed by the reduction, and the line-oriented text formats
//! for both.

use crate::error::{GameError, ParseError};
use crate::rational::{parse_rational, Rational};
use num::{One, Signed, Zero};
use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;

pub type StateId = usize;
pub type ActionId = usize;
pub type StateSet = BTreeSet<StateId>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Player {
    One,
    Two,
}

impl Player {
    pub fn index(self) -> u8 {
        match self {
            Player::One => 1,
            Player::Two => 2,
        }
    }

    pub fn other(self) -> Player {
        match self {
            Player::One => Player::Two,
            Player::Two => Player::One,
        }
    }
}

/// A probability distribution over states: positive entries, sorted by state
/// id, summing to exactly 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Distribution {
    entries: Vec<(StateId, Rational)>,
}

impl Distribution {
    pub(crate) fn from_sorted(entries: Vec<(StateId, Rational)>) -> Self {
        debug_assert!(entries.windows(2).all(|w| w[0].0 < w[1].0));
        debug_assert!(entries.iter().all(|(_, p)| p.is_positive()));
        debug_assert!(entries.iter().map(|(_, p)| p).sum::<Rational>() == Rational::one());
        Distribution { entries }
    }

    pub fn dirac(target: StateId) -> Self {
        Distribution { entries: vec![(target, Rational::one())] }
    }

    pub fn entries(&self) -> &[(StateId, Rational)] {
        &self.entries
    }

    pub fn support(&self) -> impl Iterator<Item = StateId> + '_ {
        self.entries.iter().map(|(t, _)| *t)
    }

    pub fn probability(&self, target: StateId) -> Rational {
        match self.entries.binary_search_by_key(&target, |(t, _)| *t) {
            Ok(i) => self.entries[i].1.clone(),
            Err(_) => Rational::zero(),
        }
    }

    pub fn is_dirac(&self) -> bool {
        self.entries.len() == 1
    }

    /// True iff every support state lies in `set`.
    pub fn supported_in(&self, set: &StateSet) -> bool {
        self.entries.iter().all(|(t, _)| set.contains(t))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GameStructure {
    name: String,
    states: Vec<String>,
    state_index: HashMap<String, StateId>,
    actions1: Vec<Vec<String>>,
    actions2: Vec<Vec<String>>,
    /// `delta[s][a][b]`
    delta: Vec<Vec<Vec<Distribution>>>,
    /// `reward[s][a][b]`
    reward: Vec<Vec<Vec<Rational>>>,
    max_reward: Rational,
    boolean: bool,
    delta_min: Rational,
    delta_size: u64,
}

impl GameStructure {
    pub fn name(&self) -> &str {
        &self.name
    }

    /// Number of states.
    pub fn n(&self) -> usize {
        self.states.len()
    }

    /// Maximal action-set size over both players and all states.
    pub fn m(&self) -> usize {
        let m1 = self.actions1.iter().map(Vec::len).max().unwrap_or(0);
        let m2 = self.actions2.iter().map(Vec::len).max().unwrap_or(0);
        m1.max(m2)
    }

    pub fn state_ids(&self) -> impl Iterator<Item = StateId> {
        0..self.states.len()
    }

    pub fn all_states(&self) -> StateSet {
        (0..self.states.len()).collect()
    }

    pub fn state_name(&self, s: StateId) -> &str {
        &self.states[s]
    }

    pub fn state_id(&self, name: &str) -> Option<StateId> {
        self.state_index.get(name).copied()
    }

    pub fn actions(&self, player: Player, s: StateId) -> &[String] {
        match player {
            Player::One => &self.actions1[s],
            Player::Two => &self.actions2[s],
        }
    }

    pub fn action_count(&self, player: Player, s: StateId) -> usize {
        self.actions(player, s).len()
    }

    pub fn action_id(&self, player: Player, s: StateId, name: &str) -> Option<ActionId> {
        self.actions(player, s).iter().position(|a| a == name)
    }

    pub fn action_name(&self, player: Player, s: StateId, a: ActionId) -> &str {
        &self.actions(player, s)[a]
    }

    pub fn delta(&self, s: StateId, a: ActionId, b: ActionId) -> &Distribution {
        &self.delta[s][a][b]
    }

    pub fn reward(&self, s: StateId, a: ActionId, b: ActionId) -> &Rational {
        &self.reward[s][a][b]
    }

    /// Maximal reward over all transitions.
    pub fn max_reward(&self) -> &Rational {
        &self.max_reward
    }

    /// True iff every reward is 0 or 1.
    pub fn is_boolean(&self) -> bool {
        self.boolean
    }

    /// The reward value that counts as "maximal" for the qualitative
    /// objectives: literal 1 for boolean games (an all-zero game has no
    /// winning transition), the maximal reward otherwise.
    pub fn reward_threshold(&self) -> Rational {
        if self.boolean {
            Rational::one()
        } else {
            self.max_reward.clone()
        }
    }

    /// True iff `r(s, a, b)` counts as maximal for the qualitative objectives.
    pub fn reward_is_max(&self, s: StateId, a: ActionId, b: ActionId) -> bool {
        self.reward[s][a][b] == self.reward_threshold()
    }

    /// Minimal positive transition probability.
    pub fn delta_min(&self) -> &Rational {
        &self.delta_min
    }

    /// Total transition-function size: the number of (state, action pair,
    /// successor) support entries.
    pub fn delta_size(&self) -> u64 {
        self.delta_size
    }

    /// For each state `t`, the triples `(s, a, b)` with `t` in the support of
    /// `delta(s, a, b)`.
    pub fn pred_triples(&self) -> Vec<Vec<(StateId, ActionId, ActionId)>> {
        let mut pred = vec![Vec::new(); self.states.len()];
        for s in self.state_ids() {
            for a in 0..self.actions1[s].len() {
                for b in 0..self.actions2[s].len() {
                    for t in self.delta[s][a][b].support() {
                        pred[t].push((s, a, b));
                    }
                }
            }
        }
        pred
    }

    /// Renders a state set as sorted state names.
    pub fn render_state_set(&self, set: &StateSet) -> String {
        let mut names: Vec<&str> = set.iter().map(|&s| self.state_name(s)).collect();
        names.sort_unstable();
        names.join(" ")
    }

    /// Canonical text form (the parseable game format).
    pub fn to_cmpg_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "game {}", self.name);
        for s in self.state_ids() {
            let _ = writeln!(out, "state {}", self.states[s]);
        }
        for s in self.state_ids() {
            let _ = writeln!(out, "actions1 {} {}", self.states[s], self.actions1[s].join(" "));
            let _ = writeln!(out, "actions2 {} {}", self.states[s], self.actions2[s].join(" "));
        }
        for s in self.state_ids() {
            for (a, a_name) in self.actions1[s].iter().enumerate() {
                for (b, b_name) in self.actions2[s].iter().enumerate() {
                    let dist = self.delta[s][a][b]
                        .entries()
                        .iter()
                        .map(|(t, p)| format!("{}:{}", self.states[*t], p))
                        .collect::<Vec<_>>()
                        .join(" ");
                    let _ = writeln!(
                        out,
                        "trans {} {} {} r={} -> {}",
                        self.states[s], a_name, b_name, self.reward[s][a][b], dist
                    );
                }
            }
        }
        out
    }
}

fn check_token(kind: &str, name: &str) -> Result<(), GameError> {
    let bad = name.is_empty()
        || name.chars().any(|c| c.is_whitespace() || c == '#' || c == ':' || c == '=');
    if bad {
        return Err(GameError::InvalidName { kind: kind.to_string(), name: name.to_string() });
    }
    Ok(())
}

/// Incremental game construction. Rewards may be arbitrary rationals until
/// [`GameBuilder::build`], which enforces the `[0, 1]` range; out-of-range
/// rewards are meant to pass through [`GameBuilder::normalize_rewards`] first.
#[derive(Debug, Clone)]
pub struct GameBuilder {
    name: String,
    states: Vec<String>,
    state_index: HashMap<String, StateId>,
    actions1: Vec<Option<Vec<String>>>,
    actions2: Vec<Option<Vec<String>>>,
    trans: HashMap<(StateId, ActionId, ActionId), (Rational, Vec<(StateId, Rational)>)>,
}

/// What [`GameBuilder::normalize_rewards`] did.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizeOutcome {
    /// Additive shift `y` applied inside `r' = x * (r + y)`.
    pub shift: Rational,
    /// Multiplicative scale `x`.
    pub scale: Rational,
    /// True iff all rewards were equal; they were all set to 1.
    pub degenerate: bool,
}

impl GameBuilder {
    pub fn new(name: &str) -> Self {
        GameBuilder {
            name: name.to_string(),
            states: Vec::new(),
            state_index: HashMap::new(),
            actions1: Vec::new(),
            actions2: Vec::new(),
            trans: HashMap::new(),
        }
    }

    pub fn state(&mut self, name: &str) -> Result<StateId, GameError> {
        check_token("state", name)?;
        if self.state_index.contains_key(name) {
            return Err(GameError::DuplicateState(name.to_string()));
        }
        let id = self.states.len();
        self.states.push(name.to_string());
        self.state_index.insert(name.to_string(), id);
        self.actions1.push(None);
        self.actions2.push(None);
        Ok(id)
    }

    pub fn actions(&mut self, player: Player, state: &str, names: &[&str]) -> Result<(), GameError> {
        let s = self
            .state_index
            .get(state)
            .copied()
            .ok_or_else(|| GameError::UnknownState(state.to_string()))?;
        let slot = match player {
            Player::One => &mut self.actions1[s],
            Player::Two => &mut self.actions2[s],
        };
        if slot.is_some() {
            return Err(GameError::DuplicateActionSet {
                state: state.to_string(),
                player: player.index(),
            });
        }
        if names.is_empty() {
            return Err(GameError::EmptyActionSet {
                state: state.to_string(),
                player: player.index(),
            });
        }
        let mut seen = BTreeSet::new();
        for n in names {
            check_token("action", n)?;
            if !seen.insert(*n) {
                return Err(GameError::DuplicateAction {
                    state: state.to_string(),
                    action: n.to_string(),
                    player: player.index(),
                });
            }
        }
        *slot = Some(names.iter().map(|n| n.to_string()).collect());
        Ok(())
    }

    pub fn trans(
        &mut self,
        state: &str,
        a: &str,
        b: &str,
        reward: Rational,
        targets: &[(&str, Rational)],
    ) -> Result<(), GameError> {
        let s = self
            .state_index
            .get(state)
            .copied()
            .ok_or_else(|| GameError::UnknownState(state.to_string()))?;
        let find = |player: Player, list: &Option<Vec<String>>, name: &str| -> Result<ActionId, GameError> {
            list.as_deref()
                .and_then(|v| v.iter().position(|x| x == name))
                .ok_or_else(|| GameError::UnknownAction {
                    state: state.to_string(),
                    action: name.to_string(),
                    player: player.index(),
                })
        };
        let ai = find(Player::One, &self.actions1[s], a)?;
        let bi = find(Player::Two, &self.actions2[s], b)?;
        if self.trans.contains_key(&(s, ai, bi)) {
            return Err(GameError::DuplicateTransition {
                state: state.to_string(),
                a: a.to_string(),
                b: b.to_string(),
            });
        }
        let mut entries: Vec<(StateId, Rational)> = Vec::with_capacity(targets.len());
        for (t_name, p) in targets {
            let t = self
                .state_index
                .get(*t_name)
                .copied()
                .ok_or_else(|| GameError::UnknownState(t_name.to_string()))?;
            if !p.is_positive() {
                return Err(GameError::NonPositiveProbability {
                    state: state.to_string(),
                    a: a.to_string(),
                    b: b.to_string(),
                    prob: p.to_string(),
                });
            }
            if entries.iter().any(|(u, _)| *u == t) {
                return Err(GameError::DuplicateTarget {
                    state: state.to_string(),
                    a: a.to_string(),
                    b: b.to_string(),
                    target: t_name.to_string(),
                });
            }
            entries.push((t, p.clone()));
        }
        let sum: Rational = entries.iter().map(|(_, p)| p).sum();
        if sum != Rational::one() {
            return Err(GameError::DistributionSum {
                state: state.to_string(),
                a: a.to_string(),
                b: b.to_string(),
                sum: sum.to_string(),
            });
        }
        entries.sort_by_key(|(t, _)| *t);
        self.trans.insert((s, ai, bi), (reward, entries));
        Ok(())
    }

    /// Affine reward rescaling `r' = scale * (r + shift)` over every declared
    /// transition. With `auto`, shift/scale are taken from the reward range so
    /// the image is exactly `[0, 1]`; a constant reward function is degenerate
    /// and maps to all-1 with a warning flag.
    pub fn normalize_rewards(&mut self) -> NormalizeOutcome {
        let lo = self.trans.values().map(|(r, _)| r.clone()).min();
        let hi = self.trans.values().map(|(r, _)| r.clone()).max();
        let (Some(lo), Some(hi)) = (lo, hi) else {
            return NormalizeOutcome {
                shift: Rational::zero(),
                scale: Rational::one(),
                degenerate: false,
            };
        };
        if lo == hi {
            for (r, _) in self.trans.values_mut() {
                *r = Rational::one();
            }
            return NormalizeOutcome {
                shift: Rational::zero(),
                scale: Rational::one(),
                degenerate: true,
            };
        }
        let shift = -lo.clone();
        let scale = (hi - lo).recip();
        self.normalize_rewards_with(&scale, &shift);
        NormalizeOutcome { shift, scale, degenerate: false }
    }

    /// Affine rescaling with explicit parameters: `r' = scale * (r + shift)`.
    pub fn normalize_rewards_with(&mut self, scale: &Rational, shift: &Rational) {
        for (r, _) in self.trans.values_mut() {
            *r = scale * (r.clone() + shift);
        }
    }

    pub fn build(mut self) -> Result<GameStructure, GameError> {
        if self.states.is_empty() {
            return Err(GameError::NoStates);
        }
        let n = self.states.len();
        let mut actions1 = Vec::with_capacity(n);
        let mut actions2 = Vec::with_capacity(n);
        for s in 0..n {
            let a1 = self.actions1[s].take().ok_or_else(|| GameError::EmptyActionSet {
                state: self.states[s].clone(),
                player: 1,
            })?;
            let a2 = self.actions2[s].take().ok_or_else(|| GameError::EmptyActionSet {
                state: self.states[s].clone(),
                player: 2,
            })?;
            actions1.push(a1);
            actions2.push(a2);
        }
        let mut delta: Vec<Vec<Vec<Distribution>>> = Vec::with_capacity(n);
        let mut reward: Vec<Vec<Vec<Rational>>> = Vec::with_capacity(n);
        let mut max_reward: Option<Rational> = None;
        let mut boolean = true;
        let mut delta_min: Option<Rational> = None;
        let mut delta_size: u64 = 0;
        for s in 0..n {
            let mut drow = Vec::with_capacity(actions1[s].len());
            let mut rrow = Vec::with_capacity(actions1[s].len());
            for a in 0..actions1[s].len() {
                let mut dcol = Vec::with_capacity(actions2[s].len());
                let mut rcol = Vec::with_capacity(actions2[s].len());
                for b in 0..actions2[s].len() {
                    let (r, entries) =
                        self.trans.remove(&(s, a, b)).ok_or_else(|| GameError::MissingTransition {
                            state: self.states[s].clone(),
                            a: actions1[s][a].clone(),
                            b: actions2[s][b].clone(),
                        })?;
                    if r.is_negative() || r > Rational::one() {
                        return Err(GameError::RewardOutOfRange {
                            state: self.states[s].clone(),
                            a: actions1[s][a].clone(),
                            b: actions2[s][b].clone(),
                            reward: r.to_string(),
                        });
                    }
                    if !r.is_zero() && !r.is_one() {
                        boolean = false;
                    }
                    max_reward = Some(match max_reward {
                        Some(m) => m.max(r.clone()),
                        None => r.clone(),
                    });
                    for (_, p) in &entries {
                        delta_min = Some(match delta_min.take() {
                            Some(m) => m.min(p.clone()),
                            None => p.clone(),
                        });
                    }
                    delta_size += entries.len() as u64;
                    dcol.push(Distribution::from_sorted(entries));
                    rcol.push(r);
                }
                drow.push(dcol);
                rrow.push(rcol);
            }
            delta.push(drow);
            reward.push(rrow);
        }
        Ok(GameStructure {
            name: self.name,
            states: self.states,
            state_index: self.state_index,
            actions1,
            actions2,
            delta,
            reward,
            max_reward: max_reward.expect("at least one transition"),
            boolean,
            delta_min: delta_min.expect("at least one transition entry"),
            delta_size,
        })
    }
}

/// A deterministic mean-payoff game graph: every node belongs to one player,
/// every node has at least one outgoing edge, edges carry nonnegative integer
/// rewards.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dmpg {
    name: String,
    nodes: Vec<String>,
    node_index: HashMap<String, usize>,
    owner: Vec<Player>,
    edges: Vec<DmpgEdge>,
    out_edges: Vec<Vec<usize>>,
    max_reward: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DmpgEdge {
    pub src: usize,
    pub dst: usize,
    pub reward: u64,
}

impl Dmpg {
    pub fn new(
        name: &str,
        nodes: &[(&str, Player)],
        edges: &[(&str, &str, u64)],
    ) -> Result<Self, GameError> {
        let mut names = Vec::with_capacity(nodes.len());
        let mut index = HashMap::new();
        let mut owner = Vec::with_capacity(nodes.len());
        for (n, o) in nodes {
            check_token("node", n)?;
            if index.contains_key(*n) {
                return Err(GameError::DuplicateState(n.to_string()));
            }
            index.insert(n.to_string(), names.len());
            names.push(n.to_string());
            owner.push(*o);
        }
        if names.is_empty() {
            return Err(GameError::NoStates);
        }
        let mut edge_list = Vec::with_capacity(edges.len());
        let mut out_edges = vec![Vec::new(); names.len()];
        let mut max_reward = 0u64;
        for (src, dst, r) in edges {
            let s = *index.get(*src).ok_or_else(|| GameError::UnknownState(src.to_string()))?;
            let d = *index.get(*dst).ok_or_else(|| GameError::UnknownState(dst.to_string()))?;
            out_edges[s].push(edge_list.len());
            edge_list.push(DmpgEdge { src: s, dst: d, reward: *r });
            max_reward = max_reward.max(*r);
        }
        for (i, outs) in out_edges.iter().enumerate() {
            if outs.is_empty() {
                return Err(GameError::NoOutgoingEdge(names[i].clone()));
            }
        }
        Ok(Dmpg {
            name: name.to_string(),
            nodes: names,
            node_index: index,
            owner,
            edges: edge_list,
            out_edges,
            max_reward,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn node_name(&self, i: usize) -> &str {
        &self.nodes[i]
    }

    pub fn node_id(&self, name: &str) -> Option<usize> {
        self.node_index.get(name).copied()
    }

    pub fn owner(&self, i: usize) -> Player {
        self.owner[i]
    }

    pub fn edges(&self) -> &[DmpgEdge] {
        &self.edges
    }

    pub fn out_edges(&self, node: usize) -> &[usize] {
        &self.out_edges[node]
    }

    /// Maximal edge reward `M`.
    pub fn max_reward(&self) -> u64 {
        self.max_reward
    }

    pub fn to_dmpg_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "dmpg {}", self.name);
        for (i, n) in self.nodes.iter().enumerate() {
            let _ = writeln!(out, "node {} owner={}", n, self.owner[i].index());
        }
        for e in &self.edges {
            let _ = writeln!(out, "edge {} {} r={}", self.nodes[e.src], self.nodes[e.dst], e.reward);
        }
        out
    }
}

/// Strips a trailing comment and splits a line into tokens.
fn tokens(line: &str) -> Vec<&str> {
    let body = match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    };
    body.split_whitespace().collect()
}

/// Parses the game text format:
///
/// ```text
/// game NAME
/// state SID
/// actions1 SID A1 A2 ...
/// actions2 SID B1 B2 ...
/// trans SID A B r=R -> T1:P1 T2:P2 ...
/// ```
///
/// `#` starts a comment; rationals are `p/q` or integers.
pub fn parse_game(text: &str) -> Result<GameStructure, ParseError> {
    let mut builder: Option<GameBuilder> = None;
    let mut last_line = 0usize;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        last_line = line_no;
        let toks = tokens(raw);
        if toks.is_empty() {
            continue;
        }
        let wrap = |e: GameError| ParseError::new(line_no, e.to_string());
        match toks[0] {
            "game" => {
                if builder.is_some() {
                    return Err(ParseError::new(line_no, "duplicate game header"));
                }
                if toks.len() != 2 {
                    return Err(ParseError::new(line_no, "expected: game NAME"));
                }
                builder = Some(GameBuilder::new(toks[1]));
            }
            "state" => {
                let b = builder.as_mut().ok_or_else(|| ParseError::new(line_no, "missing game header"))?;
                if toks.len() != 2 {
                    return Err(ParseError::new(line_no, "expected: state SID"));
                }
                b.state(toks[1]).map_err(wrap)?;
            }
            "actions1" | "actions2" => {
                let b = builder.as_mut().ok_or_else(|| ParseError::new(line_no, "missing game header"))?;
                if toks.len() < 3 {
                    return Err(ParseError::new(line_no, format!("expected: {} SID A1 ...", toks[0])));
                }
                let player = if toks[0] == "actions1" { Player::One } else { Player::Two };
                b.actions(player, toks[1], &toks[2..]).map_err(wrap)?;
            }
            "trans" => {
                let b = builder.as_mut().ok_or_else(|| ParseError::new(line_no, "missing game header"))?;
                if toks.len() < 6 {
                    return Err(ParseError::new(
                        line_no,
                        "expected: trans SID A B r=R -> T1:P1 ...",
                    ));
                }
                let r_tok = toks[4];
                let reward = r_tok
                    .strip_prefix("r=")
                    .ok_or_else(|| ParseError::new(line_no, format!("expected r=R, got '{r_tok}'")))
                    .and_then(|v| {
                        parse_rational(v).map_err(|e| ParseError::new(line_no, e))
                    })?;
                if toks[5] != "->" {
                    return Err(ParseError::new(line_no, format!("expected '->', got '{}'", toks[5])));
                }
                if toks.len() == 6 {
                    return Err(ParseError::new(line_no, "empty distribution"));
                }
                let mut targets: Vec<(&str, Rational)> = Vec::new();
                for pair in &toks[6..] {
                    let (t, p) = pair
                        .split_once(':')
                        .ok_or_else(|| ParseError::new(line_no, format!("expected T:P, got '{pair}'")))?;
                    let prob = parse_rational(p).map_err(|e| ParseError::new(line_no, e))?;
                    targets.push((t, prob));
                }
                b.trans(toks[1], toks[2], toks[3], reward, &targets).map_err(wrap)?;
            }
            other => {
                return Err(ParseError::new(line_no, format!("unknown directive '{other}'")));
            }
        }
    }
    let b = builder.ok_or_else(|| ParseError::new(last_line.max(1), "missing game header"))?;
    b.build().map_err(|e| ParseError::new(last_line.max(1), e.to_string()))
}

/// Parses the DMPG text format:
///
/// ```text
/// dmpg NAME
/// node SID owner=1|2
/// edge SID TID r=INT
/// ```
pub fn parse_dmpg(text: &str) -> Result<Dmpg, ParseError> {
    let mut name: Option<String> = None;
    let mut nodes: Vec<(String, Player)> = Vec::new();
    let mut edges: Vec<(String, String, u64)> = Vec::new();
    let mut last_line = 0usize;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        last_line = line_no;
        let toks = tokens(raw);
        if toks.is_empty() {
            continue;
        }
        match toks[0] {
            "dmpg" => {
                if name.is_some() {
                    return Err(ParseError::new(line_no, "duplicate dmpg header"));
                }
                if toks.len() != 2 {
                    return Err(ParseError::new(line_no, "expected: dmpg NAME"));
                }
                name = Some(toks[1].to_string());
            }
            "node" => {
                if name.is_none() {
                    return Err(ParseError::new(line_no, "missing dmpg header"));
                }
                if toks.len() != 3 {
                    return Err(ParseError::new(line_no, "expected: node SID owner=1|2"));
                }
                let owner = match toks[2] {
                    "owner=1" => Player::One,
                    "owner=2" => Player::Two,
                    other => {
                        return Err(ParseError::new(line_no, format!("expected owner=1|2, got '{other}'")))
                    }
                };
                nodes.push((toks[1].to_string(), owner));
            }
            "edge" => {
                if name.is_none() {
                    return Err(ParseError::new(line_no, "missing dmpg header"));
                }
                if toks.len() != 4 {
                    return Err(ParseError::new(line_no, "expected: edge SID TID r=INT"));
                }
                let r = toks[3]
                    .strip_prefix("r=")
                    .ok_or_else(|| ParseError::new(line_no, format!("expected r=INT, got '{}'", toks[3])))?;
                let reward: u64 = r.parse().map_err(|_| {
                    ParseError::new(line_no, format!("edge reward '{r}' is not a nonnegative integer"))
                })?;
                edges.push((toks[1].to_string(), toks[2].to_string(), reward));
            }
            other => {
                return Err(ParseError::new(line_no, format!("unknown directive '{other}'")));
            }
        }
    }
    let name = name.ok_or_else(|| ParseError::new(last_line.max(1), "missing dmpg header"))?;
    let node_refs: Vec<(&str, Player)> = nodes.iter().map(|(n, o)| (n.as_str(), *o)).collect();
    let edge_refs: Vec<(&str, &str, u64)> =
        edges.iter().map(|(s, d, r)| (s.as_str(), d.as_str(), *r)).collect();
    Dmpg::new(&name, &node_refs, &edge_refs).map_err(|e| ParseError::new(last_line.max(1), e.to_string()))
}
