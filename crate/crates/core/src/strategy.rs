//! Strategy representations: stationary, round-indexed (Markov), and
//! finite-memory, with their text formats.
//!
//! A stationary strategy stores, per state, a distribution over that state's
//! own actions; only positive weights are stored and they sum to exactly 1.
//! A round-indexed strategy is a sequence of stationary strategies played over
//! consecutive round ranges (rounds are 1-based), carrying a construction tag
//! so that segments beyond the materialized prefix can be re-derived lazily by
//! the synthesis module. A finite-memory strategy is a deterministic-update
//! automaton whose move function may randomize.
//!
//! Parsing is always relative to a game: files refer to states and actions by
//! name, and every distribution is validated on the way in.

use crate::error::{GameError, ParseError};
use crate::game::{ActionId, GameStructure, Player, StateId};
use crate::rational::{parse_rational, Rational};
use num::{One, Signed, Zero};
use std::collections::BTreeSet;
use std::fmt::Write as _;

/// One per-state probability row: positive weights over action ids, sorted by
/// action id, summing to 1.
pub type ActionRow = Vec<(ActionId, Rational)>;

fn validate_row(
    game: &GameStructure,
    player: Player,
    s: StateId,
    row: &ActionRow,
) -> Result<(), GameError> {
    let state = game.state_name(s).to_string();
    if row.is_empty() {
        return Err(GameError::StrategyMissingState(state));
    }
    let count = game.action_count(player, s);
    let mut seen = BTreeSet::new();
    let mut sum = Rational::zero();
    for (a, p) in row {
        if *a >= count {
            return Err(GameError::StrategyInvalid {
                state,
                msg: format!("action id {a} out of range"),
            });
        }
        if !seen.insert(*a) {
            return Err(GameError::StrategyInvalid {
                state,
                msg: format!("duplicate action '{}'", game.action_name(player, s, *a)),
            });
        }
        if !p.is_positive() {
            return Err(GameError::StrategyInvalid {
                state,
                msg: format!(
                    "weight {p} on action '{}' is not positive",
                    game.action_name(player, s, *a)
                ),
            });
        }
        sum += p;
    }
    if !sum.is_one() {
        return Err(GameError::StrategyInvalid { state, msg: format!("weights sum to {sum}") });
    }
    if !row.windows(2).all(|w| w[0].0 < w[1].0) {
        return Err(GameError::StrategyInvalid { state, msg: "row not sorted".into() });
    }
    Ok(())
}

/// A stationary (memoryless) strategy for one player.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StationaryStrategy {
    player: Player,
    rows: Vec<ActionRow>,
}

impl StationaryStrategy {
    /// Validates one row per state against the game.
    pub fn new(
        game: &GameStructure,
        player: Player,
        rows: Vec<ActionRow>,
    ) -> Result<Self, GameError> {
        if rows.len() != game.n() {
            return Err(GameError::StrategyInvalid {
                state: String::new(),
                msg: format!("expected {} state rows, got {}", game.n(), rows.len()),
            });
        }
        for (s, row) in rows.iter().enumerate() {
            validate_row(game, player, s, row)?;
        }
        Ok(StationaryStrategy { player, rows })
    }

    /// Uniform over the player's full action set at every state.
    pub fn uniform(game: &GameStructure, player: Player) -> Self {
        let rows = game
            .state_ids()
            .map(|s| {
                let k = game.action_count(player, s);
                let w = Rational::new(1.into(), (k as i64).into());
                (0..k).map(|a| (a, w.clone())).collect()
            })
            .collect();
        StationaryStrategy { player, rows }
    }

    /// Uniform over a per-state subset of actions; every subset must be
    /// nonempty and within range.
    pub fn uniform_over(
        game: &GameStructure,
        player: Player,
        allowed: &[Vec<ActionId>],
    ) -> Result<Self, GameError> {
        let mut rows = Vec::with_capacity(game.n());
        for s in game.state_ids() {
            let set = allowed.get(s).ok_or_else(|| {
                GameError::StrategyMissingState(game.state_name(s).to_string())
            })?;
            if set.is_empty() {
                return Err(GameError::StrategyInvalid {
                    state: game.state_name(s).to_string(),
                    msg: "empty action subset".into(),
                });
            }
            let w = Rational::new(1.into(), (set.len() as i64).into());
            let mut row: ActionRow = set.iter().map(|&a| (a, w.clone())).collect();
            row.sort_by_key(|(a, _)| *a);
            rows.push(row);
        }
        StationaryStrategy::new(game, player, rows)
    }

    pub fn player(&self) -> Player {
        self.player
    }

    pub fn row(&self, s: StateId) -> &[(ActionId, Rational)] {
        &self.rows[s]
    }

    pub fn probability(&self, s: StateId, a: ActionId) -> Rational {
        match self.rows[s].binary_search_by_key(&a, |(x, _)| *x) {
            Ok(i) => self.rows[s][i].1.clone(),
            Err(_) => Rational::zero(),
        }
    }

    pub fn support(&self, s: StateId) -> impl Iterator<Item = ActionId> + '_ {
        self.rows[s].iter().map(|(a, _)| *a)
    }

    /// Inverse of the minimum positive weight over all states.
    pub fn patience(&self) -> Rational {
        let mut min: Option<Rational> = None;
        for row in &self.rows {
            for (_, p) in row {
                min = Some(match min.take() {
                    Some(m) => m.min(p.clone()),
                    None => p.clone(),
                });
            }
        }
        min.expect("nonempty strategy").recip()
    }

    /// Quick structural compatibility check against a game (row count and
    /// action ranges); full validation happens in [`StationaryStrategy::new`].
    pub fn fits(&self, game: &GameStructure) -> bool {
        self.rows.len() == game.n()
            && self
                .rows
                .iter()
                .enumerate()
                .all(|(s, row)| row.iter().all(|(a, _)| *a < game.action_count(self.player, s)))
    }

    fn body_text(&self, game: &GameStructure, out: &mut String) {
        for s in game.state_ids() {
            let row = self.rows[s]
                .iter()
                .map(|(a, p)| format!("{}={}", game.action_name(self.player, s, *a), p))
                .collect::<Vec<_>>()
                .join(" ");
            let _ = writeln!(out, "at {}: {}", game.state_name(s), row);
        }
    }

    pub fn to_text(&self, game: &GameStructure) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "stationary player={}", self.player.index());
        self.body_text(game, &mut out);
        out
    }
}

/// Length of a segment in rounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SegmentLength {
    Finite(u64),
    /// The segment repeats forever.
    Rest,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoundSegment {
    pub length: SegmentLength,
    pub strategy: StationaryStrategy,
}

/// Which synthesis construction produced a round-indexed strategy; enough to
/// re-derive segments past the materialized prefix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConstructionTag {
    /// Segments play the eps-graded stationary strategy for eps halving from
    /// 1/4, each for a certified horizon; `horizon_cap` bounds the horizon
    /// search.
    EpsHalvingAlmostSure { horizon_cap: u64 },
    /// The complement construction with per-round mixture coin `eps/2^round`.
    SpoilerMarkov { eps: Rational },
    /// Positive-winning construction, non-good weight halving from 1/4.
    PositiveMarkov,
    /// No generating rule; only the materialized segments exist.
    Explicit,
}

impl ConstructionTag {
    fn kind_str(&self) -> &'static str {
        match self {
            ConstructionTag::EpsHalvingAlmostSure { .. } => "eps-halving",
            ConstructionTag::SpoilerMarkov { .. } => "spoiler",
            ConstructionTag::PositiveMarkov => "positive",
            ConstructionTag::Explicit => "explicit",
        }
    }
}

/// A Markov strategy: the stationary strategy used in round `t` (1-based)
/// depends only on `t`, given by consecutive segments.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoundIndexedStrategy {
    player: Player,
    tag: ConstructionTag,
    segments: Vec<RoundSegment>,
}

impl RoundIndexedStrategy {
    pub fn new(player: Player, tag: ConstructionTag, segments: Vec<RoundSegment>) -> Self {
        debug_assert!(segments
            .iter()
            .rev()
            .skip(1)
            .all(|seg| matches!(seg.length, SegmentLength::Finite(_))));
        RoundIndexedStrategy { player, tag, segments }
    }

    pub fn player(&self) -> Player {
        self.player
    }

    pub fn tag(&self) -> &ConstructionTag {
        &self.tag
    }

    pub fn segments(&self) -> &[RoundSegment] {
        &self.segments
    }

    pub fn push_segment(&mut self, segment: RoundSegment) {
        debug_assert!(self
            .segments
            .last()
            .map_or(true, |last| matches!(last.length, SegmentLength::Finite(_))));
        self.segments.push(segment);
    }

    /// Highest round covered by materialized segments; `None` means every
    /// round is covered (a rest segment exists).
    pub fn materialized_rounds(&self) -> Option<u64> {
        let mut total = 0u64;
        for seg in &self.segments {
            match seg.length {
                SegmentLength::Finite(k) => total = total.saturating_add(k),
                SegmentLength::Rest => return None,
            }
        }
        Some(total)
    }

    /// The stationary strategy for 1-based `round`, if materialized.
    pub fn strategy_at_round(&self, round: u64) -> Option<&StationaryStrategy> {
        assert!(round >= 1, "rounds are 1-based");
        let mut start = 1u64;
        for seg in &self.segments {
            match seg.length {
                SegmentLength::Finite(k) => {
                    if round < start + k {
                        return Some(&seg.strategy);
                    }
                    start += k;
                }
                SegmentLength::Rest => return Some(&seg.strategy),
            }
        }
        None
    }

    /// Time-dependent memory required for the first `t` rounds: a Markov
    /// strategy needs a round counter, so exactly `t`.
    pub fn time_dependent_memory(&self, t: u64) -> u64 {
        t
    }

    pub fn to_text(&self, game: &GameStructure) -> String {
        let mut out = String::new();
        let _ = write!(out, "markov player={} kind={}", self.player.index(), self.tag.kind_str());
        match &self.tag {
            ConstructionTag::EpsHalvingAlmostSure { horizon_cap } => {
                let _ = write!(out, " param=cap:{horizon_cap}");
            }
            ConstructionTag::SpoilerMarkov { eps } => {
                let _ = write!(out, " param=eps:{eps}");
            }
            ConstructionTag::PositiveMarkov | ConstructionTag::Explicit => {}
        }
        out.push('\n');
        let mut start = 1u64;
        for seg in &self.segments {
            match seg.length {
                SegmentLength::Finite(k) => {
                    let _ = writeln!(out, "segment {}..{}:", start, start + k - 1);
                    start += k;
                }
                SegmentLength::Rest => {
                    let _ = writeln!(out, "segment {start}..rest:");
                }
            }
            seg.strategy.body_text(game, &mut out);
        }
        out
    }
}

/// A finite-memory strategy: deterministic memory update on both players'
/// moves, randomized move choice per (state, memory).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteMemoryStrategy {
    player: Player,
    mem_names: Vec<String>,
    initial: usize,
    /// `moves[mem][state]` is a distribution over the player's actions.
    moves: Vec<Vec<ActionRow>>,
    /// `update[mem][state][a][b]` is the next memory.
    update: Vec<Vec<Vec<Vec<usize>>>>,
}

impl FiniteMemoryStrategy {
    pub fn new(
        game: &GameStructure,
        player: Player,
        mem_names: Vec<String>,
        initial: usize,
        moves: Vec<Vec<ActionRow>>,
        update: Vec<Vec<Vec<Vec<usize>>>>,
    ) -> Result<Self, GameError> {
        let mm = mem_names.len();
        if mm == 0 || initial >= mm {
            return Err(GameError::StrategyInvalid {
                state: String::new(),
                msg: "initial memory out of range".into(),
            });
        }
        let mut seen = BTreeSet::new();
        for name in &mem_names {
            if !seen.insert(name.clone()) {
                return Err(GameError::StrategyInvalid {
                    state: String::new(),
                    msg: format!("duplicate memory state '{name}'"),
                });
            }
        }
        if moves.len() != mm || update.len() != mm {
            return Err(GameError::StrategyInvalid {
                state: String::new(),
                msg: "move/update tables must cover every memory state".into(),
            });
        }
        for m in 0..mm {
            if moves[m].len() != game.n() || update[m].len() != game.n() {
                return Err(GameError::StrategyInvalid {
                    state: String::new(),
                    msg: format!("tables for memory '{}' must cover every state", mem_names[m]),
                });
            }
            for s in game.state_ids() {
                validate_row(game, player, s, &moves[m][s])?;
                let k1 = game.action_count(Player::One, s);
                let k2 = game.action_count(Player::Two, s);
                if update[m][s].len() != k1 || update[m][s].iter().any(|row| row.len() != k2) {
                    return Err(GameError::StrategyInvalid {
                        state: game.state_name(s).to_string(),
                        msg: format!("update table for memory '{}' is not total", mem_names[m]),
                    });
                }
                for row in &update[m][s] {
                    for &next in row {
                        if next >= mm {
                            return Err(GameError::StrategyInvalid {
                                state: game.state_name(s).to_string(),
                                msg: "update target out of range".into(),
                            });
                        }
                    }
                }
            }
        }
        Ok(FiniteMemoryStrategy { player, mem_names, initial, moves, update })
    }

    pub fn player(&self) -> Player {
        self.player
    }

    pub fn mem_count(&self) -> usize {
        self.mem_names.len()
    }

    pub fn mem_name(&self, m: usize) -> &str {
        &self.mem_names[m]
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn move_row(&self, mem: usize, s: StateId) -> &[(ActionId, Rational)] {
        &self.moves[mem][s]
    }

    pub fn next_mem(&self, mem: usize, s: StateId, a: ActionId, b: ActionId) -> usize {
        self.update[mem][s][a][b]
    }

    /// Quick structural compatibility check against a game (table shapes and
    /// action ranges); full validation happens in [`FiniteMemoryStrategy::new`].
    pub fn fits(&self, game: &GameStructure) -> bool {
        self.moves.iter().zip(&self.update).all(|(moves, update)| {
            moves.len() == game.n()
                && update.len() == game.n()
                && game.state_ids().all(|s| {
                    moves[s].iter().all(|(a, _)| *a < game.action_count(self.player, s))
                        && update[s].len() == game.action_count(Player::One, s)
                        && update[s]
                            .iter()
                            .all(|row| row.len() == game.action_count(Player::Two, s))
                })
        })
    }

    /// Memory states reachable from the initial one in at most `steps`
    /// updates, under any sequence of (state, action pair) observations.
    fn reachable_mems_within(&self, steps: u64) -> usize {
        let mm = self.mem_names.len();
        let mut seen = vec![false; mm];
        seen[self.initial] = true;
        let mut frontier = vec![self.initial];
        let mut count = 1usize;
        let mut depth = 0u64;
        while depth < steps && !frontier.is_empty() && count < mm {
            let mut next = Vec::new();
            for &m in &frontier {
                for per_state in &self.update[m] {
                    for row in per_state {
                        for &t in row {
                            if !seen[t] {
                                seen[t] = true;
                                count += 1;
                                next.push(t);
                            }
                        }
                    }
                }
            }
            frontier = next;
            depth += 1;
        }
        count
    }

    /// Time-dependent memory for the first `t` rounds: the number of memory
    /// states reachable within `t - 1` updates, capped by the automaton size.
    pub fn time_dependent_memory(&self, t: u64) -> u64 {
        if t == 0 {
            return 0;
        }
        self.reachable_mems_within(t - 1) as u64
    }

    pub fn to_text(&self, game: &GameStructure) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "finite-memory player={} initial={}",
            self.player.index(),
            self.mem_names[self.initial]
        );
        let _ = writeln!(out, "mem {}", self.mem_names.join(" "));
        for (m, name) in self.mem_names.iter().enumerate() {
            for s in game.state_ids() {
                let row = self.moves[m][s]
                    .iter()
                    .map(|(a, p)| format!("{}={}", game.action_name(self.player, s, *a), p))
                    .collect::<Vec<_>>()
                    .join(" ");
                let _ = writeln!(out, "move {} {}: {}", name, game.state_name(s), row);
            }
        }
        for (m, name) in self.mem_names.iter().enumerate() {
            for s in game.state_ids() {
                for a in 0..game.action_count(Player::One, s) {
                    for b in 0..game.action_count(Player::Two, s) {
                        let _ = writeln!(
                            out,
                            "update {} {} {} {} -> {}",
                            name,
                            game.state_name(s),
                            game.action_name(Player::One, s, a),
                            game.action_name(Player::Two, s, b),
                            self.mem_names[self.update[m][s][a][b]]
                        );
                    }
                }
            }
        }
        out
    }
}

/// Any strategy file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Strategy {
    Stationary(StationaryStrategy),
    RoundIndexed(RoundIndexedStrategy),
    FiniteMemory(FiniteMemoryStrategy),
}

impl Strategy {
    pub fn player(&self) -> Player {
        match self {
            Strategy::Stationary(s) => s.player(),
            Strategy::RoundIndexed(s) => s.player(),
            Strategy::FiniteMemory(s) => s.player(),
        }
    }

    pub fn to_text(&self, game: &GameStructure) -> String {
        match self {
            Strategy::Stationary(s) => s.to_text(game),
            Strategy::RoundIndexed(s) => s.to_text(game),
            Strategy::FiniteMemory(s) => s.to_text(game),
        }
    }
}

fn tokens(line: &str) -> Vec<&str> {
    let body = match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    };
    body.split_whitespace().collect()
}

fn parse_player(tok: &str, line: usize) -> Result<Player, ParseError> {
    match tok {
        "player=1" => Ok(Player::One),
        "player=2" => Ok(Player::Two),
        other => Err(ParseError::new(line, format!("expected player=1|2, got '{other}'"))),
    }
}

/// Parses `A=p/q` pairs into a sorted validated action row. Zero weights are
/// accepted and dropped; the remaining weights must be positive and sum to 1.
fn parse_action_row(
    game: &GameStructure,
    player: Player,
    s: StateId,
    pairs: &[&str],
    line: usize,
) -> Result<ActionRow, ParseError> {
    let mut row: ActionRow = Vec::with_capacity(pairs.len());
    for pair in pairs {
        let (name, val) = pair
            .split_once('=')
            .ok_or_else(|| ParseError::new(line, format!("expected ACTION=PROB, got '{pair}'")))?;
        let a = game.action_id(player, s, name).ok_or_else(|| {
            ParseError::new(
                line,
                format!(
                    "unknown action '{}' for player {} at state '{}'",
                    name,
                    player.index(),
                    game.state_name(s)
                ),
            )
        })?;
        let p = parse_rational(val).map_err(|e| ParseError::new(line, e))?;
        if p.is_zero() {
            continue;
        }
        row.push((a, p));
    }
    row.sort_by_key(|(a, _)| *a);
    validate_row(game, player, s, &row).map_err(|e| ParseError::new(line, e.to_string()))?;
    Ok(row)
}

/// Splits an `at SID: ...` or `move MEM SID: ...` state token that carries a
/// trailing colon.
fn strip_colon<'a>(tok: &'a str, line: usize) -> Result<&'a str, ParseError> {
    tok.strip_suffix(':')
        .ok_or_else(|| ParseError::new(line, format!("expected '{tok}:' with a trailing colon")))
}

struct AtLine<'a> {
    state: StateId,
    pairs: Vec<&'a str>,
    line: usize,
}

fn parse_at_line<'a>(
    game: &GameStructure,
    toks: &[&'a str],
    line: usize,
) -> Result<AtLine<'a>, ParseError> {
    if toks.len() < 3 {
        return Err(ParseError::new(line, "expected: at SID: A=p/q ..."));
    }
    let name = strip_colon(toks[1], line)?;
    let state = game
        .state_id(name)
        .ok_or_else(|| ParseError::new(line, format!("unknown state '{name}'")))?;
    Ok(AtLine { state, pairs: toks[2..].to_vec(), line })
}

/// Collects a block of `at` rows into one stationary strategy body; every
/// state must appear exactly once.
fn rows_from_at_lines(
    game: &GameStructure,
    player: Player,
    lines: &[AtLine<'_>],
    block_line: usize,
) -> Result<Vec<ActionRow>, ParseError> {
    let mut rows: Vec<Option<ActionRow>> = vec![None; game.n()];
    for at in lines {
        if rows[at.state].is_some() {
            return Err(ParseError::new(
                at.line,
                format!("duplicate row for state '{}'", game.state_name(at.state)),
            ));
        }
        rows[at.state] = Some(parse_action_row(game, player, at.state, &at.pairs, at.line)?);
    }
    let mut out = Vec::with_capacity(game.n());
    for (s, row) in rows.into_iter().enumerate() {
        match row {
            Some(r) => out.push(r),
            None => {
                return Err(ParseError::new(
                    block_line,
                    format!("missing row for state '{}'", game.state_name(s)),
                ))
            }
        }
    }
    Ok(out)
}

fn parse_stationary_body(
    game: &GameStructure,
    player: Player,
    body: &[(usize, Vec<&str>)],
    header_line: usize,
) -> Result<StationaryStrategy, ParseError> {
    let mut at_lines = Vec::new();
    for (line_no, toks) in body {
        if toks[0] != "at" {
            return Err(ParseError::new(*line_no, format!("unexpected directive '{}'", toks[0])));
        }
        at_lines.push(parse_at_line(game, toks, *line_no)?);
    }
    let rows = rows_from_at_lines(game, player, &at_lines, header_line)?;
    StationaryStrategy::new(game, player, rows)
        .map_err(|e| ParseError::new(header_line, e.to_string()))
}

fn parse_markov(
    game: &GameStructure,
    header: &[&str],
    header_line: usize,
    body: &[(usize, Vec<&str>)],
) -> Result<RoundIndexedStrategy, ParseError> {
    if header.len() < 3 {
        return Err(ParseError::new(header_line, "expected: markov player=1|2 kind=<tag> [param=...]"));
    }
    let player = parse_player(header[1], header_line)?;
    let kind = header[2]
        .strip_prefix("kind=")
        .ok_or_else(|| ParseError::new(header_line, format!("expected kind=<tag>, got '{}'", header[2])))?;
    let param = match header.get(3) {
        Some(tok) => Some(tok.strip_prefix("param=").ok_or_else(|| {
            ParseError::new(header_line, format!("expected param=<...>, got '{tok}'"))
        })?),
        None => None,
    };
    let tag = match (kind, param) {
        ("eps-halving", Some(p)) => {
            let cap = p
                .strip_prefix("cap:")
                .and_then(|v| v.parse::<u64>().ok())
                .ok_or_else(|| ParseError::new(header_line, format!("expected param=cap:N, got '{p}'")))?;
            ConstructionTag::EpsHalvingAlmostSure { horizon_cap: cap }
        }
        ("spoiler", Some(p)) => {
            let eps = p
                .strip_prefix("eps:")
                .ok_or_else(|| ParseError::new(header_line, format!("expected param=eps:R, got '{p}'")))
                .and_then(|v| parse_rational(v).map_err(|e| ParseError::new(header_line, e)))?;
            ConstructionTag::SpoilerMarkov { eps }
        }
        ("positive", None) => ConstructionTag::PositiveMarkov,
        ("explicit", None) => ConstructionTag::Explicit,
        (k, _) => {
            return Err(ParseError::new(
                header_line,
                format!("unknown or mis-parameterized markov kind '{k}'"),
            ))
        }
    };

    // Split the body into segment blocks.
    let mut segments: Vec<RoundSegment> = Vec::new();
    let mut i = 0usize;
    let mut next_start = 1u64;
    let mut saw_rest = false;
    while i < body.len() {
        let (line_no, toks) = &body[i];
        if toks[0] != "segment" {
            return Err(ParseError::new(*line_no, format!("expected 'segment', got '{}'", toks[0])));
        }
        if saw_rest {
            return Err(ParseError::new(*line_no, "no segment may follow a rest segment"));
        }
        if toks.len() != 2 {
            return Err(ParseError::new(*line_no, "expected: segment L..U: or segment L..rest:"));
        }
        let range = strip_colon(toks[1], *line_no)?;
        let (lo, hi) = range
            .split_once("..")
            .ok_or_else(|| ParseError::new(*line_no, format!("expected L..U, got '{range}'")))?;
        let lo: u64 = lo
            .parse()
            .map_err(|_| ParseError::new(*line_no, format!("bad round number '{lo}'")))?;
        if lo != next_start {
            return Err(ParseError::new(
                *line_no,
                format!("segment must start at round {next_start}, starts at {lo}"),
            ));
        }
        let length = if hi == "rest" {
            saw_rest = true;
            SegmentLength::Rest
        } else {
            let hi: u64 = hi
                .parse()
                .map_err(|_| ParseError::new(*line_no, format!("bad round number '{hi}'")))?;
            if hi < lo {
                return Err(ParseError::new(*line_no, format!("empty round range {lo}..{hi}")));
            }
            next_start = hi + 1;
            SegmentLength::Finite(hi - lo + 1)
        };
        i += 1;
        let block_start = i;
        while i < body.len() && body[i].1[0] != "segment" {
            i += 1;
        }
        let strategy = parse_stationary_body(game, player, &body[block_start..i], *line_no)?;
        segments.push(RoundSegment { length, strategy });
    }
    if segments.is_empty() {
        return Err(ParseError::new(header_line, "markov strategy has no segments"));
    }
    Ok(RoundIndexedStrategy::new(player, tag, segments))
}

fn parse_finite_memory(
    game: &GameStructure,
    header: &[&str],
    header_line: usize,
    body: &[(usize, Vec<&str>)],
) -> Result<FiniteMemoryStrategy, ParseError> {
    if header.len() != 3 {
        return Err(ParseError::new(header_line, "expected: finite-memory player=1|2 initial=MEM"));
    }
    let player = parse_player(header[1], header_line)?;
    let initial_name = header[2]
        .strip_prefix("initial=")
        .ok_or_else(|| ParseError::new(header_line, format!("expected initial=MEM, got '{}'", header[2])))?;

    let mut mem_names: Option<(usize, Vec<String>)> = None;
    let mut move_lines: Vec<(usize, Vec<&str>)> = Vec::new();
    let mut update_lines: Vec<(usize, Vec<&str>)> = Vec::new();
    for (line_no, toks) in body {
        match toks[0] {
            "mem" => {
                if mem_names.is_some() {
                    return Err(ParseError::new(*line_no, "duplicate mem line"));
                }
                if toks.len() < 2 {
                    return Err(ParseError::new(*line_no, "expected: mem M0 M1 ..."));
                }
                mem_names = Some((*line_no, toks[1..].iter().map(|s| s.to_string()).collect()));
            }
            "move" => move_lines.push((*line_no, toks.clone())),
            "update" => update_lines.push((*line_no, toks.clone())),
            other => {
                return Err(ParseError::new(*line_no, format!("unexpected directive '{other}'")))
            }
        }
    }
    let (mem_line, mem_names) =
        mem_names.ok_or_else(|| ParseError::new(header_line, "missing mem line"))?;
    let mem_id = |name: &str, line: usize| -> Result<usize, ParseError> {
        mem_names
            .iter()
            .position(|m| m == name)
            .ok_or_else(|| ParseError::new(line, format!("unknown memory state '{name}'")))
    };
    let initial = mem_id(initial_name, header_line)?;
    let mm = mem_names.len();

    let mut moves: Vec<Vec<Option<ActionRow>>> = vec![vec![None; game.n()]; mm];
    for (line_no, toks) in &move_lines {
        if toks.len() < 4 {
            return Err(ParseError::new(*line_no, "expected: move MEM SID: A=p/q ..."));
        }
        let m = mem_id(toks[1], *line_no)?;
        let sname = strip_colon(toks[2], *line_no)?;
        let s = game
            .state_id(sname)
            .ok_or_else(|| ParseError::new(*line_no, format!("unknown state '{sname}'")))?;
        if moves[m][s].is_some() {
            return Err(ParseError::new(
                *line_no,
                format!("duplicate move row for ({}, {sname})", mem_names[m]),
            ));
        }
        moves[m][s] = Some(parse_action_row(game, player, s, &toks[3..], *line_no)?);
    }
    let mut update: Vec<Vec<Vec<Vec<Option<usize>>>>> = (0..mm)
        .map(|_| {
            game.state_ids()
                .map(|s| {
                    vec![
                        vec![None; game.action_count(Player::Two, s)];
                        game.action_count(Player::One, s)
                    ]
                })
                .collect()
        })
        .collect();
    for (line_no, toks) in &update_lines {
        if toks.len() != 7 || toks[5] != "->" {
            return Err(ParseError::new(*line_no, "expected: update MEM SID A B -> MEM'"));
        }
        let m = mem_id(toks[1], *line_no)?;
        let s = game
            .state_id(toks[2])
            .ok_or_else(|| ParseError::new(*line_no, format!("unknown state '{}'", toks[2])))?;
        let a = game.action_id(Player::One, s, toks[3]).ok_or_else(|| {
            ParseError::new(*line_no, format!("unknown action '{}' for player 1", toks[3]))
        })?;
        let b = game.action_id(Player::Two, s, toks[4]).ok_or_else(|| {
            ParseError::new(*line_no, format!("unknown action '{}' for player 2", toks[4]))
        })?;
        let target = mem_id(toks[6], *line_no)?;
        if update[m][s][a][b].is_some() {
            return Err(ParseError::new(
                *line_no,
                format!("duplicate update for ({}, {}, {}, {})", mem_names[m], toks[2], toks[3], toks[4]),
            ));
        }
        update[m][s][a][b] = Some(target);
    }

    let mut moves_out = Vec::with_capacity(mm);
    let mut update_out = Vec::with_capacity(mm);
    for m in 0..mm {
        let mut mrow = Vec::with_capacity(game.n());
        let mut urow = Vec::with_capacity(game.n());
        for s in game.state_ids() {
            let row = moves[m][s].take().ok_or_else(|| {
                ParseError::new(
                    mem_line,
                    format!("missing move row for ({}, {})", mem_names[m], game.state_name(s)),
                )
            })?;
            mrow.push(row);
            let mut a_rows = Vec::with_capacity(game.action_count(Player::One, s));
            for a in 0..game.action_count(Player::One, s) {
                let mut b_rows = Vec::with_capacity(game.action_count(Player::Two, s));
                for b in 0..game.action_count(Player::Two, s) {
                    let next = update[m][s][a][b].take().ok_or_else(|| {
                        ParseError::new(
                            mem_line,
                            format!(
                                "missing update for ({}, {}, {}, {})",
                                mem_names[m],
                                game.state_name(s),
                                game.action_name(Player::One, s, a),
                                game.action_name(Player::Two, s, b)
                            ),
                        )
                    })?;
                    b_rows.push(next);
                }
                a_rows.push(b_rows);
            }
            urow.push(a_rows);
        }
        moves_out.push(mrow);
        update_out.push(urow);
    }
    FiniteMemoryStrategy::new(game, player, mem_names, initial, moves_out, update_out)
        .map_err(|e| ParseError::new(header_line, e.to_string()))
}

/// Parses any strategy file against a game, dispatching on the header.
pub fn parse_strategy(text: &str, game: &GameStructure) -> Result<Strategy, ParseError> {
    let mut lines: Vec<(usize, Vec<&str>)> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let toks = tokens(raw);
        if !toks.is_empty() {
            lines.push((idx + 1, toks));
        }
    }
    let Some((header_line, header)) = lines.first().cloned() else {
        return Err(ParseError::new(1, "empty strategy file"));
    };
    let body = &lines[1..];
    match header[0] {
        "stationary" => {
            if header.len() != 2 {
                return Err(ParseError::new(header_line, "expected: stationary player=1|2"));
            }
            let player = parse_player(header[1], header_line)?;
            parse_stationary_body(game, player, body, header_line).map(Strategy::Stationary)
        }
        "markov" => parse_markov(game, &header, header_line, body).map(Strategy::RoundIndexed),
        "finite-memory" => {
            parse_finite_memory(game, &header, header_line, body).map(Strategy::FiniteMemory)
        }
        other => Err(ParseError::new(header_line, format!("unknown strategy header '{other}'"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{gen_gbar, gen_gn};
    use crate::rational::{rat, rat_int};

    fn halving(game: &GameStructure, s_weights: &[(&str, &[(&str, Rational)])]) -> StationaryStrategy {
        let mut rows: Vec<ActionRow> = vec![Vec::new(); game.n()];
        for (state, pairs) in s_weights {
            let s = game.state_id(state).unwrap();
            for (a, p) in pairs.iter() {
                let id = game.action_id(Player::One, s, a).unwrap();
                rows[s].push((id, p.clone()));
            }
            rows[s].sort_by_key(|(a, _)| *a);
        }
        StationaryStrategy::new(game, Player::One, rows).unwrap()
    }

    #[test]
    fn stationary_validation_and_patience() {
        let g = gen_gn(1);
        let sigma = halving(
            &g,
            &[("v0", &[("a", rat_int(1))]), ("v1", &[("a1", rat(1, 4)), ("a2", rat(3, 4))])],
        );
        assert_eq!(sigma.patience(), rat_int(4));
        assert_eq!(sigma.probability(g.state_id("v1").unwrap(), 0), rat(1, 4));
        assert_eq!(sigma.probability(g.state_id("v1").unwrap(), 1), rat(3, 4));

        let uni = StationaryStrategy::uniform(&g, Player::Two);
        assert_eq!(uni.patience(), rat_int(2));
        let positional = StationaryStrategy::uniform_over(
            &g,
            Player::One,
            &[vec![0], vec![1]],
        )
        .unwrap();
        assert_eq!(positional.patience(), rat_int(1));

        // Bad rows.
        let err = StationaryStrategy::new(&g, Player::One, vec![vec![(0, rat_int(1))]]);
        assert!(err.is_err());
        let err = StationaryStrategy::new(
            &g,
            Player::One,
            vec![vec![(0, rat_int(1))], vec![(0, rat(1, 2)), (1, rat(1, 3))]],
        )
        .unwrap_err();
        assert!(err.to_string().contains("sum to 5/6"));
        let err = StationaryStrategy::new(
            &g,
            Player::One,
            vec![vec![(0, rat_int(1))], vec![(2, rat_int(1))]],
        )
        .unwrap_err();
        assert!(err.to_string().contains("out of range"));
    }

    #[test]
    fn stationary_text_round_trip() {
        let g = gen_gbar();
        let sigma = halving(
            &g,
            &[
                ("v0", &[("a", rat_int(1))]),
                ("v1", &[("a", rat_int(1))]),
                ("v", &[("a1", rat(1, 8)), ("a2", rat(7, 8))]),
            ],
        );
        let text = sigma.to_text(&g);
        let parsed = parse_strategy(&text, &g).unwrap();
        assert_eq!(parsed, Strategy::Stationary(sigma));
    }

    #[test]
    fn stationary_parse_rejections() {
        let g = gen_gn(1);
        let bad = "stationary player=1\nat v0: a=1\nat v1: a1=1/2 a2=1/3\n";
        let err = parse_strategy(bad, &g).unwrap_err();
        assert!(err.to_string().contains("sum to 5/6"), "got {err}");
        let bad = "stationary player=1\nat v0: a=1\n";
        let err = parse_strategy(bad, &g).unwrap_err();
        assert!(err.to_string().contains("missing row for state 'v1'"));
        let bad = "stationary player=1\nat v0: a=1\nat v0: a=1\nat v1: a1=1\n";
        let err = parse_strategy(bad, &g).unwrap_err();
        assert!(err.to_string().contains("duplicate row"));
        let bad = "stationary player=1\nat v0: a=1\nat v1: zz=1\n";
        let err = parse_strategy(bad, &g).unwrap_err();
        assert!(err.to_string().contains("unknown action 'zz'"));
        // Explicit zero weights are dropped, then the rest must sum to 1.
        let ok = "stationary player=1\nat v0: a=1\nat v1: a1=0 a2=1\n";
        let parsed = parse_strategy(ok, &g).unwrap();
        if let Strategy::Stationary(s) = parsed {
            assert_eq!(s.row(g.state_id("v1").unwrap()), &[(1, rat_int(1))]);
        } else {
            panic!("expected stationary");
        }
    }

    #[test]
    fn markov_segments_and_round_lookup() {
        let g = gen_gn(1);
        let seg = |e_num: i64, e_den: i64| {
            halving(
                &g,
                &[
                    ("v0", &[("a", rat_int(1))]),
                    ("v1", &[("a1", rat(e_num, e_den)), ("a2", rat(e_den - e_num, e_den))]),
                ],
            )
        };
        let sigma = RoundIndexedStrategy::new(
            Player::One,
            ConstructionTag::EpsHalvingAlmostSure { horizon_cap: 1000 },
            vec![
                RoundSegment { length: SegmentLength::Finite(3), strategy: seg(1, 4) },
                RoundSegment { length: SegmentLength::Finite(5), strategy: seg(1, 8) },
            ],
        );
        assert_eq!(sigma.materialized_rounds(), Some(8));
        assert_eq!(sigma.strategy_at_round(1), Some(&seg(1, 4)));
        assert_eq!(sigma.strategy_at_round(3), Some(&seg(1, 4)));
        assert_eq!(sigma.strategy_at_round(4), Some(&seg(1, 8)));
        assert_eq!(sigma.strategy_at_round(8), Some(&seg(1, 8)));
        assert_eq!(sigma.strategy_at_round(9), None);
        assert_eq!(sigma.time_dependent_memory(17), 17);

        let text = sigma.to_text(&g);
        assert!(text.contains("segment 1..3:"));
        assert!(text.contains("segment 4..8:"));
        let parsed = parse_strategy(&text, &g).unwrap();
        assert_eq!(parsed, Strategy::RoundIndexed(sigma));
    }

    #[test]
    fn markov_rest_segment_round_trip() {
        let g = gen_gn(1);
        let base = halving(
            &g,
            &[("v0", &[("a", rat_int(1))]), ("v1", &[("a1", rat(1, 2)), ("a2", rat(1, 2))])],
        );
        let sigma = RoundIndexedStrategy::new(
            Player::One,
            ConstructionTag::Explicit,
            vec![RoundSegment { length: SegmentLength::Rest, strategy: base.clone() }],
        );
        assert_eq!(sigma.materialized_rounds(), None);
        assert_eq!(sigma.strategy_at_round(1_000_000), Some(&base));
        let text = sigma.to_text(&g);
        assert!(text.contains("segment 1..rest:"));
        let parsed = parse_strategy(&text, &g).unwrap();
        assert_eq!(parsed, Strategy::RoundIndexed(sigma));
    }

    #[test]
    fn markov_parse_rejections() {
        let g = gen_gn(1);
        let body = "at v0: a=1\nat v1: a1=1\n";
        let bad = format!("markov player=1 kind=explicit\nsegment 2..4:\n{body}");
        let err = parse_strategy(&bad, &g).unwrap_err();
        assert!(err.to_string().contains("must start at round 1"));
        let bad = format!(
            "markov player=1 kind=explicit\nsegment 1..2:\n{body}segment 4..5:\n{body}"
        );
        let err = parse_strategy(&bad, &g).unwrap_err();
        assert!(err.to_string().contains("must start at round 3"));
        let bad = format!(
            "markov player=1 kind=explicit\nsegment 1..rest:\n{body}segment 2..3:\n{body}"
        );
        let err = parse_strategy(&bad, &g).unwrap_err();
        assert!(err.to_string().contains("follow a rest segment"));
        let bad = format!("markov player=1 kind=eps-halving\nsegment 1..2:\n{body}");
        let err = parse_strategy(&bad, &g).unwrap_err();
        assert!(err.to_string().contains("mis-parameterized"));
        let ok = format!("markov player=1 kind=spoiler param=eps:1/2\nsegment 1..rest:\n{body}");
        // Wrong player for these action names: player=1 actions used, fine.
        assert!(parse_strategy(&ok, &g).is_ok());
    }

    #[test]
    fn finite_memory_round_trip_and_theta() {
        let g = gen_gn(1);
        // Two memory states: start in m0 playing a mix, switch to m1 (pure a2)
        // forever once any a2,b2 round is seen at v1.
        let v0 = g.state_id("v0").unwrap();
        let v1 = g.state_id("v1").unwrap();
        assert_eq!((v0, v1), (0, 1));
        let mk_row = |w1: Rational, w2: Rational| -> ActionRow {
            let mut row = Vec::new();
            if !w1.is_zero() {
                row.push((0, w1));
            }
            if !w2.is_zero() {
                row.push((1, w2));
            }
            row
        };
        let moves = vec![
            vec![vec![(0, rat_int(1))], mk_row(rat(1, 2), rat(1, 2))],
            vec![vec![(0, rat_int(1))], mk_row(rat_int(0), rat_int(1))],
        ];
        // update[m][s][a][b]
        let update = vec![
            vec![vec![vec![0]], vec![vec![0, 0], vec![0, 1]]],
            vec![vec![vec![1]], vec![vec![1, 1], vec![1, 1]]],
        ];
        let fm = FiniteMemoryStrategy::new(
            &g,
            Player::One,
            vec!["m0".into(), "m1".into()],
            0,
            moves,
            update,
        )
        .unwrap();
        assert_eq!(fm.time_dependent_memory(1), 1);
        assert_eq!(fm.time_dependent_memory(2), 2);
        assert_eq!(fm.time_dependent_memory(100), 2);
        assert_eq!(fm.next_mem(0, v1, 1, 1), 1);
        assert_eq!(fm.next_mem(0, v1, 1, 0), 0);

        let text = fm.to_text(&g);
        let parsed = parse_strategy(&text, &g).unwrap();
        assert_eq!(parsed, Strategy::FiniteMemory(fm));
    }

    #[test]
    fn finite_memory_parse_rejects_partial_tables() {
        let g = gen_gn(1);
        let text = "finite-memory player=1 initial=m0\nmem m0\nmove m0 v0: a=1\nmove m0 v1: a1=1\nupdate m0 v0 a b -> m0\nupdate m0 v1 a1 b1 -> m0\nupdate m0 v1 a1 b2 -> m0\nupdate m0 v1 a2 b1 -> m0\n";
        let err = parse_strategy(text, &g).unwrap_err();
        assert!(err.to_string().contains("missing update"), "got {err}");
        let text = "finite-memory player=1 initial=mX\nmem m0\n";
        let err = parse_strategy(text, &g).unwrap_err();
        assert!(err.to_string().contains("unknown memory state 'mX'"));
    }
}
