//! Command-line front end: batch solving, synthesis, verification,
//! generation, reduction, simulation, and counter benchmarking.
//!
//! Every command returns a [`CommandResult`] holding the exit code and the
//! full stdout payload. Exit codes: 0 success, 1 a checked claim failed (or
//! there is nothing to synthesize), 2 input or usage error, 3 internal
//! inconsistency. Outputs are canonically sorted and, benchmark timing
//! columns aside, byte-identical for identical inputs and seeds.

use clap::{Parser, Subcommand, ValueEnum};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use crate::error::{SynthError, VerifyError};
use crate::game::{parse_dmpg, parse_game, GameStructure, StateSet};
use crate::generators::{gen_gbar, gen_gm, gen_gn, gen_pennies, gen_random, RandomGameParams};
use crate::rational::Rational;
use crate::reduction::{dmpg_value_bruteforce, reduce_dmpg};
use crate::solver::{almost_set_improved, almost_set_naive, positive_set, SolveReport};
use crate::strategy::{parse_strategy, RoundIndexedStrategy, StationaryStrategy, Strategy};
use crate::synthesis::{
    spoiler_gap, synth_eps_stationary, synth_markov_almost, synth_positive_markov,
    synth_positive_spoiler_stationary, synth_spoiler_markov,
};
use crate::verify::{simulate, verify_eps_claim, verify_spoiler_stationary};

/// Horizon cap handed to the round-indexed almost-sure synthesis; keeps the
/// certifying value iteration tractable on batch inputs.
pub const CLI_HORIZON_CAP: u64 = 4096;

/// Outcome of one command: process exit code plus the stdout payload.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommandResult {
    pub exit_code: i32,
    pub output: String,
}

fn ok(output: String) -> CommandResult {
    CommandResult { exit_code: 0, output }
}

fn fail(exit_code: i32, msg: impl std::fmt::Display) -> CommandResult {
    CommandResult { exit_code, output: format!("{}\n", msg) }
}

#[derive(Parser)]
#[command(name = "cmpg", version, about = "Qualitative solver toolkit for concurrent stochastic mean-payoff games")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ObjectiveArg {
    Almost,
    Positive,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum AlgoArg {
    Naive,
    Improved,
    Both,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum KindArg {
    EpsStationary,
    MarkovAs,
    SpoilerMarkov,
    PositiveMarkov,
    SpoilerStationary,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ClaimArg {
    EpsAs,
    SpoilerPos,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FamilyArg {
    Gn,
    Gbar,
    Gm,
    Pennies,
    PenniesVariant,
    Random,
}

#[derive(Subcommand)]
enum Command {
    /// Compute a qualitative winning set and its level structure.
    Solve {
        file: PathBuf,
        #[arg(long, value_enum)]
        objective: ObjectiveArg,
        #[arg(long, value_enum, default_value = "improved")]
        algo: AlgoArg,
    },
    /// Synthesize a witness strategy and write it to a file.
    Synth {
        file: PathBuf,
        #[arg(long, value_enum)]
        kind: KindArg,
        #[arg(long, default_value = "1/4")]
        eps: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Check a strategy file against a claimed guarantee.
    Verify {
        file: PathBuf,
        #[arg(long)]
        strategy: PathBuf,
        #[arg(long, value_enum)]
        claim: ClaimArg,
        #[arg(long)]
        param: String,
    },
    /// Print a generated game in the parseable text format.
    Gen {
        #[arg(long, value_enum)]
        family: FamilyArg,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Reduce a deterministic mean-payoff game to a concurrent game file
    /// plus a gadget-map sidecar.
    Reduce { file: PathBuf },
    /// Brute-force deterministic mean-payoff value of one node.
    DmpgValue {
        file: PathBuf,
        #[arg(long)]
        state: String,
    },
    /// Play two strategy files against each other and report reward
    /// statistics.
    Simulate {
        file: PathBuf,
        strategy1: PathBuf,
        strategy2: PathBuf,
        #[arg(long)]
        start: String,
        #[arg(long)]
        steps: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Time and count both almost-sure solvers over random games.
    Bench {
        #[arg(long, value_delimiter = ',', required = true)]
        sizes: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_value = "0")]
        seeds: Vec<u64>,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
}

/// Parses the argument list (including the program name) and runs the
/// selected command.
pub fn run<I>(args: I) -> CommandResult
where
    I: IntoIterator<Item = String>,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            return CommandResult { exit_code: e.exit_code(), output: e.render().to_string() }
        }
    };
    match cli.command {
        Command::Solve { file, objective, algo } => cmd_solve(&file, objective, algo),
        Command::Synth { file, kind, eps, out } => cmd_synth(&file, kind, &eps, &out),
        Command::Verify { file, strategy, claim, param } => {
            cmd_verify(&file, &strategy, claim, &param)
        }
        Command::Gen { family, n, m, seed } => cmd_gen(family, n, m, seed),
        Command::Reduce { file } => cmd_reduce(&file),
        Command::DmpgValue { file, state } => cmd_dmpg_value(&file, &state),
        Command::Simulate { file, strategy1, strategy2, start, steps, seed } => {
            cmd_simulate(&file, &strategy1, &strategy2, &start, steps, seed)
        }
        Command::Bench { sizes, seeds, jobs } => cmd_bench(&sizes, &seeds, jobs),
    }
}

fn load_game(path: &Path) -> Result<GameStructure, CommandResult> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| fail(2, format!("{}: {}", path.display(), e)))?;
    parse_game(&text).map_err(|e| fail(2, format!("{}: {}", path.display(), e)))
}

fn parse_param(name: &str, text: &str) -> Result<Rational, CommandResult> {
    text.parse::<Rational>()
        .map_err(|e| fail(2, format!("{} '{}' is not a rational p/q: {}", name, text, e)))
}

fn render_set(game: &GameStructure, set: &StateSet) -> String {
    if set.is_empty() {
        "(none)".to_string()
    } else {
        game.render_state_set(set)
    }
}

fn counters_line(report: &SolveReport) -> String {
    let c = &report.counters;
    let process: u64 = c.process_calls.iter().sum();
    let remove: u64 = c.remove_calls.iter().map(|row| row.iter().sum::<u64>()).sum();
    format!(
        "counters: outer={} inner={} passes={} process={} remove={} work={}",
        c.outer_steps, c.inner_steps, c.passes, process, remove, c.work_units
    )
}

fn verify_error_result(e: VerifyError) -> CommandResult {
    let code = match e {
        VerifyError::InternalConsistency(_) | VerifyError::PolicyIterationDiverged(_) => 3,
        _ => 2,
    };
    fail(code, e)
}

fn synth_error_result(e: SynthError) -> CommandResult {
    let code = match e {
        SynthError::InternalConsistency(_) => 3,
        _ => 2,
    };
    fail(code, e)
}

fn cmd_solve(file: &Path, objective: ObjectiveArg, algo: AlgoArg) -> CommandResult {
    let game = match load_game(file) {
        Ok(g) => g,
        Err(r) => return r,
    };
    let solve_one = |a: AlgoArg| -> SolveReport {
        match (objective, a) {
            (ObjectiveArg::Almost, AlgoArg::Naive) => almost_set_naive(&game),
            (ObjectiveArg::Almost, _) => almost_set_improved(&game),
            // The positive set has a single realization; the algo flag only
            // labels the run.
            (ObjectiveArg::Positive, _) => positive_set(&game),
        }
    };
    let objective_name = match objective {
        ObjectiveArg::Almost => "almost",
        ObjectiveArg::Positive => "positive",
    };
    let mut out = String::new();
    match algo {
        AlgoArg::Naive | AlgoArg::Improved => {
            let label = if algo == AlgoArg::Naive { "naive" } else { "improved" };
            let report = solve_one(algo);
            let _ = writeln!(out, "game {} objective={} algo={}", game.name(), objective_name, label);
            let _ = writeln!(out, "winning: {}", render_set(&game, &report.winning));
            let _ = writeln!(out, "levels:");
            out.push_str(&report.to_text(&game));
            let _ = writeln!(out, "{}", counters_line(&report));
            ok(out)
        }
        AlgoArg::Both => {
            let naive = solve_one(AlgoArg::Naive);
            let improved = solve_one(AlgoArg::Improved);
            let _ = writeln!(out, "game {} objective={} algo=both", game.name(), objective_name);
            let _ = writeln!(out, "naive: {}", render_set(&game, &naive.winning));
            let _ = writeln!(out, "improved: {}", render_set(&game, &improved.winning));
            if naive.winning == improved.winning {
                let _ = writeln!(out, "agreement: identical");
                let _ = writeln!(out, "levels:");
                out.push_str(&improved.to_text(&game));
                let _ = writeln!(out, "{}", counters_line(&improved));
                ok(out)
            } else {
                let only_naive: StateSet =
                    naive.winning.difference(&improved.winning).copied().collect();
                let only_improved: StateSet =
                    improved.winning.difference(&naive.winning).copied().collect();
                let _ = writeln!(out, "DIFF:");
                let _ = writeln!(out, "only_naive: {}", render_set(&game, &only_naive));
                let _ = writeln!(out, "only_improved: {}", render_set(&game, &only_improved));
                CommandResult { exit_code: 3, output: out }
            }
        }
    }
}

fn write_strategy_file(
    out_path: &Path,
    text: &str,
) -> Result<(), CommandResult> {
    std::fs::write(out_path, text)
        .map_err(|e| fail(2, format!("{}: {}", out_path.display(), e)))
}

fn segment_count(sigma: &RoundIndexedStrategy) -> usize {
    sigma.segments().len()
}

fn cmd_synth(file: &Path, kind: KindArg, eps_text: &str, out_path: &Path) -> CommandResult {
    let game = match load_game(file) {
        Ok(g) => g,
        Err(r) => return r,
    };
    let mut out = String::new();
    let kind_name = match kind {
        KindArg::EpsStationary => "eps-stationary",
        KindArg::MarkovAs => "markov-as",
        KindArg::SpoilerMarkov => "spoiler-markov",
        KindArg::PositiveMarkov => "positive-markov",
        KindArg::SpoilerStationary => "spoiler-stationary",
    };
    let _ = writeln!(out, "game {} kind={}", game.name(), kind_name);
    match kind {
        KindArg::EpsStationary => {
            let eps = match parse_param("eps", eps_text) {
                Ok(e) => e,
                Err(r) => return r,
            };
            let report = almost_set_improved(&game);
            if report.winning.is_empty() {
                return fail(1, "almost-sure winning set is empty; nothing to synthesize");
            }
            let sigma = match synth_eps_stationary(&game, &report, &eps) {
                Ok(s) => s,
                Err(e) => return synth_error_result(e),
            };
            let _ = writeln!(out, "eps={}", eps);
            let _ = writeln!(out, "winning: {}", render_set(&game, &report.winning));
            let _ = writeln!(out, "patience: {}", sigma.patience());
            if let Err(r) = write_strategy_file(out_path, &sigma.to_text(&game)) {
                return r;
            }
        }
        KindArg::MarkovAs => {
            let report = almost_set_improved(&game);
            if report.winning.is_empty() {
                return fail(1, "almost-sure winning set is empty; nothing to synthesize");
            }
            let sigma = match synth_markov_almost(&game, &report, CLI_HORIZON_CAP) {
                Ok(s) => s,
                Err(e) => return synth_error_result(e),
            };
            let _ = writeln!(out, "winning: {}", render_set(&game, &report.winning));
            let _ = writeln!(out, "segments: {}", segment_count(&sigma));
            let _ = writeln!(out, "memory: time-dependent");
            if let Err(r) = write_strategy_file(out_path, &sigma.to_text(&game)) {
                return r;
            }
        }
        KindArg::SpoilerMarkov => {
            let eps = match parse_param("eps", eps_text) {
                Ok(e) => e,
                Err(r) => return r,
            };
            let report = almost_set_improved(&game);
            let complement: StateSet =
                game.all_states().difference(&report.winning).copied().collect();
            if complement.is_empty() {
                return fail(1, "complement of the almost-sure set is empty; nothing to spoil");
            }
            let sigma = match synth_spoiler_markov(&game, &report, &eps) {
                Ok(s) => s,
                Err(e) => return synth_error_result(e),
            };
            let _ = writeln!(out, "eps={}", eps);
            let _ = writeln!(out, "spoiling: {}", render_set(&game, &complement));
            let _ = writeln!(out, "segments: {}", segment_count(&sigma));
            if let Err(r) = write_strategy_file(out_path, &sigma.to_text(&game)) {
                return r;
            }
        }
        KindArg::PositiveMarkov => {
            let report = positive_set(&game);
            if report.winning.is_empty() {
                return fail(1, "positive winning set is empty; nothing to synthesize");
            }
            let sigma = match synth_positive_markov(&game, &report) {
                Ok(s) => s,
                Err(e) => return synth_error_result(e),
            };
            let _ = writeln!(out, "winning: {}", render_set(&game, &report.winning));
            let _ = writeln!(out, "segments: {}", segment_count(&sigma));
            let _ = writeln!(out, "memory: time-dependent");
            if let Err(r) = write_strategy_file(out_path, &sigma.to_text(&game)) {
                return r;
            }
        }
        KindArg::SpoilerStationary => {
            let report = positive_set(&game);
            let complement: StateSet =
                game.all_states().difference(&report.winning).copied().collect();
            if complement.is_empty() {
                return fail(1, "complement of the positive set is empty; nothing to spoil");
            }
            let sigma = match synth_positive_spoiler_stationary(&game, &report) {
                Ok(s) => s,
                Err(e) => return synth_error_result(e),
            };
            let _ = writeln!(out, "spoiling: {}", render_set(&game, &complement));
            let _ = writeln!(out, "patience: {}", sigma.patience());
            let _ = writeln!(out, "gap: {}", spoiler_gap(&game));
            if let Err(r) = write_strategy_file(out_path, &sigma.to_text(&game)) {
                return r;
            }
        }
    }
    let _ = writeln!(out, "wrote {}", out_path.display());
    ok(out)
}

fn load_stationary(
    path: &Path,
    game: &GameStructure,
) -> Result<StationaryStrategy, CommandResult> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| fail(2, format!("{}: {}", path.display(), e)))?;
    match parse_strategy(&text, game) {
        Ok(Strategy::Stationary(s)) => Ok(s),
        Ok(_) => Err(fail(2, "this claim checks a stationary strategy file")),
        Err(e) => Err(fail(2, format!("{}: {}", path.display(), e))),
    }
}

fn cmd_verify(file: &Path, strategy: &Path, claim: ClaimArg, param: &str) -> CommandResult {
    let game = match load_game(file) {
        Ok(g) => g,
        Err(r) => return r,
    };
    let value = match parse_param("param", param) {
        Ok(v) => v,
        Err(r) => return r,
    };
    let sigma = match load_stationary(strategy, &game) {
        Ok(s) => s,
        Err(r) => return r,
    };
    let (claim_name, report) = match claim {
        ClaimArg::EpsAs => {
            let solve = almost_set_improved(&game);
            match verify_eps_claim(&game, &sigma, &solve.winning, &value) {
                Ok(rep) => ("eps-as", rep),
                Err(e) => return verify_error_result(e),
            }
        }
        ClaimArg::SpoilerPos => {
            let solve = positive_set(&game);
            let complement: StateSet =
                game.all_states().difference(&solve.winning).copied().collect();
            match verify_spoiler_stationary(&game, &sigma, &complement, &value) {
                Ok(rep) => ("spoiler-pos", rep),
                Err(e) => return verify_error_result(e),
            }
        }
    };
    let mut out = String::new();
    let _ = writeln!(out, "game {} claim={} param={}", game.name(), claim_name, value);
    let _ = writeln!(out, "claim: {}", report.claim);
    out.push_str(&report.to_text());
    let passed = report.passed();
    let _ = writeln!(out, "result: {}", if passed { "PASS" } else { "FAIL" });
    CommandResult { exit_code: if passed { 0 } else { 1 }, output: out }
}

fn cmd_gen(family: FamilyArg, n: Option<usize>, m: Option<usize>, seed: u64) -> CommandResult {
    let game = match family {
        FamilyArg::Gn => {
            let n = n.unwrap_or(1);
            if n == 0 {
                return fail(2, "family gn needs --n at least 1");
            }
            gen_gn(n)
        }
        FamilyArg::Gbar => gen_gbar(),
        FamilyArg::Gm => {
            let m = m.unwrap_or(2);
            if m < 2 {
                return fail(2, "family gm needs --m at least 2");
            }
            gen_gm(m)
        }
        FamilyArg::Pennies => gen_pennies(false),
        FamilyArg::PenniesVariant => gen_pennies(true),
        FamilyArg::Random => {
            let mut params = RandomGameParams::default();
            if let Some(n) = n {
                if n == 0 {
                    return fail(2, "family random needs --n at least 1");
                }
                params.n = n;
            }
            if let Some(m) = m {
                if m == 0 {
                    return fail(2, "family random needs --m at least 1");
                }
                params.m_max = m;
            }
            params.seed = seed;
            gen_random(&params)
        }
    };
    ok(game.to_cmpg_text())
}

fn cmd_reduce(file: &Path) -> CommandResult {
    let text = match std::fs::read_to_string(file) {
        Ok(t) => t,
        Err(e) => return fail(2, format!("{}: {}", file.display(), e)),
    };
    let dmpg = match parse_dmpg(&text) {
        Ok(d) => d,
        Err(e) => return fail(2, format!("{}: {}", file.display(), e)),
    };
    let (game, map) = match reduce_dmpg(&dmpg) {
        Ok(pair) => pair,
        Err(e) => return fail(2, e),
    };
    let stem = file.with_extension("");
    let base = stem.to_string_lossy();
    let game_path = PathBuf::from(format!("{}_reduced.cmpg", base));
    let map_path = PathBuf::from(format!("{}_reduced.map", base));
    if let Err(e) = std::fs::write(&game_path, game.to_cmpg_text()) {
        return fail(2, format!("{}: {}", game_path.display(), e));
    }
    if let Err(e) = std::fs::write(&map_path, map.to_text(&game)) {
        return fail(2, format!("{}: {}", map_path.display(), e));
    }
    let mut out = String::new();
    let _ = writeln!(
        out,
        "reduced {}: nodes={} edges={} M={} states={}",
        dmpg.name(),
        dmpg.node_count(),
        dmpg.edges().len(),
        dmpg.max_reward(),
        game.n()
    );
    let _ = writeln!(out, "wrote {}", game_path.display());
    let _ = writeln!(out, "wrote {}", map_path.display());
    ok(out)
}

fn cmd_dmpg_value(file: &Path, state: &str) -> CommandResult {
    let text = match std::fs::read_to_string(file) {
        Ok(t) => t,
        Err(e) => return fail(2, format!("{}: {}", file.display(), e)),
    };
    let dmpg = match parse_dmpg(&text) {
        Ok(d) => d,
        Err(e) => return fail(2, format!("{}: {}", file.display(), e)),
    };
    match dmpg_value_bruteforce(&dmpg, state) {
        Ok(value) => ok(format!("{}\n", value)),
        Err(e) => fail(2, e),
    }
}

fn cmd_simulate(
    file: &Path,
    strategy1: &Path,
    strategy2: &Path,
    start: &str,
    steps: u64,
    seed: u64,
) -> CommandResult {
    let game = match load_game(file) {
        Ok(g) => g,
        Err(r) => return r,
    };
    if steps == 0 {
        return fail(2, "--steps must be at least 1");
    }
    let mut strategies = Vec::with_capacity(2);
    for path in [strategy1, strategy2] {
        let text = match std::fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) => return fail(2, format!("{}: {}", path.display(), e)),
        };
        match parse_strategy(&text, &game) {
            Ok(s) => strategies.push(s),
            Err(e) => return fail(2, format!("{}: {}", path.display(), e)),
        }
    }
    let sigma2 = strategies.pop().expect("two parsed strategies");
    let sigma1 = strategies.pop().expect("two parsed strategies");
    let stats = match simulate(&game, &sigma1, &sigma2, start, steps, seed) {
        Ok(s) => s,
        Err(e) => return fail(2, e),
    };
    let mut out = String::new();
    let _ = writeln!(out, "game {} start={} steps={} seed={}", game.name(), start, steps, seed);
    for (t, avg) in &stats.checkpoints {
        let _ = writeln!(out, "checkpoint t={} avg={}", t, avg);
    }
    let _ = writeln!(
        out,
        "final: state={} average={}",
        game.state_name(stats.final_state),
        stats.final_average
    );
    let _ = writeln!(out, "visits:");
    let mut names: Vec<usize> = game.state_ids().collect();
    names.sort_by(|&a, &b| game.state_name(a).cmp(game.state_name(b)));
    for s in names {
        let _ = writeln!(out, "{} {}", game.state_name(s), stats.visits[s]);
    }
    ok(out)
}

/// One benchmark row: generate, solve with both algorithms, report counter
/// totals and wall-clock times.
fn bench_row(n: usize, seed: u64) -> String {
    let params = RandomGameParams { n, seed, ..RandomGameParams::default() };
    let game = gen_random(&params);
    let t0 = Instant::now();
    let naive = almost_set_naive(&game);
    let naive_ms = t0.elapsed().as_millis();
    let t1 = Instant::now();
    let improved = almost_set_improved(&game);
    let improved_ms = t1.elapsed().as_millis();
    debug_assert_eq!(naive.winning, improved.winning);
    let process: u64 = improved.counters.process_calls.iter().sum();
    let remove: u64 =
        improved.counters.remove_calls.iter().map(|row| row.iter().sum::<u64>()).sum();
    format!(
        "n={} seed={} delta={} naive_ms={} improved_ms={} process={} remove={} work={}",
        n,
        seed,
        game.delta_size(),
        naive_ms,
        improved_ms,
        process,
        remove,
        improved.counters.work_units
    )
}

fn cmd_bench(sizes: &[usize], seeds: &[u64], jobs: usize) -> CommandResult {
    if sizes.iter().any(|&n| n == 0) {
        return fail(2, "--sizes entries must be at least 1");
    }
    let items: Vec<(usize, u64)> = sizes
        .iter()
        .flat_map(|&n| seeds.iter().map(move |&s| (n, s)))
        .collect();
    let mut rows: Vec<String> = Vec::with_capacity(items.len());
    if jobs <= 1 || items.len() <= 1 {
        for &(n, seed) in &items {
            rows.push(bench_row(n, seed));
        }
    } else {
        let workers = jobs.min(items.len());
        let mut indexed: Vec<(usize, String)> = std::thread::scope(|scope| {
            let mut handles = Vec::with_capacity(workers);
            for w in 0..workers {
                let items = &items;
                handles.push(scope.spawn(move || {
                    let mut part = Vec::new();
                    let mut i = w;
                    while i < items.len() {
                        let (n, seed) = items[i];
                        part.push((i, bench_row(n, seed)));
                        i += workers;
                    }
                    part
                }));
            }
            handles.into_iter().flat_map(|h| h.join().expect("bench worker")).collect()
        });
        indexed.sort_by_key(|(i, _)| *i);
        rows = indexed.into_iter().map(|(_, row)| row).collect();
    }
    let mut out = String::new();
    let _ = writeln!(out, "bench rows={} jobs={}", rows.len(), jobs);
    for row in rows {
        let _ = writeln!(out, "{}", row);
    }
    ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::Player;

    fn run_cli(args: &[&str]) -> CommandResult {
        let full: Vec<String> =
            std::iter::once("cmpg".to_string()).chain(args.iter().map(|s| s.to_string())).collect();
        run(full)
    }

    fn temp_dir(tag: &str) -> PathBuf {
        let dir = std::env::temp_dir().join(format!("cmpg-cli-{}-{}", std::process::id(), tag));
        std::fs::create_dir_all(&dir).expect("create temp dir");
        dir
    }

    fn write_temp(dir: &Path, name: &str, text: &str) -> PathBuf {
        let path = dir.join(name);
        std::fs::write(&path, text).expect("write temp file");
        path
    }

    #[test]
    fn solve_both_agrees_on_the_ladder() {
        let dir = temp_dir("solve-both");
        let game = write_temp(&dir, "g.cmpg", &gen_gn(3).to_cmpg_text());
        let result = run_cli(&[
            "solve",
            game.to_str().unwrap(),
            "--objective",
            "almost",
            "--algo",
            "both",
        ]);
        assert_eq!(result.exit_code, 0, "{}", result.output);
        assert!(result.output.contains("agreement: identical"));
        assert!(result.output.contains("naive: v0 v1 v2 v3"));
        assert!(result.output.contains("improved: v0 v1 v2 v3"));
        assert!(!result.output.contains("DIFF"));
    }

    #[test]
    fn solve_positive_reports_the_empty_set() {
        let dir = temp_dir("solve-positive");
        let game = write_temp(&dir, "g.cmpg", &gen_gm(2).to_cmpg_text());
        let result = run_cli(&["solve", game.to_str().unwrap(), "--objective", "positive"]);
        assert_eq!(result.exit_code, 0);
        assert!(result.output.contains("winning: (none)"));
    }

    #[test]
    fn solve_output_is_reproducible() {
        let dir = temp_dir("solve-repro");
        let params = RandomGameParams { n: 6, seed: 3, ..RandomGameParams::default() };
        let game = write_temp(&dir, "g.cmpg", &gen_random(&params).to_cmpg_text());
        let args = ["solve", game.to_str().unwrap(), "--objective", "almost", "--algo", "both"];
        let first = run_cli(&args);
        let second = run_cli(&args);
        assert_eq!(first, second);
    }

    #[test]
    fn malformed_game_files_exit_2_with_a_line_number() {
        let dir = temp_dir("malformed");
        let game = write_temp(&dir, "bad.cmpg", "game g\nstate s\nnonsense here\n");
        let result = run_cli(&["solve", game.to_str().unwrap(), "--objective", "almost"]);
        assert_eq!(result.exit_code, 2);
        assert!(result.output.contains("line 3"), "{}", result.output);
    }

    #[test]
    fn missing_files_exit_2() {
        let result = run_cli(&["solve", "/no/such/file.cmpg", "--objective", "almost"]);
        assert_eq!(result.exit_code, 2);
    }

    #[test]
    fn usage_errors_exit_2_and_help_exits_0() {
        let bad = run_cli(&["solve"]);
        assert_eq!(bad.exit_code, 2);
        let unknown = run_cli(&["frobnicate"]);
        assert_eq!(unknown.exit_code, 2);
        let help = run_cli(&["--help"]);
        assert_eq!(help.exit_code, 0);
        assert!(help.output.contains("solve"));
    }

    #[test]
    fn synth_then_verify_round_trip_passes() {
        let dir = temp_dir("synth-verify");
        let game = write_temp(&dir, "g.cmpg", &gen_gn(1).to_cmpg_text());
        let out = dir.join("sigma.strat");
        let synth = run_cli(&[
            "synth",
            game.to_str().unwrap(),
            "--kind",
            "eps-stationary",
            "--eps",
            "1/4",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(synth.exit_code, 0, "{}", synth.output);
        assert!(synth.output.contains("patience:"));
        assert!(out.exists());
        let verify = run_cli(&[
            "verify",
            game.to_str().unwrap(),
            "--strategy",
            out.to_str().unwrap(),
            "--claim",
            "eps-as",
            "--param",
            "1/4",
        ]);
        assert_eq!(verify.exit_code, 0, "{}", verify.output);
        assert!(verify.output.contains("result: PASS"));
    }

    #[test]
    fn verify_rejects_a_weak_strategy_with_exit_1() {
        let dir = temp_dir("verify-weak");
        let game_struct = gen_gn(1);
        let game = write_temp(&dir, "g.cmpg", &game_struct.to_cmpg_text());
        let uniform = StationaryStrategy::uniform(&game_struct, Player::One);
        let sigma = write_temp(&dir, "uniform.strat", &uniform.to_text(&game_struct));
        let result = run_cli(&[
            "verify",
            game.to_str().unwrap(),
            "--strategy",
            sigma.to_str().unwrap(),
            "--claim",
            "eps-as",
            "--param",
            "1/4",
        ]);
        assert_eq!(result.exit_code, 1, "{}", result.output);
        assert!(result.output.contains("result: FAIL"));
        assert!(result.output.contains("witness:"));
    }

    #[test]
    fn synth_exits_1_when_the_winning_set_is_empty() {
        let dir = temp_dir("synth-empty");
        let text = "game z\nstate s\nactions1 s a\nactions2 s b\ntrans s a b r=0 -> s:1\n";
        let game = write_temp(&dir, "z.cmpg", text);
        let out = dir.join("never.strat");
        let result = run_cli(&[
            "synth",
            game.to_str().unwrap(),
            "--kind",
            "eps-stationary",
            "--eps",
            "1/4",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(result.exit_code, 1, "{}", result.output);
        assert!(!out.exists());
    }

    #[test]
    fn spoiler_stationary_on_the_one_state_family() {
        let dir = temp_dir("spoiler");
        let game_struct = gen_gm(2);
        let game = write_temp(&dir, "g.cmpg", &game_struct.to_cmpg_text());
        let out = dir.join("spoiler.strat");
        let synth = run_cli(&[
            "synth",
            game.to_str().unwrap(),
            "--kind",
            "spoiler-stationary",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(synth.exit_code, 0, "{}", synth.output);
        assert!(synth.output.contains("patience: 2"));
        assert!(synth.output.contains("gap: 1/2"));
        let verify = run_cli(&[
            "verify",
            game.to_str().unwrap(),
            "--strategy",
            out.to_str().unwrap(),
            "--claim",
            "spoiler-pos",
            "--param",
            "1/2",
        ]);
        assert_eq!(verify.exit_code, 0, "{}", verify.output);
        assert!(verify.output.contains("result: PASS"));
    }

    #[test]
    fn spoiler_synthesis_exits_1_when_nothing_to_spoil() {
        let dir = temp_dir("spoiler-empty");
        let game = write_temp(&dir, "g.cmpg", &gen_pennies(true).to_cmpg_text());
        let out = dir.join("never.strat");
        let result = run_cli(&[
            "synth",
            game.to_str().unwrap(),
            "--kind",
            "spoiler-markov",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(result.exit_code, 1, "{}", result.output);
    }

    #[test]
    fn markov_synthesis_writes_a_parseable_round_indexed_file() {
        let dir = temp_dir("markov");
        let game_struct = gen_gn(1);
        let game = write_temp(&dir, "g.cmpg", &game_struct.to_cmpg_text());
        let out = dir.join("markov.strat");
        let result = run_cli(&[
            "synth",
            game.to_str().unwrap(),
            "--kind",
            "markov-as",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(result.exit_code, 0, "{}", result.output);
        assert!(result.output.contains("segments:"));
        assert!(result.output.contains("memory: time-dependent"));
        let text = std::fs::read_to_string(&out).unwrap();
        let parsed = parse_strategy(&text, &game_struct).unwrap();
        assert!(matches!(parsed, Strategy::RoundIndexed(_)));
    }

    #[test]
    fn gen_families_emit_parseable_games() {
        for args in [
            vec!["gen", "--family", "gn", "--n", "2"],
            vec!["gen", "--family", "gbar"],
            vec!["gen", "--family", "gm", "--m", "3"],
            vec!["gen", "--family", "pennies"],
            vec!["gen", "--family", "pennies-variant"],
            vec!["gen", "--family", "random", "--n", "5", "--m", "2", "--seed", "7"],
        ] {
            let result = run_cli(&args);
            assert_eq!(result.exit_code, 0, "{:?}", args);
            let game = parse_game(&result.output).expect("generated game parses");
            assert!(game.n() >= 1);
        }
    }

    #[test]
    fn gen_random_is_seed_deterministic() {
        let a = run_cli(&["gen", "--family", "random", "--n", "6", "--seed", "11"]);
        let b = run_cli(&["gen", "--family", "random", "--n", "6", "--seed", "11"]);
        let c = run_cli(&["gen", "--family", "random", "--n", "6", "--seed", "12"]);
        assert_eq!(a, b);
        assert_ne!(a.output, c.output);
    }

    #[test]
    fn dmpg_value_prints_the_cycle_mean() {
        let dir = temp_dir("dmpg-value");
        let text = "dmpg d\nnode u owner=1\nnode v owner=2\nedge u v r=1\nedge v u r=3\n";
        let file = write_temp(&dir, "d.dmpg", text);
        let result = run_cli(&["dmpg-value", file.to_str().unwrap(), "--state", "u"]);
        assert_eq!(result.exit_code, 0, "{}", result.output);
        assert_eq!(result.output, "2\n");
        let unknown = run_cli(&["dmpg-value", file.to_str().unwrap(), "--state", "w"]);
        assert_eq!(unknown.exit_code, 2);
    }

    #[test]
    fn reduce_writes_game_and_sidecar() {
        let dir = temp_dir("reduce");
        let text = "dmpg d\nnode u owner=1\nnode v owner=2\nedge u v r=1\nedge v u r=3\n";
        let file = write_temp(&dir, "d.dmpg", text);
        let result = run_cli(&["reduce", file.to_str().unwrap()]);
        assert_eq!(result.exit_code, 0, "{}", result.output);
        assert!(result.output.contains("nodes=2 edges=2 M=3 states=10"));
        let game_text = std::fs::read_to_string(dir.join("d_reduced.cmpg")).unwrap();
        let game = parse_game(&game_text).expect("reduced game parses");
        assert_eq!(game.n(), 10);
        let map_text = std::fs::read_to_string(dir.join("d_reduced.map")).unwrap();
        assert_eq!(map_text.lines().count(), 2);
        assert!(map_text.starts_with("edge 0 -> v1="));
    }

    #[test]
    fn reduce_rejects_zero_reward_inputs() {
        let dir = temp_dir("reduce-zero");
        let file = write_temp(&dir, "z.dmpg", "dmpg z\nnode u owner=1\nedge u u r=0\n");
        let result = run_cli(&["reduce", file.to_str().unwrap()]);
        assert_eq!(result.exit_code, 2);
    }

    #[test]
    fn simulate_is_seed_deterministic() {
        let dir = temp_dir("simulate");
        let game_struct = gen_gn(1);
        let game = write_temp(&dir, "g.cmpg", &game_struct.to_cmpg_text());
        let out = dir.join("sigma.strat");
        let synth = run_cli(&[
            "synth",
            game.to_str().unwrap(),
            "--kind",
            "eps-stationary",
            "--eps",
            "1/4",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(synth.exit_code, 0);
        let two = StationaryStrategy::uniform(&game_struct, Player::Two);
        let sigma2 = write_temp(&dir, "two.strat", &two.to_text(&game_struct));
        let args = [
            "simulate",
            game.to_str().unwrap(),
            out.to_str().unwrap(),
            sigma2.to_str().unwrap(),
            "--start",
            "v1",
            "--steps",
            "64",
            "--seed",
            "5",
        ];
        let first = run_cli(&args);
        assert_eq!(first.exit_code, 0, "{}", first.output);
        assert!(first.output.contains("checkpoint t=64"));
        assert!(first.output.contains("visits:"));
        let second = run_cli(&args);
        assert_eq!(first, second);
        let bad_start = run_cli(&[
            "simulate",
            game.to_str().unwrap(),
            out.to_str().unwrap(),
            sigma2.to_str().unwrap(),
            "--start",
            "nowhere",
            "--steps",
            "8",
        ]);
        assert_eq!(bad_start.exit_code, 2);
    }

    #[test]
    fn bench_emits_one_row_per_size_and_seed() {
        let result = run_cli(&["bench", "--sizes", "4,6", "--seeds", "0,1", "--jobs", "2"]);
        assert_eq!(result.exit_code, 0, "{}", result.output);
        let lines: Vec<&str> = result.output.lines().collect();
        assert_eq!(lines.len(), 5);
        assert!(lines[0].starts_with("bench rows=4"));
        assert!(lines[1].starts_with("n=4 seed=0 "));
        assert!(lines[2].starts_with("n=4 seed=1 "));
        assert!(lines[3].starts_with("n=6 seed=0 "));
        assert!(lines[4].starts_with("n=6 seed=1 "));
        for line in &lines[1..] {
            assert!(line.contains("process="));
            assert!(line.contains("remove="));
            assert!(line.contains("work="));
        }
    }
}
