//! Verdicts on synthesized stationary strategies, with exact values and
//! positional counter-strategy witnesses.

use std::fmt::Write as _;

use num::{One, Zero};

use crate::error::VerifyError;
use crate::game::{GameStructure, Player, StateSet};
use crate::rational::Rational;
use crate::strategy::StationaryStrategy;
use crate::verify::mdp::{fix_strategy, mdp_max_mean_payoff, mdp_min_mean_payoff, Mdp, MdpSolution};

/// One verified state: its exact adversarial value and whether the claim
/// holds there.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub state: String,
    pub value: Rational,
    pub pass: bool,
}

/// The outcome of checking one claim about a strategy, state by state.
#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    /// Short tag naming the claim and its threshold.
    pub claim: String,
    /// One row per state the claim quantifies over.
    pub rows: Vec<ReportRow>,
    /// Positional counter-strategy of the free player, attached when the
    /// claim fails somewhere: per state, the action achieving the
    /// adversarial value.
    pub witness: Option<Vec<(String, String)>>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|row| row.pass)
    }

    /// One line per state, sorted by name, followed by the witness block
    /// when one is attached.
    pub fn to_text(&self) -> String {
        let mut rows: Vec<&ReportRow> = self.rows.iter().collect();
        rows.sort_by(|x, y| x.state.cmp(&y.state));
        let mut out = String::new();
        for row in rows {
            let verdict = if row.pass { "yes" } else { "no" };
            let _ = writeln!(out, "{} value={} pass={}", row.state, row.value, verdict);
        }
        if let Some(witness) = &self.witness {
            let _ = writeln!(out, "witness:");
            for (state, action) in witness {
                let _ = writeln!(out, "at {state}: {action}");
            }
        }
        out
    }
}

fn witness_from(mdp: &Mdp, solution: &MdpSolution) -> Vec<(String, String)> {
    let mut rows: Vec<(String, String)> = (0..mdp.n())
        .map(|s| {
            (mdp.name(s).to_string(), mdp.action_name(s, solution.policy[s]).to_string())
        })
        .collect();
    rows.sort();
    rows
}

/// Checks the almost-sure guarantee of an eps-graded stationary strategy:
/// inside `xstar` the play never leaves `xstar` with positive probability,
/// and the free minimizer cannot push the limit average below `1 - eps`
/// anywhere in `xstar`. The minimizing positional policy is attached as a
/// witness when the check fails.
pub fn verify_eps_claim(
    game: &GameStructure,
    sigma: &StationaryStrategy,
    xstar: &StateSet,
    eps: &Rational,
) -> Result<VerificationReport, VerifyError> {
    if sigma.player() != Player::One {
        return Err(VerifyError::WrongPlayer);
    }
    if !(eps > &Rational::zero() && eps < &Rational::one()) {
        return Err(VerifyError::BadEps("0 < eps < 1".into()));
    }
    if !sigma.fits(game) {
        return Err(VerifyError::StrategyMismatch(
            "stationary rows do not match the game's states and actions".into(),
        ));
    }
    if let Some(&s) = xstar.iter().find(|&&s| s >= game.n()) {
        return Err(VerifyError::StrategyMismatch(format!(
            "claimed set contains out-of-range state {s}"
        )));
    }
    let mdp = fix_strategy(game, sigma)?;
    let min = mdp_min_mean_payoff(&mdp)?;
    let threshold = Rational::one() - eps;
    let mut rows = Vec::with_capacity(xstar.len());
    for &s in xstar {
        let safe = sigma.support(s).all(|a| {
            (0..game.action_count(Player::Two, s))
                .all(|b| game.delta(s, a, b).supported_in(xstar))
        });
        rows.push(ReportRow {
            state: game.state_name(s).to_string(),
            value: min.values[s].clone(),
            pass: safe && min.values[s] >= threshold,
        });
    }
    let report = VerificationReport {
        claim: format!("eps-almost-sure eps={eps}"),
        witness: None,
        rows,
    };
    Ok(if report.passed() {
        report
    } else {
        VerificationReport { witness: Some(witness_from(&mdp, &min)), ..report }
    })
}

/// Checks a stationary spoiler on the complement: under `sigma2`'s
/// support the play cannot leave `complement`, and the free maximizer
/// cannot push the limit average above `1 - c` anywhere in `complement`.
/// The maximizing positional policy is attached as a witness when the
/// check fails.
pub fn verify_spoiler_stationary(
    game: &GameStructure,
    sigma2: &StationaryStrategy,
    complement: &StateSet,
    c: &Rational,
) -> Result<VerificationReport, VerifyError> {
    if sigma2.player() != Player::Two {
        return Err(VerifyError::WrongPlayer);
    }
    if !(c > &Rational::zero() && c <= &Rational::one()) {
        return Err(VerifyError::BadEps("0 < c <= 1".into()));
    }
    if !sigma2.fits(game) {
        return Err(VerifyError::StrategyMismatch(
            "stationary rows do not match the game's states and actions".into(),
        ));
    }
    if let Some(&s) = complement.iter().find(|&&s| s >= game.n()) {
        return Err(VerifyError::StrategyMismatch(format!(
            "claimed set contains out-of-range state {s}"
        )));
    }
    let mdp = fix_strategy(game, sigma2)?;
    let max = mdp_max_mean_payoff(&mdp)?;
    let threshold = Rational::one() - c;
    let mut rows = Vec::with_capacity(complement.len());
    for &s in complement {
        let closed = (0..game.action_count(Player::One, s)).all(|a| {
            sigma2
                .support(s)
                .all(|b| game.delta(s, a, b).supported_in(complement))
        });
        rows.push(ReportRow {
            state: game.state_name(s).to_string(),
            value: max.values[s].clone(),
            pass: closed && max.values[s] <= threshold,
        });
    }
    let report = VerificationReport {
        claim: format!("spoiler-stationary c={c}"),
        witness: None,
        rows,
    };
    Ok(if report.passed() {
        report
    } else {
        VerificationReport { witness: Some(witness_from(&mdp, &max)), ..report }
    })
}
