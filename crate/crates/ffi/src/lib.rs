//! C ABI over the game toolkit: parse games, compute qualitative winning
//! sets, synthesize and check stationary witness strategies, and run the
//! deterministic mean-payoff reduction, all through opaque handles and
//! C strings.
//!
//! Conventions:
//! - every fallible call returns a [`CmpgStatus`]; results travel through
//!   out-pointers which are written only on `CMPG_STATUS_OK`;
//! - strings returned through out-pointers are heap-allocated and must be
//!   released with [`cmpg_string_free`]; `cmpg_version` returns a static
//!   string that must not be freed;
//! - on failure, [`cmpg_last_error`] returns a thread-local message valid
//!   until the next failing call on the same thread;
//! - panics never cross the boundary; they surface as
//!   `CMPG_STATUS_ERR_INTERNAL`.
//!
//! The generated header lives at `include/cmpg.h`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use cmpg::game::{parse_dmpg, parse_game, GameStructure};
use cmpg::solver::{almost_set_improved, almost_set_naive, positive_set, SolveReport};
use cmpg::strategy::Strategy;
use cmpg::synthesis::synth_eps_stationary;
use cmpg::verify::verify_eps_claim;
use cmpg::{reduce_dmpg, Rational, SynthError, VerifyError};

/// Status of a C API call.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum CmpgStatus {
    /// The call succeeded and all out-pointers are written.
    Ok = 0,
    /// A required pointer argument was null.
    ErrNull = 1,
    /// A text argument was not valid UTF-8.
    ErrUtf8 = 2,
    /// A text argument failed to parse; see `cmpg_last_error`.
    ErrParse = 3,
    /// Arguments violate a precondition (bad epsilon, wrong buffer length,
    /// unknown node, unsupported strategy shape); see `cmpg_last_error`.
    ErrInvalid = 4,
    /// The relevant winning set is empty; there is nothing to synthesize.
    ErrEmpty = 5,
    /// An internal inconsistency or panic; see `cmpg_last_error`.
    ErrInternal = 6,
}

/// Which qualitative winning set to compute.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum CmpgObjective {
    /// Almost-sure winning: the mean payoff hits the maximal reward with
    /// probability one.
    Almost = 0,
    /// Positive winning: the same event has positive probability.
    Positive = 1,
}

/// Opaque handle to a parsed, validated game.
pub struct CmpgGame {
    inner: GameStructure,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl std::fmt::Display) {
    let text = CString::new(msg.to_string().replace('\0', " "))
        .unwrap_or_else(|_| CString::default());
    LAST_ERROR.with(|slot| *slot.borrow_mut() = text);
}

/// Runs a fallible body, converting panics into `ErrInternal`.
fn guarded(body: impl FnOnce() -> CmpgStatus) -> CmpgStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => status,
        Err(_) => {
            set_error("internal panic");
            CmpgStatus::ErrInternal
        }
    }
}

/// Reads a required C string argument into UTF-8.
///
/// # Safety
/// `ptr` must be null or a valid NUL-terminated C string.
unsafe fn read_str<'a>(ptr: *const c_char) -> Result<&'a str, CmpgStatus> {
    if ptr.is_null() {
        set_error("null string argument");
        return Err(CmpgStatus::ErrNull);
    }
    CStr::from_ptr(ptr).to_str().map_err(|e| {
        set_error(format!("invalid UTF-8: {e}"));
        CmpgStatus::ErrUtf8
    })
}

fn give_string(out: *mut *mut c_char, text: String) -> CmpgStatus {
    let c = match CString::new(text) {
        Ok(c) => c,
        Err(e) => {
            set_error(format!("interior NUL in produced text: {e}"));
            return CmpgStatus::ErrInternal;
        }
    };
    unsafe { *out = c.into_raw() };
    CmpgStatus::Ok
}

fn synth_status(e: &SynthError) -> CmpgStatus {
    match e {
        SynthError::InternalConsistency(_) => CmpgStatus::ErrInternal,
        _ => CmpgStatus::ErrInvalid,
    }
}

fn verify_status(e: &VerifyError) -> CmpgStatus {
    match e {
        VerifyError::InternalConsistency(_) | VerifyError::PolicyIterationDiverged(_) => {
            CmpgStatus::ErrInternal
        }
        _ => CmpgStatus::ErrInvalid,
    }
}

fn solve_with(game: &GameStructure, objective: CmpgObjective, improved: bool) -> SolveReport {
    match objective {
        CmpgObjective::Almost if improved => almost_set_improved(game),
        CmpgObjective::Almost => almost_set_naive(game),
        CmpgObjective::Positive => positive_set(game),
    }
}

/// Returns the library version as a static string. Do not free it.
#[no_mangle]
pub extern "C" fn cmpg_version() -> *const c_char {
    static VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "\0");
    VERSION.as_ptr().cast()
}

/// Returns the thread-local message describing the most recent failure on
/// this thread, or an empty string. Valid until the next failing call on
/// the same thread; do not free it.
#[no_mangle]
pub extern "C" fn cmpg_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Frees a string returned through an out-pointer of this API.
///
/// # Safety
/// `s` must be null or a pointer previously written by this API through a
/// `char **` out-parameter, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cmpg_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a game from its text format into a fresh handle.
///
/// # Safety
/// `text` must be a valid NUL-terminated C string; `out_game` must be a
/// valid pointer. On `CMPG_STATUS_OK` the caller owns the handle and must
/// release it with [`cmpg_game_free`].
#[no_mangle]
pub unsafe extern "C" fn cmpg_game_parse(
    text: *const c_char,
    out_game: *mut *mut CmpgGame,
) -> CmpgStatus {
    guarded(|| {
        if out_game.is_null() {
            set_error("null out_game");
            return CmpgStatus::ErrNull;
        }
        let text = match read_str(text) {
            Ok(t) => t,
            Err(status) => return status,
        };
        match parse_game(text) {
            Ok(game) => {
                *out_game = Box::into_raw(Box::new(CmpgGame { inner: game }));
                CmpgStatus::Ok
            }
            Err(e) => {
                set_error(e);
                CmpgStatus::ErrParse
            }
        }
    })
}

/// Releases a game handle. Null is a no-op.
///
/// # Safety
/// `game` must be null or a handle from [`cmpg_game_parse`], not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cmpg_game_free(game: *mut CmpgGame) {
    if !game.is_null() {
        drop(Box::from_raw(game));
    }
}

/// Number of states of the game; 0 when the handle is null.
///
/// # Safety
/// `game` must be null or a live handle from [`cmpg_game_parse`].
#[no_mangle]
pub unsafe extern "C" fn cmpg_game_state_count(game: *const CmpgGame) -> usize {
    if game.is_null() {
        return 0;
    }
    (*game).inner.n()
}

/// Returns the game's name as a fresh string (free with
/// [`cmpg_string_free`]); null when the handle is null.
///
/// # Safety
/// `game` must be null or a live handle from [`cmpg_game_parse`].
#[no_mangle]
pub unsafe extern "C" fn cmpg_game_name(game: *const CmpgGame) -> *mut c_char {
    if game.is_null() {
        return std::ptr::null_mut();
    }
    CString::new((*game).inner.name().to_string())
        .map_or(std::ptr::null_mut(), CString::into_raw)
}

/// Serializes the game back to its canonical text format.
///
/// # Safety
/// `game` must be a live handle from [`cmpg_game_parse`]; `out_text` must
/// be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cmpg_game_to_text(
    game: *const CmpgGame,
    out_text: *mut *mut c_char,
) -> CmpgStatus {
    guarded(|| {
        if game.is_null() || out_text.is_null() {
            set_error("null argument");
            return CmpgStatus::ErrNull;
        }
        give_string(out_text, (*game).inner.to_cmpg_text())
    })
}

/// Computes a qualitative winning set and writes the per-state level report
/// (one `NAME level=K in_winning=yes|no` line per state, sorted by name).
///
/// # Safety
/// `game` must be a live handle from [`cmpg_game_parse`]; `out_report`
/// must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cmpg_solve_report(
    game: *const CmpgGame,
    objective: CmpgObjective,
    improved: bool,
    out_report: *mut *mut c_char,
) -> CmpgStatus {
    guarded(|| {
        if game.is_null() || out_report.is_null() {
            set_error("null argument");
            return CmpgStatus::ErrNull;
        }
        let g = &(*game).inner;
        let report = solve_with(g, objective, improved);
        give_string(out_report, report.to_text(g))
    })
}

/// Computes a qualitative winning set into a caller-provided mask: for
/// every state id `s`, `mask[s]` is set to 1 when `s` is winning and 0
/// otherwise. `len` must equal the game's state count.
///
/// # Safety
/// `game` must be a live handle from [`cmpg_game_parse`]; `mask` must
/// point to at least `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn cmpg_winning_mask(
    game: *const CmpgGame,
    objective: CmpgObjective,
    improved: bool,
    mask: *mut u8,
    len: usize,
) -> CmpgStatus {
    guarded(|| {
        if game.is_null() || mask.is_null() {
            set_error("null argument");
            return CmpgStatus::ErrNull;
        }
        let g = &(*game).inner;
        if len != g.n() {
            set_error(format!("mask length {} does not match state count {}", len, g.n()));
            return CmpgStatus::ErrInvalid;
        }
        let report = solve_with(g, objective, improved);
        for s in g.state_ids() {
            *mask.add(s) = u8::from(report.winning.contains(&s));
        }
        CmpgStatus::Ok
    })
}

/// Synthesizes the eps-graded stationary strategy on the almost-sure
/// winning set and writes its text form. Returns `CMPG_STATUS_ERR_EMPTY`
/// when the winning set is empty.
///
/// # Safety
/// `game` must be a live handle from [`cmpg_game_parse`]; `eps` must be a
/// valid NUL-terminated C string holding a rational in `(0, 1)` as `p/q`;
/// `out_strategy` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cmpg_synth_eps_stationary(
    game: *const CmpgGame,
    eps: *const c_char,
    out_strategy: *mut *mut c_char,
) -> CmpgStatus {
    guarded(|| {
        if game.is_null() || out_strategy.is_null() {
            set_error("null argument");
            return CmpgStatus::ErrNull;
        }
        let eps_text = match read_str(eps) {
            Ok(t) => t,
            Err(status) => return status,
        };
        let eps: Rational = match eps_text.parse() {
            Ok(v) => v,
            Err(e) => {
                set_error(format!("eps '{eps_text}' is not a rational p/q: {e}"));
                return CmpgStatus::ErrInvalid;
            }
        };
        let g = &(*game).inner;
        let report = almost_set_improved(g);
        if report.winning.is_empty() {
            set_error("almost-sure winning set is empty");
            return CmpgStatus::ErrEmpty;
        }
        match synth_eps_stationary(g, &report, &eps) {
            Ok(sigma) => give_string(out_strategy, sigma.to_text(g)),
            Err(e) => {
                let status = synth_status(&e);
                set_error(e);
                status
            }
        }
    })
}

/// Checks a stationary strategy (in text form) against the eps-almost-sure
/// claim on the almost-sure winning set. On `CMPG_STATUS_OK`, `out_pass`
/// reports the verdict and, when `out_report` is non-null, the per-state
/// report text is written to it.
///
/// # Safety
/// `game` must be a live handle from [`cmpg_game_parse`]; `strategy` and
/// `eps` must be valid NUL-terminated C strings; `out_pass` must be a
/// valid pointer; `out_report` may be null.
#[no_mangle]
pub unsafe extern "C" fn cmpg_verify_eps(
    game: *const CmpgGame,
    strategy: *const c_char,
    eps: *const c_char,
    out_pass: *mut bool,
    out_report: *mut *mut c_char,
) -> CmpgStatus {
    guarded(|| {
        if game.is_null() || out_pass.is_null() {
            set_error("null argument");
            return CmpgStatus::ErrNull;
        }
        let strategy_text = match read_str(strategy) {
            Ok(t) => t,
            Err(status) => return status,
        };
        let eps_text = match read_str(eps) {
            Ok(t) => t,
            Err(status) => return status,
        };
        let eps: Rational = match eps_text.parse() {
            Ok(v) => v,
            Err(e) => {
                set_error(format!("eps '{eps_text}' is not a rational p/q: {e}"));
                return CmpgStatus::ErrInvalid;
            }
        };
        let g = &(*game).inner;
        let sigma = match cmpg::strategy::parse_strategy(strategy_text, g) {
            Ok(Strategy::Stationary(s)) => s,
            Ok(_) => {
                set_error("this claim checks a stationary strategy");
                return CmpgStatus::ErrInvalid;
            }
            Err(e) => {
                set_error(e);
                return CmpgStatus::ErrParse;
            }
        };
        let solve = almost_set_improved(g);
        match verify_eps_claim(g, &sigma, &solve.winning, &eps) {
            Ok(report) => {
                *out_pass = report.passed();
                if out_report.is_null() {
                    CmpgStatus::Ok
                } else {
                    give_string(out_report, report.to_text())
                }
            }
            Err(e) => {
                let status = verify_status(&e);
                set_error(e);
                status
            }
        }
    })
}

/// Reduces a deterministic mean-payoff game (in text form) to a concurrent
/// game; writes the reduced game's text and the edge-to-gadget map text.
///
/// # Safety
/// `dmpg_text` must be a valid NUL-terminated C string; `out_game` and
/// `out_map` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn cmpg_reduce(
    dmpg_text: *const c_char,
    out_game: *mut *mut c_char,
    out_map: *mut *mut c_char,
) -> CmpgStatus {
    guarded(|| {
        if out_game.is_null() || out_map.is_null() {
            set_error("null argument");
            return CmpgStatus::ErrNull;
        }
        let text = match read_str(dmpg_text) {
            Ok(t) => t,
            Err(status) => return status,
        };
        let dmpg = match parse_dmpg(text) {
            Ok(d) => d,
            Err(e) => {
                set_error(e);
                return CmpgStatus::ErrParse;
            }
        };
        match reduce_dmpg(&dmpg) {
            Ok((game, map)) => {
                let map_text = map.to_text(&game);
                let status = give_string(out_game, game.to_cmpg_text());
                if status != CmpgStatus::Ok {
                    return status;
                }
                let status = give_string(out_map, map_text);
                if status != CmpgStatus::Ok {
                    cmpg_string_free(*out_game);
                    *out_game = std::ptr::null_mut();
                }
                status
            }
            Err(e) => {
                set_error(e);
                CmpgStatus::ErrInvalid
            }
        }
    })
}

/// Computes the exact deterministic mean-payoff value of `node` in the
/// game given in text form, by brute force over positional profiles, and
/// writes it as a rational string.
///
/// # Safety
/// `dmpg_text` and `node` must be valid NUL-terminated C strings;
/// `out_value` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cmpg_dmpg_value(
    dmpg_text: *const c_char,
    node: *const c_char,
    out_value: *mut *mut c_char,
) -> CmpgStatus {
    guarded(|| {
        if out_value.is_null() {
            set_error("null out_value");
            return CmpgStatus::ErrNull;
        }
        let text = match read_str(dmpg_text) {
            Ok(t) => t,
            Err(status) => return status,
        };
        let node = match read_str(node) {
            Ok(t) => t,
            Err(status) => return status,
        };
        let dmpg = match parse_dmpg(text) {
            Ok(d) => d,
            Err(e) => {
                set_error(e);
                return CmpgStatus::ErrParse;
            }
        };
        match cmpg::dmpg_value_bruteforce(&dmpg, node) {
            Ok(value) => give_string(out_value, value.to_string()),
            Err(e) => {
                set_error(e);
                CmpgStatus::ErrInvalid
            }
        }
    })
}
