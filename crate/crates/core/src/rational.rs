//! Exact rational arithmetic helpers.
//!
//! Everything that decides anything in this crate runs on arbitrary-precision
//! rationals. This module adds the handful of operations the algorithms need
//! beyond what the number types provide: geometric-sum exponents, powers with
//! big-integer exponents, and an order test against a huge power that never
//! materializes the power itself.

use num::bigint::BigInt;
use num::{BigRational, BigUint, One, Signed, Zero};
use std::str::FromStr;

pub type Rational = BigRational;

/// Rational from an integer pair; panics on a zero denominator (test/internal use).
pub fn rat(num: i64, den: i64) -> Rational {
    assert!(den != 0, "zero denominator");
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn rat_int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses `p/q` or a plain integer. Rejects empty input and zero denominators.
pub fn parse_rational(text: &str) -> Result<Rational, String> {
    let t = text.trim();
    if t.is_empty() {
        return Err("empty rational".to_string());
    }
    Rational::from_str(t).map_err(|e| format!("bad rational '{t}': {e}"))
}

pub fn is_unit_interval(r: &Rational) -> bool {
    !r.is_negative() && *r <= Rational::one()
}

/// Sum of the first `terms` powers of `n`: `1 + n + ... + n^(terms-1)`.
/// Equals `(n^terms - 1)/(n - 1)` for `n > 1` and `terms` for `n = 1`,
/// which is exactly the limit convention the exponent formulas need.
pub fn geometric_sum(n: u64, terms: u32) -> BigUint {
    let n = BigUint::from(n);
    let mut acc = BigUint::zero();
    let mut pow = BigUint::one();
    for _ in 0..terms {
        acc += &pow;
        pow *= &n;
    }
    acc
}

/// Exact `base^exp` for a big-integer exponent, by squaring.
pub fn pow_biguint(base: &Rational, exp: &BigUint) -> Rational {
    let mut result = Rational::one();
    let mut sq = base.clone();
    let mut e = exp.clone();
    let two = BigUint::from(2u32);
    while !e.is_zero() {
        if (&e % &two).is_one() {
            result *= &sq;
        }
        e /= &two;
        if !e.is_zero() {
            sq = &sq * &sq;
        }
    }
    result
}

/// Decides `p <= base^exp` for `base > 1` without computing `base^exp`.
///
/// Works by finding the minimal integer `t` with `base^t >= p` (repeated
/// squaring, then a binary descent over the cached squares) and comparing
/// `t <= exp`. Operand sizes stay within a constant factor of `p`'s size.
pub fn le_pow(p: &Rational, base: &Rational, exp: &BigUint) -> bool {
    assert!(*base > Rational::one(), "le_pow requires base > 1");
    if *p <= Rational::one() {
        return true;
    }
    // squares[k] = base^(2^k); grow until >= p.
    let mut squares = vec![base.clone()];
    while squares.last().unwrap() < p {
        let last = squares.last().unwrap();
        squares.push(last * last);
    }
    let k = squares.len() - 1;
    if k == 0 {
        // base >= p already: minimal t = 1.
        return !exp.is_zero();
    }
    // Greedily extend t below the threshold: after the loop base^t < p and
    // base^(t+1) >= p, so the minimal sufficient exponent is t + 1.
    let mut t = BigUint::one() << (k - 1);
    let mut cur = squares[k - 1].clone();
    debug_assert!(cur < *p);
    for j in (0..k.saturating_sub(1)).rev() {
        let cand = &cur * &squares[j];
        if cand < *p {
            cur = cand;
            t += BigUint::one() << j;
        }
    }
    t += BigUint::one();
    t <= *exp
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display_round() {
        assert_eq!(parse_rational("3/4").unwrap(), rat(3, 4));
        assert_eq!(parse_rational("6/8").unwrap(), rat(3, 4));
        assert_eq!(parse_rational("7").unwrap(), rat_int(7));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("").is_err());
        assert_eq!(rat(3, 4).to_string(), "3/4");
        assert_eq!(rat_int(7).to_string(), "7");
        assert_eq!(rat(4, 2).to_string(), "2");
    }

    #[test]
    fn geometric_sums() {
        assert_eq!(geometric_sum(1, 5), BigUint::from(5u32));
        assert_eq!(geometric_sum(2, 3), BigUint::from(7u32)); // 1 + 2 + 4
        assert_eq!(geometric_sum(3, 2), BigUint::from(4u32)); // 1 + 3
        assert_eq!(geometric_sum(4, 0), BigUint::zero());
    }

    #[test]
    fn big_powers() {
        assert_eq!(pow_biguint(&rat(1, 2), &BigUint::from(10u32)), rat(1, 1024));
        assert_eq!(pow_biguint(&rat(3, 1), &BigUint::zero()), rat_int(1));
        assert_eq!(pow_biguint(&rat(2, 3), &BigUint::from(3u32)), rat(8, 27));
    }

    #[test]
    fn le_pow_small_cases() {
        // 8 <= 2^3, 9 > 2^3, boundaries exact.
        assert!(le_pow(&rat_int(8), &rat_int(2), &BigUint::from(3u32)));
        assert!(!le_pow(&rat_int(9), &rat_int(2), &BigUint::from(3u32)));
        assert!(le_pow(&rat(1, 2), &rat_int(2), &BigUint::zero()));
        assert!(le_pow(&rat_int(1), &rat(3, 2), &BigUint::zero()));
        assert!(!le_pow(&rat_int(2), &rat_int(2), &BigUint::zero()));
        // Non-integer base: (3/2)^4 = 81/16 = 5.0625.
        assert!(le_pow(&rat_int(5), &rat(3, 2), &BigUint::from(4u32)));
        assert!(!le_pow(&rat_int(6), &rat(3, 2), &BigUint::from(4u32)));
    }

    #[test]
    fn le_pow_matches_exact_pow_on_grid() {
        for base_pair in [(2i64, 1i64), (3, 2), (7, 4), (10, 1)] {
            let base = rat(base_pair.0, base_pair.1);
            for e in 0u32..12 {
                let exact = pow_biguint(&base, &BigUint::from(e));
                for delta in [-1i64, 0, 1] {
                    let p = &exact + rat(delta, 5);
                    let expected = p <= exact;
                    assert_eq!(le_pow(&p, &base, &BigUint::from(e)), expected);
                }
            }
        }
    }
}
