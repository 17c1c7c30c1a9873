//! Exact rational helpers: parsing, decimal rendering, binomials and
//! rigorous enclosures of `exp`.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exactness carrier for every probability and threshold.
pub type Rational = num_rational::BigRational;

/// Digits used for the fixed-point enclosures of transcendental constants.
pub const EXP_DIGITS: u32 = 60;

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(value: i64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

/// Parses `a/b`, an integer, or a finite decimal such as `0.388` into an exact fraction.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let s = text.trim();
    let bad = || Error::Parse(format!("not a rational number: {text:?}"));
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((num, den)) = s.split_once('/') {
        let num: BigInt = num.trim().parse().map_err(|_| bad())?;
        let den: BigInt = den.trim().parse().map_err(|_| bad())?;
        if den.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {text:?}")));
        }
        return Ok(Rational::new(num, den));
    }
    let (negative, body) = match s.as_bytes()[0] {
        b'-' => (true, &s[1..]),
        b'+' => (false, &s[1..]),
        _ => (false, s),
    };
    let (whole, frac) = body.split_once('.').unwrap_or((body, ""));
    if whole.is_empty() && frac.is_empty() {
        return Err(bad());
    }
    if !whole.bytes().chain(frac.bytes()).all(|b| b.is_ascii_digit()) {
        return Err(bad());
    }
    let digits: String = whole.chars().chain(frac.chars()).collect();
    let numer: BigInt = digits.parse().map_err(|_| bad())?;
    let denom = num_traits::pow(BigInt::from(10u8), frac.len());
    let value = Rational::new(numer, denom);
    Ok(if negative { -value } else { value })
}

/// Renders `num/den` (the denominator is always present).
pub fn fraction_string(value: &Rational) -> String {
    format!("{}/{}", value.numer(), value.denom())
}

/// Rounds half away from zero to `digits` places after the decimal point.
pub fn decimal_string(value: &Rational, digits: usize) -> String {
    let scale = num_traits::pow(BigInt::from(10u8), digits);
    let scaled = (value * Rational::from_integer(scale)).round().to_integer();
    let negative = scaled.is_negative();
    let mut body = scaled.abs().to_string();
    if body.len() <= digits {
        let pad = digits + 1 - body.len();
        body.insert_str(0, &"0".repeat(pad));
    }
    let split = body.len() - digits;
    let mut out = String::new();
    if negative {
        out.push('-');
    }
    out.push_str(&body[..split]);
    if digits > 0 {
        out.push('.');
        out.push_str(&body[split..]);
    }
    out
}

pub fn to_f64(value: &Rational) -> f64 {
    value.to_f64().unwrap_or(f64::NAN)
}

pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// `C(n, k)` as a machine integer, saturating at `u128::MAX`.
pub fn binomial_u128(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k as u128 {
        let next = acc.checked_mul(n as u128 - i);
        match next {
            Some(v) => acc = v / (i + 1),
            None => return u128::MAX,
        }
    }
    acc
}

pub fn pow(base: &Rational, exp: u32) -> Rational {
    num_traits::pow(base.clone(), exp as usize)
}

pub fn is_probability(p: &Rational) -> bool {
    !p.is_negative() && *p <= Rational::one()
}

pub fn check_probability(p: &Rational) -> Result<()> {
    if is_probability(p) {
        Ok(())
    } else {
        Err(Error::ProbabilityOutOfRange(fraction_string(p)))
    }
}

fn floor_to(value: &Rational, scale: &BigInt) -> Rational {
    let scaled = (value * Rational::from_integer(scale.clone())).floor();
    scaled / Rational::from_integer(scale.clone())
}

fn ceil_to(value: &Rational, scale: &BigInt) -> Rational {
    let scaled = (value * Rational::from_integer(scale.clone())).ceil();
    scaled / Rational::from_integer(scale.clone())
}

/// Encloses `e^x` in `[lo, hi]` with endpoints on the grid `10^-digits`.
pub fn exp_bounds(x: &Rational, digits: u32) -> (Rational, Rational) {
    let scale = num_traits::pow(BigInt::from(10u8), digits as usize + 4);
    if x.is_negative() {
        let (lo, hi) = exp_bounds(&-x, digits);
        return (floor_to(&(hi.recip()), &scale), ceil_to(&(lo.recip()), &scale));
    }
    // Taylor series of e^x on a fixed-point grid, each term kept as an integer
    // interval; the tail is at most the last term once x/(k+1) <= 1/2.
    let guard = num_traits::pow(BigInt::from(10u8), digits as usize + 12);
    let (a, b) = (x.numer().clone(), x.denom().clone());
    let mut term_lo = guard.clone();
    let mut term_hi = guard.clone();
    let mut sum_lo = BigInt::zero();
    let mut sum_hi = BigInt::zero();
    let mut k: u64 = 0;
    loop {
        sum_lo += &term_lo;
        sum_hi += &term_hi;
        k += 1;
        let div = &b * BigInt::from(k);
        term_lo = (&term_lo * &a).div_floor(&div);
        term_hi = (&term_hi * &a).div_ceil(&div);
        let ratio_ok = x * int(2) <= Rational::from_integer(BigInt::from(k + 1));
        if ratio_ok && term_hi <= BigInt::one() {
            break;
        }
    }
    let lo = floor_to(&Rational::new(sum_lo, guard.clone()), &scale);
    let hi = ceil_to(&Rational::new(sum_hi + term_hi * 2, guard), &scale);
    (lo, hi)
}

/// Encloses the Poisson mode constant `a^a / (e^a a!)` (equal to 1 at `a = 0`).
pub fn poisson_mode_constant(a: u32, digits: u32) -> (Rational, Rational) {
    let (lo, hi) = exp_bounds(&-int(i64::from(a)), digits);
    let base = if a == 0 {
        Rational::one()
    } else {
        let power = num_traits::pow(BigInt::from(a), a as usize);
        let fact: BigInt = (1..=a).map(BigInt::from).product();
        Rational::new(power, fact)
    };
    (lo * &base, hi * base)
}

/// Midpoint approximation of `e^x`.
pub fn exp_f64(x: &Rational) -> f64 {
    let (lo, hi) = exp_bounds(x, 30);
    to_f64(&((lo + hi) / int(2)))
}

/// Smallest common multiple of the denominators.
pub fn common_denominator<'a>(values: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    values
        .into_iter()
        .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()))
}

/// Scales every value by the common denominator, yielding exact integers.
pub fn to_integers(values: &[Rational]) -> (Vec<BigInt>, BigInt) {
    let den = common_denominator(values.iter());
    let ints = values
        .iter()
        .map(|v| (v * Rational::from_integer(den.clone())).to_integer())
        .collect();
    (ints, den)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_and_decimals_exactly() {
        assert_eq!(parse_rational("0.388").unwrap(), rat(97, 250));
        assert_eq!(parse_rational("0.426").unwrap(), rat(213, 500));
        assert_eq!(parse_rational("0.4").unwrap(), rat(2, 5));
        assert_eq!(parse_rational("1/3").unwrap(), rat(1, 3));
        assert_eq!(parse_rational("-6/4").unwrap(), rat(-3, 2));
        assert_eq!(parse_rational("7").unwrap(), int(7));
        assert_eq!(parse_rational(".5").unwrap(), rat(1, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("1.2.3").is_err());
        assert!(parse_rational("").is_err());
    }

    #[test]
    fn decimal_rendering_rounds_half_away() {
        assert_eq!(decimal_string(&rat(80, 243), 12), "0.329218106996");
        assert_eq!(decimal_string(&rat(1, 2), 0), "1");
        assert_eq!(decimal_string(&rat(-1, 8), 2), "-0.13");
        assert_eq!(decimal_string(&int(3), 3), "3.000");
        assert_eq!(decimal_string(&rat(1, 1000), 2), "0.00");
        assert_eq!(fraction_string(&int(3)), "3/1");
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(30, 5), BigUint::from(142_506u32));
        assert_eq!(binomial(12, 3), BigUint::from(220u32));
        assert_eq!(binomial(3, 5), BigUint::zero());
        assert_eq!(binomial_u128(60, 5), 5_461_512);
        assert_eq!(binomial_u128(1000, 500), u128::MAX);
    }

    /// `reference` is a truncation to `digits` places, so compare within that slack.
    fn encloses(bounds: &(Rational, Rational), reference: &str, digits: usize) -> bool {
        let v = parse_rational(reference).unwrap();
        let slack = Rational::new(BigInt::one(), num_traits::pow(BigInt::from(10u8), digits));
        let (lo, hi) = bounds;
        lo <= &(&v + &slack) && &v <= hi && hi - lo < slack
    }

    #[test]
    fn exp_enclosure_brackets_known_values() {
        let e = "2.7182818284590452353602874713526624977572";
        assert!(encloses(&exp_bounds(&int(1), 45), e, 40));
        let inv_e = "0.3678794411714423215955237701614608674458";
        assert!(encloses(&exp_bounds(&-int(1), 45), inv_e, 40));
        assert!(encloses(&exp_bounds(&Rational::zero(), 20), "1", 15));
        let e25 = "72004899337.38587252416135146612615791522";
        let (lo, hi) = exp_bounds(&int(25), 45);
        let v = parse_rational(e25).unwrap();
        assert!(lo <= &v + rat(1, 1_000_000_000) && v <= hi);
        let half = exp_bounds(&rat(-1, 2), 45);
        assert!(encloses(&half, "0.6065306597126334236037995349911804534419", 40));
    }

    #[test]
    fn poisson_mode_constants() {
        // 2/e^2
        let two = poisson_mode_constant(2, 45);
        assert!(encloses(&two, "0.2706705664732253837879989899449", 31));
        let zero = poisson_mode_constant(0, 20);
        assert!(encloses(&zero, "1", 15));
    }
}
