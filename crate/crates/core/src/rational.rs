//! Exact rational scalars, extended rationals and canonical text forms.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn q(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn qf(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn qv(xs: &[i64]) -> Vec<Rational> {
    xs.iter().map(|&x| q(x)).collect()
}

/// Parses `"p/q"` or `"p"` with `q > 0`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::ParseRational(s.to_string());
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    if num.is_empty() || den.is_empty() || den.starts_with(['-', '+']) {
        return Err(bad());
    }
    let num: BigInt = num.parse().map_err(|_| bad())?;
    let den: BigInt = den.parse().map_err(|_| bad())?;
    if !den.is_positive() {
        return Err(bad());
    }
    Ok(Rational::new(num, den))
}

/// Canonical `p/q` in lowest terms with `q > 0`; integers keep the `/1`.
pub fn format_rational(x: &Rational) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

/// Decimal rendering with 15 significant digits, round-half-even.
///
/// Presentation only; never parse this back.
pub fn to_decimal(x: &Rational) -> String {
    const DIGITS: i64 = 15;
    if x.is_zero() {
        return "0".to_string();
    }
    let neg = x.is_negative();
    let a = x.abs();
    // Find e with 10^e <= a < 10^(e+1).
    let mut e: i64 = a.numer().to_string().len() as i64 - a.denom().to_string().len() as i64;
    loop {
        let p = pow10(e);
        if a < p {
            e -= 1;
        } else if a >= pow10(e + 1) {
            e += 1;
        } else {
            break;
        }
    }
    let shift = DIGITS - 1 - e;
    let scaled = a * pow10(shift);
    let mut digits = round_half_even(&scaled);
    let mut exp = e;
    if digits.to_string().len() as i64 > DIGITS {
        digits /= BigInt::from(10);
        exp += 1;
    }
    let ds = digits.to_string();
    let body = if (-5..DIGITS).contains(&exp) {
        if exp >= 0 {
            let (int, frac) = ds.split_at((exp + 1) as usize);
            trim_fraction(int, frac)
        } else {
            let zeros = "0".repeat((-exp - 1) as usize);
            trim_fraction("0", &format!("{zeros}{ds}"))
        }
    } else {
        let (lead, frac) = ds.split_at(1);
        format!("{}e{}", trim_fraction(lead, frac), exp)
    };
    if neg {
        format!("-{body}")
    } else {
        body
    }
}

fn trim_fraction(int: &str, frac: &str) -> String {
    let frac = frac.trim_end_matches('0');
    if frac.is_empty() {
        int.to_string()
    } else {
        format!("{int}.{frac}")
    }
}

fn pow10(e: i64) -> Rational {
    let p = num_traits::pow(BigInt::from(10), e.unsigned_abs() as usize);
    if e >= 0 {
        Rational::from_integer(p)
    } else {
        Rational::new(BigInt::one(), p)
    }
}

fn round_half_even(x: &Rational) -> BigInt {
    let (q, r) = x.numer().div_mod_floor(x.denom());
    let twice: BigInt = r * 2;
    match twice.cmp(x.denom()) {
        Ordering::Less => q,
        Ordering::Greater => q + 1,
        Ordering::Equal => {
            if q.is_even() {
                q
            } else {
                q + 1
            }
        }
    }
}

pub fn to_f64(x: &Rational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

pub fn floor(x: &Rational) -> BigInt {
    x.numer().div_floor(x.denom())
}

pub fn ceil(x: &Rational) -> BigInt {
    -((-x.numer()).div_floor(x.denom()))
}

pub fn factorial(n: u32) -> Rational {
    Rational::from_integer((1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k)))
}

pub fn lcm_of_denominators<'a>(xs: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    xs.into_iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
}

/// Rational upper bound for `ln(n)` within `eps` of the true value.
///
/// Uses `ln n = k ln 2 + ln y`, `y in [1, 2)`, and the atanh series
/// `ln x = 2 sum z^(2j+1)/(2j+1)`, `z = (x-1)/(x+1)`, adding a geometric
/// tail bound to each partial sum.
pub fn ln_upper_bound(n: u64, eps: &Rational) -> Rational {
    assert!(n >= 1, "ln of zero");
    if n == 1 {
        return Rational::zero();
    }
    let k = 63 - n.leading_zeros() as u64;
    let y = Rational::new(BigInt::from(n), BigInt::from(1u64) << k);
    let share = eps / q(k as i64 + 1);
    let ln2 = ln_upper_series(&q(2), &share);
    let lny = ln_upper_series(&y, &share);
    ln2 * q(k as i64) + lny
}

fn ln_upper_series(x: &Rational, eps: &Rational) -> Rational {
    if x.is_one() {
        return Rational::zero();
    }
    let z = (x - q(1)) / (x + q(1));
    let z2 = &z * &z;
    let tail_den = q(1) - &z2;
    let mut sum = Rational::zero();
    let mut power = z.clone();
    let mut j = 0i64;
    loop {
        sum += &power / q(2 * j + 1);
        power *= &z2;
        // Remaining terms are at most power / ((2j+3) (1 - z^2)).
        let tail = &power / (q(2 * j + 3) * &tail_den);
        if q(2) * &tail <= *eps {
            return q(2) * (sum + tail);
        }
        j += 1;
    }
}

/// A rational extended by `+inf` and `-inf`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ExtRational {
    NegInf,
    Finite(Rational),
    PosInf,
}

impl ExtRational {
    pub fn finite(&self) -> Option<&Rational> {
        match self {
            ExtRational::Finite(x) => Some(x),
            _ => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, ExtRational::Finite(_))
    }

    pub fn add_finite(&self, x: &Rational) -> ExtRational {
        match self {
            ExtRational::Finite(y) => ExtRational::Finite(y + x),
            other => other.clone(),
        }
    }

    pub fn neg(&self) -> ExtRational {
        match self {
            ExtRational::NegInf => ExtRational::PosInf,
            ExtRational::PosInf => ExtRational::NegInf,
            ExtRational::Finite(x) => ExtRational::Finite(-x),
        }
    }

    pub fn to_canonical(&self) -> String {
        match self {
            ExtRational::NegInf => "-inf".to_string(),
            ExtRational::PosInf => "+inf".to_string(),
            ExtRational::Finite(x) => format_rational(x),
        }
    }
}

impl From<Rational> for ExtRational {
    fn from(x: Rational) -> Self {
        ExtRational::Finite(x)
    }
}

impl PartialOrd for ExtRational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtRational {
    fn cmp(&self, other: &Self) -> Ordering {
        use ExtRational::*;
        match (self, other) {
            (NegInf, NegInf) | (PosInf, PosInf) => Ordering::Equal,
            (NegInf, _) | (_, PosInf) => Ordering::Less,
            (_, NegInf) | (PosInf, _) => Ordering::Greater,
            (Finite(a), Finite(b)) => a.cmp(b),
        }
    }
}

impl fmt::Display for ExtRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_canonical())
    }
}
