//! Phase angles that stay exact at rational multiples of π.
//!
//! Interferometer phases such as π/2 or −π/4 are kept symbolic so that the
//! phase factor `e^{iθ}` is exact at the special angles (0, ±1, ±i, and the
//! ±1/√2 diagonals). Anything else is carried as plain radians.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Serialize, Serializer};

/// An angle in radians, either an exact rational multiple of π or a float.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Angle {
    /// `num/den · π`, always reduced with `den > 0`.
    PiRational { num: i64, den: i64 },
    /// Non-zero finite radians.
    Radians(f64),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("malformed angle `{text}`: {reason}")]
pub struct AngleParseError {
    pub text: String,
    pub reason: String,
}

fn gcd(mut a: i64, mut b: i64) -> i64 {
    a = a.abs();
    b = b.abs();
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a
}

impl Angle {
    pub const ZERO: Angle = Angle::PiRational { num: 0, den: 1 };
    pub const PI: Angle = Angle::PiRational { num: 1, den: 1 };

    /// `num/den · π`. Panics if `den == 0`.
    pub fn pi_fraction(num: i64, den: i64) -> Angle {
        assert!(den != 0, "zero denominator in π fraction");
        if num == 0 {
            return Angle::ZERO;
        }
        let g = gcd(num, den);
        let sign = if den < 0 { -1 } else { 1 };
        Angle::PiRational {
            num: sign * num / g,
            den: sign * den / g,
        }
    }

    /// Plain radians. Zero collapses to the exact zero angle.
    pub fn radians(value: f64) -> Angle {
        if value == 0.0 {
            Angle::ZERO
        } else {
            Angle::Radians(value)
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Angle::PiRational { .. })
    }

    pub fn to_radians(&self) -> f64 {
        match *self {
            Angle::PiRational { num, den } => PI * num as f64 / den as f64,
            Angle::Radians(r) => r,
        }
    }

    /// `e^{iθ}`, exact at multiples of π/4.
    pub fn cis(&self) -> Complex64 {
        if let Angle::PiRational { num, den } = *self {
            if den == 1 || den == 2 || den == 4 {
                // position on the unit circle in eighths of a turn
                let h = FRAC_1_SQRT_2;
                return match (num * (4 / den)).rem_euclid(8) {
                    0 => Complex64::new(1.0, 0.0),
                    1 => Complex64::new(h, h),
                    2 => Complex64::new(0.0, 1.0),
                    3 => Complex64::new(-h, h),
                    4 => Complex64::new(-1.0, 0.0),
                    5 => Complex64::new(-h, -h),
                    6 => Complex64::new(0.0, -1.0),
                    _ => Complex64::new(h, -h),
                };
            }
        }
        let (s, c) = self.to_radians().sin_cos();
        Complex64::new(c, s)
    }

    pub fn cos(&self) -> f64 {
        self.cis().re
    }

    /// `k·θ`; exact when `θ` is exact and `k` is an integer.
    pub fn scaled(self, k: f64) -> Angle {
        match self {
            Angle::PiRational { num, den } if k.fract() == 0.0 && k.abs() < 9.0e15 => match num.checked_mul(k as i64) {
                Some(n) => Angle::pi_fraction(n, den),
                None => Angle::radians(self.to_radians() * k),
            },
            _ => Angle::radians(self.to_radians() * k),
        }
    }

    /// `steps` points `from + k·(to − from)/steps` for `k = 0..steps`.
    ///
    /// The upper end is excluded so that a full turn `0..2π` does not repeat
    /// its starting point. Exact endpoints give exact grid points.
    pub fn grid(from: Angle, to: Angle, steps: usize) -> Vec<Angle> {
        match (from, to) {
            (Angle::PiRational { num: n0, den: d0 }, Angle::PiRational { num: n1, den: d1 }) => {
                let span_num = n1 as i128 * d0 as i128 - n0 as i128 * d1 as i128;
                let span_den = d0 as i128 * d1 as i128 * steps as i128;
                (0..steps)
                    .map(|k| {
                        let num = n0 as i128 * span_den + span_num * k as i128 * d0 as i128;
                        let den = d0 as i128 * span_den;
                        rational_from_i128(num, den)
                    })
                    .collect()
            }
            _ => {
                let a = from.to_radians();
                let b = to.to_radians();
                (0..steps)
                    .map(|k| Angle::radians(a + (b - a) * k as f64 / steps as f64))
                    .collect()
            }
        }
    }
}

fn rational_from_i128(num: i128, den: i128) -> Angle {
    fn g(mut a: i128, mut b: i128) -> i128 {
        a = a.abs();
        b = b.abs();
        while b != 0 {
            let r = a % b;
            a = b;
            b = r;
        }
        a.max(1)
    }
    let d = g(num, den);
    let (mut n, mut dd) = (num / d, den / d);
    if dd < 0 {
        n = -n;
        dd = -dd;
    }
    match (i64::try_from(n), i64::try_from(dd)) {
        (Ok(n), Ok(dd)) => Angle::pi_fraction(n, dd),
        _ => Angle::radians(PI * n as f64 / dd as f64),
    }
}

impl Add for Angle {
    type Output = Angle;
    fn add(self, rhs: Angle) -> Angle {
        match (self, rhs) {
            (Angle::PiRational { num: a, den: b }, Angle::PiRational { num: c, den: d }) => {
                rational_from_i128(a as i128 * d as i128 + c as i128 * b as i128, b as i128 * d as i128)
            }
            _ => Angle::radians(self.to_radians() + rhs.to_radians()),
        }
    }
}

impl Neg for Angle {
    type Output = Angle;
    fn neg(self) -> Angle {
        match self {
            Angle::PiRational { num, den } => Angle::PiRational { num: -num, den },
            Angle::Radians(r) => Angle::Radians(-r),
        }
    }
}

impl Sub for Angle {
    type Output = Angle;
    fn sub(self, rhs: Angle) -> Angle {
        self + (-rhs)
    }
}

impl From<f64> for Angle {
    fn from(value: f64) -> Angle {
        Angle::radians(value)
    }
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Angle::PiRational { num: 0, .. } => write!(f, "0"),
            Angle::PiRational { num, den } => {
                if num < 0 {
                    write!(f, "-")?;
                }
                if num.abs() != 1 {
                    write!(f, "{}", num.abs())?;
                }
                write!(f, "pi")?;
                if den != 1 {
                    write!(f, "/{den}")?;
                }
                Ok(())
            }
            Angle::Radians(r) => write!(f, "{r}"),
        }
    }
}

impl Serialize for Angle {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_f64(self.to_radians())
    }
}

impl FromStr for Angle {
    type Err = AngleParseError;

    /// Accepts decimals (`0.123`, `-1.5`, `2e-3`) and π-rationals written
    /// as `pi`, `-pi/4`, `3pi/4`, `3*pi/4` or `2pi` (`π` also works).
    fn from_str(s: &str) -> Result<Angle, AngleParseError> {
        let err = |reason: &str| AngleParseError {
            text: s.to_string(),
            reason: reason.to_string(),
        };
        let text = s.trim();
        if text.is_empty() {
            return Err(err("empty"));
        }
        let normalized = text.replace('π', "pi");
        if let Some(pos) = normalized.find("pi") {
            let (head, tail) = normalized.split_at(pos);
            let tail = &tail[2..];
            let (negative, head) = match head.strip_prefix('-') {
                Some(rest) => (true, rest),
                None => (false, head.strip_prefix('+').unwrap_or(head)),
            };
            let head = head.strip_suffix('*').unwrap_or(head);
            let num: i64 = if head.is_empty() {
                1
            } else {
                parse_positive_int(head).ok_or_else(|| err("multiplier of pi must be a positive integer"))?
            };
            let den: i64 = if tail.is_empty() {
                1
            } else {
                let d = tail.strip_prefix('/').ok_or_else(|| err("expected `/` after pi"))?;
                parse_positive_int(d).ok_or_else(|| err("denominator must be a positive integer"))?
            };
            let num = if negative { -num } else { num };
            return Ok(Angle::pi_fraction(num, den));
        }
        let valid_chars = text
            .chars()
            .all(|c| c.is_ascii_digit() || matches!(c, '.' | '-' | '+' | 'e' | 'E'));
        if !valid_chars || !text.chars().any(|c| c.is_ascii_digit()) {
            return Err(err("expected a decimal number or a multiple of pi"));
        }
        let value: f64 = text.parse().map_err(|_| err("not a valid decimal"))?;
        if !value.is_finite() {
            return Err(err("value is not finite"));
        }
        Ok(Angle::radians(value))
    }
}

fn parse_positive_int(s: &str) -> Option<i64> {
    if s.is_empty() || !s.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    s.parse::<i64>().ok().filter(|&v| v > 0)
}
