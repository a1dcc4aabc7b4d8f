//! Exact arithmetic in Q(√2).

use crate::error::{Error, Result};
use num_rational::Rational64;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

/// `a + b√2` with rational coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Surd {
    pub a: Rational64,
    pub b: Rational64,
}

impl Surd {
    pub fn new(a: Rational64, b: Rational64) -> Self {
        Surd { a, b }
    }

    pub fn int(a: i64) -> Self {
        Surd::new(Rational64::from_integer(a), Rational64::zero())
    }

    pub fn sqrt2() -> Self {
        Surd::new(Rational64::zero(), Rational64::from_integer(1))
    }

    pub fn zero() -> Self {
        Surd::int(0)
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn conjugate(self) -> Self {
        Surd::new(self.a, -self.b)
    }

    /// a² − 2b², the field norm.
    pub fn norm(self) -> Rational64 {
        self.a * self.a - Rational64::from_integer(2) * self.b * self.b
    }

    pub fn to_f64(self) -> f64 {
        let f = |r: Rational64| *r.numer() as f64 / *r.denom() as f64;
        f(self.a) + f(self.b) * std::f64::consts::SQRT_2
    }

    pub fn signum(self) -> i64 {
        // compare a with −b√2 by squaring when signs differ
        let (sa, sb) = (self.a.signum(), self.b.signum());
        if sa >= Rational64::zero() && sb >= Rational64::zero() {
            return if self.is_zero() { 0 } else { 1 };
        }
        if sa <= Rational64::zero() && sb <= Rational64::zero() {
            return -1;
        }
        let n = self.norm();
        let dominant = if n > Rational64::zero() { sa } else { sb };
        if n.is_zero() {
            0
        } else if dominant > Rational64::zero() {
            1
        } else {
            -1
        }
    }
}

impl Add for Surd {
    type Output = Surd;
    fn add(self, o: Surd) -> Surd {
        Surd::new(self.a + o.a, self.b + o.b)
    }
}

impl Sub for Surd {
    type Output = Surd;
    fn sub(self, o: Surd) -> Surd {
        Surd::new(self.a - o.a, self.b - o.b)
    }
}

impl Neg for Surd {
    type Output = Surd;
    fn neg(self) -> Surd {
        Surd::new(-self.a, -self.b)
    }
}

impl Mul for Surd {
    type Output = Surd;
    fn mul(self, o: Surd) -> Surd {
        let two = Rational64::from_integer(2);
        Surd::new(self.a * o.a + two * self.b * o.b, self.a * o.b + self.b * o.a)
    }
}

impl Div for Surd {
    type Output = Surd;
    /// Panics on division by zero.
    fn div(self, o: Surd) -> Surd {
        let n = o.norm();
        assert!(!n.is_zero(), "division by zero in Q(√2)");
        let p = self * o.conjugate();
        Surd::new(p.a / n, p.b / n)
    }
}

fn rat(s: &str) -> Option<Rational64> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let d: i64 = d.trim().parse().ok()?;
            let n: i64 = n.trim().parse().ok()?;
            (d != 0).then(|| Rational64::new(n, d))
        }
        None => Some(Rational64::from_integer(s.parse().ok()?)),
    }
}

impl fmt::Display for Surd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.a.is_zero(), self.b.is_zero()) {
            (_, true) => write!(f, "{}", self.a),
            (true, false) => write!(f, "{}√2", self.b),
            (false, false) if self.b < Rational64::zero() => write!(f, "{} - {}√2", self.a, -self.b),
            _ => write!(f, "{} + {}√2", self.a, self.b),
        }
    }
}

impl FromStr for Surd {
    type Err = Error;
    /// Accepts the [`Display`](fmt::Display) forms, e.g. `1/2`, `-3√2`, `1 - 1/2√2`.
    fn from_str(s: &str) -> Result<Surd> {
        let bad = || Error::Format(format!("malformed number `{s}`"));
        let t = s.trim();
        let Some(body) = t.strip_suffix("√2") else {
            return Ok(Surd::new(rat(t).ok_or_else(bad)?, Rational64::zero()));
        };
        // split at the last binary + or −
        let split = body.char_indices().rev().find(|&(i, c)| i > 0 && (c == '+' || c == '-') && body[..i].trim_end().len() < i);
        match split {
            Some((i, c)) => {
                let a = rat(&body[..i]).ok_or_else(bad)?;
                let b = rat(&body[i + 1..]).ok_or_else(bad)?;
                Ok(Surd::new(a, if c == '-' { -b } else { b }))
            }
            None => Ok(Surd::new(Rational64::zero(), rat(body).ok_or_else(bad)?)),
        }
    }
}

impl Serialize for Surd {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Surd {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Surd, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
