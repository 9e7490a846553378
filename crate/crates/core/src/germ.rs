//! Truncated Laurent germs over the rationals.
//!
//! A germ stores coefficients from its valuation upward and a truncation
//! exponent `trunc`: everything at or beyond `z^trunc` is unknown. All
//! arithmetic propagates the window pessimistically, so a coefficient that
//! is reported is a coefficient that is certain.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num::{BigInt, BigRational, One, Signed, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

pub type Q = BigRational;

/// Shorthand for an integer rational.
pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// Shorthand for `n/d`.
pub fn qf(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Vanishing order of a germ. `Infinite` means the germ is zero below its
/// truncation, so the true order is not determined by the stored window.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Order {
    Finite(i64),
    Infinite,
}

impl Order {
    pub fn finite(self) -> Option<i64> {
        match self {
            Order::Finite(k) => Some(k),
            Order::Infinite => None,
        }
    }
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Order::Finite(k) => write!(f, "{k}"),
            Order::Infinite => write!(f, "inf"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Germ {
    val: i64,
    coeffs: Vec<Q>,
    trunc: i64,
}

impl Germ {
    /// Builds a germ from coefficients starting at `val`, reduced modulo `z^trunc`.
    pub fn new(val: i64, coeffs: Vec<Q>, trunc: i64) -> Germ {
        let mut g = Germ { val, coeffs, trunc };
        g.canonicalize();
        g
    }

    pub fn from_ints(val: i64, coeffs: &[i64], trunc: i64) -> Germ {
        Germ::new(val, coeffs.iter().map(|&c| q(c)).collect(), trunc)
    }

    pub fn zero(trunc: i64) -> Germ {
        Germ { val: trunc, coeffs: Vec::new(), trunc }
    }

    pub fn one(trunc: i64) -> Germ {
        Germ::constant(q(1), trunc)
    }

    pub fn constant(c: Q, trunc: i64) -> Germ {
        Germ::new(0, vec![c], trunc)
    }

    /// `c * z^k` modulo `z^trunc`.
    pub fn monomial(c: Q, k: i64, trunc: i64) -> Germ {
        Germ::new(k, vec![c], trunc)
    }

    /// Builds a germ from `(exponent, coefficient)` pairs.
    pub fn from_terms(terms: &[(i64, Q)], trunc: i64) -> Germ {
        let Some(lo) = terms.iter().map(|t| t.0).min() else {
            return Germ::zero(trunc);
        };
        let hi = terms.iter().map(|t| t.0).max().unwrap();
        let mut coeffs = vec![Q::zero(); (hi - lo + 1) as usize];
        for (k, c) in terms {
            coeffs[(k - lo) as usize] += c;
        }
        Germ::new(lo, coeffs, trunc)
    }

    fn canonicalize(&mut self) {
        let keep = (self.trunc - self.val).max(0) as usize;
        self.coeffs.truncate(keep);
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
        let lead = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        if lead > 0 {
            self.coeffs.drain(..lead);
            self.val += lead as i64;
        }
        if self.coeffs.is_empty() {
            self.val = self.trunc;
        }
    }

    /// Lowest possibly nonzero exponent; equals `trunc` for the zero germ.
    pub fn valuation(&self) -> i64 {
        self.val
    }

    pub fn trunc(&self) -> i64 {
        self.trunc
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn order(&self) -> Order {
        if self.is_zero() {
            Order::Infinite
        } else {
            Order::Finite(self.val)
        }
    }

    pub fn leading(&self) -> Option<&Q> {
        self.coeffs.first()
    }

    /// Coefficient of `z^k`; zero outside the stored range.
    pub fn coeff(&self, k: i64) -> Q {
        if k < self.val {
            return Q::zero();
        }
        self.coeffs
            .get((k - self.val) as usize)
            .cloned()
            .unwrap_or_else(Q::zero)
    }

    /// Stored `(exponent, coefficient)` pairs with nonzero coefficient.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &Q)> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(move |(i, c)| (self.val + i as i64, c))
    }

    /// Reduces modulo `z^t` (no-op if `t >= trunc`).
    pub fn truncate(&self, t: i64) -> Germ {
        Germ::new(self.val, self.coeffs.clone(), t.min(self.trunc))
    }

    /// Representative with every unknown coefficient set to zero, declared
    /// known modulo `z^t`.
    pub fn lift(&self, t: i64) -> Germ {
        Germ::new(self.val, self.coeffs.clone(), t)
    }

    /// Multiplication by `z^k`.
    pub fn shift(&self, k: i64) -> Germ {
        Germ { val: self.val + k, coeffs: self.coeffs.clone(), trunc: self.trunc + k }
    }

    pub fn scale(&self, c: &Q) -> Germ {
        Germ::new(self.val, self.coeffs.iter().map(|x| x * c).collect(), self.trunc)
    }

    pub fn add(&self, other: &Germ) -> Germ {
        let trunc = self.trunc.min(other.trunc);
        let lo = self.val.min(other.val).min(trunc);
        let hi = trunc;
        let mut coeffs = vec![Q::zero(); (hi - lo).max(0) as usize];
        for (k, c) in self.terms().chain(other.terms()) {
            if k < hi {
                coeffs[(k - lo) as usize] += c;
            }
        }
        Germ::new(lo, coeffs, trunc)
    }

    pub fn neg(&self) -> Germ {
        Germ { val: self.val, coeffs: self.coeffs.iter().map(|c| -c).collect(), trunc: self.trunc }
    }

    pub fn sub(&self, other: &Germ) -> Germ {
        self.add(&other.neg())
    }

    /// Cauchy product. The window is `min(x.trunc + y.val, y.trunc + x.val)`.
    pub fn mul(&self, other: &Germ) -> Germ {
        let trunc = (self.trunc + other.val).min(other.trunc + self.val);
        if self.is_zero() || other.is_zero() {
            return Germ::zero(trunc);
        }
        let val = self.val + other.val;
        let len = (trunc - val).max(0) as usize;
        let mut coeffs = vec![Q::zero(); len];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() || i >= len {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if i + j >= len {
                    break;
                }
                if !b.is_zero() {
                    coeffs[i + j] += a * b;
                }
            }
        }
        Germ::new(val, coeffs, trunc)
    }

    /// Meromorphic inverse. For `x = z^v u` known mod `z^T` the inverse is
    /// known mod `z^(T - 2v)`.
    pub fn invert(&self) -> Result<Germ> {
        if self.is_zero() {
            return Err(Error::NonInvertible);
        }
        let n = (self.trunc - self.val) as usize;
        let u0 = self.coeffs[0].clone();
        let inv0 = u0.recip();
        let mut w: Vec<Q> = Vec::with_capacity(n);
        w.push(inv0.clone());
        for k in 1..n {
            let mut s = Q::zero();
            for j in 1..=k.min(self.coeffs.len() - 1) {
                if !self.coeffs[j].is_zero() {
                    s += &self.coeffs[j] * &w[k - j];
                }
            }
            w.push(-(s * &inv0));
        }
        Ok(Germ::new(-self.val, w, self.trunc - 2 * self.val))
    }

    pub fn div(&self, other: &Germ) -> Result<Germ> {
        Ok(self.mul(&other.invert()?))
    }

    /// Pullback along `z -> -z`.
    pub fn sigma(&self) -> Germ {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| if (self.val + i as i64) % 2 == 0 { c.clone() } else { -c })
            .collect();
        Germ { val: self.val, coeffs, trunc: self.trunc }
    }

    /// `(even, odd)` parts; both keep the window of `self`.
    pub fn parity_split(&self) -> (Germ, Germ) {
        let pick = |parity: i64| {
            let coeffs = self
                .coeffs
                .iter()
                .enumerate()
                .map(|(i, c)| {
                    if (self.val + i as i64).rem_euclid(2) == parity {
                        c.clone()
                    } else {
                        Q::zero()
                    }
                })
                .collect();
            Germ::new(self.val, coeffs, self.trunc)
        };
        (pick(0), pick(1))
    }

    pub fn is_even(&self) -> bool {
        self.parity_split().1.is_zero()
    }

    pub fn is_odd(&self) -> bool {
        self.parity_split().0.is_zero()
    }

    /// Equality of all coefficients below the common window.
    pub fn agrees(&self, other: &Germ) -> bool {
        let t = self.trunc.min(other.trunc);
        self.truncate(t) == other.truncate(t)
    }

    /// Square root of `z^(2k) u` with `u(0)` a rational square; the root has
    /// positive leading coefficient.
    pub fn sqrt(&self) -> Result<Germ> {
        if self.is_zero() || self.val % 2 != 0 {
            return Err(Error::NoSquareRoot);
        }
        let r0 = rational_sqrt(&self.coeffs[0]).ok_or(Error::NoSquareRoot)?;
        let n = (self.trunc - self.val) as usize;
        let two_r0 = &r0 * q(2);
        let mut w = vec![r0];
        for k in 1..n {
            let mut s = self.coeffs.get(k).cloned().unwrap_or_else(Q::zero);
            for j in 1..k {
                s -= &w[j] * &w[k - j];
            }
            w.push(s / &two_r0);
        }
        let half = self.val / 2;
        Ok(Germ::new(half, w, self.trunc - half))
    }

    /// Text form `v=<val>;t=<trunc>;c0,c1,...`.
    pub fn to_text(&self) -> String {
        if self.is_zero() {
            return format!("v=0;t={};0", self.trunc);
        }
        let cs: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
        format!("v={};t={};{}", self.val, self.trunc, cs.join(","))
    }

    /// Parses the text form. A bare rational (e.g. `0` or `3/2`) is a constant
    /// with window `default_trunc`.
    pub fn parse(s: &str, default_trunc: i64) -> Result<Germ> {
        let s = s.trim();
        if !s.contains(';') {
            return Ok(Germ::constant(parse_q(s)?, default_trunc));
        }
        let mut val = None;
        let mut trunc = None;
        let mut coeffs = None;
        for part in s.split(';') {
            let part = part.trim();
            if let Some(v) = part.strip_prefix("v=") {
                val = Some(v.parse::<i64>().map_err(|e| Error::Parse(format!("valuation: {e}")))?);
            } else if let Some(t) = part.strip_prefix("t=") {
                trunc = Some(t.parse::<i64>().map_err(|e| Error::Parse(format!("trunc: {e}")))?);
            } else if coeffs.is_none() {
                coeffs = Some(
                    part.split(',')
                        .filter(|c| !c.trim().is_empty())
                        .map(parse_q)
                        .collect::<Result<Vec<_>>>()?,
                );
            } else {
                return Err(Error::Parse(format!("unexpected field '{part}'")));
            }
        }
        let val = val.unwrap_or(0);
        let trunc = trunc.unwrap_or(default_trunc);
        Ok(Germ::new(val, coeffs.unwrap_or_default(), trunc))
    }
}

impl fmt::Display for Germ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.terms() {
            let neg = c.is_negative();
            let a = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            let unit = a.is_one();
            match (k, unit) {
                (0, _) => write!(f, "{a}")?,
                (1, true) => write!(f, "z")?,
                (1, false) => write!(f, "{a}z")?,
                (_, true) => write!(f, "z^{k}")?,
                (_, false) => write!(f, "{a}z^{k}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O(z^{})", self.trunc)
    }
}

impl Serialize for Germ {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_text())
    }
}

impl Add for &Germ {
    type Output = Germ;
    fn add(self, rhs: &Germ) -> Germ {
        Germ::add(self, rhs)
    }
}

impl Sub for &Germ {
    type Output = Germ;
    fn sub(self, rhs: &Germ) -> Germ {
        Germ::sub(self, rhs)
    }
}

impl Mul for &Germ {
    type Output = Germ;
    fn mul(self, rhs: &Germ) -> Germ {
        Germ::mul(self, rhs)
    }
}

impl Neg for &Germ {
    type Output = Germ;
    fn neg(self) -> Germ {
        Germ::neg(self)
    }
}

/// Parses `p/q` or an integer literal.
pub fn parse_q(s: &str) -> Result<Q> {
    let s = s.trim();
    let bad = |e: String| Error::Parse(format!("rational '{s}': {e}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|e| bad(format!("{e}")))?;
            let d: BigInt = d.trim().parse().map_err(|e| bad(format!("{e}")))?;
            if d.is_zero() {
                return Err(bad("zero denominator".into()));
            }
            Ok(Q::new(n, d))
        }
        None => Ok(Q::from_integer(s.parse().map_err(|e| bad(format!("{e}")))?)),
    }
}

/// Exact square root of a nonnegative rational, if it is a square.
pub fn rational_sqrt(x: &Q) -> Option<Q> {
    if x.is_negative() {
        return None;
    }
    let n = x.numer().sqrt();
    let d = x.denom().sqrt();
    (&n * &n == *x.numer() && &d * &d == *x.denom()).then(|| Q::new(n, d))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(val: i64, c: &[i64], t: i64) -> Germ {
        Germ::from_ints(val, c, t)
    }

    #[test]
    fn add_examples() {
        let z = g(1, &[1], 5);
        assert!((&z + &z.neg()).is_zero());
        let s = &g(0, &[1, 0, 1], 6) + &g(1, &[1], 5);
        assert_eq!(s, g(0, &[1, 1, 1], 5));
        let l = &g(-1, &[1], 5) + &g(1, &[1], 5);
        assert_eq!(l, g(-1, &[1, 0, 1], 5));
    }

    #[test]
    fn mul_examples() {
        let p = &g(0, &[1, 1], 4) * &g(0, &[1, -1], 4);
        assert_eq!(p, g(0, &[1, 0, -1], 4));
        let p = &g(-2, &[1], 6) * &g(3, &[1], 6);
        assert_eq!(p.valuation(), 1);
        assert_eq!(p.coeff(1), q(1));
        let h = g(0, &[2, 0, 3], 5).scale(&qf(1, 2));
        assert_eq!(h, Germ::new(0, vec![q(1), q(0), qf(3, 2)], 5));
    }

    #[test]
    fn invert_examples() {
        let i = g(0, &[1, 0, 1], 5).invert().unwrap();
        assert_eq!(i, g(0, &[1, 0, -1, 0, 1], 5));
        assert_eq!(g(0, &[2], 3).invert().unwrap(), Germ::constant(qf(1, 2), 3));
        let zi = g(1, &[1], 6).invert().unwrap();
        assert_eq!(zi.valuation(), -1);
        assert_eq!(zi.coeff(-1), q(1));
        assert_eq!(Germ::zero(4).invert(), Err(Error::NonInvertible));
    }

    #[test]
    fn sigma_and_parity() {
        assert_eq!(g(1, &[1, 1], 5).sigma(), g(1, &[-1, 1], 5));
        assert_eq!(g(0, &[1, 0, 0, 1], 5).sigma(), g(0, &[1, 0, 0, -1], 5));
        let (e, o) = g(0, &[1, 1, 1], 5).parity_split();
        assert_eq!(e, g(0, &[1, 0, 1], 5));
        assert_eq!(o, g(1, &[1], 5));
        let (e, o) = g(3, &[1], 5).parity_split();
        assert!(e.is_zero());
        assert_eq!(o, g(3, &[1], 5));
    }

    #[test]
    fn order_examples() {
        assert_eq!(g(2, &[1, 1], 5).order(), Order::Finite(2));
        assert_eq!(Germ::zero(5).order(), Order::Infinite);
        assert_eq!(Germ::new(-1, vec![qf(3, 2)], 3).order(), Order::Finite(-1));
    }

    #[test]
    fn text_roundtrip() {
        let x = Germ::parse("v=0;t=5;1,0,3", 9).unwrap();
        assert_eq!(x, g(0, &[1, 0, 3], 5));
        assert_eq!(Germ::parse(&x.to_text(), 9).unwrap(), x);
        assert!(Germ::parse("0", 5).unwrap().is_zero());
        assert_eq!(Germ::parse("v=1;t=4;1/2,-3", 0).unwrap().coeff(2), q(-3));
    }

    #[test]
    fn sqrt_of_square() {
        let u = g(0, &[4, 0, 3], 7);
        let r = u.sqrt().unwrap();
        assert!((&r * &r).agrees(&u));
        assert!(g(0, &[2], 4).sqrt().is_err());
    }
}
