//! Points of weighted projective spaces over the rationals.
//!
//! Equality is geometric: two representatives are equal when they lie in one
//! orbit of the weighted scaling action over the algebraic closure.

use std::fmt;

use num::integer::gcd;
use num::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::germ::{parse_q, Q};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WpsPoint {
    weights: Vec<u32>,
    coords: Vec<Q>,
}

impl WpsPoint {
    pub fn new(weights: Vec<u32>, coords: Vec<Q>) -> Result<WpsPoint> {
        if weights.len() != coords.len() {
            return Err(Error::InvalidPoint("weights and coordinates differ in length".into()));
        }
        if weights.iter().any(|&w| w == 0) {
            return Err(Error::InvalidPoint("weights must be positive".into()));
        }
        if coords.iter().all(Zero::is_zero) {
            return Err(Error::InvalidPoint("all coordinates vanish".into()));
        }
        Ok(WpsPoint { weights, coords })
    }

    pub fn weights(&self) -> &[u32] {
        &self.weights
    }

    pub fn coords(&self) -> &[Q] {
        &self.coords
    }

    pub fn support(&self) -> Vec<bool> {
        self.coords.iter().map(|c| !c.is_zero()).collect()
    }

    /// Geometric equality: same support and some `lambda` over the algebraic
    /// closure with `y_i = lambda^{w_i} x_i`.
    ///
    /// With `g` the gcd of the live weights, `mu = lambda^g` must equal
    /// `prod r_i^{c_i}` where `r_i = y_i / x_i` and `sum c_i w_i = g`, so the
    /// test is exact over the rationals. It implies the cross-power identities
    /// `x_i^{w_j} y_j^{w_i} = y_i^{w_j} x_j^{w_i}`.
    pub fn equals(&self, other: &WpsPoint) -> Result<bool> {
        if self.weights != other.weights {
            return Err(Error::WeightMismatch);
        }
        if self.support() != other.support() {
            return Ok(false);
        }
        let idx: Vec<usize> = (0..self.coords.len()).filter(|&i| !self.coords[i].is_zero()).collect();
        let w: Vec<i64> = idx.iter().map(|&i| self.weights[i] as i64).collect();
        let r: Vec<Q> = idx.iter().map(|&i| &other.coords[i] / &self.coords[i]).collect();
        let (g, c) = bezout(&w);
        let mut mu = Q::one();
        for (ri, &ci) in r.iter().zip(&c) {
            let p = num::pow(ri.clone(), ci.unsigned_abs() as usize);
            mu *= if ci < 0 { p.recip() } else { p };
        }
        Ok(r.iter().zip(&w).all(|(ri, &wi)| num::pow(mu.clone(), (wi / g) as usize) == *ri))
    }

    /// Weighted scaling `x_i -> lambda^{w_i} x_i`.
    pub fn rescale(&self, lambda: &Q) -> Result<WpsPoint> {
        if lambda.is_zero() {
            return Err(Error::ZeroScalar);
        }
        let coords = self
            .coords
            .iter()
            .zip(&self.weights)
            .map(|(x, &w)| x * num::pow(lambda.clone(), w as usize))
            .collect();
        Ok(WpsPoint { weights: self.weights.clone(), coords })
    }

    /// Torus action in the distinguished chart: coordinate `i >= 1` is scaled
    /// by `t_{i-1}^{w_i}`, coordinate 0 is fixed.
    pub fn torus_act(&self, t: &[Q]) -> Result<WpsPoint> {
        if t.len() + 1 != self.coords.len() {
            return Err(Error::InvalidPoint(format!(
                "torus element has {} entries, expected {}",
                t.len(),
                self.coords.len() - 1
            )));
        }
        if t.iter().any(Zero::is_zero) {
            return Err(Error::ZeroScalar);
        }
        let mut coords = self.coords.clone();
        for (i, ti) in t.iter().enumerate() {
            coords[i + 1] *= num::pow(ti.clone(), self.weights[i + 1] as usize);
        }
        Ok(WpsPoint { weights: self.weights.clone(), coords })
    }

    /// True iff the gcd of the weights on the support exceeds 1.
    pub fn is_orbifold_singular(&self) -> bool {
        let g = self
            .coords
            .iter()
            .zip(&self.weights)
            .filter(|(c, _)| !c.is_zero())
            .fold(0u32, |g, (_, &w)| gcd(g, w));
        g > 1
    }

    /// Representative with the first live weight-one coordinate set to 1,
    /// when such a coordinate exists.
    pub fn normalized(&self) -> Option<Vec<Q>> {
        let i = (0..self.coords.len()).find(|&i| self.weights[i] == 1 && !self.coords[i].is_zero())?;
        let lam = self.coords[i].recip();
        Some(self.rescale(&lam).ok()?.coords)
    }

    /// Text form `w=1,1,2;x=1,2,3`.
    pub fn to_text(&self) -> String {
        let w: Vec<String> = self.weights.iter().map(u32::to_string).collect();
        let x: Vec<String> = self.coords.iter().map(Q::to_string).collect();
        format!("w={};x={}", w.join(","), x.join(","))
    }

    pub fn parse(s: &str) -> Result<WpsPoint> {
        let mut weights = None;
        let mut coords = None;
        for part in s.trim().split(';') {
            let part = part.trim();
            if let Some(w) = part.strip_prefix("w=") {
                weights = Some(
                    w.split(',')
                        .map(|x| x.trim().parse::<u32>().map_err(|e| Error::Parse(format!("weight: {e}"))))
                        .collect::<Result<Vec<_>>>()?,
                );
            } else if let Some(x) = part.strip_prefix("x=") {
                coords = Some(x.split(',').map(parse_q).collect::<Result<Vec<_>>>()?);
            } else if !part.is_empty() {
                return Err(Error::Parse(format!("unexpected field '{part}'")));
            }
        }
        let weights = weights.ok_or_else(|| Error::Parse("missing w=".into()))?;
        let coords = coords.ok_or_else(|| Error::Parse("missing x=".into()))?;
        WpsPoint::new(weights, coords)
    }
}

impl fmt::Display for WpsPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let x: Vec<String> = self.coords.iter().map(Q::to_string).collect();
        let w: Vec<String> = self.weights.iter().map(u32::to_string).collect();
        write!(f, "({}) in P({})", x.join(" : "), w.join(","))
    }
}

#[derive(Serialize)]
struct WpsJson {
    weights: Vec<u32>,
    coords: Vec<String>,
    normalized: Option<Vec<String>>,
}

impl Serialize for WpsPoint {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        WpsJson {
            weights: self.weights.clone(),
            coords: self.coords.iter().map(Q::to_string).collect(),
            normalized: self.normalized().map(|v| v.iter().map(Q::to_string).collect()),
        }
        .serialize(s)
    }
}

/// Label such as `P(1,1,2)`.
pub fn weights_label(w: &[u32]) -> String {
    let s: Vec<String> = w.iter().map(u32::to_string).collect();
    format!("P({})", s.join(","))
}

impl WpsPoint {
    /// `(1 : 0 : ... : 0)`-style point helper for tests and reports.
    pub fn unit(weights: Vec<u32>, i: usize) -> WpsPoint {
        let mut coords = vec![Q::zero(); weights.len()];
        coords[i] = Q::one();
        WpsPoint { weights, coords }
    }
}

/// `(g, c)` with `g = gcd(w)` and `sum c_i w_i = g`.
fn bezout(w: &[i64]) -> (i64, Vec<i64>) {
    let mut g = 0i64;
    let mut c: Vec<i64> = Vec::with_capacity(w.len());
    for &wi in w {
        let e = num::integer::Integer::extended_gcd(&g, &wi);
        for cj in c.iter_mut() {
            *cj *= e.x;
        }
        c.push(e.y);
        g = e.gcd;
    }
    (g, c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::germ::q;

    fn pt(w: &[u32], x: &[i64]) -> WpsPoint {
        WpsPoint::new(w.to_vec(), x.iter().map(|&c| q(c)).collect()).unwrap()
    }

    #[test]
    fn equality_examples() {
        assert!(pt(&[1, 1, 2], &[1, 2, 3]).equals(&pt(&[1, 1, 2], &[2, 4, 12])).unwrap());
        assert!(!pt(&[1, 1], &[1, 0]).equals(&pt(&[1, 1], &[0, 1])).unwrap());
        assert!(!pt(&[1, 1, 2], &[1, 2, 3]).equals(&pt(&[1, 1, 2], &[2, 4, 6])).unwrap());
        assert!(pt(&[1, 1], &[1, 0]).equals(&pt(&[1, 1, 2], &[1, 0, 0])).is_err());
        // the cross-power identities alone would identify these
        assert!(!pt(&[2, 2], &[1, 1]).equals(&pt(&[2, 2], &[1, -1])).unwrap());
        assert!(pt(&[2, 3], &[1, 1]).equals(&pt(&[2, 3], &[4, 8])).unwrap());
        assert!(pt(&[1, 2], &[1, 1]).equals(&pt(&[1, 2], &[-1, 1])).unwrap());
    }

    #[test]
    fn torus_examples() {
        let x = pt(&[1, 1, 2], &[1, 1, 1]);
        assert_eq!(x.torus_act(&[q(1), q(1)]).unwrap(), x);
        assert_eq!(x.torus_act(&[q(2), q(3)]).unwrap(), pt(&[1, 1, 2], &[1, 2, 9]));
        assert_eq!(x.torus_act(&[q(0), q(1)]), Err(Error::ZeroScalar));
    }

    #[test]
    fn singular_locus() {
        assert!(pt(&[1, 1, 2], &[0, 0, 1]).is_orbifold_singular());
        assert!(!pt(&[1, 1, 2], &[1, 0, 5]).is_orbifold_singular());
        assert!(pt(&[2, 4, 3], &[1, 1, 0]).is_orbifold_singular());
    }

    #[test]
    fn text_roundtrip() {
        let x = WpsPoint::parse("w=1,1,2;x=1,2,3").unwrap();
        assert_eq!(x, pt(&[1, 1, 2], &[1, 2, 3]));
        assert_eq!(WpsPoint::parse(&x.to_text()).unwrap(), x);
        assert!(WpsPoint::parse("w=1,1;x=0,0").is_err());
    }
}
