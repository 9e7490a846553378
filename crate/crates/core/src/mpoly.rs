//! Sparse multivariate polynomials with rational coefficients, used to hold
//! the generated chart invariants and gluing maps.

use std::collections::BTreeMap;
use std::fmt;

use num::{One, Signed, Zero};
use serde::Serialize;

use crate::germ::Q;

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct MPoly {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, Q>,
}

impl MPoly {
    pub fn zero(nvars: usize) -> MPoly {
        MPoly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: Q) -> MPoly {
        let mut p = MPoly::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(vec![0; nvars], c);
        }
        p
    }

    pub fn one(nvars: usize) -> MPoly {
        MPoly::constant(nvars, Q::one())
    }

    pub fn var(nvars: usize, i: usize) -> MPoly {
        let mut e = vec![0; nvars];
        e[i] = 1;
        let mut p = MPoly::zero(nvars);
        p.terms.insert(e, Q::one());
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &Q)> {
        self.terms.iter()
    }

    fn insert(&mut self, e: Vec<u32>, c: Q) {
        let entry = self.terms.entry(e.clone()).or_insert_with(Q::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn add(&self, o: &MPoly) -> MPoly {
        let mut r = self.clone();
        for (e, c) in &o.terms {
            r.insert(e.clone(), c.clone());
        }
        r
    }

    pub fn neg(&self) -> MPoly {
        MPoly { nvars: self.nvars, terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect() }
    }

    pub fn sub(&self, o: &MPoly) -> MPoly {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &MPoly) -> MPoly {
        let mut r = MPoly::zero(self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &o.terms {
                let e = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                r.insert(e, c1 * c2);
            }
        }
        r
    }

    pub fn pow(&self, k: u32) -> MPoly {
        (0..k).fold(MPoly::one(self.nvars), |acc, _| acc.mul(self))
    }

    pub fn eval(&self, x: &[Q]) -> Q {
        assert_eq!(x.len(), self.nvars, "wrong number of arguments");
        let mut s = Q::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (xi, &k) in x.iter().zip(e) {
                if k > 0 {
                    t *= num::pow(xi.clone(), k as usize);
                }
            }
            s += t;
        }
        s
    }

    /// Substitutes `subs[i]` for variable `i`; the result lives in the ring of
    /// the substituted polynomials.
    pub fn compose(&self, subs: &[MPoly]) -> MPoly {
        assert_eq!(subs.len(), self.nvars);
        let n = subs.first().map_or(0, MPoly::nvars);
        let mut r = MPoly::zero(n);
        for (e, c) in &self.terms {
            let mut t = MPoly::constant(n, c.clone());
            for (s, &k) in subs.iter().zip(e) {
                if k > 0 {
                    t = t.mul(&s.pow(k));
                }
            }
            r = r.add(&t);
        }
        r
    }

    /// Degree when variable `i` carries weight `w[i]`; `None` if the
    /// polynomial is not homogeneous for that grading.
    pub fn weighted_degree(&self, w: &[u32]) -> Option<u32> {
        let mut degs = self.terms.keys().map(|e| e.iter().zip(w).map(|(a, b)| a * b).sum::<u32>());
        let d = degs.next()?;
        degs.all(|x| x == d).then_some(d)
    }

    /// Monomial list `[(coefficient, exponents)]` for serialization.
    pub fn monomials(&self) -> Vec<(String, Vec<u32>)> {
        self.terms.iter().map(|(e, c)| (c.to_string(), e.clone())).collect()
    }

    /// Renders with the given variable names.
    pub fn render(&self, names: &[String]) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut out = String::new();
        for (i, (e, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            if i == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mono: Vec<String> = e
                .iter()
                .zip(names)
                .filter(|(k, _)| **k > 0)
                .map(|(k, n)| if *k == 1 { n.clone() } else { format!("{n}^{k}") })
                .collect();
            if mono.is_empty() {
                out.push_str(&a.to_string());
            } else {
                if !a.is_one() {
                    out.push_str(&format!("{a}*"));
                }
                out.push_str(&mono.join("*"));
            }
        }
        out
    }
}

impl fmt::Display for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (0..self.nvars).map(|i| format!("v{i}")).collect();
        write!(f, "{}", self.render(&names))
    }
}

impl Serialize for MPoly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.monomials().serialize(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::germ::q;

    #[test]
    fn arithmetic_and_eval() {
        let x = MPoly::var(2, 0);
        let y = MPoly::var(2, 1);
        let p = x.add(&y).mul(&x.sub(&y));
        assert_eq!(p, x.pow(2).sub(&y.pow(2)));
        assert_eq!(p.eval(&[q(3), q(2)]), q(5));
        assert_eq!(p.weighted_degree(&[1, 1]), Some(2));
        assert_eq!(x.add(&y.pow(2)).weighted_degree(&[1, 1]), None);
        assert_eq!(x.add(&y.pow(2)).weighted_degree(&[2, 1]), Some(2));
    }

    #[test]
    fn compose_substitutes() {
        let x = MPoly::var(1, 0);
        let p = x.pow(2).add(&MPoly::one(1));
        let s = MPoly::var(2, 0).add(&MPoly::var(2, 1));
        let r = p.compose(&[s]);
        assert_eq!(r.eval(&[q(1), q(2)]), q(10));
    }
}
