//! 2x2 matrices of germs: gauge conjugation, the local normal form of a
//! Higgs field, the Hecke-transformed Higgs field and eigenline twist orders.
//!
//! The one-form factor `dz` is implicit; every matrix is written in a fixed
//! local frame.

use std::fmt;

use num::{Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::germ::{q, Germ, Order, Q};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GermMatrix2 {
    pub m: [[Germ; 2]; 2],
}

impl GermMatrix2 {
    pub fn new(m11: Germ, m12: Germ, m21: Germ, m22: Germ) -> GermMatrix2 {
        GermMatrix2 { m: [[m11, m12], [m21, m22]] }
    }

    pub fn identity(trunc: i64) -> GermMatrix2 {
        GermMatrix2::diag(Germ::one(trunc), Germ::one(trunc))
    }

    pub fn diag(a: Germ, d: Germ) -> GermMatrix2 {
        let (ta, td) = (a.trunc(), d.trunc());
        GermMatrix2::new(a, Germ::zero(ta), Germ::zero(td), d)
    }

    /// Matrix with constant rational entries.
    pub fn constant(e: [[Q; 2]; 2], trunc: i64) -> GermMatrix2 {
        let c = |x: &Q| Germ::constant(x.clone(), trunc);
        GermMatrix2::new(c(&e[0][0]), c(&e[0][1]), c(&e[1][0]), c(&e[1][1]))
    }

    pub fn get(&self, i: usize, j: usize) -> &Germ {
        &self.m[i][j]
    }

    /// Common reliable window of the four entries.
    pub fn window(&self) -> i64 {
        self.m.iter().flatten().map(Germ::trunc).min().unwrap()
    }

    pub fn map(&self, f: impl Fn(&Germ) -> Germ) -> GermMatrix2 {
        GermMatrix2 { m: [[f(&self.m[0][0]), f(&self.m[0][1])], [f(&self.m[1][0]), f(&self.m[1][1])]] }
    }

    pub fn truncate(&self, t: i64) -> GermMatrix2 {
        self.map(|g| g.truncate(t))
    }

    pub fn scale(&self, c: &Germ) -> GermMatrix2 {
        self.map(|g| g * c)
    }

    pub fn shift(&self, k: i64) -> GermMatrix2 {
        self.map(|g| g.shift(k))
    }

    pub fn add(&self, o: &GermMatrix2) -> GermMatrix2 {
        let e = |i: usize, j: usize| &self.m[i][j] + &o.m[i][j];
        GermMatrix2::new(e(0, 0), e(0, 1), e(1, 0), e(1, 1))
    }

    pub fn sub(&self, o: &GermMatrix2) -> GermMatrix2 {
        self.add(&o.map(Germ::neg))
    }

    pub fn mul(&self, o: &GermMatrix2) -> GermMatrix2 {
        let e = |i: usize, j: usize| &(&self.m[i][0] * &o.m[0][j]) + &(&self.m[i][1] * &o.m[1][j]);
        GermMatrix2::new(e(0, 0), e(0, 1), e(1, 0), e(1, 1))
    }

    pub fn det(&self) -> Germ {
        &(&self.m[0][0] * &self.m[1][1]) - &(&self.m[0][1] * &self.m[1][0])
    }

    pub fn trace(&self) -> Germ {
        &self.m[0][0] + &self.m[1][1]
    }

    pub fn adjugate(&self) -> GermMatrix2 {
        GermMatrix2::new(
            self.m[1][1].clone(),
            self.m[0][1].neg(),
            self.m[1][0].neg(),
            self.m[0][0].clone(),
        )
    }

    pub fn inverse(&self) -> Result<GermMatrix2> {
        let d = self.det().invert().map_err(|_| Error::SingularGauge)?;
        Ok(self.adjugate().scale(&d))
    }

    /// Entrywise agreement on the common window.
    pub fn agrees(&self, o: &GermMatrix2) -> bool {
        self.m.iter().flatten().zip(o.m.iter().flatten()).all(|(a, b)| a.agrees(b))
    }

    /// Minimum entry order.
    pub fn order(&self) -> Order {
        self.m.iter().flatten().map(Germ::order).min().unwrap()
    }

    pub fn is_holomorphic(&self) -> bool {
        self.m.iter().flatten().all(|g| g.is_zero() || g.valuation() >= 0)
    }

    /// Four germ strings in row-major order separated by `;`.
    pub fn to_text(&self) -> String {
        self.m.iter().flatten().map(|g| format!("[{}]", g.to_text())).collect::<Vec<_>>().join(";")
    }

    /// Parses four bracketed germ strings, e.g. `[v=0;t=4;1];[0];[0];[1]`.
    pub fn parse(s: &str, default_trunc: i64) -> Result<GermMatrix2> {
        let parts: Vec<&str> = s
            .split(']')
            .map(|p| p.trim().trim_start_matches(';').trim().trim_start_matches('['))
            .filter(|p| !p.is_empty())
            .collect();
        if parts.len() != 4 {
            return Err(Error::Parse(format!("expected 4 bracketed germs, found {}", parts.len())));
        }
        let g = |i: usize| Germ::parse(parts[i], default_trunc);
        Ok(GermMatrix2::new(g(0)?, g(1)?, g(2)?, g(3)?))
    }
}

impl fmt::Display for GermMatrix2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.m[0][0], self.m[0][1], self.m[1][0], self.m[1][1])
    }
}

impl Serialize for GermMatrix2 {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.m.serialize(s)
    }
}

/// `g^{-1} phi g`, with the inverse taken through the adjugate.
pub fn conjugate(phi: &GermMatrix2, g: &GermMatrix2) -> Result<GermMatrix2> {
    Ok(g.inverse()?.mul(phi).mul(g))
}

/// The local model `z^D [[0,1],[z^(2L-2D),0]]`.
pub fn companion(d: i64, lambda: i64, trunc: i64) -> GermMatrix2 {
    GermMatrix2::new(
        Germ::zero(trunc),
        Germ::monomial(q(1), d, trunc),
        Germ::monomial(q(1), 2 * lambda - d, trunc),
        Germ::zero(trunc),
    )
}

/// Default working window for a zero of local order `lambda`.
pub fn default_trunc(lambda: i64) -> i64 {
    2 * lambda + 4
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LocalHiggsData {
    pub matrix: GermMatrix2,
    pub lambda_order: i64,
}

impl LocalHiggsData {
    /// Checks tracelessness and `ord det = 2 lambda_order`.
    pub fn new(matrix: GermMatrix2, lambda_order: i64) -> Result<LocalHiggsData> {
        if !matrix.trace().is_zero() {
            return Err(Error::InvalidHiggs("trace is nonzero".into()));
        }
        match matrix.det().order() {
            Order::Infinite => return Err(Error::IndeterminateOrder),
            Order::Finite(k) if k % 2 != 0 => {
                return Err(Error::InvalidHiggs(format!("determinant has odd order {k}")))
            }
            Order::Finite(k) if k != 2 * lambda_order => {
                return Err(Error::InvalidHiggs(format!(
                    "determinant order {k} does not match 2*{lambda_order}"
                )))
            }
            _ => {}
        }
        Ok(LocalHiggsData { matrix, lambda_order })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NormalForm {
    pub d: i64,
    pub lambda: i64,
    pub gauge: GermMatrix2,
    /// `gauge^{-1} M gauge = [[0, z^D], [z^(2L-D) u, 0]]` with `u = -det M / z^(2L)`.
    pub conjugated: GermMatrix2,
}

/// Brings a traceless germ matrix to the shape `z^D [[0,1],[z^(2L-2D) u,0]]`.
///
/// After factoring out `z^D`, a constant change of basis to a cyclic frame
/// `(phi(0) e, e)` makes the constant term `[[0,1],[*,0]]`; conjugating by
/// `[[b,0],[-a,1]]` then kills the diagonal without square roots.
pub fn normal_form(h: &LocalHiggsData) -> Result<NormalForm> {
    let m = &h.matrix;
    let d = m.order().finite().ok_or(Error::IndeterminateOrder)?;
    let lambda = h.lambda_order;
    if d > lambda {
        return Err(Error::InvalidHiggs(format!("entry order {d} exceeds lambda order {lambda}")));
    }
    let phi = m.shift(-d);
    let c = |i: usize, j: usize| phi.get(i, j).coeff(0);
    let (a0, b0, c0) = (c(0, 0), c(0, 1), c(1, 0));
    let e: [Q; 2] = if !b0.is_zero() {
        [q(0), q(1)]
    } else if !c0.is_zero() {
        [q(1), q(0)]
    } else {
        [q(1), q(1)]
    };
    let f1 = [&a0 * &e[0] + &b0 * &e[1], &c0 * &e[0] - &a0 * &e[1]];
    let w = phi.window();
    let p = GermMatrix2::constant([[f1[0].clone(), e[0].clone()], [f1[1].clone(), e[1].clone()]], w);
    let psi = conjugate(&phi, &p)?;
    let (a, b) = (psi.get(0, 0).clone(), psi.get(0, 1).clone());
    let tw = b.trunc();
    let g2 = GermMatrix2::new(b, Germ::zero(tw), a.neg(), Germ::one(tw));
    let gauge = p.mul(&g2);
    let conjugated = conjugate(m, &gauge)?;
    Ok(NormalForm { d, lambda, gauge, conjugated })
}

/// Higgs field of the Hecke transformation in direction `(a, b)` at a zero of
/// local order `d`, written in the induced frame:
/// `[[ (a/b) z^d, b^2 - a^2 ], [ z^(2d)/b^2, -(a/b) z^d ]]`.
///
/// If `b` vanishes in its window the transition matrix with the roles of
/// `a` and `b` exchanged is used, giving the same formula with `a <-> b`.
pub fn hecke_higgs(d: i64, a: &Germ, b: &Germ) -> Result<GermMatrix2> {
    if a.is_zero() && b.is_zero() {
        return Err(Error::InconsistentHecke("both components vanish".into()));
    }
    let (num, den) = if b.is_zero() { (b, a) } else { (a, b) };
    let ratio = num.div(den)?.shift(d);
    let den_sq = den * den;
    let m = GermMatrix2::new(
        ratio.clone(),
        &den_sq - &(num * num),
        den_sq.invert()?.shift(2 * d),
        ratio.neg(),
    );
    if !m.is_holomorphic() {
        return Err(Error::InconsistentHecke("Higgs field has a pole".into()));
    }
    Ok(m)
}

/// Eigenvalue `lambda = z^L sqrt(u)` where `det m = -z^(2L) u`.
pub fn eigenvalue(m: &GermMatrix2, lambda_order: i64) -> Result<Germ> {
    let minus_det = m.det().neg();
    if minus_det.order() != Order::Finite(2 * lambda_order) {
        return Err(Error::InvalidHiggs("determinant order does not match".into()));
    }
    minus_det.sqrt()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct TwistOrders {
    pub plus: i64,
    pub minus: i64,
}

/// Order of the eigen-section for eigenvalue `mu`, cleared of the factor the
/// cofactor construction introduces. The cofactor vector `(mu + m11, m21)` is
/// `sqrt(m21)` times the section; when `m21` vanishes the transposed cofactor
/// `(m12, mu - m11)` is used with `m12`; a diagonal matrix has untwisted
/// eigenlines.
fn cleared_order(m: &GermMatrix2, mu: &Germ) -> Result<i64> {
    let (m11, m12, m21) = (m.get(0, 0), m.get(0, 1), m.get(1, 0));
    let (v, off) = if !m21.is_zero() {
        ([mu + m11, m21.clone()], m21)
    } else if !m12.is_zero() {
        ([m12.clone(), mu - m11], m12)
    } else {
        return Ok(0);
    };
    let ov = v[0].order().min(v[1].order()).finite().ok_or(Error::IndeterminateOrder)?;
    let oo = off.order().finite().ok_or(Error::IndeterminateOrder)?;
    if oo % 2 != 0 {
        return Err(Error::InvalidHiggs("off-diagonal entry of odd order".into()));
    }
    let r = ov - oo / 2;
    if ov >= v[0].trunc().min(v[1].trunc()) {
        return Err(Error::IndeterminateOrder);
    }
    Ok(r)
}

/// Twist orders of the two eigenline inclusions.
///
/// `plus` is the eigenline whose section in the Hecke frame is
/// `(b - a, -z^d / b)`: it acquires a twist exactly when `a` and `b` agree to
/// high order. `minus` pairs with `(b + a, z^d / b)`. At an odd zero both equal
/// `min(ord a, ord b)`.
pub fn eigen_twist_orders(m: &GermMatrix2, lambda_order: i64) -> Result<TwistOrders> {
    let lam = eigenvalue(m, lambda_order)?;
    let lam = if lam.leading().is_some_and(|c| c.is_negative()) { lam.neg() } else { lam };
    let plus = cleared_order(m, &lam.neg())?;
    let minus = cleared_order(m, &lam)?;
    Ok(TwistOrders { plus, minus })
}

/// Vanishing divisor coefficient: the minimum entry order.
pub fn vanishing_divisor(m: &GermMatrix2) -> Result<i64> {
    m.order().finite().ok_or(Error::IndeterminateOrder)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::germ::Germ;

    fn g(val: i64, c: &[i64], t: i64) -> Germ {
        Germ::from_ints(val, c, t)
    }

    #[test]
    fn conjugate_by_unipotent() {
        let t = 8;
        let phi = companion(0, 1, t);
        let u = GermMatrix2::new(g(0, &[1], t), g(0, &[1], t), Germ::zero(t), g(0, &[1], t));
        let c = conjugate(&phi, &u).unwrap();
        let expect = GermMatrix2::new(g(2, &[-1], t), g(0, &[1, 0, -1], t), g(2, &[1], t), g(2, &[1], t));
        assert!(c.agrees(&expect));
        assert!(conjugate(&phi, &GermMatrix2::identity(t)).unwrap().agrees(&phi));
    }

    #[test]
    fn normal_form_recovers_scramble() {
        let t = 8;
        let scrambled = GermMatrix2::new(g(2, &[-1], t), g(0, &[1, 0, -1], t), g(2, &[1], t), g(2, &[1], t));
        let nf = normal_form(&LocalHiggsData::new(scrambled, 1).unwrap()).unwrap();
        assert_eq!((nf.d, nf.lambda), (0, 1));
        assert!(nf.conjugated.agrees(&companion(0, 1, t)));
        let already = normal_form(&LocalHiggsData::new(companion(0, 1, t), 1).unwrap()).unwrap();
        assert!(already.gauge.agrees(&GermMatrix2::identity(t)));
        let high = normal_form(&LocalHiggsData::new(companion(2, 3, 10), 3).unwrap()).unwrap();
        assert_eq!((high.d, high.lambda), (2, 3));
    }

    #[test]
    fn odd_determinant_rejected() {
        let m = companion(0, 1, 10);
        let bad = GermMatrix2::new(Germ::zero(10), g(2, &[1], 10), g(3, &[1], 10), Germ::zero(10));
        assert!(matches!(LocalHiggsData::new(bad, 2), Err(Error::InvalidHiggs(_))));
        assert!(LocalHiggsData::new(m, 2).is_err());
    }

    #[test]
    fn hecke_higgs_substitution() {
        let t = 20;
        let m = hecke_higgs(5, &Germ::zero(t), &g(2, &[1], t)).unwrap();
        assert!(m.agrees(&GermMatrix2::new(Germ::zero(t), g(4, &[1], t), g(6, &[1], t), Germ::zero(t))));
        let m = hecke_higgs(5, &g(3, &[1], t), &g(0, &[1], t)).unwrap();
        let e = GermMatrix2::new(g(8, &[1], t), g(0, &[1, 0, 0, 0, 0, 0, -1], t), g(10, &[1], t), g(8, &[-1], t));
        assert!(m.agrees(&e));
        let m = hecke_higgs(3, &g(1, &[1], t), &g(0, &[1], t)).unwrap();
        let e = GermMatrix2::new(g(4, &[1], t), g(0, &[1, 0, -1], t), g(6, &[1], t), g(4, &[-1], t));
        assert!(m.agrees(&e));
        assert_eq!(vanishing_divisor(&GermMatrix2::new(Germ::zero(t), g(4, &[1], t), g(6, &[1], t), Germ::zero(t))).unwrap(), 4);
    }

    #[test]
    fn twist_examples() {
        let t = 12;
        let split = GermMatrix2::diag(g(1, &[1], t), g(1, &[-1], t));
        assert_eq!(eigen_twist_orders(&split, 1).unwrap(), TwistOrders { plus: 0, minus: 0 });
        let m = hecke_higgs(5, &g(3, &[1], t), &g(0, &[1], t)).unwrap();
        assert_eq!(eigen_twist_orders(&m, 5).unwrap(), TwistOrders { plus: 0, minus: 0 });
        let even = hecke_higgs(1, &g(0, &[1], t), &g(0, &[1], t)).unwrap();
        assert_eq!(eigen_twist_orders(&even, 1).unwrap(), TwistOrders { plus: 1, minus: 0 });
        let even = hecke_higgs(1, &g(0, &[1], t), &g(0, &[-1], t)).unwrap();
        assert_eq!(eigen_twist_orders(&even, 1).unwrap(), TwistOrders { plus: 0, minus: 1 });
    }
}
