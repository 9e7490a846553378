//! Hecke parameters at a zero of odd order `d`: the classes `(a, b)` with `a`
//! odd and `b` even, their orbits under even unit germs, the affine
//! coordinates on each stratum `V_n`, and the invariant-polynomial charts into
//! weighted projective spaces. The even-zero variant lives at the bottom.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use num::{One, Zero};
use once_cell::sync::Lazy;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::germ::{q, Germ, Order, Q};
use crate::local_higgs::{eigen_twist_orders, hecke_higgs, vanishing_divisor, TwistOrders};
use crate::mpoly::MPoly;
use crate::wps::WpsPoint;

/// Stratum of a Hecke parameter: `V(n)` with `n = min(ord a, ord b)`, or the
/// zero class.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Stratum {
    V(i64),
    Zero,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HeckeParam {
    d: i64,
    a: Germ,
    b: Germ,
    stratum: Stratum,
}

impl HeckeParam {
    /// Reduces `(a, b)` to its class: modulo `z^(d-n)` with
    /// `n = min(ord a, ord b)`. The input window must determine the class.
    pub fn new(d: i64, a: Germ, b: Germ) -> Result<HeckeParam> {
        if d < 1 || d % 2 == 0 {
            return Err(Error::InvalidParam(format!("d = {d} must be odd and positive")));
        }
        let t = a.trunc().min(b.trunc()).min(d);
        let (a, b) = (a.truncate(t), b.truncate(t));
        if a.valuation() < 0 || b.valuation() < 0 {
            return Err(Error::InvalidParam("components must be holomorphic".into()));
        }
        if !a.is_odd() {
            return Err(Error::InvalidParam("a must be odd under z -> -z".into()));
        }
        if !b.is_even() {
            return Err(Error::InvalidParam("b must be even under z -> -z".into()));
        }
        let half = (d - 1) / 2;
        match a.order().min(b.order()) {
            Order::Infinite if t > half => Ok(HeckeParam::zero_class(d)),
            Order::Infinite => Err(Error::InvalidParam("window too short to fix the class".into())),
            Order::Finite(n) if n > half => Ok(HeckeParam::zero_class(d)),
            Order::Finite(n) if t < d - n => {
                Err(Error::InvalidParam(format!("window z^{t} too short for a class of order {n}")))
            }
            Order::Finite(n) => Ok(HeckeParam {
                d,
                a: a.truncate(d - n),
                b: b.truncate(d - n),
                stratum: Stratum::V(n),
            }),
        }
    }

    pub fn zero_class(d: i64) -> HeckeParam {
        HeckeParam { d, a: Germ::zero(0), b: Germ::zero(0), stratum: Stratum::Zero }
    }

    /// Builds a class from integer coefficient lists (from `z^0`), window `d`.
    pub fn from_ints(d: i64, a: &[i64], b: &[i64]) -> Result<HeckeParam> {
        HeckeParam::new(d, Germ::from_ints(0, a, d), Germ::from_ints(0, b, d))
    }

    pub fn d(&self) -> i64 {
        self.d
    }

    pub fn a(&self) -> &Germ {
        &self.a
    }

    pub fn b(&self) -> &Germ {
        &self.b
    }

    pub fn stratum(&self) -> Stratum {
        self.stratum
    }

    /// `n`, or `None` for the zero class.
    pub fn n(&self) -> Option<i64> {
        match self.stratum {
            Stratum::V(n) => Some(n),
            Stratum::Zero => None,
        }
    }
}

impl fmt::Display for HeckeParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.stratum {
            Stratum::Zero => write!(f, "[0] (d={})", self.d),
            Stratum::V(_) => write!(f, "({}, {}) (d={})", self.a, self.b, self.d),
        }
    }
}

impl Serialize for HeckeParam {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct J<'a> {
            d: i64,
            a: &'a Germ,
            b: &'a Germ,
            stratum: Stratum,
        }
        J { d: self.d, a: &self.a, b: &self.b, stratum: self.stratum }.serialize(s)
    }
}

/// Even unit germ modulo `z^d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupElement {
    d: i64,
    phi: Germ,
}

impl GroupElement {
    pub fn new(d: i64, phi: Germ) -> Result<GroupElement> {
        if phi.trunc() < d {
            return Err(Error::InvalidParam("group element known below z^d only".into()));
        }
        let phi = phi.truncate(d);
        if phi.valuation() != 0 || phi.is_zero() {
            return Err(Error::InvalidParam("group element must be a unit".into()));
        }
        if !phi.is_even() {
            return Err(Error::InvalidParam("group element must be even".into()));
        }
        Ok(GroupElement { d, phi })
    }

    pub fn identity(d: i64) -> GroupElement {
        GroupElement { d, phi: Germ::one(d) }
    }

    pub fn phi(&self) -> &Germ {
        &self.phi
    }

    /// True for the unipotent part `1 + phi_2 z^2 + ...`.
    pub fn is_unipotent(&self) -> bool {
        self.phi.coeff(0).is_one()
    }
}

/// `(phi a, phi b)`, reduced.
pub fn act(g: &GroupElement, p: &HeckeParam) -> Result<HeckeParam> {
    if g.d != p.d {
        return Err(Error::MismatchedOrder(g.d, p.d));
    }
    if p.stratum == Stratum::Zero {
        return Ok(p.clone());
    }
    HeckeParam::new(p.d, &g.phi * &p.a, &g.phi * &p.b)
}

pub fn stratum_of(p: &HeckeParam) -> Stratum {
    p.stratum
}

/// Number of strata `V_0, ..., V_{(d-1)/2}`.
pub fn strata_count(d: i64) -> i64 {
    (d + 1) / 2
}

/// Ratio `u` of the higher-order component over the one of order `n`,
/// modulo `z^(d-2n)`: `a/b` for even `n`, `b/a` for odd `n`. Always odd.
fn ratio(p: &HeckeParam) -> Option<(i64, Germ)> {
    let n = p.n()?;
    let r = if n % 2 == 0 { p.a.div(&p.b) } else { p.b.div(&p.a) };
    Some((n, r.expect("component of order n is invertible").truncate(p.d - 2 * n)))
}

/// Unique orbit representative: `(z^n u, z^n)` for even `n`,
/// `(z^n, z^n u)` for odd `n`.
pub fn canonicalize(p: &HeckeParam) -> HeckeParam {
    let Some((n, u)) = ratio(p) else {
        return p.clone();
    };
    let w = p.d - n;
    let zn = Germ::monomial(q(1), n, w);
    let zu = u.shift(n).truncate(w);
    let (a, b) = if n % 2 == 0 { (zu, zn) } else { (zn, zu) };
    HeckeParam { d: p.d, a, b, stratum: p.stratum }
}

/// Group element taking `p` to its canonical form.
pub fn canonicalizing_element(p: &HeckeParam) -> GroupElement {
    let Some(n) = p.n() else {
        return GroupElement::identity(p.d);
    };
    let lead = if n % 2 == 0 { &p.b } else { &p.a };
    let unit = lead.shift(-n).invert().expect("leading component is a unit after shifting");
    GroupElement { d: p.d, phi: unit.lift(p.d) }
}

pub fn same_orbit(p: &HeckeParam, r: &HeckeParam) -> bool {
    p.d == r.d && canonicalize(p) == canonicalize(r)
}

/// Affine coordinates of the orbit inside `V_n`: the coefficients of `u` on
/// `z, z^3, ..., z^(d-2n-2)`.
pub fn u_coordinate(p: &HeckeParam) -> Result<Vec<Q>> {
    let (n, u) = ratio(p).ok_or_else(|| Error::InvalidParam("zero class has no coordinates".into()))?;
    if n == (p.d - 1) / 2 {
        return Err(Error::PointStratum);
    }
    Ok((0..(p.d - 2 * n - 1) / 2).map(|i| u.coeff(2 * i + 1)).collect())
}

/// Canonical class with the given `u`-coordinates in `V_n`.
pub fn from_u_coordinate(d: i64, n: i64, u: &[Q]) -> Result<HeckeParam> {
    if n < 0 || n > (d - 1) / 2 || u.len() as i64 != (d - 2 * n - 1) / 2 {
        return Err(Error::InvalidParam("u-coordinate length does not match the stratum".into()));
    }
    let w = d - n;
    let zn = Germ::monomial(q(1), n, w);
    let terms: Vec<(i64, Q)> = u.iter().enumerate().map(|(i, c)| (n + 2 * i as i64 + 1, c.clone())).collect();
    let zu = Germ::from_terms(&terms, w);
    let (a, b) = if n % 2 == 0 { (zu, zn) } else { (zn, zu) };
    HeckeParam::new(d, a, b)
}

// ---------------------------------------------------------------------------
// Charts

/// Chart identifiers: the strata `V_n`, the charts `N(l, n)` with `n`, `l` of
/// opposite parity, and the refined charts `kN(k, l, n)` with `n`, `l` of equal
/// parity and `k` of the other parity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum ChartId {
    V { n: i64 },
    N { l: i64, n: i64 },
    KN { k: i64, l: i64, n: i64 },
}

impl fmt::Display for ChartId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ChartId::V { n } => write!(f, "V{n}"),
            ChartId::N { l, n } => write!(f, "N({l},{n})"),
            ChartId::KN { k, l, n } => write!(f, "{k}N({l},{n})"),
        }
    }
}

impl ChartId {
    pub fn parse(s: &str) -> Result<ChartId> {
        let s = s.trim();
        let nums = |body: &str| -> Result<Vec<i64>> {
            body.trim_end_matches(')')
                .split(',')
                .map(|x| x.trim().parse::<i64>().map_err(|e| Error::Parse(format!("chart '{s}': {e}"))))
                .collect()
        };
        if let Some(n) = s.strip_prefix('V') {
            return Ok(ChartId::V { n: n.parse().map_err(|e| Error::Parse(format!("chart '{s}': {e}")))? });
        }
        if let Some(body) = s.strip_prefix("N(") {
            if let [l, n] = nums(body)?[..] {
                return Ok(ChartId::N { l, n });
            }
        }
        if let Some((k, body)) = s.split_once("N(") {
            let k = k.parse().map_err(|e| Error::Parse(format!("chart '{s}': {e}")))?;
            if let [l, n] = nums(body)?[..] {
                return Ok(ChartId::KN { k, l, n });
            }
        }
        Err(Error::Parse(format!("unknown chart '{s}'")))
    }
}

/// Shape of an invariant-polynomial chart: the leading component has order
/// `lead` (it is `a` when `lead` is odd), the other starts at `n`, and there
/// are `k_count` derived coordinates.
#[derive(Clone, Copy, Debug)]
struct Shape {
    lead: i64,
    n: i64,
    /// Order of the other component on the deeper part, if any.
    deep: Option<i64>,
    k_count: i64,
}

fn shape(c: ChartId, d: i64) -> Option<Shape> {
    let half = (d - 1) / 2;
    match c {
        ChartId::V { .. } => None,
        ChartId::N { l, n } => {
            let ok = 0 <= n && n < l && l <= half && (l - n) % 2 == 1;
            ok.then_some(Shape { lead: l, n, deep: None, k_count: (d - l - n) / 2 })
        }
        ChartId::KN { k, l, n } => {
            let ok = 0 <= n && n < l && l <= half && (l - n) % 2 == 0 && k > l && (k - l) % 2 == 1 && k <= d - n - 2;
            let deep = (k <= d - l - 2).then_some(l);
            ok.then_some(Shape { lead: k, n, deep, k_count: (d - k - n) / 2 })
        }
    }
}

pub fn is_valid_chart(c: ChartId, d: i64) -> bool {
    match c {
        ChartId::V { n } => 0 <= n && n <= (d - 1) / 2,
        _ => shape(c, d).is_some(),
    }
}

/// Every chart used for the order-`d` atlas.
pub fn charts(d: i64) -> Vec<ChartId> {
    let half = (d - 1) / 2;
    let mut out: Vec<ChartId> = (0..=half).map(|n| ChartId::V { n }).collect();
    for n in 0..=half {
        for l in n + 1..=half {
            if (l - n) % 2 == 1 {
                out.push(ChartId::N { l, n });
            } else {
                let mut k = l + 1;
                while k <= d - n - 2 {
                    out.push(ChartId::KN { k, l, n });
                    k += 2;
                }
            }
        }
    }
    out
}

pub fn chart_weights(c: ChartId, d: i64) -> Result<Vec<u32>> {
    match c {
        ChartId::V { n } if is_valid_chart(c, d) => Ok(vec![1; ((d - 2 * n + 1) / 2) as usize]),
        _ => {
            let s = shape(c, d).ok_or_else(|| Error::ChartMembership(format!("{c} is not a chart for d={d}")))?;
            let mut w = vec![1, 1];
            w.extend(2..=s.k_count as u32);
            Ok(w)
        }
    }
}

fn split_lead<'a>(lead: i64, p: &'a HeckeParam) -> (&'a Germ, &'a Germ) {
    if lead % 2 == 1 {
        (&p.a, &p.b)
    } else {
        (&p.b, &p.a)
    }
}

/// Chart membership by the orders of the two components.
pub fn contains(c: ChartId, p: &HeckeParam) -> bool {
    if !is_valid_chart(c, p.d) {
        return false;
    }
    let Some(pn) = p.n() else {
        return false;
    };
    match c {
        ChartId::V { n } => pn == n,
        _ => {
            let s = shape(c, p.d).unwrap();
            let (lead, other) = split_lead(s.lead, p);
            if lead.order() != Order::Finite(s.lead) {
                return false;
            }
            let oo = other.order();
            if oo == Order::Finite(s.n) {
                return true;
            }
            match (c, s.deep) {
                (ChartId::N { l, .. }, _) => oo > Order::Finite(l),
                (ChartId::KN { .. }, Some(l)) => oo == Order::Finite(l),
                _ => false,
            }
        }
    }
}

/// Generated invariants of one chart.
#[derive(Clone, Debug, Serialize)]
pub struct ChartPolys {
    pub chart: ChartId,
    pub weights: Vec<u32>,
    /// Variable names, e.g. `a1`, `a3`, `b0`, `b2`.
    pub vars: Vec<String>,
    /// Exponents fed into each variable, in order: leading coefficient, the
    /// higher coefficients of the leading component, then the other component.
    #[serde(skip)]
    slots: Vec<(bool, i64)>,
    pub generators: Vec<MPoly>,
}

/// Symbolic series division. With `x` the leading coefficient, `h_j` the
/// coefficient of `z^(lead+2j)` and `g_j` that of `z^(n+2j)` in the other
/// component, `B = other * x z^lead / lead_component` has
/// `x^i B_(n+2i) = sum_j g_j x^j c_(i-j)`, where `c_0 = 1` and
/// `c_k = -sum_(j>=1) h_j x^(j-1) c_(k-j)` clears `1/(1 + sum (h_j/x) z^(2j))`.
fn generate(c: ChartId, d: i64) -> Result<ChartPolys> {
    let s = shape(c, d).ok_or_else(|| Error::ChartMembership(format!("{c} has no invariant polynomials")))?;
    let kc = s.k_count as usize;
    let nv = 2 * kc;
    let lead_is_a = s.lead % 2 == 1;
    let (lc, oc) = if lead_is_a { ('a', 'b') } else { ('b', 'a') };
    let mut vars = vec![format!("{lc}{}", s.lead)];
    let mut slots = vec![(lead_is_a, s.lead)];
    for j in 1..kc as i64 {
        vars.push(format!("{lc}{}", s.lead + 2 * j));
        slots.push((lead_is_a, s.lead + 2 * j));
    }
    for j in 0..kc as i64 {
        vars.push(format!("{oc}{}", s.n + 2 * j));
        slots.push((!lead_is_a, s.n + 2 * j));
    }
    let x = MPoly::var(nv, 0);
    let h = |j: usize| MPoly::var(nv, j);
    let g = |j: usize| MPoly::var(nv, kc + j);
    let mut cs = vec![MPoly::one(nv)];
    for k in 1..kc {
        let mut acc = MPoly::zero(nv);
        for j in 1..=k {
            acc = acc.add(&h(j).mul(&x.pow(j as u32 - 1)).mul(&cs[k - j]));
        }
        cs.push(acc.neg());
    }
    let ys: Vec<MPoly> = (0..kc)
        .map(|i| (0..=i).fold(MPoly::zero(nv), |acc, j| acc.add(&g(j).mul(&x.pow(j as u32)).mul(&cs[i - j]))))
        .collect();
    let mut generators = vec![ys[0].clone(), x];
    generators.extend(ys.into_iter().skip(1));
    Ok(ChartPolys { chart: c, weights: chart_weights(c, d)?, vars, slots, generators })
}

static ATLAS: Lazy<Mutex<HashMap<(i64, ChartId), Arc<ChartPolys>>>> = Lazy::new(|| Mutex::new(HashMap::new()));

/// Invariant polynomials of a chart, generated once per `(d, chart)`.
pub fn chart_polys(c: ChartId, d: i64) -> Result<Arc<ChartPolys>> {
    let mut cache = ATLAS.lock().expect("atlas cache poisoned");
    if let Some(p) = cache.get(&(d, c)) {
        return Ok(p.clone());
    }
    let p = Arc::new(generate(c, d)?);
    cache.insert((d, c), p.clone());
    Ok(p)
}

fn slot_values(polys: &ChartPolys, p: &HeckeParam) -> Vec<Q> {
    polys.slots.iter().map(|&(is_a, e)| if is_a { p.a.coeff(e) } else { p.b.coeff(e) }).collect()
}

/// Image of `p` under the chart map.
pub fn chart_image(c: ChartId, p: &HeckeParam) -> Result<WpsPoint> {
    if !contains(c, p) {
        return Err(Error::ChartMembership(format!("{p} is not in {c}")));
    }
    match c {
        ChartId::V { n } => {
            let mut coords = vec![Q::one()];
            if n < (p.d - 1) / 2 {
                coords.extend(u_coordinate(p)?);
            }
            WpsPoint::new(chart_weights(c, p.d)?, coords)
        }
        _ => {
            let polys = chart_polys(c, p.d)?;
            let x = slot_values(&polys, p);
            WpsPoint::new(polys.weights.clone(), polys.generators.iter().map(|g| g.eval(&x)).collect())
        }
    }
}

/// A parameter in chart `c` whose image is `y`, if `y` lies in the image.
pub fn chart_preimage(c: ChartId, d: i64, y: &WpsPoint) -> Result<HeckeParam> {
    let w = chart_weights(c, d)?;
    if y.weights() != w.as_slice() {
        return Err(Error::WeightMismatch);
    }
    let ys = y.coords();
    let p = match c {
        ChartId::V { n } => {
            if ys[0].is_zero() {
                return Err(Error::ExcludedLocus("first coordinate vanishes".into()));
            }
            let u: Vec<Q> = ys[1..].iter().map(|v| v / &ys[0]).collect();
            from_u_coordinate(d, n, &u)?
        }
        _ => {
            let s = shape(c, d).unwrap();
            let x = &ys[1];
            if x.is_zero() {
                return Err(Error::ExcludedLocus("leading coordinate vanishes".into()));
            }
            let lead = Germ::monomial(x.clone(), s.lead, d);
            let mut terms = vec![(s.n, ys[0].clone())];
            for i in 1..s.k_count {
                terms.push((s.n + 2 * i, &ys[i as usize + 1] / num::pow(x.clone(), i as usize)));
            }
            let other = Germ::from_terms(&terms, d);
            let (a, b) = if s.lead % 2 == 1 { (lead, other) } else { (other, lead) };
            HeckeParam::new(d, a, b)?
        }
    };
    if !contains(c, &p) {
        return Err(Error::ExcludedLocus(format!("{y} is outside the image of {c}")));
    }
    Ok(p)
}

/// Inverse of the order-5 chart `N(1,0)`:
/// `(y0 : y1 : y2) -> (y1^2 z, y0 y1 + y2 z^2)`, with `(0 : 0 : 1)` sent to
/// the point stratum `V_2`.
pub fn chart_inverse_order5(y: &WpsPoint) -> Result<HeckeParam> {
    if y.weights() != [1, 1, 2] {
        return Err(Error::WeightMismatch);
    }
    let c = y.coords();
    if c[1].is_zero() {
        if c[0].is_zero() {
            return HeckeParam::new(5, Germ::zero(5), Germ::monomial(q(1), 2, 5));
        }
        return Err(Error::ExcludedLocus(format!("{y} has vanishing second coordinate")));
    }
    let a = Germ::monomial(&c[1] * &c[1], 1, 5);
    let b = Germ::from_terms(&[(0, &c[0] * &c[1]), (2, c[2].clone())], 5);
    HeckeParam::new(5, a, b)
}

/// Coefficient `u_1` of `z^3` in the `u`-coordinate of the image of the order-5
/// inverse at `y0 = 1`, derived by series division: `-(y2 / y0^2)`.
pub fn order5_u3_coefficient(y: &WpsPoint) -> Result<Q> {
    let p = chart_inverse_order5(y)?;
    Ok(u_coordinate(&p)?[1].clone())
}

/// Gluing polynomials from the `u`-coordinates of `V_m` to the coordinates of
/// the chart `c`: the chart invariants evaluated on the canonical
/// representative `(z^m u, z^m)` (or `(z^m, z^m u)`).
pub fn gluing_polys(m: i64, c: ChartId, d: i64) -> Result<Vec<MPoly>> {
    let polys = chart_polys(c, d)?;
    let nu = ((d - 2 * m - 1) / 2).max(0) as usize;
    let window = d - m;
    let coeff = |is_a: bool, e: i64| -> MPoly {
        let is_lead = (m % 2 == 0) != is_a;
        if e >= window {
            return MPoly::zero(nu);
        }
        if is_lead {
            return if e == m { MPoly::one(nu) } else { MPoly::zero(nu) };
        }
        let r = e - m;
        if r >= 1 && r % 2 == 1 && ((r - 1) / 2) < nu as i64 {
            MPoly::var(nu, ((r - 1) / 2) as usize)
        } else {
            MPoly::zero(nu)
        }
    };
    let subs: Vec<MPoly> = polys.slots.iter().map(|&(is_a, e)| coeff(is_a, e)).collect();
    Ok(polys.generators.iter().map(|g| g.compose(&subs)).collect())
}

#[derive(Clone, Debug, Serialize)]
pub struct GlueReport {
    pub c1: ChartId,
    pub c2: ChartId,
    pub image1: WpsPoint,
    pub image2: WpsPoint,
    pub same_orbit: bool,
    /// Gluing-polynomial identity, evaluated when one chart is a stratum `V_m`.
    pub polynomial_identity: Option<bool>,
    pub pass: bool,
}

/// Computes both chart images of `p`, checks that both determine the orbit of
/// `p`, and evaluates the gluing polynomials where they apply.
pub fn gluing_check(c1: ChartId, c2: ChartId, p: &HeckeParam) -> Result<GlueReport> {
    if !contains(c1, p) || !contains(c2, p) {
        return Err(Error::ChartMembership(format!("{p} is not in both {c1} and {c2}")));
    }
    let d = p.d;
    let image1 = chart_image(c1, p)?;
    let image2 = chart_image(c2, p)?;
    let canon = canonicalize(p);
    let back = |c: ChartId, y: &WpsPoint| chart_preimage(c, d, y).map(|r| canonicalize(&r) == canon);
    let same_orbit = back(c1, &image1)? && back(c2, &image2)?;
    let glue = |m: i64, other: ChartId, img: &WpsPoint| -> Result<bool> {
        let g = gluing_polys(m, other, d)?;
        let u = if m == (d - 1) / 2 { Vec::new() } else { u_coordinate(p)? };
        let vals: Vec<Q> = g.iter().map(|poly| poly.eval(&u)).collect();
        WpsPoint::new(img.weights().to_vec(), vals)?.equals(img)
    };
    let polynomial_identity = match (c1, c2) {
        (ChartId::V { .. }, ChartId::V { .. }) => None,
        (ChartId::V { n }, other) => Some(glue(n, other, &image2)?),
        (other, ChartId::V { n }) => Some(glue(n, other, &image1)?),
        _ => None,
    };
    let pass = same_orbit && polynomial_identity.unwrap_or(true);
    Ok(GlueReport { c1, c2, image1, image2, same_orbit, polynomial_identity, pass })
}

/// Atlas entry for dumps.
#[derive(Clone, Debug, Serialize)]
pub struct AtlasEntry {
    pub chart: ChartId,
    pub weights: Vec<u32>,
    pub vars: Vec<String>,
    pub generators: Vec<MPoly>,
}

pub fn atlas(d: i64) -> Result<Vec<AtlasEntry>> {
    charts(d)
        .into_iter()
        .map(|c| match c {
            ChartId::V { n } => {
                let nu = ((d - 2 * n - 1) / 2) as usize;
                let mut generators = vec![MPoly::one(nu)];
                generators.extend((0..nu).map(|i| MPoly::var(nu, i)));
                Ok(AtlasEntry {
                    chart: c,
                    weights: chart_weights(c, d)?,
                    vars: (0..nu).map(|i| format!("u{}", 2 * i + 1)).collect(),
                    generators,
                })
            }
            _ => {
                let p = chart_polys(c, d)?;
                Ok(AtlasEntry { chart: c, weights: p.weights.clone(), vars: p.vars.clone(), generators: p.generators.clone() })
            }
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Even zeros

/// Hecke parameter at one preimage of an even zero: `(a, b)` modulo `z^m`
/// with no parity constraint.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EvenHeckeParam {
    pub m: i64,
    pub a: Germ,
    pub b: Germ,
}

impl EvenHeckeParam {
    pub fn new(m: i64, a: Germ, b: Germ) -> Result<EvenHeckeParam> {
        if m < 1 {
            return Err(Error::InvalidParam("m must be positive".into()));
        }
        if a.trunc() < m || b.trunc() < m {
            return Err(Error::InvalidParam("components known below z^m only".into()));
        }
        let (a, b) = (a.truncate(m), b.truncate(m));
        if a.valuation() < 0 || b.valuation() < 0 {
            return Err(Error::InvalidParam("components must be holomorphic".into()));
        }
        Ok(EvenHeckeParam { m, a, b })
    }

    pub fn from_ints(m: i64, a: &[i64], b: &[i64]) -> Result<EvenHeckeParam> {
        EvenHeckeParam::new(m, Germ::from_ints(0, a, m), Germ::from_ints(0, b, m))
    }

    pub fn n(&self) -> Order {
        self.a.order().min(self.b.order())
    }

    /// The class is `[0]` once `n >= m - n`.
    pub fn is_zero_class(&self) -> bool {
        match self.n() {
            Order::Infinite => true,
            Order::Finite(n) => 2 * n >= self.m,
        }
    }

    /// Local Higgs field of the Hecke transformation at this preimage.
    pub fn higgs(&self) -> Result<crate::local_higgs::GermMatrix2> {
        let t = 2 * self.m + 4;
        hecke_higgs(self.m, &self.a.lift(t), &self.b.lift(t))
    }
}

/// Extension datum `(b + a) / (b - a)` modulo `z^m`. A pole means the
/// parameter degenerates to an eigenline twist instead.
pub fn even_extension_datum(p: &EvenHeckeParam) -> Result<Germ> {
    let diff = &p.b - &p.a;
    if diff.order() != Order::Finite(0) {
        return Err(Error::DegenerateDatum);
    }
    Ok((&p.b + &p.a).div(&diff)?.truncate(p.m))
}

/// Order of the extension datum, clamped to the window `m`.
pub fn datum_order(p: &EvenHeckeParam) -> Result<i64> {
    Ok(even_extension_datum(p)?.order().finite().unwrap_or(p.m))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct EvenDegeneration {
    pub n: i64,
    pub l_plus: i64,
    pub l_minus: i64,
}

/// `(n, ord(b - a) - n, ord(b + a) - n)` with orders clamped to the class
/// window `m - n`.
pub fn even_degeneration_type(p: &EvenHeckeParam) -> Result<EvenDegeneration> {
    let n = p.n().finite().ok_or_else(|| Error::InvalidParam("zero parameter".into()))?;
    let clamp = |g: Germ| g.order().finite().unwrap_or(p.m).min(p.m - n);
    Ok(EvenDegeneration {
        n,
        l_plus: clamp(&p.b - &p.a) - n,
        l_minus: clamp(&p.b + &p.a) - n,
    })
}

/// Eigenline twist orders of the even-zero Higgs model.
pub fn even_twist_orders(p: &EvenHeckeParam) -> Result<TwistOrders> {
    eigen_twist_orders(&p.higgs()?, p.m)
}

/// Higgs-divisor coefficient of the even-zero Higgs model.
pub fn even_higgs_divisor(p: &EvenHeckeParam) -> Result<i64> {
    vanishing_divisor(&p.higgs()?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::germ::qf;

    fn hp(d: i64, a: &[i64], b: &[i64]) -> HeckeParam {
        HeckeParam::from_ints(d, a, b).unwrap()
    }

    fn wp(w: &[u32], x: &[i64]) -> WpsPoint {
        WpsPoint::new(w.to_vec(), x.iter().map(|&c| q(c)).collect()).unwrap()
    }

    #[test]
    fn act_examples() {
        let p = hp(5, &[0, 1], &[1]);
        assert_eq!(act(&GroupElement::identity(5), &p).unwrap(), p);
        let two = GroupElement::new(5, Germ::from_ints(0, &[2], 5)).unwrap();
        assert!(same_orbit(&act(&two, &p).unwrap(), &p));
        let g = GroupElement::new(5, Germ::from_ints(0, &[1, 0, 1], 5)).unwrap();
        assert_eq!(act(&g, &p).unwrap(), hp(5, &[0, 1, 0, 1], &[1, 0, 1]));
        assert!(act(&GroupElement::identity(7), &p).is_err());
    }

    #[test]
    fn stratum_examples() {
        assert_eq!(stratum_of(&hp(5, &[0, 1], &[1])), Stratum::V(0));
        assert_eq!(stratum_of(&hp(5, &[0, 0, 0, 1], &[0, 0, 1])), Stratum::V(2));
        assert_eq!(stratum_of(&hp(5, &[], &[0, 0, 1])), Stratum::V(2));
        assert_eq!(stratum_of(&hp(5, &[0, 0, 0, 1], &[])), Stratum::Zero);
        assert!(HeckeParam::from_ints(5, &[1], &[1]).is_err());
        assert!(HeckeParam::from_ints(4, &[0, 1], &[1]).is_err());
    }

    #[test]
    fn canonical_examples() {
        let c = canonicalize(&hp(5, &[0, 4], &[2, 0, 3]));
        assert_eq!(c.a(), &Germ::from_ints(0, &[0, 2, 0, -3], 5));
        assert_eq!(c.b(), &Germ::one(5));
        assert_eq!(canonicalize(&hp(5, &[0, 1], &[1])), hp(5, &[0, 1], &[1]));
        let bottom = hp(5, &[], &[0, 0, 1]);
        assert_eq!(canonicalize(&bottom), bottom);
        let p = hp(7, &[0, 3, 0, 1], &[2, 0, 5]);
        assert_eq!(act(&canonicalizing_element(&p), &p).unwrap(), canonicalize(&p));
    }

    #[test]
    fn u_examples() {
        assert_eq!(u_coordinate(&hp(5, &[0, 2], &[1])).unwrap(), vec![q(2), q(0)]);
        assert_eq!(u_coordinate(&hp(5, &[0, 4], &[2, 0, 3])).unwrap(), vec![q(2), q(-3)]);
        assert_eq!(u_coordinate(&hp(5, &[], &[0, 0, 1])), Err(Error::PointStratum));
        let p = hp(7, &[0, 1, 0, 2], &[0, 0, 3]);
        assert_eq!(p.n(), Some(1));
        assert_eq!(u_coordinate(&p).unwrap(), vec![q(3), q(-6)]);
    }

    #[test]
    fn order5_chart() {
        let c = ChartId::N { l: 1, n: 0 };
        let p = hp(5, &[0, 4], &[2, 0, 3]);
        let img = chart_image(c, &p).unwrap();
        assert_eq!(img, wp(&[1, 1, 2], &[2, 4, 12]));
        assert!(img.equals(&wp(&[1, 1, 2], &[1, 2, 3])).unwrap());
        let back = chart_inverse_order5(&wp(&[1, 1, 2], &[1, 2, 3])).unwrap();
        assert_eq!(back, hp(5, &[0, 4], &[2, 0, 3]));
        assert_eq!(chart_inverse_order5(&wp(&[1, 1, 2], &[1, 1, 0])).unwrap(), hp(5, &[0, 1], &[1]));
        assert_eq!(chart_inverse_order5(&wp(&[1, 1, 2], &[0, 0, 1])).unwrap(), hp(5, &[], &[0, 0, 1]));
        assert!(chart_inverse_order5(&wp(&[1, 1, 2], &[1, 0, 1])).is_err());
        assert_eq!(order5_u3_coefficient(&wp(&[1, 1, 2], &[1, 2, 3])).unwrap(), q(-3));
        let poly = &chart_polys(c, 5).unwrap().generators[2];
        assert_eq!(poly.render(&chart_polys(c, 5).unwrap().vars), "a1*b2 - a3*b0");
    }

    #[test]
    fn chart_lists() {
        let c5 = charts(5);
        assert!(c5.contains(&ChartId::N { l: 1, n: 0 }));
        assert!(c5.contains(&ChartId::N { l: 2, n: 1 }));
        assert!(c5.contains(&ChartId::KN { k: 3, l: 2, n: 0 }));
        assert_eq!(strata_count(5), 3);
        assert_eq!(ChartId::parse("3N(2,0)").unwrap(), ChartId::KN { k: 3, l: 2, n: 0 });
        assert_eq!(ChartId::parse("N(1,0)").unwrap(), ChartId::N { l: 1, n: 0 });
        assert_eq!(ChartId::parse("V2").unwrap(), ChartId::V { n: 2 });
    }

    #[test]
    fn gluing_examples() {
        let p = hp(5, &[0, 1], &[1, 0, 1]);
        let r = gluing_check(ChartId::V { n: 0 }, ChartId::N { l: 1, n: 0 }, &p).unwrap();
        assert!(r.pass);
        assert_eq!(r.polynomial_identity, Some(true));
        let p = hp(7, &[0, 2, 0, 3], &[0, 0, 5, 0, 1]);
        assert_eq!(p.n(), Some(1));
        let r = gluing_check(ChartId::V { n: 1 }, ChartId::N { l: 1, n: 0 }, &p).unwrap();
        assert!(r.pass);
        assert!(gluing_check(ChartId::V { n: 0 }, ChartId::V { n: 1 }, &p).is_err());
    }

    #[test]
    fn even_examples() {
        let p = EvenHeckeParam::from_ints(2, &[0], &[1]).unwrap();
        assert_eq!(even_extension_datum(&p).unwrap(), Germ::one(2));
        let p = EvenHeckeParam::from_ints(2, &[0, 1], &[1]).unwrap();
        assert_eq!(even_extension_datum(&p).unwrap(), Germ::from_ints(0, &[1, 2], 2));
        let p = EvenHeckeParam::from_ints(2, &[1], &[1, 1]).unwrap();
        assert_eq!(even_extension_datum(&p), Err(Error::DegenerateDatum));
        let p = EvenHeckeParam::from_ints(1, &[1], &[1]).unwrap();
        assert_eq!(even_degeneration_type(&p).unwrap(), EvenDegeneration { n: 0, l_plus: 1, l_minus: 0 });
        let p = EvenHeckeParam::from_ints(1, &[1], &[-1]).unwrap();
        assert_eq!(even_degeneration_type(&p).unwrap(), EvenDegeneration { n: 0, l_plus: 0, l_minus: 1 });
        let p = EvenHeckeParam::from_ints(2, &[0], &[0, 1]).unwrap();
        assert_eq!(even_degeneration_type(&p).unwrap(), EvenDegeneration { n: 1, l_plus: 0, l_minus: 0 });
        let t = even_twist_orders(&p).unwrap();
        assert_eq!((t.plus, t.minus), (1, 1));
        let _ = qf(1, 2);
    }
}
