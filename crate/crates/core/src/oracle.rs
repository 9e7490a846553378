//! Seeded randomized and exhaustive property suites. Every suite is
//! deterministic for a fixed seed and reports machine-readable failures.

use num::{BigUint, One, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::germ::{q, qf, Germ, Order, Q};
use crate::hecke_moduli::{
    act, canonicalize, chart_image, chart_inverse_order5, chart_preimage, charts, contains, datum_order,
    even_degeneration_type, even_higgs_divisor, even_twist_orders, gluing_check, order5_u3_coefficient,
    u_coordinate, ChartId, EvenHeckeParam, GroupElement, HeckeParam,
};
use crate::local_higgs::{
    companion, conjugate, eigen_twist_orders, hecke_higgs, normal_form, vanishing_divisor, GermMatrix2,
    LocalHiggsData,
};
use crate::strata::{
    all_divisors, all_profiles, degeneration_poset, double_zero_total, enumerate_strata, has_saturated_even_zero,
    odd_profile_total, r2_closed_form, single_even_zero_forms, total_real_points,
};
use crate::wps::WpsPoint;

pub const SUITES: &[&str] = &[
    "conjugation",
    "normal-form",
    "landing",
    "orbit-invariance",
    "glue-order5",
    "gluing",
    "counting",
    "eigen-twist",
];

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Failure {
    pub case: usize,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub cases: usize,
    pub passed: usize,
    pub failures: Vec<Failure>,
    pub notes: Vec<String>,
}

impl SuiteReport {
    fn new(suite: &str, seed: u64) -> SuiteReport {
        SuiteReport { suite: suite.into(), seed, cases: 0, passed: 0, failures: Vec::new(), notes: Vec::new() }
    }

    fn record(&mut self, ok: bool, detail: impl FnOnce() -> String) {
        if ok {
            self.passed += 1;
        } else {
            self.failures.push(Failure { case: self.cases, detail: detail() });
        }
        self.cases += 1;
    }

    fn record_result(&mut self, r: Result<bool>, detail: impl FnOnce() -> String) {
        match r {
            Ok(ok) => self.record(ok, detail),
            Err(e) => {
                let d = detail();
                self.record(false, || format!("{d}: {e}"))
            }
        }
    }

    pub fn ok(&self) -> bool {
        self.failures.is_empty() && self.cases > 0
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn run_suite(name: &str, seed: u64, cases: usize) -> Result<SuiteReport> {
    let mut r = rng(seed);
    let mut rep = SuiteReport::new(name, seed);
    match name {
        "conjugation" => conjugation_suite(&mut r, cases, &mut rep),
        "normal-form" => normal_form_suite(&mut r, cases, &mut rep),
        "landing" => landing_suite(&mut r, cases, &mut rep),
        "orbit-invariance" => orbit_suite(&mut r, cases, &mut rep),
        "glue-order5" => order5_suite(&mut r, cases, &mut rep),
        "gluing" => gluing_suite(&mut r, cases, &mut rep),
        "counting" => counting_suite(&mut rep),
        "eigen-twist" => eigen_suite(&mut r, cases, &mut rep),
        _ => return Err(Error::UnknownSuite(format!("'{name}'; known: {}", SUITES.join(", ")))),
    }
    Ok(rep)
}

// ---------------------------------------------------------------------------
// Sampling

pub fn rand_q<R: Rng>(rng: &mut R) -> Q {
    qf(rng.gen_range(-9..=9), rng.gen_range(1..=3))
}

pub fn rand_nonzero_q<R: Rng>(rng: &mut R) -> Q {
    loop {
        let x = rand_q(rng);
        if !x.is_zero() {
            return x;
        }
    }
}

/// Polynomial with nonzero coefficient at `lo` and random coefficients at
/// `lo + 2, lo + 4, ...` below `hi`.
pub fn rand_parity_poly<R: Rng>(rng: &mut R, lo: i64, hi: i64, t: i64) -> Germ {
    let mut terms = vec![(lo, rand_nonzero_q(rng))];
    let mut e = lo + 2;
    while e < hi {
        terms.push((e, rand_q(rng)));
        e += 2;
    }
    Germ::from_terms(&terms, t)
}

/// Parameter whose raw components have the given orders (`None` for zero).
pub fn param_with_orders<R: Rng>(rng: &mut R, d: i64, oa: Option<i64>, ob: Option<i64>) -> Result<HeckeParam> {
    let a = oa.map_or_else(|| Germ::zero(d), |o| rand_parity_poly(rng, o, d, d));
    let b = ob.map_or_else(|| Germ::zero(d), |o| rand_parity_poly(rng, o, d, d));
    HeckeParam::new(d, a, b)
}

/// All raw order pairs `(ord a, ord b)` for odd `d`.
pub fn order_pairs(d: i64) -> Vec<(Option<i64>, Option<i64>)> {
    let oas: Vec<Option<i64>> = (1..d).step_by(2).map(Some).chain([None]).collect();
    let obs: Vec<Option<i64>> = (0..d).step_by(2).map(Some).chain([None]).collect();
    let mut out = Vec::new();
    for &oa in &oas {
        for &ob in &obs {
            out.push((oa, ob));
        }
    }
    out
}

fn probe(d: i64, oa: Option<i64>, ob: Option<i64>) -> HeckeParam {
    let m = |o: Option<i64>| o.map_or_else(|| Germ::zero(d), |e| Germ::monomial(q(1), e, d));
    HeckeParam::new(d, m(oa), m(ob)).expect("monomial probe is parity-valid")
}

/// Order pairs whose classes lie in every chart of `cs`.
pub fn pairs_in(d: i64, cs: &[ChartId]) -> Vec<(Option<i64>, Option<i64>)> {
    order_pairs(d).into_iter().filter(|&(oa, ob)| cs.iter().all(|&c| contains(c, &probe(d, oa, ob)))).collect()
}

/// Random class in the intersection of the given charts.
pub fn param_in<R: Rng>(rng: &mut R, d: i64, cs: &[ChartId]) -> Option<HeckeParam> {
    let pairs = pairs_in(d, cs);
    let &(oa, ob) = pairs.choose(rng)?;
    param_with_orders(rng, d, oa, ob).ok()
}

/// Random class outside the zero class.
pub fn random_param<R: Rng>(rng: &mut R, d: i64) -> HeckeParam {
    let n = rng.gen_range(0..=(d - 1) / 2);
    let other = |rng: &mut R, start: i64| {
        let opts: Vec<Option<i64>> = (start..d).step_by(2).map(Some).chain([None]).collect();
        *opts.choose(rng).unwrap()
    };
    let (oa, ob) = if n % 2 == 0 { (other(rng, n + 1), Some(n)) } else { (Some(n), other(rng, n + 1)) };
    param_with_orders(rng, d, oa, ob).expect("sampled orders are parity-valid")
}

pub fn random_group_element<R: Rng>(rng: &mut R, d: i64) -> GroupElement {
    GroupElement::new(d, rand_parity_poly(rng, 0, d, d)).expect("even unit")
}

/// Random `SL2` gauge: a product of elementary matrices with small integer
/// polynomial entries and a diagonal scaling.
pub fn random_sl2<R: Rng>(rng: &mut R, t: i64) -> GermMatrix2 {
    let poly = |rng: &mut R| {
        let terms: Vec<(i64, Q)> = (0..3).map(|k| (k, q(rng.gen_range(-3..=3)))).collect();
        Germ::from_terms(&terms, t)
    };
    let one = Germ::one(t);
    let zero = Germ::zero(t);
    let c = rand_nonzero_q(rng);
    let mut g = GermMatrix2::diag(Germ::constant(c.clone(), t), Germ::constant(c.recip(), t));
    for _ in 0..2 {
        let u = GermMatrix2::new(one.clone(), poly(rng), zero.clone(), one.clone());
        let l = GermMatrix2::new(one.clone(), zero.clone(), poly(rng), one.clone());
        g = g.mul(&u).mul(&l);
    }
    g
}

// ---------------------------------------------------------------------------
// Suites

/// Higgs field of the Hecke transformation computed from the transition
/// matrix: `psi^{-1} Phi psi` with `Phi = [[0, z^d], [z^d, 0]]` in the frame
/// `(s+, s-)` and `psi = [[1/b, -a z^-d], [0, b z^-d]]`.
pub fn transition_conjugation(d: i64, a: &Germ, b: &Germ) -> Result<GermMatrix2> {
    let (x, y) = if b.is_zero() { (b, a) } else { (a, b) };
    let big = 8 * (x.trunc().min(y.trunc()) + d);
    let zd = Germ::monomial(q(1), d, big);
    let phi = GermMatrix2::new(Germ::zero(big), zd.clone(), zd, Germ::zero(big));
    let psi = GermMatrix2::new(y.invert()?, x.neg().shift(-d), Germ::zero(big), y.shift(-d));
    conjugate(&phi, &psi)
}

fn conjugation_suite<R: Rng>(rng: &mut R, cases: usize, rep: &mut SuiteReport) {
    let ds = [3, 5, 7, 9];
    for i in 0..cases {
        let d = ds[i % ds.len()];
        let p = random_param(rng, d);
        let t = 4 * d + 8;
        let (a, b) = (p.a().lift(t), p.b().lift(t));
        let r = (|| {
            let lhs = hecke_higgs(d, &a, &b)?;
            let rhs = transition_conjugation(d, &a, &b)?;
            Ok(lhs.agrees(&rhs) && lhs.window().min(rhs.window()) > 2 * d)
        })();
        rep.record_result(r, || format!("d={d} a={} b={}", a.to_text(), b.to_text()));
    }
}

fn normal_form_suite<R: Rng>(rng: &mut R, cases: usize, rep: &mut SuiteReport) {
    for lambda in 0..=6i64 {
        for dd in 0..=lambda {
            for _ in 0..cases {
                let t = 2 * lambda + 6;
                let g = random_sl2(rng, t);
                let model = companion(dd, lambda, t);
                let r = (|| {
                    let m = conjugate(&model, &g)?;
                    let nf = normal_form(&LocalHiggsData::new(m, lambda)?)?;
                    let back = &nf.conjugated;
                    Ok(nf.d == dd && nf.lambda == lambda && back.agrees(&model) && back.window() > 2 * lambda)
                })();
                rep.record_result(r, || format!("D={dd} L={lambda} gauge={}", g.to_text()));
            }
        }
    }
}

fn landing_suite<R: Rng>(rng: &mut R, cases: usize, rep: &mut SuiteReport) {
    let ds = [3, 5, 7, 9, 11];
    for i in 0..cases {
        let d = ds[i % ds.len()];
        let p = random_param(rng, d);
        let n = p.n().unwrap();
        let t = 4 * d + 8;
        let r = (|| {
            let m = hecke_higgs(d, &p.a().lift(t), &p.b().lift(t))?;
            let tw = eigen_twist_orders(&m, d)?;
            Ok(vanishing_divisor(&m)? == 2 * n && tw.plus == n && tw.minus == n)
        })();
        rep.record_result(r, || format!("{p}"));
    }
}

fn orbit_suite<R: Rng>(rng: &mut R, cases: usize, rep: &mut SuiteReport) {
    for d in [3, 5, 7, 9] {
        for c in charts(d) {
            for _ in 0..cases {
                let Some(p) = param_in(rng, d, &[c]) else { continue };
                let g = random_group_element(rng, d);
                let r = (|| {
                    let gp = act(&g, &p)?;
                    let (i1, i2) = (chart_image(c, &p)?, chart_image(c, &gp)?);
                    let u_ok = match (u_coordinate(&p), u_coordinate(&gp)) {
                        (Ok(u1), Ok(u2)) => u1 == u2,
                        (Err(Error::PointStratum), Err(Error::PointStratum)) => true,
                        _ => false,
                    };
                    let smooth = !i1.is_orbifold_singular();
                    let back = canonicalize(&chart_preimage(c, d, &i1)?) == canonicalize(&p);
                    Ok(u_ok && i1.equals(&i2)? && smooth && back)
                })();
                rep.record_result(r, || format!("chart {c} d={d} p={p} g={}", g.phi().to_text()));
                let Some(r2) = param_in(rng, d, &[c]) else { continue };
                if canonicalize(&r2) != canonicalize(&p) {
                    let sep = (|| Ok(!chart_image(c, &p)?.equals(&chart_image(c, &r2)?)?))();
                    rep.record_result(sep, || format!("separation {c} d={d}: {p} vs {r2}"));
                }
            }
        }
    }
}

fn order5_suite<R: Rng>(rng: &mut R, cases: usize, rep: &mut SuiteReport) {
    let c = ChartId::N { l: 1, n: 0 };
    for _ in 0..cases {
        let y = WpsPoint::new(vec![1, 1, 2], vec![rand_q(rng), rand_nonzero_q(rng), rand_q(rng)]).unwrap();
        let r = (|| Ok(chart_image(c, &chart_inverse_order5(&y)?)?.equals(&y)?))();
        rep.record_result(r, || format!("image of inverse at {}", y.to_text()));
        let Some(p) = param_in(rng, 5, &[c]) else { continue };
        let r = (|| Ok(canonicalize(&chart_inverse_order5(&chart_image(c, &p)?)?) == canonicalize(&p)))();
        rep.record_result(r, || format!("inverse of image at {p}"));
    }
    let bottom = WpsPoint::new(vec![1, 1, 2], vec![q(0), q(0), q(1)]).unwrap();
    let r = chart_inverse_order5(&bottom).map(|p| p.n() == Some(2));
    rep.record_result(r, || "(0:0:1) must land on the point stratum V2".into());
    let y = WpsPoint::new(vec![1, 1, 2], vec![q(1), q(1), q(1)]).unwrap();
    match order5_u3_coefficient(&y) {
        Ok(s) => rep.notes.push(format!(
            "sign of the z^3 coefficient of u along the inverse chart at (1:1:1): {s} (the printed formula carries +)"
        )),
        Err(e) => rep.record(false, || format!("u-coordinate of the inverse chart: {e}")),
    }
}

/// Chart pairs with nonempty overlap, excluding identical pairs.
pub fn overlapping_pairs(d: i64) -> Vec<(ChartId, ChartId)> {
    let cs = charts(d);
    let mut out = Vec::new();
    for (i, &c1) in cs.iter().enumerate() {
        for &c2 in &cs[i + 1..] {
            if !pairs_in(d, &[c1, c2]).is_empty() {
                out.push((c1, c2));
            }
        }
    }
    out
}

fn gluing_suite<R: Rng>(rng: &mut R, cases: usize, rep: &mut SuiteReport) {
    for d in [5, 7] {
        for (c1, c2) in overlapping_pairs(d) {
            for _ in 0..cases {
                let Some(p) = param_in(rng, d, &[c1, c2]) else { continue };
                if !(contains(c1, &p) && contains(c2, &p)) {
                    continue;
                }
                let r = gluing_check(c1, c2, &p).map(|g| g.pass);
                rep.record_result(r, || format!("{c1} / {c2} d={d} p={p}"));
            }
        }
    }
}

fn counting_suite(rep: &mut SuiteReport) {
    for g in 2..=5u32 {
        for p in all_profiles(g) {
            let strata = enumerate_strata(&p);
            let ok_dims = strata.iter().all(|s| s.dim == 3 * g as i64 - 3 - s.deg as i64 && s.dim == s.bundle_dim());
            rep.record(ok_dims, || format!("dimension identity fails for {:?}", p.mults));
            let expected: usize = p.mults.iter().map(|m| (m / 2 + 1) as usize).product();
            rep.record(strata.len() == expected, || format!("stratum count for {:?}", p.mults));
            let r2_ok = strata
                .iter()
                .filter(|s| !has_saturated_even_zero(&p, &s.divisor))
                .all(|s| s.r2 as i64 == r2_closed_form(&p, &s.divisor));
            rep.record(r2_ok, || format!("closed r2 formula for {:?}", p.mults));
            let poset = degeneration_poset(&p);
            let top = all_divisors(&p).iter().position(|d| *d == p.max_divisor());
            rep.record(poset.minima() == vec![0] && top.is_some_and(|t| poset.maxima() == vec![t]), || {
                format!("poset extremes for {:?}", p.mults)
            });
            if let Some(closed) = odd_profile_total(&p) {
                let sum: BigUint = strata.iter().map(|_| BigUint::one() << (2 * g - 2 + p.n()) as usize).sum();
                let ok = total_real_points(&p).is_ok_and(|t| t == closed) && sum == closed;
                rep.record(ok, || format!("real-point total for {:?}", p.mults));
            }
            if g <= 4 {
                if let Some(closed) = double_zero_total(&p) {
                    rep.record(total_real_points(&p).is_ok_and(|t| t == closed), || {
                        format!("double-zero real-point total for {:?}", p.mults)
                    });
                }
            }
            if let Some(f) = single_even_zero_forms(&p) {
                let ok = total_real_points(&p).is_ok_and(|t| t.to_string() == f.derived);
                rep.record(ok, || format!("single even zero stratum sum for {:?}", p.mults));
                if !f.agree {
                    rep.notes.push(format!(
                        "g={g} zeros {:?}: stratum sum {} differs from printed closed form {}",
                        p.mults, f.derived, f.printed
                    ));
                }
            }
        }
    }
}

fn eigen_suite<R: Rng>(rng: &mut R, cases: usize, rep: &mut SuiteReport) {
    for _ in 0..cases {
        let b0 = rand_nonzero_q(rng);
        let plus = rng.gen_bool(0.5);
        let a0 = if plus { b0.clone() } else { -b0.clone() };
        let r = (|| {
            let p = EvenHeckeParam::new(1, Germ::constant(a0.clone(), 1), Germ::constant(b0.clone(), 1))?;
            let tw = even_twist_orders(&p)?;
            let ty = even_degeneration_type(&p)?;
            let want = if plus { (1, 0) } else { (0, 1) };
            Ok((tw.plus, tw.minus) == want && (ty.l_plus, ty.l_minus) == want)
        })();
        rep.record_result(r, || format!("a0={a0} b0={b0}"));
    }
    for _ in 0..cases {
        let m = rng.gen_range(1..=4i64);
        let k = rng.gen_range(0..=m);
        let t = m;
        let diff: Vec<(i64, Q)> = (0..m).map(|e| (e, if e == 0 { rand_nonzero_q(rng) } else { rand_q(rng) })).collect();
        let sum: Vec<(i64, Q)> =
            (k..m).map(|e| (e, if e == k { rand_nonzero_q(rng) } else { rand_q(rng) })).collect();
        let (dg, sg) = (Germ::from_terms(&diff, t), Germ::from_terms(&sum, t));
        let half = Germ::constant(qf(1, 2), t);
        let a = &(&sg - &dg) * &half;
        let b = &(&sg + &dg) * &half;
        if b.order() != Order::Finite(0) {
            continue;
        }
        let r = (|| {
            let p = EvenHeckeParam::new(m, a.clone(), b.clone())?;
            Ok(datum_order(&p)? == even_higgs_divisor(&p)?)
        })();
        rep.record_result(r, || format!("m={m} a={} b={}", a.to_text(), b.to_text()));
    }
}
