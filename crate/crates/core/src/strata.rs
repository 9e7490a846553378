//! Stratification of a singular fibre from the zero profile of the quadratic
//! differential: Higgs divisors, dimensions and fibre types, the degeneration
//! order, irreducible components and counts of real points.

use num::{BigUint, One};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct QDProfile {
    pub genus: u32,
    pub mults: Vec<u32>,
    pub assume_no_global_sqrt: bool,
}

impl QDProfile {
    pub fn new(genus: u32, mults: Vec<u32>, assume_no_global_sqrt: bool) -> Result<QDProfile> {
        if genus < 2 {
            return Err(Error::InvalidProfile(format!("genus {genus} < 2")));
        }
        if mults.is_empty() || mults.contains(&0) {
            return Err(Error::InvalidProfile("zero orders must be positive and nonempty".into()));
        }
        let sum: u32 = mults.iter().sum();
        if sum != 4 * genus - 4 {
            return Err(Error::InvalidProfile(format!("zero orders sum to {sum}, expected {}", 4 * genus - 4)));
        }
        Ok(QDProfile { genus, mults, assume_no_global_sqrt })
    }

    pub fn n(&self) -> u32 {
        self.mults.len() as u32
    }

    pub fn n_odd(&self) -> u32 {
        self.mults.iter().filter(|&&m| m % 2 == 1).count() as u32
    }

    pub fn n_even(&self) -> u32 {
        self.n() - self.n_odd()
    }

    /// Largest Higgs divisor `floor(m_i / 2)`.
    pub fn max_divisor(&self) -> HiggsDivisor {
        HiggsDivisor { coeffs: self.mults.iter().map(|m| m / 2).collect() }
    }
}

/// Every profile of genus `g`, as a non-increasing partition of `4g - 4`.
pub fn all_profiles(genus: u32) -> Vec<QDProfile> {
    fn rec(rest: u32, max: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if rest == 0 {
            out.push(cur.clone());
            return;
        }
        for m in (1..=rest.min(max)).rev() {
            cur.push(m);
            rec(rest - m, m, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(4 * genus - 4, 4 * genus - 4, &mut Vec::new(), &mut out);
    out.into_iter().map(|m| QDProfile { genus, mults: m, assume_no_global_sqrt: true }).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Numerology {
    pub n: u32,
    pub n_odd: u32,
    pub n_even: u32,
    /// Genus of the normalized spectral curve.
    pub spectral_genus: u32,
    pub prym_dim: u32,
    pub branch_points: u32,
    pub unbranched: bool,
}

pub fn spectral_numerology(p: &QDProfile) -> Numerology {
    let n_odd = p.n_odd();
    assert!(n_odd % 2 == 0, "an even total order forces an even number of odd zeros");
    Numerology {
        n: p.n(),
        n_odd,
        n_even: p.n_even(),
        spectral_genus: 2 * p.genus - 1 + n_odd / 2,
        prym_dim: p.genus - 1 + n_odd / 2,
        branch_points: n_odd,
        unbranched: n_odd == 0,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HiggsDivisor {
    pub coeffs: Vec<u32>,
}

impl HiggsDivisor {
    pub fn new(p: &QDProfile, coeffs: Vec<u32>) -> Result<HiggsDivisor> {
        if coeffs.len() != p.mults.len() {
            return Err(Error::InvalidProfile("divisor length differs from the zero count".into()));
        }
        if coeffs.iter().zip(&p.mults).any(|(d, m)| *d > m / 2) {
            return Err(Error::InvalidProfile("divisor exceeds half the zero order".into()));
        }
        Ok(HiggsDivisor { coeffs })
    }

    pub fn deg(&self) -> u32 {
        self.coeffs.iter().sum()
    }

    /// Componentwise `self <= other`.
    pub fn le(&self, other: &HiggsDivisor) -> bool {
        self.coeffs.iter().zip(&other.coeffs).all(|(a, b)| a <= b)
    }
}

impl Serialize for HiggsDivisor {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.coeffs.serialize(s)
    }
}

/// Local contribution of one zero to the fibre of a stratum.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ZeroFibre {
    /// Odd zero: affine Hecke parameters.
    Odd { affine: u32 },
    /// Unsaturated even zero: one punctured line and affine parameters.
    Even { punctured_lines: u32, affine: u32 },
    /// Saturated even zero.
    Point,
}

fn serialize_count<S: Serializer>(c: &Option<BigUint>, s: S) -> std::result::Result<S::Ok, S::Error> {
    c.as_ref().map(BigUint::to_string).serialize(s)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Stratum {
    #[serde(rename = "D")]
    pub divisor: HiggsDivisor,
    pub deg: u32,
    pub dim: i64,
    pub prym_dim: u32,
    pub r1: u32,
    pub r2: u32,
    #[serde(rename = "fibre")]
    pub per_zero_fibre: Vec<ZeroFibre>,
    #[serde(serialize_with = "serialize_count")]
    pub real_points: Option<BigUint>,
    pub is_open: bool,
    pub is_lowest: bool,
}

impl Stratum {
    /// `prym_dim + r1 + r2`.
    pub fn bundle_dim(&self) -> i64 {
        (self.prym_dim + self.r1 + self.r2) as i64
    }
}

fn zero_fibre(m: u32, d: u32) -> ZeroFibre {
    if m % 2 == 1 {
        ZeroFibre::Odd { affine: (m - 2 * d - 1) / 2 }
    } else if 2 * d < m {
        ZeroFibre::Even { punctured_lines: 1, affine: m / 2 - d - 1 }
    } else {
        ZeroFibre::Point
    }
}

fn build_stratum(p: &QDProfile, d: HiggsDivisor) -> Stratum {
    let num = spectral_numerology(p);
    let fibres: Vec<ZeroFibre> = p.mults.iter().zip(&d.coeffs).map(|(&m, &di)| zero_fibre(m, di)).collect();
    let (mut r1, mut r2) = (0, 0);
    for f in &fibres {
        match f {
            ZeroFibre::Odd { affine } => r2 += affine,
            ZeroFibre::Even { punctured_lines, affine } => {
                r1 += punctured_lines;
                r2 += affine;
            }
            ZeroFibre::Point => {}
        }
    }
    let deg = d.deg();
    let real_points = count_real_points(p, &d).ok();
    let is_open = deg == 0;
    let is_lowest = d == p.max_divisor();
    Stratum {
        divisor: d,
        deg,
        dim: 3 * p.genus as i64 - 3 - deg as i64,
        prym_dim: num.prym_dim,
        r1,
        r2,
        per_zero_fibre: fibres,
        real_points,
        is_open,
        is_lowest,
    }
}

/// Every Higgs divisor, in lexicographic order.
pub fn all_divisors(p: &QDProfile) -> Vec<HiggsDivisor> {
    let mut out = vec![Vec::new()];
    for m in &p.mults {
        out = out
            .into_iter()
            .flat_map(|prefix: Vec<u32>| {
                (0..=m / 2).map(move |d| {
                    let mut v = prefix.clone();
                    v.push(d);
                    v
                })
            })
            .collect();
    }
    out.into_iter().map(|coeffs| HiggsDivisor { coeffs }).collect()
}

pub fn enumerate_strata(p: &QDProfile) -> Vec<Stratum> {
    all_divisors(p).into_iter().map(|d| build_stratum(p, d)).collect()
}

/// Closed form `2g - 2 - deg D - n_even - n_odd / 2`, meaningful when no even
/// zero is saturated.
pub fn r2_closed_form(p: &QDProfile, d: &HiggsDivisor) -> i64 {
    2 * p.genus as i64 - 2 - d.deg() as i64 - p.n_even() as i64 - p.n_odd() as i64 / 2
}

pub fn has_saturated_even_zero(p: &QDProfile, d: &HiggsDivisor) -> bool {
    p.mults.iter().zip(&d.coeffs).any(|(m, di)| m % 2 == 0 && 2 * di == *m)
}

/// Degeneration order: covering relations `D -> D + e_i`, as index pairs into
/// `enumerate_strata`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Poset {
    pub nodes: Vec<HiggsDivisor>,
    pub edges: Vec<(usize, usize)>,
}

impl Poset {
    pub fn minima(&self) -> Vec<usize> {
        (0..self.nodes.len()).filter(|&j| self.edges.iter().all(|&(_, t)| t != j)).collect()
    }

    pub fn maxima(&self) -> Vec<usize> {
        (0..self.nodes.len()).filter(|&i| self.edges.iter().all(|&(s, _)| s != i)).collect()
    }

    /// Length of the longest chain, in edges.
    pub fn height(&self) -> usize {
        let mut depth = vec![0usize; self.nodes.len()];
        // nodes are in lexicographic order, so every edge points forward
        for &(s, t) in &self.edges {
            depth[t] = depth[t].max(depth[s] + 1);
        }
        depth.into_iter().max().unwrap_or(0)
    }

    pub fn to_dot(&self) -> String {
        let label = |d: &HiggsDivisor| {
            let c: Vec<String> = d.coeffs.iter().map(u32::to_string).collect();
            format!("D=({})", c.join(","))
        };
        let mut s = String::from("digraph strata {\n");
        for (i, d) in self.nodes.iter().enumerate() {
            s.push_str(&format!("  n{i} [label=\"{}\"];\n", label(d)));
        }
        for (a, b) in &self.edges {
            s.push_str(&format!("  n{a} -> n{b};\n"));
        }
        s.push_str("}\n");
        s
    }
}

pub fn degeneration_poset(p: &QDProfile) -> Poset {
    let nodes = all_divisors(p);
    let mut edges = Vec::new();
    for (i, a) in nodes.iter().enumerate() {
        for (j, b) in nodes.iter().enumerate() {
            if b.deg() == a.deg() + 1 && a.le(b) {
                edges.push((i, j));
            }
        }
    }
    Poset { nodes, edges }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ComponentKind {
    Irreducible,
    ConnectedFourComponents,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Classification {
    pub kind: ComponentKind,
    pub components: u32,
    pub note: String,
}

pub fn classify_components(p: &QDProfile) -> Result<Classification> {
    if !p.assume_no_global_sqrt {
        return Err(Error::HypothesisNotAsserted);
    }
    Ok(if p.n_odd() >= 1 {
        Classification {
            kind: ComponentKind::Irreducible,
            components: 1,
            note: "an odd zero makes the fibre an irreducible complex space".into(),
        }
    } else {
        Classification {
            kind: ComponentKind::ConnectedFourComponents,
            components: 4,
            note: "connected; the open stratum splits in two and the pullback is generically two-to-one".into(),
        }
    })
}

fn pow2(e: u32) -> BigUint {
    BigUint::one() << e as usize
}

/// `2^(2g - 2 + n - n0)` real points in the stratum of `D`, with `n0` the
/// number of saturated even zeros.
pub fn count_real_points(p: &QDProfile, d: &HiggsDivisor) -> Result<BigUint> {
    if p.n_odd() == 0 {
        return Err(Error::NotCovered("real-point count needs an odd zero".into()));
    }
    let n0 = p.mults.iter().zip(&d.coeffs).filter(|(m, di)| *m % 2 == 0 && 2 * *di == **m).count() as u32;
    Ok(pow2(2 * p.genus - 2 + p.n() - n0))
}

pub fn total_real_points(p: &QDProfile) -> Result<BigUint> {
    all_divisors(p).iter().map(|d| count_real_points(p, d)).sum()
}

/// Sum of `2^(2g - 2 + n - n0)` over all strata with no odd-zero requirement.
/// For profiles without odd zeros this is a formal number, not a count.
pub fn formal_stratum_sum(p: &QDProfile) -> BigUint {
    all_divisors(p)
        .iter()
        .map(|d| {
            let n0 = p.mults.iter().zip(&d.coeffs).filter(|(m, di)| *m % 2 == 0 && 2 * *di == **m).count() as u32;
            pow2(2 * p.genus - 2 + p.n() - n0)
        })
        .sum()
}

/// `2^(2g-2) prod (m_i + 1)` for profiles with only odd zeros.
pub fn odd_profile_total(p: &QDProfile) -> Option<BigUint> {
    (p.n_even() == 0).then(|| pow2(2 * p.genus - 2) * p.mults.iter().map(|&m| BigUint::from(m + 1)).product::<BigUint>())
}

/// For `d < 2g - 2` double zeros and simple zeros elsewhere:
/// `2^(6g-6-2d) * 3^d`, in the binomial form `2^(6g-6-2d) sum C(d,k) 2^k`.
pub fn double_zero_total(p: &QDProfile) -> Option<BigUint> {
    if p.mults.iter().any(|&m| m > 2) {
        return None;
    }
    let d = p.mults.iter().filter(|&&m| m == 2).count() as u32;
    (d < 2 * p.genus - 2).then(|| {
        let mut sum = BigUint::from(0u32);
        let mut binom = BigUint::one();
        for k in 0..=d {
            sum += &binom * pow2(k);
            binom = binom * BigUint::from(d - k) / BigUint::from(k + 1);
        }
        pow2(6 * p.genus - 6 - 2 * d) * sum
    })
}

/// One zero of order `2d` and simple zeros elsewhere: the stratum-sum value
/// `(2d+1) 2^(6g-6-2d)` next to the printed closed form `(4d-3) 2^(6g-6-2d)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SingleEvenZeroForms {
    pub half_order: u32,
    pub derived: String,
    pub printed: String,
    pub agree: bool,
}

pub fn single_even_zero_forms(p: &QDProfile) -> Option<SingleEvenZeroForms> {
    let evens: Vec<u32> = p.mults.iter().copied().filter(|m| m % 2 == 0).collect();
    if evens.len() != 1 || p.n_odd() == 0 || p.mults.iter().any(|&m| m % 2 == 1 && m != 1) {
        return None;
    }
    let d = evens[0] / 2;
    let scale = pow2(6 * p.genus - 6 - 2 * d);
    let derived = BigUint::from(2 * d + 1) * &scale;
    let printed = BigUint::from(4 * d - 3) * &scale;
    Some(SingleEvenZeroForms {
        half_order: d,
        agree: derived == printed,
        derived: derived.to_string(),
        printed: printed.to_string(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FibreKind {
    /// Holomorphic fibre bundle over a torsor of the Prym variety.
    Bundle,
    /// Only a surjection from a bundle of Hecke parameters; no global fibring.
    NormalizationBundle,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GlobalFibre {
    pub kind: FibreKind,
    /// Local fibre factor per zero of order at least 2.
    pub factors: Vec<String>,
    pub summary: String,
}

fn factor_name(m: u32) -> String {
    match m {
        2 | 3 => "P1".into(),
        5 => "P(1,1,2)".into(),
        _ if m % 2 == 1 => format!("Heck{m}/G"),
        _ => format!("EvenHeck{m}/G"),
    }
}

pub fn global_fibre_description(p: &QDProfile) -> GlobalFibre {
    let factors: Vec<String> = p.mults.iter().filter(|&&m| m >= 2).map(|&m| factor_name(m)).collect();
    let p1 = factors.iter().filter(|f| *f == "P1").count();
    let p112 = factors.iter().filter(|f| *f == "P(1,1,2)").count();
    let product = if factors.is_empty() {
        "a point".to_string()
    } else if p1 + p112 == factors.len() {
        let mut parts = Vec::new();
        if p1 > 0 {
            parts.push(format!("(P1)^{p1}"));
        }
        if p112 > 0 {
            parts.push(format!("P(1,1,2)^{p112}"));
        }
        parts.join(" x ")
    } else {
        factors.join(" x ")
    };
    if p.n_even() == 0 {
        let qualifier = if p112 > 0 { " up to normalization" } else { "" };
        GlobalFibre {
            kind: FibreKind::Bundle,
            summary: format!("fibre bundle over a twisted Prym torsor with fibre {product}{qualifier}"),
            factors,
        }
    } else {
        GlobalFibre {
            kind: FibreKind::NormalizationBundle,
            summary: format!(
                "no global fibring; the normalization is a bundle with fibre {product} mapping onto the fibre non-injectively"
            ),
            factors,
        }
    }
}

/// Full report behind the `strata` subcommand.
#[derive(Clone, Debug, Serialize)]
pub struct StrataReport {
    pub profile: QDProfile,
    pub numerology: Numerology,
    pub strata: Vec<Stratum>,
    pub poset_edges: Vec<(usize, usize)>,
    pub classification: Option<Classification>,
    pub global_fibre: GlobalFibre,
    #[serde(serialize_with = "serialize_count")]
    pub total_real_points: Option<BigUint>,
    pub formulas: Vec<&'static str>,
    pub warnings: Vec<String>,
}

pub const FORMULAS: &[&str] = &[
    "dim = 3g - 3 - deg(D)",
    "dim = prym_dim + r1 + r2",
    "spectral_genus = 2g - 1 + n_odd/2",
    "prym_dim = g - 1 + n_odd/2",
    "real_points(D) = 2^(2g - 2 + n - n0)",
];

pub fn strata_report(p: &QDProfile) -> StrataReport {
    let strata = enumerate_strata(p);
    let poset = degeneration_poset(p);
    let mut warnings = Vec::new();
    let classification = match classify_components(p) {
        Ok(c) => Some(c),
        Err(e) => {
            warnings.push(format!("component classification skipped: {e}"));
            None
        }
    };
    if p.n_odd() == 0 {
        warnings.push("real points are not counted for profiles without odd zeros".into());
    }
    if strata.iter().any(|s| has_saturated_even_zero(p, &s.divisor)) {
        warnings.push("r1 counts unsaturated even zeros only; the closed r2 formula does not apply on saturated strata".into());
    }
    if let Some(f) = single_even_zero_forms(p) {
        if !f.agree {
            warnings.push(format!(
                "single even zero of order {}: stratum sum gives {} but the printed closed form (4d-3)2^(6g-6-2d) gives {}",
                2 * f.half_order,
                f.derived,
                f.printed
            ));
        }
    }
    StrataReport {
        profile: p.clone(),
        numerology: spectral_numerology(p),
        total_real_points: total_real_points(p).ok(),
        strata,
        poset_edges: poset.edges,
        classification,
        global_fibre: global_fibre_description(p),
        formulas: FORMULAS.to_vec(),
        warnings,
    }
}
