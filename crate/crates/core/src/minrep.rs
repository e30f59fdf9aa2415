//! K-types of the minimal representation of O(p,q), of the elliptic
//! representations π_{+,λ}, and the restriction to O(p,q')×O(q'').
//!
//! Labels are spherical-harmonic degrees; all arithmetic is exact, with
//! half-integers stored as twice their value.

use std::collections::BTreeMap;
use std::fmt;

use num::BigInt;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::spectra::harmonic_dim;

/// A number in ½ℤ, stored as twice its value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HalfInt(pub i64);

impl HalfInt {
    pub fn from_int(v: i64) -> Self {
        HalfInt(2 * v)
    }

    /// (num)/2.
    pub fn halves(num: i64) -> Self {
        HalfInt(num)
    }

    pub fn twice(&self) -> i64 {
        self.0
    }

    pub fn is_integer(&self) -> bool {
        self.0 % 2 == 0
    }

    pub fn to_f64(&self) -> f64 {
        self.0 as f64 / 2.0
    }

    /// Parse "3", "-1", "5/2" or "2.5".
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Parameter(format!("'{s}' is not an integer or half-integer"));
        if let Some((a, b)) = s.split_once('/') {
            let a: i64 = a.trim().parse().map_err(|_| bad())?;
            if b.trim() != "2" {
                return Err(bad());
            }
            return Ok(HalfInt(a));
        }
        if let Ok(v) = s.parse::<i64>() {
            return Ok(HalfInt(2 * v));
        }
        let v: f64 = s.parse().map_err(|_| bad())?;
        let t = 2.0 * v;
        if t.fract() != 0.0 || !t.is_finite() {
            return Err(bad());
        }
        Ok(HalfInt(t as i64))
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

impl Serialize for HalfInt {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Degrees (a, b) of H^a(ℝ^p) ⊗ H^b(ℝ^q).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct KType {
    pub a: u32,
    pub b: u32,
}

/// A multiplicity-free set of K-types below a cutoff.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KTypeSet {
    pub p: u32,
    pub q: u32,
    pub cutoff: u32,
    pub entries: Vec<KType>,
    /// λ for elliptic representations.
    pub lambda: Option<HalfInt>,
    /// λ > 0 for elliptic representations.
    pub discrete_series: Option<bool>,
}

impl KTypeSet {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn contains(&self, a: u32, b: u32) -> bool {
        self.entries.binary_search(&KType { a, b }).is_ok()
    }
}

fn check_minrep(p: u32, q: u32) -> Result<()> {
    if p <= 2 || q <= 2 {
        return Err(Error::Range(format!("minimal representation needs p, q > 2, got ({p},{q})")));
    }
    if (p + q) % 2 == 1 {
        return Err(Error::Parity(format!("p + q = {} must be even", p + q)));
    }
    Ok(())
}

/// K-types of the minimal representation: a + p/2 = b + q/2, max(a,b) ≤
/// cutoff.
pub fn minrep_ktypes(p: u32, q: u32, cutoff: u32) -> Result<KTypeSet> {
    check_minrep(p, q)?;
    let shift = (q as i64 - p as i64) / 2; // a − b
    let mut entries = Vec::new();
    for a in 0..=cutoff as i64 {
        let b = a - shift;
        if b >= 0 && b <= cutoff as i64 {
            entries.push(KType { a: a as u32, b: b as u32 });
        }
    }
    entries.sort();
    Ok(KTypeSet {
        p,
        q,
        cutoff,
        entries,
        lambda: None,
        discrete_series: None,
    })
}

/// Norm factor a + (p−2)/2 of the K-type (a, b).
pub fn norm_factor(p: u32, a: u32) -> HalfInt {
    HalfInt(2 * a as i64 + p as i64 - 2)
}

/// K-types (m, n) of π_{+,λ} on O(p,q): m − n ≥ β, m − n ≡ β mod 2 with
/// β = λ − p/2 + q/2 + 1, and m, n ≤ cutoff.
pub fn elliptic_rep_ktypes(p: u32, q: u32, lambda: HalfInt, cutoff: u32) -> Result<KTypeSet> {
    if p == 0 || q == 0 {
        return Err(Error::Parameter(format!("signature ({p},{q}) must be positive")));
    }
    // λ − (p+q)/2 ∈ ℤ
    if (lambda.0 - (p + q) as i64) % 2 != 0 {
        return Err(Error::Parameter(format!(
            "λ = {lambda} is not in ℤ + {}",
            HalfInt((p + q) as i64)
        )));
    }
    if lambda.0 <= -2 {
        return Err(Error::Parameter(format!("λ = {lambda} must exceed −1")));
    }
    let beta2 = lambda.0 - p as i64 + q as i64 + 2;
    let beta = beta2 / 2;
    let mut entries = Vec::new();
    for m in 0..=cutoff as i64 {
        for n in 0..=cutoff as i64 {
            let d = m - n;
            if d >= beta && (d - beta) % 2 == 0 {
                entries.push(KType { a: m as u32, b: n as u32 });
            }
        }
    }
    entries.sort();
    Ok(KTypeSet {
        p,
        q,
        cutoff,
        entries,
        lambda: Some(lambda),
        discrete_series: Some(lambda.0 > 0),
    })
}

fn dim(q: u32, b: u32) -> BigInt {
    harmonic_dim(q, b)
}

/// Degrees (b', b'') in the restriction of H^b(ℝ^{q'+q''}) to
/// O(q') × O(q''): b' + b'' ≤ b with b' + b'' ≡ b mod 2 and both factors
/// nonzero.
pub fn harmonic_branching(q1: u32, q2: u32, b: u32) -> Result<Vec<(u32, u32)>> {
    if q1 == 0 || q2 == 0 {
        return Err(Error::Parameter("harmonic branching needs q', q'' ≥ 1".into()));
    }
    let zero = BigInt::from(0);
    let mut out = Vec::new();
    for s in (0..=b).rev().step_by(2) {
        for b1 in (0..=s).rev() {
            let b2 = s - b1;
            if dim(q1, b1) != zero && dim(q2, b2) != zero {
                out.push((b1, b2));
            }
        }
    }
    Ok(out)
}

/// (Σ dim H^{b'} · dim H^{b''}, dim H^b(ℝ^{q'+q''})).
pub fn branching_dimension_identity(q1: u32, q2: u32, b: u32) -> Result<(BigInt, BigInt)> {
    let lhs = harmonic_branching(q1, q2, b)?
        .into_iter()
        .map(|(x, y)| dim(q1, x) * dim(q2, y))
        .sum();
    Ok((lhs, dim(q1 + q2, b)))
}

/// Plancherel weight l + q''/2 − 1 of the l-th summand.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PlancherelWeight {
    pub l: u32,
    pub weight: HalfInt,
    pub degenerate: bool,
}

pub fn plancherel_weight(q2: u32, l: u32) -> PlancherelWeight {
    let weight = HalfInt(2 * l as i64 + q2 as i64 - 2);
    PlancherelWeight {
        l,
        weight,
        degenerate: weight.0 == 0,
    }
}

/// Label (m, b', b'') of O(p) × O(q') × O(q'').
pub type Triple = (u32, u32, u32);

/// Outcome of the restriction check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BranchingReport {
    pub p: u32,
    pub q: u32,
    pub q1: u32,
    pub q2: u32,
    pub cutoff: u32,
    pub lhs_count: usize,
    pub rhs_count: usize,
    pub equal: bool,
    pub first_mismatch: Option<Triple>,
    /// Labels dropped because they sit on the cutoff boundary.
    pub boundary_excluded: usize,
    /// Values of l that contribute on the right.
    pub contributing_l: Vec<u32>,
    pub plancherel: Vec<PlancherelWeight>,
    #[serde(skip)]
    pub lhs: BTreeMap<Triple, u32>,
    #[serde(skip)]
    pub rhs: BTreeMap<Triple, u32>,
}

impl BranchingReport {
    /// CSV of the compared left-hand labels, header `m,b1,b2,mult`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("m,b1,b2,mult\n");
        for ((m, b1, b2), c) in &self.lhs {
            s.push_str(&format!("{m},{b1},{b2},{c}\n"));
        }
        s
    }
}

/// Compare the restriction of the minimal representation of O(p,q) to
/// O(p,q') × O(q'') with ⊕_l π_{+,l+q''/2−1}^{p,q'} ⊗ H^l(ℝ^{q''}).
///
/// Only labels whose generating K-types lie strictly below the cutoff are
/// compared.
pub fn branching_verify_compact(p: u32, q: u32, q1: u32, q2: u32, cutoff: u32) -> Result<BranchingReport> {
    check_minrep(p, q)?;
    if q1 == 0 || q2 == 0 || q1 + q2 != q {
        return Err(Error::Parameter(format!(
            "need q' + q'' = q with q', q'' ≥ 1, got {q1} + {q2} vs {q}"
        )));
    }
    let shift = (q as i64 - p as i64) / 2;
    let inside = |t: &Triple| {
        let (m, b1, b2) = *t;
        let b = m as i64 - shift;
        m < cutoff && b < cutoff as i64 && b1 + b2 < cutoff && b1 < cutoff && b2 < cutoff
    };
    let mut excluded = 0;
    let mut lhs = BTreeMap::new();
    for kt in minrep_ktypes(p, q, cutoff)?.entries {
        for (b1, b2) in harmonic_branching(q1, q2, kt.b)? {
            let t = (kt.a, b1, b2);
            if inside(&t) {
                *lhs.entry(t).or_insert(0) += 1;
            } else {
                excluded += 1;
            }
        }
    }
    let zero = BigInt::from(0);
    let mut rhs = BTreeMap::new();
    let mut contributing = Vec::new();
    let mut plancherel = Vec::new();
    for l in 0..=cutoff {
        if dim(q2, l) == zero {
            continue;
        }
        let pw = plancherel_weight(q2, l);
        plancherel.push(pw);
        let ell = elliptic_rep_ktypes(p, q1, pw.weight, cutoff)?;
        let mut any = false;
        for kt in ell.entries {
            let t = (kt.a, kt.b, l);
            if dim(q1, kt.b) == zero {
                continue;
            }
            if inside(&t) {
                *rhs.entry(t).or_insert(0) += 1;
                any = true;
            } else {
                excluded += 1;
            }
        }
        if any {
            contributing.push(l);
        }
    }
    let first_mismatch = lhs
        .keys()
        .chain(rhs.keys())
        .filter(|k| lhs.get(*k) != rhs.get(*k))
        .min()
        .copied();
    Ok(BranchingReport {
        p,
        q,
        q1,
        q2,
        cutoff,
        lhs_count: lhs.values().map(|v| *v as usize).sum(),
        rhs_count: rhs.values().map(|v| *v as usize).sum(),
        equal: first_mismatch.is_none(),
        first_mismatch,
        boundary_excluded: excluded,
        contributing_l: contributing,
        plancherel,
        lhs,
        rhs,
    })
}

/// Which factor carries π_+.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum Orientation {
    #[serde(rename = "+-")]
    PlusMinus,
    #[serde(rename = "-+")]
    MinusPlus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DiscreteParam {
    pub lambda: HalfInt,
    pub orientation: Orientation,
}

/// λ ∈ (1, λ_max] with λ ∈ ℤ + (p'+q')/2 and λ ∈ ℤ + (p''+q'')/2, in both
/// orientations. Incompatible parities give an empty list.
pub fn discrete_spectrum_params(p1: u32, q1: u32, p2: u32, q2: u32, lambda_max: HalfInt) -> Vec<DiscreteParam> {
    let par1 = (p1 + q1) % 2;
    let par2 = (p2 + q2) % 2;
    if par1 != par2 {
        return Vec::new();
    }
    let mut out = Vec::new();
    // twice λ runs over integers of parity par1 in (2, 2λ_max].
    let mut t = 3;
    while t <= lambda_max.0 {
        if (t - par1 as i64) % 2 == 0 {
            let lambda = HalfInt(t);
            out.push(DiscreteParam {
                lambda,
                orientation: Orientation::PlusMinus,
            });
            out.push(DiscreteParam {
                lambda,
                orientation: Orientation::MinusPlus,
            });
        }
        t += 1;
    }
    out
}
