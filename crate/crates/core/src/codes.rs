//! The codes `C_{S×D} = {c(a,b)}` with `c(a,b)_{(x,y)} = Tr(ax) + Tr(by)`,
//! their weight distributions (enumerated and closed-form) and generator
//! matrices.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use crate::charsum::{gauss_sum_formula, t_sum};
use crate::defsets::{build_d, build_s, DefiningSet, DefiningSetKind};
use crate::error::{Error, Result};
use crate::gf::{checked_pow, is_prime, FieldElement, Side, TowerCtx};

/// Default limit on `q^{m1+m2}` for naive enumeration.
pub const NAIVE_ENUM_CAP: u64 = 1 << 20;
/// Default limit on `q^{m1+m2}` for the fast and histogram paths.
pub const FAST_ENUM_CAP: u64 = 1 << 24;
/// Environment variable overriding both enumeration caps.
pub const ENUM_CAP_ENV: &str = "FWCODES_MAX_ENUM";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Weight from `T(D, b)`, precomputed once per `b`.
    Fast,
    /// Coordinate-by-coordinate count of every codeword.
    Naive,
    /// Zero count from the trace histograms of `S` and `D`; depends on `S`
    /// explicitly, unlike the fast path.
    Histogram,
}

impl Mode {
    pub fn default_cap(self) -> u64 {
        if let Some(cap) = std::env::var(ENUM_CAP_ENV).ok().and_then(|v| v.trim().parse().ok()) {
            return cap;
        }
        match self {
            Mode::Naive => NAIVE_ENUM_CAP,
            Mode::Fast | Mode::Histogram => FAST_ENUM_CAP,
        }
    }
}

/// A code `C_{S×D}` over a tower. Columns are ordered `(x, y)` with `x`
/// running over `S` in the outer loop.
#[derive(Debug, Clone)]
pub struct CodeSpec<'a> {
    tower: &'a TowerCtx,
    s: DefiningSet,
    d: DefiningSet,
    family: Option<DefiningSetKind>,
}

impl<'a> CodeSpec<'a> {
    /// The code of one of the six in-scope families, with the canonical `S`.
    pub fn for_family(tower: &'a TowerCtx, family: DefiningSetKind) -> Result<CodeSpec<'a>> {
        check_family_params(family, tower.p(), tower.s(), tower.m1(), tower.m2())?;
        let d = build_d(tower, family)?;
        CodeSpec::new(tower, build_s(tower), d)
    }

    pub fn new(tower: &'a TowerCtx, s: DefiningSet, d: DefiningSet) -> Result<CodeSpec<'a>> {
        if s.side() != Side::M1 || d.side() != Side::M2 {
            return Err(Error::InvalidParameter("S must lie in F_{q^m1} and D in F_{q^m2}".into()));
        }
        if s.is_empty() || d.is_empty() {
            return Err(Error::FamilyConstraint("defining sets must be nonempty".into()));
        }
        let family = d.kind();
        Ok(CodeSpec { tower, s, d, family })
    }

    pub fn tower(&self) -> &'a TowerCtx {
        self.tower
    }

    pub fn s(&self) -> &DefiningSet {
        &self.s
    }

    pub fn d(&self) -> &DefiningSet {
        &self.d
    }

    pub fn family(&self) -> Option<DefiningSetKind> {
        self.family
    }

    pub fn n(&self) -> usize {
        self.s.len() * self.d.len()
    }

    /// The dimension claimed for every in-scope family.
    pub fn claimed_k(&self) -> u32 {
        self.tower.m1() + self.tower.m2()
    }

    /// `q^{m1+m2}`, the number of pairs `(a, b)`.
    pub fn message_count(&self) -> u64 {
        self.tower.field(Side::M1).order() as u64 * self.tower.field(Side::M2).order() as u64
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Codeword {
    pub a: FieldElement,
    pub b: FieldElement,
    /// Entries of `F_q`, in column order.
    pub coords: Vec<FieldElement>,
}

impl Codeword {
    pub fn weight(&self) -> usize {
        self.coords.iter().filter(|c| !c.is_zero()).count()
    }
}

pub fn codeword(spec: &CodeSpec, a: FieldElement, b: FieldElement) -> Codeword {
    let t = spec.tower;
    let (f1, f2, fq) = (t.field(Side::M1), t.field(Side::M2), t.fq());
    let ty: Vec<FieldElement> = spec.d.elements().iter().map(|&y| t.trace_to_q(Side::M2, f2.mul(b, y))).collect();
    let mut coords = Vec::with_capacity(spec.n());
    for &x in spec.s.elements() {
        let tx = t.trace_to_q(Side::M1, f1.mul(a, x));
        coords.extend(ty.iter().map(|&v| fq.add(tx, v)));
    }
    Codeword { a, b, coords }
}

fn exact_div(num: i128, den: i128, what: &str) -> Result<i128> {
    if num % den != 0 {
        return Err(Error::InexactDivision(format!("{what}: {num}/{den}")));
    }
    Ok(num / den)
}

/// Weight from the zero pattern of `(a, b)` and `T(D, b)`.
fn weight_from_t(q: i128, qm1: i128, dlen: i128, a_zero: bool, b_zero: bool, t: i128) -> Result<u64> {
    let w = match (a_zero, b_zero) {
        (true, true) => 0,
        (false, true) => exact_div(qm1, q, "q^{m1-1}")? * dlen,
        (true, false) => exact_div((qm1 - 1) * (dlen - t), q, "a = 0 weight")?,
        (false, false) => exact_div((qm1 - 1) * dlen + t, q, "a, b != 0 weight")?,
    };
    u64::try_from(w).map_err(|_| Error::Mismatch(format!("negative weight {w}")))
}

/// `wt(c(a, b))` through the character-sum formula.
pub fn weight_of(spec: &CodeSpec, a: FieldElement, b: FieldElement) -> Result<u64> {
    let t = spec.tower;
    let q = t.q() as i128;
    let qm1 = t.field(Side::M1).order() as i128;
    let tv = if b.is_zero() { spec.d.len() as i64 } else { t_sum(t, &spec.d, b)? };
    weight_from_t(q, qm1, spec.d.len() as i128, a.is_zero(), b.is_zero(), tv as i128)
}

/// A weight distribution of the nonzero codewords. The zero codeword is
/// implicit; a nonzero message mapping to the zero word would appear as a
/// weight-0 entry.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WeightDistribution {
    pub n: u64,
    pub k: u32,
    /// `(w, A_w)` sorted by weight, all counts positive.
    pub entries: Vec<(u64, u64)>,
}

impl WeightDistribution {
    pub fn from_map(n: u64, k: u32, map: BTreeMap<u64, u64>) -> WeightDistribution {
        let entries = map.into_iter().filter(|&(_, c)| c > 0).collect();
        WeightDistribution { n, k, entries }
    }

    /// Minimum positive weight.
    pub fn d(&self) -> Option<u64> {
        self.entries.iter().map(|e| e.0).find(|&w| w > 0)
    }

    pub fn w_min(&self) -> Option<u64> {
        self.d()
    }

    pub fn w_max(&self) -> Option<u64> {
        self.entries.iter().map(|e| e.0).filter(|&w| w > 0).max()
    }

    /// Distinct positive weights.
    pub fn nonzero_weights(&self) -> Vec<u64> {
        self.entries.iter().map(|e| e.0).filter(|&w| w > 0).collect()
    }

    pub fn frequency(&self, w: u64) -> u64 {
        self.entries.iter().find(|e| e.0 == w).map_or(0, |e| e.1)
    }

    /// Number of codewords, counting the zero word.
    pub fn total(&self) -> u128 {
        1 + self.entries.iter().map(|e| e.1 as u128).sum::<u128>()
    }

    /// `Σ A_w · w`.
    pub fn first_moment(&self) -> u128 {
        self.entries.iter().map(|&(w, c)| w as u128 * c as u128).sum()
    }

    /// Checks the frequency total `q^k`, the range `0 ≤ w ≤ n` and the first
    /// power moment `n (q-1) q^{k-1}`.
    pub fn invariant_checks(&self, q: u64) -> Vec<(&'static str, bool)> {
        let qk = (q as u128).pow(self.k);
        vec![
            ("frequency_total", self.total() == qk),
            ("weights_in_range", self.entries.iter().all(|e| e.0 <= self.n)),
            ("first_moment", (qk / q as u128).checked_mul(self.n as u128 * (q as u128 - 1)) == Some(self.first_moment())),
        ]
    }

    /// CSV with header `weight,frequency`, including the zero word.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("weight,frequency\n0,1\n");
        for &(w, c) in &self.entries {
            let _ = writeln!(out, "{w},{c}");
        }
        out
    }
}

/// Enumerates all `q^{m1+m2}` codewords under the mode's default cap.
pub fn weight_distribution_enumerated(spec: &CodeSpec, mode: Mode) -> Result<WeightDistribution> {
    weight_distribution_enumerated_with_cap(spec, mode, mode.default_cap())
}

pub fn weight_distribution_enumerated_with_cap(spec: &CodeSpec, mode: Mode, cap: u64) -> Result<WeightDistribution> {
    let size = spec.message_count();
    if size > cap {
        return Err(Error::CapExceeded { size, cap });
    }
    let map = match mode {
        Mode::Fast => enumerate_fast(spec)?,
        Mode::Naive => enumerate_naive(spec),
        Mode::Histogram => enumerate_histogram(spec),
    };
    Ok(WeightDistribution::from_map(spec.n() as u64, spec.claimed_k(), map))
}

fn merge(mut a: BTreeMap<u64, u64>, b: BTreeMap<u64, u64>) -> BTreeMap<u64, u64> {
    for (w, c) in b {
        *a.entry(w).or_insert(0) += c;
    }
    a
}

fn enumerate_fast(spec: &CodeSpec) -> Result<BTreeMap<u64, u64>> {
    let t = spec.tower;
    let q = t.q() as i128;
    let f1 = t.field(Side::M1);
    let f2 = t.field(Side::M2);
    let qm1 = f1.order() as i128;
    let dlen = spec.d.len() as i128;
    let tvals: Vec<i64> = (0..f2.order())
        .into_par_iter()
        .map(|raw| {
            let b = FieldElement::from_raw(raw);
            if b.is_zero() { Ok(spec.d.len() as i64) } else { t_sum(t, &spec.d, b) }
        })
        .collect::<Result<_>>()?;
    let tvals = &tvals;
    (0..f1.order())
        .into_par_iter()
        .try_fold(BTreeMap::new, |mut acc, a| {
            for (b, &tv) in tvals.iter().enumerate() {
                if a == 0 && b == 0 {
                    continue;
                }
                let w = weight_from_t(q, qm1, dlen, a == 0, b == 0, tv as i128)?;
                *acc.entry(w).or_insert(0u64) += 1;
            }
            Ok(acc)
        })
        .try_reduce(BTreeMap::new, |x, y| Ok(merge(x, y)))
}

fn enumerate_naive(spec: &CodeSpec) -> BTreeMap<u64, u64> {
    let t = spec.tower;
    let (f1, f2, fq) = (t.field(Side::M1), t.field(Side::M2), t.fq());
    (0..f1.order())
        .into_par_iter()
        .fold(BTreeMap::new, |mut acc, a_raw| {
            let a = FieldElement::from_raw(a_raw);
            let tx: Vec<FieldElement> =
                spec.s.elements().iter().map(|&x| t.trace_to_q(Side::M1, f1.mul(a, x))).collect();
            for b_raw in 0..f2.order() {
                if a_raw == 0 && b_raw == 0 {
                    continue;
                }
                let b = FieldElement::from_raw(b_raw);
                let ty: Vec<FieldElement> =
                    spec.d.elements().iter().map(|&y| t.trace_to_q(Side::M2, f2.mul(b, y))).collect();
                let mut w = 0u64;
                for &u in &tx {
                    for &v in &ty {
                        w += u64::from(!fq.add(u, v).is_zero());
                    }
                }
                *acc.entry(w).or_insert(0) += 1;
            }
            acc
        })
        .reduce(BTreeMap::new, merge)
}

/// `h[r][t] = #{e ∈ set : Tr(r e) = t}` for every `r` in the field.
fn trace_histograms(t: &TowerCtx, side: Side, set: &DefiningSet) -> Vec<Vec<u64>> {
    let f = t.field(side);
    let q = t.q() as usize;
    (0..f.order())
        .into_par_iter()
        .map(|raw| {
            let r = FieldElement::from_raw(raw);
            let mut h = vec![0u64; q];
            for &e in set.elements() {
                h[t.trace_to_q(side, f.mul(r, e)).raw() as usize] += 1;
            }
            h
        })
        .collect()
}

fn enumerate_histogram(spec: &CodeSpec) -> BTreeMap<u64, u64> {
    let t = spec.tower;
    let fq = t.fq();
    let q = t.q() as usize;
    let n = spec.n() as u64;
    let hs = trace_histograms(t, Side::M1, &spec.s);
    let hd = trace_histograms(t, Side::M2, &spec.d);
    let neg: Vec<usize> = fq.elements().map(|z| fq.neg(z).raw() as usize).collect();
    let hd = &hd;
    let neg = &neg;
    hs.par_iter()
        .enumerate()
        .fold(BTreeMap::new, |mut acc, (a, ha)| {
            for (b, hb) in hd.iter().enumerate() {
                if a == 0 && b == 0 {
                    continue;
                }
                let zeros: u64 = (0..q).map(|u| ha[u] * hb[neg[u]]).sum();
                *acc.entry(n - zeros).or_insert(0) += 1;
            }
            acc
        })
        .reduce(BTreeMap::new, merge)
}

/// Validates `(p, s, m1, m2)` for a family.
pub fn check_family_params(family: DefiningSetKind, p: u32, s: u32, m1: u32, m2: u32) -> Result<()> {
    if !is_prime(p as u64) {
        return Err(Error::NotPrime(p));
    }
    if s == 0 || m1 == 0 || m2 == 0 {
        return Err(Error::InvalidParameter("s, m1 and m2 must be positive".into()));
    }
    match family.base() {
        DefiningSetKind::S => Err(Error::InvalidParameter("S is not a code family".into())),
        DefiningSetKind::D2 if m2 < 2 => Err(Error::FamilyConstraint("D2 requires m2 >= 2".into())),
        DefiningSetKind::D3 if p == 2 => Err(Error::FamilyConstraint("D3 requires odd q".into())),
        DefiningSetKind::D3 if m2 < 2 => Err(Error::FamilyConstraint("D3 requires m2 >= 2".into())),
        // |D3| = (q-1)(1 + G_2/q) vanishes when G_2 = -q
        DefiningSetKind::D3 if m2 == 2 && gauss_sum_formula(p, s, 2)?.as_rational() == Some(-(p as i64).pow(s)) => {
            Err(Error::FamilyConstraint("D3 is empty for m2 = 2 when G_2 = -q".into()))
        }
        _ => Ok(()),
    }
}

/// The closed-form table distribution of a family, with equal weights merged
/// and zero-frequency rows dropped.
pub fn weight_distribution_formula(family: DefiningSetKind, p: u32, s: u32, m1: u32, m2: u32) -> Result<WeightDistribution> {
    check_family_params(family, p, s, m1, m2)?;
    let q = checked_pow(p as u64, s).ok_or_else(|| Error::InvalidParameter("q overflows".into()))? as i128;
    let pw = |e: u32| -> Result<i128> {
        (q as u64)
            .checked_pow(e)
            .map(|v| v as i128)
            .ok_or_else(|| Error::InvalidParameter(format!("q^{e} overflows")))
    };
    let big = m1 + m2;
    let (qa, qb) = (pw(m1)?, pw(m2)?);
    let top1 = pw(big - 1)?;
    pw(big)?;
    let s_len = (qa - 1) / (q - 1);
    let (rows, d_len): (Vec<(i128, i128)>, i128) = match family {
        DefiningSetKind::D1 => (
            vec![
                (top1 - pw(m1 - 1)?, qa - 1),
                (top1 - pw(m2 - 1)?, qb - 1),
                (top1 - pw(m1 - 1)? - pw(m2 - 1)?, (qa - 1) * (qb - 1)),
            ],
            qb - 1,
        ),
        DefiningSetKind::D1Tilde => (vec![(top1, qa - 1), (top1 - pw(m2 - 1)?, pw(big)? - qa)], qb),
        DefiningSetKind::D2 | DefiningSetKind::D2Tilde => {
            let top2 = pw(big - 2)?;
            let (b1, b2) = (pw(m2 - 1)?, pw(m2 - 2)?);
            let rows = if family == DefiningSetKind::D2 {
                vec![
                    (top1 - top2, qa - 1),
                    (top1 - top2 - b1 + b2, pw(big)? - pw(m1 + 1)?),
                    (top1 - b1, q - 1),
                    (top1 - top2 - b1, pw(m1 + 1)? - qa - q + 1),
                ]
            } else {
                let a1 = pw(m1 - 1)?;
                vec![
                    (top1 - top2 + a1, qa - 1),
                    (top1 - top2 - b1 + b2, qb - q),
                    (top1 - b1, q - 1),
                    (top1 - top2 - b1 + b2 + a1, pw(big)? - pw(m1 + 1)? - qb + q),
                    (top1 - top2 - b1 + a1, pw(m1 + 1)? - qa - q + 1),
                ]
            };
            let base = (q - 1) * b1;
            (rows, base + i128::from(family.is_tilde()))
        }
        DefiningSetKind::D3 | DefiningSetKind::D3Tilde if m2.is_multiple_of(2) => {
            let g_full = gauss_sum_formula(p, s, m2)?
                .as_rational()
                .ok_or_else(|| Error::Mismatch("G_m2 is not rational for even m2".into()))? as i128;
            let g = exact_div(g_full, q, "G_m2 / q")?;
            let top2 = pw(big - 2)?;
            let (a1, b1, b2) = (pw(m1 - 1)?, pw(m2 - 1)?, pw(m2 - 2)?);
            // (q-1) q^{m1-2} G = (q-1) q^{m1-1} (G/q)
            let ga = (q - 1) * a1 * g;
            let f_small = b1 - 1 + (q - 1) * g;
            // Σ_{ρ ≠ 0} |N_ρ| with |N_ρ| = q^{m2-1} - G/q; the printed rows carry
            // `+ G/q`, which breaks the frequency total
            let f_big = (q - 1) * (b1 - g);
            let rows = if family == DefiningSetKind::D3 {
                vec![
                    (top2 - a1 + ga, qa - 1),
                    (top2 - b2, f_small),
                    (top2 - b2 + (qa - 1) * g, f_big),
                    (top2 - b2 - a1 + ga, (qa - 1) * f_small),
                    (top2 - b2 - a1 + ((q - 1) * a1 - 1) * g, (qa - 1) * f_big),
                ]
            } else {
                vec![
                    (top2 + ga, qa - 1),
                    (top2 - b2, f_small),
                    (top2 - b2 + (qa - 1) * g, f_big),
                    (top2 - b2 + ga, (qa - 1) * f_small),
                    (top2 - b2 + ((q - 1) * a1 - 1) * g, (qa - 1) * f_big),
                ]
            };
            (rows, b1 - 1 + (q - 1) * g + i128::from(family.is_tilde()))
        }
        DefiningSetKind::D3 | DefiningSetKind::D3Tilde => {
            if m2 < 3 {
                return Err(Error::FamilyConstraint("odd m2 requires m2 >= 3".into()));
            }
            let top2 = pw(big - 2)?;
            let (a1, b1, b2) = (pw(m1 - 1)?, pw(m2 - 1)?, pw(m2 - 2)?);
            let h = pw((m2 - 3) / 2)?;
            let h1 = pw((m2 - 1) / 2)?;
            let half = (q - 1) / 2;
            let (f_plus, f_minus) = (half * (b1 + h1), half * (b1 - h1));
            let rows = if family == DefiningSetKind::D3 {
                vec![
                    (top2 - a1, qa - 1),
                    (top2 - b2, b1 - 1),
                    (top2 - b2 - (qa - 1) * h, f_plus),
                    (top2 - b2 + (qa - 1) * h, f_minus),
                    (top2 - b2 - a1, (qa - 1) * (b1 - 1)),
                    (top2 - b2 - a1 + h, (qa - 1) * f_plus),
                    (top2 - b2 - a1 - h, (qa - 1) * f_minus),
                ]
            } else {
                vec![
                    (top2, qa - 1),
                    (top2 - b2, qa * (b1 - 1)),
                    (top2 - b2 - (qa - 1) * h, f_plus),
                    (top2 - b2 + (qa - 1) * h, f_minus),
                    (top2 - b2 + h, (qa - 1) * f_plus),
                    (top2 - b2 - h, (qa - 1) * f_minus),
                ]
            };
            (rows, b1 - 1 + i128::from(family.is_tilde()))
        }
        DefiningSetKind::S => unreachable!("rejected by check_family_params"),
    };
    let n = s_len * d_len;
    let mut map = BTreeMap::new();
    for (i, (w, f)) in rows.into_iter().enumerate() {
        if f < 0 {
            return Err(Error::NegativeFrequency(format!("{} row {} has frequency {f}", family.name(), i + 1)));
        }
        if w < 0 || w > n {
            return Err(Error::Mismatch(format!("{} row {} has weight {w} outside [0, {n}]", family.name(), i + 1)));
        }
        if f > 0 {
            *map.entry(w as u64).or_insert(0u64) += f as u64;
        }
    }
    Ok(WeightDistribution::from_map(n as u64, big, map))
}

/// A dense matrix over `F_q`, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<FieldElement>,
}

impl Matrix {
    pub fn get(&self, r: usize, c: usize) -> FieldElement {
        self.entries[r * self.cols + c]
    }

    pub fn column(&self, c: usize) -> Vec<FieldElement> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    /// Rank over `F_q` by Gaussian elimination.
    pub fn rank(&self, tower: &TowerCtx) -> usize {
        let fq = tower.fq();
        let mut m = self.entries.clone();
        let mut rank = 0;
        for c in 0..self.cols {
            let Some(pivot) = (rank..self.rows).find(|&r| !m[r * self.cols + c].is_zero()) else {
                continue;
            };
            for j in 0..self.cols {
                m.swap(rank * self.cols + j, pivot * self.cols + j);
            }
            let inv = fq.inv(m[rank * self.cols + c]).expect("pivot is nonzero");
            for j in 0..self.cols {
                m[rank * self.cols + j] = fq.mul(inv, m[rank * self.cols + j]);
            }
            for r in 0..self.rows {
                let f = m[r * self.cols + c];
                if r == rank || f.is_zero() {
                    continue;
                }
                for j in 0..self.cols {
                    m[r * self.cols + j] = fq.sub(m[r * self.cols + j], fq.mul(f, m[rank * self.cols + j]));
                }
            }
            rank += 1;
            if rank == self.rows {
                break;
            }
        }
        rank
    }

    /// One line per row. Each entry is written as its base-`p` coefficient
    /// digits, low degree first; entries are separated by spaces.
    pub fn to_text(&self, tower: &TowerCtx) -> String {
        let fq = tower.fq();
        let mut out = String::new();
        for r in 0..self.rows {
            let line: Vec<String> = (0..self.cols)
                .map(|c| fq.coeffs(self.get(r, c)).iter().map(|d| d.to_string()).collect::<String>())
                .collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }
}

/// Rows `Tr(α^i x)` for `i < m1`, then `Tr(β^j y)` for `j < m2`, where `α`,
/// `β` are the canonical primitive elements; `{1, α, ..., α^{m1-1}}` is an
/// `F_q`-basis because `α` generates `F_{q^{m1}}` over `F_q`.
pub fn generator_matrix(spec: &CodeSpec) -> Matrix {
    let t = spec.tower;
    let (m1, m2) = (t.m1() as usize, t.m2() as usize);
    let (f1, f2) = (t.field(Side::M1), t.field(Side::M2));
    let cols = spec.n();
    let mut entries = vec![FieldElement::ZERO; (m1 + m2) * cols];
    let dlen = spec.d.len();
    for i in 0..m1 {
        let e = f1.exp(i as u64);
        for (xi, &x) in spec.s.elements().iter().enumerate() {
            let v = t.trace_to_q(Side::M1, f1.mul(e, x));
            for yi in 0..dlen {
                entries[i * cols + xi * dlen + yi] = v;
            }
        }
    }
    for j in 0..m2 {
        let e = f2.exp(j as u64);
        let row = m1 + j;
        for (yi, &y) in spec.d.elements().iter().enumerate() {
            let v = t.trace_to_q(Side::M2, f2.mul(e, y));
            for xi in 0..spec.s.len() {
                entries[row * cols + xi * dlen + yi] = v;
            }
        }
    }
    Matrix { rows: m1 + m2, cols, entries }
}

/// Fails with [`Error::RankDeficient`] unless the rank is `m1 + m2`.
pub fn verify_dimension(spec: &CodeSpec) -> Result<usize> {
    let rank = generator_matrix(spec).rank(spec.tower);
    let claimed = spec.claimed_k() as usize;
    if rank != claimed {
        return Err(Error::RankDeficient { rank, claimed });
    }
    Ok(rank)
}
