//! Exact character sums in `Z[ζ_p]`.
//!
//! A [`CyclotomicInteger`] is stored in the integral basis `ζ^0, …, ζ^{p-2}`;
//! the relation `1 + ζ + … + ζ^{p-1} = 0` eliminates `ζ^{p-1}`. Every sum is
//! accumulated in the redundant basis `ζ^0, …, ζ^{p-1}` first and reduced
//! once.

use std::fmt;

use serde::Serialize;

use crate::defsets::{DefiningSet, DefiningSetKind};
use crate::error::{Error, Result};
use crate::gf::{build_field, FieldCtx, FieldElement, Side, TowerCtx};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CyclotomicInteger {
    p: u32,
    coeffs: Vec<i64>,
}

impl CyclotomicInteger {
    /// Reduces a length-`p` coordinate vector over `ζ^0..ζ^{p-1}`.
    pub fn canonical(p: u32, raw: &[i64]) -> CyclotomicInteger {
        assert_eq!(raw.len(), p as usize, "raw cyclotomic vector must have length p");
        let top = raw[p as usize - 1];
        let coeffs = raw[..p as usize - 1].iter().map(|c| c - top).collect();
        CyclotomicInteger { p, coeffs }
    }

    pub fn zero(p: u32) -> CyclotomicInteger {
        CyclotomicInteger { p, coeffs: vec![0; p as usize - 1] }
    }

    pub fn from_int(p: u32, v: i64) -> CyclotomicInteger {
        let mut z = CyclotomicInteger::zero(p);
        z.coeffs[0] = v;
        z
    }

    /// `ζ_p^k`.
    pub fn zeta_pow(p: u32, k: u64) -> CyclotomicInteger {
        let mut raw = vec![0i64; p as usize];
        raw[(k % p as u64) as usize] = 1;
        CyclotomicInteger::canonical(p, &raw)
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    /// The rational value, if this is a rational integer.
    pub fn as_integer(&self) -> Option<i64> {
        self.coeffs[1..].iter().all(|&c| c == 0).then_some(self.coeffs[0])
    }

    pub fn add(&self, other: &CyclotomicInteger) -> CyclotomicInteger {
        assert_eq!(self.p, other.p);
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect();
        CyclotomicInteger { p: self.p, coeffs }
    }

    pub fn neg(&self) -> CyclotomicInteger {
        self.scale(-1)
    }

    pub fn sub(&self, other: &CyclotomicInteger) -> CyclotomicInteger {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: i64) -> CyclotomicInteger {
        CyclotomicInteger { p: self.p, coeffs: self.coeffs.iter().map(|a| a * c).collect() }
    }

    pub fn mul(&self, other: &CyclotomicInteger) -> CyclotomicInteger {
        assert_eq!(self.p, other.p);
        let p = self.p as usize;
        let mut raw = vec![0i64; p];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                raw[(i + j) % p] += a * b;
            }
        }
        CyclotomicInteger::canonical(self.p, &raw)
    }

    /// Exact division by a rational integer; `None` if the quotient is not in
    /// `Z[ζ_p]`.
    pub fn div_exact(&self, d: i64) -> Option<CyclotomicInteger> {
        if d == 0 || self.coeffs.iter().any(|c| c % d != 0) {
            return None;
        }
        Some(CyclotomicInteger { p: self.p, coeffs: self.coeffs.iter().map(|c| c / d).collect() })
    }
}

impl fmt::Display for CyclotomicInteger {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(v) = self.as_integer() {
            return write!(f, "{v}");
        }
        let mut first = true;
        for (k, &c) in self.coeffs.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let sign = if c < 0 { "-" } else if first { "" } else { "+" };
            let mag = c.unsigned_abs();
            let mono = match k {
                0 => String::new(),
                1 => "z".to_string(),
                _ => format!("z^{k}"),
            };
            let body = match (mag, k) {
                (_, 0) => mag.to_string(),
                (1, _) => mono,
                _ => format!("{mag}{mono}"),
            };
            write!(f, "{}{sign}{body}", if first { "" } else { " " })?;
            first = false;
        }
        Ok(())
    }
}

impl Serialize for CyclotomicInteger {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Running sum of powers of `ζ_p`.
#[derive(Debug, Clone)]
pub struct CyclotomicAccumulator {
    p: u32,
    raw: Vec<i64>,
}

impl CyclotomicAccumulator {
    pub fn new(p: u32) -> Self {
        Self { p, raw: vec![0; p as usize] }
    }

    pub fn add_zeta_pow(&mut self, k: u32, c: i64) {
        self.raw[(k % self.p) as usize] += c;
    }

    pub fn finish(&self) -> CyclotomicInteger {
        CyclotomicInteger::canonical(self.p, &self.raw)
    }
}

/// `unit · p^{half_exponent / 2}` with `unit = i^unit_exp`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GaussSumValue {
    pub p: u32,
    pub unit_exp: u8,
    pub half_exponent: u32,
}

impl GaussSumValue {
    /// The unit as one of `1`, `i`, `-1`, `-i`.
    pub fn unit_str(&self) -> &'static str {
        ["+1", "+i", "-1", "-i"][self.unit_exp as usize]
    }

    /// Rational value when the unit is real and the exponent even.
    pub fn as_rational(&self) -> Option<i64> {
        if !self.half_exponent.is_multiple_of(2) || !self.unit_exp.is_multiple_of(2) {
            return None;
        }
        let mag = (self.p as i64).pow(self.half_exponent / 2);
        Some(if self.unit_exp == 0 { mag } else { -mag })
    }

    pub fn mul(&self, other: &GaussSumValue) -> GaussSumValue {
        assert_eq!(self.p, other.p);
        GaussSumValue {
            p: self.p,
            unit_exp: (self.unit_exp + other.unit_exp) % 4,
            half_exponent: self.half_exponent + other.half_exponent,
        }
    }
}

impl fmt::Display for GaussSumValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.unit_exp >= 2 { "-" } else { "" };
        let i = if self.unit_exp % 2 == 1 { "i*" } else { "" };
        let int = (self.p as u64).pow(self.half_exponent / 2);
        if self.half_exponent.is_multiple_of(2) {
            write!(f, "{sign}{i}{int}")
        } else if int == 1 {
            write!(f, "{sign}{i}sqrt({})", self.p)
        } else {
            write!(f, "{sign}{i}{int}*sqrt({})", self.p)
        }
    }
}

/// `ζ_p^{Tr(b x)}` in the chosen extension.
pub fn additive_char(tower: &TowerCtx, side: Side, b: FieldElement, x: FieldElement) -> CyclotomicInteger {
    let f = tower.field(side);
    CyclotomicInteger::zeta_pow(tower.p(), tower.trace_to_p(side, f.mul(b, x)) as u64)
}

/// `Σ_x χ_b(x)` over the whole extension.
pub fn additive_char_sum(tower: &TowerCtx, side: Side, b: FieldElement) -> CyclotomicInteger {
    let f = tower.field(side);
    let mut acc = CyclotomicAccumulator::new(tower.p());
    for x in f.elements() {
        acc.add_zeta_pow(tower.trace_to_p(side, f.mul(b, x)), 1);
    }
    acc.finish()
}

/// `G = Σ_x η(x) ζ_p^{Tr(x)}` by direct summation.
pub fn gauss_sum_bruteforce(ctx: &FieldCtx) -> Result<CyclotomicInteger> {
    if ctx.p() == 2 {
        return Err(Error::EvenCharacteristic);
    }
    let mut acc = CyclotomicAccumulator::new(ctx.p());
    for x in ctx.elements().skip(1) {
        let eta = ctx.quadratic_character(x)?;
        acc.add_zeta_pow(ctx.absolute_trace(x), eta as i64);
    }
    Ok(acc.finish())
}

/// Closed form `(-1)^{sm-1} i^{(p-1)^2 s m / 4} q^{m/2}` for the quadratic
/// Gauss sum of `F_{p^{sm}}`.
pub fn gauss_sum_formula(p: u32, s: u32, m: u32) -> Result<GaussSumValue> {
    if p == 2 {
        return Err(Error::EvenCharacteristic);
    }
    if s == 0 || m == 0 {
        return Err(Error::InvalidParameter("s and m must be positive".into()));
    }
    let e = s as u64 * m as u64;
    let half = ((p as u64 - 1) / 2).pow(2) % 4;
    // (-1)^{e-1} = i^{2(e-1)}
    let unit_exp = ((2 * (e - 1)) % 4 + (half * e) % 4) % 4;
    Ok(GaussSumValue { p, unit_exp: unit_exp as u8, half_exponent: e as u32 })
}

/// Exact image of a closed-form Gauss sum in `Z[ζ_p]`. Odd exponents are
/// expressed through the prime-field Gauss sum `g_1 = u_1 √p`.
pub fn gauss_formula_to_cyclotomic(v: &GaussSumValue) -> Result<CyclotomicInteger> {
    let p = v.p;
    if v.half_exponent.is_multiple_of(2) {
        let r = v.as_rational().ok_or_else(|| {
            Error::Mismatch(format!("even exponent {} paired with non-real unit {}", v.half_exponent, v.unit_str()))
        })?;
        return Ok(CyclotomicInteger::from_int(p, r));
    }
    let g1 = gauss_sum_bruteforce(&build_field(p, 1)?)?;
    let u1 = gauss_sum_formula(p, 1, 1)?;
    let ratio = (4 + v.unit_exp - u1.unit_exp) % 4;
    if !ratio.is_multiple_of(2) {
        return Err(Error::Mismatch(format!(
            "unit {} is not a real multiple of the prime-field unit {}",
            v.unit_str(),
            u1.unit_str()
        )));
    }
    let sign = if ratio == 0 { 1 } else { -1 };
    Ok(g1.scale(sign * (p as i64).pow((v.half_exponent - 1) / 2)))
}

/// `Σ_x ζ_p^{Tr(a2 x^2 + a1 x + a0)}` by direct summation.
pub fn quadratic_completion_sum(
    ctx: &FieldCtx,
    a2: FieldElement,
    a1: FieldElement,
    a0: FieldElement,
) -> Result<CyclotomicInteger> {
    if ctx.p() == 2 {
        return Err(Error::EvenCharacteristic);
    }
    if a2.is_zero() {
        return Err(Error::InvalidParameter("leading coefficient a2 must be nonzero".into()));
    }
    let mut acc = CyclotomicAccumulator::new(ctx.p());
    for x in ctx.elements() {
        let v = ctx.add(ctx.add(ctx.mul(a2, ctx.mul(x, x)), ctx.mul(a1, x)), a0);
        acc.add_zeta_pow(ctx.absolute_trace(v), 1);
    }
    Ok(acc.finish())
}

/// `G η(a2) ζ_p^{Tr(a0 - a1^2 (4 a2)^{-1})}` with `G` from the closed form.
pub fn quadratic_completion_closed_form(
    ctx: &FieldCtx,
    a2: FieldElement,
    a1: FieldElement,
    a0: FieldElement,
) -> Result<CyclotomicInteger> {
    if ctx.p() == 2 {
        return Err(Error::EvenCharacteristic);
    }
    let four_a2 = ctx.mul(ctx.constant(4), a2);
    let shift = ctx.sub(a0, ctx.mul(ctx.mul(a1, a1), ctx.inv(four_a2)?));
    let g = gauss_formula_to_cyclotomic(&gauss_sum_formula(ctx.p(), ctx.degree(), 1)?)?;
    let eta = ctx.quadratic_character(a2)? as i64;
    Ok(g.scale(eta).mul(&CyclotomicInteger::zeta_pow(ctx.p(), ctx.absolute_trace(shift) as u64)))
}

/// Sets with at most this many elements are re-summed in `Z[ζ_p]` inside
/// [`t_sum`] when debug assertions are on.
const DEBUG_ORACLE_LIMIT: usize = 2048;

/// `T(D, b) = Σ_{y ∈ D} ζ_p^{Tr(b y)}` for an `F_q^*`-invariant `D`.
///
/// Each `F_q^*`-orbit `{z y}` contributes `q - 1` when `Tr_{q^m/q}(b y) = 0`
/// and `-1` otherwise; a member `0` contributes `1`.
pub fn t_sum(tower: &TowerCtx, d: &DefiningSet, b: FieldElement) -> Result<i64> {
    let reps = d.orbit_representatives().ok_or(Error::NotInvariant)?;
    let side = d.side();
    let f = tower.field(side);
    let ext = tower.ext(side);
    let q1 = tower.q() as i64 - 1;
    let mut t = i64::from(d.contains_zero());
    for &y in reps {
        t += if ext.trace_q(f.mul(b, y)).is_zero() { q1 } else { -1 };
    }
    if cfg!(debug_assertions) && d.len() <= DEBUG_ORACLE_LIMIT {
        let full = t_sum_cyclotomic(tower, d, b);
        debug_assert_eq!(full.as_integer(), Some(t), "orbit T(D,b) disagrees with the full sum");
    }
    Ok(t)
}

/// The full character sum `T(D, b)` in `Z[ζ_p]`, for any `D`.
pub fn t_sum_cyclotomic(tower: &TowerCtx, d: &DefiningSet, b: FieldElement) -> CyclotomicInteger {
    let side = d.side();
    let f = tower.field(side);
    let mut acc = CyclotomicAccumulator::new(tower.p());
    for &y in d.elements() {
        acc.add_zeta_pow(tower.trace_to_p(side, f.mul(b, y)), 1);
    }
    acc.finish()
}

/// `G_{m2}` of `F_{q^{m2}}` as a rational integer (even `m2`).
fn gauss_rational(tower: &TowerCtx, m: u32) -> Result<i64> {
    gauss_sum_formula(tower.p(), tower.s(), m)?
        .as_rational()
        .ok_or_else(|| Error::Mismatch(format!("G_{m} is not rational")))
}

/// `G_1 G_{m2}` as a rational integer (odd `m2`).
fn gauss_product_rational(tower: &TowerCtx) -> Result<i64> {
    let g1 = gauss_sum_formula(tower.p(), tower.s(), 1)?;
    let gm = gauss_sum_formula(tower.p(), tower.s(), tower.m2())?;
    g1.mul(&gm)
        .as_rational()
        .ok_or_else(|| Error::Mismatch("G_1 G_m2 is not rational".into()))
}

fn exact_div(num: i64, den: i64, what: &str) -> Result<i64> {
    if num % den != 0 {
        return Err(Error::InexactDivision(format!("{what}: {num}/{den}")));
    }
    Ok(num / den)
}

/// The closed-form lemma value of `T(D, b)` for `b ≠ 0` in `F_{q^{m2}}`.
pub fn t_sum_closed_form(tower: &TowerCtx, kind: DefiningSetKind, b: FieldElement) -> Result<i64> {
    use DefiningSetKind::*;
    if b.is_zero() {
        return Err(Error::InvalidParameter("closed forms of T(D,b) require b != 0".into()));
    }
    let q = tower.q() as i64;
    let m2 = tower.m2();
    let tilde = i64::from(kind.is_tilde());
    let base = match kind {
        S => return Err(Error::InvalidParameter("T(D,b) is defined for D-kinds".into())),
        D1 | D1Tilde => -1,
        D2 | D2Tilde => {
            if tower.unembed(Side::M2, b).is_some() {
                -q.pow(m2 - 1)
            } else {
                0
            }
        }
        D3 | D3Tilde => {
            let fq = tower.fq();
            let f = tower.field(Side::M2);
            let rho = tower.trace_to_q(Side::M2, f.mul(b, b));
            if m2.is_multiple_of(2) {
                let g_over_q = exact_div(gauss_rational(tower, m2)?, q, "G/q")?;
                if rho.is_zero() {
                    -1 + (q - 1) * g_over_q
                } else {
                    -1 - g_over_q
                }
            } else if rho.is_zero() {
                -1
            } else {
                let eta = fq.quadratic_character(fq.neg(rho))? as i64;
                -1 + eta * exact_div(gauss_product_rational(tower)?, q, "G1 Gm/q")?
            }
        }
    };
    Ok(base + tilde)
}

/// Exhaustive and closed-form values of `|{b ∈ F_{q^{m2}}^* : Tr(b^2) = ρ}|`.
#[derive(Debug, Clone, Serialize)]
pub struct NRhoCount {
    pub rho: u32,
    pub count: u64,
    /// The even-`m2` closed form; `None` when it is not an algebraic integer.
    pub even_form: Option<CyclotomicInteger>,
    /// The odd-`m2` closed form; `None` when it is not an algebraic integer.
    pub odd_form: Option<CyclotomicInteger>,
    pub even_form_matches: bool,
    pub odd_form_matches: bool,
}

/// Counts `N_ρ` exhaustively and evaluates both parity closed forms exactly
/// in `Z[ζ_p]`. Fails if the form for the actual parity of `m2` disagrees.
pub fn n_rho_count(tower: &TowerCtx, rho: FieldElement) -> Result<NRhoCount> {
    let p = tower.p();
    if p == 2 {
        return Err(Error::EvenCharacteristic);
    }
    let fq = tower.fq();
    if rho.raw() >= fq.order() {
        return Err(Error::InvalidParameter("rho must be an element of F_q".into()));
    }
    let f = tower.field(Side::M2);
    let count = f
        .elements()
        .skip(1)
        .filter(|&b| tower.trace_to_q(Side::M2, f.mul(b, b)) == rho)
        .count() as u64;

    let q = tower.q() as i64;
    let m2 = tower.m2();
    let qm1 = q.pow(m2 - 1);
    let gm = gauss_formula_to_cyclotomic(&gauss_sum_formula(p, tower.s(), m2)?)?;
    let g1 = gauss_formula_to_cyclotomic(&gauss_sum_formula(p, tower.s(), 1)?)?;
    let int = |v: i64| CyclotomicInteger::from_int(p, v);

    let even_form = if rho.is_zero() {
        gm.scale(q - 1).div_exact(q).map(|t| t.add(&int(qm1 - 1)))
    } else {
        gm.div_exact(q).map(|t| int(qm1).sub(&t))
    };
    let odd_form = if rho.is_zero() {
        Some(int(qm1 - 1))
    } else {
        let eta = fq.quadratic_character(fq.neg(rho))? as i64;
        gm.mul(&g1).scale(eta).div_exact(q).map(|t| t.add(&int(qm1)))
    };
    let observed = int(count as i64);
    let even_form_matches = even_form.as_ref() == Some(&observed);
    let odd_form_matches = odd_form.as_ref() == Some(&observed);
    let expected = if m2.is_multiple_of(2) { even_form_matches } else { odd_form_matches };
    if !expected {
        return Err(Error::Mismatch(format!("N_rho for rho={} disagrees with its closed form", rho.raw())));
    }
    Ok(NRhoCount { rho: rho.raw(), count, even_form, odd_form, even_form_matches, odd_form_matches })
}
