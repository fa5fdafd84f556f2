//! Finite fields `F_{p^n}` with discrete-log tables, and the tower
//! `F_p ⊂ F_q ⊂ F_{q^{m1}}, F_{q^{m2}}` used by the code constructions.
//!
//! Elements are stored in the polynomial basis as packed base-`p` digits: the
//! coefficient of `x^i` is digit `i`. Constants of the prime field are
//! therefore the integers `0..p`. Every field carries full log/antilog
//! tables, so multiplication, inversion and powering are table lookups.

use serde::Serialize;

use crate::error::{Error, Result};

/// Largest field order for which tables are built.
pub const DEFAULT_FIELD_CAP: u64 = 1 << 22;

const NO_LOG: u32 = u32::MAX;

/// A field element in packed polynomial-basis form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct FieldElement(u32);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);
    pub const ONE: FieldElement = FieldElement(1);

    pub fn raw(self) -> u32 {
        self.0
    }

    /// Wraps a packed value without a range check; use
    /// [`FieldCtx::element`] for validated input.
    pub const fn from_raw(raw: u32) -> FieldElement {
        FieldElement(raw)
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// `base^exp` with overflow reported as `None`.
pub fn checked_pow(base: u64, exp: u32) -> Option<u64> {
    let mut acc: u64 = 1;
    for _ in 0..exp {
        acc = acc.checked_mul(base)?;
    }
    Some(acc)
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

fn mod_inverse(a: u64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(0);
    }
    let (mut old_r, mut r) = (a as i128 % m as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return None;
    }
    Some(old_s.rem_euclid(m as i128) as u64)
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn generates_prime_units(p: u32, g: u32) -> bool {
    if p == 2 {
        return g == 1;
    }
    let p = p as u64;
    prime_factors(p - 1).into_iter().all(|r| {
        let (mut acc, mut base, mut e) = (1u64, g as u64 % p, (p - 1) / r);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base % p;
            }
            base = base * base % p;
            e >>= 1;
        }
        acc != 1
    })
}

/// `a * b mod (x^n + low)` on coefficient vectors of length `n`.
fn poly_mulmod(p: u32, low: &[u32], a: &[u32], b: &[u32]) -> Vec<u32> {
    let n = low.len();
    let p = p as u64;
    let mut prod = vec![0u64; 2 * n];
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + ai as u64 * bj as u64) % p;
        }
    }
    for k in (n..2 * n).rev() {
        let c = prod[k];
        if c == 0 {
            continue;
        }
        prod[k] = 0;
        // x^k = -low * x^{k-n}
        for (i, &l) in low.iter().enumerate() {
            prod[k - n + i] = (prod[k - n + i] + (p - c) * l as u64) % p;
        }
    }
    prod.truncate(n);
    prod.into_iter().map(|c| c as u32).collect()
}

fn poly_x_pow(p: u32, low: &[u32], mut e: u64) -> Vec<u32> {
    let n = low.len();
    let mut result = vec![0u32; n];
    result[0] = 1;
    let mut base = vec![0u32; n];
    if n == 1 {
        base[0] = (p - low[0]) % p;
    } else {
        base[1] = 1;
    }
    while e > 0 {
        if e & 1 == 1 {
            result = poly_mulmod(p, low, &result, &base);
        }
        base = poly_mulmod(p, low, &base, &base);
        e >>= 1;
    }
    result
}

/// `x` has multiplicative order exactly `p^n - 1` modulo `x^n + low`. A
/// reducible modulus has fewer than `p^n - 1` units, so this also certifies
/// irreducibility.
fn is_primitive_poly(p: u32, low: &[u32], unit_primes: &[u64]) -> bool {
    let n = low.len();
    let units = (p as u64).pow(n as u32) - 1;
    let one: Vec<u32> = (0..n).map(|i| u32::from(i == 0)).collect();
    poly_x_pow(p, low, units) == one
        && unit_primes.iter().all(|&r| poly_x_pow(p, low, units / r) != one)
}

/// Serialized field descriptor: `{p, n, modulus}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FieldDescriptor {
    pub p: u32,
    pub n: u32,
    pub modulus: Vec<u32>,
}

/// One finite field `F_{p^n}`.
#[derive(Debug, Clone)]
pub struct FieldCtx {
    p: u32,
    n: u32,
    order: u32,
    /// `p^i` for `i in 0..=n`.
    digit_weight: Vec<u32>,
    /// Monic modulus, coefficients low degree first, length `n + 1`.
    modulus: Vec<u32>,
    log: Vec<u32>,
    exp: Vec<u32>,
}

/// Builds `F_{p^n}` with the default size cap.
pub fn build_field(p: u32, n: u32) -> Result<FieldCtx> {
    FieldCtx::new(p, n, DEFAULT_FIELD_CAP)
}

impl FieldCtx {
    /// The modulus is the lexicographically smallest monic primitive
    /// polynomial of degree `n` (coefficients compared from the constant term
    /// up), so `x` itself is the primitive element.
    pub fn new(p: u32, n: u32, cap: u64) -> Result<FieldCtx> {
        if !is_prime(p as u64) {
            return Err(Error::NotPrime(p));
        }
        if n == 0 {
            return Err(Error::InvalidParameter("extension degree must be at least 1".into()));
        }
        let order = match checked_pow(p as u64, n) {
            Some(o) if o <= cap && o <= u32::MAX as u64 / 2 => o as u32,
            _ => return Err(Error::FieldTooLarge { p, n, cap }),
        };
        let digit_weight: Vec<u32> = (0..=n).map(|i| p.pow(i)).collect();
        let mut ctx = FieldCtx {
            p,
            n,
            order,
            digit_weight,
            modulus: Vec::new(),
            log: Vec::new(),
            exp: Vec::new(),
        };
        let top = ctx.digit_weight[n as usize - 1];
        let unit_primes = prime_factors(order as u64 - 1);
        // candidate low coefficients (c0, ..., c_{n-1}); c0 is the most
        // significant position of the enumeration counter
        for counter in 0..order {
            let mut low = vec![0u32; n as usize];
            let mut rest = counter;
            for i in 0..n as usize {
                let w = top / ctx.digit_weight[i];
                low[i] = rest / w;
                rest %= w;
            }
            // the norm of x is (-1)^n c0 and must generate F_p^*
            let norm = if n.is_multiple_of(2) { low[0] } else { (p - low[0]) % p };
            if low[0] == 0 || !generates_prime_units(p, norm) {
                continue;
            }
            if !is_primitive_poly(p, &low, &unit_primes) {
                continue;
            }
            if let Some(exp) = ctx.primitive_walk(&low) {
                let mut modulus = low;
                modulus.push(1);
                ctx.modulus = modulus;
                let mut log = vec![NO_LOG; order as usize];
                for (i, &e) in exp.iter().enumerate() {
                    log[e as usize] = i as u32;
                }
                ctx.log = log;
                ctx.exp = exp;
                return Ok(ctx);
            }
        }
        unreachable!("every finite field has a primitive polynomial")
    }

    /// Powers of `x` modulo `x^n + low`, if `x` has order exactly `p^n - 1`.
    /// Order `p^n - 1` makes every nonzero residue a unit, so the polynomial is
    /// irreducible as well.
    fn primitive_walk(&self, low: &[u32]) -> Option<Vec<u32>> {
        let units = self.order as usize - 1;
        let packed_low = self.pack(low);
        let mut exp = Vec::with_capacity(units);
        let mut cur = 1u32;
        for i in 0..units {
            if i > 0 && cur == 1 {
                return None;
            }
            exp.push(cur);
            cur = self.mul_by_x(cur, packed_low);
        }
        (cur == 1).then_some(exp)
    }

    fn mul_by_x(&self, raw: u32, packed_low: u32) -> u32 {
        let hi_w = self.digit_weight[self.n as usize - 1];
        let top = raw / hi_w;
        let shifted = (raw % hi_w) * self.p;
        if top == 0 {
            return shifted;
        }
        // x^n = -low
        self.add_raw(shifted, self.scale_raw(packed_low, self.p - top))
    }

    fn pack(&self, digits: &[u32]) -> u32 {
        digits
            .iter()
            .zip(&self.digit_weight)
            .map(|(d, w)| d * w)
            .sum()
    }

    fn add_raw(&self, a: u32, b: u32) -> u32 {
        if self.p == 2 {
            return a ^ b;
        }
        let (mut a, mut b) = (a, b);
        let mut out = 0;
        for w in &self.digit_weight[..self.n as usize] {
            out += ((a % self.p + b % self.p) % self.p) * w;
            a /= self.p;
            b /= self.p;
        }
        out
    }

    fn scale_raw(&self, a: u32, c: u32) -> u32 {
        let mut a = a;
        let mut out = 0;
        for w in &self.digit_weight[..self.n as usize] {
            out += ((a % self.p) * c % self.p) * w;
            a /= self.p;
        }
        out
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.n
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn descriptor(&self) -> FieldDescriptor {
        FieldDescriptor {
            p: self.p,
            n: self.n,
            modulus: self.modulus.clone(),
        }
    }

    /// The canonical primitive element (the class of `x`, or the root of the
    /// linear modulus when `n = 1`).
    pub fn alpha(&self) -> FieldElement {
        FieldElement(self.exp[1 % self.exp.len()])
    }

    pub fn element(&self, raw: u32) -> Result<FieldElement> {
        if raw >= self.order {
            return Err(Error::InvalidParameter(format!(
                "{raw} is not an element of a field of order {}",
                self.order
            )));
        }
        Ok(FieldElement(raw))
    }

    pub fn from_coeffs(&self, coeffs: &[u32]) -> Result<FieldElement> {
        if coeffs.len() > self.n as usize || coeffs.iter().any(|&c| c >= self.p) {
            return Err(Error::InvalidParameter(format!("bad coefficient vector {coeffs:?}")));
        }
        Ok(FieldElement(self.pack(coeffs)))
    }

    pub fn coeffs(&self, x: FieldElement) -> Vec<u32> {
        let mut r = x.0;
        (0..self.n)
            .map(|_| {
                let d = r % self.p;
                r /= self.p;
                d
            })
            .collect()
    }

    /// The prime-field constant `c mod p`.
    pub fn constant(&self, c: u64) -> FieldElement {
        FieldElement((c % self.p as u64) as u32)
    }

    /// `Some(c)` when `x` lies in the prime field.
    pub fn as_constant(&self, x: FieldElement) -> Option<u32> {
        (x.0 < self.p).then_some(x.0)
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElement> {
        (0..self.order).map(FieldElement)
    }

    /// `alpha^k` for arbitrary `k`.
    pub fn exp(&self, k: u64) -> FieldElement {
        FieldElement(self.exp[(k % (self.order as u64 - 1)) as usize])
    }

    pub fn log(&self, x: FieldElement) -> Option<u32> {
        match self.log[x.0 as usize] {
            NO_LOG => None,
            l => Some(l),
        }
    }

    pub fn add(&self, x: FieldElement, y: FieldElement) -> FieldElement {
        FieldElement(self.add_raw(x.0, y.0))
    }

    pub fn neg(&self, x: FieldElement) -> FieldElement {
        if self.p == 2 {
            return x;
        }
        FieldElement(self.scale_raw(x.0, self.p - 1))
    }

    pub fn sub(&self, x: FieldElement, y: FieldElement) -> FieldElement {
        self.add(x, self.neg(y))
    }

    pub fn mul(&self, x: FieldElement, y: FieldElement) -> FieldElement {
        if x.0 == 0 || y.0 == 0 {
            return FieldElement::ZERO;
        }
        let k = self.log[x.0 as usize] as u64 + self.log[y.0 as usize] as u64;
        self.exp(k)
    }

    pub fn inv(&self, x: FieldElement) -> Result<FieldElement> {
        let l = self.log(x).ok_or(Error::ZeroInverse)?;
        Ok(self.exp((self.order - 1 - l) as u64))
    }

    pub fn div(&self, x: FieldElement, y: FieldElement) -> Result<FieldElement> {
        Ok(self.mul(x, self.inv(y)?))
    }

    pub fn pow(&self, x: FieldElement, e: u64) -> FieldElement {
        if e == 0 {
            return FieldElement::ONE;
        }
        match self.log(x) {
            None => FieldElement::ZERO,
            Some(l) => {
                let m = self.order as u64 - 1;
                self.exp(((l as u64 % m) * (e % m)) % m)
            }
        }
    }

    /// Schoolbook polynomial product reduced by the modulus; independent of
    /// the log tables.
    pub fn mul_schoolbook(&self, x: FieldElement, y: FieldElement) -> FieldElement {
        let n = self.n as usize;
        let p = self.p as u64;
        let (a, b) = (self.coeffs(x), self.coeffs(y));
        let mut prod = vec![0u64; 2 * n];
        for (i, &ai) in a.iter().enumerate() {
            for (j, &bj) in b.iter().enumerate() {
                prod[i + j] = (prod[i + j] + ai as u64 * bj as u64) % p;
            }
        }
        for d in (n..2 * n).rev() {
            let c = prod[d];
            if c == 0 {
                continue;
            }
            prod[d] = 0;
            for (i, &mi) in self.modulus[..n].iter().enumerate() {
                prod[d - n + i] = (prod[d - n + i] + (p - c) * mi as u64) % p;
            }
        }
        let digits: Vec<u32> = prod[..n].iter().map(|&c| c as u32).collect();
        FieldElement(self.pack(&digits))
    }

    /// Trace onto the subfield of order `p^t`: `sum_{i < n/t} x^{p^{t i}}`.
    /// The result is an element of this field lying in that subfield.
    pub fn trace_to(&self, x: FieldElement, t: u32) -> FieldElement {
        assert!(t >= 1 && self.n.is_multiple_of(t), "trace target degree must divide {}", self.n);
        let Some(l) = self.log(x) else {
            return FieldElement::ZERO;
        };
        let m = self.order as u64 - 1;
        let r = (self.p as u64).pow(t) % m.max(1);
        let mut e = l as u64;
        let mut acc = FieldElement::ZERO;
        for _ in 0..self.n / t {
            acc = self.add(acc, self.exp(e));
            e = e * r % m.max(1);
        }
        acc
    }

    /// `Tr_{F_{p^n}/F_p}(x)` as an integer in `0..p`.
    pub fn absolute_trace(&self, x: FieldElement) -> u32 {
        self.trace_to(x, 1).0
    }

    /// Quadratic character `x^{(order-1)/2}` read as `-1`, `0` or `+1`.
    pub fn quadratic_character(&self, x: FieldElement) -> Result<i8> {
        if self.p == 2 {
            return Err(Error::EvenCharacteristic);
        }
        if x.is_zero() {
            return Ok(0);
        }
        let r = self.pow(x, (self.order as u64 - 1) / 2);
        Ok(if r == FieldElement::ONE { 1 } else { -1 })
    }

    /// Smallest exponent `j > 1` with `gcd(j, order - 1) = 1`, giving an
    /// alternate primitive element `alpha^j`. `None` when `alpha` is the only
    /// primitive element up to the identity exponent.
    pub fn alternate_primitive_exponent(&self) -> Option<u64> {
        let m = self.order as u64 - 1;
        (2..m).find(|&j| gcd(j, m) == 1)
    }
}

/// Which extension of the tower an element lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Side {
    M1,
    M2,
}

/// Target subfield of a trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceTarget {
    Q,
    P,
}

/// `F_{q^m}` built directly over `F_p`, with `F_q` embedded as its unique
/// subfield of order `q`.
#[derive(Debug, Clone)]
pub struct Extension {
    m: u32,
    ctx: FieldCtx,
    /// `(q^m - 1) / (q - 1)`: the embedded `F_q^*` is `<alpha^step>`.
    step: u64,
    /// The generator of `F_q` maps to `alpha^(step * root_exp)`.
    root_exp: u64,
    root_exp_inv: u64,
    trace_q: Vec<u32>,
    trace_p: Vec<u32>,
}

impl Extension {
    fn new(fq: &FieldCtx, m: u32, cap: u64) -> Result<Extension> {
        let ctx = FieldCtx::new(fq.p, fq.n * m, cap)?;
        let q = fq.order as u64;
        let step = (ctx.order as u64 - 1) / (q - 1);
        // a root of the F_q modulus inside the subfield fixes the embedding
        let root_exp = (1..q.max(2))
            .filter(|&j| gcd(j, q - 1) == 1)
            .find(|&j| {
                let beta = ctx.exp(step * j);
                let mut acc = FieldElement::ZERO;
                for &c in fq.modulus.iter().rev() {
                    acc = ctx.add(ctx.mul(acc, beta), ctx.constant(c as u64));
                }
                acc.is_zero()
            })
            .expect("the subfield of order q contains the roots of the F_q modulus");
        let root_exp_inv = mod_inverse(root_exp, q - 1).unwrap_or(0);
        let mut ext = Extension {
            m,
            ctx,
            step,
            root_exp,
            root_exp_inv,
            trace_q: Vec::new(),
            trace_p: Vec::new(),
        };
        let s = fq.n;
        let mut trace_q = Vec::with_capacity(ext.ctx.order as usize);
        let mut trace_p = Vec::with_capacity(ext.ctx.order as usize);
        for x in ext.ctx.elements() {
            let t = ext.ctx.trace_to(x, s);
            let tq = ext
                .unembed(fq, t)
                .expect("relative trace lands in the embedded subfield");
            trace_q.push(tq.0);
            trace_p.push(ext.ctx.absolute_trace(x));
        }
        ext.trace_q = trace_q;
        ext.trace_p = trace_p;
        Ok(ext)
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn ctx(&self) -> &FieldCtx {
        &self.ctx
    }

    /// `(q^m - 1)/(q - 1)`.
    pub fn subfield_step(&self) -> u64 {
        self.step
    }

    pub fn embed(&self, fq: &FieldCtx, z: FieldElement) -> FieldElement {
        match fq.log(z) {
            None => FieldElement::ZERO,
            Some(k) => self.ctx.exp(self.step * self.root_exp * k as u64),
        }
    }

    /// Inverse of [`Extension::embed`]; `None` outside the subfield.
    pub fn unembed(&self, fq: &FieldCtx, y: FieldElement) -> Option<FieldElement> {
        let Some(l) = self.ctx.log(y) else {
            return Some(FieldElement::ZERO);
        };
        if !(l as u64).is_multiple_of(self.step) {
            return None;
        }
        let q1 = fq.order as u64 - 1;
        let k = (l as u64 / self.step) % q1.max(1) * self.root_exp_inv % q1.max(1);
        Some(fq.exp(k))
    }

    /// `Tr_{q^m/q}(x)` as an element of `F_q`.
    pub fn trace_q(&self, x: FieldElement) -> FieldElement {
        FieldElement(self.trace_q[x.0 as usize])
    }

    /// `Tr_{q^m/p}(x)` as an integer in `0..p`.
    pub fn trace_p(&self, x: FieldElement) -> u32 {
        self.trace_p[x.0 as usize]
    }
}

/// The tower `F_p ⊂ F_q = F_{p^s} ⊂ F_{q^{m1}}, F_{q^{m2}}`.
#[derive(Debug, Clone)]
pub struct TowerCtx {
    s: u32,
    fq: FieldCtx,
    ext1: Extension,
    ext2: Extension,
}

impl TowerCtx {
    pub fn new(p: u32, s: u32, m1: u32, m2: u32) -> Result<TowerCtx> {
        TowerCtx::with_cap(p, s, m1, m2, DEFAULT_FIELD_CAP)
    }

    pub fn with_cap(p: u32, s: u32, m1: u32, m2: u32, cap: u64) -> Result<TowerCtx> {
        if s == 0 || m1 == 0 || m2 == 0 {
            return Err(Error::InvalidParameter("s, m1 and m2 must be positive".into()));
        }
        let fq = FieldCtx::new(p, s, cap)?;
        let ext1 = Extension::new(&fq, m1, cap)?;
        let ext2 = Extension::new(&fq, m2, cap)?;
        Ok(TowerCtx { s, fq, ext1, ext2 })
    }

    pub fn p(&self) -> u32 {
        self.fq.p
    }

    pub fn s(&self) -> u32 {
        self.s
    }

    pub fn q(&self) -> u32 {
        self.fq.order
    }

    pub fn m(&self, side: Side) -> u32 {
        self.ext(side).m
    }

    pub fn m1(&self) -> u32 {
        self.ext1.m
    }

    pub fn m2(&self) -> u32 {
        self.ext2.m
    }

    pub fn fq(&self) -> &FieldCtx {
        &self.fq
    }

    pub fn ext(&self, side: Side) -> &Extension {
        match side {
            Side::M1 => &self.ext1,
            Side::M2 => &self.ext2,
        }
    }

    pub fn field(&self, side: Side) -> &FieldCtx {
        &self.ext(side).ctx
    }

    /// Trace of `x` onto `F_q` or `F_p`, returned as an element of the
    /// extension itself (lying in the embedded target subfield).
    pub fn trace(&self, side: Side, target: TraceTarget, x: FieldElement) -> FieldElement {
        let ext = self.ext(side);
        match target {
            TraceTarget::Q => ext.embed(&self.fq, ext.trace_q(x)),
            TraceTarget::P => ext.ctx.constant(ext.trace_p(x) as u64),
        }
    }

    pub fn trace_to_q(&self, side: Side, x: FieldElement) -> FieldElement {
        self.ext(side).trace_q(x)
    }

    pub fn trace_to_p(&self, side: Side, x: FieldElement) -> u32 {
        self.ext(side).trace_p(x)
    }

    pub fn embed(&self, side: Side, z: FieldElement) -> FieldElement {
        self.ext(side).embed(&self.fq, z)
    }

    pub fn unembed(&self, side: Side, y: FieldElement) -> Option<FieldElement> {
        self.ext(side).unembed(&self.fq, y)
    }

    /// The embedded copy of `F_q`, ordered by the `F_q` element it images.
    pub fn subfield_elements(&self, side: Side) -> Vec<FieldElement> {
        self.fq.elements().map(|z| self.embed(side, z)).collect()
    }

    /// The embedded `F_q^*`.
    pub fn subfield_units(&self, side: Side) -> Vec<FieldElement> {
        self.fq
            .elements()
            .skip(1)
            .map(|z| self.embed(side, z))
            .collect()
    }

    pub fn descriptors(&self) -> Vec<FieldDescriptor> {
        vec![
            self.fq.descriptor(),
            self.ext1.ctx.descriptor(),
            self.ext2.ctx.descriptor(),
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn prime_fields() {
        let f2 = build_field(2, 1).unwrap();
        assert_eq!(f2.alpha(), FieldElement::ONE);
        assert_eq!(f2.modulus(), &[1, 1]);
        let f3 = build_field(3, 1).unwrap();
        assert_eq!(f3.quadratic_character(f3.constant(2)).unwrap(), -1);
        assert_eq!(f3.quadratic_character(FieldElement::ZERO).unwrap(), 0);
    }

    #[test]
    fn f4_modulus_and_alpha() {
        let f4 = build_field(2, 2).unwrap();
        assert_eq!(f4.modulus(), &[1, 1, 1]);
        let a = f4.alpha();
        assert_eq!(a.raw(), 2);
        assert_eq!(f4.mul(a, f4.pow(a, 2)), FieldElement::ONE);
    }

    #[test]
    fn f9_primitive_order_exact() {
        let f9 = build_field(3, 2).unwrap();
        let a = f9.alpha();
        assert_eq!(f9.pow(a, 8), FieldElement::ONE);
        let mut x = FieldElement::ONE;
        for k in 1..8 {
            x = f9.mul_schoolbook(x, a);
            assert_ne!(x, FieldElement::ONE, "alpha^{k} = 1");
        }
        let minus_one = f9.neg(FieldElement::ONE);
        assert_eq!(f9.mul(minus_one, minus_one), FieldElement::ONE);
        assert_eq!(f9.mul(f9.exp(3), f9.exp(7)), f9.exp(2));
        assert_eq!(f9.mul_schoolbook(f9.exp(3), f9.exp(7)), f9.exp(2));
    }

    #[test]
    fn errors() {
        assert_eq!(build_field(4, 1).unwrap_err(), Error::NotPrime(4));
        assert!(matches!(build_field(2, 23), Err(Error::FieldTooLarge { .. })));
        let f9 = build_field(3, 2).unwrap();
        assert_eq!(f9.inv(FieldElement::ZERO).unwrap_err(), Error::ZeroInverse);
        let f4 = build_field(2, 2).unwrap();
        assert_eq!(f4.quadratic_character(FieldElement::ONE), Err(Error::EvenCharacteristic));
    }

    #[test]
    fn log_tables_consistent() {
        for (p, n) in [(2, 1), (2, 4), (3, 3), (5, 2), (7, 2), (2, 8)] {
            let f = build_field(p, n).unwrap();
            for x in f.elements().skip(1) {
                assert_eq!(f.exp(f.log(x).unwrap() as u64), x);
            }
        }
    }

    fn axioms_exhaustive(f: &FieldCtx) {
        let els: Vec<_> = f.elements().collect();
        for &x in &els {
            for &y in &els {
                assert_eq!(f.mul(x, y), f.mul_schoolbook(x, y));
                assert_eq!(f.add(x, y), f.add(y, x));
                for &z in &els {
                    assert_eq!(f.mul(f.mul(x, y), z), f.mul(x, f.mul(y, z)));
                    assert_eq!(f.add(f.add(x, y), z), f.add(x, f.add(y, z)));
                    assert_eq!(f.mul(x, f.add(y, z)), f.add(f.mul(x, y), f.mul(x, z)));
                }
            }
            assert_eq!(f.add(x, f.neg(x)), FieldElement::ZERO);
            if !x.is_zero() {
                assert_eq!(f.mul(x, f.inv(x).unwrap()), FieldElement::ONE);
            }
        }
    }

    #[test]
    fn field_axioms_small_fields() {
        for (p, n) in [(2, 1), (2, 2), (2, 3), (3, 1), (3, 2), (2, 6), (5, 1), (7, 2), (5, 2)] {
            axioms_exhaustive(&build_field(p, n).unwrap());
        }
    }

    fn cached(p: u32, n: u32) -> &'static FieldCtx {
        use std::sync::OnceLock;
        static F3_10: OnceLock<FieldCtx> = OnceLock::new();
        static F7_5: OnceLock<FieldCtx> = OnceLock::new();
        let cell = if p == 3 { &F3_10 } else { &F7_5 };
        cell.get_or_init(|| build_field(p, n).unwrap())
    }

    proptest! {
        #[test]
        fn field_axioms_random(a in 0u32..59049, b in 0u32..59049, c in 0u32..59049) {
            let f = cached(3, 10);
            let (x, y, z) = (FieldElement(a), FieldElement(b), FieldElement(c));
            prop_assert_eq!(f.mul(x, y), f.mul_schoolbook(x, y));
            prop_assert_eq!(f.mul(x, f.add(y, z)), f.add(f.mul(x, y), f.mul(x, z)));
            prop_assert_eq!(f.mul(f.mul(x, y), z), f.mul(x, f.mul(y, z)));
        }

        #[test]
        fn quadratic_character_multiplicative(a in 1u32..16807, b in 1u32..16807) {
            let f = cached(7, 5);
            let (x, y) = (FieldElement(a), FieldElement(b));
            prop_assert_eq!(
                f.quadratic_character(f.mul(x, y)).unwrap(),
                f.quadratic_character(x).unwrap() * f.quadratic_character(y).unwrap()
            );
        }
    }

    #[test]
    fn field_axioms_randomized_large() {
        let f = build_field(2, 16).unwrap();
        let mut state = 0x9e37_79b9u32;
        let mut next = || {
            state ^= state << 13;
            state ^= state >> 17;
            state ^= state << 5;
            FieldElement(state % f.order())
        };
        for _ in 0..10_000 {
            let (x, y, z) = (next(), next(), next());
            assert_eq!(f.mul(x, y), f.mul_schoolbook(x, y));
            assert_eq!(f.mul(x, f.add(y, z)), f.add(f.mul(x, y), f.mul(x, z)));
        }
    }

    #[test]
    fn f4_trace() {
        let t = TowerCtx::new(2, 1, 2, 2).unwrap();
        let f4 = t.field(Side::M1);
        let a = f4.alpha();
        assert_eq!(f4.add(a, f4.pow(a, 2)), FieldElement::ONE);
        assert_eq!(t.trace(Side::M1, TraceTarget::Q, a), FieldElement::ONE);
        assert_eq!(t.trace(Side::M1, TraceTarget::Q, FieldElement::ZERO), FieldElement::ZERO);
    }

    #[test]
    fn f9_trace_kernel() {
        let t = TowerCtx::new(3, 1, 2, 2).unwrap();
        let f9 = t.field(Side::M1);
        let mut zeros = 0;
        for x in f9.elements() {
            let direct = f9.add(x, f9.pow(x, 3));
            assert_eq!(t.trace(Side::M1, TraceTarget::Q, x), direct);
            zeros += usize::from(direct.is_zero());
        }
        assert_eq!(zeros, 3);
    }

    #[test]
    fn subfield_examples() {
        let t = TowerCtx::new(2, 1, 3, 4).unwrap();
        assert_eq!(t.subfield_elements(Side::M2), vec![FieldElement::ZERO, FieldElement::ONE]);
        let t = TowerCtx::new(3, 1, 2, 2).unwrap();
        let els: Vec<u32> = t.subfield_elements(Side::M1).iter().map(|e| e.raw()).collect();
        assert_eq!(els, vec![0, 1, 2]);

        let t = TowerCtx::new(2, 2, 2, 3).unwrap();
        let f16 = t.field(Side::M1);
        let mut sub = t.subfield_elements(Side::M1);
        sub.sort();
        let mut expected: Vec<_> = (0..3).map(|k| f16.exp(5 * k)).collect();
        expected.push(FieldElement::ZERO);
        expected.sort();
        assert_eq!(sub, expected);
        for &x in &sub {
            for &y in &sub {
                assert!(sub.contains(&f16.add(x, y)));
            }
        }
    }

    fn tower_properties(t: &TowerCtx) {
        let fq = t.fq();
        for side in [Side::M1, Side::M2] {
            let f = t.field(side);
            let m = t.m(side);
            // embedding is a field homomorphism
            for a in fq.elements() {
                for b in fq.elements() {
                    assert_eq!(t.embed(side, fq.add(a, b)), f.add(t.embed(side, a), t.embed(side, b)));
                    assert_eq!(t.embed(side, fq.mul(a, b)), f.mul(t.embed(side, a), t.embed(side, b)));
                }
                assert_eq!(t.unembed(side, t.embed(side, a)), Some(a));
            }
            // image is {0} ∪ <alpha^step>
            let step = t.ext(side).subfield_step();
            let mut image = t.subfield_elements(side);
            image.sort();
            let mut expected: Vec<_> = (0..fq.order() as u64 - 1).map(|k| f.exp(step * k)).collect();
            expected.push(FieldElement::ZERO);
            expected.sort();
            assert_eq!(image, expected);

            let mut kernel = 0u64;
            for x in f.elements() {
                let tq = t.trace_to_q(side, x);
                kernel += u64::from(tq.is_zero());
                // transitivity Tr_p = Tr^q_p ∘ Tr^{q^m}_q
                assert_eq!(t.trace_to_p(side, x), fq.absolute_trace(tq));
                assert_eq!(f.as_constant(t.trace(side, TraceTarget::P, x)), Some(t.trace_to_p(side, x)));
            }
            assert_eq!(kernel, (fq.order() as u64).pow(m - 1));

            // F_q-linearity, exhaustive over lambda and x, fixed sample of y
            if f.order() <= 10_000 {
                let ys: Vec<_> = f.elements().step_by(7).take(8).collect();
                for lam in fq.elements() {
                    let lam_e = t.embed(side, lam);
                    for x in f.elements() {
                        for &y in &ys {
                            let lhs = t.trace_to_q(side, f.add(f.mul(lam_e, x), y));
                            let rhs = fq.add(fq.mul(lam, t.trace_to_q(side, x)), t.trace_to_q(side, y));
                            assert_eq!(lhs, rhs);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn tower_invariants() {
        for (p, s, m1, m2) in [(2, 1, 2, 3), (3, 1, 2, 4), (2, 2, 2, 3), (3, 2, 2, 3), (5, 1, 3, 2), (7, 1, 2, 2), (5, 2, 2, 2)] {
            tower_properties(&TowerCtx::new(p, s, m1, m2).unwrap());
        }
    }

    #[test]
    fn quadratic_character_on_subfield() {
        // m even: every element of F_q^* is a square in F_{q^m}
        let t = TowerCtx::new(3, 1, 2, 3).unwrap();
        let f9 = t.field(Side::M1);
        for z in t.subfield_units(Side::M1) {
            assert_eq!(f9.quadratic_character(z).unwrap(), 1);
        }
        // m odd: restriction agrees with the quadratic character of F_q
        let f27 = t.field(Side::M2);
        for z in t.fq().elements().skip(1) {
            assert_eq!(
                f27.quadratic_character(t.embed(Side::M2, z)).unwrap(),
                t.fq().quadratic_character(z).unwrap()
            );
        }
    }

    #[test]
    fn modulus_is_lexicographically_smallest_primitive() {
        // F_8: x^3 + x^2 + 1 (low coefficients 1,0,1) precedes x^3 + x + 1 (1,1,0)
        assert_eq!(build_field(2, 3).unwrap().modulus(), &[1, 0, 1, 1]);
        // F_9: every quadratic with c0 = 1 is reducible or imprimitive
        let f9 = build_field(3, 2).unwrap();
        assert_eq!(f9.modulus(), &[2, 1, 1]);
    }
}
