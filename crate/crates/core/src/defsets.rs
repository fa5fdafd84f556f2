//! Defining sets `S ⊂ F_{q^{m1}}^*` and the `F_q^*`-invariant families
//! `D1, D2, D3` (plus their variants with `0` adjoined) in `F_{q^{m2}}`.

use serde::Serialize;

use crate::charsum::gauss_sum_formula;
use crate::error::{Error, Result};
use crate::gf::{FieldElement, Side, TowerCtx};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum DefiningSetKind {
    S,
    D1,
    D2,
    D3,
    D1Tilde,
    D2Tilde,
    D3Tilde,
}

impl DefiningSetKind {
    pub const FAMILIES: [DefiningSetKind; 6] = [
        DefiningSetKind::D1,
        DefiningSetKind::D1Tilde,
        DefiningSetKind::D2,
        DefiningSetKind::D2Tilde,
        DefiningSetKind::D3,
        DefiningSetKind::D3Tilde,
    ];

    pub fn is_tilde(self) -> bool {
        matches!(self, Self::D1Tilde | Self::D2Tilde | Self::D3Tilde)
    }

    /// The kind without `0` adjoined.
    pub fn base(self) -> DefiningSetKind {
        match self {
            Self::D1Tilde => Self::D1,
            Self::D2Tilde => Self::D2,
            Self::D3Tilde => Self::D3,
            k => k,
        }
    }

    pub fn with_tilde(self, tilde: bool) -> DefiningSetKind {
        match (self.base(), tilde) {
            (Self::D1, true) => Self::D1Tilde,
            (Self::D2, true) => Self::D2Tilde,
            (Self::D3, true) => Self::D3Tilde,
            (k, _) => k,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::S => "S",
            Self::D1 => "D1",
            Self::D2 => "D2",
            Self::D3 => "D3",
            Self::D1Tilde => "D1_tilde",
            Self::D2Tilde => "D2_tilde",
            Self::D3Tilde => "D3_tilde",
        }
    }

    pub fn parse(s: &str) -> Option<DefiningSetKind> {
        let k = match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "d1" => Self::D1,
            "d2" => Self::D2,
            "d3" => Self::D3,
            "d1_tilde" | "d1t" => Self::D1Tilde,
            "d2_tilde" | "d2t" => Self::D2Tilde,
            "d3_tilde" | "d3t" => Self::D3Tilde,
            _ => return None,
        };
        Some(k)
    }
}

/// An explicit subset of one extension of the tower.
#[derive(Debug, Clone)]
pub struct DefiningSet {
    kind: Option<DefiningSetKind>,
    side: Side,
    elements: Vec<FieldElement>,
    contains_zero: bool,
    /// One element per `F_q^*`-orbit of the nonzero members; present iff the
    /// set is `F_q^*`-invariant.
    orbit_reps: Option<Vec<FieldElement>>,
}

impl DefiningSet {
    fn finish(tower: &TowerCtx, kind: Option<DefiningSetKind>, side: Side, elements: Vec<FieldElement>) -> DefiningSet {
        let contains_zero = elements.iter().any(|e| e.is_zero());
        let mut set = DefiningSet { kind, side, elements, contains_zero, orbit_reps: None };
        if check_fq_invariance(tower, &set) {
            let f = tower.field(side);
            let step = tower.ext(side).subfield_step();
            let mut reps: Vec<FieldElement> = set
                .elements
                .iter()
                .copied()
                .filter(|&y| f.log(y).is_some_and(|l| (l as u64) < step))
                .collect();
            reps.sort_by_key(|&y| f.log(y));
            reps.dedup();
            set.orbit_reps = Some(reps);
        }
        set
    }

    /// An arbitrary element list, kept in the given order (duplicates
    /// included). Invariance is computed, not assumed.
    pub fn custom(tower: &TowerCtx, side: Side, elements: Vec<FieldElement>) -> DefiningSet {
        DefiningSet::finish(tower, None, side, elements)
    }

    pub fn kind(&self) -> Option<DefiningSetKind> {
        self.kind
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn elements(&self) -> &[FieldElement] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains_zero(&self) -> bool {
        self.contains_zero
    }

    pub fn is_fq_invariant(&self) -> bool {
        self.orbit_reps.is_some()
    }

    pub fn orbit_representatives(&self) -> Option<&[FieldElement]> {
        self.orbit_reps.as_deref()
    }

    /// Discrete logs of the nonzero members, in set order.
    pub fn log_indices(&self, tower: &TowerCtx) -> Vec<u32> {
        let f = tower.field(self.side);
        self.elements.iter().filter_map(|&e| f.log(e)).collect()
    }
}

/// `S = {α^i : 1 ≤ i ≤ (q^{m1}-1)/(q-1)}` for the canonical primitive `α`.
pub fn build_s(tower: &TowerCtx) -> DefiningSet {
    build_s_with_exponent(tower, 1)
}

/// `S` built from the primitive element `α^j`; `j` must be coprime to
/// `q^{m1} - 1`.
pub fn build_s_with_exponent(tower: &TowerCtx, j: u64) -> DefiningSet {
    let f = tower.field(Side::M1);
    let size = tower.ext(Side::M1).subfield_step();
    let elements = (1..=size).map(|i| f.exp(i * j)).collect();
    DefiningSet::finish(tower, Some(DefiningSetKind::S), Side::M1, elements)
}

/// `D1 = F^*`, `D2 = {y ≠ 0 : Tr(y) ≠ 0}`, `D3 = {y ≠ 0 : Tr(y^2) = 0}` in
/// `F_{q^{m2}}` (traces to `F_q`), with `0` appended for the tilde kinds.
pub fn build_d(tower: &TowerCtx, kind: DefiningSetKind) -> Result<DefiningSet> {
    let m2 = tower.m2();
    match kind.base() {
        DefiningSetKind::S => {
            return Err(Error::InvalidParameter("build_d takes a D-kind".into()));
        }
        DefiningSetKind::D2 if m2 < 2 => {
            return Err(Error::FamilyConstraint("D2 requires m2 >= 2".into()));
        }
        DefiningSetKind::D3 if tower.p() == 2 => {
            return Err(Error::FamilyConstraint("D3 requires odd q".into()));
        }
        DefiningSetKind::D3 if m2 < 2 => {
            return Err(Error::FamilyConstraint("D3 requires m2 >= 2".into()));
        }
        _ => {}
    }
    let f = tower.field(Side::M2);
    let units = f.order() as u64 - 1;
    let mut elements: Vec<FieldElement> = (0..units)
        .map(|k| f.exp(k))
        .filter(|&y| match kind.base() {
            DefiningSetKind::D1 => true,
            DefiningSetKind::D2 => !tower.trace_to_q(Side::M2, y).is_zero(),
            _ => tower.trace_to_q(Side::M2, f.mul(y, y)).is_zero(),
        })
        .collect();
    if kind.is_tilde() {
        elements.push(FieldElement::ZERO);
    }
    let set = DefiningSet::finish(tower, Some(kind), Side::M2, elements);
    debug_assert!(set.is_fq_invariant());
    Ok(set)
}

/// `z D = D` for every `z` in the embedded `F_q^*`.
pub fn check_fq_invariance(tower: &TowerCtx, d: &DefiningSet) -> bool {
    let f = tower.field(d.side);
    let mut member = vec![false; f.order() as usize];
    for &y in &d.elements {
        member[y.raw() as usize] = true;
    }
    tower
        .subfield_units(d.side)
        .into_iter()
        .all(|z| d.elements.iter().all(|&y| member[f.mul(z, y).raw() as usize]))
}

/// The `q - 1` scalar multiples of `S` are pairwise disjoint and cover
/// `F_{q^{m1}}^*`.
pub fn s_cosets_partition(tower: &TowerCtx, s: &DefiningSet) -> bool {
    let f = tower.field(Side::M1);
    let mut hits = vec![0u32; f.order() as usize];
    for z in tower.subfield_units(Side::M1) {
        for &x in s.elements() {
            hits[f.mul(z, x).raw() as usize] += 1;
        }
    }
    hits[0] == 0 && hits[1..].iter().all(|&h| h == 1)
}

/// Closed-form size of a defining set.
pub fn expected_size(tower: &TowerCtx, kind: DefiningSetKind) -> Result<i64> {
    let q = tower.q() as i64;
    let (m1, m2) = (tower.m1(), tower.m2());
    let tilde = i64::from(kind.is_tilde());
    let base = match kind.base() {
        DefiningSetKind::S => return Ok((q.pow(m1) - 1) / (q - 1)),
        DefiningSetKind::D1 => q.pow(m2) - 1,
        DefiningSetKind::D2 => (q - 1) * q.pow(m2 - 1),
        _ => {
            if m2 % 2 == 0 {
                let g = gauss_sum_formula(tower.p(), tower.s(), m2)?
                    .as_rational()
                    .ok_or_else(|| Error::Mismatch("G_m2 is not rational for even m2".into()))?;
                q.pow(m2 - 1) - 1 + (q - 1) * g / q
            } else {
                q.pow(m2 - 1) - 1
            }
        }
    };
    Ok(base + tilde)
}
