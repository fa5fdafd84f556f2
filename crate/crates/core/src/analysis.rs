//! Derived claims about a code: Griesmer classification, projectivity,
//! minimality of codewords and the strongly regular graph of a projective
//! two-weight code.

use std::collections::HashSet;

use rayon::prelude::*;
use serde::Serialize;

use crate::codes::{codeword, generator_matrix, CodeSpec, Matrix, WeightDistribution};
use crate::error::{Error, Result};
use crate::gf::{FieldElement, Side, TowerCtx};

/// Default limit on `q^k` for [`exact_minimality`].
pub const MINIMALITY_CAP: u64 = 1 << 12;
/// Default limit on the vertex count of [`build_srg_graph`].
pub const GRAPH_CAP: u64 = 1 << 14;

/// `Σ_{i<k} ⌈d / q^i⌉`.
pub fn griesmer_sum(k: u32, d: u64, q: u64) -> u64 {
    let mut sum = 0u64;
    let mut qi = 1u64;
    for i in 0..k {
        if qi >= d {
            // every remaining ceiling is 1
            return sum + u64::from(k - i);
        }
        sum += d.div_ceil(qi);
        qi = qi.saturating_mul(q);
    }
    sum
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GriesmerVerdict {
    Griesmer,
    NearGriesmer,
    Neither,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GriesmerClassification {
    pub griesmer_sum_d: u64,
    pub griesmer_sum_d_plus_1: u64,
    pub verdict: GriesmerVerdict,
    /// No `[n, k, d+1]` code exists because its Griesmer sum exceeds `n`. A
    /// false value does not disprove optimality.
    pub distance_optimal_proved: bool,
}

pub fn classify_griesmer(n: u64, k: u32, d: u64, q: u64) -> GriesmerClassification {
    let sum_d = griesmer_sum(k, d, q);
    let sum_next = griesmer_sum(k, d + 1, q);
    let verdict = if n == sum_d {
        GriesmerVerdict::Griesmer
    } else if n == sum_d + 1 {
        GriesmerVerdict::NearGriesmer
    } else {
        GriesmerVerdict::Neither
    };
    GriesmerClassification {
        griesmer_sum_d: sum_d,
        griesmer_sum_d_plus_1: sum_next,
        verdict,
        distance_optimal_proved: sum_next > n,
    }
}

/// Scales a nonzero vector so its first nonzero entry is `1`.
fn normalize(tower: &TowerCtx, v: &[FieldElement]) -> Option<Vec<FieldElement>> {
    let fq = tower.fq();
    let lead = *v.iter().find(|e| !e.is_zero())?;
    let inv = fq.inv(lead).expect("lead is nonzero");
    Some(v.iter().map(|&e| fq.mul(inv, e)).collect())
}

/// No zero column and no two `F_q`-proportional columns.
pub fn matrix_is_projective(tower: &TowerCtx, g: &Matrix) -> bool {
    let mut seen = HashSet::with_capacity(g.cols);
    (0..g.cols).all(|c| match normalize(tower, &g.column(c)) {
        None => false,
        Some(col) => seen.insert(col),
    })
}

pub fn projectivity_check(spec: &CodeSpec) -> bool {
    matrix_is_projective(spec.tower(), &generator_matrix(spec))
}

/// The Ashikhmin–Barg sufficient condition `w_min / w_max > (q-1)/q`,
/// evaluated as `q·w_min > (q-1)·w_max`.
pub fn ab_minimality(wd: &WeightDistribution, q: u64) -> bool {
    match (wd.w_min(), wd.w_max()) {
        (Some(lo), Some(hi)) => q as u128 * lo as u128 > (q as u128 - 1) * hi as u128,
        _ => false,
    }
}

/// Every nonzero codeword is minimal: its support contains the support of no
/// codeword other than its own scalar multiples.
pub fn exact_minimality(spec: &CodeSpec) -> Result<bool> {
    exact_minimality_with_cap(spec, MINIMALITY_CAP)
}

pub fn exact_minimality_with_cap(spec: &CodeSpec, cap: u64) -> Result<bool> {
    let size = spec.message_count();
    if size > cap {
        return Err(Error::CapExceeded { size, cap });
    }
    if spec.claimed_k() == 0 {
        return Err(Error::InvalidParameter("zero-dimensional code".into()));
    }
    let t = spec.tower();
    let (f1, f2) = (t.field(Side::M1), t.field(Side::M2));
    // one representative per projective point: coordinates normalized to a
    // leading 1
    let mut reps: HashSet<Vec<FieldElement>> = HashSet::new();
    for a in f1.elements() {
        for b in f2.elements() {
            if let Some(c) = normalize(t, &codeword(spec, a, b).coords) {
                reps.insert(c);
            }
        }
    }
    let mut reps: Vec<Vec<FieldElement>> = reps.into_iter().collect();
    reps.sort();
    let words = spec.n().div_ceil(64);
    let supports: Vec<Vec<u64>> = reps
        .iter()
        .map(|c| {
            let mut bits = vec![0u64; words];
            for (i, e) in c.iter().enumerate() {
                if !e.is_zero() {
                    bits[i / 64] |= 1 << (i % 64);
                }
            }
            bits
        })
        .collect();
    let supports = &supports;
    let minimal = (0..supports.len()).into_par_iter().all(|i| {
        let outer = &supports[i];
        (0..supports.len())
            .all(|j| j == i || !supports[j].iter().zip(outer).all(|(inner, o)| inner & !o == 0))
    });
    Ok(minimal)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SrgParams {
    #[serde(rename = "N")]
    pub n: u64,
    #[serde(rename = "K")]
    pub k: u64,
    pub lambda: u64,
    pub mu: u64,
}

impl SrgParams {
    /// `K(K - λ - 1) = (N - K - 1) μ`.
    pub fn is_feasible(&self) -> bool {
        let (n, k, l, m) = (self.n as i128, self.k as i128, self.lambda as i128, self.mu as i128);
        k * (k - l - 1) == (n - k - 1) * m
    }
}

/// Parameters of `G(Ω)` predicted from the two nonzero weights of a projective
/// code: `N = q^k`, `K = (q-1)n` and `λ`, `μ` quadratic in `w1`, `w2`.
pub fn srg_params_from_code(wd: &WeightDistribution, q: u64, projective: bool) -> Result<SrgParams> {
    let weights = wd.nonzero_weights();
    if weights.len() != 2 {
        return Err(Error::NotTwoWeight(weights.len()));
    }
    if !projective {
        return Err(Error::NotProjective);
    }
    let q = q as i128;
    let (w1, w2) = (weights[0] as i128, weights[1] as i128);
    let k = (q - 1) * wd.n as i128;
    let big_n = q.checked_pow(wd.k).ok_or_else(|| Error::InvalidParameter("q^k overflows".into()))?;
    let lambda = k * k + 3 * k - q * (w1 + w2) - k * q * (w1 + w2) + q * q * w1 * w2;
    let mu = k * k + k - k * q * (w1 + w2) + q * q * w1 * w2;
    let conv = |v: i128, what: &str| {
        u64::try_from(v).map_err(|_| Error::Mismatch(format!("{what} = {v} is not a valid parameter")))
    };
    Ok(SrgParams { n: conv(big_n, "N")?, k: conv(k, "K")?, lambda: conv(lambda, "lambda")?, mu: conv(mu, "mu")? })
}

/// A simple undirected graph with bitset adjacency rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    words: usize,
    adj: Vec<u64>,
}

impl Graph {
    pub fn empty(n: usize) -> Graph {
        let words = n.div_ceil(64).max(1);
        Graph { n, words, adj: vec![0; n * words] }
    }

    /// Builds a graph from an edge list; self-loops are rejected.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Graph> {
        let mut g = Graph::empty(n);
        for &(u, v) in edges {
            if u >= n || v >= n || u == v {
                return Err(Error::InvalidParameter(format!("bad edge ({u}, {v})")));
            }
            g.set(u, v);
            g.set(v, u);
        }
        Ok(g)
    }

    fn set(&mut self, u: usize, v: usize) {
        self.adj[u * self.words + v / 64] |= 1 << (v % 64);
    }

    fn row(&self, u: usize) -> &[u64] {
        &self.adj[u * self.words..(u + 1) * self.words]
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.row(u)[v / 64] >> (v % 64) & 1 == 1
    }

    pub fn degree(&self, u: usize) -> usize {
        self.row(u).iter().map(|w| w.count_ones() as usize).sum()
    }

    fn common_neighbours(&self, u: usize, v: usize) -> u64 {
        self.row(u).iter().zip(self.row(v)).map(|(a, b)| (a & b).count_ones() as u64).sum()
    }

    /// Edges as `(u, v)` with `u < v`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.n)
            .flat_map(|u| ((u + 1)..self.n).filter(move |&v| self.has_edge(u, v)).map(move |v| (u, v)))
            .collect()
    }

    /// One `u v` line per edge, `u < v`.
    pub fn to_edge_list(&self) -> String {
        self.edges().into_iter().map(|(u, v)| format!("{u} {v}\n")).collect()
    }

    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        let mut seen = vec![false; self.n];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = stack.pop() {
            for v in 0..self.n {
                if !seen[v] && self.has_edge(u, v) {
                    seen[v] = true;
                    count += 1;
                    stack.push(v);
                }
            }
        }
        count == self.n
    }
}

/// The Cayley graph on `F_q^k` whose connection set `Ω` is the set of
/// nonzero scalar multiples of the generator columns. Vertex `v` encodes the
/// vector `(v_0, ..., v_{k-1})` as `Σ v_i q^i`, with `v_i` the packed `F_q`
/// value.
pub fn build_srg_graph(spec: &CodeSpec) -> Result<Graph> {
    build_srg_graph_with_cap(spec, GRAPH_CAP)
}

pub fn build_srg_graph_with_cap(spec: &CodeSpec, cap: u64) -> Result<Graph> {
    let t = spec.tower();
    let fq = t.fq();
    let q = t.q() as usize;
    let g = generator_matrix(spec);
    let k = g.rows;
    let size = (q as u64).checked_pow(k as u32).unwrap_or(u64::MAX);
    if size > cap {
        return Err(Error::CapExceeded { size, cap });
    }
    let n = size as usize;
    let encode = |v: &[FieldElement]| v.iter().rev().fold(0usize, |acc, e| acc * q + e.raw() as usize);
    let mut omega: Vec<usize> = Vec::new();
    for c in 0..g.cols {
        let col = g.column(c);
        for z in fq.elements().skip(1) {
            let scaled: Vec<FieldElement> = col.iter().map(|&e| fq.mul(z, e)).collect();
            omega.push(encode(&scaled));
        }
    }
    omega.sort_unstable();
    omega.dedup();
    omega.retain(|&w| w != 0);
    let add: Vec<usize> = (0..q * q)
        .map(|i| fq.add(FieldElement::from_raw((i / q) as u32), FieldElement::from_raw((i % q) as u32)).raw() as usize)
        .collect();
    let add_vec = |u: usize, w: usize| {
        let (mut u, mut w, mut out, mut scale) = (u, w, 0usize, 1usize);
        for _ in 0..k {
            out += add[(u % q) * q + w % q] * scale;
            u /= q;
            w /= q;
            scale *= q;
        }
        out
    };
    let words = n.div_ceil(64).max(1);
    let rows: Vec<Vec<u64>> = (0..n)
        .into_par_iter()
        .map(|u| {
            let mut row = vec![0u64; words];
            for &w in &omega {
                let v = add_vec(u, w);
                row[v / 64] |= 1 << (v % 64);
            }
            row
        })
        .collect();
    Ok(Graph { n, words, adj: rows.concat() })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SrgOutcome {
    Regular(SrgParams),
    /// Complete graph: no non-adjacent pairs, so `μ` is undefined.
    Degenerate { n: u64, k: u64, lambda: Option<u64> },
}

/// Measures `(N, K, λ, μ)` by counting common neighbours over all pairs.
pub fn srg_verify(g: &Graph) -> Result<SrgOutcome> {
    let n = g.vertex_count();
    if n == 0 {
        return Err(Error::InvalidParameter("empty graph".into()));
    }
    let k = g.degree(0);
    if (1..n).any(|u| g.degree(u) != k) {
        return Err(Error::Irregular);
    }
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    // per vertex: (adjacent counts, non-adjacent counts) as sets of at most
    // two distinct values each
    let merge = |mut a: (HashSet<u64>, HashSet<u64>), b: (HashSet<u64>, HashSet<u64>)| {
        a.0.extend(b.0);
        a.1.extend(b.1);
        a
    };
    let (adjacent, non_adjacent) = (0..n)
        .into_par_iter()
        .fold(
            || (HashSet::new(), HashSet::new()),
            |mut acc, u| {
                for v in (u + 1)..n {
                    let c = g.common_neighbours(u, v);
                    if g.has_edge(u, v) {
                        acc.0.insert(c);
                    } else {
                        acc.1.insert(c);
                    }
                }
                acc
            },
        )
        .reduce(|| (HashSet::new(), HashSet::new()), merge);
    if adjacent.len() > 1 {
        return Err(Error::NotStronglyRegular("adjacent"));
    }
    if non_adjacent.len() > 1 {
        return Err(Error::NotStronglyRegular("non-adjacent"));
    }
    let lambda = adjacent.into_iter().next();
    match non_adjacent.into_iter().next() {
        None => Ok(SrgOutcome::Degenerate { n: n as u64, k: k as u64, lambda }),
        Some(mu) => Ok(SrgOutcome::Regular(SrgParams { n: n as u64, k: k as u64, lambda: lambda.unwrap_or(0), mu })),
    }
}
