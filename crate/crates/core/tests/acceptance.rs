//! Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
//! criterion fails.

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::Instant;

use fwcodes::analysis::{
    ab_minimality, build_srg_graph, classify_griesmer, exact_minimality, matrix_is_projective, projectivity_check,
    srg_params_from_code, srg_verify, GriesmerVerdict, SrgOutcome, SrgParams, MINIMALITY_CAP,
};
use fwcodes::charsum::{
    gauss_formula_to_cyclotomic, gauss_sum_bruteforce, gauss_sum_formula, n_rho_count, quadratic_completion_closed_form,
    quadratic_completion_sum, t_sum, t_sum_closed_form, t_sum_cyclotomic, CyclotomicInteger,
};
use fwcodes::cli::{grid_points, GridPoint};
use fwcodes::codes::{
    generator_matrix, weight_distribution_enumerated_with_cap, weight_distribution_formula, CodeSpec, Matrix, Mode,
    WeightDistribution,
};
use fwcodes::defsets::{build_d, build_s_with_exponent, expected_size, DefiningSetKind};
use fwcodes::gf::{build_field, is_prime, FieldElement, Side, TowerCtx};

const GRID_CAP: u64 = 1 << 20;
/// Naive per-coordinate enumeration is added as a third oracle where
/// `q^{m1+m2} · n` is at most this.
const NAIVE_BUDGET: u64 = 1 << 26;

struct Outcome {
    ok: bool,
    detail: String,
}

impl Outcome {
    fn new(failures: &[String], summary: String) -> Outcome {
        if failures.is_empty() {
            Outcome { ok: true, detail: summary }
        } else {
            let shown: Vec<&str> = failures.iter().take(5).map(String::as_str).collect();
            Outcome { ok: false, detail: format!("{summary}; {} failure(s): {}", failures.len(), shown.join("; ")) }
        }
    }
}

fn label(pt: &GridPoint) -> String {
    format!("{} p={} s={} m1={} m2={}", pt.family.name(), pt.p, pt.s, pt.m1, pt.m2)
}

/// Everything computed once per grid point and shared by several criteria.
struct PointData {
    pt: GridPoint,
    q: u64,
    fast: WeightDistribution,
    formula: Result<WeightDistribution, String>,
    naive: Option<WeightDistribution>,
    histogram: WeightDistribution,
    alternate: Option<WeightDistribution>,
    rank: usize,
    projective: bool,
    exact_minimal: Option<bool>,
}

fn compute_point(pt: GridPoint) -> Result<PointData, String> {
    let err = |e: fwcodes::Error| format!("{}: {e}", label(&pt));
    let tower = TowerCtx::new(pt.p, pt.s, pt.m1, pt.m2).map_err(err)?;
    let spec = CodeSpec::for_family(&tower, pt.family).map_err(err)?;
    let fast = weight_distribution_enumerated_with_cap(&spec, Mode::Fast, GRID_CAP).map_err(err)?;
    let histogram = weight_distribution_enumerated_with_cap(&spec, Mode::Histogram, GRID_CAP).map_err(err)?;
    let naive = if spec.message_count() * spec.n() as u64 <= NAIVE_BUDGET {
        Some(weight_distribution_enumerated_with_cap(&spec, Mode::Naive, GRID_CAP).map_err(err)?)
    } else {
        None
    };
    let alternate = match tower.field(Side::M1).alternate_primitive_exponent() {
        Some(j) => {
            let alt = CodeSpec::new(&tower, build_s_with_exponent(&tower, j), build_d(&tower, pt.family).map_err(err)?)
                .map_err(err)?;
            Some(weight_distribution_enumerated_with_cap(&alt, Mode::Histogram, GRID_CAP).map_err(err)?)
        }
        None => None,
    };
    let formula = weight_distribution_formula(pt.family, pt.p, pt.s, pt.m1, pt.m2).map_err(|e| e.to_string());
    let g = generator_matrix(&spec);
    let rank = g.rank(&tower);
    let projective = matrix_is_projective(&tower, &g);
    let exact_minimal = if spec.message_count() <= MINIMALITY_CAP {
        Some(exact_minimality(&spec).map_err(err)?)
    } else {
        None
    };
    Ok(PointData { pt, q: tower.q() as u64, fast, formula, naive, histogram, alternate, rank, projective, exact_minimal })
}

fn criterion_tables(data: &[PointData], errors: &[String]) -> Outcome {
    let mut failures = errors.to_vec();
    let mut naive_points = 0;
    for d in data {
        match &d.formula {
            Ok(f) if *f == d.fast => {}
            Ok(f) => failures.push(format!("{}: enumerated {:?} vs table {:?}", label(&d.pt), d.fast.entries, f.entries)),
            Err(e) => failures.push(format!("{}: {e}", label(&d.pt))),
        }
        if d.histogram != d.fast {
            failures.push(format!("{}: histogram path disagrees", label(&d.pt)));
        }
        if let Some(naive) = &d.naive {
            naive_points += 1;
            if *naive != d.fast {
                failures.push(format!("{}: naive path disagrees", label(&d.pt)));
            }
        }
    }
    Outcome::new(
        &failures,
        format!("{} grid points, {} also checked coordinate by coordinate", data.len(), naive_points),
    )
}

fn criterion_lemmas() -> Outcome {
    let mut failures = Vec::new();
    let mut counts = BTreeMap::new();

    // Gauss sums, every odd prime below 100 and every exponent with
    // p^e <= 10^5
    for p in (3u32..100).filter(|&p| is_prime(p as u64)) {
        let mut e = 1u32;
        while (p as u64).pow(e) <= 100_000 {
            let f = build_field(p, e).expect("field");
            let brute = gauss_sum_bruteforce(&f).expect("odd p");
            let closed = gauss_sum_formula(p, 1, e).expect("odd p");
            let image = gauss_formula_to_cyclotomic(&closed).expect("closed form image");
            if brute != image {
                failures.push(format!("G over F_{p}^{e}: {brute} vs {closed}"));
            }
            // G^2 = η(-1) p^e independently of the closed form
            let eta = f.quadratic_character(f.neg(FieldElement::ONE)).expect("odd p") as i64;
            if brute.mul(&brute) != CyclotomicInteger::from_int(p, eta * (p as i64).pow(e)) {
                failures.push(format!("G^2 over F_{p}^{e}"));
            }
            // the split q = p^s, m gives the same closed form
            for s in (1..=e).filter(|s| e.is_multiple_of(*s)) {
                if gauss_sum_formula(p, s, e / s).expect("odd p") != closed {
                    failures.push(format!("G closed form depends on the split s={s} of e={e}"));
                }
            }
            *counts.entry("gauss").or_insert(0) += 1;
            e += 1;
        }
    }

    // quadratic sums, exhaustive over F_3, F_9, F_5
    for (p, n) in [(3, 1), (3, 2), (5, 1)] {
        let f = build_field(p, n).unwrap();
        for a2 in f.elements().skip(1) {
            for a1 in f.elements() {
                for a0 in f.elements() {
                    let brute = quadratic_completion_sum(&f, a2, a1, a0).unwrap();
                    let closed = quadratic_completion_closed_form(&f, a2, a1, a0).unwrap();
                    if brute != closed {
                        failures.push(format!("quadratic sum over F_{p}^{n} at {a2:?},{a1:?},{a0:?}"));
                    }
                    *counts.entry("quadratic").or_insert(0) += 1;
                }
            }
        }
    }

    // T(D, b) and N_ρ in every F_{q^m} of order at most 3^6
    let mut parities = [false; 2];
    for p in [2u32, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31] {
        for s in 1..=9u32 {
            for m in 1..=9u32 {
                let Some(order) = (p as u64).checked_pow(s * m) else { continue };
                if order > 729 {
                    continue;
                }
                let tower = TowerCtx::new(p, s, 1, m).unwrap();
                let f = tower.field(Side::M2);
                for kind in DefiningSetKind::FAMILIES {
                    let Ok(d) = build_d(&tower, kind) else { continue };
                    if d.len() as i64 != expected_size(&tower, kind).unwrap() {
                        failures.push(format!("|{}| for p={p} s={s} m={m}", kind.name()));
                    }
                    for b in f.elements().skip(1) {
                        let orbit = t_sum(&tower, &d, b).unwrap();
                        let full = t_sum_cyclotomic(&tower, &d, b).as_integer();
                        let closed = t_sum_closed_form(&tower, kind, b).unwrap();
                        if full != Some(orbit) || closed != orbit {
                            failures.push(format!("T({}, b={}) p={p} s={s} m={m}", kind.name(), b.raw()));
                        }
                        *counts.entry("t_sum").or_insert(0) += 1;
                    }
                }
                if p != 2 && m >= 2 {
                    for rho in tower.fq().elements() {
                        match n_rho_count(&tower, rho) {
                            Ok(c) => {
                                let matches = if m % 2 == 0 { c.even_form_matches } else { c.odd_form_matches };
                                if !matches {
                                    failures.push(format!("N_rho p={p} s={s} m={m} rho={}", rho.raw()));
                                }
                                parities[(m % 2) as usize] = true;
                            }
                            Err(e) => failures.push(format!("N_rho p={p} s={s} m={m}: {e}")),
                        }
                        *counts.entry("n_rho").or_insert(0) += 1;
                    }
                }
            }
        }
    }
    if !parities.iter().all(|&x| x) {
        failures.push("N_rho was not exercised for both parities".into());
    }
    Outcome::new(&failures, format!("{counts:?}"))
}

fn criterion_projectivity(data: &[PointData]) -> Outcome {
    let mut failures: Vec<String> =
        data.iter().filter(|d| !d.projective).map(|d| format!("{} not projective", label(&d.pt))).collect();

    // negative controls on a valid generator matrix
    let tower = TowerCtx::new(3, 1, 2, 2).unwrap();
    let spec = CodeSpec::for_family(&tower, DefiningSetKind::D1).unwrap();
    let g = generator_matrix(&spec);
    let with_column = |col: Vec<FieldElement>| {
        let mut entries = Vec::with_capacity(g.rows * (g.cols + 1));
        for r in 0..g.rows {
            entries.extend((0..g.cols).map(|c| g.get(r, c)));
            entries.push(col[r]);
        }
        Matrix { rows: g.rows, cols: g.cols + 1, entries }
    };
    let zero = with_column(vec![FieldElement::ZERO; g.rows]);
    let duplicate = with_column(g.column(3));
    if !projectivity_check(&spec) || !matrix_is_projective(&tower, &g) {
        failures.push("control code is not projective".into());
    }
    if matrix_is_projective(&tower, &zero) {
        failures.push("zero column accepted".into());
    }
    if matrix_is_projective(&tower, &duplicate) {
        failures.push("duplicated column accepted".into());
    }
    Outcome::new(&failures, format!("{} grid codes, 2 negative controls", data.len()))
}

fn criterion_griesmer(data: &[PointData]) -> Outcome {
    let mut failures = Vec::new();
    let mut checked = 0;
    for d in data {
        let (q, m1, m2) = (d.q, d.pt.m1, d.pt.m2);
        let c = classify_griesmer(d.fast.n, d.fast.k, d.fast.d().unwrap_or(0), q);
        let expect = match d.pt.family {
            DefiningSetKind::D1Tilde => Some((GriesmerVerdict::Griesmer, false)),
            DefiningSetKind::D1 if q == 2 && m1 == m2 => Some((GriesmerVerdict::NearGriesmer, true)),
            DefiningSetKind::D1 => Some((GriesmerVerdict::Griesmer, false)),
            DefiningSetKind::D2 if m2 == 2 => Some((GriesmerVerdict::NearGriesmer, true)),
            _ => None,
        };
        if let Some((verdict, proved)) = expect {
            checked += 1;
            if c.verdict != verdict || (proved && !c.distance_optimal_proved) {
                failures.push(format!("{}: {:?}", label(&d.pt), c));
            }
        }
    }
    let anchor = classify_griesmer(9, 4, 4, 2);
    if (anchor.griesmer_sum_d, anchor.griesmer_sum_d_plus_1, anchor.verdict) != (8, 11, GriesmerVerdict::NearGriesmer)
        || !anchor.distance_optimal_proved
    {
        failures.push(format!("[9,4,4] anchor: {anchor:?}"));
    }
    let anchor_code = data.iter().find(|d| {
        (d.pt.p, d.pt.s, d.pt.m1, d.pt.m2, d.pt.family) == (2, 1, 2, 2, DefiningSetKind::D1)
    });
    match anchor_code {
        Some(d) if (d.fast.n, d.fast.k, d.fast.d()) == (9, 4, Some(4)) => {}
        _ => failures.push("binary D1 code at m1=m2=2 is not [9,4,4]".into()),
    }
    Outcome::new(&failures, format!("{checked} claims checked"))
}

fn criterion_srg() -> Outcome {
    let mut failures = Vec::new();
    let cases = [
        (2, 2, 2, DefiningSetKind::D1, Some(SrgParams { n: 16, k: 9, lambda: 4, mu: 6 })),
        (3, 2, 2, DefiningSetKind::D1, Some(SrgParams { n: 81, k: 64, lambda: 49, mu: 56 })),
        (2, 2, 2, DefiningSetKind::D1Tilde, Some(SrgParams { n: 16, k: 12, lambda: 8, mu: 12 })),
        (2, 2, 3, DefiningSetKind::D1Tilde, None),
        (3, 2, 2, DefiningSetKind::D1Tilde, None),
    ];
    let mut measured_all = Vec::new();
    for (p, m1, m2, kind, anchor) in cases {
        let tower = TowerCtx::new(p, 1, m1, m2).unwrap();
        let spec = CodeSpec::for_family(&tower, kind).unwrap();
        let wd = weight_distribution_enumerated_with_cap(&spec, Mode::Fast, GRID_CAP).unwrap();
        let tag = format!("{} q={p} m1={m1} m2={m2}", kind.name());
        let predicted = match srg_params_from_code(&wd, p as u64, projectivity_check(&spec)) {
            Ok(v) => v,
            Err(e) => {
                failures.push(format!("{tag}: {e}"));
                continue;
            }
        };
        if anchor.is_some_and(|a| a != predicted) {
            failures.push(format!("{tag}: predicted {predicted:?}, expected {anchor:?}"));
        }
        if !predicted.is_feasible() {
            failures.push(format!("{tag}: infeasible {predicted:?}"));
        }
        let measured = build_srg_graph(&spec).map_err(|e| e.to_string()).and_then(|g| srg_verify(&g).map_err(|e| e.to_string()));
        match measured {
            Ok(SrgOutcome::Regular(m)) if m == predicted => measured_all.push(format!("({},{},{},{})", m.n, m.k, m.lambda, m.mu)),
            other => failures.push(format!("{tag}: measured {other:?}, predicted {predicted:?}")),
        }
    }
    Outcome::new(&failures, format!("measured {}", measured_all.join(" ")))
}

fn criterion_minimality(data: &[PointData]) -> Outcome {
    let mut failures = Vec::new();
    let mut detail = Vec::new();
    for kind in [DefiningSetKind::D3, DefiningSetKind::D3Tilde] {
        let tower = TowerCtx::new(3, 1, 2, 8).unwrap();
        let spec = CodeSpec::for_family(&tower, kind).unwrap();
        let wd = weight_distribution_enumerated_with_cap(&spec, Mode::Fast, GRID_CAP).unwrap();
        let (lo, hi) = (wd.w_min().unwrap(), wd.w_max().unwrap());
        if !ab_minimality(&wd, 3) || 3 * lo <= 2 * hi {
            failures.push(format!("{} q=3 m1=2 m2=8: w_min={lo}, w_max={hi}", kind.name()));
        }
        if weight_distribution_formula(kind, 3, 1, 2, 8).ok() != Some(wd.clone()) {
            failures.push(format!("{} q=3 m1=2 m2=8 table mismatch", kind.name()));
        }
        detail.push(format!("{}: 3*{lo} > 2*{hi}", kind.name()));
    }
    let mut exact_checked = 0;
    for d in data {
        if let Some(exact) = d.exact_minimal {
            if ab_minimality(&d.fast, d.q) {
                exact_checked += 1;
                if !exact {
                    failures.push(format!("{}: AB holds but a codeword is not minimal", label(&d.pt)));
                }
            }
        }
    }
    Outcome::new(&failures, format!("{}; {exact_checked} small codes checked exhaustively", detail.join(", ")))
}

fn criterion_invariants(data: &[PointData]) -> Outcome {
    let mut failures = Vec::new();
    let mut alt_checked = 0;
    for d in data {
        for wd in [Some(&d.fast), Some(&d.histogram), d.naive.as_ref(), d.alternate.as_ref()].into_iter().flatten() {
            for (name, ok) in wd.invariant_checks(d.q) {
                if !ok {
                    failures.push(format!("{}: {name}", label(&d.pt)));
                }
            }
            let qk = (d.q as u128).pow(wd.k);
            if wd.total() != qk || wd.first_moment() * d.q as u128 != wd.n as u128 * (d.q as u128 - 1) * qk {
                failures.push(format!("{}: total or first moment", label(&d.pt)));
            }
        }
        if d.rank != (d.pt.m1 + d.pt.m2) as usize {
            failures.push(format!("{}: rank {}", label(&d.pt), d.rank));
        }
        match &d.alternate {
            Some(alt) => {
                alt_checked += 1;
                if *alt != d.histogram {
                    failures.push(format!("{}: distribution depends on the primitive element", label(&d.pt)));
                }
            }
            None => failures.push(format!("{}: no alternate primitive element", label(&d.pt))),
        }
    }
    Outcome::new(&failures, format!("{} distributions, {alt_checked} alternate-α rebuilds", data.len()))
}

fn main() -> ExitCode {
    let start = Instant::now();
    let points = grid_points(&[2, 3, 5, 7], &[1, 2], 2..=5, GRID_CAP);
    let mut data = Vec::with_capacity(points.len());
    let mut errors = Vec::new();
    for pt in points {
        match compute_point(pt) {
            Ok(d) => data.push(d),
            Err(e) => errors.push(e),
        }
    }
    let grid_time = start.elapsed();

    let lemma_start = Instant::now();
    let lemmas = criterion_lemmas();
    let lemma_time = lemma_start.elapsed();
    let srg_start = Instant::now();
    let srg = criterion_srg();
    let srg_time = srg_start.elapsed();

    let results = [
        ("1", "table reproduction", criterion_tables(&data, &errors), Some(grid_time)),
        ("2", "lemma suite", lemmas, Some(lemma_time)),
        ("3", "projectivity", criterion_projectivity(&data), None),
        ("4", "Griesmer claims", criterion_griesmer(&data), None),
        ("5", "SRG reproduction", srg, Some(srg_time)),
        ("6", "minimality", criterion_minimality(&data), None),
        ("7", "structural invariants", criterion_invariants(&data), None),
    ];
    let mut all_ok = true;
    for (id, name, outcome, time) in results {
        all_ok &= outcome.ok;
        let t = time.map(|t| format!(" [{:.1}s]", t.as_secs_f64())).unwrap_or_default();
        println!("{} criterion {id} ({name}): {}{t}", if outcome.ok { "PASS" } else { "FAIL" }, outcome.detail);
    }
    println!("total {:.1}s", start.elapsed().as_secs_f64());
    if all_ok { ExitCode::SUCCESS } else { ExitCode::FAILURE }
}
