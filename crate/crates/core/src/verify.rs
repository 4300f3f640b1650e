//! End-to-end theorem checks binding the structures, lines and clique
//! modules into machine-verified verdicts: the omega formula for UU_4, the
//! bounds for the structure M, the closed forms for S0 and T1, and the
//! assembled lower-bound sets.

use crate::clique::{build_graph, max_clique, max_clique_seeded, reduce_by_classes, CliqueResult};
use crate::gf::Field;
use crate::lines::{build_config_set, construct_3line_plus_point, construct_4line};
use crate::structures::{
    abelian_decomposition_m, cc, construct_2q_set_m, enumerate_structure, psi_inverse,
    xn2_representatives, Point3, StructureKind,
};
use crate::unitriangular::{enumerate_group, UtMatrix};
use serde::ser::Serializer;
use serde::Serialize;
use serde_json::{json, Value};
use std::time::{Duration, Instant};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum VerifyError {
    #[error("instance too large: {0}")]
    TooLarge(String),
    #[error("unsupported field: {0}")]
    UnsupportedField(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Confirmed,
    /// Carries a concrete counterexample or shortfall description.
    Refuted(String),
    /// Carries the resource reason.
    Skipped(String),
}

impl Serialize for Verdict {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Verdict::Confirmed => s.serialize_str("Confirmed"),
            Verdict::Refuted(why) => s.serialize_str(&format!("Refuted: {why}")),
            Verdict::Skipped(why) => s.serialize_str(&format!("Skipped: {why}")),
        }
    }
}

impl Verdict {
    pub fn is_refuted(&self) -> bool {
        matches!(self, Verdict::Refuted(_))
    }
}

/// One theorem-level check. `asserted` distinguishes claims made at this q
/// from observe-mode runs (for instance q = 2, which the supporting lemmas
/// exclude); observe-mode refutations are findings, not suite failures.
#[derive(Debug, Clone, Serialize)]
pub struct TheoremReport {
    pub theorem: String,
    pub q: u64,
    pub modulus: String,
    pub computed: Value,
    pub expected: Value,
    pub provenance: String,
    pub verdict: Verdict,
    pub asserted: bool,
    pub seconds: f64,
}

impl TheoremReport {
    pub fn fails_suite(&self) -> bool {
        self.asserted && self.verdict.is_refuted()
    }
}

/// Exact omega of the structure M by clique search.
pub fn omega_m(f: &Field, time_cap: Option<Duration>) -> CliqueResult {
    let m = enumerate_structure(StructureKind::M, f);
    let g = build_graph(&m.points, |&a, &b| cc(f, a, b));
    // Seed with the explicit 2q construction when available.
    let seed: Vec<usize> = match construct_2q_set_m(f) {
        Ok(set) => set
            .iter()
            .map(|p| m.points.iter().position(|x| x == p).unwrap())
            .collect(),
        Err(_) => Vec::new(),
    };
    max_clique_seeded(&g, time_cap, &seed)
}

fn modulus_text(f: &Field) -> String {
    f.descriptor()
}

/// The omega formula for UU_4: predicted omega = q^3 + q + 1 + omega(M).
/// With `direct` (q <= 3) the full group is class-reduced and solved exactly
/// and the two values are compared; the complement-of-T4 identity
/// (predicted - 1) is checked the same way.
pub fn verify_theorem_a(f: &Field, direct: bool) -> Result<TheoremReport, VerifyError> {
    let start = Instant::now();
    let q = f.q();
    if direct && q > 3 {
        return Err(VerifyError::TooLarge(format!(
            "direct mode enumerates q^6 = {} elements; supported for q <= 3",
            q.pow(6)
        )));
    }
    let om = omega_m(f, None);
    let predicted = q.pow(3) + q + 1 + om.omega as u64;
    let mut computed = json!({
        "omega_m": om.omega,
        "predicted_omega_uu4": predicted,
    });
    let asserted = q != 2;
    let expected = match q {
        2 => json!({"omega_uu4": 13}),
        3 => json!({"omega_uu4": 37}),
        _ => json!({
            "lower": q.pow(3) + 3 * q + 1,
            "upper": q.pow(3) + q.pow(2) + 1,
        }),
    };
    let mut verdict = match q {
        2 => Verdict::Confirmed,
        3 => {
            if predicted == 37 {
                Verdict::Confirmed
            } else {
                Verdict::Refuted(format!("predicted {predicted} != 37"))
            }
        }
        _ => {
            let lo = q.pow(3) + 3 * q + 1;
            let hi = q.pow(3) + q.pow(2) + 1;
            if (lo..=hi).contains(&predicted) {
                Verdict::Confirmed
            } else {
                Verdict::Refuted(format!("predicted {predicted} outside [{lo}, {hi}]"))
            }
        }
    };
    if direct {
        let group = enumerate_group(4, f).map_err(|e| VerifyError::TooLarge(e.to_string()))?;
        let direct_omega = omega_of_subset(f, &group, &group);
        let minus_t4: Vec<UtMatrix> = group
            .iter()
            .filter(|a| !(a.get(1, 2).is_zero() && a.get(3, 4).is_zero()))
            .cloned()
            .collect();
        let omega_minus_t4 = omega_of_subset(f, &minus_t4, &group);
        computed["direct_omega_uu4"] = json!(direct_omega);
        computed["direct_omega_uu4_minus_t4"] = json!(omega_minus_t4);
        if direct_omega != predicted as usize {
            verdict = Verdict::Refuted(format!(
                "exact search finds omega = {direct_omega}, formula predicts {predicted}"
            ));
        } else if omega_minus_t4 + 1 != predicted as usize {
            verdict = Verdict::Refuted(format!(
                "omega without the abelian complement is {omega_minus_t4}, expected {}",
                predicted - 1
            ));
        } else if verdict == Verdict::Confirmed {
            verdict = Verdict::Confirmed;
        }
    }
    Ok(TheoremReport {
        theorem: "A".into(),
        q,
        modulus: modulus_text(f),
        computed,
        expected,
        provenance: if direct {
            "closed form cross-checked against exhaustive class-reduced clique".into()
        } else {
            "closed form in omega(M), solved exactly on the M graph".into()
        },
        verdict,
        asserted,
        seconds: start.elapsed().as_secs_f64(),
    })
}

/// omega of a subset of UU_n via centralizer-class reduction over `ambient`.
fn omega_of_subset(f: &Field, items: &[UtMatrix], ambient: &[UtMatrix]) -> usize {
    let red = reduce_by_classes(items, ambient, |a, b| a.commutes(b, f));
    let reps: Vec<&UtMatrix> = red.representatives.iter().map(|&i| &items[i]).collect();
    let g = build_graph(&reps, |a, b| a.commutes(b, f));
    max_clique(&g, None).omega
}

/// The decomposition and bound checks for M: exactly q(q-1) disjoint abelian
/// non-extendable parts of size q; every abelian set has size at most q; and
/// 2q <= omega(M) <= q(q-1) with omega computed exactly.
pub fn verify_theorem_b(f: &Field, time_cap: Option<Duration>) -> Result<TheoremReport, VerifyError> {
    let start = Instant::now();
    let q = f.q();
    if q > 7 && time_cap.is_none() {
        return Err(VerifyError::TooLarge(format!(
            "exact omega(M) at q = {q} needs a time cap; graph has {} vertices",
            q * q * (q - 1)
        )));
    }
    let mut problems: Vec<String> = Vec::new();

    // part 1: the decomposition
    let parts = abelian_decomposition_m(f);
    if parts.len() as u64 != q * (q - 1) {
        problems.push(format!("{} parts instead of q(q-1)", parts.len()));
    }
    let m = enumerate_structure(StructureKind::M, f);
    let mut seen = std::collections::HashSet::new();
    for part in &parts {
        if part.len() as u64 != q {
            problems.push(format!("part of size {}", part.len()));
        }
        for &p in part {
            if !seen.insert(p) {
                problems.push("parts overlap".into());
            }
        }
        for (i, &a) in part.iter().enumerate() {
            for &b in part.iter().skip(i + 1) {
                if !cc(f, a, b) {
                    problems.push("non-abelian part".into());
                }
            }
        }
        let inside: std::collections::HashSet<_> = part.iter().copied().collect();
        for &cand in &m.points {
            if !inside.contains(&cand) && part.iter().all(|&pt| cc(f, cand, pt)) {
                problems.push(format!("part extendable by {}", cand.to_text()));
            }
        }
    }
    if seen.len() != m.points.len() {
        problems.push("parts do not cover M".into());
    }
    let decomposition_ok = problems.is_empty();

    // part 2: abelian sets never exceed q (clique on the commuting graph)
    let complement = build_graph(&m.points, |&a, &b| !cc(f, a, b));
    let max_abelian = max_clique(&complement, time_cap).omega as u64;
    if max_abelian > q {
        problems.push(format!("abelian set of size {max_abelian} found"));
    }

    // part 3: the omega bounds
    let om = omega_m(f, time_cap);
    let omega = om.omega as u64;
    let lower = 2 * q;
    let upper = q * (q - 1);
    let asserted = q != 2; // the 2q bound assumes q != 2
    if om.exact {
        if omega > upper {
            problems.push(format!("omega(M) = {omega} exceeds q(q-1) = {upper}"));
        }
        if q != 2 && omega < lower {
            problems.push(format!("omega(M) = {omega} below 2q = {lower}"));
        }
    }
    let computed = json!({
        "decomposition_ok": decomposition_ok,
        "part_count": parts.len(),
        "max_abelian_size": max_abelian,
        "omega_m": omega,
        "omega_exact": om.exact,
    });
    let expected = json!({
        "part_count": q * (q - 1),
        "part_size": q,
        "max_abelian_size": q,
        "omega_lower": if q == 2 { Value::Null } else { json!(lower) },
        "omega_upper": upper,
    });
    let verdict = if !om.exact {
        Verdict::Skipped(format!(
            "omega(M) search hit the time cap with best {omega}; decomposition_ok = {decomposition_ok}"
        ))
    } else if problems.is_empty() {
        Verdict::Confirmed
    } else {
        Verdict::Refuted(problems.join("; "))
    };
    Ok(TheoremReport {
        theorem: "B".into(),
        q,
        modulus: modulus_text(f),
        computed,
        expected,
        provenance: "decomposition checked pointwise; omega solved exactly on the M graph".into(),
        verdict,
        asserted,
        seconds: start.elapsed().as_secs_f64(),
    })
}

/// omega of S0 (all superdiagonal entries nonzero) against the closed form
/// (q-1)^(n-2) q^C(n-2,2), via class-reduced clique. On S0 the commuting
/// relation coincides with centralizer equality, so the reduction is exact.
pub fn verify_s0(f: &Field, n: u8) -> Result<TheoremReport, VerifyError> {
    let start = Instant::now();
    let q = f.q();
    let order = crate::unitriangular::group_order(n, q);
    if order > 1 << 16 {
        return Err(VerifyError::TooLarge(format!(
            "group order {order} beyond the enumeration budget"
        )));
    }
    let group = enumerate_group(n, f).map_err(|e| VerifyError::TooLarge(e.to_string()))?;
    let s0: Vec<UtMatrix> = group
        .iter()
        .filter(|a| a.has_nonzero_superdiagonal())
        .cloned()
        .collect();
    let omega = omega_of_subset(f, &s0, &group) as u64;
    let nn = n as u32;
    let expected_omega = (q - 1).pow(nn - 2) * q.pow((nn - 2) * (nn.saturating_sub(3)) / 2);
    let verdict = if omega == expected_omega {
        Verdict::Confirmed
    } else {
        Verdict::Refuted(format!("omega(S0) = {omega} != {expected_omega}"))
    };
    Ok(TheoremReport {
        theorem: format!("S0(n={n})"),
        q,
        modulus: modulus_text(f),
        computed: json!({"omega_s0": omega, "s0_size": s0.len()}),
        expected: json!({"omega_s0": expected_omega}),
        provenance: "closed form vs class-reduced clique".into(),
        verdict,
        asserted: true,
        seconds: start.elapsed().as_secs_f64(),
    })
}

/// T1 = {a34 = 0}: the AC property (every noncentral centralizer abelian),
/// omega(T1) = q^2 + 1, and omega(T1 union T1_anti) = 2 q^2 + 1.
pub fn verify_t1(f: &Field) -> Result<TheoremReport, VerifyError> {
    let start = Instant::now();
    let q = f.q();
    if q > 3 {
        return Err(VerifyError::TooLarge(format!(
            "T1 has q^5 = {} elements; supported for q <= 3",
            q.pow(5)
        )));
    }
    let group = enumerate_group(4, f).map_err(|e| VerifyError::TooLarge(e.to_string()))?;
    let t1: Vec<UtMatrix> = group
        .iter()
        .filter(|a| a.get(3, 4).is_zero())
        .cloned()
        .collect();
    let mut problems = Vec::new();
    if t1.len() as u64 != q.pow(5) {
        problems.push(format!("|T1| = {}", t1.len()));
    }
    // center of T1
    let center: Vec<&UtMatrix> = t1
        .iter()
        .filter(|a| t1.iter().all(|b| a.commutes(b, f)))
        .collect();
    if center.len() as u64 != q.pow(2) {
        problems.push(format!("|Z(T1)| = {}", center.len()));
    }
    // AC property
    let center_set: std::collections::HashSet<&UtMatrix> = center.iter().copied().collect();
    let mut ac = true;
    'outer: for s in &t1 {
        if center_set.contains(s) {
            continue;
        }
        let cent: Vec<&UtMatrix> = t1.iter().filter(|b| s.commutes(b, f)).collect();
        for (i, a) in cent.iter().enumerate() {
            for b in cent.iter().skip(i + 1) {
                if !a.commutes(b, f) {
                    ac = false;
                    problems.push(format!("non-abelian centralizer at {}", s.to_text(f)));
                    break 'outer;
                }
            }
        }
    }
    // omega(T1), classes taken inside T1
    let omega_t1 = omega_of_subset(f, &t1, &t1) as u64;
    if omega_t1 != q * q + 1 {
        problems.push(format!("omega(T1) = {omega_t1}"));
    }
    // omega(T1 union T1_anti), classes inside the full group
    let union: Vec<UtMatrix> = group
        .iter()
        .filter(|a| a.get(3, 4).is_zero() || a.get(1, 2).is_zero())
        .cloned()
        .collect();
    let omega_union = omega_of_subset(f, &union, &group) as u64;
    if omega_union != 2 * q * q + 1 {
        problems.push(format!("omega(T1 u T1-anti) = {omega_union}"));
    }
    let verdict = if problems.is_empty() {
        Verdict::Confirmed
    } else {
        Verdict::Refuted(problems.join("; "))
    };
    Ok(TheoremReport {
        theorem: "T1".into(),
        q,
        modulus: modulus_text(f),
        computed: json!({
            "ac_group": ac,
            "omega_t1": omega_t1,
            "omega_t1_union_anti": omega_union,
            "center_size": center.len(),
        }),
        expected: json!({
            "ac_group": true,
            "omega_t1": q * q + 1,
            "omega_t1_union_anti": 2 * q * q + 1,
            "center_size": q * q,
        }),
        provenance: "AC checked pairwise; omegas via class-reduced cliques".into(),
        verdict,
        asserted: true,
        seconds: start.elapsed().as_secs_f64(),
    })
}

/// The explicit lower-bound assembly in UU_4(F_q) for odd q >= 5.
///
/// Fixed blocks (mutually non-commuting by construction):
///   q(q-1)^2 class representatives with full superdiagonal,
///   q(q-1) representatives with a34 = 0 and a12 a23 != 0, their
///   anti-images, and the single element I + E23 from the abelian complement.
/// Flexible blocks: for each c in F_q one element (1, mu, c) with a23 = a34
/// = 0 (and the anti-side mirror) plus the canonical representatives of a
/// non-commuting set in M; their mutual compatibility is solved exactly over
/// per-class value sets, and a greedy completion over every class
/// representative tops the set up to a maximal one.
pub fn verify_lower_bounds_g4(f: &Field) -> Result<TheoremReport, VerifyError> {
    let start = Instant::now();
    let q = f.q();
    if q < 5 {
        return Err(VerifyError::UnsupportedField("requires q >= 5".into()));
    }
    if f.characteristic() == 2 {
        return Err(VerifyError::UnsupportedField("requires odd characteristic".into()));
    }
    if q.pow(4) > 1 << 16 {
        return Err(VerifyError::TooLarge(format!(
            "completion pool at q = {q} has more than 2^16 entries"
        )));
    }

    // candidate M-sets, best-first
    let mut msets: Vec<(String, Vec<Point3>)> = Vec::new();
    if f.characteristic() != 3 && f.minus_three_is_square() {
        if let Ok(fl) = construct_4line(f, None) {
            if let Ok(set) = build_config_set(f, &fl.config) {
                msets.push(("four-line".into(), restrict_to_m(f, &set)));
            }
        }
    }
    if let Ok(set) = construct_3line_plus_point(f) {
        msets.push(("three-line".into(), restrict_to_m(f, &set)));
    }
    let om = omega_m(f, Some(Duration::from_secs(30)));
    {
        let m = enumerate_structure(StructureKind::M, f);
        let witness: Vec<Point3> = om.witness.iter().map(|&i| m.points[i]).collect();
        msets.push(("max-clique witness".into(), witness));
    }
    if let Ok(set) = construct_2q_set_m(f) {
        msets.push(("two-q".into(), set));
    }

    let mut best: Option<(String, Vec<UtMatrix>, usize)> = None;
    for (name, mset) in &msets {
        let assembled = assemble_with_mset(f, mset);
        let size = assembled.len();
        if best.as_ref().map_or(true, |(_, _, s)| size > *s) {
            best = Some((name.clone(), assembled, size));
        }
    }
    let (mut mset_name, mut assembled, _) = best.expect("at least one candidate M-set");

    // greedy completion over one representative per centralizer class
    let pool = completion_pool(f);
    for cand in pool {
        if assembled.iter().all(|a| !a.commutes(&cand, f)) {
            assembled.push(cand);
        }
    }

    let floor_main = q.pow(3) + 3 * q + 1;
    let four_line_applies = f.characteristic() != 3 && f.minus_three_is_square();
    let floor_extra = if four_line_applies {
        Some(q.pow(3) + 4 * q - 11)
    } else {
        None
    };

    // When the fast assembly misses a floor and the group is enumerable, fall
    // back to the exact block decomposition: the skeleton (one element of the
    // abelian complement, all full-superdiagonal classes and all a34 = 0 /
    // a12 = 0 classes with two nonzero superdiagonal entries) never commutes
    // with anything outside it, so the optimum is skeleton + a maximum
    // non-commuting set of the remaining parts, solved exactly.
    let mut exact_bound: Option<u64> = None;
    let below_floor = (assembled.len() as u64) < floor_main
        || floor_extra.is_some_and(|fx| (assembled.len() as u64) < fx);
    if below_floor && q <= 5 {
        if let Some((exact_set, upper)) = exact_block_optimum(f) {
            exact_bound = Some(upper);
            if exact_set.len() > assembled.len() {
                assembled = exact_set;
                mset_name = "exact block decomposition".into();
            }
        }
    }

    // final full pairwise validation
    for (i, a) in assembled.iter().enumerate() {
        for b in assembled.iter().skip(i + 1) {
            assert!(!a.commutes(b, f), "assembled set failed pairwise validation");
        }
    }
    let achieved = assembled.len() as u64;
    let mut problems = Vec::new();
    if achieved < floor_main {
        problems.push(format!("achieved {achieved} below floor {floor_main}"));
    }
    if let Some(fx) = floor_extra {
        if achieved < fx {
            problems.push(format!("achieved {achieved} below four-line floor {fx}"));
        }
    }
    if let Some(upper) = exact_bound {
        if upper < floor_main {
            problems.push(format!(
                "no set can reach the floor: exact omega(UU4) = {upper}"
            ));
        }
    }
    let verdict = if problems.is_empty() {
        Verdict::Confirmed
    } else {
        Verdict::Refuted(problems.join("; "))
    };
    Ok(TheoremReport {
        theorem: "G4-lower-bound".into(),
        q,
        modulus: modulus_text(f),
        computed: json!({
            "achieved_size": achieved,
            "mset_source": mset_name,
            "omega_m_best": om.omega,
            "omega_m_exact": om.exact,
            "exact_omega_uu4": exact_bound,
        }),
        expected: json!({
            "floor": floor_main,
            "four_line_floor": floor_extra,
        }),
        provenance: "explicit assembly, fully pairwise-validated".into(),
        verdict,
        asserted: true,
        seconds: start.elapsed().as_secs_f64(),
    })
}

/// Exact maximum non-commuting set in UU_4(F_q) by block decomposition.
///
/// Verifies computationally that the skeleton blocks are pairwise complete
/// (every cross pair non-commuting) and that no skeleton element commutes
/// with any element of the flexible part, then solves the flexible part
/// exactly. Returns the witness set and the proven exact omega, or None if
/// any structural check fails.
fn exact_block_optimum(f: &Field) -> Option<(Vec<UtMatrix>, u64)> {
    let group = enumerate_group(4, f).ok()?;
    let red = reduce_by_classes(&group, &group, |a, b| a.commutes(b, f));
    let reps: Vec<UtMatrix> = red
        .representatives
        .iter()
        .map(|&i| group[i].clone())
        .collect();
    let is_zero = |m: &UtMatrix, i: usize, j: usize| m.get(i, j).is_zero();
    let mut skeleton: Vec<UtMatrix> = Vec::new();
    let mut flexible: Vec<UtMatrix> = Vec::new();
    let mut t4_classes: Vec<UtMatrix> = Vec::new();
    let mut t4_pick: Option<UtMatrix> = None;
    for r in &reps {
        let s12 = !is_zero(r, 1, 2);
        let s23 = !is_zero(r, 2, 3);
        let s34 = !is_zero(r, 3, 4);
        match (s12, s23, s34) {
            (true, true, true) | (true, true, false) | (false, true, true) => {
                skeleton.push(r.clone())
            }
            (true, false, true) | (true, false, false) | (false, false, true) => {
                flexible.push(r.clone())
            }
            (false, _, false) => {
                // abelian complement: at most one element can join; pick a
                // class that never commutes with the rest of the skeleton
                t4_classes.push(r.clone());
                if t4_pick.is_none() && s23 {
                    t4_pick = Some(r.clone());
                }
            }
        }
    }
    // the complement block must be abelian for the +1 in the bound
    for (i, a) in t4_classes.iter().enumerate() {
        for b in t4_classes.iter().skip(i + 1) {
            if !a.commutes(b, f) {
                return None;
            }
        }
    }
    skeleton.extend(t4_pick);
    // structural checks: skeleton internally complete and complete against
    // the flexible part
    for (i, a) in skeleton.iter().enumerate() {
        for b in skeleton.iter().skip(i + 1) {
            if a.commutes(b, f) {
                return None;
            }
        }
        for b in &flexible {
            if a.commutes(b, f) {
                return None;
            }
        }
    }
    let g = build_graph(&flexible, |a, b| a.commutes(b, f));
    let res = max_clique(&g, None);
    let mut witness: Vec<UtMatrix> = skeleton;
    witness.extend(res.witness.iter().map(|&i| flexible[i].clone()));
    let upper = witness.len() as u64;
    Some((witness, upper))
}

fn restrict_to_m(_f: &Field, pts: &[Point3]) -> Vec<Point3> {
    pts.iter()
        .filter(|p| !p.y.is_zero())
        .map(|p| Point3::new_m(p.x, p.y, p.z))
        .collect()
}

/// The fixed always-compatible blocks plus the exactly-solved flexible ones.
fn assemble_with_mset(f: &Field, mset: &[Point3]) -> Vec<UtMatrix> {
    let mut out = Vec::new();
    // full-superdiagonal representatives (1, s2, s3; a24 = c)
    for s2 in f.nonzero_elements() {
        for s3 in f.nonzero_elements() {
            for c in f.elements() {
                let mut m = UtMatrix::identity(4, f);
                m.set(1, 2, f.one());
                m.set(2, 3, s2);
                m.set(3, 4, s3);
                m.set(2, 4, c);
                out.push(m);
            }
        }
    }
    // a34 = 0 block: (1, s; a24 = c) and its anti image
    let mut n1_side = Vec::new();
    for s in f.nonzero_elements() {
        for c in f.elements() {
            let mut m = UtMatrix::identity(4, f);
            m.set(1, 2, f.one());
            m.set(2, 3, s);
            m.set(2, 4, c);
            n1_side.push(m);
        }
    }
    out.extend(n1_side.iter().cloned());
    out.extend(n1_side.iter().map(|m| m.phi(f)));
    // the one element of the abelian complement
    let mut e23 = UtMatrix::identity(4, f);
    e23.set(2, 3, f.one());
    out.push(e23);
    // the M part through the N2 representatives
    out.extend(mset.iter().map(|&p| psi_inverse(f, p)));
    // flexible blocks: per class c one (1, mu, c) with a23 = a34 = 0, and the
    // mirror (b34 = 1, b13 = c, b24 = mu'); mu avoids (c - z)/y, mu' avoids
    // c y - x over the M part, and mu + mu' != 0 across all chosen pairs.
    let qv = f.q();
    let mut forb_n3 = vec![std::collections::HashSet::new(); qv as usize];
    let mut forb_anti = vec![std::collections::HashSet::new(); qv as usize];
    for (ci, c) in f.elements().enumerate() {
        for p in mset {
            let v = f.div(f.sub(c, p.z), p.y).unwrap();
            forb_n3[ci].insert(v.idx());
            let w = f.sub(f.mul(c, p.y), p.x);
            forb_anti[ci].insert(w.idx());
        }
    }
    // choose value sets W (for mu) and W' (for mu') with W and -W' disjoint,
    // maximizing the number of classes served; exhaustive over subsets for
    // small q, otherwise single-value pairs
    let (kept_n3, kept_anti) = if qv <= 8 {
        best_value_sets_exhaustive(f, &forb_n3, &forb_anti)
    } else {
        best_value_sets_single(f, &forb_n3, &forb_anti)
    };
    for (ci, c) in f.elements().enumerate() {
        if let Some(mu_idx) = kept_n3[ci] {
            let mut m = UtMatrix::identity(4, f);
            m.set(1, 2, f.one());
            m.set(1, 3, f.elt(mu_idx as u64));
            m.set(2, 4, c);
            out.push(m);
        }
        if let Some(mu_idx) = kept_anti[ci] {
            let mut m = UtMatrix::identity(4, f);
            m.set(3, 4, f.one());
            m.set(1, 3, c);
            m.set(2, 4, f.elt(mu_idx as u64));
            out.push(m);
        }
    }
    // drop anything that slipped into a commuting pair (robustness against a
    // degenerate M set); keep-first order is deterministic
    let mut kept: Vec<UtMatrix> = Vec::with_capacity(out.len());
    for cand in out {
        if kept.iter().all(|a| !a.commutes(&cand, f)) {
            kept.push(cand);
        }
    }
    kept
}

type ValueChoice = (Vec<Option<u32>>, Vec<Option<u32>>);

/// Exhaustive search over value-set pairs (W, W') with W and -W' disjoint.
fn best_value_sets_exhaustive(
    f: &Field,
    forb_n3: &[std::collections::HashSet<u32>],
    forb_anti: &[std::collections::HashSet<u32>],
) -> ValueChoice {
    let q = f.q() as usize;
    let mut best_count = 0usize;
    let mut best: ValueChoice = (vec![None; q], vec![None; q]);
    for w_mask in 0u32..(1 << q) {
        // -W' must избегать W: precompute the forbidden negation mask
        let mut neg_w = 0u32;
        for v in 0..q {
            if (w_mask >> v) & 1 == 1 {
                let n = f.neg(f.elt(v as u64)).idx();
                neg_w |= 1 << n;
            }
        }
        let wp_mask_all = !neg_w & ((1u32 << q) - 1);
        // greedy inner choice: any subset of wp_mask_all works, take it all
        let mut kept_n3: Vec<Option<u32>> = vec![None; q];
        let mut kept_anti: Vec<Option<u32>> = vec![None; q];
        let mut count = 0usize;
        for ci in 0..q {
            for v in 0..q {
                if (w_mask >> v) & 1 == 1 && !forb_n3[ci].contains(&(v as u32)) {
                    kept_n3[ci] = Some(v as u32);
                    count += 1;
                    break;
                }
            }
            for v in 0..q {
                if (wp_mask_all >> v) & 1 == 1 && !forb_anti[ci].contains(&(v as u32)) {
                    kept_anti[ci] = Some(v as u32);
                    count += 1;
                    break;
                }
            }
        }
        if count > best_count {
            best_count = count;
            best = (kept_n3, kept_anti);
        }
    }
    best
}

/// Cheap fallback: a single shared value on each side.
fn best_value_sets_single(
    f: &Field,
    forb_n3: &[std::collections::HashSet<u32>],
    forb_anti: &[std::collections::HashSet<u32>],
) -> ValueChoice {
    let q = f.q() as usize;
    let mut best_count = 0usize;
    let mut best: ValueChoice = (vec![None; q], vec![None; q]);
    for w in 0..q as u32 {
        for wp in 0..q as u32 {
            if f.add(f.elt(w as u64), f.elt(wp as u64)).is_zero() {
                continue;
            }
            let mut kept_n3: Vec<Option<u32>> = vec![None; q];
            let mut kept_anti: Vec<Option<u32>> = vec![None; q];
            let mut count = 0;
            for ci in 0..q {
                if !forb_n3[ci].contains(&w) {
                    kept_n3[ci] = Some(w);
                    count += 1;
                }
                if !forb_anti[ci].contains(&wp) {
                    kept_anti[ci] = Some(wp);
                    count += 1;
                }
            }
            if count > best_count {
                best_count = count;
                best = (kept_n3, kept_anti);
            }
        }
    }
    best
}

/// One representative per centralizer class of UU_4, spanning every part of
/// the zero-pattern partition; used for greedy completion.
fn completion_pool(f: &Field) -> Vec<UtMatrix> {
    let mut pool = Vec::new();
    // full superdiagonal classes
    for s2 in f.nonzero_elements() {
        for s3 in f.nonzero_elements() {
            for c in f.elements() {
                let mut m = UtMatrix::identity(4, f);
                m.set(1, 2, f.one());
                m.set(2, 3, s2);
                m.set(3, 4, s3);
                m.set(2, 4, c);
                pool.push(m);
            }
        }
    }
    // a12 a23 != 0, a34 = 0 classes and anti
    for s in f.nonzero_elements() {
        for c in f.elements() {
            let mut m = UtMatrix::identity(4, f);
            m.set(1, 2, f.one());
            m.set(2, 3, s);
            m.set(2, 4, c);
            pool.push(m.phi(f));
            pool.push(m);
        }
    }
    // a12 != 0, a23 = a34 = 0 classes (c, mu) and anti
    for c in f.elements() {
        for mu in f.elements() {
            let mut m = UtMatrix::identity(4, f);
            m.set(1, 2, f.one());
            m.set(1, 3, mu);
            m.set(2, 4, c);
            pool.push(m.phi(f));
            pool.push(m);
        }
    }
    // N2 classes
    pool.extend(xn2_representatives(f));
    // the abelian complement block, all elements
    for a13 in f.elements() {
        for a14 in f.elements() {
            for a23 in f.elements() {
                for a24 in f.elements() {
                    let mut m = UtMatrix::identity(4, f);
                    m.set(1, 3, a13);
                    m.set(1, 4, a14);
                    m.set(2, 3, a23);
                    m.set(2, 4, a24);
                    pool.push(m);
                }
            }
        }
    }
    pool
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    All,
    A,
    B,
    S0,
    T1,
    Bounds,
}

impl std::str::FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Suite, String> {
        match s.to_ascii_lowercase().as_str() {
            "all" => Ok(Suite::All),
            "a" => Ok(Suite::A),
            "b" => Ok(Suite::B),
            "s0" => Ok(Suite::S0),
            "t1" => Ok(Suite::T1),
            "bounds" => Ok(Suite::Bounds),
            other => Err(format!("unknown suite `{other}`")),
        }
    }
}

/// Runs the selected checks over each field; resource refusals surface as
/// Skipped reports. Report order is fixed by (theorem id, q).
pub fn run_suite(
    suite: Suite,
    fields: &[Field],
    direct: bool,
    time_cap: Option<Duration>,
) -> Vec<TheoremReport> {
    let mut reports = Vec::new();
    let mut push = |res: Result<TheoremReport, VerifyError>, theorem: &str, f: &Field| {
        match res {
            Ok(rep) => reports.push(rep),
            Err(e) => reports.push(TheoremReport {
                theorem: theorem.into(),
                q: f.q(),
                modulus: modulus_text(f),
                computed: Value::Null,
                expected: Value::Null,
                provenance: "not run".into(),
                verdict: Verdict::Skipped(e.to_string()),
                asserted: false,
                seconds: 0.0,
            }),
        }
    };
    for f in fields {
        if matches!(suite, Suite::All | Suite::A) {
            let use_direct = direct && f.q() <= 3;
            push(verify_theorem_a(f, use_direct), "A", f);
        }
        if matches!(suite, Suite::All | Suite::B) {
            push(verify_theorem_b(f, time_cap), "B", f);
        }
        if matches!(suite, Suite::All | Suite::S0) {
            push(verify_s0(f, 3), "S0(n=3)", f);
            push(verify_s0(f, 4), "S0(n=4)", f);
        }
        if matches!(suite, Suite::All | Suite::T1) {
            push(verify_t1(f), "T1", f);
        }
        if matches!(suite, Suite::All | Suite::Bounds) {
            push(verify_lower_bounds_g4(f), "G4-lower-bound", f);
        }
    }
    reports.sort_by(|a, b| (a.theorem.clone(), a.q).cmp(&(b.theorem.clone(), b.q)));
    reports
}

/// One row per report: theorem, q, verdict, key numbers, seconds.
pub fn tsv_summary(reports: &[TheoremReport]) -> String {
    let mut out = String::from("theorem\tq\tmodulus\tverdict\tasserted\tcomputed\tseconds\n");
    for r in reports {
        let verdict = match &r.verdict {
            Verdict::Confirmed => "Confirmed".to_string(),
            Verdict::Refuted(w) => format!("Refuted ({w})"),
            Verdict::Skipped(w) => format!("Skipped ({w})"),
        };
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\t{}\t{:.3}\n",
            r.theorem,
            r.q,
            r.modulus,
            verdict,
            r.asserted,
            serde_json::to_string(&r.computed).unwrap_or_default(),
            r.seconds
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(q: &str) -> Field {
        Field::parse_descriptor(q).unwrap()
    }

    #[test]
    fn omega_m_small_fields() {
        assert_eq!(omega_m(&f("2"), None).omega, 2);
        assert_eq!(omega_m(&f("3"), None).omega, 6);
    }

    #[test]
    fn theorem_a_formula_q3() {
        let rep = verify_theorem_a(&f("3"), false).unwrap();
        assert_eq!(rep.computed["predicted_omega_uu4"], 37);
        assert_eq!(rep.verdict, Verdict::Confirmed);
        assert!(rep.asserted);
    }

    #[test]
    fn theorem_a_direct_q2_reports_finding() {
        // q = 2 is outside the supporting lemmas; the exhaustive value is
        // reported either way and never fails the suite
        let rep = verify_theorem_a(&f("2"), true).unwrap();
        assert!(!rep.asserted);
        assert!(!rep.fails_suite());
        let direct = rep.computed["direct_omega_uu4"].as_u64().unwrap();
        let predicted = rep.computed["predicted_omega_uu4"].as_u64().unwrap();
        assert_eq!(predicted, 13);
        assert!(direct <= predicted);
        println!(
            "direct omega(UU4(F_2)) = {direct}, formula predicts {predicted}, verdict {:?}",
            rep.verdict
        );
    }

    #[test]
    fn theorem_a_direct_too_large() {
        assert!(matches!(
            verify_theorem_a(&f("5"), true),
            Err(VerifyError::TooLarge(_))
        ));
    }

    #[test]
    fn theorem_b_q3() {
        let rep = verify_theorem_b(&f("3"), None).unwrap();
        assert_eq!(rep.verdict, Verdict::Confirmed);
        assert_eq!(rep.computed["omega_m"], 6);
        assert_eq!(rep.computed["part_count"], 6);
    }

    #[test]
    fn theorem_b_q4() {
        let rep = verify_theorem_b(&f("2^2"), None).unwrap();
        assert_eq!(rep.verdict, Verdict::Confirmed);
        let om = rep.computed["omega_m"].as_u64().unwrap();
        assert!((8..=12).contains(&om));
        assert_eq!(rep.computed["part_count"], 12);
    }

    #[test]
    fn s0_closed_form() {
        for (n, desc, expect) in [
            (3u8, "2", 1u64),
            (3, "3", 2),
            (3, "5", 4),
            (4, "2", 2),
            (4, "3", 12),
        ] {
            let rep = verify_s0(&f(desc), n).unwrap();
            assert_eq!(rep.verdict, Verdict::Confirmed, "n={n} q={desc}");
            assert_eq!(rep.computed["omega_s0"].as_u64().unwrap(), expect);
        }
    }

    #[test]
    fn t1_q2() {
        let rep = verify_t1(&f("2")).unwrap();
        assert_eq!(rep.verdict, Verdict::Confirmed);
        assert_eq!(rep.computed["omega_t1"], 5);
        assert_eq!(rep.computed["omega_t1_union_anti"], 9);
        assert_eq!(rep.computed["ac_group"], true);
    }

    #[test]
    fn suite_runs_and_summarizes() {
        let fields = vec![f("2"), f("3")];
        let reports = run_suite(Suite::S0, &fields, false, None);
        assert_eq!(reports.len(), 4);
        let tsv = tsv_summary(&reports);
        assert!(tsv.lines().count() == 5);
        assert!(tsv.contains("Confirmed"));
    }

    #[test]
    fn bounds_rejects_small_or_even() {
        assert!(matches!(
            verify_lower_bounds_g4(&f("3")),
            Err(VerifyError::UnsupportedField(_))
        ));
        assert!(matches!(
            verify_lower_bounds_g4(&f("2^3")),
            Err(VerifyError::UnsupportedField(_))
        ));
    }
}
