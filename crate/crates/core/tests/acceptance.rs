//! Acceptance gate: one test per numbered criterion, each printing a
//! PASS/FAIL line (run with `--nocapture` to see them).

use noncomm_core::clique::{build_graph, max_clique, reduce_by_classes};
use noncomm_core::gf::Field;
use noncomm_core::lines::{
    build_config_set, classify_line, construct_4line, enumerate_lines, gl2_act, LineClass, Mat2,
};
use noncomm_core::structures::{
    abelian_decomposition_m, cc, enumerate_structure, partition_uu4, Point3, StructureKind,
};
use noncomm_core::rng::SplitMix64;
use noncomm_core::unitriangular::{
    assert_abelian_centralizer, centralizer, enumerate_group, entry_count, UtMatrix,
};
use noncomm_core::verify::{
    omega_m, verify_lower_bounds_g4, verify_s0, verify_t1, verify_theorem_a, Verdict,
};
use std::time::Instant;

fn field(desc: &str) -> Field {
    Field::parse_descriptor(desc).unwrap()
}

fn pass(criterion: &str, detail: String) {
    println!("criterion {criterion}: PASS - {detail}");
}

struct FailOnDrop<'a>(&'a str, bool);

impl Drop for FailOnDrop<'_> {
    fn drop(&mut self) {
        if !self.1 {
            println!("criterion {}: FAIL", self.0);
        }
    }
}

#[test]
fn criterion_01_omega_m_q3() {
    let mut guard = FailOnDrop("1", false);
    let start = Instant::now();
    let f = field("3");
    let m = enumerate_structure(StructureKind::M, &f);
    assert_eq!(m.points.len(), 18);
    let g = build_graph(&m.points, |&a, &b| cc(&f, a, b));
    let res = max_clique(&g, None);
    assert!(res.exact);
    assert_eq!(res.omega, 6);
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 1.0, "took {elapsed:?}");
    guard.1 = true;
    pass("1", format!("omega(M) = 6 at q=3 in {elapsed:?}"));
}

#[test]
fn criterion_02_theorem_a_q3_reports_37() {
    let mut guard = FailOnDrop("2", false);
    let f = field("3");
    let rep = verify_theorem_a(&f, false).unwrap();
    let predicted = rep.computed["predicted_omega_uu4"].as_u64().unwrap();
    assert_eq!(predicted, 37);
    assert_eq!(rep.computed["omega_m"], 6);
    guard.1 = true;
    pass("2", format!("reported omega(UU4(F_3)) = {predicted}"));
}

#[test]
fn criterion_03_theorem_b_decomposition() {
    let mut guard = FailOnDrop("3", false);
    let start = Instant::now();
    for desc in ["2", "3", "2^2", "5", "7"] {
        let f = field(desc);
        let q = f.q() as usize;
        let parts = abelian_decomposition_m(&f);
        assert_eq!(parts.len(), q * (q - 1), "part count at q={q}");
        let m = enumerate_structure(StructureKind::M, &f);
        let mut seen = std::collections::HashSet::new();
        for part in &parts {
            assert_eq!(part.len(), q, "part size at q={q}");
            for &p in part {
                assert!(seen.insert(p), "disjointness at q={q}");
            }
            for (i, &a) in part.iter().enumerate() {
                for &b in part.iter().skip(i + 1) {
                    assert!(cc(&f, a, b), "abelian at q={q}");
                }
            }
            let inside: std::collections::HashSet<_> = part.iter().copied().collect();
            for &cand in &m.points {
                if !inside.contains(&cand) {
                    assert!(
                        !part.iter().all(|&pt| cc(&f, cand, pt)),
                        "non-extendability at q={q}"
                    );
                }
            }
        }
        assert_eq!(seen.len(), m.points.len(), "cover at q={q}");
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 10.0, "took {elapsed:?}");
    guard.1 = true;
    pass("3", format!("decompositions exact for q in {{2,3,4,5,7}} in {elapsed:?}"));
}

#[test]
fn criterion_04_centralizer_omega_q_plus_1() {
    let mut guard = FailOnDrop("4", false);
    for desc in ["3", "2^2", "5", "7"] {
        let f = field(desc);
        let m = enumerate_structure(StructureKind::M, &f);
        for mm in f.elements() {
            let p = Point3::new_m(mm, f.one(), f.zero());
            let cent: Vec<Point3> = m.points.iter().copied().filter(|&r| cc(&f, p, r)).collect();
            let g = build_graph(&cent, |&a, &b| cc(&f, a, b));
            let res = max_clique(&g, None);
            assert!(res.exact);
            assert_eq!(res.omega as u64, f.q() + 1, "q={} m={}", f.q(), mm.idx());
        }
    }
    guard.1 = true;
    pass("4", "omega(C(m,1,0)) = q+1 for all m, q in {3,4,5,7}".into());
}

#[test]
fn criterion_05_s0_closed_form() {
    let mut guard = FailOnDrop("5", false);
    let cases = [(3u8, "2", 1u64), (3, "3", 2), (3, "5", 4), (4, "2", 2), (4, "3", 12)];
    for (n, desc, expect) in cases {
        let rep = verify_s0(&field(desc), n).unwrap();
        assert_eq!(rep.verdict, Verdict::Confirmed, "n={n} q={desc}");
        assert_eq!(rep.computed["omega_s0"].as_u64().unwrap(), expect);
    }
    guard.1 = true;
    pass("5", "omega(S0) matches the closed form on all five instances".into());
}

#[test]
fn criterion_06_t1() {
    let mut guard = FailOnDrop("6", false);
    for desc in ["2", "3"] {
        let f = field(desc);
        let rep = verify_t1(&f).unwrap();
        let q = f.q();
        assert_eq!(rep.computed["ac_group"], true, "AC at q={q}");
        assert_eq!(rep.computed["omega_t1"].as_u64().unwrap(), q * q + 1);
        if q == 2 {
            assert_eq!(rep.computed["omega_t1_union_anti"].as_u64().unwrap(), 9);
        }
        assert_eq!(rep.verdict, Verdict::Confirmed);
    }
    guard.1 = true;
    pass("6", "T1 is AC with omega q^2+1; union with its anti-image reaches 2q^2+1".into());
}

#[test]
fn criterion_07_four_line_q7() {
    let mut guard = FailOnDrop("7", false);
    let f = field("7");
    let fl = construct_4line(&f, Some((f.elt(1), f.elt(2), f.elt(3)))).unwrap();
    assert_eq!(fl.b[3].idx(), 5);
    assert_eq!(fl.z[3].idx(), 6);
    assert_eq!(fl.x[3].idx(), 0);
    let printed: Vec<String> = fl.lines.iter().map(|l| l.to_text()).collect();
    assert_eq!(
        printed,
        vec!["5,1,5|1,1,0", "1,1,1|1,2,0", "4,1,4|1,3,0", "0,1,6|1,5,0"]
    );
    let set = build_config_set(&f, &fl.config).unwrap();
    assert!(set.len() >= 16, "built {} points", set.len());
    for (i, &a) in set.iter().enumerate() {
        for &b in set.iter().skip(i + 1) {
            assert!(!cc(&f, a, b));
        }
    }
    guard.1 = true;
    pass("7", format!("b4=5 z4=6 x4=0, lines verbatim, built size {}", set.len()));
}

#[test]
fn criterion_08_lower_bound_floors() {
    let mut guard = FailOnDrop("8", false);
    let mut failures: Vec<String> = Vec::new();
    for desc in ["5", "7"] {
        let f = field(desc);
        let q = f.q();
        let rep = verify_lower_bounds_g4(&f).unwrap();
        let achieved = rep.computed["achieved_size"].as_u64().unwrap();
        let floor = q.pow(3) + 3 * q + 1;
        println!(
            "  q={q}: assembled {achieved}, floor {floor}, exact omega(UU4) = {}",
            rep.computed["exact_omega_uu4"]
        );
        if achieved < floor {
            failures.push(format!(
                "q={q}: assembled {achieved} < floor {floor}{}",
                rep.computed["exact_omega_uu4"]
                    .as_u64()
                    .map(|w| format!(" (unattainable: exact omega(UU4(F_{q})) = {w})"))
                    .unwrap_or_default()
            ));
        }
        if q == 7 {
            let extra = q.pow(3) + 4 * q - 11;
            if achieved < extra {
                failures.push(format!("q=7: assembled {achieved} < four-line floor {extra}"));
            }
        }
    }
    assert!(failures.is_empty(), "{}", failures.join("; "));
    guard.1 = true;
    pass("8", "assembled sets reach the stated floors at q = 5 and 7".into());
}

#[test]
fn criterion_09_property_suites() {
    let mut guard = FailOnDrop("9", false);
    // commutes <=> product equality: exhaustive UU_4(F_2)
    let f2 = field("2");
    let g4_2 = enumerate_group(4, &f2).unwrap();
    for a in &g4_2 {
        for b in &g4_2 {
            assert_eq!(a.commutes(b, &f2), a.mul(b, &f2) == b.mul(a, &f2));
        }
    }
    // ... and 10^4 random pairs over UU_4(F_3)
    let f3 = field("3");
    let mut rng = SplitMix64::new(90210);
    let rand_mat = |fld: &Field, rng: &mut SplitMix64| {
        let entries = (0..entry_count(4)).map(|_| fld.elt(rng.below(fld.q()))).collect();
        UtMatrix::from_entries(4, entries)
    };
    for _ in 0..10_000 {
        let a = rand_mat(&f3, &mut rng);
        let b = rand_mat(&f3, &mut rng);
        assert_eq!(a.commutes(&b, &f3), a.mul(&b, &f3) == b.mul(&a, &f3));
    }
    // centralizer size q^(n-1), exhaustive for (4,2) and (4,3)
    for desc in ["2", "3"] {
        let f = field(desc);
        let group = enumerate_group(4, &f).unwrap();
        let expect = f.q().pow(3) as usize;
        for a in &group {
            if a.has_nonzero_superdiagonal() {
                assert_eq!(centralizer(a, &group, &f).len(), expect);
            }
        }
    }
    // phi anti-isomorphism identities on 10^4 random pairs
    for _ in 0..10_000 {
        let a = rand_mat(&f3, &mut rng);
        let b = rand_mat(&f3, &mut rng);
        assert_eq!(a.mul(&b, &f3).phi(&f3), b.phi(&f3).mul(&a.phi(&f3), &f3));
        assert_eq!(a.phi(&f3).phi(&f3), a);
    }
    // GL2 action preserves the commuting condition, exhaustive q=2
    let qpts = enumerate_structure(StructureKind::Q, &f2).points;
    for code in 0..16u32 {
        let m = Mat2 {
            a: f2.elt((code & 1) as u64),
            b: f2.elt(((code >> 1) & 1) as u64),
            c: f2.elt(((code >> 2) & 1) as u64),
            d: f2.elt(((code >> 3) & 1) as u64),
        };
        if m.det(&f2).is_zero() {
            continue;
        }
        for &p in &qpts {
            for &r in &qpts {
                let fp = gl2_act(&f2, &m, p).unwrap();
                let fr = gl2_act(&f2, &m, r).unwrap();
                assert_eq!(cc(&f2, p, r), cc(&f2, fp, fr));
            }
        }
    }
    // class reduction preserves omega on every q=2 instance
    let part = partition_uu4(&f2).unwrap();
    let t1: Vec<UtMatrix> = g4_2.iter().filter(|a| a.get(3, 4).is_zero()).cloned().collect();
    let s0: Vec<UtMatrix> = g4_2
        .iter()
        .filter(|a| a.has_nonzero_superdiagonal())
        .cloned()
        .collect();
    for (name, items) in [
        ("N0", &part.n0),
        ("N2", &part.n2),
        ("T1", &t1),
        ("S0", &s0),
    ] {
        let full = max_clique(&build_graph(items, |a, b| a.commutes(b, &f2)), None).omega;
        let red = reduce_by_classes(items, &g4_2, |a, b| a.commutes(b, &f2));
        let reps: Vec<UtMatrix> = red.representatives.iter().map(|&i| items[i].clone()).collect();
        let reduced = max_clique(&build_graph(&reps, |a, b| a.commutes(b, &f2)), None).omega;
        assert_eq!(full, reduced, "reduction must preserve omega on {name}");
    }
    // abelian centralizers for sampled fully-nonzero-superdiagonal x
    for (n, desc, samples) in [(4u8, "2", 64u64), (4, "3", 32), (5, "2", 32)] {
        let f = field(desc);
        let mut rng = SplitMix64::new(7 + n as u64);
        for _ in 0..samples {
            let mut x = UtMatrix::identity(n, &f);
            for i in 1..n as usize {
                x.set(i, i + 1, f.elt(1 + rng.below(f.q() - 1)));
            }
            for i in 1..=n as usize {
                for j in (i + 2)..=n as usize {
                    x.set(i, j, f.elt(rng.below(f.q())));
                }
            }
            assert_eq!(assert_abelian_centralizer(&x, &f), Ok(true), "(n={n}, q={desc})");
        }
    }
    guard.1 = true;
    pass("9", "all six property suites hold".into());
}

#[test]
fn criterion_10_line_census() {
    let mut guard = FailOnDrop("10", false);
    for desc in ["2", "3"] {
        let f = field(desc);
        let q = f.q();
        let all = enumerate_lines(&f);
        let commuting = all
            .iter()
            .filter(|l| classify_line(&f, l) == LineClass::Commuting)
            .count() as u64;
        let noncommuting = all.len() as u64 - commuting;
        assert_eq!(commuting, (q + 1) * q * q, "commuting count at q={q}");
        assert_eq!(noncommuting, q.pow(4), "non-commuting count at q={q}");
    }
    guard.1 = true;
    pass("10", "q^4 non-commuting and (q+1)q^2 commuting lines at q = 2, 3".into());
}

/// Exhaustive findings that the suite reports but does not assert, because
/// the supporting hypotheses exclude these instances: the omega formula for
/// UU_4 versus exhaustive search at q = 2 and q = 3.
#[test]
fn finding_direct_omega_vs_formula() {
    let f2 = field("2");
    let rep2 = verify_theorem_a(&f2, true).unwrap();
    println!(
        "finding: q=2 exhaustive omega(UU4) = {} vs formula {} -> {:?}",
        rep2.computed["direct_omega_uu4"], rep2.computed["predicted_omega_uu4"], rep2.verdict
    );
    let f3 = field("3");
    let rep3 = verify_theorem_a(&f3, true).unwrap();
    println!(
        "finding: q=3 exhaustive omega(UU4) = {} vs formula {} -> {:?}",
        rep3.computed["direct_omega_uu4"], rep3.computed["predicted_omega_uu4"], rep3.verdict
    );
    // the computed values themselves are frozen; the discrepancy is the finding
    assert_eq!(rep2.computed["direct_omega_uu4"], 11);
    assert_eq!(rep3.computed["direct_omega_uu4"], 32);
}

/// omega(M) at q=3 double-checked by blunt subset enumeration, independent
/// of the branch-and-bound path.
#[test]
fn oracle_omega_m_q3_brute_force() {
    let f = field("3");
    let m = enumerate_structure(StructureKind::M, &f);
    let g = build_graph(&m.points, |&a, &b| cc(&f, a, b));
    let mut best = 0usize;
    for mask in 0u32..(1 << 18) {
        let vs: Vec<usize> = (0..18).filter(|&v| (mask >> v) & 1 == 1).collect();
        if vs.len() > best && g.is_clique(&vs) {
            best = vs.len();
        }
    }
    assert_eq!(best, 6);
    assert_eq!(omega_m(&f, None).omega, 6);
}
