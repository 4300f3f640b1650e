//! The non-commuting point structures M, Q and N, the N0..N3 / T1 / T4
//! partition of UU_4(F_q), centralizer geometry inside M, abelian
//! decompositions and the bijection between N2 classes and M.
//!
//! Commuting condition on M and Q: det [[x1,y1],[x2,y2]] = z1 - z2.
//! On N (pairs (x,y), y != 0, stored with z = 0): det = x1 - x2.

use crate::gf::{Field, FieldElement};
use crate::unitriangular::{enumerate_group, UtMatrix};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum StructError {
    #[error("field too small: q = {0}")]
    FieldTooSmall(u64),
    #[error("point not in structure")]
    NotInStructure,
    #[error("group enumeration failed: {0}")]
    Group(#[from] crate::unitriangular::UtError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StructureKind {
    M,
    Q,
    N,
}

/// A point of one of the non-commuting structures. For kind N the z field is
/// a dead slot pinned to zero so one relation dispatcher covers all kinds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Point3 {
    pub x: FieldElement,
    pub y: FieldElement,
    pub z: FieldElement,
    pub kind: StructureKind,
}

impl Point3 {
    pub fn new_m(x: FieldElement, y: FieldElement, z: FieldElement) -> Point3 {
        assert!(!y.is_zero(), "M requires y != 0");
        Point3 {
            x,
            y,
            z,
            kind: StructureKind::M,
        }
    }

    pub fn new_q(x: FieldElement, y: FieldElement, z: FieldElement) -> Point3 {
        Point3 {
            x,
            y,
            z,
            kind: StructureKind::Q,
        }
    }

    pub fn new_n(x: FieldElement, y: FieldElement, f: &Field) -> Point3 {
        assert!(!y.is_zero(), "N requires y != 0");
        Point3 {
            x,
            y,
            z: f.zero(),
            kind: StructureKind::N,
        }
    }

    /// `x,y,z` canonical index text form.
    pub fn to_text(&self) -> String {
        format!("{},{},{}", self.x.idx(), self.y.idx(), self.z.idx())
    }
}

/// Commuting condition; true means the two points commute.
pub fn cc(f: &Field, p1: Point3, p2: Point3) -> bool {
    assert_eq!(p1.kind, p2.kind, "mixed structure kinds");
    let det = f.sub(f.mul(p1.x, p2.y), f.mul(p1.y, p2.x));
    match p1.kind {
        StructureKind::M | StructureKind::Q => det == f.sub(p1.z, p2.z),
        StructureKind::N => det == f.sub(p1.x, p2.x),
    }
}

/// An enumerated structure over a fixed field.
#[derive(Debug, Clone)]
pub struct NcStructure {
    pub kind: StructureKind,
    pub points: Vec<Point3>,
}

/// Enumerates a structure in lexicographic (x, y, z) canonical-index order.
pub fn enumerate_structure(kind: StructureKind, f: &Field) -> NcStructure {
    let mut points = Vec::new();
    match kind {
        StructureKind::M => {
            for x in f.elements() {
                for y in f.nonzero_elements() {
                    for z in f.elements() {
                        points.push(Point3::new_m(x, y, z));
                    }
                }
            }
        }
        StructureKind::Q => {
            for x in f.elements() {
                for y in f.elements() {
                    for z in f.elements() {
                        points.push(Point3::new_q(x, y, z));
                    }
                }
            }
        }
        StructureKind::N => {
            for x in f.elements() {
                for y in f.nonzero_elements() {
                    points.push(Point3::new_n(x, y, f));
                }
            }
        }
    }
    NcStructure { kind, points }
}

/// All points of S commuting with p (the centralizer of p inside S).
pub fn centralizer_of(f: &Field, p: Point3, s: &NcStructure) -> Vec<Point3> {
    s.points.iter().copied().filter(|&q| cc(f, p, q)).collect()
}

/// The commuting-preserving bijection from the centralizer of a point of M
/// onto the structure N, routed through C(m,1,0).
///
/// For p = (x1,y1,z1) with x1 != 0 the route uses m = x1*y1 and
/// (X,Y,Z) -> (X*y1, Y/y1, Z-z1) into C(m,1,0); for x1 = 0 it uses
/// (X,Y,Z) -> (X, Y/y1, X) into C(0,1,0). Both then apply
/// (m*y+z, y, z) -> (z, y) into N.
#[derive(Debug, Clone, Copy)]
pub struct CentralizerIso {
    y1: FieldElement,
    z1: FieldElement,
    x1_is_zero: bool,
}

pub fn iso_centralizer_to_n(p: Point3) -> CentralizerIso {
    assert_eq!(p.kind, StructureKind::M);
    CentralizerIso {
        y1: p.y,
        z1: p.z,
        x1_is_zero: p.x.is_zero(),
    }
}

impl CentralizerIso {
    pub fn apply(&self, f: &Field, pt: Point3) -> Point3 {
        let y = f.div(pt.y, self.y1).expect("y1 != 0 in M");
        if self.x1_is_zero {
            // (X, Y, Z) in C(0,y1,z1) has X = (Z - z1)/y1; lands on (X, y, X)
            // in C(0,1,0) and then on (X, y) in N.
            Point3::new_n(pt.x, y, f)
        } else {
            let z = f.sub(pt.z, self.z1);
            Point3::new_n(z, y, f)
        }
    }
}

/// The q(q-1) disjoint non-extendable abelian sets {(x+c, a, a x) : x in F_q}
/// indexed by a in F_q*, c in F_q, covering all of M.
pub fn abelian_decomposition_m(f: &Field) -> Vec<Vec<Point3>> {
    let mut parts = Vec::new();
    for a in f.nonzero_elements() {
        for c in f.elements() {
            let part = f
                .elements()
                .map(|x| Point3::new_m(f.add(x, c), a, f.mul(a, x)))
                .collect();
            parts.push(part);
        }
    }
    parts
}

/// A pairwise non-commuting set of 2q points in M, for q >= 3:
/// the line {(z,y,z)}, the points (m+1,1,1) for m != 1/y - 1, and
/// (1/y - 1, 1, 0), with y the smallest canonical index outside {0, 1}.
pub fn construct_2q_set_m(f: &Field) -> Result<Vec<Point3>, StructError> {
    if f.q() == 2 {
        return Err(StructError::FieldTooSmall(2));
    }
    let y = f.elt(2);
    let special = f.sub(f.inv(y).unwrap(), f.one()); // 1/y - 1
    let mut out = Vec::with_capacity(2 * f.q() as usize);
    for z in f.elements() {
        out.push(Point3::new_m(z, y, z));
    }
    for m in f.elements() {
        if m != special {
            out.push(Point3::new_m(f.add(m, f.one()), f.one(), f.one()));
        }
    }
    out.push(Point3::new_m(special, f.one(), f.zero()));
    Ok(out)
}

/// A pairwise non-commuting set of q+1 points inside C(m,1,0):
/// {(m y + z, y, z) : z in F_q} for a fixed y outside {0,1}, plus (m+1,1,1).
pub fn construct_q_plus_1_in_centralizer(
    f: &Field,
    m: FieldElement,
) -> Result<Vec<Point3>, StructError> {
    if f.q() < 3 {
        return Err(StructError::FieldTooSmall(f.q()));
    }
    let y = f.elt(2);
    let mut out = Vec::with_capacity(f.q() as usize + 1);
    for z in f.elements() {
        out.push(Point3::new_m(f.add(f.mul(m, y), z), y, z));
    }
    out.push(Point3::new_m(f.add(m, f.one()), f.one(), f.one()));
    Ok(out)
}

/// Membership test for the centralizer C(m,1,0) in M.
pub fn in_centralizer_m10(f: &Field, m: FieldElement, p: Point3) -> bool {
    // x*1 - y*m = z - 0
    f.sub(p.x, f.mul(p.y, m)) == p.z
}

/// The zero-pattern partition of UU_4(F_q): parts N0..N3 and their phi
/// images by the zero pattern of (a12, a23, a34), plus the abelian
/// complement T4 = {a12 = a34 = 0}.
#[derive(Debug, Clone)]
pub struct Partition4 {
    pub n0: Vec<UtMatrix>,
    pub n1: Vec<UtMatrix>,
    pub n1_anti: Vec<UtMatrix>,
    pub n2: Vec<UtMatrix>,
    pub n3: Vec<UtMatrix>,
    pub n3_anti: Vec<UtMatrix>,
    pub t4: Vec<UtMatrix>,
}

impl Partition4 {
    pub fn complement_of_t4_size(&self) -> usize {
        self.n0.len()
            + self.n1.len()
            + self.n1_anti.len()
            + self.n2.len()
            + self.n3.len()
            + self.n3_anti.len()
    }
}

pub fn partition_uu4(f: &Field) -> Result<Partition4, StructError> {
    let group = enumerate_group(4, f)?;
    let mut p = Partition4 {
        n0: vec![],
        n1: vec![],
        n1_anti: vec![],
        n2: vec![],
        n3: vec![],
        n3_anti: vec![],
        t4: vec![],
    };
    for a in group {
        let s12 = !a.get(1, 2).is_zero();
        let s23 = !a.get(2, 3).is_zero();
        let s34 = !a.get(3, 4).is_zero();
        match (s12, s23, s34) {
            (true, true, true) => p.n0.push(a),
            (true, true, false) => p.n1.push(a),
            (false, true, true) => p.n1_anti.push(a),
            (true, false, true) => p.n2.push(a),
            (true, false, false) => p.n3.push(a),
            (false, false, true) => p.n3_anti.push(a),
            (false, _, false) => p.t4.push(a),
        }
    }
    Ok(p)
}

/// The complete representative set for the centralizer classes of N2:
/// matrices with a12 = 1, a14 = 0, a23 = 0 and a34 != 0, enumerated in
/// (a13, a24, a34) canonical order.
pub fn xn2_representatives(f: &Field) -> Vec<UtMatrix> {
    let mut out = Vec::new();
    for x13 in f.elements() {
        for x24 in f.elements() {
            for x34 in f.nonzero_elements() {
                let mut m = UtMatrix::identity(4, f);
                m.set(1, 2, f.one());
                m.set(1, 3, x13);
                m.set(2, 4, x24);
                m.set(3, 4, x34);
                out.push(m);
            }
        }
    }
    out
}

/// The bijection from X_N2 representatives to M: (a13, a24, a34) -> point
/// (x, y, z) = (a13, a34, a24).
pub fn psi(m: &UtMatrix) -> Point3 {
    debug_assert_eq!(m.n(), 4);
    debug_assert_eq!(m.get(1, 2).idx(), 1);
    debug_assert!(m.get(2, 3).is_zero());
    debug_assert!(m.get(1, 4).is_zero());
    Point3::new_m(m.get(1, 3), m.get(3, 4), m.get(2, 4))
}

/// Inverse of `psi`: the canonical N2-class representative of an M point.
pub fn psi_inverse(f: &Field, p: Point3) -> UtMatrix {
    assert_eq!(p.kind, StructureKind::M);
    let mut m = UtMatrix::identity(4, f);
    m.set(1, 2, f.one());
    m.set(1, 3, p.x);
    m.set(2, 4, p.z);
    m.set(3, 4, p.y);
    m
}

/// True when every unordered pair of distinct points fails to commute.
pub fn is_pairwise_noncommuting(f: &Field, pts: &[Point3]) -> bool {
    for (i, &a) in pts.iter().enumerate() {
        for &b in pts.iter().skip(i + 1) {
            if a == b || cc(f, a, b) {
                return false;
            }
        }
    }
    true
}
