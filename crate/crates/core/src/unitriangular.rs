//! UU_n(F_q): unipotent upper-triangular matrices, the determinant-sum
//! commuting test, the anti-isomorphism on the anti-diagonal, centralizers
//! and centralizer-equality classes, and the superdiagonal conjugation form.

use crate::bits::Bits;
use crate::gf::{Field, FieldElement};
use thiserror::Error;

/// Group enumeration beyond this many elements is refused.
pub const MAX_GROUP_ORDER: u64 = 1 << 24;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum UtError {
    #[error("dimension must be between 1 and 8, got {0}")]
    DimensionTooLarge(u8),
    #[error("matrix has a zero superdiagonal entry at ({0},{1})")]
    ZeroSuperdiagonal(u8, u8),
    #[error("group of order {0} too large to enumerate")]
    GroupTooLarge(u64),
    #[error("bad matrix text: {0}")]
    BadText(String),
}

/// An n x n unipotent upper-triangular matrix: only the strict upper triangle
/// is stored, row-major, so entry (i,j) with 1 <= i < j <= n sits at
/// `off(i,j)`. The diagonal is implicitly 1 and below it implicitly 0.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct UtMatrix {
    n: u8,
    entries: Vec<FieldElement>,
}

/// Flat offset of entry (i, j), 1-based, i < j.
#[inline]
pub fn off(i: usize, j: usize, n: usize) -> usize {
    debug_assert!(1 <= i && i < j && j <= n);
    (i - 1) * (2 * n - i) / 2 + (j - i - 1)
}

pub fn entry_count(n: u8) -> usize {
    let n = n as usize;
    n * (n - 1) / 2
}

impl UtMatrix {
    pub fn identity(n: u8, f: &Field) -> UtMatrix {
        assert!((1..=8).contains(&n), "dimension out of range");
        UtMatrix {
            n,
            entries: vec![f.zero(); entry_count(n)],
        }
    }

    /// Builds from a full entry list in row-major strict-upper order.
    pub fn from_entries(n: u8, entries: Vec<FieldElement>) -> UtMatrix {
        assert_eq!(entries.len(), entry_count(n));
        UtMatrix { n, entries }
    }

    pub fn n(&self) -> u8 {
        self.n
    }

    pub fn entries(&self) -> &[FieldElement] {
        &self.entries
    }

    /// Entry (i, j), 1-based; i < j required.
    pub fn get(&self, i: usize, j: usize) -> FieldElement {
        self.entries[off(i, j, self.n as usize)]
    }

    pub fn set(&mut self, i: usize, j: usize, v: FieldElement) {
        self.entries[off(i, j, self.n as usize)] = v;
    }

    pub fn is_identity(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }

    pub fn superdiagonal(&self) -> Vec<FieldElement> {
        (1..self.n as usize).map(|i| self.get(i, i + 1)).collect()
    }

    pub fn has_nonzero_superdiagonal(&self) -> bool {
        self.superdiagonal().iter().all(|e| !e.is_zero())
    }

    pub fn mul(&self, other: &UtMatrix, f: &Field) -> UtMatrix {
        assert_eq!(self.n, other.n, "dimension mismatch");
        let n = self.n as usize;
        let mut out = UtMatrix::identity(self.n, f);
        for i in 1..=n {
            for j in (i + 1)..=n {
                let mut c = f.add(self.get(i, j), other.get(i, j));
                for k in (i + 1)..j {
                    c = f.add(c, f.mul(self.get(i, k), other.get(k, j)));
                }
                out.set(i, j, c);
            }
        }
        out
    }

    /// Inverse by back-substitution on the strict upper triangle.
    pub fn inverse(&self, f: &Field) -> UtMatrix {
        let n = self.n as usize;
        let mut out = UtMatrix::identity(self.n, f);
        for d in 1..n {
            for i in 1..=(n - d) {
                let j = i + d;
                let mut s = self.get(i, j);
                for k in (i + 1)..j {
                    s = f.add(s, f.mul(self.get(i, k), out.get(k, j)));
                }
                out.set(i, j, f.neg(s));
            }
        }
        out
    }

    /// Commuting test via the determinant sums: A and B commute iff for every
    /// i < j the sum of det [[a_ik, b_ik], [a_kj, b_kj]] over i < k < j is 0.
    pub fn commutes(&self, other: &UtMatrix, f: &Field) -> bool {
        assert_eq!(self.n, other.n, "dimension mismatch");
        let n = self.n as usize;
        for i in 1..=n {
            for j in (i + 2)..=n {
                let mut s = f.zero();
                for k in (i + 1)..j {
                    let t = f.sub(
                        f.mul(self.get(i, k), other.get(k, j)),
                        f.mul(other.get(i, k), self.get(k, j)),
                    );
                    s = f.add(s, t);
                }
                if !s.is_zero() {
                    return false;
                }
            }
        }
        true
    }

    /// The involutive anti-isomorphism: (phi A)_{ij} = a_{n-j+1, n-i+1}.
    pub fn phi(&self, f: &Field) -> UtMatrix {
        let n = self.n as usize;
        let mut out = UtMatrix::identity(self.n, f);
        for i in 1..=n {
            for j in (i + 1)..=n {
                out.set(i, j, self.get(n - j + 1, n - i + 1));
            }
        }
        out
    }

    /// `n;q;a12,a13,...` canonical text form.
    pub fn to_text(&self, f: &Field) -> String {
        let idxs: Vec<String> = self.entries.iter().map(|e| e.idx().to_string()).collect();
        format!("{};{};{}", self.n, f.q(), idxs.join(","))
    }

    pub fn from_text(s: &str, f: &Field) -> Result<UtMatrix, UtError> {
        let parts: Vec<&str> = s.trim().split(';').collect();
        if parts.len() != 3 {
            return Err(UtError::BadText("expected n;q;entries".into()));
        }
        let n: u8 = parts[0]
            .parse()
            .map_err(|_| UtError::BadText("bad dimension".into()))?;
        let q: u64 = parts[1]
            .parse()
            .map_err(|_| UtError::BadText("bad q".into()))?;
        if q != f.q() {
            return Err(UtError::BadText(format!(
                "field mismatch: text says q={q}, field has q={}",
                f.q()
            )));
        }
        if !(1..=8).contains(&n) {
            return Err(UtError::DimensionTooLarge(n));
        }
        let mut entries = Vec::new();
        if entry_count(n) > 0 {
            for tok in parts[2].split(',') {
                let idx: u64 = tok
                    .trim()
                    .parse()
                    .map_err(|_| UtError::BadText(format!("bad entry `{tok}`")))?;
                if idx >= f.q() {
                    return Err(UtError::BadText(format!("entry {idx} out of range")));
                }
                entries.push(f.elt(idx));
            }
        }
        if entries.len() != entry_count(n) {
            return Err(UtError::BadText(format!(
                "expected {} entries, got {}",
                entry_count(n),
                entries.len()
            )));
        }
        Ok(UtMatrix { n, entries })
    }
}

/// q^(n(n-1)/2), saturating so oversized requests fail the size guards
/// instead of overflowing.
pub fn group_order(n: u8, q: u64) -> u64 {
    q.checked_pow(entry_count(n) as u32).unwrap_or(u64::MAX)
}

/// All of UU_n(F_q) in lexicographic order of the entry index tuple
/// (a12 most significant). This fixed order gives reproducible vertex
/// numbering everywhere downstream.
pub fn enumerate_group(n: u8, f: &Field) -> Result<Vec<UtMatrix>, UtError> {
    if !(1..=8).contains(&n) {
        return Err(UtError::DimensionTooLarge(n));
    }
    let m = entry_count(n);
    let order = group_order(n, f.q());
    if order > MAX_GROUP_ORDER {
        return Err(UtError::GroupTooLarge(order));
    }
    let mut out = Vec::with_capacity(order as usize);
    for code in 0..order {
        let mut entries = vec![f.zero(); m];
        let mut c = code;
        for slot in (0..m).rev() {
            entries[slot] = f.elt(c % f.q());
            c /= f.q();
        }
        out.push(UtMatrix { n, entries });
    }
    Ok(out)
}

/// Lexicographic rank of a matrix within `enumerate_group`'s order.
pub fn group_rank(a: &UtMatrix, q: u64) -> u64 {
    let mut code = 0u64;
    for e in a.entries() {
        code = code * q + e.idx() as u64;
    }
    code
}

/// All elements of `ambient` commuting with `a`.
pub fn centralizer(a: &UtMatrix, ambient: &[UtMatrix], f: &Field) -> Vec<UtMatrix> {
    ambient
        .iter()
        .filter(|b| a.commutes(b, f))
        .cloned()
        .collect()
}

/// One class per distinct centralizer (as a subset of `ambient`), members
/// listed by their index into `items`. Classes are ordered by smallest
/// member index and the representative is that smallest member.
#[derive(Debug, Clone)]
pub struct CentralizerClass {
    pub class_id: usize,
    pub representative: UtMatrix,
    pub member_indices: Vec<usize>,
}

pub fn centralizer_classes(
    items: &[UtMatrix],
    ambient: &[UtMatrix],
    f: &Field,
) -> Vec<CentralizerClass> {
    use rayon::prelude::*;
    use std::collections::HashMap;
    let profiles: Vec<Bits> = items
        .par_iter()
        .map(|a| {
            let mut bits = Bits::new(ambient.len());
            for (j, b) in ambient.iter().enumerate() {
                if a.commutes(b, f) {
                    bits.set(j);
                }
            }
            bits
        })
        .collect();
    let mut class_of_profile: HashMap<&Bits, usize> = HashMap::new();
    let mut classes: Vec<CentralizerClass> = Vec::new();
    for (i, prof) in profiles.iter().enumerate() {
        match class_of_profile.get(prof) {
            Some(&cid) => classes[cid].member_indices.push(i),
            None => {
                let cid = classes.len();
                class_of_profile.insert(prof, cid);
                classes.push(CentralizerClass {
                    class_id: cid,
                    representative: items[i].clone(),
                    member_indices: vec![i],
                });
            }
        }
    }
    classes
}

/// For x with fully nonzero superdiagonal, returns (xtilde, u) where xtilde
/// keeps only the superdiagonal of x and u solves x u = u xtilde, so that
/// u^-1 x u = xtilde. The free column n of u is pinned to zero, which makes
/// the result the identity when x is already in superdiagonal form.
pub fn conjugate_to_superdiagonal_form(
    x: &UtMatrix,
    f: &Field,
) -> Result<(UtMatrix, UtMatrix), UtError> {
    let n = x.n() as usize;
    for i in 1..n {
        if x.get(i, i + 1).is_zero() {
            return Err(UtError::ZeroSuperdiagonal(i as u8, i as u8 + 1));
        }
    }
    let mut xt = UtMatrix::identity(x.n(), f);
    for i in 1..n {
        xt.set(i, i + 1, x.get(i, i + 1));
    }
    let mut u = UtMatrix::identity(x.n(), f);
    // Entry u_{a,b} is fixed by the (a, b+1) relation and needs column b+1
    // of u, so sweep columns right to left; column n stays zero.
    for b in (2..n).rev() {
        for a in 1..b {
            let mut s = x.get(a, b + 1);
            for k in (a + 1)..=b {
                s = f.add(s, f.mul(x.get(a, k), u.get(k, b + 1)));
            }
            let pivot = f.inv(x.get(b, b + 1)).expect("nonzero superdiagonal");
            u.set(a, b, f.mul(s, pivot));
        }
    }
    debug_assert_eq!(x.mul(&u, f), u.mul(&xt, f));
    Ok((xt, u))
}

/// Centralizer of xtilde parametrized by its first row: entries y_{ik} are
/// y_{1,k-i+1} times a ratio of superdiagonal products.
pub fn first_row_centralizer(xt: &UtMatrix, f: &Field) -> Result<Vec<UtMatrix>, UtError> {
    let n = xt.n() as usize;
    for i in 1..n {
        if xt.get(i, i + 1).is_zero() {
            return Err(UtError::ZeroSuperdiagonal(i as u8, i as u8 + 1));
        }
    }
    let count = f.q().pow((n - 1) as u32);
    let mut out = Vec::with_capacity(count as usize);
    for code in 0..count {
        let mut first_row = vec![f.zero(); n - 1]; // y_{1,2}..y_{1,n}
        let mut c = code;
        for slot in first_row.iter_mut() {
            *slot = f.elt(c % f.q());
            c /= f.q();
        }
        let mut y = UtMatrix::identity(xt.n(), f);
        for (j, &v) in first_row.iter().enumerate() {
            y.set(1, j + 2, v);
        }
        for i in 2..=n {
            for k in (i + 1)..=n {
                let mut ratio = f.one();
                for l in 0..(i - 1) {
                    let num = xt.get(k - 1 - l, k - l);
                    let den = xt.get(i - 1 - l, i - l);
                    ratio = f.mul(ratio, f.div(num, den).expect("nonzero superdiagonal"));
                }
                y.set(i, k, f.mul(first_row[k - i - 1], ratio));
            }
        }
        out.push(y);
    }
    Ok(out)
}

/// Confirms the abelian-centralizer property of x: every pair in the
/// centralizer of x within UU_n commutes, and the centralizer of the
/// conjugated superdiagonal form equals its first-row parametrization.
pub fn assert_abelian_centralizer(x: &UtMatrix, f: &Field) -> Result<bool, UtError> {
    let (xt, _) = conjugate_to_superdiagonal_form(x, f)?;
    let group = enumerate_group(x.n(), f)?;
    let cent = centralizer(x, &group, f);
    for (i, a) in cent.iter().enumerate() {
        for b in cent.iter().skip(i + 1) {
            if !a.commutes(b, f) {
                return Ok(false);
            }
        }
    }
    let parametrized = first_row_centralizer(&xt, f)?;
    let cent_t: std::collections::HashSet<UtMatrix> =
        centralizer(&xt, &group, f).into_iter().collect();
    let param_set: std::collections::HashSet<UtMatrix> = parametrized.into_iter().collect();
    Ok(cent_t == param_set)
}
