//! Exact arithmetic in GF(q) for q = p^r.
//!
//! Prime fields use direct modular arithmetic; extension fields use
//! precomputed log/antilog tables over a monic irreducible modulus.
//! Elements are canonical indices in `[0, q)`: for a prime field the index
//! is the integer itself, for an extension field the polynomial coefficients
//! read as a base-p integer (constant term = least significant digit).

use serde::Serialize;
use thiserror::Error;

/// Hard cap on field size; keeps the log/antilog tables under 16 MiB.
pub const MAX_Q: u64 = 1 << 20;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GfError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("modulus is not irreducible over F_{0}")]
    NotIrreducible(u64),
    #[error("field too large: q = {0} exceeds 2^20")]
    FieldTooLarge(u64),
    #[error("invalid modulus: {0}")]
    InvalidModulus(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("invalid field descriptor `{0}`")]
    BadDescriptor(String),
}

/// An element of a specific field, identified by canonical index.
///
/// The owning field's fingerprint travels with the element so that mixing
/// elements of different fields is caught at the operation site.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct FieldElement {
    idx: u32,
    field: u64,
}

impl FieldElement {
    pub fn idx(&self) -> u32 {
        self.idx
    }

    pub fn is_zero(&self) -> bool {
        self.idx == 0
    }

    pub fn field_fingerprint(&self) -> u64 {
        self.field
    }
}

struct Tables {
    /// exp[i] = g^i for the chosen generator g, i in 0..q-1.
    exp: Vec<u32>,
    /// log[exp[i]] = i; log[0] is a sentinel and never read.
    log: Vec<u32>,
}

/// The defining data of F_q = F_{p^r} plus (for r > 1) its arithmetic tables.
pub struct Field {
    p: u64,
    r: u32,
    q: u64,
    /// Monic modulus of degree r, coefficient list constant-term first.
    modulus: Vec<u64>,
    fingerprint: u64,
    tables: Option<Tables>,
}

impl std::fmt::Debug for Field {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Field({})", self.descriptor())
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

// ---- dense polynomial helpers over F_p, coefficient lists constant-first ----

fn poly_trim(a: &mut Vec<u64>) {
    while a.len() > 1 && *a.last().unwrap() == 0 {
        a.pop();
    }
}

fn poly_deg(a: &[u64]) -> usize {
    let mut d = a.len() - 1;
    while d > 0 && a[d] == 0 {
        d -= 1;
    }
    d
}

fn poly_is_zero(a: &[u64]) -> bool {
    a.iter().all(|&c| c == 0)
}

fn poly_mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + ai * bj) % p;
        }
    }
    poly_trim(&mut out);
    out
}

/// Remainder of `a` modulo monic `m`.
fn poly_rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    let dm = poly_deg(m);
    let mut rem = a.to_vec();
    poly_trim(&mut rem);
    while poly_deg(&rem) >= dm && !poly_is_zero(&rem) {
        let dr = poly_deg(&rem);
        let lead = rem[dr];
        if lead != 0 {
            let shift = dr - dm;
            for k in 0..=dm {
                let sub = (lead * m[k]) % p;
                rem[k + shift] = (rem[k + shift] + p * p - sub) % p;
            }
        }
        poly_trim(&mut rem);
        if dr == 0 {
            break;
        }
    }
    poly_trim(&mut rem);
    rem
}

fn poly_gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    poly_trim(&mut x);
    poly_trim(&mut y);
    while !poly_is_zero(&y) {
        let r = poly_rem(&x, &y, p);
        x = y;
        y = r;
    }
    x
}

/// x^(p^k) mod m, by k-fold p-th powering.
fn poly_frobenius_power(m: &[u64], p: u64, k: u32) -> Vec<u64> {
    let mut cur = vec![0, 1]; // x
    for _ in 0..k {
        // cur = cur^p mod m, square-and-multiply on the exponent p
        let mut acc = vec![1u64];
        let mut base = cur.clone();
        let mut e = p;
        while e > 0 {
            if e & 1 == 1 {
                acc = poly_rem(&poly_mul(&acc, &base, p), m, p);
            }
            base = poly_rem(&poly_mul(&base, &base, p), m, p);
            e >>= 1;
        }
        cur = acc;
    }
    cur
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
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

/// Irreducibility of a monic polynomial of degree r over F_p.
///
/// For r <= 4 this is an exhaustive trial division by every monic polynomial
/// of degree 1..=r/2; above that it is the gcd test with x^(p^k) - x.
fn poly_is_irreducible(m: &[u64], p: u64) -> bool {
    let r = poly_deg(m);
    if r == 0 {
        return false;
    }
    if r == 1 {
        return true;
    }
    if r <= 4 {
        for d in 1..=(r / 2) {
            // all monic polynomials of degree d: p^d of them
            let count = p.pow(d as u32);
            for code in 0..count {
                let mut cand = vec![0u64; d + 1];
                let mut c = code;
                for coeff in cand.iter_mut().take(d) {
                    *coeff = c % p;
                    c /= p;
                }
                cand[d] = 1;
                if poly_is_zero(&poly_rem(m, &cand, p)) {
                    return false;
                }
            }
        }
        true
    } else {
        // Rabin: x^(p^r) == x mod m, and gcd(x^(p^(r/t)) - x, m) = 1
        // for every prime t | r.
        let r = r as u32;
        let xpr = poly_frobenius_power(m, p, r);
        let mut diff = xpr;
        if diff.len() < 2 {
            diff.resize(2, 0);
        }
        diff[1] = (diff[1] + p - 1) % p;
        poly_trim(&mut diff);
        if !poly_is_zero(&diff) {
            return false;
        }
        for t in prime_factors(r as u64) {
            let k = r / t as u32;
            let mut g = poly_frobenius_power(m, p, k);
            if g.len() < 2 {
                g.resize(2, 0);
            }
            g[1] = (g[1] + p - 1) % p;
            poly_trim(&mut g);
            let gcd = poly_gcd(m, &g, p);
            if poly_deg(&gcd) > 0 {
                return false;
            }
        }
        true
    }
}

fn fingerprint_of(p: u64, r: u32, modulus: &[u64]) -> u64 {
    // FNV-1a over the defining data; identical fields get identical prints.
    let mut h: u64 = 0xcbf29ce484222325;
    let mut eat = |v: u64| {
        for b in v.to_le_bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x100000001b3);
        }
    };
    eat(p);
    eat(r as u64);
    for &c in modulus {
        eat(c);
    }
    h
}

impl Field {
    /// Builds F_{p^r}. With `modulus: None` and r > 1, the lexicographically
    /// smallest monic irreducible of degree r is selected (coefficients
    /// compared constant-term first), so construction is deterministic.
    pub fn new(p: u64, r: u32, modulus: Option<Vec<u64>>) -> Result<Field, GfError> {
        if !is_prime(p) {
            return Err(GfError::NotPrime(p));
        }
        if r < 1 {
            return Err(GfError::InvalidModulus("degree must be >= 1".into()));
        }
        let mut q: u64 = 1;
        for _ in 0..r {
            q = q.saturating_mul(p);
            if q > MAX_Q {
                return Err(GfError::FieldTooLarge(q));
            }
        }
        let modulus = match modulus {
            Some(m) => {
                if m.len() != r as usize + 1 {
                    return Err(GfError::InvalidModulus(format!(
                        "expected {} coefficients, got {}",
                        r + 1,
                        m.len()
                    )));
                }
                if m[r as usize] != 1 {
                    return Err(GfError::InvalidModulus("modulus must be monic".into()));
                }
                if m.iter().any(|&c| c >= p) {
                    return Err(GfError::InvalidModulus(format!(
                        "coefficients must lie in [0, {p})"
                    )));
                }
                if r > 1 && !poly_is_irreducible(&m, p) {
                    return Err(GfError::NotIrreducible(p));
                }
                m
            }
            None => {
                if r == 1 {
                    vec![0, 1] // x
                } else {
                    Self::smallest_irreducible(p, r)
                }
            }
        };
        let fingerprint = fingerprint_of(p, r, &modulus);
        let tables = if r > 1 {
            Some(Self::build_tables(p, r, q, &modulus))
        } else {
            None
        };
        Ok(Field {
            p,
            r,
            q,
            modulus,
            fingerprint,
            tables,
        })
    }

    /// Lexicographically smallest monic irreducible of degree r over F_p,
    /// comparing coefficient lists constant-term first.
    fn smallest_irreducible(p: u64, r: u32) -> Vec<u64> {
        let total = p.pow(r);
        for code in 0..total {
            // digit 0 of `code` is the most significant comparison position,
            // i.e. the constant term.
            let mut cand = vec![0u64; r as usize + 1];
            let mut c = code;
            for i in (0..r as usize).rev() {
                cand[i] = c % p;
                c /= p;
            }
            cand[r as usize] = 1;
            if poly_is_irreducible(&cand, p) {
                return cand;
            }
        }
        unreachable!("an irreducible of every degree exists over F_p")
    }

    fn idx_to_poly(idx: u64, p: u64, r: u32) -> Vec<u64> {
        let mut out = vec![0u64; r as usize];
        let mut v = idx;
        for digit in out.iter_mut() {
            *digit = v % p;
            v /= p;
        }
        out
    }

    fn poly_to_idx(poly: &[u64], p: u64) -> u64 {
        let mut out = 0u64;
        for &c in poly.iter().rev() {
            out = out * p + c;
        }
        out
    }

    fn build_tables(p: u64, r: u32, q: u64, modulus: &[u64]) -> Tables {
        let order = q - 1;
        let mut exp = vec![0u32; order as usize];
        let mut log = vec![u32::MAX; q as usize];
        // Smallest-index generator of the multiplicative group; deterministic.
        'cand: for g_idx in 2..q {
            let g = Self::idx_to_poly(g_idx, p, r);
            let mut cur = vec![1u64];
            for i in 0..order {
                let cur_idx = Self::poly_to_idx(&cur, p);
                if cur_idx == 1 && i > 0 {
                    continue 'cand; // order divides i < q-1
                }
                exp[i as usize] = cur_idx as u32;
                cur = poly_rem(&poly_mul(&cur, &g, p), modulus, p);
            }
            if Self::poly_to_idx(&cur, p) == 1 {
                for (i, &e) in exp.iter().enumerate() {
                    log[e as usize] = i as u32;
                }
                return Tables { exp, log };
            }
        }
        unreachable!("F_q* is cyclic")
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn characteristic(&self) -> u64 {
        self.p
    }

    /// Coefficient list of the modulus, constant term first.
    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    pub fn fingerprint(&self) -> u64 {
        self.fingerprint
    }

    /// `p^r[:modulus-hex]` descriptor; the hex is the coefficient list read
    /// as a base-p integer. Prime fields print as plain `p`.
    pub fn descriptor(&self) -> String {
        if self.r == 1 {
            format!("{}", self.p)
        } else {
            format!("{}^{}:{:x}", self.p, self.r, Self::poly_to_idx(&self.modulus, self.p))
        }
    }

    /// Parses `p`, `p^r` or `p^r:modulus-hex`.
    pub fn parse_descriptor(s: &str) -> Result<Field, GfError> {
        let bad = || GfError::BadDescriptor(s.to_string());
        let (pr, modhex) = match s.split_once(':') {
            Some((a, b)) => (a, Some(b)),
            None => (s, None),
        };
        let (p_str, r_str) = match pr.split_once('^') {
            Some((a, b)) => (a, b),
            None => (pr, "1"),
        };
        let p: u64 = p_str.trim().parse().map_err(|_| bad())?;
        let r: u32 = r_str.trim().parse().map_err(|_| bad())?;
        let modulus = match modhex {
            None => None,
            Some(h) => {
                let enc = u64::from_str_radix(h.trim(), 16).map_err(|_| bad())?;
                let mut coeffs = Vec::new();
                let mut v = enc;
                while v > 0 {
                    coeffs.push(v % p);
                    v /= p;
                }
                if coeffs.is_empty() {
                    return Err(bad());
                }
                Some(coeffs)
            }
        };
        Field::new(p, r, modulus)
    }

    /// Element from canonical index. Panics if out of range.
    pub fn elt(&self, idx: u64) -> FieldElement {
        assert!(idx < self.q, "index {idx} out of range for q = {}", self.q);
        FieldElement {
            idx: idx as u32,
            field: self.fingerprint,
        }
    }

    /// Embeds an integer via the prime subfield (reduction mod p).
    pub fn from_int(&self, v: i64) -> FieldElement {
        let p = self.p as i64;
        let m = ((v % p) + p) % p;
        self.elt(m as u64)
    }

    pub fn zero(&self) -> FieldElement {
        self.elt(0)
    }

    pub fn one(&self) -> FieldElement {
        self.elt(1)
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElement> + '_ {
        (0..self.q).map(move |i| self.elt(i))
    }

    pub fn nonzero_elements(&self) -> impl Iterator<Item = FieldElement> + '_ {
        (1..self.q).map(move |i| self.elt(i))
    }

    fn own(&self, a: FieldElement) -> u64 {
        assert_eq!(
            a.field, self.fingerprint,
            "mixed fields: element of another field passed to {}",
            self.descriptor()
        );
        a.idx as u64
    }

    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        let (x, y) = (self.own(a), self.own(b));
        if self.r == 1 {
            return self.elt((x + y) % self.p);
        }
        if self.p == 2 {
            return self.elt(x ^ y);
        }
        let mut out = 0u64;
        let mut mult = 1u64;
        let (mut x, mut y) = (x, y);
        for _ in 0..self.r {
            out += ((x % self.p + y % self.p) % self.p) * mult;
            x /= self.p;
            y /= self.p;
            mult *= self.p;
        }
        self.elt(out)
    }

    pub fn neg(&self, a: FieldElement) -> FieldElement {
        let x = self.own(a);
        if self.r == 1 {
            return self.elt((self.p - x) % self.p);
        }
        if self.p == 2 {
            return self.elt(x);
        }
        let mut out = 0u64;
        let mut mult = 1u64;
        let mut x = x;
        for _ in 0..self.r {
            out += ((self.p - x % self.p) % self.p) * mult;
            x /= self.p;
            mult *= self.p;
        }
        self.elt(out)
    }

    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        let (x, y) = (self.own(a), self.own(b));
        if self.r == 1 {
            return self.elt((x * y) % self.p);
        }
        if x == 0 || y == 0 {
            return self.zero();
        }
        let t = self.tables.as_ref().unwrap();
        let order = self.q - 1;
        let s = (t.log[x as usize] as u64 + t.log[y as usize] as u64) % order;
        self.elt(t.exp[s as usize] as u64)
    }

    pub fn inv(&self, a: FieldElement) -> Result<FieldElement, GfError> {
        let x = self.own(a);
        if x == 0 {
            return Err(GfError::DivisionByZero);
        }
        if self.r == 1 {
            return Ok(self.pow(a, self.p - 2));
        }
        let t = self.tables.as_ref().unwrap();
        let order = self.q - 1;
        let s = (order - t.log[x as usize] as u64) % order;
        Ok(self.elt(t.exp[s as usize] as u64))
    }

    pub fn div(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement, GfError> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: FieldElement, mut e: u64) -> FieldElement {
        let mut base = a;
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn is_square(&self, a: FieldElement) -> bool {
        let x = self.own(a);
        if x == 0 || self.p == 2 {
            return true;
        }
        if self.r == 1 {
            return self.pow(a, (self.p - 1) / 2) == self.one();
        }
        let t = self.tables.as_ref().unwrap();
        t.log[x as usize] % 2 == 0
    }

    /// Deterministic square root: the root with the smaller canonical index,
    /// or None when `a` is a non-square.
    pub fn sqrt(&self, a: FieldElement) -> Option<FieldElement> {
        let x = self.own(a);
        if x == 0 {
            return Some(self.zero());
        }
        if self.p == 2 {
            // squaring is the Frobenius, invert by r-1 further squarings
            let mut s = a;
            for _ in 0..self.r.saturating_sub(1) {
                s = self.mul(s, s);
            }
            debug_assert_eq!(self.mul(s, s), a);
            return Some(s);
        }
        let root = if self.r == 1 {
            self.tonelli_shanks(a)?
        } else {
            let t = self.tables.as_ref().unwrap();
            let k = t.log[x as usize] as u64;
            if k % 2 != 0 {
                return None;
            }
            self.elt(t.exp[(k / 2) as usize] as u64)
        };
        let other = self.neg(root);
        Some(if other.idx < root.idx { other } else { root })
    }

    /// Tonelli-Shanks over the prime field, deterministic non-residue scan.
    fn tonelli_shanks(&self, a: FieldElement) -> Option<FieldElement> {
        let p = self.p;
        if self.pow(a, (p - 1) / 2) != self.one() {
            return None;
        }
        if p % 4 == 3 {
            return Some(self.pow(a, (p + 1) / 4));
        }
        let mut s = 0u64;
        let mut odd = p - 1;
        while odd % 2 == 0 {
            odd /= 2;
            s += 1;
        }
        let mut z = self.elt(2);
        while self.pow(z, (p - 1) / 2) == self.one() {
            z = self.elt(z.idx as u64 + 1);
        }
        let mut m = s;
        let mut c = self.pow(z, odd);
        let mut t = self.pow(a, odd);
        let mut rt = self.pow(a, (odd + 1) / 2);
        while t != self.one() {
            let mut i = 0u64;
            let mut t2 = t;
            while t2 != self.one() {
                t2 = self.mul(t2, t2);
                i += 1;
            }
            let mut b = c;
            for _ in 0..(m - i - 1) {
                b = self.mul(b, b);
            }
            m = i;
            c = self.mul(b, b);
            t = self.mul(t, c);
            rt = self.mul(rt, b);
        }
        Some(rt)
    }

    /// Whether -3 is a square in this field. In characteristic 3 it is zero
    /// and therefore trivially a square.
    pub fn minus_three_is_square(&self) -> bool {
        self.is_square(self.from_int(-3))
    }
}
