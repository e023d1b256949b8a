//! Finite field towers `K = GF(q^ell)` over `k = GF(q)`, `q = p^e`.
//!
//! Elements are stored as the base-`p` packing of their coefficient vector in
//! the polynomial basis of `GF(p)[x] / (modulus)`, so the integer encoding used
//! in files is the in-memory representation as well. Fields with at most
//! [`TABLE_LIMIT`] elements get discrete-log, antilog and Zech-log tables;
//! larger fields fall back to polynomial arithmetic.
//!
//! The base field `k` lives inside `K` as the fixed field of `a -> a^q`, and
//! every intermediate field `GF(q^f)`, `f | ell`, is the fixed field of
//! `a -> a^(q^f)`.

use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::{self, Mat};

/// Fields up to this order carry log/Zech tables.
pub const TABLE_LIMIT: u64 = 1 << 20;
/// Largest supported field order.
pub const SIZE_LIMIT: u64 = 1 << 30;

const ZECH_NONE: u32 = u32::MAX;

/// An element of `K`, encoded as the base-`p` packing of its coefficients.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldElem(u32);

impl FieldElem {
    pub const ZERO: FieldElem = FieldElem(0);
    pub const ONE: FieldElem = FieldElem(1);

    pub fn to_int(self) -> u32 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A generator `theta: a -> a^(q^j)` of `Gal(K/k)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct GaloisGen {
    exponent: u32,
}

impl GaloisGen {
    pub fn new(tower: &FieldTower, exponent: u32) -> Result<Self> {
        let ell = tower.ell();
        let j = exponent % ell;
        if gcd(j as u64, ell as u64) != 1 {
            return Err(Error::NotAGenerator { exponent, ell });
        }
        Ok(GaloisGen { exponent: j })
    }

    /// Plain Frobenius `a -> a^q`.
    pub fn frobenius(tower: &FieldTower) -> Self {
        GaloisGen {
            exponent: 1 % tower.ell(),
        }
    }

    pub fn exponent(self) -> u32 {
        self.exponent
    }
}

/// A subfield `GF(q^degree)` of `K`, `degree | ell`, described by its degree over `k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subfield {
    pub degree: u32,
}

struct Tables {
    log: Vec<u32>,
    exp: Vec<u32>,
    zech: Vec<u32>,
}

/// A `k`-basis `B = (B_1, ..., B_ell)` of `K` together with the data needed to
/// compute coordinates `eps_B`.
#[derive(Clone, Debug)]
pub struct KBasis {
    elements: Vec<FieldElem>,
    // Inverse of the GF(p)-matrix whose columns are kappa_a * B_i, column i*e + a.
    inverse: Vec<Vec<u32>>,
    // GF(p)-basis of k.
    kappa: Vec<FieldElem>,
    cache: Option<Vec<FieldElem>>,
}

pub struct FieldTower {
    p: u32,
    e: u32,
    ell: u32,
    degree: u32,
    order: u32,
    q: u32,
    modulus: Vec<u32>,
    pow_p: Vec<u32>,
    tables: Option<Tables>,
    primitive: FieldElem,
    generator: FieldElem,
    power_basis: Option<KBasis>,
}

impl fmt::Debug for FieldTower {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldTower")
            .field("p", &self.p)
            .field("e", &self.e)
            .field("ell", &self.ell)
            .field("modulus", &self.modulus)
            .finish()
    }
}

pub fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while (d as u64) * (d as u64) <= n as u64 {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

pub(crate) fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub(crate) fn prime_factors(mut n: u64) -> Vec<u64> {
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

pub(crate) fn divisors(n: u32) -> Vec<u32> {
    (1..=n).filter(|d| n.is_multiple_of(*d)).collect()
}

fn pow_mod_u64(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = ((acc as u128 * base as u128) % m as u128) as u64;
        }
        base = ((base as u128 * base as u128) % m as u128) as u64;
        exp >>= 1;
    }
    acc
}

/// Polynomials over GF(p), little-endian coefficient vectors without trailing zeros.
mod gfp {
    pub fn inv(a: u32, p: u32) -> u32 {
        // p is prime and a != 0
        let mut acc = 1u64;
        let mut base = a as u64 % p as u64;
        let mut e = p as u64 - 2;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base % p as u64;
            }
            base = base * base % p as u64;
            e >>= 1;
        }
        acc as u32
    }

    pub fn trim(mut a: Vec<u32>) -> Vec<u32> {
        while a.last() == Some(&0) {
            a.pop();
        }
        a
    }

    pub fn sub(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
        let n = a.len().max(b.len());
        let out = (0..n)
            .map(|i| {
                let x = a.get(i).copied().unwrap_or(0);
                let y = b.get(i).copied().unwrap_or(0);
                (x + p - y) % p
            })
            .collect();
        trim(out)
    }

    pub fn rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
        let mut r = trim(a.to_vec());
        let dm = m.len() - 1;
        let lead_inv = inv(m[dm], p) as u64;
        while r.len() > dm {
            let dr = r.len() - 1;
            let c = (r[dr] as u64 * lead_inv % p as u64) as u32;
            if c != 0 {
                for i in 0..=dm {
                    let t = (c as u64 * m[i] as u64 % p as u64) as u32;
                    r[dr - dm + i] = (r[dr - dm + i] + p - t) % p;
                }
            }
            r = trim(r);
        }
        r
    }

    pub fn mul(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = (out[i + j] + x as u64 * y as u64) % p as u64;
            }
        }
        trim(out.into_iter().map(|c| c as u32).collect())
    }

    pub fn mulmod(a: &[u32], b: &[u32], m: &[u32], p: u32) -> Vec<u32> {
        rem(&mul(a, b, p), m, p)
    }

    pub fn powmod(a: &[u32], mut e: u64, m: &[u32], p: u32) -> Vec<u32> {
        let mut acc = vec![1u32];
        let mut base = rem(a, m, p);
        while e > 0 {
            if e & 1 == 1 {
                acc = mulmod(&acc, &base, m, p);
            }
            base = mulmod(&base, &base, m, p);
            e >>= 1;
        }
        rem(&acc, m, p)
    }

    pub fn gcd(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
        let mut a = trim(a.to_vec());
        let mut b = trim(b.to_vec());
        while !b.is_empty() {
            let r = rem(&a, &b, p);
            a = b;
            b = r;
        }
        a
    }

    /// Rabin's irreducibility test for a monic polynomial.
    pub fn is_irreducible(f: &[u32], p: u32) -> bool {
        let n = f.len() - 1;
        if n == 0 {
            return false;
        }
        if n == 1 {
            return true;
        }
        let x = vec![0, 1];
        // x^(p^i) mod f for i = 0..=n
        let mut frob = vec![rem(&x, f, p)];
        for i in 1..=n {
            let prev = &frob[i - 1];
            frob.push(powmod(prev, p as u64, f, p));
        }
        if !sub(&frob[n], &x, p).is_empty() {
            return false;
        }
        for r in super::prime_factors(n as u64) {
            let h = sub(&frob[n / r as usize], &x, p);
            let g = gcd(f, &h, p);
            if g.len() != 1 {
                return false;
            }
        }
        true
    }
}

impl FieldTower {
    /// Builds `GF(p^(e*ell)) / GF(p^e)`. Without an explicit modulus the least
    /// monic irreducible polynomial of degree `e*ell` is used, ordering
    /// candidates by their coefficients from `x^(n-1)` down to the constant term.
    pub fn new(p: u32, e: u32, ell: u32, modulus: Option<Vec<u32>>) -> Result<Self> {
        Self::with_limit(p, e, ell, modulus, SIZE_LIMIT)
    }

    pub fn with_limit(
        p: u32,
        e: u32,
        ell: u32,
        modulus: Option<Vec<u32>>,
        limit: u64,
    ) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if e == 0 || ell == 0 {
            return Err(Error::InvalidModulus(
                "e and ell must be positive".to_string(),
            ));
        }
        let degree = e.checked_mul(ell).ok_or(Error::FieldTooLarge {
            p,
            degree: u32::MAX,
            limit,
        })?;
        let limit = limit.min(SIZE_LIMIT);
        let mut order = 1u64;
        for _ in 0..degree {
            order *= p as u64;
            if order > limit {
                return Err(Error::FieldTooLarge { p, degree, limit });
            }
        }
        let modulus = match modulus {
            Some(m) => {
                if m.len() != degree as usize + 1 {
                    return Err(Error::InvalidModulus(format!(
                        "expected {} coefficients, got {}",
                        degree + 1,
                        m.len()
                    )));
                }
                if m.iter().any(|&c| c >= p) {
                    return Err(Error::InvalidModulus(format!(
                        "coefficients must be below {p}"
                    )));
                }
                if m[degree as usize] != 1 {
                    return Err(Error::InvalidModulus("modulus must be monic".to_string()));
                }
                if !gfp::is_irreducible(&m, p) {
                    return Err(Error::ReducibleModulus(p));
                }
                m
            }
            None => default_modulus(p, degree),
        };
        let pow_p: Vec<u32> = (0..=degree).map(|i| (p as u64).pow(i) as u32).collect();
        let q = (p as u64).pow(e) as u32;
        let mut tower = FieldTower {
            p,
            e,
            ell,
            degree,
            order: order as u32,
            q,
            modulus,
            pow_p,
            tables: None,
            primitive: FieldElem::ONE,
            generator: FieldElem::ONE,
            power_basis: None,
        };
        tower.generator = tower.reduce_x();
        tower.primitive = tower.find_primitive();
        if order <= TABLE_LIMIT {
            tower.tables = Some(tower.build_tables());
        }
        let beta = tower.generator;
        let elems: Vec<FieldElem> = (0..ell).map(|i| tower.pow(beta, i as u64)).collect();
        tower.power_basis = Some(KBasis::new(&tower, elems)?);
        Ok(tower)
    }

    /// Builds `GF(q^ell) / GF(q)` from a prime power `q`.
    pub fn from_q(q: u32, ell: u32) -> Result<Self> {
        let (p, e) = split_prime_power(q).ok_or(Error::NotPrime(q))?;
        Self::new(p, e, ell, None)
    }

    pub fn p(&self) -> u32 {
        self.p
    }
    pub fn e(&self) -> u32 {
        self.e
    }
    pub fn ell(&self) -> u32 {
        self.ell
    }
    /// `[K : GF(p)]`
    pub fn degree(&self) -> u32 {
        self.degree
    }
    /// `|K|`
    pub fn order(&self) -> u32 {
        self.order
    }
    /// `|k|`
    pub fn q(&self) -> u32 {
        self.q
    }
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }
    pub fn has_tables(&self) -> bool {
        self.tables.is_some()
    }
    /// The residue class of `x`; `b^k` in element syntax.
    pub fn generator(&self) -> FieldElem {
        self.generator
    }
    /// A multiplicative generator of `K^x`.
    pub fn primitive(&self) -> FieldElem {
        self.primitive
    }
    /// The power basis `(1, b, ..., b^(ell-1))`.
    pub fn power_basis(&self) -> &KBasis {
        self.power_basis.as_ref().expect("set at construction")
    }

    pub fn elem(&self, value: u64) -> Result<FieldElem> {
        if value >= self.order as u64 {
            return Err(Error::ElementOutOfRange {
                value,
                order: self.order as u64,
            });
        }
        Ok(FieldElem(value as u32))
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElem> {
        (0..self.order).map(FieldElem)
    }

    fn digits(&self, a: FieldElem) -> Vec<u32> {
        let mut v = a.0;
        (0..self.degree)
            .map(|_| {
                let d = v % self.p;
                v /= self.p;
                d
            })
            .collect()
    }

    fn pack(&self, digits: &[u32]) -> FieldElem {
        FieldElem(
            digits
                .iter()
                .zip(&self.pow_p)
                .map(|(d, w)| d * w)
                .sum::<u32>(),
        )
    }

    fn reduce_x(&self) -> FieldElem {
        let r = gfp::rem(&[0, 1], &self.modulus, self.p);
        self.pack(&r)
    }

    fn add_slow(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        let (mut x, mut y) = (a.0, b.0);
        let mut out = 0u32;
        for w in &self.pow_p[..self.degree as usize] {
            out += ((x % self.p + y % self.p) % self.p) * w;
            x /= self.p;
            y /= self.p;
        }
        FieldElem(out)
    }

    fn neg_slow(&self, a: FieldElem) -> FieldElem {
        let mut x = a.0;
        let mut out = 0u32;
        for w in &self.pow_p[..self.degree as usize] {
            out += ((self.p - x % self.p) % self.p) * w;
            x /= self.p;
        }
        FieldElem(out)
    }

    fn mul_slow(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        let r = gfp::mulmod(
            &gfp::trim(self.digits(a)),
            &gfp::trim(self.digits(b)),
            &self.modulus,
            self.p,
        );
        self.pack(&r)
    }

    fn pow_slow(&self, a: FieldElem, mut e: u64) -> FieldElem {
        let mut acc = FieldElem::ONE;
        let mut base = a;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul_slow(acc, base);
            }
            base = self.mul_slow(base, base);
            e >>= 1;
        }
        acc
    }

    fn find_primitive(&self) -> FieldElem {
        let n = self.order as u64 - 1;
        if n == 1 {
            return FieldElem::ONE;
        }
        let factors = prime_factors(n);
        (2..self.order)
            .map(FieldElem)
            .find(|&c| {
                factors
                    .iter()
                    .all(|r| self.pow_slow(c, n / r) != FieldElem::ONE)
            })
            .expect("a finite field has a primitive element")
    }

    fn build_tables(&self) -> Tables {
        let n = self.order as usize - 1;
        let mut log = vec![0u32; self.order as usize];
        let mut exp = vec![0u32; 2 * n.max(1)];
        let mut x = FieldElem::ONE;
        for i in 0..n {
            exp[i] = x.0;
            exp[i + n] = x.0;
            log[x.0 as usize] = i as u32;
            x = self.mul_slow(x, self.primitive);
        }
        let zech = (0..n)
            .map(|i| {
                let s = self.add_slow(FieldElem::ONE, FieldElem(exp[i]));
                if s.is_zero() {
                    ZECH_NONE
                } else {
                    log[s.0 as usize]
                }
            })
            .collect();
        Tables { log, exp, zech }
    }

    #[inline]
    pub fn add(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        if self.p == 2 {
            return FieldElem(a.0 ^ b.0);
        }
        match &self.tables {
            Some(t) => {
                if a.0 == 0 {
                    return b;
                }
                if b.0 == 0 {
                    return a;
                }
                let n = self.order - 1;
                let la = t.log[a.0 as usize];
                let lb = t.log[b.0 as usize];
                let d = if lb >= la { lb - la } else { lb + n - la };
                let z = t.zech[d as usize];
                if z == ZECH_NONE {
                    FieldElem::ZERO
                } else {
                    FieldElem(t.exp[(la + z) as usize])
                }
            }
            None => self.add_slow(a, b),
        }
    }

    #[inline]
    pub fn neg(&self, a: FieldElem) -> FieldElem {
        if self.p == 2 || a.0 == 0 {
            return a;
        }
        match &self.tables {
            Some(t) => {
                let n = self.order - 1;
                FieldElem(t.exp[(t.log[a.0 as usize] + n / 2) as usize])
            }
            None => self.neg_slow(a),
        }
    }

    #[inline]
    pub fn sub(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        if a.0 == 0 || b.0 == 0 {
            return FieldElem::ZERO;
        }
        match &self.tables {
            Some(t) => FieldElem(t.exp[(t.log[a.0 as usize] + t.log[b.0 as usize]) as usize]),
            None => self.mul_slow(a, b),
        }
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self, a: FieldElem) -> Option<FieldElem> {
        if a.0 == 0 {
            return None;
        }
        let n = self.order - 1;
        Some(match &self.tables {
            Some(t) => FieldElem(t.exp[((n - t.log[a.0 as usize]) % n.max(1)) as usize]),
            None => self.pow_slow(a, n as u64 - 1),
        })
    }

    pub fn div(&self, a: FieldElem, b: FieldElem) -> Option<FieldElem> {
        self.inv(b).map(|bi| self.mul(a, bi))
    }

    pub fn pow(&self, a: FieldElem, e: u64) -> FieldElem {
        if e == 0 {
            return FieldElem::ONE;
        }
        if a.0 == 0 {
            return FieldElem::ZERO;
        }
        let n = self.order as u64 - 1;
        match &self.tables {
            Some(t) => {
                let l = (t.log[a.0 as usize] as u128 * (e % n) as u128 % n as u128) as usize;
                FieldElem(t.exp[l])
            }
            None => self.pow_slow(a, e % n),
        }
    }

    /// Discrete log with respect to [`FieldTower::primitive`].
    pub fn log(&self, a: FieldElem) -> Option<u64> {
        if a.0 == 0 {
            return None;
        }
        match &self.tables {
            Some(t) => Some(t.log[a.0 as usize] as u64),
            None => {
                let mut x = FieldElem::ONE;
                for i in 0..self.order as u64 - 1 {
                    if x == a {
                        return Some(i);
                    }
                    x = self.mul_slow(x, self.primitive);
                }
                None
            }
        }
    }

    /// `q^j mod (|K| - 1)`, the exponent of `theta^i` for total Frobenius power `j`.
    fn frob_exponent(&self, j: u64) -> u64 {
        let n = self.order as u64 - 1;
        pow_mod_u64(self.q as u64, j, n.max(1))
    }

    /// `a -> a^(q^j)` for a total Frobenius power `j`.
    pub fn frobenius_power(&self, a: FieldElem, j: u64) -> FieldElem {
        if a.0 == 0 {
            return a;
        }
        let n = self.order as u64 - 1;
        if n == 1 {
            return a;
        }
        self.pow(a, self.frob_exponent(j % self.ell as u64))
    }

    /// `theta(a)`.
    pub fn frobenius(&self, theta: GaloisGen, a: FieldElem) -> FieldElem {
        self.frobenius_power(a, theta.exponent as u64)
    }

    /// `theta^i(a)`; `i` may be negative.
    pub fn theta_pow(&self, theta: GaloisGen, i: i64, a: FieldElem) -> FieldElem {
        let ell = self.ell as i64;
        let j = (theta.exponent as i64 * i).rem_euclid(ell);
        self.frobenius_power(a, j as u64)
    }

    pub fn check_subfield(&self, f: u32) -> Result<Subfield> {
        if f == 0 || !self.ell.is_multiple_of(f) {
            return Err(Error::NotASubfield(f));
        }
        Ok(Subfield { degree: f })
    }

    pub fn subfields(&self) -> Vec<Subfield> {
        divisors(self.ell)
            .into_iter()
            .map(|degree| Subfield { degree })
            .collect()
    }

    pub fn subfield_order(&self, f: Subfield) -> u64 {
        (self.q as u64).pow(f.degree)
    }

    /// Whether `a` lies in `GF(q^f)`.
    pub fn in_subfield(&self, a: FieldElem, f: Subfield) -> bool {
        if a.0 == 0 {
            return true;
        }
        let n = self.order as u64 - 1;
        match &self.tables {
            Some(t) => {
                let step = n / (self.subfield_order(f) - 1);
                (t.log[a.0 as usize] as u64).is_multiple_of(step)
            }
            None => self.frobenius_power(a, f.degree as u64) == a,
        }
    }

    pub fn in_base(&self, a: FieldElem) -> bool {
        self.in_subfield(a, Subfield { degree: 1 })
    }

    /// A multiplicative generator of `GF(q^f)^x`.
    pub fn subfield_primitive(&self, f: Subfield) -> FieldElem {
        let n = self.order as u64 - 1;
        let sub = self.subfield_order(f) - 1;
        self.pow(self.primitive, n / sub.max(1))
    }

    /// All elements of `GF(q^f)` in increasing encoding order.
    pub fn subfield_members(&self, f: Subfield) -> Vec<FieldElem> {
        let g = self.subfield_primitive(f);
        let count = self.subfield_order(f) - 1;
        let mut out = Vec::with_capacity(count as usize + 1);
        out.push(FieldElem::ZERO);
        let mut x = FieldElem::ONE;
        for _ in 0..count {
            out.push(x);
            x = self.mul(x, g);
        }
        out.sort_unstable();
        out
    }

    /// The subfield `{a : a^(p^t) = a}` for an absolute degree `t` with `e | t | e*ell`.
    pub fn subfield_elems(&self, t: u32) -> Result<Vec<FieldElem>> {
        if t == 0 || !t.is_multiple_of(self.e) || !self.degree.is_multiple_of(t) {
            return Err(Error::NotASubfield(t));
        }
        Ok(self.subfield_members(Subfield { degree: t / self.e }))
    }

    pub fn base_elems(&self) -> Vec<FieldElem> {
        self.subfield_members(Subfield { degree: 1 })
    }

    /// Smallest subfield containing every element of `elems`.
    pub fn generated_subfield(&self, elems: &[FieldElem]) -> Subfield {
        self.subfields()
            .into_iter()
            .find(|&f| elems.iter().all(|&a| self.in_subfield(a, f)))
            .expect("K contains everything")
    }

    /// Coefficient vector over GF(p), little-endian.
    pub fn coefficients(&self, a: FieldElem) -> Vec<u32> {
        self.digits(a)
    }

    pub fn from_coefficients(&self, c: &[u32]) -> Result<FieldElem> {
        if c.len() > self.degree as usize || c.iter().any(|&d| d >= self.p) {
            return Err(Error::Parse(format!("invalid coefficient vector {c:?}")));
        }
        Ok(self.pack(c))
    }

    /// Dimension over `k` of the span of `v`, computed from `eps_B` coordinates.
    pub fn vector_rank(&self, v: &[FieldElem]) -> usize {
        let basis = self.power_basis();
        linalg::rank(&basis.coordinate_matrix(self, v), self)
    }
}

/// `q = p^e` to `(p, e)`.
pub fn split_prime_power(q: u32) -> Option<(u32, u32)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|d| q.is_multiple_of(*d))?;
    let mut e = 0;
    let mut r = q;
    while r.is_multiple_of(p) {
        r /= p;
        e += 1;
    }
    (r == 1).then_some((p, e))
}

fn default_modulus(p: u32, degree: u32) -> Vec<u32> {
    let count = (p as u64).pow(degree);
    for c in 0..count {
        let mut m = Vec::with_capacity(degree as usize + 1);
        let mut v = c;
        for _ in 0..degree {
            m.push((v % p as u64) as u32);
            v /= p as u64;
        }
        m.push(1);
        if degree > 1 && m[0] == 0 {
            continue;
        }
        if gfp::is_irreducible(&m, p) {
            return m;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

fn invert_mod_p(mut a: Vec<Vec<u32>>, p: u32) -> Option<Vec<Vec<u32>>> {
    let n = a.len();
    let mut inv: Vec<Vec<u32>> = (0..n)
        .map(|i| (0..n).map(|j| u32::from(i == j)).collect())
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| a[r][col] != 0)?;
        a.swap(col, piv);
        inv.swap(col, piv);
        let s = gfp::inv(a[col][col], p) as u64;
        for j in 0..n {
            a[col][j] = (a[col][j] as u64 * s % p as u64) as u32;
            inv[col][j] = (inv[col][j] as u64 * s % p as u64) as u32;
        }
        for r in 0..n {
            if r != col && a[r][col] != 0 {
                let f = a[r][col] as u64;
                for j in 0..n {
                    a[r][j] =
                        ((a[r][j] as u64 + (p as u64 - f) * a[col][j] as u64) % p as u64) as u32;
                    inv[r][j] = ((inv[r][j] as u64 + (p as u64 - f) * inv[col][j] as u64)
                        % p as u64) as u32;
                }
            }
        }
    }
    Some(inv)
}

impl KBasis {
    pub fn new(tower: &FieldTower, elements: Vec<FieldElem>) -> Result<Self> {
        if elements.len() != tower.ell as usize {
            return Err(Error::NotABasis);
        }
        let e = tower.e as usize;
        let n = tower.degree as usize;
        let gamma = tower.subfield_primitive(Subfield { degree: 1 });
        let kappa: Vec<FieldElem> = (0..e).map(|a| tower.pow(gamma, a as u64)).collect();
        // rows = GF(p) coordinate, cols = (i, a)
        let mut mat = vec![vec![0u32; n]; n];
        for (i, &b) in elements.iter().enumerate() {
            for (a, &k) in kappa.iter().enumerate() {
                let d = tower.digits(tower.mul(k, b));
                for (r, &x) in d.iter().enumerate() {
                    mat[r][i * e + a] = x;
                }
            }
        }
        let inverse = invert_mod_p(mat, tower.p).ok_or(Error::NotABasis)?;
        let mut basis = KBasis {
            elements,
            inverse,
            kappa,
            cache: None,
        };
        if tower.order <= 1 << 16 {
            let ell = tower.ell as usize;
            let mut cache = Vec::with_capacity(tower.order as usize * ell);
            for a in tower.elements() {
                cache.extend(basis.compute_coords(tower, a));
            }
            basis.cache = Some(cache);
        }
        Ok(basis)
    }

    pub fn elements(&self) -> &[FieldElem] {
        &self.elements
    }

    fn compute_coords(&self, tower: &FieldTower, a: FieldElem) -> Vec<FieldElem> {
        let e = tower.e as usize;
        let d = tower.digits(a);
        let p = tower.p as u64;
        let c: Vec<u32> = self
            .inverse
            .iter()
            .map(|row| {
                (row.iter()
                    .zip(&d)
                    .map(|(x, y)| *x as u64 * *y as u64)
                    .sum::<u64>()
                    % p) as u32
            })
            .collect();
        (0..tower.ell as usize)
            .map(|i| {
                self.kappa
                    .iter()
                    .enumerate()
                    .fold(FieldElem::ZERO, |acc, (a, &k)| {
                        tower.add(acc, tower.mul(FieldElem(c[i * e + a]), k))
                    })
            })
            .collect()
    }

    /// `eps_B(a)`: the coordinates of `a` in `k^ell`.
    pub fn coords(&self, tower: &FieldTower, a: FieldElem) -> Vec<FieldElem> {
        match &self.cache {
            Some(c) => {
                let ell = tower.ell as usize;
                let i = a.0 as usize * ell;
                c[i..i + ell].to_vec()
            }
            None => self.compute_coords(tower, a),
        }
    }

    #[inline]
    pub fn coord(&self, tower: &FieldTower, a: FieldElem, i: usize) -> FieldElem {
        match &self.cache {
            Some(c) => c[a.0 as usize * tower.ell as usize + i],
            None => self.compute_coords(tower, a)[i],
        }
    }

    /// Inverse of [`KBasis::coords`].
    pub fn combine(&self, tower: &FieldTower, coords: &[FieldElem]) -> FieldElem {
        coords
            .iter()
            .zip(&self.elements)
            .fold(FieldElem::ZERO, |acc, (&c, &b)| {
                tower.add(acc, tower.mul(c, b))
            })
    }

    /// The `ell x m` matrix whose column `j` is `eps_B(v_j)`.
    pub fn coordinate_matrix(&self, tower: &FieldTower, v: &[FieldElem]) -> Mat {
        let ell = tower.ell as usize;
        let mut m = Mat::zeros(ell, v.len());
        for (j, &x) in v.iter().enumerate() {
            for i in 0..ell {
                m.set(i, j, self.coord(tower, x, i));
            }
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trial_division_irreducible(f: &[u32], p: u32) -> bool {
        let n = f.len() - 1;
        for deg in 1..=n / 2 {
            let count = (p as u64).pow(deg as u32);
            for c in 0..count {
                let mut g = Vec::new();
                let mut v = c;
                for _ in 0..deg {
                    g.push((v % p as u64) as u32);
                    v /= p as u64;
                }
                g.push(1);
                if gfp::rem(f, &g, p).is_empty() {
                    return false;
                }
            }
        }
        true
    }

    #[test]
    fn default_moduli() {
        assert_eq!(
            FieldTower::new(2, 1, 2, None).unwrap().modulus(),
            &[1, 1, 1]
        );
        assert_eq!(
            FieldTower::new(2, 1, 3, None).unwrap().modulus(),
            &[1, 1, 0, 1]
        );
        assert_eq!(
            FieldTower::new(2, 1, 4, None).unwrap().modulus(),
            &[1, 1, 0, 0, 1]
        );
        assert_eq!(
            FieldTower::new(3, 1, 2, None).unwrap().modulus(),
            &[1, 0, 1]
        );
    }

    #[test]
    fn rabin_agrees_with_trial_division() {
        for (p, n) in [
            (2u32, 1u32),
            (2, 2),
            (2, 3),
            (2, 4),
            (2, 5),
            (2, 6),
            (3, 2),
            (3, 3),
            (3, 4),
            (5, 2),
            (5, 3),
        ] {
            let count = (p as u64).pow(n);
            for c in 0..count {
                let mut m = Vec::new();
                let mut v = c;
                for _ in 0..n {
                    m.push((v % p as u64) as u32);
                    v /= p as u64;
                }
                m.push(1);
                assert_eq!(
                    gfp::is_irreducible(&m, p),
                    trial_division_irreducible(&m, p),
                    "p={p} m={m:?}"
                );
            }
        }
    }

    #[test]
    fn explicit_modulus_checks() {
        assert!(FieldTower::new(2, 1, 3, Some(vec![1, 0, 1, 1])).is_ok());
        assert_eq!(
            FieldTower::new(2, 1, 2, Some(vec![1, 0, 1])).unwrap_err(),
            Error::ReducibleModulus(2)
        );
        assert!(matches!(
            FieldTower::new(2, 1, 2, Some(vec![1, 1, 0])),
            Err(Error::InvalidModulus(_))
        ));
        assert_eq!(
            FieldTower::new(4, 1, 2, None).unwrap_err(),
            Error::NotPrime(4)
        );
        assert!(matches!(
            FieldTower::with_limit(2, 1, 12, None, 1 << 10),
            Err(Error::FieldTooLarge { .. })
        ));
    }

    #[test]
    fn gf4_frobenius_squares() {
        let t = FieldTower::new(2, 1, 2, None).unwrap();
        let w = t.generator();
        assert_eq!(w.to_int(), 2);
        let theta = GaloisGen::frobenius(&t);
        assert_eq!(t.frobenius(theta, w), t.mul(w, w));
        assert_eq!(t.frobenius(theta, FieldElem::ONE), FieldElem::ONE);
    }

    #[test]
    fn gf16_theta_order() {
        let t = FieldTower::new(2, 1, 4, None).unwrap();
        let theta = GaloisGen::frobenius(&t);
        let b = t.generator();
        let mut x = b;
        for _ in 0..4 {
            x = t.frobenius(theta, x);
        }
        assert_eq!(x, b);
        assert!(GaloisGen::new(&t, 2).is_err());
        assert!(GaloisGen::new(&t, 3).is_ok());
    }

    #[test]
    fn gf16_subfield_of_degree_two() {
        let t = FieldTower::new(2, 1, 4, None).unwrap();
        let s = t.subfield_elems(2).unwrap();
        assert_eq!(s.len(), 4);
        // brute force: fixed points of a -> a^4
        let fixed: Vec<FieldElem> = t
            .elements()
            .filter(|&a| t.pow(t.pow(a, 2), 2) == a)
            .collect();
        assert_eq!(s, fixed);
        let gamma = *s
            .iter()
            .find(|&&a| a != FieldElem::ZERO && a != FieldElem::ONE)
            .unwrap();
        assert_eq!(t.pow(gamma, 3), FieldElem::ONE);
        assert_eq!(
            t.subfield_elems(1).unwrap(),
            vec![FieldElem::ZERO, FieldElem::ONE]
        );
        assert_eq!(t.subfield_elems(4).unwrap().len(), 16);
        assert!(t.subfield_elems(3).is_err());
    }

    #[test]
    fn tables_and_slow_path_agree() {
        let t = FieldTower::new(3, 1, 3, None).unwrap();
        for a in t.elements() {
            for b in t.elements() {
                assert_eq!(t.add(a, b), t.add_slow(a, b));
                assert_eq!(t.mul(a, b), t.mul_slow(a, b));
            }
            assert_eq!(t.neg(a), t.neg_slow(a));
            if let Some(ai) = t.inv(a) {
                assert_eq!(t.mul(a, ai), FieldElem::ONE);
            }
        }
    }

    #[test]
    fn untabled_field_arithmetic() {
        // 2^21 elements is above TABLE_LIMIT
        let t = FieldTower::new(2, 3, 7, None).unwrap();
        assert!(!t.has_tables());
        let a = t.elem(123_456).unwrap();
        let b = t.elem(987_654).unwrap();
        let ab = t.mul(a, b);
        assert_eq!(t.div(ab, b), Some(a));
        let theta = GaloisGen::frobenius(&t);
        let mut x = a;
        for _ in 0..7 {
            x = t.frobenius(theta, x);
        }
        assert_eq!(x, a);
        assert!(t.in_base(t.subfield_primitive(Subfield { degree: 1 })));
        let basis = t.power_basis();
        assert_eq!(basis.combine(&t, &basis.coords(&t, a)), a);
    }

    #[test]
    fn base_field_inside_extension() {
        let t = FieldTower::new(2, 2, 2, None).unwrap();
        let k = t.base_elems();
        assert_eq!(k.len(), 4);
        for &a in &k {
            for &b in &k {
                assert!(t.in_base(t.add(a, b)));
                assert!(t.in_base(t.mul(a, b)));
            }
        }
        let basis = t.power_basis();
        for a in t.elements() {
            let c = basis.coords(&t, a);
            assert!(c.iter().all(|&x| t.in_base(x)));
            assert_eq!(basis.combine(&t, &c), a);
        }
    }

    #[test]
    fn vector_rank_examples() {
        let t = FieldTower::new(2, 1, 2, None).unwrap();
        let w = t.generator();
        assert_eq!(t.vector_rank(&[FieldElem::ONE, w]), 2);
        assert_eq!(t.vector_rank(&[FieldElem::ONE, FieldElem::ONE]), 1);
        let t = FieldTower::new(2, 1, 4, None).unwrap();
        let b = t.generator();
        let v = [FieldElem::ONE, b, t.pow(b, 2), t.add(t.pow(b, 3), b)];
        // brute-force span size
        let mut span = std::collections::BTreeSet::new();
        for mask in 0u32..16 {
            let s = (0..4)
                .filter(|i| mask >> i & 1 == 1)
                .fold(FieldElem::ZERO, |acc, i| t.add(acc, v[i]));
            span.insert(s);
        }
        assert_eq!(1usize << t.vector_rank(&v), span.len());
        assert_eq!(t.vector_rank(&v), 4);
    }

    #[test]
    fn subfield_lattice_is_divisibility() {
        let t = FieldTower::new(2, 1, 6, None).unwrap();
        for f1 in t.subfields() {
            for f2 in t.subfields() {
                let a = t.subfield_members(f1);
                let contained = a.iter().all(|&x| t.in_subfield(x, f2));
                assert_eq!(contained, f2.degree % f1.degree == 0);
            }
        }
    }

    #[test]
    fn prime_power_split() {
        assert_eq!(split_prime_power(9), Some((3, 2)));
        assert_eq!(split_prime_power(2), Some((2, 1)));
        assert_eq!(split_prime_power(6), None);
    }
}
