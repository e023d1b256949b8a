//! Idealisers, their unit groups and normalizer cosets, automorphism groups
//! and proper equivalence of matrix codes, plus an exhaustive oracle.
//!
//! Conventions: `(g, h)` is an automorphism of `C` when `g^-1 C h = C`, and
//! `(g, h)` witnesses an equivalence of `C` and `D` when `g^-1 D h = C`.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::code::{self, MatrixCode};
use crate::error::{Error, Result};
use crate::field::{self, FieldElem, FieldTower, GaloisGen, KBasis};
use crate::gabidulin::{self, GabidulinParams};
use crate::linalg::{self, InvertibleSearch, Mat, Scalars, SubspaceBasis};

/// Default bound on `|GL_ell(k)| * |GL_m(k)|` for [`brute_force_aut`].
pub const ORACLE_BUDGET: u64 = 1 << 24;
/// Largest center that is searched for a multiplicative generator.
pub const CENTER_LIMIT: u64 = 1 << 16;
/// Largest unrecognized algebra whose units are enumerated.
pub const UNIT_LIMIT: u64 = 1 << 12;
pub const DEFAULT_SEED: u64 = 0x5eed;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Left => "left",
            Side::Right => "right",
        })
    }
}

/// Isomorphism type of an idealiser.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Structure {
    /// The full centralizer of its center `F = GF(q^f)`, so `F^(s x s)`.
    MatrixAlgebra {
        f: u32,
        s: u32,
    },
    /// Just its center `F = GF(q^f)`, acting on `F^s` with `s > 1`.
    Field {
        f: u32,
        s: u32,
    },
    Other,
}

impl Structure {
    /// `[A : k]` when the algebra is a field.
    pub fn field_degree(&self) -> Option<u32> {
        match *self {
            Structure::MatrixAlgebra { f, s: 1 } | Structure::Field { f, .. } => Some(f),
            _ => None,
        }
    }

    pub fn describe(&self, q: u32) -> String {
        match *self {
            Structure::MatrixAlgebra { f, s: 1 } | Structure::Field { f, s: 1 } => {
                format!("field GF({q}^{f})")
            }
            Structure::MatrixAlgebra { f, s } => format!("matrix algebra GF({q}^{f})^({s}x{s})"),
            Structure::Field { f, s } => format!("field GF({q}^{f}) acting on GF({q}^{f})^{s}"),
            Structure::Other => "unrecognized".to_string(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct IdealiserResult {
    pub side: Side,
    pub n: usize,
    /// Canonical basis of the algebra, as flattened `n x n` matrices.
    pub algebra: SubspaceBasis,
    pub center: SubspaceBasis,
    pub structure: Structure,
    /// Multiplicative generator of the center, when the center is a field.
    pub primitive: Option<Mat>,
    pub unit_order: Option<BigUint>,
}

impl IdealiserResult {
    pub fn dim(&self) -> usize {
        self.algebra.dim()
    }

    pub fn basis_matrices(&self) -> Vec<Mat> {
        square_mats(&self.algebra, self.n)
    }

    pub fn contains(&self, x: &Mat, f: &FieldTower) -> bool {
        x.rows() == self.n && x.cols() == self.n && self.algebra.contains(x.data(), f)
    }
}

fn square_mats(space: &SubspaceBasis, n: usize) -> Vec<Mat> {
    space
        .vectors()
        .map(|v| Mat::from_vec(n, n, v.to_vec()))
        .collect()
}

/// `|GL_n(GF(q))|`
pub fn gl_order(n: usize, q: u64) -> BigUint {
    let q = BigUint::from(q);
    let qn = q.pow(n as u32);
    (0..n as u32).fold(BigUint::one(), |acc, i| acc * (&qn - q.pow(i)))
}

fn mat_frobenius(z: &Mat, q: u64, j: u32, f: &FieldTower) -> Mat {
    (0..j).fold(z.clone(), |acc, _| acc.pow(q, f))
}

/// `{X in k^(n x n) : X a = b X}` for every pair `(a, b)`.
pub fn intertwiners(pairs: &[(&Mat, &Mat)], n: usize, f: &FieldTower) -> SubspaceBasis {
    let nn = n * n;
    let mut rows = Vec::with_capacity(pairs.len() * nn);
    for (a, b) in pairs {
        for r in 0..n {
            for c in 0..n {
                let mut row = vec![FieldElem::ZERO; nn];
                for t in 0..n {
                    row[r * n + t] = f.add(row[r * n + t], a.get(t, c));
                    row[t * n + c] = f.sub(row[t * n + c], b.get(r, t));
                }
                rows.push(row);
            }
        }
    }
    if rows.is_empty() {
        return SubspaceBasis::full(nn);
    }
    linalg::kernel(&Mat::from_rows(nn, &rows), f)
}

/// Centralizer of `mats` in `k^(n x n)`.
pub fn commutant(mats: &[Mat], n: usize, f: &FieldTower) -> SubspaceBasis {
    let pairs: Vec<(&Mat, &Mat)> = mats.iter().map(|m| (m, m)).collect();
    intertwiners(&pairs, n, f)
}

/// `L(C, D) = {X : X C ⊆ D}` or `R(C, D) = {Y : C Y ⊆ D}`, solved as a linear
/// system against the parity checks of `D`.
pub fn transporter(
    c: &MatrixCode,
    d: &MatrixCode,
    side: Side,
    f: &FieldTower,
) -> Result<SubspaceBasis> {
    if c.ell() != d.ell() || c.m() != d.m() {
        return Err(Error::ShapeMismatch(format!(
            "{}x{} code against {}x{} code",
            c.ell(),
            c.m(),
            d.ell(),
            d.m()
        )));
    }
    let (ell, m) = (c.ell(), c.m());
    let n = match side {
        Side::Left => ell,
        Side::Right => m,
    };
    let parity = d.space().parity_check(f);
    let mut rows = Vec::new();
    for x in c.basis_matrices() {
        for h in parity.row_vecs() {
            let mut row = vec![FieldElem::ZERO; n * n];
            match side {
                Side::Right => {
                    for cc in 0..m {
                        for b in 0..m {
                            row[cc * m + b] = (0..ell).fold(FieldElem::ZERO, |acc, a| {
                                f.add(acc, f.mul(h[a * m + b], x.get(a, cc)))
                            });
                        }
                    }
                }
                Side::Left => {
                    for a in 0..ell {
                        for cc in 0..ell {
                            row[a * ell + cc] = (0..m).fold(FieldElem::ZERO, |acc, b| {
                                f.add(acc, f.mul(h[a * m + b], x.get(cc, b)))
                            });
                        }
                    }
                }
            }
            rows.push(row);
        }
    }
    if rows.is_empty() {
        return Ok(SubspaceBasis::full(n * n));
    }
    Ok(linalg::kernel(&Mat::from_rows(n * n, &rows), f))
}

/// The left or right idealiser, verified to be a unital algebra and
/// recognized when it is a field or a full matrix algebra over one.
pub fn idealiser(c: &MatrixCode, side: Side, f: &FieldTower) -> Result<IdealiserResult> {
    let algebra = transporter(c, c, side, f)?;
    let n = match side {
        Side::Left => c.ell(),
        Side::Right => c.m(),
    };
    if !algebra.contains(Mat::identity(n).data(), f) {
        return Err(Error::StructureViolation(format!(
            "{side} idealiser misses the identity"
        )));
    }
    let mats = square_mats(&algebra, n);
    for a in &mats {
        for b in &mats {
            if !algebra.contains(a.mul(b, f).data(), f) {
                return Err(Error::StructureViolation(format!(
                    "{side} idealiser is not closed under multiplication"
                )));
            }
        }
    }
    let center = algebra
        .intersect(&commutant(&mats, n, f), f)
        .expect("same ambient");
    let q = f.q() as u64;
    let primitive = field_primitive(&center, n, f);
    let (structure, unit_order) = match &primitive {
        Some(z) if commutant(std::slice::from_ref(z), n, f) == algebra => {
            let (fd, s) = (center.dim() as u32, (n / center.dim()) as u32);
            (
                Structure::MatrixAlgebra { f: fd, s },
                Some(gl_order(s as usize, q.pow(fd))),
            )
        }
        Some(_) if algebra.dim() == center.dim() => {
            let fd = center.dim() as u32;
            (
                Structure::Field {
                    f: fd,
                    s: (n / center.dim()) as u32,
                },
                Some(BigUint::from(q.pow(fd) - 1)),
            )
        }
        _ => {
            let units = small_units(&algebra, n, f).map(|u| BigUint::from(u.len()));
            (Structure::Other, units)
        }
    };
    Ok(IdealiserResult {
        side,
        n,
        algebra,
        center,
        structure,
        primitive,
        unit_order,
    })
}

/// A matrix of multiplicative order `|Z| - 1` in the commutative algebra `Z`,
/// which exists exactly when `Z` is a field.
fn field_primitive(center: &SubspaceBasis, n: usize, f: &FieldTower) -> Option<Mat> {
    let q = f.q() as u64;
    let size = q
        .checked_pow(center.dim() as u32)
        .filter(|&s| s <= CENTER_LIMIT)?;
    let order = size - 1;
    let primes = field::prime_factors(order);
    let id = Mat::identity(n);
    linalg::enumerate_span(center, f, &f.base_elems())
        .into_iter()
        .skip(1)
        .map(|v| Mat::from_vec(n, n, v))
        .find(|z| z.pow(order, f) == id && primes.iter().all(|&p| z.pow(order / p, f) != id))
}

fn small_units(algebra: &SubspaceBasis, n: usize, f: &FieldTower) -> Option<Vec<Mat>> {
    let q = f.q() as u64;
    q.checked_pow(algebra.dim() as u32)
        .filter(|&s| s <= UNIT_LIMIT)?;
    Some(
        linalg::enumerate_span(algebra, f, &f.base_elems())
            .into_iter()
            .map(|v| Mat::from_vec(n, n, v))
            .filter(|x| linalg::is_invertible(x, f))
            .collect(),
    )
}

/// `k^n` as an `F`-vector space, `F = k[z]`, with `F`-basis `w_i`.
struct FStructure {
    z: Mat,
    zpows: Vec<Mat>,
    w: Vec<Vec<FieldElem>>,
    p_inv: Mat,
}

impl FStructure {
    fn new(z: &Mat, fdeg: usize, f: &FieldTower) -> Self {
        let n = z.rows();
        let zpows = powers(z, fdeg, f);
        let mut span = SubspaceBasis::zero(n);
        let mut w = Vec::new();
        for j in 0..n {
            let mut e = vec![FieldElem::ZERO; n];
            e[j] = FieldElem::ONE;
            if span.contains(&e, f) {
                continue;
            }
            let orbit: Vec<Vec<FieldElem>> = zpows.iter().map(|zp| zp.apply(&e, f)).collect();
            let block = SubspaceBasis::from_vectors(n, orbit.iter().map(|v| v.as_slice()), f);
            span = span.sum(&block, f).expect("same ambient");
            w.push(e);
        }
        let p = columns(&zpows, &w, f);
        let p_inv = linalg::inverse(&p, f).expect("z-orbits of an F-basis span k^n");
        FStructure {
            z: z.clone(),
            zpows,
            w,
            p_inv,
        }
    }

    /// The `F`-linear map sending `w_i` to `images[i]`.
    fn f_linear(&self, images: &[Vec<FieldElem>], f: &FieldTower) -> Mat {
        columns(&self.zpows, images, f).mul(&self.p_inv, f)
    }

    /// `sum c_(a,i) z^a w_i -> sum c_(a,i) z^(a q^j) w_i`, which conjugates `z` to `z^(q^j)`.
    fn galois_lift(&self, j: u32, f: &FieldTower) -> Mat {
        let zq = mat_frobenius(&self.z, f.q() as u64, j, f);
        columns(&powers(&zq, self.zpows.len(), f), &self.w, f).mul(&self.p_inv, f)
    }

    /// `diag(z, 1, ..., 1)` and the adjacent transvections `w_i -> w_i + lambda w_j`
    /// for `lambda` in a prime-field basis of `F`; together they generate `GL_s(F)`.
    fn gl_generators(&self, f: &FieldTower) -> Vec<Mat> {
        let s = self.w.len();
        let mut gens = Vec::new();
        let mut images = self.w.clone();
        images[0] = self.z.apply(&self.w[0], f);
        gens.push(self.f_linear(&images, f));
        let gamma = f.subfield_primitive(field::Subfield { degree: 1 });
        let kappa: Vec<FieldElem> = (0..f.e()).map(|b| f.pow(gamma, b as u64)).collect();
        for i in 0..s.saturating_sub(1) {
            for zp in &self.zpows {
                for &kb in &kappa {
                    let lambda = zp.scale(kb, f);
                    for (src, dst) in [(i + 1, i), (i, i + 1)] {
                        let mut images = self.w.clone();
                        let shift = lambda.apply(&self.w[dst], f);
                        images[src] = self.w[src]
                            .iter()
                            .zip(&shift)
                            .map(|(&a, &b)| f.add(a, b))
                            .collect();
                        gens.push(self.f_linear(&images, f));
                    }
                }
            }
        }
        gens
    }
}

fn powers(z: &Mat, count: usize, f: &FieldTower) -> Vec<Mat> {
    let mut out = Vec::with_capacity(count);
    let mut acc = Mat::identity(z.rows());
    for _ in 0..count {
        out.push(acc.clone());
        acc = acc.mul(z, f);
    }
    out
}

// column i*len(pows) + a is pows[a] * vecs[i]
fn columns(pows: &[Mat], vecs: &[Vec<FieldElem>], f: &FieldTower) -> Mat {
    let n = pows[0].rows();
    let cols: Vec<Vec<FieldElem>> = vecs
        .iter()
        .flat_map(|v| pows.iter().map(move |zp| zp.apply(v, f)))
        .collect();
    Mat::from_rows(n, &cols).transpose()
}

/// Generators of the unit group of a recognized (or small) idealiser.
pub fn unit_generators(ideal: &IdealiserResult, f: &FieldTower) -> Result<Vec<Mat>> {
    match (ideal.structure, &ideal.primitive) {
        (Structure::MatrixAlgebra { f: fd, .. }, Some(z)) => {
            Ok(FStructure::new(z, fd as usize, f).gl_generators(f))
        }
        (Structure::Field { .. }, Some(z)) => Ok(vec![z.clone()]),
        _ => {
            let units = small_units(&ideal.algebra, ideal.n, f).ok_or_else(|| {
                Error::Unsupported(format!("{} idealiser too large to enumerate", ideal.side))
            })?;
            let mut gens = Vec::new();
            let mut group: HashSet<Mat> = HashSet::from([Mat::identity(ideal.n)]);
            for u in units {
                if !group.contains(&u) {
                    gens.push(u);
                    group = generated_group(&gens, ideal.n, f);
                }
            }
            Ok(gens)
        }
    }
}

/// The group generated by invertible `gens`, by breadth-first closure.
pub fn generated_group(gens: &[Mat], n: usize, f: &FieldTower) -> HashSet<Mat> {
    let id = Mat::identity(n);
    let mut seen = HashSet::from([id.clone()]);
    let mut queue = VecDeque::from([id]);
    while let Some(x) = queue.pop_front() {
        for g in gens {
            let y = x.mul(g, f);
            if seen.insert(y.clone()) {
                queue.push_back(y);
            }
        }
    }
    seen
}

/// A representative `t` of a coset of `N(A)` modulo `A^x`, conjugating the
/// center generator `z` to `z^(q^label)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Coset {
    pub label: u32,
    pub t: Mat,
}

/// One representative per element of `Gal(F/k)` for an idealiser `F^(s x s)`.
/// When the center is `Delta_B(F)` for the given lift data, representatives
/// are the matrices of `theta^i` in basis `B`; otherwise they are Galois lifts
/// built from an `F`-basis.
pub fn normalizer_cosets(
    ideal: &IdealiserResult,
    lift: Option<(&KBasis, GaloisGen)>,
    f: &FieldTower,
) -> Result<Vec<Coset>> {
    let (fdeg, z) = match (ideal.structure, &ideal.primitive) {
        (Structure::MatrixAlgebra { f: fd, .. }, Some(z)) => (fd, z),
        _ => {
            return Err(Error::Unsupported(format!(
                "{} idealiser is not a full matrix algebra over a field",
                ideal.side
            )))
        }
    };
    let standard = lift
        .filter(|_| ideal.n == f.ell() as usize)
        .filter(|(basis, _)| {
            let zeta = basis.combine(f, &z.apply(&basis.coords(f, FieldElem::ONE), f));
            code::regular_rep(zeta, basis, f) == *z
        });
    let cosets: Vec<Coset> = match standard {
        Some((basis, theta)) => (0..fdeg)
            .map(|i| {
                let images: Vec<FieldElem> = basis
                    .elements()
                    .iter()
                    .map(|&b| f.theta_pow(theta, i as i64, b))
                    .collect();
                Coset {
                    label: theta.exponent() * i % fdeg,
                    t: basis.coordinate_matrix(f, &images),
                }
            })
            .collect(),
        None => {
            let fs = FStructure::new(z, fdeg as usize, f);
            (0..fdeg)
                .map(|j| Coset {
                    label: j,
                    t: fs.galois_lift(j, f),
                })
                .collect()
        }
    };
    let q = f.q() as u64;
    for c in &cosets {
        let ok = linalg::inverse(&c.t, f)
            .map(|ti| c.t.mul(z, f).mul(&ti, f) == mat_frobenius(z, q, c.label, f))
            .unwrap_or(false);
        if !ok {
            return Err(Error::StructureViolation(format!(
                "coset representative {} does not act as the Galois automorphism",
                c.label
            )));
        }
    }
    Ok(cosets)
}

/// `[N(A) : A^x]` inside `GL_n(k)`, when known.
fn normalizer_index(ideal: &IdealiserResult, q: u64) -> Option<BigUint> {
    match ideal.structure {
        Structure::MatrixAlgebra { f, .. } => Some(BigUint::from(f)),
        Structure::Field { f, s } => {
            let qf = q.pow(f);
            Some(BigUint::from(f) * gl_order(s as usize, qf) / BigUint::from(qf - 1))
        }
        Structure::Other => None,
    }
}

/// The code `{X^T : X in C}` of shape `m x ell`.
pub fn transpose_code(c: &MatrixCode, f: &FieldTower) -> MatrixCode {
    let mats: Vec<Vec<FieldElem>> = c
        .basis_matrices()
        .iter()
        .map(|x| x.transpose().into_data())
        .collect();
    let space = SubspaceBasis::from_vectors(c.ell() * c.m(), mats.iter().map(|v| v.as_slice()), f);
    MatrixCode::new(c.m(), c.ell(), space).expect("same ambient")
}

/// Maps an automorphism or equivalence pair `(g, h)` of transposed codes to
/// the pair `(h^-T, g^-T)` of the original ones.
pub fn transpose_pair(g: &Mat, h: &Mat, f: &FieldTower) -> (Mat, Mat) {
    let gi = linalg::inverse(g, f).expect("invertible");
    let hi = linalg::inverse(h, f).expect("invertible");
    (hi.transpose(), gi.transpose())
}

#[derive(Clone, Copy, Debug)]
pub struct AutOptions {
    /// Side whose normalizer is searched; `None` prefers the left.
    pub side: Option<Side>,
    pub seed: u64,
}

impl Default for AutOptions {
    fn default() -> Self {
        AutOptions {
            side: None,
            seed: DEFAULT_SEED,
        }
    }
}

#[derive(Clone, Debug)]
pub struct AutGroupResult {
    /// Side whose normalizer cosets were searched.
    pub side: Side,
    pub left: IdealiserResult,
    pub right: IdealiserResult,
    pub generators: Vec<(Mat, Mat)>,
    /// Exact when `unresolved_cosets` is empty, otherwise a lower bound.
    pub order: BigUint,
    pub left_unit_order: BigUint,
    pub right_unit_order: BigUint,
    pub coset_count: u32,
    /// Labels of the cosets meeting `Aut(C)`, as Frobenius exponents modulo `coset_count`.
    pub realized_cosets: Vec<u32>,
    pub unresolved_cosets: Vec<u32>,
    pub n_bound: u64,
    /// False when the other side's normalizer index is unknown and
    /// `n_bound` is just `coset_count`.
    pub n_bound_exact: bool,
}

impl AutGroupResult {
    pub fn is_exact(&self) -> bool {
        self.unresolved_cosets.is_empty()
    }
}

fn choose_side(
    left: &IdealiserResult,
    right: &IdealiserResult,
    pref: Option<Side>,
    q: u32,
) -> Result<Side> {
    let matrix = |i: &IdealiserResult| matches!(i.structure, Structure::MatrixAlgebra { .. });
    match pref {
        Some(side) => {
            let ideal = if side == Side::Left { left } else { right };
            if matrix(ideal) {
                Ok(side)
            } else {
                Err(Error::Unsupported(format!(
                    "{side} idealiser is {}",
                    ideal.structure.describe(q)
                )))
            }
        }
        None if matrix(left) => Ok(Side::Left),
        None if matrix(right) => Ok(Side::Right),
        None => Err(Error::Unsupported(
            "neither idealiser is a full matrix algebra over a field".to_string(),
        )),
    }
}

fn is_subgroup(labels: &[u32], modulus: u32) -> bool {
    labels.contains(&0)
        && labels.iter().all(|&a| {
            labels
                .iter()
                .all(|&b| labels.contains(&((a + b) % modulus)))
        })
}

/// `Aut(C) = <(g, 1), (1, h), (t_j, s_j)>` with `g`, `h` running over unit
/// generators of the idealisers and one pair per realized normalizer coset.
pub fn automorphism_group(
    c: &MatrixCode,
    f: &FieldTower,
    lift: Option<(&KBasis, GaloisGen)>,
    opts: AutOptions,
) -> Result<AutGroupResult> {
    let left = idealiser(c, Side::Left, f)?;
    let right = idealiser(c, Side::Right, f)?;
    let side = choose_side(&left, &right, opts.side, f.q())?;
    let unit_order = |i: &IdealiserResult| {
        i.unit_order
            .clone()
            .ok_or_else(|| Error::Unsupported(format!("unit group of the {} idealiser", i.side)))
    };
    let left_unit_order = unit_order(&left)?;
    let right_unit_order = unit_order(&right)?;

    let (work, work_ideal, work_lift) = match side {
        Side::Left => (c.clone(), left.clone(), lift),
        Side::Right => {
            let ct = transpose_code(c, f);
            let ideal = idealiser(&ct, Side::Left, f)?;
            (ct, ideal, None)
        }
    };
    let cosets = normalizer_cosets(&work_ideal, work_lift, f)?;
    let coset_count = cosets.len() as u32;
    let searches: Vec<(u32, InvertibleSearch, Mat)> = cosets
        .par_iter()
        .map(|cs| {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed.wrapping_add(cs.label as u64));
            let target = work.left_mul(&cs.t, f);
            let span = transporter(&work, &target, Side::Right, f).expect("same shape");
            let found = linalg::invertible_in_span(&span, work.m(), f, Scalars::Base, &mut rng);
            (cs.label, found, cs.t.clone())
        })
        .collect();

    let mut generators: Vec<(Mat, Mat)> = Vec::new();
    let (id_l, id_r) = (Mat::identity(c.ell()), Mat::identity(c.m()));
    for g in unit_generators(&left, f)? {
        generators.push((g, id_r.clone()));
    }
    for h in unit_generators(&right, f)? {
        generators.push((id_l.clone(), h));
    }
    let mut realized = Vec::new();
    let mut unresolved = Vec::new();
    for (label, found, t) in searches {
        match found {
            InvertibleSearch::Found(h) => {
                realized.push(label);
                if label != 0 {
                    generators.push(match side {
                        Side::Left => (t, h),
                        Side::Right => transpose_pair(&t, &h, f),
                    });
                }
            }
            InvertibleSearch::Absent => {}
            InvertibleSearch::Unknown => unresolved.push(label),
        }
    }
    realized.sort_unstable();
    unresolved.sort_unstable();

    if let Some((g, h)) = generators.iter().find(|(g, h)| !c.is_automorphism(g, h, f)) {
        return Err(Error::StructureViolation(format!(
            "generator pair fails verification: g = {g:?}, h = {h:?}"
        )));
    }
    let q = f.q() as u64;
    let other = if side == Side::Left { &right } else { &left };
    let (n_bound, n_bound_exact) = match normalizer_index(other, q) {
        Some(idx) => (
            BigUint::from(coset_count)
                .gcd(&idx)
                .to_u64()
                .expect("at most coset_count"),
            true,
        ),
        None => (coset_count as u64, false),
    };
    if unresolved.is_empty() {
        if !is_subgroup(&realized, coset_count) {
            return Err(Error::StructureViolation(format!(
                "realized cosets {realized:?} do not form a subgroup"
            )));
        }
        if n_bound % realized.len() as u64 != 0 {
            return Err(Error::StructureViolation(format!(
                "{} realized cosets do not divide n(C) = {n_bound}",
                realized.len()
            )));
        }
    }
    let order = &left_unit_order * &right_unit_order * BigUint::from(realized.len());
    Ok(AutGroupResult {
        side,
        left,
        right,
        generators,
        order,
        left_unit_order,
        right_unit_order,
        coset_count,
        realized_cosets: realized,
        unresolved_cosets: unresolved,
        n_bound,
        n_bound_exact,
    })
}

/// Comparison of a computed automorphism group with the predicted
/// `(GL_s(F) x M^x) . G`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StructureCheck {
    pub splitting_degree: u32,
    pub s: u32,
    pub stabilizer_degree: u32,
    /// `G` as Frobenius exponents modulo `[F : k]`.
    pub galois_part: Vec<u32>,
    pub predicted_order: BigUint,
}

pub fn structure_check(
    params: &GabidulinParams,
    basis: &KBasis,
    f: &FieldTower,
    aut: &AutGroupResult,
) -> Result<StructureCheck> {
    let violation = |msg: String| Err(Error::StructureViolation(msg));
    if aut.side != Side::Left {
        return Err(Error::Unsupported(
            "structure check needs the left normalizer search".to_string(),
        ));
    }
    let sf = gabidulin::splitting_field(&params.v, f);
    let mf = gabidulin::stabilizer_subfield(&params.v, basis, f);
    let ell = f.ell() as usize;
    let s = f.ell() / sf.degree;
    let q = f.q() as u64;
    if !aut
        .left
        .contains(&code::regular_rep(f.generator(), basis, f), f)
    {
        return violation("left idealiser misses Delta_B(K)".to_string());
    }
    let centralizer = commutant(
        &[code::regular_rep(f.subfield_primitive(sf), basis, f)],
        ell,
        f,
    );
    if centralizer != aut.left.algebra || centralizer.dim() != (s * s * sf.degree) as usize {
        return violation(format!(
            "left idealiser of dimension {} is not the centralizer of Delta_B(F), [F:k] = {}",
            aut.left.dim(),
            sf.degree
        ));
    }
    if aut.left.structure != (Structure::MatrixAlgebra { f: sf.degree, s }) {
        return violation(format!(
            "left idealiser recognized as {:?}",
            aut.left.structure
        ));
    }
    if aut.right.structure.field_degree() != Some(mf.degree) {
        return violation(format!(
            "right idealiser {:?} is not a field of degree {}",
            aut.right.structure, mf.degree
        ));
    }
    let gl = gl_order(s as usize, q.pow(sf.degree));
    let mu = BigUint::from(q.pow(mf.degree) - 1);
    if aut.left_unit_order != gl || aut.right_unit_order != mu {
        return violation(format!(
            "unit orders {} and {} differ from {gl} and {mu}",
            aut.left_unit_order, aut.right_unit_order
        ));
    }
    if aut.coset_count != sf.degree || !is_subgroup(&aut.realized_cosets, sf.degree) {
        return violation(format!(
            "realized cosets {:?} are not a subgroup of Gal(F/k)",
            aut.realized_cosets
        ));
    }
    let predicted_order = gl * mu * BigUint::from(aut.realized_cosets.len());
    if aut.is_exact() && aut.order != predicted_order {
        return violation(format!(
            "order {} differs from {predicted_order}",
            aut.order
        ));
    }
    Ok(StructureCheck {
        splitting_degree: sf.degree,
        s,
        stabilizer_degree: mf.degree,
        galois_part: aut.realized_cosets.clone(),
        predicted_order,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Equivalence {
    /// `g^-1 D h = C`, verified.
    Equivalent {
        g: Mat,
        h: Mat,
    },
    /// Certain: an invariant differs or every search was exhaustive.
    NotEquivalent(String),
    Unknown(String),
}

#[derive(Clone, Copy, Debug)]
pub struct EquivOptions {
    pub seed: u64,
    pub word_budget: u64,
}

impl Default for EquivOptions {
    fn default() -> Self {
        EquivOptions {
            seed: DEFAULT_SEED,
            word_budget: code::DEFAULT_WORD_BUDGET,
        }
    }
}

/// Decides whether `C = g^-1 D h` for some invertible `g`, `h`.
pub fn equivalent(
    c: &MatrixCode,
    d: &MatrixCode,
    basis: &KBasis,
    f: &FieldTower,
    lift: Option<(&KBasis, GaloisGen)>,
    opts: EquivOptions,
) -> Result<Equivalence> {
    if c.ell() != d.ell() || c.m() != d.m() {
        return Err(Error::ShapeMismatch(format!(
            "{}x{} code against {}x{} code",
            c.ell(),
            c.m(),
            d.ell(),
            d.m()
        )));
    }
    if c.same_space(d) {
        return Ok(Equivalence::Equivalent {
            g: Mat::identity(c.ell()),
            h: Mat::identity(c.m()),
        });
    }
    if c.dim() != d.dim() {
        return Ok(Equivalence::NotEquivalent(format!(
            "dimensions {} and {} differ",
            c.dim(),
            d.dim()
        )));
    }
    let dist = |x: &MatrixCode| match code::min_distance(x, basis, f, opts.word_budget) {
        Ok(v) => Ok(Some(v)),
        Err(Error::BudgetExceeded { .. }) => Ok(None),
        Err(e) => Err(e),
    };
    if let (Some(a), Some(b)) = (dist(c)?, dist(d)?) {
        if a != b {
            return Ok(Equivalence::NotEquivalent(format!(
                "minimum distances {a} and {b} differ"
            )));
        }
    }
    let (lc, ld) = (idealiser(c, Side::Left, f)?, idealiser(d, Side::Left, f)?);
    let (rc, rd) = (idealiser(c, Side::Right, f)?, idealiser(d, Side::Right, f)?);
    for (x, y) in [(&lc, &ld), (&rc, &rd)] {
        if x.dim() != y.dim() || x.structure != y.structure || x.center.dim() != y.center.dim() {
            return Ok(Equivalence::NotEquivalent(format!(
                "{} idealisers differ",
                x.side
            )));
        }
    }
    let side = choose_side(&lc, &rc, None, f.q())?;
    let result = match side {
        Side::Left => equivalent_left(c, d, &lc, &ld, lift, f, opts.seed)?,
        Side::Right => {
            let (ct, dt) = (transpose_code(c, f), transpose_code(d, f));
            let lct = idealiser(&ct, Side::Left, f)?;
            let ldt = idealiser(&dt, Side::Left, f)?;
            match equivalent_left(&ct, &dt, &lct, &ldt, None, f, opts.seed)? {
                Equivalence::Equivalent { g, h } => {
                    let (g, h) = transpose_pair(&g, &h, f);
                    Equivalence::Equivalent { g, h }
                }
                other => other,
            }
        }
    };
    if let Equivalence::Equivalent { g, h } = &result {
        let ok = d
            .transformed(g, h, f)
            .map(|x| x.same_space(c))
            .unwrap_or(false)
            && linalg::is_invertible(h, f);
        if !ok {
            return Err(Error::StructureViolation(
                "equivalence witness fails verification".to_string(),
            ));
        }
    }
    Ok(result)
}

fn equivalent_left(
    c: &MatrixCode,
    d: &MatrixCode,
    lc: &IdealiserResult,
    ld: &IdealiserResult,
    lift: Option<(&KBasis, GaloisGen)>,
    f: &FieldTower,
    seed: u64,
) -> Result<Equivalence> {
    let n = lc.n;
    let zc = lc.primitive.as_ref().expect("recognized matrix algebra");
    let fdeg = lc.center.dim();
    // minimal polynomial of zc as the kernel of its power columns
    let pows = powers(zc, fdeg + 1, f);
    let cols: Vec<Vec<FieldElem>> = pows.iter().map(|p| p.data().to_vec()).collect();
    let relation = linalg::kernel(&Mat::from_rows(n * n, &cols).transpose(), f);
    let minpoly = relation.basis().row(0).to_vec();
    let root = linalg::enumerate_span(&ld.center, f, &f.base_elems())
        .into_iter()
        .skip(1)
        .map(|v| Mat::from_vec(n, n, v))
        .find(|y| {
            let ys = powers(y, fdeg + 1, f);
            ys.iter()
                .zip(&minpoly)
                .fold(Mat::zeros(n, n), |acc, (p, &c)| acc.add(&p.scale(c, f), f))
                .is_zero()
        });
    let Some(y) = root else {
        return Ok(Equivalence::NotEquivalent(
            "idealiser centers are not conjugate".to_string(),
        ));
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let space = intertwiners(&[(zc, &y)], n, f);
    let x0 = match linalg::invertible_in_span(&space, n, f, Scalars::Base, &mut rng) {
        InvertibleSearch::Found(x) => x,
        InvertibleSearch::Absent => {
            return Ok(Equivalence::NotEquivalent(
                "left idealisers are not conjugate".to_string(),
            ))
        }
        InvertibleSearch::Unknown => {
            return Ok(Equivalence::Unknown(
                "conjugator search was inconclusive".to_string(),
            ))
        }
    };
    let mut inconclusive = false;
    for cs in normalizer_cosets(lc, lift, f)? {
        let g = x0.mul(&cs.t, f);
        let target = c.left_mul(&g, f);
        let span = transporter(d, &target, Side::Right, f)?;
        match linalg::invertible_in_span(&span, d.m(), f, Scalars::Base, &mut rng) {
            InvertibleSearch::Found(h) => return Ok(Equivalence::Equivalent { g, h }),
            InvertibleSearch::Absent => {}
            InvertibleSearch::Unknown => inconclusive = true,
        }
    }
    Ok(if inconclusive {
        Equivalence::Unknown("transporter search was inconclusive".to_string())
    } else {
        Equivalence::NotEquivalent(
            "no normalizer coset admits an invertible transporter".to_string(),
        )
    })
}

/// Every element of `GL_n(k)`, depth-first over rows outside the span of
/// the rows chosen so far.
pub fn general_linear_group(n: usize, f: &FieldTower) -> Vec<Mat> {
    let elems = f.base_elems();
    let q = elems.len();
    let count = q.pow(n as u32);
    let vecs: Vec<Vec<FieldElem>> = (0..count)
        .map(|mut i| {
            (0..n)
                .map(|_| {
                    let d = i % q;
                    i /= q;
                    elems[d]
                })
                .collect()
        })
        .collect();
    let index: HashMap<&[FieldElem], usize> = vecs
        .iter()
        .enumerate()
        .map(|(i, v)| (v.as_slice(), i))
        .collect();
    let add = |a: usize, b: usize| {
        let v: Vec<FieldElem> = vecs[a]
            .iter()
            .zip(&vecs[b])
            .map(|(&x, &y)| f.add(x, y))
            .collect();
        index[v.as_slice()]
    };
    let add_table: Vec<Vec<usize>> = (0..count)
        .map(|a| (0..count).map(|b| add(a, b)).collect())
        .collect();
    let smul: Vec<Vec<usize>> = elems
        .iter()
        .map(|&c| {
            (0..count)
                .map(|a| {
                    let v: Vec<FieldElem> = vecs[a].iter().map(|&x| f.mul(c, x)).collect();
                    index[v.as_slice()]
                })
                .collect()
        })
        .collect();

    let mut out = Vec::new();
    let mut rows = Vec::with_capacity(n);
    let mut span = vec![0usize];
    dfs(n, &vecs, &add_table, &smul, &mut rows, &mut span, &mut out);
    out
}

fn dfs(
    n: usize,
    vecs: &[Vec<FieldElem>],
    add: &[Vec<usize>],
    smul: &[Vec<usize>],
    rows: &mut Vec<usize>,
    span: &mut [usize],
    out: &mut Vec<Mat>,
) {
    if rows.len() == n {
        let data = rows.iter().flat_map(|&r| vecs[r].iter().copied()).collect();
        out.push(Mat::from_vec(n, n, data));
        return;
    }
    let mut in_span = vec![false; vecs.len()];
    for &s in span.iter() {
        in_span[s] = true;
    }
    for cand in 0..vecs.len() {
        if in_span[cand] {
            continue;
        }
        let mut next = Vec::with_capacity(span.len() * smul.len());
        for &s in span.iter() {
            for mul in smul {
                next.push(add[s][mul[cand]]);
            }
        }
        rows.push(cand);
        dfs(n, vecs, add, smul, rows, &mut next, out);
        rows.pop();
    }
}

/// Exhaustive automorphism list. Pair `(a, b)` stands for
/// `(left[a], right[b])`; pairs are sorted.
#[derive(Clone, Debug)]
pub struct OracleResult {
    pub left: Vec<Mat>,
    pub right: Vec<Mat>,
    pub pairs: Vec<(u32, u32)>,
}

impl OracleResult {
    pub fn order(&self) -> u64 {
        self.pairs.len() as u64
    }

    pub fn contains(&self, g: &Mat, h: &Mat) -> bool {
        let a = self.left.iter().position(|x| x == g);
        let b = self.right.iter().position(|x| x == h);
        match (a, b) {
            (Some(a), Some(b)) => self.pairs.binary_search(&(a as u32, b as u32)).is_ok(),
            _ => false,
        }
    }

    pub fn pairs(&self) -> impl Iterator<Item = (&Mat, &Mat)> {
        self.pairs
            .iter()
            .map(|&(a, b)| (&self.left[a as usize], &self.right[b as usize]))
    }
}

/// Every `(g, h)` with `g^-1 C h = C`, provided `|GL_ell(k)| * |GL_m(k)| <= budget`.
pub fn brute_force_aut(c: &MatrixCode, f: &FieldTower, budget: u64) -> Result<OracleResult> {
    let q = f.q() as u64;
    let total = gl_order(c.ell(), q) * gl_order(c.m(), q);
    if total > BigUint::from(budget) {
        return Err(Error::BudgetExceeded {
            budget,
            bound: None,
        });
    }
    let left = general_linear_group(c.ell(), f);
    let right = general_linear_group(c.m(), f);
    let index: HashMap<&Mat, u32> = left
        .iter()
        .enumerate()
        .map(|(i, g)| (g, i as u32))
        .collect();
    let inverse_of: Vec<u32> = left
        .iter()
        .map(|g| index[&linalg::inverse(g, f).expect("invertible")])
        .collect();
    let xs = c.basis_matrices();
    let parity = c.space().parity_check(f);
    let in_code = |x: &Mat| {
        parity
            .row_vecs()
            .all(|h| linalg::dot(h, x.data(), f).is_zero())
    };
    let per_g: Vec<Vec<(u32, u32)>> = (0..left.len())
        .into_par_iter()
        .map(|a| {
            let ginv = &left[inverse_of[a] as usize];
            let ws: Vec<Mat> = xs.iter().map(|x| ginv.mul(x, f)).collect();
            right
                .iter()
                .enumerate()
                .filter(|(_, h)| ws.iter().all(|w| in_code(&w.mul(h, f))))
                .map(|(b, _)| (a as u32, b as u32))
                .collect()
        })
        .collect();
    Ok(OracleResult {
        pairs: per_g.into_iter().flatten().collect(),
        left,
        right,
    })
}
