//! Dense linear algebra over `k` and `K`.
//!
//! All entries are elements of the tower's top field `K`; a matrix is "over
//! `k`" when its entries happen to lie in the base field. Row spaces are kept
//! in reduced row-echelon form, which is canonical, so subspace equality is
//! plain structural equality of [`SubspaceBasis`] values.

use rand::Rng;

use crate::error::{Error, Result};
use crate::field::{FieldElem, FieldTower};

/// Spans up to this size are searched exhaustively for invertible elements.
pub const EXHAUSTIVE_LIMIT: u64 = 1 << 16;
/// Random samples drawn before falling back to exhaustive search.
pub const RANDOM_SAMPLES: usize = 1000;
/// Largest span enumerated after random sampling failed.
pub const FALLBACK_LIMIT: u64 = 1 << 24;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<FieldElem>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: vec![FieldElem::ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m.set(i, i, FieldElem::ONE);
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<FieldElem>) -> Self {
        assert_eq!(rows * cols, data.len(), "matrix data length");
        Mat { rows, cols, data }
    }

    pub fn from_rows(cols: usize, rows: &[Vec<FieldElem>]) -> Self {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged rows");
            data.extend_from_slice(r);
        }
        Mat {
            rows: rows.len(),
            cols,
            data,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> FieldElem {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: FieldElem) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[FieldElem] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> impl Iterator<Item = &[FieldElem]> {
        (0..self.rows).map(move |i| self.row(i))
    }

    /// Row-major entries; this is also the flattening `k^(r x c) = k^(rc)`.
    pub fn data(&self) -> &[FieldElem] {
        &self.data
    }

    pub fn into_data(self) -> Vec<FieldElem> {
        self.data
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn transpose(&self) -> Mat {
        let mut t = Mat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn mul(&self, other: &Mat, f: &FieldTower) -> Mat {
        assert_eq!(self.cols, other.rows, "matrix product shapes");
        let mut out = Mat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for c in 0..self.cols {
                let a = self.get(i, c);
                if a.is_zero() {
                    continue;
                }
                let orow = other.row(c);
                let base = i * other.cols;
                for (j, &b) in orow.iter().enumerate() {
                    if !b.is_zero() {
                        out.data[base + j] = f.add(out.data[base + j], f.mul(a, b));
                    }
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Mat, f: &FieldTower) -> Mat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f.add(a, b))
                .collect(),
        }
    }

    pub fn sub(&self, other: &Mat, f: &FieldTower) -> Mat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f.sub(a, b))
                .collect(),
        }
    }

    pub fn scale(&self, c: FieldElem, f: &FieldTower) -> Mat {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&a| f.mul(c, a)).collect(),
        }
    }

    pub fn map(&self, g: impl Fn(FieldElem) -> FieldElem) -> Mat {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&a| g(a)).collect(),
        }
    }

    pub fn pow(&self, mut e: u64, f: &FieldTower) -> Mat {
        let mut acc = Mat::identity(self.rows);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base, f);
            }
            base = base.mul(&base, f);
            e >>= 1;
        }
        acc
    }

    /// Matrix-vector product `self * v`.
    pub fn apply(&self, v: &[FieldElem], f: &FieldTower) -> Vec<FieldElem> {
        assert_eq!(self.cols, v.len());
        (0..self.rows).map(|i| dot(self.row(i), v, f)).collect()
    }

    pub fn vstack(&self, other: &Mat) -> Mat {
        assert_eq!(self.cols, other.cols);
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Mat {
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        }
    }
}

pub fn dot(a: &[FieldElem], b: &[FieldElem], f: &FieldTower) -> FieldElem {
    a.iter()
        .zip(b)
        .fold(FieldElem::ZERO, |acc, (&x, &y)| f.add(acc, f.mul(x, y)))
}

/// Reduced row-echelon form of `m` and its pivot columns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Echelon {
    pub mat: Mat,
    pub pivots: Vec<usize>,
}

impl Echelon {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }
}

fn eliminate(m: &mut Mat, f: &FieldTower, reduced: bool) -> Vec<usize> {
    let (rows, cols) = (m.rows, m.cols);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(piv) = (r..rows).find(|&i| !m.get(i, c).is_zero()) else {
            continue;
        };
        if piv != r {
            for j in 0..cols {
                m.data.swap(piv * cols + j, r * cols + j);
            }
        }
        let s = f.inv(m.get(r, c)).expect("nonzero pivot");
        for j in c..cols {
            let x = m.get(r, j);
            m.set(r, j, f.mul(s, x));
        }
        let start = if reduced { 0 } else { r + 1 };
        for i in start..rows {
            if i == r {
                continue;
            }
            let factor = m.get(i, c);
            if factor.is_zero() {
                continue;
            }
            let nf = f.neg(factor);
            for j in c..cols {
                let pr = m.data[r * cols + j];
                if !pr.is_zero() {
                    m.data[i * cols + j] = f.add(m.data[i * cols + j], f.mul(nf, pr));
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rref(m: &Mat, f: &FieldTower) -> Echelon {
    let mut a = m.clone();
    let pivots = eliminate(&mut a, f, true);
    Echelon { mat: a, pivots }
}

pub fn rank(m: &Mat, f: &FieldTower) -> usize {
    let mut a = m.clone();
    eliminate(&mut a, f, false).len()
}

pub fn is_invertible(m: &Mat, f: &FieldTower) -> bool {
    m.is_square() && rank(m, f) == m.rows
}

pub fn inverse(m: &Mat, f: &FieldTower) -> Option<Mat> {
    if !m.is_square() {
        return None;
    }
    let n = m.rows;
    let mut aug = Mat::zeros(n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            aug.set(i, j, m.get(i, j));
        }
        aug.set(i, n + i, FieldElem::ONE);
    }
    let e = rref(&aug, f);
    if e.pivots.len() < n || e.pivots[n - 1] != n - 1 {
        return None;
    }
    let mut inv = Mat::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            inv.set(i, j, e.mat.get(i, n + j));
        }
    }
    Some(inv)
}

/// Canonical basis of a subspace of `F^ambient`: the nonzero rows of an RREF.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SubspaceBasis {
    ambient: usize,
    basis: Mat,
    pivots: Vec<usize>,
}

impl SubspaceBasis {
    pub fn zero(ambient: usize) -> Self {
        SubspaceBasis {
            ambient,
            basis: Mat::zeros(0, ambient),
            pivots: Vec::new(),
        }
    }

    pub fn full(ambient: usize) -> Self {
        SubspaceBasis {
            ambient,
            basis: Mat::identity(ambient),
            pivots: (0..ambient).collect(),
        }
    }

    /// Row space of `generators`.
    pub fn span(generators: &Mat, f: &FieldTower) -> Self {
        let e = rref(generators, f);
        let r = e.rank();
        let data = e.mat.data[..r * generators.cols].to_vec();
        SubspaceBasis {
            ambient: generators.cols,
            basis: Mat::from_vec(r, generators.cols, data),
            pivots: e.pivots,
        }
    }

    /// Wraps rows already in reduced row-echelon form.
    pub fn from_echelon_rows(rows: Mat) -> Self {
        let pivots = rows
            .row_vecs()
            .map(|r| {
                r.iter()
                    .position(|x| !x.is_zero())
                    .expect("nonzero echelon row")
            })
            .collect();
        SubspaceBasis {
            ambient: rows.cols,
            basis: rows,
            pivots,
        }
    }

    pub fn from_vectors<'a>(
        ambient: usize,
        vectors: impl IntoIterator<Item = &'a [FieldElem]>,
        f: &FieldTower,
    ) -> Self {
        let mut data = Vec::new();
        let mut rows = 0;
        for v in vectors {
            assert_eq!(v.len(), ambient);
            data.extend_from_slice(v);
            rows += 1;
        }
        Self::span(&Mat::from_vec(rows, ambient, data), f)
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.rows
    }

    pub fn basis(&self) -> &Mat {
        &self.basis
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn vectors(&self) -> impl Iterator<Item = &[FieldElem]> {
        self.basis.row_vecs()
    }

    fn residual(&self, v: &[FieldElem], f: &FieldTower) -> (Vec<FieldElem>, Vec<FieldElem>) {
        let mut r = v.to_vec();
        let mut coeffs = Vec::with_capacity(self.dim());
        for (i, &pc) in self.pivots.iter().enumerate() {
            let c = r[pc];
            coeffs.push(c);
            if c.is_zero() {
                continue;
            }
            let nc = f.neg(c);
            for (x, &b) in r.iter_mut().zip(self.basis.row(i)) {
                if !b.is_zero() {
                    *x = f.add(*x, f.mul(nc, b));
                }
            }
        }
        (r, coeffs)
    }

    pub fn contains(&self, v: &[FieldElem], f: &FieldTower) -> bool {
        v.len() == self.ambient && self.residual(v, f).0.iter().all(|x| x.is_zero())
    }

    /// Coefficients of `v` in the stored basis, or `None` if `v` is not in the span.
    pub fn solve_membership(&self, v: &[FieldElem], f: &FieldTower) -> Option<Vec<FieldElem>> {
        if v.len() != self.ambient {
            return None;
        }
        let (r, coeffs) = self.residual(v, f);
        r.iter().all(|x| x.is_zero()).then_some(coeffs)
    }

    pub fn combination(&self, coeffs: &[FieldElem], f: &FieldTower) -> Vec<FieldElem> {
        let mut out = vec![FieldElem::ZERO; self.ambient];
        for (row, &c) in self.vectors().zip(coeffs) {
            if c.is_zero() {
                continue;
            }
            for (o, &b) in out.iter_mut().zip(row) {
                *o = f.add(*o, f.mul(c, b));
            }
        }
        out
    }

    pub fn sum(&self, other: &SubspaceBasis, f: &FieldTower) -> Result<SubspaceBasis> {
        self.check_ambient(other)?;
        Ok(Self::span(&self.basis.vstack(&other.basis), f))
    }

    fn check_ambient(&self, other: &SubspaceBasis) -> Result<()> {
        if self.ambient != other.ambient {
            return Err(Error::DimensionMismatch(format!(
                "ambient dimensions {} and {}",
                self.ambient, other.ambient
            )));
        }
        Ok(())
    }

    /// Intersection by Zassenhaus' algorithm: reduce `[[U, U], [W, 0]]`; the
    /// rows whose left half vanishes span `U ∩ W` in their right half.
    pub fn intersect(&self, other: &SubspaceBasis, f: &FieldTower) -> Result<SubspaceBasis> {
        self.check_ambient(other)?;
        let n = self.ambient;
        let rows = self.dim() + other.dim();
        let mut z = Mat::zeros(rows, 2 * n);
        for (i, u) in self.vectors().enumerate() {
            for (j, &x) in u.iter().enumerate() {
                z.set(i, j, x);
                z.set(i, n + j, x);
            }
        }
        for (i, w) in other.vectors().enumerate() {
            for (j, &x) in w.iter().enumerate() {
                z.set(self.dim() + i, j, x);
            }
        }
        let e = rref(&z, f);
        let mut data = Vec::new();
        let mut count = 0;
        for (i, &pc) in e.pivots.iter().enumerate() {
            if pc >= n {
                data.extend_from_slice(&e.mat.row(i)[n..]);
                count += 1;
            }
        }
        Ok(Self::span(&Mat::from_vec(count, n, data), f))
    }

    /// Rows `h` with `h . b = 0` for every basis vector `b`.
    pub fn parity_check(&self, f: &FieldTower) -> Mat {
        kernel(&self.basis, f).basis
    }
}

/// Right kernel `{x : m x = 0}`.
pub fn kernel(m: &Mat, f: &FieldTower) -> SubspaceBasis {
    let e = rref(m, f);
    let n = m.cols;
    let mut is_pivot = vec![false; n];
    for &p in &e.pivots {
        is_pivot[p] = true;
    }
    let free: Vec<usize> = (0..n).filter(|&c| !is_pivot[c]).collect();
    let mut out = Mat::zeros(free.len(), n);
    for (r, &fc) in free.iter().enumerate() {
        out.set(r, fc, FieldElem::ONE);
        for (i, &pc) in e.pivots.iter().enumerate() {
            out.set(r, pc, f.neg(e.mat.get(i, fc)));
        }
    }
    SubspaceBasis::span(&out, f)
}

/// Which field the coefficients of a span range over.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scalars {
    Base,
    Extension,
}

impl Scalars {
    pub fn elements(self, f: &FieldTower) -> Vec<FieldElem> {
        match self {
            Scalars::Base => f.base_elems(),
            Scalars::Extension => f.elements().collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum InvertibleSearch {
    Found(Mat),
    /// Exhaustive search proved there is none.
    Absent,
    /// Random sampling failed and the span is too large to enumerate.
    Unknown,
}

fn span_size(scalars: usize, dim: usize) -> Option<u64> {
    (scalars as u64).checked_pow(dim as u32)
}

fn as_square(v: &[FieldElem], n: usize) -> Mat {
    Mat::from_vec(n, n, v.to_vec())
}

/// Searches the span of `span` (vectors of length `n*n`, read row-major as
/// `n x n` matrices) for an invertible matrix.
pub fn invertible_in_span<R: Rng + ?Sized>(
    span: &SubspaceBasis,
    n: usize,
    f: &FieldTower,
    scalars: Scalars,
    rng: &mut R,
) -> InvertibleSearch {
    assert_eq!(span.ambient(), n * n, "span of n x n matrices");
    if span.dim() == 0 {
        return if n == 0 {
            InvertibleSearch::Found(Mat::identity(0))
        } else {
            InvertibleSearch::Absent
        };
    }
    let elems = scalars.elements(f);
    let size = span_size(elems.len(), span.dim());
    if matches!(size, Some(s) if s <= EXHAUSTIVE_LIMIT) {
        return exhaustive_invertible(span, n, f, &elems);
    }
    for _ in 0..RANDOM_SAMPLES {
        let coeffs: Vec<FieldElem> = (0..span.dim())
            .map(|_| elems[rng.gen_range(0..elems.len())])
            .collect();
        let m = as_square(&span.combination(&coeffs, f), n);
        if is_invertible(&m, f) {
            return InvertibleSearch::Found(m);
        }
    }
    if matches!(size, Some(s) if s <= FALLBACK_LIMIT) {
        return exhaustive_invertible(span, n, f, &elems);
    }
    InvertibleSearch::Unknown
}

fn exhaustive_invertible(
    span: &SubspaceBasis,
    n: usize,
    f: &FieldTower,
    elems: &[FieldElem],
) -> InvertibleSearch {
    let dim = span.dim();
    let mut digits = vec![0usize; dim];
    loop {
        // odometer increment, least significant digit first
        let mut i = 0;
        while i < dim {
            digits[i] += 1;
            if digits[i] < elems.len() {
                break;
            }
            digits[i] = 0;
            i += 1;
        }
        if i == dim {
            return InvertibleSearch::Absent;
        }
        let coeffs: Vec<FieldElem> = digits.iter().map(|&d| elems[d]).collect();
        let m = as_square(&span.combination(&coeffs, f), n);
        if is_invertible(&m, f) {
            return InvertibleSearch::Found(m);
        }
    }
}

/// Every vector of the span, in odometer order of the coefficients.
pub fn enumerate_span(
    span: &SubspaceBasis,
    f: &FieldTower,
    elems: &[FieldElem],
) -> Vec<Vec<FieldElem>> {
    let dim = span.dim();
    let mut out = vec![vec![FieldElem::ZERO; span.ambient()]];
    let mut digits = vec![0usize; dim];
    loop {
        let mut i = 0;
        while i < dim {
            digits[i] += 1;
            if digits[i] < elems.len() {
                break;
            }
            digits[i] = 0;
            i += 1;
        }
        if i == dim {
            return out;
        }
        let coeffs: Vec<FieldElem> = digits.iter().map(|&d| elems[d]).collect();
        out.push(span.combination(&coeffs, f));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn gf(p: u32, n: u32) -> FieldTower {
        FieldTower::new(p, n, 1, None).unwrap()
    }

    // prime-field elements encode as themselves in every tower
    fn e(x: u32) -> FieldElem {
        FieldTower::new(7, 1, 1, None)
            .unwrap()
            .elem(x as u64)
            .unwrap()
    }

    fn random_mat(rng: &mut ChaCha8Rng, r: usize, c: usize, f: &FieldTower) -> Mat {
        let data = (0..r * c)
            .map(|_| f.elem(rng.gen_range(0..f.order() as u64)).unwrap())
            .collect();
        Mat::from_vec(r, c, data)
    }

    #[test]
    fn rref_examples() {
        let f = gf(2, 1);
        let id = Mat::identity(3);
        assert_eq!(rref(&id, &f).mat, id);
        assert_eq!(rref(&id, &f).rank(), 3);
        let z = Mat::zeros(2, 3);
        assert_eq!(rref(&z, &f).rank(), 0);
        let m = Mat::from_rows(2, &[vec![e(1), e(1)], vec![e(1), e(1)]]);
        let r = rref(&m, &f);
        assert_eq!(
            r.mat,
            Mat::from_rows(2, &[vec![e(1), e(1)], vec![e(0), e(0)]])
        );
        assert_eq!(r.rank(), 1);
    }

    #[test]
    fn kernel_examples() {
        let f = gf(2, 1);
        assert_eq!(kernel(&Mat::identity(3), &f).dim(), 0);
        assert_eq!(kernel(&Mat::zeros(2, 3), &f), SubspaceBasis::full(3));
        let k = kernel(&Mat::from_rows(3, &[vec![e(1), e(1), e(0)]]), &f);
        assert_eq!(k.dim(), 2);
        assert!(k.contains(&[e(1), e(1), e(0)], &f));
    }

    #[test]
    fn rref_is_idempotent_and_canonical() {
        let f = gf(3, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let a = random_mat(&mut rng, 4, 6, &f);
            let r1 = rref(&a, &f);
            assert_eq!(rref(&r1.mat, &f), r1);
            // mix rows with a random invertible matrix
            let g = loop {
                let g = random_mat(&mut rng, 4, 4, &f);
                if is_invertible(&g, &f) {
                    break g;
                }
            };
            assert_eq!(
                SubspaceBasis::span(&g.mul(&a, &f), &f),
                SubspaceBasis::span(&a, &f)
            );
        }
    }

    #[test]
    fn inverse_round_trip() {
        let f = FieldTower::new(2, 1, 3, None).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..30 {
            let a = random_mat(&mut rng, 3, 3, &f);
            match inverse(&a, &f) {
                Some(ai) => assert_eq!(a.mul(&ai, &f), Mat::identity(3)),
                None => assert!(rank(&a, &f) < 3),
            }
        }
    }

    #[test]
    fn intersection_identities() {
        let f = gf(3, 1);
        let u =
            SubspaceBasis::from_vectors(3, [&[e(1), e(0), e(0)][..], &[e(0), e(1), e(0)][..]], &f);
        assert_eq!(u.intersect(&u, &f).unwrap(), u);
        let a = SubspaceBasis::from_vectors(
            4,
            [&[e(1), e(0), e(0), e(0)][..], &[e(0), e(1), e(0), e(0)][..]],
            &f,
        );
        let b = SubspaceBasis::from_vectors(
            4,
            [&[e(0), e(0), e(1), e(0)][..], &[e(0), e(0), e(0), e(1)][..]],
            &f,
        );
        assert_eq!(a.intersect(&b, &f).unwrap().dim(), 0);
        assert!(a.intersect(&SubspaceBasis::zero(3), &f).is_err());
    }

    #[test]
    fn intersection_matches_enumeration() {
        let f = gf(3, 1);
        let elems = f.base_elems();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..40 {
            let du = rng.gen_range(0..5);
            let dw = rng.gen_range(0..5);
            let u = SubspaceBasis::span(&random_mat(&mut rng, du, 6, &f), &f);
            let w = SubspaceBasis::span(&random_mat(&mut rng, dw, 6, &f), &f);
            let i = u.intersect(&w, &f).unwrap();
            let s = u.sum(&w, &f).unwrap();
            assert_eq!(i.dim() + s.dim(), u.dim() + w.dim());
            let uset: std::collections::BTreeSet<_> =
                enumerate_span(&u, &f, &elems).into_iter().collect();
            let expected: Vec<_> = enumerate_span(&w, &f, &elems)
                .into_iter()
                .filter(|x| uset.contains(x))
                .collect();
            assert_eq!(expected.len() as u64, 3u64.pow(i.dim() as u32));
            for x in expected {
                assert!(i.contains(&x, &f));
            }
        }
    }

    #[test]
    fn membership_round_trip() {
        let f = FieldTower::new(3, 1, 2, None).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let s = SubspaceBasis::span(&random_mat(&mut rng, 3, 5, &f), &f);
        for (i, b) in s.vectors().enumerate() {
            let c = s.solve_membership(b, &f).unwrap();
            let unit: Vec<FieldElem> = (0..s.dim())
                .map(|j| {
                    if i == j {
                        FieldElem::ONE
                    } else {
                        FieldElem::ZERO
                    }
                })
                .collect();
            assert_eq!(c, unit);
        }
        assert_eq!(
            s.solve_membership(&[FieldElem::ZERO; 5], &f).unwrap(),
            vec![FieldElem::ZERO; s.dim()]
        );
        let coeffs: Vec<FieldElem> = (0..s.dim())
            .map(|_| f.elem(rng.gen_range(0..9)).unwrap())
            .collect();
        let v = s.combination(&coeffs, &f);
        assert_eq!(s.solve_membership(&v, &f).unwrap(), coeffs);
    }

    #[test]
    fn invertible_search_examples() {
        let f = gf(2, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let id = SubspaceBasis::span(&Mat::from_vec(1, 4, Mat::identity(2).into_data()), &f);
        assert_eq!(
            invertible_in_span(&id, 2, &f, Scalars::Base, &mut rng),
            InvertibleSearch::Found(Mat::identity(2))
        );
        // strictly upper triangular 3x3
        let mut gens = Vec::new();
        for (i, j) in [(0, 1), (0, 2), (1, 2)] {
            let mut m = Mat::zeros(3, 3);
            m.set(i, j, FieldElem::ONE);
            gens.push(m.into_data());
        }
        let nil = SubspaceBasis::from_vectors(9, gens.iter().map(|v| v.as_slice()), &f);
        assert_eq!(
            invertible_in_span(&nil, 3, &f, Scalars::Base, &mut rng),
            InvertibleSearch::Absent
        );
        let mut e11 = Mat::zeros(2, 2);
        e11.set(0, 0, FieldElem::ONE);
        let mut e22 = Mat::zeros(2, 2);
        e22.set(1, 1, FieldElem::ONE);
        let diag = SubspaceBasis::from_vectors(4, [e11.data(), e22.data()], &f);
        assert_eq!(
            invertible_in_span(&diag, 2, &f, Scalars::Base, &mut rng),
            InvertibleSearch::Found(Mat::identity(2))
        );
    }

    #[test]
    fn invertible_search_agrees_with_enumeration() {
        let f = gf(2, 1);
        let elems = f.base_elems();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..60 {
            let d = rng.gen_range(1..8);
            let s = SubspaceBasis::span(&random_mat(&mut rng, d, 9, &f), &f);
            let brute = enumerate_span(&s, &f, &elems)
                .iter()
                .any(|v| is_invertible(&Mat::from_vec(3, 3, v.clone()), &f));
            let got = invertible_in_span(&s, 3, &f, Scalars::Base, &mut rng);
            match got {
                InvertibleSearch::Found(m) => {
                    assert!(brute);
                    assert!(is_invertible(&m, &f));
                    assert!(s.contains(m.data(), &f));
                }
                InvertibleSearch::Absent => assert!(!brute),
                InvertibleSearch::Unknown => panic!("small spans are exhaustive"),
            }
        }
    }
}
