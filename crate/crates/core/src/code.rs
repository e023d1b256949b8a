//! Rank-metric codes: `k`-subspaces of `k^(ell x m)`, lifting of `K`-linear
//! codes through `eps_B`, minimum rank distance and the MRD test.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{FieldElem, FieldTower, KBasis};
use crate::linalg::{self, Mat, SubspaceBasis};

/// Default number of codewords `min_distance` may enumerate.
pub const DEFAULT_WORD_BUDGET: u64 = 1 << 22;

/// A linear rank-metric code, stored as a canonical basis of flattened
/// (row-major) `ell x m` matrices.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MatrixCode {
    ell: usize,
    m: usize,
    space: SubspaceBasis,
    transposed: bool,
}

impl MatrixCode {
    pub fn new(ell: usize, m: usize, space: SubspaceBasis) -> Result<Self> {
        if space.ambient() != ell * m {
            return Err(Error::ShapeMismatch(format!(
                "subspace of dimension-{} space used as {ell}x{m} code",
                space.ambient()
            )));
        }
        Ok(MatrixCode {
            ell,
            m,
            space,
            transposed: false,
        })
    }

    /// The code spanned by `mats`. Inputs with fewer rows than columns are
    /// transposed so that `ell >= m`; [`MatrixCode::transposed`] records it.
    pub fn from_matrices(rows: usize, cols: usize, mats: &[Mat], f: &FieldTower) -> Result<Self> {
        for x in mats {
            if x.rows() != rows || x.cols() != cols {
                return Err(Error::ShapeMismatch(format!(
                    "generator of shape {}x{} in a {rows}x{cols} code",
                    x.rows(),
                    x.cols()
                )));
            }
        }
        let transposed = rows < cols;
        let (ell, m) = if transposed {
            (cols, rows)
        } else {
            (rows, cols)
        };
        let flat: Vec<Vec<FieldElem>> = mats
            .iter()
            .map(|x| {
                if transposed {
                    x.transpose().into_data()
                } else {
                    x.data().to_vec()
                }
            })
            .collect();
        let space = SubspaceBasis::from_vectors(ell * m, flat.iter().map(|v| v.as_slice()), f);
        Ok(MatrixCode {
            ell,
            m,
            space,
            transposed,
        })
    }

    pub fn zero(ell: usize, m: usize) -> Self {
        MatrixCode {
            ell,
            m,
            space: SubspaceBasis::zero(ell * m),
            transposed: false,
        }
    }

    pub fn full(ell: usize, m: usize) -> Self {
        MatrixCode {
            ell,
            m,
            space: SubspaceBasis::full(ell * m),
            transposed: false,
        }
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn space(&self) -> &SubspaceBasis {
        &self.space
    }

    pub fn transposed(&self) -> bool {
        self.transposed
    }

    pub fn with_transposed(mut self, transposed: bool) -> Self {
        self.transposed = transposed;
        self
    }

    pub fn basis_matrices(&self) -> Vec<Mat> {
        self.space
            .vectors()
            .map(|v| Mat::from_vec(self.ell, self.m, v.to_vec()))
            .collect()
    }

    pub fn contains(&self, x: &Mat, f: &FieldTower) -> bool {
        x.rows() == self.ell && x.cols() == self.m && self.space.contains(x.data(), f)
    }

    fn mapped(&self, g: impl Fn(&Mat) -> Mat, f: &FieldTower) -> MatrixCode {
        let mats: Vec<Vec<FieldElem>> = self
            .basis_matrices()
            .iter()
            .map(|x| g(x).into_data())
            .collect();
        MatrixCode {
            ell: self.ell,
            m: self.m,
            space: SubspaceBasis::from_vectors(
                self.ell * self.m,
                mats.iter().map(|v| v.as_slice()),
                f,
            ),
            transposed: self.transposed,
        }
    }

    /// `g * C`
    pub fn left_mul(&self, g: &Mat, f: &FieldTower) -> MatrixCode {
        self.mapped(|x| g.mul(x, f), f)
    }

    /// `C * h`
    pub fn right_mul(&self, h: &Mat, f: &FieldTower) -> MatrixCode {
        self.mapped(|x| x.mul(h, f), f)
    }

    /// `g^-1 * C * h`; `None` when `g` is singular.
    pub fn transformed(&self, g: &Mat, h: &Mat, f: &FieldTower) -> Option<MatrixCode> {
        let gi = linalg::inverse(g, f)?;
        Some(self.mapped(|x| gi.mul(x, f).mul(h, f), f))
    }

    /// Whether `g^-1 C h = C` for invertible `g`, `h`.
    pub fn is_automorphism(&self, g: &Mat, h: &Mat, f: &FieldTower) -> bool {
        if !linalg::is_invertible(h, f) {
            return false;
        }
        match self.transformed(g, h, f) {
            Some(c) => c.space == self.space,
            None => false,
        }
    }

    pub fn same_space(&self, other: &MatrixCode) -> bool {
        self.ell == other.ell && self.m == other.m && self.space == other.space
    }
}

/// A `K`-linear code of length `m`, stored by its RREF generator matrix.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct KLinearCode {
    m: usize,
    gen: Mat,
}

impl KLinearCode {
    pub fn new(m: usize, generators: &Mat, f: &FieldTower) -> Result<Self> {
        if generators.cols() != m {
            return Err(Error::ShapeMismatch(format!(
                "generators of length {} for a length-{m} code",
                generators.cols()
            )));
        }
        let s = SubspaceBasis::span(generators, f);
        Ok(KLinearCode {
            m,
            gen: s.basis().clone(),
        })
    }

    pub fn from_rows(m: usize, rows: &[Vec<FieldElem>], f: &FieldTower) -> Result<Self> {
        if rows.iter().any(|r| r.len() != m) {
            return Err(Error::ShapeMismatch("ragged generator rows".to_string()));
        }
        Self::new(m, &Mat::from_rows(m, rows), f)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn dim(&self) -> usize {
        self.gen.rows()
    }

    pub fn generator(&self) -> &Mat {
        &self.gen
    }

    /// The code as a subspace of `K^m`.
    pub fn to_subspace(&self) -> SubspaceBasis {
        SubspaceBasis::from_echelon_rows(self.gen.clone())
    }
}

/// `eps_B(v)`: the `ell x m` matrix with column `j` equal to the coordinates of `v_j`.
pub fn lift_vector(v: &[FieldElem], basis: &KBasis, f: &FieldTower) -> Mat {
    basis.coordinate_matrix(f, v)
}

/// `Delta_B(a)`, the matrix of multiplication by `a` in basis `B`.
pub fn regular_rep(a: FieldElem, basis: &KBasis, f: &FieldTower) -> Mat {
    let images: Vec<FieldElem> = basis.elements().iter().map(|&b| f.mul(a, b)).collect();
    basis.coordinate_matrix(f, &images)
}

/// The lifted code `eps_B(C~)`, spanned by the lifts of `B_i * g` over the
/// generator rows `g`.
pub fn eps_lift(code: &KLinearCode, basis: &KBasis, f: &FieldTower) -> MatrixCode {
    let ell = f.ell() as usize;
    let m = code.m();
    let mut flat = Vec::with_capacity(code.dim() * ell);
    for g in code.generator().row_vecs() {
        for &b in basis.elements() {
            let row: Vec<FieldElem> = g.iter().map(|&x| f.mul(b, x)).collect();
            flat.push(lift_vector(&row, basis, f).into_data());
        }
    }
    MatrixCode {
        ell,
        m,
        space: SubspaceBasis::from_vectors(ell * m, flat.iter().map(|v| v.as_slice()), f),
        transposed: false,
    }
}

/// The `K`-linear preimage of `c` if `Delta_B(K) c ⊆ c`.
pub fn is_k_lifted(c: &MatrixCode, basis: &KBasis, f: &FieldTower) -> Option<KLinearCode> {
    if c.ell() != f.ell() as usize {
        return None;
    }
    let delta = regular_rep(f.generator(), basis, f);
    let mats = c.basis_matrices();
    if !mats.iter().all(|x| c.contains(&delta.mul(x, f), f)) {
        return None;
    }
    let rows: Vec<Vec<FieldElem>> = mats
        .iter()
        .map(|x| {
            (0..c.m())
                .map(|j| {
                    let col: Vec<FieldElem> = (0..c.ell()).map(|i| x.get(i, j)).collect();
                    basis.combine(f, &col)
                })
                .collect()
        })
        .collect();
    if rows.is_empty() {
        return Some(KLinearCode {
            m: c.m(),
            gen: Mat::zeros(0, c.m()),
        });
    }
    KLinearCode::from_rows(c.m(), &rows, f).ok()
}

/// Projective representatives of the span of `gens` over `scalars`: all
/// combinations whose first nonzero coefficient is one.
fn for_each_projective(
    gens: &Mat,
    scalars: &[FieldElem],
    f: &FieldTower,
    budget: u64,
    mut visit: impl FnMut(&[FieldElem]) -> bool,
) -> std::result::Result<(), ()> {
    let d = gens.rows();
    let n = gens.cols();
    let mut seen = 0u64;
    for lead in 0..d {
        let tail = d - lead - 1;
        let mut digits = vec![0usize; tail];
        loop {
            if seen == budget {
                return Err(());
            }
            seen += 1;
            let mut w = gens.row(lead).to_vec();
            for (t, &dg) in digits.iter().enumerate() {
                let c = scalars[dg];
                if c.is_zero() {
                    continue;
                }
                for (x, &g) in w.iter_mut().zip(gens.row(lead + 1 + t)) {
                    *x = f.add(*x, f.mul(c, g));
                }
            }
            debug_assert_eq!(w.len(), n);
            if !visit(&w) {
                return Ok(());
            }
            let mut i = 0;
            while i < tail {
                digits[i] += 1;
                if digits[i] < scalars.len() {
                    break;
                }
                digits[i] = 0;
                i += 1;
            }
            if i == tail {
                break;
            }
        }
    }
    Ok(())
}

/// Number of projective representatives `(s^d - 1)/(s - 1)`, saturating.
pub fn projective_count(scalars: u64, dim: usize) -> u64 {
    let mut total = 0u64;
    let mut pw = 1u64;
    for _ in 0..dim {
        total = total.saturating_add(pw);
        pw = pw.saturating_mul(scalars);
    }
    total
}

/// Minimum rank of the nonzero codewords of a `K`-linear code, enumerating
/// one representative per `K`-projective class. The zero code reports `m + 1`.
pub fn klinear_min_distance(code: &KLinearCode, f: &FieldTower, budget: u64) -> Result<usize> {
    let scalars: Vec<FieldElem> = f.elements().collect();
    let mut best = code.m() + 1;
    let res = for_each_projective(code.generator(), &scalars, f, budget, |w| {
        best = best.min(f.vector_rank(w));
        best > 1
    });
    match res {
        Ok(()) => Ok(best),
        Err(()) => Err(Error::BudgetExceeded {
            budget,
            bound: (best <= code.m()).then_some(best),
        }),
    }
}

/// Minimum rank distance of `c`. `K`-linear codes (with respect to `basis`)
/// are enumerated `K`-projectively, other codes `k`-projectively.
pub fn min_distance(c: &MatrixCode, basis: &KBasis, f: &FieldTower, budget: u64) -> Result<usize> {
    if let Some(kc) = is_k_lifted(c, basis, f) {
        return klinear_min_distance(&kc, f, budget);
    }
    let scalars = f.base_elems();
    let mut best = c.m() + 1;
    let (ell, m) = (c.ell(), c.m());
    let res = for_each_projective(c.space().basis(), &scalars, f, budget, |w| {
        best = best.min(linalg::rank(&Mat::from_vec(ell, m, w.to_vec()), f));
        best > 1
    });
    match res {
        Ok(()) => Ok(best),
        Err(()) => Err(Error::BudgetExceeded {
            budget,
            bound: (best <= c.m()).then_some(best),
        }),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MrdReport {
    pub dim: usize,
    pub min_dist: usize,
    pub singleton_rhs: usize,
    pub mrd: bool,
}

/// Singleton comparison `dim = ell (m - d + 1)` for `ell >= m`.
pub fn is_mrd(c: &MatrixCode, basis: &KBasis, f: &FieldTower, budget: u64) -> Result<MrdReport> {
    let min_dist = min_distance(c, basis, f, budget)?;
    Ok(mrd_report(c.ell(), c.m(), c.dim(), min_dist))
}

pub fn mrd_report(ell: usize, m: usize, dim: usize, min_dist: usize) -> MrdReport {
    let big = ell.max(m);
    let small = ell.min(m);
    let singleton_rhs = big * (small + 1).saturating_sub(min_dist);
    MrdReport {
        dim,
        min_dist,
        singleton_rhs,
        mrd: dim == singleton_rhs,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn regular_rep_gf4() {
        let f = FieldTower::new(2, 1, 2, None).unwrap();
        let b = f.power_basis();
        let w = f.generator();
        assert_eq!(regular_rep(FieldElem::ONE, b, &f), Mat::identity(2));
        assert_eq!(regular_rep(FieldElem::ZERO, b, &f), Mat::zeros(2, 2));
        // w*1 = w -> (0,1); w*w = w+1 -> (1,1)
        let one = FieldElem::ONE;
        let z = FieldElem::ZERO;
        assert_eq!(
            regular_rep(w, b, &f),
            Mat::from_rows(2, &[vec![z, one], vec![one, one]])
        );
    }

    #[test]
    fn regular_rep_is_a_ring_homomorphism() {
        let f = FieldTower::new(3, 1, 3, None).unwrap();
        let b = f.power_basis();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..30 {
            let x = f.elem(rng.gen_range(0..27)).unwrap();
            let y = f.elem(rng.gen_range(0..27)).unwrap();
            let dx = regular_rep(x, b, &f);
            assert_eq!(
                dx.mul(&regular_rep(y, b, &f), &f),
                regular_rep(f.mul(x, y), b, &f)
            );
            assert_eq!(dx.apply(&b.coords(&f, y), &f), b.coords(&f, f.mul(x, y)));
        }
    }

    #[test]
    fn lift_examples() {
        let f = FieldTower::new(2, 1, 2, None).unwrap();
        let b = f.power_basis();
        let w = f.generator();
        let one = FieldElem::ONE;
        let c = KLinearCode::from_rows(2, &[vec![one, w]], &f).unwrap();
        let lifted = eps_lift(&c, b, &f);
        assert_eq!(lifted.dim(), 2);
        let elems = f.base_elems();
        let words = linalg::enumerate_span(lifted.space(), &f, &elems);
        assert_eq!(words.len(), 4);
        for x in &words[1..] {
            assert_eq!(linalg::rank(&Mat::from_vec(2, 2, x.clone()), &f), 2);
        }
        assert_eq!(
            min_distance(&lifted, b, &f, DEFAULT_WORD_BUDGET).unwrap(),
            2
        );

        let e1 =
            KLinearCode::from_rows(3, &[vec![one, FieldElem::ZERO, FieldElem::ZERO]], &f).unwrap();
        let l = eps_lift(&e1, b, &f);
        assert_eq!(l.dim(), 2);
        for x in l.basis_matrices() {
            assert!((0..2).all(|i| x.get(i, 1).is_zero() && x.get(i, 2).is_zero()));
        }

        let full = KLinearCode::new(2, &Mat::identity(2), &f).unwrap();
        assert_eq!(eps_lift(&full, b, &f), MatrixCode::full(2, 2));
    }

    #[test]
    fn lifted_detection() {
        let f = FieldTower::new(2, 1, 3, None).unwrap();
        let b = f.power_basis();
        let beta = f.generator();
        let one = FieldElem::ONE;
        let c = KLinearCode::from_rows(3, &[vec![one, beta, f.pow(beta, 2)]], &f).unwrap();
        let l = eps_lift(&c, b, &f);
        assert_eq!(is_k_lifted(&l, b, &f), Some(c));
        assert_eq!(
            is_k_lifted(&MatrixCode::full(3, 3), b, &f),
            Some(KLinearCode::new(3, &Mat::identity(3), &f).unwrap())
        );
        // a single rank-one matrix is not stable under Delta_B(beta)
        let mut x = Mat::zeros(3, 3);
        x.set(0, 0, one);
        let single = MatrixCode::from_matrices(3, 3, &[x], &f).unwrap();
        assert_eq!(is_k_lifted(&single, b, &f), None);
    }

    #[test]
    fn min_distance_of_full_space_is_one() {
        let f = FieldTower::new(2, 1, 3, None).unwrap();
        let c = MatrixCode::full(3, 2);
        let r = is_mrd(&c, f.power_basis(), &f, DEFAULT_WORD_BUDGET).unwrap();
        assert_eq!(
            r,
            MrdReport {
                dim: 6,
                min_dist: 1,
                singleton_rhs: 6,
                mrd: true
            }
        );
    }

    #[test]
    fn zero_column_breaks_mrd() {
        // D | 0 with D the 2-dim code of GF(4) matrices
        let f = FieldTower::new(2, 1, 2, None).unwrap();
        let b = f.power_basis();
        let one = FieldElem::ONE;
        let w = f.generator();
        let c = KLinearCode::from_rows(3, &[vec![one, w, FieldElem::ZERO]], &f).unwrap();
        let l = eps_lift(&c, b, &f);
        let r = is_mrd(&l, b, &f, DEFAULT_WORD_BUDGET).unwrap();
        assert_eq!(r.min_dist, 2);
        assert!(!r.mrd);
    }

    #[test]
    fn budget_is_reported() {
        let f = FieldTower::new(2, 1, 3, None).unwrap();
        let b = f.power_basis();
        let beta = f.generator();
        let v: Vec<FieldElem> = (0..3).map(|i| f.pow(beta, i)).collect();
        let v2: Vec<FieldElem> = v.iter().map(|&x| f.mul(x, x)).collect();
        let c = eps_lift(&KLinearCode::from_rows(3, &[v, v2], &f).unwrap(), b, &f);
        match min_distance(&c, b, &f, 1) {
            Err(Error::BudgetExceeded {
                budget: 1,
                bound: Some(d),
            }) => assert!(d >= 2),
            other => panic!("{other:?}"),
        }
        assert_eq!(min_distance(&c, b, &f, DEFAULT_WORD_BUDGET).unwrap(), 2);
    }

    #[test]
    fn transposed_ingest() {
        let f = FieldTower::new(2, 1, 2, None).unwrap();
        let mut x = Mat::zeros(1, 2);
        x.set(0, 1, FieldElem::ONE);
        let c = MatrixCode::from_matrices(1, 2, &[x], &f).unwrap();
        assert!(c.transposed());
        assert_eq!((c.ell(), c.m()), (2, 1));
    }

    #[test]
    fn projective_counts() {
        assert_eq!(projective_count(16, 2), 17);
        assert_eq!(projective_count(4, 1), 1);
        assert_eq!(projective_count(2, 0), 0);
    }
}
