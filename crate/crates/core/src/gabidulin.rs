//! Gabidulin-like codes `C(v, theta, d) = eps_B(<v, theta(v), ..., theta^(d-1)(v)>_K)`:
//! construction, recognition among lifted MRD codes, and the subfields that
//! govern their idealisers.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::code::{self, KLinearCode, MatrixCode};
use crate::error::{Error, Result};
use crate::field::{FieldElem, FieldTower, GaloisGen, KBasis, Subfield};
use crate::linalg::{self, Mat, SubspaceBasis};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GabidulinParams {
    pub v: Vec<FieldElem>,
    pub theta: GaloisGen,
    pub d: usize,
}

impl GabidulinParams {
    /// Checks that `v` has rank `m` over `k` and `1 <= d < m`.
    pub fn new(f: &FieldTower, v: Vec<FieldElem>, theta: GaloisGen, d: usize) -> Result<Self> {
        let m = v.len();
        if d == 0 || d >= m {
            return Err(Error::DimensionOutOfRange { d, m });
        }
        let rank = f.vector_rank(&v);
        if rank != m {
            return Err(Error::NotGabidulinVector { rank, m });
        }
        Ok(GabidulinParams { v, theta, d })
    }

    pub fn m(&self) -> usize {
        self.v.len()
    }

    pub fn normalized_v(&self, f: &FieldTower) -> Vec<FieldElem> {
        normalize(&self.v, f)
    }
}

/// `v / v_1`. The zero vector is returned unchanged.
pub fn normalize(v: &[FieldElem], f: &FieldTower) -> Vec<FieldElem> {
    match v.first().and_then(|&a| f.inv(a)) {
        Some(s) => v.iter().map(|&x| f.mul(s, x)).collect(),
        None => v.to_vec(),
    }
}

/// Samples `v in K^m` uniformly until it has rank `m`.
pub fn random_gabidulin_vector<R: Rng + ?Sized>(
    f: &FieldTower,
    m: usize,
    rng: &mut R,
) -> Result<Vec<FieldElem>> {
    if m > f.ell() as usize {
        return Err(Error::NotGabidulinVector {
            rank: f.ell() as usize,
            m,
        });
    }
    for _ in 0..10_000 {
        let v: Vec<FieldElem> = (0..m)
            .map(|_| {
                f.elem(rng.gen_range(0..f.order() as u64))
                    .expect("in range")
            })
            .collect();
        if f.vector_rank(&v) == m {
            return Ok(v);
        }
    }
    Err(Error::NotGabidulinVector { rank: 0, m })
}

/// Rows `theta^i(v)` for `i < d`.
pub fn moore_rows(
    v: &[FieldElem],
    theta: GaloisGen,
    d: usize,
    f: &FieldTower,
) -> Vec<Vec<FieldElem>> {
    (0..d)
        .map(|i| v.iter().map(|&x| f.theta_pow(theta, i as i64, x)).collect())
        .collect()
}

/// The `K`-linear code and its lift.
pub fn construct(
    params: &GabidulinParams,
    basis: &KBasis,
    f: &FieldTower,
) -> Result<(KLinearCode, MatrixCode)> {
    let rows = moore_rows(&params.v, params.theta, params.d, f);
    let kc = KLinearCode::from_rows(params.m(), &rows, f)?;
    let lifted = code::eps_lift(&kc, basis, f);
    Ok((kc, lifted))
}

/// Kernel of `sum_i coeffs[i] * theta^i` acting `k`-linearly on `K`, as a
/// subspace of `k^ell` in `basis` coordinates.
pub fn theta_poly_kernel(
    f: &FieldTower,
    theta: GaloisGen,
    coeffs: &[FieldElem],
    basis: &KBasis,
) -> Result<SubspaceBasis> {
    let degree = coeffs
        .iter()
        .rposition(|c| !c.is_zero())
        .ok_or(Error::ZeroPolynomial)?;
    let ell = f.ell() as usize;
    if degree >= ell {
        return Err(Error::DegreeTooLarge {
            degree,
            bound: ell - 1,
        });
    }
    let images: Vec<FieldElem> = basis
        .elements()
        .iter()
        .map(|&b| apply_theta_poly(f, theta, coeffs, b))
        .collect();
    Ok(linalg::kernel(&basis.coordinate_matrix(f, &images), f))
}

pub fn apply_theta_poly(
    f: &FieldTower,
    theta: GaloisGen,
    coeffs: &[FieldElem],
    a: FieldElem,
) -> FieldElem {
    coeffs
        .iter()
        .enumerate()
        .fold(FieldElem::ZERO, |acc, (i, &c)| {
            f.add(acc, f.mul(c, f.theta_pow(theta, i as i64, a)))
        })
}

/// `theta^i(C~)`, applying `theta^i` entrywise.
pub fn theta_shift(code: &KLinearCode, theta: GaloisGen, i: i64, f: &FieldTower) -> KLinearCode {
    let g = code.generator().map(|x| f.theta_pow(theta, i, x));
    KLinearCode::new(code.m(), &g, f).expect("same length")
}

/// `⋂_{i<d} theta^i(C~)` with `d = dim C~`.
pub fn shift_intersection(code: &KLinearCode, theta: GaloisGen, f: &FieldTower) -> SubspaceBasis {
    let mut acc = code.to_subspace();
    for i in 1..code.dim() {
        let shifted = theta_shift(code, theta, i as i64, f).to_subspace();
        acc = acc.intersect(&shifted, f).expect("same ambient");
    }
    acc
}

/// Recovers the normalized Gabidulin vector of a lifted MRD code, or `None`
/// when the shifted intersection is not one-dimensional.
pub fn recognize(
    code: &KLinearCode,
    theta: GaloisGen,
    f: &FieldTower,
    budget: u64,
) -> Result<Option<Vec<FieldElem>>> {
    let (d, m) = (code.dim(), code.m());
    if d == 0 || d >= m {
        return Err(Error::DimensionOutOfRange { d, m });
    }
    let min_dist = code::klinear_min_distance(code, f, budget)?;
    if min_dist != m - d + 1 {
        return Err(Error::NotMrd {
            dim: d * f.ell() as usize,
            min_dist,
        });
    }
    let inter = shift_intersection(code, theta, f);
    if inter.dim() != 1 {
        return Ok(None);
    }
    let x = inter.basis().row(0);
    let v: Vec<FieldElem> = x
        .iter()
        .map(|&a| f.theta_pow(theta, -(d as i64 - 1), a))
        .collect();
    let v = normalize(&v, f);
    if v.first() != Some(&FieldElem::ONE) || f.vector_rank(&v) != m {
        return Err(Error::StructureViolation(
            "recovered vector is not a Gabidulin vector".to_string(),
        ));
    }
    let rebuilt = KLinearCode::from_rows(m, &moore_rows(&v, theta, d, f), f)?;
    if &rebuilt != code {
        return Err(Error::StructureViolation(
            "recovered vector does not generate the code".to_string(),
        ));
    }
    Ok(Some(v))
}

/// Whether `C(v, theta, d) = C(w, theta, d)`. Canonical forms are compared and
/// the answer is cross-checked against the scalar criterion `v = alpha w`.
pub fn same_code(
    v: &[FieldElem],
    w: &[FieldElem],
    theta: GaloisGen,
    d: usize,
    f: &FieldTower,
) -> Result<bool> {
    let pv = GabidulinParams::new(f, v.to_vec(), theta, d)?;
    let pw = GabidulinParams::new(f, w.to_vec(), theta, d)?;
    let cv = KLinearCode::from_rows(pv.m(), &moore_rows(&pv.v, theta, d, f), f)?;
    let cw = KLinearCode::from_rows(pw.m(), &moore_rows(&pw.v, theta, d, f), f)?;
    let equal = cv == cw;
    let alpha = f.div(v[0], w[0]).expect("Gabidulin entries are nonzero");
    let scalar = v.iter().zip(w).all(|(&a, &b)| a == f.mul(alpha, b));
    if equal != scalar {
        return Err(Error::StructureViolation(
            "code equality disagrees with the scalar criterion".to_string(),
        ));
    }
    Ok(equal)
}

/// Smallest subfield containing the entries of the normalized vector.
pub fn splitting_field(v: &[FieldElem], f: &FieldTower) -> Subfield {
    f.generated_subfield(&normalize(v, f))
}

/// Largest subfield `M` with `M * V_v ⊆ V_v`, `V_v` the `k`-span of the entries.
pub fn stabilizer_subfield(v: &[FieldElem], basis: &KBasis, f: &FieldTower) -> Subfield {
    let ell = f.ell() as usize;
    let coords: Vec<Vec<FieldElem>> = v.iter().map(|&x| basis.coords(f, x)).collect();
    let span = SubspaceBasis::from_vectors(ell, coords.iter().map(|c| c.as_slice()), f);
    let mut subfields = f.subfields();
    subfields.reverse();
    subfields
        .into_iter()
        .find(|&sf| {
            let gamma = f.subfield_primitive(sf);
            v.iter()
                .all(|&x| span.contains(&basis.coords(f, f.mul(gamma, x)), f))
        })
        .expect("k stabilizes every k-subspace")
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructureReport {
    /// `[F : k]` for the splitting field `F`.
    pub splitting_degree: u32,
    /// `s = [K : F]`
    pub s: u32,
    /// `[M : k]` for the stabilizer subfield `M`.
    pub stabilizer_degree: u32,
    pub d: usize,
    pub m: usize,
}

pub fn structure_report(
    params: &GabidulinParams,
    basis: &KBasis,
    f: &FieldTower,
) -> StructureReport {
    let sf = splitting_field(&params.v, f);
    let mf = stabilizer_subfield(&params.v, basis, f);
    StructureReport {
        splitting_degree: sf.degree,
        s: f.ell() / sf.degree,
        stabilizer_degree: mf.degree,
        d: params.d,
        m: params.m(),
    }
}

/// Rank over `K` of a list of vectors.
pub fn k_rank(rows: &[Vec<FieldElem>], f: &FieldTower) -> usize {
    if rows.is_empty() {
        return 0;
    }
    linalg::rank(&Mat::from_rows(rows[0].len(), rows), f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::{klinear_min_distance, DEFAULT_WORD_BUDGET};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn gf4_example() {
        let f = FieldTower::new(2, 1, 2, None).unwrap();
        let theta = GaloisGen::frobenius(&f);
        let w = f.generator();
        let p = GabidulinParams::new(&f, vec![FieldElem::ONE, w], theta, 1).unwrap();
        let (kc, mc) = construct(&p, f.power_basis(), &f).unwrap();
        assert_eq!(kc.dim(), 1);
        assert_eq!(mc.dim(), 2);
        assert_eq!(
            code::min_distance(&mc, f.power_basis(), &f, DEFAULT_WORD_BUDGET).unwrap(),
            2
        );
        let r = structure_report(&p, f.power_basis(), &f);
        assert_eq!((r.splitting_degree, r.s, r.stabilizer_degree), (2, 1, 2));
    }

    #[test]
    fn gf16_example() {
        let f = FieldTower::new(2, 1, 4, None).unwrap();
        let theta = GaloisGen::frobenius(&f);
        let b = f.generator();
        let v = vec![FieldElem::ONE, b, f.pow(b, 2)];
        let p = GabidulinParams::new(&f, v.clone(), theta, 2).unwrap();
        let (kc, mc) = construct(&p, f.power_basis(), &f).unwrap();
        assert_eq!(kc.dim(), 2);
        assert_eq!(mc.dim(), 8);
        assert_eq!(
            klinear_min_distance(&kc, &f, DEFAULT_WORD_BUDGET).unwrap(),
            2
        );
        assert_eq!(code::projective_count(16, 2), 17);
        // V_v is 3-dimensional; GF(4)-stability would force even dimension
        assert_eq!(stabilizer_subfield(&v, f.power_basis(), &f).degree, 1);
        let full = vec![FieldElem::ONE, b, f.pow(b, 2), f.pow(b, 3)];
        assert_eq!(stabilizer_subfield(&full, f.power_basis(), &f).degree, 4);
    }

    #[test]
    fn stabilizer_by_direct_enumeration() {
        let f = FieldTower::new(2, 1, 4, None).unwrap();
        let basis = f.power_basis();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for m in 2..=4 {
            for _ in 0..20 {
                let v = random_gabidulin_vector(&f, m, &mut rng).unwrap();
                // V_v by enumeration of GF(2)-combinations
                let vv: std::collections::BTreeSet<FieldElem> = (0u32..1 << m)
                    .map(|mask| {
                        (0..m)
                            .filter(|i| mask >> i & 1 == 1)
                            .fold(FieldElem::ZERO, |a, i| f.add(a, v[i]))
                    })
                    .collect();
                let expected = f
                    .subfields()
                    .into_iter()
                    .filter(|&sf| {
                        f.subfield_members(sf)
                            .iter()
                            .all(|&g| vv.iter().all(|&x| vv.contains(&f.mul(g, x))))
                    })
                    .max()
                    .unwrap();
                assert_eq!(stabilizer_subfield(&v, basis, &f), expected);
                let sp = splitting_field(&v, &f);
                assert!(expected.degree <= sp.degree && sp.degree.is_multiple_of(expected.degree));
            }
        }
    }

    #[test]
    fn construction_rejects_bad_parameters() {
        let f = FieldTower::new(2, 1, 3, None).unwrap();
        let theta = GaloisGen::frobenius(&f);
        let b = f.generator();
        let v = vec![FieldElem::ONE, b, f.pow(b, 2)];
        assert_eq!(
            GabidulinParams::new(&f, v.clone(), theta, 3).unwrap_err(),
            Error::DimensionOutOfRange { d: 3, m: 3 }
        );
        let bad = vec![FieldElem::ONE, b, f.add(FieldElem::ONE, b)];
        assert_eq!(
            GabidulinParams::new(&f, bad, theta, 1).unwrap_err(),
            Error::NotGabidulinVector { rank: 2, m: 3 }
        );
    }

    #[test]
    fn theta_poly_kernel_examples() {
        let f = FieldTower::new(2, 1, 4, None).unwrap();
        let theta = GaloisGen::frobenius(&f);
        let basis = f.power_basis();
        let z = FieldElem::ZERO;
        let one = FieldElem::ONE;
        assert_eq!(
            theta_poly_kernel(&f, theta, &[z, one], basis)
                .unwrap()
                .dim(),
            0
        );
        // theta - 1 has the fixed field k as kernel
        let k = theta_poly_kernel(&f, theta, &[one, one], basis).unwrap();
        assert_eq!(k.dim(), 1);
        assert!(k.contains(&basis.coords(&f, one), &f));
        assert_eq!(
            theta_poly_kernel(&f, theta, &[z, z], basis).unwrap_err(),
            Error::ZeroPolynomial
        );
        assert!(matches!(
            theta_poly_kernel(&f, theta, &[one, z, z, z, one], basis),
            Err(Error::DegreeTooLarge { .. })
        ));
    }

    #[test]
    fn theta_poly_kernel_matches_brute_force() {
        let f = FieldTower::new(2, 1, 4, None).unwrap();
        let theta = GaloisGen::frobenius(&f);
        let basis = f.power_basis();
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..100 {
            let coeffs: Vec<FieldElem> = (0..3)
                .map(|_| f.elem(rng.gen_range(0..16)).unwrap())
                .collect();
            let Ok(k) = theta_poly_kernel(&f, theta, &coeffs, basis) else {
                continue;
            };
            let zeros = f
                .elements()
                .filter(|&a| apply_theta_poly(&f, theta, &coeffs, a).is_zero())
                .count();
            assert_eq!(zeros, 1 << k.dim());
            let deg = coeffs.iter().rposition(|c| !c.is_zero()).unwrap();
            assert!(k.dim() <= deg);
        }
    }

    #[test]
    fn moore_rows_are_independent() {
        let f = FieldTower::new(3, 1, 4, None).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for j in [1, 3] {
            let theta = GaloisGen::new(&f, j).unwrap();
            for _ in 0..20 {
                let m = rng.gen_range(1..=4);
                let v: Vec<FieldElem> = (0..m)
                    .map(|_| f.elem(rng.gen_range(0..81)).unwrap())
                    .collect();
                let r = f.vector_rank(&v);
                for d in 1..=r {
                    assert_eq!(k_rank(&moore_rows(&v, theta, d, &f), &f), d);
                }
            }
        }
    }

    #[test]
    fn recognize_round_trip_and_errors() {
        let f = FieldTower::new(2, 1, 4, None).unwrap();
        let theta = GaloisGen::frobenius(&f);
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        for m in 2..=4 {
            for d in 1..m {
                let v = random_gabidulin_vector(&f, m, &mut rng).unwrap();
                let p = GabidulinParams::new(&f, v.clone(), theta, d).unwrap();
                let (kc, _) = construct(&p, f.power_basis(), &f).unwrap();
                let got = recognize(&kc, theta, &f, DEFAULT_WORD_BUDGET).unwrap();
                assert_eq!(got, Some(normalize(&v, &f)));
            }
        }
        let f8 = FieldTower::new(2, 1, 3, None).unwrap();
        let t8 = GaloisGen::frobenius(&f8);
        let (one, z) = (FieldElem::ONE, FieldElem::ZERO);
        let kc = KLinearCode::from_rows(3, &[vec![one, z, z], vec![z, one, z]], &f8).unwrap();
        assert!(matches!(
            recognize(&kc, t8, &f8, DEFAULT_WORD_BUDGET),
            Err(Error::NotMrd { .. })
        ));
        let full = KLinearCode::new(3, &Mat::identity(3), &f8).unwrap();
        assert!(matches!(
            recognize(&full, t8, &f8, DEFAULT_WORD_BUDGET),
            Err(Error::DimensionOutOfRange { .. })
        ));
    }

    #[test]
    fn equality_classes() {
        let f = FieldTower::new(2, 1, 4, None).unwrap();
        let theta = GaloisGen::frobenius(&f);
        let b = f.generator();
        let v = vec![FieldElem::ONE, b, f.pow(b, 2)];
        let wv: Vec<FieldElem> = v.iter().map(|&x| f.mul(f.pow(b, 5), x)).collect();
        assert!(same_code(&v, &wv, theta, 2, &f).unwrap());
        assert!(same_code(&v, &v, theta, 1, &f).unwrap());
        let tv: Vec<FieldElem> = v.iter().map(|&x| f.frobenius(theta, x)).collect();
        assert!(!same_code(&v, &tv, theta, 2, &f).unwrap());
    }

    #[test]
    fn splitting_field_examples() {
        let f = FieldTower::new(2, 1, 2, None).unwrap();
        assert_eq!(
            splitting_field(&[FieldElem::ONE, f.generator()], &f).degree,
            2
        );
        let f = FieldTower::new(2, 1, 4, None).unwrap();
        let gamma = f.subfield_primitive(Subfield { degree: 2 });
        let sf = splitting_field(&[FieldElem::ONE, gamma], &f);
        assert_eq!(sf.degree, 2);
        assert_eq!(f.ell() / sf.degree, 2);
        // scaling does not change the normalized vector
        let b = f.generator();
        assert_eq!(splitting_field(&[b, f.mul(b, gamma)], &f).degree, 2);
    }
}
