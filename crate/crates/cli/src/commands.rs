//! One function per subcommand. Codes with fewer rows than columns are
//! handled transposed internally; everything reported is mapped back to the
//! orientation of the input file and re-verified there.

use std::path::Path;

use anyhow::Context;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rmc_core::aut::{self, AutOptions, EquivOptions, Equivalence, IdealiserResult, Side};
use rmc_core::code::{self, MatrixCode};
use rmc_core::field::{FieldTower, GaloisGen};
use rmc_core::gabidulin::{self, GabidulinParams};
use rmc_core::linalg::Mat;
use rmc_core::Error;
use serde_json::{json, Value};

use crate::codefile::{parse_vector, CodeFile, Loaded, Provenance};
use crate::report::{self, Report};
use crate::{Budgets, Outcome, Output, EXIT_INTERNAL, EXIT_NEGATIVE, EXIT_OK, EXIT_UNKNOWN};

fn done(report: Report, code: u8) -> anyhow::Result<Outcome> {
    Ok(Outcome {
        output: Output::Report(report),
        code,
    })
}

fn load(path: &Path) -> anyhow::Result<Loaded> {
    let file = CodeFile::read(path)?;
    file.load()
        .with_context(|| format!("loading {}", path.display()))
}

fn field_name(f: &FieldTower) -> String {
    format!("GF({}^{}) over GF({})", f.p(), f.e() * f.ell(), f.q())
}

fn subfield_name(f: &FieldTower, degree: u32) -> String {
    format!("GF({}^{})", f.q(), degree)
}

fn describe(f: &FieldTower, ideal: &IdealiserResult) -> String {
    format!("dim {}, {}", ideal.dim(), ideal.structure.describe(f.q()))
}

fn header(r: &mut Report, l: &Loaded, path: &Path) {
    r.set("file", path.display().to_string());
    r.set("field", field_name(&l.tower));
    let (rows, cols) = original_shape(&l.code);
    r.set("shape", format!("{rows}x{cols}"));
    r.set("dim", l.code.dim());
}

fn original_shape(c: &MatrixCode) -> (usize, usize) {
    if c.transposed() {
        (c.m(), c.ell())
    } else {
        (c.ell(), c.m())
    }
}

/// The code in the orientation of its file.
fn original_code(c: &MatrixCode, f: &FieldTower) -> MatrixCode {
    if c.transposed() {
        aut::transpose_code(c, f)
    } else {
        c.clone()
    }
}

fn to_original_pair(c: &MatrixCode, g: &Mat, h: &Mat, f: &FieldTower) -> (Mat, Mat) {
    if c.transposed() {
        aut::transpose_pair(g, h, f)
    } else {
        (g.clone(), h.clone())
    }
}

fn internal_side(c: &MatrixCode, side: Side) -> Side {
    match (c.transposed(), side) {
        (false, s) => s,
        (true, Side::Left) => Side::Right,
        (true, Side::Right) => Side::Left,
    }
}

fn pair_value(g: &Mat, h: &Mat) -> Value {
    json!({ "g": report::matrix(g), "h": report::matrix(h) })
}

#[allow(clippy::too_many_arguments)]
pub fn construct(
    q: u32,
    ell: u32,
    m: usize,
    d: usize,
    v: &str,
    theta_exp: u32,
    out: Option<&Path>,
    seed: u64,
) -> anyhow::Result<Outcome> {
    let f = FieldTower::from_q(q, ell)?;
    let theta = GaloisGen::new(&f, theta_exp)?;
    let v = if v.trim() == "random" {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        gabidulin::random_gabidulin_vector(&f, m, &mut rng)?
    } else {
        parse_vector(v, &f)?
    };
    if v.len() != m {
        return Err(Error::Parse(format!("expected {m} entries in v, got {}", v.len())).into());
    }
    let params = GabidulinParams::new(&f, v, theta, d)?;
    let (_, lifted) = gabidulin::construct(&params, f.power_basis(), &f)?;
    if lifted.dim() != ell as usize * d {
        return Err(Error::StructureViolation(format!(
            "constructed code has dimension {}, expected {}",
            lifted.dim(),
            ell as usize * d
        ))
        .into());
    }
    let provenance = Provenance {
        v: params.v.iter().map(|&a| a.into()).collect(),
        theta_exp: theta.exponent(),
        d,
    };
    let text = CodeFile::from_code(&f, &lifted, None, Some(provenance)).to_json();
    let Some(path) = out else {
        return Ok(Outcome {
            output: Output::Raw(text),
            code: EXIT_OK,
        });
    };
    std::fs::write(path, &text).with_context(|| format!("writing {}", path.display()))?;
    let mut r = Report::new("construct");
    r.set("file", path.display().to_string());
    r.set("field", field_name(&f));
    r.set("shape", format!("{ell}x{m}"));
    r.set("dim", lifted.dim());
    r.set("k_dim", d);
    r.set("v", report::elems(&params.v));
    r.set("theta_exp", theta.exponent());
    done(r, EXIT_OK)
}

pub fn analyze(path: &Path, budgets: Budgets) -> anyhow::Result<Outcome> {
    let l = load(path)?;
    let f = &l.tower;
    let mut r = Report::new("analyze");
    header(&mut r, &l, path);
    let lifted = (!l.code.transposed())
        .then(|| code::is_k_lifted(&l.code, &l.basis, f))
        .flatten();
    r.set("k_linear", lifted.is_some());
    if let Some(kc) = &lifted {
        r.set("k_dim", kc.dim());
    }
    let (ell, m) = (l.code.ell(), l.code.m());
    match code::min_distance(&l.code, &l.basis, f, budgets.words) {
        Ok(dmin) => {
            let mrd = code::mrd_report(ell, m, l.code.dim(), dmin);
            r.set("min_distance", dmin);
            r.set("singleton_bound", mrd.singleton_rhs);
            r.set("mrd", if mrd.mrd { "yes" } else { "no" });
            done(r, EXIT_OK)
        }
        Err(Error::BudgetExceeded { budget, bound }) => {
            r.set("min_distance", "unknown");
            if let Some(b) = bound {
                r.set("min_distance_upper_bound", b);
            }
            r.set("mrd", "unknown");
            r.set("budget_exceeded", budget);
            done(r, EXIT_UNKNOWN)
        }
        Err(e) => Err(e.into()),
    }
}

fn unsupported(mut r: Report, reason: &str, l: &Loaded) -> anyhow::Result<Outcome> {
    let f = &l.tower;
    r.set("outcome", "unsupported, idealiser bases emitted");
    r.set("reason", reason);
    for side in [Side::Left, Side::Right] {
        let ideal = aut::idealiser(&l.code, internal_side(&l.code, side), f)?;
        let basis: Vec<Value> = ideal
            .basis_matrices()
            .iter()
            .map(|x| {
                report::matrix(&if l.code.transposed() {
                    x.transpose()
                } else {
                    x.clone()
                })
            })
            .collect();
        r.set(&format!("{side}_idealiser"), describe(f, &ideal));
        r.set(&format!("{side}_idealiser_basis"), basis);
    }
    done(r, EXIT_UNKNOWN)
}

pub fn aut(
    path: &Path,
    side: Option<Side>,
    oracle: bool,
    seed: u64,
    budgets: Budgets,
) -> anyhow::Result<Outcome> {
    let l = load(path)?;
    let f = &l.tower;
    let mut r = Report::new("aut");
    header(&mut r, &l, path);
    let opts = AutOptions {
        side: side.map(|s| internal_side(&l.code, s)),
        seed,
    };
    let result = match aut::automorphism_group(&l.code, f, Some((&l.basis, l.theta)), opts) {
        Ok(a) => a,
        Err(Error::Unsupported(msg)) => return unsupported(r, &msg, &l),
        Err(e) => return Err(e.into()),
    };
    let flip = l.code.transposed();
    let (left, right) = if flip {
        (&result.right, &result.left)
    } else {
        (&result.left, &result.right)
    };
    let (left_units, right_units) = if flip {
        (&result.right_unit_order, &result.left_unit_order)
    } else {
        (&result.left_unit_order, &result.right_unit_order)
    };
    let original = original_code(&l.code, f);
    let mut generators = Vec::with_capacity(result.generators.len());
    for (g, h) in &result.generators {
        let (g, h) = to_original_pair(&l.code, g, h, f);
        if !original.is_automorphism(&g, &h, f) {
            return Err(
                Error::StructureViolation("emitted generator fails verification".into()).into(),
            );
        }
        generators.push(pair_value(&g, &h));
    }
    r.set(
        "search_side",
        internal_side(&l.code, result.side).to_string(),
    );
    r.set("left_idealiser", describe(f, left));
    r.set("left_unit_order", left_units.to_string());
    r.set("right_idealiser", describe(f, right));
    r.set("right_unit_order", right_units.to_string());
    r.set("coset_count", result.coset_count);
    r.set("realized_cosets", result.realized_cosets.clone());
    r.set("unresolved_cosets", result.unresolved_cosets.clone());
    r.set("n_bound", result.n_bound);
    r.set("n_bound_exact", result.n_bound_exact);
    r.set("order", result.order.to_string());
    r.set("order_exact", result.is_exact());
    r.set("generators", generators);

    if let Some(params) = &l.params {
        if result.side == Side::Left && !flip {
            let sc = aut::structure_check(params, &l.basis, f, &result)?;
            r.set("splitting_field", subfield_name(f, sc.splitting_degree));
            r.set("s", sc.s);
            r.set("stabilizer_field", subfield_name(f, sc.stabilizer_degree));
            r.set("galois_part", sc.galois_part.clone());
            r.set("predicted_order", sc.predicted_order.to_string());
            r.set("structure_check", "ok");
        } else {
            r.set("structure_check", "skipped (right-side search)");
        }
    }

    let mut code = if result.is_exact() {
        EXIT_OK
    } else {
        EXIT_UNKNOWN
    };
    if oracle {
        match aut::brute_force_aut(&l.code, f, budgets.oracle) {
            Ok(o) => {
                let agrees = result.order == o.order().into();
                let contained = result.generators.iter().all(|(g, h)| o.contains(g, h));
                r.set("oracle_order", o.order().to_string());
                r.set("oracle_agrees", agrees && contained);
                if !(agrees && contained) {
                    code = EXIT_INTERNAL;
                }
            }
            Err(Error::BudgetExceeded { budget, .. }) => {
                r.set("oracle_order", format!("budget {budget} exceeded"));
            }
            Err(e) => return Err(e.into()),
        }
    }
    done(r, code)
}

pub fn recognize(path: &Path, theta_exp: Option<u32>, budgets: Budgets) -> anyhow::Result<Outcome> {
    let l = load(path)?;
    let f = &l.tower;
    let theta = match theta_exp {
        Some(j) => GaloisGen::new(f, j)?,
        None => l.theta,
    };
    let mut r = Report::new("recognize");
    header(&mut r, &l, path);
    r.set("theta_exp", theta.exponent());
    let reject = |mut r: Report, verdict: &str, reason: String| {
        r.set("verdict", verdict);
        r.set("reason", reason);
        done(r, EXIT_NEGATIVE)
    };
    let lifted = (!l.code.transposed())
        .then(|| code::is_k_lifted(&l.code, &l.basis, f))
        .flatten();
    let Some(kc) = lifted else {
        return reject(r, "rejected", Error::NotLifted.to_string());
    };
    let v = match gabidulin::recognize(&kc, theta, f, budgets.words) {
        Ok(Some(v)) => v,
        Ok(None) => {
            return reject(
                r,
                "not gabidulin-like",
                "the shifted intersection is not one-dimensional".to_string(),
            )
        }
        Err(e @ (Error::NotMrd { .. } | Error::DimensionOutOfRange { .. })) => {
            return reject(r, "rejected", e.to_string())
        }
        Err(e) => return Err(e.into()),
    };
    let params = GabidulinParams::new(f, v, theta, kc.dim())?;
    let (_, rebuilt) = gabidulin::construct(&params, &l.basis, f)?;
    if !rebuilt.same_space(&l.code) {
        return Err(
            Error::StructureViolation("recovered vector does not rebuild the code".into()).into(),
        );
    }
    let rep = gabidulin::structure_report(&params, &l.basis, f);
    r.set("verdict", "gabidulin-like");
    r.set("d", params.d);
    r.set("m", params.m());
    r.set("v", report::elems(&params.v));
    r.set("splitting_field", subfield_name(f, rep.splitting_degree));
    r.set("s", rep.s);
    r.set("stabilizer_field", subfield_name(f, rep.stabilizer_degree));
    done(r, EXIT_OK)
}

pub fn equiv(a: &Path, b: &Path, seed: u64, budgets: Budgets) -> anyhow::Result<Outcome> {
    let fa = CodeFile::read(a)?;
    let fb = CodeFile::read(b)?;
    if fa.field != fb.field {
        return Err(Error::Parse("the two codes live over different field towers".into()).into());
    }
    if fa.shape != fb.shape {
        return Err(Error::ShapeMismatch("the two codes have different shapes".into()).into());
    }
    let la = fa
        .load()
        .with_context(|| format!("loading {}", a.display()))?;
    let lb = fb
        .load()
        .with_context(|| format!("loading {}", b.display()))?;
    let f = &la.tower;
    let mut r = Report::new("equiv");
    r.set("a", a.display().to_string());
    r.set("b", b.display().to_string());
    r.set("field", field_name(f));
    let opts = EquivOptions {
        seed,
        word_budget: budgets.words,
    };
    let result = aut::equivalent(
        &la.code,
        &lb.code,
        &la.basis,
        f,
        Some((&la.basis, la.theta)),
        opts,
    );
    match result {
        Ok(Equivalence::Equivalent { g, h }) => {
            let (g, h) = to_original_pair(&la.code, &g, &h, f);
            let (ca, cb) = (original_code(&la.code, f), original_code(&lb.code, f));
            let verified = cb.transformed(&g, &h, f).is_some_and(|x| x.same_space(&ca));
            if !verified {
                return Err(Error::StructureViolation(
                    "equivalence witness fails verification".into(),
                )
                .into());
            }
            r.set("verdict", "equivalent");
            r.set("relation", "a = g^-1 * b * h");
            r.set("witness", pair_value(&g, &h));
            done(r, EXIT_OK)
        }
        Ok(Equivalence::NotEquivalent(reason)) => {
            r.set("verdict", "not equivalent");
            r.set("reason", reason);
            done(r, EXIT_NEGATIVE)
        }
        Ok(Equivalence::Unknown(reason)) => {
            r.set("verdict", "unknown");
            r.set("reason", reason);
            done(r, EXIT_UNKNOWN)
        }
        Err(Error::Unsupported(reason)) => {
            r.set("verdict", "unknown");
            r.set("reason", format!("unsupported: {reason}"));
            done(r, EXIT_UNKNOWN)
        }
        Err(e) => Err(e.into()),
    }
}

pub fn idealiser(path: &Path, side: Side) -> anyhow::Result<Outcome> {
    let l = load(path)?;
    let f = &l.tower;
    let ideal = aut::idealiser(&l.code, internal_side(&l.code, side), f)?;
    let mut r = Report::new("idealiser");
    header(&mut r, &l, path);
    r.set("side", side.to_string());
    r.set("n", ideal.n);
    r.set("algebra_dim", ideal.dim());
    r.set("center_dim", ideal.center.dim());
    r.set("structure", ideal.structure.describe(f.q()));
    r.set(
        "unit_order",
        ideal
            .unit_order
            .as_ref()
            .map_or_else(|| "unknown".to_string(), |u| u.to_string()),
    );
    let basis: Vec<Value> = ideal
        .basis_matrices()
        .iter()
        .map(|x| {
            report::matrix(&if l.code.transposed() {
                x.transpose()
            } else {
                x.clone()
            })
        })
        .collect();
    r.set("basis", basis);
    done(r, EXIT_OK)
}

pub fn oracle_aut(path: &Path, list: bool, budgets: Budgets) -> anyhow::Result<Outcome> {
    let l = load(path)?;
    let f = &l.tower;
    let mut r = Report::new("oracle-aut");
    header(&mut r, &l, path);
    let o = match aut::brute_force_aut(&l.code, f, budgets.oracle) {
        Ok(o) => o,
        Err(Error::BudgetExceeded { budget, .. }) => {
            r.set("order", "unknown");
            r.set("budget_exceeded", budget);
            return done(r, EXIT_UNKNOWN);
        }
        Err(e) => return Err(e.into()),
    };
    r.set("order", o.order().to_string());
    if list {
        let pairs: Vec<Value> = o
            .pairs()
            .map(|(g, h)| {
                let (g, h) = to_original_pair(&l.code, g, h, f);
                pair_value(&g, &h)
            })
            .collect();
        r.set("pairs", pairs);
    }
    done(r, EXIT_OK)
}
