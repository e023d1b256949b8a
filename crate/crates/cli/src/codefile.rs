//! The JSON code file: field, shape, optional basis, canonical generators and
//! optional construction parameters.

use std::path::Path;

use rmc_core::code::MatrixCode;
use rmc_core::field::{FieldElem, FieldTower, GaloisGen, KBasis};
use rmc_core::gabidulin::GabidulinParams;
use rmc_core::linalg::Mat;
use rmc_core::{Error, Result};
use serde::{Deserialize, Serialize};

/// An element as written in a file: its base-`p` packing, or `b^k` for a
/// power of the canonical generator.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ElemText {
    Int(u64),
    Sym(String),
}

impl From<FieldElem> for ElemText {
    fn from(a: FieldElem) -> Self {
        ElemText::Int(a.to_int() as u64)
    }
}

pub fn parse_elem(text: &str, f: &FieldTower) -> Result<FieldElem> {
    let t = text.trim();
    if let Some(exp) = t.strip_prefix("b^") {
        let k: u64 = exp
            .parse()
            .map_err(|_| Error::Parse(format!("bad exponent in {t:?}")))?;
        return Ok(f.pow(f.generator(), k));
    }
    if t == "b" {
        return Ok(f.generator());
    }
    let v: u64 = t
        .parse()
        .map_err(|_| Error::Parse(format!("bad element {t:?}")))?;
    f.elem(v)
}

impl ElemText {
    pub fn resolve(&self, f: &FieldTower) -> Result<FieldElem> {
        match self {
            ElemText::Int(v) => f.elem(*v),
            ElemText::Sym(s) => parse_elem(s, f),
        }
    }
}

/// Comma-separated elements, e.g. `1,2` or `1,b,b^2`.
pub fn parse_vector(text: &str, f: &FieldTower) -> Result<Vec<FieldElem>> {
    text.split(',').map(|t| parse_elem(t, f)).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldSpec {
    pub p: u32,
    pub e: u32,
    pub ell: u32,
    pub modulus: Vec<u32>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Shape {
    pub rows: usize,
    pub cols: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Provenance {
    pub v: Vec<ElemText>,
    pub theta_exp: u32,
    pub d: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CodeFile {
    pub field: FieldSpec,
    pub shape: Shape,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis: Option<Vec<ElemText>>,
    /// Row-major `rows x cols` matrices.
    pub generators: Vec<Vec<ElemText>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<Provenance>,
}

/// A code file resolved against its field.
pub struct Loaded {
    pub tower: FieldTower,
    pub basis: KBasis,
    pub code: MatrixCode,
    pub theta: GaloisGen,
    pub params: Option<GabidulinParams>,
}

impl CodeFile {
    /// The canonical file of `code`, in its original orientation.
    pub fn from_code(
        f: &FieldTower,
        code: &MatrixCode,
        basis: Option<&KBasis>,
        provenance: Option<Provenance>,
    ) -> Self {
        let mats: Vec<Mat> = code
            .basis_matrices()
            .into_iter()
            .map(|x| if code.transposed() { x.transpose() } else { x })
            .collect();
        let shape = if code.transposed() {
            Shape {
                rows: code.m(),
                cols: code.ell(),
            }
        } else {
            Shape {
                rows: code.ell(),
                cols: code.m(),
            }
        };
        CodeFile {
            field: FieldSpec {
                p: f.p(),
                e: f.e(),
                ell: f.ell(),
                modulus: f.modulus().to_vec(),
            },
            shape,
            basis: basis.map(|b| b.elements().iter().map(|&a| a.into()).collect()),
            generators: mats
                .iter()
                .map(|x| x.data().iter().map(|&a| a.into()).collect())
                .collect(),
            provenance,
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            Error::Parse(msg) => Error::Parse(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("plain data");
        s.push('\n');
        s
    }

    pub fn tower(&self) -> Result<FieldTower> {
        let FieldSpec { p, e, ell, modulus } = &self.field;
        FieldTower::new(*p, *e, *ell, Some(modulus.clone()))
    }

    pub fn load(&self) -> Result<Loaded> {
        let tower = self.tower()?;
        let f = &tower;
        let basis = match &self.basis {
            Some(elems) => {
                let elems = elems
                    .iter()
                    .map(|a| a.resolve(f))
                    .collect::<Result<Vec<_>>>()?;
                KBasis::new(f, elems)?
            }
            None => f.power_basis().clone(),
        };
        let Shape { rows, cols } = self.shape;
        let mut mats = Vec::with_capacity(self.generators.len());
        for (i, g) in self.generators.iter().enumerate() {
            if g.len() != rows * cols {
                return Err(Error::Parse(format!(
                    "generator {i} has {} entries, expected {rows}x{cols}",
                    g.len()
                )));
            }
            let data = g.iter().map(|a| a.resolve(f)).collect::<Result<Vec<_>>>()?;
            if let Some(a) = data.iter().find(|&&a| !f.in_base(a)) {
                return Err(Error::Parse(format!(
                    "generator {i} has entry {} outside the base field",
                    a.to_int()
                )));
            }
            mats.push(Mat::from_vec(rows, cols, data));
        }
        let code = MatrixCode::from_matrices(rows, cols, &mats, f)?;
        let theta_exp = self.provenance.as_ref().map_or(1, |p| p.theta_exp);
        let theta = GaloisGen::new(f, theta_exp)?;
        let params = match &self.provenance {
            Some(p) => {
                let v =
                    p.v.iter()
                        .map(|a| a.resolve(f))
                        .collect::<Result<Vec<_>>>()?;
                Some(GabidulinParams::new(f, v, theta, p.d)?)
            }
            None => None,
        };
        Ok(Loaded {
            tower,
            basis,
            code,
            theta,
            params,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn elements_parse() {
        let f = FieldTower::new(2, 1, 4, None).unwrap();
        assert_eq!(parse_elem("b", &f).unwrap(), f.generator());
        assert_eq!(parse_elem("b^4", &f).unwrap(), f.pow(f.generator(), 4));
        assert_eq!(parse_elem(" 7 ", &f).unwrap().to_int(), 7);
        assert!(parse_elem("16", &f).is_err());
        assert!(parse_elem("x^2", &f).is_err());
        assert_eq!(parse_vector("1,b,b^2", &f).unwrap().len(), 3);
    }

    #[test]
    fn unknown_keys_rejected() {
        let text = r#"{"field":{"p":2,"e":1,"ell":2,"modulus":[1,1,1]},"shape":{"rows":2,"cols":2},"generators":[],"extra":1}"#;
        assert!(matches!(CodeFile::parse(text), Err(Error::Parse(_))));
    }
}
