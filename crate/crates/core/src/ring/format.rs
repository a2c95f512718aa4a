//! JSON ring files and the content hash that certificates refer to.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{Generator, GradedRing, Monomial, MonomialPresentation};
use crate::error::{Error, Result};
use crate::linalg::SparseVec;
use crate::rational::{format_q, parse_q};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProductTableFile {
    pub degrees: (usize, usize),
    /// `(i, j, basis_p[i] * basis_q[j])`, nonzero products only.
    pub entries: Vec<(usize, usize, SparseVec)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorFile {
    pub name: String,
    pub degree: usize,
    pub index: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonomialFile {
    pub coeff: String,
    pub word: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PresentationFile {
    pub generators: Vec<GeneratorFile>,
    pub basis: Vec<Vec<MonomialFile>>,
}

/// On-disk ring. Only products of positive-degree classes are listed; the
/// degree-0 class is the unit.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RingFile {
    pub top_degree: usize,
    pub dims: Vec<usize>,
    pub labels: Vec<Vec<String>>,
    pub products: Vec<ProductTableFile>,
    pub fundamental_index: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub monomial_presentation: Option<PresentationFile>,
}

impl GradedRing {
    pub fn to_file(&self) -> RingFile {
        let d = self.top_degree;
        let mut products = Vec::new();
        for p in 1..=d {
            for q in 1..=(d - p) {
                let mut entries = Vec::new();
                for i in 0..self.dims[p] {
                    for j in 0..self.dims[q] {
                        let v = &self.tables[p][q][i][j];
                        if !v.is_zero() {
                            entries.push((i, j, v.clone()));
                        }
                    }
                }
                if !entries.is_empty() {
                    products.push(ProductTableFile { degrees: (p, q), entries });
                }
            }
        }
        RingFile {
            top_degree: d,
            dims: self.dims.clone(),
            labels: self.labels.clone(),
            products,
            fundamental_index: self.fundamental_index,
            monomial_presentation: self.presentation.as_ref().map(|p| PresentationFile {
                generators: p
                    .generators
                    .iter()
                    .map(|g| GeneratorFile { name: g.name.clone(), degree: g.degree, index: g.index })
                    .collect(),
                basis: p
                    .basis
                    .iter()
                    .map(|row| row.iter().map(|m| MonomialFile { coeff: format_q(&m.coeff), word: m.word.clone() }).collect())
                    .collect(),
            }),
        }
    }

    /// Rebuilds and fully validates a ring from its file form.
    pub fn from_file(file: &RingFile) -> Result<GradedRing> {
        let bad = |m: String| Error::MalformedRing(m);
        let d = file.top_degree;
        if file.dims.len() != d + 1 {
            return Err(bad(format!("{} dims for top degree {d}", file.dims.len())));
        }
        let mut positive = std::collections::HashMap::new();
        for t in &file.products {
            let (p, q) = t.degrees;
            if p == 0 || q == 0 || p + q > d {
                return Err(bad(format!("product table for degrees ({p},{q}) is not allowed")));
            }
            for (i, j, v) in &t.entries {
                if *i >= file.dims[p] || *j >= file.dims[q] {
                    return Err(bad(format!("product index ({i},{j}) out of range in degrees ({p},{q})")));
                }
                if v.is_zero() {
                    return Err(bad(format!("zero product stored at ({i},{j}) in degrees ({p},{q})")));
                }
                if positive.insert((p, *i, q, *j), v.clone()).is_some() {
                    return Err(bad(format!("duplicate product ({i},{j}) in degrees ({p},{q})")));
                }
            }
        }
        let presentation = match &file.monomial_presentation {
            None => None,
            Some(pf) => Some(MonomialPresentation {
                generators: pf
                    .generators
                    .iter()
                    .map(|g| Generator { name: g.name.clone(), degree: g.degree, index: g.index })
                    .collect(),
                basis: pf
                    .basis
                    .iter()
                    .map(|row| {
                        row.iter()
                            .map(|m| Ok(Monomial { coeff: parse_q(&m.coeff)?, word: m.word.clone() }))
                            .collect::<Result<Vec<_>>>()
                    })
                    .collect::<Result<Vec<_>>>()?,
            }),
        };
        let mut ring = GradedRing::from_parts(
            file.dims.clone(),
            file.labels.clone(),
            |p, i, q, j| positive.get(&(p, i, q, j)).cloned().unwrap_or_else(SparseVec::zero),
            presentation,
        )?;
        if file.fundamental_index >= file.dims[d] {
            return Err(bad("fundamental index out of range".into()));
        }
        ring.set_fundamental_index(file.fundamental_index);
        ring.validate()?;
        Ok(ring)
    }

    /// Canonical compact JSON.
    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_file()).expect("ring serializes")
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("ring serializes")
    }

    pub fn from_json(s: &str) -> Result<GradedRing> {
        let file: RingFile = serde_json::from_str(s)?;
        GradedRing::from_file(&file)
    }

    /// `sha256:<hex>` of the canonical JSON.
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.to_json().as_bytes());
        format!("sha256:{}", hex::encode(digest))
    }
}

/// A homogeneous class on disk: its degree and sparse coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassFile {
    pub degree: usize,
    pub coords: SparseVec,
}

impl ClassFile {
    /// `None` for non-homogeneous classes. Zero is written in degree 0.
    pub fn from_element(x: &super::RingElement) -> Option<ClassFile> {
        if x.is_zero() {
            return Some(ClassFile { degree: 0, coords: SparseVec::zero() });
        }
        let k = x.homogeneous_degree()?;
        Some(ClassFile { degree: k, coords: x.component(k).clone() })
    }

    pub fn to_element(&self, ring: &GradedRing) -> Result<super::RingElement> {
        ring.element(self.degree, self.coords.clone())
    }
}
