//! Finite-dimensional graded commutative algebras over the rationals, given
//! by per-degree bases and structure constants. These model de Rham
//! cohomology rings of closed oriented manifolds.

mod build;
mod expr;
mod format;

pub use build::{connsum, cp, product, s2xs2, sphere, surface, torus};
pub use expr::{parse_manifold, BuiltManifold, Factor, ManifoldExpr};
pub use format::{ClassFile, RingFile};

use std::fmt::Write as _;

use num::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::linalg::{rank_of, span_basis, Matrix, SparseVec};
use crate::rational::Q;

/// Products of basis elements `basis_p[i] * basis_q[j]`, indexed `[i][j]`.
pub(crate) type Table = Vec<Vec<SparseVec>>;

/// A ring generator, realised by a basis element whose presentation word is
/// the generator itself.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generator {
    pub name: String,
    pub degree: usize,
    pub index: usize,
}

/// `coeff * g_1 * ... * g_r`, with `g_i` generator indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Monomial {
    pub coeff: Q,
    pub word: Vec<usize>,
}

/// Every basis element written as a scalar multiple of a generator word.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonomialPresentation {
    pub generators: Vec<Generator>,
    pub basis: Vec<Vec<Monomial>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedRing {
    top_degree: usize,
    dims: Vec<usize>,
    labels: Vec<Vec<String>>,
    /// `tables[p][q]` for `p + q <= top_degree`.
    tables: Vec<Vec<Table>>,
    fundamental_index: usize,
    presentation: Option<MonomialPresentation>,
}

/// A class in a [`GradedRing`], stored as one sparse coordinate vector per
/// degree `0..=top_degree`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RingElement {
    components: Vec<SparseVec>,
}

impl RingElement {
    pub fn zero(top_degree: usize) -> Self {
        RingElement { components: vec![SparseVec::zero(); top_degree + 1] }
    }

    pub fn homogeneous(top_degree: usize, degree: usize, coords: SparseVec) -> Self {
        let mut e = Self::zero(top_degree);
        e.components[degree] = coords;
        e
    }

    pub fn component(&self, k: usize) -> &SparseVec {
        &self.components[k]
    }

    pub fn components(&self) -> &[SparseVec] {
        &self.components
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(SparseVec::is_zero)
    }

    /// Degree of a nonzero homogeneous element.
    pub fn homogeneous_degree(&self) -> Option<usize> {
        let mut it = self.components.iter().enumerate().filter(|(_, v)| !v.is_zero());
        let (k, _) = it.next()?;
        it.next().is_none().then_some(k)
    }

    fn zip_with(&self, other: &RingElement, f: impl Fn(&SparseVec, &SparseVec) -> SparseVec) -> Result<RingElement> {
        if self.components.len() != other.components.len() {
            return Err(Error::RingMismatch(format!(
                "top degrees {} and {}",
                self.components.len() - 1,
                other.components.len() - 1
            )));
        }
        Ok(RingElement {
            components: self.components.iter().zip(&other.components).map(|(a, b)| f(a, b)).collect(),
        })
    }

    pub fn add(&self, other: &RingElement) -> Result<RingElement> {
        self.zip_with(other, |a, b| a.add(b))
    }

    pub fn sub(&self, other: &RingElement) -> Result<RingElement> {
        self.zip_with(other, |a, b| a.add_scaled(&-Q::one(), b))
    }

    pub fn add_scaled(&self, s: &Q, other: &RingElement) -> Result<RingElement> {
        self.zip_with(other, |a, b| a.add_scaled(s, b))
    }

    pub fn scale(&self, s: &Q) -> RingElement {
        RingElement { components: self.components.iter().map(|v| v.scaled(s)).collect() }
    }
}

fn sign_of(p: usize, q: usize) -> Q {
    if p * q % 2 == 1 {
        -Q::one()
    } else {
        Q::one()
    }
}

impl GradedRing {
    /// Assemble a ring from positive-degree product tables. Products with a
    /// degree-0 factor are filled in from the unit. `positive[p][q]` must be
    /// present for all `p, q >= 1` with `p + q <= top_degree`; entries for
    /// other index pairs are ignored.
    pub(crate) fn from_parts(
        dims: Vec<usize>,
        labels: Vec<Vec<String>>,
        positive: impl Fn(usize, usize, usize, usize) -> SparseVec,
        presentation: Option<MonomialPresentation>,
    ) -> Result<GradedRing> {
        let d = dims.len().checked_sub(1).ok_or_else(|| Error::MalformedRing("empty dims".into()))?;
        if d == 0 {
            return Err(Error::MalformedRing("top degree must be at least 1".into()));
        }
        if dims[0] != 1 {
            return Err(Error::MalformedRing(format!("dims[0] = {} (must be 1)", dims[0])));
        }
        let mut tables = Vec::with_capacity(d + 1);
        for p in 0..=d {
            let mut row = Vec::with_capacity(d + 1 - p);
            for q in 0..=(d - p) {
                let table: Table = (0..dims[p])
                    .map(|i| {
                        (0..dims[q])
                            .map(|j| match (p, q) {
                                (0, _) => SparseVec::unit(j),
                                (_, 0) => SparseVec::unit(i),
                                _ => positive(p, i, q, j),
                            })
                            .collect()
                    })
                    .collect();
                row.push(table);
            }
            tables.push(row);
        }
        let ring = GradedRing { top_degree: d, dims, labels, tables, fundamental_index: 0, presentation };
        ring.check_shapes()?;
        Ok(ring)
    }

    pub(crate) fn set_fundamental_index(&mut self, i: usize) {
        self.fundamental_index = i;
    }

    pub(crate) fn set_labels(&mut self, labels: Vec<Vec<String>>) {
        self.labels = labels;
    }

    pub(crate) fn set_presentation(&mut self, p: Option<MonomialPresentation>) {
        self.presentation = p;
    }

    fn check_shapes(&self) -> Result<()> {
        let d = self.top_degree;
        if self.labels.len() != d + 1 || (0..=d).any(|k| self.labels[k].len() != self.dims[k]) {
            return Err(Error::MalformedRing("labels do not match dims".into()));
        }
        for p in 0..=d {
            for q in 0..=(d - p) {
                for row in &self.tables[p][q] {
                    for v in row {
                        if v.max_index().is_some_and(|m| m >= self.dims[p + q]) {
                            return Err(Error::MalformedRing(format!(
                                "product in degrees ({p},{q}) has coordinate beyond dim H^{}",
                                p + q
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn top_degree(&self) -> usize {
        self.top_degree
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self, k: usize) -> usize {
        self.dims.get(k).copied().unwrap_or(0)
    }

    pub fn labels(&self) -> &[Vec<String>] {
        &self.labels
    }

    pub fn label(&self, k: usize, i: usize) -> &str {
        &self.labels[k][i]
    }

    pub fn fundamental_index(&self) -> usize {
        self.fundamental_index
    }

    pub fn presentation(&self) -> Option<&MonomialPresentation> {
        self.presentation.as_ref()
    }

    /// `basis_p[i] * basis_q[j]`; zero when `p + q` exceeds the top degree.
    pub fn basis_product(&self, p: usize, i: usize, q: usize, j: usize) -> SparseVec {
        if p + q > self.top_degree {
            SparseVec::zero()
        } else {
            self.tables[p][q][i][j].clone()
        }
    }

    pub(crate) fn basis_product_ref(&self, p: usize, i: usize, q: usize, j: usize) -> Option<&SparseVec> {
        (p + q <= self.top_degree).then(|| &self.tables[p][q][i][j])
    }

    pub fn zero(&self) -> RingElement {
        RingElement::zero(self.top_degree)
    }

    pub fn one(&self) -> RingElement {
        self.basis_element(0, 0)
    }

    pub fn basis_element(&self, k: usize, i: usize) -> RingElement {
        RingElement::homogeneous(self.top_degree, k, SparseVec::unit(i))
    }

    pub fn basis(&self, k: usize) -> Vec<RingElement> {
        (0..self.dim(k)).map(|i| self.basis_element(k, i)).collect()
    }

    pub fn fundamental_class(&self) -> RingElement {
        self.basis_element(self.top_degree, self.fundamental_index)
    }

    pub fn element(&self, k: usize, coords: SparseVec) -> Result<RingElement> {
        let e = RingElement::homogeneous(self.top_degree, k.min(self.top_degree), coords);
        if k > self.top_degree {
            return Err(Error::DegreeOutOfRange { degree: k, top: self.top_degree });
        }
        self.check(&e)?;
        Ok(e)
    }

    /// Checks that `x` has the shape of an element of this ring.
    pub fn check(&self, x: &RingElement) -> Result<()> {
        if x.components.len() != self.top_degree + 1 {
            return Err(Error::RingMismatch(format!(
                "element has {} components, ring has top degree {}",
                x.components.len(),
                self.top_degree
            )));
        }
        for (k, v) in x.components.iter().enumerate() {
            if v.max_index().is_some_and(|m| m >= self.dims[k]) {
                return Err(Error::RingMismatch(format!("coordinate {} beyond dim H^{k}", v.max_index().unwrap())));
            }
        }
        Ok(())
    }

    fn mul_components(&self, p: usize, x: &SparseVec, q: usize, y: &SparseVec) -> SparseVec {
        if p + q > self.top_degree {
            return SparseVec::zero();
        }
        let table = &self.tables[p][q];
        let mut acc = SparseVec::zero();
        for (i, a) in x.entries() {
            for (j, b) in y.entries() {
                acc = acc.add_scaled(&(a * b), &table[*i][*j]);
            }
        }
        acc
    }

    /// Bilinear extension of the structure tables. Components above the top
    /// degree vanish.
    pub fn multiply(&self, x: &RingElement, y: &RingElement) -> Result<RingElement> {
        self.check(x)?;
        self.check(y)?;
        let mut out = self.zero();
        for (p, xv) in x.components.iter().enumerate().filter(|(_, v)| !v.is_zero()) {
            for (q, yv) in y.components.iter().enumerate().filter(|(_, v)| !v.is_zero()) {
                if p + q <= self.top_degree {
                    let prod = self.mul_components(p, xv, q, yv);
                    out.components[p + q] = out.components[p + q].add(&prod);
                }
            }
        }
        Ok(out)
    }

    pub fn multiply_all(&self, factors: &[RingElement]) -> Result<RingElement> {
        let mut acc = self.one();
        for f in factors {
            acc = self.multiply(&acc, f)?;
        }
        Ok(acc)
    }

    /// `P[i][j]` = coefficient of the fundamental class in
    /// `basis_k[i] * basis_{d-k}[j]`.
    pub fn poincare_pairing(&self, k: usize) -> Result<Matrix> {
        let d = self.top_degree;
        if k > d {
            return Err(Error::DegreeOutOfRange { degree: k, top: d });
        }
        let mut m = Matrix::zeros(self.dims[k], self.dims[d - k]);
        for i in 0..self.dims[k] {
            for j in 0..self.dims[d - k] {
                m.set(i, j, self.tables[k][d - k][i][j].get(self.fundamental_index));
            }
        }
        Ok(m)
    }

    fn homogeneous_input(&self, x: &RingElement) -> Result<usize> {
        self.check(x)?;
        if x.is_zero() {
            return Err(Error::Precondition("element is zero".into()));
        }
        x.homogeneous_degree().ok_or(Error::NonHomogeneousClass)
    }

    /// Products `basis_l[i] * basis_{k-l}[j]` for `1 <= l <= k-1`.
    fn decomposable_products(&self, k: usize) -> Vec<SparseVec> {
        let mut out = Vec::new();
        for l in 1..k {
            for i in 0..self.dims[l] {
                for j in 0..self.dims[k - l] {
                    let v = &self.tables[l][k - l][i][j];
                    if !v.is_zero() {
                        out.push(v.clone());
                    }
                }
            }
        }
        out
    }

    /// Canonical basis of the degree-`k` layer of the Künneth ideal: the span
    /// of products of two positive-degree classes of total degree `k`.
    pub fn kunneth_ideal_basis(&self, k: usize) -> Result<Vec<RingElement>> {
        if k < 2 {
            return Err(Error::IdealUndefined(k));
        }
        if k > self.top_degree {
            return Err(Error::DegreeOutOfRange { degree: k, top: self.top_degree });
        }
        Ok(span_basis(self.dims[k], &self.decomposable_products(k))
            .into_iter()
            .map(|v| RingElement::homogeneous(self.top_degree, k, v))
            .collect())
    }

    pub fn kunneth_ideal_dim(&self, k: usize) -> Result<usize> {
        Ok(self.kunneth_ideal_basis(k)?.len())
    }

    /// Membership of a homogeneous class in the Künneth ideal. Zero is a
    /// member of every layer.
    pub fn in_kunneth_ideal(&self, omega: &RingElement) -> Result<bool> {
        self.check(omega)?;
        if omega.is_zero() {
            return Ok(true);
        }
        let k = omega.homogeneous_degree().ok_or(Error::NonHomogeneousClass)?;
        if k < 2 {
            return Ok(false);
        }
        let mut gens = self.decomposable_products(k);
        let base = rank_of(self.dims[k], &gens);
        gens.push(omega.components[k].clone());
        Ok(rank_of(self.dims[k], &gens) == base)
    }

    /// All `(c, c')` with `c` a degree-`l` basis class and `c'` the canonical
    /// solution of `c * c' = omega`, whenever that system is solvable.
    pub fn factorizations(&self, omega: &RingElement, l: usize) -> Result<Vec<(RingElement, RingElement)>> {
        let k = self.homogeneous_input(omega)?;
        if l == 0 || l >= k {
            return Ok(Vec::new());
        }
        let target = omega.components[k].to_dense(self.dims[k]);
        let mut out = Vec::new();
        for i in 0..self.dims[l] {
            let cols: Vec<SparseVec> = (0..self.dims[k - l]).map(|j| self.tables[l][k - l][i][j].clone()).collect();
            if cols.iter().all(SparseVec::is_zero) {
                continue;
            }
            if let Some(x) = Matrix::from_columns(self.dims[k], &cols).solve(&target) {
                out.push((
                    self.basis_element(l, i),
                    RingElement::homogeneous(self.top_degree, k - l, SparseVec::from_dense(&x)),
                ));
            }
        }
        Ok(out)
    }

    /// Checks every ring axiom exhaustively: unit, graded commutativity,
    /// associativity over all basis triples, top degree one-dimensional and
    /// Poincaré nondegeneracy in every degree, and the monomial presentation
    /// when present.
    pub fn validate(&self) -> Result<()> {
        let d = self.top_degree;
        let axiom = |msg: String| Err(Error::RingAxiom(msg));
        if self.dims[0] != 1 {
            return axiom(format!("dims[0] = {}", self.dims[0]));
        }
        if self.dims[d] != 1 || self.fundamental_index != 0 {
            return axiom(format!("top degree must be one-dimensional with fundamental index 0 (dim {})", self.dims[d]));
        }
        for k in 0..=d {
            for i in 0..self.dims[k] {
                let unit = SparseVec::unit(i);
                if self.tables[0][k][0][i] != unit || self.tables[k][0][i][0] != unit {
                    return axiom(format!("unit law fails on {}", self.labels[k][i]));
                }
            }
        }
        for p in 1..=d {
            for q in 1..=(d - p) {
                let s = sign_of(p, q);
                for i in 0..self.dims[p] {
                    for j in 0..self.dims[q] {
                        if self.tables[p][q][i][j] != self.tables[q][p][j][i].scaled(&s) {
                            return axiom(format!(
                                "graded commutativity fails on {} * {}",
                                self.labels[p][i], self.labels[q][j]
                            ));
                        }
                    }
                }
            }
        }
        self.check_associativity()?;
        for k in 0..=d {
            if !self.poincare_pairing(k)?.is_nonsingular() {
                return axiom(format!("Poincaré pairing degenerate in degree {k}"));
            }
        }
        if let Some(p) = &self.presentation {
            self.check_presentation(p)?;
        }
        Ok(())
    }

    fn check_associativity(&self) -> Result<()> {
        let d = self.top_degree;
        for p in 1..=d {
            for q in 1..=(d - p) {
                for r in 1..=(d - p - q) {
                    for i in 0..self.dims[p] {
                        for j in 0..self.dims[q] {
                            let ij = &self.tables[p][q][i][j];
                            for k in 0..self.dims[r] {
                                let left = self.mul_components(p + q, ij, r, &SparseVec::unit(k));
                                let jk = &self.tables[q][r][j][k];
                                let right = self.mul_components(p, &SparseVec::unit(i), q + r, jk);
                                if left != right {
                                    return Err(Error::RingAxiom(format!(
                                        "associativity fails on ({} * {}) * {}",
                                        self.labels[p][i], self.labels[q][j], self.labels[r][k]
                                    )));
                                }
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    fn check_presentation(&self, p: &MonomialPresentation) -> Result<()> {
        let bad = |m: String| Err(Error::RingAxiom(format!("monomial presentation: {m}")));
        if p.basis.len() != self.top_degree + 1 || (0..=self.top_degree).any(|k| p.basis[k].len() != self.dims[k]) {
            return bad("shape does not match dims".into());
        }
        for (g, gen) in p.generators.iter().enumerate() {
            if gen.degree == 0 || gen.degree > self.top_degree || gen.index >= self.dims[gen.degree] {
                return bad(format!("generator {} has no basis position", gen.name));
            }
            let m = &p.basis[gen.degree][gen.index];
            if m.word != [g] || !m.coeff.is_one() {
                return bad(format!("generator {} is not its own basis word", gen.name));
            }
        }
        for k in 0..=self.top_degree {
            for (i, m) in p.basis[k].iter().enumerate() {
                if m.coeff.is_zero() || m.word.iter().any(|&g| g >= p.generators.len()) {
                    return bad(format!("bad word for {}", self.labels[k][i]));
                }
                let deg: usize = m.word.iter().map(|&g| p.generators[g].degree).sum();
                if deg != k {
                    return bad(format!("word for {} has degree {deg}", self.labels[k][i]));
                }
                let factors: Vec<RingElement> = m
                    .word
                    .iter()
                    .map(|&g| self.basis_element(p.generators[g].degree, p.generators[g].index))
                    .collect();
                let prod = self.multiply_all(&factors)?.scale(&m.coeff);
                if prod != self.basis_element(k, i) {
                    return bad(format!("word for {} does not multiply out to it", self.labels[k][i]));
                }
            }
        }
        Ok(())
    }

    /// Human-readable form of an element using the basis labels.
    pub fn format_element(&self, x: &RingElement) -> String {
        let mut s = String::new();
        for (k, v) in x.components.iter().enumerate() {
            for (i, c) in v.entries() {
                let label = self.labels.get(k).and_then(|l| l.get(*i)).map_or("?", |l| l.as_str());
                let neg = c.is_negative();
                let a = c.abs();
                if s.is_empty() {
                    if neg {
                        s.push('-');
                    }
                } else {
                    s.push_str(if neg { " - " } else { " + " });
                }
                if a.is_one() {
                    s.push_str(label);
                } else {
                    let _ = write!(s, "{a}*{label}");
                }
            }
        }
        if s.is_empty() {
            s.push('0');
        }
        s
    }
}
