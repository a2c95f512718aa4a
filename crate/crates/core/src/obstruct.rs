//! Nonexistence certificates for graded homomorphisms `Φ : H*(N) -> Λ*R^n`
//! with `Φ(ω) != 0`, together with searchers that assemble them and exact
//! verifiers that re-check them from their payload alone.
//!
//! Four kinds are supported:
//!
//! * `PrywesBound`: `N` is `n`-dimensional, so such a `Φ` is injective by
//!   Poincaré duality, and some `dim H^k(N)` exceeds `C(n, k)`.
//! * `H1Annihilator`: `c * c' = ω`, degree-1 classes `c_i` with `c * c_i = 0`
//!   and duals `c_i * c'_l = δ_il c`. Any such `Φ` forces `m < n`.
//! * `DualPair`: a factor `c` of `ω` with `c_i * c'_l = δ_il c`, `c_i` of
//!   degree `k'`. Any such `Φ` forces `m <= C(n, k')`.
//! * `SubmanifoldBound`: an `n`-submanifold `M` whose pull-back is onto in
//!   the complementary degree while `dim ι*H^k(N) > C(n, k)`.
//!
//! Searchers only try basis-aligned candidate classes plus linear solves for
//! duals; they are sound, not complete.

use std::fmt;

use num::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exterior::dim_component;
use crate::linalg::{Matrix, SparseVec};
use crate::rational::Q;
use crate::ring::{ClassFile, GradedRing, RingElement, RingFile};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum CertificateKind {
    PrywesBound,
    H1Annihilator,
    DualPair,
    SubmanifoldBound,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = ">")]
    Gt,
    #[serde(rename = ">=")]
    Ge,
}

impl Relation {
    pub fn holds(self, lhs: u128, rhs: u128) -> bool {
        match self {
            Relation::Gt => lhs > rhs,
            Relation::Ge => lhs >= rhs,
        }
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Gt => ">",
            Relation::Ge => ">=",
        })
    }
}

/// The violated inequality `lhs rel rhs`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Inequality {
    pub lhs: u128,
    pub rel: Relation,
    pub rhs: u128,
}

impl fmt::Display for Inequality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.lhs, self.rel, self.rhs)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct CertClasses {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega: Option<ClassFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<ClassFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cofactor: Option<ClassFile>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub left: Vec<ClassFile>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub right: Vec<ClassFile>,
}

/// One recorded product, recomputed by the verifier.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProductRecord {
    pub factors: (String, String),
    pub product: ClassFile,
}

/// Submanifold data: the ring of `M` and the pull-back `ι*` per degree,
/// `iota_star[k]` a `dim H^k(M) × dim H^k(N)` matrix given by rows.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubmanifoldPayload {
    pub submanifold_hash: String,
    pub submanifold: RingFile,
    pub iota_star: Vec<Vec<SparseVec>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub kind: CertificateKind,
    pub ring_hash: String,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degree: Option<usize>,
    pub classes: CertClasses,
    pub products_table: Vec<ProductRecord>,
    pub inequality: Inequality,
    pub conclusion: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub submanifold: Option<SubmanifoldPayload>,
}

impl Certificate {
    /// Size of the witness family (the `m` of the violated inequality).
    pub fn m(&self) -> u128 {
        self.inequality.lhs
    }
}

/// `c * cofactor = omega`: certifies `Φ(c) != 0` whenever `Φ(ω) != 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactorOf {
    pub omega: RingElement,
    pub cofactor: RingElement,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DualSystem {
    pub target: RingElement,
    pub left: Vec<RingElement>,
    pub right: Vec<RingElement>,
    pub factor_of: Option<FactorOf>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnnihilatorSystem {
    pub c: RingElement,
    pub c_prime: RingElement,
    pub omega: RingElement,
    pub classes: Vec<RingElement>,
    pub duals: Vec<RingElement>,
}

fn class_file(ring: &GradedRing, x: &RingElement, degree: usize) -> ClassFile {
    debug_assert!(ring.check(x).is_ok());
    ClassFile { degree, coords: x.component(degree).clone() }
}

fn degree_of(x: &RingElement, what: &str) -> Result<usize> {
    if x.is_zero() {
        return Err(Error::InvalidSystem(format!("{what} is zero")));
    }
    x.homogeneous_degree().ok_or_else(|| Error::InvalidSystem(format!("{what} is not homogeneous")))
}

fn expect_degree(x: &RingElement, k: usize, what: &str) -> Result<()> {
    if x.is_zero() || x.homogeneous_degree() == Some(k) {
        Ok(())
    } else {
        Err(Error::InvalidSystem(format!("{what} is not homogeneous of degree {k}")))
    }
}

struct Recorder<'a> {
    ring: &'a GradedRing,
    table: Vec<ProductRecord>,
}

impl<'a> Recorder<'a> {
    /// Multiplies, records the product and fails unless it equals `expected`.
    fn require(&mut self, names: (String, String), x: &RingElement, y: &RingElement, expected: &RingElement, degree: usize) -> Result<()> {
        let p = self.ring.multiply(x, y)?;
        if p != *expected {
            return Err(Error::InvalidSystem(format!(
                "{} * {} = {}, expected {}",
                names.0,
                names.1,
                self.ring.format_element(&p),
                self.ring.format_element(expected)
            )));
        }
        self.table.push(ProductRecord { factors: names, product: class_file(self.ring, &p, degree) });
        Ok(())
    }
}

fn check_kronecker(
    rec: &mut Recorder,
    left: &[RingElement],
    right: &[RingElement],
    target: &RingElement,
    k: usize,
) -> Result<()> {
    let zero = rec.ring.zero();
    for (i, ci) in left.iter().enumerate() {
        for (l, cl) in right.iter().enumerate() {
            let expected = if i == l { target } else { &zero };
            rec.require((format!("left[{i}]"), format!("right[{l}]")), ci, cl, expected, k)?;
        }
    }
    Ok(())
}

fn check_shape(ring: &GradedRing, xs: &[&RingElement]) -> Result<()> {
    xs.iter().try_for_each(|x| ring.check(x))
}

pub fn prywes_bound(ring: &GradedRing, n: usize) -> Option<Certificate> {
    if n < 2 || ring.top_degree() != n {
        return None;
    }
    let k = (0..=n).find(|&k| ring.dim(k) as u128 > dim_component(n, k))?;
    Some(prywes_certificate(ring, n, k))
}

fn prywes_certificate(ring: &GradedRing, n: usize, k: usize) -> Certificate {
    let inequality = Inequality { lhs: ring.dim(k) as u128, rel: Relation::Gt, rhs: dim_component(n, k) };
    Certificate {
        kind: CertificateKind::PrywesBound,
        ring_hash: ring.hash(),
        n,
        degree: Some(k),
        classes: CertClasses::default(),
        products_table: Vec::new(),
        inequality,
        conclusion: format!(
            "N is {n}-dimensional, so a graded homomorphism H*(N) -> Λ*R^{n} that is nonzero on the \
             fundamental class is injective; dim H^{k}(N) = {} > C({n},{k}) = {}, so none exists",
            inequality.lhs, inequality.rhs
        ),
        submanifold: None,
    }
}

/// Checks the Kronecker relations of a dual system; returns a `DualPair`
/// certificate when `m > C(n, k')`.
pub fn verify_dual_system(ring: &GradedRing, sys: &DualSystem, n: usize) -> Result<Option<Certificate>> {
    let m = sys.left.len();
    if sys.right.len() != m {
        return Err(Error::InvalidSystem(format!("{m} left classes but {} right classes", sys.right.len())));
    }
    check_shape(ring, &[&sys.target])?;
    check_shape(ring, &sys.left.iter().chain(&sys.right).collect::<Vec<_>>())?;
    let k = degree_of(&sys.target, "target class")?;
    let kp = match sys.left.iter().find(|x| !x.is_zero()) {
        Some(x) => degree_of(x, "left[0]")?,
        None if m == 0 => return Ok(None),
        None => return Err(Error::InvalidSystem("left classes are zero".into())),
    };
    if kp == 0 || kp >= k {
        return Err(Error::InvalidSystem(format!("left degree {kp} not in 1..{k}")));
    }
    for (i, x) in sys.left.iter().enumerate() {
        expect_degree(x, kp, &format!("left[{i}]"))?;
    }
    for (i, x) in sys.right.iter().enumerate() {
        expect_degree(x, k - kp, &format!("right[{i}]"))?;
    }
    let mut rec = Recorder { ring, table: Vec::new() };
    let mut classes = CertClasses {
        target: Some(class_file(ring, &sys.target, k)),
        left: sys.left.iter().map(|x| class_file(ring, x, kp)).collect(),
        right: sys.right.iter().map(|x| class_file(ring, x, k - kp)).collect(),
        ..Default::default()
    };
    if let Some(f) = &sys.factor_of {
        check_shape(ring, &[&f.omega, &f.cofactor])?;
        let deg_omega = degree_of(&f.omega, "omega")?;
        if deg_omega < k {
            return Err(Error::InvalidSystem("omega has lower degree than the target".into()));
        }
        expect_degree(&f.cofactor, deg_omega - k, "cofactor")?;
        rec.require(("target".into(), "cofactor".into()), &sys.target, &f.cofactor, &f.omega, deg_omega)?;
        classes.omega = Some(class_file(ring, &f.omega, deg_omega));
        classes.cofactor = Some(class_file(ring, &f.cofactor, deg_omega - k));
    }
    check_kronecker(&mut rec, &sys.left, &sys.right, &sys.target, k)?;
    let bound = dim_component(n, kp);
    if (m as u128) <= bound {
        return Ok(None);
    }
    let inequality = Inequality { lhs: m as u128, rel: Relation::Gt, rhs: bound };
    let subject = if sys.factor_of.is_some() { "Φ(ω) != 0 (the target divides ω)" } else { "Φ(target) != 0" };
    Ok(Some(Certificate {
        kind: CertificateKind::DualPair,
        ring_hash: ring.hash(),
        n,
        degree: Some(kp),
        classes,
        products_table: rec.table,
        inequality,
        conclusion: format!(
            "{m} classes of degree {kp} with Kronecker duals against a degree-{k} target, but \
             m = {m} > C({n},{kp}) = {bound}: no graded homomorphism H*(N) -> Λ*R^{n} with {subject}"
        ),
        submanifold: None,
    }))
}

/// Checks the hypotheses of the degree-1 annihilator obstruction; returns an
/// `H1Annihilator` certificate when `m >= n`.
pub fn verify_annihilator_system(ring: &GradedRing, sys: &AnnihilatorSystem, n: usize) -> Result<Option<Certificate>> {
    let m = sys.classes.len();
    if sys.duals.len() != m {
        return Err(Error::InvalidSystem(format!("{m} classes but {} duals", sys.duals.len())));
    }
    check_shape(ring, &[&sys.c, &sys.c_prime, &sys.omega])?;
    check_shape(ring, &sys.classes.iter().chain(&sys.duals).collect::<Vec<_>>())?;
    let k = degree_of(&sys.c, "c")?;
    let kpp = degree_of(&sys.c_prime, "c'")?;
    let deg_omega = degree_of(&sys.omega, "omega")?;
    if k == 0 || kpp == 0 || deg_omega != k + kpp {
        return Err(Error::InvalidSystem(format!("degrees |c| = {k}, |c'| = {kpp}, |ω| = {deg_omega}")));
    }
    for (i, x) in sys.classes.iter().enumerate() {
        expect_degree(x, 1, &format!("left[{i}]"))?;
    }
    for (i, x) in sys.duals.iter().enumerate() {
        expect_degree(x, k - 1, &format!("right[{i}]"))?;
    }
    let mut rec = Recorder { ring, table: Vec::new() };
    rec.require(("target".into(), "cofactor".into()), &sys.c, &sys.c_prime, &sys.omega, deg_omega)?;
    let zero = ring.zero();
    for (i, ci) in sys.classes.iter().enumerate() {
        rec.require(("target".into(), format!("left[{i}]")), &sys.c, ci, &zero, k + 1)?;
    }
    check_kronecker(&mut rec, &sys.classes, &sys.duals, &sys.c, k)?;
    if m < n {
        return Ok(None);
    }
    let inequality = Inequality { lhs: m as u128, rel: Relation::Ge, rhs: n as u128 };
    Ok(Some(Certificate {
        kind: CertificateKind::H1Annihilator,
        ring_hash: ring.hash(),
        n,
        degree: Some(k),
        classes: CertClasses {
            omega: Some(class_file(ring, &sys.omega, deg_omega)),
            target: Some(class_file(ring, &sys.c, k)),
            cofactor: Some(class_file(ring, &sys.c_prime, kpp)),
            left: sys.classes.iter().map(|x| class_file(ring, x, 1)).collect(),
            right: sys.duals.iter().map(|x| class_file(ring, x, k - 1)).collect(),
        },
        products_table: rec.table,
        inequality,
        conclusion: format!(
            "ω = c * c' with {m} degree-1 classes annihilated by c and Kronecker duals in degree {}; \
             a graded homomorphism H*(N) -> Λ*R^{n} with Φ(ω) != 0 would need m < n, but m = {m} >= {n}",
            k - 1
        ),
        submanifold: None,
    }))
}

/// Chooses, among basis-aligned candidates, classes `left[a]` and duals in
/// the span of `right` with `left[a] * dual[b] = δ_ab * target`.
///
/// Candidate pairs whose product is not a multiple of `target` are removed
/// greedily (the vertex with most such pairs first; ties go to the right
/// side, then to the highest index), then the pairing restricted to the
/// survivors is inverted on a maximal set of independent rows.
fn assemble_kronecker(
    ring: &GradedRing,
    target: &RingElement,
    left: &[RingElement],
    right: &[RingElement],
) -> (Vec<RingElement>, Vec<RingElement>) {
    let Some(k) = target.homogeneous_degree() else { return (Vec::new(), Vec::new()) };
    let base = target.component(k);
    let mut pairing: Vec<Vec<Option<Q>>> = Vec::with_capacity(left.len());
    for x in left {
        let row = right
            .iter()
            .map(|y| {
                let p = ring.multiply(x, y).expect("same ring");
                if p.is_zero() {
                    Some(Q::zero())
                } else if p.homogeneous_degree() == Some(k) {
                    p.component(k).multiple_of(base)
                } else {
                    None
                }
            })
            .collect();
        pairing.push(row);
    }
    let mut alive_l = vec![true; left.len()];
    let mut alive_r = vec![true; right.len()];
    loop {
        let bad_l: Vec<usize> = (0..left.len())
            .map(|i| if alive_l[i] { (0..right.len()).filter(|&j| alive_r[j] && pairing[i][j].is_none()).count() } else { 0 })
            .collect();
        let bad_r: Vec<usize> = (0..right.len())
            .map(|j| if alive_r[j] { (0..left.len()).filter(|&i| alive_l[i] && pairing[i][j].is_none()).count() } else { 0 })
            .collect();
        let worst_l = bad_l.iter().enumerate().max_by_key(|(i, c)| (**c, *i));
        let worst_r = bad_r.iter().enumerate().max_by_key(|(j, c)| (**c, *j));
        let (wl, wr) = (worst_l.map_or(0, |x| *x.1), worst_r.map_or(0, |x| *x.1));
        if wl == 0 && wr == 0 {
            break;
        }
        if wr >= wl {
            alive_r[worst_r.unwrap().0] = false;
        } else {
            alive_l[worst_l.unwrap().0] = false;
        }
    }
    let rows: Vec<usize> = (0..left.len()).filter(|&i| alive_l[i]).collect();
    let cols: Vec<usize> = (0..right.len()).filter(|&j| alive_r[j]).collect();
    if rows.is_empty() || cols.is_empty() {
        return (Vec::new(), Vec::new());
    }
    let dense = |i: usize| -> Vec<Q> { cols.iter().map(|&j| pairing[i][j].clone().unwrap()).collect() };
    // Greedy independent rows in index order.
    let mut chosen: Vec<usize> = Vec::new();
    let mut basis: Vec<Vec<Q>> = Vec::new();
    for &i in &rows {
        let mut trial = basis.clone();
        trial.push(dense(i));
        if Matrix::from_rows(cols.len(), trial.clone()).rank() == trial.len() {
            basis = trial;
            chosen.push(i);
        }
    }
    let system = Matrix::from_rows(cols.len(), basis);
    let mut classes = Vec::new();
    let mut duals = Vec::new();
    for (t, &i) in chosen.iter().enumerate() {
        let mut rhs = vec![Q::zero(); chosen.len()];
        rhs[t] = Q::one();
        let y = system.solve(&rhs).expect("full row rank");
        let mut dual = ring.zero();
        for (coef, &j) in y.iter().zip(&cols) {
            dual = dual.add_scaled(coef, &right[j]).expect("same ring");
        }
        classes.push(left[i].clone());
        duals.push(dual);
    }
    (classes, duals)
}

/// Largest basis-aligned annihilator system for the factorization `c * c' = ω`.
pub fn assemble_annihilator(ring: &GradedRing, c: &RingElement, c_prime: &RingElement, omega: &RingElement) -> Option<AnnihilatorSystem> {
    let k = c.homogeneous_degree()?;
    if k == 0 {
        return None;
    }
    let left: Vec<RingElement> = ring
        .basis(1)
        .into_iter()
        .filter(|b| ring.multiply(c, b).map(|p| p.is_zero()).unwrap_or(false))
        .collect();
    let right = ring.basis(k - 1);
    let (classes, duals) = assemble_kronecker(ring, c, &left, &right);
    Some(AnnihilatorSystem { c: c.clone(), c_prime: c_prime.clone(), omega: omega.clone(), classes, duals })
}

/// Basis-aligned dual system for target `c` with left degree `k'`.
pub fn assemble_dual_system(ring: &GradedRing, c: &RingElement, kp: usize, factor_of: Option<FactorOf>) -> Option<DualSystem> {
    let k = c.homogeneous_degree()?;
    if kp == 0 || kp >= k {
        return None;
    }
    let (left, right) = assemble_kronecker(ring, c, &ring.basis(kp), &ring.basis(k - kp));
    Some(DualSystem { target: c.clone(), left, right, factor_of })
}

/// Outcome of an obstruction search, with a human-readable trace.
#[derive(Clone, Debug)]
pub struct SearchReport {
    pub certificate: Option<Certificate>,
    pub log: Vec<String>,
}

fn check_search_preconditions(ring: &GradedRing, omega: &RingElement, n: usize) -> Result<()> {
    ring.check(omega)?;
    if n < 2 || n > ring.top_degree() {
        return Err(Error::Precondition(format!("need 2 <= n <= {} (got n = {n})", ring.top_degree())));
    }
    if omega.is_zero() {
        return Err(Error::Precondition("ω is zero".into()));
    }
    if omega.homogeneous_degree() != Some(n) {
        return Err(Error::Precondition(format!("ω is not homogeneous of degree {n}")));
    }
    if !ring.in_kunneth_ideal(omega)? {
        return Err(Error::Precondition(format!("ω is not in the Künneth ideal K^{n}(N)")));
    }
    Ok(())
}

pub fn search_obstruction(ring: &GradedRing, omega: &RingElement, n: usize) -> Result<Option<Certificate>> {
    Ok(search_obstruction_logged(ring, omega, n)?.certificate)
}

/// Deterministic search in canonical order: dimension bound, then degree-1
/// annihilator systems over all factorizations of `ω` (by factor degree,
/// then basis index), then dual systems over all factors and left degrees.
/// Candidates are evaluated in parallel; the first certificate in canonical
/// order is returned.
pub fn search_obstruction_logged(ring: &GradedRing, omega: &RingElement, n: usize) -> Result<SearchReport> {
    check_search_preconditions(ring, omega, n)?;
    let mut log = Vec::new();

    if ring.top_degree() == n {
        if let Some(cert) = prywes_bound(ring, n) {
            log.push(format!("dimension bound: {}", cert.inequality));
            return Ok(SearchReport { certificate: Some(cert), log });
        }
        log.push(format!("dimension bound: dims {:?} within binomials C({n},k)", ring.dims()));
    } else {
        log.push(format!("dimension bound: not applicable (dim N = {} != n = {n})", ring.top_degree()));
    }

    let mut factorizations = Vec::new();
    for l in 1..n {
        factorizations.extend(ring.factorizations(omega, l)?);
    }
    log.push(format!("{} factorizations of ω", factorizations.len()));

    let annihilators: Vec<Result<Option<Certificate>>> = factorizations
        .par_iter()
        .map(|(c, cp)| match assemble_annihilator(ring, c, cp, omega) {
            Some(sys) => verify_annihilator_system(ring, &sys, n),
            None => Ok(None),
        })
        .collect();
    let mut best_m = 0usize;
    for (r, (c, cp)) in annihilators.into_iter().zip(&factorizations) {
        if let Some(cert) = r? {
            log.push(format!("annihilator system: {}", cert.inequality));
            return Ok(SearchReport { certificate: Some(cert), log });
        }
        if let Some(sys) = assemble_annihilator(ring, c, cp, omega) {
            best_m = best_m.max(sys.classes.len());
        }
    }
    log.push(format!("annihilator systems: largest m = {best_m} < n = {n}"));

    let mut candidates = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for (c, cp) in &factorizations {
        if !seen.insert(c.clone()) {
            continue;
        }
        let k = c.homogeneous_degree().unwrap_or(0);
        for kp in 1..k {
            candidates.push((c.clone(), cp.clone(), kp));
        }
    }
    let duals: Vec<Result<(usize, Option<Certificate>)>> = candidates
        .par_iter()
        .map(|(c, cp, kp)| {
            let f = FactorOf { omega: omega.clone(), cofactor: cp.clone() };
            match assemble_dual_system(ring, c, *kp, Some(f)) {
                Some(sys) => Ok((sys.left.len(), verify_dual_system(ring, &sys, n)?)),
                None => Ok((0, None)),
            }
        })
        .collect();
    let mut best = (0usize, 0u128);
    for (r, (_, _, kp)) in duals.into_iter().zip(&candidates) {
        let (m, cert) = r?;
        if let Some(cert) = cert {
            log.push(format!("dual system: {}", cert.inequality));
            return Ok(SearchReport { certificate: Some(cert), log });
        }
        if m > best.0 {
            best = (m, dim_component(n, *kp));
        }
    }
    if best.0 > 0 {
        log.push(format!("dual systems: largest m = {} <= C(n,k') = {}", best.0, best.1));
    } else {
        log.push("dual systems: none assembled".into());
    }
    Ok(SearchReport { certificate: None, log })
}

fn rebuild(ring: &GradedRing, c: &Option<ClassFile>, what: &str) -> Result<RingElement> {
    c.as_ref()
        .ok_or_else(|| Error::CertificateRejected(format!("missing class {what}")))?
        .to_element(ring)
        .map_err(|e| Error::CertificateRejected(format!("class {what}: {e}")))
}

fn rebuild_all(ring: &GradedRing, cs: &[ClassFile], what: &str) -> Result<Vec<RingElement>> {
    cs.iter()
        .enumerate()
        .map(|(i, c)| c.to_element(ring).map_err(|e| Error::CertificateRejected(format!("class {what}[{i}]: {e}"))))
        .collect()
}

fn compare(regenerated: Option<Certificate>, cert: &Certificate) -> Result<()> {
    let Some(fresh) = regenerated else {
        return Err(Error::CertificateRejected(format!(
            "payload re-verifies but the inequality does not hold for n = {}",
            cert.n
        )));
    };
    if fresh.inequality != cert.inequality {
        return Err(Error::CertificateRejected(format!(
            "inequality recomputes to {}, file claims {}",
            fresh.inequality, cert.inequality
        )));
    }
    if fresh.products_table.len() != cert.products_table.len() {
        return Err(Error::CertificateRejected("products table has the wrong number of entries".into()));
    }
    for (a, b) in fresh.products_table.iter().zip(&cert.products_table) {
        if a != b {
            return Err(Error::CertificateRejected(format!(
                "recorded product {} * {} does not match recomputation",
                b.factors.0, b.factors.1
            )));
        }
    }
    if fresh != *cert {
        return Err(Error::CertificateRejected("certificate fields differ from recomputation".into()));
    }
    Ok(())
}

/// Re-verifies a certificate against `ring` from its payload alone.
pub fn verify_certificate(ring: &GradedRing, cert: &Certificate) -> Result<()> {
    let actual = ring.hash();
    if cert.ring_hash != actual {
        return Err(Error::HashMismatch { expected: cert.ring_hash.clone(), actual });
    }
    let reject = |e: Error| match e {
        Error::CertificateRejected(_) => e,
        other => Error::CertificateRejected(other.to_string()),
    };
    let n = cert.n;
    match cert.kind {
        CertificateKind::PrywesBound => {
            let k = cert.degree.ok_or_else(|| Error::CertificateRejected("missing degree".into()))?;
            if ring.top_degree() != n {
                return Err(Error::CertificateRejected(format!(
                    "dimension bound needs dim N = n, got {} and {n}",
                    ring.top_degree()
                )));
            }
            if k > n {
                return Err(Error::CertificateRejected("degree above n".into()));
            }
            let fresh = prywes_certificate(ring, n, k);
            if !fresh.inequality.rel.holds(fresh.inequality.lhs, fresh.inequality.rhs) {
                return Err(Error::CertificateRejected(format!("{} does not hold", fresh.inequality)));
            }
            compare(Some(fresh), cert)
        }
        CertificateKind::H1Annihilator => {
            let cl = &cert.classes;
            let sys = AnnihilatorSystem {
                c: rebuild(ring, &cl.target, "target")?,
                c_prime: rebuild(ring, &cl.cofactor, "cofactor")?,
                omega: rebuild(ring, &cl.omega, "omega")?,
                classes: rebuild_all(ring, &cl.left, "left")?,
                duals: rebuild_all(ring, &cl.right, "right")?,
            };
            compare(verify_annihilator_system(ring, &sys, n).map_err(reject)?, cert)
        }
        CertificateKind::DualPair => {
            let cl = &cert.classes;
            let factor_of = match (&cl.omega, &cl.cofactor) {
                (None, None) => None,
                _ => Some(FactorOf {
                    omega: rebuild(ring, &cl.omega, "omega")?,
                    cofactor: rebuild(ring, &cl.cofactor, "cofactor")?,
                }),
            };
            let sys = DualSystem {
                target: rebuild(ring, &cl.target, "target")?,
                left: rebuild_all(ring, &cl.left, "left")?,
                right: rebuild_all(ring, &cl.right, "right")?,
                factor_of,
            };
            compare(verify_dual_system(ring, &sys, n).map_err(reject)?, cert)
        }
        CertificateKind::SubmanifoldBound => {
            let payload = cert
                .submanifold
                .as_ref()
                .ok_or_else(|| Error::CertificateRejected("missing submanifold payload".into()))?;
            let sub = GradedRing::from_file(&payload.submanifold).map_err(reject)?;
            if sub.hash() != payload.submanifold_hash {
                return Err(Error::HashMismatch { expected: payload.submanifold_hash.clone(), actual: sub.hash() });
            }
            let iota = payload
                .iota_star
                .iter()
                .enumerate()
                .map(|(k, rows)| {
                    let cols = ring.dim(k);
                    if rows.iter().any(|r| r.max_index().is_some_and(|m| m >= cols)) {
                        return Err(Error::CertificateRejected(format!("ι* row beyond dim H^{k}(N)")));
                    }
                    Ok(Matrix::from_rows(cols, rows.iter().map(|r| r.to_dense(cols)).collect()))
                })
                .collect::<Result<Vec<_>>>()?;
            let omega = rebuild(ring, &cert.classes.omega, "omega")?;
            let report = submanifold_bound(ring, &sub, &iota, &omega, n).map_err(reject)?;
            compare(report.certificate, cert)
        }
    }
}

/// Per-degree line of a [`SubmanifoldReport`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeBound {
    pub degree: usize,
    pub image_dim: usize,
    pub binomial: u128,
    pub surjective: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubmanifoldReport {
    pub pullback_of_omega_nonzero: bool,
    /// Whether `K^n(N)` is spanned by `ω`, which makes `ker ι* ∩ K^n(N)` trivial.
    pub kunneth_layer_is_span_of_omega: bool,
    pub degrees: Vec<DegreeBound>,
    pub bounds_hold: bool,
    pub certificate: Option<Certificate>,
}

fn pullback(iota: &[Matrix], x: &RingElement, top: usize) -> RingElement {
    let mut out = RingElement::zero(top);
    let mut comps: Vec<SparseVec> = out.components().to_vec();
    for (k, v) in x.components().iter().enumerate() {
        if k <= top && !v.is_zero() {
            let dense = v.to_dense(iota[k].cols());
            comps[k] = SparseVec::from_dense(&iota[k].apply(&dense));
        }
    }
    for (k, c) in comps.into_iter().enumerate() {
        out = out.add(&RingElement::homogeneous(top, k, c)).expect("same shape");
    }
    out
}

/// Dimension bound for an `n`-submanifold `M ⊂ N` with pull-back `ι*`.
///
/// `iota_star[k]` maps `H^k(N)` to `H^k(M)` for `k = 0..=dim N` (rows for
/// degrees above `n` are empty). `ι*` must be a ring homomorphism and
/// `ι*ω != 0`. A `SubmanifoldBound` certificate is emitted for the first
/// `1 <= k <= n-1` where `ι*` is onto `H^{n-k}(M)` but
/// `dim ι*H^k(N) > C(n,k)`.
pub fn submanifold_bound(
    ring_n: &GradedRing,
    ring_m: &GradedRing,
    iota_star: &[Matrix],
    omega: &RingElement,
    n: usize,
) -> Result<SubmanifoldReport> {
    let d = ring_n.top_degree();
    let not_hom = |m: String| Error::NotHomomorphism(m);
    if ring_m.top_degree() != n {
        return Err(Error::Precondition(format!("submanifold has dimension {}, expected n = {n}", ring_m.top_degree())));
    }
    if iota_star.len() != d + 1 {
        return Err(not_hom(format!("{} ι* blocks for top degree {d}", iota_star.len())));
    }
    for (k, m) in iota_star.iter().enumerate() {
        if m.rows() != ring_m.dim(k) || m.cols() != ring_n.dim(k) {
            return Err(not_hom(format!(
                "ι* in degree {k} is {}x{}, expected {}x{}",
                m.rows(),
                m.cols(),
                ring_m.dim(k),
                ring_n.dim(k)
            )));
        }
    }
    ring_n.check(omega)?;
    if omega.homogeneous_degree() != Some(n) {
        return Err(Error::Precondition(format!("ω is not a nonzero class of degree {n}")));
    }
    if !ring_n.in_kunneth_ideal(omega)? {
        return Err(Error::Precondition(format!("ω is not in K^{n}(N)")));
    }
    let top_m = ring_m.top_degree();
    let lift = |x: &RingElement| -> RingElement {
        // Truncate to degrees that exist in M.
        let mut comps = x.components().to_vec();
        comps.truncate(top_m + 1);
        let mut e = ring_m.zero();
        for (k, c) in comps.into_iter().enumerate() {
            e = e.add(&RingElement::homogeneous(top_m, k, c)).expect("shape");
        }
        e
    };
    let padded: Vec<Matrix> = iota_star.to_vec();
    let apply = |x: &RingElement| lift(&pullback(&padded, x, d));
    if apply(&ring_n.one()) != ring_m.one() {
        return Err(not_hom("ι*(1) != 1".into()));
    }
    for p in 1..=d {
        for q in 1..=(d - p) {
            for i in 0..ring_n.dim(p) {
                for j in 0..ring_n.dim(q) {
                    let (x, y) = (ring_n.basis_element(p, i), ring_n.basis_element(q, j));
                    let lhs = apply(&ring_n.multiply(&x, &y)?);
                    let rhs = ring_m.multiply(&apply(&x), &apply(&y))?;
                    if lhs != rhs {
                        return Err(not_hom(format!(
                            "ι*({} * {}) != ι*({}) * ι*({})",
                            ring_n.label(p, i),
                            ring_n.label(q, j),
                            ring_n.label(p, i),
                            ring_n.label(q, j)
                        )));
                    }
                }
            }
        }
    }
    let pulled = apply(omega);
    if pulled.is_zero() {
        return Err(Error::Precondition("ι*ω = 0".into()));
    }
    let kn = ring_n.kunneth_ideal_dim(n)?;
    let degrees: Vec<DegreeBound> = (0..=n)
        .map(|k| {
            let image_dim = iota_star[k].rank();
            DegreeBound { degree: k, image_dim, binomial: dim_component(n, k), surjective: image_dim == ring_m.dim(k) }
        })
        .collect();
    let bounds_hold = degrees.iter().all(|b| b.image_dim as u128 <= b.binomial);
    let violated = (1..n).find(|&k| degrees[n - k].surjective && degrees[k].image_dim as u128 > degrees[k].binomial);
    let kn_is_span = kn == 1;
    let certificate = violated.map(|k| {
        let b = &degrees[k];
        let inequality = Inequality { lhs: b.image_dim as u128, rel: Relation::Gt, rhs: b.binomial };
        let tail = if kn_is_span {
            "; since K^n(N) is spanned by ω, (N, ω) admits no infinite-energy quasiregular ω-curve"
        } else {
            ""
        };
        Certificate {
            kind: CertificateKind::SubmanifoldBound,
            ring_hash: ring_n.hash(),
            n,
            degree: Some(k),
            classes: CertClasses { omega: Some(class_file(ring_n, omega, n)), ..Default::default() },
            products_table: Vec::new(),
            inequality,
            conclusion: format!(
                "ι* is onto H^{}(M) and ι*ω != 0, but dim ι*H^{k}(N) = {} > C({n},{k}) = {}: every \
                 infinite-energy quasiregular ω-curve F has ker ι* ∩ K^n(N) not contained in core_ω(F){tail}",
                n - k,
                b.image_dim,
                b.binomial
            ),
            submanifold: Some(SubmanifoldPayload {
                submanifold_hash: ring_m.hash(),
                submanifold: ring_m.to_file(),
                iota_star: iota_star
                    .iter()
                    .map(|m| (0..m.rows()).map(|r| SparseVec::from_dense(m.row(r))).collect())
                    .collect(),
            }),
        }
    });
    Ok(SubmanifoldReport {
        pullback_of_omega_nonzero: true,
        kunneth_layer_is_span_of_omega: kn_is_span,
        degrees,
        bounds_hold,
        certificate,
    })
}

/// Pull-back along the slice inclusion `F_f -> N = F_1 × ... × F_m` at a
/// point of the other factors: classes pulled back from `F_f` map to
/// themselves, every other Künneth basis class to zero.
pub fn slice_pullback(built: &crate::ring::BuiltManifold, factor: usize) -> Result<Vec<Matrix>> {
    let f = built
        .factors
        .get(factor)
        .ok_or_else(|| Error::Precondition(format!("no factor {}", factor + 1)))?;
    let ring = &built.ring;
    Ok((0..=ring.top_degree())
        .map(|k| {
            let mut m = Matrix::zeros(f.ring.dim(k), ring.dim(k));
            if k < f.embed.len() {
                for (i, &j) in f.embed[k].iter().enumerate() {
                    m.set(i, j, Q::one());
                }
            }
            m
        })
        .collect())
}

/// Identity pull-back `H*(N) -> H*(N)`.
pub fn identity_pullback(ring: &GradedRing) -> Vec<Matrix> {
    (0..=ring.top_degree())
        .map(|k| {
            let mut m = Matrix::zeros(ring.dim(k), ring.dim(k));
            for i in 0..ring.dim(k) {
                m.set(i, i, Q::one());
            }
            m
        })
        .collect()
}
