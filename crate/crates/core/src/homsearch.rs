//! Graded algebra homomorphisms `Φ : H*(N) -> Λ*R^n` with `Φ(ω) != 0`:
//! an exact verifier, a template catalog for the standard building blocks
//! and a bounded, deterministic enumeration over generator images.

use itertools::Itertools;
use num::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exterior::{blades_of_degree, Blade, ExtElement};
use crate::rational::{q, Q};
use crate::ring::{BuiltManifold, GradedRing, ManifoldExpr, MonomialPresentation, RingElement};

/// `images[k - 1][i] = Φ(basis_k[i])` for `1 <= k <= min(dim N, n)`;
/// `Φ(1) = 1` and higher degrees map to zero.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomWitness {
    pub ring_hash: String,
    pub ambient_n: usize,
    pub images: Vec<Vec<ExtElement>>,
}

impl HomWitness {
    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("witness serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    /// Image of basis class `i` of degree `k`.
    pub fn image(&self, k: usize, i: usize) -> Result<ExtElement> {
        if k == 0 {
            return ExtElement::one(self.ambient_n);
        }
        match self.images.get(k - 1) {
            Some(row) => Ok(row[i].clone()),
            None => ExtElement::zero(self.ambient_n),
        }
    }
}

fn max_degree(ring: &GradedRing, n: usize) -> usize {
    ring.top_degree().min(n)
}

fn check_shape(ring: &GradedRing, w: &HomWitness) -> Result<()> {
    let shape = |m: String| Error::ShapeMismatch(m);
    let top = max_degree(ring, w.ambient_n);
    if w.images.len() != top {
        return Err(shape(format!("{} image degrees, expected {top}", w.images.len())));
    }
    for (k, row) in w.images.iter().enumerate().map(|(k, r)| (k + 1, r)) {
        if row.len() != ring.dim(k) {
            return Err(shape(format!("{} images in degree {k}, expected {}", row.len(), ring.dim(k))));
        }
        for (i, x) in row.iter().enumerate() {
            if x.ambient_n() != w.ambient_n {
                return Err(shape(format!("image of {} lives in R^{}", ring.label(k, i), x.ambient_n())));
            }
            if !x.is_zero() && !x.is_homogeneous_of(k) {
                return Err(shape(format!("image of {} is not of degree {k}", ring.label(k, i))));
            }
        }
    }
    Ok(())
}

/// `Φ(x)` for any class `x`, applied degreewise.
pub fn apply(ring: &GradedRing, w: &HomWitness, x: &RingElement) -> Result<ExtElement> {
    ring.check(x)?;
    let mut out = ExtElement::zero(w.ambient_n)?;
    for (k, v) in x.components().iter().enumerate() {
        for (i, c) in v.entries() {
            out = out.add_scaled(c, &w.image(k, *i)?)?;
        }
    }
    Ok(out)
}

/// `None` when `w` is a graded homomorphism with `Φ(ω) != 0`, otherwise the
/// first failing condition. Shape errors are errors.
pub fn check_hom(ring: &GradedRing, w: &HomWitness, omega: &RingElement) -> Result<Option<String>> {
    check_shape(ring, w)?;
    let top = max_degree(ring, w.ambient_n);
    for p in 1..=top {
        for q in 1..=(top - p) {
            for i in 0..ring.dim(p) {
                for j in 0..ring.dim(q) {
                    let lhs = w.image(p, i)?.wedge(&w.image(q, j)?)?;
                    let prod = RingElement::homogeneous(ring.top_degree(), p + q, ring.basis_product(p, i, q, j));
                    if apply(ring, w, &prod)? != lhs {
                        return Ok(Some(format!(
                            "Φ({} * {}) != Φ({}) ∧ Φ({})",
                            ring.label(p, i),
                            ring.label(q, j),
                            ring.label(p, i),
                            ring.label(q, j)
                        )));
                    }
                }
            }
        }
    }
    if apply(ring, w, omega)?.is_zero() {
        return Ok(Some("Φ(ω) = 0".into()));
    }
    Ok(None)
}

pub fn verify_hom(ring: &GradedRing, w: &HomWitness, omega: &RingElement) -> Result<bool> {
    Ok(check_hom(ring, w, omega)?.is_none())
}

fn presentation(ring: &GradedRing) -> Result<&MonomialPresentation> {
    ring.presentation().ok_or(Error::MissingPresentation)
}

/// Extends generator images multiplicatively along the monomial basis.
pub fn witness_from_generators(ring: &GradedRing, n: usize, gens: &[ExtElement]) -> Result<HomWitness> {
    let pres = presentation(ring)?;
    if gens.len() != pres.generators.len() {
        return Err(Error::ShapeMismatch(format!("{} generator images for {} generators", gens.len(), pres.generators.len())));
    }
    let images = (1..=max_degree(ring, n))
        .map(|k| {
            pres.basis[k]
                .iter()
                .map(|m| {
                    let mut x = ExtElement::scalar(n, m.coeff.clone())?;
                    for &g in &m.word {
                        x = x.wedge(&gens[g])?;
                    }
                    Ok(x)
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(HomWitness { ring_hash: ring.hash(), ambient_n: n, images })
}

/// One assignment for a factor's generators; `axes` are relative to the
/// factor's block of `width` consecutive axes.
#[derive(Clone, Debug)]
struct FactorOption {
    width: usize,
    images: Vec<Vec<(Vec<usize>, Q)>>,
}

impl FactorOption {
    fn zero(gens: usize) -> Self {
        FactorOption { width: 0, images: vec![Vec::new(); gens] }
    }

    fn instantiate(&self, n: usize, offset: usize) -> Result<Vec<ExtElement>> {
        self.images
            .iter()
            .map(|terms| {
                let mut x = ExtElement::zero(n)?;
                for (axes, c) in terms {
                    let shifted: Vec<usize> = axes.iter().map(|a| a + offset).collect();
                    x = x.add(&ExtElement::blade(n, &shifted, c.clone())?)?;
                }
                Ok(x)
            })
            .collect()
    }
}

type Terms = Vec<(Vec<usize>, Q)>;

fn block(axes: &[usize]) -> Terms {
    vec![(axes.to_vec(), Q::one())]
}

/// Pairs `(x_s, y_s)` for up to three `S²×S²` summands in `R^4` with
/// `x_s ∧ y_s = e1234` and every other product zero.
fn s2xs2_pairs() -> [(Terms, Terms); 3] {
    [
        (block(&[1, 2]), block(&[3, 4])),
        (block(&[1, 3]), vec![(vec![2, 4], q(-1))]),
        (block(&[1, 4]), block(&[2, 3])),
    ]
}

/// Template options for one product factor, nonzero options first (most
/// axes first), the zero assignment last.
fn factor_options(expr: &ManifoldExpr, gens: usize) -> Vec<FactorOption> {
    let mut out = Vec::new();
    match expr {
        ManifoldExpr::Torus(k) => {
            out.push(FactorOption { width: *k, images: (1..=*k).map(|a| block(&[a])).collect() });
        }
        ManifoldExpr::Surface(1) => {
            out.push(FactorOption { width: 2, images: vec![block(&[1]), block(&[2])] });
        }
        ManifoldExpr::CP(m) => {
            for p in (1..=*m).rev() {
                let s = (1..=p).map(|j| (vec![2 * j - 1, 2 * j], Q::one())).collect();
                out.push(FactorOption { width: 2 * p, images: vec![s] });
            }
        }
        ManifoldExpr::Sphere(k) => {
            out.push(FactorOption { width: *k, images: vec![block(&(1..=*k).collect::<Vec<_>>())] });
        }
        ManifoldExpr::S2xS2 => {
            let (x, y) = s2xs2_pairs()[0].clone();
            out.push(FactorOption { width: 4, images: vec![x, y] });
        }
        ManifoldExpr::ConnSum(..) => {
            let summands = expr.summands();
            if summands.len() <= 3 && summands.iter().all(|s| **s == ManifoldExpr::S2xS2) {
                let pairs = s2xs2_pairs();
                let images = pairs[..summands.len()].iter().flat_map(|(x, y)| [x.clone(), y.clone()]).collect();
                out.push(FactorOption { width: 4, images });
            }
        }
        _ => {}
    }
    out.retain(|o| o.images.len() == gens);
    out.push(FactorOption::zero(gens));
    out
}

/// Tries the template catalog on the product factors of `built`: tori and
/// the genus-one surface on distinct axes, `s ↦ Σ e_{2j-1,2j}` for complex
/// projective spaces, spheres onto a coordinate block, up to three `S²×S²`
/// summands via mutually annihilating 2-blade pairs, factors on consecutive disjoint
/// axis blocks. Returns the first verified witness.
pub fn witness_template(built: &BuiltManifold, omega: &RingElement, n: usize) -> Result<Option<HomWitness>> {
    let ring = &built.ring;
    if presentation(ring).is_err() {
        return Ok(None);
    }
    let counts: Vec<usize> = built
        .factors
        .iter()
        .map(|f| f.ring.presentation().map_or(0, |p| p.generators.len()))
        .collect();
    if counts.iter().sum::<usize>() != presentation(ring)?.generators.len() {
        return Ok(None);
    }
    let options: Vec<Vec<FactorOption>> =
        built.factors.iter().zip(&counts).map(|(f, &c)| factor_options(&f.expr, c)).collect();
    for choice in options.iter().map(|o| o.iter()).multi_cartesian_product() {
        if choice.iter().map(|o| o.width).sum::<usize>() > n {
            continue;
        }
        let mut gens = Vec::new();
        let mut offset = 0;
        for o in &choice {
            gens.extend(o.instantiate(n, offset)?);
            offset += o.width;
        }
        let w = witness_from_generators(ring, n, &gens)?;
        if verify_hom(ring, &w, omega)? {
            return Ok(Some(w));
        }
    }
    Ok(None)
}

/// Enumeration budget: the coefficient set for generator images and the
/// maximal number of visited assignments.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Budget {
    pub coeffs: Vec<Q>,
    pub node_cap: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { coeffs: vec![q(-1), q(0), q(1)], node_cap: 100_000 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnumOutcome {
    pub witness: Option<HomWitness>,
    pub nodes: u64,
    /// The node cap was reached before the search space was exhausted.
    pub exhausted_budget: bool,
}

/// Candidate images of a degree-`k` generator in canonical order: by support
/// size, then blade subset (lexicographic), then coefficients (by absolute
/// value, positive first).
fn candidates<'a>(n: usize, k: usize, coeffs: &'a [Q], allow_zero: bool) -> Box<dyn Iterator<Item = ExtElement> + Send + 'a> {
    if k == 0 || k > n {
        return Box::new(std::iter::once(ExtElement::zero(n).expect("valid ambient")));
    }
    let blades: Vec<Blade> = blades_of_degree(n, k);
    let sizes: Vec<usize> = if allow_zero { (0..=blades.len()).collect() } else { vec![blades.len()] };
    Box::new(sizes.into_iter().flat_map(move |s| {
        let blades = blades.clone();
        (0..blades.len()).combinations(s).flat_map(move |subset| {
            let blades = blades.clone();
            let tuples: Box<dyn Iterator<Item = Vec<&Q>> + Send> = if s == 0 {
                Box::new(std::iter::once(Vec::new()))
            } else {
                Box::new((0..s).map(|_| coeffs.iter()).multi_cartesian_product())
            };
            tuples.map(move |cs| {
                let terms = subset.iter().zip(cs).map(|(&b, c)| (blades[b], c.clone())).collect();
                ExtElement::from_terms(n, terms).expect("blades in range")
            })
        })
    }))
}

/// A multiplicativity constraint `Φ(b_p,i) ∧ Φ(b_q,j) = Φ(b_p,i * b_q,j)`.
struct Check {
    p: usize,
    i: usize,
    q: usize,
    j: usize,
}

struct Enumerator<'a> {
    ring: &'a GradedRing,
    pres: &'a MonomialPresentation,
    n: usize,
    top: usize,
    omega: &'a RingElement,
    coeffs: Vec<Q>,
    allow_zero: bool,
    /// Basis classes `(k, i)` whose word has largest generator `depth`.
    fill: Vec<Vec<(usize, usize)>>,
    checks: Vec<Vec<Check>>,
    /// Basis classes dividing `ω`: a zero image forces `Φ(ω) = 0`.
    divisors: Vec<Vec<(usize, usize)>>,
    omega_depth: usize,
}

/// Images of basis classes under the partial assignment, filled per depth.
struct State {
    gens: Vec<ExtElement>,
    images: Vec<Vec<Option<ExtElement>>>,
}

enum Sub {
    Found(Vec<ExtElement>, u64),
    Done(u64),
    Capped,
}

impl<'a> Enumerator<'a> {
    fn new(ring: &'a GradedRing, omega: &'a RingElement, n: usize, budget: &Budget) -> Result<Self> {
        let pres = presentation(ring)?;
        let top = max_degree(ring, n);
        let max_gen = |k: usize, i: usize| pres.basis[k][i].word.iter().copied().max().unwrap_or(0);
        let ngen = pres.generators.len();
        let mut fill: Vec<Vec<(usize, usize)>> = vec![Vec::new(); ngen];
        for k in 1..=top {
            for i in 0..ring.dim(k) {
                fill[max_gen(k, i)].push((k, i));
            }
        }
        let mut checks: Vec<Vec<Check>> = (0..ngen).map(|_| Vec::new()).collect();
        for p in 1..=top {
            for q in p..=(top - p) {
                for i in 0..ring.dim(p) {
                    for j in 0..ring.dim(q) {
                        if p == q && j < i {
                            continue;
                        }
                        let prod = ring.basis_product(p, i, q, j);
                        let depth = prod
                            .entries()
                            .iter()
                            .map(|(t, _)| max_gen(p + q, *t))
                            .chain([max_gen(p, i), max_gen(q, j)])
                            .max()
                            .unwrap_or(0);
                        checks[depth].push(Check { p, i, q, j });
                    }
                }
            }
        }
        let mut divisors: Vec<Vec<(usize, usize)>> = vec![Vec::new(); ngen];
        let mut omega_depth = 0;
        if let Some(d) = omega.homogeneous_degree().filter(|&d| d <= top) {
            omega_depth = omega.component(d).entries().iter().map(|(t, _)| max_gen(d, *t)).max().unwrap_or(0);
            for l in 1..d {
                for (c, _) in ring.factorizations(omega, l)? {
                    for (i, _) in c.component(l).entries() {
                        divisors[max_gen(l, *i)].push((l, *i));
                    }
                }
            }
        }
        let mut coeffs: Vec<Q> = budget.coeffs.iter().filter(|c| !c.is_zero()).cloned().collect();
        coeffs.sort_by(|a, b| a.abs().cmp(&b.abs()).then(b.cmp(a)));
        coeffs.dedup();
        let allow_zero = budget.coeffs.iter().any(Zero::is_zero);
        Ok(Enumerator { ring, pres, n, top, omega, coeffs, allow_zero, fill, checks, divisors, omega_depth })
    }

    fn state(&self) -> State {
        let images = (0..=self.top).map(|k| vec![None; self.ring.dim(k)]).collect();
        State { gens: Vec::new(), images }
    }

    fn cached<'s>(&self, st: &'s State, k: usize, i: usize) -> &'s ExtElement {
        st.images[k][i].as_ref().expect("filled at an earlier depth")
    }

    /// Assigns the next generator and fills the basis images it completes.
    fn push(&self, st: &mut State, x: ExtElement) {
        st.gens.push(x);
        let depth = st.gens.len() - 1;
        for &(k, i) in &self.fill[depth] {
            let m = &self.pres.basis[k][i];
            let mut y = ExtElement::scalar(self.n, m.coeff.clone()).expect("valid ambient");
            for &g in &m.word {
                y = y.wedge(&st.gens[g]).expect("same ambient");
                if y.is_zero() {
                    break;
                }
            }
            st.images[k][i] = Some(y);
        }
    }

    fn pop(&self, st: &mut State) {
        let depth = st.gens.len() - 1;
        for &(k, i) in &self.fill[depth] {
            st.images[k][i] = None;
        }
        st.gens.pop();
    }

    fn combination(&self, st: &State, k: usize, v: &crate::linalg::SparseVec) -> ExtElement {
        let mut x = ExtElement::zero(self.n).expect("valid ambient");
        for (t, coef) in v.entries() {
            x = x.add_scaled(coef, self.cached(st, k, *t)).expect("same ambient");
        }
        x
    }

    fn passes(&self, st: &State) -> bool {
        let depth = st.gens.len() - 1;
        if self.divisors[depth].iter().any(|&(k, i)| self.cached(st, k, i).is_zero()) {
            return false;
        }
        for c in &self.checks[depth] {
            let (a, b) = (self.cached(st, c.p, c.i), self.cached(st, c.q, c.j));
            let prod = self.ring.basis_product(c.p, c.i, c.q, c.j);
            let lhs = if a.is_zero() || b.is_zero() {
                ExtElement::zero(self.n).expect("valid ambient")
            } else {
                a.wedge(b).expect("same ambient")
            };
            if lhs != self.combination(st, c.p + c.q, &prod) {
                return false;
            }
        }
        if depth == self.omega_depth {
            if let Some(d) = self.omega.homogeneous_degree().filter(|&d| d <= self.top) {
                if self.combination(st, d, self.omega.component(d)).is_zero() {
                    return false;
                }
            } else {
                return false;
            }
        }
        true
    }

    fn candidates(&self, g: usize) -> Box<dyn Iterator<Item = ExtElement> + Send + '_> {
        candidates(self.n, self.pres.generators[g].degree, &self.coeffs, self.allow_zero)
    }

    /// Depth-first search below the current partial assignment, visiting at
    /// most `cap` nodes.
    fn dfs(&self, st: &mut State, nodes: &mut u64, cap: u64) -> Option<bool> {
        let depth = st.gens.len();
        if depth == self.pres.generators.len() {
            return Some(true);
        }
        for x in self.candidates(depth) {
            *nodes += 1;
            if *nodes > cap {
                return None;
            }
            self.push(st, x);
            if self.passes(st) {
                match self.dfs(st, nodes, cap) {
                    Some(true) => return Some(true),
                    None => return None,
                    Some(false) => {}
                }
            }
            self.pop(st);
        }
        Some(false)
    }

    fn subtree(&self, first: ExtElement, cap: u64) -> Sub {
        let mut st = self.state();
        self.push(&mut st, first);
        if !self.passes(&st) {
            return Sub::Done(0);
        }
        let mut nodes = 0;
        match self.dfs(&mut st, &mut nodes, cap) {
            Some(true) => Sub::Found(st.gens, nodes),
            Some(false) => Sub::Done(nodes),
            None => Sub::Capped,
        }
    }
}

/// Bounded canonical-order enumeration of generator images. Subtrees below
/// the first generator's candidates are searched in parallel; the result
/// equals that of the sequential search with the same node cap.
pub fn enumerate_hom(ring: &GradedRing, omega: &RingElement, n: usize, budget: &Budget) -> Result<EnumOutcome> {
    ring.check(omega)?;
    let e = Enumerator::new(ring, omega, n, budget)?;
    let cap = budget.node_cap;
    let chunk = (rayon::current_num_threads() * 4).max(1);
    let mut total: u64 = 0;
    let mut firsts = e.candidates(0).peekable();
    let capped = |nodes| Ok(EnumOutcome { witness: None, nodes, exhausted_budget: true });
    while firsts.peek().is_some() {
        let batch: Vec<ExtElement> = firsts.by_ref().take(chunk).collect();
        let remaining = cap.saturating_sub(total);
        let results: Vec<Sub> = batch.into_par_iter().map(|x| e.subtree(x, remaining)).collect();
        for r in results {
            total += 1;
            if total > cap {
                return capped(cap);
            }
            match r {
                Sub::Found(gens, used) if total + used <= cap => {
                    let w = witness_from_generators(ring, n, &gens)?;
                    if !verify_hom(ring, &w, omega)? {
                        return Err(Error::NotHomomorphism("enumerated assignment failed verification".into()));
                    }
                    return Ok(EnumOutcome { witness: Some(w), nodes: total + used, exhausted_budget: false });
                }
                Sub::Done(used) if total + used <= cap => total += used,
                _ => return capped(cap),
            }
        }
    }
    Ok(EnumOutcome { witness: None, nodes: total, exhausted_budget: false })
}
