//! Built-in ring constructors: spheres, tori, surfaces, complex projective
//! spaces, `S² × S²`, Künneth products and connected sums.

use num::{One, Zero};

use super::{sign_of, Generator, GradedRing, Monomial, MonomialPresentation};
use crate::error::{Error, Result};
use crate::exterior::{blades_of_degree, Blade};
use crate::linalg::SparseVec;
use crate::rational::Q;

fn mono(word: Vec<usize>) -> Monomial {
    Monomial { coeff: Q::one(), word }
}

pub fn sphere(n: usize) -> Result<GradedRing> {
    if n == 0 {
        return Err(Error::InvalidConstructor("sphere(0)".into()));
    }
    let mut dims = vec![0; n + 1];
    dims[0] = 1;
    dims[n] = 1;
    let mut labels = vec![Vec::new(); n + 1];
    labels[0].push("1".to_string());
    labels[n].push("vol".to_string());
    let mut basis = vec![Vec::new(); n + 1];
    basis[0].push(mono(vec![]));
    basis[n].push(mono(vec![0]));
    let pres = MonomialPresentation {
        generators: vec![Generator { name: "vol".into(), degree: n, index: 0 }],
        basis,
    };
    GradedRing::from_parts(dims, labels, |_, _, _, _| SparseVec::zero(), Some(pres))
}

/// Cohomology of the `n`-torus: the exterior algebra on `t1..tn`.
pub fn torus(n: usize) -> Result<GradedRing> {
    if n == 0 {
        return Err(Error::InvalidConstructor("torus(0)".into()));
    }
    let blades: Vec<Vec<Blade>> = (0..=n).map(|k| blades_of_degree(n, k)).collect();
    let dims: Vec<usize> = blades.iter().map(Vec::len).collect();
    let labels: Vec<Vec<String>> = blades
        .iter()
        .map(|bs| {
            bs.iter()
                .map(|b| {
                    if *b == Blade::SCALAR {
                        "1".to_string()
                    } else {
                        b.axes().iter().map(|a| format!("t{a}")).collect::<String>()
                    }
                })
                .collect()
        })
        .collect();
    let index_of = |b: Blade| blades[b.degree()].binary_search(&b).expect("blade enumerated");
    let generators = (1..=n).map(|a| Generator { name: format!("t{a}"), degree: 1, index: a - 1 }).collect();
    let basis = blades
        .iter()
        .map(|bs| bs.iter().map(|b| mono(b.axes().iter().map(|a| a - 1).collect())).collect())
        .collect();
    let pres = MonomialPresentation { generators, basis };
    GradedRing::from_parts(
        dims,
        labels,
        |p, i, q, j| match blades[p][i].wedge(blades[q][j]) {
            None => SparseVec::zero(),
            Some((b, odd)) => {
                let c = if odd { -Q::one() } else { Q::one() };
                SparseVec::from_entries(vec![(index_of(b), c)])
            }
        },
        Some(pres),
    )
}

/// Cohomology of complex projective `m`-space: `Q[s]/(s^{m+1})`, `|s| = 2`.
pub fn cp(m: usize) -> Result<GradedRing> {
    if m == 0 {
        return Err(Error::InvalidConstructor("cp(0)".into()));
    }
    let d = 2 * m;
    let dims: Vec<usize> = (0..=d).map(|k| usize::from(k % 2 == 0)).collect();
    let labels: Vec<Vec<String>> = (0..=d)
        .map(|k| match (k % 2, k / 2) {
            (1, _) => vec![],
            (_, 0) => vec!["1".to_string()],
            (_, 1) => vec!["s".to_string()],
            (_, e) => vec![format!("s^{e}")],
        })
        .collect();
    let basis = (0..=d).map(|k| if k % 2 == 0 { vec![mono(vec![0; k / 2])] } else { vec![] }).collect();
    let pres = MonomialPresentation {
        generators: vec![Generator { name: "s".into(), degree: 2, index: 0 }],
        basis,
    };
    // Degrees only add up to at most 2m here, so s^a * s^b never truncates.
    GradedRing::from_parts(dims, labels, |_, _, _, _| SparseVec::unit(0), Some(pres))
}

/// Künneth basis of the product in degree `k`: pairs `(l, i, j)` with
/// `i` in `left_l`, `j` in `right_{k-l}`, ordered by descending left degree.
struct KunnethLayout {
    left: Vec<usize>,
    right: Vec<usize>,
    offsets: Vec<Vec<Option<usize>>>,
    dims: Vec<usize>,
}

impl KunnethLayout {
    fn new(left: &[usize], right: &[usize]) -> Self {
        let (dl, dr) = (left.len() - 1, right.len() - 1);
        let d = dl + dr;
        let mut offsets = vec![vec![None; d + 1]; d + 1];
        let mut dims = vec![0; d + 1];
        for k in 0..=d {
            for l in Self::left_degrees(k, dl, dr) {
                offsets[k][l] = Some(dims[k]);
                dims[k] += left[l] * right[k - l];
            }
        }
        KunnethLayout { left: left.to_vec(), right: right.to_vec(), offsets, dims }
    }

    fn left_degrees(k: usize, dl: usize, dr: usize) -> impl Iterator<Item = usize> {
        (k.saturating_sub(dr)..=k.min(dl)).rev()
    }

    fn index(&self, l: usize, i: usize, r: usize, j: usize) -> usize {
        self.offsets[l + r][l].expect("valid Künneth block") + i * self.right[r] + j
    }

    /// Inverse of `index`.
    fn locate(&self, k: usize, idx: usize) -> (usize, usize, usize, usize) {
        let (dl, dr) = (self.left.len() - 1, self.right.len() - 1);
        for l in Self::left_degrees(k, dl, dr) {
            let off = self.offsets[k][l].expect("block exists");
            let r = k - l;
            let size = self.left[l] * self.right[r];
            if idx < off + size {
                let local = idx - off;
                return (l, local / self.right[r], r, local % self.right[r]);
            }
        }
        unreachable!("index {idx} out of range in degree {k}")
    }
}

/// Index maps of the two factors into a product: `left_embed[k][i]` is the
/// product index of `basis_k[i] ⊗ 1`, `right_embed[k][j]` of `1 ⊗ basis_k[j]`.
pub(crate) struct ProductEmbeddings {
    pub left: Vec<Vec<usize>>,
    pub right: Vec<Vec<usize>>,
}

pub fn product(left: &GradedRing, right: &GradedRing) -> Result<GradedRing> {
    Ok(product_with_embeddings(left, right)?.0)
}

pub(crate) fn product_with_embeddings(left: &GradedRing, right: &GradedRing) -> Result<(GradedRing, ProductEmbeddings)> {
    let (ld, rd) = (left.dims(), right.dims());
    let layout = KunnethLayout::new(ld, rd);
    let d = ld.len() + rd.len() - 2;
    let mut labels = vec![Vec::new(); d + 1];
    for k in 0..=d {
        for idx in 0..layout.dims[k] {
            let (l, i, r, j) = layout.locate(k, idx);
            labels[k].push(if k == 0 {
                "1".to_string()
            } else {
                format!("{}⊗{}", left.label(l, i), right.label(r, j))
            });
        }
    }
    let locate: Vec<Vec<(usize, usize, usize, usize)>> =
        (0..=d).map(|k| (0..layout.dims[k]).map(|idx| layout.locate(k, idx)).collect()).collect();

    let presentation = match (left.presentation(), right.presentation()) {
        (Some(lp), Some(rp)) => {
            let nl = lp.generators.len();
            let mut generators: Vec<Generator> = lp
                .generators
                .iter()
                .map(|g| Generator {
                    name: format!("{}⊗1", g.name),
                    degree: g.degree,
                    index: layout.index(g.degree, g.index, 0, 0),
                })
                .collect();
            generators.extend(rp.generators.iter().map(|g| Generator {
                name: format!("1⊗{}", g.name),
                degree: g.degree,
                index: layout.index(0, 0, g.degree, g.index),
            }));
            let basis = locate
                .iter()
                .map(|row| {
                    row.iter()
                        .map(|&(l, i, r, j)| {
                            let (a, b) = (&lp.basis[l][i], &rp.basis[r][j]);
                            let mut word = a.word.clone();
                            word.extend(b.word.iter().map(|g| g + nl));
                            Monomial { coeff: &a.coeff * &b.coeff, word }
                        })
                        .collect()
                })
                .collect();
            Some(MonomialPresentation { generators, basis })
        }
        _ => None,
    };

    let ring = GradedRing::from_parts(
        layout.dims.clone(),
        labels,
        |p, x, q, y| {
            let (l1, i1, r1, j1) = locate[p][x];
            let (l2, i2, r2, j2) = locate[q][y];
            let (Some(a), Some(b)) = (left.basis_product_ref(l1, i1, l2, i2), right.basis_product_ref(r1, j1, r2, j2))
            else {
                return SparseVec::zero();
            };
            if a.is_zero() || b.is_zero() {
                return SparseVec::zero();
            }
            let sign = sign_of(r1, l2);
            let mut entries = Vec::with_capacity(a.nnz() * b.nnz());
            for (u, cu) in a.entries() {
                for (v, cv) in b.entries() {
                    entries.push((layout.index(l1 + l2, *u, r1 + r2, *v), cu * cv * &sign));
                }
            }
            SparseVec::from_entries(entries)
        },
        presentation,
    )?;
    let embeddings = ProductEmbeddings {
        left: (0..ld.len()).map(|k| (0..ld[k]).map(|i| layout.index(k, i, 0, 0)).collect()).collect(),
        right: (0..rd.len()).map(|k| (0..rd[k]).map(|j| layout.index(0, 0, k, j)).collect()).collect(),
    };
    Ok((ring, embeddings))
}

/// `S² × S²` with degree-2 classes `x`, `y` and `x * y = vol`.
pub fn s2xs2() -> Result<GradedRing> {
    let s = sphere(2)?;
    let mut ring = product(&s, &s)?;
    ring.set_labels(vec![vec!["1".into()], vec![], vec!["x".into(), "y".into()], vec![], vec!["vol".into()]]);
    if let Some(mut p) = ring.presentation().cloned() {
        p.generators[0].name = "x".into();
        p.generators[1].name = "y".into();
        ring.set_presentation(Some(p));
    }
    Ok(ring)
}

/// Connected sum of equidimensional summands: degree 0 and the top degree
/// are shared, middle degrees are direct sums, products inside a summand are
/// inherited and products across summands vanish in positive degrees.
///
/// This product rule is the standard one for the built-in summands
/// (orientable surfaces, simply connected 4-manifolds); for arbitrary rings
/// it is taken as a constructor axiom and guarded only by the nondegeneracy
/// check in [`GradedRing::validate`].
pub fn connsum(summands: &[GradedRing]) -> Result<GradedRing> {
    let first = summands.first().ok_or_else(|| Error::InvalidConstructor("empty connected sum".into()))?;
    let d = first.top_degree();
    for s in summands {
        if s.top_degree() != d {
            return Err(Error::ConnSumDegreeMismatch { left: d, right: s.top_degree() });
        }
        if s.dim(d) != 1 {
            return Err(Error::InvalidConstructor("connected-sum summand without a unique top class".into()));
        }
    }
    if summands.len() == 1 {
        return Ok(first.clone());
    }
    let mut dims = vec![0; d + 1];
    dims[0] = 1;
    dims[d] = 1;
    // offsets[s][k]: start of summand s's block in middle degree k.
    let mut offsets = vec![vec![0; d + 1]; summands.len()];
    for k in 1..d {
        for (s, r) in summands.iter().enumerate() {
            offsets[s][k] = dims[k];
            dims[k] += r.dim(k);
        }
    }
    let mut owner: Vec<Vec<(usize, usize)>> = vec![Vec::new(); d + 1];
    for (k, row) in owner.iter_mut().enumerate().take(d).skip(1) {
        for (s, r) in summands.iter().enumerate() {
            row.extend((0..r.dim(k)).map(|i| (s, i)));
        }
    }
    let mut labels = vec![Vec::new(); d + 1];
    labels[0].push("1".to_string());
    labels[d].push("vol".to_string());
    for k in 1..d {
        for &(s, i) in &owner[k] {
            labels[k].push(format!("{}_{}", summands[s].label(k, i), s + 1));
        }
    }

    let presentation = if summands.iter().all(|s| s.presentation().is_some()) {
        let mut generators = Vec::new();
        let mut remap: Vec<Vec<Option<usize>>> = Vec::new();
        for (s, r) in summands.iter().enumerate() {
            let p = r.presentation().unwrap();
            let mut m = Vec::new();
            for g in &p.generators {
                let keep = g.degree < d || s == 0;
                m.push(keep.then_some(generators.len()));
                if keep {
                    let index = if g.degree < d { offsets[s][g.degree] + g.index } else { 0 };
                    generators.push(Generator { name: format!("{}_{}", g.name, s + 1), degree: g.degree, index });
                }
            }
            remap.push(m);
        }
        let word_of = |s: usize, m: &Monomial| Monomial {
            coeff: m.coeff.clone(),
            word: m.word.iter().map(|g| remap[s][*g].expect("generator kept")).collect(),
        };
        let mut basis = vec![Vec::new(); d + 1];
        basis[0].push(mono(vec![]));
        for k in 1..d {
            for &(s, i) in &owner[k] {
                basis[k].push(word_of(s, &summands[s].presentation().unwrap().basis[k][i]));
            }
        }
        basis[d].push(word_of(0, &first.presentation().unwrap().basis[d][0]));
        Some(MonomialPresentation { generators, basis })
    } else {
        None
    };

    GradedRing::from_parts(
        dims,
        labels,
        |p, x, q, y| {
            let (s, i) = owner[p][x];
            let (t, j) = owner[q][y];
            if s != t {
                return SparseVec::zero();
            }
            let v = summands[s].basis_product(p, i, q, j);
            if p + q == d {
                let c = v.get(0);
                if c.is_zero() {
                    SparseVec::zero()
                } else {
                    SparseVec::from_entries(vec![(0, c)])
                }
            } else {
                SparseVec::from_entries(v.entries().iter().map(|(u, c)| (offsets[s][p + q] + u, c.clone())).collect())
            }
        },
        presentation,
    )
}

/// Closed orientable surface of genus `g >= 1`, with the symplectic basis
/// `c1..c2g`: `c_{2i-1} * c_{2i} = vol`, all other products of distinct
/// pairs zero.
pub fn surface(g: usize) -> Result<GradedRing> {
    if g == 0 {
        return Err(Error::InvalidConstructor("surface(0): genus must be at least 1".into()));
    }
    let t = torus(2)?;
    let copies = vec![t; g];
    let mut ring = connsum(&copies)?;
    let c: Vec<String> = (1..=2 * g).map(|i| format!("c{i}")).collect();
    ring.set_labels(vec![vec!["1".into()], c.clone(), vec!["vol".into()]]);
    if let Some(mut p) = ring.presentation().cloned() {
        for gen in p.generators.iter_mut() {
            gen.name = c[gen.index].clone();
        }
        ring.set_presentation(Some(p));
    }
    Ok(ring)
}
