//! Sparse exact arithmetic in the exterior algebra of an `n`-dimensional
//! rational vector space.
//!
//! A [`Blade`] is a set of axes stored as a bitmask (axis `i` is bit `i-1`),
//! so the ambient dimension is limited to 64. Terms of an [`ExtElement`] are
//! kept in the canonical order: by degree, then lexicographically on the
//! ascending axis list.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{rank_of, SparseVec};
use crate::rational::{format_q, parse_q, Q};

pub const MAX_AMBIENT: usize = 64;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Blade(u64);

impl Blade {
    pub const SCALAR: Blade = Blade(0);

    /// Blade from 1-based axes, which must be strictly increasing and lie in
    /// `1..=ambient_n`.
    pub fn new(axes: &[usize], ambient_n: usize) -> Result<Blade> {
        check_ambient(ambient_n)?;
        let bad = || Error::InvalidBlade { axes: axes.to_vec(), ambient_n };
        let mut mask = 0u64;
        let mut prev = 0usize;
        for &a in axes {
            if a <= prev || a > ambient_n {
                return Err(bad());
            }
            mask |= 1 << (a - 1);
            prev = a;
        }
        Ok(Blade(mask))
    }

    pub fn from_mask(mask: u64) -> Blade {
        Blade(mask)
    }

    pub fn mask(self) -> u64 {
        self.0
    }

    pub fn degree(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn axes(self) -> Vec<usize> {
        (0..64).filter(|b| self.0 >> b & 1 == 1).map(|b| b + 1).collect()
    }

    /// Highest axis used (0 for the scalar blade).
    pub fn top_axis(self) -> usize {
        64 - self.0.leading_zeros() as usize
    }

    /// Product of two blades: `None` when they share an axis, otherwise the
    /// merged blade and whether the merge permutation is odd.
    pub fn wedge(self, other: Blade) -> Option<(Blade, bool)> {
        if self.0 & other.0 != 0 {
            return None;
        }
        // Inversions: pairs (x in self, y in other) with x > y.
        let mut inversions = 0u32;
        let mut rest = other.0;
        while rest != 0 {
            let y = rest.trailing_zeros();
            rest &= rest - 1;
            inversions += (self.0.checked_shr(y + 1).unwrap_or(0)).count_ones();
        }
        Some((Blade(self.0 | other.0), inversions % 2 == 1))
    }
}

impl Ord for Blade {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| {
            let diff = self.0 ^ other.0;
            if diff == 0 {
                Ordering::Equal
            } else if self.0 >> diff.trailing_zeros() & 1 == 1 {
                Ordering::Less
            } else {
                Ordering::Greater
            }
        })
    }
}

impl PartialOrd for Blade {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Blade {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let axes = self.axes();
        if axes.is_empty() {
            return write!(f, "1");
        }
        if axes.iter().all(|&a| a < 10) {
            write!(f, "e")?;
            for a in axes {
                write!(f, "{a}")?;
            }
            Ok(())
        } else {
            let s: Vec<String> = axes.iter().map(|a| a.to_string()).collect();
            write!(f, "e({})", s.join(","))
        }
    }
}

fn check_ambient(n: usize) -> Result<()> {
    if n == 0 || n > MAX_AMBIENT {
        Err(Error::AmbientOutOfRange(n))
    } else {
        Ok(())
    }
}

/// Binomial coefficient `C(n, k)`: the dimension of the degree-`k` part.
pub fn dim_component(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// All degree-`k` blades in canonical order.
pub fn blades_of_degree(n: usize, k: usize) -> Vec<Blade> {
    fn rec(start: usize, n: usize, left: usize, mask: u64, out: &mut Vec<Blade>) {
        if left == 0 {
            out.push(Blade(mask));
            return;
        }
        for a in start..=n {
            if n - a + 1 < left {
                break;
            }
            rec(a + 1, n, left - 1, mask | 1 << (a - 1), out);
        }
    }
    let mut out = Vec::new();
    if k <= n {
        rec(1, n, k, 0, &mut out);
    }
    out
}

/// Element of the exterior algebra. The zero element has no terms.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct ExtElement {
    ambient_n: usize,
    terms: BTreeMap<Blade, Q>,
}

impl ExtElement {
    pub fn zero(ambient_n: usize) -> Result<Self> {
        check_ambient(ambient_n)?;
        Ok(ExtElement { ambient_n, terms: BTreeMap::new() })
    }

    pub fn scalar(ambient_n: usize, c: Q) -> Result<Self> {
        Self::from_terms(ambient_n, vec![(Blade::SCALAR, c)])
    }

    pub fn one(ambient_n: usize) -> Result<Self> {
        Self::scalar(ambient_n, Q::one())
    }

    /// The basis vector `e_axis` (1-based).
    pub fn basis(ambient_n: usize, axis: usize) -> Result<Self> {
        Self::blade(ambient_n, &[axis], Q::one())
    }

    pub fn blade(ambient_n: usize, axes: &[usize], c: Q) -> Result<Self> {
        let b = Blade::new(axes, ambient_n)?;
        Self::from_terms(ambient_n, vec![(b, c)])
    }

    pub fn from_terms(ambient_n: usize, terms: Vec<(Blade, Q)>) -> Result<Self> {
        check_ambient(ambient_n)?;
        let mut out = ExtElement { ambient_n, terms: BTreeMap::new() };
        for (b, c) in terms {
            if b.top_axis() > ambient_n {
                return Err(Error::InvalidBlade { axes: b.axes(), ambient_n });
            }
            out.add_term(b, c);
        }
        Ok(out)
    }

    fn add_term(&mut self, b: Blade, c: Q) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(b).or_insert_with(Q::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&b);
        }
    }

    pub fn ambient_n(&self) -> usize {
        self.ambient_n
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Blade, &Q)> {
        self.terms.iter()
    }

    pub fn coeff(&self, b: Blade) -> Q {
        self.terms.get(&b).cloned().unwrap_or_else(Q::zero)
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// `Some(k)` if every term has degree `k`; the zero element reports `None`.
    pub fn homogeneous_degree(&self) -> Option<usize> {
        let mut degrees = self.terms.keys().map(|b| b.degree());
        let first = degrees.next()?;
        degrees.all(|d| d == first).then_some(first)
    }

    pub fn is_homogeneous_of(&self, k: usize) -> bool {
        self.is_zero() || self.homogeneous_degree() == Some(k)
    }

    pub fn component(&self, k: usize) -> ExtElement {
        ExtElement {
            ambient_n: self.ambient_n,
            terms: self
                .terms
                .iter()
                .filter(|(b, _)| b.degree() == k)
                .map(|(b, c)| (*b, c.clone()))
                .collect(),
        }
    }

    fn check_same(&self, other: &ExtElement) -> Result<()> {
        if self.ambient_n != other.ambient_n {
            return Err(Error::DimensionMismatch { left: self.ambient_n, right: other.ambient_n });
        }
        Ok(())
    }

    pub fn add(&self, other: &ExtElement) -> Result<ExtElement> {
        self.add_scaled(&Q::one(), other)
    }

    pub fn sub(&self, other: &ExtElement) -> Result<ExtElement> {
        self.add_scaled(&-Q::one(), other)
    }

    /// `self + s * other`
    pub fn add_scaled(&self, s: &Q, other: &ExtElement) -> Result<ExtElement> {
        self.check_same(other)?;
        let mut out = self.clone();
        for (b, c) in &other.terms {
            out.add_term(*b, c * s);
        }
        Ok(out)
    }

    pub fn scale(&self, s: &Q) -> ExtElement {
        if s.is_zero() {
            return ExtElement { ambient_n: self.ambient_n, terms: BTreeMap::new() };
        }
        ExtElement {
            ambient_n: self.ambient_n,
            terms: self.terms.iter().map(|(b, c)| (*b, c * s)).collect(),
        }
    }

    /// Exterior product.
    pub fn wedge(&self, other: &ExtElement) -> Result<ExtElement> {
        self.check_same(other)?;
        let mut out = ExtElement { ambient_n: self.ambient_n, terms: BTreeMap::new() };
        for (ba, ca) in &self.terms {
            for (bb, cb) in &other.terms {
                if let Some((blade, odd)) = ba.wedge(*bb) {
                    let c = ca * cb;
                    out.add_term(blade, if odd { -c } else { c });
                }
            }
        }
        Ok(out)
    }
}

impl fmt::Display for ExtElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (b, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            match (i, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            if *b == Blade::SCALAR {
                write!(f, "{a}")?;
            } else if a.is_one() {
                write!(f, "{b}")?;
            } else {
                write!(f, "{a}*{b}")?;
            }
        }
        Ok(())
    }
}

/// Exact linear independence of homogeneous degree-`k` elements, by rank of
/// their coordinate vectors over the blades they use.
pub fn linearly_independent(elems: &[ExtElement], k: usize) -> Result<bool> {
    let Some(first) = elems.first() else {
        return Ok(true);
    };
    let mut index: BTreeMap<Blade, usize> = BTreeMap::new();
    for e in elems {
        first.check_same(e)?;
        if !e.is_homogeneous_of(k) {
            return Err(Error::NonHomogeneous { expected: k });
        }
        for b in e.terms.keys() {
            let next = index.len();
            index.entry(*b).or_insert(next);
        }
    }
    if elems.iter().any(|e| e.is_zero()) {
        return Ok(false);
    }
    let vectors: Vec<SparseVec> = elems
        .iter()
        .map(|e| SparseVec::from_entries(e.terms.iter().map(|(b, c)| (index[b], c.clone())).collect()))
        .collect();
    Ok(rank_of(index.len(), &vectors) == elems.len())
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    axes: Vec<usize>,
    coeff: String,
}

#[derive(Serialize, Deserialize)]
struct ExtJson {
    ambient_n: usize,
    terms: Vec<TermJson>,
}

impl Serialize for ExtElement {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ExtJson {
            ambient_n: self.ambient_n,
            terms: self
                .terms
                .iter()
                .map(|(b, c)| TermJson { axes: b.axes(), coeff: format_q(c) })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ExtElement {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = ExtJson::deserialize(d)?;
        check_ambient(raw.ambient_n).map_err(D::Error::custom)?;
        let mut terms = BTreeMap::new();
        for t in raw.terms {
            let b = Blade::new(&t.axes, raw.ambient_n).map_err(D::Error::custom)?;
            let c = parse_q(&t.coeff).map_err(D::Error::custom)?;
            if c.is_zero() {
                return Err(D::Error::custom("zero coefficient stored"));
            }
            if terms.insert(b, c).is_some() {
                return Err(D::Error::custom(format!("duplicate blade {b}")));
            }
        }
        Ok(ExtElement { ambient_n: raw.ambient_n, terms })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    fn e(n: usize, axes: &[usize]) -> ExtElement {
        ExtElement::blade(n, axes, q(1)).unwrap()
    }

    #[test]
    fn antisymmetry_of_vectors() {
        let (e1, e2) = (e(4, &[1]), e(4, &[2]));
        assert_eq!(e1.wedge(&e2).unwrap(), e(4, &[1, 2]));
        assert_eq!(e2.wedge(&e1).unwrap(), e(4, &[1, 2]).scale(&q(-1)));
        assert!(e1.wedge(&e1).unwrap().is_zero());
    }

    #[test]
    fn disjoint_ascending_blades() {
        let p = e(4, &[1, 2]).wedge(&e(4, &[3, 4])).unwrap();
        assert_eq!(p, e(4, &[1, 2, 3, 4]));
        assert_eq!(p.coeff(Blade::new(&[1, 2, 3, 4], 4).unwrap()), q(1));
    }

    #[test]
    fn dimensions() {
        assert_eq!(dim_component(6, 2), 15);
        assert_eq!(dim_component(4, 1), 4);
        assert_eq!(dim_component(7, 0), 1);
        assert_eq!(dim_component(3, 5), 0);
        assert_eq!(dim_component(64, 32), 1_832_624_140_942_590_534);
    }

    #[test]
    fn mismatch_and_invalid_blades() {
        assert!(matches!(
            e(3, &[1]).wedge(&e(4, &[1])),
            Err(Error::DimensionMismatch { left: 3, right: 4 })
        ));
        assert!(Blade::new(&[2, 1], 4).is_err());
        assert!(Blade::new(&[1, 5], 4).is_err());
        assert!(Blade::new(&[1, 1], 4).is_err());
        assert!(ExtElement::zero(0).is_err());
        assert!(ExtElement::zero(65).is_err());
    }

    #[test]
    fn canonical_order() {
        let mut bs: Vec<Blade> = blades_of_degree(4, 2);
        let listed: Vec<Vec<usize>> = bs.iter().map(|b| b.axes()).collect();
        assert_eq!(
            listed,
            vec![vec![1, 2], vec![1, 3], vec![1, 4], vec![2, 3], vec![2, 4], vec![3, 4]]
        );
        bs.reverse();
        bs.sort();
        assert_eq!(bs, blades_of_degree(4, 2));
        assert!(Blade::new(&[4], 4).unwrap() < Blade::new(&[1, 2], 4).unwrap());
    }

    #[test]
    fn independence() {
        let n = 4;
        let v = vec![e(n, &[1]), e(n, &[2]), e(n, &[1]).add(&e(n, &[2])).unwrap()];
        assert!(!linearly_independent(&v, 1).unwrap());
        let basis: Vec<_> = (1..=4).map(|i| e(n, &[i])).collect();
        assert!(linearly_independent(&basis, 1).unwrap());
        let mixed = e(n, &[1]).add(&e(n, &[1, 2])).unwrap();
        assert!(matches!(
            linearly_independent(&[mixed], 1),
            Err(Error::NonHomogeneous { expected: 1 })
        ));
    }

    #[test]
    fn display() {
        let x = e(4, &[1, 2]).add_scaled(&q(-2), &e(4, &[3, 4])).unwrap();
        assert_eq!(x.to_string(), "e12 - 2*e34");
        assert_eq!(ExtElement::zero(3).unwrap().to_string(), "0");
    }

    #[test]
    fn json_form() {
        let x = e(4, &[1, 2]).add_scaled(&q(-2), &e(4, &[3])).unwrap();
        let s = serde_json::to_string(&x).unwrap();
        assert_eq!(
            s,
            r#"{"ambient_n":4,"terms":[{"axes":[3],"coeff":"-2/1"},{"axes":[1,2],"coeff":"1/1"}]}"#
        );
        let back: ExtElement = serde_json::from_str(&s).unwrap();
        assert_eq!(back, x);
        assert!(serde_json::from_str::<ExtElement>(
            r#"{"ambient_n":4,"terms":[{"axes":[3],"coeff":"0/1"}]}"#
        )
        .is_err());
        assert!(serde_json::from_str::<ExtElement>(
            r#"{"ambient_n":2,"terms":[{"axes":[3],"coeff":"1/1"}]}"#
        )
        .is_err());
    }
}
