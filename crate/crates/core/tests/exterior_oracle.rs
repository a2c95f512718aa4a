mod oracle;

use num::{BigRational, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qrob_core::exterior::{dim_component, linearly_independent, Blade, ExtElement};
use qrob_core::rational::q;

fn to_dense(x: &ExtElement) -> oracle::Dense {
    x.terms().map(|(b, c)| (b.axes(), c.clone())).collect()
}

fn from_dense(n: usize, d: &oracle::Dense) -> ExtElement {
    let terms = d.iter().map(|(a, c)| (Blade::new(a, n).unwrap(), c.clone())).collect();
    ExtElement::from_terms(n, terms).unwrap()
}

fn random_element(rng: &mut ChaCha8Rng, n: usize, k: usize) -> ExtElement {
    let mut d = oracle::Dense::new();
    for s in oracle::subsets(n, k) {
        if rng.gen_bool(0.6) {
            let c = BigRational::new(rng.gen_range(-3i64..=3).into(), rng.gen_range(1i64..=3).into());
            if !c.is_zero() {
                d.insert(s, c);
            }
        }
    }
    from_dense(n, &d)
}

#[test]
fn blade_products_match_permutation_signs() {
    for n in 1..=5 {
        let all: Vec<Vec<usize>> = (0..=n).flat_map(|k| oracle::subsets(n, k)).collect();
        for a in &all {
            for b in &all {
                let x = ExtElement::blade(n, a, q(1)).unwrap();
                let y = ExtElement::blade(n, b, q(1)).unwrap();
                let mut expected = oracle::Dense::new();
                if let Some((c, s)) = oracle::wedge_blades(a, b) {
                    expected.insert(c, q(s));
                }
                assert_eq!(to_dense(&x.wedge(&y).unwrap()), expected, "e{a:?} ∧ e{b:?} in R^{n}");
            }
        }
    }
}

#[test]
fn random_degree_two_products_in_four_dimensions() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..200 {
        let x = random_element(&mut rng, 4, 2);
        let y = random_element(&mut rng, 4, 2);
        assert_eq!(to_dense(&x.wedge(&y).unwrap()), oracle::wedge(&to_dense(&x), &to_dense(&y)));
    }
}

#[test]
fn component_dimensions_match_enumeration() {
    for n in 1..=10 {
        for k in 0..=n + 1 {
            assert_eq!(dim_component(n, k), oracle::subsets(n, k).len() as u128, "C({n},{k})");
        }
    }
}

#[test]
fn graded_anticommutativity_on_seeded_pairs() {
    let n = 5;
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for p in 0..=n {
        for k in 0..=n {
            for _ in 0..1000 {
                let x = random_element(&mut rng, n, p);
                let y = random_element(&mut rng, n, k);
                let sign = if (p * k) % 2 == 0 { q(1) } else { q(-1) };
                assert_eq!(x.wedge(&y).unwrap(), y.wedge(&x).unwrap().scale(&sign), "degrees {p}, {k}");
            }
        }
    }
}

#[test]
fn sixteen_two_forms_in_six_dimensions_are_dependent() {
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    let xs: Vec<ExtElement> = (0..16).map(|_| random_element(&mut rng, 6, 2)).collect();
    assert!(!linearly_independent(&xs, 2).unwrap());
    let basis: Vec<ExtElement> = oracle::subsets(6, 2).iter().map(|a| ExtElement::blade(6, a, q(1)).unwrap()).collect();
    assert_eq!(basis.len(), 15);
    assert!(linearly_independent(&basis, 2).unwrap());
}
