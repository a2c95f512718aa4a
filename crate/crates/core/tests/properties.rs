mod oracle;

use proptest::prelude::*;

use qrob_core::exterior::{Blade, ExtElement};
use qrob_core::homsearch::{apply, witness_template};
use qrob_core::linalg::SparseVec;
use qrob_core::obstruct::{search_obstruction, verify_certificate};
use qrob_core::rational::{q, Q};
use qrob_core::ring::{parse_manifold, GradedRing, RingElement};

const N: usize = 5;

fn ext(n: usize) -> impl Strategy<Value = ExtElement> {
    prop::collection::vec((0u64..(1 << n), -3i64..=3), 0..6).prop_map(move |terms| {
        let terms = terms.into_iter().map(|(m, c)| (Blade::from_mask(m), q(c))).collect();
        ExtElement::from_terms(n, terms).unwrap()
    })
}

fn to_dense(x: &ExtElement) -> oracle::Dense {
    x.terms().map(|(b, c)| (b.axes(), c.clone())).collect()
}

fn element(ring: &GradedRing, coords: &[i64]) -> RingElement {
    let mut it = coords.iter().cycle();
    let mut x = ring.zero();
    for k in 0..=ring.top_degree() {
        let v: Vec<Q> = (0..ring.dim(k)).map(|_| q(*it.next().unwrap())).collect();
        x = x.add(&ring.element(k, SparseVec::from_dense(&v)).unwrap()).unwrap();
    }
    x
}

proptest! {
    #[test]
    fn wedge_matches_oracle(x in ext(N), y in ext(N)) {
        prop_assert_eq!(to_dense(&x.wedge(&y).unwrap()), oracle::wedge(&to_dense(&x), &to_dense(&y)));
    }

    #[test]
    fn wedge_is_associative_and_bilinear(x in ext(N), y in ext(N), z in ext(N), l in -4i64..=4) {
        let lhs = x.wedge(&y).unwrap().wedge(&z).unwrap();
        let rhs = x.wedge(&y.wedge(&z).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
        let l = q(l);
        let left = x.add_scaled(&l, &y).unwrap().wedge(&z).unwrap();
        let right = x.wedge(&z).unwrap().add_scaled(&l, &y.wedge(&z).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn ring_laws_on_random_classes(
        a in prop::collection::vec(-2i64..=2, 1..12),
        b in prop::collection::vec(-2i64..=2, 1..12),
        c in prop::collection::vec(-2i64..=2, 1..12),
        which in 0usize..3,
    ) {
        let src = ["surface(2)*cp(1)", "connsum(s2xs2, 2)*torus(1)", "torus(2)*cp(2)"][which];
        let ring = parse_manifold(src).unwrap().build().unwrap().ring;
        let (x, y, z) = (element(&ring, &a), element(&ring, &b), element(&ring, &c));
        let xy_z = ring.multiply(&ring.multiply(&x, &y).unwrap(), &z).unwrap();
        let x_yz = ring.multiply(&x, &ring.multiply(&y, &z).unwrap()).unwrap();
        prop_assert_eq!(xy_z, x_yz);
        prop_assert_eq!(ring.multiply(&ring.one(), &x).unwrap(), x.clone());
        let sum = ring.multiply(&x.add(&y).unwrap(), &z).unwrap();
        prop_assert_eq!(sum, ring.multiply(&x, &z).unwrap().add(&ring.multiply(&y, &z).unwrap()).unwrap());
    }

    #[test]
    fn witnesses_are_linear(a in prop::collection::vec(-3i64..=3, 1..20), b in prop::collection::vec(-3i64..=3, 1..20), l in -3i64..=3) {
        let built = parse_manifold("surface(1)*cp(2)").unwrap().build().unwrap();
        let ring = &built.ring;
        let omega = ring.element(4, SparseVec::unit(ring.labels()[4].iter().position(|s| s == "vol⊗s").unwrap())).unwrap();
        let w = witness_template(&built, &omega, 4).unwrap().unwrap();
        let (x, y) = (element(ring, &a), element(ring, &b));
        let l = q(l);
        let lhs = apply(ring, &w, &x.add_scaled(&l, &y).unwrap()).unwrap();
        let rhs = apply(ring, &w, &x).unwrap().add_scaled(&l, &apply(ring, &w, &y).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn ring_files_round_trip(which in 0usize..5) {
        let src = ["torus(3)", "surface(3)", "cp(3)*sphere(2)", "connsum(s2xs2, 3)", "connsum(torus(4), cp(2))"][which];
        let ring = parse_manifold(src).unwrap().build().unwrap().ring;
        let json = ring.to_json();
        let back = GradedRing::from_json(&json).unwrap();
        prop_assert_eq!(back.to_json(), json);
        prop_assert_eq!(back.hash(), ring.hash());
    }
}

#[test]
fn searched_certificates_reverify() {
    for (src, n) in [("surface(3)*cp(2)", 4), ("connsum(s2xs2, 8)*cp(2)", 6), ("connsum(s2xs2, 8)", 4)] {
        let b = parse_manifold(src).unwrap().build().unwrap();
        let top = b.ring.top_degree();
        let omega = if top == n {
            b.ring.fundamental_class()
        } else {
            let vol = b.ring.basis_element(b.factors[0].ring.top_degree(), b.factors[0].embed[b.factors[0].ring.top_degree()][0]);
            let s = b.ring.basis_element(2, b.factors[1].embed[2][0]);
            b.ring.multiply(&vol, &s).unwrap()
        };
        let cert = search_obstruction(&b.ring, &omega, n).unwrap().unwrap();
        verify_certificate(&b.ring, &cert).unwrap();
    }
}
