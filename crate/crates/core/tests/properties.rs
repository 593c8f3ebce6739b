//! Randomized invariants.

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use qmassey::ainf::{hochschild_differential, random_cochain, small_algebras, trivial_mu2};
use qmassey::gw::{koszul_sort, star_at, PdConvention};
use qmassey::johnson::{lie_bracket, LieElement, SymplecticModule};
use qmassey::rational::{parse_q, qf, render, sign};
use qmassey::trees::{enumerate_stable_trees, graft, Tree};
use qmassey::y::{build_y, y_class};

fn lie_combo(h: &SymplecticModule, coeffs: &[i64]) -> LieElement {
    let mut out = LieElement::zero(1);
    for (x, c) in (0..h.rank() as u8).zip(coeffs) {
        out.add_scaled(&qf(*c, 1), &LieElement::generator(x));
    }
    out
}

fn sum(a: &LieElement, b: &LieElement, c: &LieElement) -> LieElement {
    let mut out = a.clone();
    out.add_scaled(&qf(1, 1), b);
    out.add_scaled(&qf(1, 1), c);
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rationals_round_trip(n in -10_000i64..10_000, d in 1i64..500) {
        let x = qf(n, d);
        prop_assert_eq!(parse_q(&render(&x)).unwrap(), x);
    }

    #[test]
    fn lie_bracket_is_alternating_and_jacobi(
        a in prop::collection::vec(-3i64..=3, 4),
        b in prop::collection::vec(-3i64..=3, 4),
        c in prop::collection::vec(-3i64..=3, 4),
    ) {
        let h = SymplecticModule::new(2).unwrap();
        let (x, y, z) = (lie_combo(&h, &a), lie_combo(&h, &b), lie_combo(&h, &c));
        prop_assert!(lie_bracket(&x, &x).is_zero());
        let mut anti = lie_bracket(&x, &y);
        anti.add_scaled(&qf(1, 1), &lie_bracket(&y, &x));
        prop_assert!(anti.is_zero());
        let jacobi = sum(
            &lie_bracket(&x, &lie_bracket(&y, &z)),
            &lie_bracket(&y, &lie_bracket(&z, &x)),
            &lie_bracket(&z, &lie_bracket(&x, &y)),
        );
        prop_assert!(jacobi.is_zero());
    }

    #[test]
    fn koszul_sign_counts_odd_inversions(ins in prop::collection::vec(0usize..8, 0..7)) {
        let degree = |i: usize| i as i64 % 3;
        let (sorted, s) = koszul_sort(&ins, degree);
        let mut expected = ins.clone();
        expected.sort();
        prop_assert_eq!(sorted, expected);
        let mut odd = 0;
        for i in 0..ins.len() {
            for j in i + 1..ins.len() {
                if ins[i] > ins[j] && degree(ins[i]) % 2 != 0 && degree(ins[j]) % 2 != 0 {
                    odd += 1;
                }
            }
        }
        prop_assert_eq!(s, sign(odd));
    }

    #[test]
    fn trees_parse_their_canonical_form(d in 2usize..=6, pick in any::<prop::sample::Index>()) {
        let trees = enumerate_stable_trees(d);
        let t = pick.get(&trees);
        prop_assert_eq!(&Tree::parse(&t.canonical()).unwrap(), t);
        prop_assert!(t.is_stable());
    }

    #[test]
    fn grafting_adds_leaves(d1 in 2usize..=4, d2 in 2usize..=4, a in any::<prop::sample::Index>(), b in any::<prop::sample::Index>(), j in any::<prop::sample::Index>()) {
        let (ta, tb) = (enumerate_stable_trees(d1), enumerate_stable_trees(d2));
        let (x, y) = (a.get(&ta), b.get(&tb));
        let j = j.index(d1) + 1;
        let g = graft(x, j, y).unwrap();
        prop_assert_eq!(g.leaves(), d1 + d2 - 1);
        prop_assert_eq!(g.edge_count(), x.edge_count() + y.edge_count() + 1);
    }

    #[test]
    fn hochschild_differential_squares_to_zero(seed in any::<u64>(), which in 0usize..4, s in 1usize..=3, t in -2i64..=1) {
        let algs = small_algebras();
        let alg = &algs[which % algs.len()];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mu2 = trivial_mu2(alg);
        let phi = random_cochain(&mut rng, &alg.basis, s, t, 0.5, 4);
        let d = hochschild_differential(&alg.basis, &mu2, &phi);
        prop_assert!(hochschild_differential(&alg.basis, &mu2, &d).is_zero());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn fiber_products_are_graded_commutative(x in 0usize..14, z in 0usize..14) {
        let table = build_y().unwrap();
        let alg = &table.target;
        let f = y_class("F").unwrap();
        let xz = star_at(&table, PdConvention::ProductLast, &f, &alg.e(x), &alg.e(z)).unwrap();
        let zx = star_at(&table, PdConvention::ProductLast, &f, &alg.e(z), &alg.e(x)).unwrap();
        let s = sign(alg.basis.degree(x) * alg.basis.degree(z));
        let zx: Vec<_> = zx.iter().map(|c| c * &s).collect();
        prop_assert_eq!(xz, zx);
    }
}
