use hecke_core::coset::{CosetEngine, CosetVector, Level, Side};
use hecke_core::group::{GroupElement, GroupPair, Mat2, DEFAULT_ORDER_BOUND};
use hecke_core::hecke::{hecke_act_left, hecke_act_right, hecke_mul, hecke_star, HeckeElement};
use hecke_core::rep::ConvElement;
use hecke_core::scalar::Q;
use proptest::prelude::*;

fn s4_s3() -> GroupPair {
    GroupPair::finite("S4/S3", 4, &["(1 2)", "(1 2 3 4)"], &["(1 2)", "(1 2 3)"], DEFAULT_ORDER_BOUND).unwrap()
}

/// Index-12 subgroup, so that double cosets have several sizes.
fn s4_z2() -> GroupPair {
    GroupPair::finite("S4/Z2", 4, &["(1 2)", "(1 2 3 4)"], &["(1 2)"], DEFAULT_ORDER_BOUND).unwrap()
}

/// A word in `S`, `T`, `T⁻¹`, `σ_p`, `σ_p⁻¹` (letters 0..5) as a group element.
fn word(pair: &GroupPair, letters: &[u8]) -> GroupElement {
    let m = pair.modular_group().unwrap();
    let p = m.p();
    let gens = [
        Mat2::new(0, -1, 1, 0),
        Mat2::new(1, 1, 0, 1),
        Mat2::new(1, -1, 0, 1),
        Mat2::diag(p, 1),
        Mat2::diag(1, p),
    ];
    letters.iter().fold(pair.identity(), |acc, &l| {
        pair.mul(&acc, &GroupElement::Matrix(m.element(gens[l as usize]).unwrap()))
    })
}

/// A word in the generators of `Γ` only.
fn gamma_word(pair: &GroupPair, letters: &[u8]) -> GroupElement {
    let gens = pair.gamma_generators();
    letters.iter().fold(pair.identity(), |acc, &l| {
        let g = &gens[l as usize % gens.len()];
        if (l as usize / gens.len()).is_multiple_of(2) {
            pair.mul(&acc, g)
        } else {
            pair.mul(&acc, &pair.invert(g))
        }
    })
}

fn letters(max: usize) -> impl Strategy<Value = Vec<u8>> {
    prop::collection::vec(0u8..5, 0..max)
}

fn rational() -> impl Strategy<Value = Q> {
    (-6i64..=6, 1i64..=4).prop_map(|(n, d)| Q::new(n, d))
}

fn hecke_element(engine: &CosetEngine, cs: &[Q]) -> HeckeElement {
    let mut h = HeckeElement::zero();
    for (d, c) in engine.all_double_cosets().unwrap().into_iter().zip(cs) {
        h.add_term(d, *c);
    }
    h
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn matrix_group_axioms(p in prop::sample::select(vec![2i64, 3, 5]), a in letters(5), b in letters(5), c in letters(5)) {
        let pair = GroupPair::modular(p).unwrap();
        let (x, y, z) = (word(&pair, &a), word(&pair, &b), word(&pair, &c));
        prop_assert_eq!(pair.mul(&pair.mul(&x, &y), &z), pair.mul(&x, &pair.mul(&y, &z)));
        prop_assert_eq!(pair.mul(&x, &pair.invert(&x)), pair.identity());
        prop_assert_eq!(pair.mul(&pair.identity(), &x), x);
        for g in [x, y, z] {
            pair.check(&g).unwrap();
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn matrix_canonical_forms_are_idempotent_and_invariant(p in prop::sample::select(vec![2i64, 3, 5]), g in letters(6), u in prop::collection::vec(0u8..4, 0..6)) {
        let pair = GroupPair::modular(p).unwrap();
        let g = word(&pair, &g);
        let gamma = gamma_word(&pair, &u);
        let r = pair.canon_right_gamma(&g);
        prop_assert_eq!(pair.canon_right_gamma(&r), r);
        prop_assert_eq!(pair.canon_right_gamma(&pair.mul(&gamma, &g)), r);
        let l = pair.canon_left_gamma(&g);
        prop_assert_eq!(pair.canon_left_gamma(&pair.mul(&g, &gamma)), l);
        let d = pair.canon_double(&g);
        prop_assert_eq!(pair.canon_double(&pair.mul(&pair.mul(&gamma, &g), &gamma)), d);
    }

    #[test]
    fn level_cosets_are_invariant(p in prop::sample::select(vec![2i64, 3]), g in letters(4), u in prop::collection::vec(0u8..8, 0..4)) {
        let engine = CosetEngine::new(GroupPair::modular(p).unwrap());
        let pair = engine.pair();
        let level = engine.stabilizer_level(&GroupElement::Matrix(Mat2::diag(p, 1)));
        let gens = engine.level_generators(&level).unwrap();
        let h = u.iter().fold(pair.identity(), |acc, &i| pair.mul(&acc, &gens[i as usize % gens.len()]));
        prop_assert!(engine.level_contains(&level, &h));
        let g = word(pair, &g);
        let right = engine.canon_coset(Side::Right, &level, &g).unwrap();
        prop_assert_eq!(engine.canon_coset(Side::Right, &level, &right.rep).unwrap(), right.clone());
        prop_assert_eq!(engine.canon_coset(Side::Right, &level, &pair.mul(&h, &g)).unwrap(), right);
        let left = engine.canon_coset(Side::Left, &level, &g).unwrap();
        prop_assert_eq!(engine.canon_coset(Side::Left, &level, &pair.mul(&g, &h)).unwrap(), left);
    }

    #[test]
    fn finite_canonical_forms(g in 0u32..24, x in 0u32..24, y in 0u32..24) {
        let pair = s4_s3();
        let f = pair.finite_backend().unwrap();
        let gamma = f.gamma_elements().to_vec();
        let (g, a, b) = (GroupElement::Perm(g), GroupElement::Perm(gamma[x as usize % 6]), GroupElement::Perm(gamma[y as usize % 6]));
        let d = pair.canon_double(&g);
        prop_assert_eq!(pair.canon_double(&d), d);
        prop_assert_eq!(pair.canon_double(&pair.mul(&pair.mul(&a, &g), &b)), d);
        prop_assert_eq!(pair.canon_right_gamma(&pair.mul(&a, &g)), pair.canon_right_gamma(&g));
        prop_assert_eq!(pair.canon_left_gamma(&pair.mul(&g, &b)), pair.canon_left_gamma(&g));
    }

    #[test]
    fn level_embed_is_isometric(cs in prop::collection::vec(rational(), 4), ds in prop::collection::vec(rational(), 4)) {
        let engine = CosetEngine::new(s4_s3());
        let pair = engine.pair();
        let finer = engine.stabilizer_level(&pair.parse_element("(1 4)").unwrap());
        let keys = engine.all_cosets(Side::Right, &Level::gamma()).unwrap();
        let build = |cs: &[Q]| {
            let mut v = CosetVector::zero(Side::Right, Level::gamma());
            for (k, c) in keys.iter().zip(cs) {
                v.add_term(k.clone(), *c).unwrap();
            }
            v
        };
        let (u, v) = (build(&cs), build(&ds));
        let (eu, ev) = (engine.level_embed(&u, &finer).unwrap(), engine.level_embed(&v, &finer).unwrap());
        prop_assert_eq!(engine.inner(&eu, &ev).unwrap(), engine.inner(&u, &v).unwrap());
        prop_assert_eq!(eu.mass(), u.mass() * Q::from_integer(3));
    }

    #[test]
    fn convolution_is_associative_and_star_reverses(xs in prop::collection::vec(rational(), 18)) {
        let pair = GroupPair::finite("S3", 3, &["(1 2)", "(1 2 3)"], &["(1 2)"], DEFAULT_ORDER_BOUND).unwrap();
        let g = pair.finite_backend().unwrap().group();
        let a = ConvElement::from_values(xs[..6].to_vec());
        let b = ConvElement::from_values(xs[6..12].to_vec());
        let c = ConvElement::from_values(xs[12..].to_vec());
        prop_assert_eq!(a.conv(g, &b).conv(g, &c), a.conv(g, &b.conv(g, &c)));
        prop_assert_eq!(a.conv(g, &b).adjoint(g), b.adjoint(g).conv(g, &a.adjoint(g)));
        prop_assert_eq!(a.conv(g, &b).trace(), b.conv(g, &a).trace());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn hecke_algebra_axioms(xs in prop::collection::vec(rational(), 24), ys in prop::collection::vec(rational(), 24), zs in prop::collection::vec(rational(), 24)) {
        for pair in [s4_s3(), s4_z2()] {
            let engine = CosetEngine::new(pair);
            let (a, b, c) = (hecke_element(&engine, &xs), hecke_element(&engine, &ys), hecke_element(&engine, &zs));
            let ab = hecke_mul(&engine, &a, &b).unwrap();
            prop_assert_eq!(hecke_mul(&engine, &ab, &c).unwrap(), hecke_mul(&engine, &a, &hecke_mul(&engine, &b, &c).unwrap()).unwrap());
            prop_assert_eq!(hecke_star(&engine, &ab), hecke_mul(&engine, &hecke_star(&engine, &b), &hecke_star(&engine, &a)).unwrap());
            prop_assert_eq!(hecke_mul(&engine, &a, &b.add(&c)).unwrap(), ab.add(&hecke_mul(&engine, &a, &c).unwrap()));
            // module actions are compatible with the product
            let key = engine.all_cosets(Side::Right, &Level::gamma()).unwrap()[1].clone();
            let v = CosetVector::basis(key);
            let lhs = hecke_act_left(&engine, &a, &hecke_act_left(&engine, &b, &v).unwrap()).unwrap();
            prop_assert_eq!(lhs, hecke_act_left(&engine, &ab, &v).unwrap());
            let key = engine.all_cosets(Side::Left, &Level::gamma()).unwrap()[1].clone();
            let w = CosetVector::basis(key);
            let lhs = hecke_act_right(&engine, &b, &hecke_act_right(&engine, &a, &w).unwrap()).unwrap();
            prop_assert_eq!(lhs, hecke_act_right(&engine, &ab, &w).unwrap());
        }
    }
}
