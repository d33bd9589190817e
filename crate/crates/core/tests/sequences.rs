use nangle_core::decompose::{isomorphism_invariant, random_exact, GenParams, Piece};
use nangle_core::rng::rng_from;
use nangle_core::{
    direct_sum_seq, mapping_cone, trivial_seq, GradedMap, GradedObject, NSeq, PrimeField,
    SeqMorphism,
};
use proptest::prelude::*;

fn f5() -> PrimeField {
    PrimeField::new(5).unwrap()
}

fn exact(n: usize, seed: u64) -> NSeq {
    random_exact(f5(), &GenParams::new(n), seed).unwrap()
}

#[test]
fn cone_of_zero_morphism_is_rotation_plus_target() {
    for n in 3..7 {
        for seed in 0..20 {
            let s = exact(n, seed);
            let t = exact(n, seed + 1000);
            let cone = mapping_cone(&SeqMorphism::zero(&s, &t).unwrap()).unwrap();
            // Negated A-part, shifted one step to the left.
            let mut objs: Vec<GradedObject> = s.objects()[1..].to_vec();
            objs.push(s.susp_obj(s.obj(1)));
            let mut maps: Vec<GradedMap> = s.maps()[1..].iter().map(GradedMap::neg).collect();
            maps.push(s.susp(s.map(1)).neg());
            let left = NSeq::new(f5(), s.shift(), objs, maps).unwrap();
            assert_eq!(cone, direct_sum_seq(&left, &t).unwrap());
            assert!(cone.is_exact());
        }
    }
}

#[test]
fn perturbed_identity_is_not_a_morphism() {
    let s = exact(4, 7);
    let (i, _) = s
        .objects()
        .iter()
        .enumerate()
        .find(|(_, o)| !o.is_zero())
        .unwrap();
    let mut comps = SeqMorphism::identity(&s).components;
    comps[i] = comps[i].scale(2);
    let m = SeqMorphism {
        source: s.clone(),
        target: s.clone(),
        components: comps,
    };
    let touches_nonzero_map = s.map(i + 1).rank() > 0 || (i > 0 && s.map(i).rank() > 0);
    assert_eq!(m.is_morphism(), !touches_nonzero_map);
}

#[test]
fn weak_iso_needs_two_neighbouring_isos() {
    let field = f5();
    let a = GradedObject::concentrated(0, 1);
    let t0 = trivial_seq(field, 3, 1, &a, 0).unwrap();
    let t1 = trivial_seq(field, 3, 1, &a, 1).unwrap();
    let s = direct_sum_seq(&t0, &t1).unwrap();
    assert!(SeqMorphism::identity(&s).is_weak_iso().unwrap());
    // Projection onto the first summand: an iso only at position 2.
    let comps: Vec<GradedMap> = (1..=3)
        .map(|i| {
            let z = GradedMap::zero(field, t1.obj(i), t1.obj(i));
            GradedMap::identity(field, t0.obj(i))
                .direct_sum(&z)
                .unwrap()
        })
        .collect();
    let isos: Vec<bool> = comps.iter().map(GradedMap::is_isomorphism).collect();
    assert_eq!(isos, [false, true, false]);
    let m = SeqMorphism::new(s.clone(), s.clone(), comps).unwrap();
    assert!(m.is_morphism());
    assert!(!m.is_weak_iso().unwrap());
}

#[test]
fn direct_sums_stay_exact_and_add_dimensions() {
    for seed in 0..100 {
        let s = exact(5, seed);
        let t = exact(5, seed + 500);
        let u = direct_sum_seq(&s, &t).unwrap();
        assert!(u.is_exact());
        assert_eq!(u.total_dim(), s.total_dim() + t.total_dim());
        for i in 1..=5 {
            for (d, k) in u.obj(i).iter() {
                assert_eq!(k, s.obj(i).dim(d) + t.obj(i).dim(d));
            }
        }
        assert_eq!(direct_sum_seq(&s, &NSeq::zero(f5(), 5, 1)).unwrap(), s);
    }
}

#[test]
fn two_conjugated_pieces_are_recovered() {
    let field = f5();
    let a = GradedObject::from_pairs([(0, 2)]);
    let b = GradedObject::from_pairs([(-1, 1), (1, 1)]);
    let sum = direct_sum_seq(
        &trivial_seq(field, 4, 1, &a, 0).unwrap(),
        &trivial_seq(field, 4, 1, &b, 2).unwrap(),
    )
    .unwrap();
    let mut rng = rng_from(9);
    let thetas: Vec<GradedMap> = sum
        .objects()
        .iter()
        .map(|o| GradedMap::random_iso(field, o, &mut rng))
        .collect();
    let hidden = sum.conjugate(&thetas).unwrap();
    let mut want = vec![
        Piece {
            object: a,
            rotation: 0,
        },
        Piece {
            object: b,
            rotation: 2,
        },
    ];
    want.sort();
    assert_eq!(isomorphism_invariant(&hidden).unwrap(), want);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn rotations_are_inverse(seed: u64, n in 3usize..7) {
        let s = exact(n, seed);
        prop_assert_eq!(s.rotate_left().rotate_right(), s.clone());
        prop_assert_eq!(s.rotate_right().rotate_left(), s.clone());
        prop_assert!(s.rotate_left().is_exact());
        prop_assert!(s.rotate_right().is_exact());
    }

    #[test]
    fn generator_is_deterministic(seed: u64, n in 3usize..7) {
        prop_assert_eq!(exact(n, seed), exact(n, seed));
    }

    #[test]
    fn invariant_survives_conjugation(seed: u64, n in 3usize..6) {
        let s = exact(n, seed);
        let mut rng = rng_from(seed ^ 0x5eed);
        let thetas: Vec<GradedMap> = s.objects().iter().map(|o| GradedMap::random_iso(f5(), o, &mut rng)).collect();
        prop_assert_eq!(isomorphism_invariant(&s).unwrap(), isomorphism_invariant(&s.conjugate(&thetas).unwrap()).unwrap());
    }
}
