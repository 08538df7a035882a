mod common;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tauideal::ff::Field;
use tauideal::groebner::{buchberger, GroebnerConfig, Ideal};
use tauideal::poly::{MonomialOrder, Polynomial, Ring};

fn homogeneous_instance(seed: u64) -> (Vec<Polynomial>, Polynomial, u32) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p = if rng.gen_bool(0.5) { 2 } else { 3 };
    let n = rng.gen_range(1..=4);
    let ring = Ring::with_indexed_vars(Field::prime(p).unwrap(), n).unwrap();
    let mut gens = Vec::new();
    for _ in 0..rng.gen_range(1..=3) {
        let (t, d) = (rng.gen_range(1..=3), rng.gen_range(1..=3));
        let g = common::random_homogeneous(&mut rng, &ring, t, d);
        if !g.is_zero() {
            gens.push(g);
        }
    }
    if gens.is_empty() {
        gens.push(ring.var(0));
    }
    let d = rng.gen_range(1..=5);
    let mut f = ring.zero();
    for g in &gens {
        let gd = g.total_degree().unwrap();
        if gd <= d && rng.gen_bool(0.7) {
            f = &f + &(&common::random_homogeneous(&mut rng, &ring, 2, d - gd) * g);
        }
    }
    if rng.gen_bool(0.3) {
        f = &f + &common::random_homogeneous(&mut rng, &ring, 1, d);
    }
    (gens, f, d)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn membership_matches_matrix_oracle(seed in any::<u64>()) {
        let (gens, f, d) = homogeneous_instance(seed);
        let ideal = Ideal::new(gens[0].ring(), gens.clone()).unwrap();
        prop_assert_eq!(ideal.contains(&f).unwrap(), common::macaulay_member(&f, &gens, d));
    }

    #[test]
    fn membership_matches_lex_reference(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ring = Ring::with_indexed_vars(Field::prime(3).unwrap(), rng.gen_range(1..=3)).unwrap();
        let gens: Vec<Polynomial> = (0..2).map(|_| common::random_nonzero_poly(&mut rng, &ring, 3, 3)).collect();
        let f = &(&common::random_poly(&mut rng, &ring, 2, 2) * &gens[0]) + &common::random_poly(&mut rng, &ring, 1, 2);
        let ideal = Ideal::new(&ring, gens.clone()).unwrap();
        prop_assert_eq!(ideal.contains(&f).unwrap(), common::lex_member(&f, &gens));
    }

    #[test]
    fn grevlex_and_lex_bases_agree_on_ideal(seed in any::<u64>()) {
        let (gens, _, _) = homogeneous_instance(seed);
        let ring = gens[0].ring().clone();
        let a = Ideal::new(&ring, gens.clone()).unwrap();
        let b = Ideal::with_config(&ring, gens.clone(), GroebnerConfig::with_order(MonomialOrder::Lex)).unwrap();
        prop_assert!(a.equals(&b).unwrap());
        let reference = common::lex_groebner(ring.field(), &gens);
        for g in b.reduced_generators().unwrap() {
            prop_assert!(common::lex_reduce(ring.field(), &common::to_dense(&g), &reference).is_empty());
        }
    }

    #[test]
    fn reduced_basis_is_canonical(seed in any::<u64>()) {
        let (mut gens, _, _) = homogeneous_instance(seed);
        let config = GroebnerConfig::default();
        let a = buchberger(&gens, &config).unwrap();
        gens.reverse();
        let extra = &gens[0] * &gens[gens.len() - 1];
        gens.push(extra);
        let b = buchberger(&gens, &config).unwrap();
        prop_assert_eq!(a, b);
    }
}
