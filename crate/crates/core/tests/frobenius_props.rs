mod common;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tauideal::ff::Field;
use tauideal::frobenius::{
    bracket_power, frobenius_decompose, product_pair_generators, test_ideal, trace, PairSpec,
};
use tauideal::groebner::Ideal;
use tauideal::poly::{Monomial, Polynomial, Ring};

fn random_pair(seed: u64, max_n: usize) -> (Polynomial, u32) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p = [2, 3, 5][rng.gen_range(0..3)];
    let r = rng.gen_range(1..=2);
    let e = if p == 5 { 1 } else { rng.gen_range(1..=2) };
    let n = rng.gen_range(1..=max_n);
    let ring = Ring::with_indexed_vars(Field::extension(p, r).unwrap(), n).unwrap();
    let terms = rng.gen_range(1..=4);
    let q = p.pow(e);
    (
        common::random_nonzero_poly(&mut rng, &ring, terms, 2 * q),
        e,
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn decomposition_matches_reference(seed in any::<u64>()) {
        let (f, e) = random_pair(seed, 4);
        let d = frobenius_decompose(&f, e).unwrap();
        let reference = common::brute_decompose(&f, e);
        prop_assert_eq!(d.len(), reference.len());
        for (alpha, s) in reference {
            prop_assert_eq!(d.coefficient(&alpha), s);
        }
        prop_assert_eq!(d.recompose(), f);
    }

    #[test]
    fn trace_is_top_coefficient(seed in any::<u64>()) {
        let (f, e) = random_pair(seed, 3);
        let q = f.field().characteristic().pow(e);
        let top = vec![q - 1; f.ring().nvars()];
        let want = common::brute_decompose(&f, e).remove(&top).unwrap_or_else(|| f.ring().zero());
        prop_assert_eq!(trace(&f, e).unwrap(), want);
    }

    #[test]
    fn f_lies_in_bracket_power(seed in any::<u64>()) {
        let (f, e) = random_pair(seed, 3);
        let tau = test_ideal(&PairSpec::new(f.clone(), e).unwrap()).unwrap();
        prop_assert!(bracket_power(&tau, e).unwrap().contains(&f).unwrap());
    }

    #[test]
    fn product_shrinks_test_ideal(seed in any::<u64>()) {
        let (f, e) = random_pair(seed, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        let g = common::random_nonzero_poly(&mut rng, f.ring(), 2, 3);
        let big = test_ideal(&PairSpec::new(f.clone(), e).unwrap()).unwrap();
        let small = test_ideal(&PairSpec::new(&f * &g, e).unwrap()).unwrap();
        prop_assert!(big.contains_ideal(&small).unwrap());
    }

    #[test]
    fn formula_matches_direct(seed in any::<u64>()) {
        let (f, _) = random_pair(seed, 4);
        let mut rng = ChaCha8Rng::seed_from_u64(seed.rotate_left(7));
        let l = common::random_linear(&mut rng, f.ring());
        let formula = Ideal::new(f.ring(), product_pair_generators(&f, &l).unwrap()).unwrap();
        let direct = test_ideal(&PairSpec::new(&f * &l.to_polynomial(), 1).unwrap()).unwrap();
        prop_assert!(formula.equals(&direct).unwrap());
    }

    #[test]
    fn homogeneous_input_gives_homogeneous_generators(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = [2, 3][rng.gen_range(0..2)];
        let ring = Ring::with_indexed_vars(Field::prime(p).unwrap(), rng.gen_range(2..=3)).unwrap();
        let f = loop {
            let (terms, deg) = (rng.gen_range(1..=4), rng.gen_range(1..=3 * p));
            let f = common::random_homogeneous(&mut rng, &ring, terms, deg);
            if !f.is_zero() {
                break f;
            }
        };
        let tau = test_ideal(&PairSpec::new(f, 1).unwrap()).unwrap();
        for g in tau.reduced_generators().unwrap() {
            prop_assert!(g.is_homogeneous());
        }
        let minimal = tau.minimal_homogeneous_generators().unwrap();
        let same = Ideal::new(&ring, minimal.clone()).unwrap();
        prop_assert!(same.equals(&tau).unwrap());
        for i in 0..minimal.len() {
            let mut rest = minimal.clone();
            let dropped = rest.remove(i);
            if rest.is_empty() {
                continue;
            }
            prop_assert!(!Ideal::new(&ring, rest).unwrap().contains(&dropped).unwrap());
        }
    }
}

#[test]
fn generators_of_a_pth_power_multiple() {
    // (g^p h) has test ideal g * tau(h) at level 1
    let ring = Ring::new(Field::prime(3).unwrap(), &["x", "y"]).unwrap();
    let g = ring.parse("x + y").unwrap();
    let h = ring.parse("x*y + 1").unwrap();
    let tau_h = test_ideal(&PairSpec::new(h.clone(), 1).unwrap()).unwrap();
    let tau = test_ideal(&PairSpec::new(&g.pow(3) * &h, 1).unwrap()).unwrap();
    let expected = tau_h.map_generators(&ring, |t| &g * t).unwrap();
    assert!(tau.equals(&expected).unwrap());
}

#[test]
fn monomial_pairs_have_monomial_test_ideals() {
    // tau(x^a)^{1/p} = x^{floor(a/p)}
    let ring = Ring::new(Field::prime(5).unwrap(), &["x"]).unwrap();
    for a in 1..40u32 {
        let f = ring.term(1, Monomial::from_exponents(&[a]));
        let tau = test_ideal(&PairSpec::new(f, 1).unwrap()).unwrap();
        let want = ring.term(1, Monomial::from_exponents(&[a / 5]));
        assert_eq!(tau.reduced_generators().unwrap(), vec![want]);
    }
}
