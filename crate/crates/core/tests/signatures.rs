mod common;

use concordance_core::{lt_signature, lt_signatures, sigma_q, Prime, SeifertMatrix};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::{float_signature, random_seifert};

fn arb_prime() -> impl Strategy<Value = Prime> {
    prop::sample::select(vec![2u32, 3, 5, 7]).prop_map(|q| Prime::new(q).unwrap())
}

fn arb_seifert(max_genus: usize) -> impl Strategy<Value = SeifertMatrix> {
    (any::<u64>(), 1..=max_genus).prop_map(|(seed, g)| random_seifert(&mut ChaCha8Rng::seed_from_u64(seed), g))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn agrees_with_eigenvalue_oracle(v in arb_seifert(3), q in arb_prime()) {
        for (j, s) in (1..).zip(lt_signatures(&v, q).unwrap()) {
            if let Some(f) = float_signature(&v, q.get(), j) {
                prop_assert_eq!(s.get(), f, "q={} j={}", q, j);
            }
        }
    }

    #[test]
    fn conjugate_roots_agree(v in arb_seifert(3), q in arb_prime()) {
        let s = lt_signatures(&v, q).unwrap();
        let r: Vec<_> = s.iter().rev().cloned().collect();
        prop_assert_eq!(s, r);
    }

    #[test]
    fn odd_prime_totals_divisible_by_four(v in arb_seifert(3), q in arb_prime()) {
        prop_assume!(q.is_odd());
        prop_assert_eq!(sigma_q(&v, q).unwrap() % 4, 0);
    }

    #[test]
    fn mirror_negates(v in arb_seifert(3), q in arb_prime()) {
        prop_assert_eq!(sigma_q(&v.mirror(), q).unwrap(), -sigma_q(&v, q).unwrap());
    }

    #[test]
    fn block_sum_adds(a in arb_seifert(2), b in arb_seifert(2), q in arb_prime()) {
        let sum = a.block_sum(&b);
        for j in 1..q.get() {
            let s = |m: &SeifertMatrix| lt_signature(m, q, j).unwrap().get();
            prop_assert_eq!(s(&sum), s(&a) + s(&b));
        }
    }

    #[test]
    fn bounded_by_dimension(v in arb_seifert(3), q in arb_prime()) {
        for s in lt_signatures(&v, q).unwrap() {
            prop_assert!(s.get().unsigned_abs() as usize <= v.dim());
            prop_assert_eq!(s.get() % 2, 0);
        }
    }
}

#[test]
fn torus_family_values() {
    // σ(T(2,k)) = 1 − k and the q = 3 totals of the seed ledger.
    for k in [3usize, 5, 7, 9, 11, 13] {
        let v = SeifertMatrix::torus(2, k).unwrap();
        assert_eq!(sigma_q(&v, Prime::TWO).unwrap(), 1 - k as i64);
    }
    for (k, want) in [(5, -8), (7, -8), (11, -16), (13, -16)] {
        let v = SeifertMatrix::torus(2, k).unwrap();
        assert_eq!(sigma_q(&v, Prime::THREE).unwrap(), want, "T(2,{k})");
    }
    for (k, want) in [(5, -8), (7, -8)] {
        let v = SeifertMatrix::torus(3, k).unwrap();
        assert_eq!(sigma_q(&v, Prime::TWO).unwrap(), want, "T(3,{k})");
    }
}
