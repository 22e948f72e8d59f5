//! Cross-module invariants as property tests.

use num_rational::BigRational;
use proptest::prelude::*;
use riffle_core::patience::{foata_decompose, phi_bijection, MultisetWord};
use riffle_core::shuffle::{cut_deletion_distances, random_schedule, tv_riffle_table};
use riffle_core::{Limits, Permutation};

fn permutation(max_n: usize) -> impl Strategy<Value = Permutation> {
    (1..=max_n).prop_flat_map(|n| Just((1..=n).collect::<Vec<_>>()).prop_shuffle())
        .prop_map(|v| Permutation::from_one_line(&v).unwrap())
}

fn word() -> impl Strategy<Value = MultisetWord> {
    prop::collection::vec(1u32..5, 1..10).prop_map(MultisetWord::new)
}

proptest! {
    #[test]
    fn cyclic_descents_survive_rotation(w in permutation(10), k in 0usize..10) {
        let z = Permutation::rotation(w.n(), k % w.n());
        prop_assert_eq!(z.compose(&w).cyclic_descent_count(), w.cyclic_descent_count());
        prop_assert_eq!(w.compose(&z).cyclic_descent_count(), w.cyclic_descent_count());
    }

    #[test]
    fn descents_bound_cyclic_descents(w in permutation(10)) {
        let d = w.descent_count();
        let cd = w.cyclic_descent_count();
        prop_assert!(cd == d || cd == d + 1);
        prop_assert_eq!(w.inverse().inverse(), w);
    }

    #[test]
    fn foata_round_trip(w in word()) {
        let ic = foata_decompose(&w);
        prop_assert_eq!(ic.product().word(), w.clone());
        let ys: Vec<u32> = ic.cycles.iter().map(|c| c.y).collect();
        prop_assert!(ys.windows(2).all(|p| p[0] <= p[1]));
        prop_assert!(ic.cycles.iter().all(|c| c.xs.iter().all(|&x| x > c.y)));
    }

    #[test]
    fn phi_keeps_letters_and_orders_counts(w in word()) {
        let phi = phi_bijection(&w);
        prop_assert_eq!(phi.product().word().mults(), w.mults());
        let s = phi.stats();
        prop_assert!(s.c >= s.c_prime);
        let distinct = w.mults().iter().all(|&m| m <= 1);
        if distinct {
            prop_assert_eq!(s.c, s.c_prime);
        }
    }

    #[test]
    fn tv_tables_decrease(n in 2usize..40, k in 2usize..4) {
        let t = tv_riffle_table(n, k, 6, false).unwrap();
        prop_assert!(t.windows(2).all(|p| p[1] <= p[0]));
        prop_assert!(t.iter().all(|v| *v >= BigRational::from_integer(0.into())));
        prop_assert_eq!(tv_riffle_table(n, k, 6, true).unwrap(), tv_riffle_table(n - 1, k, 6, false).unwrap());
    }

    #[test]
    fn deleting_cuts_never_helps(seed in 0u64..1000, len in 1usize..5) {
        let steps = random_schedule(len, &[2, 3], seed);
        let (full, reduced) = cut_deletion_distances(4, &steps, &Limits::default()).unwrap();
        prop_assert!(full >= reduced);
    }
}
