//! Empirical laws of the seeded samplers against the exact measures (chi-square, α = 0.001).

use num_traits::ToPrimitive;
use riffle_core::affine::{affine2_samples, affine_measure, AffineMethod};
use riffle_core::shuffle::{gsr_samples, riffle_measure};
use riffle_core::{Limits, PermMeasure, Permutation};
use statrs::distribution::{ChiSquared, ContinuousCDF};

const ALPHA: f64 = 1e-3;

/// Upper-tail p-value of the chi-square statistic of `draws` against `law`.
fn p_value(law: &PermMeasure, draws: &[Permutation]) -> f64 {
    let n = law.n();
    let size: usize = (1..=n).product();
    let mut counts = vec![0usize; size];
    for w in draws {
        counts[w.rank()] += 1;
    }
    let total = draws.len() as f64;
    let mut stat = 0.0;
    let mut cells = 0;
    for (w, p) in law.entries() {
        let expected = p.to_f64().unwrap() * total;
        if expected > 0.0 {
            let o = counts[w.rank()] as f64;
            stat += (o - expected).powi(2) / expected;
            cells += 1;
        }
    }
    // mass outside the support would be an outright failure
    let observed_in_support: usize = law.entries().iter().map(|(w, _)| counts[w.rank()]).sum();
    assert_eq!(observed_in_support, draws.len(), "draws outside the support");
    1.0 - ChiSquared::new((cells - 1) as f64).unwrap().cdf(stat)
}

#[test]
fn gsr_matches_riffle_measure() {
    for (n, k, seed) in [(4, 2, 11u64), (4, 3, 12), (5, 2, 13)] {
        let law = riffle_measure(n, k, &Limits::default()).unwrap();
        let draws = gsr_samples(n, k, 60_000, seed).unwrap();
        let p = p_value(&law, &draws);
        assert!(p > ALPHA, "n={n} k={k}: p = {p}");
    }
}

#[test]
fn gsr_orientation_is_pinned() {
    // the inverse law differs for n >= 3 and must be rejected
    let law = riffle_measure(5, 2, &Limits::default()).unwrap().invert();
    let draws = gsr_samples(5, 2, 60_000, 3).unwrap();
    let n = law.n();
    let support: std::collections::HashSet<Permutation> = law.entries().into_iter().map(|(w, _)| w).collect();
    let outside = draws.iter().any(|w| !support.contains(w));
    assert!(outside || p_value(&law, &draws) < ALPHA, "n={n}");
}

#[test]
fn affine_two_shuffle_sampler() {
    for (deck, seed) in [(4usize, 21u64), (5, 22)] {
        let law = affine_measure(deck, 2, AffineMethod::Partitions, &Limits::default()).unwrap();
        let draws = affine2_samples(deck, 60_000, seed).unwrap();
        let p = p_value(&law, &draws);
        assert!(p > ALPHA, "deck={deck}: p = {p}");
    }
}

#[test]
fn seeds_are_reproducible() {
    assert_eq!(gsr_samples(8, 3, 50, 5).unwrap(), gsr_samples(8, 3, 50, 5).unwrap());
    assert_ne!(gsr_samples(8, 3, 50, 5).unwrap(), gsr_samples(8, 3, 50, 6).unwrap());
    assert_eq!(affine2_samples(7, 50, 1).unwrap(), affine2_samples(7, 50, 1).unwrap());
}
