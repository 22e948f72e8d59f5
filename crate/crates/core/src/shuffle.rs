//! Riffle shuffles, cuts, and their total variation distance to uniform.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::arith::{binomial, factorial, pow_big};
use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::measure::{distance_to_uniform, PermMeasure};
use crate::perm::{cyclic_descent_row, eulerian_row, Permutation};

fn check_nk(n: usize, k: usize) -> Result<()> {
    if n == 0 || k == 0 {
        return Err(Error::InvalidArgument(format!(
            "need n >= 1 and k >= 1, got n={n}, k={k}"
        )));
    }
    Ok(())
}

/// The k-riffle (GSR) law: w gets C(n+k-d(w⁻¹)-1, n)/kⁿ.
pub fn riffle_measure(n: usize, k: usize, limits: &Limits) -> Result<PermMeasure> {
    check_nk(n, k)?;
    let den = BigRational::from_integer(pow_big(k as i64, n));
    PermMeasure::from_fn(n, limits, |w| {
        let d = w.inverse().descent_count() as i64;
        BigRational::from_integer(binomial((n + k) as i64 - d - 1, n as i64)) / &den
    })
}

/// Uniform measure on the n rotations ζ⁰, …, ζⁿ⁻¹.
pub fn cut_measure(n: usize) -> Result<PermMeasure> {
    check_nk(n, 1)?;
    let mass = BigRational::new(BigInt::one(), BigInt::from(n));
    PermMeasure::from_entries(n, (0..n).map(|i| (Permutation::rotation(n, i), mass.clone())))
}

/// Riffle then cut: w gets C(n+k-cd(w⁻¹)-1, n-1)/(n·k^{n-1}).
pub fn shuffle_then_cut_measure(n: usize, k: usize, limits: &Limits) -> Result<PermMeasure> {
    check_nk(n, k)?;
    let den = BigRational::from_integer(pow_big(k as i64, n - 1) * n);
    PermMeasure::from_fn(n, limits, |w| {
        let cd = w.inverse().cyclic_descent_count() as i64;
        BigRational::from_integer(binomial((n + k) as i64 - cd - 1, n as i64 - 1)) / &den
    })
}

/// One GSR k-shuffle of the deck 1..n; returns the arrangement, position i holding card w(i).
///
/// Each card picks one of k packets uniformly, which makes the packet sizes multinomial;
/// then cards are dropped one at a time from a packet chosen with probability proportional
/// to its remaining size.
pub fn gsr_sample(n: usize, k: usize, seed: u64) -> Result<Permutation> {
    check_nk(n, k)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(gsr_with(n, k, &mut rng))
}

/// Many independent GSR samples from one seeded stream.
pub fn gsr_samples(n: usize, k: usize, count: usize, seed: u64) -> Result<Vec<Permutation>> {
    check_nk(n, k)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..count).map(|_| gsr_with(n, k, &mut rng)).collect())
}

pub(crate) fn gsr_with(n: usize, k: usize, rng: &mut impl Rng) -> Permutation {
    let mut sizes = vec![0usize; k];
    for _ in 0..n {
        sizes[rng.gen_range(0..k)] += 1;
    }
    // next card to leave each packet, packets being consecutive blocks of the deck
    let mut next = Vec::with_capacity(k);
    let mut start = 0;
    for &s in &sizes {
        next.push(start);
        start += s;
    }
    let mut remaining = n;
    let mut out = Vec::with_capacity(n);
    while remaining > 0 {
        let mut pick = rng.gen_range(0..remaining);
        let mut j = 0;
        while pick >= sizes[j] {
            pick -= sizes[j];
            j += 1;
        }
        out.push(next[j]);
        next[j] += 1;
        sizes[j] -= 1;
        remaining -= 1;
    }
    Permutation::from_zero_based(out)
}

/// One step of a shuffling schedule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShuffleStep {
    Riffle(usize),
    Cut,
}

/// Law of the deck after applying `steps` in order (first step first).
pub fn schedule_measure(n: usize, steps: &[ShuffleStep], limits: &Limits) -> Result<PermMeasure> {
    let mut law = PermMeasure::identity(n);
    for step in steps {
        let m = match *step {
            ShuffleStep::Riffle(k) => riffle_measure(n, k, limits)?,
            ShuffleStep::Cut => cut_measure(n)?,
        };
        law = m.convolve(&law)?;
    }
    Ok(law)
}

/// Seeded random schedule of `len` steps mixing riffles (k drawn from `ks`) and cuts.
pub fn random_schedule(len: usize, ks: &[usize], seed: u64) -> Vec<ShuffleStep> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..len)
        .map(|_| {
            if rng.gen_bool(0.4) {
                ShuffleStep::Cut
            } else {
                ShuffleStep::Riffle(ks[rng.gen_range(0..ks.len())])
            }
        })
        .collect()
}

/// TV(W, U) on S_n for the schedule, and TV(W', U) on S_{n-1} with the cuts deleted.
pub fn cut_deletion_distances(
    n: usize,
    steps: &[ShuffleStep],
    limits: &Limits,
) -> Result<(BigRational, BigRational)> {
    if n < 2 {
        return Err(Error::InvalidArgument("cut deletion needs n >= 2".into()));
    }
    let full = distance_to_uniform(&schedule_measure(n, steps, limits)?)?;
    let riffles: Vec<ShuffleStep> = steps
        .iter()
        .copied()
        .filter(|s| *s != ShuffleStep::Cut)
        .collect();
    let reduced = distance_to_uniform(&schedule_measure(n - 1, &riffles, limits)?)?;
    Ok((full, reduced))
}

/// TV(riffle(n, kᵐ), U) for m = 1..=max_shuffles, from Eulerian numbers.
///
/// With `with_cut` the law is riffle-then-cut and the sum runs over cyclic descent
/// numbers instead. No enumeration, so any n is fine.
pub fn tv_riffle_table(
    n: usize,
    k: usize,
    max_shuffles: usize,
    with_cut: bool,
) -> Result<Vec<BigRational>> {
    check_nk(n, k)?;
    let inv_fact = BigRational::new(BigInt::one(), factorial(n));
    if with_cut && n == 1 {
        return Ok(vec![BigRational::zero(); max_shuffles]);
    }
    let row = if with_cut {
        cyclic_descent_row(n)
    } else {
        eulerian_row(n)
    };
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let entries = (1..=max_shuffles)
        .into_par_iter()
        .map(|m| {
            let big_k = num_traits::pow(BigInt::from(k), m);
            let (den, bottom) = if with_cut {
                (num_traits::pow(big_k.clone(), n - 1) * n, n - 1)
            } else {
                (num_traits::pow(big_k.clone(), n), n)
            };
            let den = BigRational::from_integer(den);
            let mut l1 = BigRational::zero();
            for (i, count) in row.iter().enumerate().skip(1) {
                if count.is_zero() {
                    continue;
                }
                // C(K+n-i, n) or C(K+n-i-1, n-1), as a polynomial-free product
                let top = &big_k + BigInt::from(bottom) - BigInt::from(i);
                let p = BigRational::from_integer(big_binomial(&top, bottom)) / &den;
                l1 += (p - &inv_fact).abs() * BigRational::from_integer(count.clone());
            }
            l1 * &half
        })
        .collect();
    Ok(entries)
}

/// C(top, bottom) for a big nonnegative-or-negative `top`, zero when top < bottom.
fn big_binomial(top: &BigInt, bottom: usize) -> BigInt {
    if top < &BigInt::from(bottom) {
        return BigInt::zero();
    }
    let mut acc = BigInt::one();
    for j in 0..bottom {
        acc *= top - j;
        acc /= j + 1;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;
    use crate::measure::total_variation;

    fn p(v: &[usize]) -> Permutation {
        Permutation::from_one_line(v).unwrap()
    }

    fn lim() -> Limits {
        Limits::default()
    }

    #[test]
    fn riffle_examples() {
        let r = riffle_measure(2, 2, &lim()).unwrap();
        assert_eq!(r.coeff(&p(&[1, 2])), rat(3, 4));
        assert_eq!(r.coeff(&p(&[2, 1])), rat(1, 4));
        let r = riffle_measure(3, 2, &lim()).unwrap();
        assert_eq!(r.coeff(&p(&[1, 2, 3])), rat(1, 2));
        assert_eq!(r.coeff(&p(&[3, 2, 1])), BigRational::zero());
        assert_eq!(r.support_len(), 5);
        assert!(r.is_probability());
        assert_eq!(riffle_measure(4, 1, &lim()).unwrap(), PermMeasure::identity(4));
    }

    #[test]
    fn cut_examples() {
        assert_eq!(cut_measure(1).unwrap(), PermMeasure::identity(1));
        assert_eq!(cut_measure(2).unwrap(), PermMeasure::uniform(2, &lim()).unwrap());
        let c = cut_measure(3).unwrap();
        for w in [[1, 2, 3], [2, 3, 1], [3, 1, 2]] {
            assert_eq!(c.coeff(&p(&w)), rat(1, 3));
        }
        for n in 1..=5 {
            let c = cut_measure(n).unwrap();
            assert_eq!(c.convolve(&c).unwrap(), c);
        }
    }

    #[test]
    fn shuffle_then_cut_examples() {
        let u2 = PermMeasure::uniform(2, &lim()).unwrap();
        assert_eq!(shuffle_then_cut_measure(2, 2, &lim()).unwrap(), u2);
        let m = shuffle_then_cut_measure(3, 2, &lim()).unwrap();
        for (w, c) in m.entries() {
            let expect = if w.inverse().cyclic_descent_count() == 1 {
                rat(1, 4)
            } else {
                rat(1, 12)
            };
            assert_eq!(c, expect);
        }
        assert_eq!(shuffle_then_cut_measure(4, 1, &lim()).unwrap(), cut_measure(4).unwrap());
    }

    #[test]
    fn cut_after_riffle_matches_closed_form() {
        for n in 1..=5 {
            for k in 1..=3 {
                let cs = cut_measure(n)
                    .unwrap()
                    .convolve(&riffle_measure(n, k, &lim()).unwrap())
                    .unwrap();
                assert_eq!(cs, shuffle_then_cut_measure(n, k, &lim()).unwrap(), "n={n} k={k}");
            }
        }
    }

    #[test]
    fn riffle_convolution_property() {
        for n in 1..=4 {
            for k1 in 1..=3 {
                for k2 in 1..=3 {
                    let a = riffle_measure(n, k1, &lim()).unwrap();
                    let b = riffle_measure(n, k2, &lim()).unwrap();
                    assert_eq!(a.convolve(&b).unwrap(), riffle_measure(n, k1 * k2, &lim()).unwrap());
                }
            }
        }
    }

    #[test]
    fn gsr_arrangements_have_few_rising_sequences() {
        for seed in 0..200 {
            let w = gsr_sample(6, 3, seed).unwrap();
            assert!(w.inverse().descent_count() <= 2);
        }
        assert!(gsr_sample(5, 1, 9).unwrap().is_identity());
        assert_eq!(gsr_sample(7, 2, 4).unwrap(), gsr_sample(7, 2, 4).unwrap());
    }

    #[test]
    fn tv_table_examples() {
        assert_eq!(tv_riffle_table(2, 2, 1, false).unwrap(), vec![rat(1, 4)]);
        let table = tv_riffle_table(4, 2, 4, false).unwrap();
        for (m, entry) in table.iter().enumerate() {
            let k = 2usize.pow(m as u32 + 1);
            let oracle = total_variation(
                &riffle_measure(4, k, &lim()).unwrap(),
                &PermMeasure::uniform(4, &lim()).unwrap(),
            )
            .unwrap();
            assert_eq!(entry, &oracle);
        }
        let cut = tv_riffle_table(4, 3, 3, true).unwrap();
        for (m, entry) in cut.iter().enumerate() {
            let k = 3usize.pow(m as u32 + 1);
            let oracle = distance_to_uniform(&shuffle_then_cut_measure(4, k, &lim()).unwrap()).unwrap();
            assert_eq!(entry, &oracle);
        }
    }

    #[test]
    fn schedules_compose_in_order() {
        let steps = [ShuffleStep::Riffle(2), ShuffleStep::Cut];
        let law = schedule_measure(4, &steps, &lim()).unwrap();
        assert_eq!(law, shuffle_then_cut_measure(4, 2, &lim()).unwrap());
        let s = random_schedule(6, &[2, 3], 11);
        assert_eq!(s, random_schedule(6, &[2, 3], 11));
    }
}
