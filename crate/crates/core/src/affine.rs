//! Type A affine k-shuffles: four exact formulas and the physical 2-shuffle.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arith::{binomial, divisors, gcd, mobius, pow_big};
use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::measure::PermMeasure;
use crate::perm::Permutation;

/// Ramanujan sum C_r(m) via von Sterneck: Σ_{d | gcd(r, m)} μ(r/d)·d.
pub fn ramanujan_sum(r: u64, m: i64) -> i64 {
    assert!(r >= 1, "Ramanujan sums need r >= 1");
    let g = gcd(r as i64, m.abs()) as u64;
    divisors(g)
        .into_iter()
        .map(|d| mobius(r / d) * d as i64)
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AffineMethod {
    /// Integer vectors with a bounded spread.
    Vectors,
    /// Partitions in a box, sizes counted mod n.
    Partitions,
    /// Binomial sum against Ramanujan sums.
    Ramanujan,
    /// q-binomial coefficients, exponents counted mod n.
    Qbinom,
}

impl AffineMethod {
    pub const ALL: [AffineMethod; 4] = [
        AffineMethod::Vectors,
        AffineMethod::Partitions,
        AffineMethod::Ramanujan,
        AffineMethod::Qbinom,
    ];
}

impl fmt::Display for AffineMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            AffineMethod::Vectors => "vectors",
            AffineMethod::Partitions => "partitions",
            AffineMethod::Ramanujan => "ramanujan",
            AffineMethod::Qbinom => "qbinom",
        };
        f.write_str(s)
    }
}

impl FromStr for AffineMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "vectors" => Ok(AffineMethod::Vectors),
            "partitions" => Ok(AffineMethod::Partitions),
            "ramanujan" => Ok(AffineMethod::Ramanujan),
            "qbinom" => Ok(AffineMethod::Qbinom),
            other => Err(Error::Parse(format!("unknown affine method '{other}'"))),
        }
    }
}

/// The affine k-shuffle law on S_n. The count for w is stored on w⁻¹, so the result is
/// the law of the shuffled arrangement.
pub fn affine_measure(
    n: usize,
    k: usize,
    method: AffineMethod,
    limits: &Limits,
) -> Result<PermMeasure> {
    if n < 2 || k < 1 {
        return Err(Error::InvalidArgument(format!(
            "affine shuffles need n >= 2 and k >= 1, got n={n}, k={k}"
        )));
    }
    limits.check_enumeration(n)?;
    let norm = BigRational::from_integer(pow_big(k as i64, n - 1));
    let mut counter = Counter::new(n, k, method, limits);
    let mut out = PermMeasure::zero(n);
    for w in crate::perm::enumerate_sn(n, limits)? {
        let count = counter.count(&w)?;
        if !count.is_zero() {
            out.set(&w.inverse(), count / &norm);
        }
    }
    Ok(out)
}

/// Per-permutation count (times k^{n-1}) under one method, with method-specific caches.
struct Counter<'a> {
    n: usize,
    k: usize,
    method: AffineMethod,
    limits: &'a Limits,
    box_hist: HashMap<(usize, usize), Vec<BigInt>>,
}

impl<'a> Counter<'a> {
    fn new(n: usize, k: usize, method: AffineMethod, limits: &'a Limits) -> Self {
        Counter {
            n,
            k,
            method,
            limits,
            box_hist: HashMap::new(),
        }
    }

    fn count(&mut self, w: &Permutation) -> Result<BigRational> {
        let (n, k) = (self.n, self.k);
        let cd = w.cyclic_descent_count();
        let maj = w.major_index();
        Ok(match self.method {
            AffineMethod::Vectors => {
                BigRational::from_integer(BigInt::from(count_vectors(w, k, self.limits)?))
            }
            AffineMethod::Partitions => {
                if cd > k {
                    return Ok(BigRational::zero());
                }
                let hist = self
                    .box_hist
                    .entry((n - 1, k - cd))
                    .or_insert_with(|| box_partition_histogram(n - 1, k - cd, n));
                BigRational::from_integer(hist[(n - maj % n) % n].clone())
            }
            AffineMethod::Ramanujan => ramanujan_count(n, k, cd, maj),
            AffineMethod::Qbinom => {
                if cd > k {
                    return Ok(BigRational::zero());
                }
                let poly = q_binomial(k + n - cd - 1, n - 1);
                let total: BigInt = poly
                    .iter()
                    .enumerate()
                    .filter(|(e, _)| (e + maj).is_multiple_of(n))
                    .map(|(_, c)| c.clone())
                    .sum();
                BigRational::from_integer(total)
            }
        })
    }
}

/// Number of integer vectors v with Σv = 0, v weakly decreasing, v_1 - v_n ≤ k, strict
/// at the descents of w, and v_1 < v_n + k when w(n) > w(1).
fn count_vectors(w: &Permutation, k: usize, limits: &Limits) -> Result<u128> {
    let n = w.n();
    let line = w.one_line();
    let strict: Vec<bool> = (0..n - 1).map(|i| line[i] > line[i + 1]).collect();
    let wrap_strict = line[n - 1] > line[0];
    let k = k as i64;
    // v_1 is the largest entry and Σv = 0, so v_1 ≥ 0; v_n ≤ 0 and v_1 ≤ v_n + k give
    // v_1 ≤ k. Every entry then lies in [v_1 - k, v_1] ⊂ [-k, k], inside [-kn, kn].
    let mut nodes: u128 = 0;
    let mut total: u128 = 0;
    let mut v = vec![0i64; n];
    for v1 in 0..=k {
        v[0] = v1;
        let floor = v1 - k;
        debug_assert!(floor >= -k * n as i64 && v1 <= k * n as i64);
        walk(1, v1, floor, &strict, wrap_strict, k, &mut v, &mut nodes, &mut total);
        if nodes > limits.vector_budget {
            return Err(Error::Budget {
                needed: nodes,
                budget: limits.vector_budget,
            });
        }
    }
    Ok(total)
}

#[allow(clippy::too_many_arguments)]
fn walk(
    i: usize,
    sum: i64,
    floor: i64,
    strict: &[bool],
    wrap_strict: bool,
    k: i64,
    v: &mut [i64],
    nodes: &mut u128,
    total: &mut u128,
) {
    let n = v.len();
    *nodes += 1;
    if i == n {
        let spread = v[0] - v[n - 1];
        if sum == 0 && spread <= k && !(wrap_strict && spread >= k) {
            *total += 1;
        }
        return;
    }
    let ceil = if strict[i - 1] { v[i - 1] - 1 } else { v[i - 1] };
    let left = (n - i) as i64;
    for x in (floor..=ceil).rev() {
        // the remaining entries after this one lie in [floor, x]
        let s = sum + x;
        let rest = left - 1;
        if s + rest * x < 0 {
            break;
        }
        if s + rest * floor > 0 {
            continue;
        }
        v[i] = x;
        walk(i + 1, s, floor, strict, wrap_strict, k, v, nodes, total);
    }
}

/// Histogram, by size mod `modulus`, of partitions with at most `parts` parts each at
/// most `size`, by listing them.
pub fn box_partition_histogram(parts: usize, size: usize, modulus: usize) -> Vec<BigInt> {
    let mut hist = vec![BigInt::zero(); modulus];
    fn rec(parts_left: usize, max_part: usize, total: usize, modulus: usize, hist: &mut [BigInt]) {
        hist[total % modulus] += 1;
        if parts_left == 0 {
            return;
        }
        for p in 1..=max_part {
            rec(parts_left - 1, p, total + p, modulus, hist);
        }
    }
    rec(parts, size, 0, modulus, &mut hist);
    hist
}

fn ramanujan_count(n: usize, k: usize, cd: usize, maj: usize) -> BigRational {
    if cd > k {
        return BigRational::zero();
    }
    let b = k - cd;
    if b == 0 {
        return if maj.is_multiple_of(n) {
            BigRational::one()
        } else {
            BigRational::zero()
        };
    }
    let g = gcd(n as i64, b as i64) as u64;
    let sum: BigInt = divisors(g)
        .into_iter()
        .map(|r| {
            let r_us = r as usize;
            let top = ((n + b - r_us) / r_us) as i64;
            let bottom = (b / r_us) as i64;
            binomial(top, bottom) * ramanujan_sum(r, -(maj as i64))
        })
        .sum();
    BigRational::new(sum, BigInt::from(n))
}

/// Coefficients of the Gaussian binomial [a choose b]_q, from the product formula
/// with exact division by each (1 - q^i).
pub fn q_binomial(a: usize, b: usize) -> Vec<BigInt> {
    if b > a {
        return vec![BigInt::zero()];
    }
    let mut poly = vec![BigInt::one()];
    for i in 1..=b {
        poly = mul_one_minus_q_pow(&poly, a - b + i);
        poly = div_one_minus_q_pow(&poly, i);
    }
    poly
}

fn mul_one_minus_q_pow(p: &[BigInt], e: usize) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); p.len() + e];
    for (j, c) in p.iter().enumerate() {
        out[j] += c;
        out[j + e] -= c;
    }
    out
}

fn div_one_minus_q_pow(p: &[BigInt], e: usize) -> Vec<BigInt> {
    // r(q)(1 - q^e) = p(q): r_j = p_j + r_{j-e}
    let deg = p.len() - e;
    let mut r: Vec<BigInt> = Vec::with_capacity(deg);
    for j in 0..deg {
        let mut c = p[j].clone();
        if j >= e {
            c += &r[j - e];
        }
        r.push(c);
    }
    for j in deg..p.len() {
        let mut c = p[j].clone();
        if j >= e {
            c += &r[j - e];
        }
        assert!(c.is_zero(), "(1 - q^{e}) does not divide the polynomial");
    }
    r
}

/// Exact law of the physical affine 2-shuffle on a deck of `deck` cards, by summing
/// over every split and every interleaving.
pub fn affine2_law(deck: usize, limits: &Limits) -> Result<PermMeasure> {
    if deck < 2 {
        return Err(Error::InvalidArgument("affine 2-shuffles need a deck of at least 2".into()));
    }
    limits.check_enumeration(deck)?;
    let mut out = PermMeasure::zero(deck);
    let split_den = pow_big(2, deck - 1);
    for j in 0..=deck / 2 {
        let (first, second) = affine2_packets(deck, j);
        let weight = BigRational::new(binomial(deck as i64, 2 * j as i64), split_den.clone());
        let interleavings = binomial(deck as i64, 2 * j as i64);
        let each = weight / BigRational::from_integer(interleavings);
        for mask in interleavings_of(deck, 2 * j) {
            out.add_to(&merge(&first, &second, &mask), &each);
        }
    }
    Ok(out)
}

/// Packet 1 (the middle of the deck) and packet 2 (the bottom j cards placed on the top
/// j cards), both listed top to bottom as zero-based card labels.
fn affine2_packets(deck: usize, j: usize) -> (Vec<usize>, Vec<usize>) {
    let first: Vec<usize> = (j..deck - j).collect();
    let second: Vec<usize> = (deck - j..deck).chain(0..j).collect();
    (first, second)
}

/// All boolean masks of length `len` with exactly `ones` set entries.
fn interleavings_of(len: usize, ones: usize) -> Vec<Vec<bool>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(len);
    fn rec(len: usize, ones: usize, cur: &mut Vec<bool>, out: &mut Vec<Vec<bool>>) {
        let placed = cur.iter().filter(|b| **b).count();
        if cur.len() == len {
            if placed == ones {
                out.push(cur.clone());
            }
            return;
        }
        if placed < ones {
            cur.push(true);
            rec(len, ones, cur, out);
            cur.pop();
        }
        if cur.len() - placed < len - ones {
            cur.push(false);
            rec(len, ones, cur, out);
            cur.pop();
        }
    }
    rec(len, ones, &mut cur, &mut out);
    out
}

/// Arrangement (position -> card) taking from `second` where the mask is set.
fn merge(first: &[usize], second: &[usize], mask: &[bool]) -> Permutation {
    let (mut a, mut b) = (first.iter(), second.iter());
    let images = mask
        .iter()
        .map(|&m| if m { *b.next().unwrap() } else { *a.next().unwrap() })
        .collect();
    Permutation::from_zero_based(images)
}

/// One physical affine 2-shuffle of a deck of `deck` cards; returns the arrangement.
pub fn affine2_sample(deck: usize, seed: u64) -> Result<Permutation> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    affine2_with(deck, &mut rng)
}

pub fn affine2_samples(deck: usize, count: usize, seed: u64) -> Result<Vec<Permutation>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| affine2_with(deck, &mut rng)).collect()
}

fn affine2_with(deck: usize, rng: &mut impl Rng) -> Result<Permutation> {
    if deck < 2 {
        return Err(Error::InvalidArgument("affine 2-shuffles need a deck of at least 2".into()));
    }
    // Flipping a fair coin for each card and keeping the parity of the head count
    // picks 2j with probability C(deck, 2j)/2^{deck-1}.
    let heads = loop {
        let h = (0..deck).filter(|_| rng.gen_bool(0.5)).count();
        if h % 2 == 0 {
            break h;
        }
    };
    let j = heads / 2;
    let (first, second) = affine2_packets(deck, j);
    let (mut a, mut b) = (first.len(), second.len());
    let mut mask = Vec::with_capacity(deck);
    while a + b > 0 {
        let from_second = rng.gen_range(0..a + b) >= a;
        mask.push(from_second);
        if from_second {
            b -= 1;
        } else {
            a -= 1;
        }
    }
    Ok(merge(&first, &second, &mask))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{euler_phi, rat};

    fn lim() -> Limits {
        Limits::default()
    }

    fn p(v: &[usize]) -> Permutation {
        Permutation::from_one_line(v).unwrap()
    }

    #[test]
    fn ramanujan_examples() {
        for m in -5..=5 {
            assert_eq!(ramanujan_sum(1, m), 1);
        }
        assert_eq!(ramanujan_sum(6, 0), 2);
        assert_eq!(ramanujan_sum(4, 2), -2);
        for r in 1..=30 {
            assert_eq!(ramanujan_sum(r, 0), euler_phi(r) as i64);
        }
    }

    #[test]
    fn ramanujan_matches_exponential_sum() {
        for r in 1..=12u64 {
            for m in -15..=15i64 {
                let mut re = 0.0f64;
                for l in 1..=r {
                    if gcd(l as i64, r as i64) == 1 {
                        let theta = 2.0 * std::f64::consts::PI * (l as f64) * (m as f64) / r as f64;
                        re += theta.cos();
                    }
                }
                assert!((re - ramanujan_sum(r, m) as f64).abs() < 1e-9, "r={r} m={m}");
            }
        }
    }

    #[test]
    fn ramanujan_sums_over_a_period_vanish() {
        for r in 2..=50u64 {
            let s: i64 = (0..r as i64).map(|j| ramanujan_sum(r, j)).sum();
            assert_eq!(s, 0);
        }
    }

    #[test]
    fn q_binomial_examples() {
        let to_i = |v: Vec<BigInt>| v.into_iter().map(|c| i64::try_from(c).unwrap()).collect::<Vec<_>>();
        assert_eq!(to_i(q_binomial(4, 2)), vec![1, 1, 2, 1, 1]);
        assert_eq!(to_i(q_binomial(3, 0)), vec![1]);
        assert_eq!(to_i(q_binomial(2, 3)), vec![0]);
        let total: BigInt = q_binomial(9, 4).into_iter().sum();
        assert_eq!(total, binomial(9, 4));
    }

    #[test]
    fn box_conjugation_symmetry() {
        for a in 0..6 {
            for b in 0..6 {
                for m in 1..7 {
                    assert_eq!(box_partition_histogram(a, b, m), box_partition_histogram(b, a, m));
                }
            }
        }
    }

    #[test]
    fn small_examples() {
        for method in AffineMethod::ALL {
            let m = affine_measure(2, 2, method, &lim()).unwrap();
            assert_eq!(m, PermMeasure::uniform(2, &lim()).unwrap(), "{method}");
            let m = affine_measure(3, 2, method, &lim()).unwrap();
            for (w, c) in m.entries() {
                assert!(w.inverse().cyclic_descent_count() == 1 || w == p(&[3, 2, 1]));
                assert_eq!(c, rat(1, 4));
            }
            assert_eq!(m.support_len(), 4);
        }
    }

    #[test]
    fn k_equal_one_is_identity() {
        for n in 2..=5 {
            for method in AffineMethod::ALL {
                let m = affine_measure(n, 1, method, &lim()).unwrap();
                assert_eq!(m, PermMeasure::identity(n), "{method} n={n}");
            }
        }
    }

    #[test]
    fn methods_agree_small() {
        for n in 2..=5 {
            for k in 1..=4 {
                let base = affine_measure(n, k, AffineMethod::Partitions, &lim()).unwrap();
                assert!(base.is_probability(), "n={n} k={k}");
                for method in AffineMethod::ALL {
                    assert_eq!(affine_measure(n, k, method, &lim()).unwrap(), base, "{method} n={n} k={k}");
                }
            }
        }
    }

    #[test]
    fn vector_budget_is_enforced() {
        let tight = Limits {
            vector_budget: 10,
            ..Limits::default()
        };
        let err = affine_measure(5, 4, AffineMethod::Vectors, &tight).unwrap_err();
        assert!(err.is_cap_violation());
    }

    #[test]
    fn physical_two_shuffle_law() {
        for deck in 2..=6 {
            let law = affine2_law(deck, &lim()).unwrap();
            assert!(law.is_probability());
            let formula = affine_measure(deck, 2, AffineMethod::Partitions, &lim()).unwrap();
            assert_eq!(law, formula, "deck={deck}");
        }
    }

    #[test]
    fn zero_split_keeps_deck() {
        let (first, second) = affine2_packets(5, 0);
        assert!(second.is_empty());
        assert!(merge(&first, &second, &[false; 5]).is_identity());
    }
}
