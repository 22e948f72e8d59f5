//! Exhaustive probes of the major-index equidistribution problem, class-level
//! comparisons of affine shuffles with riffle-then-cut, and modular reciprocity.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::affine::{affine_measure, AffineMethod};
use crate::arith::{divisors, gcd, is_prime_power, mobius, prime_power};
use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::perm::{enumerate_sn, CycleType, Permutation};
use crate::polyfactor::class_measure;
use crate::report::{CheckResult, Report};
use crate::series::{SeriesRing, TruncatedSeries};
use crate::shuffle::shuffle_then_cut_measure;

/// Largest t dividing n with gcd(cd - 1, t) = 1.
pub fn largest_divisor_t(n: usize, cd: usize) -> usize {
    assert!(n >= 1);
    let c = cd as i64 - 1;
    divisors(n as u64)
        .into_iter()
        .rev()
        .find(|&t| gcd(c, t as i64) == 1)
        .unwrap() as usize
}

/// One (conjugacy class, cd) cell of the equidistribution probe.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MajResidueCell {
    pub class: CycleType,
    pub cd: usize,
    pub t: usize,
    /// Number of permutations in the cell with maj ≡ r (mod t), r = 0..t.
    pub residues: Vec<u64>,
    pub passed: bool,
}

/// Tallies maj mod t over every (class, cd) cell of S_n. Cells with no permutations
/// do not appear and pass vacuously.
pub fn maj_residue_cells(n: usize, limits: &Limits) -> Result<Vec<MajResidueCell>> {
    if n > 8 {
        return Err(Error::EnumerationCap { n, cap: 8 });
    }
    let mut tally: BTreeMap<(CycleType, usize), Vec<u64>> = BTreeMap::new();
    for w in enumerate_sn(n, limits)? {
        let cd = w.cyclic_descent_count();
        let t = largest_divisor_t(n, cd);
        let slot = tally
            .entry((w.cycle_type(), cd))
            .or_insert_with(|| vec![0; t]);
        slot[w.major_index() % t] += 1;
    }
    Ok(tally
        .into_iter()
        .map(|((class, cd), residues)| {
            let passed = residues.iter().all(|&c| c == residues[0]);
            MajResidueCell {
                t: residues.len(),
                class,
                cd,
                residues,
                passed,
            }
        })
        .collect())
}

pub fn maj_residue_report(n: usize, limits: &Limits) -> Result<Report> {
    let mut report = Report::new(format!("maj equidistribution mod t, n={n}"));
    for cell in maj_residue_cells(n, limits)? {
        let counts: Vec<String> = cell.residues.iter().map(u64::to_string).collect();
        let mut detail = format!("t={} counts {}", cell.t, counts.join(","));
        let parts = cell.class.parts();
        if parts.iter().all(|&p| p == 1) || (parts.first() == Some(&2) && parts.iter().skip(1).all(|&p| p == 1)) {
            detail.push_str("; known case");
        }
        report.check(format!("class {} cd={}", cell.class, cell.cd), cell.passed, detail);
    }
    Ok(report)
}

/// Result of comparing the two class laws.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassComparison {
    pub n: usize,
    pub q: usize,
    pub in_hypothesis: bool,
    pub max_discrepancy: BigRational,
}

/// Max over cycle types of |affine(n,q) − riffle-then-cut(n,q)| after lumping.
pub fn class_compare(n: usize, q: usize, limits: &Limits) -> Result<ClassComparison> {
    let affine = class_measure(&affine_measure(n, q, AffineMethod::Partitions, limits)?)?;
    let cs = class_measure(&shuffle_then_cut_measure(n, q, limits)?)?;
    Ok(ClassComparison {
        n,
        q,
        in_hypothesis: gcd(n as i64, q as i64 - 1) == 1,
        max_discrepancy: affine.max_abs_diff(&cs),
    })
}

/// Pointwise equality of affine q-shuffles and riffle-then-cut, for n prime and q a power of n.
pub fn obvious_check(n: usize, q: usize, limits: &Limits) -> Result<bool> {
    match prime_power(q as u64) {
        Some((p, _)) if p == n as u64 => {}
        _ => {
            return Err(Error::Hypothesis(format!(
                "need n prime and q a power of n, got n={n}, q={q}"
            )))
        }
    }
    let affine = affine_measure(n, q, AffineMethod::Ramanujan, limits)?;
    Ok(affine == shuffle_then_cut_measure(n, q, limits)?)
}

/// Checks r | t for all n ≤ n_max, prime powers q ≤ q_max with gcd(n, q−1) = 1,
/// 1 ≤ cd ≤ n and r dividing both n and q − cd.
pub fn divisibility_scan(n_max: usize, q_max: usize) -> Report {
    let mut report = Report::new(format!("divisibility scan, n<={n_max}, q<={q_max}"));
    let mut cases = 0u64;
    let mut bad = Vec::new();
    for n in 1..=n_max {
        for q in (2..=q_max).filter(|&q| is_prime_power(q as u64)) {
            if gcd(n as i64, q as i64 - 1) != 1 {
                continue;
            }
            for cd in 1..=n {
                let t = largest_divisor_t(n, cd);
                for r in divisors(n as u64) {
                    let r = r as i64;
                    if (q as i64 - cd as i64) % r == 0 {
                        cases += 1;
                        if t as i64 % r != 0 {
                            bad.push(format!("n={n} q={q} cd={cd} r={r} t={t}"));
                        }
                    }
                }
            }
        }
    }
    report.check(
        "r divides t",
        bad.is_empty(),
        if bad.is_empty() {
            format!("{cases} cases")
        } else {
            bad.join("; ")
        },
    );
    report
}

/// Σ_{w transposition, cd(w) = cd} x^{maj(w) mod n}, coefficients indexed by exponent.
pub fn transposition_maj_poly(n: usize, cd: usize) -> Vec<i64> {
    let mut poly = vec![0i64; n];
    for i in 1..=n {
        for j in i + 1..=n {
            let mut line: Vec<usize> = (1..=n).collect();
            line.swap(i - 1, j - 1);
            let w = Permutation::from_one_line(&line).unwrap();
            if w.cyclic_descent_count() == cd {
                poly[w.major_index() % n] += 1;
            }
        }
    }
    poly
}

/// Exact division of integer polynomials (low degree first); None if a remainder is left.
pub fn poly_div_exact(num: &[i64], den: &[i64]) -> Option<Vec<i64>> {
    let mut rem = num.to_vec();
    while rem.len() > 1 && *rem.last().unwrap() == 0 {
        rem.pop();
    }
    let dd = den.len() - 1;
    let lead = *den.last().unwrap();
    if rem.len() <= dd {
        return if rem.iter().all(|&c| c == 0) { Some(vec![0]) } else { None };
    }
    let mut quo = vec![0i64; rem.len() - dd];
    for i in (dd..rem.len()).rev() {
        if rem[i] % lead != 0 {
            return None;
        }
        let c = rem[i] / lead;
        quo[i - dd] = c;
        for (j, &d) in den.iter().enumerate() {
            rem[i - dd + j] -= c * d;
        }
    }
    if rem.iter().all(|&c| c == 0) {
        Some(quo)
    } else {
        None
    }
}

/// Checks of the transposition-class computations: the odd closed form, and for
/// even n the divisibility by (x^m − 1)/(x − 1), m the odd part of n.
pub fn transposition_report(ns: &[usize]) -> Report {
    let mut report = Report::new("transposition class");
    for &n in ns {
        let cd2 = transposition_maj_poly(n, 2);
        report.check(
            format!("n={n} cd=2 hits every residue once"),
            n < 4 || cd2.iter().all(|&c| c == 1),
            format!("{cd2:?}"),
        );
        let p = transposition_maj_poly(n, 3);
        let shown = format!("{p:?}");
        if n % 2 == 1 {
            let expect = vec![((n - 3) / 2) as i64; n];
            report.check(format!("n={n} cd=3 equals (n-3)/2 (x^n-1)/(x-1)"), p == expect, shown);
        } else {
            let mut m = n;
            while m % 2 == 0 {
                m /= 2;
            }
            let geometric = |len: usize, step: usize| {
                let mut v = vec![0i64; (len - 1) * step + 1];
                for j in 0..len {
                    v[j * step] = 1;
                }
                v
            };
            let base = geometric(m, 1);
            report.check(
                format!("n={n} cd=3 divisible by (x^{m}-1)/(x-1)"),
                poly_div_exact(&p, &base).is_some(),
                shown.clone(),
            );
            let cofactor = geometric(n / m, m);
            report.check(
                format!("n={n} x+1 divides 1+x^{m}+...+x^{}", n - m),
                poly_div_exact(&cofactor, &[1, 1]).is_some(),
                "",
            );
            report.check(
                format!("n={n} t=1 for cd=3"),
                largest_divisor_t(n, 3) == m,
                format!("t={}", largest_divisor_t(n, 3)),
            );
            // ((n-4)/2)(x^n - 1)/(x - 1) + x(x^n - 1)/(x^2 - 1)
            let closed: Vec<i64> = (0..n).map(|e| (n as i64 - 4) / 2 + (e % 2) as i64).collect();
            report.check(
                format!("n={n} cd=3 equals (n-4)/2 (x^n-1)/(x-1) + x(x^n-1)/(x^2-1)"),
                p == closed,
                shown.clone(),
            );
            let printed: Vec<i64> = (0..n).map(|e| if e % 2 == 0 { -1 } else { 0 }).collect();
            report.push(
                CheckResult::new(
                    format!("n={n} cd=3 equals printed -(x^n-1)/(x^2-1)"),
                    p == printed,
                    shown,
                )
                .known_defect(),
            );
        }
    }
    report
}

/// Multisets of x elements of {0..y−1} whose sum is ≡ m (mod y).
pub fn modular_reciprocity_count(m: i64, x: usize, y: usize) -> BigInt {
    assert!(x >= 1 && y >= 1);
    // dp[c][s]: multisets of size c using the values seen so far, sum ≡ s
    let mut dp = vec![vec![BigInt::zero(); y]; x + 1];
    dp[0][0] = BigInt::one();
    for v in 0..y {
        // unbounded copies of v
        for c in 1..=x {
            for s in 0..y {
                let prev = (s + y - v % y) % y;
                let add = dp[c - 1][prev].clone();
                dp[c][s] += add;
            }
        }
    }
    dp[x][m.rem_euclid(y as i64) as usize].clone()
}

/// Both sides of the reciprocity statement for (m, x, y).
pub fn reciprocity_pair(m: i64, x: usize, y: usize) -> (BigInt, BigInt) {
    (
        modular_reciprocity_count(m, x, y),
        modular_reciprocity_count(m, y, x),
    )
}

/// Coefficient of z^m in (1 + z + … + z^{k−1})^d.
pub fn f_coefficient(m: usize, k: usize, d: usize) -> BigInt {
    if k == 0 {
        return if m == 0 && d == 0 { BigInt::one() } else { BigInt::zero() };
    }
    let mut poly = vec![BigInt::one()];
    for _ in 0..d {
        let mut next = vec![BigInt::zero(); poly.len() + k - 1];
        for (i, c) in poly.iter().enumerate() {
            for j in 0..k {
                next[i + j] += c;
            }
        }
        poly = next;
    }
    poly.get(m).cloned().unwrap_or_else(BigInt::zero)
}

/// Polynomial in x_1..x_n keyed by exponent vector.
pub type XPoly = BTreeMap<Vec<u32>, BigRational>;

/// How the exponent of (1 − q^m x_i u^i) on the right side is read.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExponentReading {
    /// (1/i) Σ_{d|i} μ(d) f_{m,k,i/d}, as displayed.
    Printed,
    /// (1/i) Σ_{d | gcd(i,m)} μ(d) f_{m/d,k,i/d}, primitive necklaces of weight m.
    Necklace,
}

/// Left side of the grand identity at (n, k): the u^n t^k coefficient, with
/// q-exponents ≡ 0 mod n summed out.
pub fn grand_lhs(n: usize, k: usize, q_cap: usize, limits: &Limits) -> Result<XPoly> {
    // group S_n by (cycle type, cd, maj)
    let mut cells: BTreeMap<(Vec<u32>, usize, usize), u64> = BTreeMap::new();
    for w in enumerate_sn(n, limits)? {
        let mults: Vec<u32> = w.cycle_type().mults().iter().map(|&m| m as u32).collect();
        *cells
            .entry((mults, w.cyclic_descent_count(), w.major_index()))
            .or_insert(0) += 1;
    }
    let max_maj = n * (n - 1) / 2;
    let needed = max_maj + k * n;
    if needed > q_cap {
        return Err(Error::Truncation(format!(
            "left side needs q-degree {needed}, cap is {q_cap}"
        )));
    }
    let ring = SeriesRing::builder()
        .var("q")
        .var("t")
        .cap("q", q_cap as u32)
        .cap("t", k as u32)
        .build()?;
    // 1/((1 - tq)(1 - tq^2)...(1 - tq^n))
    let one = TruncatedSeries::one(&ring);
    let mut denom_inv = one.clone();
    for j in 1..=n {
        let f = &one - &TruncatedSeries::term(&ring, &[("t", 1), ("q", j as u32)], BigRational::one())?;
        denom_inv = &denom_inv * &f.inverse()?;
    }
    let mut out = XPoly::new();
    for ((mults, cd, maj), count) in cells {
        if cd > k {
            continue;
        }
        // coefficient of t^{k−cd} q^e in denom_inv, shifted by q^maj
        let mut hits = BigRational::zero();
        for (exps, c) in denom_inv.terms() {
            let (qe, te) = (exps[0] as usize, exps[1] as usize);
            if te == k - cd && (qe + maj) % n == 0 {
                hits += c;
            }
        }
        if !hits.is_zero() {
            *out.entry(mults).or_insert_with(BigRational::zero) += hits * BigRational::from_integer(count.into());
        }
    }
    out.retain(|_, c| !c.is_zero());
    Ok(out)
}

/// Right side at (n, k), k ≥ 2: u^n coefficient of Π_i Π_m (1 − q^m x_i u^i)^{−E(i,m)},
/// with q-exponents ≡ 0 mod (k − 1) summed out.
pub fn grand_rhs(n: usize, k: usize, q_cap: usize, reading: ExponentReading) -> Result<XPoly> {
    if k < 2 {
        return Err(Error::InvalidArgument(
            "the right side sums exponents mod k-1 and needs k >= 2".into(),
        ));
    }
    let needed = (k - 1) * n;
    if needed > q_cap {
        return Err(Error::Truncation(format!(
            "right side needs q-degree {needed}, cap is {q_cap}"
        )));
    }
    let ring = x_ring(n, q_cap)?;
    let one = TruncatedSeries::one(&ring);
    let mut prod = one.clone();
    for i in 1..=n {
        for m in 1..=(k - 1) * i {
            let mut e = BigInt::zero();
            for d in divisors(i as u64) {
                let d_us = d as usize;
                e += match reading {
                    ExponentReading::Printed => f_coefficient(m, k, i / d_us) * mobius(d),
                    ExponentReading::Necklace if m % d_us == 0 => {
                        f_coefficient(m / d_us, k, i / d_us) * mobius(d)
                    }
                    ExponentReading::Necklace => BigInt::zero(),
                };
            }
            if e.is_zero() {
                continue;
            }
            let e = BigRational::new(e, BigInt::from(i));
            let xi = format!("x{i}");
            let f = &one
                - &TruncatedSeries::term(
                    &ring,
                    &[("q", m as u32), (xi.as_str(), 1), ("u", i as u32)],
                    BigRational::one(),
                )?;
            prod = &prod * &f.pow_rational(&-e)?;
        }
    }
    let mut out = XPoly::new();
    let ui = ring.index("u")?;
    let qi = ring.index("q")?;
    for (exps, c) in prod.terms() {
        if exps[ui] as usize != n || !(exps[qi] as usize).is_multiple_of(k - 1) {
            continue;
        }
        let key: Vec<u32> = (1..=n).map(|i| exps[ring.index(&format!("x{i}")).unwrap()]).collect();
        *out.entry(trim(key)).or_insert_with(BigRational::zero) += c;
    }
    out.retain(|_, c| !c.is_zero());
    Ok(out)
}

fn trim(mut v: Vec<u32>) -> Vec<u32> {
    while v.last() == Some(&0) {
        v.pop();
    }
    v
}

fn x_ring(n: usize, q_cap: usize) -> Result<Arc<SeriesRing>> {
    let names: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
    let weights: Vec<(&str, u32)> = names
        .iter()
        .enumerate()
        .map(|(i, s)| (s.as_str(), i as u32 + 1))
        .collect();
    SeriesRing::builder()
        .var("q")
        .vars(names.iter().cloned())
        .var("u")
        .cap("q", q_cap as u32)
        .cap("u", n as u32)
        .bound(&weights, n as u32)
        .build()
}

/// Largest |lhs − rhs| over the union of monomials, and the number of monomials.
pub fn xpoly_discrepancy(lhs: &XPoly, rhs: &XPoly) -> (BigRational, usize) {
    let mut keys: Vec<&Vec<u32>> = lhs.keys().chain(rhs.keys()).collect();
    keys.sort();
    keys.dedup();
    let zero = BigRational::zero();
    let worst = keys
        .iter()
        .map(|key| (lhs.get(*key).unwrap_or(&zero) - rhs.get(*key).unwrap_or(&zero)).abs())
        .max()
        .unwrap_or_else(BigRational::zero);
    (worst, keys.len())
}

/// Compares both sides coefficientwise for 1 ≤ n ≤ n_max, 2 ≤ k ≤ k_max, under both
/// readings of the right-hand exponent.
pub fn grand_identity_check(
    n_max: usize,
    k_max: usize,
    q_cap: usize,
    limits: &Limits,
) -> Result<Report> {
    let mut report = Report::new(format!("grand identity, n<={n_max}, k<={k_max}, q cap {q_cap}"));
    // empty deck: both sides are 1 at k = 0
    report.check("degree-0 sector at k=0", true, "both sides 1");
    let cases: Vec<(usize, usize)> = (1..=n_max)
        .flat_map(|n| (2..=k_max).map(move |k| (n, k)))
        .collect();
    type Sides = (usize, usize, XPoly, XPoly, XPoly);
    let results: Vec<Result<Sides>> = cases
        .par_iter()
        .map(|&(n, k)| {
            let lhs: XPoly = grand_lhs(n, k, q_cap, limits)?
                .into_iter()
                .map(|(e, c)| (trim(e), c))
                .collect();
            let necklace = grand_rhs(n, k, q_cap, ExponentReading::Necklace)?;
            let printed = grand_rhs(n, k, q_cap, ExponentReading::Printed)?;
            Ok((n, k, lhs, necklace, printed))
        })
        .collect();
    for r in results {
        let (n, k, lhs, necklace, printed) = r?;
        let (worst, size) = xpoly_discrepancy(&lhs, &necklace);
        report.check(
            format!("n={n} k={k}, necklace exponent"),
            worst.is_zero(),
            format!("{size} monomials, max discrepancy {worst}"),
        );
        let (worst, size) = xpoly_discrepancy(&lhs, &printed);
        report.push(
            CheckResult::new(
                format!("n={n} k={k}, printed exponent"),
                worst.is_zero(),
                format!("{size} monomials, max discrepancy {worst}"),
            )
            .known_defect(),
        );
    }
    Ok(report)
}
