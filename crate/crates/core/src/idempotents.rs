//! Eulerian idempotents, their signed versions, and Whitehouse idempotents.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::arith::{binomial, pow_big, rat_int};
use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::measure::{cycle_index_in, cycle_index_ring, PermMeasure};
use crate::perm::{enumerate_sn, Permutation};
use crate::polyfactor::num_irreducibles;
use crate::report::Report;
use crate::series::TruncatedSeries;
use crate::shuffle::shuffle_then_cut_measure;

/// Largest n accepted for the idempotent computations.
pub const MAX_IDEMPOTENT_N: usize = 6;

/// Elements indexed j = 1..=n, stored at `elements[j - 1]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdempotentFamily {
    pub n: usize,
    pub elements: Vec<PermMeasure>,
}

impl IdempotentFamily {
    pub fn get(&self, j: usize) -> &PermMeasure {
        &self.elements[j - 1]
    }

    /// Σ_j k^j x_j.
    pub fn weighted_sum(&self, k: i64) -> PermMeasure {
        let mut acc = PermMeasure::zero(self.elements[0].n());
        for (idx, e) in self.elements.iter().enumerate() {
            let w = BigRational::from_integer(pow_big(k, idx + 1));
            acc = acc.add(&e.scale(&w)).expect("same group");
        }
        acc
    }
}

fn check_n(n: usize, limits: &Limits) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidArgument("idempotents need n >= 1".into()));
    }
    if n > MAX_IDEMPOTENT_N {
        return Err(Error::EnumerationCap {
            n,
            cap: MAX_IDEMPOTENT_N,
        });
    }
    limits.check_enumeration(n)
}

/// s_{i,n-i}: the sum of all w increasing on 1..i and on i+1..n.
pub fn split_sum(n: usize, i: usize, limits: &Limits) -> Result<PermMeasure> {
    let mut out = PermMeasure::zero(n);
    for w in enumerate_sn(n, limits)? {
        let line = w.one_line();
        let rising = |r: std::ops::Range<usize>| r.clone().skip(1).all(|t| line[t - 1] < line[t]);
        if rising(0..i) && rising(i..n) {
            out.set(&w, BigRational::one());
        }
    }
    Ok(out)
}

/// e_n^j = Π_{i≠j} (s_n - μ_i)/(μ_j - μ_i) with μ_i = 2^i - 2.
pub fn eulerian_idempotents(n: usize, limits: &Limits) -> Result<IdempotentFamily> {
    check_n(n, limits)?;
    let mut s = PermMeasure::zero(n);
    for i in 1..n {
        s = s.add(&split_sum(n, i, limits)?)?;
    }
    // powers s^0 .. s^{n-1}, then each e_j as a polynomial in s
    let mut powers = vec![PermMeasure::identity(n)];
    for _ in 1..n {
        let next = powers.last().unwrap().convolve(&s)?;
        powers.push(next);
    }
    let mu = |i: usize| rat_int(pow_big(2, i) - 2);
    let mut elements = Vec::with_capacity(n);
    for j in 1..=n {
        // coefficients of Π_{i≠j} (x - μ_i)/(μ_j - μ_i), lowest degree first
        let mut poly = vec![BigRational::one()];
        for i in (1..=n).filter(|&i| i != j) {
            let den = mu(j) - mu(i);
            let mut next = vec![BigRational::zero(); poly.len() + 1];
            for (d, c) in poly.iter().enumerate() {
                next[d + 1] += c / &den;
                next[d] -= c * mu(i) / &den;
            }
            poly = next;
        }
        let mut e = PermMeasure::zero(n);
        for (d, c) in poly.iter().enumerate() {
            if !c.is_zero() {
                e = e.add(&powers[d].scale(c))?;
            }
        }
        elements.push(e);
    }
    Ok(IdempotentFamily { n, elements })
}

/// Λ_{n+1} = (1/(n+1)) Σ_i sgn(λ^i) λ^i, λ = (1 2 … n+1).
pub fn lambda_element(m: usize) -> PermMeasure {
    let mut out = PermMeasure::zero(m);
    let w = BigRational::new(BigInt::one(), BigInt::from(m));
    for i in 0..m {
        let r = Permutation::rotation(m, i);
        let c = if r.sign() < 0 { -w.clone() } else { w.clone() };
        out.add_to(&r, &c);
    }
    out
}

/// Signed idempotents ē_n^j embedded in S_{n+1}, Λ_{n+1}, and f_{n+1}^j = Λ_{n+1} ē_n^j.
#[derive(Debug, Clone)]
pub struct WhitehouseData {
    pub signed: IdempotentFamily,
    pub lambda: PermMeasure,
    pub whitehouse: IdempotentFamily,
}

pub fn signed_and_whitehouse(n: usize, limits: &Limits) -> Result<WhitehouseData> {
    check_n(n + 1, limits)?;
    let e = eulerian_idempotents(n, limits)?;
    let signed: Vec<PermMeasure> = e.elements.iter().map(|x| x.sign_twist().embed(1)).collect();
    let lambda = lambda_element(n + 1);
    let whitehouse = signed
        .iter()
        .map(|x| lambda.convolve(x))
        .collect::<Result<Vec<_>>>()?;
    Ok(WhitehouseData {
        signed: IdempotentFamily { n, elements: signed },
        lambda,
        whitehouse: IdempotentFamily {
            n,
            elements: whitehouse,
        },
    })
}

/// Idempotency, orthogonality and Σ = identity for a family.
pub fn family_report(name: &str, fam: &IdempotentFamily, orthogonal: bool) -> Result<Report> {
    let mut report = Report::new(format!("{name}, n={}", fam.n));
    let m = fam.elements[0].n();
    for (a, x) in fam.elements.iter().enumerate() {
        report.check(format!("j={} idempotent", a + 1), x.convolve(x)? == *x, "");
        if orthogonal {
            for (b, y) in fam.elements.iter().enumerate() {
                if a != b {
                    let zero = x.convolve(y)?.support_len() == 0;
                    report.check(format!("j={} times j={} vanishes", a + 1, b + 1), zero, "");
                }
            }
        }
    }
    if orthogonal {
        let mut total = PermMeasure::zero(m);
        for x in &fam.elements {
            total = total.add(x)?;
        }
        report.check("sum is the identity", total == PermMeasure::identity(m), "");
    }
    Ok(report)
}

/// Σ_j k^j e_n^j against the descent formula, and Σ_j k^j Λ ē_n^j against the
/// cyclic descent formula, for each k.
pub fn garsia_form_check(n: usize, k_values: &[i64], limits: &Limits) -> Result<Report> {
    let e = eulerian_idempotents(n, limits)?;
    let wh = signed_and_whitehouse(n, limits)?;
    let mut report = Report::new(format!("idempotent coefficient formulas, n={n}"));
    for &k in k_values {
        if k < 1 {
            return Err(Error::InvalidArgument(format!("k must be positive, got {k}")));
        }
        let lhs = e.weighted_sum(k);
        let rhs = PermMeasure::from_fn(n, limits, |w| {
            rat_int(binomial(n as i64 + k - w.descent_count() as i64 - 1, n as i64))
        })?;
        report.check(format!("descent formula, k={k}"), lhs == rhs, discrepancy(&lhs, &rhs));

        let lhs = wh.whitehouse.weighted_sum(k);
        let rhs = PermMeasure::from_fn(n + 1, limits, |w| {
            let c = binomial(k + n as i64 - w.cyclic_descent_count() as i64, n as i64);
            BigRational::new(c * w.sign(), BigInt::from(n + 1))
        })?;
        report.check(format!("cyclic descent formula, k={k}"), lhs == rhs, discrepancy(&lhs, &rhs));

        // sgn(w)·(coefficient)/k^n is the riffle-then-cut probability of w⁻¹
        let cs = shuffle_then_cut_measure(n + 1, k as usize, limits)?;
        let scale = BigRational::new(BigInt::one(), pow_big(k, n));
        let twisted = lhs.sign_twist().scale(&scale).invert();
        report.check(
            format!("matches riffle-then-cut, k={k}"),
            twisted == cs,
            discrepancy(&twisted, &cs),
        );
    }
    Ok(report)
}

fn discrepancy(a: &PermMeasure, b: &PermMeasure) -> String {
    let diff = a.sub(b).expect("same group");
    let max = diff
        .entries()
        .into_iter()
        .map(|(_, c)| num_traits::Signed::abs(&c))
        .max()
        .unwrap_or_else(BigRational::zero);
    format!("max discrepancy {max}")
}

/// 1 + Σ_n Σ_i k^i Z(e_n^i) against Π_i (1 - a_i)^{-N_k(i)} through weighted degree n_max.
pub fn hanlon_check(n_max: usize, k_values: &[u64], limits: &Limits) -> Result<Report> {
    check_n(n_max, limits)?;
    let ring = cycle_index_ring(n_max, n_max as u32);
    let families = (1..=n_max)
        .map(|n| eulerian_idempotents(n, limits))
        .collect::<Result<Vec<_>>>()?;
    let mut report = Report::new(format!("cycle index of Eulerian idempotents, n<={n_max}"));
    for &k in k_values {
        let mut lhs = TruncatedSeries::one(&ring);
        for fam in &families {
            lhs = &lhs + &cycle_index_in(&fam.weighted_sum(k as i64), &ring)?;
        }
        let mut rhs = TruncatedSeries::one(&ring);
        for i in 1..=n_max {
            let base = &TruncatedSeries::one(&ring) - &TruncatedSeries::var(&ring, &format!("a{i}"))?;
            let e = BigRational::from_integer(-num_irreducibles(k, i));
            rhs = &rhs * &base.pow_rational(&e)?;
        }
        let diff = lhs.max_abs_diff(&rhs);
        report.check(format!("k={k}"), diff.is_zero(), format!("max discrepancy {diff}"));
    }
    for fam in &families {
        let mut total = TruncatedSeries::zero(&ring);
        for x in &fam.elements {
            total = &total + &cycle_index_in(&x.sign_twist(), &ring)?;
        }
        let a1n = TruncatedSeries::term(&ring, &[("a1", fam.n as u32)], BigRational::one())?;
        report.check(
            format!("signed family sums to a1^{}", fam.n),
            total == a1n,
            "",
        );
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    fn lim() -> Limits {
        Limits::default()
    }

    fn p(v: &[usize]) -> Permutation {
        Permutation::from_one_line(v).unwrap()
    }

    #[test]
    fn n2_family() {
        let fam = eulerian_idempotents(2, &lim()).unwrap();
        let id = p(&[1, 2]);
        let t = p(&[2, 1]);
        assert_eq!(fam.get(1).coeff(&id), rat(1, 2));
        assert_eq!(fam.get(1).coeff(&t), rat(-1, 2));
        assert_eq!(fam.get(2).coeff(&id), rat(1, 2));
        assert_eq!(fam.get(2).coeff(&t), rat(1, 2));
        let sum = fam.weighted_sum(2);
        assert_eq!(sum.coeff(&id), rat(3, 1));
        assert_eq!(sum.coeff(&t), rat(1, 1));
        assert_eq!(fam.weighted_sum(1), PermMeasure::identity(2));
    }

    #[test]
    fn families_are_idempotent() {
        for n in 1..=4 {
            let fam = eulerian_idempotents(n, &lim()).unwrap();
            let r = family_report("eulerian", &fam, true).unwrap();
            assert!(r.ok(), "{r}");
        }
        for n in 1..=3 {
            let wh = signed_and_whitehouse(n, &lim()).unwrap();
            let r = family_report("whitehouse", &wh.whitehouse, false).unwrap();
            assert!(r.ok(), "{r}");
        }
    }

    #[test]
    fn first_whitehouse_is_lambda() {
        let wh = signed_and_whitehouse(1, &lim()).unwrap();
        assert_eq!(wh.signed.get(1), &PermMeasure::identity(2));
        let f = wh.whitehouse.get(1);
        assert_eq!(f.coeff(&p(&[1, 2])), rat(1, 2));
        assert_eq!(f.coeff(&p(&[2, 1])), rat(-1, 2));
        let e = eulerian_idempotents(3, &lim()).unwrap();
        assert_eq!(e.get(2).sign_twist().sign_twist(), *e.get(2));
    }

    #[test]
    fn coefficient_formulas() {
        for n in 1..=3 {
            let r = garsia_form_check(n, &[1, 2, 3], &lim()).unwrap();
            assert!(r.ok(), "{r}");
        }
    }

    #[test]
    fn hanlon_small() {
        let r = hanlon_check(3, &[2, 3], &lim()).unwrap();
        assert!(r.ok(), "{r}");
    }

    #[test]
    fn size_cap() {
        assert!(eulerian_idempotents(7, &lim()).unwrap_err().is_cap_violation());
    }
}
