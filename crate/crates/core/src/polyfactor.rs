//! Factorization types of random monic polynomials over F_q, compared with the
//! cycle types of shuffled decks.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::arith::{binomial, divisors, is_prime, mobius, pow_big, rat_int};
use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::measure::{cycle_index_in, ClassMeasure, PermMeasure};
use crate::perm::CycleType;
use crate::report::Report;
use crate::series::{SeriesRing, TruncatedSeries};
use crate::shuffle::shuffle_then_cut_measure;

/// Number of monic irreducible polynomials of degree i over F_q: (1/i) Σ_{d|i} μ(d) q^{i/d}.
pub fn num_irreducibles(q: u64, i: usize) -> BigInt {
    assert!(q >= 2 && i >= 1);
    let total: BigInt = divisors(i as u64)
        .into_iter()
        .map(|d| pow_big(q as i64, i / d as usize) * mobius(d))
        .sum();
    total / i
}

/// (1/i) Σ_{d|i} μ(d) (q^{i/d} - 1), the irreducible count with x removed in degree 1.
pub fn num_irreducibles_nonzero_constant(q: u64, i: usize) -> BigInt {
    let n = num_irreducibles(q, i);
    if i == 1 {
        n - 1
    } else {
        n
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PolyConstraint {
    All,
    NonzeroConstant,
    ConstantOne,
}

impl fmt::Display for PolyConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PolyConstraint::All => "all",
            PolyConstraint::NonzeroConstant => "nonzero_constant",
            PolyConstraint::ConstantOne => "constant_one",
        })
    }
}

impl FromStr for PolyConstraint {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "all" => Ok(PolyConstraint::All),
            "nonzero_constant" | "nonzero-constant" => Ok(PolyConstraint::NonzeroConstant),
            "constant_one" | "constant-one" => Ok(PolyConstraint::ConstantOne),
            other => Err(Error::Parse(format!("unknown polynomial constraint '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PolyMethod {
    Count,
    Brute,
}

/// Lumps a probability measure by cycle type.
pub fn class_measure(m: &PermMeasure) -> Result<ClassMeasure> {
    if !m.is_probability() {
        return Err(Error::NotProbability("class measure input".into()));
    }
    Ok(m.lump())
}

/// Law of the factorization type of a uniform monic degree-n polynomial over F_q.
pub fn poly_class_measure(
    n: usize,
    q: u64,
    constraint: PolyConstraint,
    method: PolyMethod,
) -> Result<ClassMeasure> {
    if n == 0 || q < 2 {
        return Err(Error::InvalidArgument(format!("need n >= 1 and q >= 2, got n={n}, q={q}")));
    }
    match method {
        PolyMethod::Count => count_classes(n, q, constraint),
        PolyMethod::Brute => brute_classes(n, q, constraint),
    }
}

fn count_classes(n: usize, q: u64, constraint: PolyConstraint) -> Result<ClassMeasure> {
    let (den, nonzero) = match constraint {
        PolyConstraint::All => (pow_big(q as i64, n), false),
        PolyConstraint::NonzeroConstant => (pow_big(q as i64, n - 1) * (q - 1), true),
        PolyConstraint::ConstantOne => {
            return Err(Error::InvalidArgument(
                "constant_one is only available with the brute method".into(),
            ))
        }
    };
    let counts: Vec<BigInt> = (1..=n)
        .map(|i| {
            if nonzero {
                num_irreducibles_nonzero_constant(q, i)
            } else {
                num_irreducibles(q, i)
            }
        })
        .collect();
    let mut out = ClassMeasure::zero(n);
    for ct in CycleType::all(n) {
        let mut ways = BigInt::one();
        for (i, &m) in ct.mults().iter().enumerate() {
            if m == 0 {
                continue;
            }
            // multisets of size m from counts[i] irreducibles
            let pool = i64::try_from(&counts[i]).expect("irreducible counts fit in i64 here");
            ways *= binomial(pool + m as i64 - 1, m as i64);
        }
        if !ways.is_zero() {
            out.add_to(&ct, &BigRational::new(ways, den.clone()));
        }
    }
    Ok(out)
}

/// Monic polynomials over F_p, coefficients low to high, leading 1 included.
type Poly = Vec<u64>;

fn poly_divmod(a: &[u64], b: &[u64], p: u64) -> (Poly, Poly) {
    // b is monic
    let mut rem = a.to_vec();
    let db = b.len() - 1;
    if rem.len() < b.len() {
        return (vec![0], rem);
    }
    let mut quo = vec![0u64; rem.len() - db];
    for i in (db..rem.len()).rev() {
        let c = rem[i] % p;
        if c == 0 {
            continue;
        }
        quo[i - db] = c;
        for (j, &bj) in b.iter().enumerate() {
            let idx = i - db + j;
            rem[idx] = (rem[idx] + p * p - c * bj % p) % p;
        }
    }
    rem.truncate(db.max(1));
    while rem.len() > 1 && *rem.last().unwrap() == 0 {
        rem.pop();
    }
    (quo, rem)
}

fn is_zero_poly(r: &[u64]) -> bool {
    r.iter().all(|&c| c == 0)
}

/// All monic polynomials of degree d over F_p in a fixed order.
fn monic_of_degree(d: usize, p: u64) -> impl Iterator<Item = Poly> {
    let total = p.pow(d as u32);
    (0..total).map(move |mut idx| {
        let mut coeffs = Vec::with_capacity(d + 1);
        for _ in 0..d {
            coeffs.push(idx % p);
            idx /= p;
        }
        coeffs.push(1);
        coeffs
    })
}

/// Monic irreducibles of degree 1..=max_deg, ascending by degree.
fn irreducibles_up_to(max_deg: usize, p: u64) -> Vec<Poly> {
    let mut irr: Vec<Poly> = Vec::new();
    for d in 1..=max_deg {
        let found: Vec<Poly> = monic_of_degree(d, p)
            .filter(|f| {
                irr.iter()
                    .take_while(|g| 2 * (g.len() - 1) <= d)
                    .all(|g| !is_zero_poly(&poly_divmod(f, g, p).1))
            })
            .collect();
        irr.extend(found);
    }
    irr
}

/// Degree multiplicities of the irreducible factors of a monic f.
fn factor_type(f: &[u64], irr: &[Poly], p: u64) -> Vec<usize> {
    let n = f.len() - 1;
    let mut mults = vec![0usize; n];
    let mut rem = f.to_vec();
    for g in irr {
        let dg = g.len() - 1;
        let dr = rem.len() - 1;
        if dr == 0 {
            break;
        }
        if 2 * dg > dr {
            mults[dr - 1] += 1;
            rem = vec![1];
            break;
        }
        loop {
            let (quo, r) = poly_divmod(&rem, g, p);
            if !is_zero_poly(&r) {
                break;
            }
            mults[dg - 1] += 1;
            rem = quo;
        }
    }
    if rem.len() > 1 {
        mults[rem.len() - 2] += 1;
    }
    mults
}

fn brute_classes(n: usize, q: u64, constraint: PolyConstraint) -> Result<ClassMeasure> {
    if !is_prime(q) {
        return Err(Error::InvalidArgument(format!(
            "brute-force factoring needs a prime field, got q={q}"
        )));
    }
    let irr = irreducibles_up_to(n / 2 + 1, q);
    let keep = |f: &Poly| match constraint {
        PolyConstraint::All => true,
        PolyConstraint::NonzeroConstant => f[0] != 0,
        PolyConstraint::ConstantOne => f[0] == 1,
    };
    let polys: Vec<Poly> = monic_of_degree(n, q).filter(keep).collect();
    let types: Vec<Vec<usize>> = polys.par_iter().map(|f| factor_type(f, &irr, q)).collect();
    let each = BigRational::new(BigInt::one(), BigInt::from(polys.len()));
    let mut out = ClassMeasure::zero(n);
    for t in types {
        out.add_to(&CycleType::from_mults(t), &each);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FixedPointLaw {
    Riffle,
    RiffleCut,
}

/// Expected number of fixed points: 1 + 1/k + … + 1/k^{n-1} for riffles, 1 with a cut.
pub fn expected_fixed_points(n: usize, k: usize, law: FixedPointLaw) -> BigRational {
    match law {
        FixedPointLaw::RiffleCut => BigRational::one(),
        FixedPointLaw::Riffle => (0..n)
            .map(|i| BigRational::new(BigInt::one(), pow_big(k as i64, i)))
            .sum(),
    }
}

/// Σ_w M(w)·(fixed points of w).
pub fn expected_fixed_points_of(m: &PermMeasure) -> BigRational {
    m.entries()
        .into_iter()
        .map(|(w, c)| c * rat_int(w.fixed_points() as i64))
        .sum()
}

fn a_name(i: usize) -> String {
    format!("a{i}")
}

/// Π_{i ≤ max_i} (1 - scale_i · a_i · u^i)^{-M_i}, with a_i = 1 when `with_a` is false.
fn necklace_product(
    ring: &Arc<SeriesRing>,
    k: u64,
    max_i: usize,
    with_a: bool,
    with_u: bool,
    exponent: impl Fn(usize) -> BigInt,
) -> Result<TruncatedSeries> {
    let mut prod = TruncatedSeries::one(ring);
    for i in 1..=max_i {
        let mut powers: Vec<(String, u32)> = Vec::new();
        if with_a {
            powers.push((a_name(i), 1));
        }
        if with_u {
            powers.push(("u".to_string(), i as u32));
        }
        let refs: Vec<(&str, u32)> = powers.iter().map(|(s, e)| (s.as_str(), *e)).collect();
        let c = -BigRational::new(BigInt::one(), pow_big(k as i64, i));
        let base = &TruncatedSeries::one(ring) + &TruncatedSeries::term(ring, &refs, c)?;
        let e = BigRational::from_integer(-exponent(i));
        prod = &prod * &base.pow_rational(&e)?;
    }
    Ok(prod)
}

/// Exact checks of the shuffle-then-cut cycle index generating functions, through
/// decks of size `degree_cap`.
pub fn cyc_identity_check(k: u64, degree_cap: usize, limits: &Limits) -> Result<Report> {
    if k < 2 {
        return Err(Error::InvalidArgument("the cycle identities need k >= 2".into()));
    }
    if degree_cap < 2 {
        return Err(Error::Truncation(
            "degree cap must reach decks of size 2 to test anything".into(),
        ));
    }
    limits.check_enumeration(degree_cap)?;
    let d = degree_cap;
    let kr = rat_int(k as i64);
    let one = BigRational::one();
    let m_i = |i: usize| num_irreducibles_nonzero_constant(k, i);
    let mut report = Report::new(format!("cycle index identities, k={k}, decks up to {d}"));

    // Cycle index sums in a ring of a_1..a_d (weight i) and u (degree ≤ d).
    let names: Vec<String> = (1..=d).map(a_name).collect();
    let weights: Vec<(&str, u32)> = names
        .iter()
        .enumerate()
        .map(|(i, s)| (s.as_str(), i as u32 + 1))
        .collect();
    let ring = SeriesRing::builder()
        .vars(names.iter().cloned())
        .var("u")
        .bound(&weights, d as u32)
        .cap("u", d as u32)
        .build()?;
    let mut zs = Vec::with_capacity(d + 1);
    zs.push(TruncatedSeries::zero(&ring));
    for n in 1..=d {
        let cs = shuffle_then_cut_measure(n, k as usize, limits)?;
        zs.push(cycle_index_in(&cs, &ring)?);
    }
    let u = TruncatedSeries::var(&ring, "u")?;
    let a1 = TruncatedSeries::var(&ring, "a1")?;
    let c = |v: BigRational| TruncatedSeries::constant(&ring, v);

    // Without u: 1 + (1/k) Σ_{N≥2} Z(cs_N) = 1 - 1/(k-1) - a1/k + Π(1 - a_i/k^i)^{-M_i}/(k-1).
    let mut lhs = TruncatedSeries::one(&ring);
    for z in zs.iter().skip(2) {
        lhs = &lhs + &z.scale(&(&one / &kr));
    }
    let prod = necklace_product(&ring, k, d, true, false, m_i)?;
    let km1 = &kr - &one;
    let rhs = &(&c(&one - &one / &km1) - &a1.scale(&(&one / &kr))) + &prod.scale(&(&one / &km1));
    push_diff(&mut report, "product form without u", &lhs, &rhs);

    // With u^N marking deck size: 1 + ((k-1)/k) Σ_{N≥1} u^N Z(cs_N) = Π(1 - a_i u^i/k^i)^{-M_i}.
    let mut sum_z = TruncatedSeries::zero(&ring);
    for (n, z) in zs.iter().enumerate().skip(1) {
        sum_z = &sum_z + &(&u.pow(n as u32) * z);
    }
    let prod_u = necklace_product(&ring, k, d, true, true, m_i)?;
    let lhs = &TruncatedSeries::one(&ring) + &sum_z.scale(&(&km1 / &kr));
    push_diff(&mut report, "product form with u", &lhs, &prod_u);

    // Ratio form: (1-u)/(1-u/k) + ((k-1)(1-u)/(k-u)) Σ u^N Z = Π((1-u^i/k^i)/(1-a_i u^i/k^i))^{M_i}.
    let one_s = TruncatedSeries::one(&ring);
    let one_minus_u = &one_s - &u;
    let plain_u = necklace_product(&ring, k, d, false, true, m_i)?;
    let ratio = &prod_u * &plain_u.inverse()?;
    let lhs = &(&one_minus_u * &(&one_s - &u.scale(&(&one / &kr))).inverse()?)
        + &(&(&one_minus_u.scale(&km1) * &(&c(kr.clone()) - &u).inverse()?) * &sum_z);
    push_diff(&mut report, "ratio form", &lhs, &ratio);

    // Rearranged: (1-u)/(1-1/k) + (1-u) Σ u^N Z = ((1-u/k)/(1-1/k)) · ratio.
    let inv = &one / (&one - &one / &kr);
    let lhs = &one_minus_u.scale(&inv) + &(&one_minus_u * &sum_z);
    let rhs = &(&one_s - &u.scale(&(&one / &kr))).scale(&inv) * &ratio;
    push_diff(&mut report, "rearranged ratio form", &lhs, &rhs);

    // All a_i = 1: 1 + (k-1)u/(k(1-u)) = Π(1 - u^i/k^i)^{-M_i}.
    let lhs = &one_s + &(&u.scale(&(&km1 / &kr)) * &one_minus_u.inverse()?);
    push_diff(&mut report, "all a_i set to 1", &lhs, &plain_u);

    // Setting a_i = 1 in the cycle index sum must agree with the same specialization.
    let mut spec = lhs_with_u_specialized(&ring, &zs, &u, &km1, &kr)?;
    for i in 1..=d {
        spec = spec.eval_var(&a_name(i), &one)?;
    }
    push_diff(&mut report, "specialized cycle index sum", &spec, &plain_u);
    Ok(report)
}

fn lhs_with_u_specialized(
    ring: &Arc<SeriesRing>,
    zs: &[TruncatedSeries],
    u: &TruncatedSeries,
    km1: &BigRational,
    kr: &BigRational,
) -> Result<TruncatedSeries> {
    let mut acc = TruncatedSeries::zero(ring);
    for (n, z) in zs.iter().enumerate().skip(1) {
        acc = &acc + &(&u.pow(n as u32) * z);
    }
    Ok(&TruncatedSeries::one(ring) + &acc.scale(&(km1 / kr)))
}

fn push_diff(report: &mut Report, name: &str, lhs: &TruncatedSeries, rhs: &TruncatedSeries) {
    let diff = lhs.max_abs_diff(rhs);
    report.check(name, diff.is_zero(), format!("max discrepancy {diff}"));
}

/// Max coefficient discrepancy in Π_i (1 - u^i/k^i)^{-N_k(i)} = 1/(1-u) through u^degree.
pub fn unique_factorization_check(k: u64, degree: usize) -> Result<BigRational> {
    let ring = SeriesRing::builder().var("u").cap("u", degree as u32).build()?;
    let lhs = necklace_product(&ring, k, degree, false, true, |i| num_irreducibles(k, i))?;
    let one = TruncatedSeries::one(&ring);
    let rhs = (&one - &TruncatedSeries::var(&ring, "u")?).inverse()?;
    Ok(lhs.max_abs_diff(&rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;
    use crate::shuffle::riffle_measure;

    fn lim() -> Limits {
        Limits::default()
    }

    fn ct(s: &str) -> CycleType {
        s.parse().unwrap()
    }

    #[test]
    fn irreducible_counts() {
        let got: Vec<BigInt> = (1..=4).map(|i| num_irreducibles(2, i)).collect();
        assert_eq!(got, [2, 1, 2, 3].map(BigInt::from));
        assert_eq!(num_irreducibles(3, 1), BigInt::from(3));
        assert_eq!(num_irreducibles_nonzero_constant(2, 1), BigInt::from(1));
        for q in [2u64, 3, 5] {
            let irr = irreducibles_up_to(4, q);
            for d in 1..=4 {
                let found = irr.iter().filter(|f| f.len() - 1 == d).count();
                assert_eq!(BigInt::from(found), num_irreducibles(q, d), "q={q} d={d}");
            }
        }
    }

    #[test]
    fn class_measure_examples() {
        let u3 = PermMeasure::uniform(3, &lim()).unwrap();
        let c = class_measure(&u3).unwrap();
        assert_eq!(c.coeff(&ct("1^3")), rat(1, 6));
        assert_eq!(c.coeff(&ct("1^1 2^1")), rat(1, 2));
        assert_eq!(c.coeff(&ct("3^1")), rat(1, 3));
        let c = class_measure(&shuffle_then_cut_measure(2, 2, &lim()).unwrap()).unwrap();
        assert_eq!(c.coeff(&ct("1^2")), rat(1, 2));
        assert_eq!(c.coeff(&ct("2^1")), rat(1, 2));
    }

    #[test]
    fn poly_examples() {
        let m = poly_class_measure(1, 2, PolyConstraint::NonzeroConstant, PolyMethod::Count).unwrap();
        assert_eq!(m.coeff(&ct("1^1")), BigRational::one());
        let one = poly_class_measure(2, 2, PolyConstraint::ConstantOne, PolyMethod::Brute).unwrap();
        assert_eq!(one.coeff(&ct("1^2")), rat(1, 2));
        assert_eq!(one.coeff(&ct("2^1")), rat(1, 2));
        let nz = poly_class_measure(2, 2, PolyConstraint::NonzeroConstant, PolyMethod::Brute).unwrap();
        assert_eq!(nz, one);
        assert!(poly_class_measure(2, 4, PolyConstraint::All, PolyMethod::Brute).is_err());
        assert!(poly_class_measure(2, 3, PolyConstraint::ConstantOne, PolyMethod::Count).is_err());
    }

    #[test]
    fn count_matches_brute_small() {
        for q in [2u64, 3] {
            for n in 1..=4 {
                for cons in [PolyConstraint::All, PolyConstraint::NonzeroConstant] {
                    let a = poly_class_measure(n, q, cons, PolyMethod::Count).unwrap();
                    let b = poly_class_measure(n, q, cons, PolyMethod::Brute).unwrap();
                    assert_eq!(a, b, "q={q} n={n} {cons}");
                    assert!(a.is_probability());
                }
            }
        }
    }

    #[test]
    fn riffle_cycle_types_match_polynomials() {
        for q in [2u64, 3] {
            for n in 1..=4 {
                let r = class_measure(&riffle_measure(n, q as usize, &lim()).unwrap()).unwrap();
                let p = poly_class_measure(n, q, PolyConstraint::All, PolyMethod::Count).unwrap();
                assert_eq!(r, p);
                let cs = class_measure(&shuffle_then_cut_measure(n, q as usize, &lim()).unwrap()).unwrap();
                let p = poly_class_measure(n, q, PolyConstraint::NonzeroConstant, PolyMethod::Count).unwrap();
                assert_eq!(cs, p);
            }
        }
    }

    #[test]
    fn fixed_points() {
        assert_eq!(expected_fixed_points(3, 2, FixedPointLaw::Riffle), rat(7, 4));
        assert_eq!(expected_fixed_points(5, 1, FixedPointLaw::Riffle), rat(5, 1));
        for n in 1..=5 {
            let m = shuffle_then_cut_measure(n, 3, &lim()).unwrap();
            assert_eq!(expected_fixed_points_of(&m), BigRational::one());
            let m = riffle_measure(n, 3, &lim()).unwrap();
            assert_eq!(expected_fixed_points_of(&m), expected_fixed_points(n, 3, FixedPointLaw::Riffle));
        }
    }

    #[test]
    fn unique_factorization() {
        for k in [2u64, 3, 4] {
            assert!(unique_factorization_check(k, 8).unwrap().is_zero());
        }
    }

    #[test]
    fn cycle_identities_small() {
        let report = cyc_identity_check(2, 4, &lim()).unwrap();
        assert!(report.ok(), "{report}");
        assert!(cyc_identity_check(2, 1, &lim()).unwrap_err().is_cap_violation());
    }
}
