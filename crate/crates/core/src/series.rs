//! Truncated multivariate power series with exact rational coefficients.
//!
//! A [`SeriesRing`] names its variables and a set of linear degree bounds
//! `Σ weight_j · e_j ≤ cap`. A monomial survives iff it satisfies every bound. The
//! discarded monomials form an ideal, so ring operations in the truncation are exact:
//! every coefficient that is kept equals the coefficient of the untruncated result.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::arith::binomial_rational;
use crate::error::{Error, Result};

pub type Monomial = Vec<u32>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeBound {
    pub weights: Vec<u32>,
    pub cap: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeriesRing {
    names: Vec<String>,
    bounds: Vec<DegreeBound>,
}

/// Collects variables and bounds before freezing them into a [`SeriesRing`].
#[derive(Debug, Clone, Default)]
pub struct SeriesRingBuilder {
    names: Vec<String>,
    bounds: Vec<DegreeBound>,
}

impl SeriesRingBuilder {
    pub fn var(mut self, name: impl Into<String>) -> Self {
        self.names.push(name.into());
        self
    }

    pub fn vars<S: Into<String>>(mut self, names: impl IntoIterator<Item = S>) -> Self {
        self.names.extend(names.into_iter().map(Into::into));
        self
    }

    /// Adds the bound `Σ w · e_name ≤ cap`; unnamed variables get weight 0.
    pub fn bound(mut self, weights: &[(&str, u32)], cap: u32) -> Self {
        let mut w = vec![0; self.names.len()];
        for (name, weight) in weights {
            let idx = self
                .names
                .iter()
                .position(|n| n == name)
                .unwrap_or_else(|| panic!("unknown series variable {name}"));
            w[idx] = *weight;
        }
        self.bounds.push(DegreeBound { weights: w, cap });
        self
    }

    /// Caps the exponent of a single variable.
    pub fn cap(self, name: &str, cap: u32) -> Self {
        self.bound(&[(name, 1)], cap)
    }

    pub fn build(self) -> Result<Arc<SeriesRing>> {
        let n = self.names.len();
        for (i, name) in self.names.iter().enumerate() {
            if self.names[..i].contains(name) {
                return Err(Error::InvalidArgument(format!("duplicate series variable {name}")));
            }
            let bounded = self
                .bounds
                .iter()
                .any(|b| b.weights.get(i).copied().unwrap_or(0) > 0);
            if !bounded {
                return Err(Error::Truncation(format!(
                    "variable {name} is not bounded by any degree cap"
                )));
            }
        }
        let bounds = self
            .bounds
            .into_iter()
            .map(|mut b| {
                b.weights.resize(n, 0);
                b
            })
            .collect();
        Ok(Arc::new(SeriesRing {
            names: self.names,
            bounds,
        }))
    }
}

impl SeriesRing {
    pub fn builder() -> SeriesRingBuilder {
        SeriesRingBuilder::default()
    }

    pub fn nvars(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index(&self, name: &str) -> Result<usize> {
        self.names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::InvalidArgument(format!("no series variable named {name}")))
    }

    pub fn admits(&self, exps: &[u32]) -> bool {
        self.bounds.iter().all(|b| {
            b.weights
                .iter()
                .zip(exps)
                .map(|(w, e)| u64::from(*w) * u64::from(*e))
                .sum::<u64>()
                <= u64::from(b.cap)
        })
    }

    fn loads(&self, exps: &[u32]) -> Vec<u64> {
        self.bounds
            .iter()
            .map(|b| {
                b.weights
                    .iter()
                    .zip(exps)
                    .map(|(w, e)| u64::from(*w) * u64::from(*e))
                    .sum()
            })
            .collect()
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct TruncatedSeries {
    ring: Arc<SeriesRing>,
    terms: BTreeMap<Monomial, BigRational>,
}

impl TruncatedSeries {
    pub fn zero(ring: &Arc<SeriesRing>) -> Self {
        TruncatedSeries {
            ring: Arc::clone(ring),
            terms: BTreeMap::new(),
        }
    }

    pub fn one(ring: &Arc<SeriesRing>) -> Self {
        Self::constant(ring, BigRational::one())
    }

    pub fn constant(ring: &Arc<SeriesRing>, c: BigRational) -> Self {
        Self::monomial(ring, vec![0; ring.nvars()], c)
    }

    /// `c · Π var^exp`; silently zero when the monomial lies beyond the truncation.
    pub fn monomial(ring: &Arc<SeriesRing>, exps: Monomial, c: BigRational) -> Self {
        assert_eq!(exps.len(), ring.nvars());
        let mut s = Self::zero(ring);
        if !c.is_zero() && ring.admits(&exps) {
            s.terms.insert(exps, c);
        }
        s
    }

    /// Monomial given by `(name, exponent)` pairs.
    pub fn term(ring: &Arc<SeriesRing>, powers: &[(&str, u32)], c: BigRational) -> Result<Self> {
        let mut exps = vec![0; ring.nvars()];
        for (name, e) in powers {
            exps[ring.index(name)?] += e;
        }
        Ok(Self::monomial(ring, exps, c))
    }

    pub fn var(ring: &Arc<SeriesRing>, name: &str) -> Result<Self> {
        Self::term(ring, &[(name, 1)], BigRational::one())
    }

    pub fn ring(&self) -> &Arc<SeriesRing> {
        &self.ring
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, exps: &[u32]) -> BigRational {
        self.terms.get(exps).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn coeff_of(&self, powers: &[(&str, u32)]) -> Result<BigRational> {
        let mut exps = vec![0; self.ring.nvars()];
        for (name, e) in powers {
            exps[self.ring.index(name)?] += e;
        }
        Ok(self.coeff(&exps))
    }

    pub fn constant_term(&self) -> BigRational {
        self.coeff(&vec![0; self.ring.nvars()])
    }

    /// Adds `c · monomial` in place.
    pub fn add_term(&mut self, exps: Monomial, c: BigRational) {
        if c.is_zero() || !self.ring.admits(&exps) {
            return;
        }
        match self.terms.entry(exps) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Self::zero(&self.ring);
        }
        TruncatedSeries {
            ring: Arc::clone(&self.ring),
            terms: self.terms.iter().map(|(k, v)| (k.clone(), v * c)).collect(),
        }
    }

    fn check_ring(&self, other: &Self) {
        assert!(
            Arc::ptr_eq(&self.ring, &other.ring) || self.ring == other.ring,
            "series from different rings"
        );
    }

    fn add_impl(&self, other: &Self, sign: bool) -> Self {
        self.check_ring(other);
        let mut terms = self.terms.clone();
        for (k, v) in &other.terms {
            let slot = terms.entry(k.clone()).or_insert_with(BigRational::zero);
            if sign {
                *slot += v;
            } else {
                *slot -= v;
            }
        }
        terms.retain(|_, v| !v.is_zero());
        TruncatedSeries {
            ring: Arc::clone(&self.ring),
            terms,
        }
    }

    fn mul_impl(&self, other: &Self) -> Self {
        self.check_ring(other);
        let caps: Vec<u64> = self.ring.bounds.iter().map(|b| u64::from(b.cap)).collect();
        let right: Vec<(&Monomial, &BigRational, Vec<u64>)> = other
            .terms
            .iter()
            .map(|(k, v)| (k, v, self.ring.loads(k)))
            .collect();
        let mut out: BTreeMap<Monomial, BigRational> = BTreeMap::new();
        for (ka, va) in &self.terms {
            let la = self.ring.loads(ka);
            for (kb, vb, lb) in &right {
                if la.iter().zip(lb).zip(&caps).any(|((a, b), c)| a + b > *c) {
                    continue;
                }
                let key: Monomial = ka.iter().zip(kb.iter()).map(|(a, b)| a + b).collect();
                *out.entry(key).or_insert_with(BigRational::zero) += va * *vb;
            }
        }
        out.retain(|_, v| !v.is_zero());
        TruncatedSeries {
            ring: Arc::clone(&self.ring),
            terms: out,
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(&self.ring);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// `(1 + g)^r` for rational `r`, via the binomial series Σ C(r, m) g^m.
    ///
    /// The constant term must be 1 unless `r` is an integer, in which case any nonzero
    /// constant term is accepted.
    pub fn pow_rational(&self, r: &BigRational) -> Result<Self> {
        let c0 = self.constant_term();
        if c0.is_zero() {
            if r.is_integer() && !r.is_negative() {
                return Ok(self.pow(r.to_integer().try_into().map_err(|_| {
                    Error::InvalidArgument("exponent too large".into())
                })?));
            }
            return Err(Error::InvalidArgument(
                "rational power of a series with zero constant term".into(),
            ));
        }
        let (scale, unit) = if c0.is_one() {
            (BigRational::one(), self.clone())
        } else if r.is_integer() {
            let e: i64 = r
                .to_integer()
                .try_into()
                .map_err(|_| Error::InvalidArgument("exponent too large".into()))?;
            (num_traits::pow::Pow::pow(&c0, e as i32), self.scale(&c0.recip()))
        } else {
            return Err(Error::InvalidArgument(format!(
                "constant term {c0} has no exact power {r}"
            )));
        };
        let g = &unit - &Self::one(&self.ring);
        let mut result = Self::one(&self.ring);
        let mut power = Self::one(&self.ring);
        let mut m = 0usize;
        loop {
            m += 1;
            power = &power * &g;
            if power.is_zero() {
                break;
            }
            let c = binomial_rational(r, m);
            if !c.is_zero() {
                result = &result + &power.scale(&c);
            }
        }
        Ok(result.scale(&scale))
    }

    pub fn inverse(&self) -> Result<Self> {
        self.pow_rational(&BigRational::from_integer(BigInt::from(-1)))
    }

    /// Replaces `name` by `replacement` (a series in the same ring).
    pub fn substitute(&self, name: &str, replacement: &Self) -> Result<Self> {
        self.check_ring(replacement);
        let idx = self.ring.index(name)?;
        let max_e = self.terms.keys().map(|k| k[idx]).max().unwrap_or(0);
        let mut powers = vec![Self::one(&self.ring)];
        for e in 1..=max_e as usize {
            let next = &powers[e - 1] * replacement;
            powers.push(next);
        }
        let mut out = Self::zero(&self.ring);
        for (k, v) in &self.terms {
            let mut rest = k.clone();
            let e = rest[idx] as usize;
            rest[idx] = 0;
            let base = Self::monomial(&self.ring, rest, v.clone());
            out = &out + &(&base * &powers[e]);
        }
        Ok(out)
    }

    /// Sets `name` to the constant `value`.
    ///
    /// Exact only when the truncation of the remaining variables does not depend on
    /// `name`'s exponent for the coefficients the caller reads.
    pub fn eval_var(&self, name: &str, value: &BigRational) -> Result<Self> {
        let idx = self.ring.index(name)?;
        let mut out: BTreeMap<Monomial, BigRational> = BTreeMap::new();
        for (k, v) in &self.terms {
            let mut rest = k.clone();
            let e = rest[idx];
            rest[idx] = 0;
            let c = v * num_traits::pow::Pow::pow(value, e);
            *out.entry(rest).or_insert_with(BigRational::zero) += c;
        }
        out.retain(|_, v| !v.is_zero());
        Ok(TruncatedSeries {
            ring: Arc::clone(&self.ring),
            terms: out,
        })
    }

    /// Partial derivative with respect to `name`.
    pub fn derivative(&self, name: &str) -> Result<Self> {
        let idx = self.ring.index(name)?;
        let mut out = Self::zero(&self.ring);
        for (k, v) in &self.terms {
            if k[idx] == 0 {
                continue;
            }
            let mut key = k.clone();
            key[idx] -= 1;
            out.add_term(key, v * BigRational::from_integer(BigInt::from(k[idx])));
        }
        Ok(out)
    }

    /// Keeps only the terms accepted by `keep`.
    pub fn filter(&self, mut keep: impl FnMut(&Monomial) -> bool) -> Self {
        TruncatedSeries {
            ring: Arc::clone(&self.ring),
            terms: self
                .terms
                .iter()
                .filter(|(k, _)| keep(k))
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect(),
        }
    }

    /// Largest |coefficient difference| over all monomials.
    pub fn max_abs_diff(&self, other: &Self) -> BigRational {
        (self - other)
            .terms
            .values()
            .map(|v| v.abs())
            .max()
            .unwrap_or_else(BigRational::zero)
    }
}

impl<'a> Add<&'a TruncatedSeries> for &'a TruncatedSeries {
    type Output = TruncatedSeries;
    fn add(self, rhs: &TruncatedSeries) -> TruncatedSeries {
        self.add_impl(rhs, true)
    }
}

impl<'a> Sub<&'a TruncatedSeries> for &'a TruncatedSeries {
    type Output = TruncatedSeries;
    fn sub(self, rhs: &TruncatedSeries) -> TruncatedSeries {
        self.add_impl(rhs, false)
    }
}

impl<'a> Mul<&'a TruncatedSeries> for &'a TruncatedSeries {
    type Output = TruncatedSeries;
    fn mul(self, rhs: &TruncatedSeries) -> TruncatedSeries {
        self.mul_impl(rhs)
    }
}

impl Neg for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn neg(self) -> TruncatedSeries {
        self.scale(&-BigRational::one())
    }
}

impl fmt::Display for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (k, v)) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "{v}")?;
            for (name, e) in self.ring.names.iter().zip(k) {
                match e {
                    0 => {}
                    1 => write!(f, "*{name}")?,
                    _ => write!(f, "*{name}^{e}")?,
                }
            }
        }
        Ok(())
    }
}

impl fmt::Debug for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TruncatedSeries({self})")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{rat, rat_int};
    use proptest::prelude::*;

    fn ring_x(cap: u32) -> Arc<SeriesRing> {
        SeriesRing::builder().var("x").cap("x", cap).build().unwrap()
    }

    #[test]
    fn geometric_series() {
        let r = ring_x(3);
        let one = TruncatedSeries::one(&r);
        let x = TruncatedSeries::var(&r, "x").unwrap();
        let inv = (&one - &x).inverse().unwrap();
        for e in 0..=3 {
            assert_eq!(inv.coeff(&[e]), rat_int(1));
        }
        assert_eq!(inv.len(), 4);
    }

    #[test]
    fn unbounded_variable_is_rejected() {
        let err = SeriesRing::builder().var("x").var("y").cap("x", 2).build();
        assert!(matches!(err, Err(Error::Truncation(_))));
    }

    #[test]
    fn coefficient_of_two_term_product() {
        // (1 + u a2 / 2)(1 + 3 u a2 + u^2 a2) : coefficient of u^2 a2^2 is 3/2
        let r = SeriesRing::builder()
            .vars(["u", "a2"])
            .cap("u", 4)
            .bound(&[("a2", 2)], 8)
            .build()
            .unwrap();
        let one = TruncatedSeries::one(&r);
        let f = &one + &TruncatedSeries::term(&r, &[("u", 1), ("a2", 1)], rat(1, 2)).unwrap();
        let g = &(&one + &TruncatedSeries::term(&r, &[("u", 1), ("a2", 1)], rat_int(3)).unwrap())
            + &TruncatedSeries::term(&r, &[("u", 2), ("a2", 1)], rat_int(1)).unwrap();
        let h = &f * &g;
        assert_eq!(h.coeff_of(&[("u", 2), ("a2", 2)]).unwrap(), rat(3, 2));
        assert_eq!(h.coeff_of(&[("u", 2), ("a2", 1)]).unwrap(), rat_int(1));
        assert_eq!(h.coeff_of(&[("u", 3), ("a2", 2)]).unwrap(), rat(1, 2));
    }

    #[test]
    fn truncation_drops_only_high_terms() {
        let r = SeriesRing::builder()
            .vars(["a1", "a2"])
            .bound(&[("a1", 1), ("a2", 2)], 3)
            .build()
            .unwrap();
        let a1 = TruncatedSeries::var(&r, "a1").unwrap();
        let a2 = TruncatedSeries::var(&r, "a2").unwrap();
        let p = &a1 * &a2;
        assert_eq!(p.coeff_of(&[("a1", 1), ("a2", 1)]).unwrap(), rat_int(1));
        assert!((&p * &a1).coeff_of(&[("a1", 2), ("a2", 1)]).unwrap().is_zero());
    }

    #[test]
    fn substitution_and_derivative() {
        let r = ring_x(5);
        let x = TruncatedSeries::var(&r, "x").unwrap();
        let one = TruncatedSeries::one(&r);
        let f = (&one - &x).inverse().unwrap();
        let g = f.substitute("x", &x.scale(&rat_int(2))).unwrap();
        assert_eq!(g.coeff(&[4]), rat_int(16));
        let d = f.derivative("x").unwrap();
        assert_eq!(d.coeff(&[2]), rat_int(3));
        assert_eq!(f.eval_var("x", &rat(1, 2)).unwrap().constant_term(), rat(63, 32));
    }

    fn sparse_series(ring: &Arc<SeriesRing>, coeffs: &[(u32, u32, i64, i64)]) -> TruncatedSeries {
        let mut s = TruncatedSeries::zero(ring);
        for &(a, b, p, q) in coeffs {
            s.add_term(vec![a, b], rat(p, q));
        }
        s
    }

    fn two_var_ring() -> Arc<SeriesRing> {
        SeriesRing::builder()
            .vars(["x", "y"])
            .bound(&[("x", 1), ("y", 2)], 6)
            .build()
            .unwrap()
    }

    fn arb_terms() -> impl Strategy<Value = Vec<(u32, u32, i64, i64)>> {
        prop::collection::vec((0u32..4, 0u32..3, -5i64..6, 1i64..5), 0..5)
    }

    proptest! {
        #[test]
        fn ring_laws(a in arb_terms(), b in arb_terms(), c in arb_terms()) {
            let r = two_var_ring();
            let (a, b, c) = (sparse_series(&r, &a), sparse_series(&r, &b), sparse_series(&r, &c));
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        }

        #[test]
        fn rational_powers_cancel(g in arb_terms(), p in -4i64..5, q in 1i64..4) {
            let r = two_var_ring();
            let mut g = sparse_series(&r, &g);
            g.terms.remove(&vec![0, 0]);
            let one = TruncatedSeries::one(&r);
            let f = &one + &g;
            let e = rat(p, q);
            let prod = &f.pow_rational(&e).unwrap() * &f.pow_rational(&-e.clone()).unwrap();
            prop_assert_eq!(prod, one.clone());
            // (f^{1/q})^q = f
            let root = f.pow_rational(&rat(1, q)).unwrap();
            prop_assert_eq!(root.pow(q as u32), f);
        }
    }
}
