//! Group-algebra elements of Q[S_n], probability measures, and their lumping to
//! conjugacy classes.
//!
//! Multiplication is `(Σ a_σ σ)(Σ b_τ τ) = Σ a_σ b_τ (σ ∘ τ)`, which is the convolution
//! `(A * B)(π) = Σ_τ A(π τ⁻¹) B(τ)`.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::arith::{factorial, rat_int};
use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::perm::{CycleType, Permutation, Permutations};
use crate::series::{SeriesRing, TruncatedSeries};

/// Largest n stored as a dense vector indexed by lexicographic rank.
pub const DENSE_MAX_N: usize = 7;

#[derive(Clone, Debug)]
enum Store {
    Dense(Vec<BigRational>),
    Sparse(BTreeMap<Permutation, BigRational>),
}

/// An element of Q[S_n]; a probability measure when its coefficients are
/// nonnegative and sum to one.
#[derive(Clone, Debug)]
pub struct PermMeasure {
    n: usize,
    store: Store,
}

impl PermMeasure {
    pub fn zero(n: usize) -> Self {
        assert!(n >= 1, "measures live on S_n with n >= 1");
        let store = if n <= DENSE_MAX_N {
            Store::Dense(vec![BigRational::zero(); factorial(n).try_into().unwrap()])
        } else {
            Store::Sparse(BTreeMap::new())
        };
        PermMeasure { n, store }
    }

    pub fn point_mass(w: &Permutation) -> Self {
        let mut m = Self::zero(w.n());
        m.set(w, BigRational::one());
        m
    }

    pub fn identity(n: usize) -> Self {
        Self::point_mass(&Permutation::identity(n))
    }

    /// Builds the element Σ f(w) w by enumerating S_n.
    pub fn from_fn(
        n: usize,
        limits: &Limits,
        mut f: impl FnMut(&Permutation) -> BigRational,
    ) -> Result<Self> {
        let mut m = Self::zero(n);
        for w in crate::perm::enumerate_sn(n, limits)? {
            let c = f(&w);
            m.set(&w, c);
        }
        Ok(m)
    }

    pub fn uniform(n: usize, limits: &Limits) -> Result<Self> {
        let c = BigRational::new(BigInt::one(), factorial(n));
        Self::from_fn(n, limits, |_| c.clone())
    }

    pub fn from_entries(
        n: usize,
        entries: impl IntoIterator<Item = (Permutation, BigRational)>,
    ) -> Result<Self> {
        let mut m = Self::zero(n);
        for (w, c) in entries {
            if w.n() != n {
                return Err(Error::SizeMismatch {
                    left: n,
                    right: w.n(),
                });
            }
            m.add_to(&w, &c);
        }
        Ok(m)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn coeff(&self, w: &Permutation) -> BigRational {
        assert_eq!(w.n(), self.n);
        match &self.store {
            Store::Dense(v) => v[w.rank()].clone(),
            Store::Sparse(m) => m.get(w).cloned().unwrap_or_else(BigRational::zero),
        }
    }

    pub fn set(&mut self, w: &Permutation, c: BigRational) {
        assert_eq!(w.n(), self.n);
        match &mut self.store {
            Store::Dense(v) => v[w.rank()] = c,
            Store::Sparse(m) => {
                if c.is_zero() {
                    m.remove(w);
                } else {
                    m.insert(w.clone(), c);
                }
            }
        }
    }

    pub fn add_to(&mut self, w: &Permutation, c: &BigRational) {
        let cur = self.coeff(w);
        self.set(w, cur + c);
    }

    /// Nonzero coefficients in lexicographic order of the permutation.
    pub fn entries(&self) -> Vec<(Permutation, BigRational)> {
        match &self.store {
            Store::Dense(v) => Permutations::new(self.n)
                .zip(v.iter())
                .filter(|(_, c)| !c.is_zero())
                .map(|(w, c)| (w, c.clone()))
                .collect(),
            Store::Sparse(m) => m.iter().map(|(w, c)| (w.clone(), c.clone())).collect(),
        }
    }

    pub fn support_len(&self) -> usize {
        match &self.store {
            Store::Dense(v) => v.iter().filter(|c| !c.is_zero()).count(),
            Store::Sparse(m) => m.len(),
        }
    }

    pub fn total_mass(&self) -> BigRational {
        self.entries().into_iter().map(|(_, c)| c).sum()
    }

    pub fn is_probability(&self) -> bool {
        let entries = self.entries();
        entries.iter().all(|(_, c)| !c.is_negative())
            && entries.into_iter().map(|(_, c)| c).sum::<BigRational>().is_one()
    }

    fn map_entries(&self, mut f: impl FnMut(&Permutation, &BigRational) -> (Permutation, BigRational)) -> Self {
        let mut out = Self::zero(self.n);
        for (w, c) in self.entries() {
            let (w2, c2) = f(&w, &c);
            out.add_to(&w2, &c2);
        }
        out
    }

    pub fn scale(&self, s: &BigRational) -> Self {
        self.map_entries(|w, c| (w.clone(), c * s))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_n(other)?;
        let mut out = self.clone();
        for (w, c) in other.entries() {
            out.add_to(&w, &c);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(&-BigRational::one()))
    }

    /// Adds `s` times the identity element.
    pub fn add_scalar(&self, s: &BigRational) -> Self {
        let mut out = self.clone();
        out.add_to(&Permutation::identity(self.n), s);
        out
    }

    /// Coefficient of w becomes the coefficient of w⁻¹.
    pub fn invert(&self) -> Self {
        self.map_entries(|w, c| (w.inverse(), c.clone()))
    }

    /// Multiplies the coefficient of each w by sgn(w).
    pub fn sign_twist(&self) -> Self {
        self.map_entries(|w, c| {
            let c = if w.sign() < 0 { -c } else { c.clone() };
            (w.clone(), c)
        })
    }

    /// Image under S_n ↪ S_{n+extra}, the new letters being fixed.
    pub fn embed(&self, extra: usize) -> Self {
        let mut out = Self::zero(self.n + extra);
        for (w, c) in self.entries() {
            out.add_to(&w.extend(extra), &c);
        }
        out
    }

    fn check_same_n(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            Err(Error::SizeMismatch {
                left: self.n,
                right: other.n,
            })
        } else {
            Ok(())
        }
    }

    /// Group-algebra product `self · other`, the convolution `self * other`.
    pub fn convolve(&self, other: &Self) -> Result<Self> {
        self.check_same_n(other)?;
        let (left, left_den) = integer_entries(self);
        let (right, right_den) = integer_entries(other);
        let den = BigRational::from_integer(left_den * right_den);
        let n = self.n;
        let mut out = Self::zero(n);
        if n <= DENSE_MAX_N {
            let size: usize = factorial(n).try_into().unwrap();
            let accumulate = |mut acc: Vec<BigInt>, (s, a): &(Permutation, BigInt)| {
                for (t, b) in &right {
                    acc[s.compose(t).rank()] += a * b;
                }
                acc
            };
            let sums: Vec<BigInt> = if left.len() * right.len() > 50_000 {
                left.par_iter()
                    .fold(|| vec![BigInt::zero(); size], accumulate)
                    .reduce(
                        || vec![BigInt::zero(); size],
                        |mut a, b| {
                            for (x, y) in a.iter_mut().zip(b) {
                                *x += y;
                            }
                            a
                        },
                    )
            } else {
                left.iter().fold(vec![BigInt::zero(); size], accumulate)
            };
            if let Store::Dense(v) = &mut out.store {
                for (slot, s) in v.iter_mut().zip(sums) {
                    if !s.is_zero() {
                        *slot = BigRational::from_integer(s) / &den;
                    }
                }
            }
        } else {
            let mut sums: BTreeMap<Permutation, BigInt> = BTreeMap::new();
            for (s, a) in &left {
                for (t, b) in &right {
                    *sums.entry(s.compose(t)).or_insert_with(BigInt::zero) += a * b;
                }
            }
            for (w, s) in sums {
                out.set(&w, BigRational::from_integer(s) / &den);
            }
        }
        Ok(out)
    }

    /// Lumps coefficients by cycle type.
    pub fn lump(&self) -> ClassMeasure {
        let mut out = ClassMeasure::zero(self.n);
        for (w, c) in self.entries() {
            out.add_to(&w.cycle_type(), &c);
        }
        out
    }
}

impl PartialEq for PermMeasure {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.entries() == other.entries()
    }
}

impl Eq for PermMeasure {}

/// Nonzero entries scaled to integers, plus the common denominator.
fn integer_entries(m: &PermMeasure) -> (Vec<(Permutation, BigInt)>, BigInt) {
    let entries = m.entries();
    let den = entries
        .iter()
        .fold(BigInt::one(), |acc, (_, c)| acc.lcm(c.denom()));
    let ints = entries
        .into_iter()
        .map(|(w, c)| {
            let scaled = c.numer() * (&den / c.denom());
            (w, scaled)
        })
        .collect();
    (ints, den)
}

/// Total variation distance ½ Σ |P(w) − Q(w)| between probability measures.
pub fn total_variation(p: &PermMeasure, q: &PermMeasure) -> Result<BigRational> {
    p.check_same_n(q)?;
    for (name, m) in [("first", p), ("second", q)] {
        if !m.is_probability() {
            return Err(Error::NotProbability(format!("{name} argument")));
        }
    }
    let diff = p.sub(q)?;
    let l1: BigRational = diff.entries().into_iter().map(|(_, c)| c.abs()).sum();
    Ok(l1 / rat_int(2))
}

/// TV distance to the uniform measure without materializing it.
pub fn distance_to_uniform(p: &PermMeasure) -> Result<BigRational> {
    if !p.is_probability() {
        return Err(Error::NotProbability("argument".into()));
    }
    let u = BigRational::new(BigInt::one(), factorial(p.n));
    let entries = p.entries();
    let zeros = factorial(p.n) - BigInt::from(entries.len());
    let mut l1 = &u * BigRational::from_integer(zeros);
    for (_, c) in entries {
        l1 += (c - &u).abs();
    }
    Ok(l1 / rat_int(2))
}

/// Ring a_1..a_n with a_i of weight i, truncated at weight `max_weight`.
pub fn cycle_index_ring(n_vars: usize, max_weight: u32) -> Arc<SeriesRing> {
    let names: Vec<String> = (1..=n_vars).map(|i| format!("a{i}")).collect();
    let weights: Vec<(&str, u32)> = names
        .iter()
        .enumerate()
        .map(|(i, s)| (s.as_str(), (i + 1) as u32))
        .collect();
    SeriesRing::builder()
        .vars(names.iter().cloned())
        .bound(&weights, max_weight)
        .build()
        .expect("every a_i carries positive weight")
}

/// Σ_w E(w) Π a_i^{n_i(w)}, not divided by n!.
pub fn cycle_index(e: &PermMeasure) -> TruncatedSeries {
    let ring = cycle_index_ring(e.n, e.n as u32);
    cycle_index_in(e, &ring).expect("ring has a_1..a_n")
}

/// Cycle index in a caller-supplied ring containing variables `a1..an`.
pub fn cycle_index_in(e: &PermMeasure, ring: &Arc<SeriesRing>) -> Result<TruncatedSeries> {
    let idx: Vec<usize> = (1..=e.n)
        .map(|i| ring.index(&format!("a{i}")))
        .collect::<Result<_>>()?;
    let mut out = TruncatedSeries::zero(ring);
    for (ct, c) in e.lump().entries() {
        let mut exps = vec![0; ring.nvars()];
        for (i, &m) in ct.mults().iter().enumerate() {
            exps[idx[i]] += m as u32;
        }
        out.add_term(exps, c.clone());
    }
    Ok(out)
}

/// A measure (or signed element) on the cycle types of S_n.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassMeasure {
    n: usize,
    coeffs: BTreeMap<CycleType, BigRational>,
}

impl ClassMeasure {
    pub fn zero(n: usize) -> Self {
        ClassMeasure {
            n,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn coeff(&self, ct: &CycleType) -> BigRational {
        self.coeffs.get(ct).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn add_to(&mut self, ct: &CycleType, c: &BigRational) {
        assert_eq!(ct.n(), self.n);
        let slot = self.coeffs.entry(ct.clone()).or_insert_with(BigRational::zero);
        *slot += c;
        if slot.is_zero() {
            self.coeffs.remove(ct);
        }
    }

    pub fn entries(&self) -> impl Iterator<Item = (&CycleType, &BigRational)> {
        self.coeffs.iter()
    }

    pub fn total_mass(&self) -> BigRational {
        self.coeffs.values().sum()
    }

    pub fn is_probability(&self) -> bool {
        self.coeffs.values().all(|c| !c.is_negative()) && self.total_mass().is_one()
    }

    /// Largest |difference| over all cycle types.
    pub fn max_abs_diff(&self, other: &Self) -> BigRational {
        let mut keys: Vec<&CycleType> = self.coeffs.keys().collect();
        keys.extend(other.coeffs.keys());
        keys.into_iter()
            .map(|k| (self.coeff(k) - other.coeff(k)).abs())
            .max()
            .unwrap_or_else(BigRational::zero)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;
    use proptest::prelude::*;

    fn p(v: &[usize]) -> Permutation {
        Permutation::from_one_line(v).unwrap()
    }

    fn lim() -> Limits {
        Limits::default()
    }

    #[test]
    fn identity_is_unit() {
        let b = PermMeasure::from_entries(
            3,
            [(p(&[2, 1, 3]), rat(1, 3)), (p(&[3, 1, 2]), rat(2, 3))],
        )
        .unwrap();
        let e = PermMeasure::identity(3);
        assert_eq!(e.convolve(&b).unwrap(), b);
        assert_eq!(b.convolve(&e).unwrap(), b);
    }

    #[test]
    fn product_follows_composition() {
        let u = p(&[2, 3, 1]);
        let v = p(&[2, 1, 3]);
        let prod = PermMeasure::point_mass(&u)
            .convolve(&PermMeasure::point_mass(&v))
            .unwrap();
        assert_eq!(prod, PermMeasure::point_mass(&u.compose(&v)));
    }

    #[test]
    fn inversion_examples() {
        let m = PermMeasure::point_mass(&p(&[2, 3, 1]));
        assert_eq!(m.invert(), PermMeasure::point_mass(&p(&[3, 1, 2])));
        let u = PermMeasure::uniform(4, &lim()).unwrap();
        assert_eq!(u.invert(), u);
    }

    #[test]
    fn size_mismatch_is_an_error() {
        let a = PermMeasure::identity(3);
        let b = PermMeasure::identity(4);
        assert!(matches!(a.convolve(&b), Err(Error::SizeMismatch { .. })));
    }

    #[test]
    fn tv_examples() {
        let u2 = PermMeasure::uniform(2, &lim()).unwrap();
        assert_eq!(total_variation(&u2, &u2).unwrap(), BigRational::zero());
        let r = PermMeasure::from_entries(2, [(p(&[1, 2]), rat(3, 4)), (p(&[2, 1]), rat(1, 4))])
            .unwrap();
        assert_eq!(total_variation(&r, &u2).unwrap(), rat(1, 4));
        for n in 1..=5 {
            let pm = PermMeasure::identity(n);
            let u = PermMeasure::uniform(n, &lim()).unwrap();
            let expect = BigRational::one() - BigRational::new(BigInt::one(), factorial(n));
            assert_eq!(total_variation(&pm, &u).unwrap(), expect);
            assert_eq!(distance_to_uniform(&pm).unwrap(), expect);
        }
        let signed = PermMeasure::identity(2).scale(&rat(2, 1)).sub(&u2).unwrap();
        assert!(matches!(
            total_variation(&signed, &u2),
            Err(Error::NotProbability(_))
        ));
    }

    #[test]
    fn cycle_index_examples() {
        let z = cycle_index(&PermMeasure::identity(3));
        assert_eq!(z.coeff_of(&[("a1", 3)]).unwrap(), BigRational::one());
        assert_eq!(z.len(), 1);
        let z = cycle_index(&PermMeasure::uniform(2, &lim()).unwrap());
        assert_eq!(z.coeff_of(&[("a1", 2)]).unwrap(), rat(1, 2));
        assert_eq!(z.coeff_of(&[("a2", 1)]).unwrap(), rat(1, 2));
        assert_eq!(z.len(), 2);
    }

    #[test]
    fn sparse_storage_behaves_like_dense() {
        let w = Permutation::rotation(8, 3);
        let a = PermMeasure::from_entries(8, [(w.clone(), rat(1, 2)), (Permutation::identity(8), rat(1, 2))])
            .unwrap();
        let sq = a.convolve(&a).unwrap();
        assert_eq!(sq.coeff(&w.compose(&w)), rat(1, 4));
        assert_eq!(sq.coeff(&w), rat(1, 2));
        assert!(sq.is_probability());
        assert_eq!(sq.invert().invert(), sq);
    }

    fn arb_measure(n: usize) -> impl Strategy<Value = PermMeasure> {
        let size: usize = factorial(n).try_into().unwrap();
        prop::collection::vec(0u32..6, size).prop_filter_map("nonzero mass", move |weights| {
            let total: u32 = weights.iter().sum();
            if total == 0 {
                return None;
            }
            let entries = weights.iter().enumerate().map(|(r, &w)| {
                (Permutation::unrank(n, r), rat(w as i64, total as i64))
            });
            Some(PermMeasure::from_entries(n, entries).unwrap())
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn convolution_is_associative(a in arb_measure(4), b in arb_measure(4), c in arb_measure(4)) {
            let left = a.convolve(&b).unwrap().convolve(&c).unwrap();
            let right = a.convolve(&b.convolve(&c).unwrap()).unwrap();
            prop_assert_eq!(left, right);
        }

        #[test]
        fn convolution_of_probabilities_is_probability(a in arb_measure(4), b in arb_measure(4)) {
            prop_assert!(a.convolve(&b).unwrap().is_probability());
        }

        #[test]
        fn double_inversion(a in arb_measure(4)) {
            prop_assert_eq!(a.invert().invert(), a);
        }

        #[test]
        fn tv_symmetric_and_triangle(a in arb_measure(4), b in arb_measure(4), c in arb_measure(4)) {
            let ab = total_variation(&a, &b).unwrap();
            prop_assert_eq!(&ab, &total_variation(&b, &a).unwrap());
            let ac = total_variation(&a, &c).unwrap();
            let cb = total_variation(&c, &b).unwrap();
            prop_assert!(ab <= ac + cb);
            prop_assert!(ab >= BigRational::zero() && ab <= BigRational::one());
        }

        #[test]
        fn convolving_cannot_move_away_from_uniform(a in arb_measure(4), b in arb_measure(4)) {
            // ||P * Q - U|| <= ||Q - U||
            let pq = a.convolve(&b).unwrap();
            prop_assert!(distance_to_uniform(&pq).unwrap() <= distance_to_uniform(&b).unwrap());
        }
    }

    #[test]
    fn convolving_cannot_move_away_from_uniform_on_s5() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        for _ in 0..6 {
            let mut gen = || {
                let mut m = PermMeasure::zero(5);
                for w in Permutations::new(5) {
                    if rng.gen_bool(0.3) {
                        m.set(&w, rat_int(rng.gen_range(1..5)));
                    }
                }
                m.set(&Permutation::identity(5), rat_int(1));
                let total = m.total_mass();
                m.scale(&total.recip())
            };
            let (a, b) = (gen(), gen());
            let pq = a.convolve(&b).unwrap();
            assert!(distance_to_uniform(&pq).unwrap() <= distance_to_uniform(&b).unwrap());
        }
    }
}
