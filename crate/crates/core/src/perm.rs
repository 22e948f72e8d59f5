//! Permutations of {1..n} in one-line notation and their statistics.
//!
//! Positions and values are 1-based at the API boundary; internally images are
//! stored 0-based. Composition follows `(u ∘ v)(i) = u(v(i))`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::limits::Limits;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation {
            images: (0..n).collect(),
        }
    }

    /// Builds a permutation from 1-based one-line notation.
    pub fn from_one_line(one_line: &[usize]) -> Result<Self> {
        let n = one_line.len();
        let mut seen = vec![false; n];
        let mut images = Vec::with_capacity(n);
        for &v in one_line {
            if v == 0 || v > n || seen[v - 1] {
                return Err(Error::InvalidArgument(format!(
                    "{one_line:?} is not a permutation of 1..{n}"
                )));
            }
            seen[v - 1] = true;
            images.push(v - 1);
        }
        Ok(Permutation { images })
    }

    pub(crate) fn from_zero_based(images: Vec<usize>) -> Self {
        debug_assert!({
            let mut s = images.clone();
            s.sort_unstable();
            s.iter().enumerate().all(|(i, &v)| i == v)
        });
        Permutation { images }
    }

    /// The cycle ζ^k where ζ = (1 2 ⋯ n), i.e. i ↦ i + k (mod n).
    pub fn rotation(n: usize, k: usize) -> Self {
        Permutation {
            images: (0..n).map(|i| (i + k) % n).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.images.len()
    }

    /// 1-based image of the 1-based point `i`.
    pub fn image(&self, i: usize) -> usize {
        self.images[i - 1] + 1
    }

    pub fn one_line(&self) -> Vec<usize> {
        self.images.iter().map(|&v| v + 1).collect()
    }

    /// `self ∘ other`, i.e. apply `other` first.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        assert_eq!(self.n(), other.n(), "composing permutations of different sizes");
        Permutation {
            images: other.images.iter().map(|&j| self.images[j]).collect(),
        }
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.n()];
        for (i, &v) in self.images.iter().enumerate() {
            inv[v] = i;
        }
        Permutation { images: inv }
    }

    /// Embeds S_n into S_{n+extra}, fixing the new letters.
    pub fn extend(&self, extra: usize) -> Permutation {
        let n = self.n();
        let mut images = self.images.clone();
        images.extend(n..n + extra);
        Permutation { images }
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &v)| i == v)
    }

    pub fn descent_count(&self) -> usize {
        self.images.windows(2).filter(|w| w[0] > w[1]).count()
    }

    pub fn major_index(&self) -> usize {
        self.images
            .windows(2)
            .enumerate()
            .filter(|(_, w)| w[0] > w[1])
            .map(|(i, _)| i + 1)
            .sum()
    }

    /// d(w), plus one when w(n) > w(1). For n = 1 this is 0.
    pub fn cyclic_descent_count(&self) -> usize {
        let n = self.n();
        let wrap = n >= 2 && self.images[n - 1] > self.images[0];
        self.descent_count() + usize::from(wrap)
    }

    pub fn cycle_type(&self) -> CycleType {
        let n = self.n();
        let mut mults = vec![0; n];
        let mut seen = vec![false; n];
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut len = 0;
            let mut j = start;
            while !seen[j] {
                seen[j] = true;
                j = self.images[j];
                len += 1;
            }
            mults[len - 1] += 1;
        }
        CycleType { mults }
    }

    pub fn fixed_points(&self) -> usize {
        self.images.iter().enumerate().filter(|(i, &v)| *i == v).count()
    }

    /// +1 or -1, from the parity of n minus the number of cycles.
    pub fn sign(&self) -> i32 {
        self.cycle_type().sign()
    }

    pub fn stats(&self) -> PermStats {
        PermStats {
            descents: self.descent_count(),
            major_index: self.major_index(),
            cyclic_descents: self.cyclic_descent_count(),
            cycle_type: self.cycle_type(),
        }
    }

    /// Position in the lexicographic order of S_n (0-based).
    pub fn rank(&self) -> usize {
        let n = self.n();
        let mut rank = 0;
        for i in 0..n {
            let smaller_later = self.images[i + 1..]
                .iter()
                .filter(|&&v| v < self.images[i])
                .count();
            rank = rank * (n - i) + smaller_later;
        }
        rank
    }

    /// Inverse of [`Permutation::rank`].
    pub fn unrank(n: usize, mut rank: usize) -> Permutation {
        let mut digits = vec![0; n];
        for i in (0..n).rev() {
            let base = n - i;
            digits[i] = rank % base;
            rank /= base;
        }
        let mut pool: Vec<usize> = (0..n).collect();
        let images = digits.into_iter().map(|d| pool.remove(d)).collect();
        Permutation { images }
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.images.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{}", v + 1)?;
        }
        Ok(())
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.to_string().replace(' ', ","))
    }
}

impl FromStr for Permutation {
    type Err = Error;

    /// Parses space- or comma-separated 1-based one-line notation.
    fn from_str(s: &str) -> Result<Self> {
        let values = s
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|t| !t.is_empty())
            .map(|t| {
                t.parse::<usize>()
                    .map_err(|_| Error::Parse(format!("bad permutation entry {t:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Permutation::from_one_line(&values)
    }
}

/// Partition of n recorded by multiplicities: `mults[i-1]` is the number of i-cycles.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct CycleType {
    mults: Vec<usize>,
}

impl CycleType {
    pub fn from_mults(mut mults: Vec<usize>) -> Self {
        let n: usize = mults.iter().enumerate().map(|(i, m)| (i + 1) * m).sum();
        mults.resize(n, 0);
        CycleType { mults }
    }

    /// From a list of cycle lengths in any order.
    pub fn from_parts(parts: &[usize]) -> Self {
        let n: usize = parts.iter().sum();
        let mut mults = vec![0; n];
        for &p in parts {
            assert!(p > 0, "zero-length cycle");
            mults[p - 1] += 1;
        }
        CycleType { mults }
    }

    pub fn identity(n: usize) -> Self {
        let mut mults = vec![0; n];
        if n > 0 {
            mults[0] = n;
        }
        CycleType { mults }
    }

    pub fn n(&self) -> usize {
        self.mults.len()
    }

    /// Number of i-cycles (1-based `i`); zero beyond n.
    pub fn count(&self, i: usize) -> usize {
        self.mults.get(i.wrapping_sub(1)).copied().unwrap_or(0)
    }

    pub fn mults(&self) -> &[usize] {
        &self.mults
    }

    /// Cycle lengths in weakly decreasing order.
    pub fn parts(&self) -> Vec<usize> {
        let mut out = Vec::new();
        for (i, &m) in self.mults.iter().enumerate().rev() {
            out.extend(std::iter::repeat_n(i + 1, m));
        }
        out
    }

    pub fn cycles(&self) -> usize {
        self.mults.iter().sum()
    }

    pub fn sign(&self) -> i32 {
        if (self.n() - self.cycles()).is_multiple_of(2) {
            1
        } else {
            -1
        }
    }

    /// Number of permutations of S_n with this cycle type: n! / Π i^{n_i} n_i!.
    pub fn class_size(&self) -> BigInt {
        let mut denom = BigInt::from(1);
        for (i, &m) in self.mults.iter().enumerate() {
            denom *= crate::arith::pow_big((i + 1) as i64, m) * crate::arith::factorial(m);
        }
        crate::arith::factorial(self.n()) / denom
    }

    /// All cycle types of S_n in ascending `Ord` order.
    pub fn all(n: usize) -> Vec<CycleType> {
        let mut out = Vec::new();
        let mut parts = Vec::new();
        partitions_rec(n, n, &mut parts, &mut out);
        let mut types: Vec<CycleType> = out.iter().map(|p| CycleType::from_parts(p)).collect();
        if n == 0 {
            types = vec![CycleType { mults: vec![] }];
        }
        types.sort();
        types
    }
}

fn partitions_rec(rest: usize, max: usize, parts: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if rest == 0 {
        out.push(parts.clone());
        return;
    }
    for p in (1..=rest.min(max)).rev() {
        parts.push(p);
        partitions_rec(rest - p, p, parts, out);
        parts.pop();
    }
}

impl fmt::Display for CycleType {
    /// `1^a 2^b …`, listing only lengths that occur.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, &m) in self.mults.iter().enumerate() {
            if m == 0 {
                continue;
            }
            if !first {
                f.write_str(" ")?;
            }
            first = false;
            write!(f, "{}^{}", i + 1, m)?;
        }
        Ok(())
    }
}

impl FromStr for CycleType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut parts = Vec::new();
        for tok in s.split_whitespace() {
            let (len, mult) = tok
                .split_once('^')
                .ok_or_else(|| Error::Parse(format!("cycle type token {tok:?}")))?;
            let len: usize = len
                .parse()
                .map_err(|_| Error::Parse(format!("cycle length {len:?}")))?;
            let mult: usize = mult
                .parse()
                .map_err(|_| Error::Parse(format!("cycle multiplicity {mult:?}")))?;
            if len == 0 {
                return Err(Error::Parse("zero cycle length".into()));
            }
            parts.extend(std::iter::repeat_n(len, mult));
        }
        Ok(CycleType::from_parts(&parts))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PermStats {
    pub descents: usize,
    pub major_index: usize,
    pub cyclic_descents: usize,
    pub cycle_type: CycleType,
}

/// Lexicographic stream over S_n.
#[derive(Clone, Debug)]
pub struct Permutations {
    next: Option<Vec<usize>>,
}

impl Permutations {
    /// Unchecked constructor; callers enforce the enumeration cap.
    pub(crate) fn new(n: usize) -> Self {
        Permutations {
            next: Some((0..n).collect()),
        }
    }
}

impl Iterator for Permutations {
    type Item = Permutation;

    fn next(&mut self) -> Option<Permutation> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        if next_lexicographic(&mut succ) {
            self.next = Some(succ);
        }
        Some(Permutation { images: current })
    }
}

fn next_lexicographic(v: &mut [usize]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// All n! permutations of S_n in lexicographic order of one-line notation.
pub fn enumerate_sn(n: usize, limits: &Limits) -> Result<Permutations> {
    if n == 0 {
        return Err(Error::InvalidArgument("S_0 is not enumerated; n must be >= 1".into()));
    }
    limits.check_enumeration(n)?;
    Ok(Permutations::new(n))
}

/// Brute-force descent tables of S_n.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DescentTables {
    /// `eulerian[&i]` = #{w : d(w) = i - 1}.
    pub eulerian: BTreeMap<usize, u64>,
    /// `cyclic[&i]` = #{w : cd(w) = i}.
    pub cyclic: BTreeMap<usize, u64>,
}

pub fn descent_tables(n: usize, limits: &Limits) -> Result<DescentTables> {
    let mut eulerian = BTreeMap::new();
    let mut cyclic = BTreeMap::new();
    for w in enumerate_sn(n, limits)? {
        *eulerian.entry(w.descent_count() + 1).or_insert(0) += 1;
        *cyclic.entry(w.cyclic_descent_count()).or_insert(0) += 1;
    }
    Ok(DescentTables { eulerian, cyclic })
}

/// Eulerian numbers A_{n,i} (i - 1 descents) for any n, by the recurrence
/// A_{n,i} = i·A_{n-1,i} + (n-i+1)·A_{n-1,i-1}. Index `i` runs over 0..=n, with entry 0 unused.
pub fn eulerian_row(n: usize) -> Vec<BigInt> {
    let mut row = vec![BigInt::zero(); n + 1];
    if n == 0 {
        return row;
    }
    row[1] = BigInt::from(1);
    for m in 2..=n {
        let mut next = vec![BigInt::zero(); n + 1];
        for i in 1..=m {
            let stay = &row[i] * i;
            let grow = if i >= 2 { &row[i - 1] * (m - i + 1) } else { BigInt::zero() };
            next[i] = stay + grow;
        }
        row = next;
    }
    row
}

/// Cyclic-descent numbers B_{n,i} = #{w ∈ S_n : cd(w) = i}, index 0..=n, for n >= 2.
///
/// Counts by inserting the largest letter into a permutation of S_{n-1}, tracking the
/// cyclic descent count together with whether the wrap-around pair (w(n), w(1)) is a
/// descent. This never touches the Eulerian numbers.
pub fn cyclic_descent_row(n: usize) -> Vec<BigInt> {
    assert!(n >= 2, "cyclic descent numbers are tabulated for n >= 2");
    // state[c][flag]: c cyclic descents; flag = 1 iff w(m) > w(1), the wrap-around descent.
    let mut state = vec![[BigInt::zero(), BigInt::zero()]; n + 1];
    // S_2: [1,2] has a wrap descent (2 > 1), [2,1] has one ordinary descent.
    state[1][1] = BigInt::from(1);
    state[1][0] = BigInt::from(1);
    for m in 2..n {
        // insert letter m+1 into words of length m; m - 1 interior gaps plus front and end.
        let mut next = vec![[BigInt::zero(), BigInt::zero()]; n + 1];
        for c in 0..=m {
            for flag in 0..2 {
                let count = state[c][flag].clone();
                if count.is_zero() {
                    continue;
                }
                let interior_descents = c - flag;
                let interior_ascents = (m - 1) - interior_descents;
                next[c][flag] += &count * interior_descents;
                next[c + 1][flag] += &count * interior_ascents;
                // front: new pair (max, old first) is a descent; wrap becomes an ascent.
                next[c - flag + 1][0] += &count;
                // end: pair (old last, max) is an ascent; wrap (max, old first) is a descent.
                next[c - flag + 1][1] += &count;
            }
        }
        state = next;
    }
    state.into_iter().map(|[a, b]| a + b).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(v: &[usize]) -> Permutation {
        Permutation::from_one_line(v).unwrap()
    }

    #[test]
    fn stats_examples() {
        let s = p(&[1, 2, 3]).stats();
        assert_eq!((s.descents, s.major_index, s.cyclic_descents), (0, 0, 1));
        assert_eq!(s.cycle_type, CycleType::identity(3));

        let s = p(&[2, 1, 3]).stats();
        assert_eq!((s.descents, s.major_index, s.cyclic_descents), (1, 1, 2));
        assert_eq!(s.cycle_type, CycleType::from_parts(&[2, 1]));

        let s = p(&[3, 1, 2]).stats();
        assert_eq!((s.descents, s.major_index, s.cyclic_descents), (1, 1, 1));
        assert_eq!(s.cycle_type, CycleType::from_parts(&[3]));
    }

    #[test]
    fn single_point_has_no_cyclic_descent() {
        assert_eq!(Permutation::identity(1).cyclic_descent_count(), 0);
    }

    #[test]
    fn composition_convention() {
        // (u ∘ v)(i) = u(v(i))
        let u = p(&[2, 3, 1]);
        let v = p(&[2, 1, 3]);
        assert_eq!(u.compose(&v), p(&[3, 2, 1]));
        assert_eq!(v.compose(&u), p(&[1, 3, 2]));
    }

    #[test]
    fn inverse_and_rotation() {
        let w = p(&[2, 3, 1]);
        assert_eq!(w.inverse(), p(&[3, 1, 2]));
        assert_eq!(w.inverse().inverse(), w);
        assert_eq!(Permutation::rotation(3, 1), p(&[2, 3, 1]));
        assert_eq!(Permutation::rotation(3, 3), Permutation::identity(3));
        assert!(w.compose(&w.inverse()).is_identity());
    }

    #[test]
    fn enumeration_small() {
        let lim = Limits::default();
        assert_eq!(enumerate_sn(1, &lim).unwrap().collect::<Vec<_>>(), vec![p(&[1])]);
        assert_eq!(
            enumerate_sn(2, &lim).unwrap().collect::<Vec<_>>(),
            vec![p(&[1, 2]), p(&[2, 1])]
        );
        let s3: Vec<_> = enumerate_sn(3, &lim).unwrap().collect();
        assert_eq!(s3.len(), 6);
        let mut dedup = s3.clone();
        dedup.dedup();
        assert_eq!(dedup.len(), 6);
        assert!(s3.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn enumeration_cap() {
        let lim = Limits::with_enumeration_cap(4);
        assert!(matches!(
            enumerate_sn(5, &lim),
            Err(Error::EnumerationCap { n: 5, cap: 4 })
        ));
        assert!(enumerate_sn(0, &lim).is_err());
    }

    #[test]
    fn rank_matches_enumeration_order() {
        for n in 1..=6 {
            for (r, w) in Permutations::new(n).enumerate() {
                assert_eq!(w.rank(), r);
                assert_eq!(Permutation::unrank(n, r), w);
            }
        }
    }

    #[test]
    fn descent_table_examples() {
        let lim = Limits::default();
        let t = descent_tables(3, &lim).unwrap();
        assert_eq!(t.eulerian, BTreeMap::from([(1, 1), (2, 4), (3, 1)]));
        assert_eq!(t.cyclic, BTreeMap::from([(1, 3), (2, 3)]));
        let t = descent_tables(2, &lim).unwrap();
        assert_eq!(t.cyclic, BTreeMap::from([(1, 2)]));
    }

    #[test]
    #[allow(clippy::needless_range_loop)]
    fn recurrences_match_brute_force() {
        let lim = Limits::default();
        for n in 1..=8 {
            let t = descent_tables(n, &lim).unwrap();
            let row = eulerian_row(n);
            for i in 1..=n {
                assert_eq!(
                    row[i],
                    BigInt::from(t.eulerian.get(&i).copied().unwrap_or(0)),
                    "A({n},{i})"
                );
            }
            if n >= 2 {
                let row = cyclic_descent_row(n);
                for i in 0..=n {
                    assert_eq!(
                        row[i],
                        BigInt::from(t.cyclic.get(&i).copied().unwrap_or(0)),
                        "B({n},{i})"
                    );
                }
            }
        }
    }

    #[test]
    fn cycle_type_display_roundtrip() {
        let ct = CycleType::from_parts(&[2, 1, 1]);
        assert_eq!(ct.to_string(), "1^2 2^1");
        assert_eq!("1^2 2^1".parse::<CycleType>().unwrap(), ct);
        assert_eq!(ct.class_size(), BigInt::from(6));
        assert_eq!(CycleType::all(4).len(), 5);
        let total: BigInt = CycleType::all(5).iter().map(|c| c.class_size()).sum();
        assert_eq!(total, BigInt::from(120));
    }

    #[test]
    fn sign_from_cycle_type() {
        assert_eq!(p(&[2, 1, 3]).sign(), -1);
        assert_eq!(p(&[2, 3, 1]).sign(), 1);
        assert_eq!(Permutation::identity(4).sign(), 1);
    }
}
